use std::fmt;
use std::path::PathBuf;

use crate::engine::NoiseParams;
use crate::error::{Error, Result};
use crate::graph::{
    build_complete, build_cycle, build_path, build_random_geometric, default_rgg_radius,
    read_edge_list, Graph,
};
use crate::rng::RandomStream;
use crate::theory::GraphRates;

/// Attempts made for a connected geometric graph before giving up.
pub const RGG_MAX_ATTEMPTS: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Radius {
    /// `sqrt(ln n / n)`.
    Auto,
    Value(f64),
}

impl Radius {
    pub fn resolve(self, n: usize) -> f64 {
        match self {
            Radius::Auto => default_rgg_radius(n),
            Radius::Value(r) => r,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSpec {
    Cycle { n: usize },
    Path { n: usize },
    Complete { n: usize },
    Rgg { n: usize, radius: Radius, seed: u64 },
    File(PathBuf),
}

/// A graph together with the generator seed that actually produced it.
#[derive(Debug, Clone)]
pub struct BuiltGraph {
    pub graph: Graph,
    pub seed_used: Option<u64>,
}

impl GraphSpec {
    /// Builds the graph. Disconnected geometric samples are retried with
    /// consecutive seeds.
    pub fn build(&self) -> Result<BuiltGraph> {
        let plain = |graph| {
            Ok(BuiltGraph {
                graph,
                seed_used: None,
            })
        };
        match self {
            GraphSpec::Cycle { n } => plain(build_cycle(*n)?),
            GraphSpec::Path { n } => plain(build_path(*n)?),
            GraphSpec::Complete { n } => plain(build_complete(*n)?),
            GraphSpec::File(path) => plain(read_edge_list(path)?),
            GraphSpec::Rgg { n, radius, seed } => {
                let r = radius.resolve(*n);
                let mut last = None;
                for attempt in 0..RGG_MAX_ATTEMPTS {
                    let s = seed.wrapping_add(attempt);
                    match build_random_geometric(*n, r, s) {
                        Ok(graph) => {
                            return Ok(BuiltGraph {
                                graph,
                                seed_used: Some(s),
                            })
                        }
                        Err(Error::Disconnected { components }) => last = Some(components),
                        Err(e) => return Err(e),
                    }
                }
                Err(Error::Setup(format!(
                    "no connected geometric graph with n = {n}, r = {r} in {RGG_MAX_ATTEMPTS} seeds from {seed} (last sample had {} components)",
                    last.unwrap_or(0)
                )))
            }
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Cycle { n } => write!(f, "cycle n={n}"),
            GraphSpec::Path { n } => write!(f, "path n={n}"),
            GraphSpec::Complete { n } => write!(f, "complete n={n}"),
            GraphSpec::Rgg { n, radius, seed } => match radius {
                Radius::Auto => write!(f, "rgg n={n} radius=auto graph_seed={seed}"),
                Radius::Value(r) => write!(f, "rgg n={n} radius={r} graph_seed={seed}"),
            },
            GraphSpec::File(p) => write!(f, "file {}", p.display()),
        }
    }
}

/// How private values are generated for each seed.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Explicit(Vec<f64>),
    /// Independent uniform draws in `[0, 1)`, fresh per seed.
    Uniform,
    /// `c_i = i + 1`.
    Ramp,
}

impl InitSpec {
    pub fn generate(&self, n: usize, stream: &mut RandomStream) -> Result<Vec<f64>> {
        match self {
            InitSpec::Explicit(c) if c.len() == n => Ok(c.clone()),
            InitSpec::Explicit(c) => Err(Error::invalid(format!(
                "{} initial values for {n} nodes",
                c.len()
            ))),
            InitSpec::Uniform => Ok((0..n).map(|_| stream.next_f64()).collect()),
            InitSpec::Ramp => Ok((1..=n).map(|i| i as f64).collect()),
        }
    }
}

impl fmt::Display for InitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitSpec::Explicit(c) => write!(f, "{}", join(c)),
            InitSpec::Uniform => f.write_str("uniform"),
            InitSpec::Ramp => f.write_str("ramp"),
        }
    }
}

/// Per-node list or one value broadcast to every node.
#[derive(Debug, Clone, PartialEq)]
pub enum PerNode {
    Scalar(f64),
    List(Vec<f64>),
}

impl PerNode {
    pub fn resolve(&self, n: usize, what: &str) -> Result<Vec<f64>> {
        match self {
            PerNode::Scalar(v) => Ok(vec![*v; n]),
            PerNode::List(v) if v.len() == n => Ok(v.clone()),
            PerNode::List(v) => Err(Error::invalid(format!(
                "{what} has {} entries for {n} nodes",
                v.len()
            ))),
        }
    }
}

impl fmt::Display for PerNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PerNode::Scalar(v) => write!(f, "{v}"),
            PerNode::List(v) => write!(f, "{}", join(v)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhiSpec {
    Values(PerNode),
    /// `phi_i = sqrt(1 - gamma / d_i)`.
    Corollary(f64),
    /// The corollary schedule at `gamma = alpha / 2`, i.e. every node at its threshold.
    Threshold,
}

impl PhiSpec {
    pub fn resolve(&self, n: usize, rates: &GraphRates) -> Result<Vec<f64>> {
        match self {
            PhiSpec::Values(v) => v.resolve(n, "phi"),
            PhiSpec::Corollary(gamma) => rates.corollary_phis(*gamma),
            PhiSpec::Threshold => Ok(rates.threshold_phis()),
        }
    }
}

impl fmt::Display for PhiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiSpec::Values(v) => write!(f, "{v}"),
            PhiSpec::Corollary(g) => write!(f, "corollary:{g}"),
            PhiSpec::Threshold => f.write_str("threshold"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    pub init: InitSpec,
    /// Noise variances `sigma_i^2`.
    pub sigma2: PerNode,
    pub phi: PhiSpec,
    pub iterations: u64,
    pub seeds: usize,
    pub base_seed: u64,
    /// Record every `stride` iterations (the final iteration is always recorded).
    pub stride: u64,
    /// Worker cap; `None` reads `GOSSIP_THREADS`, falling back to all cores.
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            graph: GraphSpec::Cycle { n: 10 },
            init: InitSpec::Uniform,
            sigma2: PerNode::Scalar(1.0),
            phi: PhiSpec::Values(PerNode::Scalar(0.5)),
            iterations: 10_000,
            seeds: 100,
            base_seed: 0,
            stride: 1,
            threads: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.seeds == 0 {
            return Err(Error::invalid("seed count must be >= 1"));
        }
        if self.iterations == 0 {
            return Err(Error::invalid("iteration count must be >= 1"));
        }
        if self.stride == 0 {
            return Err(Error::invalid("record stride must be >= 1"));
        }
        let check = |v: &PerNode, ok: fn(f64) -> bool, what: &str| {
            let vals = match v {
                PerNode::Scalar(s) => std::slice::from_ref(s),
                PerNode::List(l) => l.as_slice(),
            };
            match vals.iter().find(|&&x| !ok(x)) {
                Some(bad) => Err(Error::invalid(format!("{what} value {bad} out of range"))),
                None => Ok(()),
            }
        };
        check(&self.sigma2, |s| s >= 0.0 && s.is_finite(), "sigma2")?;
        if let PhiSpec::Values(v) = &self.phi {
            check(v, |p| (0.0..1.0).contains(&p), "phi")?;
        }
        Ok(())
    }

    /// Noise parameters once the graph (and, for scheduled phi, its rates) is known.
    pub fn noise_params(&self, g: &Graph, rates: &GraphRates) -> Result<NoiseParams> {
        NoiseParams::new(
            self.sigma2.resolve(g.n(), "sigma2")?,
            self.phi.resolve(g.n(), rates)?,
        )
    }

    /// One-line `key=value` summary, echoed into output headers.
    pub fn describe(&self) -> String {
        format!(
            "graph=[{}] init={} sigma2={} phi={} iters={} seeds={} seed={} stride={}",
            self.graph,
            self.init,
            self.sigma2,
            self.phi,
            self.iterations,
            self.seeds,
            self.base_seed,
            self.stride
        )
    }
}

fn join(v: &[f64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rgg_retries_until_connected() {
        // Small radius makes most samples disconnected; retries must find one or fail cleanly.
        let spec = GraphSpec::Rgg {
            n: 100,
            radius: Radius::Auto,
            seed: 0,
        };
        let built = spec.build().unwrap();
        assert!(built.graph.is_connected());
        let again = spec.build().unwrap();
        assert_eq!(built.graph, again.graph);
        assert_eq!(built.seed_used, again.seed_used);

        let hopeless = GraphSpec::Rgg {
            n: 50,
            radius: Radius::Value(0.01),
            seed: 0,
        };
        assert!(matches!(hopeless.build(), Err(Error::Setup(_))));
    }

    #[test]
    fn auto_radius() {
        assert!((Radius::Auto.resolve(100) - 0.214_596_602_628_934_7).abs() < 1e-15);
    }

    #[test]
    fn per_node_resolution() {
        assert_eq!(PerNode::Scalar(2.0).resolve(3, "x").unwrap(), vec![2.0; 3]);
        assert!(PerNode::List(vec![1.0, 2.0]).resolve(3, "x").is_err());
        let mut s = RandomStream::new(0);
        assert_eq!(
            InitSpec::Ramp.generate(3, &mut s).unwrap(),
            vec![1.0, 2.0, 3.0]
        );
        let u = InitSpec::Uniform.generate(50, &mut s).unwrap();
        assert!(u.iter().all(|v| (0.0..1.0).contains(v)));
    }

    #[test]
    fn validation() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.seeds = 0;
        assert!(cfg.validate().is_err());
        cfg = ExperimentConfig {
            phi: PhiSpec::Values(PerNode::Scalar(1.0)),
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        cfg = ExperimentConfig {
            iterations: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
