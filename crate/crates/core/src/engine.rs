//! The gossip state machine.
//!
//! Each iteration samples one edge `(i, j)` uniformly. Both endpoints draw a
//! fresh Gaussian `v`, inject `phi^t * v` and withdraw whatever they injected
//! on their previous activation, then both take the average of the two
//! perturbed values. With every variance zero this is plain pairwise gossip.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{RandomStream, SimStreams};

/// Per-node noise variances and decay rates.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseParams {
    sigma2: Vec<f64>,
    phi: Vec<f64>,
}

impl NoiseParams {
    pub fn new(sigma2: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if sigma2.len() != phi.len() {
            return Err(Error::invalid(format!(
                "sigma2 has {} entries but phi has {}",
                sigma2.len(),
                phi.len()
            )));
        }
        if let Some((i, s)) = sigma2
            .iter()
            .enumerate()
            .find(|(_, s)| !(**s >= 0.0 && s.is_finite()))
        {
            return Err(Error::invalid(format!(
                "sigma2[{i}] = {s} is not a finite nonnegative variance"
            )));
        }
        if let Some((i, p)) = phi
            .iter()
            .enumerate()
            .find(|(_, p)| !(**p >= 0.0 && **p < 1.0))
        {
            return Err(Error::invalid(format!("phi[{i}] = {p} is outside [0, 1)")));
        }
        Ok(NoiseParams { sigma2, phi })
    }

    pub fn uniform(n: usize, sigma2: f64, phi: f64) -> Result<Self> {
        Self::new(vec![sigma2; n], vec![phi; n])
    }

    /// All variances zero: the standard gossip baseline.
    pub fn noiseless(n: usize) -> Self {
        NoiseParams {
            sigma2: vec![0.0; n],
            phi: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.sigma2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma2.is_empty()
    }

    pub fn sigma2(&self) -> &[f64] {
        &self.sigma2
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn is_noiseless(&self) -> bool {
        self.sigma2.iter().all(|&s| s == 0.0)
    }
}

/// One node's view: its value, how many times it has been activated, and the
/// noise term it injected last time and has yet to withdraw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeState {
    pub x: f64,
    pub t: u64,
    pub outstanding: f64,
}

#[derive(Debug, Clone)]
pub struct SimState<'g> {
    graph: &'g Graph,
    nodes: Vec<NodeState>,
    params: NoiseParams,
    iteration: u64,
    c: Vec<f64>,
    c_sum: f64,
    target: f64,
    initial_sq_dist: f64,
}

fn phi_pow(phi: f64, t: u64) -> f64 {
    match i32::try_from(t) {
        Ok(t) => phi.powi(t),
        Err(_) => phi.powf(t as f64),
    }
}

impl<'g> SimState<'g> {
    pub fn init(graph: &'g Graph, c: Vec<f64>, params: NoiseParams) -> Result<Self> {
        let n = graph.n();
        if c.len() != n {
            return Err(Error::invalid(format!(
                "{} private values for {n} nodes",
                c.len()
            )));
        }
        if params.len() != n {
            return Err(Error::invalid(format!(
                "noise parameters for {} nodes, graph has {n}",
                params.len()
            )));
        }
        if graph.m() == 0 {
            return Err(Error::invalid("graph has no edges"));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("private values must be finite"));
        }
        let c_sum: f64 = c.iter().sum();
        let target = c_sum / n as f64;
        let initial_sq_dist = c.iter().map(|v| (v - target) * (v - target)).sum();
        let nodes = c
            .iter()
            .map(|&x| NodeState {
                x,
                t: 0,
                outstanding: 0.0,
            })
            .collect();
        Ok(SimState {
            graph,
            nodes,
            params,
            iteration: 0,
            c,
            c_sum,
            target,
            initial_sq_dist,
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn params(&self) -> &NoiseParams {
        &self.params
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn private_values(&self) -> &[f64] {
        &self.c
    }

    /// The consensus value every coordinate should reach, `mean(c)`.
    pub fn target(&self) -> f64 {
        self.target
    }

    pub fn values(&self) -> Vec<f64> {
        self.nodes.iter().map(|s| s.x).collect()
    }

    /// Draws node `i`'s next noise contribution without mutating the state.
    ///
    /// Returns the injected amount `w = phi^t * v - outstanding` and the node
    /// state after the draw (counter not yet incremented).
    pub fn draw_noise(&self, i: usize, stream: &mut RandomStream) -> Result<(f64, NodeState)> {
        let node = self.nodes[i];
        let v = stream.gaussian(self.params.sigma2[i])?;
        let fresh = phi_pow(self.params.phi[i], node.t) * v;
        let w = fresh - node.outstanding;
        Ok((
            w,
            NodeState {
                outstanding: fresh,
                ..node
            },
        ))
    }

    /// One iteration with an edge drawn from `streams`.
    pub fn step(&mut self, streams: &SimStreams) -> Result<usize> {
        let e = streams.edge_index(self.iteration, self.graph.m())?;
        self.step_edge(e, streams)?;
        Ok(e)
    }

    /// One iteration on a caller-chosen edge.
    pub fn step_edge(&mut self, e: usize, streams: &SimStreams) -> Result<()> {
        let (i, j) = self.graph.edge(e);
        let (wi, ni) = self.draw_noise(i, &mut streams.noise_stream(i, self.nodes[i].t))?;
        let (wj, nj) = self.draw_noise(j, &mut streams.noise_stream(j, self.nodes[j].t))?;
        let avg = (ni.x + wi + nj.x + wj) / 2.0;
        self.nodes[i] = NodeState {
            x: avg,
            t: ni.t + 1,
            ..ni
        };
        self.nodes[j] = NodeState {
            x: avg,
            t: nj.t + 1,
            ..nj
        };
        self.iteration += 1;
        Ok(())
    }

    /// Runs `k` iterations, calling `probe` after each one.
    pub fn run<F>(&mut self, k: u64, streams: &SimStreams, mut probe: F) -> Result<()>
    where
        F: FnMut(&SimState<'g>),
    {
        for _ in 0..k {
            self.step(streams)?;
            probe(self);
        }
        Ok(())
    }

    pub fn squared_error(&self) -> f64 {
        self.nodes
            .iter()
            .map(|s| (s.x - self.target) * (s.x - self.target))
            .sum()
    }

    /// `||x_0 - x*||^2`, the normaliser of [`relative_error`](Self::relative_error).
    pub fn initial_squared_error(&self) -> f64 {
        self.initial_sq_dist
    }

    /// `||x - x*||^2 / ||x_0 - x*||^2`.
    pub fn relative_error(&self) -> Result<f64> {
        if self.initial_sq_dist == 0.0 {
            return Err(Error::Degenerate(
                "initial values are already at consensus; relative error undefined".into(),
            ));
        }
        Ok(self.squared_error() / self.initial_sq_dist)
    }

    /// `mean(x) - mean(c)`.
    pub fn mean_drift(&self) -> f64 {
        let sum: f64 = self.nodes.iter().map(|s| s.x).sum();
        (sum - self.c_sum) / self.nodes.len() as f64
    }

    pub fn outstanding_sum(&self) -> f64 {
        self.nodes.iter().map(|s| s.outstanding).sum()
    }

    /// `sum(x) - sum(c) - sum(outstanding)`; zero up to rounding.
    pub fn conservation_residual(&self) -> f64 {
        let sum: f64 = self.nodes.iter().map(|s| s.x).sum();
        sum - self.c_sum - self.outstanding_sum()
    }
}

/// Plain randomized pairwise gossip, kept separate from [`SimState`] so the
/// noiseless reduction can be checked against an independent update.
#[derive(Debug, Clone)]
pub struct StandardGossip<'g> {
    graph: &'g Graph,
    x: Vec<f64>,
    iteration: u64,
}

impl<'g> StandardGossip<'g> {
    pub fn new(graph: &'g Graph, c: Vec<f64>) -> Result<Self> {
        if c.len() != graph.n() {
            return Err(Error::invalid(format!(
                "{} values for {} nodes",
                c.len(),
                graph.n()
            )));
        }
        if graph.m() == 0 {
            return Err(Error::invalid("graph has no edges"));
        }
        Ok(StandardGossip {
            graph,
            x: c,
            iteration: 0,
        })
    }

    pub fn step(&mut self, streams: &SimStreams) -> Result<usize> {
        let e = streams.edge_index(self.iteration, self.graph.m())?;
        let (i, j) = self.graph.edge(e);
        let avg = (self.x[i] + self.x[j]) / 2.0;
        self.x[i] = avg;
        self.x[j] = avg;
        self.iteration += 1;
        Ok(e)
    }

    pub fn values(&self) -> &[f64] {
        &self.x
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }
}
