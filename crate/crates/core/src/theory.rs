//! Closed-form convergence theory for noisy pairwise gossip.
//!
//! With `m` edges, degrees `d_i` and algebraic connectivity `alpha`, the
//! expected dual gap after `k` iterations is bounded by
//!
//! ```text
//! rho^k * gap0 + (sum_i d_i sigma_i^2 / 4m) * sum_{t=1..k} rho^(k-t) psi(t)
//! rho    = 1 - alpha / 2m
//! psi(t) = sum_i d_i sigma_i^2 r_i^t / sum_i d_i sigma_i^2
//! r_i    = 1 - (d_i / m) (1 - phi_i^2)          (per-node noise rate)
//! ```
//!
//! The asymptotic rate is `rho` unless some noisy node has `r_i > rho`, in
//! which case the largest `r_i` takes over.
//!
//! Starting from `y = 0` the initial dual gap equals `0.5 * ||x_0 - x*||^2`
//! (see [`initial_dual_gap`]), which is what lets the bound be drawn over
//! primal error curves.

use std::fmt;

use crate::engine::NoiseParams;
use crate::error::{Error, Result};
use crate::graph::{algebraic_connectivity, Graph};

/// Tolerance used when collecting the set of nodes attaining the max rate.
const ARGMAX_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    GossipDriven,
    NoiseDriven,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::GossipDriven => "gossip-driven",
            Regime::NoiseDriven => "noise-driven",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub rho: f64,
    pub alpha: f64,
    pub noise_rates: Vec<f64>,
    /// Noisy nodes (`sigma_i^2 > 0`) whose noise rate is maximal.
    pub dominant_set: Vec<usize>,
    /// Largest noise rate among noisy nodes; `0.0` when no node is noisy.
    pub dominant_rate: f64,
    pub threshold_phis: Vec<f64>,
    pub regime: Regime,
}

impl RateReport {
    /// Asymptotic per-iteration rate: `max(rho, dominant_rate)`.
    pub fn asymptotic_rate(&self) -> f64 {
        self.rho.max(self.dominant_rate)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    /// `values[j - 1]` is the bound after `j` iterations.
    pub values: Vec<f64>,
    pub gap0: f64,
    pub noise_scale: f64,
}

/// Graph quantities that every rate formula needs, with `alpha` computed once.
#[derive(Debug, Clone)]
pub struct GraphRates {
    m: usize,
    degrees: Vec<usize>,
    alpha: f64,
}

impl GraphRates {
    pub fn new(g: &Graph) -> Result<Self> {
        let alpha = algebraic_connectivity(g)?.algebraic_connectivity;
        Ok(Self::with_alpha(g, alpha))
    }

    /// Uses a precomputed algebraic connectivity.
    pub fn with_alpha(g: &Graph, alpha: f64) -> Self {
        GraphRates {
            m: g.m(),
            degrees: g.degrees().to_vec(),
            alpha,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rho(&self) -> f64 {
        1.0 - self.alpha / (2.0 * self.m as f64)
    }

    pub fn noise_rate(&self, i: usize, phi: f64) -> f64 {
        1.0 - (self.degrees[i] as f64 / self.m as f64) * (1.0 - phi * phi)
    }

    pub fn noise_rates(&self, p: &NoiseParams) -> Vec<f64> {
        p.phi()
            .iter()
            .enumerate()
            .map(|(i, &phi)| self.noise_rate(i, phi))
            .collect()
    }

    fn check_len(&self, p: &NoiseParams) -> Result<()> {
        if p.len() != self.degrees.len() {
            return Err(Error::invalid(format!(
                "noise parameters for {} nodes, graph has {}",
                p.len(),
                self.degrees.len()
            )));
        }
        Ok(())
    }

    fn weights(&self, sigma2: &[f64]) -> Vec<f64> {
        self.degrees
            .iter()
            .zip(sigma2)
            .map(|(&d, &s)| d as f64 * s)
            .collect()
    }

    /// `sum_i d_i sigma_i^2 / 4m`.
    pub fn noise_scale(&self, sigma2: &[f64]) -> f64 {
        self.weights(sigma2).iter().sum::<f64>() / (4.0 * self.m as f64)
    }

    /// Degree-and-variance weighted average of `r_i^t`.
    pub fn psi(&self, t: u64, p: &NoiseParams) -> Result<f64> {
        self.check_len(p)?;
        let w = self.weights(p.sigma2());
        let total: f64 = w.iter().sum();
        if total <= 0.0 {
            return Err(Error::Degenerate(
                "psi is undefined when every variance is zero".into(),
            ));
        }
        let t = i32::try_from(t).map_err(|_| Error::invalid("iteration too large"))?;
        let acc: f64 = w
            .iter()
            .zip(self.noise_rates(p))
            .map(|(wi, r)| wi * r.powi(t))
            .sum();
        Ok(acc / total)
    }

    /// The bound for every horizon `1..=k`.
    ///
    /// Uses `S_j = rho * S_{j-1} + psi(j)` for the noise sum; all terms are
    /// nonnegative so the recurrence loses nothing to cancellation.
    pub fn theorem_bound(&self, k: usize, p: &NoiseParams, gap0: f64) -> Result<BoundCurve> {
        self.check_len(p)?;
        if k == 0 {
            return Err(Error::invalid("bound horizon must be >= 1"));
        }
        if gap0.is_nan() || gap0 < 0.0 {
            return Err(Error::invalid(format!(
                "initial gap must be >= 0, got {gap0}"
            )));
        }
        let rho = self.rho();
        let w = self.weights(p.sigma2());
        let total: f64 = w.iter().sum();
        let noise_scale = total / (4.0 * self.m as f64);
        let rates = self.noise_rates(p);

        let mut powers = vec![1.0; rates.len()];
        let mut noise_sum = 0.0;
        let mut values = Vec::with_capacity(k);
        for j in 1..=k {
            let psi = if total > 0.0 {
                let mut acc = 0.0;
                for ((pw, r), wi) in powers.iter_mut().zip(&rates).zip(&w) {
                    *pw *= r;
                    acc += wi * *pw;
                }
                acc / total
            } else {
                0.0
            };
            noise_sum = rho * noise_sum + psi;
            values.push(rho.powi(j as i32) * gap0 + noise_scale * noise_sum);
        }
        Ok(BoundCurve {
            values,
            gap0,
            noise_scale,
        })
    }

    /// The bound at a single horizon `k`, summing the noise terms directly in
    /// ascending order of magnitude.
    pub fn theorem_bound_at(&self, k: usize, p: &NoiseParams, gap0: f64) -> Result<f64> {
        self.check_len(p)?;
        if k == 0 {
            return Err(Error::invalid("bound horizon must be >= 1"));
        }
        let rho = self.rho();
        let noise_scale = self.noise_scale(p.sigma2());
        if noise_scale == 0.0 {
            return Ok(rho.powi(k as i32) * gap0);
        }
        let mut terms: Vec<f64> = (1..=k)
            .map(|t| Ok(rho.powi((k - t) as i32) * self.psi(t as u64, p)?))
            .collect::<Result<_>>()?;
        terms.sort_by(f64::total_cmp);
        let sum: f64 = terms.iter().sum();
        Ok(rho.powi(k as i32) * gap0 + noise_scale * sum)
    }

    /// Largest per-node decay rate that keeps every noise rate at or below
    /// `rho`: `sqrt(1 - alpha / 2 d_i)`.
    pub fn threshold_phis(&self) -> Vec<f64> {
        self.degrees
            .iter()
            .map(|&d| (1.0 - self.alpha / (2.0 * d as f64)).max(0.0).sqrt())
            .collect()
    }

    /// Decay schedule `phi_i = sqrt(1 - gamma / d_i)` for `0 < gamma <= d_min`.
    pub fn corollary_phis(&self, gamma: f64) -> Result<Vec<f64>> {
        let d_min = self.degrees.iter().copied().min().unwrap_or(0) as f64;
        if !(gamma > 0.0 && gamma <= d_min) {
            return Err(Error::invalid(format!(
                "gamma must lie in (0, d_min = {d_min}], got {gamma}"
            )));
        }
        Ok(self
            .degrees
            .iter()
            .map(|&d| (1.0 - gamma / d as f64).max(0.0).sqrt())
            .collect())
    }

    /// `(1 - min(alpha/2m, gamma/m))^j * (gap0 + noise_scale * j)` for `j = 1..=k`,
    /// valid under the schedule of [`corollary_phis`](Self::corollary_phis).
    pub fn corollary_bound(
        &self,
        k: usize,
        sigma2: &[f64],
        gap0: f64,
        gamma: f64,
    ) -> Result<BoundCurve> {
        if sigma2.len() != self.degrees.len() {
            return Err(Error::invalid("sigma2 length does not match the graph"));
        }
        if k == 0 {
            return Err(Error::invalid("bound horizon must be >= 1"));
        }
        self.corollary_phis(gamma)?;
        let m = self.m as f64;
        let base = 1.0 - (self.alpha / (2.0 * m)).min(gamma / m);
        let noise_scale = self.noise_scale(sigma2);
        let values = (1..=k)
            .map(|j| base.powi(j as i32) * (gap0 + noise_scale * j as f64))
            .collect();
        Ok(BoundCurve {
            values,
            gap0,
            noise_scale,
        })
    }

    pub fn rate_report(&self, p: &NoiseParams) -> Result<RateReport> {
        self.check_len(p)?;
        let rho = self.rho();
        let noise_rates = self.noise_rates(p);
        let noisy = || (0..noise_rates.len()).filter(|&i| p.sigma2()[i] > 0.0);
        let dominant_rate = noisy().map(|i| noise_rates[i]).fold(0.0, f64::max);
        let dominant_set = noisy()
            .filter(|&i| noise_rates[i] >= dominant_rate - ARGMAX_TOL)
            .collect::<Vec<_>>();
        let regime = if !dominant_set.is_empty() && dominant_rate > rho {
            Regime::NoiseDriven
        } else {
            Regime::GossipDriven
        };
        Ok(RateReport {
            rho,
            alpha: self.alpha,
            noise_rates,
            dominant_set,
            dominant_rate,
            threshold_phis: self.threshold_phis(),
            regime,
        })
    }
}

pub fn rho(g: &Graph) -> Result<f64> {
    Ok(GraphRates::new(g)?.rho())
}

pub fn psi(t: u64, g: &Graph, p: &NoiseParams) -> Result<f64> {
    GraphRates::new(g)?.psi(t, p)
}

pub fn theorem_bound(k: usize, g: &Graph, p: &NoiseParams, gap0: f64) -> Result<BoundCurve> {
    GraphRates::new(g)?.theorem_bound(k, p, gap0)
}

pub fn threshold_phi(g: &Graph) -> Result<Vec<f64>> {
    Ok(GraphRates::new(g)?.threshold_phis())
}

pub fn corollary_bound(
    k: usize,
    g: &Graph,
    sigma2: &[f64],
    gap0: f64,
    gamma: f64,
) -> Result<BoundCurve> {
    GraphRates::new(g)?.corollary_bound(k, sigma2, gap0, gamma)
}

pub fn rate_report(g: &Graph, p: &NoiseParams) -> Result<RateReport> {
    GraphRates::new(g)?.rate_report(p)
}

/// `0.5 * ||c - mean(c)||^2`, the dual gap at `y = 0` for the consensus system.
pub fn initial_dual_gap(c: &[f64]) -> f64 {
    let mean = c.iter().sum::<f64>() / c.len() as f64;
    0.5 * c.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
}
