//! Monte Carlo coincidence fluxes from uniform product-Haar draws.
//!
//! Sample `k` takes its six uniforms from the counter-based stream
//! `(seed, k)`. Samples are reduced in fixed blocks with compensated sums and
//! the blocks are merged in index order, so the estimates are bit-identical
//! for any worker count.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::amplitudes::amplitude_coefficients;
use super::bell::{chsh_combination, ChshSettings};
use super::fluxes::FluxTable;
use crate::error::{CqgError, Result};
use crate::numerics::{NeumaierSum, RandomStream};
use crate::spin_states::{EulerTriple, TwoParticleAngles};

/// Samples per reduction block.
pub const BLOCK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    /// Worker threads; 0 uses the global pool.
    pub streams: usize,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(CqgError::InvalidConfig("Monte Carlo needs at least one sample".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub theta_a: f64,
    pub theta_b: f64,
    /// Ratio estimates `Σ W_ij / Σ_kl W_kl`.
    pub table: FluxTable,
    /// Delta-method standard errors of `table`.
    pub stderr: FluxTable,
    /// Sample means of `W_ij`, estimating the raw fluxes.
    pub raw_mean: FluxTable,
    pub samples: u64,
}

/// Draws sample `index` from the product Haar measure.
pub fn haar_draw(seed: u64, index: u64) -> TwoParticleAngles {
    let mut u = [0.0; 6];
    RandomStream::new(seed, index as u128).fill_uniform(&mut u);
    let triple = |u: &[f64]| EulerTriple {
        alpha: 2.0 * PI * u[0],
        beta: (1.0 - 2.0 * u[1]).clamp(-1.0, 1.0).acos(),
        gamma: 4.0 * PI * u[2],
    };
    TwoParticleAngles::new(triple(&u[..3]), triple(&u[3..]))
}

/// Per setting: `Σ W_ij`, `Σ T`, `Σ W_ij²`, `Σ W_ij T`, `Σ T²`.
#[derive(Debug, Clone, Default)]
struct Moments {
    w: [NeumaierSum; 4],
    t: NeumaierSum,
    ww: [NeumaierSum; 4],
    wt: [NeumaierSum; 4],
    tt: NeumaierSum,
}

impl Moments {
    fn add(&mut self, weights: [f64; 4]) {
        let t: f64 = weights.iter().sum();
        for (k, w) in weights.iter().enumerate() {
            self.w[k].add(*w);
            self.ww[k].add(w * w);
            self.wt[k].add(w * t);
        }
        self.t.add(t);
        self.tt.add(t * t);
    }

    fn merge(&mut self, other: &Moments) {
        for k in 0..4 {
            self.w[k].merge(&other.w[k]);
            self.ww[k].merge(&other.ww[k]);
            self.wt[k].merge(&other.wt[k]);
        }
        self.t.merge(&other.t);
        self.tt.merge(&other.tt);
    }

    fn estimate(&self, theta_a: f64, theta_b: f64, samples: u64) -> Result<McEstimate> {
        let t = self.t.value();
        if !(t > 0.0) {
            return Err(CqgError::Internal(format!("Monte Carlo total weight {t}")));
        }
        let mut table = [0.0; 4];
        let mut stderr = [0.0; 4];
        let mut raw = [0.0; 4];
        for k in 0..4 {
            let r = self.w[k].value() / t;
            table[k] = r;
            // Σ (W − rT)² expanded in the accumulated moments
            let ss = self.ww[k].value() - 2.0 * r * self.wt[k].value() + r * r * self.tt.value();
            stderr[k] = ss.max(0.0).sqrt() / t;
            raw[k] = self.w[k].value() / samples as f64;
        }
        Ok(McEstimate {
            theta_a,
            theta_b,
            table: FluxTable::from_array(table),
            stderr: FluxTable::from_array(stderr),
            raw_mean: FluxTable::from_array(raw),
            samples,
        })
    }
}

fn in_pool<T: Send>(streams: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    if streams == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(streams)
        .build()
        .map_err(|e| CqgError::Internal(format!("thread pool: {e}")))?;
    Ok(pool.install(job))
}

/// Estimates for several settings from one common set of draws.
pub fn mc_run_many(settings: &[(f64, f64)], cfg: &McConfig) -> Result<Vec<McEstimate>> {
    cfg.validate()?;
    let blocks = cfg.samples.div_ceil(BLOCK);
    let partials: Vec<Vec<Moments>> = in_pool(cfg.streams, || {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut acc = vec![Moments::default(); settings.len()];
                let end = ((b + 1) * BLOCK).min(cfg.samples);
                for index in b * BLOCK..end {
                    let angles = haar_draw(cfg.seed, index);
                    for (m, &(ta, tb)) in acc.iter_mut().zip(settings) {
                        m.add(amplitude_coefficients(&angles, ta, tb).weights());
                    }
                }
                acc
            })
            .collect()
    })?;
    let mut total = vec![Moments::default(); settings.len()];
    for block in &partials {
        for (t, m) in total.iter_mut().zip(block) {
            t.merge(m);
        }
    }
    total
        .iter()
        .zip(settings)
        .map(|(m, &(ta, tb))| m.estimate(ta, tb, cfg.samples))
        .collect()
}

pub fn mc_run(theta_a: f64, theta_b: f64, cfg: &McConfig) -> Result<McEstimate> {
    Ok(mc_run_many(&[(theta_a, theta_b)], cfg)?.remove(0))
}

/// Monte Carlo CHSH value and its four underlying estimates.
pub fn mc_chsh(settings: &ChshSettings, cfg: &McConfig) -> Result<(f64, Vec<McEstimate>)> {
    let estimates = mc_run_many(&settings.pairs(), cfg)?;
    let mut e = [0.0; 4];
    for (slot, est) in e.iter_mut().zip(&estimates) {
        *slot = est.table.correlation();
    }
    Ok((chsh_combination(e), estimates))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn worker_count_does_not_matter() {
        let base = McConfig {
            samples: 20_000,
            seed: 42,
            streams: 1,
        };
        let one = mc_run(0.0, FRAC_PI_2, &base).unwrap();
        let four = mc_run(0.0, FRAC_PI_2, &McConfig { streams: 4, ..base }).unwrap();
        let global = mc_run(0.0, FRAC_PI_2, &McConfig { streams: 0, ..base }).unwrap();
        assert_eq!(one, four);
        assert_eq!(one, global);
    }

    #[test]
    fn estimates_are_close_to_exact() {
        let cfg = McConfig {
            samples: 100_000,
            seed: 7,
            streams: 0,
        };
        let est = mc_run(0.0, FRAC_PI_2, &cfg).unwrap();
        for (v, se) in est.table.to_array().iter().zip(est.stderr.to_array()) {
            assert!((v - 0.25).abs() < 4.0 * se, "{v} ± {se}");
        }
        assert!((est.table.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn draws_cover_the_haar_ranges() {
        for k in 0..1000 {
            let a = haar_draw(1, k);
            for z in [a.zeta_a, a.zeta_b] {
                assert!((0.0..2.0 * PI).contains(&z.alpha));
                assert!((0.0..=PI).contains(&z.beta));
                assert!((0.0..4.0 * PI).contains(&z.gamma));
            }
        }
    }

    #[test]
    fn zero_samples_rejected() {
        let cfg = McConfig {
            samples: 0,
            seed: 1,
            streams: 0,
        };
        assert!(matches!(mc_run(0.0, 1.0, &cfg), Err(CqgError::InvalidConfig(_))));
    }
}
