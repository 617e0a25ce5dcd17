use serde::{Deserialize, Serialize};

use super::fluxes::correlation;
use crate::error::Result;
use crate::numerics::QuadratureSpec;

/// Margin above 2 required before a row counts as a violation.
pub const VIOLATION_MARGIN: f64 = 1e-9;

/// Redhead's `F(Δϑ) = |1 + 2cos 2Δϑ − cos 4Δϑ|`, evaluated from correlations:
/// with `E(x)` the correlation at analyzer separation `x`,
/// `F = |1 − 2E(2Δϑ) + E(4Δϑ)|`.
pub fn bell_redhead(delta: f64, quad: &QuadratureSpec) -> Result<f64> {
    let e2 = correlation(0.0, 2.0 * delta, quad)?;
    let e4 = correlation(0.0, 4.0 * delta, quad)?;
    Ok((1.0 - 2.0 * e2 + e4).abs())
}

/// Closed form of [`bell_redhead`].
pub fn redhead_closed_form(delta: f64) -> f64 {
    (1.0 + 2.0 * (2.0 * delta).cos() - (4.0 * delta).cos()).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellRow {
    pub delta: f64,
    pub f: f64,
    /// Correlation at analyzer separation `2Δϑ`.
    pub e: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellReport {
    pub rows: Vec<BellRow>,
    pub chsh: Option<f64>,
}

impl BellReport {
    pub fn max_f(&self) -> Option<&BellRow> {
        self.rows.iter().max_by(|a, b| a.f.total_cmp(&b.f))
    }
}

pub fn bell_scan(deltas: &[f64], quad: &QuadratureSpec) -> Result<BellReport> {
    let rows = deltas
        .iter()
        .map(|&delta| {
            let f = bell_redhead(delta, quad)?;
            Ok(BellRow {
                delta,
                f,
                e: correlation(0.0, 2.0 * delta, quad)?,
                violated: f > 2.0 + VIOLATION_MARGIN,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BellReport { rows, chsh: None })
}

/// Analyzer settings `(a, a′, b, b′)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl ChshSettings {
    /// The four `(θ_A, θ_B)` pairs in the order `(a,b), (a,b′), (a′,b), (a′,b′)`.
    pub fn pairs(&self) -> [(f64, f64); 4] {
        [
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        ]
    }
}

/// `|E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)|` from four correlations.
pub fn chsh_combination(e: [f64; 4]) -> f64 {
    (e[0] - e[1] + e[2] + e[3]).abs()
}

pub fn chsh(settings: &ChshSettings, quad: &QuadratureSpec) -> Result<f64> {
    let mut e = [0.0; 4];
    for (slot, (ta, tb)) in e.iter_mut().zip(settings.pairs()) {
        *slot = correlation(ta, tb, quad)?;
    }
    Ok(chsh_combination(e))
}
