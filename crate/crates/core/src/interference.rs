//! The interference measure `I(U) = N - Σ_{ik} |U_ik|^4` and exact results
//! for its distribution over the circular ensembles.
//!
//! `0 <= I <= N - 1`, with `0` for permutation matrices and `N - 1` when every
//! basis state is spread uniformly over all basis states.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::{Error, OrthogonalOperator, Result, UnitaryOperator};

/// Square matrices whose entry moduli feed the interference sum.
pub trait Operator {
    fn dim(&self) -> usize;
    /// `Σ_{ik} |A_ik|^4`.
    fn quartic_sum(&self) -> f64;
}

impl Operator for UnitaryOperator {
    fn dim(&self) -> usize {
        UnitaryOperator::dim(self)
    }

    fn quartic_sum(&self) -> f64 {
        self.matrix()
            .as_slice()
            .iter()
            .map(|z| z.norm_sqr().powi(2))
            .sum()
    }
}

impl Operator for OrthogonalOperator {
    fn dim(&self) -> usize {
        OrthogonalOperator::dim(self)
    }

    fn quartic_sum(&self) -> f64 {
        self.as_slice().iter().map(|x| (x * x).powi(2)).sum()
    }
}

pub fn interference<O: Operator + ?Sized>(op: &O) -> f64 {
    op.dim() as f64 - op.quartic_sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CircularEnsemble {
    Cue,
    Hoe,
}

/// Exponents `(m1, m2, m3)` of the Haar integral of
/// `|U_{i1 j1}|^a |U_{i1 j2}|^b |U_{i2 j2}|^c` with distinct row and column
/// indices. For the unitary group `(a, b, c) = 2(m1, m2, m3)`; for the
/// orthogonal group `(a, b, c) = (m1, m2, m3)`, all even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MomentTriple {
    pub m1: u32,
    pub m2: u32,
    pub m3: u32,
}

impl MomentTriple {
    pub const fn new(m1: u32, m2: u32, m3: u32) -> Self {
        Self { m1, m2, m3 }
    }
}

fn ln_factorial(k: f64) -> f64 {
    ln_gamma(k + 1.0)
}

fn require_dim(dim: usize, min: usize) -> Result<f64> {
    if dim < min {
        return Err(Error::Dimension { dim, min });
    }
    Ok(dim as f64)
}

/// Haar average over `U(N)`:
///
/// `m1! m2! m3! (N-2)! (N-1)! (N+m1+m3-2)! / [(N+m1-2)! (N+m3-2)! (N+m1+m2+m3-1)!]`.
pub fn z_cue(dim: usize, m: MomentTriple) -> Result<f64> {
    let n = require_dim(dim, 2)?;
    let (m1, m2, m3) = (m.m1 as f64, m.m2 as f64, m.m3 as f64);
    let log = ln_factorial(m1)
        + ln_factorial(m2)
        + ln_factorial(m3)
        + ln_factorial(n - 2.0)
        + ln_factorial(n - 1.0)
        + ln_factorial(n + m1 + m3 - 2.0)
        - ln_factorial(n + m1 - 2.0)
        - ln_factorial(n + m3 - 2.0)
        - ln_factorial(n + m1 + m2 + m3 - 1.0);
    Ok(log.exp())
}

/// Haar average over `O(N)`:
///
/// `2^{2-N} Γ((1+m1)/2) Γ((1+m2)/2) Γ((1+m3)/2) Γ(N-1) Γ((N+m1+m3-1)/2)
///  / [π Γ((N+m1-1)/2) Γ((N+m3-1)/2) Γ((N+m1+m2+m3)/2)]`.
pub fn z_hoe(dim: usize, m: MomentTriple) -> Result<f64> {
    let n = require_dim(dim, 2)?;
    if [m.m1, m.m2, m.m3].iter().any(|k| !k.is_multiple_of(2)) {
        return Err(Error::OddMoment(m.m1, m.m2, m.m3));
    }
    let (m1, m2, m3) = (m.m1 as f64, m.m2 as f64, m.m3 as f64);
    let log = (2.0 - n) * 2f64.ln()
        + ln_gamma((1.0 + m1) / 2.0)
        + ln_gamma((1.0 + m2) / 2.0)
        + ln_gamma((1.0 + m3) / 2.0)
        + ln_gamma(n - 1.0)
        + ln_gamma((n + m1 + m3 - 1.0) / 2.0)
        - PI.ln()
        - ln_gamma((n + m1 - 1.0) / 2.0)
        - ln_gamma((n + m3 - 1.0) / 2.0)
        - ln_gamma((n + m1 + m2 + m3) / 2.0);
    Ok(log.exp())
}

/// Ensemble average of `I`: `N(1 - 2/(N+1))` for CUE, `N(1 - 3/(N+2))` for HOE.
pub fn exact_mean(ensemble: CircularEnsemble, dim: usize) -> Result<f64> {
    let n = require_dim(dim, 1)?;
    Ok(match ensemble {
        CircularEnsemble::Cue => n * (1.0 - 2.0 / (n + 1.0)),
        CircularEnsemble::Hoe => n * (1.0 - 3.0 / (n + 2.0)),
    })
}

/// Ensemble variance of `I`.
pub fn exact_variance(ensemble: CircularEnsemble, dim: usize) -> Result<f64> {
    let n = require_dim(dim, 1)?;
    Ok(match ensemble {
        CircularEnsemble::Cue => 4.0 * (n - 1.0) / ((n + 1.0).powi(2) * (n + 3.0)),
        CircularEnsemble::Hoe => {
            24.0 * n * (n - 1.0) / ((n + 2.0).powi(2) * (n * n + 7.0 * n + 6.0))
        }
    })
}

/// `⟨(Σ_{ik} |U_ik|^4)^2⟩` over the ensemble.
pub fn second_moment_s(ensemble: CircularEnsemble, dim: usize) -> Result<f64> {
    let n = require_dim(dim, 1)?;
    Ok(match ensemble {
        CircularEnsemble::Cue => 4.0 * (n * n + 2.0 * n - 1.0) / ((n + 1.0) * (n + 3.0)),
        CircularEnsemble::Hoe => {
            3.0 * n * (-4.0 + 3.0 * n * (n + 5.0)) / ((n + 1.0) * (n + 2.0) * (n + 6.0))
        }
    })
}

fn check_unit_interval(value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::Domain {
            value,
            lower: 0.0,
            upper: 1.0,
        });
    }
    Ok(())
}

/// Density of `I` at `N = 2`: `1 / (2 sqrt(1 - I))` (CUE) or
/// `1 / (π sqrt(I (1 - I)))` (HOE). Integrable endpoint singularities are
/// rejected rather than returned as infinity.
pub fn analytic_density_n2(ensemble: CircularEnsemble, value: f64) -> Result<f64> {
    check_unit_interval(value)?;
    let singular = match ensemble {
        CircularEnsemble::Cue => value == 1.0,
        CircularEnsemble::Hoe => value == 0.0 || value == 1.0,
    };
    if singular {
        let (lower, upper) = match ensemble {
            CircularEnsemble::Cue => (0.0, 1.0),
            CircularEnsemble::Hoe => (0.0, 1.0),
        };
        return Err(Error::Domain {
            value,
            lower,
            upper,
        });
    }
    Ok(match ensemble {
        CircularEnsemble::Cue => 0.5 / (1.0 - value).sqrt(),
        CircularEnsemble::Hoe => 1.0 / (PI * (value * (1.0 - value)).sqrt()),
    })
}

/// Distribution function of `I` at `N = 2`: `1 - sqrt(1 - I)` (CUE) or
/// `(2/π) arcsin(sqrt(I))` (HOE).
pub fn analytic_cdf_n2(ensemble: CircularEnsemble, value: f64) -> Result<f64> {
    check_unit_interval(value)?;
    Ok(match ensemble {
        CircularEnsemble::Cue => 1.0 - (1.0 - value).sqrt(),
        CircularEnsemble::Hoe => 2.0 / PI * value.sqrt().asin(),
    })
}
