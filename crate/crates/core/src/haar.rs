//! Haar-distributed samplers for `U(N)` (CUE) and `O(N)` (HOE).
//!
//! CUE samples orthonormalize a complex Ginibre matrix with Householder
//! reflections and then rotate each column by the phase of the matching
//! diagonal entry of the triangular factor, which makes the factorization
//! unique and the result Haar distributed. HOE samples are eigenvector
//! matrices of GOE draws with independently randomized column signs. Columns
//! are ordered by eigenvalue; the GOE spectrum is independent of its
//! eigenvectors, so that fixed-by-spectrum order keeps the Haar measure.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::{
    ComplexSquareMatrix, Error, OrthogonalOperator, RandomStream, Result, UnitaryOperator,
};

/// Angles of the four-parameter form of a `U(2)` matrix,
///
/// `e^{iα} [[cos φ e^{iψ}, sin φ e^{iχ}], [-sin φ e^{-iχ}, cos φ e^{-iψ}]]`.
///
/// Haar measure on `U(2)` corresponds to `α, ψ, χ` uniform on `[0, 2π)` and
/// `sin²φ = ξ` uniform on `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct U2Params {
    pub alpha: f64,
    pub psi: f64,
    pub chi: f64,
    pub phi: f64,
}

impl U2Params {
    pub fn draw(stream: &mut RandomStream) -> Self {
        let alpha = TAU * stream.uniform();
        let psi = TAU * stream.uniform();
        let chi = TAU * stream.uniform();
        let xi = stream.uniform();
        Self {
            alpha,
            psi,
            chi,
            phi: xi.sqrt().asin(),
        }
    }

    /// `ξ = sin²φ`.
    pub fn xi(&self) -> f64 {
        self.phi.sin().powi(2)
    }

    /// Entries `[[u00, u01], [u10, u11]]`.
    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        let global = Complex64::from_polar(1.0, self.alpha);
        let (s, c) = self.phi.sin_cos();
        [
            [
                global * Complex64::from_polar(c, self.psi),
                global * Complex64::from_polar(s, self.chi),
            ],
            [
                global * Complex64::from_polar(-s, -self.chi),
                global * Complex64::from_polar(c, -self.psi),
            ],
        ]
    }

    pub fn to_operator(&self) -> UnitaryOperator {
        let e = self.entries();
        UnitaryOperator::from_trusted(ComplexSquareMatrix::from_fn(2, |i, j| e[i][j]))
    }
}

/// Haar-random `2x2` unitary.
pub fn sample_u2(stream: &mut RandomStream) -> UnitaryOperator {
    U2Params::draw(stream).to_operator()
}

/// Haar-random `N x N` unitary (CUE).
pub fn sample_cue(dim: usize, stream: &mut RandomStream) -> Result<UnitaryOperator> {
    if dim == 0 {
        return Err(Error::Dimension { dim, min: 1 });
    }
    let ginibre = ComplexSquareMatrix::from_fn(dim, |_, _| {
        Complex64::new(stream.normal(), stream.normal()) * FRAC_1_SQRT_2
    });
    Ok(UnitaryOperator::from_trusted(haar_orthonormalize(ginibre)))
}

/// Householder QR of `a`, returning `Q diag(r_jj / |r_jj|)`.
fn haar_orthonormalize(mut a: ComplexSquareMatrix) -> ComplexSquareMatrix {
    let n = a.dim();
    let mut reflectors: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut phases = vec![Complex64::new(1.0, 0.0); n];

    for k in 0..n {
        let norm = (k..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        let head = a[(k, k)];
        let head_phase = if head.norm() > 0.0 {
            head / head.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        // r_kk = -head_phase * norm, chosen so that v never cancels.
        let r_kk = -head_phase * norm;
        phases[k] = -head_phase;

        let mut v: Vec<Complex64> = (k..n).map(|i| a[(i, k)]).collect();
        v[0] -= r_kk;
        let v_norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if v_norm == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        v.iter_mut().for_each(|z| *z /= v_norm);

        // A[k.., k..] -= 2 v (v^H A[k.., k..])
        for j in k..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vi)| vi.conj() * a[(k + t, j)])
                .sum();
            let scale = dot * 2.0;
            for (t, vi) in v.iter().enumerate() {
                a[(k + t, j)] -= vi * scale;
            }
        }
        reflectors.push(v);
    }

    // Q = H_0 H_1 ... H_{n-1}, accumulated from the right end onto identity.
    let mut q = ComplexSquareMatrix::identity(n);
    for (k, v) in reflectors.iter().enumerate().rev() {
        if v.is_empty() {
            continue;
        }
        for j in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vi)| vi.conj() * q[(k + t, j)])
                .sum();
            let scale = dot * 2.0;
            for (t, vi) in v.iter().enumerate() {
                q[(k + t, j)] -= vi * scale;
            }
        }
    }

    for i in 0..n {
        for (j, phase) in phases.iter().enumerate() {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// GOE draw `(G + Gᵀ) / 2` with `G` i.i.d. standard normal.
pub fn sample_goe(dim: usize, stream: &mut RandomStream) -> Result<DMatrix<f64>> {
    if dim == 0 {
        return Err(Error::Dimension { dim, min: 1 });
    }
    let mut g = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            g[(i, j)] = stream.normal();
        }
    }
    let gt = g.transpose();
    Ok((g + gt) * 0.5)
}

/// Haar-random `N x N` orthogonal matrix (HOE).
pub fn sample_hoe(dim: usize, stream: &mut RandomStream) -> Result<OrthogonalOperator> {
    let goe = sample_goe(dim, stream)?;
    let eigen = SymmetricEigen::try_new(goe, f64::EPSILON, 1000 * dim)
        .ok_or(Error::EigenNoConvergence { dim })?;
    // Columns must be ordered by eigenvalue: the solver's own deflation order
    // depends on the eigenvectors and would bias the entry distribution.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));
    let vectors = eigen.eigenvectors;
    let signs: Vec<f64> = (0..dim).map(|_| stream.sign()).collect();
    let data = (0..dim * dim)
        .map(|k| {
            let (i, j) = (k / dim, k % dim);
            vectors[(i, order[j])] * signs[j]
        })
        .collect();
    Ok(OrthogonalOperator::from_trusted(dim, data))
}
