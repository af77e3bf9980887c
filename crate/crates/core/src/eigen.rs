//! Eigenvalues of dense complex matrices: Householder reduction to upper
//! Hessenberg form followed by single-shift QR iteration with Givens
//! rotations and Wilkinson shifts.

use num_complex::Complex64;

use crate::{ComplexSquareMatrix, Error, Result};

const ITERATIONS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues in no particular order.
pub(crate) fn eigenvalues(matrix: &ComplexSquareMatrix) -> Result<Vec<Complex64>> {
    let n = matrix.dim();
    let mut h = matrix.clone();
    reduce_to_hessenberg(&mut h);
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(values);
    }

    let mut hi = n - 1;
    let mut iterations = 0;
    let mut budget = ITERATIONS_PER_EIGENVALUE * n;
    loop {
        if hi == 0 {
            values[0] = h[(0, 0)];
            break;
        }
        let lo = active_block_start(&mut h, hi);
        if lo == hi {
            values[hi] = h[(hi, hi)];
            hi -= 1;
            iterations = 0;
            continue;
        }
        if lo + 1 == hi {
            let (a, b) = eigenvalues_2x2(h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            values[lo] = a;
            values[hi] = b;
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            iterations = 0;
            continue;
        }
        if budget == 0 {
            return Err(Error::EigenNoConvergence { dim: n });
        }
        budget -= 1;
        iterations += 1;
        let shift = if iterations % 10 == 0 {
            // Exceptional shift breaks cycles such as those of permutation matrices.
            h[(hi, hi)]
                + 0.75 * h[(hi, hi - 1)].re.abs()
                + Complex64::new(0.0, 0.31 * h[(hi, hi - 1)].norm())
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_step(&mut h, lo, hi, shift);
    }
    Ok(values)
}

fn reduce_to_hessenberg(h: &mut ComplexSquareMatrix) {
    let n = h.dim();
    for k in 0..n.saturating_sub(2) {
        let tail_norm = ((k + 2)..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>();
        if tail_norm == 0.0 {
            continue;
        }
        let head = h[(k + 1, k)];
        let norm = (tail_norm + head.norm_sqr()).sqrt();
        let phase = if head.norm() > 0.0 {
            head / head.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut v: Vec<Complex64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        v[0] += phase * norm;
        let v_norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= v_norm);

        // Left: rows k+1.., columns k..
        for j in k..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vi)| vi.conj() * h[(k + 1 + t, j)])
                .sum();
            let scale = dot * 2.0;
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= vi * scale;
            }
        }
        // Right: all rows, columns k+1..
        for i in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vi)| h[(i, k + 1 + t)] * vi)
                .sum();
            let scale = dot * 2.0;
            for (t, vi) in v.iter().enumerate() {
                h[(i, k + 1 + t)] -= scale * vi.conj();
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Zeroes negligible subdiagonal entries and returns the first row of the
/// unreduced block ending at `hi`.
fn active_block_start(h: &mut ComplexSquareMatrix, hi: usize) -> usize {
    let mut l = hi;
    while l > 0 {
        let sub = h[(l, l - 1)].norm();
        let mut scale = h[(l, l)].norm() + h[(l - 1, l - 1)].norm();
        if scale == 0.0 {
            scale = 1.0;
        }
        if sub <= f64::EPSILON * scale {
            h[(l, l - 1)] = Complex64::new(0.0, 0.0);
            break;
        }
        l -= 1;
    }
    l
}

fn eigenvalues_2x2(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
) -> (Complex64, Complex64) {
    let half_trace = (a + d) * 0.5;
    let half_diff = (a - d) * 0.5;
    let mut root = (half_diff * half_diff + b * c).sqrt();
    if (half_trace + root).norm() < (half_trace - root).norm() {
        root = -root;
    }
    let first = half_trace + root;
    if first.norm() == 0.0 {
        return (first, first);
    }
    // The smaller root from the determinant avoids cancellation.
    (first, (a * d - b * c) / first)
}

/// Eigenvalue of the trailing 2x2 block closest to the last diagonal entry.
fn wilkinson_shift(h: &ComplexSquareMatrix, hi: usize) -> Complex64 {
    let (a, b, c, d) = (
        h[(hi - 1, hi - 1)],
        h[(hi - 1, hi)],
        h[(hi, hi - 1)],
        h[(hi, hi)],
    );
    let (x, y) = eigenvalues_2x2(a, b, c, d);
    if (x - d).norm() <= (y - d).norm() {
        x
    } else {
        y
    }
}

struct Givens {
    c: f64,
    s: Complex64,
}

impl Givens {
    /// Rotation mapping `(x, y)` to `(r, 0)`.
    fn zeroing(x: Complex64, y: Complex64) -> Self {
        let norm = x.norm().hypot(y.norm());
        if norm == 0.0 {
            return Self {
                c: 1.0,
                s: Complex64::new(0.0, 0.0),
            };
        }
        if x.norm() == 0.0 {
            return Self {
                c: 0.0,
                s: y.conj() / y.norm(),
            };
        }
        let phase = x / x.norm();
        Self {
            c: x.norm() / norm,
            s: phase * y.conj() / norm,
        }
    }
}

/// One explicit shifted QR sweep on the block `lo..=hi`.
fn qr_step(h: &mut ComplexSquareMatrix, lo: usize, hi: usize, shift: Complex64) {
    for k in lo..=hi {
        h[(k, k)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let g = Givens::zeroing(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let (u, w) = (h[(k, j)], h[(k + 1, j)]);
            h[(k, j)] = u * g.c + g.s * w;
            h[(k + 1, j)] = -g.s.conj() * u + w * g.c;
        }
        h[(k + 1, k)] = Complex64::new(0.0, 0.0);
        rotations.push(g);
    }
    for (offset, g) in rotations.iter().enumerate() {
        let k = lo + offset;
        for i in lo..=(k + 1).min(hi) {
            let (u, w) = (h[(i, k)], h[(i, k + 1)]);
            h[(i, k)] = u * g.c + w * g.s.conj();
            h[(i, k + 1)] = -u * g.s + w * g.c;
        }
    }
    for k in lo..=hi {
        h[(k, k)] += shift;
    }
}
