//! Eigenphases, nearest-neighbour spacings and binned densities.
//!
//! Spacings are circular: the `N` eigenphases of an `N x N` unitary give `N`
//! gaps including the wrap-around gap, rescaled by `N / 2π` so their mean is
//! exactly one. No unfolding is applied and degenerate phases are kept as
//! zero spacings.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use libm::erf;

use crate::provenance::Provenance;
use crate::{eigen, Error, Result, UnitaryOperator};

/// Allowed deviation of `|λ|` from one before an input is declared non-unitary.
pub const UNIT_MODULUS_TOLERANCE: f64 = 1e-8;

/// Eigenphases in `[0, 2π)`, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpectrum {
    phases: Vec<f64>,
}

impl PhaseSpectrum {
    /// Wraps arbitrary angles into `[0, 2π)` and sorts them.
    pub fn from_angles(angles: impl IntoIterator<Item = f64>) -> Self {
        let mut phases: Vec<f64> = angles.into_iter().map(wrap_phase).collect();
        phases.sort_by(f64::total_cmp);
        Self { phases }
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }
}

fn wrap_phase(angle: f64) -> f64 {
    let wrapped = angle.rem_euclid(TAU);
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// Eigenphases of a unitary matrix via a dense complex eigensolver.
pub fn eigenphases(u: &UnitaryOperator) -> Result<PhaseSpectrum> {
    let values = eigen::eigenvalues(u.matrix())?;
    if let Some(bad) = values
        .iter()
        .find(|z| (z.norm() - 1.0).abs() > UNIT_MODULUS_TOLERANCE)
    {
        return Err(Error::NotUnitary {
            modulus: bad.norm(),
        });
    }
    Ok(PhaseSpectrum::from_angles(values.iter().map(|z| z.arg())))
}

/// Circular nearest-neighbour spacings with unit mean.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacingSample {
    spacings: Vec<f64>,
}

impl SpacingSample {
    pub fn values(&self) -> &[f64] {
        &self.spacings
    }

    pub fn into_values(self) -> Vec<f64> {
        self.spacings
    }
}

pub fn spacings(spectrum: &PhaseSpectrum) -> Result<SpacingSample> {
    let phases = spectrum.phases();
    let n = phases.len();
    if n < 2 {
        return Err(Error::Dimension { dim: n, min: 2 });
    }
    let scale = n as f64 / TAU;
    let mut out: Vec<f64> = phases.windows(2).map(|w| (w[1] - w[0]) * scale).collect();
    out.push((phases[0] + TAU - phases[n - 1]) * scale);
    Ok(SpacingSample { spacings: out })
}

fn check_nonnegative(s: f64) -> Result<()> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::Domain {
            value: s,
            lower: 0.0,
            upper: f64::INFINITY,
        });
    }
    Ok(())
}

/// Wigner surmise `(32 s² / π²) exp(-4 s² / π)`.
pub fn wigner_surmise(s: f64) -> Result<f64> {
    check_nonnegative(s)?;
    Ok(32.0 * s * s / (PI * PI) * (-4.0 * s * s / PI).exp())
}

/// `∫_0^s P_W = erf(2s/√π) - (4s/π) exp(-4s²/π)`.
pub fn wigner_cdf(s: f64) -> Result<f64> {
    check_nonnegative(s)?;
    if s.is_infinite() {
        return Ok(1.0);
    }
    Ok(erf(2.0 * s / PI.sqrt()) - 4.0 * s / PI * (-4.0 * s * s / PI).exp())
}

/// Spacing density of uncorrelated levels, `exp(-s)`.
pub fn poisson_law(s: f64) -> Result<f64> {
    check_nonnegative(s)?;
    Ok((-s).exp())
}

/// Fixed-range histogram with an out-of-range tally.
///
/// Values within a relative `1e-9` of the range edges are counted in the edge
/// bins, and the upper edge itself belongs to the last bin.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    lower: f64,
    upper: f64,
    counts: Vec<u64>,
    out_of_range: u64,
}

const EDGE_SLACK: f64 = 1e-9;

impl Histogram {
    pub fn new(lower: f64, upper: f64, bins: usize) -> Result<Self> {
        if bins == 0 || lower >= upper || !lower.is_finite() || !upper.is_finite() {
            return Err(Error::Config(format!(
                "histogram needs a finite range lower < upper and at least one bin, got [{lower}, {upper}] with {bins}"
            )));
        }
        Ok(Self {
            lower,
            upper,
            counts: vec![0; bins],
            out_of_range: 0,
        })
    }

    pub fn from_values(lower: f64, upper: f64, bins: usize, values: &[f64]) -> Result<Self> {
        let mut h = Self::new(lower, upper, bins)?;
        h.extend(values.iter().copied());
        Ok(h)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn out_of_range(&self) -> u64 {
        self.out_of_range
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.out_of_range
    }

    pub fn bin_width(&self) -> f64 {
        (self.upper - self.lower) / self.bins() as f64
    }

    /// Edge `k` of `bins + 1`.
    pub fn edge(&self, k: usize) -> f64 {
        if k == self.bins() {
            self.upper
        } else {
            self.lower + k as f64 * self.bin_width()
        }
    }

    pub fn add(&mut self, x: f64) {
        let span = self.upper - self.lower;
        let slack = EDGE_SLACK * span;
        if !(x >= self.lower - slack && x <= self.upper + slack) {
            self.out_of_range += 1;
            return;
        }
        let bins = self.bins();
        let position = ((x - self.lower) / span * bins as f64).floor();
        let index = if position < 0.0 {
            0
        } else {
            (position as usize).min(bins - 1)
        };
        self.counts[index] += 1;
    }

    pub fn extend(&mut self, values: impl IntoIterator<Item = f64>) {
        for x in values {
            self.add(x);
        }
    }

    pub fn same_binning(&self, other: &Histogram) -> bool {
        self.lower.to_bits() == other.lower.to_bits()
            && self.upper.to_bits() == other.upper.to_bits()
            && self.bins() == other.bins()
    }

    /// Adds `other`'s tallies; commutative and associative.
    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if !self.same_binning(other) {
            return Err(Error::BinningMismatch);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.out_of_range += other.out_of_range;
        Ok(())
    }

    /// Bin probabilities `count / total`; they sum to the in-range fraction.
    pub fn probabilities(&self) -> Result<Vec<f64>> {
        let total = self.total();
        if total == 0 {
            return Err(Error::EmptyHistogram);
        }
        Ok(self
            .counts
            .iter()
            .map(|&c| c as f64 / total as f64)
            .collect())
    }

    /// Probability density per bin; integrates to the in-range fraction.
    pub fn density(&self) -> Result<Vec<f64>> {
        let width = self.bin_width();
        Ok(self
            .probabilities()?
            .into_iter()
            .map(|p| p / width)
            .collect())
    }

    /// Exact bin masses `F(edge_{k+1}) - F(edge_k)` of a distribution function.
    pub fn bin_masses(&self, cdf: impl Fn(f64) -> Result<f64>) -> Result<Vec<f64>> {
        let mut previous = cdf(self.edge(0))?;
        (1..=self.bins())
            .map(|k| {
                let next = cdf(self.edge(k))?;
                let mass = (next - previous).max(0.0);
                previous = next;
                Ok(mass)
            })
            .collect()
    }

    /// CSV with header `bin_lower,bin_upper,count,density`, preceded by the
    /// supplied provenance and the `total`/`out_of_range` tallies.
    pub fn to_csv(&self, provenance: &Provenance) -> String {
        let mut meta = provenance.clone();
        meta.set("total", self.total());
        meta.set("out_of_range", self.out_of_range);
        let mut out = meta.to_string();
        out.push_str("bin_lower,bin_upper,count,density\n");
        let density = self.density().unwrap_or_else(|_| vec![0.0; self.bins()]);
        for (k, (&count, d)) in self.counts.iter().zip(density).enumerate() {
            let _ = writeln!(out, "{},{},{},{}", self.edge(k), self.edge(k + 1), count, d);
        }
        out
    }

    /// Parses the output of [`Histogram::to_csv`].
    pub fn from_csv(text: &str) -> Result<(Self, Provenance)> {
        let provenance = Provenance::parse(text);
        let mut rows: Vec<(f64, f64, u64)> = Vec::new();
        let mut seen_header = false;
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !seen_header {
                seen_header = true;
                if line.starts_with("bin_lower") {
                    continue;
                }
            }
            let bad = |what: &str| Error::Config(format!("histogram line {}: {what}", k + 1));
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() < 3 {
                return Err(bad("expected bin_lower,bin_upper,count"));
            }
            let lo = fields[0].trim().parse().map_err(|_| bad("bad bin_lower"))?;
            let hi = fields[1].trim().parse().map_err(|_| bad("bad bin_upper"))?;
            let count = fields[2].trim().parse().map_err(|_| bad("bad count"))?;
            rows.push((lo, hi, count));
        }
        let (first, last) = match (rows.first(), rows.last()) {
            (Some(f), Some(l)) => (f.0, l.1),
            _ => return Err(Error::EmptyHistogram),
        };
        let mut h = Histogram::new(first, last, rows.len())?;
        for (k, (lo, hi, count)) in rows.iter().enumerate() {
            let tol = 1e-12 * (last - first).abs().max(1.0);
            if (lo - h.edge(k)).abs() > tol || (hi - h.edge(k + 1)).abs() > tol {
                return Err(Error::Config(format!(
                    "histogram bin {k} is not uniformly spaced"
                )));
            }
            h.counts[k] = *count;
        }
        if let Some(extra) = provenance.get("out_of_range") {
            h.out_of_range = extra
                .parse()
                .map_err(|_| Error::Config(format!("bad out_of_range value `{extra}`")))?;
        }
        Ok((h, provenance))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Complex64, ComplexSquareMatrix};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn unitary(m: ComplexSquareMatrix) -> UnitaryOperator {
        UnitaryOperator::new(m).unwrap()
    }

    #[test]
    fn identity_phases_are_zero() {
        let s = eigenphases(&unitary(ComplexSquareMatrix::identity(4))).unwrap();
        assert_eq!(s.phases(), &[0.0; 4]);
    }

    #[test]
    fn diagonal_quarter_turns() {
        let diag = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ];
        let m = ComplexSquareMatrix::from_fn(4, |i, j| {
            if i == j {
                diag[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let s = eigenphases(&unitary(m)).unwrap();
        for (got, want) in s.phases().iter().zip([0.0, PI / 2.0, PI, 1.5 * PI]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn hadamard_phases() {
        let h = FRAC_1_SQRT_2;
        let m = ComplexSquareMatrix::from_fn(2, |i, j| {
            Complex64::new(if i == 1 && j == 1 { -h } else { h }, 0.0)
        });
        let s = eigenphases(&unitary(m)).unwrap();
        let p = s.phases();
        assert!(p[0].abs() < 1e-12 || (p[0] - TAU).abs() < 1e-12);
        assert!(p.iter().any(|x| (x - PI).abs() < 1e-12));
    }

    #[test]
    fn non_unitary_input_detected() {
        let m = ComplexSquareMatrix::from_fn(2, |i, j| {
            Complex64::new(if i == j { 1.1 } else { 0.0 }, 0.0)
        });
        let u = UnitaryOperator::from_trusted(m);
        assert!(matches!(eigenphases(&u), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn spacing_examples() {
        let even = PhaseSpectrum::from_angles((0..8).map(|k| k as f64 * TAU / 8.0));
        for s in spacings(&even).unwrap().values() {
            assert!((s - 1.0).abs() < 1e-12);
        }
        let two = PhaseSpectrum::from_angles([0.0, PI / 2.0]);
        let s = spacings(&two).unwrap();
        assert!((s.values()[0] - 0.5).abs() < 1e-15);
        assert!((s.values()[1] - 1.5).abs() < 1e-15);
        assert!(spacings(&PhaseSpectrum::from_angles([1.0])).is_err());
        let wrapped = PhaseSpectrum::from_angles([-0.5, 7.0, 3.0]);
        assert!(wrapped.phases().iter().all(|p| (0.0..TAU).contains(p)));
        assert!(wrapped.phases().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn wigner_values() {
        assert_eq!(wigner_surmise(0.0).unwrap(), 0.0);
        let expected = 32.0 / (PI * PI) * (-4.0 / PI).exp();
        assert!((wigner_surmise(1.0).unwrap() - expected).abs() < 1e-15);
        assert!((wigner_surmise(1.0).unwrap() - 0.9076).abs() < 5e-5);
        assert_eq!(wigner_cdf(0.0).unwrap(), 0.0);
        assert_eq!(wigner_cdf(f64::INFINITY).unwrap(), 1.0);
        assert!((wigner_cdf(20.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(wigner_surmise(-1.0).is_err());
        assert!(wigner_cdf(-1e-3).is_err());
        assert!(poisson_law(f64::NAN).is_err());
        assert_eq!(poisson_law(0.0).unwrap(), 1.0);
    }

    #[test]
    fn wigner_cdf_differentiates_to_surmise() {
        let h = 1e-6;
        for k in 1..60 {
            let s = k as f64 * 0.05;
            let fd = (wigner_cdf(s + h).unwrap() - wigner_cdf(s - h).unwrap()) / (2.0 * h);
            assert!((fd - wigner_surmise(s).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn histogram_tallies_and_merge() {
        let mut a = Histogram::from_values(0.0, 1.0, 4, &[0.0, 0.1, 0.3, 1.0, 1.5, -0.2, f64::NAN])
            .unwrap();
        assert_eq!(a.counts(), &[2, 1, 0, 1]);
        assert_eq!(a.out_of_range(), 3);
        assert_eq!(a.total(), 7);
        let mass: f64 = a.density().unwrap().iter().map(|d| d * a.bin_width()).sum();
        assert!((mass - 4.0 / 7.0).abs() < 1e-15);

        let b = Histogram::from_values(0.0, 1.0, 4, &[0.6, 0.6]).unwrap();
        let mut ab = a.clone();
        ab.merge(&b).unwrap();
        let mut ba = b.clone();
        ba.merge(&a).unwrap();
        assert_eq!(ab, ba);
        assert_eq!(ab.counts(), &[2, 1, 2, 1]);

        let other = Histogram::new(0.0, 2.0, 4).unwrap();
        assert_eq!(a.merge(&other), Err(Error::BinningMismatch));
        assert!(Histogram::new(1.0, 1.0, 3).is_err());
        assert!(Histogram::new(0.0, 1.0, 0).is_err());
        assert_eq!(
            Histogram::new(0.0, 1.0, 2).unwrap().probabilities(),
            Err(Error::EmptyHistogram)
        );
    }

    #[test]
    fn edge_slack_keeps_rounding_noise_in_range() {
        let h = Histogram::from_values(0.0, 15.0, 10, &[-1e-14, 15.0 + 1e-13]).unwrap();
        assert_eq!(h.counts()[0], 1);
        assert_eq!(h.counts()[9], 1);
        assert_eq!(h.out_of_range(), 0);
    }

    #[test]
    fn csv_round_trip() {
        let h = Histogram::from_values(0.0, 15.0, 7, &[0.3, 2.2, 14.9, 15.0, 20.0]).unwrap();
        let csv = h.to_csv(&Provenance::new().with("ensemble", "cue"));
        assert!(csv.contains("bin_lower,bin_upper,count,density\n"));
        let (back, meta) = Histogram::from_csv(&csv).unwrap();
        assert_eq!(back, h);
        assert_eq!(meta.get("ensemble"), Some("cue"));
        assert_eq!(meta.get("total"), Some("5"));
    }

    #[test]
    fn bin_masses_from_cdf() {
        let h = Histogram::new(0.0, 5.0, 100).unwrap();
        let masses = h.bin_masses(wigner_cdf).unwrap();
        let total: f64 = masses.iter().sum();
        assert!((total - wigner_cdf(5.0).unwrap()).abs() < 1e-14);
        assert!(1.0 - total < 1e-12);
    }
}
