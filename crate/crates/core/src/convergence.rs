//! Squared Hellinger-type distances between binned distributions and the
//! exponential / Gaussian decay fits of distance curves.
//!
//! `F = 2 (1 - Σ_b sqrt(p_b q_b))` ranges over `[0, 2]`. Out-of-range mass of
//! either side never overlaps, so it only enters through the deficit of the
//! bin sum.

use std::fmt::Write as _;

use crate::provenance::Provenance;
use crate::spectral::{wigner_cdf, Histogram};
use crate::{Error, Result};

/// Range on which spacing histograms are built.
pub const SPACING_RANGE: (f64, f64) = (0.0, 5.0);
pub const DEFAULT_BINS: usize = 100;
/// Smallest number of spacings accepted by [`spacing_distance`].
pub const MIN_SPACINGS: usize = 1000;

/// Window `[0.1, 2]` for the exponential rate of spacing distances.
pub const EXPONENTIAL_WINDOW: FitWindow = FitWindow {
    high: 2.0,
    low: 0.1,
};
/// Window `[0.01, 2]` for the Gaussian rate of interference distances.
pub const GAUSSIAN_WINDOW: FitWindow = FitWindow {
    high: 2.0,
    low: 0.01,
};

/// `2 (1 - Σ sqrt(p_b q_b))` for bin probabilities of equal length.
pub fn hellinger_sq_probabilities(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::BinningMismatch);
    }
    let overlap: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
    Ok((2.0 * (1.0 - overlap)).clamp(0.0, 2.0))
}

pub fn hellinger_sq(p: &Histogram, q: &Histogram) -> Result<f64> {
    if !p.same_binning(q) {
        return Err(Error::BinningMismatch);
    }
    hellinger_sq_probabilities(&p.probabilities()?, &q.probabilities()?)
}

/// Distance of a histogram from an analytic law given by its distribution
/// function, integrated exactly over each bin.
pub fn hellinger_sq_to_law(p: &Histogram, cdf: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    hellinger_sq_probabilities(&p.probabilities()?, &p.bin_masses(cdf)?)
}

pub fn spacing_histogram(spacings: &[f64], bins: usize) -> Result<Histogram> {
    Histogram::from_values(SPACING_RANGE.0, SPACING_RANGE.1, bins, spacings)
}

/// `F_s`: distance between the empirical spacing distribution and the Wigner
/// surmise on `[0, 5]`.
pub fn spacing_distance(spacings: &[f64], bins: usize) -> Result<f64> {
    if spacings.len() < MIN_SPACINGS {
        return Err(Error::TooFewSamples {
            got: spacings.len(),
            need: MIN_SPACINGS,
        });
    }
    spacing_distance_of(&spacing_histogram(spacings, bins)?)
}

/// `F_s` of an already accumulated spacing histogram.
pub fn spacing_distance_of(hist: &Histogram) -> Result<f64> {
    let total = hist.total() as usize;
    if total < MIN_SPACINGS {
        return Err(Error::TooFewSamples {
            got: total,
            need: MIN_SPACINGS,
        });
    }
    hellinger_sq_to_law(hist, wigner_cdf)
}

/// `F_I`: distance between a circuit-ensemble interference histogram and a
/// circular-ensemble reference histogram with identical binning.
pub fn interference_distance(circuit: &Histogram, reference: &Histogram) -> Result<f64> {
    hellinger_sq(circuit, reference)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub gates: usize,
    pub distance: f64,
    /// Standard error of `distance`, if estimated.
    pub stderr: f64,
}

/// Distances as a function of gate count, `n_g` strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceCurve {
    points: Vec<CurvePoint>,
    pub metadata: Provenance,
}

impl DistanceCurve {
    pub fn new(points: Vec<CurvePoint>, metadata: Provenance) -> Result<Self> {
        if let Some(w) = points.windows(2).find(|w| w[1].gates <= w[0].gates) {
            return Err(Error::Config(format!(
                "gate counts must increase strictly, got {} then {}",
                w[0].gates, w[1].gates
            )));
        }
        if let Some(p) = points.iter().find(|p| !(0.0..=2.0).contains(&p.distance)) {
            return Err(Error::Domain {
                value: p.distance,
                lower: 0.0,
                upper: 2.0,
            });
        }
        Ok(Self { points, metadata })
    }

    /// Curve without standard errors.
    pub fn from_pairs(pairs: &[(usize, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(gates, distance)| CurvePoint {
                    gates,
                    distance,
                    stderr: f64::NAN,
                })
                .collect(),
            Provenance::new(),
        )
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    /// CSV `n_g,F,stderr` preceded by the metadata comments.
    pub fn to_csv(&self) -> String {
        let mut out = self.metadata.to_string();
        out.push_str("n_g,F,stderr\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{},{}", p.gates, p.distance, p.stderr);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitWindow {
    pub high: f64,
    pub low: f64,
}

impl FitWindow {
    pub fn contains(&self, f: f64) -> bool {
        f >= self.low && f <= self.high
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitKind {
    /// `ln F = β0 - b n_g`.
    Exponential,
    /// `ln F = a - c n_g²`.
    Gaussian,
}

impl FitKind {
    pub fn name(self) -> &'static str {
        match self {
            FitKind::Exponential => "exponential",
            FitKind::Gaussian => "gaussian",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub kind: FitKind,
    /// `b` or `c`.
    pub rate: f64,
    /// Least-squares standard error of `rate`; NaN with only two points.
    pub rate_stderr: f64,
    /// `β0` or `a`.
    pub intercept: f64,
    pub window: FitWindow,
    pub points_used: usize,
    /// Root-mean-square of the `ln F` residuals.
    pub residual: f64,
}

impl RateFit {
    pub const CSV_HEADER: &'static str =
        "kind,param1,param2,residual,points_used,F_high,F_low,rate_stderr";

    /// `param1`/`param2` are `(b, β0)` for exponential and `(a, c)` for
    /// Gaussian fits.
    pub fn params(&self) -> (f64, f64) {
        match self.kind {
            FitKind::Exponential => (self.rate, self.intercept),
            FitKind::Gaussian => (self.intercept, self.rate),
        }
    }

    pub fn csv_row(&self) -> String {
        let (p1, p2) = self.params();
        format!(
            "{},{},{},{},{},{},{},{}",
            self.kind.name(),
            p1,
            p2,
            self.residual,
            self.points_used,
            self.window.high,
            self.window.low,
            self.rate_stderr
        )
    }

    /// Placeholder row for a curve that could not be fitted.
    pub fn failed_csv_row(kind: FitKind, window: FitWindow) -> String {
        format!(
            "{},NaN,NaN,NaN,0,{},{},NaN",
            kind.name(),
            window.high,
            window.low
        )
    }
}

struct LineFit {
    slope: f64,
    intercept: f64,
    slope_stderr: f64,
    rms: f64,
}

fn least_squares(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let slope_stderr = if x.len() > 2 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    LineFit {
        slope,
        intercept,
        slope_stderr,
        rms: (ssr / n).sqrt(),
    }
}

fn fit_in_window(curve: &DistanceCurve, kind: FitKind, window: FitWindow) -> Result<RateFit> {
    let used: Vec<&CurvePoint> = curve
        .points()
        .iter()
        .filter(|p| p.distance > 0.0 && window.contains(p.distance))
        .collect();
    let distinct = used.first().map_or(0, |first| {
        if used.iter().any(|p| p.gates != first.gates) {
            used.len()
        } else {
            1
        }
    });
    if distinct < 2 {
        return Err(Error::FitWindow { got: used.len() });
    }
    let x: Vec<f64> = used
        .iter()
        .map(|p| match kind {
            FitKind::Exponential => p.gates as f64,
            FitKind::Gaussian => (p.gates as f64).powi(2),
        })
        .collect();
    let y: Vec<f64> = used.iter().map(|p| p.distance.ln()).collect();
    let line = least_squares(&x, &y);
    Ok(RateFit {
        kind,
        rate: -line.slope,
        rate_stderr: line.slope_stderr,
        intercept: line.intercept,
        window,
        points_used: used.len(),
        residual: line.rms,
    })
}

/// Least-squares `ln F = β0 - b n_g` over points with `0.1 <= F <= 2`.
pub fn fit_exponential_rate(curve: &DistanceCurve) -> Result<RateFit> {
    fit_in_window(curve, FitKind::Exponential, EXPONENTIAL_WINDOW)
}

/// Least-squares `ln F = a - c n_g²` over points with `0.01 <= F <= 2`.
pub fn fit_gaussian_rate(curve: &DistanceCurve) -> Result<RateFit> {
    fit_in_window(curve, FitKind::Gaussian, GAUSSIAN_WINDOW)
}
