//! Realization-indexed sampling on a fixed worker pool.
//!
//! Realization `i` of a source always draws from the stream keyed by
//! `(seed, tag, group, i)`, and results are collected in index order, so
//! every output is independent of the worker count.

use qinterf::circuit::{draw_circuit, CircuitEnsembleConfig, CircuitKind};
use qinterf::convergence::{
    fit_exponential_rate, fit_gaussian_rate, hellinger_sq, spacing_distance_of, spacing_histogram,
    CurvePoint, DistanceCurve, RateFit,
};
use qinterf::haar::{sample_cue, sample_hoe};
use qinterf::interference::interference;
use qinterf::provenance::Provenance;
use qinterf::spectral::{eigenphases, spacings, Histogram};
use qinterf::{RandomStream, StreamTag, UnitaryOperator};
use rayon::prelude::*;

use crate::error::{CliError, Result};

/// Number of contiguous realization blocks used to estimate the standard
/// error of a distance.
pub const STDERR_BLOCKS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Interference,
    Spacings,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Self::Interference => "interference",
            Self::Spacings => "spacings",
        }
    }
}

/// A distribution over operators that can be realized by index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    Cue {
        dim: usize,
    },
    Hoe {
        dim: usize,
    },
    Circuit {
        kind: CircuitKind,
        qubits: usize,
        gates: usize,
        p: f64,
    },
}

impl Source {
    pub fn dim(&self) -> usize {
        match *self {
            Self::Cue { dim } | Self::Hoe { dim } => dim,
            Self::Circuit { qubits, .. } => 1 << qubits,
        }
    }

    /// The circular ensemble a circuit ensemble is compared against.
    pub fn reference(kind: CircuitKind, qubits: usize) -> Self {
        let dim = 1 << qubits;
        match kind {
            CircuitKind::Uce => Self::Cue { dim },
            CircuitKind::Oce => Self::Hoe { dim },
        }
    }

    fn stream(&self, seed: u64, index: usize) -> RandomStream {
        let (tag, group) = match *self {
            Self::Cue { dim } => (StreamTag::Cue, dim as u64),
            Self::Hoe { dim } => (StreamTag::Hoe, dim as u64),
            Self::Circuit { gates, .. } => (StreamTag::Circuit, gates as u64),
        };
        RandomStream::for_realization(seed, tag, group, index as u64)
    }

    fn circuit_config(
        kind: CircuitKind,
        qubits: usize,
        gates: usize,
        p: f64,
    ) -> CircuitEnsembleConfig {
        CircuitEnsembleConfig {
            kind,
            qubits,
            gates,
            p,
            realizations: 1,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Cue { dim } | Self::Hoe { dim } if dim == 0 => {
                Err(CliError::config("--dim must be at least 1"))
            }
            Self::Circuit {
                kind,
                qubits,
                gates,
                p,
            } => {
                Self::circuit_config(kind, qubits, gates, p).validate()?;
                if qubits > qinterf::circuit::DEFAULT_QUBIT_CAP {
                    return Err(qinterf::Error::DimensionCap {
                        qubits,
                        cap: qinterf::circuit::DEFAULT_QUBIT_CAP,
                    }
                    .into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn interference(&self, seed: u64, index: usize) -> Result<f64> {
        let mut s = self.stream(seed, index);
        Ok(match *self {
            Self::Cue { dim } => interference(&sample_cue(dim, &mut s)?),
            Self::Hoe { dim } => interference(&sample_hoe(dim, &mut s)?),
            Self::Circuit {
                kind,
                qubits,
                gates,
                p,
            } => {
                let circuit = draw_circuit(&Self::circuit_config(kind, qubits, gates, p), &mut s)?;
                match kind {
                    CircuitKind::Uce => interference(&circuit.realize()?),
                    CircuitKind::Oce => interference(&circuit.realize_real()?),
                }
            }
        })
    }

    pub fn operator(&self, seed: u64, index: usize) -> Result<UnitaryOperator> {
        let mut s = self.stream(seed, index);
        Ok(match *self {
            Self::Cue { dim } => sample_cue(dim, &mut s)?,
            Self::Hoe { dim } => sample_hoe(dim, &mut s)?.to_unitary(),
            Self::Circuit {
                kind,
                qubits,
                gates,
                p,
            } => draw_circuit(&Self::circuit_config(kind, qubits, gates, p), &mut s)?.realize()?,
        })
    }

    pub fn spacings(&self, seed: u64, index: usize) -> Result<Vec<f64>> {
        let u = self.operator(seed, index)?;
        if u.dim() < 2 {
            return Err(CliError::config("spacings need a dimension of at least 2"));
        }
        Ok(spacings(&eigenphases(&u)?)?.into_values())
    }
}

pub struct Engine {
    pool: rayon::ThreadPool,
}

impl Engine {
    pub fn new(threads: usize) -> Result<Self> {
        if threads == 0 {
            return Err(CliError::config("--threads must be at least 1"));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::config(format!("cannot start worker pool: {e}")))?;
        Ok(Self { pool })
    }

    /// `f(0), …, f(count - 1)` in index order.
    pub fn map<T, F>(&self, count: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Sync + Send,
    {
        self.pool
            .install(|| (0..count).into_par_iter().map(f).collect())
    }

    pub fn interference_values(
        &self,
        source: &Source,
        seed: u64,
        realizations: usize,
    ) -> Result<Vec<f64>> {
        self.map(realizations, |i| source.interference(seed, i))
    }

    pub fn spacing_values(
        &self,
        source: &Source,
        seed: u64,
        realizations: usize,
    ) -> Result<Vec<Vec<f64>>> {
        self.map(realizations, |i| source.spacings(seed, i))
    }

    /// Interference histogram on `[0, N - 1]`.
    pub fn interference_histogram(
        &self,
        source: &Source,
        seed: u64,
        realizations: usize,
        bins: usize,
    ) -> Result<Histogram> {
        let values = self.interference_values(source, seed, realizations)?;
        Ok(Histogram::from_values(
            0.0,
            interference_upper(source.dim()),
            bins,
            &values,
        )?)
    }
}

pub fn interference_upper(dim: usize) -> f64 {
    (dim.max(2) - 1) as f64
}

/// Everything that determines one point of a convergence curve except `n_g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveConfig {
    pub kind: CircuitKind,
    pub qubits: usize,
    pub p: f64,
    pub realizations: usize,
    pub seed: u64,
    pub observable: Observable,
    pub bins: usize,
}

impl CurveConfig {
    pub fn source(&self, gates: usize) -> Source {
        Source::Circuit {
            kind: self.kind,
            qubits: self.qubits,
            gates,
            p: self.p,
        }
    }

    pub fn provenance(&self) -> Provenance {
        Provenance::new()
            .with("ensemble", kind_name(self.kind))
            .with("qubits", self.qubits)
            .with("prob", self.p)
            .with("realizations", self.realizations)
            .with("seed", self.seed)
            .with("observable", self.observable.name())
            .with("bins", self.bins)
    }
}

pub fn kind_name(kind: CircuitKind) -> &'static str {
    match kind {
        CircuitKind::Uce => "uce",
        CircuitKind::Oce => "oce",
    }
}

fn block_stderr(blocks: &[f64]) -> f64 {
    if blocks.len() < 2 {
        return f64::NAN;
    }
    let n = blocks.len() as f64;
    let mean = blocks.iter().sum::<f64>() / n;
    let var = blocks.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}

/// Distance of the circuit ensemble at `gates` from its reference law. The
/// standard error comes from the spread of [`STDERR_BLOCKS`] contiguous
/// blocks of realizations (NaN when the blocks are too small).
pub fn curve_point(
    engine: &Engine,
    config: &CurveConfig,
    gates: usize,
    reference: Option<&Histogram>,
) -> Result<CurvePoint> {
    let source = config.source(gates);
    source.validate()?;
    let n = config.realizations;
    let block_len = n / STDERR_BLOCKS;
    match config.observable {
        Observable::Spacings => {
            let per_realization = engine.spacing_values(&source, config.seed, n)?;
            let all: Vec<f64> = per_realization.iter().flatten().copied().collect();
            let distance = spacing_distance_of(&spacing_histogram(&all, config.bins)?)?;
            let blocks: Option<Vec<f64>> = (block_len > 0)
                .then(|| {
                    per_realization
                        .chunks(block_len)
                        .take(STDERR_BLOCKS)
                        .map(|chunk| {
                            let values: Vec<f64> = chunk.iter().flatten().copied().collect();
                            spacing_histogram(&values, config.bins)
                                .and_then(|h| spacing_distance_of(&h))
                                .ok()
                        })
                        .collect()
                })
                .flatten();
            Ok(CurvePoint {
                gates,
                distance,
                stderr: blocks.map_or(f64::NAN, |b| block_stderr(&b)),
            })
        }
        Observable::Interference => {
            let reference = reference
                .ok_or_else(|| CliError::config("interference mode needs a reference histogram"))?;
            let values = engine.interference_values(&source, config.seed, n)?;
            let upper = interference_upper(source.dim());
            let hist = Histogram::from_values(0.0, upper, config.bins, &values)?;
            let distance = hellinger_sq(&hist, reference)?;
            let blocks: Vec<f64> = if block_len > 0 {
                values
                    .chunks(block_len)
                    .take(STDERR_BLOCKS)
                    .map(|chunk| {
                        let h = Histogram::from_values(0.0, upper, config.bins, chunk)?;
                        hellinger_sq(&h, reference)
                    })
                    .collect::<qinterf::Result<_>>()?
            } else {
                Vec::new()
            };
            Ok(CurvePoint {
                gates,
                distance,
                stderr: block_stderr(&blocks),
            })
        }
    }
}

pub fn distance_curve(
    engine: &Engine,
    config: &CurveConfig,
    gates: &[usize],
    reference: Option<&Histogram>,
) -> Result<DistanceCurve> {
    let points = gates
        .iter()
        .map(|&g| curve_point(engine, config, g, reference))
        .collect::<Result<Vec<_>>>()?;
    let metadata = config.provenance().with(
        "gates",
        gates
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    Ok(DistanceCurve::new(points, metadata)?)
}

/// Exponential fit for spacing curves, Gaussian fit for interference curves.
pub fn fit_curve(curve: &DistanceCurve, observable: Observable) -> qinterf::Result<RateFit> {
    match observable {
        Observable::Spacings => fit_exponential_rate(curve),
        Observable::Interference => fit_gaussian_rate(curve),
    }
}
