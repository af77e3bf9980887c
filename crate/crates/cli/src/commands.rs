use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::Parser;
use qinterf::circuit::CircuitKind;
use qinterf::convergence::{hellinger_sq, hellinger_sq_to_law, RateFit, SPACING_RANGE};
use qinterf::interference::{
    analytic_cdf_n2, exact_mean, exact_variance, second_moment_s, CircularEnsemble,
};
use qinterf::provenance::Provenance;
use qinterf::spectral::{wigner_cdf, Histogram};

use crate::args::{
    Cli, Command, ConvergeArgs, CurveArgs, DistanceArgs, EnsembleArg, HistArgs, LawArg,
    MomentsArgs, ObservableArg, PscanArgs, RerunArgs, SampleArgs,
};
use crate::engine::{
    distance_curve, fit_curve, interference_upper, CurveConfig, Engine, Observable, Source,
};
use crate::error::{CliError, Result};

/// Header keys that map back onto command-line flags.
const REPLAYABLE_KEYS: &[&str] = &[
    "ensemble",
    "dim",
    "qubits",
    "gates",
    "prob",
    "realizations",
    "seed",
    "observable",
    "bins",
    "input",
    "column",
    "lower",
    "upper",
    "reference",
    "law",
    "reference-realizations",
];

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Moments(a) => moments(&a),
        Command::Sample(a) => sample(&a),
        Command::Hist(a) => hist(&a),
        Command::Distance(a) => distance(&a),
        Command::Converge(a) => converge(&a),
        Command::Pscan(a) => pscan(&a),
        Command::Rerun(a) => rerun(&a),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::io("<stdin>", e))?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(|e| CliError::io(path, e))
    }
}

fn header(command: &str) -> Provenance {
    Provenance::new().with("command", command)
}

fn circular(ensemble: EnsembleArg) -> Result<CircularEnsemble> {
    match ensemble {
        EnsembleArg::Cue => Ok(CircularEnsemble::Cue),
        EnsembleArg::Hoe => Ok(CircularEnsemble::Hoe),
        other => Err(CliError::config(format!(
            "exact moments exist for cue and hoe only, not {}",
            other.name()
        ))),
    }
}

fn circuit_kind(ensemble: EnsembleArg) -> Result<CircuitKind> {
    match ensemble {
        EnsembleArg::Uce => Ok(CircuitKind::Uce),
        EnsembleArg::Oce => Ok(CircuitKind::Oce),
        other => Err(CliError::config(format!(
            "convergence scans need a circuit ensemble (uce or oce), not {}",
            other.name()
        ))),
    }
}

fn observable(arg: ObservableArg) -> Observable {
    match arg {
        ObservableArg::Interference => Observable::Interference,
        ObservableArg::Spacings => Observable::Spacings,
    }
}

fn join<T: ToString>(values: &[T]) -> String {
    values
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn moments(a: &MomentsArgs) -> Result<()> {
    let ensemble = circular(a.ensemble)?;
    if a.dim < 2 {
        return Err(CliError::config(format!(
            "--dim must be at least 2, got {}",
            a.dim
        )));
    }
    let mean = exact_mean(ensemble, a.dim)?;
    let variance = exact_variance(ensemble, a.dim)?;
    let s = second_moment_s(ensemble, a.dim)?;
    let mut out = header("moments")
        .with("ensemble", a.ensemble.name())
        .with("dim", a.dim)
        .to_string();
    out.push_str("ensemble,N,mean,variance,std,second_moment\n");
    let _ = writeln!(
        out,
        "{},{},{},{},{},{}",
        a.ensemble.name(),
        a.dim,
        mean,
        variance,
        variance.sqrt(),
        s
    );
    write_output(a.output.out.as_deref(), &out)
}

fn sample_source(a: &SampleArgs, meta: &mut Provenance) -> Result<Source> {
    let source = match a.ensemble {
        EnsembleArg::Cue | EnsembleArg::Hoe => {
            if a.qubits.is_some() || !a.gates.is_empty() || !a.prob.is_empty() {
                return Err(CliError::config(
                    "--qubits, --gates and --prob apply to circuit ensembles only; use --dim",
                ));
            }
            let dim = a
                .dim
                .ok_or_else(|| CliError::config(format!("{} needs --dim", a.ensemble.name())))?;
            meta.set("dim", dim);
            if a.ensemble == EnsembleArg::Cue {
                Source::Cue { dim }
            } else {
                Source::Hoe { dim }
            }
        }
        EnsembleArg::Uce | EnsembleArg::Oce => {
            if a.dim.is_some() {
                return Err(CliError::config(
                    "circuit ensembles take --qubits, not --dim",
                ));
            }
            let qubits = a
                .qubits
                .ok_or_else(|| CliError::config(format!("{} needs --qubits", a.ensemble.name())))?;
            let [gates] = a.gates[..] else {
                return Err(CliError::config("sample needs exactly one --gates value"));
            };
            let [p] = a.prob[..] else {
                return Err(CliError::config("sample needs exactly one --prob value"));
            };
            meta.set("qubits", qubits)
                .set("gates", gates)
                .set("prob", p);
            Source::Circuit {
                kind: circuit_kind(a.ensemble)?,
                qubits,
                gates,
                p,
            }
        }
    };
    source.validate()?;
    Ok(source)
}

fn sample(a: &SampleArgs) -> Result<()> {
    let mut meta = header("sample").with("ensemble", a.ensemble.name());
    let source = sample_source(a, &mut meta)?;
    meta.set("realizations", a.realizations)
        .set("seed", a.seed)
        .set("observable", observable(a.observable).name());
    let engine = Engine::new(a.workers.threads)?;
    let mut out = meta.to_string();
    match observable(a.observable) {
        Observable::Interference => {
            let values = engine.interference_values(&source, a.seed, a.realizations)?;
            out.reserve(values.len() * 24);
            out.push_str("index,interference\n");
            for (i, v) in values.iter().enumerate() {
                let _ = writeln!(out, "{i},{v}");
            }
        }
        Observable::Spacings => {
            let values = engine.spacing_values(&source, a.seed, a.realizations)?;
            out.push_str("index,spacing\n");
            for (i, row) in values.iter().enumerate() {
                for v in row {
                    let _ = writeln!(out, "{i},{v}");
                }
            }
        }
    }
    write_output(a.output.out.as_deref(), &out)
}

/// Values of one column; `#` comments and blank lines are skipped, and a
/// first row whose field is not numeric is taken as the header.
pub fn parse_column(text: &str, column: Option<usize>, source: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    let mut first = true;
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = |reason: String| CliError::Input {
            path: source.to_string(),
            line: k + 1,
            reason,
        };
        let idx = column.unwrap_or(fields.len() - 1);
        let field = fields
            .get(idx)
            .ok_or_else(|| bad(format!("no column {idx} in `{line}`")))?;
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(v) => return Err(bad(format!("non-finite value {v}"))),
            Err(_) if first && field.chars().any(char::is_alphabetic) => {}
            Err(_) => return Err(bad(format!("cannot parse `{field}` as a number"))),
        }
        first = false;
    }
    Ok(values)
}

fn hist(a: &HistArgs) -> Result<()> {
    let text = read_input(&a.input)?;
    let values = parse_column(&text, a.column, &a.input.display().to_string())?;
    if values.is_empty() {
        return Err(qinterf::Error::EmptyHistogram.into());
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut lower, mut upper) = (a.lower.unwrap_or(min), a.upper.unwrap_or(max));
    if lower == upper && a.lower.is_none() && a.upper.is_none() {
        lower -= 0.5;
        upper += 0.5;
    }
    let h = Histogram::from_values(lower, upper, a.bins, &values)?;
    let mut meta = header("hist").with("input", a.input.display());
    if let Some(c) = a.column {
        meta.set("column", c);
    }
    meta.set("bins", a.bins);
    if let Some(l) = a.lower {
        meta.set("lower", l);
    }
    if let Some(u) = a.upper {
        meta.set("upper", u);
    }
    for (k, v) in Provenance::parse(&text).entries() {
        meta.set(format!("source.{k}"), v);
    }
    write_output(a.output.out.as_deref(), &h.to_csv(&meta))
}

fn load_histogram(path: &Path) -> Result<(Histogram, Provenance)> {
    let text = read_input(path)?;
    Histogram::from_csv(&text).map_err(|e| match e {
        qinterf::Error::Config(reason) => CliError::config(format!("{}: {reason}", path.display())),
        other => other.into(),
    })
}

fn distance(a: &DistanceArgs) -> Result<()> {
    let (h, _) = load_histogram(&a.input)?;
    let mut meta = header("distance").with("input", a.input.display());
    let f = match (&a.reference, a.law) {
        (Some(path), _) => {
            meta.set("reference", path.display());
            let (r, _) = load_histogram(path)?;
            hellinger_sq(&h, &r)?
        }
        (None, Some(law)) => {
            let name = match law {
                LawArg::Wigner => "wigner",
                LawArg::Cue2 => "cue2",
                LawArg::Hoe2 => "hoe2",
            };
            meta.set("law", name);
            match law {
                LawArg::Wigner => hellinger_sq_to_law(&h, wigner_cdf)?,
                LawArg::Cue2 => {
                    hellinger_sq_to_law(&h, |x| analytic_cdf_n2(CircularEnsemble::Cue, x))?
                }
                LawArg::Hoe2 => {
                    hellinger_sq_to_law(&h, |x| analytic_cdf_n2(CircularEnsemble::Hoe, x))?
                }
            }
        }
        (None, None) => return Err(CliError::config("distance needs --reference or --law")),
    };
    let mut out = meta.to_string();
    let _ = writeln!(out, "F\n{f}");
    write_output(a.output.out.as_deref(), &out)
}

/// Resolved curve settings shared by `converge` and `pscan`.
struct CurveSetup {
    engine: Engine,
    kind: CircuitKind,
    observable: Observable,
    reference: Option<Histogram>,
    meta: Provenance,
}

fn curve_setup(a: &CurveArgs, command: &str) -> Result<CurveSetup> {
    let kind = circuit_kind(a.ensemble)?;
    let observable = observable(a.observable);
    if a.gates.len() < 2 {
        return Err(CliError::config("--gates needs at least two values"));
    }
    if a.realizations == 0 {
        return Err(CliError::config("--realizations must be positive"));
    }
    if a.bins == 0 {
        return Err(CliError::config("--bins must be positive"));
    }
    Source::Circuit {
        kind,
        qubits: a.qubits,
        gates: 0,
        p: 0.5,
    }
    .validate()?;
    let engine = Engine::new(a.workers.threads)?;
    let mut meta = header(command);
    let reference = match observable {
        Observable::Spacings => {
            if a.reference.is_some() {
                return Err(CliError::config(
                    "--reference applies to interference mode only",
                ));
            }
            meta.set(
                "spacing_range",
                format!("{},{}", SPACING_RANGE.0, SPACING_RANGE.1),
            );
            None
        }
        Observable::Interference => {
            let upper = interference_upper(1 << a.qubits);
            let reference = match &a.reference {
                Some(path) => {
                    let (h, _) = load_histogram(path)?;
                    let expected = Histogram::new(0.0, upper, a.bins)?;
                    if !h.same_binning(&expected) {
                        return Err(CliError::config(format!(
                            "{}: reference must have {} bins on [0, {upper}]",
                            path.display(),
                            a.bins
                        )));
                    }
                    meta.set("reference", path.display());
                    h
                }
                None => {
                    let n_ref = a.reference_realizations.unwrap_or(10 * a.realizations);
                    meta.set("reference-realizations", n_ref);
                    let source = Source::reference(kind, a.qubits);
                    let cache = (!a.no_cache).then_some(a.cache_dir.as_path());
                    reference_histogram(&engine, &source, a.seed, n_ref, a.bins, cache)?
                }
            };
            Some(reference)
        }
    };
    Ok(CurveSetup {
        engine,
        kind,
        observable,
        reference,
        meta,
    })
}

fn cache_path(dir: &Path, source: &Source, seed: u64, realizations: usize, bins: usize) -> PathBuf {
    let name = match source {
        Source::Cue { .. } => "cue",
        Source::Hoe { .. } => "hoe",
        Source::Circuit { .. } => "circuit",
    };
    dir.join(format!(
        "reference-{name}-N{}-bins{bins}-nr{realizations}-seed{seed}.csv",
        source.dim()
    ))
}

/// Interference histogram of a circular ensemble, read from or written to
/// `cache` when given. A cached file is used only if its header matches.
pub fn reference_histogram(
    engine: &Engine,
    source: &Source,
    seed: u64,
    realizations: usize,
    bins: usize,
    cache: Option<&Path>,
) -> Result<Histogram> {
    let meta = header("reference")
        .with("ensemble", format!("{source:?}"))
        .with("realizations", realizations)
        .with("seed", seed)
        .with("bins", bins);
    let path = cache.map(|dir| cache_path(dir, source, seed, realizations, bins));
    if let Some(path) = &path {
        if let Ok(text) = fs::read_to_string(path) {
            if let Ok((h, stored)) = Histogram::from_csv(&text) {
                let matches = meta
                    .entries()
                    .iter()
                    .all(|(k, v)| stored.get(k) == Some(v.as_str()));
                if matches
                    && h.same_binning(&Histogram::new(
                        0.0,
                        interference_upper(source.dim()),
                        bins,
                    )?)
                {
                    return Ok(h);
                }
            }
        }
    }
    let h = engine.interference_histogram(source, seed, realizations, bins)?;
    if let Some(path) = &path {
        if let Err(e) = store_atomically(path, &h.to_csv(&meta)) {
            eprintln!("warning: reference cache not written: {e}");
        }
    }
    Ok(h)
}

fn store_atomically(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, text).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

fn curve_config(a: &CurveArgs, setup: &CurveSetup, p: f64) -> Result<CurveConfig> {
    if !(0.0..=1.0).contains(&p) {
        return Err(CliError::config(format!("probability {p} outside [0, 1]")));
    }
    Ok(CurveConfig {
        kind: setup.kind,
        qubits: a.qubits,
        p,
        realizations: a.realizations,
        seed: a.seed,
        observable: setup.observable,
        bins: a.bins,
    })
}

fn fit_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map_or_else(|| "curve".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.fit.csv"))
}

fn converge(a: &ConvergeArgs) -> Result<()> {
    let setup = curve_setup(&a.curve, "converge")?;
    let config = curve_config(&a.curve, &setup, a.prob)?;
    let mut curve = distance_curve(
        &setup.engine,
        &config,
        &a.curve.gates,
        setup.reference.as_ref(),
    )?;
    let mut meta = setup.meta.clone();
    meta.extend(&curve.metadata);
    curve.metadata = meta.clone();
    let mut fit_text = String::new();
    match fit_curve(&curve, setup.observable) {
        Ok(fit) => {
            fit_text.push_str(&meta.to_string());
            let _ = writeln!(fit_text, "{}\n{}", RateFit::CSV_HEADER, fit.csv_row());
        }
        Err(e) => {
            eprintln!("warning: rate fit failed: {e}");
            fit_text.push_str(
                &meta
                    .clone()
                    .with("fit_status", format!("failed: {e}"))
                    .to_string(),
            );
            let (kind, window) = match setup.observable {
                Observable::Spacings => (
                    qinterf::convergence::FitKind::Exponential,
                    qinterf::convergence::EXPONENTIAL_WINDOW,
                ),
                Observable::Interference => (
                    qinterf::convergence::FitKind::Gaussian,
                    qinterf::convergence::GAUSSIAN_WINDOW,
                ),
            };
            let _ = writeln!(
                fit_text,
                "{}\n{}",
                RateFit::CSV_HEADER,
                RateFit::failed_csv_row(kind, window)
            );
        }
    }
    let curve_text = curve.to_csv();
    match (&a.output.out, &a.fit_out) {
        (None, None) => write_output(None, &format!("{curve_text}\n{fit_text}")),
        (out, fit_out) => {
            write_output(out.as_deref(), &curve_text)?;
            let fit_target = fit_out.clone().or_else(|| out.as_deref().map(fit_path));
            write_output(fit_target.as_deref(), &fit_text)
        }
    }
}

fn pscan(a: &PscanArgs) -> Result<()> {
    if let Some(p) = a.prob.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
        return Err(CliError::config(format!(
            "--prob values must lie in (0, 1), got {p}"
        )));
    }
    let setup = curve_setup(&a.curve, "pscan")?;
    let mut rows = String::from("p,rate,stderr\n");
    let mut failed = Vec::new();
    for &p in &a.prob {
        let config = curve_config(&a.curve, &setup, p)?;
        let curve = distance_curve(
            &setup.engine,
            &config,
            &a.curve.gates,
            setup.reference.as_ref(),
        )?;
        match fit_curve(&curve, setup.observable) {
            Ok(fit) => {
                let _ = writeln!(rows, "{p},{},{}", fit.rate, fit.rate_stderr);
            }
            Err(e) => {
                eprintln!("warning: rate fit failed at p={p}: {e}");
                failed.push(p);
                let _ = writeln!(rows, "{p},NaN,NaN");
            }
        }
    }
    let mut meta = setup.meta.clone();
    let base = curve_config(&a.curve, &setup, a.prob[0])?.provenance();
    for (k, v) in base.entries() {
        if k != "prob" {
            meta.set(k.clone(), v);
        }
    }
    meta.set("prob", join(&a.prob))
        .set("gates", join(&a.curve.gates));
    if !failed.is_empty() {
        meta.set("fit_failed", join(&failed));
    }
    write_output(a.output.out.as_deref(), &format!("{meta}{rows}"))
}

/// Command-line arguments reconstructed from an output header.
pub fn replay_args(meta: &Provenance) -> Result<Vec<String>> {
    let command = meta
        .get("command")
        .ok_or_else(|| CliError::config("header has no `command` entry"))?;
    if !["moments", "sample", "hist", "distance", "converge", "pscan"].contains(&command) {
        return Err(CliError::config(format!("cannot replay `{command}`")));
    }
    let mut args = vec!["qinterf".to_string(), command.to_string()];
    for (k, v) in meta.entries() {
        if REPLAYABLE_KEYS.contains(&k.as_str()) {
            args.push(format!("--{k}"));
            args.push(v.clone());
        }
    }
    Ok(args)
}

fn rerun(a: &RerunArgs) -> Result<()> {
    let text = read_input(&a.from)?;
    let mut args = replay_args(&Provenance::parse(&text))?;
    if let Some(t) = a.threads {
        if args[1] != "moments" && args[1] != "hist" && args[1] != "distance" {
            args.push("--threads".into());
            args.push(t.to_string());
        }
    }
    if let Some(out) = &a.output.out {
        args.push("--out".into());
        args.push(out.display().to_string());
    }
    let cli = Cli::try_parse_from(&args)
        .map_err(|e| CliError::config(format!("recorded command is invalid: {e}")))?;
    run(cli)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_parsing() {
        let text = "# a=1\nindex,value\n0,1.5\n\n1,2.5\n";
        assert_eq!(parse_column(text, None, "x").unwrap(), vec![1.5, 2.5]);
        assert_eq!(parse_column(text, Some(0), "x").unwrap(), vec![0.0, 1.0]);
        assert_eq!(parse_column("3\n4\n", None, "x").unwrap(), vec![3.0, 4.0]);
        match parse_column("v\n1\nx\n", None, "in.csv") {
            Err(CliError::Input { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_column("1\ninf\n", None, "x").is_err());
        assert!(parse_column("1,2\n3\n", Some(1), "x").is_err());
    }

    #[test]
    fn replay_uses_flag_keys_only() {
        let meta = Provenance::new()
            .with("command", "sample")
            .with("ensemble", "cue")
            .with("dim", 4)
            .with("total", 10)
            .with("seed", 3);
        assert_eq!(
            replay_args(&meta).unwrap(),
            [
                "qinterf",
                "sample",
                "--ensemble",
                "cue",
                "--dim",
                "4",
                "--seed",
                "3"
            ]
        );
        assert!(replay_args(&Provenance::new().with("command", "rerun")).is_err());
        assert!(replay_args(&Provenance::new()).is_err());
    }

    #[test]
    fn fit_file_name() {
        assert_eq!(
            fit_path(Path::new("out/curve.csv")),
            Path::new("out/curve.fit.csv")
        );
        assert_eq!(fit_path(Path::new("curve")), Path::new("curve.fit.csv"));
    }
}
