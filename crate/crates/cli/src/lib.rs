//! Command-line front end: Jordan spectra of subspaces read from files, CJA
//! checks and identity verification on the built-in models.

pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use jordan_geom::geometry::{cja_check, sample_params, FdConfig, IdentityId, Immersion, PointContext};
use jordan_geom::models::{self, ModelSpec};
use jordan_geom::subspace::{jordan_spectrum, DEFAULT_CLUSTER_TOL};
use jordan_geom::Subspace;
use rayon::prelude::*;
use serde::Deserialize;

use report::{Angle, CjaSampleEntry, Entry, Format, ModelEcho, Param, Report, Summary, SCHEMA};

#[derive(Debug, Parser)]
#[command(name = "jordan-geom", version, about = "Jordan angles and submanifolds with constant Jordan angles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Jordan angles between two subspaces given as JSON files.
    Jordan {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CLUSTER_TOL)]
        cluster_tol: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Checks whether a model has constant normal Jordan angles.
    Cja {
        #[arg(long)]
        model: String,
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        angle_tol: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Evaluates identity residuals at seeded sample points of a model.
    Verify {
        #[arg(long)]
        model: String,
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        /// Comma-separated identity ids, or `all`.
        #[arg(long)]
        identities: String,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Built-in models.
    Models {
        #[command(subcommand)]
        action: ModelsAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum ModelsAction {
    List,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error(transparent)]
    Core(#[from] jordan_geom::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        2
    }
}

/// Rendered output and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub exit_code: u8,
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Jordan {
            p,
            q,
            cluster_tol,
            format,
        } => cmd_jordan(&p, &q, cluster_tol, format),
        Command::Cja {
            model,
            params,
            samples,
            seed,
            angle_tol,
            format,
        } => cmd_cja(&model, &params, samples, seed, angle_tol, format),
        Command::Verify {
            model,
            params,
            identities,
            samples,
            seed,
            format,
        } => cmd_verify(&model, &params, &identities, samples, seed, format),
        Command::Models {
            action: ModelsAction::List,
        } => Ok(Outcome {
            stdout: models_list(),
            exit_code: 0,
        }),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubspaceFile {
    ambient_dim: usize,
    vectors: Vec<Vec<f64>>,
}

/// Reads `{"ambient_dim": d, "vectors": [[...], ...]}` and orthonormalizes
/// the vectors.
pub fn load_subspace(path: &Path) -> Result<Subspace, CliError> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: shown.clone(),
        source,
    })?;
    let input_err = |message: String| CliError::Input {
        path: shown.clone(),
        message,
    };
    let file: SubspaceFile = serde_json::from_str(&text).map_err(|e| input_err(e.to_string()))?;
    if let Some(v) = file.vectors.iter().find(|v| v.len() != file.ambient_dim) {
        return Err(input_err(format!(
            "vector of length {} in ambient dimension {}",
            v.len(),
            file.ambient_dim
        )));
    }
    Subspace::from_vectors(&file.vectors).map_err(|e| input_err(e.to_string()))
}

fn report(command: String, seed: Option<u64>, model: Option<&ModelSpec>, results: Vec<Entry>) -> Report {
    let summary = Summary::tally(&results);
    Report {
        schema: SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION"),
        command,
        seed,
        model: model.map(|m| ModelEcho {
            name: m.kind.cli_name().to_string(),
            params: m
                .params
                .iter()
                .map(|(name, value)| Param {
                    name: name.clone(),
                    value: value.clone(),
                })
                .collect(),
        }),
        results,
        summary,
    }
}

fn param_args(spec: &ModelSpec) -> String {
    spec.params.iter().map(|(k, v)| format!(" --param {k}={v}")).collect()
}

pub fn cmd_jordan(p: &Path, q: &Path, cluster_tol: f64, format: Format) -> Result<Outcome, CliError> {
    let ps = load_subspace(p)?;
    let qs = load_subspace(q)?;
    let spec = jordan_spectrum(&ps, &qs, cluster_tol)?;
    let results = spec
        .classes
        .iter()
        .enumerate()
        .map(|(class, c)| Entry::Spectrum {
            class,
            angle: Angle::new(c.angle, c.multiplicity),
        })
        .collect();
    let command = format!(
        "jordan --p {} --q {} --cluster-tol {cluster_tol:e}",
        p.display(),
        q.display()
    );
    let r = report(command, None, None, results);
    Ok(Outcome {
        stdout: r.render(format),
        exit_code: 0,
    })
}

fn build_model(name: &str, params: &[String]) -> Result<(ModelSpec, Box<dyn Immersion + Send>), CliError> {
    let spec = ModelSpec::parse(name, params)?;
    let imm = models::build(&spec)?;
    Ok((spec, imm))
}

pub fn cmd_cja(
    model: &str,
    params: &[String],
    samples: usize,
    seed: u64,
    angle_tol: f64,
    format: Format,
) -> Result<Outcome, CliError> {
    let (spec, imm) = build_model(model, params)?;
    let fd = FdConfig::default();
    let cja = cja_check(imm.as_ref(), &imm.reference_plane(), samples, seed, angle_tol, &fd)?;
    let vs: Vec<f64> = cja.samples.iter().filter_map(|s| s.v).collect();
    let mut notes = Vec::new();
    if vs.len() == cja.samples.len() {
        let lo = vs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        notes.push(format!(
            "v = {:.9} at every sample (spread {:.1e})",
            0.5 * (lo + hi),
            hi - lo
        ));
    } else {
        notes.push(format!(
            "v is infinite at {} of {} samples (a normal angle is a right angle)",
            cja.samples.len() - vs.len(),
            cja.samples.len()
        ));
    }
    let entry = Entry::Cja {
        is_cja: cja.is_cja,
        reference_normal: Angle::list(&cja.reference_normal),
        reference_tangent: Angle::list(&cja.reference_tangent),
        g_n: cja.g_n,
        g_t: cja.g_t,
        r: cja.r,
        max_deviation: cja.max_deviation.is_finite().then_some(cja.max_deviation),
        angle_tol,
        samples: cja
            .samples
            .iter()
            .enumerate()
            .map(|(i, s)| CjaSampleEntry {
                sample: i,
                param: s.param.clone(),
                normal: Angle::list(&s.normal),
                tangent: Angle::list(&s.tangent),
                v: s.v,
            })
            .collect(),
    };
    let command = format!(
        "cja --model {}{} --samples {samples} --seed {seed} --angle-tol {angle_tol:e}",
        spec.kind.cli_name(),
        param_args(&spec)
    );
    let mut r = report(command, Some(seed), Some(&spec), vec![entry]);
    r.summary.notes = notes;
    Ok(Outcome {
        stdout: r.render(format),
        exit_code: if cja.is_cja { 0 } else { 1 },
    })
}

pub fn parse_identities(list: &str) -> Result<Vec<IdentityId>, CliError> {
    if list.trim().eq_ignore_ascii_case("all") {
        return Ok(IdentityId::ALL.to_vec());
    }
    let mut out = Vec::new();
    for part in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let id: IdentityId = part.parse()?;
        if !out.contains(&id) {
            out.push(id);
        }
    }
    if out.is_empty() {
        return Err(jordan_geom::Error::InvalidParameter("no identities given".into()).into());
    }
    Ok(out)
}

/// Errors that mean "this identity does not apply here" rather than failure.
fn skip_reason(e: &jordan_geom::Error) -> Option<String> {
    use jordan_geom::Error as E;
    match e {
        E::Inapplicable(_) | E::NoFrameField | E::NotCoassociative | E::WrongDimensions(_) => Some(e.to_string()),
        _ => None,
    }
}

fn identity_entries(ctx: Result<PointContext<'_>, jordan_geom::Error>, ids: &[IdentityId], sample: usize, u: &[f64]) -> Vec<Entry> {
    ids.iter()
        .map(|&id| {
            let outcome = ctx.as_ref().map_err(Clone::clone).and_then(|c| c.verify(id));
            match outcome {
                Ok(r) => Entry::Identity {
                    identity_id: id.to_string(),
                    sample,
                    param: u.to_vec(),
                    residual: Some(r.residual),
                    tolerance: r.tolerance,
                    pass: r.pass,
                    error: None,
                },
                Err(e) => match skip_reason(&e) {
                    Some(reason) => Entry::Skipped {
                        identity_id: id.to_string(),
                        sample,
                        param: u.to_vec(),
                        reason,
                    },
                    None => Entry::Identity {
                        identity_id: id.to_string(),
                        sample,
                        param: u.to_vec(),
                        residual: None,
                        tolerance: id.default_tolerance(),
                        pass: false,
                        error: Some(e.to_string()),
                    },
                },
            }
        })
        .collect()
}

pub fn cmd_verify(
    model: &str,
    params: &[String],
    identities: &str,
    samples: usize,
    seed: u64,
    format: Format,
) -> Result<Outcome, CliError> {
    let (spec, imm) = build_model(model, params)?;
    let ids = parse_identities(identities)?;
    let fd = FdConfig::default();
    let points = sample_params(imm.as_ref(), samples, seed);
    let per_sample: Vec<Vec<Entry>> = points
        .par_iter()
        .enumerate()
        .map(|(i, u)| identity_entries(PointContext::new(imm.as_ref(), u, &fd), &ids, i, u))
        .collect();
    // sample-major order
    let results: Vec<Entry> = per_sample.into_iter().flatten().collect();
    let id_list: Vec<&str> = ids.iter().map(|id| id.as_str()).collect();
    let command = format!(
        "verify --model {}{} --identities {} --samples {samples} --seed {seed}",
        spec.kind.cli_name(),
        param_args(&spec),
        id_list.join(",")
    );
    let r = report(command, Some(seed), Some(&spec), results);
    let exit_code = if r.summary.failed == 0 { 0 } else { 1 };
    Ok(Outcome {
        stdout: r.render(format),
        exit_code,
    })
}

pub fn models_list() -> String {
    models::list()
        .iter()
        .map(|(name, desc)| format!("{name}\t{desc}\n"))
        .collect()
}
