//! Command-line front end: subcommand dispatch, file plumbing, and
//! structured logging.
//!
//! All file contents flow through the text codecs in the sibling
//! modules; this module owns the only `std::fs` calls in the crate.
//! Every output file gains a `.manifest` sidecar recording the
//! resolved invocation, and diagnostics go to standard error as
//! `key=value` lines so output files stay machine-clean.

use crate::cloud::{parse_cloud, write_cloud};
use crate::config::{config_entries, parse_config};
use crate::manifest::{manifest_path, RunManifest};
use crate::obj::parse_obj;
use crate::oracles::{
    fc_decision_suite, fc_score_suite, nms_suite, ray_suite, volume_suite, SuiteReport,
};
use crate::records::{
    parse_predictions, parse_records, record_grasp, write_proposals, write_records, write_report,
};
use clap::{Parser, Subcommand, ValueEnum};
use graspforge_core::camera::{render_cloud, sample_view};
use graspforge_core::evaluation::{evaluate, EvalThresholds, REPORT_KS};
use graspforge_core::mesh::TriMesh;
use graspforge_core::nalgebra::Point3;
use graspforge_core::pipeline::{
    annotate_object, apply_rest_pose, normalize_mesh, stable_poses, GraspLabel,
};
use graspforge_core::proposal::{
    anchor_grid, label_proposals, prune_outside, GroundTruthGrasp, LabelParams,
    DEFAULT_NEIGHBORHOOD_EPS,
};
use graspforge_core::shapes;
use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

const RENDER_RADIUS_RANGE: (f64, f64) = (0.4, 0.8);

/// Grasp dataset tooling: annotate meshes, render clouds, label
/// proposals, and score predictions.
#[derive(Debug, Parser)]
#[command(name = "graspforge", version, disable_help_subcommand = true)]
pub struct Cli {
    /// Worker thread budget; execution is sequential and output bytes
    /// never depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Seed override for the subcommand's random draws.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Annotate a mesh with scored antipodal grasp candidates.
    Annotate {
        /// Input mesh (OBJ).
        #[arg(long)]
        mesh: PathBuf,
        /// Pipeline configuration (key=value lines).
        #[arg(long)]
        config: PathBuf,
        /// Output annotation file (JSON lines).
        #[arg(long)]
        out: PathBuf,
    },
    /// Render depth-camera point clouds of a mesh from sampled views.
    Render {
        /// Input mesh (OBJ).
        #[arg(long)]
        mesh: PathBuf,
        /// Output cloud file (one x y z triple per line).
        #[arg(long)]
        out: PathBuf,
        /// Number of views merged into the output cloud.
        #[arg(long, default_value_t = 1)]
        views: usize,
    },
    /// Pair a cloud with grid anchors and label the proposals.
    Propose {
        /// Input cloud file.
        #[arg(long)]
        cloud: PathBuf,
        /// Ground-truth annotation file (JSON lines).
        #[arg(long)]
        annotations: PathBuf,
        /// Output proposal file (JSON lines).
        #[arg(long)]
        out: PathBuf,
        /// Grid resolution per axis.
        #[arg(long)]
        r: usize,
        /// Grid extent in meters.
        #[arg(long)]
        b: f64,
        /// Watertight mesh for dropping anchors outside the body.
        #[arg(long)]
        mesh: Option<PathBuf>,
    },
    /// Score ranked predictions against ground-truth annotations.
    Evaluate {
        /// Prediction file (JSON lines with confidence).
        #[arg(long)]
        pred: PathBuf,
        /// Ground-truth annotation file (JSON lines).
        #[arg(long)]
        gt: PathBuf,
        /// Output report (JSON).
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a brute-force verification suite.
    Oracle {
        /// Which cross-check to run.
        #[arg(value_enum)]
        check: OracleCheck,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleCheck {
    /// Hull-based scores against support-function minimization.
    Score,
    /// Closure decisions against geometric certificates.
    Decision,
    /// Accelerated ray casts against the all-triangle scan.
    Ray,
    /// Analytic volumes against Monte-Carlo counting.
    Volume,
    /// Suppression against the exhaustive greedy oracle.
    Nms,
    /// Every suite in sequence.
    All,
}

/// Failure that terminates a run, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or malformed file content.
    Validation(String),
    /// The file system refused a read or write.
    Io { path: PathBuf, source: std::io::Error },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "{msg}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io { .. } => 2,
        }
    }

    fn invalid(path: &Path, err: impl fmt::Display) -> CliError {
        CliError::Validation(format!("{}: {err}", path.display()))
    }
}

fn kv(key: &str, value: &str) -> String {
    if value.is_empty() || value.chars().any(char::is_whitespace) {
        format!("{key}={value:?}")
    } else {
        format!("{key}={value}")
    }
}

fn log(event: &str, pairs: &[(&str, String)]) {
    let mut line = kv("event", event);
    for (k, v) in pairs {
        line.push(' ');
        line.push_str(&kv(k, v));
    }
    eprintln!("{line}");
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_output(path: &Path, text: &str, manifest: &RunManifest) -> Result<(), CliError> {
    write_text(path, text)?;
    write_text(&manifest_path(path), &manifest.to_text())
}

fn load_mesh(path: &Path) -> Result<TriMesh, CliError> {
    let import = parse_obj(&read_text(path)?).map_err(|e| CliError::invalid(path, e))?;
    for w in &import.warnings {
        log("obj_warning", &[("path", path.display().to_string()), ("message", w.clone())]);
    }
    Ok(import.mesh)
}

fn object_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "object".to_owned())
}

/// Parses `argv` and executes the selected subcommand, returning the
/// process exit code: 0 on success, 1 on validation errors, 2 on I/O
/// errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    if cli.threads == 0 {
        log("error", &[("message", "threads must be at least 1".to_owned())]);
        return 1;
    }
    log("threads", &[("requested", cli.threads.to_string())]);
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(err) => {
            log("error", &[("message", err.to_string())]);
            err.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Annotate { mesh, config, out } => annotate_cmd(cli, mesh, config, out),
        Command::Render { mesh, out, views } => render_cmd(cli, mesh, out, *views),
        Command::Propose {
            cloud,
            annotations,
            out,
            r,
            b,
            mesh,
        } => propose_cmd(cli, cloud, annotations, out, *r, *b, mesh.as_deref()),
        Command::Evaluate { pred, gt, out } => evaluate_cmd(pred, gt, out),
        Command::Oracle { check } => oracle_cmd(*check),
    }
}

fn annotate_cmd(cli: &Cli, mesh_path: &Path, config_path: &Path, out: &Path) -> Result<(), CliError> {
    let mesh = load_mesh(mesh_path)?;
    let mut cfg = parse_config(&read_text(config_path)?)
        .map_err(|e| CliError::invalid(config_path, e))?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }

    let normalized = normalize_mesh(&mesh).map_err(|e| CliError::invalid(mesh_path, e))?;
    if normalized.aspect_conflict {
        log("warning", &[(
            "message",
            "aspect ratio forces the shortest side under its target".to_owned(),
        )]);
    }
    let poses = stable_poses(&normalized.mesh).map_err(|e| CliError::invalid(mesh_path, e))?;
    let pose = poses
        .iter()
        .max_by(|a, b| a.support_area.total_cmp(&b.support_area))
        .ok_or_else(|| CliError::invalid(mesh_path, "no stable resting facet"))?;
    let rested = apply_rest_pose(&normalized.mesh, pose)
        .map_err(|e| CliError::invalid(mesh_path, e))?;
    log("normalized", &[
        ("scale", format!("{:.6}", normalized.scale)),
        ("stable_poses", poses.len().to_string()),
        ("support_area", format!("{:.6e}", pose.support_area)),
    ]);

    let id = object_id(mesh_path);
    let outcome = annotate_object(&rested, &id, &cfg).map_err(|e| CliError::invalid(mesh_path, e))?;
    let stats = &outcome.stats;
    log("annotated", &[
        ("object", id.clone()),
        ("records", outcome.records.len().to_string()),
        ("requested", stats.requested.to_string()),
        ("pairs_sampled", stats.pairs_sampled.to_string()),
        ("scored", stats.scored.to_string()),
        ("degenerate_pairs", stats.degenerate_pairs.to_string()),
        ("dropped_ground", stats.dropped_ground.to_string()),
        ("dropped_dedup", stats.dropped_dedup.to_string()),
        ("positive_fraction", format!("{:.4}", stats.positive_fraction)),
        ("attempt_cap_hit", stats.attempt_cap_hit.to_string()),
    ]);
    if stats.attempt_cap_hit {
        log("warning", &[(
            "message",
            "sampler hit its attempt cap; output is a partial batch".to_owned(),
        )]);
    }

    let manifest = RunManifest::new("annotate", cfg.seed)
        .input("mesh", mesh_path)
        .input("config", config_path)
        .output("annotations", out)
        .params(&config_entries(&cfg));
    write_output(out, &write_records(&outcome.records), &manifest)
}

fn aabb_center(mesh: &TriMesh) -> Point3<f64> {
    let (lo, hi) = mesh.aabb();
    Point3::from((lo.coords + hi.coords) / 2.0)
}

/// The normalize-and-rest transform shared by `annotate` and `render`,
/// so annotation records and rendered clouds land in the same frame.
fn normalized_rest(mesh: &TriMesh) -> Result<TriMesh, graspforge_core::pipeline::PipelineError> {
    let normalized = normalize_mesh(mesh)?;
    let poses = stable_poses(&normalized.mesh)?;
    let pose = poses
        .iter()
        .max_by(|a, b| a.support_area.total_cmp(&b.support_area))
        .ok_or(graspforge_core::pipeline::PipelineError::NoStablePose)?;
    apply_rest_pose(&normalized.mesh, pose)
}

fn render_cmd(cli: &Cli, mesh_path: &Path, out: &Path, views: usize) -> Result<(), CliError> {
    if views == 0 {
        return Err(CliError::Validation("views must be at least 1".to_owned()));
    }
    let raw = load_mesh(mesh_path)?;
    let (mesh, rested) = match normalized_rest(&raw) {
        Ok(mesh) => (mesh, true),
        Err(e) => {
            log("warning", &[(
                "message",
                format!("rendering the mesh as-is; normalization failed: {e}"),
            )]);
            (raw, false)
        }
    };
    let target = if mesh.is_watertight() {
        mesh.mass_properties()
            .map(|m| m.centroid)
            .unwrap_or_else(|_| aabb_center(&mesh))
    } else {
        aabb_center(&mesh)
    };
    let seed = cli.seed.unwrap_or(0);

    let mut merged: Vec<Point3<f64>> = Vec::new();
    for view in 0..views {
        let mut pose = sample_view(RENDER_RADIUS_RANGE, seed.wrapping_add(view as u64));
        pose.position += target.coords;
        pose.look_at = target;
        let points = render_cloud(&mesh, &pose).map_err(|e| CliError::invalid(mesh_path, e))?;
        log("rendered", &[
            ("view", view.to_string()),
            ("points", points.len().to_string()),
        ]);
        merged.extend(points);
    }
    log("cloud", &[("points", merged.len().to_string())]);

    let manifest = RunManifest::new("render", seed)
        .input("mesh", mesh_path)
        .output("cloud", out)
        .param("views", views)
        .param("rested", rested)
        .param("radius_min", RENDER_RADIUS_RANGE.0)
        .param("radius_max", RENDER_RADIUS_RANGE.1);
    write_output(out, &write_cloud(&merged), &manifest)
}

fn propose_cmd(
    cli: &Cli,
    cloud_path: &Path,
    annotations_path: &Path,
    out: &Path,
    r: usize,
    b: f64,
    mesh_path: Option<&Path>,
) -> Result<(), CliError> {
    if r == 0 {
        return Err(CliError::Validation("r must be at least 1".to_owned()));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(CliError::Validation("b must be positive and finite".to_owned()));
    }
    let cloud = parse_cloud(&read_text(cloud_path)?)
        .map_err(|e| CliError::invalid(cloud_path, e))?;
    if cloud.is_empty() {
        log("warning", &[("message", "cloud file has no points".to_owned())]);
    }
    let records = parse_records(&read_text(annotations_path)?)
        .map_err(|e| CliError::invalid(annotations_path, e))?;
    let mut gt: Vec<GroundTruthGrasp> = Vec::new();
    for rec in &records {
        if rec.label == GraspLabel::Positive {
            for contact in [rec.c1, rec.c2] {
                gt.push(GroundTruthGrasp {
                    contact,
                    center: rec.center,
                    pitch: rec.pitch,
                });
            }
        }
    }

    let full = anchor_grid(r, b);
    let grid = match mesh_path {
        Some(path) => {
            let raw = load_mesh(path)?;
            let mesh = match normalized_rest(&raw) {
                Ok(mesh) => mesh,
                Err(e) => {
                    log("warning", &[(
                        "message",
                        format!("pruning against the mesh as-is; normalization failed: {e}"),
                    )]);
                    raw
                }
            };
            prune_outside(&full, &mesh).map_err(|e| CliError::invalid(path, e))?
        }
        None => full.clone(),
    };
    let mut params = LabelParams::for_grid(&grid, DEFAULT_NEIGHBORHOOD_EPS);
    params.seed = cli.seed.unwrap_or(0);
    let outcome = label_proposals(&cloud, &grid, &gt, &params);
    if outcome.empty_ground_truth {
        log("warning", &[(
            "message",
            "no positive annotations; every proposal is labeled negative".to_owned(),
        )]);
    }

    let full_pairs = cloud.len() * full.anchors.len();
    let kept = outcome.proposals.len();
    let removal = if full_pairs > 0 {
        1.0 - kept as f64 / full_pairs as f64
    } else {
        0.0
    };
    log("proposals", &[
        ("cloud_points", cloud.len().to_string()),
        ("anchors_full", full.anchors.len().to_string()),
        ("anchors_kept", grid.anchors.len().to_string()),
        ("pairs_full", full_pairs.to_string()),
        ("kept", kept.to_string()),
        ("positives", outcome.positive_count.to_string()),
        ("negatives", outcome.negative_count.to_string()),
        ("removal_rate", format!("{removal:.4}")),
    ]);

    let mut manifest = RunManifest::new("propose", params.seed)
        .input("cloud", cloud_path)
        .input("annotations", annotations_path);
    if let Some(path) = mesh_path {
        manifest = manifest.input("mesh", path);
    }
    let manifest = manifest
        .output("proposals", out)
        .param("r", r)
        .param("b", b)
        .param("neighborhood_eps", DEFAULT_NEIGHBORHOOD_EPS);
    write_output(out, &write_proposals(&outcome.proposals), &manifest)
}

fn evaluate_cmd(pred_path: &Path, gt_path: &Path, out: &Path) -> Result<(), CliError> {
    let predictions = parse_predictions(&read_text(pred_path)?)
        .map_err(|e| CliError::invalid(pred_path, e))?;
    let preds: Vec<_> = predictions
        .iter()
        .map(|p| (record_grasp(&p.record), p.confidence))
        .collect();
    let records = parse_records(&read_text(gt_path)?)
        .map_err(|e| CliError::invalid(gt_path, e))?;
    let gt: Vec<_> = records
        .iter()
        .filter(|r| r.label == GraspLabel::Positive)
        .map(record_grasp)
        .collect();

    let tol = EvalThresholds::default();
    let report = evaluate(&preds, &gt, &tol)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let mut pairs = vec![
        ("predictions", preds.len().to_string()),
        ("ground_truth", gt.len().to_string()),
        ("nms_survivors", report.nms_survivors.to_string()),
    ];
    for (slot, &k) in REPORT_KS.iter().enumerate() {
        pairs.push(("k", format!("{k}")));
        pairs.push(("success", format!("{:.4}", report.success_at[slot])));
        pairs.push(("coverage", format!("{:.4}", report.coverage_at[slot])));
    }
    log("evaluated", &pairs);

    let manifest = RunManifest::new("evaluate", 0)
        .input("predictions", pred_path)
        .input("ground_truth", gt_path)
        .output("report", out);
    write_output(out, &write_report(&report), &manifest)
}

/// The pinned verification suites behind `oracle`; acceptance checks
/// call these same runners.
pub fn oracle_suites(check: OracleCheck) -> Vec<SuiteReport> {
    let mut reports = Vec::new();
    let all = check == OracleCheck::All;
    if all || check == OracleCheck::Score {
        reports.push(fc_score_suite(50, 100_000, 0.02, 2026));
    }
    if all || check == OracleCheck::Decision {
        reports.push(fc_decision_suite(200, 822));
    }
    if all || check == OracleCheck::Ray {
        let sphere = shapes::icosphere(0.06, 3, Point3::new(0.0, 0.0, 0.0));
        reports.push(ray_suite(&sphere, 500, 4011));
        reports.push(ray_suite(&shapes::unit_cube(), 500, 4012));
    }
    if all || check == OracleCheck::Volume {
        reports.push(volume_suite(5, 1_000_000, 0.01, 515));
    }
    if all || check == OracleCheck::Nms {
        reports.push(nms_suite(20, 100, &EvalThresholds::default()));
    }
    reports
}

fn oracle_cmd(check: OracleCheck) -> Result<(), CliError> {
    let reports = oracle_suites(check);
    let mut all_pass = true;
    for report in &reports {
        for line in report.details.lines() {
            eprintln!("suite={} {line}", report.name);
        }
        println!("suite={} pass={}", report.name, report.pass);
        all_pass &= report.pass;
    }
    if all_pass {
        Ok(())
    } else {
        Err(CliError::Validation("oracle cross-check failed".to_owned()))
    }
}
