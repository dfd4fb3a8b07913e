//! surflab: generate pants-graph truncations, classify their walk type,
//! verify flow certificates, check train-track weight systems, and evaluate
//! foliation Dirichlet integrals.
//!
//! All reports are machine-readable JSON on stdout (with a schema_version
//! field) and a one-line human summary on stderr. Exit codes: 0 for definite
//! verdicts or computed values, 2 for Inconclusive/Unknown, 1 for errors,
//! 64 for usage errors, 74 for file I/O failures.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use surflab_core::classify::{
    classify, resistance_profile_with, tree_end_certificate, verify_flow_certificate, TypeVerdict,
    Verdict,
};
use surflab_core::foliation::{quadrature_dirichlet, FoliationPiece};
use surflab_core::generators::{self, FluteTreeSpec};
use surflab_core::graph::{build_truncation_with, GraphView, TruncationConfig, VertexId};
use surflab_core::laminations::{
    ml_int_membership, validate_switch_conditions, Membership, TailedWeights, TrainTrack,
};
use surflab_core::potential::EdgeFunction;

const SCHEMA_VERSION: u32 = 1;

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_IO: u8 = 74;

#[derive(Parser)]
#[command(name = "surflab", version, about = "Type problem toolkit for pants/hexagon graphs")]
struct Cli {
    /// Seed for randomized helpers (reserved; commands are deterministic).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Z1,
    Z2,
    Z3,
    Trivalent,
    GmFlute,
    FluteTree,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TransformArg {
    None,
    T2,
    T3,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Profile,
    Flow,
    Tree,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PieceArg {
    Rect,
    Corner,
    Parallelogram,
    Trapezoid,
}

#[derive(Subcommand)]
enum Command {
    /// Build a radius ball of a graph family and write it to a file.
    Generate {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, value_enum, default_value = "none")]
        transform: TransformArg,
        #[arg(long)]
        radius: u32,
        #[arg(long)]
        out: PathBuf,
        /// Flute-tree spec file (JSON), required for --family flute-tree.
        #[arg(long)]
        tree_spec: Option<PathBuf>,
    },
    /// Decide Recurrent / Transient / Inconclusive for a family or graph.
    Classify {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[arg(long, value_enum, default_value = "none")]
        transform: TransformArg,
        #[arg(long)]
        tree_spec: Option<PathBuf>,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Comma-separated truncation radii, roughly doubling.
        #[arg(long, default_value = "5,10,20,40")]
        radii: String,
        #[arg(long, default_value_t = 0.02)]
        tol: f64,
        /// Flow file for --method flow.
        #[arg(long)]
        flow: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        source: u32,
        /// Analytic energy bound accepted in place of geometric decay.
        #[arg(long)]
        energy_bound: Option<f64>,
        /// Truncation radius on which tree traces are replayed.
        #[arg(long, default_value_t = 10)]
        replay_radius: u32,
    },
    /// Check a transience flow certificate against a graph file.
    VerifyFlow {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        flow: PathBuf,
        #[arg(long)]
        source: u32,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        energy_bound: Option<f64>,
    },
    /// Train-track weight system checks.
    Lamination {
        #[command(subcommand)]
        cmd: LaminationCmd,
    },
    /// Closed-form Dirichlet integrals of foliation pieces vs quadrature.
    Dirichlet {
        #[arg(long, value_enum)]
        piece: PieceArg,
        /// Comma-separated parameters, e.g. a=1,a1=2,D=1.
        #[arg(long)]
        params: String,
        /// Quadrature grid size (midpoint rule).
        #[arg(long, default_value_t = 2048)]
        quadrature: usize,
    },
}

#[derive(Subcommand)]
enum LaminationCmd {
    /// Validate switch conditions and decide ℓ² membership.
    Check {
        #[arg(long)]
        track: PathBuf,
        #[arg(long)]
        weights: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: msg.into(),
        }
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        Failure {
            code: EXIT_IO,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl From<surflab_core::Error> for Failure {
    fn from(e: surflab_core::Error) -> Self {
        Failure {
            code: EXIT_ERROR,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::io(path, e))
}

fn load_tree_spec(path: Option<&PathBuf>) -> Result<FluteTreeSpec, Failure> {
    let path = path.ok_or_else(|| Failure::usage("--family flute-tree requires --tree-spec"))?;
    let text = read_file(path)?;
    let spec: FluteTreeSpec = serde_json::from_str(&text).map_err(|e| Failure {
        code: EXIT_ERROR,
        message: format!("{}: {e}", path.display()),
    })?;
    Ok(spec)
}

fn make_generator(
    family: FamilyArg,
    transform: TransformArg,
    tree_spec: Option<&PathBuf>,
) -> Result<surflab_core::GraphGenerator, Failure> {
    let base = match family {
        FamilyArg::Z1 => generators::grid(1)?,
        FamilyArg::Z2 => generators::grid(2)?,
        FamilyArg::Z3 => generators::grid(3)?,
        FamilyArg::Trivalent => generators::trivalent_tree(),
        FamilyArg::GmFlute => generators::gm_flute_graph(),
        FamilyArg::FluteTree => generators::flute_tree(load_tree_spec(tree_spec)?)?,
    };
    match transform {
        TransformArg::None => Ok(base),
        TransformArg::T2 => {
            if family != FamilyArg::Z2 {
                return Err(Failure::usage("--transform t2 requires --family z2"));
            }
            Ok(generators::transform_t2(&base)?)
        }
        TransformArg::T3 => {
            if family != FamilyArg::Z3 {
                return Err(Failure::usage("--transform t3 requires --family z3"));
            }
            Ok(generators::transform_t3(&base)?)
        }
    }
}

fn parse_radii(s: &str) -> Result<Vec<u32>, Failure> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<u32>()
                .map_err(|_| Failure::usage(format!("bad radius {part:?} in --radii")))
        })
        .collect()
}

fn emit(report: &serde_json::Value, summary: &str) {
    println!("{}", serde_json::to_string(report).expect("report serializes"));
    eprintln!("{summary}");
}

fn verdict_exit(v: Verdict) -> u8 {
    match v {
        Verdict::Recurrent | Verdict::Transient => EXIT_OK,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn verdict_report(command: &str, verdict: &TypeVerdict) -> serde_json::Value {
    let mut value = serde_json::to_value(verdict).expect("verdict serializes");
    let obj = value.as_object_mut().expect("verdict is an object");
    obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
    obj.insert("command".into(), json!(command));
    value
}

fn run(command: Command) -> Result<u8, Failure> {
    let cfg = TruncationConfig::from_env();
    match command {
        Command::Generate {
            family,
            transform,
            radius,
            out,
            tree_spec,
        } => {
            let gen = make_generator(family, transform, tree_spec.as_ref())?;
            let view = build_truncation_with(&gen, radius, &cfg)?;
            write_file(&out, &view.to_json())?;
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "generate",
                "family": view.family(),
                "radius": radius,
                "vertices": view.vertex_count(),
                "edges": view.edge_count(),
                "out": out.display().to_string(),
            });
            emit(
                &report,
                &format!(
                    "wrote {} ({} vertices, {} edges)",
                    out.display(),
                    view.vertex_count(),
                    view.edge_count()
                ),
            );
            Ok(EXIT_OK)
        }
        Command::Classify {
            graph,
            family,
            transform,
            tree_spec,
            method,
            radii,
            tol,
            flow,
            source,
            energy_bound,
            replay_radius,
        } => {
            let verdict = match method {
                MethodArg::Profile => {
                    let family = family.ok_or_else(|| {
                        Failure::usage("--method profile requires --family (builds several truncations)")
                    })?;
                    let gen = make_generator(family, transform, tree_spec.as_ref())?;
                    let radii = parse_radii(&radii)?;
                    let profile = resistance_profile_with(&gen, &radii, &cfg)?;
                    classify(&profile, tol)?
                }
                MethodArg::Flow => {
                    let graph = graph
                        .ok_or_else(|| Failure::usage("--method flow requires --graph FILE"))?;
                    let flow_path = flow
                        .ok_or_else(|| Failure::usage("--method flow requires --flow FILE"))?;
                    let view = GraphView::from_json(&read_file(&graph)?)?;
                    let flow = EdgeFunction::from_json(&read_file(&flow_path)?, &view)?;
                    verify_flow_certificate(&view, &flow, VertexId(source), tol, energy_bound)?
                }
                MethodArg::Tree => {
                    let family = family
                        .ok_or_else(|| Failure::usage("--method tree requires --family flute-tree"))?;
                    let gen = make_generator(family, transform, tree_spec.as_ref())?;
                    tree_end_certificate(&gen, replay_radius)?
                }
            };
            let report = verdict_report("classify", &verdict);
            emit(
                &report,
                &format!("verdict: {:?} ({:?})", verdict.verdict, verdict.method),
            );
            Ok(verdict_exit(verdict.verdict))
        }
        Command::VerifyFlow {
            graph,
            flow,
            source,
            tol,
            energy_bound,
        } => {
            let view = GraphView::from_json(&read_file(&graph)?)?;
            let flow = EdgeFunction::from_json(&read_file(&flow)?, &view)?;
            let verdict =
                verify_flow_certificate(&view, &flow, VertexId(source), tol, energy_bound)?;
            let report = verdict_report("verify-flow", &verdict);
            emit(
                &report,
                &format!("verdict: {:?} ({:?})", verdict.verdict, verdict.method),
            );
            Ok(verdict_exit(verdict.verdict))
        }
        Command::Lamination {
            cmd: LaminationCmd::Check { track, weights },
        } => {
            let track = TrainTrack::from_json(&read_file(&track)?)?;
            let weights = TailedWeights::from_json(&read_file(&weights)?)?;
            let check = validate_switch_conditions(&track, &weights.weights)?;
            let membership = if check.valid {
                ml_int_membership(&track, &weights, 1e-12)?
            } else {
                Membership::Unknown
            };
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "lamination-check",
                "switch_valid": check.valid,
                "violations": check.violations,
                "membership": format!("{membership:?}"),
                "branches": track.branches.len(),
            });
            emit(
                &report,
                &format!(
                    "switches {}, membership {membership:?}",
                    if check.valid { "balanced" } else { "VIOLATED" }
                ),
            );
            if !check.valid {
                return Ok(EXIT_ERROR);
            }
            Ok(match membership {
                Membership::Member | Membership::NonMember => EXIT_OK,
                Membership::Unknown => EXIT_INCONCLUSIVE,
            })
        }
        Command::Dirichlet {
            piece,
            params,
            quadrature,
        } => {
            let piece = parse_piece(piece, &params)?;
            let closed = piece.closed_form()?;
            let oracle = quadrature_dirichlet(&piece, quadrature)?;
            let mut report = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "dirichlet",
                "piece": serde_json::to_value(&piece).expect("piece serializes"),
                "closed_form": closed,
                "quadrature": oracle,
                "grid_n": quadrature,
                "abs_diff": (closed - oracle).abs(),
            });
            if let FoliationPiece::CornerRectangle { .. } = piece {
                let (_, scale) = surflab_core::foliation::corner_dirichlet(&piece)?;
                report
                    .as_object_mut()
                    .unwrap()
                    .insert("top_measure_scale".into(), json!(scale));
            }
            emit(
                &report,
                &format!(
                    "closed form {closed:.6}, quadrature {oracle:.6}, |diff| {:.2e}",
                    (closed - oracle).abs()
                ),
            );
            Ok(EXIT_OK)
        }
    }
}

fn parse_piece(kind: PieceArg, params: &str) -> Result<FoliationPiece, Failure> {
    let mut map = BTreeMap::new();
    for part in params.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("bad parameter {part:?} (expected k=v)")))?;
        let value: f64 = v
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("bad numeric value in {part:?}")))?;
        map.insert(k.trim().to_string(), value);
    }
    let get = |k: &str| -> Result<f64, Failure> {
        map.get(k)
            .copied()
            .ok_or_else(|| Failure::usage(format!("missing parameter {k}")))
    };
    Ok(match kind {
        PieceArg::Rect => FoliationPiece::Rectangle {
            a: get("a")?,
            b: get("b")?,
            c: get("c")?,
            d: get("d")?,
        },
        PieceArg::Corner => FoliationPiece::CornerRectangle {
            a: get("a")?,
            b: get("b")?,
            c: get("c")?,
            d: get("d")?,
        },
        PieceArg::Parallelogram => FoliationPiece::Parallelogram {
            a: get("a")?,
            b: get("b")?,
            c: get("c")?,
        },
        PieceArg::Trapezoid => FoliationPiece::Trapezoid {
            a: get("a")?,
            a1: get("a1")?,
            d: get("D")?,
        },
    })
}
