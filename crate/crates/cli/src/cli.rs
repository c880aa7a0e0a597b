//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use zgraphon_core::moments::{compare_pair, predicted_star_gap, standard_suite};
use zgraphon_core::spectral::hilbert_schmidt_norm_sq;
use zgraphon_core::transforms::TWIN_TOL;
use zgraphon_core::{
    anchored_graphon, carleman_report, density, eigendecomp, lift_check, marginal, matched_pair, moment, path_kernel,
    product_identity_residual, quotient, regularity_check, sample_anchors, twin_partition, twin_reduce, Anchoring,
    CarlemanReport, CarlemanSource, DecoratedMultigraph, Matrix, StepGraphon,
};

use crate::error::CliError;
use crate::format::{self, GraphonDoc, MomentsDoc, PartitionDoc};
use crate::parallel;

#[derive(Debug, Parser)]
#[command(
    name = "zgraphon",
    version,
    about = "Densities, transforms and moment checks for measure-valued step graphons"
)]
pub struct Cli {
    /// Write output here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GraphonArg {
    #[arg(long, value_name = "PATH")]
    pub graphon: PathBuf,
}

#[derive(Debug, Args)]
pub struct GraphonGraphArgs {
    #[arg(long, value_name = "PATH")]
    pub graphon: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub graph: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Variable elimination.
    Exact,
    /// Sum over every class assignment, split across workers.
    Enumerate,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Homomorphism density t(F, W) of an unlabeled graph.
    Density {
        #[command(flatten)]
        io: GraphonGraphArgs,
        #[arg(long, value_enum, default_value = "exact")]
        method: Method,
    },
    /// Labeled density with each label pinned to a class.
    Marginal {
        #[command(flatten)]
        io: GraphonGraphArgs,
        /// `LABEL=CLASS`, once per label.
        #[arg(long = "anchor", value_name = "LABEL=CLASS", value_parser = parse_anchor)]
        anchors: Vec<(u32, usize)>,
    },
    /// Monte Carlo estimate of t(F, W).
    Mc {
        #[command(flatten)]
        io: GraphonGraphArgs,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Independent substreams; the estimate depends on this, not on the worker count.
        #[arg(long, default_value_t = 1)]
        streams: usize,
    },
    /// The p-norm of W.
    Pnorm {
        #[command(flatten)]
        g: GraphonArg,
        #[arg(long)]
        p: f64,
    },
    /// Carleman partial sums and classification.
    Carleman {
        #[arg(long, value_name = "PATH", conflicts_with = "moments")]
        graphon: Option<PathBuf>,
        /// Moment document: `distribution`, `moments` or `log_moments`.
        #[arg(long, value_name = "PATH")]
        moments: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Report every k from `--k` up to this value.
        #[arg(long)]
        kmax: Option<u32>,
        #[arg(long, default_value_t = 100)]
        terms: usize,
    },
    /// The real kernel of one functional.
    Kernel {
        #[command(flatten)]
        g: GraphonArg,
        #[arg(long)]
        psi: String,
    },
    /// Quotient by a partition of the classes.
    Quotient {
        #[command(flatten)]
        g: GraphonArg,
        #[arg(long, value_name = "PATH")]
        partition: PathBuf,
    },
    /// Twin partition of the classes.
    Twins {
        #[command(flatten)]
        g: GraphonArg,
        #[arg(long, default_value_t = TWIN_TOL)]
        tol: f64,
    },
    /// Twin-free reduction.
    Reduce {
        #[command(flatten)]
        g: GraphonArg,
        #[arg(long, default_value_t = TWIN_TOL)]
        tol: f64,
    },
    /// Anchored graphon from kernel values at anchor classes.
    Anchor {
        #[command(flatten)]
        g: GraphonArg,
        #[command(flatten)]
        anchors: AnchorArgs,
    },
    /// Whether the anchors separate every pair of non-twin classes.
    Regularity {
        #[command(flatten)]
        g: GraphonArg,
        #[command(flatten)]
        anchors: AnchorArgs,
    },
    /// Eigenvalues and eigenfunctions of the kernel operator.
    Eigen {
        #[command(flatten)]
        g: GraphonArg,
        #[arg(long)]
        psi: String,
    },
    /// Kernel of the k-edge path between its endpoints.
    Pathkernel {
        #[command(flatten)]
        g: GraphonArg,
        #[arg(long)]
        psi: String,
        #[arg(long)]
        k: usize,
    },
    /// Replace one edge u-v by paths of length 1..kmax and compare spectral and direct densities.
    Liftcheck {
        #[command(flatten)]
        io: GraphonGraphArgs,
        /// Second graphon; defaults to the first.
        #[arg(long, value_name = "PATH")]
        other: Option<PathBuf>,
        #[arg(long)]
        u: usize,
        #[arg(long)]
        v: usize,
        #[arg(long)]
        psi: String,
        #[arg(long, default_value_t = 6)]
        kmax: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Two distributions on {0..N} sharing moments up to order D.
    Momentpair {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Density comparison of the rank-one graphons of a matched pair.
    Counterexample {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Residual of the labeled product identity.
    Productcheck {
        #[command(flatten)]
        io: GraphonGraphArgs,
        #[arg(long, value_name = "PATH")]
        other_graph: PathBuf,
    },
    /// Load and check documents.
    Validate {
        #[arg(long, value_name = "PATH")]
        graphon: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        graph: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// N: the distributions live on {0..N}.
    #[arg(long)]
    pub support: usize,
    /// D: moments 0..=D agree.
    #[arg(long)]
    pub order: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct AnchorArgs {
    /// Anchor classes, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "count")]
    pub anchors: Vec<usize>,
    /// Draw this many anchors from the class masses instead.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Functional ids to use; all of them when omitted.
    #[arg(long)]
    pub psi: Vec<String>,
}

fn parse_anchor(s: &str) -> Result<(u32, usize), String> {
    let (l, c) = s.split_once('=').ok_or("expected LABEL=CLASS")?;
    let l = l.trim().parse().map_err(|_| format!("bad label `{l}`"))?;
    let c = c.trim().parse().map_err(|_| format!("bad class `{c}`"))?;
    Ok((l, c))
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command).and_then(|text| emit(cli.out.as_deref(), &text)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io(format!("standard output: {e}")))
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Flag checks that need no files; run before anything is loaded.
fn check_flags(cmd: &Command) -> Result<(), CliError> {
    let tol =
        |t: f64| if t.is_finite() && t >= 0.0 { Ok(()) } else { Err(usage("--tol must be finite and nonnegative")) };
    match cmd {
        Command::Mc { samples, streams, .. } => {
            if *samples == 0 {
                return Err(usage("--samples must be at least 1"));
            }
            if *streams == 0 {
                return Err(usage("--streams must be at least 1"));
            }
        }
        Command::Pnorm { p, .. } => {
            if !(p.is_finite() && *p >= 1.0) {
                return Err(usage("--p must be a finite number ≥ 1"));
            }
        }
        Command::Carleman { graphon, moments, k, kmax, terms } => {
            if graphon.is_none() == moments.is_none() {
                return Err(usage("give exactly one of --graphon, --moments"));
            }
            if *k == 0 || kmax.is_some_and(|m| m < *k) {
                return Err(usage("need 1 ≤ --k ≤ --kmax"));
            }
            if *terms == 0 {
                return Err(usage("--terms must be at least 1"));
            }
        }
        Command::Twins { tol: t, .. } | Command::Reduce { tol: t, .. } => tol(*t)?,
        Command::Anchor { anchors, .. } | Command::Regularity { anchors, .. } => {
            if anchors.anchors.is_empty() && anchors.count.is_none() {
                return Err(usage("give --anchors or --count"));
            }
        }
        Command::Pathkernel { k, .. } => {
            if *k == 0 {
                return Err(usage("--k must be at least 1"));
            }
        }
        Command::Liftcheck { kmax, tol: t, .. } => {
            if *kmax < 2 {
                return Err(usage("--kmax must be at least 2"));
            }
            tol(*t)?;
        }
        Command::Momentpair { pair } | Command::Counterexample { pair } => {
            if pair.support < pair.order + 1 {
                return Err(usage("--support must be at least --order + 1"));
            }
        }
        Command::Validate { graphon: None, graph: None } => return Err(usage("give --graphon, --graph or both")),
        _ => {}
    }
    Ok(())
}

fn load_graphon(path: &Path) -> Result<StepGraphon, CliError> {
    format::load(path, format::parse_graphon)
}

fn load_graph(path: &Path) -> Result<DecoratedMultigraph, CliError> {
    format::load(path, format::parse_graph)
}

fn load_pair(io: &GraphonGraphArgs) -> Result<(StepGraphon, DecoratedMultigraph), CliError> {
    let w = load_graphon(&io.graphon)?;
    let g = load_graph(&io.graph)?;
    w.check_decorations(&g).map_err(|e| CliError::from(e).in_file(&io.graph))?;
    Ok((w, g))
}

fn num(x: f64) -> Value {
    json!(format::sig12(x))
}

fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn matrix(m: &Matrix) -> Value {
    Value::Array((0..m.rows()).map(|i| nums(m.row(i))).collect())
}

fn render(v: &Value) -> String {
    format::to_json(v)
}

fn anchors_for(w: &StepGraphon, a: &AnchorArgs) -> Result<(Vec<usize>, Vec<String>), CliError> {
    let anchors = match a.count {
        Some(n) => sample_anchors(w, n, a.seed)?,
        None => a.anchors.clone(),
    };
    let ids = if a.psi.is_empty() { w.functional_ids() } else { a.psi.clone() };
    Ok((anchors, ids))
}

fn carleman_json(r: &CarlemanReport) -> Value {
    json!({
        "k": r.k,
        "terms": nums(&r.terms),
        "partial_sums": nums(&r.partial_sums),
        "growth_fit": num(r.growth_fit),
        "classification": r.classification.as_str(),
        "lower_bound": r.lower_bound.map(num),
    })
}

/// Runs one command to completion and returns its whole output.
pub fn execute(cmd: &Command) -> Result<String, CliError> {
    check_flags(cmd)?;
    let workers = parallel::workers_from_env()?;
    let out = match cmd {
        Command::Density { io, method } => {
            let (w, g) = load_pair(io)?;
            let t = match method {
                Method::Exact => density(&g, &w)?,
                Method::Enumerate => parallel::density_enumerate(&g, &w, workers)?,
            };
            format!("{}\n", format::scalar(t))
        }
        Command::Marginal { io, anchors } => {
            let (w, g) = load_pair(io)?;
            let beta: Anchoring = anchors.iter().copied().collect();
            format!("{}\n", format::scalar(marginal(&g, &w, &beta)?))
        }
        Command::Mc { io, samples, seed, streams } => {
            let (w, g) = load_pair(io)?;
            let est = parallel::mc_density(&g, &w, *samples, *seed, *streams, workers)?;
            render(&json!({
                "mean": num(est.mean),
                "stderr": num(est.stderr),
                "samples": est.samples,
                "seed": est.seed,
                "streams": streams,
            }))
        }
        Command::Pnorm { g, p } => format!("{}\n", format::scalar(load_graphon(&g.graphon)?.p_norm(*p)?)),
        Command::Carleman { graphon, moments, k, kmax, terms } => {
            let ks: Vec<u32> = (*k..=kmax.unwrap_or(*k)).collect();
            let reports = match (graphon, moments) {
                (Some(path), _) => {
                    let w = load_graphon(path)?;
                    ks.iter()
                        .map(|&k| carleman_report(CarlemanSource::Graphon(&w), k, *terms))
                        .collect::<Result<Vec<_>, _>>()?
                }
                (None, Some(path)) => {
                    let doc: MomentsDoc = format::load(path, format::from_json)?;
                    let top = 2 * terms * *ks.last().unwrap() as usize;
                    let seq = doc.to_sequence(top).map_err(|e| e.in_file(path))?;
                    ks.iter()
                        .map(|&k| carleman_report(CarlemanSource::Moments(&seq), k, *terms))
                        .collect::<Result<Vec<_>, _>>()?
                }
                (None, None) => unreachable!("checked in check_flags"),
            };
            render(&Value::Array(reports.iter().map(carleman_json).collect()))
        }
        Command::Kernel { g, psi } => {
            let kernel = load_graphon(&g.graphon)?.kernel(psi)?;
            render(&json!({ "psi": psi, "matrix": matrix(&kernel.matrix) }))
        }
        Command::Quotient { g, partition } => {
            let w = load_graphon(&g.graphon)?;
            let p = format::load(partition, format::parse_partition)?;
            format::serialize_graphon(&quotient(&w, &p)?)
        }
        Command::Twins { g, tol } => {
            let p = twin_partition(&load_graphon(&g.graphon)?, *tol);
            format::to_json(&PartitionDoc::from_partition(&p))
        }
        Command::Reduce { g, tol } => format::serialize_graphon(&twin_reduce(&load_graphon(&g.graphon)?, *tol)),
        Command::Anchor { g, anchors } => {
            let w = load_graphon(&g.graphon)?;
            let (anchors, ids) = anchors_for(&w, anchors)?;
            let (fm, reduced) = anchored_graphon(&w, &anchors, &ids)?;
            let doc = serde_json::to_value(GraphonDoc::from_graphon(&reduced)).expect("documents serialize");
            render(&json!({
                "anchors": fm.anchors,
                "functionals": fm.functional_ids,
                "features": fm.features,
                "class_of": fm.partition.class_of(),
                "graphon": doc,
            }))
        }
        Command::Regularity { g, anchors } => {
            let w = load_graphon(&g.graphon)?;
            let (anchors, ids) = anchors_for(&w, anchors)?;
            format!("{}\n", regularity_check(&w, &anchors, &ids)?)
        }
        Command::Eigen { g, psi } => {
            let w = load_graphon(&g.graphon)?;
            let sys = eigendecomp(&w, psi)?;
            let functions: Vec<Value> = (0..sys.eigenvalues.len()).map(|n| nums(&sys.eigenfunction(n))).collect();
            render(&json!({
                "psi": psi,
                "eigenvalues": nums(&sys.eigenvalues),
                "eigenfunctions": functions,
                "hilbert_schmidt_sq": num(hilbert_schmidt_norm_sq(&w, psi)?),
                "reconstruction_residual": num(sys.reconstruction_residual()),
            }))
        }
        Command::Pathkernel { g, psi, k } => {
            let m = path_kernel(&load_graphon(&g.graphon)?, psi, *k)?;
            render(&json!({ "psi": psi, "k": k, "matrix": matrix(&m) }))
        }
        Command::Liftcheck { io, other, u, v, psi, kmax, tol } => {
            let (w1, g) = load_pair(io)?;
            let w2 = match other {
                Some(path) => load_graphon(path)?,
                None => w1.clone(),
            };
            let r = lift_check(&g, *u, *v, psi, &w1, &w2, *kmax, *tol)?;
            let side = |s: &zgraphon_core::spectral::LiftSide| {
                json!({
                    "eigenvalues": nums(&s.eigenvalues),
                    "coefficients": nums(&s.coefficients),
                    "direct": nums(&s.direct),
                    "spectral": nums(&s.spectral),
                    "max_discrepancy": num(s.max_discrepancy),
                })
            };
            let groups: Vec<Value> = r
                .groups
                .iter()
                .map(|gc| json!({ "eigenvalue": num(gc.eigenvalue), "first": num(gc.first), "second": num(gc.second) }))
                .collect();
            render(&json!({
                "first": side(&r.first),
                "second": side(&r.second),
                "max_discrepancy": num(r.max_discrepancy),
                "lifted_densities_match": r.lifted_densities_match,
                "groups": groups,
                "grouped_coefficients_agree": r.grouped_coefficients_agree,
                "densities_agree": r.densities_agree,
            }))
        }
        Command::Momentpair { pair } => {
            let mp = matched_pair(pair.support, pair.order, pair.seed)?;
            let top = pair.order as u32 + 1;
            let mp_moments = |d: &[f64]| (0..=top).map(|r| moment(d, r)).collect::<Result<Vec<_>, _>>();
            render(&json!({
                "support": mp.support,
                "order": mp.order,
                "seed": mp.seed,
                "p": nums(&mp.p),
                "q": nums(&mp.q),
                "epsilon": num(mp.epsilon),
                "null_vector": nums(&mp.null_vector),
                "moments_p": nums(&mp_moments(&mp.p)?),
                "moments_q": nums(&mp_moments(&mp.q)?),
            }))
        }
        Command::Counterexample { pair } => {
            let mp = matched_pair(pair.support, pair.order, pair.seed)?;
            let suite = standard_suite(pair.order);
            let predicted = predicted_star_gap(&mp)?;
            let r = compare_pair(mp, &suite)?;
            let rows: Vec<Value> = r
                .graphs_tested
                .iter()
                .map(|row| {
                    json!({
                        "name": row.name,
                        "max_degree": row.max_degree,
                        "density_p": num(row.density_p),
                        "density_q": num(row.density_q),
                        "gap": num(row.gap),
                    })
                })
                .collect();
            render(&json!({
                "support": r.pair.support,
                "order": r.pair.order,
                "seed": r.pair.seed,
                "p": nums(&r.pair.p),
                "q": nums(&r.pair.q),
                "epsilon": num(r.pair.epsilon),
                "graphs": rows,
                "max_discrepancy_low_degree": num(r.max_discrepancy_low_degree),
                "witness": r.witness_name,
                "witness_gap": num(r.witness_gap),
                "predicted_witness_gap": num(predicted),
                "holds": r.holds(),
            }))
        }
        Command::Productcheck { io, other_graph } => {
            let (w, f1) = load_pair(io)?;
            let f2 = load_graph(other_graph)?;
            w.check_decorations(&f2).map_err(|e| CliError::from(e).in_file(other_graph))?;
            format!("{}\n", format::scalar(product_identity_residual(&f1, &f2, &w)?))
        }
        Command::Validate { graphon, graph } => {
            let w = graphon.as_deref().map(load_graphon).transpose()?;
            let g = graph.as_deref().map(load_graph).transpose()?;
            if let (Some(w), Some(g), Some(path)) = (&w, &g, graph) {
                w.check_decorations(g).map_err(|e| CliError::from(e).in_file(path))?;
            }
            "ok\n".to_string()
        }
    };
    Ok(out)
}
