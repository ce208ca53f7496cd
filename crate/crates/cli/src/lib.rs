//! The `cutlink` command line: argument parsing and command execution.
//!
//! Every command prints one JSON object per line on standard output. Vertex
//! sets appear as `{"ids": [...], "mask": "0x..."}`. Exit status is 0 on
//! success, 1 on a usage error and 2 when a guarantee fails, in which case the
//! violation report is written to a file whose path goes to standard error.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use cutlink::{
    cut_rank, find_doubly_good_vertex, find_via_terminal_reduction, is_flexible, joint_good_options,
    kappa, single_pair_options, reduce_preserving, separating_chain, Graph, LinkingError,
    LinkingInstance, OptionSet, Vertex, VertexSet, ViolationReport, MAX_VERTICES,
};
use cutlink_harness::{run_sweep, tightness_search, Generator, Property, SweepReport, SweepSpec, DEFAULT_CAP};
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

/// Where single-instance violation reports go when `--out` is not given.
pub const DEFAULT_VIOLATION_PATH: &str = "cutlink-violation.jsonl";

#[derive(Debug, Parser)]
#[command(name = "cutlink", version, about = "Cut-rank connectivity and vertex-minor linking queries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cut-rank of a vertex set.
    Cutrank {
        #[command(flatten)]
        graph: GraphArg,
        /// The set X.
        #[arg(short = 'x', long = "set", value_parser = parse_set)]
        x: VertexSet,
    },
    /// Connectivity κ(S,T) with its smallest minimizing set.
    Kappa {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        pair: StPair,
    },
    /// Reductions at a vertex that keep κ(Q,R), or both κ(Q,R) and κ(S,T)
    /// when -s and -t are given.
    Options {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        pair: QrPair,
        #[arg(short = 's', value_parser = parse_set, requires = "t")]
        s: Option<VertexSet>,
        #[arg(short = 't', value_parser = parse_set, requires = "s")]
        t: Option<VertexSet>,
        #[arg(short = 'v', long = "vertex")]
        v: Vertex,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Whether all three reductions at a vertex keep κ(S,T).
    Flexible {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        pair: StPair,
        #[arg(short = 'v', long = "vertex")]
        v: Vertex,
    },
    /// Nested separating sets for the non-flexible vertices outside S ∪ T.
    Chain {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        pair: StPair,
        /// Vertices to order; defaults to every non-flexible one.
        #[arg(short = 'f', long = "free", value_parser = parse_set)]
        f: Option<VertexSet>,
    },
    /// Removes free vertices while keeping both connectivities.
    Reduce {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        pairs: TwoPairs,
        /// Vertices to remove; defaults to every free vertex.
        #[arg(long, value_parser = parse_set)]
        drop: Option<VertexSet>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lowest free vertex with at least two reductions keeping both
    /// connectivities.
    FindVertex {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        pairs: TwoPairs,
        /// Shrink S and T first and search the reduced instance.
        #[arg(long)]
        via_shrink: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks a property over enumerated, random or listed graphs.
    Sweep {
        #[arg(long, value_parser = parse_property)]
        property: Property,
        #[command(flatten)]
        source: SweepSource,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Configurations checked per graph.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        /// Report file; the report goes to standard output otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Samples instances below the size bound looking for ones without a
    /// doubly-good vertex.
    Tightness {
        #[arg(short = 'k', default_value_t = 0)]
        k: usize,
        #[arg(short = 'l', default_value_t = 0)]
        l: usize,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct GraphArg {
    /// graph6 string or @file; read from standard input when absent.
    #[arg(short = 'g', long = "graph")]
    pub graph: Option<String>,
}

#[derive(Debug, Args)]
pub struct StPair {
    #[arg(short = 's', value_parser = parse_set)]
    pub s: VertexSet,
    #[arg(short = 't', value_parser = parse_set)]
    pub t: VertexSet,
}

#[derive(Debug, Args)]
pub struct QrPair {
    #[arg(short = 'q', value_parser = parse_set)]
    pub q: VertexSet,
    #[arg(short = 'r', value_parser = parse_set)]
    pub r: VertexSet,
}

#[derive(Debug, Args)]
pub struct TwoPairs {
    #[arg(short = 'q', value_parser = parse_set)]
    pub q: VertexSet,
    #[arg(short = 'r', value_parser = parse_set)]
    pub r: VertexSet,
    #[arg(short = 's', value_parser = parse_set)]
    pub s: VertexSet,
    #[arg(short = 't', value_parser = parse_set)]
    pub t: VertexSet,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SweepSource {
    /// Every labeled graph on up to N vertices.
    #[arg(long, value_name = "N")]
    pub exhaustive: Option<usize>,
    /// COUNT random graphs on up to N vertices with edge probability P
    /// (`mixed` draws P per graph).
    #[arg(long, value_name = "N,P,COUNT", value_parser = parse_random)]
    pub random: Option<Generator>,
    /// graph6 file, one graph per line.
    #[arg(long, value_name = "PATH")]
    pub file: Option<PathBuf>,
}

impl SweepSource {
    fn generator(&self) -> Generator {
        match (self.exhaustive, &self.random, &self.file) {
            (Some(max_order), _, _) => Generator::Exhaustive { max_order },
            (_, Some(g), _) => g.clone(),
            (_, _, Some(p)) => Generator::FromFile(p.clone()),
            _ => unreachable!("clap requires one source"),
        }
    }
}

/// Parses `0,2,5` (or `0x25` as a mask). The empty string is the empty set.
pub fn parse_set(s: &str) -> Result<VertexSet, String> {
    let s = s.trim();
    if s.starts_with("0x") {
        return VertexSet::from_hex(s).ok_or_else(|| format!("invalid mask {s:?}"));
    }
    let mut set = VertexSet::EMPTY;
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let v: Vertex = part
            .parse()
            .map_err(|_| format!("{part:?} is not a vertex id"))?;
        if v >= MAX_VERTICES {
            return Err(format!("vertex id {v} exceeds {}", MAX_VERTICES - 1));
        }
        set = set.with(v);
    }
    Ok(set)
}

fn parse_property(s: &str) -> Result<Property, String> {
    s.parse().map_err(|e: cutlink_harness::UnknownProperty| e.to_string())
}

fn parse_random(s: &str) -> Result<Generator, String> {
    Generator::parse_random(s).map_err(|e| e.to_string())
}

/// Ids plus hex mask.
pub fn set_json(s: VertexSet) -> Value {
    json!({ "ids": s.to_vec(), "mask": s.to_hex() })
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Violation(Vec<ViolationReport>),
    /// A sweep whose full report, violations included, is already at the path.
    SweepViolation(u64, PathBuf),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<LinkingError> for Failure {
    fn from(e: LinkingError) -> Self {
        match e {
            LinkingError::TheoremViolation(rep) => Failure::Violation(vec![*rep]),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<cutlink::ConnError> for Failure {
    fn from(e: cutlink::ConnError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn disjoint(named: &[(&str, VertexSet)]) -> Result<(), Failure> {
    for (i, &(a, x)) in named.iter().enumerate() {
        for &(b, y) in &named[i + 1..] {
            let both = x & y;
            if !both.is_empty() {
                return Err(usage(format!("overlapping sets: -{a} and -{b} share {{{both}}}")));
            }
        }
    }
    Ok(())
}

fn read_graph(arg: &GraphArg, stdin: &mut dyn Read) -> Result<Graph, Failure> {
    let (text, origin) = match arg.graph.as_deref() {
        Some(path) if path.starts_with('@') => {
            let text = fs::read_to_string(&path[1..]).map_err(|e| usage(format!("-g {path}: {e}")))?;
            (text, path.to_owned())
        }
        Some(g6) => (g6.to_owned(), "-g".to_owned()),
        None => {
            let mut text = String::new();
            stdin
                .read_to_string(&mut text)
                .map_err(|e| usage(format!("reading standard input: {e}")))?;
            (text, "standard input".to_owned())
        }
    };
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .ok_or_else(|| usage(format!("{origin}: no graph given")))?;
    Graph::from_graph6(line).map_err(|e| usage(format!("{origin}: malformed graph6: {e}")))
}

fn within(g: &Graph, named: &[(&str, VertexSet)]) -> Result<(), Failure> {
    for &(name, x) in named {
        let outside = x - g.vertices();
        if !outside.is_empty() {
            return Err(usage(format!(
                "-{name}: {{{outside}}} not in a graph on {} vertices",
                g.vertex_count()
            )));
        }
    }
    Ok(())
}

fn emit(out: &mut dyn Write, value: &Value) -> io::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    out.write_all(b"\n")
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                return EXIT_USAGE;
            }
            let _ = out.write_all(text.as_bytes());
            return EXIT_OK;
        }
    };
    let out_path = match &cli.command {
        Command::Options { out, .. }
        | Command::Reduce { out, .. }
        | Command::FindVertex { out, .. }
        | Command::Tightness { out, .. } => out.clone(),
        _ => None,
    };
    let result = execute(cli.command, stdin, out);
    exit_code(result, out_path, err)
}

fn exit_code(result: Result<(), Failure>, out_path: Option<PathBuf>, err: &mut dyn Write) -> i32 {
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
        Err(Failure::SweepViolation(count, path)) => {
            let _ = writeln!(err, "theorem violation: {count} violation(s), report at {}", path.display());
            EXIT_VIOLATION
        }
        Err(Failure::Violation(reports)) => {
            let path = out_path.unwrap_or_else(|| PathBuf::from(DEFAULT_VIOLATION_PATH));
            if let Err(e) = write_reports(&path, &reports) {
                let _ = writeln!(err, "error: writing {}: {e}", path.display());
            }
            let _ = writeln!(
                err,
                "theorem violation: {} report(s) written to {}",
                reports.len(),
                path.display()
            );
            EXIT_VIOLATION
        }
    }
}

fn write_reports(path: &Path, reports: &[ViolationReport]) -> io::Result<()> {
    let mut f = io::BufWriter::new(fs::File::create(path)?);
    for r in reports {
        serde_json::to_writer(&mut f, r)?;
        f.write_all(b"\n")?;
    }
    f.flush()
}

fn write_body(report: &SweepReport, path: &Path) -> Result<(), Failure> {
    let f = fs::File::create(path).map_err(|e| usage(format!("--out {}: {e}", path.display())))?;
    let mut w = io::BufWriter::new(f);
    report.write_body(&mut w)?;
    w.flush()?;
    Ok(())
}

fn instance(g: Graph, p: &TwoPairs) -> Result<LinkingInstance, Failure> {
    disjoint(&[("q", p.q), ("r", p.r)])?;
    disjoint(&[("s", p.s), ("t", p.t)])?;
    within(&g, &[("q", p.q), ("r", p.r), ("s", p.s), ("t", p.t)])?;
    Ok(LinkingInstance::new(g, p.q, p.r, p.s, p.t)?)
}

fn found_json(found: Option<(Vertex, OptionSet)>) -> Value {
    match found {
        Some((v, opts)) => json!({ "vertex": v, "options": opts }),
        None => json!({ "vertex": null, "options": [] }),
    }
}

fn execute(cmd: Command, stdin: &mut dyn Read, out: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Cutrank { graph, x } => {
            let g = read_graph(&graph, stdin)?;
            within(&g, &[("x", x)])?;
            emit(out, &json!({ "x": set_json(x), "cut_rank": cut_rank(&g, x) }))?;
        }
        Command::Kappa { graph, pair } => {
            disjoint(&[("s", pair.s), ("t", pair.t)])?;
            let g = read_graph(&graph, stdin)?;
            within(&g, &[("s", pair.s), ("t", pair.t)])?;
            let res = kappa(&g, pair.s, pair.t)?;
            emit(
                out,
                &json!({
                    "s": set_json(pair.s),
                    "t": set_json(pair.t),
                    "kappa": res.value,
                    "witness": set_json(res.witness),
                }),
            )?;
        }
        Command::Options { graph, pair, s, t, v, .. } => {
            disjoint(&[("q", pair.q), ("r", pair.r)])?;
            let g = read_graph(&graph, stdin)?;
            let opts = match (s, t) {
                (Some(s), Some(t)) => {
                    let inst = instance(g, &TwoPairs { q: pair.q, r: pair.r, s, t })?;
                    joint_good_options(&inst, v)?
                }
                _ => {
                    within(&g, &[("q", pair.q), ("r", pair.r)])?;
                    single_pair_options(&g, pair.q, pair.r, v)?
                }
            };
            emit(out, &json!({ "vertex": v, "options": opts }))?;
        }
        Command::Flexible { graph, pair, v } => {
            disjoint(&[("s", pair.s), ("t", pair.t)])?;
            let g = read_graph(&graph, stdin)?;
            within(&g, &[("s", pair.s), ("t", pair.t)])?;
            let flexible = is_flexible(&g, pair.s, pair.t, v)?;
            emit(out, &json!({ "vertex": v, "flexible": flexible }))?;
        }
        Command::Chain { graph, pair, f } => {
            disjoint(&[("s", pair.s), ("t", pair.t)])?;
            let g = read_graph(&graph, stdin)?;
            within(&g, &[("s", pair.s), ("t", pair.t)])?;
            let f = match f {
                Some(f) => f,
                None => {
                    let mut f = VertexSet::EMPTY;
                    for v in g.vertices() - pair.s - pair.t {
                        if !is_flexible(&g, pair.s, pair.t, v)? {
                            f = f.with(v);
                        }
                    }
                    f
                }
            };
            let chain = separating_chain(&g, pair.s, pair.t, f)?;
            let sets: Vec<Value> = chain.sets.iter().map(|&a| set_json(a)).collect();
            emit(
                out,
                &json!({ "kappa": kappa(&g, pair.s, pair.t)?.value, "order": chain.order, "sets": sets }),
            )?;
        }
        Command::Reduce { graph, pairs, drop, .. } => {
            let g = read_graph(&graph, stdin)?;
            let inst = instance(g, &pairs)?;
            let drop = drop.unwrap_or_else(|| inst.free());
            let red = reduce_preserving(&inst, drop)?;
            let steps: Vec<Value> = red
                .steps
                .iter()
                .map(|&(v, kind)| json!({ "vertex": v, "reduction": kind.to_string() }))
                .collect();
            emit(
                out,
                &json!({
                    "steps": steps,
                    "graph6": red.graph.to_graph6(),
                    "vertices": set_json(red.graph.vertices()),
                    "k": inst.k(),
                    "l": inst.l(),
                }),
            )?;
        }
        Command::FindVertex { graph, pairs, via_shrink, .. } => {
            let g = read_graph(&graph, stdin)?;
            let inst = instance(g, &pairs)?;
            let found = if via_shrink {
                find_via_terminal_reduction(&inst)?
            } else {
                find_doubly_good_vertex(&inst)?
            };
            let mut line = found_json(found);
            line["k"] = json!(inst.k());
            line["l"] = json!(inst.l());
            line["free"] = set_json(inst.free());
            emit(out, &line)?;
        }
        Command::Sweep { property, source, seed, cap, out: path } => {
            let spec = SweepSpec {
                generator: source.generator(),
                property,
                cap,
                seed,
            };
            let report = run_sweep(&spec).map_err(|e| usage(e.to_string()))?;
            let written = match path {
                Some(p) => {
                    write_body(&report, &p)?;
                    emit(out, &json!({ "summary": report.summary, "report": p }))?;
                    p
                }
                None => {
                    report.write_body(&mut *out)?;
                    let p = PathBuf::from(DEFAULT_VIOLATION_PATH);
                    if !report.passed() {
                        write_body(&report, &p)?;
                    }
                    p
                }
            };
            if !report.passed() {
                return Err(Failure::SweepViolation(report.summary.violations, written));
            }
        }
        Command::Tightness { k, l, budget, seed, .. } => {
            let report = tightness_search(k, l, budget, seed);
            emit(out, &serde_json::to_value(&report).expect("report serializes"))?;
            if !report.violations.is_empty() {
                return Err(Failure::Violation(report.violations));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_literals() {
        assert_eq!(parse_set("").unwrap(), VertexSet::EMPTY);
        assert_eq!(parse_set("2,0,5").unwrap().to_vec(), vec![0, 2, 5]);
        assert_eq!(parse_set(" 1 , 3 ").unwrap().to_vec(), vec![1, 3]);
        assert_eq!(parse_set("0x5").unwrap().to_vec(), vec![0, 2]);
        assert!(parse_set("1,a").is_err());
        assert!(parse_set("-1").is_err());
        assert!(parse_set("64").is_err());
        assert!(parse_set("0xzz").is_err());
    }

    #[test]
    fn overlap_is_named() {
        let a = parse_set("0,1").unwrap();
        let b = parse_set("1").unwrap();
        match disjoint(&[("s", a), ("t", b)]) {
            Err(Failure::Usage(msg)) => assert!(msg.contains("-s and -t"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(disjoint(&[("s", a), ("t", parse_set("2").unwrap())]).is_ok());
    }

    #[test]
    fn set_json_has_ids_and_mask() {
        let v = set_json(parse_set("0,3").unwrap());
        assert_eq!(v, json!({ "ids": [0, 3], "mask": "0x9" }));
    }

    #[test]
    fn violation_writes_report_and_exits_two() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.jsonl");
        let rep = ViolationReport::new("find_doubly_good_vertex", &Graph::path(3), "something");
        let mut err = Vec::new();
        let code = exit_code(Err(LinkingError::TheoremViolation(Box::new(rep.clone())).into()), Some(path.clone()), &mut err);
        assert_eq!(code, EXIT_VIOLATION);
        assert!(String::from_utf8(err).unwrap().contains(&path.display().to_string()));
        let written: ViolationReport = serde_json::from_str(fs::read_to_string(&path).unwrap().trim()).unwrap();
        assert_eq!(written, rep);
    }

    #[test]
    fn non_violation_errors_are_usage_errors() {
        let mut err = Vec::new();
        let code = exit_code(Err(LinkingError::NotFree(3).into()), None, &mut err);
        assert_eq!(code, EXIT_USAGE);
    }
}
