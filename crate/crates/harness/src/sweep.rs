//! Sweep specification, runner and the line-delimited report format.
//!
//! A report body is one JSON object per line: every kept violation, sorted,
//! then a `{"summary": ...}` trailer. Wall time is kept out of the body so
//! that equal specs give byte-identical bodies.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use cutlink::{Graph, ViolationReport};
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::Ctx;
use crate::enumerate::{graph_from_edge_mask, item_rng, pair_count, random_graph, MAX_EXHAUSTIVE};
use crate::properties::{Outcome, Property};

/// Default number of configurations checked per graph.
pub const DEFAULT_CAP: u64 = 4096;

const GRAPH_STREAM: u64 = 1;
const CONFIG_STREAM: u64 = 2;

/// Edge probability for random graphs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeProb {
    Fixed(f64),
    /// Drawn uniformly from `[0.1, 0.9]` per graph.
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// Every labeled graph of each order `1..=max_order`.
    Exhaustive { max_order: usize },
    /// `count` graphs with order uniform in `1..=max_order`.
    Random {
        max_order: usize,
        edge_prob: EdgeProb,
        count: u64,
    },
    /// graph6 lines; blank lines and lines starting with `#` are skipped.
    FromFile(PathBuf),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Exhaustive { max_order } => write!(f, "exhaustive:{max_order}"),
            Generator::Random {
                max_order,
                edge_prob,
                count,
            } => match edge_prob {
                EdgeProb::Fixed(p) => write!(f, "random:{max_order},{p},{count}"),
                EdgeProb::Mixed => write!(f, "random:{max_order},mixed,{count}"),
            },
            Generator::FromFile(path) => write!(f, "file:{}", path.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid generator {0:?}; expected exhaustive:N, random:N,P|mixed,COUNT or file:PATH")]
pub struct GeneratorParseError(pub String);

impl Generator {
    /// Parses the `N,P,COUNT` argument of a random generator, where `P` may be
    /// `mixed`.
    pub fn parse_random(s: &str) -> Result<Generator, GeneratorParseError> {
        let err = || GeneratorParseError(s.to_owned());
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [n, p, count] = parts[..] else {
            return Err(err());
        };
        let max_order = n.parse().map_err(|_| err())?;
        let edge_prob = if p == "mixed" {
            EdgeProb::Mixed
        } else {
            let p: f64 = p.parse().map_err(|_| err())?;
            if !(0.0..=1.0).contains(&p) {
                return Err(err());
            }
            EdgeProb::Fixed(p)
        };
        let count = count.parse().map_err(|_| err())?;
        Ok(Generator::Random {
            max_order,
            edge_prob,
            count,
        })
    }
}

impl FromStr for Generator {
    type Err = GeneratorParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || GeneratorParseError(s.to_owned());
        let (kind, arg) = s.split_once(':').ok_or_else(err)?;
        match kind {
            "exhaustive" => Ok(Generator::Exhaustive {
                max_order: arg.parse().map_err(|_| err())?,
            }),
            "random" => Generator::parse_random(arg).map_err(|_| err()),
            "file" if !arg.is_empty() => Ok(Generator::FromFile(arg.into())),
            _ => Err(err()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub generator: Generator,
    pub property: Property,
    /// Configurations per graph; larger spaces are sampled uniformly.
    pub cap: u64,
    pub seed: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("exhaustive enumeration is limited to {MAX_EXHAUSTIVE} vertices, got {0}")]
    InfeasibleExhaustive(usize),
    #[error("property {property} accepts at most {max} vertices, generator asks for {requested}")]
    TooLarge {
        property: Property,
        max: usize,
        requested: usize,
    },
    #[error("random graphs need between 1 and 64 vertices, got {0}")]
    RandomOrder(usize),
    #[error("cap must be positive")]
    ZeroCap,
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: io::Error,
    },
    #[error("{path}:{line}: {source}")]
    Graph6 {
        path: PathBuf,
        line: usize,
        source: cutlink::Graph6Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub property: Property,
    pub generator: String,
    pub seed: u64,
    pub cap: u64,
    pub instances: u64,
    pub applicable: u64,
    pub skipped: u64,
    pub violations: u64,
    pub counters: BTreeMap<String, u64>,
    pub passed: bool,
}

/// One violation line of a report body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub property: Property,
    #[serde(flatten)]
    pub report: ViolationReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SummaryLine {
    summary: Summary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReportLine {
    Violation(ViolationRecord),
    Summary(Summary),
}

/// Parses one line of a report body.
pub fn parse_report_line(line: &str) -> Result<ReportLine, serde_json::Error> {
    let value: serde_json::Value = serde_json::from_str(line)?;
    if value.get("summary").is_some() {
        serde_json::from_value::<SummaryLine>(value).map(|s| ReportLine::Summary(s.summary))
    } else {
        serde_json::from_value(value).map(ReportLine::Violation)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub summary: Summary,
    /// Sorted; at most [`MAX_KEPT_VIOLATIONS`](crate::properties::MAX_KEPT_VIOLATIONS).
    pub violations: Vec<ViolationReport>,
    pub wall_time: Duration,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.summary.violations == 0
    }

    pub fn write_body<W: Write>(&self, mut w: W) -> io::Result<()> {
        for v in &self.violations {
            let rec = ViolationRecord {
                property: self.summary.property,
                report: v.clone(),
            };
            serde_json::to_writer(&mut w, &rec)?;
            w.write_all(b"\n")?;
        }
        let line = SummaryLine {
            summary: self.summary.clone(),
        };
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n")
    }

    pub fn body(&self) -> String {
        let mut buf = Vec::new();
        self.write_body(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }
}

/// Configuration indices to check on one graph: all of them, or `cap`
/// distinct ones drawn uniformly, ascending.
pub fn pick_configs<R: Rng>(space: u128, cap: u64, rng: &mut R) -> Vec<u128> {
    if space <= cap as u128 {
        return (0..space).collect();
    }
    let mut codes: Vec<u128> = if space <= usize::MAX as u128 {
        index::sample(rng, space as usize, cap as usize)
            .into_iter()
            .map(|i| i as u128)
            .collect()
    } else {
        let mut set = std::collections::BTreeSet::new();
        while set.len() < cap as usize {
            set.insert(rng.gen_range(0..space));
        }
        set.into_iter().collect()
    };
    codes.sort_unstable();
    codes
}

fn run_graph(property: Property, g: Graph, cap: u64, seed: u64, index: u64) -> Outcome {
    let mut out = Outcome::default();
    if g.vertex_count() > property.max_order() {
        out.skipped = 1;
        return out;
    }
    let space = property.space(&g);
    let mut rng = item_rng(seed, CONFIG_STREAM, index);
    let codes = pick_configs(space, cap, &mut rng);
    let ctx = Ctx::new(g, codes.len() as u128);
    for code in codes {
        out.instances += 1;
        property.check(&ctx, code, &mut out);
    }
    out.trim();
    out
}

fn fold(outcomes: impl ParallelIterator<Item = Outcome>) -> Outcome {
    outcomes.reduce(Outcome::default, Outcome::merge)
}

fn read_graphs(path: &PathBuf) -> Result<Vec<Graph>, SweepError> {
    let text = std::fs::read_to_string(path).map_err(|source| SweepError::Io {
        path: path.clone(),
        source,
    })?;
    let mut graphs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let g = Graph::from_graph6(line).map_err(|source| SweepError::Graph6 {
            path: path.clone(),
            line: i + 1,
            source,
        })?;
        graphs.push(g);
    }
    Ok(graphs)
}

/// Runs `spec` and returns its report. Deterministic in the spec.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepReport, SweepError> {
    if spec.cap == 0 {
        return Err(SweepError::ZeroCap);
    }
    let start = Instant::now();
    let (property, cap, seed) = (spec.property, spec.cap, spec.seed);
    let too_large = |requested| SweepError::TooLarge {
        property,
        max: property.max_order(),
        requested,
    };
    let mut outcome = match &spec.generator {
        &Generator::Exhaustive { max_order } => {
            if max_order > MAX_EXHAUSTIVE {
                return Err(SweepError::InfeasibleExhaustive(max_order));
            }
            if max_order > property.max_order() {
                return Err(too_large(max_order));
            }
            let mut total = Outcome::default();
            let mut offset = 0u64;
            for n in 1..=max_order {
                let graphs = 1u64 << pair_count(n);
                let base = offset;
                total = total.merge(fold((0..graphs).into_par_iter().map(|mask| {
                    run_graph(property, graph_from_edge_mask(n, mask), cap, seed, base + mask)
                })));
                offset += graphs;
            }
            total
        }
        &Generator::Random {
            max_order,
            edge_prob,
            count,
        } => {
            if !(1..=64).contains(&max_order) {
                return Err(SweepError::RandomOrder(max_order));
            }
            if max_order > property.max_order() {
                return Err(too_large(max_order));
            }
            fold((0..count).into_par_iter().map(|i| {
                let mut rng = item_rng(seed, GRAPH_STREAM, i);
                let n = rng.gen_range(1..=max_order);
                let p = match edge_prob {
                    EdgeProb::Fixed(p) => p,
                    EdgeProb::Mixed => rng.gen_range(0.1..=0.9),
                };
                run_graph(property, random_graph(n, p, &mut rng), cap, seed, i)
            }))
        }
        Generator::FromFile(path) => {
            let graphs = read_graphs(path)?;
            fold(
                graphs
                    .into_par_iter()
                    .enumerate()
                    .map(|(i, g)| run_graph(property, g, cap, seed, i as u64)),
            )
        }
    };
    outcome.finish();
    Ok(SweepReport {
        summary: Summary {
            property,
            generator: spec.generator.to_string(),
            seed,
            cap,
            instances: outcome.instances,
            applicable: outcome.applicable,
            skipped: outcome.skipped,
            violations: outcome.violation_count,
            counters: outcome.counters,
            passed: outcome.violation_count == 0,
        },
        violations: outcome.violations,
        wall_time: start.elapsed(),
    })
}

/// Number of graphs an exhaustive sweep up to `max_order` visits.
pub fn exhaustive_graph_count(max_order: usize) -> u64 {
    (1..=max_order).map(|n| 1u64 << pair_count(n)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;

    fn spec(generator: Generator, property: Property) -> SweepSpec {
        SweepSpec {
            generator,
            property,
            cap: 64,
            seed: 7,
        }
    }

    #[test]
    fn generator_strings() {
        for s in ["exhaustive:5", "random:12,0.5,1000", "random:8,mixed,10", "file:g.g6"] {
            assert_eq!(s.parse::<Generator>().unwrap().to_string(), s);
        }
        for s in ["exhaustive", "random:12,2,5", "random:1,0.5", "walk:3", "file:"] {
            assert!(s.parse::<Generator>().is_err(), "{s}");
        }
    }

    #[test]
    fn pick_configs_is_exhaustive_or_sampled() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        assert_eq!(pick_configs(5, 10, &mut rng), vec![0, 1, 2, 3, 4]);
        let picked = pick_configs(1000, 10, &mut rng);
        assert_eq!(picked.len(), 10);
        assert!(picked.windows(2).all(|w| w[0] < w[1]));
        let huge = pick_configs(u128::MAX / 3, 4, &mut rng);
        assert_eq!(huge.len(), 4);
    }

    #[test]
    fn exhaustive_subeq_small() {
        let r = run_sweep(&spec(Generator::Exhaustive { max_order: 4 }, Property::Subeq)).unwrap();
        assert!(r.passed());
        // orders 1..4: 1 + 2 + 8 + 64 graphs with 4^n configs each (cap 64 hits order 4 only)
        assert_eq!(r.summary.instances, 4 + 2 * 16 + 8 * 64 + 64 * 64);
        assert_eq!(exhaustive_graph_count(4), 75);
    }

    #[test]
    fn infeasible_and_too_large() {
        let bad = spec(Generator::Exhaustive { max_order: 10 }, Property::Subeq);
        assert!(matches!(run_sweep(&bad), Err(SweepError::InfeasibleExhaustive(10))));
        let bad = spec(
            Generator::Random {
                max_order: 30,
                edge_prob: EdgeProb::Mixed,
                count: 1,
            },
            Property::Subconn,
        );
        assert!(matches!(run_sweep(&bad), Err(SweepError::TooLarge { .. })));
    }

    #[test]
    fn report_body_round_trips() {
        let r = run_sweep(&spec(
            Generator::Random {
                max_order: 8,
                edge_prob: EdgeProb::Fixed(0.4),
                count: 20,
            },
            Property::KappaOracleAgreement,
        ))
        .unwrap();
        let mut fake = r.clone();
        fake.violations.push(ViolationReport::new("kappa", &Graph::cycle(5), "x").observe("a", 1));
        let body = fake.body();
        let lines: Vec<_> = body.lines().map(|l| parse_report_line(l).unwrap()).collect();
        assert_eq!(lines.len(), 2);
        assert!(matches!(&lines[0], ReportLine::Violation(v) if v.report == fake.violations[0]));
        assert_eq!(lines[1], ReportLine::Summary(r.summary.clone()));
        assert!(parse_report_line("{\"summary\": 3}").is_err());
        assert!(parse_report_line("not json").is_err());
    }

    #[test]
    fn same_seed_same_body() {
        let s = spec(
            Generator::Random {
                max_order: 7,
                edge_prob: EdgeProb::Mixed,
                count: 50,
            },
            Property::JointOptionNonempty,
        );
        let a = run_sweep(&s).unwrap();
        let b = run_sweep(&s).unwrap();
        assert_eq!(a.body(), b.body());
        let c = run_sweep(&SweepSpec { seed: 8, ..s }).unwrap();
        assert_ne!(a.summary, c.summary);
    }

    #[test]
    fn from_file_skips_comments() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.g6");
        std::fs::write(&path, "# five-cycle and a triangle\nDhc\n\nBw\n").unwrap();
        let r = run_sweep(&spec(Generator::FromFile(path.clone()), Property::Graph6Roundtrip)).unwrap();
        assert_eq!(r.summary.instances, 2);
        assert!(r.passed());
        std::fs::write(&path, "Dhc\n!!\n").unwrap();
        assert!(matches!(
            run_sweep(&spec(Generator::FromFile(path), Property::Graph6Roundtrip)),
            Err(SweepError::Graph6 { line: 2, .. })
        ));
    }
}
