//! The checked properties. Each one has a per-graph configuration space
//! (terminal sets, a vertex, an edge, ...) indexed by integers; the sweep
//! runner picks configurations and [`Property::check`] evaluates one.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use cutlink::{
    find_doubly_good_vertex, find_via_terminal_reduction, is_separating, joint_good_options, kappa,
    kappa_bruteforce, doubly_good_bound, nesting_step, single_pair_options, pivot_only_options,
    reduce_preserving, separating_chain, shrink_terminals, Graph, LinkingError, LinkingInstance,
    NestingOutcome, OptionSet, ReductionKind, Vertex, VertexSet, ViolationReport,
    DEFAULT_ORBIT_BUDGET,
};
use serde::{Deserialize, Serialize};

use crate::context::Ctx;
use crate::tables;

/// Most violations kept per sweep; the total is still counted.
pub const MAX_KEPT_VIOLATIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Property {
    Subeq,
    Subtool,
    Delrank,
    Local,
    PivotSymmetry,
    GvWellDefined,
    Perm,
    Kmonotone,
    Subconn,
    Capcup,
    Conn,
    Qset,
    Nonflex,
    KappaOracleAgreement,
    ShrinkTerminals,
    Graph6Roundtrip,
    TwoOptions,
    JointOptionNonempty,
    PivotOnly,
    DoublyGoodVertex,
    SmallTerminals,
    ShrinkThenSearch,
    SeparatingChain,
    NestingStep,
    ReducePreserving,
}

use Property::*;

impl Property {
    pub const ALL: [Property; 25] = [
        Subeq,
        Subtool,
        Delrank,
        Local,
        PivotSymmetry,
        GvWellDefined,
        Perm,
        Kmonotone,
        Subconn,
        Capcup,
        Conn,
        Qset,
        Nonflex,
        KappaOracleAgreement,
        ShrinkTerminals,
        Graph6Roundtrip,
        TwoOptions,
        JointOptionNonempty,
        PivotOnly,
        DoublyGoodVertex,
        SmallTerminals,
        ShrinkThenSearch,
        SeparatingChain,
        NestingStep,
        ReducePreserving,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subeq => "subeq",
            Subtool => "subtool",
            Delrank => "delrank",
            Local => "local",
            PivotSymmetry => "pivot-symmetry",
            GvWellDefined => "gv-well-defined",
            Perm => "perm",
            Kmonotone => "kmonotone",
            Subconn => "subconn",
            Capcup => "capcup",
            Conn => "conn",
            Qset => "qset",
            Nonflex => "nonflex",
            KappaOracleAgreement => "kappa-oracle-agreement",
            ShrinkTerminals => "shrink-terminals",
            Graph6Roundtrip => "graph6-roundtrip",
            TwoOptions => "two-options",
            JointOptionNonempty => "joint-option-nonempty",
            PivotOnly => "pivot-only",
            DoublyGoodVertex => "doubly-good-vertex",
            SmallTerminals => "small-terminals",
            ShrinkThenSearch => "shrink-then-search",
            SeparatingChain => "separating-chain",
            NestingStep => "nesting-step",
            ReducePreserving => "reduce-preserving",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Subeq => "cut-rank is submodular",
            Subtool => "mixed submodular inequalities between G and G minus v",
            Delrank => "deleting a vertex changes cut-rank by at most one",
            Local => "cut-rank is invariant under local complementation and pivoting",
            PivotSymmetry => "G*u*v*u equals G*v*u*v on every edge",
            GvWellDefined => "G/v does not depend on the neighbour, up to local equivalence",
            Perm => "reductions commute with local complementation and deletion up to a permutation",
            Kmonotone => "connectivity never increases under a reduction",
            Subconn => "connectivity is submodular over pairs",
            Capcup => "minimum separating sets are closed under union and intersection",
            Conn => "local connectivity is monotone in its first argument",
            Qset => "cut-rank facts for a vertex whose deletion drops connectivity",
            Nonflex => "a connectivity drop for a subset transfers to the whole set",
            KappaOracleAgreement => "branch-and-bound connectivity matches plain enumeration",
            ShrinkTerminals => "shrunk terminals keep the connectivity with size equal to it",
            Graph6Roundtrip => "graph6 encoding round-trips",
            TwoOptions => "at least two reductions keep one pair's connectivity",
            JointOptionNonempty => "some reduction keeps both pairs' connectivities",
            PivotOnly => "a doubly-good vertex has a deletion or pivot option",
            DoublyGoodVertex => "a doubly-good vertex exists once enough vertices are free",
            SmallTerminals => "the size bound with terminals already shrunk",
            ShrinkThenSearch => "terminal shrinking plus reduction yields a doubly-good vertex of the original",
            SeparatingChain => "separating chains are nested and track the non-flexible vertices",
            NestingStep => "the nesting step's refined pair has the certified properties",
            ReducePreserving => "removing all free vertices keeps both connectivities",
        }
    }

    /// Largest vertex count the property accepts.
    pub fn max_order(self) -> usize {
        match self {
            Subeq | Subtool | Delrank | Local | Conn | Qset | Nonflex => 16,
            PivotSymmetry | Graph6Roundtrip => 64,
            GvWellDefined | Perm => 10,
            Kmonotone => 20,
            Subconn | Capcup | SeparatingChain | NestingStep => 12,
            KappaOracleAgreement | ShrinkTerminals | ReducePreserving => 16,
            TwoOptions | JointOptionNonempty | PivotOnly | DoublyGoodVertex | SmallTerminals
            | ShrinkThenSearch => 24,
        }
    }

    /// Number of configurations on `g`.
    pub fn space(self, g: &Graph) -> u128 {
        let m = g.vertex_count() as u32;
        let e = g.edge_count() as u128;
        let pow = |b: u128, x: u32| b.saturating_pow(x);
        match self {
            Subeq | Conn | Nonflex => pow(4, m),
            Subtool => m as u128 * pow(4, m.saturating_sub(1)),
            Delrank => m as u128 * pow(2, m.saturating_sub(1)),
            Local => m as u128 + e,
            PivotSymmetry => e,
            GvWellDefined => m as u128,
            Perm => (m * m) as u128 + m as u128 * pow(2, m.saturating_sub(1)),
            Kmonotone | Capcup | Qset | KappaOracleAgreement | ShrinkTerminals
            | TwoOptions | SeparatingChain => pow(3, m),
            Subconn | JointOptionNonempty | PivotOnly | DoublyGoodVertex | SmallTerminals | ShrinkThenSearch
            | ReducePreserving => pow(9, m),
            NestingStep => pow(7, m),
            Graph6Roundtrip => 1,
        }
    }

    /// Evaluates configuration `code` (below [`space`](Self::space)).
    pub fn check(self, ctx: &Ctx, code: u128, out: &mut Outcome) {
        match self {
            Subeq => subeq(ctx, code, out),
            Subtool => subtool(ctx, code, out),
            Delrank => delrank(ctx, code, out),
            Local => local(ctx, code, out),
            PivotSymmetry => pivot_symmetry(ctx, code, out),
            GvWellDefined => gv_well_defined(ctx, code, out),
            Perm => perm(ctx, code, out),
            Kmonotone => kmonotone(ctx, code, out),
            Subconn => subconn(ctx, code, out),
            Capcup => capcup(ctx, code, out),
            Conn => conn(ctx, code, out),
            Qset => qset(ctx, code, out),
            Nonflex => nonflex(ctx, code, out),
            KappaOracleAgreement => kappa_oracle(ctx, code, out),
            ShrinkTerminals => shrink(ctx, code, out),
            Graph6Roundtrip => graph6_roundtrip(ctx, out),
            TwoOptions => two_options(ctx, code, out),
            JointOptionNonempty => joint_nonempty(ctx, code, out),
            PivotOnly => pivot_only(ctx, code, out),
            DoublyGoodVertex => doubly_good_vertex(ctx, code, out),
            SmallTerminals => small_terminals(ctx, code, out),
            ShrinkThenSearch => shrink_then_search(ctx, code, out),
            SeparatingChain => chain(ctx, code, out),
            NestingStep => nesting(ctx, code, out),
            ReducePreserving => reduce_all(ctx, code, out),
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown property {0:?}")]
pub struct UnknownProperty(pub String);

impl FromStr for Property {
    type Err = UnknownProperty;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| UnknownProperty(s.to_owned()))
    }
}

impl From<Property> for String {
    fn from(p: Property) -> String {
        p.name().to_owned()
    }
}

impl TryFrom<String> for Property {
    type Error = UnknownProperty;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Tally of one or more checked configurations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    /// Configurations evaluated.
    pub instances: u64,
    /// Configurations whose hypotheses held, so the conclusion was tested.
    pub applicable: u64,
    /// Graphs skipped as too large for the property.
    pub skipped: u64,
    pub counters: BTreeMap<String, u64>,
    pub violation_count: u64,
    /// The smallest [`MAX_KEPT_VIOLATIONS`] violations, sorted.
    pub violations: Vec<ViolationReport>,
}

impl Outcome {
    pub fn count(&mut self, key: &str, by: u64) {
        if by > 0 {
            *self.counters.entry(key.to_owned()).or_default() += by;
        }
    }

    pub fn violation(&mut self, report: ViolationReport) {
        self.violation_count += 1;
        self.violations.push(report);
    }

    /// Order-independent merge.
    pub fn merge(mut self, other: Outcome) -> Outcome {
        self.instances += other.instances;
        self.applicable += other.applicable;
        self.skipped += other.skipped;
        for (k, v) in other.counters {
            *self.counters.entry(k).or_default() += v;
        }
        self.violation_count += other.violation_count;
        self.violations.extend(other.violations);
        self.trim();
        self
    }

    pub(crate) fn trim(&mut self) {
        if self.violations.len() > MAX_KEPT_VIOLATIONS {
            self.violations.sort();
            self.violations.dedup();
            self.violations.truncate(MAX_KEPT_VIOLATIONS);
        }
    }

    pub(crate) fn finish(&mut self) {
        self.violations.sort();
        self.violations.dedup();
        self.violations.truncate(MAX_KEPT_VIOLATIONS);
    }

    fn check(&mut self, ok: bool, report: impl FnOnce() -> ViolationReport) {
        if !ok {
            self.violation(report());
        }
    }

    fn linking_error(&mut self, ctx: &Ctx, op: &str, err: LinkingError) {
        let report = match err {
            LinkingError::TheoremViolation(rep) => *rep,
            other => ViolationReport::new(op, ctx.graph(), "no error").observe("error", other),
        };
        self.violation(report);
    }
}

/// Splits the live vertices by base-`base` digits of `code`, lowest vertex
/// first: `out[d]` holds the vertices with digit `d`.
pub fn split(live: VertexSet, base: u32, mut code: u128) -> [VertexSet; 9] {
    debug_assert!((2..=9).contains(&base));
    let mut out = [VertexSet::EMPTY; 9];
    for v in live {
        let d = (code % base as u128) as usize;
        code /= base as u128;
        out[d] = out[d].with(v);
    }
    out
}

/// `(Q, R, S, T)` from a base-9 code: digit `d` puts the vertex in `Q`/`R`
/// by `d % 3` and in `S`/`T` by `d / 3`.
pub fn two_pairs(live: VertexSet, code: u128) -> [VertexSet; 4] {
    let parts = split(live, 9, code);
    let mut sets = [VertexSet::EMPTY; 4];
    for (d, &p) in parts.iter().enumerate() {
        match d % 3 {
            1 => sets[0] = sets[0] | p,
            2 => sets[1] = sets[1] | p,
            _ => {}
        }
        match d / 3 {
            1 => sets[2] = sets[2] | p,
            2 => sets[3] = sets[3] | p,
            _ => {}
        }
    }
    sets
}

fn nth(set: VertexSet, i: u128) -> Vertex {
    set.iter().nth(i as usize).expect("index within set")
}

/// A vertex chosen by `code % m` and the rest of the code.
fn vertex_and_rest(live: VertexSet, code: u128) -> (Vertex, u128) {
    let m = live.len() as u128;
    (nth(live, code % m), code / m)
}

fn report(ctx: &Ctx, op: &str, expected: &str) -> ViolationReport {
    ViolationReport::new(op, ctx.graph(), expected)
}

fn pair_report(ctx: &Ctx, op: &str, expected: &str, s: VertexSet, t: VertexSet) -> ViolationReport {
    report(ctx, op, expected).terminals(VertexSet::EMPTY, VertexSet::EMPTY, s, t)
}

fn subeq(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let p = split(ctx.live(), 4, code);
    let (x, y) = (p[1] | p[3], p[2] | p[3]);
    out.applicable += 1;
    let lhs = ctx.rho(x) + ctx.rho(y);
    let rhs = ctx.rho(x & y) + ctx.rho(x | y);
    out.check(lhs >= rhs, || {
        report(ctx, "subeq", "rho(X)+rho(Y) >= rho(X&Y)+rho(X|Y)")
            .observe("X", x.to_hex())
            .observe("Y", y.to_hex())
            .observe("lhs", lhs)
            .observe("rhs", rhs)
    });
}

fn subtool(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let (v, rest) = vertex_and_rest(ctx.live(), code);
    let p = split(ctx.live().without(v), 4, rest);
    let (x, y) = (p[1] | p[3], p[2] | p[3]);
    let del = ctx.minor(v, ReductionKind::Delete);
    out.applicable += 1;
    let s1 = (
        del.rho(x) + ctx.rho(y.with(v)),
        del.rho(x & y) + ctx.rho((x | y).with(v)),
    );
    let s2 = (del.rho(x) + ctx.rho(y), ctx.rho(x & y) + del.rho(x | y));
    out.check(s1.0 >= s1.1 && s2.0 >= s2.1, || {
        report(ctx, "subtool", "both mixed submodular inequalities hold")
            .at_vertex(v)
            .observe("X", x.to_hex())
            .observe("Y", y.to_hex())
            .observe("s1", format!("{} >= {}", s1.0, s1.1))
            .observe("s2", format!("{} >= {}", s2.0, s2.1))
    });
}

fn delrank(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let (v, rest) = vertex_and_rest(ctx.live(), code);
    let x = ctx.live().without(v).expand(rest as u64);
    let d = ctx.minor(v, ReductionKind::Delete).rho(x);
    let (a, b) = (ctx.rho(x), ctx.rho(x.with(v)));
    out.applicable += 1;
    out.check(d <= a && a <= d + 1 && d <= b && b <= d + 1, || {
        report(ctx, "delrank", "rho_{G-v}(X) <= rho_G(X), rho_G(X+v) <= rho_{G-v}(X)+1")
            .at_vertex(v)
            .observe("X", x.to_hex())
            .observe("rho_deleted", d)
            .observe("rho", a)
            .observe("rho_with_v", b)
    });
}

fn local(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let g = ctx.graph();
    let m = ctx.m() as u128;
    let (h, what) = if code < m {
        let v = nth(ctx.live(), code);
        (g.local_complement(v).expect("live vertex"), format!("*{v}"))
    } else {
        let (u, v) = g.edges().nth((code - m) as usize).expect("edge index");
        (g.pivot(u, v).expect("edge"), format!("^{u}{v}"))
    };
    let live = ctx.live();
    out.applicable += 1;
    let mut bad = None;
    for c in 0..1u64 << ctx.m() {
        let x = live.expand(c);
        if cutlink::cut_rank(&h, x) != ctx.rho(x) {
            bad = Some(x);
            break;
        }
    }
    out.count("cuts", 1 << ctx.m());
    out.check(bad.is_none(), || {
        let x = bad.unwrap_or_default();
        report(ctx, "local", "cut-rank unchanged by the operation")
            .observe("operation", &what)
            .observe("X", x.to_hex())
            .observe("before", ctx.rho(x))
            .observe("after", cutlink::cut_rank(&h, x))
    });
}

fn pivot_symmetry(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let g = ctx.graph();
    let (u, v) = g.edges().nth(code as usize).expect("edge index");
    let lc = |h: &Graph, x| h.local_complement(x).expect("live vertex");
    let uvu = lc(&lc(&lc(g, u), v), u);
    let vuv = lc(&lc(&lc(g, v), u), v);
    let p = g.pivot(u, v).expect("edge");
    let q = g.pivot(v, u).expect("edge");
    out.applicable += 1;
    out.check(uvu == vuv && p == uvu && q == uvu, || {
        report(ctx, "pivot-symmetry", "G*u*v*u = G*v*u*v = pivot(u,v) = pivot(v,u)")
            .observe("edge", format!("{u}-{v}"))
            .observe("uvu", uvu.to_graph6())
            .observe("vuv", vuv.to_graph6())
            .observe("pivot_uv", p.to_graph6())
            .observe("pivot_vu", q.to_graph6())
    });
}

fn gv_well_defined(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let g = ctx.graph();
    let v = nth(ctx.live(), code);
    let canonical = g.reduce(v, ReductionKind::PivotDelete).expect("live vertex");
    let nbrs = g.neighbors(v);
    let Some(first) = nbrs.min() else {
        out.applicable += 1;
        let del = g.delete(v).expect("live vertex");
        out.check(canonical == del, || {
            report(ctx, "gv-well-defined", "G/v = G-v for isolated v").at_vertex(v)
        });
        return;
    };
    let base = g.pivot_delete_via(v, first).expect("neighbour");
    out.applicable += 1;
    if canonical != base {
        out.violation(
            report(ctx, "gv-well-defined", "G/v uses the lowest-id neighbour")
                .at_vertex(v)
                .observe("canonical", canonical.to_graph6())
                .observe("lowest", base.to_graph6()),
        );
        return;
    }
    for x in nbrs.without(first) {
        let h = g.pivot_delete_via(v, x).expect("neighbour");
        out.count("pairs", 1);
        match tables::locally_equivalent(&base, &h, DEFAULT_ORBIT_BUDGET) {
            Some(true) => {}
            Some(false) => out.violation(
                report(ctx, "gv-well-defined", "(G^vx)-v locally equivalent to (G^vy)-v")
                    .at_vertex(v)
                    .observe("x", first)
                    .observe("y", x),
            ),
            None => out.count("budget_exceeded", 1),
        }
    }
}

fn equivalent_or_count(a: &Graph, b: &Graph, out: &mut Outcome) -> bool {
    match tables::locally_equivalent(a, b, DEFAULT_ORBIT_BUDGET) {
        Some(eq) => eq,
        None => {
            out.count("budget_exceeded", 1);
            true
        }
    }
}

fn perm(ctx: &Ctx, code: u128, out: &mut Outcome) {
    use ReductionKind::*;
    let g = ctx.graph();
    let live = ctx.live();
    let m = ctx.m() as u128;
    out.applicable += 1;
    if code < m * m {
        // One local complementation at w, with the explicit matching.
        let v = nth(live, code / m);
        let w = nth(live, code % m);
        let gw = g.local_complement(w).expect("live vertex");
        let after = ReductionKind::ALL.map(|k| gw.reduce(v, k).expect("live vertex"));
        let before = ReductionKind::ALL.map(|k| ctx.minor(v, k).graph().clone());
        let (case, matching) = if v == w {
            ("v=w", [LcDelete, Delete, PivotDelete])
        } else if g.is_edge(v, w) {
            ("adjacent", [Delete, PivotDelete, LcDelete])
        } else {
            ("non-adjacent", [Delete, LcDelete, PivotDelete])
        };
        out.count(case, 1);
        for (i, target) in matching.into_iter().enumerate() {
            let ok = equivalent_or_count(&after[i], &before[target.index()], out);
            out.check(ok, || {
                report(ctx, "perm", "reductions of G*w match reductions of G up to local equivalence")
                    .at_vertex(v)
                    .observe("w", w)
                    .observe("case", case)
                    .observe("reduction", ReductionKind::ALL[i])
                    .observe("matched", target)
            });
        }
    } else {
        // Deletion of a set X not containing v: G∖v and G*v∖v commute with it
        // exactly, and H/v is the pivot at the lowest neighbour surviving in H
        // (plain deletion when none survives).
        let c = code - m * m;
        let (v, rest) = vertex_and_rest(live, c);
        let x = live.without(v).expand(rest as u64);
        let h = g.delete_set(x).expect("live vertices");
        out.count("deletion", 1);
        for kind in [Delete, LcDelete] {
            let left = h.reduce(v, kind).expect("live vertex");
            let right = ctx.minor(v, kind).graph().delete_set(x).expect("live vertices");
            out.check(left == right, || {
                report(ctx, "perm", "reductions commute with deleting X")
                    .at_vertex(v)
                    .observe("X", x.to_hex())
                    .observe("reduction", kind)
            });
        }
        let left = h.reduce(v, PivotDelete).expect("live vertex");
        let via = match (g.neighbors(v) - x).min() {
            Some(w) => {
                let p = g.pivot_delete_via(v, w).expect("neighbour");
                let ok = equivalent_or_count(&p, ctx.minor(v, PivotDelete).graph(), out);
                out.check(ok, || {
                    report(ctx, "perm", "G/v is independent of the neighbour").at_vertex(v).observe("w", w)
                });
                p
            }
            None => ctx.minor(v, PivotDelete).graph().clone(),
        };
        let right = via.delete_set(x).expect("live vertices");
        out.check(left == right, || {
            report(ctx, "perm", "H/v is G/v minus X for a neighbour surviving in H")
                .at_vertex(v)
                .observe("X", x.to_hex())
        });
    }
}

fn kmonotone(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let p = split(ctx.live(), 3, code);
    let (s, t) = (p[1], p[2]);
    let k = ctx.kappa(s, t);
    let g = ctx.graph();
    out.applicable += 1;
    for v in p[0] {
        for kind in ReductionKind::ALL {
            let after = ctx.minor(v, kind).kappa(s, t);
            out.count("reductions", 1);
            out.check(after <= k, || {
                pair_report(ctx, "kmonotone", "kappa never increases under a reduction", s, t)
                    .at_vertex(v)
                    .observe("reduction", kind)
                    .observe("before", k)
                    .observe("after", after)
            });
        }
    }
    for v in ctx.live() {
        let h = g.local_complement(v).expect("live vertex");
        let after = kappa(&h, s, t).expect("disjoint").value;
        out.check(after == k, || {
            pair_report(ctx, "kmonotone", "kappa unchanged by local complementation", s, t)
                .at_vertex(v)
                .observe("before", k)
                .observe("after", after)
        });
    }
}

fn subconn(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let p = split(ctx.live(), 9, code);
    let pick = |f: fn(usize) -> bool| {
        (0..9).filter(|&d| f(d)).fold(VertexSet::EMPTY, |acc, d| acc | p[d])
    };
    let x1 = pick(|d| d % 3 == 1);
    let x2 = pick(|d| d % 3 == 2);
    let y1 = pick(|d| d / 3 == 1);
    let y2 = pick(|d| d / 3 == 2);
    let g = ctx.graph();
    let k = |a, b| kappa_bruteforce(g, a, b).expect("disjoint").value;
    let lhs = k(x1, x2) + k(y1, y2);
    let rhs = k(x1 & y1, x2 | y2) + k(x1 | y1, x2 & y2);
    out.applicable += 1;
    out.check(lhs >= rhs, || {
        report(ctx, "subconn", "kappa(X1,X2)+kappa(Y1,Y2) >= kappa(X1&Y1,X2|Y2)+kappa(X1|Y1,X2&Y2)")
            .terminals(x1, x2, y1, y2)
            .observe("lhs", lhs)
            .observe("rhs", rhs)
    });
}

fn capcup(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let p = split(ctx.live(), 3, code);
    let (s, t, free) = (p[1], p[2], p[0]);
    let k = ctx.kappa(s, t);
    let f = free.len();
    let member: Vec<bool> = (0..1u64 << f)
        .map(|c| ctx.rho(s | free.expand(c)) == k)
        .collect();
    let seps: Vec<u64> = (0..1u64 << f).filter(|&c| member[c as usize]).collect();
    out.applicable += 1;
    out.count("separating_sets", seps.len() as u64);
    out.check(!seps.is_empty(), || {
        pair_report(ctx, "capcup", "kappa is attained by some separating set", s, t).observe("k", k)
    });
    for (i, &a) in seps.iter().enumerate() {
        for &b in &seps[i + 1..] {
            out.count("pairs", 1);
            let ok = member[(a & b) as usize] && member[(a | b) as usize];
            out.check(ok, || {
                pair_report(ctx, "capcup", "A&B and A|B are separating of order k", s, t)
                    .observe("k", k)
                    .observe("A", (s | free.expand(a)).to_hex())
                    .observe("B", (s | free.expand(b)).to_hex())
            });
        }
    }
}

fn conn(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let p = split(ctx.live(), 4, code);
    let (x1, x2, y) = (p[1], p[1] | p[2], p[3]);
    let a = ctx.local_conn(x1, y);
    let b = ctx.local_conn(x2, y);
    out.applicable += 1;
    out.check(a <= b, || {
        report(ctx, "conn", "local_conn(X1,Y) <= local_conn(X2,Y) for X1 within X2")
            .observe("X1", x1.to_hex())
            .observe("X2", x2.to_hex())
            .observe("Y", y.to_hex())
            .observe("smaller", a)
            .observe("larger", b)
    });
}

fn qset(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let p = split(ctx.live(), 3, code);
    let (q, r) = (p[1], p[2]);
    let k = ctx.kappa(q, r);
    let rq = ctx.rho(q);
    if rq != k {
        return;
    }
    for v in p[0] {
        let del = ctx.minor(v, ReductionKind::Delete);
        if del.kappa(q, r) >= k {
            continue;
        }
        out.applicable += 1;
        let rqv = ctx.rho(q.with(v));
        out.check(rqv >= rq, || {
            report(ctx, "qset", "rho(Q+v) >= rho(Q)")
                .terminals(q, r, VertexSet::EMPTY, VertexSet::EMPTY)
                .at_vertex(v)
                .observe("rho_Q", rq)
                .observe("rho_Qv", rqv)
        });
        if del.rho(q) == rq {
            out.count("second_premise", 1);
            out.check(rqv == rq + 1, || {
                report(ctx, "qset", "rho(Q+v) = rho(Q)+1 when deleting v keeps rho(Q)")
                    .terminals(q, r, VertexSet::EMPTY, VertexSet::EMPTY)
                    .at_vertex(v)
                    .observe("rho_Q", rq)
                    .observe("rho_Qv", rqv)
            });
        }
    }
}

fn nonflex(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let p = split(ctx.live(), 4, code);
    let (u, s, t) = (p[2], p[1] | p[2], p[3]);
    let k = ctx.kappa(s, t);
    if ctx.rho(s) != k {
        return;
    }
    let ku = ctx.kappa(u, t);
    for v in p[0] {
        let del = ctx.minor(v, ReductionKind::Delete);
        if del.kappa(u, t) >= ku {
            continue;
        }
        out.applicable += 1;
        let after = del.kappa(s, t);
        out.check(after < k, || {
            pair_report(ctx, "nonflex", "kappa_{G-v}(S,T) < kappa_G(S,T)", s, t)
                .at_vertex(v)
                .observe("U", u.to_hex())
                .observe("kappa_ST", k)
                .observe("kappa_ST_deleted", after)
        });
    }
}

fn kappa_oracle(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let p = split(ctx.live(), 3, code);
    let (s, t) = (p[1], p[2]);
    let g = ctx.graph();
    let fast = kappa(g, s, t).expect("disjoint");
    let slow = kappa_bruteforce(g, s, t).expect("disjoint");
    let table = ctx.kappa(s, t);
    out.applicable += 1;
    let ok = fast == slow && table == slow.value && is_separating(g, s, t, fast.witness, fast.value);
    out.check(ok, || {
        pair_report(ctx, "kappa-oracle-agreement", "kappa equals the enumeration oracle", s, t)
            .observe("fast", format!("{} {}", fast.value, fast.witness.to_hex()))
            .observe("slow", format!("{} {}", slow.value, slow.witness.to_hex()))
            .observe("table", table)
    });
}

fn shrink(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let p = split(ctx.live(), 3, code);
    let (s, t) = (p[1], p[2]);
    let g = ctx.graph();
    let l = kappa_bruteforce(g, s, t).expect("disjoint").value;
    out.applicable += 1;
    match shrink_terminals(g, s, t) {
        Ok((s1, t1)) => {
            let l1 = kappa_bruteforce(g, s1, t1).expect("disjoint").value;
            let ok = s1.is_subset(s) && t1.is_subset(t) && s1.len() == l && t1.len() == l && l1 == l;
            out.check(ok, || {
                pair_report(ctx, "shrink-terminals", "|S1| = |T1| = kappa(S1,T1) = kappa(S,T)", s, t)
                    .observe("S1", s1.to_hex())
                    .observe("T1", t1.to_hex())
                    .observe("l", l)
                    .observe("l_shrunk", l1)
            });
        }
        Err(e) => out.violation(
            pair_report(ctx, "shrink-terminals", "no error", s, t).observe("error", e),
        ),
    }
}

fn graph6_roundtrip(ctx: &Ctx, out: &mut Outcome) {
    let g = ctx.graph();
    let s = g.to_graph6();
    out.applicable += 1;
    let back = Graph::from_graph6(&s);
    let with_newline = Graph::from_graph6(&format!("{s}\n"));
    let ok = match (&back, &with_newline) {
        (Ok(h), Ok(h2)) => h == g && h2 == g && h.to_graph6() == s,
        _ => false,
    };
    out.check(ok, || {
        report(ctx, "graph6-roundtrip", "decode(encode(G)) = G")
            .observe("decoded", format!("{back:?}"))
    });
}

fn two_options(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let p = split(ctx.live(), 3, code);
    let (q, r) = (p[1], p[2]);
    let k = ctx.kappa(q, r);
    for v in p[0] {
        out.applicable += 1;
        match single_pair_options(ctx.graph(), q, r, v) {
            Ok(opts) => {
                let oracle = ctx.options(&[(q, r, k)], v);
                out.count(&format!("options_{}", opts.len()), 1);
                out.check(opts == oracle && opts.len() >= 2, || {
                    report(ctx, "two-options", "at least two options, matching direct recomputation")
                        .terminals(q, r, VertexSet::EMPTY, VertexSet::EMPTY)
                        .at_vertex(v)
                        .observe("options", opts)
                        .observe("oracle", oracle)
                });
            }
            Err(e) => out.linking_error(ctx, "two-options", e),
        }
    }
}

fn instance(ctx: &Ctx, code: u128) -> (LinkingInstance, [VertexSet; 4]) {
    let sets = two_pairs(ctx.live(), code);
    let [q, r, s, t] = sets;
    let inst = LinkingInstance::new(ctx.graph().clone(), q, r, s, t).expect("disjoint pairs");
    (inst, sets)
}

fn inst_report(ctx: &Ctx, inst: &LinkingInstance, op: &str, expected: &str) -> ViolationReport {
    report(ctx, op, expected)
        .terminals(inst.q(), inst.r(), inst.s(), inst.t())
        .observe("k", inst.k())
        .observe("l", inst.l())
}

fn joint_oracle(ctx: &Ctx, inst: &LinkingInstance, v: Vertex) -> OptionSet {
    ctx.options(&[(inst.q(), inst.r(), inst.k()), (inst.s(), inst.t(), inst.l())], v)
}

fn joint_nonempty(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let (inst, _) = instance(ctx, code);
    for v in inst.free() {
        out.applicable += 1;
        match joint_good_options(&inst, v) {
            Ok(opts) => {
                let oracle = joint_oracle(ctx, &inst, v);
                out.count(&format!("options_{}", opts.len()), 1);
                out.check(opts == oracle && !opts.is_empty(), || {
                    inst_report(ctx, &inst, "joint-option-nonempty", "nonempty, matching direct recomputation")
                        .at_vertex(v)
                        .observe("options", opts)
                        .observe("oracle", oracle)
                });
            }
            Err(e) => out.linking_error(ctx, "joint-option-nonempty", e),
        }
    }
}

fn pivot_only(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let (inst, _) = instance(ctx, code);
    match find_doubly_good_vertex(&inst) {
        Ok(Some((v, opts))) => {
            out.applicable += 1;
            match pivot_only_options(&inst, v) {
                Ok(p) => out.check(!p.is_empty() && p == opts.intersect(OptionSet::PIVOT_MINOR), || {
                    inst_report(ctx, &inst, "pivot-only", "deletion or pivot keeps both connectivities")
                        .at_vertex(v)
                        .observe("options", opts)
                        .observe("pivot_options", p)
                }),
                Err(e) => out.linking_error(ctx, "pivot-only", e),
            }
        }
        Ok(None) => out.count("not_found", 1),
        Err(e) => out.linking_error(ctx, "pivot-only", e),
    }
}

/// Checks a vertex reported doubly good against direct recomputation.
fn verify_found(ctx: &Ctx, inst: &LinkingInstance, op: &str, v: Vertex, opts: OptionSet, out: &mut Outcome) {
    let oracle = joint_oracle(ctx, inst, v);
    out.check(inst.free().contains(v) && opts == oracle && opts.len() >= 2, || {
        inst_report(ctx, inst, op, "returned vertex is free with two joint options")
            .at_vertex(v)
            .observe("options", opts)
            .observe("oracle", oracle)
    });
}

fn doubly_good_vertex(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let (inst, _) = instance(ctx, code);
    let free = inst.free();
    let at_bound = free.len() as u128 >= doubly_good_bound(inst.k(), inst.l());
    if at_bound {
        out.applicable += 1;
    }
    match find_doubly_good_vertex(&inst) {
        Ok(Some((v, opts))) => {
            out.count("found", 1);
            verify_found(ctx, &inst, "doubly-good-vertex", v, opts, out);
            let earlier = free.iter().take_while(|&u| u < v).find(|&u| joint_oracle(ctx, &inst, u).len() >= 2);
            out.check(earlier.is_none(), || {
                inst_report(ctx, &inst, "doubly-good-vertex", "the lowest-id doubly-good vertex is returned")
                    .at_vertex(v)
                    .observe("earlier", earlier.unwrap_or_default())
            });
        }
        Ok(None) => {
            out.count("not_found", 1);
            out.check(!at_bound, || {
                inst_report(ctx, &inst, "doubly-good-vertex", "a doubly-good vertex at the size bound")
                    .observe("free", free.len())
            });
        }
        Err(e) => out.linking_error(ctx, "doubly-good-vertex", e),
    }
}

fn small_terminals(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let (inst, _) = instance(ctx, code);
    let l = inst.l();
    if inst.s().len() != l || inst.t().len() != l {
        return;
    }
    out.count("shrunk", 1);
    if (inst.free().len() as u128) < doubly_good_bound(inst.k(), l) {
        return;
    }
    out.applicable += 1;
    match find_doubly_good_vertex(&inst) {
        Ok(Some((v, opts))) => verify_found(ctx, &inst, "small-terminals", v, opts, out),
        Ok(None) => out.violation(inst_report(ctx, &inst, "small-terminals", "a doubly-good vertex")),
        Err(e) => out.linking_error(ctx, "small-terminals", e),
    }
}

fn shrink_then_search(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let (inst, _) = instance(ctx, code);
    let at_bound = inst.free().len() as u128 >= doubly_good_bound(inst.k(), inst.l());
    if at_bound {
        out.applicable += 1;
    }
    match find_via_terminal_reduction(&inst) {
        Ok(Some((v, opts))) => {
            out.count("found", 1);
            verify_found(ctx, &inst, "shrink-then-search", v, opts, out);
        }
        Ok(None) => {
            out.count("not_found", 1);
            out.check(!at_bound, || {
                inst_report(ctx, &inst, "shrink-then-search", "a doubly-good vertex at the size bound")
            });
        }
        Err(e) => out.linking_error(ctx, "shrink-then-search", e),
    }
}

/// Checks the three chain invariants from scratch.
fn chain_ok(ctx: &Ctx, s: VertexSet, t: VertexSet, f: VertexSet, k: usize, order: &[Vertex], sets: &[VertexSet]) -> bool {
    if order.len() != f.len() || sets.len() != f.len() {
        return false;
    }
    if order.iter().copied().collect::<VertexSet>() != f {
        return false;
    }
    let mut prefix = VertexSet::EMPTY;
    let mut prev = None;
    for (&fi, &a) in order.iter().zip(sets) {
        prefix = prefix.with(fi);
        let separating = s.is_subset(a) && a.is_disjoint(t) && a.is_subset(ctx.live()) && ctx.rho(a) == k;
        let nested = prev.map_or(true, |p: VertexSet| p.is_subset(a));
        if !separating || !nested || a & f != prefix {
            return false;
        }
        prev = Some(a);
    }
    true
}

fn chain(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let p = split(ctx.live(), 3, code);
    let (s, t) = (p[1], p[2]);
    let f: VertexSet = p[0].iter().filter(|&v| !ctx.is_flexible(s, t, v)).collect();
    let k = ctx.kappa(s, t);
    out.applicable += 1;
    match separating_chain(ctx.graph(), s, t, f) {
        Ok(c) => {
            out.count("links", c.len() as u64);
            out.check(chain_ok(ctx, s, t, f, k, &c.order, &c.sets), || {
                pair_report(ctx, "separating-chain", "nested order-k separating sets tracking F", s, t)
                    .observe("F", f.to_hex())
                    .observe("order", format!("{:?}", c.order))
                    .observe("sets", format!("{:?}", c.sets))
            });
        }
        Err(e) => out.linking_error(ctx, "separating-chain", e),
    }
}

fn nesting(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let p = split(ctx.live(), 7, code);
    let f = p[0];
    let q = p[1] | p[2] | p[3];
    let r = p[4] | p[5] | p[6];
    let s = p[2] | p[5];
    let t = p[3] | p[6];
    if f.is_empty() {
        return;
    }
    let k = ctx.kappa(q, r);
    let (rq, rr) = (ctx.rho(q), ctx.rho(r));
    if rq != k || rr != k {
        return;
    }
    if f.iter().any(|v| ctx.is_flexible(q, r, v) || ctx.is_flexible(s, t, v)) {
        return;
    }
    let l = ctx.kappa(s, t);
    out.applicable += 1;
    let rep = |expected: &str| {
        report(ctx, "nesting-step", expected)
            .terminals(q, r, s, t)
            .observe("k", k)
            .observe("l", l)
    };
    let doubly = |v| ctx.options(&[(q, r, k), (s, t, l)], v);
    match nesting_step(ctx.graph(), q, r, s, t) {
        Ok(NestingOutcome::DoublyGood { vertex, options }) => {
            out.count("doubly_good", 1);
            let oracle = doubly(vertex);
            out.check(f.contains(vertex) && options == oracle && oracle.len() >= 2, || {
                rep("returned vertex has two joint options")
                    .at_vertex(vertex)
                    .observe("options", options)
                    .observe("oracle", oracle)
            });
        }
        Ok(NestingOutcome::Refined { q: q2, r: r2, split_vertex, .. }) => {
            out.count("refined", 1);
            let missed = f.iter().find(|&v| doubly(v).len() >= 2);
            let twice = |a: VertexSet, b: VertexSet| ctx.rho(a) as i64 + ctx.rho(b) as i64 - ctx.rho(a | b) as i64;
            let contains = q.is_subset(q2) && r.is_subset(r2) && q2.is_disjoint(r2);
            let same_order = ctx.rho(q2) == k && ctx.rho(r2) == k;
            let gain = twice(q2, r2) > twice(q, r);
            let remaining = (ctx.live() - q2 - r2).len() >= f.len() / 2;
            out.check(missed.is_none() && contains && same_order && gain && remaining, || {
                rep("refined pair satisfies containment, order, gain and size")
                    .at_vertex(split_vertex)
                    .observe("q_refined", q2.to_hex())
                    .observe("r_refined", r2.to_hex())
                    .observe("missed_doubly_good", format!("{missed:?}"))
                    .observe("containment", contains)
                    .observe("order", same_order)
                    .observe("gain", gain)
                    .observe("remaining", remaining)
            });
        }
        Err(e) => out.linking_error(ctx, "nesting-step", e),
    }
}

fn reduce_all(ctx: &Ctx, code: u128, out: &mut Outcome) {
    let (inst, [q, r, s, t]) = instance(ctx, code);
    let drop = inst.free();
    out.applicable += 1;
    match reduce_preserving(&inst, drop) {
        Ok(red) => {
            let h = &red.graph;
            let k = kappa_bruteforce(h, q, r).expect("disjoint").value;
            let l = kappa_bruteforce(h, s, t).expect("disjoint").value;
            let mut replay = ctx.graph().clone();
            for &(v, kind) in &red.steps {
                replay = replay.reduce(v, kind).expect("live vertex");
            }
            let steps_ok = red.steps.iter().map(|&(v, _)| v).eq(drop.iter());
            out.check(
                h.vertices() == ctx.live() - drop && k == inst.k() && l == inst.l() && replay == *h && steps_ok,
                || {
                    inst_report(ctx, &inst, "reduce-preserving", "reduced graph keeps both connectivities")
                        .observe("k_after", k)
                        .observe("l_after", l)
                        .observe("reduced", h.to_graph6())
                },
            );
        }
        Err(e) => out.linking_error(ctx, "reduce-preserving", e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in Property::ALL {
            assert_eq!(p.name().parse::<Property>(), Ok(p));
            assert!(!p.description().is_empty());
        }
        assert!("nope".parse::<Property>().is_err());
    }

    #[test]
    fn split_digits() {
        let live: VertexSet = [1, 3, 4].into_iter().collect();
        // digits (lowest vertex first): 2, 0, 1
        let p = split(live, 3, 2 + 9);
        assert_eq!(p[0].to_vec(), vec![3]);
        assert_eq!(p[1].to_vec(), vec![4]);
        assert_eq!(p[2].to_vec(), vec![1]);
    }

    #[test]
    fn two_pairs_digits() {
        let live = VertexSet::range(3);
        // vertex 0: digit 4 (Q, S); vertex 1: digit 2 (R); vertex 2: digit 6 (T)
        let [q, r, s, t] = two_pairs(live, 4 + 2 * 9 + 6 * 81);
        assert_eq!((q.to_vec(), r.to_vec(), s.to_vec(), t.to_vec()), (vec![0], vec![1], vec![0], vec![2]));
    }

    #[test]
    fn every_property_on_a_small_graph() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 2)]).unwrap();
        for p in Property::ALL {
            let space = p.space(&g);
            let ctx = Ctx::new(g.clone(), space);
            let mut out = Outcome::default();
            for code in (0..space).step_by(((space / 200).max(1)) as usize) {
                p.check(&ctx, code, &mut out);
            }
            assert_eq!(out.violation_count, 0, "{p}: {:?}", out.violations.first());
        }
    }
}
