//! End-to-end entailment: statistical queries by linear programming,
//! subjective queries by projecting the statistical measure onto the belief
//! constraints of the queried individuals.

mod check;
mod oracle;
mod solve;

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub use check::{check_kb, check_kb_with_cap, ConsistencyReport, Verdict};
pub use oracle::{LpOracle, MeasureOracle, SampleOracle, Scalar};
pub use solve::{Belief, CaseSplit, Cell, Leaf, Solver};

use crate::algebra::{AlgebraError, DEFAULT_ATOM_CAP};
use crate::crossentropy::{CeError, ConstraintRel, Trace};
use crate::statistics::{stat_entail_interval, Event, Interval, Level, Needs, StatError, StatModel};
use crate::syntax::{format_formula, BeliefSentence, Formula, KnowledgeBase, Query, QueryKind, Rel, Term};

pub const DEFAULT_SAMPLES: usize = 256;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InferError {
    #[error(transparent)]
    Stat(#[from] StatError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Projection(#[from] CeError),
    #[error("no model: {0}")]
    NoModel(String),
    #[error("not unique: {0}")]
    NotUnique(String),
    #[error("conditioning event has belief zero: {0}")]
    BeliefZero(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl InferError {
    /// The knowledge base (or the relevant part of it) has no model.
    pub fn is_no_model(&self) -> bool {
        matches!(
            self,
            InferError::NoModel(_)
                | InferError::Projection(CeError::NoModel(_))
                | InferError::Stat(StatError::Infeasible(_))
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Certified values; fails unless the statistics pin everything needed.
    Point,
    /// Best-effort range over sampled statistical measures.
    Interval { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub mode: Mode,
    pub atom_cap: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            mode: Mode::Point,
            atom_cap: DEFAULT_ATOM_CAP,
        }
    }
}

impl Options {
    pub fn interval(samples: usize, seed: u64) -> Self {
        Options {
            mode: Mode::Interval { samples, seed },
            ..Options::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResultMode {
    ExactPoint,
    ExactInterval,
    SampledInterval { samples: usize },
}

impl ResultMode {
    pub fn name(self) -> &'static str {
        match self {
            ResultMode::ExactPoint => "exact_point",
            ResultMode::ExactInterval => "exact_interval",
            ResultMode::SampledInterval { .. } => "sampled_interval",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub query: String,
    pub kind: QueryKind,
    pub mode: ResultMode,
    pub lo: Scalar,
    pub hi: Scalar,
    /// Endpoint details for statistical queries.
    pub interval: Option<Interval>,
    pub derivation: Vec<String>,
    pub blocks: Vec<Vec<String>>,
}

impl QueryResult {
    /// Certified and carried as exact rationals.
    pub fn exact(&self) -> bool {
        !matches!(self.mode, ResultMode::SampledInterval { .. })
            && self.lo.exact.is_some()
            && self.hi.exact.is_some()
    }

    pub fn value(&self) -> Option<&Scalar> {
        (self.mode == ResultMode::ExactPoint).then_some(&self.lo)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "query": self.query,
            "kind": match self.kind {
                QueryKind::Statistical => "statistical",
                QueryKind::Subjective => "subjective",
            },
            "mode": self.mode.name(),
            "lo": self.lo.render(),
            "hi": self.hi.render(),
            "exact": self.exact(),
            "derivation": self.derivation,
            "blocks": self.blocks,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("query: {}\n", self.query);
        let show = |s: &Scalar| match &s.exact {
            Some(_) if s.render() != s.decimal() => format!("{} ({})", s.render(), s.decimal()),
            _ => s.render(),
        };
        match self.mode {
            ResultMode::ExactPoint => out += &format!("value: {}\n", show(&self.lo)),
            ResultMode::ExactInterval => {
                out += &format!("interval: [{}, {}]\n", show(&self.lo), show(&self.hi))
            }
            ResultMode::SampledInterval { samples } => {
                out += &format!(
                    "sampled interval (not certified, {samples} samples): [{}, {}]\n",
                    self.lo.decimal(),
                    self.hi.decimal()
                )
            }
        }
        if let Some(iv) = &self.interval {
            if !iv.conditioning_possible {
                out += "note: the condition has statistical probability zero in every model\n";
            }
            if !iv.lo_attained || !iv.hi_attained {
                out += "note: an endpoint is a limit that no model attains\n";
            }
        }
        out += &format!("derivation: {}\n", self.derivation.join(", "));
        if !self.blocks.is_empty() {
            let b: Vec<String> = self.blocks.iter().map(|b| format!("{{{}}}", b.join(", "))).collect();
            out += &format!("blocks: {}\n", b.join(" "));
        }
        out
    }
}

/// Finest partition of the constants such that no belief sentence mentions
/// two parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDecomposition {
    pub blocks: Vec<Vec<String>>,
}

impl BlockDecomposition {
    pub fn block_of(&self, c: &str) -> Option<usize> {
        self.blocks.iter().position(|b| b.iter().any(|x| x == c))
    }
}

pub fn decompose_blocks(kb: &KnowledgeBase) -> BlockDecomposition {
    let consts = &kb.signature.constants;
    let idx = |c: &str| consts.iter().position(|x| x == c);
    let mut parent: Vec<usize> = (0..consts.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for b in &kb.beliefs {
        let subjects: Vec<usize> = b.subjects().iter().filter_map(|c| idx(c)).collect();
        for w in subjects.windows(2) {
            let (x, y) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[x.max(y)] = x.min(y);
        }
    }
    let mut blocks: Vec<(usize, Vec<String>)> = Vec::new();
    for (i, c) in consts.iter().enumerate() {
        let r = find(&mut parent, i);
        match blocks.iter_mut().find(|(root, _)| *root == r) {
            Some((_, b)) => b.push(c.clone()),
            None => blocks.push((r, vec![c.clone()])),
        }
    }
    BlockDecomposition {
        blocks: blocks.into_iter().map(|(_, b)| b).collect(),
    }
}

fn formula_constants(fs: &[&Formula]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for f in fs {
        for c in f.constants() {
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out
}

fn level_for(n: usize) -> Result<Level, InferError> {
    match n {
        0 | 1 => Ok(Level::One),
        2 => Ok(Level::Two),
        k => Err(InferError::Unsupported(format!(
            "{k} individuals are linked by belief sentences or the query; at most 2 are supported"
        ))),
    }
}

/// One group of individuals with its compiled beliefs.
struct BlockCtx {
    level: Level,
    slots: HashMap<String, usize>,
    beliefs: Vec<Belief>,
    root: Cell,
}

fn belief_indices(kb: &KnowledgeBase, block: &[String]) -> Vec<usize> {
    kb.beliefs
        .iter()
        .enumerate()
        .filter(|(_, b)| b.subjects().iter().any(|s| block.contains(s)))
        .map(|(i, _)| i)
        .collect()
}

fn compile_belief(model: &StatModel, level: Level, slots: &HashMap<String, usize>, b: &BeliefSentence, source: Option<usize>) -> Result<Belief, InferError> {
    let phi_f = model.resolve_formula(&b.phi)?;
    let psi_f = model.resolve_formula(&b.psi)?;
    let phi = model.event(level, &phi_f, slots)?;
    let psi = model.event(level, &psi_f, slots)?;
    let (phi, phi_text, rel, p) = match b.rel {
        Rel::Ge | Rel::Gt => (phi, format_formula(&b.phi), ConstraintRel::Ge, b.p.clone()),
        Rel::Le | Rel::Lt => (
            phi.complement(),
            format!("!({})", format_formula(&b.phi)),
            ConstraintRel::Ge,
            crate::lp::Q::one() - &b.p,
        ),
        Rel::Eq => (phi, format_formula(&b.phi), ConstraintRel::Eq, b.p.clone()),
    };
    let psi_text = match &b.psi {
        Formula::True => String::new(),
        f => format_formula(f),
    };
    Ok(Belief {
        phi,
        psi,
        rel,
        p,
        label: b.to_string(),
        phi_text,
        psi_text,
        source,
    })
}

fn block_ctx(kb: &KnowledgeBase, model: &StatModel, block: &[String], oracle: &dyn MeasureOracle) -> Result<BlockCtx, InferError> {
    let level = level_for(block.len())?;
    let slots: HashMap<String, usize> = block.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
    let beliefs = belief_indices(kb, block)
        .into_iter()
        .map(|i| compile_belief(model, level, &slots, &kb.beliefs[i], Some(i)))
        .collect::<Result<Vec<_>, _>>()?;
    let root = match level {
        Level::One => Cell {
            event: model.full(Level::One),
            label: String::new(),
        },
        Level::Two => {
            // distinct constants denote distinct individuals
            let eq = Formula::Equal(Term::Const(block[0].clone()), Term::Const(block[1].clone()));
            let label = format!("!({} == {})", block[0], block[1]);
            let event = model.event(Level::Two, &eq, &slots)?.complement();
            if oracle.is_null(&event)? {
                return Err(InferError::NoModel(format!("`{label}` has statistical probability zero")));
            }
            Cell { event, label }
        }
    };
    Ok(BlockCtx {
        level,
        slots,
        beliefs,
        root,
    })
}

/// How a subjective query is split over blocks.
enum Shape {
    /// All query constants in one block (or none at all).
    Single(Vec<String>),
    /// Conjunctive query; one factor per block.
    Product(Vec<(Vec<String>, Formula, Formula)>),
    /// A relation between two single-constant blocks, mixed over the types
    /// of each individual with respect to `types`.
    Mixing { blocks: [String; 2], types: Vec<String> },
}

struct Plan {
    shape: Shape,
    needs: Needs,
    blocks: Vec<Vec<String>>,
}

fn add_preds(out: &mut BTreeSet<String>, fs: &[&Formula]) {
    for f in fs {
        f.predicates(out);
    }
}

fn block_needs(kb: &KnowledgeBase, block: &[String], extra: &[&Formula], needs: &mut Needs) {
    let mut preds = BTreeSet::new();
    for i in belief_indices(kb, block) {
        add_preds(&mut preds, &[&kb.beliefs[i].phi, &kb.beliefs[i].psi]);
    }
    add_preds(&mut preds, extra);
    if block.len() == 2 {
        needs.binary.extend(preds);
    } else {
        needs.unary.extend(preds);
    }
}

fn plan(kb: &KnowledgeBase, query: &Query) -> Result<Plan, InferError> {
    let decomposition = decompose_blocks(kb);
    let consts = formula_constants(&[&query.phi, &query.psi]);
    let mut involved: Vec<usize> = Vec::new();
    for c in &consts {
        let b = decomposition
            .block_of(c)
            .ok_or_else(|| InferError::Unsupported(format!("`{c}` is not a declared constant")))?;
        if !involved.contains(&b) {
            involved.push(b);
        }
    }
    involved.sort();
    let blocks: Vec<Vec<String>> = involved.iter().map(|&b| decomposition.blocks[b].clone()).collect();
    let mut needs = Needs::default();
    if blocks.len() <= 1 {
        let block = blocks.first().cloned().unwrap_or_default();
        level_for(block.len())?;
        block_needs(kb, &block, &[&query.phi, &query.psi], &mut needs);
        return Ok(Plan {
            shape: Shape::Single(block),
            needs,
            blocks,
        });
    }
    // try to factor the query conjunct by conjunct
    let mut factors: Vec<(Vec<String>, Vec<Formula>, Vec<Formula>)> =
        blocks.iter().map(|b| (b.clone(), Vec::new(), Vec::new())).collect();
    let mut factorizable = true;
    for (side, f) in [(0, &query.phi), (1, &query.psi)] {
        for c in f.conjuncts() {
            let cs = c.constants();
            let owner: BTreeSet<usize> = cs
                .iter()
                .map(|x| blocks.iter().position(|b| b.contains(x)).unwrap_or(0))
                .collect();
            match owner.len() {
                0 | 1 => {
                    let k = owner.into_iter().next().unwrap_or(0);
                    if side == 0 {
                        factors[k].1.push(c.clone());
                    } else {
                        factors[k].2.push(c.clone());
                    }
                }
                _ => factorizable = false,
            }
        }
    }
    if factorizable {
        let mut shape = Vec::new();
        for (block, phi, psi) in factors {
            let phi = Formula::conj_all(phi);
            let psi = Formula::conj_all(psi);
            level_for(block.len())?;
            block_needs(kb, &block, &[&phi, &psi], &mut needs);
            shape.push((block, phi, psi));
        }
        return Ok(Plan {
            shape: Shape::Product(shape),
            needs,
            blocks,
        });
    }
    if blocks.len() != 2 || blocks.iter().any(|b| b.len() != 1) {
        return Err(InferError::Unsupported(
            "the query relates individuals from different blocks in a way that needs more than two individuals"
                .into(),
        ));
    }
    let mut types = BTreeSet::new();
    for s in &kb.statistical {
        if s.arity() == 2 {
            for p in s.predicates() {
                if kb.signature.arity(&p) == Some(1) {
                    types.insert(p);
                }
            }
        }
    }
    let mut qp = BTreeSet::new();
    add_preds(&mut qp, &[&query.phi, &query.psi]);
    types.extend(qp.iter().filter(|p| kb.signature.arity(p) == Some(1)).cloned());
    if types.len() > 8 {
        return Err(InferError::Unsupported(format!(
            "mixing over {} unary predicates is too large",
            types.len()
        )));
    }
    for b in &blocks {
        let type_atoms: Vec<Formula> = types
            .iter()
            .map(|p| Formula::atom(p, vec![Term::Const(b[0].clone())]))
            .collect();
        block_needs(kb, b, &type_atoms.iter().collect::<Vec<_>>(), &mut needs);
    }
    needs.binary.extend(qp);
    needs.binary.extend(types.iter().cloned());
    Ok(Plan {
        shape: Shape::Mixing {
            blocks: [blocks[0][0].clone(), blocks[1][0].clone()],
            types: types.into_iter().collect(),
        },
        needs,
        blocks,
    })
}

/// Leaves of one block's belief state.
fn block_leaves(
    kb: &KnowledgeBase,
    model: &StatModel,
    solver: &Solver<'_>,
    ctx: &BlockCtx,
    query_psi: Option<&Event>,
) -> Result<Vec<Leaf>, InferError> {
    let _ = (kb, model);
    if ctx.beliefs.is_empty() {
        solver.tag("direct-inference");
    }
    let mut leaves = Vec::new();
    solver.solve(ctx.root.clone(), Scalar::one(), ctx.beliefs.clone(), query_psi, &mut leaves)?;
    Ok(leaves)
}

fn single_block(
    kb: &KnowledgeBase,
    model: &StatModel,
    solver: &Solver<'_>,
    block: &[String],
    phi: &Formula,
    psi: &Formula,
) -> Result<Scalar, InferError> {
    let ctx = block_ctx(kb, model, block, solver.oracle)?;
    let phi_e = model.event(ctx.level, &model.resolve_formula(phi)?, &ctx.slots)?;
    let psi_e = model.event(ctx.level, &model.resolve_formula(psi)?, &ctx.slots)?;
    let leaves = block_leaves(kb, model, solver, &ctx, Some(&psi_e))?;
    let what = format!("`{}`", format_formula(phi));
    solver.evaluate(&leaves, &phi_e, &psi_e, &what)
}

fn literal(pred: &str, c: &str, positive: bool) -> Formula {
    let a = Formula::atom(pred, vec![Term::Const(c.to_string())]);
    if positive {
        a
    } else {
        Formula::not(a)
    }
}

fn run<'a>(kb: &KnowledgeBase, query: &Query, plan: &Plan, model: &StatModel, oracle: &'a dyn MeasureOracle, trace: Trace<'a>) -> Result<(Scalar, Vec<String>), InferError> {
    let solver = Solver::new(oracle, trace);
    let value = match &plan.shape {
        Shape::Single(block) => single_block(kb, model, &solver, block, &query.phi, &query.psi)?,
        Shape::Product(factors) => {
            solver.tag("block-independence");
            let mut v = Scalar::one();
            for (block, phi, psi) in factors {
                if *phi == Formula::True && *psi == Formula::True {
                    continue;
                }
                let f = single_block(kb, model, &solver, block, phi, psi)?;
                v = &v * &f;
            }
            v
        }
        Shape::Mixing { blocks, types } => {
            solver.tag("block-independence");
            let n = types.len();
            let mut weights: Vec<Vec<Scalar>> = Vec::new();
            for c in blocks {
                let ctx = block_ctx(kb, model, std::slice::from_ref(c), oracle)?;
                let leaves = block_leaves(kb, model, &solver, &ctx, None)?;
                let full = model.full(Level::One);
                let mut w = Vec::with_capacity(1 << n);
                for mask in 0..(1usize << n) {
                    let f = Formula::conj_all((0..n).map(|k| literal(&types[k], c, mask >> k & 1 == 1)));
                    let e = model.event(Level::One, &f, &ctx.slots)?;
                    w.push(if oracle.is_null(&e)? {
                        Scalar::zero()
                    } else {
                        solver.evaluate(&leaves, &e, &full, &format!("`{}`", format_formula(&f)))?
                    });
                }
                weights.push(w);
            }
            let slots: HashMap<String, usize> =
                [(blocks[0].clone(), 0), (blocks[1].clone(), 1)].into_iter().collect();
            let distinct = Formula::not(Formula::Equal(Term::Const(blocks[0].clone()), Term::Const(blocks[1].clone())));
            let mut leaves = Vec::new();
            for (a, wa) in weights[0].iter().enumerate() {
                for (b, wb) in weights[1].iter().enumerate() {
                    let w = wa * wb;
                    if w.is_zero() {
                        continue;
                    }
                    let mut lits: Vec<Formula> = (0..n).map(|k| literal(&types[k], &blocks[0], a >> k & 1 == 1)).collect();
                    lits.extend((0..n).map(|k| literal(&types[k], &blocks[1], b >> k & 1 == 1)));
                    lits.push(distinct.clone());
                    let f = Formula::conj_all(lits);
                    let event = model.event(Level::Two, &f, &slots)?;
                    leaves.push(Leaf {
                        cell: Cell {
                            event,
                            label: format_formula(&f),
                        },
                        weight: w,
                    });
                }
            }
            let phi_e = model.event(Level::Two, &model.resolve_formula(&query.phi)?, &slots)?;
            let psi_e = model.event(Level::Two, &model.resolve_formula(&query.psi)?, &slots)?;
            solver.tag("partition-mixing");
            solver.evaluate(&leaves, &phi_e, &psi_e, &format!("`{}`", format_formula(&query.phi)))?
        }
    };
    Ok((value, solver.tags()))
}

pub fn answer(kb: &KnowledgeBase, query: &Query, opts: &Options) -> Result<QueryResult, InferError> {
    answer_traced(kb, query, opts, None)
}

pub fn answer_traced(kb: &KnowledgeBase, query: &Query, opts: &Options, mut trace: Trace<'_>) -> Result<QueryResult, InferError> {
    if query.kind == QueryKind::Statistical {
        let iv = stat_entail_interval(kb, &query.phi, &query.psi, &query.bound, opts.atom_cap)?;
        let mode = if iv.is_point() {
            ResultMode::ExactPoint
        } else {
            ResultMode::ExactInterval
        };
        return Ok(QueryResult {
            query: query.to_string(),
            kind: query.kind,
            mode,
            lo: Scalar::exact(iv.lo.clone()),
            hi: Scalar::exact(iv.hi.clone()),
            interval: Some(iv),
            derivation: vec!["linear-programming".into()],
            blocks: Vec::new(),
        });
    }
    let plan = plan(kb, query)?;
    let model = StatModel::compile_with_cap(kb, &plan.needs, opts.atom_cap)?;
    let result = |mode, lo, hi, derivation| QueryResult {
        query: query.to_string(),
        kind: query.kind,
        mode,
        lo,
        hi,
        interval: None,
        derivation,
        blocks: plan.blocks.clone(),
    };
    match opts.mode {
        Mode::Point => {
            let oracle = LpOracle::new(&model);
            let (v, tags) = run(kb, query, &plan, &model, &oracle, trace.as_deref_mut().map(|t| t as _))?;
            Ok(result(ResultMode::ExactPoint, v.clone(), v, tags))
        }
        Mode::Interval { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let points = model.sample(samples.max(2), &mut rng)?;
            let mut best: Option<(Scalar, Scalar)> = None;
            let mut tags: Vec<String> = Vec::new();
            let mut first_err = None;
            let mut ok = 0;
            for x in points {
                let oracle = SampleOracle::new(&model, x);
                match run(kb, query, &plan, &model, &oracle, trace.as_deref_mut().map(|t| t as _)) {
                    Ok((v, t)) => {
                        ok += 1;
                        for tag in t {
                            if !tags.contains(&tag) {
                                tags.push(tag);
                            }
                        }
                        best = Some(match best {
                            None => (v.clone(), v),
                            Some((lo, hi)) => (
                                if v.value < lo.value { v.clone() } else { lo },
                                if v.value > hi.value { v } else { hi },
                            ),
                        });
                    }
                    Err(e) if e.is_no_model() || matches!(e, InferError::BeliefZero(_)) => {
                        first_err.get_or_insert(e);
                    }
                    Err(e) => return Err(e),
                }
            }
            let Some((lo, hi)) = best else {
                return Err(first_err.unwrap_or_else(|| InferError::NoModel("no sampled measure has a model".into())));
            };
            tags.push("sampling".into());
            Ok(result(ResultMode::SampledInterval { samples: ok }, lo, hi, tags))
        }
    }
}

/// Answers a single-block query from the case its condition falls in,
/// ignoring the beliefs about every other case. `None` when the beliefs do
/// not have the shape of exclusive weighted cases, or the condition does
/// not lie inside one of them.
pub fn case_split(kb: &KnowledgeBase, query: &Query, opts: &Options) -> Result<Option<QueryResult>, InferError> {
    if query.kind != QueryKind::Subjective {
        return Ok(None);
    }
    let plan = plan(kb, query)?;
    let Shape::Single(block) = &plan.shape else {
        return Ok(None);
    };
    if block.is_empty() {
        return Ok(None);
    }
    let model = StatModel::compile_with_cap(kb, &plan.needs, opts.atom_cap)?;
    let oracle = LpOracle::new(&model);
    let ctx = block_ctx(kb, &model, block, &oracle)?;
    let solver = Solver::new(&oracle, None);
    let Some(split) = solver.case_split(&ctx.root, &ctx.beliefs)? else {
        return Ok(None);
    };
    let psi = model
        .event(ctx.level, &model.resolve_formula(&query.psi)?, &ctx.slots)?
        .intersection(&ctx.root.event);
    let mut keep: Option<Vec<usize>> = None;
    for (cell, p, sub) in &split.cases {
        if !p.is_zero() && oracle.is_null(&psi.difference(&cell.event))? {
            keep = Some(sub.iter().filter_map(|b| b.source).collect());
            break;
        }
    }
    let Some(keep) = keep else {
        return Ok(None);
    };
    let drop: BTreeSet<usize> = belief_indices(kb, block).into_iter().filter(|i| !keep.contains(i)).collect();
    let reduced = KnowledgeBase {
        signature: kb.signature.clone(),
        statistical: kb.statistical.clone(),
        beliefs: kb
            .beliefs
            .iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, b)| b.clone())
            .collect(),
    };
    let mut r = answer(&reduced, query, opts)?;
    r.derivation.insert(0, "case-split".into());
    Ok(Some(r))
}
