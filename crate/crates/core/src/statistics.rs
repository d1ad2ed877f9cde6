//! Statistical sentences as linear constraints on the domain measure.
//!
//! The measure is represented twice: `mu1` over the arity-1 atom space of all
//! relevant predicates, and (when a two-variable sentence or query needs it)
//! `mu2` over the arity-2 space of the predicates that occur at arity 2. The
//! two are tied together by marginal rows, and `mu2` is swap-invariant.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::Mutex;

use num_traits::{One, Signed, Zero};

use crate::algebra::{AlgebraError, AtomSet, AtomSpace, DEFAULT_ATOM_CAP};
use crate::lp::{Cmp, Lp, LpOutcome, LpRow, Simplex, Q};
use crate::syntax::{Formula, KnowledgeBase, Signature, StatSentence, StatTerm};
/// Random-objective vertices solved when sampling; further samples are mixtures.
pub const MAX_SAMPLE_VERTICES: usize = 32;


#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StatError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("statistical sentences are inconsistent: {}", .0.join("; "))]
    Infeasible(Vec<String>),
    #[error("constant `{0}` cannot appear in a statistical formula")]
    Constant(String),
    #[error("statistical formula over {0} variables is outside the supported fragment")]
    Arity(usize),
    #[error("nested statistical term {0} is not decided by the other sentences")]
    UndecidedNested(String),
    #[error("LP for {0} is unbounded")]
    Unbounded(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowRel {
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintRow {
    pub coeffs: Vec<(usize, Q)>,
    pub rel: RowRel,
    pub rhs: Q,
    /// Human-readable origin, e.g. the sentence text.
    pub provenance: String,
    /// Index of the source statistical sentence, if any.
    pub source: Option<usize>,
    /// The source relation was strict; the row is its closure.
    pub strict: bool,
}

/// Linear rows over `n` non-negative columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearConstraintSet {
    pub n: usize,
    pub rows: Vec<ConstraintRow>,
}

impl LinearConstraintSet {
    pub fn new(n: usize) -> Self {
        LinearConstraintSet { n, rows: Vec::new() }
    }

    pub fn push(&mut self, coeffs: Vec<(usize, Q)>, rel: RowRel, rhs: Q, provenance: impl Into<String>) {
        self.rows.push(ConstraintRow {
            coeffs,
            rel,
            rhs,
            provenance: provenance.into(),
            source: None,
            strict: false,
        });
    }

    pub fn to_lp(&self) -> Lp {
        self.lp_without(&BTreeSet::new())
    }

    fn lp_without(&self, dropped: &BTreeSet<usize>) -> Lp {
        let mut lp = Lp::new(self.n);
        for r in &self.rows {
            if r.source.is_some_and(|s| dropped.contains(&s)) {
                continue;
            }
            let cmp = match r.rel {
                RowRel::Ge => Cmp::Ge,
                RowRel::Eq => Cmp::Eq,
            };
            lp.push(r.coeffs.clone(), cmp, r.rhs.clone());
        }
        lp
    }

    /// Largest residual of `x` against the rows (0 when all hold).
    pub fn residual(&self, x: &[Q]) -> Q {
        let mut worst = Q::zero();
        for r in &self.rows {
            let mut v = -r.rhs.clone();
            for (j, c) in &r.coeffs {
                v += c * &x[*j];
            }
            let bad = match r.rel {
                RowRel::Ge => (-v).max(Q::zero()),
                RowRel::Eq => v.abs(),
            };
            worst = worst.max(bad);
        }
        worst
    }

    /// Sparse text dump: `provenance<TAB>rel<TAB>rhs<TAB>j:c j:c ...`.
    pub fn dump(&self) -> String {
        let mut out = format!("# columns {} rows {}\n", self.n, self.rows.len());
        for r in &self.rows {
            let rel = match r.rel {
                RowRel::Ge => ">=",
                RowRel::Eq => "=",
            };
            let nz: Vec<String> = r.coeffs.iter().map(|(j, c)| format!("{j}:{c}")).collect();
            let _ = writeln!(out, "{}\t{}\t{}\t{}", r.provenance, rel, r.rhs, nz.join(" "));
        }
        out
    }
}

/// Exact bounds of a (conditional) probability over the feasible polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
    pub lo_attained: bool,
    pub hi_attained: bool,
    /// Whether some feasible measure gives the condition positive mass.
    pub conditioning_possible: bool,
}

impl Interval {
    pub fn point(v: Q) -> Interval {
        Interval {
            lo: v.clone(),
            hi: v,
            lo_attained: true,
            hi_attained: true,
            conditioning_possible: true,
        }
    }

    pub fn unit() -> Interval {
        Interval {
            lo: Q::zero(),
            hi: Q::one(),
            lo_attained: true,
            hi_attained: true,
            conditioning_possible: false,
        }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

/// Which measure an event lives under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    One,
    Two,
}

/// A set of atoms of `mu1` or `mu2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Event {
    pub level: Level,
    pub set: AtomSet,
}

impl Event {
    pub fn intersection(&self, o: &Event) -> Event {
        assert_eq!(self.level, o.level, "events of different measures");
        Event {
            level: self.level,
            set: self.set.intersection(&o.set),
        }
    }

    pub fn complement(&self) -> Event {
        Event {
            level: self.level,
            set: self.set.complement(),
        }
    }

    pub fn difference(&self, o: &Event) -> Event {
        assert_eq!(self.level, o.level, "events of different measures");
        Event {
            level: self.level,
            set: self.set.difference(&o.set),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }
}

/// Predicates the model must be able to talk about.
#[derive(Debug, Clone, Default)]
pub struct Needs {
    pub unary: BTreeSet<String>,
    pub binary: BTreeSet<String>,
}

impl Needs {
    /// Every predicate of the signature at arity 1.
    pub fn all(sig: &Signature) -> Needs {
        Needs {
            unary: sig.predicates.iter().map(|(p, _)| p.clone()).collect(),
            binary: BTreeSet::new(),
        }
    }
}

/// The compiled statistical part of a knowledge base.
#[derive(Debug)]
pub struct StatModel {
    pub space1: AtomSpace,
    pub space2: Option<AtomSpace>,
    pub constraints: LinearConstraintSet,
    /// Source sentences that were compiled, by index into the KB.
    pub sentences: Vec<usize>,
    base: Mutex<Option<Option<Simplex>>>,
    fractional: Mutex<HashMap<Vec<usize>, Option<Simplex>>>,
}

impl StatModel {
    pub fn n1(&self) -> usize {
        self.space1.len()
    }

    pub fn space(&self, level: Level) -> &AtomSpace {
        match level {
            Level::One => &self.space1,
            Level::Two => self.space2.as_ref().expect("model has no arity-2 space"),
        }
    }

    fn offset(&self, level: Level) -> usize {
        match level {
            Level::One => 0,
            Level::Two => self.n1(),
        }
    }

    /// Coefficients of `mu(e)` over the LP columns.
    pub fn form(&self, e: &Event) -> Vec<(usize, Q)> {
        let off = self.offset(e.level);
        e.set.iter().map(|i| (off + i, Q::one())).collect()
    }

    pub fn full(&self, level: Level) -> Event {
        Event {
            level,
            set: self.space(level).full(),
        }
    }

    /// Extension of a formula whose variables/constants map to slots.
    pub fn event(
        &self,
        level: Level,
        f: &Formula,
        slots: &HashMap<String, usize>,
    ) -> Result<Event, AlgebraError> {
        Ok(Event {
            level,
            set: self.space(level).extension(f, slots)?,
        })
    }

    /// Measure of `e` under a full column vector.
    pub fn mass(&self, x: &[Q], e: &Event) -> Q {
        let off = self.offset(e.level);
        e.set.iter().map(|i| &x[off + i]).sum()
    }
}

/// Predicates connected to `seed` through shared statistical sentences.
fn relevant_predicates(kb: &KnowledgeBase, seed: &BTreeSet<String>) -> BTreeSet<String> {
    let mut keep = seed.clone();
    loop {
        let before = keep.len();
        for s in &kb.statistical {
            let preds = s.predicates();
            if preds.iter().any(|p| keep.contains(p)) {
                keep.extend(preds);
            }
        }
        if keep.len() == before {
            return keep;
        }
    }
}

fn slots_for(vars: &[String]) -> HashMap<String, usize> {
    vars.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect()
}

fn level_of(arity: usize) -> Result<Level, StatError> {
    match arity {
        0 | 1 => Ok(Level::One),
        2 => Ok(Level::Two),
        k => Err(StatError::Arity(k)),
    }
}

fn reject_constants(s: &StatSentence) -> Result<(), StatError> {
    match s.constants().into_iter().next() {
        Some(c) => Err(StatError::Constant(c)),
        None => Ok(()),
    }
}

impl StatModel {
    pub fn compile(kb: &KnowledgeBase, needs: &Needs) -> Result<StatModel, StatError> {
        Self::compile_with_cap(kb, needs, DEFAULT_ATOM_CAP)
    }

    pub fn compile_with_cap(kb: &KnowledgeBase, needs: &Needs, cap: usize) -> Result<StatModel, StatError> {
        let mut seed = needs.unary.clone();
        seed.extend(needs.binary.iter().cloned());
        let keep = relevant_predicates(kb, &seed);
        let chosen: Vec<usize> = kb
            .statistical
            .iter()
            .enumerate()
            .filter(|(_, s)| {
                let p = s.predicates();
                p.is_empty() || p.iter().any(|x| keep.contains(x))
            })
            .map(|(i, _)| i)
            .collect();
        for &i in &chosen {
            reject_constants(&kb.statistical[i])?;
        }
        let mut pairs: BTreeSet<String> = needs.binary.clone();
        for &i in &chosen {
            let s = &kb.statistical[i];
            if s.arity() == 2 {
                pairs.extend(s.predicates());
            } else if s.arity() > 2 {
                return Err(StatError::Arity(s.arity()));
            }
        }
        let sig1 = kb.signature.restrict(&keep);
        let space1 = AtomSpace::build_with_cap(&sig1, 1, cap)?;
        let space2 = if pairs.is_empty() && needs.binary.is_empty() && !chosen.iter().any(|&i| kb.statistical[i].arity() == 2) {
            None
        } else {
            Some(AtomSpace::build_with_cap(&kb.signature.restrict(&pairs), 2, cap)?)
        };
        let n = space1.len() + space2.as_ref().map_or(0, |s| s.len());
        let mut model = StatModel {
            space1,
            space2,
            constraints: LinearConstraintSet::new(n),
            sentences: chosen.clone(),
            base: Mutex::new(None),
            fractional: Mutex::new(HashMap::new()),
        };
        model.structural_rows();
        // sentences with nested closed terms are compiled after the others
        let (plain, nested): (Vec<usize>, Vec<usize>) =
            chosen.iter().partition(|&&i| !sentence_has_nested(&kb.statistical[i]));
        for i in plain {
            let rows = model.sentence_rows(&kb.statistical[i], i)?;
            model.constraints.rows.extend(rows);
        }
        for i in nested {
            let resolved = model.resolve_nested(&kb.statistical[i])?;
            let rows = model.sentence_rows(&resolved, i)?;
            model.add_rows(rows);
        }
        Ok(model)
    }

    fn add_rows(&mut self, rows: Vec<ConstraintRow>) {
        self.constraints.rows.extend(rows);
        *self.base.lock().unwrap() = None;
        self.fractional.lock().unwrap().clear();
    }

    /// Normalization, marginal linking and swap-invariance rows.
    fn structural_rows(&mut self) {
        let n1 = self.space1.len();
        let cs = &mut self.constraints;
        cs.push((0..n1).map(|j| (j, Q::one())).collect(), RowRel::Eq, Q::one(), "normalize mu1");
        let Some(s2) = &self.space2 else { return };
        let n2 = s2.len();
        cs.push((0..n2).map(|j| (n1 + j, Q::one())).collect(), RowRel::Eq, Q::one(), "normalize mu2");
        let shared = s2.predicates().to_vec();
        let mut keys: std::collections::BTreeMap<u64, Vec<(usize, Q)>> = Default::default();
        for a in 0..n1 {
            keys.entry(self.space1.slot_key(a, 0, &shared)).or_default().push((a, Q::one()));
        }
        for a in 0..n2 {
            keys.entry(s2.slot_key(a, 0, &shared)).or_default().push((n1 + a, -Q::one()));
        }
        for (k, coeffs) in keys {
            cs.push(coeffs, RowRel::Eq, Q::zero(), format!("marginal {k:b}"));
        }
        let swap = s2.swap().expect("arity-2 space has a swap");
        for (a, &b) in swap.iter().enumerate() {
            if a < b {
                cs.push(
                    vec![(n1 + a, Q::one()), (n1 + b, -Q::one())],
                    RowRel::Eq,
                    Q::zero(),
                    format!("swap {a}~{b}"),
                );
            }
        }
    }

    fn sentence_rows(&self, s: &StatSentence, index: usize) -> Result<Vec<ConstraintRow>, StatError> {
        let level = level_of(s.arity())?;
        let text = s.to_string();
        let row = |coeffs, rel, strict| ConstraintRow {
            coeffs,
            rel,
            rhs: Q::zero(),
            provenance: text.clone(),
            source: Some(index),
            strict,
        };
        match s {
            StatSentence::Axiom { vars, matrix } => {
                let e = self.event(level, matrix, &slots_for(vars))?;
                let coeffs = self.form(&e.complement());
                // mu(not E) = 0, written as -mu(not E) >= 0 to keep rows homogeneous
                let coeffs = coeffs.into_iter().map(|(j, c)| (j, -c)).collect();
                Ok(vec![row(coeffs, RowRel::Ge, false)])
            }
            StatSentence::Stat(st) => {
                let slots = slots_for(&st.bound);
                let mut out = Vec::new();
                for c in st.canonical() {
                    let phi = self.event(level, &c.phi, &slots)?;
                    let psi = self.event(level, &c.psi, &slots)?;
                    out.push(row(conditional_row(self, &phi, &psi, &c.p), RowRel::Ge, c.strict));
                }
                Ok(out)
            }
        }
    }

    /// Replaces closed nested terms by their truth value under the rows
    /// compiled so far.
    fn resolve_nested(&self, s: &StatSentence) -> Result<StatSentence, StatError> {
        Ok(match s {
            StatSentence::Stat(st) => StatSentence::Stat(StatTerm {
                phi: self.resolve_formula(&st.phi)?,
                psi: self.resolve_formula(&st.psi)?,
                ..st.clone()
            }),
            other => other.clone(),
        })
    }

    /// Decides every closed statistical term inside `f`: true when all
    /// feasible measures satisfy it, false when none does.
    pub fn resolve_formula(&self, f: &Formula) -> Result<Formula, StatError> {
        if !f.contains_stat() {
            return Ok(f.clone());
        }
        let mut decide = |t: &StatTerm| -> Result<Formula, StatError> {
            let level = level_of(t.bound.len())?;
            let slots = slots_for(&t.bound);
            let mut all = true;
            for c in t.canonical() {
                let phi = self.event(level, &c.phi, &slots)?;
                let psi = self.event(level, &c.psi, &slots)?;
                let iv = self.conditional_interval(&phi, &psi)?;
                if !iv.conditioning_possible {
                    continue;
                }
                let holds = if c.strict { iv.lo > c.p } else { iv.lo >= c.p };
                let fails = if c.strict { iv.hi <= c.p } else { iv.hi < c.p };
                if fails {
                    all = false;
                } else if !holds {
                    return Err(StatError::UndecidedNested(format_term(t)));
                }
            }
            Ok(if all { Formula::True } else { Formula::False })
        };
        f.map_stat(&mut decide)
    }
}

fn format_term(t: &StatTerm) -> String {
    let s = StatSentence::Stat(t.clone());
    s.to_string()
}

fn sentence_has_nested(s: &StatSentence) -> bool {
    match s {
        StatSentence::Stat(st) => st.phi.contains_stat() || st.psi.contains_stat(),
        StatSentence::Axiom { .. } => false,
    }
}

/// `mu(phi & psi) - p mu(psi)` as coefficients.
fn conditional_row(m: &StatModel, phi: &Event, psi: &Event, p: &Q) -> Vec<(usize, Q)> {
    let both = phi.intersection(psi);
    let off = m.offset(psi.level);
    let one_minus = Q::one() - p;
    let neg = -p.clone();
    psi.set
        .iter()
        .filter_map(|i| {
            let c = if both.set.contains(i) { one_minus.clone() } else { neg.clone() };
            (!c.is_zero()).then_some((off + i, c))
        })
        .collect()
}

impl StatModel {
    fn base(&self) -> Option<Simplex> {
        let mut slot = self.base.lock().unwrap();
        slot.get_or_insert_with(|| Simplex::new(&self.constraints.to_lp()))
            .clone()
    }

    /// A feasible measure, or `None` when the sentences are inconsistent.
    pub fn feasible(&self) -> Option<Vec<Q>> {
        self.base().map(|s| s.point())
    }

    fn require_feasible(&self) -> Result<Simplex, StatError> {
        self.base()
            .ok_or_else(|| StatError::Infeasible(self.conflicting_sentences()))
    }

    /// A minimal set of sentences whose rows are jointly infeasible, found by
    /// a deletion filter; empty when the model is feasible.
    pub fn conflicting_sentences(&self) -> Vec<String> {
        if Simplex::new(&self.constraints.to_lp()).is_some() {
            return Vec::new();
        }
        let mut dropped = BTreeSet::new();
        for &s in &self.sentences {
            dropped.insert(s);
            if Simplex::new(&self.constraints.lp_without(&dropped)).is_some() {
                dropped.remove(&s);
            }
        }
        let mut names = Vec::new();
        for r in &self.constraints.rows {
            if let Some(s) = r.source {
                if !dropped.contains(&s) && !names.contains(&r.provenance) {
                    names.push(r.provenance.clone());
                }
            }
        }
        names
    }

    /// Bounds of `mu(e)`.
    pub fn interval(&self, e: &Event) -> Result<Interval, StatError> {
        let base = self.require_feasible()?;
        let obj = self.form(e);
        let (lo, lo_x) = optimum(base.minimize(&obj), "minimum")?;
        let (hi, hi_x) = optimum(base.maximize(&obj), "maximum")?;
        Ok(Interval {
            lo_attained: self.strict_slack(&lo_x, None),
            hi_attained: self.strict_slack(&hi_x, None),
            lo,
            hi,
            conditioning_possible: true,
        })
    }

    /// Bounds of `mu(phi | psi)` over feasible measures with `mu(psi) > 0`,
    /// via the Charnes-Cooper substitution `y = t mu`, `y(psi) = 1`.
    pub fn conditional_interval(&self, phi: &Event, psi: &Event) -> Result<Interval, StatError> {
        if psi.set == self.space(psi.level).full() {
            return self.interval(phi);
        }
        self.require_feasible()?;
        let key: Vec<usize> = self.form(psi).into_iter().map(|(j, _)| j).collect();
        let simplex = {
            let mut cache = self.fractional.lock().unwrap();
            cache
                .entry(key.clone())
                .or_insert_with(|| Simplex::new(&self.charnes_cooper(&key)))
                .clone()
        };
        let Some(simplex) = simplex else {
            return Ok(Interval::unit());
        };
        let obj = self.form(&phi.intersection(psi));
        let (lo, lo_y) = optimum(simplex.minimize(&obj), "minimum")?;
        let (hi, hi_y) = optimum(simplex.maximize(&obj), "maximum")?;
        let t = self.constraints.n;
        Ok(Interval {
            lo_attained: lo_y[t].is_positive() && self.strict_slack(&lo_y, Some(t)),
            hi_attained: hi_y[t].is_positive() && self.strict_slack(&hi_y, Some(t)),
            lo,
            hi,
            conditioning_possible: true,
        })
    }

    fn charnes_cooper(&self, psi_cols: &[usize]) -> Lp {
        let t = self.constraints.n;
        let mut lp = Lp::new(t + 1);
        for r in &self.constraints.rows {
            let mut coeffs = r.coeffs.clone();
            if !r.rhs.is_zero() {
                coeffs.push((t, -r.rhs.clone()));
            }
            let cmp = match r.rel {
                RowRel::Ge => Cmp::Ge,
                RowRel::Eq => Cmp::Eq,
            };
            lp.push(coeffs, cmp, Q::zero());
        }
        lp.push(psi_cols.iter().map(|&j| (j, Q::one())).collect(), Cmp::Eq, Q::one());
        lp
    }

    /// False when some strict row is tight at `x` (the endpoint is then only
    /// a supremum/infimum). `t` is the homogenizing column, if any.
    fn strict_slack(&self, x: &[Q], t: Option<usize>) -> bool {
        self.constraints.rows.iter().filter(|r| r.strict).all(|r| {
            let mut v = Q::zero();
            for (j, c) in &r.coeffs {
                v += c * &x[*j];
            }
            if let Some(t) = t {
                v -= &r.rhs * &x[t];
            } else {
                v -= &r.rhs;
            }
            v.is_positive()
        })
    }

    /// The value of `mu(e)` when every feasible measure agrees on it.
    pub fn pinned(&self, e: &Event) -> Result<Option<Q>, StatError> {
        let iv = self.interval(e)?;
        Ok(iv.is_point().then_some(iv.lo))
    }

    /// The value of `mu(phi | psi)` when it is the same for every feasible
    /// measure giving `psi` positive mass; `None` otherwise or when no such
    /// measure exists.
    pub fn pinned_conditional(&self, phi: &Event, psi: &Event) -> Result<Option<Q>, StatError> {
        let iv = self.conditional_interval(phi, psi)?;
        Ok((iv.conditioning_possible && iv.is_point()).then_some(iv.lo))
    }

    /// Point values of all events, if each is fixed by the constraints.
    pub fn unique_on(&self, events: &[Event]) -> Result<Option<Vec<Q>>, StatError> {
        let mut out = Vec::with_capacity(events.len());
        for e in events {
            match self.pinned(e)? {
                Some(v) => out.push(v),
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }

    /// Atoms of `level` that some feasible measure weights positively.
    pub fn max_support(&self, level: Level) -> Result<AtomSet, StatError> {
        self.require_feasible()?;
        let t = self.constraints.n;
        let rows: Vec<LpRow> = self.charnes_cooper(&[]).rows;
        // drop the trivial `0 = 1` row appended for an empty condition
        let rows = rows[..rows.len() - 1].to_vec();
        let support = crate::lp::max_support(t + 1, &rows)
            .ok_or_else(|| StatError::Infeasible(self.conflicting_sentences()))?;
        let off = self.offset(level);
        let n = self.space(level).len();
        Ok(AtomSet::from_indices(n, (0..n).filter(|&i| support[off + i])))
    }
}

impl StatModel {
    /// Draws `k` statistical measures: near-extreme points (random-objective
    /// vertices pulled 1/64 of the way toward a relative-interior point) and
    /// random mixtures that always include the interior point. Every sample
    /// gives positive mass to each atom any measure can make positive.
    pub fn sample(&self, k: usize, rng: &mut impl rand::Rng) -> Result<Vec<Vec<Q>>, StatError> {
        let base = self.require_feasible()?;
        let n = self.constraints.n;
        let interior = self.relative_interior()?;
        let n_vertices = k.div_ceil(2).clamp(1, MAX_SAMPLE_VERTICES);
        let mut vertices: Vec<Vec<Q>> = Vec::new();
        let mut attempts = 0;
        while vertices.len() < n_vertices && attempts < 4 * n_vertices {
            attempts += 1;
            let obj: Vec<(usize, Q)> = (0..n)
                .map(|j| (j, Q::from_integer(rng.gen_range(-8i64..=8).into())))
                .collect();
            if let LpOutcome::Optimal { x, .. } = base.maximize(&obj) {
                if !vertices.contains(&x) {
                    vertices.push(x);
                }
            }
        }
        let blend = |parts: &[(i64, &Vec<Q>)]| -> Vec<Q> {
            let total: i64 = parts.iter().map(|p| p.0).sum();
            let mut mix = vec![Q::zero(); n];
            for (w, v) in parts {
                let f = Q::new((*w).into(), total.into());
                for (m, x) in mix.iter_mut().zip(v.iter()) {
                    *m += &f * x;
                }
            }
            mix
        };
        let mut out = vec![interior.clone()];
        out.extend(vertices.iter().map(|v| blend(&[(63, v), (1, &interior)])));
        while out.len() < k && !vertices.is_empty() {
            let picks = rng.gen_range(1..=3usize);
            let mut parts: Vec<(i64, &Vec<Q>)> = (0..picks)
                .map(|_| (rng.gen_range(1..=16), &vertices[rng.gen_range(0..vertices.len())]))
                .collect();
            parts.push((rng.gen_range(1..=16), &interior));
            out.push(blend(&parts));
        }
        out.truncate(k.max(1));
        Ok(out)
    }

    /// A feasible measure that is positive on every atom some feasible
    /// measure makes positive.
    fn relative_interior(&self) -> Result<Vec<Q>, StatError> {
        let t = self.constraints.n;
        let rows = self.charnes_cooper(&[]).rows;
        let rows = &rows[..rows.len() - 1];
        let y = crate::lp::max_support_point(t + 1, rows)
            .ok_or_else(|| StatError::Infeasible(self.conflicting_sentences()))?;
        Ok(y[..t].iter().map(|v| v / &y[t]).collect())
    }
}

fn optimum(out: LpOutcome, what: &str) -> Result<(Q, Vec<Q>), StatError> {
    match out {
        LpOutcome::Optimal { value, x } => Ok((value, x)),
        LpOutcome::Unbounded => Err(StatError::Unbounded(what.to_string())),
        LpOutcome::Infeasible => Err(StatError::Infeasible(Vec::new())),
    }
}

/// Builds the model a statistical query needs and bounds it.
pub fn stat_entail_interval(
    kb: &KnowledgeBase,
    phi: &Formula,
    psi: &Formula,
    bound: &[String],
    cap: usize,
) -> Result<Interval, StatError> {
    for f in [phi, psi] {
        if let Some(c) = f.all_constants().into_iter().next() {
            return Err(StatError::Constant(c));
        }
    }
    let level = level_of(bound.len())?;
    let mut preds = BTreeSet::new();
    phi.predicates(&mut preds);
    psi.predicates(&mut preds);
    let needs = match level {
        Level::One => Needs { unary: preds, binary: BTreeSet::new() },
        Level::Two => Needs { unary: BTreeSet::new(), binary: preds },
    };
    let model = StatModel::compile_with_cap(kb, &needs, cap)?;
    let slots = slots_for(bound);
    let phi_e = model.event(level, phi, &slots)?;
    let psi_e = model.event(level, psi, &slots)?;
    model.conditional_interval(&phi_e, &psi_e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_kb, parse_query};

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn stat(kb: &KnowledgeBase, text: &str) -> Interval {
        let query = parse_query(text, &kb.signature).unwrap();
        stat_entail_interval(kb, &query.phi, &query.psi, &query.bound, DEFAULT_ATOM_CAP).unwrap()
    }

    fn kb(name: &str) -> KnowledgeBase {
        let path = format!("{}/examples/{name}", env!("CARGO_MANIFEST_DIR"));
        parse_kb(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    #[test]
    fn movies_with_action() {
        let kb = kb("kb_f2.kb");
        let a = stat(&kb, "[HappyEnd(v) | American(v) & Mystery(v) & Action(v)]{v} = ?");
        assert_eq!((a.lo, a.hi), (q(6, 7), q(6, 7)));
        let b = stat(&kb, "[HappyEnd(v) | American(v) & Mystery(v) & !Action(v)]{v} = ?");
        assert_eq!((b.lo, b.hi), (q(2, 3), q(2, 3)));
    }

    #[test]
    fn unconstrained_query_is_the_unit_interval() {
        let kb = parse_kb("pred P/1").unwrap();
        let a = stat(&kb, "[P(v)]{v} = ?");
        assert_eq!((a.lo, a.hi), (q(0, 1), q(1, 1)));
    }

    #[test]
    fn better_under_swap_invariance() {
        let kb = kb("kb_f1f2.kb");
        let a = stat(&kb, "[Better(u, w) | !(u == w) & HappyEnd(u) & HappyEnd(w)]{u, w} = ?");
        assert_eq!((a.lo, a.hi), (q(1, 2), q(1, 2)));
        let b = stat(&kb, "[Better(u, w) | !(u == w) & !HappyEnd(u) & !HappyEnd(w)]{u, w} = ?");
        assert_eq!((b.lo, b.hi), (q(1, 2), q(1, 2)));
        let c = stat(&kb, "[Better(u, w) | !HappyEnd(u) & HappyEnd(w)]{u, w} = ?");
        assert_eq!((c.lo, c.hi), (q(1, 20), q(1, 20)));
    }

    #[test]
    fn contradictory_bounds_are_named() {
        let kb = parse_kb("pred P/1\n[P(v)]{v} >= 0.6\n[P(v)]{v} <= 0.4\n[P(v) | P(v)]{v} >= 0").unwrap();
        let m = StatModel::compile(&kb, &Needs::all(&kb.signature)).unwrap();
        assert!(m.feasible().is_none());
        let names = m.conflicting_sentences();
        assert_eq!(names.len(), 2, "{names:?}");
        assert!(names[0].contains(">= 0.6"));
    }

    #[test]
    fn pinned_values_of_the_action_partition() {
        let kb = kb("kb_f2.kb");
        let m = StatModel::compile(&kb, &Needs::all(&kb.signature)).unwrap();
        let s = HashMap::from([("v".to_string(), 0)]);
        let amy = m.event(Level::One, &parse_query("[American(v) & Mystery(v)]{v} = ?", &kb.signature).unwrap().phi, &s).unwrap();
        let mut vals = Vec::new();
        for f in ["Action(v) & HappyEnd(v)", "Action(v) & !HappyEnd(v)", "!Action(v) & HappyEnd(v)", "!Action(v) & !HappyEnd(v)"] {
            let phi = parse_query(&format!("[{f}]{{v}} = ?"), &kb.signature).unwrap().phi;
            let e = m.event(Level::One, &phi, &s).unwrap();
            vals.push(m.pinned_conditional(&e, &amy).unwrap().unwrap());
        }
        assert_eq!(vals, vec![q(6, 10), q(1, 10), q(2, 10), q(1, 10)]);
    }

    #[test]
    fn strict_rows_mark_endpoints_open() {
        let kb = parse_kb("pred P/1\n[P(v)]{v} > 0.5").unwrap();
        let a = stat(&kb, "[P(v)]{v} = ?");
        assert_eq!(a.lo, q(1, 2));
        assert!(!a.lo_attained && a.hi_attained);
    }

    #[test]
    fn max_support_excludes_null_atoms() {
        let kb = parse_kb("pred P/1\npred Q/1\n[P(v)]{v} = 0\n[Q(v)]{v} = 1/2").unwrap();
        let m = StatModel::compile(&kb, &Needs::all(&kb.signature)).unwrap();
        let s = m.max_support(Level::One).unwrap();
        assert_eq!(s.count(), 2);
    }
}
