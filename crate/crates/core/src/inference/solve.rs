//! Belief states as mixtures of conditional statistical measures.
//!
//! The projection of the statistical measure onto the belief constraints is
//! never materialized over the full atom space. Instead the constraints are
//! decomposed into a list of leaves `(cell, weight)` such that the belief
//! state is `sum weight * mu(. | cell)`; queries are evaluated against that.

use std::cell::RefCell;

use num_traits::{One, Zero};

use super::oracle::{MeasureOracle, Scalar};
use super::InferError;
use crate::algebra::AtomSet;
use crate::crossentropy::{ce_project, CondConstraint, ConstraintRel, Distribution, Method, Trace};
use crate::lp::Q;
use crate::statistics::Event;

/// A compiled belief sentence: `nu(phi | psi) rel p`.
#[derive(Debug, Clone)]
pub struct Belief {
    pub phi: Event,
    pub psi: Event,
    pub rel: ConstraintRel,
    pub p: Q,
    pub label: String,
    pub phi_text: String,
    pub psi_text: String,
    /// Index into the KB's belief list, if it came from one.
    pub source: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub event: Event,
    pub label: String,
}

#[derive(Debug, Clone)]
pub struct Leaf {
    pub cell: Cell,
    pub weight: Scalar,
}

/// The top-level partition found by a case split.
#[derive(Debug, Clone)]
pub struct CaseSplit {
    pub cases: Vec<(Cell, Q, Vec<Belief>)>,
}

pub struct Solver<'a> {
    pub oracle: &'a dyn MeasureOracle,
    tags: RefCell<Vec<String>>,
    trace: RefCell<Option<&'a mut dyn FnMut(&crate::crossentropy::TraceRecord)>>,
}

fn and_label(a: &str, b: &str) -> String {
    match (a, b) {
        ("", x) | (x, "") => x.to_string(),
        (a, b) => format!("{a} & {b}"),
    }
}

impl<'a> Solver<'a> {
    pub fn new(oracle: &'a dyn MeasureOracle, trace: Trace<'a>) -> Self {
        Solver {
            oracle,
            tags: RefCell::new(Vec::new()),
            trace: RefCell::new(trace),
        }
    }

    pub fn tag(&self, t: &str) {
        let mut tags = self.tags.borrow_mut();
        if !tags.iter().any(|x| x == t) {
            tags.push(t.to_string());
        }
    }

    pub fn tags(&self) -> Vec<String> {
        self.tags.borrow().clone()
    }

    fn null(&self, e: &Event) -> Result<bool, InferError> {
        self.oracle.is_null(e)
    }

    /// `a` is contained in `b` up to a null set.
    fn within(&self, a: &Event, b: &Event) -> Result<bool, InferError> {
        self.null(&a.difference(b))
    }

    /// Leaves of the belief state restricted to `base`, scaled by `weight`.
    /// `query_psi` enables localization: when it lies inside the region the
    /// constraints talk about, only that region is resolved.
    pub fn solve(
        &self,
        base: Cell,
        weight: Scalar,
        beliefs: Vec<Belief>,
        query_psi: Option<&Event>,
        out: &mut Vec<Leaf>,
    ) -> Result<(), InferError> {
        if beliefs.is_empty() {
            out.push(Leaf { cell: base, weight });
            return Ok(());
        }
        let mut region = base.event.clone();
        region.set = AtomSet::empty(base.event.set.len());
        for b in &beliefs {
            region.set = region.set.union(&b.psi.intersection(&base.event).set);
        }
        if self.null(&region)? {
            // every constraint conditions on a null event and holds vacuously
            out.push(Leaf { cell: base, weight });
            return Ok(());
        }
        if let Some(psi) = query_psi {
            if !self.within(&base.event, &region)? && self.within(&psi.intersection(&base.event), &region)? {
                self.tag("localization");
                let label = beliefs
                    .iter()
                    .map(|b| b.psi_text.clone())
                    .collect::<Vec<_>>()
                    .join(" | ");
                let cell = Cell {
                    event: region,
                    label: and_label(&base.label, &format!("({label})")),
                };
                return self.solve(cell, weight, beliefs, query_psi, out);
            }
        }
        if let Some(split) = self.case_split(&base, &beliefs)? {
            self.tag("jeffrey");
            let live = match query_psi {
                Some(psi) => {
                    let mut n = 0;
                    for (c, _, _) in &split.cases {
                        if !self.null(&psi.intersection(&c.event))? {
                            n += 1;
                        }
                    }
                    n
                }
                None => 0,
            };
            for (cell, p, sub) in split.cases {
                if p.is_zero() {
                    continue;
                }
                if !sub.is_empty() {
                    self.tag("case-split");
                }
                let w = &weight * &Scalar::exact(p);
                let psi = if live <= 1 { query_psi } else { None };
                self.solve(cell, w, sub, psi, out)?;
            }
            return Ok(());
        }
        self.project(base, weight, &beliefs, out)
    }

    /// Detects exclusive cases with prescribed weights whose remaining
    /// constraints each live inside a single case.
    pub fn case_split(&self, base: &Cell, beliefs: &[Belief]) -> Result<Option<CaseSplit>, InferError> {
        let mut chosen: Vec<(usize, Event)> = Vec::new();
        for (i, b) in beliefs.iter().enumerate() {
            if b.rel != ConstraintRel::Eq || !self.within(&base.event, &b.psi)? {
                continue;
            }
            let a = b.phi.intersection(&b.psi).intersection(&base.event);
            let mut exclusive = true;
            for (_, c) in &chosen {
                if !self.null(&a.intersection(c))? {
                    exclusive = false;
                    break;
                }
            }
            if exclusive {
                chosen.push((i, a));
            }
        }
        if chosen.is_empty() {
            return Ok(None);
        }
        let total: Q = chosen.iter().map(|(i, _)| &beliefs[*i].p).sum();
        if total > Q::one() {
            return Err(InferError::NoModel(format!(
                "beliefs in exclusive cases add up to more than 1: {}",
                chosen.iter().map(|(i, _)| beliefs[*i].label.as_str()).collect::<Vec<_>>().join("; ")
            )));
        }
        let mut cases: Vec<(Cell, Q, Vec<Belief>)> = Vec::new();
        let mut rest = base.event.clone();
        for (i, a) in &chosen {
            rest = rest.difference(a);
            let label = and_label(&base.label, &beliefs[*i].phi_text);
            cases.push((Cell { event: a.clone(), label }, beliefs[*i].p.clone(), Vec::new()));
        }
        let rest_weight = Q::one() - total;
        if !rest.is_empty() {
            cases.push((
                Cell {
                    event: rest,
                    label: and_label(&base.label, "(remaining case)"),
                },
                rest_weight,
                Vec::new(),
            ));
        } else if !rest_weight.is_zero() {
            return Err(InferError::NoModel(format!(
                "beliefs in exhaustive cases add up to less than 1: {}",
                chosen.iter().map(|(i, _)| beliefs[*i].label.as_str()).collect::<Vec<_>>().join("; ")
            )));
        }
        'outer: for (i, b) in beliefs.iter().enumerate() {
            if chosen.iter().any(|(j, _)| *j == i) {
                continue;
            }
            let a = b.phi.intersection(&b.psi).intersection(&base.event);
            if b.rel == ConstraintRel::Eq && self.within(&base.event, &b.psi)? {
                // a restated case weight is redundant; a different one conflicts
                if let Some((j, _)) = chosen.iter().find(|(_, c)| *c == a) {
                    if beliefs[*j].p != b.p {
                        return Err(InferError::NoModel(format!(
                            "conflicting beliefs: {}; {}",
                            beliefs[*j].label, b.label
                        )));
                    }
                    continue;
                }
            }
            let den = b.psi.intersection(&base.event);
            for (cell, _, sub) in cases.iter_mut() {
                if self.within(&den, &cell.event)? {
                    sub.push(b.clone());
                    continue 'outer;
                }
            }
            return Ok(None);
        }
        for (cell, p, _) in &cases {
            if !p.is_zero() && self.null(&cell.event)? {
                return Err(InferError::NoModel(format!(
                    "belief {} is given to `{}`, which has statistical probability zero",
                    format_q(p),
                    cell.label
                )));
            }
        }
        Ok(Some(CaseSplit { cases }))
    }
}

fn format_q(q: &Q) -> String {
    crate::syntax::format_prob(q)
}

impl Solver<'_> {
    /// General case: project the measure of the coarse cells generated by
    /// the constraint events, then mix the conditional measures of the cells.
    fn project(&self, base: Cell, weight: Scalar, beliefs: &[Belief], out: &mut Vec<Leaf>) -> Result<(), InferError> {
        let mut cells: Vec<(Event, Vec<String>)> = vec![(base.event.clone(), Vec::new())];
        for b in beliefs {
            let both = b.phi.intersection(&b.psi);
            for (e, text) in [(&b.psi, &b.psi_text), (&both, &b.phi_text)] {
                let mut next = Vec::new();
                for (c, lits) in cells {
                    let inside = c.intersection(e);
                    let outside = c.difference(e);
                    if inside == c || outside == c {
                        next.push((c, lits));
                        continue;
                    }
                    let mut l1 = lits.clone();
                    l1.push(text.clone());
                    let mut l2 = lits;
                    l2.push(format!("!({text})"));
                    next.push((inside, l1));
                    next.push((outside, l2));
                }
                cells = next;
            }
        }
        let full = base.event.set.count() == base.event.set.len();
        let mut mu = Vec::with_capacity(cells.len());
        let mut labels = Vec::with_capacity(cells.len());
        for (c, lits) in &cells {
            let label = and_label(&base.label, &lits.join(" & "));
            let m = if self.null(c)? {
                Scalar::zero()
            } else if full {
                self.oracle.prob(c, &format!("the probability of `{label}`"))?
            } else {
                self.oracle
                    .cond(c, &base.event, &format!("the probability of `{label}`"))?
                    .unwrap_or_else(Scalar::zero)
            };
            mu.push(m);
            labels.push(label);
        }
        let coarse = match mu.iter().map(|m| m.exact.clone()).collect::<Option<Vec<Q>>>() {
            Some(exact) => Distribution::from_exact(exact)?,
            None => Distribution::normalized(mu.iter().map(|m| m.value).collect())?,
        };
        let n = cells.len();
        let rows: Vec<CondConstraint> = beliefs
            .iter()
            .map(|b| {
                let both = b.phi.intersection(&b.psi);
                let inside = |e: &Event| AtomSet::from_indices(n, (0..n).filter(|&k| cells[k].0.difference(e).is_empty()));
                CondConstraint {
                    phi: inside(&both),
                    psi: inside(&b.psi),
                    rel: b.rel,
                    p: b.p.clone(),
                    label: b.label.clone(),
                }
            })
            .collect();
        let result = {
            let mut trace = self.trace.borrow_mut();
            ce_project(&coarse, &rows, trace.as_deref_mut().map(|t| t as _))?
        };
        self.tag(match result.method {
            Method::Jeffrey => "jeffrey",
            _ => "projection",
        });
        for (k, (c, _)) in cells.into_iter().enumerate() {
            let w = match &result.nu.exact {
                Some(e) => Scalar::exact(e[k].clone()),
                None => Scalar::approx(result.nu.weights[k]),
            };
            if w.is_zero() {
                continue;
            }
            out.push(Leaf {
                cell: Cell {
                    event: c,
                    label: labels[k].clone(),
                },
                weight: &weight * &w,
            });
        }
        Ok(())
    }

    /// `nu(phi | psi)` for the belief state `sum weight * mu(. | cell)`.
    pub fn evaluate(&self, leaves: &[Leaf], phi: &Event, psi: &Event, what: &str) -> Result<Scalar, InferError> {
        let mut live = Vec::new();
        for l in leaves {
            let e = psi.intersection(&l.cell.event);
            if !l.weight.is_zero() && !self.null(&e)? {
                live.push((l, e));
            }
        }
        match live.as_slice() {
            [] => Err(InferError::BeliefZero(what.to_string())),
            [(l, e)] => Ok(self
                .oracle
                .cond(phi, e, &format!("the probability of {what} given `{}`", l.cell.label))?
                .expect("non-null condition")),
            _ => {
                self.tag("partition-mixing");
                let (mut num, mut den) = (Scalar::zero(), Scalar::zero());
                for (l, e) in &live {
                    let m = self
                        .oracle
                        .cond(psi, &l.cell.event, &format!("the probability of the condition given `{}`", l.cell.label))?
                        .expect("non-null cell");
                    let c = self
                        .oracle
                        .cond(phi, e, &format!("the probability of {what} given `{}`", l.cell.label))?
                        .expect("non-null condition");
                    let wm = &l.weight * &m;
                    num = &num + &(&wm * &c);
                    den = &den + &wm;
                }
                if den.is_zero() {
                    return Err(InferError::BeliefZero(what.to_string()));
                }
                Ok(num.div(&den))
            }
        }
    }
}
