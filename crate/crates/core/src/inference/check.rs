use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde_json::json;

use super::{block_ctx, decompose_blocks, Belief, InferError, LpOracle};
use crate::algebra::{AlgebraError, DEFAULT_ATOM_CAP};
use crate::crossentropy::ConstraintRel;
use crate::lp::{Cmp, Lp, Simplex, Q};
use crate::statistics::{Needs, StatError, StatModel};
use crate::syntax::KnowledgeBase;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    /// `None` when the check could not be run.
    pub statistical_feasible: Option<bool>,
    pub has_model: Verdict,
    /// Sentences that cannot hold together.
    pub conflicts: Vec<String>,
    pub notes: Vec<String>,
}

impl ConsistencyReport {
    pub fn to_text(&self) -> String {
        let mut out = format!("has_model: {}\n", self.has_model.name());
        if let Some(f) = self.statistical_feasible {
            out += &format!("statistical part consistent: {}\n", if f { "yes" } else { "no" });
        }
        for c in &self.conflicts {
            out += &format!("conflict: {c}\n");
        }
        for n in &self.notes {
            out += &format!("note: {n}\n");
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "has_model": self.has_model.name(),
            "statistical_feasible": self.statistical_feasible,
            "conflicts": self.conflicts,
            "notes": self.notes,
        })
    }
}

pub fn check_kb(kb: &KnowledgeBase) -> ConsistencyReport {
    check_kb_with_cap(kb, DEFAULT_ATOM_CAP)
}

fn unknown(note: String, feasible: Option<bool>) -> ConsistencyReport {
    ConsistencyReport {
        statistical_feasible: feasible,
        has_model: Verdict::Unknown,
        conflicts: Vec::new(),
        notes: vec![note],
    }
}

fn no(conflicts: Vec<String>, feasible: bool) -> ConsistencyReport {
    ConsistencyReport {
        statistical_feasible: Some(feasible),
        has_model: Verdict::No,
        conflicts,
        notes: Vec::new(),
    }
}

/// Whether some belief state on the atoms in `support` satisfies `beliefs`.
fn beliefs_feasible(support: &[usize], beliefs: &[&Belief]) -> bool {
    let mut lp = Lp::new(support.len());
    lp.push((0..support.len()).map(|j| (j, Q::one())).collect(), Cmp::Eq, Q::one());
    for b in beliefs {
        let both = b.phi.intersection(&b.psi);
        let one_minus = Q::one() - &b.p;
        let coeffs = support
            .iter()
            .enumerate()
            .filter(|(_, &x)| b.psi.set.contains(x))
            .map(|(j, &x)| (j, if both.set.contains(x) { one_minus.clone() } else { -b.p.clone() }))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let cmp = match b.rel {
            ConstraintRel::Ge => Cmp::Ge,
            ConstraintRel::Eq => Cmp::Eq,
        };
        lp.push(coeffs, cmp, Q::zero());
    }
    Simplex::new(&lp).is_some()
}

/// Decides whether the knowledge base has a model: the statistical
/// sentences must be jointly satisfiable, and for each block some
/// statistical measure must admit a belief state that satisfies the block's
/// beliefs and is absolutely continuous with respect to it.
pub fn check_kb_with_cap(kb: &KnowledgeBase, cap: usize) -> ConsistencyReport {
    let blocks = decompose_blocks(kb).blocks;
    let mut needs = Needs::all(&kb.signature);
    for block in &blocks {
        if block.len() > 2 && kb.beliefs.iter().any(|b| b.subjects().iter().any(|s| block.contains(s))) {
            return unknown(format!("block {{{}}} links more than two individuals", block.join(", ")), None);
        }
        if block.len() == 2 {
            let mut preds = BTreeSet::new();
            for b in kb.beliefs.iter().filter(|b| b.subjects().iter().any(|s| block.contains(s))) {
                preds.extend(b.predicates());
            }
            needs.binary.extend(preds);
        }
    }
    let model = match StatModel::compile_with_cap(kb, &needs, cap) {
        Ok(m) => m,
        Err(StatError::Algebra(e @ AlgebraError::TooLarge { .. })) => return unknown(e.to_string(), None),
        Err(e) => return unknown(e.to_string(), None),
    };
    if model.feasible().is_none() {
        return no(model.conflicting_sentences(), false);
    }
    let oracle = LpOracle::new(&model);
    let mut notes = Vec::new();
    for block in &blocks {
        let ctx = match block_ctx(kb, &model, block, &oracle) {
            Ok(c) => c,
            Err(e @ InferError::NoModel(_)) => {
                return ConsistencyReport {
                    notes: vec![e.to_string()],
                    ..no(Vec::new(), true)
                }
            }
            Err(e) => return unknown(e.to_string(), Some(true)),
        };
        if ctx.beliefs.is_empty() {
            continue;
        }
        let support = match model.max_support(ctx.level) {
            Ok(s) => s.intersection(&ctx.root.event.set),
            Err(e) => return unknown(e.to_string(), Some(true)),
        };
        let support: Vec<usize> = support.iter().collect();
        let all: Vec<&Belief> = ctx.beliefs.iter().collect();
        if beliefs_feasible(&support, &all) {
            continue;
        }
        // deletion filter over the block's beliefs
        let mut kept: Vec<&Belief> = all.clone();
        let mut i = 0;
        while i < kept.len() {
            let mut trial = kept.clone();
            trial.remove(i);
            if beliefs_feasible(&support, &trial) {
                i += 1;
            } else {
                kept = trial;
            }
        }
        notes.push(format!(
            "the beliefs about {{{}}} admit no belief state that is absolutely continuous with respect to the statistics",
            block.join(", ")
        ));
        return ConsistencyReport {
            notes,
            ..no(kept.iter().map(|b| b.label.clone()).collect(), true)
        };
    }
    ConsistencyReport {
        statistical_feasible: Some(true),
        has_model: Verdict::Yes,
        conflicts: Vec::new(),
        notes,
    }
}
