//! Finite atom spaces.
//!
//! An atom is one complete, equality-consistent truth assignment to the ground
//! atomic formulas obtainable by instantiating every predicate at placeholder
//! slots `0..arity`. Formula extensions are sets of atoms, so all measures in
//! the engine live on the finite algebra these atoms generate; the domain
//! itself is never materialized.

use std::collections::HashMap;
use std::fmt;

use crate::syntax::{Formula, Signature, Term};

pub const DEFAULT_ATOM_CAP: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("atom space would have {size} atoms, above the cap of {cap}")]
    TooLarge { size: u128, cap: usize },
    #[error("arity {0} is not supported (must be 1 or 2)")]
    BadArity(usize),
    #[error("symbol `{0}` is not mapped to a slot")]
    Unmapped(String),
    #[error("predicate `{0}` is not part of this atom space")]
    UnknownPredicate(String),
    #[error("statistical term must be resolved before computing an extension")]
    StatTerm,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroundAtom {
    Unary { pred: String, slot: usize },
    Binary { pred: String, first: usize, second: usize },
    Equal { first: usize, second: usize },
}

impl GroundAtom {
    fn remap(&self, f: impl Fn(usize) -> usize) -> GroundAtom {
        match self {
            GroundAtom::Unary { pred, slot } => GroundAtom::Unary {
                pred: pred.clone(),
                slot: f(*slot),
            },
            GroundAtom::Binary {
                pred,
                first,
                second,
            } => GroundAtom::Binary {
                pred: pred.clone(),
                first: f(*first),
                second: f(*second),
            },
            GroundAtom::Equal { first, second } => {
                let (a, b) = (f(*first), f(*second));
                GroundAtom::Equal {
                    first: a.min(b),
                    second: a.max(b),
                }
            }
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundAtom::Unary { pred, slot } => write!(f, "{pred}@{}", slot + 1),
            GroundAtom::Binary {
                pred,
                first,
                second,
            } => write!(f, "{pred}({},{})", first + 1, second + 1),
            GroundAtom::Equal { first, second } => write!(f, "{}=={}", first + 1, second + 1),
        }
    }
}

/// Bitset over the atoms of one space.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AtomSet {
    words: Vec<u64>,
    len: usize,
}

impl AtomSet {
    pub fn empty(len: usize) -> Self {
        AtomSet {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = AtomSet {
            words: vec![u64::MAX; len.div_ceil(64)],
            len,
        };
        s.trim();
        s
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut s = AtomSet::empty(len);
        for i in idx {
            s.insert(i);
        }
        s
    }

    fn trim(&mut self) {
        let extra = self.words.len() * 64 - self.len;
        if extra > 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= u64::MAX >> extra;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "atom index out of range");
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn union(&self, o: &AtomSet) -> AtomSet {
        self.zip(o, |a, b| a | b)
    }

    pub fn intersection(&self, o: &AtomSet) -> AtomSet {
        self.zip(o, |a, b| a & b)
    }

    pub fn difference(&self, o: &AtomSet) -> AtomSet {
        self.zip(o, |a, b| a & !b)
    }

    pub fn complement(&self) -> AtomSet {
        let mut s = AtomSet {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        s.trim();
        s
    }

    pub fn is_subset(&self, o: &AtomSet) -> bool {
        self.difference(o).is_empty()
    }

    fn zip(&self, o: &AtomSet, f: impl Fn(u64, u64) -> u64) -> AtomSet {
        assert_eq!(self.len, o.len, "atom sets from different spaces");
        AtomSet {
            words: self
                .words
                .iter()
                .zip(&o.words)
                .map(|(a, b)| f(*a, *b))
                .collect(),
            len: self.len,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |i| self.contains(*i))
    }
}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// The atoms of a signature at a given arity (1 or 2).
#[derive(Debug, Clone)]
pub struct AtomSpace {
    arity: usize,
    predicates: Vec<(String, usize)>,
    ground: Vec<GroundAtom>,
    /// Truth assignment per atom; bit `i` is ground atom `i`.
    atoms: Vec<u64>,
    index: HashMap<u64, usize>,
    swap: Option<Vec<usize>>,
    ground_sets: Vec<AtomSet>,
}

impl AtomSpace {
    pub fn build(sig: &Signature, arity: usize) -> Result<Self, AlgebraError> {
        Self::build_with_cap(sig, arity, DEFAULT_ATOM_CAP)
    }

    pub fn build_with_cap(sig: &Signature, arity: usize, cap: usize) -> Result<Self, AlgebraError> {
        if !(1..=2).contains(&arity) {
            return Err(AlgebraError::BadArity(arity));
        }
        let mut ground = Vec::new();
        for (pred, a) in &sig.predicates {
            match a {
                1 => ground.extend((0..arity).map(|slot| GroundAtom::Unary {
                    pred: pred.clone(),
                    slot,
                })),
                2 => {
                    for first in 0..arity {
                        for second in 0..arity {
                            ground.push(GroundAtom::Binary {
                                pred: pred.clone(),
                                first,
                                second,
                            });
                        }
                    }
                }
                other => return Err(AlgebraError::BadArity(*other)),
            }
        }
        for first in 0..arity {
            for second in first + 1..arity {
                ground.push(GroundAtom::Equal { first, second });
            }
        }
        let n = ground.len();
        let n_eq = arity * (arity - 1) / 2;
        // every assignment with all equalities false is consistent
        let lower = 1u128 << (n - n_eq).min(120);
        if n >= 64 || lower > cap as u128 {
            return Err(AlgebraError::TooLarge {
                size: lower,
                cap,
            });
        }
        let pos: HashMap<GroundAtom, usize> =
            ground.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        // for each equality atom, the pairs of ground atoms it forces to agree
        let eq_pairs: Vec<(usize, Vec<(usize, usize)>)> = ground
            .iter()
            .enumerate()
            .filter_map(|(e, g)| match g {
                GroundAtom::Equal { first, second } => {
                    let (a, b) = (*first, *second);
                    let rep = |s: usize| if s == b { a } else { s };
                    let pairs = ground
                        .iter()
                        .enumerate()
                        .filter(|(_, g)| !matches!(g, GroundAtom::Equal { .. }))
                        .map(|(i, g)| (i, pos[&g.remap(rep)]))
                        .filter(|(i, j)| i != j)
                        .collect();
                    Some((e, pairs))
                }
                _ => None,
            })
            .collect();
        let bit = |mask: u64, i: usize| mask >> i & 1 == 1;
        let mut atoms = Vec::new();
        for counter in 0u64..(1u64 << n) {
            // lexicographic order over the bit string g0 g1 ... g(n-1)
            let mut mask = 0u64;
            for i in 0..n {
                if counter >> (n - 1 - i) & 1 == 1 {
                    mask |= 1 << i;
                }
            }
            let consistent = eq_pairs.iter().all(|(e, pairs)| {
                !bit(mask, *e) || pairs.iter().all(|&(i, j)| bit(mask, i) == bit(mask, j))
            });
            if consistent {
                atoms.push(mask);
            }
        }
        if atoms.len() > cap {
            return Err(AlgebraError::TooLarge {
                size: atoms.len() as u128,
                cap,
            });
        }
        let index: HashMap<u64, usize> = atoms.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let swap = (arity == 2).then(|| {
            let perm: Vec<usize> = ground
                .iter()
                .map(|g| pos[&g.remap(|s| 1 - s)])
                .collect();
            atoms
                .iter()
                .map(|&m| {
                    let mut s = 0u64;
                    for (i, &j) in perm.iter().enumerate() {
                        if bit(m, i) {
                            s |= 1 << j;
                        }
                    }
                    index[&s]
                })
                .collect()
        });
        let ground_sets = (0..n)
            .map(|g| AtomSet::from_indices(atoms.len(), (0..atoms.len()).filter(|&a| bit(atoms[a], g))))
            .collect();
        Ok(AtomSpace {
            arity,
            predicates: sig.predicates.clone(),
            ground,
            atoms,
            index,
            swap,
            ground_sets,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn predicates(&self) -> &[(String, usize)] {
        &self.predicates
    }

    pub fn ground_atoms(&self) -> &[GroundAtom] {
        &self.ground
    }

    pub fn full(&self) -> AtomSet {
        AtomSet::full(self.len())
    }

    pub fn empty(&self) -> AtomSet {
        AtomSet::empty(self.len())
    }

    /// Truth value of ground atom `g` in atom `atom`.
    pub fn truth(&self, atom: usize, g: usize) -> bool {
        self.atoms[atom] >> g & 1 == 1
    }

    pub fn ground_index(&self, g: &GroundAtom) -> Option<usize> {
        self.ground.iter().position(|x| x == g)
    }

    /// Atom index for a full truth assignment (bit `i` = ground atom `i`).
    pub fn atom_of(&self, mask: u64) -> Option<usize> {
        self.index.get(&mask).copied()
    }

    /// Slot exchange on atoms (arity 2 only).
    pub fn swap(&self) -> Option<&[usize]> {
        self.swap.as_deref()
    }

    pub fn swap_set(&self, s: &AtomSet) -> AtomSet {
        match &self.swap {
            Some(perm) => AtomSet::from_indices(self.len(), s.iter().map(|i| perm[i])),
            None => s.clone(),
        }
    }

    /// Bit string of an atom in ground-atom order.
    pub fn bit_string(&self, atom: usize) -> String {
        (0..self.ground.len())
            .map(|g| if self.truth(atom, g) { '1' } else { '0' })
            .collect()
    }

    /// Human-readable conjunction of literals describing an atom.
    pub fn describe(&self, atom: usize) -> String {
        self.ground
            .iter()
            .enumerate()
            .map(|(g, ga)| {
                if self.truth(atom, g) {
                    ga.to_string()
                } else {
                    format!("!{ga}")
                }
            })
            .collect::<Vec<_>>()
            .join(" & ")
    }

    /// Packs the truth values that `preds` take at `slot` (unary at the slot,
    /// binary on the slot's diagonal) into a key; used to relate atoms of
    /// different spaces that share those predicates.
    pub fn slot_key(&self, atom: usize, slot: usize, preds: &[(String, usize)]) -> u64 {
        let mut key = 0u64;
        for (k, (p, a)) in preds.iter().enumerate() {
            let g = if *a == 1 {
                GroundAtom::Unary {
                    pred: p.clone(),
                    slot,
                }
            } else {
                GroundAtom::Binary {
                    pred: p.clone(),
                    first: slot,
                    second: slot,
                }
            };
            let gi = self
                .ground_index(&g)
                .expect("slot_key predicate missing from space");
            if self.truth(atom, gi) {
                key |= 1 << k;
            }
        }
        key
    }

    /// Extension of a quantifier-free, statistical-term-free formula, with
    /// every variable and constant mapped to a slot.
    pub fn extension(
        &self,
        f: &Formula,
        slots: &HashMap<String, usize>,
    ) -> Result<AtomSet, AlgebraError> {
        let slot = |t: &Term| -> Result<usize, AlgebraError> {
            match slots.get(t.name()) {
                Some(&s) if s < self.arity => Ok(s),
                _ => Err(AlgebraError::Unmapped(t.name().to_string())),
            }
        };
        Ok(match f {
            Formula::True => self.full(),
            Formula::False => self.empty(),
            Formula::Atom { pred, args } => {
                let g = match args.as_slice() {
                    [a] => GroundAtom::Unary {
                        pred: pred.clone(),
                        slot: slot(a)?,
                    },
                    [a, b] => GroundAtom::Binary {
                        pred: pred.clone(),
                        first: slot(a)?,
                        second: slot(b)?,
                    },
                    _ => return Err(AlgebraError::UnknownPredicate(pred.clone())),
                };
                let gi = self
                    .ground_index(&g)
                    .ok_or_else(|| AlgebraError::UnknownPredicate(pred.clone()))?;
                self.ground_sets[gi].clone()
            }
            Formula::Equal(a, b) => {
                let (x, y) = (slot(a)?, slot(b)?);
                if x == y {
                    self.full()
                } else {
                    let g = GroundAtom::Equal {
                        first: x.min(y),
                        second: x.max(y),
                    };
                    self.ground_sets[self.ground_index(&g).expect("equality atom")].clone()
                }
            }
            Formula::Not(x) => self.extension(x, slots)?.complement(),
            Formula::And(a, b) => self
                .extension(a, slots)?
                .intersection(&self.extension(b, slots)?),
            Formula::Or(a, b) => self.extension(a, slots)?.union(&self.extension(b, slots)?),
            Formula::Stat(_) => return Err(AlgebraError::StatTerm),
        })
    }

    /// Header line for atom dumps: ground atoms in canonical order.
    pub fn dump(&self) -> String {
        let mut out = format!(
            "# {}\n",
            self.ground
                .iter()
                .map(|g| g.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        );
        for a in 0..self.len() {
            out.push_str(&self.bit_string(a));
            out.push('\n');
        }
        out
    }
}

/// An arity-2 space over the same signature together with the two slot
/// projections onto the arity-1 space.
#[derive(Debug, Clone)]
pub struct ProductEmbedding {
    pub pair: AtomSpace,
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

pub fn product_embed(single: &AtomSpace) -> Result<ProductEmbedding, AlgebraError> {
    if single.arity() != 1 {
        return Err(AlgebraError::BadArity(single.arity()));
    }
    let sig = Signature {
        predicates: single.predicates().to_vec(),
        constants: Vec::new(),
    };
    let pair = AtomSpace::build(&sig, 2)?;
    let preds = single.predicates();
    let by_key: HashMap<u64, usize> = (0..single.len())
        .map(|a| (single.slot_key(a, 0, preds), a))
        .collect();
    let project = |slot| -> Vec<usize> {
        (0..pair.len())
            .map(|a| by_key[&pair.slot_key(a, slot, preds)])
            .collect()
    };
    let first = project(0);
    let second = project(1);
    Ok(ProductEmbedding {
        pair,
        first,
        second,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Term;

    fn sig(preds: &[(&str, usize)]) -> Signature {
        Signature {
            predicates: preds.iter().map(|(n, a)| (n.to_string(), *a)).collect(),
            constants: vec![],
        }
    }

    fn v(n: &str) -> Term {
        Term::Var(n.into())
    }

    fn slots1() -> HashMap<String, usize> {
        [("v".to_string(), 0)].into_iter().collect()
    }

    const MOVIES: &[(&str, usize)] = &[
        ("American", 1),
        ("French", 1),
        ("English", 1),
        ("Mystery", 1),
        ("HappyEnd", 1),
    ];

    #[test]
    fn unary_space_has_all_assignments() {
        let s = AtomSpace::build(&sig(MOVIES), 1).unwrap();
        assert_eq!(s.len(), 32);
        let s = AtomSpace::build(&sig(&[("P", 1)]), 1).unwrap();
        assert_eq!(s.len(), 2);
        // lexicographic: first atom is all-false
        assert_eq!(s.bit_string(0), "0");
        assert_eq!(s.bit_string(1), "1");
    }

    #[test]
    fn binary_space_matches_brute_force_consistency() {
        let s = AtomSpace::build(&sig(&[("HappyEnd", 1), ("Better", 2)]), 2).unwrap();
        let names: Vec<String> = s.ground_atoms().iter().map(|g| g.to_string()).collect();
        assert_eq!(
            names,
            ["HappyEnd@1", "HappyEnd@2", "Better(1,1)", "Better(1,2)", "Better(2,1)", "Better(2,2)", "1==2"]
        );
        // brute force: bits h1 h2 b11 b12 b21 b22 e
        let mut expected = 0;
        for m in 0u32..128 {
            let b = |i: u32| m >> i & 1 == 1;
            let ok = !b(6) || (b(0) == b(1) && b(2) == b(3) && b(3) == b(4) && b(4) == b(5));
            if ok {
                expected += 1;
            }
        }
        assert_eq!(s.len(), expected);
        assert_eq!(s.len(), 64 + 4);
    }

    #[test]
    fn swap_is_an_involution() {
        let s = AtomSpace::build(&sig(&[("P", 1), ("R", 2)]), 2).unwrap();
        let sw = s.swap().unwrap();
        for a in 0..s.len() {
            assert_eq!(sw[sw[a]], a);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let e = AtomSpace::build_with_cap(&sig(MOVIES), 1, 16).unwrap_err();
        assert!(matches!(e, AlgebraError::TooLarge { .. }));
    }

    #[test]
    fn extensions() {
        let s = AtomSpace::build(&sig(MOVIES), 1).unwrap();
        let slots = slots1();
        assert_eq!(s.extension(&Formula::True, &slots).unwrap().count(), 32);
        let am_my = Formula::and(
            Formula::atom("American", vec![v("v")]),
            Formula::atom("Mystery", vec![v("v")]),
        );
        let e = s.extension(&am_my, &slots).unwrap();
        assert_eq!(e.count(), 8);
        let contra = Formula::and(am_my.clone(), Formula::not(am_my));
        assert!(s.extension(&contra, &slots).unwrap().is_empty());
        let e = s.extension(&Formula::atom("Nope", vec![v("v")]), &slots);
        assert!(matches!(e, Err(AlgebraError::UnknownPredicate(_))));
        let e = s.extension(&Formula::atom("American", vec![v("w")]), &slots);
        assert!(matches!(e, Err(AlgebraError::Unmapped(_))));
    }

    #[test]
    fn equality_atoms_force_agreement() {
        let s = AtomSpace::build(&sig(&[("P", 1), ("Q", 1)]), 2).unwrap();
        let slots: HashMap<String, usize> =
            [("x".to_string(), 0), ("y".to_string(), 1)].into_iter().collect();
        let eq = s.extension(&Formula::Equal(v("x"), v("y")), &slots).unwrap();
        for p in ["P", "Q"] {
            let px = s.extension(&Formula::atom(p, vec![v("x")]), &slots).unwrap();
            let py = s.extension(&Formula::atom(p, vec![v("y")]), &slots).unwrap();
            for a in eq.iter() {
                assert_eq!(px.contains(a), py.contains(a));
            }
        }
        let refl = s.extension(&Formula::Equal(v("x"), v("x")), &slots).unwrap();
        assert_eq!(refl.count(), s.len());
    }

    #[test]
    fn product_projections() {
        let single = AtomSpace::build(&sig(&[("P", 1)]), 1).unwrap();
        let emb = product_embed(&single).unwrap();
        // 4 off-diagonal assignments plus 2 diagonal ones
        assert_eq!(emb.pair.len(), 6);
        let p1 = emb.pair.ground_index(&GroundAtom::Unary { pred: "P".into(), slot: 0 }).unwrap();
        for a in 0..emb.pair.len() {
            assert_eq!(emb.pair.truth(a, p1), single.truth(emb.first[a], 0));
            let sw = emb.pair.swap().unwrap()[a];
            assert_eq!(emb.first[sw], emb.second[a]);
        }
    }

    #[test]
    fn dump_has_header_and_rows() {
        let s = AtomSpace::build(&sig(&[("P", 1), ("Q", 1)]), 1).unwrap();
        let d = s.dump();
        let lines: Vec<&str> = d.lines().collect();
        assert_eq!(lines[0], "# P@1 Q@1");
        assert_eq!(&lines[1..], ["00", "01", "10", "11"]);
    }
}
