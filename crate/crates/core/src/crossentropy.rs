//! Minimum cross-entropy projection onto sets cut out by conditional
//! probability constraints.
//!
//! Partition-weight constraint sets are solved in closed form (Jeffrey's
//! rule). Everything else goes through cyclic Bregman projections in the dual:
//! the iterate is always an exponential tilt of `mu`, one multiplier per row,
//! and multipliers of inequality rows are kept non-negative.

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::AtomSet;
use crate::lp::{self, Cmp, LpRow, Q};

pub const EPS_FEAS: f64 = 1e-10;
pub const EPS_CONV: f64 = 1e-12;
pub const EPS_NORM: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 1_000_000;
/// Width at which the 1-D multiplier search stops.
const EPS_ROOT: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CeError {
    #[error("distribution has {got} weights, expected {expected}")]
    Length { expected: usize, got: usize },
    #[error("not a probability distribution: {0}")]
    NotNormalized(String),
    #[error("no model: {0}")]
    NoModel(String),
    #[error("projection did not converge after {sweeps} sweeps (residual {residual:e})")]
    NotConverged { sweeps: usize, residual: f64 },
}

pub fn to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Weights over the atoms of one space, optionally carried exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub weights: Vec<f64>,
    pub exact: Option<Vec<Q>>,
}

impl Distribution {
    pub fn new(weights: Vec<f64>) -> Result<Self, CeError> {
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(CeError::NotNormalized(format!("weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > EPS_NORM * (weights.len().max(1) as f64) {
            return Err(CeError::NotNormalized(format!("weights sum to {total}")));
        }
        Ok(Distribution { weights, exact: None })
    }

    pub fn from_exact(exact: Vec<Q>) -> Result<Self, CeError> {
        if exact.iter().any(|q| q.is_negative()) {
            return Err(CeError::NotNormalized("negative weight".into()));
        }
        let total: Q = exact.iter().sum();
        if !total.is_one() {
            return Err(CeError::NotNormalized(format!("weights sum to {total}")));
        }
        Ok(Distribution {
            weights: exact.iter().map(to_f64).collect(),
            exact: Some(exact),
        })
    }

    pub fn uniform(n: usize) -> Self {
        let w = Q::new(1.into(), n.into());
        Distribution::from_exact(vec![w; n]).expect("uniform is normalized")
    }

    /// Normalizes non-negative weights.
    pub fn normalized(mut weights: Vec<f64>) -> Result<Self, CeError> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(CeError::NotNormalized("zero total mass".into()));
        }
        for w in weights.iter_mut() {
            *w /= total;
        }
        Distribution::new(weights)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn mass(&self, s: &AtomSet) -> f64 {
        s.iter().map(|i| self.weights[i]).sum()
    }

    pub fn exact_mass(&self, s: &AtomSet) -> Option<Q> {
        self.exact.as_ref().map(|e| s.iter().map(|i| &e[i]).sum())
    }

    pub fn variation_distance(&self, o: &Distribution) -> f64 {
        0.5 * self
            .weights
            .iter()
            .zip(&o.weights)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

/// `sum nu ln(nu/mu)`, infinite when `nu` is not absolutely continuous.
pub fn cross_entropy(nu: &Distribution, mu: &Distribution) -> Result<f64, CeError> {
    if nu.len() != mu.len() {
        return Err(CeError::Length {
            expected: mu.len(),
            got: nu.len(),
        });
    }
    let mut ce = 0.0;
    for (n, m) in nu.weights.iter().zip(&mu.weights) {
        if *n > 0.0 {
            if *m <= 0.0 {
                return Ok(f64::INFINITY);
            }
            ce += n * (n / m).ln();
        }
    }
    Ok(ce.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintRel {
    Ge,
    Eq,
}

/// `nu(phi & psi) - p nu(psi)  rel  0`, i.e. `nu(phi | psi) rel p`.
#[derive(Debug, Clone, PartialEq)]
pub struct CondConstraint {
    pub phi: AtomSet,
    pub psi: AtomSet,
    pub rel: ConstraintRel,
    pub p: Q,
    pub label: String,
}

impl CondConstraint {
    /// `nu(phi) rel p`.
    pub fn mass(phi: AtomSet, rel: ConstraintRel, p: Q, label: impl Into<String>) -> Self {
        let psi = AtomSet::full(phi.len());
        CondConstraint {
            phi,
            psi,
            rel,
            p,
            label: label.into(),
        }
    }

    fn coeff_exact(&self, x: usize) -> Q {
        match (self.psi.contains(x), self.phi.contains(x)) {
            (false, _) => Q::zero(),
            (true, true) => Q::one() - &self.p,
            (true, false) => -self.p.clone(),
        }
    }

    fn coeffs(&self) -> Vec<f64> {
        let p = to_f64(&self.p);
        (0..self.phi.len())
            .map(|x| match (self.psi.contains(x), self.phi.contains(x)) {
                (false, _) => 0.0,
                (true, true) => 1.0 - p,
                (true, false) => -p,
            })
            .collect()
    }

    /// Signed violation at `nu` (0 when satisfied).
    pub fn residual(&self, nu: &Distribution) -> f64 {
        let v = nu.mass(&self.phi.intersection(&self.psi)) - to_f64(&self.p) * nu.mass(&self.psi);
        match self.rel {
            ConstraintRel::Ge => (-v).max(0.0),
            ConstraintRel::Eq => v.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Jeffrey,
    Iterative,
    Oracle,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Jeffrey => "jeffrey",
            Method::Iterative => "iterative",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub nu: Distribution,
    pub ce_value: f64,
    pub method: Method,
    pub iterations: usize,
    pub residual: f64,
}

/// One line of the `--trace-ce` stream.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub sweep: usize,
    pub row: usize,
    pub residual: f64,
    pub ce_value: f64,
}

pub type Trace<'a> = Option<&'a mut dyn FnMut(&TraceRecord)>;

fn check_partition(n: usize, blocks: &[AtomSet]) -> Result<(), CeError> {
    let mut seen = AtomSet::empty(n);
    for b in blocks {
        if b.len() != n {
            return Err(CeError::Length { expected: n, got: b.len() });
        }
        if !seen.intersection(b).is_empty() {
            return Err(CeError::NotNormalized("partition blocks overlap".into()));
        }
        seen = seen.union(b);
    }
    if seen.count() != n {
        return Err(CeError::NotNormalized("partition does not cover every atom".into()));
    }
    Ok(())
}

/// `sum_i p_i mu(. | A_i)`; exact when both `mu` and the weights are.
fn mix(mu: &Distribution, blocks: &[AtomSet], p: &[f64], p_exact: Option<&[Q]>) -> Result<Distribution, CeError> {
    check_partition(mu.len(), blocks)?;
    if p.len() != blocks.len() {
        return Err(CeError::Length { expected: blocks.len(), got: p.len() });
    }
    if let (Some(mu_e), Some(p_e)) = (&mu.exact, p_exact) {
        let mut out = vec![Q::zero(); mu.len()];
        for (i, b) in blocks.iter().enumerate() {
            if p_e[i].is_zero() {
                continue;
            }
            let m: Q = b.iter().map(|x| &mu_e[x]).sum();
            if m.is_zero() {
                return Err(no_block_mass(i));
            }
            for x in b.iter() {
                out[x] = &p_e[i] * &mu_e[x] / &m;
            }
        }
        return Distribution::from_exact(out);
    }
    let mut out = vec![0.0; mu.len()];
    for (i, b) in blocks.iter().enumerate() {
        if p[i] == 0.0 {
            continue;
        }
        let m = mu.mass(b);
        if m <= 0.0 {
            return Err(no_block_mass(i));
        }
        for x in b.iter() {
            out[x] = p[i] * mu.weights[x] / m;
        }
    }
    Distribution::normalized(out)
}

fn no_block_mass(i: usize) -> CeError {
    CeError::NoModel(format!(
        "block {i} has positive target weight but statistical probability zero"
    ))
}

/// Jeffrey's rule: reweights the blocks of a partition to `p`, keeping the
/// conditional distribution inside each block.
pub fn jeffrey(mu: &Distribution, partition: &[AtomSet], p: &[Q]) -> Result<Distribution, CeError> {
    let pf: Vec<f64> = p.iter().map(to_f64).collect();
    if p.iter().any(|x| x.is_negative()) || !p.iter().sum::<Q>().is_one() {
        return Err(CeError::NotNormalized("partition weights must sum to 1".into()));
    }
    mix(mu, partition, &pf, Some(p))
}

/// Lifts a distribution over partition blocks back to the atoms of `mu`.
pub fn conditional_mix(coarse: &Distribution, blocks: &[AtomSet], mu: &Distribution) -> Result<Distribution, CeError> {
    mix(mu, blocks, &coarse.weights, coarse.exact.as_deref())
}

/// Recognizes constraint sets of the form `{nu(A_i) = p_i}` with disjoint
/// `A_i`, completed by the remainder block.
pub fn as_partition(n: usize, rows: &[CondConstraint]) -> Option<(Vec<AtomSet>, Vec<Q>)> {
    let mut blocks: Vec<AtomSet> = Vec::new();
    let mut weights: Vec<Q> = Vec::new();
    for r in rows {
        if r.rel != ConstraintRel::Eq || r.psi.count() != n {
            return None;
        }
        if let Some(k) = blocks.iter().position(|b| *b == r.phi) {
            if weights[k] != r.p {
                return None;
            }
            continue;
        }
        if blocks.iter().any(|b| !b.intersection(&r.phi).is_empty()) {
            return None;
        }
        blocks.push(r.phi.clone());
        weights.push(r.p.clone());
    }
    let total: Q = weights.iter().sum();
    let covered = blocks.iter().fold(AtomSet::empty(n), |acc, b| acc.union(b));
    let rest = covered.complement();
    if rest.is_empty() {
        if !total.is_one() {
            return None;
        }
    } else {
        if total > Q::one() {
            return None;
        }
        blocks.push(rest);
        weights.push(Q::one() - total);
    }
    // empty blocks must carry weight zero; drop them
    let mut keep = Vec::new();
    for (b, w) in blocks.into_iter().zip(weights) {
        if b.is_empty() {
            if !w.is_zero() {
                return None;
            }
        } else {
            keep.push((b, w));
        }
    }
    Some(keep.into_iter().unzip())
}

fn max_residual(rows: &[CondConstraint], nu: &Distribution) -> f64 {
    rows.iter().map(|r| r.residual(nu)).fold(0.0, f64::max)
}

/// The cross-entropy minimizer over `rows`, dispatching to Jeffrey's rule
/// when the rows prescribe partition weights.
pub fn ce_project(mu: &Distribution, rows: &[CondConstraint], trace: Trace<'_>) -> Result<ProjectionResult, CeError> {
    for r in rows {
        if r.phi.len() != mu.len() || r.psi.len() != mu.len() {
            return Err(CeError::Length { expected: mu.len(), got: r.phi.len() });
        }
    }
    if let Some((blocks, p)) = as_partition(mu.len(), rows) {
        let nu = jeffrey(mu, &blocks, &p)?;
        let ce_value = cross_entropy(&nu, mu)?;
        let residual = max_residual(rows, &nu);
        return Ok(ProjectionResult {
            nu,
            ce_value,
            method: Method::Jeffrey,
            iterations: 0,
            residual,
        });
    }
    ce_project_iterative(mu, rows, trace)
}

/// Atoms that can carry mass in some member of the constraint set that is
/// absolutely continuous with respect to `mu`.
fn feasible_support(mu: &Distribution, rows: &[CondConstraint]) -> Result<Vec<usize>, CeError> {
    let supp: Vec<usize> = match &mu.exact {
        Some(e) => (0..mu.len()).filter(|&x| e[x].is_positive()).collect(),
        None => (0..mu.len()).filter(|&x| mu.weights[x] > 0.0).collect(),
    };
    if rows.is_empty() {
        return Ok(supp);
    }
    let lp_rows: Vec<LpRow> = rows
        .iter()
        .map(|r| LpRow {
            coeffs: supp
                .iter()
                .enumerate()
                .map(|(j, &x)| (j, r.coeff_exact(x)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
            cmp: match r.rel {
                ConstraintRel::Ge => Cmp::Ge,
                ConstraintRel::Eq => Cmp::Eq,
            },
            rhs: Q::zero(),
        })
        .collect();
    let keep = lp::max_support(supp.len(), &lp_rows).ok_or_else(|| {
        CeError::NoModel(
            "no belief state absolutely continuous with respect to the statistical measure satisfies the constraints"
                .into(),
        )
    })?;
    Ok(supp.into_iter().zip(keep).filter(|(_, k)| *k).map(|(x, _)| x).collect())
}

/// Log-domain softmax of `base + s`.
fn normalize_log(base: &[f64], s: &[f64]) -> (Vec<f64>, f64) {
    let t: Vec<f64> = base.iter().zip(s).map(|(b, s)| b + s).collect();
    let m = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = t.iter().map(|v| (v - m).exp()).sum();
    let log_z = m + z.ln();
    (t.iter().map(|v| (v - log_z).exp()).collect(), log_z)
}

/// Sign-preserving evaluation of `sum nu c e^{d c}`.
fn tilted_moment(log_nu: &[f64], c: &[f64], d: f64) -> f64 {
    let m = log_nu
        .iter()
        .zip(c)
        .map(|(l, c)| l + d * c)
        .fold(f64::NEG_INFINITY, f64::max);
    log_nu.iter().zip(c).map(|(l, c)| c * (l + d * c - m).exp()).sum()
}

/// Root of the non-decreasing `g` in `[lo, ..)` or `(.., hi]` by bracketing
/// and bisection.
fn root(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let mut step = 1.0;
    while g(lo) > 0.0 {
        lo -= step;
        step *= 2.0;
        if step > 1e18 {
            return None;
        }
    }
    step = 1.0;
    while g(hi) < 0.0 {
        hi += step;
        step *= 2.0;
        if step > 1e18 {
            return None;
        }
    }
    while hi - lo > EPS_ROOT * hi.abs().max(lo.abs()).max(1.0) {
        let mid = 0.5 * (lo + hi);
        let v = g(mid);
        if v == 0.0 {
            return Some(mid);
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Cyclic Bregman projections with non-negativity-clipped multipliers for
/// inequality rows; never takes the Jeffrey shortcut.
pub fn ce_project_iterative(
    mu: &Distribution,
    rows: &[CondConstraint],
    mut trace: Trace<'_>,
) -> Result<ProjectionResult, CeError> {
    let support = feasible_support(mu, rows)?;
    let base: Vec<f64> = support.iter().map(|&x| mu.weights[x].ln()).collect();
    let coeffs: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let full = r.coeffs();
            support.iter().map(|&x| full[x]).collect()
        })
        .collect();
    let mut s = vec![0.0; support.len()];
    let mut lambda = vec![0.0; rows.len()];
    let (mut nu, _) = normalize_log(&base, &s);
    let lift = |nu: &[f64]| {
        let mut w = vec![0.0; mu.len()];
        for (k, &x) in support.iter().enumerate() {
            w[x] = nu[k];
        }
        w
    };
    let residual_of = |nu: &[f64], k: usize| {
        let v: f64 = nu.iter().zip(&coeffs[k]).map(|(a, c)| a * c).sum();
        match rows[k].rel {
            ConstraintRel::Ge => (-v).max(0.0),
            ConstraintRel::Eq => v.abs(),
        }
    };
    for sweep in 1..=MAX_SWEEPS {
        let start = nu.clone();
        for (k, c) in coeffs.iter().enumerate() {
            if c.iter().all(|v| *v == 0.0) {
                continue;
            }
            let log_nu: Vec<f64> = nu.iter().map(|v| v.ln()).collect();
            let g = |d: f64| tilted_moment(&log_nu, c, d);
            let delta = match rows[k].rel {
                ConstraintRel::Ge if g(-lambda[k]) >= 0.0 => Some(-lambda[k]),
                ConstraintRel::Ge => root(g, -lambda[k], 0.0_f64.max(-lambda[k])),
                ConstraintRel::Eq => root(g, 0.0, 0.0),
            }
            .ok_or_else(|| CeError::NoModel(format!("constraint {} cannot be met", rows[k].label)))?;
            if delta != 0.0 {
                lambda[k] += delta;
                for (sv, cv) in s.iter_mut().zip(c) {
                    *sv += delta * cv;
                }
                nu = normalize_log(&base, &s).0;
            }
            if let Some(t) = trace.as_mut() {
                let full = Distribution { weights: lift(&nu), exact: None };
                t(&TraceRecord {
                    sweep,
                    row: k,
                    residual: residual_of(&nu, k),
                    ce_value: cross_entropy(&full, mu)?,
                });
            }
        }
        let change: f64 = nu.iter().zip(&start).map(|(a, b)| (a - b).abs()).sum();
        let residual = (0..rows.len()).map(|k| residual_of(&nu, k)).fold(0.0, f64::max);
        if residual <= EPS_FEAS && change <= EPS_CONV {
            let nu = Distribution { weights: lift(&nu), exact: None };
            let ce_value = cross_entropy(&nu, mu)?;
            return Ok(ProjectionResult {
                residual: max_residual(rows, &nu),
                nu,
                ce_value,
                method: Method::Iterative,
                iterations: sweep,
            });
        }
        if sweep == MAX_SWEEPS {
            return Err(CeError::NotConverged { sweeps: sweep, residual });
        }
    }
    unreachable!("loop returns on the last sweep")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn set(n: usize, idx: &[usize]) -> AtomSet {
        AtomSet::from_indices(n, idx.iter().copied())
    }

    #[test]
    fn cross_entropy_values() {
        let mu = Distribution::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(cross_entropy(&mu, &mu).unwrap(), 0.0);
        let nu = Distribution::new(vec![1.0, 0.0]).unwrap();
        assert!((cross_entropy(&nu, &mu).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(cross_entropy(&mu, &nu).unwrap(), f64::INFINITY);
    }

    #[test]
    fn jeffrey_on_singletons() {
        let mu = Distribution::uniform(2);
        let nu = jeffrey(&mu, &[set(2, &[0]), set(2, &[1])], &[q(3, 10), q(7, 10)]).unwrap();
        assert_eq!(nu.exact.unwrap(), vec![q(3, 10), q(7, 10)]);
    }

    #[test]
    fn jeffrey_needs_block_mass() {
        let mu = Distribution::from_exact(vec![q(1, 1), q(0, 1)]).unwrap();
        let err = jeffrey(&mu, &[set(2, &[0]), set(2, &[1])], &[q(1, 2), q(1, 2)]).unwrap_err();
        assert!(matches!(err, CeError::NoModel(_)));
    }

    #[test]
    fn single_atom_target_spreads_the_rest_evenly() {
        let mu = Distribution::uniform(4);
        let rows = [CondConstraint::mass(set(4, &[0]), ConstraintRel::Eq, q(9, 10), "a")];
        let r = ce_project(&mu, &rows, None).unwrap();
        assert_eq!(r.method, Method::Jeffrey);
        assert_eq!(r.nu.exact.unwrap(), vec![q(9, 10), q(1, 30), q(1, 30), q(1, 30)]);
        let it = ce_project_iterative(&mu, &rows, None).unwrap();
        for (a, b) in it.nu.weights.iter().zip([0.9, 0.1 / 3.0, 0.1 / 3.0, 0.1 / 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn inactive_inequality_leaves_mu() {
        let mu = Distribution::uniform(2);
        let rows = [CondConstraint::mass(set(2, &[0]), ConstraintRel::Ge, q(1, 5), "a")];
        let r = ce_project(&mu, &rows, None).unwrap();
        assert_eq!(r.method, Method::Iterative);
        assert!(r.nu.variation_distance(&mu) < 1e-15);
        assert_eq!(r.ce_value, 0.0);
    }

    #[test]
    fn whole_simplex_is_identity() {
        let mu = Distribution::new(vec![0.1, 0.2, 0.7]).unwrap();
        let r = ce_project(&mu, &[], None).unwrap();
        assert!(r.nu.variation_distance(&mu) < 1e-15);
    }

    #[test]
    fn conditional_constraint_matches_mixing() {
        // atoms: (Ac,HE) (Ac,!HE) (!Ac,HE) (!Ac,!HE) with the pinned values 0.6 0.1 0.2 0.1
        let mu = Distribution::from_exact(vec![q(6, 10), q(1, 10), q(2, 10), q(1, 10)]).unwrap();
        let rows = [CondConstraint::mass(set(4, &[0, 1]), ConstraintRel::Eq, q(1, 2), "ac")];
        let r = ce_project_iterative(&mu, &rows, None).unwrap();
        let he = r.nu.weights[0] + r.nu.weights[2];
        assert!((he - 16.0 / 21.0).abs() < 1e-12, "{he}");
        let mixed = conditional_mix(
            &Distribution::from_exact(vec![q(1, 2), q(1, 2)]).unwrap(),
            &[set(4, &[0, 1]), set(4, &[2, 3])],
            &mu,
        )
        .unwrap();
        let e = mixed.exact.unwrap();
        assert_eq!(&e[0] + &e[2], q(16, 21));
    }

    #[test]
    fn null_support_is_no_model() {
        let mu = Distribution::from_exact(vec![q(1, 1), q(0, 1), q(0, 1)]).unwrap();
        let rows = [CondConstraint::mass(set(3, &[1, 2]), ConstraintRel::Ge, q(1, 2), "a")];
        assert!(matches!(ce_project(&mu, &rows, None), Err(CeError::NoModel(_))));
    }

    #[test]
    fn trace_reports_every_row() {
        let mu = Distribution::uniform(3);
        let rows = [
            CondConstraint::mass(set(3, &[0]), ConstraintRel::Ge, q(1, 2), "a"),
            CondConstraint::mass(set(3, &[1]), ConstraintRel::Ge, q(1, 3), "b"),
        ];
        let mut lines = Vec::new();
        let mut sink = |r: &TraceRecord| lines.push(r.clone());
        let r = ce_project(&mu, &rows, Some(&mut sink)).unwrap();
        assert!(r.residual <= EPS_FEAS);
        assert_eq!(lines.len(), 2 * r.iterations);
    }
}
