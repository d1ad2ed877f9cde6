//! Independent reference implementations used by the integration tests. None
//! of this calls into the library: the values here are what the engine is
//! checked against.

#![allow(dead_code)]

use num_rational::BigRational;

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

pub fn to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().expect("finite rational")
}

pub fn variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Jeffrey's rule written out directly: block `i` gets total mass `p[i]`,
/// split in proportion to `mu`. `None` when a block with positive target
/// weight has no prior mass.
pub fn jeffrey_oracle(mu: &[f64], blocks: &[Vec<usize>], p: &[f64]) -> Option<Vec<f64>> {
    let mut out = vec![0.0; mu.len()];
    for (b, &pi) in blocks.iter().zip(p) {
        let m: f64 = b.iter().map(|&x| mu[x]).sum();
        if pi > 0.0 && m <= 0.0 {
            return None;
        }
        for &x in b {
            if pi > 0.0 {
                out[x] = pi * mu[x] / m;
            }
        }
    }
    Some(out)
}

const TOL: f64 = 1e-9;

/// Solves the stacked system `rows · x = rhs` when it has exactly one
/// solution; `None` when it is singular or inconsistent.
fn solve_unique(rows: &[Vec<f64>], rhs: &[f64], m: usize) -> Option<Vec<f64>> {
    let mut a: Vec<Vec<f64>> = rows.iter().zip(rhs).map(|(r, &b)| {
        let mut v = r.clone();
        v.push(b);
        v
    }).collect();
    let mut rank = 0;
    let mut pivots = Vec::new();
    for col in 0..m {
        let Some(p) = (rank..a.len()).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())) else {
            break;
        };
        if a[p][col].abs() < 1e-12 {
            continue;
        }
        a.swap(rank, p);
        let piv = a[rank][col];
        for v in a[rank].iter_mut() {
            *v /= piv;
        }
        for i in 0..a.len() {
            if i != rank && a[i][col] != 0.0 {
                let f = a[i][col];
                for k in 0..=m {
                    a[i][k] -= f * a[rank][k];
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rank < m || a[rank..].iter().any(|r| r[m].abs() > 1e-9) {
        return None;
    }
    let mut x = vec![0.0; m];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = a[i][m];
    }
    Some(x)
}

/// Vertices of `{x >= 0 : sum x = 1, eq · x = 0, ge · x >= 0}` by brute
/// force over active sets. Meant for at most a handful of variables.
pub fn vertices(m: usize, eq: &[Vec<f64>], ge: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut base_rows: Vec<Vec<f64>> = vec![vec![1.0; m]];
    let mut base_rhs = vec![1.0];
    for r in eq {
        base_rows.push(r.clone());
        base_rhs.push(0.0);
    }
    // candidate active inequalities: x_j >= 0, then the ge rows
    let mut ineq: Vec<Vec<f64>> = (0..m).map(|j| (0..m).map(|k| if k == j { 1.0 } else { 0.0 }).collect()).collect();
    ineq.extend(ge.iter().cloned());
    assert!(ineq.len() <= 16, "vertex enumeration is exponential");
    let mut out: Vec<Vec<f64>> = Vec::new();
    for mask in 0u32..(1 << ineq.len()) {
        let mut rows = base_rows.clone();
        let mut rhs = base_rhs.clone();
        for (i, r) in ineq.iter().enumerate() {
            if mask >> i & 1 == 1 {
                rows.push(r.clone());
                rhs.push(0.0);
            }
        }
        let Some(mut x) = solve_unique(&rows, &rhs, m) else { continue };
        let dot = |r: &Vec<f64>, x: &Vec<f64>| r.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        if x.iter().any(|v| *v < -TOL) || ge.iter().any(|r| dot(r, &x) < -TOL) {
            continue;
        }
        for v in x.iter_mut() {
            *v = v.max(0.0);
        }
        if !out.iter().any(|y| y.iter().zip(&x).all(|(a, b)| (a - b).abs() < TOL)) {
            out.push(x);
        }
    }
    out
}

/// Extremes of a linear objective over the polytope of [`vertices`].
pub fn lp_range(m: usize, eq: &[Vec<f64>], ge: &[Vec<f64>], obj: &[f64]) -> Option<(f64, f64)> {
    let vs = vertices(m, eq, ge);
    let vals: Vec<f64> = vs.iter().map(|v| v.iter().zip(obj).map(|(a, b)| a * b).sum()).collect();
    if vals.is_empty() {
        return None;
    }
    Some((vals.iter().cloned().fold(f64::INFINITY, f64::min), vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)))
}

/// Cross-entropy minimizer of `nu` against `mu` over
/// `{nu : sum nu = 1, eq · nu = 0, ge · nu >= 0}` with `nu << mu`.
///
/// Primal method: `nu = V^T w` over the polytope's vertices `V` and
/// exponentiated-gradient descent on the weights `w`, stopped by the
/// Frank–Wolfe gap. Cross entropy is 1-strongly convex in total variation,
/// so a gap `g` certifies a variation distance of at most `sqrt(g / 2)` to
/// the true minimizer.
pub fn ce_project_oracle(mu: &[f64], eq: &[Vec<f64>], ge: &[Vec<f64>]) -> Option<Vec<f64>> {
    let support: Vec<usize> = (0..mu.len()).filter(|&x| mu[x] > 0.0).collect();
    let restrict = |r: &Vec<f64>| support.iter().map(|&x| r[x]).collect::<Vec<f64>>();
    let eq_s: Vec<Vec<f64>> = eq.iter().map(restrict).collect();
    let ge_s: Vec<Vec<f64>> = ge.iter().map(restrict).collect();
    let m = support.len();
    let vs = vertices(m, &eq_s, &ge_s);
    if vs.is_empty() {
        return None;
    }
    let mu_s: Vec<f64> = support.iter().map(|&x| mu[x]).collect();
    let nu_of = |w: &[f64]| -> Vec<f64> {
        let mut nu = vec![0.0; m];
        for (wk, v) in w.iter().zip(&vs) {
            for (n, x) in nu.iter_mut().zip(v) {
                *n += wk * x;
            }
        }
        nu
    };
    let ce = |nu: &[f64]| -> f64 {
        nu.iter().zip(&mu_s).filter(|(n, _)| **n > 0.0).map(|(n, m)| n * (n / m).ln()).sum()
    };
    let mut w = vec![1.0 / vs.len() as f64; vs.len()];
    let mut nu = nu_of(&w);
    let mut f = ce(&nu);
    let mut eta = 1.0;
    for _ in 0..200_000 {
        let score: Vec<f64> = nu.iter().zip(&mu_s).map(|(n, m)| if *n > 0.0 { (n / m).ln() + 1.0 } else { 0.0 }).collect();
        let g: Vec<f64> = vs.iter().map(|v| v.iter().zip(&score).map(|(a, b)| a * b).sum()).collect();
        let gmin = g.iter().cloned().fold(f64::INFINITY, f64::min);
        let gap = w.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() - gmin;
        if gap < 1e-13 {
            break;
        }
        eta *= 2.0;
        loop {
            let mut cand: Vec<f64> = w.iter().zip(&g).map(|(a, b)| a * (-eta * (b - gmin)).exp()).collect();
            let z: f64 = cand.iter().sum();
            cand.iter_mut().for_each(|c| *c /= z);
            let nu_c = nu_of(&cand);
            let f_c = ce(&nu_c);
            // Armijo sufficient decrease; plain decrease lets the iterates zig-zag
            let slope: f64 = g.iter().zip(cand.iter().zip(&w)).map(|(gk, (c, wk))| gk * (c - wk)).sum();
            if f_c <= f + 0.25 * slope || eta < 1e-12 {
                w = cand;
                nu = nu_c;
                f = f_c;
                break;
            }
            eta *= 0.5;
        }
    }
    let mut out = vec![0.0; mu.len()];
    for (k, &x) in support.iter().enumerate() {
        out[x] = nu[k];
    }
    Some(out)
}

/// Coefficients of `nu(phi | psi) - p` as a homogeneous row:
/// `1 - p` on `phi & psi`, `-p` on `psi & !phi`, zero elsewhere.
pub fn cond_row(n: usize, phi: &[bool], psi: &[bool], p: f64) -> Vec<f64> {
    (0..n)
        .map(|x| match (psi[x], phi[x]) {
            (false, _) => 0.0,
            (true, true) => 1.0 - p,
            (true, false) => -p,
        })
        .collect()
}
