//! Sanity checks of the reference implementations against closed forms.

mod common;

use common::*;

#[test]
fn vertices_of_the_simplex() {
    let vs = vertices(3, &[], &[]);
    assert_eq!(vs.len(), 3);
}

#[test]
fn vertices_with_a_cut() {
    // x0 >= x1 on the 2-simplex: vertices e0, e2, (1/2, 1/2, 0)
    let vs = vertices(3, &[], &[vec![1.0, -1.0, 0.0]]);
    assert_eq!(vs.len(), 3);
    assert!(vs.iter().any(|v| (v[0] - 0.5).abs() < 1e-12 && (v[1] - 0.5).abs() < 1e-12));
}

#[test]
fn lp_range_of_a_conditional_row() {
    // nu(A) = 0.3 with A = {0, 1}: nu(0) ranges over [0, 0.3]
    let row = cond_row(4, &[true, true, false, false], &[true; 4], 0.3);
    let (lo, hi) = lp_range(4, &[row], &[], &[1.0, 0.0, 0.0, 0.0]).unwrap();
    assert!(lo.abs() < 1e-12 && (hi - 0.3).abs() < 1e-12);
}

#[test]
fn projection_onto_a_mass_constraint_is_jeffrey() {
    let mu = [0.1, 0.2, 0.3, 0.4];
    let a = [true, false, true, false];
    let row = cond_row(4, &a, &[true; 4], 0.7);
    let nu = ce_project_oracle(&mu, &[row], &[]).unwrap();
    let want = jeffrey_oracle(&mu, &[vec![0, 2], vec![1, 3]], &[0.7, 0.3]).unwrap();
    assert!(variation(&nu, &want) < 1e-6, "{nu:?} vs {want:?}");
}

#[test]
fn slack_inequality_leaves_the_prior() {
    let mu = [0.25; 4];
    let row = cond_row(4, &[true, false, false, false], &[true; 4], 0.1);
    let nu = ce_project_oracle(&mu, &[], &[row]).unwrap();
    assert!(variation(&nu, &mu) < 1e-6);
}

#[test]
fn impossible_constraints_have_no_projection() {
    // nu(0) = 1 but mu(0) = 0
    let mu = [0.0, 0.5, 0.5];
    let row = cond_row(3, &[true, false, false], &[true; 3], 1.0);
    assert!(ce_project_oracle(&mu, &[row], &[]).is_none());
}

#[test]
fn slack_inequality_on_two_atoms() {
    let mu = [0.5, 0.5];
    let row = cond_row(2, &[true, false], &[true, true], 0.25);
    let nu = ce_project_oracle(&mu, &[], &[row]).unwrap();
    assert!(variation(&nu, &mu) < 1e-6, "{nu:?}");
}
