#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use stabforge::Group;

/// Representatives of every group of order ≤ `n` (plus a few alternative
/// presentations), as factor-order lists.
pub fn groups_upto(n: u64) -> Vec<Group> {
    const ALL: &[&[i64]] = &[
        &[2],
        &[3],
        &[4],
        &[2, 2],
        &[5],
        &[6],
        &[2, 3],
        &[7],
        &[8],
        &[4, 2],
        &[2, 2, 2],
        &[9],
        &[3, 3],
        &[10],
        &[11],
        &[12],
        &[6, 2],
        &[2, 2, 3],
        &[13],
        &[14],
        &[15],
        &[16],
        &[8, 2],
        &[4, 4],
        &[4, 2, 2],
        &[2, 2, 2, 2],
    ];
    ALL.iter()
        .map(|o| Group::new(o).unwrap())
        .filter(|g| g.order() <= n)
        .collect()
}

/// `exp(2πi Σ x_j ξ_j / d_j)` in floating point, independent of the exact
/// phase machinery.
pub fn pairing_c(group: &Group, x: usize, xi: usize) -> Complex64 {
    let rx = group.residues(x);
    let rxi = group.residues(xi);
    let t: f64 = rx
        .iter()
        .zip(&rxi)
        .zip(group.orders())
        .map(|((&a, &b), &d)| ((a * b) % d) as f64 / d as f64)
        .sum();
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t)
}

/// Dense `W(x,ξ)`: `δ_y ↦ ξ(y+x) δ_{y+x}`.
pub fn dense_shift(group: &Group, x: usize, xi: usize) -> DMatrix<Complex64> {
    let n = group.size();
    let mut m = DMatrix::zeros(n, n);
    for y in 0..n {
        let t = group.add(y, x);
        m[(t, y)] = pairing_c(group, t, xi);
    }
    m
}

/// `V_φψ(x,ξ) = Σ_y conj(ξ(y) φ(y−x)) ψ(y)`, indexed `x·N + ξ`.
pub fn dense_cst(group: &Group, phi: &[Complex64], psi: &[Complex64]) -> Vec<Complex64> {
    let n = group.size();
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for x in 0..n {
        for xi in 0..n {
            out[x * n + xi] = (0..n)
                .map(|y| (pairing_c(group, y, xi) * phi[group.sub(y, x)]).conj() * psi[y])
                .sum();
        }
    }
    out
}

/// `u(z) = ⟨π(z)φ, ρ π(z)φ⟩` with dense matrices.
pub fn dense_husimi(group: &Group, phi: &[Complex64], rho: &DMatrix<Complex64>) -> Vec<f64> {
    let n = group.size();
    let v = nalgebra::DVector::from_vec(phi.to_vec());
    (0..n * n)
        .map(|p| {
            let w = dense_shift(group, p / n, p % n) * &v;
            (w.adjoint() * rho * &w)[(0, 0)].re
        })
        .collect()
}
