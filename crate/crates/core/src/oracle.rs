//! Brute-force stabilizer-state oracle built from dense linear algebra only.
//!
//! Maximal isotropic subgroups are found by scanning every subgroup of the
//! doubled group `A × Â`; the stabilized states of each `K` are the joint
//! eigenvectors of the commuting operators `W(z)`, `z ∈ K`, and the phases
//! `α` are read off the eigenvalues. Every candidate is confirmed by forming
//! the average `(1/N) Σ α(z) W(z)` and checking that it is the rank-one
//! projector onto the state.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::{enumerate_subgroups_within, Group};
use crate::par;
use crate::phase::PhaseExp;

/// One stabilizer state found by the oracle.
#[derive(Clone, Debug)]
pub struct OracleState {
    /// Sorted phase-point indices of `K`.
    pub points: Vec<usize>,
    /// `α` aligned with `points`.
    pub alpha: Vec<PhaseExp>,
    pub amplitudes: Vec<Complex64>,
}

/// Dense matrix of `W(x,ξ)`: `W δ_y = ξ(y+x) δ_{y+x}`.
pub fn weyl_matrix(group: &Group, p: usize) -> DMatrix<Complex64> {
    let n = group.size();
    let (x, xi) = group.point_parts(p);
    let mut m = DMatrix::zeros(n, n);
    for y in 0..n {
        let t = group.add(y, x);
        m[(t, y)] = group.pairing_idx(t, xi).to_complex();
    }
    m
}

/// Maximal isotropic subgroups as sorted point lists, by exhaustive search
/// over the subgroups of the doubled group.
pub fn maximal_isotropic_points(group: &Group, bound: u64) -> Result<Vec<Vec<usize>>> {
    let n = group.size();
    if group.order() > bound {
        return Err(Error::BoundExceeded {
            order: group.order(),
            bound,
        });
    }
    let doubled = group.doubled();
    let all = enumerate_subgroups_within(&doubled, doubled.order())?;
    Ok(all
        .iter()
        .filter(|k| k.len() == n)
        .filter(|k| {
            k.elements()
                .iter()
                .all(|&p| k.elements().iter().all(|&q| group.symplectic_idx(p, q).is_one()))
        })
        .map(|k| k.elements().to_vec())
        .collect())
}

fn states_of(group: &Group, points: &[usize], seed: u64) -> Result<Vec<OracleState>> {
    let n = group.size();
    let ops: Vec<DMatrix<Complex64>> = points.iter().map(|&p| weyl_matrix(group, p)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mix = DMatrix::<Complex64>::zeros(n, n);
    for w in &ops {
        let c = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        mix += w * c + w.adjoint() * c.conj();
    }
    let eig = mix.symmetric_eigen();
    let modulus = group.phase_modulus();
    let mut out = Vec::with_capacity(n);
    for col in 0..n {
        let psi = eig.eigenvectors.column(col).into_owned();
        let mut alpha = Vec::with_capacity(points.len());
        for w in &ops {
            let lambda = (psi.adjoint() * w * &psi)[(0, 0)];
            let a = PhaseExp::quantize(lambda.conj(), modulus, 1e-6).ok_or_else(|| {
                Error::TheoryViolation("joint eigenvalue is not a power of ζ".into())
            })?;
            alpha.push(a);
        }
        let mut projector = DMatrix::<Complex64>::zeros(n, n);
        for (w, a) in ops.iter().zip(&alpha) {
            projector += w * a.to_complex();
        }
        projector /= Complex64::new(n as f64, 0.0);
        let rank_one = &psi * psi.adjoint();
        let dev = (&projector - rank_one).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if dev > 1e-8 {
            return Err(Error::TheoryViolation(format!("averaged group is not a rank-one projector ({dev:e})")));
        }
        out.push(OracleState {
            points: points.to_vec(),
            alpha,
            amplitudes: psi.iter().copied().collect(),
        });
    }
    Ok(out)
}

/// All stabilizer states of `A`, one per `(K, α)`.
pub fn oracle_states(group: &Group, bound: u64) -> Result<Vec<OracleState>> {
    let ks = maximal_isotropic_points(group, bound)?;
    let blocks = par::map_range(ks.len(), |i| states_of(group, &ks[i], i as u64 + 1));
    let mut out = Vec::new();
    for b in blocks {
        out.extend(b?);
    }
    Ok(out)
}

/// Key identifying a state up to global phase: amplitudes rotated so the
/// first nonzero entry is real positive, then rounded.
pub fn phase_key(amplitudes: &[Complex64]) -> Vec<(i64, i64)> {
    let lead = amplitudes
        .iter()
        .find(|a| a.norm() > 1e-6)
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    let rot = lead.conj() / lead.norm();
    amplitudes
        .iter()
        .map(|a| {
            let v = a * rot;
            ((v.re * 1e6).round() as i64, (v.im * 1e6).round() as i64)
        })
        .collect()
}

/// Number of distinct states (up to global phase) found by the oracle.
pub fn oracle_count(group: &Group, bound: u64) -> Result<usize> {
    let states = oracle_states(group, bound)?;
    let keys: std::collections::HashSet<_> = states.iter().map(|s| phase_key(&s.amplitudes)).collect();
    Ok(keys.len())
}
