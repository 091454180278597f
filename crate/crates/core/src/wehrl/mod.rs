//! Husimi functions, generalized Wehrl entropies and the checks of their
//! lower bound, Berezin–Lieb inequality, upper bound and the Fourier identity
//! for Husimi functions.

mod concave;

pub use concave::ConcaveFn;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::par;
use crate::phase_space::PhasePoint;
use crate::stabilizer::is_sstate;
use crate::weyl::{character_table, characteristic_fn, cst, match_shift_idx, DensityOperator, WaveFunction};

/// Cushion for inequality checks.
pub const BOUND_TOLERANCE: f64 = 1e-9;
/// Support threshold for characteristic functions.
pub const SUPPORT_THRESHOLD: f64 = 1e-9;
/// Largest admissible residual of the Fourier identity.
pub const FOURIER_TOLERANCE: f64 = 1e-8;
/// Relative tolerance of the overlap test used to match shifts.
const MATCH_TOLERANCE: f64 = 1e-9;

/// `|entropy − bound| ≤ 1e-9·max(1, |bound|)`.
pub fn is_equal_within(entropy: f64, bound: f64) -> bool {
    (entropy - bound).abs() <= BOUND_TOLERANCE * bound.abs().max(1.0)
}

/// The Husimi function `u(z) = ⟨π(z)φ, ρ π(z)φ⟩` on `A × Â`.
#[derive(Clone, Debug, PartialEq)]
pub struct HusimiField {
    group: Group,
    values: Vec<f64>,
}

impl HusimiField {
    pub fn group(&self) -> &Group {
        &self.group
    }

    /// Values indexed by phase-point index.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Checks `0 ≤ u ≤ 1 + 1e-12` and `(1/N)Σu = 1 ± 1e-9`.
    pub fn check_invariants(&self) -> Result<()> {
        let lo = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo < -1e-12 || hi > 1.0 + 1e-12 {
            return Err(Error::TheoryViolation(format!("Husimi values leave [0,1]: [{lo}, {hi}]")));
        }
        let avg = self.values.iter().sum::<f64>() / self.group.size() as f64;
        if (avg - 1.0).abs() > 1e-9 {
            return Err(Error::TheoryViolation(format!("Husimi average {avg} ≠ 1")));
        }
        Ok(())
    }
}

/// Computes `u_{φ,ρ}` directly from the definition.
pub fn husimi(phi: &WaveFunction, rho: &DensityOperator) -> Result<HusimiField> {
    phi.check_normalized(1e-9)?;
    let group = phi.group();
    if group != rho.group() {
        return Err(Error::ShapeMismatch("state and density operator live on different groups".into()));
    }
    let n = group.size();
    let chars = character_table(group);
    let m = rho.matrix();
    let rows = par::map_range(n, |x| {
        // u(x,ξ) = Σ_{a,b} conj(ξ(a)φ(a−x)) ρ[a][b] ξ(b) φ(b−x)
        let shifted: Vec<Complex64> = (0..n).map(|a| phi.amplitudes()[group.sub(a, x)]).collect();
        (0..n)
            .map(|xi| {
                let row = &chars[xi * n..(xi + 1) * n];
                let v: Vec<Complex64> = (0..n).map(|b| row[b] * shifted[b]).collect();
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..n {
                    let mut s = Complex64::new(0.0, 0.0);
                    for b in 0..n {
                        s += m[(a, b)] * v[b];
                    }
                    acc += v[a].conj() * s;
                }
                acc.re
            })
            .collect::<Vec<_>>()
    });
    Ok(HusimiField {
        group: group.clone(),
        values: rows.into_iter().flatten().collect(),
    })
}

/// `E_G = (1/N) Σ_z G(u(z))`, with `u` clamped into `[0,1]`.
pub fn entropy(g: &ConcaveFn, u: &HusimiField) -> f64 {
    u.values.iter().map(|&v| g.eval(v.clamp(0.0, 1.0))).sum::<f64>() / u.group.size() as f64
}

/// Structure found when the lower bound is attained.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinWitness {
    /// `ψ = e^{iθ} π(z) φ`.
    pub theta: f64,
    pub z: PhasePoint,
    /// Points where the Husimi function exceeds 1/2.
    pub support: Vec<PhasePoint>,
    pub support_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinBoundReport {
    pub entropy: f64,
    pub bound: f64,
    pub equality: bool,
    pub witness: Option<MinWitness>,
}

/// Checks `E_G(φ,ρ) ≥ G(1)`; on equality with non-linear `G`, extracts the
/// witness: `φ` is an S-state, `ρ = |ψ⟩⟨ψ|` and `ψ` is a shift of `φ`.
pub fn verify_min_bound(g: &ConcaveFn, phi: &WaveFunction, rho: &DensityOperator) -> Result<MinBoundReport> {
    let u = husimi(phi, rho)?;
    let e = entropy(g, &u);
    let bound = g.value_at_1();
    if e < bound - BOUND_TOLERANCE {
        return Err(Error::TheoryViolation(format!("entropy {e} below the lower bound {bound}")));
    }
    let equality = is_equal_within(e, bound);
    let witness = if equality && !g.is_linear() {
        Some(min_witness(phi, rho, &u)?)
    } else {
        None
    };
    Ok(MinBoundReport {
        entropy: e,
        bound,
        equality,
        witness,
    })
}

fn min_witness(phi: &WaveFunction, rho: &DensityOperator, u: &HusimiField) -> Result<MinWitness> {
    let group = phi.group();
    if is_sstate(phi, 1e-9)?.is_none() {
        return Err(Error::TheoryViolation("lower bound attained by a window that is not an S-state".into()));
    }
    let eig = rho.eigen();
    let (top, psi) = &eig[0];
    if (top - 1.0).abs() > 1e-6 {
        return Err(Error::TheoryViolation(format!("lower bound attained by a mixed state (top eigenvalue {top})")));
    }
    let (theta, p) = match_shift_idx(phi, psi, MATCH_TOLERANCE)?
        .ok_or_else(|| Error::TheoryViolation("lower bound attained but ψ is not a shift of φ".into()))?;
    let support: Vec<PhasePoint> = (0..u.values.len())
        .filter(|&q| u.values[q] > 0.5)
        .map(|q| group.point(q))
        .collect();
    Ok(MinWitness {
        theta,
        z: group.point(p),
        support_size: support.len(),
        support,
    })
}

/// One eigenvector of `ρ` matched to a shift of the window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftMatch {
    pub weight: f64,
    pub theta: f64,
    pub z: PhasePoint,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BerezinLiebReport {
    pub entropy: f64,
    pub trace_g: f64,
    pub gap: f64,
    pub equality: bool,
    /// Present when equality holds for strictly concave `G` and the nonzero
    /// eigenvalues of `ρ` are distinct.
    pub shifts: Option<Vec<ShiftMatch>>,
}

/// Checks `E_G(φ,ρ) ≥ Tr G(ρ)` and diagnoses the equality structure.
pub fn berezin_lieb(g: &ConcaveFn, phi: &WaveFunction, rho: &DensityOperator) -> Result<BerezinLiebReport> {
    let u = husimi(phi, rho)?;
    let e = entropy(g, &u);
    let eig = rho.eigen();
    let trace_g: f64 = eig.iter().map(|(p, _)| g.eval(p.clamp(0.0, 1.0))).sum();
    let gap = e - trace_g;
    if gap < -BOUND_TOLERANCE {
        return Err(Error::TheoryViolation(format!("entropy {e} below Tr G(ρ) = {trace_g}")));
    }
    let equality = is_equal_within(e, trace_g);
    let weights: Vec<f64> = eig.iter().map(|(p, _)| *p).filter(|&p| p > 1e-12).collect();
    let distinct = weights.windows(2).all(|w| (w[0] - w[1]).abs() > 1e-6);
    let shifts = if equality && g.is_strictly_concave() && distinct {
        Some(equality_shifts(phi, &eig)?)
    } else {
        None
    };
    Ok(BerezinLiebReport {
        entropy: e,
        trace_g,
        gap,
        equality,
        shifts,
    })
}

fn equality_shifts(phi: &WaveFunction, eig: &[(f64, WaveFunction)]) -> Result<Vec<ShiftMatch>> {
    let group = phi.group();
    let ambiguity = cst(phi, phi)?;
    let norm2 = phi.norm() * phi.norm();
    let k: Vec<usize> = (0..ambiguity.values().len())
        .filter(|&p| ambiguity.values()[p].norm() >= norm2 * (1.0 - MATCH_TOLERANCE))
        .collect();
    let mut found: Vec<(f64, f64, usize)> = Vec::new();
    for (weight, psi) in eig.iter().filter(|(p, _)| *p > 1e-12) {
        let (theta, p) = match_shift_idx(phi, psi, MATCH_TOLERANCE)?.ok_or_else(|| {
            Error::TheoryViolation("Berezin–Lieb equality but an eigenvector is not a shift of φ".into())
        })?;
        for &(_, _, q) in &found {
            let diff = group.point_add(p, group.point_neg(q));
            if k.binary_search(&diff).is_ok() {
                return Err(Error::TheoryViolation("Berezin–Lieb equality with shifts in the same coset of K".into()));
            }
        }
        found.push((*weight, theta, p));
    }
    Ok(found
        .into_iter()
        .map(|(weight, theta, p)| ShiftMatch {
            weight,
            theta,
            z: group.point(p),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxBoundReport {
    pub entropy: f64,
    pub bound: f64,
    pub equality: bool,
    pub support_overlap: Vec<PhasePoint>,
    pub overlap_trivial: bool,
}

/// Checks `E_G(φ,ρ) ≤ N·G(1/N)`. For pure `ρ` and strictly concave `G`,
/// equality must coincide with `supp φ̃ ∩ supp ρ̃ = {0}`.
pub fn verify_max_bound(g: &ConcaveFn, phi: &WaveFunction, rho: &DensityOperator) -> Result<MaxBoundReport> {
    let group = phi.group();
    let n = group.size() as f64;
    let u = husimi(phi, rho)?;
    let e = entropy(g, &u);
    let bound = n * g.eval(1.0 / n);
    if e > bound + BOUND_TOLERANCE {
        return Err(Error::TheoryViolation(format!("entropy {e} above the upper bound {bound}")));
    }
    let equality = is_equal_within(e, bound);
    let phi_t = characteristic_fn(&DensityOperator::pure(phi)?);
    let rho_t = characteristic_fn(rho);
    let overlap: Vec<usize> = (0..phi_t.values().len())
        .filter(|&p| phi_t.values()[p].norm() > SUPPORT_THRESHOLD && rho_t.values()[p].norm() > SUPPORT_THRESHOLD)
        .collect();
    let overlap_trivial = overlap == [0];
    let pure = rho.eigen()[0].0 > 1.0 - 1e-9;
    if pure && g.is_strictly_concave() && equality != overlap_trivial {
        return Err(Error::TheoryViolation(format!(
            "upper-bound equality is {equality} but the support overlap has {} points",
            overlap.len()
        )));
    }
    Ok(MaxBoundReport {
        entropy: e,
        bound,
        equality,
        support_overlap: overlap.iter().map(|&p| group.point(p)).collect(),
        overlap_trivial,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FourierReport {
    /// `F u(ξ, −x)` indexed by the phase-point index of `(x, ξ)`.
    pub lhs: Vec<Complex64>,
    /// `φ̃(x,ξ)·conj(ρ̃(x,ξ))`.
    pub rhs: Vec<Complex64>,
    pub residual: f64,
}

/// The symplectic-style Fourier transform on `A × Â`,
/// `F f(ξ′, x′) = (1/N) Σ_{(x,ξ)} conj(ξ′(x) ξ(x′)) f(x, ξ)`, returned as a
/// table indexed by `ξ′·N + x′`.
pub fn phase_space_fourier(group: &Group, f: &[f64]) -> Vec<Complex64> {
    let n = group.size();
    let chars = character_table(group);
    let rows = par::map_range(n, |xi_p| {
        (0..n)
            .map(|x_p| {
                let mut acc = Complex64::new(0.0, 0.0);
                for x in 0..n {
                    let a = chars[xi_p * n + x].conj();
                    for xi in 0..n {
                        acc += a * chars[xi * n + x_p].conj() * f[x * n + xi];
                    }
                }
                acc / n as f64
            })
            .collect::<Vec<_>>()
    });
    rows.into_iter().flatten().collect()
}

/// Evaluates both sides of `F u(ξ,−x) = φ̃(x,ξ)·conj(ρ̃(x,ξ))`.
pub fn fourier_husimi(phi: &WaveFunction, rho: &DensityOperator) -> Result<FourierReport> {
    let group = phi.group();
    let n = group.size();
    let u = husimi(phi, rho)?;
    let fu = phase_space_fourier(group, &u.values);
    let phi_t = characteristic_fn(&DensityOperator::pure(phi)?);
    let rho_t = characteristic_fn(rho);
    let mut lhs = Vec::with_capacity(n * n);
    let mut rhs = Vec::with_capacity(n * n);
    for x in 0..n {
        for xi in 0..n {
            lhs.push(fu[xi * n + group.neg(x)]);
            let p = group.point_index(x, xi);
            rhs.push(phi_t.values()[p] * rho_t.values()[p].conj());
        }
    }
    let residual = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    if residual > FOURIER_TOLERANCE {
        return Err(Error::TheoryViolation(format!("Fourier identity residual {residual:e}")));
    }
    Ok(FourierReport { lhs, rhs, residual })
}

/// `f(t) = Σ_i G(t_i)` on `{t ∈ [0,1]^M : Σ t = N}`; used to probe that the
/// constant vector is a maximizer.
pub fn polytope_objective(g: &ConcaveFn, t: &[f64]) -> f64 {
    t.iter().map(|&v| g.eval(v)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> Group {
        Group::new(&[2]).unwrap()
    }

    #[test]
    fn husimi_examples() {
        let g = Group::new(&[3]).unwrap();
        let u = husimi(&WaveFunction::uniform(&g), &DensityOperator::maximally_mixed(&g)).unwrap();
        assert!(u.values().iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
        let d0 = WaveFunction::delta(&z2(), 0);
        let u = husimi(&d0, &DensityOperator::pure(&d0).unwrap()).unwrap();
        assert_eq!(u.values(), &[1.0, 1.0, 0.0, 0.0]);
        let u = husimi(&d0, &DensityOperator::pure(&WaveFunction::uniform(&z2())).unwrap()).unwrap();
        assert!(u.values().iter().all(|v| (v - 0.5).abs() < 1e-15));
        u.check_invariants().unwrap();
    }

    #[test]
    fn entropy_examples() {
        let g = ConcaveFn::neg_t_log_t();
        let d0 = WaveFunction::delta(&z2(), 0);
        let u = husimi(&d0, &DensityOperator::pure(&d0).unwrap()).unwrap();
        assert_eq!(entropy(&g, &u), 0.0);
        let u = husimi(&d0, &DensityOperator::maximally_mixed(&z2())).unwrap();
        assert!((entropy(&g, &u) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn min_bound_examples() {
        let g = ConcaveFn::neg_t_log_t();
        let group = z2();
        let d0 = WaveFunction::delta(&group, 0);
        let d1 = WaveFunction::delta(&group, 1);
        let r = verify_min_bound(&g, &d0, &DensityOperator::pure(&d1).unwrap()).unwrap();
        assert!(r.equality);
        let w = r.witness.unwrap();
        assert_eq!(w.z, group.point(group.point_index(1, 0)));
        assert_eq!(w.support_size, 2);
        let r = verify_min_bound(&g, &d0, &DensityOperator::maximally_mixed(&group)).unwrap();
        assert!(!r.equality);
        assert!((r.entropy - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn berezin_lieb_examples() {
        let g = ConcaveFn::neg_t_log_t();
        let group = z2();
        let d0 = WaveFunction::delta(&group, 0);
        let d1 = WaveFunction::delta(&group, 1);
        let r = berezin_lieb(&g, &d0, &DensityOperator::maximally_mixed(&group)).unwrap();
        assert!(r.equality && r.gap.abs() < 1e-15);
        let rho = DensityOperator::mixture(&group, &[(0.3, d0.clone()), (0.7, d1)]).unwrap();
        let r = berezin_lieb(&g, &d0, &rho).unwrap();
        assert!(r.equality);
        let zs: Vec<PhasePoint> = r.shifts.unwrap().into_iter().map(|s| s.z).collect();
        assert_eq!(zs, vec![group.point(group.point_index(1, 0)), group.point(0)]);
    }

    #[test]
    fn max_bound_examples() {
        let g = ConcaveFn::neg_t_log_t();
        let group = z2();
        let d0 = WaveFunction::delta(&group, 0);
        let uni = WaveFunction::uniform(&group);
        let r = verify_max_bound(&g, &d0, &DensityOperator::pure(&uni).unwrap()).unwrap();
        assert!(r.equality && r.overlap_trivial);
        assert!((r.entropy - 2f64.ln()).abs() < 1e-15);
        let r = verify_max_bound(&g, &d0, &DensityOperator::pure(&d0).unwrap()).unwrap();
        assert!(!r.equality);
        assert_eq!(r.support_overlap.len(), 2);
    }

    #[test]
    fn fourier_examples() {
        let group = Group::new(&[2, 2]).unwrap();
        let d0 = WaveFunction::delta(&group, 0);
        let r = fourier_husimi(&d0, &DensityOperator::maximally_mixed(&group)).unwrap();
        assert!((r.lhs[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(r.lhs[1..].iter().all(|v| v.norm() < 1e-12));
        let r = fourier_husimi(&d0, &DensityOperator::pure(&d0).unwrap()).unwrap();
        assert!(r.residual < 1e-12);
    }
}
