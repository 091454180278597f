//! The phase space `A × Â`, its symplectic bicharacter, and maximal isotropic
//! subgroups in their `(H, β)` parametrization.
//!
//! A phase point `(x, ξ)` is addressed by the index `x·N + ξ`, which is also
//! its index in the doubled group `Z_{d_1}×…×Z_{d_n}×Z_{d_1}×…×Z_{d_n}`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{enumerate_subgroups_within, DualElement, Group, GroupElement, Subgroup};
use crate::par;
use crate::phase::PhaseExp;
use crate::quadratic::{enumerate_sym, SymHom};

/// A point `(x, ξ)` of phase space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: GroupElement,
    pub xi: DualElement,
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.x, self.xi)
    }
}

impl Group {
    /// Number of phase points, `N²`.
    pub fn phase_size(&self) -> usize {
        self.size() * self.size()
    }

    pub fn point_index(&self, x: usize, xi: usize) -> usize {
        x * self.size() + xi
    }

    /// Splits a phase-point index into `(x, ξ)` indices.
    pub fn point_parts(&self, p: usize) -> (usize, usize) {
        (p / self.size(), p % self.size())
    }

    pub fn point(&self, p: usize) -> PhasePoint {
        let (x, xi) = self.point_parts(p);
        PhasePoint {
            x: self.element(x),
            xi: self.dual_element(xi),
        }
    }

    pub fn point_index_of(&self, z: &PhasePoint) -> Result<usize> {
        Ok(self.point_index(self.index_of(&z.x)?, self.dual_index_of(&z.xi)?))
    }

    pub fn point_add(&self, p: usize, q: usize) -> usize {
        let (x, xi) = self.point_parts(p);
        let (y, eta) = self.point_parts(q);
        self.point_index(self.add(x, y), self.add(xi, eta))
    }

    pub fn point_neg(&self, p: usize) -> usize {
        let (x, xi) = self.point_parts(p);
        self.point_index(self.neg(x), self.neg(xi))
    }

    /// The doubled group `A × Â` as a group in its own right.
    pub fn doubled(&self) -> Group {
        let orders: Vec<i64> = self.orders().iter().chain(self.orders()).map(|&d| d as i64).collect();
        Group::new(&orders).expect("doubling a valid group")
    }

    /// `σ((x,ξ),(y,η)) = ξ(y)·conj(η(x))` on indices.
    pub fn symplectic_idx(&self, p: usize, q: usize) -> PhaseExp {
        let (x, xi) = self.point_parts(p);
        let (y, eta) = self.point_parts(q);
        self.pairing_idx(y, xi) * self.pairing_idx(x, eta).conj()
    }
}

/// The symplectic bicharacter `σ((x,ξ),(y,η)) = ξ(y)·conj(η(x))`.
pub fn symplectic_form(group: &Group, z: &PhasePoint, w: &PhasePoint) -> Result<PhaseExp> {
    Ok(group.symplectic_idx(group.point_index_of(z)?, group.point_index_of(w)?))
}

/// A maximal isotropic subgroup `K = {(x,ξ) : x ∈ H, ξ|_H = β(x)}`.
#[derive(Clone, Debug)]
pub struct IsotropicSubgroup {
    beta: SymHom,
    points: Vec<usize>,
    position: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl PartialEq for IsotropicSubgroup {
    fn eq(&self, other: &Self) -> bool {
        self.beta == other.beta
    }
}

impl Eq for IsotropicSubgroup {}

impl IsotropicSubgroup {
    pub fn group(&self) -> &Group {
        self.beta.domain().group()
    }

    /// The projection `H` of `K` to `A`.
    pub fn subgroup(&self) -> &Arc<Subgroup> {
        self.beta.domain()
    }

    pub fn beta(&self) -> &SymHom {
        &self.beta
    }

    /// Sorted phase-point indices of the members.
    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: usize) -> bool {
        self.position[p] != ABSENT
    }

    /// Position of a phase point in [`Self::points`].
    pub fn position(&self, p: usize) -> Option<usize> {
        match self.position[p] {
            ABSENT => None,
            i => Some(i as usize),
        }
    }

    /// Canonical lift of `x ∈ H`: the first `ξ` (canonical order) with
    /// `(x, ξ) ∈ K`.
    pub fn lift(&self, x: usize) -> Option<usize> {
        let n = self.group().size();
        let start = self.points.partition_point(|&p| p < x * n);
        self.points
            .get(start)
            .filter(|&&p| p / n == x)
            .map(|&p| p % n)
    }

    /// The fiber `H⊥ = {ξ : (0, ξ) ∈ K}`.
    pub fn fiber_at_zero(&self) -> Vec<usize> {
        let n = self.group().size();
        self.points.iter().take_while(|&&p| p < n).copied().collect()
    }

    pub fn point_list(&self) -> Vec<PhasePoint> {
        self.points.iter().map(|&p| self.group().point(p)).collect()
    }
}

/// Builds `K` from `(H, β)`.
pub fn isotropic_from_pair(h: &Arc<Subgroup>, beta: &SymHom) -> Result<IsotropicSubgroup> {
    if beta.domain() != h {
        return Err(Error::ShapeMismatch("β is not defined on H".into()));
    }
    let group = h.group();
    let n = group.size();
    let basis = h.decomposition().basis().to_vec();
    let per_x = par::map(h.elements(), |&x| {
        let targets: Vec<PhaseExp> = basis.iter().map(|&g| beta.eval(x, g)).collect();
        (0..n)
            .filter(|&xi| basis.iter().zip(&targets).all(|(&g, &t)| group.pairing_idx(g, xi) == t))
            .map(|xi| x * n + xi)
            .collect::<Vec<_>>()
    });
    let points: Vec<usize> = per_x.into_iter().flatten().collect();
    debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
    let mut position = vec![ABSENT; n * n];
    for (i, &p) in points.iter().enumerate() {
        position[p] = i as u32;
    }
    Ok(IsotropicSubgroup {
        beta: beta.clone(),
        points,
        position,
    })
}

/// Recovers `(H, β)` from the point set of a maximal isotropic subgroup.
pub fn pair_from_isotropic(group: &Group, points: &[usize]) -> Result<(Arc<Subgroup>, SymHom)> {
    let n = group.size();
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.iter().any(|&p| p >= n * n) {
        return Err(Error::NotSubgroup("phase point out of range".into()));
    }
    let doubled = group.doubled();
    Subgroup::from_elements(&doubled, pts.clone())?;
    for &p in &pts {
        for &q in &pts {
            if !group.symplectic_idx(p, q).is_one() {
                return Err(Error::NotIsotropic(format!(
                    "σ({}, {}) ≠ 1",
                    group.point(p),
                    group.point(q)
                )));
            }
        }
    }
    if pts.len() != n {
        return Err(Error::WrongCardinality {
            expected: n,
            got: pts.len(),
        });
    }
    let mut proj: Vec<usize> = pts.iter().map(|&p| p / n).collect();
    proj.dedup();
    let h = Arc::new(Subgroup::from_elements(group, proj)?);
    let d = h.decomposition();
    let e = d.orders();
    let two_n = group.phase_modulus();
    let lift = |x: usize| {
        pts.iter()
            .find(|&&p| p / n == x)
            .map(|&p| p % n)
            .expect("projection is onto H")
    };
    let mut matrix = vec![vec![0u64; e.len()]; e.len()];
    for k in 0..e.len() {
        let xi = lift(d.basis()[k]);
        for j in 0..e.len() {
            // β(g_k)(g_j) = ξ_k(g_j) = ζ^{c_jk · 2N / e_j}
            let v = group.pairing_idx(d.basis()[j], xi);
            matrix[j][k] = v.exponent() * e[j] / two_n;
        }
    }
    let beta = SymHom::new(h.clone(), matrix)?;
    let rebuilt = isotropic_from_pair(&h, &beta)?;
    if rebuilt.points != pts {
        return Err(Error::NotIsotropic("point set does not match its (H, β) parametrization".into()));
    }
    Ok((h, beta))
}

/// All maximal isotropic subgroups, one per `(H, β)`, in subgroup order then
/// form order.
pub fn enumerate_maximal_isotropic(group: &Group, bound: u64) -> Result<Vec<IsotropicSubgroup>> {
    let subgroups = enumerate_subgroups_within(group, bound)?;
    let blocks = par::map(&subgroups, |h| {
        enumerate_sym(h)
            .iter()
            .map(|beta| isotropic_from_pair(h, beta).expect("β enumerated on H"))
            .collect::<Vec<_>>()
    });
    Ok(blocks.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_ENUMERATION_BOUND;

    fn z2() -> Group {
        Group::new(&[2]).unwrap()
    }

    #[test]
    fn symplectic_examples() {
        let g = z2();
        let z = g.point(g.point_index(1, 0));
        let w = g.point(g.point_index(0, 1));
        assert_eq!(symplectic_form(&g, &z, &w).unwrap().exponent(), 2);
        assert!(symplectic_form(&g, &z, &z).unwrap().is_one());
        let y = g.point(g.point_index(1, 0));
        assert!(symplectic_form(&g, &z, &y).unwrap().is_one());
    }

    #[test]
    fn isotropic_examples() {
        let g = z2();
        let trivial = Arc::new(Subgroup::trivial(&g));
        let k = isotropic_from_pair(&trivial, &SymHom::zero(trivial.clone())).unwrap();
        assert_eq!(k.points(), &[0, 1]);
        let full = Arc::new(Subgroup::whole(&g));
        let k = isotropic_from_pair(&full, &SymHom::zero(full.clone())).unwrap();
        assert_eq!(k.points(), &[0, 2]);
        let one = SymHom::new(full.clone(), vec![vec![1]]).unwrap();
        let k = isotropic_from_pair(&full, &one).unwrap();
        assert_eq!(k.points(), &[0, 3]);
        let (h, beta) = pair_from_isotropic(&g, k.points()).unwrap();
        assert_eq!(h, full);
        assert_eq!(beta, one);
    }

    #[test]
    fn pair_from_isotropic_errors() {
        let g = z2();
        assert!(matches!(pair_from_isotropic(&g, &[0, 1, 2, 3]), Err(Error::NotIsotropic(_))));
        assert!(matches!(pair_from_isotropic(&g, &[0]), Err(Error::WrongCardinality { .. })));
        assert!(matches!(pair_from_isotropic(&g, &[0, 3, 1]), Err(Error::NotSubgroup(_))));
    }

    #[test]
    fn maximal_isotropic_counts() {
        let count = |o: &[i64]| {
            enumerate_maximal_isotropic(&Group::new(o).unwrap(), DEFAULT_ENUMERATION_BOUND)
                .unwrap()
                .len()
        };
        assert_eq!(count(&[2]), 3);
        assert_eq!(count(&[3]), 4);
        assert_eq!(count(&[2, 2]), 15);
    }

    #[test]
    fn lift_and_fiber() {
        let g = Group::new(&[4]).unwrap();
        let h = Arc::new(Subgroup::generated_by(&g, &[2]));
        let beta = SymHom::new(h.clone(), vec![vec![1]]).unwrap();
        let k = isotropic_from_pair(&h, &beta).unwrap();
        assert_eq!(k.len(), 4);
        assert_eq!(k.fiber_at_zero(), vec![0, 2]);
        assert_eq!(k.lift(2), Some(1));
        assert_eq!(k.lift(1), None);
    }
}
