//! Stabilizer groups and stabilizer states: both directions of the
//! correspondence, recognition of S-states, the moduli space of
//! `(translation, character of second degree)` classes, and state counts.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{enumerate_subgroups_within, extend_character_idx, Group, Subgroup};
use crate::par;
use crate::phase::PhaseExp;
use crate::phase_space::{isotropic_from_pair, pair_from_isotropic, IsotropicSubgroup};
use crate::quadratic::{enumerate_ch2, sym_count, Char2, SubChar2};
use crate::weyl::{cst, shift_apply_idx, ExactForm, WaveFunction};

/// Tolerance of the eigenvector test in [`verify_stabilized`].
pub const STABILIZED_TOLERANCE: f64 = 1e-9;

/// A stabilizer group `{α(z) π(z) : z ∈ K}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerGroup {
    k: IsotropicSubgroup,
    alpha: Vec<PhaseExp>,
}

impl StabilizerGroup {
    /// Validates the cocycle law
    /// `α(z + w) = α(z) α(w) conj(η(x))` for `z = (x,ξ)`, `w = (y,η)`.
    pub fn new(k: IsotropicSubgroup, alpha: Vec<PhaseExp>) -> Result<Self> {
        let group = k.group().clone();
        if alpha.len() != k.len() {
            return Err(Error::NotStabilizerGroup(format!(
                "α has {} values for {} points",
                alpha.len(),
                k.len()
            )));
        }
        if alpha.iter().any(|a| a.modulus() != group.phase_modulus()) {
            return Err(Error::NotStabilizerGroup("α values must be powers of ζ".into()));
        }
        for (i, &p) in k.points().iter().enumerate() {
            for (j, &q) in k.points().iter().enumerate() {
                let (x, _) = group.point_parts(p);
                let (_, eta) = group.point_parts(q);
                let r = k.position(group.point_add(p, q)).expect("K is a subgroup");
                if alpha[r] != alpha[i] * alpha[j] * group.pairing_idx(x, eta).conj() {
                    return Err(Error::NotStabilizerGroup(format!(
                        "cocycle law fails at {} and {}",
                        group.point(p),
                        group.point(q)
                    )));
                }
            }
        }
        Ok(StabilizerGroup { k, alpha })
    }

    /// Builds a group from an explicit list of `(point, α)` pairs.
    pub fn from_table(group: &Group, table: &[(usize, PhaseExp)]) -> Result<Self> {
        let points: Vec<usize> = table.iter().map(|t| t.0).collect();
        let (h, beta) = pair_from_isotropic(group, &points)
            .map_err(|e| Error::NotStabilizerGroup(e.to_string()))?;
        let k = isotropic_from_pair(&h, &beta)?;
        let mut alpha = vec![None; k.len()];
        for &(p, a) in table {
            let slot = &mut alpha[k.position(p).expect("same point set")];
            if slot.is_some_and(|old| old != a) {
                return Err(Error::NotStabilizerGroup("conflicting α values".into()));
            }
            *slot = Some(a);
        }
        let alpha = alpha.into_iter().map(|a| a.expect("every point listed")).collect();
        StabilizerGroup::new(k, alpha)
    }

    pub fn group(&self) -> &Group {
        self.k.group()
    }

    pub fn isotropic(&self) -> &IsotropicSubgroup {
        &self.k
    }

    /// `α` aligned with `isotropic().points()`.
    pub fn alpha(&self) -> &[PhaseExp] {
        &self.alpha
    }

    pub fn alpha_at(&self, p: usize) -> Option<PhaseExp> {
        self.k.position(p).map(|i| self.alpha[i])
    }
}

/// `φ(x) = (1/√#H)·h₀(x − y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SStateDescriptor {
    pub y: usize,
    pub h0: SubChar2,
}

impl SStateDescriptor {
    pub fn new(y: usize, h: Char2) -> Self {
        SStateDescriptor {
            y,
            h0: SubChar2::new(h),
        }
    }

    pub fn group(&self) -> &Group {
        self.h0.support().group()
    }

    pub fn subgroup(&self) -> &Arc<Subgroup> {
        self.h0.support()
    }

    pub fn character(&self) -> &Char2 {
        self.h0.restriction()
    }

    pub fn normalization(&self) -> f64 {
        1.0 / (self.subgroup().len() as f64).sqrt()
    }

    /// The canonical moduli class of this descriptor.
    pub fn moduli(&self) -> ModuliClass {
        ModuliClass::canonical(self.y, self.character().clone())
    }
}

/// Synthesizes the exact-form wave function of a descriptor.
pub fn sstate_synthesize(desc: &SStateDescriptor) -> WaveFunction {
    WaveFunction::from_exact(ExactForm {
        subgroup: desc.subgroup().clone(),
        representative: desc.y,
        phases: desc.character().values().to_vec(),
        scale: desc.normalization(),
    })
    .expect("descriptor tables match their subgroup")
}

/// A point of `A ×_H Ch₂(H)`, stored by its canonical representative: the
/// smallest `y` in its coset of `H`, with `h` re-based accordingly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuliClass {
    y: usize,
    h: Char2,
}

impl ModuliClass {
    /// Canonical representative of `[(y, h)]`. Moving `y` to `y* = y − d`
    /// with `d ∈ H` replaces `h` by `h·conj(β(d)(·))`.
    pub fn canonical(y: usize, h: Char2) -> Self {
        let sub = h.domain().clone();
        let group = sub.group();
        let y_star = sub.coset_min(y);
        let d = group.sub(y, y_star);
        if d == 0 {
            return ModuliClass { y: y_star, h };
        }
        let factor: Vec<PhaseExp> = sub.elements().iter().map(|&x| h.beta().eval(d, x).conj()).collect();
        let h = h.times_table(&factor).expect("re-basing by a character keeps h of second degree");
        ModuliClass { y: y_star, h }
    }

    pub fn subgroup(&self) -> &Arc<Subgroup> {
        self.h.domain()
    }

    pub fn y(&self) -> usize {
        self.y
    }

    pub fn character(&self) -> &Char2 {
        &self.h
    }

    pub fn descriptor(&self) -> SStateDescriptor {
        SStateDescriptor::new(self.y, self.h.clone())
    }

    /// The identity `[(y, 1)]` of the fiber over `[y]`.
    pub fn fiber_identity(h: &Arc<Subgroup>, y: usize) -> Self {
        ModuliClass::canonical(y, Char2::one(h.clone()))
    }

    pub fn fiber_inverse(&self) -> Self {
        ModuliClass::canonical(self.y, self.h.conj())
    }
}

/// `[(y,h)]·[(y′,h′)] = [(y, h·h′·β′(y−y′))]` for classes in the same fiber.
pub fn fiber_product(a: &ModuliClass, b: &ModuliClass) -> Result<ModuliClass> {
    let sub = a.subgroup();
    if sub != b.subgroup() {
        return Err(Error::NotInSameFiber);
    }
    let group = sub.group();
    let diff = group.sub(a.y, b.y);
    if !sub.contains(diff) {
        return Err(Error::NotInSameFiber);
    }
    let shift: Vec<PhaseExp> = sub.elements().iter().map(|&x| b.h.beta().eval(diff, x)).collect();
    let h = a.h.mul(&b.h)?.times_table(&shift)?;
    Ok(ModuliClass::canonical(a.y, h))
}

/// `K = K(H, β_h)` and `α(x,ξ) = conj(h₀(−x)·ξ(y))`.
pub fn group_from_sstate(desc: &SStateDescriptor) -> StabilizerGroup {
    let group = desc.group();
    let h = desc.character();
    let k = isotropic_from_pair(h.domain(), h.beta()).expect("β lives on H");
    let alpha = k
        .points()
        .iter()
        .map(|&p| {
            let (x, xi) = group.point_parts(p);
            let h_neg = h.value_at(group.neg(x)).expect("x ∈ H");
            (h_neg * group.pairing_idx(desc.y, xi)).conj()
        })
        .collect();
    StabilizerGroup { k, alpha }
}

/// Recovers the stabilized state of `G`:
/// (i) `y` with `ξ(y) = conj(α(0,ξ))` on `H⊥`;
/// (ii) `h(−x) = conj(α(x,ξ)·ξ(y))`, checked on every lift;
/// (iii) `h₀` is `h` extended by zero.
pub fn sstate_from_group(g: &StabilizerGroup) -> Result<SStateDescriptor> {
    let k = &g.k;
    let group = k.group();
    let n = group.size();
    let bad = |msg: String| Error::NotStabilizerGroup(msg);

    let fiber = k.fiber_at_zero();
    let perp = Subgroup::from_elements(group, fiber.clone()).map_err(|e| bad(e.to_string()))?;
    let chi: Vec<PhaseExp> = perp
        .elements()
        .iter()
        .map(|&xi| g.alpha[k.position(xi).expect("(0,ξ) ∈ K")].conj())
        .collect();
    let y = extend_character_idx(&perp, &chi).map_err(|e| bad(format!("step (i): {e}")))?;

    let sub = k.subgroup().clone();
    let mut table: Vec<Option<PhaseExp>> = vec![None; sub.len()];
    for (i, &p) in k.points().iter().enumerate() {
        let (x, xi) = (p / n, p % n);
        let value = (g.alpha[i] * group.pairing_idx(y, xi)).conj();
        let slot = &mut table[sub.position(group.neg(x)).expect("x ∈ H")];
        match slot {
            Some(old) if *old != value => {
                return Err(bad(format!("step (ii): h(−x) depends on the lift at x = {}", group.element(x))))
            }
            _ => *slot = Some(value),
        }
    }
    let values = table.into_iter().map(|v| v.expect("every x ∈ H has a lift")).collect();
    let h = Char2::from_table(sub, values).map_err(|e| bad(format!("step (iii): {e}")))?;
    Ok(SStateDescriptor::new(y, h))
}

/// True iff `α(z)π(z)φ = φ` for every `z ∈ K` within
/// [`STABILIZED_TOLERANCE`].
pub fn verify_stabilized(g: &StabilizerGroup, phi: &WaveFunction) -> Result<bool> {
    phi.check_normalized(1e-9)?;
    let group = g.group();
    if phi.group() != group {
        return Err(Error::ShapeMismatch("state and group live on different groups".into()));
    }
    for (i, &p) in g.k.points().iter().enumerate() {
        let (x, xi) = group.point_parts(p);
        let a = g.alpha[i].to_complex();
        let moved = shift_apply_idx(x, xi, phi);
        let dev = moved
            .amplitudes()
            .iter()
            .zip(phi.amplitudes())
            .map(|(m, v)| (a * m - v).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if dev > STABILIZED_TOLERANCE {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest deviation between `V_φφ` and `α·1_K` over phase space.
pub fn cst_criterion_deviation(g: &StabilizerGroup, phi: &WaveFunction) -> Result<f64> {
    let v = cst(phi, phi)?;
    Ok(v.values()
        .iter()
        .enumerate()
        .map(|(p, val)| {
            let expect = g.alpha_at(p).map_or(Complex64::new(0.0, 0.0), |a| a.to_complex());
            (val - expect).norm()
        })
        .fold(0.0, f64::max))
}

/// Recognizes S-states: the support must be a coset `y + H` with constant
/// modulus, and `u ↦ φ(y+u)/φ(y)` must be a character of second degree on
/// `H`. Amplitudes below `tol` times the largest one count as zero.
pub fn is_sstate(phi: &WaveFunction, tol: f64) -> Result<Option<SStateDescriptor>> {
    let norm = phi.norm();
    if norm == 0.0 {
        return Err(Error::ZeroState);
    }
    let group = phi.group();
    let amps = phi.amplitudes();
    let max = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let support: Vec<usize> = (0..amps.len()).filter(|&i| amps[i].norm() > tol * max).collect();
    let y = support[0];
    let shifted: Vec<usize> = support.iter().map(|&s| group.sub(s, y)).collect();
    let Ok(sub) = Subgroup::from_elements(group, shifted) else {
        return Ok(None);
    };
    let base = amps[y];
    let modulus = group.phase_modulus();
    let mut values = Vec::with_capacity(sub.len());
    for &u in sub.elements() {
        let ratio = amps[group.add(y, u)] / base;
        match PhaseExp::quantize(ratio, modulus, tol) {
            Some(p) => values.push(p),
            None => return Ok(None),
        }
    }
    match Char2::from_table(Arc::new(sub), values) {
        Ok(h) => Ok(Some(SStateDescriptor::new(y, h))),
        Err(_) => Ok(None),
    }
}

/// One stabilizer state with its moduli class and stabilizer group.
#[derive(Clone, Debug)]
pub struct StateEntry {
    pub moduli: ModuliClass,
    pub descriptor: SStateDescriptor,
    pub stabilizer: StabilizerGroup,
}

impl StateEntry {
    pub fn wavefunction(&self) -> WaveFunction {
        sstate_synthesize(&self.descriptor)
    }
}

/// Every stabilizer state of `A`: for each subgroup `H`, each coset
/// representative `y` (smallest in its coset) and each `h ∈ Ch₂(H)`.
pub fn enumerate_states(group: &Group, bound: u64) -> Result<Vec<StateEntry>> {
    let subgroups = enumerate_subgroups_within(group, bound)?;
    let blocks = par::map(&subgroups, |h| {
        let chars = enumerate_ch2(h);
        let mut out = Vec::with_capacity(chars.len() * (group.size() / h.len()));
        for y in h.coset_representatives() {
            for c in &chars {
                let descriptor = SStateDescriptor::new(y, c.clone());
                out.push(StateEntry {
                    moduli: ModuliClass { y, h: c.clone() },
                    stabilizer: group_from_sstate(&descriptor),
                    descriptor,
                });
            }
        }
        out
    });
    Ok(blocks.into_iter().flatten().collect())
}

/// `#A · Σ_H #Sym(H)`.
pub fn count_states(group: &Group, bound: u64) -> Result<u64> {
    let subgroups = enumerate_subgroups_within(group, bound)?;
    Ok(group.order() * subgroups.iter().map(|h| sym_count(h)).sum::<u64>())
}

/// True when two nonzero states are proportional (`|⟨φ,ψ⟩| = ‖φ‖‖ψ‖`).
pub fn linearly_dependent(phi: &WaveFunction, psi: &WaveFunction, tol: f64) -> bool {
    let overlap = phi.inner(psi).norm();
    (overlap - phi.norm() * psi.norm()).abs() <= tol
}
