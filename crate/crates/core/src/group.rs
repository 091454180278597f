//! Finite Abelian groups given as products of cyclic factors, their duals,
//! subgroup lattices, annihilators and character extension.
//!
//! Elements are addressed by their index in the canonical (lexicographic,
//! first factor most significant) order. The dual group is identified with
//! the group itself through the factor-wise pairing
//! `(x, ξ) ↦ exp(2πi Σ_j x_j ξ_j / d_j)`, so a [`DualElement`] is a residue
//! tuple of the same shape as a [`GroupElement`].

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::phase::PhaseExp;

/// Largest group order accepted by the exhaustive enumerations unless a
/// different bound is passed explicitly.
pub const DEFAULT_ENUMERATION_BOUND: u64 = 64;

/// A finite Abelian group `Z_{d_1} × … × Z_{d_n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Group {
    orders: Vec<u64>,
    strides: Vec<u64>,
    order: u64,
}

/// An element of a [`Group`], as a tuple of reduced residues.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    residues: Vec<u64>,
}

/// An element of the dual group, identified with a residue tuple through the
/// canonical pairing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DualElement {
    residues: Vec<u64>,
}

impl GroupElement {
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }
}

impl DualElement {
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }
}

fn fmt_tuple(residues: &[u64], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "(")?;
    for (i, r) in residues.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{r}")?;
    }
    write!(f, ")")
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_tuple(&self.residues, f)
    }
}

impl fmt::Display for DualElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_tuple(&self.residues, f)
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl Group {
    /// Builds `Z_{d_1} × … × Z_{d_n}` from the list of factor orders.
    pub fn new(orders: &[i64]) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::EmptyGroupSpec);
        }
        if let Some(&bad) = orders.iter().find(|&&d| d < 1) {
            return Err(Error::InvalidOrder(bad));
        }
        let orders: Vec<u64> = orders.iter().map(|&d| d as u64).collect();
        let mut strides = vec![1u64; orders.len()];
        for j in (0..orders.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1]
                .checked_mul(orders[j + 1])
                .ok_or_else(|| Error::OutOfRange("group order overflows".into()))?;
        }
        let order = strides[0]
            .checked_mul(orders[0])
            .ok_or_else(|| Error::OutOfRange("group order overflows".into()))?;
        Ok(Group {
            orders,
            strides,
            order,
        })
    }

    /// Cardinality `N` of the group.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// `N` as a `usize`, for indexing.
    pub fn size(&self) -> usize {
        self.order as usize
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    /// Modulus `2N` of the phase exponents used program-wide.
    pub fn phase_modulus(&self) -> u64 {
        2 * self.order
    }

    #[inline]
    pub fn residue(&self, idx: usize, j: usize) -> u64 {
        (idx as u64 / self.strides[j]) % self.orders[j]
    }

    pub fn residues(&self, idx: usize) -> Vec<u64> {
        (0..self.rank()).map(|j| self.residue(idx, j)).collect()
    }

    /// Index of a residue tuple; residues are reduced first.
    pub fn index(&self, residues: &[u64]) -> usize {
        residues
            .iter()
            .zip(&self.orders)
            .zip(&self.strides)
            .map(|((r, d), s)| (r % d) * s)
            .sum::<u64>() as usize
    }

    pub fn element(&self, idx: usize) -> GroupElement {
        GroupElement {
            residues: self.residues(idx),
        }
    }

    pub fn dual_element(&self, idx: usize) -> DualElement {
        DualElement {
            residues: self.residues(idx),
        }
    }

    fn check_shape(&self, residues: &[u64]) -> Result<()> {
        if residues.len() != self.rank() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} residues, got {}",
                self.rank(),
                residues.len()
            )));
        }
        Ok(())
    }

    /// Builds an element from residues, reducing each modulo its factor.
    pub fn make_element(&self, residues: &[i64]) -> Result<GroupElement> {
        self.check_shape(&vec![0; residues.len()])?;
        Ok(GroupElement {
            residues: residues
                .iter()
                .zip(&self.orders)
                .map(|(&r, &d)| r.rem_euclid(d as i64) as u64)
                .collect(),
        })
    }

    pub fn make_dual(&self, residues: &[i64]) -> Result<DualElement> {
        let e = self.make_element(residues)?;
        Ok(DualElement {
            residues: e.residues,
        })
    }

    pub fn index_of(&self, x: &GroupElement) -> Result<usize> {
        self.check_shape(&x.residues)?;
        Ok(self.index(&x.residues))
    }

    pub fn dual_index_of(&self, xi: &DualElement) -> Result<usize> {
        self.check_shape(&xi.residues)?;
        Ok(self.index(&xi.residues))
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        let mut out = 0u64;
        for j in 0..self.rank() {
            let d = self.orders[j];
            let s = self.strides[j];
            let ra = (a as u64 / s) % d;
            let rb = (b as u64 / s) % d;
            out += ((ra + rb) % d) * s;
        }
        out as usize
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        let mut out = 0u64;
        for j in 0..self.rank() {
            let d = self.orders[j];
            let s = self.strides[j];
            let ra = (a as u64 / s) % d;
            out += ((d - ra) % d) * s;
        }
        out as usize
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    pub fn scale(&self, k: u64, a: usize) -> usize {
        let mut out = 0u64;
        for j in 0..self.rank() {
            let d = self.orders[j];
            let s = self.strides[j];
            let ra = (a as u64 / s) % d;
            out += ((ra * (k % d)) % d) * s;
        }
        out as usize
    }

    pub fn element_order(&self, a: usize) -> u64 {
        (0..self.rank()).fold(1, |acc, j| {
            let d = self.orders[j];
            let r = self.residue(a, j);
            lcm(acc, d / gcd(r, d))
        })
    }

    /// Canonical pairing `ξ(x)` on indices, as a phase of modulus `2N`.
    #[inline]
    pub fn pairing_idx(&self, x: usize, xi: usize) -> PhaseExp {
        let two_n = self.phase_modulus();
        let mut exp = 0u64;
        for j in 0..self.rank() {
            let d = self.orders[j];
            let rx = self.residue(x, j);
            let rxi = self.residue(xi, j);
            exp = (exp + 2 * (self.order / d) * ((rx * rxi) % d)) % two_n;
        }
        PhaseExp::new(exp as i128, two_n)
    }

    /// Canonical pairing `ξ(x) = exp(2πi Σ_j x_j ξ_j / d_j)`.
    pub fn pairing(&self, x: &GroupElement, xi: &DualElement) -> Result<PhaseExp> {
        let a = self.index_of(x)?;
        let b = self.dual_index_of(xi)?;
        Ok(self.pairing_idx(a, b))
    }

    /// Parses an element written as `(r1,r2,...)`.
    pub fn parse_element(&self, s: &str) -> Result<GroupElement> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = t
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("element `{s}` must be written as (r1,...,rn)")))?;
        let residues = inner
            .split(',')
            .map(|r| {
                r.parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad residue `{r}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.make_element(&residues)
    }

    pub fn parse_index(&self, s: &str) -> Result<usize> {
        let e = self.parse_element(s)?;
        self.index_of(&e)
    }

    /// Formats the element with the given index as `(r1,...,rn)`.
    pub fn format_index(&self, idx: usize) -> String {
        self.element(idx).to_string()
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.orders.iter().map(|d| format!("Z{d}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FromStr for Group {
    type Err = Error;

    /// Parses specs such as `Z4xZ2x Z3` (case-insensitive, whitespace ignored).
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect::<String>()
            .to_ascii_lowercase();
        if compact.is_empty() {
            return Err(Error::EmptyGroupSpec);
        }
        let orders = compact
            .split('x')
            .map(|part| {
                let digits = part
                    .strip_prefix('z')
                    .ok_or_else(|| Error::Parse(format!("factor `{part}` in `{s}` must look like Z<n>")))?;
                digits
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("factor `{part}` in `{s}` has no valid order")))
            })
            .collect::<Result<Vec<_>>>()?;
        Group::new(&orders)
    }
}

impl Serialize for Group {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Group {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Decomposition of a subgroup into independent cyclic factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicDecomposition {
    orders: Vec<u64>,
    basis: Vec<usize>,
    /// Coordinates of each subgroup element, aligned with the element list.
    coords: Vec<Vec<u64>>,
}

impl CyclicDecomposition {
    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    /// Basis elements as ambient indices.
    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn coords_at(&self, position: usize) -> &[u64] {
        &self.coords[position]
    }

    /// Ambient index of `Σ c_i g_i`.
    pub fn combine(&self, group: &Group, coords: &[u64]) -> usize {
        coords
            .iter()
            .zip(&self.basis)
            .fold(0, |acc, (&c, &g)| group.add(acc, group.scale(c, g)))
    }
}

/// A subgroup `H ⊂ A`, stored as its sorted element list together with a
/// cyclic decomposition whose basis doubles as the generator list.
#[derive(Clone, Debug)]
pub struct Subgroup {
    group: Group,
    elements: Vec<usize>,
    position: Vec<u32>,
    decomposition: CyclicDecomposition,
}

const NOT_MEMBER: u32 = u32::MAX;

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.elements == other.elements
    }
}

impl Eq for Subgroup {}

impl std::hash::Hash for Subgroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.elements.hash(state);
    }
}

fn closure(group: &Group, generators: &[usize]) -> Vec<usize> {
    let n = group.size();
    let mut member = vec![false; n];
    member[0] = true;
    let mut elems = vec![0usize];
    for &g in generators {
        if member[g] {
            continue;
        }
        let base = elems.clone();
        let mut step = g;
        while step != 0 {
            for &e in &base {
                let s = group.add(e, step);
                if !member[s] {
                    member[s] = true;
                    elems.push(s);
                }
            }
            step = group.add(step, g);
        }
    }
    elems.sort_unstable();
    elems
}

/// Repeatedly splits off a cyclic factor generated by an element of maximal
/// order, choosing the complement greedily in canonical order.
fn decompose(group: &Group, elements: &[usize]) -> CyclicDecomposition {
    let mut orders = Vec::new();
    let mut basis = Vec::new();
    let mut current: Vec<usize> = elements.to_vec();
    while current.len() > 1 {
        let g = *current
            .iter()
            .max_by(|&&a, &&b| {
                group
                    .element_order(a)
                    .cmp(&group.element_order(b))
                    .then(b.cmp(&a))
            })
            .expect("nonempty");
        let ord = group.element_order(g);
        let cyclic = closure(group, &[g]);
        let mut in_cyclic = vec![false; group.size()];
        for &c in &cyclic {
            in_cyclic[c] = true;
        }
        let mut complement = vec![0usize];
        let mut in_complement = vec![false; group.size()];
        in_complement[0] = true;
        for &h in &current {
            if in_complement[h] {
                continue;
            }
            let mut gens: Vec<usize> = complement.clone();
            gens.push(h);
            let candidate = closure(group, &gens);
            if candidate.iter().all(|&c| c == 0 || !in_cyclic[c]) {
                for &c in &candidate {
                    in_complement[c] = true;
                }
                complement = candidate;
            }
        }
        assert_eq!(
            complement.len() as u64 * ord,
            current.len() as u64,
            "greedy complement must split off the maximal-order factor"
        );
        orders.push(ord);
        basis.push(g);
        current = complement;
    }

    let mut position = HashMap::with_capacity(elements.len());
    for (i, &e) in elements.iter().enumerate() {
        position.insert(e, i);
    }
    let mut coords = vec![Vec::new(); elements.len()];
    let total: u64 = orders.iter().product();
    let mut filled = 0usize;
    for flat in 0..total {
        let mut rem = flat;
        let mut c = vec![0u64; orders.len()];
        for j in (0..orders.len()).rev() {
            c[j] = rem % orders[j];
            rem /= orders[j];
        }
        let e = c
            .iter()
            .zip(&basis)
            .fold(0, |acc, (&k, &g)| group.add(acc, group.scale(k, g)));
        let p = position[&e];
        debug_assert!(coords[p].is_empty() || orders.is_empty());
        coords[p] = c;
        filled += 1;
    }
    debug_assert_eq!(filled, elements.len());
    CyclicDecomposition {
        orders,
        basis,
        coords,
    }
}

impl Subgroup {
    fn from_sorted(group: &Group, elements: Vec<usize>) -> Self {
        let mut position = vec![NOT_MEMBER; group.size()];
        for (i, &e) in elements.iter().enumerate() {
            position[e] = i as u32;
        }
        let decomposition = decompose(group, &elements);
        Subgroup {
            group: group.clone(),
            elements,
            position,
            decomposition,
        }
    }

    /// The subgroup generated by the given element indices.
    pub fn generated_by(group: &Group, generators: &[usize]) -> Self {
        Self::from_sorted(group, closure(group, generators))
    }

    /// Validates that the given indices form a subgroup.
    pub fn from_elements(group: &Group, mut elements: Vec<usize>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        if elements.iter().any(|&e| e >= group.size()) {
            return Err(Error::NotSubgroup("element index out of range".into()));
        }
        let mut member = vec![false; group.size()];
        for &e in &elements {
            member[e] = true;
        }
        if !member[0] {
            return Err(Error::NotSubgroup("identity missing".into()));
        }
        for &a in &elements {
            if !member[group.neg(a)] {
                return Err(Error::NotSubgroup("not closed under negation".into()));
            }
            for &b in &elements {
                if !member[group.add(a, b)] {
                    return Err(Error::NotSubgroup("not closed under addition".into()));
                }
            }
        }
        Ok(Self::from_sorted(group, elements))
    }

    pub fn whole(group: &Group) -> Self {
        Self::from_sorted(group, (0..group.size()).collect())
    }

    pub fn trivial(group: &Group) -> Self {
        Self::from_sorted(group, vec![0])
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    /// Sorted ambient indices of the members.
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.position[idx] != NOT_MEMBER
    }

    /// Position of an ambient element in [`Self::elements`].
    pub fn position(&self, idx: usize) -> Option<usize> {
        match self.position[idx] {
            NOT_MEMBER => None,
            p => Some(p as usize),
        }
    }

    pub fn decomposition(&self) -> &CyclicDecomposition {
        &self.decomposition
    }

    pub fn generators(&self) -> Vec<GroupElement> {
        self.decomposition
            .basis
            .iter()
            .map(|&g| self.group.element(g))
            .collect()
    }

    pub fn element_list(&self) -> Vec<GroupElement> {
        self.elements.iter().map(|&e| self.group.element(e)).collect()
    }

    /// The smallest element of every coset `y + H`, in canonical order.
    pub fn coset_representatives(&self) -> Vec<usize> {
        let mut seen = vec![false; self.group.size()];
        let mut reps = Vec::new();
        for y in 0..self.group.size() {
            if seen[y] {
                continue;
            }
            reps.push(y);
            for &h in &self.elements {
                seen[self.group.add(y, h)] = true;
            }
        }
        reps
    }

    /// Smallest element of the coset `y + H`.
    pub fn coset_min(&self, y: usize) -> usize {
        self.elements
            .iter()
            .map(|&h| self.group.add(y, h))
            .min()
            .expect("subgroups are nonempty")
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, &e) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.group.element(e))?;
        }
        write!(f, "}}")
    }
}

/// Returns the cyclic decomposition of `H`: factor orders, basis elements,
/// and the coordinate map.
pub fn cyclic_decompose(h: &Subgroup) -> (Vec<u64>, Vec<GroupElement>, HashMap<GroupElement, Vec<u64>>) {
    let d = h.decomposition();
    let coords = h
        .elements()
        .iter()
        .enumerate()
        .map(|(p, &e)| (h.group().element(e), d.coords_at(p).to_vec()))
        .collect();
    (d.orders().to_vec(), h.generators(), coords)
}

/// All subgroups of `A`, using the default enumeration bound.
pub fn enumerate_subgroups(group: &Group) -> Result<Vec<Arc<Subgroup>>> {
    enumerate_subgroups_within(group, DEFAULT_ENUMERATION_BOUND)
}

/// All subgroups of `A`, sorted by cardinality and then by element list.
///
/// Starts from the cyclic subgroups and closes under joins with cyclic
/// subgroups until no new subgroup appears.
pub fn enumerate_subgroups_within(group: &Group, bound: u64) -> Result<Vec<Arc<Subgroup>>> {
    if group.order() > bound {
        return Err(Error::BoundExceeded {
            order: group.order(),
            bound,
        });
    }
    let mut cyclic: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut seen_cyclic = HashSet::new();
    for g in 0..group.size() {
        let c = closure(group, &[g]);
        if seen_cyclic.insert(c.clone()) {
            cyclic.push((g, c));
        }
    }
    let mut all: HashSet<Vec<usize>> = seen_cyclic.clone();
    let mut queue: VecDeque<Vec<usize>> = seen_cyclic.into_iter().collect();
    let mut member = vec![false; group.size()];
    while let Some(s) = queue.pop_front() {
        member.iter_mut().for_each(|m| *m = false);
        for &e in &s {
            member[e] = true;
        }
        for (g, c) in &cyclic {
            if member[*g] {
                continue;
            }
            let mut joined = vec![false; group.size()];
            for &a in &s {
                for &b in c {
                    joined[group.add(a, b)] = true;
                }
            }
            let j: Vec<usize> = (0..group.size()).filter(|&i| joined[i]).collect();
            if !all.contains(&j) {
                all.insert(j.clone());
                queue.push_back(j);
            }
        }
    }
    let mut lists: Vec<Vec<usize>> = all.into_iter().collect();
    lists.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(par::map(&lists, |l| Arc::new(Subgroup::from_sorted(group, l.clone()))))
}

/// The annihilator `H⊥ = {ξ : ξ(x) = 1 for all x ∈ H}`, as a subgroup of the
/// dual (identified with `A`).
pub fn annihilator(h: &Subgroup) -> Subgroup {
    let group = h.group();
    let basis = h.decomposition().basis();
    let elements: Vec<usize> = (0..group.size())
        .filter(|&xi| basis.iter().all(|&g| group.pairing_idx(g, xi).is_one()))
        .collect();
    Subgroup::from_sorted(group, elements)
}

/// Finds the first `ξ ∈ Â` (canonical order) whose restriction to `H` is the
/// character `χ`, given as a table aligned with `H`'s element list.
pub fn extend_character(h: &Subgroup, chi: &[PhaseExp]) -> Result<DualElement> {
    let idx = extend_character_idx(h, chi)?;
    Ok(h.group().dual_element(idx))
}

pub(crate) fn extend_character_idx(h: &Subgroup, chi: &[PhaseExp]) -> Result<usize> {
    let group = h.group();
    if chi.len() != h.len() {
        return Err(Error::ShapeMismatch(format!(
            "character table has {} entries for a subgroup of order {}",
            chi.len(),
            h.len()
        )));
    }
    let modulus = group.phase_modulus();
    if chi.iter().any(|p| p.modulus() != modulus) {
        return Err(Error::NotACharacter("phase modulus differs from 2N".into()));
    }
    for (i, &a) in h.elements().iter().enumerate() {
        for (j, &b) in h.elements().iter().enumerate() {
            let k = h.position(group.add(a, b)).expect("closed");
            if chi[k] != chi[i] * chi[j] {
                return Err(Error::NotACharacter(format!(
                    "χ({}+{}) ≠ χ({})χ({})",
                    group.element(a),
                    group.element(b),
                    group.element(a),
                    group.element(b)
                )));
            }
        }
    }
    let basis = h.decomposition().basis();
    (0..group.size())
        .find(|&xi| {
            basis
                .iter()
                .all(|&g| group.pairing_idx(g, xi) == chi[h.position(g).expect("member")])
        })
        .ok_or_else(|| Error::NotACharacter("no extension to the whole group".into()))
}
