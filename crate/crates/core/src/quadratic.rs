//! Symmetric homomorphisms and characters of second degree on subgroups.
//!
//! Everything is computed in the cyclic coordinates of the subgroup and then
//! stored as tables over the subgroup's element list, so downstream code never
//! depends on the chosen decomposition.

use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{gcd, Group, GroupElement, Subgroup};
use crate::par;
use crate::phase::PhaseExp;

/// A symmetric homomorphism `β : H → Ĥ`, stored as the integer matrix `c`
/// with `β(x)_j = Σ_k c[j][k] x_k mod e_j` in the cyclic coordinates of `H`.
#[derive(Clone, Debug)]
pub struct SymHom {
    domain: Arc<Subgroup>,
    matrix: Vec<Vec<u64>>,
}

impl PartialEq for SymHom {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.matrix == other.matrix
    }
}

impl Eq for SymHom {}

impl SymHom {
    /// Validates well-definedness and symmetry of the matrix.
    pub fn new(domain: Arc<Subgroup>, matrix: Vec<Vec<u64>>) -> Result<Self> {
        let e = domain.decomposition().orders().to_vec();
        let m = e.len();
        if matrix.len() != m || matrix.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidSymHom(format!("matrix must be {m}×{m}")));
        }
        let mut reduced = matrix;
        for j in 0..m {
            for k in 0..m {
                reduced[j][k] %= e[j];
                let step = e[j] / gcd(e[j], e[k]);
                if reduced[j][k] % step != 0 {
                    return Err(Error::InvalidSymHom(format!(
                        "entry ({j},{k}) = {} is not a multiple of {step}",
                        reduced[j][k]
                    )));
                }
            }
        }
        for j in 0..m {
            for k in 0..j {
                // c_jk / e_j ≡ c_kj / e_k (mod 1)
                let lhs = reduced[j][k] * e[k];
                let rhs = reduced[k][j] * e[j];
                if lhs % (e[j] * e[k]) != rhs % (e[j] * e[k]) {
                    return Err(Error::InvalidSymHom(format!("entries ({j},{k}) and ({k},{j}) are not symmetric")));
                }
            }
        }
        Ok(SymHom {
            domain,
            matrix: reduced,
        })
    }

    pub fn zero(domain: Arc<Subgroup>) -> Self {
        let m = domain.decomposition().rank();
        SymHom {
            domain,
            matrix: vec![vec![0; m]; m],
        }
    }

    pub fn domain(&self) -> &Arc<Subgroup> {
        &self.domain
    }

    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(|&c| c == 0)
    }

    fn group(&self) -> &Group {
        self.domain.group()
    }

    /// `β(x)(y)` on coordinate tuples.
    pub fn eval_coords(&self, x: &[u64], y: &[u64]) -> PhaseExp {
        let e = self.domain.decomposition().orders();
        let two_n = self.group().phase_modulus();
        let mut exp = 0u64;
        for j in 0..e.len() {
            let bx: u64 = (0..e.len()).map(|k| self.matrix[j][k] * x[k]).sum::<u64>() % e[j];
            exp = (exp + (y[j] * bx % e[j]) * (two_n / e[j])) % two_n;
        }
        PhaseExp::new(exp as i128, two_n)
    }

    /// `β(x)(y)` for ambient indices `x, y ∈ H`.
    pub fn eval(&self, x: usize, y: usize) -> PhaseExp {
        let d = self.domain.decomposition();
        let px = self.domain.position(x).expect("x must lie in the domain");
        let py = self.domain.position(y).expect("y must lie in the domain");
        self.eval_coords(d.coords_at(px), d.coords_at(py))
    }

    /// Pointwise sum `β + β'` (product of bicharacters).
    pub fn add(&self, other: &SymHom) -> Result<SymHom> {
        if self.domain != other.domain {
            return Err(Error::ShapeMismatch("symmetric homomorphisms on different subgroups".into()));
        }
        let e = self.domain.decomposition().orders();
        let matrix = (0..e.len())
            .map(|j| (0..e.len()).map(|k| (self.matrix[j][k] + other.matrix[j][k]) % e[j]).collect())
            .collect();
        Ok(SymHom {
            domain: self.domain.clone(),
            matrix,
        })
    }
}

/// `#Sym(H) = ∏_j e_j · ∏_{j<k} gcd(e_j, e_k)`.
pub fn sym_count(h: &Subgroup) -> u64 {
    let e = h.decomposition().orders();
    let mut count: u64 = e.iter().product();
    for j in 0..e.len() {
        for k in j + 1..e.len() {
            count *= gcd(e[j], e[k]);
        }
    }
    count
}

/// All symmetric homomorphisms on `H`, in mixed-radix order over the upper
/// triangle of the coefficient matrix.
pub fn enumerate_sym(h: &Arc<Subgroup>) -> Vec<SymHom> {
    let e = h.decomposition().orders().to_vec();
    let m = e.len();
    let mut slots = Vec::new();
    for j in 0..m {
        for k in j..m {
            let range = if j == k { e[j] } else { gcd(e[j], e[k]) };
            slots.push((j, k, range));
        }
    }
    let total: u64 = slots.iter().map(|s| s.2).product();
    let mut out = Vec::with_capacity(total as usize);
    for flat in 0..total {
        let mut rem = flat;
        let mut matrix = vec![vec![0u64; m]; m];
        for &(j, k, range) in slots.iter().rev() {
            let t = rem % range;
            rem /= range;
            if j == k {
                matrix[j][j] = t;
            } else {
                matrix[j][k] = t * (e[j] / range);
                matrix[k][j] = t * (e[k] / range);
            }
        }
        out.push(SymHom {
            domain: h.clone(),
            matrix,
        });
    }
    out
}

/// A character of second degree `h : H → U(1)` with its symmetric
/// homomorphism, stored as a table aligned with `H`'s element list.
#[derive(Clone, Debug)]
pub struct Char2 {
    values: Vec<PhaseExp>,
    beta: SymHom,
}

impl PartialEq for Char2 {
    fn eq(&self, other: &Self) -> bool {
        self.beta.domain == other.beta.domain && self.values == other.values
    }
}

impl Eq for Char2 {}

impl Char2 {
    /// Validates a table against the defining relation and recovers `β`.
    pub fn from_table(domain: Arc<Subgroup>, values: Vec<PhaseExp>) -> Result<Self> {
        let beta = recover_beta(&domain, &values)?;
        Ok(Char2 { values, beta })
    }

    /// The constant character `1` on `H`.
    pub fn one(domain: Arc<Subgroup>) -> Self {
        let modulus = domain.group().phase_modulus();
        Char2 {
            values: vec![PhaseExp::one(modulus); domain.len()],
            beta: SymHom::zero(domain),
        }
    }

    pub fn domain(&self) -> &Arc<Subgroup> {
        &self.beta.domain
    }

    pub fn beta(&self) -> &SymHom {
        &self.beta
    }

    /// Values aligned with `domain().elements()`.
    pub fn values(&self) -> &[PhaseExp] {
        &self.values
    }

    /// `h(x)` for an ambient index, or `None` outside `H`.
    pub fn value_at(&self, x: usize) -> Option<PhaseExp> {
        self.domain().position(x).map(|p| self.values[p])
    }

    /// True when `H` is the whole group.
    pub fn is_total(&self) -> bool {
        self.domain().len() == self.domain().group().size()
    }

    /// Pointwise product; the forms add.
    pub fn mul(&self, other: &Char2) -> Result<Char2> {
        let beta = self.beta.add(&other.beta)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| a * b).collect();
        Ok(Char2 { values, beta })
    }

    pub fn conj(&self) -> Char2 {
        let e = self.domain().decomposition().orders();
        let matrix = (0..e.len())
            .map(|j| (0..e.len()).map(|k| (e[j] - self.beta.matrix[j][k]) % e[j]).collect())
            .collect();
        Char2 {
            values: self.values.iter().map(|v| v.conj()).collect(),
            beta: SymHom {
                domain: self.domain().clone(),
                matrix,
            },
        }
    }

    /// Multiplies every value by the given table (used for re-basing and
    /// for multiplying by characters); the form is recomputed and checked.
    pub(crate) fn times_table(&self, factor: &[PhaseExp]) -> Result<Char2> {
        let values = self.values.iter().zip(factor).map(|(&a, &b)| a * b).collect();
        Char2::from_table(self.domain().clone(), values)
    }
}

fn not_second_degree(msg: impl Into<String>) -> Error {
    Error::NotSecondDegree(msg.into())
}

fn recover_beta(domain: &Arc<Subgroup>, values: &[PhaseExp]) -> Result<SymHom> {
    let group = domain.group();
    let two_n = group.phase_modulus();
    if values.len() != domain.len() {
        return Err(Error::ShapeMismatch(format!(
            "table has {} values for a subgroup of order {}",
            values.len(),
            domain.len()
        )));
    }
    if values.iter().any(|v| v.modulus() != two_n) {
        return Err(not_second_degree("phase modulus differs from 2N"));
    }
    if !values[0].is_one() {
        return Err(not_second_degree("h(0) ≠ 1"));
    }
    let d = domain.decomposition();
    let e = d.orders();
    let basis = d.basis();
    let at = |x: usize| values[domain.position(x).expect("closed")];
    let mut matrix = vec![vec![0u64; e.len()]; e.len()];
    for j in 0..e.len() {
        for k in 0..e.len() {
            let b = at(group.add(basis[j], basis[k])) * at(basis[j]).conj() * at(basis[k]).conj();
            // β(g_k)(g_j) = ζ^{c_jk · 2N / e_j}
            let scaled = b.exponent() * e[j];
            if scaled % two_n != 0 {
                return Err(not_second_degree("β(g_k)(g_j) is not an e_j-th root of unity"));
            }
            matrix[j][k] = scaled / two_n;
        }
    }
    let beta = SymHom::new(domain.clone(), matrix).map_err(|err| not_second_degree(err.to_string()))?;
    for (i, &a) in domain.elements().iter().enumerate() {
        for (j, &b) in domain.elements().iter().enumerate() {
            let lhs = at(group.add(a, b));
            let rhs = values[i] * values[j] * beta.eval_coords(d.coords_at(i), d.coords_at(j));
            if lhs != rhs {
                return Err(not_second_degree(format!(
                    "h(x+y) ≠ h(x)h(y)β(x)(y) at x={}, y={}",
                    group.element(a),
                    group.element(b)
                )));
            }
        }
    }
    Ok(beta)
}

/// Recovers `β(x)(y) = h(x+y) h(x)⁻¹ h(y)⁻¹` from the table of `h` and checks
/// it against the stored form.
pub fn beta_of(h: &Char2) -> Result<SymHom> {
    let beta = recover_beta(h.domain(), &h.values)?;
    if beta != h.beta {
        return Err(not_second_degree("stored form disagrees with the table"));
    }
    Ok(beta)
}

/// The cyclic construction `h(x) = exp(πi p x² (d+1)/d)` on `Z_d`, for
/// `0 ≤ p < d`.
pub fn char2_cyclic(d: u64, p: u64) -> Result<Char2> {
    if p >= d {
        return Err(Error::OutOfRange(format!("p = {p} must lie in [0, {d})")));
    }
    let group = Group::new(&[d as i64])?;
    let domain = Arc::new(Subgroup::whole(&group));
    let two_d = 2 * d;
    let values: Vec<PhaseExp> = (0..d)
        .map(|x| PhaseExp::new((p * ((x * x) % two_d) % two_d * (d + 1)) as i128, two_d))
        .collect();
    let rank = domain.decomposition().rank();
    let beta = SymHom::new(domain, vec![vec![p]; rank])?;
    Ok(Char2 { values, beta })
}

/// The product construction: `h(x) = ∏_j h_j(x_j) · ∏_{j<k} β(x_j g_j)(x_k g_k)`
/// with `h_j` the cyclic character for the diagonal entry `c_jj`.
pub fn char2_product(beta: &SymHom) -> Char2 {
    let domain = beta.domain.clone();
    let group = domain.group();
    let n = group.order();
    let two_n = group.phase_modulus();
    let d = domain.decomposition();
    let e = d.orders();
    let values = (0..domain.len())
        .map(|pos| {
            let x = d.coords_at(pos);
            let mut exp: u64 = 0;
            for j in 0..e.len() {
                // exp(πi p x² (e+1)/e) = ζ^{p x² (e+1) N/e}
                let sq = (x[j] * x[j]) % (2 * e[j]);
                let local = (beta.matrix[j][j] * sq % (2 * e[j])) * ((e[j] + 1) % (2 * e[j])) % (2 * e[j]);
                exp = (exp + local * (n / e[j])) % two_n;
                for k in j + 1..e.len() {
                    // β(x_j g_j)(x_k g_k) = ζ^{x_k c_kj x_j · 2N/e_k}
                    let c = beta.matrix[k][j] * x[j] % e[k];
                    exp = (exp + (x[k] * c % e[k]) * (two_n / e[k])) % two_n;
                }
            }
            PhaseExp::new(exp as i128, two_n)
        })
        .collect();
    Char2 {
        values,
        beta: beta.clone(),
    }
}

/// The character `χ_η(x) = exp(2πi Σ_j η_j x_j / e_j)` of `H` in cyclic
/// coordinates, as a table.
fn coordinate_character(domain: &Subgroup, eta: &[u64]) -> Vec<PhaseExp> {
    let two_n = domain.group().phase_modulus();
    let d = domain.decomposition();
    let e = d.orders();
    (0..domain.len())
        .map(|pos| {
            let x = d.coords_at(pos);
            let exp = (0..e.len())
                .map(|j| (eta[j] * x[j] % e[j]) * (two_n / e[j]))
                .sum::<u64>();
            PhaseExp::new(exp as i128, two_n)
        })
        .collect()
}

/// All characters of `H`, as tables aligned with the element list.
pub fn characters(domain: &Subgroup) -> Vec<Vec<PhaseExp>> {
    let e = domain.decomposition().orders().to_vec();
    (0..domain.len() as u64)
        .map(|flat| {
            let mut rem = flat;
            let mut eta = vec![0u64; e.len()];
            for j in (0..e.len()).rev() {
                eta[j] = rem % e[j];
                rem /= e[j];
            }
            coordinate_character(domain, &eta)
        })
        .collect()
}

/// All of `Ch₂(H)` as `{χ · h_β}` over characters `χ` and forms `β`.
pub fn enumerate_ch2(h: &Arc<Subgroup>) -> Vec<Char2> {
    let forms = enumerate_sym(h);
    let chars = characters(h);
    let blocks = par::map(&forms, |beta| {
        let base = char2_product(beta);
        chars
            .iter()
            .map(|chi| Char2 {
                values: base.values.iter().zip(chi).map(|(&a, &b)| a * b).collect(),
                beta: beta.clone(),
            })
            .collect::<Vec<_>>()
    });
    let mut seen = HashSet::new();
    blocks
        .into_iter()
        .flatten()
        .filter(|c| seen.insert(c.values.clone()))
        .collect()
}

/// A subcharacter of second degree: a character of second degree on `H`,
/// extended by zero outside `H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubChar2 {
    restriction: Char2,
}

impl SubChar2 {
    pub fn new(restriction: Char2) -> Self {
        SubChar2 { restriction }
    }

    pub fn support(&self) -> &Arc<Subgroup> {
        self.restriction.domain()
    }

    pub fn restriction(&self) -> &Char2 {
        &self.restriction
    }
}

/// `h₀(x)`, with `None` standing for the exact zero outside the support.
pub fn subchar_eval(h0: &SubChar2, x: &GroupElement) -> Result<Option<PhaseExp>> {
    let idx = h0.support().group().index_of(x)?;
    Ok(h0.restriction.value_at(idx))
}
