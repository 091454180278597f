//! Wave functions, density operators, phase-space shifts and the coherent
//! state transform.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{Group, Subgroup};
use crate::par;
use crate::phase::PhaseExp;
use crate::phase_space::PhasePoint;
use crate::quadratic::Char2;

/// Tolerance used to validate density operators.
pub const DENSITY_TOLERANCE: f64 = 1e-9;

/// Exact description of a wave function supported on a coset:
/// `ψ(y + u) = scale · ζ^{phases[u]}` for `u ∈ H`, zero elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactForm {
    pub subgroup: Arc<Subgroup>,
    pub representative: usize,
    pub phases: Vec<PhaseExp>,
    pub scale: f64,
}

impl ExactForm {
    fn expand(&self) -> Vec<Complex64> {
        let group = self.subgroup.group();
        let mut amps = vec![Complex64::new(0.0, 0.0); group.size()];
        for (&u, &p) in self.subgroup.elements().iter().zip(&self.phases) {
            amps[group.add(self.representative, u)] = p.to_complex() * self.scale;
        }
        amps
    }
}

/// A vector in `L²(A)`, optionally carrying an exact coset form.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction {
    group: Group,
    amplitudes: Vec<Complex64>,
    exact: Option<ExactForm>,
}

impl WaveFunction {
    pub fn new(group: &Group, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != group.size() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} amplitudes, got {}",
                group.size(),
                amplitudes.len()
            )));
        }
        Ok(WaveFunction {
            group: group.clone(),
            amplitudes,
            exact: None,
        })
    }

    pub fn from_exact(exact: ExactForm) -> Result<Self> {
        if exact.phases.len() != exact.subgroup.len() {
            return Err(Error::ShapeMismatch("one phase per subgroup element is required".into()));
        }
        let group = exact.subgroup.group().clone();
        if exact.representative >= group.size() {
            return Err(Error::ShapeMismatch("coset representative out of range".into()));
        }
        Ok(WaveFunction {
            amplitudes: exact.expand(),
            group,
            exact: Some(exact),
        })
    }

    /// The point mass `δ_y`.
    pub fn delta(group: &Group, y: usize) -> Self {
        let trivial = Arc::new(Subgroup::trivial(group));
        WaveFunction::from_exact(ExactForm {
            subgroup: trivial,
            representative: y,
            phases: vec![PhaseExp::one(group.phase_modulus())],
            scale: 1.0,
        })
        .expect("valid exact form")
    }

    /// The normalized constant function.
    pub fn uniform(group: &Group) -> Self {
        let whole = Arc::new(Subgroup::whole(group));
        WaveFunction::from_exact(ExactForm {
            phases: vec![PhaseExp::one(group.phase_modulus()); group.size()],
            subgroup: whole,
            representative: 0,
            scale: 1.0 / (group.size() as f64).sqrt(),
        })
        .expect("valid exact form")
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn exact(&self) -> Option<&ExactForm> {
        self.exact.as_ref()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self, other⟩`, antilinear in the first slot.
    pub fn inner(&self, other: &WaveFunction) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn normalized(&self) -> Result<WaveFunction> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroState);
        }
        let mut out = self.scaled(Complex64::new(1.0 / n, 0.0));
        if let Some(e) = &self.exact {
            out.exact = Some(ExactForm {
                scale: e.scale / n,
                ..e.clone()
            });
            out.amplitudes = out.exact.as_ref().expect("set above").expand();
        }
        Ok(out)
    }

    /// Multiplies by a complex scalar; the exact form is dropped.
    pub fn scaled(&self, c: Complex64) -> WaveFunction {
        WaveFunction {
            group: self.group.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * c).collect(),
            exact: None,
        }
    }

    pub(crate) fn check_normalized(&self, tol: f64) -> Result<()> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroState);
        }
        if (n - 1.0).abs() > tol {
            return Err(Error::NotNormalized(n));
        }
        Ok(())
    }

    fn check_group(&self, other: &Group) -> Result<()> {
        if &self.group != other {
            return Err(Error::ShapeMismatch(format!("states live on {} and {}", self.group, other)));
        }
        Ok(())
    }
}

/// `exp(πi k / N)` for `k ∈ [0, 2N)`.
pub(crate) fn roots_of_unity(group: &Group) -> Vec<Complex64> {
    let m = group.phase_modulus();
    (0..m).map(|k| PhaseExp::new(k as i128, m).to_complex()).collect()
}

/// Table of `ξ(y)` as complex numbers, indexed by `ξ·N + y`.
pub(crate) fn character_table(group: &Group) -> Vec<Complex64> {
    let roots = roots_of_unity(group);
    let n = group.size();
    let mut table = Vec::with_capacity(n * n);
    for xi in 0..n {
        for y in 0..n {
            table.push(roots[group.pairing_idx(y, xi).exponent() as usize]);
        }
    }
    table
}

/// `π(x,ξ)ψ` on indices.
pub fn shift_apply_idx(x: usize, xi: usize, psi: &WaveFunction) -> WaveFunction {
    let group = &psi.group;
    if let Some(e) = &psi.exact {
        let rep = group.add(e.representative, x);
        let phases = e
            .subgroup
            .elements()
            .iter()
            .zip(&e.phases)
            .map(|(&u, &p)| p * group.pairing_idx(group.add(rep, u), xi))
            .collect();
        return WaveFunction::from_exact(ExactForm {
            subgroup: e.subgroup.clone(),
            representative: rep,
            phases,
            scale: e.scale,
        })
        .expect("shift preserves the exact shape");
    }
    let roots = roots_of_unity(group);
    let amplitudes = (0..group.size())
        .map(|y| roots[group.pairing_idx(y, xi).exponent() as usize] * psi.amplitudes[group.sub(y, x)])
        .collect();
    WaveFunction {
        group: group.clone(),
        amplitudes,
        exact: None,
    }
}

/// `(π(x,ξ)ψ)(y) = ξ(y)ψ(y−x)`.
pub fn shift_apply(z: &PhasePoint, psi: &WaveFunction) -> Result<WaveFunction> {
    let group = &psi.group;
    let x = group.index_of(&z.x)?;
    let xi = group.dual_index_of(&z.xi)?;
    Ok(shift_apply_idx(x, xi, psi))
}

/// `π(z)π(w) = conj(η(x)) π(z+w)` for `z = (x,ξ)`, `w = (y,η)`.
pub fn shift_compose_phase(group: &Group, z: &PhasePoint, w: &PhasePoint) -> Result<(PhaseExp, PhasePoint)> {
    let p = group.point_index_of(z)?;
    let q = group.point_index_of(w)?;
    let (phase, r) = shift_compose_idx(group, p, q);
    Ok((phase, group.point(r)))
}

pub fn shift_compose_idx(group: &Group, p: usize, q: usize) -> (PhaseExp, usize) {
    let (x, _) = group.point_parts(p);
    let (_, eta) = group.point_parts(q);
    (group.pairing_idx(x, eta).conj(), group.point_add(p, q))
}

/// A complex table over `A × Â`, indexed by phase-point index.
#[derive(Clone, Debug, PartialEq)]
pub struct CstField {
    group: Group,
    values: Vec<Complex64>,
}

impl CstField {
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, x: usize, xi: usize) -> Complex64 {
        self.values[self.group.point_index(x, xi)]
    }

    /// Points where `|value| > threshold`.
    pub fn support(&self, threshold: f64) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&p| self.values[p].norm() > threshold)
            .collect()
    }

    pub fn conj(&self) -> CstField {
        CstField {
            group: self.group.clone(),
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }
}

/// `V_φψ(x,ξ) = ⟨π(x,ξ)φ, ψ⟩ = Σ_y conj(ξ(y) φ(y−x)) ψ(y)`.
pub fn cst(phi: &WaveFunction, psi: &WaveFunction) -> Result<CstField> {
    phi.check_group(&psi.group)?;
    let group = &phi.group;
    let n = group.size();
    let chars = character_table(group);
    let rows = par::map_range(n, |x| {
        let f: Vec<Complex64> = (0..n)
            .map(|y| phi.amplitudes[group.sub(y, x)].conj() * psi.amplitudes[y])
            .collect();
        (0..n)
            .map(|xi| {
                let row = &chars[xi * n..(xi + 1) * n];
                row.iter().zip(&f).map(|(c, v)| c.conj() * v).sum::<Complex64>()
            })
            .collect::<Vec<_>>()
    });
    Ok(CstField {
        group: group.clone(),
        values: rows.into_iter().flatten().collect(),
    })
}

/// A density operator on `L²(A)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    group: Group,
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity within
    /// [`DENSITY_TOLERANCE`].
    pub fn new(group: &Group, matrix: DMatrix<Complex64>) -> Result<Self> {
        let n = group.size();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::InvalidDensity(format!(
                "expected a {n}×{n} matrix, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let tol = DENSITY_TOLERANCE;
        let herm = (&matrix - matrix.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if herm > tol {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {herm:e})")));
        }
        let trace = matrix.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::InvalidDensity(format!("trace {trace} ≠ 1")));
        }
        let rho = DensityOperator {
            group: group.clone(),
            matrix,
        };
        let min = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -tol {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ| / ‖ψ‖²`.
    pub fn pure(psi: &WaveFunction) -> Result<Self> {
        let psi = psi.normalized()?;
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        Ok(DensityOperator {
            group: psi.group.clone(),
            matrix: &v * v.adjoint(),
        })
    }

    /// The chaotic state `I/N`.
    pub fn maximally_mixed(group: &Group) -> Self {
        let n = group.size();
        DensityOperator {
            group: group.clone(),
            matrix: DMatrix::identity(n, n).map(|v: Complex64| v / n as f64),
        }
    }

    /// `Σ p_j |ψ_j⟩⟨ψ_j|` with normalized `ψ_j`.
    pub fn mixture(group: &Group, terms: &[(f64, WaveFunction)]) -> Result<Self> {
        let n = group.size();
        let mut m = DMatrix::zeros(n, n);
        for (p, psi) in terms {
            let pure = DensityOperator::pure(psi)?;
            m += pure.matrix * Complex64::new(*p, 0.0);
        }
        DensityOperator::new(group, m)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.matrix.clone().symmetric_eigenvalues().iter().copied().collect()
    }

    /// Eigenpairs sorted by decreasing eigenvalue.
    pub fn eigen(&self) -> Vec<(f64, WaveFunction)> {
        let eig = self.matrix.clone().symmetric_eigen();
        let mut pairs: Vec<(f64, WaveFunction)> = (0..self.group.size())
            .map(|i| {
                let col = eig.eigenvectors.column(i).iter().copied().collect();
                (
                    eig.eigenvalues[i],
                    WaveFunction {
                        group: self.group.clone(),
                        amplitudes: col,
                        exact: None,
                    },
                )
            })
            .collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        pairs
    }

    /// `ρψ` as a plain amplitude vector.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let v = nalgebra::DVector::from_column_slice(psi);
        (&self.matrix * v).iter().copied().collect()
    }
}

/// `ρ̃(x,ξ) = Tr(ρ π(x,ξ)) = Σ_y ρ[y][y+x] ξ(y+x)`.
pub fn characteristic_fn(rho: &DensityOperator) -> CstField {
    let group = &rho.group;
    let n = group.size();
    let chars = character_table(group);
    let rows = par::map_range(n, |x| {
        (0..n)
            .map(|xi| {
                (0..n)
                    .map(|y| {
                        let yx = group.add(y, x);
                        rho.matrix[(y, yx)] * chars[xi * n + yx]
                    })
                    .sum::<Complex64>()
            })
            .collect::<Vec<_>>()
    });
    CstField {
        group: group.clone(),
        values: rows.into_iter().flatten().collect(),
    }
}

/// Conjugation by the multiplication operator `C_h`:
/// `C_h π(x,ξ) C_h† = conj(h(−x)) π(x, ξ + β(x))`.
pub fn clifford_conjugate(h: &Char2, z: &PhasePoint) -> Result<(PhaseExp, PhasePoint)> {
    if !h.is_total() {
        return Err(Error::NotTotal);
    }
    let group = h.domain().group();
    let p = group.point_index_of(z)?;
    let (phase, q) = clifford_conjugate_idx(h, p);
    Ok((phase, group.point(q)))
}

pub(crate) fn clifford_conjugate_idx(h: &Char2, p: usize) -> (PhaseExp, usize) {
    let group = h.domain().group();
    let (x, xi) = group.point_parts(p);
    let basis = h.domain().decomposition().basis();
    let bx = (0..group.size())
        .find(|&eta| basis.iter().all(|&g| group.pairing_idx(g, eta) == h.beta().eval(x, g)))
        .expect("β(x) is a character of A");
    let phase = h.value_at(group.neg(x)).expect("total").conj();
    (phase, group.point_index(x, group.add(xi, bx)))
}

/// The multiplication operator `C_h` applied to a state.
pub fn clifford_apply(h: &Char2, psi: &WaveFunction) -> Result<WaveFunction> {
    if !h.is_total() {
        return Err(Error::NotTotal);
    }
    psi.check_group(h.domain().group())?;
    let amps = psi
        .amplitudes
        .iter()
        .enumerate()
        .map(|(y, a)| a * h.value_at(y).expect("total").to_complex())
        .collect();
    WaveFunction::new(&psi.group, amps)
}

/// Looks for `(θ, z)` with `ψ ∝ e^{iθ} π(z)φ`, scanning phase points in
/// canonical order and accepting the first with
/// `|V_φψ(z)| ≥ ‖φ‖‖ψ‖(1 − tol)`.
pub fn match_shift(phi: &WaveFunction, psi: &WaveFunction, tol: f64) -> Result<Option<(f64, PhasePoint)>> {
    Ok(match_shift_idx(phi, psi, tol)?.map(|(t, p)| (t, phi.group.point(p))))
}

pub fn match_shift_idx(phi: &WaveFunction, psi: &WaveFunction, tol: f64) -> Result<Option<(f64, usize)>> {
    let (a, b) = (phi.norm(), psi.norm());
    if a == 0.0 || b == 0.0 {
        return Err(Error::ZeroState);
    }
    let v = cst(phi, psi)?;
    let target = a * b * (1.0 - tol);
    Ok(v.values.iter().position(|c| c.norm() >= target).map(|p| (v.values[p].arg(), p)))
}
