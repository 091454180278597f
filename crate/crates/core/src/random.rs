//! Seeded random states and density operators.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::group::Group;
use crate::stabilizer::is_sstate;
use crate::weyl::{DensityOperator, WaveFunction};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// A unit vector drawn from the unitarily invariant distribution.
pub fn random_state<R: Rng + ?Sized>(group: &Group, rng: &mut R) -> WaveFunction {
    let amps: Vec<Complex64> = (0..group.size()).map(|_| gaussian(rng)).collect();
    WaveFunction::new(group, amps)
        .and_then(|w| w.normalized())
        .expect("a Gaussian vector is nonzero")
}

/// A random unit vector that is not a stabilizer state.
pub fn random_non_stabilizer<R: Rng + ?Sized>(group: &Group, rng: &mut R) -> WaveFunction {
    loop {
        let psi = random_state(group, rng);
        if is_sstate(&psi, 1e-9).expect("nonzero").is_none() {
            return psi;
        }
    }
}

/// `G G† / Tr(G G†)` for a Gaussian `N × rank` matrix `G`.
pub fn random_density<R: Rng + ?Sized>(group: &Group, rank: usize, rng: &mut R) -> DensityOperator {
    let n = group.size();
    let g = DMatrix::from_fn(n, rank.max(1), |_, _| gaussian(rng));
    let mut m = &g * g.adjoint();
    let tr = m.trace();
    m /= tr;
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    DensityOperator::new(group, m).expect("Gram matrices are valid densities")
}

/// A full-rank random density operator.
pub fn random_full_density<R: Rng + ?Sized>(group: &Group, rng: &mut R) -> DensityOperator {
    random_density(group, group.size(), rng)
}
