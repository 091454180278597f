mod common;

use std::collections::HashSet;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stabforge::group::Subgroup;
use stabforge::oracle::{oracle_count, oracle_states, phase_key};
use stabforge::quadratic::{char2_cyclic, enumerate_ch2};
use stabforge::random::{random_non_stabilizer, random_state};
use stabforge::stabilizer::{
    count_states, cst_criterion_deviation, enumerate_states, fiber_product, group_from_sstate, is_sstate,
    linearly_dependent, sstate_from_group, sstate_synthesize, verify_stabilized, ModuliClass, SStateDescriptor,
    StabilizerGroup,
};
use stabforge::weyl::{cst, WaveFunction};
use stabforge::{Char2, Error, Group, PhaseExp};

use common::{dense_shift, groups_upto};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn z2() -> Group {
    "Z2".parse().unwrap()
}

fn close(a: &[Complex64], b: &[Complex64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-12)
}

fn group_table(g: &StabilizerGroup) -> Vec<(usize, u64)> {
    g.isotropic().points().iter().zip(g.alpha()).map(|(&p, a)| (p, a.exponent())).collect()
}

#[test]
fn synthesis_examples() {
    let g = z2();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let trivial = Arc::new(Subgroup::trivial(&g));
    let whole = Arc::new(Subgroup::whole(&g));
    let d0 = sstate_synthesize(&SStateDescriptor::new(0, Char2::one(trivial)));
    assert!(close(d0.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]));
    let plus = sstate_synthesize(&SStateDescriptor::new(0, Char2::one(whole.clone())));
    assert!(close(plus.amplitudes(), &[c(s, 0.0), c(s, 0.0)]));
    let y = sstate_synthesize(&SStateDescriptor::new(0, char2_cyclic(2, 1).unwrap()));
    assert!(close(y.amplitudes(), &[c(s, 0.0), c(0.0, -s)]));
    assert!(y.exact().is_some());
}

#[test]
fn group_from_state_examples() {
    let g = z2();
    let m = g.phase_modulus();
    let trivial = Arc::new(Subgroup::trivial(&g));
    let whole = Arc::new(Subgroup::whole(&g));
    let z = group_from_sstate(&SStateDescriptor::new(0, Char2::one(trivial)));
    assert_eq!(group_table(&z), vec![(g.point_index(0, 0), 0), (g.point_index(0, 1), 0)]);
    let x = group_from_sstate(&SStateDescriptor::new(0, Char2::one(whole)));
    assert_eq!(group_table(&x), vec![(g.point_index(0, 0), 0), (g.point_index(1, 0), 0)]);
    let y = group_from_sstate(&SStateDescriptor::new(0, char2_cyclic(2, 1).unwrap()));
    // α(1,1) = i = ζ^1 with ζ = e^{iπ/2}
    assert_eq!(group_table(&y), vec![(g.point_index(0, 0), 0), (g.point_index(1, 1), 1)]);
    assert_eq!(m, 4);
    let dense = dense_shift(&g, 1, 1) * c(0.0, 1.0);
    let v = DVector::from_vec(sstate_synthesize(&SStateDescriptor::new(0, char2_cyclic(2, 1).unwrap())).amplitudes().to_vec());
    assert!(((&dense * &v) - &v).norm() < 1e-12);
}

#[test]
fn state_from_group_examples() {
    let g = z2();
    let m = g.phase_modulus();
    let one = PhaseExp::one(m);
    let minus = PhaseExp::new(2, m);
    let x = StabilizerGroup::from_table(&g, &[(0, one), (g.point_index(1, 0), one)]).unwrap();
    let d = sstate_from_group(&x).unwrap();
    assert_eq!(d.y, 0);
    assert_eq!(d.subgroup().len(), 2);
    assert!(d.character().values().iter().all(|v| v.is_one()));
    let zg = StabilizerGroup::from_table(&g, &[(0, one), (g.point_index(0, 1), one)]).unwrap();
    let d = sstate_from_group(&zg).unwrap();
    assert_eq!((d.y, d.subgroup().len()), (0, 1));
    let minus_z = StabilizerGroup::from_table(&g, &[(0, one), (g.point_index(0, 1), minus)]).unwrap();
    let d = sstate_from_group(&minus_z).unwrap();
    assert_eq!(d.y, 1);
    assert!(close(sstate_synthesize(&d).amplitudes(), &[c(0.0, 0.0), c(1.0, 0.0)]));
    let broken = StabilizerGroup::from_table(&g, &[(0, minus), (g.point_index(0, 1), one)]);
    assert!(matches!(broken, Err(Error::NotStabilizerGroup(_))));
}

#[test]
fn verify_examples() {
    let g = z2();
    let m = g.phase_modulus();
    let one = PhaseExp::one(m);
    let zg = StabilizerGroup::from_table(&g, &[(0, one), (g.point_index(0, 1), one)]).unwrap();
    let xg = StabilizerGroup::from_table(&g, &[(0, one), (g.point_index(1, 0), one)]).unwrap();
    let d0 = WaveFunction::delta(&g, 0);
    assert!(verify_stabilized(&zg, &d0).unwrap());
    assert!(!verify_stabilized(&xg, &d0).unwrap());
    assert!(verify_stabilized(&xg, &WaveFunction::uniform(&g)).unwrap());
    let unnormalized = WaveFunction::new(&g, vec![c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
    assert!(matches!(verify_stabilized(&zg, &unnormalized), Err(Error::NotNormalized(_))));
}

#[test]
fn recognition_examples() {
    let g = z2();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = WaveFunction::new(&g, vec![c(s, 0.0), c(s, 0.0)]).unwrap();
    let d = is_sstate(&plus, 1e-9).unwrap().unwrap();
    assert_eq!(d.subgroup().len(), 2);
    assert!(d.character().values().iter().all(|v| v.is_one()));
    let odd = WaveFunction::new(&g, vec![c(s, 0.0), Complex64::from_polar(s, std::f64::consts::PI / 5.0)]).unwrap();
    assert!(is_sstate(&odd, 1e-9).unwrap().is_none());
    let r = 1.0 / 5f64.sqrt();
    let uneven = WaveFunction::new(&g, vec![c(2.0 * r, 0.0), c(r, 0.0)]).unwrap();
    assert!(is_sstate(&uneven, 1e-9).unwrap().is_none());
    let zero = WaveFunction::new(&g, vec![c(0.0, 0.0); 2]).unwrap();
    assert!(matches!(is_sstate(&zero, 1e-9), Err(Error::ZeroState)));
}

#[test]
fn counting_examples() {
    let count = |s: &str| count_states(&s.parse().unwrap(), 64).unwrap();
    assert_eq!(count("Z2"), 6);
    assert_eq!(count("Z3"), 12);
    assert_eq!(count("Z4"), 28);
    assert_eq!(count("Z2xZ2"), 60);
    assert_eq!(count("Z2xZ2xZ2"), 1080);
    assert!(matches!(count_states(&Group::new(&[2; 7]).unwrap(), 64), Err(Error::BoundExceeded { .. })));
}

#[test]
fn fiber_examples() {
    let g = z2();
    let whole = Arc::new(Subgroup::whole(&g));
    let h1 = ModuliClass::canonical(0, char2_cyclic(2, 1).unwrap());
    let id = ModuliClass::fiber_identity(&whole, 0);
    assert_eq!(fiber_product(&h1, &id).unwrap(), h1);
    let sq = fiber_product(&h1, &h1).unwrap();
    let table: Vec<Complex64> = sq.character().values().iter().map(|v| v.to_complex()).collect();
    assert!(close(&table, &[c(1.0, 0.0), c(-1.0, 0.0)]));
    assert!(sq.character().beta().is_zero());
    assert_eq!(fiber_product(&h1, &h1.fiber_inverse()).unwrap(), id);
    let trivial = Arc::new(Subgroup::trivial(&g));
    let other = ModuliClass::fiber_identity(&trivial, 0);
    assert!(matches!(fiber_product(&h1, &other), Err(Error::NotInSameFiber)));
}

#[test]
fn moduli_relation_is_respected() {
    // (y, h) and (y + d, h·β(d)) name the same class
    for g in groups_upto(8) {
        for entry in enumerate_states(&g, 64).unwrap().iter().step_by(5) {
            let h = entry.moduli.character();
            let sub = h.domain();
            for &d in sub.elements() {
                let shifted: Vec<PhaseExp> =
                    sub.elements().iter().map(|&x| h.value_at(x).unwrap() * h.beta().eval(d, x)).collect();
                let moved = Char2::from_table(sub.clone(), shifted).unwrap();
                let y = g.add(entry.moduli.y(), d);
                assert_eq!(ModuliClass::canonical(y, moved), entry.moduli, "{g}");
            }
        }
    }
}

#[test]
fn enumeration_matches_oracle_states() {
    for g in groups_upto(6) {
        let ours: HashSet<_> = enumerate_states(&g, 64).unwrap().iter().map(|e| phase_key(e.wavefunction().amplitudes())).collect();
        let theirs: HashSet<_> = oracle_states(&g, 64).unwrap().iter().map(|s| phase_key(&s.amplitudes)).collect();
        assert_eq!(ours.len(), count_states(&g, 64).unwrap() as usize);
        assert_eq!(ours, theirs, "{g}");
    }
    assert_eq!(oracle_count(&"Z4".parse().unwrap(), 64).unwrap(), 28);
}

#[test]
fn projector_average_reproduces_state() {
    for g in groups_upto(6) {
        let n = g.size();
        for entry in enumerate_states(&g, 64).unwrap() {
            let mut avg = DMatrix::<Complex64>::zeros(n, n);
            for (&p, a) in entry.stabilizer.isotropic().points().iter().zip(entry.stabilizer.alpha()) {
                avg += dense_shift(&g, p / n, p % n) * a.to_complex();
            }
            avg /= c(n as f64, 0.0);
            let v = DVector::from_vec(entry.wavefunction().amplitudes().to_vec());
            let dev = (avg - &v * v.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(dev < 1e-12, "{g}");
        }
    }
}

#[test]
fn dependent_states_share_beta() {
    for g in groups_upto(6) {
        let states = enumerate_states(&g, 64).unwrap();
        let waves: Vec<WaveFunction> = states.iter().map(|s| s.wavefunction()).collect();
        for (i, a) in states.iter().enumerate() {
            let alt = a.descriptor.clone();
            let again = sstate_synthesize(&alt);
            assert!(linearly_dependent(&waves[i], &again, 1e-9));
            for (j, b) in states.iter().enumerate() {
                let dep = linearly_dependent(&waves[i], &waves[j], 1e-9);
                assert_eq!(dep, i == j, "{g}");
                if dep {
                    assert_eq!(a.moduli.character().beta(), b.moduli.character().beta());
                }
            }
        }
    }
}

fn group_strategy() -> impl Strategy<Value = Group> {
    prop::sample::select(groups_upto(8))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn criterion_agrees_with_verification(g in group_strategy(), seed in any::<u64>(), pick in any::<usize>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let states = enumerate_states(&g, 64).unwrap();
        let entry = &states[pick % states.len()];
        let other = &states[(pick / 7) % states.len()];
        let phi = entry.wavefunction();
        prop_assert!(verify_stabilized(&entry.stabilizer, &phi).unwrap());
        prop_assert!(cst_criterion_deviation(&entry.stabilizer, &phi).unwrap() < 1e-9);
        let random = random_state(&g, &mut rng);
        for (grp, psi) in [(&entry.stabilizer, &random), (&other.stabilizer, &phi)] {
            let stabilized = verify_stabilized(grp, psi).unwrap();
            let criterion = cst_criterion_deviation(grp, psi).unwrap() <= 1e-9;
            prop_assert_eq!(stabilized, criterion);
        }
    }

    #[test]
    fn recognition_round_trip(g in group_strategy(), pick in any::<usize>(), theta in 0.0f64..6.28) {
        let states = enumerate_states(&g, 64).unwrap();
        let entry = &states[pick % states.len()];
        let phi = entry.wavefunction().scaled(Complex64::from_polar(1.0, theta));
        let dense = WaveFunction::new(&g, phi.amplitudes().to_vec()).unwrap();
        let d = is_sstate(&dense, 1e-9).unwrap().expect("stabilizer state recognized");
        prop_assert_eq!(d.moduli(), entry.moduli.clone());
        prop_assert_eq!(group_from_sstate(&d), entry.stabilizer.clone());
    }

    #[test]
    fn random_states_have_large_ambiguity_support(g in group_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_non_stabilizer(&g, &mut rng);
        prop_assert!(is_sstate(&phi, 1e-9).unwrap().is_none());
        prop_assert!(cst(&phi, &phi).unwrap().support(1e-9).len() > g.size());
    }

    #[test]
    fn group_round_trip_random(g in group_strategy(), pick in any::<usize>()) {
        let whole = Arc::new(Subgroup::whole(&g));
        let ch2 = enumerate_ch2(&whole);
        let h = &ch2[pick % ch2.len()];
        let grp = group_from_sstate(&SStateDescriptor::new(pick % g.size(), h.clone()));
        let back = sstate_from_group(&grp).unwrap();
        prop_assert_eq!(group_from_sstate(&back), grp);
    }
}
