mod common;

use std::collections::HashSet;
use std::sync::Arc;

use proptest::prelude::*;
use stabforge::group::{annihilator, enumerate_subgroups, Subgroup};
use stabforge::oracle::maximal_isotropic_points;
use stabforge::phase_space::{enumerate_maximal_isotropic, isotropic_from_pair, pair_from_isotropic, symplectic_form};
use stabforge::quadratic::{enumerate_sym, sym_count};
use stabforge::{Error, Group, SymHom};

use common::{groups_upto, pairing_c};

#[test]
fn symplectic_examples() {
    let g: Group = "Z2".parse().unwrap();
    let z = g.point(g.point_index(1, 0));
    let w = g.point(g.point_index(0, 1));
    assert!((symplectic_form(&g, &z, &w).unwrap().to_complex() + 1.0).norm() < 1e-12);
    assert!(symplectic_form(&g, &z, &z).unwrap().is_one());
    let g4: Group = "Z4".parse().unwrap();
    for x in 0..4 {
        for y in 0..4 {
            assert!(g4.symplectic_idx(g4.point_index(x, 0), g4.point_index(y, 0)).is_one());
        }
    }
}

#[test]
fn symplectic_matches_float_definition() {
    for g in groups_upto(6) {
        let n = g.size();
        for p in 0..n * n {
            for q in 0..n * n {
                let (x, xi) = g.point_parts(p);
                let (y, eta) = g.point_parts(q);
                let expect = pairing_c(&g, y, xi) * pairing_c(&g, x, eta).conj();
                assert!((g.symplectic_idx(p, q).to_complex() - expect).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn pair_examples() {
    let g: Group = "Z2".parse().unwrap();
    let trivial = Arc::new(Subgroup::trivial(&g));
    let k = isotropic_from_pair(&trivial, &SymHom::zero(trivial.clone())).unwrap();
    assert_eq!(k.points(), &[g.point_index(0, 0), g.point_index(0, 1)]);
    let whole = Arc::new(Subgroup::whole(&g));
    let k = isotropic_from_pair(&whole, &SymHom::zero(whole.clone())).unwrap();
    assert_eq!(k.points(), &[g.point_index(0, 0), g.point_index(1, 0)]);
    let one = SymHom::new(whole.clone(), vec![vec![1]]).unwrap();
    let k = isotropic_from_pair(&whole, &one).unwrap();
    assert_eq!(k.points(), &[g.point_index(0, 0), g.point_index(1, 1)]);
    let (h, beta) = pair_from_isotropic(&g, k.points()).unwrap();
    assert_eq!(*h, *whole);
    assert_eq!(beta, one);
}

#[test]
fn pair_from_isotropic_errors() {
    let g: Group = "Z2".parse().unwrap();
    let not_sub = [g.point_index(1, 0)];
    assert!(matches!(pair_from_isotropic(&g, &not_sub), Err(Error::NotSubgroup(_))));
    let all: Vec<usize> = (0..4).collect();
    assert!(matches!(pair_from_isotropic(&g, &all), Err(Error::NotIsotropic(_))));
    let small = [0];
    assert!(matches!(pair_from_isotropic(&g, &small), Err(Error::WrongCardinality { expected: 2, got: 1 })));
}

#[test]
fn maximal_isotropic_counts() {
    let count = |s: &str| enumerate_maximal_isotropic(&s.parse().unwrap(), 64).unwrap().len();
    assert_eq!(count("Z2"), 3);
    assert_eq!(count("Z3"), 4);
    assert_eq!(count("Z2xZ2"), 15);
}

#[test]
fn isotropic_subgroups_exhaustive_up_to_16() {
    for g in groups_upto(16) {
        let n = g.size();
        let ks = enumerate_maximal_isotropic(&g, 64).unwrap();
        let expected: u64 = enumerate_subgroups(&g).unwrap().iter().map(|h| sym_count(h)).sum();
        assert_eq!(ks.len() as u64, expected, "{g}");
        let mut seen = HashSet::new();
        for k in &ks {
            assert_eq!(k.len(), n);
            let set: HashSet<usize> = k.points().iter().copied().collect();
            for &p in k.points() {
                for &q in k.points() {
                    assert!(g.symplectic_idx(p, q).is_one());
                    assert!(set.contains(&g.point_add(p, q)));
                }
            }
            for p in (0..n * n).filter(|p| !set.contains(p)) {
                assert!(k.points().iter().any(|&q| !g.symplectic_idx(p, q).is_one()), "{g}: not maximal");
            }
            let fiber: HashSet<usize> = k.fiber_at_zero().into_iter().collect();
            let ann: HashSet<usize> = annihilator(k.subgroup()).elements().iter().copied().collect();
            assert_eq!(fiber, ann);
            let (h, beta) = pair_from_isotropic(&g, k.points()).unwrap();
            assert_eq!(&h, k.subgroup());
            assert_eq!(&beta, k.beta());
            assert!(seen.insert(k.points().to_vec()), "{g}: duplicate K");
        }
    }
}

#[test]
fn enumeration_matches_doubled_group_scan() {
    for g in groups_upto(8) {
        let ours: HashSet<Vec<usize>> =
            enumerate_maximal_isotropic(&g, 64).unwrap().iter().map(|k| k.points().to_vec()).collect();
        let scan: HashSet<Vec<usize>> = maximal_isotropic_points(&g, 64).unwrap().into_iter().collect();
        assert_eq!(ours, scan, "{g}");
    }
}

fn pair_strategy() -> impl Strategy<Value = (Arc<Subgroup>, SymHom)> {
    let all: Vec<(Arc<Subgroup>, SymHom)> = groups_upto(16)
        .iter()
        .flat_map(|g| enumerate_subgroups(g).unwrap())
        .flat_map(|h| enumerate_sym(&h).into_iter().map(move |b| (h.clone(), b)))
        .collect();
    prop::sample::select(all)
}

proptest! {
    #[test]
    fn membership_law((h, beta) in pair_strategy(), seed in any::<u64>()) {
        let k = isotropic_from_pair(&h, &beta).unwrap();
        let g = h.group();
        let n = g.size();
        let p = (seed as usize) % (n * n);
        let (x, xi) = g.point_parts(p);
        let law = h.contains(x) && h.elements().iter().all(|&y| g.pairing_idx(y, xi) == beta.eval(x, y));
        prop_assert_eq!(k.contains(p), law);
        let (h2, b2) = pair_from_isotropic(g, k.points()).unwrap();
        prop_assert_eq!(&h2, &h);
        prop_assert_eq!(&b2, &beta);
    }
}
