//! Invariant suites run by `stabforge selftest`. Each suite exercises one
//! module on one group and reports pass, failure or a skip notice when the
//! group is too large for its exhaustive part.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::group::{annihilator, enumerate_subgroups_within, Group, Subgroup};
use crate::oracle::oracle_count;
use crate::par;
use crate::phase_space::{enumerate_maximal_isotropic, pair_from_isotropic};
use crate::quadratic::{beta_of, enumerate_ch2, enumerate_sym, sym_count, Char2};
use crate::random::{random_density, random_full_density, random_non_stabilizer, random_state};
use crate::stabilizer::{
    count_states, cst_criterion_deviation, enumerate_states, fiber_product, group_from_sstate, linearly_dependent,
    sstate_from_group, verify_stabilized, ModuliClass, StateEntry,
};
use crate::wehrl::{
    berezin_lieb, fourier_husimi, husimi, polytope_objective, verify_max_bound, verify_min_bound,
    ConcaveFn,
};
use crate::weyl::{cst, shift_apply_idx, shift_compose_idx, DensityOperator, WaveFunction};

/// Settings shared by all suites.
#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub bound: u64,
    pub seed: u64,
    /// Number of random cases per randomized suite.
    pub random_cases: usize,
    pub tolerance: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            bound: crate::group::DEFAULT_ENUMERATION_BOUND,
            seed: 0,
            random_cases: 50,
            tolerance: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Status {
    Passed(String),
    Failed(String),
    Skipped(String),
}

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub group: String,
    pub status: Status,
    pub elapsed: Duration,
}

impl SuiteResult {
    pub fn failed(&self) -> bool {
        matches!(self.status, Status::Failed(_))
    }
}

type Outcome = std::result::Result<Option<String>, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn skip(reason: impl Into<String>) -> Outcome {
    Err(format!("\u{0}{}", reason.into()))
}

type Suite = fn(&Group, &CheckConfig) -> Outcome;

/// Names and entry points of every suite, in execution order.
pub const SUITES: &[(&str, Suite)] = &[
    ("group-core", suite_group_core),
    ("quadratic", suite_quadratic),
    ("phase-space", suite_phase_space),
    ("weyl", suite_weyl),
    ("counting", suite_counting),
    ("stab1", suite_stab1),
    ("moduli-fiber", suite_fiber),
    ("wehrl-min", suite_wehrl_min),
    ("berezin-lieb", suite_berezin_lieb),
    ("wehrl-max", suite_wehrl_max),
    ("fourier-husimi", suite_fourier),
];

/// Runs every suite on the group.
pub fn run_all(group: &Group, config: &CheckConfig) -> Vec<SuiteResult> {
    SUITES
        .iter()
        .map(|(name, suite)| {
            let start = Instant::now();
            let status = match suite(group, config) {
                Ok(detail) => Status::Passed(detail.unwrap_or_default()),
                Err(msg) if msg.starts_with('\u{0}') => Status::Skipped(msg[1..].to_string()),
                Err(msg) => Status::Failed(msg),
            };
            SuiteResult {
                suite: name,
                group: group.to_string(),
                status,
                elapsed: start.elapsed(),
            }
        })
        .collect()
}

fn rng_for(config: &CheckConfig, group: &Group, salt: u64) -> ChaCha8Rng {
    let g: u64 = group.orders().iter().fold(17, |acc, &d| acc.wrapping_mul(31).wrapping_add(d));
    ChaCha8Rng::seed_from_u64(config.seed ^ g.wrapping_mul(0x9e37_79b9) ^ salt)
}

fn within(group: &Group, config: &CheckConfig, limit: u64) -> bool {
    group.order() <= limit.min(config.bound)
}

fn closure(group: &Group, gens: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; group.size()];
    seen[0] = true;
    let mut stack = vec![0usize];
    let mut out = vec![0usize];
    while let Some(a) = stack.pop() {
        for &g in gens {
            let b = group.add(a, g);
            if !seen[b] {
                seen[b] = true;
                stack.push(b);
                out.push(b);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Number of subgroups by closing every subset of at most `log2 N` elements.
pub fn brute_force_subgroup_count(group: &Group) -> usize {
    let n = group.size();
    let max_gens = (usize::BITS - n.leading_zeros()) as usize;
    let mut found = HashSet::new();
    let mut current = vec![];
    fn rec(group: &Group, start: usize, left: usize, current: &mut Vec<usize>, found: &mut HashSet<Vec<usize>>) {
        found.insert(closure(group, current));
        if left == 0 {
            return;
        }
        for g in start..group.size() {
            current.push(g);
            rec(group, g + 1, left - 1, current, found);
            current.pop();
        }
    }
    rec(group, 1, max_gens, &mut current, &mut found);
    found.len()
}

fn suite_group_core(group: &Group, config: &CheckConfig) -> Outcome {
    if !within(group, config, 16) {
        return skip("exhaustive group checks need N ≤ 16");
    }
    let n = group.size();
    for x in 0..n {
        for y in 0..n {
            for xi in 0..n {
                ensure!(
                    group.pairing_idx(group.add(x, y), xi) == group.pairing_idx(x, xi) * group.pairing_idx(y, xi),
                    "pairing not additive in x"
                );
                ensure!(
                    group.pairing_idx(xi, group.add(x, y)) == group.pairing_idx(xi, x) * group.pairing_idx(xi, y),
                    "pairing not additive in ξ"
                );
            }
        }
    }
    let subs = enumerate_subgroups_within(group, config.bound).map_err(|e| e.to_string())?;
    let brute = brute_force_subgroup_count(group);
    ensure!(subs.len() == brute, "{} subgroups enumerated, brute force finds {brute}", subs.len());
    for h in &subs {
        let ann = annihilator(h);
        ensure!(h.len() * ann.len() == n, "#H·#H⊥ ≠ N for H = {h}");
        ensure!(annihilator(&ann) == **h, "H⊥⊥ ≠ H for H = {h}");
        let d = h.decomposition();
        ensure!(d.orders().iter().product::<u64>() as usize == h.len(), "decomposition orders of {h}");
        for (i, &a) in h.elements().iter().enumerate() {
            ensure!(d.combine(group, d.coords_at(i)) == a, "coordinate map is not inverse on {h}");
            for (j, &b) in h.elements().iter().enumerate() {
                let sum: Vec<u64> = d
                    .coords_at(i)
                    .iter()
                    .zip(d.coords_at(j))
                    .zip(d.orders())
                    .map(|((u, v), e)| (u + v) % e)
                    .collect();
                ensure!(d.combine(group, &sum) == group.add(a, b), "coordinate map is not additive on {h}");
            }
        }
    }
    Ok(Some(format!("{} subgroups", subs.len())))
}

fn suite_quadratic(group: &Group, config: &CheckConfig) -> Outcome {
    let subs = enumerate_subgroups_within(group, config.bound).map_err(|e| e.to_string())?;
    let mut checked = 0usize;
    for h in subs.iter().filter(|h| h.len() <= 16) {
        let ch2 = enumerate_ch2(h);
        ensure!(ch2.len() as u64 == h.len() as u64 * sym_count(h), "#Ch₂ ≠ #H·#Sym on {h}");
        ensure!(enumerate_sym(h).len() as u64 == sym_count(h), "#Sym formula on {h}");
        for c in &ch2 {
            Char2::from_table(h.clone(), c.values().to_vec()).map_err(|e| format!("{h}: {e}"))?;
            ensure!(beta_of(c).is_ok(), "beta_of disagrees on {h}");
        }
        let mut rng = rng_for(config, group, 11);
        for _ in 0..ch2.len().min(20) {
            let a = &ch2[rng.random_range(0..ch2.len())];
            let b = &ch2[rng.random_range(0..ch2.len())];
            let prod = a.mul(b).map_err(|e| e.to_string())?;
            let beta = beta_of(&prod).map_err(|e| format!("product leaves Ch₂ on {h}: {e}"))?;
            ensure!(beta == a.beta().add(b.beta()).expect("same domain"), "β is not additive on {h}");
        }
        checked += ch2.len();
    }
    Ok(Some(format!("{checked} characters of second degree")))
}

fn suite_phase_space(group: &Group, config: &CheckConfig) -> Outcome {
    if !within(group, config, 16) {
        return skip("isotropic round trips need N ≤ 16");
    }
    let n = group.size();
    let ks = enumerate_maximal_isotropic(group, config.bound).map_err(|e| e.to_string())?;
    let subs = enumerate_subgroups_within(group, config.bound).map_err(|e| e.to_string())?;
    let expected: u64 = subs.iter().map(|h| sym_count(h)).sum();
    ensure!(ks.len() as u64 == expected, "{} maximal isotropic subgroups, expected {expected}", ks.len());
    let mut sets = HashSet::new();
    for k in &ks {
        ensure!(k.len() == n, "#K ≠ N");
        for &p in k.points() {
            for &q in k.points() {
                ensure!(group.symplectic_idx(p, q).is_one(), "K is not isotropic");
            }
        }
        for p in (0..n * n).filter(|&p| !k.contains(p)) {
            ensure!(
                k.points().iter().any(|&q| !group.symplectic_idx(p, q).is_one()),
                "K is not maximal"
            );
        }
        let (h, beta) = pair_from_isotropic(group, k.points()).map_err(|e| e.to_string())?;
        ensure!(&h == k.subgroup() && &beta == k.beta(), "(H, β) round trip failed");
        ensure!(sets.insert(k.points().to_vec()), "two pairs give the same K");
    }
    Ok(Some(format!("{} maximal isotropic subgroups", ks.len())))
}

fn suite_weyl(group: &Group, config: &CheckConfig) -> Outcome {
    let n = group.size();
    let mut rng = rng_for(config, group, 23);
    let tol = config.tolerance;
    if n <= 8 {
        let psi = random_state(group, &mut rng);
        for p in 0..n * n {
            for q in 0..n * n {
                let (phase, r) = shift_compose_idx(group, p, q);
                let (qx, qxi) = group.point_parts(q);
                let (px, pxi) = group.point_parts(p);
                let (rx, rxi) = group.point_parts(r);
                let lhs = shift_apply_idx(px, pxi, &shift_apply_idx(qx, qxi, &psi));
                let rhs = shift_apply_idx(rx, rxi, &psi);
                let c = phase.to_complex();
                let dev = lhs
                    .amplitudes()
                    .iter()
                    .zip(rhs.amplitudes())
                    .map(|(a, b)| (a - c * b).norm())
                    .fold(0.0, f64::max);
                ensure!(dev < 1e-12, "composition law fails");
            }
        }
    }
    for _ in 0..config.random_cases {
        let phi = random_state(group, &mut rng);
        let psi = random_state(group, &mut rng);
        let v = cst(&phi, &psi).map_err(|e| e.to_string())?;
        let parseval = v.values().iter().map(|c| c.norm_sqr()).sum::<f64>() / n as f64;
        ensure!((parseval - 1.0).abs() < tol, "Parseval fails: {parseval}");
        let vv = cst(&phi, &phi).map_err(|e| e.to_string())?;
        let support = vv.support(1e-9).len();
        ensure!(support >= n, "ambiguity support {support} < N");
        let peak: Vec<usize> = (0..n * n).filter(|&p| vv.values()[p].norm() >= 1.0 - 1e-9).collect();
        for &p in &peak {
            for &q in &peak {
                ensure!(peak.contains(&group.point_add(p, q)), "peak set of V_φφ is not a subgroup");
                ensure!(group.symplectic_idx(p, q).is_one(), "peak set of V_φφ is not isotropic");
            }
        }
        if n <= 4 {
            let w = rng.random_range(0..n * n);
            let (x, xi) = group.point_parts(w);
            let moved = cst(&phi, &shift_apply_idx(x, xi, &psi)).map_err(|e| e.to_string())?;
            for z in 0..n * n {
                let (_, eta) = group.point_parts(z);
                let c = (group.pairing_idx(x, xi) * group.pairing_idx(x, eta).conj()).to_complex();
                let expect = c * v.values()[group.point_add(z, group.point_neg(w))];
                ensure!((moved.values()[z] - expect).norm() < 1e-12, "covariance fails");
            }
        }
    }
    Ok(None)
}

fn suite_counting(group: &Group, config: &CheckConfig) -> Outcome {
    let formula = count_states(group, config.bound).map_err(|e| e.to_string())?;
    let states = enumerate_states(group, config.bound).map_err(|e| e.to_string())?;
    ensure!(states.len() as u64 == formula, "{} states enumerated, formula gives {formula}", states.len());
    if group.order() <= 12 {
        let oracle = oracle_count(group, config.bound).map_err(|e| e.to_string())?;
        ensure!(oracle as u64 == formula, "oracle finds {oracle}, formula gives {formula}");
        return Ok(Some(format!("{formula} states, oracle agrees")));
    }
    Ok(Some(format!("{formula} states (oracle needs N ≤ 12)")))
}

fn states_small(group: &Group, config: &CheckConfig) -> std::result::Result<Vec<StateEntry>, String> {
    enumerate_states(group, config.bound).map_err(|e| e.to_string())
}

fn suite_stab1(group: &Group, config: &CheckConfig) -> Outcome {
    if !within(group, config, 8) {
        return skip("exhaustive correspondence checks need N ≤ 8");
    }
    let states = states_small(group, config)?;
    let waves: Vec<WaveFunction> = states.iter().map(|s| s.wavefunction()).collect();
    let failures = par::map_range(states.len(), |i| -> std::result::Result<(), String> {
        let s = &states[i];
        let g = group_from_sstate(&s.descriptor);
        ensure!(g == s.stabilizer, "stored stabilizer differs");
        let back = sstate_from_group(&g).map_err(|e| e.to_string())?;
        ensure!(back.moduli() == s.moduli, "descriptor → group → descriptor changes the class");
        let overlap = crate::stabilizer::sstate_synthesize(&back).inner(&waves[i]).norm();
        ensure!((overlap - 1.0).abs() < 1e-12, "round-trip overlap {overlap}");
        ensure!(group_from_sstate(&back) == g, "group → state → group changes (K, α)");
        ensure!(verify_stabilized(&g, &waves[i]).map_err(|e| e.to_string())?, "state not stabilized");
        let dev = cst_criterion_deviation(&g, &waves[i]).map_err(|e| e.to_string())?;
        ensure!(dev < 1e-9, "V_φφ differs from α·1_K by {dev:e}");
        let stabilizing = states
            .iter()
            .filter(|t| verify_stabilized(&t.stabilizer, &waves[i]).unwrap_or(false))
            .count();
        ensure!(stabilizing == 1, "{stabilizing} stabilizer groups fix one state");
        for (j, w) in waves.iter().enumerate() {
            let dep = linearly_dependent(&waves[i], w, 1e-9);
            ensure!(dep == (i == j), "distinct classes give dependent states");
        }
        Ok(())
    });
    for f in failures {
        f?;
    }
    Ok(Some(format!("{} states", states.len())))
}

fn fiber_members(h: &Arc<Subgroup>, y: usize) -> Vec<ModuliClass> {
    enumerate_ch2(h).into_iter().map(|c| ModuliClass::canonical(y, c)).collect()
}

/// Checks the Abelian group axioms of the fiber over `[y]` with a Cayley
/// table; returns the fiber size.
pub fn check_fiber_axioms(h: &Arc<Subgroup>, y: usize) -> std::result::Result<usize, String> {
    let members = fiber_members(h, y);
    let m = members.len();
    let index: HashMap<Vec<u64>, usize> = members
        .iter()
        .enumerate()
        .map(|(i, c)| (c.character().values().iter().map(|v| v.exponent()).collect(), i))
        .collect();
    ensure!(index.len() == m, "fiber classes are not distinct");
    let key = |c: &ModuliClass| -> Vec<u64> { c.character().values().iter().map(|v| v.exponent()).collect() };
    let rows = par::map_range(m, |i| {
        (0..m)
            .map(|j| {
                let p = fiber_product(&members[i], &members[j]).map_err(|e| e.to_string())?;
                index.get(&key(&p)).copied().ok_or_else(|| "product leaves the fiber".to_string())
            })
            .collect::<std::result::Result<Vec<usize>, String>>()
    });
    let table: Vec<Vec<usize>> = rows.into_iter().collect::<std::result::Result<_, _>>()?;
    let identity = index[&key(&ModuliClass::fiber_identity(h, y))];
    for i in 0..m {
        ensure!(table[i][identity] == i, "identity fails");
        let inv = index[&key(&members[i].fiber_inverse())];
        ensure!(table[i][inv] == identity, "inverse fails");
        for j in 0..m {
            ensure!(table[i][j] == table[j][i], "fiber product is not commutative");
        }
    }
    let assoc = par::map_range(m, |i| {
        for j in 0..m {
            let ij = table[i][j];
            for k in 0..m {
                if table[ij][k] != table[i][table[j][k]] {
                    return false;
                }
            }
        }
        true
    });
    ensure!(assoc.into_iter().all(|ok| ok), "fiber product is not associative");
    Ok(m)
}

fn suite_fiber(group: &Group, config: &CheckConfig) -> Outcome {
    if !within(group, config, 8) {
        return skip("exhaustive fiber axioms need N ≤ 8");
    }
    let subs = enumerate_subgroups_within(group, config.bound).map_err(|e| e.to_string())?;
    let mut fibers = 0;
    for h in &subs {
        for y in h.coset_representatives() {
            check_fiber_axioms(h, y)?;
            fibers += 1;
        }
    }
    Ok(Some(format!("{fibers} fibers")))
}

fn suite_wehrl_min(group: &Group, config: &CheckConfig) -> Outcome {
    let n = group.size();
    if !within(group, config, 8) {
        return skip("stabilizer windows need N ≤ 8");
    }
    let states = states_small(group, config)?;
    let gs = ConcaveFn::builtins();
    let mut rng = rng_for(config, group, 41);
    let pairs: Vec<(usize, usize)> = if states.len() * n * n <= 2000 {
        (0..states.len()).flat_map(|i| (0..n * n).map(move |z| (i, z))).collect()
    } else {
        (0..200).map(|_| (rng.random_range(0..states.len()), rng.random_range(0..n * n))).collect()
    };
    let results = par::map(&pairs, |&(i, z)| -> std::result::Result<(), String> {
        let phi = states[i].wavefunction();
        let (x, xi) = group.point_parts(z);
        let rho = DensityOperator::pure(&shift_apply_idx(x, xi, &phi)).map_err(|e| e.to_string())?;
        for g in &gs {
            let r = verify_min_bound(g, &phi, &rho).map_err(|e| e.to_string())?;
            ensure!(r.equality, "{}: entropy {} ≠ G(1) for a stabilizer pair", g, r.entropy);
            ensure!(r.witness.is_some(), "missing witness");
        }
        Ok(())
    });
    for r in results {
        r?;
    }
    for _ in 0..config.random_cases {
        let phi = random_non_stabilizer(group, &mut rng);
        let rho = DensityOperator::pure(&phi).map_err(|e| e.to_string())?;
        for g in &gs {
            let r = verify_min_bound(g, &phi, &rho).map_err(|e| e.to_string())?;
            ensure!(r.entropy - r.bound > 1e-6, "{}: gap {} too small for a non-stabilizer", g, r.entropy - r.bound);
        }
    }
    Ok(Some(format!("{} stabilizer pairs", pairs.len())))
}

fn suite_berezin_lieb(group: &Group, config: &CheckConfig) -> Outcome {
    let mut rng = rng_for(config, group, 53);
    let g = ConcaveFn::neg_t_log_t();
    for _ in 0..config.random_cases {
        let phi = random_state(group, &mut rng);
        let rank = rng.random_range(1..=group.size());
        let rho = random_density(group, rank, &mut rng);
        for g in ConcaveFn::builtins() {
            berezin_lieb(&g, &phi, &rho).map_err(|e| e.to_string())?;
        }
    }
    let phi = random_state(group, &mut rng);
    let r = berezin_lieb(&g, &phi, &DensityOperator::maximally_mixed(group)).map_err(|e| e.to_string())?;
    ensure!(r.equality, "I/N must give equality");
    if within(group, config, 16) {
        let window = WaveFunction::delta(group, 0);
        let n = group.size();
        let terms: Vec<(f64, WaveFunction)> = (0..n)
            .map(|x| (2.0 * (x + 1) as f64 / (n * (n + 1)) as f64, shift_apply_idx(x, 0, &window)))
            .collect();
        let rho = DensityOperator::mixture(group, &terms).map_err(|e| e.to_string())?;
        let r = berezin_lieb(&g, &window, &rho).map_err(|e| e.to_string())?;
        ensure!(r.equality, "shift-basis mixture must give equality");
        ensure!(r.shifts.as_ref().is_some_and(|s| s.len() == n), "coset structure not recovered");
    }
    Ok(None)
}

fn suite_wehrl_max(group: &Group, config: &CheckConfig) -> Outcome {
    let mut rng = rng_for(config, group, 67);
    let g = ConcaveFn::neg_t_log_t();
    for _ in 0..config.random_cases {
        let phi = random_state(group, &mut rng);
        let psi = random_state(group, &mut rng);
        let r = verify_max_bound(&g, &phi, &DensityOperator::pure(&psi).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        ensure!(!r.equality, "random pair at the upper bound");
        let rho = random_full_density(group, &mut rng);
        verify_max_bound(&g, &phi, &rho).map_err(|e| e.to_string())?;
    }
    let d = WaveFunction::delta(group, 0);
    let u = WaveFunction::uniform(group);
    let r = verify_max_bound(&g, &d, &DensityOperator::pure(&u).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure!(r.equality && r.overlap_trivial, "delta/uniform pair must reach the upper bound");
    Ok(None)
}

fn suite_fourier(group: &Group, config: &CheckConfig) -> Outcome {
    let mut rng = rng_for(config, group, 79);
    let n = group.size();
    let mut worst = 0.0f64;
    for _ in 0..config.random_cases {
        let phi = random_state(group, &mut rng);
        let rho = random_density(group, rng.random_range(1..=n), &mut rng);
        let u = husimi(&phi, &rho).map_err(|e| e.to_string())?;
        u.check_invariants().map_err(|e| e.to_string())?;
        let r = fourier_husimi(&phi, &rho).map_err(|e| e.to_string())?;
        worst = worst.max(r.residual);
        ensure!((r.lhs[0] - Complex64::new(1.0, 0.0)).norm() < 1e-9, "F u at zero ≠ 1");
    }
    // the constant vector maximizes Σ G(t_i) on {t ∈ [0,1]^{N²} : Σ t = N}
    let g = ConcaveFn::neg_t_log_t();
    let flat = vec![1.0 / n as f64; n * n];
    let best = polytope_objective(&g, &flat);
    for _ in 0..config.random_cases {
        let mut t = flat.clone();
        let i = rng.random_range(0..t.len());
        let j = rng.random_range(0..t.len());
        let eps = rng.random_range(0.0..t[j].min(1.0 - t[i]));
        t[i] += eps;
        t[j] -= eps;
        ensure!(polytope_objective(&g, &t) <= best + 1e-12, "a perturbation increases the objective");
    }
    Ok(Some(format!("max residual {worst:.2e}")))
}
