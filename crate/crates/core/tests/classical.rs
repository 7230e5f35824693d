use invsq::classical::{
    chain_partition, feynman_kac, free_energy_density, free_energy_extrapolated, free_kernel, image_kernel,
    scaling_check_w, McOptions,
};
use invsq::numerics::banded::Banded;
use invsq::numerics::quad::{integrate, QuadOptions};
use invsq::propagator::propagator_quadrature;
use invsq::spectrum::bound_state;
use invsq::{
    derived_constants, fixed_points, ChainBoundary, ChainGrid, ChainPhase, ChainSpec, ModelParams, PathEnsembleSpec,
    PathPotential, Regulator, Sign,
};
use proptest::prelude::*;
use std::f64::consts::PI;

fn p316() -> ModelParams {
    derived_constants(-3.0 / 16.0).unwrap()
}

fn g_minus() -> f64 {
    fixed_points(&p316()).unwrap().1
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn within(est: f64, se: f64, exact: f64, k: f64) -> bool {
    (est - exact).abs() <= k * se
}

#[test]
fn image_kernel_is_a_semigroup() {
    for &(x, y, t) in &[(0.3f64, 1.1f64, 0.2f64), (1.0, 1.0, 4.0), (2.5, 0.4, 0.7)] {
        let direct = ((-(x - y) * (x - y) / (4.0 * t)).exp() - (-(x + y) * (x + y) / (4.0 * t)).exp())
            / (4.0 * PI * t).sqrt();
        assert!(rel(image_kernel(x, y, t), direct) < 1e-13);
        let (s, u) = (0.4 * t, 0.6 * t);
        let top = x.max(y) + 30.0 * t.sqrt();
        let conv = integrate(|z| image_kernel(x, z, s) * image_kernel(z, y, u), 0.0, top, QuadOptions::rel(1e-12))
            .unwrap()
            .value;
        assert!(rel(conv, image_kernel(x, y, t)) < 1e-10);
    }
    assert_eq!(image_kernel(-0.5, 1.0, 1.0), 0.0);
}

#[test]
fn free_mode_returns_the_free_kernel() {
    let p = p316();
    let reg = Regulator::square_well(0.05, 1.0).unwrap();
    let mut s = PathEnsembleSpec::new(-0.3, 0.8, 1.5, 64, 100, 3);
    s.potential = PathPotential::Free;
    let r = feynman_kac(&p, &reg, &s).unwrap();
    assert_eq!(r.value, free_kernel(0.8, -0.3, 1.5));
    assert_eq!(r.std_error, 0.0);
}

#[test]
fn barrier_only_matches_image_kernel() {
    let p = p316();
    let reg = Regulator::square_well(0.05, 1.0).unwrap();
    for &(x, y, t, n) in &[(1.0, 1.0, 4.0, 16), (0.5, 1.5, 1.0, 64), (0.3, 0.4, 0.5, 8), (2.0, 1.0, 0.25, 128)] {
        let mut s = PathEnsembleSpec::new(y, x, t, n, 20_000, 11);
        s.potential = PathPotential::BarrierOnly;
        let r = feynman_kac(&p, &reg, &s).unwrap();
        let exact = image_kernel(x, y, t);
        assert!(within(r.value, r.std_error, exact, 3.0), "({x},{y},{t}): {} +- {} vs {exact}", r.value, r.std_error);
        assert!(r.absorbed_fraction > 0.0);
    }
}

#[test]
fn estimate_is_identical_across_runs_and_thread_counts() {
    let p = p316();
    let reg = Regulator::square_well(0.1, 1.2).unwrap();
    let mut s = PathEnsembleSpec::new(1.0, 0.7, 1.0, 128, 5000, 42);
    s.refine_tol = 0.02;
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| feynman_kac(&p, &reg, &s).unwrap())
    };
    let a = run(1);
    let b = run(3);
    let c = run(3);
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    assert_eq!(b, c);
    s.seed = 43;
    assert_ne!(feynman_kac(&p, &reg, &s).unwrap().value, a.value);
}

#[test]
fn model_weight_matches_quadrature_below_threshold() {
    let p = p316();
    let (b, g, x, y, t) = (0.2, 1.0, 1.0, 0.8, 1.0);
    let reg = Regulator::square_well(b, g).unwrap();
    let exact = propagator_quadrature(&p, b, g, x, y, t).unwrap().value;
    for tol in [0.0, 0.02] {
        let mut s = PathEnsembleSpec::new(y, x, t, 1024, 40_000, 5);
        s.refine_tol = tol;
        let r = feynman_kac(&p, &reg, &s).unwrap();
        assert!(within(r.value, r.std_error, exact, 3.0), "tol {tol}: {} +- {} vs {exact}", r.value, r.std_error);
        assert!(r.std_error < 0.02 * exact);
    }
}

#[test]
fn endpoint_scaling_ratio_matches_quadrature() {
    let p = p316();
    let (gp, _) = fixed_points(&p).unwrap();
    // eps |V| inside the well stays below 0.3, as in the plain-trapezoid regime.
    let b = 0.05;
    let opts = McOptions { n_steps: 2048, n_samples: 20_000, seed: 9, refine_tol: 0.0, max_depth: 12 };
    for &(x, y, t, l, lp) in &[(1.0, 1.0, 2.0, 2.0, 0.5), (0.5, 0.5, 2.0, 2.0, 2.0)] {
        let r = scaling_check_w(&p, b, Sign::Plus, x, y, t, l, lp, &opts).unwrap();
        let q = |xx: f64, yy: f64| propagator_quadrature(&p, b, gp, xx, yy, t).unwrap().value;
        let exact = q(l * x, lp * y) / q(x, y);
        assert!(within(r.ratio, r.std_error, exact, 3.0), "{} +- {} vs {exact}", r.ratio, r.std_error);
        assert!((r.expected - (l * lp).powf(p.nu_plus)).abs() < 1e-14);
    }
    assert!(scaling_check_w(&p, 0.5, Sign::Plus, 1.0, 1.0, 1.0, 0.4, 1.0, &opts).is_err());
    assert!(scaling_check_w(&p, b, Sign::Plus, 1.0, 1.0, 1.0, -1.0, 1.0, &opts).is_err());
}

#[test]
fn domain_errors() {
    let p = p316();
    let reg = Regulator::square_well(1.0, 1.0).unwrap();
    let bad = [
        PathEnsembleSpec::new(0.0, 1.0, 1.0, 10, 10, 0),
        PathEnsembleSpec::new(1.0, -1.0, 1.0, 10, 10, 0),
        PathEnsembleSpec::new(1.0, 1.0, 0.0, 10, 10, 0),
        PathEnsembleSpec::new(1.0, 1.0, 1.0, 0, 10, 0),
        PathEnsembleSpec::new(1.0, 1.0, 1.0, 10, 1, 0),
        PathEnsembleSpec { refine_tol: -1.0, ..PathEnsembleSpec::new(1.0, 1.0, 1.0, 10, 10, 0) },
    ];
    for s in bad {
        assert!(feynman_kac(&p, &reg, &s).is_err(), "{s:?}");
    }
    let grid = ChainGrid::aligned(1.0, 0.05, 10.0).unwrap();
    assert!(free_energy_density(&p, &reg, 0.0, &grid, ChainBoundary::Box).is_err());
    // Spacing wider than the kernel.
    assert!(free_energy_density(&p, &reg, 1e-4, &grid, ChainBoundary::Box).is_err());
    // No node on the regulator edge.
    let off = ChainGrid { x_max: 10.0, n_grid: 215 };
    assert!(free_energy_density(&p, &reg, 0.01, &off, ChainBoundary::Box).is_err());
    // Tail matching needs the grid to extend past the regulator.
    let short = ChainGrid::aligned(0.5, 0.05, 0.8).unwrap();
    assert!(free_energy_density(&p, &reg, 0.01, &short, ChainBoundary::Tail).is_err());
    let spec = ChainSpec { n_sites: 0, epsilon: 0.01, x: 1.0, y: 1.0, grid };
    assert!(chain_partition(&p, &reg, &spec).is_err());
    assert!(chain_partition(&p, &reg, &ChainSpec { n_sites: 3, x: -1.0, ..spec }).is_err());
}

#[test]
fn specs_parse_with_short_field_names_and_reject_unknown_fields() {
    let s: PathEnsembleSpec =
        serde_json::from_str(r#"{"y":1,"x":1,"t":4,"N":4096,"n_samples":1000,"seed":7}"#).unwrap();
    assert_eq!(s.n_steps, 4096);
    assert_eq!(s.refine_tol, 0.0);
    assert_eq!(s.potential, PathPotential::Model);
    let b: PathEnsembleSpec =
        serde_json::from_str(r#"{"y":1,"x":1,"t":4,"N":8,"n_samples":10,"seed":7,"potential":"barrier-only"}"#).unwrap();
    assert_eq!(b.potential, PathPotential::BarrierOnly);
    assert!(serde_json::from_str::<PathEnsembleSpec>(r#"{"y":1,"x":1,"t":4,"N":8,"n_samples":10,"seed":7,"z":0}"#).is_err());
    let c: ChainSpec =
        serde_json::from_str(r#"{"N":9,"epsilon":0.01,"x":1,"y":2,"grid":{"x_max":20,"n_grid":1000}}"#).unwrap();
    assert_eq!(c.n_sites, 9);
}

/// d_x d_y times the integral over s of K(x, s) exp(-eps V(s)) K(s, y), split at the edge.
fn single_site(p: &ModelParams, reg: &Regulator, eps: f64, x: f64, y: f64) -> f64 {
    let d = |s: f64| (-0.5 * eps * reg.potential(p, s)).exp();
    let edge = reg.b * p.x0;
    let top = x.max(y) + 40.0 * eps.sqrt();
    let f = |s: f64| image_kernel(x, s, eps) * d(s) * d(s) * image_kernel(s, y, eps);
    let opts = QuadOptions::rel(1e-13);
    let inner = integrate(f, 0.0, edge, opts).unwrap().value;
    let outer = integrate(f, edge, top, opts).unwrap().value;
    d(x) * d(y) * (inner + outer)
}

#[test]
fn one_site_chain_matches_quadrature() {
    let p = p316();
    let reg = Regulator::square_well(1.0, 1.5).unwrap();
    for &(x, y, eps) in &[(1.2, 0.9, 0.05), (0.6, 1.1, 0.02), (1.5, 1.7, 0.1)] {
        let exact = single_site(&p, &reg, eps, x, y);
        let mut errs = Vec::new();
        for h in [0.04, 0.02] {
            let grid = ChainGrid::aligned(1.0, h, 8.0).unwrap();
            let z = chain_partition(&p, &reg, &ChainSpec { n_sites: 1, epsilon: eps, x, y, grid }).unwrap();
            assert!(z.truncation_error < 1e-14 * z.z);
            assert!((z.time - 2.0 * eps).abs() < 1e-15);
            errs.push(rel(z.z, exact));
        }
        // The edge correction leaves an O(h^4) remainder.
        assert!(errs[1] < 2e-6 && errs[1] < errs[0] / 8.0, "({x},{y},{eps}): {errs:?}");
    }
}

#[test]
fn partition_is_symmetric_in_endpoints() {
    let p = p316();
    let reg = Regulator::square_well(1.0, 1.5).unwrap();
    let grid = ChainGrid::aligned(1.0, 0.02, 10.0).unwrap();
    let spec = ChainSpec { n_sites: 40, epsilon: 0.02, x: 0.7, y: 2.2, grid };
    let a = chain_partition(&p, &reg, &spec).unwrap().z;
    let b = chain_partition(&p, &reg, &ChainSpec { x: 2.2, y: 0.7, ..spec }).unwrap().z;
    assert!(rel(a, b) < 1e-6, "{a} vs {b}");
}

#[test]
fn chain_approaches_propagator_as_eps_shrinks() {
    let p = p316();
    let (b, g, x, y, t) = (1.0, 1.0, 1.5, 2.0, 1.0);
    let reg = Regulator::square_well(b, g).unwrap();
    let exact = propagator_quadrature(&p, b, g, x, y, t).unwrap().value;
    let grid = ChainGrid::aligned(1.0, 0.02, 14.0).unwrap();
    let errs: Vec<f64> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&eps| {
            let n = (t / eps).round() as usize - 1;
            let z = chain_partition(&p, &reg, &ChainSpec { n_sites: n, epsilon: eps, x, y, grid }).unwrap();
            assert!(z.truncation_error < 1e-10 * z.z);
            assert!((z.time - t).abs() < 1e-12);
            rel(z.z, exact)
        })
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    assert!(errs[2] < 1e-3, "{errs:?}");
}

/// Free energy from the growth of ln Z with chain length.
fn slope_free_energy(p: &ModelParams, reg: &Regulator, eps: f64, grid: ChainGrid, x: f64, y: f64) -> f64 {
    let ln_z = |n: usize| chain_partition(p, reg, &ChainSpec { n_sites: n, epsilon: eps, x, y, grid }).unwrap().z.ln();
    let (n1, n2) = (3000, 6000);
    -(ln_z(n2) - ln_z(n1)) / ((n2 - n1) as f64 * eps)
}

#[test]
fn slope_route_matches_eigenvalue_route() {
    let p = p316();
    let reg = Regulator::square_well(1.0, g_minus() + 1.0).unwrap();
    let eps = 0.05;
    let grid = ChainGrid::aligned(1.0, 0.05, 30.0).unwrap();
    let eig = free_energy_density(&p, &reg, eps, &grid, ChainBoundary::Box).unwrap();
    assert_eq!(eig.phase, ChainPhase::Extensive);
    let a = slope_free_energy(&p, &reg, eps, grid, 1.5, 2.0);
    let b = slope_free_energy(&p, &reg, eps, grid, 3.0, 0.5);
    assert!(rel(a, eig.f_xy) < 1e-6, "{a} vs {}", eig.f_xy);
    // Endpoint independence.
    assert!(rel(a, b) < 1e-3, "{a} vs {b}");
}

#[test]
fn tail_and_box_agree_for_a_bound_state() {
    let p = p316();
    let reg = Regulator::square_well(1.0, g_minus() + 1.0).unwrap();
    let grid = ChainGrid::aligned(1.0, 0.04, 40.0).unwrap();
    let bx = free_energy_density(&p, &reg, 0.02, &grid, ChainBoundary::Box).unwrap();
    let tl = free_energy_density(&p, &reg, 0.02, &grid, ChainBoundary::Tail).unwrap();
    assert!(rel(bx.f_xy, tl.f_xy) < 1e-8, "{} vs {}", bx.f_xy, tl.f_xy);
    let e0 = bound_state(&p, &reg).unwrap().unwrap().energy;
    assert_eq!(tl.e0, Some(e0));
    assert!(rel(tl.f_xy, e0) < 0.05);
}

#[test]
fn box_free_energy_vanishes_like_inverse_square_size_below_threshold() {
    let p = p316();
    let reg = Regulator::square_well(1.0, g_minus() - 0.1).unwrap();
    let fs: Vec<f64> = [25.0, 50.0, 100.0, 200.0]
        .iter()
        .map(|&xm| {
            let grid = ChainGrid::aligned(1.0, 0.04, xm).unwrap();
            let r = free_energy_density(&p, &reg, 0.01, &grid, ChainBoundary::Box).unwrap();
            assert_eq!(r.phase, ChainPhase::Nonextensive);
            assert_eq!(r.e0, None);
            r.f_xy
        })
        .collect();
    for w in fs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..4.5).contains(&ratio), "{fs:?}");
    }
    let grid = ChainGrid::aligned(1.0, 0.04, 25.0).unwrap();
    let tail = free_energy_density(&p, &reg, 0.01, &grid, ChainBoundary::Tail).unwrap();
    assert_eq!(tail.f_xy, 0.0);
    assert_eq!(tail.phase, ChainPhase::Nonextensive);
}

#[test]
fn richardson_recovers_the_bound_state_energy() {
    let p = p316();
    let reg = Regulator::square_well(1.0, g_minus() + 0.3).unwrap();
    let grid = ChainGrid::aligned(1.0, 0.02, 20.0).unwrap();
    let r = free_energy_extrapolated(&p, &reg, 0.02, &grid, ChainBoundary::Tail).unwrap();
    let e0 = r.e0.unwrap();
    let raw = rel(r.levels[2], e0);
    let ext = rel(r.f_xy, e0);
    assert!((1.2..1.8).contains(&r.order), "order {}", r.order);
    assert!(ext < 1e-3 && ext < raw / 10.0, "raw {raw} extrapolated {ext}");
}

fn random_symmetric(n: usize, r: usize, vals: &[f64]) -> Banded {
    let mut a = Banded::zeros(n, r);
    let mut k = 0;
    for i in 0..n {
        for j in i..(i + r + 1).min(n) {
            let v = vals[k % vals.len()];
            k += 1;
            a.set(i, j, v);
            a.set(j, i, v);
        }
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn banded_inertia_matches_dense_eigenvalues(
        vals in prop::collection::vec(-1.0f64..1.0, 60),
        r in 1usize..4,
        shift in -2.0f64..2.0,
    ) {
        let n = 15;
        let a = random_symmetric(n, r, &vals);
        let dense = nalgebra::DMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) <= r { a.get(i, j) } else { 0.0 });
        let eig = dense.symmetric_eigenvalues();
        prop_assume!(eig.iter().all(|e| (e - shift).abs() > 1e-9));
        let above = eig.iter().filter(|&&e| e > shift).count();
        prop_assert_eq!(a.shifted_lu(shift).unwrap().negative_pivots, above);
    }

    #[test]
    fn banded_solve_inverts_shifted_matrix(vals in prop::collection::vec(-1.0f64..1.0, 60), r in 1usize..4) {
        let n = 20;
        let a = random_symmetric(n, r, &vals);
        let shift = a.norm_inf() + 1.0;
        let x: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let ax = a.matvec(&x);
        let rhs: Vec<f64> = x.iter().zip(&ax).map(|(xi, yi)| shift * xi - yi).collect();
        let y = a.shifted_lu(shift).unwrap().solve(&rhs);
        for (xi, yi) in x.iter().zip(&y) {
            prop_assert!((xi - yi).abs() < 1e-12);
        }
    }

    #[test]
    fn image_kernel_is_symmetric_and_below_free(x in 0.01f64..5.0, y in 0.01f64..5.0, t in 0.01f64..10.0) {
        let k = image_kernel(x, y, t);
        prop_assert!((k - image_kernel(y, x, t)).abs() <= 1e-15 * k.max(1e-300));
        prop_assert!(k >= 0.0 && k <= free_kernel(x, y, t));
    }

    #[test]
    fn fixed_seed_is_reproducible(seed in any::<u64>()) {
        let p = p316();
        let reg = Regulator::square_well(0.2, 1.0).unwrap();
        let s = PathEnsembleSpec::new(1.0, 0.5, 0.5, 16, 64, seed);
        prop_assert_eq!(feynman_kac(&p, &reg, &s).unwrap(), feynman_kac(&p, &reg, &s).unwrap());
    }
}
