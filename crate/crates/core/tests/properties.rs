use gscfw::gsc::{descent_bounds, omega, GscSpec, LocalGeometry};
use gscfw::linalg::{along, sub};
use gscfw::problems::{
    covariance_generator, covariance_problem, dwd_problem, logistic_problem, portfolio_generator, portfolio_problem,
    synthetic_classification, DwdParams, ProblemInstance,
};
use gscfw::solvers::{Method, SolverConfig, StepKind};
use gscfw::stepsize::{analytic_step, t_star, PsiParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn nu_grid() -> Vec<f64> {
    (0..=10).map(|i| 2.0 + 0.1 * i as f64).collect()
}

fn instances() -> Vec<ProblemInstance> {
    vec![
        logistic_problem(synthetic_classification(30, 8, 0.5, 1), 1.0 / 30.0, 10.0, 2).unwrap(),
        logistic_problem(synthetic_classification(30, 8, 0.5, 1), 1.0 / 30.0, 10.0, 3).unwrap(),
        portfolio_problem(portfolio_generator(40, 6, 2), 40, 6).unwrap(),
        dwd_problem(synthetic_classification(10, 3, 1.0, 3), &DwdParams::default()).unwrap(),
        covariance_problem(covariance_generator(3, 4), 3).unwrap(),
    ]
}

/// A start mixed towards a random oracle vertex, kept inside the domain.
fn interior(inst: &ProblemInstance, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let x0 = inst.start(rng.random()).unwrap();
    let c: Vec<f64> = (0..inst.dim()).map(|_| rng.random::<f64>() - 0.5).collect();
    let v = sub(&inst.set.lmo(&c).point, &x0);
    let t = 0.5 * rng.random::<f64>() * inst.objective.max_step(&x0, &v);
    along(&x0, t, &v)
}

#[test]
fn omega_is_nonnegative_and_midpoint_convex() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for nu in nu_grid() {
        let hi = if nu > 2.0 { 0.999 } else { 20.0 };
        for _ in 0..1000 {
            let mut t = [0.0; 3];
            t.iter_mut().for_each(|v| *v = -5.0 + (hi + 5.0) * rng.random::<f64>());
            t.sort_by(f64::total_cmp);
            let w: Vec<f64> = t.iter().map(|&s| omega(nu, s).unwrap()).collect();
            assert!(w.iter().all(|&v| v >= 0.0));
            // the chord at t₂ lies above the curve
            let lam = (t[2] - t[1]) / (t[2] - t[0]).max(f64::MIN_POSITIVE);
            let chord = lam * w[0] + (1.0 - lam) * w[2];
            assert!(w[1] <= chord + 1e-12 * (1.0 + chord), "ν = {nu}, t = {t:?}");
        }
    }
}

#[test]
fn omega_tends_to_one_half() {
    // ω′(0) is 1/6 at ν = 2 and 1/(3(ν − 2)) above it, so the deviation is linear in t
    for nu in nu_grid() {
        let slope = if nu == 2.0 { 1.0 / 6.0 } else { 1.0 / (3.0 * (nu - 2.0)) };
        for k in 4..16 {
            for t in [10f64.powi(-k), -(10f64.powi(-k))] {
                let dev = (omega(nu, t).unwrap() - 0.5).abs();
                assert!(dev <= 1.01 * slope * t.abs() + 1e-15, "ν = {nu}, t = {t}");
            }
        }
    }
}

#[test]
fn omega_and_step_are_continuous_in_nu() {
    assert!((omega(2.999, 0.3).unwrap() - omega(3.0, 0.3).unwrap()).abs() < 1e-3);
    for (delta, xi) in [(0.5, 2.0), (3.0, 0.1), (0.01, 10.0)] {
        let ta = t_star(&PsiParams::new(delta, xi, 3.0 - 1e-7).unwrap()).unwrap();
        let tb = t_star(&PsiParams::new(delta, xi, 3.0).unwrap()).unwrap();
        assert!((ta - tb).abs() <= 1e-4 * tb, "δ = {delta}, ξ = {xi}: {ta} vs {tb}");
    }
}

#[test]
fn steps_are_continuous_at_nu_two_for_fixed_geometry() {
    // δ_ν carries a factor (ν/2 − 1), so the limit only exists for fixed (β, e, gap)
    for (beta, e, gap) in [(1.0, 0.5, 0.3), (0.2, 2.0, 1.0), (3.0, 0.1, 0.01)] {
        let step = |nu: f64| {
            let spec = GscSpec::new(1.5, nu).unwrap();
            let geom = LocalGeometry::new(&spec, beta, e, gap);
            analytic_step(&spec, &geom, f64::INFINITY).unwrap().unwrap().t_star
        };
        let (a, b) = (step(2.0 + 1e-7), step(2.0));
        assert!((a - b).abs() <= 1e-4 * b, "β = {beta}, e = {e}: {a} vs {b}");
    }
}

#[test]
fn descent_sandwich_and_dikin_safeguard() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for inst in instances() {
        let f = &*inst.objective;
        for _ in 0..40 {
            let x = interior(&inst, &mut rng);
            let c: Vec<f64> = (0..inst.dim()).map(|_| rng.random::<f64>() - 0.5).collect();
            let v = sub(&inst.set.lmo(&c).point, &x);
            for scale in [1e-3, 0.05, 0.3, 1.0, 5.0] {
                let y = along(&x, scale, &v);
                if !f.in_domain(&y) {
                    // a point outside the domain can never be inside the Dikin region
                    if f.spec().nu() > 2.0 {
                        let e = f.local_norm_sq(&x, &sub(&y, &x)).sqrt();
                        let d = gscfw::gsc::d_nu(&f.spec(), gscfw::linalg::norm2(&sub(&y, &x)), e);
                        assert!(d >= 1.0, "{}: d = {d} but y is outside the domain", inst.name);
                    }
                    continue;
                }
                let b = descent_bounds(f, &x, &y).unwrap();
                let fy = f.value(&y);
                let tol = 1e-8 * (1.0 + fy.abs());
                assert!(b.lower <= fy + tol, "{}: lower {} > {fy}", inst.name, b.lower);
                if let Some(u) = b.upper {
                    assert!(fy <= u + tol, "{}: {fy} > upper {u}", inst.name);
                }
            }
        }
    }
}

#[test]
fn oracle_vertex_ids_are_stable_across_problems() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for inst in instances().into_iter().filter(|i| i.set.is_polytope()) {
        for _ in 0..50 {
            let c: Vec<f64> = (0..inst.dim()).map(|_| rng.random::<f64>() - 0.5).collect();
            assert_eq!(inst.set.lmo(&c).id, inst.set.lmo(&c.clone()).id);
        }
    }
}

fn run_checks(inst: &ProblemInstance, method: Method, seed: u64) -> Result<(), TestCaseError> {
    let cfg = SolverConfig {
        epsilon: 1e-7,
        max_iter: 150,
        record_iterates: true,
        ..Default::default()
    };
    let x0 = inst.start(seed).unwrap();
    let tr = inst.solve(method, &x0, &cfg).unwrap();
    for x in &tr.iterates {
        prop_assert!(inst.set.contains(x), "{} {method}: infeasible iterate", inst.name);
        prop_assert!(inst.objective.in_domain(x), "{} {method}: iterate outside the domain", inst.name);
    }
    if method.is_monotone() {
        for w in tr.records.windows(2) {
            prop_assert!(w[1].f <= w[0].f + 1e-12 * (1.0 + w[0].f.abs()), "{} {method}: f increased", inst.name);
        }
    }
    if inst.objective.spec().nu() > 2.0 {
        for r in &tr.records {
            if let Some(d) = r.dikin {
                prop_assert!(d < 1.0, "{} {method}: α M δ = {d}", inst.name);
            }
        }
    }
    if method == Method::Fwgsc {
        for w in tr.records.windows(2) {
            let pred = w[0].predicted.unwrap();
            prop_assert!(w[0].f - w[1].f >= pred - 1e-9 * (1.0 + w[0].f.abs()));
        }
    }
    if let Some(last) = tr.records.last() {
        if tr.status == gscfw::solvers::Status::GapConverged {
            prop_assert!(last.gap <= cfg.epsilon);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solver_invariants_on_benchmark_problems(seed in 0u64..10_000) {
        for inst in instances() {
            for method in Method::ALL {
                if inst.supports(method) {
                    run_checks(&inst, method, seed)?;
                }
            }
        }
    }
}

#[test]
fn away_steps_decrease_geometrically_on_the_simplex() {
    let inst = portfolio_problem(portfolio_generator(500, 50, 5), 500, 50).unwrap();
    let cfg = SolverConfig {
        epsilon: 1e-13,
        max_iter: 400,
        ..Default::default()
    };
    let x0 = inst.start(1).unwrap();
    let long = inst.solve(Method::Asfwgsc, &x0, &SolverConfig { max_iter: 4000, epsilon: 1e-14, ..cfg.clone() }).unwrap();
    let f_star = long.best_value();
    let tr = inst.solve(Method::Asfwgsc, &x0, &cfg).unwrap();
    let h: Vec<f64> = tr.values().map(|f| f - f_star).collect();
    let k = h.len() - 1;
    assert!(k >= 40, "converged too fast to measure: {k} iterations");
    // past burn-in, the error at K is a fraction of the error at K/2
    let (a, b) = (h[k / 4], h[k / 2]);
    assert!(b <= 0.5 * a || b <= 1e-12 * (1.0 + f_star.abs()), "h(K/4) = {a}, h(K/2) = {b}");
    assert!(tr.records.iter().any(|r| matches!(r.step_kind, Some(StepKind::Away | StepKind::Drop))));
}
