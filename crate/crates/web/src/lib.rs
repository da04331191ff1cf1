//! WebAssembly bindings for the demo page in `www/`.
//!
//! Every export takes plain numbers or strings and returns a JSON string,
//! so the page needs no generated TypeScript types.

use gscfw::problems::toys::example_one;
use gscfw::problems::{
    covariance_generator, covariance_problem, logistic_problem, portfolio_generator, portfolio_problem,
    synthetic_classification, ProblemInstance,
};
use gscfw::solvers::{Method, SolverConfig, Status, StepKind};
use gscfw::stepsize::{psi, psi_at_tstar, psi_lower_bound, t_star, PsiParams};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Upper bound on solver iterations requested from the page.
pub const MAX_DEMO_ITER: usize = 20_000;

#[derive(Debug, Serialize)]
pub struct StepReport {
    pub nu: f64,
    pub t_star: f64,
    pub psi_star: f64,
    pub lower_bound: f64,
    /// `(t, ψ(t))` samples on `[0, t_max]`.
    pub curve: Vec<(f64, f64)>,
}

/// `t*`, `ψ(t*)`, its lower bound and a sampled curve of `ψ`.
pub fn step_report(delta: f64, xi: f64, nu: f64, samples: usize) -> Result<StepReport, String> {
    let p = PsiParams::new(delta, xi, nu).map_err(|e| e.to_string())?;
    let ts = t_star(&p).map_err(|e| e.to_string())?;
    let psi_star = psi_at_tstar(&p).map_err(|e| e.to_string())?;
    let lower_bound = psi_lower_bound(&p).map_err(|e| e.to_string())?;
    // plot up to 2 t*, staying inside the domain of ω for ν > 2
    let mut t_max = 2.0 * ts;
    if p.nu() > 2.0 {
        t_max = t_max.min(0.999 / delta);
    }
    let n = samples.clamp(2, 2000);
    let curve = (0..n)
        .map(|i| {
            let t = t_max * i as f64 / (n - 1) as f64;
            psi(&p, t).map(|v| (t, v)).map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    Ok(StepReport {
        nu: p.nu(),
        t_star: ts,
        psi_star,
        lower_bound,
        curve,
    })
}

/// Demo problems: `example-one`, `portfolio`, `logistic` or `covariance`.
pub fn demo_problem(name: &str, size: usize, seed: u64) -> Result<ProblemInstance, String> {
    let size = size.clamp(2, 400);
    match name {
        "example-one" => Ok(example_one()),
        "portfolio" => portfolio_problem(portfolio_generator(2 * size, size, seed), 2 * size, size),
        "logistic" => {
            let p = 4 * size;
            logistic_problem(synthetic_classification(p, size, 0.3, seed), 1.0 / p as f64, 10.0, 3)
        }
        "covariance" => {
            let p = size.min(20);
            covariance_problem(covariance_generator(p, seed), p)
        }
        other => return Err(format!("unknown problem `{other}`")),
    }
    .map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub problem: String,
    pub method: Method,
    pub status: Status,
    pub iterations: usize,
    pub f: Vec<f64>,
    pub gap: Vec<f64>,
    pub steps: Vec<Option<StepKind>>,
    pub final_value: f64,
}

pub fn solve_report(problem: &str, method: &str, size: usize, seed: u64, max_iter: usize) -> Result<SolveReport, String> {
    let inst = demo_problem(problem, size, seed)?;
    let method: Method = method.parse().map_err(|e: gscfw::Error| e.to_string())?;
    if !inst.supports(method) {
        return Err(format!("{method} cannot run on {problem}"));
    }
    let cfg = SolverConfig {
        epsilon: 1e-8,
        max_iter: max_iter.clamp(1, MAX_DEMO_ITER),
        seed,
        ..Default::default()
    };
    let x0 = inst.start(seed).map_err(|e| e.to_string())?;
    let tr = inst.solve(method, &x0, &cfg).map_err(|e| e.to_string())?;
    Ok(SolveReport {
        problem: inst.name.clone(),
        method,
        status: tr.status,
        iterations: tr.iterations(),
        f: tr.values().collect(),
        gap: tr.records.iter().map(|r| r.gap).collect(),
        steps: tr.records.iter().map(|r| r.step_kind).collect(),
        final_value: tr.final_value(),
    })
}

fn to_json<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

/// JSON of [`StepReport`].
#[wasm_bindgen(js_name = stepSize)]
pub fn step_size(delta: f64, xi: f64, nu: f64) -> Result<String, JsError> {
    to_json(step_report(delta, xi, nu, 200))
}

/// JSON of [`SolveReport`].
#[wasm_bindgen]
pub fn solve(problem: &str, method: &str, size: usize, seed: u32, max_iter: usize) -> Result<String, JsError> {
    to_json(solve_report(problem, method, size, seed as u64, max_iter))
}

/// JSON array of the method names.
#[wasm_bindgen]
pub fn methods() -> String {
    serde_json::to_string(&Method::ALL.map(Method::name)).expect("static names")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_report_matches_the_kernels() {
        let r = step_report(1.0, 1.0, 3.0, 50).unwrap();
        assert!((r.t_star - 0.5).abs() < 1e-15);
        assert!((r.psi_star - (1.0 - 2f64.ln())).abs() < 1e-12);
        assert_eq!(r.curve.len(), 50);
        assert!(r.curve.iter().all(|&(_, v)| v <= r.psi_star + 1e-12));
        assert!(r.curve.last().unwrap().0 < 1.0);
        assert!(step_report(1.0, 1.0, 3.5, 10).is_err());
        assert!(step_report(0.0, 0.0, 2.0, 10).is_err());
    }

    #[test]
    fn solves_the_demo_problems() {
        let r = solve_report("example-one", "fwgsc", 0, 0, 100).unwrap();
        assert!((r.final_value - 2.0 * 2f64.ln()).abs() < 1e-8);
        assert_eq!(r.status, Status::GapConverged);
        let std = solve_report("example-one", "fw-standard", 0, 0, 100).unwrap();
        assert_eq!(std.steps[0], Some(StepKind::Zero));
        for (p, m) in [("portfolio", "asfwgsc"), ("logistic", "mbtfwgsc"), ("covariance", "lbtfwgsc")] {
            let r = solve_report(p, m, 6, 1, 200).unwrap();
            assert_eq!(r.f.len(), r.iterations + 1);
            assert!(r.f.windows(2).all(|w| w[1] <= w[0] + 1e-12 * (1.0 + w[0].abs())));
        }
        assert!(solve_report("nope", "fwgsc", 4, 0, 10).is_err());
        assert!(solve_report("portfolio", "newton", 4, 0, 10).is_err());
        assert!(solve_report("covariance", "fwlloo", 4, 0, 10).is_err());
    }

    #[test]
    fn method_list() {
        let names: Vec<String> = serde_json::from_str(&methods()).unwrap();
        assert_eq!(names.len(), 7);
        assert_eq!(names[2], "fwgsc");
    }
}
