use polyliouville::bubbles::{Ansatz, BubbleConfig, ExpandedProblem, ResidualMode};
use polyliouville::config::{ProblemConfig, Tolerances};
use polyliouville::error::Error;
use polyliouville::greens::GreenModel;
use polyliouville::linearized::ProjectedSolver;
use polyliouville::mesh::Stencil;
use polyliouville::potential::Potential;
use polyliouville::reduction::{construct_candidate, construct_solution, solve_intermediate, solve_intermediate_with, theta, ReductionOptions};
use polyliouville::search::SearchOptions;
use proptest::prelude::*;
use std::sync::OnceLock;

struct Setup {
    problem: ExpandedProblem,
    solver: ProjectedSolver,
    opts: ReductionOptions,
}

fn setup() -> &'static Setup {
    static S: OnceLock<Setup> = OnceLock::new();
    S.get_or_init(|| {
        let g = GreenModel::unit_disc();
        let v = Potential::constant(1.0);
        let c = BubbleConfig::select(&g, &v, vec![vec![0.3, 0.1]], 0.1, 0.05).unwrap();
        let a = Ansatz::build(&c, &g, &v).unwrap();
        let problem = ExpandedProblem::new(&a, 0.1, ResidualMode::Analytic, Stencil::Second).unwrap();
        let solver = ProjectedSolver::with_r0(&problem, 5.0).unwrap();
        Setup { problem, solver, opts: ReductionOptions { r0: 5.0, ..ReductionOptions::default() } }
    })
}

fn disc(k: usize, eps: f64, delta0: f64) -> ProblemConfig {
    serde_json::from_str(&format!(r#"{{"domain":{{"kind":"unit_ball"}},"k":{k},"eps":{eps},"delta0":{delta0}}}"#)).unwrap()
}

#[test]
fn off_center_fixed_point_converges() {
    let s = setup();
    let r = solve_intermediate(&s.problem, &s.solver, &s.opts).unwrap();
    assert!(r.iterations <= 20, "{}", r.iterations);
    assert!(r.phi_sup > 0.0);
    let th = theta(&s.problem, &s.solver, &r.phi);
    assert!(th.is_finite());
}

#[test]
fn centered_disc_solution_is_accepted() {
    let r = construct_solution(&disc(1, 0.05, 0.25), &Tolerances::default(), &SearchOptions::default()).unwrap();
    let d = &r.diagnostics;
    assert!(r.accepted());
    assert!(d.xi[0][0].hypot(d.xi[0][1]) < 1e-6);
    assert!((d.mass_ratio - 1.0).abs() < 0.05);
    assert!(d.sup_near > 2.0 * d.sup_far, "{} {}", d.sup_near, d.sup_far);
    assert!(d.theta.abs() < 1e-6, "{}", d.theta);
}

#[test]
fn mass_grows_as_eps_shrinks() {
    let masses: Vec<f64> = [0.08, 0.05, 0.03]
        .iter()
        .map(|&e| construct_candidate(&disc(1, e, 0.05), &Tolerances::default(), &SearchOptions::default()).unwrap().diagnostics.mass)
        .collect();
    assert!(masses.windows(2).all(|w| w[1] > w[0]), "{masses:?}");
    assert!(masses[2] < 8.0 * std::f64::consts::PI);
}

#[test]
fn disc_pair_has_no_critical_point() {
    let e = construct_candidate(&disc(2, 0.05, 0.05), &Tolerances::default(), &SearchOptions { random_starts: 8, ..SearchOptions::default() });
    assert!(matches!(e, Err(Error::NoCriticalPoint(_))), "{:?}", e.err());
}

#[test]
fn higher_order_reduction_is_unsupported() {
    let cfg: ProblemConfig = serde_json::from_str(r#"{"m":2,"domain":{"kind":"unit_ball"},"k":1}"#).unwrap();
    let e = construct_candidate(&cfg, &Tolerances::default(), &SearchOptions::default());
    assert!(matches!(e, Err(Error::Unsupported(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn fixed_point_scales_with_the_error(s in 0.0f64..1.0) {
        let st = setup();
        let full = solve_intermediate(&st.problem, &st.solver, &st.opts).unwrap();
        let r: Vec<f64> = st.problem.r.iter().map(|v| s * v).collect();
        let sol = solve_intermediate_with(&st.problem, &st.solver, &r, &st.opts).unwrap();
        prop_assert!(sol.phi_sup <= 1.5 * s * full.phi_sup + 1e-300);
        prop_assert!(sol.iterations <= full.iterations);
    }
}
