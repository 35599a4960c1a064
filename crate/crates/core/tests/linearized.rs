use polyliouville::bubbles::{Ansatz, BubbleConfig, ExpandedProblem, ResidualMode};
use polyliouville::greens::GreenModel;
use polyliouville::linearized::{cutoff, kernel_count, spectral_table, sphere_spectral_check, KernelBasis, ProjectedSolver};
use polyliouville::mesh::Stencil;
use polyliouville::potential::Potential;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

struct Setup {
    problem: ExpandedProblem,
    solver: ProjectedSolver,
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
        Setup { problem, solver }
    })
}

fn random_rhs(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

#[test]
fn zero_data_gives_zero_solution() {
    let s = setup();
    let r = s.solver.solve(&vec![0.0; s.solver.n()]).unwrap();
    assert!(r.phi.iter().all(|v| *v == 0.0));
    assert!(r.c.iter().flatten().all(|v| *v == 0.0));
}

#[test]
fn solutions_satisfy_the_constraints() {
    let s = setup();
    for rhs in [s.problem.r.clone(), random_rhs(1, s.solver.n())] {
        let r = s.solver.solve(&rhs).unwrap();
        assert!(r.orthogonality < 1e-10, "{}", r.orthogonality);
        let scale = s.problem.star(&rhs);
        assert!(r.linear_residual < 1e-8 * scale, "{} vs {scale}", r.linear_residual);
    }
}

#[test]
fn rejects_malformed_right_hand_sides() {
    let s = setup();
    assert!(s.solver.solve(&[0.0; 3]).is_err());
    let mut bad = vec![0.0; s.solver.n()];
    bad[7] = f64::NAN;
    assert!(s.solver.solve(&bad).is_err());
}

#[test]
fn sphere_spectrum_matches_only_first_harmonics() {
    for c in spectral_table(6, 10).unwrap() {
        assert_eq!(c.matches, c.k_index == 1, "m={} k={}", c.m, c.k_index);
    }
    let c = sphere_spectral_check(2, 1).unwrap();
    assert_eq!((c.lambda, c.product, c.t_m), (4, 24, 24));
    assert!(sphere_spectral_check(7, 1).is_err());
    assert!(sphere_spectral_check(1, 11).is_err());
}

#[test]
fn three_near_zero_modes_on_the_plane() {
    let k = kernel_count(12.0, 0.25, 0.25).unwrap();
    assert_eq!(k.near_zero, 3, "{:?}", k.eigenvalues);
}

#[test]
fn cutoff_profile() {
    assert_eq!(cutoff(3.0, 5.0), 1.0);
    assert_eq!(cutoff(6.5, 5.0), 0.0);
    assert!((cutoff(5.5, 5.0) - 0.5).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn projected_solve_is_linear(a in -3.0f64..3.0, s1 in 0u64..1000, s2 in 0u64..1000) {
        let s = setup();
        let (r1, r2) = (random_rhs(s1, s.solver.n()), random_rhs(s2, s.solver.n()));
        let combo: Vec<f64> = r1.iter().zip(&r2).map(|(x, y)| a * x + y).collect();
        let (p1, p2, pc) = (s.solver.solve(&r1).unwrap(), s.solver.solve(&r2).unwrap(), s.solver.solve(&combo).unwrap());
        let scale = pc.phi_sup.max(p1.phi_sup).max(1.0);
        for k in (0..s.solver.n()).step_by(101) {
            prop_assert!((pc.phi[k] - a * p1.phi[k] - p2.phi[k]).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn kernel_modes_solve_the_linearized_equation(mu in 0.3f64..3.0, x in -4.0f64..4.0, y in -4.0f64..4.0) {
        let basis = KernelBasis::new(1, vec![mu], vec![vec![0.0, 0.0]], 10.0).unwrap();
        let h = 1e-3;
        let weight = 8.0 * mu * mu / (mu * mu + x * x + y * y).powi(2);
        for j in 0..=2 {
            let z = |a: f64, b: f64| basis.eval_local(0, j, &[a, b]).unwrap();
            let lap = (z(x + h, y) + z(x - h, y) + z(x, y + h) + z(x, y - h) - 4.0 * z(x, y)) / (h * h);
            prop_assert!((-lap - weight * z(x, y)).abs() < 1e-4, "j={}", j);
        }
    }
}
