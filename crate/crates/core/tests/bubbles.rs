use polyliouville::bubbles::{
    bubble_mass, rescaled, select_mu, standard_bubble, Ansatz, BubbleConfig, ExpandedProblem, ResidualMode,
};
use polyliouville::greens::GreenModel;
use polyliouville::mesh::Stencil;
use polyliouville::potential::Potential;
use polyliouville::report::loglog_slope;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn disc_problem(xi: Vec<Vec<f64>>, eps: f64) -> ExpandedProblem {
    let g = GreenModel::unit_disc();
    let v = Potential::constant(1.0);
    let c = BubbleConfig::select(&g, &v, xi, eps, 0.05).unwrap();
    let a = Ansatz::build(&c, &g, &v).unwrap();
    ExpandedProblem::new(&a, 0.1, ResidualMode::Analytic, Stencil::Second).unwrap()
}

fn shared_problem() -> &'static ExpandedProblem {
    static P: OnceLock<ExpandedProblem> = OnceLock::new();
    P.get_or_init(|| disc_problem(vec![vec![0.3, 0.1]], 0.2))
}

#[test]
fn centered_unit_bubble_value() {
    let v = standard_bubble(1, 1.0, 1.0, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
    assert!((v - 8f64.ln()).abs() < 1e-15);
}

#[test]
fn mass_scales_with_q() {
    for m in 1..=2u32 {
        let base = bubble_mass(m, 1.0, 1.0, 1e-12).unwrap().value;
        let doubled = bubble_mass(m, 2.0, 1.0, 1e-12).unwrap().value;
        assert!((doubled - 2.0 * base).abs() < 1e-8 * base);
    }
}

#[test]
fn heights_on_the_disc() {
    let g = GreenModel::unit_disc();
    let v = Potential::constant(1.0);
    assert_eq!(select_mu(&g, &v, &[vec![0.0, 0.0]]).unwrap(), vec![1.0]);
    let mu = select_mu(&g, &v, &[vec![0.0, 0.5]]).unwrap();
    assert!((mu[0] - 0.5625).abs() < 1e-14);
    let pair = select_mu(&g, &v, &[vec![0.45, 0.0], vec![-0.45, 0.0]]).unwrap();
    assert!((pair[0] - pair[1]).abs() < 1e-14);
}

#[test]
fn ansatz_vanishes_on_the_boundary() {
    let g = GreenModel::unit_disc();
    let v = Potential::constant(1.0);
    let c = BubbleConfig::select(&g, &v, vec![vec![0.45, 0.0], vec![-0.45, 0.0]], 0.1, 0.05).unwrap();
    let a = Ansatz::build(&c, &g, &v).unwrap();
    assert!(a.boundary_sup(256) < 1e-12);
}

#[test]
fn centered_disc_mass_near_quantized_value() {
    let g = GreenModel::unit_disc();
    let v = Potential::constant(1.0);
    let c = BubbleConfig::select(&g, &v, vec![vec![0.0, 0.0]], 0.05, 0.05).unwrap();
    let a = Ansatz::build(&c, &g, &v).unwrap();
    // radial integral of ρ² V e^U in log r
    let (t0, n) = (1e-9f64.ln(), 20_000);
    let dt = -t0 / n as f64;
    let mass: f64 = (0..=n)
        .map(|j| {
            let r = (t0 + j as f64 * dt).exp();
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            w * 2.0 * PI * r * r * a.nonlinearity(&[r, 0.0]) * dt
        })
        .sum();
    assert!((mass / (8.0 * PI) - 1.0).abs() < 0.03, "{mass}");
}

#[test]
fn nonlinear_term_vanishes_at_zero() {
    let p = shared_problem();
    assert!(p.nonlinear(&vec![0.0; p.n()]).iter().all(|v| *v == 0.0));
}

#[test]
fn correction_remainders_are_second_order_for_pairs() {
    let g = GreenModel::unit_disc();
    let v = Potential::constant(1.0);
    let eps = [0.2, 0.1, 0.05];
    let (mut near, mut far) = (Vec::new(), Vec::new());
    for e in eps {
        let c = BubbleConfig::select(&g, &v, vec![vec![0.45, 0.0], vec![-0.45, 0.0]], e, 0.25).unwrap();
        let r = Ansatz::build(&c, &g, &v).unwrap().remainders(0.02).unwrap();
        near.push(r.correction);
        far.push(r.far_field);
    }
    assert!(loglog_slope(&eps, &near) > 1.7);
    assert!(loglog_slope(&eps, &far) > 1.7);
}

#[test]
fn residual_decreases_with_eps() {
    let coarse = disc_problem(vec![vec![0.3, 0.1]], 0.1).residual_star();
    let fine = disc_problem(vec![vec![0.3, 0.1]], 0.05).residual_star();
    assert!(fine < 0.7 * coarse, "{coarse} {fine}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rescaling_maps_bubbles_to_bubbles(m in 1u32..=3, delta in 0.1f64..3.0, mu in 0.2f64..5.0, x0 in -2.0f64..2.0, x1 in -2.0f64..2.0) {
        let d = 2 * m as usize;
        let mut x = vec![0.0; d];
        x[0] = x0;
        x[1] = x1;
        let origin = vec![0.0; d];
        let lhs = rescaled(|y: &[f64]| standard_bubble(m, 1.0, delta, &origin, y).unwrap(), m, mu, &x);
        let rhs = standard_bubble(m, 1.0, delta / mu, &origin, &x).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-11 * (1.0 + rhs.abs()));
    }

    #[test]
    fn nonlinear_term_is_quadratic(s in -1.0f64..1.0) {
        let p = shared_problem();
        let n = p.nonlinear(&vec![s; p.n()]);
        let g = s.exp() - s - 1.0;
        for (v, t) in n.iter().zip(&p.t).step_by(97) {
            prop_assert!((v - t * g).abs() <= 1e-12 * (1.0 + t.abs()));
            prop_assert!(v.abs() <= 0.5 * t * s * s * s.abs().exp() + 1e-300);
        }
    }
}
