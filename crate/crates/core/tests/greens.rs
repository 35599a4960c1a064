use polyliouville::domain::Domain;
use polyliouville::error::Error;
use polyliouville::greens::{navier, BoundaryCondition, GreenMethod, GreenModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_disc_point(rng: &mut ChaCha8Rng, rmax: f64) -> Vec<f64> {
    loop {
        let p = vec![rng.gen_range(-rmax..rmax), rng.gen_range(-rmax..rmax)];
        if p[0].hypot(p[1]) < rmax {
            return p;
        }
    }
}

#[test]
fn disc_reference_values() {
    let g = GreenModel::unit_disc();
    assert!((g.green(&[0.5, 0.0], &[-0.5, 0.0]).unwrap() - 0.8926).abs() < 1e-4);
    assert!((g.regular(&[0.5, 0.0], &[0.5, 0.0]).unwrap() - (-1.1507)).abs() < 1e-4);
    assert_eq!(g.regular(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
    assert_eq!(g.green(&[0.1, 0.0], &[0.1, 0.0]), Err(Error::SingularEvaluation));
    assert!(matches!(g.green(&[1.5, 0.0], &[0.1, 0.0]), Err(Error::OutsideDomain { .. })));
    let grad = g.robin_gradient(&[0.5, 0.0]).unwrap();
    assert!((grad[0] + 5.3333).abs() < 1e-4 && grad[1] == 0.0);
    assert_eq!(g.robin_gradient(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
}

#[test]
fn grid_green_matches_images_on_disc() {
    let disc = Domain::unit_disc();
    let grid = GreenModel::with_method(1, BoundaryCondition::Dirichlet, &disc, GreenMethod::Grid2d, Some(1.0 / 128.0)).unwrap();
    let exact = GreenModel::unit_disc();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = random_disc_point(&mut rng, 0.9);
        let xi = random_disc_point(&mut rng, 0.9);
        if (x[0] - xi[0]).hypot(x[1] - xi[1]) < 1e-3 {
            continue;
        }
        let d = (grid.green(&x, &xi).unwrap() - exact.green(&x, &xi).unwrap()).abs();
        worst = worst.max(d);
    }
    println!("max |G_grid - G_images| = {worst:e}");
    assert!(worst < 1e-3);
}

#[test]
fn near_diagonal_log_coefficient() {
    for (m, method) in [(1, GreenMethod::DiscImages), (2, GreenMethod::BoggioBall), (3, GreenMethod::BoggioBall), (2, GreenMethod::NavierBallIterated)] {
        let dom = Domain::unit_ball(2 * m as usize);
        let bc = if method == GreenMethod::NavierBallIterated { BoundaryCondition::Navier } else { BoundaryCondition::Dirichlet };
        let g = GreenModel::with_method(m, bc, &dom, method, None).unwrap();
        let mut xi = vec![0.0; 2 * m as usize];
        xi[0] = 0.2;
        xi[1] = -0.1;
        let at = |r: f64| {
            let mut x = xi.clone();
            x[1] += r;
            g.green(&x, &xi).unwrap()
        };
        let coeff = (at(1e-4) - at(1e-3)) / (10f64).ln();
        assert!((coeff - 4.0 * m as f64).abs() < 1e-3, "m={m} {method:?}: {coeff}");
        // the remainder stays bounded
        for r in [1e-2, 1e-3, 1e-4] {
            let rem = at(r) - 4.0 * m as f64 * (1.0 / r).ln();
            assert!(rem.abs() < 50.0);
        }
    }
}

#[test]
fn navier_symmetry_and_order_one_coincidence() {
    let ball = Domain::unit_ball(4);
    let g = GreenModel::new(2, BoundaryCondition::Navier, &ball, None).unwrap();
    assert_eq!(g.method(), GreenMethod::NavierBallIterated);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let mut p = || loop {
            let v: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.8..0.8)).collect();
            if v.iter().map(|a| a * a).sum::<f64>() < 0.64 {
                return v;
            }
        };
        let (x, xi) = (p(), p());
        let a = g.green(&x, &xi).unwrap();
        let b = g.green(&xi, &x).unwrap();
        assert!((a - b).abs() < 1e-5 * a.abs().max(1.0));
    }
    // radial source: compare with a one-dimensional double-integral oracle
    // G(x, 0) = 64π²/(2π²) ∫∫ g(r,t) g(t,0) t³ dt with g the radial Dirichlet kernel
    let oracle = |r: f64| {
        let g0 = |a: f64, b: f64| {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let _ = lo;
            (hi.powi(-2) - 1.0) / 2.0
        };
        let f = |t: f64| g0(r, t) * g0(t, 0.0) * t.powi(3);
        let e1 = polyliouville::quadrature::integrate(f, 0.0, r, 1e-14, 1e-12).unwrap().value;
        let e2 = polyliouville::quadrature::integrate(f, r, 1.0, 1e-14, 1e-12).unwrap().value;
        32.0 * (e1 + e2)
    };
    for r in [0.2, 0.6] {
        let v = g.green(&[r, 0.0, 0.0, 0.0], &[0.0; 4]).unwrap();
        assert!((v - oracle(r)).abs() < 1e-6 * v.abs(), "{v} {}", oracle(r));
    }
    // m = 1: Navier and Dirichlet data coincide
    let d = GreenModel::new(1, BoundaryCondition::Navier, &Domain::unit_disc(), None).unwrap();
    assert_eq!(d.green(&[0.3, 0.1], &[-0.2, 0.4]).unwrap(), GreenModel::unit_disc().green(&[0.3, 0.1], &[-0.2, 0.4]).unwrap());
    let _ = navier::iterated_mode(0, 0.5, 0.5);
}

#[test]
fn robin_monotone_and_concave_on_disc() {
    let g = GreenModel::unit_disc();
    let vals: Vec<f64> = (1..=9).map(|i| g.robin(&[0.1 * i as f64, 0.0]).unwrap()).collect();
    for w in vals.windows(2) {
        assert!(w[1] < w[0]);
    }
    for w in vals.windows(3) {
        assert!(w[0] + w[2] - 2.0 * w[1] < 0.0);
    }
}

#[test]
fn square_center_regular_part() {
    let sq = Domain::unit_square();
    let g = GreenModel::new(1, BoundaryCondition::Dirichlet, &sq, Some(1.0 / 128.0)).unwrap();
    let h = g.robin(&[0.0, 0.0]).unwrap();
    let reference = square_center_oracle();
    println!("grid H(c,c) = {h}, oracle = {reference}");
    assert!((h - reference).abs() < 1e-3);
    let grad = g.robin_gradient(&[0.0, 0.0]).unwrap();
    assert!(grad.iter().all(|v| v.abs() < 1e-8), "{grad:?}");
}

/// Harmonic extension of `4 log|b|` from the boundary of `[-1/2, 1/2]²` evaluated at the
/// center: four times the solution with data on one side only, by a sine series.
fn square_center_oracle() -> f64 {
    let g = |s: f64| 2.0 * ((s - 0.5).powi(2) + 0.25).ln();
    let mut total = 0.0;
    for n in (1..80).step_by(2) {
        let k = n as f64 * std::f64::consts::PI;
        let b = 2.0
            * polyliouville::quadrature::integrate(|s| g(s) * (k * s).sin(), 0.0, 1.0, 1e-14, 1e-12)
                .unwrap()
                .value;
        let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
        total += b * sign * (k * 0.5).sinh() / k.sinh();
    }
    4.0 * total
}
