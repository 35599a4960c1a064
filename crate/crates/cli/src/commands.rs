//! Subcommand implementations.

use crate::output::Output;
use crate::run_config::RunConfig;
use polyliouville::bubbles::{residual_star_rays, Ansatz, BubbleConfig, ExpandedProblem};
use polyliouville::config::ProblemConfig;
use polyliouville::constants::{appendix_integral_oracle, AppendixIntegral, ExactConstants};
use polyliouville::domain::DomainSpec;
use polyliouville::greens::GreenModel;
use polyliouville::linearized::{kernel_count, spectral_table};
use polyliouville::reduced::{expansion_check, phi_k};
use polyliouville::reduction::construct_candidate;
use polyliouville::report::{loglog_slope, Cell};
use polyliouville::search::{
    check_linking_level, find_minimum, LinkingMode, LinkingOptions, LinkingOutcome, PhiObjective, PointKind,
    SearchRegion, SearchResult,
};
use polyliouville::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

pub enum Failure {
    Config(String),
    Numeric { message: String, diagnostic: Value },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config_error() || matches!(e, Error::Io(_)) {
            Failure::Config(e.to_string())
        } else {
            let kind = format!("{e:?}");
            let kind = kind.split(['(', ' ', '{']).next().unwrap_or("").to_string();
            Failure::Numeric { message: e.to_string(), diagnostic: json!({ "kind": kind }) }
        }
    }
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Config(s)
    }
}

pub type CmdResult = Result<(), Failure>;

fn analytic(p: &ProblemConfig) -> bool {
    matches!(p.domain, DomainSpec::UnitBall)
}

fn flat(xi: &[Vec<f64>]) -> Vec<f64> {
    xi.iter().flatten().copied().collect()
}

fn point_header(prefix: &str, k: usize, d: usize) -> Vec<String> {
    (1..=k).flat_map(|i| (1..=d).map(move |a| format!("{prefix}{i}_{a}"))).collect()
}

fn minimum(cfg: &RunConfig, p: &ProblemConfig, green: &GreenModel) -> Result<SearchResult, Failure> {
    let domain = p.domain()?;
    let region = SearchRegion::new(&domain, p.k, p.delta0)?;
    let obj = PhiObjective { green, potential: &p.potential };
    let seeds: Vec<Vec<f64>> = p.seed_xi.iter().map(|s| flat(s)).collect();
    Ok(find_minimum(&region, &obj, &seeds, &cfg.search_options(analytic(p)))?)
}

/// The configuration used by `residual` and `energy`: `seed_xi`, else the minimum of `φ_k`.
fn configuration(cfg: &RunConfig, p: &ProblemConfig, green: &GreenModel) -> Result<Vec<Vec<f64>>, Failure> {
    if let Some(xi) = &p.seed_xi {
        return Ok(xi.clone());
    }
    let r = minimum(cfg, p, green)?;
    if r.best.kind == PointKind::BoundaryRejected {
        return Err(Error::NoCriticalPoint("phi_k has no interior minimum; set problem.seed_xi".into()).into());
    }
    Ok(r.best.xi)
}

pub fn constants(cfg: &RunConfig, out: &mut Output) -> CmdResult {
    let mut rows = Vec::new();
    let mut docs = Vec::new();
    for &m in &cfg.constants.orders {
        let e = ExactConstants::for_order(m)?;
        let c = polyliouville::constants(m as i64)?;
        let quad = |w| appendix_integral_oracle(m, w, 1e-10).ok();
        let (q0, q1) = (quad(AppendixIntegral::C0), quad(AppendixIntegral::C1));
        rows.push(vec![
            Cell::from(m as usize),
            c.omega2m.into(),
            c.lambda2m.into(),
            c.alpha2m.into(),
            c.bm.into(),
            c.c0.into(),
            c.c1.into(),
            c.tm.into(),
            q0.map_or(f64::NAN, |q| q.value).into(),
            q1.map_or(f64::NAN, |q| q.value).into(),
        ]);
        docs.push(json!({
            "m": m,
            "dimension": 2 * m,
            "values": c,
            "exact": {
                "omega": e.omega2m.to_string(),
                "lambda": e.lambda2m.to_string(),
                "alpha": e.alpha2m.to_string(),
                "b": e.bm.to_string(),
                "c0": e.c0.to_string(),
                "c1": e.c1.to_string(),
                "t_m": e.tm.to_string(),
            },
            "quadrature": {
                "c0": q0.map(|q| json!({"value": q.value, "error": q.error})),
                "c1": q1.map(|q| json!({"value": q.value, "error": q.error})),
            },
        }));
    }
    out.csv(
        "constants.csv",
        &["m", "omega", "lambda", "alpha", "b", "c0", "c1", "t_m", "c0_quadrature", "c1_quadrature"],
        &rows,
    )?;
    out.json("constants.json", &docs)?;
    Ok(())
}

fn sample_point(rng: &mut ChaCha8Rng, p: &ProblemConfig, dim: usize) -> Vec<f64> {
    let domain = p.domain().expect("validated");
    let (lo, hi) = domain.bbox();
    loop {
        let x: Vec<f64> = (0..dim).map(|a| rng.gen_range(lo[a.min(1)]..hi[a.min(1)])).collect();
        if domain.contains(&x) {
            return x;
        }
    }
}

pub fn green(cfg: &RunConfig, out: &mut Output) -> CmdResult {
    let p = cfg.problem()?;
    let green = p.green()?;
    let domain = p.domain()?;
    let d = domain.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pairs = Vec::with_capacity(cfg.output.green_pairs);
    while pairs.len() < cfg.output.green_pairs {
        let x = sample_point(&mut rng, p, d);
        let xi = sample_point(&mut rng, p, d);
        let sep = x.iter().zip(&xi).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if domain.signed_distance(&xi) > p.delta0 && domain.signed_distance(&x) > p.delta0 && sep > 1e-3 {
            pairs.push((x, xi));
        }
    }
    out.with_writer("green_table.csv", |w, digits| green.write_table(w, &pairs, digits))?;
    let mut symmetry = 0.0f64;
    for (x, xi) in &pairs {
        let a = green.green(x, xi)?;
        let b = green.green(xi, x)?;
        symmetry = symmetry.max((a - b).abs() / a.abs().max(1.0));
    }
    let mut rows = Vec::new();
    for (_, xi) in pairs.iter().take(16) {
        let mut row: Vec<Cell> = xi.iter().map(|v| Cell::from(*v)).collect();
        row.push(green.robin(xi)?.into());
        row.extend(green.robin_gradient(xi)?.into_iter().map(Cell::from));
        rows.push(row);
    }
    let mut head = point_header("xi", 1, d);
    head.push("robin".into());
    head.extend((1..=d).map(|a| format!("grad_{a}")));
    let head: Vec<&str> = head.iter().map(String::as_str).collect();
    out.csv("robin.csv", &head, &rows)?;
    out.json(
        "green.json",
        &json!({
            "method": green.method(),
            "m": green.m,
            "boundary": green.bc,
            "dimension": d,
            "grid_h": green.grid_spacing(),
            "pairs": pairs.len(),
            "max_relative_symmetry_defect": symmetry,
        }),
    )?;
    Ok(())
}

pub fn phi(cfg: &RunConfig, out: &mut Output) -> CmdResult {
    let p = cfg.problem()?;
    let green = p.green()?;
    let domain = p.domain()?;
    let found = minimum(cfg, p, &green)?;
    out.json("critical_points.json", &found)?;
    let n = cfg.output.landscape_points;
    let value = |xi: &[Vec<f64>]| -> Result<Cell, Failure> {
        let v = phi_k(&green, &p.potential, xi)?;
        Ok(if v.finite { Cell::Num(v.value) } else { Cell::Text(String::new()) })
    };
    let (lo, hi) = domain.bbox();
    let mut rows = Vec::new();
    match (p.k, domain.dim) {
        (1, 2) => {
            for j in 0..n {
                for i in 0..n {
                    let x = vec![
                        lo[0] + (hi[0] - lo[0]) * i as f64 / (n - 1) as f64,
                        lo[1] + (hi[1] - lo[1]) * j as f64 / (n - 1) as f64,
                    ];
                    let inside = domain.contains(&x);
                    let v = if inside { value(&[x.clone()])? } else { Cell::Text(String::new()) };
                    rows.push(vec![x[0].into(), x[1].into(), v, inside.into()]);
                }
            }
            out.csv("landscape.csv", &["x_1", "x_2", "phi", "inside"], &rows)?;
        }
        (1, d) => {
            for i in 0..n {
                let s = lo[0] + (hi[0] - lo[0]) * i as f64 / (n - 1) as f64;
                let mut x = vec![0.0; d];
                x[0] = s;
                let inside = domain.contains(&x);
                let v = if inside { value(&[x])? } else { Cell::Text(String::new()) };
                rows.push(vec![s.into(), v, inside.into()]);
            }
            out.csv("landscape.csv", &["x_1", "phi", "inside"], &rows)?;
        }
        (2, d) => {
            // symmetric slice ξ = (±s e₁)
            for i in 1..n {
                let s = hi[0] * i as f64 / n as f64;
                let mut a = vec![0.0; d];
                a[0] = s;
                let b: Vec<f64> = a.iter().map(|v| -v).collect();
                let inside = domain.contains(&a) && domain.contains(&b);
                let v = if inside { value(&[a, b])? } else { Cell::Text(String::new()) };
                rows.push(vec![s.into(), v, inside.into()]);
            }
            out.csv("landscape.csv", &["s", "phi", "inside"], &rows)?;
        }
        _ => {}
    }
    Ok(())
}

pub fn residual(cfg: &RunConfig, out: &mut Output) -> CmdResult {
    let p = cfg.problem()?;
    let green = p.green()?;
    let xi = configuration(cfg, p, &green)?;
    let planar = p.m == 1;
    let mut eps_list = Vec::new();
    let mut norms = Vec::new();
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for &eps in &cfg.eps_sweep {
        let bc = BubbleConfig::select(&green, &p.potential, xi.clone(), eps, p.delta0)?;
        let ansatz = Ansatz::build(&bc, &green, &p.potential)?;
        let rays = residual_star_rays(&ansatz, 400);
        let mesh = if planar {
            Some(ExpandedProblem::new(&ansatz, p.mesh_h, p.residual_mode, p.stencil)?.residual_star())
        } else {
            None
        };
        let boundary = ansatz.boundary_sup(256);
        let rem = ansatz.remainders(cfg.output.dump_h)?;
        eps_list.push(eps);
        norms.push(mesh.unwrap_or(rays));
        reports.push(json!({
            "eps": eps,
            "residual_star": mesh,
            "residual_star_rays": rays,
            "boundary_sup": boundary,
            "remainders": rem,
        }));
        rows.push((eps, mesh, rays, boundary, rem));
    }
    let slope = loglog_slope(&eps_list, &norms);
    let rows: Vec<Vec<Cell>> = rows
        .into_iter()
        .map(|(e, m, r, b, rem)| {
            vec![
                e.into(),
                m.map_or(Cell::Text(String::new()), Cell::Num),
                r.into(),
                b.into(),
                rem.correction.into(),
                rem.far_field.into(),
                slope.into(),
            ]
        })
        .collect();
    out.csv(
        "residual.csv",
        &["eps", "residual_star", "residual_star_rays", "boundary_sup", "correction_remainder", "far_field_remainder", "slope"],
        &rows,
    )?;
    out.json(
        "residual.json",
        &json!({"xi": xi, "mode": p.residual_mode, "mesh_h": p.mesh_h, "sweep": reports, "slope": slope}),
    )?;

    // ansatz dump at the configured ε
    let bc = BubbleConfig::select(&green, &p.potential, xi.clone(), p.eps, p.delta0)?;
    let ansatz = Ansatz::build(&bc, &green, &p.potential)?;
    let mut summary = json!({
        "config": bc,
        "method": green.method(),
        "boundary_sup": ansatz.boundary_sup(256),
        "residual_star_rays": residual_star_rays(&ansatz, 400),
    });
    if planar {
        out.grid("ansatz_U.csv", &ansatz.physical_field(cfg.output.dump_h)?)?;
        let ep = ExpandedProblem::new(&ansatz, p.mesh_h, p.residual_mode, p.stencil)?;
        out.grid("ansatz_W.csv", &ep.w_field())?;
        out.grid("ansatz_R.csv", &ep.field(&ep.r))?;
        summary["residual_star"] = json!(ep.residual_star());
        summary["nodes"] = json!(ep.n());
    } else {
        let domain = p.domain()?;
        let n = (1.0 / cfg.output.dump_h).ceil() as usize;
        let mut rows = Vec::new();
        for i in 0..=n {
            let s = -1.0 + 2.0 * i as f64 / n as f64;
            let mut x = vec![0.0; domain.dim];
            x[0] = s;
            if domain.contains(&x) {
                rows.push(vec![Cell::from(s), ansatz.value(&x).into(), ansatz.nonlinearity(&x).into(), ansatz.source(&x).into()]);
            }
        }
        out.csv("ansatz_profile.csv", &["x_1", "U", "rho_V_expU", "source"], &rows)?;
    }
    out.json("ansatz.json", &summary)?;
    Ok(())
}

pub fn energy(cfg: &RunConfig, out: &mut Output) -> CmdResult {
    let p = cfg.problem()?;
    let green = p.green()?;
    let xi = configuration(cfg, p, &green)?;
    let sweep = expansion_check(&green, &p.potential, &xi, &cfg.eps_sweep, p.delta0)?;
    let rows: Vec<Vec<Cell>> = sweep
        .reports
        .iter()
        .map(|r| {
            vec![
                r.eps.into(),
                r.j_rho.into(),
                r.phi_k.into(),
                r.expansion_residual.into(),
                sweep.slope.into(),
                r.mass.into(),
                r.quadrature_error.into(),
            ]
        })
        .collect();
    out.csv("energy.csv", &["eps", "J", "phi_k", "residual", "slope", "mass", "quadrature_error"], &rows)?;
    out.json("energy.json", &json!({"xi": xi, "m": p.m, "k": p.k, "sweep": sweep}))?;
    Ok(())
}

pub fn spectra(cfg: &RunConfig, out: &mut Output) -> CmdResult {
    let s = &cfg.spectra;
    let table = spectral_table(s.m_max, s.k_max)?;
    let rows: Vec<Vec<Cell>> = table
        .iter()
        .map(|c| {
            vec![
                Cell::from(c.m as usize),
                Cell::from(c.k_index as usize),
                Cell::Int(c.lambda as i64),
                Cell::Text(c.product.to_string()),
                Cell::Text(c.t_m.to_string()),
                c.matches.into(),
            ]
        })
        .collect();
    out.csv("spectrum.csv", &["m", "k", "lambda", "product", "t_m", "matches"], &rows)?;
    let kernels = s
        .kernel_boxes
        .iter()
        .map(|[w, h]| kernel_count(*w, *h, s.kernel_threshold))
        .collect::<polyliouville::Result<Vec<_>>>()?;
    let consistent = table.iter().all(|c| c.matches == (c.k_index == 1));
    out.json(
        "spectrum.json",
        &json!({
            "table": table,
            "matches_only_at_k1": consistent,
            "expected_kernel_dimension": 3,
            "kernel_counts": kernels,
        }),
    )?;
    Ok(())
}

pub fn solve(cfg: &RunConfig, out: &mut Output) -> CmdResult {
    let p = cfg.problem()?;
    let r = construct_candidate(p, &cfg.tolerances, &cfg.search_options(analytic(p)))?;
    out.grid("solution_u.csv", &r.u_final)?;
    out.grid("solution_phi.csv", &r.phi)?;
    let accepted = r.accepted();
    out.json("solution.json", &json!({"accepted": accepted, "diagnostics": r.diagnostics}))?;
    if !accepted {
        return Err(Failure::Numeric {
            message: format!(
                "multipliers do not vanish: max |c| = {:e} (tolerance {:e})",
                r.diagnostics.max_abs_c, r.diagnostics.multiplier_tolerance
            ),
            diagnostic: json!({"kind": "MultipliersNotVanishing", "diagnostics": r.diagnostics}),
        });
    }
    Ok(())
}

pub fn linking(cfg: &RunConfig, out: &mut Output) -> CmdResult {
    let p = cfg.problem()?;
    let green = p.green()?;
    let domain = p.domain()?;
    let region = SearchRegion::new(&domain, p.k, p.delta0)?;
    let obj = PhiObjective { green: &green, potential: &p.potential };
    let mode = cfg.linking.clone().unwrap_or(LinkingMode::Minimum);
    let opts = LinkingOptions { search: cfg.search_options(analytic(p)), ..LinkingOptions::default() };
    let report = check_linking_level(&region, &obj, &mode, &opts)?;
    let mut doc = out.rounded(&report);
    if let Value::Object(o) = &mut doc {
        o.remove("path");
        o.remove("path_values");
        o.insert("mode".into(), serde_json::to_value(&mode).unwrap_or(Value::Null));
    }
    out.json("critical_point.json", &doc)?;
    let mut head = vec!["image".to_string()];
    head.extend(point_header("xi", p.k, domain.dim));
    head.push("phi".into());
    let head: Vec<&str> = head.iter().map(String::as_str).collect();
    let rows: Vec<Vec<Cell>> = report
        .path
        .iter()
        .zip(&report.path_values)
        .enumerate()
        .map(|(i, (x, v))| {
            let mut row = vec![Cell::from(i)];
            row.extend(x.iter().map(|c| Cell::from(*c)));
            row.push((*v).into());
            row
        })
        .collect();
    out.csv("path.csv", &head, &rows)?;
    match report.outcome {
        LinkingOutcome::Holds | LinkingOutcome::Fails => Ok(()),
        o => Err(Failure::Numeric {
            message: format!("linking check ended with outcome {o:?}"),
            diagnostic: json!({"kind": "Linking", "outcome": o, "level": report.level, "reference": report.reference}),
        }),
    }
}
