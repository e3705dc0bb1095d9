//! One function per subcommand. Each returns its checks, a JSON data payload and
//! any CSV files to write once the run has completed.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use fraclap_core::acceptance::{run_criterion, Check, Checks};
use fraclap_core::commutators::oracle::{self, TrigPoly};
use fraclap_core::commutators::{op_f, op_lambda, op_s, op_t};
use fraclap_core::counterexample::{decay_slopes, neck_report, neck_slope, window_l2, CounterexampleReport};
use fraclap_core::fracops::poisson_kernel_line;
use fraclap_core::geometry::{read_binary, read_csv};
use fraclap_core::halfharmonic::{
    bubbling_experiment, gradient_flow, identity_map, mobius_compose, perturbed_identity, BubbleOptions,
};
use fraclap_core::norms::{self, Region};
use fraclap_core::pohozaev::{
    inverse_stereographic_field, kernel_transform_check, relative, residual_circle, residual_line, residual_plane,
};
use fraclap_core::stereo::transfer_identity_check;
use fraclap_core::{Field, FlowOptions, Grid, LineGrid, PlaneField, SphereDistribution, TailModel};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;

#[derive(Debug, Clone, Serialize)]
pub struct AnchoredCheck {
    /// Identifier of the identity or property being checked.
    pub anchor: String,
    #[serde(flatten)]
    pub check: Check,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: Vec<AnchoredCheck>,
    pub data: Value,
    pub files: Vec<(PathBuf, String)>,
}

impl Outcome {
    fn push(&mut self, anchor: &str, checks: Checks) {
        self.checks.extend(checks.0.into_iter().map(|check| AnchoredCheck { anchor: anchor.to_string(), check }));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| !c.check.gating || c.check.passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Geometry {
    Line,
    Circle,
    Plane,
}

pub type CmdResult = Result<Outcome, String>;

fn core<T>(r: fraclap_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

pub fn kernel(cfg: &RunConfig) -> CmdResult {
    let k = &cfg.kernel;
    let mut out = Outcome::default();
    let mut c = Checks::default();
    c.at_most("|G(1,0) - 1/π|", (core(poisson_kernel_line(1.0, 0.0))?.value - 1.0 / PI).abs(), 1e-15);
    let grid = core(LineGrid::new(k.half_width, k.n_points))?;
    let mut table = Vec::new();
    for &t in &k.t {
        let window: f64 = core(grid.nodes().iter().map(|&x| poisson_kernel_line(t, x).map(|g| g.value)).sum())?;
        let tail = 2.0 * (0.5 - (k.half_width / t).atan() / PI);
        c.at_most(format!("|∫G({t},·) - 1|"), (window * grid.spacing() + tail - 1.0).abs(), k.tolerance);
        for &x in &k.x {
            let g = core(poisson_kernel_line(t, x))?;
            table.push(json!({ "t": t, "x": x, "value": g.value, "dt": g.dt, "dx": g.dx }));
        }
    }
    out.push("line-poisson-kernel", c);

    let r = core(kernel_transform_check(&LineGrid::default(), 10.0))?;
    let mut c = Checks::default();
    c.at_most("kernel⁺ vs reference closed form", r.plus_vs_kernel, k.transform_tolerance);
    c.at_most("kernel⁻ vs reference closed form", r.minus_vs_kernel, k.transform_tolerance);
    c.info("kernel⁺ vs -(√π/2) Re(1+ix)^{-3/2}", r.plus_vs_exact);
    c.info("kernel⁻ vs -(√π/2) Im(1+ix)^{-3/2}", r.minus_vs_exact);
    out.push("quarter-inverse-kernel-transforms", c);
    out.data = json!({ "poisson": table, "transforms": r });
    Ok(out)
}

pub fn norms(cfg: &RunConfig) -> CmdResult {
    let n = &cfg.norms;
    let mut out = Outcome::default();
    let mut c = Checks::default();
    match n.preset.as_str() {
        "indicator" => {
            let grid = core(LineGrid::new(n.half_width, n.n_points))?;
            let ell = n.length;
            let f = core(Field::from_fn(Grid::Line(grid), |x| if x.abs() < ell / 2.0 { 1.0 } else { 0.0 }))?;
            let r = core(norms::report(&f, &Region::All))?;
            let h = grid.spacing();
            c.at_most("|L^{2,1} - ℓ^{1/2}|", (r.l21 - ell.sqrt()).abs(), h.sqrt());
            c.at_most("|L^{2,∞} - ℓ^{1/2}|", (r.l2inf - ell.sqrt()).abs(), h.sqrt());
            out.data = json!({ "preset": "indicator", "length": ell, "spacing": h, "norms": r });
        }
        "power" => {
            let outer = n.outer.iter().copied().fold(0.0, f64::max);
            let half_width = 1.024 * outer;
            let points = ((2.0 * half_width * 256.0) as usize).next_power_of_two();
            let grid = Grid::Line(core(LineGrid::new(half_width, points))?);
            let f = core(Field::from_fn(grid, |x| x.abs().powf(-0.5)))?;
            let mut rows = Vec::new();
            for &r_out in &n.outer {
                let r = core(norms::report(&f, &core(Region::annulus(0.0, n.inner, r_out))?))?;
                let exact = (2.0 * (r_out / n.inner).ln()).sqrt();
                c.at_most(
                    format!("R/r = {}: L² relative error", r_out / n.inner),
                    (r.l2 - exact).abs() / exact,
                    n.tolerance,
                );
                rows.push(r);
            }
            let hi = rows.iter().map(|r| r.l2inf).fold(f64::MIN, f64::max);
            let lo = rows.iter().map(|r| r.l2inf).fold(f64::MAX, f64::min);
            c.at_most("L^{2,∞} relative spread", (hi - lo) / hi, n.tolerance);
            out.data = json!({ "preset": "power", "inner": n.inner, "annuli": rows });
        }
        _ => {
            let path = n.input.as_ref().ok_or("norms.input missing")?;
            let file = std::fs::File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let reader = std::io::BufReader::new(file);
            let f = if path.extension().is_some_and(|e| e == "bin") {
                core(read_binary(reader))?
            } else {
                core(read_csv(reader))?
            };
            let r = core(norms::report(&f, &Region::All))?;
            out.data = json!({ "preset": "file", "input": path, "norms": r });
        }
    }
    out.push("lorentz-norms", c);
    Ok(out)
}

fn random_poly(rng: &mut StdRng, max_mode: usize) -> TrigPoly {
    let mut p = TrigPoly::default();
    for k in 0..=max_mode as i64 {
        p = p.add(&TrigPoly::cos(k), rng.random_range(-1.0..1.0));
        if k > 0 {
            p = p.add(&TrigPoly::sin(k), rng.random_range(-1.0..1.0));
        }
    }
    p
}

fn max_gap(f: &Field, p: &TrigPoly) -> f64 {
    let g = f.grid();
    (0..f.n_points()).map(|j| (f.value(j, 0) - p.eval(g.node(j))).abs()).fold(0.0, f64::max)
}

pub fn commutators(cfg: &RunConfig) -> CmdResult {
    let k = &cfg.commutators;
    let grid = core(Grid::circle(k.n_points))?;
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut out = Outcome::default();

    let mut c = Checks::default();
    let v = random_poly(&mut rng, k.max_mode);
    let mean_zero = v.add(&TrigPoly::constant(v.0.get(&0).map_or(0.0, |c| c.re)), -1.0);
    let konst = core(Field::from_fn(grid, |_| 2.5))?;
    let vf = core(v.sample(grid))?;
    let mf = core(mean_zero.sample(grid))?;
    c.at_most("max |T(const, v)|", core(op_t(&konst, &vf))?.max_abs(), 1e-12);
    c.at_most("max |Λ(const, v)|, v mean zero", core(op_lambda(&konst, &mf))?.max_abs(), 1e-12);
    out.push("commutator-degeneracy", c);

    let mut c = Checks::default();
    type Op = fn(&Field, &Field) -> fraclap_core::Result<Field>;
    type Oracle = fn(&TrigPoly, &TrigPoly) -> TrigPoly;
    let ops: [(&str, Op, Oracle); 4] =
        [("T", op_t, oracle::t), ("S", op_s, oracle::s), ("F", op_f, oracle::f), ("Λ", op_lambda, oracle::lambda)];
    for sample in 0..k.samples {
        let q = random_poly(&mut rng, k.max_mode);
        let v = random_poly(&mut rng, k.max_mode);
        let (qf, vf) = (core(q.sample(grid))?, core(v.sample(grid))?);
        for (name, op, exact) in ops {
            c.at_most(
                format!("sample {sample}: {name} vs coefficient oracle"),
                max_gap(&core(op(&qf, &vf))?, &exact(&q, &v)),
                k.tolerance,
            );
        }
    }
    out.push("commutator-oracle", c);
    out.data = json!({ "n_points": k.n_points, "max_mode": k.max_mode, "samples": k.samples });
    Ok(out)
}

pub fn pohozaev(cfg: &RunConfig, geometry: Geometry) -> CmdResult {
    let p = &cfg.pohozaev;
    let mut out = Outcome::default();
    let mut c = Checks::default();
    match geometry {
        Geometry::Line => {
            if p.preset != "identity-map" {
                return Err(format!("pohozaev line supports only the identity-map preset, got `{}`", p.preset));
            }
            let tol = p.tolerance.unwrap_or(1e-3);
            let u = core(inverse_stereographic_field(Grid::Line(LineGrid::default())))?;
            let r = core(residual_line(&u, &p.t))?;
            for (k, &t) in p.t.iter().enumerate() {
                let exact = 4.0 * PI * PI / (t + 1.0).powi(4);
                c.at_most(format!("t = {t}: lhs vs 4π²/(t+1)⁴"), relative(r.lhs[k], exact), tol);
                c.at_most(format!("t = {t}: rhs vs 4π²/(t+1)⁴"), relative(r.rhs[k], exact), tol);
            }
            out.push("line-pohozaev-identity", c);
            out.data = serde_json::to_value(&r).map_err(|e| e.to_string())?;
        }
        Geometry::Circle => {
            let tol = p.tolerance.unwrap_or(1e-10);
            let id = core(identity_map(p.circle_points))?;
            let u = match p.preset.as_str() {
                "identity-map" => id,
                "mobius" => core(mobius_compose(&id, p.mobius_a))?,
                _ => core(Field::from_fn_vec(*id.grid(), 2, |t| vec![(2.0 * t).cos(), (2.0 * t).sin()]))?,
            };
            let r = core(residual_circle(&u))?;
            c.at_most("||u₁| - |u₋₁||", r.modes.norm_gap, tol);
            c.at_most("|u₁·u₋₁|", r.modes.dot, tol);
            out.push("circle-pohozaev-modes", c);
            out.data = serde_json::to_value(&r).map_err(|e| e.to_string())?;
        }
        Geometry::Plane => {
            let tol = p.tolerance.unwrap_or(1e-4);
            let (a, n) = (p.plane_half_width, p.plane_points);
            let u = match p.preset.as_str() {
                "identity-map" => core(PlaneField::from_fn(a, n, 2, |x, y| vec![x, y]))?,
                "z-squared" => core(PlaneField::from_fn(a, n, 2, |x, y| vec![x * x - y * y, 2.0 * x * y]))?,
                other => return Err(format!("pohozaev plane does not support preset `{other}`")),
            };
            let r = core(residual_plane(&u, (0.0, 0.0), &p.plane_t))?;
            c.at_most("max relative residual", r.max_relative_residual(), tol);
            out.push("plane-pohozaev-identity", c);
            out.data = serde_json::to_value(&r).map_err(|e| e.to_string())?;
        }
    }
    Ok(out)
}

pub fn stereo(cfg: &RunConfig) -> CmdResult {
    let s = &cfg.stereo;
    let lg = Grid::Line(LineGrid::default());
    let circle = core(Grid::circle(s.circle_points))?;
    let mut out = Outcome::default();

    let u = core(Field::from_fn(lg, |x| 1.0 / (1.0 + x * x)))?.with_tail(TailModel::symmetric(2.0, 1.0));
    let r = core(transfer_identity_check(&u, &circle, s.excluded_arc))?;
    let mut c = Checks::default();
    c.at_most("1/(1+x²): max discrepancy", r.max_abs_discrepancy, s.tolerance);
    let lhs_err = r.theta.iter().zip(&r.lhs).map(|(t, l)| (l - 0.5 * t.sin()).abs()).fold(0.0, f64::max);
    c.at_most("1/(1+x²): circle side vs sin θ / 2", lhs_err, s.tolerance);
    out.push("stereographic-transfer-closed-form", c);

    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let terms: Vec<(f64, f64, f64)> = (0..s.random_terms)
        .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-2.0..2.0), rng.random_range(0.5..2.0)))
        .collect();
    let tail_coeff: f64 = terms.iter().map(|(b, _, w)| b * w * w).sum();
    let smooth = |x: f64| terms.iter().map(|(b, m, w)| b * w * w / (w * w + (x - m).powi(2))).sum::<f64>();
    let u = core(Field::from_fn(lg, smooth))?.with_tail(TailModel::symmetric(2.0, tail_coeff));
    let random = core(transfer_identity_check(&u, &circle, s.excluded_arc))?;
    let mut c = Checks::default();
    c.at_most("random Lorentzian sum: two-route max discrepancy", random.max_abs_discrepancy, s.random_tolerance);
    out.push("stereographic-transfer-random", c);
    out.data = json!({
        "closed_form": { "max_abs_discrepancy": r.max_abs_discrepancy, "n_compared": r.n_compared },
        "random": { "terms": terms, "max_abs_discrepancy": random.max_abs_discrepancy, "max_rel_discrepancy": random.max_rel_discrepancy },
    });
    Ok(out)
}

pub fn flow(cfg: &RunConfig) -> CmdResult {
    let f = &cfg.flow;
    let sphere = core(SphereDistribution::new(2))?;
    let u0 = core(perturbed_identity(f.n_points, f.perturbation))?;
    let options = FlowOptions { tol: f.tolerance, max_iterations: f.max_iterations, ..FlowOptions::default() };
    let run = core(gradient_flow(&u0, &sphere, &options))?;
    let mut c = Checks::default();
    c.at_most("|E - 2π|", (run.state.energy - 2.0 * PI).abs(), f.energy_tolerance);
    c.at_most("EL residual", run.state.el_residual_norm, f.tolerance);
    c.at_most("energy increases along accepted steps", run.monotonicity_violations as f64, 0.0);
    c.holds("converged", f64::from(u8::from(run.converged)), run.converged, "true");
    let mut out = Outcome::default();
    out.push("half-harmonic-flow", c);
    if let Some(path) = &f.history_csv {
        let mut csv = String::from("iteration,energy,el_residual,step\n");
        for r in &run.history {
            let _ = writeln!(csv, "{},{:e},{:e},{:e}", r.iteration, r.energy, r.el_residual_norm, r.step);
        }
        out.files.push((path.clone(), csv));
    }
    out.data = json!({
        "energy": run.state.energy,
        "el_residual": run.state.el_residual_norm,
        "iterations": run.state.iteration,
        "rejected_steps": run.rejected_steps,
        "converged": run.converged,
    });
    Ok(out)
}

pub fn bubble(cfg: &RunConfig) -> CmdResult {
    let b = &cfg.bubble;
    let options = BubbleOptions { big_r: b.big_r, necks: b.necks.clone(), gate: b.gate, ..BubbleOptions::default() };
    let reports = core(bubbling_experiment(&core(identity_map(64))?, &b.a, &options))?;
    let mut out = Outcome::default();
    for &neck in &b.necks {
        let mut c = Checks::default();
        let row: Vec<_> = reports.iter().filter(|r| r.neck == neck).collect();
        let sups: Vec<f64> = row.iter().map(|r| r.dyadic_sup).collect();
        let worst = sups.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
        c.holds("dyadic sup decreasing (max consecutive ratio)", worst, sups.windows(2).all(|w| w[1] < w[0]), "< 1");
        for r in &row {
            if let Some(fit) = &r.fit {
                c.within(
                    format!("a = {}: fitted neck exponent", r.a),
                    fit.exponent,
                    0.5 - b.exponent_tolerance,
                    0.5 + b.exponent_tolerance,
                );
            }
        }
        out.push(&format!("bubbling-neck-{neck}"), c);
    }
    if let Some(path) = &b.csv {
        let mut csv = String::from("a,neck,scale,dyadic_sup,neck_l2,neck_l2inf,fit_exponent\n");
        for r in &reports {
            let e = r.fit.map_or(f64::NAN, |f| f.exponent);
            let _ = writeln!(
                csv,
                "{},{},{:e},{:e},{:e},{:e},{:e}",
                r.a, r.neck, r.scale, r.dyadic_sup, r.neck_l2, r.neck_l2inf, e
            );
        }
        out.files.push((path.clone(), csv));
    }
    out.data = serde_json::to_value(&reports).map_err(|e| e.to_string())?;
    Ok(out)
}

pub fn counterexample(cfg: &RunConfig) -> CmdResult {
    let x = &cfg.counterexample;
    let slopes = core(decay_slopes(x.slope_lo, x.slope_hi, x.slope_samples))?;
    let mut out = Outcome::default();
    let mut c = Checks::default();
    c.within("decay slope of (-Δ)^{1/4}u", slopes.u, -1.5 - x.slope_tolerance, -1.5 + x.slope_tolerance);
    c.within("decay slope of (-Δ)^{1/4}v", slopes.v, -1.25 - x.slope_tolerance, -1.25 + x.slope_tolerance);
    c.info("decay slope of ω", slopes.omega);
    out.push("counterexample-decay", c);

    let mut c = Checks::default();
    let mut reports: Vec<CounterexampleReport> = Vec::new();
    for &n in &x.ns {
        c.within(format!("n = {n:e}: ‖U_n‖ on [-1, 1]"), window_l2(n), 1.0, 1.3);
        // The neck (R/n, 1/R) is non-empty only for R² < n.
        for &r in x.radii.iter().filter(|&&r| r * r < n) {
            reports.push(core(neck_report(n, r, &slopes))?);
        }
    }
    out.push("counterexample-window", c);

    let mut c = Checks::default();
    let mut slopes_by_n = Vec::new();
    for &n in &x.ns {
        let row: Vec<CounterexampleReport> = reports.iter().filter(|r| r.n == n).cloned().collect();
        if row.len() < 2 {
            continue;
        }
        let s = core(neck_slope(&row))?;
        if Some(&n) == x.ns.iter().max_by(|a, b| a.total_cmp(b)) {
            c.within(
                format!("n = {n:e}: neck L² of Ω_n vs R, log-log slope"),
                s,
                -0.25 - x.neck_tolerance,
                -0.25 + x.neck_tolerance,
            );
        } else {
            c.info(format!("n = {n:e}: neck L² of Ω_n vs R, log-log slope"), s);
        }
        slopes_by_n.push(json!({ "n": n, "slope": s }));
    }
    out.push("counterexample-neck", c);

    if let Some(path) = &x.csv {
        let mut csv = String::from("n,R,c_n,neck_l2_omega,neck_l21_omega1,system_residual\n");
        for r in &reports {
            let _ = writeln!(
                csv,
                "{:e},{},{:e},{:e},{:e},{:e}",
                r.n, r.big_r, r.c_n_numeric, r.neck_l2_omega, r.neck_l21_omega1, r.system_residual
            );
        }
        out.files.push((path.clone(), csv));
    }
    out.data = json!({ "slopes": slopes, "neck_slopes": slopes_by_n, "reports": reports });
    Ok(out)
}

pub fn selftest(cfg: &RunConfig) -> CmdResult {
    let mut out = Outcome::default();
    let mut results = Vec::new();
    for &id in &cfg.selftest.criteria {
        let r = run_criterion(id);
        log::info!("{r}");
        let mut c = Checks(r.checks.clone());
        if let Some(e) = &r.error {
            c.holds(format!("error: {e}"), f64::NAN, false, "no error");
        }
        out.push(&format!("criterion-{id}"), c);
        results.push(json!({ "id": r.id, "title": r.title, "passed": r.passed, "error": r.error }));
    }
    out.data = json!({ "criteria": results });
    Ok(out)
}
