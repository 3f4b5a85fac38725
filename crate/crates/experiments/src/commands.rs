//! The six CLI commands. Each prints a short report and writes CSV files.

use rayon::prelude::*;
use twolayer_core::mc::{self, SimConfig};
use twolayer_core::optimizer::{self, Solution};
use twolayer_core::{LevyModel, PhaseType, Problem, Process, Side, Strategy};

use crate::checks::{self, CheckItem};
use crate::config::{Config, SweepParameter};
use crate::output::Sink;
use crate::{exit, AppError};

type Res<T> = Result<T, AppError>;

fn opt(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

fn x_max(cfg: &Config, sol: &Solution) -> f64 {
    cfg.grid.x_max.unwrap_or_else(|| checks::default_x_max(sol))
}

pub const SOLVE_HEADER: [&str; 14] = [
    "case", "a_star", "b_star", "b0", "gamma_00", "res_Gamma", "res_gamma", "dv_a_minus", "dv_a_plus",
    "dv_b_minus", "dv_b_plus", "d2v_a_gap", "d2v_b_gap", "rho_bar",
];

pub fn solve(cfg: &Config, sink: &Sink) -> Res<i32> {
    let p = cfg.problem()?;
    let sol = optimizer::solve(&p)?;
    let r = &sol.residuals;
    println!("case      {}", sol.case.tag());
    println!("a*        {}", sink_num(sink, sol.a_star));
    println!("b*        {}", sink_num(sink, sol.b_star));
    if let Some(b0) = sol.b0 {
        println!("b0        {}", sink_num(sink, b0));
    }
    println!("Gamma(0,0) {}", sink_num(sink, p.gamma_big(0.0, 0.0)));
    if let Some(g) = r.gamma_big {
        println!("residual Gamma(a*,b*) = {}", sink_num(sink, g));
    }
    if let Some(g) = r.gamma_small {
        println!("residual gamma(a*,b*) = {}", sink_num(sink, g));
    }
    if let Some((lo, hi)) = r.dv_a {
        println!("v'(a*-) - 1 = {}, v'(a*+) - 1 = {}", sink_num(sink, lo), sink_num(sink, hi));
    }
    if let Some((lo, hi)) = r.dv_b {
        println!("v'(b*-) - beta = {}, v'(b*+) - beta = {}", sink_num(sink, lo), sink_num(sink, hi));
    }

    let mut t = sink.table(&SOLVE_HEADER);
    let n = |v| t.num(v);
    let row = vec![
        sol.case.tag().to_string(),
        n(sol.a_star),
        n(sol.b_star),
        n(opt(sol.b0)),
        n(p.gamma_big(0.0, 0.0)),
        n(opt(r.gamma_big)),
        n(opt(r.gamma_small)),
        n(opt(r.dv_a.map(|d| d.0))),
        n(opt(r.dv_a.map(|d| d.1))),
        n(opt(r.dv_b.map(|d| d.0))),
        n(opt(r.dv_b.map(|d| d.1))),
        n(opt(r.d2v_a_gap)),
        n(opt(r.d2v_b_gap)),
        n(p.rho_bar()),
    ];
    t.push(row);
    sink.save("solve.csv", &t)?;

    let hi = x_max(cfg, &sol);
    write_value_table(&p, sol.strategy(), hi, cfg.grid.points, sink, "value.csv")?;

    // Gamma(., b) and gamma(., b) around b*
    let mut g = sink.table(&["b_offset", "b", "a", "Gamma", "gamma"]);
    for k in -2..=2 {
        let b = sol.b_star + k as f64;
        if b < 0.0 {
            continue;
        }
        let n = if b > 0.0 { 101 } else { 1 };
        for a in checks::x_grid(b, n) {
            g.push_nums(&[k as f64, b, a, p.gamma_big(a, b), p.gamma_small(a, b)]);
        }
    }
    sink.save("gamma_curves.csv", &g)?;

    // optimal and perturbed value curves, long format
    let mut v = sink.table(&["a", "b", "optimal", "x", "value"]);
    let mut strategies = vec![sol.strategy()];
    strategies.extend(checks::perturbed_strategies(&sol));
    for (i, st) in strategies.iter().enumerate() {
        for x in checks::x_grid(hi, cfg.grid.points) {
            let row = vec![v.num(st.a), v.num(st.b), (i == 0).to_string(), v.num(x), v.num(p.value(*st, x)?)];
            v.push(row);
        }
    }
    sink.save("perturbed.csv", &v)?;
    println!("wrote solve.csv, value.csv, gamma_curves.csv, perturbed.csv to {}", sink.dir.display());
    Ok(exit::OK)
}

fn sink_num(sink: &Sink, v: f64) -> String {
    crate::output::fmt_num(v, sink.digits)
}

fn write_value_table(p: &Problem, st: Strategy, hi: f64, points: usize, sink: &Sink, name: &str) -> Res<()> {
    let mut t = sink.table(&["x", "value", "dv_minus", "dv_plus", "value_original_units"]);
    for x in checks::x_grid(hi, points) {
        let left = if x > 0.0 { p.value_derivative(st, x, Side::Below)? } else { f64::NAN };
        t.push_nums(&[x, p.value(st, x)?, left, p.value_derivative(st, x, Side::Above)?, p.value_original_units(st, x)?]);
    }
    sink.save(name, &t)?;
    Ok(())
}

pub fn value(cfg: &Config, sink: &Sink) -> Res<i32> {
    let p = cfg.problem()?;
    let (st, hi) = match cfg.value {
        Some(v) => {
            let st = Strategy::new(v.a, v.b)?;
            (st, cfg.grid.x_max.unwrap_or(2.0 * st.b + 2.0))
        }
        None => {
            let sol = optimizer::solve(&p)?;
            (sol.strategy(), x_max(cfg, &sol))
        }
    };
    println!("strategy (a, b) = ({}, {})", sink_num(sink, st.a), sink_num(sink, st.b));
    for x in checks::x_grid(hi, 5) {
        println!("  v({}) = {}", sink_num(sink, x), sink_num(sink, p.value(st, x)?));
    }
    write_value_table(&p, st, hi, cfg.grid.points, sink, "value.csv")?;
    println!("wrote value.csv to {}", sink.dir.display());
    Ok(exit::OK)
}

pub const SIMULATE_HEADER: [&str; 10] =
    ["a", "b", "x0", "mean", "stderr", "n_paths", "ruin_fraction", "analytic", "z_score", "seed"];

pub fn simulate(cfg: &Config, sink: &Sink, seed: Option<u64>) -> Res<i32> {
    let p = cfg.problem()?;
    let s = &cfg.simulate;
    let st = match (s.a, s.b) {
        (Some(a), Some(b)) => Strategy::new(a, b)?,
        _ => optimizer::solve(&p)?.strategy(),
    };
    let xs = if s.x0.is_empty() { vec![0.5 * st.b] } else { s.x0.clone() };
    let seed = seed.unwrap_or(s.seed);
    let sim = SimConfig { n_paths: s.n_paths, horizon: s.horizon, dt: s.dt, seed };
    let mut t = sink.table(&SIMULATE_HEADER);
    for &x0 in &xs {
        let est = mc::simulate_value(&p, st, x0, &sim)?;
        let exact = p.value(st, x0)?;
        println!(
            "x0 = {}: mc = {} +- {}, analytic = {}, z = {:.3}",
            sink_num(sink, x0),
            sink_num(sink, est.mean),
            sink_num(sink, est.stderr),
            sink_num(sink, exact),
            est.z_score(exact)
        );
        let mut row: Vec<String> =
            [st.a, st.b, x0, est.mean, est.stderr].iter().map(|&v| t.num(v)).collect();
        row.push(est.n_paths.to_string());
        row.extend([est.ruin_fraction, exact, est.z_score(exact)].iter().map(|&v| t.num(v)));
        row.push(seed.to_string());
        t.push(row);
    }
    sink.save("simulate.csv", &t)?;
    if s.trace {
        let events = mc::simulate_path_trace(&p, st, xs[0], &sim)?;
        let path = sink.dir.join("trace.csv");
        let file = std::fs::File::create(&path).map_err(|e| AppError::Io(format!("{}: {e}", path.display())))?;
        mc::write_trace_csv(&events, std::io::BufWriter::new(file), |v| sink_num(sink, v))
            .map_err(|e| AppError::Io(format!("{}: {e}", path.display())))?;
    }
    println!("wrote simulate.csv{} to {}", if s.trace { ", trace.csv" } else { "" }, sink.dir.display());
    Ok(exit::OK)
}

/// Problem for one sweep row.
pub fn sweep_problem(cfg: &Config, base: &Problem, parameter: SweepParameter, value: f64) -> Res<Problem> {
    let pb = &cfg.problem;
    Ok(match parameter {
        SweepParameter::RhoBar => base.with_rho(value * base.delta() / base.q()),
        SweepParameter::Beta => base.with_beta(value)?,
        SweepParameter::Delta => {
            let model = base.model().with_delta(value)?;
            Problem::new(model, pb.q, pb.beta_a, pb.beta_s, cfg.rho_tilde())?
        }
        SweepParameter::OmegaVolatility => {
            let omega0 = cfg.model.omega.ok_or_else(|| AppError::Config("model.omega missing".into()))?;
            let ratio = cfg.model.kappa / omega0;
            let m = base.model();
            let model = LevyModel::new(m.c_y(), m.sigma(), ratio * value, PhaseType::exponential(value)?, m.delta())?;
            Problem::new(model, pb.q, pb.beta_a, pb.beta_s, cfg.rho_tilde())?
        }
    })
}

/// Per-unit-time variance of the jump part, `2 kappa / omega^2`, for exponential jumps.
pub fn jump_variance(model: &LevyModel) -> f64 {
    let j = model.jumps();
    if j.phases() == 1 {
        let omega = -j.generator()[(0, 0)];
        2.0 * model.kappa() / (omega * omega) + model.sigma().powi(2)
    } else {
        f64::NAN
    }
}

pub struct SweepRow {
    pub value: f64,
    pub problem: Option<Problem>,
    pub solution: Result<Solution, String>,
}

pub fn sweep_rows(cfg: &Config) -> Res<(SweepParameter, Vec<SweepRow>)> {
    let block = cfg.sweep.as_ref().ok_or_else(|| AppError::Config("sweep: block missing".into()))?;
    let base = cfg.problem()?;
    let rows = block
        .grid
        .par_iter()
        .map(|&v| match sweep_problem(cfg, &base, block.parameter, v) {
            Ok(p) => {
                let solution = optimizer::solve(&p).map_err(|e| e.to_string());
                SweepRow { value: v, problem: Some(p), solution }
            }
            Err(e) => SweepRow { value: v, problem: None, solution: Err(e.to_string()) },
        })
        .collect();
    Ok((block.parameter, rows))
}

pub fn sweep(cfg: &Config, sink: &Sink) -> Res<i32> {
    let (parameter, rows) = sweep_rows(cfg)?;
    let block = cfg.sweep.as_ref().expect("checked in sweep_rows");
    let x_ref = if block.x_ref.is_empty() { vec![1.0, 2.0, 5.0] } else { block.x_ref.clone() };
    let volatility = parameter == SweepParameter::OmegaVolatility;
    let mut header: Vec<String> = vec![parameter.name().into()];
    if volatility {
        header.push("variance".into());
    }
    header.extend(["case", "a_star", "b_star", "gap"].map(String::from));
    header.extend(x_ref.iter().map(|x| format!("v_at_{}", crate::output::fmt_num(*x, 6))));
    header.extend(["res_Gamma", "res_gamma", "error"].map(String::from));
    let mut t = sink.table(&header);
    let mut curves = sink.table(&[parameter.name(), "x", "value"]);
    let mut ok = 0;
    let hi_all = cfg.grid.x_max.unwrap_or_else(|| {
        rows.iter().filter_map(|r| r.solution.as_ref().ok()).map(checks::default_x_max).fold(1.0, f64::max)
    });
    for row in &rows {
        let mut cells = vec![t.num(row.value)];
        if volatility {
            cells.push(t.num(row.problem.as_ref().map_or(f64::NAN, |p| jump_variance(p.model()))));
        }
        match (&row.problem, &row.solution) {
            (Some(p), Ok(sol)) => {
                ok += 1;
                cells.push(sol.case.tag().into());
                cells.extend([sol.a_star, sol.b_star, sol.b_star - sol.a_star].map(|v| t.num(v)));
                for &x in &x_ref {
                    cells.push(t.num(sol.value_at(p, x)?));
                }
                cells.push(t.num(opt(sol.residuals.gamma_big)));
                cells.push(t.num(opt(sol.residuals.gamma_small)));
                cells.push(String::new());
                for x in checks::x_grid(hi_all, cfg.grid.points) {
                    curves.push_nums(&[row.value, x, sol.value_at(p, x)?]);
                }
                println!(
                    "{} = {}: {} a* = {} b* = {}",
                    parameter.name(),
                    sink_num(sink, row.value),
                    sol.case.tag(),
                    sink_num(sink, sol.a_star),
                    sink_num(sink, sol.b_star)
                );
            }
            (_, Err(msg)) => {
                cells.push("error".into());
                cells.extend(std::iter::repeat_n(t.num(f64::NAN), 3 + x_ref.len() + 2));
                cells.push(msg.replace(',', ";"));
                println!("{} = {}: error: {msg}", parameter.name(), sink_num(sink, row.value));
            }
            (None, Ok(_)) => unreachable!("a solved row always carries its problem"),
        }
        t.push(cells);
    }
    sink.save("sweep.csv", &t)?;
    sink.save("sweep_values.csv", &curves)?;
    println!("wrote sweep.csv, sweep_values.csv to {}", sink.dir.display());
    if ok == 0 {
        return Err(AppError::Numerical(twolayer_core::Error::NotApplicable("every sweep row failed".into())));
    }
    Ok(exit::OK)
}

/// `max_x |f(x) - g(x)|` on an evenly spaced grid.
pub fn max_gap<F, G>(f: F, g: G, hi: f64, points: usize) -> Res<f64>
where
    F: Fn(f64) -> twolayer_core::Result<f64>,
    G: Fn(f64) -> twolayer_core::Result<f64>,
{
    let mut worst = 0.0f64;
    for x in checks::x_grid(hi, points) {
        worst = worst.max((f(x)? - g(x)?).abs());
    }
    Ok(worst)
}

pub struct ConvergeHigh {
    pub beta: f64,
    pub solution: Solution,
    pub b_s: f64,
    pub max_gap_vs: f64,
}

pub struct ConvergeLow {
    pub beta: f64,
    pub solution: Solution,
    pub a_a: f64,
    pub max_gap_va: f64,
}

pub struct ConvergeDelta {
    pub delta: f64,
    pub solution: Solution,
    pub a_a: f64,
    pub va_at_aa: f64,
    pub max_gap_va: f64,
}

/// Grid end for benchmark comparisons: the config value, else twice the
/// larger benchmark barrier (at least 1).
fn bench_x_max(cfg: &Config, p: &Problem) -> Res<f64> {
    if let Some(x) = cfg.grid.x_max {
        return Ok(x);
    }
    Ok((2.0 * p.singular_barrier()?.max(p.refraction_threshold()?)).max(1.0))
}

pub fn converge_beta_high(cfg: &Config, base: &Problem) -> Res<Vec<ConvergeHigh>> {
    let hi = bench_x_max(cfg, base)?;
    cfg.converge
        .beta_high
        .iter()
        .map(|&beta| {
            let p = base.with_beta(beta)?;
            let solution = optimizer::solve(&p)?;
            let b_s = p.singular_barrier()?;
            let st = solution.strategy();
            let max_gap_vs =
                max_gap(|x| p.value(st, x), |x| p.value_singular_only(x).map(|r| r.1), hi, cfg.grid.points)?;
            Ok(ConvergeHigh { beta, solution, b_s, max_gap_vs })
        })
        .collect()
}

pub fn converge_beta_low(cfg: &Config, base: &Problem) -> Res<Vec<ConvergeLow>> {
    let hi = bench_x_max(cfg, base)?;
    cfg.converge
        .beta_low
        .iter()
        .map(|&beta| {
            let p = base.with_beta(beta)?;
            let solution = optimizer::solve(&p)?;
            let a_a = p.refraction_threshold()?;
            let st = solution.strategy();
            let max_gap_va =
                max_gap(|x| p.value(st, x), |x| p.value_refract_only(x).map(|r| r.1), hi, cfg.grid.points)?;
            Ok(ConvergeLow { beta, solution, a_a, max_gap_va })
        })
        .collect()
}

pub fn converge_delta(cfg: &Config, base: &Problem) -> Res<Vec<ConvergeDelta>> {
    cfg.converge
        .delta
        .iter()
        .map(|&delta| {
            let p = sweep_problem(cfg, base, SweepParameter::Delta, delta)?;
            let hi = bench_x_max(cfg, &p)?;
            let solution = optimizer::solve(&p)?;
            let (a_a, va_at_aa) = p.value_refract_only(p.refraction_threshold()?)?;
            let st = solution.strategy();
            let max_gap_va =
                max_gap(|x| p.value(st, x), |x| p.value_refract_only(x).map(|r| r.1), hi, cfg.grid.points)?;
            Ok(ConvergeDelta { delta, solution, a_a, va_at_aa, max_gap_va })
        })
        .collect()
}

pub fn converge(cfg: &Config, sink: &Sink) -> Res<i32> {
    let base = cfg.problem()?;
    if base.scales().psi_prime_zero(Process::Y) >= 0.0 {
        return Err(AppError::Numerical(twolayer_core::Error::NotApplicable(
            "benchmarks need psi_Y'(0+) < 0".into(),
        )));
    }

    let high = converge_beta_high(cfg, &base)?;
    let mut t = sink.table(&["beta", "case", "a_star", "b_star", "gap", "b_S", "abs_b_star_minus_b_S", "max_abs_v_minus_vS"]);
    println!("beta -> 1 (singular-only benchmark)");
    for r in &high {
        let s = &r.solution;
        let mut row = vec![t.num(r.beta), s.case.tag().into()];
        row.extend(
            [s.a_star, s.b_star, s.b_star - s.a_star, r.b_s, (s.b_star - r.b_s).abs(), r.max_gap_vs].map(|v| t.num(v)),
        );
        t.push(row);
        println!(
            "  beta = {}: gap = {}, max|v - v^S| = {}",
            sink_num(sink, r.beta),
            sink_num(sink, s.b_star - s.a_star),
            sink_num(sink, r.max_gap_vs)
        );
    }
    sink.save("converge_beta_high.csv", &t)?;

    let low = converge_beta_low(cfg, &base)?;
    let mut t = sink.table(&["beta", "case", "a_star", "b_star", "a_A", "abs_a_star_minus_a_A", "max_abs_v_minus_vA"]);
    println!("beta -> 0 (refraction-only benchmark)");
    for r in &low {
        let s = &r.solution;
        let mut row = vec![t.num(r.beta), s.case.tag().into()];
        row.extend([s.a_star, s.b_star, r.a_a, (s.a_star - r.a_a).abs(), r.max_gap_va].map(|v| t.num(v)));
        t.push(row);
        println!(
            "  beta = {}: |a* - a_A| = {}, b* = {}",
            sink_num(sink, r.beta),
            sink_num(sink, (s.a_star - r.a_a).abs()),
            sink_num(sink, s.b_star)
        );
    }
    sink.save("converge_beta_low.csv", &t)?;

    let deltas = converge_delta(cfg, &base)?;
    let mut t = sink.table(&["delta", "case", "a_star", "b_star", "a_A", "vA_at_a_A", "max_abs_v_minus_vA", "relative"]);
    println!("large delta (refraction-only benchmark at the same delta)");
    for r in &deltas {
        let s = &r.solution;
        let mut row = vec![t.num(r.delta), s.case.tag().into()];
        row.extend(
            [s.a_star, s.b_star, r.a_a, r.va_at_aa, r.max_gap_va, r.max_gap_va / r.va_at_aa.abs()].map(|v| t.num(v)),
        );
        t.push(row);
        println!(
            "  delta = {}: max|v - v^A| / v^A(a_A) = {}",
            sink_num(sink, r.delta),
            sink_num(sink, r.max_gap_va / r.va_at_aa.abs())
        );
    }
    sink.save("converge_delta.csv", &t)?;

    // rho_bar = 1 with positive refracted drift: b* tends to Zbar^{-1}(-psi_X'(0+)/q)
    let psi_x = base.scales().psi_prime_zero(Process::X);
    if psi_x < 0.0 {
        let p1 = base.with_rho(base.delta() / base.q());
        let limit = p1.scales().inverse(Process::X, twolayer_core::scale::Monotone::ZBar, -psi_x / p1.q())?;
        let mut t = sink.table(&["beta", "case", "a_star", "b_star", "b_star_limit", "abs_b_star_minus_limit"]);
        for &beta in &cfg.converge.beta_low {
            let s = optimizer::solve(&p1.with_beta(beta)?)?;
            let mut row = vec![t.num(beta), s.case.tag().into()];
            row.extend([s.a_star, s.b_star, limit, (s.b_star - limit).abs()].map(|v| t.num(v)));
            t.push(row);
        }
        sink.save("converge_rho_bar_one.csv", &t)?;
    }
    println!("wrote converge_*.csv to {}", sink.dir.display());
    Ok(exit::OK)
}

pub const CHECK_HEADER: [&str; 5] = ["suite", "item", "value", "tolerance", "pass"];

/// Runs every applicable check; the items plus the Monte Carlo cells.
pub fn run_checks(cfg: &Config, seed: Option<u64>) -> Res<(Vec<CheckItem>, Vec<checks::McCell>)> {
    let p = cfg.problem()?;
    let sol = optimizer::solve(&p)?;
    let hi = x_max(cfg, &sol);
    let mut items = checks::laplace(&p)?;
    items.extend(checks::smooth_fit(&p, &sol));
    items.extend(checks::concavity(&p, &sol, cfg.check.grid_points, hi)?);
    items.extend(checks::dominance(&p, &sol, 200, hi)?);
    items.extend(checks::generator(&p, &sol, 50)?);

    let diffusive = p.model().sigma() > 0.0;
    let paths = cfg.check.mc_paths.unwrap_or(if diffusive { 2_000 } else { 10_000 });
    let horizon = if diffusive { Some((1e4f64).ln() / p.q()) } else { None };
    let sim = SimConfig { n_paths: paths, horizon, dt: cfg.check.mc_dt, seed: seed.unwrap_or(cfg.simulate.seed) };
    let cells = checks::mc_cells(&p, &checks::mc_grid(&sol), &sim)?;
    let inside = cells.iter().filter(|c| c.within(3.0)).count();
    let need = checks::mc_required(cells.len());
    items.push(CheckItem {
        suite: "monte_carlo",
        item: format!("cells within 3 stderr (need {need} of {})", cells.len()),
        value: inside as f64,
        tol: need as f64,
        pass: inside >= need,
    });
    // trivial cells: start at zero and immediate liquidation
    let trivial = [
        (Strategy::new(sol.b_star.max(1.0) / 3.0, sol.b_star.max(1.0))?, 0.0, "x0 = 0"),
        (Strategy::liquidation(), sol.b_star.max(1.0), "strategy (0,0)"),
    ];
    for (st, x0, label) in trivial {
        if diffusive && x0 == 0.0 {
            continue;
        }
        let est = mc::simulate_value(&p, st, x0, &SimConfig { n_paths: 1_000, ..sim })?;
        let exact = p.value(st, x0)?;
        let dev = (est.mean - exact).abs();
        let tol = 3.0 * est.stderr + 1e-12;
        items.push(CheckItem { suite: "monte_carlo", item: label.into(), value: dev, tol, pass: dev <= tol });
    }
    Ok((items, cells))
}

pub fn check(cfg: &Config, sink: &Sink, seed: Option<u64>) -> Res<i32> {
    let (items, cells) = run_checks(cfg, seed)?;
    let mut t = sink.table(&CHECK_HEADER);
    let mut failed = 0;
    for it in &items {
        let verdict = if it.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!it.pass);
        println!(
            "{verdict}  {:<12} {:<48} {:>14} (tol {})",
            it.suite,
            it.item,
            sink_num(sink, it.value),
            sink_num(sink, it.tol)
        );
        t.push(vec![it.suite.into(), it.item.clone(), t.num(it.value), t.num(it.tol), it.pass.to_string()]);
    }
    sink.save("check.csv", &t)?;
    let mut m = sink.table(&["a", "b", "x0", "analytic", "mean", "stderr", "z_score", "within_3_stderr"]);
    for c in &cells {
        let mut row: Vec<String> =
            [c.a, c.b, c.x0, c.analytic, c.estimate.mean, c.estimate.stderr, c.z_score()].iter().map(|&v| m.num(v)).collect();
        row.push(c.within(3.0).to_string());
        m.push(row);
    }
    sink.save("check_mc.csv", &m)?;
    println!("{} checks, {} failed; wrote check.csv, check_mc.csv to {}", items.len(), failed, sink.dir.display());
    Ok(if failed == 0 { exit::OK } else { exit::CHECK_FAILED })
}
