//! Monte Carlo estimator of `v_{a,b}(x)` by direct simulation of the
//! controlled surplus.
//!
//! Without diffusion the path is simulated exactly between jumps (linear
//! drift, closed-form crossing times and discount integrals). With diffusion
//! an Euler scheme is used. Paths draw from independent ChaCha8 streams keyed
//! by path index, so results do not depend on the thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::valuation::{Problem, Strategy};

/// Discount factor at which the default horizon truncates.
pub const DEFAULT_TAIL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n_paths: usize,
    /// Truncation time; `None` picks `ln(1/DEFAULT_TAIL)/q`.
    pub horizon: Option<f64>,
    /// Euler step, used only when `sigma > 0`.
    pub dt: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { n_paths: 100_000, horizon: None, dt: 1e-3, seed: 0 }
    }
}

impl SimConfig {
    pub fn horizon_for(&self, q: f64) -> f64 {
        self.horizon.unwrap_or_else(|| (1.0 / DEFAULT_TAIL).ln() / q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n_paths)`.
    pub stderr: f64,
    pub n_paths: usize,
    /// Fraction of paths ruined before the horizon.
    pub ruin_fraction: f64,
}

impl McEstimate {
    /// `(mean - target) / stderr`, or 0 when both agree to rounding.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = self.mean - target;
        if d.abs() <= 1e-12 * target.abs().max(1.0) {
            0.0
        } else {
            d / self.stderr
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventType {
    /// Upward jump of the uncontrolled surplus (`amount` = jump size).
    Jump,
    /// Downward crossing of the refraction level `a`.
    CrossA,
    /// Lump-sum dividend at the barrier `b`.
    Reflect,
    /// Surplus fell below zero; `amount` is the terminal payoff.
    Ruin,
    /// Path truncated at the horizon.
    Horizon,
}

impl EventType {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventType::Jump => "jump",
            EventType::CrossA => "cross_a",
            EventType::Reflect => "reflect",
            EventType::Ruin => "ruin",
            EventType::Horizon => "horizon",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub kind: EventType,
    pub amount: f64,
    pub surplus_after: f64,
    /// Discounted refraction dividends paid so far.
    pub discounted_cum_a: f64,
    /// Discounted lump-sum dividends paid so far (not weighted by `beta`).
    pub discounted_cum_s: f64,
}

/// Result of one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathOutcome {
    pub payoff: f64,
    pub ruined: bool,
}

struct Ctx<'a> {
    problem: &'a Problem,
    a: f64,
    b: f64,
    horizon: f64,
    dt: f64,
}

struct Ledger<'a> {
    q: f64,
    cum_a: f64,
    cum_s: f64,
    trace: Option<&'a mut Vec<Event>>,
}

impl Ledger<'_> {
    fn record(&mut self, time: f64, kind: EventType, amount: f64, surplus: f64) {
        if let Some(t) = self.trace.as_deref_mut() {
            t.push(Event {
                time,
                kind,
                amount,
                surplus_after: surplus,
                discounted_cum_a: self.cum_a,
                discounted_cum_s: self.cum_s,
            });
        }
    }

    fn pay_s(&mut self, time: f64, amount: f64, surplus: f64) {
        self.cum_s += (-self.q * time).exp() * amount;
        self.record(time, EventType::Reflect, amount, surplus);
    }

    /// Dividends at rate `delta` over `[t1, t2]`.
    fn accrue_a(&mut self, delta: f64, t1: f64, t2: f64) {
        self.cum_a += delta * ((-self.q * t1).exp() - (-self.q * t2).exp()) / self.q;
    }

    fn finish(&self, beta: f64, terminal: f64) -> f64 {
        self.cum_a + beta * self.cum_s + terminal
    }
}

fn check_inputs(problem: &Problem, x0: f64, config: &SimConfig) -> Result<()> {
    if !(x0 >= 0.0) {
        return Err(Error::NegativeStart(x0));
    }
    if config.n_paths == 0 {
        return Err(Error::InvalidConfig("n_paths must be positive".into()));
    }
    if problem.model().sigma() > 0.0 && !(config.dt > 0.0 && config.dt.is_finite()) {
        return Err(Error::InvalidConfig(format!("dt = {} must be positive when sigma > 0", config.dt)));
    }
    if let Some(h) = config.horizon {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidConfig(format!("horizon = {h} must be positive")));
        }
    }
    Ok(())
}

/// Random stream for one path.
pub fn path_rng(seed: u64, path_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_index);
    rng
}

/// Estimate `v_{a,b}(x0)` from `config.n_paths` independent paths.
pub fn simulate_value(problem: &Problem, strategy: Strategy, x0: f64, config: &SimConfig) -> Result<McEstimate> {
    check_inputs(problem, x0, config)?;
    let ctx = Ctx {
        problem,
        a: strategy.a,
        b: strategy.b,
        horizon: config.horizon_for(problem.q()),
        dt: config.dt,
    };
    let outcomes: Vec<PathOutcome> = (0..config.n_paths as u64)
        .into_par_iter()
        .map(|i| run_path(&ctx, x0, &mut path_rng(config.seed, i), None))
        .collect();
    let n = outcomes.len() as f64;
    let mut sum = 0.0;
    let mut ruined = 0usize;
    for o in &outcomes {
        sum += o.payoff;
        ruined += o.ruined as usize;
    }
    let mean = sum / n;
    let mut ss = 0.0;
    for o in &outcomes {
        ss += (o.payoff - mean).powi(2);
    }
    let var = if outcomes.len() > 1 { ss / (n - 1.0) } else { 0.0 };
    Ok(McEstimate { mean, stderr: (var / n).sqrt(), n_paths: outcomes.len(), ruin_fraction: ruined as f64 / n })
}

/// Payoff of the single path `path_index` under `seed`, as used inside
/// [`simulate_value`].
pub fn simulate_path(
    problem: &Problem,
    strategy: Strategy,
    x0: f64,
    config: &SimConfig,
    path_index: u64,
) -> Result<PathOutcome> {
    check_inputs(problem, x0, config)?;
    let ctx = Ctx { problem, a: strategy.a, b: strategy.b, horizon: config.horizon_for(problem.q()), dt: config.dt };
    Ok(run_path(&ctx, x0, &mut path_rng(config.seed, path_index), None))
}

/// Chronological events of path 0 under `config.seed`.
pub fn simulate_path_trace(problem: &Problem, strategy: Strategy, x0: f64, config: &SimConfig) -> Result<Vec<Event>> {
    check_inputs(problem, x0, config)?;
    let ctx = Ctx { problem, a: strategy.a, b: strategy.b, horizon: config.horizon_for(problem.q()), dt: config.dt };
    let mut events = Vec::new();
    run_path(&ctx, x0, &mut path_rng(config.seed, 0), Some(&mut events));
    Ok(events)
}

/// Writes events as CSV with a fixed header, numbers rendered by `num`.
pub fn write_trace_csv<W, F>(events: &[Event], mut out: W, num: F) -> std::io::Result<()>
where
    W: std::io::Write,
    F: Fn(f64) -> String,
{
    writeln!(out, "time,event_type,amount,surplus_after,discounted_cum_A,discounted_cum_S")?;
    for e in events {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            num(e.time),
            e.kind.as_str(),
            num(e.amount),
            num(e.surplus_after),
            num(e.discounted_cum_a),
            num(e.discounted_cum_s),
        )?;
    }
    out.flush()
}

fn run_path(ctx: &Ctx, x0: f64, rng: &mut ChaCha8Rng, trace: Option<&mut Vec<Event>>) -> PathOutcome {
    let p = ctx.problem;
    let mut ledger = Ledger { q: p.q(), cum_a: 0.0, cum_s: 0.0, trace };
    let beta = p.beta();
    let mut u = x0;
    if u > ctx.b {
        let lump = u - ctx.b;
        u = ctx.b;
        ledger.pay_s(0.0, lump, u);
    }
    let end = if p.model().sigma() > 0.0 {
        euler_path(ctx, u, rng, &mut ledger)
    } else {
        exact_path(ctx, u, rng, &mut ledger)
    };
    match end {
        Some(tau) => {
            let terminal = (-p.q() * tau).exp() * p.rho();
            ledger.record(tau, EventType::Ruin, p.rho(), 0.0);
            PathOutcome { payoff: ledger.finish(beta, terminal), ruined: true }
        }
        None => PathOutcome { payoff: ledger.finish(beta, 0.0), ruined: false },
    }
}

/// Exact simulation for bounded-variation paths; returns the ruin time.
fn exact_path(ctx: &Ctx, mut u: f64, rng: &mut ChaCha8Rng, ledger: &mut Ledger) -> Option<f64> {
    let model = ctx.problem.model();
    let (c_y, c_x, delta) = (model.c_y(), model.c_x(), model.delta());
    let inter = Exp::new(model.kappa()).expect("kappa > 0");
    let (a, b) = (ctx.a, ctx.b);
    let mut t = 0.0;
    loop {
        let next_jump = t + inter.sample(rng);
        // drift down until the jump, the horizon, or ruin
        let stop = next_jump.min(ctx.horizon);
        if u > a {
            let hit_a = t + (u - a) / c_x;
            let t_end = stop.min(hit_a);
            ledger.accrue_a(delta, t, t_end);
            if hit_a <= stop {
                u = a;
                t = hit_a;
                if a == 0.0 {
                    return Some(t);
                }
                ledger.record(t, EventType::CrossA, 0.0, u);
            } else {
                u -= (t_end - t) * c_x;
                t = t_end;
            }
        }
        if u <= a && t < stop {
            let hit_0 = t + u / c_y;
            if hit_0 <= stop {
                return Some(hit_0);
            }
            u -= (stop - t) * c_y;
            t = stop;
        }
        if next_jump >= ctx.horizon {
            ledger.record(ctx.horizon, EventType::Horizon, 0.0, u);
            return None;
        }
        let z = model.jumps().sample(rng);
        u += z;
        if u > b {
            ledger.record(t, EventType::Jump, z, b);
            let lump = u - b;
            u = b;
            ledger.pay_s(t, lump, u);
        } else {
            ledger.record(t, EventType::Jump, z, u);
        }
    }
}

/// Euler scheme with exact jump times; the drift on each step is set by the
/// state at its start. Returns the ruin time.
fn euler_path(ctx: &Ctx, mut u: f64, rng: &mut ChaCha8Rng, ledger: &mut Ledger) -> Option<f64> {
    let model = ctx.problem.model();
    let (c_y, c_x, delta, sigma) = (model.c_y(), model.c_x(), model.delta(), model.sigma());
    let inter = Exp::new(model.kappa()).expect("kappa > 0");
    let (a, b) = (ctx.a, ctx.b);
    let mut t = 0.0;
    let mut next_jump = inter.sample(rng);
    if u <= 0.0 {
        // diffusion leaves zero downward immediately
        return Some(0.0);
    }
    while t < ctx.horizon {
        let h = ctx.dt.min(ctx.horizon - t);
        let refracted = u > a;
        let drift = if refracted { c_x } else { c_y };
        if refracted {
            ledger.accrue_a(delta, t, t + h);
        }
        let n: f64 = StandardNormal.sample(rng);
        let was_above = u > a;
        u += -drift * h + sigma * h.sqrt() * n;
        t += h;
        while next_jump <= t {
            let z = model.jumps().sample(rng);
            u += z;
            ledger.record(t, EventType::Jump, z, u.min(b));
            next_jump += inter.sample(rng);
        }
        if u < 0.0 {
            return Some(t);
        }
        if u > b {
            let lump = u - b;
            u = b;
            ledger.pay_s(t, lump, u);
        }
        if was_above && u <= a {
            ledger.record(t, EventType::CrossA, 0.0, u);
        }
    }
    ledger.record(t, EventType::Horizon, 0.0, u);
    None
}
