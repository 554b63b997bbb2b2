//! One decision step of the lattice market: short synchronous consultation
//! rounds driven by trust-weighted local fields, followed by fundamentalist
//! overrides.
//!
//! Time indexing: while executing decision step `t` the price series holds
//! `P(0..=t)`. Trust weights and threshold rescaling only look at prices up to
//! `P(t-1)`; fundamentalists compare the latest price `P(t)` with the
//! fundamental value. The tallies of step `t` produce `P(t+1)`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::lattice::{init_grid, stream_rng, AgentGrid, SimConfig, Spin, Stream};
use crate::market::{clear_price, PriceSeries};
use crate::scalar::Real;

/// Last `tau` final spins of every agent, indexed by decision step.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinHistory {
    tau: usize,
    agents: usize,
    ring: Vec<Spin>,
    /// Number of steps recorded so far; the next step to record.
    recorded: usize,
}

impl SpinHistory {
    pub fn new(tau: usize, agents: usize) -> Self {
        SpinHistory {
            tau,
            agents,
            ring: vec![Spin::Inactive; tau * agents],
            recorded: 0,
        }
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    /// Step index of the oldest retained entry.
    pub fn oldest_step(&self) -> usize {
        self.recorded.saturating_sub(self.tau)
    }

    /// Number of steps recorded, i.e. one past the newest retained step.
    pub fn recorded(&self) -> usize {
        self.recorded
    }

    /// Appends the final spins of the next decision step.
    pub fn record(&mut self, spins: &[Spin]) {
        assert_eq!(spins.len(), self.agents, "spin vector has wrong length");
        let row = (self.recorded % self.tau) * self.agents;
        self.ring[row..row + self.agents].copy_from_slice(spins);
        self.recorded += 1;
    }

    pub fn get(&self, agent: usize, step: usize) -> Option<Spin> {
        if agent >= self.agents || step >= self.recorded || step < self.oldest_step() {
            return None;
        }
        Some(self.ring[(step % self.tau) * self.agents + agent])
    }
}

/// Fields and noise draws of one consultation round.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FieldSnapshot<F> {
    pub fields: Vec<F>,
    pub noise_draws: Vec<F>,
}

/// How neighbor influence enters the local field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FieldMode {
    /// `Y_i = Σ_j s_j J_ij + η_i`: a trusted neighbor pulls toward its current opinion.
    #[default]
    SpinWeighted,
    /// `Y_i = Σ_j J_ij + η_i`, the sum as literally printed.
    Literal,
}

/// Dynamic part of the trust weight for every agent at one step; the
/// influence of `j` on `i` is `W_ij + offsets[j]` (or `J_ij(0)` at step 0).
#[derive(Debug, Clone)]
enum TrustTerms<F> {
    Initial,
    Accumulated(Vec<F>),
}

impl<F: Real> TrustTerms<F> {
    fn at(t: usize, history: &SpinHistory, prices: &PriceSeries<F>, agents: usize) -> Result<Self> {
        if t == 0 {
            return Ok(TrustTerms::Initial);
        }
        check_window(t, history, prices)?;
        let latest = prices.ln_at(t - 1);
        let start = t.saturating_sub(history.tau());
        let mut offsets = vec![F::zero(); agents];
        for step in start..t {
            let gain = latest - prices.ln_at(step);
            if gain == F::zero() {
                continue;
            }
            for (j, off) in offsets.iter_mut().enumerate() {
                let spin = history.get(j, step).expect("window checked");
                *off = *off + spin.as_real::<F>() * gain;
            }
        }
        Ok(TrustTerms::Accumulated(offsets))
    }

    #[inline]
    fn weight(&self, grid: &AgentGrid<F>, i: usize, slot: usize, j: usize) -> F {
        match self {
            TrustTerms::Initial => F::of(f64::from(grid.initial_links[i][slot])),
            TrustTerms::Accumulated(off) => grid.static_weights[i][slot] + off[j],
        }
    }
}

fn check_window<F: Real>(t: usize, history: &SpinHistory, prices: &PriceSeries<F>) -> Result<()> {
    if prices.len() < t {
        return Err(Error::BadPrice {
            step: prices.len(),
            price: f64::NAN,
        });
    }
    let start = t.saturating_sub(history.tau());
    if history.recorded() < t || history.oldest_step() > start {
        return Err(Error::config(format!(
            "spin history covers steps {}..{}, step {t} needs {start}..{t}",
            history.oldest_step(),
            history.recorded()
        )));
    }
    Ok(())
}

/// Influence of agent `j` on its neighbor `i` at step `t`:
/// `W_ij + Σ_{τ'} σ_j(τ') ln(P(t-1)/P(τ'))` over `τ' ∈ [max(0, t-τ), t-1]`,
/// or the initial link `J_ij(0)` when `t = 0`.
pub fn trust_weight<F: Real>(
    j: usize,
    i: usize,
    t: usize,
    history: &SpinHistory,
    prices: &PriceSeries<F>,
    grid: &AgentGrid<F>,
) -> Result<F> {
    let slot = grid.slot_of(i, j)?;
    if t == 0 {
        return Ok(F::of(f64::from(grid.initial_links[i][slot])));
    }
    check_window(t, history, prices)?;
    let latest = prices.ln_at(t - 1);
    let mut acc = grid.static_weights[i][slot];
    for step in t.saturating_sub(history.tau())..t {
        let spin = history.get(j, step).expect("window checked");
        acc = acc + spin.as_real::<F>() * (latest - prices.ln_at(step));
    }
    Ok(acc)
}

#[inline]
fn field_from<F: Real>(
    i: usize,
    spins: &[Spin],
    grid: &AgentGrid<F>,
    trust: &TrustTerms<F>,
    mode: FieldMode,
    eta: F,
) -> F {
    let mut y = eta;
    for (slot, &j) in grid.neighbors_of(i).iter().enumerate() {
        let w = trust.weight(grid, i, slot, j);
        y = y + match mode {
            FieldMode::SpinWeighted => spins[j].as_real::<F>() * w,
            FieldMode::Literal => w,
        };
    }
    y
}

fn draw_noise<F: Real>(rng: &mut ChaCha8Rng, sigma: F) -> F {
    sigma * F::of(rng.sample::<f64, _>(StandardNormal))
}

/// Local field of agent `i` given the current-round spins, with a fresh
/// `N(0, noise_sigma²)` draw from `rng`.
#[allow(clippy::too_many_arguments)]
pub fn local_field<F: Real>(
    i: usize,
    t: usize,
    round_spins: &[Spin],
    history: &SpinHistory,
    prices: &PriceSeries<F>,
    grid: &AgentGrid<F>,
    noise_sigma: F,
    mode: FieldMode,
    rng: &mut ChaCha8Rng,
) -> Result<F> {
    if i >= grid.len() {
        return Err(Error::AgentOutOfRange {
            index: i,
            agents: grid.len(),
        });
    }
    let trust = TrustTerms::at(t, history, prices, grid.len())?;
    let eta = draw_noise(rng, noise_sigma);
    Ok(field_from(i, round_spins, grid, &trust, mode, eta))
}

/// Three-band decision rule. The buy branch is tested first, so `Y = ξ = 0` buys.
pub fn apply_spin_rule<F: Real>(field: F, threshold: F) -> Spin {
    if field >= threshold {
        Spin::Buy
    } else if field <= -threshold {
        Spin::Sell
    } else {
        Spin::Inactive
    }
}

/// Multiplies every threshold by `P(t-1)/P(t-2)`.
pub fn rescale_thresholds<F: Real>(grid: &mut AgentGrid<F>, p_prev: F, p_prev2: F) -> Result<()> {
    for (step, p) in [(1, p_prev), (0, p_prev2)] {
        if !(p.is_finite() && p > F::zero()) {
            return Err(Error::BadPrice {
                step,
                price: p.as_f64(),
            });
        }
    }
    let ratio = p_prev / p_prev2;
    for xi in &mut grid.thresholds {
        *xi = *xi * ratio;
    }
    Ok(())
}

/// With probability `p_fund` the agent trades on the fundamental price:
/// sell above `a * fundamental`, buy below `fundamental / b`, otherwise stay
/// inactive. `None` means the consultation outcome stands. Exactly one
/// uniform is drawn per call.
pub fn fundamentalist_override<F: Real>(
    p_market: F,
    config: &SimConfig,
    rng: &mut ChaCha8Rng,
) -> Option<Spin> {
    let coin: f64 = rng.random();
    if coin >= config.p_fund {
        return None;
    }
    let fundamental = F::of(config.fundamental_price);
    Some(if p_market > F::of(config.a) * fundamental {
        Spin::Sell
    } else if p_market < fundamental / F::of(config.b) {
        Spin::Buy
    } else {
        Spin::Inactive
    })
}

/// Tally of one decision step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome<F> {
    pub demand: usize,
    pub supply: usize,
    /// Fields of the final consultation round.
    pub last_round: FieldSnapshot<F>,
}

/// Full mutable state of one simulation.
#[derive(Debug, Clone)]
pub struct Simulation<F> {
    config: SimConfig,
    mode: FieldMode,
    grid: AgentGrid<F>,
    history: SpinHistory,
    prices: PriceSeries<F>,
    noise_rng: ChaCha8Rng,
    fund_rng: ChaCha8Rng,
    step: usize,
}

impl<F: Real> Simulation<F> {
    pub fn new(config: &SimConfig) -> Result<Self> {
        Self::with_mode(config, FieldMode::default())
    }

    pub fn with_mode(config: &SimConfig, mode: FieldMode) -> Result<Self> {
        let grid = init_grid(config)?;
        Self::from_grid(config, grid, mode)
    }

    /// Starts from an explicitly prepared grid.
    pub fn from_grid(config: &SimConfig, grid: AgentGrid<F>, mode: FieldMode) -> Result<Self> {
        config.validate()?;
        if grid.side() != config.lattice_side {
            return Err(Error::config("grid side does not match lattice_side"));
        }
        Ok(Simulation {
            history: SpinHistory::new(config.tau, config.agents()),
            prices: PriceSeries::new(F::of(config.initial_price))?,
            noise_rng: stream_rng(config.seed, Stream::Noise),
            fund_rng: stream_rng(config.seed, Stream::Fundamental),
            config: config.clone(),
            mode,
            grid,
            step: 0,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn grid(&self) -> &AgentGrid<F> {
        &self.grid
    }

    pub fn grid_mut(&mut self) -> &mut AgentGrid<F> {
        &mut self.grid
    }

    pub fn history(&self) -> &SpinHistory {
        &self.history
    }

    pub fn prices(&self) -> &PriceSeries<F> {
        &self.prices
    }

    /// Index of the next decision step.
    pub fn step(&self) -> usize {
        self.step
    }

    /// Runs the consultation rounds and overrides of the current step and
    /// records the final spins. Does not move the price.
    pub fn decision_step(&mut self) -> Result<StepOutcome<F>> {
        let t = self.step;
        let n = self.grid.len();
        let trust = TrustTerms::at(t, &self.history, &self.prices, n)?;
        let sigma = F::of(self.config.noise_sigma);

        let mut current = self.grid.spins.clone();
        let mut next = vec![Spin::Inactive; n];
        let mut snapshot = FieldSnapshot {
            fields: vec![F::zero(); n],
            noise_draws: vec![F::zero(); n],
        };
        for _ in 0..self.config.rounds {
            for (i, spin) in next.iter_mut().enumerate() {
                let eta = draw_noise(&mut self.noise_rng, sigma);
                let y = field_from(i, &current, &self.grid, &trust, self.mode, eta);
                snapshot.noise_draws[i] = eta;
                snapshot.fields[i] = y;
                *spin = apply_spin_rule(y, self.grid.thresholds[i]);
            }
            std::mem::swap(&mut current, &mut next);
        }

        let market = self.prices.last();
        for spin in current.iter_mut() {
            if let Some(forced) = fundamentalist_override(market, &self.config, &mut self.fund_rng)
            {
                *spin = forced;
            }
        }

        let demand = current.iter().filter(|&&s| s == Spin::Buy).count();
        let supply = current.iter().filter(|&&s| s == Spin::Sell).count();
        self.history.record(&current);
        self.grid.spins = current;
        Ok(StepOutcome {
            demand,
            supply,
            last_round: snapshot,
        })
    }

    /// One trading day: threshold rescaling, the decision step and price clearing.
    pub fn advance(&mut self) -> Result<StepOutcome<F>> {
        let t = self.step;
        if t >= 2 {
            let p = self.prices.prices();
            rescale_thresholds(&mut self.grid, p[t - 1], p[t - 2])?;
        }
        let outcome = self.decision_step()?;
        let next = clear_price(
            self.prices.last(),
            outcome.demand,
            outcome.supply,
            self.grid.len(),
            F::of(self.config.alpha),
        )?;
        self.prices.push(next)?;
        self.step += 1;
        Ok(outcome)
    }

    /// Advances until the price series holds `config.steps` prices.
    pub fn run_to_end(&mut self) -> Result<&PriceSeries<F>> {
        while self.prices.len() < self.config.steps {
            self.advance()?;
        }
        Ok(&self.prices)
    }
}

/// Runs a full simulation and returns its price series.
pub fn simulate<F: Real>(config: &SimConfig, mode: FieldMode) -> Result<PriceSeries<F>> {
    let mut sim = Simulation::with_mode(config, mode)?;
    sim.run_to_end()?;
    Ok(sim.prices)
}
