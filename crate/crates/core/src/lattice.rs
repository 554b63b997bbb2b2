//! The agent lattice: run configuration, per-agent state and the periodic
//! four-neighbor topology.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Smallest lattice side for which the four neighbors of every agent are distinct.
pub const MIN_SIDE: usize = 3;

/// Every model and run parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Agents per lattice row; the lattice holds `lattice_side²` agents.
    pub lattice_side: usize,
    /// Chance that an initial link J_ij(0) equals 1.
    pub p: f64,
    /// Memory length of the trust term, in decision steps.
    pub tau: usize,
    /// Chance that an agent trades on the fundamental price in a given step.
    pub p_fund: f64,
    /// Overpricing factor: fundamentalists sell above `a * fundamental_price`.
    pub a: f64,
    /// Underpricing factor: fundamentalists buy below `fundamental_price / b`.
    pub b: f64,
    /// Price-impact scale.
    pub alpha: f64,
    /// Standard deviation of the idiosyncratic field noise.
    pub noise_sigma: f64,
    /// Consultation rounds per decision step.
    pub rounds: usize,
    /// Trading days, i.e. the length of the price series.
    pub steps: usize,
    pub fundamental_price: f64,
    pub initial_price: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            lattice_side: 32,
            p: 0.5,
            tau: 24,
            p_fund: 0.9,
            a: 1.5,
            b: 1.5,
            alpha: 1.0,
            noise_sigma: 1.0,
            rounds: 4,
            steps: 8400,
            fundamental_price: 100.0,
            initial_price: 100.0,
            seed: 1,
        }
    }
}

impl SimConfig {
    pub fn agents(&self) -> usize {
        self.lattice_side * self.lattice_side
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::config(format!("{name} = {v} must lie in [0, 1]")))
            }
        };
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(format!(
                    "{name} = {v} must be finite and > 0"
                )))
            }
        };
        if self.lattice_side < MIN_SIDE {
            return Err(Error::config(format!(
                "lattice_side = {} must be at least {MIN_SIDE}",
                self.lattice_side
            )));
        }
        unit("p", self.p)?;
        unit("p_fund", self.p_fund)?;
        if self.tau < 2 {
            return Err(Error::config(format!("tau = {} must be >= 2", self.tau)));
        }
        for (name, v) in [("a", self.a), ("b", self.b)] {
            if !(v.is_finite() && v > 1.0) {
                return Err(Error::config(format!("{name} = {v} must be > 1")));
            }
        }
        positive("alpha", self.alpha)?;
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::config(format!(
                "noise_sigma = {} must be finite and >= 0",
                self.noise_sigma
            )));
        }
        if self.rounds == 0 {
            return Err(Error::config("rounds must be >= 1"));
        }
        if self.steps == 0 {
            return Err(Error::config("steps must be >= 1"));
        }
        positive("fundamental_price", self.fundamental_price)?;
        positive("initial_price", self.initial_price)?;
        // config files store integers as i64
        if self.seed > i64::MAX as u64 {
            return Err(Error::config(format!(
                "seed = {} must not exceed {}",
                self.seed,
                i64::MAX
            )));
        }
        Ok(())
    }
}

/// Independent random streams derived from the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Init = 0,
    Noise = 1,
    Fundamental = 2,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// An agent's stance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[repr(i8)]
pub enum Spin {
    Sell = -1,
    #[default]
    Inactive = 0,
    Buy = 1,
}

impl Spin {
    pub fn value(self) -> i8 {
        self as i8
    }

    pub fn as_real<F: Real>(self) -> F {
        match self {
            Spin::Sell => -F::one(),
            Spin::Inactive => F::zero(),
            Spin::Buy => F::one(),
        }
    }
}

/// Up, down, left and right neighbors of `index` on a `side × side` torus.
pub fn neighbors(index: usize, side: usize) -> Result<[usize; 4]> {
    let agents = side * side;
    if index >= agents {
        return Err(Error::AgentOutOfRange { index, agents });
    }
    let (row, col) = (index / side, index % side);
    let up = ((row + side - 1) % side) * side + col;
    let down = ((row + 1) % side) * side + col;
    let left = row * side + (col + side - 1) % side;
    let right = row * side + (col + 1) % side;
    Ok([up, down, left, right])
}

/// Per-agent state. Weights and links are stored per receiving agent `i`
/// and neighbor slot `k`, where slot `k` refers to `neighbors(i)[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentGrid<F> {
    side: usize,
    topology: Vec<[usize; 4]>,
    pub spins: Vec<Spin>,
    pub thresholds: Vec<F>,
    /// W_ij: static influence of neighbor slot `k` on agent `i`.
    pub static_weights: Vec<[F; 4]>,
    /// J_ij(0) in {0, 1}.
    pub initial_links: Vec<[u8; 4]>,
}

impl<F: Real> AgentGrid<F> {
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn neighbors_of(&self, i: usize) -> &[usize; 4] {
        &self.topology[i]
    }

    /// Slot of `j` among the neighbors of `i`.
    pub fn slot_of(&self, i: usize, j: usize) -> Result<usize> {
        let agents = self.len();
        if i >= agents || j >= agents {
            return Err(Error::AgentOutOfRange {
                index: i.max(j),
                agents,
            });
        }
        self.topology[i]
            .iter()
            .position(|&n| n == j)
            .ok_or(Error::NotNeighbor { from: j, to: i })
    }

    pub fn static_weight(&self, j: usize, i: usize) -> Result<F> {
        let k = self.slot_of(i, j)?;
        Ok(self.static_weights[i][k])
    }

    pub fn initial_link(&self, j: usize, i: usize) -> Result<u8> {
        let k = self.slot_of(i, j)?;
        Ok(self.initial_links[i][k])
    }
}

/// Builds the lattice with all agents inactive, thresholds |N(0,1)|,
/// W_ij ~ U[0,1) and J_ij(0) ~ Bernoulli(p), all from the init stream.
pub fn init_grid<F: Real>(config: &SimConfig) -> Result<AgentGrid<F>> {
    config.validate()?;
    let side = config.lattice_side;
    let n = config.agents();
    let mut rng = stream_rng(config.seed, Stream::Init);

    let topology = (0..n)
        .map(|i| neighbors(i, side))
        .collect::<Result<Vec<_>>>()?;
    let thresholds = (0..n)
        .map(|_| F::of(rng.sample::<f64, _>(StandardNormal).abs()))
        .collect();
    let static_weights = (0..n)
        .map(|_| std::array::from_fn(|_| F::of(rng.random::<f64>())))
        .collect();
    let initial_links = (0..n)
        .map(|_| std::array::from_fn(|_| u8::from(rng.random::<f64>() < config.p)))
        .collect();

    Ok(AgentGrid {
        side,
        topology,
        spins: vec![Spin::Inactive; n],
        thresholds,
        static_weights,
        initial_links,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;

    fn small(side: usize, p: f64) -> SimConfig {
        SimConfig {
            lattice_side: side,
            p,
            ..SimConfig::default()
        }
    }

    #[test]
    fn corner_neighbors_wrap() {
        let got: BTreeSet<_> = neighbors(0, 4).unwrap().into_iter().collect();
        assert_eq!(got, BTreeSet::from([1, 3, 4, 12]));
    }

    #[test]
    fn center_neighbors() {
        assert_eq!(neighbors(12, 5).unwrap(), [7, 17, 11, 13]);
    }

    #[test]
    fn neighbor_index_out_of_range() {
        assert!(matches!(
            neighbors(16, 4),
            Err(Error::AgentOutOfRange {
                index: 16,
                agents: 16
            })
        ));
    }

    #[test]
    fn side_two_collapses_and_is_rejected() {
        // left and right coincide on a 2-wide torus
        let nb = neighbors(0, 2).unwrap();
        let distinct: BTreeSet<_> = nb.into_iter().collect();
        assert_eq!(distinct.len(), 2);
        assert!(init_grid::<f64>(&small(2, 0.5)).is_err());
    }

    #[test]
    fn degenerate_link_probabilities() {
        let ones = init_grid::<f64>(&small(6, 1.0)).unwrap();
        assert!(ones.initial_links.iter().flatten().all(|&l| l == 1));
        let zeros = init_grid::<f64>(&small(6, 0.0)).unwrap();
        assert!(zeros.initial_links.iter().flatten().all(|&l| l == 0));
    }

    #[test]
    fn same_seed_same_grid() {
        let cfg = small(8, 0.3);
        let a = init_grid::<f64>(&cfg).unwrap();
        let b = init_grid::<f64>(&cfg).unwrap();
        assert_eq!(a, b);
        let bits = |g: &AgentGrid<f64>| -> Vec<u64> {
            g.thresholds
                .iter()
                .chain(g.static_weights.iter().flatten())
                .map(|x| x.to_bits())
                .collect()
        };
        assert_eq!(bits(&a), bits(&b));
        let c = init_grid::<f64>(&SimConfig { seed: 2, ..cfg }).unwrap();
        assert_ne!(a.thresholds, c.thresholds);
    }

    #[test]
    fn init_state_ranges() {
        let g = init_grid::<f32>(&small(10, 0.5)).unwrap();
        assert_eq!(g.len(), 100);
        assert!(g.spins.iter().all(|&s| s == Spin::Inactive));
        assert!(g.thresholds.iter().all(|&x| x >= 0.0));
        assert!(g
            .static_weights
            .iter()
            .flatten()
            .all(|&w| (0.0..=1.0).contains(&w)));
    }

    #[test]
    fn weights_are_directional() {
        let g = init_grid::<f64>(&small(5, 0.5)).unwrap();
        let (i, j) = (12, 13);
        assert_ne!(
            g.static_weight(j, i).unwrap(),
            g.static_weight(i, j).unwrap()
        );
        assert!(matches!(
            g.static_weight(0, 12),
            Err(Error::NotNeighbor { .. })
        ));
    }

    #[test]
    fn validation_rejects_bad_values() {
        let base = SimConfig::default();
        assert!(base.validate().is_ok());
        for bad in [
            SimConfig {
                a: 1.0,
                ..base.clone()
            },
            SimConfig {
                b: 0.9,
                ..base.clone()
            },
            SimConfig {
                tau: 1,
                ..base.clone()
            },
            SimConfig {
                p: 1.5,
                ..base.clone()
            },
            SimConfig {
                p_fund: -0.1,
                ..base.clone()
            },
            SimConfig {
                alpha: 0.0,
                ..base.clone()
            },
            SimConfig {
                noise_sigma: -1.0,
                ..base.clone()
            },
            SimConfig {
                rounds: 0,
                ..base.clone()
            },
            SimConfig {
                initial_price: 0.0,
                ..base.clone()
            },
            SimConfig {
                seed: u64::MAX,
                ..base.clone()
            },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn streams_are_independent() {
        let mut a = stream_rng(7, Stream::Init);
        let mut b = stream_rng(7, Stream::Noise);
        assert_ne!(a.random::<u64>(), b.random::<u64>());
    }
}
