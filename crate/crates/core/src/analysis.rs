//! Distributions over lattice sites, convergence metrics, and seeded
//! multi-trial aggregation.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::boxball::{self, RunConfig};
use crate::coin::{CoinSchedule, QubitSpec};
use crate::quantum::AmplitudeField;
use crate::rng::stream_rng;
use crate::Result;

/// Normalized probability mass over integer sites. Zero-mass sites are not
/// stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    mass: BTreeMap<i64, f64>,
}

impl Distribution {
    /// Normalize nonnegative weights (probabilities, ball counts, trial
    /// counts) into a distribution. Zero weights are dropped; the total must
    /// be positive.
    pub fn from_weights(weights: impl IntoIterator<Item = (i64, f64)>) -> Distribution {
        let mut mass = BTreeMap::new();
        let mut total = 0.0;
        for (x, w) in weights {
            assert!(
                w.is_finite() && w >= 0.0,
                "weight at site {x} must be a finite nonnegative number, got {w}"
            );
            if w > 0.0 {
                *mass.entry(x).or_insert(0.0) += w;
                total += w;
            }
        }
        assert!(total > 0.0, "a distribution needs positive total weight");
        if total != 1.0 {
            for v in mass.values_mut() {
                *v /= total;
            }
        }
        Distribution { mass }
    }

    /// Probability at `x`; zero off support.
    pub fn mass_at(&self, x: i64) -> f64 {
        self.mass.get(&x).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.mass.iter().map(|(x, p)| (*x, *p))
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// Smallest and largest site carrying mass.
    pub fn support(&self) -> (i64, i64) {
        let lo = *self.mass.keys().next().expect("nonempty by construction");
        let hi = *self
            .mass
            .keys()
            .next_back()
            .expect("nonempty by construction");
        (lo, hi)
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.values().sum()
    }
}

/// Total variation distance `(1/2) Σ |p(x) - q(x)|` over the union support.
///
/// Terms are accumulated in site order regardless of argument order, so the
/// result is exactly symmetric.
pub fn total_variation(p: &Distribution, q: &Distribution) -> f64 {
    let mut a = p.iter().peekable();
    let mut b = q.iter().peekable();
    let mut sum = 0.0;
    loop {
        sum += match (a.peek().copied(), b.peek().copied()) {
            (Some((xa, ma)), Some((xb, mb))) => match xa.cmp(&xb) {
                std::cmp::Ordering::Less => {
                    a.next();
                    ma
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                    mb
                }
                std::cmp::Ordering::Equal => {
                    a.next();
                    b.next();
                    (ma - mb).abs()
                }
            },
            (Some((_, ma)), None) => {
                a.next();
                ma
            }
            (None, Some((_, mb))) => {
                b.next();
                mb
            }
            (None, None) => break,
        };
    }
    sum / 2.0
}

/// Mean and standard deviation of the site coordinate.
pub fn spreading_moments(p: &Distribution) -> (f64, f64) {
    let mean: f64 = p.iter().map(|(x, m)| x as f64 * m).sum();
    let var: f64 = p
        .iter()
        .map(|(x, m)| {
            let d = x as f64 - mean;
            d * d * m
        })
        .sum();
    (mean, var.sqrt())
}

/// First index at which the trajectory visits `target`, if it ever does.
pub fn first_passage_time(trajectory: &[i64], target: i64) -> Option<usize> {
    trajectory.iter().position(|&x| x == target)
}

/// Everything retained from one engine trial.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub endpoint: i64,
    pub occupation: Distribution,
    pub trajectory: Vec<i64>,
}

/// Fold of many trials: endpoint histogram, mean occupation fractions, and
/// optionally the raw trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialAggregate {
    trials: u64,
    endpoint_counts: BTreeMap<i64, u64>,
    mean_occupation: Distribution,
    trajectories: Option<Vec<Vec<i64>>>,
}

impl TrialAggregate {
    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn endpoint_counts(&self) -> &BTreeMap<i64, u64> {
        &self.endpoint_counts
    }

    /// Endpoint histogram normalized to a distribution.
    pub fn endpoint_distribution(&self) -> Distribution {
        Distribution::from_weights(self.endpoint_counts.iter().map(|(x, n)| (*x, *n as f64)))
    }

    /// Occupation fractions averaged over trials.
    pub fn mean_occupation(&self) -> &Distribution {
        &self.mean_occupation
    }

    pub fn trajectories(&self) -> Option<&[Vec<i64>]> {
        self.trajectories.as_deref()
    }
}

/// Run `trials` independent jobs (parallel fan-out, trial-order fold).
///
/// `run` receives the trial index and must derive its own RNG stream from
/// it; results do not depend on scheduling.
pub fn aggregate_with(
    trials: u64,
    keep_trajectories: bool,
    run: impl Fn(u64) -> Result<TrialOutcome> + Send + Sync,
) -> Result<TrialAggregate> {
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(run)
        .collect::<Result<Vec<_>>>()?;

    let mut endpoint_counts: BTreeMap<i64, u64> = BTreeMap::new();
    let mut occupation_sum: BTreeMap<i64, f64> = BTreeMap::new();
    for outcome in &outcomes {
        *endpoint_counts.entry(outcome.endpoint).or_insert(0) += 1;
        for (x, m) in outcome.occupation.iter() {
            *occupation_sum.entry(x).or_insert(0.0) += m;
        }
    }
    let mean_occupation = Distribution::from_weights(occupation_sum);
    let trajectories =
        keep_trajectories.then(|| outcomes.into_iter().map(|o| o.trajectory).collect());
    Ok(TrialAggregate {
        trials,
        endpoint_counts,
        mean_occupation,
        trajectories,
    })
}

/// Box-engine trial aggregation: trial `i` runs on stream `i` of the
/// config's seed, measures the final state, and reports its endpoint,
/// occupation fractions, and marked-ball trajectory.
pub fn aggregate_trials(cfg: &RunConfig, keep_trajectories: bool) -> Result<TrialAggregate> {
    aggregate_with(cfg.trials(), keep_trajectories, |trial| {
        let mut rng = stream_rng(cfg.seed(), trial);
        let (state, trajectory) = boxball::run_lattice(cfg, &mut rng)?;
        let (endpoint, _) = state.measure();
        Ok(TrialOutcome {
            endpoint,
            occupation: state.occupation_distribution(),
            trajectory,
        })
    })
}

/// One row of a convergence sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub total: u64,
    pub tv: f64,
}

/// For each ball count, average the box engine's TV distance to the exact
/// walk over `trials` seeded runs. Streams are indexed the same way for
/// every ball count, so repeating a sweep reproduces it exactly.
pub fn convergence_sweep(
    coins: &CoinSchedule,
    initial: &QubitSpec,
    steps: u32,
    trials: u64,
    seed: u64,
    totals: &[u64],
) -> Result<Vec<SweepPoint>> {
    let oracle = AmplitudeField::evolve(initial, coins, steps).position_distribution();
    totals
        .iter()
        .map(|&total| {
            let cfg = RunConfig::new(coins.clone(), *initial, total, steps, seed, trials)?;
            let sum: f64 = (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = stream_rng(seed, trial);
                    let (state, _) = boxball::run_lattice(&cfg, &mut rng)?;
                    Ok(total_variation(&state.occupation_distribution(), &oracle))
                })
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .sum();
            Ok(SweepPoint {
                total,
                tv: sum / trials as f64,
            })
        })
        .collect()
}
