//! Active-spin engine: particles with spin `s = ±1`, density-coupled spin
//! flips, and spin-biased hopping.
//!
//! Spins flip toward a per-site target count `ñ⁺` (the same mix target the
//! box engine uses) at rates that vanish when the site is balanced; every
//! particle then hops right with probability `D(1 + εs)` and left with
//! probability `D(1 - εs)` under a unit-time discretization. At `D = 0.5`,
//! `ε = 1` the hop is the conditional shift and the engine reproduces the
//! box engine bit for bit when fed the same stream.

use rand::Rng;
use rand_distr::{Binomial, Distribution as _};

use crate::analysis::Distribution;
use crate::boxball::{BoxLatticeState, RunConfig};
use crate::coin::{wrap_angle, CoinParams};
use crate::error::Error;
use crate::mixing::{self, mix_site};
use crate::rng::EngineRng;
use crate::Result;

/// Spin index convention: lane 0 holds `s = +1`, lane 1 holds `s = -1`.
const SPIN_OF_LANE: [i8; 2] = [1, -1];

/// Hop and flip parameters plus the coin driving the flip targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinParams {
    d: f64,
    epsilon: f64,
    coin: CoinParams,
}

impl SpinParams {
    pub fn new(d: f64, epsilon: f64, coin: CoinParams) -> Result<Self> {
        if !d.is_finite() || d < 0.0 {
            return Err(Error::InvalidParameter {
                name: "hop_rate",
                value: d,
                expected: "nonnegative",
            });
        }
        if !epsilon.is_finite() || !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter {
                name: "bias",
                value: epsilon,
                expected: "[0, 1]",
            });
        }
        Ok(Self { d, epsilon, coin })
    }

    /// The fully biased point `D = 0.5`, `ε = 1` where one flip-hop cycle
    /// equals one walk step.
    pub fn correspondence(coin: CoinParams) -> Self {
        Self {
            d: 0.5,
            epsilon: 1.0,
            coin,
        }
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn coin(&self) -> &CoinParams {
        &self.coin
    }

    fn require_step_probabilities(&self) -> Result<()> {
        if 2.0 * self.d > 1.0 {
            return Err(Error::InvalidParameter {
                name: "hop_rate",
                value: self.d,
                expected: "2D <= 1 so per-step hop probabilities stay below 1",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct SiteSpins {
    n: [u64; 2],
    eta: [f64; 2],
}

/// Spin populations `n_x^s` with per-(site, spin) phase tags.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinSystemState {
    time: u32,
    x_min: i64,
    sites: Vec<SiteSpins>,
    marked: Option<(i64, u8)>,
    total: u64,
}

impl SpinSystemState {
    /// Adopt a box-engine configuration under the mapping box 0 ↔ spin +1,
    /// box 1 ↔ spin -1.
    pub fn from_lattice(lattice: &BoxLatticeState) -> SpinSystemState {
        let (x_min, _) = lattice.support();
        let sites = lattice
            .raw_boxes()
            .map(|(_, n, eta)| SiteSpins { n, eta })
            .collect();
        SpinSystemState {
            time: lattice.time(),
            x_min,
            sites,
            marked: Some(lattice.marked()),
            total: lattice.total(),
        }
    }

    /// Build a state from explicit `(site, [n⁺, n⁻], [η⁺, η⁻])` rows.
    pub fn from_site_counts(
        rows: &[(i64, [u64; 2], [f64; 2])],
        marked: Option<(i64, u8)>,
    ) -> Result<SpinSystemState> {
        let total: u64 = rows.iter().map(|(_, n, _)| n[0] + n[1]).sum();
        if total == 0 {
            return Err(Error::InvalidParameter {
                name: "total",
                value: 0.0,
                expected: "at least 1 particle",
            });
        }
        let x_min = rows.iter().map(|(x, ..)| *x).min().expect("rows nonempty");
        let x_max = rows.iter().map(|(x, ..)| *x).max().expect("rows nonempty");
        let mut sites = vec![SiteSpins::default(); (x_max - x_min) as usize + 1];
        for (x, n, eta) in rows {
            let site = &mut sites[(x - x_min) as usize];
            for lane in 0..2 {
                site.n[lane] += n[lane];
                if n[lane] > 0 {
                    site.eta[lane] = eta[lane];
                }
            }
        }
        if let Some((mx, ms)) = marked {
            if ms > 1 {
                return Err(Error::InvalidParameter {
                    name: "marked_in",
                    value: f64::from(ms),
                    expected: "spin lane 0 (+1) or 1 (-1)",
                });
            }
            let occupied =
                (mx >= x_min && mx <= x_max) && sites[(mx - x_min) as usize].n[ms as usize] > 0;
            if !occupied {
                return Err(Error::InvalidParameter {
                    name: "marked_in",
                    value: mx as f64,
                    expected: "a nonempty (site, spin) bucket",
                });
            }
        }
        Ok(SpinSystemState {
            time: 0,
            x_min,
            sites,
            marked,
            total,
        })
    }

    pub fn time(&self) -> u32 {
        self.time
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn marked(&self) -> Option<(i64, u8)> {
        self.marked
    }

    /// Inclusive site window.
    pub fn support(&self) -> (i64, i64) {
        (self.x_min, self.x_min + self.sites.len() as i64 - 1)
    }

    fn index_of(&self, x: i64) -> Option<usize> {
        let i = x - self.x_min;
        (i >= 0 && (i as usize) < self.sites.len()).then_some(i as usize)
    }

    fn lane(s: i8) -> usize {
        match s {
            1 => 0,
            -1 => 1,
            other => panic!("spin must be +1 or -1, got {other}"),
        }
    }

    /// Particle count `n_x^s`; zero outside the window.
    pub fn count(&self, x: i64, s: i8) -> u64 {
        self.index_of(x)
            .map_or(0, |i| self.sites[i].n[Self::lane(s)])
    }

    /// Phase tag of `(x, s)` in `(-pi, pi]`; zero for empty buckets.
    pub fn phase(&self, x: i64, s: i8) -> f64 {
        self.index_of(x)
            .map_or(0.0, |i| wrap_angle(self.sites[i].eta[Self::lane(s)]))
    }

    /// Local density `ρ_x = n_x^{+1} + n_x^{-1}`.
    pub fn density(&self, x: i64) -> u64 {
        self.index_of(x).map_or(0, |i| {
            let s = self.sites[i];
            s.n[0] + s.n[1]
        })
    }

    /// Post-coin target for the `+1` population, clamped to `[0, ρ_x]`.
    pub fn flip_target(&self, x: i64, p: &SpinParams) -> f64 {
        self.index_of(x).map_or(0.0, |i| {
            let s = self.sites[i];
            mixing::mix_target(s.n[0], s.n[1], s.eta[0], s.eta[1], &p.coin)
        })
    }

    /// Flip rate `R_{x,s}`: only the species in excess of the target flips,
    /// at rate `|δ_x| / n_x^s`; zero imbalance or an empty species gives 0.
    pub fn flip_rate(&self, x: i64, s: i8, p: &SpinParams) -> f64 {
        let Some(i) = self.index_of(x) else {
            return 0.0;
        };
        let site = self.sites[i];
        if site.n[0] + site.n[1] == 0 {
            return 0.0;
        }
        let delta = site.n[0] as f64 - self.flip_target(x, p);
        match Self::lane(s) {
            0 if delta > 0.0 && site.n[0] > 0 => delta / site.n[0] as f64,
            1 if delta < 0.0 && site.n[1] > 0 => -delta / site.n[1] as f64,
            _ => 0.0,
        }
    }

    /// Flip sub-step: every occupied site rebalances its spin populations
    /// toward the coin target (floor/ceil draw of the imbalance) and updates
    /// both phase tags. Site densities are unchanged.
    pub fn flip_step(&self, p: &SpinParams, rng: &mut EngineRng) -> SpinSystemState {
        let mut sites = self.sites.clone();
        let mut marked = self.marked;
        for (i, site) in sites.iter_mut().enumerate() {
            if site.n[0] + site.n[1] == 0 {
                continue;
            }
            let x = self.x_min + i as i64;
            let marked_here = match marked {
                Some((mx, ms)) if mx == x => Some(ms),
                _ => None,
            };
            let out = mix_site(
                site.n[0],
                site.n[1],
                site.eta[0],
                site.eta[1],
                &p.coin,
                marked_here,
                rng,
            );
            if out.marked_moved {
                if let Some((_, ms)) = &mut marked {
                    *ms = 1 - *ms;
                }
            }
            *site = SiteSpins {
                n: [out.n0, out.n1],
                eta: [out.eta0, out.eta1],
            };
            normalize_empty(site);
        }
        SpinSystemState {
            time: self.time,
            x_min: self.x_min,
            sites,
            marked,
            total: self.total,
        }
    }

    /// Hop sub-step: per (site, spin) bucket, right-movers are binomial with
    /// probability `D(1 + εs)`, left-movers binomial on the remainder, rest
    /// stay. Phases travel with their populations; when several populations
    /// of the same spin land in one bucket, the largest one's phase wins
    /// (ties prefer stayers, then right-movers). Fully biased hopping moves
    /// every bucket wholesale and draws nothing.
    pub fn hop_step(&self, p: &SpinParams, rng: &mut EngineRng) -> Result<SpinSystemState> {
        p.require_step_probabilities()?;
        let grown = self.sites.len() + 2;
        let mut counts = vec![SiteSpins::default(); grown];
        // (winning count, priority) per destination bucket; lower priority
        // wins ties.
        let mut best = vec![[(0u64, u8::MAX); 2]; grown];
        // Relocation is decided against the pre-hop coordinate so a particle
        // that lands ahead of the sweep is not moved twice.
        let mut marked_next = self.marked;

        let fully_biased = p.d == 0.5 && p.epsilon == 1.0;
        for (i, site) in self.sites.iter().enumerate() {
            let x = self.x_min + i as i64;
            for (lane, &spin) in SPIN_OF_LANE.iter().enumerate() {
                let n = site.n[lane];
                if n == 0 {
                    continue;
                }
                let s = f64::from(spin);
                let (n_right, n_left) = if fully_biased {
                    if lane == 0 {
                        (n, 0)
                    } else {
                        (0, n)
                    }
                } else {
                    let p_right = (p.d * (1.0 + p.epsilon * s)).clamp(0.0, 1.0);
                    let p_left = (p.d * (1.0 - p.epsilon * s)).clamp(0.0, 1.0);
                    let n_right = sample_binomial(n, p_right, rng);
                    let rest = n - n_right;
                    let renorm = if p_right < 1.0 {
                        (p_left / (1.0 - p_right)).clamp(0.0, 1.0)
                    } else {
                        0.0
                    };
                    (n_right, sample_binomial(rest, renorm, rng))
                };
                let n_stay = n - n_right - n_left;

                if let Some((mx, ms)) = self.marked {
                    if mx == x && ms as usize == lane {
                        let new_x = if fully_biased {
                            x + i64::from(spin)
                        } else {
                            let u = rng.random_range(0..n);
                            if u < n_right {
                                x + 1
                            } else if u < n_right + n_left {
                                x - 1
                            } else {
                                x
                            }
                        };
                        marked_next = Some((new_x, ms));
                    }
                }

                // Source index i maps to i + 1 in the grown window.
                let eta = site.eta[lane];
                deposit(&mut counts, &mut best, i + 2, lane, n_right, eta, 1);
                deposit(&mut counts, &mut best, i + 1, lane, n_stay, eta, 0);
                deposit(&mut counts, &mut best, i, lane, n_left, eta, 2);
            }
        }

        for site in &mut counts {
            normalize_empty(site);
        }
        let found: u64 = counts.iter().map(|s| s.n[0] + s.n[1]).sum();
        if found != self.total {
            return Err(Error::ConservationViolation {
                time: self.time + 1,
                expected: self.total,
                found,
            });
        }
        Ok(SpinSystemState {
            time: self.time + 1,
            x_min: self.x_min - 1,
            sites: counts,
            marked: marked_next,
            total: self.total,
        })
    }

    /// Site density fractions `ρ_x / N`.
    pub fn density_profile(&self) -> Distribution {
        Distribution::from_weights(self.sites.iter().enumerate().filter_map(|(i, s)| {
            let n = s.n[0] + s.n[1];
            (n > 0).then_some((self.x_min + i as i64, n as f64))
        }))
    }

    /// Tabular record `(t, x, s, count, phase)` per occupied bucket,
    /// ascending by site, `+1` lane first; phases reduced to `(-pi, pi]`.
    pub fn snapshot(&self) -> Vec<(u32, i64, i8, u64, f64)> {
        let mut rows = Vec::new();
        for (i, s) in self.sites.iter().enumerate() {
            for (lane, &spin) in SPIN_OF_LANE.iter().enumerate() {
                if s.n[lane] > 0 {
                    rows.push((
                        self.time,
                        self.x_min + i as i64,
                        spin,
                        s.n[lane],
                        wrap_angle(s.eta[lane]),
                    ));
                }
            }
        }
        rows
    }
}

fn normalize_empty(site: &mut SiteSpins) {
    for lane in 0..2 {
        if site.n[lane] == 0 {
            site.eta[lane] = 0.0;
        }
    }
}

fn deposit(
    counts: &mut [SiteSpins],
    best: &mut [[(u64, u8); 2]],
    i: usize,
    lane: usize,
    n: u64,
    eta: f64,
    priority: u8,
) {
    if n == 0 {
        return;
    }
    counts[i].n[lane] += n;
    let (winner, prio) = best[i][lane];
    if n > winner || (n == winner && priority < prio) {
        best[i][lane] = (n, priority);
        counts[i].eta[lane] = eta;
    }
}

fn sample_binomial(n: u64, p: f64, rng: &mut EngineRng) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p)
        .expect("probability validated")
        .sample(rng)
}

/// Run the spin engine from the box-engine initial configuration, one
/// flip-hop cycle per step, recording the marked particle's site after
/// every step.
pub fn run_active(
    cfg: &RunConfig,
    p: &SpinParams,
    rng: &mut EngineRng,
) -> Result<(SpinSystemState, Vec<i64>)> {
    p.require_step_probabilities()?;
    let mut state = SpinSystemState::from_lattice(&BoxLatticeState::init(cfg, rng));
    let mut trajectory = Vec::with_capacity(cfg.steps() as usize + 1);
    let site_of = |s: &SpinSystemState| s.marked().map_or(0, |(x, _)| x);
    trajectory.push(site_of(&state));
    for _ in 0..cfg.steps() {
        state = state.flip_step(p, rng).hop_step(p, rng)?;
        trajectory.push(site_of(&state));
    }
    Ok((state, trajectory))
}
