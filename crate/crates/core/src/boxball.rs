//! Boxes-and-balls engine: integer occupations plus one phase tag per box.
//!
//! The two-box operations (prepare, transform, measure) emulate a single
//! qubit; the lattice engine runs the same transform per site, interleaved
//! with the conditional shift (box 0 moves right, box 1 moves left). One
//! distinguished "marked" ball performs a classical random walk whose
//! endpoint histogram reproduces the walker's position distribution for
//! large ball counts. Ball counts are conserved exactly; every run is a
//! deterministic function of its RNG stream.

use rand::Rng;

use crate::analysis::Distribution;
use crate::coin::{wrap_angle, CoinParams, CoinSchedule, QubitSpec};
use crate::error::Error;
use crate::mixing::{self, mix_site, randomized_round, snap_integral};
use crate::rng::EngineRng;
use crate::Result;

/// Preparation parameters: expected fraction `rho0` of `total` balls in box
/// 0, and the initial phase tags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrepConfig {
    total: u64,
    rho0: f64,
    phi0: f64,
    phi1: f64,
}

impl PrepConfig {
    pub fn new(total: u64, rho0: f64, phi0: f64, phi1: f64) -> Result<Self> {
        if total == 0 {
            return Err(Error::InvalidParameter {
                name: "total",
                value: 0.0,
                expected: "at least 1 ball",
            });
        }
        if !rho0.is_finite() || !(0.0..=1.0).contains(&rho0) {
            return Err(Error::InvalidParameter {
                name: "rho0",
                value: rho0,
                expected: "[0, 1]",
            });
        }
        for (name, v) in [("phi0", phi0), ("phi1", phi1)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    expected: "finite radians",
                });
            }
        }
        Ok(Self {
            total,
            rho0,
            phi0,
            phi1,
        })
    }

    /// Preparation matching a qubit: `rho0 = r0^2`, phases copied.
    pub fn from_qubit(total: u64, q: &QubitSpec) -> Result<Self> {
        Self::new(total, q.r0() * q.r0(), q.phi0(), q.phi1())
    }
}

/// Two boxes holding `total` balls, with phase tags and a marked ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBoxState {
    n0: u64,
    n1: u64,
    eta0: f64,
    eta1: f64,
    marked_in: u8,
    total: u64,
}

impl TwoBoxState {
    /// Build a state directly; the marked ball must sit in a nonempty box.
    pub fn new(n0: u64, n1: u64, eta0: f64, eta1: f64, marked_in: u8) -> Result<Self> {
        if n0 + n1 == 0 {
            return Err(Error::InvalidParameter {
                name: "n0 + n1",
                value: 0.0,
                expected: "at least 1 ball",
            });
        }
        if marked_in > 1 {
            return Err(Error::InvalidParameter {
                name: "marked_in",
                value: f64::from(marked_in),
                expected: "box label 0 or 1",
            });
        }
        let marked_box = if marked_in == 0 { n0 } else { n1 };
        if marked_box == 0 {
            return Err(Error::InvalidParameter {
                name: "marked_in",
                value: f64::from(marked_in),
                expected: "a nonempty box",
            });
        }
        Ok(Self {
            n0,
            n1,
            eta0,
            eta1,
            marked_in,
            total: n0 + n1,
        })
    }

    /// Preparation: box 0 receives the floor or ceiling of `rho0 * total`
    /// (fair draw), phases are copied from the configuration, and the marked
    /// ball is a uniformly random ball.
    pub fn prepare(cfg: &PrepConfig, rng: &mut EngineRng) -> TwoBoxState {
        let w = snap_integral(cfg.rho0 * cfg.total as f64);
        let n0 = randomized_round(w, rng).min(cfg.total);
        let n1 = cfg.total - n0;
        let marked_in = u8::from(rng.random_range(0..cfg.total) >= n0);
        TwoBoxState {
            n0,
            n1,
            eta0: if n0 == 0 { 0.0 } else { cfg.phi0 },
            eta1: if n1 == 0 { 0.0 } else { cfg.phi1 },
            marked_in,
            total: cfg.total,
        }
    }

    pub fn n0(&self) -> u64 {
        self.n0
    }

    pub fn n1(&self) -> u64 {
        self.n1
    }

    /// Phase tag of box 0, reduced to `(-pi, pi]`.
    pub fn eta0(&self) -> f64 {
        wrap_angle(self.eta0)
    }

    /// Phase tag of box 1, reduced to `(-pi, pi]`.
    pub fn eta1(&self) -> f64 {
        wrap_angle(self.eta1)
    }

    pub fn marked_in(&self) -> u8 {
        self.marked_in
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Occupation fraction of box 0.
    pub fn fraction0(&self) -> f64 {
        self.n0 as f64 / self.total as f64
    }

    /// Unclamped coin target for box 0.
    pub fn mix_target_raw(&self, coin: &CoinParams) -> f64 {
        mixing::mix_target_raw(self.n0, self.n1, self.eta0, self.eta1, coin)
    }

    /// Coin target for box 0, clamped to `[0, total]`.
    pub fn mix_target(&self, coin: &CoinParams) -> f64 {
        mixing::mix_target(self.n0, self.n1, self.eta0, self.eta1, coin)
    }

    /// Phase tags after a coin, without touching occupations.
    pub fn mixed_phases(&self, coin: &CoinParams) -> (f64, f64) {
        mixing::mixed_phases(self.n0, self.n1, self.eta0, self.eta1, coin)
    }

    /// One coin transformation: rounds the target, transfers balls, updates
    /// phases, and relocates the marked ball with the transfer fraction.
    pub fn transform(&self, coin: &CoinParams, rng: &mut EngineRng) -> TwoBoxState {
        let out = mix_site(
            self.n0,
            self.n1,
            self.eta0,
            self.eta1,
            coin,
            Some(self.marked_in),
            rng,
        );
        TwoBoxState {
            n0: out.n0,
            n1: out.n1,
            eta0: out.eta0,
            eta1: out.eta1,
            marked_in: if out.marked_moved {
                1 - self.marked_in
            } else {
                self.marked_in
            },
            total: self.total,
        }
    }

    /// Measurement: report the marked ball's box, then collapse all balls
    /// into it and reset both phase tags.
    pub fn measure(&self) -> (u8, TwoBoxState) {
        let outcome = self.marked_in;
        let post = TwoBoxState {
            n0: if outcome == 0 { self.total } else { 0 },
            n1: if outcome == 0 { 0 } else { self.total },
            eta0: 0.0,
            eta1: 0.0,
            marked_in: outcome,
            total: self.total,
        };
        (outcome, post)
    }
}

/// One lattice site: box occupations and phase tags for both coin lanes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct SiteBoxes {
    n: [u64; 2],
    eta: [f64; 2],
}

/// Full lattice configuration after `time` steps from the origin start.
///
/// The site window is `[-time, time]` (index `i` holds site `x = i - time`);
/// sites with `x + time` odd are always empty. Empty boxes carry phase 0.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxLatticeState {
    time: u32,
    sites: Vec<SiteBoxes>,
    marked: (i64, u8),
    total: u64,
}

/// Run parameters shared by the stochastic engines.
#[derive(Debug, Clone)]
pub struct RunConfig {
    coins: CoinSchedule,
    initial: QubitSpec,
    total: u64,
    steps: u32,
    seed: u64,
    trials: u64,
}

impl RunConfig {
    pub fn new(
        coins: CoinSchedule,
        initial: QubitSpec,
        total: u64,
        steps: u32,
        seed: u64,
        trials: u64,
    ) -> Result<Self> {
        if total == 0 {
            return Err(Error::InvalidParameter {
                name: "total",
                value: 0.0,
                expected: "at least 1 ball",
            });
        }
        if trials == 0 {
            return Err(Error::InvalidParameter {
                name: "trials",
                value: 0.0,
                expected: "at least 1 trial",
            });
        }
        Ok(Self {
            coins,
            initial,
            total,
            steps,
            seed,
            trials,
        })
    }

    pub fn coins(&self) -> &CoinSchedule {
        &self.coins
    }

    pub fn initial(&self) -> &QubitSpec {
        &self.initial
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }
}

impl BoxLatticeState {
    /// All balls at the origin, split between the two boxes by the floor or
    /// ceiling of `r0^2 N` (fair draw); phases copy the qubit phases; the
    /// marked ball is uniform over balls.
    pub fn init(cfg: &RunConfig, rng: &mut EngineRng) -> BoxLatticeState {
        let q = cfg.initial();
        let w = snap_integral(q.r0() * q.r0() * cfg.total() as f64);
        let n0 = randomized_round(w, rng).min(cfg.total());
        let n1 = cfg.total() - n0;
        let marked_box = u8::from(rng.random_range(0..cfg.total()) >= n0);
        let origin = SiteBoxes {
            n: [n0, n1],
            eta: [
                if n0 == 0 { 0.0 } else { q.phi0() },
                if n1 == 0 { 0.0 } else { q.phi1() },
            ],
        };
        BoxLatticeState {
            time: 0,
            sites: vec![origin],
            marked: (0, marked_box),
            total: cfg.total(),
        }
    }

    pub fn time(&self) -> u32 {
        self.time
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Marked ball coordinate `(site, box)`.
    pub fn marked(&self) -> (i64, u8) {
        self.marked
    }

    pub fn marked_site(&self) -> i64 {
        self.marked.0
    }

    /// Inclusive site window `[-t, t]`.
    pub fn support(&self) -> (i64, i64) {
        (-(self.time as i64), self.time as i64)
    }

    fn index_of(&self, x: i64) -> Option<usize> {
        let t = self.time as i64;
        (-t..=t).contains(&x).then_some((x + t) as usize)
    }

    /// Ball count in box `(x, c)`; zero outside the window.
    pub fn occupation(&self, x: i64, c: usize) -> u64 {
        assert!(c < 2, "box label must be 0 or 1");
        self.index_of(x).map_or(0, |i| self.sites[i].n[c])
    }

    /// Phase tag of box `(x, c)` in `(-pi, pi]`; zero for empty boxes.
    pub fn phase(&self, x: i64, c: usize) -> f64 {
        assert!(c < 2, "box label must be 0 or 1");
        self.index_of(x)
            .map_or(0.0, |i| wrap_angle(self.sites[i].eta[c]))
    }

    /// One step: per-site coin transform (ascending site order), then the
    /// conditional shift carrying counts and phases. The global ball count
    /// is re-checked and a mismatch aborts the run.
    pub fn step(&self, coins: &CoinSchedule, rng: &mut EngineRng) -> Result<BoxLatticeState> {
        let t = self.time as i64;
        let mut next = vec![SiteBoxes::default(); self.sites.len() + 2];
        let mut marked_box = self.marked.1;

        for (i, site) in self.sites.iter().enumerate() {
            if site.n[0] + site.n[1] == 0 {
                continue;
            }
            let x = i as i64 - t;
            let marked_here = (self.marked.0 == x).then_some(self.marked.1);
            let out = mix_site(
                site.n[0],
                site.n[1],
                site.eta[0],
                site.eta[1],
                coins.coin_at(self.time, x),
                marked_here,
                rng,
            );
            if marked_here.is_some() && out.marked_moved {
                marked_box = 1 - self.marked.1;
            }
            // Site x is index i + 1 in the grown window; box 0 shifts right,
            // box 1 shifts left.
            next[i + 2].n[0] = out.n0;
            next[i + 2].eta[0] = out.eta0;
            next[i].n[1] = out.n1;
            next[i].eta[1] = out.eta1;
        }

        for site in &mut next {
            for c in 0..2 {
                if site.n[c] == 0 {
                    site.eta[c] = 0.0;
                }
            }
        }

        let found: u64 = next.iter().map(|s| s.n[0] + s.n[1]).sum();
        if found != self.total {
            return Err(Error::ConservationViolation {
                time: self.time + 1,
                expected: self.total,
                found,
            });
        }

        let marked_x = self.marked.0 + if marked_box == 0 { 1 } else { -1 };
        Ok(BoxLatticeState {
            time: self.time + 1,
            sites: next,
            marked: (marked_x, marked_box),
            total: self.total,
        })
    }

    /// Measurement: report the marked site, collapse all balls into the
    /// marked box, zero every phase.
    pub fn measure(&self) -> (i64, BoxLatticeState) {
        let (x_m, c_m) = self.marked;
        let mut sites = vec![SiteBoxes::default(); self.sites.len()];
        let idx = self
            .index_of(x_m)
            .expect("marked ball stays inside the window");
        sites[idx].n[c_m as usize] = self.total;
        (
            x_m,
            BoxLatticeState {
                time: self.time,
                sites,
                marked: self.marked,
                total: self.total,
            },
        )
    }

    /// Site occupation fractions `(N_{x,0} + N_{x,1}) / N`.
    pub fn occupation_distribution(&self) -> Distribution {
        let t = self.time as i64;
        Distribution::from_weights(self.sites.iter().enumerate().filter_map(|(i, s)| {
            let n = s.n[0] + s.n[1];
            (n > 0).then_some((i as i64 - t, n as f64))
        }))
    }

    /// Tabular record `(t, x, c, count, phase)` per occupied box, ascending
    /// by site then box label; phases reduced to `(-pi, pi]`.
    pub fn snapshot(&self) -> Vec<(u32, i64, u8, u64, f64)> {
        let t = self.time as i64;
        let mut rows = Vec::new();
        for (i, s) in self.sites.iter().enumerate() {
            for c in 0..2 {
                if s.n[c] > 0 {
                    rows.push((
                        self.time,
                        i as i64 - t,
                        c as u8,
                        s.n[c],
                        wrap_angle(s.eta[c]),
                    ));
                }
            }
        }
        rows
    }

    pub(crate) fn raw_boxes(&self) -> impl Iterator<Item = (i64, [u64; 2], [f64; 2])> + '_ {
        let t = self.time as i64;
        self.sites
            .iter()
            .enumerate()
            .map(move |(i, s)| (i as i64 - t, s.n, s.eta))
    }
}

/// Run the lattice engine for `cfg.steps()` steps, recording the marked
/// ball's site after every step (`steps + 1` entries including the start).
pub fn run_lattice(cfg: &RunConfig, rng: &mut EngineRng) -> Result<(BoxLatticeState, Vec<i64>)> {
    let mut state = BoxLatticeState::init(cfg, rng);
    let mut trajectory = Vec::with_capacity(cfg.steps() as usize + 1);
    trajectory.push(state.marked_site());
    for _ in 0..cfg.steps() {
        state = state.step(cfg.coins(), rng)?;
        trajectory.push(state.marked_site());
    }
    Ok((state, trajectory))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn hadamard_run(total: u64, steps: u32, seed: u64) -> RunConfig {
        RunConfig::new(
            CoinSchedule::homogeneous(CoinParams::hadamard()),
            QubitSpec::zero(),
            total,
            steps,
            seed,
            1,
        )
        .unwrap()
    }

    #[test]
    fn prepare_with_integral_target_is_deterministic() {
        let cfg = PrepConfig::new(1000, 0.5, 0.0, 0.0).unwrap();
        for stream in 0..20 {
            let mut rng = stream_rng(1, stream);
            let s = TwoBoxState::prepare(&cfg, &mut rng);
            assert_eq!(s.n0(), 500);
            assert_eq!(s.n1(), 500);
        }
    }

    #[test]
    fn prepare_rounds_fractional_target_both_ways() {
        let cfg = PrepConfig::new(1000, 0.3333, 0.0, 0.0).unwrap();
        let trials = 10_000u64;
        let mut low = 0u64;
        for stream in 0..trials {
            let mut rng = stream_rng(2, stream);
            let s = TwoBoxState::prepare(&cfg, &mut rng);
            match s.n0() {
                333 => low += 1,
                334 => {}
                other => panic!("unexpected count {other}"),
            }
        }
        let frac = low as f64 / trials as f64;
        assert!((frac - 0.5).abs() < 0.02, "floor fraction {frac}");
    }

    #[test]
    fn prepare_degenerate_fraction_fills_box_zero() {
        let cfg = PrepConfig::new(10, 1.0, 0.0, 0.0).unwrap();
        for stream in 0..50 {
            let mut rng = stream_rng(3, stream);
            let s = TwoBoxState::prepare(&cfg, &mut rng);
            assert_eq!(s.n0(), 10);
            assert_eq!(s.marked_in(), 0);
        }
    }

    #[test]
    fn marked_ball_placement_tracks_occupation_fraction() {
        let cfg = PrepConfig::new(1_000_000, 0.36, 0.0, 0.0).unwrap();
        let trials = 10_000u64;
        let mut in_zero = 0u64;
        for stream in 0..trials {
            let mut rng = stream_rng(4, stream);
            let (outcome, post) = TwoBoxState::prepare(&cfg, &mut rng).measure();
            if outcome == 0 {
                in_zero += 1;
                assert_eq!(post.n0(), 1_000_000);
                assert_eq!(post.n1(), 0);
            } else {
                assert_eq!(post.n1(), 1_000_000);
            }
            assert_eq!(post.eta0(), 0.0);
            assert_eq!(post.eta1(), 0.0);
        }
        let freq = in_zero as f64 / trials as f64;
        assert!((freq - 0.36).abs() < 0.015, "outcome-0 frequency {freq}");
    }

    #[test]
    fn transform_total_constructive_case() {
        let coin = CoinParams::hadamard();
        for stream in 0..50 {
            let mut rng = stream_rng(5, stream);
            let s = TwoBoxState::new(500_000, 500_000, 0.0, 0.0, 1).unwrap();
            let out = s.transform(&coin, &mut rng);
            assert_eq!(out.n0(), 1_000_000);
            assert_eq!(out.n1(), 0);
            assert_eq!(out.marked_in(), 0, "marked ball must follow the transfer");
        }
    }

    #[test]
    fn transform_splits_pure_box_evenly() {
        let coin = CoinParams::hadamard();
        let trials = 10_000u64;
        let mut marked_in_zero = 0u64;
        for stream in 0..trials {
            let mut rng = stream_rng(6, stream);
            let s = TwoBoxState::new(1000, 0, 0.0, 0.0, 0).unwrap();
            let out = s.transform(&coin, &mut rng);
            assert_eq!(out.n0(), 500);
            assert_eq!(out.n1(), 500);
            if out.marked_in() == 0 {
                marked_in_zero += 1;
            }
        }
        let freq = marked_in_zero as f64 / trials as f64;
        assert!(
            (freq - 0.5).abs() < 0.015,
            "marked-in-zero frequency {freq}"
        );
    }

    #[test]
    fn diagonal_coin_transform_is_identity_on_counts() {
        let coin = CoinParams::new(0.0, 0.0, 0.0).unwrap();
        let mut rng = stream_rng(7, 0);
        let s = TwoBoxState::new(123, 877, 0.4, -0.8, 1).unwrap();
        let out = s.transform(&coin, &mut rng);
        assert_eq!(out.n0(), 123);
        assert_eq!(out.n1(), 877);
        assert_eq!(out.marked_in(), 1);
    }

    #[test]
    fn init_concentrates_basis_state() {
        let cfg = hadamard_run(100, 0, 8);
        let mut rng = stream_rng(8, 0);
        let s = BoxLatticeState::init(&cfg, &mut rng);
        assert_eq!(s.occupation(0, 0), 100);
        assert_eq!(s.occupation(0, 1), 0);
        assert_eq!(s.phase(0, 1), 0.0);
    }

    #[test]
    fn init_splits_symmetric_state_exactly() {
        let cfg = RunConfig::new(
            CoinSchedule::homogeneous(CoinParams::hadamard()),
            QubitSpec::symmetric(),
            1_000_000,
            0,
            9,
            1,
        )
        .unwrap();
        for stream in 0..20 {
            let mut rng = stream_rng(9, stream);
            let s = BoxLatticeState::init(&cfg, &mut rng);
            assert_eq!(s.occupation(0, 0), 500_000);
            assert_eq!(s.occupation(0, 1), 500_000);
            assert_eq!(s.phase(0, 0), 0.0);
            assert!((s.phase(0, 1) + FRAC_PI_2).abs() < 1e-15);
        }
    }

    #[test]
    fn init_snaps_noisy_integral_product() {
        // r0^2 evaluates to 0.30000000000000004; the prepared count must
        // still be 3 out of 10 every time.
        let q = QubitSpec::new(0.3f64.sqrt(), 0.0, 0.7f64.sqrt(), 0.0).unwrap();
        let cfg = RunConfig::new(
            CoinSchedule::homogeneous(CoinParams::hadamard()),
            q,
            10,
            0,
            10,
            1,
        )
        .unwrap();
        for stream in 0..100 {
            let mut rng = stream_rng(10, stream);
            let s = BoxLatticeState::init(&cfg, &mut rng);
            assert_eq!(s.occupation(0, 0), 3);
        }
    }

    #[test]
    fn first_step_from_basis_start_is_deterministic() {
        let cfg = hadamard_run(1_000_000, 1, 11);
        let mut rng = stream_rng(11, 0);
        let s = BoxLatticeState::init(&cfg, &mut rng)
            .step(cfg.coins(), &mut rng)
            .unwrap();
        assert_eq!(s.occupation(1, 0), 500_000);
        assert_eq!(s.occupation(-1, 1), 500_000);
        assert_eq!(s.occupation(1, 1), 0);
        assert_eq!(s.occupation(-1, 0), 0);
        assert_eq!(s.occupation(0, 0), 0);
    }

    #[test]
    fn two_steps_reproduce_walker_fractions() {
        let cfg = hadamard_run(1_000_000, 2, 12);
        let mut rng = stream_rng(12, 0);
        let (s, _) = run_lattice(&cfg, &mut rng).unwrap();
        let d = s.occupation_distribution();
        assert!((d.mass_at(2) - 0.25).abs() < 5e-6);
        assert!((d.mass_at(0) - 0.5).abs() < 5e-6);
        assert!((d.mass_at(-2) - 0.25).abs() < 5e-6);
    }

    #[test]
    fn diagonal_coin_run_is_ballistic() {
        let cfg = RunConfig::new(
            CoinSchedule::homogeneous(CoinParams::new(0.0, 0.0, 0.0).unwrap()),
            QubitSpec::zero(),
            1000,
            5,
            13,
            1,
        )
        .unwrap();
        let mut rng = stream_rng(13, 0);
        let (s, traj) = run_lattice(&cfg, &mut rng).unwrap();
        assert_eq!(traj, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(s.occupation(5, 0), 1000);
    }

    #[test]
    fn zero_step_run_has_unit_trajectory() {
        let cfg = hadamard_run(50, 0, 14);
        let mut rng = stream_rng(14, 0);
        let (s, traj) = run_lattice(&cfg, &mut rng).unwrap();
        assert_eq!(traj, vec![0]);
        let d = s.occupation_distribution();
        assert_eq!(d.mass_at(0), 1.0);
    }

    #[test]
    fn identical_seeds_give_identical_runs() {
        let cfg = hadamard_run(10_000, 40, 15);
        let mut a = stream_rng(cfg.seed(), 0);
        let mut b = stream_rng(cfg.seed(), 0);
        let (sa, ta) = run_lattice(&cfg, &mut a).unwrap();
        let (sb, tb) = run_lattice(&cfg, &mut b).unwrap();
        assert_eq!(sa, sb);
        assert_eq!(ta, tb);
    }

    #[test]
    fn lattice_measure_collapses_to_marked_site() {
        let cfg = hadamard_run(10_000, 10, 16);
        let mut rng = stream_rng(16, 0);
        let (s, traj) = run_lattice(&cfg, &mut rng).unwrap();
        let (x_m, post) = s.measure();
        assert_eq!(x_m, *traj.last().unwrap());
        let (x, c) = s.marked();
        assert_eq!(post.occupation(x, c as usize), 10_000);
        let d = post.occupation_distribution();
        assert_eq!(d.mass_at(x_m), 1.0);
    }

    #[test]
    fn marked_ball_stays_on_occupied_sites() {
        let cfg = hadamard_run(997, 60, 17);
        let mut rng = stream_rng(17, 3);
        let mut s = BoxLatticeState::init(&cfg, &mut rng);
        for _ in 0..60 {
            s = s.step(cfg.coins(), &mut rng).unwrap();
            let (x, c) = s.marked();
            assert!(
                s.occupation(x, c as usize) >= 1,
                "marked box empty at t={}",
                s.time()
            );
        }
    }

    #[test]
    fn snapshot_lists_occupied_boxes_in_order() {
        let cfg = hadamard_run(1_000_000, 2, 18);
        let mut rng = stream_rng(18, 0);
        let s1 = BoxLatticeState::init(&cfg, &mut rng)
            .step(cfg.coins(), &mut rng)
            .unwrap();
        let rows = s1.snapshot();
        assert_eq!(
            rows,
            vec![(1, -1, 1, 500_000, 0.0), (1, 1, 0, 500_000, 0.0)]
        );

        // The second step puts the destructively signed quarter of the mass
        // at (-2, 1): its tag is pi.
        let s2 = s1.step(cfg.coins(), &mut rng).unwrap();
        let rows = s2.snapshot();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0], (2, -2, 1, 250_000, std::f64::consts::PI));
        assert_eq!(rows[1], (2, 0, 0, 250_000, 0.0));
        assert_eq!(rows[2], (2, 0, 1, 250_000, 0.0));
        assert_eq!(rows[3], (2, 2, 0, 250_000, 0.0));
    }

    #[test]
    fn single_ball_walks_without_violating_invariants() {
        let cfg = hadamard_run(1, 30, 19);
        let mut rng = stream_rng(19, 0);
        let (s, traj) = run_lattice(&cfg, &mut rng).unwrap();
        assert_eq!(traj.len(), 31);
        let d = s.occupation_distribution();
        assert_eq!(d.mass_at(s.marked_site()), 1.0);
    }

    #[test]
    fn quarter_phase_initial_state_round_trips_through_prepare() {
        let q = QubitSpec::new(
            std::f64::consts::FRAC_1_SQRT_2,
            0.0,
            std::f64::consts::FRAC_1_SQRT_2,
            FRAC_PI_4,
        )
        .unwrap();
        let cfg = PrepConfig::from_qubit(1000, &q).unwrap();
        let mut rng = stream_rng(20, 0);
        let s = TwoBoxState::prepare(&cfg, &mut rng);
        assert_eq!(s.n0() + s.n1(), 1000);
        assert_eq!(s.n0(), 500);
        assert!((s.eta1() - FRAC_PI_4).abs() < 1e-15);
    }
}
