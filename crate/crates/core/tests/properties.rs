//! Property tests over the public engine API.

use proptest::prelude::*;

use boxwalk_core::activespin::{SpinParams, SpinSystemState};
use boxwalk_core::analysis::{total_variation, Distribution};
use boxwalk_core::boxball::{self, RunConfig, TwoBoxState};
use boxwalk_core::coin::{angle_distance, wrap_angle, CoinParams, CoinSchedule, QubitSpec};
use boxwalk_core::quantum::AmplitudeField;
use boxwalk_core::rng::stream_rng;

use std::f64::consts::{FRAC_PI_2, PI};

fn arb_coin() -> impl Strategy<Value = CoinParams> {
    (-PI..PI, 0.0..=FRAC_PI_2, -PI..PI)
        .prop_map(|(xi, theta, zeta)| CoinParams::new(xi, theta, zeta).unwrap())
}

fn arb_qubit() -> impl Strategy<Value = QubitSpec> {
    (0.0..FRAC_PI_2, -PI..PI, -PI..PI)
        .prop_map(|(a, phi0, phi1)| QubitSpec::new(a.cos(), phi0, a.sin(), phi1).unwrap())
}

fn arb_schedule() -> impl Strategy<Value = CoinSchedule> {
    (
        arb_coin(),
        proptest::collection::vec(((0u32..20), (-20i64..20), arb_coin()), 0..4),
    )
        .prop_map(|(default, overrides)| {
            overrides
                .into_iter()
                .fold(CoinSchedule::homogeneous(default), |s, (t, x, c)| {
                    s.with_override(t, x, c)
                })
        })
}

fn arb_distribution() -> impl Strategy<Value = Distribution> {
    proptest::collection::vec(((-50i64..50), 0.001..1.0f64), 1..12)
        .prop_map(Distribution::from_weights)
}

proptest! {
    // Walk unitarity across at least 100 random schedules.
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn walk_norm_is_conserved(q in arb_qubit(), coins in arb_schedule(), steps in 1u32..25) {
        let mut field = AmplitudeField::from_qubit(&q);
        for _ in 0..steps {
            field = field.walk_step(&coins);
            prop_assert!((field.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn walk_respects_parity(q in arb_qubit(), coin in arb_coin(), steps in 0u32..30) {
        let coins = CoinSchedule::homogeneous(coin);
        let field = AmplitudeField::evolve(&q, &coins, steps);
        let t = steps as i64;
        for x in -t..=t {
            if (x + t) % 2 != 0 {
                prop_assert_eq!(field.amplitude(x, 0).norm_sqr(), 0.0);
                prop_assert_eq!(field.amplitude(x, 1).norm_sqr(), 0.0);
            }
        }
    }

    #[test]
    fn qubit_accepts_only_near_normalized_magnitudes(
        a in 0.0..FRAC_PI_2,
        scale in 0.9f64..1.1,
        phi in -PI..PI,
    ) {
        let (r0, r1) = (a.cos() * scale, a.sin() * scale);
        let result = QubitSpec::new(r0, phi, r1, 0.0);
        let norm_err = (r0 * r0 + r1 * r1 - 1.0).abs();
        if norm_err <= 1e-9 {
            let q = result.unwrap();
            prop_assert!((q.r0() * q.r0() + q.r1() * q.r1() - 1.0).abs() < 1e-12);
        } else if norm_err > 2e-9 {
            prop_assert!(result.is_err());
        }
    }

    #[test]
    fn wrapped_angles_stay_equivalent(a in -50.0f64..50.0) {
        let w = wrap_angle(a);
        prop_assert!(w > -PI && w <= PI);
        prop_assert!(angle_distance(w, a) < 1e-9);
    }

    #[test]
    fn mix_target_obeys_unitarity_bound(
        n0 in 0u64..=1_000_000,
        n1 in 0u64..=1_000_000,
        eta0 in -PI..PI,
        eta1 in -PI..PI,
        coin in arb_coin(),
    ) {
        prop_assume!(n0 + n1 > 0);
        let s = TwoBoxState::new(n0, n1, eta0, eta1, u8::from(n0 == 0)).unwrap();
        let raw = s.mix_target_raw(&coin);
        let total = (n0 + n1) as f64;
        prop_assert!(raw >= -1e-6 * total);
        prop_assert!(raw <= total * (1.0 + 1e-6));
        let clamped = s.mix_target(&coin);
        prop_assert!((0.0..=total).contains(&clamped));
    }

    #[test]
    fn transform_moves_at_most_one_ball_off_target(
        n0 in 0u64..=100_000,
        n1 in 0u64..=100_000,
        eta0 in -PI..PI,
        eta1 in -PI..PI,
        coin in arb_coin(),
        seed in 0u64..1000,
    ) {
        prop_assume!(n0 + n1 > 0);
        let s = TwoBoxState::new(n0, n1, eta0, eta1, u8::from(n0 == 0)).unwrap();
        let target = s.mix_target(&coin);
        let mut rng = stream_rng(seed, 0);
        let out = s.transform(&coin, &mut rng);
        let total = (n0 + n1) as f64;
        prop_assert_eq!(out.n0() + out.n1(), n0 + n1);
        prop_assert!((out.n0() as f64 / total - target / total).abs() <= 1.0 / total);
        // The marked ball never ends up in an empty box.
        let marked_count = if out.marked_in() == 0 { out.n0() } else { out.n1() };
        prop_assert!(marked_count >= 1);
    }

    #[test]
    fn lattice_conserves_balls_exactly(
        total in 1u64..50_000,
        steps in 0u32..20,
        coin in arb_coin(),
        q in arb_qubit(),
        seed in 0u64..1000,
    ) {
        let cfg = RunConfig::new(
            CoinSchedule::homogeneous(coin), q, total, steps, seed, 1,
        ).unwrap();
        let mut rng = stream_rng(seed, 0);
        let (state, trajectory) = boxball::run_lattice(&cfg, &mut rng).unwrap();
        let counted: u64 = state.snapshot().iter().map(|r| r.3).sum();
        prop_assert_eq!(counted, total);
        prop_assert_eq!(trajectory.len(), steps as usize + 1);
        let (x, c) = state.marked();
        prop_assert!(state.occupation(x, c as usize) >= 1);
        // Endpoint parity matches the step count.
        prop_assert_eq!((trajectory.last().unwrap() + steps as i64) % 2, 0);
    }

    #[test]
    fn spin_substeps_conserve_particles(
        total in 1u64..20_000,
        steps in 1u32..12,
        d in 0.0f64..=0.5,
        epsilon in 0.0f64..=1.0,
        coin in arb_coin(),
        q in arb_qubit(),
        seed in 0u64..1000,
    ) {
        let cfg = RunConfig::new(
            CoinSchedule::homogeneous(coin), q, total, steps, seed, 1,
        ).unwrap();
        let p = SpinParams::new(d, epsilon, coin).unwrap();
        let mut rng = stream_rng(seed, 1);
        let mut state = SpinSystemState::from_lattice(
            &boxwalk_core::boxball::BoxLatticeState::init(&cfg, &mut rng),
        );
        for _ in 0..steps {
            let flipped = state.flip_step(&p, &mut rng);
            // Flips preserve every site density.
            let (lo, hi) = state.support();
            for x in lo..=hi {
                prop_assert_eq!(flipped.density(x), state.density(x));
            }
            state = flipped.hop_step(&p, &mut rng).unwrap();
            let counted: u64 = state.snapshot().iter().map(|r| r.3).sum();
            prop_assert_eq!(counted, total);
        }
    }

    #[test]
    fn flip_rates_are_one_sided_and_nonnegative(
        n_plus in 0u64..=100_000,
        n_minus in 0u64..=100_000,
        eta_plus in -PI..PI,
        eta_minus in -PI..PI,
        coin in arb_coin(),
    ) {
        prop_assume!(n_plus + n_minus > 0);
        let s = SpinSystemState::from_site_counts(
            &[(0, [n_plus, n_minus], [eta_plus, eta_minus])],
            None,
        ).unwrap();
        let p = SpinParams::new(0.5, 1.0, coin).unwrap();
        let r_plus = s.flip_rate(0, 1, &p);
        let r_minus = s.flip_rate(0, -1, &p);
        prop_assert!(r_plus >= 0.0);
        prop_assert!(r_minus >= 0.0);
        prop_assert!(r_plus == 0.0 || r_minus == 0.0, "both species flipping");
    }

    #[test]
    fn tv_is_a_bounded_symmetric_metric(
        p in arb_distribution(),
        q in arb_distribution(),
        r in arb_distribution(),
    ) {
        let pq = total_variation(&p, &q);
        prop_assert_eq!(pq.to_bits(), total_variation(&q, &p).to_bits());
        prop_assert!((0.0..=1.0 + 1e-12).contains(&pq));
        prop_assert_eq!(total_variation(&p, &p), 0.0);
        let qr = total_variation(&q, &r);
        let pr = total_variation(&p, &r);
        prop_assert!(pr <= pq + qr + 1e-12);
    }

    #[test]
    fn phase_tags_follow_the_qubit_oracle(
        n0 in 1u64..=999_999,
        eta0 in -PI..PI,
        eta1 in -PI..PI,
        coin in arb_coin(),
    ) {
        let n = 1_000_000u64;
        let s = TwoBoxState::new(n0, n - n0, eta0, eta1, 0).unwrap();
        let q = QubitSpec::new(
            (n0 as f64 / n as f64).sqrt(),
            eta0,
            ((n - n0) as f64 / n as f64).sqrt(),
            eta1,
        ).unwrap();
        let expect = q.apply_coin(&coin);
        let (e0, e1) = s.mixed_phases(&coin);
        if expect.r0() > 1e-6 {
            prop_assert!(angle_distance(e0, expect.phi0()) < 1e-9);
        }
        if expect.r1() > 1e-6 {
            prop_assert!(angle_distance(e1, expect.phi1()) < 1e-9);
        }
    }
}
