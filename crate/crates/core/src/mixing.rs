//! The stochastic two-bucket mix shared by the box engine and the spin
//! engine.
//!
//! One mix emulates a coin application on a pair of occupied buckets
//! `(n0, eta0), (n1, eta1)`: a real-valued target for bucket 0 is rounded to
//! an integer with a fair floor/ceil draw, the complement stays in bucket 1,
//! and the phase tags are replaced by the arguments of the would-be quantum
//! amplitudes. Both engines route every coin event through [`mix_site`], so
//! runs that draw from the same stream stay bit-identical across engines.

use rand::Rng;

use crate::coin::{wrap_angle, CoinParams, ZERO_AMPLITUDE_EPS};
use crate::rng::EngineRng;

/// Result of one site mix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct MixOutcome {
    pub n0: u64,
    pub n1: u64,
    pub eta0: f64,
    pub eta1: f64,
    /// Whether the marked ball changed buckets. `false` when no marked ball
    /// was present.
    pub marked_moved: bool,
}

/// Unclamped mix target for bucket 0:
///
/// ```text
/// n0 cos^2(theta) + n1 sin^2(theta)
///   + 2 sqrt(n0 n1) sin(theta) cos(theta) cos(eta0 - eta1 + xi - zeta)
/// ```
///
/// The term order matters: with the balanced coin the precomputed factors
/// are exactly (0.5, 0.5, 1.0), making this expression bit-identical to the
/// two-term form `(n0 + n1)/2 + sqrt(n0 n1) cos(eta1 - eta0)`.
pub(crate) fn mix_target_raw(n0: u64, n1: u64, eta0: f64, eta1: f64, coin: &CoinParams) -> f64 {
    let n0 = n0 as f64;
    let n1 = n1 as f64;
    let arg = eta0 - eta1 + coin.xi() - coin.zeta();
    n0 * coin.cos_sq() + n1 * coin.sin_sq() + (n0 * n1).sqrt() * coin.cross() * arg.cos()
}

/// Mix target clamped to the representable range `[0, n0 + n1]`.
///
/// The raw value can overshoot by ulp-scale error at interference extremes;
/// a negative or super-total occupation is unrepresentable.
pub(crate) fn mix_target(n0: u64, n1: u64, eta0: f64, eta1: f64, coin: &CoinParams) -> f64 {
    mix_target_raw(n0, n1, eta0, eta1, coin).clamp(0.0, (n0 + n1) as f64)
}

/// Updated phase tags `(eta0', eta1')` for a mix of the given buckets.
///
/// With `f_c = sqrt(n_c / (n0 + n1))` the would-be amplitudes are
///
/// ```text
/// psi0' = f0 cos(theta) e^{i(xi + eta0)}   + f1 sin(theta) e^{i(zeta + eta1)}
/// psi1' = f0 sin(theta) e^{i(eta0 - zeta)} - f1 cos(theta) e^{i(eta1 - xi)}
/// ```
///
/// and each tag is `atan2(Im, Re)` in `(-pi, pi]`, or 0 when both parts
/// vanish. Only the occupation ratio enters, so any consistent normalization
/// of `f_c` gives the same tags.
pub(crate) fn mixed_phases(
    n0: u64,
    n1: u64,
    eta0: f64,
    eta1: f64,
    coin: &CoinParams,
) -> (f64, f64) {
    let total = (n0 + n1) as f64;
    let f0 = (n0 as f64 / total).sqrt();
    let f1 = (n1 as f64 / total).sqrt();
    let c0 = f0 * coin.cos_theta();
    let s0 = f0 * coin.sin_theta();
    let c1 = f1 * coin.cos_theta();
    let s1 = f1 * coin.sin_theta();

    let (sin_a, cos_a) = (coin.xi() + eta0).sin_cos();
    let (sin_b, cos_b) = (coin.zeta() + eta1).sin_cos();
    let (sin_c, cos_c) = (eta0 - coin.zeta()).sin_cos();
    let (sin_d, cos_d) = (eta1 - coin.xi()).sin_cos();

    let re0 = c0 * cos_a + s1 * cos_b;
    let im0 = c0 * sin_a + s1 * sin_b;
    let re1 = s0 * cos_c - c1 * cos_d;
    let im1 = s0 * sin_c - c1 * sin_d;

    (phase_of(re0, im0), phase_of(re1, im1))
}

fn phase_of(re: f64, im: f64) -> f64 {
    if re.abs() <= ZERO_AMPLITUDE_EPS && im.abs() <= ZERO_AMPLITUDE_EPS {
        0.0
    } else {
        wrap_angle(im.atan2(re))
    }
}

/// Floor or ceiling of `target`, each with probability 1/2.
///
/// One boolean is always drawn, so the stream advances identically whether
/// or not the target happens to be integral.
pub(crate) fn randomized_round(target: f64, rng: &mut EngineRng) -> u64 {
    let take_floor: bool = rng.random();
    if take_floor {
        target.floor() as u64
    } else {
        target.ceil() as u64
    }
}

/// One full coin event on a site: target, rounding, ball transfer, phase
/// update, and the marked-ball relocation draw.
///
/// `marked_in` is the bucket holding the marked ball, if it sits on this
/// site. When `k` balls leave a bucket of `n`, the marked ball leaves with
/// probability `k/n` (a uniformly random subset is transferred). Draw order
/// per site is fixed: one rounding boolean, then one relocation index only
/// when the marked bucket shrank.
pub(crate) fn mix_site(
    n0: u64,
    n1: u64,
    eta0: f64,
    eta1: f64,
    coin: &CoinParams,
    marked_in: Option<u8>,
    rng: &mut EngineRng,
) -> MixOutcome {
    let total = n0 + n1;
    debug_assert!(total > 0, "mix applies only to occupied sites");
    let target = mix_target(n0, n1, eta0, eta1, coin);
    let new_n0 = randomized_round(target, rng).min(total);
    let new_n1 = total - new_n0;
    let (new_eta0, new_eta1) = mixed_phases(n0, n1, eta0, eta1, coin);

    let marked_moved = match marked_in {
        Some(bucket) => {
            let (before, after) = if bucket == 0 {
                (n0, new_n0)
            } else {
                (n1, new_n1)
            };
            let left = before.saturating_sub(after);
            left > 0 && rng.random_range(0..before) < left
        }
        None => false,
    };

    MixOutcome {
        n0: new_n0,
        n1: new_n1,
        eta0: new_eta0,
        eta1: new_eta1,
        marked_moved,
    }
}

/// Round an expected occupation `w` to the nearest integer when it differs
/// only by accumulated float noise, e.g. `0.3 * 10` evaluating to
/// `3.0000000000000004`. Preparation counts from products like `rho * N`
/// pass through this before the floor/ceil draw so that analytically
/// integral targets stay deterministic.
pub(crate) fn snap_integral(w: f64) -> f64 {
    let nearest = w.round();
    if (w - nearest).abs() <= 4.0 * f64::EPSILON * w.abs().max(1.0) {
        nearest
    } else {
        w
    }
}
