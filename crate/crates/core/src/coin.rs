//! SU(2) coin operations and single-qubit algebra in polar form.
//!
//! The coin family is parameterised by three angles `(xi, theta, zeta)` with
//! `theta` in `[0, pi/2]`:
//!
//! ```text
//! C(xi, theta, zeta) = | e^{i xi} cos(theta)    e^{i zeta} sin(theta)  |
//!                      | e^{-i zeta} sin(theta) -e^{-i xi} cos(theta)  |
//! ```
//!
//! so that `C(0, pi/4, 0)` is exactly the Hadamard matrix. Qubit states are
//! kept in polar form `(r0, phi0, r1, phi1)`; phases are reported in
//! `(-pi, pi]` and a zero amplitude always carries phase 0.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use num_complex::Complex64;

use crate::error::Error;
use crate::Result;

/// Absolute threshold below which both quadrature components of an amplitude
/// are treated as zero when extracting a phase.
pub const ZERO_AMPLITUDE_EPS: f64 = 1e-14;

/// Reduce an angle to the canonical interval `(-pi, pi]`.
///
/// In-range angles pass through bit-unchanged; only out-of-range values pay
/// the reduction rounding.
pub fn wrap_angle(a: f64) -> f64 {
    if a > PI || a <= -PI {
        let mut r = a.rem_euclid(TAU);
        if r > PI {
            r -= TAU;
        }
        r
    } else {
        a
    }
}

/// Smallest absolute difference between two angles, ignoring 2*pi wraps.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs().min(TAU - wrap_angle(a - b).abs())
}

/// Three-parameter SU(2) coin.
///
/// Trigonometric factors are derived once at construction. `cos^2(theta)` is
/// computed through the double angle as `0.5 * (1 + cos(2 theta))` so that the
/// balanced coin (`theta = pi/4`) yields exactly 0.5/0.5/1.0 for
/// `cos^2`, `sin^2` and `2 sin cos` in double precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinParams {
    xi: f64,
    theta: f64,
    zeta: f64,
    cos_theta: f64,
    sin_theta: f64,
    cos_sq: f64,
    sin_sq: f64,
    cross: f64,
}

impl CoinParams {
    /// Build a coin, rejecting `theta` outside `[0, pi/2]`.
    pub fn new(xi: f64, theta: f64, zeta: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::InvalidParameter {
                name: "theta",
                value: theta,
                expected: "[0, pi/2]",
            });
        }
        if !xi.is_finite() {
            return Err(Error::InvalidParameter {
                name: "xi",
                value: xi,
                expected: "finite radians",
            });
        }
        if !zeta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "zeta",
                value: zeta,
                expected: "finite radians",
            });
        }
        let two_theta = 2.0 * theta;
        let cos_sq = 0.5 * (1.0 + two_theta.cos());
        Ok(Self {
            xi,
            theta,
            zeta,
            cos_theta: theta.cos(),
            sin_theta: theta.sin(),
            cos_sq,
            sin_sq: 1.0 - cos_sq,
            cross: two_theta.sin(),
        })
    }

    /// The Hadamard coin `C(0, pi/4, 0)`.
    pub fn hadamard() -> Self {
        Self::new(0.0, FRAC_PI_4, 0.0).expect("pi/4 is in range")
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub(crate) fn cos_theta(&self) -> f64 {
        self.cos_theta
    }

    pub(crate) fn sin_theta(&self) -> f64 {
        self.sin_theta
    }

    /// `cos^2(theta)`, exact 0.5 at the balanced point.
    pub(crate) fn cos_sq(&self) -> f64 {
        self.cos_sq
    }

    /// `sin^2(theta)`.
    pub(crate) fn sin_sq(&self) -> f64 {
        self.sin_sq
    }

    /// `2 sin(theta) cos(theta)`, exact 1.0 at the balanced point.
    pub(crate) fn cross(&self) -> f64 {
        self.cross
    }

    /// The 2x2 unitary `[[psi0 row], [psi1 row]]` acting on the coin space.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let e_xi = Complex64::from_polar(1.0, self.xi);
        let e_zeta = Complex64::from_polar(1.0, self.zeta);
        [
            [e_xi * self.cos_theta, e_zeta * self.sin_theta],
            [
                e_zeta.conj() * self.sin_theta,
                -e_xi.conj() * self.cos_theta,
            ],
        ]
    }
}

/// Single-qubit state in polar form: `psi_c = r_c e^{i phi_c}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSpec {
    r0: f64,
    phi0: f64,
    r1: f64,
    phi1: f64,
}

impl QubitSpec {
    /// Accepts magnitudes with `|r0^2 + r1^2 - 1| <= 1e-9` and rescales them
    /// to an exactly normalised pair.
    pub fn new(r0: f64, phi0: f64, r1: f64, phi1: f64) -> Result<Self> {
        for (name, v) in [("r0", r0), ("phi0", phi0), ("r1", r1), ("phi1", phi1)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    expected: "finite",
                });
            }
        }
        if r0 < 0.0 || r1 < 0.0 {
            return Err(Error::InvalidParameter {
                name: "r0/r1",
                value: r0.min(r1),
                expected: "nonnegative magnitudes",
            });
        }
        let norm_sq = r0 * r0 + r1 * r1;
        if (norm_sq - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter {
                name: "r0^2 + r1^2",
                value: norm_sq,
                expected: "1 within 1e-9",
            });
        }
        let norm = norm_sq.sqrt();
        Ok(Self {
            r0: r0 / norm,
            phi0,
            r1: r1 / norm,
            phi1,
        })
    }

    /// The basis state `|0>`.
    pub fn zero() -> Self {
        Self {
            r0: 1.0,
            phi0: 0.0,
            r1: 0.0,
            phi1: 0.0,
        }
    }

    /// The symmetric state `(|0> - i|1>)/sqrt(2)` that spreads evenly under
    /// the Hadamard walk.
    pub fn symmetric() -> Self {
        Self {
            r0: std::f64::consts::FRAC_1_SQRT_2,
            phi0: 0.0,
            r1: std::f64::consts::FRAC_1_SQRT_2,
            phi1: -FRAC_PI_2,
        }
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn phi1(&self) -> f64 {
        self.phi1
    }

    /// Amplitudes as complex numbers.
    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        (
            Complex64::from_polar(self.r0, self.phi0),
            Complex64::from_polar(self.r1, self.phi1),
        )
    }

    /// Computational-basis measurement probabilities `(r0^2, r1^2)`.
    pub fn measure_probs(&self) -> (f64, f64) {
        (self.r0 * self.r0, self.r1 * self.r1)
    }

    /// Apply a coin and return the transformed state in polar form.
    ///
    /// The product is evaluated with complex arithmetic and converted back to
    /// polar with the two-argument arctangent, so phases keep their quadrant.
    pub fn apply_coin(&self, coin: &CoinParams) -> QubitSpec {
        let (psi0, psi1) = self.amplitudes();
        let m = coin.matrix();
        let out0 = m[0][0] * psi0 + m[0][1] * psi1;
        let out1 = m[1][0] * psi0 + m[1][1] * psi1;
        let (r0, phi0) = polar_parts(out0);
        let (r1, phi1) = polar_parts(out1);
        QubitSpec { r0, phi0, r1, phi1 }
    }
}

/// Polar form of an amplitude with the zero-amplitude phase convention.
pub(crate) fn polar_parts(z: Complex64) -> (f64, f64) {
    if z.re.abs() <= ZERO_AMPLITUDE_EPS && z.im.abs() <= ZERO_AMPLITUDE_EPS {
        (0.0, 0.0)
    } else {
        (z.norm(), wrap_angle(z.im.atan2(z.re)))
    }
}

/// Assignment of a coin to every `(step, site)` pair.
///
/// A homogeneous walk uses one coin everywhere; space- or time-dependent
/// walks override individual `(t, x)` entries and fall back to the default
/// elsewhere, so the mapping is total.
#[derive(Debug, Clone)]
pub struct CoinSchedule {
    default: CoinParams,
    overrides: HashMap<(u32, i64), CoinParams>,
}

impl CoinSchedule {
    pub fn homogeneous(coin: CoinParams) -> Self {
        Self {
            default: coin,
            overrides: HashMap::new(),
        }
    }

    pub fn with_override(mut self, t: u32, x: i64, coin: CoinParams) -> Self {
        self.overrides.insert((t, x), coin);
        self
    }

    /// Coin applied at site `x` during the step `t -> t + 1`.
    pub fn coin_at(&self, t: u32, x: i64) -> &CoinParams {
        self.overrides.get(&(t, x)).unwrap_or(&self.default)
    }

    pub fn default_coin(&self) -> &CoinParams {
        &self.default
    }

    pub fn is_homogeneous(&self) -> bool {
        self.overrides.is_empty()
    }
}
