//! Exact complex-amplitude evolution of the one-dimensional walk.
//!
//! This engine tracks the full two-component wavefunction and is the
//! ground truth the stochastic engines are compared against. One step is the
//! coin applied at every site followed by the conditional shift: lane 0
//! amplitude moves from `x` to `x + 1`, lane 1 from `x` to `x - 1`.

use num_complex::Complex64;

use crate::analysis::Distribution;
use crate::coin::{polar_parts, CoinSchedule, QubitSpec};

/// Two-lane amplitude window after `t` steps from a point start.
///
/// The support is `[-t, t]`; index `i` in the backing vector corresponds to
/// site `x = i - t`. Sites with `x + t` odd stay exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeField {
    t: u32,
    amps: Vec<[Complex64; 2]>,
}

impl AmplitudeField {
    /// The localized start `(psi0 |0> + psi1 |1>) ⊗ |x=0>`.
    pub fn from_qubit(q: &QubitSpec) -> Self {
        let (psi0, psi1) = q.amplitudes();
        Self {
            t: 0,
            amps: vec![[psi0, psi1]],
        }
    }

    pub fn time(&self) -> u32 {
        self.t
    }

    /// Inclusive support window `(x_min, x_max) = (-t, t)`.
    pub fn support(&self) -> (i64, i64) {
        (-(self.t as i64), self.t as i64)
    }

    /// Amplitude at `(x, c)`; zero outside the window.
    pub fn amplitude(&self, x: i64, c: usize) -> Complex64 {
        assert!(c < 2, "coin lane must be 0 or 1");
        let t = self.t as i64;
        if x < -t || x > t {
            return Complex64::new(0.0, 0.0);
        }
        self.amps[(x + t) as usize][c]
    }

    /// Phase of the amplitude at `(x, c)` in `(-pi, pi]`, 0 for zero
    /// amplitude.
    pub fn phase(&self, x: i64, c: usize) -> f64 {
        polar_parts(self.amplitude(x, c)).1
    }

    /// Total squared norm; 1 within accumulation error for a unitary walk.
    pub fn norm_sqr(&self) -> f64 {
        self.amps
            .iter()
            .map(|a| a[0].norm_sqr() + a[1].norm_sqr())
            .sum()
    }

    /// One walk step: per-site coin from `coins` at time `self.t`, then the
    /// conditional shift. The window grows by one site on each side.
    pub fn walk_step(&self, coins: &CoinSchedule) -> AmplitudeField {
        let t = self.t as i64;
        let mut next = vec![[Complex64::new(0.0, 0.0); 2]; self.amps.len() + 2];
        for (i, lanes) in self.amps.iter().enumerate() {
            let [a0, a1] = *lanes;
            if a0 == Complex64::ZERO && a1 == Complex64::ZERO {
                continue;
            }
            let x = i as i64 - t;
            let m = coins.coin_at(self.t, x).matrix();
            let out0 = m[0][0] * a0 + m[0][1] * a1;
            let out1 = m[1][0] * a0 + m[1][1] * a1;
            // In the grown window, site x maps to index i + 1; the shift
            // sends lane 0 to x + 1 and lane 1 to x - 1.
            next[i + 2][0] += out0;
            next[i][1] += out1;
        }
        AmplitudeField {
            t: self.t + 1,
            amps: next,
        }
    }

    /// `steps`-fold composition of [`walk_step`](Self::walk_step) from the
    /// localized start.
    pub fn evolve(initial: &QubitSpec, coins: &CoinSchedule, steps: u32) -> AmplitudeField {
        let mut field = Self::from_qubit(initial);
        for _ in 0..steps {
            field = field.walk_step(coins);
        }
        field
    }

    /// Position distribution `P(x) = |psi_{x,0}|^2 + |psi_{x,1}|^2`.
    ///
    /// Sites with exactly zero probability are omitted.
    pub fn position_distribution(&self) -> Distribution {
        let t = self.t as i64;
        Distribution::from_weights(self.amps.iter().enumerate().filter_map(|(i, a)| {
            let p = a[0].norm_sqr() + a[1].norm_sqr();
            (p != 0.0).then_some((i as i64 - t, p))
        }))
    }
}
