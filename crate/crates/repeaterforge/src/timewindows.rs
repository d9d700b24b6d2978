//! Closed-form detection and coincidence statistics for double-exponential
//! photons, used to model detection and coincidence time windows.
//!
//! A photon is described by an emission-time density `a e^{-a t}` and a pure
//! wavefunction `sqrt(2b) e^{-b (t - t0)}`, both one-sided exponentials. The
//! degenerate line `a = 2b` is evaluated through a symmetric four-point
//! Richardson limit rather than rejected, since optimizer sweeps can cross it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum TimeWindowError {
    #[error("invalid photon shape parameter {name} = {value}")]
    InvalidShape { name: &'static str, value: f64 },
    #[error("invalid window: tau = {tau}, T = {t_window} (need 0 <= tau <= T, T > 0)")]
    InvalidWindow { tau: f64, t_window: f64 },
    #[error("visibility undefined: photon-photon coincidence probability is zero")]
    ZeroCoincidence,
}

/// Double-exponential photon state plus detector efficiency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhotonShape<T> {
    /// Emission-time rate (s⁻¹): density a e^{-a t}.
    pub a: T,
    /// Wavefunction decay rate (s⁻¹): |ψ|² ∝ e^{-2 b t}.
    pub b: T,
    /// Detector efficiency.
    pub eta: T,
}

impl<T: Real> PhotonShape<T> {
    pub fn new(a: T, b: T, eta: T) -> Result<Self, TimeWindowError> {
        if !(a > T::zero()) || !a.is_finite() {
            return Err(TimeWindowError::InvalidShape {
                name: "a",
                value: a.to_f64_lossy(),
            });
        }
        if !(b > T::zero()) || !b.is_finite() {
            return Err(TimeWindowError::InvalidShape {
                name: "b",
                value: b.to_f64_lossy(),
            });
        }
        if eta < T::zero() || eta > T::one() {
            return Err(TimeWindowError::InvalidShape {
                name: "eta",
                value: eta.to_f64_lossy(),
            });
        }
        Ok(Self { a, b, eta })
    }

    /// Half-life of the emission-time density.
    pub fn emission_half_life(&self) -> T {
        T::LN_2() / self.a
    }

    /// Half-life of the wavefunction envelope ψ ∝ e^{-b t}.
    pub fn wavefunction_half_life(&self) -> T {
        T::LN_2() / self.b
    }
}

/// Builds a shape from the half-life of the wavefunction envelope ψ and of
/// the emission-time density: a = ln2 / hl_emission, b = ln2 /
/// hl_wavefunction. The envelope convention is the one that reproduces the
/// reported trapped-ion visibility of 0.89 at a 0.5 μs coincidence window.
pub fn shape_from_half_lives<T: Real>(
    hl_wavefunction: T,
    hl_emission: T,
    eta: T,
) -> Result<PhotonShape<T>, TimeWindowError> {
    if !(hl_wavefunction > T::zero()) {
        return Err(TimeWindowError::InvalidShape {
            name: "hl_wavefunction",
            value: hl_wavefunction.to_f64_lossy(),
        });
    }
    if !(hl_emission > T::zero()) {
        return Err(TimeWindowError::InvalidShape {
            name: "hl_emission",
            value: hl_emission.to_f64_lossy(),
        });
    }
    PhotonShape::new(T::LN_2() / hl_emission, T::LN_2() / hl_wavefunction, eta)
}

/// Detection window `T` and coincidence window `tau`, seconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowConfig<T> {
    pub t_window: T,
    pub tau: T,
}

impl<T: Real> WindowConfig<T> {
    pub fn new(t_window: T, tau: T) -> Result<Self, TimeWindowError> {
        if !(t_window > T::zero()) || tau < T::zero() || tau > t_window {
            return Err(TimeWindowError::InvalidWindow {
                tau: tau.to_f64_lossy(),
                t_window: t_window.to_f64_lossy(),
            });
        }
        Ok(Self { t_window, tau })
    }
}

/// Evaluates `f(a)` with the removable singularity at `a = 2b` handled by a
/// symmetric four-point Richardson limit.
fn degenerate_safe<T: Real>(a: T, b: T, f: impl Fn(T) -> T) -> T {
    let center = T::of(2.0) * b;
    let rel_gap = ((a - center) / (a + center)).abs();
    if rel_gap > T::of(1e-5) {
        return f(a);
    }
    let d = center * T::of(1e-3);
    let two = T::of(2.0);
    let f1 = f(a + d) + f(a - d);
    let f2 = f(a + two * d) + f(a - two * d);
    (T::of(4.0) * f1 - f2) / T::of(6.0)
}

fn clamp_unit<T: Real>(x: T) -> T {
    x.max(T::zero()).min(T::one())
}

/// p_det(T) / η — the window-truncation factor of the detection probability.
fn detection_factor<T: Real>(shape: &PhotonShape<T>, t_window: T) -> T {
    let b = shape.b;
    degenerate_safe(shape.a, b, |a| {
        let denom = a - T::of(2.0) * b;
        T::one() - a / denom * (-T::of(2.0) * b * t_window).exp()
            + T::of(2.0) * b / denom * (-a * t_window).exp()
    })
}

/// Probability that the photon is detected within the window `[0, T]`.
pub fn detection_probability<T: Real>(
    shape: &PhotonShape<T>,
    t_window: T,
) -> Result<T, TimeWindowError> {
    if t_window < T::zero() {
        return Err(TimeWindowError::InvalidWindow {
            tau: T::zero().to_f64_lossy(),
            t_window: t_window.to_f64_lossy(),
        });
    }
    if t_window == T::zero() {
        return Ok(T::zero());
    }
    Ok(clamp_unit(shape.eta * detection_factor(shape, t_window)))
}

/// Right-hand side of the photon-photon coincidence theorem,
/// p_ph-ph (p_det/η)². Products of growing and decaying exponentials are
/// combined into single non-positive exponents so large windows do not
/// overflow.
fn ph_ph_rhs<T: Real>(shape: &PhotonShape<T>, w: &WindowConfig<T>) -> T {
    let b = shape.b;
    let (t, tau) = (w.t_window, w.tau);
    degenerate_safe(shape.a, b, |a| {
        let two = T::of(2.0);
        let four = T::of(4.0);
        let a2 = a * a;
        let b2 = b * b;
        let diff = a - two * b;
        let sum = a + two * b;
        let diff2 = diff * diff;
        a2 / (a2 - four * b2) * (-(-two * b * tau).exp_m1())
            - four * b2 / (a2 - four * b2) * (-(-a * tau).exp_m1())
            + a2 / diff2 * ((-four * b * t).exp() - (-two * b * (two * t - tau)).exp())
            + four * b2 / diff2 * ((-two * a * t).exp() - (-a * (two * t - tau)).exp())
            - four * a * b / diff2
                * ((-sum * t).exp()
                    - (a * (-a * t - two * b * (t - tau)).exp()
                        + two * b * (-two * b * t - a * (t - tau)).exp())
                        / sum)
    })
}

/// Coincidence probability of two photon detections within `tau`, given both
/// fall inside the detection window.
pub fn coincidence_prob_ph_ph<T: Real>(
    shape: &PhotonShape<T>,
    w: &WindowConfig<T>,
) -> Result<T, TimeWindowError> {
    let factor = detection_factor(shape, w.t_window);
    Ok(clamp_unit(ph_ph_rhs(shape, w) / (factor * factor)))
}

/// Coincidence probability of two dark counts, uniformly distributed within
/// the detection window: 1 - ((T - tau)/T)².
pub fn coincidence_prob_dc_dc<T: Real>(w: &WindowConfig<T>) -> Result<T, TimeWindowError> {
    let ratio = (w.t_window - w.tau) / w.t_window;
    Ok(clamp_unit(T::one() - ratio * ratio))
}

/// Coincidence probability of one photon detection and one dark count.
pub fn coincidence_prob_ph_dc<T: Real>(
    shape: &PhotonShape<T>,
    w: &WindowConfig<T>,
) -> Result<T, TimeWindowError> {
    let b = shape.b;
    let (t, tau) = (w.t_window, w.tau);
    let rhs = degenerate_safe(shape.a, b, |a| {
        let two = T::of(2.0);
        let diff = a - two * b;
        let bracket = |rate: T| {
            T::one() + rate * tau - (-rate * tau).exp() + (-rate * t).exp() * (T::one() - rate * tau)
                - (-rate * (t - tau)).exp()
        };
        a / (two * b * diff * t) * bracket(two * b) - two * b / (a * diff * t) * bracket(a)
    });
    Ok(clamp_unit(rhs / detection_factor(shape, w.t_window)))
}

/// Hong-Ou-Mandel visibility for two photons of the given shape under the
/// window configuration.
pub fn visibility<T: Real>(
    shape: &PhotonShape<T>,
    w: &WindowConfig<T>,
) -> Result<T, TimeWindowError> {
    let phph = ph_ph_rhs(shape, w);
    if !(phph > T::zero()) {
        return Err(TimeWindowError::ZeroCoincidence);
    }
    let b = shape.b;
    let (t, tau) = (w.t_window, w.tau);
    let rhs = degenerate_safe(shape.a, b, |a| {
        let two = T::of(2.0);
        let diff = a - two * b;
        let diff2 = diff * diff;
        let sum = a + two * b;
        // (1 - e^{2(a-b)τ}) e^{-2aT} / (a - b): the removable point a = b is
        // handled through exp_m1, the large-argument case by combining the
        // exponents (both are non-positive since τ ≤ T).
        let x = a - b;
        let g = if (two * x * tau).abs() < T::of(0.5) {
            -(two * x * tau).exp_m1() / x * (-two * a * t).exp()
        } else {
            ((-two * a * t).exp() - (-two * a * (t - tau) - two * b * tau).exp()) / x
        };
        a / sum * (-(-two * b * tau).exp_m1())
            + two * a * b * b / diff2 * g
            + a * a / diff2 * ((-T::of(4.0) * b * t).exp() - (-two * b * (two * t - tau)).exp())
            - T::of(16.0) * a * b * b / (diff2 * sum)
                * ((-sum * t).exp() - (-two * b * t - a * (t - tau)).exp())
    });
    Ok(clamp_unit(rhs / phph))
}
