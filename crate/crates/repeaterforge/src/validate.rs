//! Independent numerical oracles used to cross-check the closed-form models:
//! adaptive Gauss–Kronrod quadrature for the time-window formulas and
//! Monte-Carlo reference estimates for state-level quantities. These are
//! verification harnesses, not part of the physics core; the `validate` CLI
//! subcommand and the test suites both drive them.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::qstate::{apply_channel, CMatrix, ChannelSpec, DensityMatrix};
use crate::timewindows::{
    coincidence_prob_dc_dc, coincidence_prob_ph_dc, coincidence_prob_ph_ph,
    detection_probability, visibility, PhotonShape, WindowConfig,
};

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1] (QUADPACK constants).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = WGK[7] * f(center);
    let mut gauss = WG[3] * f(center);
    for (i, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    let integral = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (integral, err)
}

/// Adaptive Gauss–Kronrod integration with relative tolerance `rel_tol` and
/// an absolute floor of 1e-14.
pub fn adaptive_quad(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    const ABS_FLOOR: f64 = 1e-14;
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        rel_tol: f64,
        whole: f64,
        err: f64,
        scale: f64,
        depth: usize,
    ) -> f64 {
        if depth >= 40 || err <= ABS_FLOOR + rel_tol * scale.max(whole.abs()) {
            return whole;
        }
        let m = 0.5 * (a + b);
        let (left, le) = gk15(f, a, m);
        let (right, re) = gk15(f, m, b);
        let half_tol = rel_tol / std::f64::consts::SQRT_2;
        recurse(f, a, m, half_tol, left, le, scale, depth + 1)
            + recurse(f, m, b, half_tol, right, re, scale, depth + 1)
    }
    if a == b {
        return 0.0;
    }
    let (whole, err) = gk15(f, a, b);
    recurse(f, a, b, rel_tol, whole, err, whole.abs(), 0)
}

/// Quadrature oracle for the photon detection probability:
/// ∫₀ᵀ 2abη/(a-2b) (e^{-2bt} - e^{-at}) dt, evaluated from the detection-time
/// density definition (emission density convolved with |ψ|²).
pub fn detection_probability_oracle(shape: &PhotonShape<f64>, t_window: f64) -> f64 {
    let (a, b, eta) = (shape.a, shape.b, shape.eta);
    let density = move |t: f64| {
        // ∫₀ᵗ a e^{-a t0} 2b e^{-2b (t - t0)} dt0, integrated numerically so
        // the oracle does not share the closed-form (a - 2b) structure.
        adaptive_quad(
            &|t0: f64| a * (-a * t0).exp() * 2.0 * b * (-2.0 * b * (t - t0)).exp(),
            0.0,
            t,
            1e-10,
        )
    };
    eta * adaptive_quad(&density, 0.0, t_window, 1e-9)
}

/// Quadrature oracle for the photon-photon coincidence probability.
pub fn coincidence_ph_ph_oracle(shape: &PhotonShape<f64>, w: &WindowConfig<f64>) -> f64 {
    let (a, b) = (shape.a, shape.b);
    let t_win = w.t_window;
    let tau = w.tau;
    let p = move |t: f64| 2.0 * a * b / (a - 2.0 * b) * ((-2.0 * b * t).exp() - (-a * t).exp());
    let pdet = adaptive_quad(&p, 0.0, t_win, 1e-10);
    let outer = |t1: f64| {
        let hi = (t1 + tau).min(t_win);
        p(t1) * adaptive_quad(&p, t1, hi, 1e-10)
    };
    2.0 * adaptive_quad(&outer, 0.0, t_win, 1e-9) / (pdet * pdet)
}

/// Quadrature oracle for the photon/dark-count coincidence probability.
pub fn coincidence_ph_dc_oracle(shape: &PhotonShape<f64>, w: &WindowConfig<f64>) -> f64 {
    let (a, b) = (shape.a, shape.b);
    let t_win = w.t_window;
    let tau = w.tau;
    let p = move |t: f64| 2.0 * a * b / (a - 2.0 * b) * ((-2.0 * b * t).exp() - (-a * t).exp());
    let pdet = adaptive_quad(&p, 0.0, t_win, 1e-10);
    let outer = |t1: f64| {
        let lo = (t1 - tau).max(0.0);
        let hi = (t1 + tau).min(t_win);
        p(t1) * (hi - lo) / t_win
    };
    adaptive_quad(&outer, 0.0, t_win, 1e-9) / pdet
}

/// Oracle for the dark-count/dark-count coincidence probability.
pub fn coincidence_dc_dc_oracle(w: &WindowConfig<f64>) -> f64 {
    let t_win = w.t_window;
    let tau = w.tau;
    let outer = |t1: f64| {
        let lo = (t1 - tau).max(0.0);
        let hi = (t1 + tau).min(t_win);
        (hi - lo) / (t_win * t_win)
    };
    adaptive_quad(&outer, 0.0, t_win, 1e-10)
}

/// Quadrature oracle for the visibility, from its defining integral over the
/// coincidence region with the two-photon interference kernel
/// K(u, v) = ∫ p_em(t0) ψ_{t0}(u) ψ_{t0}(v) dt0.
pub fn visibility_oracle(shape: &PhotonShape<f64>, w: &WindowConfig<f64>) -> f64 {
    let (a, b) = (shape.a, shape.b);
    let t_win = w.t_window;
    let tau = w.tau;
    let kernel = move |u: f64, v: f64| {
        let m = u.min(v);
        adaptive_quad(
            &|t0: f64| a * (-a * t0).exp() * 2.0 * b * (-b * (u - t0)).exp() * (-b * (v - t0)).exp(),
            0.0,
            m,
            1e-9,
        )
    };
    let inner = |t1: f64| {
        let hi = (t1 + tau).min(t_win);
        adaptive_quad(&|t2: f64| kernel(t1, t2) * kernel(t2, t1), t1, hi, 1e-8)
    };
    let numerator = 2.0 * adaptive_quad(&inner, 0.0, t_win, 1e-7);
    let p = move |t: f64| 2.0 * a * b / (a - 2.0 * b) * ((-2.0 * b * t).exp() - (-a * t).exp());
    let pdet = adaptive_quad(&p, 0.0, t_win, 1e-10);
    let phph = coincidence_ph_ph_oracle(shape, w);
    numerator / (pdet * pdet * phph)
}

/// Haar-random single-qubit ket.
pub fn haar_random_ket<R: Rng>(rng: &mut R) -> [Complex<f64>; 2] {
    let mut draw = || {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex::new(re, im)
    };
    let (a, b) = (draw(), draw());
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    [a / norm, b / norm]
}

/// Random density matrix as a mixture of a few random pure states.
pub fn random_density_matrix<R: Rng>(rng: &mut R, n_qubits: usize) -> DensityMatrix<f64> {
    let dim = 1 << n_qubits;
    let n_terms = rng.gen_range(1..=dim + 1);
    let mut weights: Vec<f64> = (0..n_terms).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut mat = CMatrix::zeros(dim);
    for w in weights {
        let mut ket: Vec<Complex<f64>> = (0..dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex::new(re, im)
            })
            .collect();
        let norm: f64 = ket.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for c in &mut ket {
            *c /= norm;
        }
        mat = mat.add(&CMatrix::projector(&ket).scale_re(w));
    }
    DensityMatrix::new(mat).expect("mixture of pure states is a valid state")
}

/// Monte-Carlo estimate (mean, standard error) of the Haar-averaged
/// teleportation fidelity of `sigma`.
pub fn haar_teleportation_fidelity_mc<R: Rng>(
    sigma: &DensityMatrix<f64>,
    samples: usize,
    rng: &mut R,
) -> (f64, f64) {
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let ket = haar_random_ket(rng);
        let psi = DensityMatrix::from_pure(&ket).expect("normalized ket");
        let out = crate::qstate::teleportation_channel_apply(sigma, &psi)
            .expect("valid teleportation input");
        let f = out.overlap(&psi).expect("pure reference");
        sum += f;
        sum_sq += f * f;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    (mean, (var / n).sqrt())
}

/// Monte-Carlo estimate (mean, standard error) of the Z-error probability of
/// the sampled-rotation collective Gaussian channel on |+⟩.
pub fn collective_gaussian_z_error_mc<R: Rng>(
    t: f64,
    tau: f64,
    samples: usize,
    rng: &mut R,
) -> (f64, f64) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityMatrix::from_pure(&[Complex::new(h, 0.0), Complex::new(h, 0.0)])
        .expect("normalized ket");
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let r: f64 = StandardNormal.sample(rng);
        let out = apply_channel(&plus, &ChannelSpec::CollectiveGaussian { r, t, tau }, &[0])
            .expect("valid channel");
        // Z-error probability of a dephased |+⟩ is (1 - 2 Re ρ01) / 2 ... the
        // sampled rotation keeps the state pure; averaging the projector onto
        // |-⟩ over samples estimates the channel's dephasing probability.
        let p_minus = 0.5 - out.entry(0, 1).re;
        sum += p_minus;
        sum_sq += p_minus * p_minus;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    (mean, (var / n).sqrt())
}

/// Outcome of one oracle suite, for the `validate` subcommand.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub worst_deviation: f64,
}

/// Runs the time-window closed forms against the quadrature oracles on a
/// randomized grid of (a, b, T, τ) tuples with a/b ∈ [0.1, 10].
pub fn run_time_window_suite<R: Rng>(tuples: usize, rng: &mut R) -> Vec<SuiteReport> {
    let mut reports = vec![
        SuiteReport { name: "p_det vs quadrature", passed: 0, failed: 0, worst_deviation: 0.0 },
        SuiteReport { name: "p_ph-ph vs quadrature", passed: 0, failed: 0, worst_deviation: 0.0 },
        SuiteReport { name: "p_dc-dc vs quadrature", passed: 0, failed: 0, worst_deviation: 0.0 },
        SuiteReport { name: "p_ph-dc vs quadrature", passed: 0, failed: 0, worst_deviation: 0.0 },
        SuiteReport { name: "visibility vs quadrature", passed: 0, failed: 0, worst_deviation: 0.0 },
    ];
    for _ in 0..tuples {
        let b: f64 = rng.gen_range(0.05e6..2.0e6);
        let ratio: f64 = rng.gen_range(0.1..10.0);
        let a = ratio * b;
        let eta = rng.gen_range(0.3..1.0);
        let shape = PhotonShape::new(a, b, eta).expect("valid shape");
        // Keep windows in a regime where all probabilities are resolvable.
        let t_window = rng.gen_range(0.5..25.0) / b.min(a);
        let tau = t_window * rng.gen_range(0.02..1.0f64);
        let w = WindowConfig::new(t_window, tau).expect("valid window");

        let mut check = |idx: usize, value: f64, oracle: f64, rel_tol: f64| {
            let denom = oracle.abs().max(1e-12);
            let dev = (value - oracle).abs() / denom;
            reports[idx].worst_deviation = reports[idx].worst_deviation.max(dev);
            if dev <= rel_tol {
                reports[idx].passed += 1;
            } else {
                reports[idx].failed += 1;
            }
        };

        check(
            0,
            detection_probability(&shape, t_window).expect("valid input"),
            detection_probability_oracle(&shape, t_window),
            1e-6,
        );
        check(
            1,
            coincidence_prob_ph_ph(&shape, &w).expect("valid input"),
            coincidence_ph_ph_oracle(&shape, &w),
            1e-6,
        );
        check(
            2,
            coincidence_prob_dc_dc(&w).expect("valid input"),
            coincidence_dc_dc_oracle(&w),
            1e-6,
        );
        check(
            3,
            coincidence_prob_ph_dc(&shape, &w).expect("valid input"),
            coincidence_ph_dc_oracle(&shape, &w),
            1e-6,
        );
        check(
            4,
            visibility(&shape, &w).expect("valid input"),
            visibility_oracle(&shape, &w),
            1e-5,
        );
    }
    reports
}
