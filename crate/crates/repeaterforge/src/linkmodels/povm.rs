//! Brute-force POVM evaluation of the double-click midpoint measurement.
//!
//! Builds the six-subsystem pre-measurement state (two emitter qubits and the
//! four photonic polarization modes, each a 0/1-photon Fock space), applies
//! photon loss as amplitude damping, assembles the dark-count-modified
//! single-click POVM elements per polarization, and projects. Fully
//! independent of the closed-form path in `double_click.rs`.
//!
//! Beam-splitter convention: input a → (c + d)/√2, input b → (c − d)/√2;
//! detectors 1/3 catch the horizontal outputs of the two polarizing beam
//! splitters, detectors 2/4 the vertical ones. With this convention the
//! same-PBS pattern projects the emitters onto Ψ+ and the different-PBS
//! pattern onto Ψ-.

use num_complex::Complex;

use crate::qstate::{CMatrix, DensityMatrix};
use crate::scalar::Real;

use super::{DetectorMode, DoubleClickParams, LinkModelError, LinkOutcome};

const N_QUBITS: usize = 6; // [spin_A, spin_B, H_A, H_B, V_A, V_B]

fn kraus_apply<T: Real>(state: &CMatrix<T>, kraus: &[CMatrix<T>], qubits: &[usize]) -> CMatrix<T> {
    let mut out = CMatrix::zeros(state.dim());
    for k in kraus {
        let full = k.embed(qubits, N_QUBITS);
        out = out.add(&full.mul(state).mul(&full.dagger()));
    }
    out
}

/// Emitter-photon state of one node on (spin, H, V): Werner mixture of
/// (|0 H⟩ + |1 V⟩)/√2 with weight q = (4 F_em - 1)/3.
fn node_state<T: Real>(f_em: T) -> CMatrix<T> {
    let q = (T::of(4.0) * f_em - T::one()) / T::of(3.0);
    let h = T::of(std::f64::consts::FRAC_1_SQRT_2);
    // Index (s, n_H, n_V) = s*4 + n_H*2 + n_V.
    let mut ket = vec![Complex::new(T::zero(), T::zero()); 8];
    ket[0b010] = Complex::new(h, T::zero()); // |0, H⟩
    ket[0b101] = Complex::new(h, T::zero()); // |1, V⟩
    let mut mat = CMatrix::projector(&ket).scale_re(q);
    let quarter = (T::one() - q) / T::of(4.0);
    for idx in [0b010, 0b001, 0b110, 0b101] {
        mat[(idx, idx)] += Complex::new(quarter, T::zero());
    }
    mat
}

/// Joint 64-dim pre-loss state ordered [spin_A, spin_B, H_A, H_B, V_A, V_B].
fn joint_state<T: Real>(f_em_a: T, f_em_b: T) -> CMatrix<T> {
    let a = node_state(f_em_a);
    let b = node_state(f_em_b);
    let mut out = CMatrix::zeros(64);
    let place = |node_idx: usize, partner_idx: usize| -> usize {
        // node bits (s, h, v), partner bits (s', h', v') →
        // [s, s', h, h', v, v'].
        let (s, h, v) = (node_idx >> 2 & 1, node_idx >> 1 & 1, node_idx & 1);
        let (s2, h2, v2) = (partner_idx >> 2 & 1, partner_idx >> 1 & 1, partner_idx & 1);
        s << 5 | s2 << 4 | h << 3 | h2 << 2 | v << 1 | v2
    };
    for ia in 0..8 {
        for ja in 0..8 {
            let va = a[(ia, ja)];
            if va.re == T::zero() && va.im == T::zero() {
                continue;
            }
            for ib in 0..8 {
                for jb in 0..8 {
                    let vb = b[(ib, jb)];
                    if vb.re == T::zero() && vb.im == T::zero() {
                        continue;
                    }
                    out[(place(ia, ib), place(ja, jb))] = va * vb;
                }
            }
        }
    }
    out
}

/// Single-click POVM elements on one polarization pair (basis |n_A n_B⟩),
/// labelled by click counts (i, j) in the two detectors behind the beam
/// splitter, with the Hong-Ou-Mandel overlap √V.
struct SingleClickPovm<T> {
    m00: CMatrix<T>,
    m10: CMatrix<T>,
    m01: CMatrix<T>,
    m20: CMatrix<T>,
    m02: CMatrix<T>,
}

fn single_click_povm<T: Real>(visibility: T) -> SingleClickPovm<T> {
    let half = T::of(0.5);
    let mu = visibility.sqrt();
    let zero = Complex::new(T::zero(), T::zero());
    let mut m00 = CMatrix::zeros(4);
    m00[(0, 0)] = Complex::new(T::one(), T::zero());

    let mut m10 = CMatrix::zeros(4);
    m10[(1, 1)] = Complex::new(half, T::zero());
    m10[(2, 2)] = Complex::new(half, T::zero());
    m10[(1, 2)] = Complex::new(half * mu, T::zero());
    m10[(2, 1)] = Complex::new(half * mu, T::zero());

    let mut m01 = CMatrix::zeros(4);
    m01[(1, 1)] = Complex::new(half, T::zero());
    m01[(2, 2)] = Complex::new(half, T::zero());
    m01[(1, 2)] = Complex::new(-half * mu, T::zero());
    m01[(2, 1)] = Complex::new(-half * mu, T::zero());

    let bunch = (T::one() + visibility) / T::of(4.0);
    let mut m20 = CMatrix::zeros(4);
    m20[(3, 3)] = Complex::new(bunch, T::zero());
    let mut m02 = CMatrix::zeros(4);
    m02[(3, 3)] = Complex::new(bunch, T::zero());
    let _ = zero;
    SingleClickPovm {
        m00,
        m10,
        m01,
        m20,
        m02,
    }
}

/// Dark-count-modified elements: M'₁₀ = M₁₀(1-p)² + M₀₀ p(1-p),
/// M'₂₀ = M₂₀(1-p) + M₁₀ p(1-p), and mirrored for the second detector.
struct ModifiedPovm<T> {
    m10: CMatrix<T>,
    m01: CMatrix<T>,
    m20: CMatrix<T>,
    m02: CMatrix<T>,
}

fn modified_povm<T: Real>(base: &SingleClickPovm<T>, p_dc: T) -> ModifiedPovm<T> {
    let no = T::one() - p_dc;
    ModifiedPovm {
        m10: base
            .m10
            .scale_re(no * no)
            .add(&base.m00.scale_re(p_dc * no)),
        m01: base
            .m01
            .scale_re(no * no)
            .add(&base.m00.scale_re(p_dc * no)),
        m20: base.m20.scale_re(no).add(&base.m10.scale_re(p_dc * no)),
        m02: base.m02.scale_re(no).add(&base.m01.scale_re(p_dc * no)),
    }
}

/// Same-PBS and different-PBS POVM elements on the four photonic modes
/// (H_A, H_B, V_A, V_B).
fn branch_elements<T: Real>(
    m: &ModifiedPovm<T>,
    mode: DetectorMode,
) -> (CMatrix<T>, CMatrix<T>) {
    let combine = |parts: Vec<(&CMatrix<T>, &CMatrix<T>)>| {
        let mut out = CMatrix::zeros(16);
        for (h, v) in parts {
            out = out.add(&h.tensor(v));
        }
        out
    };
    match mode {
        DetectorMode::NR => (
            combine(vec![(&m.m10, &m.m10), (&m.m01, &m.m01)]),
            combine(vec![(&m.m10, &m.m01), (&m.m01, &m.m10)]),
        ),
        DetectorMode::NNR => {
            let firsts = [&m.m10, &m.m20];
            let seconds = [&m.m01, &m.m02];
            let mut same = Vec::new();
            let mut diff = Vec::new();
            for h in 0..2 {
                for v in 0..2 {
                    same.push((firsts[h], firsts[v]));
                    same.push((seconds[h], seconds[v]));
                    diff.push((firsts[h], seconds[v]));
                    diff.push((seconds[h], firsts[v]));
                }
            }
            (combine(same), combine(diff))
        }
    }
}

fn partial_trace_spins<T: Real>(mat: &CMatrix<T>) -> CMatrix<T> {
    let mut out = CMatrix::zeros(4);
    for sa in 0..2usize {
        for sb in 0..2usize {
            for sa2 in 0..2usize {
                for sb2 in 0..2usize {
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for photons in 0..16usize {
                        let row = sa << 5 | sb << 4 | photons;
                        let col = sa2 << 5 | sb2 << 4 | photons;
                        acc += mat[(row, col)];
                    }
                    out[(sa << 1 | sb, sa2 << 1 | sb2)] = acc;
                }
            }
        }
    }
    out
}

/// Brute-force oracle for the double-click link model. The coincidence
/// substitutions are defined at the level of the detection cases, so they
/// reweight the POVM-derived photon-number sectors exactly as the closed
/// form reweights its case probabilities.
pub fn double_click_oracle<T: Real>(
    p: &DoubleClickParams<T>,
) -> Result<LinkOutcome<T>, LinkModelError> {
    p.validate()?;
    let mut state = joint_state(p.f_em_a, p.f_em_b);
    // Photon loss: amplitude damping with survival p_A on A's modes, p_B on
    // B's modes.
    for (survive, modes) in [(p.p_a, [2usize, 4]), (p.p_b, [3usize, 5])] {
        let zero = Complex::new(T::zero(), T::zero());
        let k0 = CMatrix::from_rows(&[
            &[Complex::new(T::one(), T::zero()), zero],
            &[zero, Complex::new(survive.sqrt(), T::zero())],
        ]);
        let mut k1 = CMatrix::zeros(2);
        k1[(0, 1)] = Complex::new((T::one() - survive).sqrt(), T::zero());
        for mode in modes {
            state = kraus_apply(&state, &[k0.clone(), k1.clone()], &[mode]);
        }
    }
    let base = single_click_povm(p.visibility);
    let modified = modified_povm(&base, p.p_dc);
    let (same, diff) = branch_elements(&modified, p.detector_mode);

    let project = |element: &CMatrix<T>| -> (T, CMatrix<T>) {
        let full = element.embed(&[2, 3, 4, 5], N_QUBITS);
        let weighted = full.mul(&state);
        let spin = partial_trace_spins(&weighted);
        (spin.trace().re, spin)
    };
    let (p_same, rho_same) = project(&same);
    let (p_diff, rho_diff) = project(&diff);

    // Coincidence window: reweight by surviving-photon sector. All POVM
    // elements conserve the per-polarization photon numbers (n_H, n_V), so
    // zeroing cross-sector coherences and scaling each sector is exact:
    //   (1,1) two photons in different polarizations -> p_ph-ph (cases T, F1),
    //   (2,0)/(0,2) bunched same-polarization pair   -> p_ph-dc (case F2,
    //       the documented approximation),
    //   one surviving photon                         -> p_ph-dc (case F3),
    //   vacuum                                       -> p_dc-dc (case F4).
    let (success, state_plus, state_minus) = match &p.coincidence {
        None => (p_same + p_diff, rho_same, rho_diff),
        Some(c) => {
            let sector = |photons: usize| -> (u32, u32) {
                (((photons >> 2) & 0b11).count_ones(), (photons & 0b11).count_ones())
            };
            let factor_of = |photons: usize| -> T {
                match sector(photons) {
                    (1, 1) => c.ph_ph,
                    (2, 0) | (0, 2) => c.ph_dc,
                    (1, 0) | (0, 1) => c.ph_dc,
                    _ => c.dc_dc,
                }
            };
            let mut weighted = CMatrix::zeros(64);
            for row in 0..64usize {
                for col in 0..64usize {
                    if sector(row & 0b1111) != sector(col & 0b1111) {
                        continue;
                    }
                    weighted[(row, col)] =
                        state[(row, col)] * Complex::new(factor_of(row & 0b1111), T::zero());
                }
            }
            let project_weighted = |element: &CMatrix<T>| -> (T, CMatrix<T>) {
                let full = element.embed(&[2, 3, 4, 5], N_QUBITS);
                let spin = partial_trace_spins(&full.mul(&weighted));
                (spin.trace().re, spin)
            };
            let (ps, rs) = project_weighted(&same);
            let (pd, rd) = project_weighted(&diff);
            (ps + pd, rs, rd)
        }
    };
    if !(success > T::zero()) {
        return Err(LinkModelError::ZeroSuccessProbability);
    }
    Ok(LinkOutcome {
        success_prob: success,
        state_plus: DensityMatrix::from_unnormalized(state_plus)?,
        state_minus: DensityMatrix::from_unnormalized(state_minus)?,
    })
}
