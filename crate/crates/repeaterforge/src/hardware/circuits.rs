//! Platform swap and move circuits.
//!
//! Each circuit is a list of Clifford ops with a depolarizing noise weight
//! per op. For the Bell-state measurement the per-op noise is conjugated
//! through the ideal remainder of the circuit and accumulated into one
//! two-qubit Pauli channel applied before an ideal Bell-basis measurement;
//! this is algebraically identical to applying each gate followed by its
//! depolarizing channel. Measured bits then suffer classical readout flips.
//!
//! Gate sets: the color-center register allows arbitrary communication-qubit
//! rotations, memory Z-rotations, and a controlled X-rotation between the
//! two (used in both directions; a CNOT compiles as the controlled X(π)
//! followed by an S on the control). The trapped-ion register uses one
//! parallel Z-rotation step and a Mølmer-Sørensen gate; the rotation angles
//! (π/2, 0) differ from (π/4, -π/4) by a collective Z rotation that drops
//! out of the heralded frame. Abstract nodes use CNOT + Hadamard with swap
//! noise carried by the swap-quality depolarizing channel instead.

use num_complex::Complex;
use rand::Rng;

use crate::qstate::{bell_ket, ops, BellIndex, CMatrix, DensityMatrix};

use super::{HardwareError, HardwareParams, ParamName, PlatformKind};

type CMat = CMatrix<f64>;
type Dm = DensityMatrix<f64>;

/// Measured classical bits of the Bell-state measurement.
pub type OutcomeBits = (u8, u8);

#[derive(Clone, Debug)]
struct CircuitOp {
    #[allow(dead_code)] // kept for debugging circuit composition
    label: &'static str,
    unitary: CMat,
    qubits: Vec<usize>,
    fidelity: f64,
    duration: f64,
}

/// Classical noise acting on one measured bit: circuit-induced flips (value
/// independent) followed by the readout's asymmetric misread probabilities.
#[derive(Clone, Copy, Debug)]
pub struct BitNoise {
    pub extra_flip: f64,
    pub q0: f64,
    pub q1: f64,
}

impl BitNoise {
    fn noiseless() -> Self {
        Self {
            extra_flip: 0.0,
            q0: 0.0,
            q1: 0.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, bit: u8, rng: &mut R) -> u8 {
        let mut b = bit;
        if self.extra_flip > 0.0 && rng.gen_bool(self.extra_flip) {
            b ^= 1;
        }
        let misread = if b == 0 { self.q0 } else { self.q1 };
        if misread > 0.0 && rng.gen_bool(misread) {
            b ^= 1;
        }
        b
    }
}

/// Compiled Bell-state-measurement circuit for one platform.
#[derive(Clone, Debug)]
pub struct SwapCircuit {
    platform: PlatformKind,
    ideal_unitary: CMat,
    /// Bell index (2i + j) -> measured bits.
    outcome_map: [OutcomeBits; 4],
    /// Full conjugated Pauli-pair weights (16 entries, index (x1 z1 x2 z2)).
    pauli_weights: [f64; 16],
    /// Weights aggregated by Bell-frame flip class (di = x1^x2, dj = z1^z2).
    class_weights: [f64; 4],
    pub bit_noise: [BitNoise; 2],
    pub duration: f64,
    /// Product of op fidelities and mean readout no-imperfection factors;
    /// this is the swap-quality figure used by the abstract mapping.
    pub fidelity_product: f64,
    /// Abstract model only: depolarizing probability applied to one half of
    /// the swapped pair after an ideal measurement.
    pub post_swap_depolarizing: Option<f64>,
}

fn pauli_single(x: u8, z: u8) -> CMat {
    let mut m = ops::identity::<f64>();
    if z == 1 {
        m = ops::pauli_z::<f64>().mul(&m);
    }
    if x == 1 {
        m = ops::pauli_x::<f64>().mul(&m);
    }
    m
}

fn pauli_pair(idx: usize) -> CMat {
    let (x1, z1, x2, z2) = (
        (idx >> 3 & 1) as u8,
        (idx >> 2 & 1) as u8,
        (idx >> 1 & 1) as u8,
        (idx & 1) as u8,
    );
    pauli_single(x1, z1).tensor(&pauli_single(x2, z2))
}

/// Identifies U P U† as a Pauli pair (up to phase); panics if the circuit is
/// not Clifford, which would invalidate the noise accumulation.
fn identify_pauli_pair(m: &CMat) -> usize {
    for idx in 0..16 {
        let q = pauli_pair(idx);
        let mut overlap = Complex::new(0.0, 0.0);
        for r in 0..4 {
            for c in 0..4 {
                overlap += q[(r, c)].conj() * m[(r, c)];
            }
        }
        if (overlap.norm() - 4.0).abs() < 1e-9 {
            return idx;
        }
    }
    panic!("conjugated operator is not a Pauli pair; swap circuit must be Clifford");
}

/// XOR-convolution of Pauli-pair weight vectors (independent Pauli channels).
fn convolve(a: &[f64; 16], b: &[f64; 16]) -> [f64; 16] {
    let mut out = [0.0; 16];
    for (i, &wa) in a.iter().enumerate() {
        if wa == 0.0 {
            continue;
        }
        for (j, &wb) in b.iter().enumerate() {
            out[i ^ j] += wa * wb;
        }
    }
    out
}

/// Depolarizing weights of one op as a Pauli-pair distribution.
fn op_noise_weights(op: &CircuitOp) -> [f64; 16] {
    let p = 1.0 - op.fidelity;
    let mut w = [0.0; 16];
    if op.qubits.len() == 2 {
        w[0] = 1.0 - p + p / 16.0;
        for entry in w.iter_mut().skip(1) {
            *entry = p / 16.0;
        }
    } else {
        let q = op.qubits[0];
        w[0] = 1.0 - 3.0 * p / 4.0;
        for (x, z) in [(1u8, 0u8), (1, 1), (0, 1)] {
            let idx = if q == 0 {
                (x as usize) << 3 | (z as usize) << 2
            } else {
                (x as usize) << 1 | z as usize
            };
            w[idx] = p / 4.0;
        }
    }
    w
}

fn build_circuit(
    platform: PlatformKind,
    pre_ops: Vec<CircuitOp>,
    bit_noise: [BitNoise; 2],
    readout_product: f64,
    extra_duration: f64,
    post_swap_depolarizing: Option<f64>,
    classical_fidelities: &[f64],
) -> SwapCircuit {
    // Ideal composed unitary (ops applied first-to-last).
    let mut ideal = CMat::identity(4);
    for op in &pre_ops {
        let full = op.unitary.embed(&op.qubits, 2);
        ideal = full.mul(&ideal);
    }
    // Outcome map: each Bell ket must land on a single computational state.
    let mut outcome_map = [(0u8, 0u8); 4];
    for bell in BellIndex::ALL {
        let ket = bell_ket::<f64>(bell);
        let mut best = (0usize, 0.0f64);
        for m in 0..4usize {
            let amp: Complex<f64> = (0..4)
                .map(|k| ideal[(m, k)] * ket[k])
                .fold(Complex::new(0.0, 0.0), |acc, v| acc + v);
            if amp.norm() > best.1 {
                best = (m, amp.norm());
            }
        }
        assert!(
            (best.1 - 1.0).abs() < 1e-9,
            "swap circuit does not map Bell states to the computational basis"
        );
        outcome_map[(bell.i * 2 + bell.j) as usize] = ((best.0 >> 1) as u8, (best.0 & 1) as u8);
    }
    // Conjugate each op's noise through the remainder of the circuit and
    // accumulate.
    let mut pauli_weights = [0.0; 16];
    pauli_weights[0] = 1.0;
    for (i, op) in pre_ops.iter().enumerate() {
        let mut suffix = CMat::identity(4);
        for later in &pre_ops[i + 1..] {
            let full = later.unitary.embed(&later.qubits, 2);
            suffix = full.mul(&suffix);
        }
        let raw = op_noise_weights(op);
        let mut conjugated = [0.0; 16];
        for (idx, &w) in raw.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let moved = suffix.mul(&pauli_pair(idx)).mul(&suffix.dagger());
            conjugated[identify_pauli_pair(&moved)] += w;
        }
        pauli_weights = convolve(&pauli_weights, &conjugated);
    }
    let mut class_weights = [0.0; 4];
    for (idx, &w) in pauli_weights.iter().enumerate() {
        let di = (idx >> 3 & 1) ^ (idx >> 1 & 1);
        let dj = (idx >> 2 & 1) ^ (idx & 1);
        class_weights[di << 1 | dj] += w;
    }
    let mut fidelity_product: f64 = pre_ops.iter().map(|op| op.fidelity).product();
    for f in classical_fidelities {
        fidelity_product *= f;
    }
    for noise in &bit_noise {
        fidelity_product *= 1.0 - 0.5 * (noise.q0 + noise.q1);
    }
    fidelity_product *= readout_product;
    let duration: f64 = pre_ops.iter().map(|op| op.duration).sum::<f64>() + extra_duration;
    SwapCircuit {
        platform,
        ideal_unitary: ideal,
        outcome_map,
        pauli_weights,
        class_weights,
        bit_noise,
        duration,
        fidelity_product,
        post_swap_depolarizing,
    }
}

impl SwapCircuit {
    pub fn platform(&self) -> PlatformKind {
        self.platform
    }

    pub fn outcome_for_bell(&self, bell: BellIndex) -> OutcomeBits {
        self.outcome_map[(bell.i * 2 + bell.j) as usize]
    }

    pub fn bell_for_outcome(&self, bits: OutcomeBits) -> BellIndex {
        for bell in BellIndex::ALL {
            if self.outcome_for_bell(bell) == bits {
                return bell;
            }
        }
        unreachable!("outcome map is a bijection")
    }

    /// Bell-frame flip classes (di, dj) with their accumulated weights.
    pub fn class_weights(&self) -> &[f64; 4] {
        &self.class_weights
    }

    pub fn ideal_unitary(&self) -> &CMat {
        &self.ideal_unitary
    }

    /// Applies the accumulated pre-measurement noise to a local two-qubit
    /// register state (register-level path used in tests).
    pub fn apply_premeasurement_noise(&self, state: &Dm) -> Dm {
        let mut acc = CMat::zeros(4);
        for (idx, &w) in self.pauli_weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let p = pauli_pair(idx);
            acc = acc.add(&state.matrix().conjugate_by(&p).scale_re(w));
        }
        Dm::new(acc).expect("Pauli mixing preserves state validity")
    }

    /// Register-level Bell-state measurement: noise, ideal circuit, Z⊗Z
    /// measurement, classical bit noise. Returns the reported Bell index.
    pub fn measure_register<R: Rng + ?Sized>(
        &self,
        state: &Dm,
        rng: &mut R,
    ) -> (BellIndex, f64) {
        let noisy = self.apply_premeasurement_noise(state);
        let evolved = noisy
            .apply_unitary(&self.ideal_unitary, &[0, 1])
            .expect("two-qubit unitary on two-qubit state");
        let mut probs = [0.0; 4];
        for (m, prob) in probs.iter_mut().enumerate() {
            *prob = evolved.entry(m, m).re.max(0.0);
        }
        let total: f64 = probs.iter().sum();
        let mut draw = rng.gen_range(0.0..total);
        let mut m = 3;
        for (idx, &p) in probs.iter().enumerate() {
            if draw < p {
                m = idx;
                break;
            }
            draw -= p;
        }
        let bits = ((m >> 1) as u8, (m & 1) as u8);
        let reported = (
            self.bit_noise[0].sample(bits.0, rng),
            self.bit_noise[1].sample(bits.1, rng),
        );
        (self.bell_for_outcome(reported), self.duration)
    }
}

fn crx_pi(control_first: bool) -> CMat {
    // |0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ (-iX), optionally with control on the second
    // qubit.
    let zero = Complex::new(0.0, 0.0);
    let one = Complex::new(1.0, 0.0);
    let mi = Complex::new(0.0, -1.0);
    if control_first {
        CMat::from_rows(&[
            &[one, zero, zero, zero],
            &[zero, one, zero, zero],
            &[zero, zero, zero, mi],
            &[zero, zero, mi, zero],
        ])
    } else {
        CMat::from_rows(&[
            &[one, zero, zero, zero],
            &[zero, zero, zero, mi],
            &[zero, zero, one, zero],
            &[zero, mi, zero, zero],
        ])
    }
}

fn s_gate() -> CMat {
    ops::rz::<f64>(std::f64::consts::FRAC_PI_2)
}

fn ms_gate() -> CMat {
    // exp(-i π/4 X⊗X) = (I ⊗ I - i X ⊗ X)/√2.
    let xx = ops::pauli_x::<f64>().tensor(&ops::pauli_x::<f64>());
    let ident = CMat::identity(4);
    ident
        .scale(Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0))
        .add(&xx.scale(Complex::new(0.0, -std::f64::consts::FRAC_1_SQRT_2)))
}

/// Builds the platform's Bell-state-measurement circuit. Register qubit 0 is
/// the communication qubit (second link's half), qubit 1 the stored half.
pub fn swap_circuit(params: &HardwareParams) -> Result<SwapCircuit, HardwareError> {
    match params.platform {
        PlatformKind::ColorCenter => {
            let f2q = params.get(ParamName::TwoQubitGateFidelity)?;
            let d2q = params.get(ParamName::TwoQubitGateDuration)?;
            let frot = params.get(ParamName::ElectronRotFidelity)?;
            let drot = params.get(ParamName::ElectronRotDuration)?;
            let fcz = params.get(ParamName::CarbonZFidelity)?;
            let dcz = params.get(ParamName::CarbonZDuration)?;
            let fei = params.get(ParamName::ElectronInitFidelity)?;
            let dei = params.get(ParamName::ElectronInitDuration)?;
            let q0 = 1.0 - params.get(ParamName::ReadoutFidelity0)?;
            let q1 = 1.0 - params.get(ParamName::ReadoutFidelity1)?;
            let dread = params.get(ParamName::ReadoutDuration)?;
            let pre_ops = vec![
                CircuitOp {
                    label: "controlled-x-rotation",
                    unitary: crx_pi(true),
                    qubits: vec![0, 1],
                    fidelity: f2q,
                    duration: d2q,
                },
                CircuitOp {
                    label: "electron-s",
                    unitary: s_gate(),
                    qubits: vec![0],
                    fidelity: frot,
                    duration: drot,
                },
                CircuitOp {
                    label: "electron-h",
                    unitary: ops::hadamard::<f64>(),
                    qubits: vec![0],
                    fidelity: frot,
                    duration: drot,
                },
            ];
            // Carbon is read out through the electron: init, carbon S frame
            // rotation, controlled X back onto the electron, second readout.
            // Every op in the chain contributes a value-independent flip of
            // (1 - F)/2 to the second bit.
            let chain = [fei, fcz, f2q];
            let mut extra = 0.0;
            for f in chain {
                let flip = (1.0 - f) / 2.0;
                extra = extra * (1.0 - flip) + flip * (1.0 - extra);
            }
            let bit_noise = [
                BitNoise {
                    extra_flip: 0.0,
                    q0,
                    q1,
                },
                BitNoise {
                    extra_flip: extra,
                    q0,
                    q1,
                },
            ];
            let extra_duration = 2.0 * dread + dei + dcz + d2q;
            Ok(build_circuit(
                PlatformKind::ColorCenter,
                pre_ops,
                bit_noise,
                1.0,
                extra_duration,
                None,
                &chain,
            ))
        }
        PlatformKind::TrappedIon => {
            let fz = params.get(ParamName::ZRotationFidelity)?;
            let dz = params.get(ParamName::ZRotationDuration)?;
            let fms = params.get(ParamName::TwoQubitGateFidelity)?;
            let dms = params.get(ParamName::TwoQubitGateDuration)?;
            let q0 = 1.0 - params.get(ParamName::ReadoutFidelity0)?;
            let q1 = 1.0 - params.get(ParamName::ReadoutFidelity1)?;
            let dread = params.get(ParamName::ReadoutDuration)?;
            let pre_ops = vec![
                CircuitOp {
                    label: "parallel-z-step",
                    unitary: s_gate(),
                    qubits: vec![0],
                    fidelity: fz,
                    duration: dz,
                },
                CircuitOp {
                    label: "molmer-sorensen",
                    unitary: ms_gate(),
                    qubits: vec![0, 1],
                    fidelity: fms,
                    duration: dms,
                },
            ];
            let bit = BitNoise {
                extra_flip: 0.0,
                q0,
                q1,
            };
            Ok(build_circuit(
                PlatformKind::TrappedIon,
                pre_ops,
                [bit, bit],
                1.0,
                dread, // both ions read out in parallel
                None,
                &[],
            ))
        }
        PlatformKind::Abstract => {
            let s_q = params.get(ParamName::SwapQuality)?;
            let duration = params.get(ParamName::SwapDuration)?;
            let pre_ops = vec![
                CircuitOp {
                    label: "cnot",
                    unitary: ops::cnot::<f64>(),
                    qubits: vec![0, 1],
                    fidelity: 1.0,
                    duration: 0.0,
                },
                CircuitOp {
                    label: "hadamard",
                    unitary: ops::hadamard::<f64>(),
                    qubits: vec![0],
                    fidelity: 1.0,
                    duration: 0.0,
                },
            ];
            Ok(build_circuit(
                PlatformKind::Abstract,
                pre_ops,
                [BitNoise::noiseless(), BitNoise::noiseless()],
                s_q,
                duration,
                Some(1.0 - s_q),
                &[],
            ))
        }
    }
}

/// Moves the local half of an entangled pair from the communication qubit to
/// a freshly initialized memory qubit (color center only): carbon init, two
/// controlled X-rotations with frame fixes, electron freed. The input state
/// holds (remote, communication); the output holds (remote, memory).
pub fn move_to_memory(
    link_state: &Dm,
    params: &HardwareParams,
) -> Result<(Dm, f64), HardwareError> {
    if params.platform != PlatformKind::ColorCenter {
        return Err(HardwareError::WrongPlatform {
            platform: params.platform,
        });
    }
    let f2q = params.get(ParamName::TwoQubitGateFidelity)?;
    let d2q = params.get(ParamName::TwoQubitGateDuration)?;
    let frot = params.get(ParamName::ElectronRotFidelity)?;
    let drot = params.get(ParamName::ElectronRotDuration)?;
    let fcz = params.get(ParamName::CarbonZFidelity)?;
    let dcz = params.get(ParamName::CarbonZDuration)?;
    let fci = params.get(ParamName::CarbonInitFidelity)?;
    let dci = params.get(ParamName::CarbonInitDuration)?;

    // Qubits: 0 remote, 1 electron (holds the half), 2 carbon (fresh |0⟩).
    let zero_ket = [Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)];
    let carbon = Dm::from_pure(&zero_ket)?;
    let mut state = link_state.tensor(&carbon)?;
    let depol = |state: &Dm, p: f64, qubits: &[usize]| -> Result<Dm, HardwareError> {
        Ok(crate::qstate::apply_channel(
            state,
            &crate::qstate::ChannelSpec::Depolarizing { p },
            qubits,
        )?)
    };
    // Carbon preparation noise.
    state = depol(&state, 1.0 - fci, &[2])?;
    // CNOT(electron -> carbon) = CRx(π) then S on the electron.
    state = state.apply_unitary(&crx_pi(true), &[1, 2])?;
    state = depol(&state, 1.0 - f2q, &[1, 2])?;
    state = state.apply_unitary(&s_gate(), &[1])?;
    state = depol(&state, 1.0 - frot, &[1])?;
    // CNOT(carbon -> electron) = CRx(π) then S on the carbon.
    state = state.apply_unitary(&crx_pi(false), &[1, 2])?;
    state = depol(&state, 1.0 - f2q, &[1, 2])?;
    state = state.apply_unitary(&s_gate(), &[2])?;
    state = depol(&state, 1.0 - fcz, &[2])?;
    // Electron is now disentangled (|0⟩ in the noiseless case); trace it out.
    let out = state.partial_trace(&[0, 2])?;
    let duration = dci + 2.0 * d2q + drot + dcz;
    Ok((out, duration))
}
