//! Qubit registers and the state-level noise operations tied to them.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::qstate::{apply_channel, ChannelSpec, DensityMatrix};

use super::{HardwareError, HardwareParams, ParamName, PlatformKind};

type Dm = DensityMatrix<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitRole {
    /// Optically active qubit used for entanglement generation.
    Communication,
    /// Long-lived storage qubit (color-center carbon spin).
    Memory,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct QubitSlot {
    role: QubitRole,
    occupied: bool,
    last_touched: f64,
}

/// Local register of a processing node: occupancy bookkeeping, per-qubit
/// timestamps, an optional local joint state (used by register-level tests;
/// the simulation engine tracks link states itself) and the trap's shared
/// dephasing-rate sample for trapped ions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QubitRegister {
    pub platform: PlatformKind,
    slots: Vec<QubitSlot>,
    pub state: Option<Dm>,
    /// Collective dephasing rate sample, one per trap, redrawn per reset.
    pub trap_r: Option<f64>,
}

impl QubitRegister {
    /// A processing node register: color centers get one communication and
    /// one memory qubit (star topology), ion traps and abstract nodes get
    /// two interchangeable communication qubits.
    pub fn for_platform(platform: PlatformKind) -> Self {
        let roles = match platform {
            PlatformKind::ColorCenter => vec![QubitRole::Communication, QubitRole::Memory],
            PlatformKind::TrappedIon | PlatformKind::Abstract => {
                vec![QubitRole::Communication, QubitRole::Communication]
            }
        };
        Self {
            platform,
            slots: roles
                .into_iter()
                .map(|role| QubitSlot {
                    role,
                    occupied: false,
                    last_touched: 0.0,
                })
                .collect(),
            state: None,
            trap_r: None,
        }
    }

    pub fn role(&self, index: usize) -> QubitRole {
        self.slots[index].role
    }

    pub fn is_occupied(&self, index: usize) -> bool {
        self.slots[index].occupied
    }

    pub fn occupy(&mut self, index: usize, now: f64) -> Result<(), HardwareError> {
        if self.slots[index].occupied {
            return Err(HardwareError::QubitBusy { index });
        }
        self.slots[index].occupied = true;
        self.slots[index].last_touched = now;
        Ok(())
    }

    pub fn release(&mut self, index: usize, now: f64) {
        self.slots[index].occupied = false;
        self.slots[index].last_touched = now;
    }

    pub fn release_all(&mut self, now: f64) {
        for slot in &mut self.slots {
            slot.occupied = false;
            slot.last_touched = now;
        }
    }

    pub fn last_touched(&self, index: usize) -> f64 {
        self.slots[index].last_touched
    }

    pub fn communication_qubit(&self) -> usize {
        self.slots
            .iter()
            .position(|s| s.role == QubitRole::Communication && !s.occupied)
            .unwrap_or(0)
    }

    pub fn free_storage_qubit(&self) -> Option<usize> {
        self.slots.iter().position(|s| !s.occupied)
    }
}

/// Matter-photon state produced by one emission attempt plus its duration.
/// For double-click platforms this is the (possibly depolarized) Bell pair;
/// for single-click color centers it is the bright-state superposition
/// √α|0⟩|1⟩_ph + √(1-α)|1⟩|0⟩_ph whose photonic qubit counts excitations.
pub fn emit_entangled_photon_state(
    reg: &mut QubitRegister,
    params: &HardwareParams,
    now: f64,
    bright_state_alpha: Option<f64>,
) -> Result<(Dm, f64), HardwareError> {
    let comm = reg.communication_qubit();
    reg.occupy(comm, now)?;
    let duration = params.get(ParamName::EmissionDuration)?;
    let state = emitted_pair_state(params, bright_state_alpha)?;
    Ok((state, duration))
}

/// The matter-photon state alone (no register bookkeeping).
pub fn emitted_pair_state(
    params: &HardwareParams,
    bright_state_alpha: Option<f64>,
) -> Result<Dm, HardwareError> {
    match bright_state_alpha {
        Some(alpha) => {
            if !(0.0..1.0).contains(&alpha) {
                return Err(HardwareError::InvalidParameter {
                    name: ParamName::EmissionFidelity,
                    value: alpha,
                });
            }
            let ket = [
                Complex::new(0.0, 0.0),
                Complex::new(alpha.sqrt(), 0.0),
                Complex::new((1.0 - alpha).sqrt(), 0.0),
                Complex::new(0.0, 0.0),
            ];
            Ok(Dm::from_pure(&ket)?)
        }
        None => {
            let f_em = params.get(ParamName::EmissionFidelity)?;
            let phi = crate::qstate::bell_state::<f64>(crate::qstate::BellIndex::new(0, 0));
            let p = 4.0 * (1.0 - f_em) / 3.0;
            // Depolarizing the matter qubit of a Bell pair is identical to
            // the Werner mixture with fidelity F_em.
            Ok(apply_channel(&phi, &ChannelSpec::Depolarizing { p }, &[0])?)
        }
    }
}

/// Accumulated induced dephasing on a color-center memory qubit after `k`
/// entanglement attempts with bright-state parameter `alpha` on the
/// communication qubit. The channel is applied once per emitted photon per
/// attempt (twice for double click).
pub fn apply_induced_dephasing(
    state: &Dm,
    memory_qubit: usize,
    k_attempts: u64,
    alpha: f64,
    params: &HardwareParams,
    photons_per_attempt: u32,
) -> Result<Dm, HardwareError> {
    if params.platform != PlatformKind::ColorCenter {
        return Err(HardwareError::WrongPlatform {
            platform: params.platform,
        });
    }
    let n_1e = params.get(ParamName::InducedDephasingAttempts)?;
    let p_single = (1.0 - alpha) * (1.0 - (-1.0 / n_1e).exp());
    let p = (1.0 - (1.0 - 2.0 * p_single).powf(k_attempts as f64)) / 2.0;
    let mut out = state.clone();
    for _ in 0..photons_per_attempt {
        out = apply_channel(&out, &ChannelSpec::Dephasing { p }, &[memory_qubit])?;
    }
    Ok(out)
}

/// Idle decoherence channels for a stored qubit of the given role over
/// `elapsed` seconds. Trapped ions use the sampled-rotation collective
/// dephasing with the trap's current rate sample.
pub fn decoherence_channels(
    platform: PlatformKind,
    role: QubitRole,
    elapsed: f64,
    params: &HardwareParams,
    trap_r: Option<f64>,
) -> Result<Vec<ChannelSpec<f64>>, HardwareError> {
    if elapsed < 0.0 {
        return Err(HardwareError::InvalidParameter {
            name: ParamName::EmissionDuration,
            value: elapsed,
        });
    }
    if elapsed == 0.0 {
        return Ok(vec![]);
    }
    Ok(match platform {
        PlatformKind::ColorCenter => {
            let (t1, t2) = match role {
                QubitRole::Communication => (
                    params.get(ParamName::ElectronT1)?,
                    params.get(ParamName::ElectronT2)?,
                ),
                QubitRole::Memory => (
                    params.get(ParamName::CarbonT1)?,
                    params.get(ParamName::CarbonT2)?,
                ),
            };
            vec![
                ChannelSpec::AmplitudeDamping { t: elapsed, t1 },
                ChannelSpec::PhaseDamping {
                    t: elapsed,
                    t1,
                    t2,
                },
            ]
        }
        PlatformKind::TrappedIon => {
            let tau = params.get(ParamName::CoherenceTime)?;
            let r = trap_r.unwrap_or(0.0);
            vec![ChannelSpec::CollectiveGaussian {
                r,
                t: elapsed,
                tau,
            }]
        }
        PlatformKind::Abstract => {
            let t1 = params.get(ParamName::MemoryT1)?;
            let t2 = params.get(ParamName::MemoryT2)?;
            vec![
                ChannelSpec::AmplitudeDamping { t: elapsed, t1 },
                ChannelSpec::PhaseDamping {
                    t: elapsed,
                    t1,
                    t2,
                },
            ]
        }
    })
}

/// Applies the platform's idle decoherence to one qubit of a link state.
pub fn decohere_link_qubit(
    state: &Dm,
    qubit: usize,
    platform: PlatformKind,
    role: QubitRole,
    elapsed: f64,
    params: &HardwareParams,
    trap_r: Option<f64>,
) -> Result<Dm, HardwareError> {
    let mut out = state.clone();
    for ch in decoherence_channels(platform, role, elapsed, params, trap_r)? {
        out = apply_channel(&out, &ch, &[qubit])?;
    }
    Ok(out)
}

/// Convenience wrapper matching the register-level contract: decoheres the
/// register's local state (when present) on all occupied qubits.
pub fn decohere_idle(
    reg: &mut QubitRegister,
    elapsed: f64,
    params: &HardwareParams,
    now: f64,
) -> Result<(), HardwareError> {
    if let Some(state) = reg.state.clone() {
        let mut out = state;
        for q in 0..reg.slots.len().min(out.n_qubits()) {
            let role = reg.role(q);
            out = decohere_link_qubit(
                &out,
                q,
                reg.platform,
                role,
                elapsed,
                params,
                reg.trap_r,
            )?;
        }
        reg.state = Some(out);
    }
    for slot in &mut reg.slots {
        slot.last_touched = now;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardware::baseline;
    use crate::qstate::{bell_state, fidelity, BellIndex};

    #[test]
    fn emission_with_perfect_fidelity_is_bell_pair() {
        let mut params = baseline("ti-baseline").unwrap();
        params.set(ParamName::EmissionFidelity, 1.0).unwrap();
        let state = emitted_pair_state(&params, None).unwrap();
        let phi = bell_state::<f64>(BellIndex::new(0, 0));
        assert!(state.matrix().max_abs_diff(phi.matrix()) < 1e-12);
    }

    #[test]
    fn emission_fidelity_matches_werner_weight() {
        let params = baseline("ti-baseline").unwrap();
        let state = emitted_pair_state(&params, None).unwrap();
        let phi = bell_state::<f64>(BellIndex::new(0, 0));
        let f = fidelity(&state, &phi).unwrap();
        assert!((f - 0.99).abs() < 1e-12, "emission fidelity {f}");
        assert!(
            (params.get(ParamName::EmissionDuration).unwrap() - 50e-6).abs() < 1e-18
        );
    }

    #[test]
    fn bright_state_emission_weights() {
        let params = baseline("cc-baseline").unwrap();
        let alpha = 0.07;
        let state = emitted_pair_state(&params, Some(alpha)).unwrap();
        assert!((state.entry(1, 1).re - alpha).abs() < 1e-12);
        assert!((state.entry(2, 2).re - (1.0 - alpha)).abs() < 1e-12);
    }

    #[test]
    fn induced_dephasing_limits() {
        let params = baseline("cc-baseline").unwrap();
        let psi = bell_state::<f64>(BellIndex::new(1, 0));
        let unchanged = apply_induced_dephasing(&psi, 1, 0, 0.5, &params, 1).unwrap();
        assert!(unchanged.matrix().max_abs_diff(psi.matrix()) < 1e-15);
        // k → ∞ approaches the fully dephased p = 1/2 channel.
        let huge = apply_induced_dephasing(&psi, 1, 10_000_000, 0.5, &params, 1).unwrap();
        assert!(huge.entry(1, 2).norm() < 1e-6);
        // Single-attempt probability follows (1 - α)(1 - e^{-1/N}).
        let one = apply_induced_dephasing(&psi, 1, 1, 0.5, &params, 1).unwrap();
        let p_single = 0.5 * (1.0 - (-1.0f64 / 5300.0).exp());
        let expect = 0.5 * (1.0 - 2.0 * p_single);
        assert!((one.entry(1, 2).re - expect).abs() < 1e-15);
    }

    #[test]
    fn induced_dephasing_needs_color_center() {
        let params = baseline("ti-baseline").unwrap();
        let psi = bell_state::<f64>(BellIndex::new(1, 0));
        assert!(apply_induced_dephasing(&psi, 1, 1, 0.5, &params, 1).is_err());
    }

    #[test]
    fn cc_memory_decoherence_matches_equations() {
        let params = baseline("cc-baseline").unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = Dm::from_pure(&[Complex::new(h, 0.0), Complex::new(h, 0.0)]).unwrap();
        let out = decohere_link_qubit(
            &plus,
            0,
            PlatformKind::ColorCenter,
            QubitRole::Memory,
            1.0,
            &params,
            None,
        )
        .unwrap();
        // T2 = 1 s, T1 = 10 h: off-diagonal scales by the amplitude-damping
        // factor e^{-t/(2T1)} times the phase-damping e^{-t/T2} e^{-t/(2T1)}.
        let t1 = 36000.0f64;
        let expect = 0.5 * (-0.5 / t1).exp() * (-1.0f64).exp() * (-0.5 / t1).exp();
        assert!(
            (out.entry(0, 1).re - expect).abs() < 1e-12,
            "off-diagonal {} vs {expect}",
            out.entry(0, 1).re
        );
    }

    #[test]
    fn zero_elapsed_time_is_identity() {
        let params = baseline("ti-baseline").unwrap();
        let channels =
            decoherence_channels(PlatformKind::TrappedIon, QubitRole::Communication, 0.0, &params, Some(0.3))
                .unwrap();
        assert!(channels.is_empty());
    }

    #[test]
    fn shared_trap_rotation_is_correlated() {
        let params = baseline("ti-baseline").unwrap();
        let psi = bell_state::<f64>(BellIndex::new(1, 0));
        // Both ions in the same trap: same r on both qubits leaves Ψ+
        // invariant (Σ Z = 0 subspace).
        let mut state = psi.clone();
        for q in 0..2 {
            state = decohere_link_qubit(
                &state,
                q,
                PlatformKind::TrappedIon,
                QubitRole::Communication,
                0.01,
                &params,
                Some(1.3),
            )
            .unwrap();
        }
        assert!(state.matrix().max_abs_diff(psi.matrix()) < 1e-12);
        // Different traps: independent r samples dephase the pair.
        let mut other = psi.clone();
        for (q, r) in [(0usize, 1.3f64), (1, -0.4)] {
            other = decohere_link_qubit(
                &other,
                q,
                PlatformKind::TrappedIon,
                QubitRole::Communication,
                0.01,
                &params,
                Some(r),
            )
            .unwrap();
        }
        assert!(other.matrix().max_abs_diff(psi.matrix()) > 1e-6);
    }

    #[test]
    fn register_occupancy_guards() {
        let mut reg = QubitRegister::for_platform(PlatformKind::ColorCenter);
        let params = baseline("cc-baseline").unwrap();
        let (state, duration) =
            emit_entangled_photon_state(&mut reg, &params, 0.0, None).unwrap();
        assert_eq!(state.n_qubits(), 2);
        assert!((duration - 3.8e-6).abs() < 1e-18);
        assert!(reg.is_occupied(0));
        // Second emission without freeing the communication qubit: the only
        // free slot is the memory qubit, which cannot emit on a color center.
        assert!(matches!(
            reg.occupy(0, 1.0),
            Err(HardwareError::QubitBusy { .. })
        ));
    }
}
