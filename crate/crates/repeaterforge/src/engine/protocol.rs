//! Sequential SWAP-ASAP protocol on a one-repeater (or repeaterless) chain:
//! handshake, agreement, magic link insertion, cut-off, entanglement swap
//! and Pauli-frame tracking, driven by the discrete-event kernel.
//!
//! Classical messages travel at c/n over the connecting fiber and are
//! reliable and in-order. Attempts on a link are batched into one geometric
//! sample per session; an attempt cycle lasts the state initialization plus
//! emission plus the midpoint round trip of the longer segment, so both
//! parties learn the heralding outcome at the end of the successful cycle.

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::hardware::{
    apply_induced_dephasing, decohere_link_qubit, move_to_memory, swap_circuit, HardwareParams,
    ParamName, PlatformKind, QubitRole, SwapCircuit,
};
use crate::linkmodels::{
    double_click_outcome, sample_link, single_click_outcome, CoincidenceProbs, DetectorMode,
    DoubleClickParams, LinkOutcome, SingleClickParams,
};
use crate::qstate::{ops, BellIndex, CMatrix, DensityMatrix};
use crate::timewindows::{
    coincidence_prob_dc_dc, coincidence_prob_ph_dc, coincidence_prob_ph_ph, shape_from_half_lives,
    visibility, WindowConfig,
};

use super::event::{EventQueue, Payload};
use super::topology::NetworkTopology;
use super::EngineError;

type Dm = DensityMatrix<f64>;

/// Reference coincidence window at which the trapped-ion visibility table
/// entry was extracted; the visibility parameter is authoritative there and
/// the photon-shape model supplies the window dependence around it.
pub const TI_REFERENCE_COINCIDENCE_WINDOW: f64 = 0.5e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EntanglementScheme {
    DoubleClick {
        /// Coincidence time window (trapped ions); both links share it.
        coincidence_window: Option<f64>,
    },
    SingleClick {
        /// Bright-state parameter of the most lossy segment; the other
        /// segments are balanced so that α p_det is equal everywhere.
        alpha: f64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub scheme: EntanglementScheme,
    /// Maximum storage time of the first link's qubit before discard.
    pub cutoff_time: Option<f64>,
    /// Whether the waiting end node moves its half to a memory qubit.
    pub move_end_node_to_memory: bool,
    pub n_pairs: usize,
    pub seed: u64,
    /// Abort the run after this many rounds (delivered or discarded).
    pub max_rounds: u64,
    pub collect_trace: bool,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            scheme: EntanglementScheme::DoubleClick {
                coincidence_window: None,
            },
            cutoff_time: None,
            move_end_node_to_memory: false,
            n_pairs: 1,
            seed: 0,
            max_rounds: 10_000_000,
            collect_trace: false,
        }
    }
}

/// One delivered end-to-end pair. The corrected state is ordered (end node
/// of the first-generated link, end node of the second link).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeliveryRecord {
    pub pair_index: usize,
    pub completion_time: f64,
    pub corrected_state: Dm,
    pub frame: BellIndex,
    pub attempts_long: u64,
    pub attempts_short: u64,
    /// Time the first link's qubit spent stored before the swap.
    pub storage_time: f64,
}

#[derive(Clone, Debug, Default)]
pub struct SimulationOutput {
    pub deliveries: Vec<DeliveryRecord>,
    pub trace: Vec<String>,
    pub discards: u64,
}

/// Start-time agreement between two neighbors over their connecting fiber:
/// the responder replies when free, and both sides adopt the reply's arrival
/// instant as the common first-attempt epoch.
pub fn agreement_handshake(
    request_sent_at: f64,
    responder_free_at: f64,
    one_way_delay: f64,
) -> (f64, f64) {
    let arrival = request_sent_at + one_way_delay;
    let reply_at = arrival.max(responder_free_at);
    let epoch = reply_at + one_way_delay;
    (epoch, epoch)
}

struct LinkModel {
    outcome: LinkOutcome<f64>,
    attempt_duration: f64,
    delay: f64,
    /// Bright-state parameter on the (lower, higher) node side; zero for
    /// double click.
    alpha: (f64, f64),
}

struct StoredLink {
    state: Dm,
    frame: BellIndex,
    herald_time: f64,
    n_attempts: u64,
    /// Instant after which the repeater half sits idle in storage.
    rep_store_from: f64,
    /// Instant after which the end half sits idle.
    end_store_from: f64,
    end_moved: bool,
}

pub fn run_simulation(
    topology: &NetworkTopology,
    hardware: &HardwareParams,
    protocol: &ProtocolConfig,
) -> Result<SimulationOutput, EngineError> {
    let mut sim = Simulation::new(topology, hardware, protocol)?;
    sim.run()?;
    Ok(sim.output)
}

struct Simulation<'a> {
    topo: &'a NetworkTopology,
    params: &'a HardwareParams,
    protocol: &'a ProtocolConfig,
    circuit: SwapCircuit,
    links: Vec<LinkModel>,
    long_link: usize,
    short_link: usize,
    queue: EventQueue,
    rng_link: ChaCha12Rng,
    rng_noise: ChaCha12Rng,
    output: SimulationOutput,
    round: u64,
    rounds_total: u64,
    stored_long: Option<StoredLink>,
    short_session: bool,
    short_n_attempts: u64,
    repeater_free_at: f64,
    pending_requests: Vec<usize>,
    trap_r: Vec<Option<f64>>,
    swap_duration: f64,
    done: bool,
}

impl<'a> Simulation<'a> {
    fn new(
        topo: &'a NetworkTopology,
        params: &'a HardwareParams,
        protocol: &'a ProtocolConfig,
    ) -> Result<Self, EngineError> {
        topo.validate()?;
        params.validate()?;
        if protocol.n_pairs == 0 {
            return Err(EngineError::BadConfig("n_pairs must be positive".into()));
        }
        let links = build_link_models(topo, params, protocol)?;
        let circuit = swap_circuit(params)?;
        let (long_link, short_link) = if topo.links.len() == 2 {
            if topo.links[1].total_length_km() >= topo.links[0].total_length_km() {
                (1, 0)
            } else {
                (0, 1)
            }
        } else {
            (0, 0)
        };
        let swap_duration = circuit.duration;
        Ok(Self {
            topo,
            params,
            protocol,
            circuit,
            links,
            long_link,
            short_link,
            queue: EventQueue::new(),
            rng_link: ChaCha12Rng::seed_from_u64(protocol.seed),
            rng_noise: ChaCha12Rng::seed_from_u64(protocol.seed ^ 0x9e37_79b9_7f4a_7c15),
            output: SimulationOutput::default(),
            round: 0,
            rounds_total: 0,
            stored_long: None,
            short_session: false,
            short_n_attempts: 0,
            repeater_free_at: 0.0,
            pending_requests: Vec::new(),
            trap_r: vec![None; topo.nodes.len()],
            swap_duration,
            done: false,
        })
    }

    fn trace(&mut self, time: f64, node: usize, message: String) {
        if self.protocol.collect_trace {
            self.output.trace.push(format!(
                "{time:.9} {} {message}",
                self.topo.nodes[node]
            ));
        }
    }

    fn send(&mut self, now: f64, from: usize, to: usize, delay: f64, payload: Payload) {
        self.trace(now, from, format!("send {payload:?} -> {}", self.topo.nodes[to]));
        self.queue.schedule(now + delay, to, payload);
    }

    fn run(&mut self) -> Result<(), EngineError> {
        let n_nodes = self.topo.nodes.len();
        let last = n_nodes - 1;
        // Request placed at the first end node; it travels the whole path.
        self.send(0.0, 0, last, self.topo.path_delay(), Payload::StartRequest);
        while let Some(event) = self.queue.pop() {
            if self.done {
                break;
            }
            self.handle(event)?;
            if self.rounds_total > self.protocol.max_rounds {
                return Err(EngineError::MaxRoundsExceeded {
                    rounds: self.rounds_total,
                    delivered: self.output.deliveries.len(),
                });
            }
        }
        if self.output.deliveries.len() < self.protocol.n_pairs {
            return Err(EngineError::Stalled {
                delivered: self.output.deliveries.len(),
            });
        }
        Ok(())
    }

    fn handle(&mut self, event: crate::engine::event::Event) -> Result<(), EngineError> {
        let now = event.time;
        let node = event.target;
        self.trace(now, node, format!("recv {:?}", event.payload));
        let last = self.topo.nodes.len() - 1;
        match event.payload {
            Payload::StartRequest => {
                // The responding end node confirms, activates the repeater
                // and (being adjacent to one link) requests agreement on it.
                if self.topo.links.len() == 1 {
                    // Repeaterless: the confirmation carries the epoch.
                    let delay = self.links[0].delay;
                    let epoch = now + delay;
                    self.send(now, last, 0, delay, Payload::AgreeReply { link: 0, epoch });
                } else {
                    self.send(now, last, 0, self.topo.path_delay(), Payload::StartConfirm);
                    let adj = self.topo.links.len() - 1; // link adjacent to responder
                    let delay = self.links[adj].delay;
                    self.send(now, last, 1, delay, Payload::Activate);
                    self.send(now, last, 1, delay, Payload::AgreeRequest { link: adj });
                }
            }
            Payload::StartConfirm => {
                // The initiating end node becomes protocol-aware and requests
                // agreement on its adjacent link (queued until the repeater
                // is ready for it).
                let delay = self.links[0].delay;
                self.send(now, 0, 1, delay, Payload::AgreeRequest { link: 0 });
            }
            Payload::Activate => {}
            Payload::AgreeRequest { link } => {
                if self.topo.links.len() == 1 {
                    // Repeaterless chain: the responder end node replies with
                    // the next common epoch directly.
                    let delay = self.links[0].delay;
                    let epoch = now + delay;
                    self.send(now, last, 0, delay, Payload::AgreeReply { link, epoch });
                } else {
                    self.pending_requests.push(link);
                    self.repeater_try_start(now)?;
                }
            }
            Payload::AgreeReply { link, epoch } => {
                // Repeaterless chain only: the initiating end node starts the
                // session at the agreed epoch.
                debug_assert_eq!(self.topo.links.len(), 1);
                self.start_session(epoch, link)?;
            }
            Payload::LinkHerald {
                link,
                n_attempts,
                plus_branch,
            } => {
                self.on_link_herald(now, link, n_attempts, plus_branch)?;
            }
            Payload::CutoffFire { round } => {
                if round == self.round && self.stored_long.is_some() {
                    self.on_cutoff(now)?;
                }
            }
            Payload::Discard { round: _ } => {
                // Long-side end node frees its qubit and re-requests.
                let end = self.long_end();
                let delay = self.links[self.long_link].delay;
                self.send(now, end, 1, delay, Payload::AgreeRequest { link: self.long_link });
            }
            Payload::Abort { round: _ } => {
                // Short-side end node re-queues its agreement request.
                let end = self.short_end();
                let delay = self.links[self.short_link].delay;
                self.send(now, end, 1, delay, Payload::AgreeRequest { link: self.short_link });
            }
            Payload::SwapOutcome { round, .. } => {
                // End nodes learn of the delivery; the long-side end starts
                // the next round.
                if round + 1 == self.round
                    && node == self.long_end()
                    && self.output.deliveries.len() < self.protocol.n_pairs
                {
                    let delay = self.links[self.long_link].delay;
                    self.send(now, node, 1, delay, Payload::AgreeRequest { link: self.long_link });
                }
                if round + 1 == self.round && node == self.short_end() {
                    let delay = self.links[self.short_link].delay;
                    self.send(now, node, 1, delay, Payload::AgreeRequest { link: self.short_link });
                }
            }
        }
        Ok(())
    }

    fn long_end(&self) -> usize {
        if self.long_link == 0 {
            0
        } else {
            self.topo.nodes.len() - 1
        }
    }

    fn short_end(&self) -> usize {
        if self.short_link == 0 {
            0
        } else {
            self.topo.nodes.len() - 1
        }
    }

    /// The repeater processes queued agreement requests: it only ever serves
    /// the link it currently wants (long first, then short), one at a time.
    fn repeater_try_start(&mut self, now: f64) -> Result<(), EngineError> {
        if self.done || self.topo.links.len() == 1 {
            return Ok(());
        }
        if self.short_session {
            return Ok(());
        }
        let wanted = if self.stored_long.is_none() {
            self.long_link
        } else {
            self.short_link
        };
        if let Some(pos) = self.pending_requests.iter().position(|&l| l == wanted) {
            self.pending_requests.remove(pos);
            let delay = self.links[wanted].delay;
            let reply_at = now.max(self.repeater_free_at);
            let epoch = reply_at + delay;
            let peer = if wanted == 0 { 0 } else { self.topo.nodes.len() - 1 };
            self.trace(
                reply_at,
                1,
                format!("agree link {wanted} epoch {epoch:.9} with {}", self.topo.nodes[peer]),
            );
            self.start_session(epoch, wanted)?;
        }
        Ok(())
    }

    /// Samples the magic link generation and schedules the heralding event.
    fn start_session(&mut self, epoch: f64, link: usize) -> Result<(), EngineError> {
        let model = &self.links[link];
        let sample = sample_link(
            model.outcome.success_prob,
            model.attempt_duration,
            &mut self.rng_link,
        )?;
        let plus_branch = self.rng_link.gen_bool(0.5);
        let herald_at = epoch + sample.delay;
        let target = if self.topo.links.len() == 1 { 0 } else { 1 };
        if self.topo.links.len() == 2 && link == self.short_link {
            self.short_session = true;
            self.short_n_attempts = sample.n_attempts;
        }
        self.queue.schedule(
            herald_at,
            target,
            Payload::LinkHerald {
                link,
                n_attempts: sample.n_attempts,
                plus_branch,
            },
        );
        Ok(())
    }

    fn sample_trap_r(&mut self, node: usize) -> Option<f64> {
        if self.params.platform == PlatformKind::TrappedIon {
            let r: f64 = self.rng_noise.sample(rand_distr::StandardNormal);
            self.trap_r[node] = Some(r);
            Some(r)
        } else {
            None
        }
    }

    fn on_link_herald(
        &mut self,
        now: f64,
        link: usize,
        n_attempts: u64,
        plus_branch: bool,
    ) -> Result<(), EngineError> {
        let model = &self.links[link];
        let state = model.outcome.state(plus_branch).clone();
        let frame = LinkOutcome::<f64>::frame(plus_branch);
        if self.topo.links.len() == 1 {
            // Direct delivery: both ends learn at the cycle end; no storage.
            let corrected = apply_correction(&state, frame)?;
            let record = DeliveryRecord {
                pair_index: self.output.deliveries.len(),
                completion_time: now,
                corrected_state: corrected,
                frame,
                attempts_long: n_attempts,
                attempts_short: 0,
                storage_time: 0.0,
            };
            self.trace(now, 0, format!("delivered pair {}", record.pair_index));
            self.output.deliveries.push(record);
            self.rounds_total += 1;
            if self.output.deliveries.len() >= self.protocol.n_pairs {
                self.done = true;
            } else {
                let delay = self.links[0].delay;
                self.send(now, 0, 1, delay, Payload::AgreeRequest { link: 0 });
            }
            return Ok(());
        }
        if link == self.long_link {
            // First link heralded: store at the repeater (with a move on
            // color centers), optionally move at the waiting end node, and
            // arm the cut-off timer.
            debug_assert!(self.stored_long.is_none(), "sequential constraint violated");
            // Fresh dephasing-rate samples for the traps now holding state.
            self.sample_trap_r(self.long_end());
            self.sample_trap_r(1);
            let mut stored_state = state;
            let mut rep_store_from = now;
            // Link state ordering: qubit 0 = end half, qubit 1 = repeater
            // half when the end node is the lower-indexed node, else
            // reversed. Normalize to (end, repeater).
            let end_is_lower = self.long_end() == 0;
            if !end_is_lower {
                // states from the link models are symmetric in ordering up
                // to relabeling; swap qubits so qubit 0 is the end half.
                stored_state = swap_qubits(&stored_state)?;
            }
            if self.params.platform == PlatformKind::ColorCenter {
                let (moved, d_move) = move_to_memory_indexed(&stored_state, 1, self.params)?;
                stored_state = moved;
                rep_store_from = now + d_move;
                self.repeater_free_at = now + d_move;
            } else {
                self.repeater_free_at = now;
            }
            let mut end_store_from = now;
            let mut end_moved = false;
            if self.protocol.move_end_node_to_memory
                && self.params.platform == PlatformKind::ColorCenter
            {
                let (moved, d_move) = move_to_memory_indexed(&stored_state, 0, self.params)?;
                stored_state = moved;
                end_store_from = now + d_move;
                end_moved = true;
            }
            self.trace(now, 1, format!("stored link {link} after {n_attempts} attempts"));
            self.stored_long = Some(StoredLink {
                state: stored_state,
                frame,
                herald_time: now,
                n_attempts,
                rep_store_from,
                end_store_from,
                end_moved,
            });
            if let Some(cutoff) = self.protocol.cutoff_time {
                self.queue
                    .schedule(now + cutoff, 1, Payload::CutoffFire { round: self.round });
            }
            self.repeater_try_start(now)?;
        } else {
            // Second link heralded within the cut-off: swap as soon as
            // possible.
            if !self.short_session {
                return Ok(()); // stale herald from a cut-off round
            }
            self.short_session = false;
            self.sample_trap_r(self.short_end());
            let mut short_state = state;
            let end_is_lower = self.short_end() == 0;
            if end_is_lower {
                // Normalize ordering to (repeater, end).
                short_state = swap_qubits(&short_state)?;
            }
            self.trace(now, 1, format!("heralded link {link} after {n_attempts} attempts"));
            self.perform_swap(now, short_state, frame, n_attempts)?;
        }
        Ok(())
    }

    fn on_cutoff(&mut self, now: f64) -> Result<(), EngineError> {
        let stored = self.stored_long.take().expect("cutoff with stored link");
        self.trace(
            now,
            1,
            format!(
                "cutoff: discarding link {} stored since {:.9}",
                self.long_link, stored.herald_time
            ),
        );
        self.output.discards += 1;
        self.short_session = false;
        self.rounds_total += 1;
        self.round += 1;
        self.repeater_free_at = now;
        let round = self.round;
        let d_long = self.links[self.long_link].delay;
        let d_short = self.links[self.short_link].delay;
        self.send(now, 1, self.long_end(), d_long, Payload::Discard { round });
        self.send(now, 1, self.short_end(), d_short, Payload::Abort { round });
        Ok(())
    }

    fn perform_swap(
        &mut self,
        now: f64,
        short_state: Dm,
        short_frame: BellIndex,
        short_attempts: u64,
    ) -> Result<(), EngineError> {
        let stored = self.stored_long.take().expect("swap without stored link");
        let d_long = self.links[self.long_link].delay;
        let d_short = self.links[self.short_link].delay;
        let t_swap_end = now + self.swap_duration;
        let completion = t_swap_end + d_long.max(d_short);

        // Idle decoherence of the three stored halves, applied lazily now.
        // Long link state: (end half, repeater half).
        let mut long_state = stored.state;
        let rep_role = if self.params.platform == PlatformKind::ColorCenter {
            QubitRole::Memory
        } else {
            QubitRole::Communication
        };
        long_state = decohere_link_qubit(
            &long_state,
            1,
            self.params.platform,
            rep_role,
            (now - stored.rep_store_from).max(0.0),
            self.params,
            self.trap_r[1],
        )?;
        if self.params.platform == PlatformKind::ColorCenter {
            let alpha = self.links[self.short_link].repeater_alpha(self.short_link);
            let photons = match self.protocol.scheme {
                EntanglementScheme::DoubleClick { .. } => 2,
                EntanglementScheme::SingleClick { .. } => 1,
            };
            long_state = apply_induced_dephasing(
                &long_state,
                1,
                short_attempts,
                alpha,
                self.params,
                photons,
            )?;
        }
        let end_role = if stored.end_moved {
            QubitRole::Memory
        } else {
            QubitRole::Communication
        };
        let end_release = t_swap_end + d_long;
        long_state = decohere_link_qubit(
            &long_state,
            0,
            self.params.platform,
            end_role,
            (end_release - stored.end_store_from).max(0.0),
            self.params,
            self.trap_r[self.long_end()],
        )?;
        // Short link state: (repeater half, end half); the end half waits for
        // the outcome broadcast.
        let short_release = t_swap_end + d_short;
        let short_state = decohere_link_qubit(
            &short_state,
            1,
            self.params.platform,
            QubitRole::Communication,
            (short_release - now).max(0.0),
            self.params,
            self.trap_r[self.short_end()],
        )?;

        // Bell-state measurement across the two repeater halves.
        let (true_outcome, mut swapped) =
            sample_swap(&long_state, &short_state, &self.circuit, &mut self.rng_noise)?;
        if let Some(p) = self.circuit.post_swap_depolarizing {
            swapped = crate::qstate::apply_channel(
                &swapped,
                &crate::qstate::ChannelSpec::Depolarizing { p },
                &[1],
            )?;
        }
        let bits = self.circuit.outcome_for_bell(true_outcome);
        let reported_bits = (
            self.circuit.bit_noise[0].sample(bits.0, &mut self.rng_noise),
            self.circuit.bit_noise[1].sample(bits.1, &mut self.rng_noise),
        );
        let reported = self.circuit.bell_for_outcome(reported_bits);
        let frame = stored.frame.compose(short_frame).compose(reported);
        let corrected = apply_correction(&swapped, frame)?;
        let record = DeliveryRecord {
            pair_index: self.output.deliveries.len(),
            completion_time: completion,
            corrected_state: corrected,
            frame,
            attempts_long: stored.n_attempts,
            attempts_short: short_attempts,
            storage_time: now - stored.herald_time,
        };
        self.trace(
            now,
            1,
            format!(
                "swap outcome {:?} reported {:?}; pair {} completes at {completion:.9}",
                true_outcome, reported, record.pair_index
            ),
        );
        self.output.deliveries.push(record);
        self.rounds_total += 1;
        let finished_round = self.round;
        self.round += 1;
        self.repeater_free_at = t_swap_end;
        if self.output.deliveries.len() >= self.protocol.n_pairs {
            self.done = true;
            return Ok(());
        }
        self.queue.schedule(
            t_swap_end + d_long,
            self.long_end(),
            Payload::SwapOutcome {
                reported,
                round: finished_round,
            },
        );
        self.queue.schedule(
            t_swap_end + d_short,
            self.short_end(),
            Payload::SwapOutcome {
                reported,
                round: finished_round,
            },
        );
        Ok(())
    }
}

impl LinkModel {
    /// Bright-state parameter of the repeater-side segment of a link: the
    /// repeater is the higher endpoint of link 0 and the lower endpoint of
    /// link 1.
    fn repeater_alpha(&self, link: usize) -> f64 {
        if link == 0 {
            self.alpha.1
        } else {
            self.alpha.0
        }
    }
}

/// Swaps the two qubits of a two-qubit state.
fn swap_qubits(state: &Dm) -> Result<Dm, EngineError> {
    let mut swap = CMatrix::zeros(4);
    for a in 0..2usize {
        for b in 0..2usize {
            swap[(a << 1 | b, b << 1 | a)] = num_complex::Complex::new(1.0, 0.0);
        }
    }
    Ok(state.apply_unitary(&swap, &[0, 1])?)
}

/// CC move wrapper allowing either qubit of the link state to be the local
/// communication qubit.
fn move_to_memory_indexed(
    state: &Dm,
    local_qubit: usize,
    params: &HardwareParams,
) -> Result<(Dm, f64), EngineError> {
    if local_qubit == 1 {
        Ok(move_to_memory(state, params)?)
    } else {
        let swapped = swap_qubits(state)?;
        let (moved, d) = move_to_memory(&swapped, params)?;
        Ok((swap_qubits(&moved)?, d))
    }
}

/// Applies the Pauli correction X^i Z^j on the first qubit.
fn apply_correction(state: &Dm, frame: BellIndex) -> Result<Dm, EngineError> {
    Ok(state.apply_unitary(&ops::pauli_frame::<f64>(frame), &[0])?)
}

/// Projects the two repeater halves onto the Bell basis with the swap
/// circuit's accumulated noise, samples the outcome and returns it together
/// with the normalized post-measurement end-to-end state (end_long, end_short).
pub fn sample_swap<R: Rng + ?Sized>(
    long_state: &Dm,
    short_state: &Dm,
    circuit: &SwapCircuit,
    rng: &mut R,
) -> Result<(BellIndex, Dm), EngineError> {
    let weights = circuit.class_weights();
    let mut unnorm: Vec<CMatrix<f64>> = Vec::with_capacity(4);
    let mut probs = [0.0; 4];
    for bell in BellIndex::ALL {
        let mut acc = CMatrix::zeros(4);
        for (cls, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let shifted = BellIndex::new(bell.i ^ (cls >> 1) as u8, bell.j ^ (cls & 1) as u8);
            acc = acc.add(&bell_contract(long_state, short_state, shifted).scale_re(w));
        }
        probs[(bell.i * 2 + bell.j) as usize] = acc.trace().re.max(0.0);
        unnorm.push(acc);
    }
    let total: f64 = probs.iter().sum();
    debug_assert!((total - 1.0).abs() < 1e-8, "swap probabilities sum to {total}");
    let mut draw = rng.gen_range(0.0..total);
    let mut picked = 3;
    for (idx, &p) in probs.iter().enumerate() {
        if draw < p {
            picked = idx;
            break;
        }
        draw -= p;
    }
    let outcome = BellIndex::ALL[picked];
    let state = Dm::from_unnormalized(unnorm[picked].clone())?;
    Ok((outcome, state))
}

/// ⟨Φ_f| on (long.q1, short.q0) contracted against long ⊗ short, giving the
/// unnormalized state on (long.q0, short.q1).
fn bell_contract(long_state: &Dm, short_state: &Dm, frame: BellIndex) -> CMatrix<f64> {
    let phi = crate::qstate::bell_ket::<f64>(frame);
    let mut out = CMatrix::zeros(4);
    for a in 0..2usize {
        for d in 0..2usize {
            for a2 in 0..2usize {
                for d2 in 0..2usize {
                    let mut acc = num_complex::Complex::new(0.0, 0.0);
                    for b in 0..2usize {
                        for c in 0..2usize {
                            for b2 in 0..2usize {
                                for c2 in 0..2usize {
                                    let amp = phi[b << 1 | c].conj() * phi[b2 << 1 | c2];
                                    if amp.norm_sqr() == 0.0 {
                                        continue;
                                    }
                                    acc += amp
                                        * long_state.entry(a << 1 | b, a2 << 1 | b2)
                                        * short_state.entry(c << 1 | d, c2 << 1 | d2);
                                }
                            }
                        }
                    }
                    out[(a << 1 | d, a2 << 1 | d2)] = acc;
                }
            }
        }
    }
    out
}

/// Builds the per-link analytical models from topology + hardware + scheme.
fn build_link_models(
    topo: &NetworkTopology,
    params: &HardwareParams,
    protocol: &ProtocolConfig,
) -> Result<Vec<LinkModel>, EngineError> {
    let p_det_zero = params.get(ParamName::DetectionProbZeroDistance)?;
    let p_dc = params.get(ParamName::DarkCountProb)?;
    let init_charge = match params.platform {
        PlatformKind::ColorCenter => params.get(ParamName::ElectronInitDuration)?,
        PlatformKind::TrappedIon => params.get(ParamName::InitDuration)?,
        PlatformKind::Abstract => params.get(ParamName::AttemptInitDuration)?,
    };
    let emission = params.get(ParamName::EmissionDuration)?;
    let mut models = Vec::new();
    // Balanced bright-state parameters: α p_det equal across all segments,
    // anchored at the most lossy segment.
    let mut seg_pdet: Vec<f64> = Vec::new();
    for link in &topo.links {
        seg_pdet.push(p_det_zero * link.segment_a.transmission());
        seg_pdet.push(p_det_zero * link.segment_b.transmission());
    }
    let min_pdet = seg_pdet.iter().cloned().fold(f64::INFINITY, f64::min);

    for (idx, link) in topo.links.iter().enumerate() {
        let p_a = seg_pdet[2 * idx];
        let p_b = seg_pdet[2 * idx + 1];
        let max_leg = link.segment_a.length_km.max(link.segment_b.length_km);
        let attempt_duration = init_charge + emission + 2.0 * topo.fiber_delay(max_leg);
        let (outcome, alpha) = match protocol.scheme {
            EntanglementScheme::DoubleClick { coincidence_window } => {
                let (v_eff, coincidence) =
                    double_click_interference(params, coincidence_window)?;
                let f_em = params.get(ParamName::EmissionFidelity)?;
                let outcome = double_click_outcome(&DoubleClickParams {
                    p_a,
                    p_b,
                    visibility: v_eff,
                    p_dc,
                    f_em_a: f_em,
                    f_em_b: f_em,
                    detector_mode: DetectorMode::NR,
                    coincidence,
                })?;
                (outcome, (0.0, 0.0))
            }
            EntanglementScheme::SingleClick { alpha } => {
                if params.platform == PlatformKind::TrappedIon {
                    return Err(EngineError::BadConfig(
                        "single-click generation is not modeled for trapped ions".into(),
                    ));
                }
                if !(0.0..1.0).contains(&alpha) || alpha <= 0.0 {
                    return Err(EngineError::BadConfig(format!(
                        "bright-state parameter {alpha} out of (0, 1)"
                    )));
                }
                let alpha_a = alpha * min_pdet / p_a;
                let alpha_b = alpha * min_pdet / p_b;
                let sigma_phase = params
                    .values
                    .get(&ParamName::SigmaPhase)
                    .copied()
                    .unwrap_or(0.0);
                let p_dexc = params
                    .values
                    .get(&ParamName::DoubleExcitationProb)
                    .copied()
                    .unwrap_or(0.0);
                let outcome = single_click_outcome(&SingleClickParams {
                    alpha_a,
                    alpha_b,
                    p_a,
                    p_b,
                    visibility: params.get(ParamName::Visibility)?,
                    p_dc,
                    p_dexc,
                    sigma_phase,
                    detector_mode: DetectorMode::NR,
                })?;
                (outcome, (alpha_a, alpha_b))
            }
        };
        models.push(LinkModel {
            outcome,
            attempt_duration,
            delay: topo.link_delay(idx),
            alpha,
        });
    }
    Ok(models)
}

/// Effective visibility and coincidence substitutions for double-click
/// generation. Trapped ions with a coincidence window derive both from the
/// double-exponential photon model; the visibility parameter stays
/// authoritative at the reference window and sets the improvement exponent.
fn double_click_interference(
    params: &HardwareParams,
    coincidence_window: Option<f64>,
) -> Result<(f64, Option<CoincidenceProbs<f64>>), EngineError> {
    let v_param = params.get(ParamName::Visibility)?;
    if params.platform != PlatformKind::TrappedIon {
        return Ok((v_param, None));
    }
    let Some(tau) = coincidence_window else {
        return Ok((v_param, None));
    };
    let shape = shape_from_half_lives(
        params.get(ParamName::WavefunctionHalfLife)?,
        params.get(ParamName::EmissionHalfLife)?,
        1.0,
    )?;
    let t_window = params.get(ParamName::DetectionWindow)?;
    let window = WindowConfig::new(t_window, tau)?;
    let reference = WindowConfig::new(t_window, TI_REFERENCE_COINCIDENCE_WINDOW.min(t_window))?;
    let v_model = visibility(&shape, &window)?;
    let v_reference = visibility(&shape, &reference)?;
    let exponent = if v_param >= 1.0 {
        0.0
    } else {
        v_param.ln() / v_reference.ln()
    };
    let v_eff = v_model.powf(exponent).clamp(0.0, 1.0);
    let coincidence = CoincidenceProbs {
        ph_ph: coincidence_prob_ph_ph(&shape, &window)?,
        ph_dc: coincidence_prob_ph_dc(&shape, &window)?,
        dc_dc: coincidence_prob_dc_dc(&window)?,
    };
    Ok((v_eff, Some(coincidence)))
}
