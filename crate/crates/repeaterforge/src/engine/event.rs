//! Discrete-event kernel: a time-ordered queue with a monotone sequence
//! tiebreaker, so equal-time events replay in insertion order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::qstate::BellIndex;

/// Protocol messages and timers.
#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    /// End-to-end request from the initiating end node.
    StartRequest,
    /// Confirmation from the responding end node.
    StartConfirm,
    /// Activation of the repeater by the responding end node.
    Activate,
    /// Agreement request for entanglement generation on a link.
    AgreeRequest { link: usize },
    /// Agreement reply carrying the common first-attempt epoch.
    AgreeReply { link: usize, epoch: f64 },
    /// Heralded success of an elementary link (arrives at the end of the
    /// successful attempt cycle, which includes the midpoint round trip).
    LinkHerald {
        link: usize,
        n_attempts: u64,
        plus_branch: bool,
    },
    /// Cut-off timer on the repeater's stored qubit for a given round.
    CutoffFire { round: u64 },
    /// Stored qubit discarded; regenerate the long link.
    Discard { round: u64 },
    /// Stop generating on the short link; the round was cut off.
    Abort { round: u64 },
    /// Bell-state-measurement outcome broadcast to the end nodes.
    SwapOutcome { reported: BellIndex, round: u64 },
}

#[derive(Clone, Debug)]
pub struct Event {
    pub time: f64,
    pub seq: u64,
    pub target: usize,
    pub payload: Payload,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.seq == other.seq
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we want earliest first.
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Event>,
    next_seq: u64,
    now: f64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    /// Schedules an event at an absolute time; time must not precede the
    /// current simulation instant.
    pub fn schedule(&mut self, time: f64, target: usize, payload: Payload) {
        assert!(
            time >= self.now,
            "event scheduled in the past: {time} < {}",
            self.now
        );
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Event {
            time,
            seq,
            target,
            payload,
        });
    }

    pub fn pop(&mut self) -> Option<Event> {
        let event = self.heap.pop()?;
        debug_assert!(event.time >= self.now, "event queue time went backwards");
        self.now = event.time;
        Some(event)
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}
