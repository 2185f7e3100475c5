//! Per-node simulation state.

use std::collections::VecDeque;

/// One packet travelling from its source flow to its destination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Packet {
    /// Globally unique sequence number within a replication.
    pub id: u64,
    pub src: u16,
    pub dst: u16,
    /// Slot in which the packet was generated.
    pub gen_slot: u64,
}

/// Buffers of a single node. The relay buffer is one shared pool of at most
/// `br` packets organized as per-destination FIFO queues.
#[derive(Debug, Clone)]
pub struct NodeState {
    /// Locally generated packets, FIFO, at most `bs`.
    pub source: VecDeque<Packet>,
    /// Virtual relay queues indexed by destination node id. The slots for a
    /// node's own id and its own destination stay empty forever.
    pub relay: Vec<VecDeque<Packet>>,
    /// Total packets across all relay queues, kept <= `br` at push time.
    pub relay_count: u32,
    /// Number of nonempty relay queues, maintained incrementally.
    pub nonempty_relay_queues: u32,
}

impl NodeState {
    pub fn new(n: u32) -> Self {
        NodeState {
            source: VecDeque::new(),
            relay: vec![VecDeque::new(); n as usize],
            relay_count: 0,
            nonempty_relay_queues: 0,
        }
    }
}
