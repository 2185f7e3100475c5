//! The per-replication slot loop.
//!
//! Slot order: mobility, then scheduling and the two-hop relay transmissions,
//! then packet generation. A packet generated in slot `t` joins its source
//! queue after the slot-`t` transmissions, so it is transmittable in slot
//! `t + 1` at the earliest and a delivery in slot `t'` has delay `t' - t >= 1`.
//! This departure-before-arrival order is what makes the slot-boundary buffer
//! occupancies follow the analytic occupancy laws.
//!
//! Within one slot the random stream is consumed in a fixed order: mobility
//! draws (node order), one transmitter draw per scheduled cell (cell order),
//! per transmission the protocol coin then the receiver draw, and finally the
//! generation draws (node order).

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::mac::EcGeometry;
use crate::params::{MacKind, NetworkParams};

use super::mobility::mobility_step;
use super::node::{NodeState, Packet};
use super::report::RepOutcome;
use super::rng_util::uniform_index;

/// Relay sub-state (occupancy, nonempty queues) sampling stride.
const SUBSTATE_SAMPLE_EVERY: u64 = 512;
/// Deep structural scan stride (all builds); cheap bound checks run every
/// slot in debug builds.
const DEEP_CHECK_EVERY: u64 = 1 << 16;

pub(super) struct Engine<'a> {
    params: &'a NetworkParams,
    phi: &'a [u16],
    rng: ChaCha8Rng,
    slots: u64,
    warmup_slots: u64,
    ec: Option<EcGeometry>,
    cells: Vec<u32>,
    occupants: Vec<Vec<u16>>,
    coverage: Vec<u16>,
    nodes: Vec<NodeState>,
    next_packet_id: u64,
    out: RepOutcome,
}

impl<'a> Engine<'a> {
    pub(super) fn new(
        params: &'a NetworkParams,
        phi: &'a [u16],
        slots: u64,
        warmup_slots: u64,
        rng: ChaCha8Rng,
    ) -> Self {
        let n = params.n as usize;
        let m2 = (params.m * params.m) as usize;
        let ec = match params.mac {
            MacKind::Ls => None,
            MacKind::Ec => {
                Some(crate::mac::ec_geometry(params.m, params.nu, params.delta).expect(
                    "params validated before engine construction",
                ))
            }
        };
        Engine {
            params,
            phi,
            rng,
            slots,
            warmup_slots,
            ec,
            cells: vec![0; n],
            occupants: vec![Vec::new(); m2],
            coverage: Vec::new(),
            nodes: (0..n).map(|_| NodeState::new(params.n)).collect(),
            next_packet_id: 0,
            out: RepOutcome::new(params),
        }
    }

    pub(super) fn run(mut self) -> RepOutcome {
        for slot in 0..self.slots {
            mobility_step(self.params.mobility, self.params.m, &mut self.cells, &mut self.rng);
            self.rebuild_occupants();
            match self.params.mac {
                MacKind::Ls => self.schedule_ls(slot),
                MacKind::Ec => self.schedule_ec(slot),
            }
            self.generate(slot);
            if slot >= self.warmup_slots {
                self.collect(slot);
            }
            #[cfg(debug_assertions)]
            self.check_bounds();
            if slot.is_multiple_of(DEEP_CHECK_EVERY) {
                self.deep_check();
            }
        }
        self.deep_check();
        self.out.in_flight = self
            .nodes
            .iter()
            .map(|n| n.source.len() as u64 + u64::from(n.relay_count))
            .sum();
        assert_eq!(
            self.out.generated,
            self.out.delivered + self.out.dropped_source + self.out.dropped_relay + self.out.in_flight,
            "packet conservation violated"
        );
        self.out.window_slots = self.slots - self.warmup_slots;
        self.out
    }

    fn rebuild_occupants(&mut self) {
        for occ in &mut self.occupants {
            occ.clear();
        }
        for (node, &cell) in self.cells.iter().enumerate() {
            self.occupants[cell as usize].push(node as u16);
        }
    }

    fn schedule_ls(&mut self, slot: u64) {
        let measuring = slot >= self.warmup_slots;
        for cell in 0..self.occupants.len() {
            if self.occupants[cell].is_empty() {
                continue;
            }
            let mut cov = std::mem::take(&mut self.coverage);
            cov.clear();
            cov.extend_from_slice(&self.occupants[cell]);
            let tx = cov[uniform_index(&mut self.rng, cov.len() as u32) as usize];
            self.execute_2hr(tx, &cov, slot, measuring);
            self.coverage = cov;
        }
    }

    fn schedule_ec(&mut self, slot: u64) {
        let measuring = slot >= self.warmup_slots;
        let geo = self.ec.expect("EC scheduling requires EC geometry");
        let eps = geo.epsilon;
        let m = self.params.m;
        let active = (slot % u64::from(eps * eps)) as u32;
        let (off_r, off_c) = (active / eps, active % eps);
        let radius = self.params.nu - 1;
        let mut r = off_r;
        while r < m {
            let mut c = off_c;
            while c < m {
                let cell = (r * m + c) as usize;
                if !self.occupants[cell].is_empty() {
                    let mut cov = std::mem::take(&mut self.coverage);
                    cov.clear();
                    // Transmitter comes from the active cell itself.
                    let occ = &self.occupants[cell];
                    let tx = occ[uniform_index(&mut self.rng, occ.len() as u32) as usize];
                    // Receivers may sit anywhere within nu - 1 cells in both
                    // axes, the transmitter's own cell included.
                    for dr in 0..=2 * radius {
                        for dc in 0..=2 * radius {
                            let nr = (r + m + dr - radius) % m;
                            let nc = (c + m + dc - radius) % m;
                            cov.extend_from_slice(&self.occupants[(nr * m + nc) as usize]);
                        }
                    }
                    self.execute_2hr(tx, &cov, slot, measuring);
                    self.coverage = cov;
                }
                c += eps;
            }
            r += eps;
        }
    }

    /// Runs the two-hop relay protocol for one scheduled transmitter.
    fn execute_2hr(&mut self, tx: u16, coverage: &[u16], slot: u64, measuring: bool) {
        let dst = self.phi[tx as usize];
        if coverage.contains(&dst) {
            // Source-to-Destination, with no fall-through to other operations.
            if measuring {
                self.out.sd_chances += 1;
            }
            if let Some(p) = self.nodes[tx as usize].source.pop_front() {
                self.deliver(p, slot, measuring);
            }
            return;
        }
        let others = coverage.len() - 1;
        if others == 0 {
            return; // nobody to talk to
        }
        let to_relay = self.rng.gen::<f64>() < 0.5;
        let pick = uniform_index(&mut self.rng, others as u32) as usize;
        let rx = coverage
            .iter()
            .copied()
            .filter(|&v| v != tx)
            .nth(pick)
            .expect("receiver index within coverage");
        if to_relay {
            self.source_to_relay(tx, rx, measuring);
        } else {
            self.relay_to_destination(tx, rx, slot, measuring);
        }
    }

    fn source_to_relay(&mut self, tx: u16, rx: u16, measuring: bool) {
        if measuring {
            self.out.sr_chances += 1;
        }
        if self.nodes[tx as usize].source.is_empty() {
            return;
        }
        let rx_full = self.nodes[rx as usize].relay_count >= self.params.br;
        if self.params.feedback && rx_full {
            // The receiver reports a full buffer; the packet stays queued.
            return;
        }
        let p = self.nodes[tx as usize]
            .source
            .pop_front()
            .expect("checked nonempty");
        if rx_full {
            self.out.dropped_relay += 1;
            if measuring {
                self.out.dropped_relay_window += 1;
            }
        } else {
            debug_assert_ne!(p.dst, rx, "destination would have taken the direct branch");
            let node = &mut self.nodes[rx as usize];
            let queue = &mut node.relay[p.dst as usize];
            if queue.is_empty() {
                node.nonempty_relay_queues += 1;
            }
            queue.push_back(p);
            node.relay_count += 1;
        }
    }

    fn relay_to_destination(&mut self, tx: u16, rx: u16, slot: u64, measuring: bool) {
        if measuring {
            self.out.rd_chances += 1;
        }
        let node = &mut self.nodes[tx as usize];
        let queue = &mut node.relay[rx as usize];
        if let Some(p) = queue.pop_front() {
            node.relay_count -= 1;
            if queue.is_empty() {
                node.nonempty_relay_queues -= 1;
            }
            debug_assert_eq!(p.dst, rx);
            self.deliver(p, slot, measuring);
        }
    }

    fn deliver(&mut self, p: Packet, slot: u64, measuring: bool) {
        self.out.delivered += 1;
        if measuring {
            self.out.delivered_per_flow[p.src as usize] += 1;
            if p.gen_slot >= self.warmup_slots {
                self.out.delay_sum += (slot - p.gen_slot) as f64;
                self.out.delay_count += 1;
            }
        }
    }

    fn generate(&mut self, slot: u64) {
        let measuring = slot >= self.warmup_slots;
        let bs = self.params.bs as usize;
        for i in 0..self.nodes.len() {
            if self.rng.gen::<f64>() < self.params.lambda_s {
                self.out.generated += 1;
                if self.nodes[i].source.len() >= bs {
                    self.out.dropped_source += 1;
                    if measuring {
                        self.out.dropped_source_window += 1;
                    }
                } else {
                    let p = Packet {
                        id: self.next_packet_id,
                        src: i as u16,
                        dst: self.phi[i],
                        gen_slot: slot,
                    };
                    self.next_packet_id += 1;
                    self.nodes[i].source.push_back(p);
                }
            }
        }
    }

    /// End-of-slot state equals the next slot-boundary state, which is the
    /// ensemble the analytic occupancy laws describe.
    fn collect(&mut self, slot: u64) {
        for node in &self.nodes {
            self.out.source_hist[node.source.len()] += 1;
            self.out.relay_hist[node.relay_count as usize] += 1;
        }
        if slot.is_multiple_of(SUBSTATE_SAMPLE_EVERY) {
            for node in &self.nodes {
                let i = node.relay_count as usize;
                if i >= 1 {
                    self.out.substate_counts[i][node.nonempty_relay_queues as usize] += 1;
                }
            }
        }
    }

    #[cfg(debug_assertions)]
    fn check_bounds(&self) {
        for node in &self.nodes {
            debug_assert!(node.source.len() <= self.params.bs as usize);
            debug_assert!(node.relay_count <= self.params.br);
            debug_assert!(node.nonempty_relay_queues <= node.relay_count);
        }
    }

    /// Full structural scan: counters against queue contents, and packet
    /// placement rules.
    fn deep_check(&self) {
        for (i, node) in self.nodes.iter().enumerate() {
            assert!(node.source.len() <= self.params.bs as usize);
            let total: usize = node.relay.iter().map(|q| q.len()).sum();
            assert_eq!(total as u32, node.relay_count);
            assert!(node.relay_count <= self.params.br);
            let nonempty = node.relay.iter().filter(|q| !q.is_empty()).count();
            assert_eq!(nonempty as u32, node.nonempty_relay_queues);
            assert!(node.relay[i].is_empty(), "relay queue toward self");
            assert!(
                node.relay[self.phi[i] as usize].is_empty(),
                "relay queue toward own destination"
            );
            for (d, q) in node.relay.iter().enumerate() {
                for p in q {
                    assert_eq!(p.dst as usize, d);
                    assert_ne!(p.src as usize, i, "node relaying its own packet");
                }
            }
        }
    }
}
