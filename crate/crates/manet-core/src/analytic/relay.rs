//! Stationary occupancy law of the shared relay buffer.
//!
//! The relay occupancy process is a birth-death chain: at most one relay
//! packet arrives per slot (a node is the receiver of at most one
//! transmission) and an arrival and a departure never share a slot (a node is
//! never transmitter and receiver at once).

use crate::error::{ModelError, Result};
use crate::mac::SchedProbs;

/// Stationary occupancy distribution of the relay buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayOsd {
    /// `pi[i]` = stationary probability of `i` buffered packets, length `br + 1`.
    pub pi: Vec<f64>,
}

impl RelayOsd {
    /// Probability the buffer is full.
    pub fn overflow_prob(&self) -> f64 {
        *self.pi.last().unwrap()
    }

    /// Expected occupancy conditioned on the buffer not being full; zero for
    /// `br <= 1`.
    pub fn conditional_len(&self) -> f64 {
        let br = self.pi.len() - 1;
        if br <= 1 {
            return 0.0;
        }
        let not_full = 1.0 - self.pi[br];
        if not_full <= 0.0 {
            return 0.0;
        }
        let mean: f64 = self.pi[..br]
            .iter()
            .enumerate()
            .map(|(i, p)| i as f64 * p)
            .sum();
        mean / not_full
    }
}

/// One-step transition probabilities of the relay occupancy chain.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayTransitions {
    /// `up[i]` = p(i -> i+1) for `0 <= i <= br-1`: a nonempty neighbor source
    /// wins a Source-to-Relay chance toward this node.
    pub up: Vec<f64>,
    /// `down[i]` = p(i+1 -> i) for `0 <= i <= br-1`: the node wins a
    /// Relay-to-Destination chance and the drawn receiver's queue is nonempty.
    pub down: Vec<f64>,
}

/// One-step transition probabilities: `up = psr (1 - pi_s0)` on every
/// level, `down` at occupancy `i` is `prd * i / (n - 3 + i)`.
pub fn relay_transition_probs(
    probs: &SchedProbs,
    pi_s0: f64,
    n: u32,
    br: u32,
) -> Result<RelayTransitions> {
    if n < 4 {
        return Err(ModelError::param("n", "need at least 4 nodes"));
    }
    if !(0.0..=1.0).contains(&pi_s0) {
        return Err(ModelError::param("pi_s0", "must be a probability"));
    }
    let up = vec![probs.psr * (1.0 - pi_s0); br as usize];
    let down = (1..=br)
        .map(|i| probs.prd * f64::from(i) / f64::from(n - 3 + i))
        .collect();
    Ok(RelayTransitions { up, down })
}

/// Log-weights `ln C_i + i ln(x)` with `C_i = C(n-3+i, i)` and
/// `x = 1 - pi_s0`, built by running ratios so nothing overflows.
fn log_weights(n: u32, br: u32, x: f64) -> Vec<f64> {
    let ln_x = x.ln(); // -inf when x = 0 is fine: exp gives exact zeros
    let mut lw = Vec::with_capacity(br as usize + 1);
    lw.push(0.0);
    let mut acc = 0.0;
    for i in 1..=br {
        acc += ln_x + (f64::from(n - 3 + i) / f64::from(i)).ln();
        lw.push(acc);
    }
    lw
}

/// Full stationary distribution over `0..=br` relay packets given the
/// source-empty probability of the feeding nodes. `br = 0` yields `[1]`.
///
/// The common `psr = prd` factor cancels out of the balance equations, so the
/// law depends only on `(n, br, pi_s0)`.
pub fn relay_osd(n: u32, br: u32, pi_s0: f64) -> Result<RelayOsd> {
    if n < 4 {
        return Err(ModelError::param("n", "need at least 4 nodes"));
    }
    if !(0.0..=1.0).contains(&pi_s0) {
        return Err(ModelError::param("pi_s0", "must be a probability"));
    }
    if br == 0 {
        return Ok(RelayOsd { pi: vec![1.0] });
    }
    let lw = log_weights(n, br, 1.0 - pi_s0);
    let max = lw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut pi: Vec<f64> = lw.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = pi.iter().sum();
    for p in &mut pi {
        *p /= total;
    }
    Ok(RelayOsd { pi })
}

/// Overflow probability alone; O(br) and allocation-light for the fixed-point
/// loop.
pub fn relay_overflow_prob(n: u32, br: u32, pi_s0: f64) -> f64 {
    if br == 0 {
        return 1.0;
    }
    let x = 1.0 - pi_s0;
    if x == 0.0 {
        return 0.0;
    }
    let ln_x = x.ln();
    let mut acc = 0.0;
    let mut max = 0.0f64;
    let mut lw_top = 0.0;
    let mut lws = Vec::with_capacity(br as usize + 1);
    lws.push(0.0);
    for i in 1..=br {
        acc += ln_x + (f64::from(n - 3 + i) / f64::from(i)).ln();
        lws.push(acc);
        if acc > max {
            max = acc;
        }
        if i == br {
            lw_top = acc;
        }
    }
    let total: f64 = lws.iter().map(|l| (l - max).exp()).sum();
    (lw_top - max).exp() / total
}

/// Probability that the `i` buffered relay packets occupy exactly `l`
/// distinct per-destination queues, out of `n - 2` possible destinations.
pub fn relay_substate_dist(n: u32, i: u32, l: u32) -> Result<f64> {
    if n < 4 {
        return Err(ModelError::param("n", "need at least 4 nodes"));
    }
    if l < 1 || l > i {
        return Err(ModelError::param("l", format!("need 1 <= l <= i, got l={l} i={i}")));
    }
    if l > n - 2 {
        return Ok(0.0); // more nonempty queues than destinations is impossible
    }
    let ln = ln_choose(u64::from(n - 2), u64::from(l))
        + ln_choose(u64::from(i - 1), u64::from(i - l))
        - ln_choose(u64::from(n - 3 + i), u64::from(i));
    Ok(ln.exp())
}

/// `ln C(a, b)` by a running product; exact enough for the buffer sizes here.
pub(crate) fn ln_choose(a: u64, b: u64) -> f64 {
    if b > a {
        return f64::NEG_INFINITY;
    }
    let b = b.min(a - b);
    let mut acc = 0.0;
    for j in 1..=b {
        acc += ((a - b + j) as f64 / j as f64).ln();
    }
    acc
}
