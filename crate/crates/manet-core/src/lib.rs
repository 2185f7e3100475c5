#![forbid(unsafe_code)]
//! Performance model and slotted simulator for mobile ad hoc networks in which
//! every node carries a finite source buffer and a finite shared relay buffer.
//!
//! The crate has two engines that answer the same question two different ways:
//!
//! * [`analytic`] evaluates the closed-form queueing model: the stationary
//!   occupancy distributions of both buffers, per-flow throughput, expected
//!   end-to-end delay, throughput capacity, and the infinite-buffer limits.
//!   With the feedback mechanism enabled the relay-overflow probability is an
//!   implicit quantity and is resolved by fixed-point iteration.
//! * [`sim`] runs the network slot by slot: uniform-type mobility over an
//!   m-by-m torus of cells, cell-based scheduling, two-hop relay routing with
//!   or without overflow feedback, and finite FIFO buffers. Its counters and
//!   histograms are directly comparable with the analytic outputs.
//!
//! [`mac`] supplies the per-slot scheduling probabilities `(psd, psr, prd)`
//! for the two case-study MAC schemes; anything implementing
//! [`mac::SchedulingModel`] can drive the analytic pipeline instead.
//!
//! ```
//! use manet_core::{analyze, NetworkParams};
//!
//! // The reference scenario: 72 nodes on a 6x6 torus, both buffers at 5.
//! let report = analyze(&NetworkParams::default()).unwrap();
//! assert!((report.capacity - 0.017667).abs() < 1e-5);
//! assert!(report.throughput <= report.capacity);
//! ```

pub mod analytic;
pub mod error;
pub mod mac;
pub mod params;
pub mod sim;

pub use analytic::{analyze, TheoryReport};
pub use error::{ModelError, Result};
pub use mac::SchedProbs;
pub use params::{MacKind, Mobility, NetworkParams};
pub use sim::{run, RunOptions, SimReport};
