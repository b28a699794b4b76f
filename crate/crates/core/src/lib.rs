//! Finite-blocklength effective throughput for two-user downlink NOMA.
//!
//! This crate models a single-antenna access point serving two users with
//! superposition coding and successive interference cancellation (SIC) under
//! a finite blocklength, where decoding error probabilities follow the
//! normal approximation and SIC is not guaranteed. It provides:
//!
//! * [`fbl`] — the finite-blocklength primitives: Gaussian tail function and
//!   inverse, channel dispersion, the f-metric, decoding error probability,
//!   and achievable rate;
//! * [`model`] — the two-user NOMA SINR algebra, SIC outage, and effective
//!   throughput of a given rate/power decision;
//! * [`noma`] — the four-step optimal NOMA design (fixed-point iteration for
//!   the weak user's rate, first-order bisection for the strong user's rate,
//!   the lower power bound, and the outer power search);
//! * [`oma`] — the orthogonal-access benchmark with joint rate, power, and
//!   time-slot optimization;
//! * [`channel`] — fixed-gain and Rayleigh-fading channel construction with
//!   deterministic Monte Carlo averaging;
//! * [`oracle`] — brute-force dense-grid reference optimizers used by tests
//!   and the `oracle-check` command;
//! * [`numerics`] — bisection and golden-section search helpers.
//!
//! All powers, gains, and SNRs are linear; dB conversion is confined to the
//! channel module. Rates and throughputs are in bits per channel use
//! (bps/Hz). Everything here is pure and thread-safe.

mod error;

pub mod channel;
pub mod fbl;
pub mod model;
pub mod noma;
pub mod numerics;
pub mod oma;
pub mod oracle;

pub use error::{Error, Result};
pub use fbl::{Blocklength, ErrorProb, Rate, SnrValue};
pub use model::{ChannelGains, NomaDecision, NomaEvaluation, SystemParams};
pub use noma::{SolveReport, Tolerances};
pub use oma::{OmaDecision, OmaSolution};
