//! Risk-adaptive V2X network simulation.
//!
//! Each vehicle in a broadcast VANET runs a contextual multi-armed bandit
//! that learns how dangerous its current situation is (speed deviation from
//! the limit, headway relative to safe stopping distance) and maps the
//! learned accident risk onto its CSMA backoff counter, so that riskier
//! vehicles get transmission priority for their safety messages.
//!
//! Module layout:
//! * [`geometry`] — Poisson point process vehicle layouts, free-direction
//!   mobility, neighborhood queries.
//! * [`risk`] — context extraction, context-to-weight maps, accident risk,
//!   risk-to-backoff allocation.
//! * [`bandit`] — per-context epsilon-greedy bandit with training phase,
//!   arm tables, and regret bookkeeping.
//! * [`mac`] — slotted listen-before-talk broadcast MAC with backoff
//!   freezing and packet expiry; Monte-Carlo transmission probability.
//! * [`sim`] — the per-round learning cycle tying all of the above
//!   together, reward environments, and experiment summaries.

pub mod bandit;
pub mod geometry;
pub mod mac;
pub mod risk;
pub mod rng;
pub mod sim;
