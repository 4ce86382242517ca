//! Constructive Cantor–Bendixson sets, the entire functions whose dilation
//! families they control, and certified numerics probing those families.
//!
//! * [`ordinal`]: ordinals below ε₀ in Cantor normal form.
//! * [`pointset`]: countable closed sets on circle arcs with exact derived-set
//!   structure.
//! * [`schedule`]: zero schedules built from those sets on Fibonacci radii.
//! * [`evaluator`]: log-domain evaluation of the product over a schedule.
//! * [`probe`]: dilation rules, clustering certificates and sweeps.
//! * [`acceptance`]: the end-to-end checks run by `transfinite verify`.

pub mod acceptance;
pub mod evaluator;
pub mod exact;
pub mod interval;
pub mod ordinal;
pub mod par;
pub mod pointset;
pub mod probe;
pub mod schedule;

pub use ordinal::Ordinal;
pub use pointset::{Arc, RankTree};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
