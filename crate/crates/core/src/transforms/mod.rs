//! Hankel transforms, Littlewood-Paley windows and per-mode functional calculus.

mod hankel;
mod radial;
mod windows;

pub use hankel::{hankel_transform, hankel_transform_onto, mode_multiplier, weber_check, weber_lhs, weber_rhs};
pub use radial::{RadialGrid, RadialProfile};
pub use windows::{bump, lp_windows, low_cutoff, DyadicWindow, LpPartition};
