//! Free-function float math from `libm`, so every build (std or not) uses
//! the same implementations bit for bit.

pub(crate) use libm::{atan2, cos, exp, floor, hypot, log as ln, round, sin, sqrt};
