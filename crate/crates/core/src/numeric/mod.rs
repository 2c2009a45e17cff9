//! Shared numeric machinery: scalar root finding on convex functions,
//! special functions, and double-double arithmetic for the extended
//! precision inversion mode.

pub mod dd;
pub mod roots;
pub mod special;
