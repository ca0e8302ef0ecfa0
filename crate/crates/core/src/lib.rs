//! Algebraic geometry codes on the Garcia-Stichtenoth tower.

pub mod agcode;
pub mod channel;
pub mod cli;
pub mod decode;
pub mod fastenc;
pub mod ffield;
pub mod linalg;
pub mod localize;
pub mod rng;
pub mod selftest;
pub mod tablefile;
pub mod tower;
