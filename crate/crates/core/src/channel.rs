//! Seeded symbol corruption.

use rand::seq::index::sample;
use rand::{Rng, RngCore};
use thiserror::Error;

use crate::ffield::{Gf, SmallField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChannelError {
    #[error("cannot corrupt {errors} of {len} symbols")]
    TooManyErrors { errors: usize, len: usize },
    #[error("symbol {value} at position {pos} is not an element of F_{order}")]
    BadSymbol { pos: usize, value: u16, order: u32 },
}

/// Changes exactly `errors` symbols, at distinct positions, each to a
/// different element of the field.
pub fn corrupt(f: &SmallField, word: &[Gf], errors: usize, rng: &mut dyn RngCore) -> Result<Vec<Gf>, ChannelError> {
    if errors > word.len() {
        return Err(ChannelError::TooManyErrors { errors, len: word.len() });
    }
    let order = f.size();
    if let Some((pos, g)) = word.iter().enumerate().find(|(_, g)| g.0 as u32 >= order) {
        return Err(ChannelError::BadSymbol { pos, value: g.0, order });
    }
    let mut out = word.to_vec();
    let mut positions = sample(rng, word.len(), errors).into_vec();
    positions.sort_unstable();
    for p in positions {
        let delta = rng.gen_range(1..order) as u16;
        out[p] = Gf((out[p].0 + delta) % order as u16);
    }
    Ok(out)
}
