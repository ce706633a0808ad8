//! Successive cancellation with the exact boxplus, used as a reference.

use crate::code::CodeSpec;
use crate::engine::{boxplus, BoxplusMode};
use crate::{Bits, Error, Result};

pub fn decode_sc(spec: &CodeSpec, channel_llr: &[f64]) -> Result<Bits> {
    if channel_llr.len() != spec.block_len {
        return Err(Error::LengthMismatch { expected: spec.block_len, got: channel_llr.len() });
    }
    let (u, _) = recurse(channel_llr, spec.frozen());
    Ok(u)
}

// x = ((a ^ b) G', b G') for u = (a, b), so `a` is decoded from y1 ⊞ y2 and
// `b` from y2 plus y1 re-signed by a's partial codeword.
fn recurse(llr: &[f64], frozen: &[bool]) -> (Bits, Bits) {
    if llr.len() == 1 {
        let bit = u8::from(!frozen[0] && llr[0] < 0.0);
        return (vec![bit], vec![bit]);
    }
    let half = llr.len() / 2;
    let (y1, y2) = llr.split_at(half);
    let la: Vec<f64> = y1
        .iter()
        .zip(y2)
        .map(|(&p, &q)| boxplus(p, q, BoxplusMode::Exact, f64::MAX))
        .collect();
    let (mut u, xa) = recurse(&la, &frozen[..half]);
    let lb: Vec<f64> = y1
        .iter()
        .zip(y2)
        .zip(&xa)
        .map(|((&p, &q), &b)| q + if b == 1 { -p } else { p })
        .collect();
    let (ub, xb) = recurse(&lb, &frozen[half..]);
    u.extend(ub);
    let mut x: Bits = xa.iter().zip(&xb).map(|(a, b)| a ^ b).collect();
    x.extend(xb);
    (u, x)
}
