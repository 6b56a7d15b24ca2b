use crate::{Error, Result};

/// `x = u · P_n` over GF(2).
pub fn polar_transform(u: &[u8]) -> Result<Vec<u8>> {
    let mut x = u.to_vec();
    polar_transform_in_place(&mut x)?;
    Ok(x)
}

/// In-place butterfly; `P_n` is its own inverse so this also un-encodes.
pub fn polar_transform_in_place(x: &mut [u8]) -> Result<()> {
    let n = x.len();
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut half = 1;
    while half < n {
        for block in x.chunks_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        half *= 2;
    }
    Ok(())
}

/// Row `position` (1-based) of `P_n`.
pub fn polar_row(n: usize, position: usize) -> Result<Vec<u8>> {
    if position == 0 || position > n {
        return Err(Error::OutOfRange(format!("row {position} of P_{n}")));
    }
    let mut e = vec![0u8; n];
    e[position - 1] = 1;
    polar_transform_in_place(&mut e)?;
    Ok(e)
}
