//! Hex text form for bit sequences.
//!
//! Bits are packed most-significant-bit first into nibbles; the final nibble
//! is zero-padded on the right. The bit count travels separately because the
//! padding makes it ambiguous.

use crate::{Error, Result};

pub fn to_hex(bits: &[u8]) -> String {
    bits.chunks(4)
        .map(|chunk| {
            let nibble = chunk
                .iter()
                .enumerate()
                .fold(0u32, |acc, (t, &b)| acc | (u32::from(b & 1) << (3 - t)));
            char::from_digit(nibble, 16).expect("nibble < 16")
        })
        .collect()
}

pub fn from_hex(text: &str, len: usize) -> Result<Vec<u8>> {
    let text = text.trim();
    let text = text
        .strip_prefix("0x")
        .or_else(|| text.strip_prefix("0X"))
        .unwrap_or(text);
    let digits = len.div_ceil(4);
    if text.len() != digits {
        return Err(Error::Hex(format!(
            "`{text}` has {} digits, {len} bits need {digits}",
            text.len()
        )));
    }
    let mut bits = Vec::with_capacity(digits * 4);
    for c in text.chars() {
        let nibble = c
            .to_digit(16)
            .ok_or_else(|| Error::Hex(format!("`{c}` is not a hex digit")))?;
        for t in (0..4).rev() {
            bits.push(((nibble >> t) & 1) as u8);
        }
    }
    if bits[len..].iter().any(|&b| b != 0) {
        return Err(Error::Hex(format!("padding bits beyond {len} are not zero")));
    }
    bits.truncate(len);
    Ok(bits)
}
