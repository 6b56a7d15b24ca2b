//! Successive-cancellation decoding.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::InformationSet;
use crate::{Error, Result};

/// Check-node arithmetic used by the decoder.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateRule {
    /// `2 atanh(tanh(a/2) tanh(b/2))`
    #[default]
    Exact,
    MinSum,
}

#[inline]
pub fn check_node(a: f64, b: f64, rule: UpdateRule) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    let m = a.abs().min(b.abs());
    match rule {
        UpdateRule::MinSum => sign * m,
        // Jacobian form of the tanh rule; stable for large magnitudes.
        UpdateRule::Exact => {
            sign * m + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
        }
    }
}

/// Reusable SC decoder for one block length.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    n: usize,
    rule: UpdateRule,
    arena: Vec<f64>,
    codeword: Vec<u8>,
}

impl ScDecoder {
    pub fn new(n: usize, rule: UpdateRule) -> Result<Self> {
        if !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        Ok(ScDecoder {
            n,
            rule,
            arena: vec![0.0; 2 * n],
            codeword: vec![0; n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Runs the SC schedule. `decide(j, llr)` is called once per position in
    /// natural order (0-based `j`) and returns the bit to feed back. Returns
    /// the re-encoded codeword estimate.
    pub fn run<F: FnMut(usize, f64) -> u8>(&mut self, llrs: &[f64], mut decide: F) -> &[u8] {
        assert_eq!(llrs.len(), self.n, "LLR block length");
        let n = self.n;
        self.arena[n..].copy_from_slice(llrs);
        node(
            &mut self.arena,
            n,
            0,
            &mut self.codeword,
            self.rule,
            &mut decide,
        );
        &self.codeword
    }

    /// Decodes with per-position roles: `Some(v)` freezes the position to
    /// `v`, `None` makes it an information position. Ties decide 0.
    pub fn decode(&mut self, llrs: &[f64], roles: &[Option<u8>]) -> ScOutput {
        assert_eq!(roles.len(), self.n, "role table length");
        let mut u = vec![0u8; self.n];
        let mut ambiguous = 0;
        let codeword = self
            .run(llrs, |j, llr| {
                let bit = match roles[j] {
                    Some(v) => v & 1,
                    None => {
                        if llr == 0.0 {
                            ambiguous += 1;
                        }
                        u8::from(llr < 0.0)
                    }
                };
                u[j] = bit;
                bit
            })
            .to_vec();
        let info_bits = roles
            .iter()
            .zip(&u)
            .filter(|(r, _)| r.is_none())
            .map(|(_, &b)| b)
            .collect();
        ScOutput {
            u,
            info_bits,
            codeword,
            ambiguous,
        }
    }
}

/// One subtree of size `s`. Its input LLRs sit in `arena[s..2s]`; children
/// of size `s/2` receive theirs in `arena[s/2..s]`.
fn node<F: FnMut(usize, f64) -> u8>(
    arena: &mut [f64],
    s: usize,
    offset: usize,
    out: &mut [u8],
    rule: UpdateRule,
    decide: &mut F,
) {
    if s == 1 {
        out[0] = decide(offset, arena[1]);
        return;
    }
    let h = s / 2;
    {
        let (lower, upper) = arena.split_at_mut(s);
        let input = &upper[..s];
        for t in 0..h {
            lower[h + t] = check_node(input[t], input[t + h], rule);
        }
    }
    node(arena, h, offset, &mut out[..h], rule, decide);
    {
        let (lower, upper) = arena.split_at_mut(s);
        let input = &upper[..s];
        for t in 0..h {
            let a = input[t];
            lower[h + t] = input[t + h] + if out[t] == 0 { a } else { -a };
        }
    }
    node(arena, h, offset + h, &mut out[h..], rule, decide);
    let (lo, hi) = out.split_at_mut(h);
    for (a, b) in lo.iter_mut().zip(hi.iter()) {
        *a ^= *b;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScOutput {
    /// Decisions at every position (frozen positions carry their values).
    pub u: Vec<u8>,
    /// Decisions at information positions, ascending position order.
    pub info_bits: Vec<u8>,
    /// `u · P_n`.
    pub codeword: Vec<u8>,
    /// Information decisions taken on a zero LLR.
    pub ambiguous: usize,
}

/// SC decoding with an explicit frozen map (1-based positions to values).
///
/// Frozen and information positions must partition `[1, n]`.
pub fn sc_decode(
    llrs: &[f64],
    frozen: &BTreeMap<usize, u8>,
    info: &InformationSet,
    rule: UpdateRule,
) -> Result<ScOutput> {
    let n = llrs.len();
    if info.n_u() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: info.n_u(),
        });
    }
    if llrs.iter().any(|l| !l.is_finite()) {
        return Err(Error::OutOfRange("LLRs must be finite".to_string()));
    }
    let mut roles: Vec<Option<Option<u8>>> = vec![None; n];
    for (&p, &v) in frozen {
        if p == 0 || p > n {
            return Err(Error::Partition {
                n,
                detail: format!("frozen position {p} out of range"),
            });
        }
        roles[p - 1] = Some(Some(v & 1));
    }
    for &p in info.indices() {
        if roles[p - 1].is_some() {
            return Err(Error::Partition {
                n,
                detail: format!("position {p} is both frozen and information"),
            });
        }
        roles[p - 1] = Some(None);
    }
    let roles: Vec<Option<u8>> = roles
        .into_iter()
        .enumerate()
        .map(|(j, r)| {
            r.ok_or_else(|| Error::Partition {
                n,
                detail: format!("position {} is unassigned", j + 1),
            })
        })
        .collect::<Result<_>>()?;
    let mut decoder = ScDecoder::new(n, rule)?;
    Ok(decoder.decode(llrs, &roles))
}
