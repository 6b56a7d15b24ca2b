use super::polar_transform_in_place;
use crate::channel::ChannelModel;
use crate::puncture::PuncturePattern;
use crate::{Error, Result};

const MAX_LENGTH: usize = 8;

/// Bhattacharyya parameter of bit-channel `j` (1-based) by exhaustive
/// enumeration of inputs and received words.
///
/// Punctured outputs are marginalised away, so only transmitted positions
/// contribute to the likelihood.
pub fn brute_force_bit_channel(
    channel: &ChannelModel,
    n_u: usize,
    pattern: Option<&PuncturePattern>,
    j: usize,
) -> Result<f64> {
    let law = channel.finite_law().ok_or_else(|| {
        Error::Unsupported(format!("{channel} has a continuous output alphabet"))
    })?;
    if !n_u.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n_u));
    }
    if n_u > MAX_LENGTH {
        return Err(Error::SizeLimit(format!(
            "enumeration limited to n_u <= {MAX_LENGTH}"
        )));
    }
    if j == 0 || j > n_u {
        return Err(Error::OutOfRange(format!("bit-channel {j} of {n_u}")));
    }
    let transmitted: Vec<usize> = match pattern {
        Some(p) if p.n_u() != n_u => {
            return Err(Error::LengthMismatch {
                expected: n_u,
                actual: p.n_u(),
            })
        }
        Some(p) => (0..n_u).filter(|&t| p.bits()[t]).collect(),
        None => (0..n_u).collect(),
    };

    // Codeword for every input word; bit t of the index is u_{t+1}.
    let inputs = 1usize << n_u;
    let codewords: Vec<Vec<u8>> = (0..inputs)
        .map(|word| {
            let mut x: Vec<u8> = (0..n_u).map(|t| ((word >> t) & 1) as u8).collect();
            polar_transform_in_place(&mut x).expect("power of two");
            x
        })
        .collect();

    let prefix_mask = (1usize << (j - 1)) - 1;
    let scale = 1.0 / (1u64 << (n_u - 1)) as f64;
    let alphabet = law.len();
    let n = transmitted.len();
    let mut symbols = vec![0usize; n];
    let mut given_zero = vec![0.0; 1 << (j - 1)];
    let mut given_one = vec![0.0; 1 << (j - 1)];
    let mut z = 0.0;

    loop {
        given_zero.iter_mut().for_each(|v| *v = 0.0);
        given_one.iter_mut().for_each(|v| *v = 0.0);
        for (word, x) in codewords.iter().enumerate() {
            let likelihood: f64 = transmitted
                .iter()
                .zip(&symbols)
                .map(|(&t, &y)| if x[t] == 0 { law[y].1 } else { law[y].2 })
                .product();
            if likelihood == 0.0 {
                continue;
            }
            let prefix = word & prefix_mask;
            if (word >> (j - 1)) & 1 == 0 {
                given_zero[prefix] += likelihood;
            } else {
                given_one[prefix] += likelihood;
            }
        }
        z += given_zero
            .iter()
            .zip(&given_one)
            .map(|(a, b)| (a * scale * b * scale).sqrt())
            .sum::<f64>();

        // Odometer over received words.
        let mut t = 0;
        while t < n {
            symbols[t] += 1;
            if symbols[t] < alphabet {
                break;
            }
            symbols[t] = 0;
            t += 1;
        }
        if t == n {
            break;
        }
    }
    Ok(z)
}
