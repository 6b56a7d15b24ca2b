//! CSV output.

use std::io::Write;

use super::SweepResult;
use crate::Result;

pub const CSV_HEADER: [&str; 9] = [
    "param",
    "rate_index",
    "rate",
    "trials",
    "block_errors",
    "bit_errors",
    "mean_tx",
    "throughput",
    "stderr",
];

/// One row per (point, rate), LF-terminated.
pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for point in &result.points {
        for row in &point.rows {
            w.write_record([
                point.param.to_string(),
                row.rate_index.to_string(),
                row.rate().to_string(),
                row.trials.to_string(),
                row.block_errors.to_string(),
                row.bit_errors.to_string(),
                row.mean_tx().to_string(),
                row.throughput().to_string(),
                row.stderr().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{RateRow, SweepKind, SweepPoint};

    #[test]
    fn csv_layout() {
        let result = SweepResult {
            kind: SweepKind::Bec,
            points: vec![SweepPoint {
                param: 0.5,
                rows: vec![RateRow {
                    rate_index: 1,
                    k: 4,
                    rate_bits: 0.5f64.to_bits(),
                    trials: 4,
                    block_errors: 1,
                    bit_errors: 2,
                    transmissions: 6,
                    stop_counts: vec![2, 2],
                }],
            }],
        };
        let mut buf = Vec::new();
        write_csv(&result, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "param,rate_index,rate,trials,block_errors,bit_errors,mean_tx,throughput,stderr\n\
             0.5,1,0.5,4,1,2,1.5,0.375,0.21650635094610965\n"
        );
    }
}
