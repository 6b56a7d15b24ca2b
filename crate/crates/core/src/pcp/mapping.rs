//! Local-to-global bit mappings.

use super::schedule::SizeTable;
use crate::{Error, Result};

/// Maps local information positions of one level (1-based, in stacked row
/// order) to global message indices (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMapping {
    level: usize,
    table: Vec<usize>,
}

impl BitMapping {
    pub fn new(level: usize, table: Vec<usize>) -> Self {
        BitMapping { level, table }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Global index of local position `local` (1-based).
    pub fn global(&self, local: usize) -> usize {
        self.table[local - 1]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// Globals at local positions `from..=to`.
    fn block(&self, from: usize, to: usize) -> &[usize] {
        &self.table[from - 1..to]
    }
}

/// Builds every level's mapping.
///
/// Level 1 is the identity on `1..=k`. Level `i + 1` lists, for `j = 1..=i`
/// in turn, the globals level `j` stops carrying between rates `R_i` and
/// `R_{i+1}`, i.e. its local positions `a_{i+1}^(j) + 1 ..= a_i^(j)`.
pub fn build_bit_mappings(sizes: &SizeTable, k: usize) -> Result<Vec<BitMapping>> {
    let levels = sizes.levels();
    if levels == 0 {
        return Ok(Vec::new());
    }
    if sizes.get(1, 1) as usize != k {
        return Err(Error::condition(
            "row-sum identity",
            format!("a_1^(1) = {} differs from k = {k}", sizes.get(1, 1)),
        ));
    }
    let mut maps = vec![BitMapping::new(1, (1..=k).collect())];
    for i in 1..levels {
        let mut table = Vec::with_capacity(sizes.get(i + 1, i + 1) as usize);
        for (j, map) in maps.iter().enumerate() {
            let j = j + 1;
            let from = sizes.get(j, i + 1) as usize + 1;
            let to = sizes.get(j, i) as usize;
            if from <= to {
                table.extend_from_slice(map.block(from, to));
            }
        }
        if table.len() != sizes.get(i + 1, i + 1) as usize {
            return Err(Error::condition(
                "size chain",
                format!(
                    "level {} receives {} bits but holds {}",
                    i + 1,
                    table.len(),
                    sizes.get(i + 1, i + 1)
                ),
            ));
        }
        maps.push(BitMapping::new(i + 1, table));
    }
    Ok(maps)
}

/// Checks that for each rate `R_m` the active positions of levels `1..=m`
/// cover every global index exactly once.
pub fn check_partition(maps: &[BitMapping], sizes: &SizeTable, k: usize) -> Result<()> {
    for m in 1..=maps.len() {
        let mut seen = vec![false; k];
        for map in &maps[..m] {
            let active = sizes.get(map.level(), m) as usize;
            for &g in &map.table()[..active] {
                if g == 0 || g > k || std::mem::replace(&mut seen[g - 1], true) {
                    return Err(Error::condition(
                        "mapping partition",
                        format!("global bit {g} is not covered exactly once at rate R_{m}"),
                    ));
                }
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::condition(
                "mapping partition",
                format!("global bit {} is not carried at rate R_{m}", missing + 1),
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcp::schedule::{apportion_sizes, RateSchedule};

    #[test]
    fn two_levels() {
        let sizes = SizeTable::from_rows(vec![vec![4, 2], vec![2]]).unwrap();
        let maps = build_bit_mappings(&sizes, 4).unwrap();
        assert_eq!(maps[0].table(), &[1, 2, 3, 4]);
        assert_eq!(maps[1].table(), &[3, 4]);
        check_partition(&maps, &sizes, 4).unwrap();
    }

    #[test]
    fn three_level_mappings() {
        let s = RateSchedule::from_lengths(192, vec![256, 128, 195]).unwrap();
        let sizes = apportion_sizes(&s).unwrap();
        let maps = build_bit_mappings(&sizes, 192).unwrap();
        assert_eq!(maps[1].table(), (129..=192).collect::<Vec<_>>().as_slice());
        let third: Vec<usize> = (86..=128).chain(171..=192).collect();
        assert_eq!(maps[2].table(), third.as_slice());
        assert_eq!(maps[2].global(44), 171);
        check_partition(&maps, &sizes, 192).unwrap();
    }

    #[test]
    fn broken_partition_detected() {
        let sizes = SizeTable::from_rows(vec![vec![4, 2], vec![2]]).unwrap();
        let maps = vec![
            BitMapping::new(1, vec![1, 2, 3, 4]),
            BitMapping::new(2, vec![2, 4]),
        ];
        assert!(check_partition(&maps, &sizes, 4).is_err());
    }
}
