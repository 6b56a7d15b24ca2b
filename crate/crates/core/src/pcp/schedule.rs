//! Rate and length bookkeeping, in exact rational arithmetic.

use num_traits::{One, Signed, ToPrimitive};

use crate::{Error, Result};

pub type Rational = num_rational::Ratio<i128>;

/// Parses `p/q` or an integer.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::Schedule(format!("cannot parse rational `{text}`"));
    let text = text.trim();
    let value = match text.split_once('/') {
        Some((p, q)) => {
            let p: i128 = p.trim().parse().map_err(|_| bad())?;
            let q: i128 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Rational::new(p, q)
        }
        None => Rational::from_integer(text.parse().map_err(|_| bad())?),
    };
    Ok(value)
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Information size, per-transmission lengths and the rates they induce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateSchedule {
    k: u64,
    lengths: Vec<u64>,
    rates: Vec<Rational>,
}

impl RateSchedule {
    /// Schedule with pinned lengths; `R_i = k / (n_1 + ... + n_i)`.
    pub fn from_lengths(k: u64, lengths: Vec<u64>) -> Result<Self> {
        if lengths.is_empty() || lengths.contains(&0) {
            return Err(Error::Schedule("lengths must be positive".to_string()));
        }
        if k == 0 || k > lengths[0] {
            return Err(Error::Schedule(format!(
                "k = {k} must lie in [1, n_1 = {}]",
                lengths[0]
            )));
        }
        let mut total = 0i128;
        let rates = lengths
            .iter()
            .map(|&n| {
                total += i128::from(n);
                Rational::new(i128::from(k), total)
            })
            .collect();
        Ok(RateSchedule { k, lengths, rates })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Number of levels K.
    pub fn levels(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[u64] {
        &self.lengths
    }

    pub fn rates(&self) -> &[Rational] {
        &self.rates
    }

    /// Length `n_i`, 1-based.
    pub fn length(&self, i: usize) -> u64 {
        self.lengths[i - 1]
    }

    /// Rate `R_j`, 1-based.
    pub fn rate(&self, j: usize) -> Rational {
        self.rates[j - 1]
    }

    /// Effective block length after `i` transmissions.
    pub fn cumulative(&self, i: usize) -> u64 {
        self.lengths[..i].iter().sum()
    }

    /// Checks `R_i * (n_1 + ... + n_i) = k` exactly.
    pub fn check_exact(&self) -> Result<()> {
        for i in 1..=self.levels() {
            let product = self.rate(i) * Rational::from_integer(i128::from(self.cumulative(i)));
            if product != Rational::from_integer(i128::from(self.k)) {
                return Err(Error::condition(
                    "(c.1)",
                    format!("R_{i} * n_bar_{i} = {product} != k = {}", self.k),
                ));
            }
        }
        if self.rates.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::condition("(c.1)", "rates must strictly decrease"));
        }
        Ok(())
    }
}

/// Lengths from rates: `n_i = R_1 (1/R_i - 1/R_{i-1}) n_1`.
pub fn derive_lengths(k: u64, rates: &[Rational], n1: u64) -> Result<RateSchedule> {
    let first = *rates
        .first()
        .ok_or_else(|| Error::Schedule("no rates given".to_string()))?;
    if rates.iter().any(|r| !r.is_positive() || *r > Rational::one()) {
        return Err(Error::Schedule("rates must lie in (0, 1]".to_string()));
    }
    if rates.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Schedule("rates must strictly decrease".to_string()));
    }
    let n1r = Rational::from_integer(i128::from(n1));
    if first * n1r != Rational::from_integer(i128::from(k)) {
        return Err(Error::Schedule(format!(
            "k = {k} differs from n_1 R_1 = {}",
            first * n1r
        )));
    }
    let mut lengths = vec![n1];
    for (i, w) in rates.windows(2).enumerate() {
        let n = first * (w[1].recip() - w[0].recip()) * n1r;
        if !n.is_integer() {
            return Err(Error::Schedule(format!(
                "n_{} = {} is not an integer; adjust n_1 or the rates",
                i + 2,
                format_rational(&n)
            )));
        }
        lengths.push(n.to_integer() as u64);
    }
    let schedule = RateSchedule::from_lengths(k, lengths)?;
    // The other direction: R_i = R_1 / (1 + sum_{j>=2} n_j / n_1).
    for i in 2..=schedule.levels() {
        let tail: Rational = (2..=i)
            .map(|j| Rational::new(i128::from(schedule.length(j)), i128::from(n1)))
            .sum();
        let recomputed = first / (Rational::one() + tail);
        if recomputed != rates[i - 1] || recomputed != schedule.rate(i) {
            return Err(Error::Schedule(format!(
                "rate R_{i} does not round-trip through the lengths"
            )));
        }
    }
    Ok(schedule)
}

/// Outcome of the power-of-two length test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicCheck {
    pub feasible: bool,
    /// `l_j` with `n_j / n_1 = 2^l_j`, for `j = 2..K`, when feasible.
    pub exponents: Vec<i32>,
}

/// Whether `values_1 > values_2 > ...` can be met with `n_j = 2^l_j n_1`,
/// i.e. `v_i = v_1 / (1 + sum_{j=2}^i 2^l_j)`.
pub fn check_dyadic_feasibility(values: &[Rational]) -> DyadicCheck {
    let infeasible = DyadicCheck {
        feasible: false,
        exponents: Vec::new(),
    };
    if values.iter().any(|v| !v.is_positive()) || values.windows(2).any(|w| w[1] >= w[0]) {
        return infeasible;
    }
    let Some(&first) = values.first() else {
        return DyadicCheck {
            feasible: true,
            exponents: Vec::new(),
        };
    };
    let mut exponents = Vec::with_capacity(values.len().saturating_sub(1));
    for w in values.windows(2) {
        let ratio = first * (w[1].recip() - w[0].recip());
        match power_of_two_exponent(&ratio) {
            Some(l) => exponents.push(l),
            None => return infeasible,
        }
    }
    DyadicCheck {
        feasible: true,
        exponents,
    }
}

fn power_of_two_exponent(r: &Rational) -> Option<i32> {
    let (p, q) = (*r.numer(), *r.denom());
    if p <= 0 {
        return None;
    }
    match (p.count_ones(), q.count_ones()) {
        (1, 1) => Some(p.trailing_zeros() as i32 - q.trailing_zeros() as i32),
        _ => None,
    }
}

/// Dyadic schedule from channel capacities: `R_1 = k / n_1`, and each later
/// length is the smallest `n_1 2^l` that brings the rate down to at most
/// `R_1 I(W_i) / I(W_1)`.
pub fn dyadic_schedule_for_capacities(k: u64, n1: u64, capacities: &[f64]) -> Result<RateSchedule> {
    let c1 = *capacities
        .first()
        .ok_or_else(|| Error::Schedule("no channels given".to_string()))?;
    if capacities.iter().any(|&c| c.is_nan() || c <= 0.0) {
        return Err(Error::Schedule("every channel needs positive capacity".to_string()));
    }
    if capacities.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Schedule(
            "capacities must strictly decrease to derive rates".to_string(),
        ));
    }
    let r1 = k as f64 / n1 as f64;
    let min_exp = -(n1.trailing_zeros() as i32);
    let mut lengths = vec![n1];
    let mut total = n1;
    for &c in &capacities[1..] {
        let target = r1 * c / c1;
        let n = (min_exp..=30)
            .map(|l| {
                if l >= 0 {
                    n1 << l
                } else {
                    n1 >> (-l)
                }
            })
            .find(|&n| (k as f64) / ((total + n) as f64) <= target + 1e-12)
            .ok_or_else(|| Error::Schedule(format!("no dyadic length reaches rate {target}")))?;
        lengths.push(n);
        total += n;
    }
    RateSchedule::from_lengths(k, lengths)
}

/// Information-set sizes `a_j^(i)` for every level `i` and rate `j >= i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeTable {
    rows: Vec<Vec<u64>>,
}

impl SizeTable {
    /// `rows[i-1][j-i] = a_j^(i)`.
    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self> {
        let levels = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != levels - i {
                return Err(Error::LengthMismatch {
                    expected: levels - i,
                    actual: row.len(),
                });
            }
        }
        Ok(SizeTable { rows })
    }

    pub fn levels(&self) -> usize {
        self.rows.len()
    }

    /// `a_j^(i)`, 1-based; zero for `j > K`.
    pub fn get(&self, level: usize, rate: usize) -> u64 {
        assert!(rate >= level && level >= 1);
        if rate > self.levels() {
            0
        } else {
            self.rows[level - 1][rate - level]
        }
    }

    /// `q_rate^(level) = a_rate^(level) - a_{rate+1}^(level)`.
    pub fn q(&self, level: usize, rate: usize) -> u64 {
        self.get(level, rate) - self.get(level, rate + 1)
    }

    pub fn level_row(&self, level: usize) -> &[u64] {
        &self.rows[level - 1]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    /// Column sums, column monotonicity and the diagonal identity.
    pub fn check_identities(&self, k: u64) -> Result<()> {
        let levels = self.levels();
        for j in 1..=levels {
            let sum: u64 = (1..=j).map(|i| self.get(i, j)).sum();
            if sum != k {
                return Err(Error::condition(
                    "row-sum identity",
                    format!("sizes for rate R_{j} sum to {sum}, expected k = {k}"),
                ));
            }
        }
        for i in 1..=levels {
            for j in i..levels {
                if self.get(i, j) < self.get(i, j + 1) {
                    return Err(Error::condition(
                        "(c.2)",
                        format!("a_{j}^({i}) < a_{}^({i})", j + 1),
                    ));
                }
            }
        }
        for i in 2..=levels {
            let moved: u64 = (1..i).map(|j| self.q(j, i - 1)).sum();
            if moved != self.get(i, i) {
                return Err(Error::condition(
                    "size chain",
                    format!("a_{i}^({i}) = {} but {moved} bits move to level {i}", self.get(i, i)),
                ));
            }
        }
        Ok(())
    }
}

/// Integer sizes close to `n_i R_j`.
///
/// Each rate row is apportioned by largest remainder so it sums to `k`
/// exactly (ties go to the lower level). Rows are then repaired top-down so
/// no level's sizes increase with `j`: a unit that breaks monotonicity moves
/// to the eligible level with the largest unmet share.
pub fn apportion_sizes(schedule: &RateSchedule) -> Result<SizeTable> {
    let levels = schedule.levels();
    let k = schedule.k();
    let mut columns: Vec<Vec<u64>> = vec![Vec::new(); levels];
    let mut previous: Vec<u64> = Vec::new();
    for j in 1..=levels {
        let rate = schedule.rate(j);
        let shares: Vec<Rational> = (1..=j)
            .map(|i| Rational::from_integer(i128::from(schedule.length(i))) * rate)
            .collect();
        let mut row: Vec<u64> = shares.iter().map(|s| s.floor().to_integer() as u64).collect();
        let assigned: u64 = row.iter().sum();
        let mut order: Vec<usize> = (0..j).collect();
        order.sort_by(|&a, &b| shares[b].fract().cmp(&shares[a].fract()).then(a.cmp(&b)));
        let deficit = k.checked_sub(assigned).ok_or_else(|| {
            Error::Schedule("floored shares exceed k".to_string())
        })?;
        if deficit as usize > j {
            return Err(Error::Schedule(format!("rate row {j} cannot reach k")));
        }
        for &i in order.iter().take(deficit as usize) {
            row[i] += 1;
        }

        // Monotonicity against the previous rate.
        while let Some(over) = (0..j - 1).find(|&i| row[i] > previous[i]) {
            let receiver = (0..j)
                .filter(|&l| l != over && (l == j - 1 || row[l] < previous[l]))
                .max_by(|&a, &b| {
                    let ua = shares[a] - Rational::from_integer(row[a] as i128);
                    let ub = shares[b] - Rational::from_integer(row[b] as i128);
                    ua.cmp(&ub).then(b.cmp(&a))
                })
                .ok_or_else(|| {
                    Error::Schedule(format!("no monotone apportionment for rate row {j}"))
                })?;
            row[over] -= 1;
            row[receiver] += 1;
        }
        for (i, &a) in row.iter().enumerate() {
            columns[i].push(a);
        }
        previous = row;
    }
    let table = SizeTable::from_rows(columns)?;
    for i in 1..=levels {
        if table.get(i, i) > schedule.length(i) {
            return Err(Error::condition(
                "(c.3)",
                format!(
                    "level {i} needs {} information bits on {} coded bits",
                    table.get(i, i),
                    schedule.length(i)
                ),
            ));
        }
    }
    table.check_identities(k)?;
    Ok(table)
}

/// Nearest `f64` of an exact rate.
pub fn rate_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(p: i128, q: i128) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn lengths_from_rates() {
        let s = derive_lengths(192, &[r(3, 4), r(1, 2)], 256).unwrap();
        assert_eq!(s.lengths(), &[256, 128]);
        let s = derive_lengths(192, &[r(3, 4), r(1, 2), r(1, 3)], 256).unwrap();
        assert_eq!(s.lengths(), &[256, 128, 192]);
        let s = derive_lengths(4, &[r(1, 2), r(1, 4)], 8).unwrap();
        assert_eq!(s.lengths(), &[8, 8]);
        s.check_exact().unwrap();
    }

    #[test]
    fn length_errors() {
        assert!(derive_lengths(191, &[r(3, 4), r(1, 2)], 256).is_err());
        // n_2 = (3/4)(3/2 - 4/3) * 4 = 1/2
        assert!(derive_lengths(3, &[r(3, 4), r(2, 3)], 4).is_err());
        assert!(derive_lengths(4, &[r(1, 4), r(1, 2)], 16).is_err());
    }

    #[test]
    fn dyadic_checker() {
        let ok = check_dyadic_feasibility(&[r(4, 5), r(2, 5), r(1, 5)]);
        assert!(ok.feasible);
        assert_eq!(ok.exponents, vec![0, 1]);
        assert!(!check_dyadic_feasibility(&[r(3, 4), r(1, 2), r(1, 3)]).feasible);
        let single = check_dyadic_feasibility(&[r(1, 2)]);
        assert!(single.feasible && single.exponents.is_empty());
        assert_eq!(check_dyadic_feasibility(&[r(1, 2), r(1, 3)]).exponents, vec![-1]);
    }

    #[test]
    fn dyadic_schedule_from_capacities() {
        let s = dyadic_schedule_for_capacities(4, 8, &[0.7, 0.4]).unwrap();
        assert_eq!(s.lengths(), &[8, 8]);
        assert_eq!(s.rates(), &[r(1, 2), r(1, 4)]);
    }

    #[test]
    fn three_level_apportionment() {
        let s = RateSchedule::from_lengths(192, vec![256, 128, 195]).unwrap();
        assert_eq!(s.rate(3), r(192, 579));
        let a = apportion_sizes(&s).unwrap();
        assert_eq!(a.rows(), &[vec![192, 128, 85], vec![64, 42], vec![65]]);
        assert_eq!(a.q(1, 1), 64);
        assert_eq!(a.q(1, 2), 43);
        assert_eq!(a.q(2, 2), 22);
    }

    #[test]
    fn integral_apportionment() {
        let s = RateSchedule::from_lengths(4, vec![8, 8]).unwrap();
        let a = apportion_sizes(&s).unwrap();
        assert_eq!((a.get(1, 1), a.get(1, 2), a.get(2, 2)), (4, 2, 2));
        let one = apportion_sizes(&RateSchedule::from_lengths(5, vec![8]).unwrap()).unwrap();
        assert_eq!(one.rows(), &[vec![5]]);
    }

    #[test]
    fn rational_text() {
        assert_eq!(parse_rational("3/4").unwrap(), r(3, 4));
        assert_eq!(parse_rational(" 6/8 ").unwrap(), r(3, 4));
        assert_eq!(parse_rational("1").unwrap(), r(1, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert_eq!(format_rational(&r(192, 579)), "64/193");
    }

    proptest! {
        #[test]
        fn apportionment_identities(k in 1u64..200, extra in proptest::collection::vec(1u64..300, 0..4), n1_pad in 0u64..100) {
            let n1 = k + n1_pad;
            let mut lengths = vec![n1];
            lengths.extend(extra.iter().copied());
            let s = RateSchedule::from_lengths(k, lengths).unwrap();
            if let Ok(a) = apportion_sizes(&s) {
                a.check_identities(k).unwrap();
                for i in 1..=s.levels() {
                    for j in i..=s.levels() {
                        let share = rate_to_f64(&s.rate(j)) * s.length(i) as f64;
                        prop_assert!((a.get(i, j) as f64 - share).abs() < s.levels() as f64 + 1.0);
                    }
                }
            }
        }
    }
}
