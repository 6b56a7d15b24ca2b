use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::ReliabilityProfile;
use crate::{Error, Result};

/// Sorted, duplicate-free 1-based positions within a length-`n_u` code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSet", into = "RawSet")]
pub struct InformationSet {
    n_u: usize,
    indices: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawSet {
    n_u: usize,
    indices: Vec<usize>,
}

impl TryFrom<RawSet> for InformationSet {
    type Error = Error;
    fn try_from(raw: RawSet) -> Result<Self> {
        InformationSet::new(raw.n_u, raw.indices)
    }
}

impl From<InformationSet> for RawSet {
    fn from(set: InformationSet) -> Self {
        RawSet {
            n_u: set.n_u,
            indices: set.indices,
        }
    }
}

impl InformationSet {
    /// `indices` must already be strictly increasing and within `[1, n_u]`.
    pub fn new(n_u: usize, indices: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > n_u) {
            return Err(Error::OutOfRange(format!("index {bad} outside [1, {n_u}]")));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::OutOfRange(
                "indices must be strictly increasing".to_string(),
            ));
        }
        Ok(InformationSet { n_u, indices })
    }

    pub fn from_unsorted(n_u: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        Self::new(n_u, indices)
    }

    pub fn full(n_u: usize) -> Self {
        InformationSet {
            n_u,
            indices: (1..=n_u).collect(),
        }
    }

    pub fn n_u(&self) -> usize {
        self.n_u
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, position: usize) -> bool {
        self.indices.binary_search(&position).is_ok()
    }

    pub fn is_subset(&self, other: &InformationSet) -> bool {
        self.n_u == other.n_u && self.indices.iter().all(|&i| other.contains(i))
    }

    /// Positions of `self` that are not in `other`, ascending.
    pub fn difference(&self, other: &InformationSet) -> Vec<usize> {
        self.indices
            .iter()
            .copied()
            .filter(|&i| !other.contains(i))
            .collect()
    }

    /// `mask[p - 1]` is true for every member `p`.
    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n_u];
        for &i in &self.indices {
            mask[i - 1] = true;
        }
        mask
    }
}

/// Information sets ordered from largest to smallest, each containing the
/// next.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NestedSetFamily {
    n_u: usize,
    sets: Vec<InformationSet>,
}

impl NestedSetFamily {
    pub fn new(sets: Vec<InformationSet>) -> Result<Self> {
        let n_u = sets.first().map_or(0, InformationSet::n_u);
        if sets.iter().any(|s| s.n_u() != n_u) {
            return Err(Error::condition("(c.2)", "sets over different lengths"));
        }
        for (t, pair) in sets.windows(2).enumerate() {
            if !pair[1].is_subset(&pair[0]) {
                return Err(Error::condition(
                    "(c.2)",
                    format!("set {} is not contained in set {}", t + 2, t + 1),
                ));
            }
        }
        Ok(NestedSetFamily { n_u, sets })
    }

    pub fn n_u(&self) -> usize {
        self.n_u
    }

    pub fn sets(&self) -> &[InformationSet] {
        &self.sets
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.sets.iter().map(InformationSet::len).collect()
    }
}

/// Positions ordered most reliable first; equal metrics prefer the larger
/// index.
pub(crate) fn reliability_order(profile: &ReliabilityProfile) -> Vec<usize> {
    let metric = profile.metric();
    let larger_better = profile.kind().larger_is_better();
    let mut order: Vec<usize> = (0..metric.len()).collect();
    order.sort_by(|&a, &b| {
        let by_metric = if larger_better {
            metric[b].total_cmp(&metric[a])
        } else {
            metric[a].total_cmp(&metric[b])
        };
        match by_metric {
            Ordering::Equal => b.cmp(&a),
            other => other,
        }
    });
    order.into_iter().map(|i| i + 1).collect()
}

/// The `size` most reliable positions under `profile`.
pub fn select_information_set(profile: &ReliabilityProfile, size: usize) -> Result<InformationSet> {
    let n_u = profile.n_u();
    if size > n_u {
        return Err(Error::OutOfRange(format!(
            "information set of size {size} in a length-{n_u} code"
        )));
    }
    let chosen = reliability_order(profile).into_iter().take(size).collect();
    InformationSet::from_unsorted(n_u, chosen)
}

/// Builds a nested chain, smallest set first.
///
/// `profiles[t]` describes the channel for rate `t` (best channel first) and
/// `sizes[t]` is the target size of its set. The smallest set is chosen from
/// the worst channel's profile; each larger set keeps the previous one and
/// adds the best remaining positions under its own channel's profile.
pub fn nested_information_sets(
    profiles: &[ReliabilityProfile],
    sizes: &[usize],
) -> Result<NestedSetFamily> {
    if profiles.len() != sizes.len() || profiles.is_empty() {
        return Err(Error::LengthMismatch {
            expected: profiles.len(),
            actual: sizes.len(),
        });
    }
    let n_u = profiles[0].n_u();
    if let Some(bad) = profiles.iter().find(|p| p.n_u() != n_u) {
        return Err(Error::LengthMismatch {
            expected: n_u,
            actual: bad.n_u(),
        });
    }
    if sizes.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::OutOfRange(format!(
            "set sizes {sizes:?} must be non-increasing"
        )));
    }
    if sizes[0] > n_u {
        return Err(Error::OutOfRange(format!(
            "set size {} exceeds length {n_u}",
            sizes[0]
        )));
    }

    let mut chosen = vec![false; n_u];
    let mut sets = Vec::with_capacity(sizes.len());
    let mut count = 0;
    for (profile, &size) in profiles.iter().zip(sizes).rev() {
        for position in reliability_order(profile) {
            if count == size {
                break;
            }
            if !chosen[position - 1] {
                chosen[position - 1] = true;
                count += 1;
            }
        }
        let indices = (1..=n_u).filter(|&p| chosen[p - 1]).collect();
        sets.push(InformationSet::new(n_u, indices)?);
    }
    sets.reverse();
    NestedSetFamily::new(sets)
}
