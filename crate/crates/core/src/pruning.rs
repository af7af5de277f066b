//! Greedy mutual-information pruning of grouped concepts.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Gains at or below this are treated as zero, and candidates within it as tied.
pub const GAIN_EPS: f64 = 1e-12;
/// Largest table `brute_force_best` will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Binary concept presence per record, with record labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresenceTable {
    rows: Vec<Vec<bool>>,
    labels: Vec<usize>,
    num_concepts: usize,
}

impl PresenceTable {
    pub fn new(rows: Vec<Vec<bool>>, labels: Vec<usize>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                found: labels.len(),
            });
        }
        let num_concepts = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != num_concepts) {
            return Err(Error::DimensionMismatch {
                expected: num_concepts,
                found: bad.len(),
            });
        }
        Ok(Self {
            rows,
            labels,
            num_concepts,
        })
    }

    /// Table over grouped concepts: record `p` has group `g` when it contains any member.
    pub fn from_containment(
        containment: &[Vec<usize>],
        record_labels: &[usize],
        groups: &[Vec<usize>],
        num_raw: usize,
    ) -> Result<Self> {
        let mut group_of = vec![usize::MAX; num_raw];
        for (g, members) in groups.iter().enumerate() {
            for &m in members {
                group_of[m] = g;
            }
        }
        let rows = containment
            .iter()
            .map(|contained| {
                let mut row = vec![false; groups.len()];
                for &c in contained {
                    if let Some(slot) = group_of.get(c).and_then(|&g| row.get_mut(g)) {
                        *slot = true;
                    }
                }
                row
            })
            .collect();
        Self::new(rows, record_labels.to_vec())
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_concepts(&self) -> usize {
        self.num_concepts
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn distinct_labels(&self) -> usize {
        let mut l = self.labels.clone();
        l.sort_unstable();
        l.dedup();
        l.len()
    }
}

/// Partition of the records by their configuration over a concept subset.
#[derive(Debug, Clone)]
struct Partition {
    cell: Vec<usize>,
    cells: usize,
}

impl Partition {
    fn trivial(n: usize) -> Self {
        Self {
            cell: vec![0; n],
            cells: usize::from(n > 0),
        }
    }

    fn refine(&self, table: &PresenceTable, column: usize) -> Self {
        let mut ids = BTreeMap::new();
        let cell = self
            .cell
            .iter()
            .zip(&table.rows)
            .map(|(&c, row)| {
                let key = c * 2 + usize::from(row[column]);
                let next = ids.len();
                *ids.entry(key).or_insert(next)
            })
            .collect();
        Self {
            cell,
            cells: ids.len(),
        }
    }

    fn mutual_information(&self, labels: &[usize]) -> f64 {
        let n = labels.len();
        if n == 0 {
            return 0.0;
        }
        let num_labels = labels.iter().max().map_or(0, |m| m + 1);
        let mut joint = vec![0usize; self.cells * num_labels];
        let mut px = vec![0usize; self.cells];
        let mut py = vec![0usize; num_labels];
        for (&c, &y) in self.cell.iter().zip(labels) {
            joint[c * num_labels + y] += 1;
            px[c] += 1;
            py[y] += 1;
        }
        let nf = n as f64;
        let mut mi = 0.0;
        for c in 0..self.cells {
            for y in 0..num_labels {
                let nxy = joint[c * num_labels + y];
                if nxy > 0 {
                    let ratio = (nxy as f64 * nf) / (px[c] as f64 * py[y] as f64);
                    mi += nxy as f64 / nf * libm::log2(ratio);
                }
            }
        }
        mi.max(0.0)
    }
}

/// Plug-in mutual information in bits between the label and the joint configuration
/// of the `subset` columns.
pub fn mutual_information(table: &PresenceTable, subset: &[usize]) -> Result<f64> {
    if table.is_empty() {
        return Err(Error::Domain("mutual information of an empty table".into()));
    }
    if let Some(&bad) = subset.iter().find(|&&j| j >= table.num_concepts) {
        return Err(Error::Domain(alloc::format!(
            "concept {bad} out of range for {} columns",
            table.num_concepts
        )));
    }
    let mut part = Partition::trivial(table.len());
    for &j in subset {
        part = part.refine(table, j);
    }
    Ok(part.mutual_information(&table.labels))
}

/// Plug-in label entropy in bits.
pub fn label_entropy(table: &PresenceTable) -> f64 {
    Partition {
        cell: (0..table.len()).collect(),
        cells: table.len(),
    }
    .mutual_information(&table.labels)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PruneResult {
    /// Concept indices in the order they were selected.
    pub selected: Vec<usize>,
    /// MI gain of each selection step.
    pub gains: Vec<f64>,
    pub mi_full: f64,
    pub mi_selected: f64,
    pub gamma: f64,
    /// `gamma * mi_full - mi_selected` when selection stalled before the target, else 0.
    pub shortfall: f64,
}

impl PruneResult {
    pub fn reached_target(&self) -> bool {
        self.shortfall == 0.0
    }

    /// Cumulative MI after each step.
    pub fn cumulative(&self) -> Vec<f64> {
        self.gains
            .iter()
            .scan(0.0, |acc, g| {
                *acc += g;
                Some(*acc)
            })
            .collect()
    }
}

/// Adds concepts one at a time, each time the one with the largest MI gain, until the
/// selection carries at least `gamma` of the full table's MI.
pub fn greedy_prune(table: &PresenceTable, gamma: f64) -> Result<PruneResult> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::Config(alloc::format!(
            "gamma must lie in (0, 1], got {gamma}"
        )));
    }
    if table.is_empty() {
        return Err(Error::Domain("cannot prune an empty table".into()));
    }
    if table.distinct_labels() < 2 {
        return Err(Error::DegenerateTask(
            "fewer than two labels present".into(),
        ));
    }
    let all: Vec<usize> = (0..table.num_concepts).collect();
    let mi_full = mutual_information(table, &all)?;
    let target = gamma * mi_full - GAIN_EPS;

    let mut part = Partition::trivial(table.len());
    let mut current = 0.0;
    let mut selected = Vec::new();
    let mut gains = Vec::new();
    let mut used = vec![false; table.num_concepts];
    let mut shortfall = 0.0;
    while current < target {
        let mut best: Option<(usize, f64, Partition)> = None;
        for j in (0..table.num_concepts).filter(|&j| !used[j]) {
            let cand = part.refine(table, j);
            let mi = cand.mutual_information(&table.labels);
            if best.as_ref().is_none_or(|(_, b, _)| mi > b + GAIN_EPS) {
                best = Some((j, mi, cand));
            }
        }
        match best {
            Some((j, mi, cand)) if mi - current > GAIN_EPS => {
                used[j] = true;
                selected.push(j);
                gains.push(mi - current);
                current = mi;
                part = cand;
            }
            _ => {
                shortfall = (gamma * mi_full - current).max(0.0);
                break;
            }
        }
    }
    Ok(PruneResult {
        selected,
        gains,
        mi_full,
        mi_selected: current,
        gamma,
        shortfall,
    })
}

/// Greedy selection order for up to `max_k` concepts, continuing through zero gains.
/// Each entry is (concept, MI of the selection so far).
pub fn greedy_path(table: &PresenceTable, max_k: usize) -> Result<Vec<(usize, f64)>> {
    if table.is_empty() {
        return Err(Error::Domain("cannot prune an empty table".into()));
    }
    let mut part = Partition::trivial(table.len());
    let mut used = vec![false; table.num_concepts];
    let mut path = Vec::new();
    while path.len() < max_k.min(table.num_concepts) {
        let mut best: Option<(usize, f64, Partition)> = None;
        for j in (0..table.num_concepts).filter(|&j| !used[j]) {
            let cand = part.refine(table, j);
            let mi = cand.mutual_information(&table.labels);
            if best.as_ref().is_none_or(|(_, b, _)| mi > b + GAIN_EPS) {
                best = Some((j, mi, cand));
            }
        }
        let (j, mi, cand) = best.expect("an unused concept remains");
        used[j] = true;
        path.push((j, mi));
        part = cand;
    }
    Ok(path)
}

/// Exhaustive search for the size-`k` subset with the highest MI. Ties keep the
/// lexicographically first subset.
pub fn brute_force_best(table: &PresenceTable, k: usize) -> Result<(Vec<usize>, f64)> {
    let j = table.num_concepts;
    if j > BRUTE_FORCE_LIMIT {
        return Err(Error::GuardExceeded {
            concepts: j,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if k > j {
        return Err(Error::Domain(alloc::format!(
            "subset size {k} exceeds {j} concepts"
        )));
    }
    if k == 0 {
        return Ok((Vec::new(), 0.0));
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        let mi = mutual_information(table, &subset)?;
        if best.as_ref().is_none_or(|(_, b)| mi > b + GAIN_EPS) {
            best = Some((subset.clone(), mi));
        }
        // next combination in lexicographic order
        let Some(i) = (0..k).rev().find(|&i| subset[i] < j - k + i) else {
            break;
        };
        subset[i] += 1;
        for t in i + 1..k {
            subset[t] = subset[t - 1] + 1;
        }
    }
    Ok(best.expect("at least one subset"))
}
