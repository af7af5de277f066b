//! Agglomerative clustering of raw concepts and group bookkeeping.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::distance::{meta_distance, MetaDistanceParams};
use super::embed::Embedding;
use crate::conceptstats::{Completion, FirstSeen};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Linkage {
    #[default]
    Average,
    Complete,
    Single,
}

/// A cluster of raw concepts.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConceptGroup {
    /// Raw concept indices, ordered by first occurrence.
    pub members: Vec<usize>,
    /// Member with the highest count.
    pub representative: usize,
    /// Explanations containing at least one member.
    pub count: u32,
    pub label_counts: Vec<u32>,
    pub first_seen: FirstSeen,
}

/// Bottom-up merging of clusters while the closest pair is within `cut_threshold`.
///
/// `dist` is a dense symmetric `n x n` matrix. Equal distances are resolved by the
/// smallest item index in each cluster, so the result depends only on item order.
pub fn agglomerate(
    n: usize,
    mut dist: Vec<f64>,
    linkage: Linkage,
    cut_threshold: f64,
) -> Vec<Vec<usize>> {
    debug_assert_eq!(dist.len(), n * n);
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    // smallest item index of each cluster; stable tie-break key
    let mut key: Vec<usize> = (0..n).collect();
    let mut nn = vec![usize::MAX; n];
    let mut nn_d = vec![f64::INFINITY; n];

    let closer = |d1: f64, k1: usize, d2: f64, k2: usize| -> bool {
        match d1.partial_cmp(&d2) {
            Some(Ordering::Less) => true,
            Some(Ordering::Equal) => k1 < k2,
            _ => false,
        }
    };
    let refresh = |i: usize,
                   dist: &[f64],
                   active: &[bool],
                   key: &[usize],
                   nn: &mut [usize],
                   nn_d: &mut [f64]| {
        nn[i] = usize::MAX;
        nn_d[i] = f64::INFINITY;
        for j in 0..n {
            if j == i || !active[j] {
                continue;
            }
            let d = dist[i * n + j];
            if nn[i] == usize::MAX || closer(d, key[j], nn_d[i], key[nn[i]]) {
                nn[i] = j;
                nn_d[i] = d;
            }
        }
    };
    for i in 0..n {
        refresh(i, &dist, &active, &key, &mut nn, &mut nn_d);
    }

    let mut remaining = n;
    while remaining > 1 {
        let mut best: Option<(f64, usize, usize, usize)> = None;
        for i in (0..n).filter(|&i| active[i] && nn[i] != usize::MAX) {
            let j = nn[i];
            let (lo, hi) = (key[i].min(key[j]), key[i].max(key[j]));
            let better = match best {
                None => true,
                Some((d, blo, bhi, _)) => match nn_d[i].partial_cmp(&d) {
                    Some(Ordering::Less) => true,
                    Some(Ordering::Equal) => (lo, hi) < (blo, bhi),
                    _ => false,
                },
            };
            if better {
                best = Some((nn_d[i], lo, hi, i));
            }
        }
        let Some((d, _, _, i)) = best else { break };
        if d.is_nan() || d > cut_threshold {
            break;
        }
        let j = nn[i];
        let (a, b) = if key[i] < key[j] { (i, j) } else { (j, i) };
        for k in 0..n {
            if !active[k] || k == a || k == b {
                continue;
            }
            let (dak, dbk) = (dist[a * n + k], dist[b * n + k]);
            let merged = match linkage {
                Linkage::Single => dak.min(dbk),
                Linkage::Complete => dak.max(dbk),
                Linkage::Average => {
                    (size[a] as f64 * dak + size[b] as f64 * dbk) / (size[a] + size[b]) as f64
                }
            };
            dist[a * n + k] = merged;
            dist[k * n + a] = merged;
        }
        active[b] = false;
        size[a] += size[b];
        let moved = core::mem::take(&mut members[b]);
        members[a].extend(moved);
        key[a] = key[a].min(key[b]);
        remaining -= 1;

        refresh(a, &dist, &active, &key, &mut nn, &mut nn_d);
        for k in 0..n {
            if !active[k] || k == a {
                continue;
            }
            if nn[k] == a || nn[k] == b {
                refresh(k, &dist, &active, &key, &mut nn, &mut nn_d);
            } else if closer(dist[k * n + a], key[a], nn_d[k], key[nn[k]]) {
                nn[k] = a;
                nn_d[k] = dist[k * n + a];
            }
        }
    }

    let mut out: Vec<Vec<usize>> = (0..n)
        .filter(|&i| active[i])
        .map(|i| {
            let mut m = core::mem::take(&mut members[i]);
            m.sort_unstable();
            m
        })
        .collect();
    out.sort();
    out
}

/// Clusters the raw concepts of `completion` under the meta-distance.
///
/// `embeddings[i]` is the vector of raw concept `i`.
pub fn cluster(
    completion: &Completion,
    embeddings: &[Embedding],
    params: &MetaDistanceParams,
    linkage: Linkage,
    cut_threshold: f64,
) -> Result<Vec<ConceptGroup>> {
    params.validate()?;
    if cut_threshold.is_nan() {
        return Err(Error::Config("cut_threshold is NaN".into()));
    }
    let concepts = &completion.concepts;
    if embeddings.len() != concepts.len() {
        return Err(Error::DimensionMismatch {
            expected: concepts.len(),
            found: embeddings.len(),
        });
    }
    let n = concepts.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    // canonical order by norm makes the result independent of input order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| concepts[a].norm.cmp(&concepts[b].norm));
    let counts: Vec<Vec<f64>> = concepts
        .iter()
        .map(|c| c.label_counts.iter().map(|&x| f64::from(x)).collect())
        .collect();
    let mut dist = vec![0.0; n * n];
    for a in 0..n {
        for b in a + 1..n {
            let (i, j) = (order[a], order[b]);
            let d = meta_distance(
                (&embeddings[i], &counts[i]),
                (&embeddings[j], &counts[j]),
                params,
            )?;
            dist[a * n + b] = d;
            dist[b * n + a] = d;
        }
    }
    let clusters = agglomerate(n, dist, linkage, cut_threshold)
        .into_iter()
        .map(|c| c.into_iter().map(|p| order[p]).collect())
        .collect();
    Ok(build_groups(completion, clusters))
}

/// Each raw concept in its own group (the grouping ablation).
pub fn singleton_groups(completion: &Completion) -> Vec<ConceptGroup> {
    build_groups(
        completion,
        (0..completion.concepts.len()).map(|i| vec![i]).collect(),
    )
}

/// Computes group counts and representatives, then orders groups by descending count,
/// first occurrence in the corpus, and representative norm.
pub fn build_groups(completion: &Completion, clusters: Vec<Vec<usize>>) -> Vec<ConceptGroup> {
    let concepts = &completion.concepts;
    let num_labels = concepts.first().map_or(0, |c| c.label_counts.len());
    let mut group_of = vec![usize::MAX; concepts.len()];
    for (g, members) in clusters.iter().enumerate() {
        for &m in members {
            group_of[m] = g;
        }
    }
    let mut counts = vec![0u32; clusters.len()];
    let mut label_counts = vec![vec![0u32; num_labels]; clusters.len()];
    for (p, contained) in completion.containment.iter().enumerate() {
        let mut hit: Vec<usize> = contained.iter().map(|&c| group_of[c]).collect();
        hit.sort_unstable();
        hit.dedup();
        for g in hit {
            counts[g] += 1;
            label_counts[g][completion.record_labels[p]] += 1;
        }
    }
    let first_seen: Vec<FirstSeen> = clusters
        .iter()
        .map(|m| {
            m.iter()
                .map(|&c| concepts[c].first_seen)
                .min()
                .unwrap_or((usize::MAX, usize::MAX))
        })
        .collect();

    let order_key = |m: usize| {
        (
            core::cmp::Reverse(concepts[m].count),
            concepts[m].first_seen,
            concepts[m].norm.as_str(),
        )
    };
    let mut groups: Vec<ConceptGroup> = clusters
        .into_iter()
        .enumerate()
        .map(|(g, mut members)| {
            members.sort_by_key(|&m| (concepts[m].first_seen, concepts[m].norm.as_str()));
            let representative = *members
                .iter()
                .min_by_key(|&&m| order_key(m))
                .expect("non-empty cluster");
            ConceptGroup {
                members,
                representative,
                count: counts[g],
                label_counts: core::mem::take(&mut label_counts[g]),
                first_seen: first_seen[g],
            }
        })
        .collect();
    groups.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then(a.first_seen.cmp(&b.first_seen))
            .then_with(|| {
                concepts[a.representative]
                    .norm
                    .cmp(&concepts[b.representative].norm)
            })
    });
    groups
}

/// Drops groups found in fewer than `t` explanations.
pub fn filter_rare(groups: Vec<ConceptGroup>, t: u32) -> Result<Vec<ConceptGroup>> {
    if t < 1 {
        return Err(Error::Config(
            "minimum group count must be at least 1".into(),
        ));
    }
    Ok(groups.into_iter().filter(|g| g.count >= t).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conceptstats::RawConcept;
    use crate::text::MatchMode;
    use alloc::string::ToString;

    fn raw(index: usize, norm: &str, label_counts: Vec<u32>, first: usize) -> RawConcept {
        RawConcept {
            index,
            norm: norm.to_string(),
            display: norm.to_string(),
            count: label_counts.iter().sum(),
            label_counts,
            extracted_count: 1,
            first_seen: (first, 0),
        }
    }

    fn toy() -> (Completion, Vec<Embedding>) {
        let concepts = vec![
            raw(0, "a", vec![1, 0], 0),
            raw(1, "b", vec![1, 0], 1),
            raw(2, "c", vec![0, 1], 2),
        ];
        let completion = Completion {
            concepts,
            containment: vec![vec![0], vec![1], vec![2]],
            record_labels: vec![0, 0, 1],
            match_mode: MatchMode::TokenBoundary,
        };
        let emb = vec![
            Embedding::new(vec![1.0, 0.0]).unwrap(),
            Embedding::new(vec![0.99, 0.141]).unwrap(),
            Embedding::new(vec![0.0, 1.0]).unwrap(),
        ];
        (completion, emb)
    }

    #[test]
    fn cut_extremes() {
        let (c, e) = toy();
        let p = MetaDistanceParams {
            lambda: 0.0,
            ..Default::default()
        };
        assert_eq!(cluster(&c, &e, &p, Linkage::Average, 0.0).unwrap().len(), 3);
        assert_eq!(
            cluster(&c, &e, &p, Linkage::Average, f64::INFINITY)
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn close_pair_merges_and_counts_union() {
        let (c, e) = toy();
        let p = MetaDistanceParams {
            lambda: 0.0,
            ..Default::default()
        };
        let groups = cluster(&c, &e, &p, Linkage::Average, 0.1).unwrap();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].members, vec![0, 1]);
        assert_eq!(groups[0].count, 2);
        assert_eq!(groups[0].label_counts, vec![2, 0]);
        assert_eq!(groups[1].members, vec![2]);
    }

    #[test]
    fn agglomerate_average_linkage_by_hand() {
        // points on a line at 0, 1, 3, 10
        let xs = [0.0f64, 1.0, 3.0, 10.0];
        let n = xs.len();
        let dist: Vec<f64> = (0..n * n).map(|k| (xs[k / n] - xs[k % n]).abs()).collect();
        // {0,1} at 1, then {0,1}-{2} at (3+2)/2 = 2.5, then to 10 at (10+9+7)/3
        assert_eq!(
            agglomerate(n, dist.clone(), Linkage::Average, 2.5),
            vec![vec![0, 1, 2], vec![3]]
        );
        assert_eq!(
            agglomerate(n, dist.clone(), Linkage::Average, 2.49),
            vec![vec![0, 1], vec![2], vec![3]]
        );
        assert_eq!(
            agglomerate(n, dist.clone(), Linkage::Complete, 2.9),
            vec![vec![0, 1], vec![2], vec![3]]
        );
        assert_eq!(
            agglomerate(n, dist.clone(), Linkage::Single, 2.0),
            vec![vec![0, 1, 2], vec![3]]
        );
        assert_eq!(
            agglomerate(n, dist, Linkage::Average, 26.0 / 3.0),
            vec![vec![0, 1, 2, 3]]
        );
    }

    #[test]
    fn filter_rare_threshold() {
        let g = |count| ConceptGroup {
            members: vec![0],
            representative: 0,
            count,
            label_counts: vec![count],
            first_seen: (0, 0),
        };
        let kept = filter_rare(vec![g(5), g(3), g(2)], 3).unwrap();
        assert_eq!(kept.iter().map(|g| g.count).collect::<Vec<_>>(), vec![5, 3]);
        assert_eq!(filter_rare(vec![g(5), g(1)], 1).unwrap().len(), 2);
        assert!(matches!(filter_rare(vec![], 0), Err(Error::Config(_))));
    }
}
