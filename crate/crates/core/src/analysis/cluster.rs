use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{PfsdmError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterScores {
    /// Leave-one-out nearest-medoid classification accuracy.
    pub accuracy: f64,
    pub silhouette: f64,
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Member of `members` with the smallest summed distance to the others; ties
/// go to the earliest index.
fn medoid(members: &[usize], dist: impl Fn(usize, usize) -> f64) -> usize {
    let mut best = (f64::INFINITY, members[0]);
    for &i in members {
        let s: f64 = members.iter().map(|&j| dist(i, j)).sum();
        if s < best.0 {
            best = (s, i);
        }
    }
    best.1
}

fn group<L: Ord + Clone>(labels: &[L]) -> BTreeMap<L, Vec<usize>> {
    let mut g: BTreeMap<L, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        g.entry(l.clone()).or_default().push(i);
    }
    g
}

/// Medoid index of each class under the pairwise distance `d`, in label
/// order.
pub fn class_medoids<L: Ord + Clone>(d: &[Vec<f64>], labels: &[L]) -> Vec<(L, usize)> {
    group(labels)
        .into_iter()
        .map(|(l, members)| (l, medoid(&members, |i, j| d[i][j])))
        .collect()
}

/// Scores how well `labels` are separated when each row of `rows` is a
/// point in Euclidean space.
pub fn clustering_score<L: Ord + Clone + std::fmt::Debug>(rows: &[Vec<f64>], labels: &[L]) -> Result<ClusterScores> {
    if rows.len() != labels.len() {
        return Err(PfsdmError::InvalidConfig("one label per row is required".into()));
    }
    let groups = group(labels);
    if groups.len() < 2 {
        return Err(PfsdmError::InvalidConfig("clustering needs at least two classes".into()));
    }
    if let Some((l, _)) = groups.iter().find(|(_, m)| m.len() < 2) {
        return Err(PfsdmError::SingletonClass(format!("{l:?}")));
    }
    let n = rows.len();
    let d: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| euclidean(&rows[i], &rows[j])).collect())
        .collect();

    let mut correct = 0usize;
    for i in 0..n {
        let mut best: Option<(f64, &L)> = None;
        for (l, members) in &groups {
            let rest: Vec<usize> = members.iter().copied().filter(|&j| j != i).collect();
            let m = medoid(&rest, |a, b| d[a][b]);
            if best.is_none_or(|(bd, _)| d[i][m] < bd) {
                best = Some((d[i][m], l));
            }
        }
        if best.map(|(_, l)| l) == Some(&labels[i]) {
            correct += 1;
        }
    }

    let mut silhouette = 0.0;
    for i in 0..n {
        let mean_to = |members: &[usize]| {
            let others: Vec<f64> = members.iter().filter(|&&j| j != i).map(|&j| d[i][j]).collect();
            others.iter().sum::<f64>() / others.len() as f64
        };
        let a = mean_to(&groups[&labels[i]]);
        let b = groups
            .iter()
            .filter(|(l, _)| **l != labels[i])
            .map(|(_, m)| mean_to(m))
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        silhouette += if denom > 0.0 { (b - a) / denom } else { 0.0 };
    }

    Ok(ClusterScores {
        accuracy: correct as f64 / n as f64,
        silhouette: silhouette / n as f64,
    })
}
