use crate::{exit, load_instance, to_json, CliError, Output};
use onlinenet::{sample_frt, validate_hst, MetricSpace};
use rayon::prelude::*;
use serde::Serialize;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairStretch {
    pub u: usize,
    pub v: usize,
    pub distance: f64,
    pub mean_tree_distance: f64,
    pub mean_stretch: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvalidTree {
    pub tree_seed: u64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbedReport {
    pub points: usize,
    pub trials: usize,
    pub seed: u64,
    pub valid_trees: usize,
    pub validity_rate: f64,
    pub invalid: Vec<InvalidTree>,
    /// Largest per-pair mean stretch.
    pub max_mean_stretch: f64,
    /// Mean stretch averaged over all pairs.
    pub average_stretch: f64,
    /// `8·ln(points)`, the reference envelope.
    pub log_envelope: f64,
    pub pairs: Vec<PairStretch>,
}

/// Samples `trials` HSTs over every point of the metric, with seeds
/// `seed, seed + 1, ...`, validates each and averages the tree distance of
/// every pair at positive distance. Sampling runs on the ambient pool.
pub fn embed_report(metric: &MetricSpace, trials: usize, seed: u64) -> Result<EmbedReport, CliError> {
    if trials == 0 {
        return Err(CliError::schema("embed needs at least one trial"));
    }
    let n = metric.n();
    let points: Vec<usize> = (0..n).collect();
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|&(u, v)| metric.d(u, v) > 0.0).collect();
    let samples: Vec<(u64, Vec<String>, Vec<f64>)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let tree_seed = seed.wrapping_add(t);
            let tree = sample_frt(metric, &points, tree_seed).expect("non-empty point set");
            let problems = validate_hst(&tree, metric).iter().map(|v| v.to_string()).collect();
            let dists = pairs.iter().map(|&(u, v)| tree.tree_distance(u, v).expect("leaf")).collect();
            (tree_seed, problems, dists)
        })
        .collect();

    let mut sums = vec![0.0; pairs.len()];
    let mut invalid = Vec::new();
    for (tree_seed, problems, dists) in &samples {
        if !problems.is_empty() {
            invalid.push(InvalidTree { tree_seed: *tree_seed, detail: problems.join("; ") });
        }
        for (s, d) in sums.iter_mut().zip(dists) {
            *s += d;
        }
    }
    let pairs: Vec<PairStretch> = pairs
        .iter()
        .zip(&sums)
        .map(|(&(u, v), &sum)| {
            let mean = sum / trials as f64;
            let d = metric.d(u, v);
            PairStretch { u, v, distance: d, mean_tree_distance: mean, mean_stretch: mean / d }
        })
        .collect();
    let valid_trees = trials - invalid.len();
    Ok(EmbedReport {
        points: n,
        trials,
        seed,
        valid_trees,
        validity_rate: valid_trees as f64 / trials as f64,
        invalid,
        max_mean_stretch: pairs.iter().map(|p| p.mean_stretch).fold(0.0, f64::max),
        average_stretch: if pairs.is_empty() {
            0.0
        } else {
            pairs.iter().map(|p| p.mean_stretch).sum::<f64>() / pairs.len() as f64
        },
        log_envelope: 8.0 * (n as f64).ln(),
        pairs,
    })
}

/// Exits 4 if any sampled tree fails validation.
pub fn cmd_embed(instance: &Path, trials: usize, seed: u64) -> Result<Output, CliError> {
    let inst = load_instance(instance)?;
    let report = embed_report(&inst.metric, trials, seed)?;
    let code = if report.invalid.is_empty() { exit::OK } else { exit::VIOLATION };
    Ok(Output::new(to_json(&report), code))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points_stretch_two() {
        let m = MetricSpace::from_points(&[vec![0.0], vec![1.0]]).unwrap();
        let r = embed_report(&m, 30, 4).unwrap();
        assert_eq!(r.valid_trees, 30);
        assert_eq!(r.pairs.len(), 1);
        assert_eq!(r.pairs[0].mean_stretch, 2.0);
    }

    #[test]
    fn one_point_has_no_pairs() {
        let m = MetricSpace::from_points(&[vec![0.0]]).unwrap();
        let r = embed_report(&m, 5, 0).unwrap();
        assert!(r.pairs.is_empty());
        assert_eq!(r.validity_rate, 1.0);
    }
}
