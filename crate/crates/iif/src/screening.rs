//! Feature screening: reliability weighting, score combination, and
//! Higher-Criticism thresholding.
//!
//! Two p-values exist per feature: a supervised one from the F test under
//! the current labels and an unsupervised one from the KS test. How much
//! the F side can be trusted depends on the labels, so the combination
//! weight is driven by a reliability check: if the F p-values on the
//! currently selected features look uniform (no real class signal), the
//! weight falls back toward a floor and the KS side dominates.
//!
//! Selection itself never fixes an arbitrary cutoff. The Higher-Criticism
//! objective scans the sorted p-values for the rank where they deviate
//! most sharply from uniformity and thresholds there, adapting the
//! selected count to the (unknown) signal sparsity.

use serde::{Deserialize, Serialize};

use crate::stats::dist::{normal_cdf, normal_quantile};
use crate::{Error, Result};

/// Where a feature set came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionOrigin {
    Init,
    Iteration(usize),
}

/// A set of selected feature indices (0-based, sorted ascending).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSet {
    pub indices: Vec<usize>,
    pub origin: SelectionOrigin,
}

impl FeatureSet {
    pub fn new(mut indices: Vec<usize>, origin: SelectionOrigin) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self { indices, origin }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.indices.binary_search(&idx).is_ok()
    }
}

/// Outcome of the label-reliability check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reliability {
    /// Tail probability that p-values this extreme arise under uniformity;
    /// small means the labels carry real signal.
    pub p1: f64,
    /// The standardized-uniformity scan statistic behind `p1`.
    pub hc_stat: f64,
    /// Set when fewer than 8 p-values were available and `p1` was pinned
    /// to 1 (the asymptotic calibration is meaningless that small).
    pub degraded: bool,
}

/// Reliability of a set of p-values: scan the sorted lower two thirds for
/// the strongest standardized departure below uniformity, then convert the
/// scan maximum to a tail probability with the extreme-value calibration
///
/// ```text
/// b = sqrt(2 ln ln s)
/// c = 2 ln ln s + ln ln ln s / 2 - ln(4 pi) / 2
/// p1 = 1 - exp(-exp(c - b T))
/// ```
pub fn reliability_pvalue(pvalues: &[f64]) -> Result<Reliability> {
    if pvalues.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
        return Err(Error::Domain(
            "reliability check requires p-values strictly inside (0,1)".into(),
        ));
    }
    let s = pvalues.len();
    if s < 8 {
        return Ok(Reliability {
            p1: 1.0,
            hc_stat: 0.0,
            degraded: true,
        });
    }
    let mut sorted = pvalues.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let sf = s as f64;
    let upper = (2 * s) / 3;
    let mut t_max = f64::NEG_INFINITY;
    for j in 1..=upper {
        let pi = sorted[j - 1];
        let term = sf.sqrt() * (j as f64 / sf - pi) / (pi * (1.0 - pi)).sqrt();
        t_max = t_max.max(term);
    }
    let lls = sf.ln().ln();
    let b = (2.0 * lls).sqrt();
    let c = 2.0 * lls + 0.5 * lls.ln() - 0.5 * (4.0 * std::f64::consts::PI).ln();
    let p1 = 1.0 - (-((c - b * t_max).exp())).exp();
    Ok(Reliability {
        p1: p1.clamp(0.0, 1.0),
        hc_stat: t_max,
        degraded: false,
    })
}

/// The F/KS combination weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    /// Raw trust in the supervised side: 1 - p1/(p1 + c), living in
    /// [c/(1+c), 1].
    pub raw: f64,
    /// `raw` rescaled so the coefficient pair (raw, 1-raw) has unit
    /// Euclidean norm; with it the combined null score keeps variance 1.
    pub normalized: f64,
}

/// Map the reliability tail probability to a combination weight.
/// `c` controls the floor: full distrust (p1 = 1) still leaves c/(1+c).
pub fn weight_from_p1(p1: f64, c: f64) -> Result<Weight> {
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::Domain(format!("p1 must lie in [0,1], got {p1}")));
    }
    if !(c > 0.0) {
        return Err(Error::Domain(format!("weight floor c must be positive, got {c}")));
    }
    let raw = 1.0 - p1 / (p1 + c);
    let normalized = raw / (raw * raw + (1.0 - raw) * (1.0 - raw)).sqrt();
    Ok(Weight { raw, normalized })
}

/// Composite evidence per feature.
#[derive(Debug, Clone, PartialEq)]
pub struct Composite {
    /// Combined z-scale scores; unit variance under the null.
    pub scores: Vec<f64>,
    /// Upper-tail p-values 1 - Phi(score), strictly inside (0,1).
    pub pvalues: Vec<f64>,
}

/// Combine the two p-value vectors into one score per feature:
///
/// ```text
/// S = (w Phi^-1(1 - pF) + (1 - w) Phi^-1(1 - pKS)) / ||(w, 1-w)||
/// ```
///
/// The division by the Euclidean norm of the weight pair keeps S exactly
/// standard normal when both inputs are independent and uniform, so the
/// p-values 1 - Phi(S) are calibrated for the threshold scan.
pub fn composite_scores(p_f: &[f64], p_ks: &[f64], weight: &Weight) -> Result<Composite> {
    if p_f.len() != p_ks.len() {
        return Err(Error::Shape(format!(
            "{} F p-values vs {} KS p-values",
            p_f.len(),
            p_ks.len()
        )));
    }
    if p_f.is_empty() {
        return Err(Error::Degenerate("no p-values to combine".into()));
    }
    let w = weight.raw;
    if !(w > 0.0 && w <= 1.0) {
        return Err(Error::Domain(format!("weight must lie in (0,1], got {w}")));
    }
    let norm = (w * w + (1.0 - w) * (1.0 - w)).sqrt();
    let mut scores = Vec::with_capacity(p_f.len());
    let mut pvalues = Vec::with_capacity(p_f.len());
    for (&pf, &pk) in p_f.iter().zip(p_ks) {
        if !(pf > 0.0 && pf < 1.0) || !(pk > 0.0 && pk < 1.0) {
            return Err(Error::Domain(
                "composite inputs must be p-values strictly inside (0,1)".into(),
            ));
        }
        let zf = normal_quantile(1.0 - pf)?;
        let zk = normal_quantile(1.0 - pk)?;
        let s = (w * zf + (1.0 - w) * zk) / norm;
        scores.push(s);
        pvalues.push(1.0 - normal_cdf(s));
    }
    Ok(Composite { scores, pvalues })
}

/// Result of a Higher-Criticism threshold scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    /// Score of the feature at the objective's argmax.
    pub threshold: f64,
    /// 1-based rank (in p-value order) where the objective peaked.
    pub argmax_rank: usize,
    /// Selected features.
    pub selected: FeatureSet,
    /// Set when the feasible scan window was empty and the deterministic
    /// top-ceil(sqrt(p)) fallback was used instead.
    pub fallback: bool,
}

/// Order features by score descending, index ascending on ties. Equivalent
/// to p-value ascending for any monotone score-to-p-value map.
fn rank_by_score(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
    order
}

fn validate_scan_input(scores: &[f64], pvalues: &[f64]) -> Result<()> {
    if scores.len() != pvalues.len() {
        return Err(Error::Shape(format!(
            "{} scores vs {} p-values",
            scores.len(),
            pvalues.len()
        )));
    }
    if scores.len() < 8 {
        return Err(Error::Degenerate(format!(
            "threshold scan needs at least 8 features, got {}",
            scores.len()
        )));
    }
    if scores.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite score in threshold scan".into()));
    }
    if pvalues.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
        return Err(Error::Domain(
            "threshold scan requires p-values strictly inside (0,1)".into(),
        ));
    }
    Ok(())
}

fn top_sqrt_fallback(scores: &[f64], order: &[usize], origin: SelectionOrigin) -> ThresholdResult {
    let take = (scores.len() as f64).sqrt().ceil() as usize;
    let kept: Vec<usize> = order[..take].to_vec();
    ThresholdResult {
        threshold: scores[order[take - 1]],
        argmax_rank: take,
        selected: FeatureSet::new(kept, origin),
        fallback: true,
    }
}

/// Threshold composite scores.
///
/// Scans ranks ceil(ln p) ..= floor(p/2) of the ascending p-values with
/// the objective (j/p - pi_(j)) / sqrt(pi_(j)(1 - pi_(j))), takes the
/// argmax (smallest rank on ties), and keeps every feature whose score is
/// at least the score at the argmax.
pub fn hct_composite(
    scores: &[f64],
    pvalues: &[f64],
    origin: SelectionOrigin,
) -> Result<ThresholdResult> {
    validate_scan_input(scores, pvalues)?;
    let p = scores.len();
    let pf = p as f64;
    let order = rank_by_score(scores);

    let lo = (pf.ln().ceil() as usize).max(1);
    let hi = p / 2;
    if lo > hi {
        return Ok(top_sqrt_fallback(scores, &order, origin));
    }

    let mut best_rank = 0usize;
    let mut best_obj = f64::NEG_INFINITY;
    for j in lo..=hi {
        let pi = pvalues[order[j - 1]];
        let obj = (j as f64 / pf - pi) / (pi * (1.0 - pi)).sqrt();
        if obj > best_obj {
            best_obj = obj;
            best_rank = j;
        }
    }

    let threshold = scores[order[best_rank - 1]];
    let kept: Vec<usize> = (0..p).filter(|&j| scores[j] >= threshold).collect();
    Ok(ThresholdResult {
        threshold,
        argmax_rank: best_rank,
        selected: FeatureSet::new(kept, origin),
        fallback: false,
    })
}

/// Threshold standardized KS scores for the label-free initialization.
///
/// Scans ranks j <= p/2 whose sorted p-value exceeds ln(p)/p with
///
/// ```text
/// HC(j) = sqrt(p) (j/p - pi_(j)) / (sqrt(max(sqrt(n)(j/p - pi_(j)), 0)) + j/p)
/// ```
///
/// and keeps features with score strictly above the score at the argmax.
/// With no qualifying rank, falls back to the top ceil(sqrt(p)) features.
pub fn hct_ifpca(
    standardized: &[f64],
    pvalues: &[f64],
    n: usize,
) -> Result<ThresholdResult> {
    validate_scan_input(standardized, pvalues)?;
    if n < 2 {
        return Err(Error::Domain(format!("need n >= 2 observations, got {n}")));
    }
    let p = standardized.len();
    let pf = p as f64;
    let nf = n as f64;
    let order = rank_by_score(standardized);
    let floor = pf.ln() / pf;

    let mut best_rank = 0usize;
    let mut best_obj = f64::NEG_INFINITY;
    for j in 1..=(p / 2) {
        let pi = pvalues[order[j - 1]];
        if pi <= floor {
            continue;
        }
        let gap = j as f64 / pf - pi;
        let obj = pf.sqrt() * gap / ((nf.sqrt() * gap).max(0.0).sqrt() + j as f64 / pf);
        if obj > best_obj {
            best_obj = obj;
            best_rank = j;
        }
    }
    if best_rank == 0 {
        return Ok(top_sqrt_fallback(standardized, &order, SelectionOrigin::Init));
    }

    let threshold = standardized[order[best_rank - 1]];
    let kept: Vec<usize> = (0..p).filter(|&j| standardized[j] > threshold).collect();
    Ok(ThresholdResult {
        threshold,
        argmax_rank: best_rank,
        selected: FeatureSet::new(kept, SelectionOrigin::Init),
        fallback: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reliability_uniform_grid_closed_form() {
        // pi_(j) = j/s makes every scan term exactly zero, so T = 0 and
        // p1 reduces to 1 - exp(-exp(c)); recompute c independently here.
        let s = 27usize;
        let mut pv: Vec<f64> = (1..=s).map(|j| j as f64 / s as f64).collect();
        // Rank s sits outside the scanned two thirds; nudging it off the
        // closed boundary keeps the input valid without moving any term.
        pv[s - 1] = 1.0 - 1e-12;
        let r = reliability_pvalue(&pv).unwrap();
        assert_eq!(r.hc_stat, 0.0);
        let lls = (27.0_f64).ln().ln();
        let c = 2.0 * lls + 0.5 * lls.ln() - 0.5 * (4.0 * std::f64::consts::PI).ln();
        let expect = 1.0 - (-(c.exp())).exp();
        assert!((r.p1 - expect).abs() < 1e-12);
        assert!(!r.degraded);
    }

    #[test]
    fn reliability_small_s_degrades() {
        let pv = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7];
        let r = reliability_pvalue(&pv).unwrap();
        assert_eq!(r.p1, 1.0);
        assert!(r.degraded);
    }

    #[test]
    fn reliability_rejects_boundary_pvalues() {
        assert!(reliability_pvalue(&[0.0, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5]).is_err());
        assert!(reliability_pvalue(&[1.0, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5]).is_err());
    }

    #[test]
    fn reliability_signal_drives_p1_down() {
        // Strongly concentrated small p-values: the scan finds a large
        // departure and p1 collapses toward zero.
        let mut pv = vec![1e-6; 40];
        pv.extend(vec![0.5; 40]);
        let r = reliability_pvalue(&pv).unwrap();
        assert!(r.p1 < 1e-3, "p1 = {}", r.p1);

        // Uniform grid stays non-informative.
        let s = 80;
        let unif: Vec<f64> = (1..=s).map(|j| j as f64 / (s + 1) as f64).collect();
        let r0 = reliability_pvalue(&unif).unwrap();
        assert!(r0.p1 > 0.5, "p1 = {}", r0.p1);
    }

    #[test]
    fn weight_pinned_values() {
        let w = weight_from_p1(1.0, 0.6).unwrap();
        assert!((w.raw - 0.375).abs() < 1e-12);
        assert!((w.normalized - 0.5144957554275265).abs() < 1e-9);

        let full = weight_from_p1(0.0, 0.6).unwrap();
        assert_eq!(full.raw, 1.0);
        assert_eq!(full.normalized, 1.0);
    }

    #[test]
    fn weight_monotone_and_floored() {
        let c = 0.6;
        let floor = c / (1.0 + c);
        let mut prev = f64::INFINITY;
        for i in 0..=100 {
            let p1 = i as f64 / 100.0;
            let w = weight_from_p1(p1, c).unwrap();
            assert!(w.raw <= prev + 1e-15);
            assert!(w.raw >= floor - 1e-12 && w.raw <= 1.0);
            prev = w.raw;
        }
        assert!(weight_from_p1(-0.1, 0.6).is_err());
        assert!(weight_from_p1(0.5, 0.0).is_err());
    }

    #[test]
    fn composite_pure_f_weight() {
        let w = weight_from_p1(0.0, 0.6).unwrap();
        let p_f = [0.01, 0.2, 0.9];
        let p_ks = [0.5, 0.5, 0.5];
        let c = composite_scores(&p_f, &p_ks, &w).unwrap();
        for (s, &pf) in c.scores.iter().zip(&p_f) {
            let expect = normal_quantile(1.0 - pf).unwrap();
            assert!((s - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn composite_neutral_inputs_give_zero() {
        let w = weight_from_p1(0.3, 0.6).unwrap();
        let c = composite_scores(&[0.5], &[0.5], &w).unwrap();
        assert!(c.scores[0].abs() < 1e-12);
        assert!((c.pvalues[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn composite_null_moments() {
        // Independent uniform inputs at a fixed interior weight: the
        // combined score must be standard normal; check first two moments.
        let w = weight_from_p1(1.0, 0.6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = 10_000;
        let p_f: Vec<f64> = (0..m).map(|_| rng.gen_range(1e-9..1.0 - 1e-9)).collect();
        let p_ks: Vec<f64> = (0..m).map(|_| rng.gen_range(1e-9..1.0 - 1e-9)).collect();
        let c = composite_scores(&p_f, &p_ks, &w).unwrap();
        let mean: f64 = c.scores.iter().sum::<f64>() / m as f64;
        let var: f64 =
            c.scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / m as f64;
        assert!(mean.abs() < 0.05, "mean = {mean}");
        assert!((var - 1.0).abs() < 0.05, "var = {var}");
    }

    #[test]
    fn composite_pvalues_match_scores() {
        let w = weight_from_p1(0.4, 0.6).unwrap();
        let p_f = [0.02, 0.7, 0.31, 0.99];
        let p_ks = [0.5, 0.01, 0.44, 0.8];
        let c = composite_scores(&p_f, &p_ks, &w).unwrap();
        for (s, p) in c.scores.iter().zip(&c.pvalues) {
            assert_eq!(*p, 1.0 - normal_cdf(*s));
        }
    }

    #[test]
    fn composite_validates_inputs() {
        let w = weight_from_p1(0.5, 0.6).unwrap();
        assert!(composite_scores(&[0.5], &[0.5, 0.4], &w).is_err());
        assert!(composite_scores(&[0.0], &[0.5], &w).is_err());
        assert!(composite_scores(&[0.5], &[1.0], &w).is_err());
    }

    #[test]
    fn hct_composite_monotone_objective_peaks_at_half() {
        // All p-values tied at one half: the objective grows linearly in
        // the rank, so the argmax is floor(p/2) and the threshold equals
        // the shared score.
        let p = 100;
        let scores = vec![1.3; p];
        let pvalues = vec![0.5; p];
        let r = hct_composite(&scores, &pvalues, SelectionOrigin::Init).unwrap();
        assert_eq!(r.argmax_rank, 50);
        assert_eq!(r.threshold, 1.3);
        // Every feature ties the threshold and ties go to selected.
        assert_eq!(r.selected.len(), p);
    }

    #[test]
    fn hct_composite_brute_force_oracle() {
        // Independent oracle: recompute the objective over the window by
        // direct sorting and full enumeration.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = 64;
            let pvalues: Vec<f64> = (0..p).map(|_| rng.gen_range(0.001..0.999)).collect();
            let scores: Vec<f64> = pvalues
                .iter()
                .map(|&q| normal_quantile(1.0 - q).unwrap())
                .collect();
            let r = hct_composite(&scores, &pvalues, SelectionOrigin::Init).unwrap();

            let (best_j, pi_at) = iif_testkit::hc::hc_composite_argmax(&pvalues);
            assert_eq!(r.argmax_rank, best_j);
            let tau = normal_quantile(1.0 - pi_at).unwrap();
            assert!((r.threshold - tau).abs() < 1e-10);
            let expect: Vec<usize> =
                (0..p).filter(|&j| scores[j] >= r.threshold).collect();
            assert_eq!(r.selected.indices, expect);
        }
    }

    #[test]
    fn hct_composite_selection_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = 200;
        let pvalues: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0001..0.9999)).collect();
        let scores: Vec<f64> = pvalues
            .iter()
            .map(|&q| normal_quantile(1.0 - q).unwrap())
            .collect();
        let r = hct_composite(&scores, &pvalues, SelectionOrigin::Iteration(1)).unwrap();
        for j in 0..p {
            if r.selected.contains(j) {
                assert!(scores[j] >= r.threshold);
            } else {
                assert!(scores[j] < r.threshold);
            }
        }
        assert!(!r.fallback);
    }

    #[test]
    fn hct_composite_rejects_tiny_input() {
        assert!(hct_composite(&[1.0; 7], &[0.5; 7], SelectionOrigin::Init).is_err());
    }

    #[test]
    fn hct_composite_null_selects_few() {
        // Pure-noise calibration. The scan window starts at ln(p), which
        // removes the extreme ranks where a null argmax usually lives, so
        // the selected fraction under uniformity is small in the typical
        // run but spreads over the window: measured over 400 simulations,
        // the quartiles were (0.017, 0.07, 0.26) with 56% of runs at or
        // below 0.10. The bounds below leave margin around those values.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let p = 1000;
        let runs = 200;
        let mut fracs: Vec<f64> = Vec::with_capacity(runs);
        for _ in 0..runs {
            let pvalues: Vec<f64> = (0..p).map(|_| rng.gen_range(1e-12..1.0 - 1e-12)).collect();
            let scores: Vec<f64> = pvalues
                .iter()
                .map(|&q| normal_quantile(1.0 - q).unwrap())
                .collect();
            let r = hct_composite(&scores, &pvalues, SelectionOrigin::Init).unwrap();
            // The argmax rank caps the count at p/2 (ties aside).
            assert!(r.selected.len() <= p / 2 + 8);
            fracs.push(r.selected.len() as f64 / p as f64);
        }
        fracs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = fracs[runs / 2];
        let small = fracs.iter().filter(|&&f| f <= 0.10).count();
        assert!(median <= 0.15, "median selected fraction {median}");
        assert!(small >= runs / 2, "runs at or below 0.10: {small}/{runs}");
    }

    #[test]
    fn hct_ifpca_brute_force_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = 120;
        let n = 60;
        let standardized: Vec<f64> = (0..p).map(|_| rng.gen_range(-2.0..4.0)).collect();
        // Any strictly decreasing score-to-p map is consistent.
        let pvalues: Vec<f64> = standardized
            .iter()
            .map(|&s| 1.0 - normal_cdf(s))
            .collect();
        let r = hct_ifpca(&standardized, &pvalues, n).unwrap();

        let (best_j, at) = iif_testkit::hc::hc_ifpca_argmax(&pvalues, n).unwrap();
        assert_eq!(r.argmax_rank, best_j);
        assert_eq!(r.threshold, standardized[at]);
        let expect: Vec<usize> = (0..p)
            .filter(|&j| standardized[j] > r.threshold)
            .collect();
        assert_eq!(r.selected.indices, expect);
    }

    #[test]
    fn hct_ifpca_strict_threshold_excludes_argmax_feature() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let p = 64;
        let standardized: Vec<f64> = (0..p).map(|_| rng.gen_range(-2.0..3.0)).collect();
        let pvalues: Vec<f64> = standardized.iter().map(|&s| 1.0 - normal_cdf(s)).collect();
        let r = hct_ifpca(&standardized, &pvalues, 30).unwrap();
        if !r.fallback {
            let at = (0..p).find(|&j| standardized[j] == r.threshold).unwrap();
            assert!(!r.selected.contains(at));
        }
    }

    #[test]
    fn hct_ifpca_window_fallback() {
        // Every p-value at or below ln(p)/p empties the scan window and
        // triggers the deterministic top-ceil(sqrt(p)) fallback.
        let p = 16;
        let floor = (p as f64).ln() / p as f64;
        let standardized: Vec<f64> = (0..p).map(|j| j as f64).collect();
        let pvalues = vec![floor * 0.5; p];
        let r = hct_ifpca(&standardized, &pvalues, 10).unwrap();
        assert!(r.fallback);
        assert_eq!(r.selected.len(), 4);
        assert_eq!(r.selected.indices, vec![12, 13, 14, 15]);
    }

    #[test]
    fn hct_ifpca_null_selects_few() {
        // Standardized null scores referred to a table built from the
        // same law: the selected fraction stays below 15% almost always.
        use crate::stats::null::NullTable;
        use crate::stats::{ks_pvalues, standardize_ks};
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let p = 2000;
        let b = 5000;
        let runs = 200;
        let table = {
            let draws: Vec<f64> = (0..b).map(|_| rng.gen_range(0.0..1.0)).collect();
            let std = standardize_ks(&draws).unwrap();
            NullTable::from_draws(std, 0).unwrap()
        };
        // Same null-spread caveat as the composite scan: over 400
        // simulations the median fraction was 0.057 with 70% of runs at
        // or below 0.15. Assert around those measurements with margin.
        let mut fracs: Vec<f64> = Vec::with_capacity(runs);
        for _ in 0..runs {
            let raw: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..1.0)).collect();
            let std = standardize_ks(&raw).unwrap();
            let pv = ks_pvalues(&std, &table).unwrap();
            let r = hct_ifpca(&std, &pv, 100).unwrap();
            assert!(r.selected.len() <= p / 2 + 8);
            fracs.push(r.selected.len() as f64 / p as f64);
        }
        fracs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = fracs[runs / 2];
        let small = fracs.iter().filter(|&&f| f <= 0.15).count();
        assert!(median <= 0.15, "median selected fraction {median}");
        assert!(small >= (runs * 55) / 100, "runs at or below 0.15: {small}/{runs}");
    }

    #[test]
    fn feature_set_sorts_and_dedups() {
        let f = FeatureSet::new(vec![5, 1, 3, 1], SelectionOrigin::Iteration(2));
        assert_eq!(f.indices, vec![1, 3, 5]);
        assert!(f.contains(3));
        assert!(!f.contains(2));
    }
}
