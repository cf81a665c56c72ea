//! Seeded synthetic benchmarks with ground truth.
//!
//! Two families of instances, both with a handful of influential
//! features hidden among thousands of pure-noise columns:
//!
//! - **linear**: two classes separated by a mean shift, X_ij ~
//!   N(l_i * mu_j, sigma_j^2) with l_i = ±1, strong/weak signal means
//!   drawn from narrow mixtures at ±tau, and per-feature noise scales
//!   sigma_j ~ U(1, 3);
//! - **nonlinear**: observations live on two interleaved noisy arcs in a
//!   latent plane; each influential feature observes the latent point
//!   through its own random sinusoid, scaled by that feature's strength,
//!   plus unit Gaussian noise. No linear projection separates the
//!   classes, but the neighborhood graph does.
//!
//! The arcs-and-sinusoids construction is this crate's own concrete
//! choice of nonlinear benchmark; it is built to make graph-based
//! embeddings win, not to match any external data set. All randomness
//! flows from `spec.seed` through fixed named streams, so instances are
//! identical across platforms and across parallel generation.

use ndarray::Array2;
use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::seeds::{derive, stream};
use crate::{Error, Result};

/// Size and signal parameters shared by every generator.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SyntheticSpec {
    /// Observations.
    pub n: usize,
    /// Features.
    pub p: usize,
    /// Strongly influential features.
    pub n_strong: usize,
    /// Weakly influential features.
    pub n_weak: usize,
    /// Strong signal strength.
    pub tau_s: f64,
    /// Weak signal strength.
    pub tau_w: f64,
    /// Master seed; all streams derive from it.
    pub seed: u64,
}

impl Default for SyntheticSpec {
    /// The linear benchmark defaults: n=500, p=5000, 4 strong at 1.1
    /// plus 100 weak features.
    fn default() -> Self {
        Self {
            n: 500,
            p: 5000,
            n_strong: 4,
            n_weak: 100,
            tau_s: 1.1,
            tau_w: 0.5,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    /// The nonlinear benchmark defaults: p=1500 with 20 strong features
    /// at strength 1.0 and 60 weak at 0.2.
    pub fn nonlinear_default() -> Self {
        Self {
            n: 500,
            p: 1500,
            n_strong: 20,
            n_weak: 60,
            tau_s: 1.0,
            tau_w: 0.2,
            seed: 0,
        }
    }

    /// The strength-power sweep defaults: p=4000 with 80 influential
    /// features whose strengths are U(0.2, 1) draws raised to a power.
    pub fn mu_power_default() -> Self {
        Self {
            n: 500,
            p: 4000,
            n_strong: 80,
            n_weak: 0,
            tau_s: 1.0,
            tau_w: 0.0,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::Domain(format!("n must be at least 4, got {}", self.n)));
        }
        if self.n_strong + self.n_weak > self.p {
            return Err(Error::Domain(format!(
                "{} influential features cannot fit in p={}",
                self.n_strong + self.n_weak,
                self.p
            )));
        }
        if self.n_strong + self.n_weak == 0 {
            return Err(Error::Domain("need at least one influential feature".into()));
        }
        if !(self.tau_s >= 0.0 && self.tau_w >= 0.0) {
            return Err(Error::Domain("signal strengths must be non-negative".into()));
        }
        Ok(())
    }
}

/// Shape of the latent two-arc manifold for the nonlinear generator.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ManifoldParams {
    /// Offset of the second arc relative to the first.
    pub shift: (f64, f64),
    /// Std-dev of Gaussian jitter on the latent coordinates.
    pub jitter: f64,
    /// Scale of the random sinusoid frequencies a_j ~ N(0, freq^2).
    pub freq: f64,
}

impl Default for ManifoldParams {
    fn default() -> Self {
        Self {
            shift: (1.0, 0.5),
            jitter: 0.05,
            freq: 1.5,
        }
    }
}

/// A generated data set with its ground truth.
#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    /// n x p data matrix.
    pub x: Array2<f64>,
    /// True class of each observation, values in {0, 1}.
    pub true_labels: Vec<usize>,
    /// Strongly influential feature indices, ascending.
    pub i_strong: Vec<usize>,
    /// Weakly influential feature indices, ascending.
    pub i_weak: Vec<usize>,
    /// Per-feature signal strength; exactly 0 off the influential sets.
    pub mu: Vec<f64>,
    /// Per-feature noise scale (all 1 for the nonlinear family).
    pub sigma: Vec<f64>,
}

impl SyntheticInstance {
    /// All influential indices, ascending.
    pub fn true_features(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self
            .i_strong
            .iter()
            .chain(self.i_weak.iter())
            .copied()
            .collect();
        all.sort_unstable();
        all
    }
}

/// Uniform labels in {0, 1} from the LABELS stream.
fn draw_labels(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive(seed, stream::LABELS, 0));
    (0..n).map(|_| usize::from(rng.gen_bool(0.5))).collect()
}

/// Influential positions: a without-replacement draw of strong+weak
/// indices; the first `n_strong` in draw order are the strong set.
fn draw_feature_indices(spec: &SyntheticSpec) -> (Vec<usize>, Vec<usize>) {
    let m = spec.n_strong + spec.n_weak;
    let mut rng = ChaCha8Rng::seed_from_u64(derive(spec.seed, stream::FEATURE_INDICES, 0));
    let drawn: Vec<usize> = sample_indices(&mut rng, spec.p, m).into_vec();
    let mut strong: Vec<usize> = drawn[..spec.n_strong].to_vec();
    let mut weak: Vec<usize> = drawn[spec.n_strong..].to_vec();
    strong.sort_unstable();
    weak.sort_unstable();
    (strong, weak)
}

/// Two-class mean-shift instance: X_ij ~ N(l_i * mu_j, sigma_j^2).
///
/// Strong features draw mu_j from the even mixture of N(+tau_s, 0.01^2)
/// and N(-tau_s, 0.01^2); weak features likewise with tau_w. Noise scales
/// are sigma_j ~ U(1, 3) for every column.
pub fn gen_linear(spec: &SyntheticSpec) -> Result<SyntheticInstance> {
    spec.validate()?;
    let labels = draw_labels(spec.n, spec.seed);
    let (i_strong, i_weak) = draw_feature_indices(spec);

    let mut mu = vec![0.0; spec.p];
    {
        let mut rng = ChaCha8Rng::seed_from_u64(derive(spec.seed, stream::SIGNAL_MEANS, 0));
        // Iterate influential features in ascending index order so the
        // stream does not depend on the sampling order above.
        for &j in i_strong.iter() {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let noise: f64 = rng.sample(StandardNormal);
            mu[j] = sign * spec.tau_s + 0.01 * noise;
        }
        for &j in i_weak.iter() {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let noise: f64 = rng.sample(StandardNormal);
            mu[j] = sign * spec.tau_w + 0.01 * noise;
        }
    }

    let sigma: Vec<f64> = {
        let mut rng = ChaCha8Rng::seed_from_u64(derive(spec.seed, stream::SIGMAS, 0));
        (0..spec.p).map(|_| rng.gen_range(1.0..3.0)).collect()
    };

    let mut x = Array2::zeros((spec.n, spec.p));
    {
        let mut rng = ChaCha8Rng::seed_from_u64(derive(spec.seed, stream::NOISE, 0));
        for i in 0..spec.n {
            let sign = if labels[i] == 1 { 1.0 } else { -1.0 };
            for j in 0..spec.p {
                let eps: f64 = rng.sample(StandardNormal);
                x[[i, j]] = sign * mu[j] + sigma[j] * eps;
            }
        }
    }

    Ok(SyntheticInstance {
        x,
        true_labels: labels,
        i_strong,
        i_weak,
        mu,
        sigma,
    })
}

/// Shared core of the nonlinear generators, with explicit per-feature
/// strengths aligned to [strong.., weak..] in ascending-index order.
fn nonlinear_core(
    spec: &SyntheticSpec,
    params: &ManifoldParams,
    strengths: &[f64],
) -> Result<SyntheticInstance> {
    spec.validate()?;
    if !(params.jitter >= 0.0 && params.freq > 0.0) {
        return Err(Error::Domain("jitter must be >= 0 and freq > 0".into()));
    }
    let labels = draw_labels(spec.n, spec.seed);
    let (i_strong, i_weak) = draw_feature_indices(spec);
    let influential: Vec<usize> = {
        let mut all: Vec<usize> = i_strong.iter().chain(i_weak.iter()).copied().collect();
        all.sort_unstable();
        all
    };
    debug_assert_eq!(strengths.len(), influential.len());

    // Latent plane: class 0 on the upper unit half-circle, class 1 on
    // the lower half-circle shifted to interleave, plus jitter.
    let latent: Vec<(f64, f64)> = {
        let mut rng = ChaCha8Rng::seed_from_u64(derive(spec.seed, stream::LATENT, 0));
        labels
            .iter()
            .map(|&l| {
                let theta = if l == 0 {
                    rng.gen_range(0.0..std::f64::consts::PI)
                } else {
                    rng.gen_range(std::f64::consts::PI..(2.0 * std::f64::consts::PI))
                };
                let jx: f64 = rng.sample(StandardNormal);
                let jy: f64 = rng.sample(StandardNormal);
                let (mut zx, mut zy) = (theta.cos(), theta.sin());
                if l == 1 {
                    zx += params.shift.0;
                    zy += params.shift.1;
                }
                (zx + params.jitter * jx, zy + params.jitter * jy)
            })
            .collect()
    };

    // One random sinusoid per influential feature: strength * sin(a.z+b).
    struct Lift {
        a: (f64, f64),
        b: f64,
    }
    let lifts: Vec<Lift> = {
        let mut rng = ChaCha8Rng::seed_from_u64(derive(spec.seed, stream::LIFT, 0));
        (0..influential.len())
            .map(|_| {
                let a0: f64 = rng.sample(StandardNormal);
                let a1: f64 = rng.sample(StandardNormal);
                let b = rng.gen_range(0.0..(2.0 * std::f64::consts::PI));
                Lift {
                    a: (params.freq * a0, params.freq * a1),
                    b,
                }
            })
            .collect()
    };

    let mut mu = vec![0.0; spec.p];
    let mut signal_col = vec![usize::MAX; spec.p];
    for (pos, &j) in influential.iter().enumerate() {
        mu[j] = strengths[pos];
        signal_col[j] = pos;
    }

    let mut x = Array2::zeros((spec.n, spec.p));
    {
        let mut rng = ChaCha8Rng::seed_from_u64(derive(spec.seed, stream::NOISE, 0));
        for i in 0..spec.n {
            let (zx, zy) = latent[i];
            for j in 0..spec.p {
                let eps: f64 = rng.sample(StandardNormal);
                let signal = match signal_col[j] {
                    usize::MAX => 0.0,
                    pos => {
                        let lift = &lifts[pos];
                        mu[j] * (lift.a.0 * zx + lift.a.1 * zy + lift.b).sin()
                    }
                };
                x[[i, j]] = signal + eps;
            }
        }
    }

    Ok(SyntheticInstance {
        x,
        true_labels: labels,
        i_strong,
        i_weak,
        mu,
        sigma: vec![1.0; spec.p],
    })
}

/// Two interleaved latent arcs observed through random sinusoids.
/// Strong features use strength tau_s, weak features tau_w.
pub fn gen_nonlinear(spec: &SyntheticSpec, params: &ManifoldParams) -> Result<SyntheticInstance> {
    spec.validate()?;
    let (i_strong, i_weak) = draw_feature_indices(spec);
    let mut strengths = Vec::with_capacity(i_strong.len() + i_weak.len());
    let mut merged: Vec<(usize, f64)> = i_strong
        .iter()
        .map(|&j| (j, spec.tau_s))
        .chain(i_weak.iter().map(|&j| (j, spec.tau_w)))
        .collect();
    merged.sort_unstable_by_key(|&(j, _)| j);
    strengths.extend(merged.iter().map(|&(_, s)| s));
    nonlinear_core(spec, params, &strengths)
}

/// Nonlinear instance whose per-feature strengths are U(0.2, 1) draws
/// raised to the power `a`; larger `a` concentrates strengths near 0.
pub fn mu_power_sweep(spec: &SyntheticSpec, a: f64) -> Result<SyntheticInstance> {
    spec.validate()?;
    if !(a > 0.0) {
        return Err(Error::Domain(format!("power must be positive, got {a}")));
    }
    let m = spec.n_strong + spec.n_weak;
    let strengths: Vec<f64> = {
        let mut rng = ChaCha8Rng::seed_from_u64(derive(spec.seed, stream::SIGNAL_MEANS, 0));
        (0..m).map(|_| rng.gen_range(0.2..1.0_f64).powf(a)).collect()
    };
    nonlinear_core(spec, &ManifoldParams::default(), &strengths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_defaults_have_documented_shape() {
        let spec = SyntheticSpec::default();
        assert_eq!((spec.n, spec.p), (500, 5000));
        assert_eq!((spec.n_strong, spec.n_weak), (4, 100));
        assert_eq!(spec.tau_s, 1.1);
    }

    #[test]
    fn linear_ground_truth_bookkeeping() {
        let spec = SyntheticSpec {
            n: 50,
            p: 300,
            seed: 11,
            ..SyntheticSpec::default()
        };
        let inst = gen_linear(&spec).unwrap();
        assert_eq!(inst.x.dim(), (50, 300));
        assert_eq!(inst.i_strong.len(), 4);
        assert_eq!(inst.i_weak.len(), 100);
        let truth = inst.true_features();
        assert_eq!(truth.len(), 104);
        for j in 0..300 {
            if truth.binary_search(&j).is_ok() {
                assert!(inst.mu[j] != 0.0);
            } else {
                assert_eq!(inst.mu[j], 0.0, "feature {j} should carry no signal");
            }
        }
        assert!(inst.sigma.iter().all(|&s| (1.0..3.0).contains(&s)));
        assert!(inst.true_labels.iter().all(|&l| l < 2));
    }

    #[test]
    fn linear_column_variance_matches_total_variance_law() {
        // Var(X_j) = sigma_j^2 + mu_j^2 because the label sign is an
        // independent Rademacher factor.
        let spec = SyntheticSpec {
            n: 5000,
            p: 40,
            n_strong: 4,
            n_weak: 10,
            seed: 3,
            ..SyntheticSpec::default()
        };
        let inst = gen_linear(&spec).unwrap();
        let n = spec.n as f64;
        for j in 0..spec.p {
            let col = inst.x.column(j);
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            let expect = inst.sigma[j] * inst.sigma[j] + inst.mu[j] * inst.mu[j];
            // MC tolerance: sd of the sample variance is about
            // sqrt(2/n)*expect for Gaussian data; allow 5 sigma.
            let tol = 5.0 * (2.0 / n).sqrt() * expect;
            assert!(
                (var - expect).abs() < tol,
                "column {j}: var {var} vs expected {expect}"
            );
        }
    }

    #[test]
    fn linear_no_signal_limit_has_no_group_separation() {
        let spec = SyntheticSpec {
            n: 2000,
            p: 100,
            tau_s: 0.0,
            tau_w: 0.0,
            n_strong: 4,
            n_weak: 20,
            seed: 9,
        };
        let inst = gen_linear(&spec).unwrap();
        let mut far = 0usize;
        for j in 0..spec.p {
            let (mut s0, mut c0, mut s1, mut c1) = (0.0, 0usize, 0.0, 0usize);
            for i in 0..spec.n {
                if inst.true_labels[i] == 0 {
                    s0 += inst.x[[i, j]];
                    c0 += 1;
                } else {
                    s1 += inst.x[[i, j]];
                    c1 += 1;
                }
            }
            let gap = (s0 / c0 as f64 - s1 / c1 as f64).abs();
            // 4 standard errors of the two-group mean difference.
            let se = inst.sigma[j] * (1.0 / c0 as f64 + 1.0 / c1 as f64).sqrt();
            if gap > 4.0 * se {
                far += 1;
            }
        }
        // >= 99% of features stay within the 4-standard-error band
        // (chance rate of exceeding it is about 0.006% per feature).
        assert!(far <= spec.p / 100, "{far} separated features");
    }

    #[test]
    fn generators_are_deterministic() {
        let spec = SyntheticSpec {
            n: 30,
            p: 120,
            seed: 21,
            n_strong: 3,
            n_weak: 9,
            ..SyntheticSpec::default()
        };
        let a = gen_linear(&spec).unwrap();
        let b = gen_linear(&spec).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.true_labels, b.true_labels);
        assert_eq!(a.mu, b.mu);

        let params = ManifoldParams::default();
        let c = gen_nonlinear(&spec, &params).unwrap();
        let d = gen_nonlinear(&spec, &params).unwrap();
        assert_eq!(c.x, d.x);
        assert_eq!(c.true_labels, d.true_labels);

        let e = mu_power_sweep(&spec, 2.0).unwrap();
        let f = mu_power_sweep(&spec, 2.0).unwrap();
        assert_eq!(e.x, f.x);
    }

    #[test]
    fn different_seeds_differ() {
        let a = gen_linear(&SyntheticSpec {
            n: 20,
            p: 50,
            n_strong: 2,
            n_weak: 5,
            seed: 1,
            ..SyntheticSpec::default()
        })
        .unwrap();
        let b = gen_linear(&SyntheticSpec {
            n: 20,
            p: 50,
            n_strong: 2,
            n_weak: 5,
            seed: 2,
            ..SyntheticSpec::default()
        })
        .unwrap();
        assert_ne!(a.x, b.x);
    }

    #[test]
    fn labels_are_roughly_balanced() {
        let spec = SyntheticSpec {
            n: 2000,
            p: 10,
            n_strong: 1,
            n_weak: 1,
            seed: 4,
            ..SyntheticSpec::default()
        };
        let inst = gen_linear(&spec).unwrap();
        let ones = inst.true_labels.iter().filter(|&&l| l == 1).count();
        // Binomial(2000, 1/2): 5 sigma is about 112.
        assert!((ones as i64 - 1000).abs() < 120, "ones = {ones}");
    }

    #[test]
    fn nonlinear_noise_features_are_standard_normal() {
        let spec = SyntheticSpec {
            n: 3000,
            p: 30,
            n_strong: 2,
            n_weak: 2,
            tau_s: 1.0,
            tau_w: 0.2,
            seed: 8,
        };
        let inst = gen_nonlinear(&spec, &ManifoldParams::default()).unwrap();
        let truth = inst.true_features();
        for j in 0..spec.p {
            if truth.binary_search(&j).is_ok() {
                continue;
            }
            let col = inst.x.column(j);
            let n = spec.n as f64;
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            assert!(mean.abs() < 5.0 / n.sqrt(), "col {j} mean {mean}");
            assert!((var - 1.0).abs() < 5.0 * (2.0 / n).sqrt(), "col {j} var {var}");
        }
    }

    #[test]
    fn nonlinear_influential_variance_exceeds_noise() {
        // An influential column is sin-signal + unit noise, so its
        // variance must exceed 1 by roughly mu_j^2 * E[sin^2] ~ mu^2/2.
        let spec = SyntheticSpec {
            n: 4000,
            p: 20,
            n_strong: 5,
            n_weak: 0,
            tau_s: 2.0,
            tau_w: 0.0,
            seed: 15,
        };
        let inst = gen_nonlinear(&spec, &ManifoldParams::default()).unwrap();
        for &j in &inst.i_strong {
            let col = inst.x.column(j);
            let n = spec.n as f64;
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            assert!(var > 1.5, "influential col {j} var {var}");
        }
    }

    #[test]
    fn mu_power_strengths_follow_power_law() {
        let spec = SyntheticSpec {
            n: 30,
            p: 500,
            n_strong: 80,
            n_weak: 0,
            tau_s: 1.0,
            tau_w: 0.0,
            seed: 33,
        };
        let base = mu_power_sweep(&spec, 1.0).unwrap();
        let fourth = mu_power_sweep(&spec, 4.0).unwrap();
        let truth = base.true_features();
        assert_eq!(truth, fourth.true_features());
        let mut base_strengths: Vec<f64> = truth.iter().map(|&j| base.mu[j]).collect();
        let fourth_strengths: Vec<f64> = truth.iter().map(|&j| fourth.mu[j]).collect();
        // Same underlying draws: strengths_4 = strengths_1^4 exactly.
        for (b, f) in base_strengths.iter().zip(&fourth_strengths) {
            assert!((b.powi(4) - f).abs() < 1e-12);
            assert!((0.2..1.0).contains(b));
        }
        // Median of U(0.2,1)^4 sits near 0.6^4 = 0.1296.
        base_strengths.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut f4: Vec<f64> = fourth_strengths.clone();
        f4.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median4 = f4[f4.len() / 2];
        assert!((median4 - 0.1296).abs() < 0.05, "median {median4}");
    }

    #[test]
    fn mu_power_monotone_in_base_strength() {
        let spec = SyntheticSpec {
            n: 30,
            p: 200,
            n_strong: 40,
            n_weak: 0,
            tau_s: 1.0,
            tau_w: 0.0,
            seed: 5,
        };
        for a in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let base = mu_power_sweep(&spec, 1.0).unwrap();
            let powered = mu_power_sweep(&spec, a).unwrap();
            let truth = base.true_features();
            let mut pairs: Vec<(f64, f64)> = truth
                .iter()
                .map(|&j| (base.mu[j], powered.mu[j]))
                .collect();
            pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
            for w in pairs.windows(2) {
                assert!(w[0].1 <= w[1].1, "strengths not monotone at a={a}");
            }
        }
    }

    #[test]
    fn rejects_invalid_specs() {
        let too_many = SyntheticSpec {
            n: 10,
            p: 5,
            n_strong: 4,
            n_weak: 4,
            ..SyntheticSpec::default()
        };
        assert!(gen_linear(&too_many).is_err());
        let negative_tau = SyntheticSpec {
            tau_w: -0.5,
            ..SyntheticSpec::default()
        };
        assert!(gen_linear(&negative_tau).is_err());
        assert!(mu_power_sweep(&SyntheticSpec::mu_power_default(), 0.0).is_err());
    }
}
