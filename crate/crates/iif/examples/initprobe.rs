//! Scratch probe: end-to-end behavior at paper-scale defaults.

use iif::datagen::{gen_linear, SyntheticSpec};
use iif::metrics::{accuracy, feature_metrics};
use iif::pipeline::{run, PipelineConfig, Variant};

fn cell(variant: Variant, tau_w: f64, seeds: std::ops::Range<u64>, verbose: bool) {
    let mut accs = Vec::new();
    let mut init_accs = Vec::new();
    let mut fdrs = Vec::new();
    for seed in seeds {
        let inst = gen_linear(&SyntheticSpec {
            tau_w,
            seed: 40 + seed,
            ..SyntheticSpec::default()
        })
        .unwrap();
        let cfg = PipelineConfig {
            variant,
            seed,
            ..PipelineConfig::default()
        };
        let t0 = std::time::Instant::now();
        let res = match run(&inst.x, 2, &cfg) {
            Ok(r) => r,
            Err(e) => {
                println!("  seed {seed}: ERROR {e}");
                continue;
            }
        };
        let dt = t0.elapsed().as_secs_f64();
        let truth = inst.true_features();
        let acc = accuracy(&res.labels, &inst.true_labels).unwrap();
        let iacc = accuracy(&res.init_labels, &inst.true_labels).unwrap();
        let fdr = feature_metrics(&res.features.indices, &truth, inst.x.ncols())
            .unwrap()
            .fdr;
        accs.push(acc);
        init_accs.push(iacc);
        fdrs.push(fdr);
        if verbose {
            println!(
                "  seed {seed}: acc {acc:.3} (init {iacc:.3}) fdr {fdr:.3} |I0|={} trace {:?} {dt:.2}s",
                res.init.n_selected,
                res.trace
                    .iter()
                    .map(|r| (
                        r.n_selected,
                        (r.change_ratio * 100.0).round() / 100.0,
                        (r.raw_w * 100.0).round() / 100.0
                    ))
                    .collect::<Vec<_>>()
            );
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    println!(
        "{variant} tau_w={tau_w}: mean acc {:.4} (init {:.4})  mean fdr {:.3}  [n={}]",
        mean(&accs),
        mean(&init_accs),
        mean(&fdrs),
        accs.len()
    );
}

fn crit3() {
    use iif::datagen::{gen_nonlinear, ManifoldParams};
    let mut lap_accs = Vec::new();
    let mut pca_accs = Vec::new();
    let mut init_accs = Vec::new();
    for seed in 0..20u64 {
        let inst = gen_nonlinear(
            &SyntheticSpec {
                seed: 40 + seed,
                ..SyntheticSpec::nonlinear_default()
            },
            &ManifoldParams::default(),
        )
        .unwrap();
        let mut accs = Vec::new();
        for variant in [Variant::Lap, Variant::Pca] {
            let cfg = PipelineConfig {
                variant,
                seed,
                ..PipelineConfig::default()
            };
            match run(&inst.x, 2, &cfg) {
                Ok(r) => {
                    accs.push(accuracy(&r.labels, &inst.true_labels).unwrap());
                    if variant == Variant::Lap {
                        init_accs.push(accuracy(&r.init_labels, &inst.true_labels).unwrap());
                    }
                }
                Err(e) => println!("  seed {seed} {variant}: ERROR {e}"),
            }
        }
        if accs.len() == 2 {
            println!(
                "  seed {seed}: lap {:.3} pca {:.3} init {:.3}",
                accs[0],
                accs[1],
                init_accs.last().unwrap()
            );
            lap_accs.push(accs[0]);
            pca_accs.push(accs[1]);
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    println!(
        "nonlinear: lap {:.4} pca {:.4} init {:.4} [n={}]",
        mean(&lap_accs),
        mean(&pca_accs),
        mean(&init_accs),
        lap_accs.len()
    );
}

fn crit4() {
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let mut means = Vec::new();
    for c in [0.4, 0.5, 0.6] {
        let mut accs = Vec::new();
        for ti in 0..10u64 {
            let tau_w = 0.1 * (ti + 1) as f64;
            for s in 0..10u64 {
                let cell = ti * 10 + s;
                let inst = gen_linear(&SyntheticSpec {
                    tau_w,
                    seed: 40 + cell,
                    ..SyntheticSpec::default()
                })
                .unwrap();
                let cfg = PipelineConfig {
                    variant: Variant::Lap,
                    seed: cell,
                    c,
                    ..PipelineConfig::default()
                };
                match run(&inst.x, 2, &cfg) {
                    Ok(r) => accs.push(accuracy(&r.labels, &inst.true_labels).unwrap()),
                    Err(e) => println!("  c={c} tau={tau_w} seed {s}: ERROR {e}"),
                }
            }
        }
        println!("c={c}: mean acc {:.4} [n={}]", mean(&accs), accs.len());
        means.push(mean(&accs));
    }
    for i in 0..means.len() {
        for j in (i + 1)..means.len() {
            println!("gap {i}{j}: {:.4}", (means[i] - means[j]).abs());
        }
    }
}

fn sup_uniform(pv: &[f64]) -> f64 {
    let mut s = pv.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &v)| {
            let hi = ((i + 1) as f64 / m - v).abs();
            let lo = (v - i as f64 / m).abs();
            hi.max(lo)
        })
        .fold(0.0_f64, f64::max)
}

fn noise_pvalues(n: usize, p: usize, k: usize, seed: u64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    use iif::stats::{
        anova_f, f_cdf, ks_null_cached, ks_pvalues, ks_score, quantile_normalize_f,
        standardize_ks, standardize_values,
    };
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = Array2::from_shape_fn((n, p), |_| rng.sample::<f64, _>(StandardNormal));
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();

    let mut psi = vec![0.0; p];
    let mut raw_f = vec![0.0; p];
    let mut col = Vec::with_capacity(n);
    for j in 0..p {
        col.clear();
        col.extend(x.column(j).iter());
        standardize_values(&mut col).unwrap();
        psi[j] = ks_score(&col).unwrap();
        raw_f[j] = anova_f(&col, &labels, k).unwrap().value;
    }
    let table = ks_null_cached(n, 5000, 0).unwrap();
    let standardized = standardize_ks(&psi).unwrap();
    let p_ks = ks_pvalues(&standardized, &table).unwrap();

    let (df1, df2) = ((k - 1) as u64, (n - k) as u64);
    let f_adj = quantile_normalize_f(&raw_f, df1, df2).unwrap();
    let eps = 1.0 / 10001.0;
    let p_f: Vec<f64> = f_adj
        .iter()
        .map(|&v| (1.0 - f_cdf(v, df1, df2)).clamp(eps, 1.0 - eps))
        .collect();
    // Diagnostic path: same tail transform without quantile adjustment.
    let p_f_raw: Vec<f64> = raw_f
        .iter()
        .map(|&v| (1.0 - f_cdf(v, df1, df2)).clamp(eps, 1.0 - eps))
        .collect();
    (p_ks, p_f, p_f_raw)
}

fn crit6() {
    use iif::screening::{composite_scores, weight_from_p1};

    // End-to-end composite on one pure-noise matrix at design scale.
    let (p_ks, p_f, _) = noise_pvalues(500, 10000, 2, 77);
    let weight = weight_from_p1(0.5, 0.6).unwrap();
    let comp = composite_scores(&p_f, &p_ks, &weight).unwrap();
    let p = comp.scores.len() as f64;
    let mean = comp.scores.iter().sum::<f64>() / p;
    let var = comp.scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / p;
    println!("end-to-end composite n=500 p=10000: mean {mean:.4} var {var:.4}");
    println!("  sup p_ks {:.4}  sup p_f {:.4}", sup_uniform(&p_ks), sup_uniform(&p_f));

    // Distributional-null composite: independent uniform inputs.
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let m = 10000;
    let pf: Vec<f64> = (0..m).map(|_| rng.gen_range(1e-9..1.0 - 1e-9)).collect();
    let pk: Vec<f64> = (0..m).map(|_| rng.gen_range(1e-9..1.0 - 1e-9)).collect();
    let c2 = composite_scores(&pf, &pk, &weight).unwrap();
    let mean2 = c2.scores.iter().sum::<f64>() / m as f64;
    let var2 = c2.scores.iter().map(|s| (s - mean2) * (s - mean2)).sum::<f64>() / m as f64;
    println!("independent-uniform composite m=10000: mean {mean2:.4} var {var2:.4}");

    // P_F uniformity at the invariant's 2000-column scale, K=2 and K=3,
    // with and without the quantile adjustment.
    for k in [2usize, 3] {
        let mut sups = Vec::new();
        let mut sups_raw = Vec::new();
        for seed in 0..10u64 {
            let (_, p_f, p_f_raw) = noise_pvalues(500, 2000, k, 100 + seed);
            sups.push(sup_uniform(&p_f));
            sups_raw.push(sup_uniform(&p_f_raw));
        }
        let fmt = |v: &[f64]| {
            v.iter().map(|s| format!("{s:.3}")).collect::<Vec<_>>().join(" ")
        };
        println!("K={k} sup p_f  (adj): {}", fmt(&sups));
        println!("K={k} sup p_f  (raw): {}", fmt(&sups_raw));
    }
    // P_KS sups at 2000 columns over seeds.
    let mut sups = Vec::new();
    for seed in 0..10u64 {
        let (p_ks, _, _) = noise_pvalues(500, 2000, 2, 200 + seed);
        sups.push(sup_uniform(&p_ks));
    }
    println!(
        "sup p_ks over seeds: {}",
        sups.iter().map(|s| format!("{s:.3}")).collect::<Vec<_>>().join(" ")
    );
}

fn main() {
    let mode = std::env::args().nth(1).unwrap_or_else(|| "crit1".into());
    match mode.as_str() {
        "diag" => cell(Variant::Lap, 0.1, 0..5, true),
        "crit3" => crit3(),
        "crit4" => crit4(),
        "crit6" => crit6(),
        "crit1" => {
            cell(Variant::Lap, 1.0, 0..20, true);
            cell(Variant::Lap, 0.1, 0..20, false);
        }
        "crit2" => {
            for tau_w in [0.6, 0.8, 1.0] {
                cell(Variant::Lap, tau_w, 0..10, false);
                cell(Variant::Pca, tau_w, 0..10, false);
            }
        }
        "initrate" => {
            use iif::pipeline::PipelineConfig;
            for tau_s in [1.1, 4.0] {
                let mut ge3 = 0usize;
                let mut ge1 = 0usize;
                let runs = 50u64;
                for seed in 0..runs {
                    let inst = gen_linear(&SyntheticSpec {
                        n: 500,
                        p: 2000,
                        n_strong: 4,
                        n_weak: 0,
                        tau_s,
                        tau_w: 0.0,
                        seed: 1000 + seed,
                    })
                    .unwrap();
                    let cfg = PipelineConfig {
                        ks_null_columns: 1000,
                        f_null_draws: 1000,
                        seed,
                        ..PipelineConfig::default()
                    };
                    let (state, _) = iif::pipeline::ifpca_init(&inst.x, 2, &cfg).unwrap();
                    let found = inst
                        .i_strong
                        .iter()
                        .filter(|&&j| state.features.contains(j))
                        .count();
                    if found >= 3 {
                        ge3 += 1;
                    }
                    if found >= 1 {
                        ge1 += 1;
                    }
                }
                println!("tau_s={tau_s}: >=3-of-4 in {ge3}/{runs}, >=1-of-4 in {ge1}/{runs}");
            }
        }
        other => eprintln!("unknown mode {other}"),
    }
}
