//! Empirical reference distributions.
//!
//! The screen never trusts asymptotic tail areas alone: Kolmogorov-Smirnov
//! scores are referred to a Monte Carlo table built from pure-noise columns
//! of the same sample size, and adjusted F statistics are referred to a
//! table of draws from the theoretical F law. Both references are plain
//! sorted vectors with binary-search tail lookups.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::distributions::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{FisherF, StandardNormal};

use crate::seeds::{self, stream};
use crate::stats::ks::ks_score;
use crate::stats::standardize_values;
use crate::{Error, Result};

/// Default number of Monte Carlo noise columns behind KS p-values.
pub const DEFAULT_KS_NULL_COLUMNS: usize = 5000;

/// Default number of theoretical F draws behind the reliability check.
pub const DEFAULT_F_NULL_DRAWS: usize = 10_000;

/// A sorted sample from a reference distribution.
#[derive(Debug, Clone)]
pub struct NullTable {
    draws: Vec<f64>,
    seed: u64,
}

impl NullTable {
    /// Wrap explicit draws; they are sorted here and must be finite.
    pub fn from_draws(mut draws: Vec<f64>, seed: u64) -> Result<Self> {
        if draws.is_empty() {
            return Err(Error::Degenerate("empty null table".into()));
        }
        if draws.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite draw in null table".into()));
        }
        draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self { draws, seed })
    }

    /// Draws sorted ascending.
    pub fn draws(&self) -> &[f64] {
        &self.draws
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of draws strictly greater than `x`.
    pub fn exceed_count(&self, x: f64) -> usize {
        self.draws.len() - self.draws.partition_point(|&d| d <= x)
    }

    /// Upper-tail p-value with the add-one continuity correction,
    /// (count + 1) / (B + 1), clamped so the result stays inside
    /// [1/(B+1), B/(B+1)] and normal quantiles of it remain finite.
    pub fn upper_pvalue(&self, x: f64) -> f64 {
        let b = self.draws.len() as f64;
        let p = (self.exceed_count(x) as f64 + 1.0) / (b + 1.0);
        p.min(b / (b + 1.0))
    }

    /// Plain exceedance fraction count/B, clamped to the same open range
    /// as [`Self::upper_pvalue`] so downstream logs stay finite.
    pub fn tail_fraction(&self, x: f64) -> f64 {
        let b = self.draws.len() as f64;
        let frac = self.exceed_count(x) as f64 / b;
        frac.clamp(1.0 / (b + 1.0), b / (b + 1.0))
    }
}

/// Sample `b` draws from the F distribution with the given degrees of
/// freedom. Deterministic in `seed`; the result is sorted.
pub fn sample_null_f(df1: u64, df2: u64, b: usize, seed: u64) -> Result<NullTable> {
    if df1 == 0 || df2 == 0 {
        return Err(Error::Domain("F degrees of freedom must be positive".into()));
    }
    if b < 1000 {
        return Err(Error::Domain(format!(
            "null F table needs at least 1000 draws, got {b}"
        )));
    }
    let dist = FisherF::new(df1 as f64, df2 as f64)
        .map_err(|e| Error::Domain(format!("FisherF parameters: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seeds::derive(seed, stream::F_NULL, 0));
    let draws: Vec<f64> = (0..b).map(|_| dist.sample(&mut rng)).collect();
    NullTable::from_draws(draws, seed)
}

/// Build the KS reference: `b` columns of `n` i.i.d. standard normals,
/// each standardized like a real data column, scored, and the scores
/// z-scored across columns exactly as the observed score vector is.
pub fn ks_null_table(n: usize, b: usize, seed: u64) -> Result<NullTable> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "KS reference needs n >= 2 observations, got {n}"
        )));
    }
    if b < 1000 {
        return Err(Error::Domain(format!(
            "KS reference needs at least 1000 columns, got {b}"
        )));
    }
    let mut raw = Vec::with_capacity(b);
    let mut col = vec![0.0_f64; n];
    for i in 0..b {
        let mut rng = ChaCha8Rng::seed_from_u64(seeds::derive(seed, stream::KS_NULL, i as u64));
        for v in col.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        standardize_values(&mut col)?;
        raw.push(ks_score(&col)?);
    }
    standardize_values(&mut raw)?;
    NullTable::from_draws(raw, seed)
}

type TableCache = Mutex<HashMap<(u64, u64, usize, u64), Arc<NullTable>>>;

static KS_CACHE: OnceLock<TableCache> = OnceLock::new();
static F_CACHE: OnceLock<TableCache> = OnceLock::new();

fn cached(
    cache: &'static OnceLock<TableCache>,
    key: (u64, u64, usize, u64),
    build: impl FnOnce() -> Result<NullTable>,
) -> Result<Arc<NullTable>> {
    let map = cache.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = map.lock().unwrap().get(&key) {
        return Ok(Arc::clone(t));
    }
    // Built outside the lock; a racing builder produces an identical table.
    let table = Arc::new(build()?);
    let mut guard = map.lock().unwrap();
    Ok(Arc::clone(guard.entry(key).or_insert(table)))
}

/// Process-wide cache around [`ks_null_table`]. Tables depend only on
/// (n, b, seed), so sharing them across runs changes nothing numerically.
pub fn ks_null_cached(n: usize, b: usize, seed: u64) -> Result<Arc<NullTable>> {
    cached(&KS_CACHE, (n as u64, 0, b, seed), || ks_null_table(n, b, seed))
}

/// Process-wide cache around [`sample_null_f`].
pub fn f_null_cached(df1: u64, df2: u64, b: usize, seed: u64) -> Result<Arc<NullTable>> {
    cached(&F_CACHE, (df1, df2, b, seed), || sample_null_f(df1, df2, b, seed))
}
