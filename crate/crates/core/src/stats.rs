//! Empirical distributions, reference laws, distances and intervals.

use std::collections::BTreeMap;
use std::fmt::Display;

use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Counts over arbitrary ordered keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalDistribution<K: Ord> {
    counts: BTreeMap<K, u64>,
    total: u64,
}

impl<K: Ord> Default for EmpiricalDistribution<K> {
    fn default() -> Self {
        EmpiricalDistribution {
            counts: BTreeMap::new(),
            total: 0,
        }
    }
}

impl<K: Ord> EmpiricalDistribution<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, key: K) {
        self.add_n(key, 1);
    }

    pub fn add_n(&mut self, key: K, n: u64) {
        if n > 0 {
            *self.counts.entry(key).or_insert(0) += n;
            self.total += n;
        }
    }

    pub fn merge(&mut self, other: Self) {
        for (k, n) in other.counts {
            self.add_n(k, n);
        }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, key: &K) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn frequency(&self, key: &K) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(key) as f64 / self.total as f64
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, u64)> {
        self.counts.iter().map(|(k, &n)| (k, n))
    }

    /// Total count of keys satisfying `pred`.
    pub fn mass_where<F: Fn(&K) -> bool>(&self, pred: F) -> u64 {
        self.iter().filter(|(k, _)| pred(k)).map(|(_, n)| n).sum()
    }
}

impl<K: Ord + Display> EmpiricalDistribution<K> {
    /// Two-column `key,count` dump.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("key,count\n");
        for (k, n) in self.iter() {
            out.push_str(&format!("{k},{n}\n"));
        }
        out
    }
}

impl EmpiricalDistribution<u64> {
    pub fn mean(&self) -> f64 {
        let s: f64 = self.iter().map(|(&k, n)| k as f64 * n as f64).sum();
        s / self.total.max(1) as f64
    }
}

impl<K: Ord> FromIterator<K> for EmpiricalDistribution<K> {
    fn from_iter<I: IntoIterator<Item = K>>(iter: I) -> Self {
        let mut d = Self::new();
        for k in iter {
            d.add(k);
        }
        d
    }
}

/// Half the L1 distance between the normalised distributions.
pub fn tv_distance<K: Ord>(p: &EmpiricalDistribution<K>, q: &EmpiricalDistribution<K>) -> Result<f64> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let (np, nq) = (p.total as f64, q.total as f64);
    let mut sum = 0.0;
    for (k, n) in p.iter() {
        sum += (n as f64 / np - q.count(k) as f64 / nq).abs();
    }
    for (k, n) in q.iter() {
        if p.count(k) == 0 {
            sum += n as f64 / nq;
        }
    }
    Ok(0.5 * sum)
}

/// TV distance between integer counts and a pmf on `0..pmf.len()`; mass the
/// pmf leaves beyond its support is treated as one extra cell.
pub fn tv_to_pmf(d: &EmpiricalDistribution<u64>, pmf: &[f64]) -> Result<f64> {
    if d.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let n = d.total as f64;
    let mut sum = 0.0;
    for (k, &p) in pmf.iter().enumerate() {
        sum += (d.count(&(k as u64)) as f64 / n - p).abs();
    }
    let beyond_emp = d.mass_where(|&k| k as usize >= pmf.len()) as f64 / n;
    let beyond_pmf = (1.0 - pmf.iter().sum::<f64>()).max(0.0);
    sum += (beyond_emp - beyond_pmf).abs();
    Ok(0.5 * sum)
}

/// 95th percentile of the TV distance between two samples of the observed
/// sizes drawn from the pooled distribution, over `resamples` bootstrap
/// rounds. This is the level two same-law samples typically reach.
pub fn tv_noise_floor<K: Ord + Clone, R: Rng + ?Sized>(
    p: &EmpiricalDistribution<K>,
    q: &EmpiricalDistribution<K>,
    resamples: usize,
    rng: &mut R,
) -> Result<f64> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let mut pooled = p.clone();
    pooled.merge(q.clone());
    let cumulative: Vec<u64> = pooled
        .iter()
        .scan(0u64, |acc, (_, n)| {
            *acc += n;
            Some(*acc)
        })
        .collect();
    let draw = |size: u64, rng: &mut R| {
        let mut counts = vec![0u64; cumulative.len()];
        for _ in 0..size {
            let u = rng.random_range(0..pooled.total);
            counts[cumulative.partition_point(|&c| c <= u)] += 1;
        }
        counts
    };
    let mut values = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let a = draw(p.total, rng);
        let b = draw(q.total, rng);
        let tv: f64 = a
            .iter()
            .zip(&b)
            .map(|(&x, &y)| (x as f64 / p.total as f64 - y as f64 / q.total as f64).abs())
            .sum();
        values.push(0.5 * tv);
    }
    Ok(quantile(&mut values, 0.95))
}

/// Empirical quantile (nearest rank).
pub fn quantile(values: &mut [f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let rank = ((q * values.len() as f64).ceil() as usize).clamp(1, values.len());
    values[rank - 1]
}

/// `Po(mean)` probabilities for `0..=kmax`, by the recurrence
/// `log p(k) = log p(k-1) + log mean - log k`.
pub fn poisson_pmf(mean: f64, kmax: usize) -> Vec<f64> {
    if mean == 0.0 {
        let mut v = vec![0.0; kmax + 1];
        v[0] = 1.0;
        return v;
    }
    let lm = mean.ln();
    let mut lp = -mean;
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(lp.exp());
    for k in 1..=kmax {
        lp += lm - (k as f64).ln();
        out.push(lp.exp());
    }
    out
}

/// `p (1-p)^(k-1)` on `{1, 2, ...}`.
pub fn geometric_pmf(p: f64, k: u64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) || k == 0 {
        return Err(Error::Domain(format!("geometric_pmf needs p in (0,1] and k >= 1, got p={p}, k={k}")));
    }
    Ok(p * (1.0 - p).powi((k - 1) as i32))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChiSquareFit {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Bin boundaries as inclusive `(from, to)`; the last bin is open.
    pub bins: Vec<(u64, u64)>,
}

/// Chi-square goodness of fit of integer counts to a pmf supported on
/// `start, start+1, ...`. Adjacent cells are merged so that every bin expects
/// at least 5 observations; the last bin takes the whole upper tail.
pub fn chi_square_fit<F: Fn(u64) -> f64>(d: &EmpiricalDistribution<u64>, start: u64, pmf: F) -> Result<ChiSquareFit> {
    const MIN_EXPECTED: f64 = 5.0;
    if d.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let n = d.total as f64;
    let mut bins: Vec<(u64, u64, f64)> = Vec::new();
    let (mut lo, mut acc, mut covered) = (start, 0.0, 0.0);
    let mut k = start;
    loop {
        let p = pmf(k);
        acc += p;
        covered += p;
        if acc * n >= MIN_EXPECTED {
            bins.push((lo, k, acc));
            lo = k + 1;
            acc = 0.0;
        }
        k += 1;
        if (1.0 - covered) * n < MIN_EXPECTED || k - start > 100_000 {
            break;
        }
    }
    let tail = (1.0 - covered).max(0.0) + acc;
    match bins.last_mut() {
        Some(last) if tail * n < MIN_EXPECTED => {
            last.1 = u64::MAX;
            last.2 += tail;
        }
        _ => bins.push((lo, u64::MAX, tail)),
    }
    if bins.len() < 2 {
        return Err(Error::InsufficientSamples {
            got: d.total,
            needed: (2.0 * MIN_EXPECTED) as u64,
        });
    }
    let mut statistic = 0.0;
    for &(a, b, p) in &bins {
        let observed = d.mass_where(|&x| x >= a && x <= b) as f64;
        let expected = p * n;
        statistic += (observed - expected).powi(2) / expected;
    }
    let below = d.mass_where(|&x| x < start) as f64;
    if below > 0.0 {
        statistic = f64::INFINITY;
    }
    let dof = bins.len() - 1;
    let p_value = ChiSquared::new(dof as f64).map(|c| c.sf(statistic)).unwrap_or(0.0);
    Ok(ChiSquareFit {
        statistic,
        dof,
        p_value,
        bins: bins.into_iter().map(|(a, b, _)| (a, b)).collect(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoissonFit {
    pub chi_square: ChiSquareFit,
    /// TV distance to `Po(mean)` truncated where the tail drops below 1e-12.
    pub tv: f64,
}

pub const MIN_FIT_SAMPLES: u64 = 100;

pub fn fit_poisson(d: &EmpiricalDistribution<u64>, mean: f64) -> Result<PoissonFit> {
    if !(mean > 0.0) {
        return Err(Error::Domain(format!("Poisson mean must be positive, got {mean}")));
    }
    if d.total() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            got: d.total(),
            needed: MIN_FIT_SAMPLES,
        });
    }
    let kmax = poisson_support(mean, 1e-12);
    let pmf = poisson_pmf(mean, kmax);
    let chi_square = chi_square_fit(d, 0, |k| pmf.get(k as usize).copied().unwrap_or(0.0))?;
    Ok(PoissonFit {
        chi_square,
        tv: tv_to_pmf(d, &pmf)?,
    })
}

/// Smallest `k` with `P(Po(mean) > k) < eps`.
pub fn poisson_support(mean: f64, eps: f64) -> usize {
    let mut k = (mean + 10.0 * mean.sqrt() + 10.0) as usize;
    loop {
        let pmf = poisson_pmf(mean, k);
        if 1.0 - pmf.iter().sum::<f64>() < eps || k > 100_000 {
            return k;
        }
        k *= 2;
    }
}

/// Chi-square fit of counts on `{1, 2, ...}` to the geometric law with success `p`.
pub fn fit_geometric(d: &EmpiricalDistribution<u64>, p: f64) -> Result<ChiSquareFit> {
    geometric_pmf(p, 1)?;
    if d.total() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            got: d.total(),
            needed: MIN_FIT_SAMPLES,
        });
    }
    chi_square_fit(d, 1, |k| geometric_pmf(p, k).unwrap_or(0.0))
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_ci(successes: u64, trials: u64, z: f64) -> Result<(f64, f64)> {
    if trials == 0 || successes > trials || !(z > 0.0) {
        return Err(Error::Domain(format!("wilson_ci({successes}, {trials}, {z})")));
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    Ok(((centre - half).max(0.0), (centre + half).min(1.0)))
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct MeanCi {
    pub mean: f64,
    pub stderr: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Sample mean with a normal-approximation 95% interval.
pub fn mean_ci(samples: &[f64]) -> Result<MeanCi> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples {
            got: samples.len() as u64,
            needed: 2,
        });
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let stderr = (var / n).sqrt();
    Ok(MeanCi {
        mean,
        stderr,
        lo: mean - 1.96 * stderr,
        hi: mean + 1.96 * stderr,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MannWhitney {
    /// `U` statistic of the first sample.
    pub u: f64,
    /// Normal approximation with tie correction; positive when the first
    /// sample tends to be larger.
    pub z: f64,
    pub p_value: f64,
}

pub fn mann_whitney(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let mut all: Vec<(f64, bool)> = a.iter().map(|&x| (x, true)).chain(b.iter().map(|&x| (x, false))).collect();
    all.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let n = n1 + n2;
    let mut rank_sum = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        let avg = (i + j + 1) as f64 / 2.0;
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        rank_sum += all[i..j].iter().filter(|e| e.1).count() as f64 * avg;
        i = j;
    }
    let u = rank_sum - n1 * (n1 + 1.0) / 2.0;
    let mu = n1 * n2 / 2.0;
    let sigma = (n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)))).sqrt();
    let z = if sigma > 0.0 { (u - mu) / sigma } else { 0.0 };
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(MannWhitney {
        u,
        z,
        p_value: 2.0 * normal.sf(z.abs()),
    })
}

/// Kolmogorov-Smirnov test of samples against the uniform law on `[0, 1]`;
/// returns `(D, asymptotic p-value)`.
pub fn ks_uniform(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let d = s
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let x = x.clamp(0.0, 1.0);
            ((i + 1) as f64 / n - x).max(x - i as f64 / n)
        })
        .fold(0.0, f64::max);
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    Ok((d, kolmogorov_sf(lambda)))
}

fn kolmogorov_sf(x: f64) -> f64 {
    if x < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let j = j as f64;
        let term = 2.0 * (-1f64).powi(j as i32 - 1) * (-2.0 * j * j * x * x).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{poisson, stream};
    use proptest::prelude::*;
    use rand::Rng;

    fn dist(pairs: &[(u64, u64)]) -> EmpiricalDistribution<u64> {
        let mut d = EmpiricalDistribution::new();
        for &(k, n) in pairs {
            d.add_n(k, n);
        }
        d
    }

    #[test]
    fn tv_basic_cases() {
        let p = dist(&[(0, 3), (1, 1)]);
        let q = dist(&[(0, 1), (1, 3)]);
        assert!((tv_distance(&p, &q).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        let r = dist(&[(5, 2)]);
        assert!((tv_distance(&p, &r).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(tv_distance(&p, &EmpiricalDistribution::new()), Err(Error::EmptyDistribution)));
    }

    proptest! {
        #[test]
        fn tv_is_a_metric(
            a in prop::collection::vec(0u64..20, 1..6),
            b in prop::collection::vec(0u64..20, 1..6),
            c in prop::collection::vec(0u64..20, 1..6),
        ) {
            let mk = |v: &Vec<u64>| {
                let mut d = EmpiricalDistribution::new();
                for (k, &n) in v.iter().enumerate() { d.add_n(k as u64, n + 1); }
                d
            };
            let (p, q, r) = (mk(&a), mk(&b), mk(&c));
            let pq = tv_distance(&p, &q).unwrap();
            prop_assert!((pq - tv_distance(&q, &p).unwrap()).abs() < 1e-12);
            prop_assert!(tv_distance(&p, &p).unwrap() < 1e-12);
            prop_assert!(pq <= tv_distance(&p, &r).unwrap() + tv_distance(&r, &q).unwrap() + 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&pq));
        }
    }

    #[test]
    fn poisson_pmf_sums_to_one() {
        for &m in &[0.01, 1.0, 2.0, 30.0, 1000.0] {
            let k = poisson_support(m, 1e-14);
            let s: f64 = poisson_pmf(m, k).iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "mean {m}: {s}");
        }
        let pmf = poisson_pmf(2.0, 3);
        assert!((pmf[2] - 2.0 * (-2f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn tv_of_exact_pmf_to_itself_is_zero() {
        let pmf = poisson_pmf(1.0, 20);
        let mut d = EmpiricalDistribution::new();
        // scaled integer counts reproduce the pmf up to rounding
        for (k, p) in pmf.iter().enumerate() {
            d.add_n(k as u64, (p * 1e15).round() as u64);
        }
        assert!(tv_to_pmf(&d, &pmf).unwrap() < 1e-9);
    }

    #[test]
    fn geometric_values() {
        assert_eq!(geometric_pmf(1.0, 1).unwrap(), 1.0);
        let t: f64 = 0.7;
        assert!((geometric_pmf((-t).exp(), 1).unwrap() - (-t).exp()).abs() < 1e-15);
        let total: f64 = (1..2000).map(|k| geometric_pmf(0.05, k).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(geometric_pmf(0.0, 1).is_err());
        assert!(geometric_pmf(0.5, 0).is_err());
    }

    #[test]
    fn wilson_half_of_hundred() {
        let (lo, hi) = wilson_ci(50, 100, 1.96).unwrap();
        assert!(lo > 0.40 && hi < 0.60 && lo < 0.5 && hi > 0.5);
        // closed form: centre 0.5, half-width 1.96/(1+z^2/n) * sqrt(0.0025 + z^2/40000)
        let z: f64 = 1.96;
        let half = z / (1.0 + z * z / 100.0) * (0.0025 + z * z / 40_000.0).sqrt();
        assert!((hi - (0.5 + half)).abs() < 1e-12);
    }

    #[test]
    fn exact_poisson_draws_fit() {
        let mut rng = stream(2024);
        let d: EmpiricalDistribution<u64> = (0..1_000_000).map(|_| poisson(&mut rng, 2.0)).collect();
        let fit = fit_poisson(&d, 2.0).unwrap();
        assert!(fit.chi_square.p_value > 0.001, "{fit:?}");
    }

    #[test]
    fn wrong_mean_is_rejected() {
        let mut rng = stream(7);
        let d: EmpiricalDistribution<u64> = (0..100_000).map(|_| poisson(&mut rng, 2.0)).collect();
        assert!(fit_poisson(&d, 3.0).unwrap().chi_square.p_value < 1e-6);
    }

    #[test]
    fn too_few_samples() {
        let d = dist(&[(1, 50)]);
        assert!(matches!(fit_poisson(&d, 1.0), Err(Error::InsufficientSamples { .. })));
    }

    #[test]
    fn poisson_p_values_look_uniform() {
        let mut rng = stream(99);
        let ps: Vec<f64> = (0..200)
            .map(|_| {
                let d: EmpiricalDistribution<u64> = (0..2000).map(|_| poisson(&mut rng, 1.5)).collect();
                fit_poisson(&d, 1.5).unwrap().chi_square.p_value
            })
            .collect();
        let (_, p) = ks_uniform(&ps).unwrap();
        assert!(p > 0.01, "KS p-value {p}");
    }

    #[test]
    fn mean_ci_of_constant_shift() {
        let ci = mean_ci(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((ci.mean - 2.5).abs() < 1e-15);
        assert!((ci.stderr - (5.0f64 / 12.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn mann_whitney_detects_shift() {
        let a: Vec<f64> = (0..200).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..200).map(|i| i as f64 + 60.0).collect();
        let mw = mann_whitney(&b, &a).unwrap();
        assert!(mw.z > 0.0 && mw.p_value < 1e-6);
        let same = mann_whitney(&a, &a).unwrap();
        assert!(same.p_value > 0.9);
    }

    #[test]
    fn noise_floor_shrinks_with_samples() {
        let mut rng = stream(4);
        let small: EmpiricalDistribution<u64> = (0..200).map(|_| poisson(&mut rng, 1.0)).collect();
        let small2: EmpiricalDistribution<u64> = (0..200).map(|_| poisson(&mut rng, 1.0)).collect();
        let big: EmpiricalDistribution<u64> = (0..20_000).map(|_| poisson(&mut rng, 1.0)).collect();
        let big2: EmpiricalDistribution<u64> = (0..20_000).map(|_| poisson(&mut rng, 1.0)).collect();
        let a = tv_noise_floor(&small, &small2, 100, &mut rng).unwrap();
        let b = tv_noise_floor(&big, &big2, 100, &mut rng).unwrap();
        assert!(b < a && b > 0.0);
    }

    #[test]
    fn geometric_fit_accepts_geometric_counts() {
        let p: f64 = 0.3;
        let mut rng = stream(31);
        let d: EmpiricalDistribution<u64> = (0..50_000)
            .map(|_| {
                let mut k = 1;
                while rng.random::<f64>() >= p {
                    k += 1;
                }
                k
            })
            .collect();
        assert!(fit_geometric(&d, p).unwrap().p_value > 0.001);
        assert!(fit_geometric(&d, 0.33).unwrap().p_value < 1e-6);
    }
}
