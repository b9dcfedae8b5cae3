//! Independent reference implementations used as test oracles.

#![allow(dead_code)]

use facetrait::{EmbeddingDataset, EmbeddingRecord, GenderLabel};
use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random labeled points in `[-1, 1]^d`, guaranteed to contain both classes.
pub fn random_dataset(r: &mut ChaCha8Rng, n: usize, d: usize) -> EmbeddingDataset {
    assert!(n >= 2);
    let mut records: Vec<EmbeddingRecord> = (0..n)
        .map(|_| {
            let x = (0..d).map(|_| r.random_range(-1.0f32..1.0)).collect();
            let label = if r.random::<bool>() {
                GenderLabel::Male
            } else {
                GenderLabel::Female
            };
            EmbeddingRecord::new(x, label)
        })
        .collect();
    records[0].label = GenderLabel::Female;
    records[1].label = GenderLabel::Male;
    EmbeddingDataset::from_records(d, records, "random").unwrap()
}

pub fn rows(data: &EmbeddingDataset) -> Vec<Vec<f64>> {
    data.records().iter().map(|r| r.features_f64()).collect()
}

pub fn signs(data: &EmbeddingDataset) -> Vec<f64> {
    data.records().iter().map(|r| r.label.sign()).collect()
}

#[derive(Debug, Clone, Copy)]
pub enum OracleKernel {
    Linear,
    Poly(i32),
    Gaussian,
}

/// Kernel value written directly from the textbook definitions.
pub fn oracle_kernel(kind: OracleKernel, sigma: f64, x: &[f64], y: &[f64]) -> f64 {
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    match kind {
        OracleKernel::Linear => dot / (sigma * sigma),
        OracleKernel::Poly(q) => (1.0 + dot / (sigma * sigma)).powi(q),
        OracleKernel::Gaussian => {
            let dist: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
            (-dist / (sigma * sigma)).exp()
        }
    }
}

pub fn gram(kind: OracleKernel, sigma: f64, x: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(x.len(), x.len(), |i, j| {
        oracle_kernel(kind, sigma, &x[i], &x[j])
    })
}

/// `sum(a) - 1/2 sum_ij a_i a_j y_i y_j K_ij`.
pub fn dual_objective(k: &DMatrix<f64>, y: &[f64], alpha: &[f64]) -> f64 {
    let n = y.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * k[(i, j)];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Euclidean projection onto `{0 <= a <= c, y.a = 0}` by bisection on the
/// multiplier of the equality constraint.
fn project(v: &[f64], y: &[f64], c: f64, out: &mut [f64]) {
    let g = |mu: f64| -> f64 {
        v.iter()
            .zip(y)
            .map(|(vi, yi)| (vi - mu * yi).clamp(0.0, c) * yi)
            .sum()
    };
    let bound = v.iter().map(|x| x.abs()).fold(0.0, f64::max) + c + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * bound {
            break;
        }
    }
    let mu = 0.5 * (lo + hi);
    for ((o, vi), yi) in out.iter_mut().zip(v).zip(y) {
        *o = (vi - mu * yi).clamp(0.0, c);
    }
}

fn largest_eigenvalue(q: &DMatrix<f64>) -> f64 {
    q.clone().symmetric_eigenvalues().max().max(1e-12)
}

/// Optimal dual objective by projected accelerated gradient ascent with
/// restarts, polished by solving the KKT system on the detected free set.
pub fn qp_dual_oracle(k: &DMatrix<f64>, y: &[f64], c: f64, iterations: usize) -> f64 {
    let n = y.len();
    let yv = DVector::from_column_slice(y);
    let q = DMatrix::from_fn(n, n, |i, j| y[i] * y[j] * k[(i, j)]);
    let step = 1.0 / largest_eigenvalue(&q);
    let obj = |a: &DVector<f64>| a.sum() - 0.5 * a.dot(&(&q * a));

    let mut a = DVector::zeros(n);
    let mut z = a.clone();
    let mut next = DVector::zeros(n);
    let mut stepped = vec![0.0; n];
    let mut t = 1.0f64;
    let mut prev = obj(&a);
    let mut quiet = 0;
    for _ in 0..iterations {
        let qz = &q * &z;
        for i in 0..n {
            stepped[i] = z[i] + step * (1.0 - qz[i]);
        }
        project(&stepped, y, c, next.as_mut_slice());
        let value = obj(&next);
        if value < prev {
            z.copy_from(&a);
            t = 1.0;
            continue;
        }
        let moved = (&next - &a).amax();
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        z = &next + (&next - &a) * ((t - 1.0) / t_next);
        a.copy_from(&next);
        t = t_next;
        quiet = if value - prev <= 1e-16 * value.abs().max(1.0) && moved <= 1e-12 * c {
            quiet + 1
        } else {
            0
        };
        prev = value;
        if quiet >= 50 {
            break;
        }
    }

    let mut best = prev;
    let eps = 1e-7 * c;
    let free: Vec<usize> = (0..n).filter(|&i| a[i] > eps && a[i] < c - eps).collect();
    if !free.is_empty() {
        let fixed: Vec<f64> = (0..n)
            .map(|i| if a[i] >= c - eps { c } else { 0.0 })
            .collect();
        let m = free.len();
        let mut sys = DMatrix::zeros(m + 1, m + 1);
        let mut rhs = DVector::zeros(m + 1);
        for (r, &i) in free.iter().enumerate() {
            for (s, &j) in free.iter().enumerate() {
                sys[(r, s)] = q[(i, j)];
            }
            sys[(r, m)] = y[i];
            sys[(m, r)] = y[i];
            let bounded: f64 = (0..n)
                .filter(|j| !free.contains(j))
                .map(|j| q[(i, j)] * fixed[j])
                .sum();
            rhs[r] = 1.0 - bounded;
        }
        rhs[m] = -(0..n)
            .filter(|j| !free.contains(j))
            .map(|j| y[j] * fixed[j])
            .sum::<f64>();
        if let Ok(pinv) = sys.pseudo_inverse(1e-12) {
            let sol = pinv * rhs;
            let mut polished = DVector::from_vec(fixed);
            for (r, &i) in free.iter().enumerate() {
                polished[i] = sol[r];
            }
            let feasible = polished.iter().all(|&v| v >= -1e-12 && v <= c + 1e-12)
                && polished.dot(&yv).abs() < 1e-9;
            if feasible {
                best = best.max(obj(&polished));
            }
        }
    }
    best
}

/// Exhaustive nearest-neighbor vote, written independently of the library.
pub fn brute_knn(
    train: &[(Vec<f64>, GenderLabel)],
    query: &[f64],
    k: usize,
    cosine: bool,
    inverse_distance: bool,
) -> (GenderLabel, f64) {
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut dists: Vec<(f64, usize)> = train
        .iter()
        .enumerate()
        .map(|(i, (x, _))| {
            let d = if cosine {
                let dot: f64 = x.iter().zip(query).map(|(a, b)| a * b).sum();
                1.0 - dot / (norm(x) * norm(query))
            } else {
                x.iter()
                    .zip(query)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            };
            (d, i)
        })
        .collect();
    dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let (mut female, mut male) = (0.0, 0.0);
    for &(d, i) in dists.iter().take(k) {
        let w = if inverse_distance {
            1.0 / (d + 1e-12)
        } else {
            1.0
        };
        match train[i].1 {
            GenderLabel::Female => female += w,
            GenderLabel::Male => male += w,
        }
    }
    let label = if male > female {
        GenderLabel::Male
    } else {
        GenderLabel::Female
    };
    (label, male / (male + female))
}

/// Probability that a random positive outscores a random negative, ties
/// counted as one half.
pub fn mann_whitney_auc(scores: &[f64], positive: &[bool]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for (i, &si) in scores.iter().enumerate() {
        if !positive[i] {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if positive[j] {
                continue;
            }
            pairs += 1.0;
            if si > sj {
                wins += 1.0;
            } else if si == sj {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

/// Central finite-difference gradient.
pub fn numeric_gradient(mut f: impl FnMut(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = probe[i];
            probe[i] = orig + h;
            let up = f(&probe);
            probe[i] = orig - h;
            let down = f(&probe);
            probe[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `max |a - n| / max(1, |n|)` style relative error over all components.
pub fn relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff: f64 = analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n) * (a - n))
        .sum::<f64>()
        .sqrt();
    let scale: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt()
        + numeric.iter().map(|n| n * n).sum::<f64>().sqrt();
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}
