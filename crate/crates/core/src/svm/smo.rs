//! Platt-style sequential minimal optimization for the C-SVM dual
//!
//! ```text
//! maximize   W(a) = sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j K_ij
//! subject to 0 <= a_i <= C,  sum_i a_i y_i = 0
//! ```
//!
//! The solver keeps `G_i = sum_j a_j y_j K_ij` for every training point, so
//! prediction errors `E_i = G_i + b - y_i` are always exact for the current
//! bias. Kernel rows are computed on demand and held in an LRU cache bounded
//! by `SmoParams::cache_bytes`.

use rand::RngExt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use super::model::SvmModel;
use crate::embedding::EmbeddingDataset;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoParams {
    /// Box constraint.
    pub c: f64,
    /// KKT tolerance on `y f(x)`.
    pub tol: f64,
    /// Maximum number of sweeps over the full training set.
    pub max_passes: usize,
    pub cache_bytes: usize,
    pub seed: u64,
    /// Train on a uniform random subset of this many records, if set.
    pub subsample: Option<usize>,
}

impl Default for SmoParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            tol: 1e-3,
            max_passes: 10,
            cache_bytes: 256 << 20,
            seed: 0,
            subsample: None,
        }
    }
}

impl SmoParams {
    fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Contract(format!("C = {} must be positive", self.c)));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Contract(format!(
                "tol = {} must lie in (0, 1)",
                self.tol
            )));
        }
        if self.max_passes == 0 {
            return Err(Error::Contract("max_passes must be at least 1".into()));
        }
        Ok(())
    }
}

/// Everything the solver produced, including the full multiplier vector.
#[derive(Debug, Clone)]
pub struct SmoOutcome {
    pub model: SvmModel,
    /// One multiplier per training record (zeros included).
    pub alphas: Vec<f64>,
    /// Dual objective after each outer sweep.
    pub objective_trace: Vec<f64>,
    pub steps: usize,
    pub converged: bool,
}

pub fn smo_train(
    data: &EmbeddingDataset,
    spec: &KernelSpec,
    params: &SmoParams,
) -> Result<SvmModel> {
    smo_train_traced(data, spec, params).map(|o| o.model)
}

pub fn smo_train_traced(
    data: &EmbeddingDataset,
    spec: &KernelSpec,
    params: &SmoParams,
) -> Result<SmoOutcome> {
    params.validate()?;
    Error::check_dim(spec.dimension, data.dimension())?;
    let sampled;
    let data = match params.subsample {
        Some(n) if n < data.len() => {
            sampled = data.subsample(n, rng::derive_seed(params.seed, 0));
            &sampled
        }
        _ => data,
    };
    data.require_both_classes(1)?;

    let dim = data.dimension();
    let x = data.feature_matrix();
    let y: Vec<f64> = data.records().iter().map(|r| r.label.sign()).collect();
    let mut solver = Solver::new(&x, dim, &y, *spec, params)?;
    let converged = solver.run()?;

    let support: Vec<usize> = (0..y.len()).filter(|&i| solver.alpha[i] > 0.0).collect();
    let model = SvmModel {
        support_vectors: support
            .iter()
            .map(|&i| x[i * dim..(i + 1) * dim].to_vec())
            .collect(),
        support_labels: support.iter().map(|&i| y[i]).collect(),
        alphas: support.iter().map(|&i| solver.alpha[i]).collect(),
        bias: solver.b,
        c: params.c,
        kernel: *spec,
    };
    Ok(SmoOutcome {
        model,
        alphas: solver.alpha,
        objective_trace: solver.trace,
        steps: solver.steps,
        converged,
    })
}

/// LRU cache of full kernel rows.
struct RowCache {
    rows: Vec<Vec<f64>>,
    owner: Vec<usize>,
    stamp: Vec<u64>,
    slot_of: Vec<Option<usize>>,
    capacity: usize,
    clock: u64,
}

impl RowCache {
    fn new(n: usize, cache_bytes: usize) -> Self {
        let row_bytes = (n * std::mem::size_of::<f64>()).max(1);
        let capacity = (cache_bytes / row_bytes).clamp(2, n.max(2));
        Self {
            rows: Vec::new(),
            owner: Vec::new(),
            stamp: Vec::new(),
            slot_of: vec![None; n],
            capacity,
            clock: 0,
        }
    }
}

struct Solver<'a> {
    x: &'a [f64],
    dim: usize,
    y: &'a [f64],
    kernel: KernelSpec,
    c: f64,
    tol: f64,
    max_passes: usize,
    alpha: Vec<f64>,
    grad: Vec<f64>,
    diag: Vec<f64>,
    b: f64,
    cache: RowCache,
    rng: rng::StreamRng,
    trace: Vec<f64>,
    steps: usize,
}

/// Multipliers this close to a bound are snapped onto it.
const SNAP: f64 = 1e-12;
/// Minimum multiplier change counted as progress.
const MIN_STEP: f64 = 1e-14;

impl<'a> Solver<'a> {
    fn new(
        x: &'a [f64],
        dim: usize,
        y: &'a [f64],
        kernel: KernelSpec,
        params: &SmoParams,
    ) -> Result<Self> {
        let n = y.len();
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            let xi = &x[i * dim..(i + 1) * dim];
            let k = kernel.eval_unchecked(xi, xi);
            if !k.is_finite() {
                return Err(Error::Numeric(format!("kernel value K({i}, {i}) = {k}")));
            }
            diag.push(k);
        }
        Ok(Self {
            x,
            dim,
            y,
            kernel,
            c: params.c,
            tol: params.tol,
            max_passes: params.max_passes,
            alpha: vec![0.0; n],
            grad: vec![0.0; n],
            diag,
            b: 0.0,
            cache: RowCache::new(n, params.cache_bytes),
            rng: rng::stream(params.seed),
            trace: Vec::new(),
            steps: 0,
        })
    }

    fn n(&self) -> usize {
        self.y.len()
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.x[i * self.dim..(i + 1) * self.dim]
    }

    fn error(&self, i: usize) -> f64 {
        self.grad[i] + self.b - self.y[i]
    }

    fn is_free(&self, i: usize) -> bool {
        self.alpha[i] > 0.0 && self.alpha[i] < self.c
    }

    /// Ensures row `i` is cached and returns its slot.
    fn row_slot(&mut self, i: usize) -> Result<usize> {
        self.cache.clock += 1;
        if let Some(slot) = self.cache.slot_of[i] {
            self.cache.stamp[slot] = self.cache.clock;
            return Ok(slot);
        }
        let n = self.n();
        let xi = self.point(i).to_vec();
        let (x, dim, kernel) = (self.x, self.dim, self.kernel);
        let mut row = vec![0.0; n];
        row.par_iter_mut()
            .enumerate()
            .for_each(|(j, k)| *k = kernel.eval_unchecked(&xi, &x[j * dim..(j + 1) * dim]));
        if let Some(j) = row.iter().position(|k| !k.is_finite()) {
            return Err(Error::Numeric(format!(
                "kernel value K({i}, {j}) = {}",
                row[j]
            )));
        }
        let slot = if self.cache.rows.len() < self.cache.capacity {
            self.cache.rows.push(row);
            self.cache.owner.push(i);
            self.cache.stamp.push(self.cache.clock);
            self.cache.rows.len() - 1
        } else {
            let slot = (0..self.cache.rows.len())
                .min_by_key(|&s| self.cache.stamp[s])
                .expect("cache has capacity >= 2");
            self.cache.slot_of[self.cache.owner[slot]] = None;
            self.cache.rows[slot] = row;
            self.cache.owner[slot] = i;
            self.cache.stamp[slot] = self.cache.clock;
            slot
        };
        self.cache.slot_of[i] = Some(slot);
        Ok(slot)
    }

    fn objective(&self) -> f64 {
        self.alpha
            .iter()
            .zip(self.y)
            .zip(&self.grad)
            .map(|((a, y), g)| a - 0.5 * a * y * g)
            .sum()
    }

    fn run(&mut self) -> Result<bool> {
        let n = self.n();
        let max_steps = 100_000usize.max(200 * n) * self.max_passes;
        let mut examine_all = true;
        let mut full_passes = 0;
        loop {
            let mut changed = 0usize;
            if examine_all {
                full_passes += 1;
                for i in 0..n {
                    changed += usize::from(self.examine(i)?);
                }
            } else {
                for i in 0..n {
                    if self.is_free(i) {
                        changed += usize::from(self.examine(i)?);
                    }
                }
            }
            self.trace.push(self.objective());

            if examine_all && changed == 0 {
                return Ok(true);
            }
            if self.steps >= max_steps || (examine_all && full_passes >= self.max_passes) {
                log::warn!(
                    "SMO stopped after {} steps and {full_passes} full sweeps without meeting tol {}",
                    self.steps,
                    self.tol
                );
                return Ok(false);
            }
            if examine_all {
                examine_all = false;
            } else if changed == 0 {
                examine_all = true;
            }
        }
    }

    fn violates_kkt(&self, i: usize) -> bool {
        let r = self.error(i) * self.y[i];
        (r < -self.tol && self.alpha[i] < self.c) || (r > self.tol && self.alpha[i] > 0.0)
    }

    fn examine(&mut self, i2: usize) -> Result<bool> {
        if !self.violates_kkt(i2) {
            return Ok(false);
        }
        let n = self.n();
        let e2 = self.error(i2);

        // Second choice: the free multiplier with the largest |E1 - E2|.
        let mut best: Option<(usize, f64)> = None;
        let mut free_count = 0;
        for i in 0..n {
            if self.is_free(i) {
                free_count += 1;
                let gap = (self.error(i) - e2).abs();
                if best.is_none_or(|(_, g)| gap > g) {
                    best = Some((i, gap));
                }
            }
        }
        if free_count > 1 {
            if let Some((i1, _)) = best {
                if self.take_step(i1, i2)? {
                    return Ok(true);
                }
            }
        }

        let start = self.rng.random_range(0..n);
        for k in 0..n {
            let i1 = (start + k) % n;
            if self.is_free(i1) && self.take_step(i1, i2)? {
                return Ok(true);
            }
        }
        let start = self.rng.random_range(0..n);
        for k in 0..n {
            let i1 = (start + k) % n;
            if self.take_step(i1, i2)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> Result<bool> {
        if i1 == i2 {
            return Ok(false);
        }
        let c = self.c;
        let (y1, y2) = (self.y[i1], self.y[i2]);
        let (alph1, alph2) = (self.alpha[i1], self.alpha[i2]);
        let (e1, e2) = (self.error(i1), self.error(i2));
        let s = y1 * y2;

        let (lo, hi) = if y1 != y2 {
            ((alph2 - alph1).max(0.0), (c + alph2 - alph1).min(c))
        } else {
            ((alph1 + alph2 - c).max(0.0), (alph1 + alph2).min(c))
        };
        if hi - lo <= MIN_STEP {
            return Ok(false);
        }

        let slot1 = self.row_slot(i1)?;
        let k12 = self.cache.rows[slot1][i2];
        let (k11, k22) = (self.diag[i1], self.diag[i2]);
        let eta = k11 + k22 - 2.0 * k12;

        // W along the constraint line, relative to the current point:
        // gain(a) = y2 (E1 - E2) (a - alph2) - eta/2 (a - alph2)^2.
        let slope = y2 * (e1 - e2);
        let mut a2 = if eta > 0.0 {
            (alph2 + slope / eta).clamp(lo, hi)
        } else {
            let gain = |a: f64| slope * (a - alph2) - 0.5 * eta * (a - alph2) * (a - alph2);
            let (g_lo, g_hi) = (gain(lo), gain(hi));
            if g_lo > g_hi + 1e-12 {
                lo
            } else if g_hi > g_lo + 1e-12 {
                hi
            } else {
                alph2
            }
        };
        if a2 < SNAP * c {
            a2 = 0.0;
        } else if a2 > c - SNAP * c {
            a2 = c;
        }
        if (a2 - alph2).abs() < MIN_STEP * (a2 + alph2 + MIN_STEP) {
            return Ok(false);
        }
        let mut a1 = alph1 + s * (alph2 - a2);
        if a1 < SNAP * c {
            a2 += s * a1;
            a1 = 0.0;
        } else if a1 > c - SNAP * c {
            a2 += s * (a1 - c);
            a1 = c;
        }
        a2 = a2.clamp(0.0, c);

        let (d1, d2) = ((a1 - alph1) * y1, (a2 - alph2) * y2);
        let b1 = self.b - e1 - d1 * k11 - d2 * k12;
        let b2 = self.b - e2 - d1 * k12 - d2 * k22;
        let free1 = a1 > 0.0 && a1 < c;
        let free2 = a2 > 0.0 && a2 < c;
        self.b = if free1 {
            b1
        } else if free2 {
            b2
        } else {
            0.5 * (b1 + b2)
        };

        let slot2 = self.row_slot(i2)?;
        // row_slot(i2) never evicts the most recently used slot (i1).
        debug_assert_eq!(self.cache.owner[slot1], i1);
        let (r1, r2) = (&self.cache.rows[slot1], &self.cache.rows[slot2]);
        for ((g, k1), k2) in self.grad.iter_mut().zip(r1).zip(r2) {
            *g += d1 * k1 + d2 * k2;
        }
        self.alpha[i1] = a1;
        self.alpha[i2] = a2;
        self.steps += 1;
        Ok(true)
    }
}
