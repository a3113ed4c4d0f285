//! Window-restricted sampling of the cylinder process and the empirical
//! estimators built on it: hit-or-miss volume, parallel-set surface proxy,
//! capacity functional, and exceedance-tail curves over many replications.
//!
//! Replications are independent tasks keyed by (seed, experiment, replicate)
//! streams and reduced in replicate order, so a run with T workers produces
//! byte-identical statistics to a single-threaded run.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{minkowski_contains, unit_ball_volume, ConvexBody, GeometryError, Rotation};
use crate::numeric::{binomial, ln_unit_ball_volume, mean_se, wilson_halfwidth};
use crate::sampling::{poisson_count, uniform_in_ball, BaseDirectionLaw, RngStream, SamplingError};

#[derive(Debug, thiserror::Error)]
pub enum ProcessError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error("window must be bounded with the origin in its interior")]
    DegenerateWindow,
    #[error("window-to-box acceptance below 1e-3; rejection sampling stalls")]
    RejectionStall,
    #[error("surface differencing step too coarse: eps {eps} > inradius/10 = {limit}")]
    EpsTooLarge { eps: f64, limit: f64 },
    #[error("inner noise {inner_se:.3e} too large for grid spacing {min_spacing:.3e}")]
    InnerNoiseTooLarge { inner_se: f64, min_spacing: f64 },
}

/// Full specification of a stationary cylinder process: ambient dimension d,
/// flat dimension k, intensity γ and the base-direction law.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProcessConfig {
    pub d: usize,
    pub k: usize,
    pub gamma: f64,
    pub law: BaseDirectionLaw,
}

impl ProcessConfig {
    pub fn new(
        d: usize,
        k: usize,
        gamma: f64,
        law: BaseDirectionLaw,
    ) -> Result<Self, ProcessError> {
        if d == 0 || k >= d {
            return Err(SamplingError::InvalidLaw("need 0 ≤ k ≤ d−1 and d ≥ 1").into());
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(SamplingError::InvalidLaw("intensity must be positive").into());
        }
        if law.base_dim() != d - k {
            return Err(SamplingError::InvalidLaw("law base dimension must equal d − k").into());
        }
        law.validate()?;
        Ok(ProcessConfig { d, k, gamma, law })
    }

    pub fn base_dim(&self) -> usize {
        self.d - self.k
    }

    /// m_{d−k} = 𝔼 λ_{d−k}(Ξ), the mean base volume.
    pub fn base_volume_moment(&self) -> Result<f64, ProcessError> {
        Ok(self.law.moment(self.base_dim())?)
    }

    /// Volume fraction p = 1 − e^{−γ m_{d−k}}.
    pub fn volume_fraction(&self) -> Result<f64, ProcessError> {
        Ok(-(-self.gamma * self.base_volume_moment()?).exp_m1())
    }
}

/// One cylinder of a realization: spine through x with direction θ and base
/// K in the orthogonal slice, i.e. the set θ((K + x) × E_k).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Cylinder {
    pub x: Vec<f64>,
    pub theta: Rotation,
    pub base: ConvexBody,
}

impl Cylinder {
    /// w lies in the cylinder iff the first d−k coordinates of θᵀw fall in
    /// base + x; the remaining k coordinates are free.
    pub fn contains(&self, w: &[f64]) -> Result<bool, GeometryError> {
        let local = self.local_coords(w);
        self.base.contains(&local)
    }

    /// Distance from w to the cylinder (distance to the base within the
    /// orthogonal slice; the flat directions contribute nothing).
    pub fn distance(&self, w: &[f64]) -> Result<f64, GeometryError> {
        let local = self.local_coords(w);
        self.base.distance(&local)
    }

    fn local_coords(&self, w: &[f64]) -> Vec<f64> {
        let dk = self.x.len();
        let mut u = self.theta.apply_transpose(w);
        u.truncate(dk);
        for (ui, xi) in u.iter_mut().zip(&self.x) {
            *ui -= xi;
        }
        u
    }
}

/// All cylinders of one sampled process that hit the window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Realization {
    pub cylinders: Vec<Cylinder>,
    pub window: ConvexBody,
    pub sampling_radius: f64,
}

impl Realization {
    pub fn is_empty(&self) -> bool {
        self.cylinders.is_empty()
    }

    /// Membership of a point in the union set.
    pub fn contains(&self, w: &[f64]) -> Result<bool, GeometryError> {
        for cyl in &self.cylinders {
            if cyl.contains(w)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Distance from w to the nearest cylinder (infinite when empty).
    pub fn distance(&self, w: &[f64]) -> Result<f64, GeometryError> {
        let mut best = f64::INFINITY;
        for cyl in &self.cylinders {
            best = best.min(cyl.distance(w)?);
            if best == 0.0 {
                break;
            }
        }
        Ok(best)
    }
}

/// Exact restriction sampling: candidates are thrown on B_{R₀}^{d−k} with
/// R₀ = circumradius(window) + r_max, marked independently, and kept iff the
/// cylinder hits the window — equivalently iff x ∈ P_{d−k}(θᵀW) ⊕ K*. The
/// retained set has exactly the law of the cylinders of the process hitting
/// the window, and the retained count is Poisson with mean
/// γ·𝔼 λ_{d−k}(P_{d−k}(ΘᵀW) ⊕ Ξ*).
pub fn sample_realization(
    cfg: &ProcessConfig,
    window: &ConvexBody,
    rng: &mut impl Rng,
) -> Result<Realization, ProcessError> {
    let d = cfg.d;
    let k = cfg.k;
    let dk = d - k;
    let origin = vec![0.0; d];
    if !window.contains(&origin)? {
        return Err(ProcessError::DegenerateWindow);
    }
    let r_max = cfg.law.r_max()?;
    let r0 = window.circumradius_origin()? + r_max;
    let mean = cfg.gamma * unit_ball_volume(dk) * r0.powi(dk as i32);
    let n = poisson_count(mean, rng);
    let mut cylinders = Vec::new();
    for _ in 0..n {
        let x = uniform_in_ball(dk, r0, rng);
        let (theta, base) = cfg.law.sample_mark(d, k, rng)?;
        let projected = window.project_rotated(&theta, k)?;
        if minkowski_contains(&projected, &base.reflected(), &x)? {
            cylinders.push(Cylinder { x, theta, base });
        }
    }
    Ok(Realization {
        cylinders,
        window: window.clone(),
        sampling_radius: r0,
    })
}

/// Hit-or-miss estimate of F = λ_d(Z ∩ W): points are drawn uniformly in the
/// window by rejection from its bounding box. Returns (F̂, inner standard
/// error).
pub fn estimate_volume(
    real: &Realization,
    window: &ConvexBody,
    n_points: usize,
    rng: &mut impl Rng,
) -> Result<(f64, f64), ProcessError> {
    assert!(
        n_points >= 1000,
        "volume estimation needs at least 10³ points"
    );
    let vol_w = window.volume()?;
    let (lo, hi) = window.bounding_box()?;
    let vol_box: f64 = lo.iter().zip(&hi).map(|(l, h)| h - l).product();
    if vol_w / vol_box < 1e-3 {
        return Err(ProcessError::RejectionStall);
    }
    let d = window.dim();
    let mut point = vec![0.0; d];
    let mut hits = 0u64;
    for _ in 0..n_points {
        loop {
            for i in 0..d {
                point[i] = rng.gen_range(lo[i]..hi[i]);
            }
            if window.contains(&point)? {
                break;
            }
        }
        if real.contains(&point)? {
            hits += 1;
        }
    }
    let p = hits as f64 / n_points as f64;
    Ok((vol_w * p, vol_w * (p * (1.0 - p) / n_points as f64).sqrt()))
}

/// Parallel-set differencing estimator of V_{d−1}(Z ∩ W):
/// [λ̂_d((Z∩W) ⊕ B_ε) − λ̂_d(Z∩W)] / (2ε), with the ε-neighbourhood tested
/// through distance-to-cylinder and distance-to-window queries. The bias is
/// O(ε); the realization should have been sampled on a window inflated by ε
/// so that grazing cylinders are present.
pub fn estimate_surface(
    real: &Realization,
    window: &ConvexBody,
    eps: f64,
    n_points: usize,
    rng: &mut impl Rng,
) -> Result<f64, ProcessError> {
    let limit = window.inradius()? / 10.0;
    if eps > limit {
        return Err(ProcessError::EpsTooLarge { eps, limit });
    }
    let d = window.dim();
    let (lo, hi) = window.bounding_box()?;
    let lo: Vec<f64> = lo.iter().map(|l| l - eps).collect();
    let hi: Vec<f64> = hi.iter().map(|h| h + eps).collect();
    let vol_box: f64 = lo.iter().zip(&hi).map(|(l, h)| h - l).product();
    let mut point = vec![0.0; d];
    let mut in_parallel = 0u64;
    let mut in_core = 0u64;
    for _ in 0..n_points {
        for i in 0..d {
            point[i] = rng.gen_range(lo[i]..hi[i]);
        }
        if window.distance(&point)? <= eps && real.distance(&point)? <= eps {
            in_parallel += 1;
            if window.contains(&point)? && real.contains(&point)? {
                in_core += 1;
            }
        }
    }
    Ok(vol_box * (in_parallel - in_core) as f64 / n_points as f64 / (2.0 * eps))
}

/// Exact 𝔼 λ_{d−k}(P_{d−k}(ΘᵀW) ⊕ Ξ*) for rotation-invariant laws, when the
/// window's intrinsic volumes have closed forms:
/// Σ_i [κ_i κ_{d−i} / (C(d,i) κ_d)] V_i(W) m_{d−k−i}.
pub fn expected_hit_measure(
    cfg: &ProcessConfig,
    window: &ConvexBody,
) -> Result<Option<f64>, ProcessError> {
    let dk = cfg.base_dim();
    let mut acc = 0.0;
    for i in 0..=dk {
        let vi = match window.intrinsic_volume(i) {
            Ok(v) => v,
            Err(GeometryError::UnsupportedBody(_)) => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let mi = match cfg.law.moment(dk - i) {
            Ok(m) => m,
            Err(SamplingError::Geometry(GeometryError::UnsupportedBody(_))) => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        acc += rotational_mean_coeff(cfg.d, i) * vi * mi;
    }
    Ok(Some(acc))
}

/// κ_i κ_{d−i} / (C(d,i) κ_d): the coefficient of V_i(W)·V_{d−k−i}(M) in the
/// rotational average of λ_{d−k}(P_{d−k}(θᵀW) ⊕ ϱM).
pub fn rotational_mean_coeff(d: usize, i: usize) -> f64 {
    (ln_unit_ball_volume(i) + ln_unit_ball_volume(d - i) - ln_unit_ball_volume(d)).exp()
        / binomial(d, i)
}

/// Volume replicates (F̂, inner se) over deterministic per-replicate streams.
pub fn volume_replicates(
    cfg: &ProcessConfig,
    window: &ConvexBody,
    n_reps: usize,
    n_points: usize,
    seed: u64,
    experiment: u64,
) -> Result<Vec<(f64, f64)>, ProcessError> {
    (0..n_reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = RngStream::for_replicate(seed, experiment, rep as u64).rng();
            let real = sample_realization(cfg, window, &mut rng)?;
            estimate_volume(&real, window, n_points, &mut rng)
        })
        .collect()
}

/// Surface replicates; each realization is sampled on an ε-inflated ball so
/// cylinders grazing the window contribute to the parallel set.
pub fn surface_replicates(
    cfg: &ProcessConfig,
    window: &ConvexBody,
    eps: f64,
    n_reps: usize,
    n_points: usize,
    seed: u64,
    experiment: u64,
) -> Result<Vec<f64>, ProcessError> {
    let inflated = ConvexBody::centered_ball(cfg.d, window.circumradius_origin()? + eps)?;
    (0..n_reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = RngStream::for_replicate(seed, experiment, rep as u64).rng();
            let real = sample_realization(cfg, &inflated, &mut rng)?;
            estimate_surface(&real, window, eps, n_points, &mut rng)
        })
        .collect()
}

/// Empirical exceedance curves for the volume functional, centred at the
/// replicate mean.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailCurve {
    pub r_grid: Vec<f64>,
    /// P̂(F − mean ≥ r) per grid point.
    pub upper: Vec<f64>,
    /// P̂(F − mean ≤ −r) per grid point.
    pub lower: Vec<f64>,
    /// 95% Wilson half-widths for the two frequency estimates.
    pub wilson_upper: Vec<f64>,
    pub wilson_lower: Vec<f64>,
    pub n_reps: usize,
    pub mean_hat: f64,
    pub sd_hat: f64,
    pub inner_se_mean: f64,
}

/// Run `n_reps` independent replications and tabulate both exceedance tails
/// on the given grid. The inner Monte Carlo noise must be small against the
/// grid spacing (3·inner_se ≤ min spacing), otherwise the tail frequencies
/// would be smeared by estimation error rather than process variability.
pub fn empirical_tail(
    cfg: &ProcessConfig,
    window: &ConvexBody,
    n_reps: usize,
    n_points: usize,
    r_grid: &[f64],
    seed: u64,
    experiment: u64,
) -> Result<TailCurve, ProcessError> {
    assert!(
        n_reps >= 100,
        "tail estimation needs at least 100 replications"
    );
    assert!(
        r_grid.windows(2).all(|w| w[1] > w[0]),
        "r grid must be strictly increasing"
    );
    let reps = volume_replicates(cfg, window, n_reps, n_points, seed, experiment)?;
    let values: Vec<f64> = reps.iter().map(|(f, _)| *f).collect();
    let inner: Vec<f64> = reps.iter().map(|(_, s)| *s).collect();
    let inner_se_mean = inner.iter().sum::<f64>() / inner.len() as f64;
    let min_spacing = r_grid
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    if r_grid.len() >= 2 && 3.0 * inner_se_mean > min_spacing {
        return Err(ProcessError::InnerNoiseTooLarge {
            inner_se: inner_se_mean,
            min_spacing,
        });
    }
    let (mean_hat, _) = mean_se(&values);
    let sd_hat = (values
        .iter()
        .map(|v| (v - mean_hat) * (v - mean_hat))
        .sum::<f64>()
        / (values.len() as f64 - 1.0))
        .sqrt();
    let mut upper = Vec::with_capacity(r_grid.len());
    let mut lower = Vec::with_capacity(r_grid.len());
    let mut wilson_upper = Vec::with_capacity(r_grid.len());
    let mut wilson_lower = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let up = values.iter().filter(|v| **v - mean_hat >= r).count() as u64;
        let lo = values.iter().filter(|v| **v - mean_hat <= -r).count() as u64;
        upper.push(up as f64 / n_reps as f64);
        lower.push(lo as f64 / n_reps as f64);
        wilson_upper.push(wilson_halfwidth(up, n_reps as u64));
        wilson_lower.push(wilson_halfwidth(lo, n_reps as u64));
    }
    Ok(TailCurve {
        r_grid: r_grid.to_vec(),
        upper,
        lower,
        wilson_upper,
        wilson_lower,
        n_reps,
        mean_hat,
        sd_hat,
        inner_se_mean,
    })
}

/// Empirical capacity functional: the fraction of replications in which at
/// least one cylinder hits C. Returns (fraction, binomial se).
pub fn capacity_empirical(
    cfg: &ProcessConfig,
    c: &ConvexBody,
    n_reps: usize,
    seed: u64,
    experiment: u64,
) -> Result<(f64, f64), ProcessError> {
    let hits: Result<Vec<bool>, ProcessError> = (0..n_reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = RngStream::for_replicate(seed, experiment, rep as u64).rng();
            Ok(!sample_realization(cfg, c, &mut rng)?.is_empty())
        })
        .collect();
    let hits = hits?;
    let p = hits.iter().filter(|h| **h).count() as f64 / n_reps as f64;
    Ok((p, (p * (1.0 - p) / n_reps as f64).sqrt()))
}

/// Capacity functional through the analytic identity 1 − exp(−γ·Ê), where
/// Ê averages λ_{d−k}(P_{d−k}(ΘᵀC) ⊕ Ξ*) over sampled marks. Per-mark values
/// use the Steiner closed form when the projected window is a ball and the
/// base has closed-form intrinsic volumes, and fall back to Minkowski-sum
/// hit-or-miss otherwise. Returns (probability, propagated se).
pub fn capacity_analytic(
    cfg: &ProcessConfig,
    c: &ConvexBody,
    n_mark_samples: usize,
    rng: &mut impl Rng,
) -> Result<(f64, f64), ProcessError> {
    assert!(n_mark_samples > 0);
    let mut values = Vec::with_capacity(n_mark_samples);
    for _ in 0..n_mark_samples {
        let (theta, base) = cfg.law.sample_mark(cfg.d, cfg.k, rng)?;
        let projected = c.project_rotated(&theta, cfg.k)?;
        values.push(hit_measure_for_mark(&projected, &base, rng)?);
    }
    let (e_hat, se_e) = mean_se(&values);
    let prob = -(-cfg.gamma * e_hat).exp_m1();
    let se = cfg.gamma * (-cfg.gamma * e_hat).exp() * se_e;
    Ok((prob, se))
}

/// λ_{d−k}(P ⊕ K*) for one mark: exact Steiner path when P is a ball and K
/// has closed-form intrinsic volumes, Monte Carlo otherwise.
fn hit_measure_for_mark(
    projected: &ConvexBody,
    base: &ConvexBody,
    rng: &mut impl Rng,
) -> Result<f64, ProcessError> {
    if let ConvexBody::Ball { radius, .. } = projected {
        match base.steiner_ball_sum_volume(*radius) {
            Ok(v) => return Ok(v),
            Err(GeometryError::UnsupportedBody(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    let (est, _se) = crate::geometry::minkowski_volume_mc(projected, &base.reflected(), 4000, rng)?;
    Ok(est)
}
