//! Analytic tail bounds for the volume and intrinsic volumes of the union
//! set in a window: a numeric Chernoff optimiser over the general convex
//! exponent, plus every closed-form special case (rotated bases, dilated and
//! rotated bases, spherical windows, ball base in a ball window, the k-flat
//! degenerate case, and the intrinsic-volume coefficient machinery).
//!
//! All bounds are returned in log space; the probability is never
//! materialised, so the interesting deep-tail regime cannot underflow.
//! Every exponent evaluated here has the shape
//!
//!   w(s) = scale · Σ_t weight_t · Ψ(± s · arg_t),   weight_t, arg_t ≥ 0,
//!
//! which is convex in s with w(0) = 0 — exactly what the bracket-and-ternary
//! optimiser requires.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{c_constant, unit_ball_volume, ConvexBody, GeometryError};
use crate::meanvalues::{self, MeanValueError};
pub use crate::numeric::psi;
use crate::numeric::{binomial, ln_unit_ball_volume, ls_slope, mean_se};
use crate::process::{rotational_mean_coeff, ProcessConfig, ProcessError};
use crate::sampling::SamplingError;

#[derive(Debug, thiserror::Error)]
pub enum BoundsError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error(transparent)]
    MeanValue(#[from] MeanValueError),
    #[error("lower-tail closed form undefined at r = {r} ≥ αβ = {alpha_beta}")]
    DomainError { r: f64, alpha_beta: f64 },
    #[error("intrinsic order j = {j} below the flat dimension k = {k}")]
    JBelowK { j: usize, k: usize },
    #[error("no exact evaluation path for this window/law pair; use the Monte Carlo variant")]
    NoExactPath,
    #[error("exponent evaluation is not finite")]
    NonFinite,
    #[error("operation requires a rotated-fixed base law")]
    NeedsFixedLaw,
}

/// Which tail of the distribution a bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    Upper,
    Lower,
}

impl Tail {
    fn sign(self) -> f64 {
        match self {
            Tail::Upper => 1.0,
            Tail::Lower => -1.0,
        }
    }
}

/// How a mark expectation was evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalPath {
    /// Steiner expansion in the ball-window geometry.
    ExactSteiner,
    /// Rotational mean-value sum over intrinsic volumes.
    ExactRotational,
    /// Sampled marks (with hit-or-miss inner volumes where needed).
    MonteCarlo { n_marks: usize },
}

/// The convex Chernoff exponent w(s) = scale·Σ weight·Ψ(±s·arg).
#[derive(Debug, Clone)]
pub struct ExponentSum {
    scale: f64,
    terms: Vec<(f64, f64)>,
    pub path: EvalPath,
}

impl ExponentSum {
    pub fn eval(&self, s: f64, tail: Tail) -> f64 {
        let sign = tail.sign();
        self.scale
            * self
                .terms
                .iter()
                .map(|(w, a)| w * psi(sign * s * a))
                .sum::<f64>()
    }

    /// Standard error of w(s) for Monte Carlo paths (None when exact).
    pub fn se_at(&self, s: f64, tail: Tail) -> Option<f64> {
        match self.path {
            EvalPath::MonteCarlo { n_marks } => {
                let sign = tail.sign();
                let contributions: Vec<f64> = self
                    .terms
                    .iter()
                    .map(|(w, a)| self.scale * w * n_marks as f64 * psi(sign * s * a))
                    .collect();
                let (_, se) = mean_se(&contributions);
                Some(se)
            }
            _ => None,
        }
    }
}

/// Result of one tail-bound evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogBound {
    pub log_bound: f64,
    pub s_star: f64,
    /// Standard error of the exponent at s*, for Monte Carlo paths.
    pub se: Option<f64>,
    pub path: EvalPath,
}

impl LogBound {
    fn exact(log_bound: f64, s_star: f64, path: EvalPath) -> Self {
        LogBound {
            log_bound,
            s_star,
            se: None,
            path,
        }
    }
}

/// Closed-form Chernoff parameters (α, β): the bound is β·f(r/(αβ)) with the
/// Poisson-type rate functions below. For the volume case α·β ≥ 𝔼F always.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundParams {
    pub alpha: f64,
    pub beta: f64,
}

/// x − (1+x)·ln(1+x): the upper-tail Poisson rate shape, ≤ 0 for x ≥ 0.
/// Series evaluation near zero avoids the x² cancellation.
pub fn chernoff_rate_upper(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x == 0.0 {
        0.0
    } else if x <= 1e-4 {
        // −x²/2 + x³/6 − x⁴/12 + x⁵/20 (alternating, coefficients 1/(m(m−1)))
        -x * x / 2.0 + x.powi(3) / 6.0 - x.powi(4) / 12.0 + x.powi(5) / 20.0
    } else {
        x - (1.0 + x) * x.ln_1p()
    }
}

/// −x − (1−x)·ln(1−x): the lower-tail rate shape on 0 ≤ x < 1.
pub fn chernoff_rate_lower(x: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&x));
    if x == 0.0 {
        0.0
    } else if x <= 1e-4 {
        -x * x / 2.0 - x.powi(3) / 6.0 - x.powi(4) / 12.0 - x.powi(5) / 20.0
    } else {
        -x - (1.0 - x) * (-x).ln_1p()
    }
}

/// Minimise g(s) = w(s) − r·s over s ≥ 0 for a convex w with w(0) = 0.
///
/// Bracket doubling from `s_hint` (default 1e−6) until g stops decreasing,
/// then ternary search; non-finite evaluations count as +∞, and if w
/// overflows before any finite bracket exists the trivial bound (0, 0) is
/// returned. The returned g(s*) is ≤ 0 because s = 0 is always feasible.
pub fn chernoff_optimize(w: impl Fn(f64) -> f64, r: f64, s_hint: Option<f64>) -> (f64, f64) {
    let g = |s: f64| -> f64 {
        let v = w(s) - r * s;
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    if r <= 0.0 {
        // g(s) = w(s) ≥ 0 = g(0) by convexity, so s* = 0.
        return (0.0, 0.0);
    }
    let mut s0 = s_hint.unwrap_or(1e-6).max(1e-280);
    let mut guard = 0;
    while !g(s0).is_finite() && s0 > 1e-280 {
        s0 /= 8.0;
        guard += 1;
        if guard > 400 {
            return (0.0, 0.0);
        }
    }
    if !g(s0).is_finite() {
        return (0.0, 0.0);
    }
    let mut hi = s0;
    let mut g_hi = g(hi);
    for _ in 0..1100 {
        if hi > 1e290 {
            break;
        }
        let next = 2.0 * hi;
        let g_next = g(next);
        if g_next >= g_hi {
            break;
        }
        hi = next;
        g_hi = g_next;
    }
    let mut lo = 0.0_f64;
    let mut hi = 2.0 * hi;
    for _ in 0..300 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if g(m1) <= g(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let s_star = 0.5 * (lo + hi);
    (s_star, g(s_star).min(0.0))
}

fn scale_p_over_m(cfg: &ProcessConfig) -> Result<f64, BoundsError> {
    let m = cfg.base_volume_moment()?;
    Ok(cfg.volume_fraction()? / m)
}

/// Exact exponent for the volume tail under a general law/window: tries the
/// Steiner path (ball windows), then the rotational mean-value path (windows
/// with closed-form intrinsic volumes); both need the base template's
/// intrinsic volumes.
pub fn volume_exponent(
    cfg: &ProcessConfig,
    window: &ConvexBody,
) -> Result<ExponentSum, BoundsError> {
    let dk = cfg.base_dim();
    let template = cfg.law.template_body()?;
    let template_vs = match intrinsic_all(&template, dk) {
        Some(v) => v,
        None => return Err(BoundsError::NoExactPath),
    };
    let template_vol = template_vs[dk];
    let diam_k = window.diameter()?.powi(cfg.k as i32);
    let atoms = cfg.law.scaling_atoms();
    let scale = scale_p_over_m(cfg)?;
    let mut terms = Vec::new();
    if let ConvexBody::Ball { radius, .. } = window {
        // λ(B_R^{d−k} ⊕ Ξ*) = Σ_i R^{d−k−i} κ_{d−k−i} V_i(Ξ).
        for (r_a, p_a) in &atoms {
            let arg = template_vol * r_a.powi(dk as i32) * diam_k;
            for i in 0..=dk {
                let w = p_a
                    * radius.powi((dk - i) as i32)
                    * unit_ball_volume(dk - i)
                    * template_vs[i]
                    * r_a.powi(i as i32);
                terms.push((w, arg));
            }
        }
        return Ok(ExponentSum {
            scale,
            terms,
            path: EvalPath::ExactSteiner,
        });
    }
    let window_vs = match intrinsic_all(window, dk) {
        Some(v) => v,
        None => return Err(BoundsError::NoExactPath),
    };
    for (r_a, p_a) in &atoms {
        let arg = template_vol * r_a.powi(dk as i32) * diam_k;
        for i in 0..=dk {
            let w = p_a
                * rotational_mean_coeff(cfg.d, i)
                * window_vs[i]
                * template_vs[dk - i]
                * r_a.powi((dk - i) as i32);
            terms.push((w, arg));
        }
    }
    Ok(ExponentSum {
        scale,
        terms,
        path: EvalPath::ExactRotational,
    })
}

/// Monte Carlo exponent over sampled marks; per-mark hit measures use the
/// Steiner form when available and hit-or-miss otherwise. The base volume
/// comes from the template when it has a closed form, and is itself
/// estimated when it does not.
pub fn volume_exponent_mc(
    cfg: &ProcessConfig,
    window: &ConvexBody,
    n_marks: usize,
    n_inner: usize,
    rng: &mut impl Rng,
) -> Result<ExponentSum, BoundsError> {
    assert!(n_marks > 0);
    let dk = cfg.base_dim();
    let diam_k = window.diameter()?.powi(cfg.k as i32);
    let template = cfg.law.template_body()?;
    let template_vol = template.volume().ok();
    let mut terms = Vec::with_capacity(n_marks);
    let mut base_vols = Vec::with_capacity(n_marks);
    for _ in 0..n_marks {
        let (theta, base) = cfg.law.sample_mark(cfg.d, cfg.k, rng)?;
        let projected = window.project_rotated(&theta, cfg.k)?;
        let pv = mark_hit_measure(&projected, &base, n_inner, rng)?;
        let bv = match (template_vol, base_volume_scale(cfg, &base)) {
            (Some(tv), Some(r)) => tv * r.powi(dk as i32),
            _ => {
                let origin = ConvexBody::PolytopeV {
                    vertices: vec![vec![0.0; dk]],
                };
                crate::geometry::minkowski_volume_mc(&base, &origin, n_inner, rng)?.0
            }
        };
        base_vols.push(bv);
        terms.push((pv / n_marks as f64, bv * diam_k));
    }
    // p/m from the exact moment when available, from the sample otherwise.
    let scale = match scale_p_over_m(cfg) {
        Ok(s) => s,
        Err(_) => {
            let m_hat = base_vols.iter().sum::<f64>() / n_marks as f64;
            -(-cfg.gamma * m_hat).exp_m1() / m_hat
        }
    };
    Ok(ExponentSum {
        scale,
        terms,
        path: EvalPath::MonteCarlo { n_marks },
    })
}

fn base_volume_scale(cfg: &ProcessConfig, _base: &ConvexBody) -> Option<f64> {
    // Built-in laws sample bases as rotations of a dilated template; the
    // dilation factor is recoverable only for single-atom laws. Multi-atom
    // laws go through the exact exponent path anyway.
    let atoms = cfg.law.scaling_atoms();
    if atoms.len() == 1 {
        Some(atoms[0].0)
    } else {
        None
    }
}

fn mark_hit_measure(
    projected: &ConvexBody,
    base: &ConvexBody,
    n_inner: usize,
    rng: &mut impl Rng,
) -> Result<f64, BoundsError> {
    if let ConvexBody::Ball { radius, .. } = projected {
        match base.steiner_ball_sum_volume(*radius) {
            Ok(v) => return Ok(v),
            Err(GeometryError::UnsupportedBody(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(crate::geometry::minkowski_volume_mc(projected, &base.reflected(), n_inner, rng)?.0)
}

fn intrinsic_all(body: &ConvexBody, up_to: usize) -> Option<Vec<f64>> {
    (0..=up_to).map(|i| body.intrinsic_volume(i).ok()).collect()
}

/// One evaluation of the volume-tail exponent integrand at `s` (the
/// `sign = ±1` of the two tails is carried by `tail`).
pub fn volume_exponent_at(
    cfg: &ProcessConfig,
    window: &ConvexBody,
    s: f64,
    tail: Tail,
) -> Result<f64, BoundsError> {
    Ok(volume_exponent(cfg, window)?.eval(s, tail))
}

/// Volume tail bound by numeric Chernoff optimisation of the exact exponent.
/// Lower-tail deviations above 𝔼F return the trivial bound 0.
pub fn volume_tail_bound(
    cfg: &ProcessConfig,
    window: &ConvexBody,
    r: f64,
    tail: Tail,
) -> Result<LogBound, BoundsError> {
    let exponent = volume_exponent(cfg, window)?;
    optimize_exponent(cfg, window, &exponent, r, tail)
}

/// Monte Carlo variant for window/law pairs without exact closed forms.
pub fn volume_tail_bound_mc(
    cfg: &ProcessConfig,
    window: &ConvexBody,
    r: f64,
    tail: Tail,
    n_marks: usize,
    n_inner: usize,
    rng: &mut impl Rng,
) -> Result<LogBound, BoundsError> {
    let exponent = volume_exponent_mc(cfg, window, n_marks, n_inner, rng)?;
    optimize_exponent(cfg, window, &exponent, r, tail)
}

fn optimize_exponent(
    cfg: &ProcessConfig,
    window: &ConvexBody,
    exponent: &ExponentSum,
    r: f64,
    tail: Tail,
) -> Result<LogBound, BoundsError> {
    if tail == Tail::Lower {
        if let Ok(ef) = meanvalues::mean_volume(cfg, window) {
            if r > ef {
                return Ok(LogBound {
                    log_bound: 0.0,
                    s_star: 0.0,
                    se: None,
                    path: exponent.path.clone(),
                });
            }
        }
    }
    let (s_star, log_bound) = chernoff_optimize(|s| exponent.eval(s, tail), r, None);
    Ok(LogBound {
        log_bound,
        s_star,
        se: exponent.se_at(s_star, tail),
        path: exponent.path.clone(),
    })
}

/// α = λ_{d−k}(M)·diam(W)^k and
/// β = (p/λ_{d−k}(M))·Σ_i [κ_iκ_{d−i}/(C(d,i)κ_d)]·V_i(W)·V_{d−k−i}(M)
/// for a base that is a uniform rotation of the fixed convex body M.
pub fn rotated_base_params(
    m_body: &ConvexBody,
    window: &ConvexBody,
    cfg: &ProcessConfig,
) -> Result<BoundParams, BoundsError> {
    let dk = cfg.base_dim();
    if m_body.dim() != dk {
        return Err(GeometryError::DimensionMismatch {
            expected: dk,
            got: m_body.dim(),
        }
        .into());
    }
    let vol_m = m_body.volume()?;
    let p = -(-cfg.gamma * vol_m).exp_m1();
    let alpha = vol_m * window.diameter()?.powi(cfg.k as i32);
    let mut sum = 0.0;
    for i in 0..=dk {
        sum += rotational_mean_coeff(cfg.d, i)
            * window.intrinsic_volume(i)?
            * m_body.intrinsic_volume(dk - i)?;
    }
    Ok(BoundParams {
        alpha,
        beta: p / vol_m * sum,
    })
}

/// Closed-form log bound for rotated fixed bases:
/// upper  r/α − (β + r/α)·ln(1 + r/(αβ)),
/// lower −r/α − (β − r/α)·ln(1 − r/(αβ))  (defined for r < αβ).
pub fn rotated_base_bound(params: &BoundParams, r: f64, tail: Tail) -> Result<f64, BoundsError> {
    assert!(r >= 0.0);
    let BoundParams { alpha, beta } = *params;
    let ab = alpha * beta;
    match tail {
        Tail::Upper => Ok(beta * chernoff_rate_upper(r / ab)),
        Tail::Lower => {
            if r >= ab {
                return Err(BoundsError::DomainError { r, alpha_beta: ab });
            }
            Ok(beta * chernoff_rate_lower(r / ab))
        }
    }
}

/// Tail bound for bases U(R·M) with a finite-support dilation law: the
/// exponent Σ_j [κ_jκ_{d−j}/(C(d,j)κ_d)] V_j(W) V_{d−k−j}(M)
/// 𝔼[R^{d−k−j} Ψ(±αsR^{d−k})], scaled by p/m_{d−k}, optimised numerically.
pub fn dilated_base_bound(
    m_body: &ConvexBody,
    window: &ConvexBody,
    cfg: &ProcessConfig,
    r: f64,
    tail: Tail,
) -> Result<LogBound, BoundsError> {
    let dk = cfg.base_dim();
    let vol_m = m_body.volume()?;
    let alpha = vol_m * window.diameter()?.powi(cfg.k as i32);
    let atoms = cfg.law.scaling_atoms();
    let m_moment: f64 = atoms
        .iter()
        .map(|(ra, pa)| pa * ra.powi(dk as i32))
        .sum::<f64>()
        * vol_m;
    let p = -(-cfg.gamma * m_moment).exp_m1();
    let mut terms = Vec::new();
    for (r_a, p_a) in &atoms {
        let arg = alpha * r_a.powi(dk as i32);
        for j in 0..=dk {
            let w = p_a
                * rotational_mean_coeff(cfg.d, j)
                * window.intrinsic_volume(j)?
                * m_body.intrinsic_volume(dk - j)?
                * r_a.powi((dk - j) as i32);
            terms.push((w, arg));
        }
    }
    let exponent = ExponentSum {
        scale: p / m_moment,
        terms,
        path: EvalPath::ExactRotational,
    };
    optimize_exponent(cfg, window, &exponent, r, tail)
}

/// Tail bound for a spherical window B_R^d: Chernoff optimisation of
/// (p/m_{d−k})·Σ_j R^{d−k−j} κ_{d−k−j} 𝔼[V_j(Ξ) Ψ(±s λ_{d−k}(Ξ)(2R)^k)].
pub fn spherical_window_bound(
    cfg: &ProcessConfig,
    r_window: f64,
    r: f64,
    tail: Tail,
) -> Result<LogBound, BoundsError> {
    let window = ConvexBody::centered_ball(cfg.d, r_window)?;
    volume_tail_bound(cfg, &window, r, tail)
}

/// The constants a = κ_{d−k} ρ^{d−k} (2R)^k and
/// b = (p/m_{d−k}) κ_{d−k} R^{d−k} (1 + ρ/R)^{d−k} of the ball-base,
/// ball-window closed form.
pub fn ball_ball_constants(
    r_window: f64,
    rho: f64,
    cfg: &ProcessConfig,
) -> Result<(f64, f64), BoundsError> {
    assert!(r_window > 0.0 && rho > 0.0);
    let dk = cfg.base_dim();
    let kappa = unit_ball_volume(dk);
    let a = kappa * rho.powi(dk as i32) * (2.0 * r_window).powi(cfg.k as i32);
    let m = kappa * rho.powi(dk as i32);
    let p = -(-cfg.gamma * m).exp_m1();
    let b = p / m * kappa * r_window.powi(dk as i32) * (1.0 + rho / r_window).powi(dk as i32);
    Ok((a, b))
}

/// Closed-form tail bound when both the window (radius R) and the base
/// (radius ρ) are balls.
pub fn ball_ball_bound(
    r_window: f64,
    rho: f64,
    cfg: &ProcessConfig,
    r: f64,
    tail: Tail,
) -> Result<f64, BoundsError> {
    let (a, b) = ball_ball_constants(r_window, rho, cfg)?;
    rotated_base_bound(&BoundParams { alpha: a, beta: b }, r, tail)
}

/// Upper tail for the k-flat process (base degenerate to the origin), where
/// the functional is the k-content of Z ∩ W:
/// exp(−(r/2b)·ln(1 + br/a²)) with b = (diam(W)/2)^k κ_k and
/// a = γ·[κ_k³ κ_{d−k}/(C(d,k) κ_d)]·(diam(W)/2)^{2k}·V_{d−k}(W).
///
/// This is a bound evaluation only; the simulator does not model flats
/// (their base volume moment vanishes).
pub fn kflat_bound(
    d: usize,
    k: usize,
    gamma: f64,
    window: &ConvexBody,
    r: f64,
) -> Result<f64, BoundsError> {
    assert!(k < d && gamma > 0.0 && r >= 0.0);
    let half_diam = window.diameter()? / 2.0;
    let b = half_diam.powi(k as i32) * unit_ball_volume(k);
    let a = gamma
        * (3.0 * ln_unit_ball_volume(k) + ln_unit_ball_volume(d - k) - ln_unit_ball_volume(d))
            .exp()
        / binomial(d, k)
        * half_diam.powi(2 * k as i32)
        * window.intrinsic_volume(d - k)?;
    Ok(-(r / (2.0 * b)) * (b * r / (a * a)).ln_1p())
}

/// Upper-tail reference curve of a Poisson variable with the given mean:
/// log P(X − λ ≥ t) ≤ t − (λ+t)·ln(1 + t/λ). Used as a plotting overlay; no
/// inequality against the process bounds is asserted.
pub fn poisson_tail_reference(lambda: f64, t: f64) -> f64 {
    assert!(lambda > 0.0 && t >= 0.0);
    lambda * chernoff_rate_upper(t / lambda)
}

/// P(Poisson(x) > q), evaluated from the complementary series so that tiny
/// values keep full relative precision.
fn poisson_upper_tail(x: f64, q: usize) -> f64 {
    debug_assert!(x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    // Leading term e^{-x} x^{q+1}/(q+1)!, then the ratio recursion.
    let ln_term = -x + (q as f64 + 1.0) * x.ln() - crate::numeric::ln_factorial(q + 1);
    let mut term = ln_term.exp();
    if term == 0.0 {
        // Underflow: either the tail is genuinely below double range
        // (small x) or the mean dwarfs q and the tail is 1 to full
        // precision (x beyond exp range).
        return if x > q as f64 { 1.0 } else { 0.0 };
    }
    let mut acc = term;
    let mut i = q + 2;
    loop {
        term *= x / i as f64;
        acc += term;
        i += 1;
        if term <= acc * 1e-18 || i > q + 10_000 {
            break;
        }
    }
    acc
}

/// Coefficients β_0, …, β_{d−j} of the intrinsic-volume tail bound:
/// β_0 = p/m_{d−k}, β_1 = 0, and for m ≥ 2 an isoperimetric ratio times a
/// sum over even-length positive compositions of m weighted by truncated
/// Poisson tails. All coefficients are non-negative.
pub fn intrinsic_beta_coeffs(cfg: &ProcessConfig, j: usize) -> Result<Vec<f64>, BoundsError> {
    let d = cfg.d;
    let k = cfg.k;
    if j < k {
        return Err(BoundsError::JBelowK { j, k });
    }
    assert!(
        (1..=d).contains(&j),
        "intrinsic order j must satisfy 1 ≤ j ≤ d"
    );
    let dk = cfg.base_dim();
    let m_top = cfg.base_volume_moment()?;
    let p = cfg.volume_fraction()?;
    let mut betas = vec![p / m_top];
    if d == j {
        return Ok(betas);
    }
    betas.push(0.0);
    if d - j < 2 {
        return Ok(betas);
    }
    let moments: Vec<f64> = (0..=dk)
        .map(|i| cfg.law.moment(i))
        .collect::<Result<_, _>>()?;
    let m_max = d - j;
    let h: Vec<f64> = (0..=m_max)
        .map(|q| {
            if q == 0 {
                0.0
            } else {
                c_constant(d, d - q) * moments[dk - q]
            }
        })
        .collect();
    let conv = crate::meanvalues::convolution_powers(&h, m_max);
    let x = cfg.gamma * m_top;
    for m in 2..=m_max {
        let mj = m as f64 / j as f64;
        let ln_iso = (1.0 + mj) * ln_unit_ball_volume(d - j)
            + binomial(d, j + m).ln()
            + (crate::numeric::ln_factorial(m + j) + ln_unit_ball_volume(m + j)
                - crate::numeric::ln_factorial(j)
                - ln_unit_ball_volume(j))
            - mj * ln_unit_ball_volume(d)
            - ln_unit_ball_volume(d - j - m)
            - (1.0 + mj) * binomial(d, j).ln();
        let iso = ln_iso.exp();
        let mut inner = 0.0;
        for pp in 1..=(m / 2) {
            inner +=
                m_top.powi(-(2 * pp as i32) - 1) * poisson_upper_tail(x, 2 * pp) * conv[2 * pp][m];
        }
        betas.push(iso * inner);
    }
    Ok(betas)
}

/// A(K) = Σ_{i=j−k}^{min(d−k,j)} diam(W)^{j−i} C(k, j−i) V_i(K): the
/// geometric cap on V_j of one cylinder piece inside the window, evaluated
/// on the law's template scaled by `r_scale`.
fn intrinsic_arg(
    template_vs: &[f64],
    r_scale: f64,
    diam: f64,
    d: usize,
    k: usize,
    j: usize,
) -> f64 {
    let dk = d - k;
    let mut acc = 0.0;
    for i in j.saturating_sub(k)..=dk.min(j) {
        acc += diam.powi((j - i) as i32)
            * binomial(k, j - i)
            * template_vs[i]
            * r_scale.powi(i as i32);
    }
    acc
}

/// Intrinsic-volume tail bound for F_j = V_j(Z ∩ W), j ≥ max(k, 1):
/// Chernoff optimisation of
/// 𝔼[V_{d−k}(P_{d−k}(ΘᵀW) ⊕ Ξ*) · Ψ(±s·A(Ξ)) · Σ_m β_m A(Ξ)^{m/j}].
pub fn intrinsic_tail_bound(
    cfg: &ProcessConfig,
    window: &ConvexBody,
    j: usize,
    r: f64,
    tail: Tail,
) -> Result<LogBound, BoundsError> {
    let exponent = intrinsic_exponent(cfg, window, j)?;
    if tail == Tail::Lower {
        // Deviations above 𝔼F_j are impossible for the non-negative
        // functional; report the trivial bound there.
        if let Ok(ef) = meanvalues::mean_intrinsic_closed(cfg, window, j) {
            if r > ef.value {
                return Ok(LogBound::exact(0.0, 0.0, exponent.path.clone()));
            }
        }
    }
    let (s_star, log_bound) = chernoff_optimize(|s| exponent.eval(s, tail), r, None);
    Ok(LogBound {
        log_bound,
        s_star,
        se: exponent.se_at(s_star, tail),
        path: exponent.path.clone(),
    })
}

fn intrinsic_exponent(
    cfg: &ProcessConfig,
    window: &ConvexBody,
    j: usize,
) -> Result<ExponentSum, BoundsError> {
    let d = cfg.d;
    let k = cfg.k;
    if j < k {
        return Err(BoundsError::JBelowK { j, k });
    }
    assert!((1..=d).contains(&j));
    let dk = cfg.base_dim();
    let template = cfg.law.template_body()?;
    let template_vs = intrinsic_all(&template, dk).ok_or(BoundsError::NoExactPath)?;
    let window_vs = intrinsic_all(window, dk).ok_or(BoundsError::NoExactPath)?;
    let diam = window.diameter()?;
    let betas = intrinsic_beta_coeffs(cfg, j)?;
    let mut terms = Vec::new();
    for (r_a, p_a) in cfg.law.scaling_atoms() {
        let hit: f64 = (0..=dk)
            .map(|i| {
                rotational_mean_coeff(d, i)
                    * window_vs[i]
                    * template_vs[dk - i]
                    * r_a.powi((dk - i) as i32)
            })
            .sum();
        let arg = intrinsic_arg(&template_vs, r_a, diam, d, k, j);
        let beta_weight: f64 = betas
            .iter()
            .enumerate()
            .map(|(m, b)| b * arg.powf(m as f64 / j as f64))
            .sum();
        terms.push((p_a * hit * beta_weight, arg));
    }
    Ok(ExponentSum {
        scale: 1.0,
        terms,
        path: EvalPath::ExactRotational,
    })
}

/// Closed-form (α, β) for the intrinsic-volume bound with a rotated fixed
/// base: α = A(M) and β = [Σ_i κ-coefficient·V_i(W)V_{d−k−i}(M)]·Σ_m β_m α^{m/j}.
pub fn intrinsic_rotated_params(
    m_body: &ConvexBody,
    window: &ConvexBody,
    cfg: &ProcessConfig,
    j: usize,
) -> Result<BoundParams, BoundsError> {
    let d = cfg.d;
    let k = cfg.k;
    if j < k {
        return Err(BoundsError::JBelowK { j, k });
    }
    assert!((1..=d).contains(&j));
    if cfg.law.scaling_atoms() != vec![(1.0, 1.0)] {
        return Err(BoundsError::NeedsFixedLaw);
    }
    let dk = cfg.base_dim();
    let template_vs = intrinsic_all(m_body, dk).ok_or(BoundsError::NoExactPath)?;
    let diam = window.diameter()?;
    let alpha = intrinsic_arg(&template_vs, 1.0, diam, d, k, j);
    let betas = intrinsic_beta_coeffs(cfg, j)?;
    let mut hit = 0.0;
    for i in 0..=dk {
        hit += rotational_mean_coeff(d, i) * window.intrinsic_volume(i)? * template_vs[dk - i];
    }
    let beta_weight: f64 = betas
        .iter()
        .enumerate()
        .map(|(m, b)| b * alpha.powf(m as f64 / j as f64))
        .sum();
    Ok(BoundParams {
        alpha,
        beta: hit * beta_weight,
    })
}

/// Closed-form intrinsic-volume tail bound for rotated fixed bases.
pub fn intrinsic_rotated_bound(
    m_body: &ConvexBody,
    window: &ConvexBody,
    cfg: &ProcessConfig,
    j: usize,
    r: f64,
    tail: Tail,
) -> Result<f64, BoundsError> {
    let params = intrinsic_rotated_params(m_body, window, cfg, j)?;
    rotated_base_bound(&params, r, tail)
}

/// What functional a growing-window probe tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeTarget {
    Volume,
    Intrinsic(usize),
}

/// Growing-window decay-order probe: for each deviation r on the grid the
/// window is scaled to r^{1/d}·W (linear volume growth), the upper-tail
/// closed form is evaluated at deviation r, and the least-squares slope of
/// ln(−log bound) against ln r is returned. Requires a rotated-fixed law.
pub fn scaling_exponent_probe(
    cfg: &ProcessConfig,
    window: &ConvexBody,
    target: ProbeTarget,
    r_grid: &[f64],
) -> Result<f64, BoundsError> {
    assert!(r_grid.len() >= 2);
    assert!(
        r_grid.last().unwrap() / r_grid.first().unwrap() >= 100.0,
        "probe grid must span at least two decades"
    );
    if cfg.law.scaling_atoms() != vec![(1.0, 1.0)] {
        return Err(BoundsError::NeedsFixedLaw);
    }
    let template = cfg.law.template_body()?;
    let mut xs = Vec::with_capacity(r_grid.len());
    let mut ys = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        assert!(r > 0.0);
        let scaled = window.scaled(r.powf(1.0 / cfg.d as f64))?;
        let log_bound = match target {
            ProbeTarget::Volume => {
                let params = rotated_base_params(&template, &scaled, cfg)?;
                rotated_base_bound(&params, r, Tail::Upper)?
            }
            ProbeTarget::Intrinsic(j) => {
                intrinsic_rotated_bound(&template, &scaled, cfg, j, r, Tail::Upper)?
            }
        };
        if !(log_bound < 0.0) {
            return Err(BoundsError::NonFinite);
        }
        xs.push(r.ln());
        ys.push((-log_bound).ln());
    }
    Ok(ls_slope(&xs, &ys))
}

/// κ_{d−k}^d / κ_d^{d−k} ≥ 1 (up to 1e−12), the ratio certifying that the
/// closed-form αβ dominates 𝔼F.
pub fn kappa_ratio_check(d: usize, k: usize) -> bool {
    assert!(k < d);
    let ln_ratio = d as f64 * ln_unit_ball_volume(d - k) - (d - k) as f64 * ln_unit_ball_volume(d);
    ln_ratio >= (-1e-12_f64).ln_1p()
}

/// Analytic bound values over an r-grid; the lower tail is undefined (None)
/// at and beyond αβ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundCurve {
    pub r_grid: Vec<f64>,
    pub log_upper: Vec<f64>,
    pub log_lower: Vec<Option<f64>>,
    pub path: String,
    pub se: Vec<Option<f64>>,
}

impl BoundCurve {
    /// Evaluate the rotated-base closed form over a grid.
    pub fn from_params(params: &BoundParams, r_grid: &[f64]) -> Result<Self, BoundsError> {
        let mut log_upper = Vec::with_capacity(r_grid.len());
        let mut log_lower = Vec::with_capacity(r_grid.len());
        for &r in r_grid {
            log_upper.push(rotated_base_bound(params, r, Tail::Upper)?);
            log_lower.push(if r < params.alpha * params.beta {
                Some(rotated_base_bound(params, r, Tail::Lower)?)
            } else {
                None
            });
        }
        Ok(BoundCurve {
            r_grid: r_grid.to_vec(),
            log_upper,
            log_lower,
            path: "closed_form:rotated_base".to_string(),
            se: vec![None; r_grid.len()],
        })
    }

    /// CSV with the fixed column order r,log_upper,log_lower,path,se.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,log_upper,log_lower,path,se\n");
        for i in 0..self.r_grid.len() {
            let lower = self.log_lower[i].map_or(String::new(), |v| format!("{v:.17e}"));
            let se = self.se[i].map_or(String::new(), |v| format!("{v:.6e}"));
            out.push_str(&format!(
                "{},{:.17e},{},{},{}\n",
                self.r_grid[i], self.log_upper[i], lower, self.path, se
            ));
        }
        out
    }
}
