//! Exact mean values of the intrinsic volumes of the union set in a window:
//! the volume fraction formula, its V_{d−1} companion, and the general
//! 𝔼 V_j(Z ∩ W) in two independent forms (a truncated inclusion–exclusion
//! series and a closed form for j ≥ k). The two forms are derived from each
//! other analytically, so their numerical agreement is the strongest
//! desk-scale verification this module can offer; the test suites exploit
//! exactly that.

use serde::{Deserialize, Serialize};

use crate::geometry::{c_constant, ConvexBody, GeometryError};
use crate::numeric::KahanSum;
use crate::process::{ProcessConfig, ProcessError};
use crate::sampling::SamplingError;

#[derive(Debug, thiserror::Error)]
pub enum MeanValueError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error("intrinsic order j = {j} below the flat dimension k = {k} is not supported")]
    JBelowK { j: usize, k: usize },
    #[error("series truncated at {level} has not converged: tail {tail:.3e} vs value {value:.3e}")]
    TruncationNotConverged { level: usize, tail: f64, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanValueForm {
    GeneralSeries,
    ClosedJk,
    Specialization,
}

/// A mean value together with how it was produced; only the series form
/// carries truncation diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeanValueResult {
    pub value: f64,
    pub form: MeanValueForm,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_level: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_tail_estimate: Option<f64>,
    /// |ℓ-th term| of the alternating series, for decay diagnostics.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub term_magnitudes: Vec<f64>,
}

impl MeanValueResult {
    fn exact(value: f64, form: MeanValueForm) -> Self {
        MeanValueResult {
            value,
            form,
            truncation_level: None,
            truncation_tail_estimate: None,
            term_magnitudes: Vec::new(),
        }
    }

    /// CSV row in the documented column order.
    pub fn csv_row(&self, d: usize, k: usize, j: usize, gamma: f64) -> String {
        let form = match self.form {
            MeanValueForm::GeneralSeries => "general_series",
            MeanValueForm::ClosedJk => "closed_jk",
            MeanValueForm::Specialization => "specialization",
        };
        let tail = self
            .truncation_tail_estimate
            .map_or(String::new(), |t| format!("{t:e}"));
        format!("{d},{k},{j},{gamma},{form},{:.17e},{tail}", self.value)
    }
}

/// 𝔼 F = λ_d(W)·(1 − e^{−γ m_{d−k}}), the mean volume of Z ∩ W.
pub fn mean_volume(cfg: &ProcessConfig, window: &ConvexBody) -> Result<f64, MeanValueError> {
    check_window(cfg, window)?;
    let p = cfg.volume_fraction()?;
    Ok(window.volume()? * p)
}

/// 𝔼 V_{d−1}(Z ∩ W) = γ V_d(W) m_{d−k−1} e^{−γ m_{d−k}} + V_{d−1}(W)(1 − e^{−γ m_{d−k}}).
pub fn mean_intrinsic_dminus1(
    cfg: &ProcessConfig,
    window: &ConvexBody,
) -> Result<f64, MeanValueError> {
    check_window(cfg, window)?;
    let dk = cfg.base_dim();
    assert!(dk >= 1);
    let m_top = cfg.law.moment(dk)?;
    let m_prev = cfg.law.moment(dk - 1)?;
    let decay = (-cfg.gamma * m_top).exp();
    Ok(cfg.gamma * window.volume()? * m_prev * decay
        + window.intrinsic_volume(cfg.d - 1)? * (1.0 - decay))
}

/// Closed form of 𝔼 V_j(Z ∩ W) for j ≥ k:
///
///   V_j(W)(1 − e^{−γm}) − e^{−γm} Σ_{m=1}^{d−j} c_j^{m+j} V_{m+j}(W)
///       Σ_{p=1}^{m} ((−1)^p γ^p / p!) Σ_{q₁+…+q_p = m, q_i > 0} Π_i c_d^{d−q_i} m_{d−k−q_i},
///
/// with ordered compositions enumerated exactly (via convolution powers) and
/// the empty sum equal to zero.
pub fn mean_intrinsic_closed(
    cfg: &ProcessConfig,
    window: &ConvexBody,
    j: usize,
) -> Result<MeanValueResult, MeanValueError> {
    check_window(cfg, window)?;
    let d = cfg.d;
    let k = cfg.k;
    if j < k {
        return Err(MeanValueError::JBelowK { j, k });
    }
    assert!(j <= d);
    let dk = cfg.base_dim();
    let moments = base_moments(cfg)?;
    let m_top = moments[dk];
    let decay = (-cfg.gamma * m_top).exp();
    let mut acc = KahanSum::new();
    acc.add(window.intrinsic_volume(j)? * (1.0 - decay));
    if d > j {
        // h[q] = c_d^{d−q} m_{d−k−q}; the inner composition sum over p parts
        // is the p-fold convolution power of h evaluated at m.
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
        let conv = convolution_powers(&h, m_max);
        for m in 1..=m_max {
            let mut inner = KahanSum::new();
            let mut gamma_pow = 1.0;
            let mut factorial = 1.0;
            for p in 1..=m {
                gamma_pow *= cfg.gamma;
                factorial *= p as f64;
                let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                inner.add(sign * gamma_pow / factorial * conv[p][m]);
            }
            acc.add(
                -decay * c_constant(j, m + j) * window.intrinsic_volume(m + j)? * inner.value(),
            );
        }
    }
    Ok(MeanValueResult::exact(acc.value(), MeanValueForm::ClosedJk))
}

/// General inclusion–exclusion series for 𝔼 V_j(Z ∩ W), truncated at
/// `l_max`:
///
///   Σ_{ℓ≥1} ((−1)^{ℓ−1} γ^ℓ / ℓ!) Σ_{j ≤ j₁ ≤ … ≤ j_ℓ} c_j^{j_ℓ} V_{j_ℓ}(W)
///       Π_i c_d^{d+j_{i−1}−j_i} m_{d−k+j_{i−1}−j_i},
///
/// where each j_i ranges up to min(d, d + j_{i−1} − k). The nested sums are
/// evaluated by dynamic programming over (level, current index), which costs
/// O(l_max·d²) instead of the exponential literal enumeration. The estimate
/// of the truncation tail is the magnitude of the last term.
pub fn mean_intrinsic_series(
    cfg: &ProcessConfig,
    window: &ConvexBody,
    j: usize,
    l_max: usize,
) -> Result<MeanValueResult, MeanValueError> {
    check_window(cfg, window)?;
    assert!(l_max >= 1);
    let d = cfg.d;
    let k = cfg.k;
    if j < k {
        // Convergence of the series is not established below k; refusing is
        // better than silently returning a truncation of unknown meaning.
        return Err(MeanValueError::JBelowK { j, k });
    }
    assert!(j <= d);
    let dk = cfg.base_dim();
    let moments = base_moments(cfg)?;
    let window_iv: Vec<f64> = (0..=d)
        .map(|b| window.intrinsic_volume(b))
        .collect::<Result<_, _>>()?;
    // weight of a step a → b (a ≤ b ≤ min(d, d+a−k)).
    let step = |a: usize, b: usize| -> f64 { c_constant(d, d + a - b) * moments[dk + a - b] };
    let upper = |a: usize| -> usize { d.min(d + a - k) };

    let mut level: Vec<f64> = vec![0.0; d + 1];
    level[j] = 1.0;
    let mut total = KahanSum::new();
    let mut ln_gamma_pow = 0.0_f64; // ln(γ^ℓ / ℓ!)
    let mut terms = Vec::with_capacity(l_max);
    let mut last_term = 0.0;
    for l in 1..=l_max {
        let mut next = vec![0.0; d + 1];
        for a in j..=d {
            if level[a] == 0.0 {
                continue;
            }
            for b in a..=upper(a) {
                next[b] += level[a] * step(a, b);
            }
        }
        level = next;
        ln_gamma_pow += cfg.gamma.ln() - (l as f64).ln();
        let mut t_l = KahanSum::new();
        for b in j..=d {
            if level[b] != 0.0 {
                t_l.add(level[b] * c_constant(j, b) * window_iv[b]);
            }
        }
        let sign = if l % 2 == 0 { -1.0 } else { 1.0 };
        last_term = sign * ln_gamma_pow.exp() * t_l.value();
        total.add(last_term);
        terms.push(last_term.abs());
    }
    let value = total.value();
    let tail = last_term.abs();
    if tail > 1e-8 * value.abs() {
        return Err(MeanValueError::TruncationNotConverged {
            level: l_max,
            tail,
            value,
        });
    }
    Ok(MeanValueResult {
        value,
        form: MeanValueForm::GeneralSeries,
        truncation_level: Some(l_max),
        truncation_tail_estimate: Some(tail),
        term_magnitudes: terms,
    })
}

/// m_0 … m_{d−k} of the base law.
fn base_moments(cfg: &ProcessConfig) -> Result<Vec<f64>, MeanValueError> {
    (0..=cfg.base_dim())
        .map(|i| cfg.law.moment(i).map_err(Into::into))
        .collect()
}

/// conv[p][m] = Σ over ordered compositions of m into p positive parts of
/// Π h[q_i]; conv[0] is the convolution identity.
pub(crate) fn convolution_powers(h: &[f64], m_max: usize) -> Vec<Vec<f64>> {
    let p_max = m_max;
    let mut conv = vec![vec![0.0; m_max + 1]; p_max + 1];
    conv[0][0] = 1.0;
    for p in 1..=p_max {
        for m in 0..=m_max {
            let mut acc = 0.0;
            for q in 1..=m {
                acc += conv[p - 1][m - q] * h[q];
            }
            conv[p][m] = acc;
        }
    }
    conv
}

fn check_window(cfg: &ProcessConfig, window: &ConvexBody) -> Result<(), MeanValueError> {
    if window.dim() != cfg.d {
        return Err(GeometryError::DimensionMismatch {
            expected: cfg.d,
            got: window.dim(),
        }
        .into());
    }
    Ok(())
}
