//! Experiment execution: ties the simulator to the analytic formulas and
//! writes `summary.json`, `curves.csv` and (optionally) `curves.svg`.
//!
//! Every number in the summary carries a provenance label: `empirical`
//! (with a standard error), `closed_form:<formula>` for exact evaluations,
//! or `mc-analytic` for Monte Carlo evaluations of analytic expressions.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use cylproc::bounds::{
    ball_ball_constants, dilated_base_bound, intrinsic_beta_coeffs, intrinsic_rotated_params,
    intrinsic_tail_bound, kflat_bound, poisson_tail_reference, rotated_base_bound,
    rotated_base_params, scaling_exponent_probe, volume_tail_bound, BoundParams, BoundsError,
    ProbeTarget, Tail,
};
use cylproc::meanvalues::{
    mean_intrinsic_closed, mean_intrinsic_dminus1, mean_volume, MeanValueError,
};
use cylproc::numeric::mean_se;
use cylproc::process::{
    capacity_analytic, capacity_empirical, empirical_tail, surface_replicates, volume_replicates,
    ProcessError,
};
use cylproc::{ConvexBody, RngStream};

use crate::config::{ConfigError, ExperimentKind, ResolvedConfig};
use crate::svg;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    MeanValue(#[from] MeanValueError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct Labeled {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub se: Option<f64>,
    pub provenance: String,
}

impl Labeled {
    fn closed(value: f64, formula: &str) -> Self {
        Labeled {
            value,
            se: None,
            provenance: format!("closed_form:{formula}"),
        }
    }

    fn empirical(value: f64, se: f64) -> Self {
        Labeled {
            value,
            se: Some(se),
            provenance: "empirical".into(),
        }
    }

    fn mc_analytic(value: f64, se: f64) -> Self {
        Labeled {
            value,
            se: Some(se),
            provenance: "mc-analytic".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AssertionResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub experiment: &'static str,
    pub seed: u64,
    pub inputs: serde_json::Value,
    pub constants: BTreeMap<String, Labeled>,
    pub statistics: BTreeMap<String, Labeled>,
    pub assertions: Vec<AssertionResult>,
    pub pass: bool,
}

struct Outputs {
    summary: Summary,
    csv: String,
    svg: Option<String>,
}

fn assert_leq(name: &str, lhs: f64, rhs: f64, detail: String) -> AssertionResult {
    AssertionResult {
        name: name.to_string(),
        pass: lhs <= rhs,
        detail,
    }
}

/// Derived constants every experiment reports when they exist for the
/// configured law/window pair.
fn common_constants(rc: &ResolvedConfig) -> Result<BTreeMap<String, Labeled>, RunError> {
    let mut out = BTreeMap::new();
    let cfg = &rc.cfg;
    let m = cfg.base_volume_moment()?;
    out.insert(
        "m_base_volume".into(),
        Labeled::closed(m, "base_volume_moment"),
    );
    out.insert(
        "volume_fraction_p".into(),
        Labeled::closed(cfg.volume_fraction()?, "volume_fraction"),
    );
    if let Ok(ef) = mean_volume(cfg, &rc.window) {
        out.insert("mean_volume".into(), Labeled::closed(ef, "volume_fraction"));
    }
    if let Ok(v) = mean_intrinsic_dminus1(cfg, &rc.window) {
        out.insert(
            "mean_intrinsic_dminus1".into(),
            Labeled::closed(v, "intrinsic_mean_dminus1"),
        );
    }
    // Closed-form Chernoff parameters exist for undilated laws.
    if cfg.law.scaling_atoms() == vec![(1.0, 1.0)] {
        let template = cfg.law.template_body().map_err(ProcessError::from)?;
        if let Ok(params) = rotated_base_params(&template, &rc.window, cfg) {
            out.insert(
                "alpha".into(),
                Labeled::closed(params.alpha, "rotated_base_alpha"),
            );
            out.insert(
                "beta".into(),
                Labeled::closed(params.beta, "rotated_base_beta"),
            );
        }
    }
    if let (ConvexBody::Ball { radius: rw, .. }, ConvexBody::Ball { radius: rb, center }) = (
        &rc.window,
        &cfg.law.template_body().map_err(ProcessError::from)?,
    ) {
        if center.iter().all(|c| *c == 0.0) {
            let (a, b) = ball_ball_constants(*rw, *rb, cfg)?;
            out.insert("a_ball_ball".into(), Labeled::closed(a, "ball_ball_a"));
            out.insert("b_ball_ball".into(), Labeled::closed(b, "ball_ball_b"));
        }
    }
    Ok(out)
}

fn closed_form_params(rc: &ResolvedConfig) -> Result<Option<BoundParams>, RunError> {
    if rc.cfg.law.scaling_atoms() != vec![(1.0, 1.0)] {
        return Ok(None);
    }
    let template = rc.cfg.law.template_body().map_err(ProcessError::from)?;
    if rc.j == rc.cfg.d {
        match rotated_base_params(&template, &rc.window, &rc.cfg) {
            Ok(p) => Ok(Some(p)),
            Err(BoundsError::Geometry(_)) => Ok(None),
            Err(e) => Err(e.into()),
        }
    } else {
        match intrinsic_rotated_params(&template, &rc.window, &rc.cfg, rc.j) {
            Ok(p) => Ok(Some(p)),
            Err(BoundsError::NoExactPath) => Ok(None),
            Err(e) => Err(e.into()),
        }
    }
}

fn run_tail_compare(rc: &ResolvedConfig, seed: u64) -> Result<Outputs, RunError> {
    let cfg = &rc.cfg;
    let base = ExperimentKind::TailCompare.stream_base();
    let tail = empirical_tail(
        cfg,
        &rc.window,
        rc.raw.n_reps,
        rc.raw.n_points,
        &rc.r_grid,
        seed,
        base,
    )?;
    let params = closed_form_params(rc)?;
    let mut constants = common_constants(rc)?;
    let mut statistics = BTreeMap::new();
    statistics.insert(
        "replicate_mean".into(),
        Labeled::empirical(tail.mean_hat, tail.sd_hat / (tail.n_reps as f64).sqrt()),
    );
    statistics.insert(
        "replicate_sd".into(),
        Labeled::empirical(tail.sd_hat, f64::NAN),
    );
    statistics.insert(
        "inner_se_mean".into(),
        Labeled::empirical(tail.inner_se_mean, f64::NAN),
    );
    let mut assertions = Vec::new();
    let mut csv = String::from(
        "r,emp_upper,wilson_upper,emp_lower,wilson_lower,log_bound_upper,log_bound_lower,log_poisson_reference\n",
    );
    let mut bound_upper = Vec::with_capacity(rc.r_grid.len());
    let mut bound_lower: Vec<Option<f64>> = Vec::with_capacity(rc.r_grid.len());
    for (i, &r) in rc.r_grid.iter().enumerate() {
        let (lu, ll) = match &params {
            Some(p) => {
                let lu = rotated_base_bound(p, r, Tail::Upper)?;
                let ll = if r < p.alpha * p.beta {
                    Some(rotated_base_bound(p, r, Tail::Lower)?)
                } else {
                    None
                };
                (lu, ll)
            }
            None => {
                let template = cfg.law.template_body().map_err(ProcessError::from)?;
                let lu = dilated_base_bound(&template, &rc.window, cfg, r, Tail::Upper)?.log_bound;
                let ll =
                    Some(dilated_base_bound(&template, &rc.window, cfg, r, Tail::Lower)?.log_bound);
                (lu, ll)
            }
        };
        bound_upper.push(lu);
        bound_lower.push(ll);
        let up_ok = assert_leq(
            &format!("upper_tail_dominated_r{i}"),
            tail.upper[i],
            lu.exp() + tail.wilson_upper[i],
            format!(
                "r={r}: empirical {} vs bound {} + wilson {}",
                tail.upper[i],
                lu.exp(),
                tail.wilson_upper[i]
            ),
        );
        assertions.push(up_ok);
        match ll {
            Some(l) => assertions.push(assert_leq(
                &format!("lower_tail_dominated_r{i}"),
                tail.lower[i],
                l.exp() + tail.wilson_lower[i],
                format!(
                    "r={r}: empirical {} vs bound {} + wilson {}",
                    tail.lower[i],
                    l.exp(),
                    tail.wilson_lower[i]
                ),
            )),
            None => assertions.push(AssertionResult {
                name: format!("lower_tail_impossible_r{i}"),
                pass: tail.lower[i] == 0.0,
                detail: format!(
                    "r={r} beyond the lower-tail domain: empirical frequency {}",
                    tail.lower[i]
                ),
            }),
        }
        let reference = params
            .as_ref()
            .map(|p| poisson_tail_reference(p.beta, r / p.alpha));
        csv.push_str(&format!(
            "{r},{},{},{},{},{:.17e},{},{}\n",
            tail.upper[i],
            tail.wilson_upper[i],
            tail.lower[i],
            tail.wilson_lower[i],
            lu,
            ll.map_or(String::new(), |v| format!("{v:.17e}")),
            reference.map_or(String::new(), |v| format!("{v:.17e}")),
        ));
    }
    if let Some(p) = &params {
        constants.insert(
            "alpha".into(),
            Labeled::closed(p.alpha, "rotated_base_alpha"),
        );
        constants.insert("beta".into(), Labeled::closed(p.beta, "rotated_base_beta"));
    }
    let svg_doc = rc.raw.emit_svg.then(|| {
        let mut series = vec![
            svg::Series {
                label: "empirical upper".into(),
                color: "#1f77b4".into(),
                style: svg::Style::Points,
                points: rc
                    .r_grid
                    .iter()
                    .copied()
                    .zip(tail.upper.iter().copied())
                    .collect(),
            },
            svg::Series {
                label: "empirical lower".into(),
                color: "#2ca02c".into(),
                style: svg::Style::Points,
                points: rc
                    .r_grid
                    .iter()
                    .copied()
                    .zip(tail.lower.iter().copied())
                    .collect(),
            },
            svg::Series {
                label: "upper bound".into(),
                color: "#d62728".into(),
                style: svg::Style::Line,
                points: rc
                    .r_grid
                    .iter()
                    .copied()
                    .zip(bound_upper.iter().map(|l| l.exp()))
                    .collect(),
            },
            svg::Series {
                label: "lower bound".into(),
                color: "#ff7f0e".into(),
                style: svg::Style::Line,
                points: rc
                    .r_grid
                    .iter()
                    .copied()
                    .zip(bound_lower.iter())
                    .filter_map(|(r, l)| l.map(|l| (r, l.exp())))
                    .collect(),
            },
        ];
        if let Some(p) = &params {
            series.push(svg::Series {
                label: "poisson reference".into(),
                color: "#7f7f7f".into(),
                style: svg::Style::Line,
                points: rc
                    .r_grid
                    .iter()
                    .map(|&r| (r, poisson_tail_reference(p.beta, r / p.alpha).exp()))
                    .collect(),
            });
        }
        svg::render("volume tail vs analytic bounds", &series)
    });
    let pass = assertions.iter().all(|a| a.pass);
    Ok(Outputs {
        summary: Summary {
            schema_version: 1,
            experiment: "tail_compare",
            seed,
            inputs: serde_json::Value::Null,
            constants,
            statistics,
            assertions,
            pass,
        },
        csv,
        svg: svg_doc,
    })
}

fn run_mean_check(rc: &ResolvedConfig, seed: u64) -> Result<Outputs, RunError> {
    let cfg = &rc.cfg;
    let base = ExperimentKind::MeanCheck.stream_base();
    let mut constants = common_constants(rc)?;
    let mut statistics = BTreeMap::new();
    let mut assertions = Vec::new();
    let mut csv = String::from("replicate,value\n");
    if rc.j == cfg.d {
        let reps = volume_replicates(cfg, &rc.window, rc.raw.n_reps, rc.raw.n_points, seed, base)?;
        let values: Vec<f64> = reps.iter().map(|(f, _)| *f).collect();
        for (i, v) in values.iter().enumerate() {
            csv.push_str(&format!("{i},{v:.17e}\n"));
        }
        let (mean, se) = mean_se(&values);
        let exact = mean_volume(cfg, &rc.window)?;
        statistics.insert("replicate_mean".into(), Labeled::empirical(mean, se));
        constants.insert(
            "mean_volume".into(),
            Labeled::closed(exact, "volume_fraction"),
        );
        assertions.push(assert_leq(
            "mean_within_4se",
            (mean - exact).abs(),
            4.0 * se,
            format!("|{mean} − {exact}| vs 4·{se}"),
        ));
    } else if rc.j + 1 == cfg.d {
        let eps = 0.02 * rc.window.inradius().map_err(ProcessError::from)?;
        let reps = surface_replicates(
            cfg,
            &rc.window,
            eps,
            rc.raw.n_reps,
            rc.raw.n_points,
            seed,
            base,
        )?;
        for (i, v) in reps.iter().enumerate() {
            csv.push_str(&format!("{i},{v:.17e}\n"));
        }
        let (mean, se) = mean_se(&reps);
        let exact = mean_intrinsic_dminus1(cfg, &rc.window)?;
        statistics.insert("replicate_mean".into(), Labeled::empirical(mean, se));
        constants.insert(
            "mean_intrinsic_dminus1".into(),
            Labeled::closed(exact, "intrinsic_mean_dminus1"),
        );
        assertions.push(assert_leq(
            "surface_mean_within_10pct",
            (mean - exact).abs(),
            0.10 * exact,
            format!("|{mean} − {exact}| vs 10% of {exact} (bias-limited, se {se})"),
        ));
    } else {
        return Err(RunError::Unsupported(format!(
            "mean_check simulates j = d (volume) or j = d−1 (surface); got j = {}",
            rc.j
        )));
    }
    let pass = assertions.iter().all(|a| a.pass);
    Ok(Outputs {
        summary: Summary {
            schema_version: 1,
            experiment: "mean_check",
            seed,
            inputs: serde_json::Value::Null,
            constants,
            statistics,
            assertions,
            pass,
        },
        csv,
        svg: None,
    })
}

fn run_capacity_check(rc: &ResolvedConfig, seed: u64) -> Result<Outputs, RunError> {
    let cfg = &rc.cfg;
    let base = ExperimentKind::CapacityCheck.stream_base();
    let (emp, se_emp) = capacity_empirical(cfg, &rc.window, rc.raw.n_reps, seed, base)?;
    let mut rng = RngStream::for_replicate(seed, base + 50, 0).rng();
    let n_marks = rc.raw.n_points.max(100);
    let (ana, se_ana) = capacity_analytic(cfg, &rc.window, n_marks, &mut rng)?;
    let combined = (se_emp * se_emp + se_ana * se_ana).sqrt().max(1e-12);
    let mut statistics = BTreeMap::new();
    statistics.insert("capacity_empirical".into(), Labeled::empirical(emp, se_emp));
    statistics.insert(
        "capacity_analytic".into(),
        Labeled::mc_analytic(ana, se_ana),
    );
    let assertions = vec![assert_leq(
        "capacity_agreement_4se",
        (emp - ana).abs(),
        4.0 * combined,
        format!("|{emp} − {ana}| vs 4·{combined}"),
    )];
    let csv = format!("emp,se_emp,analytic,se_analytic\n{emp},{se_emp},{ana},{se_ana}\n");
    let pass = assertions.iter().all(|a| a.pass);
    Ok(Outputs {
        summary: Summary {
            schema_version: 1,
            experiment: "capacity_check",
            seed,
            inputs: serde_json::Value::Null,
            constants: common_constants(rc)?,
            statistics,
            assertions,
            pass,
        },
        csv,
        svg: None,
    })
}

fn run_bound_curves(rc: &ResolvedConfig, seed: u64) -> Result<Outputs, RunError> {
    let cfg = &rc.cfg;
    let params = closed_form_params(rc)?;
    let mut csv = String::from("r,log_upper,log_lower,path,se\n");
    let mut log_upper = Vec::with_capacity(rc.r_grid.len());
    // Closed form when available, numeric optimisation otherwise.
    let path_name = if params.is_some() {
        if rc.j == cfg.d {
            "closed_form:rotated_base"
        } else {
            "closed_form:rotated_base_intrinsic"
        }
    } else {
        "numeric:chernoff"
    };
    for &r in &rc.r_grid {
        let (lu, ll) = match &params {
            Some(p) => (
                rotated_base_bound(p, r, Tail::Upper)?,
                (r < p.alpha * p.beta)
                    .then(|| rotated_base_bound(p, r, Tail::Lower))
                    .transpose()?,
            ),
            None => {
                let lu = if rc.j == cfg.d {
                    volume_tail_bound(cfg, &rc.window, r, Tail::Upper)?.log_bound
                } else {
                    intrinsic_tail_bound(cfg, &rc.window, rc.j, r, Tail::Upper)?.log_bound
                };
                let ll = if rc.j == cfg.d {
                    volume_tail_bound(cfg, &rc.window, r, Tail::Lower)?.log_bound
                } else {
                    intrinsic_tail_bound(cfg, &rc.window, rc.j, r, Tail::Lower)?.log_bound
                };
                (lu, Some(ll))
            }
        };
        log_upper.push(lu);
        csv.push_str(&format!(
            "{r},{lu:.17e},{},{path_name},\n",
            ll.map_or(String::new(), |v| format!("{v:.17e}"))
        ));
    }
    if let Some(p) = &params {
        for &r in &rc.r_grid {
            let reference = poisson_tail_reference(p.beta, r / p.alpha);
            csv.push_str(&format!("{r},{reference:.17e},,reference:poisson_tail,\n"));
        }
    }
    if rc.raw.kflat {
        for &r in &rc.r_grid {
            let kf = kflat_bound(cfg.d, cfg.k, cfg.gamma, &rc.window, r)?;
            csv.push_str(&format!("{r},{kf:.17e},,closed_form:kflat,\n"));
        }
    }
    let mut assertions = vec![AssertionResult {
        name: "upper_bound_nonpositive".into(),
        pass: log_upper.iter().all(|l| *l <= 0.0),
        detail: "log bounds must be ≤ 0".into(),
    }];
    assertions.push(AssertionResult {
        name: "upper_bound_nonincreasing".into(),
        pass: log_upper.windows(2).all(|w| w[1] <= w[0] + 1e-12),
        detail: "upper log bound must be nonincreasing in r".into(),
    });
    let svg_doc = rc.raw.emit_svg.then(|| {
        let series = vec![svg::Series {
            label: "upper bound".into(),
            color: "#d62728".into(),
            style: svg::Style::Line,
            points: rc
                .r_grid
                .iter()
                .copied()
                .zip(log_upper.iter().map(|l| l.exp()))
                .collect(),
        }];
        svg::render("analytic tail bound", &series)
    });
    let mut constants = common_constants(rc)?;
    if let Some(p) = &params {
        constants.insert(
            "alpha".into(),
            Labeled::closed(p.alpha, "rotated_base_alpha"),
        );
        constants.insert("beta".into(), Labeled::closed(p.beta, "rotated_base_beta"));
    }
    let pass = assertions.iter().all(|a| a.pass);
    Ok(Outputs {
        summary: Summary {
            schema_version: 1,
            experiment: "bound_curves",
            seed,
            inputs: serde_json::Value::Null,
            constants,
            statistics: BTreeMap::new(),
            assertions,
            pass,
        },
        csv,
        svg: svg_doc,
    })
}

fn run_scaling_probe(rc: &ResolvedConfig, seed: u64) -> Result<Outputs, RunError> {
    let cfg = &rc.cfg;
    let target = if rc.j == cfg.d {
        ProbeTarget::Volume
    } else {
        ProbeTarget::Intrinsic(rc.j)
    };
    let slope = scaling_exponent_probe(cfg, &rc.window, target, &rc.r_grid)?;
    let expected = 1.0 - cfg.k as f64 / cfg.d as f64;
    let tol = rc.raw.slope_tol.unwrap_or(0.05);
    let mut statistics = BTreeMap::new();
    statistics.insert(
        "fitted_slope".into(),
        Labeled::closed(slope, "growing_window_probe"),
    );
    statistics.insert(
        "expected_slope".into(),
        Labeled::closed(expected, "growing_window_order"),
    );
    let assertions = vec![assert_leq(
        "slope_matches_order",
        (slope - expected).abs(),
        tol,
        format!("|{slope} − {expected}| vs tolerance {tol}"),
    )];
    let mut csv = String::from("r,log_upper,path,\n");
    let template = cfg.law.template_body().map_err(ProcessError::from)?;
    for &r in &rc.r_grid {
        let scaled = rc
            .window
            .scaled(r.powf(1.0 / cfg.d as f64))
            .map_err(ProcessError::from)?;
        let lb = match target {
            ProbeTarget::Volume => {
                let p = rotated_base_params(&template, &scaled, cfg)?;
                rotated_base_bound(&p, r, Tail::Upper)?
            }
            ProbeTarget::Intrinsic(j) => cylproc::bounds::intrinsic_rotated_bound(
                &template,
                &scaled,
                cfg,
                j,
                r,
                Tail::Upper,
            )?,
        };
        csv.push_str(&format!("{r},{lb:.17e},probe,\n"));
    }
    let pass = assertions.iter().all(|a| a.pass);
    Ok(Outputs {
        summary: Summary {
            schema_version: 1,
            experiment: "scaling_probe",
            seed,
            inputs: serde_json::Value::Null,
            constants: common_constants(rc)?,
            statistics,
            assertions,
            pass,
        },
        csv,
        svg: None,
    })
}

fn run_coeff_dump(rc: &ResolvedConfig, seed: u64) -> Result<Outputs, RunError> {
    let cfg = &rc.cfg;
    let betas = intrinsic_beta_coeffs(cfg, rc.j)?;
    let mut constants = common_constants(rc)?;
    if rc.j < cfg.d {
        if let Some(p) = closed_form_params(rc)? {
            constants.insert(
                format!("alpha_j{}", rc.j),
                Labeled::closed(p.alpha, "rotated_base_intrinsic_alpha"),
            );
            constants.insert(
                format!("beta_j{}", rc.j),
                Labeled::closed(p.beta, "rotated_base_intrinsic_beta"),
            );
        }
    }
    let mean_j = mean_intrinsic_closed(cfg, &rc.window, rc.j)?;
    constants.insert(
        format!("mean_intrinsic_j{}", rc.j),
        Labeled::closed(mean_j.value, "intrinsic_mean_closed"),
    );
    let mut csv = String::from("m,beta_m\n");
    for (m, b) in betas.iter().enumerate() {
        csv.push_str(&format!("{m},{b:.17e}\n"));
        constants.insert(
            format!("beta_{m}"),
            Labeled::closed(*b, "intrinsic_tail_coefficient"),
        );
    }
    let mut assertions = vec![AssertionResult {
        name: "beta_coefficients_nonnegative".into(),
        pass: betas.iter().all(|b| *b >= 0.0),
        detail: format!("{betas:?}"),
    }];
    if betas.len() > 1 {
        assertions.push(AssertionResult {
            name: "beta_1_vanishes".into(),
            pass: betas[1] == 0.0,
            detail: format!("beta_1 = {}", betas[1]),
        });
    }
    if rc.j == cfg.d {
        let expected = cfg.volume_fraction()? / cfg.base_volume_moment()?;
        assertions.push(AssertionResult {
            name: "top_order_collapses_to_p_over_m".into(),
            pass: betas.len() == 1 && (betas[0] - expected).abs() <= 1e-12 * expected,
            detail: format!("[{:.17e}] vs p/m = {expected:.17e}", betas[0]),
        });
    }
    let pass = assertions.iter().all(|a| a.pass);
    Ok(Outputs {
        summary: Summary {
            schema_version: 1,
            experiment: "coeff_dump",
            seed,
            inputs: serde_json::Value::Null,
            constants,
            statistics: BTreeMap::new(),
            assertions,
            pass,
        },
        csv,
        svg: None,
    })
}

/// Run the configured experiment and write its report files; returns whether
/// all configured assertions passed.
pub fn run(
    rc: &ResolvedConfig,
    raw_json: &serde_json::Value,
    out_dir: &Path,
    seed: u64,
) -> Result<bool, RunError> {
    let mut outputs = match rc.raw.experiment {
        ExperimentKind::TailCompare => run_tail_compare(rc, seed)?,
        ExperimentKind::MeanCheck => run_mean_check(rc, seed)?,
        ExperimentKind::CapacityCheck => run_capacity_check(rc, seed)?,
        ExperimentKind::BoundCurves => run_bound_curves(rc, seed)?,
        ExperimentKind::ScalingProbe => run_scaling_probe(rc, seed)?,
        ExperimentKind::CoeffDump => run_coeff_dump(rc, seed)?,
    };
    outputs.summary.inputs = raw_json.clone();
    fs::create_dir_all(out_dir)?;
    fs::write(
        out_dir.join("summary.json"),
        serde_json::to_string_pretty(&outputs.summary)? + "\n",
    )?;
    fs::write(out_dir.join("curves.csv"), &outputs.csv)?;
    if let Some(svg_doc) = &outputs.svg {
        fs::write(out_dir.join("curves.svg"), svg_doc)?;
    }
    for a in &outputs.summary.assertions {
        let status = if a.pass { "pass" } else { "FAIL" };
        println!("[{status}] {}: {}", a.name, a.detail);
    }
    println!(
        "{}: {} ({} assertions) → {}",
        outputs.summary.experiment,
        if outputs.summary.pass { "PASS" } else { "FAIL" },
        outputs.summary.assertions.len(),
        out_dir.display()
    );
    Ok(outputs.summary.pass)
}

impl From<serde_json::Error> for RunError {
    fn from(e: serde_json::Error) -> Self {
        RunError::Config(ConfigError::Parse(e))
    }
}

/// Dry-run: compute and print the derived constants without sampling.
pub fn validate(rc: &ResolvedConfig) -> Result<(), RunError> {
    let constants = common_constants(rc)?;
    println!(
        "config ok: experiment {} (d={}, k={}, γ={})",
        rc.raw.experiment.name(),
        rc.cfg.d,
        rc.cfg.k,
        rc.cfg.gamma
    );
    for (name, labeled) in &constants {
        println!(
            "  {name} = {:.12e}   [{}]",
            labeled.value, labeled.provenance
        );
    }
    if rc.j >= rc.cfg.k.max(1) {
        let betas = intrinsic_beta_coeffs(&rc.cfg, rc.j)?;
        println!("  beta coefficients (j = {}): {betas:?}", rc.j);
    }
    Ok(())
}
