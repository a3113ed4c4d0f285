//! Shared fixtures for the criterion benchmarks.

use cylproc::{BaseDirectionLaw, ConvexBody, ProcessConfig};

/// d=3, k=1, γ=0.3, disk base of radius 0.5 — the reference configuration.
pub fn reference_cfg() -> ProcessConfig {
    ProcessConfig::new(
        3,
        1,
        0.3,
        BaseDirectionLaw::deterministic_ball(2, 0.5).unwrap(),
    )
    .unwrap()
}

pub fn ball_window() -> ConvexBody {
    ConvexBody::centered_ball(3, 1.0).unwrap()
}

pub fn box_window() -> ConvexBody {
    ConvexBody::centered_cube(3, 0.8).unwrap()
}

/// Rotated-box-base configuration (exercises the LP membership path).
pub fn box_base_cfg() -> ProcessConfig {
    ProcessConfig::new(
        3,
        1,
        0.3,
        BaseDirectionLaw::rotated_fixed(ConvexBody::centered_cube(2, 0.4).unwrap()).unwrap(),
    )
    .unwrap()
}
