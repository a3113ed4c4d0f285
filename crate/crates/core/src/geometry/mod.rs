//! Convex-body primitives: intrinsic volumes, diameters, membership and
//! distance oracles, projections of rotated bodies, Steiner and Minkowski-sum
//! volumes, and the κ-ratio constants used by every analytic formula in this
//! crate.
//!
//! Bodies are immutable after construction and safe to share across workers;
//! every operation here is a pure function.

mod linalg;
pub mod lp;
mod minnorm;

use serde::{Deserialize, Serialize};

use crate::numeric::{binomial, ln_factorial, ln_unit_ball_volume, KahanSum};
pub use crate::numeric::{ln_unit_ball_volume as ln_kappa, unit_ball_volume};
pub use minnorm::distance_to_hull;

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("unsupported body for this operation: {0}")]
    UnsupportedBody(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("degenerate body: {0}")]
    DegenerateBody(&'static str),
    #[error("region is unbounded")]
    Unbounded,
    #[error("membership solver failed to converge")]
    InfeasibleTest,
    #[error("body has no points")]
    EmptyBody,
    #[error("invalid rotation: {0}")]
    InvalidRotation(&'static str),
}

impl From<lp::LpStalled> for GeometryError {
    fn from(_: lp::LpStalled) -> Self {
        GeometryError::InfeasibleTest
    }
}

/// A closed halfspace {x : normal·x ≤ offset} with unit normal.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// Tagged union of the supported convex bodies, each carrying its ambient
/// dimension implicitly through its coordinate data.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvexBody {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Box {
        center: Vec<f64>,
        half_extents: Vec<f64>,
    },
    PolytopeV {
        vertices: Vec<Vec<f64>>,
    },
    PolytopeH {
        halfspaces: Vec<Halfspace>,
    },
}

impl ConvexBody {
    /// Ball; radius must be strictly positive.
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self, GeometryError> {
        if center.is_empty() {
            return Err(GeometryError::DegenerateBody("ball in dimension 0"));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(GeometryError::DegenerateBody("ball radius must be > 0"));
        }
        Ok(ConvexBody::Ball { center, radius })
    }

    pub fn centered_ball(dim: usize, radius: f64) -> Result<Self, GeometryError> {
        Self::ball(vec![0.0; dim], radius)
    }

    /// Axis-aligned box; all half-extents must be strictly positive.
    pub fn cuboid(center: Vec<f64>, half_extents: Vec<f64>) -> Result<Self, GeometryError> {
        if half_extents.is_empty() {
            return Err(GeometryError::DegenerateBody("box in dimension 0"));
        }
        if center.len() != half_extents.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: half_extents.len(),
                got: center.len(),
            });
        }
        if half_extents.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return Err(GeometryError::DegenerateBody("box half-extent must be > 0"));
        }
        Ok(ConvexBody::Box {
            center,
            half_extents,
        })
    }

    pub fn centered_cube(dim: usize, half_extent: f64) -> Result<Self, GeometryError> {
        Self::cuboid(vec![0.0; dim], vec![half_extent; dim])
    }

    /// Unit cube `[0,1]^dim`.
    pub fn unit_cube(dim: usize) -> Result<Self, GeometryError> {
        Self::cuboid(vec![0.5; dim], vec![0.5; dim])
    }

    /// Convex hull of a non-empty vertex list.
    pub fn polytope_v(vertices: Vec<Vec<f64>>) -> Result<Self, GeometryError> {
        let Some(first) = vertices.first() else {
            return Err(GeometryError::EmptyBody);
        };
        let n = first.len();
        if n == 0 {
            return Err(GeometryError::DegenerateBody("vertices in dimension 0"));
        }
        if let Some(bad) = vertices.iter().map(|v| v.len()).find(|l| *l != n) {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                got: bad,
            });
        }
        Ok(ConvexBody::PolytopeV { vertices })
    }

    /// Halfspace intersection; checked non-empty (with interior) and bounded
    /// by LP probes at construction.
    pub fn polytope_h(halfspaces: Vec<Halfspace>) -> Result<Self, GeometryError> {
        let Some(first) = halfspaces.first() else {
            return Err(GeometryError::EmptyBody);
        };
        let n = first.normal.len();
        for hs in &halfspaces {
            if hs.normal.len() != n {
                return Err(GeometryError::DimensionMismatch {
                    expected: n,
                    got: hs.normal.len(),
                });
            }
            let norm: f64 = hs.normal.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(GeometryError::DegenerateBody(
                    "halfspace normal must be unit",
                ));
            }
        }
        let body = ConvexBody::PolytopeH { halfspaces };
        if body.chebyshev_inradius()? <= lp::FEAS_TOL {
            return Err(GeometryError::DegenerateBody(
                "halfspace region has empty interior",
            ));
        }
        if !body.h_rep_bounded()? {
            return Err(GeometryError::Unbounded);
        }
        Ok(body)
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Ball { center, .. } => center.len(),
            ConvexBody::Box { center, .. } => center.len(),
            ConvexBody::PolytopeV { vertices } => vertices[0].len(),
            ConvexBody::PolytopeH { halfspaces } => halfspaces[0].normal.len(),
        }
    }

    /// Re-run the construction checks (used after deserialising replays).
    pub fn validate(&self) -> Result<(), GeometryError> {
        match self.clone() {
            ConvexBody::Ball { center, radius } => Self::ball(center, radius).map(|_| ()),
            ConvexBody::Box {
                center,
                half_extents,
            } => Self::cuboid(center, half_extents).map(|_| ()),
            ConvexBody::PolytopeV { vertices } => Self::polytope_v(vertices).map(|_| ()),
            ConvexBody::PolytopeH { halfspaces } => Self::polytope_h(halfspaces).map(|_| ()),
        }
    }

    /// j-th intrinsic volume. Closed forms exist for balls and boxes in any
    /// dimension; V-polytopes are supported for j = 0 and, in dimensions 1
    /// and 2, for the top two orders via the convex hull. External-angle
    /// machinery for general polytopes is deliberately absent.
    pub fn intrinsic_volume(&self, j: usize) -> Result<f64, GeometryError> {
        let n = self.dim();
        assert!(j <= n, "intrinsic volume order {j} exceeds dimension {n}");
        match self {
            ConvexBody::Ball { radius, .. } => {
                // V_j(B_r^n) = C(n,j) κ_n/κ_{n−j} r^j
                let ln = ln_unit_ball_volume(n) - ln_unit_ball_volume(n - j);
                Ok(binomial(n, j) * ln.exp() * radius.powi(j as i32))
            }
            ConvexBody::Box { half_extents, .. } => {
                let edges: Vec<f64> = half_extents.iter().map(|h| 2.0 * h).collect();
                Ok(elementary_symmetric(&edges, j))
            }
            ConvexBody::PolytopeV { vertices } => {
                if j == 0 {
                    return Ok(1.0);
                }
                if vertices.len() == 1 {
                    return Ok(0.0); // a point has no positive-order content
                }
                match n {
                    1 => {
                        let lo = vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
                        let hi = vertices
                            .iter()
                            .map(|v| v[0])
                            .fold(f64::NEG_INFINITY, f64::max);
                        Ok(hi - lo)
                    }
                    2 => {
                        let hull = convex_hull_2d(vertices);
                        match j {
                            1 => Ok(polygon_perimeter(&hull) / 2.0),
                            2 => Ok(polygon_area(&hull)),
                            _ => unreachable!(),
                        }
                    }
                    _ => Err(GeometryError::UnsupportedBody(
                        "intrinsic volumes of V-polytopes in dimension >= 3",
                    )),
                }
            }
            ConvexBody::PolytopeH { .. } => {
                if j == 0 {
                    Ok(1.0)
                } else {
                    Err(GeometryError::UnsupportedBody(
                        "intrinsic volumes of H-polytopes",
                    ))
                }
            }
        }
    }

    /// Top intrinsic volume V_n, i.e. the Lebesgue volume.
    pub fn volume(&self) -> Result<f64, GeometryError> {
        self.intrinsic_volume(self.dim())
    }

    /// Exact diameter (supremum of pairwise distances).
    pub fn diameter(&self) -> Result<f64, GeometryError> {
        match self {
            ConvexBody::Ball { radius, .. } => Ok(2.0 * radius),
            ConvexBody::Box { half_extents, .. } => {
                Ok(2.0 * half_extents.iter().map(|h| h * h).sum::<f64>().sqrt())
            }
            ConvexBody::PolytopeV { vertices } => {
                let mut best = 0.0_f64;
                for (i, a) in vertices.iter().enumerate() {
                    for b in &vertices[i + 1..] {
                        let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                        best = best.max(d2);
                    }
                }
                Ok(best.sqrt())
            }
            ConvexBody::PolytopeH { .. } => Err(GeometryError::UnsupportedBody(
                "diameter of H-polytopes (convert to vertex form first)",
            )),
        }
    }

    /// Membership oracle.
    pub fn contains(&self, point: &[f64]) -> Result<bool, GeometryError> {
        let n = self.dim();
        if point.len() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                got: point.len(),
            });
        }
        match self {
            ConvexBody::Ball { center, radius } => {
                let d2: f64 = point
                    .iter()
                    .zip(center)
                    .map(|(p, c)| (p - c) * (p - c))
                    .sum();
                Ok(d2 <= radius * radius)
            }
            ConvexBody::Box {
                center,
                half_extents,
            } => Ok(point
                .iter()
                .zip(center)
                .zip(half_extents)
                .all(|((p, c), h)| (p - c).abs() <= *h)),
            ConvexBody::PolytopeH { halfspaces } => Ok(halfspaces.iter().all(|hs| {
                hs.normal.iter().zip(point).map(|(a, x)| a * x).sum::<f64>()
                    <= hs.offset + lp::FEAS_TOL
            })),
            ConvexBody::PolytopeV { vertices } => {
                // Convex-combination feasibility: Σλ_i v_i = p, Σλ_i = 1, λ ≥ 0.
                let mut rows = vec![vec![0.0; vertices.len()]; n + 1];
                for (j, v) in vertices.iter().enumerate() {
                    for i in 0..n {
                        rows[i][j] = v[i];
                    }
                    rows[n][j] = 1.0;
                }
                let mut rhs = point.to_vec();
                rhs.push(1.0);
                Ok(lp::feasible_eq(&rows, &rhs)?)
            }
        }
    }

    /// Euclidean distance to the body (zero inside).
    pub fn distance(&self, point: &[f64]) -> Result<f64, GeometryError> {
        let n = self.dim();
        if point.len() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                got: point.len(),
            });
        }
        match self {
            ConvexBody::Ball { center, radius } => {
                let d: f64 = point
                    .iter()
                    .zip(center)
                    .map(|(p, c)| (p - c) * (p - c))
                    .sum::<f64>()
                    .sqrt();
                Ok((d - radius).max(0.0))
            }
            ConvexBody::Box {
                center,
                half_extents,
            } => {
                let mut acc = 0.0;
                for ((p, c), h) in point.iter().zip(center).zip(half_extents) {
                    let over = ((p - c).abs() - h).max(0.0);
                    acc += over * over;
                }
                Ok(acc.sqrt())
            }
            ConvexBody::PolytopeV { vertices } => distance_to_hull(point, vertices),
            ConvexBody::PolytopeH { .. } => {
                Err(GeometryError::UnsupportedBody("distance to H-polytopes"))
            }
        }
    }

    /// Radius of the smallest origin-centred ball containing the body.
    pub fn circumradius_origin(&self) -> Result<f64, GeometryError> {
        match self {
            ConvexBody::Ball { center, radius } => {
                Ok(center.iter().map(|c| c * c).sum::<f64>().sqrt() + radius)
            }
            ConvexBody::Box {
                center,
                half_extents,
            } => Ok(center
                .iter()
                .zip(half_extents)
                .map(|(c, h)| (c.abs() + h) * (c.abs() + h))
                .sum::<f64>()
                .sqrt()),
            ConvexBody::PolytopeV { vertices } => Ok(vertices
                .iter()
                .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
                .fold(0.0, f64::max)),
            ConvexBody::PolytopeH { .. } => Err(GeometryError::UnsupportedBody(
                "circumradius of H-polytopes",
            )),
        }
    }

    /// Inradius (largest ball inside the body).
    pub fn inradius(&self) -> Result<f64, GeometryError> {
        match self {
            ConvexBody::Ball { radius, .. } => Ok(*radius),
            ConvexBody::Box { half_extents, .. } => {
                Ok(half_extents.iter().copied().fold(f64::INFINITY, f64::min))
            }
            ConvexBody::PolytopeH { .. } => self.chebyshev_inradius(),
            ConvexBody::PolytopeV { .. } => {
                Err(GeometryError::UnsupportedBody("inradius of V-polytopes"))
            }
        }
    }

    /// Axis-aligned bounding box as (lower, upper) corner vectors.
    pub fn bounding_box(&self) -> Result<(Vec<f64>, Vec<f64>), GeometryError> {
        match self {
            ConvexBody::Ball { center, radius } => Ok((
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            )),
            ConvexBody::Box {
                center,
                half_extents,
            } => Ok((
                center
                    .iter()
                    .zip(half_extents)
                    .map(|(c, h)| c - h)
                    .collect(),
                center
                    .iter()
                    .zip(half_extents)
                    .map(|(c, h)| c + h)
                    .collect(),
            )),
            ConvexBody::PolytopeV { vertices } => {
                let n = self.dim();
                let mut lo = vec![f64::INFINITY; n];
                let mut hi = vec![f64::NEG_INFINITY; n];
                for v in vertices {
                    for i in 0..n {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                Ok((lo, hi))
            }
            ConvexBody::PolytopeH { .. } => Err(GeometryError::UnsupportedBody(
                "bounding box of H-polytopes",
            )),
        }
    }

    /// A point in the interior (exact centre for balls and boxes, vertex mean
    /// for V-polytopes, Chebyshev centre for H-polytopes).
    pub fn centroid_hint(&self) -> Result<Vec<f64>, GeometryError> {
        match self {
            ConvexBody::Ball { center, .. } | ConvexBody::Box { center, .. } => Ok(center.clone()),
            ConvexBody::PolytopeV { vertices } => {
                let n = self.dim();
                let mut c = vec![0.0; n];
                for v in vertices {
                    for i in 0..n {
                        c[i] += v[i];
                    }
                }
                for x in c.iter_mut() {
                    *x /= vertices.len() as f64;
                }
                Ok(c)
            }
            ConvexBody::PolytopeH { .. } => self.chebyshev_centre().map(|(c, _)| c),
        }
    }

    pub fn translated(&self, shift: &[f64]) -> ConvexBody {
        let add = |v: &[f64]| -> Vec<f64> { v.iter().zip(shift).map(|(a, b)| a + b).collect() };
        match self {
            ConvexBody::Ball { center, radius } => ConvexBody::Ball {
                center: add(center),
                radius: *radius,
            },
            ConvexBody::Box {
                center,
                half_extents,
            } => ConvexBody::Box {
                center: add(center),
                half_extents: half_extents.clone(),
            },
            ConvexBody::PolytopeV { vertices } => ConvexBody::PolytopeV {
                vertices: vertices.iter().map(|v| add(v)).collect(),
            },
            ConvexBody::PolytopeH { halfspaces } => ConvexBody::PolytopeH {
                halfspaces: halfspaces
                    .iter()
                    .map(|hs| Halfspace {
                        normal: hs.normal.clone(),
                        offset: hs.offset
                            + hs.normal.iter().zip(shift).map(|(a, b)| a * b).sum::<f64>(),
                    })
                    .collect(),
            },
        }
    }

    /// Dilation about the origin by a strictly positive factor.
    pub fn scaled(&self, factor: f64) -> Result<ConvexBody, GeometryError> {
        if !(factor > 0.0) {
            return Err(GeometryError::DegenerateBody("scale factor must be > 0"));
        }
        let mul = |v: &[f64]| -> Vec<f64> { v.iter().map(|a| a * factor).collect() };
        Ok(match self {
            ConvexBody::Ball { center, radius } => ConvexBody::Ball {
                center: mul(center),
                radius: radius * factor,
            },
            ConvexBody::Box {
                center,
                half_extents,
            } => ConvexBody::Box {
                center: mul(center),
                half_extents: mul(half_extents),
            },
            ConvexBody::PolytopeV { vertices } => ConvexBody::PolytopeV {
                vertices: vertices.iter().map(|v| mul(v)).collect(),
            },
            ConvexBody::PolytopeH { halfspaces } => ConvexBody::PolytopeH {
                halfspaces: halfspaces
                    .iter()
                    .map(|hs| Halfspace {
                        normal: hs.normal.clone(),
                        offset: hs.offset * factor,
                    })
                    .collect(),
            },
        })
    }

    /// Reflection at the origin, K ↦ −K.
    pub fn reflected(&self) -> ConvexBody {
        let neg = |v: &[f64]| -> Vec<f64> { v.iter().map(|a| -a).collect() };
        match self {
            ConvexBody::Ball { center, radius } => ConvexBody::Ball {
                center: neg(center),
                radius: *radius,
            },
            ConvexBody::Box {
                center,
                half_extents,
            } => ConvexBody::Box {
                center: neg(center),
                half_extents: half_extents.clone(),
            },
            ConvexBody::PolytopeV { vertices } => ConvexBody::PolytopeV {
                vertices: vertices.iter().map(|v| neg(v)).collect(),
            },
            ConvexBody::PolytopeH { halfspaces } => ConvexBody::PolytopeH {
                halfspaces: halfspaces
                    .iter()
                    .map(|hs| Halfspace {
                        normal: neg(&hs.normal),
                        offset: hs.offset,
                    })
                    .collect(),
            },
        }
    }

    /// Image of the body under a rotation of the ambient space.
    pub fn rotated(&self, q: &Rotation) -> Result<ConvexBody, GeometryError> {
        let n = self.dim();
        if q.dim() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                got: q.dim(),
            });
        }
        Ok(match self {
            ConvexBody::Ball { center, radius } => ConvexBody::Ball {
                center: q.apply(center),
                radius: *radius,
            },
            ConvexBody::Box { .. } => ConvexBody::PolytopeV {
                vertices: self.vertex_list()?.iter().map(|v| q.apply(v)).collect(),
            },
            ConvexBody::PolytopeV { vertices } => ConvexBody::PolytopeV {
                vertices: vertices.iter().map(|v| q.apply(v)).collect(),
            },
            ConvexBody::PolytopeH { halfspaces } => ConvexBody::PolytopeH {
                halfspaces: halfspaces
                    .iter()
                    .map(|hs| Halfspace {
                        normal: q.apply(&hs.normal),
                        offset: hs.offset,
                    })
                    .collect(),
            },
        })
    }

    /// P_{n−k}(θᵀ body): rotate by θᵀ and keep the first n−k coordinates.
    ///
    /// Balls stay balls (a projected rotated ball keeps its radius); boxes
    /// and V-polytopes become V-polytopes over the projected vertices.
    /// k = 0 with θ = I is the identity.
    pub fn project_rotated(&self, theta: &Rotation, k: usize) -> Result<ConvexBody, GeometryError> {
        let n = self.dim();
        if theta.dim() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                got: theta.dim(),
            });
        }
        assert!(k < n, "projection codimension {k} must be < dimension {n}");
        let keep = n - k;
        if k == 0 && theta.is_identity() {
            return Ok(self.clone());
        }
        match self {
            ConvexBody::Ball { center, radius } => {
                let mut c = theta.apply_transpose(center);
                c.truncate(keep);
                Ok(ConvexBody::Ball {
                    center: c,
                    radius: *radius,
                })
            }
            ConvexBody::Box { .. } | ConvexBody::PolytopeV { .. } => {
                let vertices = self
                    .vertex_list()?
                    .iter()
                    .map(|v| {
                        let mut w = theta.apply_transpose(v);
                        w.truncate(keep);
                        w
                    })
                    .collect();
                Ok(ConvexBody::PolytopeV { vertices })
            }
            ConvexBody::PolytopeH { .. } => {
                Err(GeometryError::UnsupportedBody("projection of H-polytopes"))
            }
        }
    }

    /// λ_n(body ⊕ B_ρ^n) via the Steiner expansion Σ_j ρ^{n−j} κ_{n−j} V_j.
    pub fn steiner_ball_sum_volume(&self, rho: f64) -> Result<f64, GeometryError> {
        assert!(rho >= 0.0, "Steiner radius must be non-negative");
        let n = self.dim();
        let mut acc = KahanSum::new();
        for j in 0..=n {
            let vj = self.intrinsic_volume(j)?;
            acc.add(rho.powi((n - j) as i32) * unit_ball_volume(n - j) * vj);
        }
        Ok(acc.value())
    }

    /// Explicit vertex list (boxes are expanded into their corners).
    pub fn vertex_list(&self) -> Result<Vec<Vec<f64>>, GeometryError> {
        match self {
            ConvexBody::Box {
                center,
                half_extents,
            } => {
                let n = center.len();
                assert!(n <= 20, "corner expansion in dimension {n} is unreasonable");
                let mut out = Vec::with_capacity(1 << n);
                for mask in 0u32..(1 << n) {
                    out.push(
                        (0..n)
                            .map(|i| {
                                center[i]
                                    + if mask >> i & 1 == 1 {
                                        half_extents[i]
                                    } else {
                                        -half_extents[i]
                                    }
                            })
                            .collect(),
                    );
                }
                Ok(out)
            }
            ConvexBody::PolytopeV { vertices } => Ok(vertices.clone()),
            ConvexBody::Ball { .. } => Err(GeometryError::UnsupportedBody("vertex list of a ball")),
            ConvexBody::PolytopeH { .. } => {
                Err(GeometryError::UnsupportedBody("vertex list of H-polytopes"))
            }
        }
    }

    fn chebyshev_centre(&self) -> Result<(Vec<f64>, f64), GeometryError> {
        let ConvexBody::PolytopeH { halfspaces } = self else {
            return Err(GeometryError::UnsupportedBody("Chebyshev centre"));
        };
        let n = self.dim();
        // max t s.t. a_i·x + t ≤ b_i, free x split as u − v, slack s_i.
        let m = halfspaces.len();
        let nv = 2 * n + 1 + m;
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        for (i, hs) in halfspaces.iter().enumerate() {
            let mut row = vec![0.0; nv];
            for j in 0..n {
                row[j] = hs.normal[j];
                row[n + j] = -hs.normal[j];
            }
            row[2 * n] = 1.0;
            row[2 * n + 1 + i] = 1.0;
            rows.push(row);
            rhs.push(hs.offset);
        }
        let mut cost = vec![0.0; nv];
        cost[2 * n] = -1.0;
        match lp::solve_lp(&rows, &rhs, &cost)? {
            lp::LpOutcome::Optimal { x, .. } => {
                let centre: Vec<f64> = (0..n).map(|j| x[j] - x[n + j]).collect();
                Ok((centre, x[2 * n]))
            }
            lp::LpOutcome::Infeasible => Err(GeometryError::EmptyBody),
            // t unbounded means the region contains arbitrarily large balls.
            lp::LpOutcome::Unbounded => Err(GeometryError::Unbounded),
        }
    }

    fn chebyshev_inradius(&self) -> Result<f64, GeometryError> {
        match self.chebyshev_centre() {
            Ok((_, t)) => Ok(t),
            Err(GeometryError::EmptyBody) => Ok(0.0),
            Err(e) => Err(e),
        }
    }

    fn h_rep_bounded(&self) -> Result<bool, GeometryError> {
        let ConvexBody::PolytopeH { halfspaces } = self else {
            return Err(GeometryError::UnsupportedBody("boundedness probe"));
        };
        let n = self.dim();
        let m = halfspaces.len();
        let nv = 2 * n + m;
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        for (i, hs) in halfspaces.iter().enumerate() {
            let mut row = vec![0.0; nv];
            for j in 0..n {
                row[j] = hs.normal[j];
                row[n + j] = -hs.normal[j];
            }
            row[2 * n + i] = 1.0;
            rows.push(row);
            rhs.push(hs.offset);
        }
        for coord in 0..n {
            for sign in [1.0, -1.0] {
                let mut cost = vec![0.0; nv];
                cost[coord] = sign;
                cost[n + coord] = -sign;
                if matches!(lp::solve_lp(&rows, &rhs, &cost)?, lp::LpOutcome::Unbounded) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

pub const ROTATION_TOL: f64 = 1e-10;

/// Proper rotation of ℝⁿ (orthonormal, determinant +1), stored row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RotationRaw", into = "RotationRaw")]
pub struct Rotation {
    n: usize,
    mat: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RotationRaw {
    n: usize,
    mat: Vec<f64>,
}

impl TryFrom<RotationRaw> for Rotation {
    type Error = GeometryError;
    fn try_from(raw: RotationRaw) -> Result<Self, Self::Error> {
        Rotation::new(raw.n, raw.mat)
    }
}

impl From<Rotation> for RotationRaw {
    fn from(r: Rotation) -> Self {
        RotationRaw { n: r.n, mat: r.mat }
    }
}

impl Rotation {
    pub fn new(n: usize, mat: Vec<f64>) -> Result<Self, GeometryError> {
        if mat.len() != n * n || n == 0 {
            return Err(GeometryError::InvalidRotation("matrix shape"));
        }
        if linalg::orthonormality_defect(&mat, n) > ROTATION_TOL {
            return Err(GeometryError::InvalidRotation("columns not orthonormal"));
        }
        if (linalg::determinant(&mat, n) - 1.0).abs() > ROTATION_TOL {
            return Err(GeometryError::InvalidRotation("determinant is not +1"));
        }
        Ok(Rotation { n, mat })
    }

    pub fn identity(n: usize) -> Self {
        let mut mat = vec![0.0; n * n];
        for i in 0..n {
            mat[i * n + i] = 1.0;
        }
        Rotation { n, mat }
    }

    /// Planar rotation by `angle` in the (i, j) coordinate plane.
    pub fn planar(n: usize, i: usize, j: usize, angle: f64) -> Self {
        assert!(i < n && j < n && i != j);
        let mut r = Self::identity(n);
        let (s, c) = angle.sin_cos();
        r.mat[i * n + i] = c;
        r.mat[j * n + j] = c;
        r.mat[i * n + j] = -s;
        r.mat[j * n + i] = s;
        r
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &[f64] {
        &self.mat
    }

    pub fn is_identity(&self) -> bool {
        self.mat.iter().enumerate().all(|(idx, &v)| {
            v == if idx / self.n == idx % self.n {
                1.0
            } else {
                0.0
            }
        })
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        linalg::matvec(&self.mat, self.n, v, &mut out);
        out
    }

    pub fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        linalg::matvec_t(&self.mat, self.n, v, &mut out);
        out
    }

    /// Composition self · other.
    pub fn compose(&self, other: &Rotation) -> Rotation {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut mat = vec![0.0; n * n];
        for i in 0..n {
            for kk in 0..n {
                let a = self.mat[i * n + kk];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    mat[i * n + j] += a * other.mat[kk * n + j];
                }
            }
        }
        Rotation { n, mat }
    }

    pub fn determinant(&self) -> f64 {
        linalg::determinant(&self.mat, self.n)
    }

    pub fn orthonormality_defect(&self) -> f64 {
        linalg::orthonormality_defect(&self.mat, self.n)
    }

    pub(crate) fn from_unchecked(n: usize, mat: Vec<f64>) -> Self {
        Rotation { n, mat }
    }
}

pub(crate) use linalg::qr_orthonormalize;

/// Elementary symmetric polynomial e_j of the given values.
pub fn elementary_symmetric(values: &[f64], j: usize) -> f64 {
    if j > values.len() {
        return 0.0;
    }
    let mut e = vec![0.0; j + 1];
    e[0] = 1.0;
    for &a in values {
        for idx in (1..=j).rev() {
            e[idx] += a * e[idx - 1];
        }
    }
    e[j]
}

/// c_r^p = p! κ_p / (r! κ_r), evaluated in log space so that arguments up to
/// 50 stay exact to double precision.
pub fn c_constant(r: usize, p: usize) -> f64 {
    (ln_factorial(p) + ln_unit_ball_volume(p) - ln_factorial(r) - ln_unit_ball_volume(r)).exp()
}

/// Membership of `z` in the Minkowski sum A ⊕ B.
///
/// Ball pairs reduce to one distance check; a single ball against a polytope
/// or box is a distance-to-hull query; polytope/box pairs solve the joint
/// convex-combination feasibility LP (residual tolerance 1e−9).
pub fn minkowski_contains(
    a: &ConvexBody,
    b: &ConvexBody,
    z: &[f64],
) -> Result<bool, GeometryError> {
    let n = a.dim();
    if b.dim() != n || z.len() != n {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            got: if b.dim() != n { b.dim() } else { z.len() },
        });
    }
    match (a, b) {
        (
            ConvexBody::Ball {
                center: ca,
                radius: ra,
            },
            ConvexBody::Ball {
                center: cb,
                radius: rb,
            },
        ) => {
            let d2: f64 = z
                .iter()
                .zip(ca.iter().zip(cb))
                .map(|(zi, (x, y))| (zi - x - y) * (zi - x - y))
                .sum();
            Ok(d2.sqrt() <= ra + rb + 1e-12)
        }
        (ConvexBody::Ball { center, radius }, other)
        | (other, ConvexBody::Ball { center, radius }) => {
            let shifted: Vec<f64> = z.iter().zip(center).map(|(zi, c)| zi - c).collect();
            Ok(other.distance(&shifted)? <= radius + 1e-12)
        }
        (pa, pb) => {
            let va = pa.vertex_list()?;
            let vb = pb.vertex_list()?;
            // Σλ_i a_i + Σμ_j b_j = z, Σλ = 1, Σμ = 1, λ, μ ≥ 0.
            let cols = va.len() + vb.len();
            let mut rows = vec![vec![0.0; cols]; n + 2];
            for (j, v) in va.iter().enumerate() {
                for i in 0..n {
                    rows[i][j] = v[i];
                }
                rows[n][j] = 1.0;
            }
            for (j, v) in vb.iter().enumerate() {
                for i in 0..n {
                    rows[i][va.len() + j] = v[i];
                }
                rows[n + 1][va.len() + j] = 1.0;
            }
            let mut rhs = z.to_vec();
            rhs.push(1.0);
            rhs.push(1.0);
            Ok(lp::feasible_eq(&rows, &rhs)?)
        }
    }
}

/// Hit-or-miss estimate of λ_n(A ⊕ B) over the bounding box of the sum.
///
/// Returns the estimate and its binomial standard error.
pub fn minkowski_volume_mc(
    a: &ConvexBody,
    b: &ConvexBody,
    n_samples: usize,
    rng: &mut impl rand::Rng,
) -> Result<(f64, f64), GeometryError> {
    assert!(n_samples > 0);
    let n = a.dim();
    if b.dim() != n {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            got: b.dim(),
        });
    }
    let (lo_a, hi_a) = a.bounding_box()?;
    let (lo_b, hi_b) = b.bounding_box()?;
    let lo: Vec<f64> = lo_a.iter().zip(&lo_b).map(|(x, y)| x + y).collect();
    let hi: Vec<f64> = hi_a.iter().zip(&hi_b).map(|(x, y)| x + y).collect();
    let box_vol: f64 = lo.iter().zip(&hi).map(|(l, h)| h - l).product();
    let mut hits = 0u64;
    let mut z = vec![0.0; n];
    for _ in 0..n_samples {
        for i in 0..n {
            z[i] = rng.gen_range(lo[i]..hi[i]);
        }
        if minkowski_contains(a, b, &z)? {
            hits += 1;
        }
    }
    let p = hits as f64 / n_samples as f64;
    let est = box_vol * p;
    let se = box_vol * (p * (1.0 - p) / n_samples as f64).sqrt();
    Ok((est, se))
}

fn convex_hull_2d(points: &[Vec<f64>]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| -> f64 {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn polygon_area(hull: &[[f64; 2]]) -> f64 {
    if hull.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..hull.len() {
        let a = hull[i];
        let b = hull[(i + 1) % hull.len()];
        acc += a[0] * b[1] - b[0] * a[1];
    }
    acc.abs() / 2.0
}

fn polygon_perimeter(hull: &[[f64; 2]]) -> f64 {
    if hull.len() < 2 {
        return 0.0;
    }
    if hull.len() == 2 {
        // A segment's boundary measure is twice its length.
        return 2.0 * (hull[0][0] - hull[1][0]).hypot(hull[0][1] - hull[1][1]);
    }
    let mut acc = 0.0;
    for i in 0..hull.len() {
        let a = hull[i];
        let b = hull[(i + 1) % hull.len()];
        acc += (a[0] - b[0]).hypot(a[1] - b[1]);
    }
    acc
}
