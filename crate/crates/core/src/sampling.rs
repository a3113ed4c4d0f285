//! Randomness contract and mark sampling: reproducible counter-based RNG
//! streams, Haar-uniform rotations, Poisson counts, and the base-direction
//! law with its exact moment oracles.
//!
//! Streams are owned by exactly one worker at a time; laws are immutable and
//! freely shared.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{ConvexBody, GeometryError, Rotation};
use crate::numeric::{ln_factorial, psi};

#[derive(Debug, thiserror::Error)]
pub enum SamplingError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("sampled base exceeds the declared circumradius bound")]
    CircumradiusViolation,
    #[error("radius law has unbounded support; exact exponential moments unavailable")]
    UnboundedSupport,
    #[error("invalid law: {0}")]
    InvalidLaw(&'static str),
}

/// Identifier of one reproducible random stream.
///
/// Distinct (seed, stream_id) pairs give statistically independent streams;
/// an identical pair reproduces the identical sequence bit for bit. Replicate
/// `r` of experiment `e` lives on stream e·2³² + r, so parallel runs assign
/// randomness by index rather than by scheduling order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Stream for replicate `replicate` of experiment `experiment`.
    pub fn for_replicate(seed: u64, experiment: u64, replicate: u64) -> Self {
        debug_assert!(
            replicate < 1 << 32,
            "replicate index overflows the stream id"
        );
        Self {
            seed,
            stream_id: experiment
                .wrapping_shl(32)
                .wrapping_add(replicate & 0xffff_ffff),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// One standard normal draw (Box–Muller; two uniforms per call keeps the
/// stream layout simple and deterministic).
pub fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Haar-uniform rotation on SO(n): Gaussian matrix → QR with the R-diagonal
/// sign normalisation → determinant fix by flipping the last column.
pub fn uniform_rotation(n: usize, rng: &mut impl Rng) -> Rotation {
    assert!(n >= 1);
    if n == 1 {
        // SO(1) is trivial, but consume the draws a generic caller expects.
        let _ = standard_normal(rng);
        return Rotation::identity(1);
    }
    let mut mat = vec![0.0; n * n];
    for entry in mat.iter_mut() {
        *entry = standard_normal(rng);
    }
    let rdiag = crate::geometry::qr_orthonormalize(&mut mat, n);
    // MGS leaves R with positive diagonal except for exact zeros, which have
    // probability zero; the sign normalisation is then already in place.
    debug_assert!(rdiag.iter().all(|d| *d > 0.0));
    let det = crate::geometry::Rotation::from_unchecked(n, mat.clone()).determinant();
    if det < 0.0 {
        for row in 0..n {
            mat[row * n + n - 1] = -mat[row * n + n - 1];
        }
    }
    Rotation::from_unchecked(n, mat)
}

/// Uniform point in the centred ball of radius `r` in ℝⁿ.
pub fn uniform_in_ball(n: usize, r: f64, rng: &mut impl Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| standard_normal(rng)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let u: f64 = rng.gen();
    let scale = r * u.powf(1.0 / n as f64) / norm;
    for x in v.iter_mut() {
        *x *= scale;
    }
    v
}

/// Poisson count with the given mean: exact inversion below mean 30, the
/// transformed-rejection method (PTRS) above.
pub fn poisson_count(mean: f64, rng: &mut impl Rng) -> u64 {
    assert!(
        mean >= 0.0 && mean < 1e9,
        "poisson mean out of range: {mean}"
    );
    if mean == 0.0 {
        return 0;
    }
    if mean < 30.0 {
        let mut p = (-mean).exp();
        let mut cdf = p;
        let mut k = 0u64;
        let u: f64 = rng.gen();
        while u > cdf {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
            if k > 10_000 {
                break; // cdf has saturated to 1 numerically
            }
        }
        k
    } else {
        // PTRS (Hörmann's transformed rejection with squeeze).
        let b = 0.931 + 2.53 * mean.sqrt();
        let a = -0.059 + 0.02483 * b;
        let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        let v_r = 0.9277 - 3.6224 / (b - 2.0);
        loop {
            let u: f64 = rng.gen::<f64>() - 0.5;
            let v: f64 = rng.gen();
            let us = 0.5 - u.abs();
            let kf = (2.0 * a / us + b) * u + mean + 0.43;
            if kf < 0.0 {
                continue;
            }
            let k = kf.floor();
            if us >= 0.07 && v <= v_r {
                return k as u64;
            }
            if us < 0.013 && v > us {
                continue;
            }
            let lhs = (v * inv_alpha / (a / (us * us) + b)).ln();
            let rhs = k * mean.ln() - mean - ln_factorial(k as usize);
            if lhs <= rhs {
                return k as u64;
            }
        }
    }
}

/// Law of the random dilation factor applied to the base template.
///
/// Finite support keeps every moment and exponential moment exact, which is
/// what the closed-form bound evaluations rely on.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusLaw {
    Constant(f64),
    Discrete(Vec<(f64, f64)>), // (value, probability)
}

impl RadiusLaw {
    pub fn validate(&self) -> Result<(), SamplingError> {
        match self {
            RadiusLaw::Constant(r) => {
                if !(*r >= 0.0) || !r.is_finite() {
                    return Err(SamplingError::InvalidLaw("constant radius must be ≥ 0"));
                }
            }
            RadiusLaw::Discrete(atoms) => {
                if atoms.is_empty() {
                    return Err(SamplingError::InvalidLaw("discrete law needs atoms"));
                }
                if atoms.iter().any(|(v, p)| !(*v >= 0.0) || !(*p > 0.0)) {
                    return Err(SamplingError::InvalidLaw(
                        "atoms need value ≥ 0 and probability > 0",
                    ));
                }
                let total: f64 = atoms.iter().map(|(_, p)| p).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(SamplingError::InvalidLaw("probabilities must sum to 1"));
                }
            }
        }
        Ok(())
    }

    /// Support as (value, probability) pairs.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        match self {
            RadiusLaw::Constant(r) => vec![(*r, 1.0)],
            RadiusLaw::Discrete(atoms) => atoms.clone(),
        }
    }

    /// 𝔼[R^q], exact.
    pub fn moment(&self, q: usize) -> f64 {
        self.atoms().iter().map(|(v, p)| p * v.powi(q as i32)).sum()
    }

    /// 𝔼[R^i Ψ(c R^power)], exact; `c` may have either sign.
    pub fn psi_moment(&self, i: usize, c: f64, power: usize) -> f64 {
        self.atoms()
            .iter()
            .map(|(v, p)| p * v.powi(i as i32) * psi(c * v.powi(power as i32)))
            .sum()
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        match self {
            RadiusLaw::Constant(r) => *r,
            RadiusLaw::Discrete(atoms) => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for (v, p) in atoms {
                    acc += p;
                    if u <= acc {
                        return *v;
                    }
                }
                atoms.last().unwrap().0
            }
        }
    }

    pub fn max_value(&self) -> f64 {
        self.atoms().iter().map(|(v, _)| *v).fold(0.0, f64::max)
    }
}

/// Distribution of the typical (direction, base) pair.
///
/// Every built-in variant is rotation invariant: the direction is always
/// Haar-uniform and the base is a Haar rotation of a dilated template, so
/// the union set these laws drive is isotropic.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseDirectionLaw {
    /// Ξ = U·M for a fixed template M and Haar-uniform U.
    RotatedFixed { body: ConvexBody },
    /// Ξ = U·(R·M) with an independent finite-support dilation R.
    RotatedDilated { body: ConvexBody, radius: RadiusLaw },
    /// Ξ = B_ρ deterministically (rotation invariant by itself).
    DeterministicBall { dim: usize, rho: f64 },
}

impl BaseDirectionLaw {
    pub fn rotated_fixed(body: ConvexBody) -> Result<Self, SamplingError> {
        let law = BaseDirectionLaw::RotatedFixed { body };
        law.validate()?;
        Ok(law)
    }

    pub fn rotated_dilated(body: ConvexBody, radius: RadiusLaw) -> Result<Self, SamplingError> {
        radius.validate()?;
        let law = BaseDirectionLaw::RotatedDilated { body, radius };
        law.validate()?;
        Ok(law)
    }

    pub fn deterministic_ball(dim: usize, rho: f64) -> Result<Self, SamplingError> {
        if !(rho > 0.0) {
            return Err(SamplingError::InvalidLaw("ball radius must be > 0"));
        }
        if dim == 0 {
            return Err(SamplingError::InvalidLaw("base dimension must be ≥ 1"));
        }
        Ok(BaseDirectionLaw::DeterministicBall { dim, rho })
    }

    pub fn validate(&self) -> Result<(), SamplingError> {
        match self {
            BaseDirectionLaw::RotatedFixed { body } => {
                body.validate()?;
            }
            BaseDirectionLaw::RotatedDilated { body, radius } => {
                body.validate()?;
                radius.validate()?;
                if radius.max_value() <= 0.0 {
                    return Err(SamplingError::InvalidLaw(
                        "dilation law is almost surely zero",
                    ));
                }
            }
            BaseDirectionLaw::DeterministicBall { dim, rho } => {
                if !(*rho > 0.0) || *dim == 0 {
                    return Err(SamplingError::InvalidLaw("degenerate ball law"));
                }
            }
        }
        Ok(())
    }

    /// Ambient dimension of the base (must equal d − k of the process).
    pub fn base_dim(&self) -> usize {
        match self {
            BaseDirectionLaw::RotatedFixed { body } => body.dim(),
            BaseDirectionLaw::RotatedDilated { body, .. } => body.dim(),
            BaseDirectionLaw::DeterministicBall { dim, .. } => *dim,
        }
    }

    /// All built-in laws keep the direction Haar and the base O-invariant.
    pub fn rotation_invariant(&self) -> bool {
        true
    }

    /// Declared circumradius bound: every sampled base lies in B_{r_max}.
    pub fn r_max(&self) -> Result<f64, SamplingError> {
        Ok(match self {
            BaseDirectionLaw::RotatedFixed { body } => body.circumradius_origin()?,
            BaseDirectionLaw::RotatedDilated { body, radius } => {
                body.circumradius_origin()? * radius.max_value()
            }
            BaseDirectionLaw::DeterministicBall { rho, .. } => *rho,
        })
    }

    /// The template body M₀ such that Ξ is distributed as a Haar rotation of
    /// r·M₀ with r drawn from `scaling_atoms`.
    pub fn template_body(&self) -> Result<ConvexBody, SamplingError> {
        Ok(match self {
            BaseDirectionLaw::RotatedFixed { body }
            | BaseDirectionLaw::RotatedDilated { body, .. } => body.clone(),
            BaseDirectionLaw::DeterministicBall { dim, rho } => {
                ConvexBody::centered_ball(*dim, *rho)?
            }
        })
    }

    /// Finite law of the dilation factor applied to the template.
    pub fn scaling_atoms(&self) -> Vec<(f64, f64)> {
        match self {
            BaseDirectionLaw::RotatedFixed { .. } | BaseDirectionLaw::DeterministicBall { .. } => {
                vec![(1.0, 1.0)]
            }
            BaseDirectionLaw::RotatedDilated { radius, .. } => radius.atoms(),
        }
    }

    /// m_i = 𝔼 V_i(Ξ), exact via rotation invariance of intrinsic volumes.
    pub fn moment(&self, i: usize) -> Result<f64, SamplingError> {
        let template = self.template_body()?;
        let vi = template.intrinsic_volume(i)?;
        let scale: f64 = self
            .scaling_atoms()
            .iter()
            .map(|(r, p)| p * r.powi(i as i32))
            .sum();
        Ok(vi * scale)
    }

    /// 𝔼[R^i Ψ(c R^{d−k})], the dilation-law exponential moment (R ≡ 1 for
    /// the undilated variants).
    pub fn exp_moment(&self, i: usize, c: f64) -> Result<f64, SamplingError> {
        let dk = self.base_dim();
        Ok(match self {
            BaseDirectionLaw::RotatedFixed { .. } | BaseDirectionLaw::DeterministicBall { .. } => {
                psi(c)
            }
            BaseDirectionLaw::RotatedDilated { radius, .. } => radius.psi_moment(i, c, dk),
        })
    }

    /// 𝔼[V_i(Ξ) Ψ(c λ_{d−k}(Ξ))], exact for the built-in laws.
    pub fn joint_psi_moment(&self, i: usize, c: f64) -> Result<f64, SamplingError> {
        let dk = self.base_dim();
        let template = self.template_body()?;
        let vi = template.intrinsic_volume(i)?;
        let vol = template.volume()?;
        Ok(self
            .scaling_atoms()
            .iter()
            .map(|(r, p)| p * vi * r.powi(i as i32) * psi(c * vol * r.powi(dk as i32)))
            .sum())
    }

    /// Draw the typical mark: a Haar direction θ on SO(d) and a base
    /// K = U(R·M₀) ⊂ ℝ^{d−k}. The draw order is θ, then U, then R.
    pub fn sample_mark(
        &self,
        d: usize,
        k: usize,
        rng: &mut impl Rng,
    ) -> Result<(Rotation, ConvexBody), SamplingError> {
        assert!(k < d, "cylinder flat dimension k must satisfy 0 ≤ k ≤ d−1");
        if self.base_dim() != d - k {
            return Err(SamplingError::InvalidLaw(
                "law base dimension does not match d − k",
            ));
        }
        let theta = uniform_rotation(d, rng);
        let base = match self {
            BaseDirectionLaw::DeterministicBall { dim, rho } => {
                ConvexBody::centered_ball(*dim, *rho)?
            }
            BaseDirectionLaw::RotatedFixed { body } => {
                let u = uniform_rotation(d - k, rng);
                body.rotated(&u)?
            }
            BaseDirectionLaw::RotatedDilated { body, radius } => {
                let u = uniform_rotation(d - k, rng);
                let r = radius.sample(rng);
                if r == 0.0 {
                    // Zero dilation collapses the base to the origin point.
                    ConvexBody::PolytopeV {
                        vertices: vec![vec![0.0; d - k]],
                    }
                } else {
                    body.scaled(r)?.rotated(&u)?
                }
            }
        };
        let bound = self.r_max()?;
        if base.circumradius_origin()? > bound * (1.0 + 1e-9) + 1e-12 {
            return Err(SamplingError::CircumradiusViolation);
        }
        Ok((theta, base))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::unit_ball_volume;
    use crate::numeric::close_rel;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = {
            let mut r = RngStream::new(7, 3).rng();
            (0..8).map(|_| r.gen()).collect()
        };
        let b: Vec<u64> = {
            let mut r = RngStream::new(7, 3).rng();
            (0..8).map(|_| r.gen()).collect()
        };
        assert_eq!(a, b);
        let c: Vec<u64> = {
            let mut r = RngStream::new(7, 4).rng();
            (0..8).map(|_| r.gen()).collect()
        };
        assert_ne!(a, c);
        assert_eq!(
            RngStream::for_replicate(1, 2, 3),
            RngStream::new(1, (2 << 32) + 3)
        );
    }

    #[test]
    fn so1_is_trivial() {
        let mut rng = RngStream::new(1, 0).rng();
        for _ in 0..5 {
            let q = uniform_rotation(1, &mut rng);
            assert_eq!(q.matrix(), &[1.0]);
        }
    }

    #[test]
    fn rotations_satisfy_invariants() {
        let mut rng = RngStream::new(2, 0).rng();
        for n in [2usize, 3, 5, 8] {
            for _ in 0..50 {
                let q = uniform_rotation(n, &mut rng);
                assert!(q.orthonormality_defect() <= 1e-10);
                assert!((q.determinant() - 1.0).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn haar_mean_vanishes() {
        let mut rng = RngStream::new(3, 0).rng();
        let n = 3;
        let u = [1.0, 0.0, 0.0];
        let mut mean = [0.0f64; 3];
        let reps = 100_000;
        for _ in 0..reps {
            let q = uniform_rotation(n, &mut rng);
            let v = q.apply(&u);
            for i in 0..n {
                mean[i] += v[i];
            }
        }
        let norm = mean
            .iter()
            .map(|x| (x / reps as f64).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(norm <= 0.02, "Haar mean norm {norm}");
    }

    /// Orthant histogram of the first column is uniform over sign patterns,
    /// both for Q and for ρQ (two-sample χ² at significance 1e−3, 7 dof).
    #[test]
    fn haar_invariance_chi_square() {
        const CHI2_999_DOF7: f64 = 24.321886347856854;
        let n = 3;
        let reps = 100_000usize;
        let rho = Rotation::planar(3, 0, 1, 1.234).compose(&Rotation::planar(3, 1, 2, 0.517));
        let orthant = |v: &[f64]| -> usize {
            v.iter()
                .enumerate()
                .map(|(i, x)| usize::from(*x > 0.0) << i)
                .sum()
        };
        let mut counts_q = [0f64; 8];
        let mut counts_rq = [0f64; 8];
        let mut rng = RngStream::new(4, 0).rng();
        for _ in 0..reps {
            let q = uniform_rotation(n, &mut rng);
            let col: Vec<f64> = (0..n).map(|i| q.matrix()[i * n]).collect();
            counts_q[orthant(&col)] += 1.0;
            let rq = rho.compose(&q);
            let col: Vec<f64> = (0..n).map(|i| rq.matrix()[i * n]).collect();
            counts_rq[orthant(&col)] += 1.0;
        }
        // One-sample against the uniform orthant law.
        let expect = reps as f64 / 8.0;
        let stat_q: f64 = counts_q.iter().map(|c| (c - expect).powi(2) / expect).sum();
        assert!(stat_q < CHI2_999_DOF7, "Q orthants not uniform: {stat_q}");
        // Two-sample Q vs ρQ.
        let mut stat2 = 0.0;
        for i in 0..8 {
            let pooled = (counts_q[i] + counts_rq[i]) / 2.0;
            stat2 +=
                (counts_q[i] - pooled).powi(2) / pooled + (counts_rq[i] - pooled).powi(2) / pooled;
        }
        assert!(stat2 < CHI2_999_DOF7, "Q vs ρQ distinguishable: {stat2}");
    }

    #[test]
    fn poisson_edge_and_moments() {
        let mut rng = RngStream::new(5, 0).rng();
        for _ in 0..100 {
            assert_eq!(poisson_count(0.0, &mut rng), 0);
        }
        for mean in [4.0, 50.0] {
            let reps = 100_000;
            let draws: Vec<f64> = (0..reps)
                .map(|_| poisson_count(mean, &mut rng) as f64)
                .collect();
            let m = draws.iter().sum::<f64>() / reps as f64;
            let var = draws.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (reps - 1) as f64;
            let se_mean = (mean / reps as f64).sqrt();
            assert!((m - mean).abs() <= 4.0 * se_mean, "mean {m} vs {mean}");
            // Var se for Poisson ≈ sqrt((2λ² + λ)/n).
            let se_var = ((2.0 * mean * mean + mean) / reps as f64).sqrt();
            assert!((var - mean).abs() <= 5.0 * se_var, "var {var} vs {mean}");
        }
    }

    #[test]
    fn moment_examples() {
        let dk = 2usize;
        let ball_law = BaseDirectionLaw::deterministic_ball(dk, 0.4).unwrap();
        let m2 = ball_law.moment(dk).unwrap();
        assert!(close_rel(
            m2,
            unit_ball_volume(dk) * 0.4f64.powi(2),
            1e-14,
            0.0
        ));

        let square = ConvexBody::centered_cube(2, 0.5).unwrap();
        let fixed =
            BaseDirectionLaw::rotated_dilated(square.clone(), RadiusLaw::Constant(1.0)).unwrap();
        for i in 0..=2 {
            assert!(close_rel(
                fixed.moment(i).unwrap(),
                square.intrinsic_volume(i).unwrap(),
                1e-14,
                0.0
            ));
        }
        let two_point = BaseDirectionLaw::rotated_dilated(
            square.clone(),
            RadiusLaw::Discrete(vec![(1.0, 0.5), (2.0, 0.5)]),
        )
        .unwrap();
        for i in 0..=2 {
            let expected =
                square.intrinsic_volume(i).unwrap() * (1.0 + 2.0f64.powi(i as i32)) / 2.0;
            assert!(close_rel(
                two_point.moment(i).unwrap(),
                expected,
                1e-14,
                0.0
            ));
        }
    }

    #[test]
    fn exp_moment_examples() {
        let square = ConvexBody::centered_cube(2, 0.5).unwrap();
        let unit =
            BaseDirectionLaw::rotated_dilated(square.clone(), RadiusLaw::Constant(1.0)).unwrap();
        for c in [-2.0, -0.3, 0.0, 0.7, 3.0] {
            assert!(close_rel(
                unit.exp_moment(3, c).unwrap(),
                psi(c),
                1e-14,
                1e-300
            ));
        }
        assert_eq!(unit.exp_moment(1, 0.0).unwrap(), 0.0);
        let half = BaseDirectionLaw::rotated_dilated(
            square,
            RadiusLaw::Discrete(vec![(0.0, 0.5), (1.0, 0.5)]),
        )
        .unwrap();
        for c in [-1.0, 0.4, 2.0] {
            assert!(close_rel(
                half.exp_moment(0, c).unwrap(),
                psi(c) / 2.0,
                1e-14,
                0.0
            ));
        }
    }

    #[test]
    fn exp_moment_matches_monte_carlo() {
        let square = ConvexBody::centered_cube(2, 0.5).unwrap();
        let law = BaseDirectionLaw::rotated_dilated(
            square,
            RadiusLaw::Discrete(vec![(0.5, 0.25), (1.0, 0.5), (1.5, 0.25)]),
        )
        .unwrap();
        let (i, c) = (1usize, 0.8);
        let exact = law.exp_moment(i, c).unwrap();
        let mut rng = RngStream::new(6, 0).rng();
        let radius = match &law {
            BaseDirectionLaw::RotatedDilated { radius, .. } => radius.clone(),
            _ => unreachable!(),
        };
        let reps = 100_000;
        let draws: Vec<f64> = (0..reps)
            .map(|_| {
                let r = radius.sample(&mut rng);
                r.powi(i as i32) * psi(c * r.powi(2))
            })
            .collect();
        let (mean, se) = crate::numeric::mean_se(&draws);
        assert!(
            (mean - exact).abs() <= 4.0 * se,
            "{mean} vs {exact} (se {se})"
        );
    }

    #[test]
    fn joint_psi_moment_examples() {
        // Deterministic ball: V_i(B_ρ)·Ψ(c·κ_{dk}ρ^{dk}).
        let rho = 0.4;
        let law = BaseDirectionLaw::deterministic_ball(2, rho).unwrap();
        let ball = ConvexBody::centered_ball(2, rho).unwrap();
        for c in [-1.5, 0.0, 0.8] {
            for i in 0..=2 {
                let expected =
                    ball.intrinsic_volume(i).unwrap() * psi(c * unit_ball_volume(2) * rho * rho);
                assert!(close_rel(
                    law.joint_psi_moment(i, c).unwrap(),
                    expected,
                    1e-14,
                    1e-300
                ));
            }
        }
        // Dilated square: the finite-sum expectation over atoms.
        let square = ConvexBody::centered_cube(2, 0.5).unwrap();
        let law = BaseDirectionLaw::rotated_dilated(
            square.clone(),
            RadiusLaw::Discrete(vec![(0.5, 0.5), (2.0, 0.5)]),
        )
        .unwrap();
        let c = 0.6;
        let i = 1;
        let expected: f64 = [(0.5, 0.5), (2.0, 0.5)]
            .iter()
            .map(|(r, p): &(f64, f64)| {
                p * square.intrinsic_volume(i).unwrap()
                    * r.powi(i as i32)
                    * psi(c * r.powi(2) * square.volume().unwrap())
            })
            .sum();
        assert!(close_rel(
            law.joint_psi_moment(i, c).unwrap(),
            expected,
            1e-14,
            0.0
        ));
    }

    #[test]
    fn sample_mark_examples() {
        let mut rng = RngStream::new(8, 0).rng();
        let ball_law = BaseDirectionLaw::deterministic_ball(2, 0.3).unwrap();
        let (theta, base) = ball_law.sample_mark(3, 1, &mut rng).unwrap();
        assert_eq!(theta.dim(), 3);
        match base {
            ConvexBody::Ball { center, radius } => {
                assert_eq!(center, vec![0.0, 0.0]);
                assert_eq!(radius, 0.3);
            }
            other => panic!("{other:?}"),
        }
        // A rotated ball template stays the same ball.
        let fixed =
            BaseDirectionLaw::rotated_fixed(ConvexBody::centered_ball(2, 0.3).unwrap()).unwrap();
        let (_, base) = fixed.sample_mark(3, 1, &mut rng).unwrap();
        match base {
            ConvexBody::Ball { center, radius } => {
                assert!(center.iter().all(|c| c.abs() < 1e-12));
                assert_eq!(radius, 0.3);
            }
            other => panic!("{other:?}"),
        }
        // Dilated square: V₂ = R² exactly by homogeneity.
        let square = ConvexBody::centered_cube(2, 0.5).unwrap();
        let dilated = BaseDirectionLaw::rotated_dilated(square, RadiusLaw::Constant(2.0)).unwrap();
        for _ in 0..20 {
            let (_, base) = dilated.sample_mark(4, 2, &mut rng).unwrap();
            assert!(close_rel(
                base.intrinsic_volume(2).unwrap(),
                4.0,
                1e-10,
                0.0
            ));
        }
        // Mismatched base dimension is rejected.
        let bad = BaseDirectionLaw::deterministic_ball(3, 0.3).unwrap();
        assert!(bad.sample_mark(3, 1, &mut rng).is_err());
    }

    #[test]
    fn positive_volume_moment_for_all_builtin_laws() {
        let laws = [
            BaseDirectionLaw::deterministic_ball(2, 0.5).unwrap(),
            BaseDirectionLaw::rotated_fixed(ConvexBody::centered_cube(2, 0.5).unwrap()).unwrap(),
            BaseDirectionLaw::rotated_dilated(
                ConvexBody::centered_ball(3, 1.0).unwrap(),
                RadiusLaw::Discrete(vec![(0.5, 0.9), (2.0, 0.1)]),
            )
            .unwrap(),
        ];
        for law in &laws {
            let m = law.moment(law.base_dim()).unwrap();
            assert!(m > 0.0 && m.is_finite());
        }
    }
}
