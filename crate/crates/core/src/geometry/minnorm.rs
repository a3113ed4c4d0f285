//! Wolfe's minimum-norm-point algorithm on a convex hull of finitely many
//! points. This backs every distance query against a V-polytope: the distance
//! from `p` to conv{v_i} is the norm of the minimum-norm point of
//! conv{v_i − p}.
//!
//! The algorithm terminates after finitely many corral changes; the caps
//! below only guard against floating-point stalls on degenerate inputs.

use super::GeometryError;

const OPT_TOL: f64 = 1e-11;
const COORD_TOL: f64 = 1e-13;

/// Euclidean distance from `point` to the convex hull of `vertices`.
pub fn distance_to_hull(point: &[f64], vertices: &[Vec<f64>]) -> Result<f64, GeometryError> {
    let n = point.len();
    if vertices.is_empty() {
        return Err(GeometryError::EmptyBody);
    }
    let m = vertices.len();
    // Work on translated points q_i = v_i − p.
    let q: Vec<Vec<f64>> = vertices
        .iter()
        .map(|v| {
            debug_assert_eq!(v.len(), n);
            v.iter().zip(point).map(|(a, b)| a - b).collect()
        })
        .collect();
    let norm2 = |v: &[f64]| -> f64 { v.iter().map(|x| x * x).sum() };
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };

    let start = (0..m)
        .min_by(|&a, &b| norm2(&q[a]).total_cmp(&norm2(&q[b])))
        .unwrap();
    let mut corral: Vec<usize> = vec![start];
    let mut lambda: Vec<f64> = vec![1.0];
    let mut x = q[start].clone();

    let scale = q.iter().map(|v| norm2(v)).fold(1.0_f64, f64::max);

    for _major in 0..(16 * m + 64) {
        let x2 = norm2(&x);
        if x2 <= OPT_TOL * scale {
            return Ok(0.0); // the origin is (numerically) in the hull
        }
        // Most violating vertex of the optimality condition <x, q_j> >= |x|².
        let j = (0..m)
            .min_by(|&a, &b| dot(&x, &q[a]).total_cmp(&dot(&x, &q[b])))
            .unwrap();
        if dot(&x, &q[j]) >= x2 - OPT_TOL * scale.max(x2) {
            return Ok(x2.sqrt());
        }
        if corral.contains(&j) {
            return Ok(x2.sqrt()); // numerical stall; x is optimal to tolerance
        }
        corral.push(j);
        lambda.push(0.0);

        // Minor cycle: restore a corral whose affine minimiser has
        // non-negative coordinates.
        for _minor in 0..(4 * m + 16) {
            let k = corral.len();
            // Affine min-norm over the corral: bordered Gram system.
            let dim = k + 1;
            let mut sys = vec![0.0; dim * dim];
            for a in 0..k {
                for b in 0..k {
                    sys[a * dim + b] = dot(&q[corral[a]], &q[corral[b]]);
                }
                sys[a * dim + k] = 1.0;
                sys[k * dim + a] = 1.0;
            }
            let mut rhs = vec![0.0; dim];
            rhs[k] = 1.0;
            let mu = match super::linalg::solve(&sys, dim, &rhs) {
                Some(sol) => sol[..k].to_vec(),
                None => {
                    // Affinely dependent corral: drop the weakest member.
                    if k <= 1 {
                        return Ok(norm2(&x).sqrt());
                    }
                    let drop = (0..k - 1)
                        .min_by(|&a, &b| lambda[a].total_cmp(&lambda[b]))
                        .unwrap();
                    corral.remove(drop);
                    lambda.remove(drop);
                    continue;
                }
            };
            if mu.iter().all(|&v| v > COORD_TOL) {
                lambda = mu;
                break;
            }
            // Step from lambda toward mu until the first coordinate dies.
            let mut t = 1.0_f64;
            for i in 0..k {
                if mu[i] <= COORD_TOL && lambda[i] > mu[i] {
                    t = t.min(lambda[i] / (lambda[i] - mu[i]));
                }
            }
            for i in 0..k {
                lambda[i] = (1.0 - t) * lambda[i] + t * mu[i];
            }
            let mut keep_c = Vec::with_capacity(k);
            let mut keep_l = Vec::with_capacity(k);
            for i in 0..k {
                if lambda[i] > COORD_TOL {
                    keep_c.push(corral[i]);
                    keep_l.push(lambda[i]);
                }
            }
            if keep_c.is_empty() {
                keep_c.push(corral[k - 1]);
                keep_l.push(1.0);
            }
            let total: f64 = keep_l.iter().sum();
            for l in keep_l.iter_mut() {
                *l /= total;
            }
            corral = keep_c;
            lambda = keep_l;
        }
        x = vec![0.0; n];
        for (i, &ci) in corral.iter().enumerate() {
            for (xo, qo) in x.iter_mut().zip(&q[ci]) {
                *xo += lambda[i] * qo;
            }
        }
    }
    Err(GeometryError::InfeasibleTest)
}
