//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random symmetric matrix with entries in `[-1, 1]`.
pub fn random_symmetric(n: usize, rng: &mut impl Rng) -> Array2<f64> {
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(-1.0..1.0);
            a[[i, j]] = v;
            a[[j, i]] = v;
        }
    }
    a
}

/// Eigenvalues by cyclic Jacobi rotations, sorted descending.
pub fn jacobi_eigenvalues(a: &Array2<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut a = a.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[[i, j]] * a[[i, j]])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[[i, i]]).collect();
    d.sort_by(|x, y| y.total_cmp(x));
    d
}

/// Roots of the characteristic polynomial of a symmetric 3x3 matrix by the
/// trigonometric cubic formula, sorted descending.
pub fn cubic_eigenvalues(a: &Array2<f64>) -> Vec<f64> {
    assert_eq!(a.dim(), (3, 3));
    // det(lambda I - A) = lambda^3 - c2 lambda^2 + c1 lambda - c0
    let c2 = a[[0, 0]] + a[[1, 1]] + a[[2, 2]];
    let c1 = a[[0, 0]] * a[[1, 1]] + a[[0, 0]] * a[[2, 2]] + a[[1, 1]] * a[[2, 2]]
        - a[[0, 1]] * a[[1, 0]]
        - a[[0, 2]] * a[[2, 0]]
        - a[[1, 2]] * a[[2, 1]];
    let c0 = a[[0, 0]] * (a[[1, 1]] * a[[2, 2]] - a[[1, 2]] * a[[2, 1]])
        - a[[0, 1]] * (a[[1, 0]] * a[[2, 2]] - a[[1, 2]] * a[[2, 0]])
        + a[[0, 2]] * (a[[1, 0]] * a[[2, 1]] - a[[1, 1]] * a[[2, 0]]);
    // Depressed cubic in mu = lambda - c2/3: mu^3 + p mu + q = 0.
    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = -2.0 * c2.powi(3) / 27.0 + c2 * c1 / 3.0 - c0;
    let mut roots = if p.abs() < 1e-300 {
        vec![shift; 3]
    } else {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| shift + r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
            .collect()
    };
    roots.sort_by(|x, y| y.total_cmp(x));
    roots
}

/// Pearson correlation of the columns of `q` by explicit covariance and
/// standard-deviation loops.
pub fn pearson_bruteforce(q: &Array2<f64>) -> Array2<f64> {
    let (rows, cols) = q.dim();
    let mean = |c: usize| (0..rows).map(|r| q[[r, c]]).sum::<f64>() / rows as f64;
    let mut out = Array2::zeros((cols, cols));
    for i in 0..cols {
        for j in 0..cols {
            let (mi, mj) = (mean(i), mean(j));
            let mut cov = 0.0;
            let mut vi = 0.0;
            let mut vj = 0.0;
            for r in 0..rows {
                cov += (q[[r, i]] - mi) * (q[[r, j]] - mj);
                vi += (q[[r, i]] - mi).powi(2);
                vj += (q[[r, j]] - mj).powi(2);
            }
            out[[i, j]] = cov / (vi.sqrt() * vj.sqrt());
        }
    }
    out
}

/// Whether some line `cos(t) x + sin(t) y + b` strictly separates the labelled
/// 2-D points, by exhaustive search over a grid of directions and offsets.
pub fn grid_separable(points: &[[f64; 2]], labels: &[u8]) -> bool {
    let steps = 720;
    for k in 0..steps {
        let t = 2.0 * std::f64::consts::PI * k as f64 / steps as f64;
        let (c, s) = (t.cos(), t.sin());
        let proj: Vec<f64> = points.iter().map(|p| c * p[0] + s * p[1]).collect();
        let max_neg = proj
            .iter()
            .zip(labels)
            .filter(|(_, &l)| l == 0)
            .map(|(v, _)| *v)
            .fold(f64::NEG_INFINITY, f64::max);
        let min_pos = proj
            .iter()
            .zip(labels)
            .filter(|(_, &l)| l == 1)
            .map(|(v, _)| *v)
            .fold(f64::INFINITY, f64::min);
        if max_neg < min_pos {
            return true;
        }
    }
    false
}

/// Central finite-difference gradient of `f` at `x`.
pub fn finite_difference(x: &[f64], h: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Relative error with a floor on the denominator so near-zero gradients are
/// compared absolutely.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
