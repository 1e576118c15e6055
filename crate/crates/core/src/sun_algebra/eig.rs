use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Relative eigenvalue gap below which the matrix is treated as defective.
pub const DEGENERACY_GAP: f64 = 1e-10;
const MAX_DIM: usize = 4;

/// Eigendecomposition `M = Q diag(values) Q^{-1}` with `det Q = 1`.
///
/// Eigenvalues are ordered by descending modulus, ties broken by ascending
/// argument in `(−π, π]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<C64>,
    pub basis: ComplexMatrix,
    pub diagonalizable: bool,
}

impl Spectrum {
    /// `Q diag(μ) Q^{-1}`.
    pub fn reconstruct(&self) -> Option<ComplexMatrix> {
        let inv = self.basis.inverse()?;
        let d = ComplexMatrix::from_diag(&self.values);
        Some(&(&self.basis * &d) * &inv)
    }

    pub fn min_gap(&self) -> f64 {
        min_gap(&self.values)
    }
}

pub fn eig(m: &ComplexMatrix) -> Result<Spectrum> {
    let n = m.dim();
    if n > MAX_DIM {
        return Err(Error::UnsupportedDimension(n));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let (values, vectors) = match n {
        1 => (vec![m[(0, 0)]], vec![vec![ONE]]),
        2 => eig2(m),
        _ => eig_schur(m),
    };

    // ordering by (descending |μ|, ascending arg), moduli compared on a
    // 1e-9 relative lattice so that near-unitary spectra sort by phase
    let scale = values
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| {
        let kp = (values[p].norm() / scale * 1e9).round() as i64;
        let kq = (values[q].norm() / scale * 1e9).round() as i64;
        kq.cmp(&kp).then(values[p].arg().total_cmp(&values[q].arg()))
    });

    let values: Vec<C64> = order.iter().map(|&i| values[i]).collect();
    let mut basis = ComplexMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        let v = &vectors[src];
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // unit length, with the largest entry real and positive
        let pivot = v
            .iter()
            .copied()
            .fold(ZERO, |acc, z| if z.norm() > acc.norm() { z } else { acc });
        let phase = if norm > 0.0 {
            pivot.conj() / (pivot.norm() * norm)
        } else {
            ONE
        };
        for row in 0..n {
            basis[(row, col)] = v[row] * phase;
        }
    }

    let det = basis.det();
    let mut diagonalizable = min_gap(&values) >= DEGENERACY_GAP * m.frobenius().max(f64::MIN_POSITIVE);
    if det.norm() > 1e-300 && det.is_finite() {
        let c = det.powf(-1.0 / n as f64);
        // principal root of 1/det; absorb it into every column
        basis = basis.scale(c);
        let residual = basis.det();
        if (residual - ONE).norm() > 1e-12 {
            // one Newton-style correction on the first column
            let fix = residual.inv();
            for row in 0..n {
                basis[(row, 0)] *= fix;
            }
        }
    } else {
        diagonalizable = false;
    }

    Ok(Spectrum {
        values,
        basis,
        diagonalizable,
    })
}

fn min_gap(values: &[C64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            gap = gap.min((values[i] - values[j]).norm());
        }
    }
    gap
}

fn eig2(m: &ComplexMatrix) -> (Vec<C64>, Vec<Vec<C64>>) {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let half_trace = (a + d) * 0.5;
    let half_diff = (a - d) * 0.5;
    let root = (half_diff * half_diff + b * c).sqrt();
    let (mut mu1, mut mu2) = (half_trace + root, half_trace - root);
    if mu1.norm() < mu2.norm() {
        std::mem::swap(&mut mu1, &mut mu2);
    }
    let det = a * d - b * c;
    if mu1.norm() > 0.0 {
        mu2 = det / mu1;
    }
    let vector = |mu: C64, fallback: usize| -> Vec<C64> {
        let va = [b, mu - a];
        let vb = [mu - d, c];
        let na = va[0].norm_sqr() + va[1].norm_sqr();
        let nb = vb[0].norm_sqr() + vb[1].norm_sqr();
        let tiny = 1e-300;
        if na.max(nb) <= tiny {
            let mut e = vec![ZERO; 2];
            e[fallback] = ONE;
            e
        } else if na >= nb {
            va.to_vec()
        } else {
            vb.to_vec()
        }
    };
    let v1 = vector(mu1, 0);
    let v2 = vector(mu2, 1);
    (vec![mu1, mu2], vec![v1, v2])
}

/// Complex Schur form `A = Z T Z†` by Householder reduction to Hessenberg
/// form followed by Wilkinson-shifted QR sweeps.
fn schur(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = m.dim();
    let mut a = m.clone();
    let mut z = ComplexMatrix::identity(n);

    for k in 0..n.saturating_sub(2) {
        let xnorm = ((k + 1)..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let alpha = -phase * xnorm;
        let mut v: Vec<C64> = ((k + 1)..n).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for e in v.iter_mut() {
            *e /= vnorm;
        }
        // A <- H A, H = I - 2 v v†
        for j in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(r, vr)| vr.conj() * a[(k + 1 + r, j)]).sum();
            for (r, vr) in v.iter().enumerate() {
                a[(k + 1 + r, j)] -= vr * dot * 2.0;
            }
        }
        // A <- A H, Z <- Z H
        for target in [&mut a, &mut z] {
            for i in 0..n {
                let dot: C64 = v.iter().enumerate().map(|(r, vr)| target[(i, k + 1 + r)] * vr).sum();
                for (r, vr) in v.iter().enumerate() {
                    target[(i, k + 1 + r)] -= dot * vr.conj() * 2.0;
                }
            }
        }
        for i in (k + 2)..n {
            a[(i, k)] = ZERO;
        }
    }

    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 && total < 200 * n {
        let mut l = hi;
        while l > 0 {
            let s = a[(l, l)].norm() + a[(l - 1, l - 1)].norm();
            let s = if s == 0.0 { a.norm_one() } else { s };
            if a[(l, l - 1)].norm() <= eps * s {
                a[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;

        let shift = if iter.is_multiple_of(10) {
            a[(hi, hi)] + C64::new(0.75 * a[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson(a[(hi - 1, hi - 1)], a[(hi - 1, hi)], a[(hi, hi - 1)], a[(hi, hi)])
        };

        for i in l..=hi {
            a[(i, i)] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(a[(k, k)], a[(k + 1, k)]);
            for j in k..n {
                let (x, y) = (a[(k, j)], a[(k + 1, j)]);
                a[(k, j)] = x * c + s * y;
                a[(k + 1, j)] = -s.conj() * x + y * c;
            }
            a[(k + 1, k)] = ZERO;
            rotations.push((k, c, s));
        }
        for &(k, c, s) in &rotations {
            let rows = (k + 2).min(hi) + 1;
            for i in 0..rows {
                let (p, q) = (a[(i, k)], a[(i, k + 1)]);
                a[(i, k)] = p * c + q * s.conj();
                a[(i, k + 1)] = -p * s + q * c;
            }
            for i in 0..n {
                let (p, q) = (z[(i, k)], z[(i, k + 1)]);
                z[(i, k)] = p * c + q * s.conj();
                z[(i, k + 1)] = -p * s + q * c;
            }
        }
        for i in l..=hi {
            a[(i, i)] += shift;
        }
    }
    (a, z)
}

fn wilkinson(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_diff = (a - d) * 0.5;
    let root = (half_diff * half_diff + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let (e1, e2) = (mid + root, mid - root);
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// Rotation `[[c, s], [−s̄, c]]` with real `c` mapping `(x, y)` to `(r, 0)`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let r = x.norm().hypot(y.norm());
    if r == 0.0 {
        return (1.0, ZERO);
    }
    if x.norm() == 0.0 {
        return (0.0, ONE * (y.conj() / y.norm()));
    }
    let phase = x / x.norm();
    (x.norm() / r, phase * y.conj() / r)
}

fn eig_schur(m: &ComplexMatrix) -> (Vec<C64>, Vec<Vec<C64>>) {
    let n = m.dim();
    let (t, z) = schur(m);
    let values = t.diagonal();
    let small = f64::EPSILON * t.norm_one().max(f64::MIN_POSITIVE);
    let mut vectors = Vec::with_capacity(n);
    for j in 0..n {
        let mut y = vec![ZERO; n];
        y[j] = ONE;
        for i in (0..j).rev() {
            let mut sum = ZERO;
            for l in (i + 1)..=j {
                sum += t[(i, l)] * y[l];
            }
            let mut denom = t[(i, i)] - t[(j, j)];
            if denom.norm() < small {
                denom = C64::new(small, 0.0);
            }
            y[i] = -sum / denom;
        }
        let v: Vec<C64> = (0..n).map(|r| (0..=j).map(|c| z[(r, c)] * y[c]).sum()).collect();
        vectors.push(v);
    }
    (values, vectors)
}
