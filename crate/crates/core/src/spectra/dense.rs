use num_complex::Complex64;

use crate::discrete::BandMatrix;
use crate::error::{Error, Result};

pub const MAX_DENSE_DIM: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QrOptions {
    pub max_dim: usize,
    /// Relative size below which a subdiagonal entry is treated as zero.
    pub deflation_tol: f64,
    /// Total QR sweeps allowed per unit dimension.
    pub iterations_per_dim: usize,
}

impl Default for QrOptions {
    fn default() -> Self {
        QrOptions { max_dim: MAX_DENSE_DIM, deflation_tol: 1e-10, iterations_per_dim: 30 }
    }
}

/// Row-major square matrix with 1-based accessors used by the QR sweep.
struct Work {
    n: usize,
    data: Vec<f64>,
}

impl Work {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[(i - 1) * self.n + (j - 1)]
    }

    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[(i - 1) * self.n + (j - 1)]
    }
}

/// Diagonal similarity by powers of two that equalizes row and column norms.
fn balance(a: &mut Work) {
    const RADIX: f64 = 2.0;
    let n = a.n;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 1..=n {
                if j != i {
                    c += a.at(j, i).abs();
                    r += a.at(i, j).abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 1..=n {
                    *a.at_mut(i, j) /= f;
                    *a.at_mut(j, i) *= f;
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form.
fn hessenberg(a: &mut Work) {
    let n = a.n;
    for k in 1..n.saturating_sub(1) {
        let norm: f64 = ((k + 1)..=n).map(|i| a.at(i, k).powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a.at(k + 1, k);
        let alpha = if x0 > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = ((k + 1)..=n).map(|i| a.at(i, k)).collect();
        v[0] -= alpha;
        let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= vn);
        // A ← (I − 2vvᵀ) A on rows k+1..n
        for j in 1..=n {
            let s: f64 = v.iter().enumerate().map(|(t, vt)| vt * a.at(k + 1 + t, j)).sum();
            for (t, vt) in v.iter().enumerate() {
                *a.at_mut(k + 1 + t, j) -= 2.0 * vt * s;
            }
        }
        // A ← A (I − 2vvᵀ) on columns k+1..n
        for i in 1..=n {
            let s: f64 = v.iter().enumerate().map(|(t, vt)| vt * a.at(i, k + 1 + t)).sum();
            for (t, vt) in v.iter().enumerate() {
                *a.at_mut(i, k + 1 + t) -= 2.0 * vt * s;
            }
        }
        *a.at_mut(k + 1, k) = alpha;
        for i in (k + 2)..=n {
            *a.at_mut(i, k) = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix.
fn hqr(a: &mut Work, opts: &QrOptions) -> Result<Vec<Complex64>> {
    let n = a.n;
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a.at(i, j).abs();
        }
    }
    let cap = opts.iterations_per_dim * n;
    let mut total = 0usize;
    let mut nn = n;
    let mut t = 0.0;
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = a.at(l - 1, l - 1).abs() + a.at(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a.at(l, l - 1).abs() <= opts.deflation_tol * s {
                    *a.at_mut(l, l - 1) = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a.at(nn, nn);
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a.at(nn - 1, nn - 1);
            let mut w = a.at(nn, nn - 1) * a.at(nn - 1, nn);
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nn - 1] = x + z;
                    wr[nn] = if z != 0.0 { x - w / z } else { x + z };
                    wi[nn - 1] = 0.0;
                    wi[nn] = 0.0;
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn -= 2;
                break;
            }
            if total >= cap {
                return Err(Error::NoConvergence { what: "shifted QR", iterations: total });
            }
            if its > 0 && its % 10 == 0 {
                // exceptional shift
                t += x;
                for i in 1..=nn {
                    *a.at_mut(i, i) -= x;
                }
                let s = a.at(nn, nn - 1).abs() + a.at(nn - 1, nn - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total += 1;
            let (mut p, mut q, mut r, mut z);
            let mut m = nn - 2;
            loop {
                z = a.at(m, m);
                r = x - z;
                let s0 = y - z;
                p = (r * s0 - w) / a.at(m + 1, m) + a.at(m, m + 1);
                q = a.at(m + 1, m + 1) - z - r - s0;
                r = a.at(m + 2, m + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a.at(m, m - 1).abs() * (q.abs() + r.abs());
                let v = p.abs() * (a.at(m - 1, m - 1).abs() + z.abs() + a.at(m + 1, m + 1).abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                *a.at_mut(i, i - 2) = 0.0;
                if i != m + 2 {
                    *a.at_mut(i, i - 3) = 0.0;
                }
            }
            let mut k = m;
            while k < nn {
                if k != m {
                    p = a.at(k, k - 1);
                    q = a.at(k + 1, k - 1);
                    r = if k != nn - 1 { a.at(k + 2, k - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            *a.at_mut(k, k - 1) = -a.at(k, k - 1);
                        }
                    } else {
                        *a.at_mut(k, k - 1) = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        p = a.at(k, j) + q * a.at(k + 1, j);
                        if k != nn - 1 {
                            p += r * a.at(k + 2, j);
                            *a.at_mut(k + 2, j) -= p * z;
                        }
                        *a.at_mut(k + 1, j) -= p * y;
                        *a.at_mut(k, j) -= p * x;
                    }
                    let mmin = nn.min(k + 3);
                    for i in l..=mmin {
                        p = x * a.at(i, k) + y * a.at(i, k + 1);
                        if k != nn - 1 {
                            p += z * a.at(i, k + 2);
                            *a.at_mut(i, k + 2) -= p * r;
                        }
                        *a.at_mut(i, k + 1) -= p * q;
                        *a.at_mut(i, k) -= p;
                    }
                }
                k += 1;
            }
            if l >= nn - 1 {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
}

/// All eigenvalues of a dense real matrix, sorted by real then imaginary part.
pub fn eig_dense_nonsymmetric(matrix: &[Vec<f64>], opts: &QrOptions) -> Result<Vec<Complex64>> {
    let n = matrix.len();
    if n == 0 || matrix.iter().any(|row| row.len() != n) {
        return Err(Error::MatrixShape("square and nonempty"));
    }
    if n > opts.max_dim {
        return Err(Error::DimensionTooLarge { dim: n, max: opts.max_dim });
    }
    let mut w = Work { n, data: matrix.iter().flatten().copied().collect() };
    if w.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::Range { what: "matrix entry", x: f64::NAN, value: f64::NAN });
    }
    balance(&mut w);
    hessenberg(&mut w);
    let mut values = hqr(&mut w, opts)?;
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(values)
}

pub fn eig_band_nonsymmetric(matrix: &BandMatrix, opts: &QrOptions) -> Result<Vec<Complex64>> {
    if matrix.dim() > opts.max_dim {
        return Err(Error::DimensionTooLarge { dim: matrix.dim(), max: opts.max_dim });
    }
    eig_dense_nonsymmetric(&matrix.to_dense(), opts)
}

pub fn max_imaginary(values: &[Complex64]) -> f64 {
    values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}
