use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discrete::BandMatrix;
use crate::error::{Error, Result};

const BISECTION_RTOL: f64 = 1e-12;
const MAX_BISECTIONS: usize = 400;
const MAX_INVERSE_ITERATIONS: usize = 5;
const RESIDUAL_TOL: f64 = 1e-8;
/// Eigenvalues closer than this (relative) are reported as a cluster.
pub const CLUSTER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymmetricTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::MatrixShape("a tridiagonal with n − 1 off-diagonals"));
        }
        Ok(SymmetricTridiagonal { diag, off })
    }

    pub fn from_band(m: &BandMatrix) -> Result<Self> {
        let (lo, up) = m.bandwidths();
        if lo > 1 || up > 1 || !m.is_symmetric() {
            return Err(Error::MatrixShape("symmetric tridiagonal"));
        }
        let n = m.dim();
        Self::new((0..n).map(|i| m.get(i, i)).collect(), (1..n).map(|i| m.get(i, i - 1)).collect())
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    pub fn norm_inf(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.off[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.off[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// Interval containing the whole spectrum.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `shift`.
    pub fn sturm_count(&self, shift: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - shift;
        for i in 0..self.dim() {
            if i > 0 {
                q = self.diag[i] - shift - self.off[i - 1] * self.off[i - 1] / q;
            }
            if q == 0.0 {
                let scale = self.diag[i].abs() + shift.abs();
                q = -(f64::EPSILON * scale).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }
}

/// The `j`-th smallest eigenvalue by bisection on the Sturm count.
///
/// The stopping rule is relative only: graded matrices from steep mass
/// profiles have `‖T‖` many orders above their lowest eigenvalues.
fn bisect(t: &SymmetricTridiagonal, j: usize, mut lo: f64, mut hi: f64) -> Result<f64> {
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= BISECTION_RTOL * lo.abs().max(hi.abs()) || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if t.sturm_count(mid) > j {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::NoConvergence { what: "Sturm bisection", iterations: MAX_BISECTIONS })
}

/// Lowest `k` eigenvalues, ascending.
pub fn lowest_eigenvalues(t: &SymmetricTridiagonal, k: usize) -> Result<Vec<f64>> {
    let n = t.dim();
    if k == 0 || k > n {
        return Err(Error::LevelOutOfRange { k, dim: n });
    }
    let (lo, hi) = t.gershgorin_bounds();
    let pad = f64::EPSILON * t.norm_inf() + f64::MIN_POSITIVE;
    let (lo, hi) = (lo - pad, hi + pad);
    (0..k).map(|j| bisect(t, j, lo, hi)).collect()
}

/// LU factors of `T − λI` with partial pivoting; `U` has two superdiagonals.
struct ShiftedLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(t: &SymmetricTridiagonal, lambda: f64) -> Self {
        let n = t.dim();
        let floor = f64::EPSILON * t.norm_inf().max(f64::MIN_POSITIVE);
        let mut lu = ShiftedLu {
            u0: vec![0.0; n],
            u1: vec![0.0; n],
            u2: vec![0.0; n],
            mult: vec![0.0; n.saturating_sub(1)],
            swapped: vec![false; n.saturating_sub(1)],
        };
        // active row: entries at columns i and i + 1
        let mut r0 = t.diag[0] - lambda;
        let mut r1 = if n > 1 { t.off[0] } else { 0.0 };
        for i in 0..n - 1 {
            let sub = t.off[i];
            let next_d = t.diag[i + 1] - lambda;
            let next_u = if i + 2 < n { t.off[i + 1] } else { 0.0 };
            if sub.abs() > r0.abs() {
                lu.swapped[i] = true;
                lu.u0[i] = sub;
                lu.u1[i] = next_d;
                lu.u2[i] = next_u;
                let m = r0 / sub;
                lu.mult[i] = m;
                r0 = r1 - m * next_d;
                r1 = -m * next_u;
            } else {
                if r0 == 0.0 {
                    r0 = floor;
                }
                lu.u0[i] = r0;
                lu.u1[i] = r1;
                let m = sub / r0;
                lu.mult[i] = m;
                r0 = next_d - m * r1;
                r1 = next_u;
            }
        }
        lu.u0[n - 1] = if r0 == 0.0 { floor } else { r0 };
        lu
    }

    fn solve(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                rhs.swap(i, i + 1);
            }
            rhs[i + 1] -= self.mult[i] * rhs[i];
        }
        for i in (0..n).rev() {
            let mut s = rhs[i];
            if i + 1 < n {
                s -= self.u1[i] * rhs[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * rhs[i + 2];
            }
            rhs[i] = s / self.u0[i];
        }
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// Unit Euclidean norm; largest-magnitude entry positive.
    pub vector: Vec<f64>,
    /// `‖Tv − λv‖₂`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalEigen {
    pub pairs: Vec<EigenPair>,
    /// Index ranges `(first, last)` of eigenvalues within [`CLUSTER_TOL`].
    pub clusters: Vec<(usize, usize)>,
    pub norm_inf: f64,
}

impl TridiagonalEigen {
    pub fn values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.value).collect()
    }
}

fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() * (1.0 + 1e-12) {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn find_clusters(values: &[f64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        let joined = i < values.len()
            && (values[i] - values[i - 1]).abs() <= CLUSTER_TOL * values[i].abs().max(1.0);
        if !joined {
            if i - start > 1 {
                out.push((start, i - 1));
            }
            start = i;
        }
    }
    out
}

/// Lowest `k` eigenpairs: Sturm bisection, then inverse iteration with
/// Gram–Schmidt against earlier vectors of nearby eigenvalues.
pub fn eig_symmetric_tridiagonal(t: &SymmetricTridiagonal, k: usize) -> Result<TridiagonalEigen> {
    let values = lowest_eigenvalues(t, k)?;
    let n = t.dim();
    let norm = t.norm_inf();
    let gap_window = 1e-3 * norm;
    let mut pairs: Vec<EigenPair> = Vec::with_capacity(k);
    for (j, &lambda) in values.iter().enumerate() {
        let lu = ShiftedLu::factor(t, lambda);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5157_0a11 ^ j as u64);
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = norm2(&v);
        v.iter_mut().for_each(|x| *x /= s);
        let mut accepted = None;
        for _ in 0..MAX_INVERSE_ITERATIONS {
            lu.solve(&mut v);
            for p in pairs.iter().filter(|p| (p.value - lambda).abs() <= gap_window) {
                let c = dot(&v, &p.vector);
                v.iter_mut().zip(&p.vector).for_each(|(x, y)| *x -= c * y);
            }
            let s = norm2(&v);
            if !(s > 0.0 && s.is_finite()) {
                break;
            }
            v.iter_mut().for_each(|x| *x /= s);
            let tv = t.matvec(&v);
            let r = norm2(&tv.iter().zip(&v).map(|(a, b)| a - lambda * b).collect::<Vec<_>>());
            if r <= RESIDUAL_TOL * norm {
                accepted = Some(r);
                break;
            }
        }
        let residual = accepted.ok_or(Error::NoConvergence {
            what: "inverse iteration",
            iterations: MAX_INVERSE_ITERATIONS,
        })?;
        fix_sign(&mut v);
        pairs.push(EigenPair { value: lambda, vector: v, residual });
    }
    Ok(TridiagonalEigen { clusters: find_clusters(&values), pairs, norm_inf: norm })
}
