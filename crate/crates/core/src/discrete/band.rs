use crate::error::{Error, Result};

/// Square band matrix with `lower` sub- and `upper` super-diagonals.
///
/// Row-major band storage: row `i` keeps columns `i - lower ..= i + upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        BandMatrix { n, lower, upper, data: vec![0.0; n * (lower + upper + 1)] }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        BandMatrix { n: values.len(), lower: 0, upper: 0, data: values.to_vec() }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.lower, self.upper)
    }

    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.lower >= i && j <= i + self.upper
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        i * self.width() + (j + self.lower - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.slot(i, j)]
        } else {
            0.0
        }
    }

    /// # Panics
    /// If `(i, j)` lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside band ({}, {})", self.lower, self.upper);
        let s = self.slot(i, j);
        self.data[s] = value;
    }

    /// Columns of row `i` that lie inside the band and the matrix.
    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.lower)..(i + self.upper + 1).min(self.n)
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| self.row_range(i).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = BandMatrix::zeros(self.n, self.upper, self.lower);
        for i in 0..self.n {
            for j in self.row_range(i) {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &BandMatrix) -> Result<BandMatrix> {
        if self.n != other.n {
            return Err(Error::MatrixShape("conformable"));
        }
        let mut out = BandMatrix::zeros(self.n, self.lower + other.lower, self.upper + other.upper);
        for i in 0..self.n {
            for k in self.row_range(i) {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                for j in other.row_range(k) {
                    let s = out.slot(i, j);
                    out.data[s] += aik * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// `self + scale · other`.
    pub fn add_scaled(&self, other: &BandMatrix, scale: f64) -> Result<BandMatrix> {
        if self.n != other.n {
            return Err(Error::MatrixShape("conformable"));
        }
        let mut out = BandMatrix::zeros(
            self.n,
            self.lower.max(other.lower),
            self.upper.max(other.upper),
        );
        for i in 0..self.n {
            for j in self.row_range(i) {
                let s = out.slot(i, j);
                out.data[s] += self.get(i, j);
            }
            for j in other.row_range(i) {
                let s = out.slot(i, j);
                out.data[s] += scale * other.get(i, j);
            }
        }
        Ok(out)
    }

    /// `D(left) · self · D(right)`.
    pub fn scale_rows_cols(&self, left: &[f64], right: &[f64]) -> BandMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            for j in self.row_range(i) {
                let s = out.slot(i, j);
                out.data[s] *= left[i] * right[j];
            }
        }
        out
    }

    /// Exact entry-wise symmetry.
    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| self.row_range(i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row_range(i).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `(center, radius)` of each row's Gershgorin disk.
    pub fn gershgorin_disks(&self) -> Vec<(f64, f64)> {
        (0..self.n)
            .map(|i| {
                let radius = self.row_range(i).filter(|&j| j != i).map(|j| self.get(i, j).abs()).sum();
                (self.get(i, i), radius)
            })
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Nonzero entries as `(row, col, value)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.row_range(i).filter_map(move |j| {
                let v = self.get(i, j);
                (v != 0.0).then_some((i, j, v))
            })
        })
    }
}
