//! Finite-difference discretization on a uniform grid with Dirichlet ends.
//!
//! All operators are band matrices over the interior nodes. Residuals of the
//! operator identities are measured on rows `1..n−1`, whose stencils only
//! touch grid unknowns.

mod band;

use std::io::{self, Write};

use serde::Serialize;

pub use band::BandMatrix;

use crate::closedform::{factorize, FactorizationData};
use crate::error::{Error, Result};
use crate::model::{self, ModelParams};
use crate::profiles::Profile;

pub const MIN_NODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    /// Number of interior nodes.
    pub n: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if !(x_max > x_min) {
            return Err(Error::InvalidGrid(format!("x_max = {x_max} must exceed x_min = {x_min}")));
        }
        if n < MIN_NODES {
            return Err(Error::InvalidGrid(format!("n = {n} is below the minimum {MIN_NODES}")));
        }
        Ok(Grid { x_min, x_max, n })
    }

    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    /// The family's default domain with `n` interior nodes.
    pub fn for_profile(profile: &Profile, n: usize) -> Result<Self> {
        let (lo, hi) = profile.default_domain();
        Self::new(lo, hi, n)
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n + 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (i + 1) as f64 * self.h()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    /// Midpoints `x_min + (j + ½)h`, `j = 0..=n`.
    pub fn half_nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.h();
        (0..=self.n).map(move |j| self.x_min + (j as f64 + 0.5) * h)
    }

    /// Same domain, half the spacing.
    pub fn refined(&self) -> Self {
        Grid { n: 2 * self.n + 1, ..*self }
    }

    /// Twice the width about the same center, same spacing.
    pub fn widened(&self) -> Self {
        let center = 0.5 * (self.x_min + self.x_max);
        let half = self.x_max - self.x_min;
        Grid { x_min: center - half, x_max: center + half, n: 2 * self.n + 1 }
    }

    /// Same domain with `n` interior nodes.
    pub fn with_nodes(&self, n: usize) -> Result<Self> {
        Self::new(self.x_min, self.x_max, n)
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes().map(f).collect()
    }

    pub fn try_sample(&self, f: impl Fn(f64) -> Result<f64>) -> Result<Vec<f64>> {
        self.nodes().map(f).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MultiplierKind {
    RhoTilde,
    ZetaPlus,
    EffectivePotential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OperatorKind {
    /// `h̃ = −ω̃ d/dx a² d/dx + V_eff`.
    HermitianEquivalent,
    /// `H̃ = −ω̃ d/dx a² d/dx + (ω̃aa′ + c₁) d/dx + c₂`.
    NonHermitian,
    Eta,
    EtaDagger,
    Intertwiner,
    Multiplier(MultiplierKind),
}

#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub kind: OperatorKind,
    pub grid: Grid,
    pub matrix: BandMatrix,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.matrix.matvec(v)
    }

    /// Writes `row col value` lines.
    pub fn write_triplets<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (i, j, v) in self.matrix.triplets() {
            writeln!(out, "{i} {j} {v:.16e}")?;
        }
        Ok(())
    }
}

fn check_grid(profile: &Profile, grid: &Grid) -> Result<()> {
    profile.check_points(grid.nodes())?;
    profile.check_points(grid.half_nodes())
}

fn stiffness(profile: &Profile, params: &ModelParams, grid: &Grid) -> (BandMatrix, Vec<f64>) {
    let n = grid.n;
    let h2 = grid.h() * grid.h();
    let wt = params.omega_tilde();
    let half: Vec<f64> = grid.half_nodes().map(|x| wt * profile.a(x).powi(2) / h2).collect();
    let mut m = BandMatrix::zeros(n, 1, 1);
    for i in 0..n {
        m.set(i, i, half[i] + half[i + 1]);
        if i + 1 < n {
            let off = -half[i + 1];
            m.set(i, i + 1, off);
            m.set(i + 1, i, off);
        }
    }
    (m, half)
}

/// Symmetric tridiagonal `h̃`: row `i` is
/// `−(ω̃/h²)[A₊(u_{i+1} − u_i) − A₋(u_i − u_{i−1})] + V_eff(x_i) u_i`, `A± = a(x_i ± h/2)²`.
pub fn build_h_tilde(profile: &Profile, params: &ModelParams, grid: &Grid) -> Result<OperatorMatrix> {
    check_grid(profile, grid)?;
    let (mut m, _) = stiffness(profile, params, grid);
    for (i, x) in grid.nodes().enumerate() {
        let d = m.get(i, i);
        m.set(i, i, d + model::v_eff(profile, params, x));
    }
    Ok(OperatorMatrix { kind: OperatorKind::HermitianEquivalent, grid: *grid, matrix: m })
}

/// Nonsymmetric tridiagonal `H̃`: the stiffness part of `h̃`, a central
/// difference for the `(ω̃aa′ + c₁) d/dx` term and `c₂` on the diagonal.
pub fn build_non_hermitian(
    profile: &Profile,
    params: &ModelParams,
    grid: &Grid,
) -> Result<OperatorMatrix> {
    check_grid(profile, grid)?;
    let (mut m, _) = stiffness(profile, params, grid);
    let two_h = 2.0 * grid.h();
    let n = grid.n;
    for (i, x) in grid.nodes().enumerate() {
        let d = m.get(i, i);
        m.set(i, i, d + model::c2(profile, params, x));
        let drift = model::drift(profile, params, x) / two_h;
        if i + 1 < n {
            let e = m.get(i, i + 1);
            m.set(i, i + 1, e + drift);
        }
        if i > 0 {
            let e = m.get(i, i - 1);
            m.set(i, i - 1, e - drift);
        }
    }
    Ok(OperatorMatrix { kind: OperatorKind::NonHermitian, grid: *grid, matrix: m })
}

fn first_order(grid: &Grid, a: &[f64], b: &[f64], kind: OperatorKind) -> OperatorMatrix {
    let n = grid.n;
    let two_h = 2.0 * grid.h();
    let mut m = BandMatrix::zeros(n, 1, 1);
    for i in 0..n {
        m.set(i, i, b[i]);
        if i + 1 < n {
            m.set(i, i + 1, a[i] / two_h);
        }
        if i > 0 {
            m.set(i, i - 1, -a[i] / two_h);
        }
    }
    OperatorMatrix { kind, grid: *grid, matrix: m }
}

/// `η = a D + b` with the central difference `D`.
pub fn build_eta(profile: &Profile, grid: &Grid) -> Result<OperatorMatrix> {
    profile.check_points(grid.nodes())?;
    let a = grid.sample(|x| profile.a(x));
    let b = grid.sample(|x| profile.b(x));
    Ok(first_order(grid, &a, &b, OperatorKind::Eta))
}

/// `η† = −D∘a + b`: row `i` maps `u` to `−(a_{i+1}u_{i+1} − a_{i−1}u_{i−1})/(2h) + b_i u_i`.
pub fn build_eta_dagger(profile: &Profile, grid: &Grid) -> Result<OperatorMatrix> {
    profile.check_points(grid.nodes())?;
    let a = grid.sample(|x| profile.a(x));
    let b = grid.sample(|x| profile.b(x));
    let n = grid.n;
    let two_h = 2.0 * grid.h();
    let mut m = BandMatrix::zeros(n, 1, 1);
    for i in 0..n {
        m.set(i, i, b[i]);
        if i + 1 < n {
            m.set(i, i + 1, -a[i + 1] / two_h);
        }
        if i > 0 {
            m.set(i, i - 1, a[i - 1] / two_h);
        }
    }
    Ok(OperatorMatrix { kind: OperatorKind::EtaDagger, grid: *grid, matrix: m })
}

/// `η₁ = √ω̃ (a D + b₁)`.
pub fn build_intertwiner(data: &FactorizationData, grid: &Grid) -> Result<OperatorMatrix> {
    let profile = data.profile();
    profile.check_points(grid.nodes())?;
    let root = data.scale.sqrt();
    let a = grid.sample(|x| root * profile.a(x));
    let b1 = grid.sample(|x| root * data.b1(x).value);
    Ok(first_order(grid, &a, &b1, OperatorKind::Intertwiner))
}

pub fn build_multiplier(kind: MultiplierKind, grid: &Grid, values: &[f64]) -> Result<OperatorMatrix> {
    if values.len() != grid.n {
        return Err(Error::MatrixShape("sized to the grid"));
    }
    if matches!(kind, MultiplierKind::RhoTilde | MultiplierKind::ZetaPlus)
        && values.iter().any(|&v| !(v > 0.0))
    {
        return Err(Error::invalid("metric", "multiplier must be positive"));
    }
    Ok(OperatorMatrix {
        kind: OperatorKind::Multiplier(kind),
        grid: *grid,
        matrix: BandMatrix::diagonal(values),
    })
}

/// Gaussians `exp(−(x−c)²/2s²)` with `c ∈ {−1, 0, 1}`, `s ∈ {0.5, 1}`.
pub fn gaussian_test_vectors(grid: &Grid) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(6);
    for c in [-1.0, 0.0, 1.0] {
        for s in [0.5, 1.0] {
            out.push(grid.sample(|x: f64| (-(x - c) * (x - c) / (2.0 * s * s)).exp()));
        }
    }
    out
}

fn margin_norm(v: &[f64], margin: usize) -> f64 {
    let n = v.len();
    v[margin..n - margin].iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn interior_norm(v: &[f64]) -> f64 {
    margin_norm(v, 1)
}

/// `max_v ‖r(v)‖/‖v‖` over rows `margin..n−margin`.
///
/// `margin` is the stencil half-width: rows closer to the boundary reach the
/// implicit zero beyond the last node.
pub fn interior_residual<F>(vectors: &[Vec<f64>], margin: usize, mut residual: F) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let mut worst: f64 = 0.0;
    for v in vectors {
        if v.len() <= 2 * margin {
            return Err(Error::MatrixShape("larger than the residual margin"));
        }
        let r = residual(v)?;
        let denom = margin_norm(v, margin);
        if denom > 0.0 {
            worst = worst.max(margin_norm(&r, margin) / denom);
        }
    }
    Ok(worst)
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn hadamard(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// Sampled `ρ̃` (closed form).
pub fn sample_rho_tilde(profile: &Profile, params: &ModelParams, grid: &Grid) -> Result<Vec<f64>> {
    grid.try_sample(|x| model::rho_tilde(profile, params, x))
}

/// `max ‖(D(ρ̃) H̃ D(ρ̃)⁻¹ − h̃) v‖ / ‖v‖`.
pub fn residual_similarity(
    profile: &Profile,
    params: &ModelParams,
    grid: &Grid,
    vectors: &[Vec<f64>],
) -> Result<f64> {
    let big = build_non_hermitian(profile, params, grid)?;
    let small = build_h_tilde(profile, params, grid)?;
    let rho = sample_rho_tilde(profile, params, grid)?;
    let inv: Vec<f64> = rho.iter().map(|r| 1.0 / r).collect();
    interior_residual(vectors, 1, |v| {
        let transformed = hadamard(&rho, &big.apply(&hadamard(&inv, v)));
        Ok(sub(&transformed, &small.apply(v)))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MetricChoice {
    ZetaPlus,
    /// `ζ₊⁻¹`, a control that must not pass.
    Inverted,
}

/// `max ‖(D(ζ) H̃ D(ζ)⁻¹ − H̃ᵀ) v‖ / ‖v‖` for the chosen metric.
pub fn residual_metric(
    profile: &Profile,
    params: &ModelParams,
    grid: &Grid,
    vectors: &[Vec<f64>],
    choice: MetricChoice,
) -> Result<f64> {
    let big = build_non_hermitian(profile, params, grid)?;
    let adjoint = big.matrix.transpose();
    let mut zeta = grid.try_sample(|x| model::zeta_plus(profile, params, x))?;
    if choice == MetricChoice::Inverted {
        zeta.iter_mut().for_each(|z| *z = 1.0 / *z);
    }
    let inv: Vec<f64> = zeta.iter().map(|z| 1.0 / z).collect();
    interior_residual(vectors, 1, |v| {
        let conj = hadamard(&zeta, &big.apply(&hadamard(&inv, v)));
        Ok(sub(&conj, &adjoint.matvec(v)))
    })
}

/// Pseudo-Hermiticity `H̃ᵀ = ζ₊ H̃ ζ₊⁻¹`.
pub fn residual_pseudo_hermiticity(
    profile: &Profile,
    params: &ModelParams,
    grid: &Grid,
    vectors: &[Vec<f64>],
) -> Result<f64> {
    residual_metric(profile, params, grid, vectors, MetricChoice::ZetaPlus)
}

/// `max ‖(η₁ᵀη₁ + ξ − h̃) v‖ / ‖v‖`, skipping the two rows at each end
/// where the five-point product stencil is truncated.
pub fn residual_factorization(
    profile: &Profile,
    params: &ModelParams,
    grid: &Grid,
    vectors: &[Vec<f64>],
) -> Result<f64> {
    let data = factorize(profile, params)?;
    let eta1 = build_intertwiner(&data, grid)?;
    let small = build_h_tilde(profile, params, grid)?;
    let adjoint = eta1.matrix.transpose();
    interior_residual(vectors, 2, |v| {
        let mut lhs = adjoint.matvec(&eta1.apply(v));
        lhs.iter_mut().zip(v).for_each(|(l, x)| *l += data.xi * x);
        Ok(sub(&lhs, &small.apply(v)))
    })
}

/// `max ‖([η, η†] − diag(2ab′ − aa″)) v‖ / ‖v‖` with the same margin as
/// [`residual_factorization`].
pub fn residual_commutator(profile: &Profile, grid: &Grid, vectors: &[Vec<f64>]) -> Result<f64> {
    let eta = build_eta(profile, grid)?;
    let dagger = build_eta_dagger(profile, grid)?;
    let field = grid.sample(|x| profile.commutator_field(x));
    interior_residual(vectors, 2, |v| {
        let ab = eta.apply(&dagger.apply(v));
        let ba = dagger.apply(&eta.apply(v));
        Ok(ab.iter().zip(&ba).zip(field.iter().zip(v)).map(|((p, q), (f, x))| p - q - f * x).collect())
    })
}

/// `‖op·u − E u‖/‖u‖` over interior rows.
pub fn eigen_residual(op: &OperatorMatrix, energy: f64, u: &[f64]) -> f64 {
    let r: Vec<f64> = op.apply(u).iter().zip(u).map(|(hu, x)| hu - energy * x).collect();
    interior_norm(&r) / interior_norm(u)
}

/// One line of a residual report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRecord {
    pub name: String,
    pub h: f64,
    pub residual: f64,
    pub order_estimate: Option<f64>,
}

/// `log₂(r_h / r_(h/2))`.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// Evaluates `residual` on `grid` and its refinement.
pub fn convergence_study<F>(name: &str, grid: &Grid, mut residual: F) -> Result<[ConvergenceRecord; 2]>
where
    F: FnMut(&Grid) -> Result<f64>,
{
    let fine_grid = grid.refined();
    let coarse = residual(grid)?;
    let fine = residual(&fine_grid)?;
    let order = observed_order(coarse, fine);
    Ok([
        ConvergenceRecord { name: name.to_string(), h: grid.h(), residual: coarse, order_estimate: None },
        ConvergenceRecord {
            name: name.to_string(),
            h: fine_grid.h(),
            residual: fine,
            order_estimate: Some(order),
        },
    ])
}
