//! Eigenvalue computation for the discretized operators.
//!
//! The symmetric tridiagonal `h̃` is the production path. The nonsymmetric
//! `H̃` is solved independently by dense QR so that spectral reality is
//! observed rather than inferred from the similarity transform.

mod dense;
mod tridiagonal;

use num_complex::Complex64;
use serde::Serialize;

pub use dense::{eig_band_nonsymmetric, eig_dense_nonsymmetric, max_imaginary, QrOptions, MAX_DENSE_DIM};
pub use tridiagonal::{
    eig_symmetric_tridiagonal, lowest_eigenvalues, EigenPair, SymmetricTridiagonal, TridiagonalEigen,
    CLUSTER_TOL,
};

use crate::closedform::{harmonic_spectrum, SolitonicClosedForm};
use crate::discrete::{self, BandMatrix, ConvergenceRecord, Grid};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::profiles::{Family, Profile};

/// Node count of the coarse grid used when the oracle is forced on a large
/// problem. Its domain is the user's clipped to [`Profile::oracle_domain`].
pub const ORACLE_NODES: usize = 200;

/// Symmetric tridiagonal `D H D⁻¹` for a tridiagonal `H` whose off-diagonal
/// products are positive.
pub fn symmetrize(m: &BandMatrix) -> Result<SymmetricTridiagonal> {
    let (lo, up) = m.bandwidths();
    if lo > 1 || up > 1 {
        return Err(Error::MatrixShape("tridiagonal"));
    }
    let n = m.dim();
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n.saturating_sub(1) {
        let (u, l) = (m.get(i, i + 1), m.get(i + 1, i));
        let prod = u * l;
        if !(prod > 0.0) {
            return Err(Error::MatrixShape("sign-symmetric"));
        }
        off.push(u.signum() * prod.sqrt());
    }
    SymmetricTridiagonal::new((0..n).map(|i| m.get(i, i)).collect(), off)
}

/// Closed-form level `n` when the family has one.
pub fn closed_form_energy(profile: &Profile, params: &ModelParams, n: usize) -> Option<Result<f64>> {
    match profile.family() {
        Family::Harmonic => Some(harmonic_spectrum(params, n)),
        Family::Solitonic { q, kappa } => {
            Some(SolitonicClosedForm::for_params(q, kappa, params).map(|c| c.energy(n)))
        }
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OracleMode {
    /// Run the dense solver when the grid is small enough.
    Auto,
    /// Always run it, on a coarse grid over the same domain if needed.
    Force,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportOptions {
    pub k: usize,
    pub oracle: OracleMode,
    pub qr: QrOptions,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { k: 5, oracle: OracleMode::Auto, qr: QrOptions::default() }
    }
}

impl Serialize for QrOptions {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("QrOptions", 3)?;
        st.serialize_field("max_dim", &self.max_dim)?;
        st.serialize_field("deflation_tol", &self.deflation_tol)?;
        st.serialize_field("iterations_per_dim", &self.iterations_per_dim)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelComparison {
    pub n: usize,
    pub numeric: f64,
    pub closed_form: Option<f64>,
    pub abs_err: Option<f64>,
    pub rel_err: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSummary {
    pub grid: Grid,
    #[serde(skip)]
    pub eigenvalues: Vec<Complex64>,
    pub max_imag: f64,
    pub norm_inf: f64,
    /// Lowest real parts against the exact diagonal symmetrization of `H̃`.
    pub rel_err_symmetrized: Vec<f64>,
    /// Lowest real parts against the assembled `h̃` on the oracle grid.
    pub rel_err_assembled: Vec<f64>,
}

impl OracleSummary {
    pub fn real_parts(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub family: &'static str,
    pub params: ModelParams,
    pub grid: Grid,
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors of `h̃`, unit discrete L² norm (`Σ χ² h = 1`).
    #[serde(skip)]
    pub chi: Vec<Vec<f64>>,
    /// `φ = ρ̃⁻¹χ`, eigenvectors of `H̃` up to discretization error.
    #[serde(skip)]
    pub phi: Vec<Vec<f64>>,
    /// `‖h̃χ − Eχ‖₂/‖χ‖₂`.
    pub chi_residuals: Vec<f64>,
    /// `‖H̃φ − Eφ‖/‖φ‖` over interior rows.
    pub transport_residuals: Vec<f64>,
    /// `‖(ρ̃H̃ρ̃⁻¹ − h̃)χ‖/‖χ‖` over interior rows.
    pub similarity_on_chi: Vec<f64>,
    pub norm_inf: f64,
    pub levels: Vec<LevelComparison>,
    /// `G_ij = Σ χ_i χ_j h`.
    pub orthogonality: Vec<Vec<f64>>,
    pub clusters: Vec<(usize, usize)>,
    pub oracle: Option<OracleSummary>,
    /// Set when some `φ` sample is not finite.
    pub phi_overflow: bool,
    pub residuals: Vec<ConvergenceRecord>,
}

fn interior_ratio(r: &[f64], v: &[f64]) -> f64 {
    let n = v.len();
    let num: f64 = r[1..n - 1].iter().map(|x| x * x).sum();
    let den: f64 = v[1..n - 1].iter().map(|x| x * x).sum();
    (num / den).sqrt()
}

/// Runs the dense solver on `H̃` over `grid` and compares with both Hermitian forms.
pub fn oracle_summary(
    profile: &Profile,
    params: &ModelParams,
    grid: &Grid,
    k: usize,
    qr: &QrOptions,
) -> Result<OracleSummary> {
    let big = discrete::build_non_hermitian(profile, params, grid)?;
    let eigenvalues = eig_band_nonsymmetric(&big.matrix, qr)?;
    let k = k.min(grid.n);
    let real: Vec<f64> = eigenvalues.iter().take(k).map(|z| z.re).collect();
    let rel = |reference: &[f64]| -> Vec<f64> {
        real.iter().zip(reference).map(|(a, b)| ((a - b) / b).abs()).collect()
    };
    let rel_err_symmetrized = match symmetrize(&big.matrix) {
        Ok(t) => rel(&lowest_eigenvalues(&t, k)?),
        Err(_) => Vec::new(),
    };
    let small = discrete::build_h_tilde(profile, params, grid)?;
    let assembled = lowest_eigenvalues(&SymmetricTridiagonal::from_band(&small.matrix)?, k)?;
    Ok(OracleSummary {
        grid: *grid,
        max_imag: max_imaginary(&eigenvalues),
        norm_inf: big.matrix.norm_inf(),
        rel_err_symmetrized,
        rel_err_assembled: rel(&assembled),
        eigenvalues,
    })
}

/// Lowest `k` levels of `h̃` with eigenvectors, closed-form comparison,
/// reconstruction of `φ`, and the optional nonsymmetric oracle.
pub fn make_report(
    profile: &Profile,
    params: &ModelParams,
    grid: &Grid,
    opts: &ReportOptions,
) -> Result<SpectralReport> {
    let small = discrete::build_h_tilde(profile, params, grid)?;
    let big = discrete::build_non_hermitian(profile, params, grid)?;
    let tri = SymmetricTridiagonal::from_band(&small.matrix)?;
    let eig = eig_symmetric_tridiagonal(&tri, opts.k)?;
    let h = grid.h();
    let rho = discrete::sample_rho_tilde(profile, params, grid)?;
    let scale = h.sqrt().recip();

    let mut chi = Vec::with_capacity(opts.k);
    let mut phi = Vec::with_capacity(opts.k);
    let mut chi_residuals = Vec::with_capacity(opts.k);
    let mut transport_residuals = Vec::with_capacity(opts.k);
    let mut similarity_on_chi = Vec::with_capacity(opts.k);
    let mut phi_overflow = false;
    for pair in &eig.pairs {
        let c: Vec<f64> = pair.vector.iter().map(|v| v * scale).collect();
        let p: Vec<f64> = c.iter().zip(&rho).map(|(c, r)| c / r).collect();
        phi_overflow |= p.iter().any(|v| !v.is_finite());
        chi_residuals.push(pair.residual);
        let e = pair.value;
        let hp = big.apply(&p);
        let r: Vec<f64> = hp.iter().zip(&p).map(|(a, b)| a - e * b).collect();
        transport_residuals.push(interior_ratio(&r, &p));
        let transformed: Vec<f64> = hp.iter().zip(&rho).map(|(a, r)| a * r).collect();
        let hc = small.apply(&c);
        let d: Vec<f64> = transformed.iter().zip(&hc).map(|(a, b)| a - b).collect();
        similarity_on_chi.push(interior_ratio(&d, &c));
        chi.push(c);
        phi.push(p);
    }

    let mut levels = Vec::with_capacity(opts.k);
    for (n, &numeric) in eig.values().iter().enumerate() {
        let closed_form = closed_form_energy(profile, params, n).transpose()?;
        let abs_err = closed_form.map(|c| (numeric - c).abs());
        let rel_err = closed_form.zip(abs_err).map(|(c, a)| a / c.abs());
        levels.push(LevelComparison { n, numeric, closed_form, abs_err, rel_err });
    }

    let orthogonality = chi
        .iter()
        .map(|a| chi.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * h).collect())
        .collect();

    let oracle = match opts.oracle {
        OracleMode::Off => None,
        OracleMode::Auto if grid.n > opts.qr.max_dim => None,
        mode => {
            let g = if grid.n > opts.qr.max_dim {
                debug_assert_eq!(mode, OracleMode::Force);
                let (lo, hi) = profile.oracle_domain();
                Grid::new(lo.max(grid.x_min), hi.min(grid.x_max), ORACLE_NODES)?
            } else {
                *grid
            };
            Some(oracle_summary(profile, params, &g, opts.k, &opts.qr)?)
        }
    };

    let vectors = discrete::gaussian_test_vectors(grid);
    let record = |name: &str, residual: f64| ConvergenceRecord {
        name: name.to_string(),
        h,
        residual,
        order_estimate: None,
    };
    let residuals = vec![
        record("similarity", discrete::residual_similarity(profile, params, grid, &vectors)?),
        record(
            "pseudo_hermiticity",
            discrete::residual_pseudo_hermiticity(profile, params, grid, &vectors)?,
        ),
    ];

    Ok(SpectralReport {
        family: profile.family().name(),
        params: *params,
        grid: *grid,
        eigenvalues: eig.values(),
        chi,
        phi,
        chi_residuals,
        transport_residuals,
        similarity_on_chi,
        norm_inf: eig.norm_inf,
        levels,
        orthogonality,
        clusters: eig.clusters,
        oracle,
        phi_overflow,
        residuals,
    })
}
