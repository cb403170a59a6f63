//! Identity suite behind the `verify` job.

use serde::Serialize;

use crate::closedform::{factorize, morse_rho, morse_veff, SolitonicClosedForm};
use crate::discrete::{self, ConvergenceRecord, Grid, MetricChoice};
use crate::model::{self, ModelParams};
use crate::profiles::{Family, Profile};
use crate::spectra::{self, QrOptions, SymmetricTridiagonal};
use crate::Result;

/// Accepted band for observed convergence orders.
pub const ORDER_BAND: (f64, f64) = (1.9, 2.1);
/// A coarse residual at or below this is treated as an exact identity.
pub const EXACT_TOL: f64 = 1e-12;
/// The deliberately wrong metric must not reach this order.
pub const CONTROL_MAX_ORDER: f64 = 0.5;
/// Accepted band for the ratio of closed-form level errors at `h` and `h/2`.
pub const RICHARDSON_BAND: (f64, f64) = (3.5, 4.5);
/// Eigenfunction levels checked against the analytic form.
pub const EIGENFUNCTION_LEVELS: usize = 4;
/// Pointwise identities are sampled at most at this many nodes.
pub const POINTWISE_SAMPLES: usize = 101;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub criterion: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, value: f64, criterion: impl Into<String>) -> Self {
        Check { name: name.into(), passed, value, criterion: criterion.into() }
    }

    pub fn summary_line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        format!("{status} {:<40} {:>12.4e}  ({})", self.name, self.value, self.criterion)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub family: &'static str,
    pub params: ModelParams,
    pub grid: Grid,
    pub records: Vec<ConvergenceRecord>,
    pub checks: Vec<Check>,
}

fn in_band(v: f64, band: (f64, f64)) -> bool {
    v >= band.0 && v <= band.1
}

fn order_check(records: &[ConvergenceRecord; 2]) -> Check {
    let [coarse, fine] = records;
    let order = fine.order_estimate.unwrap_or(f64::NAN);
    if coarse.residual <= EXACT_TOL && fine.residual <= EXACT_TOL {
        return Check::new(
            format!("{}_exact", coarse.name),
            true,
            coarse.residual.max(fine.residual),
            format!("<= {EXACT_TOL:e}"),
        );
    }
    Check::new(
        format!("{}_order", coarse.name),
        in_band(order, ORDER_BAND),
        order,
        format!("in [{}, {}]", ORDER_BAND.0, ORDER_BAND.1),
    )
}

/// Evenly spaced subset of the grid nodes.
pub fn sample_points(grid: &Grid, max: usize) -> Vec<f64> {
    let stride = grid.n.div_ceil(max).max(1);
    (0..grid.n).step_by(stride).map(|i| grid.x(i)).collect()
}

fn max_scaled<F>(xs: &[f64], mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let mut worst: f64 = 0.0;
    for &x in xs {
        let (value, reference) = f(x)?;
        worst = worst.max((value - reference).abs() / reference.abs().max(1.0));
    }
    Ok(worst)
}

fn pointwise(name: &str, value: f64, tol: f64) -> Check {
    Check::new(name, value <= tol, value, format!("<= {tol:e} (scaled by max(1, |ref|))"))
}

/// Lowest `k` levels of `h̃` on `grid`.
pub fn lowest_levels(profile: &Profile, params: &ModelParams, grid: &Grid, k: usize) -> Result<Vec<f64>> {
    let small = discrete::build_h_tilde(profile, params, grid)?;
    spectra::lowest_eigenvalues(&SymmetricTridiagonal::from_band(&small.matrix)?, k)
}

fn residual_studies(
    profile: &Profile,
    params: &ModelParams,
    grid: &Grid,
    records: &mut Vec<ConvergenceRecord>,
    checks: &mut Vec<Check>,
) -> Result<()> {
    let vectors = discrete::gaussian_test_vectors;
    let hermitian = params.alpha == params.beta;

    let sim = discrete::convergence_study("similarity", grid, |g| {
        discrete::residual_similarity(profile, params, g, &vectors(g))
    })?;
    let pseudo = discrete::convergence_study("pseudo_hermiticity", grid, |g| {
        discrete::residual_pseudo_hermiticity(profile, params, g, &vectors(g))
    })?;
    for study in [&sim, &pseudo] {
        if hermitian {
            let worst = study[0].residual.max(study[1].residual);
            checks.push(Check::new(
                format!("{}_hermitian_control", study[0].name),
                worst <= EXACT_TOL,
                worst,
                format!("<= {EXACT_TOL:e}"),
            ));
        } else {
            checks.push(order_check(study));
        }
    }
    records.extend(sim);
    records.extend(pseudo);

    if !hermitian {
        let control = discrete::convergence_study("inverted_metric_control", grid, |g| {
            discrete::residual_metric(profile, params, g, &vectors(g), MetricChoice::Inverted)
        })?;
        let order = control[1].order_estimate.unwrap_or(f64::NAN);
        checks.push(Check::new(
            "inverted_metric_control_does_not_decay",
            !(order >= CONTROL_MAX_ORDER),
            order,
            format!("order < {CONTROL_MAX_ORDER}"),
        ));
        records.extend(control);
    }

    let comm = discrete::convergence_study("commutator", grid, |g| {
        discrete::residual_commutator(profile, g, &vectors(g))
    })?;
    checks.push(order_check(&comm));
    records.extend(comm);

    if factorize(profile, params).is_ok() {
        let fact = discrete::convergence_study("factorization", grid, |g| {
            discrete::residual_factorization(profile, params, g, &vectors(g))
        })?;
        checks.push(order_check(&fact));
        records.extend(fact);
    }
    Ok(())
}

fn closed_form_studies(
    profile: &Profile,
    params: &ModelParams,
    grid: &Grid,
    k: usize,
    records: &mut Vec<ConvergenceRecord>,
    checks: &mut Vec<Check>,
) -> Result<()> {
    if spectra::closed_form_energy(profile, params, 0).is_none() {
        return Ok(());
    }
    let exact = (0..k)
        .map(|n| spectra::closed_form_energy(profile, params, n).expect("closed form exists"))
        .collect::<Result<Vec<_>>>()?;

    let fine_grid = grid.refined();
    let coarse = lowest_levels(profile, params, grid, k)?;
    let fine = lowest_levels(profile, params, &fine_grid, k)?;
    for n in 0..k {
        let (ec, ef) = ((coarse[n] - exact[n]).abs(), (fine[n] - exact[n]).abs());
        let name = format!("level_{n}");
        records.push(ConvergenceRecord { name: name.clone(), h: grid.h(), residual: ec, order_estimate: None });
        records.push(ConvergenceRecord {
            name: name.clone(),
            h: fine_grid.h(),
            residual: ef,
            order_estimate: Some(discrete::observed_order(ec, ef)),
        });
        let ratio = ec / ef;
        let exact_enough = ec <= EXACT_TOL * exact[n].abs().max(1.0);
        checks.push(Check::new(
            format!("{name}_richardson_ratio"),
            exact_enough || in_band(ratio, RICHARDSON_BAND),
            ratio,
            format!("in [{}, {}]", RICHARDSON_BAND.0, RICHARDSON_BAND.1),
        ));
    }

    for n in 0..k.min(EIGENFUNCTION_LEVELS) {
        let study = discrete::convergence_study(&format!("eigenfunction_{n}"), grid, |g| {
            let op = discrete::build_h_tilde(profile, params, g)?;
            let chi = g.try_sample(|x| super::analytic_wavefunction(profile, params, n, x).expect("closed form exists"))?;
            Ok(discrete::eigen_residual(&op, exact[n], &chi))
        })?;
        checks.push(order_check(&study));
        records.extend(study);
    }
    Ok(())
}

fn pointwise_checks(profile: &Profile, params: &ModelParams, grid: &Grid, checks: &mut Vec<Check>) -> Result<()> {
    let xs = sample_points(grid, POINTWISE_SAMPLES);
    let swapped = params.swapped();
    let wt = params.omega_tilde();
    let (ra, rb) = params.reduced();

    let v = max_scaled(&xs, |x| Ok((model::v_eff(profile, params, x), model::v_eff(profile, &swapped, x))))?;
    checks.push(pointwise("veff_swap_symmetry", v, 1e-11));
    let v = max_scaled(&xs, |x| {
        Ok((model::rho_tilde(profile, params, x)? * model::rho_tilde(profile, &swapped, x)?, 1.0))
    })?;
    checks.push(pointwise("rho_reciprocity", v, 1e-11));
    let v = max_scaled(&xs, |x| Ok((model::v_eff_gauge(profile, params, x), model::v_eff(profile, params, x))))?;
    checks.push(pointwise("veff_gauge_route", v, 1e-9));
    let v = max_scaled(&xs, |x| {
        Ok((model::rho_tilde(profile, params, x)? * model::gauge_weight(profile, params, x)?, 1.0))
    })?;
    checks.push(pointwise("rho_quadrature_route", v, 1e-8));
    if params.alpha == params.beta {
        let v = max_scaled(&xs, |x| Ok((model::rho_tilde(profile, params, x)?, 1.0)))?;
        checks.push(Check::new("rho_identity_when_alpha_eq_beta", v == 0.0, v, "exactly 0"));
    }

    match profile.family() {
        Family::Solitonic { q, kappa } => {
            let v = max_scaled(&xs, |x| {
                Ok((profile.commutator_field(x), (2.0 * kappa - 1.0) * q * q * (q * x).cosh().powi(2)))
            })?;
            checks.push(pointwise("solitonic_commutator", v, 1e-10));
            if let Ok(cf) = SolitonicClosedForm::for_params(q, kappa, params) {
                let v = max_scaled(&xs, |x| {
                    let closed = wt * (q * q * (cf.delta - 1.0) * (q * x).cosh().powi(2) + cf.v0);
                    Ok((model::v_eff(profile, params, x), closed))
                })?;
                checks.push(pointwise("solitonic_veff", v, 1e-10));
            }
        }
        Family::Morse { p, mu } => {
            let v = max_scaled(&xs, |x| Ok((model::v_eff(profile, params, x), wt * morse_veff(p, mu, ra, rb, x)?)))?;
            checks.push(pointwise("morse_veff", v, 1e-10));
            let rho0 = morse_rho(p, mu, ra, rb, 0.0)?;
            let v = max_scaled(&xs, |x| {
                Ok((model::rho_tilde(profile, params, x)?, morse_rho(p, mu, ra, rb, x)? / rho0))
            })?;
            checks.push(pointwise("morse_rho", v, 1e-10));
            let v = max_scaled(&xs, |x| Ok((profile.commutator_field(x), 1.0)))?;
            checks.push(pointwise("canonical_commutator", v, 1e-9));
        }
        Family::Canonical { .. } => {
            let v = max_scaled(&xs, |x| Ok((profile.commutator_field(x), 1.0)))?;
            checks.push(pointwise("canonical_commutator", v, 1e-9));
        }
        Family::Harmonic => {
            let v = max_scaled(&xs, |x| Ok((profile.commutator_field(x), 1.0)))?;
            checks.push(pointwise("harmonic_commutator", v, 1e-12));
        }
        Family::Custom => {}
    }

    if let Ok(data) = factorize(profile, params) {
        let v = max_scaled(&xs, |x| Ok((model::v_eff(profile, params, x), data.potential(x))))?;
        checks.push(pointwise("factorization_pointwise", v, 1e-10));
    }
    Ok(())
}

/// Nonsymmetric solve on the clipped domain with the oracle node count.
pub fn oracle_grid(profile: &Profile, grid: &Grid) -> Result<Grid> {
    let (lo, hi) = profile.oracle_domain();
    Grid::new(lo.max(grid.x_min), hi.min(grid.x_max), spectra::ORACLE_NODES)
}

fn oracle_checks(profile: &Profile, params: &ModelParams, grid: &Grid, k: usize, checks: &mut Vec<Check>) -> Result<()> {
    let og = oracle_grid(profile, grid)?;
    let summary = spectra::oracle_summary(profile, params, &og, k, &QrOptions::default())?;
    let ratio = summary.max_imag / summary.norm_inf;
    checks.push(Check::new("oracle_max_imag", ratio <= 1e-8, ratio, "max|Im E| <= 1e-8 |H|_inf"));
    let worst = summary.rel_err_symmetrized.iter().copied().fold(0.0, f64::max);
    checks.push(Check::new(
        "oracle_vs_symmetrized",
        !summary.rel_err_symmetrized.is_empty() && worst <= 1e-6,
        worst,
        "rel err <= 1e-6",
    ));
    Ok(())
}

/// Runs the full suite on `grid` and its refinement.
pub fn verify(profile: &Profile, params: &ModelParams, grid: &Grid, k: usize) -> Result<VerifyReport> {
    let mut records = Vec::new();
    let mut checks = Vec::new();
    residual_studies(profile, params, grid, &mut records, &mut checks)?;
    closed_form_studies(profile, params, grid, k, &mut records, &mut checks)?;
    pointwise_checks(profile, params, grid, &mut checks)?;
    oracle_checks(profile, params, grid, k, &mut checks)?;
    Ok(VerifyReport {
        passed: checks.iter().all(|c| c.passed),
        family: profile.family().name(),
        params: *params,
        grid: *grid,
        records,
        checks,
    })
}
