//! Swanson parameters and the coefficient fields derived from a profile.
//!
//! The non-Hermitian operator is
//! `H̃ = −ω̃ d/dx a² d/dx + (ω̃aa′ + c₁) d/dx + c₂` with `ω̃ = ω − α − β`,
//! and its Hermitian equivalent is `h̃ = ρ̃ H̃ ρ̃⁻¹ = −ω̃ d/dx a² d/dx + V_eff`.
//!
//! `h̃` depends on `(ω, α, β)` only through `ω̃ · h̃₁(α/ω̃, β/ω̃)`, where `h̃₁`
//! is the `ω̃ = 1` operator, so the closed forms below are written for
//! `ω̃ = 1` and rescaled.

use serde::Serialize;

use crate::discrete::Grid;
use crate::error::{Error, Result};
use crate::profiles::{integrate, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl ModelParams {
    /// Requires `ω̃ = ω − α − β > 0`.
    pub fn new(omega: f64, alpha: f64, beta: f64) -> Result<Self> {
        for (name, v) in [("omega", omega), ("alpha", alpha), ("beta", beta)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        let params = ModelParams { omega, alpha, beta };
        let wt = params.omega_tilde();
        if !(wt > 0.0) {
            return Err(Error::invalid(
                "omega",
                format!(
                    "omega_tilde = omega - alpha - beta = {wt}; it is appropriate to assume omega_tilde > 0"
                ),
            ));
        }
        Ok(params)
    }

    /// Parameters with `ω̃ = 1`.
    pub fn normalized(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(1.0 + alpha + beta, alpha, beta)
    }

    /// `ω̃ = ω − α − β`, symmetric in `α ↔ β` bit for bit.
    pub fn omega_tilde(&self) -> f64 {
        self.omega - (self.alpha + self.beta)
    }

    /// The adjoint model `H^(β,α)`.
    pub fn swapped(&self) -> Self {
        ModelParams { omega: self.omega, alpha: self.beta, beta: self.alpha }
    }

    /// `(α/ω̃, β/ω̃)`.
    pub fn reduced(&self) -> (f64, f64) {
        let wt = self.omega_tilde();
        (self.alpha / wt, self.beta / wt)
    }

    pub fn is_hermitian(&self) -> bool {
        self.alpha == self.beta
    }
}

/// `c₁ = −ω̃aa′ + (α−β)a(2b − a′)`.
pub fn c1(profile: &Profile, params: &ModelParams, x: f64) -> f64 {
    let a = profile.a_jet(x);
    let b = profile.b(x);
    -params.omega_tilde() * a.value * a.d1
        + (params.alpha - params.beta) * a.value * (2.0 * b - a.d1)
}

/// `c₂ = ω̃(b² − ab′ − a′b) + αb(2b−a′) + β[(b−a′)(2b−a′) − a(2b′−a″)] + ½(ω̃+α+β)`.
pub fn c2(profile: &Profile, params: &ModelParams, x: f64) -> f64 {
    let a = profile.a_jet(x);
    let b = profile.b_jet(x);
    let (alpha, beta, wt) = (params.alpha, params.beta, params.omega_tilde());
    let two_b_minus = 2.0 * b.value - a.d1;
    wt * (b.value * b.value - a.value * b.d1 - a.d1 * b.value)
        + alpha * b.value * two_b_minus
        + beta * ((b.value - a.d1) * two_b_minus - a.value * (2.0 * b.d1 - a.d2))
        + 0.5 * params.omega
}

/// Kinetic coefficient `ω̃a²`.
pub fn kinetic(profile: &Profile, params: &ModelParams, x: f64) -> f64 {
    let a = profile.a(x);
    params.omega_tilde() * a * a
}

/// Coefficient of `d/dx` in the operator form `−ω̃ d/dx a² d/dx + (ω̃aa′ + c₁) d/dx + c₂`.
pub fn drift(profile: &Profile, params: &ModelParams, x: f64) -> f64 {
    let a = profile.a_jet(x);
    params.omega_tilde() * a.value * a.d1 + c1(profile, params, x)
}

/// `(ln w)′ = (c₁ + ω̃aa′)/(2ω̃a²) = (α−β)(2b − a′)/(2ω̃a)`.
pub fn gauge_log_derivative(profile: &Profile, params: &ModelParams, x: f64) -> f64 {
    let a = profile.a_jet(x);
    let b = profile.b(x);
    (params.alpha - params.beta) * (2.0 * b - a.d1) / (2.0 * params.omega_tilde() * a.value)
}

fn gauge_log_second_derivative(profile: &Profile, params: &ModelParams, x: f64) -> f64 {
    let a = profile.a_jet(x);
    let b = profile.b_jet(x);
    let k = (params.alpha - params.beta) / (2.0 * params.omega_tilde());
    k * ((2.0 * b.d1 - a.d2) / a.value - (2.0 * b.value - a.d1) * a.d1 / (a.value * a.value))
}

fn check_interval(profile: &Profile, x: f64) -> Result<()> {
    profile.check_point(0.0)?;
    profile.check_point(x)
}

/// Gauge weight `w = exp ∫₀ˣ (c₁ + ω̃aa′)/(2ω̃a²)`, evaluated by quadrature.
///
/// `w` removes the first-derivative term: `h̃ χ = w⁻¹ H̃ (w χ)`.
pub fn gauge_weight(profile: &Profile, params: &ModelParams, x: f64) -> Result<f64> {
    check_interval(profile, x)?;
    if params.is_hermitian() {
        return Ok(1.0);
    }
    let wt = params.omega_tilde();
    let exponent = integrate(
        |t| {
            let a = profile.a_jet(t);
            (c1(profile, params, t) + wt * a.value * a.d1) / (2.0 * wt * a.value * a.value)
        },
        0.0,
        x,
    );
    Ok(exponent.exp())
}

/// `ln ρ̃(x)` from the closed form, normalized so that `ρ̃(0) = 1`.
pub fn log_rho_tilde(profile: &Profile, params: &ModelParams, x: f64) -> Result<f64> {
    check_interval(profile, x)?;
    let d = params.alpha - params.beta;
    if d == 0.0 {
        return Ok(0.0);
    }
    let wt = params.omega_tilde();
    let ratio = (profile.a(x) / profile.a(0.0)).ln();
    Ok(d / wt * (0.5 * ratio - profile.b_over_a_integral(x)))
}

/// `ρ̃ = a^((α−β)/2) exp(−(α−β)B(x))` at `ω̃ = 1` (with `a` measured relative to `a(0)`);
/// general `ω̃` divides the exponent by `ω̃`.
pub fn rho_tilde(profile: &Profile, params: &ModelParams, x: f64) -> Result<f64> {
    Ok(log_rho_tilde(profile, params, x)?.exp())
}

/// Metric `ζ₊ = ρ̃²`.
pub fn zeta_plus(profile: &Profile, params: &ModelParams, x: f64) -> Result<f64> {
    Ok((2.0 * log_rho_tilde(profile, params, x)?).exp())
}

/// `ζ = ρ_(β,α)⁻¹ ρ_(α,β)`; equals `ζ₊` because `ρ̃_(β,α) = ρ̃_(α,β)⁻¹`.
pub fn zeta(profile: &Profile, params: &ModelParams, x: f64) -> Result<f64> {
    Ok(rho_tilde(profile, params, x)? / rho_tilde(profile, &params.swapped(), x)?)
}

/// Mapping function of the constant-coefficient model, `exp(−½ (α−β)/ω̃ x²)`.
pub fn jones_rho(params: &ModelParams, x: f64) -> f64 {
    (-0.5 * (params.alpha - params.beta) / params.omega_tilde() * x * x).exp()
}

/// Effective potential of `h̃`, closed form.
///
/// At `ω̃ = 1`:
/// `½(α+β)aa″ + [½(α+β) + ¼(α−β)²]a′² − K a′b + K b² − (α+β+1)ab′ + ½(α+β+1)`
/// with `K = 1 + 2(α+β) + (α−β)²`.
pub fn v_eff(profile: &Profile, params: &ModelParams, x: f64) -> f64 {
    let wt = params.omega_tilde();
    let (alpha, beta) = params.reduced();
    let a = profile.a_jet(x);
    let b = profile.b_jet(x);
    wt * v_eff_unit(a.value, a.d1, a.d2, b.value, b.d1, alpha, beta)
}

pub(crate) fn v_eff_unit(a: f64, a1: f64, a2: f64, b: f64, b1: f64, alpha: f64, beta: f64) -> f64 {
    let s = alpha + beta;
    let d2 = (alpha - beta) * (alpha - beta);
    let k = 1.0 + 2.0 * s + d2;
    0.5 * s * a * a2 + (0.5 * s + 0.25 * d2) * a1 * a1 - k * a1 * b + k * b * b - (s + 1.0) * a * b1
        + 0.5 * (s + 1.0)
}

/// Effective potential through the gauge:
/// `V_eff = −ω̃a² w″/w + (c₁ − ω̃aa′) w′/w + c₂`, with `w′/w` and `w″/w`
/// from the analytic log-derivative of `w`.
pub fn v_eff_gauge(profile: &Profile, params: &ModelParams, x: f64) -> f64 {
    let wt = params.omega_tilde();
    let a = profile.a_jet(x);
    let u1 = gauge_log_derivative(profile, params, x);
    let u2 = gauge_log_second_derivative(profile, params, x);
    -wt * a.value * a.value * (u2 + u1 * u1)
        + (c1(profile, params, x) - wt * a.value * a.d1) * u1
        + c2(profile, params, x)
}

/// Sampled `c₁`, `c₂`, `V_eff` and the kinetic coefficient on a grid.
#[derive(Debug, Clone)]
pub struct CoefficientField {
    pub x: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
    pub veff: Vec<f64>,
    pub kinetic: Vec<f64>,
}

impl CoefficientField {
    pub fn sample(profile: &Profile, params: &ModelParams, grid: &Grid) -> Result<Self> {
        profile.check_points(grid.nodes())?;
        let xs: Vec<f64> = grid.nodes().collect();
        let map = |f: &dyn Fn(f64) -> f64| xs.iter().map(|&x| f(x)).collect::<Vec<_>>();
        Ok(CoefficientField {
            a: map(&|x| profile.a(x)),
            b: map(&|x| profile.b(x)),
            c1: map(&|x| c1(profile, params, x)),
            c2: map(&|x| c2(profile, params, x)),
            veff: map(&|x| v_eff(profile, params, x)),
            kinetic: map(&|x| kinetic(profile, params, x)),
            x: xs,
        })
    }
}

/// Sampled gauge weight, mapping and metric.
#[derive(Debug, Clone)]
pub struct MetricData {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
    pub rho_tilde: Vec<f64>,
    pub zeta_plus: Vec<f64>,
    pub zeta: Vec<f64>,
    /// Present for the harmonic family.
    pub jones_rho: Option<Vec<f64>>,
}

impl MetricData {
    pub fn sample(profile: &Profile, params: &ModelParams, grid: &Grid) -> Result<Self> {
        profile.check_points(grid.nodes())?;
        let xs: Vec<f64> = grid.nodes().collect();
        let w = xs.iter().map(|&x| gauge_weight(profile, params, x)).collect::<Result<Vec<_>>>()?;
        let rho = xs.iter().map(|&x| rho_tilde(profile, params, x)).collect::<Result<Vec<_>>>()?;
        let zp = xs.iter().map(|&x| zeta_plus(profile, params, x)).collect::<Result<Vec<_>>>()?;
        let z = xs.iter().map(|&x| zeta(profile, params, x)).collect::<Result<Vec<_>>>()?;
        let jones = matches!(profile.family(), crate::profiles::Family::Harmonic)
            .then(|| xs.iter().map(|&x| jones_rho(params, x)).collect());
        Ok(MetricData { x: xs, w, rho_tilde: rho, zeta_plus: zp, zeta: z, jones_rho: jones })
    }

    pub fn is_positive(&self) -> bool {
        self.zeta_plus.iter().all(|&z| z > 0.0)
    }

    /// `max |ρ̃ · w − 1|`, the closed form against the quadrature route.
    pub fn consistency_error(&self) -> f64 {
        self.rho_tilde.iter().zip(&self.w).map(|(r, w)| (r * w - 1.0).abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{make_harmonic, make_morse, make_solitonic};

    fn assert_close(got: f64, want: f64, tol: f64) {
        assert!((got - want).abs() <= tol, "got {got}, want {want} (tol {tol})");
    }

    #[test]
    fn rejects_broken_region() {
        let err = ModelParams::new(0.5, 0.4, 0.2).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "omega", .. }));
        assert!(ModelParams::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn c1_examples() {
        let h = make_harmonic();
        for omega in [1.0, 2.0, 5.0] {
            let p = ModelParams::new(omega, 0.4, 0.2).unwrap();
            assert_close(c1(&h, &p, 1.0), 0.2, 1e-15);
        }
        let p = ModelParams::new(3.0, 0.3, 0.3).unwrap();
        assert_eq!(c1(&h, &p, 0.7), 0.0);
        let s = make_solitonic(1.0, 2.0).unwrap();
        assert_eq!(c1(&s, &ModelParams::normalized(0.1, 0.0).unwrap(), 0.0), 0.0);
    }

    #[test]
    fn c2_examples() {
        let h = make_harmonic();
        let p = ModelParams::normalized(0.0, 0.0).unwrap();
        assert_close(c2(&h, &p, 0.0), 0.0, 1e-15);
        assert_close(c2(&h, &p, 1.0), 0.5, 1e-15);
        let s = make_solitonic(1.0, 2.0).unwrap();
        assert_close(c2(&s, &ModelParams::normalized(0.1, 0.0).unwrap(), 0.0), -1.45, 1e-14);
    }

    #[test]
    fn gauge_weight_examples() {
        let h = make_harmonic();
        let p = ModelParams::new(2.0, 0.4, 0.2).unwrap();
        let w = gauge_weight(&h, &p, 1.0).unwrap();
        assert_close(w, (1.0f64 / 14.0).exp(), 1e-12);
        assert_close(w, 1.074_042_8, 2e-6);
        assert_close(1.0 / w, 0.931_062_7, 2e-6);
        assert_close(rho_tilde(&h, &p, 1.0).unwrap(), jones_rho(&p, 1.0), 1e-15);

        let s = make_solitonic(1.0, 2.0).unwrap();
        let p = ModelParams::normalized(0.1, 0.0).unwrap();
        let w = gauge_weight(&s, &p, 1.0).unwrap();
        assert_close(1.0 / w, 1f64.cosh().powf(-0.15), 1e-12);
        assert_close(1.0 / w, 0.937_004_8, 2e-6);

        let herm = ModelParams::new(2.0, 0.3, 0.3).unwrap();
        assert_eq!(gauge_weight(&s, &herm, 2.0).unwrap(), 1.0);
    }

    #[test]
    fn metric_examples() {
        let s = make_solitonic(1.0, 2.0).unwrap();
        let herm = ModelParams::new(2.0, 0.3, 0.3).unwrap();
        assert_eq!(rho_tilde(&s, &herm, 1.3).unwrap(), 1.0);
        assert_eq!(zeta_plus(&s, &herm, 1.3).unwrap(), 1.0);
        let p = ModelParams::normalized(0.1, 0.0).unwrap();
        assert_close(zeta_plus(&s, &p, 1.0).unwrap(), 0.877_978_0, 2e-6);
        assert_close(zeta_plus(&s, &p, 1.0).unwrap(), 1f64.cosh().powf(-0.3), 1e-14);
        assert_close(zeta(&s, &p, 1.0).unwrap(), zeta_plus(&s, &p, 1.0).unwrap(), 1e-14);
    }

    #[test]
    fn rho_tilde_rejects_nonpositive_a() {
        let bad = crate::profiles::make_custom("x", "1").unwrap();
        let p = ModelParams::normalized(0.1, 0.0).unwrap();
        assert!(matches!(rho_tilde(&bad, &p, 1.0), Err(Error::PositivityViolation { .. })));
        assert!(gauge_weight(&bad, &p, 1.0).is_err());
    }

    #[test]
    fn v_eff_examples() {
        let s = make_solitonic(1.0, 2.0).unwrap();
        let p = ModelParams::normalized(0.1, 0.0).unwrap();
        assert_close(v_eff(&s, &p, 0.0), -1.6, 1e-14);
        let m = make_morse(1.0, 0.0).unwrap();
        let p0 = ModelParams::normalized(0.0, 0.0).unwrap();
        assert_close(v_eff(&m, &p0, 0.0), -0.5, 1e-14);
    }

    #[test]
    fn harmonic_v_eff_is_the_oscillator() {
        // ½ (ω² − 4αβ)/ω̃ x² with no constant term
        let h = make_harmonic();
        let p = ModelParams::new(2.0, 0.4, 0.2).unwrap();
        for x in [-2.0, 0.0, 0.5, 3.0] {
            let want = 0.5 * (4.0 - 0.32) / 1.4 * x * x;
            assert_close(v_eff(&h, &p, x), want, 1e-13);
            assert_close(v_eff_gauge(&h, &p, x), want, 1e-12);
        }
    }

    #[test]
    fn metric_data_sampling() {
        let s = make_solitonic(1.0, 2.0).unwrap();
        let p = ModelParams::normalized(0.1, 0.0).unwrap();
        let grid = Grid::new(-4.0, 4.0, 31).unwrap();
        let m = MetricData::sample(&s, &p, &grid).unwrap();
        assert!(m.is_positive());
        assert!(m.consistency_error() < 1e-10);
        assert!(m.jones_rho.is_none());
        let c = CoefficientField::sample(&s, &p, &grid).unwrap();
        assert_eq!(c.x.len(), 31);
        let h = MetricData::sample(&make_harmonic(), &p, &grid).unwrap();
        let jones = h.jones_rho.as_ref().unwrap();
        for (r, j) in h.rho_tilde.iter().zip(jones) {
            assert_close(*r, *j, 1e-14);
        }
    }
}
