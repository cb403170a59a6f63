//! Ladder-operator profiles `(a(x), b(x))` for `η = a d/dx + b`.
//!
//! Every profile exposes analytic derivatives, the antiderivative
//! `B(x) = ∫₀ˣ b/a`, the mass `M = a⁻²` and the generator `g = ∫ dx/a`.
//! Indefinite integrals use the lower limit `x₀ = 0` unless the family fixes
//! a specific antiderivative (the exponential generator, see [`Amplitude`]).

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::expr::Expr;

/// Values beyond this magnitude are rejected when a profile is checked on a domain.
pub const RANGE_LIMIT: f64 = 1e12;

const QUADRATURE_TOL: f64 = 1e-13;

/// Value and first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Value and first derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet1 {
    pub value: f64,
    pub d1: f64,
}

/// `g` and its first three derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorJet {
    pub g: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Harmonic,
    Solitonic { q: f64, kappa: f64 },
    Morse { p: f64, mu: f64 },
    Canonical { mu: f64 },
    Custom,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Harmonic => "harmonic",
            Family::Solitonic { .. } => "solitonic",
            Family::Morse { .. } => "morse",
            Family::Canonical { .. } => "canonical",
            Family::Custom => "custom",
        }
    }
}

/// A parsed expression with its first two symbolic derivatives.
#[derive(Debug, Clone)]
pub struct ExprJet {
    source: String,
    f: Expr,
    d1: Expr,
    d2: Expr,
}

impl ExprJet {
    pub fn parse(source: &str) -> Result<Self> {
        let f = Expr::parse(source)?;
        let d1 = f.derivative();
        let d2 = d1.derivative();
        Ok(ExprJet { source: source.to_string(), f, d1, d2 })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    fn jet(&self, x: f64) -> Jet2 {
        Jet2 { value: self.f.eval(x), d1: self.d1.eval(x), d2: self.d2.eval(x) }
    }
}

/// The coefficient `a(x)` of `d/dx` in `η`.
///
/// Each variant fixes its generator `g` with `g′ = 1/a`: `x/c` for a constant,
/// `gd(qx)/q` for `cosh qx` (so `g(0) = 0`), `−e^(−px)/p` for `e^(px)` and a
/// quadrature from 0 for expressions.
#[derive(Debug, Clone)]
pub enum Amplitude {
    Constant(f64),
    Cosh { q: f64 },
    Exponential { p: f64 },
    Expr(Box<ExprJet>),
}

#[derive(Debug, Clone)]
enum Shift {
    Linear { slope: f64 },
    Sinh { scale: f64, q: f64 },
    Canonical { mu: f64 },
    Expr(Box<ExprJet>),
}

#[derive(Debug, Clone)]
pub struct Profile {
    family: Family,
    amplitude: Amplitude,
    shift: Shift,
}

/// `a = 1/√2`, `b = x/√2`: the standard oscillator with `[η, η†] = 1`.
pub fn make_harmonic() -> Profile {
    Profile {
        family: Family::Harmonic,
        amplitude: Amplitude::Constant(FRAC_1_SQRT_2),
        shift: Shift::Linear { slope: FRAC_1_SQRT_2 },
    }
}

/// `a = cosh qx`, `b = κq sinh qx`, i.e. the mass `M = sech² qx`.
pub fn make_solitonic(q: f64, kappa: f64) -> Result<Profile> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::invalid("q", format!("must be positive, got {q}")));
    }
    if !kappa.is_finite() {
        return Err(Error::invalid("kappa", "must be finite"));
    }
    Ok(Profile {
        family: Family::Solitonic { q, kappa },
        amplitude: Amplitude::Cosh { q },
        shift: Shift::Sinh { scale: kappa * q, q },
    })
}

/// Canonical profile generated by `g = −e^(−px)/p`: `a = e^(px)`, mass `e^(−2px)`.
pub fn make_morse(p: f64, mu: f64) -> Result<Profile> {
    if p == 0.0 || !p.is_finite() {
        return Err(Error::invalid("p", format!("must be nonzero and finite, got {p}")));
    }
    if !mu.is_finite() {
        return Err(Error::invalid("mu", "must be finite"));
    }
    Ok(Profile {
        family: Family::Morse { p, mu },
        amplitude: Amplitude::Exponential { p },
        shift: Shift::Canonical { mu },
    })
}

/// Profile from closed-form expressions for `a(x)` and `b(x)`.
pub fn make_custom(expr_a: &str, expr_b: &str) -> Result<Profile> {
    Ok(Profile {
        family: Family::Custom,
        amplitude: Amplitude::Expr(Box::new(ExprJet::parse(expr_a)?)),
        shift: Shift::Expr(Box::new(ExprJet::parse(expr_b)?)),
    })
}

/// Keeps `a` and replaces `b` by the solution of `[η, η†] = 1`:
/// `b = −g″/(2g′²) + g/2 + μ`.
pub fn canonical_b_from_g(profile: &Profile, mu: f64) -> Result<Profile> {
    if !mu.is_finite() {
        return Err(Error::invalid("mu", "must be finite"));
    }
    let family = match (&profile.amplitude, profile.family) {
        (Amplitude::Exponential { p }, _) => Family::Morse { p: *p, mu },
        _ => Family::Canonical { mu },
    };
    Ok(Profile { family, amplitude: profile.amplitude.clone(), shift: Shift::Canonical { mu } })
}

/// Canonical profile built directly from an amplitude.
pub fn canonical_from_amplitude(amplitude: Amplitude, mu: f64) -> Result<Profile> {
    match &amplitude {
        Amplitude::Constant(c) if !(*c > 0.0) => {
            return Err(Error::invalid("a", format!("constant amplitude must be positive, got {c}")))
        }
        Amplitude::Cosh { q } if !(*q > 0.0) => {
            return Err(Error::invalid("q", format!("must be positive, got {q}")))
        }
        Amplitude::Exponential { p } if *p == 0.0 => {
            return Err(Error::invalid("p", "must be nonzero"))
        }
        _ => {}
    }
    let base = Profile { family: Family::Custom, amplitude, shift: Shift::Linear { slope: 0.0 } };
    canonical_b_from_g(&base, mu)
}

impl Profile {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn amplitude(&self) -> &Amplitude {
        &self.amplitude
    }

    /// `(a, a′, a″)` at `x`.
    pub fn a_jet(&self, x: f64) -> Jet2 {
        match &self.amplitude {
            Amplitude::Constant(c) => Jet2 { value: *c, d1: 0.0, d2: 0.0 },
            Amplitude::Cosh { q } => {
                let (s, c) = ((q * x).sinh(), (q * x).cosh());
                Jet2 { value: c, d1: q * s, d2: q * q * c }
            }
            Amplitude::Exponential { p } => {
                let e = (p * x).exp();
                Jet2 { value: e, d1: p * e, d2: p * p * e }
            }
            Amplitude::Expr(jet) => jet.jet(x),
        }
    }

    /// `(b, b′)` at `x`.
    pub fn b_jet(&self, x: f64) -> Jet1 {
        match &self.shift {
            Shift::Linear { slope } => Jet1 { value: slope * x, d1: *slope },
            Shift::Sinh { scale, q } => {
                Jet1 { value: scale * (q * x).sinh(), d1: scale * q * (q * x).cosh() }
            }
            Shift::Canonical { mu } => {
                let GeneratorJet { g, g1, g2, g3 } = self.generator(x);
                let g1sq = g1 * g1;
                Jet1 {
                    value: -g2 / (2.0 * g1sq) + 0.5 * g + mu,
                    d1: -g3 / (2.0 * g1sq) + g2 * g2 / (g1sq * g1) + 0.5 * g1,
                }
            }
            Shift::Expr(jet) => {
                let j = jet.jet(x);
                Jet1 { value: j.value, d1: j.d1 }
            }
        }
    }

    pub fn a(&self, x: f64) -> f64 {
        self.a_jet(x).value
    }

    pub fn b(&self, x: f64) -> f64 {
        self.b_jet(x).value
    }

    /// Position-dependent mass `M(x) = a(x)⁻²`.
    pub fn mass(&self, x: f64) -> f64 {
        let a = self.a(x);
        1.0 / (a * a)
    }

    /// `g(x)` with `g′ = 1/a` and its higher derivatives.
    pub fn generator(&self, x: f64) -> GeneratorJet {
        match &self.amplitude {
            Amplitude::Constant(c) => GeneratorJet { g: x / c, g1: 1.0 / c, g2: 0.0, g3: 0.0 },
            Amplitude::Cosh { q } => {
                let t = (q * x).tanh();
                let sech = 1.0 / (q * x).cosh();
                GeneratorJet {
                    g: 2.0 * (0.5 * q * x).tanh().atan() / q,
                    g1: sech,
                    g2: -q * sech * t,
                    g3: -q * q * sech * (sech * sech - t * t),
                }
            }
            Amplitude::Exponential { p } => {
                let e = (-p * x).exp();
                GeneratorJet { g: -e / p, g1: e, g2: -p * e, g3: p * p * e }
            }
            Amplitude::Expr(_) => {
                let a = self.a_jet(x);
                let inv = 1.0 / a.value;
                GeneratorJet {
                    g: integrate(|t| 1.0 / self.a(t), 0.0, x),
                    g1: inv,
                    g2: -a.d1 * inv * inv,
                    g3: -a.d2 * inv * inv + 2.0 * a.d1 * a.d1 * inv * inv * inv,
                }
            }
        }
    }

    /// `B(x) = ∫₀ˣ b(t)/a(t) dt`.
    pub fn b_over_a_integral(&self, x: f64) -> f64 {
        match (&self.amplitude, &self.shift) {
            (Amplitude::Constant(c), Shift::Linear { slope }) => slope * x * x / (2.0 * c),
            (Amplitude::Cosh { q: qa }, Shift::Sinh { scale, q }) if qa == q => {
                scale / q * ln_cosh(q * x)
            }
            (_, Shift::Canonical { mu }) => {
                // b/a = b g′ = −g″/(2g′) + g g′/2 + μ g′
                let at = self.generator(x);
                let at0 = self.generator(0.0);
                -0.5 * (at.g1 / at0.g1).ln() + 0.25 * (at.g * at.g - at0.g * at0.g)
                    + mu * (at.g - at0.g)
            }
            _ => integrate(|t| self.b(t) / self.a(t), 0.0, x),
        }
    }

    /// `[η, η†] = 2ab′ − aa″`.
    pub fn commutator_field(&self, x: f64) -> f64 {
        let a = self.a_jet(x);
        let b = self.b_jet(x);
        2.0 * a.value * b.d1 - a.value * a.d2
    }

    /// Checks `a > 0` and the value range of `a`, `b` and their derivatives at `x`.
    pub fn check_point(&self, x: f64) -> Result<()> {
        let a = self.a_jet(x);
        let b = self.b_jet(x);
        if !(a.value > 0.0) {
            return Err(Error::PositivityViolation { x, value: a.value });
        }
        for (what, v) in [("a", a.value), ("a'", a.d1), ("a''", a.d2), ("b", b.value), ("b'", b.d1)] {
            if !v.is_finite() || v.abs() > RANGE_LIMIT {
                return Err(Error::Range { what, x, value: v });
            }
        }
        if let Shift::Canonical { .. } = self.shift {
            let g = self.generator(x);
            if !(g.g1.is_finite() && g.g1 != 0.0) {
                return Err(Error::SingularGenerator { x });
            }
        }
        Ok(())
    }

    pub fn check_points(&self, xs: impl IntoIterator<Item = f64>) -> Result<()> {
        xs.into_iter().try_for_each(|x| self.check_point(x))
    }

    /// Default domain clipped to `a² ≤ 10⁶`, which keeps `‖H̃‖` small enough
    /// for the dense solver to resolve the low levels.
    pub fn oracle_domain(&self) -> (f64, f64) {
        match &self.amplitude {
            Amplitude::Cosh { q } => {
                let edge = (1e3f64).acosh() / q;
                (-edge, edge)
            }
            _ => self.default_domain(),
        }
    }

    /// Natural truncation interval of the family.
    ///
    /// Confining families use `[−12/q′, 12/q′]` with `q′` the inverse length
    /// scale. The exponential amplitude is clipped so that `a² ≤ 10⁶` on the
    /// growing side and `e^(|p x|) ≤ e²` on the other.
    pub fn default_domain(&self) -> (f64, f64) {
        match &self.amplitude {
            Amplitude::Cosh { q } => (-12.0 / q, 12.0 / q),
            Amplitude::Exponential { p } => {
                let grow = (1e6f64).ln() / (2.0 * p.abs());
                let shrink = 2.0 / p.abs();
                if *p > 0.0 {
                    (-shrink, grow)
                } else {
                    (-grow, shrink)
                }
            }
            _ => (-12.0, 12.0),
        }
    }
}

/// `ln cosh v` without overflow.
pub(crate) fn ln_cosh(v: f64) -> f64 {
    let v = v.abs();
    v + (-2.0 * v).exp().ln_1p() - std::f64::consts::LN_2
}

pub(crate) fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    quadrature::double_exponential::integrate(f, a, b, QUADRATURE_TOL).integral
}

/// Parity of the coefficients of the non-Hermitian operator at the sample points.
///
/// True when `a²` is even, the first-derivative coefficient `ω̃aa′ + c₁` is
/// odd and `c₂` is even, each within `1e−10`.
pub fn pt_symmetry_predicate(
    profile: &Profile,
    params: &crate::model::ModelParams,
    sample_points: &[f64],
) -> Result<bool> {
    const TOL: f64 = 1e-10;
    for &x in sample_points {
        profile.check_point(x)?;
        profile.check_point(-x)?;
    }
    let wt = params.omega_tilde();
    let coeffs = |x: f64| {
        let a = profile.a_jet(x);
        (
            a.value * a.value,
            wt * a.value * a.d1 + crate::model::c1(profile, params, x),
            crate::model::c2(profile, params, x),
        )
    };
    let close = |u: f64, v: f64| (u - v).abs() <= TOL * (1.0 + u.abs().max(v.abs()));
    Ok(sample_points.iter().all(|&x| {
        let (k_p, d_p, c_p) = coeffs(x);
        let (k_m, d_m, c_m) = coeffs(-x);
        close(k_p, k_m) && close(d_p, -d_m) && close(c_p, c_m)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;

    fn assert_close(got: f64, want: f64, tol: f64) {
        assert!((got - want).abs() <= tol, "got {got}, want {want} (tol {tol})");
    }

    #[test]
    fn solitonic_values_at_origin() {
        let p = make_solitonic(1.0, 2.0).unwrap();
        let a = p.a_jet(0.0);
        let b = p.b_jet(0.0);
        assert_eq!((a.value, a.d1, a.d2), (1.0, 0.0, 1.0));
        assert_eq!((b.value, b.d1), (0.0, 2.0));
    }

    #[test]
    fn solitonic_antiderivative_and_mass() {
        let p = make_solitonic(1.0, 2.0).unwrap();
        assert_close(p.b_over_a_integral(1.0), 0.867_561_8, 2e-6);
        assert_close(p.b_over_a_integral(1.0), 2.0 * 1f64.cosh().ln(), 1e-14);
        assert_close(p.mass(1.0), 0.419_974_3, 1e-7);
        assert_eq!(p.b_over_a_integral(0.0), 0.0);
    }

    #[test]
    fn solitonic_rejects_nonpositive_q() {
        assert!(matches!(make_solitonic(0.0, 2.0), Err(Error::InvalidParameter { name: "q", .. })));
        assert!(make_solitonic(-1.0, 2.0).is_err());
    }

    #[test]
    fn harmonic_constants() {
        let p = make_harmonic();
        assert_close(p.a(1.0), 0.707_106_8, 1e-7);
        assert_close(p.b(1.0), 0.707_106_8, 1e-7);
        assert_close(p.b_over_a_integral(2.0), 2.0, 1e-15);
        for x in [-3.0, 0.0, 2.5] {
            let a = p.a_jet(x);
            assert_eq!((a.d1, a.d2), (0.0, 0.0));
            assert_close(p.b_jet(x).d1, FRAC_1_SQRT_2, 1e-16);
            assert_close(p.commutator_field(x), 1.0, 1e-15);
        }
    }

    #[test]
    fn canonical_linear_generator() {
        let p = canonical_from_amplitude(Amplitude::Constant(1.0), 0.3).unwrap();
        for x in [-2.0, 0.0, 1.5] {
            assert_close(p.b(x), x / 2.0 + 0.3, 1e-15);
        }
    }

    #[test]
    fn canonical_solitonic_reconstruction() {
        // Same b up to the additive constant π/(4q) absorbed into μ.
        let q = 1.0;
        let base = make_solitonic(q, 2.0).unwrap();
        let mu = std::f64::consts::PI / (4.0 * q);
        let p = canonical_b_from_g(&base, mu).unwrap();
        for x in [-3.0, -0.5, 0.0, 0.7, 2.0] {
            let want = 0.5 * (q * x).sinh() + (q * x).exp().atan() / q;
            assert_close(p.b(x), want, 1e-12);
            assert_close(p.commutator_field(x), 1.0, 1e-12);
        }
    }

    #[test]
    fn canonical_exponential_generator() {
        let p = make_morse(1.0, 0.0).unwrap();
        for x in [-1.5, 0.0, 1.0, 3.0] {
            let x: f64 = x;
            assert_close(p.b(x), 0.5 * x.exp() - 0.5 * (-x).exp(), 1e-12);
        }
    }

    #[test]
    fn solitonic_commutator() {
        let (q, kappa) = (1.3, 2.0);
        let p = make_solitonic(q, kappa).unwrap();
        assert_close(make_solitonic(1.0, 2.0).unwrap().commutator_field(0.0), 3.0, 1e-15);
        for i in 0..=20 {
            let x = -3.0 + 0.3 * i as f64;
            let want = (2.0 * kappa - 1.0) * q * q * (q * x).cosh().powi(2);
            assert_close(p.commutator_field(x), want, 1e-10);
        }
    }

    #[test]
    fn custom_profile_matches_builtin() {
        let custom = make_custom("cosh(x)", "2*sinh(x)").unwrap();
        let builtin = make_solitonic(1.0, 2.0).unwrap();
        for x in [-2.0, -0.3, 0.0, 1.1] {
            let (ca, ba) = (custom.a_jet(x), builtin.a_jet(x));
            assert_close(ca.value, ba.value, 1e-13);
            assert_close(ca.d1, ba.d1, 1e-13);
            assert_close(ca.d2, ba.d2, 1e-13);
            assert_close(custom.b_jet(x).d1, builtin.b_jet(x).d1, 1e-13);
            assert_close(custom.b_over_a_integral(x), builtin.b_over_a_integral(x), 1e-11);
            assert_close(custom.generator(x).g, builtin.generator(x).g, 1e-11);
        }
    }

    #[test]
    fn positivity_and_range_checks() {
        let shifted = make_custom("sinh(x) + 0.5", "x").unwrap();
        assert!(matches!(shifted.check_point(-2.0), Err(Error::PositivityViolation { .. })));
        let sol = make_solitonic(1.0, 2.0).unwrap();
        assert!(sol.check_point(27.0).is_ok());
        assert!(matches!(sol.check_point(30.0), Err(Error::Range { .. })));
    }

    #[test]
    fn pt_predicate() {
        let xs: Vec<f64> = (0..=20).map(|i| -2.0 + 0.2 * i as f64).collect();
        let params = ModelParams::new(2.0, 0.4, 0.2).unwrap();
        assert!(pt_symmetry_predicate(&make_harmonic(), &params, &xs).unwrap());
        let sol = make_solitonic(1.0, 2.0).unwrap();
        let params = ModelParams::new(1.1, 0.1, 0.0).unwrap();
        assert!(pt_symmetry_predicate(&sol, &params, &xs).unwrap());
        // an even b breaks the parity of the coefficients when α ≠ β
        let broken = make_custom("cosh(x)", "1 + x^2").unwrap();
        assert!(!pt_symmetry_predicate(&broken, &params, &xs).unwrap());
        let shifted = make_custom("sinh(x) + 0.5", "x").unwrap();
        assert!(pt_symmetry_predicate(&shifted, &params, &xs).is_err());
    }

    #[test]
    fn default_domains() {
        assert_eq!(make_harmonic().default_domain(), (-12.0, 12.0));
        assert_eq!(make_solitonic(2.0, 1.0).unwrap().default_domain(), (-6.0, 6.0));
        let (lo, hi) = make_morse(1.0, 0.0).unwrap().default_domain();
        let m = make_morse(1.0, 0.0).unwrap();
        assert!(m.a(hi).powi(2) <= 1e6 * (1.0 + 1e-12));
        assert!(lo < 0.0);
        let (lo2, hi2) = make_morse(-1.0, 0.0).unwrap().default_domain();
        assert_close(lo2, -hi, 1e-15);
        assert_close(hi2, -lo, 1e-15);
    }
}
