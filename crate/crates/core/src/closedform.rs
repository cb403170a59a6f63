//! Analytic oracles: the constant-coefficient (harmonic) model, the solitonic
//! mass profile with Gegenbauer bound states, the Morse-like canonical family,
//! and the factorization `h̃ = η₁†η₁ + ξ`.
//!
//! Closed forms are derived at `ω̃ = 1`; a general `ω̃` enters through the
//! reduced parameters `α/ω̃`, `β/ω̃` and an overall factor `ω̃` on energies.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{self, ModelParams};
use crate::profiles::{Jet1, Profile};

/// Highest Gegenbauer degree evaluated by [`gegenbauer`].
pub const MAX_GEGENBAUER_DEGREE: usize = 64;

/// `E_n = (n + ½) √(ω² − 4αβ)`.
pub fn harmonic_spectrum(params: &ModelParams, n: usize) -> Result<f64> {
    let disc = params.omega * params.omega - 4.0 * params.alpha * params.beta;
    if !(disc > 0.0) {
        return Err(Error::NoRealSpectrum(disc));
    }
    Ok((n as f64 + 0.5) * disc.sqrt())
}

/// Unnormalized oscillator eigenfunction `H_n(sx) e^(−s²x²/2)` of the
/// harmonic `h̃`, with `s² = √(ω² − 4αβ)/ω̃`.
pub fn harmonic_wavefunction(params: &ModelParams, n: usize, x: f64) -> Result<f64> {
    let disc = params.omega * params.omega - 4.0 * params.alpha * params.beta;
    if !(disc > 0.0) {
        return Err(Error::NoRealSpectrum(disc));
    }
    // a² = ½ for the harmonic profile, so the kinetic term is −½ω̃ d²/dx².
    let s = (disc.sqrt() / params.omega_tilde()).sqrt();
    let y = s * x;
    let (mut h0, mut h1) = (1.0, 2.0 * y);
    let hn = match n {
        0 => h0,
        _ => {
            for k in 1..n {
                let h2 = 2.0 * y * h1 - 2.0 * k as f64 * h0;
                h0 = h1;
                h1 = h2;
            }
            h1
        }
    };
    Ok(hn * (-0.5 * y * y).exp())
}

/// `C_n^(λ)(t)` by the three-term recurrence
/// `n C_n = 2(n+λ−1) t C_(n−1) − (n+2λ−2) C_(n−2)`.
///
/// # Panics
/// If `n > MAX_GEGENBAUER_DEGREE`.
pub fn gegenbauer(n: usize, lambda: f64, t: f64) -> f64 {
    assert!(n <= MAX_GEGENBAUER_DEGREE, "Gegenbauer degree {n} exceeds {MAX_GEGENBAUER_DEGREE}");
    if n == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (1.0, 2.0 * lambda * t);
    for k in 2..=n {
        let kf = k as f64;
        let next = (2.0 * (kf + lambda - 1.0) * t * cur - (kf + 2.0 * lambda - 2.0) * prev) / kf;
        prev = cur;
        cur = next;
    }
    cur
}

/// Coefficients of `A cosh²(qx) + B sinh²(qx) + C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicQuadratic {
    pub cosh2: f64,
    pub sinh2: f64,
    pub constant: f64,
}

impl HyperbolicQuadratic {
    /// Rewrites `sinh² = cosh² − 1`.
    pub fn in_cosh2(self) -> Self {
        HyperbolicQuadratic {
            cosh2: self.cosh2 + self.sinh2,
            sinh2: 0.0,
            constant: self.constant - self.sinh2,
        }
    }

    pub fn eval(&self, q: f64, x: f64) -> f64 {
        let (c, s) = ((q * x).cosh(), (q * x).sinh());
        self.cosh2 * c * c + self.sinh2 * s * s + self.constant
    }
}

/// Term-by-term expansion of the `ω̃ = 1` effective potential for
/// `a = cosh qx`, `b = κq sinh qx`.
///
/// Each term of the potential is proportional to `cosh²`, `sinh²` or 1:
/// `aa″ = q²cosh²`, `a′² = q²sinh²`, `a′b = κq²sinh²`, `b² = κ²q²sinh²`,
/// `ab′ = κq²cosh²`.
pub fn solitonic_veff_expansion(q: f64, kappa: f64, alpha: f64, beta: f64) -> HyperbolicQuadratic {
    let s = alpha + beta;
    let d2 = (alpha - beta) * (alpha - beta);
    let k = 1.0 + 2.0 * s + d2;
    let q2 = q * q;
    let mut acc = HyperbolicQuadratic { cosh2: 0.0, sinh2: 0.0, constant: 0.0 };
    acc.cosh2 += 0.5 * s * q2; // ½(α+β) a a″
    acc.sinh2 += (0.5 * s + 0.25 * d2) * q2; // [½(α+β) + ¼(α−β)²] a′²
    acc.sinh2 -= k * kappa * q2; // −K a′b
    acc.sinh2 += k * kappa * kappa * q2; // K b²
    acc.cosh2 -= (s + 1.0) * kappa * q2; // −(α+β+1) a b′
    acc.constant += 0.5 * (s + 1.0);
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolitonicClosedForm {
    pub q: f64,
    pub kappa: f64,
    /// Reduced parameters `α/ω̃`, `β/ω̃`.
    pub alpha: f64,
    pub beta: f64,
    /// Energy scale `ω̃`.
    pub scale: f64,
    pub delta: f64,
    pub lambda: f64,
    /// Constant of `V_eff = q²(Δ−1) cosh² qx + V₀` (at unit scale).
    pub v0: f64,
    /// `¼q²(2λ+1)(2λ−3)`.
    pub cosh2_coefficient: f64,
}

/// `Δ = (κ−1)² + (κ−1)(2κ−1)(α+β) + (κ−½)²(α−β)²`.
pub fn solitonic_delta(kappa: f64, alpha: f64, beta: f64) -> f64 {
    (kappa - 1.0).powi(2)
        + (kappa - 1.0) * (2.0 * kappa - 1.0) * (alpha + beta)
        + (kappa - 0.5).powi(2) * (alpha - beta).powi(2)
}

/// Closed form for `ω̃ = 1`.
pub fn solitonic_data(q: f64, kappa: f64, alpha: f64, beta: f64) -> Result<SolitonicClosedForm> {
    build_solitonic(q, kappa, alpha, beta, 1.0)
}

impl SolitonicClosedForm {
    /// Closed form for arbitrary `ω̃` through the reduced parameters.
    pub fn for_params(q: f64, kappa: f64, params: &ModelParams) -> Result<Self> {
        let (alpha, beta) = params.reduced();
        build_solitonic(q, kappa, alpha, beta, params.omega_tilde())
    }

    /// `E_n = ω̃ [q²(n+λ−½)(n+λ+½) + V₀]`.
    pub fn energy(&self, n: usize) -> f64 {
        let nf = n as f64;
        self.scale
            * (self.q * self.q * (nf + self.lambda - 0.5) * (nf + self.lambda + 0.5) + self.v0)
    }

    /// Unnormalized `χ_n = (sech qx)^(λ+½) C_n^(λ)(tanh qx)`.
    pub fn wavefunction(&self, n: usize, x: f64) -> Result<f64> {
        if n > MAX_GEGENBAUER_DEGREE {
            return Err(Error::invalid("n", format!("level {n} exceeds {MAX_GEGENBAUER_DEGREE}")));
        }
        let qx = self.q * x;
        // sech^(λ+½) via logs so that large |x| underflows to 0 cleanly
        let log_sech = -crate::profiles::ln_cosh(qx);
        Ok(((self.lambda + 0.5) * log_sech).exp() * gegenbauer(n, self.lambda, qx.tanh()))
    }

    /// `φ_n = ρ̃⁻¹ χ_n`, an eigenfunction of the non-Hermitian operator.
    pub fn transformed_wavefunction(
        &self,
        profile: &Profile,
        params: &ModelParams,
        n: usize,
        x: f64,
    ) -> Result<f64> {
        Ok(self.wavefunction(n, x)? / model::rho_tilde(profile, params, x)?)
    }

    /// `V₀` from the closed-form expression
    /// `q²[−½(α+β) − ¼(α−β)² + Kκ(1−κ)] + ½(α+β+1)`.
    pub fn v0_formula(&self) -> f64 {
        let (s, d2) = (self.alpha + self.beta, (self.alpha - self.beta).powi(2));
        let k = 1.0 + 2.0 * s + d2;
        self.q * self.q * (-0.5 * s - 0.25 * d2 + k * self.kappa * (1.0 - self.kappa))
            + 0.5 * (s + 1.0)
    }
}

fn build_solitonic(
    q: f64,
    kappa: f64,
    alpha: f64,
    beta: f64,
    scale: f64,
) -> Result<SolitonicClosedForm> {
    if !(q > 0.0) {
        return Err(Error::invalid("q", format!("must be positive, got {q}")));
    }
    if !(kappa > 0.5) {
        return Err(Error::invalid("kappa", format!("must exceed 1/2, got {kappa}")));
    }
    let delta = solitonic_delta(kappa, alpha, beta);
    if !(delta > 0.0) {
        return Err(Error::ComplexLambda(delta));
    }
    let lambda = 0.5 + delta.sqrt();
    let expansion = solitonic_veff_expansion(q, kappa, alpha, beta).in_cosh2();
    let cosh2_coefficient = 0.25 * q * q * (2.0 * lambda + 1.0) * (2.0 * lambda - 3.0);
    let mismatch = (expansion.cosh2 - q * q * (delta - 1.0)).abs();
    if mismatch > 1e-12 * (1.0 + expansion.cosh2.abs()) {
        return Err(Error::invalid(
            "kappa",
            format!("cosh^2 coefficient of the expansion disagrees with q^2(Delta-1) by {mismatch:e}"),
        ));
    }
    Ok(SolitonicClosedForm {
        q,
        kappa,
        alpha,
        beta,
        scale,
        delta,
        lambda,
        v0: expansion.constant,
        cosh2_coefficient,
    })
}

fn morse_shift(p: f64, mu: f64, x: f64) -> f64 {
    -(-p * x).exp() / (2.0 * p) + mu
}

fn check_p(p: f64) -> Result<()> {
    if p == 0.0 || !p.is_finite() {
        return Err(Error::invalid("p", format!("must be nonzero and finite, got {p}")));
    }
    Ok(())
}

/// `V_eff = −¾p²e^(2px) + K(−e^(−px)/(2p) + μ)²` (at `ω̃ = 1`).
pub fn morse_veff(p: f64, mu: f64, alpha: f64, beta: f64, x: f64) -> Result<f64> {
    check_p(p)?;
    let k = 1.0 + 2.0 * (alpha + beta) + (alpha - beta).powi(2);
    let g = morse_shift(p, mu, x);
    Ok(-0.75 * p * p * (2.0 * p * x).exp() + k * g * g)
}

/// `ρ̃ = exp[−(α−β)(−e^(−px)/(2p) + μ)²]` (at `ω̃ = 1`, natural antiderivative).
pub fn morse_rho(p: f64, mu: f64, alpha: f64, beta: f64, x: f64) -> Result<f64> {
    check_p(p)?;
    let g = morse_shift(p, mu, x);
    Ok((-(alpha - beta) * g * g).exp())
}

/// `V_eff = ½g‴/g′³ − (5/4)g″²/g′⁴ + K(½g + μ)²` for the canonical `b`
/// built on the profile's generator (at `ω̃ = 1`).
pub fn veff_from_g(profile: &Profile, mu: f64, alpha: f64, beta: f64, x: f64) -> Result<f64> {
    let g = profile.generator(x);
    if !(g.g1.is_finite() && g.g1 != 0.0) {
        return Err(Error::SingularGenerator { x });
    }
    let k = 1.0 + 2.0 * (alpha + beta) + (alpha - beta).powi(2);
    let shift = 0.5 * g.g + mu;
    Ok(0.5 * g.g3 / g.g1.powi(3) - 1.25 * g.g2 * g.g2 / g.g1.powi(4) + k * shift * shift)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// `β = 0`: `b₁ = (1+α)b − ½αa′`, `ξ = ½(1+α)`.
    BetaZero,
    /// `α = 0`: `b₁ = (1+β)b − ½βa′`, `ξ = ½(1+β)`.
    AlphaZero,
}

/// `V_eff = ω̃[b₁² − (ab₁)′] + ξ` with `b₁ = d₁b + d₂a′`; the intertwiner is
/// `η₁ = √ω̃ (a d/dx + b₁)`.
///
/// At `ω̃ = 1` the coefficients are `d₁ = 1 + α`, `d₂ = −α/2`, `ξ = ½(1+α)`
/// on the `β = 0` branch and the mirror image on the other.
#[derive(Debug, Clone)]
pub struct FactorizationData {
    pub branch: Branch,
    pub d1: f64,
    pub d2: f64,
    pub xi: f64,
    pub scale: f64,
    profile: Profile,
}

const BRANCH_TOL: f64 = 1e-14;

pub fn factorize(profile: &Profile, params: &ModelParams) -> Result<FactorizationData> {
    let (alpha, beta) = params.reduced();
    let branch = if params.beta.abs() <= BRANCH_TOL {
        Branch::BetaZero
    } else if params.alpha.abs() <= BRANCH_TOL {
        Branch::AlphaZero
    } else {
        return Err(Error::NotFactorizable { alpha: params.alpha, beta: params.beta });
    };
    let c = match branch {
        Branch::BetaZero => alpha,
        Branch::AlphaZero => beta,
    };
    let scale = params.omega_tilde();
    Ok(FactorizationData {
        branch,
        d1: 1.0 + c,
        d2: -0.5 * c,
        xi: 0.5 * scale * (1.0 + c),
        scale,
        profile: profile.clone(),
    })
}

impl FactorizationData {
    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    /// `(b₁, b₁′)`.
    pub fn b1(&self, x: f64) -> Jet1 {
        let a = self.profile.a_jet(x);
        let b = self.profile.b_jet(x);
        Jet1 {
            value: self.d1 * b.value + self.d2 * a.d1,
            d1: self.d1 * b.d1 + self.d2 * a.d2,
        }
    }

    /// `ω̃[b₁² − (ab₁)′] + ξ`.
    pub fn potential(&self, x: f64) -> f64 {
        let a = self.profile.a_jet(x);
        let b1 = self.b1(x);
        self.scale * (b1.value * b1.value - (a.d1 * b1.value + a.value * b1.d1)) + self.xi
    }
}
