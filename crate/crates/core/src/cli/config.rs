//! Line-based run configuration: `section.key = value`, `#` comments.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::discrete::Grid;
use crate::error::Error;
use crate::model::ModelParams;
use crate::profiles::{
    canonical_from_amplitude, make_custom, make_harmonic, make_morse, make_solitonic, Amplitude,
    ExprJet, Profile,
};

const KNOWN_KEYS: &[&str] = &[
    "model.omega",
    "model.alpha",
    "model.beta",
    "profile.family",
    "profile.q",
    "profile.kappa",
    "profile.p",
    "profile.mu",
    "profile.expr_a",
    "profile.expr_b",
    "grid.x_min",
    "grid.x_max",
    "grid.n",
    "job",
    "k",
    "sweep.param",
    "sweep.start",
    "sweep.stop",
    "sweep.steps",
    "output.dir",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
    /// Kind of the underlying model error, if any.
    pub kind: &'static str,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        ConfigError { line: Some(line), key: None, message: message.into(), kind: "parse" }
    }

    fn key(key: &str, line: Option<usize>, message: impl Into<String>) -> Self {
        ConfigError { line, key: Some(key.to_string()), message: message.into(), kind: "validation" }
    }

    fn model(key: &str, line: Option<usize>, err: Error) -> Self {
        ConfigError { line, key: Some(key.to_string()), message: err.to_string(), kind: err.kind() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.key) {
            (Some(l), Some(k)) => write!(f, "line {l}, {k}: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "{k}: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Job {
    Veff,
    Metric,
    Spectrum,
    Verify,
    Sweep,
}

impl FromStr for Job {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "veff" => Ok(Job::Veff),
            "metric" => Ok(Job::Metric),
            "spectrum" => Ok(Job::Spectrum),
            "verify" => Ok(Job::Verify),
            "sweep" => Ok(Job::Sweep),
            other => Err(format!("unknown job '{other}' (veff, metric, spectrum, verify, sweep)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Omega,
    Alpha,
    Beta,
    Q,
    Kappa,
    P,
    Mu,
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "omega" => Ok(SweepParam::Omega),
            "alpha" => Ok(SweepParam::Alpha),
            "beta" => Ok(SweepParam::Beta),
            "q" => Ok(SweepParam::Q),
            "kappa" => Ok(SweepParam::Kappa),
            "p" => Ok(SweepParam::P),
            "mu" => Ok(SweepParam::Mu),
            other => Err(format!("cannot sweep '{other}' (omega, alpha, beta, q, kappa, p, mu)")),
        }
    }
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Omega => "omega",
            SweepParam::Alpha => "alpha",
            SweepParam::Beta => "beta",
            SweepParam::Q => "q",
            SweepParam::Kappa => "kappa",
            SweepParam::P => "p",
            SweepParam::Mu => "mu",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    /// `steps` evenly spaced values from `start` to `stop` inclusive.
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let d = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.stop } else { self.start + i as f64 * d })
            .collect()
    }
}

/// Profile description as written in the config.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    Harmonic,
    Solitonic { q: f64, kappa: f64 },
    Morse { p: f64, mu: f64 },
    /// `a` from an expression, `b` from `[η, η†] = 1`.
    Canonical { expr_a: String, mu: f64 },
    Custom { expr_a: String, expr_b: String },
}

impl ProfileSpec {
    pub fn build(&self) -> crate::Result<Profile> {
        match self {
            ProfileSpec::Harmonic => Ok(make_harmonic()),
            ProfileSpec::Solitonic { kappa, .. } if !(*kappa > 0.5) => {
                Err(Error::InvalidParameter { name: "kappa", reason: format!("must exceed 1/2, got {kappa}") })
            }
            ProfileSpec::Solitonic { q, kappa } => make_solitonic(*q, *kappa),
            ProfileSpec::Morse { p, mu } => make_morse(*p, *mu),
            ProfileSpec::Canonical { expr_a, mu } => canonical_from_amplitude(
                Amplitude::Expr(Box::new(ExprJet::parse(expr_a)?)),
                *mu,
            ),
            ProfileSpec::Custom { expr_a, expr_b } => make_custom(expr_a, expr_b),
        }
    }

    /// Copy with one family parameter replaced.
    pub fn with(&self, param: SweepParam, value: f64) -> Option<Self> {
        let mut out = self.clone();
        match (&mut out, param) {
            (ProfileSpec::Solitonic { q, .. }, SweepParam::Q) => *q = value,
            (ProfileSpec::Solitonic { kappa, .. }, SweepParam::Kappa) => *kappa = value,
            (ProfileSpec::Morse { p, .. }, SweepParam::P) => *p = value,
            (ProfileSpec::Morse { mu, .. }, SweepParam::Mu)
            | (ProfileSpec::Canonical { mu, .. }, SweepParam::Mu) => *mu = value,
            _ => return None,
        }
        Some(out)
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ModelParams,
    pub profile_spec: ProfileSpec,
    pub profile: Profile,
    pub grid: Grid,
    pub job: Job,
    pub k: Option<usize>,
    pub sweep: Option<SweepSpec>,
    pub output_dir: Option<PathBuf>,
}

struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn line(&self, key: &str) -> Option<usize> {
        self.map.get(key).map(|(l, _)| *l)
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|(_, v)| v.as_str())
    }

    fn require_raw(&self, key: &str, why: &str) -> Result<&str, ConfigError> {
        self.raw(key).ok_or_else(|| ConfigError::key(key, None, format!("required {why}")))
    }

    fn parse<T: FromStr>(&self, key: &str, what: &str) -> Result<Option<T>, ConfigError> {
        match self.map.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| ConfigError::key(key, Some(*line), format!("expected {what}, got '{v}'"))),
        }
    }

    fn decimal(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let v = self.parse::<f64>(key, "a decimal number")?;
        if let Some(x) = v {
            if !x.is_finite() {
                return Err(ConfigError::key(key, self.line(key), "must be finite"));
            }
        }
        Ok(v)
    }

    fn require_decimal(&self, key: &str, why: &str) -> Result<f64, ConfigError> {
        self.decimal(key)?.ok_or_else(|| ConfigError::key(key, None, format!("required {why}")))
    }

    fn reject(&self, keys: &[&str], why: &str) -> Result<(), ConfigError> {
        for key in keys {
            if let Some(line) = self.line(key) {
                return Err(ConfigError::key(key, Some(line), format!("not used {why}")));
            }
        }
        Ok(())
    }
}

fn tokenize(text: &str) -> Result<Entries, ConfigError> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::at(line, format!("expected 'key = value', got '{content}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(ConfigError::at(line, "missing key"));
        }
        if !KNOWN_KEYS.contains(&key) {
            return Err(ConfigError { kind: "parse", ..ConfigError::key(key, Some(line), "unknown key") });
        }
        if value.is_empty() {
            return Err(ConfigError::key(key, Some(line), "missing value"));
        }
        if let Some((first, _)) = map.get(key) {
            return Err(ConfigError::key(key, Some(line), format!("duplicate key (first set on line {first})")));
        }
        map.insert(key.to_string(), (line, value.to_string()));
    }
    Ok(Entries { map })
}

fn profile_spec(e: &Entries) -> Result<ProfileSpec, ConfigError> {
    let family = e.require_raw("profile.family", "to select the ladder-operator profile")?;
    let all = ["profile.q", "profile.kappa", "profile.p", "profile.mu", "profile.expr_a", "profile.expr_b"];
    let unused = |keep: &[&str]| -> Vec<&str> { all.iter().copied().filter(|k| !keep.contains(k)).collect() };
    let why = format!("by profile.family = {family}");
    let spec = match family {
        "harmonic" => {
            e.reject(&unused(&[]), &why)?;
            ProfileSpec::Harmonic
        }
        "solitonic" => {
            e.reject(&unused(&["profile.q", "profile.kappa"]), &why)?;
            ProfileSpec::Solitonic {
                q: e.require_decimal("profile.q", "by the solitonic family")?,
                kappa: e.require_decimal("profile.kappa", "by the solitonic family")?,
            }
        }
        "morse" => {
            e.reject(&unused(&["profile.p", "profile.mu"]), &why)?;
            ProfileSpec::Morse {
                p: e.require_decimal("profile.p", "by the morse family")?,
                mu: e.decimal("profile.mu")?.unwrap_or(0.0),
            }
        }
        "canonical" => {
            e.reject(&unused(&["profile.expr_a", "profile.mu"]), &why)?;
            ProfileSpec::Canonical {
                expr_a: e.require_raw("profile.expr_a", "by the canonical family")?.to_string(),
                mu: e.decimal("profile.mu")?.unwrap_or(0.0),
            }
        }
        "custom" => {
            e.reject(&unused(&["profile.expr_a", "profile.expr_b"]), &why)?;
            ProfileSpec::Custom {
                expr_a: e.require_raw("profile.expr_a", "by the custom family")?.to_string(),
                expr_b: e.require_raw("profile.expr_b", "by the custom family")?.to_string(),
            }
        }
        other => {
            return Err(ConfigError::key(
                "profile.family",
                e.line("profile.family"),
                format!("unknown family '{other}' (harmonic, solitonic, morse, canonical, custom)"),
            ))
        }
    };
    Ok(spec)
}

/// The config key responsible for a profile construction error.
fn profile_error_key(spec: &ProfileSpec, err: &Error) -> &'static str {
    match (spec, err) {
        (_, Error::InvalidParameter { name: "q", .. }) => "profile.q",
        (_, Error::InvalidParameter { name: "kappa", .. }) => "profile.kappa",
        (_, Error::InvalidParameter { name: "p", .. }) => "profile.p",
        (_, Error::InvalidParameter { name: "mu", .. }) => "profile.mu",
        (ProfileSpec::Custom { .. }, Error::Expression { .. }) => "profile.expr_a",
        _ => "profile.family",
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let e = tokenize(text)?;

    let job = match e.raw("job") {
        None => return Err(ConfigError::key("job", None, "required (veff, metric, spectrum, verify, sweep)")),
        Some(v) => v.parse::<Job>().map_err(|m| ConfigError::key("job", e.line("job"), m))?,
    };

    let why = "to define the model";
    let omega = e.require_decimal("model.omega", why)?;
    let alpha = e.require_decimal("model.alpha", why)?;
    let beta = e.require_decimal("model.beta", why)?;
    let params = ModelParams::new(omega, alpha, beta)
        .map_err(|err| ConfigError::model("model.omega", e.line("model.omega"), err))?;

    let profile_spec = profile_spec(&e)?;
    let profile = match &profile_spec {
        ProfileSpec::Custom { expr_a, expr_b } => {
            // attribute expression errors to the right column
            ExprJet::parse(expr_a)
                .map_err(|err| ConfigError::model("profile.expr_a", e.line("profile.expr_a"), err))?;
            ExprJet::parse(expr_b)
                .map_err(|err| ConfigError::model("profile.expr_b", e.line("profile.expr_b"), err))?;
            profile_spec.build()
        }
        _ => profile_spec.build(),
    }
    .map_err(|err| {
        let key = profile_error_key(&profile_spec, &err);
        ConfigError::model(key, e.line(key), err)
    })?;

    let why = "to define the grid";
    let x_min = e.require_decimal("grid.x_min", why)?;
    let x_max = e.require_decimal("grid.x_max", why)?;
    let n = e
        .parse::<usize>("grid.n", "a nonnegative integer")?
        .ok_or_else(|| ConfigError::key("grid.n", None, format!("required {why}")))?;
    let grid = Grid::new(x_min, x_max, n).map_err(|err| {
        let key = if n < crate::discrete::MIN_NODES { "grid.n" } else { "grid.x_max" };
        ConfigError::model(key, e.line(key), err)
    })?;

    let k = e.parse::<usize>("k", "a positive integer")?;
    if k == Some(0) {
        return Err(ConfigError::key("k", e.line("k"), "must be at least 1"));
    }
    match job {
        Job::Spectrum | Job::Verify if k.is_none() => {
            return Err(ConfigError::key("k", None, "required by spectrum and verify jobs"))
        }
        _ => {}
    }
    if let Some(k) = k {
        if k > grid.n {
            return Err(ConfigError::key("k", e.line("k"), format!("exceeds grid.n = {}", grid.n)));
        }
    }

    let sweep_keys = ["sweep.param", "sweep.start", "sweep.stop", "sweep.steps"];
    let sweep = if job == Job::Sweep {
        let why = "by the sweep job";
        let param = e
            .require_raw("sweep.param", why)?
            .parse::<SweepParam>()
            .map_err(|m| ConfigError::key("sweep.param", e.line("sweep.param"), m))?;
        let steps = e
            .parse::<usize>("sweep.steps", "a positive integer")?
            .ok_or_else(|| ConfigError::key("sweep.steps", None, format!("required {why}")))?;
        if steps == 0 {
            return Err(ConfigError::key("sweep.steps", e.line("sweep.steps"), "must be at least 1"));
        }
        let spec = SweepSpec {
            param,
            start: e.require_decimal("sweep.start", why)?,
            stop: e.require_decimal("sweep.stop", why)?,
            steps,
        };
        let is_model = matches!(param, SweepParam::Omega | SweepParam::Alpha | SweepParam::Beta);
        if !is_model && profile_spec.with(param, 0.0).is_none() {
            return Err(ConfigError::key(
                "sweep.param",
                e.line("sweep.param"),
                format!("'{}' is not a parameter of this profile family", param.name()),
            ));
        }
        Some(spec)
    } else {
        e.reject(&sweep_keys, "outside the sweep job")?;
        None
    };

    let output_dir = e.raw("output.dir").map(PathBuf::from);

    Ok(RunConfig { params, profile_spec, profile, grid, job, k, sweep, output_dir })
}
