//! Mass profiles m(x), the coordinate map mu(x) = ∫ sqrt(m) dx and its range
//! classification.
//!
//! Natural units throughout (m0 = hbar = 1); `m` is dimensionless.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, LN_2, PI, SQRT_2};
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GhoError, Result};
use crate::quadrature;

/// Working bound stored for a conceptually infinite side of the real line.
pub const DEFAULT_INFINITE_EDGE: f64 = 40.0;
/// Working left cutoff for `PowerLaw` masses, whose conceptual domain is (0, ∞).
pub const POWER_LAW_CUTOFF: f64 = 1e-6;
/// Number of points used to check positivity of m on construction.
pub const POSITIVITY_SAMPLES: usize = 1024;
/// Minimum number of rows in a sampled custom profile.
pub const MIN_PROFILE_SAMPLES: usize = 16;
/// Absolute tolerance of the numeric mu integral for custom profiles.
pub const MU_QUADRATURE_TOL: f64 = 1e-10;

const EXPONENTIAL_WARNING: &str =
    "orthogonality of the eigenstates requires a<0 for x<0 and a>0 for x>0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MassKind {
    Constant,
    RationalSquare,
    Exponential,
    TanhShift,
    PowerLaw,
    SechSquare,
    LorentzSquare,
    Custom,
}

impl MassKind {
    /// Every kind with a closed-form profile, in catalog order.
    pub const CATALOG: [MassKind; 7] = [
        MassKind::Constant,
        MassKind::RationalSquare,
        MassKind::Exponential,
        MassKind::TanhShift,
        MassKind::PowerLaw,
        MassKind::SechSquare,
        MassKind::LorentzSquare,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            MassKind::Constant => "constant",
            MassKind::RationalSquare => "rational-square",
            MassKind::Exponential => "exponential",
            MassKind::TanhShift => "tanh-shift",
            MassKind::PowerLaw => "power-law",
            MassKind::SechSquare => "sech-square",
            MassKind::LorentzSquare => "lorentz-square",
            MassKind::Custom => "custom",
        }
    }

    pub fn from_slug(s: &str) -> Option<MassKind> {
        MassKind::CATALOG
            .iter()
            .copied()
            .chain([MassKind::Custom])
            .find(|kind| kind.slug() == s)
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            MassKind::Constant | MassKind::Custom => &[],
            MassKind::LorentzSquare => &["a", "q"],
            _ => &["a"],
        }
    }

    /// Human-readable formula of m(x).
    pub fn formula(self) -> &'static str {
        match self {
            MassKind::Constant => "1",
            MassKind::RationalSquare => "((a+x^2)/(1+x^2))^2",
            MassKind::Exponential => "exp(a x)",
            MassKind::TanhShift => "1+tanh(a x)",
            MassKind::PowerLaw => "x^a",
            MassKind::SechSquare => "sech^2(a x)",
            MassKind::LorentzSquare => "a^2/(q+x^2)^2",
            MassKind::Custom => "sampled or user rule",
        }
    }
}

impl fmt::Display for MassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

/// Closed interval of working abscissae. An `open` side means the conceptual
/// domain continues past the stored bound (to ±∞, or to 0⁺ for power laws).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Domain {
    pub fn real_line() -> Self {
        Domain {
            lo: -DEFAULT_INFINITE_EDGE,
            hi: DEFAULT_INFINITE_EDGE,
            lo_open: true,
            hi_open: true,
        }
    }

    pub fn positive_axis() -> Self {
        Domain {
            lo: POWER_LAW_CUTOFF,
            hi: DEFAULT_INFINITE_EDGE,
            lo_open: true,
            hi_open: true,
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Domain {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn check(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo >= self.hi {
            return Err(GhoError::InvalidDomain(format!(
                "[{}, {}] is not a nonempty finite interval",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    pub(crate) fn require(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(GhoError::OutOfDomain {
                x,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }
}

/// Tabulated m(x) samples interpolated by piecewise cubic Hermite segments
/// with three-point slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledProfile {
    xs: Vec<f64>,
    ms: Vec<f64>,
    slopes: Vec<f64>,
}

impl SampledProfile {
    pub fn new(xs: Vec<f64>, ms: Vec<f64>) -> Result<Self> {
        if xs.len() != ms.len() {
            return Err(GhoError::InvalidProfile(format!(
                "{} abscissae but {} mass values",
                xs.len(),
                ms.len()
            )));
        }
        if xs.len() < MIN_PROFILE_SAMPLES {
            return Err(GhoError::InvalidProfile(format!(
                "need at least {MIN_PROFILE_SAMPLES} samples, got {}",
                xs.len()
            )));
        }
        if let Some(bad) = xs.iter().chain(&ms).find(|v| !v.is_finite()) {
            return Err(GhoError::InvalidProfile(format!("non-finite entry {bad}")));
        }
        if let Some(w) = xs.windows(2).find(|w| w[1] <= w[0]) {
            return Err(GhoError::InvalidProfile(format!(
                "x must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        let slopes = three_point_slopes(&xs, &ms);
        Ok(SampledProfile { xs, ms, slopes })
    }

    /// Reads the `x,m` CSV format. Columns after the first two are ignored.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .flexible(false)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() < 2 || &headers[0] != "x" || &headers[1] != "m" {
            return Err(GhoError::InvalidProfile(format!(
                "expected header starting with `x,m`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut xs = Vec::new();
        let mut ms = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            let parse = |col: usize| -> Result<f64> {
                record[col].parse::<f64>().map_err(|e| {
                    GhoError::InvalidProfile(format!("row {}, column {}: {e}", row + 2, col + 1))
                })
            };
            xs.push(parse(0)?);
            ms.push(parse(1)?);
        }
        SampledProfile::new(xs, ms)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        SampledProfile::from_csv_reader(std::io::BufReader::new(file))
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    pub fn samples(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.ms)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let i = match self.xs.partition_point(|&v| v <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ms[i]
            + h10 * h * self.slopes[i]
            + h01 * self.ms[i + 1]
            + h11 * h * self.slopes[i + 1]
    }
}

fn three_point_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = xs[i] - xs[i - 1];
        let h1 = xs[i + 1] - xs[i];
        d[i] = (h0 * h0 * ys[i + 1] - h1 * h1 * ys[i - 1] - (h0 * h0 - h1 * h1) * ys[i])
            / (h0 * h1 * (h0 + h1));
    }
    let (h0, h1) = (xs[1] - xs[0], xs[2] - xs[1]);
    d[0] = -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * ys[0] + (h0 + h1) / (h0 * h1) * ys[1]
        - h0 / (h1 * (h0 + h1)) * ys[2];
    let (h0, h1) = (xs[n - 2] - xs[n - 3], xs[n - 1] - xs[n - 2]);
    d[n - 1] = h1 / (h0 * (h0 + h1)) * ys[n - 3] - (h0 + h1) / (h0 * h1) * ys[n - 2]
        + (2.0 * h1 + h0) / (h1 * (h0 + h1)) * ys[n - 1];
    d
}

pub type MassRule = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied profile for `MassKind::Custom`.
#[derive(Clone)]
pub enum MassProfile {
    Table(SampledProfile),
    Rule(MassRule),
}

impl MassProfile {
    pub fn rule<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        MassProfile::Rule(Arc::new(f))
    }

    fn eval(&self, x: f64) -> f64 {
        match self {
            MassProfile::Table(t) => t.eval(x),
            MassProfile::Rule(f) => f(x),
        }
    }
}

impl fmt::Debug for MassProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MassProfile::Table(t) => f.debug_tuple("Table").field(&t.xs.len()).finish(),
            MassProfile::Rule(_) => f.write_str("Rule(..)"),
        }
    }
}

#[derive(Debug, Clone)]
#[allow(clippy::enum_variant_names)]
enum Law {
    Constant,
    RationalSquare { a: f64 },
    Exponential { a: f64 },
    TanhShift { a: f64 },
    PowerLaw { a: f64 },
    SechSquare { a: f64 },
    LorentzSquare { a: f64, q: f64 },
    Custom(MassProfile),
}

/// m(x) together with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassDerivatives {
    pub m: f64,
    pub dm: f64,
    pub d2m: f64,
}

/// A validated positive mass profile on its working domain.
#[derive(Debug, Clone)]
pub struct MassSpec {
    kind: MassKind,
    law: Law,
    params: BTreeMap<String, f64>,
    domain: Domain,
    warnings: Vec<String>,
}

fn lookup(params: &[(&str, f64)], name: &'static str) -> Result<f64> {
    let v = params
        .iter()
        .find(|(k, _)| *k == name)
        .map(|(_, v)| *v)
        .ok_or(GhoError::MissingParam(name))?;
    if !v.is_finite() {
        return Err(GhoError::InvalidParam {
            name: name.into(),
            reason: format!("{v} is not finite"),
        });
    }
    Ok(v)
}

fn invalid(name: &str, reason: impl Into<String>) -> GhoError {
    GhoError::InvalidParam {
        name: name.into(),
        reason: reason.into(),
    }
}

impl MassSpec {
    /// Builds and validates a mass specification.
    ///
    /// `domain` defaults to the real line (positive axis for `PowerLaw`, the
    /// table range for sampled profiles). Positivity is checked at
    /// [`POSITIVITY_SAMPLES`] evenly spaced abscissae.
    pub fn new(
        kind: MassKind,
        params: &[(&str, f64)],
        domain: Option<Domain>,
        profile: Option<MassProfile>,
    ) -> Result<Self> {
        for (name, _) in params {
            if !kind.param_names().contains(name) {
                return Err(invalid(name, format!("not a parameter of {kind}")));
            }
        }
        if kind != MassKind::Custom && profile.is_some() {
            return Err(GhoError::InvalidProfile(format!(
                "{kind} does not take a custom profile"
            )));
        }
        let mut warnings = Vec::new();
        let law = match kind {
            MassKind::Constant => Law::Constant,
            MassKind::RationalSquare => {
                let a = lookup(params, "a")?;
                if a <= 0.0 {
                    return Err(invalid("a", "rational-square mass requires a > 0"));
                }
                Law::RationalSquare { a }
            }
            MassKind::Exponential => {
                let a = lookup(params, "a")?;
                if a != 0.0 {
                    warnings.push(EXPONENTIAL_WARNING.to_string());
                }
                Law::Exponential { a }
            }
            MassKind::TanhShift => Law::TanhShift {
                a: lookup(params, "a")?,
            },
            MassKind::PowerLaw => Law::PowerLaw {
                a: lookup(params, "a")?,
            },
            MassKind::SechSquare => {
                let a = lookup(params, "a")?;
                if a <= 0.0 {
                    return Err(invalid("a", "sech-square mass requires a > 0"));
                }
                Law::SechSquare { a }
            }
            MassKind::LorentzSquare => {
                let a = lookup(params, "a")?;
                let q = lookup(params, "q")?;
                if q <= 0.0 {
                    return Err(invalid("q", "lorentz-square mass requires q > 0"));
                }
                if a == 0.0 {
                    return Err(invalid("a", "a = 0 gives a vanishing mass"));
                }
                Law::LorentzSquare { a, q }
            }
            MassKind::Custom => Law::Custom(profile.ok_or(GhoError::MissingParam("profile"))?),
        };

        let domain = match (&law, domain) {
            (Law::Custom(MassProfile::Table(t)), d) => {
                let (lo, hi) = t.x_range();
                match d {
                    Some(d) if d.lo < lo || d.hi > hi => {
                        return Err(GhoError::InvalidDomain(format!(
                            "[{}, {}] exceeds the sampled range [{lo}, {hi}]",
                            d.lo, d.hi
                        )))
                    }
                    Some(d) => d,
                    None => Domain::closed(lo, hi),
                }
            }
            (Law::Custom(MassProfile::Rule(_)), None) => {
                return Err(GhoError::InvalidDomain(
                    "a custom mass rule needs an explicit domain".into(),
                ))
            }
            (Law::PowerLaw { .. }, None) => Domain::positive_axis(),
            (_, None) => Domain::real_line(),
            (_, Some(d)) => d,
        };
        domain.check()?;
        if let Law::PowerLaw { a } = law {
            if domain.lo < 0.0 {
                return Err(GhoError::SingularDomain(format!(
                    "x^a needs x >= 0, domain starts at {}",
                    domain.lo
                )));
            }
            if domain.lo == 0.0 && a < 0.0 {
                return Err(GhoError::SingularDomain(format!(
                    "x^{a} is singular at x = 0"
                )));
            }
        }

        let spec = MassSpec {
            kind,
            law,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            domain,
            warnings,
        };
        spec.check_positivity()?;
        Ok(spec)
    }

    pub fn constant() -> Self {
        MassSpec::new(MassKind::Constant, &[], None, None).expect("constant mass is valid")
    }

    pub fn rational_square(a: f64) -> Result<Self> {
        MassSpec::new(MassKind::RationalSquare, &[("a", a)], None, None)
    }

    pub fn exponential(a: f64) -> Result<Self> {
        MassSpec::new(MassKind::Exponential, &[("a", a)], None, None)
    }

    pub fn tanh_shift(a: f64) -> Result<Self> {
        MassSpec::new(MassKind::TanhShift, &[("a", a)], None, None)
    }

    pub fn power_law(a: f64) -> Result<Self> {
        MassSpec::new(MassKind::PowerLaw, &[("a", a)], None, None)
    }

    pub fn sech_square(a: f64) -> Result<Self> {
        MassSpec::new(MassKind::SechSquare, &[("a", a)], None, None)
    }

    pub fn lorentz_square(a: f64, q: f64) -> Result<Self> {
        MassSpec::new(MassKind::LorentzSquare, &[("a", a), ("q", q)], None, None)
    }

    pub fn custom_table(profile: SampledProfile) -> Result<Self> {
        MassSpec::new(
            MassKind::Custom,
            &[],
            None,
            Some(MassProfile::Table(profile)),
        )
    }

    pub fn custom_rule<F>(rule: F, domain: Domain) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        MassSpec::new(
            MassKind::Custom,
            &[],
            Some(domain),
            Some(MassProfile::rule(rule)),
        )
    }

    /// Same law on a different working domain.
    pub fn with_domain(&self, domain: Domain) -> Result<Self> {
        let params: Vec<(&str, f64)> = self
            .kind
            .param_names()
            .iter()
            .map(|&n| (n, self.params[n]))
            .collect();
        let profile = match &self.law {
            Law::Custom(p) => Some(p.clone()),
            _ => None,
        };
        MassSpec::new(self.kind, &params, Some(domain), profile)
    }

    fn check_positivity(&self) -> Result<()> {
        let d = self.domain;
        let steps = POSITIVITY_SAMPLES - 1;
        for i in 0..=steps {
            let x = if i == steps {
                d.hi
            } else {
                d.lo + d.width() * i as f64 / steps as f64
            };
            let m = self.mass_unchecked(x);
            if !(m > 0.0 && m.is_finite()) {
                return Err(GhoError::NonPositiveMass { x, m });
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> MassKind {
        self.kind
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn is_catalog(&self) -> bool {
        !matches!(self.law, Law::Custom(_))
    }

    /// Short identifier such as `rational-square(a=2)`.
    pub fn id(&self) -> String {
        if self.params.is_empty() {
            return self.kind.slug().to_string();
        }
        let args: Vec<String> = self
            .kind
            .param_names()
            .iter()
            .map(|n| format!("{n}={}", self.params[*n]))
            .collect();
        format!("{}({})", self.kind.slug(), args.join(","))
    }

    /// m(x); errors outside the working domain.
    pub fn mass(&self, x: f64) -> Result<f64> {
        self.domain.require(x)?;
        Ok(self.mass_unchecked(x))
    }

    pub(crate) fn mass_unchecked(&self, x: f64) -> f64 {
        match &self.law {
            Law::Constant => 1.0,
            Law::RationalSquare { a } => {
                let r = (a + x * x) / (1.0 + x * x);
                r * r
            }
            Law::Exponential { a } => (a * x).exp(),
            Law::TanhShift { a } => one_plus_tanh(a * x),
            Law::PowerLaw { a } => x.powf(*a),
            Law::SechSquare { a } => {
                let c = (a * x).cosh();
                1.0 / (c * c)
            }
            Law::LorentzSquare { a, q } => {
                let u = q + x * x;
                a * a / (u * u)
            }
            Law::Custom(p) => p.eval(x),
        }
    }

    /// m, m′ and m″ at `x`: analytic for catalog kinds, five-point central
    /// differences for custom profiles.
    pub fn derivatives(&self, x: f64) -> Result<MassDerivatives> {
        self.domain.require(x)?;
        let d = match &self.law {
            Law::Constant => MassDerivatives {
                m: 1.0,
                dm: 0.0,
                d2m: 0.0,
            },
            Law::RationalSquare { a } => {
                let p = 1.0 + x * x;
                let r = (a + x * x) / p;
                let r1 = 2.0 * x * (1.0 - a) / (p * p);
                let r2 = 2.0 * (1.0 - a) * (1.0 - 3.0 * x * x) / (p * p * p);
                MassDerivatives {
                    m: r * r,
                    dm: 2.0 * r * r1,
                    d2m: 2.0 * (r1 * r1 + r * r2),
                }
            }
            Law::Exponential { a } => {
                let e = (a * x).exp();
                MassDerivatives {
                    m: e,
                    dm: a * e,
                    d2m: a * a * e,
                }
            }
            Law::TanhShift { a } => {
                let t = (a * x).tanh();
                let c = (a * x).cosh();
                let s2 = 1.0 / (c * c);
                MassDerivatives {
                    m: one_plus_tanh(a * x),
                    dm: a * s2,
                    d2m: -2.0 * a * a * s2 * t,
                }
            }
            Law::PowerLaw { a } => MassDerivatives {
                m: x.powf(*a),
                dm: a * x.powf(a - 1.0),
                d2m: a * (a - 1.0) * x.powf(a - 2.0),
            },
            Law::SechSquare { a } => {
                let t = (a * x).tanh();
                let c = (a * x).cosh();
                let s2 = 1.0 / (c * c);
                MassDerivatives {
                    m: s2,
                    dm: -2.0 * a * t * s2,
                    d2m: 2.0 * a * a * s2 * (2.0 * t * t - s2),
                }
            }
            Law::LorentzSquare { a, q } => {
                let u = q + x * x;
                let a2 = a * a;
                MassDerivatives {
                    m: a2 / (u * u),
                    dm: -4.0 * a2 * x / (u * u * u),
                    d2m: -4.0 * a2 / (u * u * u) + 24.0 * a2 * x * x / (u * u * u * u),
                }
            }
            Law::Custom(p) => self.stencil_derivatives(p, x)?,
        };
        Ok(d)
    }

    fn stencil_derivatives(&self, p: &MassProfile, x: f64) -> Result<MassDerivatives> {
        let d = self.domain;
        let h = (1e-4 * x.abs().max(1.0))
            .min((x - d.lo) / 2.0)
            .min((d.hi - x) / 2.0);
        if !(h > 0.0) {
            return Err(GhoError::OutOfDomain {
                x,
                lo: d.lo,
                hi: d.hi,
            });
        }
        let f = |k: f64| p.eval(x + k * h);
        let (fm2, fm1, f0, fp1, fp2) = (f(-2.0), f(-1.0), f(0.0), f(1.0), f(2.0));
        let dm = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
        let d2m = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
        if !(dm.is_finite() && d2m.is_finite()) {
            return Err(GhoError::DerivativeFailure { x });
        }
        Ok(MassDerivatives { m: f0, dm, d2m })
    }

    /// Closed-form mu(x) with the catalog's integration constants.
    fn analytic_mu(&self, x: f64) -> Option<f64> {
        let v = match &self.law {
            Law::Constant => x,
            Law::RationalSquare { a } => x + (a - 1.0) * x.atan(),
            Law::Exponential { a } if *a == 0.0 => x,
            Law::Exponential { a } => 2.0 / a * (0.5 * a * x).exp(),
            Law::TanhShift { a } if *a == 0.0 => x,
            Law::TanhShift { a } => {
                let ax = a * x;
                // asinh(e^{ax}) = ln(e^{ax} + sqrt(1 + e^{2ax})), overflow-safe
                let s = if ax > 30.0 {
                    ax + LN_2
                } else {
                    ax.exp().asinh()
                };
                SQRT_2 / a * s
            }
            Law::PowerLaw { a } if *a == -2.0 => x.ln(),
            Law::PowerLaw { a } => 2.0 / (a + 2.0) * x.powf(0.5 * (a + 2.0)),
            Law::SechSquare { a } => 2.0 / a * (a * x).exp().atan(),
            Law::LorentzSquare { a, q } => {
                let sq = q.sqrt();
                a.abs() / sq * (x / sq).atan()
            }
            Law::Custom(_) => return None,
        };
        Some(v)
    }

    /// Limits of mu at the conceptual domain ends, for catalog kinds.
    fn analytic_mu_limits(&self) -> Option<(f64, f64)> {
        let inf = f64::INFINITY;
        let signed = |a: f64| {
            if a > 0.0 {
                (0.0, inf)
            } else if a < 0.0 {
                (-inf, 0.0)
            } else {
                (-inf, inf)
            }
        };
        let lim = match &self.law {
            Law::Constant | Law::RationalSquare { .. } => (-inf, inf),
            Law::Exponential { a } | Law::TanhShift { a } => signed(*a),
            Law::PowerLaw { a } => {
                if *a > -2.0 {
                    (0.0, inf)
                } else if *a == -2.0 {
                    (-inf, inf)
                } else {
                    (-inf, 0.0)
                }
            }
            Law::SechSquare { a } => (0.0, PI / a),
            Law::LorentzSquare { a, q } => {
                let r = a.abs() / q.sqrt() * FRAC_PI_2;
                (-r, r)
            }
            Law::Custom(_) => return None,
        };
        Some(lim)
    }

    /// Printed closed form of the effective potential under the
    /// beta = -1/2, alpha = gamma = -1/4 ordering, where the catalog has one.
    pub fn closed_form_effective_potential(&self, x: f64) -> Result<Option<f64>> {
        self.domain.require(x)?;
        let mu = match self.analytic_mu(x) {
            Some(mu) => mu,
            None => return Ok(None),
        };
        let v = 0.5 * mu * mu;
        let veff = match &self.law {
            Law::Constant => v,
            Law::RationalSquare { a } => {
                let x2 = x * x;
                let den = (a + x2).powi(4);
                v + 0.5 * (a - 1.0) * (3.0 * x2 * x2 + (4.0 - 2.0 * a) * x2 - a) / den
            }
            Law::Exponential { a } => v - 3.0 * a * a / 32.0 * (-a * x).exp(),
            Law::TanhShift { a } if *a == 0.0 => v,
            Law::TanhShift { a } => {
                let e = (2.0 * a * x).exp();
                v - a * a / 16.0 * (4.0 + 3.0 / e) / (e + 1.0)
            }
            Law::PowerLaw { a } => v - a * (3.0 * a + 4.0) / 32.0 * x.powf(-(a + 2.0)),
            Law::SechSquare { a } => v - a * a / 16.0 * (3.0 * (2.0 * a * x).cosh() + 1.0),
            Law::LorentzSquare { a, q } => {
                let at = (x / q.sqrt()).atan();
                a * a / (2.0 * q) * at * at - q / (2.0 * a * a) - x * x / (a * a)
            }
            Law::Custom(_) => unreachable!(),
        };
        Ok(Some(veff))
    }
}

fn one_plus_tanh(y: f64) -> f64 {
    if y < 0.0 {
        let e = (2.0 * y).exp();
        2.0 * e / (1.0 + e)
    } else {
        1.0 + y.tanh()
    }
}

/// Image of the domain under mu.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RangeClass {
    /// mu_min = -∞, mu_max = +∞
    FullLine,
    /// mu_min = 0, mu_max = +∞
    HalfLine,
    Bounded,
}

impl RangeClass {
    /// Only a full-line range yields an orthonormal eigenfamily.
    pub fn admits_orthonormal_family(self) -> bool {
        matches!(self, RangeClass::FullLine)
    }
}

impl fmt::Display for RangeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RangeClass::FullLine => "FullLine",
            RangeClass::HalfLine => "HalfLine",
            RangeClass::Bounded => "Bounded",
        };
        f.write_str(s)
    }
}

pub fn admissible_for_orthonormal_family(rc: RangeClass) -> bool {
    rc.admits_orthonormal_family()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeThresholds {
    /// |mu| at or beyond this counts as infinite.
    pub infinite: f64,
    /// |mu_min| below this counts as zero.
    pub zero: f64,
}

impl Default for RangeThresholds {
    fn default() -> Self {
        RangeThresholds {
            infinite: 25.0,
            zero: 1e-8,
        }
    }
}

/// The coordinate map mu(x) = ∫ sqrt(m(x)) dx for one mass spec.
#[derive(Debug, Clone)]
pub struct MuMap {
    spec: MassSpec,
    mu_min: f64,
    mu_max: f64,
    analytic: bool,
    origin: Option<f64>,
}

impl MuMap {
    /// Builds the map for `spec`.
    ///
    /// Catalog kinds use their printed antiderivatives and ignore `origin`.
    /// Custom profiles are integrated numerically with mu(origin) = 0;
    /// `origin` defaults to 0, or to the left domain edge when 0 is outside.
    pub fn new(spec: &MassSpec, origin: Option<f64>) -> Result<Self> {
        let d = spec.domain();
        if let Some(o) = origin {
            d.require(o)?;
        }
        if let Some((lim_lo, lim_hi)) = spec.analytic_mu_limits() {
            let mu_min = if d.lo_open {
                lim_lo
            } else {
                spec.analytic_mu(d.lo).expect("catalog")
            };
            let mu_max = if d.hi_open {
                lim_hi
            } else {
                spec.analytic_mu(d.hi).expect("catalog")
            };
            let origin = catalog_zero(spec);
            return Ok(MuMap {
                spec: spec.clone(),
                mu_min,
                mu_max,
                analytic: true,
                origin,
            });
        }
        let origin = origin.unwrap_or(if d.contains(0.0) { 0.0 } else { d.lo });
        let mut map = MuMap {
            spec: spec.clone(),
            mu_min: 0.0,
            mu_max: 0.0,
            analytic: false,
            origin: Some(origin),
        };
        map.mu_min = map.mu(d.lo)?;
        map.mu_max = map.mu(d.hi)?;
        Ok(map)
    }

    pub fn spec(&self) -> &MassSpec {
        &self.spec
    }

    pub fn mu_min(&self) -> f64 {
        self.mu_min
    }

    pub fn mu_max(&self) -> f64 {
        self.mu_max
    }

    pub fn is_analytic(&self) -> bool {
        self.analytic
    }

    /// Abscissa where mu vanishes, if there is one.
    pub fn integration_origin(&self) -> Option<f64> {
        self.origin
    }

    pub fn mu(&self, x: f64) -> Result<f64> {
        self.spec.domain.require(x)?;
        if let Some(v) = self.spec.analytic_mu(x) {
            return Ok(v);
        }
        let origin = self.origin.expect("custom maps carry an origin");
        quadrature::integrate(
            |t| self.spec.mass_unchecked(t).sqrt(),
            origin,
            x,
            MU_QUADRATURE_TOL,
        )
    }

    /// dmu/dx = sqrt(m(x)).
    pub fn dmu(&self, x: f64) -> Result<f64> {
        Ok(self.spec.mass(x)?.sqrt())
    }

    /// Inverse of mu by bisection on the working domain.
    pub fn inverse(&self, target: f64) -> Result<f64> {
        let d = self.spec.domain;
        let (mut lo, mut hi) = (d.lo, d.hi);
        if target <= self.mu(lo)? {
            return Ok(lo);
        }
        if target >= self.mu(hi)? {
            return Ok(hi);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.mu(mid)? < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn classify(&self) -> RangeClass {
        classify_range_with(self, RangeThresholds::default())
    }
}

fn catalog_zero(spec: &MassSpec) -> Option<f64> {
    match &spec.law {
        Law::Constant | Law::RationalSquare { .. } | Law::LorentzSquare { .. } => Some(0.0),
        Law::Exponential { a } | Law::TanhShift { a } if *a == 0.0 => Some(0.0),
        Law::PowerLaw { a } if *a == -2.0 => Some(1.0),
        _ => None,
    }
    .filter(|x| spec.domain.contains(*x))
}

pub fn classify_range(mumap: &MuMap) -> RangeClass {
    mumap.classify()
}

pub fn classify_range_with(mumap: &MuMap, t: RangeThresholds) -> RangeClass {
    let lo_inf = mumap.mu_min <= -t.infinite;
    let hi_inf = mumap.mu_max >= t.infinite;
    if lo_inf && hi_inf {
        RangeClass::FullLine
    } else if hi_inf && mumap.mu_min.abs() < t.zero {
        RangeClass::HalfLine
    } else {
        RangeClass::Bounded
    }
}
