//! Flat `key = value` configuration with `[section]` headers.
//!
//! ```text
//! [oscillator]
//! omega0_cm = 1650
//! delta_cm = 16
//! temperature_K = 300
//!
//! [bath]
//! kind = drude_lorentz, power_exp
//! e_r_cm = 2
//! gamma_cm = 10
//! n = 1, 2
//! omega_c_cm = 10
//!
//! [job]
//! job = absorb
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use respkit_core::response::Oscillator;
use respkit_core::spectra::{Apodization, FrequencyWindow, TimeGrid, TransformOptions};
use respkit_core::{calibrate_coupling, BathShape, ReorgSpec, SpectralDensity};

use crate::error::ConfigError;

const OSCILLATOR_KEYS: &[&str] = &["omega0_cm", "delta_cm", "mu", "temperature_K"];
const BATH_KEYS: &[&str] = &[
    "kind",
    "e_r_cm",
    "lambda0",
    "a_n",
    "gamma_cm",
    "n",
    "omega_c_cm",
    "closed_form",
];
const GRID_KEYS: &[&str] = &["dt_ps", "n", "pad", "frame_cm", "window_half_width_cm", "apodization"];
const JOB_KEYS: &[&str] = &[
    "job",
    "t2_list_ps",
    "hbar_scan_list",
    "output_dir",
    "emit_svg",
    "allow_divergent",
    "horizon_ps",
];

fn section_keys(section: &str) -> Option<&'static [&'static str]> {
    match section {
        "oscillator" => Some(OSCILLATOR_KEYS),
        "bath" => Some(BATH_KEYS),
        "grid" => Some(GRID_KEYS),
        "job" => Some(JOB_KEYS),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JobKind {
    Absorb,
    Twodir,
    Validate,
    Stability,
}

impl JobKind {
    pub fn name(self) -> &'static str {
        match self {
            JobKind::Absorb => "absorb",
            JobKind::Twodir => "twodir",
            JobKind::Validate => "validate",
            JobKind::Stability => "stability",
        }
    }
}

impl fmt::Display for JobKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for JobKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "absorb" => Ok(JobKind::Absorb),
            "twodir" => Ok(JobKind::Twodir),
            "validate" => Ok(JobKind::Validate),
            "stability" => Ok(JobKind::Stability),
            other => Err(format!("expected absorb, twodir, validate or stability, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BathKind {
    DrudeLorentz,
    PowerExp,
}

/// How the coupling strength is fixed.
#[derive(Debug, Clone, PartialEq)]
pub enum Coupling {
    /// Calibrate every bath to this reorganization energy (cm⁻¹).
    Reorganization(f64),
    /// λ₀ for Drude-Lorentz baths, Aₙ for power laws (one value or one per order).
    Explicit { lambda0: Option<f64>, amplitudes: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BathConfig {
    pub kinds: Vec<BathKind>,
    pub coupling: Coupling,
    pub gamma_cm: Option<f64>,
    pub orders: Vec<u32>,
    pub omega_c_cm: Option<f64>,
    pub closed_form: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub dt_ps: f64,
    pub n: usize,
    pub pad: usize,
    /// Rotating-frame frequency; `None` means ω₀.
    pub frame_cm: Option<f64>,
    pub window_half_width_cm: f64,
    pub apodization: Apodization,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub job: Option<JobKind>,
    pub t2_list_ps: Vec<f64>,
    pub hbar_scan_list: Vec<f64>,
    pub output_dir: Option<PathBuf>,
    pub emit_svg: bool,
    pub allow_divergent: bool,
    pub horizon_ps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub oscillator: Oscillator,
    pub bath: BathConfig,
    pub grid: GridConfig,
    pub job: JobConfig,
}

/// A raw value with the line it came from.
struct Entry {
    line: usize,
    value: String,
}

struct Raw {
    entries: BTreeMap<(String, String), Entry>,
}

impl Raw {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries: BTreeMap<(String, String), Entry> = BTreeMap::new();
        let mut section: Option<String> = None;
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::Syntax {
                        line,
                        message: "unterminated section header".into(),
                    })?
                    .trim();
                if section_keys(name).is_none() {
                    return Err(ConfigError::UnknownSection {
                        line,
                        section: name.to_string(),
                    });
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let sec = section.clone().ok_or_else(|| ConfigError::Syntax {
                line,
                message: format!("key `{key}` appears before any [section] header"),
            })?;
            if key.is_empty() {
                return Err(ConfigError::Syntax {
                    line,
                    message: "empty key".into(),
                });
            }
            if !section_keys(&sec).unwrap_or(&[]).contains(&key) {
                return Err(ConfigError::UnknownKey {
                    line,
                    section: sec,
                    key: key.to_string(),
                });
            }
            let slot = (sec, key.to_string());
            if let Some(prev) = entries.get(&slot) {
                return Err(ConfigError::Duplicate {
                    line,
                    key: key.to_string(),
                    first: prev.line,
                });
            }
            entries.insert(
                slot,
                Entry {
                    line,
                    value: value.to_string(),
                },
            );
        }
        Ok(Raw { entries })
    }

    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }

    fn has(&self, section: &str, key: &str) -> bool {
        self.get(section, key).is_some()
    }

    fn parsed<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.get(section, key)
            .map(|e| {
                e.value.parse::<T>().map_err(|err| ConfigError::Invalid {
                    key: key.to_string(),
                    message: format!("line {}: `{}`: {err}", e.line, e.value),
                })
            })
            .transpose()
    }

    fn required<T: FromStr>(&self, section: &str, key: &str) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.parsed(section, key)?
            .ok_or_else(|| ConfigError::Missing(format!("[{section}] {key}")))
    }

    fn list<T: FromStr>(&self, section: &str, key: &str) -> Result<Vec<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        let Some(e) = self.get(section, key) else {
            return Ok(Vec::new());
        };
        e.value
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|item| {
                item.parse::<T>().map_err(|err| ConfigError::Invalid {
                    key: key.to_string(),
                    message: format!("line {}: `{item}`: {err}", e.line),
                })
            })
            .collect()
    }

    fn flag(&self, section: &str, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.get(section, key) {
            None => Ok(default),
            Some(e) => match e.value.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                other => Err(ConfigError::Invalid {
                    key: key.to_string(),
                    message: format!("line {}: expected true or false, got `{other}`", e.line),
                }),
            },
        }
    }
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        message: message.into(),
    }
}

fn positive(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be positive, got {v}")))
    }
}

fn parse_kind(s: &str) -> Result<BathKind, String> {
    match s {
        "drude_lorentz" => Ok(BathKind::DrudeLorentz),
        "power_exp" => Ok(BathKind::PowerExp),
        other => Err(format!("expected drude_lorentz or power_exp, got `{other}`")),
    }
}

fn parse_orders(raw: &Raw, closed_form: bool) -> Result<Vec<u32>, ConfigError> {
    let values: Vec<f64> = raw.list("bath", "n")?;
    let mut orders = Vec::with_capacity(values.len());
    for v in values {
        let integral = v.fract() == 0.0 && v >= 1.0 && v <= f64::from(u32::MAX);
        if closed_form && !(integral && v <= 3.0) {
            return Err(invalid(
                "n",
                format!("n = {v}: closed forms need an integer order 1 <= n <= 3"),
            ));
        }
        if !integral {
            return Err(invalid(
                "n",
                format!("n = {v}: the power-law order must be a positive integer"),
            ));
        }
        orders.push(v as u32);
    }
    Ok(orders)
}

fn parse_bath(raw: &Raw) -> Result<BathConfig, ConfigError> {
    let kinds: Vec<BathKind> = raw
        .get("bath", "kind")
        .ok_or_else(|| ConfigError::Missing("[bath] kind".into()))?
        .value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_kind(s).map_err(|m| invalid("kind", m)))
        .collect::<Result<_, _>>()?;
    if kinds.is_empty() {
        return Err(invalid("kind", "at least one bath kind is required"));
    }
    let closed_form = raw.flag("bath", "closed_form", true)?;
    let orders = parse_orders(raw, closed_form)?;
    let has_dl = kinds.contains(&BathKind::DrudeLorentz);
    let has_pow = kinds.contains(&BathKind::PowerExp);

    for explicit in ["lambda0", "a_n"] {
        if raw.has("bath", "e_r_cm") && raw.has("bath", explicit) {
            return Err(ConfigError::Exclusive("e_r_cm".into(), explicit.into()));
        }
    }
    let coupling = if let Some(e_r) = raw.parsed::<f64>("bath", "e_r_cm")? {
        Coupling::Reorganization(positive("e_r_cm", e_r)?)
    } else {
        let lambda0 = raw.parsed::<f64>("bath", "lambda0")?;
        let amplitudes: Vec<f64> = raw.list("bath", "a_n")?;
        if has_dl && lambda0.is_none() {
            return Err(ConfigError::Missing("[bath] e_r_cm or lambda0".into()));
        }
        if has_pow && amplitudes.is_empty() {
            return Err(ConfigError::Missing("[bath] e_r_cm or a_n".into()));
        }
        if let Some(l) = lambda0 {
            if !(l.is_finite() && l >= 0.0) {
                return Err(invalid("lambda0", format!("must be >= 0, got {l}")));
            }
        }
        if let Some(a) = amplitudes.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(invalid("a_n", format!("must be >= 0, got {a}")));
        }
        if amplitudes.len() > 1 && amplitudes.len() != orders.len() {
            return Err(invalid(
                "a_n",
                format!("give one amplitude or one per order ({} orders)", orders.len()),
            ));
        }
        Coupling::Explicit { lambda0, amplitudes }
    };

    let gamma_cm = raw.parsed::<f64>("bath", "gamma_cm")?;
    if has_dl {
        positive(
            "gamma_cm",
            gamma_cm.ok_or_else(|| ConfigError::Missing("[bath] gamma_cm".into()))?,
        )?;
    }
    let omega_c_cm = raw.parsed::<f64>("bath", "omega_c_cm")?;
    if has_pow {
        if orders.is_empty() {
            return Err(ConfigError::Missing("[bath] n".into()));
        }
        positive(
            "omega_c_cm",
            omega_c_cm.ok_or_else(|| ConfigError::Missing("[bath] omega_c_cm".into()))?,
        )?;
    }
    Ok(BathConfig {
        kinds,
        coupling,
        gamma_cm,
        orders,
        omega_c_cm,
        closed_form,
    })
}

fn parse_grid(raw: &Raw) -> Result<GridConfig, ConfigError> {
    let dt_ps = positive("dt_ps", raw.parsed("grid", "dt_ps")?.unwrap_or(0.01))?;
    let n: usize = raw.parsed("grid", "n")?.unwrap_or(1024);
    if n < 16 || !n.is_power_of_two() {
        return Err(invalid("n", format!("grid size must be a power of two >= 16, got {n}")));
    }
    let pad: usize = raw.parsed("grid", "pad")?.unwrap_or(4);
    if pad < 4 || !pad.is_power_of_two() {
        return Err(invalid("pad", format!("must be a power of two >= 4, got {pad}")));
    }
    let frame_cm: Option<f64> = raw.parsed("grid", "frame_cm")?;
    if let Some(f) = frame_cm {
        if !f.is_finite() {
            return Err(invalid("frame_cm", "must be finite"));
        }
    }
    let window_half_width_cm = positive(
        "window_half_width_cm",
        raw.parsed("grid", "window_half_width_cm")?.unwrap_or(60.0),
    )?;
    let apodization = match raw.get("grid", "apodization").map(|e| e.value.as_str()) {
        None | Some("none") => Apodization::None,
        Some("cosine_squared") => Apodization::CosineSquaredTail,
        Some(other) => {
            return Err(invalid(
                "apodization",
                format!("expected none or cosine_squared, got `{other}`"),
            ))
        }
    };
    Ok(GridConfig {
        dt_ps,
        n,
        pad,
        frame_cm,
        window_half_width_cm,
        apodization,
    })
}

fn parse_job(raw: &Raw) -> Result<JobConfig, ConfigError> {
    let t2_list_ps: Vec<f64> = raw.list("job", "t2_list_ps")?;
    if let Some(t) = t2_list_ps.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(invalid("t2_list_ps", format!("population times must be >= 0, got {t}")));
    }
    let hbar_scan_list: Vec<f64> = raw.list("job", "hbar_scan_list")?;
    if let Some(h) = hbar_scan_list.iter().find(|h| !(h.is_finite() && **h > 0.0)) {
        return Err(invalid("hbar_scan_list", format!("values must be positive, got {h}")));
    }
    Ok(JobConfig {
        job: raw.parsed("job", "job")?,
        t2_list_ps,
        hbar_scan_list,
        output_dir: raw.get("job", "output_dir").map(|e| PathBuf::from(&e.value)),
        emit_svg: raw.flag("job", "emit_svg", false)?,
        allow_divergent: raw.flag("job", "allow_divergent", false)?,
        horizon_ps: positive("horizon_ps", raw.parsed("job", "horizon_ps")?.unwrap_or(50.0))?,
    })
}

/// Parses and validates a configuration. Job-specific requirements are
/// checked when the `job` key is present; see [`RunConfig::for_job`].
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw = Raw::parse(text)?;
    let omega0: f64 = raw.required("oscillator", "omega0_cm")?;
    let delta: f64 = raw.required("oscillator", "delta_cm")?;
    let mu: f64 = raw.parsed("oscillator", "mu")?.unwrap_or(1.0);
    let temperature: f64 = raw.required("oscillator", "temperature_K")?;
    let oscillator =
        Oscillator::new(omega0, delta, mu, temperature).map_err(|e| invalid("oscillator", e.to_string()))?;
    let cfg = RunConfig {
        oscillator,
        bath: parse_bath(&raw)?,
        grid: parse_grid(&raw)?,
        job: parse_job(&raw)?,
    };
    match cfg.job.job {
        Some(job) => cfg.for_job(job),
        None => Ok(cfg),
    }
}

impl RunConfig {
    /// Fixes the job, rejecting a conflicting `job` key and missing job inputs.
    pub fn for_job(mut self, job: JobKind) -> Result<Self, ConfigError> {
        if let Some(set) = self.job.job {
            if set != job {
                return Err(invalid("job", format!("config says `{set}` but `{job}` was requested")));
            }
        }
        if job == JobKind::Twodir && self.job.t2_list_ps.is_empty() {
            return Err(ConfigError::Missing(
                "[job] t2_list_ps (non-empty list, required for twodir)".into(),
            ));
        }
        if job == JobKind::Validate && self.job.hbar_scan_list.is_empty() {
            return Err(ConfigError::Missing(
                "[job] hbar_scan_list (non-empty list, required for validate)".into(),
            ));
        }
        self.job.job = Some(job);
        Ok(self)
    }

    /// The configured baths in listing order; power laws expand one per order.
    pub fn baths(&self) -> Result<Vec<SpectralDensity>, ConfigError> {
        let b = &self.bath;
        let mut out = Vec::new();
        let wrap = |key: &str, r: respkit_core::Result<SpectralDensity>| r.map_err(|e| invalid(key, e.to_string()));
        for kind in &b.kinds {
            match kind {
                BathKind::DrudeLorentz => {
                    let gamma = b
                        .gamma_cm
                        .ok_or_else(|| ConfigError::Missing("[bath] gamma_cm".into()))?;
                    out.push(match &b.coupling {
                        Coupling::Reorganization(e_r) => wrap(
                            "e_r_cm",
                            calibrate_coupling(ReorgSpec {
                                e_r: *e_r,
                                shape: BathShape::DrudeLorentz { gamma },
                            }),
                        )?,
                        Coupling::Explicit { lambda0, .. } => {
                            let l = lambda0.ok_or_else(|| ConfigError::Missing("[bath] lambda0".into()))?;
                            wrap("lambda0", SpectralDensity::drude_lorentz(l, gamma))?
                        }
                    });
                }
                BathKind::PowerExp => {
                    let cutoff = b
                        .omega_c_cm
                        .ok_or_else(|| ConfigError::Missing("[bath] omega_c_cm".into()))?;
                    for (i, &order) in b.orders.iter().enumerate() {
                        out.push(match &b.coupling {
                            Coupling::Reorganization(e_r) => wrap(
                                "e_r_cm",
                                calibrate_coupling(ReorgSpec {
                                    e_r: *e_r,
                                    shape: BathShape::PowerExpCutoff { order, cutoff },
                                }),
                            )?,
                            Coupling::Explicit { amplitudes, .. } => {
                                let a = if amplitudes.len() == 1 {
                                    amplitudes[0]
                                } else {
                                    amplitudes[i]
                                };
                                wrap("a_n", SpectralDensity::power_exp_cutoff(order, a, cutoff))?
                            }
                        });
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn frame_cm(&self) -> f64 {
        self.grid.frame_cm.unwrap_or(self.oscillator.omega0)
    }

    pub fn time_grid(&self) -> respkit_core::Result<TimeGrid> {
        TimeGrid::new(self.grid.dt_ps, self.grid.n, self.frame_cm())
    }

    pub fn transform_options(&self) -> TransformOptions {
        TransformOptions {
            pad: self.grid.pad,
            apodization: self.grid.apodization,
        }
    }

    pub fn window(&self) -> respkit_core::Result<FrequencyWindow> {
        FrequencyWindow::around(self.oscillator.omega0, self.grid.window_half_width_cm)
    }

    /// Canonical `section.key = value` listing with defaults filled in.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        let o = &self.oscillator;
        put("oscillator.omega0_cm", o.omega0.to_string());
        put("oscillator.delta_cm", o.delta.to_string());
        put("oscillator.mu", o.mu.to_string());
        put("oscillator.temperature_K", o.temperature.to_string());
        let b = &self.bath;
        let kinds: Vec<&str> = b
            .kinds
            .iter()
            .map(|k| match k {
                BathKind::DrudeLorentz => "drude_lorentz",
                BathKind::PowerExp => "power_exp",
            })
            .collect();
        put("bath.kind", kinds.join(","));
        match &b.coupling {
            Coupling::Reorganization(e_r) => put("bath.e_r_cm", e_r.to_string()),
            Coupling::Explicit { lambda0, amplitudes } => {
                if let Some(l) = lambda0 {
                    put("bath.lambda0", l.to_string());
                }
                if !amplitudes.is_empty() {
                    put("bath.a_n", join(amplitudes));
                }
            }
        }
        if let Some(g) = b.gamma_cm {
            put("bath.gamma_cm", g.to_string());
        }
        if !b.orders.is_empty() {
            put(
                "bath.n",
                b.orders.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
            );
        }
        if let Some(c) = b.omega_c_cm {
            put("bath.omega_c_cm", c.to_string());
        }
        put("bath.closed_form", b.closed_form.to_string());
        let g = &self.grid;
        put("grid.dt_ps", g.dt_ps.to_string());
        put("grid.n", g.n.to_string());
        put("grid.pad", g.pad.to_string());
        put("grid.frame_cm", self.frame_cm().to_string());
        put("grid.window_half_width_cm", g.window_half_width_cm.to_string());
        put(
            "grid.apodization",
            match g.apodization {
                Apodization::None => "none",
                Apodization::CosineSquaredTail => "cosine_squared",
            }
            .to_string(),
        );
        let j = &self.job;
        if let Some(job) = j.job {
            put("job.job", job.to_string());
        }
        if !j.t2_list_ps.is_empty() {
            put("job.t2_list_ps", join(&j.t2_list_ps));
        }
        if !j.hbar_scan_list.is_empty() {
            put("job.hbar_scan_list", join(&j.hbar_scan_list));
        }
        put("job.allow_divergent", j.allow_divergent.to_string());
        put("job.horizon_ps", j.horizon_ps.to_string());
        m
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
[oscillator]
omega0_cm = 1650
delta_cm = 16
temperature_K = 300

[bath]
kind = drude_lorentz   # reference bath
e_r_cm = 2
gamma_cm = 10

[job]
job = absorb
";

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.oscillator.mu, 1.0);
        assert_eq!(cfg.grid.n, 1024);
        assert_eq!(cfg.grid.pad, 4);
        assert_eq!(cfg.frame_cm(), 1650.0);
        assert_eq!(cfg.job.horizon_ps, 50.0);
        assert!(!cfg.job.allow_divergent);
        assert_eq!(
            cfg.baths().unwrap(),
            vec![SpectralDensity::DrudeLorentz {
                lambda0: 2.0,
                gamma: 10.0
            }]
        );
    }

    #[test]
    fn exclusive_coupling_keys() {
        let text = MINIMAL.replace("e_r_cm = 2", "e_r_cm = 2\nlambda0 = 2");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err, ConfigError::Exclusive("e_r_cm".into(), "lambda0".into()));
        let msg = err.to_string();
        assert!(msg.contains("e_r_cm") && msg.contains("lambda0"));
    }

    #[test]
    fn fractional_order_rejected() {
        let text = MINIMAL.replace(
            "kind = drude_lorentz",
            "kind = power_exp\nn = 2.5\nomega_c_cm = 10\nclosed_form = true",
        );
        match parse_config(&text).unwrap_err() {
            ConfigError::Invalid { key, message } => {
                assert_eq!(key, "n");
                assert!(message.contains("integer"));
            }
            e => panic!("{e:?}"),
        }
        let open = text.replace("closed_form = true", "closed_form = false");
        assert!(parse_config(&open).is_err());
        let high = text.replace("n = 2.5", "n = 5");
        assert!(parse_config(&high).is_err());
        let high_open = open.replace("n = 2.5", "n = 5");
        assert!(parse_config(&high_open).is_ok());
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = MINIMAL.replace("gamma_cm = 10", "gama_cm = 10");
        assert_eq!(
            parse_config(&text).unwrap_err(),
            ConfigError::UnknownKey {
                line: 9,
                section: "bath".into(),
                key: "gama_cm".into()
            }
        );
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(
            parse_config("omega0_cm = 1").unwrap_err(),
            ConfigError::Syntax { line: 1, .. }
        ));
        assert!(matches!(
            parse_config("[oscillator]\nomega0_cm").unwrap_err(),
            ConfigError::Syntax { line: 2, .. }
        ));
        assert!(matches!(
            parse_config("[nope]").unwrap_err(),
            ConfigError::UnknownSection { line: 1, .. }
        ));
        let dup = MINIMAL.replace("delta_cm = 16", "delta_cm = 16\ndelta_cm = 8");
        assert!(matches!(
            parse_config(&dup).unwrap_err(),
            ConfigError::Duplicate { line: 4, first: 3, .. }
        ));
    }

    #[test]
    fn job_requirements() {
        let twodir = MINIMAL.replace("job = absorb", "job = twodir");
        assert!(matches!(parse_config(&twodir).unwrap_err(), ConfigError::Missing(k) if k.contains("t2_list_ps")));
        let validate = MINIMAL.replace("job = absorb", "job = validate\nhbar_scan_list =");
        assert!(
            matches!(parse_config(&validate).unwrap_err(), ConfigError::Missing(k) if k.contains("hbar_scan_list"))
        );
        let cfg = parse_config(MINIMAL).unwrap();
        assert!(cfg.clone().for_job(JobKind::Stability).is_err());
        let open = parse_config(&MINIMAL.replace("job = absorb", "")).unwrap();
        assert_eq!(
            open.for_job(JobKind::Stability).unwrap().job.job,
            Some(JobKind::Stability)
        );
    }

    #[test]
    fn power_law_expansion() {
        let text = MINIMAL.replace(
            "kind = drude_lorentz   # reference bath",
            "kind = drude_lorentz, power_exp\nn = 1, 2, 3\nomega_c_cm = 10",
        );
        let baths = parse_config(&text).unwrap().baths().unwrap();
        let labels: Vec<String> = baths.iter().map(|b| b.label()).collect();
        assert_eq!(
            labels,
            ["drude_lorentz", "power_exp_n1", "power_exp_n2", "power_exp_n3"]
        );
        for b in &baths {
            assert!((b.reorganization_energy() - 2.0).abs() < 1e-14);
        }
        let explicit = text.replace("e_r_cm = 2", "lambda0 = 3\na_n = 0.1, 0.2, 0.3");
        let baths = parse_config(&explicit).unwrap().baths().unwrap();
        assert_eq!(
            baths[0],
            SpectralDensity::DrudeLorentz {
                lambda0: 3.0,
                gamma: 10.0
            }
        );
        assert_eq!(
            baths[3],
            SpectralDensity::PowerExpCutoff {
                order: 3,
                amplitude: 0.3,
                cutoff: 10.0
            }
        );
        let missing = text.replace("e_r_cm = 2", "lambda0 = 3");
        assert!(matches!(parse_config(&missing).unwrap_err(), ConfigError::Missing(k) if k.contains("a_n")));
    }

    #[test]
    fn echo_is_canonical() {
        let a = parse_config(MINIMAL).unwrap().echo();
        let b = parse_config(&MINIMAL.replace("omega0_cm = 1650", "omega0_cm = 1650.0"))
            .unwrap()
            .echo();
        assert_eq!(a, b);
        assert_eq!(a["grid.frame_cm"], "1650");
    }
}
