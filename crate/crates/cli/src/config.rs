//! Run configuration files.
//!
//! ```text
//! # comment
//! [system]
//! I2 = 1.3
//! x0 = 0.8
//! z0 = -0.45
//!
//! [initial]
//! M = 0.3, -1.2, 0.7
//! Gamma = 1.1, 0.4, -0.9
//! ```
//!
//! Every section and key is optional. Unknown sections or keys, repeated
//! keys and values that do not parse are errors carrying the line number.

use std::collections::BTreeMap;
use std::path::PathBuf;

use e3lab::ode::Method;
use e3lab::{CaseSelector, E3State, ScalarField, SolverSettings, SystemParams};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ConfigError {
    /// 1-based; 0 when the problem is not tied to a single line.
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        line,
        message: message.into(),
    })
}

const KEYS: &[(&str, &[&str])] = &[
    ("system", &["I2", "x0", "z0"]),
    ("case", &["name", "value", "field"]),
    ("initial", &["M", "Gamma", "random", "range"]),
    ("integrator", &["method", "abs_tol", "rel_tol", "step", "t_end", "interval"]),
    ("output", &["path"]),
    ("run", &["seed"]),
    ("verify", &["samples"]),
    ("hess", &["inertia", "scale", "t_end", "interval"]),
];

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// Parsed `[section] key = value` text before interpretation.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        let mut current: Option<String> = None;
        for (idx, full) in text.lines().enumerate() {
            let line = idx + 1;
            let body = full.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    return err(line, "unterminated section header");
                };
                let name = name.trim();
                if !KEYS.iter().any(|(s, _)| *s == name) {
                    return err(line, format!("unknown section [{name}]"));
                }
                raw.sections.entry(name.to_string()).or_default();
                current = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return err(line, format!("expected `key = value`, found `{body}`"));
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(section) = &current else {
                return err(line, format!("key `{key}` outside of any section"));
            };
            let allowed = KEYS.iter().find(|(s, _)| s == section).map(|(_, k)| *k).unwrap_or(&[]);
            if !allowed.contains(&key) {
                return err(line, format!("unknown key `{key}` in [{section}]"));
            }
            if value.is_empty() {
                return err(line, format!("missing value for `{key}`"));
            }
            let table = raw.sections.get_mut(section).expect("section registered");
            if table.contains_key(key) {
                return err(line, format!("duplicate key `{key}` in [{section}]"));
            }
            table.insert(
                key.to_string(),
                Entry {
                    value: value.to_string(),
                    line,
                },
            );
        }
        Ok(raw)
    }

    fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section)?.get(key)
    }

    fn float(&self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        self.entry(section, key).map(|e| parse_float(&e.value, e.line)).transpose()
    }

    fn float_or(&self, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.float(section, key)?.unwrap_or(default))
    }

    fn triple(&self, section: &str, key: &str) -> Result<Option<[f64; 3]>, ConfigError> {
        let Some(e) = self.entry(section, key) else {
            return Ok(None);
        };
        let parts: Vec<&str> = e.value.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return err(e.line, format!("`{key}` needs three comma-separated numbers"));
        }
        let mut out = [0.0; 3];
        for (o, p) in out.iter_mut().zip(parts) {
            *o = parse_float(p, e.line)?;
        }
        Ok(Some(out))
    }

    fn text(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entry(section, key)
    }

    fn line_of(&self, section: &str, key: &str) -> usize {
        self.entry(section, key).map_or(0, |e| e.line)
    }
}

fn parse_float(s: &str, line: usize) -> Result<f64, ConfigError> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => err(line, format!("`{s}` is not a finite number")),
    }
}

fn parse_bool(e: &Entry) -> Result<bool, ConfigError> {
    match e.value.as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        v => err(e.line, format!("`{v}` is not true or false")),
    }
}

fn parse_count(e: &Entry) -> Result<u64, ConfigError> {
    e.value
        .parse::<u64>()
        .or_else(|_| err(e.line, format!("`{}` is not a non-negative integer", e.value)))
}

/// Where the initial state comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Initial {
    Given(E3State),
    /// Uniform in `[−range, range]⁶`, drawn from the run seed.
    Random { range: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessConfig {
    pub inertia: [f64; 3],
    pub scale: f64,
    pub settings: SolverSettings,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub params: SystemParams,
    pub case: CaseSelector,
    pub initial: Initial,
    pub settings: SolverSettings,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub samples: usize,
    pub hess: HessConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config::from_raw(&RawConfig::default()).expect("defaults are valid")
    }
}

fn coordinate_index(name: &str) -> Option<usize> {
    ["M1", "M2", "M3", "G1", "G2", "G3"].iter().position(|c| *c == name)
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Self::from_raw(&RawConfig::parse(text)?)
    }

    fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        let params = SystemParams::new(
            raw.float_or("system", "I2", 1.0)?,
            raw.float_or("system", "x0", 1.0)?,
            raw.float_or("system", "z0", 0.5)?,
        )
        .or_else(|e| err(raw.line_of("system", "I2").max(raw.line_of("system", "x0")), e.to_string()))?;

        let case = match raw.text("case", "name") {
            None => CaseSelector::CasimirF1,
            Some(e) => match e.value.as_str() {
                "casimir_f1" => CaseSelector::CasimirF1,
                "casimir_f2" => CaseSelector::CasimirF2,
                "h2" => CaseSelector::H2Case,
                "gamma_chi" => CaseSelector::GammaChi,
                "m_squared" => CaseSelector::MSquared,
                "constant" => match raw.float("case", "value")? {
                    Some(v) => CaseSelector::Constant(v),
                    None => return err(e.line, "case `constant` needs `value`"),
                },
                "custom" => {
                    let Some(f) = raw.text("case", "field") else {
                        return err(e.line, "case `custom` needs `field`");
                    };
                    match coordinate_index(&f.value) {
                        Some(i) => CaseSelector::Custom(ScalarField::coordinate(i)),
                        None => return err(f.line, format!("unknown field `{}`, expected M1..M3 or G1..G3", f.value)),
                    }
                }
                other => return err(e.line, format!("unknown case `{other}`")),
            },
        };

        let m = raw.triple("initial", "M")?;
        let g = raw.triple("initial", "Gamma")?;
        let random = raw.text("initial", "random").map(parse_bool).transpose()?;
        let range = raw.float_or("initial", "range", e3lab::sampling::DEFAULT_RANGE)?;
        if range <= 0.0 {
            return err(raw.line_of("initial", "range"), "`range` must be positive");
        }
        let initial = match (m, g, random) {
            (Some(m), Some(g), None | Some(false)) => Initial::Given(E3State::new(m, g)),
            (None, None, None | Some(true)) => Initial::Random { range },
            (_, _, Some(true)) => {
                return err(raw.line_of("initial", "random"), "`random = true` conflicts with M/Gamma");
            }
            _ => {
                let line = raw.line_of("initial", "M").max(raw.line_of("initial", "Gamma"));
                return err(line, "both `M` and `Gamma` are required for a given initial state");
            }
        };

        let method = match raw.text("integrator", "method").map(|e| (e.value.as_str(), e.line)) {
            None | Some(("dopri5", _)) => {
                let Method::Dopri5 { abs_tol, rel_tol } = Method::dopri5_default() else {
                    unreachable!()
                };
                Method::Dopri5 {
                    abs_tol: raw.float_or("integrator", "abs_tol", abs_tol)?,
                    rel_tol: raw.float_or("integrator", "rel_tol", rel_tol)?,
                }
            }
            Some(("rk4", _)) => Method::Rk4 {
                step: raw.float_or("integrator", "step", 1e-3)?,
            },
            Some((other, line)) => return err(line, format!("unknown method `{other}`")),
        };
        let settings = SolverSettings::new(
            method,
            raw.float_or("integrator", "t_end", 10.0)?,
            raw.float_or("integrator", "interval", 0.1)?,
        )
        .or_else(|e| err(raw.line_of("integrator", "t_end"), e.to_string()))?;

        let hess = HessConfig {
            inertia: raw.triple("hess", "inertia")?.unwrap_or([3.0, 2.0, 1.0]),
            scale: raw.float_or("hess", "scale", -1.0)?,
            settings: SolverSettings::new(
                Method::dopri5_default(),
                raw.float_or("hess", "t_end", 50.0)?,
                raw.float_or("hess", "interval", 0.5)?,
            )
            .or_else(|e| err(raw.line_of("hess", "t_end"), e.to_string()))?,
        };

        let samples = match raw.text("verify", "samples") {
            None => 100,
            Some(e) => match parse_count(e)? {
                0 => return err(e.line, "`samples` must be at least 1"),
                n => n as usize,
            },
        };

        Ok(Config {
            params,
            case,
            initial,
            settings,
            output: raw.text("output", "path").map(|e| PathBuf::from(&e.value)),
            seed: raw.text("run", "seed").map(parse_count).transpose()?,
            samples,
            hess,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_file() {
        let c = Config::parse(
            "# run\n[system]\nI2 = 2\nx0 = 1\nz0 = 0\n\n[case]\nname = constant\nvalue = 0.25\n\
             [initial]\nM = 1, 2, 3\nGamma = 0.1,0.2 , 0.3 # trailing\n[integrator]\nmethod = rk4\nstep = 0.01\n\
             t_end = 2\ninterval = 0.5\n[run]\nseed = 9\n[verify]\nsamples = 12\n",
        )
        .unwrap();
        assert_eq!(c.params.i2(), 2.0);
        assert!(matches!(c.case, CaseSelector::Constant(v) if v == 0.25));
        assert_eq!(c.initial, Initial::Given(E3State::new([1.0, 2.0, 3.0], [0.1, 0.2, 0.3])));
        assert_eq!(c.settings.method, Method::Rk4 { step: 0.01 });
        assert_eq!((c.seed, c.samples), (Some(9), 12));
    }

    #[test]
    fn empty_file_uses_defaults() {
        let c = Config::parse("").unwrap();
        assert!(matches!(c.initial, Initial::Random { .. }));
        assert_eq!(c.case.tag(), "casimir_f1");
        assert_eq!(c.samples, 100);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("[system]\nI2 = abc\n", 2),
            ("x0 = 1\n", 1),
            ("[nope]\n", 1),
            ("[system]\n\nfoo = 1\n", 3),
            ("[system]\nI2 = 1\nI2 = 2\n", 3),
            ("[initial]\nM = 1, 2\n", 2),
            ("[initial]\nM = 1, 2, 3\n", 2),
            ("[case]\nname = sideways\n", 2),
            ("[system]\nI2 = -1\n", 2),
            ("[integrator]\nt_end = 0\n", 2),
            ("[system\n", 1),
            ("[system]\njust words\n", 2),
        ];
        for (text, line) in cases {
            let e = Config::parse(text).unwrap_err();
            assert_eq!(e.line, line, "{text:?}: {e}");
        }
    }
}
