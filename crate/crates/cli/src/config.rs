//! Flat key-value run configuration: a TOML file of top-level keys, overridden
//! by `--key value` pairs from the command line.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use toml::Value;

use crate::error::{CliError, Result};

pub const COMMANDS: [&str; 4] = ["verify-family", "tree", "goodlambda", "hardy-report"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyFamily,
    Tree,
    Goodlambda,
    HardyReport,
}

impl Command {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "verify-family" => Self::VerifyFamily,
            "tree" => Self::Tree,
            "goodlambda" => Self::Goodlambda,
            "hardy-report" => Self::HardyReport,
            _ => return Err(CliError::UnknownName { kind: "command", name: s.into(), available: COMMANDS.to_vec() }),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentSpec {
    pub kind: String,
    pub p: f64,
    pub p_lo: f64,
    pub p_hi: f64,
    pub holder_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilySpec {
    pub name: String,
    pub exponent: ExponentSpec,
    pub s: f64,
    pub q: f64,
    /// `variable-exponent` or `log-corrected`, for `theta-composition`.
    pub variant: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionSpec {
    pub name: String,
    pub n: usize,
    pub modes: usize,
    pub seed: u64,
    pub degree: usize,
    pub value: f64,
    pub values: Vec<f64>,
    pub pole_radius: f64,
    pub pole_angle: f64,
    pub power: f64,
    pub atoms: Vec<(f64, f64)>,
    pub zeros: Vec<(f64, f64)>,
    pub amplitude: f64,
}

/// Fully resolved configuration, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub family: FamilySpec,
    pub function: FunctionSpec,
    /// SCI modulus `B`.
    pub modulus: f64,
    /// Modular threshold: normalization bound for `tree`, `A` for `hardy-report`.
    pub a: f64,
    pub doubling_factor: f64,
    pub decades: u32,
    pub sci_levels: u32,
    pub r_max: f64,
    pub aperture: f64,
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub delta: f64,
    pub h: Option<f64>,
    pub m0: i32,
    pub max_level: i32,
    pub pair: (String, String),
    pub radii_levels: u32,
    pub ceiling: f64,
    pub smirnov_tol: f64,
    pub expect_fail: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
}

/// Raw keys with tracking of which ones were consumed.
pub struct RawConfig {
    values: BTreeMap<String, Value>,
}

impl RawConfig {
    pub fn empty() -> Self {
        Self { values: BTreeMap::new() }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::config("<file>", e.to_string()))?;
        let mut values = BTreeMap::new();
        for (k, v) in table {
            if let Value::Table(_) = v {
                return Err(CliError::config(&k, "nested tables are not supported; use flat keys"));
            }
            values.insert(k, v);
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    /// Override a key with a command-line value, read as a TOML value when
    /// possible and as a bare string otherwise.
    pub fn set(&mut self, key: &str, raw: &str) {
        let parsed = format!("v = {raw}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(raw.to_string()));
        self.values.insert(key.replace('-', "_"), parsed);
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        self.values.remove(key)
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.take(key) {
            None => Ok(default),
            Some(Value::Float(x)) => Ok(x),
            Some(Value::Integer(i)) => Ok(i as f64),
            Some(v) => Err(CliError::config(key, format!("expected a number, got {v}"))),
        }
    }

    fn positive(&mut self, key: &str, default: f64) -> Result<f64> {
        let v = self.f64_or(key, default)?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(CliError::config(key, format!("must be positive, got {v}")))
        }
    }

    fn int_or(&mut self, key: &str, default: i64) -> Result<i64> {
        match self.take(key) {
            None => Ok(default),
            Some(Value::Integer(i)) => Ok(i),
            Some(v) => Err(CliError::config(key, format!("expected an integer, got {v}"))),
        }
    }

    fn count(&mut self, key: &str, default: i64) -> Result<u64> {
        let v = self.int_or(key, default)?;
        u64::try_from(v).map_err(|_| CliError::config(key, format!("must be nonnegative, got {v}")))
    }

    fn string_or(&mut self, key: &str, default: &str) -> Result<String> {
        match self.take(key) {
            None => Ok(default.to_string()),
            Some(Value::String(s)) => Ok(s),
            Some(v) => Err(CliError::config(key, format!("expected a string, got {v}"))),
        }
    }

    fn bool_or(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.take(key) {
            None => Ok(default),
            Some(Value::Boolean(b)) => Ok(b),
            Some(v) => Err(CliError::config(key, format!("expected true or false, got {v}"))),
        }
    }

    fn number(key: &str, v: &Value) -> Result<f64> {
        match v {
            Value::Float(x) => Ok(*x),
            Value::Integer(i) => Ok(*i as f64),
            _ => Err(CliError::config(key, format!("expected a number, got {v}"))),
        }
    }

    /// A number or an array of numbers.
    fn list_or(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.take(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(items)) => items.iter().map(|v| Self::number(key, v)).collect(),
            Some(v) => Ok(vec![Self::number(key, &v)?]),
        }
    }

    /// An array of two-element numeric arrays.
    fn pairs(&mut self, key: &str) -> Result<Vec<(f64, f64)>> {
        match self.take(key) {
            None => Ok(Vec::new()),
            Some(Value::Array(items)) => items
                .iter()
                .map(|item| match item {
                    Value::Array(p) if p.len() == 2 => Ok((Self::number(key, &p[0])?, Self::number(key, &p[1])?)),
                    _ => Err(CliError::config(key, format!("expected [a, b] pairs, got {item}"))),
                })
                .collect(),
            Some(v) => Err(CliError::config(key, format!("expected an array of pairs, got {v}"))),
        }
    }

    /// Resolve every key, failing on missing, malformed or unknown ones.
    pub fn resolve(mut self) -> Result<RunConfig> {
        let command = match self.take("command") {
            Some(Value::String(s)) => Command::parse(&s)?,
            Some(v) => return Err(CliError::config("command", format!("expected a string, got {v}"))),
            None => return Err(CliError::config("command", format!("missing; one of {}", COMMANDS.join(", ")))),
        };
        let default_family = if command == Command::HardyReport { "theta-composition" } else { "var-exp-smooth" };
        let family = FamilySpec {
            name: self.string_or("family", default_family)?,
            exponent: ExponentSpec {
                kind: self.string_or("exponent", "smooth")?,
                p: self.positive("p", 2.0)?,
                p_lo: self.positive("p_lo", 1.5)?,
                p_hi: self.positive("p_hi", 2.5)?,
                holder_s: self.positive("holder_s", 0.5)?,
            },
            s: self.positive("s", 2.0)?,
            q: self.positive("q", 1.0)?,
            variant: self.string_or("variant", "variable-exponent")?,
        };
        let n = self.count("n", 1024)? as usize;
        if !n.is_power_of_two() || n < 2 {
            return Err(CliError::config("n", format!("grid size must be a power of two ≥ 2, got {n}")));
        }
        let function = FunctionSpec {
            name: self.string_or("function", "pole-power")?,
            n,
            modes: self.count("modes", 512)? as usize,
            seed: self.count("seed", 1)?,
            degree: self.count("degree", 8)? as usize,
            value: self.f64_or("value", 1.0)?,
            values: self.list_or("values", &[1.0, 0.0])?,
            pole_radius: self.f64_or("pole_radius", 0.9)?,
            pole_angle: self.f64_or("pole_angle", 0.0)?,
            power: self.f64_or("power", 0.25)?,
            atoms: self.pairs("atoms")?,
            zeros: self.pairs("zeros")?,
            amplitude: self.f64_or("amplitude", 1.0)?,
        };
        let default_a = if command == Command::HardyReport { 10.0 } else { 1.0 };
        let pair = match self.list_strings("pair")? {
            None => ("u*".to_string(), "Au".to_string()),
            Some(v) if v.len() == 2 => (v[0].clone(), v[1].clone()),
            Some(v) => return Err(CliError::config("pair", format!("expected two names, got {v:?}"))),
        };
        let h = match self.take("h") {
            None => None,
            Some(v) => {
                let h = Self::number("h", &v)?;
                if !(h > 1.0) {
                    return Err(CliError::config("h", format!("must exceed 1, got {h}")));
                }
                Some(h)
            }
        };
        let r_max = self.f64_or("r_max", 1.0 - 2f64.powi(-12))?;
        if !(r_max > 0.0 && r_max < 1.0) {
            return Err(CliError::config("r_max", format!("must lie in (0, 1), got {r_max}")));
        }
        let format = match self.string_or("format", "json")?.as_str() {
            "json" => Format::Json,
            "csv" => Format::Csv,
            other => return Err(CliError::config("format", format!("expected json or csv, got {other}"))),
        };
        let cfg = RunConfig {
            command,
            family,
            function,
            modulus: self.positive("modulus", 1.0)?,
            a: self.positive("a", default_a)?,
            doubling_factor: self.positive("doubling_factor", 2.0)?,
            decades: self.count("decades", 6)? as u32,
            sci_levels: self.count("sci_levels", 10)? as u32,
            r_max,
            aperture: self.positive("aperture", 0.5)?,
            betas: self.positive_list("betas", &[2.0])?,
            gammas: self.positive_list("gammas", &[1.0, 0.5, 0.25, 0.125])?,
            delta: self.positive("delta", 1.0)?,
            h,
            m0: self.int_or("m0", -8)? as i32,
            max_level: self.int_or("max_level", 400)? as i32,
            pair,
            radii_levels: self.count("radii_levels", 12)? as u32,
            ceiling: self.positive("ceiling", 1e6)?,
            smirnov_tol: self.positive("smirnov_tol", 1e-3)?,
            expect_fail: self.bool_or("expect_fail", false)?,
            format,
            out: self.take("out").map(|v| match v {
                Value::String(s) => PathBuf::from(s),
                other => PathBuf::from(other.to_string()),
            }),
        };
        if let Some(key) = self.values.keys().next() {
            return Err(CliError::config(key, "unknown key"));
        }
        Ok(cfg)
    }

    fn positive_list(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        let v = self.list_or(key, default)?;
        if v.is_empty() || v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(CliError::config(key, format!("need a nonempty list of positive numbers, got {v:?}")));
        }
        Ok(v)
    }

    fn list_strings(&mut self, key: &str) -> Result<Option<Vec<String>>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.split(',').map(|p| p.trim().to_string()).collect())),
            Some(Value::Array(items)) => items
                .into_iter()
                .map(|v| match v {
                    Value::String(s) => Ok(s),
                    other => Err(CliError::config(key, format!("expected strings, got {other}"))),
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(v) => Err(CliError::config(key, format!("expected strings, got {v}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_win_and_parse_as_toml() {
        let mut raw = RawConfig::from_toml("command = \"tree\"\nn = 64\nbetas = [2.0, 4.0]").unwrap();
        raw.set("n", "128");
        raw.set("atoms", "[[0.0, 1.0]]");
        raw.set("family", "log-type");
        let cfg = raw.resolve().unwrap();
        assert_eq!(cfg.function.n, 128);
        assert_eq!(cfg.function.atoms, vec![(0.0, 1.0)]);
        assert_eq!(cfg.family.name, "log-type");
        assert_eq!(cfg.betas, vec![2.0, 4.0]);
    }

    #[test]
    fn errors_name_the_key() {
        let bad = |text: &str| RawConfig::from_toml(text).unwrap().resolve().unwrap_err().to_string();
        assert!(bad("command = \"tree\"\nn = 100").contains("`n`"));
        assert!(bad("command = \"tree\"\nbogus = 1").contains("`bogus`"));
        assert!(bad("command = \"tree\"\ns = -1").contains("`s`"));
        assert!(bad("n = 64").contains("`command`"));
        assert!(bad("command = \"sing\"").contains("verify-family"));
    }
}
