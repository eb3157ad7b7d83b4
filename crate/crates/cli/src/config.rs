//! Experiment configuration files (TOML).

use std::path::{Path, PathBuf};

use fock_toeplitz::fock::SobolevOrder;
use fock_toeplitz::special::QuadratureSpec;
use fock_toeplitz::symbols::{SymbolDef, SymbolSpec};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub s_values: Vec<f64>,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_j_max")]
    pub j_max: usize,
    pub u: SymbolDef,
    #[serde(default)]
    pub v: Option<SymbolDef>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub decompose: Option<DecomposeConfig>,
}

fn default_k_max() -> usize {
    8
}

fn default_j_max() -> usize {
    4
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub quad_abs: f64,
    pub quad_rel: f64,
    pub verdict_multiplier: f64,
    pub commutation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            quad_abs: q.abs_tol,
            quad_rel: q.rel_tol,
            verdict_multiplier: 3.0,
            commutation: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            formats: vec![Format::Json, Format::Csv],
        }
    }
}

/// Input for `decompose`: a polar-sample CSV, or a symbol sampled on a
/// Chebyshev radius grid.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeConfig {
    #[serde(default)]
    pub samples: Option<PathBuf>,
    #[serde(default)]
    pub symbol: Option<SymbolDef>,
    #[serde(default = "default_radii")]
    pub radii: usize,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default = "default_angles")]
    pub angles: usize,
}

fn default_radii() -> usize {
    64
}

fn default_r_max() -> f64 {
    8.0
}

fn default_angles() -> usize {
    16
}

fn config_err(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("field `{field}`: {msg}"))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: Self = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        // relative sample paths are relative to the config file
        if let Some(d) = cfg.decompose.as_mut() {
            if let Some(p) = d.samples.as_mut() {
                if p.is_relative() {
                    *p = path.parent().unwrap_or(Path::new(".")).join(&*p);
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.s_values.is_empty() {
            return Err(config_err("s_values", "needs at least one order"));
        }
        for &s in &self.s_values {
            SobolevOrder::new(s).map_err(|e| config_err("s_values", e))?;
        }
        if self.n == 0 {
            return Err(config_err("N", "must be positive"));
        }
        if self.n < self.k_max + self.j_max + 2 {
            return Err(config_err(
                "N",
                format!(
                    "N = {} is below k_max + j_max + 2 = {}; the exactness window would be empty",
                    self.n,
                    self.k_max + self.j_max + 2
                ),
            ));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.quad_abs", t.quad_abs),
            ("tolerances.quad_rel", t.quad_rel),
            ("tolerances.verdict_multiplier", t.verdict_multiplier),
            ("tolerances.commutation", t.commutation),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(config_err(name, format!("must be positive, got {v}")));
            }
        }
        self.quadrature().validate().map_err(|e| config_err("tolerances", e))?;
        if self.output.formats.is_empty() {
            return Err(config_err("output.formats", "needs at least one of json, csv"));
        }
        self.symbol_u()?;
        if self.v.is_some() {
            self.symbol_v()?;
        }
        if let Some(d) = &self.decompose {
            if d.samples.is_some() == d.symbol.is_some() {
                return Err(config_err("decompose", "set exactly one of `samples` or `symbol`"));
            }
            if d.radii == 0 || !(d.r_max.is_finite() && d.r_max > 0.0) || d.angles == 0 {
                return Err(config_err("decompose", "radii, r_max and angles must be positive"));
            }
        }
        Ok(())
    }

    pub fn orders(&self) -> Vec<SobolevOrder> {
        self.s_values.iter().map(|&s| SobolevOrder::new(s).expect("validated")).collect()
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        QuadratureSpec {
            abs_tol: self.tolerances.quad_abs,
            rel_tol: self.tolerances.quad_rel,
            ..QuadratureSpec::default()
        }
    }

    pub fn symbol_u(&self) -> Result<SymbolSpec, CliError> {
        build(&self.u, "u")
    }

    pub fn symbol_v(&self) -> Result<SymbolSpec, CliError> {
        match &self.v {
            Some(def) => build(def, "v"),
            None => Err(config_err("v", "this command needs a second symbol `v`")),
        }
    }
}

fn build(def: &SymbolDef, field: &str) -> Result<SymbolSpec, CliError> {
    let spec = def.build().map_err(|e| config_err(field, e))?;
    let spec = if def.name.is_none() && def.preset.is_none() {
        spec.rename(field)
    } else {
        spec
    };
    for (j, p) in spec.modes() {
        p.validate_growth().map_err(|e| config_err(field, format!("mode {j}: {e}")))?;
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    #[test]
    fn minimal_config() {
        let cfg = parse("s_values = [0.0, 1.5]\nN = 16\n[u]\npreset = \"|z|^2\"\n").unwrap();
        assert_eq!(cfg.k_max, 8);
        assert_eq!(cfg.output.formats, vec![Format::Json, Format::Csv]);
        assert_eq!(cfg.orders().len(), 2);
        assert!(cfg.symbol_v().is_err());
    }

    #[test]
    fn errors_name_the_field() {
        let missing = parse("s_values = [0.0]\n[u]\npreset = \"1\"\n").unwrap_err();
        assert!(missing.to_string().contains("`N`"), "{missing}");
        let small = parse("s_values = [0.0]\nN = 5\nk_max = 4\nj_max = 2\n[u]\npreset = \"1\"\n").unwrap_err();
        assert!(small.to_string().contains("field `N`"), "{small}");
        let tol = parse("s_values = [0.0]\nN = 20\n[u]\npreset = \"1\"\n[tolerances]\nquad_abs = -1.0\n").unwrap_err();
        assert!(tol.to_string().contains("tolerances.quad_abs"), "{tol}");
        let neg = parse("s_values = [-1.0]\nN = 20\n[u]\npreset = \"1\"\n").unwrap_err();
        assert!(neg.to_string().contains("s_values"), "{neg}");
        let preset = parse("s_values = [0.0]\nN = 20\n[u]\npreset = \"nope\"\n").unwrap_err();
        assert!(preset.to_string().contains("field `u`"), "{preset}");
        let unknown = parse("s_values = [0.0]\nN = 20\nM = 3\n[u]\npreset = \"1\"\n").unwrap_err();
        assert!(unknown.to_string().contains("unknown field"), "{unknown}");
    }

    #[test]
    fn symbol_modes_from_toml() {
        let cfg = parse(
            r#"
s_values = [0.0]
N = 20
[u]
preset = "|z|^2"
[v]
name = "w"
[[v.modes]]
j = 2
kind = "monomial"
power = 2.0
coeff = [0.0, 1.0]
[[v.modes]]
j = -1
kind = "exp"
rate = 1.0
"#,
        )
        .unwrap();
        let v = cfg.symbol_v().unwrap();
        assert_eq!(v.name(), "w");
        assert_eq!(v.mode_indices(), vec![-1, 2]);
    }
}
