//! Serializable symbol definitions, as written in symbol and experiment
//! files:
//!
//! ```toml
//! name = "Re z"
//! [[modes]]
//! j = 1
//! kind = "monomial"
//! power = 1.0
//! coeff = 0.5
//! [[modes]]
//! j = -1
//! kind = "monomial"
//! power = 1.0
//! coeff = [0.5, 0.0]
//! ```
//!
//! or simply `preset = "re_z"`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::profile::RadialProfile;
use super::SymbolSpec;
use crate::error::{Error, Result};
use crate::special::Growth;

/// Names accepted by `preset = "..."`.
pub const PRESETS: &[&str] = &[
    "1",
    "z",
    "zbar",
    "z^2",
    "zbar^2",
    "re_z",
    "im_z",
    "|z|^2",
    "|z|^4",
    "1+|z|^2",
    "exp(-|z|)",
    "z/(1+|z|)",
    "zbar*exp(-|z|^2)",
];

/// A real number or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Real(f64),
    Complex([f64; 2]),
}

impl Default for Coeff {
    fn default() -> Self {
        Coeff::Real(1.0)
    }
}

impl From<Coeff> for Complex64 {
    fn from(c: Coeff) -> Self {
        match c {
            Coeff::Real(x) => Complex64::new(x, 0.0),
            Coeff::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileDef {
    Zero,
    Monomial {
        power: f64,
        #[serde(default)]
        coeff: Coeff,
    },
    Polynomial {
        coeffs: Vec<Coeff>,
    },
    /// coeff · r^power · e^{-rate r}
    Exp {
        rate: f64,
        #[serde(default)]
        power: f64,
        #[serde(default)]
        coeff: Coeff,
    },
    /// coeff · r^power · e^{-rate r²}
    Gaussian {
        rate: f64,
        #[serde(default)]
        power: f64,
        #[serde(default)]
        coeff: Coeff,
    },
}

impl ProfileDef {
    pub fn build(&self) -> Result<RadialProfile> {
        Ok(match self {
            ProfileDef::Zero => RadialProfile::zero(),
            ProfileDef::Monomial { power, coeff } => {
                if !(power.is_finite() && *power >= 0.0) {
                    return Err(Error::domain(format!("monomial power must be >= 0, got {power}")));
                }
                RadialProfile::scaled_monomial((*coeff).into(), *power)
            }
            ProfileDef::Polynomial { coeffs } => {
                RadialProfile::polynomial(coeffs.iter().map(|&c| c.into()).collect())
            }
            ProfileDef::Exp { rate, power, coeff } => {
                RadialProfile::exp_decay((*coeff).into(), *power, *rate)?
            }
            ProfileDef::Gaussian { rate, power, coeff } => {
                RadialProfile::gaussian((*coeff).into(), *power, *rate)?
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeDef {
    pub j: i32,
    #[serde(flatten)]
    pub profile: ProfileDef,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolDef {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub modes: Vec<ModeDef>,
}

impl SymbolDef {
    pub fn preset(name: &str) -> Self {
        Self {
            preset: Some(name.to_string()),
            ..Self::default()
        }
    }

    pub fn build(&self) -> Result<SymbolSpec> {
        match (&self.preset, self.modes.is_empty()) {
            (Some(_), false) => Err(Error::precondition(
                "a symbol definition takes either `preset` or `modes`, not both",
            )),
            (Some(p), true) => {
                let spec = preset(p)?;
                Ok(match &self.name {
                    Some(n) => spec.rename(n.clone()),
                    None => spec,
                })
            }
            (None, _) => {
                let mut spec = SymbolSpec::new(self.name.clone().unwrap_or_else(|| "u".into()));
                for m in &self.modes {
                    if spec.mode(m.j).is_some() {
                        return Err(Error::precondition(format!("mode j = {} is declared twice", m.j)));
                    }
                    spec = spec.with_mode(m.j, m.profile.build()?);
                }
                Ok(spec)
            }
        }
    }
}

fn preset(name: &str) -> Result<SymbolSpec> {
    let one = Complex64::new(1.0, 0.0);
    let r = || RadialProfile::monomial(1.0);
    let half_r = |c: Complex64| RadialProfile::scaled_monomial(c * 0.5, 1.0);
    let spec = match name {
        "1" => SymbolSpec::radial(name, RadialProfile::constant(1.0)),
        "z" => SymbolSpec::new(name).with_mode(1, r()),
        "zbar" => SymbolSpec::new(name).with_mode(-1, r()),
        "z^2" => SymbolSpec::new(name).with_mode(2, RadialProfile::monomial(2.0)),
        "zbar^2" => SymbolSpec::new(name).with_mode(-2, RadialProfile::monomial(2.0)),
        "re_z" => SymbolSpec::new(name).with_mode(1, half_r(one)).with_mode(-1, half_r(one)),
        "im_z" => SymbolSpec::new(name)
            .with_mode(1, half_r(Complex64::new(0.0, -1.0)))
            .with_mode(-1, half_r(Complex64::new(0.0, 1.0))),
        "|z|^2" => SymbolSpec::radial(name, RadialProfile::monomial(2.0)),
        "|z|^4" => SymbolSpec::radial(name, RadialProfile::monomial(4.0)),
        "1+|z|^2" => SymbolSpec::radial(name, RadialProfile::polynomial(vec![one, 0.0.into(), one])),
        "exp(-|z|)" => SymbolSpec::radial(name, RadialProfile::exp_decay(one, 0.0, 1.0)?),
        "z/(1+|z|)" => SymbolSpec::new(name).with_mode(
            1,
            RadialProfile::callable("r/(1+r)", Growth::BOUNDED, |r| Complex64::new(r / (1.0 + r), 0.0))?,
        ),
        "zbar*exp(-|z|^2)" => SymbolSpec::new(name).with_mode(-1, RadialProfile::gaussian(one, 1.0, 1.0)?),
        other => {
            return Err(Error::precondition(format!(
                "unknown symbol preset `{other}`; known presets: {}",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(spec)
}
