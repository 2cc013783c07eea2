//! Run configuration, read from flat TOML.
//!
//! ```toml
//! case = "planar-quadratic"   # planar-quadratic | ellipsoid | star | custom
//! mode = "helmholtz"          # helmholtz | pure-poisson
//! degrees = "2..24:2"         # or [2, 4, 6], "1..16", "2,4,8"
//! quad = "auto"               # or an integer order q
//! a = 0.5                     # planar map parameter
//! e_s = 5                     # star map smoothness exponent
//! matrix = [[1, -3, 0], [2, 1, 0], [1, 1, 1]]
//! out = "planar.csv"
//!
//! # custom cases only
//! dim = 2
//! map = "planar-quadratic"    # identity | planar-quadratic | linear | star
//! gamma = "exp(s - t)"
//! exact = "exp(-s^2) * cos(pi * t)"
//! source = "..."              # optional, derived from `exact` when absent
//! flux = "..."                # optional, may use n1, n2, n3
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use neumann_spectral::mapping::{LinearMap, PlanarQuadraticMap, StarShapedMap, TestSurface};
use neumann_spectral::Mode;

use crate::expr::{Expr, Variables};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseName {
    PlanarQuadratic,
    Ellipsoid,
    Star,
    Custom,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    #[default]
    Helmholtz,
    PurePoisson,
}

impl From<ModeName> for Mode {
    fn from(m: ModeName) -> Mode {
        match m {
            ModeName::Helmholtz => Mode::Helmholtz,
            ModeName::PurePoisson => Mode::PurePoisson,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapName {
    Identity,
    PlanarQuadratic,
    Linear,
    Star,
}

/// Quadrature order, fixed or `n + 4`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Quad {
    #[default]
    Auto,
    Order(usize),
}

impl Quad {
    pub fn order_for(self, degree: usize) -> usize {
        match self {
            Quad::Auto => neumann_spectral::Case::default_quad_order(degree),
            Quad::Order(q) => q,
        }
    }
}

impl std::str::FromStr for Quad {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        if s.trim() == "auto" {
            return Ok(Quad::Auto);
        }
        s.trim().parse().map(Quad::Order).map_err(|_| {
            CliError::validation(
                "quad",
                format!("expected an integer or \"auto\", got '{s}'"),
            )
        })
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quad::Auto => write!(f, "auto"),
            Quad::Order(q) => write!(f, "{q}"),
        }
    }
}

impl Serialize for Quad {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Quad::Auto => s.serialize_str("auto"),
            Quad::Order(q) => s.serialize_u64(*q as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Quad {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Order(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Order(q) => Ok(Quad::Order(q)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Parses `"2..24:2"`, `"1..16"`, `"2,4,8"` or `"20"`. Ranges are inclusive.
pub fn parse_degrees(text: &str) -> Result<Vec<usize>, CliError> {
    let bad = |why: &str| CliError::validation("degrees", format!("{why} in '{text}'"));
    let int = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| bad(&format!("'{}' is not a degree", s.trim())))
    };
    let text = text.trim();
    if let Some((lo, rest)) = text.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((hi, step)) => (hi, int(step)?),
            None => (rest, 1),
        };
        let (lo, hi) = (int(lo)?, int(hi)?);
        if step == 0 {
            return Err(bad("step must be positive"));
        }
        if hi < lo {
            return Err(bad("range end is below its start"));
        }
        return Ok((lo..=hi).step_by(step).collect());
    }
    text.split(',').map(int).collect()
}

fn deserialize_degrees<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<usize>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        List(Vec<usize>),
        One(usize),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::List(v) => Ok(v),
        Raw::One(n) => Ok(vec![n]),
        Raw::Text(t) => parse_degrees(&t).map_err(serde::de::Error::custom),
    }
}

fn default_a() -> f64 {
    0.5
}

fn default_e_s() -> u32 {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: CaseName,
    #[serde(default)]
    pub mode: ModeName,
    #[serde(default, deserialize_with = "deserialize_degrees")]
    pub degrees: Vec<usize>,
    #[serde(default)]
    pub quad: Quad,
    #[serde(default = "default_a")]
    pub a: f64,
    #[serde(default = "default_e_s")]
    pub e_s: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flux: Option<String>,
}

impl RunConfig {
    /// A built-in case with default parameters and no degrees yet.
    pub fn new(case: CaseName) -> Self {
        Self {
            case,
            mode: ModeName::default(),
            degrees: Vec::new(),
            quad: Quad::Auto,
            a: default_a(),
            e_s: default_e_s(),
            matrix: None,
            out: None,
            dim: None,
            map: None,
            gamma: None,
            exact: None,
            source: None,
            flux: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    /// Spatial dimension of the problem.
    pub fn dimension(&self) -> usize {
        match self.case {
            CaseName::PlanarQuadratic => 2,
            CaseName::Ellipsoid | CaseName::Star => 3,
            CaseName::Custom => self.dim.unwrap_or(0),
        }
    }

    /// The `matrix` entry as a `D × D` array, if present.
    pub fn matrix_as<const D: usize>(&self) -> Result<Option<[[f64; D]; D]>, CliError> {
        let Some(rows) = &self.matrix else {
            return Ok(None);
        };
        if rows.len() != D || rows.iter().any(|r| r.len() != D) {
            return Err(CliError::validation(
                "matrix",
                format!("expected a {D}x{D} matrix"),
            ));
        }
        let mut m = [[0.0; D]; D];
        for (i, row) in rows.iter().enumerate() {
            m[i].copy_from_slice(row);
        }
        Ok(Some(m))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.degrees.is_empty() {
            return Err(CliError::validation(
                "degrees",
                "at least one degree is required",
            ));
        }
        if self.degrees.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::validation(
                "degrees",
                "must be strictly ascending",
            ));
        }
        if self.quad == Quad::Order(0) {
            return Err(CliError::validation(
                "quad",
                "quadrature order must be >= 1",
            ));
        }
        let field = |name: &'static str| {
            move |e: neumann_spectral::Error| CliError::validation(name, e.to_string())
        };
        match self.case {
            CaseName::PlanarQuadratic => {
                PlanarQuadraticMap::new(self.a).map_err(field("a"))?;
            }
            CaseName::Ellipsoid => {
                if let Some(m) = self.matrix_as::<3>()? {
                    LinearMap::new(m).map_err(field("matrix"))?;
                }
            }
            CaseName::Star => {
                StarShapedMap::new(TestSurface, self.e_s).map_err(field("e_s"))?;
            }
            CaseName::Custom => self.validate_custom()?,
        }
        Ok(())
    }

    fn validate_custom(&self) -> Result<(), CliError> {
        let dim = match self.dim {
            Some(d @ (2 | 3)) => d,
            Some(d) => {
                return Err(CliError::validation(
                    "dim",
                    format!("must be 2 or 3, got {d}"),
                ))
            }
            None => return Err(CliError::validation("dim", "required for custom cases")),
        };
        let field = |name: &'static str| {
            move |e: neumann_spectral::Error| CliError::validation(name, e.to_string())
        };
        match self.map {
            None => return Err(CliError::validation("map", "required for custom cases")),
            Some(MapName::Identity) => {}
            Some(MapName::PlanarQuadratic) => {
                if dim != 2 {
                    return Err(CliError::validation(
                        "map",
                        "planar-quadratic needs dim = 2",
                    ));
                }
                PlanarQuadraticMap::new(self.a).map_err(field("a"))?;
            }
            Some(MapName::Linear) => {
                if self.matrix.is_none() {
                    return Err(CliError::validation(
                        "matrix",
                        "required for the linear map",
                    ));
                }
                if dim == 2 {
                    LinearMap::new(self.matrix_as::<2>()?.unwrap()).map_err(field("matrix"))?;
                } else {
                    LinearMap::new(self.matrix_as::<3>()?.unwrap()).map_err(field("matrix"))?;
                }
            }
            Some(MapName::Star) => {
                if dim != 3 {
                    return Err(CliError::validation("map", "star needs dim = 3"));
                }
                StarShapedMap::new(TestSurface, self.e_s).map_err(field("e_s"))?;
            }
        }
        match (self.mode, &self.gamma) {
            (ModeName::Helmholtz, None) => {
                return Err(CliError::validation("gamma", "required in helmholtz mode"))
            }
            (ModeName::PurePoisson, Some(_)) => {
                return Err(CliError::validation(
                    "gamma",
                    "must be absent in pure-poisson mode",
                ))
            }
            _ => {}
        }
        if self.exact.is_none() && (self.source.is_none() || self.flux.is_none()) {
            return Err(CliError::validation(
                "exact",
                "give an exact solution, or both source and flux",
            ));
        }
        let coords = Variables::coordinates(dim);
        for (name, text) in [
            ("gamma", &self.gamma),
            ("exact", &self.exact),
            ("source", &self.source),
        ] {
            if let Some(text) = text {
                Expr::parse(text, coords).map_err(|e| CliError::validation(name, e.to_string()))?;
            }
        }
        if let Some(text) = &self.flux {
            Expr::parse(text, Variables::with_normals(dim))
                .map_err(|e| CliError::validation("flux", e.to_string()))?;
        }
        Ok(())
    }
}
