// SPDX-License-Identifier: Apache-2.0

//! Declarative experiment files.
//!
//! A scenario is a JSON object with `"schema": 1`. Matrices are row-major
//! arrays of rows, and functions, sources, functionals, comparison systems
//! and checks are all referenced as `{"name": ..., "params": {...}}`.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use setflow_core::convex::{
    check_grid, make_ball, make_point, make_polygon, make_rectangle, make_segment, make_square,
    validate, LinearOperator2D, SupportFunction2D, DEFAULT_GRID,
};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

fn default_grid() -> usize {
    DEFAULT_GRID
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_grid")]
    pub grid_size: usize,
    pub horizon: f64,
    pub dt: f64,
    /// Keep every n-th step in the output; about 1000 rows when omitted.
    #[serde(default)]
    pub store_every: Option<usize>,
    pub initial_body: BodySpec,
    pub params: ParamsSpec,
    #[serde(default)]
    pub functionals: Vec<Component>,
    #[serde(default)]
    pub checks: Vec<Component>,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Ball {
        radius: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    Point {
        at: [f64; 2],
    },
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
    Segment {
        length: f64,
    },
    Rectangle {
        width: f64,
        height: f64,
    },
    Square {
        side: f64,
    },
    /// Explicit support values on the `grid_size` grid.
    Support {
        values: Vec<f64>,
    },
}

impl BodySpec {
    pub fn build(&self, m: usize) -> Result<SupportFunction2D, CliError> {
        let bad = |e: setflow_core::convex::GeometryError| CliError::schema(format!("initial_body: {e}"));
        let body = match self {
            Self::Ball { radius, center } => make_ball(*radius, *center, m).map_err(bad)?,
            Self::Point { at } => make_point(*at, m).map_err(bad)?,
            Self::Polygon { vertices } => {
                if vertices.is_empty() {
                    return Err(CliError::schema("polygon needs at least one vertex"));
                }
                make_polygon(vertices, m).map_err(bad)?
            }
            Self::Segment { length } => make_segment(*length, m).map_err(bad)?,
            Self::Rectangle { width, height } => make_rectangle(*width, *height, m).map_err(bad)?,
            Self::Square { side } => make_square(*side, m).map_err(bad)?,
            Self::Support { values } => {
                if values.len() != m {
                    return Err(CliError::schema(format!(
                        "support body has {} values, grid_size is {m}",
                        values.len()
                    )));
                }
                let violations = validate(values);
                if let Some(v) = violations.first() {
                    return Err(CliError::schema(format!("support values are not a convex body: {v:?}")));
                }
                SupportFunction2D::from_values(values.clone()).map_err(bad)?
            }
        };
        Ok(body)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub a: Vec<Vec<f64>>,
    pub phi: Component,
    pub source: Component,
    #[serde(default)]
    pub interpolation: Option<String>,
}

/// `{"name": ..., "params": {...}}`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub name: String,
    #[serde(default)]
    pub params: Map<String, Value>,
}

impl Component {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            params: Map::new(),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default)]
    pub csv: Option<String>,
    #[serde(default)]
    pub json: Option<String>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| CliError::schema(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema != SCHEMA_VERSION {
            return Err(CliError::schema(format!(
                "unsupported schema {}, expected {SCHEMA_VERSION}",
                self.schema
            )));
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(CliError::schema(format!("invalid scenario name {:?}", self.name)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(CliError::schema(format!("horizon must be positive, got {}", self.horizon)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) || self.dt > self.horizon {
            return Err(CliError::schema(format!("dt must be in (0, horizon], got {}", self.dt)));
        }
        check_grid(self.grid_size).map_err(|e| CliError::schema(e.to_string()))?;
        if self.store_every == Some(0) {
            return Err(CliError::schema("store_every must be positive"));
        }
        matrix(&self.params.a).map_err(|e| CliError::schema(format!("params.a: {e}")))?;
        Ok(())
    }
}

/// Row-major 2×2 matrix.
pub fn matrix(rows: &[Vec<f64>]) -> Result<LinearOperator2D, String> {
    if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
        return Err("expected a 2x2 row-major matrix".into());
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err("matrix entries must be finite".into());
    }
    Ok(LinearOperator2D::from_entries(rows[0][0], rows[0][1], rows[1][0], rows[1][1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "schema": 1, "name": "m", "horizon": 1.0, "dt": 0.1, "grid_size": 64,
        "initial_body": {"kind": "ball", "radius": 1.0},
        "params": {"a": [[-1, 0], [0, -1]], "phi": {"name": "constant", "params": {"value": 1}},
                   "source": {"name": "zero"}}
    }"#;

    #[test]
    fn minimal_file_parses() {
        let s = Scenario::from_json(MINIMAL).unwrap();
        assert_eq!(s.seed, 0);
        assert!(s.checks.is_empty());
        assert_eq!(s.initial_body.build(64).unwrap().grid_size(), 64);
    }

    #[test]
    fn schema_violations_are_reported() {
        let bad = [
            MINIMAL.replace("\"schema\": 1", "\"schema\": 2"),
            MINIMAL.replace("\"dt\": 0.1", "\"dt\": -0.1"),
            MINIMAL.replace("\"grid_size\": 64", "\"grid_size\": 63"),
            MINIMAL.replace("[[-1, 0], [0, -1]]", "[[-1, 0, 0], [0, -1]]"),
            MINIMAL.replace("\"radius\"", "\"radios\""),
            MINIMAL.replace("\"horizon\"", "\"horizont\""),
            "{".to_string(),
        ];
        for text in bad {
            assert!(matches!(Scenario::from_json(&text), Err(CliError::Schema(_))), "{text}");
        }
    }

    #[test]
    fn explicit_support_values_must_match_grid() {
        let body = BodySpec::Support { values: vec![1.0; 32] };
        assert!(body.build(64).is_err());
        assert!(body.build(32).is_ok());
        let dent = BodySpec::Support {
            values: (0..32).map(|j| if j == 5 { 0.2 } else { 1.0 }).collect(),
        };
        assert!(dent.build(32).is_err());
    }
}
