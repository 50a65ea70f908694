// SPDX-License-Identifier: Apache-2.0

//! Versioned JSON encoding of datasets.
//!
//! Numbers may be JSON numbers, decimal strings or `"a/b"` strings; all are
//! read exactly. Output always uses strings so nothing is lost on the way back.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dataset::{
    Color, Dataset, Model, Shape, StochasticObject, StochasticPoint, UncertainPoint,
};
use crate::error::{Error, Result};
use crate::scalar::parse_rational;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDataset {
    version: u32,
    dimension: usize,
    model: Model,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    points: Vec<RawPoint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    uncertain_points: Vec<RawUncertain>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    objects: Vec<RawObject>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    color: Color,
    coords: Vec<Value>,
    prob: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUncertain {
    color: Color,
    locations: Vec<RawLocation>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLocation {
    coords: Vec<Value>,
    prob: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObject {
    color: Color,
    prob: Value,
    shape: RawShape,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum RawShape {
    Ball { center: Vec<Value>, radius: Value },
    Polytope { vertices: Vec<Vec<Value>> },
}

fn number(v: &Value) -> Result<BigRational> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => return Err(Error::Malformed(format!("expected a number, found {other}"))),
    };
    parse_rational(&text).ok_or_else(|| Error::Malformed(format!("cannot parse number {text:?}")))
}

fn coords(v: &[Value]) -> Result<Vec<BigRational>> {
    v.iter().map(number).collect()
}

fn render(r: &BigRational) -> Value {
    if r.is_integer() {
        Value::String(r.numer().to_string())
    } else {
        Value::String(crate::scalar::format_rational(r))
    }
}

fn render_coords(p: &[BigRational]) -> Vec<Value> {
    p.iter().map(render).collect()
}

/// Parses and checks a dataset document.
pub fn parse_dataset(bytes: &[u8]) -> Result<Dataset> {
    let raw: RawDataset = serde_json::from_slice(bytes)?;
    if raw.version != FORMAT_VERSION {
        return Err(Error::Malformed(format!("unsupported version {}", raw.version)));
    }
    let mut ds = Dataset::new(raw.dimension, raw.model);
    for p in raw.points {
        ds.points.push(StochasticPoint {
            coords: coords(&p.coords)?,
            color: p.color,
            prob: number(&p.prob)?,
        });
    }
    for u in raw.uncertain_points {
        let mut locations = Vec::new();
        for l in u.locations {
            locations.push((coords(&l.coords)?, number(&l.prob)?));
        }
        ds.uncertain_points.push(UncertainPoint {
            color: u.color,
            locations,
        });
    }
    for o in raw.objects {
        let shape = match o.shape {
            RawShape::Ball { center, radius } => Shape::Ball {
                center: coords(&center)?,
                radius: number(&radius)?,
            },
            RawShape::Polytope { vertices } => Shape::Polytope {
                vertices: vertices.iter().map(|v| coords(v)).collect::<Result<_>>()?,
            },
        };
        ds.objects.push(StochasticObject {
            color: o.color,
            prob: number(&o.prob)?,
            shape,
        });
    }
    ds.check()?;
    Ok(ds)
}

/// Pretty-printed JSON document for `ds`.
pub fn to_json_string(ds: &Dataset) -> String {
    let raw = RawDataset {
        version: FORMAT_VERSION,
        dimension: ds.dimension,
        model: ds.model,
        points: ds
            .points
            .iter()
            .map(|p| RawPoint {
                color: p.color,
                coords: render_coords(&p.coords),
                prob: render(&p.prob),
            })
            .collect(),
        uncertain_points: ds
            .uncertain_points
            .iter()
            .map(|u| RawUncertain {
                color: u.color,
                locations: u
                    .locations
                    .iter()
                    .map(|(c, p)| RawLocation {
                        coords: render_coords(c),
                        prob: render(p),
                    })
                    .collect(),
            })
            .collect(),
        objects: ds
            .objects
            .iter()
            .map(|o| RawObject {
                color: o.color,
                prob: render(&o.prob),
                shape: match &o.shape {
                    Shape::Ball { center, radius } => RawShape::Ball {
                        center: render_coords(center),
                        radius: render(radius),
                    },
                    Shape::Polytope { vertices } => RawShape::Polytope {
                        vertices: vertices.iter().map(|v| render_coords(v)).collect(),
                    },
                },
            })
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("dataset serialization cannot fail")
}
