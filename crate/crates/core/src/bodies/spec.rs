//! Human-readable body descriptions (TOML).
//!
//! ```toml
//! kind = "ellipsoid"
//! center = [0.0, 0.0, 0.0]
//! semi_axes = [1.0, 1.0, 2.0]
//! rotation = [{ axis = 1, angle_over_pi = 0.1875 }, { axis = 2, angle_over_pi = 0.3125 }]
//! ```
//!
//! Rotation steps are applied in the order listed, each about a coordinate
//! axis (1-based). In the plane the axis is ignored.

use serde::{Deserialize, Serialize};

use super::ConvexBody;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationStep {
    #[serde(default = "default_axis")]
    pub axis: usize,
    #[serde(default)]
    pub angle: Option<f64>,
    #[serde(default)]
    pub angle_over_pi: Option<f64>,
}

fn default_axis() -> usize {
    3
}

impl RotationStep {
    fn radians(&self) -> Result<f64> {
        match (self.angle, self.angle_over_pi) {
            (Some(a), None) => Ok(a),
            (None, Some(a)) => Ok(a * std::f64::consts::PI),
            _ => Err(Error::Config("rotation step needs exactly one of `angle`, `angle_over_pi`".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BodySpec {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Ellipsoid {
        center: Vec<f64>,
        semi_axes: Vec<f64>,
        #[serde(default)]
        rotation: Vec<RotationStep>,
    },
    Polygon {
        vertices: Vec<[f64; 2]>,
        #[serde(default)]
        rotation: Vec<RotationStep>,
    },
    Polytope {
        facets: Vec<Vec<[f64; 3]>>,
        #[serde(default)]
        rotation: Vec<RotationStep>,
    },
    #[serde(rename = "box")]
    Cuboid {
        center: Vec<f64>,
        half_extents: Vec<f64>,
        #[serde(default)]
        rotation: Vec<RotationStep>,
    },
    Segment {
        p: Vec<f64>,
        q: Vec<f64>,
    },
}

impl BodySpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn build(&self) -> Result<ConvexBody> {
        match self {
            Self::Ball { center, radius } => ConvexBody::ball(center, *radius),
            Self::Ellipsoid { center, semi_axes, rotation } => {
                let rot = compose(center.len(), rotation)?;
                ConvexBody::ellipsoid(center, semi_axes, rot)
            }
            Self::Polygon { vertices, rotation } => rotate_about_origin(ConvexBody::polygon(vertices)?, rotation),
            Self::Polytope { facets, rotation } => rotate_about_origin(ConvexBody::polytope(facets)?, rotation),
            Self::Cuboid { center, half_extents, rotation } => {
                // rotate the box about its own centre
                let zero = vec![0.0; center.len()];
                let body = rotate_about_origin(ConvexBody::cuboid(&zero, half_extents)?, rotation)?;
                body.translated(center)
            }
            Self::Segment { p, q } => ConvexBody::segment(p, q),
        }
    }
}

fn rotate_about_origin(body: ConvexBody, steps: &[RotationStep]) -> Result<ConvexBody> {
    if steps.is_empty() {
        return Ok(body);
    }
    let rot = compose(body.dim(), steps)?;
    body.rotated(&rot)
}

/// Product of the listed rotations, the first listed acting first.
pub(crate) fn compose(dim: usize, steps: &[RotationStep]) -> Result<Matrix> {
    let mut m = linalg::identity(dim);
    for s in steps {
        if s.axis == 0 || (dim == 3 && s.axis > 3) {
            return Err(Error::Config(format!("rotation axis {} out of range 1..=3", s.axis)));
        }
        let r = linalg::axis_rotation(dim, s.axis - 1, s.radians()?)?;
        m = linalg::mat_mul(&r, &m);
    }
    Ok(m)
}
