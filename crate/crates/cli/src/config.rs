//! Option structs shared by flags and TOML config files, plus the named
//! body and grain presets.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use crofton::bodies::{BodySpec, ConvexBody};
use crofton::particle_process::GrainModel;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Declares an option struct whose fields are all optional, usable as
/// clap flags and as a TOML table, with a field-wise `merge`.
macro_rules! options {
    ($(#[$sm:meta])* $name:ident { $($(#[$fm:meta])* $field:ident : $ty:ty),* $(,)? }) => {
        $(#[$sm])*
        #[derive(Args, Serialize, Deserialize, Default, Debug, Clone, PartialEq)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $(
                $(#[$fm])*
                #[arg(long)]
                #[serde(skip_serializing_if = "Option::is_none")]
                pub $field: Option<$ty>,
            )*
        }

        impl $name {
            /// Values set here win over those of `other`.
            pub fn merge(self, other: Self) -> Self {
                Self { $($field: self.$field.or(other.$field)),* }
            }
        }
    };
}

options!(CoeffsOpts {
    /// Tensor rank (even).
    s: usize,
    /// Ambient dimension.
    n: usize,
});

options!(TruthOpts {
    /// Preset name, path of a body TOML file, or (in config files) an inline table.
    body: BodyArg,
    s: usize,
    direction_nodes: usize,
    offset_nodes: usize,
});

options!(EstimateOpts {
    /// iur, frame_iur, proj, frame, syst, vert, vert_width or weighted.
    design: String,
    body: BodyArg,
    s: usize,
    reps: u64,
    seed: u64,
    /// Radius of the centered reference ball.
    reference_radius: f64,
    /// Number of lines (proj, syst).
    lines: usize,
    /// Component for the weighted design: 11, 12 or 22.
    component: String,
    /// uniform, fstar, fstarK, cosine or power4.
    density: String,
    /// Vertical axis for the vertical designs.
    #[arg(value_delimiter = ',', allow_hyphen_values = true)]
    vertical: Vec<f64>,
});

options!(Figure1Opts {
    eps: f64,
    grid: usize,
    max_lines: usize,
});

options!(Figure2Opts {
    #[arg(value_delimiter = ',')]
    elongations: Vec<f64>,
    hit_probability: f64,
    reps: u64,
    seed: u64,
});

options!(CurvesOpts {
    /// Number of equidistant angles in [0, π].
    grid: usize,
});

options!(ProcessOpts {
    gamma: f64,
    /// Preset name or path of a grain TOML file.
    grain: GrainArg,
    /// Side length of the cubic window.
    window: f64,
    #[arg(value_delimiter = ',')]
    s: Vec<usize>,
    /// Test lines per realization.
    lines: usize,
    /// Length of each test segment.
    seglen: f64,
    /// iid or systematic.
    design: String,
    reps: u64,
    seed: u64,
});

options!(SelfcheckOpts {
    /// Largest n in the exact binomial identity check.
    identity_max: u32,
});

/// A body given by preset name, file path or inline table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BodyArg {
    Name(String),
    Inline(BodySpec),
}

impl FromStr for BodyArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Self::Name(s.to_string()))
    }
}

pub const BODY_PRESETS: [&str; 6] = ["disk", "square", "triangle", "ellipse", "ball", "spheroid"];

pub fn body_preset(name: &str) -> Option<ConvexBody> {
    let b = match name {
        "disk" => ConvexBody::ball(&[0.0, 0.0], 1.0),
        "square" => ConvexBody::cuboid(&[0.5, 0.5], &[0.5, 0.5]),
        "triangle" => ConvexBody::polygon(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
        "ellipse" => ConvexBody::axis_ellipsoid(&[2.0, 1.0]),
        "ball" => ConvexBody::ball(&[0.0; 3], 1.0),
        "spheroid" => ConvexBody::axis_ellipsoid(&[1.0, 1.0, 2.0]),
        _ => return None,
    };
    b.ok()
}

impl BodyArg {
    /// Resolves the body; relative paths are taken from `base`.
    pub fn build(&self, base: &Path) -> Result<ConvexBody, CliError> {
        match self {
            Self::Inline(spec) => Ok(spec.build()?),
            Self::Name(name) => {
                if let Some(b) = body_preset(name) {
                    return Ok(b);
                }
                let path = base.join(name);
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    CliError::Config(format!(
                        "body `{name}` is neither a preset ({}) nor a readable file: {e}",
                        BODY_PRESETS.join(", ")
                    ))
                })?;
                Ok(BodySpec::from_toml(&text)?.build()?)
            }
        }
    }
}

/// A grain law given by preset name, file path or inline table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GrainArg {
    Name(String),
    Inline(GrainModel),
}

impl FromStr for GrainArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Self::Name(s.to_string()))
    }
}

pub fn grain_preset(name: &str) -> Option<GrainModel> {
    Some(match name {
        "disk" => GrainModel::FixedDisk { radius: 0.5 },
        "random_disk" => GrainModel::RandomDisk { min: 0.25, max: 0.75 },
        "ellipse" => GrainModel::RotatedEllipse { semi_axes: [0.6, 0.2] },
        "spheroid" => GrainModel::RotatedSpheroid { a: 0.3, c: 0.6 },
        _ => return None,
    })
}

impl GrainArg {
    pub fn build(&self, base: &Path) -> Result<GrainModel, CliError> {
        match self {
            Self::Inline(g) => Ok(g.clone()),
            Self::Name(name) => {
                if let Some(g) = grain_preset(name) {
                    return Ok(g);
                }
                let text = std::fs::read_to_string(base.join(name))
                    .map_err(|e| CliError::Config(format!("grain `{name}` is neither a preset nor a readable file: {e}")))?;
                toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))
            }
        }
    }
}

/// Reads a config file into an option struct; unknown keys are errors.
pub fn load<T: for<'de> Deserialize<'de> + Default>(path: Option<&PathBuf>) -> Result<T, CliError> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        }
    }
}

/// Canonical TOML of a resolved option struct.
pub fn canonical<T: Serialize>(opts: &T) -> Result<String, CliError> {
    toml::to_string(opts).map_err(|e| CliError::Config(e.to_string()))
}

pub fn require<T: Clone>(v: &Option<T>, name: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| CliError::Config(format!("missing required option `{name}`")))
}
