//! On-disk formats: theory files, state lists and player strategies.
//!
//! Files are JSON with every rational written as a quoted string in lowest
//! terms. Saved files have alphabetical keys, no insignificant whitespace
//! and a trailing newline, so `save(load(f))` reproduces canonical input
//! byte for byte.

use std::fmt;
use std::path::Path;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::composition::CompositeSystem;
use crate::error::GptError;
use crate::exactmath::{
    format_rational, parse_canonical_rational, Rational, RationalMatrix, RationalVector,
};
use crate::gpt::{ChannelMatrix, GptSystem};
use crate::zoo::TheoryRecipe;

pub const FORMAT_VERSION: u32 = 1;

/// A rational that must be spelled canonically in files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FileRational(pub Rational);

impl Serialize for FileRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for FileRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_canonical_rational(&text)
            .map(FileRational)
            .map_err(|e| de::Error::custom(format!("rational {text:?}: {e}")))
    }
}

fn to_file_vec(v: &RationalVector) -> Vec<FileRational> {
    v.iter().cloned().map(FileRational).collect()
}

fn from_file_vec(v: &[FileRational]) -> RationalVector {
    RationalVector::new(v.iter().map(|q| q.0.clone()).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoryFile {
    pub dim: usize,
    pub effect_generators: Vec<Vec<FileRational>>,
    pub format_version: u32,
    pub generators_exhaustive: bool,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recipe: Option<String>,
    pub state_generators: Vec<Vec<FileRational>>,
    pub unit: Vec<FileRational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatesFile {
    pub format_version: u32,
    pub states: Vec<Vec<FileRational>>,
}

/// `players[k][i]` is branch `i` of player `k`, as a list of rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategiesFile {
    pub format_version: u32,
    pub players: Vec<Vec<Vec<Vec<FileRational>>>>,
}

/// A failure to read a file, with a 1-based position when the problem is
/// located in the text.
#[derive(Debug)]
pub enum FormatError {
    Io {
        path: String,
        message: String,
    },
    Syntax {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    Content {
        path: String,
        error: GptError,
    },
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io { path, message } => write!(f, "{path}: {message}"),
            Self::Syntax {
                path,
                line,
                column,
                message,
            } => write!(f, "{path}:{line}:{column}: {message}"),
            Self::Content { path, error } => write!(f, "{path}: {error}"),
        }
    }
}

impl std::error::Error for FormatError {}

fn strip_position(message: String) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message,
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, path: &str) -> Result<T, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Syntax {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        message: strip_position(e.to_string()),
    })
}

fn read(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|e| FormatError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn check_version(version: u32, path: &str) -> Result<(), FormatError> {
    if version != FORMAT_VERSION {
        return Err(FormatError::Content {
            path: path.to_string(),
            error: GptError::Shape(format!(
                "unsupported format_version {version}, expected {FORMAT_VERSION}"
            )),
        });
    }
    Ok(())
}

/// A system together with its factor structure (a single factor unless the
/// file names a composite recipe).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadedTheory {
    pub composite: CompositeSystem,
    pub recipe: Option<TheoryRecipe>,
}

impl LoadedTheory {
    pub fn system(&self) -> &GptSystem {
        self.composite.system()
    }
}

impl TheoryFile {
    pub fn from_system(sys: &GptSystem, recipe: Option<&TheoryRecipe>) -> Self {
        Self {
            dim: sys.dim(),
            effect_generators: sys.effects().iter().map(to_file_vec).collect(),
            format_version: FORMAT_VERSION,
            generators_exhaustive: sys.exhaustive(),
            name: sys.name().to_string(),
            recipe: recipe.map(ToString::to_string),
            state_generators: sys.states().iter().map(to_file_vec).collect(),
            unit: to_file_vec(&RationalVector::new(sys.unit().coords().to_vec())),
        }
    }

    /// Canonical text: compact JSON plus a newline.
    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string(self).expect("theory files serialize");
        s.push('\n');
        s
    }

    pub fn parse(text: &str, path: &str) -> Result<Self, FormatError> {
        let file: Self = parse_json(text, path)?;
        check_version(file.format_version, path)?;
        Ok(file)
    }

    /// Build the system. A recipe, when present, must reproduce the listed
    /// generators exactly.
    pub fn into_theory(self, path: &str, max_dim: usize) -> Result<LoadedTheory, FormatError> {
        let content = |error| FormatError::Content {
            path: path.to_string(),
            error,
        };
        let sys = GptSystem::new(
            self.name.clone(),
            self.state_generators
                .iter()
                .map(|v| from_file_vec(v))
                .collect(),
            self.effect_generators
                .iter()
                .map(|v| from_file_vec(v))
                .collect(),
            from_file_vec(&self.unit),
        )
        .map_err(content)?
        .with_exhaustive(self.generators_exhaustive);
        if sys.dim() != self.dim {
            return Err(content(GptError::DimensionMismatch {
                expected: self.dim,
                found: sys.dim(),
            }));
        }
        let Some(text) = &self.recipe else {
            return Ok(LoadedTheory {
                composite: CompositeSystem::single(sys),
                recipe: None,
            });
        };
        let recipe: TheoryRecipe = text.parse().map_err(content)?;
        let mut composite = recipe.build_composite(max_dim).map_err(content)?;
        let built = composite.system();
        if built.states() != sys.states()
            || built.effects() != sys.effects()
            || built.unit() != sys.unit()
        {
            return Err(content(GptError::Shape(format!(
                "generators do not match recipe {text:?}"
            ))));
        }
        composite.rename(self.name);
        Ok(LoadedTheory {
            composite: with_exhaustive(composite, self.generators_exhaustive),
            recipe: Some(recipe),
        })
    }
}

fn with_exhaustive(composite: CompositeSystem, exhaustive: bool) -> CompositeSystem {
    if composite.system().exhaustive() == exhaustive {
        return composite;
    }
    let factors = composite.factors().to_vec();
    let sys = composite.into_system().with_exhaustive(exhaustive);
    CompositeSystem::from_parts(sys, factors)
}

pub fn load_theory_file(path: &Path, max_dim: usize) -> Result<LoadedTheory, FormatError> {
    let name = path.display().to_string();
    TheoryFile::parse(&read(path)?, &name)?.into_theory(&name, max_dim)
}

pub fn save_theory_file(
    path: &Path,
    sys: &GptSystem,
    recipe: Option<&TheoryRecipe>,
) -> Result<(), FormatError> {
    std::fs::write(path, TheoryFile::from_system(sys, recipe).to_text()).map_err(|e| {
        FormatError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    })
}

/// An existing file path is loaded; anything else must be a recipe.
pub fn resolve_theory(arg: &str, max_dim: usize) -> Result<LoadedTheory, FormatError> {
    let path = Path::new(arg);
    if path.is_file() {
        return load_theory_file(path, max_dim);
    }
    let recipe: TheoryRecipe = arg.parse().map_err(|error| FormatError::Content {
        path: arg.to_string(),
        error,
    })?;
    let composite = recipe
        .build_composite(max_dim)
        .map_err(|error| FormatError::Content {
            path: arg.to_string(),
            error,
        })?;
    Ok(LoadedTheory {
        composite,
        recipe: Some(recipe),
    })
}

impl StatesFile {
    pub fn from_vectors(states: &[RationalVector]) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            states: states.iter().map(to_file_vec).collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string(self).expect("state files serialize");
        s.push('\n');
        s
    }

    pub fn vectors(&self) -> Vec<RationalVector> {
        self.states.iter().map(|v| from_file_vec(v)).collect()
    }
}

pub fn load_states_file(path: &Path) -> Result<Vec<RationalVector>, FormatError> {
    let name = path.display().to_string();
    let file: StatesFile = parse_json(&read(path)?, &name)?;
    check_version(file.format_version, &name)?;
    Ok(file.vectors())
}

/// Branch matrices per player.
pub fn load_strategies_file(path: &Path) -> Result<Vec<Vec<ChannelMatrix>>, FormatError> {
    let name = path.display().to_string();
    let file: StrategiesFile = parse_json(&read(path)?, &name)?;
    check_version(file.format_version, &name)?;
    file.players
        .iter()
        .map(|player| {
            player
                .iter()
                .map(|rows| {
                    let rows: Vec<RationalVector> = rows.iter().map(|r| from_file_vec(r)).collect();
                    RationalMatrix::from_rows(&rows)
                        .map(ChannelMatrix::new)
                        .map_err(|e| FormatError::Content {
                            path: name.clone(),
                            error: e.into(),
                        })
                })
                .collect()
        })
        .collect()
}
