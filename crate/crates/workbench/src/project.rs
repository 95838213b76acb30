//! Versioned JSON project files.
//!
//! A project is one JSON document. Images live beside it and are referenced
//! by relative path, so a project directory can be zipped and moved.

use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use lostwater_core::hydro::{ManualAnnotation, MapStyle, WaterColorConfig};
use lostwater_core::raster::{load_png, GeoReference, Raster, RasterError};
use lostwater_core::transform::{validate_gcps, ControlPointPair, TransformRecord};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

const TOP_LEVEL_FIELDS: [&str; 9] = [
    "schema_version",
    "name",
    "revision",
    "images",
    "gcps",
    "transform",
    "water_config",
    "annotations",
    "audit",
];

#[derive(Debug, Error)]
pub enum ProjectError {
    #[error("IoError: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("SchemaError: {0}")]
    Schema(String),
    #[error("UnsupportedSchema: {0}")]
    UnsupportedSchema(String),
    #[error("MissingImage: {}", .0.display())]
    MissingImage(PathBuf),
    #[error("InvalidImage: {path}: {source}")]
    InvalidImage {
        path: PathBuf,
        #[source]
        source: RasterError,
    },
}

impl ProjectError {
    pub fn name(&self) -> &'static str {
        match self {
            ProjectError::Io { .. } => "IoError",
            ProjectError::Schema(_) => "SchemaError",
            ProjectError::UnsupportedSchema(_) => "UnsupportedSchema",
            ProjectError::MissingImage(_) => "MissingImage",
            ProjectError::InvalidImage { .. } => "InvalidImage",
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        ProjectError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, ProjectError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Historical,
    Modern,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Historical => "historical",
            Role::Modern => "modern",
        }
    }
}

impl std::str::FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "historical" => Ok(Role::Historical),
            "modern" => Ok(Role::Modern),
            other => Err(format!("unknown image role {other:?}, expected historical or modern")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageRef {
    /// Relative to the project file's directory, or absolute.
    pub path: PathBuf,
    #[serde(default)]
    pub georef: Option<GeoReference>,
    pub style: MapStyle,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Images {
    #[serde(default)]
    pub historical: Option<ImageRef>,
    #[serde(default)]
    pub modern: Option<ImageRef>,
}

impl Images {
    pub fn get(&self, role: Role) -> Option<&ImageRef> {
        match role {
            Role::Historical => self.historical.as_ref(),
            Role::Modern => self.modern.as_ref(),
        }
    }

    pub fn set(&mut self, role: Role, image: ImageRef) {
        match role {
            Role::Historical => self.historical = Some(image),
            Role::Modern => self.modern = Some(image),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaterConfigs {
    pub historical: WaterColorConfig,
    pub modern: WaterColorConfig,
}

impl Default for WaterConfigs {
    fn default() -> Self {
        WaterConfigs {
            historical: WaterColorConfig::for_style(MapStyle::HistoricalWash),
            modern: WaterColorConfig::for_style(MapStyle::ModernBasemap),
        }
    }
}

impl WaterConfigs {
    pub fn get(&self, role: Role) -> &WaterColorConfig {
        match role {
            Role::Historical => &self.historical,
            Role::Modern => &self.modern,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Audit {
    pub created: DateTime<Utc>,
    pub modified: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Project {
    pub schema_version: u32,
    pub name: String,
    /// Bumped on every mutation; used for optimistic concurrency.
    #[serde(default)]
    pub revision: u64,
    #[serde(default)]
    pub images: Images,
    #[serde(default)]
    pub gcps: Vec<ControlPointPair>,
    #[serde(default)]
    pub transform: Option<TransformRecord>,
    #[serde(default)]
    pub water_config: WaterConfigs,
    #[serde(default)]
    pub annotations: Vec<ManualAnnotation>,
    pub audit: Audit,
}

impl Project {
    pub fn new(name: impl Into<String>) -> Self {
        let now = Utc::now();
        Project {
            schema_version: SCHEMA_VERSION,
            name: name.into(),
            revision: 0,
            images: Images::default(),
            gcps: Vec::new(),
            transform: None,
            water_config: WaterConfigs::default(),
            annotations: Vec::new(),
            audit: Audit {
                created: now,
                modified: now,
            },
        }
    }

    /// Records a mutation: next revision, fresh modification time.
    pub fn touch(&mut self) {
        self.revision += 1;
        self.audit.modified = Utc::now().max(self.audit.modified);
    }

    /// Schema-level checks that do not touch the filesystem.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ProjectError::UnsupportedSchema(format!(
                "schema_version {} (this build reads {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        validate_gcps(&self.gcps).map_err(|e| ProjectError::Schema(e.to_string()))?;
        for a in &self.annotations {
            a.validate().map_err(|e| ProjectError::Schema(e.to_string()))?;
        }
        self.water_config
            .historical
            .validate()
            .and(self.water_config.modern.validate())
            .map_err(|e| ProjectError::Schema(e.to_string()))?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ProjectError::Schema(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| ProjectError::Schema("project must be a JSON object".into()))?;
        match obj.get("schema_version").and_then(|v| v.as_u64()) {
            Some(v) if v == SCHEMA_VERSION as u64 => {}
            Some(v) => {
                return Err(ProjectError::UnsupportedSchema(format!(
                    "schema_version {v} (this build reads {SCHEMA_VERSION})"
                )))
            }
            None => return Err(ProjectError::Schema("missing integer schema_version".into())),
        }
        if let Some(k) = obj.keys().find(|k| !TOP_LEVEL_FIELDS.contains(&k.as_str())) {
            return Err(ProjectError::UnsupportedSchema(format!("unknown field {k:?}")));
        }
        let p: Project =
            serde_json::from_value(value).map_err(|e| ProjectError::Schema(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("project serializes")
    }

    /// Reads and validates the document only; images are not touched.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ProjectError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Reads and validates a project, checking that every referenced image
    /// exists and decodes.
    pub fn open(path: &Path) -> Result<Self> {
        let p = Self::read(path)?;
        let dir = project_dir(path);
        for role in [Role::Historical, Role::Modern] {
            if p.images.get(role).is_some() {
                p.load_image(&dir, role)?;
            }
        }
        Ok(p)
    }

    /// Atomic write: temp file in the same directory, then rename.
    pub fn save(&self, path: &Path) -> Result<()> {
        let dir = project_dir(path);
        let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| ProjectError::io(&dir, e))?;
        tmp.write_all(self.to_json().as_bytes())
            .and_then(|_| tmp.as_file().sync_all())
            .map_err(|e| ProjectError::io(tmp.path(), e))?;
        tmp.persist(path).map_err(|e| ProjectError::io(path, e.error))?;
        Ok(())
    }

    pub fn image_path(&self, dir: &Path, role: Role) -> Option<PathBuf> {
        self.images.get(role).map(|img| dir.join(&img.path))
    }

    /// Loads the raster for `role`. The project's GeoReference, if any, is
    /// attached to it.
    pub fn load_image(&self, dir: &Path, role: Role) -> Result<Raster> {
        let img = self
            .images
            .get(role)
            .ok_or_else(|| ProjectError::MissingImage(PathBuf::from(role.as_str())))?;
        let path = dir.join(&img.path);
        if !path.is_file() {
            return Err(ProjectError::MissingImage(path));
        }
        let raster = load_png(&path).map_err(|source| ProjectError::InvalidImage {
            path: path.clone(),
            source,
        })?;
        Ok(raster.with_georef(img.georef))
    }
}

/// Directory a project's relative image paths resolve against.
pub fn project_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}
