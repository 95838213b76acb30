//! fit → warp → extract → diff → render → vectorize → report.

use std::fmt;
use std::path::{Path, PathBuf};

use lostwater_core::hydro::{
    diff_masks, extract_water, geojson, render_changemap, vectorize, ChangeClass, ChangeMap,
    ChangePolygon, Provenance, RenderStyle, WaterMask,
};
use lostwater_core::raster::{composite, png_bytes, warp, Raster, WarpSpec};
use lostwater_core::transform::{fit_record, TransformKind, TransformRecord};

use crate::project::{Project, Role};
use crate::report::{build_report, render_html, ChangeReport};

pub const OVERLAY_ALPHA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Load,
    Fit,
    Warp,
    Extract,
    Diff,
    Render,
    Vectorize,
    Write,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Load => "load",
            Stage::Fit => "fit",
            Stage::Warp => "warp",
            Stage::Extract => "extract",
            Stage::Diff => "diff",
            Stage::Render => "render",
            Stage::Vectorize => "vectorize",
            Stage::Write => "write",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A failure tagged with the stage it happened in and the underlying
/// error's name.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineError {
    pub stage: Stage,
    pub name: &'static str,
    pub message: String,
}

impl PipelineError {
    pub fn new(stage: Stage, name: &'static str, message: impl fmt::Display) -> Self {
        PipelineError {
            stage,
            name,
            message: message.to_string(),
        }
    }
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {}: {}", self.stage, self.message)
    }
}

impl std::error::Error for PipelineError {}

macro_rules! at {
    ($stage:expr) => {
        |e| PipelineError::new($stage, e.name(), &e)
    };
}

pub type Result<T> = std::result::Result<T, PipelineError>;

pub struct Inputs {
    pub historical: Raster,
    pub modern: Raster,
}

pub fn load_inputs(project: &Project, dir: &Path) -> Result<Inputs> {
    let historical = project.load_image(dir, Role::Historical).map_err(at!(Stage::Load))?;
    let modern = project.load_image(dir, Role::Modern).map_err(at!(Stage::Load))?;
    Ok(Inputs { historical, modern })
}

pub fn fit(project: &Project, kind: TransformKind) -> Result<TransformRecord> {
    fit_record(&project.gcps, kind).map_err(at!(Stage::Fit))
}

/// The historical raster resampled into the modern raster's pixel grid.
pub fn warp_historical(inputs: &Inputs, record: &TransformRecord) -> Result<Raster> {
    let spec = WarpSpec::new(record.backward.clone(), inputs.modern.width(), inputs.modern.height())
        .with_georef(inputs.modern.georef);
    warp(&inputs.historical, &spec).map_err(at!(Stage::Warp))
}

pub fn overlay(inputs: &Inputs, warped: &Raster, alpha: f64) -> Result<Raster> {
    composite(&inputs.modern, warped, alpha).map_err(at!(Stage::Render))
}

/// Both water masks in the modern frame. Modern water outside the warped
/// historical footprint is dropped: the old map says nothing there.
pub fn water_masks(project: &Project, inputs: &Inputs, warped: &Raster) -> (WaterMask, WaterMask) {
    let historical = extract_water(warped, &project.water_config.historical);
    let mut modern = extract_water(&inputs.modern, &project.water_config.modern);
    let footprint: Vec<bool> = warped.pixels().chunks_exact(4).map(|p| p[3] > 0).collect();
    let bits: Vec<bool> = modern.bits().iter().zip(&footprint).map(|(&m, &f)| m && f).collect();
    modern = WaterMask::new(modern.width(), modern.height(), bits)
        .expect("same grid")
        .with_georef(modern.georef);
    (historical, modern)
}

pub fn change_map(project: &Project, historical: &WaterMask, modern: &WaterMask, kind: TransformKind) -> Result<ChangeMap> {
    let mut c = diff_masks(historical, modern).map_err(at!(Stage::Diff))?;
    c.provenance = Provenance {
        historical: image_label(project, Role::Historical),
        modern: image_label(project, Role::Modern),
        transform: kind.to_string(),
    };
    c.annotations = project.annotations.clone();
    Ok(c)
}

fn image_label(project: &Project, role: Role) -> String {
    project
        .images
        .get(role)
        .map(|i| i.path.display().to_string())
        .unwrap_or_default()
}

pub fn polygons(c: &ChangeMap) -> Vec<ChangePolygon> {
    [ChangeClass::Lost, ChangeClass::Persistent, ChangeClass::New]
        .into_iter()
        .flat_map(|class| vectorize(c, class))
        .collect()
}

/// In-memory results of a pipeline run.
pub struct PipelineOutput {
    pub record: TransformRecord,
    pub change: ChangeMap,
    pub polygons: Vec<ChangePolygon>,
    pub report: ChangeReport,
    pub artifacts: Artifacts,
}

/// Encoded artifact bytes, in the order they are written.
pub struct Artifacts {
    pub overlay_png: Vec<u8>,
    pub change_png: Vec<u8>,
    pub change_world_file: Option<String>,
    pub geojson: String,
    pub report_json: String,
    pub report_html: String,
}

pub const ARTIFACT_FILES: [&str; 6] = [
    "overlay.png",
    "change.png",
    "change.pgw",
    "change.geojson",
    "report.json",
    "report.html",
];

impl Artifacts {
    /// Writes every artifact into `out_dir`, returning the paths written.
    pub fn write(&self, out_dir: &Path) -> Result<Vec<PathBuf>> {
        let io = |p: &Path, e: std::io::Error| {
            PipelineError::new(Stage::Write, "IoError", format!("{}: {e}", p.display()))
        };
        std::fs::create_dir_all(out_dir).map_err(|e| io(out_dir, e))?;
        let mut files: Vec<(&str, &[u8])> = vec![
            ("overlay.png", &self.overlay_png),
            ("change.png", &self.change_png),
        ];
        if let Some(w) = &self.change_world_file {
            files.push(("change.pgw", w.as_bytes()));
        }
        files.push(("change.geojson", self.geojson.as_bytes()));
        files.push(("report.json", self.report_json.as_bytes()));
        files.push(("report.html", self.report_html.as_bytes()));
        let mut written = Vec::new();
        for (name, bytes) in files {
            let path = out_dir.join(name);
            let mut tmp = tempfile::NamedTempFile::new_in(out_dir).map_err(|e| io(out_dir, e))?;
            std::io::Write::write_all(&mut tmp, bytes).map_err(|e| io(&path, e))?;
            tmp.persist(&path).map_err(|e| io(&path, e.error))?;
            written.push(path);
        }
        if self.change_world_file.is_none() {
            let stale = out_dir.join("change.pgw");
            if stale.exists() {
                std::fs::remove_file(&stale).map_err(|e| io(&stale, e))?;
            }
        }
        Ok(written)
    }
}

/// Runs every stage in memory. `dir` is the project directory.
pub fn run(project: &Project, dir: &Path, kind: TransformKind) -> Result<PipelineOutput> {
    let record = fit(project, kind)?;
    let inputs = load_inputs(project, dir)?;
    let warped = warp_historical(&inputs, &record)?;
    let overlay = overlay(&inputs, &warped, OVERLAY_ALPHA)?;
    let (hist_mask, modern_mask) = water_masks(project, &inputs, &warped);
    let change = change_map(project, &hist_mask, &modern_mask, kind)?;

    let style = RenderStyle::default();
    let rendered = render_changemap(&change, &style);
    let polygons = polygons(&change);
    let report = build_report(&project.name, &record, &project.gcps, &change, &polygons, &style);
    let fc = geojson::feature_collection(&change, &polygons);

    let artifacts = Artifacts {
        overlay_png: png_bytes(&overlay).map_err(at!(Stage::Render))?,
        change_png: png_bytes(&rendered).map_err(at!(Stage::Render))?,
        change_world_file: change.georef.map(|g| g.to_world_file()),
        geojson: serde_json::to_string_pretty(&fc).expect("geojson serializes"),
        report_json: report.to_json(),
        report_html: render_html(&report),
    };
    Ok(PipelineOutput {
        record,
        change,
        polygons,
        report,
        artifacts,
    })
}

/// Runs the pipeline and writes its artifacts into `out_dir`.
pub fn run_pipeline(project: &Project, dir: &Path, kind: TransformKind, out_dir: &Path) -> Result<PipelineOutput> {
    let out = run(project, dir, kind)?;
    out.artifacts.write(out_dir)?;
    Ok(out)
}
