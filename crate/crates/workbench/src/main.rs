use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lostwater_core::hydro::{
    extract_water, render_changemap, AnnotationStatus, ManualAnnotation, MapStyle, RenderStyle, Shape,
};
use lostwater_core::raster::{load_png, save_png, world_file_path, GeoReference};
use lostwater_core::transform::{ControlPointPair, Point, TransformKind, TransformRecord};
use lostwater_workbench::pipeline::{self, PipelineError, Stage};
use lostwater_workbench::project::{project_dir, ImageRef, Project, Role};

/// Georectify a historical map onto a modern basemap and map lost,
/// persistent and new water.
#[derive(Parser)]
#[command(name = "lostwater", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ProjectArg {
    /// Project file (JSON).
    #[arg(long, short)]
    project: PathBuf,
}

#[derive(Args)]
struct KindArg {
    /// Transform to fit. Defaults to the project's fitted kind, else projective.
    #[arg(long, short)]
    kind: Option<TransformKind>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RoleArg {
    Historical,
    Modern,
}

impl From<RoleArg> for Role {
    fn from(r: RoleArg) -> Self {
        match r {
            RoleArg::Historical => Role::Historical,
            RoleArg::Modern => Role::Modern,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StyleArg {
    ModernBasemap,
    HistoricalWash,
}

impl From<StyleArg> for MapStyle {
    fn from(s: StyleArg) -> Self {
        match s {
            StyleArg::ModernBasemap => MapStyle::ModernBasemap,
            StyleArg::HistoricalWash => MapStyle::HistoricalWash,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StatusArg {
    Underground,
    FieldConfirmedPresent,
    FieldConfirmedLost,
}

impl From<StatusArg> for AnnotationStatus {
    fn from(s: StatusArg) -> Self {
        match s {
            StatusArg::Underground => AnnotationStatus::Underground,
            StatusArg::FieldConfirmedPresent => AnnotationStatus::FieldConfirmedPresent,
            StatusArg::FieldConfirmedLost => AnnotationStatus::FieldConfirmedLost,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Create a project file.
    Init {
        #[command(flatten)]
        project: ProjectArg,
        /// Project name.
        #[arg(long)]
        name: String,
        /// Historical map PNG. A world file beside it is picked up.
        #[arg(long)]
        historical: Option<PathBuf>,
        /// Modern basemap PNG. A world file beside it is picked up.
        #[arg(long)]
        modern: Option<PathBuf>,
        /// Colour style of the historical map.
        #[arg(long, value_enum, default_value = "historical-wash")]
        historical_style: StyleArg,
        /// Colour style of the modern map.
        #[arg(long, value_enum, default_value = "modern-basemap")]
        modern_style: StyleArg,
        /// Overwrite an existing project file.
        #[arg(long)]
        force: bool,
    },
    /// Edit ground control points.
    Gcp {
        #[command(subcommand)]
        action: GcpAction,
    },
    /// Add a field annotation (polyline or polygon in modern pixels).
    Annotate {
        #[command(flatten)]
        project: ProjectArg,
        /// Annotation id.
        #[arg(long)]
        id: String,
        /// Field status.
        #[arg(long, value_enum, default_value = "underground")]
        status: StatusArg,
        /// Vertices as "x,y;x,y;...".
        #[arg(long)]
        points: String,
        /// Close the vertices into a polygon.
        #[arg(long)]
        polygon: bool,
        /// Free-text note.
        #[arg(long, default_value = "")]
        note: String,
    },
    /// Fit the transform from the control points and store it.
    Fit {
        #[command(flatten)]
        project: ProjectArg,
        /// Transform kind.
        #[arg(long, short, default_value = "projective")]
        kind: TransformKind,
    },
    /// Resample the historical map into the modern map's pixel grid.
    Warp {
        #[command(flatten)]
        project: ProjectArg,
        #[command(flatten)]
        kind: KindArg,
        /// Output PNG.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Blend the warped historical map over the modern map.
    Overlay {
        #[command(flatten)]
        project: ProjectArg,
        #[command(flatten)]
        kind: KindArg,
        /// Opacity of the historical layer, 0 to 1.
        #[arg(long, default_value_t = pipeline::OVERLAY_ALPHA)]
        alpha: f64,
        /// Output PNG.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Extract the water mask of one image.
    Water {
        #[command(flatten)]
        project: ProjectArg,
        /// Which image.
        #[arg(long, value_enum)]
        role: RoleArg,
        /// Warp the historical map into the modern frame first.
        #[arg(long)]
        warped: bool,
        #[command(flatten)]
        kind: KindArg,
        /// Output mask PNG (opaque white = water).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Classify change between the two maps and print pixel counts.
    Diff {
        #[command(flatten)]
        project: ProjectArg,
        #[command(flatten)]
        kind: KindArg,
        /// Rendered change map PNG.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run the whole pipeline and write every artifact.
    Report {
        #[command(flatten)]
        project: ProjectArg,
        #[command(flatten)]
        kind: KindArg,
        /// Artifact directory. Defaults to `out/` beside the project.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        /// Interface to bind.
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Port to bind.
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory holding one sub-directory per project.
        #[arg(long, env = "LOSTWATER_DATA_DIR", default_value = "lostwater-data")]
        data_dir: PathBuf,
    },
}

#[derive(Subcommand)]
enum GcpAction {
    /// Add or replace a control point.
    Add {
        #[command(flatten)]
        project: ProjectArg,
        /// Control point id.
        #[arg(long)]
        id: String,
        /// Historical pixel position "x,y".
        #[arg(long, value_parser = parse_point)]
        src: Point,
        /// Modern pixel position "x,y".
        #[arg(long, value_parser = parse_point)]
        dst: Point,
        /// Keep the point but leave it out of fits.
        #[arg(long)]
        disabled: bool,
    },
    /// Remove a control point.
    Remove {
        #[command(flatten)]
        project: ProjectArg,
        /// Control point id.
        #[arg(long)]
        id: String,
    },
    /// Print the control points.
    List {
        #[command(flatten)]
        project: ProjectArg,
    },
}

fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected \"x,y\", got {s:?}"))?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    let p = Point::new(num(x)?, num(y)?);
    if !p.is_finite() {
        return Err(format!("non-finite point {s:?}"));
    }
    Ok(p)
}

fn parse_points(s: &str) -> Result<Vec<Point>, String> {
    s.split(';').filter(|v| !v.trim().is_empty()).map(parse_point).collect()
}

type CliResult = Result<(), PipelineError>;

fn load_err(e: lostwater_workbench::ProjectError) -> PipelineError {
    PipelineError::new(Stage::Load, e.name(), &e)
}

fn open(path: &Path) -> Result<(Project, PathBuf), PipelineError> {
    let p = Project::open(path).map_err(load_err)?;
    Ok((p, project_dir(path)))
}

fn save(p: &mut Project, path: &Path) -> CliResult {
    p.touch();
    p.save(path).map_err(|e| PipelineError::new(Stage::Write, e.name(), &e))
}

fn write_err(path: &Path, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::new(Stage::Write, "IoError", format!("{}: {e}", path.display()))
}

/// The stored transform when no kind is requested (or it matches), else a
/// fresh fit.
fn transform_for(p: &Project, kind: Option<TransformKind>) -> Result<TransformRecord, PipelineError> {
    match (&p.transform, kind) {
        (Some(t), None) => Ok(t.clone()),
        (Some(t), Some(k)) if t.kind == k => Ok(t.clone()),
        (_, k) => pipeline::fit(p, k.unwrap_or(TransformKind::Projective)),
    }
}

fn resolve_kind(p: &Project, kind: Option<TransformKind>) -> TransformKind {
    kind.or(p.transform.as_ref().map(|t| t.kind)).unwrap_or(TransformKind::Projective)
}

fn image_ref(project_file: &Path, image: &Path, style: StyleArg) -> Result<ImageRef, PipelineError> {
    load_png(image).map_err(|e| PipelineError::new(Stage::Load, e.name(), &e))?;
    let wf = world_file_path(image);
    let georef = if wf.is_file() {
        Some(GeoReference::read_world_file(&wf).map_err(|e| PipelineError::new(Stage::Load, e.name(), &e))?)
    } else {
        None
    };
    let abs = |p: &Path| std::path::absolute(p).map_err(|e| write_err(p, e));
    let image_abs = abs(image)?;
    let dir_abs = abs(&project_dir(project_file))?;
    let path = image_abs
        .strip_prefix(&dir_abs)
        .map(Path::to_path_buf)
        .unwrap_or(image_abs.clone());
    Ok(ImageRef {
        path,
        georef,
        style: style.into(),
    })
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Init {
            project,
            name,
            historical,
            modern,
            historical_style,
            modern_style,
            force,
        } => {
            let path = project.project;
            if path.exists() && !force {
                return Err(PipelineError::new(
                    Stage::Write,
                    "AlreadyExists",
                    format!("{} exists; pass --force to overwrite", path.display()),
                ));
            }
            let mut p = Project::new(name);
            if let Some(h) = historical {
                p.images.historical = Some(image_ref(&path, &h, historical_style)?);
            }
            if let Some(m) = modern {
                p.images.modern = Some(image_ref(&path, &m, modern_style)?);
            }
            p.save(&path).map_err(|e| PipelineError::new(Stage::Write, e.name(), &e))?;
            println!("created {}", path.display());
        }
        Command::Gcp { action } => match action {
            GcpAction::Add {
                project,
                id,
                src,
                dst,
                disabled,
            } => {
                let (mut p, _) = open(&project.project)?;
                let mut pair = ControlPointPair::new(id.clone(), src, dst);
                pair.enabled = !disabled;
                match p.gcps.iter_mut().find(|g| g.id == id) {
                    Some(g) => *g = pair,
                    None => p.gcps.push(pair),
                }
                p.transform = None;
                save(&mut p, &project.project)?;
                println!("{} control points", p.gcps.len());
            }
            GcpAction::Remove { project, id } => {
                let (mut p, _) = open(&project.project)?;
                let before = p.gcps.len();
                p.gcps.retain(|g| g.id != id);
                if p.gcps.len() == before {
                    return Err(PipelineError::new(Stage::Load, "GcpNotFound", format!("no control point {id:?}")));
                }
                p.transform = None;
                save(&mut p, &project.project)?;
                println!("{} control points", p.gcps.len());
            }
            GcpAction::List { project } => {
                let (p, _) = open(&project.project)?;
                for g in &p.gcps {
                    println!(
                        "{}\t{},{}\t{},{}{}",
                        g.id,
                        g.src.x,
                        g.src.y,
                        g.dst.x,
                        g.dst.y,
                        if g.enabled { "" } else { "\tdisabled" }
                    );
                }
            }
        },
        Command::Annotate {
            project,
            id,
            status,
            points,
            polygon,
            note,
        } => {
            let (mut p, _) = open(&project.project)?;
            let vertices = parse_points(&points).map_err(|e| PipelineError::new(Stage::Load, "InvalidAnnotation", e))?;
            let a = ManualAnnotation {
                id: id.clone(),
                shape: if polygon { Shape::Polygon } else { Shape::Polyline },
                vertices,
                status: status.into(),
                note,
            };
            a.validate().map_err(|e| PipelineError::new(Stage::Load, e.name(), &e))?;
            p.annotations.retain(|x| x.id != id);
            p.annotations.push(a);
            save(&mut p, &project.project)?;
            println!("{} annotations", p.annotations.len());
        }
        Command::Fit { project, kind } => {
            let (mut p, _) = open(&project.project)?;
            let record = pipeline::fit(&p, kind)?;
            println!("kind {}", record.kind);
            println!("gcps {}", record.gcp_count);
            println!("RMSE {:.3}", record.rmse_forward);
            for r in &record.per_point_residuals {
                let v = r.residual_px.map_or("-".to_string(), |v| format!("{v:.3}"));
                println!("  {}\t{v}{}", r.id, if r.enabled { "" } else { "\tdisabled" });
            }
            p.transform = Some(record);
            save(&mut p, &project.project)?;
        }
        Command::Warp { project, kind, out } => {
            let (p, dir) = open(&project.project)?;
            let record = transform_for(&p, kind.kind)?;
            let inputs = pipeline::load_inputs(&p, &dir)?;
            let warped = pipeline::warp_historical(&inputs, &record)?;
            save_png(&warped, &out).map_err(|e| write_err(&out, e))?;
            println!("wrote {}", out.display());
        }
        Command::Overlay {
            project,
            kind,
            alpha,
            out,
        } => {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(PipelineError::new(Stage::Render, "InvalidAlpha", format!("alpha {alpha} outside [0, 1]")));
            }
            let (p, dir) = open(&project.project)?;
            let record = transform_for(&p, kind.kind)?;
            let inputs = pipeline::load_inputs(&p, &dir)?;
            let warped = pipeline::warp_historical(&inputs, &record)?;
            let o = pipeline::overlay(&inputs, &warped, alpha)?;
            save_png(&o, &out).map_err(|e| write_err(&out, e))?;
            println!("wrote {}", out.display());
        }
        Command::Water {
            project,
            role,
            warped,
            kind,
            out,
        } => {
            let (p, dir) = open(&project.project)?;
            let role: Role = role.into();
            let raster = if warped && role == Role::Historical {
                let record = transform_for(&p, kind.kind)?;
                let inputs = pipeline::load_inputs(&p, &dir)?;
                pipeline::warp_historical(&inputs, &record)?
            } else {
                p.load_image(&dir, role).map_err(load_err)?
            };
            let mask = extract_water(&raster, p.water_config.get(role));
            println!("water {}", mask.count());
            if let Some(out) = out {
                save_png(&mask.to_raster(), &out).map_err(|e| write_err(&out, e))?;
                println!("wrote {}", out.display());
            }
        }
        Command::Diff { project, kind, out } => {
            let (p, dir) = open(&project.project)?;
            let record = transform_for(&p, kind.kind)?;
            let inputs = pipeline::load_inputs(&p, &dir)?;
            let warped = pipeline::warp_historical(&inputs, &record)?;
            let (h, m) = pipeline::water_masks(&p, &inputs, &warped);
            let c = pipeline::change_map(&p, &h, &m, record.kind)?;
            let n = c.counts();
            println!("LOST {}", n.lost);
            println!("PERSISTENT {}", n.persistent);
            println!("NEW {}", n.new);
            println!("NONE {}", n.none);
            if let Some(out) = out {
                save_png(&render_changemap(&c, &RenderStyle::default()), &out).map_err(|e| write_err(&out, e))?;
                println!("wrote {}", out.display());
            }
        }
        Command::Report { project, kind, out } => {
            let (p, dir) = open(&project.project)?;
            let kind = resolve_kind(&p, kind.kind);
            let out_dir = out.unwrap_or_else(|| dir.join("out"));
            let result = pipeline::run_pipeline(&p, &dir, kind, &out_dir)?;
            let r = &result.report;
            println!("RMSE {:.3}", r.transform.rmse_forward);
            println!("LOST {}", r.counts.lost);
            println!("PERSISTENT {}", r.counts.persistent);
            println!("NEW {}", r.counts.new);
            println!(
                "polygons LOST {} PERSISTENT {} NEW {}",
                r.polygon_count(lostwater_core::hydro::ChangeClass::Lost),
                r.polygon_count(lostwater_core::hydro::ChangeClass::Persistent),
                r.polygon_count(lostwater_core::hydro::ChangeClass::New),
            );
            println!("wrote {}", out_dir.display());
        }
        Command::Serve { host, port, data_dir } => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| write_err(&data_dir, e))?;
            rt.block_on(lostwater_workbench::server::serve(&format!("{host}:{port}"), data_dir.clone()))
                .map_err(|e| PipelineError::new(Stage::Load, "IoError", e))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
