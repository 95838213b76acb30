//! HTTP API over a directory of projects.
//!
//! Each project lives in `<data_dir>/<id>/project.json` with its images
//! beside it and pipeline artifacts under `out/`. Mutations take a
//! per-project lock, check the optional revision (`If-Match` header or
//! `?revision=`), bump the revision and save atomically before replying.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, FromRequest, Multipart, Path as UrlPath, Query, Request, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use lostwater_core::hydro::{ManualAnnotation, MapStyle};
use lostwater_core::raster::{parse_world_file, png_bytes, read_png_bytes, GeoReference};
use lostwater_core::transform::{fit_record, validate_gcps, ControlPointPair, Point, TransformError, TransformKind};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::pipeline::{self, PipelineError, Stage};
use crate::project::{ImageRef, Project, ProjectError, Role};
use crate::report::transform_summary;

pub const PROJECT_FILE: &str = "project.json";
pub const OUT_DIR: &str = "out";
const MAX_UPLOAD: usize = 512 * 1024 * 1024;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    pub fn new(status: StatusCode, name: &str, message: impl std::fmt::Display) -> Self {
        ApiError {
            status,
            body: json!({"error": name, "message": message.to_string()}),
        }
    }

    fn bad_request(name: &str, message: impl std::fmt::Display) -> Self {
        Self::new(StatusCode::BAD_REQUEST, name, message)
    }

    fn not_found(name: &str, message: impl std::fmt::Display) -> Self {
        Self::new(StatusCode::NOT_FOUND, name, message)
    }

    fn with(mut self, key: &str, v: Value) -> Self {
        self.body[key] = v;
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<ProjectError> for ApiError {
    fn from(e: ProjectError) -> Self {
        let status = match e {
            ProjectError::Io { .. } => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, e.name(), &e)
    }
}

fn remediation(e: &TransformError) -> &'static str {
    match e {
        TransformError::InsufficientPoints { .. } => "add more enabled control points",
        TransformError::DegenerateConfiguration => {
            "spread control points over the map; avoid collinear or coincident picks"
        }
        TransformError::NonInvertible => "check for swapped or mirrored control points",
        TransformError::AtInfinity => "a point maps to the horizon; spread control points more evenly",
        TransformError::InvalidControlPoint(_) => "fix the offending control point",
    }
}

fn fit_error(e: TransformError) -> ApiError {
    ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.name(), &e).with("hint", json!(remediation(&e)))
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        let status = match (e.stage, e.name) {
            (Stage::Fit, _) => StatusCode::UNPROCESSABLE_ENTITY,
            (_, "MissingImage" | "InvalidImage") => StatusCode::BAD_REQUEST,
            (_, "DimensionMismatch") => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.name, &e).with("stage", json!(e.stage.as_str()))
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Default)]
struct Locks {
    projects: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
    running: Mutex<HashSet<String>>,
}

#[derive(Clone)]
pub struct AppState {
    data_dir: Arc<PathBuf>,
    locks: Arc<Locks>,
}

impl AppState {
    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        AppState {
            data_dir: Arc::new(data_dir.into()),
            locks: Arc::default(),
        }
    }

    fn project_dir(&self, id: &str) -> ApiResult<PathBuf> {
        let ok = !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
        let dir = self.data_dir.join(id);
        if !ok || !dir.join(PROJECT_FILE).is_file() {
            return Err(ApiError::not_found("ProjectNotFound", format!("no project {id:?}")));
        }
        Ok(dir)
    }

    fn load(&self, id: &str) -> ApiResult<(Project, PathBuf)> {
        let dir = self.project_dir(id)?;
        let p = Project::read(&dir.join(PROJECT_FILE))?;
        Ok((p, dir))
    }

    fn lock(&self, id: &str) -> Arc<tokio::sync::Mutex<()>> {
        self.locks
            .projects
            .lock()
            .unwrap()
            .entry(id.to_string())
            .or_default()
            .clone()
    }

    /// Read-check-modify-save under the project's lock.
    async fn mutate<T>(
        &self,
        id: &str,
        expected: Option<u64>,
        f: impl FnOnce(&mut Project, &Path) -> ApiResult<T>,
    ) -> ApiResult<(Project, T)> {
        let lock = self.lock(id);
        let _guard = lock.lock().await;
        let (mut p, dir) = self.load(id)?;
        if let Some(rev) = expected {
            if rev != p.revision {
                return Err(ApiError::new(
                    StatusCode::CONFLICT,
                    "RevisionConflict",
                    format!("project is at revision {}, request was based on {rev}", p.revision),
                )
                .with("revision", json!(p.revision)));
            }
        }
        let out = f(&mut p, &dir)?;
        p.touch();
        p.save(&dir.join(PROJECT_FILE))?;
        Ok((p, out))
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/projects", post(create_project).get(list_projects))
        .route("/projects/{id}", get(get_project))
        .route("/projects/{id}/images/{role}", post(upload_image))
        .route("/projects/{id}/gcps", get(list_gcps).put(replace_gcps).delete(clear_gcps))
        .route(
            "/projects/{id}/gcps/{gcp_id}",
            get(get_gcp).put(put_gcp).delete(delete_gcp),
        )
        .route("/projects/{id}/fit", post(fit))
        .route("/projects/{id}/residuals", get(residuals))
        .route("/projects/{id}/overlay.png", get(overlay))
        .route("/projects/{id}/pipeline", post(run_pipeline))
        .route("/projects/{id}/change.png", get(artifact_change_png))
        .route("/projects/{id}/change.geojson", get(artifact_geojson))
        .route("/projects/{id}/report.json", get(artifact_report_json))
        .route("/projects/{id}/report.html", get(artifact_report_html))
        .route("/projects/{id}/annotations", get(list_annotations).post(add_annotation))
        .route("/projects/{id}/annotations/{ann_id}", axum::routing::delete(delete_annotation))
        .layer(DefaultBodyLimit::max(MAX_UPLOAD))
        .with_state(state)
}

pub async fn serve(addr: &str, data_dir: PathBuf) -> std::io::Result<()> {
    std::fs::create_dir_all(&data_dir)?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(data_dir))).await
}

// ---- request helpers -------------------------------------------------------

fn parse_json<T: DeserializeOwned>(body: &[u8]) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request("InvalidBody", e))
}

#[derive(Deserialize, Default)]
struct RevisionQuery {
    revision: Option<u64>,
}

fn expected_revision(headers: &HeaderMap, q: &RevisionQuery) -> ApiResult<Option<u64>> {
    if let Some(v) = headers.get(header::IF_MATCH) {
        let s = v.to_str().unwrap_or("").trim().trim_start_matches("W/").trim_matches('"');
        return s
            .parse()
            .map(Some)
            .map_err(|_| ApiError::bad_request("InvalidRevision", format!("If-Match {s:?} is not a revision number")));
    }
    Ok(q.revision)
}

fn with_etag(p: &Project, body: Value, status: StatusCode) -> Response {
    let mut r = (status, Json(body)).into_response();
    r.headers_mut()
        .insert(header::ETAG, HeaderValue::from_str(&format!("\"{}\"", p.revision)).unwrap());
    r
}

fn project_json(p: &Project) -> Value {
    serde_json::to_value(p).expect("project serializes")
}

fn parse_kind(s: Option<&str>, default: TransformKind) -> ApiResult<TransformKind> {
    match s {
        None => Ok(default),
        Some(s) => s.parse().map_err(|e| ApiError::bad_request("InvalidKind", e)),
    }
}

// ---- projects --------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateProject {
    name: String,
}

async fn create_project(State(s): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let req: CreateProject = parse_json(&body)?;
    if req.name.trim().is_empty() {
        return Err(ApiError::bad_request("InvalidBody", "project name must not be empty"));
    }
    let id = uuid::Uuid::new_v4().simple().to_string();
    let dir = s.data_dir.join(&id);
    std::fs::create_dir_all(&dir).map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "IoError", e))?;
    let p = Project::new(req.name);
    p.save(&dir.join(PROJECT_FILE))?;
    Ok(with_etag(&p, json!({"id": id, "project": project_json(&p)}), StatusCode::CREATED))
}

async fn list_projects(State(s): State<AppState>) -> ApiResult<Json<Value>> {
    let mut out = Vec::new();
    if let Ok(entries) = std::fs::read_dir(s.data_dir.as_ref()) {
        for e in entries.flatten() {
            let id = e.file_name().to_string_lossy().to_string();
            if let Ok((p, _)) = s.load(&id) {
                out.push(json!({"id": id, "name": p.name, "revision": p.revision}));
            }
        }
    }
    out.sort_by(|a, b| a["id"].as_str().cmp(&b["id"].as_str()));
    Ok(Json(Value::Array(out)))
}

async fn get_project(State(s): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    let (p, _) = s.load(&id)?;
    Ok(with_etag(&p, project_json(&p), StatusCode::OK))
}

// ---- images ----------------------------------------------------------------

#[derive(Deserialize, Default)]
struct ImageQuery {
    style: Option<MapStyle>,
    revision: Option<u64>,
}

async fn upload_image(
    State(s): State<AppState>,
    UrlPath((id, role)): UrlPath<(String, String)>,
    Query(q): Query<ImageQuery>,
    headers: HeaderMap,
    req: Request,
) -> ApiResult<Response> {
    s.project_dir(&id)?;
    let role: Role = role.parse().map_err(|e| ApiError::bad_request("InvalidRole", e))?;
    let is_multipart = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("multipart/form-data"));
    let (png, world) = if is_multipart {
        let mut mp = Multipart::from_request(req, &())
            .await
            .map_err(|e| ApiError::bad_request("InvalidBody", e))?;
        let (mut png, mut world) = (None, None);
        while let Some(field) = mp.next_field().await.map_err(|e| ApiError::bad_request("InvalidBody", e))? {
            let name = field.name().unwrap_or("").to_string();
            let data = field.bytes().await.map_err(|e| ApiError::bad_request("InvalidBody", e))?;
            match name.as_str() {
                "image" => png = Some(data),
                "world_file" => world = Some(String::from_utf8_lossy(&data).into_owned()),
                other => return Err(ApiError::bad_request("InvalidBody", format!("unexpected form field {other:?}"))),
            }
        }
        (png.ok_or_else(|| ApiError::bad_request("InvalidBody", "missing form field \"image\""))?, world)
    } else {
        let body = Bytes::from_request(req, &())
            .await
            .map_err(|e| ApiError::bad_request("InvalidBody", e))?;
        (body, None)
    };
    let raster = read_png_bytes(&png).map_err(|e| ApiError::bad_request("InvalidImage", e))?;
    let georef = match &world {
        Some(text) => Some(
            parse_world_file(text)
                .and_then(GeoReference::from_world_file_values)
                .map_err(|e| ApiError::bad_request(e.name(), e))?,
        ),
        None => None,
    };
    let style = q.style.unwrap_or(match role {
        Role::Historical => MapStyle::HistoricalWash,
        Role::Modern => MapStyle::ModernBasemap,
    });
    let expected = expected_revision(&headers, &RevisionQuery { revision: q.revision })?;
    let (p, _) = s
        .mutate(&id, expected, |p, dir| {
            let file = format!("{}.png", role.as_str());
            let io = |e: std::io::Error| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "IoError", e);
            write_atomic(&dir.join(&file), &png).map_err(io)?;
            let pgw = dir.join(format!("{}.pgw", role.as_str()));
            match &georef {
                Some(g) => write_atomic(&pgw, g.to_world_file().as_bytes()).map_err(io)?,
                None if pgw.exists() => std::fs::remove_file(&pgw).map_err(io)?,
                None => {}
            }
            p.images.set(
                role,
                ImageRef {
                    path: file.into(),
                    georef,
                    style,
                },
            );
            p.transform = None;
            Ok(())
        })
        .await?;
    let body = json!({
        "role": role,
        "width": raster.width(),
        "height": raster.height(),
        "georeferenced": georef.is_some(),
        "project": project_json(&p),
    });
    Ok(with_etag(&p, body, StatusCode::OK))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    std::io::Write::write_all(&mut tmp, bytes)?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

// ---- control points --------------------------------------------------------

async fn list_gcps(State(s): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    let (p, _) = s.load(&id)?;
    Ok(with_etag(&p, json!(p.gcps), StatusCode::OK))
}

async fn replace_gcps(
    State(s): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<RevisionQuery>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Response> {
    let gcps: Vec<ControlPointPair> = parse_json(&body)?;
    validate_gcps(&gcps).map_err(|e| ApiError::bad_request(e.name(), e))?;
    let (p, _) = s
        .mutate(&id, expected_revision(&headers, &q)?, |p, _| {
            p.gcps = gcps;
            p.transform = None;
            Ok(())
        })
        .await?;
    Ok(with_etag(&p, json!(p.gcps), StatusCode::OK))
}

async fn clear_gcps(
    State(s): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<RevisionQuery>,
    headers: HeaderMap,
) -> ApiResult<Response> {
    let (p, _) = s
        .mutate(&id, expected_revision(&headers, &q)?, |p, _| {
            p.gcps.clear();
            p.transform = None;
            Ok(())
        })
        .await?;
    Ok(with_etag(&p, json!(p.gcps), StatusCode::OK))
}

async fn get_gcp(State(s): State<AppState>, UrlPath((id, gcp_id)): UrlPath<(String, String)>) -> ApiResult<Response> {
    let (p, _) = s.load(&id)?;
    let g = p
        .gcps
        .iter()
        .find(|g| g.id == gcp_id)
        .ok_or_else(|| ApiError::not_found("GcpNotFound", format!("no control point {gcp_id:?}")))?;
    Ok(with_etag(&p, json!(g), StatusCode::OK))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GcpBody {
    src: Point,
    dst: Point,
    #[serde(default = "yes")]
    enabled: bool,
}

fn yes() -> bool {
    true
}

async fn put_gcp(
    State(s): State<AppState>,
    UrlPath((id, gcp_id)): UrlPath<(String, String)>,
    Query(q): Query<RevisionQuery>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Response> {
    let b: GcpBody = parse_json(&body)?;
    let pair = ControlPointPair {
        id: gcp_id.clone(),
        src: b.src,
        dst: b.dst,
        enabled: b.enabled,
    };
    let (p, created) = s
        .mutate(&id, expected_revision(&headers, &q)?, |p, _| {
            let mut gcps = p.gcps.clone();
            let created = match gcps.iter_mut().find(|g| g.id == gcp_id) {
                Some(g) => {
                    *g = pair.clone();
                    false
                }
                None => {
                    gcps.push(pair.clone());
                    true
                }
            };
            validate_gcps(&gcps).map_err(|e| ApiError::bad_request(e.name(), e))?;
            p.gcps = gcps;
            p.transform = None;
            Ok(created)
        })
        .await?;
    let status = if created { StatusCode::CREATED } else { StatusCode::OK };
    Ok(with_etag(&p, json!(pair), status))
}

async fn delete_gcp(
    State(s): State<AppState>,
    UrlPath((id, gcp_id)): UrlPath<(String, String)>,
    Query(q): Query<RevisionQuery>,
    headers: HeaderMap,
) -> ApiResult<Response> {
    s.mutate(&id, expected_revision(&headers, &q)?, |p, _| {
        let before = p.gcps.len();
        p.gcps.retain(|g| g.id != gcp_id);
        if p.gcps.len() == before {
            return Err(ApiError::not_found("GcpNotFound", format!("no control point {gcp_id:?}")));
        }
        p.transform = None;
        Ok(())
    })
    .await?;
    Ok(StatusCode::NO_CONTENT.into_response())
}

// ---- fitting ---------------------------------------------------------------

#[derive(Deserialize, Default)]
struct KindQuery {
    kind: Option<String>,
    revision: Option<u64>,
}

async fn fit(
    State(s): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<KindQuery>,
    headers: HeaderMap,
) -> ApiResult<Response> {
    let kind = parse_kind(q.kind.as_deref(), TransformKind::Projective)?;
    let expected = expected_revision(&headers, &RevisionQuery { revision: q.revision })?;
    let (p, record) = s
        .mutate(&id, expected, |p, _| {
            let record = fit_record(&p.gcps, kind).map_err(fit_error)?;
            p.transform = Some(record.clone());
            Ok(record)
        })
        .await?;
    Ok(with_etag(&p, json!(record), StatusCode::OK))
}

fn not_fitted() -> ApiError {
    ApiError::not_found("NotFitted", "no transform has been fitted yet; POST /fit first")
}

async fn residuals(State(s): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    let (p, _) = s.load(&id)?;
    let record = p.transform.as_ref().ok_or_else(not_fitted)?;
    Ok(with_etag(&p, json!(transform_summary(record, &p.gcps)), StatusCode::OK))
}

#[derive(Deserialize, Default)]
struct AlphaQuery {
    alpha: Option<f64>,
}

async fn overlay(
    State(s): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<AlphaQuery>,
) -> ApiResult<Response> {
    let alpha = q.alpha.unwrap_or(pipeline::OVERLAY_ALPHA);
    if !(0.0..=1.0).contains(&alpha) {
        return Err(ApiError::bad_request("InvalidAlpha", format!("alpha {alpha} outside [0, 1]")));
    }
    let (p, dir) = s.load(&id)?;
    let record = p.transform.clone().ok_or_else(not_fitted)?;
    let png = tokio::task::spawn_blocking(move || -> Result<Vec<u8>, PipelineError> {
        let inputs = pipeline::load_inputs(&p, &dir)?;
        let warped = pipeline::warp_historical(&inputs, &record)?;
        let out = pipeline::overlay(&inputs, &warped, alpha)?;
        png_bytes(&out).map_err(|e| PipelineError::new(Stage::Render, e.name(), &e))
    })
    .await
    .expect("overlay task")?;
    Ok(([(header::CONTENT_TYPE, "image/png")], png).into_response())
}

// ---- pipeline --------------------------------------------------------------

struct RunningGuard {
    locks: Arc<Locks>,
    id: String,
}

impl Drop for RunningGuard {
    fn drop(&mut self) {
        self.locks.running.lock().unwrap().remove(&self.id);
    }
}

async fn run_pipeline(
    State(s): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<KindQuery>,
) -> ApiResult<Response> {
    let (p, dir) = s.load(&id)?;
    let default = p.transform.as_ref().map_or(TransformKind::Projective, |t| t.kind);
    let kind = parse_kind(q.kind.as_deref(), default)?;
    if !s.locks.running.lock().unwrap().insert(id.clone()) {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "PipelineRunning",
            "a pipeline run for this project is already in progress",
        ));
    }
    let guard = RunningGuard {
        locks: s.locks.clone(),
        id: id.clone(),
    };
    let snapshot = p.clone();
    let out = tokio::task::spawn_blocking(move || {
        let _guard = guard;
        pipeline::run_pipeline(&snapshot, &dir, kind, &dir.join(OUT_DIR))
    })
    .await
    .expect("pipeline task")?;
    // Keep the fitted transform unless the project moved on meanwhile.
    let record = out.record.clone();
    let stored = s
        .mutate(&id, Some(p.revision), move |proj, _| {
            proj.transform = Some(record);
            Ok(())
        })
        .await;
    let revision = match stored {
        Ok((proj, _)) => proj.revision,
        Err(_) => p.revision,
    };
    let mut r = Json(json!(out.report)).into_response();
    r.headers_mut()
        .insert(header::ETAG, HeaderValue::from_str(&format!("\"{revision}\"")).unwrap());
    Ok(r)
}

async fn artifact(s: &AppState, id: &str, file: &str, content_type: &'static str) -> ApiResult<Response> {
    let dir = s.project_dir(id)?;
    let bytes = std::fs::read(dir.join(OUT_DIR).join(file))
        .map_err(|_| ApiError::not_found("NotRun", format!("{file} does not exist yet; POST /pipeline first")))?;
    Ok(([(header::CONTENT_TYPE, content_type)], bytes).into_response())
}

async fn artifact_change_png(State(s): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    artifact(&s, &id, "change.png", "image/png").await
}

async fn artifact_geojson(State(s): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    artifact(&s, &id, "change.geojson", "application/geo+json").await
}

async fn artifact_report_json(State(s): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    artifact(&s, &id, "report.json", "application/json").await
}

async fn artifact_report_html(State(s): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    artifact(&s, &id, "report.html", "text/html; charset=utf-8").await
}

// ---- annotations -----------------------------------------------------------

async fn list_annotations(State(s): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    let (p, _) = s.load(&id)?;
    Ok(with_etag(&p, json!(p.annotations), StatusCode::OK))
}

async fn add_annotation(
    State(s): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<RevisionQuery>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Response> {
    let a: ManualAnnotation = parse_json(&body)?;
    a.validate().map_err(|e| ApiError::bad_request(e.name(), e))?;
    let (p, _) = s
        .mutate(&id, expected_revision(&headers, &q)?, |p, _| {
            if p.annotations.iter().any(|x| x.id == a.id) {
                return Err(ApiError::bad_request(
                    "InvalidAnnotation",
                    format!("annotation id {:?} already exists", a.id),
                ));
            }
            p.annotations.push(a.clone());
            Ok(())
        })
        .await?;
    Ok(with_etag(&p, json!(a), StatusCode::CREATED))
}

async fn delete_annotation(
    State(s): State<AppState>,
    UrlPath((id, ann_id)): UrlPath<(String, String)>,
    Query(q): Query<RevisionQuery>,
    headers: HeaderMap,
) -> ApiResult<Response> {
    s.mutate(&id, expected_revision(&headers, &q)?, |p, _| {
        let before = p.annotations.len();
        p.annotations.retain(|a| a.id != ann_id);
        if p.annotations.len() == before {
            return Err(ApiError::not_found("AnnotationNotFound", format!("no annotation {ann_id:?}")));
        }
        Ok(())
    })
    .await?;
    Ok(StatusCode::NO_CONTENT.into_response())
}
