//! Change reports in JSON and HTML.

use lostwater_core::hydro::{
    AnnotationStatus, ChangeClass, ChangeMap, ChangePolygon, ClassAreas, ClassCounts, RenderStyle,
    COASTAL_LOST_LABEL,
};
use lostwater_core::raster::Rgba;
use lostwater_core::transform::{leave_one_out, TransformKind, TransformRecord};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub id: String,
    pub enabled: bool,
    pub residual_px: Option<f64>,
    pub loo_residual_px: Option<f64>,
    pub outlier: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformSummary {
    pub kind: TransformKind,
    pub rmse_forward: f64,
    pub gcp_count: usize,
    pub residuals: Vec<ResidualRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonSummary {
    pub class: ChangeClass,
    pub label: String,
    pub area_px: u64,
    pub area_m2: Option<f64>,
    pub coastal: bool,
    pub annotation_status: Option<AnnotationStatus>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationSummary {
    pub id: String,
    pub status: AnnotationStatus,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendEntry {
    pub key: String,
    pub color: String,
    pub label: String,
}

/// Everything a curator needs to judge one comparison. Contains no
/// timestamps so that reruns on the same inputs are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeReport {
    pub project: String,
    pub width: u32,
    pub height: u32,
    pub georeferenced: bool,
    pub transform: TransformSummary,
    pub counts: ClassCounts,
    pub area_m2: Option<ClassAreas>,
    pub polygons: Vec<PolygonSummary>,
    pub annotations: Vec<AnnotationSummary>,
    pub legend: Vec<LegendEntry>,
}

impl ChangeReport {
    pub fn polygon_area_px(&self, class: ChangeClass) -> u64 {
        self.polygons.iter().filter(|p| p.class == class).map(|p| p.area_px).sum()
    }

    pub fn polygon_count(&self, class: ChangeClass) -> usize {
        self.polygons.iter().filter(|p| p.class == class).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn hex(c: Rgba) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

pub fn legend(style: &RenderStyle) -> Vec<LegendEntry> {
    let e = |key: &str, c: Rgba, label: &str| LegendEntry {
        key: key.into(),
        color: hex(c),
        label: label.into(),
    };
    vec![
        e("LOST", style.lost, "Red - disappeared"),
        e("PERSISTENT", style.persistent, "Green - still present"),
        e("NEW", style.new, "Blue - new water / reclaimed land boundary"),
        e("UNDERGROUND", style.underground, "Violet - possibly underground (field annotation)"),
        e("LOST_COASTAL", style.lost, COASTAL_LOST_LABEL),
    ]
}

pub fn transform_summary(record: &TransformRecord, gcps: &[lostwater_core::transform::ControlPointPair]) -> TransformSummary {
    let loo = leave_one_out(gcps, record.kind).unwrap_or_default();
    let residuals = record
        .per_point_residuals
        .iter()
        .map(|r| {
            let l = loo.iter().find(|l| l.id == r.id);
            ResidualRow {
                id: r.id.clone(),
                enabled: r.enabled,
                residual_px: r.residual_px,
                loo_residual_px: l.and_then(|l| l.loo_residual_px),
                outlier: l.is_some_and(|l| l.outlier),
            }
        })
        .collect();
    TransformSummary {
        kind: record.kind,
        rmse_forward: record.rmse_forward,
        gcp_count: record.gcp_count,
        residuals,
    }
}

pub fn build_report(
    project: &str,
    record: &TransformRecord,
    gcps: &[lostwater_core::transform::ControlPointPair],
    change: &ChangeMap,
    polygons: &[ChangePolygon],
    style: &RenderStyle,
) -> ChangeReport {
    let summary = change.summary();
    ChangeReport {
        project: project.to_string(),
        width: change.width(),
        height: change.height(),
        georeferenced: change.georef.is_some(),
        transform: transform_summary(record, gcps),
        counts: summary.counts,
        area_m2: summary.area_m2,
        polygons: polygons
            .iter()
            .map(|p| PolygonSummary {
                class: p.class,
                label: p.label().to_string(),
                area_px: p.area_px,
                area_m2: p.area_m2,
                coastal: p.coastal,
                annotation_status: p.annotation_status,
            })
            .collect(),
        annotations: change
            .annotations
            .iter()
            .map(|a| AnnotationSummary {
                id: a.id.clone(),
                status: a.status,
                note: a.note.clone(),
            })
            .collect(),
        legend: legend(style),
    }
}

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.digits$}"))
}

pub fn render_html(r: &ChangeReport) -> String {
    let mut h = String::new();
    h.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    h.push_str(&format!("<title>Water change report: {}</title>\n", esc(&r.project)));
    h.push_str(
        "<style>body{font-family:sans-serif;margin:2em}table{border-collapse:collapse}\
         td,th{border:1px solid #999;padding:2px 8px;text-align:right}\
         .sw{display:inline-block;width:1em;height:1em;vertical-align:middle;margin-right:.4em}\
         .outlier{background:#fdd}</style>\n</head>\n<body>\n",
    );
    h.push_str(&format!("<h1>{}</h1>\n", esc(&r.project)));
    h.push_str(&format!("<p>{} x {} pixels", r.width, r.height));
    if !r.georeferenced {
        h.push_str(", not georeferenced");
    }
    h.push_str("</p>\n<h2>Legend</h2>\n<ul>\n");
    for e in &r.legend {
        h.push_str(&format!(
            "<li><span class=\"sw\" style=\"background:{}\"></span>{}</li>\n",
            e.color,
            esc(&e.label)
        ));
    }
    h.push_str("</ul>\n<h2>Change summary</h2>\n<table>\n<tr><th>class</th><th>pixels</th><th>area (m²)</th></tr>\n");
    let areas = r.area_m2;
    for (name, n, a) in [
        ("LOST", r.counts.lost, areas.map(|a| a.lost)),
        ("PERSISTENT", r.counts.persistent, areas.map(|a| a.persistent)),
        ("NEW", r.counts.new, areas.map(|a| a.new)),
    ] {
        h.push_str(&format!("<tr><td>{name}</td><td>{n}</td><td>{}</td></tr>\n", opt(a, 1)));
    }
    h.push_str("</table>\n");
    h.push_str(&format!(
        "<h2>Transform</h2>\n<p>{} fit from {} control points, RMSE {:.3} px</p>\n",
        r.transform.kind, r.transform.gcp_count, r.transform.rmse_forward
    ));
    h.push_str("<table>\n<tr><th>id</th><th>enabled</th><th>residual (px)</th><th>leave-one-out (px)</th><th>outlier</th></tr>\n");
    for row in &r.transform.residuals {
        h.push_str(&format!(
            "<tr{}><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td></tr>\n",
            if row.outlier { " class=\"outlier\"" } else { "" },
            esc(&row.id),
            if row.enabled { "yes" } else { "no" },
            opt(row.residual_px, 3),
            opt(row.loo_residual_px, 3),
            if row.outlier { "yes" } else { "" },
        ));
    }
    h.push_str("</table>\n<h2>Change regions</h2>\n<table>\n<tr><th>#</th><th>class</th><th>label</th><th>pixels</th><th>area (m²)</th><th>annotation</th></tr>\n");
    for (i, p) in r.polygons.iter().enumerate() {
        h.push_str(&format!(
            "<tr><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td></tr>\n",
            i + 1,
            p.class.as_str(),
            esc(&p.label),
            p.area_px,
            opt(p.area_m2, 1),
            p.annotation_status
                .map(|s| serde_json::to_value(s).unwrap().as_str().unwrap().to_string())
                .unwrap_or_default(),
        ));
    }
    h.push_str("</table>\n");
    if !r.annotations.is_empty() {
        h.push_str("<h2>Field annotations</h2>\n<ul>\n");
        for a in &r.annotations {
            let status = serde_json::to_value(a.status).unwrap();
            h.push_str(&format!(
                "<li>{}: {} {}</li>\n",
                esc(&a.id),
                status.as_str().unwrap(),
                esc(&a.note)
            ));
        }
        h.push_str("</ul>\n");
    }
    h.push_str("</body>\n</html>\n");
    h
}
