use serde::{Deserialize, Serialize};

use super::{
    fit, fit_polynomial2, invert_projective, validate_gcps, ControlPointPair, Result,
    Transform2D, TransformError, TransformKind,
};

/// Leave-one-out residuals above this multiple of the median are outliers.
pub const OUTLIER_MEDIAN_FACTOR: f64 = 3.0;

/// Leave-one-out residuals at or below this many pixels are never outliers,
/// so round-off on exact configurations is not flagged.
pub const OUTLIER_FLOOR_PX: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub id: String,
    /// `None` when the source point maps to infinity.
    pub residual_px: Option<f64>,
    pub enabled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub entries: Vec<ResidualEntry>,
    /// RMS over enabled points; `None` if there are none or one maps to infinity.
    pub rmse: Option<f64>,
}

impl ResidualReport {
    pub fn max_enabled(&self) -> Option<&ResidualEntry> {
        self.entries
            .iter()
            .filter(|e| e.enabled)
            .filter(|e| e.residual_px.is_some())
            .max_by(|a, b| a.residual_px.unwrap().total_cmp(&b.residual_px.unwrap()))
    }
}

/// Forward residual `‖t(src) − dst‖` for every control point, in input order.
/// Disabled points are reported but excluded from the RMSE.
pub fn residual_report(t: &Transform2D, gcps: &[ControlPointPair]) -> ResidualReport {
    let entries: Vec<ResidualEntry> = gcps
        .iter()
        .map(|g| ResidualEntry {
            id: g.id.clone(),
            residual_px: t.apply(g.src).ok().map(|p| p.distance(&g.dst)),
            enabled: g.enabled,
        })
        .collect();
    let enabled: Option<Vec<f64>> = entries
        .iter()
        .filter(|e| e.enabled)
        .map(|e| e.residual_px.map(|r| r * r))
        .collect();
    let rmse = enabled.filter(|sq| !sq.is_empty()).map(|mut sq| {
        // summed in sorted order so the result does not depend on list order
        sq.sort_by(f64::total_cmp);
        (sq.iter().sum::<f64>() / sq.len() as f64).sqrt()
    });
    ResidualReport { entries, rmse }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LooEntry {
    pub id: String,
    /// `None` when the remaining points do not determine a transform.
    pub loo_residual_px: Option<f64>,
    pub outlier: bool,
}

/// Refits without each enabled point in turn and measures how far the
/// held-out point lands from its destination.
pub fn leave_one_out(gcps: &[ControlPointPair], kind: TransformKind) -> Result<Vec<LooEntry>> {
    validate_gcps(gcps)?;
    let enabled: Vec<usize> = (0..gcps.len()).filter(|&i| gcps[i].enabled).collect();
    let needed = kind.min_points() + 1;
    if enabled.len() < needed {
        return Err(TransformError::InsufficientPoints {
            needed,
            got: enabled.len(),
        });
    }

    let mut subset = gcps.to_vec();
    let mut entries = Vec::with_capacity(enabled.len());
    for &i in &enabled {
        subset[i].enabled = false;
        let residual = fit(&subset, kind)
            .ok()
            .and_then(|t| t.apply(gcps[i].src).ok())
            .map(|p| p.distance(&gcps[i].dst));
        subset[i].enabled = true;
        entries.push(LooEntry {
            id: gcps[i].id.clone(),
            loo_residual_px: residual,
            outlier: false,
        });
    }

    let mut known: Vec<f64> = entries.iter().filter_map(|e| e.loo_residual_px).collect();
    if let Some(median) = median(&mut known) {
        let threshold = (OUTLIER_MEDIAN_FACTOR * median).max(OUTLIER_FLOOR_PX);
        for e in &mut entries {
            e.outlier = e.loo_residual_px.is_some_and(|r| r > threshold);
        }
    }
    Ok(entries)
}

fn median(v: &mut [f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len().is_multiple_of(2) {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    })
}

/// Both directions of a fitted transform plus forward diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformRecord {
    pub kind: TransformKind,
    /// historical → modern
    pub forward: Transform2D,
    /// modern → historical
    pub backward: Transform2D,
    pub rmse_forward: f64,
    pub per_point_residuals: Vec<ResidualEntry>,
    pub gcp_count: usize,
}

/// Fits the forward transform and derives the backward one: the matrix
/// inverse for projective, an independent swapped fit for polynomial2.
pub fn fit_record(gcps: &[ControlPointPair], kind: TransformKind) -> Result<TransformRecord> {
    let forward = fit(gcps, kind)?;
    let backward = match &forward {
        Transform2D::Projective(t) => Transform2D::Projective(invert_projective(t)?),
        Transform2D::Polynomial2(_) => {
            let swapped: Vec<ControlPointPair> = gcps.iter().map(|g| g.swapped()).collect();
            Transform2D::Polynomial2(fit_polynomial2(&swapped)?)
        }
    };
    let report = residual_report(&forward, gcps);
    let rmse_forward = report.rmse.ok_or(TransformError::AtInfinity)?;
    Ok(TransformRecord {
        kind,
        forward,
        backward,
        rmse_forward,
        gcp_count: gcps.iter().filter(|g| g.enabled).count(),
        per_point_residuals: report.entries,
    })
}
