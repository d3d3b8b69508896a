//! Graph files (JSON) and pose lists (plain text).

use crate::error::{CliError, CliResult};
use episcale::{relative_from_absolute, AbsolutePose, EpipolarGraph, RelativeMotion, Rotation, UnitVector3};
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Rotations off SO(3) by more than this are rejected instead of projected.
pub const MAX_ROTATION_DEFECT: f64 = 1e-3;
/// Directions further than this from unit length trigger a warning.
pub const DIRECTION_WARN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub i: usize,
    pub j: usize,
    /// Row-major `R_ij`.
    #[serde(rename = "R")]
    pub r: [f64; 9],
    /// Unit direction of `t_ij`.
    pub t: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

/// A camera as rotation plus optical center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseRecord {
    #[serde(rename = "R")]
    pub r: [f64; 9],
    pub c: [f64; 3],
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poses: Option<Vec<PoseRecord>>,
    /// True `‖t_ij‖` per edge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outliers: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<GroundTruth>,
}

/// Labels that had to be repaired while loading.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadReport {
    pub projected_rotations: Vec<usize>,
    pub renormalized_directions: Vec<usize>,
}

fn matrix(r: &[f64; 9]) -> Matrix3<f64> {
    Matrix3::from_row_slice(r)
}

fn row_major(m: &Matrix3<f64>) -> [f64; 9] {
    let mut out = [0.0; 9];
    for r in 0..3 {
        for c in 0..3 {
            out[3 * r + c] = m[(r, c)];
        }
    }
    out
}

pub fn pose_record(pose: &AbsolutePose) -> PoseRecord {
    let c = pose.center();
    PoseRecord {
        r: row_major(pose.rotation.matrix()),
        c: [c.x, c.y, c.z],
    }
}

pub fn pose_from_record(record: &PoseRecord) -> CliResult<AbsolutePose> {
    let rotation = load_rotation(&record.r).map(|(r, _)| r)?;
    Ok(AbsolutePose::from_center(rotation, Vector3::from(record.c)))
}

/// Keeps valid rotations bit for bit, projects slightly-off ones.
fn load_rotation(r: &[f64; 9]) -> CliResult<(Rotation, bool)> {
    let m = matrix(r);
    if m.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Invalid("non-finite rotation entry".into()));
    }
    if let Ok(rot) = Rotation::from_matrix(m) {
        return Ok((rot, false));
    }
    let defect = (m.transpose() * m - Matrix3::identity()).norm();
    if defect > MAX_ROTATION_DEFECT || m.determinant() <= 0.0 {
        return Err(CliError::Invalid(format!(
            "matrix is not a rotation (orthogonality defect {defect:.3e}, det {:.6})",
            m.determinant()
        )));
    }
    Ok((Rotation::project(&m)?, true))
}

fn load_direction(t: &[f64; 3]) -> CliResult<(UnitVector3, f64)> {
    let v = Vector3::from(*t);
    let norm = v.norm();
    if !norm.is_finite() || norm == 0.0 {
        return Err(CliError::Invalid("direction must be a finite non-zero vector".into()));
    }
    let off = (norm - 1.0).abs();
    if off > 1e-12 {
        Ok((UnitVector3::new(v)?, off))
    } else {
        Ok((UnitVector3::new_unchecked(v), off))
    }
}

impl GraphFile {
    /// Serializes the stored orientation and labels of `graph`.
    pub fn from_graph(graph: &EpipolarGraph) -> Self {
        let edges = graph
            .edges()
            .iter()
            .map(|e| {
                let d = e.motion.direction.as_vector();
                EdgeRecord {
                    i: e.source,
                    j: e.target,
                    r: row_major(e.motion.rotation.matrix()),
                    t: [d.x, d.y, d.z],
                    weight: (e.weight != 1.0).then_some(e.weight),
                }
            })
            .collect();
        Self {
            n: graph.n(),
            edges,
            ground_truth: None,
        }
    }

    pub fn to_graph(&self) -> CliResult<(EpipolarGraph, LoadReport)> {
        let mut report = LoadReport::default();
        let mut edges = Vec::with_capacity(self.edges.len());
        for (id, e) in self.edges.iter().enumerate() {
            let context = |err: CliError| CliError::Invalid(format!("edge {id} ({}, {}): {err}", e.i, e.j));
            let (rotation, projected) = load_rotation(&e.r).map_err(context)?;
            if projected {
                log::warn!("edge {id}: rotation projected onto SO(3)");
                report.projected_rotations.push(id);
            }
            let (direction, off) = load_direction(&e.t).map_err(context)?;
            if off > 1e-12 {
                if off > DIRECTION_WARN {
                    log::warn!("edge {id}: direction norm off by {off:.3e}, normalized");
                }
                report.renormalized_directions.push(id);
            }
            edges.push((e.i, e.j, RelativeMotion::new(rotation, direction), e.weight.unwrap_or(1.0)));
        }
        let graph = EpipolarGraph::with_weights(self.n, edges)?;
        Ok((graph, report))
    }

    /// True scales, taken from `scales` or computed from `poses`.
    pub fn truth_scales(&self) -> CliResult<Option<Vec<f64>>> {
        let Some(truth) = &self.ground_truth else {
            return Ok(None);
        };
        if let Some(scales) = &truth.scales {
            if scales.len() != self.edges.len() {
                return Err(CliError::Invalid(format!(
                    "ground truth has {} scales for {} edges",
                    scales.len(),
                    self.edges.len()
                )));
            }
            return Ok(Some(scales.clone()));
        }
        let Some(poses) = &truth.poses else {
            return Ok(None);
        };
        if poses.len() != self.n {
            return Err(CliError::Invalid(format!("ground truth has {} poses for {} cameras", poses.len(), self.n)));
        }
        let poses = poses.iter().map(pose_from_record).collect::<CliResult<Vec<_>>>()?;
        self.edges
            .iter()
            .map(|e| {
                let (pi, pj) = (poses.get(e.i), poses.get(e.j));
                match (pi, pj) {
                    (Some(pi), Some(pj)) => Ok(relative_from_absolute(pi, pj)?.1),
                    _ => Err(CliError::Invalid(format!("edge ({}, {}) out of range", e.i, e.j))),
                }
            })
            .collect::<CliResult<Vec<_>>>()
            .map(Some)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        write_json(path, self)
    }
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Parse(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

/// Parses `id r00 r01 … r22 cx cy cz` lines; `#` starts a comment. Ids must
/// cover `0..n` exactly once.
pub fn parse_pose_list(text: &str) -> CliResult<Vec<AbsolutePose>> {
    let mut slots: Vec<Option<AbsolutePose>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| CliError::Parse(format!("pose line {}: {msg}", lineno + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 13 {
            return Err(bad(&format!("expected 13 fields, found {}", fields.len())));
        }
        let id: usize = fields[0].parse().map_err(|_| bad("camera id is not an integer"))?;
        let values = fields[1..]
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad("non-numeric entry"))?;
        let record = PoseRecord {
            r: values[..9].try_into().expect("nine entries"),
            c: values[9..].try_into().expect("three entries"),
        };
        let pose = pose_from_record(&record).map_err(|e| bad(&e.to_string()))?;
        if slots.len() <= id {
            slots.resize(id + 1, None);
        }
        if slots[id].replace(pose).is_some() {
            return Err(bad(&format!("camera {id} listed twice")));
        }
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(id, p)| p.ok_or_else(|| CliError::Parse(format!("camera {id} missing from pose list"))))
        .collect()
}
