//! Flow configuration files and command-line overrides.

use std::path::Path;

use teichflow::flow::{Backend, BasePoint, Direction, FlowConfig, FlowKind, Schedule, Tolerances};
use teichflow::{MarkedQuadDiff, Slope, TorusPoint};

use crate::error::{LabError, LabResult};

pub fn load(path: &Path) -> LabResult<FlowConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    parse(&text)
}

pub fn parse(text: &str) -> LabResult<FlowConfig> {
    Ok(serde_json::from_str(text)?)
}

/// Torus earthquake from `i` along `1/0`.
pub fn default_earthquake() -> FlowConfig {
    FlowConfig {
        backend: Backend::Torus,
        flow: FlowKind::Earthquake,
        base: BasePoint::Torus(TorusPoint::I),
        direction: Some(Direction::Slope(Slope::HORIZONTAL)),
        depth: 4,
        schedule: Schedule { t0: 1.0, ratio: 2.0, count: 11 },
        tolerances: Tolerances::default(),
    }
}

/// Horocycle flow of the square torus.
pub fn default_horocycle() -> FlowConfig {
    FlowConfig {
        flow: FlowKind::Horocycle,
        base: BasePoint::Quad(MarkedQuadDiff::SQUARE),
        direction: None,
        ..default_earthquake()
    }
}

/// Optional command-line replacements for config fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub depth: Option<u32>,
    pub t0: Option<f64>,
    pub ratio: Option<f64>,
    pub count: Option<usize>,
    pub tol: Option<f64>,
    pub window: Option<usize>,
    pub direction: Option<Slope>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut FlowConfig) {
        if let Some(d) = self.depth {
            cfg.depth = d;
        }
        if let Some(v) = self.t0 {
            cfg.schedule.t0 = v;
        }
        if let Some(v) = self.ratio {
            cfg.schedule.ratio = v;
        }
        if let Some(v) = self.count {
            cfg.schedule.count = v;
        }
        if let Some(v) = self.tol {
            cfg.tolerances.limit_tol = v;
        }
        if let Some(v) = self.window {
            cfg.tolerances.window = v;
        }
        if let Some(s) = self.direction {
            cfg.direction = Some(Direction::Slope(s));
        }
    }
}
