//! Sample grids on `(0, ∞)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
    Explicit,
}

impl std::str::FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Scale::Linear),
            "log" => Ok(Scale::Log),
            other => Err(Error::Domain(format!("unknown grid scale `{other}` (expected linear|log)"))),
        }
    }
}

/// Serialized description of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub scale: Scale,
}

/// Sorted, strictly positive sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    spec: GridSpec,
}

impl Grid {
    pub const DEFAULT_MIN: f64 = 0.01;
    pub const DEFAULT_MAX: f64 = 100.0;
    pub const DEFAULT_POINTS: usize = 400;

    pub fn new(min: f64, max: f64, points: usize, scale: Scale) -> Result<Self> {
        if !(min > 0.0 && max.is_finite()) {
            return Err(Error::Domain(format!("grid bounds must satisfy 0 < min, finite max; got [{min}, {max}]")));
        }
        if points < 2 {
            return Err(Error::Domain(format!("grid needs at least 2 points, got {points}")));
        }
        if !(max > min) {
            return Err(Error::Domain(format!("grid needs min < max, got [{min}, {max}]")));
        }
        let last = (points - 1) as f64;
        let nodes = match scale {
            Scale::Log => {
                let (a, b) = (min.ln(), max.ln());
                (0..points).map(|i| (a + (b - a) * i as f64 / last).exp()).collect()
            }
            Scale::Linear => (0..points).map(|i| min + (max - min) * i as f64 / last).collect(),
            Scale::Explicit => return Err(Error::Domain("explicit grids are built with Grid::explicit".into())),
        };
        let mut grid = Self {
            nodes,
            spec: GridSpec { min, max, points, scale },
        };
        // pin the endpoints exactly
        grid.nodes[0] = min;
        grid.nodes[points - 1] = max;
        Ok(grid)
    }

    pub fn log(min: f64, max: f64, points: usize) -> Result<Self> {
        Self::new(min, max, points, Scale::Log)
    }

    pub fn linear(min: f64, max: f64, points: usize) -> Result<Self> {
        Self::new(min, max, points, Scale::Linear)
    }

    /// Takes arbitrary positive points; they are sorted and deduplicated.
    pub fn explicit(mut nodes: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Domain("grid must be nonempty".into()));
        }
        if let Some(bad) = nodes.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
            return Err(Error::Domain(format!("grid points must be positive and finite, got {bad}")));
        }
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        let spec = GridSpec {
            min: nodes[0],
            max: nodes[nodes.len() - 1],
            points: nodes.len(),
            scale: Scale::Explicit,
        };
        Ok(Self { nodes, spec })
    }

    /// 400 log-spaced points on `[0.01, 100]`.
    pub fn default_check() -> Self {
        Self::log(Self::DEFAULT_MIN, Self::DEFAULT_MAX, Self::DEFAULT_POINTS).expect("valid default grid")
    }

    /// 400 log-spaced points on `[0.01, 1e6]`; degree violations sit at large `x`.
    pub fn default_degree() -> Self {
        Self::log(Self::DEFAULT_MIN, 1e6, Self::DEFAULT_POINTS).expect("valid default grid")
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.nodes.binary_search_by(|n| n.total_cmp(&x)).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_endpoints_and_ratio() {
        let g = Grid::log(0.01, 100.0, 5).unwrap();
        assert_eq!(g.nodes()[0], 0.01);
        assert_eq!(g.nodes()[4], 100.0);
        for w in g.nodes().windows(2) {
            assert!((w[1] / w[0] - 10.0).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_grid_spacing() {
        let g = Grid::linear(1.0, 3.0, 5).unwrap();
        assert_eq!(g.nodes(), &[1.0, 1.5, 2.0, 2.5, 3.0]);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::log(0.0, 1.0, 10).is_err());
        assert!(Grid::log(1.0, 1.0, 10).is_err());
        assert!(Grid::log(0.1, 1.0, 1).is_err());
        assert!(Grid::explicit(vec![]).is_err());
        assert!(Grid::explicit(vec![1.0, -2.0]).is_err());
    }

    #[test]
    fn explicit_sorts() {
        let g = Grid::explicit(vec![3.0, 1.0, 2.0, 1.0]).unwrap();
        assert_eq!(g.nodes(), &[1.0, 2.0, 3.0]);
        assert_eq!(g.spec().scale, Scale::Explicit);
        assert!(g.contains(2.0));
        assert!(!g.contains(2.5));
    }

    #[test]
    fn spec_serializes_lowercase() {
        let s = serde_json::to_string(&Grid::default_check().spec()).unwrap();
        assert_eq!(s, r#"{"min":0.01,"max":100.0,"points":400,"scale":"log"}"#);
    }
}
