use std::sync::Arc;

use crate::error::ChartError;

/// Default ceiling on chart dimension.
pub const DEFAULT_MAX_DIM: usize = 16;
/// Hard ceiling imposed by the bitmask encoding of multi-indices.
pub const HARD_MAX_DIM: usize = 62;

/// A single coordinate chart: an ordered list of distinct coordinate names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    name: String,
    coords: Vec<String>,
}

impl Chart {
    pub fn new<S: Into<String>>(name: impl Into<String>, coords: impl IntoIterator<Item = S>) -> Result<Arc<Chart>, ChartError> {
        Chart::with_limit(name, coords, DEFAULT_MAX_DIM)
    }

    pub fn with_limit<S: Into<String>>(
        name: impl Into<String>,
        coords: impl IntoIterator<Item = S>,
        max_dim: usize,
    ) -> Result<Arc<Chart>, ChartError> {
        let coords: Vec<String> = coords.into_iter().map(Into::into).collect();
        if coords.is_empty() {
            return Err(ChartError::Empty);
        }
        let limit = max_dim.min(HARD_MAX_DIM);
        if coords.len() > limit {
            return Err(ChartError::TooLarge { dim: coords.len(), limit });
        }
        for (i, c) in coords.iter().enumerate() {
            if !is_identifier(c) {
                return Err(ChartError::InvalidName(c.clone()));
            }
            if coords[..i].contains(c) {
                return Err(ChartError::DuplicateCoordinate(c.clone()));
            }
        }
        Ok(Arc::new(Chart { name: name.into(), coords }))
    }

    /// Placeholder chart used only for debug printing (`x0, x1, ...`).
    pub(crate) fn anonymous() -> Chart {
        Chart { name: String::new(), coords: Vec::new() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    pub fn coord_name(&self, index: usize) -> String {
        self.coords
            .get(index)
            .cloned()
            .unwrap_or_else(|| format!("x{index}"))
    }

    /// Resolves a coordinate name to its index.
    pub fn coordinate(&self, name: &str) -> Result<usize, ChartError> {
        self.index_of(name)
            .ok_or_else(|| ChartError::UnknownCoordinate { name: name.to_string(), chart: self.name.clone() })
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
