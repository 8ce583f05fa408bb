use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinate subspace of `R^n` spanned by the listed (zero-based) axes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubspaceSpec {
    ambient: usize,
    indices: Vec<usize>,
}

impl SubspaceSpec {
    pub fn new(ambient: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() || indices.len() >= ambient {
            return Err(Error::Domain(format!(
                "subspace must have between 1 and {} axes, got {}",
                ambient.saturating_sub(1),
                indices.len()
            )));
        }
        if let Some(&i) = indices.iter().find(|&&i| i >= ambient) {
            return Err(Error::Domain(format!("axis {i} out of range for dimension {ambient}")));
        }
        Ok(SubspaceSpec { ambient, indices })
    }

    /// Parses a comma separated list of one-based axes, e.g. `"1,3"`.
    pub fn parse(ambient: usize, s: &str) -> Result<Self> {
        let idx = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&i| i >= 1)
                    .map(|i| i - 1)
                    .ok_or_else(|| Error::Parse(format!("bad subspace axis '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ambient, idx)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    /// Axes of the orthogonal complement.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.ambient).filter(|i| !self.indices.contains(i)).collect()
    }

    pub fn complement_spec(&self) -> SubspaceSpec {
        SubspaceSpec { ambient: self.ambient, indices: self.complement() }
    }

    pub fn project_point<T: Copy>(&self, x: &[T]) -> Vec<T> {
        self.indices.iter().map(|&i| x[i]).collect()
    }

    pub fn perp_point<T: Copy>(&self, x: &[T]) -> Vec<T> {
        self.complement().iter().map(|&i| x[i]).collect()
    }

    /// Point with `h` on this subspace and `perp` on the complement.
    pub fn embed<T: Copy + Default>(&self, h: &[T], perp: &[T]) -> Vec<T> {
        let mut x = vec![T::default(); self.ambient];
        for (k, &i) in self.indices.iter().enumerate() {
            x[i] = h[k];
        }
        for (k, i) in self.complement().into_iter().enumerate() {
            x[i] = perp[k];
        }
        x
    }

    /// `E ∩ H` for two coordinate subspaces of the same space.
    pub fn intersection_dim(&self, other: &SubspaceSpec) -> usize {
        self.indices.iter().filter(|i| other.indices.contains(i)).count()
    }

    /// Whether every axis of `self` is an axis of `other`.
    pub fn is_within(&self, other: &SubspaceSpec) -> bool {
        self.indices.iter().all(|i| other.indices.contains(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_complement() {
        let h = SubspaceSpec::parse(3, "1,3").unwrap();
        assert_eq!(h.indices(), &[0, 2]);
        assert_eq!(h.complement(), vec![1]);
        assert_eq!(h.embed(&[1.0, 3.0], &[2.0]), vec![1.0, 2.0, 3.0]);
        assert!(SubspaceSpec::parse(2, "1,2").is_err());
        assert!(SubspaceSpec::parse(2, "0").is_err());
        assert!(SubspaceSpec::new(2, vec![4]).is_err());
    }
}
