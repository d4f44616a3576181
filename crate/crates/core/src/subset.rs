//! Subsets `S` of a field: distinct elements in a fixed order.

use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::rng::Stream;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subset {
    elems: Vec<FieldElement>,
}

impl Subset {
    /// Validates that every index lies in `[0, q)` and that none repeats.
    pub fn from_indices(spec: &FieldSpec, indices: &[u64]) -> Result<Self> {
        let mut seen = HashSet::with_capacity(indices.len());
        let mut elems = Vec::with_capacity(indices.len());
        for &i in indices {
            let e = spec.element(i)?;
            if !seen.insert(i) {
                return Err(Error::pre(format!("duplicate element {i} in subset")));
            }
            elems.push(e);
        }
        Ok(Self { elems })
    }

    pub fn full_field(spec: &FieldSpec) -> Self {
        Self {
            elems: spec.elements().collect(),
        }
    }

    /// `n` distinct elements drawn by rejection from `stream`.
    pub fn random(spec: &FieldSpec, n: usize, stream: &mut Stream) -> Result<Self> {
        let q = spec.order();
        if n as u64 > q {
            return Err(Error::pre(format!("subset size n = {n} > q = {q}")));
        }
        let mut seen = HashSet::with_capacity(n);
        let mut elems = Vec::with_capacity(n);
        while elems.len() < n {
            let i = stream.below(q);
            if seen.insert(i) {
                elems.push(FieldElement::from_index_unchecked(i));
            }
        }
        Ok(Self { elems })
    }

    /// Plain text, one integer per line; blank lines are ignored.
    pub fn parse(spec: &FieldSpec, text: &str) -> Result<Self> {
        let mut indices = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v: u64 = line.parse().map_err(|_| {
                Error::pre(format!("subset line {}: '{line}' is not a nonnegative integer", lineno + 1))
            })?;
            indices.push(v);
        }
        Self::from_indices(spec, &indices)
    }

    pub fn read_file(spec: &FieldSpec, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(spec, &text)
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[FieldElement] {
        &self.elems
    }

    pub fn indices(&self) -> Vec<u64> {
        self.elems.iter().map(|e| e.index()).collect()
    }
}
