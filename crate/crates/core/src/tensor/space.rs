use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub label: String,
    pub dim: usize,
}

/// Ordered list of named tensor factors. The first factor is the most
/// significant in the row-major linear index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductSpace {
    factors: Vec<Factor>,
}

impl ProductSpace {
    pub fn new<I, S>(factors: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let factors: Vec<Factor> = factors
            .into_iter()
            .map(|(label, dim)| Factor {
                label: label.into(),
                dim,
            })
            .collect();
        Self::from_factors(factors)
    }

    pub fn from_factors(factors: Vec<Factor>) -> Result<Self> {
        for (i, f) in factors.iter().enumerate() {
            if f.dim == 0 {
                return Err(Error::DimMismatch {
                    expected: 1,
                    found: 0,
                });
            }
            if factors[..i].iter().any(|g| g.label == f.label) {
                return Err(Error::DuplicateLabel(f.label.clone()));
            }
        }
        Ok(Self { factors })
    }

    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new([(label.into(), dim)])
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.factors.iter().map(|f| f.label.as_str()).collect()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.factors.iter().any(|f| f.label == label)
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|f| f.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn factor_dim(&self, label: &str) -> Result<usize> {
        Ok(self.factors[self.position(label)?].dim)
    }

    /// Renames factors; labels not mentioned are kept.
    pub fn relabel(&self, renames: &[(&str, &str)]) -> Result<Self> {
        for (from, _) in renames {
            self.position(from)?;
        }
        let factors = self
            .factors
            .iter()
            .map(|f| {
                let label = renames
                    .iter()
                    .find(|(from, _)| *from == f.label)
                    .map(|(_, to)| to.to_string())
                    .unwrap_or_else(|| f.label.clone());
                Factor { label, dim: f.dim }
            })
            .collect();
        Self::from_factors(factors)
    }

    /// Concatenation `self ⊗ other`.
    pub fn tensor(&self, other: &ProductSpace) -> Result<Self> {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Self::from_factors(factors)
    }

    /// Subspace made of the named factors, in the order given.
    pub fn select(&self, labels: &[&str]) -> Result<Self> {
        let factors = labels
            .iter()
            .map(|l| self.position(l).map(|p| self.factors[p].clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_factors(factors)
    }

    /// Same factor dimensions, labels ignored.
    pub fn same_shape(&self, other: &ProductSpace) -> bool {
        self.dims() == other.dims()
    }
}

impl fmt::Display for ProductSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}({})", x.label, x.dim)?;
        }
        write!(f, "]")
    }
}

/// `map[new] = old` linear indices after reordering the factors of `space`
/// so that new factor `i` is old factor `order[i]`.
pub(crate) fn reorder_indices(dims: &[usize], order: &[usize]) -> Vec<usize> {
    let k = dims.len();
    let mut old_stride = vec![1usize; k];
    for i in (0..k.saturating_sub(1)).rev() {
        old_stride[i] = old_stride[i + 1] * dims[i + 1];
    }
    let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let total: usize = dims.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; k];
    for _ in 0..total {
        let old: usize = (0..k).map(|i| digits[i] * old_stride[order[i]]).sum();
        out.push(old);
        // Increment the new multi-index, last digit fastest.
        for i in (0..k).rev() {
            digits[i] += 1;
            if digits[i] < new_dims[i] {
                break;
            }
            digits[i] = 0;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_must_be_unique() {
        assert!(matches!(
            ProductSpace::new([("A", 2), ("A", 3)]),
            Err(Error::DuplicateLabel(_))
        ));
        let s = ProductSpace::new([("A", 2), ("S", 3)]).unwrap();
        assert_eq!(s.dim(), 6);
        assert_eq!(s.to_string(), "[A(2), S(3)]");
        assert_eq!(s.factor_dim("S").unwrap(), 3);
        assert!(matches!(s.position("B"), Err(Error::UnknownLabel(_))));
        let r = s.relabel(&[("A", "C"), ("S", "S|A")]).unwrap();
        assert_eq!(r.labels(), vec!["C", "S|A"]);
        assert!(r.same_shape(&s));
    }

    #[test]
    fn reorder_swaps_two_factors() {
        // dims [2,3]; new order [1,0]: new index (s, a) = 2 s + a -> old 3 a + s
        let m = reorder_indices(&[2, 3], &[1, 0]);
        assert_eq!(m, vec![0, 3, 1, 4, 2, 5]);
        assert_eq!(
            reorder_indices(&[2, 3, 2], &[0, 1, 2]),
            (0..12).collect::<Vec<_>>()
        );
    }
}
