//! Finite groups given by their Cayley table.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::seeded_rng;

/// Group elements are indices into the Cayley table.
pub type Element = usize;

/// Orders up to this bound get an exhaustive associativity check.
pub const EXHAUSTIVE_ASSOCIATIVITY_MAX: usize = 64;
const SAMPLED_TRIPLES: usize = 10_000;

/// A finite group stored as its multiplication table.
///
/// `mult[g][h]` is the index of `gh`. Immutable once constructed; every
/// constructor checks the group axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    mult: Vec<Vec<Element>>,
    inv: Vec<Element>,
    identity: Element,
}

/// On-disk form of a group file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupDocument {
    #[serde(default)]
    pub name: Option<String>,
    pub order: usize,
    pub mult: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inv: Option<Vec<i64>>,
}

impl FiniteGroup {
    /// Builds a group from a Cayley table, computing the inverse table when
    /// `inv` is `None`, and validates every axiom.
    pub fn from_table(
        name: impl Into<String>,
        mult: Vec<Vec<Element>>,
        inv: Option<Vec<Element>>,
    ) -> Result<Self> {
        let n = mult.len();
        if n == 0 {
            return Err(Error::MalformedDocument(
                "empty multiplication table".into(),
            ));
        }
        if let Some(row) = mult.iter().position(|r| r.len() != n) {
            return Err(Error::MalformedDocument(format!(
                "row {row} has {} entries, expected {n}",
                mult[row].len()
            )));
        }
        for (g, row) in mult.iter().enumerate() {
            if let Some(h) = row.iter().position(|&x| x >= n) {
                return Err(Error::NotAGroup {
                    axiom: "closure",
                    witness: format!("mult[{g}][{h}] = {} is not an element", row[h]),
                });
            }
        }

        let identity = (0..n)
            .find(|&e| (0..n).all(|g| mult[e][g] == g && mult[g][e] == g))
            .ok_or_else(|| Error::NotAGroup {
                axiom: "identity",
                witness: "no element e with e·g = g·e = g for all g".into(),
            })?;

        let inv = match inv {
            Some(inv) => {
                if inv.len() != n {
                    return Err(Error::MalformedDocument(format!(
                        "inverse table has {} entries, expected {n}",
                        inv.len()
                    )));
                }
                for (g, &h) in inv.iter().enumerate() {
                    if h >= n || mult[g][h] != identity || mult[h][g] != identity {
                        return Err(Error::NotAGroup {
                            axiom: "inverse",
                            witness: format!("inv[{g}] = {h} is not an inverse of {g}"),
                        });
                    }
                }
                inv
            }
            None => {
                let mut inv = Vec::with_capacity(n);
                for g in 0..n {
                    let h = (0..n)
                        .find(|&h| mult[g][h] == identity && mult[h][g] == identity)
                        .ok_or_else(|| Error::NotAGroup {
                            axiom: "inverse",
                            witness: format!("element {g} has no inverse"),
                        })?;
                    inv.push(h);
                }
                inv
            }
        };

        let group = FiniteGroup {
            name: name.into(),
            mult,
            inv,
            identity,
        };
        group.check_associativity()?;
        Ok(group)
    }

    fn check_associativity(&self) -> Result<()> {
        let n = self.order();
        let check = |a: usize, b: usize, c: usize| -> Result<()> {
            let lhs = self.mul(self.mul(a, b), c);
            let rhs = self.mul(a, self.mul(b, c));
            if lhs != rhs {
                return Err(Error::NotAGroup {
                    axiom: "associativity",
                    witness: format!("({a}·{b})·{c} = {lhs} but {a}·({b}·{c}) = {rhs}"),
                });
            }
            Ok(())
        };
        if n <= EXHAUSTIVE_ASSOCIATIVITY_MAX {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            let mut rng = seeded_rng(0x5eed_a550);
            for _ in 0..SAMPLED_TRIPLES {
                check(
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                )?;
            }
        }
        Ok(())
    }

    pub fn from_document(doc: GroupDocument) -> Result<Self> {
        if doc.order == 0 {
            return Err(Error::MalformedDocument("order must be positive".into()));
        }
        if doc.mult.len() != doc.order {
            return Err(Error::MalformedDocument(format!(
                "order is {} but the table has {} rows",
                doc.order,
                doc.mult.len()
            )));
        }
        let n = doc.order;
        let to_index = |x: i64, at: String| -> Result<usize> {
            usize::try_from(x)
                .ok()
                .filter(|&i| i < n)
                .ok_or_else(|| Error::NotAGroup {
                    axiom: "closure",
                    witness: format!("{at} = {x} is not an element"),
                })
        };
        let mut mult = Vec::with_capacity(n);
        for (g, row) in doc.mult.iter().enumerate() {
            let row = row
                .iter()
                .enumerate()
                .map(|(h, &x)| to_index(x, format!("mult[{g}][{h}]")))
                .collect::<Result<Vec<_>>>()?;
            mult.push(row);
        }
        let inv = match doc.inv {
            Some(v) => Some(
                v.into_iter()
                    .enumerate()
                    .map(|(g, x)| to_index(x, format!("inv[{g}]")))
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        let name = doc.name.unwrap_or_else(|| format!("G{n}"));
        Self::from_table(name, mult, inv)
    }

    pub fn to_document(&self) -> GroupDocument {
        GroupDocument {
            name: Some(self.name.clone()),
            order: self.order(),
            mult: self
                .mult
                .iter()
                .map(|r| r.iter().map(|&x| x as i64).collect())
                .collect(),
            inv: Some(self.inv.iter().map(|&x| x as i64).collect()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.mult.len()
    }

    pub fn identity(&self) -> Element {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        self.mult[a][b]
    }

    #[inline]
    pub fn inv(&self, g: Element) -> Element {
        self.inv[g]
    }

    pub fn elements(&self) -> std::ops::Range<Element> {
        0..self.order()
    }

    pub fn table(&self) -> &[Vec<Element>] {
        &self.mult
    }

    pub fn inverses(&self) -> &[Element] {
        &self.inv
    }

    pub fn check_element(&self, g: Element) -> Result<()> {
        if g < self.order() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: g,
                order: self.order(),
            })
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn center(&self) -> Vec<Element> {
        self.elements()
            .filter(|&z| self.elements().all(|g| self.mul(z, g) == self.mul(g, z)))
            .collect()
    }
}

/// Parses a group file (JSON with `name`, `order`, `mult` and optional `inv`).
pub fn load_group(source: &str) -> Result<FiniteGroup> {
    let doc: GroupDocument =
        serde_json::from_str(source).map_err(|e| Error::MalformedDocument(e.to_string()))?;
    FiniteGroup::from_document(doc)
}

/// The cyclic group `Z_n` with `g·h = (g + h) mod n`.
///
/// # Panics
/// If `n == 0`.
pub fn build_cyclic(n: usize) -> FiniteGroup {
    assert!(n >= 1, "cyclic group needs n >= 1");
    let mult = (0..n)
        .map(|g| (0..n).map(|h| (g + h) % n).collect())
        .collect();
    let inv = (0..n).map(|g| (n - g) % n).collect();
    FiniteGroup {
        name: format!("Z{n}"),
        mult,
        inv,
        identity: 0,
    }
}

/// Index of `(θ, a, v)` in [`build_heisenberg`]'s element order.
pub fn heisenberg_index(n: usize, theta: usize, a: usize, v: usize) -> Element {
    (theta % n) * n * n + (a % n) * n + (v % n)
}

/// Inverse of [`heisenberg_index`].
pub fn heisenberg_coords(n: usize, g: Element) -> (usize, usize, usize) {
    (g / (n * n), (g / n) % n, g % n)
}

/// The discrete Heisenberg group over `Z_n` (`n` odd), elements `(θ, a, v)`
/// with product
/// `(θ′,a′,v′)·(θ,a,v) = (θ′+θ+(a v′ − a′ v)/2, a′+a, v′+v)`.
///
/// Elements are indexed lexicographically in `(θ, a, v)`.
pub fn build_heisenberg(n: usize) -> Result<FiniteGroup> {
    if n.is_multiple_of(2) {
        return Err(Error::EvenModulus(n));
    }
    // 2⁻¹ mod n; n = 1 degenerates to the trivial group.
    let half = n.div_ceil(2) % n.max(1);
    let order = n * n * n;
    let mult: Vec<Vec<Element>> = (0..order)
        .map(|p| {
            let (t1, a1, v1) = heisenberg_coords(n, p);
            (0..order)
                .map(|q| {
                    let (t2, a2, v2) = heisenberg_coords(n, q);
                    let cross = (a2 * v1 + n * n - (a1 * v2) % n) % n;
                    let phi = cross * half % n;
                    heisenberg_index(n, t1 + t2 + phi, a1 + a2, v1 + v2)
                })
                .collect()
        })
        .collect();
    FiniteGroup::from_table(format!("H(Z{n})"), mult, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_from_document() {
        let g = load_group(r#"{"name":"Z2","order":2,"mult":[[0,1],[1,0]]}"#).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.identity(), 0);
        assert_eq!(g.inverses(), &[0, 1]);
    }

    #[test]
    fn missing_inverse_is_reported() {
        let err = load_group(r#"{"order":2,"mult":[[0,1],[1,1]]}"#).unwrap_err();
        match err {
            Error::NotAGroup { axiom, witness } => {
                assert_eq!(axiom, "inverse");
                assert!(witness.contains('1'));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn shape_errors_are_malformed() {
        assert!(matches!(
            load_group(r#"{"order":2,"mult":[[0,1]]}"#),
            Err(Error::MalformedDocument(_))
        ));
        assert!(matches!(
            load_group(r#"{"order":2,"mult":[[0,1],[1]]}"#),
            Err(Error::MalformedDocument(_))
        ));
        assert!(matches!(
            load_group("not json"),
            Err(Error::MalformedDocument(_))
        ));
        assert!(matches!(
            load_group(r#"{"order":0,"mult":[]}"#),
            Err(Error::MalformedDocument(_))
        ));
    }

    #[test]
    fn closure_and_associativity_failures() {
        assert!(matches!(
            load_group(r#"{"order":2,"mult":[[0,1],[1,2]]}"#),
            Err(Error::NotAGroup {
                axiom: "closure",
                ..
            })
        ));
        assert!(matches!(
            load_group(r#"{"order":2,"mult":[[0,-1],[1,0]]}"#),
            Err(Error::NotAGroup {
                axiom: "closure",
                ..
            })
        ));
        // A loop with identity and inverses that is not associative.
        let table = r#"{"order":5,"mult":[
            [0,1,2,3,4],[1,0,3,4,2],[2,4,0,1,3],[3,2,4,0,1],[4,3,1,2,0]]}"#;
        assert!(matches!(
            load_group(table),
            Err(Error::NotAGroup {
                axiom: "associativity",
                ..
            })
        ));
    }

    #[test]
    fn wrong_inverse_table_is_rejected() {
        let err = load_group(r#"{"order":3,"mult":[[0,1,2],[1,2,0],[2,0,1]],"inv":[0,1,2]}"#);
        assert!(matches!(
            err,
            Err(Error::NotAGroup {
                axiom: "inverse",
                ..
            })
        ));
    }

    #[test]
    fn no_identity() {
        let err = load_group(r#"{"order":2,"mult":[[0,0],[0,0]]}"#).unwrap_err();
        assert!(matches!(
            err,
            Error::NotAGroup {
                axiom: "identity",
                ..
            }
        ));
    }

    #[test]
    fn cyclic_groups() {
        let z1 = build_cyclic(1);
        assert_eq!(z1.order(), 1);
        assert_eq!(build_cyclic(2).inverses(), &[0, 1]);
        let z6 = build_cyclic(6);
        assert_eq!(z6.inv(2), 4);
        for n in 1..=12 {
            let g = build_cyclic(n);
            assert!(g.is_abelian());
            // Round trip through the validating constructor.
            FiniteGroup::from_table(g.name(), g.table().to_vec(), None).unwrap();
        }
    }

    #[test]
    fn heisenberg_three() {
        let h = build_heisenberg(3).unwrap();
        assert_eq!(h.order(), 27);
        assert!(!h.is_abelian());
        assert_eq!(h.center().len(), 3);
        let x = heisenberg_index(3, 0, 1, 0);
        let y = heisenberg_index(3, 0, 0, 1);
        let (txy, _, _) = heisenberg_coords(3, h.mul(x, y));
        let (tyx, _, _) = heisenberg_coords(3, h.mul(y, x));
        // φ(y,x) − φ(x,y) = 2⁻¹ − (−2⁻¹) = 1
        assert_eq!((tyx + 3 - txy) % 3, 1);
        assert_eq!(build_heisenberg(1).unwrap().order(), 1);
        assert!(matches!(build_heisenberg(4), Err(Error::EvenModulus(4))));
        assert_eq!(build_heisenberg(5).unwrap().center().len(), 5);
    }
}
