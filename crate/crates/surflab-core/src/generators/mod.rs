//! Lazy generators for the concrete graph families the type-problem machinery
//! runs on: the lattices ℤ¹/ℤ²/ℤ³, the two grid-to-pants-graph transforms,
//! the trivalent tree, the Geyer–Merenkov style flute graph, and spec-driven
//! flute trees.
//!
//! A generator is a pure value: a root key plus a deterministic, symmetric
//! neighbor oracle on structured vertex keys. Truncations (see [`crate::graph`])
//! intern keys in canonical breadth-first discovery order, which makes vertex
//! ids stable across truncations of the same generator.
//!
//! Neighbor order conventions (fixed per family, they double as planar
//! rotations where the family is planar):
//! - grids: +x, −x, +y, −y, +z, −z
//! - t2 pants: connector, then the two grid edges (N,E at the a-half; S,W at b)
//! - t3 pants: along the cluster path x₁x₂x₃x₄ with grid edges in slot order
//! - trees: parent first, then children left-to-right
//! - gm-flute: counterclockwise planar rotation (documented in `gm_flute`)

mod flute;
mod gm_flute;

pub use flute::{Attachment, FluteKey, FluteTreeSpec};
pub use gm_flute::{FaceId, GmKey};

use crate::error::{Error, Result};

/// Vertex address in one of the generated infinite graphs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKey {
    Z1(i64),
    Z2(i64, i64),
    Z3(i64, i64, i64),
    /// T2 pants graph: each ℤ² vertex splits into an `a` half carrying the
    /// North and East grid edges and a `b` half carrying South and West.
    T2 { x: i64, y: i64, half: T2Half },
    /// T3 pants graph: each ℤ³ vertex becomes the path x₁–x₂–x₃–x₄ with grid
    /// edges attached per slot (−x,−y at x₁; −z at x₂; +z at x₃; +x,+y at x₄).
    T3 { x: i64, y: i64, z: i64, slot: T3Slot },
    Tree(TreeWord),
    Gm(GmKey),
    Flute(FluteKey),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum T2Half {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum T3Slot {
    X1,
    X2,
    X3,
    X4,
}

/// Address of a trivalent-tree vertex: empty word is the root, the first
/// letter picks the root subtree (0..=2), subsequent letters pick the left (0)
/// or right (1) child.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TreeWord(pub Vec<u8>);

impl TreeWord {
    pub fn root() -> Self {
        TreeWord(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn parent(&self) -> Option<TreeWord> {
        if self.is_root() {
            None
        } else {
            TreeWord(self.0[..self.0.len() - 1].to_vec()).into()
        }
    }

    pub fn child(&self, c: u8) -> TreeWord {
        let mut w = self.0.clone();
        w.push(c);
        TreeWord(w)
    }

    /// Number of trailing letters equal to `c`.
    pub fn trailing(&self, c: u8) -> usize {
        self.0.iter().rev().take_while(|&&x| x == c).count()
    }

    /// Drops the last `n` letters.
    pub fn strip(&self, n: usize) -> TreeWord {
        TreeWord(self.0[..self.0.len() - n].to_vec())
    }

    /// Appends `n` copies of `c`.
    pub fn extend_with(&self, c: u8, n: usize) -> TreeWord {
        let mut w = self.0.clone();
        w.extend(std::iter::repeat(c).take(n));
        TreeWord(w)
    }
}

/// One of the supported infinite graph families, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Grid { dimension: u8 },
    T2Pants,
    T3Pants,
    TrivalentTree,
    GmFlute,
    FluteTree(FluteTreeSpec),
}

/// Lazy description of an infinite graph: root plus neighbor oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphGenerator {
    family: Family,
}

/// Integer-lattice generator rooted at the origin.
pub fn grid(dimension: u8) -> Result<GraphGenerator> {
    if !(1..=3).contains(&dimension) {
        return Err(Error::UnsupportedDimension(dimension));
    }
    Ok(GraphGenerator {
        family: Family::Grid { dimension },
    })
}

/// Pants graph of the Loch Ness monster over the ℤ²-grid: every grid vertex
/// becomes two vertices joined by a connector edge, with the North and East
/// grid edges on one half and South and West on the other.
pub fn transform_t2(base: &GraphGenerator) -> Result<GraphGenerator> {
    match base.family {
        Family::Grid { dimension: 2 } => Ok(GraphGenerator {
            family: Family::T2Pants,
        }),
        _ => Err(Error::WrongBaseFamily {
            expected: "z2",
            got: base.family_name(),
        }),
    }
}

/// Pants graph of the ℤ³ Loch Ness monster: every grid vertex becomes the
/// path x₁–x₂–x₃–x₄ (new edges f, g, h) with the six grid edges attached so
/// that the divergence identities of the flow lift hold slot by slot.
pub fn transform_t3(base: &GraphGenerator) -> Result<GraphGenerator> {
    match base.family {
        Family::Grid { dimension: 3 } => Ok(GraphGenerator {
            family: Family::T3Pants,
        }),
        _ => Err(Error::WrongBaseFamily {
            expected: "z3",
            got: base.family_name(),
        }),
    }
}

/// Rooted tree with every vertex of degree 3 (the root has three children,
/// every other vertex one parent and two children).
pub fn trivalent_tree() -> GraphGenerator {
    GraphGenerator {
        family: Family::TrivalentTree,
    }
}

/// Transient one-ended planar graph: trivalent tree with a half-plane square
/// grid glued into every complementary face, triangulated, then rebuilt
/// around triangle barycenters. See `gm_flute` for the frozen combinatorics.
pub fn gm_flute_graph() -> GraphGenerator {
    GraphGenerator {
        family: Family::GmFlute,
    }
}

/// Tree made of finitely many rays from the root with a uniform attachment
/// rule along each ray (see [`FluteTreeSpec`]).
pub fn flute_tree(spec: FluteTreeSpec) -> Result<GraphGenerator> {
    spec.validate()?;
    Ok(GraphGenerator {
        family: Family::FluteTree(spec),
    })
}

impl GraphGenerator {
    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn family_name(&self) -> &'static str {
        match &self.family {
            Family::Grid { dimension: 1 } => "z1",
            Family::Grid { dimension: 2 } => "z2",
            Family::Grid { dimension: _ } => "z3",
            Family::T2Pants => "t2-pants",
            Family::T3Pants => "t3-pants",
            Family::TrivalentTree => "trivalent",
            Family::GmFlute => "gm-flute",
            Family::FluteTree(_) => "flute-tree",
        }
    }

    /// Family-specific parameters, as stored in graph files.
    pub fn parameters(&self) -> serde_json::Value {
        match &self.family {
            Family::Grid { dimension } => serde_json::json!({ "dimension": dimension }),
            Family::T2Pants => serde_json::json!({ "base": "z2" }),
            Family::T3Pants => serde_json::json!({ "base": "z3" }),
            Family::TrivalentTree | Family::GmFlute => serde_json::json!({}),
            Family::FluteTree(spec) => serde_json::to_value(spec).expect("spec serializes"),
        }
    }

    pub fn root(&self) -> VertexKey {
        match &self.family {
            Family::Grid { dimension: 1 } => VertexKey::Z1(0),
            Family::Grid { dimension: 2 } => VertexKey::Z2(0, 0),
            Family::Grid { dimension: _ } => VertexKey::Z3(0, 0, 0),
            Family::T2Pants => VertexKey::T2 {
                x: 0,
                y: 0,
                half: T2Half::A,
            },
            Family::T3Pants => VertexKey::T3 {
                x: 0,
                y: 0,
                z: 0,
                slot: T3Slot::X1,
            },
            Family::TrivalentTree => VertexKey::Tree(TreeWord::root()),
            Family::GmFlute => VertexKey::Gm(GmKey::Tree(TreeWord::root())),
            Family::FluteTree(_) => VertexKey::Flute(FluteKey::Root),
        }
    }

    /// Uniform upper bound on vertex degree for this family.
    pub fn valence_bound(&self) -> usize {
        match &self.family {
            Family::Grid { dimension } => 2 * *dimension as usize,
            Family::T2Pants | Family::T3Pants | Family::TrivalentTree => 3,
            Family::GmFlute => 9,
            Family::FluteTree(spec) => spec.valence_bound(),
        }
    }

    /// True for families that are trees (no cycles).
    pub fn is_tree(&self) -> bool {
        matches!(
            self.family,
            Family::TrivalentTree | Family::FluteTree(_)
        )
    }

    /// Deterministic, symmetric neighbor oracle. The returned order is the
    /// family's canonical order (a planar rotation for planar families).
    pub fn neighbors(&self, key: &VertexKey) -> Vec<VertexKey> {
        match (&self.family, key) {
            (Family::Grid { dimension: 1 }, VertexKey::Z1(x)) => {
                vec![VertexKey::Z1(x + 1), VertexKey::Z1(x - 1)]
            }
            (Family::Grid { dimension: 2 }, VertexKey::Z2(x, y)) => vec![
                VertexKey::Z2(x + 1, *y),
                VertexKey::Z2(x - 1, *y),
                VertexKey::Z2(*x, y + 1),
                VertexKey::Z2(*x, y - 1),
            ],
            (Family::Grid { dimension: 3 }, VertexKey::Z3(x, y, z)) => vec![
                VertexKey::Z3(x + 1, *y, *z),
                VertexKey::Z3(x - 1, *y, *z),
                VertexKey::Z3(*x, y + 1, *z),
                VertexKey::Z3(*x, y - 1, *z),
                VertexKey::Z3(*x, *y, z + 1),
                VertexKey::Z3(*x, *y, z - 1),
            ],
            (Family::T2Pants, VertexKey::T2 { x, y, half }) => match half {
                // a-half carries North and East, b-half South and West; the
                // far end of a grid edge is always the opposite half.
                T2Half::A => vec![
                    VertexKey::T2 {
                        x: *x,
                        y: *y,
                        half: T2Half::B,
                    },
                    VertexKey::T2 {
                        x: *x,
                        y: y + 1,
                        half: T2Half::B,
                    },
                    VertexKey::T2 {
                        x: x + 1,
                        y: *y,
                        half: T2Half::B,
                    },
                ],
                T2Half::B => vec![
                    VertexKey::T2 {
                        x: *x,
                        y: *y,
                        half: T2Half::A,
                    },
                    VertexKey::T2 {
                        x: *x,
                        y: y - 1,
                        half: T2Half::A,
                    },
                    VertexKey::T2 {
                        x: x - 1,
                        y: *y,
                        half: T2Half::A,
                    },
                ],
            },
            (Family::T3Pants, VertexKey::T3 { x, y, z, slot }) => {
                let at = |x, y, z, slot| VertexKey::T3 { x, y, z, slot };
                match slot {
                    // x₁ receives −x (role e₅) and −y (role e₆); f runs to x₂.
                    T3Slot::X1 => vec![
                        at(x - 1, *y, *z, T3Slot::X4),
                        at(*x, y - 1, *z, T3Slot::X4),
                        at(*x, *y, *z, T3Slot::X2),
                    ],
                    // x₂ receives −z (role e₄); f from x₁, g to x₃.
                    T3Slot::X2 => vec![
                        at(*x, *y, *z, T3Slot::X1),
                        at(*x, *y, z - 1, T3Slot::X3),
                        at(*x, *y, *z, T3Slot::X3),
                    ],
                    // x₃ sends +z (role e₃); g from x₂, h to x₄.
                    T3Slot::X3 => vec![
                        at(*x, *y, *z, T3Slot::X2),
                        at(*x, *y, z + 1, T3Slot::X2),
                        at(*x, *y, *z, T3Slot::X4),
                    ],
                    // x₄ sends +x (role e₁) and +y (role e₂); h from x₃.
                    T3Slot::X4 => vec![
                        at(*x, *y, *z, T3Slot::X3),
                        at(x + 1, *y, *z, T3Slot::X1),
                        at(*x, y + 1, *z, T3Slot::X1),
                    ],
                }
            }
            (Family::TrivalentTree, VertexKey::Tree(w)) => {
                if w.is_root() {
                    (0..3).map(|c| VertexKey::Tree(w.child(c))).collect()
                } else {
                    vec![
                        VertexKey::Tree(w.parent().expect("non-root")),
                        VertexKey::Tree(w.child(0)),
                        VertexKey::Tree(w.child(1)),
                    ]
                }
            }
            (Family::GmFlute, VertexKey::Gm(k)) => gm_flute::neighbors(k)
                .into_iter()
                .map(VertexKey::Gm)
                .collect(),
            (Family::FluteTree(spec), VertexKey::Flute(k)) => spec
                .neighbors(k)
                .into_iter()
                .map(VertexKey::Flute)
                .collect(),
            _ => panic!("vertex key does not belong to this family"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_dimensions() {
        assert_eq!(grid(2).unwrap().neighbors(&VertexKey::Z2(0, 0)).len(), 4);
        assert_eq!(
            grid(3).unwrap().neighbors(&VertexKey::Z3(0, 0, 0)).len(),
            6
        );
        assert!(matches!(grid(4), Err(Error::UnsupportedDimension(4))));
    }

    #[test]
    fn transforms_reject_wrong_base() {
        let z2 = grid(2).unwrap();
        let z3 = grid(3).unwrap();
        assert!(transform_t2(&z3).is_err());
        assert!(transform_t3(&z2).is_err());
        assert!(transform_t2(&z2).is_ok());
        assert!(transform_t3(&z3).is_ok());
    }

    #[test]
    fn t2_halves_have_degree_three() {
        let t2 = transform_t2(&grid(2).unwrap()).unwrap();
        for half in [T2Half::A, T2Half::B] {
            let k = VertexKey::T2 { x: 5, y: -3, half };
            assert_eq!(t2.neighbors(&k).len(), 3);
        }
    }

    #[test]
    fn t3_slots_have_degree_three() {
        let t3 = transform_t3(&grid(3).unwrap()).unwrap();
        for slot in [T3Slot::X1, T3Slot::X2, T3Slot::X3, T3Slot::X4] {
            let k = VertexKey::T3 {
                x: 1,
                y: 2,
                z: -4,
                slot,
            };
            assert_eq!(t3.neighbors(&k).len(), 3);
        }
    }

    #[test]
    fn trivalent_root_and_inner_degrees() {
        let t = trivalent_tree();
        assert_eq!(t.neighbors(&t.root()).len(), 3);
        let inner = VertexKey::Tree(TreeWord(vec![2, 0, 1]));
        assert_eq!(t.neighbors(&inner).len(), 3);
    }
}
