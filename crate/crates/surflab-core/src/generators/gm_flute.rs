//! The transient one-ended planar graph behind the non-parabolic flute
//! surface construction, frozen to one concrete combinatorial realization.
//!
//! Construction stages:
//! 1. Trivalent tree embedded in the plane: root children counterclockwise
//!    0,1,2; at a non-root vertex the ccw edge order is (parent, child 0,
//!    child 1). Complementary faces are indexed by their apex corner: for a
//!    non-root word `w` the face `F(w)` fills the corner between the edges to
//!    `w0` and `w1`; the root carries three faces (gaps 0,1,2).
//! 2. Each face's boundary is the bi-infinite path `v_i(F)` (apex at i = 0,
//!    `v_1 = w0`, then append 1s; `v_{-1} = w1`, then append 0s; the face
//!    interior lies to the left of the walk in increasing i). A half-plane
//!    square grid is glued along it: vertices `(i, j)` for j ≥ 1, with the
//!    path as row 0, horizontals `(i,j)-(i+1,j)`, verticals `(i,j)-(i,j+1)`,
//!    and gluing edges `(i,1)-v_i`.
//! 3. Every square — strip squares between rows 0 and 1 included — gets the
//!    diagonal from its lower-left to its upper-right corner, so every face
//!    of the intermediate graph is a triangle.
//! 4. Each triangle receives a barycenter vertex joined to the triangle's
//!    three corners and to the barycenters of the three edge-adjacent
//!    triangles; all pre-barycenter edges are removed.
//!
//! Square `(F, i, j)` spans path positions i..i+1 and rows j..j+1 with
//! corners A = (i,j), B = (i+1,j), C = (i+1,j+1), D = (i,j+1); its `low`
//! triangle is (A,B,C) and its `high` triangle (A,C,D). Degrees: tree
//! vertices 9, grid vertices 6, barycenters 6 — family valence bound 9.
//!
//! Neighbor lists are counterclockwise planar rotations, so truncations can
//! be checked for genus 0 by face tracing.

use super::TreeWord;

/// Complementary face of the embedded tree, named by its apex corner.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceId {
    pub apex: TreeWord,
    /// Which of the three root corners, when `apex` is the root; 0 otherwise.
    pub gap: u8,
}

impl FaceId {
    pub fn at_apex(apex: TreeWord) -> Self {
        debug_assert!(!apex.is_root());
        FaceId { apex, gap: 0 }
    }

    pub fn root_gap(gap: u8) -> Self {
        FaceId {
            apex: TreeWord::root(),
            gap: gap % 3,
        }
    }
}

/// Vertex address in the barycentric flute graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GmKey {
    Tree(TreeWord),
    /// Grid vertex of face `face` at path position `i`, row `j >= 1`.
    Grid { face: FaceId, i: i64, j: u32 },
    /// Barycenter of the `upper` (A,C,D) or lower (A,B,C) triangle of square
    /// `(face, i, j)`; `j = 0` is the strip between the path and row 1.
    Bary {
        face: FaceId,
        i: i64,
        j: u32,
        upper: bool,
    },
}

/// The `i`-th vertex of the face's boundary path.
pub fn path_vertex(face: &FaceId, i: i64) -> TreeWord {
    if face.apex.is_root() {
        match i {
            0 => TreeWord::root(),
            _ if i > 0 => TreeWord(vec![face.gap]).extend_with(1, (i - 1) as usize),
            _ => TreeWord(vec![(face.gap + 1) % 3]).extend_with(0, (-i - 1) as usize),
        }
    } else {
        match i {
            0 => face.apex.clone(),
            _ if i > 0 => face.apex.child(0).extend_with(1, (i - 1) as usize),
            _ => face.apex.child(1).extend_with(0, (-i - 1) as usize),
        }
    }
}

/// Trailing letters equal to `c` among positions 1.. (the first letter is a
/// root-child label, not part of the 0/1 alphabet).
fn trailing_in_tail(w: &TreeWord, c: u8) -> usize {
    w.0[1..].iter().rev().take_while(|&&x| x == c).count()
}

/// The three (face, path-position) incidences of a tree vertex, ordered as
/// the ccw corners (parent→child0), (child0→child1), (child1→parent); for
/// the root, the corners are the gaps 0, 1, 2.
pub fn vertex_corners(v: &TreeWord) -> Vec<(FaceId, i64)> {
    if v.is_root() {
        return (0..3).map(|g| (FaceId::root_gap(g), 0)).collect();
    }
    // corner (parent→child0): minus side of the face the vertex descends
    // into along 0s; corner (child1→parent): plus side along 1s.
    let mz = trailing_in_tail(v, 0);
    let minus = {
        let r = v.strip(mz);
        let face = if r.depth() == 1 {
            FaceId::root_gap((r.0[0] + 2) % 3)
        } else {
            FaceId::at_apex(r.strip(1))
        };
        (face, -(mz as i64) - 1)
    };
    let mo = trailing_in_tail(v, 1);
    let plus = {
        let r = v.strip(mo);
        let face = if r.depth() == 1 {
            FaceId::root_gap(r.0[0])
        } else {
            FaceId::at_apex(r.strip(1))
        };
        (face, mo as i64 + 1)
    };
    vec![minus, (FaceId::at_apex(v.clone()), 0), plus]
}

/// Both (face, i) incidences of the tree edge from `child`'s parent to
/// `child`: the edge occupies path positions (i, i+1) in each face.
pub fn tree_edge_incidences(child: &TreeWord) -> [(FaceId, i64); 2] {
    debug_assert!(!child.is_root());
    if child.depth() == 1 {
        let h = child.0[0];
        return [
            (FaceId::root_gap(h), 0),
            (FaceId::root_gap((h + 2) % 3), -1),
        ];
    }
    let parent = child.parent().expect("depth >= 2");
    let last = *child.0.last().unwrap();
    if last == 0 {
        // walked apex-first in F(parent); reversed deep on the minus side of
        // the face the parent's trailing 0s descend from.
        let mz = trailing_in_tail(&parent, 0);
        let r = parent.strip(mz);
        let other = if r.depth() == 1 {
            FaceId::root_gap((r.0[0] + 2) % 3)
        } else {
            FaceId::at_apex(r.strip(1))
        };
        [
            (FaceId::at_apex(parent), 0),
            (other, -(mz as i64) - 2),
        ]
    } else {
        let mo = trailing_in_tail(child, 1);
        let r = child.strip(mo);
        let other = if r.depth() == 1 {
            FaceId::root_gap(r.0[0])
        } else {
            FaceId::at_apex(r.strip(1))
        };
        [(FaceId::at_apex(parent), -1), (other, mo as i64)]
    }
}

fn low(face: &FaceId, i: i64, j: u32) -> GmKey {
    GmKey::Bary {
        face: face.clone(),
        i,
        j,
        upper: false,
    }
}

fn high(face: &FaceId, i: i64, j: u32) -> GmKey {
    GmKey::Bary {
        face: face.clone(),
        i,
        j,
        upper: true,
    }
}

/// Corner (i, j) of a square lattice point of the face: a tree vertex on row
/// 0, a grid vertex above.
fn corner(face: &FaceId, i: i64, j: u32) -> GmKey {
    if j == 0 {
        GmKey::Tree(path_vertex(face, i))
    } else {
        GmKey::Grid {
            face: face.clone(),
            i,
            j,
        }
    }
}

/// Barycenter of the strip triangle on the other side of the tree edge
/// occupying positions (i, i+1) of `face`.
fn strip_partner(face: &FaceId, i: i64) -> GmKey {
    let a = path_vertex(face, i);
    let b = path_vertex(face, i + 1);
    let child = if a.depth() > b.depth() { a } else { b };
    let [inc0, inc1] = tree_edge_incidences(&child);
    let (of, oi) = if inc0.0 == *face && inc0.1 == i {
        inc1
    } else {
        debug_assert!(inc1.0 == *face && inc1.1 == i);
        inc0
    };
    low(&of, oi, 0)
}

pub(super) fn neighbors(key: &GmKey) -> Vec<GmKey> {
    match key {
        GmKey::Tree(v) => {
            // Three corners, three triangles each, all in ccw order: within a
            // corner at path position i the sweep from the outgoing path edge
            // to the incoming one crosses low(i,0), high(i,0), low(i-1,0).
            let mut out = Vec::with_capacity(9);
            for (face, i) in vertex_corners(v) {
                out.push(low(&face, i, 0));
                out.push(high(&face, i, 0));
                out.push(low(&face, i - 1, 0));
            }
            out
        }
        GmKey::Grid { face, i, j } => {
            // ccw from East: the six triangles around an interior lattice
            // vertex of the triangulated half-plane.
            vec![
                low(face, *i, *j),
                high(face, *i, *j),
                low(face, i - 1, *j),
                high(face, i - 1, j - 1),
                low(face, i - 1, j - 1),
                high(face, *i, j - 1),
            ]
        }
        GmKey::Bary {
            face,
            i,
            j,
            upper: false,
        } => {
            let across_ab = if *j == 0 {
                strip_partner(face, *i)
            } else {
                high(face, *i, j - 1)
            };
            vec![
                corner(face, *i, *j),
                across_ab,
                corner(face, i + 1, *j),
                high(face, i + 1, *j),
                corner(face, i + 1, j + 1),
                high(face, *i, *j),
            ]
        }
        GmKey::Bary {
            face,
            i,
            j,
            upper: true,
        } => vec![
            corner(face, *i, *j),
            low(face, *i, *j),
            corner(face, i + 1, j + 1),
            low(face, *i, j + 1),
            corner(face, *i, j + 1),
            low(face, i - 1, *j),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(letters: &[u8]) -> TreeWord {
        TreeWord(letters.to_vec())
    }

    #[test]
    fn path_vertices_around_apex() {
        let f = FaceId::at_apex(w(&[2]));
        assert_eq!(path_vertex(&f, 0), w(&[2]));
        assert_eq!(path_vertex(&f, 1), w(&[2, 0]));
        assert_eq!(path_vertex(&f, 2), w(&[2, 0, 1]));
        assert_eq!(path_vertex(&f, -1), w(&[2, 1]));
        assert_eq!(path_vertex(&f, -3), w(&[2, 1, 0, 0]));
    }

    #[test]
    fn root_gap_paths() {
        let g1 = FaceId::root_gap(1);
        assert_eq!(path_vertex(&g1, 0), TreeWord::root());
        assert_eq!(path_vertex(&g1, 1), w(&[1]));
        assert_eq!(path_vertex(&g1, 2), w(&[1, 1]));
        assert_eq!(path_vertex(&g1, -1), w(&[2]));
        assert_eq!(path_vertex(&g1, -2), w(&[2, 0]));
    }

    #[test]
    fn every_tree_edge_borders_two_faces() {
        // spot-check that the incidences agree with the face paths
        for child in [w(&[0]), w(&[1, 0]), w(&[2, 1]), w(&[0, 1, 1]), w(&[1, 0, 0])] {
            let parent = child.parent().unwrap();
            for (face, i) in tree_edge_incidences(&child) {
                let a = path_vertex(&face, i);
                let b = path_vertex(&face, i + 1);
                assert!(
                    (a == parent && b == child) || (a == child && b == parent),
                    "incidence mismatch for child {:?} in {:?} at {}",
                    child,
                    face,
                    i
                );
            }
            let [f0, f1] = tree_edge_incidences(&child);
            assert_ne!(f0.0, f1.0, "the two faces must differ");
        }
    }

    #[test]
    fn corners_cover_each_vertex_exactly() {
        for v in [w(&[0]), w(&[1, 1]), w(&[2, 0, 1]), w(&[0, 1, 0, 0])] {
            let corners = vertex_corners(&v);
            assert_eq!(corners.len(), 3);
            for (face, i) in &corners {
                assert_eq!(path_vertex(face, *i), v);
            }
            // three distinct faces
            assert_ne!(corners[0].0, corners[1].0);
            assert_ne!(corners[1].0, corners[2].0);
            assert_ne!(corners[0].0, corners[2].0);
        }
    }

    #[test]
    fn degrees() {
        assert_eq!(neighbors(&GmKey::Tree(TreeWord::root())).len(), 9);
        assert_eq!(neighbors(&GmKey::Tree(w(&[1, 0]))).len(), 9);
        let f = FaceId::at_apex(w(&[0]));
        assert_eq!(
            neighbors(&GmKey::Grid {
                face: f.clone(),
                i: 3,
                j: 2
            })
            .len(),
            6
        );
        assert_eq!(
            neighbors(&GmKey::Bary {
                face: f,
                i: -2,
                j: 0,
                upper: false
            })
            .len(),
            6
        );
    }
}
