//! Flute-tree generator: finitely many infinite rays from a root vertex, each
//! ray carrying a uniform per-vertex attachment, plus an optional finite
//! attachment at the root itself.
//!
//! Attachments model the "finite trees attached at each vertex" of the
//! tree-end recurrence arguments; the `Ray` attachment hangs an infinite bare
//! ray off every ray vertex, producing a tree whose end space has a two-level
//! countable hierarchy (the attached-ray ends accumulate at the main end).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-vertex attachment rule along a ray.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Attachment {
    /// No attachment: a bare ray.
    None,
    /// A pendant path of `length` vertices (length 1 = comb tooth).
    Path { length: u32 },
    /// A full binary tree with `depth` levels (depth 1 = single vertex).
    Binary { depth: u32 },
    /// An infinite bare ray, one per host vertex.
    Ray,
}

impl Attachment {
    pub fn is_none(&self) -> bool {
        matches!(self, Attachment::None)
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Attachment::Ray)
    }

    /// Depth of the finite attachment (0 for none; rays are unbounded).
    pub fn finite_depth(&self) -> Option<u32> {
        match self {
            Attachment::None => Some(0),
            Attachment::Path { length } => Some(*length),
            Attachment::Binary { depth } => Some(*depth),
            Attachment::Ray => None,
        }
    }
}

/// Spec for a flute tree: one attachment rule per ray, plus an optional
/// finite attachment at the root. A spec with zero rays and no root
/// attachment is the single-vertex graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FluteTreeSpec {
    pub rays: Vec<Attachment>,
    #[serde(default = "default_root_attachment")]
    pub root_attachment: Attachment,
}

fn default_root_attachment() -> Attachment {
    Attachment::None
}

impl FluteTreeSpec {
    /// `n` bare rays from the root.
    pub fn bare_rays(n: usize) -> Self {
        FluteTreeSpec {
            rays: vec![Attachment::None; n],
            root_attachment: Attachment::None,
        }
    }

    /// One ray with a single pendant vertex at every ray vertex.
    pub fn comb() -> Self {
        FluteTreeSpec {
            rays: vec![Attachment::Path { length: 1 }],
            root_attachment: Attachment::None,
        }
    }

    /// Just the root vertex.
    pub fn single_vertex() -> Self {
        FluteTreeSpec {
            rays: Vec::new(),
            root_attachment: Attachment::None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rays.len() > u16::MAX as usize {
            return Err(Error::MalformedSpec(format!(
                "{} rays (max {})",
                self.rays.len(),
                u16::MAX
            )));
        }
        for (i, a) in self
            .rays
            .iter()
            .chain(std::iter::once(&self.root_attachment))
            .enumerate()
        {
            match a {
                Attachment::Path { length: 0 } => {
                    return Err(Error::MalformedSpec(format!(
                        "attachment {i}: path length must be >= 1"
                    )))
                }
                Attachment::Binary { depth } if *depth == 0 || *depth > 24 => {
                    return Err(Error::MalformedSpec(format!(
                        "attachment {i}: binary depth must be in 1..=24"
                    )))
                }
                _ => {}
            }
        }
        if !self.root_attachment.is_finite() {
            return Err(Error::MalformedSpec(
                "root attachment must be finite (add a ray instead)".into(),
            ));
        }
        Ok(())
    }

    pub fn valence_bound(&self) -> usize {
        let root_deg = self.rays.len() + usize::from(!self.root_attachment.is_none());
        root_deg.max(3)
    }

    /// True when every attachment is finite (tree has finitely many ends).
    pub fn has_finitely_many_ends(&self) -> bool {
        self.rays.iter().all(Attachment::is_finite)
    }

    /// Largest depth of any finite attachment (used by replay to know how far
    /// from the truncation boundary leaf peeling is complete).
    pub fn max_finite_attachment_depth(&self) -> u32 {
        self.rays
            .iter()
            .chain(std::iter::once(&self.root_attachment))
            .filter_map(Attachment::finite_depth)
            .max()
            .unwrap_or(0)
    }

    fn attachment_for(&self, key: &FluteKey) -> &Attachment {
        match key {
            FluteKey::Attach { ray, .. } => &self.rays[*ray as usize],
            FluteKey::RootAttach { .. } => &self.root_attachment,
            _ => unreachable!("not an attachment key"),
        }
    }

    pub(crate) fn neighbors(&self, key: &FluteKey) -> Vec<FluteKey> {
        match key {
            FluteKey::Root => {
                let mut out: Vec<FluteKey> = (0..self.rays.len() as u16)
                    .map(|ray| FluteKey::Ray { ray, pos: 1 })
                    .collect();
                if !self.root_attachment.is_none() {
                    out.push(FluteKey::RootAttach { node: 1 });
                }
                out
            }
            FluteKey::Ray { ray, pos } => {
                let mut out = vec![if *pos == 1 {
                    FluteKey::Root
                } else {
                    FluteKey::Ray {
                        ray: *ray,
                        pos: pos - 1,
                    }
                }];
                out.push(FluteKey::Ray {
                    ray: *ray,
                    pos: pos + 1,
                });
                if !self.rays[*ray as usize].is_none() {
                    out.push(FluteKey::Attach {
                        ray: *ray,
                        pos: *pos,
                        node: 1,
                    });
                }
                out
            }
            FluteKey::Attach { ray, pos, node } => {
                let host = FluteKey::Ray {
                    ray: *ray,
                    pos: *pos,
                };
                let make = |node| FluteKey::Attach {
                    ray: *ray,
                    pos: *pos,
                    node,
                };
                attachment_neighbors(self.attachment_for(key), *node, host, make)
            }
            FluteKey::RootAttach { node } => {
                let make = |node| FluteKey::RootAttach { node };
                attachment_neighbors(&self.root_attachment, *node, FluteKey::Root, make)
            }
        }
    }
}

/// Vertex address in a flute tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FluteKey {
    Root,
    /// `pos`-th vertex (1-based) along ray `ray`.
    Ray { ray: u16, pos: u32 },
    /// Node inside the attachment hanging off `Ray{ray,pos}`. For path and
    /// ray attachments `node` is the 1-based depth; for binary attachments it
    /// is the 1-based heap index.
    Attach { ray: u16, pos: u32, node: u32 },
    /// Node inside the root attachment.
    RootAttach { node: u32 },
}

fn attachment_neighbors<F>(rule: &Attachment, node: u32, host: FluteKey, make: F) -> Vec<FluteKey>
where
    F: Fn(u32) -> FluteKey,
{
    match rule {
        Attachment::None => unreachable!("no attachment nodes under a bare rule"),
        Attachment::Path { length } => {
            let mut out = vec![if node == 1 { host } else { make(node - 1) }];
            if node < *length {
                out.push(make(node + 1));
            }
            out
        }
        Attachment::Ray => {
            vec![
                if node == 1 { host } else { make(node - 1) },
                make(node + 1),
            ]
        }
        Attachment::Binary { depth } => {
            let mut out = vec![if node == 1 { host } else { make(node / 2) }];
            // heap level of `node` is floor(log2(node)) + 1
            let level = 32 - node.leading_zeros();
            if level < *depth {
                out.push(make(2 * node));
                out.push(make(2 * node + 1));
            }
            out
        }
    }
}
