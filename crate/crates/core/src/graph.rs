//! Compressed adjacency for directed citation graphs.
//!
//! Both directions are stored: `out` lists the patents a node cites and `in`
//! lists the patents citing it. Neighbor lists are sorted ascending, which
//! fixes the accumulation order of every per-node sum computed over them.

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Dense index of a patent within one dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NodeIndex(pub u32);

impl NodeIndex {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeIndex {
    #[inline]
    fn from(i: usize) -> Self {
        NodeIndex(u32::try_from(i).expect("node index exceeds u32 range"))
    }
}

impl fmt::Display for NodeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Counts of edges discarded while building a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GraphBuildReport {
    pub input_edges: usize,
    pub self_loops: usize,
    pub duplicates: usize,
    pub stored_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<NodeIndex>,
}

impl Adjacency {
    #[inline]
    fn neighbors(&self, node: NodeIndex) -> &[NodeIndex] {
        let i = node.index();
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    fn degree(&self, node: NodeIndex) -> usize {
        let i = node.index();
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Transposes an adjacency. Iterating sources in ascending order leaves
    /// every transposed list sorted.
    fn transpose(&self, node_count: usize) -> Adjacency {
        let mut offsets = vec![0usize; node_count + 1];
        for &t in &self.targets {
            offsets[t.index() + 1] += 1;
        }
        for i in 0..node_count {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets[..node_count].to_vec();
        let mut targets = vec![NodeIndex(0); self.targets.len()];
        for u in 0..node_count {
            for &v in &self.targets[self.offsets[u]..self.offsets[u + 1]] {
                targets[cursor[v.index()]] = NodeIndex::from(u);
                cursor[v.index()] += 1;
            }
        }
        Adjacency { offsets, targets }
    }
}

/// Immutable directed citation graph with dense node indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CitationGraph {
    node_count: usize,
    out: Adjacency,
    inc: Adjacency,
    dangling: Vec<NodeIndex>,
}

impl CitationGraph {
    /// Builds a graph from `(citing, cited)` pairs. Self-loops and repeated
    /// pairs are dropped and counted in the returned report.
    pub fn build(
        edges: &[(NodeIndex, NodeIndex)],
        node_count: usize,
    ) -> Result<(CitationGraph, GraphBuildReport)> {
        if let Some(&(citing, cited)) = edges
            .iter()
            .find(|(u, v)| u.index() >= node_count || v.index() >= node_count)
        {
            return Err(Error::MalformedEdge {
                citing,
                cited,
                node_count,
            });
        }

        let mut report = GraphBuildReport {
            input_edges: edges.len(),
            ..Default::default()
        };

        let mut offsets = vec![0usize; node_count + 1];
        for &(u, v) in edges {
            if u == v {
                report.self_loops += 1;
            } else {
                offsets[u.index() + 1] += 1;
            }
        }
        for i in 0..node_count {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets[..node_count].to_vec();
        let mut targets = vec![NodeIndex(0); offsets[node_count]];
        for &(u, v) in edges {
            if u != v {
                targets[cursor[u.index()]] = v;
                cursor[u.index()] += 1;
            }
        }

        // Sort and dedup every list, compacting in place.
        let mut write = 0usize;
        let mut compact_offsets = vec![0usize; node_count + 1];
        for u in 0..node_count {
            let (start, end) = (offsets[u], offsets[u + 1]);
            targets[start..end].sort_unstable();
            let mut last = None;
            for read in start..end {
                let v = targets[read];
                if last == Some(v) {
                    report.duplicates += 1;
                    continue;
                }
                last = Some(v);
                targets[write] = v;
                write += 1;
            }
            compact_offsets[u + 1] = write;
        }
        targets.truncate(write);
        report.stored_edges = write;

        let out = Adjacency {
            offsets: compact_offsets,
            targets,
        };
        Ok((Self::from_out_adjacency(out, node_count), report))
    }

    fn from_out_adjacency(out: Adjacency, node_count: usize) -> CitationGraph {
        let inc = out.transpose(node_count);
        let dangling = (0..node_count)
            .map(NodeIndex::from)
            .filter(|&u| out.degree(u) == 0)
            .collect();
        CitationGraph {
            node_count,
            out,
            inc,
            dangling,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.out.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_count == 0
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeIndex> + Clone {
        (0..self.node_count).map(NodeIndex::from)
    }

    /// Patents cited by `node`, ascending.
    #[inline]
    pub fn out_neighbors(&self, node: NodeIndex) -> &[NodeIndex] {
        self.out.neighbors(node)
    }

    /// Patents citing `node`, ascending.
    #[inline]
    pub fn in_neighbors(&self, node: NodeIndex) -> &[NodeIndex] {
        self.inc.neighbors(node)
    }

    #[inline]
    pub fn out_degree(&self, node: NodeIndex) -> usize {
        self.out.degree(node)
    }

    #[inline]
    pub fn in_degree(&self, node: NodeIndex) -> usize {
        self.inc.degree(node)
    }

    #[inline]
    pub fn is_dangling(&self, node: NodeIndex) -> bool {
        self.out.degree(node) == 0
    }

    /// Nodes without out-links, ascending.
    pub fn dangling_nodes(&self) -> &[NodeIndex] {
        &self.dangling
    }

    /// All stored edges in (citing, cited) lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeIndex, NodeIndex)> + '_ {
        self.nodes()
            .flat_map(move |u| self.out_neighbors(u).iter().map(move |&v| (u, v)))
    }

    /// Graph over the nodes in `keep`, densely re-indexed in ascending
    /// original order, holding exactly the edges with both endpoints kept.
    ///
    /// Panics if an index in `keep` is out of range.
    pub fn induced_subgraph<I>(&self, keep: I) -> (CitationGraph, IndexRemap)
    where
        I: IntoIterator<Item = NodeIndex>,
    {
        let mut mask = vec![false; self.node_count];
        for node in keep {
            mask[node.index()] = true;
        }
        self.induced_by_mask(&mask)
    }

    pub(crate) fn induced_by_mask(&self, mask: &[bool]) -> (CitationGraph, IndexRemap) {
        assert_eq!(mask.len(), self.node_count);
        let remap = IndexRemap::from_mask(mask);
        let kept = remap.new_to_old.len();

        let mut offsets = Vec::with_capacity(kept + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        for &old in &remap.new_to_old {
            targets.extend(
                self.out_neighbors(old)
                    .iter()
                    .filter_map(|&v| remap.old_to_new[v.index()]),
            );
            offsets.push(targets.len());
        }
        // Remapping is monotone, so every list stays sorted.
        let out = Adjacency { offsets, targets };
        (Self::from_out_adjacency(out, kept), remap)
    }

    /// Whether the graph contains no directed cycle (Kahn's algorithm).
    pub fn is_acyclic(&self) -> bool {
        let mut remaining: Vec<usize> = self.nodes().map(|u| self.in_degree(u)).collect();
        let mut queue: VecDeque<NodeIndex> = self
            .nodes()
            .filter(|&u| remaining[u.index()] == 0)
            .collect();
        let mut visited = 0usize;
        while let Some(u) = queue.pop_front() {
            visited += 1;
            for &v in self.out_neighbors(u) {
                remaining[v.index()] -= 1;
                if remaining[v.index()] == 0 {
                    queue.push_back(v);
                }
            }
        }
        visited == self.node_count
    }
}

/// Free-function form of [`CitationGraph::build`].
pub fn build_graph(
    edges: &[(NodeIndex, NodeIndex)],
    node_count: usize,
) -> Result<(CitationGraph, GraphBuildReport)> {
    CitationGraph::build(edges, node_count)
}

/// Old-to-new index mapping produced by [`CitationGraph::induced_subgraph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexRemap {
    old_to_new: Vec<Option<NodeIndex>>,
    new_to_old: Vec<NodeIndex>,
}

impl IndexRemap {
    fn from_mask(mask: &[bool]) -> IndexRemap {
        let mut old_to_new = vec![None; mask.len()];
        let mut new_to_old = Vec::new();
        for (old, &keep) in mask.iter().enumerate() {
            if keep {
                old_to_new[old] = Some(NodeIndex::from(new_to_old.len()));
                new_to_old.push(NodeIndex::from(old));
            }
        }
        IndexRemap {
            old_to_new,
            new_to_old,
        }
    }

    pub fn to_new(&self, old: NodeIndex) -> Option<NodeIndex> {
        self.old_to_new.get(old.index()).copied().flatten()
    }

    pub fn to_old(&self, new: NodeIndex) -> NodeIndex {
        self.new_to_old[new.index()]
    }

    pub fn kept(&self) -> &[NodeIndex] {
        &self.new_to_old
    }

    pub fn is_identity(&self) -> bool {
        self.new_to_old.len() == self.old_to_new.len()
    }
}
