//! Coloured quivers: graphs whose colour classes are complete multipartite.
//!
//! Each colour class carries an ordering of its parts and of the nodes inside
//! each part, and each node carries a cyclic order on the colours touching it.
//! Edges are determined by the colour partitions; any two nodes in different
//! parts of a class are joined by exactly one edge of that colour.

mod fission;
pub mod format;
mod supernova;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};

pub use fission::{fission_graph, IrregularPart, IrregularType};
pub use supernova::{attach_legs, Leg, Supernova};

pub type Colour = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    /// Smaller endpoint.
    pub a: usize,
    /// Larger endpoint.
    pub b: usize,
    pub colour: Colour,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColourClass {
    pub colour: Colour,
    /// Ordered parts; each part is an ordered list of node indices.
    pub parts: Vec<Vec<usize>>,
}

impl ColourClass {
    /// Nodes of the class in the total order: parts in order, nodes within parts in order.
    pub fn ordered_nodes(&self) -> Vec<usize> {
        self.parts.iter().flatten().copied().collect()
    }

    pub fn part_of(&self, node: usize) -> Option<usize> {
        self.parts.iter().position(|p| p.contains(&node))
    }

    pub fn contains(&self, node: usize) -> bool {
        self.part_of(node).is_some()
    }

    pub fn edge_count(&self) -> usize {
        let sizes: Vec<usize> = self.parts.iter().map(Vec::len).collect();
        let mut total = 0;
        for j in 0..sizes.len() {
            for l in j + 1..sizes.len() {
                total += sizes[j] * sizes[l];
            }
        }
        total
    }
}

/// Core partition and leg chains of a supernova graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreInfo {
    /// Colour of the core, absent when the core has a single part (no core edges).
    pub colour: Option<Colour>,
    pub parts: Vec<Vec<usize>>,
    /// For each core node (in `core_nodes` order) the chain of leg nodes starting at the core node.
    pub legs: Vec<Vec<usize>>,
}

impl CoreInfo {
    pub fn core_nodes(&self) -> Vec<usize> {
        self.parts.iter().flatten().copied().collect()
    }

    pub fn part_of(&self, node: usize) -> Option<usize> {
        self.parts.iter().position(|p| p.contains(&node))
    }

    /// Index into `legs` of the leg containing `node`, and the position along it.
    pub fn leg_position(&self, node: usize) -> Option<(usize, usize)> {
        self.legs
            .iter()
            .enumerate()
            .find_map(|(l, chain)| chain.iter().position(|&v| v == node).map(|p| (l, p)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColouredQuiver {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    colours: Vec<ColourClass>,
    node_orders: Vec<Vec<Colour>>,
    core: Option<CoreInfo>,
}

impl ColouredQuiver {
    /// Builds a quiver from node names and colour classes.
    ///
    /// `node_orders` gives the cyclic colour order at each node; when absent the
    /// colours at a node are taken in increasing order.
    pub fn new(
        names: Vec<String>,
        colours: Vec<ColourClass>,
        node_orders: Option<Vec<Vec<Colour>>>,
    ) -> Result<Self> {
        let n = names.len();
        let mut index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::InvalidGraph("empty node name".into()));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate node '{name}'")));
            }
        }
        let mut seen_colours = BTreeSet::new();
        for class in &colours {
            let c = class.colour;
            if !seen_colours.insert(c) {
                return Err(Error::InvalidPartition {
                    colour: c,
                    reason: "colour declared twice".into(),
                });
            }
            if class.parts.len() < 2 {
                return Err(Error::InvalidPartition {
                    colour: c,
                    reason: "a colour class needs at least two parts to be connected".into(),
                });
            }
            let mut in_class = BTreeSet::new();
            for part in &class.parts {
                if part.is_empty() {
                    return Err(Error::InvalidPartition {
                        colour: c,
                        reason: "empty part".into(),
                    });
                }
                for &v in part {
                    if v >= n {
                        return Err(Error::InvalidPartition {
                            colour: c,
                            reason: format!("node index {v} out of range"),
                        });
                    }
                    if !in_class.insert(v) {
                        return Err(Error::InvalidPartition {
                            colour: c,
                            reason: format!("node '{}' appears twice", names[v]),
                        });
                    }
                }
            }
        }

        let mut edge_set: BTreeMap<(usize, usize), Colour> = BTreeMap::new();
        let mut edges = Vec::new();
        for class in &colours {
            for (j, pj) in class.parts.iter().enumerate() {
                for pl in &class.parts[j + 1..] {
                    for &u in pj {
                        for &v in pl {
                            let (a, b) = if u < v { (u, v) } else { (v, u) };
                            if let Some(prev) = edge_set.insert((a, b), class.colour) {
                                return Err(Error::InvalidGraph(format!(
                                    "nodes '{}' and '{}' joined by colours {prev} and {}; multiple edges are not supported",
                                    names[a], names[b], class.colour
                                )));
                            }
                            edges.push(Edge {
                                a,
                                b,
                                colour: class.colour,
                                multiplicity: 1,
                            });
                        }
                    }
                }
            }
        }
        edges.sort();

        let mut touching: Vec<Vec<Colour>> = vec![Vec::new(); n];
        for class in &colours {
            for v in class.ordered_nodes() {
                touching[v].push(class.colour);
            }
        }
        for t in &mut touching {
            t.sort();
        }
        let node_orders = match node_orders {
            None => touching,
            Some(orders) => {
                if orders.len() != n {
                    return Err(Error::InvalidGraph(format!(
                        "{} colour orders given for {n} nodes",
                        orders.len()
                    )));
                }
                for (v, order) in orders.iter().enumerate() {
                    let mut sorted = order.clone();
                    sorted.sort();
                    if sorted != touching[v] {
                        return Err(Error::InvalidGraph(format!(
                            "colour order at '{}' must be a permutation of {:?}",
                            names[v], touching[v]
                        )));
                    }
                }
                orders
            }
        };

        Ok(ColouredQuiver {
            names,
            index,
            edges,
            colours,
            node_orders,
            core: None,
        })
    }

    /// Builds the quiver and checks that the supplied edge list is exactly the derived one.
    pub fn with_edges(
        names: Vec<String>,
        edges: &[Edge],
        colours: Vec<ColourClass>,
        node_orders: Option<Vec<Vec<Colour>>>,
    ) -> Result<Self> {
        if let Some(e) = edges.iter().find(|e| e.multiplicity != 1) {
            return Err(Error::InvalidGraph(format!(
                "edge {}-{} has multiplicity {}; only simple edges are supported",
                e.a, e.b, e.multiplicity
            )));
        }
        let q = Self::new(names, colours, node_orders)?;
        let mut given: Vec<Edge> = edges
            .iter()
            .map(|e| Edge {
                a: e.a.min(e.b),
                b: e.a.max(e.b),
                ..*e
            })
            .collect();
        given.sort();
        if given != q.edges {
            return Err(Error::InvalidPartition {
                colour: given
                    .iter()
                    .chain(q.edges.iter())
                    .find(|e| !given.contains(e) || !q.edges.contains(e))
                    .map(|e| e.colour)
                    .unwrap_or(0),
                reason: "edges are not the complete multipartite graph of the partition".into(),
            });
        }
        Ok(q)
    }

    pub(crate) fn set_core(&mut self, core: CoreInfo) {
        self.core = Some(core);
    }

    pub fn num_nodes(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn colours(&self) -> &[ColourClass] {
        &self.colours
    }

    pub fn colour_class(&self, c: Colour) -> Option<&ColourClass> {
        self.colours.iter().find(|k| k.colour == c)
    }

    pub fn node_colour_order(&self, i: usize) -> &[Colour] {
        &self.node_orders[i]
    }

    pub fn core(&self) -> Option<&CoreInfo> {
        self.core.as_ref()
    }

    /// Number of edges between `i` and `j` (0 or 1).
    pub fn edge_count_between(&self, i: usize, j: usize) -> i64 {
        let (a, b) = (i.min(j), i.max(j));
        self.edges.iter().filter(|e| e.a == a && e.b == b).count() as i64
    }

    pub fn edge_colour(&self, i: usize, j: usize) -> Option<Colour> {
        let (a, b) = (i.min(j), i.max(j));
        self.edges.iter().find(|e| e.a == a && e.b == b).map(|e| e.colour)
    }

    /// Symmetric adjacency matrix as nested vectors.
    pub fn adjacency(&self) -> Vec<Vec<i64>> {
        let n = self.num_nodes();
        let mut adj = vec![vec![0i64; n]; n];
        for e in &self.edges {
            adj[e.a][e.b] += e.multiplicity as i64;
            adj[e.b][e.a] += e.multiplicity as i64;
        }
        adj
    }

    pub fn neighbours(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|e| {
                if e.a == i {
                    Some(e.b)
                } else if e.b == i {
                    Some(e.a)
                } else {
                    None
                }
            })
            .collect();
        out.sort();
        out
    }

    /// Oriented edges `(head, tail)`; each undirected edge gives two.
    pub fn oriented_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(2 * self.edges.len());
        for e in &self.edges {
            out.push((e.a, e.b));
            out.push((e.b, e.a));
        }
        out
    }

    /// True when the nodes in `support` induce a connected subgraph.
    pub fn is_connected_on(&self, support: &[usize]) -> bool {
        if support.is_empty() {
            return false;
        }
        let set: BTreeSet<usize> = support.iter().copied().collect();
        let mut seen = BTreeSet::new();
        let mut stack = vec![support[0]];
        while let Some(v) = stack.pop() {
            if !seen.insert(v) {
                continue;
            }
            for w in self.neighbours(v) {
                if set.contains(&w) && !seen.contains(&w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == set.len()
    }

    /// Single-coloured complete multipartite graph on freshly named nodes.
    pub fn complete_multipartite(part_sizes: &[usize]) -> Result<Self> {
        let mut names = Vec::new();
        let mut parts = Vec::new();
        for (j, &s) in part_sizes.iter().enumerate() {
            let mut part = Vec::new();
            for i in 0..s {
                part.push(names.len());
                names.push(format!("n{}_{}", j + 1, i + 1));
            }
            parts.push(part);
        }
        if parts.len() < 2 {
            let mut q = Self::new(names, Vec::new(), None)?;
            q.set_core(CoreInfo {
                colour: None,
                legs: parts.iter().flatten().map(|&v| vec![v]).collect(),
                parts,
            });
            return Ok(q);
        }
        let mut q = Self::new(names, vec![ColourClass { colour: 0, parts: parts.clone() }], None)?;
        q.set_core(CoreInfo {
            colour: Some(0),
            legs: parts.iter().flatten().map(|&v| vec![v]).collect(),
            parts,
        });
        Ok(q)
    }

    /// Classical simply-laced graph: every edge gets its own colour with parts `[[a],[b]]`.
    pub fn from_simple_edges(names: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let colours = edges
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| ColourClass {
                colour: k as Colour,
                parts: vec![vec![a], vec![b]],
            })
            .collect();
        Self::new(names, colours, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("v{i}")).collect()
    }

    #[test]
    fn complete_multipartite_edge_count() {
        let q = ColouredQuiver::complete_multipartite(&[2, 1, 3]).unwrap();
        assert_eq!(q.edges().len(), 2 + 6 + 3);
        assert_eq!(q.colours()[0].edge_count(), 11);
    }

    #[test]
    fn single_part_is_isolated_nodes() {
        let q = ColouredQuiver::complete_multipartite(&[3]).unwrap();
        assert_eq!(q.num_nodes(), 3);
        assert!(q.edges().is_empty());
        assert_eq!(q.core().unwrap().parts.len(), 1);
    }

    #[test]
    fn rejects_node_in_two_parts() {
        let err = ColouredQuiver::new(
            names(2),
            vec![ColourClass { colour: 0, parts: vec![vec![0], vec![0, 1]] }],
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidPartition { colour: 0, .. }));
    }

    #[test]
    fn rejects_double_edge() {
        let err = ColouredQuiver::new(
            names(2),
            vec![
                ColourClass { colour: 0, parts: vec![vec![0], vec![1]] },
                ColourClass { colour: 1, parts: vec![vec![0], vec![1]] },
            ],
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidGraph(_)));
    }

    #[test]
    fn with_edges_checks_completeness() {
        let classes = vec![ColourClass { colour: 0, parts: vec![vec![0], vec![1], vec![2]] }];
        let missing = [Edge { a: 0, b: 1, colour: 0, multiplicity: 1 }];
        assert!(ColouredQuiver::with_edges(names(3), &missing, classes.clone(), None).is_err());
        let all = [
            Edge { a: 0, b: 1, colour: 0, multiplicity: 1 },
            Edge { a: 2, b: 0, colour: 0, multiplicity: 1 },
            Edge { a: 1, b: 2, colour: 0, multiplicity: 1 },
        ];
        assert!(ColouredQuiver::with_edges(names(3), &all, classes.clone(), None).is_ok());
        let doubled = [Edge { a: 0, b: 1, colour: 0, multiplicity: 2 }];
        assert!(ColouredQuiver::with_edges(names(3), &doubled, classes, None).is_err());
    }

    #[test]
    fn colour_order_must_be_permutation() {
        let classes = vec![
            ColourClass { colour: 0, parts: vec![vec![0], vec![1]] },
            ColourClass { colour: 1, parts: vec![vec![1], vec![2]] },
        ];
        let ok = ColouredQuiver::new(names(3), classes.clone(), Some(vec![vec![0], vec![1, 0], vec![1]]));
        assert_eq!(ok.unwrap().node_colour_order(1), &[1, 0]);
        let bad = ColouredQuiver::new(names(3), classes, Some(vec![vec![0], vec![1], vec![1]]));
        assert!(bad.is_err());
    }
}
