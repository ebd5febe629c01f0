//! Signed Seifert graphs, their blocks and diagram classification.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::braid::{locally_twisted_check, Sign, TwistMode};
use crate::planar::{Diagram, State};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SignedEdge {
    pub crossing: usize,
    pub u: usize,
    pub v: usize,
    pub sign: Sign,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeifertGraph {
    pub vertex_count: usize,
    pub edges: Vec<SignedEdge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub vertices: Vec<usize>,
    /// Indices into the graph's edge list.
    pub edges: Vec<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DiagramClass {
    pub homogeneous: bool,
    pub positive: bool,
    pub negative: bool,
    pub alternating: bool,
    pub locally_twisted: bool,
    pub lth: bool,
}

pub fn seifert_graph(d: &Diagram) -> SeifertGraph {
    let edges = (0..d.crossing_count())
        .map(|g| {
            let (u, v) = d.crossing_circles(g);
            SignedEdge { crossing: g, u, v, sign: d.sign(g) }
        })
        .collect();
    SeifertGraph { vertex_count: d.seifert_circle_count(), edges }
}

impl SeifertGraph {
    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![vec![]; self.vertex_count];
        for (k, e) in self.edges.iter().enumerate() {
            adj[e.u].push((e.v, k));
            adj[e.v].push((e.u, k));
        }
        adj
    }

    pub fn is_bipartite(&self) -> bool {
        let adj = self.adjacency();
        let mut colour = vec![None; self.vertex_count];
        for s in 0..self.vertex_count {
            if colour[s].is_some() {
                continue;
            }
            colour[s] = Some(false);
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                let cx = colour[x].unwrap();
                for &(y, _) in &adj[x] {
                    match colour[y] {
                        None => {
                            colour[y] = Some(!cx);
                            stack.push(y);
                        }
                        Some(cy) if cy == cx => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }

    /// Biconnected components; bridges are two-vertex blocks and isolated
    /// vertices are edgeless blocks.
    pub fn blocks(&self) -> Vec<Block> {
        let n = self.vertex_count;
        let adj = self.adjacency();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut time = 0;
        let mut edge_stack: Vec<usize> = vec![];
        let mut blocks = vec![];
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            if adj[root].is_empty() {
                disc[root] = time;
                time += 1;
                blocks.push(Block { vertices: vec![root], edges: vec![] });
                continue;
            }
            disc[root] = time;
            low[root] = time;
            time += 1;
            // frames: (vertex, edge used to enter, next adjacency index)
            let mut frames = vec![(root, usize::MAX, 0usize)];
            while let Some(&mut (x, via, ref mut next)) = frames.last_mut() {
                if *next < adj[x].len() {
                    let (y, k) = adj[x][*next];
                    *next += 1;
                    if k == via {
                        continue;
                    }
                    if disc[y] == usize::MAX {
                        edge_stack.push(k);
                        disc[y] = time;
                        low[y] = time;
                        time += 1;
                        frames.push((y, k, 0));
                    } else if disc[y] < disc[x] {
                        edge_stack.push(k);
                        low[x] = low[x].min(disc[y]);
                    }
                } else {
                    frames.pop();
                    if let Some(&(p, _, _)) = frames.last() {
                        low[p] = low[p].min(low[x]);
                        if low[x] >= disc[p] {
                            let mut edges = vec![];
                            while let Some(k) = edge_stack.pop() {
                                edges.push(k);
                                if k == via {
                                    break;
                                }
                            }
                            edges.sort_unstable();
                            let vertices: BTreeSet<usize> =
                                edges.iter().flat_map(|&k| [self.edges[k].u, self.edges[k].v]).collect();
                            blocks.push(Block { vertices: vertices.into_iter().collect(), edges });
                        }
                    }
                }
            }
        }
        blocks
    }

    pub fn block_is_homogeneous(&self, b: &Block) -> bool {
        b.edges.windows(2).all(|w| self.edges[w[0]].sign == self.edges[w[1]].sign)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.blocks().iter().all(|b| self.block_is_homogeneous(b))
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph seifert {\n");
        for v in 0..self.vertex_count {
            let _ = writeln!(s, "  c{v};");
        }
        for e in &self.edges {
            let (label, style) = match e.sign {
                Sign::Pos => ("+", "solid"),
                Sign::Neg => ("-", "dashed"),
            };
            let _ = writeln!(s, "  c{} -- c{} [label=\"{}\", style={}, crossing={}];", e.u, e.v, label, style, e.crossing);
        }
        s.push_str("}\n");
        s
    }
}

/// Over and under alternate along every component.
pub fn is_alternating(d: &Diagram) -> bool {
    let state = State::identity(d.crossing_count());
    let comps = d.components();
    (0..comps.count).all(|k| {
        let start = comps.of_segment.iter().position(|&c| c == k).expect("component has a segment");
        let visits = d.walk(&state, start).visits;
        let n = visits.len();
        (0..n).all(|i| visits[i].over != visits[(i + 1) % n].over || n == 0)
    })
}

/// Local twisting uses the diagram's own template and placement as witness.
pub fn is_locally_twisted(d: &Diagram) -> bool {
    d.template().is_knitted() && d.words().iter().all(|w| locally_twisted_check(w, TwistMode::Both).holds)
}

pub fn classify(d: &Diagram) -> DiagramClass {
    let g = seifert_graph(d);
    let homogeneous = g.is_homogeneous();
    let positive = g.edges.iter().all(|e| e.sign == Sign::Pos);
    let negative = g.edges.iter().all(|e| e.sign == Sign::Neg);
    let locally_twisted = is_locally_twisted(d);
    DiagramClass {
        homogeneous,
        positive,
        negative,
        alternating: is_alternating(d),
        locally_twisted,
        lth: homogeneous && locally_twisted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, es: &[(usize, usize, i32)]) -> SeifertGraph {
        SeifertGraph {
            vertex_count: n,
            edges: es.iter().enumerate().map(|(k, &(u, v, s))| SignedEdge { crossing: k, u, v, sign: Sign::of(s) }).collect(),
        }
    }

    #[test]
    fn graph_of_closures() {
        let g = seifert_graph(&Diagram::parse_braid("1 1 1").unwrap());
        assert_eq!(g.vertex_count, 2);
        assert_eq!(g.edges.len(), 3);
        assert!(g.edges.iter().all(|e| e.sign == Sign::Pos && (e.u, e.v) == (0, 1)));
        let g = seifert_graph(&Diagram::parse_braid("").unwrap());
        assert_eq!((g.vertex_count, g.edges.len()), (1, 0));
        let g = seifert_graph(&Diagram::parse_braid("1 -2").unwrap());
        assert_eq!(g.vertex_count, 3);
        assert_eq!(g.edges.iter().map(|e| (e.u, e.v, e.sign)).collect::<Vec<_>>(), vec![(0, 1, Sign::Pos), (1, 2, Sign::Neg)]);
        assert_eq!(g.blocks().len(), 2);
    }

    #[test]
    fn block_counts() {
        assert_eq!(graph(2, &[(0, 1, 1), (0, 1, 1), (0, 1, 1)]).blocks().len(), 1);
        let b = graph(3, &[(0, 1, 1), (1, 2, 1)]).blocks();
        assert_eq!(b.len(), 2);
        assert!(b.iter().all(|b| b.vertices.contains(&1)));
        // theta on {0, 1} with a pendant edge 1 - 2
        let g = graph(3, &[(0, 1, 1), (0, 1, -1), (0, 1, 1), (1, 2, -1)]);
        assert_eq!(g.blocks().len(), 2);
        assert!(!g.is_homogeneous());
        // a square is one block
        let g = graph(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]);
        assert_eq!(g.blocks().len(), 1);
    }

    #[test]
    fn classification() {
        let c = classify(&Diagram::parse_braid("1 1 1").unwrap());
        assert!(c.positive && c.homogeneous && c.alternating && c.lth);
        let c = classify(&Diagram::parse_braid("-1 2 -1").unwrap());
        assert!(c.homogeneous && !c.locally_twisted && !c.lth);
        let c = classify(&Diagram::parse_braid("1 -2 1 -2").unwrap());
        assert!(c.homogeneous && c.alternating && !c.positive);
        let c = classify(&Diagram::parse_braid("1 1 2 -1 2").unwrap());
        assert!(!c.homogeneous);
        assert!(!classify(&Diagram::parse_braid("1 1 2 2").unwrap()).alternating);
    }

    #[test]
    fn dot_lists_signed_edges() {
        let s = seifert_graph(&Diagram::parse_braid("1 -2").unwrap()).to_dot();
        assert!(s.contains("c0 -- c1 [label=\"+\""));
        assert!(s.contains("c1 -- c2 [label=\"-\""));
    }
}
