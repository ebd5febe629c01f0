//! Resolution trees for the skein polynomial `a P₊ − a⁻¹ P₋ = z P₀`.
//!
//! A tree is grown in phases. Each phase fixes a base point on an unvisited
//! component and travels from it; a crossing first met on the wrong strand
//! for the phase's mode is branched on (flip or smooth) and both children
//! keep travelling from that crossing. Nodes are states over the root
//! diagram, so base points stay valid in every descendant.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::braid::Sign;
use crate::error::{Error, Result};
use crate::planar::{Cross, Diagram, Monotone, State};
use crate::poly::Laurent2;

/// `((a − a⁻¹) z⁻¹)^(n−1)`.
pub fn unlink_poly(n: usize) -> Result<Laurent2> {
    if n == 0 {
        return Err(Error::InvalidInput("an unlink has at least one component".into()));
    }
    Ok(unlink_factor().pow(n as u32 - 1))
}

fn unlink_factor() -> Laurent2 {
    Laurent2::from_terms([(1, -1, 1), (-1, -1, -1)])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Descending,
    XCoherent,
    YCoherent,
}

impl Strategy {
    pub fn mode_for(self, clockwise: bool) -> Monotone {
        let descending = match self {
            Strategy::Descending => true,
            Strategy::XCoherent => clockwise,
            Strategy::YCoherent => !clockwise,
        };
        if descending {
            Monotone::Descending
        } else {
            Monotone::Ascending
        }
    }
}

/// How a base point is picked among the unvisited segments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chooser {
    First,
    Seeded(u64),
}

/// Picks the base point and travel mode of each new phase.
pub trait Planner {
    /// `done` holds earlier base points of this branch; `unvisited` lists the
    /// segments not yet travelled, in increasing order.
    fn plan(&mut self, d: &Diagram, state: &State, done: &[usize], unvisited: &[usize]) -> Result<(usize, Monotone)>;
}

pub struct CoherentPlanner {
    strategy: Strategy,
    rng: Option<ChaCha8Rng>,
}

impl CoherentPlanner {
    pub fn new(strategy: Strategy, chooser: Chooser) -> CoherentPlanner {
        let rng = match chooser {
            Chooser::First => None,
            Chooser::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        };
        CoherentPlanner { strategy, rng }
    }
}

impl Planner for CoherentPlanner {
    fn plan(&mut self, d: &Diagram, _: &State, _: &[usize], unvisited: &[usize]) -> Result<(usize, Monotone)> {
        let x = match &mut self.rng {
            None => unvisited[0],
            Some(rng) => *unvisited.choose(rng).expect("planner called with unvisited segments"),
        };
        let circle = d.segment(x).0;
        Ok((x, self.strategy.mode_for(d.geometry().is_clockwise(circle))))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Phase {
    pub base_point: usize,
    pub mode: Monotone,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leaf {
    pub state: State,
    pub phases: Vec<Phase>,
    /// Smoothed crossings, and how many of them were negative or positive.
    pub t: usize,
    pub t_minus: usize,
    pub t_plus: usize,
    pub writhe: i64,
    pub components: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Branch {
    pub crossing: usize,
    /// Sign of the crossing in the parent.
    pub sign: Sign,
    pub phase: usize,
    pub flip: usize,
    pub smooth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Leaf(Leaf),
    Branch(Branch),
}

/// Node 0 is the root.
#[derive(Clone, Debug)]
pub struct ResolutionTree {
    pub root: Diagram,
    pub nodes: Vec<Node>,
}

impl ResolutionTree {
    pub fn leaves(&self) -> impl Iterator<Item = &Leaf> {
        self.nodes.iter().filter_map(|n| match n {
            Node::Leaf(l) => Some(l),
            Node::Branch(_) => None,
        })
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().count()
    }

    pub fn depth(&self) -> usize {
        fn go(t: &ResolutionTree, i: usize) -> usize {
            match &t.nodes[i] {
                Node::Leaf(_) => 0,
                Node::Branch(b) => 1 + go(t, b.flip).max(go(t, b.smooth)),
            }
        }
        go(self, 0)
    }

    /// Nodes `n0, n1, …` in storage order; leaves show `γ`, `ω` and `t`.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph tree {\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = match n {
                Node::Leaf(l) => writeln!(
                    s,
                    "  n{i} [shape=box, label=\"γ={} ω={} t={}\"];",
                    l.components, l.writhe, l.t
                ),
                Node::Branch(b) => writeln!(s, "  n{i} [label=\"c{} {}\"];", b.crossing, b.sign),
            };
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if let Node::Branch(b) = n {
                let _ = writeln!(s, "  n{i} -> n{} [label=\"flip\"];", b.flip);
                let _ = writeln!(s, "  n{i} -> n{} [label=\"smooth\", style=dashed];", b.smooth);
            }
        }
        s.push_str("}\n");
        s
    }

    /// `(−1)^{t⁻} z^t a^{ω(U)−ω(D)} ((a − a⁻¹) z⁻¹)^{γ(U)−1}`.
    pub fn leaf_term(&self, leaf: &Leaf) -> Laurent2 {
        leaf_term(leaf, self.root.writhe())
    }
}

fn leaf_term(leaf: &Leaf, root_writhe: i64) -> Laurent2 {
    if leaf.components == 0 {
        return Laurent2::one();
    }
    let c = if leaf.t_minus % 2 == 0 { 1 } else { -1 };
    let m = Laurent2::monomial(c, (leaf.writhe - root_writhe) as i32, leaf.t as i32);
    &m * &unlink_factor().pow(leaf.components as u32 - 1)
}

pub fn evaluate_tree(tree: &ResolutionTree) -> Laurent2 {
    let mut groups: HashMap<(usize, bool, i64, usize), i64> = HashMap::new();
    for l in tree.leaves() {
        *groups.entry((l.t, l.t_minus % 2 == 1, l.writhe, l.components)).or_default() += 1;
    }
    let w = tree.root.writhe();
    let mut total = Laurent2::zero();
    for ((t, odd, writhe, components), count) in groups {
        let leaf = Leaf {
            state: State::identity(0),
            phases: vec![],
            t,
            t_minus: odd as usize,
            t_plus: 0,
            writhe,
            components,
        };
        total += &(&Laurent2::monomial(count, 0, 0) * &leaf_term(&leaf, w));
    }
    total
}

/// Same sum, as products of branch weights along root-to-leaf paths.
pub fn evaluate_by_weights(tree: &ResolutionTree) -> Laurent2 {
    fn go(tree: &ResolutionTree, i: usize) -> Laurent2 {
        match &tree.nodes[i] {
            Node::Leaf(l) if l.components == 0 => Laurent2::one(),
            Node::Leaf(l) => unlink_factor().pow(l.components as u32 - 1),
            Node::Branch(b) => {
                let (flip, smooth) = branch_weights(b.sign);
                &(&flip * &go(tree, b.flip)) + &(&smooth * &go(tree, b.smooth))
            }
        }
    }
    go(tree, 0)
}

/// Weights of the flip and smooth children of a crossing with sign `s`.
pub fn branch_weights(s: Sign) -> (Laurent2, Laurent2) {
    match s {
        Sign::Pos => (Laurent2::monomial(1, -2, 0), Laurent2::monomial(1, -1, 1)),
        Sign::Neg => (Laurent2::monomial(1, 2, 0), Laurent2::monomial(-1, 1, 1)),
    }
}

#[derive(Clone, Copy, Debug)]
enum Pos {
    Seg(usize),
    Box { arc: usize, k: usize, p: usize },
}

#[derive(Clone)]
struct Frame {
    state: State,
    seen: Vec<bool>,
    visited: Vec<bool>,
    phases: Vec<Phase>,
    pos: Option<Pos>,
    t: usize,
    t_minus: usize,
    t_plus: usize,
}

enum Stop {
    Closed,
    Crossing { g: usize, arc: usize, k: usize, p: usize },
}

struct Grower<'a, P: Planner> {
    d: &'a Diagram,
    planner: &'a mut P,
    nodes: Vec<Node>,
}

impl<P: Planner> Grower<'_, P> {
    fn travel(&self, f: &mut Frame) -> Stop {
        let d = self.d;
        let t = d.template();
        let phase = *f.phases.last().expect("travel inside a phase");
        let start = phase.base_point;
        let want_over = phase.mode == Monotone::Descending;
        let mut pos = f.pos.take().expect("travel has a position");
        loop {
            match pos {
                Pos::Seg(seg) => {
                    f.visited[seg] = true;
                    let (c, s) = d.segment(seg);
                    let Some(v) = t.segment_end(c, s) else {
                        return Stop::Closed;
                    };
                    pos = Pos::Box { arc: t.incidences()[v].arc, k: 0, p: t.arc_position(v) };
                }
                Pos::Box { arc, k, p } => {
                    let word = &d.words()[arc];
                    if k == word.len() {
                        let exit = t.incidence_at(arc, p);
                        let seg = d.segment_id(t.incidences()[exit].circle, t.segment_after(exit));
                        if seg == start {
                            return Stop::Closed;
                        }
                        pos = Pos::Seg(seg);
                        continue;
                    }
                    let g = d.arc_offset(arc) + k;
                    let i = word.letters()[k].index();
                    let Some(sign) = d.effective_sign(g, &f.state) else {
                        pos = Pos::Box { arc, k: k + 1, p };
                        continue;
                    };
                    if p != i && p != i + 1 {
                        pos = Pos::Box { arc, k: k + 1, p };
                        continue;
                    }
                    let lo = p == i;
                    let over = lo != ((sign == Sign::Pos) == t.co_orient(arc));
                    if !f.seen[g] && over != want_over {
                        return Stop::Crossing { g, arc, k, p };
                    }
                    f.seen[g] = true;
                    pos = Pos::Box { arc, k: k + 1, p: if lo { i + 1 } else { i } };
                }
            }
        }
    }

    fn grow(&mut self, mut f: Frame) -> Result<usize> {
        loop {
            if f.pos.is_none() {
                let unvisited: Vec<usize> = (0..f.visited.len()).filter(|&s| !f.visited[s]).collect();
                if unvisited.is_empty() {
                    let leaf = Leaf {
                        writhe: self.d.state_writhe(&f.state),
                        components: f.phases.len(),
                        state: f.state,
                        phases: f.phases,
                        t: f.t,
                        t_minus: f.t_minus,
                        t_plus: f.t_plus,
                    };
                    self.nodes.push(Node::Leaf(leaf));
                    return Ok(self.nodes.len() - 1);
                }
                let done: Vec<usize> = f.phases.iter().map(|p| p.base_point).collect();
                let (x, mode) = self.planner.plan(self.d, &f.state, &done, &unvisited)?;
                if f.visited.get(x) != Some(&false) {
                    return Err(Error::Invariant(format!("planner chose visited segment {x}")));
                }
                f.phases.push(Phase { base_point: x, mode });
                f.pos = Some(Pos::Seg(x));
            }
            match self.travel(&mut f) {
                Stop::Closed => f.pos = None,
                Stop::Crossing { g, arc, k, p } => {
                    let sign = self.d.effective_sign(g, &f.state).expect("terminal crossing is present");
                    let i = self.d.letter(g).index();
                    let at = self.nodes.len();
                    self.nodes.push(Node::Leaf(Leaf {
                        state: State::identity(0),
                        phases: vec![],
                        t: 0,
                        t_minus: 0,
                        t_plus: 0,
                        writhe: 0,
                        components: 0,
                    }));
                    let mut flip = f.clone();
                    let mark = if f.state.get(g) == Cross::Keep { Cross::Flip } else { Cross::Keep };
                    flip.state.set(g, mark);
                    flip.seen[g] = true;
                    flip.pos = Some(Pos::Box { arc, k: k + 1, p: if p == i { i + 1 } else { i } });
                    let mut smooth = f;
                    smooth.state.set(g, Cross::Smooth);
                    smooth.pos = Some(Pos::Box { arc, k: k + 1, p });
                    smooth.t += 1;
                    match sign {
                        Sign::Neg => smooth.t_minus += 1,
                        Sign::Pos => smooth.t_plus += 1,
                    }
                    let phase = smooth.phases.len() - 1;
                    let flip = self.grow(flip)?;
                    let smooth = self.grow(smooth)?;
                    self.nodes[at] = Node::Branch(Branch { crossing: g, sign, phase, flip, smooth });
                    return Ok(at);
                }
            }
        }
    }
}

pub fn build_tree_with<P: Planner>(d: &Diagram, planner: &mut P) -> Result<ResolutionTree> {
    let frame = Frame {
        state: State::identity(d.crossing_count()),
        seen: vec![false; d.crossing_count()],
        visited: vec![false; d.segment_count()],
        phases: vec![],
        pos: None,
        t: 0,
        t_minus: 0,
        t_plus: 0,
    };
    let mut grower = Grower { d, planner, nodes: vec![] };
    grower.grow(frame)?;
    Ok(ResolutionTree { root: d.clone(), nodes: grower.nodes })
}

pub fn build_tree(d: &Diagram, strategy: Strategy, chooser: Chooser) -> ResolutionTree {
    build_tree_with(d, &mut CoherentPlanner::new(strategy, chooser)).expect("coherent planning cannot fail")
}

fn cache() -> &'static Mutex<HashMap<String, Laurent2>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Laurent2>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

const CACHE_LIMIT: usize = 1 << 16;

/// Skein polynomial from a descending tree, memoized by canonical hash.
pub fn homfly(d: &Diagram) -> Laurent2 {
    let key = d.canonical_hash();
    if let Some(p) = cache().lock().expect("cache lock").get(&key) {
        return p.clone();
    }
    let p = homfly_uncached(d, Strategy::Descending, Chooser::First);
    let mut c = cache().lock().expect("cache lock");
    if c.len() >= CACHE_LIMIT {
        c.clear();
    }
    c.insert(key, p.clone());
    p
}

pub fn homfly_uncached(d: &Diagram, strategy: Strategy, chooser: Chooser) -> Laurent2 {
    evaluate_tree(&build_tree(d, strategy, chooser))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Diagram {
        Diagram::parse_braid(s).unwrap()
    }

    fn trefoil() -> Laurent2 {
        Laurent2::from_terms([(-4, 0, -1), (-2, 0, 2), (-2, 2, 1)])
    }

    fn hopf() -> Laurent2 {
        Laurent2::from_terms([(-1, -1, 1), (-3, -1, -1), (-1, 1, 1)])
    }

    #[test]
    fn unlinks() {
        assert_eq!(unlink_poly(1).unwrap(), Laurent2::one());
        assert_eq!(unlink_poly(2).unwrap().to_string(), "-1 a^-1 z^-1 + 1 a^1 z^-1");
        assert_eq!(unlink_poly(3).unwrap(), &unlink_poly(2).unwrap() * &unlink_poly(2).unwrap());
        assert!(unlink_poly(0).is_err());
    }

    #[test]
    fn small_values() {
        assert_eq!(homfly(&d("")), Laurent2::one());
        assert_eq!(homfly(&d("1 1")), hopf());
        assert_eq!(homfly(&d("1 1 1")), trefoil());
        assert_eq!(homfly(&d("-1 -1 -1")), trefoil().mirror());
        assert_eq!(homfly(&Diagram::from_braid(&crate::BraidWord::parse_with_strands("", Some(2)).unwrap())), unlink_poly(2).unwrap());
        assert_eq!(homfly(&d("1 -1")), unlink_poly(2).unwrap());
        assert_eq!(homfly(&d("1")), Laurent2::one());
    }

    #[test]
    fn strategies_agree() {
        for w in ["1 1 1", "-1 2 -1", "1 -2 1 -2", "1 1 2 -1 2", "1 2 1 2 1 2", "-1 -1 2 2 -1 3 -3"] {
            let dg = d(w);
            let p = homfly(&dg);
            for s in [Strategy::Descending, Strategy::XCoherent, Strategy::YCoherent] {
                for c in [Chooser::First, Chooser::Seeded(1), Chooser::Seeded(9)] {
                    let tree = build_tree(&dg, s, c);
                    assert_eq!(evaluate_tree(&tree), p, "{w} {s:?} {c:?}");
                    assert_eq!(evaluate_by_weights(&tree), p, "{w} {s:?} {c:?}");
                    assert!(tree.leaf_count() <= 1 << dg.crossing_count());
                }
            }
        }
    }

    #[test]
    fn figure_eight_tree_shape() {
        let tree = build_tree(&d("-1 2 -1"), Strategy::Descending, Chooser::First);
        assert!(matches!(tree.nodes[0], Node::Branch(_)));
        assert!(tree.leaves().all(|l| l.phases.iter().all(|p| p.mode == Monotone::Descending)));
        let tree = build_tree(&d("1 1 1"), Strategy::Descending, Chooser::First);
        assert!(tree.leaf_count() >= 2);
    }
}
