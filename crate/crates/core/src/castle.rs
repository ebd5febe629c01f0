//! Castles, traps, appropriate pairs and special coherent resolution trees.
//!
//! Every Seifert circle is read as a cyclic list of events: the template
//! segments it runs along and the crossings it meets inside braid boxes.
//! Floors are cyclic intervals of these lists. Trap disks are decided on the
//! Seifert map, whose vertices are crossing attachments, whose edges are
//! circle pieces between attachments plus one ladder per crossing.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;

use crate::braid::BraidWord;
use crate::error::{Error, Result};
use crate::induce::induce_diagram;
use crate::map::PlanarMap;
use crate::planar::{Diagram, Monotone, State};
use crate::skein::{build_tree_with, Planner, ResolutionTree, Strategy};
use crate::template::{ArcDef, Circle, FaceRef, Incidence, IncidenceKind, Placement, Side, Template};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Event {
    Seg(usize),
    Cross(usize),
}

/// Events of every circle in travel order, starting at segment 0.
#[derive(Clone, Debug)]
pub struct CircleEvents {
    pub events: Vec<Vec<Event>>,
    pos: HashMap<(usize, Event), usize>,
}

impl CircleEvents {
    pub fn new(d: &Diagram) -> CircleEvents {
        let t = d.template();
        let mut events = vec![];
        let mut pos = HashMap::new();
        for c in 0..t.circle_count() {
            let mut ev = vec![];
            for s in 0..t.segment_count(c) {
                ev.push(Event::Seg(d.segment_id(c, s)));
                if let Some(v) = t.segment_end(c, s) {
                    let a = t.incidences()[v].arc;
                    let p = t.arc_position(v);
                    let base = d.arc_offset(a);
                    for (k, l) in d.words()[a].letters().iter().enumerate() {
                        if l.index() == p || l.index() + 1 == p {
                            ev.push(Event::Cross(base + k));
                        }
                    }
                }
            }
            for (k, &e) in ev.iter().enumerate() {
                pos.insert((c, e), k);
            }
            events.push(ev);
        }
        CircleEvents { events, pos }
    }

    pub fn position(&self, c: usize, e: Event) -> Option<usize> {
        self.pos.get(&(c, e)).copied()
    }

    fn len(&self, c: usize) -> usize {
        self.events[c].len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Floor {
    pub circle: usize,
    pub level: usize,
    pub parent: Option<usize>,
    /// Cyclic interval of the circle's events.
    pub start: usize,
    pub len: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Castle {
    pub root: usize,
    pub base_point: usize,
    pub floors: Vec<Floor>,
    /// Crossings joining two floors, inside both.
    pub ladders: Vec<usize>,
    #[serde(skip)]
    events: CircleEvents,
    #[serde(skip)]
    floor_of: HashMap<usize, usize>,
    #[serde(skip)]
    joins: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Trap {
    pub f1: usize,
    pub f2: usize,
    pub s1: usize,
    pub s2: usize,
    /// A floor inside the trap disk.
    pub inside: usize,
}

impl Castle {
    /// Offset of event `e` inside floor `f`, if it lies there.
    pub fn offset_in(&self, f: usize, e: Event) -> Option<usize> {
        let fl = &self.floors[f];
        let p = self.events.position(fl.circle, e)?;
        let m = self.events.len(fl.circle);
        let off = (p + m - fl.start) % m;
        (off < fl.len).then_some(off)
    }

    pub fn floor_events(&self, f: usize) -> Vec<Event> {
        let fl = &self.floors[f];
        let ev = &self.events.events[fl.circle];
        (0..fl.len).map(|k| ev[(fl.start + k) % ev.len()]).collect()
    }

    pub fn floor_on(&self, circle: usize) -> Option<usize> {
        self.floor_of.get(&circle).copied()
    }

    /// Floors joined by a ladder, lower floor index first.
    pub fn ladder_floors(&self, g: usize) -> (usize, usize) {
        let (u, v) = self.joins[g];
        let (a, b) = (self.floor_of[&u], self.floor_of[&v]);
        (a.min(b), a.max(b))
    }

    /// Unique level-0 floor, at most one floor per circle, the merged ladder
    /// graph is a tree and levels are distances from the root.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let zeros = self.floors.iter().filter(|f| f.level == 0).count();
        if zeros != 1 {
            return Err(format!("{zeros} floors of level 0"));
        }
        if self.floor_of.len() != self.floors.len() {
            return Err("a circle carries two floors".into());
        }
        let n = self.floors.len();
        let mut adj: BTreeMap<usize, std::collections::BTreeSet<usize>> = BTreeMap::new();
        for &g in &self.ladders {
            let (a, b) = self.ladder_floors(g);
            adj.entry(a).or_default().insert(b);
            adj.entry(b).or_default().insert(a);
        }
        let merged: usize = adj.values().map(|s| s.len()).sum::<usize>() / 2;
        if merged + 1 != n {
            return Err(format!("merged ladder graph has {merged} edges on {n} floors"));
        }
        let root = self.floors.iter().position(|f| f.level == 0).expect("checked above");
        let mut dist = vec![usize::MAX; n];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &y in adj.get(&x).into_iter().flatten() {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        for (f, fl) in self.floors.iter().enumerate() {
            if dist[f] != fl.level {
                return Err(format!("floor {f} has level {} at distance {}", fl.level, dist[f]));
            }
        }
        Ok(())
    }

    pub fn to_dot(&self, traps: &[Trap]) -> String {
        let mut s = String::from("graph castle {\n  rankdir=BT;\n");
        let mut by_level: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (f, fl) in self.floors.iter().enumerate() {
            by_level.entry(fl.level).or_default().push(f);
        }
        for (level, fs) in &by_level {
            let _ = write!(s, "  {{ rank=same;");
            for f in fs {
                let _ = write!(s, " f{f};");
            }
            let _ = writeln!(s, " }} // level {level}");
        }
        let trapped: Vec<usize> = traps.iter().flat_map(|t| [t.s1, t.s2]).collect();
        for (f, fl) in self.floors.iter().enumerate() {
            let _ = writeln!(s, "  f{f} [label=\"circle {} / level {}\"];", fl.circle, fl.level);
        }
        for &g in &self.ladders {
            let (a, b) = self.ladder_floors(g);
            let colour = if trapped.contains(&g) { ", color=red" } else { "" };
            let _ = writeln!(s, "  f{a} -- f{b} [label=\"{g}\"{colour}];");
        }
        s.push_str("}\n");
        s
    }
}

pub fn build_castle(d: &Diagram, c: usize, x: usize) -> Result<Castle> {
    if c >= d.seifert_circle_count() {
        return Err(Error::UnknownCircle(c));
    }
    if !d.geometry().is_innermost(c) {
        return Err(Error::Precondition(format!("circle {c} is not innermost")));
    }
    if x >= d.segment_count() || d.segment(x).0 != c {
        return Err(Error::Precondition(format!("segment {x} does not lie on circle {c}")));
    }
    let events = CircleEvents::new(d);
    let joins: Vec<(usize, usize)> = (0..d.crossing_count()).map(|g| d.crossing_circles(g)).collect();
    let other = |g: usize, c: usize| if joins[g].0 == c { joins[g].1 } else { joins[g].0 };

    let ev0 = &events.events[c];
    let start = events.position(c, Event::Seg(x)).expect("segment is an event");
    let m = ev0.len();
    let last = (0..m).rev().find(|&k| matches!(ev0[(start + k) % m], Event::Cross(_))).unwrap_or(0);
    let mut floors = vec![Floor { circle: c, level: 0, parent: None, start, len: last + 1 }];
    let mut floor_of = HashMap::from([(c, 0)]);
    let mut queue = VecDeque::from([0]);
    while let Some(f) = queue.pop_front() {
        let fl = floors[f];
        let ev = &events.events[fl.circle];
        // first and last shared crossing per neighbouring circle, in floor order
        let mut span: BTreeMap<usize, (usize, usize, usize)> = BTreeMap::new();
        let mut order = vec![];
        for k in 0..fl.len {
            if let Event::Cross(g) = ev[(fl.start + k) % ev.len()] {
                let o = other(g, fl.circle);
                if floor_of.contains_key(&o) {
                    continue;
                }
                span.entry(o).and_modify(|e| e.1 = g).or_insert_with(|| {
                    order.push(o);
                    (g, g, k)
                });
            }
        }
        for o in order {
            let (first, last, _) = span[&o];
            let mo = events.len(o);
            let p = events.position(o, Event::Cross(first)).expect("crossing on circle");
            let q = events.position(o, Event::Cross(last)).expect("crossing on circle");
            floors.push(Floor { circle: o, level: fl.level + 1, parent: Some(f), start: p, len: (q + mo - p) % mo + 1 });
            floor_of.insert(o, floors.len() - 1);
            queue.push_back(floors.len() - 1);
        }
    }
    let mut castle = Castle { root: c, base_point: x, floors, ladders: vec![], events, floor_of, joins };
    castle.ladders = (0..d.crossing_count())
        .filter(|&g| {
            let (u, v) = castle.joins[g];
            match (castle.floor_on(u), castle.floor_on(v)) {
                (Some(a), Some(b)) => {
                    castle.offset_in(a, Event::Cross(g)).is_some() && castle.offset_in(b, Event::Cross(g)).is_some()
                }
                _ => false,
            }
        })
        .collect();
    Ok(castle)
}

/// Planar map of the Seifert circles of one Seifert-graph component with a
/// ladder edge per crossing.
struct SeifertMap {
    map: PlanarMap,
    /// Circle edge leaving the attachment of crossing `g` on circle `c`.
    edge_after: HashMap<(usize, usize), usize>,
    /// Circle edge running along the segment.
    edge_of_segment: HashMap<usize, usize>,
    ladder: HashMap<usize, usize>,
    vertex: HashMap<(usize, usize), usize>,
}

impl SeifertMap {
    fn build(d: &Diagram, events: &CircleEvents, circles: &[usize]) -> Result<SeifertMap> {
        let t = d.template();
        let inside: std::collections::BTreeSet<usize> = circles.iter().copied().collect();
        let mut vertex = HashMap::new();
        let mut attach: Vec<(usize, usize)> = vec![];
        for &c in circles {
            for e in &events.events[c] {
                if let Event::Cross(g) = *e {
                    vertex.insert((c, g), attach.len());
                    attach.push((c, g));
                }
            }
        }
        let mut edges = 0;
        let mut out_half = vec![usize::MAX; attach.len()];
        let mut in_half = vec![usize::MAX; attach.len()];
        let mut ladder_half = vec![usize::MAX; attach.len()];
        let mut edge_after = HashMap::new();
        let mut edge_of_segment = HashMap::new();
        for &c in circles {
            let ev = &events.events[c];
            let crosses: Vec<usize> = (0..ev.len()).filter(|&k| matches!(ev[k], Event::Cross(_))).collect();
            for (j, &k) in crosses.iter().enumerate() {
                let Event::Cross(g) = ev[k] else { unreachable!() };
                let next = crosses[(j + 1) % crosses.len()];
                let Event::Cross(h) = ev[next] else { unreachable!() };
                let e = edges;
                edges += 1;
                out_half[vertex[&(c, g)]] = 2 * e;
                in_half[vertex[&(c, h)]] = 2 * e + 1;
                edge_after.insert((c, g), e);
                let mut p = (k + 1) % ev.len();
                while p != next {
                    if let Event::Seg(s) = ev[p] {
                        edge_of_segment.insert(s, e);
                    }
                    p = (p + 1) % ev.len();
                }
            }
        }
        let mut ladder = HashMap::new();
        for g in 0..d.crossing_count() {
            let (lo, hi) = d.crossing_circles(g);
            if !inside.contains(&lo) {
                continue;
            }
            let e = edges;
            edges += 1;
            ladder_half[vertex[&(lo, g)]] = 2 * e;
            ladder_half[vertex[&(hi, g)]] = 2 * e + 1;
            ladder.insert(g, e);
        }
        let rotations: Vec<Vec<usize>> = attach
            .iter()
            .enumerate()
            .map(|(v, &(c, g))| {
                let co = t.co_orient(d.letter_ref(g).arc);
                let lo = d.crossing_circles(g).0 == c;
                let (l, i, o) = (ladder_half[v], in_half[v], out_half[v]);
                if lo == co {
                    vec![l, i, o]
                } else {
                    vec![i, l, o]
                }
            })
            .collect();
        let map = PlanarMap::new(edges, &rotations)?;
        if !map.is_spherical() {
            return Err(Error::Invariant("Seifert map is not spherical".into()));
        }
        Ok(SeifertMap { map, edge_after, edge_of_segment, ladder, vertex })
    }
}

/// Circles reachable from `c` in the Seifert graph.
fn graph_component(d: &Diagram, c: usize) -> Vec<usize> {
    let n = d.seifert_circle_count();
    let mut adj = vec![vec![]; n];
    for g in 0..d.crossing_count() {
        let (u, v) = d.crossing_circles(g);
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    seen[c] = true;
    let mut stack = vec![c];
    let mut out = vec![];
    while let Some(x) = stack.pop() {
        out.push(x);
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn find_traps(d: &Diagram, castle: &Castle) -> Result<Vec<Trap>> {
    if castle.ladders.is_empty() {
        return Ok(vec![]);
    }
    let circles = graph_component(d, castle.root);
    let sm = SeifertMap::build(d, &castle.events, &circles)?;
    let mut between: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for &g in &castle.ladders {
        between.entry(castle.ladder_floors(g)).or_default().push(g);
    }
    let x_edge = sm.edge_of_segment[&castle.base_point];
    let mut traps = vec![];
    for (&(a, b), ladders) in &between {
        // F1 is the lower floor
        let (f1, f2) = if castle.floors[a].level <= castle.floors[b].level { (a, b) } else { (b, a) };
        let mut ls = ladders.clone();
        ls.sort_by_key(|&g| castle.offset_in(f1, Event::Cross(g)));
        for w in ls.windows(2) {
            let (s1, s2) = (w[0], w[1]);
            let mut cut = std::collections::BTreeSet::from([sm.ladder[&s1], sm.ladder[&s2]]);
            for f in [f1, f2] {
                let fev = castle.floor_events(f);
                let o1 = castle.offset_in(f, Event::Cross(s1)).expect("ladder in floor");
                let o2 = castle.offset_in(f, Event::Cross(s2)).expect("ladder in floor");
                let circle = castle.floors[f].circle;
                for e in &fev[o1.min(o2)..o1.max(o2)] {
                    if let Event::Cross(g) = *e {
                        cut.insert(sm.edge_after[&(circle, g)]);
                    }
                }
            }
            let mut uf = sm.map.face_regions(|e| cut.contains(&e));
            if cut.contains(&x_edge) {
                return Err(Error::Invariant("base point lies on a trap boundary".into()));
            }
            let home = uf.find(sm.map.left_face(2 * x_edge));
            let inside = castle.floors.iter().enumerate().position(|(f, fl)| {
                if f == f1 || f == f2 {
                    return false;
                }
                let Some(Event::Cross(g)) = castle.floor_events(f).into_iter().find(|e| matches!(e, Event::Cross(_))) else {
                    return false;
                };
                let v = sm.vertex[&(fl.circle, g)];
                let h = (0..2 * sm.map.edge_count()).find(|&h| sm.map.origin(h) == v).expect("vertex has edges");
                uf.find(sm.map.left_face(h)) != home
            });
            if let Some(inside) = inside {
                traps.push(Trap { f1, f2, s1, s2, inside });
            }
        }
    }
    Ok(traps)
}

#[derive(Clone, Debug, Serialize)]
pub struct AppropriatePair {
    pub circle: usize,
    pub base_point: usize,
    pub derivations: usize,
}

/// Starts at the least circle innermost in the plane and its first segment, then applies
/// derivation steps until the castle has no traps.
pub fn find_appropriate_pair(d: &Diagram) -> Result<AppropriatePair> {
    let geo = d.geometry();
    let n = d.seifert_circle_count();
    let c0 = (0..n)
        .find(|&c| geo.is_planar_innermost(c))
        .or_else(|| (0..n).find(|&c| geo.is_innermost(c)))
        .ok_or_else(|| Error::Invariant("no innermost circle".into()))?;
    let mut c = c0;
    let mut x = d.segment_id(c, 0);
    let cap = (d.crossing_count() * n).max(1);
    for step in 0..=cap {
        let castle = build_castle(d, c, x)?;
        let traps = find_traps(d, &castle)?;
        let Some(trap) = traps.first() else {
            return Ok(AppropriatePair { circle: c, base_point: x, derivations: step });
        };
        (c, x) = derive(d, &castle, trap)?;
    }
    Err(Error::Invariant(format!("no appropriate pair after {cap} derivations")))
}

fn derive(d: &Diagram, castle: &Castle, trap: &Trap) -> Result<(usize, usize)> {
    let geo = d.geometry();
    let f1c = castle.floors[trap.f1].circle;
    let f2c = castle.floors[trap.f2].circle;
    let neighbours = |f: usize| -> Vec<usize> {
        let circle = castle.floors[f].circle;
        castle
            .floor_events(f)
            .into_iter()
            .filter_map(|e| match e {
                Event::Cross(g) => {
                    let (u, v) = d.crossing_circles(g);
                    Some(if u == circle { v } else { u })
                }
                Event::Seg(_) => None,
            })
            .collect()
    };
    let inside = trapped_circles(d, castle, trap)?;
    let floor_circles: Vec<usize> = inside.iter().copied().filter(|&c| castle.floor_on(c).is_some()).collect();
    let (anchor, cp) = [(trap.f1, f1c), (trap.f2, f2c)]
        .into_iter()
        .find_map(|(f, _)| {
            let nb = neighbours(f);
            floor_circles.iter().copied().find(|c| nb.contains(c)).map(|c| (f, c))
        })
        .ok_or_else(|| Error::Invariant("trap without a floor next to its walls".into()))?;
    // the disk of C' away from the base point
    let x_side = geo.side_of(cp, castle.root);
    let far = x_side.flip();
    let mut candidates = vec![cp];
    candidates.extend(geo.circles_on_side(cp, far));
    let cpp = candidates
        .into_iter()
        .find(|&c| geo.is_innermost(c) && (c == cp || geo.side_of(cp, c) == far))
        .ok_or_else(|| Error::Invariant("no innermost circle behind the trap".into()))?;
    let f1p = wall_events(castle, anchor, trap);
    let anchor_circle = castle.floors[anchor].circle;
    for s in 0..d.template().segment_count(cpp) {
        let y = d.segment_id(cpp, s);
        let cas = build_castle(d, cpp, y)?;
        let ok = match cas.floor_on(anchor_circle) {
            None => true,
            Some(f) => cas.floor_events(f).iter().all(|e| f1p.contains(e)),
        };
        if ok {
            return Ok((cpp, y));
        }
    }
    Err(Error::Invariant(format!("no derived base point on circle {cpp}")))
}

/// Events of the trap wall on floor `f` between the two ladders.
fn wall_events(castle: &Castle, f: usize, trap: &Trap) -> Vec<Event> {
    let fev = castle.floor_events(f);
    let o1 = castle.offset_in(f, Event::Cross(trap.s1)).expect("ladder in floor");
    let o2 = castle.offset_in(f, Event::Cross(trap.s2)).expect("ladder in floor");
    fev[o1.min(o2)..=o1.max(o2)].to_vec()
}

/// Seifert circles strictly inside the trap disk.
pub fn trapped_circles(d: &Diagram, castle: &Castle, trap: &Trap) -> Result<Vec<usize>> {
    let circles = graph_component(d, castle.root);
    let sm = SeifertMap::build(d, &castle.events, &circles)?;
    let mut cut = std::collections::BTreeSet::from([sm.ladder[&trap.s1], sm.ladder[&trap.s2]]);
    for f in [trap.f1, trap.f2] {
        let circle = castle.floors[f].circle;
        let w = wall_events(castle, f, trap);
        for e in &w[..w.len() - 1] {
            if let Event::Cross(g) = *e {
                cut.insert(sm.edge_after[&(circle, g)]);
            }
        }
    }
    let mut uf = sm.map.face_regions(|e| cut.contains(&e));
    let home = uf.find(sm.map.left_face(2 * sm.edge_of_segment[&castle.base_point]));
    let walls = [castle.floors[trap.f1].circle, castle.floors[trap.f2].circle];
    Ok(circles
        .into_iter()
        .filter(|c| !walls.contains(c))
        .filter(|&c| {
            let g = castle.events.events[c].iter().find_map(|e| match e {
                Event::Cross(g) => Some(*g),
                Event::Seg(_) => None,
            });
            let Some(g) = g else { return false };
            let e = sm.edge_after[&(c, g)];
            uf.find(sm.map.left_face(2 * e)) != home
        })
        .collect())
}

/// Picks each phase's base point from an appropriate pair of the diagram
/// left after deleting the components already travelled.
pub struct SpecialPlanner {
    flavor: Strategy,
}

impl SpecialPlanner {
    pub fn new(flavor: Strategy) -> SpecialPlanner {
        SpecialPlanner { flavor }
    }
}

impl Planner for SpecialPlanner {
    fn plan(&mut self, d: &Diagram, state: &State, done: &[usize], _: &[usize]) -> Result<(usize, Monotone)> {
        let v = d.apply(state);
        let comps = v.components();
        let deleted: Vec<bool> = (0..comps.count).map(|k| done.iter().any(|&x| comps.of_segment[x] == k)).collect();
        let induced = induce_diagram(&v, &deleted)?;
        let pair = find_appropriate_pair(&induced.diagram)?;
        let x = induced.segment_origin[pair.base_point][0];
        let circle = d.segment(x).0;
        Ok((x, self.flavor.mode_for(d.geometry().is_clockwise(circle))))
    }
}

pub fn build_special_tree(d: &Diagram, flavor: Strategy) -> Result<ResolutionTree> {
    if flavor == Strategy::Descending {
        return Err(Error::InvalidInput("special trees are X- or Y-coherent".into()));
    }
    build_tree_with(d, &mut SpecialPlanner::new(flavor))
}

/// Stand-in for a castle with two traps. Circle 0 is joined to the big
/// circle 1 by arcs `a`, `b`, `e`; small circles 2 and 3 sit in the annulus
/// between `a`/`b` and `b`/`e` and hang off circle 1. From segment 2 of
/// circle 0 both pockets are traps.
pub fn trap_example() -> Diagram {
    let inc = |circle, arc| Incidence { circle, arc, kind: IncidenceKind::Endpoint, side_change: false, co_orient: true };
    let incidences = vec![
        inc(0, 0),
        inc(1, 0),
        inc(0, 1),
        inc(1, 1),
        inc(0, 2),
        inc(1, 2),
        inc(2, 3),
        inc(1, 3),
        inc(3, 4),
        inc(1, 4),
    ];
    let circle = |incidences: Vec<usize>| Circle { incidences, nest: None };
    let circles = vec![circle(vec![0, 2, 4]), circle(vec![1, 7, 3, 9, 5]), circle(vec![6]), circle(vec![8])];
    let names = ["a", "b", "e", "c", "d"];
    let arcs = names
        .iter()
        .enumerate()
        .map(|(k, n)| ArcDef { name: n.to_string(), incidences: vec![2 * k, 2 * k + 1] })
        .collect();
    let outer = FaceRef { circle: 1, segment: 0, side: Side::Left };
    let t = Template::from_parts(circles, arcs, incidences, Some(outer)).expect("fixed template");
    let mut pi = Placement::new();
    for n in names {
        pi.insert(n, BraidWord::parse("1").expect("fixed word"));
    }
    Diagram::new(t, &pi).expect("fixed template is valid")
}

pub const TRAP_EXAMPLE_BASE: (usize, usize) = (0, 2);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skein::{evaluate_tree, homfly};

    fn d(s: &str) -> Diagram {
        Diagram::parse_braid(s).unwrap()
    }

    #[test]
    fn trefoil_castle() {
        let dg = d("1 1 1");
        let cas = build_castle(&dg, 0, dg.segment_id(0, 0)).unwrap();
        assert_eq!(cas.floors.len(), 2);
        assert_eq!(cas.floors[0].level, 0);
        assert_eq!(cas.floor_events(0).iter().filter(|e| matches!(e, Event::Cross(_))).count(), 3);
        assert_eq!(cas.ladders.len(), 3);
        cas.check_invariants().unwrap();
        assert!(find_traps(&dg, &cas).unwrap().is_empty());
        let pair = find_appropriate_pair(&dg).unwrap();
        assert_eq!(pair.circle, 0);
    }

    #[test]
    fn lone_circle_castle() {
        let dg = d("");
        let cas = build_castle(&dg, 0, 0).unwrap();
        assert_eq!((cas.floors.len(), cas.ladders.len()), (1, 0));
        assert!(find_traps(&dg, &cas).unwrap().is_empty());
    }

    #[test]
    fn three_strand_levels() {
        let dg = d("1 2 1 2");
        let cas = build_castle(&dg, 0, dg.segment_id(0, 0)).unwrap();
        let levels: Vec<(usize, usize)> = cas.floors.iter().map(|f| (f.circle, f.level)).collect();
        assert_eq!(levels, vec![(0, 0), (1, 1), (2, 2)]);
        cas.check_invariants().unwrap();
        assert!(build_castle(&dg, 1, dg.segment_id(1, 0)).is_err());
    }

    #[test]
    fn stand_in_has_two_traps() {
        let dg = trap_example();
        let (c, s) = TRAP_EXAMPLE_BASE;
        let cas = build_castle(&dg, c, dg.segment_id(c, s)).unwrap();
        cas.check_invariants().unwrap();
        assert_eq!(find_traps(&dg, &cas).unwrap().len(), 2);
        let pair = find_appropriate_pair(&dg).unwrap();
        let cas = build_castle(&dg, pair.circle, pair.base_point).unwrap();
        assert!(find_traps(&dg, &cas).unwrap().is_empty());
        assert!(pair.derivations >= 1);
    }

    #[test]
    fn special_trees_agree() {
        let cases = ["1 1 1", "-1 2 -1", "1 2 1 2", "2 1 2 2 1 2", "1 -2 1 -2 3 -2 3"].map(d);
        for (w, dg) in cases.iter().chain([trap_example()].iter()).enumerate() {
            for flavor in [Strategy::XCoherent, Strategy::YCoherent] {
                let tree = build_special_tree(dg, flavor).unwrap();
                assert_eq!(evaluate_tree(&tree), homfly(dg), "{w} {flavor:?}");
            }
        }
    }
}
