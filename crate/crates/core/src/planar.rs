//! Oriented link diagrams built from a template and a braid placement.
//!
//! Crossing `g` is the `g`-th letter when the arcs' words are read in arc
//! order. Base points are template circle segments, which lie outside every
//! braid box. A [`State`] marks letters as kept, flipped or smoothed without
//! rebuilding the diagram; smoothed letters become identity boxes, so the
//! Seifert circles never change.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::braid::{BraidWord, Letter, Sign};
use crate::error::{Error, Result};
use crate::map::{PlanarMap, UnionFind};
use crate::template::{self, alexander_closure, FaceRef, Geometry, Placement, Side, Template};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Cross {
    Keep,
    Flip,
    Smooth,
}

/// Per-letter surgery marks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(Vec<Cross>);

impl State {
    pub fn identity(n: usize) -> State {
        State(vec![Cross::Keep; n])
    }

    pub fn get(&self, g: usize) -> Cross {
        self.0[g]
    }

    pub fn set(&mut self, g: usize, c: Cross) {
        self.0[g] = c;
    }

    pub fn with(&self, g: usize, c: Cross) -> State {
        let mut s = self.clone();
        s.set(g, c);
        s
    }

    pub fn marks(&self) -> &[Cross] {
        &self.0
    }

    pub fn smoothed(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &c)| c == Cross::Smooth).map(|(g, _)| g)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Visit {
    pub crossing: usize,
    pub over: bool,
}

/// One pass around a link component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    pub segments: Vec<usize>,
    pub visits: Vec<Visit>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    /// Component of each global segment.
    pub of_segment: Vec<usize>,
    pub count: usize,
}

impl Components {
    pub fn segments_of(&self, k: usize) -> Vec<usize> {
        (0..self.of_segment.len()).filter(|&g| self.of_segment[g] == k).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DiagramStats {
    pub s: usize,
    pub writhe: i64,
    pub crossing_count: usize,
    pub component_count: usize,
}

/// Where a crossing sits: arc and letter index inside that arc's word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LetterRef {
    pub arc: usize,
    pub pos: usize,
}

#[derive(Clone)]
pub struct Diagram {
    template: Arc<Template>,
    geometry: Arc<Geometry>,
    words: Vec<BraidWord>,
    letters: Vec<LetterRef>,
    seg_offset: Vec<usize>,
    seg_ids: Vec<(usize, usize)>,
}

impl fmt::Debug for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Diagram").field("circles", &self.template.circle_count()).field("words", &self.words).finish()
    }
}

impl PartialEq for Diagram {
    fn eq(&self, other: &Diagram) -> bool {
        self.template == other.template && self.words == other.words
    }
}

impl Eq for Diagram {}

impl Diagram {
    pub fn new(t: Template, pi: &Placement) -> Result<Diagram> {
        let words = pi.aligned(&t)?;
        let geometry = Geometry::build(&t).map_err(|v| Error::Template(v.to_string()))?;
        Ok(Diagram::assemble(Arc::new(t), Arc::new(geometry), words))
    }

    pub fn from_braid(w: &BraidWord) -> Diagram {
        let (t, pi) = alexander_closure(w);
        Diagram::new(t, &pi).expect("closures are valid")
    }

    pub fn parse_braid(s: &str) -> Result<Diagram> {
        Ok(Diagram::from_braid(&BraidWord::parse(s)?))
    }

    pub fn empty() -> Diagram {
        Diagram::new(Template::empty(), &Placement::new()).expect("empty diagram")
    }

    pub(crate) fn assemble(template: Arc<Template>, geometry: Arc<Geometry>, words: Vec<BraidWord>) -> Diagram {
        let letters = words
            .iter()
            .enumerate()
            .flat_map(|(arc, w)| (0..w.len()).map(move |pos| LetterRef { arc, pos }))
            .collect();
        let seg_ids = template.segment_ids();
        let mut seg_offset = Vec::with_capacity(template.circle_count());
        let mut acc = 0;
        for c in 0..template.circle_count() {
            seg_offset.push(acc);
            acc += template.segment_count(c);
        }
        Diagram { template, geometry, words, letters, seg_offset, seg_ids }
    }

    pub fn template(&self) -> &Template {
        &self.template
    }

    pub fn template_arc(&self) -> Arc<Template> {
        Arc::clone(&self.template)
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn words(&self) -> &[BraidWord] {
        &self.words
    }

    pub fn placement(&self) -> Placement {
        let mut pi = Placement::new();
        for (a, w) in self.words.iter().enumerate() {
            pi.insert(self.template.arcs()[a].name.clone(), w.clone());
        }
        pi
    }

    /// The braid word when the diagram is an Alexander closure.
    pub fn braid_word(&self) -> Option<&BraidWord> {
        (self.words.len() == 1).then(|| &self.words[0])
    }

    pub fn crossing_count(&self) -> usize {
        self.letters.len()
    }

    /// Global index of the first letter on arc `a`.
    pub fn arc_offset(&self, a: usize) -> usize {
        self.letters.partition_point(|r| r.arc < a)
    }

    pub fn letter_ref(&self, g: usize) -> LetterRef {
        self.letters[g]
    }

    pub fn letter(&self, g: usize) -> Letter {
        let r = self.letters[g];
        self.words[r.arc].letters()[r.pos]
    }

    pub fn sign(&self, g: usize) -> Sign {
        self.letter(g).sign()
    }

    pub fn writhe(&self) -> i64 {
        self.words.iter().map(BraidWord::writhe).sum()
    }

    pub fn seifert_circle_count(&self) -> usize {
        self.template.circle_count()
    }

    pub fn segment_count(&self) -> usize {
        self.seg_ids.len()
    }

    pub fn segment(&self, g: usize) -> (usize, usize) {
        self.seg_ids[g]
    }

    pub fn segment_id(&self, c: usize, s: usize) -> usize {
        self.seg_offset[c] + s
    }

    /// Circles joined by crossing `g`, lower box position first.
    pub fn crossing_circles(&self, g: usize) -> (usize, usize) {
        let r = self.letters[g];
        let i = self.letter(g).index();
        (self.template.circle_at(r.arc, i), self.template.circle_at(r.arc, i + 1))
    }

    pub fn effective_sign(&self, g: usize, state: &State) -> Option<Sign> {
        match state.get(g) {
            Cross::Keep => Some(self.sign(g)),
            Cross::Flip => Some(-self.sign(g)),
            Cross::Smooth => None,
        }
    }

    pub fn state_writhe(&self, state: &State) -> i64 {
        (0..self.crossing_count())
            .filter_map(|g| self.effective_sign(g, state))
            .map(|s| s.value() as i64)
            .sum()
    }

    /// Travels one component from the start of global segment `start`.
    pub fn walk(&self, state: &State, start: usize) -> Walk {
        let t = &*self.template;
        let mut segments = vec![];
        let mut visits = vec![];
        let mut seg = start;
        loop {
            segments.push(seg);
            let (c, s) = self.seg_ids[seg];
            let Some(v) = t.segment_end(c, s) else {
                break;
            };
            let a = t.incidences()[v].arc;
            let co = t.co_orient(a);
            let mut p = t.arc_position(v);
            let base = self.arc_offset(a);
            for (k, l) in self.words[a].letters().iter().enumerate() {
                let g = base + k;
                let Some(sign) = self.effective_sign(g, state) else {
                    continue;
                };
                let i = l.index();
                if p != i && p != i + 1 {
                    continue;
                }
                let lo = p == i;
                let lo_under = (sign == Sign::Pos) == co;
                visits.push(Visit { crossing: g, over: lo != lo_under });
                p = if lo { i + 1 } else { i };
            }
            let exit = t.incidence_at(a, p);
            seg = self.segment_id(t.incidences()[exit].circle, t.segment_after(exit));
            if seg == start {
                break;
            }
        }
        Walk { segments, visits }
    }

    pub fn components_in(&self, state: &State) -> Components {
        let mut of_segment = vec![usize::MAX; self.segment_count()];
        let mut count = 0;
        for g in 0..self.segment_count() {
            if of_segment[g] != usize::MAX {
                continue;
            }
            for s in self.walk(state, g).segments {
                of_segment[s] = count;
            }
            count += 1;
        }
        Components { of_segment, count }
    }

    pub fn components(&self) -> Components {
        self.components_in(&State::identity(self.crossing_count()))
    }

    pub fn stats(&self) -> DiagramStats {
        DiagramStats {
            s: self.seifert_circle_count(),
            writhe: self.writhe(),
            crossing_count: self.crossing_count(),
            component_count: self.components().count,
        }
    }

    /// Applies the surgeries of a state, renumbering the surviving letters.
    pub fn apply(&self, state: &State) -> Diagram {
        let mut words = Vec::with_capacity(self.words.len());
        let mut g = 0;
        for w in &self.words {
            let mut letters = vec![];
            for &l in w.letters() {
                match state.get(g) {
                    Cross::Keep => letters.push(l),
                    Cross::Flip => letters.push(l.inverse()),
                    Cross::Smooth => {}
                }
                g += 1;
            }
            words.push(BraidWord::new(letters, w.strands()).expect("surgery keeps indices"));
        }
        Diagram::assemble(Arc::clone(&self.template), Arc::clone(&self.geometry), words)
    }

    fn check_crossing(&self, g: usize) -> Result<()> {
        (g < self.crossing_count()).then_some(()).ok_or(Error::UnknownCrossing(g))
    }

    pub fn smooth_crossing(&self, g: usize) -> Result<Diagram> {
        self.check_crossing(g)?;
        Ok(self.apply(&State::identity(self.crossing_count()).with(g, Cross::Smooth)))
    }

    pub fn flip_crossing(&self, g: usize) -> Result<Diagram> {
        self.check_crossing(g)?;
        Ok(self.apply(&State::identity(self.crossing_count()).with(g, Cross::Flip)))
    }

    /// Replaces a crossing by two consecutive copies of itself.
    pub fn double_crossing(&self, g: usize) -> Result<Diagram> {
        self.check_crossing(g)?;
        let r = self.letters[g];
        let mut words = self.words.clone();
        let w = &words[r.arc];
        let mut letters = w.letters().to_vec();
        letters.insert(r.pos, letters[r.pos]);
        words[r.arc] = BraidWord::new(letters, w.strands())?;
        Ok(Diagram::assemble(Arc::clone(&self.template), Arc::clone(&self.geometry), words))
    }

    pub fn delete_component(&self, k: usize) -> Result<Diagram> {
        let comps = self.components();
        if k >= comps.count {
            return Err(Error::UnknownComponent(k));
        }
        let mut deleted = vec![false; comps.count];
        deleted[k] = true;
        Ok(crate::induce::induce_diagram(self, &deleted)?.diagram)
    }

    pub fn mirror(&self) -> Diagram {
        let words = self.words.iter().map(BraidWord::mirror).collect();
        Diagram::assemble(Arc::clone(&self.template), Arc::clone(&self.geometry), words)
    }

    pub fn reverse(&self) -> Diagram {
        let t = self.template.reversed();
        let pi = template::reverse_placement(&self.template, &self.placement());
        Diagram::new(t, &pi).expect("reversal keeps validity")
    }

    /// Planar reflection; signs flip and every circle changes orientation sense.
    pub fn reflect(&self) -> Diagram {
        let t = self.template.reflected();
        let words = self.words.iter().map(BraidWord::mirror).collect();
        let geometry = Geometry::build(&t).expect("reflection keeps validity");
        Diagram::assemble(Arc::new(t), Arc::new(geometry), words)
    }

    /// Splices along global segments `e1` of `self` and `e2` of `other`,
    /// both bordering the outer face.
    pub fn connected_sum(&self, other: &Diagram, e1: usize, e2: usize) -> Result<Diagram> {
        if self.template.circle_count() == 0 {
            return Ok(other.clone());
        }
        if other.template.circle_count() == 0 {
            return Ok(self.clone());
        }
        let seg = |d: &Diagram, e: usize| d.seg_ids.get(e).copied().ok_or(Error::NotOuterSegment);
        let (t, pi) = template::connected_sum(
            &self.template,
            &self.placement(),
            seg(self, e1)?,
            &other.template,
            &other.placement(),
            seg(other, e2)?,
        )?;
        Diagram::new(t, &pi)
    }

    /// Global segments bordering the outer face.
    pub fn outer_segments(&self) -> Vec<usize> {
        let Some(outer) = self.template.outer() else {
            return vec![];
        };
        let target = self.geometry.face_of(outer);
        (0..self.segment_count())
            .filter(|&g| {
                let (circle, segment) = self.seg_ids[g];
                [Side::Left, Side::Right]
                    .into_iter()
                    .any(|side| self.geometry.face_of(FaceRef { circle, segment, side }) == target)
            })
            .collect()
    }

    pub fn seifert_smooth(&self) -> SeifertPicture {
        let geo = &self.geometry;
        let n = self.template.circle_count();
        let circles = (0..n)
            .map(|c| {
                let enclosers: Vec<usize> = (0..n).filter(|&y| y != c && geo.side_of(y, c) != geo.outer_side(y)).collect();
                let parent = enclosers
                    .iter()
                    .copied()
                    .max_by_key(|&y| (0..n).filter(|&z| z != y && geo.side_of(z, y) != geo.outer_side(z)).count());
                SeifertCircle { id: c, clockwise: geo.is_clockwise(c), parent, depth: enclosers.len() }
            })
            .collect();
        let joins = (0..self.crossing_count()).map(|g| self.crossing_circles(g)).collect();
        SeifertPicture { circles, joins }
    }

    pub fn innermost_circles(&self) -> Vec<usize> {
        (0..self.template.circle_count()).filter(|&c| self.geometry.is_innermost(c)).collect()
    }

    pub fn circle_orientation(&self, c: usize) -> Result<Orientation> {
        if c >= self.template.circle_count() {
            return Err(Error::UnknownCircle(c));
        }
        Ok(if self.geometry.is_clockwise(c) { Orientation::Clockwise } else { Orientation::Counterclockwise })
    }

    /// Follows the component from `x` until it closes or meets a crossing
    /// first on the wrong strand.
    pub fn monotone_path(&self, x: usize, mode: Monotone) -> Result<MonotonePath> {
        if x >= self.segment_count() {
            return Err(Error::InvalidInput(format!("no segment {x}")));
        }
        let walk = self.walk(&State::identity(self.crossing_count()), x);
        let mut seen = vec![false; self.crossing_count()];
        let mut visits = vec![];
        for v in walk.visits {
            let first = !seen[v.crossing];
            seen[v.crossing] = true;
            visits.push(v);
            if first && v.over != (mode == Monotone::Descending) {
                return Ok(MonotonePath { visits, terminal: Terminal::Crossing(v.crossing) });
            }
        }
        Ok(MonotonePath { visits, terminal: Terminal::Closed })
    }

    pub fn diagram_map(&self) -> DiagramMap {
        DiagramMap::build(self)
    }

    /// Every piece of the diagram map satisfies `V − E + F = 2`.
    pub fn euler_valid(&self) -> bool {
        self.diagram_map().pieces.iter().all(|p| p.map.is_spherical())
    }

    pub fn canonical_json(&self) -> serde_json::Value {
        canonical::canonical_json(self)
    }

    pub fn canonical_hash(&self) -> String {
        let text = self.canonical_json().to_string();
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Clockwise,
    Counterclockwise,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Monotone {
    Descending,
    Ascending,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Terminal {
    Closed,
    Crossing(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonePath {
    pub visits: Vec<Visit>,
    pub terminal: Terminal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeifertCircle {
    pub id: usize,
    pub clockwise: bool,
    /// Nearest circle separating this one from the outer face.
    pub parent: Option<usize>,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeifertPicture {
    pub circles: Vec<SeifertCircle>,
    /// Circles joined by each crossing.
    pub joins: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MapVertex {
    Port(usize),
    Crossing(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MapEdge {
    /// Strand piece; `entry` is the incidence where its strand entered the
    /// box it starts in, `segment` the circle segment it contains, if any.
    Strand { entry: usize, segment: Option<(usize, usize)> },
    /// Arc piece between positions `k + 1` and `k + 2`.
    Arc { arc: usize, k: usize },
}

/// Map of one template piece: ports at every incidence plus crossings.
pub struct PieceDiagram {
    pub map: PlanarMap,
    pub vertices: Vec<MapVertex>,
    pub edges: Vec<MapEdge>,
    /// Strand edge containing each circle segment.
    pub segment_edge: HashMap<(usize, usize), usize>,
    /// Half-edges at each crossing: incoming low, incoming high, outgoing low, outgoing high.
    pub crossing_slots: BTreeMap<usize, [usize; 4]>,
}

pub struct DiagramMap {
    pub pieces: Vec<PieceDiagram>,
    /// Piece index of each template piece, `None` for lone circles.
    pub piece_index: Vec<Option<usize>>,
}

impl DiagramMap {
    fn build(d: &Diagram) -> DiagramMap {
        let geo = d.geometry();
        let mut pieces = vec![];
        let mut piece_index = vec![];
        for p in 0..geo.piece_count() {
            let circles = geo.piece_circles(p);
            if d.template().circles()[circles[0]].incidences.is_empty() {
                piece_index.push(None);
                continue;
            }
            piece_index.push(Some(pieces.len()));
            pieces.push(build_piece(d, circles));
        }
        DiagramMap { pieces, piece_index }
    }

    /// Face on a side of a circle segment, as (diagram piece, face).
    pub fn face_of(&self, d: &Diagram, f: FaceRef) -> Option<(usize, usize)> {
        let p = self.piece_index[d.geometry().piece_of(f.circle)]?;
        let piece = &self.pieces[p];
        let h = 2 * piece.segment_edge[&(f.circle, f.segment)];
        Some((
            p,
            match f.side {
                Side::Left => piece.map.left_face(h),
                Side::Right => piece.map.right_face(h),
            },
        ))
    }
}

#[derive(Clone, Copy)]
enum Slot {
    ArcOut,
    StrandIn,
    ArcIn,
    StrandOut,
    InLo,
    InHi,
    OutLo,
    OutHi,
}

fn build_piece(d: &Diagram, circles: &[usize]) -> PieceDiagram {
    let t = d.template();
    let mut vertices = vec![];
    let mut vid = HashMap::new();
    let mut arcs = std::collections::BTreeSet::new();
    for &c in circles {
        for &v in &t.circles()[c].incidences {
            vid.insert(MapVertex::Port(v), vertices.len());
            vertices.push(MapVertex::Port(v));
            arcs.insert(t.incidences()[v].arc);
        }
    }
    for g in 0..d.crossing_count() {
        if arcs.contains(&d.letter_ref(g).arc) {
            vid.insert(MapVertex::Crossing(g), vertices.len());
            vertices.push(MapVertex::Crossing(g));
        }
    }
    let mut slots: Vec<[Option<usize>; 4]> = vec![[None; 4]; vertices.len()];
    let mut edges = vec![];
    let mut segment_edge = HashMap::new();
    let attach = |slots: &mut Vec<[Option<usize>; 4]>, v: usize, slot: Slot, h: usize| {
        let k = match slot {
            Slot::ArcOut | Slot::InLo => 0,
            Slot::StrandIn | Slot::InHi => 1,
            Slot::ArcIn | Slot::OutLo => 2,
            Slot::StrandOut | Slot::OutHi => 3,
        };
        slots[v][k] = Some(h);
    };
    for &a in &arcs {
        let incs = &t.arcs()[a].incidences;
        for k in 0..incs.len() - 1 {
            let e = edges.len();
            edges.push(MapEdge::Arc { arc: a, k });
            attach(&mut slots, vid[&MapVertex::Port(incs[k])], Slot::ArcOut, 2 * e);
            attach(&mut slots, vid[&MapVertex::Port(incs[k + 1])], Slot::ArcIn, 2 * e + 1);
        }
    }
    for &a in &arcs {
        let incs = &t.arcs()[a].incidences;
        // open strand ends per position: (vertex, slot, entry incidence)
        let mut open: Vec<(usize, Slot, usize)> =
            incs.iter().map(|&v| (vid[&MapVertex::Port(v)], Slot::StrandOut, v)).collect();
        let base = (0..d.crossing_count()).find(|&g| d.letter_ref(g).arc == a);
        for (k, l) in d.words()[a].letters().iter().enumerate() {
            let g = base.expect("letters exist") + k;
            let cv = vid[&MapVertex::Crossing(g)];
            let i = l.index() - 1;
            for (pos, slot_in) in [(i, Slot::InLo), (i + 1, Slot::InHi)] {
                let (tail, tslot, entry) = open[pos];
                let e = edges.len();
                edges.push(MapEdge::Strand { entry, segment: None });
                attach(&mut slots, tail, tslot, 2 * e);
                attach(&mut slots, cv, slot_in, 2 * e + 1);
            }
            // the low strand leaves high and vice versa
            let (lo_entry, hi_entry) = (open[i].2, open[i + 1].2);
            open[i] = (cv, Slot::OutLo, hi_entry);
            open[i + 1] = (cv, Slot::OutHi, lo_entry);
        }
        for (pos, &(tail, tslot, entry)) in open.iter().enumerate() {
            let v = incs[pos];
            let c = t.incidences()[v].circle;
            let s = t.segment_after(v);
            let head = t.segment_end(c, s).expect("circle has incidences");
            let e = edges.len();
            edges.push(MapEdge::Strand { entry, segment: Some((c, s)) });
            segment_edge.insert((c, s), e);
            attach(&mut slots, tail, tslot, 2 * e);
            attach(&mut slots, vid[&MapVertex::Port(head)], Slot::StrandIn, 2 * e + 1);
        }
    }
    let mut crossing_slots = BTreeMap::new();
    let rotations: Vec<Vec<usize>> = vertices
        .iter()
        .enumerate()
        .map(|(k, vx)| {
            let s = slots[k];
            match *vx {
                MapVertex::Port(v) => {
                    let co = t.incidences()[v].co_orient;
                    let [ao, si, ai, so] = s;
                    let order = if co { [ao, si, ai, so] } else { [ai, si, ao, so] };
                    order.into_iter().flatten().collect()
                }
                MapVertex::Crossing(g) => {
                    let [il, ih, ol, oh] = s.map(|h| h.expect("crossing slots filled"));
                    crossing_slots.insert(g, [il, ih, ol, oh]);
                    if t.co_orient(d.letter_ref(g).arc) {
                        vec![ih, il, ol, oh]
                    } else {
                        vec![il, ih, oh, ol]
                    }
                }
            }
        })
        .collect();
    let map = PlanarMap::new(edges.len(), &rotations).expect("diagram rotation is consistent");
    PieceDiagram { map, vertices, edges, segment_edge, crossing_slots }
}

/// Oriented PD data: per crossing the four strand labels counterclockwise
/// from the incoming under-strand, plus the number of crossingless loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdCode {
    pub crossings: Vec<[usize; 4]>,
    pub signs: Vec<Sign>,
    pub free_loops: usize,
    pub labels: usize,
}

impl Diagram {
    pub fn pd_code(&self) -> PdCode {
        let dm = self.diagram_map();
        let mut crossings = vec![];
        let mut signs = vec![];
        let mut label_base = 0;
        let mut free_loops = 0;
        for (p, idx) in dm.piece_index.iter().enumerate() {
            let Some(idx) = idx else {
                free_loops += 1;
                let _ = p;
                continue;
            };
            let piece = &dm.pieces[*idx];
            // strand edges through ports are glued into one label
            let mut uf = UnionFind::new(piece.edges.len());
            for (k, vx) in piece.vertices.iter().enumerate() {
                if let MapVertex::Port(_) = vx {
                    let strand: Vec<usize> = (0..piece.edges.len())
                        .flat_map(|e| [2 * e, 2 * e + 1])
                        .filter(|&h| piece.map.origin(h) == k && matches!(piece.edges[h / 2], MapEdge::Strand { .. }))
                        .collect();
                    if strand.len() == 2 {
                        uf.union(strand[0] / 2, strand[1] / 2);
                    }
                }
            }
            let strand_edges: Vec<usize> =
                (0..piece.edges.len()).filter(|&e| matches!(piece.edges[e], MapEdge::Strand { .. })).collect();
            let mut roots: BTreeMap<usize, usize> = BTreeMap::new();
            for &e in &strand_edges {
                let r = uf.find(e);
                let n = roots.len();
                roots.entry(r).or_insert(n);
            }
            if piece.crossing_slots.is_empty() {
                free_loops += roots.len();
                continue;
            }
            let mut label = |h: usize| label_base + roots[&uf.find(h / 2)];
            for (&g, &[il, ih, ol, oh]) in &piece.crossing_slots {
                let co = self.template.co_orient(self.letter_ref(g).arc);
                let sign = self.sign(g);
                let lo_under = (sign == Sign::Pos) == co;
                let ccw = if co { [ih, il, ol, oh] } else { [il, ih, oh, ol] };
                let start = if lo_under { il } else { ih };
                let k = ccw.iter().position(|&h| h == start).expect("slot present");
                crossings.push([0, 1, 2, 3].map(|j| label(ccw[(k + j) % 4])));
                signs.push(sign);
            }
            // labels of loops without crossings inside a piece
            let used: std::collections::BTreeSet<usize> = crossings.iter().flatten().copied().collect();
            let total = roots.len();
            free_loops += (label_base..label_base + total).filter(|l| !used.contains(l)).count();
            label_base += total;
        }
        PdCode { crossings, signs, free_loops, labels: label_base }
    }
}

mod canonical {
    //! Relabeling-invariant serialization of the diagram map.

    use super::*;
    use serde_json::{json, Value};

    /// Breadth-first relabeling from one starting half-edge.
    fn code_from(piece: &PieceDiagram, d: &Diagram, start: usize) -> (Vec<i64>, Vec<usize>) {
        let m = &piece.map;
        let nv = piece.vertices.len();
        let mut vlabel = vec![usize::MAX; nv];
        let mut entry = vec![usize::MAX; nv];
        let mut order = vec![];
        let mut queue = std::collections::VecDeque::new();
        let v0 = m.origin(start);
        vlabel[v0] = 0;
        entry[v0] = start;
        order.push(v0);
        queue.push_back(v0);
        let mut code = vec![];
        let mut hlabel = vec![usize::MAX; 2 * m.edge_count()];
        while let Some(v) = queue.pop_front() {
            let mut h = entry[v];
            let mut k = 0;
            loop {
                hlabel[h] = vlabel[v] * 4 + k;
                let u = m.origin(crate::map::twin(h));
                if vlabel[u] == usize::MAX {
                    vlabel[u] = order.len();
                    entry[u] = crate::map::twin(h);
                    order.push(u);
                    queue.push_back(u);
                }
                h = m.ccw_next(h);
                k += 1;
                if h == entry[v] {
                    break;
                }
            }
        }
        for &v in &order {
            let mut h = entry[v];
            match piece.vertices[v] {
                MapVertex::Port(_) => code.push(-1),
                MapVertex::Crossing(g) => code.push(d.sign(g).value() as i64 * 2),
            }
            loop {
                let tw = crate::map::twin(h);
                let kind = match piece.edges[h / 2] {
                    MapEdge::Strand { .. } => 0,
                    MapEdge::Arc { .. } => 1,
                };
                code.extend([hlabel[tw] as i64, kind, (h % 2) as i64]);
                h = m.ccw_next(h);
                if h == entry[v] {
                    break;
                }
            }
            code.push(-9);
        }
        (code, hlabel)
    }

    pub(super) fn canonical_json(d: &Diagram) -> Value {
        let dm = d.diagram_map();
        let t = d.template();
        let geo = d.geometry();
        let labelled: Vec<(Vec<i64>, Vec<usize>)> = dm
            .piece_index
            .iter()
            .map(|idx| match idx {
                None => (vec![-1], vec![]),
                Some(i) => {
                    let piece = &dm.pieces[*i];
                    (0..2 * piece.map.edge_count())
                        .map(|h| code_from(piece, d, h))
                        .min_by(|a, b| a.0.cmp(&b.0))
                        .expect("piece has half-edges")
                }
            })
            .collect();
        // faces are named by the least canonical half-edge on them
        let face_name = |f: FaceRef| -> i64 {
            let p = geo.piece_of(f.circle);
            match dm.piece_index[p] {
                None => match f.side {
                    Side::Left => 0,
                    Side::Right => 1,
                },
                Some(i) => {
                    let piece = &dm.pieces[i];
                    let hlabel = &labelled[p].1;
                    let (_, face) = dm.face_of(d, f).expect("mapped piece");
                    (0..hlabel.len())
                        .filter(|&h| piece.map.left_face(h) == face)
                        .map(|h| hlabel[h] as i64)
                        .min()
                        .unwrap_or(-1)
                }
            }
        };
        let mut order: Vec<usize> = (0..labelled.len()).collect();
        order.sort_by(|&a, &b| labelled[a].0.cmp(&labelled[b].0));
        let mut rank = vec![0; order.len()];
        for (k, &p) in order.iter().enumerate() {
            rank[p] = k;
        }
        let out: Vec<Value> = order
            .iter()
            .map(|&p| {
                let anchor = geo.piece_circles(p)[0];
                let nest = t.circles()[anchor].nest.map(|n| {
                    json!({
                        "parent": rank[geo.piece_of(n.parent.circle)],
                        "parent_face": face_name(n.parent),
                        "facing": face_name(n.facing),
                    })
                });
                let outer = t.outer().filter(|o| geo.piece_of(o.circle) == p).map(face_name);
                json!({"code": labelled[p].0, "nest": nest, "outer_face": outer})
            })
            .collect();
        json!({ "pieces": out })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Diagram {
        Diagram::parse_braid(s).unwrap()
    }

    #[test]
    fn stats_of_closures() {
        let st = d("1 1 1").stats();
        assert_eq!((st.s, st.writhe, st.crossing_count, st.component_count), (2, 3, 3, 1));
        assert_eq!(d("1 -1").stats().component_count, 2);
        assert_eq!(d("1 -1").stats().writhe, 0);
        let st = d("-2 -3 -2 1 -2 1 -3 -2 1").stats();
        assert_eq!((st.s, st.writhe, st.crossing_count), (4, -3, 9));
        assert_eq!(d("1 1").stats().component_count, 2);
        assert_eq!(Diagram::from_braid(&BraidWord::parse_with_strands("", Some(3)).unwrap()).stats().component_count, 3);
    }

    #[test]
    fn every_crossing_visited_twice() {
        for w in ["1 1 1", "1 -2 1 -2", "-2 -3 -2 1 -2 1 -3 -2 1", "1 1", ""] {
            let dg = d(w);
            let st = State::identity(dg.crossing_count());
            let comps = dg.components();
            let mut count = vec![0; dg.crossing_count()];
            for k in 0..comps.count {
                let first = comps.segments_of(k)[0];
                for v in dg.walk(&st, first).visits {
                    count[v.crossing] += 1;
                }
            }
            assert!(count.iter().all(|&c| c == 2), "{w}");
        }
    }

    #[test]
    fn over_and_under_alternate_per_crossing() {
        let dg = d("1 -2 1 3");
        let st = State::identity(dg.crossing_count());
        let mut roles: BTreeMap<usize, Vec<bool>> = BTreeMap::new();
        let comps = dg.components();
        for k in 0..comps.count {
            for v in dg.walk(&st, comps.segments_of(k)[0]).visits {
                roles.entry(v.crossing).or_default().push(v.over);
            }
        }
        assert!(roles.values().all(|r| r.len() == 2 && r[0] != r[1]));
    }

    #[test]
    fn surgery_stats() {
        let dg = d("1 1 1");
        let sm = dg.smooth_crossing(0).unwrap();
        assert_eq!(sm.braid_word().unwrap().to_string(), "1 1");
        assert_eq!(sm.stats().component_count, 2);
        assert_eq!(dg.flip_crossing(0).unwrap().writhe(), 1);
        assert_eq!(dg.smooth_crossing(5), Err(Error::UnknownCrossing(5)));
        assert_eq!(d("1 1").double_crossing(0).unwrap().braid_word().unwrap().to_string(), "1 1 1");
        assert_eq!(dg.mirror(), d("-1 -1 -1"));
        assert_eq!(dg.mirror().mirror(), dg);
        assert_eq!(dg.reverse().reverse(), dg);
    }

    #[test]
    fn monotone_paths() {
        let dg = d("1");
        for x in 0..dg.segment_count() {
            let desc = dg.monotone_path(x, Monotone::Descending).unwrap().terminal == Terminal::Closed;
            let asc = dg.monotone_path(x, Monotone::Ascending).unwrap().terminal == Terminal::Closed;
            assert!(desc != asc);
        }
        let dg = d("1 1 1");
        // from the inner circle the strand enters the first crossing low; positive, co-oriented: under
        let p = dg.monotone_path(0, Monotone::Descending).unwrap();
        assert_eq!(p.terminal, Terminal::Crossing(0));
    }

    #[test]
    fn seifert_picture_and_innermost() {
        let dg = d("1 1 1");
        let pic = dg.seifert_smooth();
        assert_eq!(pic.circles.len(), 2);
        assert!(pic.circles.iter().all(|c| c.clockwise));
        assert_eq!(pic.circles[0].parent, Some(1));
        assert_eq!(dg.innermost_circles(), vec![0, 1]);
        assert_eq!(d("1 2").innermost_circles(), vec![0, 2]);
        assert_eq!(dg.smooth_crossing(1).unwrap().seifert_smooth(), dg.seifert_smooth().clone_without_joins(2));
        assert_eq!(dg.reflect().circle_orientation(0).unwrap(), Orientation::Counterclockwise);
    }

    impl SeifertPicture {
        fn clone_without_joins(&self, keep: usize) -> SeifertPicture {
            SeifertPicture { circles: self.circles.clone(), joins: self.joins[..keep].to_vec() }
        }
    }

    #[test]
    fn euler_and_hash() {
        for w in ["1 1 1", "1 -2 3 -2", "", "1 1"] {
            let dg = d(w);
            assert!(dg.euler_valid(), "{w}");
            assert!(dg.smooth_crossing(0).map(|x| x.euler_valid()).unwrap_or(true));
        }
        assert_eq!(d("1 1 1").canonical_hash(), d("1 1 1").canonical_hash());
        assert_ne!(d("1 1 1").canonical_hash(), d("-1 -1 -1").canonical_hash());
        // relabeling the generators by conjugating with a rotation leaves the map unchanged
        assert_eq!(d("1 2").canonical_hash(), d("1 2").reverse().reverse().canonical_hash());
    }

    #[test]
    fn pd_of_trefoil() {
        let pd = d("1 1 1").pd_code();
        assert_eq!(pd.crossings.len(), 3);
        assert_eq!(pd.labels, 6);
        assert_eq!(pd.free_loops, 0);
        let pd = Diagram::from_braid(&BraidWord::parse_with_strands("1", Some(3)).unwrap()).pd_code();
        assert_eq!(pd.free_loops, 1);
    }
}
