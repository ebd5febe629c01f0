//! Link templates: oriented circles, oriented arcs meeting them, and the
//! braid placements that fill each arc's box.
//!
//! A circle's segment `s` runs from its `s`-th incidence to the next one in
//! cyclic order; a circle without incidences has the single segment `0`.
//! Two local bits describe each incidence: `side_change` (the arc passes
//! through the circle) and `co_orient` (the arc direction is the circle
//! direction turned a quarter counterclockwise).
//!
//! Templates may fall apart into several pieces (connected components of
//! circles joined by arcs). One piece carries the outer face; every other
//! piece records which face of another piece it sits in and which of its own
//! faces looks back at that parent.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::braid::{BraidWord, Letter};
use crate::error::{Error, Result};
use crate::map::{PlanarMap, UnionFind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IncidenceKind {
    Endpoint,
    Transversal,
}

/// The face on one side of a circle segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FaceRef {
    pub circle: usize,
    pub segment: usize,
    pub side: Side,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Nest {
    pub parent: FaceRef,
    pub facing: FaceRef,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Incidence {
    pub circle: usize,
    pub arc: usize,
    pub kind: IncidenceKind,
    pub side_change: bool,
    pub co_orient: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Circle {
    pub incidences: Vec<usize>,
    pub nest: Option<Nest>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArcDef {
    pub name: String,
    pub incidences: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Template {
    circles: Vec<Circle>,
    arcs: Vec<ArcDef>,
    incidences: Vec<Incidence>,
    outer: Option<FaceRef>,
    circle_pos: Vec<usize>,
    arc_pos: Vec<usize>,
}

impl Template {
    /// Assembles a template, checking only that all cross references agree.
    pub fn from_parts(
        circles: Vec<Circle>,
        arcs: Vec<ArcDef>,
        incidences: Vec<Incidence>,
        outer: Option<FaceRef>,
    ) -> Result<Template> {
        let bad = |m: String| Err(Error::Template(m));
        let mut circle_pos = vec![usize::MAX; incidences.len()];
        let mut arc_pos = vec![usize::MAX; incidences.len()];
        for (c, circle) in circles.iter().enumerate() {
            for (k, &v) in circle.incidences.iter().enumerate() {
                if v >= incidences.len() || incidences[v].circle != c || circle_pos[v] != usize::MAX {
                    return bad(format!("incidence {v} is misplaced on circle {c}"));
                }
                circle_pos[v] = k;
            }
        }
        for (a, arc) in arcs.iter().enumerate() {
            for (k, &v) in arc.incidences.iter().enumerate() {
                if v >= incidences.len() || incidences[v].arc != a || arc_pos[v] != usize::MAX {
                    return bad(format!("incidence {v} is misplaced on arc {}", arc.name));
                }
                arc_pos[v] = k;
            }
        }
        if let Some(v) = (0..incidences.len()).find(|&v| circle_pos[v] == usize::MAX || arc_pos[v] == usize::MAX) {
            return bad(format!("incidence {v} is not listed on its circle and arc"));
        }
        let names: BTreeSet<&str> = arcs.iter().map(|a| a.name.as_str()).collect();
        if names.len() != arcs.len() {
            return bad("duplicate arc id".into());
        }
        let t = Template { circles, arcs, incidences, outer, circle_pos, arc_pos };
        let refs = t.outer.iter().copied().chain(t.circles.iter().filter_map(|c| c.nest).flat_map(|n| [n.parent, n.facing]));
        for f in refs {
            if f.circle >= t.circles.len() || f.segment >= t.segment_count(f.circle) {
                return bad(format!("face reference to missing segment {}:{}", f.circle, f.segment));
            }
        }
        if t.outer.is_none() && !t.circles.is_empty() {
            return bad("missing outer face".into());
        }
        Ok(t)
    }

    /// The template with no circles, carrying the empty diagram.
    pub fn empty() -> Template {
        Template::from_parts(vec![], vec![], vec![], None).expect("empty template")
    }

    /// A single crossingless circle, clockwise when `clockwise` holds.
    pub fn unknot(clockwise: bool) -> Template {
        let side = if clockwise { Side::Left } else { Side::Right };
        let outer = FaceRef { circle: 0, segment: 0, side };
        Template::from_parts(vec![Circle::default()], vec![], vec![], Some(outer)).expect("unknot template")
    }

    pub fn circles(&self) -> &[Circle] {
        &self.circles
    }

    pub fn arcs(&self) -> &[ArcDef] {
        &self.arcs
    }

    pub fn incidences(&self) -> &[Incidence] {
        &self.incidences
    }

    pub fn outer(&self) -> Option<FaceRef> {
        self.outer
    }

    pub fn circle_count(&self) -> usize {
        self.circles.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arc_index(&self, name: &str) -> Option<usize> {
        self.arcs.iter().position(|a| a.name == name)
    }

    /// `‖a‖`, the number of circles the arc meets.
    pub fn arc_len(&self, a: usize) -> usize {
        self.arcs[a].incidences.len()
    }

    pub fn segment_count(&self, c: usize) -> usize {
        self.circles[c].incidences.len().max(1)
    }

    /// Incidence where segment `s` of circle `c` starts.
    pub fn segment_start(&self, c: usize, s: usize) -> Option<usize> {
        self.circles[c].incidences.get(s).copied()
    }

    /// Incidence where segment `s` of circle `c` ends.
    pub fn segment_end(&self, c: usize, s: usize) -> Option<usize> {
        let inc = &self.circles[c].incidences;
        (!inc.is_empty()).then(|| inc[(s + 1) % inc.len()])
    }

    /// Segment of the incidence's circle that starts at `v`.
    pub fn segment_after(&self, v: usize) -> usize {
        self.circle_pos[v]
    }

    /// Segment of the incidence's circle that ends at `v`.
    pub fn segment_before(&self, v: usize) -> usize {
        let len = self.circles[self.incidences[v].circle].incidences.len();
        (self.circle_pos[v] + len - 1) % len
    }

    /// One-based position of the incidence along its arc.
    pub fn arc_position(&self, v: usize) -> usize {
        self.arc_pos[v] + 1
    }

    /// Incidence at one-based position `p` of arc `a`.
    pub fn incidence_at(&self, a: usize, p: usize) -> usize {
        self.arcs[a].incidences[p - 1]
    }

    pub fn circle_at(&self, a: usize, p: usize) -> usize {
        self.incidences[self.incidence_at(a, p)].circle
    }

    pub fn co_orient(&self, a: usize) -> bool {
        self.incidences[self.arcs[a].incidences[0]].co_orient
    }

    /// Global segment numbering: circles in order, segments in order.
    pub fn segment_ids(&self) -> Vec<(usize, usize)> {
        (0..self.circles.len()).flat_map(|c| (0..self.segment_count(c)).map(move |s| (c, s))).collect()
    }

    /// Pieces as sorted circle lists, ordered by their smallest circle.
    pub fn pieces(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.circles.len());
        for arc in &self.arcs {
            for w in arc.incidences.windows(2) {
                uf.union(self.incidences[w[0]].circle, self.incidences[w[1]].circle);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for c in 0..self.circles.len() {
            groups.entry(uf.find(c)).or_default().push(c);
        }
        groups.into_values().collect()
    }

    /// Every unordered pair of circles shares at most one arc.
    pub fn is_knitted(&self) -> bool {
        let mut seen = BTreeSet::new();
        for arc in &self.arcs {
            let cs: BTreeSet<usize> = arc.incidences.iter().map(|&v| self.incidences[v].circle).collect();
            for &x in &cs {
                for &y in cs.range(x + 1..) {
                    if !seen.insert((x, y)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Reverses every circle and arc.
    pub fn reversed(&self) -> Template {
        let flip_ref = |f: FaceRef, t: &Template| {
            let m = t.circles[f.circle].incidences.len();
            let segment = if m == 0 { 0 } else { (2 * m - 2 - f.segment) % m };
            FaceRef { circle: f.circle, segment, side: f.side.flip() }
        };
        let circles = self
            .circles
            .iter()
            .map(|c| Circle {
                incidences: c.incidences.iter().rev().copied().collect(),
                nest: c.nest.map(|n| Nest { parent: flip_ref(n.parent, self), facing: flip_ref(n.facing, self) }),
            })
            .collect();
        let arcs = self
            .arcs
            .iter()
            .map(|a| ArcDef { name: a.name.clone(), incidences: a.incidences.iter().rev().copied().collect() })
            .collect();
        let outer = self.outer.map(|f| flip_ref(f, self));
        Template::from_parts(circles, arcs, self.incidences.clone(), outer).expect("reversal keeps references")
    }

    /// Reflects the plane: every local picture is mirrored.
    pub fn reflected(&self) -> Template {
        let flip = |f: FaceRef| FaceRef { side: f.side.flip(), ..f };
        let circles = self
            .circles
            .iter()
            .map(|c| Circle {
                incidences: c.incidences.clone(),
                nest: c.nest.map(|n| Nest { parent: flip(n.parent), facing: flip(n.facing) }),
            })
            .collect();
        let incidences = self.incidences.iter().map(|i| Incidence { co_orient: !i.co_orient, ..*i }).collect();
        Template::from_parts(circles, self.arcs.clone(), incidences, self.outer.map(flip)).expect("reflection keeps references")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let file = TemplateFile {
            circles: self
                .circles
                .iter()
                .enumerate()
                .map(|(id, c)| CircleRecord { id, incidences: c.incidences.clone(), nest: c.nest })
                .collect(),
            arcs: self
                .arcs
                .iter()
                .map(|a| ArcRecord { id: a.name.clone(), incidences: a.incidences.clone() })
                .collect(),
            incidences: self
                .incidences
                .iter()
                .enumerate()
                .map(|(id, i)| IncidenceRecord {
                    id,
                    circle: i.circle,
                    arc: self.arcs[i.arc].name.clone(),
                    kind: i.kind,
                    side_change: i.side_change,
                    co_orient: i.co_orient,
                })
                .collect(),
            outer_face: self.outer,
        };
        serde_json::to_value(file).expect("template serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("template serializes")
    }

    /// Reads the JSON template format; ids are arbitrary but must be unique.
    pub fn from_json(text: &str) -> Result<Template> {
        let file: TemplateFile = serde_json::from_str(text).map_err(|e| Error::Template(e.to_string()))?;
        let circle_ix: HashMap<usize, usize> = file.circles.iter().enumerate().map(|(k, c)| (c.id, k)).collect();
        let inc_ix: HashMap<usize, usize> = file.incidences.iter().enumerate().map(|(k, i)| (i.id, k)).collect();
        let arc_ix: HashMap<&str, usize> = file.arcs.iter().enumerate().map(|(k, a)| (a.id.as_str(), k)).collect();
        if circle_ix.len() != file.circles.len() || inc_ix.len() != file.incidences.len() {
            return Err(Error::Template("duplicate circle or incidence id".into()));
        }
        let lookup = |m: &HashMap<usize, usize>, id: usize, what: &str| {
            m.get(&id).copied().ok_or_else(|| Error::Template(format!("unknown {what} id {id}")))
        };
        let face = |f: FaceRef| -> Result<FaceRef> { Ok(FaceRef { circle: lookup(&circle_ix, f.circle, "circle")?, ..f }) };
        let incidences = file
            .incidences
            .iter()
            .map(|i| {
                Ok(Incidence {
                    circle: lookup(&circle_ix, i.circle, "circle")?,
                    arc: *arc_ix.get(i.arc.as_str()).ok_or_else(|| Error::Template(format!("unknown arc id {}", i.arc)))?,
                    kind: i.kind,
                    side_change: i.side_change,
                    co_orient: i.co_orient,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let circles = file
            .circles
            .iter()
            .map(|c| {
                Ok(Circle {
                    incidences: c.incidences.iter().map(|&v| lookup(&inc_ix, v, "incidence")).collect::<Result<_>>()?,
                    nest: c.nest.map(|n| Ok::<_, Error>(Nest { parent: face(n.parent)?, facing: face(n.facing)? })).transpose()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let arcs = file
            .arcs
            .iter()
            .map(|a| {
                Ok(ArcDef {
                    name: a.id.clone(),
                    incidences: a.incidences.iter().map(|&v| lookup(&inc_ix, v, "incidence")).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let outer = file.outer_face.map(face).transpose()?;
        Template::from_parts(circles, arcs, incidences, outer)
    }
}

#[derive(Serialize, Deserialize)]
struct TemplateFile {
    circles: Vec<CircleRecord>,
    arcs: Vec<ArcRecord>,
    incidences: Vec<IncidenceRecord>,
    outer_face: Option<FaceRef>,
}

#[derive(Serialize, Deserialize)]
struct CircleRecord {
    id: usize,
    incidences: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nest: Option<Nest>,
}

#[derive(Serialize, Deserialize)]
struct ArcRecord {
    id: String,
    incidences: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct IncidenceRecord {
    id: usize,
    circle: usize,
    arc: String,
    kind: IncidenceKind,
    side_change: bool,
    co_orient: bool,
}

/// Braid words assigned to arcs by name.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Placement {
    words: BTreeMap<String, BraidWord>,
}

impl Placement {
    pub fn new() -> Placement {
        Placement::default()
    }

    pub fn insert(&mut self, arc: impl Into<String>, word: BraidWord) {
        self.words.insert(arc.into(), word);
    }

    pub fn get(&self, arc: &str) -> Option<&BraidWord> {
        self.words.get(arc)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BraidWord)> {
        self.words.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn from_json(text: &str) -> Result<Placement> {
        let raw: BTreeMap<String, String> = serde_json::from_str(text).map_err(|e| Error::Template(e.to_string()))?;
        let words = raw
            .into_iter()
            .map(|(k, v)| Ok((k, BraidWord::parse(&v)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Placement { words })
    }

    pub fn to_json(&self) -> String {
        let raw: BTreeMap<&str, String> = self.words.iter().map(|(k, v)| (k.as_str(), v.to_string())).collect();
        serde_json::to_string_pretty(&raw).expect("placement serializes")
    }

    /// Words aligned with the template's arcs, each on `‖a‖` strands.
    pub fn aligned(&self, t: &Template) -> Result<Vec<BraidWord>> {
        if let Some(v) = validate(t, self).into_iter().next() {
            return Err(Error::Template(v.to_string()));
        }
        Ok(t.arcs
            .iter()
            .enumerate()
            .map(|(a, arc)| {
                let n = t.arc_len(a);
                match self.words.get(&arc.name) {
                    Some(w) => BraidWord::new(w.letters().to_vec(), n).expect("validated strand bound"),
                    None => BraidWord::new(vec![], n).expect("empty word"),
                }
            })
            .collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    ArcCircleMultiplicity,
    StrandBound,
    ArcLength,
    IncidenceKind,
    OrientationClash,
    UnknownArc,
    Planarity,
    OuterFace,
    Nesting,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::ArcCircleMultiplicity => "arc–circle multiplicity",
            ViolationKind::StrandBound => "strand bound",
            ViolationKind::ArcLength => "arc length",
            ViolationKind::IncidenceKind => "incidence kind",
            ViolationKind::OrientationClash => "orientation clash",
            ViolationKind::UnknownArc => "unknown arc",
            ViolationKind::Planarity => "planarity",
            ViolationKind::OuterFace => "outer face",
            ViolationKind::Nesting => "nesting",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.detail)
    }
}

fn violation(kind: ViolationKind, detail: impl Into<String>) -> Violation {
    Violation { kind, detail: detail.into() }
}

/// Lists every violated template or placement invariant.
pub fn validate(t: &Template, pi: &Placement) -> Vec<Violation> {
    let mut out = Vec::new();
    for (a, arc) in t.arcs.iter().enumerate() {
        let len = arc.incidences.len();
        if len < 2 {
            out.push(violation(ViolationKind::ArcLength, format!("arc {} meets {len} circles", arc.name)));
        }
        let mut seen = BTreeSet::new();
        for (k, &v) in arc.incidences.iter().enumerate() {
            let inc = &t.incidences[v];
            if !seen.insert(inc.circle) {
                out.push(violation(
                    ViolationKind::ArcCircleMultiplicity,
                    format!("arc {} meets circle {} more than once", arc.name, inc.circle),
                ));
            }
            let want = if k == 0 || k + 1 == len { IncidenceKind::Endpoint } else { IncidenceKind::Transversal };
            if inc.kind != want || inc.side_change != (inc.kind == IncidenceKind::Transversal) {
                out.push(violation(ViolationKind::IncidenceKind, format!("incidence {v} on arc {}", arc.name)));
            }
            if inc.co_orient != t.co_orient(a) {
                out.push(violation(
                    ViolationKind::OrientationClash,
                    format!("strands through the box of arc {} are not co-oriented", arc.name),
                ));
            }
        }
    }
    for (name, w) in pi.iter() {
        match t.arc_index(name) {
            None => out.push(violation(ViolationKind::UnknownArc, format!("placement names missing arc {name}"))),
            Some(a) => {
                let bound = t.arc_len(a).saturating_sub(1);
                if let Some(l) = w.letters().iter().find(|l| l.index() > bound) {
                    out.push(violation(
                        ViolationKind::StrandBound,
                        format!("letter {l} on arc {name} exceeds σ_{bound}"),
                    ));
                }
            }
        }
    }
    if out.is_empty() {
        if let Err(v) = Geometry::build(t) {
            out.push(v);
        }
    }
    out
}

pub(crate) struct PieceMap {
    pub(crate) map: PlanarMap,
    /// Edge of each segment, per circle of the piece.
    pub(crate) seg_edge: HashMap<usize, Vec<usize>>,
}

struct Piece {
    circles: Vec<usize>,
    map: Option<PieceMap>,
    parent: Option<(usize, usize)>,
    facing: usize,
}

/// Planar data derived from a template: faces, sides and nesting.
pub struct Geometry {
    piece_of: Vec<usize>,
    pieces: Vec<Piece>,
    outer: Option<(usize, usize)>,
    /// `sides[x][f]` is the side of circle `x` holding face `f` of its piece.
    sides: Vec<Vec<Side>>,
}

/// Rotation at an incidence, counterclockwise.
fn incidence_rotation(co_orient: bool, arc_out: Option<usize>, circle_in: usize, arc_in: Option<usize>, circle_out: usize) -> Vec<usize> {
    let order = if co_orient {
        [arc_out, Some(circle_in), arc_in, Some(circle_out)]
    } else {
        [arc_in, Some(circle_in), arc_out, Some(circle_out)]
    };
    order.into_iter().flatten().collect()
}

pub(crate) fn build_piece_map(t: &Template, circles: &[usize]) -> Option<PieceMap> {
    let verts: Vec<usize> = circles.iter().flat_map(|&c| t.circles[c].incidences.iter().copied()).collect();
    if verts.is_empty() {
        return None;
    }
    let local: HashMap<usize, usize> = verts.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let mut edge_count = 0;
    let mut seg_edge = HashMap::new();
    for &c in circles {
        let m = t.circles[c].incidences.len();
        seg_edge.insert(c, (edge_count..edge_count + m).collect::<Vec<_>>());
        edge_count += m;
    }
    let mut arc_edge: HashMap<usize, Vec<usize>> = HashMap::new();
    let arcs: BTreeSet<usize> = verts.iter().map(|&v| t.incidences[v].arc).collect();
    for &a in &arcs {
        let m = t.arc_len(a) - 1;
        arc_edge.insert(a, (edge_count..edge_count + m).collect());
        edge_count += m;
    }
    let mut rot = vec![Vec::new(); verts.len()];
    for &v in &verts {
        let inc = t.incidences[v];
        let segs = &seg_edge[&inc.circle];
        let circle_out = 2 * segs[t.segment_after(v)];
        let circle_in = 2 * segs[t.segment_before(v)] + 1;
        let k = t.arc_pos[v];
        let ae = &arc_edge[&inc.arc];
        let arc_out = (k < ae.len()).then(|| 2 * ae[k]);
        let arc_in = (k > 0).then(|| 2 * ae[k - 1] + 1);
        rot[local[&v]] = incidence_rotation(inc.co_orient, arc_out, circle_in, arc_in, circle_out);
    }
    let map = PlanarMap::new(edge_count, &rot).expect("template rotation is consistent");
    Some(PieceMap { map, seg_edge })
}

impl Geometry {
    pub fn build(t: &Template) -> std::result::Result<Geometry, Violation> {
        let groups = t.pieces();
        let mut piece_of = vec![0; t.circles.len()];
        for (p, g) in groups.iter().enumerate() {
            for &c in g {
                piece_of[c] = p;
            }
        }
        let mut pieces: Vec<Piece> = Vec::with_capacity(groups.len());
        for g in &groups {
            let map = build_piece_map(t, g);
            if let Some(pm) = &map {
                if !pm.map.is_spherical() {
                    return Err(violation(
                        ViolationKind::Planarity,
                        format!("Euler characteristic {} on the piece of circle {}", pm.map.euler_characteristic(), g[0]),
                    ));
                }
            }
            pieces.push(Piece { circles: g.clone(), map, parent: None, facing: 0 });
        }
        let mut geo = Geometry { piece_of, pieces, outer: None, sides: vec![] };
        let Some(outer) = t.outer else {
            return Ok(geo);
        };
        let root = geo.piece_of[outer.circle];
        geo.outer = Some((root, geo.face(outer)));
        for p in 0..geo.pieces.len() {
            let anchor = geo.pieces[p].circles[0];
            let holders: Vec<usize> = geo.pieces[p].circles.iter().copied().filter(|&c| t.circles[c].nest.is_some()).collect();
            if p == root {
                if !holders.is_empty() {
                    return Err(violation(ViolationKind::Nesting, "the outer piece carries a nest record"));
                }
                continue;
            }
            if holders != [anchor] {
                return Err(violation(
                    ViolationKind::Nesting,
                    format!("piece of circle {anchor} needs exactly one nest record on that circle"),
                ));
            }
            let nest = t.circles[anchor].nest.expect("holder");
            if geo.piece_of[nest.facing.circle] != p || geo.piece_of[nest.parent.circle] == p {
                return Err(violation(ViolationKind::Nesting, format!("nest record of circle {anchor} is inconsistent")));
            }
            let parent = (geo.piece_of[nest.parent.circle], geo.face(nest.parent));
            let facing = geo.face(nest.facing);
            geo.pieces[p].parent = Some(parent);
            geo.pieces[p].facing = facing;
        }
        for start in 0..geo.pieces.len() {
            let mut p = start;
            for _ in 0..=geo.pieces.len() {
                match geo.pieces[p].parent {
                    Some((q, _)) => p = q,
                    None => break,
                }
            }
            if p != root {
                return Err(violation(ViolationKind::Nesting, "nest records do not form a tree under the outer piece"));
            }
        }
        geo.sides = (0..t.circles.len()).map(|x| geo.compute_sides(x)).collect();
        Ok(geo)
    }

    fn face(&self, f: FaceRef) -> usize {
        let piece = &self.pieces[self.piece_of[f.circle]];
        match &piece.map {
            None => match f.side {
                Side::Left => 0,
                Side::Right => 1,
            },
            Some(pm) => {
                let h = 2 * pm.seg_edge[&f.circle][f.segment];
                match f.side {
                    Side::Left => pm.map.left_face(h),
                    Side::Right => pm.map.right_face(h),
                }
            }
        }
    }

    /// Piece and face index of a face reference.
    pub fn face_of(&self, f: FaceRef) -> (usize, usize) {
        (self.piece_of[f.circle], self.face(f))
    }

    fn compute_sides(&self, x: usize) -> Vec<Side> {
        let piece = &self.pieces[self.piece_of[x]];
        match &piece.map {
            None => vec![Side::Left, Side::Right],
            Some(pm) => {
                let cut: BTreeSet<usize> = pm.seg_edge[&x].iter().copied().collect();
                let mut uf = pm.map.face_regions(|e| cut.contains(&e));
                let left = uf.find(pm.map.left_face(2 * pm.seg_edge[&x][0]));
                (0..pm.map.face_count()).map(|f| if uf.find(f) == left { Side::Left } else { Side::Right }).collect()
            }
        }
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn piece_of(&self, c: usize) -> usize {
        self.piece_of[c]
    }

    pub fn piece_circles(&self, p: usize) -> &[usize] {
        &self.pieces[p].circles
    }

    /// Face of piece `target` that contains piece `other`.
    fn face_holding(&self, target: usize, other: usize) -> usize {
        let mut q = other;
        while let Some((pp, f)) = self.pieces[q].parent {
            if pp == target {
                return f;
            }
            q = pp;
        }
        self.pieces[target].facing
    }

    /// Side of circle `x` on which the face `face` of piece `piece` lies.
    pub fn side_of_face(&self, x: usize, piece: usize, face: usize) -> Side {
        let px = self.piece_of[x];
        let f = if piece == px { face } else { self.face_holding(px, piece) };
        self.sides[x][f]
    }

    /// Side of circle `x` on which circle `y` lies.
    pub fn side_of(&self, x: usize, y: usize) -> Side {
        let py = self.piece_of[y];
        let f = match &self.pieces[py].map {
            Some(pm) if py == self.piece_of[x] => pm.map.left_face(2 * pm.seg_edge[&y][0]),
            _ => {
                if py == self.piece_of[x] {
                    0
                } else {
                    self.face_holding(self.piece_of[x], py)
                }
            }
        };
        self.sides[x][f]
    }

    /// Side of circle `x` holding the outer face.
    pub fn outer_side(&self, x: usize) -> Side {
        let (p, f) = self.outer.expect("nonempty template has an outer face");
        self.side_of_face(x, p, f)
    }

    pub fn is_clockwise(&self, x: usize) -> bool {
        self.outer_side(x) == Side::Left
    }

    /// Circles lying on side `side` of `x`.
    pub fn circles_on_side(&self, x: usize, side: Side) -> Vec<usize> {
        (0..self.piece_of.len()).filter(|&y| y != x && self.side_of(x, y) == side).collect()
    }

    /// The side away from the outer face holds no other circle.
    pub fn is_planar_innermost(&self, x: usize) -> bool {
        self.circles_on_side(x, self.outer_side(x).flip()).is_empty()
    }

    /// One side of the circle holds no other circle.
    pub fn is_innermost(&self, x: usize) -> bool {
        self.circles_on_side(x, Side::Left).is_empty() || self.circles_on_side(x, Side::Right).is_empty()
    }
}

/// Concentric clockwise circles, circle `0` innermost, with one arc running
/// outward across all of them; strands go down and return on the left.
pub fn alexander_closure(w: &BraidWord) -> (Template, Placement) {
    let n = w.strands();
    if n < 2 {
        return (Template::unknot(true), Placement::new());
    }
    let incidences = (0..n)
        .map(|c| {
            let end = c == 0 || c + 1 == n;
            Incidence {
                circle: c,
                arc: 0,
                kind: if end { IncidenceKind::Endpoint } else { IncidenceKind::Transversal },
                side_change: !end,
                co_orient: true,
            }
        })
        .collect();
    let circles = (0..n).map(|c| Circle { incidences: vec![c], nest: None }).collect();
    let arcs = vec![ArcDef { name: "a".into(), incidences: (0..n).collect() }];
    let outer = FaceRef { circle: n - 1, segment: 0, side: Side::Left };
    let t = Template::from_parts(circles, arcs, incidences, Some(outer)).expect("closure template");
    let mut pi = Placement::new();
    pi.insert("a", w.clone());
    (t, pi)
}

/// Reversed placement matching [`Template::reversed`].
pub fn reverse_placement(t: &Template, pi: &Placement) -> Placement {
    let mut out = Placement::new();
    for (name, w) in pi.iter() {
        let n = t.arc_index(name).map_or(w.strands(), |a| t.arc_len(a));
        let letters: Vec<Letter> = w
            .letters()
            .iter()
            .rev()
            .map(|l| Letter::new(n - l.index(), l.sign()))
            .collect();
        out.insert(name, BraidWord::new(letters, n.max(1)).expect("reversed letters stay in range"));
    }
    out
}

/// Splices circle `e2.circle` of `t2` into circle `e1.circle` of `t1` along
/// the given outer segments. Both outer faces must lie on the same side.
pub fn connected_sum(
    t1: &Template,
    pi1: &Placement,
    e1: (usize, usize),
    t2: &Template,
    pi2: &Placement,
    e2: (usize, usize),
) -> Result<(Template, Placement)> {
    let outer_side = |t: &Template, (c, s): (usize, usize)| -> Result<Side> {
        let geo = Geometry::build(t).map_err(|v| Error::Template(v.to_string()))?;
        if geo.piece_count() != 1 {
            return Err(Error::Precondition("connected sum needs single-piece templates".into()));
        }
        if c >= t.circle_count() || s >= t.segment_count(c) {
            return Err(Error::UnknownCircle(c));
        }
        let outer = geo.face_of(t.outer.expect("outer"));
        [Side::Left, Side::Right]
            .into_iter()
            .find(|&side| geo.face_of(FaceRef { circle: c, segment: s, side }) == outer)
            .ok_or(Error::NotOuterSegment)
    };
    let side = outer_side(t1, e1)?;
    if outer_side(t2, e2)? != side {
        return Err(Error::Precondition("orientation mismatch at the splice".into()));
    }
    let (c1, s1) = e1;
    let (c2, s2) = e2;
    let n1 = t1.circle_count();
    let v_off = t1.incidences.len();
    let a_off = t1.arcs.len();
    let mut taken: BTreeSet<String> = t1.arcs.iter().map(|a| a.name.clone()).collect();
    let mut renamed = BTreeMap::new();
    for a in &t2.arcs {
        let mut name = a.name.clone();
        while taken.contains(&name) {
            name.push('\'');
        }
        taken.insert(name.clone());
        renamed.insert(a.name.clone(), name);
    }
    // circles of t2 other than c2 follow those of t1
    let map_c2 = |c: usize| if c == c2 { c1 } else if c < c2 { n1 + c } else { n1 + c - 1 };
    let mut incidences = t1.incidences.clone();
    incidences.extend(t2.incidences.iter().map(|i| Incidence { circle: map_c2(i.circle), arc: i.arc + a_off, ..*i }));
    let rotate = |list: &[usize], s: usize| -> Vec<usize> {
        let m = list.len();
        (0..m).map(|k| list[(s + 1 + k) % m]).collect()
    };
    let mut circles: Vec<Circle> = t1.circles.clone();
    let l1 = rotate(&t1.circles[c1].incidences, s1);
    let l2: Vec<usize> = rotate(&t2.circles[c2].incidences, s2).into_iter().map(|v| v + v_off).collect();
    let m1 = l1.len();
    circles[c1] = Circle { incidences: l1.into_iter().chain(l2).collect(), nest: None };
    for (c, circle) in t2.circles.iter().enumerate() {
        if c != c2 {
            circles.push(Circle { incidences: circle.incidences.iter().map(|v| v + v_off).collect(), nest: None });
        }
    }
    let mut arcs = t1.arcs.clone();
    arcs.extend(t2.arcs.iter().map(|a| ArcDef {
        name: renamed[&a.name].clone(),
        incidences: a.incidences.iter().map(|v| v + v_off).collect(),
    }));
    let total = circles[c1].incidences.len();
    let segment = if m1 == 0 { total.saturating_sub(1) } else { m1 - 1 };
    let outer = FaceRef { circle: c1, segment, side };
    let t = Template::from_parts(circles, arcs, incidences, Some(outer))?;
    let mut pi = pi1.clone();
    for (name, w) in pi2.iter() {
        pi.insert(renamed.get(name).cloned().unwrap_or_else(|| name.to_string()), w.clone());
    }
    Ok((t, pi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closure(s: &str) -> (Template, Placement) {
        alexander_closure(&BraidWord::parse(s).unwrap())
    }

    #[test]
    fn closure_shape() {
        let (t, pi) = closure("1 1 1");
        assert_eq!((t.circle_count(), t.arc_count(), t.arc_len(0)), (2, 1, 2));
        assert!(validate(&t, &pi).is_empty());
        let w = BraidWord::parse_with_strands("", Some(3)).unwrap();
        let (t, _) = alexander_closure(&w);
        assert_eq!(t.circle_count(), 3);
        let (t, _) = closure("-2 -3 -2 1 -2 1 -3 -2 1");
        assert_eq!((t.circle_count(), t.arc_count()), (4, 1));
        assert!(t.is_knitted());
    }

    #[test]
    fn closure_circles_are_clockwise_and_reflection_flips_them() {
        let (t, _) = closure("1 2 1 3");
        let geo = Geometry::build(&t).unwrap();
        assert!((0..4).all(|c| geo.is_clockwise(c)));
        let geo = Geometry::build(&t.reflected()).unwrap();
        assert!((0..4).all(|c| !geo.is_clockwise(c)));
        let geo = Geometry::build(&t.reversed()).unwrap();
        assert!((0..4).all(|c| !geo.is_clockwise(c)));
        assert!(!Geometry::build(&Template::unknot(false)).unwrap().is_clockwise(0));
    }

    #[test]
    fn innermost_on_the_sphere() {
        let (t, _) = closure("1 2");
        let geo = Geometry::build(&t).unwrap();
        let inner: Vec<usize> = (0..3).filter(|&c| geo.is_innermost(c)).collect();
        assert_eq!(inner, vec![0, 2]);
        assert_eq!(geo.side_of(1, 0), Side::Right);
        assert_eq!(geo.side_of(1, 2), Side::Left);
    }

    #[test]
    fn violations() {
        let (t, _) = closure("1 2");
        let mut pi = Placement::new();
        pi.insert("a", BraidWord::parse("3").unwrap());
        let v = validate(&t, &pi);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind.to_string(), "strand bound");

        let incidences = vec![
            Incidence { circle: 0, arc: 0, kind: IncidenceKind::Endpoint, side_change: false, co_orient: true },
            Incidence { circle: 1, arc: 0, kind: IncidenceKind::Transversal, side_change: true, co_orient: true },
            Incidence { circle: 0, arc: 0, kind: IncidenceKind::Endpoint, side_change: false, co_orient: true },
        ];
        let circles = vec![
            Circle { incidences: vec![0, 2], nest: None },
            Circle { incidences: vec![1], nest: None },
        ];
        let arcs = vec![ArcDef { name: "a".into(), incidences: vec![0, 1, 2] }];
        let outer = FaceRef { circle: 0, segment: 0, side: Side::Left };
        let t = Template::from_parts(circles, arcs, incidences, Some(outer)).unwrap();
        let v = validate(&t, &Placement::new());
        assert!(v.iter().any(|v| v.kind.to_string() == "arc–circle multiplicity"));
    }

    #[test]
    fn knitted_detects_parallel_arcs() {
        let inc = |circle, arc| Incidence { circle, arc, kind: IncidenceKind::Endpoint, side_change: false, co_orient: true };
        let incidences = vec![inc(0, 0), inc(1, 0), inc(0, 1), inc(1, 1)];
        let circles = vec![
            Circle { incidences: vec![0, 2], nest: None },
            Circle { incidences: vec![3, 1], nest: None },
        ];
        let arcs = vec![
            ArcDef { name: "a".into(), incidences: vec![0, 1] },
            ArcDef { name: "b".into(), incidences: vec![2, 3] },
        ];
        let outer = FaceRef { circle: 1, segment: 0, side: Side::Left };
        let t = Template::from_parts(circles, arcs, incidences, Some(outer)).unwrap();
        assert!(validate(&t, &Placement::new()).is_empty(), "{:?}", validate(&t, &Placement::new()));
        assert!(!t.is_knitted());
    }

    #[test]
    fn json_round_trip() {
        let (t, pi) = closure("1 -2 1");
        let t2 = Template::from_json(&t.to_json()).unwrap();
        assert_eq!(t, t2);
        assert_eq!(Placement::from_json(&pi.to_json()).unwrap(), pi);
        assert_eq!(t.reversed().reversed(), t);
    }

    #[test]
    fn splice_of_two_closures() {
        let (t1, p1) = closure("1 1 1");
        let (t2, p2) = closure("-1 -1 -1");
        let (t, pi) = connected_sum(&t1, &p1, (1, 0), &t2, &p2, (1, 0)).unwrap();
        assert!(validate(&t, &pi).is_empty(), "{:?}", validate(&t, &pi));
        assert_eq!((t.circle_count(), t.arc_count()), (3, 2));
        assert!(t.is_knitted());
        assert_eq!(connected_sum(&t1, &p1, (0, 0), &t2, &p2, (1, 0)), Err(Error::NotOuterSegment));
        let r = t2.reversed();
        let rp = reverse_placement(&t2, &p2);
        assert!(connected_sum(&t1, &p1, (1, 0), &r, &rp, (1, 0)).is_err());
    }
}
