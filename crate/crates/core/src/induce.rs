//! Templates induced by crossing surgeries and component deletions.
//!
//! Surviving strands keep their box columns; positions close up over the
//! deleted ones and arcs left with fewer than two strands disappear. Nesting
//! of the resulting pieces is read off the faces of the old diagram map,
//! merged across everything that was deleted.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::braid::{BraidWord, Letter};
use crate::error::{Error, Result};
use crate::map::UnionFind;
use crate::planar::{Cross, Diagram, MapEdge, State};
use crate::template::{
    ArcDef, Circle, FaceRef, Geometry, Incidence, IncidenceKind, Nest, Placement, Side, Template,
};

pub struct Induced {
    pub diagram: Diagram,
    /// Old global segments making up each new global segment, in travel order.
    pub segment_origin: Vec<Vec<usize>>,
}

/// Far-commutation representative: commuting neighbours are sorted by index.
pub fn far_commutation_normal_form(letters: &[Letter]) -> Vec<Letter> {
    let mut w = letters.to_vec();
    let mut changed = true;
    while changed {
        changed = false;
        for k in 1..w.len() {
            let (x, y) = (w[k - 1].index(), w[k].index());
            if x > y + 1 {
                w.swap(k - 1, k);
                changed = true;
            }
        }
    }
    w
}

/// Applies `surgeries` (letter, mark) and deletes the listed components of
/// the surged diagram.
pub fn induce(t: &Template, pi: &Placement, surgeries: &[(usize, Cross)], deletions: &[usize]) -> Result<(Template, Placement)> {
    let d = Diagram::new(t.clone(), pi)?;
    let mut state = State::identity(d.crossing_count());
    for &(g, c) in surgeries {
        if g >= d.crossing_count() {
            return Err(Error::UnknownCrossing(g));
        }
        state.set(g, c);
    }
    let ds = d.apply(&state);
    let comps = ds.components();
    let mut deleted = vec![false; comps.count];
    for &k in deletions {
        *deleted.get_mut(k).ok_or(Error::UnknownComponent(k))? = true;
    }
    let out = induce_diagram(&ds, &deleted)?;
    Ok((out.diagram.template().clone(), out.diagram.placement()))
}

struct ArcPlan {
    top: Vec<usize>,
    bottom: Vec<usize>,
    word: Vec<Letter>,
    survives: bool,
}

#[derive(Clone, Copy)]
enum Item {
    Seg(usize),
    Inc(usize),
}

enum Loc {
    Top,
    Face(FaceRef),
}

struct NewPieceData {
    piece: usize,
    uf: UnionFind,
    anchor: usize,
    /// A face next to the piece, on the anchor side.
    near: usize,
    depth: usize,
}

/// Induces the template of `d` with the flagged components removed.
pub fn induce_diagram(d: &Diagram, deleted: &[bool]) -> Result<Induced> {
    let t = d.template();
    let comps = d.components();
    if deleted.len() != comps.count {
        return Err(Error::InvalidInput("deletion flags do not match the components".into()));
    }
    let seg_dead = |g: usize| deleted[comps.of_segment[g]];
    let entry_dead = |v: usize| seg_dead(d.segment_id(t.incidences()[v].circle, t.segment_before(v)));

    let plans: Vec<ArcPlan> = (0..t.arc_count())
        .map(|a| {
            let n = t.arc_len(a);
            let mut alive: Vec<bool> = (1..=n).map(|p| !entry_dead(t.incidence_at(a, p))).collect();
            let top: Vec<usize> = (1..=n).filter(|&p| alive[p - 1]).collect();
            let mut word = vec![];
            for l in d.words()[a].letters() {
                let i = l.index();
                if alive[i - 1] && alive[i] {
                    let rank = alive[..i - 1].iter().filter(|&&x| x).count() + 1;
                    word.push(Letter::new(rank, l.sign()));
                }
                alive.swap(i - 1, i);
            }
            let bottom: Vec<usize> = (1..=n).filter(|&p| alive[p - 1]).collect();
            let survives = top.len() >= 2;
            ArcPlan { top, bottom, word: far_commutation_normal_form(&word), survives }
        })
        .collect();

    // new arcs and their incidence ids
    let mut new_arc_of = vec![None; t.arc_count()];
    let mut arcs = vec![];
    let mut inc_of: Vec<Vec<usize>> = vec![vec![]; t.arc_count()];
    let mut incidences: Vec<Incidence> = vec![];
    for (a, plan) in plans.iter().enumerate() {
        if !plan.survives {
            continue;
        }
        let na = arcs.len();
        new_arc_of[a] = Some(na);
        let k = plan.top.len();
        let co = t.co_orient(a);
        for j in 0..k {
            let end = j == 0 || j + 1 == k;
            inc_of[a].push(incidences.len());
            incidences.push(Incidence {
                circle: usize::MAX,
                arc: na,
                kind: if end { IncidenceKind::Endpoint } else { IncidenceKind::Transversal },
                side_change: !end,
                co_orient: co,
            });
        }
        arcs.push(ArcDef { name: t.arcs()[a].name.clone(), incidences: inc_of[a].clone() });
    }

    // thread the new circles
    let mut visited = vec![false; d.segment_count()];
    let mut circles: Vec<Circle> = vec![];
    let mut chains: Vec<Vec<Vec<usize>>> = vec![];
    let mut new_circle_of_seg = vec![usize::MAX; d.segment_count()];
    for start in 0..d.segment_count() {
        if visited[start] || seg_dead(start) {
            continue;
        }
        let mut items = vec![];
        let mut g = start;
        loop {
            visited[g] = true;
            items.push(Item::Seg(g));
            let (c, s) = d.segment(g);
            let Some(v) = t.segment_end(c, s) else {
                break;
            };
            let a = t.incidences()[v].arc;
            let p = t.arc_position(v);
            let plan = &plans[a];
            let j = plan.top.iter().position(|&x| x == p).ok_or_else(|| Error::Invariant("live strand lost in a box".into()))?;
            if plan.survives {
                items.push(Item::Inc(inc_of[a][j]));
            }
            let exit = t.incidence_at(a, plan.bottom[j]);
            g = d.segment_id(t.incidences()[exit].circle, t.segment_after(exit));
            if g == start {
                break;
            }
        }
        if let Some(first) = items.iter().position(|i| matches!(i, Item::Inc(_))) {
            items.rotate_left(first);
        }
        let nc = circles.len();
        let mut incs = vec![];
        let mut chain: Vec<Vec<usize>> = vec![];
        for item in items {
            match item {
                Item::Inc(v) => {
                    incidences[v].circle = nc;
                    incs.push(v);
                    chain.push(vec![]);
                }
                Item::Seg(g) => {
                    if chain.is_empty() {
                        chain.push(vec![]);
                    }
                    chain.last_mut().expect("open segment").push(g);
                    new_circle_of_seg[g] = nc;
                }
            }
        }
        circles.push(Circle { incidences: incs, nest: None });
        chains.push(chain);
    }

    // pieces of the new template, ordered by their least circle
    let mut uf = UnionFind::new(circles.len());
    for arc in &arcs {
        for w in arc.incidences.windows(2) {
            uf.union(incidences[w[0]].circle, incidences[w[1]].circle);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for c in 0..circles.len() {
        groups.entry(uf.find(c)).or_default().push(c);
    }
    let groups: Vec<Vec<usize>> = groups.into_values().collect();
    let mut piece_of_circle = vec![0; circles.len()];
    for (p, g) in groups.iter().enumerate() {
        for &c in g {
            piece_of_circle[c] = p;
        }
    }

    let outer = if circles.is_empty() {
        None
    } else {
        let nests = place_pieces(d, &seg_dead, &plans, &new_arc_of, &inc_of, &incidences, &chains, &new_circle_of_seg, &piece_of_circle, groups.len())?;
        let (outer, nest_list) = nests;
        for (p, nest) in nest_list {
            circles[groups[p][0]].nest = Some(nest);
        }
        Some(outer)
    };

    let template = Template::from_parts(circles, arcs, incidences, outer)?;
    let geometry = Geometry::build(&template).map_err(|v| Error::Invariant(format!("induced template: {v}")))?;
    let words = plans
        .iter()
        .filter(|p| p.survives)
        .map(|p| BraidWord::new(p.word.clone(), p.top.len()))
        .collect::<Result<Vec<_>>>()?;
    let segment_origin = chains.into_iter().flatten().collect();
    let diagram = Diagram::assemble(Arc::new(template), Arc::new(geometry), words);
    Ok(Induced { diagram, segment_origin })
}

#[allow(clippy::too_many_arguments)]
fn place_pieces(
    d: &Diagram,
    seg_dead: &dyn Fn(usize) -> bool,
    plans: &[ArcPlan],
    new_arc_of: &[Option<usize>],
    inc_of: &[Vec<usize>],
    incidences: &[Incidence],
    chains: &[Vec<Vec<usize>>],
    new_circle_of_seg: &[usize],
    piece_of_circle: &[usize],
    piece_count: usize,
) -> Result<(FaceRef, Vec<(usize, Nest)>)> {
    let t = d.template();
    let geo = d.geometry();
    let dm = d.diagram_map();
    let old_pieces = geo.piece_count();

    // per old mapped piece: new pieces with their face partitions
    let mut data: Vec<Vec<NewPieceData>> = (0..old_pieces).map(|_| vec![]).collect();
    let mut wall_piece_cache: Vec<Vec<Option<usize>>> = vec![];
    for p in 0..old_pieces {
        let Some(ix) = dm.piece_index[p] else {
            wall_piece_cache.push(vec![]);
            continue;
        };
        let piece = &dm.pieces[ix];
        let wall_piece: Vec<Option<usize>> = piece
            .edges
            .iter()
            .map(|e| match *e {
                MapEdge::Strand { entry, .. } => {
                    let g = d.segment_id(t.incidences()[entry].circle, t.segment_before(entry));
                    (!seg_dead(g)).then(|| piece_of_circle[new_circle_of_seg[g]])
                }
                MapEdge::Arc { arc, k } => {
                    let plan = &plans[arc];
                    let inside = plan.survives && plan.top[0] <= k + 1 && k + 2 <= *plan.top.last().expect("alive");
                    inside.then(|| {
                        let na = new_arc_of[arc].expect("surviving arc");
                        let _ = na;
                        piece_of_circle[incidences[inc_of[arc][0]].circle]
                    })
                }
            })
            .collect();
        let anchor_ref = if Some(p) == t.outer().map(|o| geo.piece_of(o.circle)) {
            t.outer().expect("outer")
        } else {
            t.circles()[geo.piece_circles(p)[0]].nest.expect("nested piece").facing
        };
        let (_, anchor_face) = dm.face_of(d, anchor_ref).expect("mapped piece");
        let present: BTreeSet<usize> = wall_piece.iter().flatten().copied().collect();
        let mut list = vec![];
        for np in present {
            let mut uf = piece.map.face_regions(|e| wall_piece[e] == Some(np));
            let anchor = uf.find(anchor_face);
            let near = piece
                .segment_edge
                .values()
                .filter(|&&e| wall_piece[e] == Some(np))
                .flat_map(|&e| [piece.map.left_face(2 * e), piece.map.right_face(2 * e)])
                .find(|&f| uf.find(f) == anchor)
                .ok_or_else(|| Error::Invariant("piece without a face toward its anchor".into()))?;
            list.push(NewPieceData { piece: np, uf, anchor, near, depth: 0 });
        }
        for k in 0..list.len() {
            let near = list[k].near;
            let depth = (0..list.len())
                .filter(|&j| j != k)
                .filter(|&j| {
                    let a = list[j].anchor;
                    list[j].uf.find(near) != a
                })
                .count();
            list[k].depth = depth;
        }
        data[p] = list;
        wall_piece_cache.push(wall_piece);
    }

    // face reference for a face class of a new piece built from old piece p
    let face_ref = |p: usize, k: usize, face: usize, data: &mut Vec<Vec<NewPieceData>>| -> Result<FaceRef> {
        let piece = &dm.pieces[dm.piece_index[p].expect("mapped")];
        let target_piece = data[p][k].piece;
        let target = data[p][k].uf.find(face);
        for (nc, chain) in chains.iter().enumerate() {
            if piece_of_circle[nc] != target_piece {
                continue;
            }
            for (ns, olds) in chain.iter().enumerate() {
                for &g in olds {
                    let Some(&e) = piece.segment_edge.get(&d.segment(g)) else {
                        continue;
                    };
                    for side in [Side::Left, Side::Right] {
                        let f = match side {
                            Side::Left => piece.map.left_face(2 * e),
                            Side::Right => piece.map.right_face(2 * e),
                        };
                        if data[p][k].uf.find(f) == target {
                            return Ok(FaceRef { circle: nc, segment: ns, side });
                        }
                    }
                }
            }
        }
        Err(Error::Invariant("no segment bounds an induced face".into()))
    };

    let lone_new_circle = |c_old: usize| -> Option<usize> {
        let g = d.segment_id(c_old, 0);
        (!seg_dead(g)).then(|| new_circle_of_seg[g])
    };

    // locate a face of old piece p, skipping the new piece `skip`
    fn locate(
        p: usize,
        face: usize,
        skip: Option<usize>,
        d: &Diagram,
        data: &mut Vec<Vec<NewPieceData>>,
        face_ref: &dyn Fn(usize, usize, usize, &mut Vec<Vec<NewPieceData>>) -> Result<FaceRef>,
        lone_new_circle: &dyn Fn(usize) -> Option<usize>,
        dm: &crate::planar::DiagramMap,
    ) -> Result<Loc> {
        let t = d.template();
        let geo = d.geometry();
        if dm.piece_index[p].is_none() {
            let c = geo.piece_circles(p)[0];
            if let Some(nc) = lone_new_circle(c) {
                let side = if face == 0 { Side::Left } else { Side::Right };
                return Ok(Loc::Face(FaceRef { circle: nc, segment: 0, side }));
            }
        } else {
            let mut best: Option<usize> = None;
            for k in 0..data[p].len() {
                if Some(data[p][k].piece) == skip {
                    continue;
                }
                let a = data[p][k].anchor;
                if data[p][k].uf.find(face) != a && best.map_or(true, |b| data[p][k].depth > data[p][b].depth) {
                    best = Some(k);
                }
            }
            if let Some(k) = best {
                return Ok(Loc::Face(face_ref(p, k, face, data)?));
            }
        }
        let anchor = geo.piece_circles(p)[0];
        match t.circles()[anchor].nest {
            None => Ok(Loc::Top),
            Some(nest) => {
                let (q, qf) = match dm.face_of(d, nest.parent) {
                    Some((_, f)) => (geo.piece_of(nest.parent.circle), f),
                    None => (geo.piece_of(nest.parent.circle), if nest.parent.side == Side::Left { 0 } else { 1 }),
                };
                locate(q, qf, None, d, data, face_ref, lone_new_circle, dm)
            }
        }
    }

    let mut placed: Vec<Option<(Loc, FaceRef)>> = (0..piece_count).map(|_| None).collect();
    for p in 0..old_pieces {
        if dm.piece_index[p].is_none() {
            let c = geo.piece_circles(p)[0];
            let Some(nc) = lone_new_circle(c) else {
                continue;
            };
            let (loc, facing_side) = match t.circles()[c].nest {
                None => (Loc::Top, t.outer().expect("outer").side),
                Some(nest) => {
                    let (q, qf) = match dm.face_of(d, nest.parent) {
                        Some((_, f)) => (geo.piece_of(nest.parent.circle), f),
                        None => (geo.piece_of(nest.parent.circle), if nest.parent.side == Side::Left { 0 } else { 1 }),
                    };
                    (locate(q, qf, None, d, &mut data, &face_ref, &lone_new_circle, &dm)?, nest.facing.side)
                }
            };
            placed[piece_of_circle[nc]] = Some((loc, FaceRef { circle: nc, segment: 0, side: facing_side }));
            continue;
        }
        for k in 0..data[p].len() {
            let np = data[p][k].piece;
            let near = data[p][k].near;
            let anchor = data[p][k].anchor;
            let loc = locate(p, near, Some(np), d, &mut data, &face_ref, &lone_new_circle, &dm)?;
            let facing = face_ref(p, k, anchor, &mut data)?;
            placed[np] = Some((loc, facing));
        }
    }
    let placed: Vec<(Loc, FaceRef)> = placed
        .into_iter()
        .map(|x| x.ok_or_else(|| Error::Invariant("induced piece was not placed".into())))
        .collect::<Result<_>>()?;
    let root = placed
        .iter()
        .position(|(loc, _)| matches!(loc, Loc::Top))
        .ok_or_else(|| Error::Invariant("no induced piece reaches the outer face".into()))?;
    let outer = placed[root].1;
    let nests = placed
        .into_iter()
        .enumerate()
        .filter(|&(p, _)| p != root)
        .map(|(p, (loc, facing))| {
            let parent = match loc {
                Loc::Top => outer,
                Loc::Face(f) => f,
            };
            (p, Nest { parent, facing })
        })
        .collect();
    Ok((outer, nests))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alexander_closure;

    fn closure(s: &str) -> (Template, Placement) {
        alexander_closure(&BraidWord::parse(s).unwrap())
    }

    #[test]
    fn identity_induction() {
        let (t, pi) = closure("1 -2 1 3");
        let (t2, pi2) = induce(&t, &pi, &[], &[]).unwrap();
        assert_eq!(t2, t);
        assert_eq!(pi2, pi);
    }

    #[test]
    fn hopf_smoothed_then_deleted() {
        let (t, pi) = closure("1 1");
        let (t2, pi2) = induce(&t, &pi, &[(0, Cross::Smooth), (1, Cross::Smooth)], &[0]).unwrap();
        assert_eq!((t2.circle_count(), t2.arc_count()), (1, 0));
        let d = Diagram::new(t2, &pi2).unwrap();
        assert_eq!(d.stats().component_count, 1);
    }

    #[test]
    fn deleting_a_middle_strand_closes_the_gap() {
        // strand 3 is its own component; removing it leaves σ1² σ3² on four strands
        let w = BraidWord::parse_with_strands("1 1 4 4", Some(5)).unwrap();
        let d = Diagram::from_braid(&w);
        let comps = d.components();
        let mut deleted = vec![false; comps.count];
        deleted[comps.of_segment[d.segment_id(2, 0)]] = true;
        let out = induce_diagram(&d, &deleted).unwrap();
        assert_eq!(out.diagram.braid_word().unwrap().to_string(), "1 1 3 3");
        assert!(out.diagram.geometry().is_clockwise(0));
        assert_eq!(out.segment_origin, vec![vec![0], vec![1], vec![3], vec![4]]);
    }

    #[test]
    fn splice_falls_apart_into_two_pieces() {
        let h = Diagram::parse_braid("1 1").unwrap();
        let d = h.connected_sum(&h, 1, 1).unwrap();
        assert_eq!(d.stats().component_count, 3);
        let comps = d.components();
        let mut deleted = vec![false; comps.count];
        // the spliced outer circle is circle 1
        deleted[comps.of_segment[d.segment_id(1, 0)]] = true;
        let out = induce_diagram(&d, &deleted).unwrap();
        let t = out.diagram.template();
        assert_eq!((t.circle_count(), t.arc_count()), (2, 0));
        let geo = out.diagram.geometry();
        assert_eq!(geo.piece_count(), 2);
        assert!(geo.is_clockwise(0) && geo.is_clockwise(1));
        assert_eq!(geo.side_of(0, 1), Side::Left);
        assert_eq!(geo.side_of(1, 0), Side::Left);
        assert_eq!(out.diagram.innermost_circles(), vec![0, 1]);
        assert!(out.diagram.euler_valid());
    }

    #[test]
    fn normal_form() {
        let w = BraidWord::parse("3 1 2 5 4").unwrap();
        let nf = far_commutation_normal_form(w.letters());
        assert_eq!(BraidWord::new(nf, 6).unwrap().to_string(), "1 3 2 5 4");
    }
}
