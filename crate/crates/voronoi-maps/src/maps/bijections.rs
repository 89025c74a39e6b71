//! The Miermont and Ambjørn–Budd corner constructions on concrete maps.
//!
//! Both bijections read the label pattern around each quadrangulation face
//! and draw one new edge (chord) per face between two of its corners:
//! the Miermont rule picks the two corners followed clockwise by a corner
//! of smaller label, the Ambjørn–Budd rule the complementary pair. With
//! corners identified by darts (see the module docs), "followed clockwise"
//! means the face-contour predecessor, so the selected darts `d` satisfy
//! `label(phi_inv(d)) = label(d) - 1` (Miermont) or `+ 1` (Ambjørn–Budd).
//!
//! The Miermont image keeps all vertices except the marked pair and has
//! exactly two faces; cutting along its loop defines the two Voronoï
//! cells. The Ambjørn–Budd image keeps the marked pair and is a general
//! bi-pointed map whose labels are the min-distances to the marks.

use super::{CodeMarks, Dart, Faces, MapError, PlanarMap};
use crate::exact::Rational;
use num::Zero;

/// Scan direction used when the inverse construction walks a face contour
/// looking for successor corners: the successor of a corner of label `l`
/// is the first corner of label `l - 1` encountered counterclockwise
/// around the face (the direction opposite to the forward selection rule;
/// the pair is what makes the two constructions mutually inverse, checked
/// exhaustively on all small two-face maps).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Direction {
    Ccw,
    Cw,
}

const INVERSE_SCAN: Direction = Direction::Ccw;

/// A planar quadrangulation with two distinct marked vertices.
#[derive(Clone, Debug)]
pub struct BipointedQuad {
    pub map: PlanarMap,
    pub v1: usize,
    pub v2: usize,
}

impl BipointedQuad {
    /// Checks that every face has degree 4 and the marks are distinct.
    /// (Mark distance parity is checked when labelling.)
    pub fn new(map: PlanarMap, v1: usize, v2: usize) -> Result<Self, MapError> {
        if v1 == v2 || v1 >= map.n_vertices() || v2 >= map.n_vertices() {
            return Err(MapError::MarksCoincide);
        }
        let faces = map.faces();
        for f in 0..faces.n_faces() {
            if faces.degree(f) != 4 {
                return Err(MapError::NotQuadrangulation(faces.degree(f)));
            }
        }
        Ok(Self { map, v1, v2 })
    }

    pub fn mark_distance(&self) -> usize {
        self.map.distances(self.v1)[self.v2]
    }
}

/// An iso-labelled two-face map: exactly two distinguished faces,
/// adjacent labels differing by 0 or ±1, minimum label 1 among the
/// vertices incident to each face. Structurally a simple cycle (the loop)
/// with labelled subtrees attached on both sides.
#[derive(Clone, Debug)]
pub struct IltFm {
    pub map: PlanarMap,
    pub f1_dart: Dart,
    pub f2_dart: Dart,
}

impl IltFm {
    pub fn new(map: PlanarMap, f1_dart: Dart, f2_dart: Dart) -> Result<Self, MapError> {
        let m = Self {
            map,
            f1_dart,
            f2_dart,
        };
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<(), MapError> {
        let bad = |msg: &str| Err(MapError::InvalidIltfm(msg.to_string()));
        let labels = match self.map.labels() {
            Some(l) => l,
            None => return Err(MapError::MissingLabels),
        };
        let faces = self.map.faces();
        if faces.n_faces() != 2 {
            return bad("must have exactly two faces");
        }
        if faces.face_of[self.f1_dart] == faces.face_of[self.f2_dart] {
            return bad("distinguished faces coincide");
        }
        for d in 0..self.map.n_darts() {
            let a = labels[self.map.vertex_of(d)];
            let b = labels[self.map.vertex_of(self.map.alpha(d))];
            if (a - b).abs() > 1 {
                return bad("adjacent labels must differ by 0 or ±1");
            }
        }
        for face_dart in [self.f1_dart, self.f2_dart] {
            let f = faces.face_of[face_dart];
            let min = faces.faces[f]
                .iter()
                .map(|&d| labels[self.map.vertex_of(d)])
                .min()
                .unwrap();
            if min != 1 {
                return bad("minimum label incident to each face must be 1");
            }
        }
        // the edges bordering both faces must form one simple cycle
        let loop_dart = self.loop_darts();
        let mut ends = vec![0usize; self.map.n_vertices()];
        for d in 0..self.map.n_darts() {
            if loop_dart[d] {
                ends[self.map.vertex_of(d)] += 1;
            }
        }
        if ends.iter().any(|&c| c != 0 && c != 2) {
            return bad("loop is not a simple cycle");
        }
        let n_loop_edges = loop_dart.iter().filter(|&&b| b).count() / 2;
        let mut visited_edges = 0;
        if let Some(start) = (0..self.map.n_darts()).find(|&d| loop_dart[d]) {
            // walk the cycle: leave along the other loop end at each vertex
            let mut d = start;
            loop {
                visited_edges += 1;
                let w = self.map.alpha(d);
                let out = self
                    .map
                    .darts_of(self.map.vertex_of(w))
                    .iter()
                    .copied()
                    .find(|&e| loop_dart[e] && e != w);
                match out {
                    Some(e) if e == start => break,
                    Some(e) => d = e,
                    None => {
                        // a self-loop closes immediately
                        if w == start {
                            break;
                        }
                        return bad("loop walk left the cycle");
                    }
                }
            }
        }
        if visited_edges != n_loop_edges || n_loop_edges == 0 {
            return bad("loop edges do not form a single cycle");
        }
        Ok(())
    }

    /// Marks the darts whose edge borders both faces.
    pub fn loop_darts(&self) -> Vec<bool> {
        let faces = self.map.faces();
        (0..self.map.n_darts())
            .map(|d| faces.face_of[d] != faces.face_of[self.map.alpha(d)])
            .collect()
    }

    /// Minimum label among loop vertices.
    pub fn min_loop_label(&self) -> i64 {
        let loop_dart = self.loop_darts();
        (0..self.map.n_darts())
            .filter(|&d| loop_dart[d])
            .map(|d| self.map.label(self.map.vertex_of(d)))
            .min()
            .expect("loop is nonempty")
    }

    pub fn canonical_code(&self) -> Vec<i64> {
        self.map.canonical_code(&CodeMarks {
            use_labels: true,
            f1_dart: Some(self.f1_dart),
            v1: None,
            v2: None,
        })
    }
}

/// A general planar map (arbitrary face degrees) with two distinct marked
/// vertices; labels, when present, are the min-distances to the marks.
#[derive(Clone, Debug)]
pub struct GeneralBipointedMap {
    pub map: PlanarMap,
    pub v1: usize,
    pub v2: usize,
}

impl GeneralBipointedMap {
    pub fn mark_distance(&self) -> usize {
        self.map.distances(self.v1)[self.v2]
    }

    pub fn canonical_code(&self) -> Vec<i64> {
        self.map.canonical_code(&CodeMarks {
            use_labels: false,
            f1_dart: None,
            v1: Some(self.v1),
            v2: Some(self.v2),
        })
    }
}

/// Attach min-distance labels `l(v) = min(d(v,v1), d(v,v2))` to a
/// bi-pointed quadrangulation. The construction requires the marks at even
/// distance; bipartiteness then forces adjacent labels to differ by ±1.
pub fn label_bipointed(q: &BipointedQuad) -> Result<PlanarMap, MapError> {
    let d1 = q.map.distances(q.v1);
    if d1[q.v2] % 2 != 0 {
        return Err(MapError::OddMarkDistance(d1[q.v2]));
    }
    let labels: Vec<i64> = q
        .map
        .multi_source_distances(&[q.v1, q.v2])
        .into_iter()
        .map(|d| d as i64)
        .collect();
    for d in 0..q.map.n_darts() {
        let a = labels[q.map.vertex_of(d)];
        let b = labels[q.map.vertex_of(q.map.alpha(d))];
        assert_eq!(
            (a - b).abs(),
            1,
            "even mark distance forces adjacent labels to differ by 1"
        );
    }
    q.map.clone().with_labels(labels)
}

/// One chord per face between the two corners selected by `pick`:
/// `pick(prev, cur)` sees the labels of the clockwise-following corner and
/// of the corner itself.
fn select_chords(
    map: &PlanarMap,
    labels: &[i64],
    faces: &Faces,
    pick: impl Fn(i64, i64) -> bool,
) -> Vec<(Dart, Dart)> {
    let mut chords = Vec::with_capacity(faces.n_faces());
    for face in &faces.faces {
        let mut picked = Vec::new();
        for &d in face {
            let cur = labels[map.vertex_of(d)];
            let prev = labels[map.vertex_of(map.phi_inv(d))];
            if pick(prev, cur) {
                picked.push(d);
            }
        }
        assert_eq!(
            picked.len(),
            2,
            "each quadrangulation face selects exactly two corners"
        );
        chords.push((picked[0], picked[1]));
    }
    chords
}

/// The quadrangulation with all chords drawn in: chord end `2i` sits in
/// the corner of `chords[i].0` (between that dart and its sigma
/// successor), end `2i+1` in the corner of `chords[i].1`.
struct Overlay {
    map: PlanarMap,
    base_darts: usize,
}

fn overlay_with_chords(base: &PlanarMap, chords: &[(Dart, Dart)]) -> Overlay {
    let nb = base.n_darts();
    let mut host: Vec<Option<usize>> = vec![None; nb];
    let mut alpha = base.alpha_table().to_vec();
    for (i, &(a, b)) in chords.iter().enumerate() {
        for (end, corner) in [(nb + 2 * i, a), (nb + 2 * i + 1, b)] {
            assert!(host[corner].is_none(), "one chord end per corner");
            host[corner] = Some(end);
        }
        alpha.push(nb + 2 * i + 1);
        alpha.push(nb + 2 * i);
    }
    let mut rotations = Vec::with_capacity(base.n_vertices());
    for v in 0..base.n_vertices() {
        let mut cycle = Vec::new();
        for &d in base.darts_of(v) {
            cycle.push(d);
            if let Some(end) = host[d] {
                cycle.push(end);
            }
        }
        rotations.push(cycle);
    }
    let labels = base.labels().map(|l| l.to_vec());
    let map = PlanarMap::from_rotations(rotations, alpha, labels)
        .expect("chord insertion preserves validity");
    Overlay {
        map,
        base_darts: nb,
    }
}

/// Union of overlay faces across the deleted base edges: the classes are
/// the faces of the chord-only map, and each overlay dart knows which
/// region its left side belongs to.
struct Regions {
    class_of_dart: Vec<usize>,
}

fn merge_regions(ov: &Overlay) -> Regions {
    let faces = ov.map.faces();
    let mut parent: Vec<usize> = (0..faces.n_faces()).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for d in 0..ov.base_darts {
        let a = find(&mut parent, faces.face_of[d]);
        let b = find(&mut parent, faces.face_of[ov.map.alpha(d)]);
        if a != b {
            parent[a] = b;
        }
    }
    let class_of_dart = (0..ov.map.n_darts())
        .map(|d| find(&mut parent, faces.face_of[d]))
        .collect();
    Regions { class_of_dart }
}

/// The chord-only map extracted from an overlay.
struct Submap {
    map: PlanarMap,
    vertex_to_base: Vec<usize>,
    base_to_vertex: Vec<Option<usize>>,
}

fn chord_submap(ov: &Overlay) -> Submap {
    let nb = ov.base_darts;
    let n_new = ov.map.n_darts() - nb;
    let mut rotations = Vec::new();
    let mut vertex_to_base = Vec::new();
    let mut base_to_vertex = vec![None; ov.map.n_vertices()];
    let mut labels = ov.map.labels().map(|_| Vec::new());
    for v in 0..ov.map.n_vertices() {
        let cycle: Vec<Dart> = ov
            .map
            .darts_of(v)
            .iter()
            .copied()
            .filter(|&d| d >= nb)
            .map(|d| d - nb)
            .collect();
        if cycle.is_empty() {
            continue;
        }
        base_to_vertex[v] = Some(rotations.len());
        vertex_to_base.push(v);
        rotations.push(cycle);
        if let (Some(ls), Some(all)) = (labels.as_mut(), ov.map.labels()) {
            ls.push(all[v]);
        }
    }
    let alpha: Vec<Dart> = (0..n_new).map(|d| ov.map.alpha(d + nb) - nb).collect();
    let map = PlanarMap::from_rotations(rotations, alpha, labels)
        .expect("chord submap of a valid overlay is valid");
    Submap {
        map,
        vertex_to_base,
        base_to_vertex,
    }
}

/// Everything the forward construction knows beyond the image itself;
/// used by the instance-level consistency checks.
struct MiermontData {
    iltfm: IltFm,
    sub_vertex_to_quad: Vec<usize>,
    /// For each quad dart: true when the corner it identifies lies in the
    /// region of the first face.
    corner_in_f1: Vec<bool>,
}

fn miermont_forward_full(q: &BipointedQuad) -> Result<MiermontData, MapError> {
    let labelled = label_bipointed(q)?;
    let faces = labelled.faces();
    let labels = labelled.labels().unwrap().to_vec();
    let chords = select_chords(&labelled, &labels, &faces, |prev, cur| prev == cur - 1);
    let ov = overlay_with_chords(&labelled, &chords);
    let regions = merge_regions(&ov);
    let sub = chord_submap(&ov);

    // the image spans every vertex except the marked pair
    assert!(sub.base_to_vertex[q.v1].is_none() && sub.base_to_vertex[q.v2].is_none());
    assert_eq!(sub.map.n_vertices(), q.map.n_vertices() - 2);
    assert_eq!(sub.map.n_edges(), faces.n_faces());

    let class_v1 = regions.class_of_dart[q.map.darts_of(q.v1)[0]];
    let class_v2 = regions.class_of_dart[q.map.darts_of(q.v2)[0]];
    assert_ne!(class_v1, class_v2, "marks end up in distinct faces");
    let f1_dart = (0..sub.map.n_darts())
        .find(|&d| regions.class_of_dart[d + ov.base_darts] == class_v1)
        .expect("first face is bordered by chords");
    let f2_dart = (0..sub.map.n_darts())
        .find(|&d| regions.class_of_dart[d + ov.base_darts] == class_v2)
        .expect("second face is bordered by chords");
    let corner_in_f1 = (0..q.map.n_darts())
        .map(|d| regions.class_of_dart[d] == class_v1)
        .collect();

    let iltfm = IltFm::new(sub.map.clone(), f1_dart, f2_dart)?;
    // the mark distance is read off the loop: d(v1, v2) = 2 * min loop label
    assert_eq!(
        q.mark_distance() as i64,
        2 * iltfm.min_loop_label(),
        "mark distance must be twice the minimum loop label"
    );
    Ok(MiermontData {
        iltfm,
        sub_vertex_to_quad: sub.vertex_to_base,
        corner_in_f1,
    })
}

/// The Miermont image of a labelled bi-pointed quadrangulation: an
/// iso-labelled two-face map with one edge per quadrangulation face,
/// the first mark inside the first face and the second inside the second.
pub fn miermont_forward(q: &BipointedQuad) -> Result<IltFm, MapError> {
    Ok(miermont_forward_full(q)?.iltfm)
}

/// The Ambjørn–Budd image: a general bi-pointed planar map on the
/// complementary corners, keeping both marks, with labels equal to the
/// min-distances to the marks in the image itself.
pub fn ambjorn_budd(q: &BipointedQuad) -> Result<GeneralBipointedMap, MapError> {
    Ok(ambjorn_budd_full(q)?.0)
}

fn ambjorn_budd_full(
    q: &BipointedQuad,
) -> Result<(GeneralBipointedMap, Submap, Vec<(Dart, Dart)>), MapError> {
    let labelled = label_bipointed(q)?;
    let faces = labelled.faces();
    let labels = labelled.labels().unwrap().to_vec();
    let chords = select_chords(&labelled, &labels, &faces, |prev, cur| prev == cur + 1);
    let ov = overlay_with_chords(&labelled, &chords);
    let sub = chord_submap(&ov);

    assert_eq!(sub.map.n_edges(), faces.n_faces(), "edge count preserved");
    let v1 = sub.base_to_vertex[q.v1].expect("first mark keeps its corners");
    let v2 = sub.base_to_vertex[q.v2].expect("second mark keeps its corners");

    // labels survive as min-distances in the image
    let dist = sub.map.multi_source_distances(&[v1, v2]);
    for v in 0..sub.map.n_vertices() {
        assert_eq!(
            sub.map.label(v),
            dist[v] as i64,
            "image labels are min-distances to the marks"
        );
    }
    let g = GeneralBipointedMap {
        map: sub.map.clone(),
        v1,
        v2,
    };
    Ok((g, sub, chords))
}

/// Voronoï cell areas of a two-face map: edges strictly inside each face
/// count 1, loop edges count 1/2 for each cell. Returns `(area1, area2)`
/// with `area1 + area2` equal to the edge count.
pub fn voronoi_areas(m: &IltFm) -> (Rational, Rational) {
    let faces = m.map.faces();
    let f1 = faces.face_of[m.f1_dart];
    let half = Rational::new(1.into(), 2.into());
    let mut area1 = Rational::zero();
    let mut area2 = Rational::zero();
    for d in 0..m.map.n_darts() {
        if d > m.map.alpha(d) {
            continue;
        }
        let (fa, fb) = (faces.face_of[d], faces.face_of[m.map.alpha(d)]);
        if fa != fb {
            area1 += half.clone();
            area2 += half.clone();
        } else if fa == f1 {
            area1 += Rational::from_integer(1.into());
        } else {
            area2 += Rational::from_integer(1.into());
        }
    }
    (area1, area2)
}

/// Parity class of a two-face map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    /// No loop edge joins two minimum-label vertices: the associated
    /// general map has its marks at even distance.
    Even,
    /// At least one loop edge joins two minimum-label vertices: odd
    /// distance.
    Odd,
}

/// Classify a two-face map by its loop labels; returns the parity and the
/// minimum loop label `s`.
pub fn parity_classify(m: &IltFm) -> (Parity, i64) {
    let loop_dart = m.loop_darts();
    let s = m.min_loop_label();
    let mut odd = false;
    for d in 0..m.map.n_darts() {
        if !loop_dart[d] || d > m.map.alpha(d) {
            continue;
        }
        let a = m.map.label(m.map.vertex_of(d));
        let b = m.map.label(m.map.vertex_of(m.map.alpha(d)));
        if a == s && b == s {
            odd = true;
        }
    }
    (if odd { Parity::Odd } else { Parity::Even }, s)
}

/// Instance-level verification of the rebound property: in the
/// Ambjørn–Budd image, vertices strictly inside one cell are weakly
/// closer to that cell's mark, and loop vertices carrying image edges on
/// both sides are equidistant. Returns human-readable violations (empty
/// means the instance is consistent).
pub fn check_rebound(q: &BipointedQuad) -> Result<Vec<String>, MapError> {
    let fwd = miermont_forward_full(q)?;
    let (g, gsub, chords) = ambjorn_budd_full(q)?;
    let mut out = Vec::new();

    // location of each quad vertex relative to the two-face map
    #[derive(Clone, Copy, PartialEq)]
    enum Loc {
        F1,
        F2,
        Loop,
    }
    let mfaces = fwd.iltfm.map.faces();
    let f1 = mfaces.face_of[fwd.iltfm.f1_dart];
    let loop_dart = fwd.iltfm.loop_darts();
    let mut loc_of_quad: Vec<Option<Loc>> = vec![None; q.map.n_vertices()];
    loc_of_quad[q.v1] = Some(Loc::F1);
    loc_of_quad[q.v2] = Some(Loc::F2);
    for mv in 0..fwd.iltfm.map.n_vertices() {
        let on_loop = fwd.iltfm.map.darts_of(mv).iter().any(|&d| loop_dart[d]);
        let loc = if on_loop {
            Loc::Loop
        } else if mfaces.face_of[fwd.iltfm.map.darts_of(mv)[0]] == f1 {
            Loc::F1
        } else {
            Loc::F2
        };
        loc_of_quad[fwd.sub_vertex_to_quad[mv]] = Some(loc);
    }

    // which side each image dart lies on, from its host corner
    let mut dart_in_f1 = vec![false; g.map.n_darts()];
    for (i, &(ca, cb)) in chords.iter().enumerate() {
        dart_in_f1[2 * i] = fwd.corner_in_f1[ca];
        dart_in_f1[2 * i + 1] = fwd.corner_in_f1[cb];
    }

    let d1 = g.map.distances(g.v1);
    let d2 = g.map.distances(g.v2);
    for gv in 0..g.map.n_vertices() {
        let qv = gsub.vertex_to_base[gv];
        let loc = loc_of_quad[qv].expect("every image vertex is located");
        let sides: Vec<bool> = g.map.darts_of(gv).iter().map(|&d| dart_in_f1[d]).collect();
        match loc {
            Loc::F1 => {
                if d1[gv] > d2[gv] {
                    out.push(format!(
                        "vertex strictly inside the first face is closer to the second mark \
                         (quad vertex {qv}: {} vs {})",
                        d1[gv], d2[gv]
                    ));
                }
                if qv != q.v1 && sides.iter().any(|&s| !s) {
                    out.push(format!(
                        "image edge at a first-face vertex lies in the second face (quad vertex {qv})"
                    ));
                }
            }
            Loc::F2 => {
                if d2[gv] > d1[gv] {
                    out.push(format!(
                        "vertex strictly inside the second face is closer to the first mark \
                         (quad vertex {qv}: {} vs {})",
                        d2[gv], d1[gv]
                    ));
                }
                if qv != q.v2 && sides.iter().any(|&s| s) {
                    out.push(format!(
                        "image edge at a second-face vertex lies in the first face (quad vertex {qv})"
                    ));
                }
            }
            Loc::Loop => {
                let any_f1 = sides.iter().any(|&s| s);
                let any_f2 = sides.iter().any(|&s| !s);
                if any_f1 && any_f2 && d1[gv] != d2[gv] {
                    out.push(format!(
                        "loop vertex with edges on both sides is not equidistant \
                         (quad vertex {qv}: {} vs {})",
                        d1[gv], d2[gv]
                    ));
                }
                if any_f1 && !any_f2 && d1[gv] > d2[gv] {
                    out.push(format!(
                        "loop vertex with first-face edges only is closer to the second mark \
                         (quad vertex {qv})"
                    ));
                }
                if any_f2 && !any_f1 && d2[gv] > d1[gv] {
                    out.push(format!(
                        "loop vertex with second-face edges only is closer to the first mark \
                         (quad vertex {qv})"
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Inverse of the Miermont construction: re-create the bi-pointed
/// quadrangulation from an iso-labelled two-face map by inserting one new
/// vertex inside each face and connecting every corner of label `l` to
/// its successor (the next corner of label `l - 1` clockwise around the
/// face, or the new vertex when `l = 1`).
pub fn miermont_inverse(m: &IltFm) -> Result<BipointedQuad, MapError> {
    m.check()?;
    let faces = m.map.faces();
    let n_m_vertices = m.map.n_vertices();
    let v1 = n_m_vertices;
    let v2 = n_m_vertices + 1;

    struct ArcBuilder {
        alpha: Vec<usize>,
        dart_vertex: Vec<usize>,
        out_of: Vec<Option<usize>>,
        arrivals: Vec<Vec<usize>>, // pop order: nearest origin first
    }
    let mut b = ArcBuilder {
        alpha: Vec::new(),
        dart_vertex: Vec::new(),
        out_of: vec![None; m.map.n_darts()],
        arrivals: vec![Vec::new(); m.map.n_darts()],
    };
    let alloc = |b: &mut ArcBuilder, vertex: usize| -> usize {
        b.alpha.push(usize::MAX);
        b.dart_vertex.push(vertex);
        b.dart_vertex.len() - 1
    };

    let mut hubs: Vec<Vec<usize>> = vec![Vec::new(), Vec::new()];
    for (hub_idx, &face_dart) in [m.f1_dart, m.f2_dart].iter().enumerate() {
        let face = faces.face_of[face_dart];
        let contour = &faces.faces[face];
        let len = contour.len();
        let label_at =
            |k: usize| -> i64 { m.map.label(m.map.vertex_of(contour[k % len])) };
        let start = (0..len)
            .find(|&k| label_at(k) == 1)
            .expect("each face has a label-1 corner");
        // visit order: one full cycle from the minimum, then revisit the
        // start for closures that wrap around
        let index_at = |step: usize| -> usize {
            match INVERSE_SCAN {
                Direction::Ccw => (start + step) % len,
                Direction::Cw => (start + len - step % len) % len,
            }
        };
        let mut stack: Vec<(usize, i64, usize)> = Vec::new(); // (corner, label, out dart)
        for step in 0..=len {
            let k = index_at(step);
            let corner = contour[k];
            let lab = label_at(k);
            while let Some(&(_, top_lab, top_out)) = stack.last() {
                if top_lab != lab + 1 {
                    break;
                }
                stack.pop();
                let end = alloc(&mut b, m.map.vertex_of(corner));
                b.alpha[top_out] = end;
                b.alpha[end] = top_out;
                b.arrivals[corner].push(end);
            }
            if step < len {
                let out = alloc(&mut b, m.map.vertex_of(corner));
                b.out_of[corner] = Some(out);
                stack.push((corner, lab, out));
            }
        }
        // what remains connects to the new vertex inside this face
        let hub_vertex = if hub_idx == 0 { v1 } else { v2 };
        let mut hub = Vec::new();
        for &(corner, lab, out) in &stack {
            assert_eq!(lab, 1, "only label-1 corners connect to the new vertex");
            let end = alloc(&mut b, hub_vertex);
            b.alpha[out] = end;
            b.alpha[end] = out;
            let _ = corner;
            hub.push(end);
        }
        // hub rotation is the counterclockwise contour order of the origins
        if INVERSE_SCAN == Direction::Cw {
            hub.reverse();
        }
        hubs[hub_idx] = hub;
    }

    // assemble rotations: each corner's sector, read counterclockwise from
    // its dart, is [out, arrivals far->near] (ccw scan) or
    // [arrivals near->far, out] (cw scan)
    let mut rotations: Vec<Vec<usize>> = Vec::with_capacity(n_m_vertices + 2);
    for v in 0..n_m_vertices {
        let mut cycle = Vec::new();
        for &d in m.map.darts_of(v) {
            match INVERSE_SCAN {
                Direction::Ccw => {
                    cycle.extend(b.out_of[d]);
                    cycle.extend(b.arrivals[d].iter().rev());
                }
                Direction::Cw => {
                    cycle.extend(b.arrivals[d].iter());
                    cycle.extend(b.out_of[d]);
                }
            }
        }
        rotations.push(cycle);
    }
    rotations.push(hubs[0].clone());
    rotations.push(hubs[1].clone());

    let mut labels: Vec<i64> = (0..n_m_vertices).map(|v| m.map.label(v)).collect();
    labels.push(0);
    labels.push(0);
    assert!(b.alpha.iter().all(|&a| a != usize::MAX));
    let map = PlanarMap::from_rotations(rotations, b.alpha, Some(labels))?;
    let quad = BipointedQuad::new(map, v1, v2)?;
    assert_eq!(
        quad.mark_distance() as i64,
        2 * m.min_loop_label(),
        "mark distance must be twice the minimum loop label"
    );
    Ok(quad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    /// Path a–b–c with marks at the ends: one quadrangulation face.
    fn path3_quad() -> BipointedQuad {
        let map =
            PlanarMap::from_rotations(vec![vec![0], vec![1, 2], vec![3]], vec![1, 0, 3, 2], None)
                .unwrap();
        BipointedQuad::new(map, 0, 2).unwrap()
    }

    /// The 4-cycle v1–a–v2–b: two quadrangulation faces.
    fn cycle4_quad() -> BipointedQuad {
        let map = PlanarMap::from_rotations(
            vec![vec![0, 7], vec![1, 2], vec![3, 4], vec![5, 6]],
            vec![1, 0, 3, 2, 5, 4, 7, 6],
            None,
        )
        .unwrap();
        BipointedQuad::new(map, 0, 2).unwrap()
    }

    /// Two-face map: double edge between labels 1 and 2.
    fn loop12_iltfm() -> IltFm {
        let map = PlanarMap::from_rotations(
            vec![vec![0, 3], vec![2, 1]],
            vec![1, 0, 3, 2],
            Some(vec![1, 2]),
        )
        .unwrap();
        IltFm::new(map, 0, 1).unwrap()
    }

    #[test]
    fn labels_on_path() {
        let q = path3_quad();
        let labelled = label_bipointed(&q).unwrap();
        assert_eq!(labelled.labels().unwrap(), &[0, 1, 0]);
    }

    #[test]
    fn odd_distance_is_rejected() {
        // single edge a-b: not even a quadrangulation face (degree 2)
        let map = PlanarMap::from_rotations(vec![vec![0], vec![1]], vec![1, 0], None).unwrap();
        assert!(matches!(
            BipointedQuad::new(map, 0, 1),
            Err(MapError::NotQuadrangulation(2))
        ));
    }

    #[test]
    fn miermont_on_path_gives_self_loop() {
        let q = path3_quad();
        let m = miermont_forward(&q).unwrap();
        assert_eq!(m.map.n_vertices(), 1);
        assert_eq!(m.map.n_edges(), 1);
        assert_eq!(m.map.labels().unwrap(), &[1]);
        assert_eq!(m.min_loop_label(), 1);
        assert_eq!(voronoi_areas(&m), (rat(1, 2), rat(1, 2)));
        assert_eq!(parity_classify(&m), (Parity::Odd, 1));
    }

    #[test]
    fn miermont_on_cycle4_gives_double_edge() {
        let q = cycle4_quad();
        let m = miermont_forward(&q).unwrap();
        assert_eq!(m.map.n_vertices(), 2);
        assert_eq!(m.map.n_edges(), 2);
        let mut labels = m.map.labels().unwrap().to_vec();
        labels.sort();
        assert_eq!(labels, vec![1, 1]);
        assert_eq!(parity_classify(&m), (Parity::Odd, 1));
        assert_eq!(voronoi_areas(&m), (rat(1, 1), rat(1, 1)));
    }

    #[test]
    fn ab_on_path_gives_single_edge() {
        let q = path3_quad();
        let g = ambjorn_budd(&q).unwrap();
        assert_eq!(g.map.n_edges(), 1);
        assert_eq!(g.map.n_vertices(), 2);
        assert_eq!(g.mark_distance(), 1);
    }

    #[test]
    fn ab_on_cycle4_gives_double_edge_between_marks() {
        let q = cycle4_quad();
        let g = ambjorn_budd(&q).unwrap();
        assert_eq!(g.map.n_edges(), 2);
        assert_eq!(g.map.n_vertices(), 2);
        assert_eq!(g.mark_distance(), 1);
        // parity link: odd distance matches the odd two-face map
        let m = miermont_forward(&q).unwrap();
        assert_eq!(parity_classify(&m).0, Parity::Odd);
    }

    #[test]
    fn inverse_of_self_loop_is_path() {
        let map = PlanarMap::from_rotations(vec![vec![0, 1]], vec![1, 0], Some(vec![1])).unwrap();
        let m = IltFm::new(map, 0, 1).unwrap();
        let q = miermont_inverse(&m).unwrap();
        assert_eq!(q.map.n_vertices(), 3);
        assert_eq!(q.map.n_edges(), 2);
        assert_eq!(q.mark_distance(), 2);
        // and forward returns the self-loop
        let back = miermont_forward(&q).unwrap();
        assert_eq!(back.canonical_code(), m.canonical_code());
    }

    #[test]
    fn round_trip_loop12() {
        let m = loop12_iltfm();
        let q = miermont_inverse(&m).unwrap();
        assert_eq!(q.map.n_edges(), 2 * m.map.n_edges());
        assert_eq!(q.mark_distance(), 2);
        let back = miermont_forward(&q).unwrap();
        assert_eq!(back.canonical_code(), m.canonical_code());
    }

    #[test]
    fn round_trip_quad_side() {
        for q in [path3_quad(), cycle4_quad()] {
            let m = miermont_forward(&q).unwrap();
            let q2 = miermont_inverse(&m).unwrap();
            let marks = |q: &BipointedQuad| CodeMarks {
                use_labels: false,
                f1_dart: None,
                v1: Some(q.v1),
                v2: Some(q.v2),
            };
            assert_eq!(
                q.map.canonical_code(&marks(&q)),
                q2.map.canonical_code(&marks(&q2))
            );
        }
    }

    #[test]
    fn rebound_clean_on_small_instances() {
        for q in [path3_quad(), cycle4_quad()] {
            assert!(check_rebound(&q).unwrap().is_empty());
        }
    }
}
