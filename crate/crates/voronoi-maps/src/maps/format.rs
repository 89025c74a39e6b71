//! Text exchange format for planar maps.
//!
//! A document is line-based:
//!
//! ```text
//! map/1
//! darts 4
//! edge 0 1
//! edge 2 3
//! vertex 0 : 0 2
//! vertex 1 : 1
//! vertex 2 : 3
//! labels 0 1 0
//! mark v1 0
//! mark v2 2
//! mark f1 0
//! mark f2 1
//! end
//! ```
//!
//! `edge a b` lists the dart pairing with `a < b`, sorted by `a`. Each
//! `vertex i : d0 d1 ...` line gives the counterclockwise rotation at
//! vertex `i`, starting at its smallest dart; every dart appears in
//! exactly one vertex line. `labels` (optional) lists one integer per
//! vertex in vertex order. Marks (optional) name the two marked vertices
//! by id and the two distinguished faces by one contained dart. Blank
//! lines and `#` comments are ignored. Serialization is canonical, so
//! `serialize(parse(text)) == text` for canonically formatted input and
//! `parse(serialize(doc)) == doc` always.

use super::{Dart, MapError, PlanarMap};

/// A parsed map document: the map plus optional marks.
#[derive(Clone, Debug, PartialEq)]
pub struct MapDocument {
    pub map: PlanarMap,
    pub v1: Option<usize>,
    pub v2: Option<usize>,
    pub f1_dart: Option<Dart>,
    pub f2_dart: Option<Dart>,
}

impl PartialEq for PlanarMap {
    fn eq(&self, other: &Self) -> bool {
        self.alpha_table() == other.alpha_table()
            && self.sigma_table() == other.sigma_table()
            && self.labels() == other.labels()
            && (0..self.n_darts().min(other.n_darts()))
                .all(|d| self.vertex_of(d) == other.vertex_of(d))
    }
}

fn err(line: usize, message: impl Into<String>) -> MapError {
    MapError::Parse {
        line,
        message: message.into(),
    }
}

/// Parse a map document; structural validity is checked on construction.
pub fn parse_map_document(text: &str) -> Result<MapDocument, MapError> {
    let mut darts: Option<usize> = None;
    let mut alpha: Vec<Dart> = Vec::new();
    let mut rotations: Vec<(usize, Vec<Dart>)> = Vec::new();
    let mut labels: Option<Vec<i64>> = None;
    let mut v1 = None;
    let mut v2 = None;
    let mut f1_dart = None;
    let mut f2_dart = None;
    let mut saw_header = false;
    let mut saw_end = false;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if saw_end {
            return Err(err(lineno, "content after `end`"));
        }
        if !saw_header {
            if line != "map/1" {
                return Err(err(lineno, "expected header `map/1`"));
            }
            saw_header = true;
            continue;
        }
        let mut words = line.split_whitespace();
        let key = words.next().unwrap();
        let rest: Vec<&str> = words.collect();
        match key {
            "darts" => {
                let n: usize = rest
                    .first()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| err(lineno, "darts <count>"))?;
                if n == 0 || n % 2 != 0 {
                    return Err(err(lineno, "dart count must be positive and even"));
                }
                darts = Some(n);
                alpha = vec![usize::MAX; n];
            }
            "edge" => {
                let n = darts.ok_or_else(|| err(lineno, "`darts` must come first"))?;
                if rest.len() != 2 {
                    return Err(err(lineno, "edge <dart> <dart>"));
                }
                let a: Dart = rest[0].parse().map_err(|_| err(lineno, "bad dart id"))?;
                let b: Dart = rest[1].parse().map_err(|_| err(lineno, "bad dart id"))?;
                if a >= n || b >= n || a == b {
                    return Err(err(lineno, "edge darts out of range or equal"));
                }
                if alpha[a] != usize::MAX || alpha[b] != usize::MAX {
                    return Err(err(lineno, "dart appears in two edges"));
                }
                alpha[a] = b;
                alpha[b] = a;
            }
            "vertex" => {
                let n = darts.ok_or_else(|| err(lineno, "`darts` must come first"))?;
                let id: usize = rest
                    .first()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| err(lineno, "vertex <id> : <darts>"))?;
                if rest.get(1) != Some(&":") {
                    return Err(err(lineno, "vertex <id> : <darts>"));
                }
                if id != rotations.len() {
                    return Err(err(lineno, "vertex ids must be sequential from 0"));
                }
                let cycle: Vec<Dart> = rest[2..]
                    .iter()
                    .map(|w| w.parse().map_err(|_| err(lineno, "bad dart id")))
                    .collect::<Result<_, _>>()?;
                if cycle.is_empty() || cycle.iter().any(|&d| d >= n) {
                    return Err(err(lineno, "vertex rotation empty or out of range"));
                }
                rotations.push((id, cycle));
            }
            "labels" => {
                let vals: Vec<i64> = rest
                    .iter()
                    .map(|w| w.parse().map_err(|_| err(lineno, "bad label")))
                    .collect::<Result<_, _>>()?;
                labels = Some(vals);
            }
            "mark" => {
                if rest.len() != 2 {
                    return Err(err(lineno, "mark <kind> <id>"));
                }
                let id: usize = rest[1].parse().map_err(|_| err(lineno, "bad mark id"))?;
                match rest[0] {
                    "v1" => v1 = Some(id),
                    "v2" => v2 = Some(id),
                    "f1" => f1_dart = Some(id),
                    "f2" => f2_dart = Some(id),
                    other => return Err(err(lineno, format!("unknown mark kind `{other}`"))),
                }
            }
            "end" => saw_end = true,
            other => return Err(err(lineno, format!("unknown directive `{other}`"))),
        }
    }
    if !saw_header {
        return Err(err(0, "missing header `map/1`"));
    }
    if !saw_end {
        return Err(err(0, "missing `end`"));
    }
    let n = darts.ok_or_else(|| err(0, "missing `darts`"))?;
    if alpha.iter().any(|&a| a == usize::MAX) {
        return Err(err(0, "some darts are not paired by any edge"));
    }
    let rotation_lists: Vec<Vec<Dart>> = rotations.into_iter().map(|(_, c)| c).collect();
    let map = PlanarMap::from_rotations(rotation_lists, alpha, labels)?;
    for (kind, mark) in [("v1", v1), ("v2", v2)] {
        if let Some(v) = mark {
            if v >= map.n_vertices() {
                return Err(err(0, format!("mark {kind} out of range")));
            }
        }
    }
    for (kind, mark) in [("f1", f1_dart), ("f2", f2_dart)] {
        if let Some(d) = mark {
            if d >= n {
                return Err(err(0, format!("mark {kind} out of range")));
            }
        }
    }
    Ok(MapDocument {
        map,
        v1,
        v2,
        f1_dart,
        f2_dart,
    })
}

/// Canonical serialization: edges sorted by smaller dart, rotations listed
/// per vertex starting from the smallest dart.
pub fn serialize_map_document(doc: &MapDocument) -> String {
    let map = &doc.map;
    let mut out = String::from("map/1\n");
    out.push_str(&format!("darts {}\n", map.n_darts()));
    for d in 0..map.n_darts() {
        if d < map.alpha(d) {
            out.push_str(&format!("edge {} {}\n", d, map.alpha(d)));
        }
    }
    for v in 0..map.n_vertices() {
        let cycle = map.darts_of(v);
        let min_pos = cycle
            .iter()
            .enumerate()
            .min_by_key(|&(_, &d)| d)
            .map(|(k, _)| k)
            .unwrap();
        let rotated: Vec<String> = (0..cycle.len())
            .map(|k| cycle[(min_pos + k) % cycle.len()].to_string())
            .collect();
        out.push_str(&format!("vertex {} : {}\n", v, rotated.join(" ")));
    }
    if let Some(labels) = map.labels() {
        let words: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
        out.push_str(&format!("labels {}\n", words.join(" ")));
    }
    for (kind, mark) in [("v1", doc.v1), ("v2", doc.v2)] {
        if let Some(v) = mark {
            out.push_str(&format!("mark {kind} {v}\n"));
        }
    }
    for (kind, mark) in [("f1", doc.f1_dart), ("f2", doc.f2_dart)] {
        if let Some(d) = mark {
            out.push_str(&format!("mark {kind} {d}\n"));
        }
    }
    out.push_str("end\n");
    out
}
