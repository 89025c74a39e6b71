//! Combinatorial (rotation-system) planar maps and the corner bijections.
//!
//! A map is a set of darts (half-edges) with an involution `alpha` pairing
//! the two darts of each edge and a permutation `sigma` giving the
//! counterclockwise order of darts around their origin vertex. Vertices
//! are the orbits of `sigma`; faces are the orbits of `sigma⁻¹ ∘ alpha`,
//! which walks each face boundary with the face on the left. "Clockwise"
//! always means the direction induced by `sigma⁻¹`, used consistently by
//! both bijections.
//!
//! Corner convention: the corner `c(d)` at the origin of dart `d` is the
//! angular sector swept counterclockwise from `d` to `sigma(d)`. It is the
//! corner of the face lying to the left of `d`, and each dart identifies
//! exactly one corner.

mod bijections;
mod format;

pub use bijections::{
    ambjorn_budd, check_rebound, label_bipointed, miermont_forward, miermont_inverse,
    parity_classify, voronoi_areas, BipointedQuad, GeneralBipointedMap, IltFm, Parity,
};
pub use format::{parse_map_document, serialize_map_document, MapDocument};

/// A half-edge index.
pub type Dart = usize;

/// Structural problems reported by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Diagnostic {
    #[error("dart count must be even and positive (got {0})")]
    OddDartCount(usize),
    #[error("alpha is not a permutation of the darts")]
    AlphaNotPermutation,
    #[error("sigma is not a permutation of the darts")]
    SigmaNotPermutation,
    #[error("involution violation: alpha({0}) = {0}")]
    AlphaFixedPoint(Dart),
    #[error("involution violation: alpha∘alpha({0}) ≠ {0}")]
    AlphaNotInvolution(Dart),
    #[error("map is not connected: dart {0} unreachable from dart 0")]
    NotConnected(Dart),
    #[error("Euler characteristic violation: V - E + F = {0}, expected 2")]
    EulerCharacteristic(isize),
}

/// Errors from map construction and the bijections.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum MapError {
    #[error("invalid map: {0:?}")]
    Invalid(Vec<Diagnostic>),
    #[error("marked vertices must be distinct")]
    MarksCoincide,
    #[error("marked vertices are at odd distance {0}; the construction needs an even distance")]
    OddMarkDistance(usize),
    #[error("all faces must have degree 4, found a face of degree {0}")]
    NotQuadrangulation(usize),
    #[error("vertex labels are required but missing")]
    MissingLabels,
    #[error("not a valid iso-labelled two-face map: {0}")]
    InvalidIltfm(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Diagnostic validation of raw `alpha`/`sigma` tables: involution,
/// permutation structure, transitivity, Euler characteristic.
/// Empty output iff the data encodes a planar map.
pub fn validate(alpha: &[Dart], sigma: &[Dart]) -> Vec<Diagnostic> {
    let n = alpha.len();
    let mut out = Vec::new();
    if n == 0 || n % 2 != 0 || sigma.len() != n {
        out.push(Diagnostic::OddDartCount(n));
        return out;
    }
    let is_perm = |p: &[Dart]| {
        let mut seen = vec![false; n];
        p.iter().all(|&d| {
            if d < n && !seen[d] {
                seen[d] = true;
                true
            } else {
                false
            }
        })
    };
    if !is_perm(alpha) {
        out.push(Diagnostic::AlphaNotPermutation);
        return out;
    }
    if !is_perm(sigma) {
        out.push(Diagnostic::SigmaNotPermutation);
        return out;
    }
    for d in 0..n {
        if alpha[d] == d {
            out.push(Diagnostic::AlphaFixedPoint(d));
            return out;
        }
        if alpha[alpha[d]] != d {
            out.push(Diagnostic::AlphaNotInvolution(d));
            return out;
        }
    }
    // transitivity of <sigma, alpha>
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(d) = stack.pop() {
        for e in [alpha[d], sigma[d]] {
            if !seen[e] {
                seen[e] = true;
                stack.push(e);
            }
        }
    }
    if let Some(d) = seen.iter().position(|&s| !s) {
        out.push(Diagnostic::NotConnected(d));
        return out;
    }
    let v = count_orbits(sigma) as isize;
    let e = (n / 2) as isize;
    let mut sigma_inv = vec![0; n];
    for d in 0..n {
        sigma_inv[sigma[d]] = d;
    }
    let mut phi = vec![0; n];
    for d in 0..n {
        phi[d] = sigma_inv[alpha[d]];
    }
    let f = count_orbits(&phi) as isize;
    if v - e + f != 2 {
        out.push(Diagnostic::EulerCharacteristic(v - e + f));
    }
    out
}

fn count_orbits(perm: &[Dart]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut count = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut d = start;
        while !seen[d] {
            seen[d] = true;
            d = perm[d];
        }
    }
    count
}

/// An immutable rotation-system planar map, possibly with integer vertex
/// labels. All construction paths validate; values never change after
/// construction, so shared reads are safe.
#[derive(Clone, Debug)]
pub struct PlanarMap {
    alpha: Vec<Dart>,
    sigma: Vec<Dart>,
    sigma_inv: Vec<Dart>,
    vertex_of: Vec<usize>,
    vertex_darts: Vec<Vec<Dart>>,
    labels: Option<Vec<i64>>,
}

impl PlanarMap {
    /// Build from permutation tables. Vertex ids follow the order in which
    /// sigma orbits are first met by dart index.
    pub fn from_permutations(
        alpha: Vec<Dart>,
        sigma: Vec<Dart>,
        labels: Option<Vec<i64>>,
    ) -> Result<Self, MapError> {
        let diags = validate(&alpha, &sigma);
        if !diags.is_empty() {
            return Err(MapError::Invalid(diags));
        }
        let n = alpha.len();
        let mut sigma_inv = vec![0; n];
        for d in 0..n {
            sigma_inv[sigma[d]] = d;
        }
        let mut vertex_of = vec![usize::MAX; n];
        let mut vertex_darts = Vec::new();
        for start in 0..n {
            if vertex_of[start] != usize::MAX {
                continue;
            }
            let id = vertex_darts.len();
            let mut cycle = Vec::new();
            let mut d = start;
            while vertex_of[d] == usize::MAX {
                vertex_of[d] = id;
                cycle.push(d);
                d = sigma[d];
            }
            vertex_darts.push(cycle);
        }
        if let Some(ref l) = labels {
            if l.len() != vertex_darts.len() {
                return Err(MapError::MissingLabels);
            }
        }
        Ok(Self {
            alpha,
            sigma,
            sigma_inv,
            vertex_of,
            vertex_darts,
            labels,
        })
    }

    /// Build from per-vertex rotation lists (counterclockwise). Vertex ids
    /// are the list positions; labels, when given, use the same order.
    pub fn from_rotations(
        rotations: Vec<Vec<Dart>>,
        alpha: Vec<Dart>,
        labels: Option<Vec<i64>>,
    ) -> Result<Self, MapError> {
        let n = alpha.len();
        let mut sigma = vec![usize::MAX; n];
        for cycle in &rotations {
            for (k, &d) in cycle.iter().enumerate() {
                if d >= n || sigma[d] != usize::MAX {
                    return Err(MapError::Invalid(vec![Diagnostic::SigmaNotPermutation]));
                }
                sigma[d] = cycle[(k + 1) % cycle.len()];
            }
        }
        if sigma.iter().any(|&d| d == usize::MAX) {
            return Err(MapError::Invalid(vec![Diagnostic::SigmaNotPermutation]));
        }
        let diags = validate(&alpha, &sigma);
        if !diags.is_empty() {
            return Err(MapError::Invalid(diags));
        }
        let mut sigma_inv = vec![0; n];
        for d in 0..n {
            sigma_inv[sigma[d]] = d;
        }
        let mut vertex_of = vec![usize::MAX; n];
        for (id, cycle) in rotations.iter().enumerate() {
            for &d in cycle {
                vertex_of[d] = id;
            }
        }
        if let Some(ref l) = labels {
            if l.len() != rotations.len() {
                return Err(MapError::MissingLabels);
            }
        }
        Ok(Self {
            alpha,
            sigma,
            sigma_inv,
            vertex_of,
            vertex_darts: rotations,
            labels,
        })
    }

    pub fn n_darts(&self) -> usize {
        self.alpha.len()
    }

    pub fn n_edges(&self) -> usize {
        self.alpha.len() / 2
    }

    pub fn n_vertices(&self) -> usize {
        self.vertex_darts.len()
    }

    pub fn alpha(&self, d: Dart) -> Dart {
        self.alpha[d]
    }

    pub fn sigma(&self, d: Dart) -> Dart {
        self.sigma[d]
    }

    pub fn sigma_inv(&self, d: Dart) -> Dart {
        self.sigma_inv[d]
    }

    /// Next dart of the face to the left of `d`.
    pub fn phi(&self, d: Dart) -> Dart {
        self.sigma_inv[self.alpha[d]]
    }

    /// Previous dart of the face to the left of `d`.
    pub fn phi_inv(&self, d: Dart) -> Dart {
        self.alpha[self.sigma[d]]
    }

    pub fn vertex_of(&self, d: Dart) -> usize {
        self.vertex_of[d]
    }

    /// Darts at `v` in counterclockwise rotation order.
    pub fn darts_of(&self, v: usize) -> &[Dart] {
        &self.vertex_darts[v]
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: usize) -> i64 {
        self.labels.as_ref().expect("labels required")[v]
    }

    pub fn with_labels(mut self, labels: Vec<i64>) -> Result<Self, MapError> {
        if labels.len() != self.n_vertices() {
            return Err(MapError::MissingLabels);
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn alpha_table(&self) -> &[Dart] {
        &self.alpha
    }

    pub fn sigma_table(&self) -> &[Dart] {
        &self.sigma
    }

    /// Re-run the structural diagnostics (always empty for a built map).
    pub fn validate(&self) -> Vec<Diagnostic> {
        validate(&self.alpha, &self.sigma)
    }

    /// Faces as orbits of `phi`, with a dart-to-face index.
    pub fn faces(&self) -> Faces {
        let n = self.n_darts();
        let mut face_of = vec![usize::MAX; n];
        let mut faces = Vec::new();
        for start in 0..n {
            if face_of[start] != usize::MAX {
                continue;
            }
            let id = faces.len();
            let mut cycle = Vec::new();
            let mut d = start;
            while face_of[d] == usize::MAX {
                face_of[d] = id;
                cycle.push(d);
                d = self.phi(d);
            }
            faces.push(cycle);
        }
        Faces { face_of, faces }
    }

    /// Graph distances from `source` by breadth-first search.
    pub fn distances(&self, source: usize) -> Vec<usize> {
        self.multi_source_distances(&[source])
    }

    pub fn multi_source_distances(&self, sources: &[usize]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n_vertices()];
        let mut queue = std::collections::VecDeque::new();
        for &s in sources {
            dist[s] = 0;
            queue.push_back(s);
        }
        while let Some(v) = queue.pop_front() {
            for &d in self.darts_of(v) {
                let w = self.vertex_of[self.alpha[d]];
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Canonical traversal code from a root dart. Two rooted maps are
    /// isomorphic (orientation-preserving, respecting labels and marks)
    /// iff their codes are equal.
    pub fn rooted_code(&self, root: Dart, marks: &CodeMarks) -> Vec<i64> {
        let face_of = marks.f1_dart.map(|_| self.faces());
        self.rooted_code_with_faces(root, marks, face_of.as_ref())
    }

    fn rooted_code_with_faces(
        &self,
        root: Dart,
        marks: &CodeMarks,
        faces: Option<&Faces>,
    ) -> Vec<i64> {
        let n = self.n_darts();
        let mut id = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        id[root] = 0;
        order.push(root);
        let mut head = 0;
        while head < order.len() {
            let d = order[head];
            head += 1;
            for e in [self.sigma[d], self.alpha[d]] {
                if id[e] == usize::MAX {
                    id[e] = order.len();
                    order.push(e);
                }
            }
        }
        let mut code = Vec::with_capacity(4 * n);
        for &d in &order {
            code.push(id[self.sigma[d]] as i64);
            code.push(id[self.alpha[d]] as i64);
            let v = self.vertex_of[d];
            code.push(if marks.use_labels { self.label(v) } else { 0 });
            let mut feat = 0i64;
            if let (Some(f1), Some(fs)) = (marks.f1_dart, faces) {
                if fs.face_of[d] == fs.face_of[f1] {
                    feat |= 1;
                }
            }
            if marks.v1 == Some(v) {
                feat |= 2;
            }
            if marks.v2 == Some(v) {
                feat |= 4;
            }
            code.push(feat);
        }
        code
    }

    /// Minimal rooted code over all root darts: a canonical form for
    /// unrooted comparison.
    pub fn canonical_code(&self, marks: &CodeMarks) -> Vec<i64> {
        let faces = marks.f1_dart.map(|_| self.faces());
        (0..self.n_darts())
            .map(|root| self.rooted_code_with_faces(root, marks, faces.as_ref()))
            .min()
            .expect("maps have at least one dart")
    }
}

/// What to include in canonical codes besides the rotation structure.
#[derive(Clone, Debug, Default)]
pub struct CodeMarks {
    pub use_labels: bool,
    pub f1_dart: Option<Dart>,
    pub v1: Option<usize>,
    pub v2: Option<usize>,
}

/// Face decomposition of a map.
#[derive(Clone, Debug)]
pub struct Faces {
    pub face_of: Vec<usize>,
    pub faces: Vec<Vec<Dart>>,
}

impl Faces {
    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn degree(&self, face: usize) -> usize {
        self.faces[face].len()
    }
}

#[cfg(test)]
pub(crate) mod test_maps {
    use super::PlanarMap;

    /// Path a - b - c: a single face of degree 4.
    pub(crate) fn path3() -> PlanarMap {
        PlanarMap::from_rotations(vec![vec![0], vec![1, 2], vec![3]], vec![1, 0, 3, 2], None)
            .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_maps::path3;
    use super::*;

    #[test]
    fn self_loop_counts() {
        let m = PlanarMap::from_rotations(vec![vec![0, 1]], vec![1, 0], None).unwrap();
        assert!(m.validate().is_empty());
        assert_eq!(m.n_vertices(), 1);
        assert_eq!(m.n_edges(), 1);
        assert_eq!(m.faces().n_faces(), 2);
    }

    #[test]
    fn path_counts_and_distances() {
        let m = path3();
        assert!(m.validate().is_empty());
        assert_eq!(m.n_vertices(), 3);
        assert_eq!(m.n_edges(), 2);
        let f = m.faces();
        assert_eq!(f.n_faces(), 1);
        assert_eq!(f.degree(0), 4);
        assert_eq!(m.distances(0), vec![0, 1, 2]);
        assert_eq!(m.distances(1), vec![1, 0, 1]);
    }

    #[test]
    fn triangle_distances() {
        let m = PlanarMap::from_rotations(
            vec![vec![0, 5], vec![1, 2], vec![3, 4]],
            vec![1, 0, 3, 2, 5, 4],
            None,
        )
        .unwrap();
        assert_eq!(m.distances(0), vec![0, 1, 1]);
        assert_eq!(m.faces().n_faces(), 2);
    }

    #[test]
    fn alpha_fixed_point_diagnostic() {
        let diags = validate(&[0, 1], &[1, 0]);
        assert_eq!(diags, vec![Diagnostic::AlphaFixedPoint(0)]);
    }

    #[test]
    fn disconnected_diagnostic() {
        // two separate self-loops
        let diags = validate(&[1, 0, 3, 2], &[1, 0, 3, 2]);
        assert!(matches!(diags[0], Diagnostic::NotConnected(_)));
    }

    #[test]
    fn euler_diagnostic_for_torus_map() {
        // one vertex, two edges interleaved in the rotation: the torus map
        let diags = validate(&[1, 0, 3, 2], &[2, 3, 1, 0]);
        assert_eq!(diags, vec![Diagnostic::EulerCharacteristic(0)]);
    }

    #[test]
    fn canonical_code_detects_isomorphism() {
        // the same path map with darts renumbered
        let a = path3();
        let b =
            PlanarMap::from_rotations(vec![vec![3], vec![1, 0], vec![2]], vec![2, 3, 0, 1], None)
                .unwrap();
        let marks = CodeMarks::default();
        assert_eq!(a.canonical_code(&marks), b.canonical_code(&marks));
        let loop1 = PlanarMap::from_rotations(vec![vec![0, 1]], vec![1, 0], None).unwrap();
        assert_ne!(a.canonical_code(&marks), loop1.canonical_code(&marks));
    }
}
