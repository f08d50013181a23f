//! Triangulated 2D channel domains with a three-part boundary decomposition
//! (inflow, wall, outflow).
//!
//! The generator produces structured meshes of `[0, L] x [0, H]` with each
//! grid cell split into two counterclockwise triangles. An optional stenosis
//! lifts the bottom wall by a smooth cosine bump, shearing interior node
//! columns so the grid stays structured; the minimal channel height at the
//! bump center is `H - amplitude` by construction.
//!
//! ## Mesh file format
//!
//! Plain text, whitespace separated, `#` starts a comment that runs to the
//! end of the line:
//!
//! ```text
//! mesh 1
//! stenosis <amplitude> <center> <width>     # optional
//! nodes <N>
//! <x> <y>                                   # N lines
//! triangles <T>
//! <i> <j> <k>                               # T lines, 0-based, CCW
//! boundary <B>
//! <i> <j> <tag>                             # B lines, tag in {in, wall, out}
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Classification of a boundary edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    In,
    Wall,
    Out,
}

impl BoundaryTag {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryTag::In => "in",
            BoundaryTag::Wall => "wall",
            BoundaryTag::Out => "out",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "in" => Some(BoundaryTag::In),
            "wall" => Some(BoundaryTag::Wall),
            "out" => Some(BoundaryTag::Out),
            _ => None,
        }
    }
}

/// Smooth wall deformation narrowing the channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StenosisSpec {
    /// Total reduction of the channel height at the bump center.
    pub amplitude: f64,
    /// x-position of the bump center.
    pub center: f64,
    /// Half-support of the bump along x.
    pub width: f64,
}

impl StenosisSpec {
    /// Bump profile in [0, 1]: a cosine hump supported on |x - center| <= width.
    pub fn profile(&self, x: f64) -> f64 {
        let s = (x - self.center) / self.width;
        if s.abs() >= 1.0 {
            0.0
        } else {
            0.5 * (1.0 + (std::f64::consts::PI * s).cos())
        }
    }
}

/// Tagged boundary edge, oriented so the domain lies on its left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: BoundaryTag,
}

/// Triangulation of a channel-like domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<[f64; 2]>,
    /// Node triples, counterclockwise.
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub stenosis: Option<StenosisSpec>,
}

impl Mesh {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Signed (positive for CCW) area of triangle `t`.
    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let p = self.nodes[a];
        let q = self.nodes[b];
        let r = self.nodes[c];
        0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Unique undirected edges as sorted node pairs, in lexicographic order.
    pub fn unique_edges(&self) -> Vec<[usize; 2]> {
        let mut set = BTreeSet::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let a = tri[k];
                let b = tri[(k + 1) % 3];
                set.insert([a.min(b), a.max(b)]);
            }
        }
        set.into_iter().collect()
    }

    /// Axis-aligned bounding box `([xmin, ymin], [xmax, ymax])`.
    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for n in &self.nodes {
            for d in 0..2 {
                lo[d] = lo[d].min(n[d]);
                hi[d] = hi[d].max(n[d]);
            }
        }
        (lo, hi)
    }

    pub fn count_tags(&self, tag: BoundaryTag) -> usize {
        self.boundary_edges.iter().filter(|e| e.tag == tag).count()
    }
}

/// Structured crossed-triangle mesh of a channel `[0, L] x [0, H]`.
///
/// The left boundary is tagged `In`, the right `Out`, top and bottom `Wall`.
/// With a stenosis, bottom-wall nodes are lifted by `amplitude * profile(x)`
/// and interior nodes follow with a linear decay toward the fixed top wall.
pub fn build_channel_mesh(
    length: f64,
    height: f64,
    nx: usize,
    ny: usize,
    stenosis: Option<StenosisSpec>,
) -> Result<Mesh> {
    if !(length > 0.0) || !(height > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "channel dimensions must be positive (length={length}, height={height})"
        )));
    }
    if nx < 1 || ny < 1 {
        return Err(Error::InvalidParameter(format!(
            "cell counts must be at least 1 (nx={nx}, ny={ny})"
        )));
    }
    if let Some(s) = &stenosis {
        if !(s.amplitude >= 0.0) || !s.center.is_finite() || !(s.width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "stenosis must have amplitude >= 0 and width > 0 (got {s:?})"
            )));
        }
        if s.amplitude >= 0.5 * height {
            return Err(Error::DegenerateDomain(format!(
                "stenosis amplitude {} must stay below half the channel height {}",
                s.amplitude, height
            )));
        }
        if s.center - s.width <= 0.0 || s.center + s.width >= length {
            return Err(Error::InvalidParameter(format!(
                "stenosis support [{}, {}] must lie strictly inside (0, {length})",
                s.center - s.width,
                s.center + s.width
            )));
        }
    }
    let stenosis = stenosis.filter(|s| s.amplitude > 0.0);

    let node_id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let x = length * i as f64 / nx as f64;
            let y = height * j as f64 / ny as f64;
            let y = match &stenosis {
                Some(s) => {
                    let lift = s.amplitude * s.profile(x);
                    y + lift * (1.0 - y / height)
                }
                None => y,
            };
            nodes.push([x, y]);
        }
    }

    // each cell split along the (i,j)-(i+1,j+1) diagonal; both triangles CCW
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let n00 = node_id(i, j);
            let n10 = node_id(i + 1, j);
            let n01 = node_id(i, j + 1);
            let n11 = node_id(i + 1, j + 1);
            triangles.push([n00, n10, n11]);
            triangles.push([n00, n11, n01]);
        }
    }

    // boundary walk is counterclockwise: bottom, right, top, left
    let mut boundary_edges = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        boundary_edges.push(BoundaryEdge {
            nodes: [node_id(i, 0), node_id(i + 1, 0)],
            tag: BoundaryTag::Wall,
        });
    }
    for j in 0..ny {
        boundary_edges.push(BoundaryEdge {
            nodes: [node_id(nx, j), node_id(nx, j + 1)],
            tag: BoundaryTag::Out,
        });
    }
    for i in (0..nx).rev() {
        boundary_edges.push(BoundaryEdge {
            nodes: [node_id(i + 1, ny), node_id(i, ny)],
            tag: BoundaryTag::Wall,
        });
    }
    for j in (0..ny).rev() {
        boundary_edges.push(BoundaryEdge {
            nodes: [node_id(0, j + 1), node_id(0, j)],
            tag: BoundaryTag::In,
        });
    }

    Ok(Mesh {
        nodes,
        triangles,
        boundary_edges,
        stenosis,
    })
}

/// A single violated mesh invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshDefect {
    NegativeArea { triangle: usize, area: f64 },
    UntaggedBoundaryEdge { edge: [usize; 2] },
    TagOnInteriorEdge { edge: [usize; 2] },
    DuplicateBoundaryEdge { edge: [usize; 2] },
    OpenBoundaryLoop { node: usize, degree: usize },
    EulerMismatch { nodes: usize, edges: usize, triangles: usize },
    MisplacedTag { edge: [usize; 2], tag: BoundaryTag },
    NodeIndexOutOfRange { triangle: usize },
}

impl fmt::Display for MeshDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshDefect::NegativeArea { triangle, area } => {
                write!(f, "triangle {triangle} has non-positive area {area}")
            }
            MeshDefect::UntaggedBoundaryEdge { edge } => {
                write!(f, "untagged boundary edge {}-{}", edge[0], edge[1])
            }
            MeshDefect::TagOnInteriorEdge { edge } => {
                write!(f, "tagged edge {}-{} is not on the boundary", edge[0], edge[1])
            }
            MeshDefect::DuplicateBoundaryEdge { edge } => {
                write!(f, "boundary edge {}-{} tagged more than once", edge[0], edge[1])
            }
            MeshDefect::OpenBoundaryLoop { node, degree } => {
                write!(f, "boundary node {node} has degree {degree}, expected 2")
            }
            MeshDefect::EulerMismatch { nodes, edges, triangles } => {
                write!(
                    f,
                    "Euler formula violated: {nodes} - {edges} + {triangles} != 1"
                )
            }
            MeshDefect::MisplacedTag { edge, tag } => {
                write!(
                    f,
                    "edge {}-{} tagged `{}` lies outside the {} segment",
                    edge[0],
                    edge[1],
                    tag.as_str(),
                    tag.as_str()
                )
            }
            MeshDefect::NodeIndexOutOfRange { triangle } => {
                write!(f, "triangle {triangle} references a node out of range")
            }
        }
    }
}

/// Outcome of [`validate_mesh`]; findings are data, not errors.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub findings: Vec<MeshDefect>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Checks every `Mesh` invariant and reports all violations found.
pub fn validate_mesh(mesh: &Mesh) -> ValidationReport {
    let mut findings = Vec::new();
    let n = mesh.num_nodes();

    for (t, tri) in mesh.triangles.iter().enumerate() {
        if tri.iter().any(|&v| v >= n) {
            findings.push(MeshDefect::NodeIndexOutOfRange { triangle: t });
        }
    }
    if findings
        .iter()
        .any(|d| matches!(d, MeshDefect::NodeIndexOutOfRange { .. }))
    {
        return ValidationReport { findings };
    }

    for t in 0..mesh.num_triangles() {
        let area = mesh.triangle_area(t);
        if area <= 0.0 {
            findings.push(MeshDefect::NegativeArea { triangle: t, area });
        }
    }

    // incidence count per undirected edge
    let mut incidence: BTreeMap<[usize; 2], usize> = BTreeMap::new();
    for tri in &mesh.triangles {
        for k in 0..3 {
            let a = tri[k];
            let b = tri[(k + 1) % 3];
            *incidence.entry([a.min(b), a.max(b)]).or_insert(0) += 1;
        }
    }
    let topo_boundary: BTreeSet<[usize; 2]> = incidence
        .iter()
        .filter(|&(_, &c)| c == 1)
        .map(|(&e, _)| e)
        .collect();

    let mut tagged: BTreeMap<[usize; 2], usize> = BTreeMap::new();
    for e in &mesh.boundary_edges {
        let key = [e.nodes[0].min(e.nodes[1]), e.nodes[0].max(e.nodes[1])];
        *tagged.entry(key).or_insert(0) += 1;
    }
    for (&edge, &count) in &tagged {
        if !topo_boundary.contains(&edge) {
            findings.push(MeshDefect::TagOnInteriorEdge { edge });
        }
        if count > 1 {
            findings.push(MeshDefect::DuplicateBoundaryEdge { edge });
        }
    }
    for &edge in &topo_boundary {
        if !tagged.contains_key(&edge) {
            findings.push(MeshDefect::UntaggedBoundaryEdge { edge });
        }
    }

    // closed loops: every node on the topological boundary has degree 2
    let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
    for e in &topo_boundary {
        *degree.entry(e[0]).or_insert(0) += 1;
        *degree.entry(e[1]).or_insert(0) += 1;
    }
    for (&node, &deg) in &degree {
        if deg != 2 {
            findings.push(MeshDefect::OpenBoundaryLoop { node, degree: deg });
        }
    }

    let edges = incidence.len();
    if n + mesh.num_triangles() != edges + 1 {
        findings.push(MeshDefect::EulerMismatch {
            nodes: n,
            edges,
            triangles: mesh.num_triangles(),
        });
    }

    // geometric placement: In on x = xmin, Out on x = xmax, Wall elsewhere
    let (lo, hi) = mesh.bounding_box();
    let tol = 1e-9 * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1.0);
    for e in &mesh.boundary_edges {
        let a = mesh.nodes[e.nodes[0]];
        let b = mesh.nodes[e.nodes[1]];
        let ok = match e.tag {
            BoundaryTag::In => (a[0] - lo[0]).abs() <= tol && (b[0] - lo[0]).abs() <= tol,
            BoundaryTag::Out => (a[0] - hi[0]).abs() <= tol && (b[0] - hi[0]).abs() <= tol,
            BoundaryTag::Wall => {
                !((a[0] - lo[0]).abs() <= tol && (b[0] - lo[0]).abs() <= tol)
                    && !((a[0] - hi[0]).abs() <= tol && (b[0] - hi[0]).abs() <= tol)
            }
        };
        if !ok {
            findings.push(MeshDefect::MisplacedTag {
                edge: e.nodes,
                tag: e.tag,
            });
        }
    }

    ValidationReport { findings }
}

/// Writes `mesh` in the plain-text format described in the module docs.
/// Coordinates use shortest round-trip formatting, so `load_mesh` restores
/// them bit-exactly.
pub fn save_mesh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    out.push_str("mesh 1\n");
    if let Some(s) = &mesh.stenosis {
        out.push_str(&format!("stenosis {} {} {}\n", s.amplitude, s.center, s.width));
    }
    out.push_str(&format!("nodes {}\n", mesh.nodes.len()));
    for n in &mesh.nodes {
        out.push_str(&format!("{} {}\n", n[0], n[1]));
    }
    out.push_str(&format!("triangles {}\n", mesh.triangles.len()));
    for t in &mesh.triangles {
        out.push_str(&format!("{} {} {}\n", t[0], t[1], t[2]));
    }
    out.push_str(&format!("boundary {}\n", mesh.boundary_edges.len()));
    for e in &mesh.boundary_edges {
        out.push_str(&format!("{} {} {}\n", e.nodes[0], e.nodes[1], e.tag.as_str()));
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

struct LineReader<'a> {
    // (1-based line number, significant tokens)
    lines: std::vec::IntoIter<(usize, Vec<&'a str>)>,
}

impl<'a> LineReader<'a> {
    fn new(text: &'a str) -> Self {
        let mut lines = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let significant = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = significant.split_whitespace().collect();
            if !tokens.is_empty() {
                lines.push((idx + 1, tokens));
            }
        }
        LineReader {
            lines: lines.into_iter(),
        }
    }

    fn next(&mut self, expect: &str) -> Result<(usize, Vec<&'a str>)> {
        self.lines.next().ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("unexpected end of file, expected {expect}"),
        })
    }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {what}: `{tok}`"),
    })
}

/// Reads a mesh file written by [`save_mesh`].
pub fn load_mesh(path: impl AsRef<Path>) -> Result<Mesh> {
    let text = std::fs::read_to_string(path)?;
    parse_mesh(&text)
}

pub fn parse_mesh(text: &str) -> Result<Mesh> {
    let mut rd = LineReader::new(text);

    let (line, header) = rd.next("`mesh 1` header")?;
    if header.len() != 2 || header[0] != "mesh" || header[1] != "1" {
        return Err(Error::Parse {
            line,
            message: "expected header `mesh 1`".into(),
        });
    }

    let (mut line, mut tokens) = rd.next("`nodes` section")?;
    let stenosis = if tokens.first() == Some(&"stenosis") {
        if tokens.len() != 4 {
            return Err(Error::Parse {
                line,
                message: "expected `stenosis <amplitude> <center> <width>`".into(),
            });
        }
        let s = StenosisSpec {
            amplitude: parse_num(tokens[1], line, "stenosis amplitude")?,
            center: parse_num(tokens[2], line, "stenosis center")?,
            width: parse_num(tokens[3], line, "stenosis width")?,
        };
        let next = rd.next("`nodes` section")?;
        line = next.0;
        tokens = next.1;
        Some(s)
    } else {
        None
    };

    if tokens.len() != 2 || tokens[0] != "nodes" {
        return Err(Error::Parse {
            line,
            message: "expected `nodes <count>`".into(),
        });
    }
    let n_nodes: usize = parse_num(tokens[1], line, "node count")?;
    let mut nodes = Vec::with_capacity(n_nodes);
    for _ in 0..n_nodes {
        let (line, t) = rd.next("node coordinates")?;
        if t.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected `<x> <y>`, got {} tokens", t.len()),
            });
        }
        nodes.push([
            parse_num::<f64>(t[0], line, "coordinate")?,
            parse_num::<f64>(t[1], line, "coordinate")?,
        ]);
    }

    let (line, tokens) = rd.next("`triangles` section")?;
    if tokens.len() != 2 || tokens[0] != "triangles" {
        return Err(Error::Parse {
            line,
            message: "expected `triangles <count>`".into(),
        });
    }
    let n_tri: usize = parse_num(tokens[1], line, "triangle count")?;
    let mut triangles = Vec::with_capacity(n_tri);
    for _ in 0..n_tri {
        let (line, t) = rd.next("triangle indices")?;
        if t.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected `<i> <j> <k>`, got {} tokens", t.len()),
            });
        }
        triangles.push([
            parse_num::<usize>(t[0], line, "node index")?,
            parse_num::<usize>(t[1], line, "node index")?,
            parse_num::<usize>(t[2], line, "node index")?,
        ]);
    }

    let (line, tokens) = rd.next("`boundary` section")?;
    if tokens.len() != 2 || tokens[0] != "boundary" {
        return Err(Error::Parse {
            line,
            message: "expected `boundary <count>`".into(),
        });
    }
    let n_bnd: usize = parse_num(tokens[1], line, "boundary edge count")?;
    let mut boundary_edges = Vec::with_capacity(n_bnd);
    for _ in 0..n_bnd {
        let (line, t) = rd.next("boundary edge")?;
        if t.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected `<i> <j> <tag>`, got {} tokens", t.len()),
            });
        }
        let tag = BoundaryTag::parse(t[2]).ok_or_else(|| Error::Parse {
            line,
            message: format!("unknown boundary tag `{}` (expected in, wall or out)", t[2]),
        })?;
        boundary_edges.push(BoundaryEdge {
            nodes: [
                parse_num::<usize>(t[0], line, "node index")?,
                parse_num::<usize>(t[1], line, "node index")?,
            ],
            tag,
        });
    }

    if let Some((line, _)) = rd.lines.next() {
        return Err(Error::Parse {
            line,
            message: "trailing content after boundary section".into(),
        });
    }

    Ok(Mesh {
        nodes,
        triangles,
        boundary_edges,
        stenosis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structured_counts_match() {
        let mesh = build_channel_mesh(5.0, 1.0, 10, 4, None).unwrap();
        assert_eq!(mesh.num_nodes(), 55);
        assert_eq!(mesh.num_triangles(), 80);
        assert_eq!(mesh.count_tags(BoundaryTag::In), 4);
        assert_eq!(mesh.count_tags(BoundaryTag::Out), 4);
        assert_eq!(mesh.count_tags(BoundaryTag::Wall), 20);
    }

    #[test]
    fn smallest_grid_satisfies_euler() {
        let mesh = build_channel_mesh(1.0, 1.0, 1, 1, None).unwrap();
        assert_eq!(mesh.num_nodes(), 4);
        assert_eq!(mesh.num_triangles(), 2);
        let e = mesh.unique_edges().len();
        assert_eq!(mesh.num_nodes() as isize - e as isize + mesh.num_triangles() as isize, 1);
        assert!(validate_mesh(&mesh).is_valid());
    }

    #[test]
    fn stenosis_narrows_channel_to_expected_height() {
        let spec = StenosisSpec {
            amplitude: 0.3,
            center: 2.5,
            width: 1.0,
        };
        let mesh = build_channel_mesh(5.0, 1.0, 40, 8, Some(spec)).unwrap();
        // column at the bump center: x = 2.5 exactly (nx = 40 over L = 5)
        let min_height = mesh
            .nodes
            .iter()
            .filter(|n| (n[0] - 2.5).abs() < 1e-12)
            .map(|n| n[1])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| {
                (lo.min(y), hi.max(y))
            });
        assert!((min_height.1 - min_height.0 - 0.7).abs() < 1e-12);
        assert!(validate_mesh(&mesh).is_valid());
    }

    #[test]
    fn rectangle_area_is_exact() {
        let mesh = build_channel_mesh(5.0, 1.0, 10, 4, None).unwrap();
        assert!((mesh.total_area() - 5.0).abs() < 1e-12 * 5.0);
    }

    #[test]
    fn stenosed_area_matches_trapezoid_of_bottom_wall() {
        let spec = StenosisSpec {
            amplitude: 0.3,
            center: 2.5,
            width: 1.0,
        };
        let mesh = build_channel_mesh(5.0, 1.0, 40, 8, Some(spec)).unwrap();
        let nx = 40;
        let dx = 5.0 / nx as f64;
        let mut lost = 0.0;
        for i in 0..nx {
            let x0 = 5.0 * i as f64 / nx as f64;
            let x1 = 5.0 * (i + 1) as f64 / nx as f64;
            lost += 0.5 * dx * (0.3 * spec.profile(x0) + 0.3 * spec.profile(x1));
        }
        assert!((mesh.total_area() - (5.0 - lost)).abs() < 1e-12);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(matches!(
            build_channel_mesh(0.0, 1.0, 1, 1, None),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            build_channel_mesh(5.0, 1.0, 0, 1, None),
            Err(Error::InvalidParameter(_))
        ));
        let too_tall = StenosisSpec {
            amplitude: 0.5,
            center: 2.5,
            width: 1.0,
        };
        assert!(matches!(
            build_channel_mesh(5.0, 1.0, 10, 4, Some(too_tall)),
            Err(Error::DegenerateDomain(_))
        ));
    }

    #[test]
    fn validation_flags_flipped_triangle() {
        let mut mesh = build_channel_mesh(5.0, 1.0, 10, 4, None).unwrap();
        mesh.triangles[7].swap(0, 1);
        let report = validate_mesh(&mesh);
        assert!(report
            .findings
            .iter()
            .any(|d| matches!(d, MeshDefect::NegativeArea { triangle: 7, .. })));
    }

    #[test]
    fn validation_flags_untagged_boundary_edge() {
        let mut mesh = build_channel_mesh(5.0, 1.0, 10, 4, None).unwrap();
        mesh.boundary_edges.pop();
        let report = validate_mesh(&mesh);
        assert!(report
            .findings
            .iter()
            .any(|d| matches!(d, MeshDefect::UntaggedBoundaryEdge { .. })));
    }

    #[test]
    fn generated_mesh_is_valid() {
        for (nx, ny) in [(1, 1), (10, 4), (7, 3)] {
            let mesh = build_channel_mesh(5.0, 1.0, nx, ny, None).unwrap();
            let report = validate_mesh(&mesh);
            assert!(report.is_valid(), "{:?}", report.findings);
        }
    }

    #[test]
    fn save_load_round_trip_is_identity() {
        let dir = std::env::temp_dir().join("inflow-mesh-roundtrip");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("mesh.txt");
        let spec = StenosisSpec {
            amplitude: 0.21,
            center: 2.5,
            width: 1.25,
        };
        let mesh = build_channel_mesh(5.0, 1.0, 9, 5, Some(spec)).unwrap();
        save_mesh(&mesh, &path).unwrap();
        let loaded = load_mesh(&path).unwrap();
        assert_eq!(mesh, loaded);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "mesh 1\nnodes 2\n0 0\n1 bogus\n";
        match parse_mesh(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("bogus"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }

        let text = "mesh 1\nnodes 1\n0 0\ntriangles 0\nboundary 1\n0 0 north\n";
        match parse_mesh(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 6);
                assert!(message.contains("north"));
            }
            other => panic!("expected tag parse error, got {other:?}"),
        }
    }

    #[test]
    fn comments_and_whitespace_are_tolerated() {
        let mesh = build_channel_mesh(1.0, 1.0, 1, 1, None).unwrap();
        let dir = std::env::temp_dir().join("inflow-mesh-comments");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("mesh.txt");
        save_mesh(&mesh, &path).unwrap();
        let mut text = std::fs::read_to_string(&path).unwrap();
        text = format!("# a comment\n\n{text}");
        let loaded = parse_mesh(&text).unwrap();
        assert_eq!(mesh, loaded);
    }
}
