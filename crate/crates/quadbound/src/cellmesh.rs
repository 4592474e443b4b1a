//! Quadrilateral meshes of the three hull cell types.
//!
//! Pentagons are meshed by perpendicular geodesic families (Lambert grid),
//! Carleson quadrilaterals by their exact polar model, and Carleson
//! triangles by three vertex foliations around a small inner triangle. All
//! mesh arcs are members of explicit coaxial pencils, so every vertex is a
//! closed-form intersection and all curved crossings outside the inner
//! triangle are exactly orthogonal.

use crate::error::{Error, Result};
use crate::geom::{
    cx, orthogonal_pencil, Carrier, Circle, CircularArc, Line, Pencil, SpherePoint,
};
use crate::hyperbolic::{mobius_from_triples, Geodesic, HypSegment, Model, MobiusMap, DEG};
use crate::tessellation::{side_length, PentagonCell};
use num_complex::Complex64 as Complex;
use std::collections::HashMap;
use std::f64::consts::PI;

const SQRT2: f64 = std::f64::consts::SQRT_2;
const SQRT3: f64 = 1.7320508075688772;

/// Which construction model the mesh coordinates live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    Pentagon,
    CarlesonQuad,
    CarlesonTri,
}

/// Transfer region of a vertex relative to the inner triangle (ctri only).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexRegion {
    Outer,
    InnerBoundary,
    Inner,
}

/// A quadrilateral mesh of one hull cell, in model coordinates.
///
/// Pentagon meshes live directly in the unit disk; Carleson quads and
/// triangles live in their canonical half-plane models and carry the Mobius
/// map used to push them onto the disk.
#[derive(Debug, Clone)]
pub struct CellMesh {
    pub kind: CellKind,
    pub vertices: Vec<Complex>,
    /// Counterclockwise quads as vertex indices.
    pub quads: Vec<[usize; 4]>,
    /// Carrier of each curved mesh edge, keyed by (min id, max id).
    pub edge_carriers: HashMap<(usize, usize), Carrier>,
    pub region: Vec<VertexRegion>,
    /// Named boundary traces (ordered vertex ids along cell sides).
    pub traces: Vec<(String, Vec<usize>)>,
}

impl CellMesh {
    fn new(kind: CellKind) -> Self {
        CellMesh {
            kind,
            vertices: Vec::new(),
            quads: Vec::new(),
            edge_carriers: HashMap::new(),
            region: Vec::new(),
            traces: Vec::new(),
        }
    }

    fn push(&mut self, z: Complex, r: VertexRegion) -> usize {
        self.vertices.push(z);
        self.region.push(r);
        self.vertices.len() - 1
    }

    fn set_carrier(&mut self, a: usize, b: usize, c: Carrier) {
        let key = (a.min(b), a.max(b));
        self.edge_carriers.insert(key, c);
    }

    pub fn carrier_of(&self, a: usize, b: usize) -> Option<&Carrier> {
        self.edge_carriers.get(&(a.min(b), a.max(b)))
    }

    pub fn trace(&self, name: &str) -> Option<&[usize]> {
        self.traces.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    /// Interior angles of a straight-edge quad, degrees, ccw order.
    pub fn straight_angles(&self, q: &[usize; 4]) -> [f64; 4] {
        let p: Vec<Complex> = q.iter().map(|&i| self.vertices[i]).collect();
        quad_angles(&[p[0], p[1], p[2], p[3]])
    }

    /// Interior angle at corner `i` of quad `q` measured between the curved
    /// edges (falls back to chords for edges without carriers).
    pub fn curved_angle(&self, q: &[usize; 4], i: usize) -> f64 {
        let v = q[i];
        let prev = q[(i + 3) % 4];
        let next = q[(i + 1) % 4];
        let dir = |other: usize| -> Complex {
            let p = self.vertices[v];
            let o = self.vertices[other];
            match self.carrier_of(v, other) {
                Some(c) => {
                    let t = c.tangent_at(p);
                    if crate::geom::dot(t, o - p) >= 0.0 {
                        t
                    } else {
                        -t
                    }
                }
                None => (o - p) / (o - p).norm(),
            }
        };
        let u = dir(next);
        let w = dir(prev);
        // Interior angle on the ccw side.
        let ang = w.arg() - u.arg();
        let mut ang = ang % (2.0 * PI);
        if ang < 0.0 {
            ang += 2.0 * PI;
        }
        ang * DEG
    }

    /// Quad orientation (ccw > 0) by translated shoelace.
    pub fn quad_area(&self, q: &[usize; 4]) -> f64 {
        let o = self.vertices[q[0]];
        let mut s = 0.0;
        for i in 0..4 {
            let a = self.vertices[q[i]] - o;
            let b = self.vertices[q[(i + 1) % 4]] - o;
            s += crate::geom::cross(a, b);
        }
        s * 0.5
    }
}

/// Interior angles of a simple ccw quad, in degrees.
pub fn quad_angles(p: &[Complex; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for i in 0..4 {
        let e_prev = p[i] - p[(i + 3) % 4];
        let e_next = p[(i + 1) % 4] - p[i];
        let turn = crate::geom::cross(e_prev, e_next).atan2(crate::geom::dot(e_prev, e_next));
        let mut interior = PI - turn;
        if interior < 0.0 {
            interior += 2.0 * PI;
        }
        out[i] = interior * DEG;
    }
    out
}

// ---------------------------------------------------------------------------
// D-sequence
// ---------------------------------------------------------------------------

/// Hyperbolic distances of the mesh rows from the top edge / top point.
///
/// Uniform spacing 1/(N+1) out to just past N, with the three connector
/// distances of the canonical triangle inserted.
#[derive(Debug, Clone)]
pub struct DSequence {
    pub d: Vec<f64>,
    /// Indices (into `d`) of the triangle connector distances.
    pub i1: usize,
    pub i3: usize,
    pub i5: usize,
    pub n: usize,
}

impl DSequence {
    pub fn build(n: usize, rho1: f64, rho3: f64, rho5: f64) -> Result<DSequence> {
        if !(0.0 < rho1 && rho1 < rho3 && rho3 < rho5) {
            return Err(Error::Precondition("connector distances must increase".into()));
        }
        let step = 1.0 / (n as f64 + 1.0);
        let m = n * (n + 1) + 1;
        let mut d: Vec<f64> = (1..=m).map(|k| k as f64 * step).collect();
        for rho in [rho1, rho3, rho5] {
            if d.iter().all(|&x| (x - rho).abs() > 1e-12) {
                d.push(rho);
            }
        }
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let find = |rho: f64| d.iter().position(|&x| (x - rho).abs() <= 1e-12).unwrap();
        let seq = DSequence { i1: find(rho1), i3: find(rho3), i5: find(rho5), d, n };
        seq.validate()?;
        Ok(seq)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n as f64;
        if self.d[0] >= 1.0 / n {
            return Err(Error::Precondition("d_1 must be below 1/N".into()));
        }
        for w in self.d.windows(2) {
            if w[1] - w[0] > 1.0 / n + 1e-12 || w[1] <= w[0] {
                return Err(Error::Precondition("d gaps must be positive and at most 1/N".into()));
            }
        }
        if *self.d.last().unwrap() <= n {
            return Err(Error::Precondition("d_M must exceed N".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Pentagon mesh
// ---------------------------------------------------------------------------

/// Mesh a right pentagon into 5 (N/2)^2 Lambert-grid quads.
///
/// Each side is divided into N hyperbolically equal segments; the interior
/// grid is formed by geodesics perpendicular to the sides through the
/// division points.
pub fn mesh_pentagon(p: &PentagonCell, n: usize) -> Result<CellMesh> {
    if n < 8 {
        return Err(Error::Precondition(format!("N = {n} below minimum 8")));
    }
    if n % 2 != 0 {
        return Err(Error::Precondition("N must be even to split sides at midpoints".into()));
    }
    let half = n / 2;
    // Side geodesics and their division points (N+1 per side from v_i).
    let mut side_geo: Vec<Geodesic> = Vec::with_capacity(5);
    let mut side_pts: Vec<Vec<Complex>> = Vec::with_capacity(5);
    for i in 0..5 {
        let (a, b) = p.side(i);
        let g = Geodesic::disk_through(a, b)?;
        let seg = HypSegment::new(g.clone(), a, b)?;
        let mut pts = Vec::with_capacity(n + 1);
        for j in 0..=n {
            pts.push(seg.point_at_distance(seg.length * j as f64 / n as f64)?);
        }
        side_pts.push(pts);
        side_geo.push(g);
    }
    // Perpendicular-family pencils: geodesics orthogonal to side i are the
    // Apollonius family of its ideal endpoints.
    let perp_pencil: Vec<Pencil> = side_geo
        .iter()
        .map(|g| match (g.p, g.q) {
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => Ok(Pencil::Apollonius(a, b)),
            _ => Err(Error::Construction("open pentagon side".into())),
        })
        .collect::<Result<_>>()?;

    let mut mesh = CellMesh::new(CellKind::Pentagon);
    // Pooled vertices keyed by rounded coordinates (pentagon scale is O(1)).
    let mut pool: HashMap<(i64, i64), usize> = HashMap::new();
    let mut intern = |mesh: &mut CellMesh, z: Complex| -> usize {
        let key = ((z.re * 1e10).round() as i64, (z.im * 1e10).round() as i64);
        *pool.entry(key).or_insert_with(|| mesh.push(z, VertexRegion::Outer))
    };

    // Grid per corner quad Q_i around vertex v_i: e-leaves perpendicular to
    // side i through x_j (distance jL/N from v_i), f-leaves perpendicular to
    // side i-1 through y_k (distance kL/N from v_i).
    for i in 0..5 {
        let prev = (i + 4) % 5;
        let e_leaf = |j: usize| -> Result<Carrier> {
            // x_j on side i at distance j*L/N from v_i.
            perp_pencil[i].member_through(side_pts[i][j])
        };
        let f_leaf = |k: usize| -> Result<Carrier> {
            // y_k on side i-1 at distance k*L/N from v_i = index n-k from v_{i-1}.
            perp_pencil[prev].member_through(side_pts[prev][n - k])
        };
        let mut ids = vec![vec![0usize; half + 1]; half + 1];
        let mut carriers_e: Vec<Carrier> = Vec::with_capacity(half + 1);
        let mut carriers_f: Vec<Carrier> = Vec::with_capacity(half + 1);
        for j in 0..=half {
            carriers_e.push(e_leaf(j)?);
            carriers_f.push(f_leaf(j)?);
        }
        for j in 0..=half {
            for k in 0..=half {
                let z = if k == 0 {
                    side_pts[i][j]
                } else if j == 0 {
                    side_pts[prev][n - k]
                } else {
                    // The unique intersection inside the disk.
                    let hits = crate::geom::intersect(&carriers_e[j], &carriers_f[k]);
                    let inside: Vec<Complex> =
                        hits.into_iter().filter(|z| z.norm() < 1.0).collect();
                    if inside.len() != 1 {
                        return Err(Error::Construction(
                            "pentagon grid crossing not unique in the disk".into(),
                        ));
                    }
                    inside[0]
                };
                ids[j][k] = intern(&mut mesh, z);
            }
        }
        // Cells, oriented ccw by area sign of the first one.
        for j in 0..half {
            for k in 0..half {
                let q = [ids[j][k], ids[j + 1][k], ids[j + 1][k + 1], ids[j][k + 1]];
                mesh.quads.push(q);
            }
        }
        // Edge carriers: (j,k)-(j+1,k) lies on f_k; (j,k)-(j,k+1) on e_j.
        for j in 0..=half {
            for k in 0..=half {
                if j < half {
                    mesh.set_carrier(ids[j][k], ids[j + 1][k], carriers_f[k]);
                }
                if k < half {
                    mesh.set_carrier(ids[j][k], ids[j][k + 1], carriers_e[j]);
                }
            }
        }
    }
    // Fix global orientation.
    if !mesh.quads.is_empty() && mesh.quad_area(&mesh.quads[0].clone()) < 0.0 {
        for q in mesh.quads.iter_mut() {
            q.reverse();
        }
    }
    // Side traces.
    for i in 0..5 {
        let ids: Vec<usize> = side_pts[i]
            .iter()
            .map(|&z| {
                let key = ((z.re * 1e10).round() as i64, (z.im * 1e10).round() as i64);
                pool[&key]
            })
            .collect();
        mesh.traces.push((format!("side{i}"), ids));
    }
    Ok(mesh)
}

// ---------------------------------------------------------------------------
// Carleson quad mesh (canonical polar model)
// ---------------------------------------------------------------------------

/// Mesh the canonical Carleson quadrilateral in half-plane coordinates.
///
/// Model: top edge on the imaginary axis from i e^{L/2} to i e^{-L/2}, rays
/// on |z| = e^{+-L/2}, ideal base [e^{-L/2}, e^{L/2}]. Vertical leaves are
/// the circles |z| = r_j through the N+1 top-edge division points; horizontal
/// leaves are the rays arg z = asin(sech d_k). Every curved crossing is
/// exactly orthogonal.
pub fn mesh_cquad(n: usize, ds: &DSequence) -> Result<CellMesh> {
    if n < 8 {
        return Err(Error::Precondition(format!("N = {n} below minimum 8")));
    }
    ds.validate()?;
    let l = side_length();
    let m = ds.len();
    let radii: Vec<f64> = (0..=n).map(|j| (l / 2.0 - j as f64 * l / n as f64).exp()).collect();
    // Row angles: top edge at pi/2, then asin(sech d_k), then the base at 0.
    let mut thetas: Vec<f64> = Vec::with_capacity(m + 2);
    thetas.push(PI / 2.0);
    for &d in &ds.d {
        thetas.push(d.cosh().recip().asin());
    }
    thetas.push(0.0);

    let mut mesh = CellMesh::new(CellKind::CarlesonQuad);
    let rows = thetas.len();
    let mut ids = vec![vec![0usize; n + 1]; rows];
    for (k, &th) in thetas.iter().enumerate() {
        for (j, &r) in radii.iter().enumerate() {
            let z = Complex::from_polar(r, th);
            ids[k][j] = mesh.push(z, VertexRegion::Outer);
        }
    }
    for k in 0..rows - 1 {
        for j in 0..n {
            let q = [ids[k + 1][j], ids[k + 1][j + 1], ids[k][j + 1], ids[k][j]];
            let area = {
                let o = mesh.vertices[q[0]];
                let mut s = 0.0;
                for i in 0..4 {
                    let a = mesh.vertices[q[i]] - o;
                    let b = mesh.vertices[q[(i + 1) % 4]] - o;
                    s += crate::geom::cross(a, b);
                }
                s
            };
            mesh.quads.push(if area > 0.0 { q } else { [q[3], q[2], q[1], q[0]] });
        }
    }
    // Carriers: along-row edges lie on rays (lines through 0); along-column
    // edges lie on circles |z| = r_j.
    for k in 0..rows {
        let dir = Complex::from_polar(1.0, thetas[k]);
        for j in 0..n {
            mesh.set_carrier(
                ids[k][j],
                ids[k][j + 1],
                Carrier::Line(Line { point: cx(0.0, 0.0), dir }),
            );
        }
    }
    for j in 0..=n {
        let circ = Carrier::Circle(Circle::new(cx(0.0, 0.0), radii[j]));
        for k in 0..rows - 1 {
            mesh.set_carrier(ids[k][j], ids[k + 1][j], circ);
        }
    }
    // Traces: the top edge (j = 0..N at k = 0), the two rays (k = 0..rows-1
    // at j = 0 and j = N), and the ideal base row.
    mesh.traces.push(("top".into(), ids[0].clone()));
    mesh.traces.push(("ray_hi".into(), (0..rows).map(|k| ids[k][0]).collect()));
    mesh.traces.push(("ray_lo".into(), (0..rows).map(|k| ids[k][n]).collect()));
    mesh.traces.push(("base".into(), ids[rows - 1].clone()));
    Ok(mesh)
}

// ---------------------------------------------------------------------------
// Foliations of a right circular quadrilateral
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoliationKind {
    /// Opposite carriers meet twice: canonical rays + concentric circles.
    Intersecting,
    /// Opposite carriers disjoint: canonical concentric circles + rays.
    Disjoint,
    /// Opposite carriers tangent: canonical parallel + perpendicular lines.
    Tangent,
    /// Opposite sides on one carrier.
    SameCarrier,
    /// Opposite sides on two parallel lines.
    ParallelLines,
    /// Opposite sides on two crossing lines (concentric canonical form).
    CrossingLines,
}

/// The two orthogonal foliations of a right circular quadrilateral.
pub struct FoliationPair {
    pub kind: FoliationKind,
    /// Family whose leaves land perpendicularly on sides 0 and 2.
    pub family_a: Option<Pencil>,
    /// Family landing on sides 1 and 3.
    pub family_b: Option<Pencil>,
    /// For the line/tangent kinds: map to translation coordinates.
    pub to_canonical: Option<MobiusMap>,
}

impl FoliationPair {
    /// The leaf of the family landing on sides 0/2 through `z`.
    pub fn leaf_a(&self, z: Complex) -> Result<Carrier> {
        match (&self.family_a, &self.to_canonical, self.kind) {
            (Some(p), _, _) => p.member_through(z),
            (None, Some(mu), FoliationKind::Tangent) => {
                // Horizontal line through mu(z), pulled back.
                let w = mu.apply_c(z);
                let line = Carrier::Line(Line { point: w, dir: cx(1.0, 0.0) });
                mu.inverse().push_carrier(&line)
            }
            (None, None, FoliationKind::ParallelLines) => {
                Err(Error::Construction("line-pair foliation needs no leaf generator".into()))
            }
            _ => Err(Error::Construction("foliation leaf unavailable".into())),
        }
    }

    pub fn leaf_b(&self, z: Complex) -> Result<Carrier> {
        match (&self.family_b, &self.to_canonical, self.kind) {
            (Some(p), _, _) => p.member_through(z),
            (None, Some(mu), FoliationKind::Tangent) => {
                let w = mu.apply_c(z);
                let line = Carrier::Line(Line { point: w, dir: cx(0.0, 1.0) });
                mu.inverse().push_carrier(&line)
            }
            _ => Err(Error::Construction("foliation leaf unavailable".into())),
        }
    }
}

/// Classify a right circular quadrilateral by its opposite side carriers and
/// return the two orthogonal foliations.
///
/// Sides are given in cyclic order; interior angles must all be 90 degrees
/// (checked to 1e-6).
pub fn foliations(sides: &[CircularArc; 4]) -> Result<FoliationPair> {
    // Angle precondition at the four corners.
    for i in 0..4 {
        let p = sides[i].a;
        let prev = &sides[(i + 3) % 4];
        let ang = crate::hyperbolic::angle_between_arcs(p, prev, &sides[i])?;
        if (ang - 90.0).abs() > 1e-6 * DEG {
            return Err(Error::Precondition(format!(
                "corner angle {ang:.6} not right (corner {i})"
            )));
        }
    }
    let c0 = sides[0].carrier;
    let c2 = sides[2].carrier;
    match (c0, c2) {
        (Carrier::Line(l0), Carrier::Line(l2)) => {
            if crate::geom::cross(l0.dir, l2.dir).abs() < 1e-12 {
                return Ok(FoliationPair {
                    kind: FoliationKind::ParallelLines,
                    family_a: None,
                    family_b: None,
                    to_canonical: None,
                });
            }
            let x = crate::geom::line_line(&l0, &l2)
                .ok_or_else(|| Error::Construction("line crossing".into()))?;
            // Leaves on 0/2: circles centered at the crossing; on 1/3: rays.
            Ok(FoliationPair {
                kind: FoliationKind::CrossingLines,
                family_a: Some(Pencil::Concentric(x)),
                family_b: Some(Pencil::Radial(x)),
                to_canonical: None,
            })
        }
        _ => {
            if c0 == c2 {
                return Ok(FoliationPair {
                    kind: FoliationKind::SameCarrier,
                    family_a: None,
                    family_b: None,
                    to_canonical: None,
                });
            }
            let pts = crate::geom::intersect(&c0, &c2);
            match pts.len() {
                2 => Ok(FoliationPair {
                    kind: FoliationKind::Intersecting,
                    family_a: Some(Pencil::Apollonius(pts[0], pts[1])),
                    family_b: Some(Pencil::ThroughPair(pts[0], pts[1])),
                    to_canonical: None,
                }),
                0 => {
                    let a = orthogonal_pencil(&c0, &c2)?;
                    let b = a.conjugate();
                    Ok(FoliationPair {
                        kind: FoliationKind::Disjoint,
                        family_a: Some(a),
                        family_b: Some(b),
                        to_canonical: None,
                    })
                }
                _ => {
                    // Tangent: conjugate the tangency to infinity.
                    let t = pts[0];
                    let mu = mobius_from_triples(
                        [
                            SpherePoint::Finite(t),
                            SpherePoint::Finite(sides[0].a),
                            SpherePoint::Finite(sides[2].a),
                        ],
                        [
                            SpherePoint::Infinity,
                            SpherePoint::Finite(cx(0.0, 0.0)),
                            SpherePoint::Finite(cx(0.0, 1.0)),
                        ],
                    )?;
                    Ok(FoliationPair {
                        kind: FoliationKind::Tangent,
                        family_a: None,
                        family_b: None,
                        to_canonical: Some(mu),
                    })
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Canonical Carleson triangle
// ---------------------------------------------------------------------------

/// Geometry of the canonical triangle in the upper half-plane: top point
/// w = i(sqrt2+1), ideal base [-1, 1].
#[derive(Debug, Clone)]
pub struct CanonicalTri {
    pub w: Complex,
    pub left: Circle,
    pub right: Circle,
}

pub fn canonical_ctri() -> CanonicalTri {
    CanonicalTri {
        w: cx(0.0, SQRT2 + 1.0),
        left: Circle::new(cx(1.0 + SQRT2, 0.0), 2.0 + SQRT2),
        right: Circle::new(cx(-(1.0 + SQRT2), 0.0), 2.0 + SQRT2),
    }
}

/// The inner right circular triangle at height h: equilateral vertex set of
/// side h(sqrt3 - 1), edges of radius h*sqrt2 meeting at 90 degrees, side
/// edges centered on the real axis (hyperbolic geodesics).
#[derive(Debug, Clone)]
pub struct InnerTri {
    pub h: f64,
    pub v_top: Complex,
    pub b_left: Complex,
    pub b_right: Complex,
    pub m_left: Complex,
    pub m_right: Complex,
    pub m_bottom: Complex,
    pub center: Complex,
    /// Edge carriers: left (center (h,0)), right (center (-h,0)),
    /// bottom (center (0, sqrt3 h)), all of radius h*sqrt2.
    pub c_left: Circle,
    pub c_right: Circle,
    pub c_bottom: Circle,
}

pub fn inner_triangle(h: f64) -> Result<InnerTri> {
    if h <= 0.0 {
        return Err(Error::Precondition("inner triangle height must be positive".into()));
    }
    if h >= 0.8 * (1.0 + SQRT2) {
        return Err(Error::Precondition(format!(
            "inner triangle height {h} too large to fit inside the canonical triangle"
        )));
    }
    let u = (SQRT3 - 1.0) / 2.0;
    Ok(InnerTri {
        h,
        v_top: cx(0.0, h),
        b_left: cx(-u * h, u * h),
        b_right: cx(u * h, u * h),
        m_left: cx((1.0 - 6f64.sqrt() / 2.0) * h, SQRT2 / 2.0 * h),
        m_right: cx(-(1.0 - 6f64.sqrt() / 2.0) * h, SQRT2 / 2.0 * h),
        m_bottom: cx(0.0, (SQRT3 - SQRT2) * h),
        center: cx(0.0, h / SQRT3),
        c_left: Circle::new(cx(h, 0.0), h * SQRT2),
        c_right: Circle::new(cx(-h, 0.0), h * SQRT2),
        c_bottom: Circle::new(cx(0.0, SQRT3 * h), h * SQRT2),
    })
}

/// Canonicalizer for a two-point pencil: maps the base pair to (0, inf) so
/// that ThroughPair members become rays and Apollonius members circles.
struct PencilFrame {
    mu: MobiusMap,
}

impl PencilFrame {
    fn new(p: Complex, q: Complex, anchor: Complex) -> Result<PencilFrame> {
        let mu = mobius_from_triples(
            [
                SpherePoint::Finite(p),
                SpherePoint::Finite(q),
                SpherePoint::Finite(anchor),
            ],
            [
                SpherePoint::Finite(cx(0.0, 0.0)),
                SpherePoint::Infinity,
                SpherePoint::Finite(cx(1.0, 0.0)),
            ],
        )?;
        Ok(PencilFrame { mu })
    }

    fn angle_of(&self, z: Complex) -> f64 {
        self.mu.apply_c(z).arg()
    }

    fn radius_of(&self, z: Complex) -> f64 {
        self.mu.apply_c(z).norm()
    }

    fn point(&self, radius: f64, angle: f64) -> Complex {
        self.mu.inverse().apply_c(Complex::from_polar(radius, angle))
    }
}

/// Coordinate frame for a conjugate pencil pair: the "A" family is measured
/// by one polar coordinate of the canonical frame, its conjugate "B" family
/// by the other.
struct BiFrame {
    frame: PencilFrame,
    /// True when A-members map to rays (A is a ThroughPair pencil).
    a_is_angular: bool,
}

impl BiFrame {
    fn new(a: &Pencil, anchor: Complex) -> Result<BiFrame> {
        let (p, q) = a.base_points();
        let a_is_angular = matches!(a, Pencil::ThroughPair(_, _));
        Ok(BiFrame { frame: PencilFrame::new(p, q, anchor)?, a_is_angular })
    }

    fn a_param(&self, z: Complex, reference: f64) -> f64 {
        if self.a_is_angular {
            unwrap_near(self.frame.angle_of(z), reference)
        } else {
            self.frame.radius_of(z)
        }
    }

    fn b_param(&self, z: Complex, reference: f64) -> f64 {
        if self.a_is_angular {
            self.frame.radius_of(z)
        } else {
            unwrap_near(self.frame.angle_of(z), reference)
        }
    }

    fn point(&self, a_param: f64, b_param: f64) -> Complex {
        if self.a_is_angular {
            self.frame.point(b_param, a_param)
        } else {
            self.frame.point(a_param, b_param)
        }
    }
}

/// Unwrap `raw` into the branch nearest `reference`.
fn unwrap_near(raw: f64, reference: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut x = raw;
    while x - reference > PI {
        x -= tau;
    }
    while reference - x > PI {
        x += tau;
    }
    x
}

/// Output of the canonical triangle mesher.
pub struct CtriMesh {
    pub mesh: CellMesh,
    pub ds: DSequence,
    pub inner: InnerTri,
    /// Connector feet on the left boundary ray (v1, v3, v5).
    pub feet: [Complex; 3],
}

/// Mesh the canonical Carleson triangle.
///
/// `h` is the inner triangle height; rows are placed at the d-sequence built
/// from `n` with the three connector distances inserted.
pub fn mesh_ctri(n: usize, h: f64) -> Result<CtriMesh> {
    if n < 8 {
        return Err(Error::Precondition(format!("N = {n} below minimum 8")));
    }
    let tri = canonical_ctri();
    let it = inner_triangle(h)?;
    let e_left = Carrier::Circle(tri.left);
    let c_l = Carrier::Circle(it.c_left);

    // Left strip pencils.
    let p_lstar = orthogonal_pencil(&c_l, &e_left)?; // ThroughPair(lp1, lp2)
    let (lp1, lp2) = p_lstar.base_points();
    // Inner pencils.
    let b_r_star = match c_l.reflect(it.b_right) {
        SpherePoint::Finite(z) => z,
        SpherePoint::Infinity => return Err(Error::Construction("degenerate reflection".into())),
    };
    let c_r = Carrier::Circle(it.c_right);
    let b_l_star = match c_r.reflect(it.b_left) {
        SpherePoint::Finite(z) => z,
        SpherePoint::Infinity => return Err(Error::Construction("degenerate reflection".into())),
    };
    let pencil_br = Pencil::ThroughPair(it.b_right, b_r_star);
    let pencil_bl = Pencil::ThroughPair(it.b_left, b_l_star);
    let pencil_vt = Pencil::ThroughPair(it.v_top, -it.v_top);

    // Connector feet on the left ray.
    let ray_angle_window = |z: &Complex| {
        let phi = ((z - tri.left.center) / tri.left.radius).arg();
        phi > 3.0 * PI / 4.0 - 1e-9 && phi < PI + 1e-9
    };
    let foot_of = |conn: &Carrier| -> Result<Complex> {
        let hits = crate::geom::intersect(conn, &e_left);
        hits.into_iter()
            .find(ray_angle_window)
            .ok_or_else(|| Error::Construction("connector misses the boundary ray".into()))
    };
    let conn_v = p_lstar.member_through(it.v_top)?;
    let conn_m = p_lstar.member_through(it.m_left)?;
    let conn_b = p_lstar.member_through(it.b_left)?;
    let v1 = foot_of(&conn_v)?;
    let v3 = foot_of(&conn_m)?;
    let v5 = foot_of(&conn_b)?;
    let ray_dist = |z: Complex| -> f64 {
        let phi = ((z - tri.left.center) / tri.left.radius).arg();
        (phi / 2.0).tan().ln() - (3.0 * PI / 8.0).tan().ln()
    };
    let (rho1, rho3, rho5) = (ray_dist(v1), ray_dist(v3), ray_dist(v5));
    let ds = DSequence::build(n, rho1, rho3, rho5)?;
    let (i1, i3, i5) = (ds.i1, ds.i3, ds.i5);
    let m_rows = ds.len();

    // Ray points: index 0 = the top point w, then 1..=M at the d values.
    let pt_left = |d: f64| -> Complex {
        let phi = 2.0 * ((3.0 * PI / 8.0).tan() * d.exp()).atan();
        tri.left.center + Complex::from_polar(tri.left.radius, phi)
    };
    let mirr = |z: Complex| cx(-z.re, z.im);

    let mut mesh = CellMesh::new(CellKind::CarlesonTri);
    let ray_left: Vec<usize> = std::iter::once(tri.w)
        .chain(ds.d.iter().map(|&d| pt_left(d)))
        .map(|z| mesh.push(z, VertexRegion::Outer))
        .collect();
    let ray_right: Vec<usize> = std::iter::once(ray_left[0])
        .chain(ds.d.iter().enumerate().map(|(k, _)| {
            let z = mirr(mesh.vertices[ray_left[k + 1]]);
            mesh.push(z, VertexRegion::Outer)
        }))
        .collect();
    let id_m1 = mesh.push(cx(-1.0, 0.0), VertexRegion::Outer);
    let id_p1 = mesh.push(cx(1.0, 0.0), VertexRegion::Outer);

    // ------------------------------------------------------------------
    // Top quad: biorthogonal pencil pair around the top point.
    // ------------------------------------------------------------------
    let conn_v_right = Carrier::Circle(match conn_v {
        Carrier::Circle(c) => Circle::new(mirr(c.center), c.radius),
        Carrier::Line(_) => return Err(Error::Construction("top connector is a line".into())),
    });
    let a_top = orthogonal_pencil(&e_left, &conn_v_right)?;
    let frame_top = BiFrame::new(&a_top, tri.w)?;
    let a_ref = frame_top.a_param(tri.w, 0.0);
    let b_ref = frame_top.b_param(tri.w, 0.0);
    let mut alpha: Vec<f64> = Vec::with_capacity(i1 + 1);
    let mut rho_t: Vec<f64> = Vec::with_capacity(i1 + 1);
    for j in 0..=i1 {
        let zl = mesh.vertices[ray_left[j]];
        let zr = mesh.vertices[ray_right[j]];
        alpha.push(frame_top.a_param(zl, a_ref));
        rho_t.push(frame_top.b_param(zr, b_ref));
    }
    let mut top_ids = vec![vec![0usize; i1 + 1]; i1 + 1];
    for j in 0..=i1 {
        for k in 0..=i1 {
            let id = if k == 0 {
                ray_left[j]
            } else if j == 0 {
                ray_right[k]
            } else {
                let z = frame_top.point(alpha[j], rho_t[k]);
                mesh.push(z, VertexRegion::Outer)
            };
            top_ids[j][k] = id;
        }
    }
    // v_top is the (i1, i1) corner; retag and snap exactly.
    mesh.vertices[top_ids[i1][i1]] = it.v_top;
    mesh.region[top_ids[i1][i1]] = VertexRegion::InnerBoundary;
    for j in 0..i1 {
        for k in 0..i1 {
            mesh.quads.push([
                top_ids[j][k],
                top_ids[j + 1][k],
                top_ids[j + 1][k + 1],
                top_ids[j][k + 1],
            ]);
        }
    }
    // Carriers for the top quad edges.
    for j in 0..=i1 {
        let leaf_a: Carrier = if j == 0 {
            Carrier::Circle(tri.right)
        } else {
            a_top.member_through(mesh.vertices[ray_left[j]])?
        };
        for k in 0..i1 {
            mesh.set_carrier(top_ids[j][k], top_ids[j][k + 1], leaf_a);
        }
    }
    for k in 0..=i1 {
        let leaf_b: Carrier = if k == 0 {
            Carrier::Circle(tri.left)
        } else {
            a_top.conjugate().member_through(mesh.vertices[ray_right[k]])?
        };
        for j in 0..i1 {
            mesh.set_carrier(top_ids[j][k], top_ids[j + 1][k], leaf_b);
        }
    }

    // ------------------------------------------------------------------
    // Left and right strips (uniform grid from the ray to C_L and on to
    // the base), including the corner quads and terminal rows.
    // ------------------------------------------------------------------
    let frame_l = PencilFrame::new(lp1, lp2, it.v_top)?;
    let alpha_ref = unwrap_near(frame_l.angle_of(mesh.vertices[ray_left[i1]]), 0.0);
    let mut alpha_l: Vec<f64> = Vec::with_capacity(m_rows + 2 - i1);
    for j in i1..=m_rows {
        alpha_l.push(unwrap_near(frame_l.angle_of(mesh.vertices[ray_left[j]]), alpha_ref));
    }
    let alpha_base = unwrap_near(frame_l.angle_of(cx(-1.0, 0.0)), *alpha_l.last().unwrap());
    // Radii of the V-levels: k = 0 is the boundary ray itself; k = i1 is
    // C_L; in between, through the top-quad landings on the v-connector.
    let mut rho_l: Vec<f64> = Vec::with_capacity(i1 + 1);
    for k in 0..=i1 {
        let probe = if k == 0 {
            tri.w
        } else if k == i1 {
            it.v_top
        } else {
            mesh.vertices[top_ids[i1][k]]
        };
        rho_l.push(frame_l.radius_of(probe));
    }
    let p_l = p_lstar.conjugate();
    // Terminal feet of the V-levels on the real axis, inside [-1, v7].
    let v7 = h * (1.0 - SQRT2);
    let foot_on_base = |carrier: &Carrier, lo: f64, hi: f64| -> Result<Complex> {
        let base = Carrier::Line(Line { point: cx(0.0, 0.0), dir: cx(1.0, 0.0) });
        let hits = crate::geom::intersect(carrier, &base);
        hits.into_iter()
            .find(|z| z.re >= lo - 1e-9 && z.re <= hi + 1e-9)
            .ok_or_else(|| Error::Construction("foliation leaf misses its base window".into()))
    };
    // Build both strips; `side` 0 = left, 1 = right (mirrored).
    let mut strip_ids: [Vec<Vec<usize>>; 2] = [Vec::new(), Vec::new()];
    for side in 0..2 {
        let rows = m_rows + 2 - i1; // j = i1..=M plus the terminal base row
        let mut ids = vec![vec![0usize; i1 + 1]; rows];
        for (r, j) in (i1..=m_rows + 1).enumerate() {
            for k in 0..=i1 {
                let id = if j <= m_rows && k == 0 {
                    if side == 0 {
                        ray_left[j]
                    } else {
                        ray_right[j]
                    }
                } else if j == i1 {
                    // Shared row with the top quad along the v-connector.
                    if side == 0 {
                        top_ids[i1][k]
                    } else {
                        top_ids[k][i1]
                    }
                } else if j == m_rows + 1 {
                    // Terminal row on the base.
                    if k == 0 {
                        if side == 0 {
                            id_m1
                        } else {
                            id_p1
                        }
                    } else {
                        let leaf = p_l.member_through(if k == i1 {
                            it.v_top
                        } else {
                            mesh.vertices[top_ids[i1][k]]
                        })?;
                        let f = foot_on_base(&leaf, -1.0, v7)?;
                        let z = if side == 0 { f } else { mirr(f) };
                        mesh.push(z, VertexRegion::Outer)
                    }
                } else {
                    let z = frame_l.point(rho_l[k], alpha_l[r]);
                    let z = if side == 0 { z } else { mirr(z) };
                    let reg = if k == i1 { VertexRegion::InnerBoundary } else { VertexRegion::Outer };
                    mesh.push(z, reg)
                };
                ids[r][k] = id;
            }
        }
        // Retag the shared C_L column for j in (i1..=i5] as inner boundary,
        // and the corner-quad part (j > i5) as outer extension.
        for (r, j) in (i1..=m_rows).enumerate() {
            if j > i1 && j <= i5 {
                mesh.region[ids[r][i1]] = VertexRegion::InnerBoundary;
            }
        }
        for r in 0..rows - 1 {
            for k in 0..i1 {
                let q = [ids[r][k], ids[r][k + 1], ids[r + 1][k + 1], ids[r + 1][k]];
                mesh.quads.push(if side == 0 { q } else { [q[3], q[2], q[1], q[0]] });
            }
        }
        // Carriers: U-leaves along rows (P_Lstar members), V-levels along
        // columns (P_L members).
        for (r, j) in (i1..=m_rows + 1).enumerate() {
            let carrier: Option<Carrier> = if j <= m_rows {
                let z = mesh.vertices[ids[r][0]];
                let zz = if side == 0 { z } else { mirr(z) };
                let c = p_lstar.member_through(zz)?;
                Some(mirror_carrier_if(side == 1, c))
            } else {
                Some(Carrier::Line(Line { point: cx(0.0, 0.0), dir: cx(1.0, 0.0) }))
            };
            if let Some(c) = carrier {
                for k in 0..i1 {
                    mesh.set_carrier(ids[r][k], ids[r][k + 1], c);
                }
            }
        }
        for k in 0..=i1 {
            let probe = if k == 0 {
                tri.w
            } else if k == i1 {
                it.v_top
            } else {
                mesh.vertices[top_ids[i1][k]]
            };
            let c = mirror_carrier_if(side == 1, p_l.member_through(probe)?);
            for r in 0..rows - 1 {
                mesh.set_carrier(ids[r][k], ids[r + 1][k], c);
            }
        }
        strip_ids[side] = ids;
    }

    // ------------------------------------------------------------------
    // Inner triangle quads.
    // ------------------------------------------------------------------
    let n2 = i3 - i1;
    let n3 = i5 - i3;
    // Entry points on C_L (left strip column k = i1): q(d_j) for j in
    // (i1..=i5]; mirrored entries on C_R.
    let entry_l = |j: usize| strip_ids[0][j - i1][i1];
    let entry_r = |j: usize| strip_ids[1][j - i1][i1];

    // quad(v_top): b_right leaves (through entries on upper C_L) crossed
    // with b_left leaves (through entries on upper C_R).
    let frame_br = PencilFrame::new(it.b_right, b_r_star, it.v_top)?;
    let frame_bl = PencilFrame::new(it.b_left, b_l_star, it.v_top)?;
    let frame_vt = PencilFrame::new(it.v_top, -it.v_top, it.m_bottom)?;

    // Straight separators from the center to the edge midpoints: the
    // b-right axis (through b_right, center, m_left) etc.
    let s_point = |j: usize| -> Result<Complex> {
        // Crossing of the b_right leaf through entry_l(j) with the b_left
        // axis segment (center -> m_right).
        let leaf = pencil_br.member_through(mesh.vertices[entry_l(j)])?;
        let axis = Carrier::Line(Line::through(it.center, it.m_right));
        let hits = crate::geom::intersect(&leaf, &axis);
        hits.into_iter()
            .filter(|z| on_segment(it.center, it.m_right, *z, 1e-7))
            .min_by(|a, b| {
                let da = (a - it.center).norm();
                let db = (b - it.center).norm();
                da.partial_cmp(&db).unwrap()
            })
            .ok_or_else(|| Error::Construction("inner leaf misses the separator".into()))
    };

    // quad(v_top) grid: rows j (b_right leaves, j = i1..=i3), cols k
    // (b_left leaves, k = i1..=i3).
    let mut qt_ids = vec![vec![0usize; n2 + 1]; n2 + 1];
    for j in 0..=n2 {
        for k in 0..=n2 {
            let id = if j == 0 {
                entry_r(i1 + k)
            } else if k == 0 {
                entry_l(i1 + j)
            } else if j == n2 && k == n2 {
                mesh.push(it.center, VertexRegion::Inner)
            } else {
                // Intersection of b_right leaf (row) and b_left leaf (col).
                let zl = mesh.vertices[entry_l(i1 + j)];
                let zr = mesh.vertices[entry_r(i1 + k)];
                let beta = frame_br.angle_of(zl);
                let circ = frame_br.mu.push_carrier(&pencil_bl.member_through(zr)?)?;
                let z = ray_circle_pick(&frame_br, beta, &circ, mesh.vertices[qt_prev(&qt_ids, j, k, &mesh)])?;
                let reg = if j == n2 || k == n2 { VertexRegion::Inner } else { VertexRegion::Inner };
                mesh.push(z, reg)
            };
            qt_ids[j][k] = id;
        }
    }
    // Snap the separator landings exactly: row j = n2 lies on the b_right
    // axis (center..m_left), column k = n2 on the b_left axis.
    for k in 1..n2 {
        // These were computed as generic crossings; project onto the axis.
        let a = it.center;
        let b = it.m_left;
        let ln = Line::through(a, b);
        let id = qt_ids[n2][k];
        mesh.vertices[id] = ln.project(mesh.vertices[id]);
    }
    for j in 1..n2 {
        let ln = Line::through(it.center, it.m_right);
        let id = qt_ids[j][n2];
        mesh.vertices[id] = ln.project(mesh.vertices[id]);
    }
    for j in 0..n2 {
        for k in 0..n2 {
            mesh.quads.push([
                qt_ids[j][k],
                qt_ids[j + 1][k],
                qt_ids[j + 1][k + 1],
                qt_ids[j][k + 1],
            ]);
        }
    }
    for j in 0..=n2 {
        let leaf = if j == 0 {
            Carrier::Circle(tri_circle(&it.c_right))
        } else {
            pencil_br.member_through(mesh.vertices[entry_l(i1 + j)])?
        };
        for k in 0..n2 {
            mesh.set_carrier(qt_ids[j][k], qt_ids[j][k + 1], leaf);
        }
    }
    for k in 0..=n2 {
        let leaf = if k == 0 {
            Carrier::Circle(tri_circle(&it.c_left))
        } else {
            pencil_bl.member_through(mesh.vertices[entry_r(i1 + k)])?
        };
        for j in 0..n2 {
            mesh.set_carrier(qt_ids[j][k], qt_ids[j + 1][k], leaf);
        }
    }

    // quad(b_right) and quad(b_left): v_top leaves crossed with the third
    // family, sharing the separator rows and the vertical axis column.
    // Axis points a(d_k) (crossings with the segment center..m_bottom).
    let mut axis_ids: Vec<usize> = Vec::with_capacity(n3 + 1);
    axis_ids.push(qt_ids[n2][n2]); // center
    for k in 1..n3 {
        let leaf = pencil_bl.member_through(mesh.vertices[entry_r(i3 + k)])?;
        let axis = Carrier::Line(Line { point: cx(0.0, 0.0), dir: cx(0.0, 1.0) });
        let hits = crate::geom::intersect(&leaf, &axis);
        let z = hits
            .into_iter()
            .filter(|z| {
                z.im > it.m_bottom.im - 1e-9 && z.im < it.center.im + 1e-9 && z.re.abs() < 1e-7
            })
            .min_by(|a, b| a.im.partial_cmp(&b.im).unwrap())
            .ok_or_else(|| Error::Construction("inner leaf misses the axis".into()))?;
        axis_ids.push(mesh.push(cx(0.0, z.im), VertexRegion::Inner));
    }
    let m_bottom_id = mesh.push(it.m_bottom, VertexRegion::InnerBoundary);
    axis_ids.push(m_bottom_id);

    // Separator points s(d_j) on the b_left axis (center..m_right): these
    // are qt_ids[j][n2]; mirrored ones on the b_right axis are qt_ids[n2][j].
    // Exit points on C_B and the two lower quads.
    let mut qbr_ids = vec![vec![0usize; n3 + 1]; n2 + 1];
    let mut qbl_ids = vec![vec![0usize; n3 + 1]; n2 + 1];
    for j in 0..=n2 {
        for k in 0..=n3 {
            // quad(b_right): rows j = v_top leaves via s(d_{i1+j}),
            // cols k = b_left leaves via axis crossing a(d_{i3+k}).
            let id = if k == 0 {
                qt_ids[j][n2]
            } else if j == n2 {
                axis_ids[k]
            } else if j == 0 {
                entry_r(i3 + k)
            } else if k == n3 {
                // Exit on C_B (right half) along the v_top leaf.
                let leaf = pencil_vt.member_through(mesh.vertices[qt_ids[j][n2]])?;
                let cb = Carrier::Circle(tri_circle(&it.c_bottom));
                let hits = crate::geom::intersect(&leaf, &cb);
                let z = hits
                    .into_iter()
                    .filter(|z| z.re > -1e-9 && z.re < it.b_right.re + 1e-9 && z.im < it.b_right.im + 1e-9)
                    .min_by(|a, b| a.re.partial_cmp(&b.re).unwrap())
                    .ok_or_else(|| Error::Construction("v-leaf misses the bottom edge".into()))?;
                mesh.push(z, VertexRegion::InnerBoundary)
            } else {
                let zs = mesh.vertices[qt_ids[j][n2]];
                let beta = frame_vt.angle_of(zs);
                let circ = frame_vt
                    .mu
                    .push_carrier(&pencil_bl.member_through(mesh.vertices[entry_r(i3 + k)])?)?;
                let z = ray_circle_pick(&frame_vt, beta, &circ, mesh.vertices[qbr_prev(&qbr_ids, j, k, &mesh)])?;
                mesh.push(z, VertexRegion::Inner)
            };
            qbr_ids[j][k] = id;
        }
    }
    for j in 0..=n2 {
        for k in 0..=n3 {
            let id = if k == 0 {
                qt_ids[n2][j]
            } else if j == n2 {
                axis_ids[k]
            } else if j == 0 {
                entry_l(i3 + k)
            } else {
                // Mirror of quad(b_right).
                let src = qbr_ids[j][k];
                let z = mirr(mesh.vertices[src]);
                mesh.push(z, mesh.region[src])
            };
            qbl_ids[j][k] = id;
        }
    }
    for j in 0..n2 {
        for k in 0..n3 {
            mesh.quads.push([
                qbr_ids[j][k],
                qbr_ids[j + 1][k],
                qbr_ids[j + 1][k + 1],
                qbr_ids[j][k + 1],
            ]);
            let q = [
                qbl_ids[j][k],
                qbl_ids[j + 1][k],
                qbl_ids[j + 1][k + 1],
                qbl_ids[j][k + 1],
            ];
            mesh.quads.push([q[3], q[2], q[1], q[0]]);
        }
    }
    // Inner carriers for the two lower quads.
    for j in 0..=n2 {
        let leaf = if j == n2 {
            Carrier::Line(Line { point: cx(0.0, 0.0), dir: cx(0.0, 1.0) })
        } else if j == 0 {
            Carrier::Circle(tri_circle(&it.c_right))
        } else {
            pencil_vt.member_through(mesh.vertices[qt_ids[j][n2]])?
        };
        for k in 0..n3 {
            mesh.set_carrier(qbr_ids[j][k], qbr_ids[j][k + 1], leaf);
            mesh.set_carrier(qbl_ids[j][k], qbl_ids[j][k + 1], mirror_carrier(&leaf));
        }
    }
    for k in 0..=n3 {
        let leaf = if k == 0 {
            Carrier::Line(Line::through(it.center, it.m_right))
        } else if k == n3 {
            Carrier::Circle(tri_circle(&it.c_bottom))
        } else {
            pencil_bl.member_through(mesh.vertices[entry_r(i3 + k)])?
        };
        for j in 0..n2 {
            mesh.set_carrier(qbr_ids[j][k], qbr_ids[j + 1][k], leaf);
            mesh.set_carrier(qbl_ids[j][k], qbl_ids[j + 1][k], mirror_carrier(&leaf));
        }
    }

    // ------------------------------------------------------------------
    // Bottom strip between C_B and the base.
    // ------------------------------------------------------------------
    let frame_b = PencilFrame::new(it.v_top, -it.v_top, it.m_bottom)?;
    // W-leaves ordered from C_L to C_R: the C_L extension, the right-side
    // type-2 exits (from quad(b_left)), the axis, the left-side type-2
    // exits reversed, the C_R extension.
    let mut w_ids_on_cb: Vec<usize> = Vec::new();
    w_ids_on_cb.push(qbl_ids[0][n3].min(usize::MAX)); // placeholder replaced below
    w_ids_on_cb.clear();
    // b_left corner is the strip vertex at (d_{i5}, C_L).
    let b_left_id = strip_ids[0][i5 - i1][i1];
    let b_right_id = strip_ids[1][i5 - i1][i1];
    mesh.region[b_left_id] = VertexRegion::InnerBoundary;
    mesh.region[b_right_id] = VertexRegion::InnerBoundary;
    w_ids_on_cb.push(b_left_id);
    for j in (1..n2).rev() {
        w_ids_on_cb.push(qbl_ids[j][n3]);
    }
    w_ids_on_cb.push(m_bottom_id);
    for j in 1..n2 {
        w_ids_on_cb.push(qbr_ids[j][n3]);
    }
    w_ids_on_cb.push(b_right_id);
    let wn = w_ids_on_cb.len();
    // V'-levels: 0 = C_B (the ids above), 1..=(M-i5) the deep levels via
    // the left-strip column continuations, terminal = base.
    let deep = m_rows - i5;
    let mut bt_ids = vec![vec![0usize; wn]; deep + 2];
    bt_ids[0] = w_ids_on_cb.clone();
    // Radii of the deep levels in the v_top frame, via the strip vertices
    // on the C_L extension.
    let mut rho_b: Vec<f64> = Vec::with_capacity(deep + 1);
    rho_b.push(f64::NAN); // unused slot for level 0
    for v in 1..=deep {
        let z = mesh.vertices[strip_ids[0][i5 - i1 + v][i1]];
        rho_b.push(frame_b.radius_of(z));
    }
    // Angles of the W-leaves in the v_top frame.
    let beta_ref = frame_b.angle_of(it.m_bottom);
    let betas: Vec<f64> = w_ids_on_cb
        .iter()
        .map(|&id| unwrap_near(frame_b.angle_of(mesh.vertices[id]), beta_ref))
        .collect();
    for v in 1..=deep {
        for (wi, &beta) in betas.iter().enumerate() {
            let id = if wi == 0 {
                strip_ids[0][i5 - i1 + v][i1]
            } else if wi == wn - 1 {
                strip_ids[1][i5 - i1 + v][i1]
            } else {
                let z = frame_b.point(rho_b[v], beta);
                mesh.push(z, VertexRegion::Outer)
            };
            bt_ids[v][wi] = id;
        }
    }
    // Terminal row: feet of the W-leaves on the base.
    let v8 = h * (SQRT2 - 1.0);
    for (wi, &id0) in w_ids_on_cb.iter().enumerate() {
        let id = if wi == 0 {
            strip_ids[0][m_rows + 1 - i1][i1]
        } else if wi == wn - 1 {
            strip_ids[1][m_rows + 1 - i1][i1]
        } else if wi == wn / 2 && wn % 2 == 1 {
            mesh.push(cx(0.0, 0.0), VertexRegion::Outer)
        } else {
            let leaf = pencil_vt.member_through(mesh.vertices[id0])?;
            let f = foot_on_base(&leaf, v7, v8)?;
            mesh.push(f, VertexRegion::Outer)
        };
        bt_ids[deep + 1][wi] = id;
    }
    for v in 0..=deep {
        for wi in 0..wn - 1 {
            mesh.quads.push([
                bt_ids[v + 1][wi],
                bt_ids[v + 1][wi + 1],
                bt_ids[v][wi + 1],
                bt_ids[v][wi],
            ]);
        }
    }
    // Carriers: W-leaves along columns (through +-ih), V'-levels along rows.
    for (wi, &id0) in w_ids_on_cb.iter().enumerate() {
        let c = pencil_vt.member_through(mesh.vertices[id0])?;
        for v in 0..=deep {
            mesh.set_carrier(bt_ids[v][wi], bt_ids[v + 1][wi], c);
        }
    }
    for v in 0..=deep + 1 {
        let carrier = if v == 0 {
            Carrier::Circle(tri_circle(&it.c_bottom))
        } else if v == deep + 1 {
            Carrier::Line(Line { point: cx(0.0, 0.0), dir: cx(1.0, 0.0) })
        } else {
            let z = mesh.vertices[strip_ids[0][i5 - i1 + v][i1]];
            pencil_vt.conjugate().member_through(z)?
        };
        for wi in 0..wn - 1 {
            mesh.set_carrier(bt_ids[v][wi], bt_ids[v][wi + 1], carrier);
        }
    }

    // Fix orientation globally (the half-plane grids above are written in
    // mixed orders; normalize every quad to ccw).
    for qi in 0..mesh.quads.len() {
        let q = mesh.quads[qi];
        if mesh.quad_area(&q) < 0.0 {
            mesh.quads[qi] = [q[3], q[2], q[1], q[0]];
        }
    }

    // Traces: rays (w outward, with the ideal corners last) and the base.
    let mut tr_left: Vec<usize> = ray_left.clone();
    tr_left.push(id_m1);
    let mut tr_right: Vec<usize> = ray_right.clone();
    tr_right.push(id_p1);
    let mut tr_base: Vec<usize> = Vec::new();
    // Base from -1 to 1: left-strip terminal row (k = 0..=i1 maps from -1
    // toward v7), bottom terminal, mirrored right-strip terminal reversed.
    let last_l = &strip_ids[0][m_rows + 1 - i1];
    tr_base.extend(last_l.iter().copied());
    tr_base.extend(bt_ids[deep + 1].iter().skip(1).copied());
    let last_r = &strip_ids[1][m_rows + 1 - i1];
    tr_base.extend(last_r.iter().rev().skip(1).copied());
    mesh.traces.push(("ray_left".into(), tr_left));
    mesh.traces.push(("ray_right".into(), tr_right));
    mesh.traces.push(("base".into(), tr_base));

    Ok(CtriMesh { mesh, ds, inner: it, feet: [v1, v3, v5] })
}

fn tri_circle(c: &Circle) -> Circle {
    *c
}

fn mirror_carrier(c: &Carrier) -> Carrier {
    match c {
        Carrier::Circle(ci) => {
            Carrier::Circle(Circle::new(cx(-ci.center.re, ci.center.im), ci.radius))
        }
        Carrier::Line(l) => Carrier::Line(Line {
            point: cx(-l.point.re, l.point.im),
            dir: cx(-l.dir.re, l.dir.im),
        }),
    }
}

fn mirror_carrier_if(flag: bool, c: Carrier) -> Carrier {
    if flag {
        mirror_carrier(&c)
    } else {
        c
    }
}

fn on_segment(a: Complex, b: Complex, z: Complex, tol: f64) -> bool {
    let ab = b - a;
    let t = crate::geom::dot(ab, z - a) / ab.norm_sqr();
    let perp = crate::geom::cross(ab, z - a).abs() / ab.norm();
    t >= -tol && t <= 1.0 + tol && perp <= tol.max(1e-9) * (1.0 + ab.norm())
}

/// Previous-grid predictor for quad(v_top) crossings.
fn qt_prev(ids: &[Vec<usize>], j: usize, k: usize, mesh: &CellMesh) -> usize {
    if k > 1 {
        ids[j][k - 1]
    } else if j > 1 {
        ids[j - 1][k]
    } else {
        let _ = mesh;
        ids[j][k - 1]
    }
}

fn qbr_prev(ids: &[Vec<usize>], j: usize, k: usize, mesh: &CellMesh) -> usize {
    let _ = mesh;
    if k > 1 {
        ids[j][k - 1]
    } else {
        ids[j][k - 1]
    }
}

/// Intersect the frame ray at angle `beta` with a circle in frame
/// coordinates, choosing the root nearest the predictor point.
fn ray_circle_pick(
    frame: &PencilFrame,
    beta: f64,
    circ: &Carrier,
    predictor: Complex,
) -> Result<Complex> {
    let ray = Carrier::Line(Line { point: cx(0.0, 0.0), dir: Complex::from_polar(1.0, beta) });
    let hits = crate::geom::intersect(&ray, circ);
    let back: Vec<Complex> = hits
        .iter()
        .map(|&zeta| frame.mu.inverse().apply_c(zeta))
        .filter(|z| z.im > 0.0)
        .collect();
    back.into_iter()
        .min_by(|a, b| {
            let da = (a - predictor).norm();
            let db = (b - predictor).norm();
            da.partial_cmp(&db).unwrap()
        })
        .ok_or_else(|| Error::Construction("inner crossing not found".into()))
}

// ---------------------------------------------------------------------------
// Snap report
// ---------------------------------------------------------------------------

/// Angle statistics of the straight-edge (chord) mesh.
pub struct SnapReport {
    pub min_angle: f64,
    pub max_angle: f64,
    /// Extremes restricted to quads with at least one inner-region vertex.
    pub inner_min: f64,
    pub inner_max: f64,
    /// Extremes over quads fully outside the inner triangle.
    pub outer_dev_from_90: f64,
    /// Worst |snapped - curved| over all corners.
    pub max_snap_shift: f64,
    pub offenders: Vec<(usize, f64)>,
}

/// Replace every curved edge by its chord and measure all angles.
pub fn snap_check(mesh: &CellMesh) -> SnapReport {
    let mut rep = SnapReport {
        min_angle: f64::INFINITY,
        max_angle: 0.0,
        inner_min: f64::INFINITY,
        inner_max: 0.0,
        outer_dev_from_90: 0.0,
        max_snap_shift: 0.0,
        offenders: Vec::new(),
    };
    for (qi, q) in mesh.quads.iter().enumerate() {
        let angles = mesh.straight_angles(q);
        let inner = q.iter().any(|&v| mesh.region[v] != VertexRegion::Outer);
        for (i, &a) in angles.iter().enumerate() {
            rep.min_angle = rep.min_angle.min(a);
            rep.max_angle = rep.max_angle.max(a);
            if inner {
                rep.inner_min = rep.inner_min.min(a);
                rep.inner_max = rep.inner_max.max(a);
            } else {
                rep.outer_dev_from_90 = rep.outer_dev_from_90.max((a - 90.0).abs());
            }
            let curved = mesh.curved_angle(q, i);
            rep.max_snap_shift = rep.max_snap_shift.max((a - curved).abs());
            if !(60.0 - 1e-6..=120.0 + 1e-6).contains(&a) {
                rep.offenders.push((qi, a));
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::hyp_distance;
    use crate::tessellation::base_pentagon;

    #[test]
    fn dsequence_contract() {
        let ds = DSequence::build(16, 0.9, 1.1, 1.3).unwrap();
        assert!(ds.d[0] < 1.0 / 16.0);
        assert!(*ds.d.last().unwrap() > 16.0);
        assert!((ds.d[ds.i1] - 0.9).abs() < 1e-12);
        assert!((ds.d[ds.i3] - 1.1).abs() < 1e-12);
        assert!((ds.d[ds.i5] - 1.3).abs() < 1e-12);
        for w in ds.d.windows(2) {
            assert!(w[1] - w[0] <= 1.0 / 16.0 + 1e-12);
        }
    }

    #[test]
    fn pentagon_mesh_basics() {
        let p = base_pentagon();
        let n = 8;
        let mesh = mesh_pentagon(&p, n).unwrap();
        assert_eq!(mesh.quads.len(), 5 * (n / 2) * (n / 2));
        // Side traces have N+1 hyperbolically equispaced vertices.
        for i in 0..5 {
            let tr = mesh.trace(&format!("side{i}")).unwrap();
            assert_eq!(tr.len(), n + 1);
            let mut prev = None;
            for w in tr.windows(2) {
                let d = hyp_distance(mesh.vertices[w[0]], mesh.vertices[w[1]]).unwrap();
                if let Some(p) = prev {
                    assert!((d - p as f64).abs() < 1e-9);
                }
                prev = Some(d);
            }
        }
        assert!(mesh_pentagon(&p, 6).is_err());
        assert!(mesh_pentagon(&p, 9).is_err());
    }

    #[test]
    fn pentagon_mesh_curved_angles_in_range() {
        let p = base_pentagon();
        let mesh = mesh_pentagon(&p, 8).unwrap();
        let mut min_a: f64 = 360.0;
        let mut max_a: f64 = 0.0;
        for q in &mesh.quads {
            for i in 0..4 {
                let a = mesh.curved_angle(q, i);
                min_a = min_a.min(a);
                max_a = max_a.max(a);
            }
        }
        assert!(min_a >= 72.0 - 1e-6, "min curved angle {min_a}");
        assert!(max_a <= 108.0 + 1e-6, "max curved angle {max_a}");
        // The 72-degree extreme is attained at the pentagon center.
        assert!(min_a <= 72.0 + 1e-6);
    }

    #[test]
    fn cquad_mesh_orthogonal_and_conforming() {
        let ds = DSequence::build(8, 0.9, 1.1, 1.3).unwrap();
        let mesh = mesh_cquad(8, &ds).unwrap();
        assert_eq!(mesh.quads.len(), 8 * (ds.len() + 1));
        // Curved angles exactly 90 at every corner.
        for q in mesh.quads.iter().step_by(17) {
            for i in 0..4 {
                let a = mesh.curved_angle(q, i);
                assert!((a - 90.0).abs() < 1e-8, "curved angle {a}");
            }
        }
        // Top trace division: N+1 points at hyperbolic spacing L/N along
        // the imaginary axis.
        let top = mesh.trace("top").unwrap();
        assert_eq!(top.len(), 9);
        let l = side_length();
        for w in top.windows(2) {
            let a = mesh.vertices[w[0]];
            let b = mesh.vertices[w[1]];
            let d = crate::hyperbolic::hyp_distance_halfplane(a, b).unwrap();
            assert!((d - l / 8.0).abs() < 1e-10);
        }
    }

    #[test]
    fn cquad_snap_refines() {
        let ds16 = DSequence::build(16, 0.9, 1.1, 1.3).unwrap();
        let ds32 = DSequence::build(32, 0.9, 1.1, 1.3).unwrap();
        let m16 = mesh_cquad(16, &ds16).unwrap();
        let m32 = mesh_cquad(32, &ds32).unwrap();
        let dev16 = snap_check(&m16).outer_dev_from_90;
        let dev32 = snap_check(&m32).outer_dev_from_90;
        assert!(dev32 <= 0.75 * dev16, "dev16 = {dev16:.4}, dev32 = {dev32:.4}");
    }

    #[test]
    fn foliations_canonical_cases() {
        // Annulus sector: concentric circular sides, radial straight sides.
        let c1 = Circle::new(cx(0.0, 0.0), 1.0);
        let c2 = Circle::new(cx(0.0, 0.0), 2.0);
        let sides = [
            CircularArc::on_circle(c1, cx(1.0, 0.0), cx(0.0, 1.0), true),
            CircularArc::segment(cx(0.0, 1.0), cx(0.0, 2.0)),
            CircularArc::on_circle(c2, cx(0.0, 2.0), cx(2.0, 0.0), false),
            CircularArc::segment(cx(2.0, 0.0), cx(1.0, 0.0)),
        ];
        let f = foliations(&sides).unwrap();
        assert_eq!(f.kind, FoliationKind::Disjoint);
        // A-leaves (landing on the concentric sides) are radial lines.
        let leaf = f.leaf_a(cx(0.0, 1.5)).unwrap();
        assert!(leaf.contains(cx(0.0, 0.0), 1e-12) && leaf.contains(cx(0.0, 1.2), 1e-12));
        // B-leaves are concentric circles.
        let leaf_b = f.leaf_b(cx(0.0, 1.5)).unwrap();
        assert!(leaf_b.contains(cx(1.5, 0.0), 1e-9));
        // Euclidean rectangle: parallel-line kind.
        let sides = [
            CircularArc::segment(cx(0.0, 0.0), cx(2.0, 0.0)),
            CircularArc::segment(cx(2.0, 0.0), cx(2.0, 1.0)),
            CircularArc::segment(cx(2.0, 1.0), cx(0.0, 1.0)),
            CircularArc::segment(cx(0.0, 1.0), cx(0.0, 0.0)),
        ];
        let f = foliations(&sides).unwrap();
        assert_eq!(f.kind, FoliationKind::ParallelLines);
        // Bad angles rejected.
        let skew = [
            CircularArc::segment(cx(0.0, 0.0), cx(2.0, 0.5)),
            CircularArc::segment(cx(2.0, 0.5), cx(2.0, 1.0)),
            CircularArc::segment(cx(2.0, 1.0), cx(0.0, 1.0)),
            CircularArc::segment(cx(0.0, 1.0), cx(0.0, 0.0)),
        ];
        assert!(foliations(&skew).is_err());
    }

    #[test]
    fn inner_triangle_cases() {
        let it = inner_triangle(1.0).unwrap();
        // Side length h (sqrt3 - 1).
        let side = (it.b_right - it.v_top).norm();
        assert!((side - 0.7320508).abs() < 1e-6);
        assert!((side - (it.b_right - it.b_left).norm()).abs() < 1e-12);
        // All three corner angles are right angles (orthogonal carriers).
        assert!(it.c_left.orthogonal_residual(&it.c_right).abs() < 1e-12);
        assert!(it.c_left.orthogonal_residual(&it.c_bottom).abs() < 1e-12);
        assert!(it.c_right.orthogonal_residual(&it.c_bottom).abs() < 1e-12);
        // Left/right edges are hyperbolic geodesics: centers on the real axis.
        assert!(it.c_left.center.im.abs() < 1e-15);
        // Vertices actually lie on their circles.
        assert!(it.c_left.contains(it.v_top, 1e-12));
        assert!(it.c_left.contains(it.b_left, 1e-12));
        assert!(it.c_bottom.contains(it.b_left, 1e-12));
        assert!(it.c_bottom.contains(it.b_right, 1e-12));
        assert!(inner_triangle(5.0).is_err());
    }

    #[test]
    fn canonical_tri_angle_at_top() {
        let t = canonical_ctri();
        // The two rays meet at w at a right angle: orthogonal carriers.
        assert!(t.left.orthogonal_residual(&t.right).abs() < 1e-9);
        assert!((t.w.norm() - (SQRT2 + 1.0)).abs() < 1e-12);
        assert!(t.left.contains(t.w, 1e-12));
        assert!(t.left.contains(cx(-1.0, 0.0), 1e-12));
    }

    #[test]
    fn ctri_mesh_small() {
        let out = mesh_ctri(8, 0.35).unwrap();
        let mesh = &out.mesh;
        assert!(!mesh.quads.is_empty());
        // Left/right ray traces are mirror-symmetric.
        let tl = mesh.trace("ray_left").unwrap();
        let tr = mesh.trace("ray_right").unwrap();
        assert_eq!(tl.len(), tr.len());
        for (a, b) in tl.iter().zip(tr.iter()) {
            let za = mesh.vertices[*a];
            let zb = mesh.vertices[*b];
            assert!((za.re + zb.re).abs() < 1e-10 && (za.im - zb.im).abs() < 1e-10);
        }
        // All quads positively oriented and simple.
        for q in &mesh.quads {
            assert!(mesh.quad_area(q) > 0.0, "non-ccw quad");
        }
        // Conformity: every interior edge shared by exactly two quads.
        let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
        for q in &mesh.quads {
            for i in 0..4 {
                let (a, b) = (q[i], q[(i + 1) % 4]);
                *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        for (&(a, b), &c) in &counts {
            assert!(c <= 2, "edge ({a},{b}) shared by {c} quads");
        }
    }

    #[test]
    fn ctri_snap_bounds() {
        let out = mesh_ctri(16, 0.35).unwrap();
        let rep = snap_check(&out.mesh);
        assert!(
            rep.min_angle >= 60.0 - 1e-6 && rep.max_angle <= 120.0 + 1e-6,
            "snapped angles [{:.4}, {:.4}], offenders: {:?}",
            rep.min_angle,
            rep.max_angle,
            &rep.offenders[..rep.offenders.len().min(8)]
        );
    }

    #[test]
    fn ctri_outer_angles_refine() {
        let d16 = snap_check(&mesh_ctri(16, 0.35).unwrap().mesh).outer_dev_from_90;
        let d32 = snap_check(&mesh_ctri(32, 0.35).unwrap().mesh).outer_dev_from_90;
        assert!(d32 <= 0.75 * d16, "dev16 = {d16:.4}, dev32 = {d32:.4}");
    }
}
