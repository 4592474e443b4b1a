//! Euclidean circle/line machinery shared by every module.
//!
//! Circles and lines are treated uniformly as "carriers" (generalized
//! circles on the Riemann sphere). Coaxial pencils of carriers and their
//! conjugate pencils drive the foliation constructions.

use crate::error::{Error, Result};
use num_complex::Complex64 as Complex;

/// Radius beyond which a circle is represented as a line.
pub const LINE_RADIUS_CUTOFF: f64 = 1e6;
/// Generic coincidence tolerance for points.
pub const POINT_TOL: f64 = 1e-12;

pub fn cx(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

pub fn cross(a: Complex, b: Complex) -> f64 {
    a.re * b.im - a.im * b.re
}

pub fn dot(a: Complex, b: Complex) -> f64 {
    a.re * b.re + a.im * b.im
}

/// A point on the Riemann sphere, with infinity kept explicit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complex),
    Infinity,
}

impl SpherePoint {
    pub fn finite(self) -> Option<Complex> {
        match self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    /// Chordal (sphere) distance, used for residual checks near infinity.
    pub fn sphere_dist(self, other: SpherePoint) -> f64 {
        let lift = |p: SpherePoint| -> (f64, f64, f64) {
            match p {
                SpherePoint::Infinity => (0.0, 0.0, 1.0),
                SpherePoint::Finite(z) => {
                    let n = z.norm_sqr();
                    (2.0 * z.re / (n + 1.0), 2.0 * z.im / (n + 1.0), (n - 1.0) / (n + 1.0))
                }
            }
        };
        let (a, b, c) = lift(self);
        let (d, e, f) = lift(other);
        ((a - d).powi(2) + (b - e).powi(2) + (c - f).powi(2)).sqrt()
    }
}

impl From<Complex> for SpherePoint {
    fn from(z: Complex) -> Self {
        SpherePoint::Finite(z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Complex,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Complex, radius: f64) -> Self {
        Circle { center, radius }
    }

    pub fn unit() -> Self {
        Circle { center: Complex::new(0.0, 0.0), radius: 1.0 }
    }

    /// Signed "power" of a point: |z-c|^2 - r^2 (negative inside).
    pub fn power(&self, z: Complex) -> f64 {
        (z - self.center).norm_sqr() - self.radius * self.radius
    }

    pub fn contains(&self, z: Complex, tol: f64) -> bool {
        ((z - self.center).norm() - self.radius).abs() <= tol
    }

    /// Inversion through the circle. Center maps to infinity.
    pub fn invert(&self, z: Complex) -> SpherePoint {
        let d = z - self.center;
        let n = d.norm_sqr();
        if n < POINT_TOL * POINT_TOL {
            return SpherePoint::Infinity;
        }
        SpherePoint::Finite(self.center + d * (self.radius * self.radius / n))
    }

    /// Two circles are orthogonal iff |c1-c2|^2 = r1^2 + r2^2.
    pub fn orthogonal_residual(&self, other: &Circle) -> f64 {
        (self.center - other.center).norm_sqr()
            - (self.radius * self.radius + other.radius * other.radius)
    }
}

/// A line through `point` with unit direction `dir`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub point: Complex,
    pub dir: Complex,
}

impl Line {
    pub fn through(a: Complex, b: Complex) -> Self {
        let d = b - a;
        Line { point: a, dir: d / d.norm() }
    }

    /// Signed distance of z from the line (positive on the left of dir).
    pub fn signed_dist(&self, z: Complex) -> f64 {
        cross(self.dir, z - self.point)
    }

    pub fn contains(&self, z: Complex, tol: f64) -> bool {
        self.signed_dist(z).abs() <= tol
    }

    /// Mirror image of z across the line.
    pub fn reflect(&self, z: Complex) -> Complex {
        let u = (z - self.point) / self.dir;
        self.point + self.dir * u.conj()
    }

    pub fn project(&self, z: Complex) -> Complex {
        self.point + self.dir * dot(self.dir, z - self.point)
    }
}

/// Generalized circle: a circle or a line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Carrier {
    Circle(Circle),
    Line(Line),
}

impl Carrier {
    pub fn contains(&self, z: Complex, tol: f64) -> bool {
        match self {
            Carrier::Circle(c) => c.contains(z, tol),
            Carrier::Line(l) => l.contains(z, tol),
        }
    }

    /// Unsigned distance from a point to the carrier.
    pub fn dist(&self, z: Complex) -> f64 {
        match self {
            Carrier::Circle(c) => ((z - c.center).norm() - c.radius).abs(),
            Carrier::Line(l) => l.signed_dist(z).abs(),
        }
    }

    /// A tangent direction at a point assumed to lie on the carrier.
    pub fn tangent_at(&self, z: Complex) -> Complex {
        match self {
            Carrier::Circle(c) => {
                let r = z - c.center;
                let t = Complex::new(-r.im, r.re);
                t / t.norm()
            }
            Carrier::Line(l) => l.dir,
        }
    }

    /// Reflection (inversion) through the carrier.
    pub fn reflect(&self, z: Complex) -> SpherePoint {
        match self {
            Carrier::Circle(c) => c.invert(z),
            Carrier::Line(l) => SpherePoint::Finite(l.reflect(z)),
        }
    }

    /// Side indicator: negative inside a circle / left of a line.
    pub fn side(&self, z: Complex) -> f64 {
        match self {
            Carrier::Circle(c) => c.power(z),
            Carrier::Line(l) => l.signed_dist(z),
        }
    }

    pub fn as_circle(&self) -> Option<Circle> {
        match self {
            Carrier::Circle(c) => Some(*c),
            Carrier::Line(_) => None,
        }
    }
}

/// Circle (or line, for collinear inputs) through three distinct points.
pub fn circumcircle(a: Complex, b: Complex, c: Complex) -> Result<Carrier> {
    let d = 2.0 * cross(b - a, c - a);
    let ab = (b - a).norm();
    let scale = ab.max((c - a).norm()).max((c - b).norm());
    if scale < POINT_TOL {
        return Err(Error::Degenerate("circumcircle of coincident points".into()));
    }
    // Near-collinear triples degrade to a line.
    if d.abs() < 1e-14 * scale * scale {
        return Ok(Carrier::Line(Line::through(a, c)));
    }
    let an = a.norm_sqr();
    let bn = b.norm_sqr();
    let cn = c.norm_sqr();
    let ux = (an * (b.im - c.im) + bn * (c.im - a.im) + cn * (a.im - b.im)) / d;
    let uy = (an * (c.re - b.re) + bn * (a.re - c.re) + cn * (b.re - a.re)) / d;
    let center = cx(ux, uy);
    let radius = (a - center).norm();
    if radius > LINE_RADIUS_CUTOFF * scale {
        return Ok(Carrier::Line(Line::through(a, c)));
    }
    Ok(Carrier::Circle(Circle::new(center, radius)))
}

/// Intersection points of two carriers (0, 1 or 2 points).
pub fn intersect(a: &Carrier, b: &Carrier) -> Vec<Complex> {
    match (a, b) {
        (Carrier::Circle(c1), Carrier::Circle(c2)) => circle_circle(c1, c2),
        (Carrier::Circle(c), Carrier::Line(l)) | (Carrier::Line(l), Carrier::Circle(c)) => {
            circle_line(c, l)
        }
        (Carrier::Line(l1), Carrier::Line(l2)) => line_line(l1, l2).into_iter().collect(),
    }
}

pub fn line_line(l1: &Line, l2: &Line) -> Option<Complex> {
    let denom = cross(l1.dir, l2.dir);
    if denom.abs() < 1e-14 {
        return None;
    }
    let t = cross(l2.point - l1.point, l2.dir) / denom;
    Some(l1.point + l1.dir * t)
}

fn circle_line(c: &Circle, l: &Line) -> Vec<Complex> {
    let foot = l.project(c.center);
    let d2 = (foot - c.center).norm_sqr();
    let r2 = c.radius * c.radius;
    let disc = r2 - d2;
    if disc < -1e-12 * r2.max(1.0) {
        return vec![];
    }
    if disc <= 0.0 {
        return vec![foot];
    }
    let h = disc.sqrt();
    vec![foot - l.dir * h, foot + l.dir * h]
}

fn circle_circle(c1: &Circle, c2: &Circle) -> Vec<Complex> {
    let d = c2.center - c1.center;
    let dist = d.norm();
    if dist < POINT_TOL {
        return vec![];
    }
    let (r1, r2) = (c1.radius, c2.radius);
    // Distance from c1.center to the radical line along d.
    let a = (dist * dist + r1 * r1 - r2 * r2) / (2.0 * dist);
    let disc = r1 * r1 - a * a;
    let u = d / dist;
    let mid = c1.center + u * a;
    if disc < -1e-12 * (r1 * r1).max(1.0) {
        return vec![];
    }
    if disc <= 0.0 {
        return vec![mid];
    }
    let h = disc.sqrt();
    let n = Complex::new(-u.im, u.re);
    vec![mid - n * h, mid + n * h]
}

/// Unsigned angle between two direction vectors, in radians, in [0, pi].
pub fn angle_between_dirs(u: Complex, v: Complex) -> f64 {
    let c = dot(u, v) / (u.norm() * v.norm());
    c.clamp(-1.0, 1.0).acos()
}

// ---------------------------------------------------------------------------
// Coaxial pencils
// ---------------------------------------------------------------------------

/// A coaxial family of carriers.
///
/// `ThroughPair(p, q)`: all carriers through both p and q (elliptic pencil).
/// `Apollonius(p, q)`: all carriers with constant |z-p|/|z-q| (hyperbolic
/// pencil; the conjugate of `ThroughPair(p, q)`). Every member of one pencil
/// is orthogonal to every member of the other.
#[derive(Debug, Clone, Copy)]
pub enum Pencil {
    ThroughPair(Complex, Complex),
    Apollonius(Complex, Complex),
    /// Lines through a point (the pair {p, infinity}).
    Radial(Complex),
    /// Circles centered at a point (conjugate of `Radial`).
    Concentric(Complex),
}

impl Pencil {
    /// The member of the pencil passing through `z`.
    pub fn member_through(&self, z: Complex) -> Result<Carrier> {
        match *self {
            Pencil::Radial(p) => {
                let d = z - p;
                if d.norm() < POINT_TOL {
                    return Err(Error::Degenerate("radial member through the center".into()));
                }
                Ok(Carrier::Line(Line { point: p, dir: d / d.norm() }))
            }
            Pencil::Concentric(p) => {
                let r = (z - p).norm();
                if r < POINT_TOL {
                    return Err(Error::Degenerate("concentric member of zero radius".into()));
                }
                Ok(Carrier::Circle(Circle::new(p, r)))
            }
            Pencil::ThroughPair(p, q) => circumcircle(p, q, z),
            Pencil::Apollonius(p, q) => {
                let dp = (z - p).norm();
                let dq = (z - q).norm();
                if dq < POINT_TOL {
                    return Err(Error::Degenerate("apollonius member through base point".into()));
                }
                let k = dp / dq;
                if (k - 1.0).abs() < 1e-13 {
                    // Perpendicular bisector of (p, q).
                    let mid = (p + q) * 0.5;
                    let d = q - p;
                    let n = Complex::new(-d.im, d.re);
                    return Ok(Carrier::Line(Line { point: mid, dir: n / n.norm() }));
                }
                let k2 = k * k;
                let center = (p - q * k2) / (1.0 - k2);
                let radius = (k * (p - q).norm() / (1.0 - k2)).abs();
                Ok(Carrier::Circle(Circle::new(center, radius)))
            }
        }
    }

    pub fn conjugate(&self) -> Pencil {
        match *self {
            Pencil::ThroughPair(p, q) => Pencil::Apollonius(p, q),
            Pencil::Apollonius(p, q) => Pencil::ThroughPair(p, q),
            Pencil::Radial(p) => Pencil::Concentric(p),
            Pencil::Concentric(p) => Pencil::Radial(p),
        }
    }

    pub fn base_points(&self) -> (Complex, Complex) {
        match *self {
            Pencil::ThroughPair(p, q) | Pencil::Apollonius(p, q) => (p, q),
            Pencil::Radial(p) | Pencil::Concentric(p) => (p, p),
        }
    }
}

/// Limit points of the coaxial system spanned by two disjoint carriers, or
/// the common points if they intersect.
///
/// Returns the conjugate pencil of {a, b}: the family of all carriers
/// orthogonal to both a and b.
pub fn orthogonal_pencil(a: &Carrier, b: &Carrier) -> Result<Pencil> {
    // Concentric circles: the orthogonal family is radial.
    if let (Carrier::Circle(c1), Carrier::Circle(c2)) = (a, b) {
        if (c1.center - c2.center).norm() < POINT_TOL {
            return Ok(Pencil::Radial(c1.center));
        }
    }
    // Two crossing lines: concentric circles about the crossing.
    if let (Carrier::Line(l1), Carrier::Line(l2)) = (a, b) {
        return match line_line(l1, l2) {
            Some(x) => Ok(Pencil::Concentric(x)),
            None => Err(Error::Degenerate("parallel lines: parabolic pencil".into())),
        };
    }
    let pts = intersect(a, b);
    match pts.len() {
        2 => Ok(Pencil::Apollonius(pts[0], pts[1])),
        1 => Err(Error::Degenerate("tangent carriers: parabolic pencil unsupported".into())),
        _ => {
            let (p, q) = limit_points(a, b)?;
            Ok(Pencil::ThroughPair(p, q))
        }
    }
}

/// The coaxial pencil containing both carriers (they must be disjoint or
/// intersecting; tangency is rejected).
pub fn spanning_pencil(a: &Carrier, b: &Carrier) -> Result<Pencil> {
    Ok(orthogonal_pencil(a, b)?.conjugate())
}

/// Limit points of the coaxial system of two disjoint carriers.
fn limit_points(a: &Carrier, b: &Carrier) -> Result<(Complex, Complex)> {
    match (a, b) {
        (Carrier::Circle(c1), Carrier::Circle(c2)) => {
            let axis_dir = {
                let d = c2.center - c1.center;
                if d.norm() < POINT_TOL {
                    unreachable!("concentric case handled by the caller");
                }
                d / d.norm()
            };
            let t1 = 0.0;
            let t2 = (c2.center - c1.center).norm();
            let (r1, r2) = (c1.radius, c2.radius);
            // In axis coordinates: (s - t1)(u - t1) ... with s+u, s*u unknowns:
            // m - sum*t + t^2 = r^2 at t = t1, t2.
            let a1 = r1 * r1 - t1 * t1;
            let a2 = r2 * r2 - t2 * t2;
            // m - sum*t1 = a1 ; m - sum*t2 = a2
            let sum = (a1 - a2) / (t2 - t1);
            let m = a1 + sum * t1;
            let disc = sum * sum / 4.0 - m;
            if disc <= 0.0 {
                return Err(Error::Degenerate("carriers intersect: no limit points".into()));
            }
            let s = sum / 2.0 - disc.sqrt();
            let u = sum / 2.0 + disc.sqrt();
            Ok((c1.center + axis_dir * s, c1.center + axis_dir * u))
        }
        (Carrier::Circle(c), Carrier::Line(l)) | (Carrier::Line(l), Carrier::Circle(c)) => {
            // Axis: perpendicular from the circle center to the line.
            let foot = l.project(c.center);
            let d = c.center - foot;
            let dist = d.norm();
            if dist < POINT_TOL {
                return Err(Error::Degenerate("line through circle center".into()));
            }
            let u = d / dist;
            // Points foot + u*t with (t - dist)^2 restricted: limit points are
            // inverse w.r.t. circle and mirror w.r.t. line (on the axis):
            // (t1 - dist)(t2 - dist) = r^2 and t1 = -t2 (mirror in line).
            let disc = dist * dist - c.radius * c.radius;
            if disc <= 0.0 {
                return Err(Error::Degenerate("carriers intersect: no limit points".into()));
            }
            let t = disc.sqrt();
            Ok((foot + u * t, foot - u * t))
        }
        (Carrier::Line(_), Carrier::Line(_)) => {
            Err(Error::Degenerate("two lines: parabolic or elliptic only".into()))
        }
    }
}

// ---------------------------------------------------------------------------
// Circular arcs
// ---------------------------------------------------------------------------

/// An arc of a carrier between two endpoints.
///
/// For circles the arc runs counterclockwise from `a` to `b` when `ccw` is
/// true. For lines it is the straight segment.
#[derive(Debug, Clone, Copy)]
pub struct CircularArc {
    pub carrier: Carrier,
    pub a: Complex,
    pub b: Complex,
    pub ccw: bool,
}

impl CircularArc {
    pub fn segment(a: Complex, b: Complex) -> Self {
        CircularArc { carrier: Carrier::Line(Line::through(a, b)), a, b, ccw: true }
    }

    pub fn on_circle(c: Circle, a: Complex, b: Complex, ccw: bool) -> Self {
        CircularArc { carrier: Carrier::Circle(c), a, b, ccw }
    }

    /// Construct the arc from `a` to `b` on `carrier` that passes through
    /// `via` (used to pick the correct side of the circle).
    pub fn through(carrier: Carrier, a: Complex, b: Complex, via: Complex) -> Self {
        match carrier {
            Carrier::Line(_) => CircularArc { carrier, a, b, ccw: true },
            Carrier::Circle(c) => {
                let ta = (a - c.center).arg();
                let tb = (b - c.center).arg();
                let tv = (via - c.center).arg();
                let ccw_span = wrap_pos(tb - ta);
                let via_off = wrap_pos(tv - ta);
                let ccw = via_off <= ccw_span + 1e-12;
                CircularArc { carrier, a, b, ccw }
            }
        }
    }

    /// Tangent direction at an endpoint, pointing into the arc.
    pub fn tangent_into(&self, endpoint: Complex) -> Result<Complex> {
        let at_a = (endpoint - self.a).norm() <= 1e-9 * (1.0 + endpoint.norm());
        let at_b = (endpoint - self.b).norm() <= 1e-9 * (1.0 + endpoint.norm());
        if !at_a && !at_b {
            return Err(Error::Domain("point is not an arc endpoint".into()));
        }
        match self.carrier {
            Carrier::Line(ref l) => {
                let target = if at_a { self.b } else { self.a };
                let d = target - endpoint;
                let _ = l;
                Ok(d / d.norm())
            }
            Carrier::Circle(c) => {
                let r = endpoint - c.center;
                let t = Complex::new(-r.im, r.re) / r.norm();
                // ccw tangent at a points into the arc; at b it points out.
                let sign = match (at_a, self.ccw) {
                    (true, true) | (false, false) => 1.0,
                    _ => -1.0,
                };
                Ok(t * sign)
            }
        }
    }

    pub fn midpoint(&self) -> Complex {
        match self.carrier {
            Carrier::Line(_) => (self.a + self.b) * 0.5,
            Carrier::Circle(c) => {
                let ta = (self.a - c.center).arg();
                let tb = (self.b - c.center).arg();
                let span = if self.ccw { wrap_pos(tb - ta) } else { -wrap_pos(ta - tb) };
                let tm = ta + span / 2.0;
                c.center + Complex::from_polar(c.radius, tm)
            }
        }
    }

    /// Euclidean length of the arc.
    pub fn length(&self) -> f64 {
        match self.carrier {
            Carrier::Line(_) => (self.b - self.a).norm(),
            Carrier::Circle(c) => {
                let ta = (self.a - c.center).arg();
                let tb = (self.b - c.center).arg();
                let span = if self.ccw { wrap_pos(tb - ta) } else { wrap_pos(ta - tb) };
                c.radius * span
            }
        }
    }

    /// Sample `n+1` points along the arc, endpoints included.
    pub fn sample(&self, n: usize) -> Vec<Complex> {
        match self.carrier {
            Carrier::Line(_) => (0..=n)
                .map(|i| {
                    let t = i as f64 / n as f64;
                    self.a + (self.b - self.a) * t
                })
                .collect(),
            Carrier::Circle(c) => {
                let ta = (self.a - c.center).arg();
                let tb = (self.b - c.center).arg();
                let span = if self.ccw { wrap_pos(tb - ta) } else { -wrap_pos(ta - tb) };
                (0..=n)
                    .map(|i| {
                        let t = ta + span * i as f64 / n as f64;
                        c.center + Complex::from_polar(c.radius, t)
                    })
                    .collect()
            }
        }
    }
}

/// Wrap an angle difference into [0, 2*pi).
pub fn wrap_pos(t: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut x = t % two_pi;
    if x < 0.0 {
        x += two_pi;
    }
    x
}

// ---------------------------------------------------------------------------
// Polygon utilities
// ---------------------------------------------------------------------------

/// Signed area of a polygon (positive when counterclockwise).
pub fn polygon_signed_area(pts: &[Complex]) -> f64 {
    let n = pts.len();
    if n < 3 {
        return 0.0;
    }
    // Translate to the first vertex so that tiny polygons keep their sign.
    let o = pts[0];
    let mut s = 0.0;
    for i in 0..n {
        let a = pts[i] - o;
        let b = pts[(i + 1) % n] - o;
        s += cross(a, b);
    }
    s * 0.5
}

pub fn point_in_polygon(pts: &[Complex], z: Complex) -> bool {
    let n = pts.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (pts[i], pts[j]);
        if (a.im > z.im) != (b.im > z.im) {
            let x = a.re + (z.im - a.im) / (b.im - a.im) * (b.re - a.re);
            if z.re < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

pub fn seg_dist(a: Complex, b: Complex, z: Complex) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 < POINT_TOL * POINT_TOL {
        return (z - a).norm();
    }
    let t = (dot(ab, z - a) / len2).clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

/// Proper or improper intersection test for two closed segments.
pub fn segments_intersect(a: Complex, b: Complex, c: Complex, d: Complex) -> bool {
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |p: Complex, q: Complex, r: Complex| -> bool {
        cross(q - p, r - p).abs() < 1e-14
            && r.re >= p.re.min(q.re) - 1e-14
            && r.re <= p.re.max(q.re) + 1e-14
            && r.im >= p.im.min(q.im) - 1e-14
            && r.im <= p.im.max(q.im) + 1e-14
    };
    on(a, b, c) || on(a, b, d) || on(c, d, a) || on(c, d, b)
}

/// Checks that a closed polygon is simple (no two non-adjacent edges meet).
pub fn polygon_is_simple(pts: &[Complex]) -> bool {
    let n = pts.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        for j in i + 1..n {
            // Skip adjacent edges (they share a vertex).
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let (c, d) = (pts[j], pts[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circumcircle_unit() {
        let c = circumcircle(cx(1.0, 0.0), cx(0.0, 1.0), cx(-1.0, 0.0)).unwrap();
        match c {
            Carrier::Circle(c) => {
                assert!((c.center.norm()) < 1e-12);
                assert!((c.radius - 1.0).abs() < 1e-12);
            }
            _ => panic!("expected circle"),
        }
    }

    #[test]
    fn circumcircle_collinear_gives_line() {
        let c = circumcircle(cx(0.0, 0.0), cx(1.0, 0.0), cx(2.0, 0.0)).unwrap();
        assert!(matches!(c, Carrier::Line(_)));
    }

    #[test]
    fn circle_circle_intersection() {
        let a = Carrier::Circle(Circle::new(cx(0.0, 0.0), 1.0));
        let b = Carrier::Circle(Circle::new(cx(1.0, 0.0), 1.0));
        let pts = intersect(&a, &b);
        assert_eq!(pts.len(), 2);
        for p in pts {
            assert!(a.contains(p, 1e-12) && b.contains(p, 1e-12));
        }
    }

    #[test]
    fn apollonius_member_is_orthogonal_to_through_pair() {
        let p = cx(-1.0, 0.0);
        let q = cx(1.0, 0.0);
        let thr = Pencil::ThroughPair(p, q).member_through(cx(0.0, 2.0)).unwrap();
        let apo = Pencil::Apollonius(p, q).member_through(cx(0.4, 0.3)).unwrap();
        if let (Carrier::Circle(c1), Carrier::Circle(c2)) = (thr, apo) {
            assert!(c1.orthogonal_residual(&c2).abs() < 1e-10);
        } else {
            panic!("expected circles");
        }
    }

    #[test]
    fn orthogonal_pencil_of_disjoint_circles() {
        let a = Carrier::Circle(Circle::new(cx(0.0, 0.0), 1.0));
        let b = Carrier::Circle(Circle::new(cx(5.0, 0.0), 1.0));
        let p = orthogonal_pencil(&a, &b).unwrap();
        let m = p.member_through(cx(2.0, 1.0)).unwrap();
        if let (Carrier::Circle(ca), Carrier::Circle(cm)) = (a, m) {
            assert!(cm.orthogonal_residual(&ca).abs() < 1e-9);
        }
        if let (Carrier::Circle(cb), Carrier::Circle(cm)) = (b, m) {
            assert!(cm.orthogonal_residual(&cb).abs() < 1e-9);
        }
    }

    #[test]
    fn simple_polygon_checks() {
        let square = vec![cx(0.0, 0.0), cx(1.0, 0.0), cx(1.0, 1.0), cx(0.0, 1.0)];
        assert!(polygon_is_simple(&square));
        assert!(polygon_signed_area(&square) > 0.0);
        let bowtie = vec![cx(0.0, 0.0), cx(1.0, 1.0), cx(1.0, 0.0), cx(0.0, 1.0)];
        assert!(!polygon_is_simple(&bowtie));
        assert!(point_in_polygon(&square, cx(0.5, 0.5)));
        assert!(!point_in_polygon(&square, cx(1.5, 0.5)));
    }

    #[test]
    fn arc_tangents() {
        let c = Circle::new(cx(0.0, 0.0), 1.0);
        let arc = CircularArc::on_circle(c, cx(1.0, 0.0), cx(0.0, 1.0), true);
        let t = arc.tangent_into(cx(1.0, 0.0)).unwrap();
        assert!((t - cx(0.0, 1.0)).norm() < 1e-12);
        let t2 = arc.tangent_into(cx(0.0, 1.0)).unwrap();
        assert!((t2 - cx(1.0, 0.0)).norm() < 1e-12);
    }
}
