//! Hyperbolic geometry on the unit disk and the upper half-plane.
//!
//! The metric carries the curvature -1 normalization 2|dz|/(1-|z|^2) on the
//! disk and |dz|/y on the half-plane, so distances match the standard
//! trigonometric identities (second law of cosines, Lambert relation).

use crate::error::{Error, Result};
use crate::geom::{
    angle_between_dirs, circumcircle, cx, Carrier, Circle, CircularArc, Line, SpherePoint,
    POINT_TOL,
};
use num_complex::Complex64 as Complex;
use std::f64::consts::PI;

pub const DEG: f64 = 180.0 / PI;

/// Which conformal model a geodesic lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Disk,
    HalfPlane,
}

// ---------------------------------------------------------------------------
// Mobius transformations
// ---------------------------------------------------------------------------

/// Linear fractional map z -> (az + b) / (cz + d).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub d: Complex,
}

impl MobiusMap {
    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() < 1e-14 {
            return Err(Error::Degenerate("mobius map with vanishing determinant".into()));
        }
        Ok(MobiusMap { a, b, c, d })
    }

    pub fn identity() -> Self {
        MobiusMap { a: cx(1.0, 0.0), b: cx(0.0, 0.0), c: cx(0.0, 0.0), d: cx(1.0, 0.0) }
    }

    pub fn apply(&self, p: SpherePoint) -> SpherePoint {
        match p {
            SpherePoint::Infinity => {
                if self.c.norm() < 1e-300 {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(self.a / self.c)
                }
            }
            SpherePoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm() < 1e-300 {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Apply to a finite point expected to stay finite.
    pub fn apply_c(&self, z: Complex) -> Complex {
        match self.apply(SpherePoint::Finite(z)) {
            SpherePoint::Finite(w) => w,
            SpherePoint::Infinity => Complex::new(f64::INFINITY, f64::INFINITY),
        }
    }

    pub fn inverse(&self) -> MobiusMap {
        MobiusMap { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// self after `other`: (self ∘ other)(z) = self(other(z)).
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        MobiusMap {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    /// Derivative at a finite point.
    pub fn derivative(&self, z: Complex) -> Complex {
        let det = self.a * self.d - self.b * self.c;
        let den = self.c * z + self.d;
        det / (den * den)
    }

    /// The map sending (p1, p2, p3) to (0, 1, infinity).
    fn to_zero_one_inf(p1: SpherePoint, p2: SpherePoint, p3: SpherePoint) -> Result<MobiusMap> {
        use SpherePoint::*;
        let m = match (p1, p2, p3) {
            (Finite(a), Finite(b), Finite(c)) => MobiusMap {
                a: b - c,
                b: -a * (b - c),
                c: b - a,
                d: -c * (b - a),
            },
            (Infinity, Finite(b), Finite(c)) => {
                // (b - c) / (z - c)
                MobiusMap { a: cx(0.0, 0.0), b: b - c, c: cx(1.0, 0.0), d: -c }
            }
            (Finite(a), Infinity, Finite(c)) => {
                // (z - a) / (z - c)
                MobiusMap { a: cx(1.0, 0.0), b: -a, c: cx(1.0, 0.0), d: -c }
            }
            (Finite(a), Finite(b), Infinity) => {
                // (z - a) / (b - a)
                MobiusMap { a: cx(1.0, 0.0), b: -a, c: cx(0.0, 0.0), d: b - a }
            }
            _ => return Err(Error::Degenerate("repeated infinity in triple".into())),
        };
        MobiusMap::new(m.a, m.b, m.c, m.d)
    }

    /// Push a carrier forward by mapping three of its points and rebuilding.
    pub fn push_carrier(&self, carrier: &Carrier) -> Result<Carrier> {
        let pts = three_points_on(carrier);
        let imgs: Vec<Complex> = pts
            .iter()
            .map(|&p| match self.apply(SpherePoint::Finite(p)) {
                SpherePoint::Finite(w) => Ok(w),
                SpherePoint::Infinity => {
                    Err(Error::Degenerate("carrier image passes through infinity".into()))
                }
            })
            .collect::<Result<_>>()?;
        circumcircle(imgs[0], imgs[1], imgs[2])
    }
}

fn three_points_on(carrier: &Carrier) -> [Complex; 3] {
    match carrier {
        Carrier::Line(l) => [l.point, l.point + l.dir, l.point - l.dir],
        Carrier::Circle(c) => [
            c.center + cx(c.radius, 0.0),
            c.center + cx(0.0, c.radius),
            c.center - cx(c.radius, 0.0),
        ],
    }
}

/// The unique Mobius transformation sending w_k to z_k for k = 1, 2, 3.
pub fn mobius_from_triples(
    w: [SpherePoint; 3],
    z: [SpherePoint; 3],
) -> Result<MobiusMap> {
    for pair in [(w[0], w[1]), (w[0], w[2]), (w[1], w[2])] {
        if pair.0.sphere_dist(pair.1) < 1e-14 {
            return Err(Error::Degenerate("coincident points in source triple".into()));
        }
    }
    for pair in [(z[0], z[1]), (z[0], z[2]), (z[1], z[2])] {
        if pair.0.sphere_dist(pair.1) < 1e-14 {
            return Err(Error::Degenerate("coincident points in target triple".into()));
        }
    }
    let s = MobiusMap::to_zero_one_inf(w[0], w[1], w[2])?;
    let t = MobiusMap::to_zero_one_inf(z[0], z[1], z[2])?;
    Ok(t.inverse().compose(&s))
}

/// Automorphism of the unit disk z -> lambda (z - a) / (1 - conj(a) z).
#[derive(Debug, Clone, Copy)]
pub struct DiskAutomorphism {
    pub a: Complex,
    pub lambda: Complex,
}

impl DiskAutomorphism {
    pub fn new(a: Complex, lambda: Complex) -> Result<Self> {
        if a.norm() >= 1.0 {
            return Err(Error::Domain("automorphism center outside open disk".into()));
        }
        if (lambda.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Domain("rotation factor must be unimodular".into()));
        }
        Ok(DiskAutomorphism { a, lambda })
    }

    pub fn to_mobius(&self) -> MobiusMap {
        MobiusMap {
            a: self.lambda,
            b: -self.lambda * self.a,
            c: -self.a.conj(),
            d: cx(1.0, 0.0),
        }
    }

    pub fn apply(&self, z: Complex) -> Complex {
        self.lambda * (z - self.a) / (cx(1.0, 0.0) - self.a.conj() * z)
    }
}

// ---------------------------------------------------------------------------
// Metric
// ---------------------------------------------------------------------------

/// Hyperbolic distance in the unit disk.
pub fn hyp_distance(z: Complex, w: Complex) -> Result<f64> {
    if z.norm() >= 1.0 || w.norm() >= 1.0 {
        return Err(Error::Domain("hyp_distance: point not in open unit disk".into()));
    }
    let num = (z - w).norm();
    let den = (cx(1.0, 0.0) - z.conj() * w).norm();
    let t = num / den;
    Ok(2.0 * t.atanh())
}

/// Hyperbolic distance in the upper half-plane.
pub fn hyp_distance_halfplane(v: Complex, w: Complex) -> Result<f64> {
    if v.im <= 0.0 || w.im <= 0.0 {
        return Err(Error::Domain("hyp_distance_halfplane: point not in upper half-plane".into()));
    }
    let t = 1.0 + (v - w).norm_sqr() / (2.0 * v.im * w.im);
    Ok(t.acosh())
}

/// Euclidean radius corresponding to hyperbolic distance rho from 0.
pub fn euclid_radius(rho: f64) -> f64 {
    (rho / 2.0).tanh()
}

/// Side length from the three angles, by the second hyperbolic law of
/// cosines: cosh c = (cos a cos b + cos g) / (sin a sin b).
pub fn second_law_cosines(alpha: f64, beta: f64, gamma: f64) -> Result<f64> {
    let sum = alpha + beta + gamma;
    // Angle sum exactly pi is the degenerate Euclidean limit (c = 0).
    if sum > PI + 1e-12 {
        return Err(Error::NoSuchTriangle(sum));
    }
    if alpha <= 0.0 || beta <= 0.0 || gamma < 0.0 {
        return Err(Error::Domain("triangle angles must be positive".into()));
    }
    let ch = (alpha.cos() * beta.cos() + gamma.cos()) / (alpha.sin() * beta.sin());
    Ok(ch.max(1.0).acosh())
}

/// Fourth angle of a Lambert quadrilateral: cos(phi) = sinh a sinh b.
pub fn lambert_phi(a: f64, b: f64) -> Result<f64> {
    if a < 0.0 || b < 0.0 {
        return Err(Error::Domain("lambert_phi: side lengths must be nonnegative".into()));
    }
    let p = a.sinh() * b.sinh();
    if p > 1.0 {
        return Err(Error::NoSuchQuadrilateral(p));
    }
    Ok(p.acos())
}

/// Area of a hyperbolic triangle: pi - alpha - beta - gamma.
pub fn hyp_triangle_area(alpha: f64, beta: f64, gamma: f64) -> Result<f64> {
    let sum = alpha + beta + gamma;
    if sum >= PI || alpha < 0.0 || beta < 0.0 || gamma < 0.0 {
        return Err(Error::NoSuchTriangle(sum));
    }
    Ok(PI - sum)
}

// ---------------------------------------------------------------------------
// Geodesics
// ---------------------------------------------------------------------------

/// A complete geodesic, stored as its carrier plus ideal endpoints.
#[derive(Debug, Clone, Copy)]
pub struct Geodesic {
    pub model: Model,
    pub carrier: Carrier,
    pub p: SpherePoint,
    pub q: SpherePoint,
}

impl Geodesic {
    /// Geodesic of the disk through two points of the closed disk.
    pub fn disk_through(p: Complex, q: Complex) -> Result<Geodesic> {
        if (p - q).norm() < POINT_TOL {
            return Err(Error::Degenerate("geodesic through coincident points".into()));
        }
        if p.norm() > 1.0 + 1e-9 || q.norm() > 1.0 + 1e-9 {
            return Err(Error::Domain("geodesic endpoints outside closed disk".into()));
        }
        // Diameter case: p, q, 0 collinear.
        let carrier = if crate::geom::cross(p, q).abs() < 1e-13 * (p.norm() * q.norm()).max(1e-30)
            || p.norm() < POINT_TOL
            || q.norm() < POINT_TOL
        {
            let dir = if p.norm() > q.norm() { p } else { q };
            Carrier::Line(Line { point: cx(0.0, 0.0), dir: dir / dir.norm() })
        } else {
            // Solve 2 Re(conj(c) p) = |p|^2 + 1 and same for q.
            let (a1, b1, r1) = (2.0 * p.re, 2.0 * p.im, p.norm_sqr() + 1.0);
            let (a2, b2, r2) = (2.0 * q.re, 2.0 * q.im, q.norm_sqr() + 1.0);
            let det = a1 * b2 - a2 * b1;
            if det.abs() < 1e-14 {
                return Err(Error::Degenerate("ill-conditioned geodesic carrier solve".into()));
            }
            let cxr = (r1 * b2 - r2 * b1) / det;
            let cyr = (a1 * r2 - a2 * r1) / det;
            let center = cx(cxr, cyr);
            let radius = (center.norm_sqr() - 1.0).sqrt();
            Carrier::Circle(Circle::new(center, radius))
        };
        let (ip, iq) = ideal_endpoints_disk(&carrier)?;
        // Order ideal endpoints so that ip is nearest p.
        let (ip, iq) = if (ip - p).norm() + (iq - q).norm() <= (iq - p).norm() + (ip - q).norm() {
            (ip, iq)
        } else {
            (iq, ip)
        };
        Ok(Geodesic {
            model: Model::Disk,
            carrier,
            p: SpherePoint::Finite(ip),
            q: SpherePoint::Finite(iq),
        })
    }

    /// Geodesic of the half-plane through two points (boundary points on the
    /// extended real line allowed).
    pub fn halfplane_through(p: SpherePoint, q: SpherePoint) -> Result<Geodesic> {
        use SpherePoint::*;
        let (carrier, ip, iq) = match (p, q) {
            (Infinity, Finite(z)) | (Finite(z), Infinity) => {
                let line = Line { point: cx(z.re, 0.0), dir: cx(0.0, 1.0) };
                (Carrier::Line(line), Finite(cx(z.re, 0.0)), Infinity)
            }
            (Finite(a), Finite(b)) => {
                if (a - b).norm() < POINT_TOL {
                    return Err(Error::Degenerate("geodesic through coincident points".into()));
                }
                if (a.re - b.re).abs() < 1e-13 * (1.0 + a.norm().max(b.norm())) {
                    let line = Line { point: cx(a.re, 0.0), dir: cx(0.0, 1.0) };
                    (Carrier::Line(line), Finite(cx(a.re, 0.0)), Infinity)
                } else {
                    // Center on the real axis equidistant from a and b.
                    let xc = (b.norm_sqr() - a.norm_sqr()) / (2.0 * (b.re - a.re));
                    let center = cx(xc, 0.0);
                    let radius = (a - center).norm();
                    (
                        Carrier::Circle(Circle::new(center, radius)),
                        Finite(center - cx(radius, 0.0)),
                        Finite(center + cx(radius, 0.0)),
                    )
                }
            }
            (Infinity, Infinity) => {
                return Err(Error::Degenerate("geodesic through coincident points".into()))
            }
        };
        Ok(Geodesic { model: Model::HalfPlane, carrier, p: ip, q: iq })
    }

    /// Residual of orthogonality against the model boundary.
    pub fn orthogonality_residual(&self) -> f64 {
        match (self.model, &self.carrier) {
            (Model::Disk, Carrier::Circle(c)) => c.orthogonal_residual(&Circle::unit()),
            (Model::Disk, Carrier::Line(l)) => l.signed_dist(cx(0.0, 0.0)).abs(),
            (Model::HalfPlane, Carrier::Circle(c)) => c.center.im.abs(),
            (Model::HalfPlane, Carrier::Line(l)) => l.dir.re.abs(),
        }
    }

    /// Hyperbolic distance from an interior point to this geodesic.
    pub fn dist_to(&self, z: Complex) -> Result<f64> {
        // Map the geodesic endpoints to 0 and infinity in the half-plane;
        // dist(x + iy, imaginary axis) = asinh(|x| / y).
        let m = mobius_from_triples(
            [self.p, self.q, SpherePoint::Finite(self.a_point())],
            [
                SpherePoint::Finite(cx(0.0, 0.0)),
                SpherePoint::Infinity,
                SpherePoint::Finite(cx(0.0, 1.0)),
            ],
        )?;
        match m.apply(SpherePoint::Finite(z)) {
            SpherePoint::Finite(w) => {
                if w.im <= 0.0 {
                    // The third anchor fixed the wrong side; flip.
                    let w = -w;
                    Ok((w.re.abs() / w.im).asinh())
                } else {
                    Ok((w.re.abs() / w.im).asinh())
                }
            }
            SpherePoint::Infinity => Err(Error::Domain("distance from infinity".into())),
        }
    }

    /// Some finite point on the geodesic (used as a Mobius anchor).
    fn a_point(&self) -> Complex {
        match &self.carrier {
            Carrier::Line(l) => match self.model {
                Model::Disk => l.point,
                Model::HalfPlane => l.point + l.dir,
            },
            Carrier::Circle(c) => match self.model {
                // Point of the carrier closest to the origin.
                Model::Disk => c.center * (1.0 - c.radius / c.center.norm()),
                Model::HalfPlane => c.center + cx(0.0, c.radius),
            },
        }
    }

    /// Top point: the point of the geodesic closest to the model's base point
    /// (disk center, or i for the half-plane).
    pub fn top_point(&self) -> Complex {
        self.a_point()
    }
}

fn ideal_endpoints_disk(carrier: &Carrier) -> Result<(Complex, Complex)> {
    let unit = Carrier::Circle(Circle::unit());
    let pts = crate::geom::intersect(carrier, &unit);
    if pts.len() != 2 {
        return Err(Error::Degenerate(format!(
            "geodesic carrier does not meet the circle twice: {carrier:?}, {} hits",
            pts.len()
        )));
    }
    Ok((pts[0], pts[1]))
}

/// Hyperbolic distance between two disjoint geodesics via the cross-ratio of
/// their ideal endpoints; zero if they intersect.
pub fn geodesic_distance(g1: &Geodesic, g2: &Geodesic) -> Result<f64> {
    let pts = crate::geom::intersect(&g1.carrier, &g2.carrier);
    let interior = |z: &Complex| match g1.model {
        Model::Disk => z.norm() < 1.0 - 1e-12,
        Model::HalfPlane => z.im > 1e-12,
    };
    if pts.iter().any(interior) {
        return Ok(0.0);
    }
    let fin = |p: SpherePoint| p.finite();
    let (a, b) = (fin(g1.p), fin(g1.q));
    let (c, d) = (fin(g2.p), fin(g2.q));
    // Cross ratio with infinity handled by dropping the two factors.
    let diff = |x: Option<Complex>, y: Option<Complex>| -> Complex {
        match (x, y) {
            (Some(u), Some(v)) => u - v,
            _ => cx(1.0, 0.0),
        }
    };
    // chi = (a-c)(b-d) / ((a-d)(b-c))
    let chi = (diff(a, c) * diff(b, d)) / (diff(a, d) * diff(b, c));
    let mut x = chi.re.abs();
    // Use the arrangement that yields a value in (0, 1].
    if x > 1.0 {
        x = 1.0 / x;
    }
    Ok(2.0 * x.sqrt().atanh())
}

// ---------------------------------------------------------------------------
// Segments and rays
// ---------------------------------------------------------------------------

/// A geodesic segment; either endpoint may be ideal (infinite length).
#[derive(Debug, Clone)]
pub struct HypSegment {
    pub geodesic: Geodesic,
    pub start: Complex,
    pub end: SpherePoint,
    pub length: f64,
}

impl HypSegment {
    pub fn new(geodesic: Geodesic, start: Complex, end: Complex) -> Result<Self> {
        let length = match geodesic.model {
            Model::Disk => hyp_distance(start, end)?,
            Model::HalfPlane => hyp_distance_halfplane(start, end)?,
        };
        Ok(HypSegment { geodesic, start, end: SpherePoint::Finite(end), length })
    }

    pub fn ray(geodesic: Geodesic, start: Complex, ideal_end: SpherePoint) -> Self {
        HypSegment { geodesic, start, end: ideal_end, length: f64::INFINITY }
    }

    /// The point at hyperbolic distance `d` from the start toward the end.
    pub fn point_at_distance(&self, d: f64) -> Result<Complex> {
        if d < 0.0 || d > self.length + 1e-12 {
            return Err(Error::Domain(format!("distance {d} out of segment range")));
        }
        if d == 0.0 {
            return Ok(self.start);
        }
        match (&self.geodesic.carrier, self.geodesic.model) {
            (Carrier::Circle(c), Model::HalfPlane) => {
                // Arc length along a half-plane semicircle: s = log tan(phi/2).
                let phi0 = ((self.start - c.center) / c.radius).arg();
                let target = match self.end {
                    SpherePoint::Finite(e) => ((e - c.center) / c.radius).arg(),
                    SpherePoint::Infinity => unreachable!("semicircle has finite endpoints"),
                };
                let s0 = (phi0 / 2.0).tan().ln();
                let sign = if target > phi0 { 1.0 } else { -1.0 };
                let s1 = s0 + sign * d;
                let phi1 = 2.0 * s1.exp().atan();
                Ok(c.center + Complex::from_polar(c.radius, phi1))
            }
            (Carrier::Line(l), Model::HalfPlane) => {
                // Vertical line: moving distance d multiplies height by e^d.
                let dirs = match self.end {
                    SpherePoint::Infinity => 1.0,
                    SpherePoint::Finite(e) => {
                        if e.im > self.start.im {
                            1.0
                        } else {
                            -1.0
                        }
                    }
                };
                let _ = l;
                Ok(cx(self.start.re, self.start.im * (dirs * d).exp()))
            }
            (_, Model::Disk) => {
                // Normalize start to the origin, advance along the image
                // geodesic (a diameter), and map back.
                let g = DiskAutomorphism::new(self.start, cx(1.0, 0.0))?;
                let m = g.to_mobius();
                let target = match self.end {
                    SpherePoint::Finite(e) => m.apply_c(e),
                    SpherePoint::Infinity => {
                        return Err(Error::Domain("ideal endpoint inside disk model".into()))
                    }
                };
                let dir = target / target.norm();
                let r = euclid_radius(d);
                Ok(m.inverse().apply_c(dir * r))
            }
        }
    }
}

/// Unsigned angle between two arcs at a shared endpoint, in degrees.
pub fn angle_between_arcs(p: Complex, a1: &CircularArc, a2: &CircularArc) -> Result<f64> {
    let t1 = a1.tangent_into(p)?;
    let t2 = a2.tangent_into(p)?;
    Ok(angle_between_dirs(t1, t2) * DEG)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::cx;

    const SQ2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn identity_triple() {
        let w = [
            SpherePoint::Finite(cx(0.0, 0.0)),
            SpherePoint::Finite(cx(1.0, 0.0)),
            SpherePoint::Infinity,
        ];
        let m = mobius_from_triples(w, w).unwrap();
        // Identity up to scale: b = c = 0, a = d.
        assert!(m.b.norm() < 1e-12 && m.c.norm() < 1e-12);
        assert!((m.a / m.d - cx(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn triple_round_trip() {
        let w = [
            SpherePoint::Finite(cx(-1.0, 0.0)),
            SpherePoint::Finite(cx(1.0, 0.0)),
            SpherePoint::Finite(cx(0.0, 1.0 / (SQ2 - 1.0))),
        ];
        let z = [
            SpherePoint::Finite(cx(0.3, 0.4)),
            SpherePoint::Finite(cx(-0.2, 0.9)),
            SpherePoint::Finite(cx(2.0, -1.0)),
        ];
        let m = mobius_from_triples(w, z).unwrap();
        let inv = m.inverse();
        for (src, dst) in w.iter().zip(z.iter()) {
            let img = m.apply(*src);
            assert!(img.sphere_dist(*dst) < 1e-10);
            let back = inv.apply(img);
            assert!(back.sphere_dist(*src) < 1e-10);
        }
    }

    #[test]
    fn real_line_to_unit_circle() {
        // (0, 1, inf) -> (1, i, -1) maps the real line onto the unit circle.
        let w = [
            SpherePoint::Finite(cx(0.0, 0.0)),
            SpherePoint::Finite(cx(1.0, 0.0)),
            SpherePoint::Infinity,
        ];
        let z = [
            SpherePoint::Finite(cx(1.0, 0.0)),
            SpherePoint::Finite(cx(0.0, 1.0)),
            SpherePoint::Finite(cx(-1.0, 0.0)),
        ];
        let m = mobius_from_triples(w, z).unwrap();
        let mut max_err: f64 = 0.0;
        for i in 0..100 {
            let x = -50.0 + i as f64;
            if let SpherePoint::Finite(img) = m.apply(SpherePoint::Finite(cx(x, 0.0))) {
                max_err = max_err.max((img.norm() - 1.0).abs());
            }
        }
        assert!(max_err < 1e-10, "max_err = {max_err}");
    }

    #[test]
    fn distance_basics() {
        let d = hyp_distance(cx(0.0, 0.0), cx(0.5, 0.0)).unwrap();
        assert!((d - 3f64.ln()).abs() < 1e-12);
        let z = cx(0.3, -0.2);
        assert_eq!(hyp_distance(z, z).unwrap(), 0.0);
        assert!(hyp_distance(cx(1.0, 0.0), cx(0.0, 0.0)).is_err());
        // Symmetry and a sampled triangle inequality.
        let a = cx(0.1, 0.5);
        let b = cx(-0.4, 0.2);
        let c = cx(0.3, -0.6);
        let dab = hyp_distance(a, b).unwrap();
        assert!((dab - hyp_distance(b, a).unwrap()).abs() < 1e-14);
        assert!(dab <= hyp_distance(a, c).unwrap() + hyp_distance(c, b).unwrap() + 1e-14);
    }

    #[test]
    fn second_law_pentagon_side() {
        let l = second_law_cosines(PI / 4.0, PI / 4.0, 2.0 * PI / 5.0).unwrap();
        assert!((l - 1.0612750619050357).abs() < 1e-12, "L = {l}");
        // Euclidean limit.
        let c = second_law_cosines(PI / 4.0, PI / 4.0, PI / 2.0).unwrap();
        assert!(c.abs() < 1e-7);
        // Equilateral 72-degree triangle has angle sum > pi.
        assert!(second_law_cosines(0.4 * PI, 0.4 * PI, 0.4 * PI).is_err());
    }

    #[test]
    fn lambert_cases() {
        assert!((lambert_phi(0.0, 0.0).unwrap() - PI / 2.0).abs() < 1e-14);
        let l_half = 1.0612750619050357 / 2.0;
        let phi = lambert_phi(l_half, l_half).unwrap();
        assert!((phi - 72.0 / DEG).abs() < 1e-6, "phi = {}", phi * DEG);
        assert!((lambert_phi(l_half, 0.0).unwrap() - PI / 2.0).abs() < 1e-14);
        // Monotone decreasing in each argument.
        assert!(lambert_phi(0.3, 0.2).unwrap() > lambert_phi(0.4, 0.2).unwrap());
        assert!(lambert_phi(0.3, 0.2).unwrap() > lambert_phi(0.3, 0.3).unwrap());
    }

    #[test]
    fn triangle_area_cases() {
        let a = hyp_triangle_area(PI / 4.0, PI / 4.0, 2.0 * PI / 5.0).unwrap();
        assert!((a - PI / 10.0).abs() < 1e-14);
        assert!((hyp_triangle_area(0.0, 0.0, 0.0).unwrap() - PI).abs() < 1e-14);
        assert!(hyp_triangle_area(PI / 3.0, PI / 3.0, PI / 3.0).is_err());
    }

    #[test]
    fn geodesic_diameter() {
        let g = Geodesic::disk_through(cx(-0.5, 0.0), cx(0.5, 0.0)).unwrap();
        assert!(matches!(g.carrier, Carrier::Line(_)));
        assert!(g.orthogonality_residual() < 1e-12);
    }

    #[test]
    fn geodesic_ideal_endpoints() {
        let g = Geodesic::disk_through(cx(1.0, 0.0), cx(0.0, 1.0)).unwrap();
        match g.carrier {
            Carrier::Circle(c) => {
                assert!((c.center - cx(1.0, 1.0)).norm() < 1e-10);
                assert!((c.radius - 1.0).abs() < 1e-10);
                assert!((c.center.norm_sqr() - (1.0 + c.radius * c.radius)).abs() < 1e-10);
            }
            _ => panic!("expected circle"),
        }
    }

    #[test]
    fn halfplane_canonical_ray() {
        // Ray from i(sqrt2+1) to -1 lies on the circle centered 1+sqrt2 with
        // radius 2+sqrt2.
        let w = cx(0.0, SQ2 + 1.0);
        let g = Geodesic::halfplane_through(
            SpherePoint::Finite(w),
            SpherePoint::Finite(cx(-1.0, 0.0)),
        )
        .unwrap();
        match g.carrier {
            Carrier::Circle(c) => {
                assert!((c.center - cx(1.0 + SQ2, 0.0)).norm() < 1e-12);
                assert!((c.radius - (2.0 + SQ2)).abs() < 1e-12);
            }
            _ => panic!("expected circle"),
        }
    }

    #[test]
    fn point_at_distance_cases() {
        // Disk ray from 0 along the positive axis.
        let g = Geodesic::disk_through(cx(0.0, 0.0), cx(0.9, 0.0)).unwrap();
        let seg = HypSegment::new(g, cx(0.0, 0.0), cx(0.9, 0.0)).unwrap();
        let p = seg.point_at_distance(0.0).unwrap();
        assert!((p - cx(0.0, 0.0)).norm() < 1e-15);
        let p1 = seg.point_at_distance(1.0).unwrap();
        let expect = (1f64.exp() - 1.0) / (1f64.exp() + 1.0);
        assert!((p1 - cx(expect, 0.0)).norm() < 1e-12);
        // Half-plane: up the imaginary axis from i, distance 1 -> i*e.
        let gh = Geodesic::halfplane_through(
            SpherePoint::Finite(cx(0.0, 1.0)),
            SpherePoint::Infinity,
        )
        .unwrap();
        let ray = HypSegment::ray(gh, cx(0.0, 1.0), SpherePoint::Infinity);
        let q = ray.point_at_distance(1.0).unwrap();
        assert!((q - cx(0.0, 1f64.exp())).norm() < 1e-12);
        // Round trip: measured distance equals requested.
        let g2 = Geodesic::disk_through(cx(0.1, 0.2), cx(-0.5, 0.3)).unwrap();
        let seg2 = HypSegment::new(g2, cx(0.1, 0.2), cx(-0.5, 0.3)).unwrap();
        let mid = seg2.point_at_distance(seg2.length / 2.0).unwrap();
        let d = hyp_distance(cx(0.1, 0.2), mid).unwrap();
        assert!((d - seg2.length / 2.0).abs() < 1e-9);
    }

    #[test]
    fn mobius_invariance_of_metric() {
        let mut rng = 987654321u64;
        let mut next = move || {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let z = Complex::from_polar(0.95 * next(), std::f64::consts::TAU * next());
            let w = Complex::from_polar(0.95 * next(), std::f64::consts::TAU * next());
            if (z - w).norm() < 1e-6 {
                continue;
            }
            let a = Complex::from_polar(0.8 * next(), std::f64::consts::TAU * next());
            let lam = Complex::from_polar(1.0, std::f64::consts::TAU * next());
            let g = DiskAutomorphism::new(a, lam).unwrap();
            let d0 = hyp_distance(z, w).unwrap();
            let d1 = hyp_distance(g.apply(z), g.apply(w)).unwrap();
            assert!((d0 - d1).abs() < 1e-9, "invariance residual {}", (d0 - d1).abs());
        }
    }

    #[test]
    fn circle_preservation() {
        let m = MobiusMap::new(cx(1.0, 0.3), cx(0.2, -0.1), cx(0.1, 0.05), cx(1.0, 0.0)).unwrap();
        let circle = Circle::new(cx(0.2, -0.3), 0.4);
        let img: Vec<Complex> = (0..100)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / 100.0;
                m.apply_c(circle.center + Complex::from_polar(circle.radius, t))
            })
            .collect();
        let fit = circumcircle(img[0], img[33], img[66]).unwrap();
        for p in img {
            assert!(fit.dist(p) < 1e-9);
        }
    }

    #[test]
    fn angle_between_diameters() {
        let a1 = CircularArc::segment(cx(0.0, 0.0), cx(1.0, 0.0));
        let a2 = CircularArc::segment(cx(0.0, 0.0), cx(0.0, 1.0));
        let ang = angle_between_arcs(cx(0.0, 0.0), &a1, &a2).unwrap();
        assert!((ang - 90.0).abs() < 1e-12);
    }

    #[test]
    fn conformality_of_angles() {
        // Angle between two arcs is preserved by a Mobius map.
        let p = cx(0.3, 0.1);
        let c1 = circumcircle(p, cx(0.8, 0.4), cx(0.9, -0.2)).unwrap();
        let c2 = circumcircle(p, cx(-0.5, 0.6), cx(0.0, 0.9)).unwrap();
        let a1 = CircularArc { carrier: c1, a: p, b: cx(0.9, -0.2), ccw: true };
        let a1 = CircularArc::through(c1, a1.a, a1.b, cx(0.8, 0.4));
        let a2 = CircularArc::through(c2, p, cx(0.0, 0.9), cx(-0.5, 0.6));
        let ang = angle_between_arcs(p, &a1, &a2).unwrap();

        let m = MobiusMap::new(cx(1.0, 0.1), cx(0.05, 0.0), cx(-0.03, 0.1), cx(1.0, 0.0)).unwrap();
        let push_arc = |arc: &CircularArc| -> CircularArc {
            let ca = m.push_carrier(&arc.carrier).unwrap();
            CircularArc::through(ca, m.apply_c(arc.a), m.apply_c(arc.b), m.apply_c(arc.midpoint()))
        };
        let b1 = push_arc(&a1);
        let b2 = push_arc(&a2);
        let ang2 = angle_between_arcs(m.apply_c(p), &b1, &b2).unwrap();
        assert!((ang - ang2).abs() < 1e-8, "conformality residual {}", (ang - ang2).abs());
    }

    #[test]
    fn metric_quadrature_oracle() {
        // Closed form vs numeric integration of 2|dz|/(1-|z|^2) along the
        // geodesic between two points.
        let z = cx(0.3, 0.0);
        let w = cx(0.0, 0.3);
        let g = Geodesic::disk_through(z, w).unwrap();
        let seg = HypSegment::new(g.clone(), z, w).unwrap();
        // Integrate by sampling the arc finely (trapezoid in arc length).
        let arc = match g.carrier {
            Carrier::Circle(c) => CircularArc::through(Carrier::Circle(c), z, w, {
                let m = seg.point_at_distance(seg.length / 2.0).unwrap();
                m
            }),
            Carrier::Line(_) => CircularArc::segment(z, w),
        };
        let pts = arc.sample(20000);
        let mut total = 0.0;
        for k in 0..pts.len() - 1 {
            let mid = (pts[k] + pts[k + 1]) * 0.5;
            let ds = (pts[k + 1] - pts[k]).norm();
            total += 2.0 * ds / (1.0 - mid.norm_sqr());
        }
        let closed = hyp_distance(z, w).unwrap();
        assert!((closed - total).abs() < 1e-6, "quadrature residual {}", (closed - total).abs());
    }

    #[test]
    fn geodesic_to_geodesic_distance() {
        // Half-plane |z|=1 and |z|=e: distance 1 along the imaginary axis.
        let g1 = Geodesic::halfplane_through(
            SpherePoint::Finite(cx(-1.0, 0.0)),
            SpherePoint::Finite(cx(1.0, 0.0)),
        )
        .unwrap();
        let e = 1f64.exp();
        let g2 = Geodesic::halfplane_through(
            SpherePoint::Finite(cx(-e, 0.0)),
            SpherePoint::Finite(cx(e, 0.0)),
        )
        .unwrap();
        let d = geodesic_distance(&g1, &g2).unwrap();
        assert!((d - 1.0).abs() < 1e-10, "d = {d}");
    }
}
