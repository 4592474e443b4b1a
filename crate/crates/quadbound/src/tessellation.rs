//! The right-pentagon tessellation of the hyperbolic disk.
//!
//! Pentagons are generated from a central right pentagon by repeated
//! reflections. Every pentagon side lies on a full mirror geodesic; the two
//! boundary arcs cut off by each mirror form the interval family used by the
//! hull subdivision. Growth is lazy and directional: queries against small
//! boundary arcs only expand cells whose angular shadow meets the query.

use crate::error::{Error, Result};
use crate::geom::{cx, wrap_pos, Carrier, SpherePoint};
use crate::hyperbolic::{euclid_radius, hyp_distance, Geodesic};
use num_complex::Complex64 as Complex;
use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

/// Side length of the hyperbolic right pentagon: arccosh(1 + 2 cos 72).
pub fn side_length() -> f64 {
    (1.0 + 2.0 * (0.4 * PI).cos()).acosh()
}

/// Hyperbolic circumradius: arccosh(cot 36).
pub fn circumradius() -> f64 {
    (1.0 / (0.2 * PI).tan()).acosh()
}

/// Hyperbolic apothem (center to side midpoint): cosh m = cos 45 / sin 36.
pub fn apothem() -> f64 {
    ((0.25 * PI).cos() / (0.2 * PI).sin()).acosh()
}

// ---------------------------------------------------------------------------
// Arcs of the unit circle
// ---------------------------------------------------------------------------

/// A counterclockwise arc of the unit circle: angles [start, start + len].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub start: f64,
    pub len: f64,
}

impl Arc {
    pub fn new(start: f64, len: f64) -> Arc {
        debug_assert!(len > 0.0 && len < TAU + 1e-12);
        Arc { start: wrap_pos(start), len }
    }

    pub fn from_endpoints(a: f64, b: f64) -> Arc {
        Arc::new(a, wrap_pos(b - a))
    }

    pub fn end(&self) -> f64 {
        self.start + self.len
    }

    pub fn mid_angle(&self) -> f64 {
        wrap_pos(self.start + self.len / 2.0)
    }

    pub fn contains_angle(&self, t: f64, slack: f64) -> bool {
        let off = wrap_pos(t - self.start);
        off <= self.len + slack || off >= TAU - slack
    }

    /// Set inclusion of arcs with endpoint slack.
    pub fn contains_arc(&self, other: &Arc, slack: f64) -> bool {
        if other.len > self.len + 2.0 * slack {
            return false;
        }
        let off = wrap_pos(other.start - self.start);
        let off = if off >= TAU - slack { 0.0 } else { off };
        off <= self.len - other.len + 2.0 * slack
    }

    pub fn intersects(&self, other: &Arc, slack: f64) -> bool {
        let off = wrap_pos(other.start - self.start);
        off < self.len + slack || wrap_pos(self.start - other.start) < other.len + slack
    }

    /// Concentric scaling: same midpoint, length scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Arc {
        let len = (self.len * factor).min(TAU - 1e-9);
        Arc::new(self.mid_angle() - len / 2.0, len)
    }

    pub fn complement(&self) -> Arc {
        Arc::new(self.end(), TAU - self.len)
    }

    pub fn endpoints(&self) -> (Complex, Complex) {
        (
            Complex::from_polar(1.0, self.start),
            Complex::from_polar(1.0, self.end()),
        )
    }
}

/// An arc of the circle cut off by a tessellation mirror geodesic.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryInterval {
    pub arc: Arc,
    pub geodesic: usize,
}

// ---------------------------------------------------------------------------
// Cells
// ---------------------------------------------------------------------------

/// One right pentagon of the tessellation, vertices in cyclic order.
#[derive(Debug, Clone)]
pub struct PentagonCell {
    pub vertices: [Complex; 5],
    pub center: Complex,
    pub generation: u32,
}

impl PentagonCell {
    pub fn side(&self, i: usize) -> (Complex, Complex) {
        (self.vertices[i], self.vertices[(i + 1) % 5])
    }

    /// Angular shadow: the minimal arc of directions spanned by the cell, or
    /// None when the cell surrounds the origin (full shadow).
    pub fn shadow(&self) -> Option<Arc> {
        let mut angles: Vec<f64> = self.vertices.iter().map(|v| wrap_pos(v.arg())).collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut best_gap = 0.0;
        let mut best_at = 0;
        for i in 0..5 {
            let next = angles[(i + 1) % 5] + if i == 4 { TAU } else { 0.0 };
            let gap = next - angles[i];
            if gap > best_gap {
                best_gap = gap;
                best_at = i;
            }
        }
        if best_gap < PI {
            return None;
        }
        let start = angles[(best_at + 1) % 5];
        Some(Arc::new(start, TAU - best_gap))
    }

    /// Residuals of the defining invariants: (max side-length error, max
    /// angle error in radians).
    pub fn invariant_residuals(&self) -> Result<(f64, f64)> {
        let l = side_length();
        let mut len_err: f64 = 0.0;
        let mut ang_err: f64 = 0.0;
        for i in 0..5 {
            let (a, b) = self.side(i);
            len_err = len_err.max((hyp_distance(a, b)? - l).abs());
            let prev = self.vertices[(i + 4) % 5];
            let t1 = tangent_toward(a, b)?;
            let t2 = tangent_toward(a, prev)?;
            let ang = crate::geom::angle_between_dirs(t1, t2);
            ang_err = ang_err.max((ang - PI / 2.0).abs());
        }
        Ok((len_err, ang_err))
    }
}

/// Unit tangent at `a` of the geodesic from `a` toward `b` (arcs < half
/// circle, which holds for all pentagon sides).
pub fn tangent_toward(a: Complex, b: Complex) -> Result<Complex> {
    let g = Geodesic::disk_through(a, b)?;
    let t = g.carrier.tangent_at(a);
    if crate::geom::dot(t, b - a) >= 0.0 {
        Ok(t)
    } else {
        Ok(-t)
    }
}

fn center_key(z: Complex) -> (i64, i64) {
    ((z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64)
}

fn vertex_key(z: Complex) -> (i64, i64) {
    ((z.re * 1e7).round() as i64, (z.im * 1e7).round() as i64)
}

fn geo_key(g: &Geodesic) -> (i64, i64, i64) {
    match g.carrier {
        Carrier::Circle(c) => (
            (c.center.re * 1e9).round() as i64,
            (c.center.im * 1e9).round() as i64,
            (c.radius * 1e9).round() as i64,
        ),
        Carrier::Line(l) => {
            let mut t = l.dir.arg() % PI;
            if t < 0.0 {
                t += PI;
            }
            ((t * 1e9).round() as i64, i64::MIN, i64::MIN)
        }
    }
}

// ---------------------------------------------------------------------------
// Tessellation
// ---------------------------------------------------------------------------

pub struct TessellationT5 {
    pub cells: Vec<PentagonCell>,
    center_index: HashMap<(i64, i64), usize>,
    /// Eagerly generated closed rings: cells[i] for i < ring_complete_upto
    /// form full rings by vertex adjacency.
    pub geodesics: Vec<Geodesic>,
    geo_index: HashMap<(i64, i64, i64), usize>,
    /// Cells whose five reflections have all been taken.
    expanded: Vec<bool>,
    pub max_generate_depth: u32,
    /// Hard cap on lazy directional growth.
    pub max_lazy_generation: u32,
}

/// The central right pentagon, one vertex on the positive real axis.
pub fn base_pentagon() -> PentagonCell {
    let r = euclid_radius(circumradius());
    let mut vertices = [cx(0.0, 0.0); 5];
    for (k, v) in vertices.iter_mut().enumerate() {
        *v = Complex::from_polar(r, TAU * k as f64 / 5.0);
    }
    PentagonCell { vertices, center: cx(0.0, 0.0), generation: 0 }
}

/// Reflect a cell across one of its sides (hyperbolic reflection = inversion
/// in the side's carrier).
pub fn reflect_cell(cell: &PentagonCell, side_index: usize) -> Result<PentagonCell> {
    if side_index >= 5 {
        return Err(Error::Domain("side index out of range".into()));
    }
    let (a, b) = cell.side(side_index);
    let g = Geodesic::disk_through(a, b)?;
    let refl = |z: Complex| -> Result<Complex> {
        match g.carrier.reflect(z) {
            SpherePoint::Finite(w) => Ok(w),
            SpherePoint::Infinity => Err(Error::Degenerate("reflection through center".into())),
        }
    };
    let mut vertices = [cx(0.0, 0.0); 5];
    for (i, v) in cell.vertices.iter().enumerate() {
        vertices[i] = refl(*v)?;
    }
    // Reflection reverses orientation; renumber to keep cyclic order.
    vertices.reverse();
    Ok(PentagonCell { vertices, center: refl(cell.center)?, generation: cell.generation + 1 })
}

impl TessellationT5 {
    pub fn new() -> Self {
        let mut t = TessellationT5 {
            cells: Vec::new(),
            center_index: HashMap::new(),
            geodesics: Vec::new(),
            geo_index: HashMap::new(),
            expanded: Vec::new(),
            max_generate_depth: 8,
            max_lazy_generation: 64,
        };
        t.insert_cell(base_pentagon());
        t
    }

    fn insert_cell(&mut self, cell: PentagonCell) -> Option<usize> {
        let key = center_key(cell.center);
        if self.center_index.contains_key(&key) {
            return None;
        }
        for i in 0..5 {
            let (a, b) = cell.side(i);
            if let Ok(g) = Geodesic::disk_through(a, b) {
                let gk = geo_key(&g);
                if !self.geo_index.contains_key(&gk) {
                    self.geo_index.insert(gk, self.geodesics.len());
                    self.geodesics.push(g);
                }
            }
        }
        let idx = self.cells.len();
        self.center_index.insert(key, idx);
        self.cells.push(cell);
        self.expanded.push(false);
        Some(idx)
    }

    pub fn geodesic_index_of(&self, g: &Geodesic) -> Option<usize> {
        self.geo_index.get(&geo_key(g)).copied()
    }

    /// All boundary intervals of the generated geodesics (two arcs each).
    pub fn intervals(&self) -> Vec<BoundaryInterval> {
        let mut out = Vec::with_capacity(self.geodesics.len() * 2);
        for (gi, g) in self.geodesics.iter().enumerate() {
            if let (SpherePoint::Finite(p), SpherePoint::Finite(q)) = (g.p, g.q) {
                let (tp, tq) = (wrap_pos(p.arg()), wrap_pos(q.arg()));
                out.push(BoundaryInterval { arc: Arc::from_endpoints(tp, tq), geodesic: gi });
                out.push(BoundaryInterval { arc: Arc::from_endpoints(tq, tp), geodesic: gi });
            }
        }
        out
    }

    /// Breadth-first ring generation up to `depth` rings around the base
    /// cell, rings measured by shared-vertex adjacency.
    pub fn generate(depth: u32) -> Result<TessellationT5> {
        let mut t = TessellationT5::new();
        if depth > t.max_generate_depth {
            return Err(Error::Resource(format!(
                "depth {depth} exceeds configured max {}",
                t.max_generate_depth
            )));
        }
        for _ in 0..depth {
            t.close_one_ring()?;
        }
        Ok(t)
    }

    fn region_vertex_set(&self) -> HashMap<(i64, i64), ()> {
        let mut set = HashMap::new();
        for c in &self.cells {
            for v in &c.vertices {
                set.insert(vertex_key(*v), ());
            }
        }
        set
    }

    /// Add every cell sharing at least a vertex with the current region.
    fn close_one_ring(&mut self) -> Result<()> {
        let region = self.region_vertex_set();
        let touches = |cell: &PentagonCell| -> bool {
            cell.vertices.iter().any(|v| region.contains_key(&vertex_key(*v)))
        };
        loop {
            let mut added = false;
            for i in 0..self.cells.len() {
                if self.expanded[i] {
                    continue;
                }
                let mut all_in = true;
                for s in 0..5 {
                    let child = reflect_cell(&self.cells[i], s)?;
                    if self.center_index.contains_key(&center_key(child.center)) {
                        continue;
                    }
                    if touches(&child) {
                        self.insert_cell(child);
                        added = true;
                    } else {
                        all_in = false;
                    }
                }
                if all_in {
                    self.expanded[i] = true;
                }
            }
            if !added {
                break;
            }
        }
        Ok(())
    }

    /// Directional growth: expand cells whose shadow meets `target` until
    /// the local interval scale drops below `scale` (arc length), or the
    /// generation cap is hit.
    pub fn grow_toward(&mut self, target: &Arc, scale: f64) -> Result<()> {
        let padded = target.scaled(3.0);
        loop {
            if self.finest_scale_over(target) <= scale {
                return Ok(());
            }
            let mut added = false;
            for i in 0..self.cells.len() {
                if self.expanded[i] {
                    continue;
                }
                let relevant = match self.cells[i].shadow() {
                    None => true,
                    Some(s) => s.intersects(&padded, 0.05),
                };
                if !relevant {
                    continue;
                }
                if self.cells[i].generation >= self.max_lazy_generation {
                    return Err(Error::Resolution(format!(
                        "generation cap {} reached before scale {scale:.3e} over target",
                        self.max_lazy_generation
                    )));
                }
                for s in 0..5 {
                    let child = reflect_cell(&self.cells[i], s)?;
                    if self.insert_cell(child).is_some() {
                        added = true;
                    }
                }
                self.expanded[i] = true;
            }
            if !added {
                return Err(Error::Resolution(format!(
                    "directional growth stalled before scale {scale:.3e}"
                )));
            }
        }
    }

    /// The smallest generated interval length among intervals containing the
    /// target midpoint (measures local resolution).
    fn finest_scale_over(&self, target: &Arc) -> f64 {
        let mid = target.mid_angle();
        let mut best = TAU;
        for iv in self.intervals() {
            if iv.arc.contains_angle(mid, 0.0) {
                best = best.min(iv.arc.len);
            }
        }
        best
    }

    /// Sandwich an arbitrary arc between generated intervals: i1 inside j,
    /// i2 containing j. Returns (i1, i2, |i2|/|i1|).
    pub fn cover_interval(
        &mut self,
        j: &Arc,
    ) -> Result<(BoundaryInterval, BoundaryInterval, f64)> {
        if j.len <= 0.0 || j.len >= TAU {
            return Err(Error::Precondition("cover_interval: arc length out of range".into()));
        }
        self.grow_toward(j, j.len / 4.0)?;
        let slack = 1e-12;
        let mut inner: Option<BoundaryInterval> = None;
        let mut outer: Option<BoundaryInterval> = None;
        for iv in self.intervals() {
            if j.contains_arc(&iv.arc, slack) {
                if inner.map_or(true, |b| iv.arc.len > b.arc.len) {
                    inner = Some(iv);
                }
            }
            if iv.arc.contains_arc(j, slack) {
                if outer.map_or(true, |b| iv.arc.len < b.arc.len) {
                    outer = Some(iv);
                }
            }
        }
        match (inner, outer) {
            (Some(i1), Some(i2)) => Ok((i1, i2, i2.arc.len / i1.arc.len)),
            _ => Err(Error::Resolution("cover_interval: sandwich not found".into())),
        }
    }

    /// The smallest generated interval containing `j`.
    pub fn minimal_containing(&mut self, j: &Arc) -> Result<BoundaryInterval> {
        let (_, i2, _) = self.cover_interval(j)?;
        Ok(i2)
    }

    /// Cells adjacent to a mirror geodesic on its origin side, each having a
    /// full side on the mirror: returned as (cell index, side index).
    pub fn row_above(&self, g: &Geodesic) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (ci, cell) in self.cells.iter().enumerate() {
            if g.carrier.side(cell.center) * g.carrier.side(cx(0.0, 0.0)) <= 0.0 {
                continue;
            }
            for s in 0..5 {
                let (a, b) = cell.side(s);
                if g.carrier.contains(a, 1e-9) && g.carrier.contains(b, 1e-9) {
                    out.push((ci, s));
                }
            }
        }
        out
    }
}

impl Default for TessellationT5 {
    fn default() -> Self {
        TessellationT5::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pentagon_constants() {
        let l = side_length();
        assert!((l - 1.0612750619050357).abs() < 1e-12);
        assert!((l - 1.06128).abs() < 5e-6);
        let r = circumradius();
        let m = apothem();
        // Hyperbolic Pythagoras: cosh R = cosh m cosh(L/2).
        assert!((r.cosh() - m.cosh() * (l / 2.0).cosh()).abs() < 1e-10);
        assert!((r - 0.8424820815).abs() < 1e-9);
        // Half side from cos 36 = cosh a sin 45.
        let a = ((0.2 * PI).cos() / (0.25 * PI).sin()).acosh();
        assert!((a - l / 2.0).abs() < 1e-12);
    }

    #[test]
    fn base_pentagon_invariants() {
        let p = base_pentagon();
        let (len_err, ang_err) = p.invariant_residuals().unwrap();
        assert!(len_err < 1e-9, "len_err = {len_err:.2e}");
        assert!(ang_err < 1e-8, "ang_err = {ang_err:.2e}");
        assert!((p.vertices[0].im).abs() < 1e-15);
    }

    #[test]
    fn reflection_is_involution() {
        let p = base_pentagon();
        let q = reflect_cell(&p, 2).unwrap();
        // Orientation reversal renumbers sides; find the shared one again.
        let (pa, pb) = p.side(2);
        let shared = (0..5)
            .find(|&s| {
                let (a, b) = q.side(s);
                ((a - pa).norm() < 1e-10 && (b - pb).norm() < 1e-10)
                    || ((a - pb).norm() < 1e-10 && (b - pa).norm() < 1e-10)
            })
            .expect("shared side");
        let r = reflect_cell(&q, shared).unwrap();
        assert!((r.center - p.center).norm() < 1e-10);
        let (len_err, ang_err) = q.invariant_residuals().unwrap();
        assert!(len_err < 1e-9 && ang_err < 1e-8);
    }

    #[test]
    fn ring_counts() {
        let t0 = TessellationT5::generate(0).unwrap();
        assert_eq!(t0.cells.len(), 1);
        let t1 = TessellationT5::generate(1).unwrap();
        // One neighbor per side plus one per vertex.
        assert_eq!(t1.cells.len(), 11);
        assert!(TessellationT5::generate(99).is_err());
    }

    #[test]
    fn first_ring_tiles_without_overlap() {
        let t = TessellationT5::generate(1).unwrap();
        // Sampled interior points of distinct cells never coincide; check
        // pairwise center separations against the cell inradius instead.
        for i in 0..t.cells.len() {
            for j in i + 1..t.cells.len() {
                let d = hyp_distance(t.cells[i].center, t.cells[j].center).unwrap();
                assert!(d > 2.0 * apothem() - 1e-9, "cells {i},{j} overlap: {d}");
            }
        }
    }

    #[test]
    fn depth_three_geodesics_orthogonal() {
        let t = TessellationT5::generate(3).unwrap();
        for g in &t.geodesics {
            assert!(g.orthogonality_residual() < 1e-9);
        }
        // All cells pass invariants.
        for c in &t.cells {
            let (len_err, ang_err) = c.invariant_residuals().unwrap();
            assert!(len_err < 1e-9 && ang_err < 1e-8);
        }
    }

    #[test]
    fn complementary_arcs() {
        let t = TessellationT5::generate(1).unwrap();
        let ivs = t.intervals();
        for pair in ivs.chunks(2) {
            assert_eq!(pair[0].geodesic, pair[1].geodesic);
            assert!((pair[0].arc.len + pair[1].arc.len - TAU).abs() < 1e-12);
        }
    }

    #[test]
    fn cover_exact_interval() {
        let mut t = TessellationT5::generate(2).unwrap();
        let iv = t.intervals()[4];
        let (i1, i2, ratio) = t.cover_interval(&iv.arc).unwrap();
        assert!((ratio - 1.0).abs() < 1e-9);
        assert!((i1.arc.len - iv.arc.len).abs() < 1e-9);
        assert!((i2.arc.len - iv.arc.len).abs() < 1e-9);
    }

    #[test]
    fn cover_generic_interval() {
        let mut t = TessellationT5::new();
        let j = Arc::new(-PI / 2.0, PI);
        let (i1, i2, ratio) = t.cover_interval(&j).unwrap();
        assert!(j.contains_arc(&i1.arc, 1e-12));
        assert!(i2.arc.contains_arc(&j, 1e-12));
        assert!(ratio >= 1.0 && ratio < 60.0, "observed ratio {ratio}");
    }

    #[test]
    fn cover_nested_monotone() {
        // Shrinking j never enlarges the inner interval.
        let mut t = TessellationT5::new();
        let mut prev_len = f64::INFINITY;
        for k in 0..12 {
            let len = PI * 0.8f64.powi(k);
            let j = Arc::new(0.3 - len / 2.0, len);
            let (i1, _, _) = t.cover_interval(&j).unwrap();
            assert!(i1.arc.len <= prev_len + 1e-12);
            prev_len = i1.arc.len;
        }
    }

    #[test]
    fn minimal_containing_is_minimal() {
        let mut t = TessellationT5::new();
        let j = Arc::new(0.1, 0.05);
        let best = t.minimal_containing(&j).unwrap();
        assert!(best.arc.contains_arc(&j, 1e-12));
        for iv in t.intervals() {
            if iv.arc.contains_arc(&j, 1e-12) {
                assert!(iv.arc.len >= best.arc.len - 1e-12);
            }
        }
    }

    #[test]
    fn row_above_finds_three_edges() {
        let mut t = TessellationT5::new();
        let j = Arc::new(0.2, 0.4);
        let jj = t.minimal_containing(&j).unwrap();
        let g = t.geodesics[jj.geodesic].clone();
        t.grow_toward(&jj.arc.scaled(1.5), jj.arc.len / 8.0).unwrap();
        let row = t.row_above(&g);
        assert!(row.len() >= 3, "row has {} edges", row.len());
    }
}
