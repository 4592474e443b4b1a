//! Subdivision of a hyperbolic convex hull into right pentagons, Carleson
//! quadrilaterals and Carleson triangles.
//!
//! Given boundary intervals {I_j} whose A-fold expansions are disjoint, the
//! construction picks tessellation intervals J_j ~ sqrt(A) I_j, covers the
//! rest of the circle by maximal tessellation intervals, prunes the cover to
//! overlap at most twice, and reads the cell structure off the resulting
//! chain of mirror geodesics: pentagons above the chain, one Carleson quad
//! below every exposed pentagon edge, and a Carleson triangle wedge at every
//! chain crossing away from the hull boundary.

use crate::error::{Error, Result};
use crate::geom::{cx, wrap_pos, SpherePoint};
use crate::hyperbolic::{
    geodesic_distance, hyp_distance, mobius_from_triples, Geodesic, MobiusMap,
};
use crate::tessellation::{
    base_pentagon, reflect_cell, side_length, Arc, BoundaryInterval, PentagonCell, TessellationT5,
};
use num_complex::Complex64 as Complex;
use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Boundary intervals with their expansion factor A.
#[derive(Debug, Clone)]
pub struct IntervalFamily {
    pub intervals: Vec<Arc>,
    pub expansion: f64,
}

impl IntervalFamily {
    pub fn new(intervals: Vec<Arc>, expansion: f64) -> Result<Self> {
        if expansion <= 1.0 {
            return Err(Error::Precondition("expansion factor must exceed 1".into()));
        }
        if intervals.is_empty() {
            return Err(Error::Precondition(
                "empty interval family: the hull would be the whole disk".into(),
            ));
        }
        let fam = IntervalFamily { intervals, expansion };
        fam.check_expanded_disjoint()?;
        Ok(fam)
    }

    fn check_expanded_disjoint(&self) -> Result<()> {
        let expanded: Vec<Arc> = self.intervals.iter().map(|a| a.scaled(self.expansion)).collect();
        for e in &expanded {
            if e.len >= PI {
                return Err(Error::Precondition(format!(
                    "expanded interval has length {:.4} >= pi",
                    e.len
                )));
            }
        }
        for i in 0..expanded.len() {
            for j in i + 1..expanded.len() {
                if expanded[i].intersects(&expanded[j], 0.0) {
                    return Err(Error::Precondition(format!(
                        "expanded intervals {i} and {j} overlap"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Role of a subcover entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverKind {
    /// The hull-boundary interval J_j (component of the hull boundary).
    Boundary(usize),
    /// One of the two flank intervals of a J-triple.
    Flank(usize),
    /// A maximal filler interval.
    Filler,
}

#[derive(Debug, Clone)]
pub struct CoverEntry {
    pub arc: Arc,
    pub geodesic: Geodesic,
    pub kind: CoverKind,
}

/// Carleson quadrilateral hanging below a pentagon edge of the chain.
#[derive(Debug, Clone)]
pub struct CarlesonQuad {
    /// Carrier geodesic of the top edge.
    pub geodesic: Geodesic,
    /// Top-edge endpoint mapped from i*e^{L/2} (canonical model).
    pub top_hi: Complex,
    /// Top-edge endpoint mapped from i*e^{-L/2}.
    pub top_lo: Complex,
    /// Ideal carrier endpoint beyond top_lo (image of 0).
    pub ideal_lo: Complex,
    /// Ideal carrier endpoint beyond top_hi (image of infinity).
    pub ideal_hi: Complex,
    /// Index of the cover entry whose geodesic carries the top edge.
    pub cover_idx: usize,
}

impl CarlesonQuad {
    /// Mobius map from the canonical half-plane quad onto this quad.
    ///
    /// Canonical model: top edge on the imaginary axis from i*e^{L/2} to
    /// i*e^{-L/2}, rays on |z| = e^{+-L/2}, base [e^{-L/2}, e^{L/2}].
    pub fn canonical_map(&self) -> Result<MobiusMap> {
        let l2 = side_length() / 2.0;
        let src = [
            SpherePoint::Finite(cx(0.0, l2.exp())),
            SpherePoint::Finite(cx(0.0, (-l2).exp())),
            SpherePoint::Finite(cx(0.0, 0.0)),
        ];
        let dst = [
            SpherePoint::Finite(self.top_hi),
            SpherePoint::Finite(self.top_lo),
            SpherePoint::Finite(self.ideal_lo),
        ];
        mobius_from_triples(src, dst)
    }

    /// Ideal base arc of the quad (counterclockwise between the images of
    /// the canonical base endpoints).
    pub fn base_arc(&self) -> Result<Arc> {
        let m = self.canonical_map()?;
        let l2 = side_length() / 2.0;
        let p = m.apply_c(cx((-l2).exp(), 0.0));
        let q = m.apply_c(cx(l2.exp(), 0.0));
        let mid = m.apply_c(cx(1.0, 0.0));
        let arc = Arc::from_endpoints(wrap_pos(p.arg()), wrap_pos(q.arg()));
        if arc.contains_angle(wrap_pos(mid.arg()), 1e-9) {
            Ok(arc)
        } else {
            Ok(Arc::from_endpoints(wrap_pos(q.arg()), wrap_pos(p.arg())))
        }
    }
}

/// Carleson triangle wedge at a chain crossing.
#[derive(Debug, Clone)]
pub struct CarlesonTri {
    pub apex: Complex,
    /// Ideal endpoint mapped from -1 (canonical model).
    pub ideal_a: Complex,
    /// Ideal endpoint mapped from +1.
    pub ideal_b: Complex,
    /// Cover entries whose geodesics carry the two rays.
    pub cover_lo: usize,
    pub cover_hi: usize,
}

impl CarlesonTri {
    /// Mobius map from the canonical half-plane triangle (top i(sqrt2+1),
    /// base [-1, 1]) onto this wedge.
    pub fn canonical_map(&self) -> Result<MobiusMap> {
        let w = cx(0.0, SQRT2 + 1.0);
        let src = [
            SpherePoint::Finite(w),
            SpherePoint::Finite(cx(-1.0, 0.0)),
            SpherePoint::Finite(cx(1.0, 0.0)),
        ];
        let dst = [
            SpherePoint::Finite(self.apex),
            SpherePoint::Finite(self.ideal_a),
            SpherePoint::Finite(self.ideal_b),
        ];
        mobius_from_triples(src, dst)
    }

    pub fn base_arc(&self) -> Result<Arc> {
        let m = self.canonical_map()?;
        let a = wrap_pos(self.ideal_a.arg());
        let b = wrap_pos(self.ideal_b.arg());
        let mid = m.apply_c(cx(0.0, 1e-6));
        let arc = Arc::from_endpoints(a, b);
        // The base arc is on the side of the apex wedge; pick by a point of
        // the triangle near the base.
        let probe = m.apply_c(cx(0.0, 1e-9));
        let _ = mid;
        let t = wrap_pos(probe.arg());
        if arc.contains_angle(t, 1e-6) {
            Ok(arc)
        } else {
            Ok(Arc::from_endpoints(b, a))
        }
    }
}

/// The per-boundary trace structure of one hull-boundary geodesic.
#[derive(Debug, Clone)]
pub struct BoundaryChain {
    /// Index of the J_j cover entry.
    pub cover_idx: usize,
    /// The three exposed pentagon edges, ordered from ideal_lo to ideal_hi.
    pub edges: Vec<(Complex, Complex)>,
    /// Quads whose side ray descends along this geodesic, at the low/high end.
    pub quad_lo: usize,
    pub quad_hi: usize,
}

#[derive(Debug, Clone)]
pub struct CellDecomposition {
    pub pentagons: Vec<PentagonCell>,
    pub quads: Vec<CarlesonQuad>,
    pub triangles: Vec<CarlesonTri>,
    pub cover: Vec<CoverEntry>,
    pub boundaries: Vec<BoundaryChain>,
    /// Max observed diam(cell)/dist(cell, E) (property 5).
    pub c_obs: f64,
    /// Max observed pentagon distance to CH(E) (property 4).
    pub d_obs: f64,
    /// Worst minimal-containing ratio |J_j| / |sqrt(A) I_j|.
    pub cover_ratio_obs: f64,
}

// ---------------------------------------------------------------------------
// Arc set helpers
// ---------------------------------------------------------------------------

/// Merge a list of arcs into disjoint sorted arcs.
pub fn merge_arcs(arcs: &[Arc]) -> Vec<Arc> {
    if arcs.is_empty() {
        return vec![];
    }
    let mut evs: Vec<(f64, f64)> = arcs.iter().map(|a| (a.start, a.len)).collect();
    evs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (s, l) in evs {
        if let Some(last) = out.last_mut() {
            if s <= last.0 + last.1 + 1e-14 {
                let end = (s + l).max(last.0 + last.1);
                last.1 = end - last.0;
                continue;
            }
        }
        out.push((s, l));
    }
    // Wraparound merge between the last arc and the first one.
    if out.len() > 1 {
        let (fs, fl) = out[0];
        let (ls, ll) = *out.last().unwrap();
        if ls + ll + 1e-14 >= fs + TAU {
            let end = (ls + ll).max(fs + fl + TAU);
            out[0] = (ls, end - ls);
            out.pop();
        }
    }
    out.into_iter()
        .map(|(s, l)| Arc { start: wrap_pos(s), len: l.min(TAU) })
        .collect()
}

fn covered_by(t: f64, arcs: &[Arc], slack: f64) -> bool {
    arcs.iter().any(|a| a.contains_angle(t, slack))
}

/// Does the candidate arc contain a point outside the union `g`?
fn sticks_out(candidate: &Arc, g: &[Arc]) -> bool {
    // Sample endpoints of g inside the candidate plus the candidate center.
    let mut probes = vec![candidate.mid_angle(), candidate.start + 1e-9, candidate.end() - 1e-9];
    for a in g {
        for t in [a.start - 1e-9, a.end() + 1e-9] {
            if candidate.contains_angle(t, 0.0) {
                probes.push(t);
            }
        }
    }
    probes.iter().any(|&t| !covered_by(t, g, 0.0))
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Pick J_j as the minimal tessellation interval containing sqrt(A) I_j.
pub fn build_j(
    family: &IntervalFamily,
    t: &mut TessellationT5,
) -> Result<(Vec<BoundaryInterval>, f64)> {
    family.check_expanded_disjoint()?;
    let root = family.expansion.sqrt();
    let mut out = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    for i in &family.intervals {
        let target = i.scaled(root);
        let j = t.minimal_containing(&target)?;
        if !j.arc.contains_arc(&target, 1e-12) {
            return Err(Error::Construction("minimal interval fails containment".into()));
        }
        worst_ratio = worst_ratio.max(j.arc.len / target.len);
        out.push(j);
    }
    Ok((out, worst_ratio))
}

/// The three pentagons covering the top of a boundary geodesic, with the
/// flank intervals of the chain triple.
pub struct PentagonTriple {
    /// (cell, side) along the geodesic: low neighbor, top cell, high neighbor.
    pub row: [(PentagonCell, usize); 3],
    /// Flank intervals (arcs of the perpendicular mirrors at the row ends).
    pub flank_lo: Arc,
    pub flank_hi: Arc,
    /// Union J^1 u J u J^2.
    pub extended: Arc,
}

/// Position of a point along a geodesic carrier, increasing toward `q`.
fn carrier_pos(g: &Geodesic, z: Complex) -> f64 {
    match g.carrier {
        crate::geom::Carrier::Circle(c) => {
            let t = ((z - c.center) / c.radius).arg();
            let tq = match g.q {
                SpherePoint::Finite(q) => ((q - c.center) / c.radius).arg(),
                SpherePoint::Infinity => 0.0,
            };
            let tp = match g.p {
                SpherePoint::Finite(p) => ((p - c.center) / c.radius).arg(),
                SpherePoint::Infinity => 0.0,
            };
            // Position in [0,1] from p to q going the short way.
            let span = wrap_pos(tq - tp);
            if span <= PI + 1e-9 {
                wrap_pos(t - tp) / span
            } else {
                let span2 = wrap_pos(tp - tq);
                1.0 - wrap_pos(t - tq) / span2
            }
        }
        crate::geom::Carrier::Line(l) => crate::geom::dot(l.dir, z - l.point),
    }
}

pub fn pentagon_triple(
    j: &BoundaryInterval,
    t: &mut TessellationT5,
) -> Result<PentagonTriple> {
    let g = t.geodesics[j.geodesic].clone();
    // Resolve the row around the top point: grow until at least five edges.
    let mut row = t.row_above(&g);
    let mut tries = 0;
    while row.len() < 5 && tries < 12 {
        t.grow_toward(&j.arc.scaled(1.2), j.arc.len / (8 << tries) as f64)?;
        row = t.row_above(&g);
        tries += 1;
    }
    if row.len() < 3 {
        return Err(Error::Resolution("pentagon row too short".into()));
    }
    // Sort edges by carrier position of the edge midpoint.
    let mut edges: Vec<(usize, usize, f64, f64)> = row
        .iter()
        .map(|&(ci, si)| {
            let (a, b) = t.cells[ci].side(si);
            let (pa, pb) = (carrier_pos(&g, a), carrier_pos(&g, b));
            (ci, si, pa.min(pb), pa.max(pb))
        })
        .collect();
    edges.sort_by(|x, y| x.2.partial_cmp(&y.2).unwrap());
    let top = g.top_point();
    let tp = carrier_pos(&g, top);
    let mut top_idx = None;
    for (k, e) in edges.iter().enumerate() {
        if tp >= e.2 - 1e-12 && tp <= e.3 + 1e-12 {
            // Tie-break on the lexicographically smallest cell center.
            if let Some(prev) = top_idx {
                let pc: &PentagonCell = &t.cells[edges[prev as usize].0];
                let cc = &t.cells[e.0];
                let key = |z: Complex| (z.re, z.im);
                if key(cc.center) < key(pc.center) {
                    top_idx = Some(k as isize);
                }
            } else {
                top_idx = Some(k as isize);
            }
        }
    }
    let top_idx =
        top_idx.ok_or_else(|| Error::Resolution("top point not covered by row".into()))? as usize;
    if top_idx == 0 || top_idx + 1 >= edges.len() {
        return Err(Error::Resolution("row does not extend past the top cell".into()));
    }
    let trio = [edges[top_idx - 1], edges[top_idx], edges[top_idx + 1]];
    // Flank mirrors: perpendicular sides of the outer row cells at their far
    // vertices (the endpoints of the exposed three-edge segment).
    let flank = |entry: (usize, usize, f64, f64), far_low: bool| -> Result<Arc> {
        let cell = &t.cells[entry.0];
        let (a, b) = cell.side(entry.1);
        let (pa, _) = (carrier_pos(&g, a), 0.0);
        let far = if (pa < carrier_pos(&g, b)) == far_low { a } else { b };
        // The perpendicular side of this cell at `far` (the one not on g).
        for s in 0..5 {
            let (u, v) = cell.side(s);
            let touches_far = (u - far).norm() < 1e-9 || (v - far).norm() < 1e-9;
            let on_g = g.carrier.contains(u, 1e-9) && g.carrier.contains(v, 1e-9);
            if touches_far && !on_g {
                let perp = Geodesic::disk_through(u, v)?;
                let (pp, qq) = match (perp.p, perp.q) {
                    (SpherePoint::Finite(p), SpherePoint::Finite(q)) => (p, q),
                    _ => return Err(Error::Construction("open flank geodesic".into())),
                };
                // The flank arc contains the near ideal endpoint of g and not
                // the far one.
                let (glo, ghi) = match (g.p, g.q) {
                    (SpherePoint::Finite(p), SpherePoint::Finite(q)) => (p, q),
                    _ => return Err(Error::Construction("open boundary geodesic".into())),
                };
                let near = if far_low == (carrier_pos(&g, glo) < carrier_pos(&g, ghi)) {
                    glo
                } else {
                    ghi
                };
                let a1 = Arc::from_endpoints(wrap_pos(pp.arg()), wrap_pos(qq.arg()));
                let a2 = Arc::from_endpoints(wrap_pos(qq.arg()), wrap_pos(pp.arg()));
                let tn = wrap_pos(near.arg());
                return if a1.contains_angle(tn, 1e-12) { Ok(a1) } else { Ok(a2) };
            }
        }
        Err(Error::Construction("flank side not found".into()))
    };
    let flank_lo = flank(trio[0], true)?;
    let flank_hi = flank(trio[2], false)?;
    // Extended interval: union of the flanks and J (should be one arc).
    let merged = merge_arcs(&[flank_lo, j.arc, flank_hi]);
    if merged.len() != 1 {
        return Err(Error::Construction("triple union is not a single arc".into()));
    }
    let row_cells = [
        (t.cells[trio[0].0].clone(), trio[0].1),
        (t.cells[trio[1].0].clone(), trio[1].1),
        (t.cells[trio[2].0].clone(), trio[2].1),
    ];
    Ok(PentagonTriple { row: row_cells, flank_lo, flank_hi, extended: merged[0] })
}

/// Maximal tessellation intervals compactly inside the complement of F that
/// reach outside G.
pub fn maximal_cover(
    f_arcs: &[Arc],
    g_arcs: &[Arc],
    t: &mut TessellationT5,
) -> Result<Vec<BoundaryInterval>> {
    let f = merge_arcs(f_arcs);
    let g = merge_arcs(g_arcs);
    for round in 0..24 {
        let mut cands: Vec<BoundaryInterval> = Vec::new();
        for iv in t.intervals() {
            let clear_of_f = f.iter().all(|fa| !iv.arc.intersects(fa, 1e-9));
            if clear_of_f && sticks_out(&iv.arc, &g) {
                cands.push(iv);
            }
        }
        // Keep only maximal candidates.
        let mut keep = vec![true; cands.len()];
        for i in 0..cands.len() {
            for k in 0..cands.len() {
                if i != k
                    && keep[i]
                    && cands[k].arc.contains_arc(&cands[i].arc, 1e-12)
                    && cands[k].arc.len > cands[i].arc.len + 1e-12
                {
                    keep[i] = false;
                }
            }
        }
        let cands: Vec<BoundaryInterval> =
            cands.into_iter().zip(keep).filter(|(_, k)| *k).map(|(c, _)| c).collect();
        // Coverage of the complement of G.
        let mut uncovered: Option<f64> = None;
        let total = merge_arcs(
            &cands.iter().map(|c| c.arc).chain(g.iter().copied()).collect::<Vec<_>>(),
        );
        if total.len() == 1 && total[0].len >= TAU - 1e-9 {
            return Ok(cands);
        }
        // Find a point outside the current union.
        'outer: for a in &total {
            let gap_start = a.end() + 1e-9;
            if !covered_by(gap_start, &total, 0.0) {
                uncovered = Some(gap_start);
                break 'outer;
            }
        }
        let u = uncovered.unwrap_or(0.0);
        let dist_to_f = f
            .iter()
            .flat_map(|a| [wrap_pos(a.start - u).min(wrap_pos(u - a.start)),
                           wrap_pos(a.end() - u).min(wrap_pos(u - a.end()))])
            .fold(TAU, f64::min);
        let scale = (dist_to_f / 4.0).max(1e-6).min(0.3);
        let probe = Arc::new(u - scale, 2.0 * scale);
        t.grow_toward(&probe, scale / 2.0)?;
        let _ = round;
    }
    Err(Error::Resolution("maximal cover did not converge".into()))
}

/// Prune a circle cover to overlap depth at most two, never dropping pinned
/// entries.
pub fn reduce_overlap(cover: &mut Vec<(Arc, bool, usize)>) -> Result<()> {
    // Entries: (arc, pinned, payload id). Iterate until every probe point is
    // covered at most twice.
    loop {
        let mut probes: Vec<f64> = Vec::new();
        for (a, _, _) in cover.iter() {
            probes.push(a.start + 1e-10);
            probes.push(a.end() - 1e-10);
        }
        let mut dropped = false;
        'probe: for &p in &probes {
            let on: Vec<usize> = cover
                .iter()
                .enumerate()
                .filter(|(_, (a, _, _))| a.contains_angle(p, 0.0))
                .map(|(i, _)| i)
                .collect();
            if on.len() < 3 {
                continue;
            }
            // Leftmost-left and rightmost-right survive; drop a middle one.
            let left_of = |i: usize| wrap_pos(p - cover[i].0.start);
            let right_of = |i: usize| wrap_pos(cover[i].0.end() - p);
            let lmax = on.iter().copied().fold(on[0], |b, i| if left_of(i) > left_of(b) { i } else { b });
            let rmax = on.iter().copied().fold(on[0], |b, i| if right_of(i) > right_of(b) { i } else { b });
            for &i in &on {
                if i != lmax && i != rmax && !cover[i].1 {
                    cover.remove(i);
                    dropped = true;
                    break 'probe;
                }
            }
            // All middles pinned: legal only if the point is covered by the
            // pinned triple itself; treat as an error otherwise.
            if on.iter().all(|&i| i == lmax || i == rmax || cover[i].1) {
                return Err(Error::Construction(
                    "cover has a triple overlap of pinned intervals".into(),
                ));
            }
        }
        if !dropped {
            // Verify depth <= 2 everywhere.
            for &p in &probes {
                let depth = cover.iter().filter(|(a, _, _)| a.contains_angle(p, 0.0)).count();
                if depth > 2 {
                    return Err(Error::Construction(format!(
                        "residual overlap depth {depth}"
                    )));
                }
            }
            // Must still cover the circle.
            let merged = merge_arcs(&cover.iter().map(|(a, _, _)| *a).collect::<Vec<_>>());
            if !(merged.len() == 1 && merged[0].len >= TAU - 1e-9) {
                return Err(Error::Precondition("input does not cover the circle".into()));
            }
            return Ok(());
        }
    }
}

/// Hyperbolic distance between two non-adjacent hull geodesics of E, or None
/// when no non-adjacent pair exists.
pub fn thickness(e_arcs: &[Arc]) -> Result<Option<f64>> {
    if e_arcs.len() < 2 {
        return Ok(None);
    }
    // Components of E sorted; gaps between consecutive components.
    let mut comps: Vec<Arc> = e_arcs.to_vec();
    comps.sort_by(|a, b| a.start.partial_cmp(&b.start).unwrap());
    let n = comps.len();
    let mut gap_geos: Vec<(Geodesic, usize)> = Vec::new();
    for i in 0..n {
        let a = comps[i];
        let b = comps[(i + 1) % n];
        let lo = a.end();
        let hi = b.start + if (i + 1) % n == 0 { TAU } else { 0.0 };
        let hi = if hi <= lo { hi + TAU } else { hi };
        if hi - lo < 1e-12 {
            continue;
        }
        let p = Complex::from_polar(1.0, lo);
        let q = Complex::from_polar(1.0, hi);
        gap_geos.push((Geodesic::disk_through(p, q)?, i));
    }
    if gap_geos.len() < 2 {
        return Ok(None);
    }
    let mut best: Option<f64> = None;
    for i in 0..gap_geos.len() {
        for k in i + 1..gap_geos.len() {
            // Adjacent gaps share an endpoint iff the E component between
            // them is a single point.
            let adjacent = {
                let (gi, ci) = (&gap_geos[i], gap_geos[i].1);
                let (gk, ck) = (&gap_geos[k], gap_geos[k].1);
                let _ = (gi, gk);
                let point_between = |a: usize, b: usize| -> bool {
                    (b == (a + 1) % n && comps[b].len < 1e-12)
                        || (a == (b + 1) % n && comps[a].len < 1e-12)
                };
                point_between(ci, ck) || point_between(ck, ci)
            };
            if adjacent {
                continue;
            }
            let d = geodesic_distance(&gap_geos[i].0, &gap_geos[k].0)?;
            best = Some(best.map_or(d, |b: f64| b.min(d)));
        }
    }
    Ok(best)
}

/// Independent numerical check of `thickness` by sampled minimization.
pub fn thickness_numeric(e_arcs: &[Arc], samples: usize) -> Result<Option<f64>> {
    let mut comps: Vec<Arc> = e_arcs.to_vec();
    comps.sort_by(|a, b| a.start.partial_cmp(&b.start).unwrap());
    let n = comps.len();
    let mut geos: Vec<(Vec<Complex>, usize)> = Vec::new();
    for i in 0..n {
        let a = comps[i];
        let b = comps[(i + 1) % n];
        let lo = a.end();
        let mut hi = b.start + if (i + 1) % n == 0 { TAU } else { 0.0 };
        if hi <= lo {
            hi += TAU;
        }
        if hi - lo < 1e-12 {
            continue;
        }
        let p = Complex::from_polar(1.0, lo);
        let q = Complex::from_polar(1.0, hi);
        let g = Geodesic::disk_through(p, q)?;
        // Sample strictly interior points of the geodesic.
        let seg = crate::hyperbolic::HypSegment::new(g.clone(), g.top_point(), g.top_point())
            .ok();
        let _ = seg;
        let mut pts = Vec::with_capacity(samples);
        for s in 0..samples {
            // Walk from the top point toward each end by hyperbolic steps.
            let d = -4.0 + 8.0 * (s as f64 + 0.5) / samples as f64;
            let target = if d >= 0.0 { q } else { p };
            let ray = crate::hyperbolic::HypSegment::ray(
                g.clone(),
                g.top_point(),
                SpherePoint::Finite(target),
            );
            if let Ok(z) = ray.point_at_distance(d.abs()) {
                pts.push(z);
            }
        }
        geos.push((pts, i));
    }
    if geos.len() < 2 {
        return Ok(None);
    }
    let mut best: Option<f64> = None;
    for i in 0..geos.len() {
        for k in i + 1..geos.len() {
            let point_between = |a: usize, b: usize| -> bool {
                (b == (a + 1) % n && comps[b].len < 1e-12)
                    || (a == (b + 1) % n && comps[a].len < 1e-12)
            };
            if point_between(geos[i].1, geos[k].1) || point_between(geos[k].1, geos[i].1) {
                continue;
            }
            for &z in &geos[i].0 {
                for &w in &geos[k].0 {
                    let d = hyp_distance(z, w)?;
                    best = Some(best.map_or(d, |b: f64| b.min(d)));
                }
            }
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

pub fn assemble(family: &IntervalFamily, t: &mut TessellationT5) -> Result<CellDecomposition> {
    let (js, ratio_obs) = build_j(family, t)?;
    // Triples.
    let mut triples = Vec::new();
    for j in &js {
        triples.push(pentagon_triple(j, t)?);
    }
    // Disjointness of the extended triples (retryable by the caller with a
    // larger expansion factor).
    for i in 0..triples.len() {
        for k in i + 1..triples.len() {
            if triples[i].extended.intersects(&triples[k].extended, 0.0) {
                return Err(Error::Precondition(
                    "extended J-triples overlap; increase the expansion factor".into(),
                ));
            }
        }
    }
    let f_arcs: Vec<Arc> = js.iter().map(|j| j.arc).collect();
    let g_arcs: Vec<Arc> = triples.iter().map(|tr| tr.extended).collect();
    let fillers = maximal_cover(&f_arcs, &g_arcs, t)?;

    // Full cover with pinned triples, then prune to overlap <= 2.
    // Payload: index into `entries`.
    let mut entries: Vec<CoverEntry> = Vec::new();
    for (ji, j) in js.iter().enumerate() {
        entries.push(CoverEntry {
            arc: triples[ji].flank_lo,
            geodesic: arc_geodesic(&triples[ji].flank_lo)?,
            kind: CoverKind::Flank(ji),
        });
        entries.push(CoverEntry {
            arc: j.arc,
            geodesic: t.geodesics[j.geodesic].clone(),
            kind: CoverKind::Boundary(ji),
        });
        entries.push(CoverEntry {
            arc: triples[ji].flank_hi,
            geodesic: arc_geodesic(&triples[ji].flank_hi)?,
            kind: CoverKind::Flank(ji),
        });
    }
    for f in &fillers {
        entries.push(CoverEntry {
            arc: f.arc,
            geodesic: t.geodesics[f.geodesic].clone(),
            kind: CoverKind::Filler,
        });
    }
    let mut pruned: Vec<(Arc, bool, usize)> = entries
        .iter()
        .enumerate()
        .map(|(i, e)| (e.arc, !matches!(e.kind, CoverKind::Filler), i))
        .collect();
    reduce_overlap(&mut pruned)?;
    let mut cover: Vec<CoverEntry> = pruned.iter().map(|&(_, _, i)| entries[i].clone()).collect();
    cover.sort_by(|a, b| a.arc.start.partial_cmp(&b.arc.start).unwrap());

    // Pentagon core: all cells on the core side of every cover geodesic
    // (the side away from the entry's own arc).
    let core_signs: Vec<f64> = cover
        .iter()
        .map(|e| away_side_sign(&e.geodesic, &e.arc))
        .collect::<Result<_>>()?;
    let above_all = |z: Complex, cover: &[CoverEntry]| -> bool {
        cover.iter().zip(core_signs.iter()).all(|(e, &sgn)| {
            e.geodesic.carrier.side(z) * sgn > 0.0
        })
    };
    // Grow the tessellation over the core region via BFS on reflections,
    // seeded from the top pentagon of the first boundary triple (the core is
    // hyperbolically convex, hence connected).
    let mut core: Vec<PentagonCell> = Vec::new();
    {
        let mut seen: HashMap<(i64, i64), ()> = HashMap::new();
        let key = |z: Complex| ((z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64);
        let seed = triples[0].row[1].0.clone();
        let mut frontier = vec![seed];
        seen.insert(key(frontier[0].center), ());
        if !above_all(frontier[0].center, &cover) {
            return Err(Error::Construction("seed pentagon is outside the chain".into()));
        }
        while let Some(cell) = frontier.pop() {
            for s in 0..5 {
                let child = reflect_cell(&cell, s)?;
                let k = key(child.center);
                if seen.contains_key(&k) {
                    continue;
                }
                seen.insert(k, ());
                if above_all(child.center, &cover) {
                    frontier.push(child);
                }
            }
            core.push(cell);
            if core.len() > 2_000_000 {
                return Err(Error::Resource("pentagon core exploded".into()));
            }
        }
    }

    // Chain crossings between consecutive cover geodesics.
    let m = cover.len();
    let mut crossings: Vec<Complex> = Vec::with_capacity(m);
    for i in 0..m {
        let a = &cover[i];
        let b = &cover[(i + 1) % m];
        if !a.arc.intersects(&b.arc, 0.0) {
            return Err(Error::Construction(format!(
                "consecutive cover arcs {i} and {} do not overlap",
                (i + 1) % m
            )));
        }
        let pts = crate::geom::intersect(&a.geodesic.carrier, &b.geodesic.carrier);
        let inner: Vec<Complex> = pts.into_iter().filter(|z| z.norm() < 1.0 - 1e-9).collect();
        if inner.len() != 1 {
            return Err(Error::Construction(format!(
                "cover geodesics {i}, {} cross {} times inside the disk",
                (i + 1) % m,
                inner.len()
            )));
        }
        crossings.push(inner[0]);
    }

    // Quads below every exposed pentagon edge of non-boundary entries, and
    // the two extra rays flanking each boundary geodesic.
    let mut quads: Vec<CarlesonQuad> = Vec::new();
    let mut boundaries: Vec<BoundaryChain> = Vec::new();
    // Map from cover index -> exposed edges sorted by carrier position.
    for i in 0..m {
        let e = &cover[i];
        let g = &e.geodesic;
        let x_lo = crossings[(i + m - 1) % m];
        let x_hi = crossings[i];
        let (p_lo, p_hi) = (carrier_pos(g, x_lo), carrier_pos(g, x_hi));
        let (p_lo, p_hi) = (p_lo.min(p_hi), p_lo.max(p_hi));
        // Exposed edges of the core on this geodesic within [p_lo, p_hi].
        let mut edges: Vec<(f64, Complex, Complex)> = Vec::new();
        for cell in &core {
            for s in 0..5 {
                let (a, b) = cell.side(s);
                if g.carrier.contains(a, 1e-9) && g.carrier.contains(b, 1e-9) {
                    let (pa, pb) = (carrier_pos(g, a), carrier_pos(g, b));
                    let (lo, hi, a2, b2) = if pa < pb { (pa, pb, a, b) } else { (pb, pa, b, a) };
                    if lo >= p_lo - 1e-9 && hi <= p_hi + 1e-9 {
                        edges.push((lo, a2, b2));
                    }
                }
            }
        }
        edges.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        edges.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-10);
        if edges.is_empty() {
            return Err(Error::Construction(format!("no exposed edges on cover entry {i}")));
        }
        // Carrier ideal endpoints ordered by position.
        let (ga, gb) = match (g.p, g.q) {
            (SpherePoint::Finite(p), SpherePoint::Finite(q)) => (p, q),
            _ => return Err(Error::Construction("open cover geodesic".into())),
        };
        let (ideal_lo, ideal_hi) = if carrier_pos(g, ga) < carrier_pos(g, gb) {
            (ga, gb)
        } else {
            (gb, ga)
        };
        match e.kind {
            CoverKind::Boundary(ji) => {
                if edges.len() != 3 {
                    return Err(Error::Construction(format!(
                        "boundary geodesic exposes {} edges, expected 3",
                        edges.len()
                    )));
                }
                boundaries.push(BoundaryChain {
                    cover_idx: i,
                    edges: edges.iter().map(|&(_, a, b)| (a, b)).collect(),
                    quad_lo: usize::MAX,
                    quad_hi: usize::MAX,
                });
                let _ = ji;
            }
            _ => {
                for &(_, a, b) in &edges {
                    // Order the top edge: hi end toward ideal_hi.
                    let (lo_v, hi_v) = if carrier_pos(g, a) < carrier_pos(g, b) {
                        (a, b)
                    } else {
                        (b, a)
                    };
                    // Canonical map sends 0 -> ideal beyond the low end; pick
                    // so the quad descends on the non-origin side.
                    let mut q = CarlesonQuad {
                        geodesic: g.clone(),
                        top_hi: hi_v,
                        top_lo: lo_v,
                        ideal_lo,
                        ideal_hi,
                        cover_idx: i,
                    };
                    // Orientation check: canonical interior point must map
                    // below the geodesic (the non-core side).
                    let sgn = core_signs[i];
                    let mcan = q.canonical_map()?;
                    let probe = mcan.apply_c(cx(1.0, 1.0) / SQRT2 * 1.0);
                    if g.carrier.side(probe) * sgn > 0.0 {
                        // Flip the quad to the other side by swapping ends.
                        q = CarlesonQuad {
                            geodesic: g.clone(),
                            top_hi: lo_v,
                            top_lo: hi_v,
                            ideal_lo: ideal_hi,
                            ideal_hi: ideal_lo,
                            cover_idx: i,
                        };
                        let mcan = q.canonical_map()?;
                        let probe = mcan.apply_c(cx(1.0, 1.0) / SQRT2);
                        if q.geodesic.carrier.side(probe) * sgn > 0.0 {
                            return Err(Error::Construction("quad orientation failed".into()));
                        }
                    }
                    quads.push(q);
                }
            }
        }
    }

    // Link boundary chains to the flanking quads: the end quads of the two
    // flank rows have a ray on the boundary geodesic (their top edge touches
    // the crossing vertex).
    for bc in boundaries.iter_mut() {
        let i = bc.cover_idx;
        let x_lo = crossings[(i + m - 1) % m];
        let x_hi = crossings[i];
        for (qi, q) in quads.iter().enumerate() {
            if (q.top_hi - x_lo).norm() < 1e-9 || (q.top_lo - x_lo).norm() < 1e-9 {
                if q.cover_idx == (i + m - 1) % m {
                    bc.quad_lo = qi;
                }
            }
            if (q.top_hi - x_hi).norm() < 1e-9 || (q.top_lo - x_hi).norm() < 1e-9 {
                if q.cover_idx == (i + 1) % m {
                    bc.quad_hi = qi;
                }
            }
        }
        if bc.quad_lo == usize::MAX || bc.quad_hi == usize::MAX {
            return Err(Error::Construction("boundary chain missing flank quads".into()));
        }
    }

    // Triangles at crossings not involving a boundary geodesic.
    let mut triangles: Vec<CarlesonTri> = Vec::new();
    for i in 0..m {
        let a = &cover[i];
        let b = &cover[(i + 1) % m];
        if matches!(a.kind, CoverKind::Boundary(_)) || matches!(b.kind, CoverKind::Boundary(_)) {
            continue;
        }
        let apex = crossings[i];
        // Overlap arc endpoints: the wedge's ideal corners.
        let o_start = b.arc.start;
        let o_end = a.arc.end();
        let pa = Complex::from_polar(1.0, o_end);
        let pb = Complex::from_polar(1.0, o_start);
        let mut tri = CarlesonTri {
            apex,
            ideal_a: pa,
            ideal_b: pb,
            cover_lo: i,
            cover_hi: (i + 1) % m,
        };
        let mcan = tri.canonical_map()?;
        let probe = mcan.apply_c(cx(0.0, 1.0));
        if probe.norm() >= 1.0 || a.geodesic.carrier.side(probe) * core_signs[i] > 0.0 {
            std::mem::swap(&mut tri.ideal_a, &mut tri.ideal_b);
            let mcan = tri.canonical_map()?;
            let probe = mcan.apply_c(cx(0.0, 1.0));
            if probe.norm() >= 1.0 {
                return Err(Error::Construction("triangle orientation failed".into()));
            }
        }
        triangles.push(tri);
    }

    // Audits.
    let e_set: Vec<Arc> = family.intervals.clone();
    let dist_to_e = |z: Complex| -> f64 {
        e_set
            .iter()
            .map(|a| {
                let t = wrap_pos(z.arg());
                if a.contains_angle(t, 0.0) {
                    (1.0 - z.norm()).abs()
                } else {
                    let (p, q) = a.endpoints();
                    (z - p).norm().min((z - q).norm())
                }
            })
            .fold(f64::INFINITY, f64::min)
    };
    let mut c_obs: f64 = 0.0;
    let mut audit = |pts: &[Complex]| {
        let mut diam: f64 = 0.0;
        for i in 0..pts.len() {
            for k in i + 1..pts.len() {
                diam = diam.max((pts[i] - pts[k]).norm());
            }
        }
        let dist = pts.iter().map(|&z| dist_to_e(z)).fold(f64::INFINITY, f64::min);
        if dist > 1e-12 {
            c_obs = c_obs.max(diam / dist);
        }
    };
    for p in &core {
        audit(&p.vertices);
    }
    for q in &quads {
        let base = q.base_arc()?;
        let (e1, e2) = base.endpoints();
        audit(&[q.top_hi, q.top_lo, e1, e2, Complex::from_polar(1.0, base.mid_angle())]);
    }
    for tr in &triangles {
        let base = tr.base_arc()?;
        audit(&[tr.apex, tr.ideal_a, tr.ideal_b, Complex::from_polar(1.0, base.mid_angle())]);
    }
    // Property (4): pentagon distance to CH(E) via the complementary-gap
    // geodesics of E.
    let mut d_obs: f64 = 0.0;
    {
        let e_sorted = merge_arcs(&e_set);
        let mut gap_geos: Vec<(Geodesic, f64)> = Vec::new();
        let n = e_sorted.len();
        for i in 0..n {
            let lo = e_sorted[i].end();
            let hi = e_sorted[(i + 1) % n].start + if (i + 1) % n == 0 { TAU } else { 0.0 };
            let hi = if hi <= lo { hi + TAU } else { hi };
            let p = Complex::from_polar(1.0, lo);
            let q = Complex::from_polar(1.0, hi);
            if (p - q).norm() > 1e-9 {
                let gap = Arc::from_endpoints(lo, hi);
                let g = Geodesic::disk_through(p, q)?;
                let sgn = away_side_sign(&g, &gap)?;
                gap_geos.push((g, sgn));
            }
        }
        for cell in &core {
            let inside = gap_geos
                .iter()
                .all(|(g, sgn)| g.carrier.side(cell.center) * sgn > 0.0);
            if inside {
                continue;
            }
            let d = gap_geos
                .iter()
                .filter(|(g, sgn)| g.carrier.side(cell.center) * sgn <= 0.0)
                .map(|(g, _)| g.dist_to(cell.center).unwrap_or(f64::INFINITY))
                .fold(f64::INFINITY, f64::min);
            d_obs = d_obs.max(d);
        }
    }

    Ok(CellDecomposition {
        pentagons: core,
        quads,
        triangles,
        cover,
        boundaries,
        c_obs,
        d_obs,
        cover_ratio_obs: ratio_obs,
    })
}

fn arc_geodesic(a: &Arc) -> Result<Geodesic> {
    let (p, q) = a.endpoints();
    Geodesic::disk_through(p, q)
}

/// Sign of `carrier.side` on the side of the geodesic away from its arc.
///
/// The carrier disk of a geodesic always cuts off the arc shorter than pi,
/// so the origin is not a reliable probe when the entry's arc is long.
/// Probe near the midpoint of the complementary arc instead.
fn away_side_sign(g: &Geodesic, arc: &Arc) -> Result<f64> {
    let comp = arc.complement();
    let t = 0.2 * comp.len.min(1.0);
    let probe = Complex::from_polar(1.0 - t, comp.mid_angle());
    let s = g.carrier.side(probe);
    if s == 0.0 {
        return Err(Error::Construction("side probe landed on the geodesic".into()));
    }
    Ok(s.signum())
}

/// Cells-per-interval audit for the linearity experiments.
pub struct CountAudit {
    pub pentagons: usize,
    pub quads: usize,
    pub triangles: usize,
    pub per_interval: f64,
}

pub fn count_audit(d: &CellDecomposition, n_intervals: usize) -> CountAudit {
    let total = d.pentagons.len() + d.quads.len() + d.triangles.len();
    CountAudit {
        pentagons: d.pentagons.len(),
        quads: d.quads.len(),
        triangles: d.triangles.len(),
        per_interval: total as f64 / n_intervals.max(1) as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regular_family(n: usize, len: f64, a: f64) -> IntervalFamily {
        let arcs = (0..n)
            .map(|k| Arc::new(TAU * k as f64 / n as f64 - len / 2.0, len))
            .collect();
        IntervalFamily::new(arcs, a).unwrap()
    }

    #[test]
    fn family_preconditions() {
        // Two antipodal intervals whose expansions stay disjoint.
        assert!(regular_family(2, 0.01, 100.0).check_expanded_disjoint().is_ok());
        // Overlapping expansions rejected.
        let fam = IntervalFamily::new(
            vec![Arc::new(0.0, 0.4), Arc::new(1.0, 0.4)],
            8.0,
        );
        assert!(fam.is_err());
    }

    #[test]
    fn build_j_contains_scaled() {
        let fam = regular_family(1, 0.01, 16.0);
        let mut t = TessellationT5::new();
        let (js, ratio) = build_j(&fam, &mut t).unwrap();
        assert_eq!(js.len(), 1);
        let target = fam.intervals[0].scaled(4.0);
        assert!(js[0].arc.contains_arc(&target, 1e-12));
        assert!(ratio >= 1.0);
    }

    #[test]
    fn pentagon_triple_covers_top() {
        let fam = regular_family(1, 0.05, 16.0);
        let mut t = TessellationT5::new();
        let (js, _) = build_j(&fam, &mut t).unwrap();
        let tri = pentagon_triple(&js[0], &mut t).unwrap();
        // Covered stretch around the top point is at least 2L.
        let g = t.geodesics[js[0].geodesic].clone();
        let top = g.top_point();
        let l = side_length();
        let (a, _) = tri.row[0].1.pipe(|s| tri.row[0].0.side(s));
        let (_, b) = tri.row[2].1.pipe(|s| tri.row[2].0.side(s));
        let da = hyp_distance(top, a).unwrap();
        let db = hyp_distance(top, b).unwrap();
        assert!(da + db >= 3.0 * l - 1e-9);
        assert!(da.min(db) >= l - 1e-9, "covered stretch not centered: {da} {db}");
        // Extended interval strictly contains J on both sides.
        assert!(tri.extended.contains_arc(&js[0].arc, 1e-12));
        assert!(tri.extended.len > js[0].arc.len + 1e-9);
    }

    // Small helper: call a closure on a value (keeps the test terse).
    trait Pipe: Sized {
        fn pipe<T>(self, f: impl FnOnce(Self) -> T) -> T {
            f(self)
        }
    }
    impl<A> Pipe for A {}

    #[test]
    fn maximal_cover_no_constraints() {
        let mut t = TessellationT5::generate(2).unwrap();
        let cover = maximal_cover(&[], &[], &mut t).unwrap();
        assert!(cover.len() >= 2);
        // Coverage and mutual non-containment.
        let merged = merge_arcs(&cover.iter().map(|c| c.arc).collect::<Vec<_>>());
        assert!(merged.len() == 1 && merged[0].len >= TAU - 1e-9);
        for i in 0..cover.len() {
            for k in 0..cover.len() {
                if i != k {
                    assert!(
                        !(cover[k].arc.contains_arc(&cover[i].arc, 1e-12)
                            && cover[k].arc.len > cover[i].arc.len + 1e-12)
                    );
                }
            }
        }
    }

    #[test]
    fn maximal_cover_respects_f_and_g() {
        let mut t = TessellationT5::new();
        let f = vec![Arc::new(0.0, 0.3)];
        let g = vec![Arc::new(-0.2, 0.7)];
        let cover = maximal_cover(&f, &g, &mut t).unwrap();
        for c in &cover {
            assert!(!c.arc.intersects(&f[0], 1e-10));
        }
        // 1000 sampled points outside G are covered.
        for s in 0..1000 {
            let p = wrap_pos(0.5 + (TAU - 0.7 - 0.02) * s as f64 / 1000.0 + 0.01);
            if !g[0].contains_angle(p, 0.0) {
                assert!(
                    cover.iter().any(|c| c.arc.contains_angle(p, 1e-12)),
                    "uncovered point {p}"
                );
            }
        }
    }

    #[test]
    fn reduce_overlap_rules() {
        // Three identical intervals: two survive at most.
        let a = Arc::new(0.0, 2.0);
        let b = Arc::new(1.5, 2.0);
        let c = Arc::new(3.0, 2.0);
        let d = Arc::new(4.5, 2.5);
        let dup = Arc::new(0.2, 1.5);
        let mut cover = vec![
            (a, false, 0usize),
            (b, false, 1),
            (c, false, 2),
            (d, false, 3),
            (dup, false, 4),
        ];
        reduce_overlap(&mut cover).unwrap();
        for s in 0..2000 {
            let p = TAU * s as f64 / 2000.0;
            let depth = cover.iter().filter(|(x, _, _)| x.contains_angle(p, 0.0)).count();
            assert!(depth <= 2, "depth {depth} at {p}");
            assert!(depth >= 1, "coverage lost at {p}");
        }
        // Already-disjoint cover unchanged.
        let mut cov2 = vec![
            (Arc::new(0.0, 3.2), false, 0usize),
            (Arc::new(3.1, 3.2), false, 1),
        ];
        let before = cov2.len();
        reduce_overlap(&mut cov2).unwrap();
        assert_eq!(cov2.len(), before);
    }

    #[test]
    fn thickness_cases() {
        // Three equally spaced points: all gap geodesics adjacent.
        let pts3: Vec<Arc> = (0..3)
            .map(|k| Arc { start: TAU * k as f64 / 3.0, len: 0.0 })
            .collect();
        assert!(thickness(&pts3).unwrap().is_none());
        // Four equally spaced points: opposite sides of the ideal square.
        let pts4: Vec<Arc> = (0..4)
            .map(|k| Arc { start: TAU * k as f64 / 4.0, len: 0.0 })
            .collect();
        let eta = thickness(&pts4).unwrap().unwrap();
        let eta_num = thickness_numeric(&pts4, 300).unwrap().unwrap();
        assert!((eta - eta_num).abs() < 1e-3, "closed {eta} vs numeric {eta_num}");
        // Monotonicity: shrinking one component of E can only decrease eta.
        let mut prev = f64::INFINITY;
        for k in 0..5 {
            let len = 0.4 * 0.5f64.powi(k);
            let arcs = vec![
                Arc::new(0.0, len),
                Arc::new(PI / 2.0, 0.4),
                Arc::new(PI, 0.4),
                Arc::new(1.5 * PI, 0.4),
            ];
            let eta = thickness(&arcs).unwrap().unwrap();
            assert!(eta <= prev + 1e-12, "eta grew when E shrank");
            prev = eta;
        }
    }

    #[test]
    fn assemble_single_interval() {
        let fam = regular_family(1, 0.05, 16.0);
        let mut t = TessellationT5::new();
        let d = assemble(&fam, &mut t).unwrap();
        assert_eq!(d.boundaries.len(), 1);
        assert_eq!(d.boundaries[0].edges.len(), 3);
        assert!(d.quads.len() >= 2);
        assert!(d.pentagons.len() >= 3);
        assert!(d.c_obs.is_finite() && d.c_obs > 0.0);
        // The two flank quads of the boundary exist and differ.
        let bc = &d.boundaries[0];
        assert_ne!(bc.quad_lo, bc.quad_hi);
    }

    #[test]
    fn assemble_four_intervals_adjacency() {
        let fam = regular_family(4, 0.03, 16.0);
        let mut t = TessellationT5::new();
        let d = assemble(&fam, &mut t).unwrap();
        assert_eq!(d.boundaries.len(), 4);
        // Pentagons at least 3 per boundary geodesic.
        assert!(d.pentagons.len() >= 12);
        // Each triangle flanked by quads.
        assert!(d.triangles.len() <= d.quads.len());
        // Base arcs of quads and triangles tile the circle minus F exactly:
        // total length check.
        let mut total = 0.0;
        for q in &d.quads {
            total += q.base_arc().unwrap().len;
        }
        for tr in &d.triangles {
            total += tr.base_arc().unwrap().len;
        }
        let f_len: f64 = d
            .cover
            .iter()
            .filter(|e| matches!(e.kind, CoverKind::Boundary(_)))
            .map(|e| e.arc.len)
            .sum();
        assert!(
            (total + f_len - TAU).abs() < 1e-6,
            "bases + F = {:.6}, expected 2pi",
            total + f_len
        );
    }
}
