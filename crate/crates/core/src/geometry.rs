//! Planar geometry primitives shared by the mass, cycle, and stockyard code.
//!
//! Points are `Complex64` with `re` = x and `im` = y. Polygons are vertex
//! lists with an implicit closing edge; positive shoelace area means
//! counter-clockwise.

use num_complex::Complex64;

pub fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

pub fn dot(a: Complex64, b: Complex64) -> f64 {
    a.re * b.re + a.im * b.im
}

/// Shoelace signed area; counter-clockwise is positive.
pub fn signed_area(verts: &[Complex64]) -> f64 {
    let n = verts.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        acc += cross(a, b);
    }
    acc / 2.0
}

pub fn perimeter(verts: &[Complex64]) -> f64 {
    let n = verts.len();
    (0..n).map(|i| (verts[(i + 1) % n] - verts[i]).norm()).sum()
}

/// Axis-aligned bounding box as (lower-left, upper-right).
pub fn bbox(verts: &[Complex64]) -> (Complex64, Complex64) {
    let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for v in verts {
        lo.re = lo.re.min(v.re);
        lo.im = lo.im.min(v.im);
        hi.re = hi.re.max(v.re);
        hi.im = hi.im.max(v.im);
    }
    (lo, hi)
}

pub fn bbox_diameter(verts: &[Complex64]) -> f64 {
    let (lo, hi) = bbox(verts);
    (hi - lo).norm()
}

/// Intersection of segments [p0,p1] and [q0,q1].
///
/// Returns the parameters (t, u) along each segment when the segments cross
/// at a single point with both parameters in [0,1]. Collinear overlaps
/// return `None`; callers resolve those by jitter.
pub fn seg_seg_intersection(
    p0: Complex64,
    p1: Complex64,
    q0: Complex64,
    q1: Complex64,
) -> Option<(f64, f64)> {
    let r = p1 - p0;
    let s = q1 - q0;
    let denom = cross(r, s);
    let qp = q0 - p0;
    if denom.abs() < 1e-300 {
        return None;
    }
    let t = cross(qp, s) / denom;
    let u = cross(qp, r) / denom;
    if (-1e-12..=1.0 + 1e-12).contains(&t) && (-1e-12..=1.0 + 1e-12).contains(&u) {
        // near-parallel solves are ill-conditioned and can report phantom
        // crossings; accept only if both parameterizations agree on the
        // intersection point
        let pa = p0 + r * t;
        let pb = q0 + s * u;
        if (pa - pb).norm() > 1e-7 * (r.norm() + s.norm()) {
            return None;
        }
        Some((t.clamp(0.0, 1.0), u.clamp(0.0, 1.0)))
    } else {
        None
    }
}

pub fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = dot(ab, ab);
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (dot(p - a, ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

pub fn seg_seg_distance(a0: Complex64, a1: Complex64, b0: Complex64, b1: Complex64) -> f64 {
    if seg_seg_intersection(a0, a1, b0, b1).is_some() {
        return 0.0;
    }
    point_segment_distance(a0, b0, b1)
        .min(point_segment_distance(a1, b0, b1))
        .min(point_segment_distance(b0, a0, a1))
        .min(point_segment_distance(b1, a0, a1))
}

/// Distance from a point to the circle |w - c| = r.
pub fn point_circle_boundary_distance(p: Complex64, c: Complex64, r: f64) -> f64 {
    ((p - c).norm() - r).abs()
}

/// Minimum distance from a segment to the circle |w - c| = r.
pub fn seg_circle_boundary_distance(a: Complex64, b: Complex64, c: Complex64, r: f64) -> f64 {
    let dmin = point_segment_distance(c, a, b);
    let dmax = (a - c).norm().max((b - c).norm());
    if dmin <= r && r <= dmax {
        0.0
    } else {
        (dmin - r).abs().min((dmax - r).abs())
    }
}

/// Minimum distance between two circle boundaries.
pub fn circle_circle_boundary_distance(
    c0: Complex64,
    r0: f64,
    c1: Complex64,
    r1: f64,
) -> f64 {
    let d = (c0 - c1).norm();
    if d >= r0 + r1 {
        d - r0 - r1
    } else if d + r0 <= r1 {
        r1 - d - r0
    } else if d + r1 <= r0 {
        r0 - d - r1
    } else {
        0.0
    }
}

/// True when no pair of non-adjacent edges intersects and adjacent edges
/// only meet at their shared vertex.
pub fn polygon_is_simple(verts: &[Complex64], eps: f64) -> bool {
    let n = verts.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let a0 = verts[i];
        let a1 = verts[(i + 1) % n];
        for j in (i + 1)..n {
            let b0 = verts[j];
            let b1 = verts[(j + 1) % n];
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // shared endpoint allowed; any further approach is not
                let (s0, s1, t0, t1) = if j == i + 1 {
                    (a0, a1, b0, b1)
                } else {
                    (b0, b1, a0, a1)
                };
                // s1 == t0 is the shared vertex; check the far ends
                if point_segment_distance(t1, s0, s1) < eps && (t1 - s1).norm() > eps {
                    return false;
                }
                let _ = (s0, t0);
            } else if seg_seg_distance(a0, a1, b0, b1) < eps {
                return false;
            }
        }
    }
    true
}

pub fn point_in_polygon(p: Complex64, verts: &[Complex64]) -> bool {
    let n = verts.len();
    let mut inside = false;
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        if (a.im > p.im) != (b.im > p.im) {
            let x = a.re + (p.im - a.im) / (b.im - a.im) * (b.re - a.re);
            if x > p.re {
                inside = !inside;
            }
        }
    }
    inside
}

/// Area of the lens formed by two discs with center distance `d`.
pub fn disc_disc_intersection_area(d: f64, r0: f64, r1: f64) -> f64 {
    if d >= r0 + r1 {
        return 0.0;
    }
    let (rs, rb) = if r0 < r1 { (r0, r1) } else { (r1, r0) };
    if d + rs <= rb {
        return std::f64::consts::PI * rs * rs;
    }
    let d2 = d * d;
    let a0 = ((d2 + r0 * r0 - r1 * r1) / (2.0 * d * r0)).clamp(-1.0, 1.0);
    let a1 = ((d2 + r1 * r1 - r0 * r0) / (2.0 * d * r1)).clamp(-1.0, 1.0);
    let t0 = a0.acos();
    let t1 = a1.acos();
    r0 * r0 * (t0 - t0.sin() * t0.cos()) + r1 * r1 * (t1 - t1.sin() * t1.cos())
}

/// Signed area of polygon ∩ disc(center, r); sign follows the polygon
/// orientation. Each directed edge contributes either a triangle part
/// (inside the disc) or a circular-sector part (outside), accumulated via
/// Green's theorem around the clipped region.
pub fn polygon_disc_intersection_area(verts: &[Complex64], center: Complex64, r: f64) -> f64 {
    let n = verts.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = verts[i] - center;
        let b = verts[(i + 1) % n] - center;
        acc += edge_disc_contrib(a, b, r);
    }
    acc
}

fn edge_disc_contrib(a: Complex64, b: Complex64, r: f64) -> f64 {
    // Split [a,b] at its circle crossings, then sum triangle/sector parts.
    let d = b - a;
    let len2 = dot(d, d);
    if len2 == 0.0 {
        return 0.0;
    }
    // |a + t d|^2 = r^2
    let c2 = len2;
    let c1 = 2.0 * dot(a, d);
    let c0 = dot(a, a) - r * r;
    let disc = c1 * c1 - 4.0 * c2 * c0;
    let mut ts = vec![0.0];
    if disc > 0.0 {
        let sq = disc.sqrt();
        for t in [(-c1 - sq) / (2.0 * c2), (-c1 + sq) / (2.0 * c2)] {
            if t > 1e-14 && t < 1.0 - 1e-14 {
                ts.push(t);
            }
        }
    }
    ts.push(1.0);
    ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut acc = 0.0;
    for w in ts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 - t0 < 1e-15 {
            continue;
        }
        let p = a + d * t0;
        let q = a + d * t1;
        let mid = a + d * (0.5 * (t0 + t1));
        if mid.norm() <= r {
            acc += cross(p, q) / 2.0;
        } else {
            // sector between directions p and q (signed, minor arc)
            let ang = cross(p, q).atan2(dot(p, q));
            acc += 0.5 * r * r * ang;
        }
    }
    acc
}

/// Classification of an axis-aligned cell against a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellClass {
    Inside,
    Outside,
    Partial,
}

pub fn classify_rect_vs_disc(
    lo: Complex64,
    hi: Complex64,
    center: Complex64,
    r: f64,
) -> CellClass {
    let corners = [
        lo,
        Complex64::new(hi.re, lo.im),
        hi,
        Complex64::new(lo.re, hi.im),
    ];
    let inside = corners.iter().filter(|p| (*p - center).norm() <= r).count();
    if inside == 4 {
        return CellClass::Inside;
    }
    // nearest point of the rect to the center
    let nx = center.re.clamp(lo.re, hi.re);
    let ny = center.im.clamp(lo.im, hi.im);
    let nearest = Complex64::new(nx, ny);
    if (nearest - center).norm() > r {
        CellClass::Outside
    } else {
        CellClass::Partial
    }
}

pub fn classify_rect_vs_polygon(lo: Complex64, hi: Complex64, verts: &[Complex64]) -> CellClass {
    let corners = [
        lo,
        Complex64::new(hi.re, lo.im),
        hi,
        Complex64::new(lo.re, hi.im),
    ];
    let n = verts.len();
    // any polygon edge crossing the rect boundary makes it partial
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        for k in 0..4 {
            let c0 = corners[k];
            let c1 = corners[(k + 1) % 4];
            if seg_seg_intersection(a, b, c0, c1).is_some() {
                return CellClass::Partial;
            }
        }
    }
    let inside = corners.iter().filter(|p| point_in_polygon(**p, verts)).count();
    match inside {
        4 => CellClass::Inside,
        0 => {
            // rect may still contain the whole polygon
            if verts
                .iter()
                .any(|v| v.re >= lo.re && v.re <= hi.re && v.im >= lo.im && v.im <= hi.im)
            {
                CellClass::Partial
            } else {
                CellClass::Outside
            }
        }
        _ => CellClass::Partial,
    }
}
