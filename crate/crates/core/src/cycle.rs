//! Decomposition of a self-intersecting closed polygonal path into
//! edge-disjoint oriented simple cycles, and the Green's-theorem masses
//! attached to them.
//!
//! The refined loop is read as a directed Eulerian multigraph whose
//! vertices are the self-intersection points; stack-based loop erasure
//! along the traversal order extracts the cycles deterministically.

use crate::control::Orientation;
use crate::error::{CcError, Result};
use crate::geometry::{self, seg_seg_intersection};
use crate::potential::PotentialField;
use crate::quadrature::{adaptive_simpson, DEFAULT_EVAL_CAP};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

/// Closed polygonal projection of a control path. The closing edge
/// `v_{M-1} -> v_0` is implicit.
#[derive(Debug, Clone)]
pub struct PolyLoop {
    pub vertices: Vec<Complex64>,
    pub base_index: usize,
}

/// One oriented simple cycle of the Eulerian decomposition.
#[derive(Debug, Clone)]
pub struct SimpleCycle {
    pub vertices: Vec<Complex64>,
    pub orientation: Orientation,
    /// parameter interval of the parent loop covered by this cycle
    pub provenance: Vec<(f64, f64)>,
}

impl PolyLoop {
    pub fn new(vertices: Vec<Complex64>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(CcError::DegeneratePolygon("loop needs at least 3 vertices".into()));
        }
        let n = vertices.len();
        for i in 0..n {
            let d = (vertices[(i + 1) % n] - vertices[i]).norm();
            if d < 1e-12 {
                return Err(CcError::DegeneratePolygon(format!(
                    "consecutive vertices {i} closer than 1e-12"
                )));
            }
            if !vertices[i].re.is_finite() || !vertices[i].im.is_finite() {
                return Err(CcError::DegeneratePolygon("non-finite vertex".into()));
            }
        }
        Ok(PolyLoop {
            vertices,
            base_index: 0,
        })
    }

    pub fn total_length(&self) -> f64 {
        geometry::perimeter(&self.vertices)
    }

    pub fn default_eps(&self) -> f64 {
        1e-9 * geometry::bbox_diameter(&self.vertices).max(1e-9)
    }

    fn seed_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for v in &self.vertices {
            v.re.to_bits().hash(&mut h);
            v.im.to_bits().hash(&mut h);
        }
        h.finish()
    }
}

/// Insert every pairwise edge-intersection point as a vertex.
///
/// General position is enforced by deterministic jitter of interior
/// vertices (seeded from the loop hash) when collinear overlaps persist.
pub fn refine_intersections(poly: &PolyLoop, eps_gp: f64) -> Result<PolyLoop> {
    let mut current = poly.clone();
    for attempt in 0..4 {
        match try_refine(&current, eps_gp) {
            Ok(refined) => return Ok(refined),
            Err(_) if attempt < 3 => {
                current = jitter(&current, eps_gp, attempt as u64);
            }
            Err(e) => return Err(e),
        }
    }
    Err(CcError::DegenerateAfterPerturbation)
}

fn jitter(poly: &PolyLoop, eps_gp: f64, attempt: u64) -> PolyLoop {
    let mut rng = ChaCha8Rng::seed_from_u64(poly.seed_hash().wrapping_add(attempt));
    let mut verts = poly.vertices.clone();
    for (i, v) in verts.iter_mut().enumerate() {
        if i == poly.base_index {
            continue;
        }
        v.re += eps_gp * (rng.gen::<f64>() - 0.5) * 2.0;
        v.im += eps_gp * (rng.gen::<f64>() - 0.5) * 2.0;
    }
    PolyLoop {
        vertices: verts,
        base_index: poly.base_index,
    }
}

fn try_refine(poly: &PolyLoop, eps_gp: f64) -> Result<PolyLoop> {
    let n = poly.vertices.len();
    let v = &poly.vertices;
    // per-edge list of interior split parameters
    let mut splits: Vec<Vec<f64>> = vec![Vec::new(); n];
    for i in 0..n {
        let a0 = v[i];
        let a1 = v[(i + 1) % n];
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let b0 = v[j];
            let b1 = v[(j + 1) % n];
            let parallel = geometry::cross(a1 - a0, b1 - b0).abs()
                < 1e-12 * (a1 - a0).norm() * (b1 - b0).norm();
            if parallel {
                if !adjacent && geometry::seg_seg_distance(a0, a1, b0, b1) < eps_gp {
                    // collinear overlap: not in general position
                    return Err(CcError::DegenerateAfterPerturbation);
                }
                continue;
            }
            if let Some((t, u)) = seg_seg_intersection(a0, a1, b0, b1) {
                let la = (a1 - a0).norm();
                let lb = (b1 - b0).norm();
                let t_int = t * la > eps_gp && (1.0 - t) * la > eps_gp;
                let u_int = u * lb > eps_gp && (1.0 - u) * lb > eps_gp;
                if adjacent {
                    continue; // shares the common vertex only
                }
                if t_int {
                    splits[i].push(t);
                }
                if u_int {
                    splits[j].push(u);
                }
            }
        }
    }
    let mut out = Vec::with_capacity(n + splits.iter().map(Vec::len).sum::<usize>());
    for i in 0..n {
        out.push(v[i]);
        let a0 = v[i];
        let a1 = v[(i + 1) % n];
        let mut ts = splits[i].clone();
        ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        ts.dedup_by(|x, y| (*x - *y).abs() * (a1 - a0).norm() < eps_gp);
        for t in ts {
            out.push(a0 + (a1 - a0) * t);
        }
    }
    Ok(PolyLoop {
        vertices: out,
        base_index: poly.base_index,
    })
}

/// Edge-disjoint simple-cycle decomposition of a refined loop.
pub fn decompose(poly: &PolyLoop, eps_gp: f64) -> Result<Vec<SimpleCycle>> {
    let n = poly.vertices.len();
    let v = &poly.vertices;
    // identify coincident points (within eps_gp) as one graph vertex
    let mut ids = vec![usize::MAX; n];
    let mut reps: Vec<Complex64> = Vec::new();
    for i in 0..n {
        let mut found = None;
        for (r, p) in reps.iter().enumerate() {
            if (*p - v[i]).norm() < eps_gp {
                found = Some(r);
                break;
            }
        }
        ids[i] = match found {
            Some(r) => r,
            None => {
                reps.push(v[i]);
                reps.len() - 1
            }
        };
    }
    let mut cycles = Vec::new();
    // stack entries: (graph id, point, walk index)
    let mut stack: Vec<(usize, Complex64, usize)> = Vec::new();
    let mut edges_used = 0usize;
    for walk in 0..=n {
        let idx = walk % n;
        let id = ids[idx];
        if let Some(pos) = stack.iter().position(|(sid, _, _)| *sid == id) {
            // pop the enclosed loop as one simple cycle
            let cyc: Vec<(usize, Complex64, usize)> = stack.drain(pos..).collect();
            if walk > 0 {
                edges_used += cyc.len();
            }
            if cyc.len() >= 3 {
                let verts: Vec<Complex64> = cyc.iter().map(|e| e.1).collect();
                let area = geometry::signed_area(&verts);
                let orientation = if area < 0.0 {
                    Orientation::Cw
                } else {
                    Orientation::Ccw
                };
                let p0 = cyc.first().unwrap().2 as f64 / n as f64;
                let p1 = walk as f64 / n as f64;
                cycles.push(SimpleCycle {
                    vertices: verts,
                    orientation,
                    provenance: vec![(p0, p1)],
                });
            }
            if walk < n {
                stack.push((id, v[idx], walk));
            }
        } else {
            stack.push((id, v[idx], walk));
        }
    }
    if !stack.is_empty() || edges_used != n {
        return Err(CcError::NotEulerian);
    }
    Ok(cycles)
}

/// Convenience: refine then decompose with the loop's default tolerance.
pub fn refine_and_decompose(poly: &PolyLoop) -> Result<Vec<SimpleCycle>> {
    let eps = poly.default_eps();
    let refined = refine_intersections(poly, eps)?;
    decompose(&refined, eps)
}

/// Signed Green's-theorem mass of a simple cycle: positive when the cycle
/// is negatively oriented (clockwise), matching ∮ ∂ᵧP dx − ∂ₓP dy.
pub fn signed_mass(field: &PotentialField, cycle: &SimpleCycle) -> Result<f64> {
    let mass = field.region_mass(&cycle.vertices)?;
    Ok(match cycle.orientation {
        Orientation::Cw => mass,
        Orientation::Ccw => -mass,
    })
}

/// ∮ ∂ᵧP dx − ∂ₓP dy along the loop, by per-edge adaptive quadrature.
pub fn loop_integral(field: &PotentialField, poly: &PolyLoop) -> Result<f64> {
    let n = poly.vertices.len();
    let mut total = 0.0;
    for i in 0..n {
        let p = poly.vertices[i];
        let q = poly.vertices[(i + 1) % n];
        let d = q - p;
        let mut f = |r: f64| -> f64 {
            let z = p + d * r;
            match field.gradient(z) {
                Ok((px, py)) => py * d.re - px * d.im,
                Err(_) => f64::NAN,
            }
        };
        total += adaptive_simpson(&mut f, 0.0, 1.0, 1e-9, DEFAULT_EVAL_CAP)?;
    }
    Ok(total)
}

/// Seeded random closed M-gon in the given square, for tests and demos.
pub fn random_loop(m: usize, half_width: f64, seed: u64) -> PolyLoop {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let verts: Vec<Complex64> = (0..m)
            .map(|_| {
                Complex64::new(
                    rng.gen_range(-half_width..half_width),
                    rng.gen_range(-half_width..half_width),
                )
            })
            .collect();
        if let Ok(p) = PolyLoop::new(verts) {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c64(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    fn figure_eight() -> PolyLoop {
        PolyLoop::new(vec![
            c64(0.0, 0.0),
            c64(1.0, 1.0),
            c64(1.0, 0.0),
            c64(0.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn refine_figure_eight_inserts_crossing_twice() {
        let p = figure_eight();
        let refined = refine_intersections(&p, p.default_eps()).unwrap();
        let hits = refined
            .vertices
            .iter()
            .filter(|v| (**v - c64(0.5, 0.5)).norm() < 1e-9)
            .count();
        assert_eq!(hits, 2);
        assert_eq!(refined.vertices.len(), 6);
    }

    #[test]
    fn refine_simple_square_unchanged() {
        let p = PolyLoop::new(vec![
            c64(0.0, 0.0),
            c64(1.0, 0.0),
            c64(1.0, 1.0),
            c64(0.0, 1.0),
        ])
        .unwrap();
        let refined = refine_intersections(&p, p.default_eps()).unwrap();
        assert_eq!(refined.vertices.len(), 4);
    }

    #[test]
    fn refine_preserves_length() {
        let p = random_loop(20, 3.0, 3);
        let refined = refine_intersections(&p, p.default_eps()).unwrap();
        assert_relative_eq!(
            refined.total_length(),
            p.total_length(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn decompose_figure_eight() {
        let p = figure_eight();
        let cycles = refine_and_decompose(&p).unwrap();
        assert_eq!(cycles.len(), 2);
        let orients: Vec<_> = cycles.iter().map(|c| c.orientation).collect();
        assert!(orients.contains(&Orientation::Cw) && orients.contains(&Orientation::Ccw));
        let total: f64 = cycles
            .iter()
            .map(|c| geometry::perimeter(&c.vertices))
            .sum();
        let refined = refine_intersections(&p, p.default_eps()).unwrap();
        assert_relative_eq!(total, refined.total_length(), max_relative = 1e-9);
    }

    #[test]
    fn decompose_square_is_identity() {
        let p = PolyLoop::new(vec![
            c64(0.0, 0.0),
            c64(1.0, 0.0),
            c64(1.0, 1.0),
            c64(0.0, 1.0),
        ])
        .unwrap();
        let cycles = refine_and_decompose(&p).unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].vertices.len(), 4);
        assert_eq!(cycles[0].orientation, Orientation::Ccw);
    }

    #[test]
    fn signed_mass_square_orientations() {
        let f = PotentialField::quadratic(1.0).unwrap();
        let cw = SimpleCycle {
            vertices: vec![c64(0.0, 0.0), c64(0.0, 1.0), c64(1.0, 1.0), c64(1.0, 0.0)],
            orientation: Orientation::Cw,
            provenance: vec![],
        };
        assert_relative_eq!(signed_mass(&f, &cw).unwrap(), 4.0);
        let ccw = SimpleCycle {
            vertices: vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 1.0), c64(0.0, 1.0)],
            orientation: Orientation::Ccw,
            provenance: vec![],
        };
        assert_relative_eq!(signed_mass(&f, &ccw).unwrap(), -4.0);
    }

    #[test]
    fn loop_integral_square_cw() {
        let f = PotentialField::quadratic(1.0).unwrap();
        let cw = PolyLoop::new(vec![
            c64(0.0, 0.0),
            c64(0.0, 1.0),
            c64(1.0, 1.0),
            c64(1.0, 0.0),
        ])
        .unwrap();
        assert_relative_eq!(loop_integral(&f, &cw).unwrap(), 4.0, max_relative = 1e-8);
    }

    #[test]
    fn loop_integral_figure_eight_cancels() {
        let f = PotentialField::quadratic(1.0).unwrap();
        let p = figure_eight();
        assert!(loop_integral(&f, &p).unwrap().abs() < 1e-8);
    }

    #[test]
    fn loop_integral_zero_density_region() {
        let f = PotentialField::disc_array((-5.0, -5.0), (5.0, 5.0)).unwrap();
        let p = PolyLoop::new(vec![
            c64(100.0, 100.0),
            c64(101.0, 100.0),
            c64(101.0, 101.0),
            c64(100.0, 101.0),
        ])
        .unwrap();
        // loop encloses no density, but the tail field still integrates to 0
        assert!(loop_integral(&f, &p).unwrap().abs() < 1e-7);
    }

    #[test]
    fn green_identity_random_loops() {
        let f = PotentialField::quadratic(1.0).unwrap();
        for seed in 0..20 {
            let p = random_loop(12, 2.0, seed);
            let li = loop_integral(&f, &p).unwrap();
            let cycles = refine_and_decompose(&p).unwrap();
            let sum: f64 = cycles
                .iter()
                .map(|c| signed_mass(&f, c).unwrap())
                .sum();
            assert_relative_eq!(li, sum, max_relative = 1e-6, epsilon = 1e-8);
        }
    }

    #[test]
    fn flip_negates_loop_integral() {
        let f = PotentialField::quadratic(1.0).unwrap();
        let p = random_loop(10, 2.0, 11);
        let mut rev = p.vertices.clone();
        rev.reverse();
        let pr = PolyLoop::new(rev).unwrap();
        assert_relative_eq!(
            loop_integral(&f, &p).unwrap(),
            -loop_integral(&f, &pr).unwrap(),
            max_relative = 1e-9,
            epsilon = 1e-12
        );
    }
}
