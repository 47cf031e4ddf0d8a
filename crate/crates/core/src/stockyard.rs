//! Pens, stockyards, and the optimizer producing certified lower bounds
//! for the global structure Λ(p₀,δ).
//!
//! A stockyard is an anchored, boundary-connected collection of pens
//! whose total fencing (perimeter, with multiplicity) stays within δ.
//! Its value Σᵢ ∫_{Rᵢ} ΔP is a lower bound for Λ(p₀,δ); the upper bound
//! comes from the ball-density constant C₂ via C₂(δ + δ²).

use crate::error::{CcError, Result};
use crate::geometry::{
    self, circle_circle_boundary_distance, point_circle_boundary_distance,
    point_segment_distance, seg_circle_boundary_distance, seg_seg_distance,
};
use crate::potential::{upper_density_scan, PotentialField};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative connector width: thin rectangles of width 1e-4·δ.
pub const CONNECTOR_WIDTH_FACTOR: f64 = 1e-4;
/// Default boundary-connectivity tolerance: 1e-6·δ.
pub const EPS_CONN_FACTOR: f64 = 1e-6;
const MAX_MULTIPLICITY: f64 = 1e15;

/// An open, connected, simply connected region with a perimeter budget.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Pen {
    Disc { center: [f64; 2], radius: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

impl Pen {
    pub fn disc(center: Complex64, radius: f64) -> Self {
        Pen::Disc {
            center: [center.re, center.im],
            radius,
        }
    }

    pub fn polygon(vertices: Vec<Complex64>) -> Self {
        Pen::Polygon {
            vertices: vertices.iter().map(|v| [v.re, v.im]).collect(),
        }
    }

    /// "Fencing": Euclidean perimeter; analytic 2πr for discs.
    pub fn perimeter(&self) -> f64 {
        match self {
            Pen::Disc { radius, .. } => 2.0 * PI * radius,
            Pen::Polygon { vertices } => {
                let v = to_complex(vertices);
                geometry::perimeter(&v)
            }
        }
    }

    pub fn mass(&self, field: &PotentialField) -> Result<f64> {
        match self {
            Pen::Disc { center, radius } => {
                field.ball_mass(Complex64::new(center[0], center[1]), *radius)
            }
            Pen::Polygon { vertices } => field.region_mass(&to_complex(vertices)),
        }
    }

    pub fn shape_ok(&self) -> std::result::Result<(), String> {
        match self {
            Pen::Disc { radius, .. } => {
                if *radius > 0.0 {
                    Ok(())
                } else {
                    Err("disc pen with nonpositive radius".into())
                }
            }
            Pen::Polygon { vertices } => {
                let v = to_complex(vertices);
                if v.len() < 3 {
                    return Err("polygon pen with fewer than 3 vertices".into());
                }
                let eps = 1e-12 * geometry::bbox_diameter(&v).max(1e-12);
                if !geometry::polygon_is_simple(&v, eps) {
                    return Err("polygon pen is self-intersecting".into());
                }
                if geometry::signed_area(&v).abs() <= 0.0 {
                    return Err("polygon pen has zero area".into());
                }
                Ok(())
            }
        }
    }

    pub fn boundary_distance_to_point(&self, p: Complex64) -> f64 {
        match self {
            Pen::Disc { center, radius } => {
                point_circle_boundary_distance(p, Complex64::new(center[0], center[1]), *radius)
            }
            Pen::Polygon { vertices } => {
                let v = to_complex(vertices);
                let n = v.len();
                (0..n)
                    .map(|i| point_segment_distance(p, v[i], v[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    pub fn boundary_distance_to(&self, other: &Pen) -> f64 {
        match (self, other) {
            (Pen::Disc { center: c0, radius: r0 }, Pen::Disc { center: c1, radius: r1 }) => {
                circle_circle_boundary_distance(
                    Complex64::new(c0[0], c0[1]),
                    *r0,
                    Complex64::new(c1[0], c1[1]),
                    *r1,
                )
            }
            (Pen::Disc { center, radius }, Pen::Polygon { vertices })
            | (Pen::Polygon { vertices }, Pen::Disc { center, radius }) => {
                let v = to_complex(vertices);
                let c = Complex64::new(center[0], center[1]);
                let n = v.len();
                (0..n)
                    .map(|i| seg_circle_boundary_distance(v[i], v[(i + 1) % n], c, *radius))
                    .fold(f64::INFINITY, f64::min)
            }
            (Pen::Polygon { vertices: va }, Pen::Polygon { vertices: vb }) => {
                let a = to_complex(va);
                let b = to_complex(vb);
                let mut best = f64::INFINITY;
                for i in 0..a.len() {
                    for j in 0..b.len() {
                        best = best.min(seg_seg_distance(
                            a[i],
                            a[(i + 1) % a.len()],
                            b[j],
                            b[(j + 1) % b.len()],
                        ));
                    }
                }
                best
            }
        }
    }
}

fn to_complex(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

/// A pen together with its repetition count; repeated pens spend fencing
/// and contribute mass once per copy.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PenUse {
    pub pen: Pen,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Stockyard {
    pub anchor: [f64; 2],
    pub delta: f64,
    pub pens: Vec<PenUse>,
}

impl Stockyard {
    pub fn new(anchor: Complex64, delta: f64, pens: Vec<PenUse>) -> Self {
        Stockyard {
            anchor: [anchor.re, anchor.im],
            delta,
            pens,
        }
    }

    pub fn anchor_z(&self) -> Complex64 {
        Complex64::new(self.anchor[0], self.anchor[1])
    }

    pub fn total_fencing(&self) -> f64 {
        self.pens
            .iter()
            .map(|p| p.multiplicity as f64 * p.pen.perimeter())
            .sum()
    }

    /// Check the stockyard invariants; returns the list of violations.
    pub fn validate(&self, eps_conn: f64) -> (bool, Vec<String>) {
        let mut diags = Vec::new();
        if self.pens.is_empty() {
            diags.push("no pens".into());
            return (false, diags);
        }
        for (i, pu) in self.pens.iter().enumerate() {
            if pu.multiplicity == 0 {
                diags.push(format!("pen {i} has multiplicity 0"));
            }
            if let Err(e) = pu.pen.shape_ok() {
                diags.push(format!("pen {i}: {e}"));
            }
        }
        let fencing = self.total_fencing();
        if fencing > self.delta * (1.0 + 1e-9) {
            diags.push(format!(
                "total fencing {fencing:.6e} exceeds budget {:.6e}",
                self.delta
            ));
        }
        let anchor = self.anchor_z();
        let anchored = self
            .pens
            .iter()
            .any(|p| p.pen.boundary_distance_to_point(anchor) <= eps_conn);
        if !anchored {
            diags.push("anchor does not lie on any pen boundary".into());
        }
        // boundary union connectivity over distinct pens
        let n = self.pens.len();
        let mut seen = vec![false; n];
        let mut queue = vec![0usize];
        seen[0] = true;
        while let Some(i) = queue.pop() {
            for j in 0..n {
                if !seen[j]
                    && self.pens[i].pen.boundary_distance_to(&self.pens[j].pen) <= eps_conn
                {
                    seen[j] = true;
                    queue.push(j);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            diags.push("pen boundaries are not connected".into());
        }
        (diags.is_empty(), diags)
    }

    /// Σᵢ ∫_{Rᵢ} ΔP, counted with multiplicity.
    pub fn value(&self, field: &PotentialField, eps_conn: f64) -> Result<f64> {
        let (ok, diags) = self.validate(eps_conn);
        if !ok {
            return Err(CcError::InvalidStockyard(diags.join("; ")));
        }
        let mut total = 0.0;
        for pu in &self.pens {
            total += pu.multiplicity as f64 * pu.pen.mass(field)?;
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    SingleCircle,
    DiscChain,
    GreedyMulti,
    Best,
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "single_circle" => Ok(Strategy::SingleCircle),
            "disc_chain" => Ok(Strategy::DiscChain),
            "greedy_multi" => Ok(Strategy::GreedyMulti),
            "best" => Ok(Strategy::Best),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

/// Optimize a stockyard at (z₀, δ); the returned value is a certified
/// lower bound for Λ(p₀,δ) up to quadrature error.
pub fn optimize(
    field: &PotentialField,
    z0: Complex64,
    delta: f64,
    strategy: Strategy,
    eval_budget: u64,
    seed: u64,
) -> Result<(Stockyard, f64)> {
    let eps_conn = EPS_CONN_FACTOR * delta;
    let fallback = || -> Result<(Stockyard, f64)> {
        let r = delta / (4.0 * PI);
        let s = Stockyard::new(
            z0,
            delta,
            vec![PenUse {
                pen: Pen::disc(z0 + Complex64::new(r, 0.0), r),
                multiplicity: 1,
            }],
        );
        let v = s.value(field, eps_conn)?;
        Ok((s, v))
    };
    let run = |strat: Strategy| -> Result<Option<(Stockyard, f64)>> {
        let cand = match strat {
            Strategy::SingleCircle => single_circle(field, z0, delta)?,
            Strategy::DiscChain => disc_chain(field, z0, delta, eval_budget, seed)?,
            Strategy::GreedyMulti => greedy_multi(field, z0, delta, eval_budget, seed)?,
            Strategy::Best => unreachable!(),
        };
        match cand {
            Some(s) => {
                let (ok, _) = s.validate(eps_conn);
                if !ok {
                    return Ok(None);
                }
                match s.value(field, eps_conn) {
                    Ok(v) => Ok(Some((s, v))),
                    // degenerate candidate geometry: drop the strategy
                    Err(CcError::DegeneratePolygon(_)) | Err(CcError::InvalidStockyard(_)) => {
                        Ok(None)
                    }
                    Err(e) => Err(e),
                }
            }
            None => Ok(None),
        }
    };
    let mut best: Option<(Stockyard, f64)> = None;
    let strategies: &[Strategy] = match strategy {
        Strategy::Best => &[Strategy::SingleCircle, Strategy::DiscChain, Strategy::GreedyMulti],
        s => std::slice::from_ref(match s {
            Strategy::SingleCircle => &Strategy::SingleCircle,
            Strategy::DiscChain => &Strategy::DiscChain,
            Strategy::GreedyMulti => &Strategy::GreedyMulti,
            Strategy::Best => unreachable!(),
        }),
    };
    for s in strategies {
        if let Some((sy, v)) = run(*s)? {
            if best.as_ref().map(|(_, bv)| v > *bv).unwrap_or(true) {
                best = Some((sy, v));
            }
        }
    }
    match best {
        Some(b) => Ok(b),
        None => fallback(),
    }
}

/// One disc with z₀ on its boundary; direction and radius searched.
fn single_circle(
    field: &PotentialField,
    z0: Complex64,
    delta: f64,
) -> Result<Option<Stockyard>> {
    let r_max = delta / (2.0 * PI);
    if r_max <= 0.0 {
        return Ok(None);
    }
    let mut best: Option<(f64, f64, f64)> = None; // (value, theta, r)
    for i in 0..16 {
        let theta = 2.0 * PI * i as f64 / 16.0;
        let dir = Complex64::new(theta.cos(), theta.sin());
        let eval = |r: f64| -> Result<f64> { field.ball_mass(z0 + dir * r, r) };
        let (r, v) = golden_max(&eval, r_max * 1e-3, r_max, 48)?;
        if best.map(|(bv, _, _)| v > bv).unwrap_or(true) {
            best = Some((v, theta, r));
        }
    }
    // coordinate refinement around the winning direction
    if let Some((_, theta0, _)) = best {
        for k in 1..=3 {
            let span = 2.0 * PI / 16.0 / (2.0f64.powi(k));
            for sgn in [-1.0, 1.0] {
                let theta = theta0 + sgn * span;
                let dir = Complex64::new(theta.cos(), theta.sin());
                let eval = |r: f64| -> Result<f64> { field.ball_mass(z0 + dir * r, r) };
                let (r, v) = golden_max(&eval, r_max * 1e-3, r_max, 48)?;
                if best.map(|(bv, _, _)| v > bv).unwrap_or(true) {
                    best = Some((v, theta, r));
                }
            }
        }
    }
    Ok(best.map(|(_, theta, r)| {
        let dir = Complex64::new(theta.cos(), theta.sin());
        Stockyard::new(
            z0,
            delta,
            vec![PenUse {
                pen: Pen::disc(z0 + dir * r, r),
                multiplicity: 1,
            }],
        )
    }))
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    center: Complex64,
    radius: f64,
    mass: f64,
}

/// Candidate balls from a grid scan of B(z₀, δ/2); disc-array fields also
/// contribute their discs directly.
fn scan_candidates(
    field: &PotentialField,
    z0: Complex64,
    delta: f64,
    _eval_budget: u64,
) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    if let Some(discs) = field.discs() {
        for d in discs {
            if (d.center - z0).norm() - d.radius <= delta {
                out.push(Candidate {
                    center: d.center,
                    radius: d.radius,
                    mass: field.ball_mass(d.center, d.radius)?,
                });
            }
        }
    }
    let half = delta / 2.0;
    let base_r = delta / (4.0 * PI);
    let n = 32usize;
    for i in 0..n {
        for j in 0..n {
            let z = z0
                + Complex64::new(
                    -half + delta * i as f64 / (n - 1) as f64,
                    -half + delta * j as f64 / (n - 1) as f64,
                );
            for oct in 0..3 {
                let r = base_r / 2.0f64.powi(oct);
                out.push(Candidate {
                    center: z,
                    radius: r,
                    mass: field.ball_mass(z, r)?,
                });
            }
        }
    }
    Ok(out)
}

/// Chain value of repeating one target ball connected to z₀ by a thin
/// rectangle; returns the pens and the predicted score.
fn chain_for(
    z0: Complex64,
    delta: f64,
    cand: &Candidate,
) -> Result<Option<(Vec<PenUse>, f64)>> {
    let w = CONNECTOR_WIDTH_FACTOR * delta;
    let gap = ((cand.center - z0).norm() - cand.radius).abs();
    let per = 2.0 * PI * cand.radius;
    let mut pens = Vec::new();
    let mut avail = delta;
    if gap > EPS_CONN_FACTOR * delta {
        // a connector whose area drowns in coordinate round-off cannot be
        // validated; drop the candidate
        let scale = 1.0 + z0.norm() + cand.center.norm();
        if gap * w < 1e-12 * scale * scale {
            return Ok(None);
        }
        let conn_fencing = 2.0 * gap + 2.0 * w;
        if conn_fencing + per > delta {
            return Ok(None);
        }
        avail -= conn_fencing;
        pens.push(PenUse {
            pen: connector_pen(z0, cand.center, cand.radius, w),
            multiplicity: 1,
        });
    }
    let copies = (avail / per).floor().min(MAX_MULTIPLICITY);
    if copies < 1.0 {
        return Ok(None);
    }
    pens.push(PenUse {
        pen: Pen::disc(cand.center, cand.radius),
        multiplicity: copies as u64,
    });
    // connector mass is negligible for ranking; the final value() counts it
    Ok(Some((pens, copies * cand.mass)))
}

/// Thin rectangular pen from z₀ to the nearest boundary point of the
/// target ball; z₀ sits on the midpoint of one short edge.
fn connector_pen(z0: Complex64, center: Complex64, radius: f64, width: f64) -> Pen {
    let to_c = center - z0;
    let dist = to_c.norm();
    let u = if dist > 0.0 {
        to_c / dist
    } else {
        Complex64::new(1.0, 0.0)
    };
    // nearest point of the circle along the ray through z0; the same
    // expression covers z0 inside the disc
    let zb = center - u * radius;
    let nv = Complex64::new(-u.im, u.re) * (width / 2.0);
    Pen::polygon(vec![z0 + nv, zb + nv, zb - nv, z0 - nv])
}

fn disc_chain(
    field: &PotentialField,
    z0: Complex64,
    delta: f64,
    eval_budget: u64,
    seed: u64,
) -> Result<Option<Stockyard>> {
    let _ = seed;
    let mut cands = scan_candidates(field, z0, delta, eval_budget)?;
    cands.retain(|c| c.mass > 0.0);
    if cands.is_empty() {
        return Ok(None);
    }
    // rank by predicted chain score
    let mut scored = Vec::new();
    for c in &cands {
        if let Some((_, score)) = chain_for(z0, delta, c)? {
            scored.push((score, *c));
        }
    }
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    scored.truncate(5);
    // golden-section refinement of the radius of the top candidates
    let mut best: Option<(f64, Vec<PenUse>)> = None;
    for (_, c) in &scored {
        let eval = |r: f64| -> Result<f64> {
            let cand = Candidate {
                center: c.center,
                radius: r,
                mass: field.ball_mass(c.center, r)?,
            };
            Ok(chain_for(z0, delta, &cand)?
                .map(|(_, s)| s)
                .unwrap_or(0.0))
        };
        let r_hi = (delta / (2.0 * PI)).min(c.radius * 4.0);
        let (r, _) = golden_max(&eval, c.radius * 0.25, r_hi, 40)?;
        for radius in [c.radius, r] {
            let cand = Candidate {
                center: c.center,
                radius,
                mass: field.ball_mass(c.center, radius)?,
            };
            if let Some((pens, score)) = chain_for(z0, delta, &cand)? {
                if best.as_ref().map(|(bs, _)| score > *bs).unwrap_or(true) {
                    best = Some((score, pens));
                }
            }
        }
    }
    Ok(best.map(|(_, pens)| Stockyard::new(z0, delta, pens)))
}

/// Spread fencing across the top-scoring candidate balls, chained by thin
/// connectors; surplus fencing repeats the best mass/perimeter ball.
fn greedy_multi(
    field: &PotentialField,
    z0: Complex64,
    delta: f64,
    eval_budget: u64,
    seed: u64,
) -> Result<Option<Stockyard>> {
    let _ = seed;
    let mut cands = scan_candidates(field, z0, delta, eval_budget)?;
    cands.retain(|c| c.mass > 0.0);
    if cands.is_empty() {
        return Ok(None);
    }
    cands.sort_by(|a, b| {
        let ra = a.mass / (2.0 * PI * a.radius);
        let rb = b.mass / (2.0 * PI * b.radius);
        rb.partial_cmp(&ra).unwrap()
    });
    // drop near-duplicate sites
    let mut top: Vec<Candidate> = Vec::new();
    for c in cands {
        if top
            .iter()
            .all(|t| (t.center - c.center).norm() > (t.radius + c.radius).max(1e-9))
        {
            top.push(c);
        }
        if top.len() == 5 {
            break;
        }
    }
    let w = CONNECTOR_WIDTH_FACTOR * delta;
    let mut best: Option<(f64, Vec<PenUse>)> = None;
    for k in 1..=top.len() {
        let mut pens: Vec<PenUse> = Vec::new();
        let mut fencing = 0.0;
        let mut prev = z0;
        let mut prev_r = 0.0;
        let mut ok = true;
        for c in &top[..k] {
            let gap = ((c.center - prev).norm() - c.radius - prev_r).max(0.0);
            if gap > EPS_CONN_FACTOR * delta {
                let scale = 1.0 + prev.norm() + c.center.norm();
                if gap * w < 1e-12 * scale * scale {
                    ok = false;
                    break;
                }
                let conn = 2.0 * gap + 2.0 * w;
                fencing += conn;
                pens.push(PenUse {
                    pen: connector_between(prev, prev_r, c.center, c.radius, w),
                    multiplicity: 1,
                });
            }
            fencing += 2.0 * PI * c.radius;
            pens.push(PenUse {
                pen: Pen::disc(c.center, c.radius),
                multiplicity: 1,
            });
            if fencing > delta {
                ok = false;
                break;
            }
            prev = c.center;
            prev_r = c.radius;
        }
        if !ok {
            continue;
        }
        // surplus fencing: repeat the best-ratio ball already in the chain
        let leader = &top[0];
        let per = 2.0 * PI * leader.radius;
        let extra = ((delta - fencing) / per).floor().min(MAX_MULTIPLICITY);
        if extra >= 1.0 {
            if let Some(pu) = pens.iter_mut().find(|p| match &p.pen {
                Pen::Disc { center, radius } => {
                    (Complex64::new(center[0], center[1]) - leader.center).norm() < 1e-12
                        && (*radius - leader.radius).abs() < 1e-15
                }
                _ => false,
            }) {
                pu.multiplicity += extra as u64;
            }
        }
        let score: f64 = pens
            .iter()
            .map(|p| {
                p.multiplicity as f64
                    * match &p.pen {
                        Pen::Disc { .. } => p.pen.mass(field).unwrap_or(0.0),
                        Pen::Polygon { .. } => 0.0,
                    }
            })
            .sum();
        if best.as_ref().map(|(bs, _)| score > *bs).unwrap_or(true) {
            best = Some((score, pens));
        }
    }
    Ok(best.map(|(_, pens)| Stockyard::new(z0, delta, pens)))
}

/// Connector between two circle boundaries (or from the anchor point when
/// `r_from` is 0).
fn connector_between(
    from: Complex64,
    r_from: f64,
    to_center: Complex64,
    r_to: f64,
    width: f64,
) -> Pen {
    let dir = to_center - from;
    let d = dir.norm();
    let u = if d > 0.0 { dir / d } else { Complex64::new(1.0, 0.0) };
    let a = from + u * r_from;
    let b = to_center - u * r_to;
    let nv = Complex64::new(-u.im, u.re) * (width / 2.0);
    Pen::polygon(vec![a + nv, b + nv, b - nv, a - nv])
}

/// Lemma-4.1(b) style upper bound C₂(δ + δ²) for any stockyard value.
pub fn upper_bound(_field: &PotentialField, _z0: Complex64, delta: f64, c2: f64) -> f64 {
    c2 * (delta + delta * delta)
}

/// Empirical C₂ near z₀, scanned over the canonical window
/// [z₀ − δ, z₀ + δ]² with an 8×8 grid and a geometric δ ladder.
pub fn local_c2(field: &PotentialField, z0: Complex64, delta: f64) -> Result<f64> {
    upper_density_scan(
        field,
        z0 - Complex64::new(delta, delta),
        z0 + Complex64::new(delta, delta),
        delta,
        8,
    )
}

/// Certified bracket (lower, upper) for Λ(p₀,δ).
pub fn lambda_estimate(
    field: &PotentialField,
    z0: Complex64,
    delta: f64,
    eval_budget: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    let (_, opt) = optimize(field, z0, delta, Strategy::Best, eval_budget, seed)?;
    let samples = ((eval_budget / 50_000).max(8) as usize).min(64);
    let mc = crate::control::mc_lower_bound(field, z0, delta, samples, seed)?;
    let lower = opt.max(mc);
    let c2 = local_c2(field, z0, delta)?;
    let upper = upper_bound(field, z0, delta, c2).max(lower);
    Ok((lower, upper))
}

/// Golden-section maximization on [a, b] of a unimodal-ish objective;
/// returns the best of the probed points (endpoints included).
fn golden_max<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64, iters: usize) -> Result<(f64, f64)> {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = (a, f(a)?);
    let fb = f(b)?;
    if fb > best.1 {
        best = (b, fb);
    }
    for _ in 0..iters {
        if f1 > best.1 {
            best = (x1, f1);
        }
        if f2 > best.1 {
            best = (x2, f2);
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1)?;
        }
    }
    Ok(best)
}
