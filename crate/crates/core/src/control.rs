//! Piecewise-constant controls and the induced flow on bΩ ≅ ℂ × ℝ.
//!
//! A control (α,β) at scale δ moves the planar coordinate with velocity
//! (δα, −δβ) and accumulates the twist integral
//! ∫ [∂ᵧP γ₁' − ∂ₓP γ₂'] dr in the t coordinate. The length of the
//! projected path is δ∫√(α²+β²), so the speed constraint α²+β² < 1 makes
//! δ the total length budget.

use crate::error::{CcError, Result};
use crate::potential::PotentialField;
use crate::quadrature::{adaptive_simpson, DEFAULT_EVAL_CAP};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Strict speed constraint enforced as ≤ 1 − 1e-9 so optima stay attainable.
pub const MAX_SPEED: f64 = 1.0 - 1e-9;
pub const MEAN_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Cw,
    Ccw,
}

/// A point (z, t) of the boundary under the identification bΩ ≅ ℂ × ℝ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl BoundaryPoint {
    pub fn new(x: f64, y: f64, t: f64) -> Self {
        BoundaryPoint { x, y, t }
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn from_z(z: Complex64, t: f64) -> Self {
        BoundaryPoint { x: z.re, y: z.im, t }
    }
}

/// Piecewise-constant control pair on [0,1].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ControlPair {
    /// 0 = s₀ < s₁ < … < s_K = 1
    pub breaks: Vec<f64>,
    /// (α_j, β_j) on [s_j, s_{j+1})
    pub coeffs: Vec<(f64, f64)>,
    pub mean_zero: bool,
}

impl ControlPair {
    pub fn new(breaks: Vec<f64>, coeffs: Vec<(f64, f64)>, mean_zero: bool) -> Result<Self> {
        let u = ControlPair {
            breaks,
            coeffs,
            mean_zero,
        };
        u.validate()?;
        Ok(u)
    }

    /// Equal-interval constructor.
    pub fn uniform(coeffs: Vec<(f64, f64)>, mean_zero: bool) -> Result<Self> {
        let k = coeffs.len();
        let breaks = (0..=k).map(|i| i as f64 / k as f64).collect();
        Self::new(breaks, coeffs, mean_zero)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.coeffs.len();
        if k == 0 || self.breaks.len() != k + 1 {
            return Err(CcError::InvalidControl(
                "breakpoints must be one longer than the coefficient list".into(),
            ));
        }
        if self.breaks[0] != 0.0 || (self.breaks[k] - 1.0).abs() > 1e-15 {
            return Err(CcError::InvalidControl("breakpoints must span [0,1]".into()));
        }
        for w in self.breaks.windows(2) {
            if w[1] <= w[0] {
                return Err(CcError::InvalidControl("breakpoints must be increasing".into()));
            }
        }
        for (a, b) in &self.coeffs {
            if a * a + b * b >= 1.0 {
                return Err(CcError::InvalidControl(format!(
                    "speed constraint violated: {}",
                    (a * a + b * b).sqrt()
                )));
            }
        }
        if self.mean_zero {
            let (ma, mb) = self.mean();
            if ma.abs() > MEAN_ZERO_TOL || mb.abs() > MEAN_ZERO_TOL {
                return Err(CcError::InvalidControl(format!(
                    "mean-zero violated: ({ma:.3e}, {mb:.3e})"
                )));
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> (f64, f64) {
        let mut ma = 0.0;
        let mut mb = 0.0;
        for (j, (a, b)) in self.coeffs.iter().enumerate() {
            let w = self.breaks[j + 1] - self.breaks[j];
            ma += w * a;
            mb += w * b;
        }
        (ma, mb)
    }

    /// Subtract the interval-weighted mean and rescale into the open speed
    /// constraint; marks the result mean-zero.
    pub fn project_mean_zero(&self) -> Result<Self> {
        let (ma, mb) = self.mean();
        let mut coeffs: Vec<(f64, f64)> = self
            .coeffs
            .iter()
            .map(|(a, b)| (a - ma, b - mb))
            .collect();
        let max_speed = coeffs
            .iter()
            .map(|(a, b)| (a * a + b * b).sqrt())
            .fold(0.0f64, f64::max);
        if max_speed > MAX_SPEED {
            let scale = MAX_SPEED / max_speed;
            for c in &mut coeffs {
                c.0 *= scale;
                c.1 *= scale;
            }
        }
        ControlPair::new(self.breaks.clone(), coeffs, true)
    }

    /// Vertices of the projected polygonal path started at `z0`.
    pub fn path_vertices(&self, z0: Complex64, delta: f64) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        let mut z = z0;
        out.push(z);
        for (j, (a, b)) in self.coeffs.iter().enumerate() {
            let w = self.breaks[j + 1] - self.breaks[j];
            z += Complex64::new(delta * a * w, -delta * b * w);
            out.push(z);
        }
        out
    }

    /// Time-reversal; negates the twist of mean-zero controls.
    pub fn reverse(&self) -> Self {
        let k = self.coeffs.len();
        let mut breaks = Vec::with_capacity(k + 1);
        breaks.push(0.0);
        let mut acc = 0.0;
        for j in (0..k).rev() {
            acc += self.breaks[j + 1] - self.breaks[j];
            breaks.push(acc);
        }
        breaks[k] = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .rev()
            .map(|(a, b)| (-a, -b))
            .collect();
        ControlPair {
            breaks,
            coeffs,
            mean_zero: self.mean_zero,
        }
    }
}

/// Concatenate two controls, time-rescaled so each keeps its own speeds;
/// the combined control runs at scale `delta0 + delta1`.
pub fn concat(u0: &ControlPair, delta0: f64, u1: &ControlPair, delta1: f64) -> Result<(ControlPair, f64)> {
    let total = delta0 + delta1;
    let tau = delta0 / total;
    let mut breaks: Vec<f64> = u0.breaks.iter().map(|s| s * tau).collect();
    breaks.extend(u1.breaks.iter().skip(1).map(|s| tau + s * (1.0 - tau)));
    let mut coeffs = u0.coeffs.clone();
    coeffs.extend(u1.coeffs.iter().cloned());
    let n = breaks.len();
    breaks[n - 1] = 1.0;
    ControlPair::new(breaks, coeffs, u0.mean_zero && u1.mean_zero).map(|u| (u, total))
}

/// L(πγ) = δ ∫ √(α² + β²); closed form for piecewise constants.
pub fn path_length(u: &ControlPair, delta: f64) -> f64 {
    let mut acc = 0.0;
    for (j, (a, b)) in u.coeffs.iter().enumerate() {
        let w = u.breaks[j + 1] - u.breaks[j];
        acc += w * (a * a + b * b).sqrt();
    }
    delta * acc
}

/// The twist functional Λ_{z₀,δ}(α,β): the t-increment of the flow,
/// independent of t₀.
pub fn twist(field: &PotentialField, z0: Complex64, delta: f64, u: &ControlPair) -> Result<f64> {
    u.validate()?;
    let verts = u.path_vertices(z0, delta);
    let mut total = 0.0;
    for (j, (a, b)) in u.coeffs.iter().enumerate() {
        let w = u.breaks[j + 1] - u.breaks[j];
        let p = verts[j];
        let q = verts[j + 1];
        let (alpha, beta) = (*a, *b);
        if alpha == 0.0 && beta == 0.0 {
            continue;
        }
        // integrand in the segment-local parameter r ∈ [0,1]
        let mut f = |r: f64| -> f64 {
            let zp = p + (q - p) * r;
            match field.gradient(zp) {
                Ok((px, py)) => delta * (alpha * py + beta * px) * w,
                Err(_) => f64::NAN,
            }
        };
        total += adaptive_simpson(&mut f, 0.0, 1.0, 1e-8, DEFAULT_EVAL_CAP)?;
    }
    Ok(total)
}

/// F_{(α,β),δ}(p₀): planar endpoint plus accumulated twist.
pub fn integrate_flow(
    field: &PotentialField,
    p0: BoundaryPoint,
    delta: f64,
    u: &ControlPair,
) -> Result<BoundaryPoint> {
    u.validate()?;
    let dt = twist(field, p0.z(), delta, u)?;
    let end = *u.path_vertices(p0.z(), delta).last().unwrap();
    Ok(BoundaryPoint::from_z(end, p0.t + dt))
}

/// K-segment mean-zero control tracing a regular K-gon once.
///
/// The polygon is inscribed in a circle of radius ≈ δ/(2π) when driven at
/// scale δ; clockwise traversal gives positive twist on subharmonic fields.
pub fn circle_control(k: usize, orientation: Orientation) -> Result<ControlPair> {
    if k < 3 {
        return Err(CcError::InvalidControl("circle control needs K >= 3 segments".into()));
    }
    let sign = match orientation {
        Orientation::Cw => -1.0,
        Orientation::Ccw => 1.0,
    };
    let s = MAX_SPEED;
    let mut coeffs = Vec::with_capacity(k);
    for j in 0..k {
        let psi = sign * 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / k as f64;
        coeffs.push((s * psi.cos(), -s * psi.sin()));
    }
    ControlPair::uniform(coeffs, false)?.project_mean_zero()
}

/// Max of |twist| over seeded random mean-zero controls: a Monte Carlo
/// lower bound for Λ(p₀,δ) up to quadrature error.
pub fn mc_lower_bound(
    field: &PotentialField,
    z0: Complex64,
    delta: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    for _ in 0..samples.max(1) {
        let u = random_mean_zero_control(&mut rng)?;
        let v = twist(field, z0, delta, &u)?;
        best = best.max(v.abs());
    }
    Ok(best)
}

fn random_mean_zero_control(rng: &mut ChaCha8Rng) -> Result<ControlPair> {
    let k = rng.gen_range(4..=64usize);
    let mut coeffs = Vec::with_capacity(k);
    for _ in 0..k {
        // uniform in the open unit disc
        loop {
            let a: f64 = rng.gen_range(-1.0..1.0);
            let b: f64 = rng.gen_range(-1.0..1.0);
            if a * a + b * b < 1.0 {
                coeffs.push((a, b));
                break;
            }
        }
    }
    ControlPair::uniform(coeffs, false)?.project_mean_zero()
}
