//! Large-scale metric estimation: the inverse function μ of δ ↦ Λ(p₀,δ),
//! the two-branch distance formula, the cylinder map Ψ with reachability
//! checks, and the ball-volume estimate δ²Λ.

use crate::control::{self, twist, ControlPair, Orientation};
use crate::control::BoundaryPoint;
use crate::error::{CcError, Result};
use crate::potential::{PotentialField, TRegime};
use crate::stockyard::{self, Strategy};
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::Mutex;

/// Largest μ search scale, as a power of 2 over δ₀.
const MU_MAX_EXP: i32 = 20;
/// Smallest μ search scale, as a power of 2 over δ₀.
const MU_MIN_EXP: i32 = -30;
/// Relative bisection tolerance for μ.
const MU_REL_TOL: f64 = 1e-7;
/// Relative residual tolerance for reach_check.
const REACH_REL_TOL: f64 = 1e-6;

/// Immutable evaluation context with a memoized Λ lower-bound cache.
pub struct MetricContext {
    pub field: PotentialField,
    pub delta0: f64,
    /// Type order for the small-scale Taylor branch of T.
    pub m: usize,
    pub eval_budget: u64,
    pub seed: u64,
    /// Optional precomputed (δ, Λ lower, Λ upper) rows, informational.
    pub f_table: Vec<(f64, f64, f64)>,
    cache: Mutex<HashMap<(u64, u64, u64), f64>>,
}

impl MetricContext {
    pub fn new(field: PotentialField, delta0: f64, m: usize) -> Self {
        MetricContext {
            field,
            delta0,
            m,
            eval_budget: 100_000,
            seed: 0,
            f_table: Vec::new(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// Memoized Λ(p₀,δ) lower bound from the stockyard optimizer.
    pub fn lambda_lower(&self, z0: Complex64, delta: f64) -> Result<f64> {
        let key = (z0.re.to_bits(), z0.im.to_bits(), delta.to_bits());
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return Ok(*v);
        }
        let (_, v) = stockyard::optimize(
            &self.field,
            z0,
            delta,
            Strategy::Best,
            self.eval_budget,
            self.seed,
        )?;
        let v = v.max(0.0);
        self.cache.lock().unwrap().insert(key, v);
        Ok(v)
    }

    /// Generalized inverse μ(z₀, h) = inf{δ : Λ_lower(z₀, δ) ≥ h}.
    pub fn mu(&self, z0: Complex64, h: f64) -> Result<f64> {
        if h <= 0.0 {
            return Ok(0.0);
        }
        // geometric ladder to bracket the crossing
        let mut prev = self.delta0 * 2.0f64.powi(MU_MIN_EXP);
        if self.lambda_lower(z0, prev)? >= h {
            return Ok(prev);
        }
        let mut bracket = None;
        let mut k = MU_MIN_EXP + 1;
        while k <= MU_MAX_EXP {
            let d = self.delta0 * 2.0f64.powi(k);
            if self.lambda_lower(z0, d)? >= h {
                bracket = Some((prev, d));
                break;
            }
            prev = d;
            k += 1;
        }
        let (mut a, mut b) = match bracket {
            Some(x) => x,
            None => {
                let cap = self.delta0 * 2.0f64.powi(MU_MAX_EXP);
                return Err(CcError::OutOfTableRange(h, self.lambda_lower(z0, cap)?));
            }
        };
        while b - a > MU_REL_TOL * b {
            let mid = 0.5 * (a + b);
            if self.lambda_lower(z0, mid)? >= h {
                b = mid;
            } else {
                a = mid;
            }
        }
        Ok(b)
    }

    /// Large-scale distance d(p₀,p₁) ≈ |Δz| + μ(p₀, |Δt − T|), with the
    /// T branch switched to the small-scale Taylor form when the
    /// large-branch result falls at or below δ₀.
    pub fn distance(&self, p0: BoundaryPoint, p1: BoundaryPoint) -> Result<f64> {
        let (z0, z1) = (p0.z(), p1.z());
        let planar = (z1 - z0).norm();
        if planar == 0.0 && p0.t == p1.t {
            return Ok(0.0);
        }
        let t_large = self.field.t_offset(z0, z1, TRegime::Large, self.m)?;
        let d_large = planar + self.mu(z0, (p1.t - p0.t - t_large).abs())?;
        if d_large > self.delta0 {
            return Ok(d_large);
        }
        let t_small = self.field.t_offset(z0, z1, TRegime::Small, self.m)?;
        Ok(planar + self.mu(z0, (p1.t - p0.t - t_small).abs())?)
    }

    /// Normalized bounded-Hessian distance |Δz| + √|Δt̃|; only the
    /// quadratic field admits the exact normalization.
    pub fn distance_sqrt(&self, p0: BoundaryPoint, p1: BoundaryPoint) -> Result<f64> {
        let c = match self.field.is_quadratic() {
            Some(c) => c,
            None => return Err(CcError::HessianUnbounded),
        };
        let (z0, z1) = (p0.z(), p1.z());
        // exact shear: T(p0,p1) = 2c·Im(z0·conj(z1))
        let t_shear = 2.0 * c * (z0 * z1.conj()).im;
        Ok((z1 - z0).norm() + (p1.t - p0.t - t_shear).abs().sqrt())
    }

    /// Cylinder map Ψ_{p₀,δ}(a,b,c): straight flow of the constant
    /// control (a,b) over the half scale δ/2 plus the vertical push
    /// c·f_delta.
    pub fn cylinder_point(
        &self,
        p0: BoundaryPoint,
        delta: f64,
        f_delta: f64,
        a: f64,
        b: f64,
        c: f64,
    ) -> Result<BoundaryPoint> {
        if !(delta > 0.0) || a * a + b * b >= 1.0 || c.abs() >= 1.0 {
            return Err(CcError::OutOfCylinder);
        }
        let eff = delta / 2.0;
        let end = if a == 0.0 && b == 0.0 {
            BoundaryPoint::from_z(p0.z(), p0.t)
        } else {
            let u = ControlPair::uniform(vec![(a, b)], false)?;
            control::integrate_flow(&self.field, p0, eff, &u)?
        };
        Ok(BoundaryPoint::from_z(end.z(), end.t + c * f_delta))
    }

    /// Constructive reachability: straight segment to the target base
    /// point, then concentric circle controls at the target with the
    /// radius solved by bisection on the residual t. `false` means this
    /// control family failed within budget, not that d > budget.
    pub fn reach_check(
        &self,
        p0: BoundaryPoint,
        target: BoundaryPoint,
        budget: f64,
    ) -> Result<bool> {
        if budget <= 0.0 {
            return Ok(false);
        }
        let tol = REACH_REL_TOL * (1.0 + target.t.abs());
        let dz = target.z() - p0.z();
        let seg_len = dz.norm();
        if seg_len > budget {
            return Ok(false);
        }
        let mut t_here = p0.t;
        if seg_len > 0.0 {
            let s = 0.9;
            let dc = seg_len / s;
            let u = ControlPair::uniform(vec![(s * dz.re / seg_len, -s * dz.im / seg_len)], false)?;
            t_here += twist(&self.field, p0.z(), dc, &u)?;
        }
        let mut needed = target.t - t_here;
        if needed.abs() < tol {
            return Ok(true);
        }
        let remaining = budget - seg_len;
        if remaining <= 0.0 {
            return Ok(false);
        }
        let orient = if needed > 0.0 {
            Orientation::Cw
        } else {
            Orientation::Ccw
        };
        needed = needed.abs();
        let circle = control::circle_control(64, orient)?;
        let z1 = target.z();
        // try 1..4 concentric passes; each pass spends length L/n per loop
        for n in 1..=4u32 {
            let l_max = remaining / n as f64;
            let twist_at = |l: f64| -> Result<f64> {
                Ok(n as f64 * twist(&self.field, z1, l, &circle)?.abs())
            };
            if twist_at(l_max)? + tol < needed {
                continue;
            }
            let (mut a, mut b) = (0.0f64, l_max);
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                if twist_at(mid)? >= needed {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            if (twist_at(b)? - needed).abs() < tol {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// |B_d(p₀,δ)| ≈ δ²Λ(p₀,δ): returns (lower, upper) volume bounds.
    pub fn ball_volume(&self, z0: Complex64, delta: f64) -> Result<(f64, f64)> {
        let (lo, hi) =
            stockyard::lambda_estimate(&self.field, z0, delta, self.eval_budget, self.seed)?;
        Ok((delta * delta * lo, delta * delta * hi))
    }

    /// Central-difference Jacobian determinant of Ψ_{p₀,δ} at (0,0,0).
    pub fn cylinder_jacobian(
        &self,
        p0: BoundaryPoint,
        delta: f64,
        f_delta: f64,
    ) -> Result<f64> {
        let h = 1e-4;
        let mut cols = [[0.0f64; 3]; 3];
        for (i, e) in [(0usize, [h, 0.0, 0.0]), (1, [0.0, h, 0.0]), (2, [0.0, 0.0, h])] {
            let plus = self.cylinder_point(p0, delta, f_delta, e[0], e[1], e[2])?;
            let minus = self.cylinder_point(p0, delta, f_delta, -e[0], -e[1], -e[2])?;
            cols[i] = [
                (plus.x - minus.x) / (2.0 * h),
                (plus.y - minus.y) / (2.0 * h),
                (plus.t - minus.t) / (2.0 * h),
            ];
        }
        let det = cols[0][0] * (cols[1][1] * cols[2][2] - cols[1][2] * cols[2][1])
            - cols[1][0] * (cols[0][1] * cols[2][2] - cols[0][2] * cols[2][1])
            + cols[2][0] * (cols[0][1] * cols[1][2] - cols[0][2] * cols[1][1]);
        Ok(det.abs())
    }
}
