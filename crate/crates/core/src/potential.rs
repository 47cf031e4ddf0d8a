//! Subharmonic potentials P : ℂ → ℝ represented through their density ΔP.
//!
//! Three kinds are supported: the quadratic `c|z|^2`, a lattice of small
//! dense discs with geometrically decaying mass, and a sampled density
//! grid with bilinear interpolation. Everything downstream (twist, masses,
//! stockyard values, metric estimates) only ever queries the density, the
//! gradient, and ball/region masses, so this module is the single numeric
//! kernel of the crate.

use crate::error::{CcError, Result};
use crate::geometry::{
    self, classify_rect_vs_polygon, disc_disc_intersection_area,
    polygon_disc_intersection_area,
};
use crate::quadrature::{self, integrate_region, DEFAULT_EVAL_CAP};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Lattice spacing of the disc-array kind.
pub const DISC_LATTICE_SPACING: f64 = 10.0;
/// Cap on the order of z-derivatives taken by finite differences.
pub const MAX_DZ_ORDER: usize = 6;

/// One disc of the disc-array density: radius `2^-k`, density `2^k / π`.
#[derive(Debug, Clone, Serialize)]
pub struct Disc {
    pub center: Complex64,
    pub index: u32,
    pub radius: f64,
    pub density: f64,
    /// total ΔP-mass of the disc, `2^-k`
    pub mass: f64,
}

/// Density grid: samples at `origin + (i*h, j*h)`, row-major with y outer.
#[derive(Debug, Clone, Default)]
pub struct DensityGrid {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub origin: Complex64,
    pub data: Vec<f64>,
    /// lazily built sub-cell point masses used by the gradient kernel
    masses: std::sync::OnceLock<Vec<(Complex64, f64)>>,
}

#[derive(Debug, Clone)]
pub enum PotentialField {
    Quadratic { c: f64 },
    DiscArray {
        window: (Complex64, Complex64),
        discs: Vec<Disc>,
    },
    DensityGrid(DensityGrid),
}

/// JSON selection of a potential, as read from run configs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum PotentialSpec {
    #[serde(rename = "quadratic")]
    Quadratic {
        #[serde(default = "default_c")]
        c: f64,
    },
    #[serde(rename = "disc_array")]
    DiscArray { window: [f64; 4] },
    #[serde(rename = "density_grid")]
    DensityGrid { path: String },
}

fn default_c() -> f64 {
    1.0
}

impl DensityGrid {
    pub fn support(&self) -> (Complex64, Complex64) {
        (
            self.origin,
            self.origin
                + Complex64::new(
                    (self.nx - 1) as f64 * self.h,
                    (self.ny - 1) as f64 * self.h,
                ),
        )
    }

    /// Bilinear interpolation of ΔP; zero outside the sampled rectangle.
    pub fn eval(&self, z: Complex64) -> f64 {
        let fx = (z.re - self.origin.re) / self.h;
        let fy = (z.im - self.origin.im) / self.h;
        if fx < 0.0 || fy < 0.0 || fx > (self.nx - 1) as f64 || fy > (self.ny - 1) as f64 {
            return 0.0;
        }
        let ix = (fx.floor() as usize).min(self.nx - 2);
        let iy = (fy.floor() as usize).min(self.ny - 2);
        let tx = fx - ix as f64;
        let ty = fy - iy as f64;
        let v00 = self.data[iy * self.nx + ix];
        let v10 = self.data[iy * self.nx + ix + 1];
        let v01 = self.data[(iy + 1) * self.nx + ix];
        let v11 = self.data[(iy + 1) * self.nx + ix + 1];
        v00 * (1.0 - tx) * (1.0 - ty) + v10 * tx * (1.0 - ty) + v01 * (1.0 - tx) * ty
            + v11 * tx * ty
    }

    /// Exact integral of the bilinear density over an axis-aligned
    /// rectangle, split along grid lines.
    pub fn rect_mass(&self, lo: Complex64, hi: Complex64) -> f64 {
        let (slo, shi) = self.support();
        let x0 = lo.re.max(slo.re);
        let x1 = hi.re.min(shi.re);
        let y0 = lo.im.max(slo.im);
        let y1 = hi.im.min(shi.im);
        if x0 >= x1 || y0 >= y1 {
            return 0.0;
        }
        let i0 = (((x0 - self.origin.re) / self.h).floor() as usize).min(self.nx - 2);
        let i1 = (((x1 - self.origin.re) / self.h).ceil() as usize).min(self.nx - 1);
        let j0 = (((y0 - self.origin.im) / self.h).floor() as usize).min(self.ny - 2);
        let j1 = (((y1 - self.origin.im) / self.h).ceil() as usize).min(self.ny - 1);
        let mut acc = 0.0;
        for j in j0..j1 {
            let cy0 = (self.origin.im + j as f64 * self.h).max(y0);
            let cy1 = (self.origin.im + (j + 1) as f64 * self.h).min(y1);
            if cy0 >= cy1 {
                continue;
            }
            for i in i0..i1 {
                let cx0 = (self.origin.re + i as f64 * self.h).max(x0);
                let cx1 = (self.origin.re + (i + 1) as f64 * self.h).min(x1);
                if cx0 >= cx1 {
                    continue;
                }
                // integral of a bilinear function over a rectangle is the
                // center value times the area
                let center = Complex64::new(0.5 * (cx0 + cx1), 0.5 * (cy0 + cy1));
                acc += self.eval(center) * (cx1 - cx0) * (cy1 - cy0);
            }
        }
        acc
    }

    pub fn total_mass(&self) -> f64 {
        let (lo, hi) = self.support();
        self.rect_mass(lo, hi)
    }

    /// Integral of the density over a disc, cell by cell: full raster
    /// cells contribute exactly (center value × area), boundary cells are
    /// clipped against the circle.
    pub fn disc_mass(&self, c: Complex64, r: f64) -> f64 {
        let (slo, shi) = self.support();
        let x0 = (c.re - r).max(slo.re);
        let x1 = (c.re + r).min(shi.re);
        let y0 = (c.im - r).max(slo.im);
        let y1 = (c.im + r).min(shi.im);
        if x0 >= x1 || y0 >= y1 {
            return 0.0;
        }
        let i0 = (((x0 - self.origin.re) / self.h).floor() as usize).min(self.nx - 2);
        let i1 = ((((x1 - self.origin.re) / self.h).ceil() as usize).max(i0 + 1)).min(self.nx - 1);
        let j0 = (((y0 - self.origin.im) / self.h).floor() as usize).min(self.ny - 2);
        let j1 = ((((y1 - self.origin.im) / self.h).ceil() as usize).max(j0 + 1)).min(self.ny - 1);
        let mut acc = 0.0;
        for j in j0..j1 {
            let cy0 = self.origin.im + j as f64 * self.h;
            let cy1 = cy0 + self.h;
            for i in i0..i1 {
                let cx0 = self.origin.re + i as f64 * self.h;
                let cx1 = cx0 + self.h;
                let lo = Complex64::new(cx0, cy0);
                let hi = Complex64::new(cx1, cy1);
                match geometry::classify_rect_vs_disc(lo, hi, c, r) {
                    geometry::CellClass::Outside => {}
                    geometry::CellClass::Inside => acc += self.rect_mass(lo, hi),
                    geometry::CellClass::Partial => {
                        let rect = [
                            lo,
                            Complex64::new(cx1, cy0),
                            hi,
                            Complex64::new(cx0, cy1),
                        ];
                        let area = geometry::polygon_disc_intersection_area(&rect, c, r);
                        let center = Complex64::new(0.5 * (cx0 + cx1), 0.5 * (cy0 + cy1));
                        acc += self.eval(center) * area.max(0.0);
                    }
                }
            }
        }
        acc
    }

    /// 2×2 sub-cell point masses of every raster cell, zero masses
    /// dropped; built once on first use.
    pub fn point_masses(&self) -> &[(Complex64, f64)] {
        self.masses.get_or_init(|| {
            let mut out = Vec::new();
            let q = self.h / 2.0;
            for j in 0..(self.ny - 1) {
                for i in 0..(self.nx - 1) {
                    let x0 = self.origin.re + i as f64 * self.h;
                    let y0 = self.origin.im + j as f64 * self.h;
                    for (a, b) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
                        let c = Complex64::new(x0 + (a + 0.5) * q, y0 + (b + 0.5) * q);
                        let m = self.eval(c) * q * q;
                        if m != 0.0 {
                            out.push((c, m));
                        }
                    }
                }
            }
            out
        })
    }
}

impl PotentialField {
    pub fn quadratic(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(CcError::InvalidField(format!("quadratic scale c={c} must be positive")));
        }
        Ok(PotentialField::Quadratic { c })
    }

    /// Disc-array density over the lattice `{(10m, 10n)}`, enumerated by a
    /// deterministic square spiral from the origin with k starting at 1.
    /// Only discs whose centers fall inside `window` are instantiated.
    pub fn disc_array(lo: (f64, f64), hi: (f64, f64)) -> Result<Self> {
        if !(lo.0 < hi.0 && lo.1 < hi.1) {
            return Err(CcError::InvalidField("disc_array window is empty".into()));
        }
        let lo_c = Complex64::new(lo.0, lo.1);
        let hi_c = Complex64::new(hi.0, hi.1);
        let s = DISC_LATTICE_SPACING;
        let max_ring = (lo.0.abs().max(hi.0.abs()).max(lo.1.abs()).max(hi.1.abs()) / s).ceil()
            as i64
            + 1;
        let mut discs = Vec::new();
        let mut k: u32 = 0;
        for (m, n) in spiral_sites(max_ring) {
            k += 1;
            let center = Complex64::new(m as f64 * s, n as f64 * s);
            if center.re < lo.0 || center.re > hi.0 || center.im < lo.1 || center.im > hi.1 {
                continue;
            }
            let radius = 0.5f64.powi(k as i32);
            let density = 2.0f64.powi(k as i32) / PI;
            discs.push(Disc {
                center,
                index: k,
                radius,
                density,
                // π r_k^2 h_k = 2^-k
                mass: 0.5f64.powi(k as i32),
            });
        }
        if discs.is_empty() {
            return Err(CcError::InvalidField(
                "disc_array window contains no lattice sites".into(),
            ));
        }
        Ok(PotentialField::DiscArray {
            window: (lo_c, hi_c),
            discs,
        })
    }

    pub fn density_grid(nx: usize, ny: usize, h: f64, origin: (f64, f64), data: Vec<f64>) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(CcError::InvalidField("density grid needs at least 2x2 samples".into()));
        }
        if !(h > 0.0) {
            return Err(CcError::InvalidField(format!("grid cell size {h} must be positive")));
        }
        if data.len() != nx * ny {
            return Err(CcError::InvalidField(format!(
                "grid data length {} != nx*ny = {}",
                data.len(),
                nx * ny
            )));
        }
        if data.iter().any(|v| *v < 0.0 || !v.is_finite()) {
            return Err(CcError::InvalidField("grid samples must be finite and nonnegative".into()));
        }
        if data.iter().all(|v| *v == 0.0) {
            return Err(CcError::InvalidField(
                "grid density is identically zero (P would be harmonic)".into(),
            ));
        }
        Ok(PotentialField::DensityGrid(DensityGrid {
            nx,
            ny,
            h,
            origin: Complex64::new(origin.0, origin.1),
            data,
            masses: std::sync::OnceLock::new(),
        }))
    }

    /// Parse the `ccgrid v1` text format.
    pub fn from_grid_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let bad = |m: &str| CcError::InvalidField(format!("ccgrid parse: {m}"));
        if tokens.next() != Some("ccgrid") || tokens.next() != Some("v1") {
            return Err(bad("missing `ccgrid v1` header"));
        }
        let mut next_f = |name: &str| -> Result<f64> {
            tokens
                .next()
                .ok_or_else(|| bad(&format!("missing {name}")))?
                .parse::<f64>()
                .map_err(|_| bad(&format!("bad {name}")))
        };
        let nx = next_f("nx")? as usize;
        let ny = next_f("ny")? as usize;
        let h = next_f("h_grid")?;
        let ox = next_f("origin_x")?;
        let oy = next_f("origin_y")?;
        let mut data = Vec::with_capacity(nx * ny);
        for _ in 0..nx * ny {
            data.push(next_f("sample")?);
        }
        Self::density_grid(nx, ny, h, (ox, oy), data)
    }

    pub fn from_spec(spec: &PotentialSpec) -> Result<Self> {
        match spec {
            PotentialSpec::Quadratic { c } => Self::quadratic(*c),
            PotentialSpec::DiscArray { window } => {
                Self::disc_array((window[0], window[1]), (window[2], window[3]))
            }
            PotentialSpec::DensityGrid { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CcError::InvalidField(format!("read {path}: {e}")))?;
                Self::from_grid_text(&text)
            }
        }
    }

    /// ΔP under the standard convention Δ = ∂²/∂x² + ∂²/∂y².
    pub fn laplacian(&self, z: Complex64) -> f64 {
        match self {
            PotentialField::Quadratic { c } => 4.0 * c,
            PotentialField::DiscArray { discs, .. } => {
                for d in discs {
                    if (z - d.center).norm() < d.radius {
                        return d.density;
                    }
                }
                0.0
            }
            PotentialField::DensityGrid(g) => g.eval(z),
        }
    }

    /// (∂ₓP, ∂ᵧP).
    pub fn gradient(&self, z: Complex64) -> Result<(f64, f64)> {
        match self {
            PotentialField::Quadratic { c } => Ok((2.0 * c * z.re, 2.0 * c * z.im)),
            PotentialField::DiscArray { discs, .. } => {
                let mut g = Complex64::new(0.0, 0.0);
                for d in discs {
                    let dz = z - d.center;
                    let r = dz.norm();
                    if r < d.radius {
                        g += dz * (d.density / 2.0);
                    } else if r > 0.0 {
                        g += dz * (d.mass / (2.0 * PI * r * r));
                    }
                }
                Ok((g.re, g.im))
            }
            PotentialField::DensityGrid(g) => grid_gradient(g, z),
        }
    }

    /// ∫_{B(z,r)} ΔP dm.
    pub fn ball_mass(&self, z: Complex64, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Ok(0.0);
        }
        match self {
            PotentialField::Quadratic { c } => Ok(4.0 * c * PI * r * r),
            PotentialField::DiscArray { discs, .. } => {
                let mut acc = 0.0;
                for d in discs {
                    let dist = (z - d.center).norm();
                    if dist < r + d.radius {
                        acc += d.density * disc_disc_intersection_area(dist, r, d.radius);
                    }
                }
                Ok(acc)
            }
            PotentialField::DensityGrid(g) => Ok(g.disc_mass(z, r)),
        }
    }

    /// ∫_polygon ΔP dm for a simple polygon with positive area.
    pub fn region_mass(&self, polygon: &[Complex64]) -> Result<f64> {
        let area = geometry::signed_area(polygon);
        let (lo, hi) = geometry::bbox(polygon);
        let bbox2 = ((hi.re - lo.re) * (hi.im - lo.im)).max(1e-300);
        if polygon.len() < 3 {
            return Err(CcError::DegeneratePolygon("fewer than 3 vertices".into()));
        }
        if area.abs() < 1e-12 * bbox2 {
            return Err(CcError::DegeneratePolygon(format!(
                "area {area:.3e} below threshold"
            )));
        }
        let eps = 1e-12 * geometry::bbox_diameter(polygon).max(1e-12);
        if !geometry::polygon_is_simple(polygon, eps) {
            return Err(CcError::DegeneratePolygon("self-intersecting".into()));
        }
        match self {
            PotentialField::Quadratic { c } => Ok(4.0 * c * area.abs()),
            PotentialField::DiscArray { discs, .. } => {
                let sign = area.signum();
                let mut acc = 0.0;
                for d in discs {
                    // quick reject by bbox
                    if d.center.re + d.radius < lo.re
                        || d.center.re - d.radius > hi.re
                        || d.center.im + d.radius < lo.im
                        || d.center.im - d.radius > hi.im
                    {
                        continue;
                    }
                    let clipped =
                        sign * polygon_disc_intersection_area(polygon, d.center, d.radius);
                    acc += d.density * clipped.max(0.0);
                }
                Ok(acc)
            }
            PotentialField::DensityGrid(g) => {
                let classify =
                    |a: Complex64, b: Complex64| classify_rect_vs_polygon(a, b, polygon);
                let mass = |a: Complex64, b: Complex64| g.rect_mass(a, b);
                integrate_region(lo, hi, &classify, &mass, 1e-8, DEFAULT_EVAL_CAP)
            }
        }
    }

    /// (∂_z^k P)_{k=1..m} with ∂_z = (∂ₓ − i∂ᵧ)/2.
    pub fn dz_derivatives(&self, z: Complex64, m: usize) -> Result<Vec<Complex64>> {
        if m == 0 || m > MAX_DZ_ORDER {
            return Err(CcError::UnsupportedOrder(m, MAX_DZ_ORDER));
        }
        match self {
            PotentialField::Quadratic { c } => {
                let mut out = vec![Complex64::new(0.0, 0.0); m];
                out[0] = c * z.conj();
                Ok(out)
            }
            _ => {
                let h = 1e-4 * (1.0 + z.norm());
                let mut out = Vec::with_capacity(m);
                for k in 1..=m {
                    out.push(self.dz_order(z, k, h)?);
                }
                Ok(out)
            }
        }
    }

    fn dz_order(&self, z: Complex64, k: usize, h: f64) -> Result<Complex64> {
        if k == 1 {
            let (px, py) = self.gradient(z)?;
            return Ok(Complex64::new(px, -py) / 2.0);
        }
        let ex = Complex64::new(h, 0.0);
        let ey = Complex64::new(0.0, h);
        let fx = (self.dz_order(z + ex, k - 1, h)? - self.dz_order(z - ex, k - 1, h)?) / (2.0 * h);
        let fy = (self.dz_order(z + ey, k - 1, h)? - self.dz_order(z - ey, k - 1, h)?) / (2.0 * h);
        Ok((fx - fy * Complex64::i()) / 2.0)
    }

    /// The t-shear correction T(p₀,p₁) of the distance formula.
    ///
    /// `Large` integrates 2 Im((z₀−z₁)∂_zP) along the straight segment;
    /// `Small` uses the Taylor sum of order `m` at z₁.
    pub fn t_offset(
        &self,
        z0: Complex64,
        z1: Complex64,
        regime: TRegime,
        m: usize,
    ) -> Result<f64> {
        if (z0 - z1).norm() == 0.0 {
            return Ok(0.0);
        }
        match regime {
            TRegime::Large => {
                let mut f = |s: f64| -> f64 {
                    let w = z0 + (z1 - z0) * s;
                    let dz = match self.dz1(w) {
                        Ok(v) => v,
                        Err(_) => Complex64::new(f64::NAN, f64::NAN),
                    };
                    2.0 * ((z0 - z1) * dz).im
                };
                quadrature::adaptive_simpson(&mut f, 0.0, 1.0, 1e-8, DEFAULT_EVAL_CAP)
            }
            TRegime::Small => {
                let derivs = self.dz_derivatives(z1, m)?;
                let mut acc = Complex64::new(0.0, 0.0);
                let mut pow = Complex64::new(1.0, 0.0);
                let mut fact = 1.0;
                for (k, dk) in derivs.iter().enumerate() {
                    pow *= z0 - z1;
                    fact *= (k + 1) as f64;
                    acc += dk * pow / fact;
                }
                Ok(2.0 * acc.im)
            }
        }
    }

    fn dz1(&self, z: Complex64) -> Result<Complex64> {
        let (px, py) = self.gradient(z)?;
        Ok(Complex64::new(px, -py) / 2.0)
    }

    /// Bounding box that contains all of the density mass, when compact.
    pub fn support_bbox(&self) -> Option<(Complex64, Complex64)> {
        match self {
            PotentialField::Quadratic { .. } => None,
            PotentialField::DiscArray { window, .. } => {
                let m = 1.0;
                Some((
                    window.0 - Complex64::new(m, m),
                    window.1 + Complex64::new(m, m),
                ))
            }
            PotentialField::DensityGrid(g) => Some(g.support()),
        }
    }

    pub fn discs(&self) -> Option<&[Disc]> {
        match self {
            PotentialField::DiscArray { discs, .. } => Some(discs),
            _ => None,
        }
    }

    pub fn is_quadratic(&self) -> Option<f64> {
        match self {
            PotentialField::Quadratic { c } => Some(*c),
            _ => None,
        }
    }
}

/// Empirical Lemma-4.1(b) constant: sup over sampled centers and a
/// geometric δ ladder of `(δ+δ²)^{-1} ∫_{B(z,δ)} ΔP`.
pub fn upper_density_scan(
    field: &PotentialField,
    lo: Complex64,
    hi: Complex64,
    delta_max: f64,
    grid_n: usize,
) -> Result<f64> {
    let mut best: f64 = 0.0;
    let n = grid_n.max(2);
    let mut sites = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            sites.push(Complex64::new(
                lo.re + (hi.re - lo.re) * i as f64 / (n - 1) as f64,
                lo.im + (hi.im - lo.im) * j as f64 / (n - 1) as f64,
            ));
        }
    }
    // the sup is often attained at density concentrations a coarse grid
    // misses; probe them directly
    if let Some(discs) = field.discs() {
        sites.extend(discs.iter().filter_map(|d| {
            let within = d.center.re >= lo.re - delta_max
                && d.center.re <= hi.re + delta_max
                && d.center.im >= lo.im - delta_max
                && d.center.im <= hi.im + delta_max;
            within.then_some(d.center)
        }));
    }
    for z in sites {
        let mut delta = delta_max;
        for _ in 0..30 {
            let mass = field.ball_mass(z, delta)?;
            best = best.max(mass / (delta + delta * delta));
            delta *= 0.5;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TRegime {
    Large,
    Small,
}

/// Square-spiral enumeration of lattice indices, origin first.
fn spiral_sites(max_ring: i64) -> Vec<(i64, i64)> {
    let mut out = vec![(0i64, 0i64)];
    let (mut x, mut y) = (0i64, 0i64);
    let mut step = 1i64;
    let dirs = [(1i64, 0i64), (0, 1), (-1, 0), (0, -1)];
    let mut dir = 0usize;
    let target = (2 * max_ring + 1) * (2 * max_ring + 1);
    'outer: loop {
        for _ in 0..2 {
            for _ in 0..step {
                x += dirs[dir].0;
                y += dirs[dir].1;
                out.push((x, y));
                if out.len() as i64 >= target {
                    break 'outer;
                }
            }
            dir = (dir + 1) % 4;
        }
        step += 1;
    }
    out
}

fn grid_gradient(g: &DensityGrid, z: Complex64) -> Result<(f64, f64)> {
    // Newtonian field (1/2π) ∫ ρ(w)(z−w)/|z−w|² dm(w), evaluated against
    // precomputed sub-cell point masses with a softened kernel. The
    // softening scale (a fraction of the sub-cell size) keeps the field
    // smooth and bounded through the support, matching the true field of
    // the bounded density away from sub-cell scale.
    let soft = 0.35 * g.h / 2.0;
    let s2 = soft * soft;
    let mut acc = Complex64::new(0.0, 0.0);
    for (c, m) in g.point_masses() {
        let d = z - c;
        acc += d * (m / (d.norm_sqr() + s2));
    }
    Ok((acc.re / (2.0 * PI), acc.im / (2.0 * PI)))
}
