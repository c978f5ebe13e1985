//! Convex-roof GME for symmetry-reduced mixed families.
//!
//! A phase twirl maps each pure member of the family onto the mixed state with
//! the same weights, so the convex roof reduces to a convex hull of the pure
//! curve (or surface) over the family parameters.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{precondition, Error, Result};
use crate::geomopt;
use crate::random;

/// Default number of grid points per axis.
pub const DEFAULT_GRID: usize = 401;

/// Samples `ys` of a function on a strictly increasing grid covering `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve1D {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Curve1D {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::InvalidState("curve needs at least two points and equal lengths".into()));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidState("curve abscissae must be strictly increasing".into()));
        }
        if xs[0] != 0.0 || xs[xs.len() - 1] != 1.0 {
            return Err(Error::InvalidState("curve must span [0, 1] including endpoints".into()));
        }
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(Error::InvalidState("curve values must be finite".into()));
        }
        Ok(Curve1D { xs, ys })
    }

    /// Samples `f` on a uniform grid of `n` points.
    pub fn sample(n: usize, f: impl Fn(f64) -> f64 + Sync) -> Result<Self> {
        precondition(n >= 2, "grid needs at least two points")?;
        let xs = uniform(n);
        let ys = xs.par_iter().map(|&x| f(x)).collect();
        Curve1D::new(xs, ys)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    /// Piecewise-linear interpolation; `x` is clamped to `[0, 1]`.
    pub fn eval(&self, x: f64) -> f64 {
        interp(&self.xs, &self.ys, x)
    }
}

fn uniform(n: usize) -> Vec<f64> {
    (0..n).map(|i| if i + 1 == n { 1.0 } else { i as f64 / (n - 1) as f64 }).collect()
}

fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let x = x.clamp(xs[0], xs[xs.len() - 1]);
    let j = xs.partition_point(|&v| v <= x);
    if j == 0 {
        return ys[0];
    }
    if j >= xs.len() {
        return ys[xs.len() - 1];
    }
    let (x0, x1) = (xs[j - 1], xs[j]);
    let t = (x - x0) / (x1 - x0);
    ys[j - 1] + t * (ys[j] - ys[j - 1])
}

/// Lower convex envelope of sampled points, evaluated back on `xs`.
fn lower_hull(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    // Monotone chain: xs is already sorted.
    let mut hull: Vec<usize> = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut out = ys.to_vec();
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        for k in a + 1..b {
            let t = (xs[k] - xs[a]) / (xs[b] - xs[a]);
            out[k] = (ys[a] + t * (ys[b] - ys[a])).min(ys[k]);
        }
    }
    out
}

pub fn convex_hull_1d(curve: &Curve1D) -> Curve1D {
    Curve1D { xs: curve.xs.clone(), ys: lower_hull(&curve.xs, &curve.ys) }
}

/// `E_sin²` of `s|S(n,k1)⟩⟨S(n,k1)| + (1−s)|S(n,k2)⟩⟨S(n,k2)|`.
pub fn mixed_symmetric_gme(n: usize, k1: usize, k2: usize, s: f64, grid: usize) -> Result<f64> {
    Ok(mixed_symmetric_curve(n, k1, k2, grid)?.eval(check_weight(s)?))
}

fn check_weight(s: f64) -> Result<f64> {
    precondition((0.0..=1.0).contains(&s), "mixture weight must lie in [0, 1]")?;
    Ok(s)
}

/// Convexified curve `s ↦ E_sin²(ρ_{n;k1,k2}(s))` on `grid` points.
pub fn mixed_symmetric_curve(n: usize, k1: usize, k2: usize, grid: usize) -> Result<Curve1D> {
    precondition(k1 != k2 && k1 <= n && k2 <= n, "need distinct k1, k2 <= n")?;
    precondition(grid >= 101, "grid must have at least 101 points")?;
    let pure = pure_symmetric_curve(n, k1, k2, grid)?;
    Ok(convex_hull_1d(&pure))
}

/// `q ↦ 1 − Λ²(√q S(n,k1) + √(1−q) S(n,k2))`.
pub fn pure_symmetric_curve(n: usize, k1: usize, k2: usize, grid: usize) -> Result<Curve1D> {
    precondition(k1 != k2 && k1 <= n && k2 <= n, "need distinct k1, k2 <= n")?;
    Curve1D::sample(grid, |q| {
        let l = geomopt::two_term_symmetric_lambda(n, k1, k2, q).expect("arguments validated");
        1.0 - l * l
    })
}

/// Values on the `(x, r)` grid with `y = (1−x)·r`, covering the simplex
/// `x, y ≥ 0, x + y ≤ 1`.
#[derive(Clone, Debug)]
pub struct Surface2D {
    xs: Vec<f64>,
    rs: Vec<f64>,
    /// `values[i][j]` at `(xs[i], rs[j])`.
    values: Vec<Vec<f64>>,
}

impl Surface2D {
    pub fn new(xs: Vec<f64>, rs: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != xs.len() || values.iter().any(|row| row.len() != rs.len()) {
            return Err(Error::DimensionMismatch("surface values do not match the grid".into()));
        }
        if values.iter().flatten().any(|v| !v.is_finite() || *v < -1e-12) {
            return Err(Error::InvalidState("surface values must be finite and non-negative".into()));
        }
        Ok(Surface2D { xs, rs, values })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn rs(&self) -> &[f64] {
        &self.rs
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Bilinear interpolation at the simplex point `(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        geomopt::check_simplex(x, y)?;
        let x = x.clamp(0.0, 1.0);
        let r = if 1.0 - x > 1e-15 { (y.max(0.0) / (1.0 - x)).clamp(0.0, 1.0) } else { 0.0 };
        let col: Vec<f64> = self.values.iter().map(|row| interp(&self.rs, row, r)).collect();
        Ok(interp(&self.xs, &col, x))
    }
}

/// Result of the two-pass convexification together with the convexity audit.
#[derive(Clone, Debug)]
pub struct GhzWSurface {
    pub pure: Surface2D,
    pub mixed: Surface2D,
    pub audit: ConvexityAudit,
}

/// Random-segment check of the mixed surface: `violations` counts segments
/// whose 11-point second differences dip below `−1e-6`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexityAudit {
    pub segments: usize,
    pub violations: usize,
    pub worst: f64,
}

impl ConvexityAudit {
    pub fn warning(&self) -> Option<String> {
        (self.violations > 0).then(|| {
            format!(
                "convexity audit: {} of {} segments nonconvex (worst second difference {:.3e})",
                self.violations, self.segments, self.worst
            )
        })
    }
}

impl GhzWSurface {
    /// Builds the pure surface `E_ψ(x, (1−x)r)` and convexifies it first in
    /// `r` at fixed `x`, then in `x` at fixed `r`.
    pub fn build(grid: usize) -> Result<Self> {
        precondition(grid >= 3, "grid must have at least 3 points per axis")?;
        let xs = uniform(grid);
        let rs = uniform(grid);
        let pure_vals: Vec<Vec<f64>> = xs
            .par_iter()
            .map(|&x| {
                rs.iter()
                    .map(|&r| {
                        let l = geomopt::ghz_w_lambda(x, (1.0 - x) * r).expect("grid inside the simplex");
                        (1.0 - l * l).max(0.0)
                    })
                    .collect()
            })
            .collect();
        let mut vals: Vec<Vec<f64>> = pure_vals.iter().map(|row| lower_hull(&rs, row)).collect();
        for j in 0..rs.len() {
            let col: Vec<f64> = vals.iter().map(|row| row[j]).collect();
            let hull = lower_hull(&xs, &col);
            for (row, v) in vals.iter_mut().zip(hull) {
                row[j] = v;
            }
        }
        let pure = Surface2D::new(xs.clone(), rs.clone(), pure_vals)?;
        let mixed = Surface2D::new(xs, rs, vals)?;
        let audit = audit(&mixed, 1000, 0x5eed);
        Ok(GhzWSurface { pure, mixed, audit })
    }
}

fn random_simplex_point<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let (a, b): (f64, f64) = (rng.random(), rng.random());
    let (a, b) = if a + b > 1.0 { (1.0 - a, 1.0 - b) } else { (a, b) };
    (a, b)
}

fn audit(surface: &Surface2D, segments: usize, seed: u64) -> ConvexityAudit {
    let mut rng = random::rng(seed);
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..segments {
        let p = random_simplex_point(&mut rng);
        let q = random_simplex_point(&mut rng);
        let v: Vec<f64> = (0..11)
            .map(|k| {
                let t = k as f64 / 10.0;
                let (x, y) = (p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1));
                surface.eval(x.max(0.0), y.max(0.0)).unwrap_or(0.0)
            })
            .collect();
        let dip = v.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).fold(f64::INFINITY, f64::min);
        worst = worst.min(dip);
        if dip < -1e-6 {
            violations += 1;
        }
    }
    ConvexityAudit { segments, violations, worst }
}

/// `E_sin²` of the phase-twirled GHZ/W/W̃ mixture at `(x, y)`.
///
/// Builds the full surface; use [`GhzWSurface`] directly to query many points.
pub fn ghz_w_wtilde_mixed_gme(x: f64, y: f64, grid: usize) -> Result<f64> {
    geomopt::check_simplex(x, y)?;
    GhzWSurface::build(grid)?.mixed.eval(x, y)
}
