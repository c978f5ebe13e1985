//! Global entanglement of the ground states of the periodic transverse-field
//! XY chain
//! `H = −Σ_j [(1+r)/2 σˣ_jσˣ_{j+1} + (1−r)/2 σʸ_jσʸ_{j+1} + h σᶻ_j]`.
//!
//! The two lowest states are labelled by the fermion boundary condition:
//! `b = 1/2` (even fermion number) and `b = 0` (odd fermion number). Their
//! overlaps with the rotated product states
//! `|Φ(ξ)⟩ = ⊗_j [cos(ξ/2)|↑⟩ + sin(ξ/2)|↓⟩]` are products over momentum
//! pairs, which makes `N = 10⁵` chains cheap.

use std::f64::consts::{LN_2, PI};

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{precondition, Error, Result};
use crate::geomopt::{self, HartreeConfig};
use crate::optim;
use crate::qstate::PureState;
use crate::random;
use crate::C64;

/// Fermion boundary sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sector {
    /// `b = 0`: periodic fermions, odd fermion number.
    Periodic,
    /// `b = 1/2`: antiperiodic fermions, even fermion number.
    Antiperiodic,
}

impl Sector {
    pub fn b(self) -> f64 {
        match self {
            Sector::Periodic => 0.0,
            Sector::Antiperiodic => 0.5,
        }
    }

    /// Parity of the number of down spins in this sector.
    fn odd(self) -> bool {
        self == Sector::Periodic
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainParams {
    pub n: usize,
    pub r: f64,
    pub h: f64,
    pub sector: Sector,
}

impl ChainParams {
    pub fn new(n: usize, r: f64, h: f64, sector: Sector) -> Result<Self> {
        precondition(n >= 2, "chain needs at least two spins")?;
        check_rh(r, h)?;
        Ok(ChainParams { n, r, h, sector })
    }

    fn momentum(&self, m: usize) -> f64 {
        2.0 * PI * (m as f64 + self.sector.b()) / self.n as f64
    }

    /// Indices `m` of the momentum pairs `(k, −k)` with `0 < k < π`.
    fn pair_range(&self) -> std::ops::Range<usize> {
        match self.sector {
            // 2m + 1 < N
            Sector::Antiperiodic => 0..self.n / 2,
            // 2m < N
            Sector::Periodic => 1..self.n.div_ceil(2),
        }
    }
}

fn check_rh(r: f64, h: f64) -> Result<()> {
    precondition((0.0..=1.0).contains(&r), "anisotropy r must lie in [0, 1]")?;
    precondition(h.is_finite() && h >= 0.0, "field h must be non-negative")
}

/// Bogoliubov angle `θ ∈ [0, π/2]` with `tan 2θ = r|sin k| / (h − cos k)`.
pub fn bogoliubov_theta(r: f64, h: f64, k: f64) -> f64 {
    0.5 * (r * k.sin().abs()).atan2(h - k.cos())
}

fn mode_energy(r: f64, h: f64, k: f64) -> f64 {
    2.0 * ((h - k.cos()).powi(2) + (r * k.sin()).powi(2)).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BogoliubovSpectrum {
    pub momenta: Vec<f64>,
    pub thetas: Vec<f64>,
    /// `ε_m ≥ 0`, except `ε₀ = 2(h−1)` in the periodic sector.
    pub energies: Vec<f64>,
}

pub fn spectrum(p: &ChainParams) -> BogoliubovSpectrum {
    let momenta: Vec<f64> = (0..p.n).map(|m| p.momentum(m)).collect();
    let thetas = momenta.iter().map(|&k| bogoliubov_theta(p.r, p.h, k)).collect();
    let mut energies: Vec<f64> = momenta.iter().map(|&k| mode_energy(p.r, p.h, k)).collect();
    if p.sector == Sector::Periodic {
        energies[0] = 2.0 * (p.h - 1.0);
    }
    BogoliubovSpectrum { momenta, thetas, energies }
}

/// Precomputed factors of the overlap product at fixed `(N, r, h, b)`.
struct OverlapProfile {
    n: usize,
    sector: Sector,
    cos_t: Vec<f64>,
    sin_cot: Vec<f64>,
    // ∂_h cos θ and ∂_h sin θ · cot(k/2).
    dcos_t: Vec<f64>,
    dsin_cot: Vec<f64>,
}

impl OverlapProfile {
    fn new(p: &ChainParams) -> Self {
        let range = p.pair_range();
        let len = range.len();
        let (mut cos_t, mut sin_cot) = (Vec::with_capacity(len), Vec::with_capacity(len));
        let (mut dcos_t, mut dsin_cot) = (Vec::with_capacity(len), Vec::with_capacity(len));
        for m in range {
            let k = p.momentum(m);
            let th = bogoliubov_theta(p.r, p.h, k);
            let cot = 1.0 / (0.5 * k).tan();
            let (s, c) = th.sin_cos();
            let d = (p.h - k.cos()).powi(2) + (p.r * k.sin()).powi(2);
            let dth = -0.5 * p.r * k.sin() / d;
            cos_t.push(c);
            sin_cot.push(s * cot);
            dcos_t.push(-s * dth);
            dsin_cot.push(c * dth * cot);
        }
        OverlapProfile { n: p.n, sector: p.sector, cos_t, sin_cot, dcos_t, dsin_cot }
    }

    fn ln_prefactor(&self, xi: f64) -> f64 {
        let (s, c) = (0.5 * xi).sin_cos();
        let even = self.n % 2 == 0;
        let sq = 0.5 * (self.n as f64).ln();
        match (self.sector, even) {
            (Sector::Antiperiodic, true) => 0.0,
            (Sector::Antiperiodic, false) => c.ln(),
            (Sector::Periodic, true) => sq + (s * c).ln(),
            (Sector::Periodic, false) => sq + s.ln(),
        }
    }

    fn ln_overlap(&self, xi: f64) -> f64 {
        let (s, c) = (0.5 * xi).sin_cos();
        let (c2, s2) = (c * c, s * s);
        let sum: f64 = self.cos_t.iter().zip(&self.sin_cot).map(|(a, b)| (a * c2 + b * s2).ln()).sum();
        self.ln_prefactor(xi) + sum
    }

    /// `∂_h ln⟨Ψ_b|Φ(ξ)⟩` at fixed `ξ`.
    fn dh_ln_overlap(&self, xi: f64) -> f64 {
        let (s, c) = (0.5 * xi).sin_cos();
        let (c2, s2) = (c * c, s * s);
        (0..self.cos_t.len())
            .map(|i| (self.dcos_t[i] * c2 + self.dsin_cot[i] * s2) / (self.cos_t[i] * c2 + self.sin_cot[i] * s2))
            .sum()
    }

    fn maximize(&self, hint: Option<f64>) -> (f64, f64) {
        let f = |x: f64| {
            let v = self.ln_overlap(x);
            if v.is_nan() {
                f64::NEG_INFINITY
            } else {
                v
            }
        };
        if let Some(x0) = hint {
            let (lo, hi) = ((x0 - 0.05).max(0.0), (x0 + 0.05).min(PI));
            let cand = optim::scan_max(f, lo, hi, 11, 1, 1e-12);
            // Accept the warm start only away from the window edges.
            let inner = cand.0 > lo + 1e-3 || lo == 0.0;
            let inner = inner && (cand.0 < hi - 1e-3 || hi == PI);
            if inner {
                return cand;
            }
        }
        optim::scan_max(f, 0.0, PI, 65, 3, 1e-12)
    }
}

/// `⟨Ψ_b(r,h)|Φ(ξ)⟩`, non-negative on `[0, π]`. Underflows to zero for long
/// chains; use [`ln_overlap`] there.
pub fn overlap(p: &ChainParams, xi: f64) -> Result<f64> {
    Ok(ln_overlap(p, xi)?.exp())
}

pub fn ln_overlap(p: &ChainParams, xi: f64) -> Result<f64> {
    precondition((0.0..=PI).contains(&xi), "ξ must lie in [0, π]")?;
    Ok(OverlapProfile::new(p).ln_overlap(xi))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityPoint {
    /// `𝓔_N = −(1/N) log₂ Λ²`.
    pub density: f64,
    /// Maximizing angle `ξ*`.
    pub xi: f64,
    /// `ln Λ_max`.
    pub ln_lambda: f64,
    /// `ξ*` sits at an end of `[0, π]`.
    pub at_boundary: bool,
}

pub fn entanglement_density_n(p: &ChainParams) -> DensityPoint {
    density_with_hint(p, None)
}

fn density_with_hint(p: &ChainParams, hint: Option<f64>) -> DensityPoint {
    let prof = OverlapProfile::new(p);
    let (xi, ln_lambda) = prof.maximize(hint);
    DensityPoint {
        density: -2.0 * ln_lambda / (p.n as f64 * LN_2),
        xi,
        ln_lambda,
        at_boundary: xi < 1e-9 || xi > PI - 1e-9,
    }
}

/// `∂𝓔_N/∂h` by the envelope theorem at the maximizing `ξ*`.
pub fn density_n_dh(p: &ChainParams) -> f64 {
    let prof = OverlapProfile::new(p);
    let (xi, _) = prof.maximize(None);
    -2.0 * prof.dh_ln_overlap(xi) / (p.n as f64 * LN_2)
}

/// `(E₀ of the b = 0 sector, E₀ of the b = 1/2 sector)`.
pub fn energies(p: &ChainParams) -> (f64, f64) {
    let (n, r, h) = (p.n, p.r, p.h);
    let half = |k: f64| 0.5 * mode_energy(r, h, k);
    let k_of = |m: f64| 2.0 * PI * m / n as f64;
    let e_odd = (h - 1.0) - (1..n).map(|m| half(k_of(m as f64))).sum::<f64>();
    let e_even = -(0..n).map(|m| half(k_of(m as f64 + 0.5))).sum::<f64>();
    (e_odd, e_even)
}

const QUAD_TOL: f64 = 1e-9;

/// `∫₀^{1/2} g(μ) dμ` by double-exponential quadrature on pieces that
/// resolve the log endpoint and the features near `μ = 0`.
fn integrate_half(g: impl Fn(f64) -> f64, extra: Option<f64>) -> Result<f64> {
    let mut cuts = vec![0.0, 0.5];
    let mut x = 1e-9;
    while x < 0.4 {
        cuts.push(x);
        x *= 10.0;
    }
    cuts.extend([0.2, 0.35]);
    if let Some(e) = extra {
        if e > 1e-12 && e < 0.5 - 1e-12 {
            cuts.push(e);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    let mut err = 0.0;
    for w in cuts.windows(2) {
        let out = quadrature::integrate(&g, w[0], w[1], 1e-13);
        total += out.integral;
        err += out.error_estimate;
    }
    if !(total.is_finite() && err <= QUAD_TOL) {
        return Err(Error::Numerical(format!("quadrature error estimate {err:.3e}")));
    }
    Ok(total)
}

fn xx_mu0(h: f64) -> f64 {
    h.min(1.0).acos() / (2.0 * PI)
}

fn thermo_integrand(r: f64, h: f64, xi: f64, mu: f64) -> f64 {
    let k = 2.0 * PI * mu;
    let (s, c) = bogoliubov_theta(r, h, k).sin_cos();
    let (sx, cx) = (0.5 * xi).sin_cos();
    (c * cx * cx + s * sx * sx / (PI * mu).tan()).ln()
}

/// `(𝓔(r,h), ξ*)` in the thermodynamic limit.
pub fn thermo_density_with_xi(r: f64, h: f64) -> Result<(f64, f64)> {
    check_rh(r, h)?;
    if r == 0.0 {
        if h >= 1.0 {
            return Ok((0.0, 0.0));
        }
        let mu0 = xx_mu0(h);
        let tail = integrate_half(|m| if m < mu0 { (1.0 / (PI * m).tan()).ln() } else { 0.0 }, Some(mu0))?;
        let e = -2.0 / LN_2 * (mu0 * (2.0 * mu0 / (1.0 - 2.0 * mu0)).ln() + 0.5 * (1.0 - 2.0 * mu0).ln() + tail);
        return Ok((e, (1.0 - 4.0 * mu0).acos()));
    }
    let extra = (h < 1.0).then(|| xx_mu0(h));
    let failed = std::cell::Cell::new(None);
    let f = |xi: f64| match integrate_half(|m| thermo_integrand(r, h, xi, m), extra) {
        Ok(v) => v,
        Err(e) => {
            failed.set(Some(e.to_string()));
            f64::NEG_INFINITY
        }
    };
    let (xi, best) = optim::scan_max(&f, 0.0, PI, 25, 3, 1e-10);
    if !best.is_finite() {
        return Err(Error::Numerical(failed.take().unwrap_or_else(|| "non-finite density".into())));
    }
    Ok(((-2.0 / LN_2 * best).max(0.0), xi))
}

/// Thermodynamic-limit entanglement density `𝓔(r, h)`.
pub fn thermo_density(r: f64, h: f64) -> Result<f64> {
    Ok(thermo_density_with_xi(r, h)?.0)
}

/// `∂𝓔/∂h` in the thermodynamic limit.
pub fn d_e_dh(r: f64, h: f64) -> Result<f64> {
    check_rh(r, h)?;
    precondition((h - 1.0).abs() >= 1e-6, "h is too close to the critical field")?;
    if r == 0.0 {
        if h > 1.0 {
            return Ok(0.0);
        }
        let a = h.acos();
        let arg = a / (PI - a) * ((1.0 + h) / (1.0 - h)).sqrt();
        return Ok(arg.ln() / (PI * LN_2 * (1.0 - h * h).sqrt()));
    }
    let (_, xi) = thermo_density_with_xi(r, h)?;
    let (sx, cx) = (0.5 * xi).sin_cos();
    let (c2, s2) = (cx * cx, sx * sx);
    let g = |mu: f64| {
        let k = 2.0 * PI * mu;
        let (s, c) = bogoliubov_theta(r, h, k).sin_cos();
        let d = (h - k.cos()).powi(2) + (r * k.sin()).powi(2);
        let dth = -0.5 * r * k.sin() / d;
        let cot = 1.0 / (PI * mu).tan();
        (-s * dth * c2 + c * dth * s2 * cot) / (c * c2 + s * s2 * cot)
    };
    let extra = (h < 1.0).then(|| xx_mu0(h));
    Ok(-2.0 / LN_2 * integrate_half(g, extra)?)
}

/// Location and value of the largest `𝓔(r, h)` for `h ∈ [lo, hi]`.
pub fn thermo_maximum(r: f64, lo: f64, hi: f64) -> Result<(f64, f64)> {
    check_rh(r, lo)?;
    precondition(hi > lo, "empty field interval")?;
    let f = |h: f64| thermo_density(r, h).unwrap_or(f64::NEG_INFINITY);
    let (h, e) = optim::scan_max(f, lo, hi, 31, 2, 1e-7);
    if !e.is_finite() {
        return Err(Error::Numerical("density evaluation failed".into()));
    }
    Ok((h, e))
}

/// Entanglement density and optional field derivative along a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityCurve {
    /// `(r, h)` per point.
    pub grid: Vec<(f64, f64)>,
    pub values: Vec<f64>,
    pub derivatives: Option<Vec<f64>>,
}

pub fn thermo_curve(r: f64, hs: &[f64], with_derivative: bool) -> Result<DensityCurve> {
    let rows: Vec<Result<(f64, Option<f64>)>> = hs
        .par_iter()
        .map(|&h| {
            let e = thermo_density(r, h)?;
            let d = if with_derivative && (h - 1.0).abs() >= 1e-6 { Some(d_e_dh(r, h)?) } else { None };
            Ok((e, d))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(DensityCurve {
        grid: hs.iter().map(|&h| (r, h)).collect(),
        values: rows.iter().map(|x| x.0).collect(),
        derivatives: with_derivative.then(|| rows.iter().map(|x| x.1.unwrap_or(f64::NAN)).collect()),
    })
}

/// `(h_max,N, ∂𝓔_N/∂h at h_max,N)`: the steepest point of the finite-N
/// density curve in the Antiperiodic sector.
pub fn slope_peak(r: f64, n: usize) -> Result<(f64, f64)> {
    precondition(r > 0.0 && r <= 1.0, "slope peak needs 0 < r <= 1")?;
    precondition(n >= 4, "chain too short")?;
    let slope = |h: f64, hint: Option<f64>| -> (f64, f64) {
        let p = ChainParams { n, r, h, sector: Sector::Antiperiodic };
        let prof = OverlapProfile::new(&p);
        let (xi, _) = prof.maximize(hint);
        (-2.0 * prof.dh_ln_overlap(xi) / (n as f64 * LN_2), xi)
    };
    let (mut lo, mut hi) = (0.8, 1.2);
    let mut pts = 41;
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    while hi - lo > 1e-10 {
        let step = (hi - lo) / (pts - 1) as f64;
        let vals: Vec<(f64, f64)> = (0..pts)
            .into_par_iter()
            .map(|i| {
                let h = lo + i as f64 * step;
                (h, slope(h, None).0)
            })
            .collect();
        let (i, &(h, v)) = vals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .expect("non-empty grid");
        if best.1 == f64::NEG_INFINITY && (i == 0 || i + 1 == pts) {
            return Err(Error::Numerical(format!("slope peak not bracketed in [0.8, 1.2] (edge h = {h})")));
        }
        best = (h, v);
        lo = (h - step).max(0.8);
        hi = (h + step).min(1.2);
        pts = 21;
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub nu_estimate: f64,
    /// `(N, h_max,N, peak slope)` per chain length.
    pub points: Vec<(usize, f64, f64)>,
}

/// Fits the peak slope `∂𝓔_N/∂h|_{h_max,N}` against `ln N`; the ratio of
/// `1/(2πr ln 2)` to the fitted slope estimates `ν`.
pub fn scaling_fit(r: f64, n_list: &[usize]) -> Result<ScalingFit> {
    precondition(r > 0.0 && r <= 1.0, "scaling fit needs 0 < r <= 1")?;
    precondition(n_list.len() >= 4, "need at least four chain lengths")?;
    precondition(n_list.windows(2).all(|w| w[0] < w[1]), "chain lengths must ascend")?;
    precondition(n_list.iter().all(|&n| n >= 10_000), "chain lengths must be at least 10^4")?;
    let points = n_list
        .iter()
        .map(|&n| slope_peak(r, n).map(|(h, s)| (n, h, s)))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.2).collect();
    let (slope, intercept) = linear_fit(&xs, &ys);
    let nu_estimate = 1.0 / (2.0 * PI * r * LN_2) / slope;
    Ok(ScalingFit { slope, intercept, nu_estimate, points })
}

/// Least-squares line `y = a x + b`, returned as `(a, b)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let a = sxy / sxx;
    (a, my - a * mx)
}

/// Largest chain handled by exact diagonalization.
pub const ED_MAX_SPINS: usize = 16;

/// Applies the chain Hamiltonian in the `σᶻ` basis, spin 0 the most
/// significant bit and `|↑⟩ = |0⟩`.
fn apply_hamiltonian(n: usize, r: f64, h: f64, v: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    for (s, &amp) in v.iter().enumerate() {
        if amp == 0.0 {
            continue;
        }
        let downs = s.count_ones() as f64;
        out[s] -= h * (n as f64 - 2.0 * downs) * amp;
        for j in 0..n {
            let (bj, bk) = (1usize << (n - 1 - j), 1usize << (n - 1 - (j + 1) % n));
            let same = ((s & bj) != 0) == ((s & bk) != 0);
            let coef = if same { -r } else { -1.0 };
            out[s ^ bj ^ bk] += coef * amp;
        }
    }
}

fn project_sector(v: &mut [f64], odd: bool) {
    for (s, x) in v.iter_mut().enumerate() {
        if (s.count_ones() % 2 == 1) != odd {
            *x = 0.0;
        }
    }
}

/// Lowest eigenpair in a parity sector by restarted Lanczos with full
/// reorthogonalization.
fn lanczos_ground(n: usize, r: f64, h: f64, odd: bool, seed: u64) -> Result<(f64, Vec<f64>)> {
    let dim = 1usize << n;
    let sector_dim = dim / 2;
    let mut rng = random::rng(seed);
    let mut start: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
    let mut w = vec![0.0; dim];
    let max_krylov = sector_dim.min(160);
    for _restart in 0..40 {
        project_sector(&mut start, odd);
        let nrm = start.iter().map(|x| x * x).sum::<f64>().sqrt();
        start.iter_mut().for_each(|x| *x /= nrm);
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let (mut alpha, mut beta) = (Vec::new(), Vec::new());
        loop {
            let j = basis.len() - 1;
            apply_hamiltonian(n, r, h, &basis[j], &mut w);
            project_sector(&mut w, odd);
            let a: f64 = w.iter().zip(&basis[j]).map(|(x, y)| x * y).sum();
            alpha.push(a);
            for _ in 0..2 {
                for q in &basis {
                    let d: f64 = w.iter().zip(q).map(|(x, y)| x * y).sum();
                    w.iter_mut().zip(q).for_each(|(x, y)| *x -= d * y);
                }
            }
            let b = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if b < 1e-13 || basis.len() == max_krylov {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = t.symmetric_eigen();
        let (idx, &theta) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty tridiagonal");
        let y = eig.eigenvectors.column(idx);
        let mut x = vec![0.0; dim];
        for (q, &c) in basis.iter().zip(y.iter()) {
            x.iter_mut().zip(q).for_each(|(a, b)| *a += c * b);
        }
        let nrm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        x.iter_mut().for_each(|a| *a /= nrm);
        apply_hamiltonian(n, r, h, &x, &mut w);
        let res = w.iter().zip(&x).map(|(a, b)| (a - theta * b).powi(2)).sum::<f64>().sqrt();
        if res < 1e-11 * (1.0 + theta.abs()) {
            return Ok((theta, x));
        }
        start = x;
    }
    Err(Error::Numerical("Lanczos did not converge".into()))
}

/// `max_ξ |⟨ψ|Φ(ξ)⟩|` by scanning the rotated-product family.
pub fn ansatz_scan_lambda(n: usize, amps: &[f64]) -> (f64, f64) {
    // Only the number of down spins matters for Φ(ξ).
    let mut weight = vec![0.0; n + 1];
    for (s, &a) in amps.iter().enumerate() {
        weight[s.count_ones() as usize] += a;
    }
    let f = |xi: f64| {
        let (s, c) = (0.5 * xi).sin_cos();
        weight.iter().enumerate().map(|(w, &a)| a * c.powi((n - w) as i32) * s.powi(w as i32)).sum::<f64>().abs()
    };
    optim::scan_max(f, 0.0, PI, 201, 4, 1e-13)
}

#[derive(Clone, Debug)]
pub struct EdSector {
    pub sector: Sector,
    pub energy: f64,
    /// Real amplitudes of the sector ground state.
    pub state: Vec<f64>,
    /// `max_ξ |⟨ψ|Φ(ξ)⟩|` and its maximizer.
    pub lambda_scan: f64,
    pub xi_scan: f64,
}

impl EdSector {
    pub fn pure_state(&self) -> PureState {
        let n = self.state.len().trailing_zeros() as usize;
        PureState::new(vec![2; n], self.state.iter().map(|&a| C64::new(a, 0.0)).collect()).expect("normalized eigenvector")
    }

    /// `Λ_max` from the unrestricted product-state solver.
    pub fn lambda_unrestricted(&self, cfg: &HartreeConfig) -> Result<f64> {
        Ok(geomopt::entanglement_eigenvalue(&self.pure_state(), cfg)?.lambda_max)
    }
}

#[derive(Clone, Debug)]
pub struct EdReport {
    pub n: usize,
    pub r: f64,
    pub h: f64,
    /// Lowest energy over both sectors.
    pub ground_energy: f64,
    /// `[b = 0 sector, b = 1/2 sector]`.
    pub sectors: [EdSector; 2],
}

impl EdReport {
    pub fn sector(&self, s: Sector) -> &EdSector {
        &self.sectors[if s == Sector::Periodic { 0 } else { 1 }]
    }
}

/// Exact diagonalization of the periodic chain in both parity sectors.
pub fn ed_oracle(n: usize, r: f64, h: f64) -> Result<EdReport> {
    precondition((2..=ED_MAX_SPINS).contains(&n), format!("exact diagonalization needs 2 <= N <= {ED_MAX_SPINS}"))?;
    check_rh(r, h)?;
    let solve = |sector: Sector| -> Result<EdSector> {
        let (energy, state) = lanczos_ground(n, r, h, sector.odd(), 17 + n as u64)?;
        let (xi_scan, lambda_scan) = ansatz_scan_lambda(n, &state);
        Ok(EdSector { sector, energy, state, lambda_scan, xi_scan })
    };
    let odd = solve(Sector::Periodic)?;
    let even = solve(Sector::Antiperiodic)?;
    Ok(EdReport { n, r, h, ground_energy: odd.energy.min(even.energy), sectors: [odd, even] })
}

/// Ising ground state at small field to first order in `h`, starting from
/// all spins along `+x`.
pub fn ising_first_order_state(n: usize, h: f64) -> Result<PureState> {
    precondition((2..=16).contains(&n), "need 2 <= N <= 16")?;
    let dim = 1usize << n;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // |→⟩ = (|0⟩+|1⟩)/√2, |←⟩ = (|0⟩−|1⟩)/√2.
    let product = |flip: Option<usize>| -> Vec<f64> {
        (0..dim)
            .map(|idx| {
                (0..n)
                    .map(|j| {
                        let bit = (idx >> (n - 1 - j)) & 1;
                        if flip == Some(j) && bit == 1 {
                            -s
                        } else {
                            s
                        }
                    })
                    .product()
            })
            .collect()
    };
    let mut amps = product(None);
    for j in 0..n {
        let t = product(Some(j));
        amps.iter_mut().zip(&t).for_each(|(a, b)| *a += 0.5 * h * b);
    }
    PureState::normalized(vec![2; n], amps.into_iter().map(|a| C64::new(a, 0.0)).collect())
}

/// The two product ground states on the disorder line `r² + h² = 1`, as
/// Bloch vectors `(±√(2r/(1+r)), 0, √((1−r)/(1+r)))`.
pub fn disorder_line_ground(r: f64) -> Result<[[f64; 3]; 2]> {
    precondition(r > 0.0 && r <= 1.0, "disorder line needs 0 < r <= 1")?;
    let x = (2.0 * r / (1.0 + r)).sqrt();
    let z = ((1.0 - r) / (1.0 + r)).sqrt();
    Ok([[x, 0.0, z], [-x, 0.0, z]])
}

/// `⟨H⟩/N` for a translation-invariant product state with Bloch vector `v`.
pub fn product_energy_density(r: f64, h: f64, v: [f64; 3]) -> f64 {
    -(0.5 * (1.0 + r) * v[0] * v[0] + 0.5 * (1.0 - r) * v[1] * v[1] + h * v[2])
}

/// Column order of the density CSV rows.
pub const CSV_HEADER: &str = "r,h,N,E_density,dE_dh";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityRow {
    pub r: f64,
    pub h: f64,
    /// `None` for the thermodynamic limit.
    pub n: Option<usize>,
    pub density: f64,
    pub d_e_dh: f64,
}

/// Finite-chain density and slope along a field grid.
pub fn finite_sweep(n: usize, r: f64, hs: &[f64], sector: Sector) -> Result<Vec<DensityRow>> {
    let params = hs.iter().map(|&h| ChainParams::new(n, r, h, sector)).collect::<Result<Vec<_>>>()?;
    Ok(params
        .par_iter()
        .map(|p| DensityRow {
            r: p.r,
            h: p.h,
            n: Some(n),
            density: entanglement_density_n(p).density,
            d_e_dh: density_n_dh(p),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, r: f64, h: f64, s: Sector) -> ChainParams {
        ChainParams::new(n, r, h, s).unwrap()
    }

    #[test]
    fn theta_branch() {
        for sector in [Sector::Periodic, Sector::Antiperiodic] {
            for &(r, h) in &[(1.0, 0.3), (0.5, 1.4), (0.2, 0.99), (0.0, 0.5)] {
                let sp = spectrum(&p(9, r, h, sector));
                for (m, (&k, &t)) in sp.momenta.iter().zip(&sp.thetas).enumerate() {
                    assert!((0.0..=PI / 2.0).contains(&t));
                    assert!((2.0 * t).cos() * (h - k.cos()) >= -1e-14);
                    assert!((2.0 * t).sin() >= -1e-14);
                    if !(sector == Sector::Periodic && m == 0) {
                        assert!(sp.energies[m] >= 0.0);
                    }
                }
            }
        }
        assert_eq!(spectrum(&p(6, 1.0, 0.25, Sector::Periodic)).energies[0], -1.5);
        assert!(ChainParams::new(1, 0.5, 0.5, Sector::Periodic).is_err());
        assert!(ChainParams::new(4, 1.5, 0.5, Sector::Periodic).is_err());
    }

    #[test]
    fn paramagnetic_limit() {
        let d = entanglement_density_n(&p(20, 1.0, 1e3, Sector::Antiperiodic));
        assert!(d.xi < 1e-6 && d.at_boundary);
        assert!((d.ln_lambda.exp() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn ising_zero_field_one_ebit() {
        for n in [6, 7, 10, 11] {
            for s in [Sector::Antiperiodic, Sector::Periodic] {
                let d = entanglement_density_n(&p(n, 1.0, 0.0, s));
                assert!((d.density * n as f64 - 1.0).abs() < 1e-9, "N={n} {s:?}: {}", d.density * n as f64);
            }
        }
    }

    #[test]
    fn energy_examples() {
        let (a, b) = energies(&p(8, 1.0, 0.0, Sector::Periodic));
        assert!((a + 8.0).abs() < 1e-12 && (b + 8.0).abs() < 1e-12);
        for &(r, n) in &[(0.6f64, 10), (0.8, 13), (0.3, 50)] {
            let h: f64 = (1.0 - r * r).sqrt();
            let (a, b) = energies(&p(n, r, h, Sector::Periodic));
            assert!((a + n as f64).abs() < 1e-9 && (b + n as f64).abs() < 1e-9, "{a} {b}");
        }
        let (a, b) = energies(&p(10_000, 1.0, 2.0, Sector::Periodic));
        assert!((a - b - 2.0).abs() < 1e-3);
        let (a, b) = energies(&p(10_000, 1.0, 0.5, Sector::Periodic));
        assert!((a - b).abs() < 1e-3);
    }

    #[test]
    fn sixteen_spin_overlap_matches_ed() {
        let ed = ed_oracle(16, 1.0, 0.5).unwrap();
        let d = entanglement_density_n(&p(16, 1.0, 0.5, Sector::Antiperiodic));
        assert!((d.ln_lambda.exp() - ed.sector(Sector::Antiperiodic).lambda_scan).abs() < 1e-9);
    }

    #[test]
    fn analytic_matches_exact_diagonalization() {
        for &(n, r, h) in &[(8, 1.0, 0.5), (9, 0.5, 1.3), (10, 0.7, 0.2), (7, 0.0, 0.4), (6, 0.3, 1.0)] {
            let ed = ed_oracle(n, r, h).unwrap();
            for s in [Sector::Periodic, Sector::Antiperiodic] {
                let cp = p(n, r, h, s);
                let (eo, ee) = energies(&cp);
                let e = if s == Sector::Periodic { eo } else { ee };
                let sec = ed.sector(s);
                assert!((sec.energy - e).abs() < 1e-9, "N={n} r={r} h={h} {s:?}: {} vs {e}", sec.energy);
                let d = entanglement_density_n(&cp);
                assert!((d.ln_lambda.exp() - sec.lambda_scan).abs() < 1e-9, "N={n} r={r} h={h} {s:?}");
                // The whole overlap curve agrees, not only its maximum.
                for xi in [0.3, 1.1, 2.0] {
                    let ana = overlap(&cp, xi).unwrap();
                    let (sn, cs) = (0.5f64 * xi).sin_cos();
                    let num: f64 = sec
                        .state
                        .iter()
                        .enumerate()
                        .map(|(st, a)| {
                            let w = st.count_ones() as i32;
                            a * cs.powi(n as i32 - w) * sn.powi(w)
                        })
                        .sum();
                    assert!((ana - num.abs()).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn unrestricted_solver_agrees_with_ansatz() {
        let ed = ed_oracle(8, 1.0, 0.8).unwrap();
        let cfg = HartreeConfig { restarts: 4, ..HartreeConfig::default() };
        for s in &ed.sectors {
            let lam = s.lambda_unrestricted(&cfg).unwrap();
            assert!((lam - s.lambda_scan).abs() < 1e-6, "{lam} vs {}", s.lambda_scan);
        }
    }

    #[test]
    fn perturbative_small_field() {
        let (n, h) = (8, 0.05);
        let psi = ising_first_order_state(n, h).unwrap();
        let rep = geomopt::entanglement_eigenvalue(&psi, &HartreeConfig::default()).unwrap();
        // N(N−1)h⁴/32 is the leading order of −ln Λ², i.e. of E_log₂ in nats.
        let expect = (n * (n - 1)) as f64 * h.powi(4) / 32.0;
        let ratio = rep.e_log2 * LN_2 / expect;
        assert!((0.8..=1.2).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn disorder_line_product_states() {
        let [a, b] = disorder_line_ground(1.0).unwrap();
        assert!((a[0] - 1.0).abs() < 1e-15 && (b[0] + 1.0).abs() < 1e-15 && a[2].abs() < 1e-15);
        let [a, _] = disorder_line_ground(1e-9).unwrap();
        assert!(a[2] > 0.9999);
        for v in disorder_line_ground(0.6).unwrap() {
            assert!((product_energy_density(0.6, 0.8, v) + 1.0).abs() < 1e-12);
        }
        let (e, _) = energies(&p(12, 0.6, 0.8, Sector::Periodic));
        assert!((e / 12.0 + 1.0).abs() < 1e-12);
    }

    #[test]
    fn xx_zero_field_catalan() {
        let catalan = 0.915_965_594_177_219;
        let e = thermo_density(0.0, 0.0).unwrap();
        assert!((e - (1.0 - 2.0 * catalan / (PI * LN_2))).abs() < 1e-9, "{e}");
        assert_eq!(thermo_density(0.0, 1.5).unwrap(), 0.0);
        let mut prev = f64::INFINITY;
        for i in 0..=20 {
            let v = thermo_density(0.0, i as f64 / 20.0).unwrap();
            assert!(v <= prev + 1e-12);
            prev = v;
        }
    }

    #[test]
    fn xx_general_route_agrees_with_closed_form() {
        // Tiny anisotropy approaches the isotropic closed form.
        for h in [0.2, 0.6] {
            let a = thermo_density(0.0, h).unwrap();
            let b = thermo_density(1e-7, h).unwrap();
            assert!((a - b).abs() < 1e-4, "h={h}: {a} vs {b}");
        }
    }

    #[test]
    fn disorder_line_vanishes() {
        for &(r, h) in &[(0.6, 0.8), (0.8, 0.6), (0.5, 0.75f64.sqrt())] {
            assert!(thermo_density(r, h).unwrap() < 1e-6);
        }
        let n = 1000;
        let d = entanglement_density_n(&p(n, 0.6, 0.8, Sector::Antiperiodic));
        assert!(d.density <= 2.0 / n as f64);
    }

    #[test]
    fn finite_chain_approaches_thermodynamic_limit() {
        let e = thermo_density(1.0, 2.0).unwrap();
        let d = entanglement_density_n(&p(10_000, 1.0, 2.0, Sector::Antiperiodic)).density;
        assert!((d - e).abs() < 1e-3);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for &(r, h) in &[(1.0, 1.3), (0.5, 0.6), (1.0, 0.9)] {
            let d = d_e_dh(r, h).unwrap();
            let step = 1e-4;
            let fd = (thermo_density(r, h + step).unwrap() - thermo_density(r, h - step).unwrap()) / (2.0 * step);
            assert!((d - fd).abs() < 1e-4 * (1.0 + d.abs()), "r={r} h={h}: {d} vs {fd}");
        }
        for h in [0.3, 0.8] {
            let d = d_e_dh(0.0, h).unwrap();
            let step = 1e-5;
            let fd = (thermo_density(0.0, h + step).unwrap() - thermo_density(0.0, h - step).unwrap()) / (2.0 * step);
            assert!((d - fd).abs() < 1e-5 * (1.0 + d.abs()), "h={h}: {d} vs {fd}");
        }
        assert_eq!(d_e_dh(0.0, 1.2).unwrap(), 0.0);
        assert!(d_e_dh(1.0, 1.0 + 1e-7).is_err());
    }

    #[test]
    fn ising_maximum_location() {
        let (h, e) = thermo_maximum(1.0, 0.9, 1.4).unwrap();
        assert!((1.08..=1.15).contains(&h), "{h}");
        assert!(e > thermo_density(1.0, 1.0 + 1e-3).unwrap());
    }

    #[test]
    fn log_divergence_near_critical_field() {
        let target = -1.0 / (2.0 * PI * LN_2);
        for r in [1.0, 0.5] {
            let hs: Vec<f64> = (0..8).map(|i| 1.0 + 1e-5 * 20f64.powf(i as f64 / 7.0)).collect();
            let xs: Vec<f64> = hs.iter().map(|h| (h - 1.0).ln()).collect();
            let ys: Vec<f64> = hs.iter().map(|&h| d_e_dh(r, h).unwrap()).collect();
            let (slope, _) = linear_fit(&xs, &ys);
            assert!((slope * r / target - 1.0).abs() < 0.03, "r={r}: {slope}");
        }
    }

    #[test]
    fn xx_square_root_divergence() {
        let amp = -(PI / 2.0).log2() / (2f64.sqrt() * PI);
        let d = 1e-6;
        let v = d_e_dh(0.0, 1.0 - d).unwrap() * d.sqrt();
        assert!((v / amp - 1.0).abs() < 0.03, "{v} vs {amp}");
    }

    #[test]
    fn sectors_agree_in_density() {
        let n = 1000;
        for &(r, h) in &[(1.0, 0.5), (0.5, 0.9), (0.2, 1.0), (0.8, 0.1)] {
            let a = entanglement_density_n(&p(n, r, h, Sector::Periodic)).density;
            let b = entanglement_density_n(&p(n, r, h, Sector::Antiperiodic)).density;
            assert!((a - b).abs() <= 5.0 / n as f64, "r={r} h={h}: {a} vs {b}");
        }
    }

    #[test]
    fn finite_density_converges_like_one_over_n() {
        let grid = [0.1, 0.3, 0.55, 0.8, 1.0];
        let hs = [0.2, 0.6, 0.9, 1.3, 1.8];
        for &r in &grid {
            for &h in &hs {
                let e = thermo_density(r, h).unwrap();
                for n in [1000, 10_000] {
                    let d = entanglement_density_n(&p(n, r, h, Sector::Antiperiodic)).density;
                    assert!((d - e).abs() * n as f64 <= 5.0, "r={r} h={h} N={n}: {}", (d - e).abs() * n as f64);
                }
            }
        }
    }

    #[test]
    fn finite_derivative_matches_finite_difference() {
        let cp = p(200, 0.7, 0.9, Sector::Antiperiodic);
        let d = density_n_dh(&cp);
        let step = 1e-5;
        let e = |h: f64| entanglement_density_n(&p(200, 0.7, h, Sector::Antiperiodic)).density;
        let fd = (e(0.9 + step) - e(0.9 - step)) / (2.0 * step);
        assert!((d - fd).abs() < 1e-6, "{d} vs {fd}");
    }
}
