//! Relative entropy of entanglement: the pure-state lower bound, the `F`
//! upper bound for symmetric mixtures and a numeric minimizer over separable
//! states for small systems.

use rand::Rng;
use rayon::prelude::*;
use statrs::function::factorial::ln_binomial;

use crate::error::{precondition, Error, Result};
use crate::geomopt::{self, HartreeConfig};
use crate::linalg::{self, c, CMat};
use crate::mixedhull::{self, Curve1D};
use crate::qstate::{self, DensityMatrix, ProductState, PureState};
use crate::random;
use crate::C64;

/// `σ = Σ p_i |φ_i⟩⟨φ_i|` with product `φ_i`.
#[derive(Clone, Debug)]
pub struct SeparableAnsatz {
    weights: Vec<f64>,
    products: Vec<ProductState>,
}

impl SeparableAnsatz {
    pub fn new(weights: Vec<f64>, products: Vec<ProductState>) -> Result<Self> {
        if weights.len() != products.len() || weights.is_empty() {
            return Err(Error::InvalidState("ansatz needs one weight per product state".into()));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState("ansatz weights must be a probability vector".into()));
        }
        let dims = products[0].dims();
        if products.iter().any(|p| p.dims() != dims) {
            return Err(Error::DimensionMismatch("ansatz products on different spaces".into()));
        }
        Ok(SeparableAnsatz { weights, products })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn products(&self) -> &[ProductState] {
        &self.products
    }

    pub fn components(&self) -> usize {
        self.weights.len()
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        let pures: Vec<PureState> = self.products.iter().map(ProductState::to_pure).collect();
        let terms: Vec<(f64, &PureState)> = self.weights.iter().copied().zip(pures.iter()).collect();
        DensityMatrix::mixture(&terms)
    }
}

/// `−2 log₂ Λ_max(ψ)` together with the solver's convergence flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowerBound {
    pub bits: f64,
    pub converged: bool,
}

pub fn ree_lower_bound(psi: &PureState) -> Result<LowerBound> {
    let rep = geomopt::entanglement_eigenvalue(psi, &HartreeConfig::default())?;
    Ok(LowerBound { bits: rep.e_log2.max(0.0), converged: rep.converged })
}

/// `Σ_k p_k log₂(p_k nⁿ / (C(n,k) α^k (n−α)^{n−k}))` with `α = Σ_k k p_k`.
///
/// `p[k]` is the weight of `S(n,k)` (k zeros).
pub fn f_function(n: usize, p: &[f64]) -> Result<f64> {
    check_distribution(n, p)?;
    let nf = n as f64;
    let alpha: f64 = p.iter().enumerate().map(|(k, &pk)| k as f64 * pk).sum();
    let beta = nf - alpha;
    let mut total = 0.0;
    for (k, &pk) in p.iter().enumerate() {
        if pk <= 0.0 {
            continue;
        }
        let kf = k as f64;
        // log₂ of C(n,k) α^k β^{n−k} / nⁿ, with 0⁰ = 1.
        let mut ln_den = ln_binomial(n as u64, k as u64) - nf * nf.ln();
        if k > 0 {
            ln_den += kf * alpha.ln();
        }
        if k < n {
            ln_den += (nf - kf) * beta.ln();
        }
        total += pk * (pk.ln() - ln_den);
    }
    Ok((total / std::f64::consts::LN_2).max(0.0))
}

fn check_distribution(n: usize, p: &[f64]) -> Result<()> {
    precondition(n >= 1, "need at least one qubit")?;
    if p.len() != n + 1 {
        return Err(Error::DimensionMismatch(format!("expected {} weights, got {}", n + 1, p.len())));
    }
    precondition(
        p.iter().all(|&x| x >= 0.0) && (p.iter().sum::<f64>() - 1.0).abs() <= 1e-10,
        "weights must form a probability vector",
    )
}

/// `Σ_k p_k |S(n,k)⟩⟨S(n,k)|`.
pub fn symmetric_mixture(n: usize, p: &[f64]) -> Result<DensityMatrix> {
    check_distribution(n, p)?;
    precondition(n <= qstate::MAX_MIXED_QUBITS as usize, "too many qubits for a dense mixed state")?;
    let states: Vec<PureState> = (0..=n).map(|k| geomopt::dicke(n, k)).collect::<Result<_>>()?;
    let terms: Vec<(f64, &PureState)> = p.iter().copied().zip(states.iter()).filter(|(w, _)| *w > 0.0).collect();
    DensityMatrix::mixture(&terms)
}

/// Weights of `s|S(n,k1)⟩⟨·| + (1−s)|S(n,k2)⟩⟨·|`.
pub fn two_term_weights(n: usize, k1: usize, k2: usize, s: f64) -> Result<Vec<f64>> {
    precondition(k1 != k2 && k1 <= n && k2 <= n, "need distinct k1, k2 <= n")?;
    precondition((0.0..=1.0).contains(&s), "mixture weight must lie in [0, 1]")?;
    let mut p = vec![0.0; n + 1];
    p[k1] = s;
    p[k2] = 1.0 - s;
    Ok(p)
}

/// Value suggested by the convex hull of `F`, with provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjecturedRee {
    pub bits: f64,
    /// `false` when the value is proven: pure `S(n,k)`, two-qubit mixtures
    /// and mixtures of product states.
    pub conjecture: bool,
    /// Whether the convex hull was taken; for three or more nonzero weights
    /// only `F` itself is returned.
    pub hull_applied: bool,
    /// Explicit formula for the listed three- and four-qubit families.
    pub closed_form: Option<f64>,
}

/// `co F` along the two-term family `ρ_{n;k1,k2}(s)`, sampled on `grid`
/// points.
pub fn conjectured_ree_two_term(n: usize, k1: usize, k2: usize, s: f64, grid: usize) -> Result<ConjecturedRee> {
    two_term_weights(n, k1, k2, s)?;
    precondition(grid >= 101, "grid must have at least 101 points")?;
    let curve = f_curve(n, k1, k2, grid)?;
    let hull = mixedhull::convex_hull_1d(&curve);
    let endpoint = s == 0.0 || s == 1.0;
    let product_mix = [k1, k2].iter().all(|&k| k == 0 || k == n);
    // Between grid nodes both F(s) and the chord of the sampled hull lie
    // above the exact hull, so the smaller one is kept.
    let f = f_function(n, &two_term_weights(n, k1, k2, s)?)?;
    let bits = if endpoint { f } else { hull.eval(s).min(f) };
    Ok(ConjecturedRee {
        bits,
        conjecture: !(endpoint || n <= 2 || product_mix),
        hull_applied: true,
        closed_form: closed_form(n, k1, k2, s),
    })
}

/// `s ↦ F(ρ_{n;k1,k2}(s))` on a uniform grid.
pub fn f_curve(n: usize, k1: usize, k2: usize, grid: usize) -> Result<Curve1D> {
    two_term_weights(n, k1, k2, 0.5)?;
    Curve1D::sample(grid, |s| f_function(n, &two_term_weights(n, k1, k2, s).expect("validated")).expect("validated"))
}

/// Conjectured `E_R` of `Σ_k p_k |S(n,k)⟩⟨S(n,k)|`.
pub fn conjectured_ree(n: usize, p: &[f64], grid: usize) -> Result<ConjecturedRee> {
    check_distribution(n, p)?;
    let support: Vec<usize> = (0..=n).filter(|&k| p[k] > 0.0).collect();
    match support.as_slice() {
        [k] => {
            let l = geomopt::lambda_symmetric(n, &[*k, n - k])?;
            Ok(ConjecturedRee { bits: -2.0 * l.log2(), conjecture: false, hull_applied: true, closed_form: None })
        }
        [k1, k2] => conjectured_ree_two_term(n, *k1, *k2, p[*k1], grid),
        _ => Ok(ConjecturedRee { bits: f_function(n, p)?, conjecture: true, hull_applied: false, closed_form: None }),
    }
}

fn log2(x: f64) -> f64 {
    x.log2()
}

/// Explicit `E_R` formulas of the two-term families, where `s` is the weight
/// of `S(n,k1)`. Families related by `k → n−k` share a formula.
pub fn closed_form(n: usize, k1: usize, k2: usize, s: f64) -> Option<f64> {
    // Map to the representative with the smaller indices.
    let (k1, k2) = if k1.min(k2) > n - k1.max(k2) { (n - k1, n - k2) } else { (k1, k2) };
    // Express everything with the weight `s` on the smaller index.
    let (lo, hi, s) = if k1 < k2 { (k1, k2, s) } else { (k2, k1, 1.0 - s) };
    let t = 1.0 - s;
    let xlog = |w: f64, arg: f64| if w > 0.0 { w * log2(arg) } else { 0.0 };
    match (n, lo, hi) {
        (2, 0, 1) => Some(xlog(s, 4.0 * s / (1.0 + s).powi(2)) + xlog(t, 2.0 / (1.0 + s))),
        (3, 0, 1) => Some(xlog(s, 27.0 * s / (2.0 + s).powi(3)) + xlog(t, 9.0 / (2.0 + s).powi(2))),
        // W/W̃ mixture: weight `t` on S(3,2).
        (3, 1, 2) => {
            Some(xlog(t, 9.0 * t / ((1.0 + t).powi(2) * (2.0 - t))) + xlog(s, 9.0 * s / ((2.0 - t).powi(2) * (1.0 + t))))
        }
        (4, 0, 1) => Some(xlog(s, 256.0 * s / (3.0 + s).powi(4)) + xlog(t, 64.0 / (3.0 + s).powi(3))),
        (4, 1, 2) => Some(
            xlog(s, 64.0 * s / ((2.0 - s) * (2.0 + s).powi(3)))
                + xlog(t, 128.0 * t / (3.0 * (2.0 - s).powi(2) * (2.0 + s).powi(2))),
        ),
        (4, 1, 3) => Some(
            xlog(s, 64.0 * s / ((3.0 - 2.0 * s) * (1.0 + 2.0 * s).powi(3)))
                + xlog(t, 64.0 * t / ((3.0 - 2.0 * s).powi(3) * (1.0 + 2.0 * s))),
        ),
        _ => None,
    }
}

/// Settings for [`numeric_ree`].
#[derive(Clone, Debug)]
pub struct ReeConfig {
    /// Rounds of joint polishing, each followed by a product-state insertion.
    pub max_outer: usize,
    /// L-BFGS iterations per round.
    pub polish_iterations: u64,
    /// Independent random starts, run in parallel.
    pub restarts: usize,
    /// Stop when the duality gap (in bits) falls below this.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for ReeConfig {
    fn default() -> Self {
        Self { max_outer: 12, polish_iterations: 400, restarts: 2, tolerance: 1e-6, seed: 0 }
    }
}

/// Outcome of [`numeric_ree`]. `bits` is always an upper bound on `E_R`.
#[derive(Clone, Debug)]
pub struct ReeResult {
    pub bits: f64,
    pub ansatz: SeparableAnsatz,
    /// Frank-Wolfe duality gap in bits. `bits − gap` is a lower bound if the
    /// product-state search found the global maximum.
    pub gap: f64,
    pub converged: bool,
    /// `false` when no step improved on the maximally mixed start.
    pub improved: bool,
    pub iterations: usize,
}

/// Objective and gradient data at one separable state.
struct Eval {
    /// `S(ρ‖σ)` in bits.
    value: f64,
    /// Fréchet derivative `D log σ [ρ]` (natural log); `Tr σ G = 1`.
    grad: CMat,
}

/// Floor for eigenvalues of σ; keeps the logarithm finite.
const SIGMA_FLOOR: f64 = 1e-300;

/// Weight of the maximally mixed state blended into every iterate. It keeps
/// `D log σ` bounded for rank-deficient optima and is itself separable, so
/// the reported value stays an upper bound.
const MIX: f64 = 1e-10;

fn evaluate(rho: &CMat, neg_entropy: f64, sigma: &CMat) -> Eval {
    let (lam, v) = linalg::eigh(sigma);
    let rt = v.adjoint() * rho * &v;
    let n = lam.len();
    let lam: Vec<f64> = lam.iter().map(|&l| l.max(SIGMA_FLOOR)).collect();
    let ln: Vec<f64> = lam.iter().map(|l| l.ln()).collect();
    let cross: f64 = (0..n).map(|a| rt[(a, a)].re * ln[a]).sum();
    let g = CMat::from_fn(n, n, |a, b| {
        let (la, lb) = (lam[a], lam[b]);
        let dd = if (la - lb).abs() > 1e-12 * la.max(lb) { (ln[a] - ln[b]) / (la - lb) } else { 1.0 / la };
        rt[(a, b)] * dd
    });
    let grad = &v * g * v.adjoint();
    Eval { value: neg_entropy - cross / std::f64::consts::LN_2, grad }
}

/// Local maximization of `⟨φ|G|φ⟩` over product `φ` by alternating top
/// eigenvectors of the reduced operators.
fn product_ascent(g: &CMat, dims: &[usize], digits: &[Vec<usize>], mut local: Vec<Vec<C64>>) -> (f64, Vec<Vec<C64>>) {
    let n = dims.len();
    let dim = g.nrows();
    let mut best = f64::NEG_INFINITY;
    for _ in 0..60 {
        for k in 0..n {
            let dk = dims[k];
            // Column a: the product state with party k replaced by |a⟩.
            let mut w = CMat::zeros(dim, dk);
            for (i, d) in digits.iter().enumerate() {
                let mut amp = c(1.0);
                for (l, &dl) in d.iter().enumerate() {
                    if l != k {
                        amp *= local[l][dl];
                    }
                }
                w[(i, d[k])] = amp;
            }
            let red = w.adjoint() * g * &w;
            let (_, vecs) = linalg::eigh(&red);
            local[k] = vecs.column(dk - 1).iter().copied().collect();
        }
        let full = ProductState::from_locals_unchecked(local.clone()).to_pure();
        let v = nalgebra::DVector::from_column_slice(full.amps());
        let val = v.dotc(&(g * &v)).re;
        let done = val <= best + 1e-10 * best.abs().max(1.0);
        best = best.max(val);
        if done {
            break;
        }
    }
    (best, local)
}

/// `S(ρ‖σ)` as a smooth function of unnormalized product vectors.
///
/// The parameter vector holds, atom after atom and party after party, the
/// real and imaginary parts of the local factors `u_jk`. With `φ_j = ⊗ u_jk`
/// and `A = [φ_1 … φ_m]`, `σ = (1−MIX) AA†/‖A‖² + MIX·I/dim`, so the mixing
/// weights live in the norms and no constraint is needed.
#[derive(Clone)]
struct Joint<'a> {
    rho: &'a CMat,
    neg_entropy: f64,
    dims: &'a [usize],
    digits: &'a [Vec<usize>],
    offsets: Vec<usize>,
    stride: usize,
}

impl<'a> Joint<'a> {
    fn new(rho: &'a CMat, neg_entropy: f64, dims: &'a [usize], digits: &'a [Vec<usize>]) -> Self {
        let mut offsets = Vec::with_capacity(dims.len());
        let mut acc = 0;
        for &d in dims {
            offsets.push(acc);
            acc += d;
        }
        Joint { rho, neg_entropy, dims, digits, offsets, stride: acc }
    }

    fn atoms(&self, x: &[f64]) -> usize {
        x.len() / (2 * self.stride)
    }

    fn local(&self, x: &[f64], j: usize, k: usize, a: usize) -> C64 {
        let i = 2 * (j * self.stride + self.offsets[k] + a);
        C64::new(x[i], x[i + 1])
    }

    fn pack(&self, locals: &[Vec<C64>], scale: f64, x: &mut Vec<f64>) {
        let n = locals.len() as f64;
        for v in locals {
            for z in v {
                let z = z * scale.powf(1.0 / n);
                x.extend([z.re, z.im]);
            }
        }
    }

    fn unpack(&self, x: &[f64], j: usize) -> Vec<Vec<C64>> {
        (0..self.dims.len()).map(|k| (0..self.dims[k]).map(|a| self.local(x, j, k, a)).collect()).collect()
    }

    fn matrix(&self, x: &[f64]) -> CMat {
        let m = self.atoms(x);
        CMat::from_fn(self.digits.len(), m, |i, j| {
            self.digits[i].iter().enumerate().map(|(k, &a)| self.local(x, j, k, a)).product()
        })
    }

    fn sigma(&self, a: &CMat) -> (CMat, f64) {
        let dim = a.nrows();
        let t = a.norm_squared().max(f64::MIN_POSITIVE);
        let mut s = (a * a.adjoint()) * c((1.0 - MIX) / t);
        for i in 0..dim {
            s[(i, i)] += c(MIX / dim as f64);
        }
        (s, t)
    }

    fn eval(&self, x: &[f64]) -> (Eval, CMat, f64) {
        let a = self.matrix(x);
        let (s, t) = self.sigma(&a);
        (evaluate(self.rho, self.neg_entropy, &s), a, t)
    }

    fn gradient_at(&self, x: &[f64], ev: &Eval, a: &CMat, t: f64) -> Vec<f64> {
        let ga = &ev.grad * a;
        let cbar = a.iter().zip(ga.iter()).map(|(p, q)| (p.conj() * q).re).sum::<f64>() / t;
        // ∂f/∂conj(φ_j).
        let scale = -(1.0 - MIX) / (std::f64::consts::LN_2 * t);
        let gphi = (ga - a * c(cbar)) * c(scale);
        let n = self.dims.len();
        let mut out = vec![0.0; x.len()];
        for j in 0..a.ncols() {
            for (i, d) in self.digits.iter().enumerate() {
                let gi = gphi[(i, j)];
                for k in 0..n {
                    let mut rest = c(1.0);
                    for (l, &dl) in d.iter().enumerate() {
                        if l != k {
                            rest *= self.local(x, j, l, dl);
                        }
                    }
                    let h = gi * rest.conj();
                    let p = 2 * (j * self.stride + self.offsets[k] + d[k]);
                    out[p] += 2.0 * h.re;
                    out[p + 1] += 2.0 * h.im;
                }
            }
        }
        out
    }
}

impl argmin::core::CostFunction for Joint<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.eval(x).0.value)
    }
}

impl argmin::core::Gradient for Joint<'_> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, x: &Vec<f64>) -> std::result::Result<Vec<f64>, argmin::core::Error> {
        let (ev, a, t) = self.eval(x);
        Ok(self.gradient_at(x, &ev, &a, t))
    }
}

/// L-BFGS on all atoms at once. Returns the best point and iterations used.
fn polish(joint: &Joint, x: Vec<f64>, iters: u64) -> (Vec<f64>, u64) {
    use argmin::core::{Executor, State};
    use argmin::solver::linesearch::MoreThuenteLineSearch;
    use argmin::solver::quasinewton::LBFGS;
    let solver = LBFGS::new(MoreThuenteLineSearch::new(), 12)
        .with_tolerance_grad(1e-12)
        .and_then(|s| s.with_tolerance_cost(1e-15))
        .expect("valid tolerances");
    match Executor::new(joint.clone(), solver).configure(|st| st.param(x.clone()).max_iters(iters)).run() {
        Ok(res) => {
            let st = res.state();
            let used = st.get_iter();
            (st.get_best_param().cloned().unwrap_or(x), used)
        }
        // A failed line search leaves the starting point as the answer.
        Err(_) => (x, 0),
    }
}

/// One optimization run from a given set of atoms.
fn ree_run(
    joint: &Joint,
    mut x: Vec<f64>,
    cfg: &ReeConfig,
    rng: &mut random::SeededRng,
) -> (Vec<f64>, Eval, f64, usize) {
    let dims = joint.dims;
    let mut iterations = 0usize;
    let mut gap = f64::INFINITY;
    let (mut cur, _, _) = joint.eval(&x);
    for _ in 0..cfg.max_outer {
        let (nx, used) = polish(joint, x.clone(), cfg.polish_iterations);
        iterations += used as usize;
        let (ev, _, _) = joint.eval(&nx);
        if ev.value <= cur.value {
            x = nx;
            cur = ev;
        }

        // Certificate: the best product direction for the current gradient.
        let m = joint.atoms(&x);
        let mut norms: Vec<(f64, usize)> = (0..m)
            .map(|j| {
                let u = joint.unpack(&x, j);
                (u.iter().map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>()).product(), j)
            })
            .collect();
        norms.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut starts: Vec<Vec<Vec<C64>>> = norms
            .iter()
            .take(2)
            .map(|&(_, j)| joint.unpack(&x, j).into_iter().map(normalized).collect())
            .collect();
        for _ in 0..cfg.restarts.max(1) {
            starts.push(random::random_product(dims, rng).locals().to_vec());
        }
        let (g_best, best_local) = starts
            .into_iter()
            .map(|s| product_ascent(&cur.grad, dims, joint.digits, s))
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .expect("at least one start");
        gap = ((g_best - 1.0) / std::f64::consts::LN_2).max(0.0);
        if gap < cfg.tolerance || cur.value < cfg.tolerance {
            break;
        }

        // Insert the new direction with the share that lowers the value most.
        let t = joint.matrix(&x).norm_squared().max(f64::MIN_POSITIVE);
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut share: f64 = 0.5;
        for _ in 0..24 {
            let mut trial: Vec<f64> = x.iter().map(|v| v * (1.0 - share).sqrt().powf(1.0 / dims.len() as f64)).collect();
            joint.pack(&best_local, (share * t).sqrt(), &mut trial);
            let v = joint.eval(&trial).0.value;
            if best.as_ref().map_or(true, |b| v < b.0) {
                best = Some((v, trial));
            }
            share *= 0.5;
        }
        x = best.expect("at least one share").1;
        cur = joint.eval(&x).0;
    }
    (x, cur, gap, iterations)
}

fn normalized(v: Vec<C64>) -> Vec<C64> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        v.into_iter().map(|z| z / n).collect()
    } else {
        v
    }
}

/// Minimizes `S(ρ‖σ)` over separable `σ`.
///
/// σ is a mixture of `ansatz_size` product states (plus a trace of the
/// maximally mixed state). All factors and weights are optimized jointly by
/// L-BFGS with analytic gradients. After each polish the product state that
/// maximizes `⟨φ|D log σ[ρ]|φ⟩` certifies the duality gap; if the gap is
/// open it joins the mixture and the polish repeats. `ansatz_size` must
/// cover `rank(ρ)`. Independent random starts run in parallel and the best
/// is kept.
pub fn numeric_ree(rho: &DensityMatrix, ansatz_size: usize, cfg: &ReeConfig) -> Result<ReeResult> {
    let dims = rho.dims().to_vec();
    let dim = rho.dim();
    precondition(dim <= 64, "numeric_ree supports total dimension up to 64")?;
    precondition(ansatz_size >= rho.rank().max(1), "ansatz size must be at least rank(rho)")?;
    precondition(cfg.max_outer >= 1 && cfg.tolerance > 0.0, "invalid optimizer settings")?;
    let r = rho.matrix();
    let neg_entropy = -qstate::von_neumann_entropy(rho);
    let digits: Vec<Vec<usize>> = (0..dim).map(|i| qstate::digits(i, &dims)).collect();
    let joint = Joint::new(r, neg_entropy, &dims, &digits);

    let mut identity = CMat::identity(dim, dim);
    identity.scale_mut(1.0 / dim as f64);
    let start = evaluate(r, neg_entropy, &identity).value.max(0.0);

    let runs: Vec<_> = (0..cfg.restarts.max(1))
        .into_par_iter()
        .map(|s| {
            let mut rng = random::rng(cfg.seed.wrapping_add(s as u64));
            let mut x = Vec::with_capacity(2 * joint.stride * ansatz_size);
            for _ in 0..ansatz_size {
                let p = random::random_product(&dims, &mut rng);
                joint.pack(p.locals(), 1.0, &mut x);
            }
            ree_run(&joint, x, cfg, &mut rng)
        })
        .collect();
    let (x, cur, gap, iterations) =
        runs.into_iter().min_by(|a, b| a.1.value.total_cmp(&b.1.value)).expect("at least one run");

    // Back to a normalized mixture.
    let m = joint.atoms(&x);
    let mut ws = Vec::with_capacity(m + dim);
    let mut products = Vec::with_capacity(m + dim);
    for j in 0..m {
        let u = joint.unpack(&x, j);
        ws.push(u.iter().map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>()).product::<f64>());
        products.push(ProductState::from_locals_unchecked(u.into_iter().map(normalized).collect()));
    }
    let t: f64 = ws.iter().sum();
    ws.iter_mut().for_each(|w| *w *= (1.0 - MIX) / t);
    for i in 0..dim {
        ws.push(MIX / dim as f64);
        products.push(basis_product(i, &dims));
    }
    let total: f64 = ws.iter().sum();
    ws.iter_mut().for_each(|w| *w /= total);
    let ansatz = SeparableAnsatz::new(ws, products)?;
    let bits = cur.value.max(0.0);
    Ok(ReeResult {
        bits,
        ansatz,
        gap,
        converged: gap < cfg.tolerance || bits < cfg.tolerance,
        improved: bits < start || start == 0.0,
        iterations,
    })
}

fn basis_product(i: usize, dims: &[usize]) -> ProductState {
    let d = qstate::digits(i, dims);
    ProductState::from_locals_unchecked(
        d.iter().zip(dims).map(|(&a, &da)| (0..da).map(|b| c(if a == b { 1.0 } else { 0.0 })).collect()).collect(),
    )
}

/// Default ansatz size `rank(ρ) + dim`.
pub fn default_ansatz_size(rho: &DensityMatrix) -> usize {
    rho.rank() + rho.dim()
}

/// Left-hand side of the Plenio-Vedral inequality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlenioVedral {
    pub bits: f64,
    /// Some reduction was outside the symmetric families; its `E_R` was
    /// replaced by the trivial lower bound 0.
    pub partial: bool,
    /// Some reduction used a conjectured `E_R`.
    pub conjecture: bool,
}

/// `max_i [E_R(Tr_i ρ) + S(Tr_i ρ)]` for a 3- or 4-qubit pure state.
pub fn plenio_vedral_bound(psi: &PureState) -> Result<PlenioVedral> {
    let n = psi.n_parties();
    precondition((3..=4).contains(&n) && psi.dims().iter().all(|&d| d == 2), "need a 3- or 4-qubit state")?;
    let mut out = PlenioVedral { bits: f64::NEG_INFINITY, partial: false, conjecture: false };
    for i in 0..n {
        let keep: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let red = qstate::reduced_from_pure(psi, &keep)?;
        let entropy = qstate::von_neumann_entropy(&red);
        let er = match dicke_weights(&red)? {
            Some(p) => {
                let cr = conjectured_ree(n - 1, &p, 401)?;
                out.conjecture |= cr.conjecture;
                cr.bits
            }
            None => {
                out.partial = true;
                0.0
            }
        };
        out.bits = out.bits.max(er + entropy);
    }
    Ok(out)
}

/// Weights `p_k` if `ρ = Σ_k p_k |S(m,k)⟩⟨S(m,k)|` within 1e-9.
pub fn dicke_weights(rho: &DensityMatrix) -> Result<Option<Vec<f64>>> {
    let m = rho.n_parties();
    if rho.dims().iter().any(|&d| d != 2) {
        return Ok(None);
    }
    let states: Vec<PureState> = (0..=m).map(|k| geomopt::dicke(m, k)).collect::<Result<_>>()?;
    let p: Vec<f64> = states.iter().map(|s| rho.expectation(&s.to_density().matrix().clone()).re.max(0.0)).collect();
    let mut rebuilt = CMat::zeros(rho.dim(), rho.dim());
    for (s, &w) in states.iter().zip(&p) {
        rebuilt += linalg::outer(s.amps(), s.amps()) * c(w);
    }
    if linalg::max_abs_diff(&rebuilt, rho.matrix()) > 1e-9 {
        return Ok(None);
    }
    let total: f64 = p.iter().sum();
    Ok(Some(p.iter().map(|w| w / total).collect()))
}

/// Random probability vector on `n + 1` outcomes (flat Dirichlet).
pub fn random_distribution<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..=n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|x| x / s).collect()
}
