//! Pure-state geometric measure: the entanglement eigenvalue solver and the
//! closed-form families.
//!
//! `Λ_max(ψ) = max_φ |⟨φ|ψ⟩|` over product states `φ`. The stationarity
//! conditions say that each local vector is the normalized contraction of
//! `ψ` with all the other local vectors, which gives the alternating update
//! used here (a higher-order power method).

use rayon::prelude::*;
use statrs::function::factorial::{ln_binomial, ln_factorial};

use crate::error::{precondition, Error, Result};
use crate::linalg::{self, c};
use crate::optim;
use crate::qstate::{self, PartitionSpec, ProductState, PureState};
use crate::random;
use crate::C64;

/// Solver controls for [`entanglement_eigenvalue`].
#[derive(Clone, Debug, PartialEq)]
pub struct HartreeConfig {
    pub max_iterations: usize,
    /// Stop once Λ changes by less than this over a full sweep.
    pub tolerance: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Seed every restart with the best shared-local-vector product state
    /// before the unrestricted sweeps.
    pub symmetric_ansatz: bool,
}

impl Default for HartreeConfig {
    fn default() -> Self {
        Self { max_iterations: 2000, tolerance: 1e-11, restarts: 32, seed: 0, symmetric_ansatz: false }
    }
}

impl HartreeConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        precondition(self.max_iterations >= 1, "max_iterations must be at least 1")?;
        precondition(self.tolerance > 0.0, "tolerance must be positive")?;
        precondition(self.restarts >= 1, "restarts must be at least 1")
    }
}

/// Result of the entanglement-eigenvalue computation.
#[derive(Clone, Debug)]
pub struct EntanglementReport {
    pub lambda_max: f64,
    pub e_sin2: f64,
    pub e_log2: f64,
    pub closest: ProductState,
    pub converged: bool,
    pub iterations_used: usize,
}

impl EntanglementReport {
    pub fn from_lambda(lambda_max: f64, closest: ProductState, converged: bool, iterations_used: usize) -> Self {
        let lambda_max = lambda_max.min(1.0);
        Self {
            lambda_max,
            e_sin2: 1.0 - lambda_max * lambda_max,
            e_log2: -2.0 * lambda_max.log2(),
            closest,
            converged,
            iterations_used,
        }
    }
}

/// Contracts `ψ` with `conj(φ_j)` on every party except `keep`.
fn contract_except(amps: &[C64], dims: &[usize], locals: &[Vec<C64>], keep: usize) -> Vec<C64> {
    let n = dims.len();
    let mut t: Vec<C64> = amps.to_vec();
    // Trailing parties first: the contracted index is the fastest one.
    for j in (keep + 1..n).rev() {
        let d = dims[j];
        let phi = &locals[j];
        t = t.chunks_exact(d).map(|ch| ch.iter().zip(phi).map(|(a, p)| p.conj() * a).sum()).collect();
    }
    // Leading parties: the contracted index is the slowest one.
    for j in 0..keep {
        let d = dims[j];
        let rest = t.len() / d;
        let phi = &locals[j];
        let mut next = vec![C64::new(0.0, 0.0); rest];
        for (a, p) in phi.iter().enumerate() {
            let pc = p.conj();
            for (slot, x) in next.iter_mut().zip(&t[a * rest..(a + 1) * rest]) {
                *slot += pc * x;
            }
        }
        t = next;
    }
    t
}

fn normalize(v: &mut [C64]) -> f64 {
    let n = linalg::norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|a| *a /= n);
    }
    n
}

/// Rotates a vector so that its first non-negligible component is real and
/// positive.
pub fn canonical_phase(v: &mut [C64]) {
    if let Some(a) = v.iter().find(|a| a.norm() > 1e-12).copied() {
        let ph = a.conj() / a.norm();
        v.iter_mut().for_each(|x| *x *= ph);
    }
}

struct Run {
    lambda: f64,
    locals: Vec<Vec<C64>>,
    converged: bool,
    iterations: usize,
}

fn alternate(psi: &PureState, mut locals: Vec<Vec<C64>>, cfg: &HartreeConfig) -> Run {
    let (amps, dims) = (psi.amps(), psi.dims());
    let n = dims.len();
    let mut last = f64::NEG_INFINITY;
    let mut lambda = 0.0;
    for it in 1..=cfg.max_iterations {
        for i in 0..n {
            let mut w = contract_except(amps, dims, &locals, i);
            let nrm = normalize(&mut w);
            if nrm > 1e-300 {
                locals[i] = w;
            }
            lambda = nrm;
        }
        if (lambda - last).abs() < cfg.tolerance {
            return Run { lambda, locals, converged: true, iterations: it };
        }
        last = lambda;
    }
    Run { lambda, locals, converged: false, iterations: cfg.max_iterations }
}

/// Symmetric power iteration: every party shares one local vector. Steps
/// that fail to increase the symmetric overlap end the iteration.
fn symmetric_start(psi: &PureState, mut phi: Vec<C64>) -> Vec<Vec<C64>> {
    let (amps, dims) = (psi.amps(), psi.dims());
    let n = dims.len();
    let overlap = |phi: &Vec<C64>| {
        let locals = vec![phi.clone(); n];
        let w = contract_except(amps, dims, &locals, 0);
        linalg::inner(phi, &w).norm()
    };
    let mut best = overlap(&phi);
    for _ in 0..500 {
        let locals = vec![phi.clone(); n];
        let mut w = vec![C64::new(0.0, 0.0); dims[0]];
        for i in 0..n {
            for (s, x) in w.iter_mut().zip(contract_except(amps, dims, &locals, i)) {
                *s += x;
            }
        }
        if normalize(&mut w) < 1e-300 {
            break;
        }
        let val = overlap(&w);
        if val <= best + 1e-15 {
            break;
        }
        best = val;
        phi = w;
    }
    vec![phi; n]
}

/// Closest product state and Λ_max of a pure state of at least two parties.
///
/// Two-party inputs are solved exactly through the singular value
/// decomposition (the problem is the Schmidt decomposition there). Larger
/// inputs run `cfg.restarts` seeded random starts plus one symmetric start
/// when all local dimensions agree; the best restart wins, ties going to the
/// lowest restart id.
pub fn entanglement_eigenvalue(psi: &PureState, cfg: &HartreeConfig) -> Result<EntanglementReport> {
    cfg.validate()?;
    let n = psi.n_parties();
    precondition(n >= 2, "the geometric measure needs at least two parties")?;
    if n == 2 {
        return Ok(two_party_report(psi));
    }
    let dims = psi.dims().to_vec();
    let symmetric_dims = dims.iter().all(|&d| d == dims[0]);
    let mut starts: Vec<Vec<Vec<C64>>> = Vec::with_capacity(cfg.restarts + 1);
    if symmetric_dims {
        let uniform = vec![c(1.0 / (dims[0] as f64).sqrt()); dims[0]];
        starts.push(symmetric_start(psi, uniform));
    }
    for k in 0..cfg.restarts {
        let mut rng = random::substream(cfg.seed, k as u64);
        let init = if cfg.symmetric_ansatz && symmetric_dims {
            symmetric_start(psi, random::unit_vector(dims[0], &mut rng))
        } else {
            random::random_product(&dims, &mut rng).locals().to_vec()
        };
        starts.push(init);
    }
    let runs: Vec<Run> = starts.into_par_iter().map(|s| alternate(psi, s, cfg)).collect();
    let converged = runs.iter().any(|r| r.converged);
    let mut best = 0;
    for (k, r) in runs.iter().enumerate() {
        if r.lambda > runs[best].lambda {
            best = k;
        }
    }
    let Run { lambda, mut locals, iterations, .. } = runs.into_iter().nth(best).expect("at least one restart");
    locals.iter_mut().for_each(|v| canonical_phase(v));
    Ok(EntanglementReport::from_lambda(lambda, ProductState::from_locals_unchecked(locals), converged, iterations))
}

fn two_party_report(psi: &PureState) -> EntanglementReport {
    let m = qstate::coefficient_matrix(psi, &[0], &[1]);
    let svd = m.svd(true, true);
    let (k, &s) = svd
        .singular_values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty spectrum");
    let u = svd.u.expect("left vectors requested");
    let vt = svd.v_t.expect("right vectors requested");
    // ψ = Σ s_l |u_l⟩ ⊗ |row l of V†⟩, so that pair of vectors picks out s_k.
    let mut a: Vec<C64> = u.column(k).iter().copied().collect();
    let mut b: Vec<C64> = vt.row(k).iter().copied().collect();
    canonical_phase(&mut a);
    canonical_phase(&mut b);
    let closest = ProductState::from_locals_unchecked(vec![a, b]);
    EntanglementReport::from_lambda(s, closest, true, 1)
}

/// `√(largest eigenvalue)` of the reduced state on `cut.group_a`.
pub fn schmidt_lambda(psi: &PureState, cut: &PartitionSpec) -> Result<f64> {
    if cut.n_parties() != psi.n_parties() {
        return Err(Error::DimensionMismatch("cut does not match the state".into()));
    }
    let m = qstate::coefficient_matrix(psi, cut.group_a(), cut.group_b());
    Ok(m.singular_values().max().min(1.0))
}

/// All digit strings of length `n` over `counts.len()` levels in which level
/// `i` appears exactly `counts[i]` times.
fn arrangements(n: usize, counts: &[usize]) -> Vec<Vec<usize>> {
    fn rec(left: &mut Vec<usize>, cur: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for lvl in 0..left.len() {
            if left[lvl] > 0 {
                left[lvl] -= 1;
                cur.push(lvl);
                rec(left, cur, n, out);
                cur.pop();
                left[lvl] += 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut counts.to_vec(), &mut Vec::with_capacity(n), n, &mut out);
    out
}

/// Permutation-symmetric state with `counts[i]` parties in level `i`; the
/// local dimension is `counts.len()`. For qubits `S(n,k)` is
/// `symmetric_state(n, &[k, n−k])`, so `k` counts the zeros.
pub fn symmetric_state(n: usize, counts: &[usize]) -> Result<PureState> {
    precondition(counts.len() >= 2, "need at least two levels")?;
    precondition(counts.iter().sum::<usize>() == n, "level counts must sum to n")?;
    precondition(n >= 1, "need at least one party")?;
    let d = counts.len();
    let ln_amp = 0.5 * (counts.iter().map(|&k| ln_factorial(k as u64)).sum::<f64>() - ln_factorial(n as u64));
    let amp = c(ln_amp.exp());
    let dims = vec![d; n];
    let total: usize = dims.iter().product();
    precondition(total <= 1 << qstate::MAX_PURE_QUBITS, "symmetric state exceeds the dense cap")?;
    let mut amps = vec![C64::new(0.0, 0.0); total];
    for arr in arrangements(n, counts) {
        amps[qstate::flat_index(&arr, &dims)] = amp;
    }
    PureState::normalized(dims, amps)
}

/// Qubit Dicke state `S(n,k)` with `k` zeros.
pub fn dicke(n: usize, k: usize) -> Result<PureState> {
    precondition(k <= n, "k must not exceed n")?;
    symmetric_state(n, &[k, n - k])
}

/// Closed form `√(n!/Πk_i!)·Π(k_i/n)^{k_i/2}`.
pub fn lambda_symmetric(n: usize, counts: &[usize]) -> Result<f64> {
    precondition(counts.iter().sum::<usize>() == n && n >= 1, "level counts must sum to n")?;
    let nf = n as f64;
    let mut ln = 0.5 * (ln_factorial(n as u64) - counts.iter().map(|&k| ln_factorial(k as u64)).sum::<f64>());
    for &k in counts.iter().filter(|&&k| k > 0) {
        ln += 0.5 * k as f64 * (k as f64 / nf).ln();
    }
    Ok(ln.exp().min(1.0))
}

/// Antisymmetric state of `n` parties with local dimension `n`.
pub fn det_state(n: usize) -> Result<PureState> {
    precondition((2..=6).contains(&n), "det_state supports 2 <= n <= 6")?;
    let dims = vec![n; n];
    let total: usize = dims.iter().product();
    let amp = (-0.5 * ln_factorial(n as u64)).exp();
    let mut amps = vec![C64::new(0.0, 0.0); total];
    for perm in arrangements(n, &vec![1; n]) {
        amps[qstate::flat_index(&perm, &dims)] = c(amp * permutation_sign(&perm));
    }
    PureState::normalized(dims, amps)
}

fn permutation_sign(p: &[usize]) -> f64 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `1/√n!`.
pub fn lambda_det(n: usize) -> f64 {
    (-0.5 * ln_factorial(n as u64)).exp()
}

/// `√C(n,k)·cos^kθ·sin^{n−k}θ`: overlap of `S(n,k)` with `(cosθ|0⟩+sinθ|1⟩)^{⊗n}`.
pub fn dicke_overlap(n: usize, k: usize, theta: f64) -> f64 {
    let (cs, sn) = (theta.cos(), theta.sin());
    (0.5 * ln_binomial(n as u64, k as u64)).exp() * cs.powi(k as i32) * sn.powi((n - k) as i32)
}

/// `√r·|S(n,k1)⟩ + √(1−r)·|S(n,k2)⟩`.
pub fn two_term_symmetric_state(n: usize, k1: usize, k2: usize, r: f64) -> Result<PureState> {
    precondition(k1 != k2 && k1 <= n && k2 <= n, "need distinct k1, k2 <= n")?;
    precondition((0.0..=1.0).contains(&r), "weight must lie in [0,1]")?;
    let a = dicke(n, k1)?;
    let b = dicke(n, k2)?;
    let amps = a.amps().iter().zip(b.amps()).map(|(x, y)| x * r.sqrt() + y * (1.0 - r).sqrt()).collect();
    PureState::normalized(a.dims().to_vec(), amps)
}

/// Λ_max of `√r|S(n,k1)⟩ + √(1−r)|S(n,k2)⟩` by maximizing over real
/// symmetric product states.
pub fn two_term_symmetric_lambda(n: usize, k1: usize, k2: usize, r: f64) -> Result<f64> {
    precondition(k1 != k2 && k1 <= n && k2 <= n, "need distinct k1, k2 <= n")?;
    precondition((0.0..=1.0).contains(&r), "weight must lie in [0,1]")?;
    let (a, b) = (r.sqrt(), (1.0 - r).sqrt());
    let f = |th: f64| a * dicke_overlap(n, k1, th) + b * dicke_overlap(n, k2, th);
    let (_, v) = optim::scan_max(f, 0.0, std::f64::consts::FRAC_PI_2, 1025, 4, 1e-12);
    Ok(v.min(1.0))
}

/// `√x|GHZ⟩ + √y|W⟩ + √(1−x−y)|W̃⟩` on three qubits.
pub fn ghz_w_state(x: f64, y: f64) -> Result<PureState> {
    check_simplex(x, y)?;
    let z = (1.0 - x - y).max(0.0);
    let ghz = PureState::ghz(3);
    let w = dicke(3, 2)?;
    let wt = dicke(3, 1)?;
    let amps = (0..8)
        .map(|i| ghz.amps()[i] * x.sqrt() + w.amps()[i] * y.sqrt() + wt.amps()[i] * z.sqrt())
        .collect();
    PureState::normalized(vec![2; 3], amps)
}

pub(crate) fn check_simplex(x: f64, y: f64) -> Result<()> {
    precondition(
        x >= -1e-15 && y >= -1e-15 && x + y <= 1.0 + 1e-12,
        format!("(x, y) = ({x}, {y}) is outside the simplex x, y >= 0, x + y <= 1"),
    )
}

/// Λ_max of [`ghz_w_state`] from the stationarity cubic in `t = tanθ`.
///
/// The cubic can have more than one non-negative root (at `x = 1` both
/// `t = 0` and `t = 1` solve it), so every root in `[0, 10]` and the two ends
/// `t = 0`, `t → ∞` are compared and the largest Λ is returned.
pub fn ghz_w_lambda(x: f64, y: f64) -> Result<f64> {
    check_simplex(x, y)?;
    let (x, y) = (x.max(0.0), y.max(0.0));
    let z = (1.0 - x - y).max(0.0);
    let (a, b, cc) = ((x / 2.0).sqrt(), (3.0 * y).sqrt(), (3.0 * z).sqrt());
    let cubic = |t: f64| 3.0 * a * (t * t - t) + b * (1.0 - 2.0 * t * t) + cc * (2.0 * t - t * t * t);
    let lam = |t: f64| (a * (1.0 + t * t * t) + b * t + cc * t * t) / (1.0 + t * t).powf(1.5);
    let roots = optim::grid_roots(cubic, 0.0, 10.0, 4000, 1e-15, 1e-13);
    let mut best = lam(0.0).max(a);
    for t in &roots {
        best = best.max(lam(*t));
    }
    if roots.is_empty() && best <= 0.0 {
        return Err(Error::Numerical("no stationary point of the GHZ/W overlap in [0, 10]".into()));
    }
    Ok(best.min(1.0))
}

/// `Tr(W_opt |ψ⟩⟨ψ|)` for the optimal witness `W_opt = Λ²·1 − |ψ⟩⟨ψ|`,
/// which equals `−E_sin²(ψ)`.
pub fn optimal_witness_value(psi: &PureState) -> Result<f64> {
    let rep = entanglement_eigenvalue(psi, &HartreeConfig::default())?;
    if rep.lambda_max >= 1.0 - 1e-9 {
        return Err(Error::Precondition("product state: no entanglement witness exists".into()));
    }
    Ok(rep.lambda_max * rep.lambda_max - 1.0)
}

/// Λ² by maximizing the correlation-function expansion
/// `(1/2^N)·Σ_μ T_μ Π_j r_j^{μ_j}` over unit Bloch vectors `r_j`, where
/// `T_μ = ⟨σ_{μ_1}⊗…⊗σ_{μ_N}⟩` and `r^0 = 1`.
pub fn correlation_lambda_sq(psi: &PureState) -> Result<f64> {
    let n = psi.n_parties();
    precondition(psi.dims().iter().all(|&d| d == 2), "correlation expansion needs qubits")?;
    precondition((1..=4).contains(&n), "correlation expansion supports up to four qubits")?;
    let paulis = [linalg::CMat::identity(2, 2), linalg::pauli_x(), linalg::pauli_y(), linalg::pauli_z()];
    let n_terms = 4usize.pow(n as u32);
    let mut t = vec![0.0; n_terms];
    for (mu, slot) in t.iter_mut().enumerate() {
        let digs = qstate::digits(mu, &vec![4; n]);
        let mut amps = psi.amps().to_vec();
        for (party, &m) in digs.iter().enumerate() {
            amps = apply_unnormalized(&amps, psi.dims(), party, &paulis[m]);
        }
        *slot = linalg::inner(psi.amps(), &amps).re;
    }
    let scale = 0.5f64.powi(n as i32);
    let eval = |r: &[[f64; 4]]| -> f64 {
        let mut s = 0.0;
        for (mu, &tv) in t.iter().enumerate() {
            if tv == 0.0 {
                continue;
            }
            let digs = qstate::digits(mu, &vec![4; n]);
            s += tv * digs.iter().enumerate().map(|(j, &m)| r[j][m]).product::<f64>();
        }
        s * scale
    };
    let mut best = 0.0f64;
    let mut rng = random::rng(0x5eed);
    for restart in 0..24 {
        let mut r: Vec<[f64; 4]> = (0..n)
            .map(|j| {
                let v = if restart == 0 {
                    let ang = 0.3 + 0.7 * j as f64;
                    [ang.sin(), 0.2, ang.cos()]
                } else {
                    let u = random::unit_vector(2, &mut rng);
                    bloch_of(&u)
                };
                [1.0, v[0], v[1], v[2]]
            })
            .collect();
        let mut last = eval(&r);
        for _ in 0..5000 {
            for j in 0..n {
                // The objective is affine in r_j: c0 + c·r_j.
                let mut coef = [0.0; 4];
                for (mu, &tv) in t.iter().enumerate() {
                    if tv == 0.0 {
                        continue;
                    }
                    let digs = qstate::digits(mu, &vec![4; n]);
                    let others: f64 =
                        digs.iter().enumerate().filter(|(k, _)| *k != j).map(|(k, &m)| r[k][m]).product();
                    coef[digs[j]] += tv * others;
                }
                let nrm = (coef[1] * coef[1] + coef[2] * coef[2] + coef[3] * coef[3]).sqrt();
                if nrm > 1e-300 {
                    r[j] = [1.0, coef[1] / nrm, coef[2] / nrm, coef[3] / nrm];
                }
            }
            let v = eval(&r);
            if (v - last).abs() < 1e-15 {
                break;
            }
            last = v;
        }
        best = best.max(last);
    }
    Ok(best.min(1.0))
}

fn bloch_of(u: &[C64]) -> [f64; 3] {
    let (a, b) = (u[0], u[1]);
    let ab = a.conj() * b;
    [2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()]
}

fn apply_unnormalized(amps: &[C64], dims: &[usize], party: usize, op: &linalg::CMat) -> Vec<C64> {
    let d = dims[party];
    let inner: usize = dims[party + 1..].iter().product();
    let outer = amps.len() / (d * inner);
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    for o in 0..outer {
        for i in 0..inner {
            for a in 0..d {
                let mut s = C64::new(0.0, 0.0);
                for b in 0..d {
                    s += op[(a, b)] * amps[(o * d + b) * inner + i];
                }
                out[(o * d + a) * inner + i] = s;
            }
        }
    }
    out
}

/// `f(N,x) = log₂(1+Nx²) − (Nx²/(1+Nx²))·log₂N`: the change of the
/// logarithmic measure under a particular local operation. Negative values
/// show that `E_log₂` is not monotone under LOCC on average.
pub fn log_monotone_violation(n: f64, x: f64) -> f64 {
    let q = n * x * x;
    (1.0 + q).log2() - q / (1.0 + q) * n.log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipartite;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn solve(psi: &PureState) -> EntanglementReport {
        entanglement_eigenvalue(psi, &HartreeConfig::default()).unwrap()
    }

    #[test]
    fn ghz_and_w_values() {
        let g = solve(&PureState::ghz(3));
        assert!((g.lambda_max - FRAC_1_SQRT_2).abs() < 1e-9);
        assert!((g.e_sin2 - 0.5).abs() < 1e-9);
        let w = solve(&dicke(3, 2).unwrap());
        assert!((w.lambda_max - 2.0 / 3.0).abs() < 1e-8);
        assert!((w.e_sin2 - 5.0 / 9.0).abs() < 1e-8);
        assert!(w.converged);
    }

    #[test]
    fn product_has_unit_lambda() {
        let mut rng = random::rng(2);
        let p = random::random_product(&[2, 3, 2], &mut rng).to_pure();
        assert!((solve(&p).lambda_max - 1.0).abs() < 1e-10);
    }

    #[test]
    fn report_identities_and_phase_convention() {
        let r = solve(&dicke(4, 1).unwrap());
        assert!((r.e_sin2 - (1.0 - r.lambda_max.powi(2))).abs() < 1e-12);
        assert!((r.e_log2 + 2.0 * r.lambda_max.log2()).abs() < 1e-12);
        for v in r.closest.locals() {
            let first = v.iter().find(|a| a.norm() > 1e-12).unwrap();
            assert!(first.im.abs() < 1e-14 && first.re > 0.0);
        }
        let overlap = r.closest.overlap(&dicke(4, 1).unwrap()).norm();
        assert!((overlap - r.lambda_max).abs() < 1e-10);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let psi = random::random_pure(&[2, 2, 2], &mut random::rng(77));
        let a = solve(&psi);
        let b = solve(&psi);
        assert_eq!(a.lambda_max.to_bits(), b.lambda_max.to_bits());
        assert_eq!(a.closest, b.closest);
    }

    #[test]
    fn two_qubit_lambda_matches_concurrence() {
        let mut rng = random::rng(5);
        for _ in 0..50 {
            let psi = random::random_pure(&[2, 2], &mut rng);
            let cc = bipartite::concurrence(&psi.to_density()).unwrap();
            let rep = solve(&psi);
            assert!((rep.closest.overlap(&psi).norm() - rep.lambda_max).abs() < 1e-12);
            let l2 = rep.lambda_max.powi(2);
            assert!((l2 - (1.0 + (1.0 - cc * cc).sqrt()) / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn schmidt_lambda_examples() {
        let p = 0.3f64;
        let psi = PureState::from_terms(vec![2, 2], &[(&[0, 0], c(p.sqrt())), (&[1, 1], c((1.0 - p).sqrt()))]).unwrap();
        let cut = PartitionSpec::new(&[0], 2).unwrap();
        assert!((schmidt_lambda(&psi, &cut).unwrap() - (1.0 - p).sqrt()).abs() < 1e-12);
        let d = 4;
        let terms: Vec<(Vec<usize>, C64)> = (0..d).map(|i| (vec![i, i], c(1.0))).collect();
        let refs: Vec<(&[usize], C64)> = terms.iter().map(|(v, a)| (v.as_slice(), *a)).collect();
        let phi = PureState::from_terms(vec![d, d], &refs).unwrap();
        assert!((schmidt_lambda(&phi, &cut).unwrap() - 0.5).abs() < 1e-12);
        let prod = random::random_product(&[2, 3, 2], &mut random::rng(1)).to_pure();
        let cut3 = PartitionSpec::new(&[0, 2], 3).unwrap();
        assert!((schmidt_lambda(&prod, &cut3).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_state_examples() {
        let w = symmetric_state(3, &[2, 1]).unwrap();
        let s = 1.0 / 3f64.sqrt();
        for d in [[0, 0, 1], [0, 1, 0], [1, 0, 0]] {
            assert!((w.amp(&d) - c(s)).norm() < 1e-15);
        }
        // Zero parties in level 0 puts every party in level 1.
        let s30 = symmetric_state(3, &[0, 3]).unwrap();
        assert!((s30.amp(&[1, 1, 1]) - c(1.0)).norm() < 1e-15);
        let q = symmetric_state(2, &[0, 1, 1]).unwrap();
        assert!((q.amp(&[1, 2]) - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((q.amp(&[2, 1]) - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!(symmetric_state(3, &[1, 1]).is_err());
    }

    #[test]
    fn lambda_symmetric_examples() {
        assert!((lambda_symmetric(3, &[2, 1]).unwrap() - 2.0 / 3.0).abs() < 1e-14);
        assert!((lambda_symmetric(4, &[2, 2]).unwrap() - (3.0f64 / 8.0).sqrt()).abs() < 1e-14);
        assert!((lambda_symmetric(5, &[0, 5]).unwrap() - 1.0).abs() < 1e-14);
        for (n, counts) in [(4usize, vec![1usize, 3]), (3, vec![1, 1, 1]), (4, vec![2, 1, 1])] {
            let psi = symmetric_state(n, &counts).unwrap();
            let num = solve(&psi).lambda_max;
            assert!((num - lambda_symmetric(n, &counts).unwrap()).abs() < 1e-8, "{n} {counts:?}");
        }
    }

    #[test]
    fn symmetric_minimum_at_half_filling() {
        for n in 2..=10usize {
            let vals: Vec<f64> = (0..=n).map(|k| lambda_symmetric(n, &[k, n - k]).unwrap()).collect();
            let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
            assert!((vals[n / 2] - min).abs() < 1e-14 && (vals[n.div_ceil(2)] - min).abs() < 1e-14);
        }
    }

    #[test]
    fn det_state_values() {
        assert!((lambda_det(2).powi(2) - 0.5).abs() < 1e-15);
        assert!((lambda_det(3).powi(2) - 1.0 / 6.0).abs() < 1e-15);
        let d2 = det_state(2).unwrap();
        assert!((solve(&d2).lambda_max.powi(2) - 0.5).abs() < 1e-12);
        let cfg = HartreeConfig { restarts: 64, ..HartreeConfig::default() };
        let d3 = entanglement_eigenvalue(&det_state(3).unwrap(), &cfg).unwrap();
        assert!((d3.lambda_max - lambda_det(3)).abs() < 1e-7);
        assert!(det_state(7).is_err());
    }

    #[test]
    fn two_term_values() {
        let l = two_term_symmetric_lambda(3, 2, 1, 0.5).unwrap();
        assert!((l - 3f64.sqrt() / 2.0).abs() < 1e-10);
        assert!((two_term_symmetric_lambda(5, 2, 4, 1.0).unwrap() - lambda_symmetric(5, &[2, 3]).unwrap()).abs() < 1e-10);
        let psi = two_term_symmetric_state(7, 2, 5, 0.5).unwrap();
        let num = solve(&psi).lambda_max;
        assert!((num - two_term_symmetric_lambda(7, 2, 5, 0.5).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn ghz_w_lambda_values() {
        assert!((ghz_w_lambda(1.0, 0.0).unwrap() - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((ghz_w_lambda(0.0, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((ghz_w_lambda(0.25, 0.375).unwrap() - 1.0).abs() < 1e-12);
        let mut rng = random::rng(8);
        for _ in 0..20 {
            use rand::Rng;
            let x: f64 = rng.random();
            let y: f64 = rng.random::<f64>() * (1.0 - x);
            let num = solve(&ghz_w_state(x, y).unwrap()).lambda_max;
            assert!((num - ghz_w_lambda(x, y).unwrap()).abs() < 1e-8, "{x} {y}");
        }
        assert!(ghz_w_lambda(0.8, 0.5).is_err());
    }

    #[test]
    fn witness_values() {
        assert!((optimal_witness_value(&PureState::ghz(3)).unwrap() + 0.5).abs() < 1e-9);
        assert!((optimal_witness_value(&dicke(3, 2).unwrap()).unwrap() + 5.0 / 9.0).abs() < 1e-8);
        assert!((optimal_witness_value(&dicke(4, 2).unwrap()).unwrap() + 5.0 / 8.0).abs() < 1e-8);
        assert!(optimal_witness_value(&PureState::basis(vec![2, 2, 2], &[0, 1, 0]).unwrap()).is_err());
    }

    #[test]
    fn correlation_route() {
        assert!((correlation_lambda_sq(&PureState::ghz(3)).unwrap() - 0.5).abs() < 1e-9);
        let z = PureState::basis(vec![2, 2], &[0, 0]).unwrap();
        assert!((correlation_lambda_sq(&z).unwrap() - 1.0).abs() < 1e-12);
        let mut rng = random::rng(21);
        for _ in 0..5 {
            let psi = random::random_pure(&[2, 2, 2], &mut rng);
            let l2 = solve(&psi).lambda_max.powi(2);
            assert!((correlation_lambda_sq(&psi).unwrap() - l2).abs() < 1e-6);
        }
    }

    #[test]
    fn ghz_plus_w_phase_between_bounding_curves() {
        // Sampled check only: the bounding property is a numerical observation.
        use rand::Rng;
        let ghz = PureState::ghz(3);
        let w = dicke(3, 2).unwrap();
        let e = |s: f64, phi: f64| {
            let ph = C64::from_polar(1.0, phi);
            let amps = (0..8).map(|i| ghz.amps()[i] * s.sqrt() + w.amps()[i] * ph * (1.0 - s).sqrt()).collect();
            solve(&PureState::normalized(vec![2; 3], amps).unwrap()).e_sin2
        };
        let mut rng = random::rng(5);
        for _ in 0..40 {
            let s: f64 = rng.random();
            let phi = rng.random::<f64>() * std::f64::consts::TAU;
            let (lo, hi, v) = (e(s, 0.0), e(s, std::f64::consts::PI), e(s, phi));
            assert!(lo <= hi + 1e-9, "s={s}");
            assert!(v >= lo - 1e-8 && v <= hi + 1e-8, "s={s} φ={phi}: {lo} {v} {hi}");
        }
    }

    #[test]
    fn log_measure_not_monotone_at_four() {
        let min = (0..=500).map(|i| log_monotone_violation(4.0, 0.3 + 0.5 * i as f64 / 500.0)).fold(f64::INFINITY, f64::min);
        assert!(min < 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn local_unitary_invariance(seed in any::<u64>()) {
            let mut rng = random::rng(seed);
            let psi = random::random_pure(&[2, 2, 2], &mut rng);
            let mut moved = psi.clone();
            for p in 0..3 {
                moved = moved.apply_local(p, &random::random_unitary(2, &mut rng)).unwrap();
            }
            prop_assert!((solve(&psi).lambda_max - solve(&moved).lambda_max).abs() < 1e-8);
        }

        #[test]
        fn multiplicative_under_tensor_product(seed in any::<u64>()) {
            let mut rng = random::rng(seed);
            let a = random::random_pure(&[2, 2], &mut rng);
            let b = random::random_pure(&[2, 2], &mut rng);
            let ab = qstate::tensor_product(&a, &b).unwrap();
            let prod = solve(&a).lambda_max * solve(&b).lambda_max;
            prop_assert!((solve(&ab).lambda_max - prod).abs() < 1e-8);
        }
    }
}
