//! Small resource-theory demonstrations: pure-state distillation yield, the
//! recurrence step for Werner pairs, and a three-letter compression example.

use statrs::function::factorial::ln_binomial;

use crate::bipartite;
use crate::error::{precondition, Result};
use crate::linalg::{self, c, CMat};
use crate::qstate::{self, DensityMatrix};

/// Average number of Bell pairs per pair when `n` copies of
/// `cos θ|00⟩ + sin θ|11⟩` are processed together.
pub fn pure_yield(theta: f64, n: usize) -> Result<f64> {
    precondition((0.0..=std::f64::consts::FRAC_PI_2).contains(&theta), "θ must lie in [0, π/2]")?;
    precondition((1..=10_000).contains(&n), "need 1 <= n <= 10^4")?;
    let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
    if c2 < 1e-300 || s2 < 1e-300 {
        return Ok(0.0);
    }
    let (lc, ls) = (c2.ln(), s2.ln());
    let nn = n as u64;
    let total: f64 = (0..=nn)
        .map(|k| {
            let lb = ln_binomial(nn, k);
            let lp = lb + (nn - k) as f64 * lc + k as f64 * ls;
            lp.exp() * lb / std::f64::consts::LN_2
        })
        .sum();
    Ok(total / n as f64)
}

/// One round of the two-pair recurrence on `ρ_W(r) = r|Φ⁺⟩⟨Φ⁺| + (1−r)I/4`:
/// `r' = 2r(1+2r) / (3(1+r²))`.
pub fn werner_step(r: f64) -> Result<f64> {
    precondition((0.0..=1.0).contains(&r), "r must lie in [0, 1]")?;
    // Written as r + r(1−r)(3r−1)/(3(1+r²)) so the fixed points are exact.
    Ok(r + r * (1.0 - r) * (3.0 * r - 1.0) / (3.0 * (1.0 + r * r)))
}

/// The same round by explicit simulation: bilateral CNOT from pair one onto
/// pair two, both target qubits measured in the computational basis, the
/// source kept when the outcomes agree and then twirled back to Werner form.
/// Returns `(r', success probability)`.
pub fn werner_step_circuit(r: f64) -> Result<(f64, f64)> {
    precondition((0.0..=1.0).contains(&r), "r must lie in [0, 1]")?;
    let pair = werner_pair(r);
    // Qubit order: A1 B1 A2 B2.
    let rho = linalg::kron(&pair, &pair);
    let u = cnot(0, 2, 4) * cnot(1, 3, 4);
    let rho = &u * rho * u.adjoint();
    let mut kept = CMat::zeros(16, 16);
    for i in 0..16 {
        for j in 0..16 {
            let (di, dj) = (qstate::digits(i, &[2; 4]), qstate::digits(j, &[2; 4]));
            if di[2] == di[3] && dj[2] == dj[3] && di[2] == dj[2] {
                kept[(i, j)] = rho[(i, j)];
            }
        }
    }
    let p = linalg::trace(&kept).re;
    let kept = DensityMatrix::new_unchecked_psd(vec![2; 4], kept / c(p))?;
    let out = qstate::partial_trace(&kept, &[0, 1])?;
    let phi = &bipartite::bell_states()[0];
    let f = out.expectation(&phi.to_density().matrix().clone()).re;
    Ok(((4.0 * f - 1.0) / 3.0, p))
}

fn werner_pair(r: f64) -> CMat {
    let phi = bipartite::bell_states()[0].to_density();
    phi.matrix() * c(r) + CMat::identity(4, 4) * c((1.0 - r) / 4.0)
}

fn cnot(control: usize, target: usize, n: usize) -> CMat {
    let d = 1usize << n;
    let (cb, tb) = (1usize << (n - 1 - control), 1usize << (n - 1 - target));
    let mut m = CMat::zeros(d, d);
    for i in 0..d {
        let j = if i & cb != 0 { i ^ tb } else { i };
        m[(j, i)] = c(1.0);
    }
    m
}

/// Successive parameters of an iterated protocol.
#[derive(Clone, Debug, PartialEq)]
pub struct DistillationTrace {
    /// `(step, value)` with step 0 the input.
    pub steps: Vec<(usize, f64)>,
}

impl DistillationTrace {
    pub fn last(&self) -> f64 {
        self.steps.last().map(|s| s.1).unwrap_or(f64::NAN)
    }
}

/// Iterates [`werner_step`] `steps` times from `r0`.
pub fn werner_trace(r0: f64, steps: usize) -> Result<DistillationTrace> {
    let mut r = r0;
    let mut out = vec![(0, r0)];
    for s in 1..=steps {
        r = werner_step(r)?.clamp(0.0, 1.0);
        out.push((s, r));
    }
    Ok(DistillationTrace { steps: out })
}

/// Figures of the three-letter compression example for the `{|H⟩, |D⟩}`
/// ensemble sent through two qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct SchumacherReport {
    /// `S(ρ)` of the single-letter density matrix.
    pub entropy: f64,
    /// `λ_Q = cos²(π/8)`.
    pub lambda_q: f64,
    /// Weight of the four-dimensional typical subspace in `ρ^⊗3`.
    pub p_lambda: f64,
    /// Fidelity after a successful projection, equal to `P_Λ`.
    pub f1: f64,
    /// Fidelity after a failed projection, the largest eigenvalue of `ρ^⊗3`.
    pub f2: f64,
    /// `P_Λ F₁ + (1 − P_Λ) F₂`.
    pub fidelity: f64,
    /// Sending two letters and guessing `|Q⟩` for the third.
    pub baseline: f64,
    /// Fidelity averaged exactly over the eight equiprobable messages.
    pub message_average: f64,
}

pub fn schumacher_demo() -> SchumacherReport {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = [c(1.0), c(0.0)];
    let dvec = [c(s), c(s)];
    let rho1 = (linalg::outer(&h, &h) + linalg::outer(&dvec, &dvec)) * c(0.5);
    let (vals, vecs) = linalg::eigh(&rho1);
    let entropy = qstate::shannon(&vals.iter().copied().collect::<Vec<_>>());
    let lambda_q = vals[1];
    let rho3 = linalg::kron_all(&[rho1.clone(), rho1.clone(), rho1]);
    let (v3, e3) = linalg::eigh(&rho3);
    // Ascending order: the typical subspace is the top four eigenvectors.
    let p_lambda: f64 = (4..8).map(|i| v3[i]).sum();
    let f2 = v3[7];
    let fidelity = p_lambda * p_lambda + (1.0 - p_lambda) * f2;

    let q: Vec<_> = vecs.column(1).iter().copied().collect();
    let ov = |x: &[crate::C64]| linalg::inner(&q, x).norm_sqr();
    let baseline = 0.5 * ov(&h) + 0.5 * ov(&dvec);

    let letters = [h.to_vec(), dvec.to_vec()];
    let mut message_average = 0.0;
    for m in 0..8 {
        let psi = linalg::kron_all(&[0, 1, 2].map(|k| {
            let l = &letters[(m >> (2 - k)) & 1];
            CMat::from_column_slice(2, 1, l)
        }));
        let amps: Vec<_> = (0..8).map(|i| linalg::inner(&e3.column(i).iter().copied().collect::<Vec<_>>(), psi.as_slice())).collect();
        let ps: f64 = amps[4..].iter().map(|a| a.norm_sqr()).sum();
        message_average += (ps * ps + (1.0 - ps) * amps[7].norm_sqr()) / 8.0;
    }

    SchumacherReport { entropy, lambda_q, p_lambda, f1: p_lambda, f2, fidelity, baseline, message_average }
}
