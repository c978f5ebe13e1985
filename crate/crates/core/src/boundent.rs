//! Bound entangled states (Smolin, Dür, UPB) and Bell-operator diagnostics.

use rayon::prelude::*;

use crate::bipartite;
use crate::error::{precondition, Error, Result};
use crate::geomopt::{self, HartreeConfig};
use crate::linalg::{self, c, CMat};
use crate::qstate::{self, DensityMatrix, PartitionSpec, ProductState, PureState};
use crate::random;
use crate::C64;

fn qubits(terms: &[(&[usize], f64)], n: usize) -> PureState {
    let t: Vec<(&[usize], C64)> = terms.iter().map(|(d, a)| (*d, c(*a))).collect();
    PureState::from_terms(vec![2; n], &t).expect("valid qubit state")
}

/// The four GHZ-like states `|X_i⟩` spanning the Smolin state.
pub fn smolin_x_states() -> [PureState; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        qubits(&[(&[0, 0, 0, 0], s), (&[1, 1, 1, 1], s)], 4),
        qubits(&[(&[0, 0, 1, 1], s), (&[1, 1, 0, 0], s)], 4),
        qubits(&[(&[0, 1, 0, 1], s), (&[1, 0, 1, 0], s)], 4),
        qubits(&[(&[0, 1, 1, 0], s), (&[1, 0, 0, 1], s)], 4),
    ]
}

/// `(1/4) Σ_i |X_i⟩⟨X_i|`.
pub fn smolin_state() -> DensityMatrix {
    let xs = smolin_x_states();
    let terms: Vec<(f64, &PureState)> = xs.iter().map(|x| (0.25, x)).collect();
    DensityMatrix::mixture(&terms).expect("Smolin state")
}

/// `(1/4) Σ_i |Ψ_i⟩⟨Ψ_i|_AB ⊗ |Ψ_i⟩⟨Ψ_i|_CD` over the Bell states.
pub fn smolin_state_bell() -> DensityMatrix {
    let mut m = CMat::zeros(16, 16);
    for b in bipartite::bell_states() {
        let p = b.to_density();
        m += linalg::kron(p.matrix(), p.matrix()) * c(0.25);
    }
    DensityMatrix::new(vec![2; 4], m).expect("Smolin state")
}

/// Analytic GME of the Smolin state and the Monte Carlo check over random
/// decompositions.
#[derive(Clone, Debug, PartialEq)]
pub struct SmolinGme {
    pub e_sin2: f64,
    pub e_log2: f64,
    /// Smallest average `E_sin²` found over the sampled decompositions.
    pub sampled_min: f64,
    pub samples: usize,
}

/// `E_sin² = 1/2` and `E_log₂ = 1`, checked against `samples` random
/// decompositions `φ̃_k = Σ_i U_ki |X_i⟩/2` with random isometries `U`.
pub fn smolin_gme(samples: usize, seed: u64) -> Result<SmolinGme> {
    precondition(samples >= 1, "need at least one sample")?;
    let xs = smolin_x_states();
    let cfg = HartreeConfig { restarts: 4, ..HartreeConfig::default() };
    let averages: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = random::substream(seed, s as u64);
            // M rows of an M×M unitary, first four columns used: an isometry.
            let m = 4 + (s % 5);
            let u = random::random_unitary(m, &mut rng);
            let mut avg = 0.0;
            for k in 0..m {
                let amps: Vec<C64> = (0..16)
                    .map(|idx| (0..4).map(|i| u[(k, i)] * xs[i].amps()[idx] * 0.5).sum())
                    .collect();
                let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
                if p < 1e-14 {
                    continue;
                }
                let phi = PureState::normalized(vec![2; 4], amps).expect("nonzero component");
                let rep = geomopt::entanglement_eigenvalue(&phi, &cfg).expect("valid solver settings");
                avg += p * rep.e_sin2;
            }
            avg
        })
        .collect();
    let sampled_min = averages.into_iter().fold(f64::INFINITY, f64::min);
    Ok(SmolinGme { e_sin2: 0.5, e_log2: 1.0, sampled_min, samples })
}

/// Largest register for the Dür family.
pub const DUR_MAX_PARTIES: usize = 10;

fn check_dur(n: usize, x: f64) -> Result<()> {
    precondition((4..=DUR_MAX_PARTIES).contains(&n), format!("Dür states need 4 <= N <= {DUR_MAX_PARTIES}"))?;
    precondition((0.0..=1.0).contains(&x), "GHZ weight x must lie in [0, 1]")
}

/// `|u_k⟩ = |0…1_k…0⟩` (`v = false`) or `|v_k⟩ = |1…0_k…1⟩` (`v = true`).
fn dur_basis(n: usize, k: usize, v: bool) -> usize {
    let bit = 1usize << (n - 1 - k);
    let all = (1usize << n) - 1;
    if v {
        all ^ bit
    } else {
        bit
    }
}

/// `ρ_N(x) = x|Ψ_G⟩⟨Ψ_G| + (1−x)/(2N) Σ_k (P_k + P̄_k)` with the GHZ phase 0.
pub fn dur_state(n: usize, x: f64) -> Result<DensityMatrix> {
    check_dur(n, x)?;
    let d = 1usize << n;
    let mut m = CMat::zeros(d, d);
    let h = 0.5 * x;
    for (i, j) in [(0, 0), (0, d - 1), (d - 1, 0), (d - 1, d - 1)] {
        m[(i, j)] = c(h);
    }
    let w = (1.0 - x) / (2.0 * n as f64);
    for k in 0..n {
        for v in [false, true] {
            let b = dur_basis(n, k, v);
            m[(b, b)] += c(w);
        }
    }
    DensityMatrix::new_unchecked_psd(vec![2; n], m)
}

/// `𝒩_{1:rest} = max(0, ((N+1)x − 1)/N)`.
pub fn dur_negativity_one_rest(n: usize, x: f64) -> f64 {
    (((n as f64 + 1.0) * x - 1.0) / n as f64).max(0.0)
}

/// `𝒩_{12:rest} = x`.
pub fn dur_negativity_two_rest(_n: usize, x: f64) -> f64 {
    x
}

/// `√y|Ψ_G⟩ ± √(1−y)|u_k⟩` or with `|v_k⟩`.
pub fn dur_decomposition_state(n: usize, y: f64, plus: bool, v: bool, k: usize) -> Result<PureState> {
    check_dur(n, y)?;
    precondition(k < n, "party index out of range")?;
    let d = 1usize << n;
    let mut amps = vec![C64::new(0.0, 0.0); d];
    let g = (y / 2.0).sqrt();
    amps[0] = c(g);
    amps[d - 1] = c(g);
    let sign = if plus { 1.0 } else { -1.0 };
    amps[dur_basis(n, k, v)] += c(sign * (1.0 - y).sqrt());
    PureState::new(vec![2; n], amps)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DurGme {
    pub e_sin2: f64,
    pub e_log2: f64,
    /// Largest deviation of the solver Λ from `√((2−x)/2)` over the optimal
    /// decomposition states.
    pub lambda_deviation: f64,
}

/// `E_sin² = x/2`, `E_log₂ = log₂(2/(2−x))`, with a solver check of the
/// optimal decomposition states `ψ_{±,u/v,k}(x)`.
pub fn dur_gme(n: usize, x: f64) -> Result<DurGme> {
    check_dur(n, x)?;
    let expect = ((2.0 - x) / 2.0).sqrt();
    let mut dev: f64 = 0.0;
    for k in 0..n {
        for plus in [true, false] {
            for v in [false, true] {
                let psi = dur_decomposition_state(n, x, plus, v, k)?;
                let rep = geomopt::entanglement_eigenvalue(&psi, &HartreeConfig::default())?;
                dev = dev.max((rep.lambda_max - expect).abs());
            }
        }
    }
    Ok(DurGme { e_sin2: x / 2.0, e_log2: (2.0 / (2.0 - x)).log2(), lambda_deviation: dev })
}

/// The three-qubit UPB `{|0,1,+⟩, |1,+,0⟩, |+,0,1⟩, |−,−,−⟩}`.
pub fn upb_members() -> [ProductState; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let zero = vec![c(1.0), c(0.0)];
    let one = vec![c(0.0), c(1.0)];
    let plus = vec![c(s), c(s)];
    let minus = vec![c(s), c(-s)];
    let mk = |a: &Vec<C64>, b: &Vec<C64>, cc: &Vec<C64>| ProductState::new(vec![a.clone(), b.clone(), cc.clone()]).expect("unit vectors");
    [mk(&zero, &one, &plus), mk(&one, &plus, &zero), mk(&plus, &zero, &one), mk(&minus, &minus, &minus)]
}

/// `(1 − Σ_j |ψ_j⟩⟨ψ_j|)/4`.
pub fn upb_state() -> DensityMatrix {
    let mut m = CMat::identity(8, 8);
    for p in upb_members() {
        let v = p.to_pure();
        m -= linalg::outer(v.amps(), v.amps());
    }
    DensityMatrix::new_unchecked_psd(vec![2; 3], m / c(4.0)).expect("UPB complement")
}

/// Smallest `Σ_j |⟨abc|ψ_j⟩|²` over product states found by sampling
/// followed by alternating descent; strictly positive for an unextendible set.
pub fn upb_unextendibility_margin(samples: usize, seed: u64) -> f64 {
    let mut proj = CMat::zeros(8, 8);
    for p in upb_members() {
        let v = p.to_pure();
        proj += linalg::outer(v.amps(), v.amps());
    }
    let dims = [2usize; 3];
    let mut rng = random::rng(seed);
    let mut cands: Vec<(f64, Vec<Vec<C64>>)> = (0..samples)
        .map(|_| {
            let ps = random::random_product(&dims, &mut rng);
            let v = ps.to_pure();
            (expect_real(&proj, v.amps()), ps.locals().to_vec())
        })
        .collect();
    cands.sort_by(|a, b| a.0.total_cmp(&b.0));
    cands.truncate(16);
    cands
        .into_iter()
        .map(|(mut best, mut local)| {
            for _ in 0..500 {
                for k in 0..3 {
                    let red = reduced_operator(&proj, &dims, &local, k);
                    let (_, vecs) = linalg::eigh(&red);
                    local[k] = vecs.column(0).iter().copied().collect();
                }
                let v = ProductState::from_locals_unchecked(local.clone()).to_pure();
                let val = expect_real(&proj, v.amps());
                let done = best - val < 1e-15;
                best = best.min(val);
                if done {
                    break;
                }
            }
            best
        })
        .fold(f64::INFINITY, f64::min)
}

fn expect_real(m: &CMat, v: &[C64]) -> f64 {
    let x = nalgebra::DVector::from_column_slice(v);
    x.dotc(&(m * &x)).re
}

/// `⟨φ_{≠k}| M |φ_{≠k}⟩` as an operator on party `k`.
fn reduced_operator(m: &CMat, dims: &[usize], local: &[Vec<C64>], k: usize) -> CMat {
    let dim: usize = dims.iter().product();
    let dk = dims[k];
    let mut w = CMat::zeros(dim, dk);
    for i in 0..dim {
        let d = qstate::digits(i, dims);
        let mut amp = c(1.0);
        for (l, &dl) in d.iter().enumerate() {
            if l != k {
                amp *= local[l][dl];
            }
        }
        w[(i, d[k])] = amp;
    }
    w.adjoint() * m * w
}

/// Measurement directions: two unit vectors `(a_k, a'_k)` per party.
#[derive(Clone, Debug, PartialEq)]
pub struct BellSettings {
    dirs: Vec<[[f64; 3]; 2]>,
}

impl BellSettings {
    pub fn new(dirs: Vec<[[f64; 3]; 2]>) -> Result<Self> {
        precondition(!dirs.is_empty(), "need settings for at least one party")?;
        for pair in &dirs {
            for v in pair {
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if (n - 1.0).abs() > 1e-12 {
                    return Err(Error::Precondition(format!("direction {v:?} is not a unit vector")));
                }
            }
        }
        Ok(BellSettings { dirs })
    }

    /// Directions `(cos θ, 0, sin θ)`-style in the z–x plane: `θ = 0` is `z`.
    pub fn zx_plane(angles: &[(f64, f64)]) -> Result<Self> {
        let d = |t: f64| [t.sin(), 0.0, t.cos()];
        Self::new(angles.iter().map(|&(a, b)| [d(a), d(b)]).collect())
    }

    /// Directions `(cos φ, sin φ, 0)` in the x–y plane.
    pub fn xy_plane(angles: &[(f64, f64)]) -> Result<Self> {
        let d = |t: f64| [t.cos(), t.sin(), 0.0];
        Self::new(angles.iter().map(|&(a, b)| [d(a), d(b)]).collect())
    }

    pub fn parties(&self) -> usize {
        self.dirs.len()
    }

    pub fn directions(&self) -> &[[[f64; 3]; 2]] {
        &self.dirs
    }
}

/// The Mermin-Klyshko operator `B_N` built recursively from
/// `B_k = ½B_{k−1}⊗(σ_a+σ_a') + ½B'_{k−1}⊗(σ_a−σ_a')`.
pub fn mk_operator(settings: &BellSettings) -> CMat {
    let dirs = settings.directions();
    let mut b = linalg::sigma_dot(dirs[0][0]);
    let mut bp = linalg::sigma_dot(dirs[0][1]);
    for pair in &dirs[1..] {
        let (sa, sb) = (linalg::sigma_dot(pair[0]), linalg::sigma_dot(pair[1]));
        let (sum, diff) = (&sa + &sb, &sa - &sb);
        let nb = (linalg::kron(&b, &sum) + linalg::kron(&bp, &diff)) * c(0.5);
        let nbp = (linalg::kron(&bp, &sum) - linalg::kron(&b, &diff)) * c(0.5);
        b = nb;
        bp = nbp;
    }
    b
}

/// `Tr(B_N ρ)`.
pub fn mermin_klyshko(rho: &DensityMatrix, settings: &BellSettings) -> Result<f64> {
    if rho.dims().iter().any(|&d| d != 2) {
        return Err(Error::Precondition("Mermin-Klyshko operator needs qubits".into()));
    }
    if settings.parties() != rho.n_parties() {
        return Err(Error::DimensionMismatch(format!(
            "{} parties but settings for {}",
            rho.n_parties(),
            settings.parties()
        )));
    }
    Ok(rho.expectation(&mk_operator(settings)).re)
}

/// Maximizes `⟨B_N⟩` over x–y plane settings by exact coordinate ascent:
/// the value is `A cos φ + B sin φ + C` in any single angle.
pub fn optimize_mk_xy(rho: &DensityMatrix, restarts: usize, seed: u64) -> Result<(f64, BellSettings)> {
    let n = rho.n_parties();
    precondition(restarts >= 1, "need at least one restart")?;
    let eval = |ang: &[(f64, f64)]| -> f64 {
        let s = BellSettings::xy_plane(ang).expect("unit vectors");
        mermin_klyshko(rho, &s).unwrap_or(f64::NEG_INFINITY)
    };
    let mut rng = random::rng(seed);
    let mut best: Option<(f64, Vec<(f64, f64)>)> = None;
    for _ in 0..restarts {
        use rand::Rng;
        let mut ang: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.random::<f64>() * std::f64::consts::TAU, rng.random::<f64>() * std::f64::consts::TAU))
            .collect();
        let mut val = eval(&ang);
        for _ in 0..200 {
            let before = val;
            for k in 0..n {
                for which in 0..2 {
                    let set = |ang: &mut Vec<(f64, f64)>, t: f64| {
                        if which == 0 {
                            ang[k].0 = t
                        } else {
                            ang[k].1 = t
                        }
                    };
                    let mut probe = ang.clone();
                    let mut f = [0.0; 3];
                    for (slot, t) in f.iter_mut().zip([0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI]) {
                        set(&mut probe, t);
                        *slot = eval(&probe);
                    }
                    let cc = 0.5 * (f[0] + f[2]);
                    let (a, b) = (f[0] - cc, f[1] - cc);
                    set(&mut ang, b.atan2(a));
                    val = eval(&ang);
                }
            }
            if val - before < 1e-13 {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| val > b.0) {
            best = Some((val, ang));
        }
    }
    let (val, ang) = best.expect("at least one restart");
    Ok((val, BellSettings::xy_plane(&ang)?))
}

/// `⟨ab + ab' + a'b − a'b'⟩` for two qubits with settings `(a, a')`, `(b, b')`.
pub fn chsh_value(rho: &DensityMatrix, settings: &BellSettings) -> Result<f64> {
    precondition(settings.parties() == 2 && rho.dims() == [2, 2], "CHSH needs two qubits")?;
    Ok(2.0 * mermin_klyshko(rho, settings)?)
}

/// Largest CHSH value over all settings, `2√(m₁+m₂)` from the two largest
/// eigenvalues of `TᵀT` with `T_ij = Tr(ρ σ_i⊗σ_j)`.
pub fn chsh_max(rho: &DensityMatrix) -> Result<f64> {
    precondition(rho.dims() == [2, 2], "CHSH needs two qubits")?;
    let paulis = [linalg::pauli_x(), linalg::pauli_y(), linalg::pauli_z()];
    let t = nalgebra::DMatrix::<f64>::from_fn(3, 3, |i, j| rho.expectation(&linalg::kron(&paulis[i], &paulis[j])).re);
    let mut ev: Vec<f64> = (t.transpose() * &t).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(2.0 * (ev[0] + ev[1]).max(0.0).sqrt())
}

/// `ρ` reduced to the GHZ-diagonal form by local depolarization.
#[derive(Clone, Debug, PartialEq)]
pub struct DepolarizedForm {
    pub lambda0_plus: f64,
    pub lambda0_minus: f64,
    /// `λ_j` for `j = 1 … 2^{N−1}−1`; each of `|Ψ_j^±⟩` carries weight `λ_j`.
    pub lambdas: Vec<f64>,
}

impl DepolarizedForm {
    /// `λ₀^± = ⟨Ψ₀^±|ρ|Ψ₀^±⟩` and `λ_j` the average of the `|Ψ_j^±⟩` weights,
    /// so that `λ₀⁺ + λ₀⁻ + 2Σλ_j = 1`.
    pub fn from_state(rho: &DensityMatrix) -> Result<Self> {
        let n = rho.n_parties();
        precondition(n >= 2 && rho.dims().iter().all(|&d| d == 2), "need at least two qubits")?;
        let d = 1usize << n;
        let m = rho.matrix();
        let ghz_weight = |j: usize, sign: f64| -> f64 {
            // (|0 j⟩ ± |1 j̄⟩)/√2 with the leading qubit 0 in the first term.
            let (a, b) = (j, (d - 1) ^ j);
            0.5 * (m[(a, a)].re + m[(b, b)].re + 2.0 * sign * m[(a, b)].re)
        };
        let half = d / 2;
        let lambdas = (1..half).map(|j| 0.5 * (ghz_weight(j, 1.0) + ghz_weight(j, -1.0))).collect();
        Ok(DepolarizedForm { lambda0_plus: ghz_weight(0, 1.0), lambda0_minus: ghz_weight(0, -1.0), lambdas })
    }

    pub fn delta(&self) -> f64 {
        self.lambda0_plus - self.lambda0_minus
    }

    /// `2λ_j ≥ |Δ|` for every `j`: no bipartite cut is distillable.
    pub fn nondistillable(&self) -> bool {
        let delta = self.delta().abs();
        self.lambdas.iter().all(|&l| 2.0 * l >= delta - 1e-12)
    }
}

/// Thresholds on `Δ` implied by a violation of each Bell inequality, against
/// the largest `Δ` compatible with non-distillability.
#[derive(Clone, Debug, PartialEq)]
pub struct NondistillReport {
    pub n: usize,
    pub delta: f64,
    /// `1 − Δ ≥ (2^{N−1} − 1)Δ`.
    pub nondistillable_condition: bool,
    /// `2^{1−N}`, the largest `Δ` allowed by the condition.
    pub nondistillable_max: f64,
    /// `2^{−(N−1)/2}`.
    pub mk_threshold: f64,
    /// `√3 (2/3)^N`.
    pub three_setting_threshold: f64,
    /// `2 (2/π)^N`.
    pub functional_threshold: f64,
    pub violates_mk: bool,
    pub violates_three_setting: bool,
    pub violates_functional: bool,
    /// Every threshold exceeds `2^{1−N}`, so each violation forces some
    /// bipartite cut to be distillable.
    pub violations_imply_distillable: bool,
}

pub fn nondistill_consistency(n: usize, delta: f64) -> Result<NondistillReport> {
    precondition(n >= 4, "need N >= 4")?;
    precondition(delta.is_finite() && delta >= 0.0, "Δ must be non-negative")?;
    let nf = n as f64;
    let nd_max = 2f64.powf(1.0 - nf);
    let mk = 2f64.powf(-(nf - 1.0) / 2.0);
    let three = 3f64.sqrt() * (2.0f64 / 3.0).powf(nf);
    let func = 2.0 * (2.0 / std::f64::consts::PI).powf(nf);
    Ok(NondistillReport {
        n,
        delta,
        nondistillable_condition: 1.0 - delta >= (2f64.powf(nf - 1.0) - 1.0) * delta,
        nondistillable_max: nd_max,
        mk_threshold: mk,
        three_setting_threshold: three,
        functional_threshold: func,
        violates_mk: delta > mk,
        violates_three_setting: delta > three,
        violates_functional: delta > func,
        violations_imply_distillable: mk > nd_max && three > nd_max && func > nd_max,
    })
}

/// Negativity across `group_a : rest`.
pub fn cut_negativity(rho: &DensityMatrix, group_a: &[usize]) -> Result<f64> {
    bipartite::negativity(rho, &PartitionSpec::new(group_a, rho.n_parties())?)
}
