//! Bipartite measures: Schmidt decomposition, concurrence, entanglement of
//! formation, negativity and the closed-form geometric measure for
//! two-qubit, Werner and isotropic states.

use crate::error::{precondition, Error, Result};
use crate::linalg::{self, c, CMat};
use crate::qstate::{self, DensityMatrix, PartitionSpec, PureState};
use crate::C64;

/// `ψ = Σ_k λ_k |a_k⟩ ⊗ |b_k⟩` with `λ` descending.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left_basis: Vec<Vec<C64>>,
    pub right_basis: Vec<Vec<C64>>,
}

impl SchmidtDecomposition {
    /// Rebuilds the amplitudes in the (group_a, group_b) matrix layout.
    pub fn reconstruct(&self) -> CMat {
        let (na, nb) = (self.left_basis[0].len(), self.right_basis[0].len());
        let mut m = CMat::zeros(na, nb);
        for (k, &l) in self.coefficients.iter().enumerate() {
            m += linalg::outer(&self.left_basis[k], &conj(&self.right_basis[k])) * c(l);
        }
        m
    }
}

fn conj(v: &[C64]) -> Vec<C64> {
    v.iter().map(|x| x.conj()).collect()
}

pub fn schmidt(psi: &PureState, cut: &PartitionSpec) -> Result<SchmidtDecomposition> {
    if cut.n_parties() != psi.n_parties() {
        return Err(Error::DimensionMismatch("cut does not match the state".into()));
    }
    let m = qstate::coefficient_matrix(psi, cut.group_a(), cut.group_b());
    let svd = m.svd(true, true);
    let u = svd.u.expect("left vectors requested");
    let vt = svd.v_t.expect("right vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    Ok(SchmidtDecomposition {
        coefficients: order.iter().map(|&k| svd.singular_values[k]).collect(),
        left_basis: order.iter().map(|&k| u.column(k).iter().copied().collect()).collect(),
        right_basis: order.iter().map(|&k| vt.row(k).iter().copied().collect()).collect(),
    })
}

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(Error::Precondition(format!("two-qubit state required, got dims {:?}", rho.dims())));
    }
    Ok(())
}

/// Wootters concurrence `max{0, √λ₁−√λ₂−√λ₃−√λ₄}`.
///
/// The `λ_i` are the eigenvalues of `ρ ρ̃` with `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
/// They are computed as the spectrum of the Hermitian matrix `√ρ ρ̃ √ρ`,
/// which is similar to `ρ ρ̃`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho)?;
    let yy = linalg::kron(&linalg::pauli_y(), &linalg::pauli_y());
    let tilde = &yy * rho.matrix().conjugate() * &yy;
    let sq = linalg::herm_fn(rho.matrix(), |x| x.max(0.0).sqrt());
    let r = &sq * tilde * &sq;
    let mut s: Vec<f64> = linalg::eigvalsh(&r)
        .into_iter()
        .map(|l| if l > 1e-12 { l.sqrt() } else { 0.0 })
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok((s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0))
}

/// `h((1+√(1−C²))/2)`.
pub fn eof(rho: &DensityMatrix) -> Result<f64> {
    let cc = concurrence(rho)?;
    Ok(eof_from_concurrence(cc))
}

pub fn eof_from_concurrence(cc: f64) -> f64 {
    qstate::binary_entropy(0.5 * (1.0 + (1.0 - cc * cc).max(0.0).sqrt()))
}

/// `2·max(0, −Σ negative eigenvalues of ρ^{T_B})`.
pub fn negativity(rho: &DensityMatrix, cut: &PartitionSpec) -> Result<f64> {
    let pt = qstate::partial_transpose(rho, cut)?;
    let neg: f64 = linalg::eigvalsh(&pt).into_iter().filter(|&l| l < 0.0).sum();
    Ok((-2.0 * neg).max(0.0))
}

/// Smallest eigenvalue of the partial transpose.
pub fn min_pt_eigenvalue(rho: &DensityMatrix, cut: &PartitionSpec) -> Result<f64> {
    let pt = qstate::partial_transpose(rho, cut)?;
    Ok(linalg::eigvalsh(&pt)[0])
}

/// `E_sin²` of any two-qubit state: `(1 − √(1−C²))/2`.
pub fn gme_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    let cc = concurrence(rho)?;
    Ok(gme_from_concurrence(cc))
}

pub fn gme_from_concurrence(cc: f64) -> f64 {
    0.5 * (1.0 - (1.0 - cc * cc).max(0.0).sqrt())
}

/// `E_sin²` of the `d×d` Werner state with `f = Tr(ρ·SWAP)`.
pub fn werner_gme(f: f64, d: usize) -> Result<f64> {
    precondition((-1.0..=1.0).contains(&f), "Werner parameter f must lie in [-1, 1]")?;
    precondition(d >= 2, "dimension must be at least 2")?;
    Ok(if f <= 0.0 { 0.5 * (1.0 - (1.0 - f * f).sqrt()) } else { 0.0 })
}

/// `E_sin²` of the `d×d` isotropic state with singlet fraction `F`.
pub fn isotropic_gme(big_f: f64, d: usize) -> Result<f64> {
    precondition((0.0..=1.0).contains(&big_f), "fidelity F must lie in [0, 1]")?;
    precondition(d >= 2, "dimension must be at least 2")?;
    let df = d as f64;
    if big_f <= 1.0 / df {
        return Ok(0.0);
    }
    let s = big_f.sqrt() + ((1.0 - big_f) * (df - 1.0)).sqrt();
    Ok((1.0 - s * s / df).max(0.0))
}

/// `ρ_W(f) = ((d²−fd)·1 + (fd²−d)·SWAP)/(d⁴−d²)`.
pub fn werner_state(f: f64, d: usize) -> Result<DensityMatrix> {
    precondition((-1.0..=1.0).contains(&f), "Werner parameter f must lie in [-1, 1]")?;
    precondition(d >= 2, "dimension must be at least 2")?;
    let df = d as f64;
    let den = df.powi(4) - df * df;
    let (a, b) = ((df * df - f * df) / den, (f * df * df - df) / den);
    let n = d * d;
    let mut m = CMat::identity(n, n) * c(a);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + j, j * d + i)] += c(b);
        }
    }
    DensityMatrix::new_unchecked_psd(vec![d, d], m)
}

/// `|Φ⁺⟩ = Σ_i |ii⟩/√d`.
pub fn phi_plus(d: usize) -> PureState {
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        amps[i * d + i] = c(1.0);
    }
    PureState::normalized(vec![d, d], amps).expect("phi_plus within caps")
}

/// `ρ_iso(F) = F|Φ⁺⟩⟨Φ⁺| + (1−F)/(d²−1)·(1 − |Φ⁺⟩⟨Φ⁺|)`.
pub fn isotropic_state(big_f: f64, d: usize) -> Result<DensityMatrix> {
    precondition((0.0..=1.0).contains(&big_f), "fidelity F must lie in [0, 1]")?;
    precondition(d >= 2, "dimension must be at least 2")?;
    let p = phi_plus(d).to_density();
    let n = d * d;
    let other = (1.0 - big_f) / (n as f64 - 1.0);
    let m = CMat::identity(n, n) * c(other) + p.matrix() * c(big_f - other);
    DensityMatrix::new_unchecked_psd(vec![d, d], m)
}

/// Bell states `Φ±, Ψ±` in the order Φ⁺, Φ⁻, Ψ⁺, Ψ⁻.
pub fn bell_states() -> [PureState; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mk = |a: usize, b: usize, sign: f64| {
        let mut amps = vec![C64::new(0.0, 0.0); 4];
        amps[a] = c(s);
        amps[b] = c(sign * s);
        PureState::new(vec![2, 2], amps).expect("Bell state")
    };
    [mk(0, 3, 1.0), mk(0, 3, -1.0), mk(1, 2, 1.0), mk(1, 2, -1.0)]
}

/// Two spins with `H = −J σ¹·σ²` at temperature `T` (units `k_B = 1`).
#[derive(Clone, Debug)]
pub struct ThermalWerner {
    pub rho: DensityMatrix,
    /// Singlet weight in `r|Ψ⁻⟩⟨Ψ⁻| + (1−r)/4·1`.
    pub r: f64,
    pub entangled: bool,
    /// Whether the CHSH inequality is violated (`r > 1/√2`).
    pub violates_chsh: bool,
}

pub fn thermal_werner(j: f64, t: f64) -> Result<ThermalWerner> {
    precondition(t > 0.0 && t.is_finite(), "temperature must be positive")?;
    let beta = 1.0 / t;
    // Divide through by the largest exponential to stay finite at low T.
    let (ea, eb) = (beta * j, -3.0 * beta * j);
    let m = ea.max(eb);
    let (p, q) = ((ea - m).exp(), (eb - m).exp());
    let r = (q - p) / (3.0 * p + q);
    let singlet = bell_states()[3].to_density();
    let mat = singlet.matrix() * c(r) + CMat::identity(4, 4) * c((1.0 - r) / 4.0);
    let rho = DensityMatrix::new_unchecked_psd(vec![2, 2], mat)?;
    Ok(ThermalWerner { rho, r, entangled: r > 1.0 / 3.0, violates_chsh: r > std::f64::consts::FRAC_1_SQRT_2 })
}
