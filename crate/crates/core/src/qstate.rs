//! State containers, tensor-space operations and the QST text format.
//!
//! Basis indices are row-major in the party digits: for dims `(d₀,…,d_{n−1})`
//! the index of `(p₀,…,p_{n−1})` is `Σ p_i·Π_{j>i} d_j`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{precondition, Error, Result};
use crate::linalg::{self, c, CMat};
use crate::C64;

/// Largest pure-state register as log₂ of the total dimension. Sixteen
/// rather than fourteen so that the six-party determinant state (6⁶ amplitudes)
/// fits; every qubit use in the crate stays at or below fourteen.
pub const MAX_PURE_QUBITS: u32 = 16;
/// Largest density-matrix register, counted in qubits.
pub const MAX_MIXED_QUBITS: u32 = 12;
/// Eigenvalues at or below this count as zero.
pub const EIG_CUTOFF: f64 = 1e-12;

const NORM_TOL: f64 = 1e-10;

fn check_dims(dims: &[usize], cap_qubits: u32) -> Result<usize> {
    precondition(!dims.is_empty(), "at least one party is required")?;
    precondition(dims.iter().all(|&d| d >= 2), "every local dimension must be at least 2")?;
    let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
    match total {
        Some(t) if t <= 1usize << cap_qubits => Ok(t),
        _ => Err(Error::Precondition(format!(
            "total dimension exceeds the dense cap of 2^{cap_qubits}"
        ))),
    }
}

/// Mixed-radix digits of `idx`.
pub fn digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (k, &d) in dims.iter().enumerate().rev() {
        out[k] = idx % d;
        idx /= d;
    }
    out
}

/// Inverse of [`digits`].
pub fn flat_index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&p, &d)| acc * d + p)
}

/// A normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: Vec<C64>,
}

impl PureState {
    /// Wraps amplitudes that must already be normalized within 1e-10.
    pub fn new(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        let total = check_dims(&dims, MAX_PURE_QUBITS)?;
        if amps.len() != total {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for total dimension {total}",
                amps.len()
            )));
        }
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {n2} is not 1")));
        }
        Ok(Self { dims, amps })
    }

    /// Normalizes the amplitudes first. Fails only on a zero vector.
    pub fn normalized(dims: Vec<usize>, mut amps: Vec<C64>) -> Result<Self> {
        let n = linalg::norm(&amps);
        if n < 1e-300 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= n);
        Self::new(dims, amps)
    }

    /// Computational basis state `|p₀ p₁ …⟩`.
    pub fn basis(dims: Vec<usize>, digits: &[usize]) -> Result<Self> {
        let total = check_dims(&dims, MAX_PURE_QUBITS)?;
        precondition(
            digits.len() == dims.len() && digits.iter().zip(&dims).all(|(p, d)| p < d),
            "basis digits out of range",
        )?;
        let mut amps = vec![C64::new(0.0, 0.0); total];
        amps[flat_index(digits, &dims)] = c(1.0);
        Ok(Self { dims, amps })
    }

    /// Real-amplitude superposition over listed basis digit strings.
    pub fn from_terms(dims: Vec<usize>, terms: &[(&[usize], C64)]) -> Result<Self> {
        let total = check_dims(&dims, MAX_PURE_QUBITS)?;
        let mut amps = vec![C64::new(0.0, 0.0); total];
        for (d, a) in terms {
            precondition(d.len() == dims.len(), "term has the wrong number of digits")?;
            amps[flat_index(d, &dims)] += *a;
        }
        Self::normalized(dims, amps)
    }

    /// n-qubit GHZ state `(|0…0⟩ + |1…1⟩)/√2`.
    pub fn ghz(n: usize) -> Self {
        let zeros = vec![0; n];
        let ones = vec![1; n];
        Self::from_terms(vec![2; n], &[(&zeros, c(1.0)), (&ones, c(1.0))]).expect("valid GHZ size")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amp(&self, digits: &[usize]) -> C64 {
        self.amps[flat_index(digits, &self.dims)]
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            dims: self.dims.clone(),
            mat: linalg::outer(&self.amps, &self.amps),
        }
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        linalg::inner(&self.amps, &other.amps)
    }

    /// Applies a unitary (or any operator) to one party and renormalizes.
    pub fn apply_local(&self, party: usize, op: &CMat) -> Result<Self> {
        let d = self.dims[party];
        precondition(op.nrows() == d && op.ncols() == d, "local operator has the wrong size")?;
        let inner: usize = self.dims[party + 1..].iter().product();
        let outer = self.dim() / (d * inner);
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for o in 0..outer {
            for i in 0..inner {
                for a in 0..d {
                    let mut s = C64::new(0.0, 0.0);
                    for b in 0..d {
                        s += op[(a, b)] * self.amps[(o * d + b) * inner + i];
                    }
                    out[(o * d + a) * inner + i] = s;
                }
            }
        }
        Self::normalized(self.dims.clone(), out)
    }

    /// Moves party `perm[k]` of `self` into slot `k` of the result.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n_parties();
        let seen: BTreeSet<usize> = perm.iter().copied().collect();
        precondition(perm.len() == n && seen.len() == n && seen.iter().all(|&p| p < n), "not a permutation")?;
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (idx, a) in self.amps.iter().enumerate() {
            let d = digits(idx, &self.dims);
            let nd: Vec<usize> = perm.iter().map(|&p| d[p]).collect();
            out[flat_index(&nd, &new_dims)] = *a;
        }
        Ok(Self { dims: new_dims, amps: out })
    }
}

/// A density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    mat: CMat,
}

impl DensityMatrix {
    /// Validates and hermitizes. Inputs further than 1e-10 from Hermitian,
    /// off unit trace by more than 1e-10, or with an eigenvalue below −1e-9
    /// are rejected.
    pub fn new(dims: Vec<usize>, mat: CMat) -> Result<Self> {
        let rho = Self::new_unchecked_psd(dims, mat)?;
        let min = linalg::eigvalsh(&rho.mat)[0];
        if min < -1e-9 {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(rho)
    }

    /// Same checks as [`DensityMatrix::new`] except positivity. Used for
    /// matrices that are positive by construction.
    pub fn new_unchecked_psd(dims: Vec<usize>, mat: CMat) -> Result<Self> {
        let total = check_dims(&dims, MAX_MIXED_QUBITS)?;
        if mat.nrows() != total || mat.ncols() != total {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for total dimension {total}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let defect = linalg::hermiticity_defect(&mat);
        if defect > NORM_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect:e})")));
        }
        let tr = linalg::trace(&mat).re;
        if (tr - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        Ok(Self { dims, mat: linalg::hermitize(&mat) })
    }

    /// Convex mixture `Σ p_i |ψ_i⟩⟨ψ_i|`.
    pub fn mixture(terms: &[(f64, &PureState)]) -> Result<Self> {
        precondition(!terms.is_empty(), "empty mixture")?;
        let dims = terms[0].1.dims().to_vec();
        let d = terms[0].1.dim();
        let mut mat = CMat::zeros(d, d);
        for (p, psi) in terms {
            if psi.dims() != dims.as_slice() {
                return Err(Error::DimensionMismatch("mixture components differ in dims".into()));
            }
            precondition(*p >= 0.0, "negative mixture weight")?;
            mat += linalg::outer(psi.amps(), psi.amps()) * c(*p);
        }
        Self::new_unchecked_psd(dims, mat)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let total = check_dims(&dims, MAX_MIXED_QUBITS)?;
        Self::new_unchecked_psd(dims, CMat::identity(total, total) * c(1.0 / total as f64))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.mat)
    }

    /// Number of eigenvalues above the support cutoff.
    pub fn rank(&self) -> usize {
        self.eigenvalues().iter().filter(|&&l| l > EIG_CUTOFF).count()
    }

    pub fn expectation(&self, op: &CMat) -> C64 {
        linalg::trace_product(&self.mat, op)
    }
}

/// One unit vector per party.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductState {
    locals: Vec<Vec<C64>>,
}

impl ProductState {
    pub fn new(locals: Vec<Vec<C64>>) -> Result<Self> {
        precondition(!locals.is_empty(), "product state needs at least one party")?;
        for v in &locals {
            precondition(v.len() >= 2, "local dimension must be at least 2")?;
            let n = linalg::norm(v);
            if (n - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidState(format!("local vector norm {n} is not 1")));
            }
        }
        Ok(Self { locals })
    }

    pub(crate) fn from_locals_unchecked(locals: Vec<Vec<C64>>) -> Self {
        Self { locals }
    }

    pub fn locals(&self) -> &[Vec<C64>] {
        &self.locals
    }

    pub fn dims(&self) -> Vec<usize> {
        self.locals.iter().map(Vec::len).collect()
    }

    pub fn to_pure(&self) -> PureState {
        let mut amps = vec![c(1.0)];
        for v in &self.locals {
            amps = amps.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
        }
        PureState { dims: self.dims(), amps }
    }

    /// `⟨φ|ψ⟩`.
    pub fn overlap(&self, psi: &PureState) -> C64 {
        linalg::inner(&self.to_pure().amps, psi.amps())
    }
}

/// A bipartite cut of the parties.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSpec {
    group_a: Vec<usize>,
    group_b: Vec<usize>,
}

impl PartitionSpec {
    /// Cut with `group_a` on one side and the remaining parties on the other.
    pub fn new(group_a: &[usize], n_parties: usize) -> Result<Self> {
        let a: BTreeSet<usize> = group_a.iter().copied().collect();
        precondition(a.len() == group_a.len(), "repeated party in cut")?;
        precondition(a.iter().all(|&p| p < n_parties), "party index out of range in cut")?;
        precondition(!a.is_empty() && a.len() < n_parties, "both sides of a cut must be nonempty")?;
        let b = (0..n_parties).filter(|p| !a.contains(p)).collect();
        Ok(Self { group_a: a.into_iter().collect(), group_b: b })
    }

    /// Parses `a1,a2:rest` or `a1,a2:b1,b2` with 0-based party indices.
    pub fn parse(spec: &str, n_parties: usize) -> Result<Self> {
        let (lhs, rhs) = spec
            .split_once(':')
            .ok_or_else(|| Error::Precondition(format!("cut '{spec}' lacks ':'")))?;
        let parse_list = |s: &str| -> Result<Vec<usize>> {
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Precondition(format!("bad party index '{t}'")))
                })
                .collect()
        };
        let a = parse_list(lhs)?;
        let cut = Self::new(&a, n_parties)?;
        if rhs.trim() != "rest" {
            let mut b = parse_list(rhs)?;
            b.sort_unstable();
            precondition(b == cut.group_b, "the two sides of the cut must cover every party once")?;
        }
        Ok(cut)
    }

    /// The cut separating party `k` from the rest.
    pub fn single(k: usize, n_parties: usize) -> Result<Self> {
        Self::new(&[k], n_parties)
    }

    pub fn group_a(&self) -> &[usize] {
        &self.group_a
    }

    pub fn group_b(&self) -> &[usize] {
        &self.group_b
    }

    pub fn n_parties(&self) -> usize {
        self.group_a.len() + self.group_b.len()
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.n_parties() != n {
            return Err(Error::DimensionMismatch(format!(
                "cut covers {} parties, state has {n}",
                self.n_parties()
            )));
        }
        Ok(())
    }
}

/// `|a⟩ ⊗ |b⟩`.
pub fn tensor_product(a: &PureState, b: &PureState) -> Result<PureState> {
    let dims: Vec<usize> = a.dims.iter().chain(&b.dims).copied().collect();
    let amps = a.amps.iter().flat_map(|x| b.amps.iter().map(move |y| x * y)).collect();
    PureState::normalized(dims, amps)
}

/// `ρ_a ⊗ ρ_b`.
pub fn tensor_product_mixed(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    let dims: Vec<usize> = a.dims.iter().chain(&b.dims).copied().collect();
    DensityMatrix::new_unchecked_psd(dims, linalg::kron(&a.mat, &b.mat))
}

/// Splits every basis index into (a-part, b-part) sub-indices for a party
/// grouping. Returns `table[ia][ib] = full index`.
fn split_table(dims: &[usize], a: &[usize], b: &[usize]) -> (Vec<usize>, Vec<usize>, Vec<Vec<usize>>) {
    let da: Vec<usize> = a.iter().map(|&p| dims[p]).collect();
    let db: Vec<usize> = b.iter().map(|&p| dims[p]).collect();
    let (na, nb) = (da.iter().product::<usize>(), db.iter().product::<usize>());
    let mut table = vec![vec![0usize; nb]; na];
    let mut full = vec![0usize; dims.len()];
    for (ia, row) in table.iter_mut().enumerate() {
        let xa = digits(ia, &da);
        for (ib, slot) in row.iter_mut().enumerate() {
            let xb = digits(ib, &db);
            for (k, &p) in a.iter().enumerate() {
                full[p] = xa[k];
            }
            for (k, &p) in b.iter().enumerate() {
                full[p] = xb[k];
            }
            *slot = flat_index(&full, dims);
        }
    }
    (da, db, table)
}

/// Reduced state on the parties in `keep` (kept in ascending order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_parties();
    let k: BTreeSet<usize> = keep.iter().copied().collect();
    precondition(!k.is_empty(), "keep set must be nonempty")?;
    precondition(k.len() == keep.len() && k.iter().all(|&p| p < n), "invalid keep set")?;
    let a: Vec<usize> = k.into_iter().collect();
    let b: Vec<usize> = (0..n).filter(|p| !a.contains(p)).collect();
    let (da, _, table) = split_table(&rho.dims, &a, &b);
    let na = table.len();
    let out = CMat::from_fn(na, na, |i, j| {
        table[i].iter().zip(&table[j]).map(|(&x, &y)| rho.mat[(x, y)]).sum()
    });
    DensityMatrix::new_unchecked_psd(da, out)
}

/// Reduced state of a pure state on `keep`, computed without the full
/// density matrix.
pub fn reduced_from_pure(psi: &PureState, keep: &[usize]) -> Result<DensityMatrix> {
    let n = psi.n_parties();
    let k: BTreeSet<usize> = keep.iter().copied().collect();
    precondition(!k.is_empty(), "keep set must be nonempty")?;
    precondition(k.len() == keep.len() && k.iter().all(|&p| p < n), "invalid keep set")?;
    let a: Vec<usize> = k.into_iter().collect();
    let b: Vec<usize> = (0..n).filter(|p| !a.contains(p)).collect();
    let m = coefficient_matrix(psi, &a, &b);
    let out = &m * m.adjoint();
    let da = a.iter().map(|&p| psi.dims[p]).collect();
    DensityMatrix::new_unchecked_psd(da, out)
}

/// `ψ` reshaped as a matrix with rows indexed by parties `a`, columns by `b`.
pub(crate) fn coefficient_matrix(psi: &PureState, a: &[usize], b: &[usize]) -> CMat {
    let (_, _, table) = split_table(&psi.dims, a, b);
    let (na, nb) = (table.len(), table[0].len());
    CMat::from_fn(na, nb, |i, j| psi.amps[table[i][j]])
}

/// Transposes the indices of `cut.group_b`.
pub fn partial_transpose(rho: &DensityMatrix, cut: &PartitionSpec) -> Result<CMat> {
    cut.check(rho.n_parties())?;
    let (_, _, table) = split_table(&rho.dims, &cut.group_a, &cut.group_b);
    let (na, nb) = (table.len(), table[0].len());
    let d = rho.dim();
    let mut out = CMat::zeros(d, d);
    for ia in 0..na {
        for ib in 0..nb {
            let row = table[ia][ib];
            for ja in 0..na {
                for jb in 0..nb {
                    out[(table[ia][jb], table[ja][ib])] = rho.mat[(row, table[ja][jb])];
                }
            }
        }
    }
    Ok(out)
}

fn xlog2x(l: f64) -> f64 {
    if l > EIG_CUTOFF {
        -l * l.log2()
    } else {
        0.0
    }
}

/// `−Tr ρ log₂ ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues().into_iter().map(xlog2x).sum::<f64>().max(0.0)
}

/// Shannon entropy of a probability vector, in bits.
pub fn shannon(p: &[f64]) -> f64 {
    p.iter().copied().map(xlog2x).sum()
}

/// Binary entropy `h(x)`.
pub fn binary_entropy(x: f64) -> f64 {
    shannon(&[x, 1.0 - x])
}

/// `S(ρ‖σ) = Tr ρ log₂ ρ − Tr ρ log₂ σ`, `+∞` when the support of ρ is not
/// inside the support of σ.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dims != sigma.dims {
        return Err(Error::DimensionMismatch("relative entropy of states on different spaces".into()));
    }
    Ok(relative_entropy_raw(&rho.mat, &sigma.mat))
}

pub(crate) fn relative_entropy_raw(rho: &CMat, sigma: &CMat) -> f64 {
    let neg_s: f64 = linalg::eigvalsh(rho).into_iter().map(|l| -xlog2x(l)).sum();
    let (mu, v) = linalg::eigh(sigma);
    let rv = rho * &v;
    let mut cross = 0.0;
    for (k, &m) in mu.iter().enumerate() {
        let w: f64 = (0..v.nrows()).map(|i| (v[(i, k)].conj() * rv[(i, k)]).re).sum();
        if m > EIG_CUTOFF {
            cross += w * m.log2();
        } else if w > EIG_CUTOFF {
            return f64::INFINITY;
        }
    }
    (neg_s - cross).max(0.0)
}

/// Uhlmann fidelity `(Tr √(√σ ρ √σ))²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dims != sigma.dims {
        return Err(Error::DimensionMismatch("fidelity of states on different spaces".into()));
    }
    let sq = linalg::herm_fn(&sigma.mat, |x| x.max(0.0).sqrt());
    let m = &sq * &rho.mat * &sq;
    let t: f64 = linalg::eigvalsh(&m).into_iter().map(|x| x.max(0.0).sqrt()).sum();
    Ok((t * t).min(1.0))
}

/// A state read from a QST file.
#[derive(Clone, Debug)]
pub enum QstState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl QstState {
    pub fn to_density(&self) -> DensityMatrix {
        match self {
            QstState::Pure(p) => p.to_density(),
            QstState::Mixed(m) => m.clone(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        match self {
            QstState::Pure(p) => p.dims(),
            QstState::Mixed(m) => m.dims(),
        }
    }
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Parses QST text format v1.
pub fn parse_qst(text: &str) -> Result<QstState> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (ln, kind) = lines.next().ok_or_else(|| perr(1, "empty file"))?;
    let mixed = match kind {
        "pure" => false,
        "mixed" => true,
        other => return Err(perr(ln, format!("expected 'pure' or 'mixed', found '{other}'"))),
    };
    let (ln, dim_line) = lines.next().ok_or_else(|| perr(ln + 1, "missing dimension line"))?;
    let dims: Vec<usize> = dim_line
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| perr(ln, format!("bad dimension '{t}'"))))
        .collect::<Result<_>>()?;
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(perr(ln, "dimensions must be integers >= 2"));
    }
    let cap = if mixed { MAX_MIXED_QUBITS } else { MAX_PURE_QUBITS };
    let total = check_dims(&dims, cap).map_err(|e| perr(ln, e.to_string()))?;
    let n = dims.len();
    let n_idx = if mixed { 2 * n } else { n };
    let mut amps = vec![C64::new(0.0, 0.0); if mixed { total * total } else { total }];
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != n_idx + 2 {
            return Err(perr(ln, format!("expected {} fields, found {}", n_idx + 2, toks.len())));
        }
        let mut idx = Vec::with_capacity(n_idx);
        for (k, t) in toks[..n_idx].iter().enumerate() {
            let v: usize = t.parse().map_err(|_| perr(ln, format!("bad index '{t}'")))?;
            if v >= dims[k % n] {
                return Err(perr(ln, format!("index {v} out of range for dimension {}", dims[k % n])));
            }
            idx.push(v);
        }
        let re: f64 = toks[n_idx].parse().map_err(|_| perr(ln, "bad real part"))?;
        let im: f64 = toks[n_idx + 1].parse().map_err(|_| perr(ln, "bad imaginary part"))?;
        if !re.is_finite() || !im.is_finite() {
            return Err(perr(ln, "non-finite entry"));
        }
        let pos = if mixed {
            flat_index(&idx[..n], &dims) * total + flat_index(&idx[n..], &dims)
        } else {
            flat_index(&idx, &dims)
        };
        amps[pos] = C64::new(re, im);
    }
    if mixed {
        let mat = CMat::from_row_slice(total, total, &amps);
        let tr = linalg::trace(&mat);
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
            return Err(perr(0, format!("trace {tr} is not 1 within 1e-8")));
        }
        if linalg::hermiticity_defect(&mat) > 1e-8 {
            return Err(perr(0, "matrix is not Hermitian within 1e-8"));
        }
        let mat = linalg::hermitize(&mat) / c(tr.re);
        DensityMatrix::new(dims, mat).map(QstState::Mixed).map_err(|e| perr(0, e.to_string()))
    } else {
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (n2 - 1.0).abs() > 1e-8 {
            return Err(perr(0, format!("squared norm {n2} is not 1 within 1e-8")));
        }
        PureState::normalized(dims, amps).map(QstState::Pure).map_err(|e| perr(0, e.to_string()))
    }
}

/// Writes QST text format v1, skipping zero entries. Floats use the shortest
/// round-trip representation.
pub fn format_qst(state: &QstState) -> String {
    let mut out = String::new();
    let dims = state.dims().to_vec();
    let dim_line = dims.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    let join = |d: &[usize]| d.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    match state {
        QstState::Pure(p) => {
            let _ = writeln!(out, "pure\n{dim_line}");
            for (i, a) in p.amps().iter().enumerate() {
                if a.norm_sqr() > 0.0 {
                    let _ = writeln!(out, "{} {:?} {:?}", join(&digits(i, &dims)), a.re, a.im);
                }
            }
        }
        QstState::Mixed(m) => {
            let _ = writeln!(out, "mixed\n{dim_line}");
            let d = m.dim();
            for i in 0..d {
                for j in 0..d {
                    let a = m.matrix()[(i, j)];
                    if a.norm_sqr() > 0.0 {
                        let _ = writeln!(
                            out,
                            "{} {} {:?} {:?}",
                            join(&digits(i, &dims)),
                            join(&digits(j, &dims)),
                            a.re,
                            a.im
                        );
                    }
                }
            }
        }
    }
    out
}
