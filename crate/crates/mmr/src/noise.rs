//! Single-particle noise on the mesoscopic side: projective measurement of
//! one spin along z and loss (trace-out) of one spin.
//!
//! Measurement returns the two outcome branches with probabilities and the
//! updated (N-1)-spin micro-macro state; the branch qubit amplitudes follow
//! the √(p0/(p0+p1)) weighting. Loss returns the mixed qubit-MSS density
//! matrix. Dicke-sector inputs stay in O(N)-dimensional symmetric-sector
//! bases, product inputs use a 4-dimensional Gram-orthonormalized span, and
//! only dense inputs fall back to the full 2^(N-1) partial trace.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::measures;
use crate::states::{MicroMacroState, MssPureState, StateForm};

/// Dense loss keeps the full density matrix; capped so it never exceeds
/// 2048x2048.
pub const DENSE_LOSS_MAX_SPINS: usize = 11;

/// Hermiticity and trace tolerance for density matrices.
pub const DENSITY_TOL: f64 = 1e-10;

/// Measurement outcome of a single spin along the quantization axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinOutcome {
    Up,
    Down,
}

/// One post-measurement branch. A branch with probability exactly zero
/// carries no post state and is excluded from averages.
#[derive(Clone, Debug)]
pub struct OutcomeBranch {
    pub outcome: SpinOutcome,
    pub probability: f64,
    pub post_state: Option<MicroMacroState>,
    /// 1-based index of the measured spin.
    pub measured_index: usize,
}

/// Basis in which a [`BipartiteDensity`] matrix is expressed.
#[derive(Clone, Debug, PartialEq)]
pub enum DensityBasis {
    /// Computational z-basis of the remaining spins.
    DenseComputational,
    /// Dicke states |D_{N-1,k}⟩ of the remaining spins, restricted to the
    /// listed excitation sectors.
    SymmetricSector { sectors: Vec<usize> },
    /// Orthonormal basis spanned by the two product-state remainders.
    OrthonormalizedSpan,
}

/// Mixed state of qubit ⊗ reduced MSS as a Hermitian matrix in qubit-major
/// ordering (row/column index = q·d + mss index).
#[derive(Clone, Debug)]
pub struct BipartiteDensity {
    mss_dim: usize,
    matrix: DMatrix<C64>,
    basis: DensityBasis,
}

impl BipartiteDensity {
    /// Validates Hermiticity and unit trace within [`DENSITY_TOL`].
    pub fn new(matrix: DMatrix<C64>, mss_dim: usize, basis: DensityBasis) -> Result<Self> {
        let dim = 2 * mss_dim;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::domain(format!("density matrix must be {dim}x{dim}")));
        }
        let mut herm_dev = 0.0f64;
        for i in 0..dim {
            for j in i..dim {
                herm_dev = herm_dev.max((matrix[(i, j)] - matrix[(j, i)].conj()).norm());
            }
        }
        if herm_dev > DENSITY_TOL {
            return Err(Error::domain(format!(
                "density matrix not Hermitian: max deviation {herm_dev:e}"
            )));
        }
        let trace: C64 = (0..dim).map(|i| matrix[(i, i)]).sum();
        if (trace.re - 1.0).abs() > DENSITY_TOL || trace.im.abs() > DENSITY_TOL {
            return Err(Error::domain(format!(
                "density matrix trace {trace} is not 1"
            )));
        }
        Ok(Self {
            mss_dim,
            matrix,
            basis,
        })
    }

    pub fn qubit_dim(&self) -> usize {
        2
    }

    pub fn mss_dim(&self) -> usize {
        self.mss_dim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn basis(&self) -> &DensityBasis {
        &self.basis
    }

    pub fn trace(&self) -> f64 {
        (0..2 * self.mss_dim).map(|i| self.matrix[(i, i)].re).sum()
    }

    /// Trace over the MSS side, leaving the qubit's 2x2 state.
    pub fn qubit_reduced(&self) -> [[C64; 2]; 2] {
        let d = self.mss_dim;
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for (q, row) in out.iter_mut().enumerate() {
            for (qq, el) in row.iter_mut().enumerate() {
                *el = (0..d).map(|i| self.matrix[(q * d + i, qq * d + i)]).sum();
            }
        }
        out
    }

    /// Smallest eigenvalue, for positivity checks.
    pub fn min_eigenvalue(&self) -> f64 {
        crate::math::hermitian_eigenvalues(&self.matrix)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Probability of `outcome` on spin `j` together with the post-outcome MSS
/// component on n-1 spins. `None` means the component does not exist because
/// the probability is exactly zero.
fn branch_component(
    psi: &MssPureState,
    j: usize,
    outcome: SpinOutcome,
) -> Result<(f64, Option<MssPureState>)> {
    let n = psi.n();
    let up = psi.spin_up_probability(j)?;
    let p = match outcome {
        SpinOutcome::Up => up,
        SpinOutcome::Down => 1.0 - up,
    };
    if p == 0.0 {
        return Ok((0.0, None));
    }
    let state = match psi.form() {
        StateForm::Dicke { k } => match outcome {
            // |D_{n,k}⟩ = √(k/n)|↑⟩|D_{n-1,k-1}⟩ + √((n-k)/n)|↓⟩|D_{n-1,k}⟩
            SpinOutcome::Up => MssPureState::dicke(n - 1, k - 1)?,
            SpinOutcome::Down => MssPureState::dicke(n - 1, *k)?,
        },
        StateForm::DickeSuperposition { coeffs } => {
            let nf = n as f64;
            let mut out = vec![C64::new(0.0, 0.0); n];
            for (k, c) in coeffs.iter().enumerate() {
                match outcome {
                    SpinOutcome::Up if k >= 1 => {
                        out[k - 1] += c * (k as f64 / nf).sqrt();
                    }
                    SpinOutcome::Down if k < n => {
                        out[k] += c * ((nf - k as f64) / nf).sqrt();
                    }
                    _ => {}
                }
            }
            let norm = out.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            for x in &mut out {
                *x /= norm;
            }
            MssPureState::dicke_superposition(n - 1, out)?
        }
        // Removing one spin from a product leaves the same product on the rest,
        // whatever the outcome.
        StateForm::Product { thetas } => {
            let rest: Vec<f64> = thetas
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != j - 1)
                .map(|(_, t)| *t)
                .collect();
            MssPureState::product(rest)?
        }
        StateForm::Dense { amplitudes } => {
            let bit = n - j;
            let want = matches!(outcome, SpinOutcome::Up) as usize;
            let mut out = vec![C64::new(0.0, 0.0); 1 << (n - 1)];
            for (i, a) in amplitudes.iter().enumerate() {
                if (i >> bit) & 1 == want {
                    let lo = i & ((1 << bit) - 1);
                    let hi = i >> (bit + 1);
                    out[(hi << bit) | lo] = *a;
                }
            }
            let norm = out.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            for x in &mut out {
                *x /= norm;
            }
            MssPureState::dense(n - 1, out)?
        }
    };
    Ok((p, Some(state)))
}

/// Measure spin `j` (1-based) along z and return the ↑ and ↓ branches.
pub fn measure_spin(s: &MicroMacroState, j: usize) -> Result<[OutcomeBranch; 2]> {
    let n = s.n();
    if n < 2 {
        return Err(Error::domain(
            "measurement needs at least 2 spins to leave a residual MSS",
        ));
    }
    if j == 0 || j > n {
        return Err(Error::domain(format!(
            "spin index {j} out of range 1..={n}"
        )));
    }
    let [a0, a1] = s.qubit_amplitudes();
    let mut branches = Vec::with_capacity(2);
    for outcome in [SpinOutcome::Up, SpinOutcome::Down] {
        let (p0, c0) = branch_component(s.psi0(), j, outcome)?;
        let (p1, c1) = branch_component(s.psi1(), j, outcome)?;
        let probability = a0.norm_sqr() * p0 + a1.norm_sqr() * p1;
        if probability == 0.0 {
            branches.push(OutcomeBranch {
                outcome,
                probability: 0.0,
                post_state: None,
                measured_index: j,
            });
            continue;
        }
        let b0 = a0 * (p0 / probability).sqrt();
        let b1 = a1 * (p1 / probability).sqrt();
        // A component with zero weight may not exist (e.g. k = 0 measured ↑);
        // stand in the other component, which the zero amplitude never sees.
        let (psi0, psi1) = match (c0, c1) {
            (Some(x), Some(y)) => (x, y),
            (Some(x), None) => (x.clone(), x),
            (None, Some(y)) => (y.clone(), y),
            (None, None) => unreachable!("probability > 0 requires a component"),
        };
        let post = MicroMacroState::with_amplitudes(psi0, psi1, b0, b1)?
            .with_orthogonality_tol(s.orthogonality_tol())?;
        branches.push(OutcomeBranch {
            outcome,
            probability,
            post_state: Some(post),
            measured_index: j,
        });
    }
    Ok([branches.remove(0), branches.remove(0)])
}

/// Mean entanglement entropy that survives measuring one spin, averaged
/// uniformly over the measured spin and over outcomes:
/// (1/N) Σ_j Σ_outcome P·E_V(branch). Zero-probability branches contribute
/// nothing.
pub fn average_entropy_after_measurement(s: &MicroMacroState) -> Result<f64> {
    let n = s.n();
    let mut total = 0.0;
    for j in 1..=n {
        for branch in measure_spin(s, j)? {
            if branch.probability > 0.0 {
                let post = branch
                    .post_state
                    .as_ref()
                    .expect("positive-probability branch");
                total += branch.probability * measures::entanglement_entropy(post)?.bits;
            }
        }
    }
    Ok(total / n as f64)
}

/// Trace out spin `j` (1-based), returning the qubit ⊗ (N-1)-spin density
/// matrix in the most compact basis the input forms allow.
pub fn lose_spin(s: &MicroMacroState, j: usize) -> Result<BipartiteDensity> {
    let n = s.n();
    if n < 2 {
        return Err(Error::domain(
            "loss needs at least 2 spins to leave a residual MSS",
        ));
    }
    if j == 0 || j > n {
        return Err(Error::domain(format!(
            "spin index {j} out of range 1..={n}"
        )));
    }
    match (s.psi0().form(), s.psi1().form()) {
        (StateForm::Product { .. }, StateForm::Product { .. }) => lose_spin_product(s, j),
        _ => {
            let c0 = s.psi0().sector_coefficients();
            let c1 = s.psi1().sector_coefficients();
            match (c0, c1) {
                (Some(c0), Some(c1)) => lose_spin_sector(s, &c0, &c1),
                _ => lose_spin_dense(s, j),
            }
        }
    }
}

/// Product pair: the post-loss state lives in the 4-dimensional span of
/// {|0⟩|S0'⟩, |1⟩|S1'⟩}; Gram orthonormalization of the two remainders
/// gives an exact small-matrix density at any N.
fn lose_spin_product(s: &MicroMacroState, j: usize) -> Result<BipartiteDensity> {
    let (t0, t1) = match (s.psi0().form(), s.psi1().form()) {
        (StateForm::Product { thetas: t0 }, StateForm::Product { thetas: t1 }) => (t0, t1),
        _ => unreachable!("caller dispatches product forms only"),
    };
    let [a0, a1] = s.qubit_amplitudes();
    // overlap of the remainders after dropping spin j
    let g: f64 = t0
        .iter()
        .zip(t1)
        .enumerate()
        .filter(|(i, _)| *i != j - 1)
        .map(|(_, (x, y))| (x - y).cos())
        .product();
    let h = (1.0 - g * g).max(0.0).sqrt();
    let mss_dim = if h * h < 1e-28 { 1 } else { 2 };
    let dim = 2 * mss_dim;
    let mut rho = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for outcome in [SpinOutcome::Up, SpinOutcome::Down] {
        let amp = |t: f64| match outcome {
            SpinOutcome::Up => t.cos(),
            SpinOutcome::Down => t.sin(),
        };
        // |S1'⟩ = g|e0⟩ + h|e1⟩ in the orthonormalized span
        let mut w = vec![C64::new(0.0, 0.0); dim];
        w[0] = a0 * amp(t0[j - 1]);
        w[mss_dim] = a1 * amp(t1[j - 1]) * g;
        if mss_dim == 2 {
            w[mss_dim + 1] = a1 * amp(t1[j - 1]) * h;
        }
        for r in 0..dim {
            for c in 0..dim {
                rho[(r, c)] += w[r] * w[c].conj();
            }
        }
    }
    BipartiteDensity::new(rho, mss_dim, DensityBasis::OrthonormalizedSpan)
}

/// Symmetric-sector loss: branch each Dicke component of ψ0 and ψ1 over the
/// traced spin and accumulate the two conditional vectors in the sector
/// basis of the remaining N-1 spins.
fn lose_spin_sector(s: &MicroMacroState, c0: &[C64], c1: &[C64]) -> Result<BipartiteDensity> {
    let n = s.n();
    let nf = n as f64;
    let [a0, a1] = s.qubit_amplitudes();
    // conditional (unnormalized) vectors over (qubit, sector 0..n-1)
    let zero = C64::new(0.0, 0.0);
    let mut w_up = vec![[zero; 2]; n];
    let mut w_down = vec![[zero; 2]; n];
    for (q, (amp, coeffs)) in [(a0, c0), (a1, c1)].into_iter().enumerate() {
        for (k, c) in coeffs.iter().enumerate() {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            if k >= 1 {
                w_up[k - 1][q] += amp * c * (k as f64 / nf).sqrt();
            }
            if k < n {
                w_down[k][q] += amp * c * ((nf - k as f64) / nf).sqrt();
            }
        }
    }
    let sectors: Vec<usize> = (0..n)
        .filter(|&k| {
            w_up[k][0].norm_sqr() + w_up[k][1].norm_sqr() > 0.0
                || w_down[k][0].norm_sqr() + w_down[k][1].norm_sqr() > 0.0
        })
        .collect();
    let d = sectors.len();
    let mut rho = DMatrix::from_element(2 * d, 2 * d, zero);
    for w in [&w_up, &w_down] {
        let mut vec = vec![zero; 2 * d];
        for q in 0..2 {
            for (i, &k) in sectors.iter().enumerate() {
                vec[q * d + i] = w[k][q];
            }
        }
        for r in 0..2 * d {
            for c in 0..2 * d {
                rho[(r, c)] += vec[r] * vec[c].conj();
            }
        }
    }
    BipartiteDensity::new(rho, d, DensityBasis::SymmetricSector { sectors })
}

/// Fallback: dense partial trace over spin j.
fn lose_spin_dense(s: &MicroMacroState, j: usize) -> Result<BipartiteDensity> {
    let n = s.n();
    if n > DENSE_LOSS_MAX_SPINS {
        return Err(Error::resource(format!(
            "dense loss capped at {DENSE_LOSS_MAX_SPINS} spins, state has {n}"
        )));
    }
    let joint = crate::oracle::dense_joint(s)?;
    let rho = joint.trace_out_spin(j)?;
    BipartiteDensity::new(rho, 1 << (n - 1), DensityBasis::DenseComputational)
}
