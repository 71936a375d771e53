//! Mesoscopic spin states and micro-macro entangled states.
//!
//! The mesoscopic spin system (MSS) is a register of `n` two-level spins
//! with a fixed quantization axis z. Collective magnetization Jz uses
//! per-spin eigenvalues ±1/2, so ⟨Jz⟩ ranges over [-n/2, n/2].
//!
//! Dense vectors use the computational z-basis with spin 1 as the most
//! significant bit and ↑ encoded as a set bit. Structured forms (Dicke,
//! Dicke superpositions, products) carry no size cap; dense expansion is
//! capped at [`DENSE_MAX_SPINS`] spins.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::math::{binomial_f64, ln_binomial, ln_binomial_table};

/// Hard cap on dense expansion (2^24 amplitudes).
pub const DENSE_MAX_SPINS: usize = 24;

/// Normalization tolerance for constructed states and qubit amplitudes.
pub const NORM_TOL: f64 = 1e-12;

/// Two magnetization spectra count as disjoint when Σ_m P0(m)·P1(m) stays
/// at or below this threshold.
pub const SPECTRUM_DISJOINT_TOL: f64 = 1e-12;

/// Default tolerance under which ⟨ψ0|ψ1⟩ is treated as zero by consumers
/// whose contracts assume orthogonality.
pub const DEFAULT_ORTHOGONALITY_TOL: f64 = 1e-8;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Representation of a pure MSS state.
#[derive(Clone, Debug, PartialEq)]
pub enum StateForm {
    /// Equal-amplitude symmetric superposition of all basis states with
    /// exactly `k` up spins.
    Dicke { k: usize },
    /// Σ_k coeffs\[k\]·|D_{n,k}⟩ with `n + 1` complex coefficients.
    DickeSuperposition { coeffs: Vec<C64> },
    /// ⊗_j (cos θ_j |↑⟩ + sin θ_j |↓⟩), one angle per spin.
    Product { thetas: Vec<f64> },
    /// Amplitudes over the computational z-basis, length 2^n.
    Dense { amplitudes: Vec<C64> },
}

/// A normalized pure state of `n` spins in one of four representations.
#[derive(Clone, Debug, PartialEq)]
pub struct MssPureState {
    n: usize,
    form: StateForm,
}

impl MssPureState {
    /// Dicke state |D_{n,k}⟩ with `k` up spins.
    pub fn dicke(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("spin count must be at least 1"));
        }
        if k > n {
            return Err(Error::domain(format!(
                "Dicke excitation count k = {k} out of range 0..={n}"
            )));
        }
        Ok(Self {
            n,
            form: StateForm::Dicke { k },
        })
    }

    /// Superposition Σ_k coeffs\[k\]·|D_{n,k}⟩; coefficients must be
    /// normalized within [`NORM_TOL`].
    pub fn dicke_superposition(n: usize, coeffs: Vec<C64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("spin count must be at least 1"));
        }
        if coeffs.len() != n + 1 {
            return Err(Error::domain(format!(
                "expected {} Dicke coefficients, got {}",
                n + 1,
                coeffs.len()
            )));
        }
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!(
                "Dicke coefficients not normalized: |c|^2 = {norm}"
            )));
        }
        Ok(Self {
            n,
            form: StateForm::DickeSuperposition { coeffs },
        })
    }

    /// Product state with the same angle θ on every spin.
    pub fn symmetric_product(n: usize, theta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("spin count must be at least 1"));
        }
        Self::product(vec![theta; n])
    }

    /// Product state ⊗_j (cos θ_j |↑⟩ + sin θ_j |↓⟩).
    pub fn product(thetas: Vec<f64>) -> Result<Self> {
        if thetas.is_empty() {
            return Err(Error::domain("spin count must be at least 1"));
        }
        if thetas.iter().any(|t| !t.is_finite()) {
            return Err(Error::domain("product angles must be finite"));
        }
        Ok(Self {
            n: thetas.len(),
            form: StateForm::Product { thetas },
        })
    }

    /// Dense state over the computational z-basis; must be normalized
    /// within [`NORM_TOL`].
    pub fn dense(n: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("spin count must be at least 1"));
        }
        if n > DENSE_MAX_SPINS {
            return Err(Error::resource(format!(
                "dense form capped at {DENSE_MAX_SPINS} spins, requested {n}"
            )));
        }
        if amplitudes.len() != 1usize << n {
            return Err(Error::domain(format!(
                "expected {} amplitudes for {n} spins, got {}",
                1usize << n,
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!(
                "dense state not normalized: |a|^2 = {norm}"
            )));
        }
        Ok(Self {
            n,
            form: StateForm::Dense { amplitudes },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn form(&self) -> &StateForm {
        &self.form
    }

    /// The common angle when this is a product state with identical angles.
    pub fn uniform_product_angle(&self) -> Option<f64> {
        match &self.form {
            StateForm::Product { thetas } => {
                let t0 = thetas[0];
                thetas.iter().all(|t| *t == t0).then_some(t0)
            }
            _ => None,
        }
    }

    /// Coefficients over the Dicke basis |D_{n,k}⟩, k = 0..=n, when the
    /// state lives in the symmetric sector: Dicke forms, Dicke
    /// superpositions and uniform products. Uniform products expand as
    /// c_k = √C(n,k) cos^k θ sin^{n-k} θ, evaluated in log space so the
    /// expansion stays finite for any n.
    pub fn sector_coefficients(&self) -> Option<Vec<C64>> {
        match &self.form {
            StateForm::Dicke { k } => {
                let mut c = vec![C64::new(0.0, 0.0); self.n + 1];
                c[*k] = C64::new(1.0, 0.0);
                Some(c)
            }
            StateForm::DickeSuperposition { coeffs } => Some(coeffs.clone()),
            StateForm::Product { .. } => {
                let theta = self.uniform_product_angle()?;
                Some(uniform_product_sector_coeffs(self.n, theta))
            }
            StateForm::Dense { .. } => None,
        }
    }

    /// Expand to the dense computational basis. Errors beyond
    /// [`DENSE_MAX_SPINS`].
    pub fn to_dense(&self) -> Result<Vec<C64>> {
        if self.n > DENSE_MAX_SPINS {
            return Err(Error::resource(format!(
                "dense expansion capped at {DENSE_MAX_SPINS} spins, state has {}",
                self.n
            )));
        }
        let n = self.n;
        let dim = 1usize << n;
        let mut v = vec![C64::new(0.0, 0.0); dim];
        match &self.form {
            StateForm::Dicke { k } => {
                let amp = 1.0 / binomial_f64(n, *k).sqrt();
                for (i, vi) in v.iter_mut().enumerate() {
                    if i.count_ones() as usize == *k {
                        *vi = C64::new(amp, 0.0);
                    }
                }
            }
            StateForm::DickeSuperposition { coeffs } => {
                for (i, vi) in v.iter_mut().enumerate() {
                    let k = i.count_ones() as usize;
                    *vi = coeffs[k] / binomial_f64(n, k).sqrt();
                }
            }
            StateForm::Product { thetas } => {
                for (i, vi) in v.iter_mut().enumerate() {
                    let mut amp = 1.0;
                    for (j, t) in thetas.iter().enumerate() {
                        let bit = n - 1 - j; // spin j+1 ↔ bit n-1-j
                        amp *= if (i >> bit) & 1 == 1 {
                            t.cos()
                        } else {
                            t.sin()
                        };
                    }
                    *vi = C64::new(amp, 0.0);
                }
            }
            StateForm::Dense { amplitudes } => v.copy_from_slice(amplitudes),
        }
        Ok(v)
    }

    /// Probability of measuring spin `j` (1-based) as ↑.
    pub fn spin_up_probability(&self, j: usize) -> Result<f64> {
        if j == 0 || j > self.n {
            return Err(Error::domain(format!(
                "spin index {j} out of range 1..={}",
                self.n
            )));
        }
        Ok(match &self.form {
            StateForm::Dicke { k } => *k as f64 / self.n as f64,
            StateForm::DickeSuperposition { coeffs } => coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.norm_sqr() * k as f64 / self.n as f64)
                .sum(),
            StateForm::Product { thetas } => thetas[j - 1].cos().powi(2),
            StateForm::Dense { amplitudes } => {
                let bit = self.n - j;
                amplitudes
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (i >> bit) & 1 == 1)
                    .map(|(_, a)| a.norm_sqr())
                    .sum()
            }
        })
    }

    /// Per-spin ↑ probabilities for spins 1..=n.
    pub fn spin_up_probabilities(&self) -> Vec<f64> {
        (1..=self.n)
            .map(|j| self.spin_up_probability(j).expect("index in range"))
            .collect()
    }

    /// ⟨Jz⟩ in units of ħ = 1.
    pub fn jz_mean(&self) -> f64 {
        let half_n = self.n as f64 / 2.0;
        match &self.form {
            StateForm::Dicke { k } => *k as f64 - half_n,
            StateForm::DickeSuperposition { coeffs } => coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.norm_sqr() * (k as f64 - half_n))
                .sum(),
            StateForm::Product { thetas } => {
                thetas.iter().map(|t| t.cos().powi(2)).sum::<f64>() - half_n
            }
            StateForm::Dense { amplitudes } => amplitudes
                .iter()
                .enumerate()
                .map(|(i, a)| a.norm_sqr() * (i.count_ones() as f64 - half_n))
                .sum(),
        }
    }

    /// Standard deviation ΔJz.
    pub fn jz_sd(&self) -> f64 {
        let var = match &self.form {
            StateForm::Dicke { .. } => 0.0,
            StateForm::DickeSuperposition { coeffs } => {
                let half_n = self.n as f64 / 2.0;
                let mean = self.jz_mean();
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c.norm_sqr() * (k as f64 - half_n - mean).powi(2))
                    .sum()
            }
            // Independent spins: Var(Jz) = Σ_j p_j (1 - p_j).
            StateForm::Product { thetas } => {
                thetas.iter().map(|t| (t.cos() * t.sin()).powi(2)).sum()
            }
            StateForm::Dense { amplitudes } => {
                let half_n = self.n as f64 / 2.0;
                let mean = self.jz_mean();
                amplitudes
                    .iter()
                    .enumerate()
                    .map(|(i, a)| a.norm_sqr() * (i.count_ones() as f64 - half_n - mean).powi(2))
                    .sum()
            }
        };
        var.max(0.0_f64).sqrt()
    }

    /// Distribution of total-Jz outcomes P(m) = ⟨ψ|Π(m)|ψ⟩.
    pub fn magnetization_spectrum(&self) -> MagnetizationSpectrum {
        let n = self.n;
        let probs = match &self.form {
            StateForm::Dicke { k } => {
                let mut p = vec![0.0; n + 1];
                p[*k] = 1.0;
                p
            }
            StateForm::DickeSuperposition { coeffs } => {
                coeffs.iter().map(|c| c.norm_sqr()).collect()
            }
            // Poisson-binomial over up counts with per-spin probability cos²θ_j.
            StateForm::Product { thetas } => {
                let mut p = vec![0.0; n + 1];
                p[0] = 1.0;
                for (j, t) in thetas.iter().enumerate() {
                    let up = t.cos().powi(2);
                    for u in (0..=j + 1).rev() {
                        let stay = p[u] * (1.0 - up);
                        let gain = if u > 0 { p[u - 1] * up } else { 0.0 };
                        p[u] = stay + gain;
                    }
                }
                p
            }
            StateForm::Dense { amplitudes } => {
                let mut p = vec![0.0; n + 1];
                for (i, a) in amplitudes.iter().enumerate() {
                    p[i.count_ones() as usize] += a.norm_sqr();
                }
                p
            }
        };
        MagnetizationSpectrum { n, probs }
    }
}

/// Dicke-basis coefficients of a uniform product state, computed in log
/// space so they remain finite at any n.
fn uniform_product_sector_coeffs(n: usize, theta: f64) -> Vec<C64> {
    let (c, s) = (theta.cos(), theta.sin());
    let mut out = vec![C64::new(0.0, 0.0); n + 1];
    if c == 0.0 {
        out[0] = C64::new(s.powi(n as i32), 0.0); // |s| = 1 here
        return out;
    }
    if s == 0.0 {
        out[n] = C64::new(c.powi(n as i32), 0.0);
        return out;
    }
    let lnfact = ln_binomial_table(n);
    let (lc, ls) = (c.abs().ln(), s.abs().ln());
    for (k, ck) in out.iter_mut().enumerate() {
        let ln_amp = 0.5 * ln_binomial(&lnfact, n, k) + k as f64 * lc + (n - k) as f64 * ls;
        let sign = c.signum().powi(k as i32) * s.signum().powi((n - k) as i32);
        *ck = C64::new(sign * ln_amp.exp(), 0.0);
    }
    out
}

/// ⟨a|b⟩ with structured fast paths; falls back to the dense inner product
/// only when one side is already dense.
pub fn overlap(a: &MssPureState, b: &MssPureState) -> Result<C64> {
    if a.n != b.n {
        return Err(Error::domain(format!(
            "spin counts differ: {} vs {}",
            a.n, b.n
        )));
    }
    use StateForm::*;
    let value = match (&a.form, &b.form) {
        (Dicke { k }, Dicke { k: k2 }) => C64::new(if k == k2 { 1.0 } else { 0.0 }, 0.0),
        (Dicke { k }, DickeSuperposition { coeffs }) => coeffs[*k],
        (DickeSuperposition { coeffs }, Dicke { k }) => coeffs[*k].conj(),
        (DickeSuperposition { coeffs: ca }, DickeSuperposition { coeffs: cb }) => {
            ca.iter().zip(cb).map(|(x, y)| x.conj() * y).sum()
        }
        (Product { thetas: ta }, Product { thetas: tb }) => {
            let p: f64 = ta.iter().zip(tb).map(|(x, y)| (x - y).cos()).product();
            C64::new(p, 0.0)
        }
        (Dicke { k }, Product { thetas }) => C64::new(dicke_product_overlap(a.n, *k, thetas), 0.0),
        (Product { thetas }, Dicke { k }) => C64::new(dicke_product_overlap(a.n, *k, thetas), 0.0),
        (DickeSuperposition { coeffs }, Product { thetas }) => coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.conj() * dicke_product_overlap(a.n, k, thetas))
            .sum(),
        (Product { thetas }, DickeSuperposition { coeffs }) => coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * dicke_product_overlap(a.n, k, thetas))
            .sum(),
        (Dense { .. }, _) | (_, Dense { .. }) => {
            let va = a.to_dense()?;
            let vb = b.to_dense()?;
            va.iter().zip(&vb).map(|(x, y)| x.conj() * y).sum()
        }
    };
    Ok(value)
}

/// ⟨D_{n,k}|⊗_j(cos θ_j|↑⟩+sin θ_j|↓⟩)⟩ by dynamic programming over
/// up-counts, O(n·k) and exact for non-uniform angles.
fn dicke_product_overlap(n: usize, k: usize, thetas: &[f64]) -> f64 {
    let mut row = vec![0.0_f64; k + 1];
    row[0] = 1.0;
    for t in thetas {
        let (c, s) = (t.cos(), t.sin());
        for u in (0..=k).rev() {
            let from_up = if u > 0 { row[u - 1] * c } else { 0.0 };
            row[u] = row[u] * s + from_up;
        }
    }
    row[k] / binomial_f64(n, k).sqrt()
}

/// Probability distribution over total magnetization m ∈ {-n/2, ..., n/2},
/// stored by up count u with m = u - n/2.
#[derive(Clone, Debug, PartialEq)]
pub struct MagnetizationSpectrum {
    n: usize,
    probs: Vec<f64>,
}

impl MagnetizationSpectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Probabilities indexed by up count u = 0..=n.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Magnetization value for up count `u`.
    pub fn m_value(&self, u: usize) -> f64 {
        u as f64 - self.n as f64 / 2.0
    }

    /// (m, P(m)) pairs in ascending m.
    pub fn entries(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(u, p)| (self.m_value(u), *p))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.entries().map(|(m, p)| m * p).sum()
    }

    pub fn sd(&self) -> f64 {
        let mean = self.mean();
        let var: f64 = self.entries().map(|(m, p)| p * (m - mean).powi(2)).sum();
        var.max(0.0).sqrt()
    }

    /// Σ_m P(m)·Q(m), the spectra-disjointness figure of merit.
    pub fn overlap_with(&self, other: &MagnetizationSpectrum) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(p, q)| p * q)
            .sum()
    }
}

/// The entangled pair (|0⟩|ψ0⟩ + |1⟩|ψ1⟩ up to qubit amplitudes) between a
/// qubit and the MSS. The constructor records the actual ⟨ψ0|ψ1⟩; operations
/// whose closed forms assume orthogonality must check it against
/// `orthogonality_tol` via [`MicroMacroState::require_orthogonal`].
#[derive(Clone, Debug)]
pub struct MicroMacroState {
    psi0: MssPureState,
    psi1: MssPureState,
    qubit_amplitudes: [C64; 2],
    orthogonality_tol: f64,
    overlap: C64,
}

impl MicroMacroState {
    /// Equal-weight pair with amplitudes 1/√2 on both qubit levels.
    pub fn new(psi0: MssPureState, psi1: MssPureState) -> Result<Self> {
        Self::with_amplitudes(
            psi0,
            psi1,
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(FRAC_1_SQRT_2, 0.0),
        )
    }

    /// Pair with explicit qubit amplitudes; |a0|² + |a1|² must be 1 within
    /// [`NORM_TOL`].
    pub fn with_amplitudes(
        psi0: MssPureState,
        psi1: MssPureState,
        a0: C64,
        a1: C64,
    ) -> Result<Self> {
        if psi0.n() != psi1.n() {
            return Err(Error::domain(format!(
                "component spin counts differ: {} vs {}",
                psi0.n(),
                psi1.n()
            )));
        }
        let norm = a0.norm_sqr() + a1.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!(
                "qubit amplitudes not normalized: |a|^2 = {norm}"
            )));
        }
        let overlap = overlap(&psi0, &psi1)?;
        Ok(Self {
            psi0,
            psi1,
            qubit_amplitudes: [a0, a1],
            orthogonality_tol: DEFAULT_ORTHOGONALITY_TOL,
            overlap,
        })
    }

    /// Replace the orthogonality tolerance used by closed-form consumers.
    pub fn with_orthogonality_tol(mut self, tol: f64) -> Result<Self> {
        if tol.is_nan() || tol < 0.0 {
            return Err(Error::domain("orthogonality tolerance must be nonnegative"));
        }
        self.orthogonality_tol = tol;
        Ok(self)
    }

    /// Equal-weight pair of Dicke states (n, k0) and (n, k1).
    pub fn dicke_pair(n: usize, k0: usize, k1: usize) -> Result<Self> {
        Self::new(MssPureState::dicke(n, k0)?, MssPureState::dicke(n, k1)?)
    }

    /// Equal-weight pair of uniform product states at angles θ0 and θ1.
    pub fn product_pair(n: usize, theta0: f64, theta1: f64) -> Result<Self> {
        Self::new(
            MssPureState::symmetric_product(n, theta0)?,
            MssPureState::symmetric_product(n, theta1)?,
        )
    }

    pub fn n(&self) -> usize {
        self.psi0.n()
    }

    pub fn psi0(&self) -> &MssPureState {
        &self.psi0
    }

    pub fn psi1(&self) -> &MssPureState {
        &self.psi1
    }

    pub fn qubit_amplitudes(&self) -> [C64; 2] {
        self.qubit_amplitudes
    }

    /// ⟨ψ0|ψ1⟩ recorded at construction.
    pub fn overlap(&self) -> C64 {
        self.overlap
    }

    pub fn orthogonality_tol(&self) -> f64 {
        self.orthogonality_tol
    }

    /// Errors unless |⟨ψ0|ψ1⟩| ≤ orthogonality_tol.
    pub fn require_orthogonal(&self) -> Result<()> {
        let mag = self.overlap.norm();
        if mag > self.orthogonality_tol {
            return Err(Error::domain(format!(
                "components are not orthogonal: |<psi0|psi1>| = {mag:e} > tol {:e}",
                self.orthogonality_tol
            )));
        }
        Ok(())
    }

    /// Reduced density matrix of the qubit as [[ρ00, ρ01], [ρ10, ρ11]].
    pub fn qubit_reduced(&self) -> [[C64; 2]; 2] {
        let [a0, a1] = self.qubit_amplitudes;
        let r01 = a0 * a1.conj() * self.overlap.conj(); // ⟨ψ1|ψ0⟩ = conj(⟨ψ0|ψ1⟩)
        [
            [C64::new(a0.norm_sqr(), 0.0), r01],
            [r01.conj(), C64::new(a1.norm_sqr(), 0.0)],
        ]
    }

    /// Means, standard deviations, distinctness and spectra disjointness of
    /// the two MSS components.
    pub fn macro_summary(&self) -> MacroSummary {
        let mean0 = self.psi0.jz_mean();
        let mean1 = self.psi1.jz_mean();
        let s0 = self.psi0.magnetization_spectrum();
        let s1 = self.psi1.magnetization_spectrum();
        MacroSummary {
            mean0,
            mean1,
            sd0: self.psi0.jz_sd(),
            sd1: self.psi1.jz_sd(),
            lambda: (mean0 - mean1).abs(),
            spectra_disjoint: s0.overlap_with(&s1) <= SPECTRUM_DISJOINT_TOL,
            overlap_mag: self.overlap.norm(),
        }
    }

    /// Per-spin ↑ probabilities under ψ0 and ψ1 with the component means as
    /// declared totals.
    pub fn spin_marginals(&self) -> SpinMarginals {
        SpinMarginals::with_totals(
            self.psi0.spin_up_probabilities(),
            self.psi1.spin_up_probabilities(),
            self.psi0.jz_mean(),
            self.psi1.jz_mean(),
        )
        .expect("state marginals satisfy the magnetization identity")
    }
}

/// Macroscopicity summary of a micro-macro state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MacroSummary {
    pub mean0: f64,
    pub mean1: f64,
    pub sd0: f64,
    pub sd1: f64,
    /// Distinctness Λ = |⟨Jz⟩ψ0 − ⟨Jz⟩ψ1|.
    pub lambda: f64,
    pub spectra_disjoint: bool,
    pub overlap_mag: f64,
}

/// Per-spin ↑ probabilities {p0j↑} and {p1j↑} with declared totals
/// Σ_j p0j↑ = M0 + N/2 and Σ_j p1j↑ = M1 + N/2.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinMarginals {
    n: usize,
    p0_up: Vec<f64>,
    p1_up: Vec<f64>,
    m0: f64,
    m1: f64,
}

/// Tolerance on the declared-total identity Σ p = M + N/2.
pub const MARGINAL_SUM_TOL: f64 = 1e-10;

impl SpinMarginals {
    /// Marginals with totals derived from the entries themselves.
    pub fn new(p0_up: Vec<f64>, p1_up: Vec<f64>) -> Result<Self> {
        let half_n = p0_up.len() as f64 / 2.0;
        let m0 = p0_up.iter().sum::<f64>() - half_n;
        let m1 = p1_up.iter().sum::<f64>() - half_n;
        Self::with_totals(p0_up, p1_up, m0, m1)
    }

    /// Marginals checked against declared magnetizations M0 and M1 within
    /// [`MARGINAL_SUM_TOL`].
    pub fn with_totals(p0_up: Vec<f64>, p1_up: Vec<f64>, m0: f64, m1: f64) -> Result<Self> {
        if p0_up.is_empty() || p0_up.len() != p1_up.len() {
            return Err(Error::domain(
                "marginal vectors must be nonempty and equal length",
            ));
        }
        let n = p0_up.len();
        for p in p0_up.iter().chain(&p1_up) {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::domain(format!("marginal entry {p} outside [0, 1]")));
            }
        }
        let half_n = n as f64 / 2.0;
        let s0: f64 = p0_up.iter().sum();
        let s1: f64 = p1_up.iter().sum();
        if (s0 - (m0 + half_n)).abs() > MARGINAL_SUM_TOL {
            return Err(Error::domain(format!(
                "sum(p0_up) = {s0} does not match M0 + N/2 = {}",
                m0 + half_n
            )));
        }
        if (s1 - (m1 + half_n)).abs() > MARGINAL_SUM_TOL {
            return Err(Error::domain(format!(
                "sum(p1_up) = {s1} does not match M1 + N/2 = {}",
                m1 + half_n
            )));
        }
        Ok(Self {
            n,
            p0_up,
            p1_up,
            m0,
            m1,
        })
    }

    /// All spins share p0 and p1, the pattern of a QA-symmetric pair.
    pub fn uniform(n: usize, p0: f64, p1: f64) -> Result<Self> {
        Self::new(vec![p0; n], vec![p1; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p0_up(&self) -> &[f64] {
        &self.p0_up
    }

    pub fn p1_up(&self) -> &[f64] {
        &self.p1_up
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn m1(&self) -> f64 {
        self.m1
    }

    pub fn delta_m(&self) -> f64 {
        self.m0 - self.m1
    }

    pub fn mbar(&self) -> f64 {
        (self.m0 + self.m1) / 2.0
    }
}
