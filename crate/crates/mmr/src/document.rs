//! JSON document forms of the domain values.
//!
//! States serialize as `{n, form, payload}`; complex payloads are
//! interleaved (re, im) arrays. Structured forms round-trip bit exactly
//! because every f64 is printed in shortest round-trip form.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{BipartiteDensity, DensityBasis, OutcomeBranch, SpinOutcome};
use crate::states::{MicroMacroState, MssPureState, StateForm};

fn interleave(values: &[C64]) -> Vec<f64> {
    values.iter().flat_map(|c| [c.re, c.im]).collect()
}

fn deinterleave(values: &[f64]) -> Result<Vec<C64>> {
    if !values.len().is_multiple_of(2) {
        return Err(Error::domain(
            "interleaved complex array must have even length",
        ));
    }
    Ok(values
        .chunks_exact(2)
        .map(|p| C64::new(p[0], p[1]))
        .collect())
}

/// Wire form of an [`MssPureState`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDocument {
    pub n: usize,
    #[serde(flatten)]
    pub payload: StatePayload,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", content = "payload", rename_all = "snake_case")]
pub enum StatePayload {
    Dicke { k: usize },
    DickeSuperposition { coeffs: Vec<f64> },
    Product { thetas: Vec<f64> },
    Dense { amplitudes: Vec<f64> },
}

impl MssPureState {
    pub fn to_document(&self) -> StateDocument {
        let payload = match self.form() {
            StateForm::Dicke { k } => StatePayload::Dicke { k: *k },
            StateForm::DickeSuperposition { coeffs } => StatePayload::DickeSuperposition {
                coeffs: interleave(coeffs),
            },
            StateForm::Product { thetas } => StatePayload::Product {
                thetas: thetas.clone(),
            },
            StateForm::Dense { amplitudes } => StatePayload::Dense {
                amplitudes: interleave(amplitudes),
            },
        };
        StateDocument {
            n: self.n(),
            payload,
        }
    }

    pub fn from_document(doc: &StateDocument) -> Result<Self> {
        match &doc.payload {
            StatePayload::Dicke { k } => MssPureState::dicke(doc.n, *k),
            StatePayload::DickeSuperposition { coeffs } => {
                MssPureState::dicke_superposition(doc.n, deinterleave(coeffs)?)
            }
            StatePayload::Product { thetas } => MssPureState::product(thetas.clone()),
            StatePayload::Dense { amplitudes } => {
                MssPureState::dense(doc.n, deinterleave(amplitudes)?)
            }
        }
    }
}

/// Wire form of a [`MicroMacroState`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MicroMacroDocument {
    pub psi0: StateDocument,
    pub psi1: StateDocument,
    /// Interleaved (re, im) for the |0⟩ and |1⟩ amplitudes.
    pub qubit_amplitudes: Vec<f64>,
    pub orthogonality_tol: f64,
}

impl MicroMacroState {
    pub fn to_document(&self) -> MicroMacroDocument {
        MicroMacroDocument {
            psi0: self.psi0().to_document(),
            psi1: self.psi1().to_document(),
            qubit_amplitudes: interleave(&self.qubit_amplitudes()),
            orthogonality_tol: self.orthogonality_tol(),
        }
    }

    pub fn from_document(doc: &MicroMacroDocument) -> Result<Self> {
        let amps = deinterleave(&doc.qubit_amplitudes)?;
        if amps.len() != 2 {
            return Err(Error::domain("expected exactly two qubit amplitudes"));
        }
        MicroMacroState::with_amplitudes(
            MssPureState::from_document(&doc.psi0)?,
            MssPureState::from_document(&doc.psi1)?,
            amps[0],
            amps[1],
        )?
        .with_orthogonality_tol(doc.orthogonality_tol)
    }
}

/// Wire form of an [`OutcomeBranch`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeBranchDocument {
    pub outcome: String,
    pub probability: f64,
    pub measured_index: usize,
    pub post_state: Option<MicroMacroDocument>,
}

impl OutcomeBranch {
    pub fn to_document(&self) -> OutcomeBranchDocument {
        OutcomeBranchDocument {
            outcome: match self.outcome {
                SpinOutcome::Up => "up".to_string(),
                SpinOutcome::Down => "down".to_string(),
            },
            probability: self.probability,
            measured_index: self.measured_index,
            post_state: self.post_state.as_ref().map(|s| s.to_document()),
        }
    }
}

/// Wire form of a [`BipartiteDensity`]: a dense Hermitian matrix payload in
/// row-major interleaved (re, im) order plus its basis tag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityDocument {
    pub qubit_dim: usize,
    pub mss_dim: usize,
    pub basis: DensityBasisDocument,
    pub matrix: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityBasisDocument {
    DenseComputational,
    SymmetricSector { sectors: Vec<usize> },
    OrthonormalizedSpan,
}

impl BipartiteDensity {
    pub fn to_document(&self) -> DensityDocument {
        let dim = 2 * self.mss_dim();
        let mut matrix = Vec::with_capacity(2 * dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let v = self.matrix()[(i, j)];
                matrix.push(v.re);
                matrix.push(v.im);
            }
        }
        DensityDocument {
            qubit_dim: 2,
            mss_dim: self.mss_dim(),
            basis: match self.basis() {
                DensityBasis::DenseComputational => DensityBasisDocument::DenseComputational,
                DensityBasis::SymmetricSector { sectors } => {
                    DensityBasisDocument::SymmetricSector {
                        sectors: sectors.clone(),
                    }
                }
                DensityBasis::OrthonormalizedSpan => DensityBasisDocument::OrthonormalizedSpan,
            },
            matrix,
        }
    }

    pub fn from_document(doc: &DensityDocument) -> Result<Self> {
        let dim = 2 * doc.mss_dim;
        let entries = deinterleave(&doc.matrix)?;
        if entries.len() != dim * dim {
            return Err(Error::domain(format!(
                "expected {} matrix entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let matrix = nalgebra::DMatrix::from_row_iterator(dim, dim, entries);
        let basis = match &doc.basis {
            DensityBasisDocument::DenseComputational => DensityBasis::DenseComputational,
            DensityBasisDocument::SymmetricSector { sectors } => DensityBasis::SymmetricSector {
                sectors: sectors.clone(),
            },
            DensityBasisDocument::OrthonormalizedSpan => DensityBasis::OrthonormalizedSpan,
        };
        BipartiteDensity::new(matrix, doc.mss_dim, basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::lose_spin;

    #[test]
    fn structured_states_round_trip_bit_exactly() {
        let states = vec![
            MssPureState::dicke(9, 4).unwrap(),
            MssPureState::symmetric_product(6, 0.123_456_789_123_456_78).unwrap(),
            MssPureState::product(vec![0.1, -2.7, 1.0 / 3.0]).unwrap(),
            MssPureState::dicke_superposition(
                2,
                vec![
                    C64::new(0.5f64.sqrt(), 0.0),
                    C64::new(0.0, 1.0 / 3.0f64.sqrt()),
                    C64::new(1.0 / 6.0f64.sqrt(), 0.0),
                ],
            )
            .unwrap(),
        ];
        for s in states {
            let json = serde_json::to_string(&s.to_document()).unwrap();
            let doc: StateDocument = serde_json::from_str(&json).unwrap();
            let back = MssPureState::from_document(&doc).unwrap();
            assert_eq!(s, back); // bit-exact f64 equality through the document
        }
    }

    #[test]
    fn document_shape_is_n_form_payload() {
        let doc = MssPureState::dicke(4, 2).unwrap().to_document();
        let v: serde_json::Value = serde_json::to_value(&doc).unwrap();
        assert_eq!(v["n"], 4);
        assert_eq!(v["form"], "dicke");
        assert_eq!(v["payload"]["k"], 2);
    }

    #[test]
    fn micro_macro_and_density_round_trip() {
        let s = MicroMacroState::dicke_pair(5, 4, 1).unwrap();
        let json = serde_json::to_string(&s.to_document()).unwrap();
        let doc: MicroMacroDocument = serde_json::from_str(&json).unwrap();
        let back = MicroMacroState::from_document(&doc).unwrap();
        assert_eq!(s.psi0(), back.psi0());
        assert_eq!(s.qubit_amplitudes(), back.qubit_amplitudes());

        let rho = lose_spin(&s, 1).unwrap();
        let json = serde_json::to_string(&rho.to_document()).unwrap();
        let doc: DensityDocument = serde_json::from_str(&json).unwrap();
        let back = BipartiteDensity::from_document(&doc).unwrap();
        assert_eq!(rho.matrix(), back.matrix());
        assert_eq!(rho.basis(), back.basis());
    }
}
