//! JSON wire formats. Complex entries are [re, im] pairs; matrices are
//! nested row arrays; elements are arrays of blocks in the fixed basis
//! convention (matrix units per block, blocks in order).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{tensor_algebra, BlockAlgebra, Element};
use crate::error::Error;
use crate::linalg::{cx, CMat};
use crate::linmap::{LinearMap, MapFlags, SubalgebraEmbedding};
use crate::qgroupoid::{Comultiplication, QuantumGroupoidData};
use crate::weights::Weight;
use crate::Result;

pub type WireMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_wire(m: &CMat) -> WireMatrix {
    (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|c| [m[(r, c)].re, m[(r, c)].im])
                .collect()
        })
        .collect()
}

pub fn matrix_from_wire(w: &WireMatrix, rows: usize, cols: usize) -> Result<CMat> {
    if w.len() != rows || w.iter().any(|r| r.len() != cols) {
        return Err(Error::Format(format!(
            "matrix has shape {}x{:?}, expected {rows}x{cols}",
            w.len(),
            w.first().map(|r| r.len()).unwrap_or(0),
        )));
    }
    let mut m = CMat::zeros(rows, cols);
    for (r, row) in w.iter().enumerate() {
        for (c, &[re, im]) in row.iter().enumerate() {
            m[(r, c)] = cx(re, im);
        }
    }
    Ok(m)
}

pub fn element_to_wire(e: &Element) -> Vec<WireMatrix> {
    e.blocks().iter().map(matrix_to_wire).collect()
}

pub fn element_from_wire(alg: &Arc<BlockAlgebra>, w: &[WireMatrix]) -> Result<Element> {
    if w.len() != alg.num_blocks() {
        return Err(Error::Format(format!(
            "element has {} blocks, algebra has {}",
            w.len(),
            alg.num_blocks()
        )));
    }
    let blocks = w
        .iter()
        .zip(alg.block_dims())
        .map(|(b, &d)| matrix_from_wire(b, d, d))
        .collect::<Result<Vec<_>>>()?;
    Element::new(alg.clone(), blocks)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraWire {
    pub block_dims: Vec<usize>,
}

impl AlgebraWire {
    pub fn of(a: &BlockAlgebra) -> Self {
        AlgebraWire {
            block_dims: a.block_dims().to_vec(),
        }
    }

    pub fn build(&self) -> Result<Arc<BlockAlgebra>> {
        BlockAlgebra::new(&self.block_dims)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightWire {
    pub algebra: AlgebraWire,
    pub density: Vec<WireMatrix>,
}

impl WeightWire {
    pub fn of(w: &Weight) -> Self {
        WeightWire {
            algebra: AlgebraWire::of(w.algebra()),
            density: element_to_wire(w.density()),
        }
    }

    pub fn build(&self) -> Result<Weight> {
        let alg = self.algebra.build()?;
        let density = element_from_wire(&alg, &self.density)?;
        Weight::new(alg, density)
    }
}

/// Serialized separability triple input data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TripleWire {
    #[serde(rename = "B")]
    pub b: AlgebraWire,
    #[serde(rename = "C")]
    pub c: AlgebraWire,
    #[serde(rename = "R_matrix")]
    pub r_matrix: WireMatrix,
    pub nu_density: Vec<WireMatrix>,
    #[serde(rename = "E")]
    pub e: Vec<WireMatrix>,
}

pub struct TripleData {
    pub b: Arc<BlockAlgebra>,
    pub c: Arc<BlockAlgebra>,
    pub r: LinearMap,
    pub nu: Weight,
    pub e: Element,
}

impl TripleWire {
    pub fn build(&self) -> Result<TripleData> {
        let b = self.b.build()?;
        let c = self.c.build()?;
        let r_matrix = matrix_from_wire(&self.r_matrix, c.total_dim(), b.total_dim())?;
        let r = LinearMap::new(b.clone(), c.clone(), r_matrix)?
            .with_flags_unchecked(MapFlags::star_anti_isomorphism());
        let nu_density = element_from_wire(&b, &self.nu_density)?;
        let nu = Weight::new(b.clone(), nu_density)?;
        let bc = tensor_algebra(&b, &c);
        let e = element_from_wire(&bc, &self.e)?;
        Ok(TripleData { b, c, r, nu, e })
    }
}

/// Serialized quantum groupoid candidate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QgdWire {
    #[serde(rename = "A")]
    pub a: AlgebraWire,
    #[serde(rename = "Delta_matrix")]
    pub delta_matrix: WireMatrix,
    #[serde(rename = "E")]
    pub e: Vec<WireMatrix>,
    pub base_triple: TripleWire,
    #[serde(rename = "iota_B")]
    pub iota_b: WireMatrix,
    #[serde(rename = "iota_C")]
    pub iota_c: WireMatrix,
    pub phi_density: Vec<WireMatrix>,
    pub psi_density: Vec<WireMatrix>,
}

impl QgdWire {
    pub fn of(qg: &QuantumGroupoidData) -> Self {
        QgdWire {
            a: AlgebraWire::of(&qg.a),
            delta_matrix: matrix_to_wire(qg.delta.map().matrix()),
            e: element_to_wire(&qg.e),
            base_triple: TripleWire {
                b: AlgebraWire::of(&qg.base_b),
                c: AlgebraWire::of(&qg.base_c),
                r_matrix: matrix_to_wire(qg.r.matrix()),
                nu_density: element_to_wire(qg.nu.density()),
                e: element_to_wire(&qg.e_base),
            },
            iota_b: matrix_to_wire(qg.iota_b.iota().matrix()),
            iota_c: matrix_to_wire(qg.iota_c.iota().matrix()),
            phi_density: element_to_wire(qg.phi.density()),
            psi_density: element_to_wire(qg.psi.density()),
        }
    }

    pub fn build(&self) -> Result<QuantumGroupoidData> {
        let a = self.a.build()?;
        let aa = tensor_algebra(&a, &a);
        let delta_matrix = matrix_from_wire(&self.delta_matrix, aa.total_dim(), a.total_dim())?;
        let delta = Comultiplication::new(LinearMap::new(a.clone(), aa.clone(), delta_matrix)?)?;
        let e = element_from_wire(&aa, &self.e)?;
        let base = self.base_triple.build()?;
        let iota_b_m = matrix_from_wire(&self.iota_b, a.total_dim(), base.b.total_dim())?;
        let iota_c_m = matrix_from_wire(&self.iota_c, a.total_dim(), base.c.total_dim())?;
        let iota_b =
            SubalgebraEmbedding::new(LinearMap::new(base.b.clone(), a.clone(), iota_b_m)?)?;
        let iota_c =
            SubalgebraEmbedding::new(LinearMap::new(base.c.clone(), a.clone(), iota_c_m)?)?;
        let phi = Weight::new(a.clone(), element_from_wire(&a, &self.phi_density)?)?;
        let psi = Weight::new(a.clone(), element_from_wire(&a, &self.psi_density)?)?;
        QuantumGroupoidData::new(
            a, delta, e, base.b, base.c, base.r, base.nu, base.e, iota_b, iota_c, phi, psi,
        )
    }
}

pub fn qgd_to_json(qg: &QuantumGroupoidData) -> String {
    serde_json::to_string_pretty(&QgdWire::of(qg)).expect("qgd serialization")
}

pub fn qgd_from_json(text: &str) -> Result<QuantumGroupoidData> {
    let wire: QgdWire =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("JSON parse error: {e}")))?;
    wire.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::random_element;

    #[test]
    fn element_wire_round_trip() {
        let alg = BlockAlgebra::new(&[2, 1, 3]).unwrap();
        let mut rng = crate::test_rng(31);
        let e = random_element(&alg, &mut rng);
        let wire = element_to_wire(&e);
        let back = element_from_wire(&alg, &wire).unwrap();
        assert!(back.rel_distance(&e) < 1e-15);
    }

    #[test]
    fn qgd_wire_round_trip_preserves_verification() {
        let qg = crate::fixtures::fx2_matrix_convolution(2);
        let json = qgd_to_json(&qg);
        let back = qgd_from_json(&json).unwrap();
        assert!(back.e.rel_distance(&qg.e) < 1e-15);
        assert!(back.phi.density().rel_distance(qg.phi.density()) < 1e-15);
        // serialization is deterministic
        assert_eq!(json, qgd_to_json(&back));
    }

    #[test]
    fn truncated_json_is_a_format_error() {
        let qg = crate::fixtures::fx3_cyclic_function(2);
        let json = qgd_to_json(&qg);
        let truncated = &json[..json.len() / 2];
        assert!(matches!(qgd_from_json(truncated), Err(Error::Format(_))));
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let qg = crate::fixtures::fx3_cyclic_function(2);
        let mut wire = QgdWire::of(&qg);
        wire.e.pop();
        assert!(wire.build().is_err());
    }
}
