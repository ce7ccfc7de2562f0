use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{BasisElement, RingError, RingPresentation};

/// JSON form of a ring:
/// `{"basis":[{"id":..,"deg":..}], "products":[[a,b,{c:k}]], "pairing":{id:k}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub basis: Vec<BasisEntry>,
    #[serde(default)]
    pub products: Vec<(String, String, BTreeMap<String, i64>)>,
    pub pairing: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub id: String,
    pub deg: u32,
}

impl RingSpec {
    pub fn build(&self) -> Result<RingPresentation, RingError> {
        let basis = self
            .basis
            .iter()
            .map(|b| BasisElement {
                id: b.id.clone(),
                degree: b.deg,
            })
            .collect();
        RingPresentation::new(
            self.name.clone().unwrap_or_else(|| "custom".to_string()),
            basis,
            &self.products,
            &self.pairing,
        )
    }

    /// Spec listing every nonzero product of non-unit basis elements once.
    pub fn from_ring(ring: &RingPresentation) -> RingSpec {
        let basis = ring
            .basis()
            .iter()
            .map(|b| BasisEntry {
                id: b.id.clone(),
                deg: b.degree,
            })
            .collect();
        let id = |k: usize| ring.basis()[k].id.clone();
        let mut products = Vec::new();
        for i in 0..ring.rank() {
            for j in i..ring.rank() {
                if i == ring.unit_index() || j == ring.unit_index() {
                    continue;
                }
                let p = ring.product(i, j);
                if !p.is_empty() {
                    products.push((id(i), id(j), p.iter().map(|(&k, &c)| (id(k), c)).collect()));
                }
            }
        }
        let pairing = (0..ring.rank())
            .filter(|&k| ring.pairing_of(k) != 0)
            .map(|k| (id(k), ring.pairing_of(k)))
            .collect();
        RingSpec {
            name: Some(ring.name().to_string()),
            basis,
            products,
            pairing,
        }
    }
}
