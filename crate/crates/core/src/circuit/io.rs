//! JSON circuit files.
//!
//! ```json
//! {"n": 2, "gamma": 0.1, "layers": [
//!   {"gates": [{"kind": "CNOT", "qubits": [0, 1]}],
//!    "resets": [{"qubit": 1, "bloch": [0, 0, 1]}]}]}
//! ```
//!
//! A `TABLEAU` gate on `k` qubits carries `2k` rows of `2k` bits: row `i`
//! is the image of `X` on the `i`-th listed qubit, row `k + i` the image of
//! `Z`; columns are the `k` x bits followed by the `k` z bits. A bloch entry
//! that is zero sets the exact-zero flag and is written back as the literal
//! `0`. Output field order is fixed, so serialization is byte-stable.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Number;

use super::{Circuit, Layer};
use crate::channels::{Bloch, NoiseModel, ResetSpec};
use crate::error::{Error, Result};
use crate::pauli::{Gate, NamedGate, SymplecticMatrix};
use crate::scalar::Real;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitFile {
    n: usize,
    gamma: f64,
    layers: Vec<LayerFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerFile {
    #[serde(default)]
    gates: Vec<GateFile>,
    #[serde(default)]
    resets: Vec<ResetFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateFile {
    kind: String,
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tableau: Option<Vec<Vec<u8>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResetFile {
    qubit: usize,
    bloch: [Number; 3],
}

fn number_to_f64(x: &Number) -> Result<f64> {
    x.as_f64()
        .ok_or_else(|| Error::InvalidArgument(format!("non-finite number {x}")))
}

fn f64_to_number(x: f64, exact_zero: bool) -> Result<Number> {
    if exact_zero {
        return Ok(Number::from(0));
    }
    Number::from_f64(x).ok_or_else(|| Error::InvalidArgument(format!("cannot serialize {x}")))
}

fn gate_from_file(g: GateFile) -> Result<Gate> {
    if g.kind == "TABLEAU" {
        let rows = g
            .tableau
            .ok_or_else(|| Error::InvalidTableau("TABLEAU gate without `tableau` rows".into()))?;
        let k = g.qubits.len();
        let mut packed = Vec::with_capacity(rows.len());
        for row in &rows {
            if row.len() != 2 * k {
                return Err(Error::InvalidTableau(format!(
                    "row of length {} for a {k}-qubit tableau",
                    row.len()
                )));
            }
            let mut v = 0u64;
            for (j, &bit) in row.iter().enumerate() {
                match bit {
                    0 => {}
                    1 => v |= 1 << j,
                    other => return Err(Error::InvalidTableau(format!("entry {other} is not a bit"))),
                }
            }
            packed.push(v);
        }
        return Ok(Gate::tableau(&g.qubits, SymplecticMatrix::from_rows(k, packed)?));
    }
    let gate: NamedGate = g.kind.parse()?;
    if g.tableau.is_some() {
        return Err(Error::InvalidTableau(format!(
            "{} gate cannot carry tableau rows",
            gate
        )));
    }
    Ok(Gate::named(gate, &g.qubits))
}

fn gate_to_file(g: &Gate) -> GateFile {
    let tableau = match g {
        Gate::Named { .. } => None,
        Gate::Tableau { matrix, .. } => {
            let width = 2 * matrix.width();
            Some(
                matrix
                    .rows()
                    .iter()
                    .map(|&r| (0..width).map(|j| ((r >> j) & 1) as u8).collect())
                    .collect(),
            )
        }
    };
    GateFile {
        kind: g.kind_name().to_string(),
        qubits: g.qubits().to_vec(),
        tableau,
    }
}

impl<T: Real> Circuit<T> {
    pub fn from_json(s: &str) -> Result<Self> {
        let file: CircuitFile = serde_json::from_str(s)?;
        let noise = NoiseModel::new(T::lit(file.gamma))?;
        let mut layers = Vec::with_capacity(file.layers.len());
        for l in file.layers {
            let gates = l.gates.into_iter().map(gate_from_file).collect::<Result<Vec<_>>>()?;
            let resets = l
                .resets
                .into_iter()
                .map(|r| {
                    let [a, b, c] = &r.bloch;
                    Ok(ResetSpec::new(
                        r.qubit,
                        Bloch::new(
                            T::lit(number_to_f64(a)?),
                            T::lit(number_to_f64(b)?),
                            T::lit(number_to_f64(c)?),
                        ),
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            layers.push(Layer::new(gates, resets));
        }
        Ok(Circuit::new(file.n, noise, layers))
    }

    /// Canonical pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> Result<String> {
        let layers = self
            .layers()
            .iter()
            .map(|l| {
                Ok(LayerFile {
                    gates: l.gates.iter().map(gate_to_file).collect(),
                    resets: l
                        .resets
                        .iter()
                        .map(|r| {
                            let comps = r.bloch.components();
                            let zero = r.bloch.exact_zero_flags();
                            Ok(ResetFile {
                                qubit: r.qubit,
                                bloch: [
                                    f64_to_number(comps[0].as_f64(), zero[0])?,
                                    f64_to_number(comps[1].as_f64(), zero[1])?,
                                    f64_to_number(comps[2].as_f64(), zero[2])?,
                                ],
                            })
                        })
                        .collect::<Result<Vec<_>>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let file = CircuitFile {
            n: self.num_qubits(),
            gamma: self.gamma().as_f64(),
            layers,
        };
        let mut s = serde_json::to_string_pretty(&file)?;
        s.push('\n');
        Ok(s)
    }
}

pub fn read_circuit<T: Real>(path: impl AsRef<Path>) -> Result<Circuit<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Circuit::from_json(&text)
}

pub fn write_circuit<T: Real>(c: &Circuit<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, c.to_json()?).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{"n": 2, "gamma": 0.1, "layers": [
        {"gates": [{"kind": "CNOT", "qubits": [0, 1]}],
         "resets": [{"qubit": 1, "bloch": [0, 0.0, 1]}]},
        {"gates": [{"kind": "TABLEAU", "qubits": [1], "tableau": [[0, 1], [1, 0]]}]},
        {}
    ]}"#;

    #[test]
    fn parses_sample() {
        let c = Circuit::<f64>::from_json(SAMPLE).unwrap();
        assert_eq!(c.num_qubits(), 2);
        assert_eq!(c.depth(), 3);
        assert_eq!(c.layers()[0].resets[0].bloch.exact_zero_flags(), [true, true, false]);
        assert!(matches!(c.layers()[1].gates[0], Gate::Tableau { .. }));
        assert!(c.validate().is_empty());
    }

    #[test]
    fn canonical_output_is_byte_stable() {
        let c = Circuit::<f64>::from_json(SAMPLE).unwrap();
        let a = c.to_json().unwrap();
        let back = Circuit::<f64>::from_json(&a).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json().unwrap(), a);
        assert!(a.contains("\"bloch\": [\n            0,\n            0,\n            1.0\n"));
    }

    #[test]
    fn rejects_bad_input() {
        let unknown = r#"{"n": 1, "gamma": 0.0, "layers": [{"gates": [{"kind": "T", "qubits": [0]}]}]}"#;
        assert!(matches!(Circuit::<f64>::from_json(unknown), Err(Error::UnknownGate(_))));
        let bad_tab = r#"{"n": 1, "gamma": 0.0, "layers": [{"gates": [{"kind": "TABLEAU", "qubits": [0], "tableau": [[1, 0], [1, 0]]}]}]}"#;
        assert!(matches!(
            Circuit::<f64>::from_json(bad_tab),
            Err(Error::InvalidTableau(_))
        ));
        let gamma = r#"{"n": 1, "gamma": 2.0, "layers": []}"#;
        assert!(Circuit::<f64>::from_json(gamma).is_err());
        let extra = r#"{"n": 1, "gamma": 0.0, "layers": [], "depth": 3}"#;
        assert!(Circuit::<f64>::from_json(extra).is_err());
    }

    #[test]
    fn f32_circuits_round_trip() {
        let c = Circuit::<f32>::from_json(SAMPLE).unwrap();
        let back = Circuit::<f32>::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
