//! Structural (de)serialization of dilation triples and their targets.
//!
//! Matrices repeated across blocks are stored once in a per-map pool and
//! referenced by index, so `J`, `Q` and each `U` stay compact.

use std::collections::BTreeMap;

use dilation_core::dilation::{BlockPermutation, DilationTriple, Guarantee, MapKind, ScaledBlockMap};
use dilation_core::linalg::{
    format_rational, parse_rational, Matrix, PNorm, Rational, Scalar, ScalarMode, SpaceDescriptor, SpaceNorm,
};
use serde_json::{json, Map, Value};

use crate::input::{detect_mode, FromEntry, RawMatrix};
use crate::CliError;

pub const FORMAT: &str = "dilation-triple/1";

pub type Targets<S> = BTreeMap<String, Matrix<S>>;

/// Exact scalars print in lowest terms as "n/d" (or "n"), floats as numbers.
pub fn scalar_json<S: Scalar>(x: &S) -> Value {
    match S::MODE {
        ScalarMode::Exact => Value::String(x.to_string()),
        ScalarMode::Float => json!(x.to_f64()),
    }
}

pub fn rational_json(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn matrix_json<S: Scalar>(m: &Matrix<S>) -> Value {
    let data: Vec<Value> = (0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(scalar_json).collect())).collect();
    json!({"rows": m.rows(), "cols": m.cols(), "data": data})
}

pub fn guarantee_json(g: Guarantee) -> Value {
    match g {
        Guarantee::Finite(n) => json!(n),
        Guarantee::Infinite => json!("inf"),
    }
}

fn intern<S: Scalar>(pool: &mut Vec<Matrix<S>>, m: &Matrix<S>) -> usize {
    match pool.iter().position(|x| x == m) {
        Some(i) => i,
        None => {
            pool.push(m.clone());
            pool.len() - 1
        }
    }
}

fn map_json<S: Scalar>(map: &ScaledBlockMap<S>) -> Value {
    let mut pool = Vec::new();
    let blocks: Vec<Value> =
        (0..map.num_blocks()).map(|i| map.block(i).map_or(Value::Null, |b| json!(intern(&mut pool, b)))).collect();
    json!({
        "base_dim": map.base_dim(),
        "block_dim": map.block_dim(),
        "blocks": blocks,
        "bases": map.bases().iter().map(rational_json).collect::<Vec<_>>(),
        "pool": pool.iter().map(matrix_json).collect::<Vec<_>>(),
    })
}

fn operator_json<S: Scalar>(u: &BlockPermutation<S>) -> Value {
    json!({
        "sources": u.sources(),
        "factors": (0..u.num_blocks()).map(|i| u.factor_index(i).map_or(Value::Null, |k| json!(k))).collect::<Vec<_>>(),
        "pool": u.pool().iter().map(matrix_json).collect::<Vec<_>>(),
    })
}

pub fn triple_json<S: Scalar>(triple: &DilationTriple<S>, targets: &BTreeMap<String, Matrix<S>>) -> Value {
    let space = triple.space();
    json!({
        "format": FORMAT,
        "mode": S::MODE.as_str(),
        "space": {"dim": space.dim, "norm": space.norm.to_string(), "structure": space.structure},
        "guarantee": guarantee_json(triple.guarantee()),
        "embed": map_json(triple.embed()),
        "readout": map_json(triple.readout()),
        "operators": triple.operators().iter().map(|(l, u)| (l.clone(), operator_json(u))).collect::<Map<_, _>>(),
        "targets": targets.iter().map(|(l, t)| (l.clone(), matrix_json(t))).collect::<Map<_, _>>(),
    })
}

/// A triple file with its matrices still in payload form.
pub struct RawTriple {
    pub mode: ScalarMode,
    doc: Value,
    matrices: Vec<RawMatrix>,
}

fn field<'a>(v: &'a Value, key: &str, at: &str) -> Result<&'a Value, CliError> {
    v.get(key).ok_or_else(|| CliError::Input(format!("{at}: missing \"{key}\"")))
}

fn usize_of(v: &Value, at: &str) -> Result<usize, CliError> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| CliError::Input(format!("{at}: expected a non-negative integer")))
}

fn array<'a>(v: &'a Value, at: &str) -> Result<&'a Vec<Value>, CliError> {
    v.as_array().ok_or_else(|| CliError::Input(format!("{at}: expected an array")))
}

fn optional_index(v: &Value, at: &str) -> Result<Option<usize>, CliError> {
    if v.is_null() {
        Ok(None)
    } else {
        usize_of(v, at).map(Some)
    }
}

impl RawTriple {
    pub fn parse(doc: Value, warnings: &mut Vec<String>) -> Result<RawTriple, CliError> {
        if doc.get("format").and_then(Value::as_str) != Some(FORMAT) {
            return Err(CliError::Input(format!("not a triple file (expected format {FORMAT})")));
        }
        // every matrix in the file, in a fixed walk order, to decide the mode
        let mut matrices = Vec::new();
        for map in ["embed", "readout"] {
            for (i, m) in array(field(field(&doc, map, "triple")?, "pool", map)?, map)?.iter().enumerate() {
                matrices.push(RawMatrix::parse(m, &format!("{map}.pool[{i}]"))?);
            }
        }
        let ops = field(&doc, "operators", "triple")?
            .as_object()
            .ok_or_else(|| CliError::Input("operators: expected an object".into()))?;
        for (label, u) in ops {
            for (i, m) in array(field(u, "pool", label)?, label)?.iter().enumerate() {
                matrices.push(RawMatrix::parse(m, &format!("operators.{label}.pool[{i}]"))?);
            }
        }
        let targets = field(&doc, "targets", "triple")?
            .as_object()
            .ok_or_else(|| CliError::Input("targets: expected an object".into()))?;
        for (label, t) in targets {
            matrices.push(RawMatrix::parse(t, &format!("targets.{label}"))?);
        }
        let detected = detect_mode(matrices.iter().flat_map(|m| &m.entries), "triple file", warnings);
        let declared = match field(&doc, "mode", "triple")?.as_str() {
            Some("exact") => ScalarMode::Exact,
            Some("float") => ScalarMode::Float,
            _ => return Err(CliError::Input("mode: expected \"exact\" or \"float\"".into())),
        };
        let mode = if declared == ScalarMode::Float || detected == ScalarMode::Float {
            ScalarMode::Float
        } else {
            ScalarMode::Exact
        };
        if mode != declared {
            warnings.push("triple file declared exact mode but holds decimal entries; using float mode".into());
        }
        Ok(RawTriple { mode, doc, matrices })
    }

    pub fn build<S: FromEntry>(&self) -> Result<(DilationTriple<S>, Targets<S>), CliError> {
        let doc = &self.doc;
        let mut next = self.matrices.iter();
        let mut take = |n: usize| -> Result<Vec<Matrix<S>>, CliError> {
            (0..n).map(|_| next.next().expect("walked in parse order").to_matrix()).collect()
        };

        let mut maps = Vec::new();
        for (key, kind) in [("embed", MapKind::Embed), ("readout", MapKind::Readout)] {
            let m = field(doc, key, "triple")?;
            let pool = take(array(field(m, "pool", key)?, key)?.len())?;
            let blocks = array(field(m, "blocks", key)?, key)?
                .iter()
                .map(|b| {
                    optional_index(b, key)?
                        .map(|i| {
                            pool.get(i)
                                .cloned()
                                .ok_or_else(|| CliError::Input(format!("{key}: pool index {i} out of range")))
                        })
                        .transpose()
                })
                .collect::<Result<Vec<_>, _>>()?;
            let bases = array(field(m, "bases", key)?, key)?
                .iter()
                .map(|b| {
                    b.as_str()
                        .ok_or_else(|| CliError::Input(format!("{key}.bases: expected strings")))
                        .and_then(|s| Ok(parse_rational(s)?))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let base_dim = usize_of(field(m, "base_dim", key)?, key)?;
            let block_dim = usize_of(field(m, "block_dim", key)?, key)?;
            maps.push(ScaledBlockMap::new(kind, base_dim, block_dim, blocks, bases)?);
        }
        let readout = maps.pop().expect("two maps");
        let embed = maps.pop().expect("two maps");

        let mut operators = BTreeMap::new();
        for (label, u) in field(doc, "operators", "triple")?.as_object().expect("checked in parse") {
            let pool = take(array(field(u, "pool", label)?, label)?.len())?;
            let sources = array(field(u, "sources", label)?, label)?
                .iter()
                .map(|x| usize_of(x, label))
                .collect::<Result<Vec<_>, _>>()?;
            let factors = array(field(u, "factors", label)?, label)?
                .iter()
                .map(|x| optional_index(x, label))
                .collect::<Result<Vec<_>, _>>()?;
            operators.insert(label.clone(), BlockPermutation::new(embed.block_dim(), sources, factors, pool)?);
        }

        let mut targets = BTreeMap::new();
        for label in field(doc, "targets", "triple")?.as_object().expect("checked in parse").keys() {
            targets.insert(label.clone(), take(1)?.pop().expect("one matrix"));
        }

        let space = field(doc, "space", "triple")?;
        let norm = match field(space, "norm", "space")?.as_str() {
            Some("1") => SpaceNorm::L1,
            Some(p) => SpaceNorm::Lp(PNorm::parse(p)?),
            None => return Err(CliError::Input("space.norm: expected a string".into())),
        };
        let structure = field(space, "structure", "space")?.as_str().unwrap_or_default().to_string();
        let space = SpaceDescriptor::new(usize_of(field(space, "dim", "space")?, "space.dim")?, norm, structure)?;
        let guarantee = match field(doc, "guarantee", "triple")? {
            Value::String(s) if s == "inf" => Guarantee::Infinite,
            v => Guarantee::Finite(usize_of(v, "guarantee")?),
        };
        let triple = DilationTriple::new(space, embed, readout, operators, guarantee)?;
        Ok((triple, targets))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dilation_core::dilation::{build_n_dilation, shift_dilation, ConvexCombination};

    #[test]
    fn float_triple_round_trips() {
        let p = PNorm::parse("2").unwrap();
        let c = 0.6f64;
        let s = 0.8f64;
        let r = Matrix::from_rows(vec![vec![c, -s], vec![s, c]]).unwrap();
        let combo = ConvexCombination::from_float_weights(
            vec![Matrix::identity(2), r],
            &[0.25, 0.75],
            vec!["I".into(), "R".into()],
            &p,
        )
        .unwrap();
        let triple = build_n_dilation(&combo, 2, &p).unwrap();
        let targets = BTreeMap::from([("T".to_string(), combo.operator())]);
        let mut warnings = Vec::new();
        let raw = RawTriple::parse(triple_json(&triple, &targets), &mut warnings).unwrap();
        assert_eq!(raw.mode, ScalarMode::Float);
        assert!(warnings.is_empty());
        let (back, back_targets) = raw.build::<f64>().unwrap();
        assert_eq!(back_targets, targets);
        assert_eq!(back.guarantee(), triple.guarantee());
        assert_eq!(back.compress_power("T", 2).unwrap(), triple.compress_power("T", 2).unwrap());
    }

    #[test]
    fn l1_triple_keeps_its_norm() {
        let t = Matrix::from_rows(vec![vec![Rational::new(1.into(), 2.into())]]).unwrap();
        let triple = shift_dilation(&t, 3).unwrap();
        let doc = triple_json(&triple, &BTreeMap::from([("T".to_string(), t)]));
        assert_eq!(doc["space"]["norm"], "1");
        let (back, _) = RawTriple::parse(doc, &mut Vec::new()).unwrap().build::<Rational>().unwrap();
        assert_eq!(back.space().norm, SpaceNorm::L1);
        assert_eq!(back.operators(), triple.operators());
    }

    #[test]
    fn rejects_bad_pool_index() {
        let p = PNorm::parse("3").unwrap();
        let combo =
            ConvexCombination::new(vec![Matrix::<Rational>::identity(1)], vec![Rational::from_integer(1.into())], &p)
                .unwrap();
        let triple = build_n_dilation(&combo, 1, &p).unwrap();
        let mut doc = triple_json(&triple, &BTreeMap::from([("T".to_string(), combo.operator())]));
        doc["embed"]["blocks"][0] = json!(7);
        let raw = RawTriple::parse(doc, &mut Vec::new()).unwrap();
        assert!(raw.build::<Rational>().is_err());
    }
}
