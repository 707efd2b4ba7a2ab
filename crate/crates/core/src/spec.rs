//! Group specifications `Z^d ⋊ Z^n`: `n` commuting matrices in `GL(d, Z)`.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::serde_util::parse_bigint_value;

/// `d` is the lattice rank, `n` the acting rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ActionSpec {
    pub d: usize,
    pub n: usize,
    pub generators: Vec<IntMatrix>,
}

impl ActionSpec {
    /// Checks unimodularity and pairwise commutation exactly.
    pub fn new(generators: Vec<IntMatrix>) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::schema("generators", "at least one generator is required"));
        };
        let d = first.dim();
        for g in &generators {
            if g.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: g.dim(),
                });
            }
        }
        for (index, g) in generators.iter().enumerate() {
            if !g.is_unimodular() {
                return Err(Error::GeneratorNotUnimodular {
                    index,
                    det: g.determinant().to_string(),
                });
            }
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if !generators[i].commutes_with(&generators[j]) {
                    return Err(Error::NotCommuting {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        Ok(ActionSpec {
            d,
            n: generators.len(),
            generators,
        })
    }

    pub fn single(generator: IntMatrix) -> Result<Self> {
        Self::new(vec![generator])
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: Value = serde_json::from_str(text)
            .map_err(|e| Error::schema("$", format!("invalid JSON: {e}")))?;
        validate_spec(&raw)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}

fn positive_int(raw: &Value, field: &str) -> Result<usize> {
    match raw.get(field) {
        None => Err(Error::schema(field, "missing")),
        Some(v) => v
            .as_u64()
            .filter(|&x| x >= 1)
            .map(|x| x as usize)
            .ok_or_else(|| Error::schema(field, format!("expected a positive integer, got {v}"))),
    }
}

/// Parses `{"d": int, "n": int, "generators": [[[int-string]]]}` and checks it.
pub fn validate_spec(raw: &Value) -> Result<ActionSpec> {
    if !raw.is_object() {
        return Err(Error::schema("$", "expected an object"));
    }
    let d = positive_int(raw, "d")?;
    let n = positive_int(raw, "n")?;
    let gens = raw
        .get("generators")
        .ok_or_else(|| Error::schema("generators", "missing"))?
        .as_array()
        .ok_or_else(|| Error::schema("generators", "expected an array of matrices"))?;
    if gens.len() != n {
        return Err(Error::schema(
            "generators",
            format!("expected {n} matrices (n), got {}", gens.len()),
        ));
    }
    let mut matrices = Vec::with_capacity(n);
    for (k, g) in gens.iter().enumerate() {
        let field = format!("generators[{k}]");
        let rows = g
            .as_array()
            .ok_or_else(|| Error::schema(&field, "expected an array of rows"))?;
        if rows.len() != d {
            return Err(Error::schema(
                &field,
                format!("expected {d} rows (d), got {}", rows.len()),
            ));
        }
        let mut parsed = Vec::with_capacity(d);
        for (r, row) in rows.iter().enumerate() {
            let field = format!("generators[{k}][{r}]");
            let cells = row
                .as_array()
                .ok_or_else(|| Error::schema(&field, "expected an array of entries"))?;
            if cells.len() != d {
                return Err(Error::schema(
                    &field,
                    format!("expected {d} entries (d), got {}", cells.len()),
                ));
            }
            let mut out = Vec::with_capacity(d);
            for (c, cell) in cells.iter().enumerate() {
                let field = format!("generators[{k}][{r}][{c}]");
                let value = match cell {
                    Value::String(s) => parse_bigint_value(s.trim()),
                    Value::Number(num) => num
                        .as_i64()
                        .map(Into::into)
                        .or_else(|| num.as_u64().map(Into::into)),
                    _ => None,
                };
                out.push(value.ok_or_else(|| {
                    Error::schema(&field, format!("expected a decimal integer string, got {cell}"))
                })?);
            }
            parsed.push(out);
        }
        matrices.push(IntMatrix::new(parsed)?);
    }
    ActionSpec::new(matrices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn heisenberg_is_valid() {
        let s = validate_spec(&json!({"d": 2, "n": 1, "generators": [[["1","1"],["0","1"]]]}))
            .unwrap();
        assert_eq!((s.d, s.n), (2, 1));
    }

    #[test]
    fn rejects_non_commuting() {
        let raw = json!({"d": 2, "n": 2, "generators": [
            [["1","1"],["0","1"]], [["1","0"],["1","1"]]
        ]});
        assert_eq!(
            validate_spec(&raw),
            Err(Error::NotCommuting { first: 0, second: 1 })
        );
    }

    #[test]
    fn rejects_determinant_two() {
        let raw = json!({"d": 2, "n": 1, "generators": [[["2","0"],["0","1"]]]});
        assert_eq!(
            validate_spec(&raw),
            Err(Error::GeneratorNotUnimodular { index: 0, det: "2".into() })
        );
    }

    #[test]
    fn schema_errors_name_the_field() {
        let raw = json!({"d": 2, "n": 1, "generators": [[["1","x"],["0","1"]]]});
        match validate_spec(&raw) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "generators[0][0][1]"),
            other => panic!("unexpected {other:?}"),
        }
        let raw = json!({"d": 0, "n": 1, "generators": []});
        assert!(matches!(validate_spec(&raw), Err(Error::Schema { field, .. }) if field == "d"));
        let raw = json!({"d": 2, "n": 1, "generators": [[["1","0"]]]});
        assert!(matches!(validate_spec(&raw), Err(Error::Schema { field, .. }) if field == "generators[0]"));
    }

    #[test]
    fn round_trip() {
        let s = ActionSpec::single(IntMatrix::from_i64(&[[2, 1], [1, 1]])).unwrap();
        assert_eq!(ActionSpec::from_json_str(&s.to_json_pretty()).unwrap(), s);
    }
}
