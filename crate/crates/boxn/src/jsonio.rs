//! Stable JSON file formats. Rationals are strings `p/q`, words are
//! space-separated generator labels with `e` for the identity, and
//! every persisted artifact round-trips bit-exactly: no floats are
//! ever written.

use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::augmentation::{GeneratorDecomposition, Side, SquareExpression};
use crate::certificates::{OrderUnit, SosCertificate};
use crate::groups::{FiniteAbelianizationWitness, GroupKind, GroupModel, WitnessEntry, Word};
use crate::ringalg::{format_scalar, parse_scalar, RingElement, RingMatrix};
use crate::{Error, Result};

fn obj(entries: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in entries {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

fn get<'v>(v: &'v Value, key: &str) -> Result<&'v Value> {
    v.get(key)
        .ok_or_else(|| Error::Parse(format!("missing key {key:?}")))
}

fn as_str<'v>(v: &'v Value, what: &str) -> Result<&'v str> {
    v.as_str()
        .ok_or_else(|| Error::Parse(format!("{what} must be a string")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::Parse(format!("{what} must be a nonnegative integer")))
}

fn as_array<'v>(v: &'v Value, what: &str) -> Result<&'v Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("{what} must be an array")))
}

// ---------------------------------------------------------------------
// groups
// ---------------------------------------------------------------------

pub fn group_to_value(group: &GroupModel) -> Value {
    let mut entries: Vec<(&str, Value)> = Vec::new();
    match &group.kind {
        GroupKind::Free { rank } => {
            entries.push(("kind", json!("free")));
            entries.push(("rank", json!(rank)));
            // the alphabet interleaves (name, inverse) pairs, so the
            // positive generators sit at the even indices
            let positives: Vec<String> = (0..*rank)
                .map(|i| group.alphabet.name(2 * i as u32).to_string())
                .collect();
            entries.push(("generators", json!(positives)));
        }
        GroupKind::Finite {
            elements, table, ..
        } => {
            entries.push(("kind", json!("finite")));
            entries.push(("elements", json!(elements)));
            entries.push(("generators", json!(group.alphabet.names())));
            entries.push((
                "table",
                Value::Array(table.iter().map(|row| json!(row)).collect()),
            ));
        }
        GroupKind::Presented { rules } => {
            entries.push(("kind", json!("presented")));
            entries.push(("generators", json!(group.alphabet.names())));
            let mut inv = Map::new();
            for i in 0..group.alphabet.len() as u32 {
                inv.insert(
                    group.alphabet.name(i).to_string(),
                    json!(group.alphabet.name(group.alphabet.inverse(i))),
                );
            }
            entries.push(("inverses", Value::Object(inv)));
            let rules_json: Vec<Value> = rules
                .iter()
                .map(|(l, r)| {
                    json!([
                        Word(l.clone()).render(&group.alphabet),
                        Word(r.clone()).render(&group.alphabet)
                    ])
                })
                .collect();
            entries.push(("rules", Value::Array(rules_json)));
        }
    }
    if let Some(w) = &group.witness {
        let mut wmap = Map::new();
        for (gi, entry) in &w.entries {
            let commutators: Vec<Value> = entry
                .commutators
                .iter()
                .map(|(a, b)| json!([a.render(&group.alphabet), b.render(&group.alphabet)]))
                .collect();
            wmap.insert(
                group.alphabet.name(*gi).to_string(),
                obj(vec![
                    ("m", json!(entry.exponent)),
                    ("commutators", Value::Array(commutators)),
                ]),
            );
        }
        entries.push(("witnesses", Value::Object(wmap)));
    }
    obj(entries)
}

/// Loads a group from its JSON value. Returns the model plus warnings
/// (confluence spot-check findings, witness completions).
pub fn group_from_value(v: &Value) -> Result<(Arc<GroupModel>, Vec<String>)> {
    let kind = as_str(get(v, "kind")?, "kind")?;
    let mut warnings = Vec::new();
    let mut group: Arc<GroupModel> = match kind {
        "free" => {
            let rank = as_usize(get(v, "rank")?, "rank")?;
            match v.get("generators") {
                Some(g) => {
                    let names: Vec<String> = as_array(g, "generators")?
                        .iter()
                        .map(|n| as_str(n, "generator name").map(String::from))
                        .collect::<Result<_>>()?;
                    if names.len() != rank {
                        return Err(Error::InvalidGroup(format!(
                            "rank {rank} with {} generator names",
                            names.len()
                        )));
                    }
                    GroupModel::free_named(&names)
                }
                None => GroupModel::free(rank),
            }
        }
        "finite" => {
            let elements: Vec<String> = as_array(get(v, "elements")?, "elements")?
                .iter()
                .map(|n| as_str(n, "element name").map(String::from))
                .collect::<Result<_>>()?;
            let table: Vec<Vec<usize>> = as_array(get(v, "table")?, "table")?
                .iter()
                .map(|row| {
                    as_array(row, "table row")?
                        .iter()
                        .map(|x| as_usize(x, "table entry"))
                        .collect()
                })
                .collect::<Result<_>>()?;
            let generators: Vec<String> = as_array(get(v, "generators")?, "generators")?
                .iter()
                .map(|n| as_str(n, "generator name").map(String::from))
                .collect::<Result<_>>()?;
            GroupModel::finite(elements, table, generators)?
        }
        "presented" => {
            let names: Vec<String> = as_array(get(v, "generators")?, "generators")?
                .iter()
                .map(|n| as_str(n, "generator name").map(String::from))
                .collect::<Result<_>>()?;
            let inverses = get(v, "inverses")?
                .as_object()
                .ok_or_else(|| Error::Parse("inverses must be an object".into()))?;
            let mut pairs = Vec::new();
            for n in &names {
                let inv = match inverses.get(n) {
                    Some(x) => as_str(x, "inverse label")?.to_string(),
                    None => {
                        return Err(Error::InvalidGroup(format!(
                            "generator {n} has no declared inverse"
                        )))
                    }
                };
                pairs.push((n.clone(), inv));
            }
            let rules: Vec<(Vec<String>, Vec<String>)> = as_array(get(v, "rules")?, "rules")?
                .iter()
                .map(|r| {
                    let pair = as_array(r, "rule")?;
                    if pair.len() != 2 {
                        return Err(Error::Parse("rules are [lhs, rhs] pairs".into()));
                    }
                    let split = |s: &str| -> Vec<String> {
                        if s.trim() == "e" || s.trim().is_empty() {
                            Vec::new()
                        } else {
                            s.split_whitespace().map(String::from).collect()
                        }
                    };
                    Ok((
                        split(as_str(&pair[0], "rule lhs")?),
                        split(as_str(&pair[1], "rule rhs")?),
                    ))
                })
                .collect::<Result<_>>()?;
            let model = GroupModel::presented(pairs, rules)?;
            warnings.extend(model.confluence_spot_check(500));
            model
        }
        other => return Err(Error::InvalidGroup(format!("unknown kind {other:?}"))),
    };
    if let Some(w) = v.get("witnesses") {
        let wobj = w
            .as_object()
            .ok_or_else(|| Error::Parse("witnesses must be an object".into()))?;
        let mut witness = FiniteAbelianizationWitness::default();
        for (name, entry) in wobj {
            let gi = group
                .alphabet
                .index_of(name)
                .ok_or_else(|| Error::UnknownGenerator(name.clone()))?;
            let m = get(entry, "m")?
                .as_u64()
                .ok_or_else(|| Error::Parse("witness exponent must be an integer".into()))?;
            let commutators: Vec<(Word, Word)> = match entry.get("commutators") {
                None => Vec::new(),
                Some(c) => as_array(c, "commutators")?
                    .iter()
                    .map(|pair| {
                        let pair = as_array(pair, "commutator pair")?;
                        if pair.len() != 2 {
                            return Err(Error::Parse("commutators are [a, b] pairs".into()));
                        }
                        Ok((
                            Word::parse(as_str(&pair[0], "word")?, &group.alphabet)?,
                            Word::parse(as_str(&pair[1], "word")?, &group.alphabet)?,
                        ))
                    })
                    .collect::<Result<_>>()?,
            };
            witness.entries.insert(
                gi,
                WitnessEntry {
                    exponent: m,
                    commutators,
                },
            );
        }
        group.validate_witness(&witness)?;
        let before = witness.entries.len();
        group.complete_witness(&mut witness);
        if witness.entries.len() > before {
            warnings.push("witness entries for inverse generators were derived".into());
        }
        let inner = Arc::get_mut(&mut group).expect("freshly built model");
        inner.witness = Some(witness);
    }
    Ok((group, warnings))
}

pub fn load_group_file(path: &Path) -> Result<(Arc<GroupModel>, Vec<String>)> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    group_from_value(&v)
}

// ---------------------------------------------------------------------
// elements and matrices
// ---------------------------------------------------------------------

fn terms_to_value(e: &RingElement) -> Value {
    let alphabet = &e.group().alphabet;
    Value::Array(
        e.terms()
            .iter()
            .map(|(w, c)| {
                obj(vec![
                    ("g", json!(w.render(alphabet))),
                    ("c", json!(format_scalar(c))),
                ])
            })
            .collect(),
    )
}

/// Element with its group inlined; the standalone file format.
pub fn element_to_value(e: &RingElement) -> Value {
    obj(vec![
        ("group", group_to_value(e.group())),
        ("terms", terms_to_value(e)),
    ])
}

/// Element without group context, for nesting inside larger artifacts.
pub fn element_to_value_bare(e: &RingElement) -> Value {
    obj(vec![("terms", terms_to_value(e))])
}

fn terms_from_value(v: &Value, group: &Arc<GroupModel>) -> Result<RingElement> {
    let terms = as_array(get(v, "terms")?, "terms")?;
    let mut pairs = Vec::new();
    for t in terms {
        let w = Word::parse(as_str(get(t, "g")?, "g")?, &group.alphabet)?;
        let c = parse_scalar(as_str(get(t, "c")?, "c")?)?;
        pairs.push((w, c));
    }
    RingElement::from_terms(group, pairs)
}

/// Reads an element. The `group` key may be an inline object or a path
/// (resolved against `base_dir`); an explicit `group` argument
/// overrides and must then match the alphabet.
pub fn element_from_value(
    v: &Value,
    group: Option<&Arc<GroupModel>>,
    base_dir: &Path,
) -> Result<RingElement> {
    let group = match (group, v.get("group")) {
        (Some(g), _) => g.clone(),
        (None, Some(Value::String(path))) => {
            let p = base_dir.join(path);
            load_group_file(&p)?.0
        }
        (None, Some(inline)) => group_from_value(inline)?.0,
        (None, None) => {
            return Err(Error::Parse(
                "element file has no group; pass --group or inline it".into(),
            ))
        }
    };
    terms_from_value(v, &group)
}

pub fn load_element_file(path: &Path, group: Option<&Arc<GroupModel>>) -> Result<RingElement> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    element_from_value(&v, group, base)
}

pub fn matrix_to_value_bare(m: &RingMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| {
            Value::Array(
                (0..m.cols())
                    .map(|j| element_to_value_bare(m.at(i, j)))
                    .collect(),
            )
        })
        .collect();
    obj(vec![
        ("cols", json!(m.cols())),
        ("entries", Value::Array(rows)),
        ("rows", json!(m.rows())),
    ])
}

/// Matrix with its group inlined; the standalone file format.
pub fn matrix_to_value(m: &RingMatrix) -> Value {
    let mut v = matrix_to_value_bare(m);
    v.as_object_mut()
        .unwrap()
        .insert("group".into(), group_to_value(m.group()));
    v
}

pub fn matrix_from_value(v: &Value, group: &Arc<GroupModel>) -> Result<RingMatrix> {
    let rows = as_usize(get(v, "rows")?, "rows")?;
    let cols = as_usize(get(v, "cols")?, "cols")?;
    let entries = as_array(get(v, "entries")?, "entries")?;
    if entries.len() != rows {
        return Err(Error::Parse("entry rows do not match shape".into()));
    }
    let mut out = Vec::with_capacity(rows);
    for row in entries {
        let row = as_array(row, "matrix row")?;
        if row.len() != cols {
            return Err(Error::Parse("entry columns do not match shape".into()));
        }
        out.push(
            row.iter()
                .map(|e| terms_from_value(e, group))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    RingMatrix::from_rows(out)
}

// ---------------------------------------------------------------------
// certificates
// ---------------------------------------------------------------------

pub fn certificate_to_value(cert: &SosCertificate) -> Value {
    let order_unit = match &cert.order_unit {
        None => Value::Null,
        Some(OrderUnit::Element(e)) => element_to_value_bare(e),
        Some(OrderUnit::Matrix(m)) => matrix_to_value_bare(m),
    };
    obj(vec![
        ("group", group_to_value(cert.group())),
        ("k", json!(cert.k)),
        ("lambda", json!(format_scalar(&cert.lambda))),
        ("order_unit", order_unit),
        (
            "weights",
            Value::Array(
                cert.weights
                    .iter()
                    .map(|w| json!(format_scalar(w)))
                    .collect(),
            ),
        ),
        (
            "summands",
            Value::Array(
                cert.summands
                    .iter()
                    .map(|row| Value::Array(row.iter().map(element_to_value_bare).collect()))
                    .collect(),
            ),
        ),
        ("target", matrix_to_value_bare(&cert.target)),
    ])
}

pub fn certificate_from_value(
    v: &Value,
    group: Option<&Arc<GroupModel>>,
    base_dir: &Path,
) -> Result<SosCertificate> {
    let group = match (group, v.get("group")) {
        (Some(g), _) => g.clone(),
        (None, Some(Value::String(path))) => load_group_file(&base_dir.join(path))?.0,
        (None, Some(inline)) => group_from_value(inline)?.0,
        (None, None) => return Err(Error::Parse("certificate has no group".into())),
    };
    let k = as_usize(get(v, "k")?, "k")?;
    let lambda = parse_scalar(as_str(get(v, "lambda")?, "lambda")?)?;
    let order_unit = match get(v, "order_unit")? {
        Value::Null => None,
        m if m.get("rows").is_some() => Some(OrderUnit::Matrix(matrix_from_value(m, &group)?)),
        e => Some(OrderUnit::Element(terms_from_value(e, &group)?)),
    };
    let weights = as_array(get(v, "weights")?, "weights")?
        .iter()
        .map(|w| parse_scalar(as_str(w, "weight")?))
        .collect::<Result<Vec<_>>>()?;
    let summands = as_array(get(v, "summands")?, "summands")?
        .iter()
        .map(|row| {
            as_array(row, "summand row")?
                .iter()
                .map(|e| terms_from_value(e, &group))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let target = matrix_from_value(get(v, "target")?, &group)?;
    Ok(SosCertificate {
        k,
        weights,
        summands,
        target,
        lambda,
        order_unit,
    })
}

pub fn load_certificate_file(
    path: &Path,
    group: Option<&Arc<GroupModel>>,
) -> Result<SosCertificate> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    certificate_from_value(&v, group, base)
}

// ---------------------------------------------------------------------
// square expressions and generator decompositions
// ---------------------------------------------------------------------

pub fn square_expression_to_value(expr: &SquareExpression, group: &Arc<GroupModel>) -> Value {
    let depth2 = expr.terms.iter().all(|(_, fs)| fs.len() == 2);
    let terms: Vec<Value> = expr
        .terms
        .iter()
        .map(|(lambda, factors)| {
            if depth2 {
                obj(vec![
                    ("lambda", json!(format_scalar(lambda))),
                    ("left", element_to_value_bare(&factors[0])),
                    ("right", element_to_value_bare(&factors[1])),
                ])
            } else {
                obj(vec![
                    ("lambda", json!(format_scalar(lambda))),
                    (
                        "factors",
                        Value::Array(factors.iter().map(element_to_value_bare).collect()),
                    ),
                ])
            }
        })
        .collect();
    obj(vec![
        ("group", group_to_value(group)),
        ("terms", Value::Array(terms)),
    ])
}

pub fn square_expression_from_value(
    v: &Value,
    group: Option<&Arc<GroupModel>>,
) -> Result<(SquareExpression, Arc<GroupModel>)> {
    let group = match (group, v.get("group")) {
        (Some(g), _) => g.clone(),
        (None, Some(inline)) => group_from_value(inline)?.0,
        (None, None) => return Err(Error::Parse("expression has no group".into())),
    };
    let mut terms = Vec::new();
    for t in as_array(get(v, "terms")?, "terms")? {
        let lambda = parse_scalar(as_str(get(t, "lambda")?, "lambda")?)?;
        let factors = if let Some(fs) = t.get("factors") {
            as_array(fs, "factors")?
                .iter()
                .map(|f| terms_from_value(f, &group))
                .collect::<Result<Vec<_>>>()?
        } else {
            vec![
                terms_from_value(get(t, "left")?, &group)?,
                terms_from_value(get(t, "right")?, &group)?,
            ]
        };
        terms.push((lambda, factors));
    }
    Ok((SquareExpression::new(terms)?, group))
}

pub fn decomposition_to_value(d: &GeneratorDecomposition, group: &Arc<GroupModel>) -> Value {
    let mut coeffs = Map::new();
    for (gi, a) in &d.coefficients {
        coeffs.insert(
            group.alphabet.name(*gi).to_string(),
            element_to_value_bare(a),
        );
    }
    obj(vec![
        ("coefficients", Value::Object(coeffs)),
        ("group", group_to_value(group)),
        (
            "side",
            json!(match d.side {
                Side::Left => "left",
                Side::Right => "right",
            }),
        ),
    ])
}

/// Renders any value as pretty JSON with a trailing newline; the key
/// order is canonical (alphabetical) so outputs are byte-stable.
pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON serialization");
    s.push('\n');
    s
}

pub fn write_json_file(path: &Path, v: &Value) -> Result<()> {
    std::fs::write(path, to_json_string(v))?;
    Ok(())
}
