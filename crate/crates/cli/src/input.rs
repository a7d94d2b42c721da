//! JSON input files: kernel specs, point lists, Pick problems, coefficient
//! lists, Blaschke families and multiplier/subspace descriptions.

use std::path::Path;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rkhs_core::cnp::{BlaschkeFamily, Coefficients};
use rkhs_core::fock::{MultiIndex, Polynomial};
use rkhs_core::kernels::{KernelSpec, Nodes, PointSet};
use rkhs_core::linalg::HermitianMatrix;
use rkhs_core::pick::PickProblem;
use serde_json::{Map, Value};

use crate::report::Failure;

pub type Parsed<T> = std::result::Result<T, Failure>;

fn bad(msg: impl Into<String>) -> Failure {
    Failure::input(msg)
}

/// Reads a file and parses it as JSON, returning the raw bytes as well.
pub fn read_json(path: &Path) -> Parsed<(Value, Vec<u8>)> {
    let bytes = std::fs::read(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    let value = serde_json::from_slice(&bytes)
        .map_err(|e| bad(format!("{}: malformed JSON: {e}", path.display())))?;
    Ok((value, bytes))
}

pub fn parse_inline(field: &str, text: &str) -> Parsed<Value> {
    serde_json::from_str(text).map_err(|e| bad(format!("{field}: malformed JSON: {e}")))
}

fn object<'a>(v: &'a Value, what: &str) -> Parsed<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| bad(format!("{what}: expected a JSON object")))
}

fn field<'a>(m: &'a Map<String, Value>, what: &str, key: &str) -> Parsed<&'a Value> {
    m.get(key)
        .ok_or_else(|| bad(format!("{what}: missing field `{key}`")))
}

fn array<'a>(v: &'a Value, what: &str) -> Parsed<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| bad(format!("{what}: expected an array")))
}

fn number(v: &Value, what: &str) -> Parsed<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| bad(format!("{what}: expected a finite number")))
}

fn only_keys(m: &Map<String, Value>, what: &str, allowed: &[&str]) -> Parsed<()> {
    match m.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(bad(format!("{what}: unknown field `{k}`"))),
        None => Ok(()),
    }
}

/// `[re, im]`.
pub fn complex(v: &Value, what: &str) -> Parsed<Complex64> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok(Complex64::new(
            number(re, &format!("{what}[0]"))?,
            number(im, &format!("{what}[1]"))?,
        )),
        _ => Err(bad(format!("{what}: complex numbers are [re, im] arrays"))),
    }
}

/// An integer JSON number or `{"num": "..", "den": ".."}` as an exact
/// rational; `None` for a non-integer JSON number.
fn exact_number(v: &Value, what: &str) -> Parsed<Option<BigRational>> {
    if let Some(m) = v.as_object() {
        only_keys(m, what, &["num", "den"])?;
        let part = |key: &str| -> Parsed<BigInt> {
            let s = field(m, what, key)?
                .as_str()
                .ok_or_else(|| bad(format!("{what}.{key}: expected an integer string")))?;
            s.parse()
                .map_err(|_| bad(format!("{what}.{key}: `{s}` is not an integer")))
        };
        let (num, den) = (part("num")?, part("den")?);
        if den == BigInt::from(0) {
            return Err(bad(format!("{what}.den: must be nonzero")));
        }
        return Ok(Some(BigRational::new(num, den)));
    }
    if let Some(i) = v.as_i64() {
        return Ok(Some(BigRational::from_integer(i.into())));
    }
    if let Some(u) = v.as_u64() {
        return Ok(Some(BigRational::from_integer(u.into())));
    }
    number(v, what).map(|_| None)
}

/// Coefficient list; exact when every entry is an integer or a rational
/// object.
pub fn coefficients(v: &Value, what: &str) -> Parsed<Coefficients> {
    let items = array(v, what)?;
    let mut exact = Vec::with_capacity(items.len());
    let mut floats = Vec::with_capacity(items.len());
    let mut all_exact = true;
    for (n, item) in items.iter().enumerate() {
        let w = format!("{what}[{n}]");
        match exact_number(item, &w)? {
            Some(r) => {
                floats.push(rational_f64(&r));
                exact.push(r);
            }
            None => {
                all_exact = false;
                floats.push(number(item, &w)?);
            }
        }
    }
    Ok(if all_exact {
        Coefficients::Exact(exact)
    } else {
        Coefficients::Float(floats)
    })
}

fn rational_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Coefficients of a power-series kernel spec, or a bare coefficient list.
pub fn coefficient_file(v: &Value, terms: usize) -> Parsed<Coefficients> {
    if v.is_array() {
        return coefficients(v, "coeffs");
    }
    let m = object(v, "kernel")?;
    match m.get("type").and_then(Value::as_str) {
        Some("power_series") => {}
        _ => return Err(bad("kernel: ratio tests need a power_series kernel")),
    }
    if let Some(name) = m.get("name") {
        let coeffs = named_series(name, terms)?;
        return Ok(Coefficients::Exact(
            coeffs
                .into_iter()
                .map(|a| BigRational::from_integer(BigInt::from(a as u64)))
                .collect(),
        ));
    }
    coefficients(field(m, "kernel", "coeffs")?, "kernel.coeffs")
}

fn named_series(name: &Value, terms: usize) -> Parsed<Vec<f64>> {
    match name.as_str() {
        Some("szego") | Some("hardy") => Ok(vec![1.0; terms.max(1)]),
        Some("bergman") => Ok((0..terms.max(1)).map(|n| (n + 1) as f64).collect()),
        _ => Err(bad(
            "kernel.name: expected one of \"szego\", \"hardy\", \"bergman\"",
        )),
    }
}

/// Kernel spec object. Power series may give `"coeffs"` or a `"name"`
/// truncated to `terms` coefficients.
pub fn kernel_spec(v: &Value, terms: usize, tol: f64) -> Parsed<KernelSpec> {
    let m = object(v, "kernel")?;
    let ty = field(m, "kernel", "type")?
        .as_str()
        .ok_or_else(|| bad("kernel.type: expected a string"))?;
    match ty {
        "power_series" => {
            only_keys(m, "kernel", &["type", "coeffs", "name"])?;
            let coeffs = match (m.get("coeffs"), m.get("name")) {
                (Some(c), None) => coefficients(c, "kernel.coeffs")?.to_f64(),
                (None, Some(n)) => named_series(n, terms)?,
                _ => {
                    return Err(bad(
                        "kernel: power_series needs exactly one of `coeffs` and `name`",
                    ))
                }
            };
            KernelSpec::power_series(coeffs).map_err(|e| bad(format!("kernel.coeffs: {e}")))
        }
        "drury_arveson" => {
            only_keys(m, "kernel", &["type", "dim"])?;
            let dim = field(m, "kernel", "dim")?
                .as_u64()
                .ok_or_else(|| bad("kernel.dim: expected a positive integer"))?;
            KernelSpec::drury_arveson(dim as usize).map_err(|e| bad(format!("kernel.dim: {e}")))
        }
        "sampled" => {
            only_keys(m, "kernel", &["type", "labels", "gram"])?;
            let labels = array(field(m, "kernel", "labels")?, "kernel.labels")?
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    l.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| bad(format!("kernel.labels[{i}]: expected a string")))
                })
                .collect::<Parsed<Vec<_>>>()?;
            let rows = array(field(m, "kernel", "gram")?, "kernel.gram")?
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    array(row, &format!("kernel.gram[{i}]"))?
                        .iter()
                        .enumerate()
                        .map(|(j, x)| complex(x, &format!("kernel.gram[{i}][{j}]")))
                        .collect::<Parsed<Vec<_>>>()
                })
                .collect::<Parsed<Vec<_>>>()?;
            let gram =
                HermitianMatrix::from_rows(&rows).map_err(|e| bad(format!("kernel.gram: {e}")))?;
            KernelSpec::sampled(labels, gram, tol).map_err(|e| bad(format!("kernel.gram: {e}")))
        }
        other => Err(bad(format!("kernel.type: unknown kernel type `{other}`"))),
    }
}

/// One point: `[re, im]` for a point of the disk, or a list of `[re, im]`.
pub fn point(v: &Value, what: &str) -> Parsed<Vec<Complex64>> {
    let items = array(v, what)?;
    if items.len() == 2 && items.iter().all(Value::is_number) {
        return Ok(vec![complex(v, what)?]);
    }
    items
        .iter()
        .enumerate()
        .map(|(i, x)| complex(x, &format!("{what}[{i}]")))
        .collect()
}

pub fn point_set(v: &Value, what: &str) -> Parsed<PointSet> {
    let pts = array(v, what)?
        .iter()
        .enumerate()
        .map(|(i, p)| point(p, &format!("{what}[{i}]")))
        .collect::<Parsed<Vec<_>>>()?;
    let dim = pts.first().map_or(1, Vec::len);
    PointSet::new(dim, pts).map_err(|e| bad(format!("{what}: {e}")))
}

/// Coordinate points, or label strings of a sampled kernel.
pub fn nodes(v: &Value, what: &str) -> Parsed<Nodes> {
    let items = array(v, what)?;
    if !items.is_empty() && items.iter().all(Value::is_string) {
        return Ok(Nodes::Labels(
            items
                .iter()
                .map(|s| s.as_str().unwrap_or_default().to_string())
                .collect(),
        ));
    }
    point_set(v, what).map(Nodes::Points)
}

/// `{"kernel": .., "nodes": [..], "targets": [[re, im], ..]}`.
pub fn pick_problem(v: &Value, terms: usize, tol: f64) -> Parsed<PickProblem> {
    let m = object(v, "problem")?;
    only_keys(m, "problem", &["kernel", "nodes", "targets"])?;
    let spec = kernel_spec(field(m, "problem", "kernel")?, terms, tol)?;
    let nodes = match nodes(field(m, "problem", "nodes")?, "problem.nodes")? {
        Nodes::Points(p) => p,
        Nodes::Labels(_) => return Err(bad("problem.nodes: Pick problems need coordinate nodes")),
    };
    let targets = array(field(m, "problem", "targets")?, "problem.targets")?
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let what = format!("problem.targets[{i}]");
            if t.as_array().is_some_and(|a| a.iter().any(Value::is_array)) {
                return Err(bad(format!(
                    "{what}: matrix-valued targets are not supported"
                )));
            }
            complex(t, &what)
        })
        .collect::<Parsed<Vec<_>>>()?;
    PickProblem::new(spec, nodes, targets).map_err(|e| bad(format!("problem: {e}")))
}

pub fn blaschke_family(v: &Value) -> Parsed<BlaschkeFamily> {
    serde_json::from_value(v.clone()).map_err(|e| bad(format!("family: {e}")))
}

/// Subspace of the truncated Fock space for `fock defect`.
pub enum SubspaceSpec {
    Monomials(Vec<MultiIndex>),
    KernelSpan(PointSet),
}

pub struct DefectInput {
    pub phi: Polynomial<Complex64>,
    pub subspace: SubspaceSpec,
}

fn multi_index(v: &Value, dim: usize, what: &str) -> Parsed<MultiIndex> {
    let e = array(v, what)?
        .iter()
        .map(|x| {
            x.as_u64()
                .and_then(|u| u32::try_from(u).ok())
                .ok_or_else(|| bad(format!("{what}: exponents are non-negative integers")))
        })
        .collect::<Parsed<Vec<_>>>()?;
    if e.len() != dim {
        return Err(bad(format!(
            "{what}: expected {dim} exponents, got {}",
            e.len()
        )));
    }
    Ok(MultiIndex::new(e))
}

/// `{"dim": d, "phi": [{"exponents": [..], "coeff": [re, im]}, ..],
/// "subspace": {"monomials": [[..], ..]} | {"points": [..]}}`.
pub fn defect_input(v: &Value) -> Parsed<DefectInput> {
    let m = object(v, "defect")?;
    only_keys(m, "defect", &["dim", "phi", "subspace"])?;
    let dim = field(m, "defect", "dim")?
        .as_u64()
        .filter(|&d| d > 0)
        .ok_or_else(|| bad("defect.dim: expected a positive integer"))? as usize;
    let terms = array(field(m, "defect", "phi")?, "defect.phi")?
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let what = format!("defect.phi[{i}]");
            let tm = object(t, &what)?;
            only_keys(tm, &what, &["exponents", "coeff"])?;
            Ok((
                multi_index(
                    field(tm, &what, "exponents")?,
                    dim,
                    &format!("{what}.exponents"),
                )?,
                complex(field(tm, &what, "coeff")?, &format!("{what}.coeff"))?,
            ))
        })
        .collect::<Parsed<Vec<_>>>()?;
    let phi = Polynomial::from_terms(dim, terms).map_err(|e| bad(format!("defect.phi: {e}")))?;
    let sm = object(field(m, "defect", "subspace")?, "defect.subspace")?;
    let subspace = match (sm.get("monomials"), sm.get("points"), sm.len()) {
        (Some(ms), None, 1) => SubspaceSpec::Monomials(
            array(ms, "defect.subspace.monomials")?
                .iter()
                .enumerate()
                .map(|(i, a)| multi_index(a, dim, &format!("defect.subspace.monomials[{i}]")))
                .collect::<Parsed<Vec<_>>>()?,
        ),
        (None, Some(ps), 1) => {
            let pts = point_set(ps, "defect.subspace.points")?;
            if !pts.is_empty() && pts.dim() != dim {
                return Err(bad(format!(
                    "defect.subspace.points: expected points of dimension {dim}"
                )));
            }
            SubspaceSpec::KernelSpan(pts)
        }
        _ => {
            return Err(bad(
                "defect.subspace: expected exactly one of `monomials` and `points`",
            ))
        }
    };
    Ok(DefectInput { phi, subspace })
}
