//! JSON schemas for every kernel type, and the canonical writer.
//!
//! Masses and probability levels are read exactly: JSON numbers through their
//! shortest decimal form, strings as decimals or `p/q` fractions. Output is
//! canonical: keys sorted, no whitespace, floats with 17 significant digits.

use std::fmt::{self, Write as _};

use dualutil_core::elicit::Prospects;
use dualutil_core::eu::TableUtility;
use dualutil_core::measure::MeasureKind;
use dualutil_core::num::to_f64;
use dualutil_core::{
    Comparison, DiscreteMeasure, DistortionFunction, Error, FiniteRandomVariable, IntervalPartition, OutcomePoint,
    PreferenceDataset, Rational, Relation, StepQuantile, UtilityFunction,
};
use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{Map, Value};

/// A validation failure located at a JSON path such as `atoms[2].mass`.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{field}: {message}")]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: impl Into<String>, message: impl fmt::Display) -> Self {
        Self { field: field.into(), message: message.to_string() }
    }

    fn within(self, prefix: &str) -> Self {
        let field = if self.field.is_empty() {
            prefix.to_string()
        } else if self.field.starts_with('[') {
            format!("{prefix}{}", self.field)
        } else {
            format!("{prefix}.{}", self.field)
        };
        Self { field, message: self.message }
    }
}

type Result<T> = std::result::Result<T, FieldError>;

fn join(base: &str, key: &str) -> String {
    if base.is_empty() {
        key.to_string()
    } else {
        format!("{base}.{key}")
    }
}

/// Attaches a kernel error to the field it concerns. Errors that carry an
/// index into a named array point at that element.
fn located(base: &str, e: Error) -> FieldError {
    let indexed = |what: &str, index: usize| {
        let key = what.rsplit(' ').next().unwrap_or(what);
        format!("{}[{index}]", join(base, key))
    };
    match &e {
        Error::NotMonotone { what, index } | Error::NotIncreasing { what, index } => {
            FieldError::new(indexed(what, *index), e)
        }
        Error::Invalid { what: "distortion", .. } => FieldError::new(format!("{}[0]", join(base, "values")), e),
        Error::Invalid { what, .. } => FieldError::new(join(base, what.rsplit(' ').next().unwrap_or(what)), e),
        _ => FieldError::new(base, e),
    }
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| FieldError::new("", format!("invalid JSON: {e}")))
}

fn object<'a>(v: &'a Value, field: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| FieldError::new(field, "expected an object"))
}

fn get<'a>(obj: &'a Map<String, Value>, base: &str, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| FieldError::new(join(base, key), "missing field"))
}

fn array<'a>(v: &'a Value, field: &str) -> Result<&'a [Value]> {
    v.as_array().map(Vec::as_slice).ok_or_else(|| FieldError::new(field, "expected an array"))
}

fn float(v: &Value, field: &str) -> Result<f64> {
    let x = match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => parse_exact(s).map(|r| to_f64(&r)),
        _ => None,
    };
    match x {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(FieldError::new(field, "expected a finite number")),
    }
}

fn floats(v: &Value, field: &str) -> Result<Vec<f64>> {
    array(v, field)?.iter().enumerate().map(|(i, x)| float(x, &format!("{field}[{i}]"))).collect()
}

/// A number read as the exact rational of its decimal spelling.
fn exact(v: &Value, field: &str) -> Result<Rational> {
    let parsed = match v {
        Value::Number(n) => match (n.as_i64(), n.as_f64()) {
            (Some(i), _) => Some(Rational::from_integer(i.into())),
            (None, Some(f)) if f.is_finite() => parse_exact(&format!("{f}")),
            _ => None,
        },
        Value::String(s) => parse_exact(s),
        _ => None,
    };
    parsed.ok_or_else(|| FieldError::new(field, "expected a number, a decimal string or a p/q fraction"))
}

fn exacts(v: &Value, field: &str) -> Result<Vec<Rational>> {
    array(v, field)?.iter().enumerate().map(|(i, x)| exact(x, &format!("{field}[{i}]"))).collect()
}

/// Parses `-12.5e-3` style decimals and `p/q` fractions exactly.
pub fn parse_exact(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        return (!q.is_zero()).then(|| Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut n: BigInt = format!("{whole}{frac}").parse().ok()?;
    if negative {
        n = -n;
    }
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let power = num_traits::pow(ten, scale.unsigned_abs() as usize);
    Some(if scale >= 0 { Rational::from_integer(n * power) } else { Rational::new(n, power) })
}

fn point(v: &Value, field: &str) -> Result<OutcomePoint> {
    let coords = match v {
        Value::Array(_) => floats(v, field)?,
        _ => vec![float(v, field)?],
    };
    OutcomePoint::new(coords).map_err(|e| located(field, e))
}

pub fn measure(v: &Value) -> Result<DiscreteMeasure> {
    let obj = object(v, "")?;
    let kind = match obj.get("kind") {
        None => "probability",
        Some(k) => k.as_str().ok_or_else(|| FieldError::new("kind", "expected a string"))?,
    };
    let atoms = array(get(obj, "", "atoms")?, "atoms")?;
    let mut parsed = Vec::with_capacity(atoms.len());
    for (i, a) in atoms.iter().enumerate() {
        let field = format!("atoms[{i}]");
        let a = object(a, &field)?;
        let p = point(get(a, &field, "point")?, &join(&field, "point"))?;
        let m = exact(get(a, &field, "mass")?, &join(&field, "mass"))?;
        parsed.push((p, m));
    }
    let dims = parsed.first().map(|(p, _)| p.dim());
    let built = match kind {
        "probability" => DiscreteMeasure::probability(parsed),
        "signed" => DiscreteMeasure::signed(dims.unwrap_or(1), parsed),
        other => return Err(FieldError::new("kind", format!("unknown kind {other:?}"))),
    };
    built.map_err(|e| match e {
        Error::NegativeMass(i) | Error::ZeroMass(i) => FieldError::new(format!("atoms[{i}].mass"), e),
        Error::DimensionMismatch { .. } => FieldError::new("atoms", e),
        e => located("atoms", e),
    })
}

pub fn random_variable(v: &Value) -> Result<FiniteRandomVariable> {
    let obj = object(v, "")?;
    let weights = exacts(get(obj, "", "weights")?, "weights")?;
    let values = floats(get(obj, "", "values")?, "values")?;
    FiniteRandomVariable::new(weights, values).map_err(|e| match e {
        Error::NegativeMass(i) => FieldError::new(format!("weights[{i}]"), "weights must be positive"),
        e => located("", e),
    })
}

/// A single random variable or an array of them.
pub fn random_variables(v: &Value) -> Result<Vec<FiniteRandomVariable>> {
    match v {
        Value::Array(items) => items
            .iter()
            .enumerate()
            .map(|(i, x)| random_variable(x).map_err(|e| e.within(&format!("[{i}]"))))
            .collect(),
        _ => Ok(vec![random_variable(v)?]),
    }
}

pub fn quantile(v: &Value) -> Result<StepQuantile> {
    let obj = object(v, "")?;
    let levels = exacts(get(obj, "", "levels")?, "levels")?;
    let values = floats(get(obj, "", "values")?, "values")?;
    StepQuantile::new(levels, values).map_err(|e| located("", e))
}

pub fn utility(v: &Value) -> Result<UtilityFunction> {
    let obj = object(v, "")?;
    let kind = get(obj, "", "kind")?.as_str().ok_or_else(|| FieldError::new("kind", "expected a string"))?;
    let values = floats(get(obj, "", "values")?, "values")?;
    match kind {
        "pwl" => {
            let knots = floats(get(obj, "", "knots")?, "knots")?;
            UtilityFunction::piecewise_linear(knots, values).map_err(|e| located("", e))
        }
        "table" => {
            let raw = array(get(obj, "", "points")?, "points")?;
            let points =
                raw.iter().enumerate().map(|(i, p)| point(p, &format!("points[{i}]"))).collect::<Result<Vec<_>>>()?;
            UtilityFunction::table(points, values).map_err(|e| located("", e))
        }
        other => Err(FieldError::new("kind", format!("unknown utility kind {other:?}, expected \"pwl\" or \"table\""))),
    }
}

pub fn distortion(v: &Value) -> Result<DistortionFunction> {
    let obj = object(v, "")?;
    let knots = floats(get(obj, "", "knots")?, "knots")?;
    let values = floats(get(obj, "", "values")?, "values")?;
    DistortionFunction::new(knots, values).map_err(|e| located("", e))
}

/// `{"cuts":[…]}` or a bare array of cuts.
pub fn partition(v: &Value) -> Result<IntervalPartition> {
    let (cuts, field) = match v {
        Value::Object(obj) => (get(obj, "", "cuts")?, "cuts"),
        _ => (v, ""),
    };
    let cuts = floats(cuts, field)?;
    IntervalPartition::new(cuts).map_err(|e| located("", e))
}

/// `{"betas":[…]}` or a bare array of levels.
pub fn betas(v: &Value) -> Result<Vec<Rational>> {
    match v {
        Value::Object(obj) => exacts(get(obj, "", "betas")?, "betas"),
        _ => exacts(v, ""),
    }
}

pub fn dataset(v: &Value) -> Result<PreferenceDataset> {
    let obj = object(v, "")?;
    let mode = get(obj, "", "mode")?.as_str().ok_or_else(|| FieldError::new("mode", "expected a string"))?;
    let raw = array(get(obj, "", "prospects")?, "prospects")?;
    let within = |i: usize| move |e: FieldError| e.within(&format!("prospects[{i}]"));
    let prospects = match mode {
        "eu" => Prospects::Eu(
            raw.iter().enumerate().map(|(i, p)| measure(p).map_err(within(i))).collect::<Result<Vec<_>>>()?,
        ),
        "dual" => Prospects::Dual(
            raw.iter().enumerate().map(|(i, p)| quantile(p).map_err(within(i))).collect::<Result<Vec<_>>>()?,
        ),
        other => return Err(FieldError::new("mode", format!("unknown mode {other:?}, expected \"eu\" or \"dual\""))),
    };
    let raw = array(get(obj, "", "comparisons")?, "comparisons")?;
    let mut comparisons = Vec::with_capacity(raw.len());
    for (k, c) in raw.iter().enumerate() {
        let field = format!("comparisons[{k}]");
        let triple = array(c, &field)?;
        let [l, r, j] = triple else {
            return Err(FieldError::new(field, "expected [left, relation, right]"));
        };
        let index = |x: &Value, at: usize| {
            x.as_u64().map(|i| i as usize).ok_or_else(|| FieldError::new(format!("{field}[{at}]"), "expected an index"))
        };
        let relation = match r.as_str() {
            Some("succ") => Relation::Succ,
            Some("sim") => Relation::Sim,
            _ => return Err(FieldError::new(format!("{field}[1]"), "expected \"succ\" or \"sim\"")),
        };
        comparisons.push(Comparison { left: index(l, 0)?, relation, right: index(j, 2)? });
    }
    PreferenceDataset::new(prospects, comparisons).map_err(|e| FieldError::new("comparisons", e))
}

pub fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn numbers<'a>(xs: impl IntoIterator<Item = &'a f64>) -> Value {
    Value::Array(xs.into_iter().map(|&x| number(x)).collect())
}

fn rationals<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Value {
    Value::Array(xs.into_iter().map(|x| number(to_f64(x))).collect())
}

fn point_value(p: &OutcomePoint) -> Value {
    numbers(p.coords())
}

pub fn measure_value(m: &DiscreteMeasure) -> Value {
    let atoms = m
        .atoms()
        .iter()
        .map(|a| serde_json::json!({ "point": point_value(&a.point), "mass": number(to_f64(&a.mass)) }))
        .collect();
    let kind = match m.kind() {
        MeasureKind::Probability => "probability",
        MeasureKind::Signed => "signed",
    };
    serde_json::json!({ "kind": kind, "atoms": Value::Array(atoms) })
}

pub fn quantile_value(q: &StepQuantile) -> Value {
    serde_json::json!({ "levels": rationals(q.levels()), "values": numbers(q.values()) })
}

pub fn utility_value(u: &UtilityFunction) -> Value {
    match u {
        UtilityFunction::PiecewiseLinear(f) => {
            serde_json::json!({ "kind": "pwl", "knots": numbers(f.knots()), "values": numbers(f.values()) })
        }
        UtilityFunction::Table(t) => table_value(t),
    }
}

fn table_value(t: &TableUtility) -> Value {
    let points = t.points().iter().map(point_value).collect();
    serde_json::json!({ "kind": "table", "points": Value::Array(points), "values": numbers(t.values()) })
}

pub fn distortion_value(w: &DistortionFunction) -> Value {
    serde_json::json!({ "knots": numbers(w.knots()), "values": numbers(w.values()) })
}

pub fn betas_value(betas: &[Rational]) -> Value {
    rationals(betas)
}

/// Compact JSON with sorted keys, integers verbatim and floats in
/// `d.dddddddddddddddde±x` form, followed by a newline.
pub fn canonical(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else {
                write_float(out, n.as_f64().expect("finite number"));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(items) => {
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, x);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("string serializes"));
                out.push(':');
                write_value(out, &map[k]);
            }
            out.push('}');
        }
    }
}

fn write_float(out: &mut String, x: f64) {
    if x == 0.0 {
        // no signed zero in canonical output
        out.push_str("0.0000000000000000e0");
    } else {
        write!(out, "{x:.16e}").unwrap();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn exact_decimals_and_fractions() {
        assert_eq!(parse_exact("0.1"), Some(r(1, 10)));
        assert_eq!(parse_exact("-2.5e-1"), Some(r(-1, 4)));
        assert_eq!(parse_exact("3e2"), Some(r(300, 1)));
        assert_eq!(parse_exact("1/3"), Some(r(1, 3)));
        assert_eq!(parse_exact(".5"), Some(r(1, 2)));
        assert_eq!(parse_exact("1/0"), None);
        assert_eq!(parse_exact("abc"), None);
        assert_eq!(parse_exact("."), None);
    }

    #[test]
    fn float_masses_are_read_through_their_decimal() {
        let m = measure(&parse(r#"{"kind":"probability","atoms":[{"point":[0],"mass":0.1},{"point":[1],"mass":0.9}]}"#).unwrap())
            .unwrap();
        assert_eq!(m.atoms()[0].mass, r(1, 10));
    }

    #[test]
    fn canonical_form_sorts_and_formats() {
        let v = parse(r#"{"b":[1,0.5,-0.0],"a":{"y":true,"x":null},"c":"s"}"#).unwrap();
        assert_eq!(
            canonical(&v),
            "{\"a\":{\"x\":null,\"y\":true},\"b\":[1,5.0000000000000000e-1,0.0000000000000000e0],\"c\":\"s\"}\n"
        );
    }

    #[test]
    fn canonical_floats_round_trip() {
        for x in [0.1, 1e-10, 1.0 / 3.0, -1e-300, 123456.789, f64::MAX, 5e-324] {
            let text = canonical(&number(x));
            assert_eq!(text.trim().parse::<f64>().unwrap(), x);
            assert_eq!(parse(&text).unwrap().as_f64(), Some(x));
        }
    }

    #[test]
    fn quantile_diagnostics_name_the_index() {
        let e = quantile(&parse(r#"{"levels":[0.5,0.75,1],"values":[0,2,1]}"#).unwrap()).unwrap_err();
        assert_eq!(e.field, "values[2]");
        let e = quantile(&parse(r#"{"levels":[0.5,0.4,1],"values":[0,1,2]}"#).unwrap()).unwrap_err();
        assert_eq!(e.field, "levels[1]");
        let e = quantile(&parse(r#"{"levels":[0.5,1],"values":[0,"x"]}"#).unwrap()).unwrap_err();
        assert_eq!(e.field, "values[1]");
    }

    #[test]
    fn distortion_diagnostics() {
        let e = distortion(&parse(r#"{"knots":[0,0.5,1],"values":[0.1,0.7,1]}"#).unwrap()).unwrap_err();
        assert_eq!(e.field, "values[0]");
        let e = distortion(&parse(r#"{"knots":[0,0.5,1],"values":[0,0.7,0.6]}"#).unwrap()).unwrap_err();
        assert_eq!(e.field, "values[2]");
        let e = distortion(&parse(r#"{"knots":[0,0.5],"values":[0,0.7]}"#).unwrap()).unwrap_err();
        assert_eq!(e.field, "knots");
    }

    #[test]
    fn measure_diagnostics() {
        let e = measure(&parse(r#"{"atoms":[{"point":[0],"mass":0.5},{"point":[1],"mass":-1}]}"#).unwrap()).unwrap_err();
        assert_eq!(e.field, "atoms[1].mass");
        let e = measure(&parse(r#"{"atoms":[{"point":[0]}]}"#).unwrap()).unwrap_err();
        assert_eq!(e.field, "atoms[0].mass");
        let e = measure(&parse(r#"{"kind":"weird","atoms":[]}"#).unwrap()).unwrap_err();
        assert_eq!(e.field, "kind");
    }

    #[test]
    fn dataset_diagnostics() {
        let text = r#"{"mode":"eu","prospects":[{"atoms":[{"point":[0],"mass":1}]},{"atoms":[{"point":[1],"mass":"x"}]}],"comparisons":[]}"#;
        assert_eq!(dataset(&parse(text).unwrap()).unwrap_err().field, "prospects[1].atoms[0].mass");
        let text = r#"{"mode":"eu","prospects":[{"atoms":[{"point":[0],"mass":1}]}],"comparisons":[[0,"gt",0]]}"#;
        assert_eq!(dataset(&parse(text).unwrap()).unwrap_err().field, "comparisons[0][1]");
        let text = r#"{"mode":"eu","prospects":[{"atoms":[{"point":[0],"mass":1}]}],"comparisons":[[0,"succ",4]]}"#;
        assert_eq!(dataset(&parse(text).unwrap()).unwrap_err().field, "comparisons");
    }

    #[test]
    fn schemas_round_trip() {
        let m = DiscreteMeasure::from_pairs(&[(-1.0, 0.25), (2.0, 0.75)]).unwrap();
        assert_eq!(measure(&parse(&canonical(&measure_value(&m))).unwrap()).unwrap(), m);
        let q = m.quantile().unwrap();
        assert_eq!(quantile(&parse(&canonical(&quantile_value(&q))).unwrap()).unwrap(), q);
        let w = DistortionFunction::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.7, 1.0]).unwrap();
        assert_eq!(distortion(&parse(&canonical(&distortion_value(&w))).unwrap()).unwrap(), w);
        let u = UtilityFunction::table(vec![OutcomePoint::scalar(0.0), OutcomePoint::scalar(1.0)], vec![0.0, 1.0]).unwrap();
        assert_eq!(utility(&parse(&canonical(&utility_value(&u))).unwrap()).unwrap(), u);
        let u = UtilityFunction::piecewise_linear(vec![0.0, 1.0], vec![0.0, 2.0]).unwrap();
        assert_eq!(utility(&parse(&canonical(&utility_value(&u))).unwrap()).unwrap(), u);
    }
}
