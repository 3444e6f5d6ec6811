//! JSON schemas, CSV reports, and file plumbing.
//!
//! Saved JSON is canonical: objects carry their keys in sorted order
//! (serde_json's default map is ordered) and floats print in shortest
//! round-trip form, so `save(load(x))` is a fixed point after one pass.
//! Syntax errors surface as [`Error::ParseError`] with the line and column
//! from the parser; shape errors as [`Error::SchemaError`] naming the
//! field. Malformed rationals inside an otherwise well-formed document are
//! located by searching the source text, so they too report a position.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::degeneration::SweepReport;
use crate::error::{Error, Result};
use crate::lattice::LatticeConfig;
use crate::patch::PatchSpec;
use crate::rat::Rat;
use crate::subdivision::{Decomposition, Lifting, Regularity, Source};

/// A degeneration experiment: the patch, the lifting driving the family,
/// an optional separately-supplied decomposition (for distance probes
/// against surfaces the lifting does not induce), the `t` schedule, the
/// sampling resolution and the output directory.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub spec: PatchSpec,
    pub lifting: Lifting,
    pub decomposition: Option<Vec<Vec<usize>>>,
    pub schedule: Vec<f64>,
    pub resolution: usize,
    pub output: PathBuf,
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::IoError {
        context: format!("reading {}", path.display()),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|source| Error::IoError {
                context: format!("creating {}", parent.display()),
                source,
            })?;
        }
    }
    fs::write(path, text).map_err(|source| Error::IoError {
        context: format!("writing {}", path.display()),
        source,
    })
}

fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::ParseError {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Canonical serialization: sorted keys, two-space indent, one trailing
/// newline.
pub fn to_canonical(value: &Value) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("json values always serialize");
    out.push('\n');
    out
}

fn schema<T>(message: String) -> Result<T> {
    Err(Error::SchemaError { message })
}

fn as_object<'v>(v: &'v Value, what: &str) -> Result<&'v Map<String, Value>> {
    match v.as_object() {
        Some(m) => Ok(m),
        None => schema(format!("field `{what}`: expected an object")),
    }
}

fn get<'v>(map: &'v Map<String, Value>, name: &str) -> Result<&'v Value> {
    match map.get(name) {
        Some(v) => Ok(v),
        None => schema(format!("field `{name}` is missing")),
    }
}

fn as_array<'v>(v: &'v Value, what: &str) -> Result<&'v [Value]> {
    match v.as_array() {
        Some(a) => Ok(a.as_slice()),
        None => schema(format!("field `{what}`: expected an array")),
    }
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    match v.as_u64() {
        Some(n) => Ok(n as usize),
        None => schema(format!("field `{what}`: expected a nonnegative integer")),
    }
}

fn as_i64(v: &Value, what: &str) -> Result<i64> {
    match v.as_i64() {
        Some(n) => Ok(n),
        None => schema(format!("field `{what}`: expected an integer")),
    }
}

fn as_f64(v: &Value, what: &str) -> Result<f64> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => schema(format!("field `{what}`: expected a finite number")),
    }
}

/// 1-based line and column of the first occurrence of `needle`, so that
/// value-level errors can still point into the source text.
fn locate(text: &str, needle: &str) -> (usize, usize) {
    match text.find(needle) {
        None => (0, 0),
        Some(pos) => {
            let before = &text[..pos];
            let line = before.bytes().filter(|&b| b == b'\n').count() + 1;
            let column = pos - before.rfind('\n').map_or(0, |k| k + 1) + 1;
            (line, column)
        }
    }
}

/// A rational from a JSON integer, float, or `"p/q"` string.
fn rational(v: &Value, what: &str, text: &str) -> Result<Rat> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                return Ok(Rat::int(i));
            }
            match n.as_f64().and_then(Rat::from_f64) {
                Some(r) => Ok(r),
                None => schema(format!("field `{what}`: number out of range")),
            }
        }
        Value::String(s) => s.parse::<Rat>().map_err(|message| {
            let (line, column) = locate(text, &format!("\"{s}\""));
            Error::ParseError {
                line,
                column,
                message,
            }
        }),
        _ => schema(format!(
            "field `{what}`: expected an integer, a float, or a `p/q` string"
        )),
    }
}

fn weight(v: &Value, what: &str, text: &str) -> Result<f64> {
    match v {
        Value::Number(_) => as_f64(v, what),
        _ => Ok(rational(v, what, text)?.to_f64()),
    }
}

fn config_from_value(v: &Value) -> Result<LatticeConfig> {
    let map = as_object(v, "config")?;
    let dim = as_usize(get(map, "dim")?, "dim")?;
    let mut points = Vec::new();
    for (k, row) in as_array(get(map, "points")?, "points")?.iter().enumerate() {
        let what = format!("points[{k}]");
        let row = as_array(row, &what)?;
        let mut p = Vec::with_capacity(row.len());
        for c in row {
            p.push(as_i64(c, &what)?);
        }
        points.push(p);
    }
    LatticeConfig::new(dim, points)
}

fn lifting_from_value(v: &Value, text: &str) -> Result<Lifting> {
    let entries = as_array(v, "lifting")?;
    let mut values = Vec::with_capacity(entries.len());
    for (k, e) in entries.iter().enumerate() {
        values.push(rational(e, &format!("lifting[{k}]"), text)?);
    }
    Ok(Lifting::new(values))
}

fn facets_from_value(v: &Value) -> Result<Vec<Vec<usize>>> {
    let rows = as_array(v, "facets")?;
    let mut facets = Vec::with_capacity(rows.len());
    for (k, row) in rows.iter().enumerate() {
        let what = format!("facets[{k}]");
        let row = as_array(row, &what)?;
        let mut members = Vec::with_capacity(row.len());
        for label in row {
            members.push(as_usize(label, &what)?);
        }
        facets.push(members);
    }
    Ok(facets)
}

/// `{"dim": d, "points": [[..],..]}`.
pub fn parse_config(text: &str) -> Result<LatticeConfig> {
    config_from_value(&parse_value(text)?)
}

/// A bare JSON array of rationals.
pub fn parse_lifting(text: &str) -> Result<Lifting> {
    lifting_from_value(&parse_value(text)?, text)
}

/// `{"config": .., "lifting": [..]}`.
pub fn parse_decompose_input(text: &str) -> Result<(LatticeConfig, Lifting)> {
    let value = parse_value(text)?;
    let map = as_object(&value, "input")?;
    let config = config_from_value(get(map, "config")?)?;
    let lifting = lifting_from_value(get(map, "lifting")?, text)?;
    Ok((config, lifting))
}

/// `{"config": .., "facets": [[..],..]}`.
pub fn parse_facets_input(text: &str) -> Result<(LatticeConfig, Vec<Vec<usize>>)> {
    let value = parse_value(text)?;
    let map = as_object(&value, "input")?;
    let config = config_from_value(get(map, "config")?)?;
    let facets = facets_from_value(get(map, "facets")?)?;
    Ok((config, facets))
}

/// `{"config": .., "weights": [..], "control_points": [[..],..]}`; weights
/// accept rational strings or floats.
pub fn parse_patch_spec(text: &str) -> Result<PatchSpec> {
    let value = parse_value(text)?;
    patch_spec_from_value(&value, text)
}

fn patch_spec_from_value(value: &Value, text: &str) -> Result<PatchSpec> {
    let map = as_object(value, "spec")?;
    let config = config_from_value(get(map, "config")?)?;
    let mut weights = Vec::new();
    for (k, w) in as_array(get(map, "weights")?, "weights")?.iter().enumerate() {
        weights.push(weight(w, &format!("weights[{k}]"), text)?);
    }
    let mut control_points = Vec::new();
    for (k, row) in as_array(get(map, "control_points")?, "control_points")?
        .iter()
        .enumerate()
    {
        let what = format!("control_points[{k}]");
        let row = as_array(row, &what)?;
        let mut b = Vec::with_capacity(row.len());
        for c in row {
            b.push(as_f64(c, &what)?);
        }
        control_points.push(b);
    }
    PatchSpec::new(config, weights, control_points)
}

/// Experiment file; `spec`, `lifting` and the optional `decomposition` are
/// paths relative to the experiment file itself.
pub fn load_experiment(path: &Path) -> Result<Experiment> {
    let text = read_text(path)?;
    let value = parse_value(&text)?;
    let map = as_object(&value, "experiment")?;
    let base = path.parent().unwrap_or(Path::new(""));
    let resolve = |v: &Value, what: &str| -> Result<PathBuf> {
        match v.as_str() {
            Some(s) => Ok(base.join(s)),
            None => schema(format!("field `{what}`: expected a file path string")),
        }
    };

    let spec_path = resolve(get(map, "spec")?, "spec")?;
    let spec_text = read_text(&spec_path)?;
    let spec = parse_patch_spec(&spec_text)?;

    let lifting_path = resolve(get(map, "lifting")?, "lifting")?;
    let lifting_text = read_text(&lifting_path)?;
    let lifting = parse_lifting(&lifting_text)?;

    let decomposition = match map.get("decomposition") {
        None | Some(Value::Null) => None,
        Some(v) => {
            let deco_path = resolve(v, "decomposition")?;
            let deco_text = read_text(&deco_path)?;
            let (_, facets) = parse_facets_input(&deco_text)?;
            Some(facets)
        }
    };

    let mut schedule = Vec::new();
    for (k, t) in as_array(get(map, "schedule")?, "schedule")?.iter().enumerate() {
        schedule.push(as_f64(t, &format!("schedule[{k}]"))?);
    }
    if schedule.is_empty() {
        return schema("field `schedule`: must be nonempty".into());
    }
    let resolution = as_usize(get(map, "resolution")?, "resolution")?;
    if resolution < 2 {
        return Err(Error::BadResolution { m: resolution });
    }
    let output = resolve(get(map, "output")?, "output")?;
    Ok(Experiment {
        spec,
        lifting,
        decomposition,
        schedule,
        resolution,
        output,
    })
}

pub fn config_to_value(config: &LatticeConfig) -> Value {
    json!({
        "dim": config.dim(),
        "points": config.points(),
    })
}

pub fn patch_spec_to_value(spec: &PatchSpec) -> Value {
    json!({
        "config": config_to_value(spec.config()),
        "weights": spec.weights(),
        "control_points": spec.control_points(),
    })
}

/// Decomposition with its faces, orphan labels, provenance and regularity
/// status; `facets` alone round-trips through [`parse_facets_input`].
pub fn decomposition_to_value(deco: &Decomposition) -> Value {
    let facets: Vec<&[usize]> = deco.facets().map(|f| f.members.as_slice()).collect();
    let faces: Vec<Value> = deco
        .faces()
        .iter()
        .map(|f| json!({"members": f.members, "dimension": f.dimension}))
        .collect();
    let source = match &deco.source {
        Source::FromLifting(l) => json!({ "lifting": l }),
        Source::UserSupplied => Value::String("user".into()),
    };
    let regularity = serde_json::to_value(&deco.regularity).expect("regularity serializes");
    json!({
        "facets": facets,
        "faces": faces,
        "no_face_labels": deco.no_face_labels(),
        "source": source,
        "regularity": regularity,
    })
}

/// `t, hausdorff, sampling_pitch, threshold, pass` rows, one per sweep
/// entry, already sorted by `t`.
pub fn sweep_csv(report: &SweepReport) -> String {
    let mut out = String::from("t,hausdorff,sampling_pitch,threshold,pass\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.t, row.hausdorff, row.sampling_pitch, row.threshold, row.pass
        ));
    }
    out
}

/// Whether a decomposition's stored regularity is `Regular`.
pub fn is_regular(deco: &Decomposition) -> bool {
    matches!(deco.regularity, Regularity::Regular { .. })
}
