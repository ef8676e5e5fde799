//! JSON exchange format for schemes and digraphs (schema version 1).
//!
//! Readers walk a [`serde_json::Value`] by hand so every rejection carries
//! the JSON pointer of the offending field. Writers build a `Value` too;
//! its object maps are ordered, so emitted keys are always sorted.

use std::fmt;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::digraph::{arc_union, Digraph, DigraphError};
use crate::generators::{circulant_scheme, CirculantError, CirculantSpec, GenError};
use crate::scheme::{PartitionDefect, Scheme, SchemeError, MAX_CLASSES, MAX_POINTS};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum InputErrorKind {
    #[error("cannot read file: {0}")]
    Io(String),
    #[error("malformed JSON: {0}")]
    Syntax(String),
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Circulant(#[from] CirculantError),
    #[error(transparent)]
    Digraph(#[from] DigraphError),
    #[error(transparent)]
    Catalog(#[from] GenError),
}

/// A rejected input, located by a JSON pointer (`""` is the whole document).
#[derive(Debug, Error)]
pub struct InputError {
    pub pointer: String,
    pub kind: InputErrorKind,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ptr = if self.pointer.is_empty() {
            "/"
        } else {
            &self.pointer
        };
        write!(f, "at {ptr}: {}", self.kind)
    }
}

impl InputError {
    pub fn new(pointer: impl Into<String>, kind: impl Into<InputErrorKind>) -> Self {
        Self {
            pointer: pointer.into(),
            kind: kind.into(),
        }
    }

    fn schema(pointer: impl Into<String>, msg: impl Into<String>) -> Self {
        Self::new(pointer, InputErrorKind::Schema(msg.into()))
    }

    /// Prefixes the pointer, for documents nested inside another.
    pub fn within(mut self, prefix: &str) -> Self {
        self.pointer = format!("{prefix}{}", self.pointer);
        self
    }
}

fn field<'a>(obj: &'a Map<String, Value>, ptr: &str, key: &str) -> Result<&'a Value, InputError> {
    obj.get(key)
        .ok_or_else(|| InputError::schema(ptr, format!("missing field `{key}`")))
}

fn as_object<'a>(v: &'a Value, ptr: &str) -> Result<&'a Map<String, Value>, InputError> {
    v.as_object()
        .ok_or_else(|| InputError::schema(ptr, "expected an object"))
}

fn as_array<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>, InputError> {
    v.as_array()
        .ok_or_else(|| InputError::schema(ptr, "expected an array"))
}

fn as_index(v: &Value, ptr: &str) -> Result<usize, InputError> {
    v.as_u64()
        .and_then(|u| usize::try_from(u).ok())
        .ok_or_else(|| InputError::schema(ptr, "expected a non-negative integer"))
}

fn as_pair(v: &Value, ptr: &str) -> Result<(usize, usize), InputError> {
    match as_array(v, ptr)?.as_slice() {
        [x, y] => Ok((
            as_index(x, &format!("{ptr}/0"))?,
            as_index(y, &format!("{ptr}/1"))?,
        )),
        _ => Err(InputError::schema(ptr, "expected a pair [x, y]")),
    }
}

fn check_version(obj: &Map<String, Value>, required: bool) -> Result<(), InputError> {
    match obj.get("schema_version") {
        None if !required => Ok(()),
        None => Err(InputError::schema("", "missing field `schema_version`")),
        Some(v) if v.as_u64() == Some(SCHEMA_VERSION) => Ok(()),
        Some(_) => Err(InputError::schema(
            "/schema_version",
            format!("unsupported schema version (expected {SCHEMA_VERSION})"),
        )),
    }
}

fn optional_string(obj: &Map<String, Value>, key: &str) -> Result<Option<String>, InputError> {
    match obj.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(InputError::schema(format!("/{key}"), "expected a string")),
    }
}

fn parse_size(obj: &Map<String, Value>) -> Result<usize, InputError> {
    let n = as_index(field(obj, "", "size")?, "/size")?;
    if n == 0 || n > MAX_POINTS {
        return Err(InputError::new("/size", SchemeError::BadSize(n)));
    }
    Ok(n)
}

/// Parses a scheme document (explicit relations or circulant shorthand).
pub fn scheme_from_value(v: &Value) -> Result<Scheme, InputError> {
    let obj = as_object(v, "")?;
    if let Some(c) = obj.get("circulant") {
        check_version(obj, false)?;
        let scheme = circulant_from_value(c).map_err(|e| e.within("/circulant"))?;
        return Ok(match optional_string(obj, "name")? {
            Some(name) => scheme.with_name(name),
            None => scheme,
        });
    }
    check_version(obj, true)?;
    let n = parse_size(obj)?;
    let rels = as_array(field(obj, "", "relations")?, "/relations")?;
    let d = rels.len();
    if d > MAX_CLASSES {
        return Err(InputError::new(
            "/relations",
            SchemeError::TooManyClasses(d),
        ));
    }

    const UNSET: u16 = u16::MAX;
    let mut labels = vec![UNSET; n * n];
    for x in 0..n {
        labels[x * n + x] = 0;
    }
    let mut index_seen = vec![false; d + 1];
    for (k, rel) in rels.iter().enumerate() {
        let rptr = format!("/relations/{k}");
        let robj = as_object(rel, &rptr)?;
        let iptr = format!("{rptr}/index");
        let idx = as_index(field(robj, &rptr, "index")?, &iptr)?;
        if idx == 0 || idx > d {
            return Err(InputError::schema(
                iptr,
                format!("relation index must lie in 1..={d}"),
            ));
        }
        if std::mem::replace(&mut index_seen[idx], true) {
            return Err(InputError::schema(
                iptr,
                format!("relation index {idx} repeated"),
            ));
        }
        let pptr = format!("{rptr}/pairs");
        for (m, pair) in as_array(field(robj, &rptr, "pairs")?, &pptr)?
            .iter()
            .enumerate()
        {
            let ptr = format!("{pptr}/{m}");
            let (x, y) = as_pair(pair, &ptr)?;
            if x >= n || y >= n || x == y {
                return Err(InputError::new(
                    ptr,
                    SchemeError::InvalidPair {
                        relation: idx,
                        x,
                        y,
                    },
                ));
            }
            let slot = &mut labels[x * n + y];
            if *slot != UNSET {
                return Err(InputError::new(
                    ptr,
                    SchemeError::NotPartition {
                        x,
                        y,
                        kind: PartitionDefect::Duplicated,
                    },
                ));
            }
            *slot = idx as u16;
        }
    }
    if let Some(i) = labels.iter().position(|&l| l == UNSET) {
        return Err(InputError::new(
            "/relations",
            SchemeError::NotPartition {
                x: i / n,
                y: i % n,
                kind: PartitionDefect::Uncovered,
            },
        ));
    }
    let mut scheme =
        Scheme::from_labels(n, d, labels).map_err(|e| InputError::new("/relations", e))?;
    if let Some(name) = optional_string(obj, "name")? {
        scheme = scheme.with_name(name);
    }
    if let Some(prov) = optional_string(obj, "provenance")? {
        scheme = scheme.with_provenance(prov);
    }
    Ok(scheme)
}

fn circulant_from_value(v: &Value) -> Result<Scheme, InputError> {
    let obj = as_object(v, "")?;
    let modulus = as_index(field(obj, "", "modulus")?, "/modulus")?;
    if modulus == 0 || modulus > MAX_POINTS {
        return Err(InputError::new("/modulus", SchemeError::BadSize(modulus)));
    }
    let mut classes = Vec::new();
    for (k, c) in as_array(field(obj, "", "classes")?, "/classes")?
        .iter()
        .enumerate()
    {
        let cptr = format!("/classes/{k}");
        let class = as_array(c, &cptr)?
            .iter()
            .enumerate()
            .map(|(m, e)| as_index(e, &format!("{cptr}/{m}")))
            .collect::<Result<Vec<_>, _>>()?;
        classes.push(class);
    }
    circulant_scheme(&CirculantSpec::new(modulus, classes))
        .map_err(|e| InputError::new("/classes", e))
}

pub fn parse_scheme(text: &str) -> Result<Scheme, InputError> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| InputError::new("", InputErrorKind::Syntax(e.to_string())))?;
    scheme_from_value(&v)
}

fn read_text(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path)
        .map_err(|e| InputError::new("", InputErrorKind::Io(format!("{}: {e}", path.display()))))
}

pub fn read_scheme_file(path: &Path) -> Result<Scheme, InputError> {
    parse_scheme(&read_text(path)?)
}

/// Parses a digraph document. `resolve` loads the scheme named by a
/// `"scheme"` reference.
pub fn digraph_from_value(
    v: &Value,
    resolve: &dyn Fn(&str) -> Result<Scheme, InputError>,
) -> Result<Digraph, InputError> {
    let obj = as_object(v, "")?;
    if let Some(reference) = obj.get("scheme") {
        let reference = reference
            .as_str()
            .ok_or_else(|| InputError::schema("/scheme", "expected a path string"))?;
        let scheme = resolve(reference).map_err(|e| e.within("/scheme"))?;
        let rels = as_array(field(obj, "", "arc_relations")?, "/arc_relations")?
            .iter()
            .enumerate()
            .map(|(k, i)| as_index(i, &format!("/arc_relations/{k}")))
            .collect::<Result<Vec<_>, _>>()?;
        return arc_union(&scheme, &rels).map_err(|e| InputError::new("/arc_relations", e));
    }
    check_version(obj, true)?;
    let n = parse_size(obj)?;
    let mut arcs = Vec::new();
    for (m, a) in as_array(field(obj, "", "arcs")?, "/arcs")?
        .iter()
        .enumerate()
    {
        let ptr = format!("/arcs/{m}");
        let (x, y) = as_pair(a, &ptr)?;
        if x >= n || y >= n || x == y {
            return Err(InputError::new(ptr, DigraphError::InvalidArc(x, y)));
        }
        arcs.push((x, y));
    }
    Digraph::from_arcs(n, arcs).map_err(|e| InputError::new("/arcs", e))
}

/// Reads a digraph file; a `"scheme"` reference is resolved relative to the
/// file's directory.
pub fn read_digraph_file(path: &Path) -> Result<Digraph, InputError> {
    let v: Value = serde_json::from_str(&read_text(path)?)
        .map_err(|e| InputError::new("", InputErrorKind::Syntax(e.to_string())))?;
    let base: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();
    digraph_from_value(&v, &|reference| read_scheme_file(&base.join(reference)))
}

/// Serializes a scheme; pairs are listed in row-major order.
pub fn scheme_to_value(s: &Scheme) -> Value {
    let relations: Vec<Value> = (1..=s.d())
        .map(|i| {
            let pairs: Vec<Value> = s.pairs(i).map(|(x, y)| json!([x, y])).collect();
            json!({ "index": i, "pairs": pairs })
        })
        .collect();
    let mut v = json!({
        "schema_version": SCHEMA_VERSION,
        "name": s.name(),
        "size": s.size(),
        "relations": relations,
    });
    if let Some(p) = s.provenance() {
        v["provenance"] = json!(p);
    }
    v
}

pub fn digraph_to_value(g: &Digraph) -> Value {
    let arcs: Vec<Value> = g.arcs().map(|(x, y)| json!([x, y])).collect();
    json!({ "schema_version": SCHEMA_VERSION, "size": g.size(), "arcs": arcs })
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_json_string(v: &Value) -> String {
    let mut out = serde_json::to_string_pretty(v).expect("values always serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::catalog;

    #[test]
    fn round_trip() {
        let s = catalog("wreath(thin_cyclic(3),one_class(2))")
            .unwrap()
            .with_provenance("test");
        let back = parse_scheme(&to_json_string(&scheme_to_value(&s))).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.name(), s.name());
        assert_eq!(back.provenance(), Some("test"));
    }

    #[test]
    fn keys_sorted() {
        let text = to_json_string(&scheme_to_value(&catalog("thin_cyclic(3)").unwrap()));
        let name = text.find("\"name\"").unwrap();
        let rel = text.find("\"relations\"").unwrap();
        let ver = text.find("\"schema_version\"").unwrap();
        let size = text.find("\"size\"").unwrap();
        assert!(name < rel && rel < ver && ver < size);
    }

    #[test]
    fn duplicated_pair_pointer() {
        let text = r#"{"schema_version":1,"name":"z3","size":3,"relations":[
            {"index":1,"pairs":[[0,1],[1,2],[2,0]]},
            {"index":2,"pairs":[[0,2],[1,0],[2,1],[0,1]]}]}"#;
        let err = parse_scheme(text).unwrap_err();
        assert_eq!(err.pointer, "/relations/1/pairs/3");
        assert!(matches!(
            err.kind,
            InputErrorKind::Scheme(SchemeError::NotPartition {
                x: 0,
                y: 1,
                kind: PartitionDefect::Duplicated
            })
        ));
    }

    #[test]
    fn schema_errors_located() {
        let cases = [
            (
                r#"{"schema_version":2,"size":3,"relations":[]}"#,
                "/schema_version",
            ),
            (r#"{"schema_version":1,"relations":[]}"#, ""),
            (
                r#"{"schema_version":1,"size":2,"relations":[{"index":1,"pairs":[[0,"a"]]}]}"#,
                "/relations/0/pairs/0/1",
            ),
            (
                r#"{"schema_version":1,"size":2,"relations":[{"index":2,"pairs":[]}]}"#,
                "/relations/0/index",
            ),
            (
                r#"{"schema_version":1,"size":2,"relations":[{"index":1,"pairs":[[0,1]]}]}"#,
                "/relations",
            ),
            (
                r#"{"circulant":{"modulus":4,"classes":[[1,2],[3]]}}"#,
                "/circulant/classes",
            ),
            (
                r#"{"circulant":{"modulus":4,"classes":[[1],[-3]]}}"#,
                "/circulant/classes/1/0",
            ),
        ];
        for (text, ptr) in cases {
            assert_eq!(parse_scheme(text).unwrap_err().pointer, ptr, "{text}");
        }
    }

    #[test]
    fn circulant_shorthand() {
        let s = parse_scheme(r#"{"circulant":{"modulus":7,"classes":[[1,2,4],[3,5,6]]}}"#).unwrap();
        assert_eq!(s, catalog("paley_tournament(7)").unwrap());
    }

    #[test]
    fn digraph_documents() {
        let v: Value =
            serde_json::from_str(r#"{"schema_version":1,"size":3,"arcs":[[0,1],[1,2],[2,0]]}"#)
                .unwrap();
        let g = digraph_from_value(&v, &|_| unreachable!()).unwrap();
        assert_eq!(g.arc_count(), 3);

        let v: Value = serde_json::from_str(r#"{"scheme":"z4","arc_relations":[1,3]}"#).unwrap();
        let g = digraph_from_value(&v, &|_| Ok(catalog("thin_cyclic(4)").unwrap())).unwrap();
        assert_eq!(g.arc_count(), 8);

        let v: Value = serde_json::from_str(r#"{"scheme":"z4","arc_relations":[1,9]}"#).unwrap();
        let err = digraph_from_value(&v, &|_| Ok(catalog("thin_cyclic(4)").unwrap())).unwrap_err();
        assert_eq!(err.pointer, "/arc_relations");

        let v: Value =
            serde_json::from_str(r#"{"schema_version":1,"size":3,"arcs":[[0,0]]}"#).unwrap();
        assert_eq!(
            digraph_from_value(&v, &|_| unreachable!())
                .unwrap_err()
                .pointer,
            "/arcs/0"
        );
    }
}
