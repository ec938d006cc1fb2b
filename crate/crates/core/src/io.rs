//! JSON file formats.
//!
//! - Algebra: `{"name", "size", "labels"?, "constants": {sym: index},
//!   "operations": {sym: {"arity", "table"}}}` with row-major tables.
//! - Homomorphism: `{"source": name, "target": name, "map": [..]}`.
//! - Parallel pair: `{"u": hom, "v": hom}`.
//! - Point: `{"name"?, "total": name, "base": name, "p": [..], "s": [..]}`.
//! - Point morphism: `{"from": point, "to": point, "map": [..]}`.
//! - Witness: `{"schema", "m", "n", "b", "c", "p"}` with terms in nested
//!   prefix form.
//!
//! Algebras are referred to by name and resolved through a [`Registry`].
//! Nested objects may be given inline or as a path to a file, resolved
//! relative to the registry's base directory.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{Element, FiniteAlgebra, Symbol};
use crate::coeq::ParallelPair;
use crate::decide::{PWitness, Schema};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::hom::Homomorphism;
use crate::points::{Point, PointMorphism};
use crate::term::Term;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebra {
    name: String,
    size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    #[serde(default)]
    constants: BTreeMap<String, usize>,
    #[serde(default)]
    operations: BTreeMap<String, RawOperation>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperation {
    arity: usize,
    table: Vec<usize>,
}

fn format_err(what: &str, e: impl std::fmt::Display) -> Error {
    Error::Format(format!("{what}: {e}"))
}

pub fn algebra_from_json(value: &Value) -> Result<FiniteAlgebra> {
    let raw: RawAlgebra =
        serde_json::from_value(value.clone()).map_err(|e| format_err("algebra", e))?;
    let mut ops = Vec::with_capacity(raw.constants.len() + raw.operations.len());
    for (sym, idx) in raw.constants {
        if raw.operations.contains_key(&sym) {
            return Err(Error::Format(format!(
                "field `constants.{sym}`: symbol also listed under `operations`"
            )));
        }
        ops.push((Symbol::new(sym, 0), vec![idx]));
    }
    for (sym, op) in raw.operations {
        ops.push((Symbol::new(sym, op.arity), op.table));
    }
    let alg = FiniteAlgebra::new(raw.name, raw.size, ops)?;
    match raw.labels {
        Some(labels) => alg.with_labels(labels),
        None => Ok(alg),
    }
}

pub fn algebra_to_json(alg: &FiniteAlgebra) -> Value {
    let sig = alg.signature();
    let mut constants = BTreeMap::new();
    let mut operations = BTreeMap::new();
    for (i, sym) in sig.symbols().iter().enumerate() {
        let table: Vec<usize> = alg.table(i).iter().map(|&v| v as usize).collect();
        if sym.arity == 0 {
            constants.insert(sym.name.clone(), table[0]);
        } else {
            operations.insert(
                sym.name.clone(),
                RawOperation {
                    arity: sym.arity,
                    table,
                },
            );
        }
    }
    let raw = RawAlgebra {
        name: alg.name().to_string(),
        size: alg.size(),
        labels: alg.labels().map(<[String]>::to_vec),
        constants,
        operations,
    };
    serde_json::to_value(raw).expect("algebra serializes")
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

/// Named algebras available to homomorphism and point files.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    base_dir: PathBuf,
    algebras: HashMap<String, Arc<FiniteAlgebra>>,
}

impl Registry {
    pub fn new(base_dir: impl Into<PathBuf>) -> Self {
        Registry {
            base_dir: base_dir.into(),
            algebras: HashMap::new(),
        }
    }

    /// The same algebras, with files resolved relative to `base_dir`.
    pub fn rebased(&self, base_dir: impl Into<PathBuf>) -> Self {
        Registry {
            base_dir: base_dir.into(),
            algebras: self.algebras.clone(),
        }
    }

    pub fn insert(&mut self, alg: Arc<FiniteAlgebra>) -> Arc<FiniteAlgebra> {
        self.algebras
            .entry(alg.name().to_string())
            .or_insert(alg)
            .clone()
    }

    /// Loads `builtin:NAME` or an algebra file, and registers it.
    pub fn load_algebra(&mut self, spec: &str) -> Result<Arc<FiniteAlgebra>> {
        let alg = if let Some(name) = spec.strip_prefix("builtin:") {
            fixtures::builtin(name).ok_or_else(|| {
                Error::Format(format!(
                    "unknown builtin `{name}` (known: {})",
                    fixtures::BUILTIN_NAMES.join(", ")
                ))
            })?
        } else {
            algebra_from_json(&read_json(&self.path(spec))?)?
        };
        Ok(self.insert(Arc::new(alg)))
    }

    /// A registered algebra by name, then a builtin key, then a file.
    pub fn resolve(&mut self, name: &str) -> Result<Arc<FiniteAlgebra>> {
        if let Some(a) = self.algebras.get(name) {
            return Ok(a.clone());
        }
        if name.starts_with("builtin:") {
            return self.load_algebra(name);
        }
        if let Some(alg) = fixtures::builtin(name) {
            return Ok(self.insert(Arc::new(alg)));
        }
        if self.path(name).is_file() {
            return self.load_algebra(name);
        }
        Err(Error::Format(format!("unknown algebra `{name}`")))
    }

    fn path(&self, p: &str) -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Inline objects are returned as is; strings are read as file paths.
    fn inline_or_file(&self, value: &Value) -> Result<Value> {
        match value {
            Value::String(p) => read_json(&self.path(p)),
            other => Ok(other.clone()),
        }
    }
}

fn field<'a>(value: &'a Value, what: &str, key: &str) -> Result<&'a Value> {
    value
        .get(key)
        .ok_or_else(|| Error::Format(format!("{what}: missing field `{key}`")))
}

fn name_field(value: &Value, what: &str, key: &str) -> Result<String> {
    field(value, what, key)?
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| Error::Format(format!("{what}: field `{key}` must be an algebra name")))
}

/// Element lists: indices or labels of `alg`.
fn element_list(value: &Value, what: &str, key: &str, alg: &FiniteAlgebra) -> Result<Vec<Element>> {
    let items = field(value, what, key)?
        .as_array()
        .ok_or_else(|| Error::Format(format!("{what}: field `{key}` must be an array")))?;
    items
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let e = match v {
                Value::Number(n) => n.as_u64().map(|n| n as usize),
                Value::String(s) => alg.element(s),
                _ => None,
            };
            e.filter(|&e| e < alg.size()).ok_or_else(|| {
                Error::Format(format!(
                    "{what}: field `{key}[{i}]` = {v} is not an element of `{}`",
                    alg.name()
                ))
            })
        })
        .collect()
}

pub fn hom_from_json(value: &Value, reg: &mut Registry) -> Result<Homomorphism> {
    let value = reg.inline_or_file(value)?;
    let source = reg.resolve(&name_field(&value, "homomorphism", "source")?)?;
    let target = reg.resolve(&name_field(&value, "homomorphism", "target")?)?;
    let map = element_list(&value, "homomorphism", "map", &target)?;
    Homomorphism::new(source, target, map)
}

pub fn hom_to_json(h: &Homomorphism) -> Value {
    json!({"source": h.source().name(), "target": h.target().name(), "map": h.map()})
}

pub fn pair_from_json(value: &Value, reg: &mut Registry) -> Result<ParallelPair> {
    let value = reg.inline_or_file(value)?;
    let u = hom_from_json(field(&value, "pair", "u")?, reg)?;
    let v = hom_from_json(field(&value, "pair", "v")?, reg)?;
    ParallelPair::new(u, v)
}

pub fn point_from_json(value: &Value, reg: &mut Registry) -> Result<Point> {
    let value = reg.inline_or_file(value)?;
    let total = reg.resolve(&name_field(&value, "point", "total")?)?;
    let base = reg.resolve(&name_field(&value, "point", "base")?)?;
    let p = Homomorphism::new(
        total.clone(),
        base.clone(),
        element_list(&value, "point", "p", &base)?,
    )?;
    let s = Homomorphism::new(
        base,
        total.clone(),
        element_list(&value, "point", "s", &total)?,
    )?;
    Point::new(p, s)
}

pub fn point_to_json(pt: &Point) -> Value {
    json!({
        "total": pt.total().name(),
        "base": pt.base().name(),
        "p": pt.p().map(),
        "s": pt.s().map(),
    })
}

pub fn point_morphism_from_json(value: &Value, reg: &mut Registry) -> Result<PointMorphism> {
    let value = reg.inline_or_file(value)?;
    let from = point_from_json(field(&value, "point morphism", "from")?, reg)?;
    let to = point_from_json(field(&value, "point morphism", "to")?, reg)?;
    let map = element_list(&value, "point morphism", "map", to.total())?;
    let f = Homomorphism::new(from.total().clone(), to.total().clone(), map)?;
    PointMorphism::new(&from, &to, f)
}

/// Variable names used when serializing witness terms.
pub fn witness_variables(schema: Schema, m: usize) -> (Vec<String>, Vec<String>, Vec<String>) {
    let b = vec!["x".to_string(), "y".to_string()];
    let c = match schema {
        Schema::Global => vec!["z".to_string()],
        Schema::Local => vec!["u".to_string(), "v".to_string()],
    };
    let mut p = b.clone();
    p.extend((1..=m).map(|j| format!("t{j}")));
    (b, c, p)
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

pub fn witness_to_json(w: &PWitness, alg: &FiniteAlgebra, schema: Schema) -> Value {
    let sig = alg.signature();
    let (bv, cv, pv) = witness_variables(schema, w.m);
    let terms = |ts: &[Term], vars: &[String]| -> Vec<Value> {
        ts.iter().map(|t| t.to_json(sig, &refs(vars))).collect()
    };
    json!({
        "schema": schema,
        "m": w.m,
        "n": w.n,
        "b": terms(&w.b, &bv),
        "c": terms(&w.c, &cv),
        "p": terms(&w.p, &pv),
    })
}

pub fn witness_from_json(value: &Value, alg: &FiniteAlgebra) -> Result<(Schema, PWitness)> {
    let what = "witness";
    let schema: Schema = serde_json::from_value(field(value, what, "schema")?.clone())
        .map_err(|e| format_err("witness: field `schema`", e))?;
    let count = |key: &str| -> Result<usize> {
        field(value, what, key)?
            .as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| Error::Format(format!("{what}: field `{key}` must be a count")))
    };
    let (m, n) = (count("m")?, count("n")?);
    let (bv, cv, pv) = witness_variables(schema, m);
    let sig = alg.signature();
    let terms = |key: &str, vars: &[String]| -> Result<Vec<Term>> {
        field(value, what, key)?
            .as_array()
            .ok_or_else(|| Error::Format(format!("{what}: field `{key}` must be an array")))?
            .iter()
            .enumerate()
            .map(|(i, t)| {
                Term::from_json(t, sig, &refs(vars))
                    .map_err(|e| Error::Format(format!("{what}: field `{key}[{i}]`: {e}")))
            })
            .collect()
    };
    let w = PWitness {
        m,
        n,
        b: terms("b", &bv)?,
        c: terms("c", &cv)?,
        p: terms("p", &pv)?,
    };
    Ok((schema, w))
}
