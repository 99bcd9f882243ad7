//! JSON input and output for algebras, modules, complexes, short exact
//! sequences and tables.
//!
//! Matrices are arrays of rows. An `algebra` entry is either a path, resolved
//! relative to the referring file, or an inline algebra object.

use crate::algebra::{Algebra, AlgebraData};
use crate::complex::{ChainMap, Complex};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::module::Module;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub type Rows = Vec<Vec<i64>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraRef {
    Path(String),
    Inline(AlgebraData),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraRef>,
    pub dim: usize,
    pub action: Vec<Rows>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraRef>,
    pub modules: BTreeMap<String, ModuleFile>,
    #[serde(default)]
    pub differentials: BTreeMap<String, Rows>,
}

/// A module or a complex; modules sit in degree 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObjectFile {
    Complex(ComplexFile),
    Module(ModuleFile),
}

/// A chain map as one matrix (degree 0) or per degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapFile {
    Single(Rows),
    ByDegree(BTreeMap<String, Rows>),
}

/// `0 -> left --mu--> middle --mu1--> right -> 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SesFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraRef>,
    pub left: ObjectFile,
    pub middle: ObjectFile,
    pub right: ObjectFile,
    pub mu: MapFile,
    pub mu1: MapFile,
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::ParseError(format!("{what}: {e}")))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::ParseError(format!("{}: {e}", path.display())))
}

fn context(key: &str, e: Error) -> Error {
    match e {
        Error::ParseError(s) => Error::ParseError(format!("{key}: {s}")),
        Error::ValidationError(s) => Error::ValidationError(format!("{key}: {s}")),
        Error::ShapeMismatch(s) => Error::ShapeMismatch(format!("{key}: {s}")),
        other => other,
    }
}

/// Resolves algebra references and caches loaded files by path.
pub struct Loader {
    base: PathBuf,
    algebras: BTreeMap<PathBuf, Algebra>,
}

impl Loader {
    pub fn new(base: impl Into<PathBuf>) -> Loader {
        Loader { base: base.into(), algebras: BTreeMap::new() }
    }

    /// A loader whose relative paths resolve next to `file`.
    pub fn beside(file: &Path) -> Loader {
        Loader::new(file.parent().map(Path::to_path_buf).unwrap_or_default())
    }

    pub fn algebra_ref(&mut self, r: &AlgebraRef) -> Result<Algebra> {
        match r {
            AlgebraRef::Inline(d) => Algebra::validate(d.clone()),
            AlgebraRef::Path(p) => self.algebra_file(&self.base.join(p)),
        }
    }

    pub fn algebra_file(&mut self, path: &Path) -> Result<Algebra> {
        if let Some(a) = self.algebras.get(path) {
            return Ok(a.clone());
        }
        let data: AlgebraData = parse_json(&read(path)?, &path.display().to_string())?;
        let alg = Algebra::validate(data).map_err(|e| context(&path.display().to_string(), e))?;
        self.algebras.insert(path.to_path_buf(), alg.clone());
        Ok(alg)
    }

    fn pick(&mut self, own: &Option<AlgebraRef>, outer: Option<&Algebra>, key: &str) -> Result<Algebra> {
        match (own, outer) {
            (Some(r), outer) => {
                let a = self.algebra_ref(r).map_err(|e| context(&format!("{key}.algebra"), e))?;
                if outer.is_some_and(|o| *o != a) {
                    return Err(Error::AlgebraMismatch);
                }
                Ok(a)
            }
            (None, Some(o)) => Ok(o.clone()),
            (None, None) => Err(Error::ValidationError(format!("{key}: missing `algebra`"))),
        }
    }

    pub fn module(&mut self, f: &ModuleFile, outer: Option<&Algebra>, key: &str) -> Result<Module> {
        let alg = self.pick(&f.algebra, outer, key)?;
        let action = f
            .action
            .iter()
            .enumerate()
            .map(|(i, rows)| matrix(&alg, rows, f.dim, f.dim).map_err(|e| context(&format!("{key}.action[{i}]"), e)))
            .collect::<Result<Vec<_>>>()?;
        Module::new(&alg, f.dim, action).map_err(|e| context(key, e))
    }

    pub fn complex(&mut self, f: &ComplexFile, outer: Option<&Algebra>, key: &str) -> Result<Complex> {
        let alg = match (&f.algebra, outer) {
            (None, None) => {
                let first = f.modules.iter().find_map(|(k, m)| m.algebra.as_ref().map(|a| (k, a)));
                let (k, r) = first.ok_or_else(|| Error::ValidationError(format!("{key}: missing `algebra`")))?;
                self.algebra_ref(r).map_err(|e| context(&format!("{key}.modules.{k}.algebra"), e))?
            }
            _ => self.pick(&f.algebra, outer, key)?,
        };
        let mut mods = BTreeMap::new();
        for (k, m) in &f.modules {
            let n = degree(k, &format!("{key}.modules"))?;
            mods.insert(n, self.module(m, Some(&alg), &format!("{key}.modules.{k}"))?);
        }
        mods.retain(|_, m| !m.is_zero());
        let Some((&lo, _)) = mods.first_key_value() else {
            for k in f.differentials.keys() {
                degree(k, &format!("{key}.differentials"))?;
            }
            if f.differentials.values().any(|r| r.iter().flatten().any(|&x| x != 0)) {
                return Err(Error::ShapeMismatch(format!("{key}: nonzero differential on the zero complex")));
            }
            return Ok(Complex::zero(&alg));
        };
        let hi = *mods.last_key_value().unwrap().0;
        let get = |n: i64| mods.get(&n).cloned().unwrap_or_else(|| Module::zero(&alg));
        let mut diffs = BTreeMap::new();
        for (k, rows) in &f.differentials {
            let n = degree(k, &format!("{key}.differentials"))?;
            let dk = format!("{key}.differentials.{k}");
            let m = matrix(&alg, rows, get(n - 1).dim(), get(n).dim()).map_err(|e| context(&dk, e))?;
            if !(lo < n && n <= hi) && !m.is_zero() {
                return Err(Error::ShapeMismatch(format!("{dk}: differential leaves the support [{lo}, {hi}]")));
            }
            diffs.insert(n, m);
        }
        let ds = (lo + 1..=hi)
            .map(|n| diffs.get(&n).cloned().unwrap_or_else(|| Matrix::zeros(alg.p(), get(n - 1).dim(), get(n).dim())))
            .collect();
        Complex::new(&alg, lo, (lo..=hi).map(get).collect(), ds).map_err(|e| context(key, e))
    }

    pub fn object(&mut self, f: &ObjectFile, outer: Option<&Algebra>, key: &str) -> Result<Complex> {
        match f {
            ObjectFile::Module(m) => Ok(Complex::concentrated(&self.module(m, outer, key)?, 0)),
            ObjectFile::Complex(c) => self.complex(c, outer, key),
        }
    }

    pub fn object_file(&mut self, path: &Path) -> Result<Complex> {
        let f: ObjectFile = parse_json(&read(path)?, &path.display().to_string())?;
        let mut sub = Loader { base: path.parent().map(Path::to_path_buf).unwrap_or_default(), algebras: std::mem::take(&mut self.algebras) };
        let out = sub.object(&f, None, &path.display().to_string());
        self.algebras = sub.algebras;
        out
    }

    pub fn module_file(&mut self, path: &Path) -> Result<Module> {
        let c = self.object_file(path)?;
        module_of(&c).ok_or_else(|| Error::ValidationError(format!("{}: expected a module", path.display())))
    }

    pub fn ses(&mut self, f: &SesFile) -> Result<(ChainMap, ChainMap)> {
        let outer = f.algebra.as_ref().map(|r| self.algebra_ref(r)).transpose()?;
        let left = self.object(&f.left, outer.as_ref(), "left")?;
        let alg = left.algebra().clone();
        let middle = self.object(&f.middle, Some(&alg), "middle")?;
        let right = self.object(&f.right, Some(&alg), "right")?;
        let mu = chain_map(&left, &middle, &f.mu, "mu")?;
        let mu1 = chain_map(&middle, &right, &f.mu1, "mu1")?;
        Ok((mu, mu1))
    }

    pub fn ses_file(&mut self, path: &Path) -> Result<(ChainMap, ChainMap)> {
        let f: SesFile = parse_json(&read(path)?, &path.display().to_string())?;
        let mut sub = Loader { base: path.parent().map(Path::to_path_buf).unwrap_or_default(), algebras: std::mem::take(&mut self.algebras) };
        let out = sub.ses(&f).map_err(|e| context(&path.display().to_string(), e));
        self.algebras = sub.algebras;
        out
    }
}

fn degree(k: &str, key: &str) -> Result<i64> {
    k.trim().parse().map_err(|_| Error::ParseError(format!("{key}: degree key {k:?} is not an integer")))
}

/// Entries must be canonical residues.
pub fn matrix(alg: &Algebra, rows: &Rows, r: usize, c: usize) -> Result<Matrix> {
    let p = alg.p() as i64;
    // an empty row list stands for any matrix with no entries
    if rows.is_empty() && (r == 0 || c == 0) {
        return Ok(Matrix::zeros(alg.p(), r, c));
    }
    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
        let got = (rows.len(), rows.first().map_or(0, Vec::len));
        return Err(Error::ShapeMismatch(format!("expected a {r}x{c} matrix, got {}x{}", got.0, got.1)));
    }
    if let Some(x) = rows.iter().flatten().find(|&&x| !(0..p).contains(&x)) {
        return Err(Error::ValidationError(format!("entry {x} is not a residue in [0, {p})")));
    }
    Ok(Matrix::from_rows(alg.p(), r, c, rows))
}

pub fn chain_map(src: &Complex, tgt: &Complex, f: &MapFile, key: &str) -> Result<ChainMap> {
    let alg = src.algebra();
    let by: BTreeMap<i64, Matrix> = match f {
        MapFile::Single(rows) => [(0, matrix(alg, rows, tgt.dim(0), src.dim(0)).map_err(|e| context(key, e))?)].into(),
        MapFile::ByDegree(m) => m
            .iter()
            .map(|(k, rows)| {
                let n = degree(k, key)?;
                Ok((n, matrix(alg, rows, tgt.dim(n), src.dim(n)).map_err(|e| context(&format!("{key}.{k}"), e))?))
            })
            .collect::<Result<_>>()?,
    };
    ChainMap::new(src, tgt, 0, |n| by.get(&n).cloned().unwrap_or_else(|| Matrix::zeros(alg.p(), tgt.dim(n), src.dim(n))))
        .map_err(|e| context(key, e))
}

pub fn module_of(c: &Complex) -> Option<Module> {
    match (c.inf(), c.sup()) {
        (None, _) => Some(Module::zero(c.algebra())),
        (Some(0), Some(0)) => Some(c.module(0)),
        _ => None,
    }
}

pub fn parse_algebra(text: &str) -> Result<Algebra> {
    Algebra::validate(parse_json(text, "algebra")?)
}

/// Parse a module or complex whose algebra, if given by path, resolves against `base`.
pub fn parse_object(text: &str, base: &Path) -> Result<Complex> {
    Loader::new(base).object(&parse_json(text, "input")?, None, "input")
}

pub fn rows(m: &Matrix) -> Rows {
    (0..m.rows()).map(|r| m.row(r).iter().map(|&x| x as i64).collect()).collect()
}

pub fn module_file(m: &Module, inline_algebra: bool) -> ModuleFile {
    ModuleFile {
        algebra: inline_algebra.then(|| AlgebraRef::Inline(m.algebra().data().clone())),
        dim: m.dim(),
        action: m.actions().iter().map(rows).collect(),
    }
}

pub fn complex_file(c: &Complex) -> ComplexFile {
    let mut modules = BTreeMap::new();
    let mut differentials = BTreeMap::new();
    if let (Some(lo), Some(hi)) = (c.inf(), c.sup()) {
        for n in lo..=hi {
            modules.insert(n.to_string(), module_file(&c.module(n), false));
            if n > lo {
                differentials.insert(n.to_string(), rows(&c.d(n)));
            }
        }
    }
    ComplexFile { algebra: Some(AlgebraRef::Inline(c.algebra().data().clone())), modules, differentials }
}

pub fn map_file(f: &ChainMap) -> MapFile {
    let lo = f.src.lo().min(f.tgt.lo());
    let hi = f.src.hi().max(f.tgt.hi());
    MapFile::ByDegree((lo..=hi).filter(|&n| f.src.dim(n) > 0 && f.tgt.dim(n) > 0).map(|n| (n.to_string(), rows(&f.comp(n)))).collect())
}

pub fn ses_file(mu: &ChainMap, mu1: &ChainMap) -> SesFile {
    let strip = |c: &Complex| {
        let mut f = complex_file(c);
        f.algebra = None;
        ObjectFile::Complex(f)
    };
    SesFile {
        algebra: Some(AlgebraRef::Inline(mu.src.algebra().data().clone())),
        left: strip(&mu.src),
        middle: strip(&mu.tgt),
        right: strip(&mu1.tgt),
        mu: map_file(mu),
        mu1: map_file(mu1),
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data serializes")
}

/// `degree<TAB>dimension` lines.
pub fn table_tsv(t: &[(i64, usize)]) -> String {
    t.iter().map(|(i, d)| format!("{i}\t{d}\n")).collect()
}

pub fn table_json(kind: &str, window: (i64, i64), t: &[(i64, usize)]) -> Value {
    json!({
        "kind": kind,
        "window": [window.0, window.1],
        "rows": t.iter().map(|(i, d)| json!({"degree": i, "dim": d})).collect::<Vec<_>>(),
    })
}
