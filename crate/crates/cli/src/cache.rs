//! Content-addressed store for resolution windows.
//!
//! Entries are keyed by the SHA-256 of the canonical JSON of (algebra, object,
//! strategy, window). A hit returns exactly what a recomputation would, so the
//! cache only ever saves time. Unreadable entries are recomputed and rewritten.

use hga_core::complex::{ChainMap, Complex};
use hga_core::io::{self, ComplexFile, Loader, MapFile};
use hga_core::module::{CoverStrategy, Module};
use hga_core::resolution::Resolution;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::path::PathBuf;

pub const ENV: &str = "HGA_CACHE_DIR";

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    /// The directory named by `HGA_CACHE_DIR`, or `.hga-cache` in the working directory.
    pub fn from_env() -> Cache {
        let dir = std::env::var_os(ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".hga-cache"));
        Cache { dir }
    }

    fn key(target: &Complex, strategy: CoverStrategy, hi: i64) -> String {
        let k = json!({
            "object": io::complex_file(target),
            "strategy": format!("{strategy:?}"),
            "window": hi,
        });
        hex::encode(Sha256::digest(serde_json::to_vec(&k).expect("plain data")))
    }

    fn load(&self, key: &str, target: &Complex) -> Option<(Complex, ChainMap)> {
        let text = std::fs::read_to_string(self.dir.join(format!("{key}.json"))).ok()?;
        let v: Value = serde_json::from_str(&text).ok()?;
        let pf: ComplexFile = serde_json::from_value(v.get("p")?.clone()).ok()?;
        let mf: MapFile = serde_json::from_value(v.get("pi")?.clone()).ok()?;
        let p = as_free(&Loader::new(".").complex(&pf, Some(target.algebra()), "cache.p").ok()?)?;
        let pi = io::chain_map(&p, target, &mf, "cache.pi").ok()?;
        pi.is_morphism().then_some((p, pi))
    }

    fn store(&self, key: &str, p: &Complex, pi: &ChainMap) -> std::io::Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let v = json!({"p": io::complex_file(p), "pi": io::map_file(pi)});
        let tmp = self.dir.join(format!("{key}.tmp{}", std::process::id()));
        std::fs::write(&tmp, serde_json::to_vec(&v).expect("plain data"))?;
        std::fs::rename(tmp, self.dir.join(format!("{key}.json")))
    }

    /// `P_{<= hi} -> target`, from the store when present.
    pub fn resolution(&self, target: &Complex, strategy: CoverStrategy, hi: i64) -> (Complex, ChainMap) {
        let key = Cache::key(target, strategy, hi);
        if let Some(hit) = self.load(&key, target) {
            return hit;
        }
        let (p, pi) = Resolution::new(target, strategy).window(hi);
        if let Err(e) = self.store(&key, &p, &pi) {
            eprintln!("warning: cache write failed: {e}");
        }
        (p, pi)
    }
}

/// The same complex with each term marked as the free module it is.
fn as_free(c: &Complex) -> Option<Complex> {
    if c.inf().is_none() {
        return Some(c.clone());
    }
    let alg = c.algebra();
    let mods = (c.lo()..=c.hi())
        .map(|n| {
            let m = c.module(n);
            let f = Module::free(alg, m.dim() / alg.dim());
            (f.dim() == m.dim() && f.actions() == m.actions()).then_some(f)
        })
        .collect::<Option<Vec<_>>>()?;
    Complex::new(alg, c.lo(), mods, (c.lo() + 1..=c.hi()).map(|n| c.d(n)).collect()).ok()
}
