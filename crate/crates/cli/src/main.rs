mod cache;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hga_core::cohomology::{self, LesReport, Table};
use hga_core::complex::{ChainMap, Complex};
use hga_core::gorenstein::{self, GorensteinCertificate, Gpd, DEFAULT_BOUND};
use hga_core::io::{self, Loader};
use hga_core::module::{CoverStrategy, Module};
use hga_core::resolution::{self, Resolution};
use hga_core::verify::{self, Instance, VerdictReport, SUITES};
use hga_core::Error;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hga", version, about = "Homological computations over finite-dimensional algebras")]
struct Cli {
    /// Emit JSON instead of TSV.
    #[arg(long, global = true)]
    json: bool,
    /// Run on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Window {
    #[arg(long, allow_negative_numbers = true)]
    from: i64,
    #[arg(long, allow_negative_numbers = true)]
    to: i64,
}

#[derive(Args)]
struct Bound {
    /// Search bound for the Gorenstein dimension.
    #[arg(long, default_value_t = DEFAULT_BOUND)]
    bound: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Greedy,
    AllBasis,
    Redundant,
}

impl From<Strategy> for CoverStrategy {
    fn from(s: Strategy) -> CoverStrategy {
        match s {
            Strategy::Greedy => CoverStrategy::Greedy,
            Strategy::AllBasis => CoverStrategy::AllBasis,
            Strategy::Redundant => CoverStrategy::Redundant,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    /// Êxt(M, -) along a sequence in the second variable.
    TateSecond,
    /// Êxt(-, N) along a sequence in the first variable.
    TateFirst,
    /// Ext_GP(M, -) along a proper sequence.
    RelativeSecond,
    /// Ext_GP(-, N) along a proper sequence of modules.
    RelativeFirst,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate an algebra file.
    CheckAlgebra { algebra: PathBuf },
    /// Gorenstein dimension, or NotWithin the bound.
    Gorenstein {
        algebra: PathBuf,
        #[command(flatten)]
        bound: Bound,
    },
    /// Projective dimension of a module or complex.
    Pd {
        object: PathBuf,
        #[command(flatten)]
        bound: Bound,
    },
    /// Gorenstein projective dimension.
    Gpd {
        object: PathBuf,
        #[command(flatten)]
        bound: Bound,
    },
    /// Ranks of a free resolution up to `--to`.
    Resolve {
        object: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        to: i64,
        #[arg(long, value_enum, default_value = "greedy")]
        strategy: Strategy,
        /// Reuse resolution windows stored under $HGA_CACHE_DIR.
        #[arg(long)]
        cache: bool,
    },
    /// Ranks of the totally acyclic complex of a complete resolution.
    CompleteResolve {
        object: PathBuf,
        #[command(flatten)]
        window: Window,
        #[command(flatten)]
        bound: Bound,
    },
    /// dim Ext^i(M, N).
    Ext {
        m: PathBuf,
        n: PathBuf,
        #[command(flatten)]
        window: Window,
        #[arg(long)]
        cache: bool,
    },
    /// dim Êxt^i(M, N).
    Tate {
        m: PathBuf,
        n: PathBuf,
        #[command(flatten)]
        window: Window,
        #[command(flatten)]
        bound: Bound,
    },
    /// dim Ext^i_GP(M, N).
    Relext {
        m: PathBuf,
        n: PathBuf,
        #[command(flatten)]
        window: Window,
        #[command(flatten)]
        bound: Bound,
    },
    /// The sequence linking Ext_GP, Ext and Êxt up to degree Gpd M.
    AmSequence {
        m: PathBuf,
        n: PathBuf,
        #[command(flatten)]
        bound: Bound,
    },
    /// A long exact sequence of one of the four kinds.
    Les {
        #[arg(value_enum)]
        variant: Variant,
        /// File with `left`, `middle`, `right`, `mu`, `mu1`.
        #[arg(long)]
        ses: PathBuf,
        /// The fixed argument.
        #[arg(long)]
        object: PathBuf,
        #[command(flatten)]
        window: Window,
        #[command(flatten)]
        bound: Bound,
    },
    /// Compare the characterisations of finite projective dimension.
    Rigidity {
        module: PathBuf,
        /// Extra modules N tested for Êxt(M, N) = 0.
        #[arg(long = "sample")]
        samples: Vec<PathBuf>,
        #[command(flatten)]
        bound: Bound,
    },
    /// Randomised property suites.
    Verify {
        /// A suite name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Write the full report, counterexamples included, to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Re-run a saved instance or every counterexample in a report.
    Replay { file: PathBuf },
}

/// Exit 1 for mathematical failures, 2 for usage and input errors.
enum Fail {
    Math(String),
    Usage(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        match e {
            Error::ParseError(_)
            | Error::ShapeMismatch(_)
            | Error::AlgebraMismatch
            | Error::FieldMismatch
            | Error::UnboundedInput
            | Error::WindowTooSmall(_) => Fail::Usage(e.to_string()),
            _ => Fail::Math(e.to_string()),
        }
    }
}

type Out = Result<(String, bool), Fail>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.sequential {
        hga_core::par::set_enabled(false);
    }
    match run(&cli) {
        Ok((text, ok)) => {
            print!("{text}");
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(Fail::Math(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn object(loader: &mut Loader, path: &Path) -> Result<Complex, Fail> {
    Ok(loader.object_file(path)?)
}

fn module(loader: &mut Loader, path: &Path) -> Result<Module, Fail> {
    let c = object(loader, path)?;
    io::module_of(&c).ok_or_else(|| Fail::Usage(format!("{}: expected a module in degree 0", path.display())))
}

fn algebra(path: &Path) -> Result<hga_core::algebra::Algebra, Fail> {
    Ok(Loader::new(".").algebra_file(path)?)
}

fn cert(alg: &hga_core::algebra::Algebra, bound: &Bound) -> Result<GorensteinCertificate, Fail> {
    Ok(gorenstein::gorenstein_dimension(alg, bound.bound)?)
}

fn window(w: &Window) -> Result<(i64, i64), Fail> {
    if w.from > w.to {
        return Err(Fail::Usage(format!("empty window {}..{}", w.from, w.to)));
    }
    Ok((w.from, w.to))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("plain data") + "\n"
}

fn emit_table(json: bool, kind: &str, w: (i64, i64), t: &Table) -> Out {
    Ok((if json { pretty(&io::table_json(kind, w, t)) } else { io::table_tsv(t) }, true))
}

fn free_ranks(p: &Complex, lo: i64, hi: i64) -> Table {
    (lo..=hi).map(|n| (n, p.module(n).free_rank().expect("free complex"))).collect()
}

fn run(cli: &Cli) -> Out {
    let mut loader = Loader::new(".");
    let json = cli.json;
    match &cli.cmd {
        Cmd::CheckAlgebra { algebra: path } => {
            let a = algebra(path)?;
            let v = json!({"p": a.p(), "dim": a.dim(), "commutative": a.is_commutative()});
            let text = if json { pretty(&v) } else { format!("p\t{}\ndim\t{}\ncommutative\t{}\n", a.p(), a.dim(), a.is_commutative()) };
            Ok((text, true))
        }
        Cmd::Gorenstein { algebra: path, bound } => {
            let a = algebra(path)?;
            let v = match gorenstein::gorenstein_dimension(&a, bound.bound) {
                Ok(c) => json!({"n": c.n, "left": c.n_left, "right": c.n_right}),
                Err(Error::NotGorensteinWithin(b)) => json!({"n": null, "bound": b}),
                Err(e) => return Err(e.into()),
            };
            let text = match (json, v["n"].as_u64()) {
                (true, _) => pretty(&v),
                (false, Some(n)) => format!("{n}\n"),
                (false, None) => "NotWithin\n".to_string(),
            };
            Ok((text, true))
        }
        Cmd::Pd { object: path, bound } => {
            let c = object(&mut loader, path)?;
            let n = gorenstein::gorenstein_dimension(c.algebra(), bound.bound).ok().map(|c| c.n);
            let r = resolution::pd(&Resolution::new(&c, CoverStrategy::Greedy), n, bound.bound);
            Ok((if json { pretty(&json!({"pd": r.to_string()})) } else { format!("{r}\n") }, true))
        }
        Cmd::Gpd { object: path, bound } => {
            let c = object(&mut loader, path)?;
            let ct = cert(c.algebra(), bound)?;
            let g: Gpd = match io::module_of(&c) {
                Some(m) => gorenstein::gpd_module(&m, &ct)?,
                None => gorenstein::gpd_complex(&c, &ct)?,
            };
            Ok((if json { pretty(&json!({"gpd": g.to_string()})) } else { format!("{g}\n") }, true))
        }
        Cmd::Resolve { object: path, to, strategy, cache } => {
            let c = object(&mut loader, path)?;
            let s = CoverStrategy::from(*strategy);
            let (p, pi) = if *cache { cache::Cache::from_env().resolution(&c, s, *to) } else { Resolution::new(&c, s).window(*to) };
            let lo = c.inf().unwrap_or(0).min(*to);
            let t = free_ranks(&p, lo, *to);
            if json {
                let v = json!({
                    "kind": "resolution",
                    "window": [lo, to],
                    "ranks": io::table_json("rank", (lo, *to), &t)["rows"],
                    "complex": io::to_value(&io::complex_file(&p)),
                    "augmentation": io::to_value(&io::map_file(&pi)),
                });
                Ok((pretty(&v), true))
            } else {
                Ok((io::table_tsv(&t), true))
            }
        }
        Cmd::CompleteResolve { object: path, window: w, bound } => {
            let (a, b) = window(w)?;
            let c = object(&mut loader, path)?;
            let ct = cert(c.algebra(), bound)?;
            let cr = gorenstein::complete_resolution(&c, &ct, CoverStrategy::Greedy)?;
            cr.verify(a, b)?;
            let tw = cr.t_window(a, b)?;
            let t = free_ranks(&tw, a, b);
            if json {
                let v = json!({
                    "kind": "complete-resolution",
                    "window": [a, b],
                    "gpd": cr.gpd.to_string(),
                    "g": cr.g,
                    "ranks": io::table_json("rank", (a, b), &t)["rows"],
                    "t": io::to_value(&io::complex_file(&tw)),
                });
                Ok((pretty(&v), true))
            } else {
                Ok((io::table_tsv(&t), true))
            }
        }
        Cmd::Ext { m, n, window: w, cache } => {
            let (a, b) = window(w)?;
            let (mc, nc) = (object(&mut loader, m)?, object(&mut loader, n)?);
            let t = if *cache {
                // the window ext reads is P_{<= b + sup N + 1}
                let top = b + nc.sup().unwrap_or(0) + 1;
                let (p, pi) = cache::Cache::from_env().resolution(&mc, CoverStrategy::Greedy, top);
                cohomology::ext_on(&gorenstein::FreeModel::bounded(p, pi, top), &nc, a, b)?
            } else {
                cohomology::ext(&mc, &nc, a, b)?
            };
            emit_table(json, "ext", (a, b), &t)
        }
        Cmd::Tate { m, n, window: w, bound } => {
            let (a, b) = window(w)?;
            let (mc, nc) = (object(&mut loader, m)?, object(&mut loader, n)?);
            let ct = cert(mc.algebra(), bound)?;
            emit_table(json, "tate", (a, b), &cohomology::tate(&mc, &nc, &ct, a, b)?)
        }
        Cmd::Relext { m, n, window: w, bound } => {
            let (a, b) = window(w)?;
            let (mc, nc) = (object(&mut loader, m)?, object(&mut loader, n)?);
            let ct = cert(mc.algebra(), bound)?;
            emit_table(json, "relext", (a, b), &cohomology::relative_ext(&mc, &nc, &ct, a, b)?)
        }
        Cmd::AmSequence { m, n, bound } => {
            let (mc, nc) = (object(&mut loader, m)?, object(&mut loader, n)?);
            let ct = cert(mc.algebra(), bound)?;
            let r = cohomology::am_sequence(&mc, &nc, &ct)?;
            let signs: Vec<Value> = r.sign_identity.iter().map(|(k, ok)| json!({"degree": k, "holds": ok})).collect();
            if json {
                let mut v = les_json(&r.les);
                v["gpd"] = json!(r.gpd.to_string());
                v["sign_identity"] = json!(signs);
                v["holds"] = json!(r.holds());
                return Ok((pretty(&v), r.holds()));
            }
            let mut text = format!("gpd\t{}\n", r.gpd);
            text += &les_tsv(&r.les);
            for (k, ok) in &r.sign_identity {
                let _ = writeln!(text, "sign\t{k}\t{ok}");
            }
            let _ = writeln!(text, "holds\t{}", r.holds());
            Ok((text, r.holds()))
        }
        Cmd::Les { variant, ses, object: path, window: w, bound } => {
            let (a, b) = window(w)?;
            let (mu, mu1) = loader.ses_file(ses)?;
            let x = object(&mut loader, path)?;
            let ct = cert(x.algebra(), bound)?;
            let rep = les(*variant, &mu, &mu1, &x, &ct, a, b)?;
            let ok = rep.is_exact() && rep.is_compatible();
            if json {
                let mut v = les_json(&rep);
                v["window"] = json!([a, b]);
                return Ok((pretty(&v), ok));
            }
            Ok((les_tsv(&rep), ok))
        }
        Cmd::Rigidity { module: path, samples, bound } => {
            let m = module(&mut loader, path)?;
            let ct = cert(m.algebra(), bound)?;
            let ns = samples.iter().map(|s| module(&mut loader, s)).collect::<Result<Vec<_>, _>>()?;
            let r = cohomology::rigidity_probe(&m, &ct, &ns)?;
            let ok = r.consistent();
            if json {
                let mut v = io::to_value(&r);
                v["consistent"] = json!(ok);
                return Ok((pretty(&v), ok));
            }
            let text = format!(
                "window\t{}\t{}\npd_finite\t{}\nfamily_vanishes\t{}\nsamples_vanish\t{}\nself_vanishes\t{}\nconsistent\t{ok}\n",
                r.window.0, r.window.1, r.pd_finite, r.family_vanishes, r.samples_vanish, r.self_vanishes
            );
            Ok((text, ok))
        }
        Cmd::Verify { suite, seed, trials, report } => {
            let reports: Vec<VerdictReport> = if suite == "all" {
                verify::verify_all(*seed, *trials)
            } else {
                if !SUITES.contains(&suite.as_str()) {
                    return Err(Fail::Usage(format!("unknown suite {suite:?}; one of all, {}", SUITES.join(", "))));
                }
                vec![verify::verify_suite(suite, *seed, *trials)?]
            };
            if let Some(path) = report {
                std::fs::write(path, pretty(&io::to_value(&reports))).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
            }
            let ok = reports.iter().all(VerdictReport::passed);
            if json {
                return Ok((pretty(&io::to_value(&reports)), ok));
            }
            let mut text = String::new();
            for r in &reports {
                let _ = writeln!(text, "{}\t{}\t{}", r.suite, r.instances_run, r.failures.len());
                for f in &r.failures {
                    let _ = writeln!(text, "  trial {}: {}", f.trial, f.message);
                    let _ = writeln!(text, "  shrunk: {}", f.shrunk_message);
                }
            }
            Ok((text, ok))
        }
        Cmd::Replay { file } => {
            let text = std::fs::read_to_string(file).map_err(|e| Fail::Usage(format!("{}: {e}", file.display())))?;
            let instances: Vec<(String, Instance)> = if let Ok(i) = serde_json::from_str::<Instance>(&text) {
                vec![("instance".into(), i)]
            } else {
                let reports: Vec<VerdictReport> = serde_json::from_str(&text)
                    .map_err(|e| Fail::Usage(format!("{}: neither an instance nor a report: {e}", file.display())))?;
                reports
                    .into_iter()
                    .flat_map(|r| {
                        r.failures.into_iter().flat_map(move |f| {
                            let tag = format!("{} trial {}", r.suite, f.trial);
                            [(tag.clone(), f.instance), (format!("{tag} shrunk"), f.shrunk)]
                        })
                    })
                    .collect()
            };
            let mut out = String::new();
            let mut ok = true;
            for (tag, inst) in &instances {
                match verify::replay(inst) {
                    Ok(()) => {
                        let _ = writeln!(out, "{tag}\tPASS");
                    }
                    Err(m) => {
                        ok = false;
                        let _ = writeln!(out, "{tag}\tFAIL\t{m}");
                    }
                }
            }
            Ok((out, ok))
        }
    }
}

fn les(
    variant: Variant,
    mu: &ChainMap,
    mu1: &ChainMap,
    x: &Complex,
    ct: &GorensteinCertificate,
    a: i64,
    b: i64,
) -> Result<LesReport, Fail> {
    Ok(match variant {
        Variant::TateSecond => {
            let cr = gorenstein::complete_resolution(x, ct, CoverStrategy::Greedy)?;
            cohomology::les_tate_covariant(&cr, mu, mu1, a, b)?
        }
        Variant::TateFirst => cohomology::les_tate_contravariant(mu, mu1, x, ct, a, b)?,
        Variant::RelativeSecond => {
            let sp = gorenstein::special_gp_resolution(x, ct)?;
            cohomology::les_relative_second(&sp, mu, mu1, a, b)?
        }
        Variant::RelativeFirst => cohomology::les_relative_first(mu, mu1, x, ct, a, b)?,
    })
}

fn exact_word(e: Option<bool>) -> &'static str {
    match e {
        Some(true) => "exact",
        Some(false) => "NOT-EXACT",
        None => "cut",
    }
}

fn les_tsv(r: &LesReport) -> String {
    let mut text = String::new();
    for (node, e) in r.nodes.iter().zip(&r.exact) {
        let _ = writeln!(text, "{}\t{}\t{}\t{}", node.label, node.degree, node.dim, exact_word(*e));
    }
    for (name, ok) in &r.compatibility {
        let _ = writeln!(text, "{name}\t{ok}");
    }
    let _ = writeln!(text, "exact\t{}", r.is_exact());
    text
}

fn les_json(r: &LesReport) -> Value {
    json!({
        "nodes": r.nodes.iter().zip(&r.exact).map(|(n, e)| json!({
            "label": n.label, "degree": n.degree, "dim": n.dim, "exact": e,
        })).collect::<Vec<_>>(),
        "map_ranks": r.maps.iter().map(|m| m.rank()).collect::<Vec<_>>(),
        "compatibility": r.compatibility.iter().map(|(s, ok)| json!({"square": s, "holds": ok})).collect::<Vec<_>>(),
        "exact": r.is_exact(),
    })
}
