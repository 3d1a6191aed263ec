//! Command-line surface. `run` parses arguments, executes one subcommand and
//! returns what would be printed together with the exit code, so the binary
//! is a thin wrapper and tests can drive it in-process.
//!
//! Exit codes: 0 success, 1 usage or internal error, 2 invalid module file,
//! 3 inconclusive, 4 precondition violated.
//!
//! Structured output (`--format structured`) is one JSON object per run:
//! `{"schema": "koszul-cli/1", "command", "status": "ok", "result"}` or
//! `{"schema", "command", "status": "error", "error": {"kind", "exit_code", "message"}}`.
//! Object keys are sorted.

pub mod modfile;

use std::ffi::OsString;
use std::fmt::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::ar::{self, ArConfig};
use crate::error::{Error, Result};
use crate::gmod::{Algebra, GradedModule, DEFAULT_TRIALS};
use crate::koszul::{self, KoszulVerdict, Witness};
use crate::linalg::DEFAULT_P;
use crate::oracle;
use crate::resolve::{min_resolution, syzygy};
use crate::sheaf::{self, LocalFreeness, SheafConfig};

pub use modfile::{ActionRecord, ModuleFile};

pub const SCHEMA: &str = "koszul-cli/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Structured,
}

/// Bounds and switches shared by all subcommands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub length: usize,
    pub bound: usize,
    pub t_max: usize,
    pub twists: (i64, i64),
    pub depth: usize,
    pub seed: u64,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            length: 8,
            bound: koszul::DEFAULT_BOUND,
            t_max: 20,
            twists: (-6, 6),
            depth: 4,
            seed: 0,
            format: Format::Human,
        }
    }
}

impl RunConfig {
    fn ar(&self) -> ArConfig {
        ArConfig {
            bound: self.bound,
            seed: self.seed,
            ..ArConfig::default()
        }
    }

    fn sheaf(&self, summandwise: bool) -> SheafConfig {
        SheafConfig {
            bound: self.bound,
            t_max: self.t_max,
            summandwise,
            seed: self.seed,
            trials: DEFAULT_TRIALS,
            ..SheafConfig::default()
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "koszul", version, about = "Graded modules over the exterior algebra and their sheaves on projective space")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    /// Seed for randomized isomorphism and decomposition tests.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Input {
    file: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MakeKind {
    Simple,
    Free,
    SyzygyOfSimple,
    Radical,
    Twist,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Variant {
    Plain,
    Weakly,
    Quasi,
    Co,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a module file and check the exterior relations.
    Validate(Input),
    /// Write a module file: the simple K, Λ, Ω^kK[k], the radical J, or a
    /// twist Ω^k M[k] of a given module; `--shift s` applies M ↦ M[s].
    Make {
        #[arg(value_enum)]
        kind: MakeKind,
        #[arg(short = 'r', default_value_t = 2)]
        r: usize,
        #[arg(short = 'k', default_value_t = 1, allow_hyphen_values = true)]
        k: i32,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        shift: i32,
        #[arg(long, default_value_t = DEFAULT_P)]
        p: u32,
        /// Input module for `twist`.
        file: Option<PathBuf>,
    },
    /// Minimal graded projective resolution.
    Resolve {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        length: usize,
        /// Print the Betti grid (rows d-k, columns k).
        #[arg(long)]
        betti: bool,
    },
    /// Koszul-type verdicts up to a homological bound.
    Koszul {
        file: PathBuf,
        #[arg(long, default_value_t = koszul::DEFAULT_BOUND)]
        bound: usize,
        #[arg(long, value_enum, default_value_t = Variant::Plain)]
        variant: Variant,
    },
    /// Decide whether the associated sheaf is locally free.
    LocallyFree {
        file: PathBuf,
        #[arg(long, default_value_t = koszul::DEFAULT_BOUND)]
        bound: usize,
        #[arg(long, default_value_t = 20)]
        t_max: usize,
        /// Split decomposable input and combine the verdicts.
        #[arg(long)]
        summandwise: bool,
    },
    /// Table of h^q of the twists of the associated sheaf.
    Cohomology {
        file: PathBuf,
        /// Window `a..b`.
        #[arg(long, default_value = "-6..6", allow_hyphen_values = true)]
        twists: String,
        #[arg(long, default_value_t = koszul::DEFAULT_BOUND)]
        bound: usize,
    },
    /// Rank of the associated sheaf.
    Rank {
        file: PathBuf,
        #[arg(long, default_value_t = koszul::DEFAULT_BOUND)]
        bound: usize,
    },
    /// Hilbert polynomial of the associated sheaf.
    Hilbert {
        file: PathBuf,
        #[arg(long, default_value_t = koszul::DEFAULT_BOUND)]
        bound: usize,
    },
    /// Almost split sequence ending at the module.
    ArSeq {
        file: PathBuf,
        /// Directory receiving left.mod, middle.mod and right.mod.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The component of the relative AR quiver around the module.
    ArOrbit {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        steps: usize,
    },
    /// Ranks of σ^j M_i for i + j ≤ depth, direct and by recursion.
    RankTable {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// h^q(n) against the dual side h^{r-q}(-n-r-1) over a window.
    SerreCheck {
        file: PathBuf,
        #[arg(long, default_value = "-6..6", allow_hyphen_values = true)]
        twists: String,
    },
    #[command(subcommand, hide = true)]
    Oracle(OracleCommand),
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// h^q(P^r, O(n)) by counting Čech monomials.
    Cech {
        #[arg(short = 'r')]
        r: usize,
        #[arg(short = 'n', allow_hyphen_values = true)]
        n: i64,
        #[arg(short = 'q')]
        q: usize,
    },
    /// Kronecker dimension vector number k.
    Kronecker {
        #[arg(short = 'r')]
        r: usize,
        #[arg(short = 'k')]
        k: usize,
    },
    /// dim Ext^k(A, B)_0 through a resolution and through a coresolution.
    ExtTwoWays {
        a: PathBuf,
        b: PathBuf,
        #[arg(short = 'k')]
        k: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Make { .. } => "make",
            Command::Resolve { .. } => "resolve",
            Command::Koszul { .. } => "koszul",
            Command::LocallyFree { .. } => "locally-free",
            Command::Cohomology { .. } => "cohomology",
            Command::Rank { .. } => "rank",
            Command::Hilbert { .. } => "hilbert",
            Command::ArSeq { .. } => "ar-seq",
            Command::ArOrbit { .. } => "ar-orbit",
            Command::RankTable { .. } => "rank-table",
            Command::SerreCheck { .. } => "serre-check",
            Command::Oracle(_) => "oracle",
        }
    }
}

/// What a run prints, and how it exits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::InvalidModule(_) | Error::ContextMismatch(_) => 2,
        Error::Inconclusive(_) => 3,
        Error::Precondition(_) => 4,
        Error::Internal(_) => 1,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse { .. } => "parse",
        Error::InvalidModule(_) => "invalid_module",
        Error::ContextMismatch(_) => "context_mismatch",
        Error::Inconclusive(_) => "inconclusive",
        Error::Precondition(_) => "precondition",
        Error::Internal(_) => "internal",
    }
}

/// A successful run: human text, structured result, and exit code (3 when
/// the verdict itself is inconclusive).
struct Report {
    text: String,
    result: Value,
    code: i32,
}

impl Report {
    fn ok(text: String, result: Value) -> Self {
        Report { text, result, code: 0 }
    }
}

pub fn read_module(path: &Path) -> Result<GradedModule> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidModule(format!("{}: {e}", path.display())))?;
    ModuleFile::parse(&text)
        .and_then(|f| f.to_module())
        .map_err(|e| match e {
            Error::Parse { line, msg } => Error::Parse {
                line,
                msg: format!("{}: {msg}", path.display()),
            },
            Error::InvalidModule(msg) => Error::InvalidModule(format!("{}: {msg}", path.display())),
            other => other,
        })
}

pub fn dims_string(m: &GradedModule) -> String {
    if m.is_zero() {
        return "0".into();
    }
    m.dims_by_degree()
        .iter()
        .map(|(d, n)| format!("{d}:{n}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_window(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::Precondition(format!("twist window {s:?} is not of the form a..b with a ≤ b"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn witness_text(w: &Witness) -> String {
    match *w {
        Witness::Generator { k, d } => format!("witness k={k} (generator in degree {d})"),
        Witness::Layer { j, k } => format!("witness k={k} (radical layer j={j})"),
    }
}

fn verdict_text(name: &str, v: &KoszulVerdict) -> String {
    if v.holds {
        format!("{name} (checked up to k={})", v.checked_up_to)
    } else {
        let w = v.witness.as_ref().map(witness_text).unwrap_or_default();
        format!("not {name}, {w}")
    }
}

fn module_json(m: &GradedModule) -> Value {
    json!({
        "dims": m.dims_by_degree(),
        "total_dim": m.total_dim(),
    })
}

fn make(kind: MakeKind, r: usize, k: i32, shift: i32, p: u32, file: Option<&Path>) -> Result<GradedModule> {
    let a = Algebra::new(r, p).map_err(|e| Error::Precondition(e.to_string()))?;
    let need_k = |k: i32| {
        usize::try_from(k).map_err(|_| Error::Precondition(format!("-k must be non-negative, got {k}")))
    };
    let m = match kind {
        MakeKind::Simple => a.simple(0),
        MakeKind::Free => a.regular(),
        MakeKind::SyzygyOfSimple => syzygy(&a.simple(0), need_k(k)?).shift(k),
        MakeKind::Radical => a.regular().truncate(1),
        MakeKind::Twist => {
            let path = file.ok_or_else(|| Error::Precondition("make twist needs an input module file".into()))?;
            sheaf::twist(&read_module(path)?, k)
        }
    };
    Ok(m.shift(shift))
}

fn execute(cmd: &Command, cfg: &RunConfig) -> Result<Report> {
    match cmd {
        Command::Validate(input) => {
            let m = read_module(&input.file)?;
            let a = m.algebra();
            Ok(Report::ok(
                format!("valid: p={} r={} dims {} (total {})\n", a.p(), a.r(), dims_string(&m), m.total_dim()),
                json!({ "valid": true, "p": a.p(), "r": a.r(), "module": module_json(&m) }),
            ))
        }
        Command::Make {
            kind,
            r,
            k,
            shift,
            p,
            file,
        } => {
            let m = make(*kind, *r, *k, *shift, *p, file.as_deref())?;
            let text = ModuleFile::from_module(&m).serialize();
            Ok(Report::ok(text.clone(), json!({ "module_file": text, "module": module_json(&m) })))
        }
        Command::Resolve { file, length, betti } => {
            let m = read_module(file)?;
            let (table, _) = min_resolution(&m, *length);
            let mut text = String::new();
            for k in 0..=table.length() {
                let degs: Vec<String> = table.entries[k].iter().map(|(d, n)| format!("{d}^{n}")).collect();
                let _ = writeln!(text, "P_{k}: rank {} [{}]", table.total(k), degs.join(" "));
            }
            if *betti {
                text.push_str(&table.render());
            }
            let entries: Vec<Value> = table
                .nonzero()
                .into_iter()
                .map(|(k, d, n)| json!({ "k": k, "d": d, "beta": n }))
                .collect();
            let ranks: Vec<usize> = (0..=table.length()).map(|k| table.total(k)).collect();
            Ok(Report::ok(text, json!({ "length": table.length(), "ranks": ranks, "betti": entries })))
        }
        Command::Koszul { file, bound, variant } => {
            let m = read_module(file)?;
            let (name, v) = match variant {
                Variant::Plain => ("Koszul", koszul::is_koszul(&m, *bound)?),
                Variant::Weakly => ("weakly Koszul", koszul::is_weakly_koszul(&m, *bound)),
                Variant::Quasi => ("quasi-Koszul", koszul::is_quasi_koszul(&m, *bound)),
                Variant::Co => ("co-Koszul", koszul::is_co_koszul(&m, *bound)?),
            };
            Ok(Report::ok(format!("{}\n", verdict_text(name, &v)), json!(v)))
        }
        Command::LocallyFree {
            file,
            bound,
            t_max,
            summandwise,
        } => {
            let m = read_module(file)?;
            let sc = SheafConfig {
                bound: *bound,
                t_max: *t_max,
                ..cfg.sheaf(*summandwise)
            };
            let v = sheaf::is_locally_free(&m, &sc)?;
            let (text, code) = match v.status {
                LocalFreeness::LocallyFree => ("locally free".to_string(), 0),
                LocalFreeness::NotLocallyFree => {
                    (format!("not locally free (socle degrees {:?} survive)", v.residue), 0)
                }
                LocalFreeness::Inconclusive => (format!("inconclusive after {t_max} cosyzygies"), 3),
            };
            let text = match v.witness_t {
                Some(t) => format!("{text}, witness t={t}\n"),
                None => format!("{text}\n"),
            };
            Ok(Report {
                text,
                result: json!(v),
                code,
            })
        }
        Command::Cohomology { file, twists, bound } => {
            let m = read_module(file)?;
            let (lo, hi) = parse_window(twists)?;
            let t = sheaf::cohomology_table(&m, lo, hi, *bound)?;
            Ok(Report::ok(t.render(), json!(t)))
        }
        Command::Rank { file, bound } => {
            let m = read_module(file)?;
            let rk = sheaf::rank(&m, *bound)?;
            Ok(Report::ok(format!("rank {rk}\n"), json!({ "rank": rk })))
        }
        Command::Hilbert { file, bound } => {
            let m = read_module(file)?;
            let h = sheaf::hilbert_poly(&m, *bound)?;
            Ok(Report::ok(
                format!("P(n) = {}\n", h.render()),
                json!({
                    "polynomial": h,
                    "scaled_coefficients": h.scaled_coefficients(),
                    "rank": h.rank(),
                }),
            ))
        }
        Command::ArSeq { file, out } => {
            let m = read_module(file)?;
            let seq = ar::ar_sequence(&m, &cfg.ar())?;
            if let Some(dir) = out {
                std::fs::create_dir_all(dir).map_err(|e| Error::Internal(format!("{}: {e}", dir.display())))?;
                for (name, x) in [("left", &seq.left), ("middle", &seq.middle), ("right", &seq.right)] {
                    let path = dir.join(format!("{name}.mod"));
                    std::fs::write(&path, ModuleFile::from_module(x).serialize())
                        .map_err(|e| Error::Internal(format!("{}: {e}", path.display())))?;
                }
            }
            let c = seq.certificates;
            let mut text = String::new();
            let _ = writeln!(text, "0 -> left -> middle -> right -> 0");
            for (name, x) in [("left", &seq.left), ("middle", &seq.middle), ("right", &seq.right)] {
                let _ = writeln!(text, "{name:>7}: {}", dims_string(x));
            }
            let _ = writeln!(text, "dim Ext^1(M, tau M)_0 = {}", seq.ext_dim);
            for (name, ok) in [
                ("exact", c.exact),
                ("ext_class_nonzero", c.ext_class_nonzero),
                ("rad_annihilates", c.rad_annihilates),
                ("non_split", c.non_split),
                ("left_is_sigma", c.left_is_sigma),
            ] {
                let _ = writeln!(text, "{name:>18}: {ok}");
            }
            Ok(Report::ok(
                text,
                json!({
                    "left": module_json(&seq.left),
                    "middle": module_json(&seq.middle),
                    "right": module_json(&seq.right),
                    "ext_dim": seq.ext_dim,
                    "certificates": c,
                    "certified": c.all(),
                }),
            ))
        }
        Command::ArOrbit { file, steps } => {
            let m = read_module(file)?;
            let rep = ar::sigma_orbit(&m, *steps, &cfg.ar())?;
            let dot = rep.to_dot();
            let text = format!(
                "shape: {}\nmesh additive: {}\ncertified: {}\n{dot}",
                serde_json::to_value(rep.shape).unwrap().as_str().unwrap_or(""),
                rep.mesh_additive,
                rep.certified
            );
            let mut result = json!(rep);
            result["dot"] = json!(dot);
            Ok(Report::ok(text, result))
        }
        Command::RankTable { file, depth } => {
            let m = read_module(file)?;
            let t = ar::rank_recursion(&m, *depth, &cfg.ar())?;
            let text = format!(
                "{}recursion agrees: {}\nstrictly increasing in i: {}\n",
                t.render(),
                t.agrees,
                t.strictly_increasing
            );
            Ok(Report::ok(text, json!(t)))
        }
        Command::SerreCheck { file, twists } => {
            let m = read_module(file)?;
            let (lo, hi) = parse_window(twists)?;
            let r = m.algebra().r();
            let mut checks = Vec::new();
            for q in 0..=r {
                for n in lo..=hi {
                    checks.push(sheaf::serre_duality_check(&m, q, n)?);
                }
            }
            let failures: Vec<_> = checks.iter().filter(|c| !c.holds).collect();
            let mut text = format!("{} of {} checks hold\n", checks.len() - failures.len(), checks.len());
            for c in &failures {
                let _ = writeln!(text, "  q={} n={}: {} vs {}", c.q, c.n, c.lhs, c.rhs);
            }
            Ok(Report::ok(
                text,
                json!({ "holds": failures.is_empty(), "checks": checks }),
            ))
        }
        Command::Oracle(o) => match o {
            OracleCommand::Cech { r, n, q } => {
                let v = oracle::cech_o(*r, *n, *q);
                Ok(Report::ok(format!("{}\n", v.value), json!(v)))
            }
            OracleCommand::Kronecker { r, k } => {
                let (a, b) = oracle::kronecker_dims(*r, *k);
                Ok(Report::ok(format!("{a} {b}\n"), json!({ "dims": [a, b] })))
            }
            OracleCommand::ExtTwoWays { a, b, k } => {
                let (ma, mb) = (read_module(a)?, read_module(b)?);
                if ma.algebra() != mb.algebra() {
                    return Err(Error::ContextMismatch("modules over different algebras".into()));
                }
                let (x, y) = oracle::ext_two_ways(&ma, &mb, *k);
                Ok(Report::ok(
                    format!("{x} {y}\n"),
                    json!({ "via_projective": x, "via_injective": y, "agree": x == y }),
                ))
            }
        },
    }
}

fn render_structured(command: &str, body: std::result::Result<&Report, &Error>) -> String {
    let v = match body {
        Ok(rep) => json!({ "schema": SCHEMA, "command": command, "status": "ok", "result": rep.result }),
        Err(e) => json!({
            "schema": SCHEMA,
            "command": command,
            "status": "error",
            "error": { "kind": error_kind(e), "exit_code": exit_code(e), "message": e.to_string() },
        }),
    };
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}

/// Run the command line `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let cfg = RunConfig {
        seed: cli.seed,
        format: cli.format,
        ..RunConfig::default()
    };
    let name = cli.command.name();
    let res = execute(&cli.command, &cfg);
    match (cfg.format, res) {
        (Format::Human, Ok(rep)) => Outcome {
            code: rep.code,
            stdout: rep.text,
            stderr: String::new(),
        },
        (Format::Human, Err(e)) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
        (Format::Structured, Ok(rep)) => Outcome {
            code: rep.code,
            stdout: render_structured(name, Ok(&rep)),
            stderr: String::new(),
        },
        (Format::Structured, Err(e)) => Outcome {
            code: exit_code(&e),
            stdout: render_structured(name, Err(&e)),
            stderr: String::new(),
        },
    }
}
