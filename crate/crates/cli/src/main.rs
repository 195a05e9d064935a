use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use linrel::json as lj;
use linrel::kernel::{self, ComplexMatrix};
use linrel::{
    block, generator, nonneg, schur, verify, Error, InstanceSpec, LinearRelation,
    NonnegSelfAdjointRelation, Subspace, Tolerances,
};

/// Linear relations, block representations and Schur complements.
#[derive(Parser)]
#[command(name = "linrel", version)]
struct Cli {
    /// Relative singular-value cutoff for rank decisions.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_rank: f64,
    /// Absolute tolerance for subspace gaps and PSD tests.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_eq: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Formula,
    Pekarev,
    AndersonTrapp,
}

#[derive(Subcommand)]
enum Command {
    /// Block representation of A with respect to S ⊕ S⊥.
    Block {
        #[arg(long)]
        relation: PathBuf,
        #[arg(long)]
        subspace: PathBuf,
    },
    /// Schur complement A/S with consistency diagnostics.
    Schur {
        #[arg(long)]
        relation: PathBuf,
        #[arg(long)]
        subspace: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Formula)]
        method: Method,
    },
    /// Compression A_S.
    Compress {
        #[arg(long)]
        relation: PathBuf,
        #[arg(long)]
        subspace: PathBuf,
    },
    /// Compare two nonnegative selfadjoint relations in the forms ordering.
    Order {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Generate a random instance (A, S).
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d1: usize,
        #[arg(long)]
        d2: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Write the relation here instead of stdout.
        #[arg(long, requires = "out_subspace")]
        out_relation: Option<PathBuf>,
        /// Write the subspace here instead of stdout.
        #[arg(long, requires = "out_relation")]
        out_subspace: Option<PathBuf>,
    },
    /// Run every check over randomly generated instances.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        max_dim: usize,
    },
}

/// A failure together with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_)
            | Error::DimensionMismatch(_)
            | Error::InvalidTolerance { .. }
            | Error::SpecInvalid(_) => 2,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Self {
            code: 2,
            message: format!("{e:#}"),
        }
    }
}

type CmdResult = Result<(String, u8), Failure>;

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_relation(path: &Path, tol: &Tolerances) -> Result<LinearRelation, Failure> {
    lj::parse_relation(&read(path)?, tol).map_err(|e| Failure::from(e).with_path(path))
}

fn load_nonneg(path: &Path, tol: &Tolerances) -> Result<NonnegSelfAdjointRelation, Failure> {
    Ok(NonnegSelfAdjointRelation::validate(
        &load_relation(path, tol)?,
        tol,
    )?)
}

fn load_subspace(path: &Path, tol: &Tolerances) -> Result<Subspace, Failure> {
    lj::parse_subspace(&read(path)?, tol).map_err(|e| Failure::from(e).with_path(path))
}

impl Failure {
    fn with_path(mut self, path: &Path) -> Self {
        self.message = format!("{}: {}", path.display(), self.message);
        self
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialise")
}

fn fmt_complex(z: &kernel::C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

fn text_matrix(out: &mut String, name: &str, m: &ComplexMatrix) {
    let _ = writeln!(out, "{name} ({}x{}):", m.nrows(), m.ncols());
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(fmt_complex).collect();
        let _ = writeln!(out, "  [{}]", cells.join(", "));
    }
}

fn text_relation(out: &mut String, name: &str, t: &LinearRelation, tol: &Tolerances) {
    let _ = writeln!(
        out,
        "{name}: C^{} -> C^{}, dim dom {}, ran {}, ker {}, mul {}",
        t.dim_in(),
        t.dim_out(),
        t.dom(tol).dim(),
        t.ran(tol).dim(),
        t.ker(tol).dim(),
        t.mul(tol).dim()
    );
    text_matrix(out, "  graph basis (columns)", t.graph().basis());
}

fn text_nonneg(out: &mut String, name: &str, a: &NonnegSelfAdjointRelation, tol: &Tolerances) {
    text_relation(out, name, a.relation(), tol);
    text_matrix(out, "  operator part", &a.operator_full());
}

fn cmd_block(relation: &Path, subspace: &Path, format: Format, tol: &Tolerances) -> CmdResult {
    let a = load_nonneg(relation, tol)?;
    let s = load_subspace(subspace, tol)?;
    let rep = block::analyze(&a, &s, tol)?;
    let (gb, gc) = rep.reconstruction_gaps(tol)?;
    let (nf, ng) = rep.contraction_norms();
    let fac = rep.factorize(tol)?;
    let checks = json!({
        "roundtrip_gap": rep.roundtrip_gap(tol)?,
        "reconstruction_b_gap": gb,
        "reconstruction_c_gap": gc,
        "sigma_max_f": nf,
        "sigma_max_g": ng,
        "factorization_residual": fac.matrix_residual,
    });
    let out = match format {
        Format::Json => {
            let mut v = lj::block_to_json(&rep, tol);
            v["W"] = json!(lj::matrix_to_json(&fac.w));
            v["Z"] = json!(lj::matrix_to_json(&fac.z_matrix));
            v["checks"] = checks;
            pretty(&v)
        }
        Format::Text => {
            let mut o = String::new();
            let _ = writeln!(
                o,
                "dim D1 {}, D2 {}, M1 {}, M2 {}",
                rep.d1.dim(),
                rep.d2.dim(),
                rep.m1.dim(),
                rep.m2.dim()
            );
            for (name, r) in [("a", &rep.a), ("b", &rep.b), ("c", &rep.c), ("d", &rep.d)] {
                text_relation(&mut o, name, r, tol);
            }
            text_matrix(&mut o, "g", &rep.g);
            text_matrix(&mut o, "Dg", &rep.dg);
            text_matrix(&mut o, "W", &fac.w);
            text_matrix(&mut o, "Z", &fac.z_matrix);
            let _ = writeln!(o, "checks: {checks}");
            o
        }
    };
    Ok((out, 0))
}

fn max_entry(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn cmd_schur(
    relation: &Path,
    subspace: &Path,
    method: Method,
    format: Format,
    tol: &Tolerances,
) -> CmdResult {
    let a = load_nonneg(relation, tol)?;
    let s = load_subspace(subspace, tol)?;
    let result = schur::schur_complement(&a, &s, tol)?;
    let pek = schur::pekarev_from_blocks(&result.rep, tol)?;
    let bounded = a.mul().dim() == 0;
    let oracle = if bounded {
        Some(schur::anderson_trapp(&a.operator_full(), &s, tol)?)
    } else {
        None
    };

    let chosen = match method {
        Method::Formula => result.schur.clone(),
        Method::Pekarev => pek.schur.clone(),
        Method::AndersonTrapp => match &oracle {
            Some(m) => NonnegSelfAdjointRelation::from_psd_matrix(m, tol)?,
            None => {
                return Err(Failure {
                    code: 1,
                    message: "anderson-trapp needs an everywhere-defined operator (mul A = {0})"
                        .into(),
                })
            }
        },
    };
    let mut extra = vec![
        ("method", json!(method_name(method))),
        ("pekarev_schur_gap", json!(pek.schur.gap(&result.schur)?)),
        (
            "pekarev_compression_gap",
            json!(pek.compression.gap(&result.compression)?),
        ),
        ("pekarev_conditions", json!(pek.conditions)),
        (
            "anderson_trapp_max_entry_diff",
            match &oracle {
                Some(m) => json!(max_entry(&(result.schur.operator_full() - m))),
                None => Value::Null,
            },
        ),
    ];
    extra.push((
        "additive_sum_gap",
        json!(schur::decomposition_from(&result, &pek, tol)?.sum_gap),
    ));

    let out = match format {
        Format::Json => {
            let mut v = lj::schur_to_json(&result, &pek.l, &extra, tol);
            v["schur"] = json!(lj::nonneg_to_json(&chosen, tol));
            pretty(&v)
        }
        Format::Text => {
            let mut o = String::new();
            text_nonneg(&mut o, "A/S", &chosen, tol);
            text_nonneg(&mut o, "A_S", &result.compression, tol);
            let _ = writeln!(o, "dim L {}", pek.l.dim());
            let _ = writeln!(o, "diagnostics:");
            let diag = serde_json::to_value(result.diagnostics).expect("plain struct");
            if let Value::Object(map) = diag {
                for (k, v) in map {
                    let _ = writeln!(o, "  {k}: {v}");
                }
            }
            for (k, v) in &extra {
                let _ = writeln!(o, "  {k}: {v}");
            }
            o
        }
    };
    Ok((out, 0))
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Formula => "formula",
        Method::Pekarev => "pekarev",
        Method::AndersonTrapp => "anderson-trapp",
    }
}

fn cmd_compress(relation: &Path, subspace: &Path, format: Format, tol: &Tolerances) -> CmdResult {
    let a = load_nonneg(relation, tol)?;
    let s = load_subspace(subspace, tol)?;
    let result = schur::schur_complement(&a, &s, tol)?;
    let out = match format {
        Format::Json => pretty(&json!({
            "compression": lj::nonneg_to_json(&result.compression, tol),
            "diagnostics": result.diagnostics,
        })),
        Format::Text => {
            let mut o = String::new();
            text_nonneg(&mut o, "A_S", &result.compression, tol);
            let _ = writeln!(o, "diagnostics: {}", json!(result.diagnostics));
            o
        }
    };
    Ok((out, 0))
}

fn cmd_order(a: &Path, b: &Path, format: Format, tol: &Tolerances) -> CmdResult {
    let a = load_nonneg(a, tol)?;
    let b = load_nonneg(b, tol)?;
    let ab = nonneg::leq(&a, &b, tol)?;
    let ba = nonneg::leq(&b, &a, tol)?;
    let verdict = match (ab, ba) {
        (true, true) => "both (equal)",
        (true, false) => "A<=B",
        (false, true) => "B<=A",
        (false, false) => "incomparable",
    };
    let out = match format {
        Format::Json => pretty(&json!({ "order": verdict, "a_leq_b": ab, "b_leq_a": ba })),
        Format::Text => format!("{verdict}\n"),
    };
    Ok((out, 0))
}

fn cmd_gen(
    spec: InstanceSpec,
    out_relation: Option<&Path>,
    out_subspace: Option<&Path>,
    format: Format,
    tol: &Tolerances,
) -> CmdResult {
    let inst = generator::generate(&spec, tol)?;
    let rel = serde_json::to_value(lj::nonneg_to_json(&inst.a, tol)).expect("plain struct");
    let sub = serde_json::to_value(lj::subspace_to_json(&inst.s)).expect("plain struct");
    if let (Some(r), Some(s)) = (out_relation, out_subspace) {
        let write = |p: &Path, v: &Value| {
            std::fs::write(p, pretty(v) + "\n")
                .with_context(|| format!("cannot write {}", p.display()))
        };
        write(r, &rel)?;
        write(s, &sub)?;
        return Ok((String::new(), 0));
    }
    let out = match format {
        Format::Json => pretty(&json!({ "spec": spec, "relation": rel, "subspace": sub })),
        Format::Text => {
            let mut o = String::new();
            text_nonneg(&mut o, "A", &inst.a, tol);
            text_matrix(&mut o, "S basis (columns)", inst.s.basis());
            o
        }
    };
    Ok((out, 0))
}

fn cmd_verify(
    seed: u64,
    trials: usize,
    max_dim: usize,
    format: Format,
    tol: &Tolerances,
) -> CmdResult {
    if max_dim == 0 {
        return Err(Failure {
            code: 2,
            message: "--max-dim must be positive".into(),
        });
    }
    let report = verify::run(&verify::VerifyConfig {
        seed,
        trials,
        max_dim,
        tol: *tol,
    });
    let code = if report.all_passed() { 0 } else { 1 };
    let out = match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serialises"),
        Format::Text => {
            let mut o = String::new();
            let _ = writeln!(o, "seed {seed}, trials {trials}, max dim {max_dim}");
            for (name, c) in &report.checks {
                let _ = writeln!(
                    o,
                    "{name:<24} passed {:>6}  failed {:>6}  worst residual {:e}",
                    c.passed, c.failed, c.worst_residual
                );
            }
            for f in &report.failures {
                let _ = writeln!(o, "trial {} {}: {}", f.trial, f.check, f.detail);
            }
            o
        }
    };
    Ok((out, code))
}

fn run(cli: Cli) -> CmdResult {
    let tol = Tolerances::new(cli.tol_rank, cli.tol_eq)?;
    let f = cli.format;
    match cli.command {
        Command::Block { relation, subspace } => cmd_block(&relation, &subspace, f, &tol),
        Command::Schur {
            relation,
            subspace,
            method,
        } => cmd_schur(&relation, &subspace, method, f, &tol),
        Command::Compress { relation, subspace } => cmd_compress(&relation, &subspace, f, &tol),
        Command::Order { a, b } => cmd_order(&a, &b, f, &tol),
        Command::Gen {
            n,
            k,
            d1,
            d2,
            seed,
            scale,
            out_relation,
            out_subspace,
        } => {
            let mut spec = InstanceSpec::new(n, k, d1, d2, seed);
            spec.spectrum_scale = scale;
            cmd_gen(
                spec,
                out_relation.as_deref(),
                out_subspace.as_deref(),
                f,
                &tol,
            )
        }
        Command::Verify {
            seed,
            trials,
            max_dim,
        } => cmd_verify(seed, trials, max_dim, f, &tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, code)) => {
            if !out.is_empty() {
                print!("{out}");
                if !out.ends_with('\n') {
                    println!();
                }
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
