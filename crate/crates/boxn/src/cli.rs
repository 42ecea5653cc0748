//! Command-line front end. All data outputs are the stable JSON
//! formats; logs go to standard error only. Exit codes: 0 for success
//! or a positive verdict, 1 for a falsified or negative verdict, 2 for
//! usage and I/O errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::augmentation::{self, Side};
use crate::certificates::{
    lemma21_certificate, theorem_main_certificate, SosCertificate, Verification,
    WitnessBaseCertifier,
};
use crate::family::{box_closed, box_element, d_preimage, GeneratorTuple, Sign};
use crate::gram::{
    eigen_gap_oracle, finite_order_unit_oracle, finite_positivity_oracle, order_unit_lambda_search,
    spectral_gap_search, GramBaseCertifier, PsdOutcome, SolverConfig,
};
use crate::groups::{FiniteAbelianizationWitness, GroupModel, Word};
use crate::jsonio;
use crate::ringalg::{format_scalar, RingElement};
use crate::{Error, Result};

#[derive(Parser)]
#[command(
    name = "boxn",
    about = "Exact positivity toolkit for rational group rings",
    version
)]
struct Cli {
    /// Suppress informational logs on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    /// Seed for randomized components of the numeric search.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Rewrite-step budget override for presented models.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Group model loading and validation.
    Group {
        #[command(subcommand)]
        cmd: GroupCmd,
    },
    /// Ring element utilities.
    Elem {
        #[command(subcommand)]
        cmd: ElemCmd,
    },
    /// The iterated-codifferential family and preimages.
    Family {
        #[command(subcommand)]
        cmd: FamilyCmd,
    },
    /// Certificate builders and the exact verifier.
    Cert {
        #[command(subcommand)]
        cmd: CertCmd,
    },
    /// Numeric Gram search with exact rounding.
    Gram {
        #[command(subcommand)]
        cmd: GramCmd,
    },
    /// Brute-force oracles on finite groups.
    Oracle {
        #[command(subcommand)]
        cmd: OracleCmd,
    },
    /// Augmentation-ideal decompositions and filtrations.
    Aug {
        #[command(subcommand)]
        cmd: AugCmd,
    },
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Load a group file, validate it, and report.
    Check {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ElemCmd {
    /// Canonicalize an element file.
    Eval {
        #[arg(long)]
        elem: PathBuf,
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum FamilyCmd {
    /// The n-th element of the family (recursive form).
    Box(FamilyBoxArgs),
    /// The n-th element of the family (closed form).
    BoxClosed(FamilyBoxArgs),
    /// A matrix preimage under D of an augmentation-ideal element.
    Dpreimage {
        #[arg(long)]
        elem: PathBuf,
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FamilyBoxArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    group: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CertCmd {
    /// One-summand certificate for an off-diagonal matrix plus its
    /// diagonal companion.
    #[command(name = "build-lemma21")]
    BuildLemma21 {
        #[arg(long)]
        group: PathBuf,
        /// Comma-separated generator tuple for the left product.
        #[arg(long)]
        s: String,
        /// Comma-separated generator tuple for the right product.
        #[arg(long)]
        t: String,
        /// Middle group element (word over the generators).
        #[arg(long, default_value = "e")]
        g: String,
        #[arg(long, default_value = "plus")]
        sign: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Order-unit certificate through the inductive chain.
    #[command(name = "build-theorem")]
    BuildTheorem {
        #[arg(long)]
        elem: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        group: Option<PathBuf>,
        /// Base certifier: "gram" (finite groups) or "explicit".
        #[arg(long, default_value = "gram")]
        base: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact verification; exits 0 when verified, 1 when falsified.
    Verify { file: PathBuf },
}

#[derive(Subcommand)]
enum GramCmd {
    /// Order-unit lambda search: target + lambda * u certified exactly.
    Search {
        #[arg(long)]
        target: PathBuf,
        #[arg(long = "order-unit")]
        order_unit: PathBuf,
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectral-gap search for the Laplacian.
    Gap {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Exact positivity of the regular representation.
    Psd {
        #[arg(long)]
        elem: PathBuf,
        #[arg(long)]
        group: Option<PathBuf>,
    },
    /// Exact order-unit criterion on the complement of the constants.
    Orderunit {
        #[arg(long)]
        elem: PathBuf,
        #[arg(long)]
        group: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum AugCmd {
    /// Generator decomposition (--side) or nested idempotence
    /// decomposition (--depth).
    Decompose {
        #[arg(long)]
        elem: PathBuf,
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long)]
        side: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dimensions of the augmentation quotients (finite models).
    Dims {
        #[arg(long)]
        group: PathBuf,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The n-th dimension subgroup (finite models).
    Dimsub {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Entry point used by the binary and by tests. Returns the process
/// exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    }
}

fn emit(out: &Option<PathBuf>, v: &Value) -> Result<()> {
    match out {
        Some(path) => jsonio::write_json_file(path, v),
        None => {
            print!("{}", jsonio::to_json_string(v));
            Ok(())
        }
    }
}

fn info(cli_quiet: bool, msg: &str) {
    if !cli_quiet {
        eprintln!("{msg}");
    }
}

fn load_group(path: &Path, budget: Option<u64>, quiet: bool) -> Result<Arc<GroupModel>> {
    let (mut group, warnings) = jsonio::load_group_file(path)?;
    for w in warnings {
        if !quiet {
            eprintln!("warning: {w}");
        }
    }
    if let Some(b) = budget {
        if let Some(inner) = Arc::get_mut(&mut group) {
            inner.normalization_budget = b;
        }
    }
    Ok(group)
}

fn load_elem(
    path: &Path,
    group_path: &Option<PathBuf>,
    budget: Option<u64>,
    quiet: bool,
) -> Result<RingElement> {
    let group = match group_path {
        Some(p) => Some(load_group(p, budget, quiet)?),
        None => None,
    };
    jsonio::load_element_file(path, group.as_ref())
}

fn witness_for(group: &Arc<GroupModel>) -> Result<FiniteAbelianizationWitness> {
    if let Some(w) = &group.witness {
        let mut w = w.clone();
        group.complete_witness(&mut w);
        return Ok(w);
    }
    if group.is_finite_model() {
        return group.auto_witness();
    }
    Err(Error::WitnessRequired)
}

fn parse_tuple(text: &str, group: &Arc<GroupModel>) -> Result<GeneratorTuple> {
    let letters = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            group
                .alphabet
                .index_of(s.trim())
                .ok_or_else(|| Error::UnknownGenerator(s.trim().to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GeneratorTuple(letters))
}

fn solver_config(seed: Option<u64>, tol: Option<f64>, radius: Option<usize>) -> SolverConfig {
    let mut config = SolverConfig::default();
    if let Some(s) = seed {
        config.seed = s;
    }
    if let Some(t) = tol {
        config.tol = t;
    }
    config.radius = radius;
    config
}

fn verify_report(cert: &SosCertificate, quiet: bool) -> Result<i32> {
    match cert.verify()? {
        Verification::Verified => {
            info(quiet, "verified: the identity holds exactly");
            Ok(0)
        }
        Verification::Falsified { residual } => {
            let mut support = 0usize;
            for i in 0..residual.rows() {
                for j in 0..residual.cols() {
                    support += residual.at(i, j).support_len();
                }
            }
            info(
                quiet,
                &format!("falsified: nonzero residual with {support} residual terms"),
            );
            Ok(1)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let quiet = cli.quiet;
    match &cli.command {
        Command::Group {
            cmd: GroupCmd::Check { group, out },
        } => match jsonio::load_group_file(group) {
            Ok((model, warnings)) => {
                for w in &warnings {
                    if !quiet {
                        eprintln!("warning: {w}");
                    }
                }
                let kind = match model.kind {
                    crate::groups::GroupKind::Free { .. } => "free",
                    crate::groups::GroupKind::Finite { .. } => "finite",
                    crate::groups::GroupKind::Presented { .. } => "presented",
                };
                let report = json!({
                    "ok": true,
                    "kind": kind,
                    "generators": model.alphabet.names(),
                    "order": model.finite_order(),
                    "has_witness": model.witness.is_some(),
                    "warnings": warnings,
                });
                emit(out, &report)?;
                Ok(0)
            }
            Err(e @ (Error::InvalidGroup(_) | Error::InvalidWitness(_))) => {
                eprintln!("invalid group: {e}");
                emit(out, &json!({"ok": false, "error": e.to_string()}))?;
                Ok(1)
            }
            Err(e) => Err(e),
        },
        Command::Elem {
            cmd: ElemCmd::Eval { elem, group, out },
        } => {
            let x = load_elem(elem, group, cli.budget, quiet)?;
            info(
                quiet,
                &format!(
                    "support {} terms, augmentation {}, hermitian: {}",
                    x.support_len(),
                    format_scalar(&x.augmentation()),
                    x.is_hermitian()
                ),
            );
            emit(out, &jsonio::element_to_value(&x))?;
            Ok(0)
        }
        Command::Family { cmd } => match cmd {
            FamilyCmd::Box(args) => {
                let group = load_group(&args.group, cli.budget, quiet)?;
                let x = box_element(&group, args.n)?;
                emit(&args.out, &jsonio::element_to_value(&x))?;
                Ok(0)
            }
            FamilyCmd::BoxClosed(args) => {
                let group = load_group(&args.group, cli.budget, quiet)?;
                let x = box_closed(&group, args.n)?;
                emit(&args.out, &jsonio::element_to_value(&x))?;
                Ok(0)
            }
            FamilyCmd::Dpreimage { elem, group, out } => {
                let x = load_elem(elem, group, cli.budget, quiet)?;
                let witness = witness_for(x.group())?;
                let m = d_preimage(&x, &witness)?;
                emit(out, &jsonio::matrix_to_value(&m))?;
                Ok(0)
            }
        },
        Command::Cert { cmd } => match cmd {
            CertCmd::BuildLemma21 {
                group,
                s,
                t,
                g,
                sign,
                out,
            } => {
                let model = load_group(group, cli.budget, quiet)?;
                let s = parse_tuple(s, &model)?;
                let t = parse_tuple(t, &model)?;
                let g = Word::parse(g, &model.alphabet)?;
                let sign = match sign.as_str() {
                    "plus" | "+" => Sign::Plus,
                    "minus" | "-" => Sign::Minus,
                    other => return Err(Error::Parse(format!("unknown sign {other:?}"))),
                };
                let cert = lemma21_certificate(&model, &s, &t, &g, sign)?;
                emit(out, &jsonio::certificate_to_value(&cert))?;
                verify_report(&cert, quiet)
            }
            CertCmd::BuildTheorem {
                elem,
                n,
                group,
                base,
                out,
            } => {
                let x = load_elem(elem, group, cli.budget, quiet)?;
                let witness = witness_for(x.group())?;
                let cert = match base.as_str() {
                    "gram" => {
                        let certifier = GramBaseCertifier {
                            config: solver_config(cli.seed, None, None),
                        };
                        theorem_main_certificate(&x, *n, &witness, &certifier)?
                    }
                    "explicit" | "witness" => {
                        let certifier = WitnessBaseCertifier { witness: &witness };
                        theorem_main_certificate(&x, *n, &witness, &certifier)?
                    }
                    other => return Err(Error::Parse(format!("unknown base certifier {other:?}"))),
                };
                info(quiet, &format!("lambda = {}", format_scalar(&cert.lambda)));
                emit(out, &jsonio::certificate_to_value(&cert))?;
                verify_report(&cert, quiet)
            }
            CertCmd::Verify { file } => {
                let cert = jsonio::load_certificate_file(file, None)?;
                verify_report(&cert, quiet)
            }
        },
        Command::Gram { cmd } => match cmd {
            GramCmd::Search {
                target,
                order_unit,
                group,
                tol,
                radius,
                out,
            } => {
                let t = load_elem(target, group, cli.budget, quiet)?;
                let u = jsonio::load_element_file(order_unit, Some(t.group()))?;
                let config = solver_config(cli.seed, Some(*tol), *radius);
                match order_unit_lambda_search(&t, &u, &config) {
                    Ok((lambda, cert)) => {
                        info(quiet, &format!("lambda = {}", format_scalar(&lambda)));
                        emit(out, &jsonio::certificate_to_value(&cert))?;
                        verify_report(&cert, quiet)
                    }
                    Err(Error::SearchFailed) => {
                        info(quiet, "search failed: grid exhausted (not a disproof)");
                        Ok(1)
                    }
                    Err(e) => Err(e),
                }
            }
            GramCmd::Gap { group, radius, out } => {
                let model = load_group(group, cli.budget, quiet)?;
                let config = solver_config(cli.seed, None, *radius);
                match spectral_gap_search(&model, &config) {
                    Ok((lambda, cert)) => {
                        info(quiet, &format!("gap lambda = {}", format_scalar(&lambda)));
                        if model.is_finite_model() {
                            if let Ok(gap) = eigen_gap_oracle(&model) {
                                info(quiet, &format!("eigenvalue oracle gap = {gap}"));
                            }
                        }
                        let wrapper = json!({
                            "certificate": jsonio::certificate_to_value(&cert),
                            "lambda": format_scalar(&lambda),
                        });
                        emit(out, &wrapper)?;
                        verify_report(&cert, quiet)
                    }
                    Err(Error::SearchFailed) => {
                        info(quiet, "search failed (not a disproof)");
                        Ok(1)
                    }
                    Err(e) => Err(e),
                }
            }
        },
        Command::Oracle { cmd } => match cmd {
            OracleCmd::Psd { elem, group } => {
                let x = load_elem(elem, group, cli.budget, quiet)?;
                match finite_positivity_oracle(&x)? {
                    PsdOutcome::Psd(_) => {
                        println!("{}", jsonio::to_json_string(&json!({"verdict": "psd"})));
                        Ok(0)
                    }
                    PsdOutcome::NotPsd { witness } => {
                        let w: Vec<String> = witness.iter().map(format_scalar).collect();
                        println!(
                            "{}",
                            jsonio::to_json_string(&json!({"verdict": "not_psd", "witness": w}))
                        );
                        Ok(1)
                    }
                }
            }
            OracleCmd::Orderunit { elem, group } => {
                let x = load_elem(elem, group, cli.budget, quiet)?;
                let verdict = finite_order_unit_oracle(&x)?;
                println!(
                    "{}",
                    jsonio::to_json_string(&json!({"order_unit": verdict}))
                );
                Ok(if verdict { 0 } else { 1 })
            }
        },
        Command::Aug { cmd } => match cmd {
            AugCmd::Decompose {
                elem,
                group,
                side,
                depth,
                out,
            } => {
                let x = load_elem(elem, group, cli.budget, quiet)?;
                match (side, depth) {
                    (Some(_), Some(_)) => Err(Error::Parse(
                        "--side and --depth are mutually exclusive".into(),
                    )),
                    (_, None) => {
                        let side = match side.as_deref() {
                            None | Some("left") => Side::Left,
                            Some("right") => Side::Right,
                            Some(other) => {
                                return Err(Error::Parse(format!("unknown side {other:?}")))
                            }
                        };
                        let d = augmentation::generator_decompose(&x, side)?;
                        emit(out, &jsonio::decomposition_to_value(&d, x.group()))?;
                        Ok(0)
                    }
                    (None, Some(depth)) => {
                        let witness = witness_for(x.group())?;
                        let expr = augmentation::idempotence_decompose(&x, &witness, *depth)?;
                        emit(out, &jsonio::square_expression_to_value(&expr, x.group()))?;
                        Ok(0)
                    }
                }
            }
            AugCmd::Dims { group, nmax, out } => {
                let model = load_group(group, cli.budget, quiet)?;
                let dims = augmentation::quotient_dims(&model, *nmax)?;
                emit(out, &json!({ "dims": dims }))?;
                Ok(0)
            }
            AugCmd::Dimsub { group, n, out } => {
                let model = load_group(group, cli.budget, quiet)?;
                let elements = augmentation::dimension_subgroup(&model, *n)?;
                let words: Vec<String> =
                    elements.iter().map(|w| w.render(&model.alphabet)).collect();
                emit(out, &json!({ "elements": words }))?;
                Ok(0)
            }
        },
    }
}
