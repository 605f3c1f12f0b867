//! Command-line driver: thin dispatch into the library, deterministic
//! reports, exit code 0 on success, 1 on any failed identity, 2 on usage
//! errors.

use clap::{Parser, Subcommand};
use eiskit::characters::{char_from_index, DirChar};
use eiskit::cusps::{
    constant_term_adelic, constant_term_classical, enumerate_cusps, ordinary_projector_cusps,
    CuspGroup,
};
use eiskit::eisenstein::{
    check_congruence, eisenstein_level_one, eisenstein_qexp, eta_product_cuspform, hecke_s,
    hecke_t, EtaProduct,
};
use eiskit::exactmath::padic::PadicRing;
use eiskit::lambda_adic::{
    congruence_module_order, kubota_leopoldt, lambda_eisenstein, CongruenceFiber,
};
use eiskit::report::{emit_table, RunManifest, SuiteReport, TableFormat};
use eiskit::verify;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "eiskit", version, about = "exact Eisenstein/character-sum toolkit")]
struct Cli {
    /// Number of worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file (default: stdout; directory from EISKIT_OUT_DIR)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format for tables
    #[arg(long, global = true, default_value = "csv")]
    format: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Finite-place identity batteries
    Localsums {
        #[command(subcommand)]
        sub: LocalsumsCmd,
    },
    /// Eisenstein q-expansions and congruences
    Eis {
        #[command(subcommand)]
        sub: EisCmd,
    },
    /// Cusp enumeration, boundary values, ordinary projector
    Cusps {
        #[command(subcommand)]
        sub: CuspsCmd,
    },
    /// One-variable families and p-adic L-series
    Lambda {
        #[command(subcommand)]
        sub: LambdaCmd,
    },
    /// Acceptance batteries
    Run {
        #[command(subcommand)]
        sub: RunCmd,
    },
}

#[derive(Subcommand)]
enum LocalsumsCmd {
    /// Run the character-sum identity batteries up to a modulus cap
    Verify {
        #[arg(long, default_value_t = 27)]
        max_modulus: u64,
    },
}

#[derive(Subcommand)]
enum EisCmd {
    /// Print coefficients of the Eisenstein series of a character pair
    Qexp {
        #[arg(long)]
        chi1: String,
        #[arg(long)]
        chi2: String,
        #[arg(long)]
        weight: i64,
        #[arg(long, default_value_t = 30)]
        bound: usize,
    },
    /// Apply a Hecke operator and print the image coefficients
    Hecke {
        #[arg(long)]
        chi1: String,
        #[arg(long)]
        chi2: String,
        #[arg(long)]
        weight: i64,
        #[arg(long, default_value_t = 60)]
        bound: usize,
        /// T or S
        #[arg(long, default_value = "T")]
        op: String,
        #[arg(long)]
        index: u64,
    },
    /// Coefficientwise congruence between an eta product and a series
    Congruence {
        /// delta or f11
        #[arg(long)]
        partner: String,
        /// modulus as p^t, e.g. 691^1
        #[arg(long)]
        modulus: String,
        #[arg(long, default_value_t = 200)]
        bound: usize,
    },
}

#[derive(Subcommand)]
enum CuspsCmd {
    /// List cusps of a congruence subgroup
    List {
        #[arg(long)]
        level: u64,
        /// g1 or g0
        #[arg(long, default_value = "g1")]
        group: String,
    },
    /// Boundary constant terms at every cusp, by one or both routes
    Constants {
        #[arg(long)]
        chi1: String,
        #[arg(long)]
        chi2: String,
        #[arg(long)]
        weight: i64,
        #[arg(long, default_value_t = false)]
        both_formulas: bool,
    },
    /// Ordinary projector data on the cusp module
    Ordinary {
        #[arg(long)]
        level: u64,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value_t = 6)]
        precision: u32,
    },
}

#[derive(Subcommand)]
enum LambdaCmd {
    /// Coefficients of the Eisenstein family over the truncated algebra
    Eis {
        #[arg(long)]
        chi1: String,
        #[arg(long)]
        chi2: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 5)]
        prec: u32,
        #[arg(long, default_value_t = 8)]
        tdeg: usize,
        #[arg(long, default_value_t = 20)]
        bound: usize,
    },
    /// Interpolated p-adic L-series of an even character
    Lp {
        #[arg(long = "char")]
        character: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 5)]
        prec: u32,
        #[arg(long, default_value_t = 8)]
        tdeg: usize,
    },
    /// Congruence-module order report at a desk-scale fiber
    Congmod {
        /// fiber weight: 12 (level 1) or 2 (level 11)
        #[arg(long)]
        fiber: u32,
        /// delta or f11
        #[arg(long)]
        partner: String,
        #[arg(long, default_value_t = 200)]
        window: usize,
    },
}

#[derive(Subcommand)]
enum RunCmd {
    /// Run an acceptance suite: localsums, cusps, eisenstein, lambda, all
    Acceptance {
        #[arg(default_value = "all")]
        suite: String,
        /// Reduced bounds for a fast smoke run
        #[arg(long, default_value_t = false)]
        quick: bool,
    },
}

/// Character spec: `M` (trivial mod M), `M:n` (index pairing), or
/// `M:[a,b,...]` (generator image exponents).
fn parse_char(s: &str) -> Result<DirChar, String> {
    if let Some((m, rest)) = s.split_once(':') {
        let m: u64 = m.parse().map_err(|_| format!("bad modulus in {s}"))?;
        if rest.starts_with('[') {
            let inner = rest.trim_start_matches('[').trim_end_matches(']');
            let images: Result<Vec<u64>, _> =
                inner.split(',').filter(|t| !t.is_empty()).map(|t| t.trim().parse()).collect();
            let images = images.map_err(|_| format!("bad image list in {s}"))?;
            Ok(DirChar::from_images(m, &images))
        } else {
            let n: u64 = rest.parse().map_err(|_| format!("bad index in {s}"))?;
            char_from_index(m, n).ok_or_else(|| format!("index {n} not a unit mod {m}"))
        }
    } else {
        let m: u64 = s.parse().map_err(|_| format!("bad modulus {s}"))?;
        Ok(DirChar::trivial(m))
    }
}

fn write_out(out: &Option<PathBuf>, content: &str) -> std::io::Result<()> {
    match out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            let path = match std::env::var("EISKIT_OUT_DIR") {
                Ok(dir) if path.is_relative() => PathBuf::from(dir).join(path),
                _ => path.clone(),
            };
            std::fs::write(path, content)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let format: TableFormat = match cli.format.parse() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    match run(cli.command, format, &cli.out) {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command, format: TableFormat, out: &Option<PathBuf>) -> Result<bool, String> {
    match cmd {
        Command::Localsums { sub: LocalsumsCmd::Verify { max_modulus } } => {
            let quick = max_modulus <= 27;
            let reports = verify::run_suite("localsums", quick).unwrap();
            let manifest = RunManifest::new(
                vec!["localsums".into(), "verify".into()],
                serde_json::json!({ "max_modulus": max_modulus }),
            );
            let suite = SuiteReport { manifest, criteria: reports };
            for c in &suite.criteria {
                println!("{}", c.summary_line());
            }
            write_out(out, &serde_json::to_string_pretty(&suite).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            Ok(suite.all_pass())
        }
        Command::Eis { sub } => match sub {
            EisCmd::Qexp { chi1, chi2, weight, bound } => {
                let c1 = parse_char(&chi1)?;
                let c2 = parse_char(&chi2)?;
                let e = eisenstein_qexp(&c1, &c2, weight, bound).map_err(|e| e.to_string())?;
                let mut rows = vec![vec![
                    "0".to_string(),
                    format!("{:?}", e.constant_term_infinity),
                ]];
                for n in 1..=bound {
                    rows.push(vec![n.to_string(), format!("{:?}", e.coeff(n))]);
                }
                write_out(out, &emit_table(&["n", "coefficient"], &rows, format))
                    .map_err(|e| e.to_string())?;
                Ok(true)
            }
            EisCmd::Hecke { chi1, chi2, weight, bound, op, index } => {
                let c1 = parse_char(&chi1)?;
                let c2 = parse_char(&chi2)?;
                let e = eisenstein_qexp(&c1, &c2, weight, bound).map_err(|e| e.to_string())?;
                let image = match op.as_str() {
                    "T" => hecke_t(&e, index).map_err(|e| e.to_string())?,
                    "S" => hecke_s(&e, index),
                    other => return Err(format!("unknown operator {other}")),
                };
                let rows: Vec<Vec<String>> = (1..=image.bound)
                    .map(|n| vec![n.to_string(), format!("{:?}", image.coeff(n))])
                    .collect();
                write_out(out, &emit_table(&["n", "coefficient"], &rows, format))
                    .map_err(|e| e.to_string())?;
                Ok(true)
            }
            EisCmd::Congruence { partner, modulus, bound } => {
                let (p, t) = modulus
                    .split_once('^')
                    .map(|(a, b)| (a.parse::<u64>(), b.parse::<u32>()))
                    .map(|(a, b)| (a.unwrap_or(0), b.unwrap_or(1)))
                    .unwrap_or((modulus.parse().unwrap_or(0), 1));
                if p == 0 {
                    return Err("bad modulus".into());
                }
                let (f, g) = match partner.as_str() {
                    "delta" => (
                        eta_product_cuspform(EtaProduct::Delta, bound),
                        eisenstein_level_one(12, bound).map_err(|e| e.to_string())?,
                    ),
                    "f11" => (
                        eta_product_cuspform(EtaProduct::Level11, bound),
                        eiskit::eisenstein::eisenstein_level_one_stabilized(2, 11, bound)
                            .map_err(|e| e.to_string())?,
                    ),
                    other => return Err(format!("unknown partner {other}")),
                };
                let rep = check_congruence(&f, &g, p, t, bound);
                write_out(out, &serde_json::to_string_pretty(&rep).map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
                println!(
                    "congruence mod {p}^{t} on 1..={bound}: {}",
                    if rep.holds() { "holds" } else { "fails" }
                );
                Ok(rep.holds())
            }
        },
        Command::Cusps { sub } => match sub {
            CuspsCmd::List { level, group } => {
                let group = match group.as_str() {
                    "g0" => CuspGroup::Gamma0,
                    "g1" => CuspGroup::Gamma1,
                    other => return Err(format!("unknown group {other}")),
                };
                let rows: Vec<Vec<String>> = enumerate_cusps(level, group)
                    .iter()
                    .map(|c| {
                        vec![
                            c.label(),
                            format!("{}", c.a),
                            format!("{}", c.c),
                            format!("{:?}", c.witness),
                        ]
                    })
                    .collect();
                write_out(out, &emit_table(&["cusp", "a", "c", "witness"], &rows, format))
                    .map_err(|e| e.to_string())?;
                Ok(true)
            }
            CuspsCmd::Constants { chi1, chi2, weight, both_formulas } => {
                let c1 = parse_char(&chi1)?;
                let c2 = parse_char(&chi2)?;
                let level = c1.primitivize().modulus() * c2.primitivize().modulus();
                let mut rows = Vec::new();
                let mut all_equal = true;
                for cusp in enumerate_cusps(level, CuspGroup::Gamma1) {
                    let cl = constant_term_classical(&c1, &c2, weight, &cusp)
                        .map_err(|e| e.to_string())?;
                    if both_formulas {
                        let ad = constant_term_adelic(&c1, &c2, weight, &cusp)
                            .map_err(|e| e.to_string())?;
                        let eq = cl == ad;
                        all_equal &= eq;
                        rows.push(vec![
                            cusp.label(),
                            format!("{:?}", cl),
                            format!("{:?}", ad),
                            eq.to_string(),
                        ]);
                    } else {
                        rows.push(vec![cusp.label(), format!("{:?}", cl)]);
                    }
                }
                let headers: &[&str] = if both_formulas {
                    &["cusp", "classical", "adelic", "equal"]
                } else {
                    &["cusp", "classical"]
                };
                write_out(out, &emit_table(headers, &rows, format)).map_err(|e| e.to_string())?;
                Ok(all_equal)
            }
            CuspsCmd::Ordinary { level, p, r, precision } => {
                let full_level = level * p.pow(r);
                let ring = PadicRing::plain(p, precision);
                let proj =
                    ordinary_projector_cusps(full_level, p, &ring).map_err(|e| e.to_string())?;
                let deep = proj.deep_classes(p);
                let rows: Vec<Vec<String>> = proj
                    .cusps
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        vec![
                            c.label(),
                            if deep.contains(&i) { "annihilated" } else { "ordinary" }.to_string(),
                        ]
                    })
                    .collect();
                write_out(out, &emit_table(&["cusp", "class"], &rows, format))
                    .map_err(|e| e.to_string())?;
                println!(
                    "level {full_level}: {} cusps, ordinary rank {}",
                    proj.cusps.len(),
                    proj.cusps.len() - deep.len()
                );
                Ok(true)
            }
        },
        Command::Lambda { sub } => match sub {
            LambdaCmd::Eis { chi1, chi2, p, prec, tdeg, bound } => {
                let c1 = parse_char(&chi1)?;
                let c2 = parse_char(&chi2)?;
                let fam = lambda_eisenstein(&c1, &c2, p, prec, tdeg, bound)
                    .map_err(|e| e.to_string())?;
                let mut rows = vec![vec!["0".to_string(), format!("{:?}", fam.constant_term)]];
                for n in 1..=bound {
                    rows.push(vec![n.to_string(), format!("{:?}", fam.coeff(n))]);
                }
                write_out(out, &emit_table(&["n", "series"], &rows, format))
                    .map_err(|e| e.to_string())?;
                Ok(true)
            }
            LambdaCmd::Lp { character, p, prec, tdeg } => {
                let chi = parse_char(&character)?;
                let ring = PadicRing::for_orders(p, prec, &[chi.order()]);
                let g = kubota_leopoldt(&chi, &ring, tdeg).map_err(|e| e.to_string())?;
                write_out(out, &format!("{:?}\n", g.series)).map_err(|e| e.to_string())?;
                Ok(true)
            }
            LambdaCmd::Congmod { fiber, partner, window } => {
                let fiber = match (fiber, partner.as_str()) {
                    (12, "delta") => CongruenceFiber::Ramanujan691,
                    (2, "f11") => CongruenceFiber::Mazur11,
                    _ => return Err("supported fibers: --fiber 12 --partner delta, --fiber 2 --partner f11".into()),
                };
                let rep = congruence_module_order(fiber, window).map_err(|e| e.to_string())?;
                println!(
                    "fiber {:?}: p = {}, ord_p(value) = {}, value = {}, congruence depth {} ({} discrepancies), consistent: {}",
                    rep.fiber,
                    rep.p,
                    rep.a_valuation,
                    rep.a_value,
                    rep.congruence_depth,
                    rep.congruence.discrepancies.len(),
                    rep.consistent
                );
                Ok(rep.consistent && rep.congruence.holds())
            }
        },
        Command::Run { sub: RunCmd::Acceptance { suite, quick } } => {
            let Some(reports) = verify::run_suite(&suite, quick) else {
                return Err(format!("unknown suite {suite}"));
            };
            let manifest = RunManifest::new(
                vec!["run".into(), "acceptance".into(), suite.clone()],
                serde_json::json!({ "suite": suite, "quick": quick }),
            );
            let suite_report = SuiteReport { manifest, criteria: reports };
            for c in &suite_report.criteria {
                println!("{}", c.summary_line());
            }
            if let Some(path) = out {
                write_out(&Some(path.clone()), &serde_json::to_string_pretty(&suite_report).map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
            }
            Ok(suite_report.all_pass())
        }
    }
}
