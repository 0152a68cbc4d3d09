use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use tworay::error::usage;
use tworay::fixtures::{annotate, check, Reference, TableCheck};
use tworay::{canonical_json, format, parse_bounds, search, CliError, Family, LinkReport};
use tworay_core::{analyze_dp2, analyze_dp3, DP3Params};

/// Magnitude caps for single inputs; larger values risk overflow in det2.
const MAX_WEIGHT: i64 = 64;
const MAX_DEGREE: i64 = 512;

#[derive(Parser)]
#[command(name = "tworay", version, about = "2-ray games of del Pezzo fibrations in weighted bundles")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Dp2,
    Dp3,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Dp2 => Family::Dp2,
            FamilyArg::Dp3 => Family::Dp3,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Fmt {
    Json,
    Text,
    Latex,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify one input and print its report
    Analyze {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// α,β,γ,δ for dp2; a,b,c for dp3
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        weights: Vec<i64>,
        #[arg(long, allow_hyphen_values = true)]
        e: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        d: Option<i64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Fmt,
        /// Exit 3 when the verdict is undetermined
        #[arg(long)]
        strict: bool,
    },
    /// Classify a parameter grid
    Search {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Comma-separated clauses such as `w<=7,e>=-2,e<=14` or `n<=12`
        #[arg(long, allow_hyphen_values = true)]
        bounds: Option<String>,
        /// Keep only links found in the reference tables; list the rest as anomalies
        #[arg(long)]
        paper_strict: bool,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: u16,
        #[arg(long, value_enum, default_value = "json")]
        format: Fmt,
    },
    /// Compare the default searches with the reference tables
    CheckTables {
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: u16,
        #[arg(long, value_enum, default_value = "text")]
        format: Fmt,
    },
}

fn check_range(name: &str, v: i64, cap: i64) -> Result<(), CliError> {
    if v.abs() > cap {
        return Err(usage(format!("{} = {} is outside [-{}, {}]", name, v, cap, cap)));
    }
    Ok(())
}

fn analyze(family: Family, weights: &[i64], e: Option<i64>, d: Option<i64>) -> Result<LinkReport, CliError> {
    for &w in weights {
        check_range("weight", w, MAX_WEIGHT)?;
    }
    match family {
        Family::Dp2 => {
            let (Ok(w), Some(e), None) = (<[i64; 4]>::try_from(weights), e, d) else {
                return Err(usage("dp2 takes --weights α,β,γ,δ and --e N"));
            };
            check_range("e", e, MAX_DEGREE)?;
            let a = analyze_dp2(w, e).map_err(|err| usage(format!("weights {:?}: {}", w, err)))?;
            Ok(LinkReport::from_dp2(&a))
        }
        Family::Dp3 => {
            let (&[a, b, c], Some(d), None) = (weights, d, e) else {
                return Err(usage("dp3 takes --weights a,b,c and --d N"));
            };
            check_range("d", d, MAX_DEGREE)?;
            let p = DP3Params::new(a, b, c, d);
            if !p.is_normalised() {
                return Err(usage("dp3 weights need 0 <= a <= b <= c"));
            }
            Ok(LinkReport::from_dp3(&analyze_dp3(p)))
        }
    }
}

fn check_text(name: &str, c: &TableCheck) -> String {
    let mut s = format!("{}: {}/{} rows match", name, c.matched_rows, c.expected_rows);
    if !c.corrections.is_empty() {
        s += &format!(", {} corrections applied", c.corrections.len());
    }
    s.push('\n');
    for k in &c.corrections {
        s += &format!("  correction row {} {}: {} -> {} ({})\n", k.row, k.pointer, k.printed, k.corrected, k.reason);
    }
    for m in &c.mismatches {
        s += &format!("  MISMATCH row {} {:?} {}: table {} computed {}\n", m.row, m.params, m.field, m.expected, m.computed);
    }
    for p in &c.missing {
        s += &format!("  MISSING {:?}: no computed link\n", p);
    }
    for p in &c.extra {
        s += &format!("  extra link outside the table: {:?}\n", p);
    }
    for m in &c.notes {
        s += &format!("  note row {} {}: table {} computed {}\n", m.row, m.field, m.expected, m.computed);
    }
    s
}

fn run(cli: Cli) -> Result<(String, u8), CliError> {
    match cli.cmd {
        Cmd::Analyze { family, weights, e, d, format: fmt, strict } => {
            let family = Family::from(family);
            let mut r = analyze(family, &weights, e, d)?;
            if let Ok(reference) = Reference::load(family) {
                annotate(&reference, &mut r);
            }
            let out = match fmt {
                Fmt::Json => canonical_json(&r),
                Fmt::Text => format::report_text(&r),
                _ => return Err(usage("analyze supports --format json|text")),
            };
            let code = if strict && r.verdict.kind == "undetermined" { 3 } else { 0 };
            Ok((out, code))
        }
        Cmd::Search { family, bounds, paper_strict, jobs, format: fmt } => {
            let family = Family::from(family);
            let b = parse_bounds(family, bounds.as_deref().unwrap_or(""))?;
            let mut rep = search::run(b, jobs as usize)?;
            if paper_strict {
                search::apply_paper_strict(&mut rep, &Reference::load(family)?);
            }
            let out = match fmt {
                Fmt::Json => canonical_json(&rep),
                Fmt::Text => format::search_text(&rep),
                Fmt::Latex => format::search_latex(&rep),
                Fmt::Csv => format::search_csv(&rep),
            };
            Ok((out, 0))
        }
        Cmd::CheckTables { family, jobs, format: fmt } => {
            let families = match family {
                Some(f) => vec![Family::from(f)],
                None => vec![Family::Dp2, Family::Dp3],
            };
            let mut checks = Vec::new();
            for f in families {
                let reference = Reference::load(f)?;
                let rep = search::run(search::Bounds::default_for(f), jobs as usize)?;
                checks.push((f, check(&reference, &rep.links)));
            }
            let passed = checks.iter().all(|(_, c)| c.passed());
            let out = match fmt {
                Fmt::Json => {
                    let m: serde_json::Map<_, _> = checks.iter().map(|(f, c)| (f.to_string(), json!(c))).collect();
                    canonical_json(&json!({"passed": passed, "checks": m}))
                }
                Fmt::Text => {
                    let mut s: String = checks.iter().map(|(f, c)| check_text(&f.to_string(), c)).collect();
                    s += if passed { "tables match\n" } else { "tables differ\n" };
                    s
                }
                _ => return Err(usage("check-tables supports --format json|text")),
            };
            Ok((out, if passed { 0 } else { 1 }))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, code)) => {
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()) {
                eprintln!("error: {}", CliError::from(e));
                return ExitCode::from(1);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
