use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use iwasawa_eis::arith::format_rational;
use iwasawa_eis::ledger::{dir, dir_via_me, residue_eis, WeightFunction};
use iwasawa_eis::units::{theta_qexp, ThetaSpec, TorsionPoint};
use iwasawa_eis::verify::{self, Grid, Suite, VerifyReport};
use iwasawa_eis::Error;

#[derive(Parser)]
#[command(name = "iwasawa-eis", version, about = "Exact verification of Eisenstein-class formulas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    Closed,
    Me,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite over a parameter grid.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 2)]
        ell: u64,
        #[arg(long = "N", default_value_t = 3)]
        n: u64,
        #[arg(long, default_value_t = 5)]
        c: i64,
        #[arg(long, default_value_t = 2)]
        rmax: u32,
        #[arg(long, default_value_t = 4)]
        kmax: u32,
        #[arg(long, default_value_t = 24)]
        trunc: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Record wall time in the report (makes output run-dependent).
        #[arg(long)]
        timing: bool,
    },
    /// Print the q-expansion of theta at a torsion point.
    Qexp {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        r: u32,
        #[arg(long = "N")]
        n: u64,
        #[arg(long)]
        c: i64,
        #[arg(long)]
        x: i64,
        #[arg(long)]
        y: i64,
        #[arg(long, default_value_t = 24)]
        trunc: i64,
    },
    /// Residues at the cusp of every Eisenstein class of level N and weight k.
    ResidueTable {
        #[arg(long = "N")]
        n: u64,
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Evaluate Dir on a weight function read from JSON.
    Dir {
        #[arg(long)]
        psi: PathBuf,
        #[arg(long)]
        c: Option<i64>,
        #[arg(long, value_enum, default_value = "closed")]
        route: Route,
    },
}

enum Failure {
    Verification(String),
    Input(String),
    Residue(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Input(_) => 2,
            Failure::Residue(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonzeroResidue(ref r) => Failure::Residue(
                serde_json::json!({ "error": e.to_string(), "residue": format_rational(r) }).to_string(),
            ),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn csv_err(e: csv::Error) -> Failure {
    Failure::Input(e.to_string())
}

fn report_csv(rep: &VerifyReport) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rep.suite == Suite::Bernoulli {
        w.write_record(["ell", "r", "N", "c", "t", "k", "finite_sum", "closed_value", "congruent"]).map_err(csv_err)?;
        for row in &rep.moment_rows {
            w.write_record([
                row.ell.to_string(),
                row.r.to_string(),
                row.n.to_string(),
                row.c.to_string(),
                row.t.to_string(),
                row.k.to_string(),
                row.finite_sum.clone(),
                row.closed_value.clone(),
                if row.congruent { "yes".into() } else { "no".into() },
            ])
            .map_err(csv_err)?;
        }
    } else {
        w.write_record(["suite", "case", "expected", "actual", "pass"]).map_err(csv_err)?;
        for c in &rep.cases {
            w.write_record([c.suite.as_str(), &c.case, &c.expected, &c.actual, if c.pass { "yes" } else { "no" }])
                .map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Failure::Input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Verify { suite, ell, n, c, rmax, kmax, trunc, seed, out, format, timing } => {
            let suite: Suite = suite.parse()?;
            let grid = Grid { ell, n, c, rmax, kmax, trunc, seed };
            let start = Instant::now();
            let mut rep = verify::run(suite, &grid)?;
            if timing {
                rep.wall_time_ms = Some(start.elapsed().as_millis() as u64);
            }
            let text = match format {
                Format::Json => to_json(&rep) + "\n",
                Format::Csv => report_csv(&rep)?,
            };
            emit(out.as_ref(), &text)?;
            if rep.all_pass() {
                Ok(())
            } else {
                Err(Failure::Verification(format!("{} of {} cases failed", rep.summary.failed, rep.summary.total)))
            }
        }
        Command::Qexp { ell, r, n, c, x, y, trunc } => {
            let spec = ThetaSpec::new(ell, r, n, c, trunc)?;
            let m = spec.level();
            let series = theta_qexp(&spec, TorsionPoint::new(m, x, y)?)?;
            let val = series.valuation_units().ok_or(Error::ZeroToTruncation { trunc, denominator: m })?;
            let mut js = serde_json::to_value(&series).expect("serializable");
            js["valuation"] = serde_json::Value::String(format!("{val}/{m}"));
            println!("{}", to_json(&js));
            Ok(())
        }
        Command::ResidueTable { n, k, format } => {
            if n < 3 || k < 1 {
                return Err(Failure::Input(format!("need N ≥ 3 and k ≥ 1, got N = {n}, k = {k}")));
            }
            let rows: Vec<(u64, u64, String)> = WeightFunction::points(n)
                .map(|(a, b)| (a, b, format_rational(&residue_eis(k, n, (a, b)))))
                .collect();
            let text = match format {
                Format::Json => {
                    let v: Vec<_> =
                        rows.iter().map(|(a, b, r)| serde_json::json!({ "a": a, "b": b, "residue": r })).collect();
                    to_json(&v) + "\n"
                }
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["a", "b", "residue"]).map_err(csv_err)?;
                    for (a, b, r) in &rows {
                        w.write_record([a.to_string(), b.to_string(), r.clone()]).map_err(csv_err)?;
                    }
                    String::from_utf8(w.into_inner().map_err(|e| Failure::Input(e.to_string()))?).expect("utf-8")
                }
            };
            emit(None, &text)
        }
        Command::Dir { psi, c, route } => {
            let text = fs::read_to_string(&psi)?;
            let psi: WeightFunction =
                serde_json::from_str(&text).map_err(|e| Failure::Input(format!("psi: {e}")))?;
            let need_c = || c.ok_or_else(|| Failure::Input("--c is required for the me route".into()));
            match route {
                Route::Closed => println!("{}", to_json(&dir(&psi)?)),
                Route::Me => println!("{}", to_json(&dir_via_me(&psi, need_c()?)?)),
                Route::Both => {
                    let closed = dir(&psi)?;
                    let me = dir_via_me(&psi, need_c()?)?;
                    let equal = closed == me;
                    println!("{}", to_json(&serde_json::json!({ "closed": closed, "me": me, "equal": equal })));
                    if !equal {
                        return Err(Failure::Verification("routes disagree".into()));
                    }
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Residue(report) => println!("{report}"),
                Failure::Verification(m) | Failure::Input(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
