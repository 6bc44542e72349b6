//! Command-line surface over the coeffbody library.
//!
//! Exit codes: 0 = success, 1 = identity failure, 2 = invalid input,
//! 3 = numerical failure. `verify` reports are JSON with items sorted by
//! key; identical configuration and seed produce byte-identical output.

mod parse;
mod verify;

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coeffbody::forms::{eta_forms, exterior_derivative, wedge};
use coeffbody::geodesics::{closed_form_geodesic3, integrate_geodesic, GeodesicState};
use coeffbody::kirillov::bracket_table;
use coeffbody::loewner::{
    caratheodory_check, default_grid, integrate_trajectory, ConstantDriving, DrivingFunction,
    TableDriving,
};
use coeffbody::series::render_exact;
use coeffbody::virasoro::neretin_polynomials;

const EXIT_IDENTITY: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "coeffbody", version, about = "Coefficient-body dynamics, geodesics, and identity suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a Loewner-Kufarev coefficient trajectory.
    Loewner(LoewnerArgs),
    /// Integrate a sub-Riemannian geodesic.
    Geodesic(GeodesicArgs),
    /// Run an identity/verification suite and emit a JSON report.
    Verify(VerifyArgs),
    /// Emit the Kirillov commutator table as JSON.
    BracketTable(BracketTableArgs),
    /// Print the contact identity data for M_3 with an exact pass/fail.
    ContactCheck,
    /// Print Neretin polynomials in canonical monomial order as JSON.
    Neretin(NeretinArgs),
}

#[derive(Args)]
struct LoewnerArgs {
    /// Driving preset: `identity`, `starlike`, or `constant:<p1,p2,...>`
    /// (complex entries like `0.5-0.25i` allowed).
    #[arg(long, conflicts_with = "driving_file")]
    preset: Option<String>,
    /// JSON file `{"times": [...], "p": [[[re,im],...],...]}` with a
    /// piecewise-constant driving table.
    #[arg(long)]
    driving_file: Option<String>,
    /// Truncation level n.
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 3.0)]
    t_end: f64,
    #[arg(long, default_value_t = 3000)]
    steps: usize,
    /// Output format: `csv` or `json`.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output path; stdout when omitted.
    #[arg(long, short)]
    output: Option<String>,
}

#[derive(Args)]
struct GeodesicArgs {
    /// Initial covector `xi(0)`, comma-separated complex entries, e.g.
    /// `0.2+0.1i,-0.3,0.5i`. Its length sets n.
    #[arg(long)]
    xi: String,
    #[arg(long, default_value_t = 5.0)]
    t_end: f64,
    #[arg(long, default_value_t = 5000)]
    steps: usize,
    /// For n = 3: also evaluate the closed-form geodesic and report the
    /// pointwise gap (fails with exit 1 above 1e-6).
    #[arg(long, default_value_t = false)]
    compare_closed_form: bool,
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long, short)]
    output: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite: integrals | brackets | forms | neretin | cocycle | geodesic |
    /// contact (alias for the contact items of `forms`).
    suite: String,
    /// Size cap (table dimension n, or Neretin max index).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    max: Option<usize>,
    /// Number of randomized runs where applicable.
    #[arg(long)]
    runs: Option<usize>,
    /// RNG seed for randomized items.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    output: Option<String>,
}

#[derive(Args)]
struct BracketTableArgs {
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, short)]
    output: Option<String>,
}

#[derive(Args)]
struct NeretinArgs {
    #[arg(long, default_value_t = 6)]
    max: usize,
    #[arg(long, short)]
    output: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Loewner(args) => cmd_loewner(args),
        Command::Geodesic(args) => cmd_geodesic(args),
        Command::Verify(args) => cmd_verify(args),
        Command::BracketTable(args) => cmd_bracket_table(args),
        Command::ContactCheck => cmd_contact_check(),
        Command::Neretin(args) => cmd_neretin(args),
    }
}

fn write_output(path: &Option<String>, content: &str) -> Result<(), ExitCode> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| {
            eprintln!("error: cannot write {p}: {e}");
            ExitCode::from(EXIT_INVALID)
        }),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn build_driving(args: &LoewnerArgs) -> Result<Box<dyn DrivingFunction>, String> {
    if let Some(file) = &args.driving_file {
        let text = fs::read_to_string(file).map_err(|e| format!("cannot read {file}: {e}"))?;
        let table = TableDriving::from_json(&text).map_err(|e| e.to_string())?;
        return Ok(Box::new(table));
    }
    let preset = args.preset.as_deref().unwrap_or("identity");
    if preset == "identity" {
        return Ok(Box::new(ConstantDriving::identity(args.n)));
    }
    if preset == "starlike" {
        return Ok(Box::new(ConstantDriving::starlike(args.n)));
    }
    if let Some(list) = preset.strip_prefix("constant:") {
        let mut p = parse::complex_list(list)?;
        if p.len() > args.n {
            return Err(format!(
                "driving has {} coefficients but n = {}",
                p.len(),
                args.n
            ));
        }
        p.resize(args.n, num::complex::Complex::new(0.0, 0.0));
        return Ok(Box::new(ConstantDriving::new(p)));
    }
    Err(format!("unknown preset `{preset}`"))
}

fn cmd_loewner(args: LoewnerArgs) -> ExitCode {
    let driving = match build_driving(&args) {
        Ok(d) => d,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    // Validate the driving on the default polar grid before integrating.
    let (radii, angles) = default_grid();
    let probe_times = [0.0, args.t_end * 0.5, args.t_end];
    for t in probe_times {
        let report = caratheodory_check(&driving.coefficients(t), &radii, &angles);
        if !report.positive {
            eprintln!(
                "error: driving fails the positivity grid check at t = {t}: min Re p = {} at (r, theta) = ({}, {})",
                report.min_real, report.argmin.0, report.argmin.1
            );
            return ExitCode::from(EXIT_INVALID);
        }
    }
    let path = match integrate_trajectory(driving.as_ref(), args.t_end, args.steps, None, None) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_NUMERICAL);
        }
    };
    if path.debranges_excess() >= 1e-6 {
        eprintln!(
            "error: trajectory violates the coefficient bound (excess {})",
            path.debranges_excess()
        );
        return ExitCode::from(EXIT_NUMERICAL);
    }
    let content = match args.format.as_str() {
        "csv" => path.to_csv(),
        "json" => format!("{}", path.to_json()),
        other => {
            eprintln!("error: unknown format `{other}`");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    match write_output(&args.output, &content) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}

fn cmd_geodesic(args: GeodesicArgs) -> ExitCode {
    let xi = match parse::complex_list(&args.xi) {
        Ok(v) if !v.is_empty() => v,
        Ok(_) => {
            eprintln!("error: xi must have at least one component");
            return ExitCode::from(EXIT_INVALID);
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let n = xi.len();
    let initial = GeodesicState::from_xi(xi.clone());
    let path = match integrate_geodesic(&initial, args.t_end, args.steps) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_NUMERICAL);
        }
    };
    let drift = path.energy_drift();
    if drift > 1e-8 {
        eprintln!("error: energy drift {drift} exceeds 1e-8");
        return ExitCode::from(EXIT_NUMERICAL);
    }
    let mut gap_report = None;
    if args.compare_closed_form {
        if n != 3 {
            eprintln!("error: --compare-closed-form requires n = 3");
            return ExitCode::from(EXIT_INVALID);
        }
        let closed = match closed_form_geodesic3(xi[2], xi[0], xi[1]) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_INVALID);
            }
        };
        let samples = closed.sample(args.t_end, args.steps);
        let mut gap = 0.0f64;
        for (state, (_, want)) in path.states.iter().zip(&samples) {
            for m in 0..3 {
                gap = gap.max((state.c[m] - want[m]).norm());
            }
        }
        gap_report = Some(gap);
    }
    let content = match args.format.as_str() {
        "csv" => path.to_csv(),
        "json" => format!("{}", path.to_json()),
        other => {
            eprintln!("error: unknown format `{other}`");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    if let Err(code) = write_output(&args.output, &content) {
        return code;
    }
    eprintln!("energy drift: {drift}");
    if let Some(gap) = gap_report {
        eprintln!("closed-form gap: {gap}");
        if gap > 1e-6 {
            return ExitCode::from(EXIT_IDENTITY);
        }
    }
    ExitCode::SUCCESS
}

fn cmd_verify(args: VerifyArgs) -> ExitCode {
    let config = verify::SuiteConfig {
        n: args.n,
        max: args.max,
        runs: args.runs,
        seed: args.seed,
    };
    let report = match verify::run_suite(&args.suite, &config) {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let pass = report.pass;
    let text = serde_json::to_string_pretty(&report.to_json()).expect("report serializes");
    if write_output(&args.output, &text).is_err() {
        return ExitCode::from(EXIT_INVALID);
    }
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_IDENTITY)
    }
}

fn cmd_bracket_table(args: BracketTableArgs) -> ExitCode {
    let entries = match bracket_table(args.n) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let all_match = entries.iter().all(|e| e.exact_match);
    let json = serde_json::json!({
        "n": args.n,
        "all_match": all_match,
        "entries": entries.iter().map(|e| serde_json::json!({
            "j": e.j,
            "k": e.k,
            "result": e.result,
            "exact_match": e.exact_match,
        })).collect::<Vec<_>>(),
    });
    let text = serde_json::to_string_pretty(&json).expect("serializes");
    if write_output(&args.output, &text).is_err() {
        return ExitCode::from(EXIT_INVALID);
    }
    if all_match {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_IDENTITY)
    }
}

fn cmd_contact_check() -> ExitCode {
    let etas = eta_forms(3).expect("n = 3 is valid");
    let eta3 = &etas[0];
    let d_eta3 = exterior_derivative(eta3).expect("degree 1");
    let contact = wedge(eta3, &d_eta3).expect("degree 3");
    let mut want = coeffbody::forms::PolyForm::zero(3, 3);
    want.insert(&[1, 2, 3], coeffbody::series::MultiPoly::constant_int(1));
    let pass = contact == want;
    println!("eta_3      = {}", eta3.render());
    println!("d eta_3    = {}", d_eta3.render());
    println!("eta_3 ^ d eta_3 = {}", contact.render());
    println!(
        "contact identity (= dc1^dc2^dc3): {}",
        if pass { "PASS (exact)" } else { "FAIL" }
    );
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_IDENTITY)
    }
}

fn cmd_neretin(args: NeretinArgs) -> ExitCode {
    let table = match neretin_polynomials(args.max) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let charge_var = table.charge_var();
    let polys = (2..=args.max)
        .map(|j| {
            let terms = table
                .poly(j)
                .terms()
                .map(|(monomial, coeff)| {
                    let mut vars = serde_json::Map::new();
                    for (i, e) in monomial.exponents().iter().enumerate() {
                        if *e == 0 {
                            continue;
                        }
                        let name = if i == charge_var {
                            "charge".to_string()
                        } else {
                            format!("c{}", i + 1)
                        };
                        vars.insert(name, serde_json::json!(e));
                    }
                    serde_json::json!({
                        "coeff": render_exact(coeff),
                        "monomial": vars,
                    })
                })
                .collect::<Vec<_>>();
            serde_json::json!({ "n": j, "terms": terms })
        })
        .collect::<Vec<_>>();
    let json = serde_json::json!({ "max": args.max, "polynomials": polys });
    let text = serde_json::to_string_pretty(&json).expect("serializes");
    match write_output(&args.output, &text) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
