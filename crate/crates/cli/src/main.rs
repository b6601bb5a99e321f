//! `qpfb`: parse presentation files and run the verification suites.
//!
//! Exit status: 0 when every non-vacuous check passes, 1 when a check fails,
//! 2 on usage, I/O or parse errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use num_traits::Zero;
use qpfb_core::format::{Document, Specialization};
use qpfb_core::report::{Report, Status};
use qpfb_core::suite::{run_suite, Suite, SuiteConfig, MAX_DEGREE};
use qpfb_core::corpus;
use serde_json::json;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Version of the JSON report layout (docs/report.schema.json).
const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "qpfb", version, about = "Exact checks for quantum principal bundles and their gauge transformations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites.
    Check(CheckArgs),
    /// Parse the inputs and print them in canonical form.
    Print(InputArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Presentation file; repeat to load several in order. Defaults to the
    /// shipped corpus.
    #[arg(long, value_name = "PATH")]
    file: Vec<PathBuf>,

    /// Specialize a parameter, e.g. `q=1` or `nu=-1/2`.
    #[arg(long = "set", value_name = "NAME=VALUE", value_parser = parse_set)]
    set: Vec<(String, BigRational)>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Suite to run.
    #[arg(long, default_value = "all", value_parser = |s: &str| s.parse::<Suite>())]
    suite: Suite,

    /// Degree bound for enumerated monomials.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=MAX_DEGREE as i64))]
    degree: u8,

    /// Print the report as JSON.
    #[arg(long)]
    json: bool,

    /// Report every timing as zero.
    #[arg(long)]
    no_timing: bool,
}

fn parse_set(s: &str) -> Result<(String, BigRational), String> {
    let (name, value) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let name = name.trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(format!("bad parameter name `{name}`"));
    }
    let value: BigRational = value.trim().parse().map_err(|_| format!("bad rational `{}`", value.trim()))?;
    if value.is_zero() {
        return Err(format!("parameter `{name}` must be invertible, got 0"));
    }
    Ok((name.to_string(), value))
}

impl InputArgs {
    fn specialization(&self) -> Result<Specialization, String> {
        let mut set = Specialization::new();
        for (k, v) in &self.set {
            if set.insert(k.clone(), v.clone()).is_some() {
                return Err(format!("parameter `{k}` set twice"));
            }
        }
        Ok(set)
    }

    fn load(&self, set: &Specialization) -> Result<Document, String> {
        if self.file.is_empty() {
            return corpus::load(set).map_err(|e| e.to_string());
        }
        let mut doc = Document::new();
        for path in &self.file {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            doc.add_file(Some(&path.display().to_string()), &text, set).map_err(|e| e.to_string())?;
        }
        Ok(doc)
    }

    fn file_names(&self) -> Vec<String> {
        if self.file.is_empty() {
            corpus::FILES.iter().map(|(n, _)| format!("<corpus>/{n}")).collect()
        } else {
            self.file.iter().map(|p| p.display().to_string()).collect()
        }
    }
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Vacuous => "vacuous",
    }
}

fn counts(report: &Report) -> (usize, usize, usize) {
    let n = |s| report.records.iter().filter(|r| r.status == s).count();
    (n(Status::Pass), n(Status::Fail), n(Status::Vacuous))
}

fn json_report(args: &CheckArgs, set: &Specialization, report: &Report) -> serde_json::Value {
    let (pass, fail, vacuous) = counts(report);
    let set: serde_json::Map<_, _> = set.iter().map(|(k, v)| (k.clone(), json!(v.to_string()))).collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "suite": args.suite.to_string(),
        "degree": args.degree,
        "set": set,
        "files": args.input.file_names(),
        "passed": report.passed(),
        "summary": { "pass": pass, "fail": fail, "vacuous": vacuous },
        "notes": report.notes,
        "records": report.records,
    })
}

fn text_report(report: &Report) -> String {
    let mut out = String::new();
    for r in &report.records {
        let tag = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Vacuous => "VAC ",
        };
        out.push_str(&format!("{tag} {} [{}] {} ({} us)\n", r.name, r.anchor, r.detail, r.elapsed_us));
        if let Some(w) = &r.witness {
            if r.status == Status::Fail || !w.subject.is_empty() {
                out.push_str(&format!("     at {}\n     lhs: {}\n     rhs: {}\n", w.subject, w.lhs, w.rhs));
            }
        }
    }
    for n in &report.notes {
        out.push_str(&format!("note: {n}\n"));
    }
    let (pass, fail, vacuous) = counts(report);
    out.push_str(&format!("{pass} passed, {fail} failed, {vacuous} vacuous: {}\n", status_str(if fail == 0 { Status::Pass } else { Status::Fail })));
    out
}

fn check(args: CheckArgs) -> Result<bool, String> {
    let set = args.input.specialization()?;
    let doc = args.input.load(&set)?;
    let cfg = SuiteConfig { suite: args.suite, degree: args.degree as usize, set: set.clone() };
    let mut report = run_suite(&doc, &cfg).map_err(|e| e.to_string())?;
    if args.no_timing {
        report.zero_timings();
    }
    if args.json {
        let v = json_report(&args, &set, &report);
        println!("{}", serde_json::to_string_pretty(&v).expect("report serializes"));
    } else {
        print!("{}", text_report(&report));
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(args) => check(args),
        Command::Print(input) => input.specialization().and_then(|set| input.load(&set)).map(|doc| {
            print!("{}", doc.print());
            true
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_values() {
        let (k, v) = parse_set("nu=-1/2").unwrap();
        assert_eq!((k.as_str(), v.to_string().as_str()), ("nu", "-1/2"));
        assert!(parse_set("q").is_err());
        assert!(parse_set("q=0").unwrap_err().contains("invertible"));
        assert!(parse_set("q=x").is_err());
        assert!(parse_set("=1").is_err());
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
