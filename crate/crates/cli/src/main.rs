use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use skeincert_core::castle::{build_castle, build_special_tree, find_appropriate_pair, find_traps};
use skeincert_core::certify::{certificate_report, Outcome};
use skeincert_core::jones::jones_oracle;
use skeincert_core::seifert::{classify, is_locally_twisted, seifert_graph};
use skeincert_core::skein::{build_tree, evaluate_tree, homfly, Chooser, ResolutionTree, Strategy};
use skeincert_core::{BraidWord, Diagram, Error, Placement, Template};

const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 4;

/// Skein polynomials and minimality certificates for link diagrams.
#[derive(Parser, Debug)]
#[command(name = "skeincert", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the skein polynomial.
    Homfly(HomflyArgs),
    /// Print degree bounds and the optimality/minimality certificate.
    Certify(CertifyArgs),
    /// Emit DOT for the Seifert graph, a castle or a resolution tree.
    Export(ExportArgs),
    /// Report diagram properties.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
struct Input {
    /// Braid word, e.g. "1 -2 1"; the diagram is its closure.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["template", "placement"], required_unless_present = "template")]
    braid: Option<String>,
    /// Strand count for --braid; defaults to the largest index plus one.
    #[arg(long, requires = "braid")]
    strands: Option<usize>,
    /// Template JSON file.
    #[arg(long, requires = "placement")]
    template: Option<PathBuf>,
    /// Placement JSON file mapping arc ids to braid words.
    #[arg(long, requires = "template")]
    placement: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Descending,
    X,
    Y,
    SpecialX,
    SpecialY,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Oracle {
    Jones,
}

#[derive(Args, Debug)]
struct HomflyArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value = "descending")]
    strategy: StrategyArg,
    /// Randomizes base point choices of the coherent strategies.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Cross-check against an independent invariant.
    #[arg(long, value_enum)]
    oracle: Option<Oracle>,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ExportKind {
    SeifertGraph,
    Castle,
    Tree,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[arg(value_enum)]
    what: ExportKind,
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value = "descending")]
    strategy: StrategyArg,
    #[arg(long)]
    seed: Option<u64>,
    /// Castle root circle; defaults to an appropriate pair.
    #[arg(long, requires = "base")]
    circle: Option<usize>,
    /// Castle base point as a global segment id.
    #[arg(long, requires = "circle")]
    base: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    LocallyTwisted,
    Homogeneous,
    Knitted,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    input: Input,
    /// Properties to report; all of them when omitted.
    #[arg(long, value_enum)]
    check: Vec<CheckKind>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = if e.is_input_error() { EXIT_INPUT } else { EXIT_INTERNAL };
        Failure { code, message: e.to_string() }
    }
}

fn input_failure(message: String) -> Failure {
    Failure { code: EXIT_INPUT, message }
}

fn load(input: &Input) -> Result<(String, Diagram), Failure> {
    if let Some(b) = &input.braid {
        let w = BraidWord::parse_with_strands(b, input.strands)?;
        return Ok((b.clone(), Diagram::from_braid(&w)));
    }
    let (Some(tp), Some(pp)) = (&input.template, &input.placement) else {
        return Err(input_failure("give --braid or --template with --placement".into()));
    };
    let read = |p: &PathBuf| fs::read_to_string(p).map_err(|e| input_failure(format!("{}: {e}", p.display())));
    let t = Template::from_json(&read(tp)?)?;
    let pi = Placement::from_json(&read(pp)?)?;
    let label = format!("{} + {}", tp.display(), pp.display());
    Ok((label, Diagram::new(t, &pi)?))
}

fn chooser(seed: Option<u64>) -> Chooser {
    seed.map_or(Chooser::First, Chooser::Seeded)
}

fn tree_for(d: &Diagram, strategy: StrategyArg, seed: Option<u64>) -> Result<ResolutionTree, Failure> {
    Ok(match strategy {
        StrategyArg::Descending => build_tree(d, Strategy::Descending, chooser(seed)),
        StrategyArg::X => build_tree(d, Strategy::XCoherent, chooser(seed)),
        StrategyArg::Y => build_tree(d, Strategy::YCoherent, chooser(seed)),
        StrategyArg::SpecialX => build_special_tree(d, Strategy::XCoherent)?,
        StrategyArg::SpecialY => build_special_tree(d, Strategy::YCoherent)?,
    })
}

fn cmd_homfly(a: &HomflyArgs) -> Result<u8, Failure> {
    let (label, d) = load(&a.input)?;
    let p = if a.strategy == StrategyArg::Descending && a.seed.is_none() {
        homfly(&d)
    } else {
        evaluate_tree(&tree_for(&d, a.strategy, a.seed)?)
    };
    let jones = match a.oracle {
        Some(Oracle::Jones) => {
            let v = jones_oracle(&d)?;
            if p.jones_substitution() != v {
                return Err(Failure { code: EXIT_INTERNAL, message: format!("Jones oracle disagrees: {v}") });
            }
            Some(v)
        }
        None => None,
    };
    match a.format {
        Format::Text | Format::Dot => {
            println!("{p}");
            if let Some(v) = &jones {
                println!("jones {v} (agrees)");
            }
        }
        Format::Json => {
            let out = json!({
                "input": label,
                "polynomial": p,
                "text": p.to_string(),
                "jones": jones.as_ref().map(|v| v.to_string()),
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("json"));
        }
    }
    Ok(0)
}

fn cmd_certify(a: &CertifyArgs) -> Result<u8, Failure> {
    let (label, d) = load(&a.input)?;
    let r = certificate_report(&label, &d)?;
    match a.format {
        Format::Json | Format::Dot => println!("{}", serde_json::to_string_pretty(&r).expect("json")),
        Format::Text => {
            println!("polynomial {}", r.polynomial_text);
            println!("e={} E={} m={} M={} s={} writhe={} crossings={}", r.e, r.upper_e, r.m, r.upper_m, r.report.s, r.report.writhe, r.report.crossing_count);
            let yes = |b: bool| if b { "yes" } else { "no" };
            println!("optimal {} ({})", yes(r.certificate.optimal.holds), r.certificate.optimal.reason);
            println!("minimal {} ({})", yes(r.certificate.minimal.holds), r.certificate.minimal.reason);
            if let Some(b) = r.certificate.braid_index {
                println!("braid index {b}");
            }
            if let Some(c) = r.certificate.crossing_number {
                println!("crossing number {c}");
            }
        }
    }
    Ok(match r.certificate.outcome {
        Outcome::Certified => 0,
        Outcome::Inconclusive => EXIT_INCONCLUSIVE,
    })
}

fn cmd_export(a: &ExportArgs) -> Result<u8, Failure> {
    let (_, d) = load(&a.input)?;
    let dot = match a.what {
        ExportKind::SeifertGraph => seifert_graph(&d).to_dot(),
        ExportKind::Castle => {
            let (c, x) = match (a.circle, a.base) {
                (Some(c), Some(x)) => (c, x),
                _ => {
                    let pair = find_appropriate_pair(&d)?;
                    (pair.circle, pair.base_point)
                }
            };
            let castle = build_castle(&d, c, x)?;
            castle.to_dot(&find_traps(&d, &castle)?)
        }
        ExportKind::Tree => tree_for(&d, a.strategy, a.seed)?.to_dot(),
    };
    print!("{dot}");
    Ok(0)
}

fn cmd_check(a: &CheckArgs) -> Result<u8, Failure> {
    let (_, d) = load(&a.input)?;
    let kinds = if a.check.is_empty() {
        vec![CheckKind::LocallyTwisted, CheckKind::Homogeneous, CheckKind::Knitted]
    } else {
        a.check.clone()
    };
    let results: Vec<(&str, bool)> = kinds
        .iter()
        .map(|k| match k {
            CheckKind::LocallyTwisted => ("locally-twisted", is_locally_twisted(&d)),
            CheckKind::Homogeneous => ("homogeneous", classify(&d).homogeneous),
            CheckKind::Knitted => ("knitted", d.template().is_knitted()),
        })
        .collect();
    match a.format {
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> =
                results.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
            println!("{}", serde_json::to_string_pretty(&map).expect("json"));
        }
        Format::Text | Format::Dot => {
            for (k, v) in results {
                println!("{k}: {v}");
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Homfly(a) => cmd_homfly(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Export(a) => cmd_export(a),
        Command::Check(a) => cmd_check(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
