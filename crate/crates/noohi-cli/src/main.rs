mod commands;
mod report;
mod schema;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use noohi::vankampen::DEFAULT_BUDGET;
use noohi::Error;

use report::Report;

#[derive(Parser)]
#[command(name = "noohi", version, about = "Van Kampen presentations, G-set dictionary checks and explicit counterexamples")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// tower depth / test-set family depth
    #[arg(long, global = true, default_value_t = 3)]
    depth: u32,
    #[arg(long, global = true, default_value_t = noohi::gsets::DEFAULT_CATALOG_BOUND)]
    catalog_bound: usize,
    /// hom-count search budget (search-space size)
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// ℓ-adic precision
    #[arg(long, global = true, default_value_t = 12)]
    prec: u32,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Build the van Kampen presentation of a complex with group data
    Present {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        data: Option<PathBuf>,
        /// instantiate edge relations over every edge-group element
        #[arg(long)]
        all_elements: bool,
    },
    /// Count homomorphisms into finite test groups
    Homcount {
        #[arg(long)]
        presentation: Option<PathBuf>,
        #[arg(long)]
        complex: Option<PathBuf>,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long = "group")]
        groups: Vec<String>,
    },
    /// Compare two presentations by hom-counts
    Equiv {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long = "group")]
        groups: Vec<String>,
    },
    /// Check the group/G-set dictionary items for a map (and an optional second map)
    DictCheck {
        #[arg(long)]
        input: PathBuf,
    },
    /// Validate an action as a locally constant system, decompose it and apply Q
    Lcs {
        #[arg(long)]
        input: PathBuf,
    },
    /// Discretize a descent datum, or reduce an indexed datum to its ordered part
    Descent {
        #[arg(long)]
        datum: Option<PathBuf>,
        #[arg(long)]
        ordered: Option<PathBuf>,
    },
    /// Looplike verdicts for words, or the Galois action checks on the cyclotomic nodal setting
    Looplike {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        cyclotomic: Option<usize>,
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
    /// Reproduce an explicit example
    Counterexample {
        #[command(subcommand)]
        which: Example,
    },
}

#[derive(Subcommand)]
enum Example {
    /// Interval G-set and the Frobenius obstruction
    Picture {
        #[arg(long, default_value_t = 3)]
        ell: u64,
        #[arg(long, default_value_t = 19)]
        q: u64,
    },
    /// Borel coset obstruction
    Matrices {
        #[arg(long, default_value_t = 3)]
        ell: u64,
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        n: i64,
    },
    /// Nodal curve presentation against Gal × ℤ
    Nodal {
        #[arg(long, default_value = "Z/2")]
        gal: String,
        #[arg(long = "group")]
        groups: Vec<String>,
    },
    /// Wedge of curves ℤ/m ⋊ (ℤ/m)^× glued with loops
    Wedge {
        #[arg(long, default_value_t = 3)]
        modulus: usize,
        #[arg(long, default_value_t = 1)]
        vertices: usize,
        #[arg(long, default_value_t = 0)]
        loops: usize,
        #[arg(long = "group")]
        groups: Vec<String>,
    },
}

fn run(cli: &Cli) -> noohi::Result<(String, commands::Outcome)> {
    let g = &cli.global;
    if g.budget == 0 || g.catalog_bound == 0 || g.depth == 0 {
        return Err(Error::Input("budgets and depth must be positive".into()));
    }
    Ok(match &cli.command {
        Command::Present { complex, data, all_elements } => {
            ("present".into(), commands::present(complex, data.as_deref(), *all_elements)?)
        }
        Command::Homcount { presentation, complex, data, groups } => (
            "homcount".into(),
            commands::homcount(presentation.as_deref(), complex.as_deref(), data.as_deref(), groups, g.budget)?,
        ),
        Command::Equiv { left, right, groups } => ("equiv".into(), commands::equiv(left, right, groups, g.budget)?),
        Command::DictCheck { input } => ("dict-check".into(), commands::dict_check(input, g.catalog_bound)?),
        Command::Lcs { input } => ("lcs".into(), commands::lcs(input)?),
        Command::Descent { datum, ordered } => ("descent".into(), commands::descent(datum.as_deref(), ordered.as_deref())?),
        Command::Looplike { input, cyclotomic, samples } => match (input, cyclotomic) {
            (Some(path), _) => ("looplike".into(), commands::looplike_words(path)?),
            (None, Some(m)) => ("looplike".into(), commands::looplike_cyclotomic(*m, *samples, g.seed)?),
            (None, None) => return Err(Error::Input("looplike needs --input or --cyclotomic".into())),
        },
        Command::Counterexample { which } => match which {
            Example::Picture { ell, q } => ("counterexample picture".into(), commands::picture(*ell, *q, g.depth)?),
            Example::Matrices { ell, p, n } => {
                ("counterexample matrices".into(), commands::matrices(*ell, *p, *n, g.prec)?)
            }
            Example::Nodal { gal, groups } => ("counterexample nodal".into(), commands::nodal(gal, groups, g.budget)?),
            Example::Wedge { modulus, vertices, loops, groups } => (
                "counterexample wedge".into(),
                commands::wedge(*modulus, *vertices, *loops, groups, g.budget)?,
            ),
        },
    })
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Budget(_) | Error::Precision(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((command, out)) => {
            let report = Report {
                command,
                seed: cli.global.seed,
                inputs: out.inputs,
                status: out.status,
                summary: out.summary,
                details: out.details,
            };
            match cli.global.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
                Format::Text => print!("{}", report.render_text()),
            }
            ExitCode::from(report.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
