use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mumhodge_cli::commands::{self, NormalFormInput};
use mumhodge_cli::{CliError, OperatorDocument, Outcome, RecordsDocument, RunOptions};

#[derive(Parser)]
#[command(name = "mumhodge", version, about = "Limit Hodge data at MUM points of fourth-order Picard-Fuchs operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print the full JSON report instead of the summary.
    #[arg(long, global = true)]
    json: bool,
    /// Write the full JSON report to this file.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct Flags {
    /// Truncation order of the Frobenius series.
    #[arg(long, default_value_t = 50)]
    order: usize,
    /// Starting working precision in bits.
    #[arg(long, default_value_t = 128)]
    precision_bits: u32,
    /// Cap for adaptive precision doubling.
    #[arg(long, env = "MUMHODGE_MAX_PRECISION", default_value_t = 2048)]
    max_precision_bits: u32,
    /// Largest denominator accepted by rational recognition.
    #[arg(long, default_value_t = 1_000_000)]
    denominator_bound: u64,
    /// Base point for loops, as "re,im" (exact decimals or fractions).
    #[arg(long)]
    base_point: Option<String>,
    /// Series coefficients shown in reports.
    #[arg(long, default_value_t = 8)]
    terms: usize,
}

impl Flags {
    fn options(&self) -> RunOptions {
        RunOptions {
            order: self.order,
            precision_bits: self.precision_bits,
            max_precision_bits: self.max_precision_bits,
            denominator_bound: self.denominator_bound,
            base_point: self.base_point.clone(),
            terms: self.terms,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Singular points, Frobenius data, limit data at MUM points and the Torelli test.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Leading coefficients of the Frobenius basis at z = 0.
    Frobenius {
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Canonical coordinate q(z) and its inverse.
    MirrorMap {
        file: PathBuf,
        /// Normal-form entry a in q = z exp(psi2 / (a psi3)).
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        a: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Numeric monodromy around every singular point in the Frobenius frame at z = 0.
    Monodromy {
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Normal form and invariants of a MUM monodromy.
    NormalForm {
        /// Integral unipotent matrix, rows separated by ';' and entries by ','.
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["quadruple", "mirror"])]
        matrix: Option<String>,
        /// "a,b,e,f".
        #[arg(long, allow_hyphen_values = true, conflicts_with = "mirror")]
        quadruple: Option<String>,
        /// Flip the signs of the first and last basis vectors before acting.
        #[arg(long, requires = "quadruple")]
        sign_flip: bool,
        /// Weight-stabilizer element "p,q,r,s" acting on the quadruple.
        #[arg(long, allow_hyphen_values = true, requires = "quadruple")]
        stabilizer: Option<String>,
        /// Mirror invariants "deg,c2h,chi".
        #[arg(long, allow_hyphen_values = true)]
        mirror: Option<String>,
    },
    /// Generic Torelli test between MUM points of an operator or hand-entered records.
    Torelli {
        /// Operator document.
        #[arg(required_unless_present = "records")]
        file: Option<PathBuf>,
        /// Record document with per-MUM limit data.
        #[arg(long, conflicts_with = "file")]
        records: Option<PathBuf>,
        #[command(flatten)]
        flags: Flags,
    },
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Analyze { file, flags } => commands::analyze(&OperatorDocument::read(file)?, &flags.options()),
        Command::Frobenius { file, flags } => commands::frobenius(&OperatorDocument::read(file)?, &flags.options()),
        Command::MirrorMap { file, a, flags } => commands::mirror_map_cmd(&OperatorDocument::read(file)?, &flags.options(), a),
        Command::Monodromy { file, flags } => commands::monodromy(&OperatorDocument::read(file)?, &flags.options()),
        Command::NormalForm { matrix, quadruple, sign_flip, stabilizer, mirror } => {
            let input = match (matrix, quadruple, mirror) {
                (Some(m), _, _) => NormalFormInput::Matrix(m.clone()),
                (_, Some(q), _) => NormalFormInput::Quadruple { nf: q.clone(), sign_flip: *sign_flip, stabilizer: stabilizer.clone() },
                (_, _, Some(m)) => NormalFormInput::Mirror(m.clone()),
                _ => return Err(CliError::Input("one of --matrix, --quadruple, --mirror is required".into())),
            };
            commands::normal_form_cmd(&input)
        }
        Command::Torelli { file, records, flags } => match (file, records) {
            (Some(f), _) => commands::torelli_operator(&OperatorDocument::read(f)?, &flags.options()),
            (_, Some(r)) => commands::torelli_records(&RecordsDocument::read(r)?, &flags.options()),
            _ => Err(CliError::Input("an operator file or --records is required".into())),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let text = serde_json::to_string_pretty(&outcome.report).expect("reports serialize") + "\n";
    if let Some(path) = &cli.output {
        if let Err(source) = std::fs::write(path, &text) {
            let e = CliError::Io { path: path.display().to_string(), source };
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    }
    if cli.json {
        print!("{text}");
    } else {
        println!("{}", outcome.summary);
    }
    match outcome.failure {
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
        None => ExitCode::SUCCESS,
    }
}
