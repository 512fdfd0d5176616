use std::path::PathBuf;
use std::process::ExitCode;

use ainf::ainf_core::UnitMode;
use ainf::cli::{self, CheckOpts, CliError, Definition, Report, TorusDef, TorusOpts};
use ainf::fukaya_torus::TorusLine;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "ainf", version, about = "Check and compute with finite A-infinity categories")]
struct Args {
    /// Human-readable tables instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Units {
    Strict,
    Cohomological,
}

#[derive(Subcommand)]
enum Cmd {
    /// A-infinity relations, units and modules of a definition file.
    Check {
        file: PathBuf,
        #[arg(long)]
        max_d: Option<usize>,
        /// Random single-constant mutations to run through the checker.
        #[arg(long, default_value_t = 0)]
        mutations: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "strict")]
        units: Units,
    },
    /// Cohomology of every hom complex.
    Cohomology { file: PathBuf },
    /// Homological perturbation transfer along the file's contraction.
    Transfer {
        file: PathBuf,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Twisted cone of a degree-0 cocycle.
    Cone {
        file: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// `name`, `c*name + ...` or a JSON linear combination.
        #[arg(long)]
        cocycle: String,
    },
    /// Hochschild cohomology in a degree window.
    Hochschild {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        #[arg(long)]
        length_cap: usize,
    },
    /// Fukaya category of straight lines on the torus.
    Torus {
        /// Line specs `p/q@offset#grading`.
        #[arg(long, num_args = 1..)]
        lines: Vec<String>,
        /// Definition file whose torus section supplies the scene.
        #[arg(long, conflicts_with = "lines")]
        file: Option<PathBuf>,
        #[arg(long, default_value = "10")]
        area_cap: String,
        #[arg(long, default_value_t = 3)]
        max_d: usize,
        #[arg(long, num_args = 3, value_names = ["L1", "L2", "GAMMA"], allow_hyphen_values = true)]
        surgery: Option<Vec<String>>,
        /// Write the exported category as a definition file.
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

fn load(path: &PathBuf) -> Result<Definition, CliError> {
    let src = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    cli::parse_definition(&src).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn run(args: &Args) -> Result<Report, CliError> {
    match &args.cmd {
        Cmd::Check { file, max_d, mutations, seed, units } => {
            let def = load(file)?;
            let units = match units {
                Units::Strict => UnitMode::Strict,
                Units::Cohomological => UnitMode::Cohomological,
            };
            cli::cmd_check(&def, &CheckOpts { max_d: *max_d, mutations: *mutations, seed: cli::resolve_seed(*seed)?, units })
        }
        Cmd::Cohomology { file } => cli::cmd_cohomology(&load(file)?),
        Cmd::Transfer { file, cap } => cli::cmd_transfer(&load(file)?, *cap),
        Cmd::Cone { file, from, to, cocycle } => cli::cmd_cone(&load(file)?, from, to, cocycle),
        Cmd::Hochschild { file, window, length_cap } => cli::cmd_hochschild(&load(file)?, cli::parse_window(window)?, *length_cap),
        Cmd::Torus { lines, file, area_cap, max_d, surgery, export } => {
            let scene = match file {
                Some(f) => load(f)?.torus.ok_or_else(|| CliError::Input(format!("{}: no torus section", f.display())))?,
                None => {
                    if lines.is_empty() {
                        return Err(CliError::Input("give --lines or --file".into()));
                    }
                    let lines = lines.iter().map(|s| TorusLine::parse(s)).collect::<Result<Vec<_>, _>>()?;
                    TorusDef { lines, area_cap: cli::parse_cap(area_cap)?, max_d: *max_d }
                }
            };
            let surgery = surgery.as_ref().map(|s| [s[0].clone(), s[1].clone(), s[2].clone()]);
            let (report, def) = cli::cmd_torus(&TorusOpts { scene, surgery })?;
            if let Some(path) = export {
                let text = serde_json::to_string_pretty(&def.to_json()).expect("json");
                std::fs::write(path, text + "\n").map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            }
            Ok(report)
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(report) => {
            if args.pretty {
                print!("{}", report.to_pretty());
            } else {
                println!("{}", report.to_json_string());
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
