use std::path::{Path, PathBuf};
use std::process::ExitCode;

use algdyn::analytic::SampledTorusMap;
use algdyn::parse::parse_poly;
use algdyn::report::{self, AnalysisOptions, AnalysisReportDoc, SystemSpec};
use algdyn::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_FAILURE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_INAPPLICABLE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "algdyn",
    version,
    about = "Rigidity, mixing and entropy of algebraic Z^d-actions"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Seed for the sampling checks.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct Budget {
    /// Largest |n|_inf searched for a mixing witness.
    #[arg(long)]
    mixing_bound: Option<u32>,
    /// Per-axis quadrature grid for Mahler measures.
    #[arg(long)]
    mahler_grid: Option<usize>,
    /// Order of the roots-of-unity oracle.
    #[arg(long)]
    roots_order: Option<usize>,
    /// Critical-pair budget for each Groebner basis.
    #[arg(long)]
    gb_max_pairs: Option<usize>,
}

impl Budget {
    fn options(&self, spec: &SystemSpec) -> AnalysisOptions {
        let mut o = AnalysisOptions::default().merged(&spec.options);
        if let Some(v) = self.mixing_bound {
            o.mixing_bound = v;
        }
        if let Some(v) = self.mahler_grid {
            o.mahler_grid = v;
        }
        if let Some(v) = self.roots_order {
            o.roots_order = v;
        }
        if let Some(v) = self.gb_max_pairs {
            o.gb_max_pairs = v;
        }
        o
    }
}

#[derive(Subcommand)]
enum Command {
    /// Connectedness, mixing search and entropy of one system.
    Analyze {
        spec: PathBuf,
        #[command(flatten)]
        budget: Budget,
    },
    /// Whether every equivariant map from the first system to the second is affine.
    Rigidity {
        source: PathBuf,
        target: PathBuf,
        #[command(flatten)]
        budget: Budget,
        /// Exit with status 4 when a hypothesis fails.
        #[arg(long)]
        strict: bool,
    },
    /// Mahler measure estimates and periodic-point counts of a polynomial.
    Mahler {
        polynomial: String,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 512)]
        mahler_grid: usize,
        #[arg(long, default_value_t = 64)]
        roots_order: usize,
        /// Orders N for periodic-point counts.
        #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
        periodic: Vec<u32>,
    },
    /// Character/lift splitting of a sampled circle-valued map.
    VkCheck {
        /// Phase-grid fixture; a random constructed map is used when absent.
        fixture: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
    /// Truncated zero-divisor and variety-measure checks for a polynomial.
    ZdcCheck {
        polynomial: String,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 8)]
        radius: i32,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::DimensionMismatch { .. }
            | Error::RankMismatch { .. }
            | Error::InvalidInput(_)
            | Error::ZeroPolynomial => EXIT_PARSE,
            Error::Budget { .. } => EXIT_BUDGET,
            _ => EXIT_FAILURE,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_FAILURE,
        msg: format!("{}: {e}", path.display()),
    })
}

fn load_spec(path: &Path) -> Result<SystemSpec, Failure> {
    SystemSpec::from_json(&read(path)?).map_err(|e| Failure {
        code: EXIT_PARSE,
        msg: format!("{}: {e}", path.display()),
    })
}

fn emit_doc(doc: &AnalysisReportDoc, format: Format) {
    match format {
        Format::Json => println!("{}", doc.to_json()),
        Format::Text => print!("{}", doc.to_text()),
    }
}

fn emit<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Analyze { spec, budget } => {
            let spec = load_spec(&spec)?;
            let doc = report::analyze(&spec, &budget.options(&spec))?;
            emit_doc(&doc, cli.format);
        }
        Command::Rigidity {
            source,
            target,
            budget,
            strict,
        } => {
            let (s1, s2) = (load_spec(&source)?, load_spec(&target)?);
            let doc = report::rigidity(&s1, &s2, &budget.options(&s1))?;
            emit_doc(&doc, cli.format);
            if strict && doc.is_inapplicable() {
                return Ok(EXIT_INAPPLICABLE);
            }
        }
        Command::Mahler {
            polynomial,
            dim,
            mahler_grid,
            roots_order,
            periodic,
        } => {
            let f = parse_poly(&polynomial, dim)?;
            let doc = report::mahler_doc(&f, mahler_grid, roots_order, &periodic)?;
            match cli.format {
                Format::Json => emit(&doc),
                Format::Text => {
                    println!("m({}):", doc.polynomial);
                    for e in &doc.estimates {
                        println!("  {:?}: {:.10} (error indicator {:.1e})", e.method, e.estimate, e.error);
                    }
                    for p in &doc.periodic_points {
                        println!("  N = {}: {} points", p.order, p.count);
                    }
                }
            }
        }
        Command::VkCheck { fixture, dim, grid } => {
            let doc = match fixture {
                Some(path) => report::vk_doc(&SampledTorusMap::from_text(&read(&path)?)?)?,
                None => report::vk_constructed(dim, grid, cli.seed)?,
            };
            match cli.format {
                Format::Json => emit(&doc),
                Format::Text => println!(
                    "character {:?}, residual {:.1e}, unique: {}",
                    doc.character, doc.residual, doc.uniqueness.unique
                ),
            }
        }
        Command::ZdcCheck {
            polynomial,
            dim,
            radius,
            trials,
            samples,
        } => {
            let g = parse_poly(&polynomial, dim)?;
            let doc = report::zdc_doc(&g, radius, trials, samples, cli.seed)?;
            match cli.format {
                Format::Json => emit(&doc),
                Format::Text => println!(
                    "kernel dimension {} at radius {}, norm ratio {:.1e}, Fourier residual {:.1e}, near-zero fraction {}",
                    doc.kernel.kernel_dim,
                    doc.kernel.radius,
                    doc.kernel.norm_ratio,
                    doc.kernel.fourier_residual,
                    doc.variety.fraction
                ),
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
