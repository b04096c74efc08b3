use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pcm_conley::coding::code;
use pcm_conley::fixtures;
use pcm_conley::invariance::IsolationMode;
use pcm_conley::lifted::LiftedDigraph;
use pcm_conley::mapfile::{read_map, MapFileError};
use pcm_conley::pipeline::{run_index, run_isolation, Params};
use pcm_conley::report::{Body, PieceLine, Report};
use pcm_conley::wazewski::check_wazewski;
use pcm_conley::{AdjointSelector, PcMap, RatInterval, Rational};

#[derive(Parser)]
#[command(name = "pcm-conley", version, about = "Conley index of piecewise continuous interval maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a map file defines a piecewise continuous self-map.
    Validate { map: PathBuf },
    /// Print the minimal interval partition.
    Partition { map: PathBuf },
    /// List every adjoint map.
    Adjoints { map: PathBuf },
    /// Itinerary of one point.
    Code {
        map: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: Rational,
        /// Reassigned discontinuity points, e.g. "1/2->0,2/3->4".
        #[arg(long)]
        selector: Option<String>,
    },
    /// Isolation and compatibility of a neighborhood.
    Isolate { map: PathBuf },
    /// Index pair, relative homology and index map.
    Index { map: PathBuf },
    /// Index, then a periodic-orbit witness when the index is nontrivial.
    Wazewski { map: PathBuf },
    /// Built-in seven-piece map on [-1,2] with neighborhood [-1/3,4/3].
    PaperExample,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Touch,
    Halo,
}

#[derive(Args)]
struct Opts {
    #[arg(long, global = true, default_value_t = 4)]
    grid_depth: u32,
    #[arg(long, global = true, default_value_t = 3)]
    code_depth: usize,
    #[arg(long, global = true, default_value_t = 6)]
    max_period: usize,
    #[arg(long, global = true, default_value_t = 12)]
    backward_bound: usize,
    #[arg(long, global = true, default_value_t = 4)]
    max_refinements: usize,
    #[arg(long, global = true, value_enum, default_value = "touch")]
    isolation_mode: ModeArg,
    /// Skip the extra computation one resolution finer after success.
    #[arg(long, global = true)]
    no_stability_probe: bool,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Neighborhood as "lo,hi".
    #[arg(long, global = true, allow_hyphen_values = true)]
    neighborhood: Option<String>,
    /// Write the lifted digraph of the last attempt in DOT format.
    #[arg(long, global = true)]
    emit_dot: Option<PathBuf>,
    /// Write the lifted digraph of the last attempt as CSV.
    #[arg(long, global = true)]
    emit_csv: Option<PathBuf>,
}

impl Opts {
    fn params(&self) -> Params {
        Params {
            code_depth: self.code_depth,
            grid_depth: self.grid_depth,
            max_period: self.max_period,
            backward_bound: self.backward_bound,
            max_refinements: self.max_refinements,
            isolation_mode: match self.isolation_mode {
                ModeArg::Touch => IsolationMode::Touch,
                ModeArg::Halo => IsolationMode::Halo,
            },
            stability_probe: !self.no_stability_probe,
        }
    }
}

struct Usage(String);

impl From<MapFileError> for Usage {
    fn from(e: MapFileError) -> Self {
        Usage(e.to_string())
    }
}

fn parse_neighborhood(s: &str, m: &PcMap) -> Result<RatInterval, Usage> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| Usage(format!("--neighborhood: expected \"lo,hi\", got {s:?}")))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<Rational>()
            .map_err(|e| Usage(format!("--neighborhood: {e}")))
    };
    let n = RatInterval::new(parse(lo)?, parse(hi)?).map_err(|_| Usage("--neighborhood: lo exceeds hi".into()))?;
    if !n.is_subset_of(m.space()) {
        return Err(Usage(format!("--neighborhood: {n} is not inside the space {}", m.space())));
    }
    Ok(n)
}

fn neighborhood(opts: &Opts, m: &PcMap) -> Result<RatInterval, Usage> {
    match &opts.neighborhood {
        Some(s) => parse_neighborhood(s, m),
        None => Err(Usage("--neighborhood is required for this command".into())),
    }
}

fn parse_selector(s: &str, m: &PcMap) -> Result<AdjointSelector, Usage> {
    let mut overrides = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty() && *p != "f") {
        let (x, p) = part
            .split_once("->")
            .ok_or_else(|| Usage(format!("--selector: expected \"point->piece\", got {part:?}")))?;
        let x: Rational = x.trim().parse().map_err(|e| Usage(format!("--selector: {e}")))?;
        let p: usize = p.trim().parse().map_err(|e| Usage(format!("--selector: {e}")))?;
        overrides.push((x, p));
    }
    AdjointSelector::with(m, &overrides).map_err(|e| Usage(format!("--selector: {e}")))
}

fn emit(opts: &Opts, d: &LiftedDigraph) -> Result<(), Usage> {
    let write = |p: &Path, text: String| std::fs::write(p, text).map_err(|e| Usage(format!("{}: {e}", p.display())));
    if let Some(p) = &opts.emit_dot {
        write(p, d.to_dot())?;
    }
    if let Some(p) = &opts.emit_csv {
        write(p, d.to_csv())?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Report, Usage> {
    let opts = &cli.opts;
    let params = opts.params();
    let pipeline_err = |e: pcm_conley::pipeline::PipelineError| Usage(e.to_string());
    Ok(match &cli.command {
        Command::Validate { map } => match read_map(map) {
            Ok(m) => Report::new(Some(&m), Body::Validate { valid: true, violations: vec![] }),
            Err(MapFileError::Invalid(v)) => Report::new(
                None,
                Body::Validate {
                    valid: false,
                    violations: v.iter().map(|x| x.to_string()).collect(),
                },
            ),
            Err(e) => return Err(e.into()),
        },
        Command::Partition { map } => {
            let m = read_map(map)?;
            let pieces = m
                .minimal_partition()
                .pieces()
                .iter()
                .map(|p| PieceLine {
                    span: p.span.to_string(),
                    branch: p.branch.to_string(),
                })
                .collect();
            let note = "minimal among partitions into intervals".to_string();
            Report::new(Some(&m), Body::Partition { pieces, note })
        }
        Command::Adjoints { map } => {
            let m = read_map(map)?;
            let mp = m.minimal_partition();
            let selectors = mp.list_adjoints().iter().map(|g| g.describe(&mp)).collect();
            Report::new(
                Some(&m),
                Body::Adjoints {
                    discontinuities: mp.discontinuity_set(),
                    selectors,
                },
            )
        }
        Command::Code { map, point, selector } => {
            let m = read_map(map)?;
            let g = match selector {
                Some(s) => parse_selector(s, &m)?,
                None => AdjointSelector::identity(&m),
            };
            let word = code(&m, &g, point, opts.code_depth).map_err(|e| Usage(e.to_string()))?;
            Report::new(
                Some(&m),
                Body::Code {
                    point: point.clone(),
                    selector: g.describe(&m),
                    word,
                },
            )
        }
        Command::Isolate { map } => {
            let m = read_map(map)?;
            let n = neighborhood(opts, &m)?;
            let (r, last) = run_isolation(&m, &n, &params).map_err(pipeline_err)?;
            emit(opts, &last.graph)?;
            Report::new(Some(&m), Body::Isolate(r))
        }
        Command::Index { map } => {
            let m = read_map(map)?;
            let n = neighborhood(opts, &m)?;
            let (r, last) = run_index(&m, &n, &params).map_err(pipeline_err)?;
            emit(opts, &last.graph)?;
            Report::new(Some(&m), Body::Index(r))
        }
        Command::Wazewski { map } => {
            let m = read_map(map)?;
            let n = neighborhood(opts, &m)?;
            let r = check_wazewski(&m, &n, &params).map_err(pipeline_err)?;
            if opts.emit_dot.is_some() || opts.emit_csv.is_some() {
                let (_, last) = run_index(&m, &n, &params).map_err(pipeline_err)?;
                emit(opts, &last.graph)?;
            }
            Report::new(Some(&m), Body::Wazewski(r))
        }
        Command::PaperExample => {
            let m = fixtures::worked_map();
            let n = match &opts.neighborhood {
                Some(s) => parse_neighborhood(s, &m)?,
                None => fixtures::worked_region(),
            };
            let r = check_wazewski(&m, &n, &params).map_err(pipeline_err)?;
            if opts.emit_dot.is_some() || opts.emit_csv.is_some() {
                let (_, last) = run_index(&m, &n, &params).map_err(pipeline_err)?;
                emit(opts, &last.graph)?;
            }
            Report::new(Some(&m), Body::PaperExample(r))
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let text = match cli.opts.format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json(),
            };
            print!("{text}");
            ExitCode::from(report.exit_code as u8)
        }
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
