use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use streamvis::community::{RoundMode, ThresholdBase, TieRule, DEFAULT_CHUNK, DEFAULT_ROUNDS};
use streamvis::gen;
use streamvis::layout::{
    AttractionForm, GravityForm, LayoutParams, SpeedFormula, DEFAULT_GRAVITY, DEFAULT_REPULSION, DEFAULT_THETA,
    FULL_GRAPH_ITERATIONS, MAX_DISPLACEMENT,
};
use streamvis::pipeline::{self, AblationAxis, Mode, Outputs, PipelineConfig};
use streamvis::render::{Palette, SvgOptions};
use streamvis::sketch::DEFAULT_ROWS;
use streamvis::Graph;

#[derive(Parser)]
#[command(name = "streamvis", version, about = "Community supergraph layouts for large edge lists")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on one edge list.
    Run(RunArgs),
    /// Re-run the pipeline over a list of values for one parameter.
    Ablate(AblateArgs),
    /// Time the supergraph pipeline against a full-graph layout.
    Bench(BenchArgs),
    /// Write a planted-community test graph.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Supergraph,
    FullColored,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieArg {
    SrcJoinsDst,
    DstJoinsSrc,
    Skip,
}

#[derive(Clone, Copy, ValueEnum)]
enum RoundModeArg {
    Contract,
    Restream,
}

#[derive(Clone, Copy, ValueEnum)]
enum GravityArg {
    Linear,
    Unit,
}

#[derive(Clone, Copy, ValueEnum)]
enum AttractionArg {
    Linear,
    UnitAway,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpeedArg {
    Product,
    Sum,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Hashes,
    Rounds,
    Threshold,
}

fn parse_threshold_base(s: &str) -> Result<ThresholdBase, String> {
    match s {
        "mode-degree" => Ok(ThresholdBase::ModeDegree),
        "average-degree" => Ok(ThresholdBase::AverageDegree),
        _ => match s.parse::<u64>() {
            Ok(0) | Err(_) => Err(format!("expected mode-degree, average-degree or a positive integer, got {s:?}")),
            Ok(n) => Ok(ThresholdBase::Explicit(n)),
        },
    }
}

#[derive(Args, Clone)]
struct PipelineArgs {
    /// Whitespace-separated edge list; `#` and `%` lines are comments.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "supergraph")]
    mode: ModeArg,
    #[arg(long, default_value_t = DEFAULT_ROUNDS)]
    rounds: usize,
    /// mode-degree, average-degree or an integer.
    #[arg(long, value_parser = parse_threshold_base, default_value = "mode-degree")]
    threshold_base: ThresholdBase,
    #[arg(long, value_enum, default_value = "src-joins-dst")]
    tie_rule: TieArg,
    #[arg(long, value_enum, default_value = "contract")]
    round_mode: RoundModeArg,
    #[arg(long, default_value_t = DEFAULT_ROWS)]
    sketch_rows: usize,
    /// Defaults to one column per thousand edges, at least 64.
    #[arg(long)]
    sketch_cols: Option<usize>,
    /// Defaults to 100 (supergraph) or 500 (full-colored).
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_GRAVITY)]
    gravity: f64,
    #[arg(long, default_value_t = DEFAULT_REPULSION)]
    repulsion: f64,
    #[arg(long, default_value_t = DEFAULT_THETA)]
    theta: f64,
    #[arg(long, value_enum, default_value = "linear")]
    gravity_form: GravityArg,
    #[arg(long, value_enum, default_value = "linear")]
    attraction: AttractionArg,
    #[arg(long, value_enum, default_value = "product")]
    speed_formula: SpeedArg,
    #[arg(long, default_value_t = MAX_DISPLACEMENT)]
    max_displacement: f64,
    /// Use unit attraction on superedges instead of their multiplicity.
    #[arg(long)]
    unit_superedges: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to all cores.
    #[arg(long, env = "STREAMVIS_WORKERS")]
    workers: Option<usize>,
    /// Edges per worker per wave in parallel detection.
    #[arg(long, default_value_t = DEFAULT_CHUNK)]
    chunk: usize,
    /// Canvas side in pixels.
    #[arg(long, default_value_t = 1000.0)]
    canvas_size: f64,
    #[arg(long)]
    no_edges: bool,
    /// Eleven comma-separated #rrggbb colors, smallest-mass pool first.
    #[arg(long, value_delimiter = ',')]
    palette: Option<Vec<String>>,
}

impl PipelineArgs {
    fn config(&self) -> anyhow::Result<PipelineConfig> {
        let workers = match self.workers {
            Some(w) => w,
            None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        };
        let palette = match &self.palette {
            Some(colors) => Palette::new(colors)?,
            None => Palette::default(),
        };
        let cfg = PipelineConfig {
            input: Some(self.input.clone()),
            mode: match self.mode {
                ModeArg::Supergraph => Mode::Supergraph,
                ModeArg::FullColored => Mode::FullColored,
            },
            rounds: self.rounds,
            threshold_base: self.threshold_base,
            tie_rule: match self.tie_rule {
                TieArg::SrcJoinsDst => TieRule::SrcJoinsDst,
                TieArg::DstJoinsSrc => TieRule::DstJoinsSrc,
                TieArg::Skip => TieRule::Skip,
            },
            round_mode: match self.round_mode {
                RoundModeArg::Contract => RoundMode::Contract,
                RoundModeArg::Restream => RoundMode::Restream,
            },
            sketch_rows: self.sketch_rows,
            sketch_cols: self.sketch_cols,
            iterations: self.iterations,
            layout: LayoutParams {
                gravity: self.gravity,
                repulsion: self.repulsion,
                theta: self.theta,
                gravity_form: match self.gravity_form {
                    GravityArg::Linear => GravityForm::Linear,
                    GravityArg::Unit => GravityForm::Unit,
                },
                attraction: match self.attraction {
                    AttractionArg::Linear => AttractionForm::Linear,
                    AttractionArg::UnitAway => AttractionForm::UnitAway,
                },
                speed_formula: match self.speed_formula {
                    SpeedArg::Product => SpeedFormula::Product,
                    SpeedArg::Sum => SpeedFormula::Sum,
                },
                max_displacement: self.max_displacement,
                ..LayoutParams::default()
            },
            unit_superedges: self.unit_superedges,
            seed: self.seed,
            workers,
            chunk: self.chunk,
            svg: SvgOptions {
                size: self.canvas_size,
                draw_edges: !self.no_edges,
                ..SvgOptions::default()
            },
            palette,
            outputs: Outputs::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn load(&self) -> anyhow::Result<Graph> {
        Graph::read_file(&self.input).with_context(|| format!("reading {}", self.input.display()))
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long, default_value = "layout.svg")]
    svg: PathBuf,
    /// Sidecar table: id, x, y, radius, class, hex.
    #[arg(long)]
    nodes_tsv: Option<PathBuf>,
    /// JSON report with stage timings and metrics.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    communities_tsv: Option<PathBuf>,
    #[arg(long)]
    supernodes_tsv: Option<PathBuf>,
    #[arg(long)]
    superedges_tsv: Option<PathBuf>,
}

#[derive(Args)]
struct AblateArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long, value_enum)]
    axis: AxisArg,
    /// Comma-separated values; threshold values multiply the base.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<u64>,
    /// TSV output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for one SVG per value.
    #[arg(long)]
    export_dir: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long, default_value_t = FULL_GRAPH_ITERATIONS)]
    full_iterations: usize,
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of planted communities.
    #[arg(long, default_value_t = 8)]
    communities: usize,
    /// Nodes per community.
    #[arg(long, default_value_t = 16)]
    size: usize,
    /// Intra-community edge probability; 1 writes cliques.
    #[arg(long, default_value_t = 1.0)]
    p_in: f64,
    /// Random edges between communities.
    #[arg(long, default_value_t = 8)]
    inter_edges: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write node<TAB>community ground truth here.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let mut cfg = args.pipeline.config()?;
    cfg.outputs = Outputs {
        svg: Some(args.svg.clone()),
        nodes_tsv: args.nodes_tsv,
        report: args.report,
        communities_tsv: args.communities_tsv,
        supernodes_tsv: args.supernodes_tsv,
        superedges_tsv: args.superedges_tsv,
    };
    let run = pipeline::run_pipeline(&cfg)?;
    println!("{}", run.report.summary());
    info!("wrote {}", args.svg.display());
    Ok(())
}

fn ablate(args: AblateArgs) -> anyhow::Result<()> {
    let cfg = args.pipeline.config()?;
    let g = args.pipeline.load()?;
    if let Some(dir) = &args.export_dir {
        std::fs::create_dir_all(dir)?;
    }
    let axis = match args.axis {
        AxisArg::Hashes => AblationAxis::Hashes,
        AxisArg::Rounds => AblationAxis::Rounds,
        AxisArg::Threshold => AblationAxis::Threshold,
    };
    let rows = pipeline::run_ablation(&g, &cfg, axis, &args.values, args.export_dir.as_deref())?;
    match &args.out {
        Some(path) => pipeline::write_ablation_tsv(&rows, BufWriter::new(File::create(path)?))?,
        None => pipeline::write_ablation_tsv(&rows, io::stdout().lock())?,
    }
    Ok(())
}

fn bench(args: BenchArgs) -> anyhow::Result<()> {
    let cfg = args.pipeline.config()?;
    let g = args.pipeline.load()?;
    let row = pipeline::bench(&g, &cfg, args.full_iterations)?;
    let mut out = io::stdout().lock();
    writeln!(out, "nodes\tedges\tsupernodes\tsuperedges\tmodularity\tpipeline_ms\tfull_layout_ms\tspeedup")?;
    writeln!(
        out,
        "{}\t{}\t{}\t{}\t{:.4}\t{:.1}\t{:.1}\t{:.1}",
        row.nodes, row.edges, row.supernodes, row.superedges, row.modularity, row.pipeline_ms, row.full_layout_ms, row.speedup
    )?;
    Ok(())
}

fn generate(args: GenerateArgs) -> anyhow::Result<()> {
    if args.communities < 2 || args.size < 2 {
        bail!("need at least two communities of two or more nodes");
    }
    if !(args.p_in > 0.0 && args.p_in <= 1.0) {
        bail!("--p-in must lie in (0, 1]");
    }
    let planted = if args.p_in == 1.0 {
        gen::planted_cliques(args.communities, args.size, args.inter_edges, args.seed)
    } else {
        gen::planted_partition(args.communities, args.size, args.p_in, args.inter_edges, args.seed)
    };
    planted.graph.write_edge_list(BufWriter::new(File::create(&args.out)?))?;
    if let Some(path) = &args.truth {
        let mut w = BufWriter::new(File::create(path)?);
        for (v, t) in planted.truth.iter().enumerate() {
            writeln!(w, "{}\t{t}", planted.graph.external_id(v as u32))?;
        }
    }
    info!(
        "wrote {} nodes, {} edges to {}",
        planted.graph.node_count(),
        planted.graph.edge_count(),
        args.out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Ablate(a) => ablate(a),
        Command::Bench(a) => bench(a),
        Command::Generate(a) => generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
