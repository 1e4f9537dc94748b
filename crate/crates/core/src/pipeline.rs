//! End-to-end runs: parse, detect, size, contract, lay out, color, export.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::community::{
    detect_communities, CommunityAssignment, DetectOptions, Execution, RoundMode, ThresholdBase,
    ThresholdSchedule, TieRule, DEFAULT_CHUNK, DEFAULT_ROUNDS,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::layout::{self, LayoutOutcome, LayoutParams, FULL_GRAPH_ITERATIONS, SUPERGRAPH_ITERATIONS};
use crate::metrics::{self, SizeBucket};
use crate::render::{self, Palette, RadiusScale, Scene, SvgOptions};
use crate::sketch::{cols_for_edges, CountMinSketch, DEFAULT_COL_FRACTION, DEFAULT_MIN_COLS, DEFAULT_ROWS};
use crate::supergraph::{self, SuperGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Draw one circle per community.
    #[default]
    Supergraph,
    /// Lay out the original graph and color nodes by community class.
    FullColored,
}

/// Output files; anything left `None` is not written.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Outputs {
    pub svg: Option<PathBuf>,
    pub nodes_tsv: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub communities_tsv: Option<PathBuf>,
    pub supernodes_tsv: Option<PathBuf>,
    pub superedges_tsv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub input: Option<PathBuf>,
    pub mode: Mode,
    pub rounds: usize,
    pub threshold_base: ThresholdBase,
    pub tie_rule: TieRule,
    pub round_mode: RoundMode,
    pub sketch_rows: usize,
    /// Defaults to one column per thousand edges (at least 64).
    pub sketch_cols: Option<usize>,
    /// Defaults to 100 for supergraphs and 500 for full graphs.
    pub iterations: Option<usize>,
    pub layout: LayoutParams,
    /// Give every superedge unit attraction instead of its multiplicity.
    pub unit_superedges: bool,
    pub seed: u64,
    /// 1 runs detection sequentially; more uses chunked parallel waves.
    pub workers: usize,
    pub chunk: usize,
    pub svg: SvgOptions,
    pub palette: Palette,
    pub outputs: Outputs,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: None,
            mode: Mode::Supergraph,
            rounds: DEFAULT_ROUNDS,
            threshold_base: ThresholdBase::ModeDegree,
            tie_rule: TieRule::default(),
            round_mode: RoundMode::default(),
            sketch_rows: DEFAULT_ROWS,
            sketch_cols: None,
            iterations: None,
            layout: LayoutParams::default(),
            unit_superedges: false,
            seed: 0,
            workers: 1,
            chunk: DEFAULT_CHUNK,
            svg: SvgOptions::default(),
            palette: Palette::default(),
            outputs: Outputs::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rounds", self.rounds),
            ("sketch rows", self.sketch_rows),
            ("sketch cols", self.sketch_cols.unwrap_or(1)),
            ("iterations", self.iterations.unwrap_or(1)),
            ("workers", self.workers),
            ("chunk", self.chunk),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::invalid(format!("{name} must be positive")));
            }
        }
        if self.threshold_base == ThresholdBase::Explicit(0) {
            return Err(Error::invalid("threshold base must be positive"));
        }
        self.layout.validate()
    }

    pub fn iterations(&self) -> usize {
        self.iterations.unwrap_or(match self.mode {
            Mode::Supergraph => SUPERGRAPH_ITERATIONS,
            Mode::FullColored => FULL_GRAPH_ITERATIONS,
        })
    }

    pub fn sketch_cols_for(&self, edges: usize) -> usize {
        self.sketch_cols
            .unwrap_or_else(|| cols_for_edges(edges, DEFAULT_COL_FRACTION, DEFAULT_MIN_COLS))
    }

    fn detect_options(&self) -> DetectOptions {
        DetectOptions {
            tie_rule: self.tie_rule,
            round_mode: self.round_mode,
            execution: if self.workers == 1 {
                Execution::Sequential
            } else {
                Execution::Parallel { chunk: self.chunk }
            },
        }
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        Ok(rayon::ThreadPoolBuilder::new().num_threads(self.workers).build()?)
    }
}

/// Wall time per stage in milliseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimes {
    pub parse_ms: f64,
    pub detect_ms: f64,
    pub sizes_ms: f64,
    pub contract_ms: f64,
    pub metrics_ms: f64,
    pub layout_ms: f64,
    pub color_ms: f64,
    pub export_ms: f64,
    pub total_ms: f64,
}

impl StageTimes {
    pub fn stage_sum(&self) -> f64 {
        self.parse_ms
            + self.detect_ms
            + self.sizes_ms
            + self.contract_ms
            + self.metrics_ms
            + self.layout_ms
            + self.color_ms
            + self.export_ms
    }

    /// Everything except reading input and writing files.
    pub fn compute_ms(&self) -> f64 {
        self.detect_ms + self.sizes_ms + self.contract_ms + self.metrics_ms + self.layout_ms + self.color_ms
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub mode: Mode,
    pub nodes: usize,
    pub edges: usize,
    pub threshold_base: u64,
    pub rounds_run: usize,
    pub communities: usize,
    pub supernodes: usize,
    pub superedges: usize,
    pub modularity: f64,
    pub size_histogram: Vec<SizeBucket>,
    pub sketch_rows: usize,
    pub sketch_cols: usize,
    pub iterations: usize,
    pub final_max_displacement: f64,
    pub layout_diameter: f64,
    pub workers: usize,
    pub seed: u64,
    pub times: StageTimes,
}

impl Report {
    pub fn summary(&self) -> String {
        format!(
            "{} nodes, {} edges -> {} supernodes, {} superedges (Q = {:.4}, {} rounds, base {})\n\
             times ms: parse {:.1}, detect {:.1}, sizes {:.1}, contract {:.1}, metrics {:.1}, layout {:.1}, color {:.1}, export {:.1}, total {:.1}",
            self.nodes,
            self.edges,
            self.supernodes,
            self.superedges,
            self.modularity,
            self.rounds_run,
            self.threshold_base,
            self.times.parse_ms,
            self.times.detect_ms,
            self.times.sizes_ms,
            self.times.contract_ms,
            self.times.metrics_ms,
            self.times.layout_ms,
            self.times.color_ms,
            self.times.export_ms,
            self.times.total_ms,
        )
    }
}

/// In-memory result of one run.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub report: Report,
    pub assignment: CommunityAssignment,
    pub supergraph: SuperGraph,
    pub layout: LayoutOutcome,
    /// Color class per drawn element (supernode or original node).
    pub classes: Vec<u8>,
    pub svg: Vec<u8>,
    pub nodes_tsv: Vec<u8>,
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// Reads `cfg.input`, runs every stage and writes the requested outputs.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineRun> {
    cfg.validate()?;
    let start = Instant::now();
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| Error::invalid("no input path given"))?;
    let g = Graph::read_file(input).map_err(|e| e.in_stage("parse"))?;
    let parse_ms = ms(start);
    let mut run = run_on_graph(&g, cfg)?;

    let t = Instant::now();
    write_outputs(&g, cfg, &run).map_err(|e| e.in_stage("export"))?;
    let times = &mut run.report.times;
    times.parse_ms = parse_ms;
    times.export_ms += ms(t);
    times.total_ms = ms(start);
    if let Some(path) = &cfg.outputs.report {
        let f = BufWriter::new(File::create(path).map_err(|e| Error::from(e).in_stage("export"))?);
        serde_json::to_writer_pretty(f, &run.report).map_err(|e| Error::from(e).in_stage("export"))?;
    }
    Ok(run)
}

fn write_outputs(g: &Graph, cfg: &PipelineConfig, run: &PipelineRun) -> Result<()> {
    let o = &cfg.outputs;
    if let Some(p) = &o.svg {
        std::fs::write(p, &run.svg)?;
    }
    if let Some(p) = &o.nodes_tsv {
        std::fs::write(p, &run.nodes_tsv)?;
    }
    if let Some(p) = &o.communities_tsv {
        run.assignment.write_tsv(g, BufWriter::new(File::create(p)?))?;
    }
    if let Some(p) = &o.supernodes_tsv {
        run.supergraph.write_nodes_tsv(g, BufWriter::new(File::create(p)?))?;
    }
    if let Some(p) = &o.superedges_tsv {
        run.supergraph.write_edges_tsv(g, BufWriter::new(File::create(p)?))?;
    }
    Ok(())
}

/// Runs every stage after parsing on a pool of `cfg.workers` threads.
/// Renders into memory; nothing is written to disk.
pub fn run_on_graph(g: &Graph, cfg: &PipelineConfig) -> Result<PipelineRun> {
    cfg.validate()?;
    cfg.pool()?.install(|| stages(g, cfg))
}

fn stages(g: &Graph, cfg: &PipelineConfig) -> Result<PipelineRun> {
    let start = Instant::now();
    let mut times = StageTimes::default();

    let t = Instant::now();
    let stats = g.degree_stats().map_err(|e| e.in_stage("detect"))?;
    let schedule =
        ThresholdSchedule::from_stats(&stats, cfg.threshold_base, cfg.rounds).map_err(|e| e.in_stage("detect"))?;
    let assignment =
        detect_communities(g, &schedule, &cfg.detect_options()).map_err(|e| e.in_stage("detect"))?;
    times.detect_ms = ms(t);

    let t = Instant::now();
    let cols = cfg.sketch_cols_for(g.edge_count());
    let sketch = CountMinSketch::new(cfg.sketch_rows, cols, cfg.seed).map_err(|e| e.in_stage("sizes"))?;
    supergraph::accumulate_sizes(g, &assignment, &sketch).map_err(|e| e.in_stage("sizes"))?;
    times.sizes_ms = ms(t);

    let t = Instant::now();
    let sg = supergraph::contract(g, &assignment, &sketch).map_err(|e| e.in_stage("contract"))?;
    times.contract_ms = ms(t);

    let t = Instant::now();
    let modularity = metrics::modularity(g, &assignment).map_err(|e| e.in_stage("metrics"))?;
    let size_histogram = metrics::size_histogram(&assignment);
    times.metrics_ms = ms(t);

    let iterations = cfg.iterations();
    let layout_seed = cfg.seed.wrapping_add(1);
    let t = Instant::now();
    let layout = match cfg.mode {
        Mode::Supergraph => {
            layout::layout_supergraph(&sg, iterations, &cfg.layout, layout_seed, cfg.unit_superedges)
        }
        Mode::FullColored => layout::layout_graph(g, iterations, &cfg.layout, layout_seed),
    }
    .map_err(|e| e.in_stage("layout"))?;
    times.layout_ms = ms(t);

    let t = Instant::now();
    let colors = render::assign_colors(&sg.weights())
        .map_err(|e| e.in_stage("color"))?
        .with_palette(cfg.palette.clone());
    let (classes, weights, edges, ids): (Vec<u8>, Vec<u64>, Vec<(u32, u32, u64)>, Vec<i64>) = match cfg.mode {
        Mode::Supergraph => (
            colors.classes().to_vec(),
            sg.weights(),
            sg.edges().iter().map(|e| (e.src, e.dst, e.multiplicity)).collect(),
            sg.nodes().iter().map(|n| g.external_id(n.id)).collect(),
        ),
        Mode::FullColored => (
            render::color_full_graph(g, &assignment, &sg, &colors).map_err(|e| e.in_stage("color"))?,
            g.degrees().iter().map(|&d| d as u64 + 1).collect(),
            g.edges().iter().map(|&(u, v)| (u, v, 1)).collect(),
            (0..g.node_count() as u32).map(|v| g.external_id(v)).collect(),
        ),
    };
    let scale = RadiusScale::fit(&weights, layout.diameter);
    let radii: Vec<f64> = weights.iter().map(|&w| scale.radius(w)).collect();
    times.color_ms = ms(t);

    let t = Instant::now();
    let scene = Scene {
        positions: &layout.positions,
        weights: &weights,
        radii: &radii,
        classes: &classes,
        edges: &edges,
        palette: &cfg.palette,
    };
    let mut svg = Vec::new();
    render::export_svg(&scene, &cfg.svg, &mut svg).map_err(|e| e.in_stage("export"))?;
    let mut nodes_tsv = Vec::new();
    render::write_nodes_tsv(&ids, &scene, &mut nodes_tsv).map_err(|e| e.in_stage("export"))?;
    times.export_ms = ms(t);
    times.total_ms = ms(start);

    let report = Report {
        mode: cfg.mode,
        nodes: g.node_count(),
        edges: g.edge_count(),
        threshold_base: schedule.base(),
        rounds_run: assignment.rounds_run(),
        communities: assignment.community_count(),
        supernodes: sg.nodes().len(),
        superedges: sg.edges().len(),
        modularity,
        size_histogram,
        sketch_rows: cfg.sketch_rows,
        sketch_cols: cols,
        iterations,
        final_max_displacement: layout.last_step.max_displacement,
        layout_diameter: layout.diameter,
        workers: cfg.workers,
        seed: cfg.seed,
        times,
    };
    Ok(PipelineRun {
        report,
        assignment,
        supergraph: sg,
        layout,
        classes,
        svg,
        nodes_tsv,
    })
}

/// Wall time in ms of laying out the whole graph (degree + 1 masses) with the
/// configured forces, on `cfg.workers` threads.
pub fn full_graph_layout_ms(g: &Graph, cfg: &PipelineConfig, iterations: usize) -> Result<f64> {
    cfg.validate()?;
    cfg.pool()?.install(|| {
        let t = Instant::now();
        layout::layout_graph(g, iterations, &cfg.layout, cfg.seed.wrapping_add(1))
            .map_err(|e| e.in_stage("layout"))?;
        Ok(ms(t))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub nodes: usize,
    pub edges: usize,
    pub supernodes: usize,
    pub superedges: usize,
    pub modularity: f64,
    pub pipeline_ms: f64,
    pub full_layout_ms: f64,
    pub speedup: f64,
}

/// Supergraph pipeline against a full-graph layout on the same pool size.
/// Both sides are timed without file I/O.
pub fn bench(g: &Graph, cfg: &PipelineConfig, full_iterations: usize) -> Result<BenchRow> {
    let cfg = PipelineConfig {
        mode: Mode::Supergraph,
        ..cfg.clone()
    };
    let run = run_on_graph(g, &cfg)?;
    let pipeline_ms = run.report.times.compute_ms();
    let full_layout_ms = full_graph_layout_ms(g, &cfg, full_iterations)?;
    Ok(BenchRow {
        nodes: g.node_count(),
        edges: g.edge_count(),
        supernodes: run.report.supernodes,
        superedges: run.report.superedges,
        modularity: run.report.modularity,
        pipeline_ms,
        full_layout_ms,
        speedup: full_layout_ms / pipeline_ms.max(1e-9),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AblationAxis {
    /// Sketch rows.
    Hashes,
    Rounds,
    /// Multiples of the configured threshold base.
    Threshold,
}

impl AblationAxis {
    pub fn name(&self) -> &'static str {
        match self {
            AblationAxis::Hashes => "hashes",
            AblationAxis::Rounds => "rounds",
            AblationAxis::Threshold => "threshold",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub axis: AblationAxis,
    pub value: u64,
    pub threshold_base: u64,
    pub time_ms: f64,
    pub detect_ms: f64,
    pub layout_ms: f64,
    pub supernodes: usize,
    pub superedges: usize,
    pub modularity: f64,
}

/// Re-runs the pipeline once per value along `axis`. With `export_dir` set,
/// each run's SVG is written there as `<axis>-<value>.svg`.
pub fn run_ablation(
    g: &Graph,
    cfg: &PipelineConfig,
    axis: AblationAxis,
    values: &[u64],
    export_dir: Option<&Path>,
) -> Result<Vec<AblationRow>> {
    if values.is_empty() {
        return Err(Error::invalid("ablation needs at least one value"));
    }
    let stats = g.degree_stats()?;
    let base = ThresholdSchedule::from_stats(&stats, cfg.threshold_base, cfg.rounds)?.base();
    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        if value == 0 {
            return Err(Error::invalid(format!("{} value must be positive", axis.name())));
        }
        let mut c = cfg.clone();
        match axis {
            AblationAxis::Hashes => c.sketch_rows = value as usize,
            AblationAxis::Rounds => c.rounds = value as usize,
            AblationAxis::Threshold => c.threshold_base = ThresholdBase::Explicit(base.saturating_mul(value)),
        }
        let run = run_on_graph(g, &c)?;
        if let Some(dir) = export_dir {
            std::fs::write(dir.join(format!("{}-{value}.svg", axis.name())), &run.svg)?;
        }
        let r = &run.report;
        rows.push(AblationRow {
            axis,
            value,
            threshold_base: r.threshold_base,
            time_ms: r.times.total_ms,
            detect_ms: r.times.detect_ms,
            layout_ms: r.times.layout_ms,
            supernodes: r.supernodes,
            superedges: r.superedges,
            modularity: r.modularity,
        });
    }
    Ok(rows)
}

pub fn write_ablation_tsv<W: std::io::Write>(rows: &[AblationRow], mut out: W) -> Result<()> {
    writeln!(out, "axis\tvalue\tthreshold_base\ttime_ms\tdetect_ms\tlayout_ms\tsupernodes\tsuperedges\tmodularity")?;
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{:.3}\t{:.3}\t{:.3}\t{}\t{}\t{:.6}",
            r.axis.name(),
            r.value,
            r.threshold_base,
            r.time_ms,
            r.detect_ms,
            r.layout_ms,
            r.supernodes,
            r.superedges,
            r.modularity
        )?;
    }
    Ok(())
}
