//! ForceAtlas2 layout with Barnes-Hut repulsion and adaptive speed.
//!
//! One iteration builds a quadtree over the current positions, accumulates
//! gravity, mass-weighted repulsion and linear edge attraction into each
//! node's net force, adapts the global speed from total swing against total
//! effective traction, and moves every node by its local speed times its net
//! force (capped at `max_displacement`).
//!
//! Forces are gathered per node (repulsion from the tree, attraction from a
//! CSR adjacency), so each node's force is written by exactly one worker and
//! the result does not depend on the number of threads.

mod quadtree;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use quadtree::BarnesHutTree;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::supergraph::SuperGraph;

pub const DEFAULT_GRAVITY: f64 = 1.0;
pub const DEFAULT_REPULSION: f64 = 80.0;
pub const DEFAULT_THETA: f64 = 0.5;
pub const SUPERGRAPH_ITERATIONS: usize = 100;
pub const FULL_GRAPH_ITERATIONS: usize = 500;
pub const MAX_DISPLACEMENT: f64 = 10.0;
pub const COINCIDENT_EPS: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GravityForm {
    /// `-g * m * p`
    #[default]
    Linear,
    /// `-g * m * p / |p|`, constant magnitude towards the origin.
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttractionForm {
    /// `w * (p_j - p_i)`: a linear spring towards the neighbour.
    #[default]
    Linear,
    /// `(p_i - p_j) / |p_i - p_j|` per edge. Points away from the neighbour
    /// and never settles; kept only for side-by-side comparison.
    UnitAway,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpeedFormula {
    /// `s / (1 + sqrt(s * swing))`
    #[default]
    Product,
    /// `s / (1 + sqrt(s + swing))`
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutParams {
    pub gravity: f64,
    pub gravity_form: GravityForm,
    pub repulsion: f64,
    pub theta: f64,
    pub attraction: AttractionForm,
    pub speed_formula: SpeedFormula,
    pub max_displacement: f64,
    pub jitter_tolerance: f64,
    pub epsilon: f64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        LayoutParams {
            gravity: DEFAULT_GRAVITY,
            gravity_form: GravityForm::Linear,
            repulsion: DEFAULT_REPULSION,
            theta: DEFAULT_THETA,
            attraction: AttractionForm::Linear,
            speed_formula: SpeedFormula::Product,
            max_displacement: MAX_DISPLACEMENT,
            jitter_tolerance: 1.0,
            epsilon: COINCIDENT_EPS,
        }
    }
}

impl LayoutParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.gravity >= 0.0
            && self.gravity.is_finite()
            && self.repulsion > 0.0
            && self.repulsion.is_finite()
            && self.theta >= 0.0
            && self.max_displacement > 0.0
            && self.jitter_tolerance > 0.0
            && self.epsilon > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("layout parameters out of range: {self:?}")))
        }
    }
}

/// Weighted adjacency in CSR form. Every undirected edge appears in both
/// endpoints' lists.
#[derive(Debug, Clone)]
pub struct Springs {
    offsets: Vec<usize>,
    targets: Vec<(u32, f64)>,
}

impl Springs {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (u32, u32, f64)> + Clone) -> Result<Self> {
        let mut count = vec![0usize; n + 1];
        for (u, v, _) in edges.clone() {
            if u as usize >= n || v as usize >= n {
                return Err(Error::EndpointOutOfRange {
                    src: u,
                    dst: v,
                    node_count: n,
                });
            }
            count[u as usize + 1] += 1;
            count[v as usize + 1] += 1;
        }
        for i in 0..n {
            count[i + 1] += count[i];
        }
        let mut fill = count.clone();
        let mut targets = vec![(0u32, 0.0); count[n]];
        for (u, v, w) in edges {
            targets[fill[u as usize]] = (v, w);
            fill[u as usize] += 1;
            targets[fill[v as usize]] = (u, w);
            fill[v as usize] += 1;
        }
        Ok(Springs {
            offsets: count,
            targets,
        })
    }

    /// One unit spring per input edge (duplicates stack).
    pub fn from_graph(g: &Graph) -> Self {
        Self::new(g.node_count(), g.edges().iter().map(|&(u, v)| (u, v, 1.0)))
            .expect("graph edges are in range")
    }

    /// Superedges weighted by multiplicity, or by 1 when `unit` is set.
    pub fn from_supergraph(sg: &SuperGraph, unit: bool) -> Self {
        Self::new(
            sg.nodes().len(),
            sg.edges()
                .iter()
                .map(|e| (e.src, e.dst, if unit { 1.0 } else { e.multiplicity as f64 })),
        )
        .expect("superedge endpoints are in range")
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    fn neighbours(&self, i: usize) -> &[(u32, f64)] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutState {
    pub pos: Vec<[f64; 2]>,
    pub force: Vec<[f64; 2]>,
    pub prev_force: Vec<[f64; 2]>,
    pub mass: Vec<f64>,
    pub global_speed: f64,
    speed_efficiency: f64,
    iteration: usize,
}

/// Positions uniform in a square of side `sqrt(n)` centred at the origin;
/// unit masses.
pub fn init_layout(n: usize, seed: u64) -> Result<LayoutState> {
    if n == 0 {
        return Err(Error::invalid("layout needs at least one node"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = (n as f64).sqrt() / 2.0;
    let pos = (0..n)
        .map(|_| [rng.gen_range(-half..half), rng.gen_range(-half..half)])
        .collect();
    Ok(LayoutState::from_positions(pos, vec![1.0; n]))
}

impl LayoutState {
    pub fn from_positions(pos: Vec<[f64; 2]>, mass: Vec<f64>) -> Self {
        let n = pos.len();
        assert_eq!(n, mass.len(), "one mass per node");
        LayoutState {
            pos,
            force: vec![[0.0; 2]; n],
            prev_force: vec![[0.0; 2]; n],
            mass,
            global_speed: 1.0,
            speed_efficiency: 1.0,
            iteration: 0,
        }
    }

    pub fn with_masses(mut self, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != self.pos.len() || mass.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::invalid("masses must be positive, one per node"));
        }
        self.mass = mass;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn clear_forces(&mut self) {
        self.force.iter_mut().for_each(|f| *f = [0.0; 2]);
    }
}

pub fn apply_gravity(state: &mut LayoutState, gravity: f64, form: GravityForm) {
    let (pos, mass) = (&state.pos, &state.mass);
    state.force.par_iter_mut().enumerate().for_each(|(i, f)| {
        let p = pos[i];
        let scale = match form {
            GravityForm::Linear => gravity * mass[i],
            GravityForm::Unit => {
                let d = p[0].hypot(p[1]);
                if d == 0.0 {
                    return;
                }
                gravity * mass[i] / d
            }
        };
        f[0] -= scale * p[0];
        f[1] -= scale * p[1];
    });
}

pub fn apply_repulsion(state: &mut LayoutState, tree: &BarnesHutTree, k_r: f64, eps: f64) {
    let (pos, mass) = (&state.pos, &state.mass);
    state.force.par_iter_mut().enumerate().for_each(|(i, f)| {
        let r = tree.repulsion_on(i, pos, mass, k_r, eps);
        f[0] += r[0];
        f[1] += r[1];
    });
}

pub fn apply_attraction(state: &mut LayoutState, springs: &Springs, form: AttractionForm) {
    let pos = &state.pos;
    state.force.par_iter_mut().enumerate().for_each(|(i, f)| {
        let p = pos[i];
        for &(j, w) in springs.neighbours(i) {
            let q = pos[j as usize];
            match form {
                AttractionForm::Linear => {
                    f[0] += w * (q[0] - p[0]);
                    f[1] += w * (q[1] - p[1]);
                }
                AttractionForm::UnitAway => {
                    let d = (p[0] - q[0]).hypot(p[1] - q[1]);
                    if d > 0.0 {
                        f[0] += (p[0] - q[0]) / d;
                        f[1] += (p[1] - q[1]) / d;
                    }
                }
            }
        }
    });
}

fn swing(state: &LayoutState, i: usize) -> f64 {
    let (f, g) = (state.force[i], state.prev_force[i]);
    (f[0] - g[0]).hypot(f[1] - g[1])
}

/// Per-node speed factor; decreases strictly as the node's swing grows.
pub fn local_speed(state: &LayoutState, i: usize, formula: SpeedFormula) -> f64 {
    speed_for(state.global_speed, swing(state, i), formula)
}

fn speed_for(global: f64, swing: f64, formula: SpeedFormula) -> f64 {
    match formula {
        SpeedFormula::Product => global / (1.0 + (global * swing).sqrt()),
        SpeedFormula::Sum => global / (1.0 + (global + swing).sqrt()),
    }
}

/// Global speed rule of ForceAtlas2: compare mass-weighted swing with
/// mass-weighted effective traction and move the speed towards the jitter
/// tolerance target, rising by at most half per step.
fn update_global_speed(state: &mut LayoutState, jitter_tolerance: f64) -> (f64, f64) {
    let n = state.len() as f64;
    let mut total_swing = 0.0;
    let mut total_traction = 0.0;
    for i in 0..state.len() {
        let (f, g) = (state.force[i], state.prev_force[i]);
        total_swing += state.mass[i] * (f[0] - g[0]).hypot(f[1] - g[1]);
        total_traction += state.mass[i] * 0.5 * (f[0] + g[0]).hypot(f[1] + g[1]);
    }

    let estimated = 0.05 * n.sqrt();
    let min_jt = estimated.sqrt();
    let max_jt: f64 = 10.0;
    let mut jt = jitter_tolerance * min_jt.max(max_jt.min(estimated * total_traction / (n * n)));
    let min_efficiency = 0.05;

    if total_traction > 0.0 && total_swing / total_traction > 2.0 {
        if state.speed_efficiency > min_efficiency {
            state.speed_efficiency *= 0.5;
        }
        jt = jt.max(jitter_tolerance);
    }

    let target = if total_swing > 0.0 {
        jt * state.speed_efficiency * total_traction / total_swing
    } else {
        f64::INFINITY
    };

    if total_swing > jt * total_traction {
        if state.speed_efficiency > min_efficiency {
            state.speed_efficiency *= 0.7;
        }
    } else if state.global_speed < 1000.0 {
        state.speed_efficiency *= 1.3;
    }

    let max_rise = 0.5;
    let speed = state.global_speed;
    state.global_speed = speed + (target - speed).min(max_rise * speed);
    (total_swing, total_traction)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepStats {
    pub max_displacement: f64,
    pub global_speed: f64,
    pub total_swing: f64,
    pub total_traction: f64,
}

/// One full layout iteration.
pub fn iterate(state: &mut LayoutState, springs: &Springs, params: &LayoutParams) -> Result<StepStats> {
    if springs.node_count() != state.len() {
        return Err(Error::invalid("spring graph does not match layout size"));
    }
    state.clear_forces();
    let tree = BarnesHutTree::build(&state.pos, &state.mass, params.theta);
    apply_gravity(state, params.gravity, params.gravity_form);
    apply_repulsion(state, &tree, params.repulsion, params.epsilon);
    apply_attraction(state, springs, params.attraction);
    state.iteration += 1;

    if let Some(node) = state.force.iter().position(|f| !(f[0].is_finite() && f[1].is_finite())) {
        return Err(Error::NonFinite {
            iteration: state.iteration,
            node,
        });
    }

    let (total_swing, total_traction) = update_global_speed(state, params.jitter_tolerance);
    let global = state.global_speed;
    let (force, prev) = (&state.force, &state.prev_force);
    let formula = params.speed_formula;
    let cap = params.max_displacement;
    let max_displacement = state
        .pos
        .par_iter_mut()
        .enumerate()
        .map(|(i, p)| {
            let (f, g) = (force[i], prev[i]);
            let s = speed_for(global, (f[0] - g[0]).hypot(f[1] - g[1]), formula);
            let mut dx = s * f[0];
            let mut dy = s * f[1];
            let len = dx.hypot(dy);
            if len > cap {
                dx *= cap / len;
                dy *= cap / len;
            }
            p[0] += dx;
            p[1] += dy;
            dx.hypot(dy)
        })
        .reduce(|| 0.0, f64::max);

    if let Some(node) = state.pos.iter().position(|p| !(p[0].is_finite() && p[1].is_finite())) {
        return Err(Error::NonFinite {
            iteration: state.iteration,
            node,
        });
    }

    std::mem::swap(&mut state.force, &mut state.prev_force);
    state.clear_forces();

    Ok(StepStats {
        max_displacement,
        global_speed: global,
        total_swing,
        total_traction,
    })
}

/// Bounding-box diagonal of a point set.
pub fn diameter(pos: &[[f64; 2]]) -> f64 {
    let Some(first) = pos.first() else {
        return 0.0;
    };
    let (mut lo, mut hi) = (*first, *first);
    for p in pos {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (hi[0] - lo[0]).hypot(hi[1] - lo[1])
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutOutcome {
    pub positions: Vec<[f64; 2]>,
    pub iterations: usize,
    pub last_step: StepStats,
    pub diameter: f64,
}

pub fn run_layout(
    state: &mut LayoutState,
    springs: &Springs,
    params: &LayoutParams,
    iterations: usize,
) -> Result<LayoutOutcome> {
    params.validate()?;
    if iterations == 0 {
        return Err(Error::invalid("iterations must be at least 1"));
    }
    let mut last = None;
    for _ in 0..iterations {
        last = Some(iterate(state, springs, params)?);
    }
    Ok(LayoutOutcome {
        positions: state.pos.clone(),
        iterations,
        last_step: last.expect("at least one iteration"),
        diameter: diameter(&state.pos),
    })
}

/// Lays out a supergraph with supernode weights as masses.
pub fn layout_supergraph(
    sg: &SuperGraph,
    iterations: usize,
    params: &LayoutParams,
    seed: u64,
    unit_edges: bool,
) -> Result<LayoutOutcome> {
    let mass = sg.nodes().iter().map(|n| n.weight.max(1) as f64).collect();
    let mut state = init_layout(sg.nodes().len(), seed)?.with_masses(mass)?;
    run_layout(&mut state, &Springs::from_supergraph(sg, unit_edges), params, iterations)
}

/// Lays out the full graph with `degree + 1` as mass.
pub fn layout_graph(g: &Graph, iterations: usize, params: &LayoutParams, seed: u64) -> Result<LayoutOutcome> {
    let mass = g.degrees().iter().map(|&d| d as f64 + 1.0).collect();
    let mut state = init_layout(g.node_count(), seed)?.with_masses(mass)?;
    run_layout(&mut state, &Springs::from_graph(g), params, iterations)
}
