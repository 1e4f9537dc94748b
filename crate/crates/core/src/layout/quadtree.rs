//! Barnes-Hut quadtree for mass-weighted repulsion.

const NONE: u32 = u32::MAX;
/// Past this depth coincident bodies share one leaf instead of splitting.
const MAX_DEPTH: u32 = 40;

#[derive(Debug, Clone)]
struct Cell {
    cx: f64,
    cy: f64,
    half: f64,
    mass: f64,
    com: [f64; 2],
    children: [u32; 4],
    bodies: Vec<u32>,
    depth: u32,
}

impl Cell {
    fn new(cx: f64, cy: f64, half: f64, depth: u32) -> Self {
        Cell {
            cx,
            cy,
            half,
            mass: 0.0,
            com: [0.0; 2],
            children: [NONE; 4],
            bodies: Vec::new(),
            depth,
        }
    }

    fn is_leaf(&self) -> bool {
        self.children[0] == NONE
    }

    fn quadrant(&self, p: [f64; 2]) -> usize {
        (p[0] >= self.cx) as usize | (((p[1] >= self.cy) as usize) << 1)
    }

    fn contains(&self, p: [f64; 2]) -> bool {
        (p[0] - self.cx).abs() <= self.half && (p[1] - self.cy).abs() <= self.half
    }
}

/// Quadtree over the current positions. Each cell keeps its total mass and
/// centre of mass; a cell of width `s` at distance `d` from a body is treated
/// as a single body when `s / d < theta`. Cells containing the body itself are
/// always opened, so `theta = 0` gives the exact pairwise sum.
#[derive(Debug, Clone)]
pub struct BarnesHutTree {
    cells: Vec<Cell>,
    theta: f64,
}

impl BarnesHutTree {
    pub fn build(pos: &[[f64; 2]], mass: &[f64], theta: f64) -> Self {
        let (mut lo, mut hi) = ([0.0f64; 2], [0.0f64; 2]);
        if let Some(first) = pos.first() {
            lo = *first;
            hi = *first;
        }
        for p in pos {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let half = ((hi[0] - lo[0]).max(hi[1] - lo[1]) / 2.0).max(1e-9) * (1.0 + 1e-9);
        let root = Cell::new((lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0, half, 0);
        let mut tree = BarnesHutTree {
            cells: vec![root],
            theta,
        };
        for (i, &p) in pos.iter().enumerate() {
            tree.insert(i as u32, p, pos);
        }
        // children are always created after their parent
        for at in (0..tree.cells.len()).rev() {
            let (m, sx, sy) = if tree.cells[at].is_leaf() {
                tree.cells[at].bodies.iter().fold((0.0, 0.0, 0.0), |(m, x, y), &b| {
                    let w = mass[b as usize];
                    let p = pos[b as usize];
                    (m + w, x + w * p[0], y + w * p[1])
                })
            } else {
                tree.cells[at].children.iter().fold((0.0, 0.0, 0.0), |(m, x, y), &c| {
                    let c = &tree.cells[c as usize];
                    (m + c.mass, x + c.mass * c.com[0], y + c.mass * c.com[1])
                })
            };
            let cell = &mut tree.cells[at];
            cell.mass = m;
            if m > 0.0 {
                cell.com = [sx / m, sy / m];
            }
        }
        tree
    }

    fn insert(&mut self, body: u32, p: [f64; 2], pos: &[[f64; 2]]) {
        let mut at = 0usize;
        loop {
            if self.cells[at].is_leaf() {
                let c = &self.cells[at];
                if c.bodies.is_empty() || c.depth >= MAX_DEPTH {
                    self.cells[at].bodies.push(body);
                    return;
                }
                let resident = std::mem::take(&mut self.cells[at].bodies);
                self.subdivide(at);
                for r in resident {
                    let q = self.cells[at].quadrant(pos[r as usize]);
                    let child = self.cells[at].children[q] as usize;
                    self.cells[child].bodies.push(r);
                }
            }
            let q = self.cells[at].quadrant(p);
            at = self.cells[at].children[q] as usize;
        }
    }

    fn subdivide(&mut self, at: usize) {
        let (cx, cy, h, depth) = {
            let c = &self.cells[at];
            (c.cx, c.cy, c.half / 2.0, c.depth + 1)
        };
        let base = self.cells.len() as u32;
        for q in 0..4 {
            let x = if q & 1 == 1 { cx + h } else { cx - h };
            let y = if q & 2 == 2 { cy + h } else { cy - h };
            self.cells.push(Cell::new(x, y, h, depth));
        }
        self.cells[at].children = [base, base + 1, base + 2, base + 3];
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn total_mass(&self) -> f64 {
        self.cells[0].mass
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Approximate repulsion on body `i`: the sum over other bodies `j` of
    /// `k_r * m_i * m_j / d` along `p_i - p_j`.
    pub fn repulsion_on(&self, i: usize, pos: &[[f64; 2]], mass: &[f64], k_r: f64, eps: f64) -> [f64; 2] {
        let p = pos[i];
        let m = mass[i];
        let mut f = [0.0; 2];
        let mut stack = vec![0u32];
        while let Some(at) = stack.pop() {
            let c = &self.cells[at as usize];
            if c.mass == 0.0 {
                continue;
            }
            if c.is_leaf() {
                for &j in &c.bodies {
                    if j as usize != i {
                        let g = pair_force(p, pos[j as usize], m * mass[j as usize] * k_r, eps, i as u64, j as u64);
                        f[0] += g[0];
                        f[1] += g[1];
                    }
                }
                continue;
            }
            let dx = p[0] - c.com[0];
            let dy = p[1] - c.com[1];
            let d = (dx * dx + dy * dy).sqrt();
            if !c.contains(p) && 2.0 * c.half < self.theta * d {
                let g = pair_force(p, c.com, m * c.mass * k_r, eps, i as u64, u64::MAX - at as u64);
                f[0] += g[0];
                f[1] += g[1];
            } else {
                stack.extend_from_slice(&c.children);
            }
        }
        f
    }
}

/// Force on a body at `p` from a body at `q`: magnitude `strength / d` along
/// `p - q`. Points closer than `eps` are pushed apart along a direction
/// derived from the pair ids, antisymmetric in the two ids.
#[inline]
pub(crate) fn pair_force(p: [f64; 2], q: [f64; 2], strength: f64, eps: f64, a: u64, b: u64) -> [f64; 2] {
    let dx = p[0] - q[0];
    let dy = p[1] - q[1];
    let d2 = dx * dx + dy * dy;
    if d2 >= eps * eps {
        let s = strength / d2;
        return [s * dx, s * dy];
    }
    let u = jitter_direction(a, b);
    let s = strength / eps;
    [s * u[0], s * u[1]]
}

fn jitter_direction(a: u64, b: u64) -> [f64; 2] {
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut z = lo.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ hi.rotate_left(31);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    let angle = (z >> 11) as f64 / (1u64 << 53) as f64 * std::f64::consts::TAU;
    [sign * angle.cos(), sign * angle.sin()]
}
