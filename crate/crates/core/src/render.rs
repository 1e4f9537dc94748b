//! Size-rank coloring, radii and SVG export.
//!
//! The lightest communities holding up to half of the total weight share one
//! muted color; everything heavier is split by rank into ten equal-count
//! classes so the palette reads as a size legend.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::community::CommunityAssignment;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::supergraph::SuperGraph;

pub const CLASS_COUNT: usize = 11;
pub const BROWN: u8 = 0;
pub const TOP_CLASS: u8 = 10;

/// Paired qualitative scheme minus its yellow, brown first.
pub const DEFAULT_PALETTE: [&str; CLASS_COUNT] = [
    "#b15928", // brown
    "#cab2d6", // light purple
    "#6a3d9a", // purple
    "#fdbf6f", // light orange
    "#ff7f00", // orange
    "#fb9a99", // light red
    "#e31a1c", // red
    "#b2df8a", // light green
    "#33a02c", // green
    "#a6cee3", // light blue
    "#1f78b4", // blue
];

/// Largest radius as a fraction of the layout diameter.
pub const MAX_RADIUS_FRACTION: f64 = 0.03;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Palette {
    colors: Vec<String>,
}

impl Default for Palette {
    fn default() -> Self {
        Palette {
            colors: DEFAULT_PALETTE.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl Palette {
    /// Eleven `#rrggbb` colors, brown pool first.
    pub fn new<S: AsRef<str>>(colors: &[S]) -> Result<Self> {
        if colors.len() != CLASS_COUNT {
            return Err(Error::invalid(format!(
                "palette needs {CLASS_COUNT} colors, got {}",
                colors.len()
            )));
        }
        let mut out = Vec::with_capacity(CLASS_COUNT);
        for c in colors {
            let c = c.as_ref().trim();
            let hex = c.strip_prefix('#').unwrap_or("");
            if hex.len() != 6 || !hex.chars().all(|ch| ch.is_ascii_hexdigit()) {
                return Err(Error::invalid(format!("not a #rrggbb color: {c:?}")));
            }
            out.push(c.to_ascii_lowercase());
        }
        Ok(Palette { colors: out })
    }

    pub fn hex(&self, class: u8) -> &str {
        &self.colors[class as usize]
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorAssignment {
    classes: Vec<u8>,
    palette: Palette,
}

impl ColorAssignment {
    pub fn classes(&self) -> &[u8] {
        &self.classes
    }

    pub fn class(&self, i: usize) -> u8 {
        self.classes[i]
    }

    pub fn hex(&self, i: usize) -> &str {
        self.palette.hex(self.classes[i])
    }

    pub fn palette(&self) -> &Palette {
        &self.palette
    }

    pub fn with_palette(mut self, palette: Palette) -> Self {
        self.palette = palette;
        self
    }
}

/// Classes for the given weights: the longest ascending prefix whose total
/// is at most half of all weight becomes class 0, the rest is split by rank
/// into ten equal-count groups with any remainder going to the heaviest.
/// A lone supernode is always the top class.
pub fn assign_colors(weights: &[u64]) -> Result<ColorAssignment> {
    if weights.is_empty() {
        return Err(Error::invalid("no supernodes to color"));
    }
    let n = weights.len();
    let mut classes = vec![BROWN; n];
    if n == 1 {
        classes[0] = TOP_CLASS;
        return Ok(ColorAssignment {
            classes,
            palette: Palette::default(),
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (weights[i], i));

    let alpha: u128 = weights.iter().map(|&w| w as u128).sum();
    let mut cum: u128 = 0;
    let mut pool = 0;
    for &i in &order {
        if 2 * (cum + weights[i] as u128) > alpha {
            break;
        }
        cum += weights[i] as u128;
        pool += 1;
    }

    let rest = n - pool;
    let groups = TOP_CLASS as usize;
    let base = rest / groups;
    let extra = rest % groups;
    let mut at = pool;
    for g in 1..=groups {
        let size = base + usize::from(g > groups - extra);
        for &i in &order[at..at + size] {
            classes[i] = g as u8;
        }
        at += size;
    }
    Ok(ColorAssignment {
        classes,
        palette: Palette::default(),
    })
}

/// Per-node class in the full graph, taken from the node's supernode.
pub fn color_full_graph(
    g: &Graph,
    a: &CommunityAssignment,
    sg: &SuperGraph,
    ca: &ColorAssignment,
) -> Result<Vec<u8>> {
    if a.labels().len() != g.node_count() || ca.classes().len() != sg.nodes().len() {
        return Err(Error::invalid("assignment, supergraph and colors disagree in size"));
    }
    a.labels()
        .iter()
        .enumerate()
        .map(|(v, &label)| {
            sg.index_of(label)
                .map(|i| ca.class(i))
                .ok_or(Error::UnresolvedLabel { node: v, label })
        })
        .collect()
}

/// `r = scale * sqrt(weight)`, with the scale chosen so the heaviest node's
/// radius is a fixed fraction of the layout diameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusScale {
    pub scale: f64,
}

impl RadiusScale {
    pub fn fit(weights: &[u64], diameter: f64) -> Self {
        let max = weights.iter().copied().max().unwrap_or(0);
        let span = if diameter > 0.0 { diameter } else { 1.0 };
        let scale = if max == 0 {
            0.0
        } else {
            MAX_RADIUS_FRACTION * span / (max as f64).sqrt()
        };
        RadiusScale { scale }
    }

    pub fn radius(&self, weight: u64) -> f64 {
        self.scale * (weight as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvgOptions {
    /// Canvas side in pixels.
    pub size: f64,
    /// Margin on each side as a fraction of the canvas.
    pub margin: f64,
    pub draw_edges: bool,
    pub min_radius_px: f64,
    pub edge_color: String,
    pub max_edge_opacity: f64,
    pub background: Option<String>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            size: 1000.0,
            margin: 0.05,
            draw_edges: true,
            min_radius_px: 0.5,
            edge_color: "#888888".into(),
            max_edge_opacity: 0.6,
            background: Some("#ffffff".into()),
        }
    }
}

/// Everything needed to draw one picture. Nodes with weight 0 are skipped.
#[derive(Debug, Clone, Copy)]
pub struct Scene<'a> {
    pub positions: &'a [[f64; 2]],
    pub weights: &'a [u64],
    pub radii: &'a [f64],
    pub classes: &'a [u8],
    /// `(a, b, multiplicity)` by node index.
    pub edges: &'a [(u32, u32, u64)],
    pub palette: &'a Palette,
}

impl Scene<'_> {
    fn check(&self) -> Result<()> {
        let n = self.positions.len();
        if self.weights.len() != n || self.radii.len() != n || self.classes.len() != n {
            return Err(Error::invalid("scene arrays differ in length"));
        }
        if let Some(node) = self
            .positions
            .iter()
            .zip(self.radii)
            .position(|(p, r)| !(p[0].is_finite() && p[1].is_finite() && r.is_finite()))
        {
            return Err(Error::NonFinite { iteration: 0, node });
        }
        if self.classes.iter().any(|&c| c as usize >= CLASS_COUNT) {
            return Err(Error::invalid("color class out of range"));
        }
        if self
            .edges
            .iter()
            .any(|&(a, b, _)| a as usize >= n || b as usize >= n)
        {
            return Err(Error::invalid("scene edge endpoint out of range"));
        }
        Ok(())
    }

    fn drawn(&self, i: usize) -> bool {
        self.weights[i] > 0
    }

    /// Node indices in painter's order: lower classes first, then lighter.
    pub fn paint_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.positions.len()).filter(|&i| self.drawn(i)).collect();
        order.sort_by_key(|&i| (self.classes[i], self.weights[i], i));
        order
    }
}

struct Frame {
    cx: f64,
    cy: f64,
    k: f64,
    half: f64,
}

impl Frame {
    fn fit(scene: &Scene, opts: &SvgOptions) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for i in (0..scene.positions.len()).filter(|&i| scene.drawn(i)) {
            let (p, r) = (scene.positions[i], scene.radii[i]);
            for k in 0..2 {
                lo[k] = lo[k].min(p[k] - r);
                hi[k] = hi[k].max(p[k] + r);
            }
        }
        if lo[0] > hi[0] {
            lo = [0.0; 2];
            hi = [0.0; 2];
        }
        let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        let extent = if extent > 0.0 { extent } else { 1.0 };
        Frame {
            cx: (lo[0] + hi[0]) / 2.0,
            cy: (lo[1] + hi[1]) / 2.0,
            k: opts.size * (1.0 - 2.0 * opts.margin) / extent,
            half: opts.size / 2.0,
        }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (self.half + (p[0] - self.cx) * self.k, self.half - (p[1] - self.cy) * self.k)
    }
}

/// Writes the scene as an SVG 1.1 document. Output bytes depend only on the
/// inputs.
pub fn export_svg<W: Write>(scene: &Scene, opts: &SvgOptions, mut out: W) -> Result<()> {
    scene.check()?;
    if !(opts.size > 0.0 && (0.0..0.5).contains(&opts.margin)) {
        return Err(Error::invalid("canvas size must be positive and margin below one half"));
    }
    let frame = Frame::fit(scene, opts);
    let mut s = String::new();
    let size = opts.size;
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size:.0}" height="{size:.0}" viewBox="0 0 {size:.0} {size:.0}">"#
    )
    .unwrap();
    if let Some(bg) = &opts.background {
        writeln!(s, r#"<rect width="100%" height="100%" fill="{bg}"/>"#).unwrap();
    }

    if opts.draw_edges {
        let drawn: Vec<_> = scene
            .edges
            .iter()
            .filter(|&&(a, b, m)| m > 0 && scene.drawn(a as usize) && scene.drawn(b as usize))
            .collect();
        if let Some(max) = drawn.iter().map(|e| e.2).max() {
            writeln!(s, r#"<g stroke="{}" stroke-width="0.5" fill="none">"#, opts.edge_color).unwrap();
            for &&(a, b, m) in &drawn {
                let (x1, y1) = frame.map(scene.positions[a as usize]);
                let (x2, y2) = frame.map(scene.positions[b as usize]);
                let opacity = opts.max_edge_opacity * m as f64 / max as f64;
                writeln!(
                    s,
                    r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke-opacity="{opacity:.4}"/>"#
                )
                .unwrap();
            }
            writeln!(s, "</g>").unwrap();
        }
    }

    writeln!(s, r#"<g stroke="none">"#).unwrap();
    for i in scene.paint_order() {
        let (x, y) = frame.map(scene.positions[i]);
        let r = (scene.radii[i] * frame.k).max(opts.min_radius_px);
        let fill = scene.palette.hex(scene.classes[i]);
        writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{r:.3}" fill="{fill}"/>"#).unwrap();
    }
    writeln!(s, "</g>").unwrap();
    writeln!(s, "</svg>").unwrap();
    out.write_all(s.as_bytes())?;
    Ok(())
}

/// Sidecar table in layout coordinates: id, x, y, radius, class, hex.
pub fn write_nodes_tsv<W: Write>(ids: &[i64], scene: &Scene, mut out: W) -> Result<()> {
    scene.check()?;
    if ids.len() != scene.positions.len() {
        return Err(Error::invalid("one id per scene node required"));
    }
    writeln!(out, "id\tx\ty\tradius\tclass\thex")?;
    for (i, id) in ids.iter().enumerate() {
        let p = scene.positions[i];
        let c = scene.classes[i];
        writeln!(
            out,
            "{}\t{:.6}\t{:.6}\t{:.6}\t{}\t{}",
            id,
            p[0],
            p[1],
            scene.radii[i],
            c,
            scene.palette.hex(c)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_five_smallest_are_brown() {
        let ca = assign_colors(&[5, 5, 10, 10, 20, 50]).unwrap();
        assert_eq!(ca.classes(), &[0, 0, 0, 0, 0, 10]);
        assert_eq!(ca.hex(5), "#1f78b4");
        assert_eq!(ca.hex(0), "#b15928");
    }

    #[test]
    fn equal_weights_22() {
        let ca = assign_colors(&[7; 22]).unwrap();
        let brown = ca.classes().iter().filter(|&&c| c == 0).count();
        assert_eq!(brown, 11);
        let mut per = [0; CLASS_COUNT];
        for &c in ca.classes() {
            per[c as usize] += 1;
        }
        assert!(per[1..].iter().all(|&k| k == 1 || k == 2));
        assert_eq!(per[10], 2);
    }

    #[test]
    fn single_supernode_is_top() {
        assert_eq!(assign_colors(&[3]).unwrap().classes(), &[TOP_CLASS]);
        assert!(assign_colors(&[]).is_err());
    }

    #[test]
    fn remainder_goes_to_heaviest() {
        // the six lightest fill the pool; seven remain for ten classes
        let w: Vec<u64> = (0..13).map(|i| 100 + i).collect();
        let ca = assign_colors(&w).unwrap();
        let brown = ca.classes().iter().filter(|&&c| c == 0).count();
        let rest = 13 - brown;
        let mut per = [0usize; CLASS_COUNT];
        for &c in ca.classes() {
            per[c as usize] += 1;
        }
        let base = rest / 10;
        for (g, &k) in per.iter().enumerate().skip(1) {
            assert_eq!(k, base + usize::from(g > 10 - rest % 10));
        }
    }

    #[test]
    fn palette_validation() {
        assert!(Palette::new(&["#000000"; 10]).is_err());
        assert!(Palette::new(&["#00000g"; 11]).is_err());
        let p = Palette::new(&["#ABCDEF"; 11]).unwrap();
        assert_eq!(p.hex(3), "#abcdef");
    }

    #[test]
    fn radius_rules() {
        let s = RadiusScale::fit(&[16, 4, 1], 100.0);
        assert!((s.radius(16) / s.radius(4) - 2.0).abs() < 1e-12);
        assert!((s.radius(16) - 3.0).abs() < 1e-12);
        let area = |w| s.radius(w).powi(2);
        assert!((area(16) / area(4) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn color_full_graph_resolves() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3), (1, 2)]).unwrap();
        let a = CommunityAssignment::from_labels(vec![1, 1, 3, 3]).unwrap();
        let sketch = crate::sketch::CountMinSketch::new(2, 64, 1).unwrap();
        crate::supergraph::accumulate_sizes(&g, &a, &sketch).unwrap();
        let sg = crate::supergraph::contract(&g, &a, &sketch).unwrap();
        let ca = assign_colors(&sg.weights()).unwrap();
        let colors = color_full_graph(&g, &a, &sg, &ca).unwrap();
        assert_eq!(colors[0], colors[1]);
        assert_eq!(colors[2], colors[3]);

        let other = CommunityAssignment::from_labels(vec![0, 0, 3, 3]).unwrap();
        assert!(matches!(
            color_full_graph(&g, &other, &sg, &ca),
            Err(Error::UnresolvedLabel { node: 0, label: 0 })
        ));
    }

    fn one_node_svg() -> String {
        let palette = Palette::default();
        let scene = Scene {
            positions: &[[4.0, -2.0]],
            weights: &[9],
            radii: &[0.5],
            classes: &[TOP_CLASS],
            edges: &[],
            palette: &palette,
        };
        let mut buf = Vec::new();
        export_svg(&scene, &SvgOptions::default(), &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn single_node_svg_is_centred() {
        let svg = one_node_svg();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.contains(r#"cx="500.000" cy="500.000""#), "{svg}");
    }

    #[test]
    fn zero_weight_nodes_are_not_drawn() {
        let palette = Palette::default();
        let scene = Scene {
            positions: &[[0.0, 0.0], [1.0, 1.0], [2.0, 0.0]],
            weights: &[3, 0, 5],
            radii: &[0.1, 0.0, 0.1],
            classes: &[0, 0, 10],
            edges: &[(0, 1, 4), (0, 2, 2)],
            palette: &palette,
        };
        let mut buf = Vec::new();
        export_svg(&scene, &SvgOptions::default(), &mut buf).unwrap();
        let svg = String::from_utf8(buf).unwrap();
        assert_eq!(svg.matches("<circle").count(), 2);
        assert_eq!(svg.matches("<line").count(), 1);
        assert_eq!(scene.paint_order(), vec![0, 2]);
    }

    #[test]
    fn tsv_sidecar() {
        let palette = Palette::default();
        let scene = Scene {
            positions: &[[1.0, 2.0]],
            weights: &[4],
            radii: &[0.25],
            classes: &[10],
            edges: &[],
            palette: &palette,
        };
        let mut buf = Vec::new();
        write_nodes_tsv(&[42], &scene, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "id\tx\ty\tradius\tclass\thex\n42\t1.000000\t2.000000\t0.250000\t10\t#1f78b4\n"
        );
    }

    #[test]
    fn non_finite_scene_rejected() {
        let palette = Palette::default();
        let scene = Scene {
            positions: &[[f64::NAN, 0.0]],
            weights: &[1],
            radii: &[1.0],
            classes: &[0],
            edges: &[],
            palette: &palette,
        };
        assert!(export_svg(&scene, &SvgOptions::default(), Vec::new()).is_err());
    }
}
