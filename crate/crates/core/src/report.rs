//! Run reports: full-precision JSON, a short text table, and an SVG drawing
//! of the realized graph.

use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use thiserror::Error;

use crate::fem::{fem_energy, fem_lambda1, FemError};
use crate::optimizer::{EdgeShape, Embeddability, Functional, Optimum, ProblemSpec};
use crate::spectral::lambda1;
use crate::topology::NodeRole;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub functional: Functional,
    pub elements_per_edge: usize,
    pub exact: f64,
    pub fem: f64,
    pub fem_coarse: f64,
    pub error: f64,
    pub error_coarse: f64,
    /// `error_coarse / error`; close to 4 for a second-order method.
    pub richardson_ratio: f64,
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("need at least 2 elements per edge, got {0}")]
    TooCoarse(usize),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error("exact eigenvalue unavailable: {0}")]
    Spectral(String),
}

/// Compares the exact value of the optimum with P1 finite elements at `n`
/// and `n/2` elements per edge.
pub fn oracle_check(opt: &Optimum, n: usize) -> Result<OracleComparison, OracleError> {
    if n < 4 {
        return Err(OracleError::TooCoarse(n));
    }
    let g = opt.graph();
    let (exact, fem, fem_coarse) = match opt.functional {
        Functional::Energy => (opt.energy, fem_energy(&g, n)?, fem_energy(&g, n / 2)?),
        Functional::Lambda1 => (
            lambda1(&g).map_err(|e| OracleError::Spectral(e.to_string()))?.lambda1,
            fem_lambda1(&g, n)?,
            fem_lambda1(&g, n / 2)?,
        ),
    };
    let error = (fem - exact).abs();
    let error_coarse = (fem_coarse - exact).abs();
    Ok(OracleComparison {
        functional: opt.functional,
        elements_per_edge: n,
        exact,
        fem,
        fem_coarse,
        error,
        error_coarse,
        richardson_ratio: error_coarse / error,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub spec: ProblemSpec,
    pub optimum: Optimum,
    pub oracle: Option<OracleComparison>,
    /// Wall-clock seconds. Left out of the JSON so reports are reproducible.
    #[serde(skip)]
    pub seconds: Option<f64>,
}

/// Writes every float in scientific notation with 17 significant digits,
/// which always parses back to the same value.
struct FullPrecision;

impl Formatter for FullPrecision {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes any value with [`FullPrecision`] floats.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

impl Report {
    pub fn to_json(&self) -> serde_json::Result<String> {
        to_json(self)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Report> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let opt = &self.optimum;
        let mut s = String::new();
        let name = match opt.functional {
            Functional::Energy => "energy",
            Functional::Lambda1 => "lambda1",
        };
        let _ = writeln!(s, "pins            {}", self.spec.pins.len());
        let _ = writeln!(s, "total length    {:.11e}", self.spec.total_length);
        let _ = writeln!(s, "topology        {}", opt.topology.code());
        let _ = writeln!(s, "{name:<16}{:.11e}", opt.value);
        if opt.functional == Functional::Lambda1 {
            let _ = writeln!(s, "energy          {:.11e}", opt.energy);
        }
        let _ = writeln!(
            s,
            "embedding       {}",
            match opt.embeddability {
                Embeddability::Embeddable => "embeddable",
                Embeddability::ImmersionOnly => "immersion only",
            }
        );
        for issue in &opt.embedding_issues {
            let _ = writeln!(s, "  {issue}");
        }
        let _ = writeln!(s, "max violation   {:.3e}", opt.placement.max_violation);
        let _ = writeln!(s, "audit           {}", if opt.audit.all_pass() { "pass" } else { "FAIL" });
        let _ = writeln!(s, "\n  edge  from    to   length              shape");
        for (e, (&(a, b), l)) in opt.topology.edges().iter().zip(&opt.lengths).enumerate() {
            let shape = match opt.edge_shapes.get(e) {
                Some(EdgeShape::Taut) => "taut",
                Some(EdgeShape::Slack) => "slack",
                None => "",
            };
            let _ = writeln!(s, "  {e:>4}  {:>4}  {:>4}   {l:.11e}  {shape}", label(opt, a), label(opt, b));
        }
        let _ = writeln!(s, "\n  vertex  position");
        for (v, p) in opt.placement.positions.iter().enumerate() {
            let coords: Vec<String> = p.iter().map(|x| format!("{x:.6}")).collect();
            let _ = writeln!(s, "  {:>6}  ({})", label(opt, v), coords.join(", "));
        }
        if let Some(o) = &self.oracle {
            let _ = writeln!(s, "\nfinite elements, {} per edge", o.elements_per_edge);
            let _ = writeln!(s, "  exact         {:.11e}", o.exact);
            let _ = writeln!(s, "  fem           {:.11e}", o.fem);
            let _ = writeln!(s, "  |error|       {:.3e}", o.error);
            let _ = writeln!(s, "  ratio         {:.4}", o.richardson_ratio);
        }
        if let Some(t) = self.seconds {
            let _ = writeln!(s, "\ntime            {t:.3} s");
        }
        s
    }
}

fn label(opt: &Optimum, v: usize) -> String {
    match opt.topology.roles()[v] {
        NodeRole::Dirichlet { pin } => format!("D{pin}"),
        NodeRole::Kirchhoff => format!("K{v}"),
        NodeRole::Neumann => "N".to_string(),
    }
}

const CANVAS: f64 = 480.0;
const MARGIN: f64 = 40.0;

/// Draws the placement in the plane of the first two coordinates: pins as
/// filled circles, taut edges as lines, slack edges as dashed arcs, and the
/// free leaf marked `N`.
pub fn to_svg(opt: &Optimum) -> String {
    let flat: Vec<(f64, f64)> = opt
        .placement
        .positions
        .iter()
        .map(|p| (p.first().copied().unwrap_or(0.0), p.get(1).copied().unwrap_or(0.0)))
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &flat {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-12);
    let scale = (CANVAS - 2.0 * MARGIN) / span;
    let cx = 0.5 * (x0 + x1);
    let cy = 0.5 * (y0 + y1);
    let map = |(x, y): (f64, f64)| (0.5 * CANVAS + (x - cx) * scale, 0.5 * CANVAS - (y - cy) * scale);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}">"#
    );
    let _ = writeln!(s, r#"  <rect width="100%" height="100%" fill="white"/>"#);
    for (e, (&(a, b), &l)) in opt.topology.edges().iter().zip(&opt.lengths).enumerate() {
        let (p, q) = (map(flat[a]), map(flat[b]));
        if opt.edge_shapes.get(e) == Some(&EdgeShape::Slack) {
            let (dx, dy) = (q.0 - p.0, q.1 - p.1);
            let chord = dx.hypot(dy);
            let length = l * scale;
            // a parabolic arc of sag h over chord c is about c + 8h²/3c long
            let (nx, ny, sag) = if chord > 1e-9 {
                (-dy / chord, dx / chord, (3.0 * chord * (length - chord).max(0.0) / 8.0).sqrt())
            } else {
                (0.0, -1.0, 0.5 * length)
            };
            let c = (0.5 * (p.0 + q.0) + 2.0 * sag * nx, 0.5 * (p.1 + q.1) + 2.0 * sag * ny);
            let _ = writeln!(
                s,
                r#"  <path d="M {:.3} {:.3} Q {:.3} {:.3} {:.3} {:.3}" fill="none" stroke="black" stroke-width="2" stroke-dasharray="6 4"/>"#,
                p.0, p.1, c.0, c.1, q.0, q.1
            );
        } else {
            let _ = writeln!(
                s,
                r#"  <line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-width="2"/>"#,
                p.0, p.1, q.0, q.1
            );
        }
    }
    for (v, role) in opt.topology.roles().iter().enumerate() {
        let (x, y) = map(flat[v]);
        match role {
            NodeRole::Dirichlet { .. } => {
                let _ = writeln!(s, r#"  <circle cx="{x:.3}" cy="{y:.3}" r="6" fill="black"/>"#);
            }
            NodeRole::Kirchhoff => {
                let _ = writeln!(s, r#"  <circle cx="{x:.3}" cy="{y:.3}" r="3" fill="gray"/>"#);
            }
            NodeRole::Neumann => {
                let _ = writeln!(
                    s,
                    r#"  <circle cx="{x:.3}" cy="{y:.3}" r="5" fill="white" stroke="black" stroke-width="1.5"/>"#
                );
                let _ = writeln!(
                    s,
                    r#"  <text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="14">N</text>"#,
                    x + 8.0,
                    y - 8.0
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}
