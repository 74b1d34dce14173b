//! Tabulated curves and surfaces for plotting.
//!
//! Grids span the closed support with `resolution` points per axis. Output is
//! comma-separated with a header row and LF line endings, each number in its
//! shortest round-trip form; 2D grids are row-major in the first coordinate.
//! Values are computed in parallel but always emitted in index order.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::first_mover::FirstMoverKernel;
use crate::pricing::{marginal_pdf, Seller};
use crate::strategy::DecisionModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GridKind {
    /// `v,h`: the no-guessing strategy function.
    HCurve,
    /// `v,w,value`: the guessing strategy function.
    HSurface,
    /// `v,w,value`: joint density of the low and high prices.
    JointPdf,
    /// `v,w,value`: probability that the low-price seller moves first.
    PSurface,
    /// `x,f_low,f_high`: marginal price densities.
    Marginals,
}

impl GridKind {
    pub const ALL: [GridKind; 5] = [
        GridKind::HCurve,
        GridKind::HSurface,
        GridKind::JointPdf,
        GridKind::PSurface,
        GridKind::Marginals,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GridKind::HCurve => "h-curve",
            GridKind::HSurface => "h-surface",
            GridKind::JointPdf => "joint-pdf",
            GridKind::PSurface => "p-surface",
            GridKind::Marginals => "marginals",
        }
    }

    pub fn header(self) -> &'static [&'static str] {
        match self {
            GridKind::HCurve => &["v", "h"],
            GridKind::Marginals => &["x", "f_low", "f_high"],
            _ => &["v", "w", "value"],
        }
    }

    pub fn is_surface(self) -> bool {
        self.header().len() == 3 && self != GridKind::Marginals
    }
}

impl fmt::Display for GridKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GridKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GridKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = GridKind::ALL.iter().map(|k| k.name()).collect();
                Error::InvalidParameter(format!(
                    "unknown grid {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub kind: GridKind,
    pub rows: Vec<Vec<f64>>,
}

impl Grid {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", self.kind.header().join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        out.flush()
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn write_file(&self, path: &Path) -> std::io::Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

pub fn compute_grid<K: FirstMoverKernel>(
    model: &DecisionModel<K>,
    kind: GridKind,
    resolution: usize,
) -> Result<Grid> {
    if resolution < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid resolution must be at least 2, got {resolution}"
        )));
    }
    let axis = model.market().range.grid(resolution);
    let rows = if kind.is_surface() {
        (0..resolution * resolution)
            .into_par_iter()
            .map(|k| {
                let (v, w) = (axis[k / resolution], axis[k % resolution]);
                let value = match kind {
                    GridKind::HSurface => model.h_surface(v, w)?,
                    GridKind::JointPdf => model.joint(v, w)?,
                    _ => model.first_mover().prob(v, w)?,
                };
                Ok(vec![v, w, value])
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        axis.par_iter()
            .map(|&x| match kind {
                GridKind::HCurve => Ok(vec![x, model.h_curve(x)?]),
                _ => {
                    let (market, quad) = (model.market(), model.quad());
                    Ok(vec![
                        x,
                        marginal_pdf(x, Seller::Low, market, quad)?,
                        marginal_pdf(x, Seller::High, market, quad)?,
                    ])
                }
            })
            .collect::<Result<Vec<_>>>()?
    };
    Ok(Grid { kind, rows })
}
