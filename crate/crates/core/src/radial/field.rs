use num_complex::Complex64;
use std::io::{BufRead, Write};
use std::sync::Arc;

use super::grid::{GridMap, RadialGrid};
use crate::error::{Error, Result};

/// Complex samples of a radial profile on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<Complex64>,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values
            .iter()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::InvalidParameter(
                "field has non-finite entries".into(),
            ));
        }
        Ok(RadialField { grid, values })
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let n = grid.len();
        RadialField {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.r().iter().map(|&r| f(r)).collect();
        RadialField { grid, values }
    }

    pub fn from_real(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |r| Complex64::new(f(r), 0.0))
    }

    pub fn gaussian(grid: Arc<RadialGrid>, amplitude: f64, width: f64) -> Self {
        Self::from_real(grid, |r| amplitude * (-r * r / (2.0 * width * width)).exp())
    }

    /// `A r^{-rho} exp(-r^2 / (2 w^2))`: a Gaussian in the regular variable, so the field has the
    /// same behaviour at the origin as the bound states of `L_a`.
    pub fn regular_gaussian(grid: Arc<RadialGrid>, a: f64, amplitude: f64, width: f64) -> Self {
        let rho = crate::model::rho(grid.dim(), a);
        Self::from_real(grid, |r| {
            amplitude * r.powf(-rho) * (-r * r / (2.0 * width * width)).exp()
        })
    }

    pub(crate) fn from_parts_unchecked(grid: Arc<RadialGrid>, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        RadialField { grid, values }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        RadialField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn scaled_re(&self, c: f64) -> Self {
        self.scaled(Complex64::new(c, 0.0))
    }

    pub fn conj(&self) -> Self {
        RadialField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn sub(&self, other: &RadialField) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(RadialField {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn check_same_grid(&self, other: &RadialField) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_layout(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch("fields live on different grids".into()))
        }
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Ratio `|u(r_max)| / max |u|`; zero for the zero field.
    pub fn tail_ratio(&self) -> f64 {
        let peak = self.linf();
        if peak == 0.0 {
            0.0
        } else {
            self.values.last().map_or(0.0, |v| v.norm()) / peak
        }
    }

    /// Two-column-pair text format: a `#` header with grid metadata, then `r re im` rows.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let g = &self.grid;
        writeln!(w, "# inls radial field")?;
        writeln!(w, "# dim = {}", g.dim())?;
        writeln!(w, "# points = {}", g.len())?;
        writeln!(w, "# r_max = {:.17e}", g.r_max())?;
        match g.map() {
            GridMap::Uniform => writeln!(w, "# map = uniform")?,
            GridMap::Clustered { kappa, ell } => {
                writeln!(w, "# map = clustered {kappa:.17e} {ell:.17e}")?
            }
        }
        writeln!(w, "# columns = r re im")?;
        for (r, v) in g.r().iter().zip(&self.values) {
            writeln!(w, "{:.17e} {:.17e} {:.17e}", r, v.re, v.im)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut dim = None;
        let mut points = None;
        let mut r_max = None;
        let mut map = GridMap::Uniform;
        let mut rows: Vec<(f64, Complex64)> = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            let bad = |what: &str| Error::Parse(format!("line {}: {what}", lineno + 1));
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(h) = t.strip_prefix('#') {
                if let Some((k, v)) = h.split_once('=') {
                    let v = v.trim();
                    match k.trim() {
                        "dim" => dim = Some(v.parse::<u32>().map_err(|_| bad("bad dim"))?),
                        "points" => {
                            points = Some(v.parse::<usize>().map_err(|_| bad("bad points"))?)
                        }
                        "r_max" => r_max = Some(v.parse::<f64>().map_err(|_| bad("bad r_max"))?),
                        "map" => {
                            let parts: Vec<&str> = v.split_whitespace().collect();
                            map = match parts.as_slice() {
                                ["uniform"] => GridMap::Uniform,
                                ["clustered", k, l] => GridMap::Clustered {
                                    kappa: k.parse().map_err(|_| bad("bad kappa"))?,
                                    ell: l.parse().map_err(|_| bad("bad ell"))?,
                                },
                                _ => return Err(bad("unknown grid map")),
                            };
                        }
                        _ => {}
                    }
                }
                continue;
            }
            let cols: Vec<f64> = t
                .split_whitespace()
                .map(|c| c.parse::<f64>().map_err(|_| bad("non-numeric column")))
                .collect::<Result<_>>()?;
            if cols.len() != 3 {
                return Err(bad("expected 3 columns"));
            }
            rows.push((cols[0], Complex64::new(cols[1], cols[2])));
        }
        let dim = dim.ok_or_else(|| Error::Parse("missing dim header".into()))?;
        let points = points.unwrap_or(rows.len());
        let r_max = r_max.ok_or_else(|| Error::Parse("missing r_max header".into()))?;
        if points != rows.len() {
            return Err(Error::Parse(format!(
                "header says {points} points, found {}",
                rows.len()
            )));
        }
        let grid = Arc::new(RadialGrid::new(dim, points, r_max, map)?);
        for (j, ((r, _), rg)) in rows.iter().zip(grid.r()).enumerate() {
            if (r - rg).abs() > 1e-12 * rg.max(1.0) {
                return Err(Error::Parse(format!(
                    "row {}: radius {r} does not match grid node {rg}",
                    j + 1
                )));
            }
        }
        RadialField::new(grid, rows.into_iter().map(|(_, v)| v).collect())
    }
}
