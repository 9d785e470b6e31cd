//! File formats: the self-describing signal container, CSV import/export
//! for signals and coefficients, and dense-matrix CSV dumps.
//!
//! All floating-point output uses 17 significant digits so records
//! round-trip exactly.

use crate::error::{Error, Result};
use crate::expansion::{AxisIndex, HaarExpansion};
use crate::geometry::Shape;
use crate::signal::GridSignal;
use std::io::{BufRead, Write};

/// Render a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write the native signal container:
/// a `torushaar-signal v1` header with `nparams`, per-axis `depths` and the
/// `values` count, followed by one row-major cell value per line.
pub fn write_signal(w: &mut impl Write, sig: &GridSignal) -> Result<()> {
    let shape = sig.shape();
    writeln!(w, "torushaar-signal v1")?;
    writeln!(w, "nparams {}", shape.n_params())?;
    let depths: Vec<String> = shape.depths().iter().map(|d| d.to_string()).collect();
    writeln!(w, "depths {}", depths.join(" "))?;
    writeln!(w, "values {}", shape.cells())?;
    for v in sig.values() {
        writeln!(w, "{}", fmt_f64(*v))?;
    }
    Ok(())
}

pub fn read_signal(r: &mut impl BufRead) -> Result<GridSignal> {
    let mut lines = r.lines();
    let mut next = || -> Result<String> {
        lines
            .next()
            .ok_or_else(|| Error::Parse("unexpected end of signal file".into()))?
            .map_err(Error::Io)
    };
    let header = next()?;
    if header.trim() != "torushaar-signal v1" {
        return Err(Error::Parse(format!("unknown signal header: {header}")));
    }
    let nparams_line = next()?;
    let n_params: usize = nparams_line
        .strip_prefix("nparams ")
        .ok_or_else(|| Error::Parse("missing nparams".into()))?
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("nparams: {e}")))?;
    let depths_line = next()?;
    let depths: Vec<usize> = depths_line
        .strip_prefix("depths ")
        .ok_or_else(|| Error::Parse("missing depths".into()))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|e| Error::Parse(format!("depth: {e}"))))
        .collect::<Result<_>>()?;
    if depths.len() != n_params {
        return Err(Error::Parse("depth count does not match nparams".into()));
    }
    let count_line = next()?;
    let count: usize = count_line
        .strip_prefix("values ")
        .ok_or_else(|| Error::Parse("missing values count".into()))?
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("values: {e}")))?;
    let shape = Shape::new(depths)?;
    if count != shape.cells() {
        return Err(Error::Parse(format!(
            "declared {count} values but the shape holds {}",
            shape.cells()
        )));
    }
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        let line = next()?;
        values.push(
            line.trim().parse::<f64>().map_err(|e| Error::Parse(format!("value: {e}")))?,
        );
    }
    GridSignal::from_values(shape, values)
}

/// Signal as CSV: header `i0,…,i{n-1},value`, one row per cell.
pub fn write_signal_csv(w: &mut impl Write, sig: &GridSignal) -> Result<()> {
    let shape = sig.shape();
    let header: Vec<String> = (0..shape.n_params()).map(|l| format!("i{l}")).collect();
    writeln!(w, "{},value", header.join(","))?;
    for (flat, v) in sig.values().iter().enumerate() {
        let idx = shape.unflatten(flat);
        let cols: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
        writeln!(w, "{},{}", cols.join(","), fmt_f64(*v))?;
    }
    Ok(())
}

pub fn read_signal_csv(r: &mut impl BufRead, shape: &Shape) -> Result<GridSignal> {
    let mut sig = GridSignal::zeros(shape.clone());
    let mut seen = vec![false; shape.cells()];
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        if lineno == 0 || line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.trim().split(',').collect();
        if parts.len() != shape.n_params() + 1 {
            return Err(Error::Parse(format!("row {lineno}: wrong column count")));
        }
        let idx: Vec<usize> = parts[..shape.n_params()]
            .iter()
            .map(|t| t.parse().map_err(|e| Error::Parse(format!("row {lineno}: {e}"))))
            .collect::<Result<_>>()?;
        for (l, &i) in idx.iter().enumerate() {
            if i >= shape.axis_dim(l) {
                return Err(Error::Parse(format!("row {lineno}: index out of range")));
            }
        }
        let value: f64 = parts[shape.n_params()]
            .parse()
            .map_err(|e| Error::Parse(format!("row {lineno}: {e}")))?;
        let flat = shape.flat_index(&idx);
        sig.values_mut()[flat] = value;
        seen[flat] = true;
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::Parse("missing cells in CSV".into()));
    }
    Ok(sig)
}

fn axis_token(ix: &AxisIndex) -> String {
    match ix {
        AxisIndex::Mean => "mean".into(),
        AxisIndex::Interval(iv) => format!("{}:{}", iv.level(), iv.offset()),
    }
}

fn parse_axis_token(tok: &str) -> Result<AxisIndex> {
    if tok == "mean" {
        return Ok(AxisIndex::Mean);
    }
    let (lvl, off) = tok
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("bad axis token {tok}")))?;
    let level = lvl.parse().map_err(|e| Error::Parse(format!("level: {e}")))?;
    let offset = off.parse().map_err(|e| Error::Parse(format!("offset: {e}")))?;
    Ok(AxisIndex::Interval(crate::geometry::DyadicInterval::new(level, offset)?))
}

/// Coefficients as CSV: header `a0,…,value`, axis tokens `mean` or
/// `level:offset`, one row per stored slot (zeros included).
pub fn write_coefficients_csv(w: &mut impl Write, exp: &HaarExpansion) -> Result<()> {
    let shape = exp.shape();
    writeln!(
        w,
        "# torushaar-coefficients v1 depths {}",
        shape.depths().iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
    )?;
    let header: Vec<String> = (0..shape.n_params()).map(|l| format!("a{l}")).collect();
    writeln!(w, "{},value", header.join(","))?;
    for (flat, v) in exp.coeffs().iter().enumerate() {
        let idx = exp.axis_indices(flat);
        let cols: Vec<String> = idx.iter().map(axis_token).collect();
        writeln!(w, "{},{}", cols.join(","), fmt_f64(*v))?;
    }
    Ok(())
}

pub fn read_coefficients_csv(r: &mut impl BufRead) -> Result<HaarExpansion> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty coefficient file".into()))??;
    let depths: Vec<usize> = header
        .strip_prefix("# torushaar-coefficients v1 depths ")
        .ok_or_else(|| Error::Parse("missing coefficient header".into()))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|e| Error::Parse(format!("depth: {e}"))))
        .collect::<Result<_>>()?;
    let shape = Shape::new(depths)?;
    let mut exp = HaarExpansion::zeros(shape.clone());
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if lineno == 0 || line.trim().is_empty() {
            continue; // column header
        }
        let parts: Vec<&str> = line.trim().split(',').collect();
        if parts.len() != shape.n_params() + 1 {
            return Err(Error::Parse(format!("row {lineno}: wrong column count")));
        }
        let idx: Vec<AxisIndex> = parts[..shape.n_params()]
            .iter()
            .map(|t| parse_axis_token(t))
            .collect::<Result<_>>()?;
        let value: f64 = parts[shape.n_params()]
            .parse()
            .map_err(|e| Error::Parse(format!("row {lineno}: {e}")))?;
        exp.set(&idx, value)?;
    }
    Ok(exp)
}

/// Dense operator matrix as `row,col,value` CSV.
pub fn write_matrix_csv(w: &mut impl Write, m: &nalgebra::DMatrix<f64>) -> Result<()> {
    writeln!(w, "row,col,value")?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            writeln!(w, "{i},{j},{}", fmt_f64(m[(i, j)]))?;
        }
    }
    Ok(())
}
