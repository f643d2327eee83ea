//! CSV tables: one row per grid point, coordinates first, then `re, im`.
//! Rows run in lexicographic order of the coordinates (first axis slowest).

use std::io::Write;
use std::path::Path;

use drw_core::filters::FilterBank;
use drw_core::grid::Grid;
use drw_core::render::SampledFunction;
use num_complex::Complex64;

use crate::error::Result;

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn axis_names(prefix: &str, n: usize) -> Vec<String> {
    if n == 1 {
        vec![prefix.to_string()]
    } else {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }
}

/// Linear indices of `grid` (axis 0 fastest) in lexicographic order.
fn lexicographic(grid: &Grid) -> impl Iterator<Item = usize> + '_ {
    let n = grid.n;
    let side = grid.side;
    (0..grid.len()).map(move |r| {
        // r enumerates with the last axis fastest; reverse the digits
        let mut rest = r;
        let mut digits = vec![0usize; n];
        for axis in (0..n).rev() {
            digits[axis] = rest % side;
            rest /= side;
        }
        grid.linear(&digits)
    })
}

fn write_table<W: Write>(
    out: W,
    header: Vec<String>,
    rows: impl Iterator<Item = (Vec<f64>, Complex64)>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = header;
    header.push("re".into());
    header.push("im".into());
    w.write_record(&header)?;
    for (coords, v) in rows {
        let mut rec: Vec<String> = coords.into_iter().map(fmt).collect();
        rec.push(fmt(v.re));
        rec.push(fmt(v.im));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sampled<W: Write>(out: W, f: &SampledFunction) -> Result<()> {
    let grid = f.grid();
    let values = f.values();
    write_table(
        out,
        axis_names("x", f.n()),
        lexicographic(&grid).map(|lin| (f.point(lin), values[lin])),
    )
}

/// `table` as returned by `sample_symbol`, which lists points with axis 0
/// fastest on a tensor grid.
pub fn write_symbol<W: Write>(out: W, n: usize, table: &[(Vec<f64>, Complex64)]) -> Result<()> {
    let side = (table.len() as f64).powf(1.0 / n as f64).round() as usize;
    let grid = Grid::new(n, side);
    write_table(
        out,
        axis_names("xi", n),
        lexicographic(&grid).map(|lin| table[lin].clone()),
    )
}

/// Columns `epsilon, k.., re, im`.
pub fn write_filters<W: Write>(out: W, f: &FilterBank) -> Result<()> {
    let grid = f.grid();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["epsilon".to_string()];
    header.extend(axis_names("k", f.n()));
    header.push("re".into());
    header.push("im".into());
    w.write_record(&header)?;
    for eps in 0..f.dim() {
        for lin in lexicographic(&grid) {
            let mut rec = vec![eps.to_string()];
            rec.extend(grid.coords(lin).iter().map(|k| k.to_string()));
            let v = f.filter(eps)[lin];
            rec.push(fmt(v.re));
            rec.push(fmt(v.im));
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_sampled_file(path: &Path, f: &SampledFunction) -> Result<()> {
    write_sampled(std::fs::File::create(path)?, f)
}

pub fn write_symbol_file(path: &Path, n: usize, table: &[(Vec<f64>, Complex64)]) -> Result<()> {
    write_symbol(std::fs::File::create(path)?, n, table)
}

pub fn write_filters_file(path: &Path, f: &FilterBank) -> Result<()> {
    write_filters(std::fs::File::create(path)?, f)
}
