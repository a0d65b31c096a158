//! Grid files: one `#` header line with bounds and shape, then a CSV table
//! `i,j,x,t,u` in row-major order (`i` outer).

use std::io::{BufRead, BufReader};
use std::path::Path;

use srmc_core::{GraphDomain, GridData};

use crate::error::CliError;
use crate::output::{fmt_f64, CsvOut};

pub fn header(g: &GridData) -> String {
    let d = g.domain;
    format!(
        "# x0={} x1={} t0={} t1={} nx={} nt={}",
        fmt_f64(d.x0),
        fmt_f64(d.x1),
        fmt_f64(d.t0),
        fmt_f64(d.t1),
        g.nx,
        g.nt
    )
}

/// Writes `g` with the second coordinate column named `second` (`t` for
/// intrinsic graphs, `y` for t-graphs).
pub fn write(path: &Path, g: &GridData, second: &str) -> Result<(), CliError> {
    let mut out = CsvOut::create(path, Some(&header(g)), &["i", "j", "x", second, "u"])?;
    for i in 0..g.nx {
        for j in 0..g.nt {
            let (x, t) = g.node(i, j);
            out.row_mixed(&[i.to_string(), j.to_string()], &[x, t, g.at(i, j)])?;
        }
    }
    out.finish()
}

fn bad(path: &Path, msg: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("grid file {}: {msg}", path.display()))
}

fn parse_header(path: &Path, line: &str) -> Result<(GraphDomain, usize, usize), CliError> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| bad(path, "missing `#` header line"))?;
    let mut vals = std::collections::HashMap::new();
    for item in body.split_whitespace() {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| bad(path, format!("malformed header entry `{item}`")))?;
        vals.insert(k, v);
    }
    let get = |k: &str| {
        vals.get(k)
            .copied()
            .ok_or_else(|| bad(path, format!("header lacks `{k}`")))
    };
    let num = |k: &str| -> Result<f64, CliError> {
        get(k)?.parse().map_err(|_| bad(path, format!("header value `{k}` is not a number")))
    };
    let count = |k: &str| -> Result<usize, CliError> {
        get(k)?.parse().map_err(|_| bad(path, format!("header value `{k}` is not a count")))
    };
    let d = GraphDomain::new(num("x0")?, num("x1")?, num("t0")?, num("t1")?).map_err(|e| bad(path, e))?;
    Ok((d, count("nx")?, count("nt")?))
}

pub fn read(path: &Path) -> Result<GridData, CliError> {
    let file = std::fs::File::open(path).map_err(|e| bad(path, e))?;
    let mut reader = BufReader::new(file);
    let mut first = String::new();
    reader.read_line(&mut first).map_err(|e| bad(path, e))?;
    let (domain, nx, nt) = parse_header(path, first.trim())?;
    let mut rows = csv::Reader::from_reader(reader);
    let mut values = Vec::with_capacity(nx * nt);
    for (k, rec) in rows.records().enumerate() {
        let rec = rec.map_err(|e| bad(path, e))?;
        if rec.len() != 5 {
            return Err(bad(path, format!("row {} has {} columns, expected 5", k + 1, rec.len())));
        }
        let field = |c: usize| -> Result<f64, CliError> {
            rec[c]
                .trim()
                .parse()
                .map_err(|_| bad(path, format!("row {}: `{}` is not a number", k + 1, &rec[c])))
        };
        let (i, j) = (k / nt.max(1), k % nt.max(1));
        if field(0)? != i as f64 || field(1)? != j as f64 {
            return Err(bad(path, format!("row {} is out of row-major order", k + 1)));
        }
        values.push(field(4)?);
    }
    if values.len() != nx * nt {
        return Err(bad(path, format!("expected {} rows, found {}", nx * nt, values.len())));
    }
    GridData::new(domain, nx, nt, values).map_err(|e| bad(path, e))
}

