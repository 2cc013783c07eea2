//! Convergence tables as CSV, and least-squares summaries of them.

use std::io::{Read, Write};

use neumann_spectral::solve::{fit_line, LineFit};
use neumann_spectral::RunReport;

use crate::CliError;

pub const HEADER: [&str; 6] = ["n", "N", "max_error", "cond", "q", "seconds"];

/// One parsed table row.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub degree: usize,
    pub size: usize,
    pub max_error: f64,
    pub condition: f64,
    pub quad_order: usize,
    pub seconds: f64,
}

impl From<&RunReport> for TableRow {
    fn from(r: &RunReport) -> Self {
        Self {
            degree: r.degree,
            size: r.size,
            max_error: r.max_error,
            condition: r.condition,
            quad_order: r.quad_order,
            seconds: r.seconds,
        }
    }
}

/// Scientific notation with 3 significant digits, e.g. `2.26e-3`.
pub fn format_error(e: f64) -> String {
    if e.is_finite() {
        format!("{e:.2e}")
    } else {
        "nan".into()
    }
}

/// Integers from 100 up, 3 significant digits below.
pub fn format_condition(c: f64) -> String {
    if !c.is_finite() {
        return "nan".into();
    }
    if c >= 100.0 {
        return format!("{c:.0}");
    }
    let digits = if c >= 10.0 { 1 } else { 2 };
    format!("{c:.digits$}")
}

pub fn write_table<W: Write>(rows: &[RunReport], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            r.degree.to_string(),
            r.size.to_string(),
            format_error(r.max_error),
            format_condition(r.condition),
            r.quad_order.to_string(),
            format!("{:.3}", r.seconds),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a table with the standard header. `q` and `seconds` may be absent.
pub fn read_table<R: Read>(input: R) -> Result<Vec<TableRow>, CliError> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = r.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let need = |name: &str| {
        column(name).ok_or_else(|| CliError::validation("csv", format!("missing column '{name}'")))
    };
    let (n, size, err, cond) = (need("n")?, need("N")?, need("max_error")?, need("cond")?);
    let (q, secs) = (column("q"), column("seconds"));
    let mut rows = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let cell = |i: usize| record.get(i).unwrap_or("");
        let bad = |name: &str, i: usize| {
            CliError::validation("csv", format!("row {}: bad {name} '{}'", line + 1, cell(i)))
        };
        let int = |name: &str, i: usize| cell(i).parse::<usize>().map_err(|_| bad(name, i));
        let real = |name: &str, i: usize| cell(i).parse::<f64>().map_err(|_| bad(name, i));
        rows.push(TableRow {
            degree: int("n", n)?,
            size: int("N", size)?,
            max_error: real("max_error", err)?,
            condition: real("cond", cond)?,
            quad_order: match q {
                Some(i) => int("q", i)?,
                None => 0,
            },
            seconds: match secs {
                Some(i) => real("seconds", i)?,
                None => 0.0,
            },
        });
    }
    Ok(rows)
}

/// Fits of `log10(error)` against `n` and `ln(cond)` against `ln N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub rows: usize,
    pub error: LineFit,
    pub condition: LineFit,
}

impl Summary {
    /// Decades of error reduction per two degrees.
    pub fn decades_per_two_degrees(&self) -> f64 {
        -2.0 * self.error.slope
    }

    /// Error decreasing and condition growing like `N^p`, `p ∈ [1.6, 2.4]`.
    pub fn check(&self) -> Result<(), CliError> {
        let mut problems = Vec::new();
        if !(self.error.slope < 0.0) {
            problems.push(format!(
                "error slope {:.4} is not negative",
                self.error.slope
            ));
        }
        if !(1.6..=2.4).contains(&self.condition.slope) {
            problems.push(format!(
                "condition exponent {:.3} is outside [1.6, 2.4]",
                self.condition.slope
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CliError::CheckFailed(problems.join("; ")))
        }
    }
}

impl std::fmt::Display for Summary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "rows: {}", self.rows)?;
        writeln!(
            f,
            "log10(error) vs n: slope {:.4}, intercept {:.4}, R^2 {:.4} ({:.2} decades per 2 degrees)",
            self.error.slope,
            self.error.intercept,
            self.error.r_squared,
            self.decades_per_two_degrees()
        )?;
        write!(
            f,
            "ln(cond) vs ln(N): exponent {:.4}, intercept {:.4}, R^2 {:.4}",
            self.condition.slope, self.condition.intercept, self.condition.r_squared
        )
    }
}

/// Summarizes rows with `n >= from_degree`.
pub fn summarize(rows: &[TableRow], from_degree: usize) -> Result<Summary, CliError> {
    let rows: Vec<&TableRow> = rows.iter().filter(|r| r.degree >= from_degree).collect();
    if rows.len() < 4 {
        return Err(CliError::TooFewRows(rows.len()));
    }
    let usable: Vec<&&TableRow> = rows
        .iter()
        .filter(|r| r.max_error > 0.0 && r.max_error.is_finite())
        .collect();
    let error = fit_line(
        &usable.iter().map(|r| r.degree as f64).collect::<Vec<_>>(),
        &usable
            .iter()
            .map(|r| r.max_error.log10())
            .collect::<Vec<_>>(),
    )
    .map_err(|e| CliError::validation("max_error", e.to_string()))?;
    let condition = fit_line(
        &rows
            .iter()
            .map(|r| (r.size as f64).ln())
            .collect::<Vec<_>>(),
        &rows.iter().map(|r| r.condition.ln()).collect::<Vec<_>>(),
    )
    .map_err(|e| CliError::validation("cond", e.to_string()))?;
    Ok(Summary {
        rows: rows.len(),
        error,
        condition,
    })
}
