//! CSV files written by the commands.
//!
//! Floats are printed with Rust's shortest round-trip representation, so
//! reading a file back reproduces the written values exactly.

use std::io::{Read, Write};

use geopath_core::{ManifoldModel, PathSolution};
use nalgebra::DVector;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("malformed trajectory file: {0}")]
    Malformed(String),
}

/// Row order of a trajectory file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowOrder {
    /// From the start point to the goal.
    Forward,
    /// Solver order: goal first.
    Raw,
}

/// A trajectory as stored on disk. Row `r` holds the state, its height on
/// the surface and the costate of the step from row `r − 1` to row `r`;
/// row 0 has a zero costate.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub heights: Vec<f64>,
    pub costates: Vec<DVector<f64>>,
}

impl Trajectory {
    pub fn from_solution(sol: &PathSolution, manifold: &ManifoldModel, order: RowOrder) -> Self {
        let n = manifold.dim();
        let steps = sol.states.len() - 1;
        let mut padded = Vec::with_capacity(steps + 1);
        padded.push(DVector::zeros(n));
        padded.extend(sol.costates.iter().cloned());
        let (states, costates): (Vec<_>, Vec<_>) = match order {
            RowOrder::Raw => (sol.states.clone(), padded),
            RowOrder::Forward => {
                let states: Vec<_> = sol.states.iter().rev().cloned().collect();
                let mut costates = vec![DVector::zeros(n)];
                costates.extend((1..=steps).map(|r| padded[steps + 1 - r].clone()));
                (states, costates)
            }
        };
        Trajectory {
            times: (0..=steps).map(|j| j as f64 * sol.dt).collect(),
            heights: states.iter().map(|x| manifold.height(x)).collect(),
            states,
            costates,
        }
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, |x| x.len())
    }

    pub fn header(dim: usize) -> Vec<String> {
        let mut h = vec!["t".to_string()];
        h.extend((1..=dim).map(|i| format!("x{i}")));
        h.push("z".into());
        h.extend((1..=dim).map(|i| format!("p{i}")));
        h
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<(), OutputError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(Self::header(self.dim()))?;
        for r in 0..self.states.len() {
            let mut row = vec![self.times[r].to_string()];
            row.extend(self.states[r].iter().map(f64::to_string));
            row.push(self.heights[r].to_string());
            row.extend(self.costates[r].iter().map(f64::to_string));
            w.write_record(&row)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read<R: Read>(reader: R) -> Result<Self, OutputError> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        let cols = header.len();
        if cols < 4 || (cols - 2) % 2 != 0 {
            return Err(OutputError::Malformed(format!("unexpected column count {cols}")));
        }
        let dim = (cols - 2) / 2;
        let expected = Self::header(dim);
        if header.iter().ne(expected.iter().map(String::as_str)) {
            return Err(OutputError::Malformed(format!("header must be {}", expected.join(","))));
        }
        let mut out = Trajectory { times: vec![], states: vec![], heights: vec![], costates: vec![] };
        for (i, record) in r.records().enumerate() {
            let record = record?;
            let values = record
                .iter()
                .map(|s| s.parse::<f64>().map_err(|_| OutputError::Malformed(format!("row {}: `{s}`", i + 1))))
                .collect::<Result<Vec<_>, _>>()?;
            out.times.push(values[0]);
            out.states.push(DVector::from_column_slice(&values[1..=dim]));
            out.heights.push(values[dim + 1]);
            out.costates.push(DVector::from_column_slice(&values[dim + 2..]));
        }
        Ok(out)
    }
}

/// One line of `summary.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub path_id: usize,
    pub u: f64,
    pub iterations: usize,
    pub converged: bool,
    pub seconds: f64,
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], writer: W) -> Result<(), OutputError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["path_id", "u", "iterations", "converged", "seconds"])?;
    for r in rows {
        w.write_record([
            r.path_id.to_string(),
            r.u.to_string(),
            r.iterations.to_string(),
            r.converged.to_string(),
            r.seconds.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_summary<R: Read>(reader: R) -> Result<Vec<SummaryRow>, OutputError> {
    let mut r = csv::Reader::from_reader(reader);
    let bad = |s: &str| OutputError::Malformed(format!("summary field `{s}`"));
    r.records()
        .map(|rec| {
            let rec = rec?;
            if rec.len() != 5 {
                return Err(OutputError::Malformed("summary rows have five fields".into()));
            }
            Ok(SummaryRow {
                path_id: rec[0].parse().map_err(|_| bad(&rec[0]))?,
                u: rec[1].parse().map_err(|_| bad(&rec[1]))?,
                iterations: rec[2].parse().map_err(|_| bad(&rec[2]))?,
                converged: rec[3].parse().map_err(|_| bad(&rec[3]))?,
                seconds: rec[4].parse().map_err(|_| bad(&rec[4]))?,
            })
        })
        .collect()
}

/// One line of `scaling.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub dim: usize,
    pub mean_s: f64,
    pub std_s: f64,
}

pub fn write_scaling<W: Write>(rows: &[ScalingRow], writer: W) -> Result<(), OutputError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["dim", "mean_s", "std_s"])?;
    for r in rows {
        w.write_record([r.dim.to_string(), r.mean_s.to_string(), r.std_s.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Sample mean and standard deviation (`n − 1` denominator; 0 for one sample).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
