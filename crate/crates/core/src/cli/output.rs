//! CSV and JSON writers for time series.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::evolution::{Kernel, TimeSeries};

/// Formats with 17 significant digits, independent of locale.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_header(levels: usize, include_propagator: bool) -> String {
    let mut cols = vec!["t".to_string()];
    cols.extend((0..levels).map(|k| format!("p{k}")));
    if include_propagator {
        for i in 0..levels {
            for j in 0..levels {
                cols.push(format!("reU{i}{j}"));
                cols.push(format!("imU{i}{j}"));
            }
        }
    }
    cols.join(",")
}

pub fn write_csv(out: &mut dyn Write, series: &TimeSeries, levels: usize) -> io::Result<()> {
    let include = series.propagators.is_some();
    writeln!(out, "{}", csv_header(levels, include))?;
    for (row, (t, pops)) in series.times.iter().zip(&series.populations).enumerate() {
        let mut fields = vec![fmt_f64(*t)];
        fields.extend(pops.iter().map(|&p| fmt_f64(p)));
        if let Some(us) = &series.propagators {
            for z in us[row].as_slice() {
                fields.push(fmt_f64(z.re));
                fields.push(fmt_f64(z.im));
            }
        }
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputMeta {
    pub n: usize,
    pub kernel: Kernel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputRow {
    pub t: f64,
    pub populations: Vec<f64>,
    /// Row-major `[re, im]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub propagator: Option<Vec<[f64; 2]>>,
}

/// Document layout of JSON output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationOutput {
    pub meta: OutputMeta,
    pub rows: Vec<OutputRow>,
}

impl SimulationOutput {
    pub fn from_series(series: &TimeSeries, levels: usize) -> Self {
        let kernel = match series.kernel {
            crate::evolution::KernelUsed::ClosedForm => Kernel::ClosedForm,
            crate::evolution::KernelUsed::Spectral => Kernel::Spectral,
        };
        let rows = series
            .times
            .iter()
            .zip(&series.populations)
            .enumerate()
            .map(|(i, (&t, p))| OutputRow {
                t,
                populations: p.clone(),
                propagator: series
                    .propagators
                    .as_ref()
                    .map(|us| us[i].as_slice().iter().map(|z| [z.re, z.im]).collect()),
            })
            .collect();
        Self {
            meta: OutputMeta {
                n: levels,
                kernel,
                seed: None,
            },
            rows,
        }
    }
}

pub fn write_json(out: &mut dyn Write, series: &TimeSeries, levels: usize) -> io::Result<()> {
    let doc = SimulationOutput::from_series(series, levels);
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        assert_eq!(csv_header(2, false), "t,p0,p1");
        assert_eq!(
            csv_header(2, true),
            "t,p0,p1,reU00,imU00,reU01,imU01,reU10,imU10,reU11,imU11"
        );
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
        let x = std::f64::consts::PI / 7.0;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }
}
