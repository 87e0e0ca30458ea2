//! Parameter sweeps over a one-parameter channel family.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use capbound::channels::{make, ChannelFamily};
use rayon::prelude::*;

use crate::svg::{self, Series};
use crate::{evaluate, fmt_e, status_name, Measure, Request};

pub const CSV_HEADER: [&str; 8] = ["param", "value_bits", "measure", "alpha", "ell", "status", "gap", "wall_ms"];

/// `start:stop:count`, evenly spaced and inclusive of both ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err("grid bounds must be finite".into());
        }
        if self.count < 2 {
            return Err(format!("grid needs at least 2 points, got {}", self.count));
        }
        if self.start > self.stop {
            return Err(format!("grid start {} exceeds stop {}", self.start, self.stop));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| if i + 1 == n { self.stop } else { self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64 })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(format!("grid must look like start:stop:count, got {s}"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad grid bound {t}: {e}"));
        let count = n.trim().parse::<usize>().map_err(|e| format!("bad grid count {n}: {e}"))?;
        let g = Grid { start: num(a)?, stop: num(b)?, count };
        g.validate()?;
        Ok(g)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub channel: ChannelFamily,
    pub grid: Grid,
    pub request: Request,
}

impl SweepConfig {
    /// Checks the grid and that every grid point is a valid channel.
    pub fn validate(&self) -> Result<(), String> {
        self.grid.validate()?;
        if self.channel.parameter().is_none() {
            return Err(format!("channel kind {} has no parameter to sweep", self.channel.name()));
        }
        for p in self.grid.points() {
            let f = self.channel.with_parameter(p).map_err(|e| e.to_string())?;
            make(&f).map_err(|e| format!("at param {p}: {e}"))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub param: f64,
    pub value_bits: f64,
    pub measure: String,
    pub alpha: Option<f64>,
    pub ell: Option<u32>,
    pub status: String,
    pub gap: f64,
    pub wall_ms: u64,
}

impl Row {
    pub fn solved(&self) -> bool {
        self.status == "optimal" || self.status == "near_optimal"
    }

    fn record(&self) -> [String; 8] {
        [
            fmt_e(self.param),
            fmt_e(self.value_bits),
            self.measure.clone(),
            self.alpha.map(fmt_e).unwrap_or_default(),
            self.ell.map(|l| l.to_string()).unwrap_or_default(),
            self.status.clone(),
            fmt_e(self.gap),
            self.wall_ms.to_string(),
        ]
    }
}

/// One row per grid point, ascending in the parameter. Failures land in the
/// status column. `wall_ms` is zero unless `timing` is set, which keeps the
/// output byte-stable.
pub fn run_sweep(cfg: &SweepConfig, timing: bool) -> Result<Vec<Row>, String> {
    cfg.validate()?;
    let mut rows: Vec<Row> = cfg
        .grid
        .points()
        .into_par_iter()
        .map(|p| {
            let family = cfg.channel.with_parameter(p).expect("validated");
            match evaluate(&family, &cfg.request) {
                Ok(r) => Row {
                    param: p,
                    value_bits: r.value_bits,
                    measure: cfg.request.measure.name().into(),
                    alpha: r.alpha,
                    ell: r.ell,
                    status: if r.status.is_solved() && !r.certified {
                        "uncertified".into()
                    } else {
                        status_name(r.status).into()
                    },
                    gap: r.gap,
                    wall_ms: if timing { r.wall_ms } else { 0 },
                },
                Err(_) => Row {
                    param: p,
                    value_bits: f64::NAN,
                    measure: cfg.request.measure.name().into(),
                    alpha: None,
                    ell: None,
                    status: "error".into(),
                    gap: f64::NAN,
                    wall_ms: 0,
                },
            }
        })
        .collect();
    rows.sort_by(|a, b| a.param.total_cmp(&b.param));
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()
}

pub fn csv_string(rows: &[Row]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("ascii")
}

pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// The Holevo-information lower curve `1 − h₂(p/2)` for the qubit depolarizing family.
pub fn holevo_rows(grid: &Grid) -> Vec<Row> {
    grid.points()
        .into_iter()
        .map(|p| Row {
            param: p,
            value_bits: 1.0 - binary_entropy(p / 2.0),
            measure: "holevo_lower".into(),
            alpha: None,
            ell: None,
            status: "closed_form".into(),
            gap: 0.0,
            wall_ms: 0,
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    Fig4,
    Fig5,
    Fig6,
}

impl Preset {
    pub const POINTS: usize = 41;
    pub const ELL: u32 = 4;

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
        }
    }

    pub fn config(self) -> SweepConfig {
        let channel = match self {
            Preset::Fig4 => ChannelFamily::PartialSwap { d: 2, p: 0.0 },
            Preset::Fig5 => ChannelFamily::NoisyCnot { d: 2, p: 0.0 },
            Preset::Fig6 => ChannelFamily::Depolarizing { d: 2, p: 0.0 },
        };
        SweepConfig {
            channel,
            grid: Grid { start: 0.0, stop: 1.0, count: Self::POINTS },
            request: Request { measure: Measure::UpsilonGeo, ell: Self::ELL, symmetric: true },
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Preset::Fig4 => "Partial swap, d = 2",
            Preset::Fig5 => "Noisy CNOT, d = 2",
            Preset::Fig6 => "Depolarizing, d = 2",
        }
    }

    /// Additional series drawn and written next to the main one.
    pub fn extra_series(self, grid: &Grid) -> Option<Vec<Row>> {
        match self {
            Preset::Fig6 => Some(holevo_rows(grid)),
            _ => None,
        }
    }
}

/// `dir/stem_suffix.csv` next to `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    path.with_file_name(format!("{stem}_{suffix}.csv"))
}

pub fn render_svg(title: &str, rows: &[Row], extra: Option<&[Row]>) -> String {
    let to_series = |rows: &[Row]| Series {
        label: rows.first().map(|r| r.measure.clone()).unwrap_or_default(),
        points: rows.iter().map(|r| (r.param, r.value_bits)).collect(),
    };
    let mut series = vec![to_series(rows)];
    if let Some(e) = extra {
        series.push(to_series(e));
    }
    svg::render(title, "param", "value_bits", &series)
}
