//! Region sweeps over eta triples, rendered as CSV or JSON.

use std::fmt::Write as _;

use joinlab_core::joinability::{
    bisect_boundary, diagonal_sweep, evaluate_region, EtaTriple, CALIBRATED_QUBIT_OFFSETS,
};
use joinlab_core::oracle::OracleConfig;
use joinlab_core::verify::{oracle_verdict, MARGIN_BAND};
use joinlab_core::{region_sweep, GridAxis, Pivot, RegionVerdict, Scenario, SweepGrid, VERSION};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::format::{flag, sig};
use crate::CliError;

/// Significant digits of every float in sweep output.
pub const DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Either the full cube or the symmetric line through it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Layout {
    Cube(GridAxis),
    Diagonal(GridAxis),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub d: usize,
    pub layout: Layout,
    pub scenarios: Vec<Scenario>,
    pub oracle: bool,
    pub seed: u64,
    pub format: Format,
}

/// Expands a comma-separated scenario list. `all` selects every scenario with
/// a closed form at `d`; a pivot narrows the channel scenarios to that party.
pub fn resolve_scenarios(list: &str, pivot: Option<Pivot>, d: usize) -> Result<Vec<Scenario>, CliError> {
    let channel_for = |p: Pivot| match p {
        Pivot::A => Scenario::ChannelJoinA,
        Pivot::B => Scenario::ChannelJoinB,
        Pivot::C => Scenario::ChannelJoinC,
    };
    let mut out = Vec::new();
    for token in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if token.eq_ignore_ascii_case("all") {
            out.extend(Scenario::ALL.into_iter().filter(|s| {
                s.supported(d) && match (s.pivot(), pivot) {
                    (Some(p), Some(want)) => p == want,
                    _ => true,
                }
            }));
            continue;
        }
        let s = if token == "channel" {
            channel_for(pivot.unwrap_or(Pivot::A))
        } else {
            token.parse::<Scenario>()?
        };
        if !s.supported(d) {
            return Err(CliError::Usage(format!("scenario {s} has no closed form at d = {d}")));
        }
        out.push(s);
    }
    if out.is_empty() {
        return Err(CliError::Usage("no scenarios selected".into()));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Scenarios with an independent numerical certifier at `d`.
pub fn oracle_scenarios(d: usize, scenarios: &[Scenario]) -> Vec<Scenario> {
    scenarios
        .iter()
        .copied()
        .filter(|s| s.pivot().is_some() || *s == Scenario::StateJoin || (*s == Scenario::LocalPositiveJoin && d == 2))
        .collect()
}

/// Aggregate comparison against the oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OracleSummary {
    pub compared: usize,
    pub disagreements: usize,
    pub band_disagreements: usize,
}

/// The evaluated sweep, ready to render.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub rows: Vec<RegionVerdict>,
    /// Per row, one entry per [`oracle_scenarios`] column.
    pub oracle: Option<Vec<Vec<bool>>>,
}

pub fn run(config: &SweepConfig) -> Result<SweepResult, CliError> {
    let rows = match config.layout {
        Layout::Cube(axis) => region_sweep(&SweepGrid::cube(axis), config.d, &config.scenarios)?,
        Layout::Diagonal(axis) => diagonal_sweep(&axis, config.d, &config.scenarios)?,
    };
    let oracle = if config.oracle {
        if !(2..=3).contains(&config.d) {
            return Err(CliError::Usage(format!("--oracle supports d = 2 or 3, got {}", config.d)));
        }
        let cfg = OracleConfig {
            stop_when_feasible: true,
            ..OracleConfig::default()
        };
        let cols = oracle_scenarios(config.d, &config.scenarios);
        let table = rows
            .par_iter()
            .map(|row| {
                cols.iter()
                    .map(|&s| {
                        oracle_verdict(config.d, s, row.eta, &cfg)
                            .map(|v| v.expect("oracle column has a certifier"))
                    })
                    .collect::<Result<Vec<bool>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Some(table)
    } else {
        None
    };
    Ok(SweepResult {
        config: config.clone(),
        rows,
        oracle,
    })
}

impl SweepResult {
    pub fn oracle_summary(&self) -> Option<OracleSummary> {
        let table = self.oracle.as_ref()?;
        let cols = oracle_scenarios(self.config.d, &self.config.scenarios);
        let mut sum = OracleSummary::default();
        for (row, verdicts) in self.rows.iter().zip(table) {
            for (&s, &feasible) in cols.iter().zip(verdicts) {
                let v = row.get(s).expect("requested scenario was evaluated");
                sum.compared += 1;
                if v.holds != feasible {
                    if v.margin.abs() <= MARGIN_BAND {
                        sum.band_disagreements += 1;
                    } else {
                        sum.disagreements += 1;
                    }
                }
            }
        }
        Some(sum)
    }

    /// Margin sign changes along the symmetric line, per scenario. Each
    /// bracketing pair of samples is refined by bisection on the closed form.
    pub fn sign_changes(&self) -> Vec<(Scenario, Vec<f64>)> {
        let d = self.config.d;
        self.config
            .scenarios
            .iter()
            .map(|&s| {
                let margin = |eta: f64| {
                    evaluate_region(d, EtaTriple::symmetric(eta), &[s])
                        .ok()
                        .and_then(|r| r.get(s))
                        .map_or(f64::NAN, |v| v.margin)
                };
                let samples: Vec<(f64, f64)> = self
                    .rows
                    .iter()
                    .map(|r| (r.eta.ab, r.get(s).expect("requested scenario was evaluated").margin))
                    .filter(|&(_, m)| m != 0.0)
                    .collect();
                let roots = samples
                    .windows(2)
                    .filter(|w| (w[0].1 < 0.0) != (w[1].1 < 0.0))
                    .map(|w| bisect_boundary(w[0].0, w[1].0, margin, 80))
                    .collect();
                (s, roots)
            })
            .collect()
    }

    fn header(&self) -> Vec<String> {
        let mut cols: Vec<String> = ["eta_ab", "eta_ac", "eta_bc"].map(String::from).to_vec();
        for s in &self.config.scenarios {
            cols.push(s.name().to_string());
            cols.push(format!("{}_margin", s.name()));
        }
        if self.oracle.is_some() {
            for s in oracle_scenarios(self.config.d, &self.config.scenarios) {
                cols.push(format!("{}_oracle", s.name()));
            }
        }
        cols
    }

    fn metadata(&self) -> Vec<(String, String)> {
        let c = &self.config;
        let (shape, axis) = match c.layout {
            Layout::Cube(a) => ("cube", a),
            Layout::Diagonal(a) => ("diagonal", a),
        };
        let mut meta = vec![
            ("version".to_string(), VERSION.to_string()),
            ("d".to_string(), c.d.to_string()),
            (
                "grid".to_string(),
                format!("{shape} {} points per axis on [{}, {}]", axis.count, sig(axis.lo, DIGITS), sig(axis.hi, DIGITS)),
            ),
        ];
        if c.scenarios.iter().any(|s| s.pivot().is_some()) {
            let form = if c.d == 2 {
                CALIBRATED_QUBIT_OFFSETS.describe(c.d)
            } else {
                "exact elimination of the free 3-cycle coefficient from the partially transposed joining family".to_string()
            };
            meta.push(("channel_form".to_string(), form));
        }
        meta.push(("seed".to_string(), c.seed.to_string()));
        meta
    }

    fn cells(&self, i: usize) -> Vec<Cell> {
        let row = &self.rows[i];
        let mut cells = vec![Cell::Num(row.eta.ab), Cell::Num(row.eta.ac), Cell::Num(row.eta.bc)];
        for &s in &self.config.scenarios {
            let v = row.get(s).expect("requested scenario was evaluated");
            cells.push(Cell::Flag(v.holds));
            cells.push(Cell::Num(v.margin));
        }
        if let Some(table) = &self.oracle {
            cells.extend(table[i].iter().map(|&b| Cell::Flag(b)));
        }
        cells
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.metadata() {
            writeln!(out, "# {k}: {v}").expect("writing to a String");
        }
        out.push_str(&self.header().join(","));
        out.push('\n');
        for i in 0..self.rows.len() {
            let line: Vec<String> = self
                .cells(i)
                .into_iter()
                .map(|c| match c {
                    Cell::Num(x) => sig(x, DIGITS),
                    Cell::Flag(b) => flag(b).to_string(),
                })
                .collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// An array of row objects with the CSV column names. Floats carry the
    /// same 12 significant digits as the CSV.
    pub fn to_json(&self) -> String {
        let header = self.header();
        let rows: Vec<Value> = (0..self.rows.len())
            .map(|i| {
                let mut obj = Map::new();
                for (name, cell) in header.iter().zip(self.cells(i)) {
                    let v = match cell {
                        Cell::Num(x) => json!(sig(x, DIGITS).parse::<f64>().ok()),
                        Cell::Flag(b) => Value::Bool(b),
                    };
                    obj.insert(name.clone(), v);
                }
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
        s.push('\n');
        s
    }

    pub fn render(&self) -> String {
        match self.config.format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

enum Cell {
    Num(f64),
    Flag(bool),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(n: usize) -> SweepConfig {
        SweepConfig {
            d: 2,
            layout: Layout::Cube(GridAxis::new(-1.0, 1.0, n).unwrap()),
            scenarios: resolve_scenarios("all", None, 2).unwrap(),
            oracle: false,
            seed: 0,
            format: Format::Csv,
        }
    }

    #[test]
    fn scenario_lists() {
        assert_eq!(resolve_scenarios("all", None, 2).unwrap().len(), 7);
        assert_eq!(resolve_scenarios("all", None, 3).unwrap().len(), 5);
        assert_eq!(resolve_scenarios("all", Some(Pivot::B), 2).unwrap().len(), 5);
        assert_eq!(
            resolve_scenarios("channel, state", Some(Pivot::C), 3).unwrap(),
            vec![Scenario::StateJoin, Scenario::ChannelJoinC]
        );
        assert!(resolve_scenarios("separable", None, 3).is_err());
        assert!(resolve_scenarios("bogus", None, 2).is_err());
        assert!(resolve_scenarios(" , ", None, 2).is_err());
    }

    #[test]
    fn csv_layout() {
        let r = run(&cube(3)).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(lines.len(), 28);
        assert!(lines[0].starts_with("eta_ab,eta_ac,eta_bc,state_join,state_join_margin,channel_join_A"));
        assert!(lines[1].starts_with("-1,-1,-1,"));
        assert!(lines[2].starts_with("-1,-1,0,"));
        assert!(csv.starts_with(&format!("# version: {VERSION}\n")));
        assert!(csv.contains("# channel_form: 1 + eta_ab"));
    }

    #[test]
    fn json_matches_csv_columns() {
        let mut c = cube(2);
        c.format = Format::Json;
        let r = run(&c).unwrap();
        let rows: Vec<Value> = serde_json::from_str(&r.render()).unwrap();
        assert_eq!(rows.len(), 8);
        let keys: Vec<&String> = rows[0].as_object().unwrap().keys().collect();
        assert_eq!(keys, r.header().iter().collect::<Vec<_>>());
    }

    #[test]
    fn symmetric_line_crossings() {
        let c = SweepConfig {
            layout: Layout::Diagonal(GridAxis::new(-1.0, 1.0, 201).unwrap()),
            ..cube(2)
        };
        let r = run(&c).unwrap();
        let changes: Vec<(Scenario, Vec<f64>)> = r.sign_changes();
        let find = |s: Scenario| changes.iter().find(|c| c.0 == s).unwrap().1.clone();
        let close = |xs: &[f64], want: &[f64]| {
            xs.len() == want.len() && xs.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-6)
        };
        assert!(close(&find(Scenario::StateJoin), &[-1.0 / 3.0, 1.0 / 3.0]));
        assert!(close(&find(Scenario::LocalPositiveJoin), &[-1.0 / 3.0, 2.0 / 3.0]));
        assert!(close(&find(Scenario::Separable), &[-1.0 / 6.0, 1.0 / 3.0]));
        assert!(close(&find(Scenario::ChannelJoinA), &[-0.2, 1.0 / 3.0]));
    }
}
