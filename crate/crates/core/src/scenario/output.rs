use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::solver::{RunOutput, RunSummary, Snapshot};

use super::config::Scenario;
use super::units::YEAR;

pub const CSV_HEADER: &str = "x_m,p_l_Pa,X,S_g,c_h2_mol_per_m3";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const SERIES_FILE: &str = "series.csv";

/// Line-cut values at one output time.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputRecord {
    pub time_years: f64,
    pub x: Vec<f64>,
    pub p_l: Vec<f64>,
    pub x_h: Vec<f64>,
    pub s_g: Vec<f64>,
    /// Hydrogen molar density `rho_g_std / M^h · X` (mol/m³).
    pub c_h2: Vec<f64>,
}

impl OutputRecord {
    pub fn from_snapshot(scenario: &Scenario, snap: &Snapshot) -> Self {
        let fluid = &scenario.problem.params.fluid;
        let molar = fluid.rho_g_std / fluid.m_h;
        let cells = &scenario.line_cut;
        OutputRecord {
            time_years: snap.time / YEAR,
            x: cells.iter().map(|&c| scenario.problem.grid.cell_center(c)[0]).collect(),
            p_l: cells.iter().map(|&c| snap.state[c].p_l).collect(),
            x_h: cells.iter().map(|&c| snap.state[c].x).collect(),
            s_g: cells.iter().map(|&c| snap.s_g[c]).collect(),
            c_h2: cells.iter().map(|&c| molar * snap.state[c].x).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// File name carrying the output time in years.
    pub fn file_name(&self) -> String {
        format!("linecut_{}y.csv", self.time_years)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 * self.len());
        s.push_str(CSV_HEADER);
        s.push('\n');
        for i in 0..self.len() {
            let _ = writeln!(
                s,
                "{:e},{:e},{:e},{:e},{:e}",
                self.x[i], self.p_l[i], self.x_h[i], self.s_g[i], self.c_h2[i]
            );
        }
        s
    }

    pub fn from_csv(time_years: f64, text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(CSV_HEADER) {
            return Err(Error::Config(format!("record header must be `{CSV_HEADER}`")));
        }
        let mut rec = OutputRecord {
            time_years,
            x: Vec::new(),
            p_l: Vec::new(),
            x_h: Vec::new(),
            s_g: Vec::new(),
            c_h2: Vec::new(),
        };
        for (k, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let vals: Vec<f64> = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config(format!("record line {}: {e}", k + 2)))?;
            if vals.len() != 5 {
                return Err(Error::Config(format!("record line {} has {} columns", k + 2, vals.len())));
            }
            rec.x.push(vals[0]);
            rec.p_l.push(vals[1]);
            rec.x_h.push(vals[2]);
            rec.s_g.push(vals[3]);
            rec.c_h2.push(vals[4]);
        }
        Ok(rec)
    }
}

fn years(t: Option<f64>) -> String {
    t.map_or_else(|| "none".to_string(), |t| format!("{:e}", t / YEAR))
}

/// Key-value summary of a run.
pub fn summary_text(name: &str, summary: &RunSummary, records: &[OutputRecord]) -> String {
    let mb = &summary.mass_balance;
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("scenario", name.to_string());
    kv("t1_years", years(summary.t1));
    kv("t2_years", years(summary.t2));
    kv("t3_years", years(summary.t3));
    kv("mass_initial_kg", format!("{:e}", mb.initial));
    kv("mass_final_kg", format!("{:e}", mb.final_mass));
    kv("mass_injected_kg", format!("{:e}", mb.injected));
    kv("mass_outflow_kg", format!("{:e}", mb.outflow));
    kv("mass_balance_error_kg", format!("{:e}", mb.error()));
    kv("mass_balance_relative_error", format!("{:e}", mb.relative_error()));
    kv("steps", summary.steps.to_string());
    kv("rejected_steps", summary.rejected_steps.to_string());
    kv("newton_iterations", summary.newton_iterations.to_string());
    kv("records", records.len().to_string());
    for (i, r) in records.iter().enumerate() {
        kv(&format!("record_{}_time_years", i + 1), format!("{}", r.time_years));
        kv(&format!("record_{}_file", i + 1), r.file_name());
    }
    s
}

/// Reads a summary back into `key -> value` pairs.
pub fn parse_summary(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

fn series_csv(summary: &RunSummary) -> String {
    let mut s = String::from("t_years,dt_years,max_p_l_Pa,max_S_g,hydrogen_mass_kg,newton_iterations\n");
    for p in &summary.series {
        let _ = writeln!(
            s,
            "{:e},{:e},{:e},{:e},{:e},{}",
            p.t / YEAR,
            p.dt / YEAR,
            p.max_p_l,
            p.max_s_g,
            p.hydrogen_mass,
            p.newton_iterations
        );
    }
    s
}

/// Writes one record per snapshot, the summary, and the time series.
pub fn write_outputs(scenario: &Scenario, run: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let records: Vec<OutputRecord> = run
        .snapshots
        .iter()
        .map(|s| OutputRecord::from_snapshot(scenario, s))
        .collect();
    let mut written = Vec::new();
    for r in &records {
        let path = dir.join(r.file_name());
        std::fs::write(&path, r.to_csv())?;
        written.push(path);
    }
    let path = dir.join(SUMMARY_FILE);
    std::fs::write(&path, summary_text(&scenario.name, &run.summary, &records))?;
    written.push(path);
    let path = dir.join(SERIES_FILE);
    std::fs::write(&path, series_csv(&run.summary))?;
    written.push(path);
    Ok(written)
}
