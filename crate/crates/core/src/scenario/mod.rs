//! Scenario configuration, the two benchmark presets, output files and the
//! command line.

pub mod cli;
mod config;
mod output;
pub mod units;

pub use config::{
    BoundaryConfig, Flags, FluidConfig, GridConfig, InitialConfig, MediumConfig, NewtonConfig, Scenario,
    ScenarioConfig, SideCondition, SourceRegion, TimeConfig,
};
pub use output::{
    parse_summary, summary_text, write_outputs, OutputRecord, CSV_HEADER, SERIES_FILE, SUMMARY_FILE,
};

use crate::error::{Error, Result};
use crate::solver::{run_simulation, RunOutput};

pub const CASE1_TOML: &str = include_str!("../../presets/case1.toml");
pub const CASE2_TOML: &str = include_str!("../../presets/case2.toml");

/// Built-in configuration of benchmark case 1 or 2.
pub fn preset(case_id: u8) -> Result<ScenarioConfig> {
    match case_id {
        1 => ScenarioConfig::from_toml(CASE1_TOML),
        2 => ScenarioConfig::from_toml(CASE2_TOML),
        other => Err(Error::Config(format!("unknown case {other}, expected 1 or 2"))),
    }
}

impl Scenario {
    pub fn run(&self) -> Result<RunOutput> {
        run_simulation(&self.problem, self.initial.clone(), &self.options)
    }
}
