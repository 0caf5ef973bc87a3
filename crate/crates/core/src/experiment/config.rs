use serde::{Deserialize, Serialize};

use crate::baselines::Scheme;
use crate::error::{Error, Result};
use crate::params::{SolverSettings, SystemConfig};

/// Which scenario constant is swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    #[default]
    None,
    PmaxDbm,
    RbarBits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Jsonl,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" => Ok(OutputFormat::Jsonl),
            other => Err(Error::InvalidConfig(format!("unknown output format `{other}`"))),
        }
    }
}

/// Everything needed to reproduce a Monte Carlo experiment.
///
/// The file form is flat TOML; every key is optional and defaults to the
/// value below. Units are in the key names.
///
/// | key | default | meaning |
/// |-----|---------|---------|
/// | `num_antennas` | 5 | base-station antennas |
/// | `users_per_zone` | 4 | users in each zone |
/// | `pmax_dbm` | 30 | power budget, dBm |
/// | `rbar_bits` | 0 | per-user throughput target, bits/s/Hz |
/// | `noise_density_dbm_hz` | -174 | noise density, dBm/Hz |
/// | `bandwidth_hz` | 1e7 | bandwidth used to turn the density into a power |
/// | `cell_radius_m` | 500 | cell radius, m |
/// | `zone1_radius_m` | 200 | outer radius of the near zone, m |
/// | `min_distance_m` | 10 | closest user distance, m |
/// | `conv_tol` | 1e-4 | relative objective change that stops the iteration |
/// | `max_iters` | 50 | iteration cap |
/// | `init_max_iters` | 50 | iteration cap of the feasibility phase |
/// | `init_stall_window` | 5 | iterations over which the feasibility phase must progress |
/// | `init_stall_tol` | 1e-4 | minimum relative progress over that window |
/// | `trust_margin` | 1e-9 | closure margin of the trust region |
/// | `alpha_min`, `alpha_max` | 1+1e-6, 1e6 | bounds on reciprocal time fractions |
/// | `conic_tol` | 1e-8 | interior-point tolerance |
/// | `feas_tol` | 1e-6 | feasibility certification tolerance |
/// | `ascent_tol` | 1e-6 | largest tolerated objective decrease per iteration |
/// | `schemes` | `["ft", "conventional-dl"]` | schemes to run |
/// | `sweep_axis` | `"none"` | `"none"`, `"pmax_dbm"` or `"rbar_bits"` |
/// | `sweep_values` | `[]` | strictly increasing values of the swept key |
/// | `mc_runs` | 100 | Monte Carlo draws per sweep point |
/// | `base_seed` | 1 | root of all per-run seeds |
/// | `output` | none | output path |
/// | `output_format` | `"csv"` | `"csv"` or `"jsonl"` |
/// | `threads` | 0 | worker threads, 0 for all cores |
/// | `record_wall_time` | false | fill `wall_time_ms`; makes output non-reproducible |
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub num_antennas: usize,
    pub users_per_zone: usize,
    pub pmax_dbm: f64,
    pub rbar_bits: f64,
    pub noise_density_dbm_hz: f64,
    pub bandwidth_hz: f64,
    pub cell_radius_m: f64,
    pub zone1_radius_m: f64,
    pub min_distance_m: f64,

    pub conv_tol: f64,
    pub max_iters: usize,
    pub init_max_iters: usize,
    pub init_stall_window: usize,
    pub init_stall_tol: f64,
    pub trust_margin: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub conic_tol: f64,
    pub feas_tol: f64,
    pub ascent_tol: f64,

    pub schemes: Vec<String>,
    pub sweep_axis: SweepAxis,
    pub sweep_values: Vec<f64>,
    pub mc_runs: usize,
    pub base_seed: u64,
    pub output: Option<String>,
    pub output_format: OutputFormat,
    pub threads: usize,
    pub record_wall_time: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::from_system(&SystemConfig::default())
    }
}

impl ExperimentConfig {
    pub fn from_system(sys: &SystemConfig) -> Self {
        let s = &sys.solver;
        Self {
            num_antennas: sys.num_antennas,
            users_per_zone: sys.users_per_zone,
            pmax_dbm: sys.pmax_dbm,
            rbar_bits: sys.rbar_bits,
            noise_density_dbm_hz: sys.noise_density_dbm_hz,
            bandwidth_hz: sys.bandwidth_hz,
            cell_radius_m: sys.cell_radius_m,
            zone1_radius_m: sys.zone1_radius_m,
            min_distance_m: sys.min_distance_m,
            conv_tol: s.conv_tol,
            max_iters: s.max_iters,
            init_max_iters: s.init_max_iters,
            init_stall_window: s.init_stall_window,
            init_stall_tol: s.init_stall_tol,
            trust_margin: s.trust_margin,
            alpha_min: s.alpha_min,
            alpha_max: s.alpha_max,
            conic_tol: s.conic_tol,
            feas_tol: s.feas_tol,
            ascent_tol: s.ascent_tol,
            schemes: vec!["ft".into(), "conventional-dl".into()],
            sweep_axis: SweepAxis::None,
            sweep_values: Vec::new(),
            mc_runs: 100,
            base_seed: 1,
            output: None,
            output_format: OutputFormat::Csv,
            threads: 0,
            record_wall_time: false,
        }
    }

    pub fn system(&self) -> SystemConfig {
        SystemConfig {
            num_antennas: self.num_antennas,
            users_per_zone: self.users_per_zone,
            pmax_dbm: self.pmax_dbm,
            rbar_bits: self.rbar_bits,
            noise_density_dbm_hz: self.noise_density_dbm_hz,
            bandwidth_hz: self.bandwidth_hz,
            cell_radius_m: self.cell_radius_m,
            zone1_radius_m: self.zone1_radius_m,
            min_distance_m: self.min_distance_m,
            solver: SolverSettings {
                conv_tol: self.conv_tol,
                max_iters: self.max_iters,
                init_max_iters: self.init_max_iters,
                init_stall_window: self.init_stall_window,
                init_stall_tol: self.init_stall_tol,
                trust_margin: self.trust_margin,
                alpha_min: self.alpha_min,
                alpha_max: self.alpha_max,
                conic_tol: self.conic_tol,
                feas_tol: self.feas_tol,
                ascent_tol: self.ascent_tol,
            },
        }
    }

    /// Parses and validates a flat TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::ConfigParse(msg) => Error::ConfigParse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.system().validate()?;
        if self.schemes.is_empty() {
            return Err(Error::InvalidConfig("`schemes` must not be empty".into()));
        }
        for name in &self.schemes {
            Scheme::parse(name)?;
        }
        if self.mc_runs == 0 {
            return Err(Error::InvalidConfig("`mc_runs` must be at least 1".into()));
        }
        match self.sweep_axis {
            SweepAxis::None => {
                if !self.sweep_values.is_empty() {
                    return Err(Error::InvalidConfig(
                        "`sweep_values` given but `sweep_axis` is \"none\"".into(),
                    ));
                }
            }
            _ => {
                if self.sweep_values.is_empty() {
                    return Err(Error::InvalidConfig("`sweep_values` must not be empty".into()));
                }
                if self.sweep_values.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidConfig(
                        "`sweep_values` must be strictly increasing".into(),
                    ));
                }
                if self.sweep_axis == SweepAxis::RbarBits && self.sweep_values[0] < 0.0 {
                    return Err(Error::InvalidConfig("QoS targets must be non-negative".into()));
                }
            }
        }
        Ok(())
    }

    /// `(pmax_dbm, rbar_bits)` for every sweep point.
    pub fn sweep_points(&self) -> Vec<(f64, f64)> {
        match self.sweep_axis {
            SweepAxis::None => vec![(self.pmax_dbm, self.rbar_bits)],
            SweepAxis::PmaxDbm => self.sweep_values.iter().map(|&p| (p, self.rbar_bits)).collect(),
            SweepAxis::RbarBits => self.sweep_values.iter().map(|&r| (self.pmax_dbm, r)).collect(),
        }
    }

    /// Power sweep `{10, 14, ..., 38}` dBm.
    pub fn default_pmax_grid() -> Vec<f64> {
        (0..8).map(|i| 10.0 + 4.0 * i as f64).collect()
    }

    /// QoS sweep `{0.2, 0.4, ..., 1.2}` bits/s/Hz.
    pub fn default_rbar_grid() -> Vec<f64> {
        (1..=6).map(|i| 0.2 * i as f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = ExperimentConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.system(), SystemConfig::default());
    }

    #[test]
    fn parses_flat_keys() {
        let cfg = ExperimentConfig::from_toml_str(
            r#"
            pmax_dbm = 20
            rbar_bits = 1.0
            schemes = ["ft"]
            sweep_axis = "pmax_dbm"
            sweep_values = [10, 20, 30]
            mc_runs = 7
            output_format = "jsonl"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.mc_runs, 7);
        assert_eq!(cfg.output_format, OutputFormat::Jsonl);
        assert_eq!(cfg.sweep_points(), vec![(10.0, 1.0), (20.0, 1.0), (30.0, 1.0)]);
    }

    #[test]
    fn unknown_key_is_reported_with_location() {
        let err = ExperimentConfig::from_toml_str("mc_runs = 3\npmax_dbn = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("pmax_dbn"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn wrong_type_is_reported() {
        let err = ExperimentConfig::from_toml_str("mc_runs = \"many\"").unwrap_err();
        assert!(err.to_string().contains("mc_runs"), "{err}");
    }

    #[test]
    fn invariants_enforced() {
        assert!(ExperimentConfig::from_toml_str("schemes = []").is_err());
        assert!(ExperimentConfig::from_toml_str("mc_runs = 0").is_err());
        assert!(ExperimentConfig::from_toml_str("schemes = [\"bogus\"]").is_err());
        assert!(ExperimentConfig::from_toml_str(
            "sweep_axis = \"pmax_dbm\"\nsweep_values = [10, 10]"
        )
        .is_err());
        // declared but unimplemented schemes are accepted and reported per run
        assert!(ExperimentConfig::from_toml_str("schemes = [\"noma\"]").is_ok());
    }

    #[test]
    fn default_grids() {
        assert_eq!(ExperimentConfig::default_pmax_grid(), vec![10.0, 14.0, 18.0, 22.0, 26.0, 30.0, 34.0, 38.0]);
        let r = ExperimentConfig::default_rbar_grid();
        assert_eq!(r.len(), 6);
        assert!((r[5] - 1.2).abs() < 1e-12);
    }
}
