//! Run configuration: schema, defaults, TOML loading, dotted-path
//! overrides, validation, initial-data construction.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{CMat, MatrixField};
use crate::{init, io};

/// Hard-limit thresholds monitored during integration.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Abort when any invariant's relative drift exceeds this.
    pub drift_hard_limit: f64,
    /// Abort when the Hermitian defect exceeds this (relative to field size).
    pub herm_hard_limit: f64,
    /// Abort when the field norm exceeds this (blow-up guard).
    pub norm_cap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            drift_hard_limit: 1e-6,
            herm_hard_limit: 1e-8,
            norm_cap: 1e6,
        }
    }
}

/// Initial-data presets. The file format is the field JSON described in
/// [`crate::io`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `amplitude · 2cos(x) · H` for a Hermitian matrix `H` (identity by
    /// default), given as row-major real and imaginary parts.
    Cosine {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        matrix_re: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        matrix_im: Option<Vec<Vec<f64>>>,
    },
    /// Seeded random Hermitian data with exact exponential coefficient
    /// decay `‖Û(n)‖ = amplitude · e^{-rate·n}`.
    DecayRandom {
        #[serde(default = "half")]
        amplitude: f64,
        #[serde(default = "half")]
        rate: f64,
        #[serde(default = "three")]
        bandwidth: i64,
    },
    /// Field JSON read from disk.
    File { path: String },
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn three() -> i64 {
    3
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData::DecayRandom {
            amplitude: half(),
            rate: half(),
            bandwidth: three(),
        }
    }
}

/// Full simulation configuration. Every field has a default, so a config
/// file only needs to state what it changes; unknown keys are rejected.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Matrix dimension.
    pub d: usize,
    /// Galerkin bandwidth M: modes are kept for |n| ≤ M.
    pub bandwidth: usize,
    /// Section size N for spectra (modes 0..=N).
    pub hardy_modes: usize,
    /// Requested time step; capped by the nonlinear step-size guard.
    pub dt: f64,
    pub t_end: f64,
    /// Steps between stored snapshots.
    pub snapshot_stride: usize,
    pub seed: u64,
    /// Highest scalar invariant order recorded.
    pub energy_orders: usize,
    /// Highest matrix invariant order recorded (from -1 up).
    pub matrix_orders: i64,
    /// Record the Lax spectrum at each snapshot.
    pub emit_spectra: bool,
    pub initial: InitialData,
    pub tolerances: Tolerances,
    /// Output directory.
    pub outputs: String,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            d: 2,
            bandwidth: 64,
            hardy_modes: 128,
            dt: 1e-3,
            t_end: 1.0,
            snapshot_stride: 100,
            seed: 0,
            energy_orders: 4,
            matrix_orders: 2,
            emit_spectra: false,
            initial: InitialData::default(),
            tolerances: Tolerances::default(),
            outputs: "out".into(),
        }
    }
}

fn set_path(root: &mut toml::Table, path: &str, value: toml::Value) -> Result<()> {
    let mut parts = path.split('.').peekable();
    let mut table = root;
    while let Some(part) = parts.next() {
        if part.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "empty path segment in override '{path}'"
            )));
        }
        if parts.peek().is_none() {
            table.insert(part.to_string(), value);
            return Ok(());
        }
        let entry = table
            .entry(part.to_string())
            .or_insert(toml::Value::Table(toml::Table::new()));
        table = entry.as_table_mut().ok_or_else(|| {
            Error::InvalidConfig(format!(
                "override '{path}': '{part}' is not a table"
            ))
        })?;
    }
    unreachable!("split yields at least one segment")
}

fn parse_override_value(raw: &str) -> toml::Value {
    // interpret the right-hand side as a TOML literal when possible,
    // otherwise as a bare string (lets `--set initial.kind=cosine` work)
    match format!("v = {raw}").parse::<toml::Table>() {
        Ok(table) => table.get("v").cloned().unwrap_or(toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

impl SimConfig {
    /// Load a config: defaults, overlaid by the optional TOML file,
    /// overlaid by `key=value` overrides using dotted paths
    /// (`--set tolerances.norm_cap=1e8`).
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<SimConfig> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                text.parse::<toml::Table>()
                    .map_err(|e| Error::InvalidConfig(format!("{}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        for item in overrides {
            let (key, value) = item.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("override '{item}' is not key=value"))
            })?;
            set_path(&mut table, key.trim(), parse_override_value(value.trim()))?;
        }
        SimConfig::deserialize(toml::Value::Table(table))
            .map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Check invariants; hard violations are errors, soft ones come back
    /// as warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.d == 0 {
            return Err(Error::InvalidConfig("d must be at least 1".into()));
        }
        if self.bandwidth == 0 {
            return Err(Error::InvalidConfig("bandwidth must be at least 1".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig("dt must be positive".into()));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidConfig("t_end must be nonnegative".into()));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidConfig(
                "snapshot_stride must be at least 1".into(),
            ));
        }
        if self.matrix_orders < -1 {
            return Err(Error::InvalidConfig(
                "matrix_orders must be at least -1".into(),
            ));
        }
        let t = &self.tolerances;
        if !(t.drift_hard_limit > 0.0 && t.herm_hard_limit > 0.0 && t.norm_cap > 0.0) {
            return Err(Error::InvalidConfig(
                "tolerances must all be positive".into(),
            ));
        }
        if let InitialData::DecayRandom { bandwidth, .. } = self.initial {
            if bandwidth < 0 {
                return Err(Error::InvalidConfig(
                    "initial.bandwidth must be nonnegative".into(),
                ));
            }
        }

        let mut warnings = Vec::new();
        if self.hardy_modes < 2 * self.bandwidth {
            warnings.push(format!(
                "hardy_modes = {} is below 2 x bandwidth = {}; spectrum tails will be inaccurate",
                self.hardy_modes,
                2 * self.bandwidth
            ));
        }
        Ok(warnings)
    }

    /// Build the configured initial field.
    pub fn build_initial(&self) -> Result<MatrixField> {
        match &self.initial {
            InitialData::Cosine {
                amplitude,
                matrix_re,
                matrix_im,
            } => {
                let h = match (matrix_re, matrix_im) {
                    (None, None) => None,
                    _ => Some(build_matrix(self.d, matrix_re.as_deref(), matrix_im.as_deref())?),
                };
                init::cosine_field(self.d, *amplitude, h.as_ref())
            }
            InitialData::DecayRandom {
                amplitude,
                rate,
                bandwidth,
            } => Ok(init::decay_field(
                self.d, *bandwidth, *amplitude, *rate, self.seed,
            )),
            InitialData::File { path } => {
                let u = io::read_field(Path::new(path))?;
                if u.d() != self.d {
                    return Err(Error::InvalidConfig(format!(
                        "field file has d = {}, config has d = {}",
                        u.d(),
                        self.d
                    )));
                }
                Ok(u)
            }
        }
    }
}

fn build_matrix(
    d: usize,
    re: Option<&[Vec<f64>]>,
    im: Option<&[Vec<f64>]>,
) -> Result<CMat> {
    let check = |name: &str, rows: &[Vec<f64>]| -> Result<()> {
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidConfig(format!(
                "initial.{name} must be a {d}x{d} row-major matrix"
            )));
        }
        Ok(())
    };
    if let Some(rows) = re {
        check("matrix_re", rows)?;
    }
    if let Some(rows) = im {
        check("matrix_im", rows)?;
    }
    let mut m = CMat::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            let re_v = re.map_or(0.0, |rows| rows[r][c]);
            let im_v = im.map_or(0.0, |rows| rows[r][c]);
            m[(r, c)] = num_complex::Complex64::new(re_v, im_v);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_cleanly() {
        let config = SimConfig::default();
        assert!(config.validate().unwrap().is_empty());
        assert!(matches!(config.initial, InitialData::DecayRandom { .. }));
    }

    #[test]
    fn toml_round_trip_preserves_config() {
        let config = SimConfig {
            dt: 5e-4,
            initial: InitialData::Cosine {
                amplitude: 2.0,
                matrix_re: None,
                matrix_im: None,
            },
            ..SimConfig::default()
        };
        let text = config.to_toml_string();
        let dir = std::env::temp_dir().join("spinbo-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("round_trip.toml");
        std::fs::write(&path, &text).unwrap();
        let back = SimConfig::load(Some(&path), &[]).unwrap();
        assert_eq!(back.dt, 5e-4);
        assert!(matches!(back.initial, InitialData::Cosine { amplitude, .. } if amplitude == 2.0));
    }

    #[test]
    fn overrides_reach_nested_fields() {
        let config = SimConfig::load(
            None,
            &[
                "dt=2e-3".into(),
                "tolerances.norm_cap=1e8".into(),
                "initial.kind=cosine".into(),
                "initial.amplitude=0.25".into(),
            ],
        )
        .unwrap();
        assert_eq!(config.dt, 2e-3);
        assert_eq!(config.tolerances.norm_cap, 1e8);
        assert!(
            matches!(config.initial, InitialData::Cosine { amplitude, .. } if amplitude == 0.25)
        );
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            SimConfig::load(None, &["bandwdith=32".into()]),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn invalid_values_are_rejected() {
        for bad in ["d=0", "dt=0.0", "snapshot_stride=0", "tolerances.norm_cap=-1.0"] {
            let config = SimConfig::load(None, &[bad.into()]).unwrap();
            assert!(config.validate().is_err(), "{bad}");
        }
    }

    #[test]
    fn low_hardy_modes_warns() {
        let config = SimConfig::load(None, &["hardy_modes=16".into()]).unwrap();
        assert_eq!(config.validate().unwrap().len(), 1);
    }

    #[test]
    fn initial_builders_produce_expected_shapes() {
        let config = SimConfig::load(None, &[]).unwrap();
        let u = config.build_initial().unwrap();
        assert_eq!(u.d(), 2);
        assert_eq!(u.bandwidth(), 3);
        assert!(u.herm_defect() < 1e-14);

        let cosine = SimConfig::load(
            None,
            &["initial.kind=cosine".into(), "d=3".into()],
        )
        .unwrap();
        let u = cosine.build_initial().unwrap();
        assert_eq!(u.bandwidth(), 1);
        assert_eq!(u.d(), 3);
    }

    #[test]
    fn cosine_rejects_non_hermitian_matrix() {
        let config = SimConfig::load(
            None,
            &[
                "initial.kind=cosine".into(),
                "initial.matrix_re=[[0.0,1.0],[0.0,0.0]]".into(),
            ],
        )
        .unwrap();
        assert!(config.build_initial().is_err());
    }
}
