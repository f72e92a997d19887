//! On-disk formats: field JSON, invariants CSV, spectrum CSV, the matrix
//! invariant sidecar, and the run manifest.
//!
//! Field JSON is the interchange format:
//! `{ "d": d, "modes": [ { "n": n, "re": [[..];d], "im": [[..];d] } ] }`
//! with row-major matrices, modes in ascending `n`, zero matrices omitted.
//! Reading validates shapes, finiteness and duplicate modes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::Write as _;
use std::path::Path;

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::field::{CMat, MatrixField};
use crate::invariants::InvariantRecord;

#[derive(Serialize, Deserialize)]
struct ModeJson {
    n: i64,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    d: usize,
    modes: Vec<ModeJson>,
}

fn matrix_parts(m: &CMat) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let d = m.nrows();
    let mut re = vec![vec![0.0; d]; d];
    let mut im = vec![vec![0.0; d]; d];
    for r in 0..d {
        for c in 0..d {
            re[r][c] = m[(r, c)].re;
            im[r][c] = m[(r, c)].im;
        }
    }
    (re, im)
}

fn parts_to_matrix(d: usize, re: &[Vec<f64>], im: &[Vec<f64>], n: i64) -> Result<CMat> {
    let shape_ok =
        |rows: &[Vec<f64>]| rows.len() == d && rows.iter().all(|r| r.len() == d);
    if !shape_ok(re) || !shape_ok(im) {
        return Err(Error::InvalidField(format!(
            "mode {n}: matrices must be {d}x{d} row-major"
        )));
    }
    let mut m = CMat::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            let z = Complex64::new(re[r][c], im[r][c]);
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidField(format!(
                    "mode {n}: non-finite entry at ({r},{c})"
                )));
            }
            m[(r, c)] = z;
        }
    }
    Ok(m)
}

pub fn field_to_json(u: &MatrixField) -> serde_json::Value {
    let modes = u
        .modes()
        .map(|(n, m)| {
            let (re, im) = matrix_parts(m);
            ModeJson { n, re, im }
        })
        .collect();
    serde_json::to_value(FieldJson { d: u.d(), modes }).expect("field serializes")
}

pub fn write_field(path: &Path, u: &MatrixField) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&field_to_json(u))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn field_from_json(value: serde_json::Value) -> Result<MatrixField> {
    let parsed: FieldJson = serde_json::from_value(value)?;
    if parsed.d == 0 {
        return Err(Error::InvalidField("d must be at least 1".into()));
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut modes = Vec::with_capacity(parsed.modes.len());
    for mode in &parsed.modes {
        if !seen.insert(mode.n) {
            return Err(Error::InvalidField(format!("duplicate mode {}", mode.n)));
        }
        modes.push((mode.n, parts_to_matrix(parsed.d, &mode.re, &mode.im, mode.n)?));
    }
    MatrixField::from_modes(parsed.d, modes)
}

pub fn read_field(path: &Path) -> Result<MatrixField> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    field_from_json(value)
}

/// `t,E0_re,E0_im,...,EK_re,EK_im,herm_defect`, one row per record.
pub fn write_invariants_csv(path: &Path, records: &[InvariantRecord]) -> Result<()> {
    let k_e = records.first().map_or(0, |r| r.energies.len());
    let mut out = String::from("t");
    for k in 0..k_e {
        out.push_str(&format!(",E{k}_re,E{k}_im"));
    }
    out.push_str(",herm_defect\n");
    for rec in records {
        out.push_str(&format!("{:e}", rec.t));
        for e in &rec.energies {
            out.push_str(&format!(",{:e},{:e}", e.re, e.im));
        }
        out.push_str(&format!(",{:e}\n", rec.herm_defect));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// `t,index,eigenvalue`, eigenvalues ascending within each snapshot.
pub fn write_spectrum_csv(path: &Path, spectra: &[(f64, Vec<f64>)]) -> Result<()> {
    let mut out = String::from("t,index,eigenvalue\n");
    for (t, evs) in spectra {
        for (index, ev) in evs.iter().enumerate() {
            out.push_str(&format!("{t:e},{index},{ev:e}\n"));
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct MatrixEntryJson {
    /// Invariant order; the first stored order is -1.
    k: i64,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRecordJson {
    t: f64,
    matrices: Vec<MatrixEntryJson>,
}

/// Matrix invariants 𝓜_{-1}.. per snapshot, as a JSON array keyed by t.
pub fn write_matrix_sidecar(path: &Path, records: &[InvariantRecord]) -> Result<()> {
    let rows: Vec<MatrixRecordJson> = records
        .iter()
        .map(|rec| MatrixRecordJson {
            t: rec.t,
            matrices: rec
                .matrices
                .iter()
                .enumerate()
                .map(|(j, m)| {
                    let (re, im) = matrix_parts(m);
                    MatrixEntryJson {
                        k: j as i64 - 1,
                        re,
                        im,
                    }
                })
                .collect(),
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&rows)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub index: usize,
    pub step: usize,
    pub t: f64,
    pub file: String,
}

/// Everything needed to reproduce and interpret a run. The timestamp is
/// informational and excluded from determinism comparisons.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub seed: u64,
    pub timestamp: String,
    pub dt_actual: f64,
    pub n_steps: usize,
    pub warnings: Vec<String>,
    pub config: SimConfig,
    pub snapshots: Vec<SnapshotMeta>,
}

pub fn write_manifest(path: &Path, manifest: &RunManifest) -> Result<()> {
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Write a full trajectory into `dir`: `snap_<index>.json` per snapshot,
/// `invariants.csv`, the matrix sidecar, `spectrum.csv` when spectra were
/// recorded, and `run_manifest.json`. Returns the manifest.
pub fn write_trajectory(
    dir: &Path,
    config: &SimConfig,
    warnings: &[String],
    trajectory: &crate::dynamics::Trajectory,
) -> Result<RunManifest> {
    std::fs::create_dir_all(dir)?;
    let mut metas = Vec::new();
    for snap in &trajectory.snapshots {
        let file = format!("snap_{}.json", snap.index);
        write_field(&dir.join(&file), &snap.u)?;
        metas.push(SnapshotMeta {
            index: snap.index,
            step: snap.step,
            t: snap.t,
            file,
        });
    }
    write_invariants_csv(&dir.join("invariants.csv"), &trajectory.records)?;
    write_matrix_sidecar(&dir.join("matrix_invariants.json"), &trajectory.records)?;
    if let Some(spectra) = &trajectory.spectra {
        write_spectrum_csv(&dir.join("spectrum.csv"), spectra)?;
    }

    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        timestamp: timestamp_utc(),
        dt_actual: trajectory.dt_actual,
        n_steps: trajectory.n_steps,
        warnings: warnings.to_vec(),
        config: config.clone(),
        snapshots: metas,
    };
    write_manifest(&dir.join("run_manifest.json"), &manifest)?;
    Ok(manifest)
}

/// Seconds since the Unix epoch, rendered as a plain integer string.
fn timestamp_utc() -> String {
    match std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH) {
        Ok(d) => d.as_secs().to_string(),
        Err(_) => "0".to_string(),
    }
}

/// Append-to-stderr diagnostic helper shared by the CLI.
pub fn warn_all(warnings: &[String], quiet: bool) {
    if quiet {
        return;
    }
    let mut err = std::io::stderr().lock();
    for w in warnings {
        let _ = writeln!(err, "warning: {w}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::init::random_hermitian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::path::PathBuf;

    fn temp_dir(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join("spinbo-io-tests").join(name);
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn field_json_round_trip_is_exact() {
        let mut rng = ChaCha12Rng::seed_from_u64(71);
        let u = random_hermitian(3, 4, 1.0, &mut rng);
        let path = temp_dir("round_trip").join("field.json");
        write_field(&path, &u).unwrap();
        let back = read_field(&path).unwrap();
        assert_eq!(back.d(), u.d());
        assert_eq!(back.num_modes(), u.num_modes());
        assert!(back.sub(&u).unwrap().norm_l2() == 0.0);
    }

    #[test]
    fn field_json_orders_modes_and_omits_zeros() {
        let u = MatrixField::from_modes(
            1,
            [
                (3, CMat::identity(1, 1)),
                (-2, CMat::identity(1, 1)),
                (0, CMat::zeros(1, 1)),
            ],
        )
        .unwrap();
        let json = field_to_json(&u);
        let ns: Vec<i64> = json["modes"]
            .as_array()
            .unwrap()
            .iter()
            .map(|m| m["n"].as_i64().unwrap())
            .collect();
        assert_eq!(ns, vec![-2, 3]);
    }

    #[test]
    fn read_rejects_malformed_fields() {
        let cases = [
            (r#"{"d":2,"modes":[{"n":0,"re":[[1.0]],"im":[[0.0]]}]}"#, "shape"),
            (
                r#"{"d":1,"modes":[{"n":0,"re":[[1.0]],"im":[[0.0]]},{"n":0,"re":[[2.0]],"im":[[0.0]]}]}"#,
                "duplicate",
            ),
            (r#"{"d":0,"modes":[]}"#, "dimension"),
        ];
        for (text, label) in cases {
            let value: serde_json::Value = serde_json::from_str(text).unwrap();
            assert!(field_from_json(value).is_err(), "{label}");
        }

        let nan = serde_json::json!({
            "d": 1,
            "modes": [{"n": 0, "re": [[f64::NAN]], "im": [[0.0]]}]
        });
        // NaN does not survive JSON serialization, but guard direct values too
        assert!(field_from_json(nan).is_err());
    }

    #[test]
    fn invariants_csv_has_expected_header_and_rows() {
        let rec = InvariantRecord {
            t: 0.5,
            energies: vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, -1.0)],
            matrices: vec![CMat::identity(2, 2)],
            herm_defect: 1e-14,
        };
        let path = temp_dir("csv").join("invariants.csv");
        write_invariants_csv(&path, &[rec]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,E0_re,E0_im,E1_re,E1_im,herm_defect");
        let row = lines.next().unwrap();
        assert!(row.starts_with("5e-1,1e0,0e0,2e0,-1e0"));
    }

    #[test]
    fn manifest_round_trips_through_json() {
        let config = crate::config::SimConfig::default();
        let manifest = RunManifest {
            version: "0.1.0".into(),
            seed: 9,
            timestamp: "0".into(),
            dt_actual: 1e-3,
            n_steps: 10,
            warnings: vec!["w".into()],
            config,
            snapshots: vec![SnapshotMeta {
                index: 0,
                step: 0,
                t: 0.0,
                file: "snap_0.json".into(),
            }],
        };
        let path = temp_dir("manifest").join("run_manifest.json");
        write_manifest(&path, &manifest).unwrap();
        let back = read_manifest(&path).unwrap();
        assert_eq!(back.seed, 9);
        assert_eq!(back.n_steps, 10);
        assert_eq!(back.snapshots[0].file, "snap_0.json");
        assert_eq!(back.config.d, manifest.config.d);
    }

    #[test]
    fn spectrum_csv_rows_are_t_index_value() {
        let path = temp_dir("spectrum").join("spectrum.csv");
        write_spectrum_csv(&path, &[(0.0, vec![0.5, 1.5])]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,index,eigenvalue");
        assert_eq!(lines[1], "0e0,0,5e-1");
        assert_eq!(lines[2], "0e0,1,1.5e0");
    }
}
