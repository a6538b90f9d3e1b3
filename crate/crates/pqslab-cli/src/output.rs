//! Deterministic CSV and JSON serialization of sweep rows. Floats carry 17
//! significant digits so files round-trip exactly.

use std::io::Write;
use std::path::{Path, PathBuf};

use pqslab::ResultRow;

/// 17 significant digits, locale-free.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Column layout for criteria rows; delta-phi offsets append one column each.
pub fn csv_header(offsets: &[f64]) -> String {
    let mut cols = vec![
        "coupling".to_string(),
        "mean_n".to_string(),
        "mean_n_plus".to_string(),
        "mean_jx_t".to_string(),
        "var_jx_t".to_string(),
        "var_jy_t".to_string(),
        "var_jz_t".to_string(),
        "e_hz".to_string(),
        "e_ph".to_string(),
        "xi_s_y".to_string(),
        "xi_s_z".to_string(),
        "xi_s_ph_y".to_string(),
        "xi_s_ph_z".to_string(),
        "eta_ph".to_string(),
        "entangled_modes".to_string(),
        "entangled_particles".to_string(),
        "subshot_all_angles".to_string(),
        "mz_phase".to_string(),
        "delta_phi_worst".to_string(),
    ];
    for (i, _) in offsets.iter().enumerate() {
        cols.push(format!("delta_phi_{i}"));
    }
    cols.join(",")
}

pub fn csv_row(row: &ResultRow) -> String {
    let r = &row.report;
    let m = &row.moments;
    let mut cols = vec![
        fmt_f64(row.coupling),
        fmt_f64(row.mean_n),
        fmt_f64(m.mean_n_plus),
        fmt_f64(m.mean_jx_t),
        fmt_f64(m.var_jx_t),
        fmt_f64(m.var_jy_t),
        fmt_f64(m.var_jz_t),
        fmt_f64(r.e_hz),
        fmt_f64(r.e_ph),
        fmt_opt(r.xi_s_y),
        fmt_opt(r.xi_s_z),
        fmt_f64(r.xi_s_ph_y),
        fmt_f64(r.xi_s_ph_z),
        fmt_f64(r.eta_ph),
        r.entangled_modes.to_string(),
        r.entangled_particles.to_string(),
        r.subshot_all_angles.to_string(),
        fmt_opt(row.mz_phase),
        fmt_opt(row.delta_phi_worst),
    ];
    for p in &row.delta_phi {
        cols.push(fmt_opt(p.delta_phi));
    }
    cols.join(",")
}

/// JSON mirror of one row (field order fixed by declaration).
#[derive(serde::Serialize)]
pub struct JsonRow {
    pub coupling: f64,
    pub mean_n: f64,
    pub mean_n_plus: f64,
    pub mean_jx_t: f64,
    pub var_jx_t: f64,
    pub var_jy_t: f64,
    pub var_jz_t: f64,
    pub e_hz: f64,
    pub e_ph: f64,
    pub xi_s_y: Option<f64>,
    pub xi_s_z: Option<f64>,
    pub xi_s_ph_y: f64,
    pub xi_s_ph_z: f64,
    pub eta_ph: f64,
    pub entangled_modes: bool,
    pub entangled_particles: bool,
    pub subshot_all_angles: bool,
    pub mz_phase: Option<f64>,
    pub delta_phi_worst: Option<f64>,
    pub delta_phi: Vec<DeltaPhiSample>,
}

#[derive(serde::Serialize)]
pub struct DeltaPhiSample {
    pub offset: f64,
    pub delta_phi: Option<f64>,
}

impl From<&ResultRow> for JsonRow {
    fn from(row: &ResultRow) -> Self {
        let r = &row.report;
        let m = &row.moments;
        JsonRow {
            coupling: row.coupling,
            mean_n: row.mean_n,
            mean_n_plus: m.mean_n_plus,
            mean_jx_t: m.mean_jx_t,
            var_jx_t: m.var_jx_t,
            var_jy_t: m.var_jy_t,
            var_jz_t: m.var_jz_t,
            e_hz: r.e_hz,
            e_ph: r.e_ph,
            xi_s_y: r.xi_s_y,
            xi_s_z: r.xi_s_z,
            xi_s_ph_y: r.xi_s_ph_y,
            xi_s_ph_z: r.xi_s_ph_z,
            eta_ph: r.eta_ph,
            entangled_modes: r.entangled_modes,
            entangled_particles: r.entangled_particles,
            subshot_all_angles: r.subshot_all_angles,
            mz_phase: row.mz_phase,
            delta_phi_worst: row.delta_phi_worst,
            delta_phi: row
                .delta_phi
                .iter()
                .map(|p| DeltaPhiSample {
                    offset: p.offset,
                    delta_phi: p.delta_phi,
                })
                .collect(),
        }
    }
}

/// Writes to `<dir>/<name>` or stdout when no directory was given.
pub fn emit(dir: Option<&Path>, name: &str, content: &str) -> std::io::Result<Option<PathBuf>> {
    match dir {
        Some(d) => {
            std::fs::create_dir_all(d)?;
            let path = d.join(name);
            let mut f = std::fs::File::create(&path)?;
            f.write_all(content.as_bytes())?;
            Ok(Some(path))
        }
        None => {
            print!("{content}");
            Ok(None)
        }
    }
}
