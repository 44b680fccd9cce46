//! CSV renderings. Reals carry 17 significant digits so they round-trip.

use spectral_search_core::classify::{FamilyRow, InstanceMetrics};
use spectral_search_core::walk::FidelityCurve;

use crate::error::CliError;

pub fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

fn finish(writer: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = writer.into_inner().map_err(|e| CliError::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Serialize(e.to_string()))
}

/// Columns t, f_direct, f_spectral, marker; the critical time is inserted as
/// an extra row marked `t_star`.
pub fn curve_csv(curve: &FidelityCurve, direct_at_t_star: Option<f64>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "f_direct", "f_spectral", "marker"])?;
    let mut star_pending = true;
    for (i, &t) in curve.times.iter().enumerate() {
        if star_pending && curve.t_star <= t {
            w.write_record([
                real(curve.t_star),
                opt_real(direct_at_t_star),
                real(curve.f_at_t_star),
                "t_star".into(),
            ])?;
            star_pending = false;
        }
        let direct = curve.f_direct.as_ref().map(|d| d[i]);
        w.write_record([real(t), opt_real(direct), real(curve.f_spectral[i]), String::new()])?;
    }
    if star_pending {
        w.write_record([
            real(curve.t_star),
            opt_real(direct_at_t_star),
            real(curve.f_at_t_star),
            "t_star".into(),
        ])?;
    }
    finish(w)
}

pub fn sweep_csv(rows: &[InstanceMetrics]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = [
        "family",
        "size_param",
        "num_vertices",
        "compressed",
        "eps1",
        "eps2",
        "delta2",
        "s1",
        "s2",
        "s3",
        "gamma",
        "zeta1",
        "zeta2",
        "delta_plus",
        "delta_minus",
        "overlap1",
        "t_star",
        "f_at_t_star",
        "peak_value",
        "peak_time",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    if let Some(first) = rows.first() {
        header.extend(first.around_s1.iter().map(|c| format!("i_alpha_{}", c.alpha)));
    }
    header.push("audit_flags".into());
    w.write_record(&header)?;
    for m in rows {
        let mut record = vec![
            m.family_id.clone(),
            m.size_param.to_string(),
            m.num_vertices.to_string(),
            m.compressed.to_string(),
        ];
        record.extend(
            [
                m.eps1,
                m.eps2,
                m.delta2,
                m.s1,
                m.s2,
                m.s3,
                m.gamma,
                m.zeta1,
                m.zeta2,
                m.delta_plus,
                m.delta_minus,
                m.overlap1,
                m.t_star,
                m.f_at_t_star,
                m.peak_value,
                m.peak_time,
            ]
            .into_iter()
            .map(real),
        );
        record.extend(m.around_s1.iter().map(|c| c.count.to_string()));
        record.push(m.audit_flags.join(";"));
        w.write_record(&record)?;
    }
    finish(w)
}

pub fn families_csv(rows: &[FamilyRow]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "family",
        "spec",
        "sizes",
        "groverian",
        "expected",
        "eps1_exponent",
        "delta2_exponent",
        "delta2_model",
        "s1_exponent",
        "ratio_min",
        "ratio_max",
        "notes",
    ])?;
    for r in rows {
        let sizes: Vec<String> = r.sizes.iter().map(|s| s.to_string()).collect();
        let model = match r.delta2_model {
            spectral_search_core::classify::FitModel::PowerInN => "power_in_n",
            spectral_search_core::classify::FitModel::PowerInParam => "power_in_param",
            spectral_search_core::classify::FitModel::ExponentialInParam => "exponential_in_param",
        };
        w.write_record([
            r.label.clone(),
            r.family_spec.clone(),
            sizes.join(";"),
            r.verdict.to_string(),
            r.expected.map(|e| e.to_string()).unwrap_or_default(),
            opt_real(r.eps1_exponent),
            opt_real(r.delta2_exponent),
            model.to_string(),
            opt_real(r.s1_exponent),
            real(r.ratio_min),
            real(r.ratio_max),
            r.notes.join("; "),
        ])?;
    }
    finish(w)
}
