//! CSV formatting shared by sweeps and validation reports.

use std::fmt::Write as _;

pub const SWEEP_HEADER: &str = "axis,axis_value,metric,variant,N,m,m_s,g_bar,r_d,beta,n0_dbm,lambda,gamma_th_db,value,error_estimate,seed,eta_db";

/// 17 significant digits, enough for an exact round trip.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis: &'static str,
    pub axis_value: f64,
    pub metric: &'static str,
    pub variant: &'static str,
    pub n_cells: u32,
    pub m: f64,
    pub m_s: f64,
    pub g_bar: f64,
    pub r_d: f64,
    pub beta: f64,
    pub n0_dbm: f64,
    pub lambda: f64,
    pub gamma_th_db: f64,
    pub value: f64,
    pub error_estimate: f64,
    pub seed: u64,
    pub eta_db: f64,
}

impl SweepRow {
    pub fn write(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.axis,
            fmt_f64(self.axis_value),
            self.metric,
            self.variant,
            self.n_cells,
            fmt_f64(self.m),
            fmt_f64(self.m_s),
            fmt_f64(self.g_bar),
            fmt_f64(self.r_d),
            fmt_f64(self.beta),
            fmt_f64(self.n0_dbm),
            fmt_f64(self.lambda),
            fmt_f64(self.gamma_th_db),
            fmt_f64(self.value),
            fmt_f64(self.error_estimate),
            self.seed,
            fmt_f64(self.eta_db),
        );
    }
}

pub fn render(rows: &[SweepRow]) -> String {
    let mut s = String::with_capacity(64 + rows.len() * 256);
    s.push_str(SWEEP_HEADER);
    s.push('\n');
    for r in rows {
        r.write(&mut s);
    }
    s
}
