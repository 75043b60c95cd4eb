use super::integrator::Trajectory;
use crate::scalar::Real;

/// Formats a value with 17 significant digits (round-trips an `f64`).
pub fn format_sig17<T: Real>(x: T) -> String {
    format!("{:.16e}", x.to_f64_lossy())
}

impl<T: Real> Trajectory<T> {
    /// CSV with columns `t, Y_0..Y_N` and a header row.
    pub fn to_csv(&self) -> String {
        let width = self.samples.first().map_or(0, |s| s.values.len());
        let mut out = String::from("t");
        for n in 0..width {
            out.push_str(&format!(",Y_{n}"));
        }
        out.push('\n');
        for s in &self.samples {
            out.push_str(&format_sig17(s.time));
            for &v in &s.values {
                out.push(',');
                out.push_str(&format_sig17(v));
            }
            out.push('\n');
        }
        out
    }
}
