//! Per-iteration run records and their CSV form.

use std::fmt::Write as _;

use crate::scalar::Scalar;

/// CSV header shared by every trace file.
pub const CSV_HEADER: &str = "iter,f,gap,gap_bound,root_residual,wall_ns";

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord<T> {
    /// Iteration index `k`.
    pub k: usize,
    pub x: Vec<T>,
    /// Reported objective value: `f(x^k)` for most schemes, the running
    /// minimum over `i = 1..k` for dual averaging, `f + P` for composite runs.
    pub f: T,
    /// `f − f*` when a reference optimum is known.
    pub gap: Option<T>,
    /// Theoretical bound on `gap`, when attached.
    pub gap_bound: Option<T>,
    /// Residual of the subproblem that produced `x^k` (absent at `k = 0`).
    pub root_residual: Option<T>,
    pub wall_ns: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TraceMeta {
    pub algorithm: String,
    pub l: Option<f64>,
    pub mu: Option<f64>,
    pub seed: u64,
    pub prng: String,
    pub objective: String,
    pub reference: String,
    pub f_star: Option<f64>,
    /// Iterations performed, including unrecorded ones.
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateTrace<T> {
    pub meta: TraceMeta,
    pub records: Vec<TraceRecord<T>>,
}

impl<T: Scalar> IterateTrace<T> {
    pub fn new(meta: TraceMeta) -> Self {
        Self { meta, records: Vec::new() }
    }

    pub fn last(&self) -> Option<&TraceRecord<T>> {
        self.records.last()
    }

    pub fn final_f(&self) -> Option<T> {
        self.last().map(|r| r.f)
    }

    /// Record indices start at 0 and strictly increase; values are finite.
    pub fn check_invariants(&self) -> Result<(), String> {
        match self.records.first() {
            None => return Err("trace has no records".into()),
            Some(r) if r.k != 0 => return Err(format!("first record has k = {}", r.k)),
            _ => {}
        }
        for w in self.records.windows(2) {
            if w[1].k <= w[0].k {
                return Err(format!("record indices not increasing at k = {}", w[1].k));
            }
        }
        if let Some(r) = self.records.iter().find(|r| !r.f.is_finite()) {
            return Err(format!("non-finite f at k = {}", r.k));
        }
        Ok(())
    }

    /// Fills the `gap` column from a reference optimum.
    pub fn set_reference_optimum(&mut self, f_star: T) {
        self.meta.f_star = Some(f_star.to_f64_lossy());
        for r in &mut self.records {
            r.gap = Some(r.f - f_star);
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = write!(out, "{},{}", r.k, fmt_float(r.f));
            for cell in [r.gap, r.gap_bound, r.root_residual] {
                out.push(',');
                if let Some(v) = cell {
                    out.push_str(&fmt_float(v));
                }
            }
            out.push(',');
            if let Some(ns) = r.wall_ns {
                let _ = write!(out, "{ns}");
            }
            out.push('\n');
        }
        out
    }
}

/// 17 significant digits in scientific notation.
pub fn fmt_float<T: Scalar>(v: T) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(k: usize, f: f64) -> TraceRecord<f64> {
        TraceRecord { k, x: vec![f], f, gap: None, gap_bound: None, root_residual: None, wall_ns: None }
    }

    #[test]
    fn csv_layout() {
        let mut t = IterateTrace::new(TraceMeta::default());
        t.records.push(rec(0, 1.5));
        let mut r = rec(1, 0.25);
        r.root_residual = Some(0.0);
        t.records.push(r);
        t.set_reference_optimum(0.25);
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "0,1.5000000000000000e0,1.2500000000000000e0,,,");
        assert_eq!(lines[2], "1,2.5000000000000000e-1,0.0000000000000000e0,,0.0000000000000000e0,");
    }

    #[test]
    fn invariants() {
        let mut t = IterateTrace::new(TraceMeta::default());
        assert!(t.check_invariants().is_err());
        t.records.push(rec(0, 1.0));
        t.records.push(rec(3, 0.5));
        assert!(t.check_invariants().is_ok());
        t.records.push(rec(3, 0.4));
        assert!(t.check_invariants().is_err());
    }
}
