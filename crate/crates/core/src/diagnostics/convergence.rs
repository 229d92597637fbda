use std::fmt::Write as _;
use std::io::{self, Write};

use super::FieldNorms;

/// Errors of one mesh level against the reference solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRecord {
    pub h: f64,
    pub energy_error: f64,
    pub l2_error: f64,
    pub energy: FieldNorms,
    pub l2: FieldNorms,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub records: Vec<ErrorRecord>,
    /// `energy_orders[i]` compares records `i - 1` and `i`; `None` for the
    /// first record and whenever h does not decrease.
    pub energy_orders: Vec<Option<f64>>,
    pub l2_orders: Vec<Option<f64>>,
}

fn orders(records: &[ErrorRecord], err: impl Fn(&ErrorRecord) -> f64) -> Vec<Option<f64>> {
    (0..records.len())
        .map(|i| {
            if i == 0 {
                return None;
            }
            let (a, b) = (&records[i - 1], &records[i]);
            if !(a.h > b.h) {
                return None;
            }
            Some((err(a) / err(b)).ln() / (a.h / b.h).ln())
        })
        .collect()
}

fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

impl ConvergenceReport {
    pub fn new(records: Vec<ErrorRecord>) -> Self {
        let energy_orders = orders(&records, |r| r.energy_error);
        let l2_orders = orders(&records, |r| r.l2_error);
        ConvergenceReport { records, energy_orders, l2_orders }
    }

    pub fn final_energy_order(&self) -> Option<f64> {
        self.energy_orders.last().copied().flatten()
    }

    pub fn final_l2_order(&self) -> Option<f64> {
        self.l2_orders.last().copied().flatten()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "h,energy_error,energy_order,l2_error,l2_order")?;
        let opt = |o: Option<f64>| o.map(sig17).unwrap_or_default();
        for (i, r) in self.records.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{}",
                sig17(r.h),
                sig17(r.energy_error),
                opt(self.energy_orders[i]),
                sig17(r.l2_error),
                opt(self.l2_orders[i])
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }

    /// Human-readable table with 4 significant digits.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:>10}  {:>12}  {:>6}  {:>12}  {:>6}", "h", "energy", "order", "L2", "order");
        let opt = |o: Option<f64>| o.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into());
        for (i, r) in self.records.iter().enumerate() {
            let _ = writeln!(
                s,
                "{:>10.3e}  {:>12.3e}  {:>6}  {:>12.3e}  {:>6}",
                r.h,
                r.energy_error,
                opt(self.energy_orders[i]),
                r.l2_error,
                opt(self.l2_orders[i])
            );
        }
        s
    }
}
