//! Test-only reference interpreter of the transmission pseudocode.
//!
//! Written line by line against the published pseudocode with plain signed
//! integers and a real-valued threshold, sharing no code with `gate`.

#![allow(dead_code)]

pub struct ReferenceGate {
    n: i64,
    f_r: i64,
    f_min: i64,
    pub c1: i64,
    pub c2: i64,
    pub c3: i64,
}

impl ReferenceGate {
    /// `f_min = 0` means the minimum-frequency branch never fires.
    pub fn new(n: i64, f_r: i64, f_min: i64) -> Self {
        ReferenceGate { n, f_r, f_min, c1: 0, c2: 0, c3: 0 }
    }

    /// Returns D for prediction y.
    pub fn decide(&mut self, y: i64) -> i64 {
        if y == 1 {
            self.c1 = 0;
            self.c2 = 0;
            self.c3 = 0;
            return 1;
        }
        if self.c3 == 0 {
            self.c1 += 1;
            let n_new = f64::max(1.0, self.n as f64 / 2f64.powf(self.c2 as f64));
            if (self.c1 as f64) <= n_new {
                1
            } else {
                let (c2, c3) = (self.c2 + 1, self.c3 + 1);
                self.c1 = 0;
                self.c2 = c2;
                self.c3 = c3;
                0
            }
        } else {
            self.c3 += 1;
            if self.f_min != 0 && self.c3 == self.f_r / self.f_min {
                self.c1 += 1;
                self.c3 = 0;
                1
            } else {
                0
            }
        }
    }

    pub fn state(&self) -> (i64, i64, i64) {
        (self.c1, self.c2, self.c3)
    }
}

/// Decisions of the reference gate over `ys`.
pub fn reference_decisions(n: i64, f_r: i64, f_min: i64, ys: &[i64]) -> Vec<i64> {
    let mut g = ReferenceGate::new(n, f_r, f_min);
    ys.iter().map(|&y| g.decide(y)).collect()
}
