//! A reduced (T, M, f_min, N) sweep printed as heatmap-style tables, followed
//! by the Spearman matrix.
//!
//! Run with: `cargo run --release --example parameter_sweep`
//! (pass `full` to run the built-in default grid instead).

use sensegate::expctl::{run_sweep, spearman_matrix, SweepGrid, SweepRow};

fn table(rows: &[SweepRow], m: f64, f_min: u32, pick: impl Fn(&SweepRow) -> Option<f64>) {
    let mut ns: Vec<u32> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
    ts.dedup();
    print!("      ");
    for n in &ns {
        print!(" N={n:<5}");
    }
    println!();
    for t in ts {
        print!("T={t:<4}");
        for &n in &ns {
            let r = rows
                .iter()
                .find(|r| r.t == t && r.n == n && r.m == m && r.fmin == f_min)
                .unwrap();
            match pick(r) {
                Some(v) => print!(" {v:>6.3} "),
                None => print!("    -   "),
            }
        }
        println!();
    }
}

fn main() {
    let full = std::env::args().any(|a| a == "full");
    let grid = if full {
        SweepGrid::default()
    } else {
        SweepGrid {
            t_values: vec![0.2, 0.5, 0.8],
            m_values: vec![1.0, 20.0],
            fmin_values: vec![0.0, 0.5],
            n_values: vec![1, 4, 8],
            ..SweepGrid::default()
        }
    };
    let rows = run_sweep(&grid).unwrap();
    println!("{} grid points x {} replicates\n", rows.len(), grid.replicates);

    let f_r = grid.f_r as f64;
    for &m in &grid.m_values {
        for &frac in &grid.fmin_values {
            let f_min = (frac * f_r).round() as u32;
            println!("M = {m}, f_min = {f_min} Hz: p_miss");
            table(&rows, m, f_min, |r| r.p_miss_mean);
            println!("M = {m}, f_min = {f_min} Hz: p_trans");
            table(&rows, m, f_min, |r| Some(r.p_trans_mean));
            println!();
        }
    }

    println!("Spearman coefficients:");
    spearman_matrix(&rows).write_csv(std::io::stdout()).unwrap();
}
