//! Four-part energy breakdown of the gated system against the conventional one.
//!
//! Uses the calibrated energy preset on an M = 20 stream of 21336 frames.
//! The constants are calibrated, not measured, so only the ratios mean
//! anything.
//!
//! Run with: `cargo run --example energy_breakdown`

use sensegate::detector::{ScoreModel, Threshold};
use sensegate::energy::EnergyParams;
use sensegate::expctl::simulate;
use sensegate::gate::{CameraMode, GateConfig, PeriodMode};
use sensegate::stream::StreamSpec;

fn main() {
    let params = EnergyParams::CALIBRATED;
    let detector = ScoreModel::Calibrated {
        mu_bg: -3.0,
        sigma_bg: 1.0,
        mu_foi: 0.7,
        sigma_foi: 1.0,
    };
    let spec = StreamSpec::new(21_336, 20.0, 20, 11);
    let t = Threshold::new(0.5).unwrap();

    let dual = GateConfig::new(2, 30, 0, PeriodMode::Faithful).unwrap();
    let out = simulate(&spec, &detector, t, &dual, &params, 3, false).unwrap();

    let row = |name: &str, r: &sensegate::energy::EnergyReport| {
        println!(
            "{name:<14} sensor {:>9.1}  near {:>8.1}  tx {:>8.1}  server {:>9.1}  total {:>9.1} J  stored {:>6} MB",
            r.e_sensor,
            r.e_near_total,
            r.e_tx_total,
            r.e_server_total,
            r.e_total,
            r.storage_bytes / 1_000_000
        )
    };
    row("conventional", &out.baseline);
    row("gated", &out.energy);
    println!(
        "p_miss {:.2}%  p_trans {:.2}%  energy {:.1}% of conventional (savings {:.1}%)",
        100.0 * out.metrics.p_miss.unwrap(),
        100.0 * out.metrics.p_trans,
        100.0 * out.energy.e_total / out.baseline.e_total,
        100.0 * out.savings
    );

    // Sensor side only: dual-camera collaboration against a single high-res camera.
    let single = EnergyParams {
        e_cam_low: params.e_cam_high,
        ..params
    };
    let single_out = simulate(&spec, &detector, t, &dual, &single, 3, false).unwrap();
    println!(
        "sensor energy: dual camera {:.1} J vs single high-res camera {:.1} J",
        out.energy.e_sensor, single_out.energy.e_sensor
    );

    // Periodic frames on the high-res camera instead, with f_min = 10 Hz.
    let periodic = GateConfig::new(2, 30, 10, PeriodMode::Faithful).unwrap();
    for camera in [CameraMode::LowRes, CameraMode::HighRes] {
        let cfg = periodic.with_periodic_camera(camera);
        let o = simulate(&spec, &detector, t, &cfg, &params, 3, false).unwrap();
        println!(
            "f_min = 10 Hz, periodic frames on {:?}: sensor {:.1} J, total {:.1}% of conventional",
            camera,
            o.energy.e_sensor,
            100.0 * o.energy.e_total / o.baseline.e_total
        );
    }
}
