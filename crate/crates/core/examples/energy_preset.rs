//! Derivation of `EnergyParams::CALIBRATED`.
//!
//! The preset is not a measurement. It is solved from a handful of target
//! shares describing a server-inference-dominated conventional pipeline with
//! a cheap near-sensor model, and this example checks that the shipped
//! constants match the derivation.
//!
//! Run with: `cargo run --example energy_preset`

use sensegate::energy::EnergyParams;

fn main() {
    // Per-frame cost of the conventional system (capture + uplink + server).
    let conventional_frame = 1.75;
    // Shares of that cost.
    let server_share = 6.0 / 7.0;
    let tx_share = 0.8 / 7.0;
    let capture_share = 1.0 - server_share - tx_share;
    // The low-resolution camera costs a fifth of the high-resolution one.
    let low_to_high = 0.2;
    // Near-sensor inference relative to one conventional frame.
    let near_share = 0.02 / 1.75;

    let derived = EnergyParams {
        e_cam_high: conventional_frame * capture_share,
        e_cam_low: conventional_frame * capture_share * low_to_high,
        e_near: conventional_frame * near_share,
        e_tx: conventional_frame * tx_share,
        e_server: conventional_frame * server_share,
        // one 1080p JPEG frame
        bytes_per_frame: 200_000,
    };
    let shipped = EnergyParams::CALIBRATED;

    let fields = [
        ("e_cam_low", derived.e_cam_low, shipped.e_cam_low),
        ("e_cam_high", derived.e_cam_high, shipped.e_cam_high),
        ("e_near", derived.e_near, shipped.e_near),
        ("e_tx", derived.e_tx, shipped.e_tx),
        ("e_server", derived.e_server, shipped.e_server),
    ];
    for (name, d, s) in fields {
        println!("{name:<10} derived {d:.6} J  shipped {s:.6} J");
        assert!((d - s).abs() < 1e-9, "{name} drifted from its derivation");
    }
    assert_eq!(derived.bytes_per_frame, shipped.bytes_per_frame);
    println!(
        "server inference is {:.1}% of a conventional frame; near-sensor model adds {:.2}%",
        100.0 * server_share,
        100.0 * near_share
    );
}
