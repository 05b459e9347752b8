use geogate::gates::SingleQubitGate;
use geogate::metrics::Axis;
use geogate::transmon::{qubit_state, simulate_single_qubit, sweep_omega_max, DragMode, TransmonOptions, TransmonParams};
use geogate::units::{mhz, to_mhz};

#[test]
fn correction_lowers_peak_leakage_across_drive_caps() {
    let psi = qubit_state(0.0);
    for om in [20.0, 30.0, 40.0, 50.0, 60.0] {
        let tp = TransmonParams::reference(mhz(om));
        let leak = [DragMode::Corrected, DragMode::Off].map(|drag| {
            let opts = TransmonOptions { drag, ..Default::default() };
            simulate_single_qubit(SingleQubitGate::H, &tp, &opts).unwrap().peak_leakage(&psi).unwrap()
        });
        assert!(leak[0] < leak[1], "Ω_M = 2π×{om} MHz: {leak:?}");
    }
}

#[test]
fn reversed_sign_increases_leakage() {
    let psi = qubit_state(0.0);
    let tp = TransmonParams::reference(mhz(51.0));
    let leak = [DragMode::Reversed, DragMode::Off].map(|drag| {
        let opts = TransmonOptions { drag, ..Default::default() };
        simulate_single_qubit(SingleQubitGate::H, &tp, &opts).unwrap().peak_leakage(&psi).unwrap()
    });
    assert!(leak[0] > leak[1], "{leak:?}");
}

/// Single interior maximum, located within 2π×5 MHz of 51 (H) and 38 (T) MHz.
#[test]
fn drive_cap_sweep_has_a_single_peak_near_the_optimum() {
    let axis = Axis::new("omega_max", mhz(10.0), mhz(80.0), 15).unwrap();
    let base = TransmonParams::reference(mhz(10.0));
    let opts = TransmonOptions::default();
    for (g, best) in [(SingleQubitGate::H, 51.0), (SingleQubitGate::T, 38.0)] {
        let v = sweep_omega_max(g, &base, &axis, &opts).unwrap().values;
        let peak = (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
        let rising = v[..=peak].windows(2).all(|w| w[1] >= w[0]);
        let falling = v[peak..].windows(2).all(|w| w[1] <= w[0]);
        let at = to_mhz(axis.values()[peak]);
        assert!(rising && falling, "{g}: not single-peaked: {v:?}");
        assert!((at - best).abs() <= 5.0, "{g}: optimum at 2π×{at} MHz");
    }
}
