use dpo_sim::algebra::{make_state, StateSpec, TwoModeSpace};
use dpo_sim::dynamics::StepPolicy;
use dpo_sim::linalg::C64;
use dpo_sim::protocols::measurement::{MeasurementModel, Shots, DEFAULT_ETA};
use dpo_sim::protocols::parity::{default_parity_sweep, AdiabaticReadout};
use dpo_sim::protocols::wigner_scan::{wigner_scan, Grid, WignerPoint};
use dpo_sim::trap::ModeParams;

const REPETITIONS: u64 = 200;

fn readout() -> AdiabaticReadout {
    let space = TwoModeSpace::with_dims(14, 8).unwrap();
    AdiabaticReadout::new(
        &space,
        ModeParams::reference().xi,
        default_parity_sweep(),
        &StepPolicy::default(),
    )
    .unwrap()
}

fn repeated(readout: &AdiabaticReadout, spec: &StateSpec, alpha: C64, shots: u64) -> Vec<WignerPoint> {
    let state = make_state(readout.space().radial, spec).unwrap();
    (0..REPETITIONS)
        .map(|seed| {
            let model = MeasurementModel::new(DEFAULT_ETA, Shots::Finite(shots), seed).unwrap();
            wigner_scan(&state, "", &Grid::Points(vec![alpha]), readout, &model)
                .unwrap()
                .points[0]
        })
        .collect()
}

#[test]
fn sampled_wigner_spread_matches_binomial_error() {
    let r = readout();
    for (spec, alpha) in [
        (StateSpec::Coherent(C64::new(0.87, 0.0)), C64::new(0.3, -0.2)),
        (StateSpec::Fock(1), C64::new(0.6, 0.0)),
    ] {
        let pts = repeated(&r, &spec, alpha, 400);
        let n = pts.len() as f64;
        let mean = pts.iter().map(|p| p.wigner).sum::<f64>() / n;
        let sd = (pts.iter().map(|p| (p.wigner - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let predicted = pts[0].stderr;
        assert!(pts.iter().all(|p| p.stderr == predicted));
        assert!(
            (sd / predicted - 1.0).abs() < 0.15,
            "{spec}: empirical {sd} vs predicted {predicted}"
        );
        assert!((mean - pts[0].wigner_exact).abs() < 4.0 * predicted / n.sqrt());
    }
}

#[test]
fn single_phonon_origin_is_negative_at_finite_shots() {
    let r = readout();
    let pts = repeated(&r, &StateSpec::Fock(1), C64::new(0.0, 0.0), 500);
    let negative = pts.iter().filter(|p| p.wigner < 0.0).count();
    assert!(negative as f64 >= 0.99 * REPETITIONS as f64, "{negative}/{REPETITIONS}");
}

#[test]
fn reruns_with_the_same_seed_are_identical() {
    let r = readout();
    let state = make_state(r.space().radial, &StateSpec::Fock(2)).unwrap();
    let model = MeasurementModel::new(0.86, Shots::Finite(100), 42).unwrap();
    let grid = Grid::Rect {
        re: (-1.0, 1.0),
        im: (-1.0, 1.0),
        n_re: 5,
        n_im: 5,
    };
    let csv = || {
        let mut buf = Vec::new();
        wigner_scan(&state, "fock:2", &grid, &r, &model)
            .unwrap()
            .write_csv(&mut buf)
            .unwrap();
        buf
    };
    assert_eq!(csv(), csv());
}
