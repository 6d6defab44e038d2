use std::sync::{Arc, OnceLock};

use kpp_core::coefficients::PeriodicField;
use kpp_core::io::{read_grid_binary, write_grid_binary};
use kpp_core::propagation::{
    cell_state, compare_with_front, measure_speed, normalize_phase, phase_integral,
    profile_compare, pulsating_residual_k, simulate, CompareSettings, FrontField, InitialCondition,
    SimulationConfig, SnapshotPlan, NEGATIVE_TOLERANCE,
};
use kpp_core::speed::minimal_speed;
use kpp_core::steady::{homogenized_front, FrontProfile};
use kpp_core::{MeanSet, PeriodicCoefficient, PeriodicGrid, Preset, ReactionModel};

fn fisher() -> (PeriodicCoefficient, ReactionModel) {
    (
        PeriodicCoefficient::constant(1.0),
        ReactionModel::logistic(PeriodicField::constant(1.0), 1.0).unwrap(),
    )
}

fn fisher_run(dt: f64, t_final: f64, half_width: f64) -> FrontField {
    let (a, r) = fisher();
    let mut cfg = SimulationConfig::new(0.25, half_width, t_final);
    cfg.cell_points = 16;
    cfg.dt = dt;
    cfg.initial = InitialCondition::Step {
        position: half_width - 1.0,
    };
    cfg.snapshots = SnapshotPlan {
        every: 100,
        start: 0.0,
        region: Some((-1.0, 1.0)),
    };
    simulate(&a, &r, &cfg).unwrap()
}

struct Pulsating {
    field: FrontField,
    c_star: f64,
    l: f64,
    p0: f64,
}

const PULSE_T: f64 = 24.0;

/// Heterogeneous run with snapshots every step over the last twelve time units.
fn pulsating() -> &'static Pulsating {
    static CELL: OnceLock<Pulsating> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = Preset::builtin("cos-diffusion-05").unwrap();
        let (a, r) = (p.diffusion(), p.reaction());
        let l = 0.25;
        let c_star = minimal_speed(a, r, l, PeriodicGrid::default())
            .unwrap()
            .c_star;
        let mut cfg = SimulationConfig::new(l, 30.0, PULSE_T);
        cfg.cell_points = 16;
        cfg.initial = InitialCondition::Step { position: 30.0 };
        cfg.pulsating_speed = Some(c_star);
        cfg.snapshots = SnapshotPlan {
            every: 1,
            start: PULSE_T - 12.0,
            region: Some((-15.0 - l, 15.0 + 2.0 * l)),
        };
        Pulsating {
            field: simulate(a, r, &cfg).unwrap(),
            c_star,
            l,
            p0: MeanSet::compute(a, r).unwrap().p0,
        }
    })
}

#[test]
fn fisher_front_moves_at_speed_two() {
    let field = fisher_run(0.01, 55.0, 60.0);
    let est = measure_speed(&field).unwrap();
    assert!((est.c_measured - 2.0).abs() < 0.06, "{est:?}");
    // logarithmic lag keeps the measured speed below the asymptotic one
    assert!(est.c_measured < 2.0);
    // an interior jump smooths out, so the nodes just behind it decrease
    assert!(!field.monotone_in_t);
    assert!(field.min_value >= -NEGATIVE_TOLERANCE && field.max_value <= 1.0);
}

#[test]
fn time_step_refinement_barely_moves_the_speed() {
    let coarse = measure_speed(&fisher_run(0.02, 30.0, 35.0))
        .unwrap()
        .c_measured;
    let fine = measure_speed(&fisher_run(0.005, 30.0, 35.0))
        .unwrap()
        .c_measured;
    assert!((coarse - fine).abs() < 0.02 * fine, "{coarse} {fine}");
}

#[test]
fn boundary_fed_front_stays_below_the_stationary_state() {
    let run = pulsating();
    let f = &run.field;
    assert!(f.monotone_in_t);
    assert!(f.min_value >= -NEGATIVE_TOLERANCE);
    let p = Preset::builtin("cos-diffusion-05").unwrap();
    let mut cfg = SimulationConfig::new(run.l, 30.0, PULSE_T);
    cfg.cell_points = 16;
    let state = cell_state(p.diffusion(), p.reaction(), &cfg).unwrap();
    for values in &f.values {
        for (x, u) in f.xs.iter().zip(values) {
            assert!(*u <= state.at(*x) + 1e-12, "u({x}) = {u} above p_L");
        }
    }
}

#[test]
fn pulsating_residual_obeys_the_triangle_inequality() {
    let run = pulsating();
    let window = Some((PULSE_T - 12.0, PULSE_T - 4.0));
    let one = pulsating_residual_k(&run.field, run.l, run.c_star, 1, window).unwrap();
    let two = pulsating_residual_k(&run.field, run.l, run.c_star, 2, window).unwrap();
    assert!(two <= 2.0 * one + 1e-12, "{one} {two}");
    assert!(one > 0.0);
}

#[test]
fn pulsating_residual_decays_in_time() {
    let run = pulsating();
    let early = pulsating_residual_k(
        &run.field,
        run.l,
        run.c_star,
        1,
        Some((PULSE_T - 12.0, PULSE_T - 10.0)),
    )
    .unwrap();
    let late = pulsating_residual_k(
        &run.field,
        run.l,
        run.c_star,
        1,
        Some((PULSE_T - 4.0, PULSE_T - 2.0)),
    )
    .unwrap();
    assert!(late < early, "{early} {late}");
}

#[test]
fn phase_normalization_brackets_and_shifts() {
    let run = pulsating();
    let s = normalize_phase(&run.field, run.p0).unwrap();
    let dt = run.field.dt;
    let target = 0.5 * run.p0;
    assert!(phase_integral(&run.field, s - dt).unwrap() < target);
    assert!(phase_integral(&run.field, s + dt).unwrap() > target);
    for delta in [0.5, 3.0] {
        let shifted = normalize_phase(&run.field.shifted_in_time(delta), run.p0).unwrap();
        assert!((shifted - (s - delta)).abs() < dt, "{s} {delta} {shifted}");
    }
}

#[test]
fn grid_dump_round_trips() {
    let f = &pulsating().field;
    let mut bytes = Vec::new();
    write_grid_binary(&mut bytes, f).unwrap();
    let (times, xs, values) = read_grid_binary(&bytes).unwrap();
    assert_eq!(times, f.times);
    assert_eq!(xs, f.xs);
    assert_eq!(values, f.values);
    assert!(read_grid_binary(&bytes[..bytes.len() - 8]).is_err());
}

fn fisher_front(c: f64) -> Arc<FrontProfile> {
    let (a, r) = fisher();
    let m = MeanSet::compute(&a, &r).unwrap();
    Arc::new(homogenized_front(&m, &r, c, 40.0, 4096).unwrap())
}

#[test]
fn constant_medium_follows_the_homogenized_front() {
    let (a, r) = fisher();
    let row = compare_with_front(
        &a,
        &r,
        0.125,
        &fisher_front(2.0),
        &CompareSettings::default(),
    )
    .unwrap();
    assert!(row.distance < 2e-2, "{row:?}");
}

#[test]
fn mismatched_profile_is_far() {
    let (a, r) = fisher();
    let settings = CompareSettings::default();
    let matched = fisher_front(2.0);
    let mut cfg = SimulationConfig::new(0.125, settings.half_width, settings.t_final);
    cfg.cell_points = settings.cell_points;
    cfg.dt = settings.dt;
    cfg.initial = InitialCondition::Profile {
        profile: Arc::clone(&matched),
        position: settings.start,
    };
    cfg.snapshots = SnapshotPlan {
        every: 1,
        start: 0.0,
        region: Some((-0.125, 1.125)),
    };
    let field = simulate(&a, &r, &cfg).unwrap();
    let near = profile_compare(&field, &matched, settings.window).unwrap();
    let far = profile_compare(&field, &fisher_front(2.4), settings.window).unwrap();
    assert!(far > 5.0 * near, "{near} {far}");
}
