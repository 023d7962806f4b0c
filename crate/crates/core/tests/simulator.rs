use std::path::PathBuf;

use iccbf::sim::{
    exact_step, run, sweep, Axis, Grid, Integrator, NominalSpec, OneOrMany, SampledStates,
    Scenario, Segment, StepStatus,
};
use iccbf::Error;

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn load(name: &str) -> Scenario {
    Scenario::from_path(scenario_path(name)).unwrap()
}

fn column(log: &iccbf::sim::TrajectoryLog, name: &str) -> Vec<f64> {
    let k = log.barrier_names.iter().position(|n| n == name).unwrap();
    log.records.iter().map(|r| r.barriers[k]).collect()
}

#[test]
fn double_integrator_braking_stays_above_bound() {
    let log = run(&load("simplified_n2.json")).unwrap();
    let s = &log.summary;
    assert_eq!(s.steps, 10_001);
    assert!(!s.truncated);
    assert!(
        s.first_order_min[0] >= 0.0,
        "min x1 = {}",
        s.first_order_min[0]
    );
    assert!(s.barrier_min[1] >= 0.0, "min h2 = {}", s.barrier_min[1]);
    assert_eq!(s.infeasible_count, 0);
    // the filter had to intervene against u_nom = −1
    assert!(log.records.iter().any(|r| r.input[0] > -1.0));
}

#[test]
fn single_integrator_pushed_up_stays_below_upper_bound() {
    let text = r#"{
        "plant": {"order": 1},
        "input_bounds": {"box": {"lower": -1.0, "upper": 1.0}},
        "problem": {"kind": "full", "lower": [-1.0], "upper": [1.0]},
        "tuning": {"delta": 0.5, "gamma1": 2.0, "beta": [0.3]},
        "initial_state": [0.0],
        "nominal": {"kind": "constant", "value": 1.0},
        "sim": {"dt": 0.001, "T": 5.0}
    }"#;
    let log = run(&Scenario::from_json(text).unwrap()).unwrap();
    // first-order barriers are [x − x̱, x̄ − x]
    assert!(log.summary.first_order_min[1] >= 0.0);
    assert_eq!(log.summary.violation_count, 0);
}

#[test]
fn equilibrium_with_zero_nominal_is_left_alone() {
    let mut sc = load("full_n3_tuned.json");
    sc.nominal = NominalSpec::Constant {
        value: OneOrMany::One(0.0),
    };
    sc.initial_state = vec![0.4, 0.0, 0.0];
    sc.sim.horizon = 1.0;
    let log = run(&sc).unwrap();
    for r in &log.records {
        assert_eq!(r.input, vec![0.0]);
        assert_eq!(r.state, vec![0.4, 0.0, 0.0]);
    }
}

#[test]
fn summary_minima_are_column_minima() {
    let log = run(&load("full_n3_tuned.json")).unwrap();
    for (k, name) in log.barrier_names.iter().enumerate() {
        let col = column(&log, name);
        let min = col
            .iter()
            .copied()
            .filter(|v| !v.is_nan())
            .fold(f64::NAN, f64::min);
        assert_eq!(
            min.to_bits(),
            log.summary.barrier_min[k].to_bits(),
            "{name}"
        );
    }
    let n = log.records.len();
    assert!(log
        .records
        .iter()
        .all(|r| r.state.len() == 3 && r.input.len() == 1 && r.nominal.len() == 1));
    assert_eq!(log.times().count(), n);
    assert!(log.summary.is_clean());
}

#[test]
fn identical_scenarios_give_identical_logs() {
    let mut sc = load("mimo_triangle.json");
    sc.nominal = NominalSpec::Random { hold: 0.25 };
    sc.sim.horizon = 2.0;
    let a = run(&sc).unwrap();
    let b = run(&sc).unwrap();
    assert_eq!(a.records.len(), b.records.len());
    for (x, y) in a.records.iter().zip(&b.records) {
        let bits = |v: &[f64]| v.iter().map(|f| f.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&x.state), bits(&y.state));
        assert_eq!(bits(&x.input), bits(&y.input));
        assert_eq!(bits(&x.barriers), bits(&y.barriers));
        assert_eq!(x.margin.to_bits(), y.margin.to_bits());
    }
    sc.sim.seed += 1;
    let c = run(&sc).unwrap();
    assert_ne!(a.records[0].nominal, c.records[0].nominal);
}

#[test]
fn feasible_nominal_passes_through_exactly() {
    let mut sc = load("full_n3_tuned.json");
    sc.nominal = NominalSpec::Sinusoid {
        amplitude: OneOrMany::One(0.8),
        frequency: 0.5,
        phase: OneOrMany::One(0.3),
    };
    sc.sim.horizon = 4.0;
    let sim = sc.compile().unwrap();
    let log = sim.run().unwrap();
    let mut passed_through = 0;
    for r in &log.records {
        let state = iccbf::State::siso(r.state.clone()).unwrap();
        let cons = sim.filter.constraints(&state).unwrap();
        let p = iccbf::qp::FilterProblem::new(r.nominal.clone(), cons, sim.input_bounds);
        if p.is_feasible(&r.nominal, 0.0) {
            assert_eq!(r.input, r.nominal);
            passed_through += 1;
        }
    }
    assert!(passed_through > 0);
}

#[test]
fn exact_update_matches_polynomial_expansion() {
    // n = 4: x1' = x1 + x2 h + x3 h²/2 + x4 h³/6 + u h⁴/24, and so on.
    let x = [0.3, -1.2, 0.7, 2.5];
    let (u, h) = (-0.9, 0.37);
    let got = exact_step(&x, &[u], h);
    let want = [
        x[0] + x[1] * h + x[2] * h * h / 2.0 + x[3] * h.powi(3) / 6.0 + u * h.powi(4) / 24.0,
        x[1] + x[2] * h + x[3] * h * h / 2.0 + u * h.powi(3) / 6.0,
        x[2] + x[3] * h + u * h * h / 2.0,
        x[3] + u * h,
    ];
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() <= 1e-12 * w.abs().max(1.0));
    }
}

#[test]
fn integrators_agree_on_smooth_run() {
    let mut sc = load("simplified_n2.json");
    sc.sim.horizon = 2.0;
    sc.nominal = NominalSpec::Constant {
        value: OneOrMany::One(0.2),
    };
    let exact = run(&sc).unwrap();
    sc.sim.integrator = Integrator::Rk4;
    let rk4 = run(&sc).unwrap();
    sc.sim.integrator = Integrator::Euler;
    let euler = run(&sc).unwrap();
    let last = |l: &iccbf::sim::TrajectoryLog| l.records.last().unwrap().state.clone();
    assert!((last(&exact)[0] - last(&rk4)[0]).abs() < 1e-12);
    assert!((last(&exact)[0] - last(&euler)[0]).abs() < 1e-2);
}

#[test]
fn schedule_nominal_switches_at_segment_starts() {
    let mut sc = load("simplified_n2.json");
    sc.sim.horizon = 0.3;
    sc.sim.dt = 0.1;
    sc.nominal = NominalSpec::Schedule {
        segments: vec![
            Segment {
                start: 0.1,
                value: OneOrMany::One(0.5),
            },
            Segment {
                start: 0.25,
                value: OneOrMany::One(-0.25),
            },
        ],
    };
    let log = run(&sc).unwrap();
    let nominal: Vec<f64> = log.records.iter().map(|r| r.nominal[0]).collect();
    assert_eq!(nominal, vec![0.0, 0.5, 0.5, -0.25]);
}

#[test]
fn csv_has_contract_columns() {
    let log = run(&load("mimo_triangle.json")).unwrap();
    let mut buf = Vec::new();
    log.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "t,x_1,x_2,x_3,x_4,u_nom_1,u_nom_2,u_1,u_2,h_1_1,h_1_2,h_2_1,h_2_2,h_3_1,h_3_2,margin,status"
    );
    assert_eq!(text.lines().count(), log.records.len() + 1);
    assert!(text.lines().nth(1).unwrap().ends_with(",optimal"));
}

#[test]
fn csv_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.csv");
    let mut sc = load("simplified_n2.json");
    sc.sim.horizon = 0.01;
    run(&sc).unwrap().write_csv_file(&path).unwrap();
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(reader.headers().unwrap().len(), 1 + 2 + 1 + 1 + 2 + 2);
    assert_eq!(reader.records().count(), 11);
}

#[test]
fn invalid_scenarios_are_rejected() {
    let mut sc = load("simplified_n2.json");
    sc.sim.dt = 0.0;
    assert!(matches!(sc.compile(), Err(Error::Scenario(_))));

    let mut sc = load("simplified_n2.json");
    sc.sim.horizon = 1e-4;
    assert!(matches!(sc.compile(), Err(Error::Scenario(_))));

    let mut sc = load("simplified_n2.json");
    sc.initial_state = vec![-0.5, 0.0];
    assert!(matches!(sc.compile(), Err(Error::Scenario(_))));

    let mut sc = load("simplified_n2.json");
    sc.initial_state = vec![1.0];
    assert!(matches!(sc.compile(), Err(Error::Dimension { .. })));

    let mut sc = load("simplified_n2.json");
    if let Some(iccbf::sim::ParamsSpec::Shared { gamma, .. }) = &mut sc.params {
        gamma[0] = 1.5;
    }
    assert!(matches!(sc.compile(), Err(Error::Validation(_))));

    let mut sc = load("mimo_triangle.json");
    sc.input_bounds = iccbf::InputBounds::symmetric(1.0);
    assert!(sc.compile().is_err());
}

#[test]
fn infeasible_step_truncates_the_run() {
    // Corner of the triangle with a small margin: the three constraints
    // cannot all be met.
    let mut sc = load("mimo_triangle.json");
    sc.params = Some(iccbf::sim::ParamsSpec::Shared {
        gamma: vec![1.2727922061357857, 1.0],
        epsilon: vec![0.2, 0.2],
    });
    sc.initial_state = vec![
        0.6065254729174159,
        -0.8775627991066894,
        -2.05811517552624,
        1.428924454599672,
    ];
    let log = run(&sc).unwrap();
    assert_eq!(log.records.last().unwrap().status, StepStatus::Infeasible);
    assert!(log.summary.infeasible_count >= 1);
    assert!(!log.summary.is_clean());
}

#[test]
fn sweep_over_first_gain_keys_rows() {
    let mut base = load("simplified_n2.json");
    base.sim.horizon = 2.0;
    let grid: Grid =
        serde_json::from_str(&std::fs::read_to_string(scenario_path("grid_gamma1.json")).unwrap())
            .unwrap();
    let report = sweep(&base, &grid, Some(2)).unwrap();
    assert_eq!(report.runs, 3);
    let keys: Vec<f64> = report
        .rows
        .iter()
        .map(|r| r.key["/params/gamma/0"].as_f64().unwrap())
        .collect();
    assert_eq!(keys, vec![0.5, 1.0, 2f64.sqrt()]);
    assert!(report.is_clean(), "{report:?}");
}

#[test]
fn sweep_over_sampled_states_is_violation_free() {
    let mut base = load("full_n3_tuned.json");
    base.sim.horizon = 2.0;
    base.nominal = NominalSpec::Adversarial;
    let grid = Grid {
        axes: vec![],
        sampled_initial_states: Some(SampledStates {
            count: 100,
            seed: 7,
            ranges: None,
        }),
    };
    let report = sweep(&base, &grid, None).unwrap();
    assert_eq!(report.runs, 100);
    assert_eq!(report.rows.len(), 100);
    assert!(report.is_clean(), "{} violations", report.total_violations);
    let again = sweep(&base, &grid, Some(1)).unwrap();
    assert_eq!(
        serde_json::to_string(&report).unwrap(),
        serde_json::to_string(&again).unwrap()
    );
}

#[test]
fn empty_grid_is_an_error() {
    let base = load("simplified_n2.json");
    let no_samples = Grid {
        axes: vec![],
        sampled_initial_states: Some(SampledStates {
            count: 0,
            seed: 0,
            ranges: None,
        }),
    };
    assert!(matches!(
        sweep(&base, &no_samples, None),
        Err(Error::Scenario(_))
    ));
    let grid = Grid {
        axes: vec![Axis {
            pointer: "/params/gamma/0".into(),
            values: vec![],
        }],
        sampled_initial_states: None,
    };
    assert!(matches!(sweep(&base, &grid, None), Err(Error::Scenario(_))));
}

#[test]
fn bad_pointer_is_reported_per_row() {
    let mut base = load("simplified_n2.json");
    base.sim.horizon = 0.1;
    let grid = Grid {
        axes: vec![Axis {
            pointer: "/params/nope".into(),
            values: vec![1.0.into()],
        }],
        sampled_initial_states: None,
    };
    let report = sweep(&base, &grid, None).unwrap();
    assert_eq!(report.errors, 1);
    assert!(report.rows[0]
        .error
        .as_ref()
        .unwrap()
        .contains("/params/nope"));
}
