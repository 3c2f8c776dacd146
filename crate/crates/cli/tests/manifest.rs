use geopath_cli::manifest::{parse_dims, ManifestError, RawManifest, RunManifest};
use geopath_core::{ConvergenceGate, DescentStart, ManifoldKind};
use nalgebra::dvector;

fn load(text: &str) -> Result<RunManifest, ManifestError> {
    RunManifest::from_raw(&RawManifest::parse(text)?)
}

#[test]
fn parses_problem_and_solver_keys() {
    let m = load(
        "# sinusoid run\n\
         manifold = sinusoid:a=3   # steep\n\
         speed = quadleft\n\
         goal = 1, 1\n\
         start = -1,-1\n\
         start = 0.5,0.25\n\
         dt = 0.05\n\
         gd_steps = 4\n\
         tau = 0.01\n\
         descent_start = nu\n\
         seed = 9\n",
    )
    .unwrap();
    assert_eq!(m.dim, 2);
    assert!(matches!(m.manifold.kind(), ManifoldKind::Sinusoid { a } if *a == 3.0));
    assert_eq!(m.goal, Some(dvector![1.0, 1.0]));
    assert_eq!(m.starts, vec![dvector![-1.0, -1.0], dvector![0.5, 0.25]]);
    assert_eq!(m.config.dt, 0.05);
    assert_eq!(m.config.gd_steps, 4);
    assert_eq!(m.config.tau, Some(0.01));
    assert_eq!(m.config.descent_start, DescentStart::Nu);
    assert_eq!(m.config.seed, 9);
    assert_eq!(m.config.convergence_gate, ConvergenceGate::Feasible);
    assert_eq!(m.horizon, None);
}

#[test]
fn defaults_to_flat_unit_speed() {
    let m = load("goal = 0,0,0\nstart = 1,2,3\n").unwrap();
    assert_eq!(m.dim, 3);
    assert!(m.manifold.is_flat());
    assert_eq!(m.speed.constant_value(), Some(1.0));
}

#[test]
fn scalar_box_bounds_broadcast() {
    let m = load("dim = 3\ngoal = 1,1,1\ncount = 4\nbox_lo = -1\nbox_hi = -0.5,0,1\n").unwrap();
    assert_eq!(m.box_lo, Some(dvector![-1.0, -1.0, -1.0]));
    assert_eq!(m.box_hi, Some(dvector![-0.5, 0.0, 1.0]));
    assert_eq!(m.count, Some(4));
}

#[test]
fn missing_goal_names_the_key() {
    let m = load("start = 1,0\n").unwrap();
    let err = m.require_goal().unwrap_err();
    assert!(err.to_string().contains("`goal`"), "{err}");
}

#[test]
fn errors_carry_line_and_key() {
    let err = load("goal = 1,1\n\ndt = fast\n").unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("line 3") && msg.contains("`dt`"), "{msg}");

    let err = load("goal = 1,1\nwibble = 2\n").unwrap_err();
    assert!(err.to_string().contains("unknown key `wibble`"));

    let err = load("goal = 1,1\ngoal = 2,2\n").unwrap_err();
    assert!(err.to_string().contains("duplicate key `goal`"));

    let err = load("no equals sign\n").unwrap_err();
    assert!(matches!(err, ManifestError::Syntax { line: 1, .. }));
}

#[test]
fn dimension_mismatch_is_reported() {
    let err = load("dim = 2\ngoal = 1,1\nstart = 1,2,3\n").unwrap_err();
    assert!(matches!(err, ManifestError::Dimension { expected: 2, found: 3, .. }), "{err}");
    assert!(load("manifold = sinusoid:a=1\ndim = 3\ngoal = 1,1,1\n").is_err());
}

#[test]
fn invalid_solver_values_are_rejected() {
    assert!(load("goal = 1\nkappa = 2\n").is_err());
    assert!(load("goal = 1\nhorizon = -1\n").is_err());
    assert!(load("goal = 1\ncount = 0\n").is_err());
    assert!(load("goal = 1,1\nbox_lo = 1\nbox_hi = 0\n").is_err());
}

#[test]
fn overrides_replace_manifest_values() {
    let mut raw = RawManifest::parse("goal = 1,1\ndt = 0.1\n").unwrap();
    raw.set("dt", 0.2);
    raw.set("horizon", 3.0);
    let m = RunManifest::from_raw(&raw).unwrap();
    assert_eq!(m.config.dt, 0.2);
    assert_eq!(m.horizon, Some(3.0));
}

#[test]
fn dimension_lists_and_ranges() {
    assert_eq!(parse_dims("10,20,30").unwrap(), vec![10, 20, 30]);
    assert_eq!(parse_dims("10..13").unwrap(), vec![10, 11, 12, 13]);
    assert_eq!(parse_dims("10..30:10").unwrap(), vec![10, 20, 30]);
    assert!(parse_dims("0,1").is_err());
    assert!(parse_dims("5..2").is_err());
}
