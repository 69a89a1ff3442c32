use sinmin_core::catalog::{all_subjects, default_family, TheoremId};
use sinmin_core::exec::Execution;
use sinmin_core::verify::{full_suite, run_suite, sweep_residual, GridSpec, RunSettings, SweepOptions};

#[test]
fn reports_do_not_depend_on_execution() {
    let items = full_suite();
    let par = RunSettings {
        seed: 7,
        exec: Execution::Parallel,
        ..RunSettings::default()
    };
    let seq = RunSettings {
        exec: Execution::Sequential,
        ..par.clone()
    };
    let a = run_suite(&items, &par);
    let b = run_suite(&items, &seq);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.to_json(), y.to_json(), "{}", x.subject);
    }
}

#[test]
fn refinement_does_not_hide_residuals() {
    for (t, c) in all_subjects() {
        let fam = default_family(t, c).unwrap();
        let coarse = GridSpec::new(fam.bbox, 25, 25, 0.05).unwrap();
        let fine = coarse.with_resolution(49, 49).unwrap();
        let opts = SweepOptions::default();
        let rc = sweep_residual(&fam, &coarse, &opts).unwrap().max_residual;
        let rf = sweep_residual(&fam, &fine, &opts).unwrap().max_residual;
        // the fine grid contains the coarse one
        assert!(rf >= rc, "{}: {rf} < {rc}", fam.subject());
    }
}

#[test]
fn finite_difference_sweeps_pass_at_their_tolerance() {
    use sinmin_core::surface::DerivativeMode;
    let opts = SweepOptions {
        mode: DerivativeMode::FiniteDifference,
        ..SweepOptions::default()
    };
    for (t, c) in [(TheoremId::Thm5, 3), (TheoremId::Thm4, 1), (TheoremId::ScherkLC, 1)] {
        let fam = default_family(t, c).unwrap();
        let rep = sweep_residual(&fam, &GridSpec::for_box(fam.bbox).unwrap(), &opts).unwrap();
        assert_eq!(rep.tolerances.minimality, 1e-4);
        assert!(rep.check("minimality_scaled").unwrap().pass, "{}", rep.to_json());
    }
}

#[test]
fn plane_under_non_metric_kind_is_exact() {
    let fam = default_family(TheoremId::Thm3, 1).unwrap();
    let rep = sweep_residual(&fam, &GridSpec::for_box(fam.bbox).unwrap(), &SweepOptions::default()).unwrap();
    assert!(rep.pass && rep.max_residual <= 1e-12);
}
