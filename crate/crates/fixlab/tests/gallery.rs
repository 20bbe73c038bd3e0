use fixlab::gallery::list_gallery;
use fixlab::runner::{run, Options};

#[test]
fn every_entry_meets_its_expectations() {
    let entries = list_gallery();
    assert!(entries.len() >= 8);
    for e in entries {
        let out = run(&e.scenario, &Options::default()).unwrap();
        let r = &out.report;
        let broken: Vec<_> = r.expectations.iter().filter(|x| !x.met).collect();
        assert!(broken.is_empty(), "{}: {:?}", e.name, broken);
        if let Some(code) = e.scenario.expect.exit_code {
            assert_eq!(r.exit_code, code, "{}", e.name);
        }
        assert!(!out.traces.is_empty() || r.sections.iter().all(|s| s.artifacts.is_empty()));
    }
}

#[test]
fn budget_scale_is_recorded_in_the_report() {
    let e = fixlab::gallery::find("banach-half").unwrap();
    let opts = Options {
        budget_scale: 2.0,
        ..Options::default()
    };
    let r = run(&e.scenario, &opts).unwrap().report;
    let base = run(&e.scenario, &Options::default()).unwrap().report;
    assert_eq!(r.budget_scale, 2.0);
    assert_eq!(r.budget.index_horizon, 2 * base.budget.index_horizon);
}
