use std::io::Write;

use injhom::gadgets::AssetStore;
use injhom::selfcheck::{run_criterion, SelfcheckConfig, CRITERIA};

#[test]
fn acceptance() {
    let config = SelfcheckConfig::new(AssetStore::new(AssetStore::bundled_dir()));
    // Written to the process stdout directly so the report shows up in the
    // test log even when the harness captures output.
    let mut out = std::io::stdout();
    writeln!(out).unwrap();
    let mut failed = Vec::new();
    for c in CRITERIA {
        let report = run_criterion(c, &config);
        writeln!(out, "{}", report.line()).unwrap();
        if !report.passed {
            failed.push(report.id);
        }
    }
    writeln!(
        out,
        "{} of {} criteria pass",
        CRITERIA.len() - failed.len(),
        CRITERIA.len()
    )
    .unwrap();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
