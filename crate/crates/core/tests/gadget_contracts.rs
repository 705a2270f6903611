use injhom::gadgets::{all_cases, AssetStore, DEFAULT_VERIFY_BUDGET};

#[test]
fn shipped_gadgets_pass_their_contracts() {
    let store = AssetStore::new(AssetStore::bundled_dir());
    let mut failed = Vec::new();
    for case in all_cases(&store).unwrap() {
        let t = std::time::Instant::now();
        let report = case.verify(Some(DEFAULT_VERIFY_BUDGET)).unwrap();
        println!(
            "{}\n  nodes={} time={:?}",
            report.table(),
            report.stats.nodes,
            t.elapsed()
        );
        if !report.passed() {
            failed.push(report.id.clone());
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
