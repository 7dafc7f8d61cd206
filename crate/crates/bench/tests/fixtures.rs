use mr_hetero_bench::{fixture, SETTINGS};

#[test]
fn fixtures_build_and_are_stable() {
    for (preset, n) in SETTINGS {
        let a = fixture(preset, n);
        assert_eq!(a.n(), 100);
        assert_eq!(a, fixture(preset, n), "{preset}");
    }
    assert_eq!(fixture("multi10", 5_000).d(), 3);
}
