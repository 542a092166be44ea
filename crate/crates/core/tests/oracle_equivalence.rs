mod common;

#[test]
fn estimators_match_quadratic_references_exactly() {
    for seed in 0..1000 {
        if let Err(e) = common::check_instance(seed) {
            panic!("{e}");
        }
    }
}
