use gybe_bench::{gybe_workload, nybe_workload, w_workload};
use gybe_core::slocc::{classify, SloccClass, DEFAULT_RANK_TOL};
use gybe_core::verify::{gybe_residual, nybe_residual};

#[test]
fn benchmarked_workloads_are_valid() {
    for (spec, l) in [("qghz.1@d2m3", 1), ("uq1@d2m2", 2), ("lowl.qq@d3m2", 1)] {
        let (r, shape) = gybe_workload(spec, l).unwrap();
        assert!(gybe_residual(&r, shape, 2, 1).unwrap().passed(), "{spec}");
    }
    let r = nybe_workload("qghz.1@d2m3").unwrap();
    assert!(nybe_residual(&r, 2, 1).unwrap().passed());
    let w = w_workload(3).unwrap();
    assert_eq!(classify(&w, DEFAULT_RANK_TOL).unwrap().class, SloccClass::W);
}
