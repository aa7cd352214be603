#![no_main]
use libfuzzer_sys::fuzz_target;
use relspin::cli::{parse_components, parse_four_vector, parse_momentum};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(p) = parse_momentum(s) {
        assert!(p.iter().all(|c| c.is_finite()));
        // A valid momentum always boosts to a finite four-vector.
        if let Ok(b) = relspin::dirac::boost_matrix(1.0, p) {
            let _ = b.apply(&[1.0, 0.0, 0.0, 0.0]);
        }
    }
    if let Ok(w) = parse_four_vector(s) {
        assert!(w.iter().all(|c| c.is_finite()));
    }
    for n in 0..6 {
        if let Ok(v) = parse_components(s, n) {
            assert_eq!(v.len(), n);
        }
    }
});
