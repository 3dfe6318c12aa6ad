mod common;

use common::random_family;
use proptest::prelude::*;
use qtherm::metrology::{cfi, fidelity_susceptibility, qfi};
use qtherm::qcore::Hermitian;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classical_never_beats_quantum(seed in any::<u64>(), d in 2usize..5, theta in -1.0f64..1.0) {
        let fam = random_family(seed, d);
        let q = qfi(&fam, theta).unwrap().qfi;
        let mut r = common::rng(seed ^ 0x9e37);
        for _ in 0..100 {
            let k = r.gen_range(2..=6);
            let f = cfi(&fam, theta, &common::povm(&mut r, d, k)).unwrap();
            prop_assert!(f <= q + 1e-8, "CFI {f} > QFI {q}");
        }
    }

    #[test]
    fn qfi_matches_fidelity_susceptibility(seed in any::<u64>(), d in 2usize..5, theta in -1.0f64..1.0) {
        let fam = random_family(seed, d);
        let q = qfi(&fam, theta).unwrap().qfi;
        let chi = fidelity_susceptibility(&fam, theta, 1e-2).unwrap();
        prop_assert!((chi - q).abs() <= 1e-6 * q.max(1e-3), "{chi} vs {q}");
    }

    #[test]
    fn sld_reproduces_qfi(seed in any::<u64>(), d in 2usize..5, theta in -1.0f64..1.0) {
        let fam = random_family(seed, d);
        let rep = qfi(&fam, theta).unwrap();
        let rho = fam.state(theta).unwrap();
        let l = rep.sld.matrix();
        prop_assert!((rho.expect(&(l * l)) - rep.qfi).abs() < 1e-7 * rep.qfi.max(1.0));
        let _: &Hermitian = &rep.sld;
    }
}
