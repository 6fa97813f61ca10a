mod common;

use dualkit::io::{lp_from_json, lp_to_json, parse_mps, write_mps};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn mps_round_trip(lp in common::arb_lp()) {
        prop_assert!(lp.is_valid());
        let text = write_mps(&lp).unwrap();
        prop_assert_eq!(parse_mps(&text).unwrap(), lp);
    }

    #[test]
    fn json_round_trip(lp in common::arb_lp()) {
        let text = lp_to_json(&lp);
        prop_assert_eq!(lp_from_json(&text).unwrap(), lp);
    }

    #[test]
    fn mps_parser_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..400)) {
        let _ = dualkit::io::mps::parse_mps_bytes(&bytes);
    }
}
