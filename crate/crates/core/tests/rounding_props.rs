mod common;

use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn rounding_keeps_value_and_feasibility(seed in any::<u64>()) {
        let case = common::random_rounding_case(seed, 32);
        prop_assert_eq!(common::check_rounding(&case), Ok(()));
    }
}
