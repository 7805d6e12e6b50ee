use proptest::prelude::*;
use stagmix_core::metrics::{discrimination_index, participation, AssociationMatrix};

fn m(a: u64, b: u64, c: u64, d: u64) -> AssociationMatrix {
    AssociationMatrix::new([[a, b], [c, d]])
}

/// Independent oracle. Any two of the three ways to split the four counts
/// into pairs (rows, columns, diagonals) sum their absolute gaps to
/// `w4 + w3 - w2 - w1` unless the pairs are "two smallest / two largest",
/// which sums to `w4 - w3 + w2 - w1`. So the index is `±2 (w3 - w2)`, with
/// the sign set by whether a row or a column holds the two largest counts,
/// and zero when the diagonal does.
fn oracle(a: u64, b: u64, c: u64, d: u64) -> i64 {
    let mut w = [a, b, c, d].map(|x| x as i64);
    w.sort_unstable();
    let gap = 2 * (w[2] - w[1]);
    if gap == 0 {
        return 0;
    }
    let top = |x: u64| x as i64 > w[1];
    if top(a) == top(b) {
        gap
    } else if top(a) == top(c) {
        -gap
    } else {
        0
    }
}

#[test]
fn canonical_matrices() {
    assert_eq!(m(5, 5, 0, 0).discrimination_index(), 10);
    assert_eq!(m(5, 0, 5, 0).discrimination_index(), -10);
    assert_eq!(m(10, 0, 0, 10).discrimination_index(), 0);
    assert_eq!(m(0, 0, 0, 0).discrimination_index(), 0);
    assert_eq!(participation(&m(1, 2, 3, 4)), 10);
    assert_eq!(participation(&m(5, 5, 0, 0)), 10);
}

#[test]
fn zero_characterization_misses_ties() {
    // The prose rule "relabel so a is the maximum; zero iff a > d > b, c"
    // with d diagonal to a is strict, so it misses vanishing indices with
    // tied counts: here the maximum's diagonal holds the minimum.
    assert_eq!(m(2, 1, 1, 0).discrimination_index(), 0);
    assert!(!prose_says_zero(2, 1, 1, 0));
    assert_eq!(m(5, 1, 1, 5).discrimination_index(), 0);
    assert!(!prose_says_zero(5, 1, 1, 5));
}

/// The prose rule, applied after moving the maximum to the top-left corner
/// with row and column swaps (which leave the index unchanged).
fn prose_says_zero(a: u64, b: u64, c: u64, d: u64) -> bool {
    let max = a.max(b).max(c).max(d);
    let (a, b, c, d) = if a == max {
        (a, b, c, d)
    } else if b == max {
        (b, a, d, c)
    } else if c == max {
        (c, d, a, b)
    } else {
        (d, c, b, a)
    };
    a > d && d > b && d > c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20_000))]

    #[test]
    fn index_matches_the_sorted_gap_oracle(a in 0u64..60, b in 0u64..60, c in 0u64..60, d in 0u64..60) {
        prop_assert_eq!(discrimination_index(&m(a, b, c, d)), oracle(a, b, c, d));
    }

    #[test]
    fn index_is_even_and_bounded(a in 0u64..1000, b in 0u64..1000, c in 0u64..1000, d in 0u64..1000) {
        let p = m(a, b, c, d);
        let v = p.discrimination_index();
        prop_assert_eq!(v % 2, 0);
        prop_assert!(v.unsigned_abs() <= 2 * p.max_entry());
    }

    #[test]
    fn index_ignores_row_and_column_order(a in 0u64..1000, b in 0u64..1000, c in 0u64..1000, d in 0u64..1000) {
        let p = m(a, b, c, d);
        let v = p.discrimination_index();
        prop_assert_eq!(p.swap_rows().discrimination_index(), v);
        prop_assert_eq!(p.swap_columns().discrimination_index(), v);
        // Transposing trades color for behavior.
        prop_assert_eq!(m(a, c, b, d).discrimination_index(), -v);
    }

    #[test]
    fn prose_zero_rule_is_sufficient_and_misses_only_ties(
        a in 0u64..30, b in 0u64..30, c in 0u64..30, d in 0u64..30
    ) {
        let v = m(a, b, c, d).discrimination_index();
        if prose_says_zero(a, b, c, d) {
            prop_assert_eq!(v, 0);
        } else if v == 0 {
            let mut w = [a, b, c, d];
            w.sort_unstable();
            prop_assert!(w.windows(2).any(|p| p[0] == p[1]), "{:?}", (a, b, c, d));
        }
    }

    #[test]
    fn sums_add_entrywise(x in proptest::array::uniform4(0u64..100), y in proptest::array::uniform4(0u64..100)) {
        let p = m(x[0], x[1], x[2], x[3]);
        let q = m(y[0], y[1], y[2], y[3]);
        let s = p + q;
        prop_assert_eq!(s.participation(), p.participation() + q.participation());
        prop_assert_eq!(s.flat(), [x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3]]);
    }
}
