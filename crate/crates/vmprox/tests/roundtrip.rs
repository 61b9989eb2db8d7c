//! Serialize/parse round-trips of the dataset format, and parser
//! robustness on arbitrary input.

use proptest::prelude::*;
use std::io::Cursor;

use vmprox::io::{parse_libsvm, write_libsvm};
use vmprox_core::dataset::Dataset;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    /// The parser never panics: arbitrary bytes either parse or produce a
    /// typed error.
    #[test]
    fn parser_total_on_arbitrary_input(text in "\\PC*", dim in proptest::option::of(1usize..64)) {
        let _ = parse_libsvm(Cursor::new(text.as_bytes()), dim);
    }

    /// Near-miss inputs built from valid tokens with random separators.
    #[test]
    fn parser_total_on_token_soup(
        tokens in prop::collection::vec("([0-9]{1,3}:)?-?[0-9.e+-]{1,8}|:|::| ", 0..20),
    ) {
        let line = tokens.concat();
        let _ = parse_libsvm(Cursor::new(line.as_bytes()), None);
    }
}

/// Strategy for random sparse rows: strictly increasing 1-based indices with
/// finite nonzero values, plus a +/-1 label.
fn row_strategy() -> impl Strategy<Value = (f64, Vec<(usize, f64)>)> {
    (
        prop::bool::ANY,
        prop::collection::btree_set(1usize..40, 0..6),
        prop::collection::vec(-1e6f64..1e6, 6),
    )
        .prop_map(|(pos, cols, vals)| {
            let label = if pos { 1.0 } else { -1.0 };
            let entries: Vec<(usize, f64)> = cols
                .into_iter()
                .zip(vals)
                .filter(|(_, v)| *v != 0.0)
                .map(|(c, v)| (c - 1, v))
                .collect();
            (label, entries)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn serialize_then_parse_is_identity(rows in prop::collection::vec(row_strategy(), 1..12)) {
        let ds = Dataset::from_rows(&rows, Some(40)).unwrap();
        let mut buf = Vec::new();
        write_libsvm(&ds, &mut buf).unwrap();
        let reparsed = parse_libsvm(Cursor::new(&buf), Some(40)).unwrap();
        prop_assert_eq!(&ds, &reparsed);

        // Parsing is order-preserving: line i becomes row i.
        let text = String::from_utf8(buf).unwrap();
        for (i, line) in text.lines().enumerate() {
            let label = if line.starts_with("+1") { 1.0 } else { -1.0 };
            prop_assert_eq!(ds.label(i), label);
            prop_assert_eq!(line.split_whitespace().count() - 1, ds.row(i).0.len());
        }
    }
}
