//! Every reader returns `Ok` or `Err` on arbitrary input, never panics.

use cfml_core::baselevel::{read_cells_csv, PerformanceTable};
use cfml_core::dataset::{Format, RatingDataset};
use cfml_core::metafeatures::{MetafeatureTable, Provenance};
use cfml_core::metatarget::MetatargetTable;
use proptest::prelude::*;

/// Text biased towards the delimiters and tokens the readers care about.
fn csvish() -> impl Strategy<Value = String> {
    let token = prop_oneof![
        Just(",".to_string()),
        Just("\t".to_string()),
        Just("\n".to_string()),
        Just("\"".to_string()),
        Just("NaN".to_string()),
        Just("inf".to_string()),
        Just("-1e309".to_string()),
        Just("higher-better".to_string()),
        Just("lower-better".to_string()),
        Just("dataset,algorithm,measure,orientation,value\n".to_string()),
        Just("dataset,algorithm,rank\n".to_string()),
        Just("dataset,".to_string()),
        Just("user,item,rating\n".to_string()),
        "[a-z0-9.]{0,6}",
        "-?[0-9]{1,3}(\\.[0-9]{1,3})?",
        any::<String>(),
    ];
    prop::collection::vec(token, 0..40).prop_map(|t| t.concat())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn ratings_readers_never_panic(s in csvish()) {
        for f in [Format::CsvTriples, Format::MovielensTab] {
            if let Ok(ds) = RatingDataset::parse(s.as_bytes(), f, None) {
                prop_assert!(ds.ratings().iter().all(|r| r.value.is_finite()));
            }
        }
    }

    #[test]
    fn table_readers_never_panic(s in csvish()) {
        let _ = PerformanceTable::read_csv(s.as_bytes());
        let _ = read_cells_csv(s.as_bytes());
        let _ = MetafeatureTable::read_csv(s.as_bytes(), Provenance::RM);
        let _ = MetatargetTable::read_csv(s.as_bytes(), "t");
    }

    #[test]
    fn raw_bytes_never_panic(b in prop::collection::vec(any::<u8>(), 0..256)) {
        let _ = RatingDataset::parse(b.as_slice(), Format::CsvTriples, None);
        let _ = RatingDataset::parse(b.as_slice(), Format::MovielensTab, None);
        let _ = PerformanceTable::read_csv(b.as_slice());
        let _ = MetafeatureTable::read_csv(b.as_slice(), Provenance::CM);
        let _ = MetatargetTable::read_csv(b.as_slice(), "t");
    }
}
