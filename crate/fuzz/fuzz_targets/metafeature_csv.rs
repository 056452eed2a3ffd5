#![no_main]

use cfml_core::metafeatures::{MetafeatureTable, Provenance};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(table) = MetafeatureTable::read_csv(data, Provenance::CM) {
        for j in 0..table.n_cols() {
            assert_eq!(table.column(j).len(), table.n_rows());
        }
    }
});
