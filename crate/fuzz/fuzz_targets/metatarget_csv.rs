#![no_main]

use cfml_core::metatarget::MetatargetTable;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(table) = MetatargetTable::read_csv(data, "fuzz") {
        for d in 0..table.datasets.len() {
            assert_eq!(table.ranking(d).ranks.len(), table.algorithms.len());
        }
    }
});
