#![no_main]

use cfml_core::baselevel::{read_cells_csv, PerformanceTable};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = read_cells_csv(data);
    if let Ok(table) = PerformanceTable::read_csv(data) {
        assert_eq!(
            table.cells().len(),
            table.datasets.len() * table.algorithms.len() * table.measures.len()
        );
    }
});
