#![no_main]

use cfml_core::dataset::{Format, RatingDataset};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(ds) = RatingDataset::parse(data, Format::CsvTriples, None) {
        ds.write_csv(std::io::sink()).expect("write parsed dataset");
    }
});
