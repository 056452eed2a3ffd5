#![no_main]

use cfml_core::dataset::{Format, RatingDataset};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = RatingDataset::parse(data, Format::MovielensTab, None);
});
