#![no_main]
use bnls_harness::series::read_series;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(series) = read_series(text) {
            let again = read_series(&series.to_csv()).expect("written series reparses");
            assert_eq!(series.columns, again.columns);
            assert_eq!(series.rows.len(), again.rows.len());
        }
    }
});
