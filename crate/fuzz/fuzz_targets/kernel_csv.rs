#![no_main]
use bnls_harness::series::read_kernel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(k) = read_kernel(text) {
            assert_eq!(
                read_kernel(&k.to_csv()).expect("written kernel reparses"),
                k
            );
        }
    }
});
