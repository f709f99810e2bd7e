#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    qtanner_fuzz::gldpc_decode(data);
});
