#![no_main]

use frechet_voronoi::io::{format_slice, parse_slice};
use frechet_voronoi::Dim;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&selector, rest)) = data.split_first() else {
        return;
    };
    let dim = if selector & 1 == 0 { Dim::Two } else { Dim::Three };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    if let Ok(slice) = parse_slice(text, dim) {
        let again = parse_slice(&format_slice(&slice), dim).expect("formatted slice reparses");
        assert_eq!(again, slice);
        let _ = slice.sample_count();
    }
});
