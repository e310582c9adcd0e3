#![no_main]

use frechet_voronoi::io::parse_raster_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_raster_csv(text);
    }
});
