#![no_main]

use frechet_voronoi::configspace::{decode, encode, ConfigPoint};
use frechet_voronoi::Dim;
use libfuzzer_sys::fuzz_target;

// First byte picks the dimension; the rest is read as little-endian f64s.
fuzz_target!(|data: &[u8]| {
    let Some((&selector, rest)) = data.split_first() else {
        return;
    };
    let dim = if selector & 1 == 0 { Dim::Two } else { Dim::Three };
    let values: Vec<f64> = rest
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if let Ok(v) = ConfigPoint::new(values, dim) {
        let chain = decode(&v);
        assert_eq!(chain.len(), v.vertex_count());
        assert_eq!(encode(&chain), v);
    }
});
