#![no_main]

use frechet_voronoi::io::{format_chains, parse_chains};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(sites) = parse_chains(text) {
        // Whatever parses must survive a round trip unchanged.
        let again = parse_chains(&format_chains(sites.sites())).expect("formatted chains reparse");
        assert_eq!(again.sites(), sites.sites());
    }
});
