//! Worker-pool setup. NSCH_THREADS caps the rayon pool size; unset means all
//! cores. Parallel loops are per-row maps only, so results are bit-identical
//! for any thread count.

use std::sync::Once;

static INIT: Once = Once::new();

pub fn init() {
    INIT.call_once(|| {
        if let Ok(s) = std::env::var("NSCH_THREADS") {
            if let Ok(n) = s.trim().parse::<usize>() {
                if n >= 1 {
                    // ignore failure: the global pool may already exist
                    let _ = rayon::ThreadPoolBuilder::new()
                        .num_threads(n)
                        .build_global();
                }
            }
        }
    });
}
