use std::ops::AddAssign;
use std::time::Duration;

use serde::Serialize;

/// Search counters. `cache_hits <= cache_lookups` always holds.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RunStats {
    pub decisions: u64,
    pub propagations: u64,
    #[serde(with = "secs")]
    pub bcp_time: Duration,
    pub cache_lookups: u64,
    pub cache_hits: u64,
    pub cache_entries: u64,
    pub peak_cache_bytes: u64,
}

impl RunStats {
    pub fn cache_hit_pct(&self) -> f64 {
        if self.cache_lookups == 0 {
            0.0
        } else {
            100.0 * self.cache_hits as f64 / self.cache_lookups as f64
        }
    }
}

impl AddAssign<&RunStats> for RunStats {
    fn add_assign(&mut self, rhs: &RunStats) {
        self.decisions += rhs.decisions;
        self.propagations += rhs.propagations;
        self.bcp_time += rhs.bcp_time;
        self.cache_lookups += rhs.cache_lookups;
        self.cache_hits += rhs.cache_hits;
        self.cache_entries += rhs.cache_entries;
        self.peak_cache_bytes = self.peak_cache_bytes.max(rhs.peak_cache_bytes);
    }
}

mod secs {
    use serde::Serializer;
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }
}
