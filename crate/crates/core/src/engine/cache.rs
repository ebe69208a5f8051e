//! Exact-key component cache with LRU eviction under a byte budget.

use lru::LruCache;
use num_bigint::BigUint;

/// Rough per-entry bookkeeping cost on top of key and value bytes.
const ENTRY_OVERHEAD: usize = 64;

pub(crate) struct ComponentCache {
    map: LruCache<Box<[u8]>, BigUint>,
    bytes: usize,
    peak: usize,
    cap: usize,
}

#[derive(Debug)]
pub(crate) struct EntryTooLarge;

fn entry_bytes(key: &[u8], value: &BigUint) -> usize {
    key.len() + (value.bits() as usize).div_ceil(8) + ENTRY_OVERHEAD
}

impl ComponentCache {
    pub fn new(cap: usize) -> Self {
        ComponentCache {
            map: LruCache::unbounded(),
            bytes: 0,
            peak: 0,
            cap,
        }
    }

    pub fn get(&mut self, key: &[u8]) -> Option<&BigUint> {
        self.map.get(key)
    }

    /// Stores `value`, evicting least-recently-used entries to stay under the
    /// cap. Fails only if the entry alone exceeds the cap.
    pub fn insert(&mut self, key: Box<[u8]>, value: BigUint) -> Result<(), EntryTooLarge> {
        let size = entry_bytes(&key, &value);
        if size > self.cap {
            return Err(EntryTooLarge);
        }
        if let Some(old) = self.map.pop(&key) {
            self.bytes -= entry_bytes(&key, &old);
        }
        while self.bytes + size > self.cap {
            let Some((k, v)) = self.map.pop_lru() else {
                break;
            };
            self.bytes -= entry_bytes(&k, &v);
        }
        self.bytes += size;
        self.peak = self.peak.max(self.bytes);
        self.map.put(key, value);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    #[cfg(test)]
    pub fn bytes(&self) -> usize {
        self.bytes
    }

    pub fn peak_bytes(&self) -> usize {
        self.peak
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evicts_least_recently_used() {
        let one = BigUint::from(1u32);
        let per = entry_bytes(&[0; 8], &one);
        let mut c = ComponentCache::new(per * 2);
        c.insert(vec![1; 8].into(), one.clone()).unwrap();
        c.insert(vec![2; 8].into(), one.clone()).unwrap();
        assert!(c.get(&[1; 8]).is_some());
        c.insert(vec![3; 8].into(), one.clone()).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.get(&[2; 8]).is_none());
        assert!(c.get(&[1; 8]).is_some());
        assert!(c.bytes() <= per * 2);
        assert_eq!(c.peak_bytes(), per * 2);
    }

    #[test]
    fn rejects_entry_over_cap() {
        let mut c = ComponentCache::new(10);
        assert!(c.insert(vec![0; 32].into(), BigUint::from(5u32)).is_err());
        assert_eq!(c.len(), 0);
    }
}
