use std::fmt;

use crate::kernel::{Error, Result};

/// Ordered map backed by a sorted inline array.
///
/// Lookups binary-search the live prefix; inserts and removals shift the
/// tail. Overwriting an existing key always succeeds, even when full.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct StaticMap<K: Copy + Default + Ord, V: Copy + Default, const CAP: usize> {
    entries: [(K, V); CAP],
    len: usize,
}

impl<K: Copy + Default + Ord, V: Copy + Default, const CAP: usize> Default
    for StaticMap<K, V, CAP>
{
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Copy + Default + Ord, V: Copy + Default, const CAP: usize> StaticMap<K, V, CAP> {
    pub fn new() -> Self {
        StaticMap {
            entries: [(K::default(), V::default()); CAP],
            len: 0,
        }
    }

    pub const fn capacity(&self) -> usize {
        CAP
    }

    pub const fn len(&self) -> usize {
        self.len
    }

    pub const fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub const fn is_full(&self) -> bool {
        self.len == CAP
    }

    fn search(&self, key: &K) -> std::result::Result<usize, usize> {
        self.entries[..self.len].binary_search_by(|(k, _)| k.cmp(key))
    }

    /// Inserts or overwrites. Returns the previous value for `key`, if any.
    pub fn insert(&mut self, key: K, value: V) -> Result<Option<V>> {
        match self.search(&key) {
            Ok(i) => Ok(Some(std::mem::replace(&mut self.entries[i].1, value))),
            Err(_) if self.len == CAP => Err(Error::BufferFull),
            Err(i) => {
                self.entries[i..=self.len].rotate_right(1);
                self.entries[i] = (key, value);
                self.len += 1;
                Ok(None)
            }
        }
    }

    pub fn get(&self, key: &K) -> Option<&V> {
        self.search(key).ok().map(|i| &self.entries[i].1)
    }

    pub fn get_mut(&mut self, key: &K) -> Option<&mut V> {
        self.search(key).ok().map(|i| &mut self.entries[i].1)
    }

    pub fn contains_key(&self, key: &K) -> bool {
        self.search(key).is_ok()
    }

    /// Removes `key`, keeping the remaining keys in order.
    pub fn remove(&mut self, key: &K) -> Result<V> {
        let i = self.search(key).map_err(|_| Error::NotRegistered)?;
        let (_, value) = self.entries[i];
        self.entries[i..self.len].rotate_left(1);
        self.len -= 1;
        self.entries[self.len] = (K::default(), V::default());
        Ok(value)
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&K, &V) -> bool) {
        let mut write = 0;
        for read in 0..self.len {
            let entry = self.entries[read];
            if keep(&entry.0, &entry.1) {
                self.entries[write] = entry;
                write += 1;
            }
        }
        for slot in &mut self.entries[write..self.len] {
            *slot = (K::default(), V::default());
        }
        self.len = write;
    }

    pub fn clear(&mut self) {
        self.retain(|_, _| false);
    }

    /// Live entries in ascending key order.
    pub fn as_slice(&self) -> &[(K, V)] {
        &self.entries[..self.len]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &V)> {
        self.as_slice().iter().map(|(k, v)| (k, v))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&K, &mut V)> {
        self.entries[..self.len].iter_mut().map(|(k, v)| (&*k, v))
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.as_slice().iter().map(|(k, _)| k)
    }

    pub fn values(&self) -> impl Iterator<Item = &V> {
        self.as_slice().iter().map(|(_, v)| v)
    }
}

impl<K, V, const CAP: usize> fmt::Debug for StaticMap<K, V, CAP>
where
    K: Copy + Default + Ord + fmt::Debug,
    V: Copy + Default + fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter()).finish()
    }
}
