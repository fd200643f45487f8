use std::fmt;
use std::ops::Deref;

use crate::kernel::{Error, Result};

/// Vector with inline storage for `CAP` elements.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct StaticVector<T: Copy + Default, const CAP: usize> {
    items: [T; CAP],
    len: usize,
}

impl<T: Copy + Default, const CAP: usize> Default for StaticVector<T, CAP> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Copy + Default, const CAP: usize> StaticVector<T, CAP> {
    pub fn new() -> Self {
        StaticVector {
            items: [T::default(); CAP],
            len: 0,
        }
    }

    /// Copies `items` into a new vector, or fails if they do not fit.
    pub fn from_slice(items: &[T]) -> Result<Self> {
        let mut v = Self::new();
        v.extend_from_slice(items)?;
        Ok(v)
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

    pub fn as_slice(&self) -> &[T] {
        &self.items[..self.len]
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.items[..self.len]
    }

    pub fn push(&mut self, value: T) -> Result<()> {
        if self.len == CAP {
            return Err(Error::BufferFull);
        }
        self.items[self.len] = value;
        self.len += 1;
        Ok(())
    }

    pub fn pop(&mut self) -> Option<T> {
        if self.len == 0 {
            return None;
        }
        self.len -= 1;
        let value = self.items[self.len];
        self.items[self.len] = T::default();
        Some(value)
    }

    /// All-or-nothing append.
    pub fn extend_from_slice(&mut self, values: &[T]) -> Result<()> {
        if values.len() > CAP - self.len {
            return Err(Error::BufferFull);
        }
        self.items[self.len..self.len + values.len()].copy_from_slice(values);
        self.len += values.len();
        Ok(())
    }

    pub fn insert(&mut self, index: usize, value: T) -> Result<()> {
        assert!(index <= self.len, "insert index out of bounds");
        if self.len == CAP {
            return Err(Error::BufferFull);
        }
        self.items[index..=self.len].rotate_right(1);
        self.items[index] = value;
        self.len += 1;
        Ok(())
    }

    pub fn remove(&mut self, index: usize) -> Option<T> {
        if index >= self.len {
            return None;
        }
        let value = self.items[index];
        self.items[index..self.len].rotate_left(1);
        self.len -= 1;
        self.items[self.len] = T::default();
        Some(value)
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&T) -> bool) {
        let mut write = 0;
        for read in 0..self.len {
            let value = self.items[read];
            if keep(&value) {
                self.items[write] = value;
                write += 1;
            }
        }
        for slot in &mut self.items[write..self.len] {
            *slot = T::default();
        }
        self.len = write;
    }

    pub fn truncate(&mut self, len: usize) {
        while self.len > len {
            self.pop();
        }
    }

    pub fn clear(&mut self) {
        self.truncate(0);
    }
}

impl<T: Copy + Default, const CAP: usize> Deref for StaticVector<T, CAP> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        self.as_slice()
    }
}

impl<T: Copy + Default + fmt::Debug, const CAP: usize> fmt::Debug for StaticVector<T, CAP> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

impl<'a, T: Copy + Default, const CAP: usize> IntoIterator for &'a StaticVector<T, CAP> {
    type Item = &'a T;
    type IntoIter = std::slice::Iter<'a, T>;

    fn into_iter(self) -> Self::IntoIter {
        self.as_slice().iter()
    }
}
