use std::fmt;

use crate::kernel::{Error, Result};

const NIL: usize = usize::MAX;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct Node<T> {
    value: T,
    prev: usize,
    next: usize,
}

/// Doubly linked list whose nodes live in an inline pool of `CAP` slots.
///
/// Free slots are chained through `next` starting at `free`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct StaticList<T: Copy + Default, const CAP: usize> {
    pool: [Node<T>; CAP],
    head: usize,
    tail: usize,
    free: usize,
    len: usize,
}

impl<T: Copy + Default, const CAP: usize> Default for StaticList<T, CAP> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Copy + Default, const CAP: usize> StaticList<T, CAP> {
    pub fn new() -> Self {
        let mut pool = [Node {
            value: T::default(),
            prev: NIL,
            next: NIL,
        }; CAP];
        for (i, node) in pool.iter_mut().enumerate() {
            node.next = if i + 1 < CAP { i + 1 } else { NIL };
        }
        StaticList {
            pool,
            head: NIL,
            tail: NIL,
            free: if CAP > 0 { 0 } else { NIL },
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

    fn allocate(&mut self, value: T) -> Result<usize> {
        if self.free == NIL {
            return Err(Error::BufferFull);
        }
        let slot = self.free;
        self.free = self.pool[slot].next;
        self.pool[slot] = Node {
            value,
            prev: NIL,
            next: NIL,
        };
        self.len += 1;
        Ok(slot)
    }

    fn release(&mut self, slot: usize) -> T {
        let value = self.pool[slot].value;
        self.pool[slot] = Node {
            value: T::default(),
            prev: NIL,
            next: self.free,
        };
        self.free = slot;
        self.len -= 1;
        value
    }

    fn unlink(&mut self, slot: usize) -> T {
        let Node { prev, next, .. } = self.pool[slot];
        match prev {
            NIL => self.head = next,
            p => self.pool[p].next = next,
        }
        match next {
            NIL => self.tail = prev,
            n => self.pool[n].prev = prev,
        }
        self.release(slot)
    }

    pub fn push_front(&mut self, value: T) -> Result<()> {
        let slot = self.allocate(value)?;
        self.pool[slot].next = self.head;
        match self.head {
            NIL => self.tail = slot,
            h => self.pool[h].prev = slot,
        }
        self.head = slot;
        Ok(())
    }

    pub fn push_back(&mut self, value: T) -> Result<()> {
        let slot = self.allocate(value)?;
        self.pool[slot].prev = self.tail;
        match self.tail {
            NIL => self.head = slot,
            t => self.pool[t].next = slot,
        }
        self.tail = slot;
        Ok(())
    }

    pub fn pop_front(&mut self) -> Option<T> {
        (self.head != NIL).then(|| self.unlink(self.head))
    }

    pub fn pop_back(&mut self) -> Option<T> {
        (self.tail != NIL).then(|| self.unlink(self.tail))
    }

    pub fn front(&self) -> Option<&T> {
        (self.head != NIL).then(|| &self.pool[self.head].value)
    }

    pub fn back(&self) -> Option<&T> {
        (self.tail != NIL).then(|| &self.pool[self.tail].value)
    }

    /// Removes every element matching `pred` and returns how many went.
    pub fn remove_if(&mut self, mut pred: impl FnMut(&T) -> bool) -> usize {
        let mut removed = 0;
        let mut cursor = self.head;
        while cursor != NIL {
            let next = self.pool[cursor].next;
            if pred(&self.pool[cursor].value) {
                self.unlink(cursor);
                removed += 1;
            }
            cursor = next;
        }
        removed
    }

    pub fn contains(&self, value: &T) -> bool
    where
        T: PartialEq,
    {
        self.iter().any(|v| v == value)
    }

    pub fn clear(&mut self) {
        while self.pop_front().is_some() {}
    }

    pub fn iter(&self) -> Iter<'_, T, CAP> {
        Iter {
            list: self,
            cursor: self.head,
        }
    }

    /// Verifies the structural invariants of the pool. Test support.
    #[doc(hidden)]
    pub fn check_invariants(&self) {
        let mut seen = [false; CAP];
        let mut live = 0;
        let mut prev = NIL;
        let mut cursor = self.head;
        while cursor != NIL {
            assert!(!seen[cursor], "live chain revisits slot {cursor}");
            seen[cursor] = true;
            assert_eq!(self.pool[cursor].prev, prev, "broken back link");
            prev = cursor;
            cursor = self.pool[cursor].next;
            live += 1;
        }
        assert_eq!(self.tail, prev, "tail does not end the chain");
        assert_eq!(live, self.len);
        let mut free = 0;
        cursor = self.free;
        while cursor != NIL {
            assert!(!seen[cursor], "slot {cursor} is both live and free");
            seen[cursor] = true;
            cursor = self.pool[cursor].next;
            free += 1;
        }
        assert_eq!(live + free, CAP);
    }
}

pub struct Iter<'a, T: Copy + Default, const CAP: usize> {
    list: &'a StaticList<T, CAP>,
    cursor: usize,
}

impl<'a, T: Copy + Default, const CAP: usize> Iterator for Iter<'a, T, CAP> {
    type Item = &'a T;

    fn next(&mut self) -> Option<&'a T> {
        if self.cursor == NIL {
            return None;
        }
        let node = &self.list.pool[self.cursor];
        self.cursor = node.next;
        Some(&node.value)
    }
}

impl<T: Copy + Default + fmt::Debug, const CAP: usize> fmt::Debug for StaticList<T, CAP> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}
