use super::{Error, Result};

/// Identifies a live registration inside one [`CallbackRegistry`].
///
/// Handles are slot indices: unique among live registrations and handed out
/// again once their slot has been released.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CallbackHandle(pub usize);

#[derive(Debug)]
struct Slot<H> {
    stamp: u64,
    handler: H,
}

/// Fixed-capacity table of callbacks.
///
/// Registration takes the lowest free slot. Dispatch order is registration
/// order, tracked with a stamp so that a reused low slot still runs after
/// older registrations.
#[derive(Debug)]
pub struct CallbackRegistry<H, const CAP: usize> {
    slots: [Option<Slot<H>>; CAP],
    next_stamp: u64,
}

impl<H, const CAP: usize> Default for CallbackRegistry<H, CAP> {
    fn default() -> Self {
        Self::new()
    }
}

impl<H, const CAP: usize> CallbackRegistry<H, CAP> {
    pub fn new() -> Self {
        CallbackRegistry {
            slots: std::array::from_fn(|_| None),
            next_stamp: 0,
        }
    }

    pub const fn capacity(&self) -> usize {
        CAP
    }

    pub fn len(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.iter().all(Option::is_none)
    }

    pub fn register(&mut self, handler: H) -> Result<CallbackHandle> {
        let index = self
            .slots
            .iter()
            .position(Option::is_none)
            .ok_or(Error::CapacityExceeded)?;
        self.slots[index] = Some(Slot {
            stamp: self.next_stamp,
            handler,
        });
        self.next_stamp += 1;
        Ok(CallbackHandle(index))
    }

    pub fn unregister(&mut self, handle: CallbackHandle) -> Result<()> {
        self.take(handle).map(drop).ok_or(Error::NotRegistered)
    }

    /// Removes a registration and hands its callback back to the caller.
    pub fn take(&mut self, handle: CallbackHandle) -> Option<H> {
        self.slots
            .get_mut(handle.0)
            .and_then(Option::take)
            .map(|slot| slot.handler)
    }

    pub fn get(&self, handle: CallbackHandle) -> Option<&H> {
        self.slots
            .get(handle.0)
            .and_then(Option::as_ref)
            .map(|slot| &slot.handler)
    }

    pub fn contains(&self, handle: CallbackHandle) -> bool {
        self.get(handle).is_some()
    }

    /// Live handlers in registration order.
    pub fn iter(&self) -> impl Iterator<Item = (CallbackHandle, &H)> {
        let mut live: Vec<(u64, usize)> = self
            .slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.as_ref().map(|s| (s.stamp, i)))
            .collect();
        live.sort_unstable();
        live.into_iter().map(move |(_, i)| {
            let slot = self.slots[i].as_ref().expect("slot is live");
            (CallbackHandle(i), &slot.handler)
        })
    }
}

impl<H: Clone, const CAP: usize> CallbackRegistry<H, CAP> {
    /// Clones the live handlers so they can be invoked after the owner of the
    /// registry has been released.
    pub fn snapshot(&self) -> Vec<H> {
        self.iter().map(|(_, h)| h.clone()).collect()
    }
}
