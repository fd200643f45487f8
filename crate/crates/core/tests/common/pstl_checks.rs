//! pSTL containers against std collections, with a capacity cutoff.

use std::collections::{BTreeMap, VecDeque};

use wsn_core::pstl::{StaticList, StaticMap, StaticVector};
use wsn_core::simnet::SimRng;
use wsn_core::Error;

const CAP: usize = 24;

pub fn vector(ops: usize) {
    let mut rng = SimRng::new(21);
    let mut v = StaticVector::<u32, CAP>::new();
    let mut oracle: Vec<u32> = Vec::new();
    let mut full = 0;
    for _ in 0..ops {
        let x = rng.below(1000) as u32;
        let before = v.as_slice().to_vec();
        match rng.below(7) {
            0 | 1 => {
                let got = v.push(x);
                if oracle.len() < CAP {
                    oracle.push(x);
                    assert_eq!(got, Ok(()));
                } else {
                    full += 1;
                    assert_eq!(got, Err(Error::BufferFull));
                    assert_eq!(v.as_slice(), before.as_slice());
                }
            }
            2 => assert_eq!(v.pop(), oracle.pop()),
            3 => {
                let i = rng.below(oracle.len() as u64 + 1) as usize;
                let got = v.insert(i, x);
                if oracle.len() < CAP {
                    oracle.insert(i, x);
                    assert_eq!(got, Ok(()));
                } else {
                    full += 1;
                    assert_eq!(got, Err(Error::BufferFull));
                    assert_eq!(v.as_slice(), before.as_slice());
                }
            }
            4 => {
                let i = rng.below(oracle.len() as u64 + 2) as usize;
                let want = (i < oracle.len()).then(|| oracle.remove(i));
                assert_eq!(v.remove(i), want);
            }
            5 => {
                let m = rng.below(5) as u32 + 2;
                v.retain(|e| e % m != 0);
                oracle.retain(|e| e % m != 0);
            }
            _ => {
                let extra: Vec<u32> = (0..rng.below(4)).map(|i| x + i as u32).collect();
                let got = v.extend_from_slice(&extra);
                if oracle.len() + extra.len() <= CAP {
                    oracle.extend_from_slice(&extra);
                    assert_eq!(got, Ok(()));
                } else {
                    full += 1;
                    assert_eq!(got, Err(Error::BufferFull));
                    assert_eq!(v.as_slice(), before.as_slice());
                }
            }
        }
        assert_eq!(v.as_slice(), oracle.as_slice());
        assert_eq!(v.is_full(), oracle.len() == CAP);
    }
    assert!(full > 100, "capacity path exercised only {full} times");
}

pub fn map(ops: usize) {
    let mut rng = SimRng::new(22);
    let mut m = StaticMap::<u16, u32, CAP>::new();
    let mut oracle: BTreeMap<u16, u32> = BTreeMap::new();
    let mut full = 0;
    for step in 0..ops {
        let k = rng.below(64) as u16;
        let v = step as u32;
        let before = m.as_slice().to_vec();
        match rng.below(20) {
            0..=9 => {
                let got = m.insert(k, v);
                if oracle.len() < CAP || oracle.contains_key(&k) {
                    assert_eq!(got, Ok(oracle.insert(k, v)));
                } else {
                    full += 1;
                    assert_eq!(got, Err(Error::BufferFull));
                    assert_eq!(m.as_slice(), before.as_slice());
                }
            }
            10..=14 => match oracle.remove(&k) {
                Some(want) => assert_eq!(m.remove(&k), Ok(want)),
                None => {
                    assert_eq!(m.remove(&k), Err(Error::NotRegistered));
                    assert_eq!(m.as_slice(), before.as_slice());
                }
            },
            15..=18 => {
                assert_eq!(m.get(&k), oracle.get(&k));
                if let (Some(a), Some(b)) = (m.get_mut(&k), oracle.get_mut(&k)) {
                    *a += 1;
                    *b += 1;
                }
            }
            _ => {
                let bound = rng.below(64) as u16;
                m.retain(|key, _| *key < bound);
                oracle.retain(|key, _| *key < bound);
            }
        }
        let want: Vec<(u16, u32)> = oracle.iter().map(|(a, b)| (*a, *b)).collect();
        assert_eq!(m.as_slice(), want.as_slice());
    }
    assert!(full > 100, "capacity path exercised only {full} times");
}

pub fn list(ops: usize) {
    let mut rng = SimRng::new(23);
    let mut l = StaticList::<u32, CAP>::new();
    let mut oracle: VecDeque<u32> = VecDeque::new();
    let mut full = 0;
    for _ in 0..ops {
        let x = rng.below(1000) as u32;
        let before: Vec<u32> = l.iter().copied().collect();
        match rng.below(20) {
            0..=9 => {
                let front = rng.below(2) == 0;
                let got = if front {
                    l.push_front(x)
                } else {
                    l.push_back(x)
                };
                if oracle.len() < CAP {
                    if front {
                        oracle.push_front(x)
                    } else {
                        oracle.push_back(x)
                    }
                    assert_eq!(got, Ok(()));
                } else {
                    full += 1;
                    assert_eq!(got, Err(Error::BufferFull));
                    assert_eq!(l.iter().copied().collect::<Vec<_>>(), before);
                }
            }
            10..=12 => assert_eq!(l.pop_front(), oracle.pop_front()),
            13..=15 => assert_eq!(l.pop_back(), oracle.pop_back()),
            16 => {
                let m = rng.below(7) as u32 + 2;
                let want = oracle.iter().filter(|e| *e % m == 0).count();
                oracle.retain(|e| e % m != 0);
                assert_eq!(l.remove_if(|e| e % m == 0), want);
            }
            _ => {
                assert_eq!(l.front(), oracle.front());
                assert_eq!(l.back(), oracle.back());
                assert_eq!(l.contains(&x), oracle.contains(&x));
            }
        }
        assert_eq!(
            l.iter().copied().collect::<Vec<_>>(),
            Vec::from(oracle.clone())
        );
        assert_eq!(l.len(), oracle.len());
        l.check_invariants();
    }
    assert!(full > 100, "capacity path exercised only {full} times");
}
