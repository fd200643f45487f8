//! pMP against num-bigint on random 256-bit inputs.

use num_bigint::BigUint as Oracle;
use wsn_core::pmp::{PmpError, U256};
use wsn_core::simnet::SimRng;

pub fn to_oracle(x: &U256) -> Oracle {
    Oracle::from_slice(x.limbs())
}

pub fn from_oracle(x: &Oracle) -> U256 {
    let digits = x.to_u32_digits();
    assert!(digits.len() <= 8, "oracle value wider than 256 bits");
    let mut limbs = [0u32; 8];
    limbs[..digits.len()].copy_from_slice(&digits);
    U256::from_limbs(limbs)
}

pub fn modulus_256() -> Oracle {
    Oracle::from(1u8) << 256
}

/// Values of random bit length, with runs of all-ones and all-zero limbs
/// mixed in so carries ripple across limb boundaries.
pub fn random(rng: &mut SimRng) -> U256 {
    let mut limbs = [0u32; 8];
    for l in &mut limbs {
        *l = match rng.below(8) {
            0 => 0,
            1 => u32::MAX,
            _ => rng.next_u64() as u32,
        };
    }
    let bits = rng.below(257) as usize;
    for (i, l) in limbs.iter_mut().enumerate() {
        let keep = bits.saturating_sub(32 * i).min(32);
        *l = if keep == 0 {
            0
        } else {
            *l & (u32::MAX >> (32 - keep))
        };
    }
    U256::from_limbs(limbs)
}

pub fn random_nonzero(rng: &mut SimRng) -> U256 {
    loop {
        let v = random(rng);
        if !v.is_zero() {
            return v;
        }
    }
}

pub fn round_trip(cases: usize) {
    let mut rng = SimRng::new(0);
    for _ in 0..cases {
        let a = random(&mut rng);
        assert_eq!(from_oracle(&to_oracle(&a)), a);
        assert_eq!(U256::from_hex(&to_oracle(&a).to_str_radix(16)).unwrap(), a);
    }
}

pub fn xor(cases: usize) {
    let mut rng = SimRng::new(1);
    for _ in 0..cases {
        let (a, b) = (random(&mut rng), random(&mut rng));
        assert_eq!(to_oracle(&a.xor(&b)), to_oracle(&a) ^ to_oracle(&b));
    }
}

pub fn shl(cases: usize) {
    let mut rng = SimRng::new(2);
    for _ in 0..cases {
        let a = random(&mut rng);
        let k = rng.below(300) as u32;
        let full = to_oracle(&a) << k;
        let (got, overflow) = a.shl(k);
        assert_eq!(to_oracle(&got), &full % modulus_256(), "a={a} k={k}");
        assert_eq!(overflow, full >= modulus_256(), "a={a} k={k}");
    }
}

pub fn add(cases: usize) {
    let mut rng = SimRng::new(3);
    for _ in 0..cases {
        let (a, b) = (random(&mut rng), random(&mut rng));
        let full = to_oracle(&a) + to_oracle(&b);
        let (sum, carry) = a.add(&b);
        assert_eq!(to_oracle(&sum), &full % modulus_256());
        assert_eq!(carry, full >= modulus_256());
    }
}

pub fn sub(cases: usize) {
    let mut rng = SimRng::new(4);
    for _ in 0..cases {
        let (a, b) = (random(&mut rng), random(&mut rng));
        let (oa, ob) = (to_oracle(&a), to_oracle(&b));
        let borrow = oa < ob;
        let expected = if borrow {
            oa + modulus_256() - ob
        } else {
            oa - ob
        };
        let (diff, got_borrow) = a.sub(&b);
        assert_eq!(to_oracle(&diff), expected);
        assert_eq!(got_borrow, borrow);
    }
}

pub fn cmp(cases: usize) {
    let mut rng = SimRng::new(5);
    let mut seen = [false; 3];
    for i in 0..cases {
        let a = random(&mut rng);
        let b = if i % 10 == 0 { a } else { random(&mut rng) };
        let want = to_oracle(&a).cmp(&to_oracle(&b));
        assert_eq!(a.cmp(&b), want);
        seen[(want as i8 + 1) as usize] = true;
    }
    assert_eq!(seen, [true; 3]);
}

pub fn rem(cases: usize) {
    let mut rng = SimRng::new(6);
    for _ in 0..cases {
        let (a, m) = (random(&mut rng), random_nonzero(&mut rng));
        assert_eq!(
            to_oracle(&a.rem(&m).unwrap()),
            to_oracle(&a) % to_oracle(&m)
        );
    }
    assert_eq!(U256::one().rem(&U256::ZERO), Err(PmpError::DivisionByZero));
}

pub fn mul_mod(cases: usize) {
    let mut rng = SimRng::new(7);
    for _ in 0..cases {
        let m = random_nonzero(&mut rng);
        let a = random(&mut rng).rem(&m).unwrap();
        let b = random(&mut rng).rem(&m).unwrap();
        let want = to_oracle(&a) * to_oracle(&b) % to_oracle(&m);
        assert_eq!(
            to_oracle(&a.mul_mod(&b, &m).unwrap()),
            want,
            "a={a} b={b} m={m}"
        );
    }
}

/// Every arithmetic check by name, in the order they are usually reported.
pub type Check = (&'static str, fn(usize));

pub const ALL: [Check; 7] = [
    ("xor", xor),
    ("shl", shl),
    ("add", add),
    ("sub", sub),
    ("cmp", cmp),
    ("mod", rem),
    ("mul_mod", mul_mod),
];
