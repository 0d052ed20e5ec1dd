use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

fn table() -> &'static Mutex<Vec<u64>> {
    static PRIMES: OnceLock<Mutex<Vec<u64>>> = OnceLock::new();
    PRIMES.get_or_init(|| Mutex::new(vec![2, 3]))
}

/// The `idx`-th prime, 0-based (`nth_prime(0) = 2`).
pub fn nth_prime(idx: usize) -> u64 {
    let mut t = table().lock().expect("prime table poisoned");
    while t.len() <= idx {
        let mut c = t.last().copied().unwrap_or(3) + 2;
        while !t.iter().take_while(|&&p| p * p <= c).all(|&p| c % p != 0) {
            c += 2;
        }
        t.push(c);
    }
    t[idx]
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Cantor pairing of two naturals.
pub fn cantor_pair(a: u64, b: u64) -> u64 {
    (a + b) * (a + b + 1) / 2 + b
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrimeOp {
    /// Keep the even positions of the parent stream.
    Even,
    /// The `c`-th of the infinitely many disjoint substreams on odd positions.
    Odd(u64),
}

/// An infinite stream of distinct primes: the explicit `base` list first,
/// then the remaining primes in increasing order, thinned by `path`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeStream {
    pub base: Vec<u64>,
    pub path: Vec<PrimeOp>,
}

impl PrimeStream {
    pub fn new(base: Vec<u64>) -> crate::Result<Self> {
        for (i, &p) in base.iter().enumerate() {
            if !is_prime(p) {
                return Err(crate::Error::InvalidArgument(format!("{p} is not prime")));
            }
            if base[..i].contains(&p) {
                return Err(crate::Error::InvalidArgument(format!("prime {p} listed twice")));
            }
        }
        Ok(Self { base, path: Vec::new() })
    }

    pub fn sub(&self, op: PrimeOp) -> Self {
        let mut path = self.path.clone();
        path.push(op);
        Self { base: self.base.clone(), path }
    }

    /// Prime of level `level ≥ 1`.
    pub fn get(&self, level: u32) -> u64 {
        let mut idx = u64::from(level.max(1) - 1);
        for op in self.path.iter().rev() {
            idx = match *op {
                PrimeOp::Even => 2 * idx,
                PrimeOp::Odd(c) => 2 * cantor_pair(c, idx) + 1,
            };
        }
        self.at(idx as usize)
    }

    fn at(&self, idx: usize) -> u64 {
        if idx < self.base.len() {
            return self.base[idx];
        }
        // the wanted prime is the (idx - |base| + c)-th overall, where c counts
        // the listed primes below it; c only grows, so iterate to the fixpoint
        let skip = idx - self.base.len();
        let mut c = 0;
        loop {
            let p = nth_prime(skip + c);
            let below = self.base.iter().filter(|&&b| b <= p).count();
            if below == c && !self.base.contains(&p) {
                return p;
            }
            c = below.max(c + usize::from(self.base.contains(&p)));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn first_primes() {
        let ps: Vec<u64> = (0..10).map(nth_prime).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn streams_are_disjoint() {
        let s = PrimeStream::new(vec![7, 3]).unwrap();
        assert_eq!((1..=4).map(|i| s.get(i)).collect::<Vec<_>>(), vec![7, 3, 2, 5]);
        let mut seen = BTreeSet::new();
        for i in 1..=6 {
            assert!(seen.insert(s.sub(PrimeOp::Even).get(i)));
            for c in 0..4 {
                assert!(seen.insert(s.sub(PrimeOp::Odd(c)).get(i)));
            }
        }
        assert!(PrimeStream::new(vec![4]).is_err());
        assert!(PrimeStream::new(vec![3, 3]).is_err());
    }
}
