use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

/// A permutation of `{0, ..., m-1}` stored as its image table, acting on the
/// right: `i.(s t) = (i.s).t`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Box<[u32]>);

impl Perm {
    pub fn identity(m: u32) -> Self {
        Self((0..m).collect())
    }

    /// `i -> i + k mod m`, the `k`-th power of the full cycle `(0 1 ... m-1)`.
    pub fn cycle_power(m: u32, k: u64) -> Self {
        let k = (k % u64::from(m)) as u32;
        Self((0..m).map(|i| (i + k) % m).collect())
    }

    /// Uniformly random permutation of `m` letters.
    pub fn random<R: Rng + ?Sized>(m: u32, rng: &mut R) -> Self {
        let mut images: Vec<u32> = (0..m).collect();
        images.shuffle(rng);
        Self(images.into_boxed_slice())
    }

    /// Builds from an image table; `None` unless it is a bijection.
    pub fn from_images(images: Vec<u32>) -> Option<Self> {
        let m = images.len();
        let mut seen = vec![false; m];
        for &i in &images {
            let i = i as usize;
            if i >= m || std::mem::replace(&mut seen[i], true) {
                return None;
            }
        }
        Some(Self(images.into_boxed_slice()))
    }

    pub fn degree(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, i: u32) -> u32 {
        self.0[i as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Self(self.0.iter().map(|&i| other.apply(i)).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        Self(inv.into_boxed_slice())
    }

    /// The exponent `k` when `self` is a power of the full cycle.
    pub fn cycle_exponent(&self) -> Option<u64> {
        let m = self.degree();
        let k = self.apply(0);
        (0..m).all(|i| self.apply(i) == (i + k) % m).then_some(u64::from(k))
    }

    /// All `m!` permutations in lexicographic order of image tables.
    pub fn all(m: u32) -> Vec<Perm> {
        fn rec(prefix: &mut Vec<u32>, used: &mut [bool], out: &mut Vec<Perm>) {
            if prefix.len() == used.len() {
                out.push(Perm(prefix.clone().into_boxed_slice()));
                return;
            }
            for i in 0..used.len() {
                if !used[i] {
                    used[i] = true;
                    prefix.push(i as u32);
                    rec(prefix, used, out);
                    prefix.pop();
                    used[i] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), &mut vec![false; m as usize], &mut out);
        out
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", &self.0)
    }
}
