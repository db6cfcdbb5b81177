//! Onto maps `N -> N^2` used to fold two existential variables into one.

/// The diagonal (Cantor) enumeration of `N^2`.
///
/// Pairs are listed diagonal by diagonal, `a + b = 0, 1, 2, ...`, and within
/// the diagonal `a + b = s` in the order `(s, 0), (s-1, 1), ..., (0, s)`.
/// So `decode(3..=5)` is `(2,0), (1,1), (0,2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PairingCodec;

impl PairingCodec {
    pub fn diagonal() -> Self {
        PairingCodec
    }

    pub fn name(&self) -> &'static str {
        "diagonal"
    }

    /// `d(n) = (d1(n), d2(n))`.
    pub fn decode(&self, n: u64) -> (u64, u64) {
        let n = u128::from(n);
        // largest s with s(s+1)/2 <= n
        let mut s = ((8 * n + 1).isqrt() - 1) / 2;
        while s * (s + 1) / 2 > n {
            s -= 1;
        }
        while (s + 1) * (s + 2) / 2 <= n {
            s += 1;
        }
        let b = n - s * (s + 1) / 2;
        ((s - b) as u64, b as u64)
    }

    /// Inverse of [`decode`](Self::decode); `None` if the index overflows `u64`.
    pub fn encode(&self, a: u64, b: u64) -> Option<u64> {
        let s = u128::from(a) + u128::from(b);
        u64::try_from(s * (s + 1) / 2 + u128::from(b)).ok()
    }

    pub fn d1(&self, n: u64) -> u64 {
        self.decode(n).0
    }

    pub fn d2(&self, n: u64) -> u64 {
        self.decode(n).1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn table_prefix() {
        let codec = PairingCodec::diagonal();
        let got: Vec<(u64, u64)> = (0..6).map(|n| codec.decode(n)).collect();
        assert_eq!(got, vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]);
        assert_eq!(codec.decode(5), (0, 2));
    }

    #[test]
    fn large_indices() {
        let codec = PairingCodec::diagonal();
        let (a, b) = codec.decode(u64::MAX);
        assert_eq!(codec.encode(a, b), Some(u64::MAX));
    }

    proptest! {
        #[test]
        fn onto_with_bound(a in 0u64..5_000, b in 0u64..5_000) {
            let codec = PairingCodec::diagonal();
            let n = codec.encode(a, b).unwrap();
            prop_assert_eq!(codec.decode(n), (a, b));
            prop_assert!(u128::from(n) <= (u128::from(a) + u128::from(b) + 1).pow(2));
        }

        #[test]
        fn decode_then_encode(n in any::<u64>()) {
            let codec = PairingCodec::diagonal();
            let (a, b) = codec.decode(n);
            prop_assert_eq!(codec.encode(a, b), Some(n));
        }
    }
}
