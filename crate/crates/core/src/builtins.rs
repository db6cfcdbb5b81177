//! Plain host functions shared by signatures, guessers and the CLI registry.

use crate::pairing::PairingCodec;

pub fn add(a: u64, b: u64) -> u64 {
    a.saturating_add(b)
}

pub fn mul(a: u64, b: u64) -> u64 {
    a.saturating_mul(b)
}

/// Truncated subtraction.
pub fn monus(a: u64, b: u64) -> u64 {
    a.saturating_sub(b)
}

/// `pick(z, a, b, c)` is `a` when `z = 0`, `b` when `z = 1` and `c` otherwise.
pub fn pick(z: u64, a: u64, b: u64, c: u64) -> u64 {
    match z {
        0 => a,
        1 => b,
        _ => c,
    }
}

pub fn d1(n: u64) -> u64 {
    PairingCodec::diagonal().decode(n).0
}

pub fn d2(n: u64) -> u64 {
    PairingCodec::diagonal().decode(n).1
}

pub fn sum(xs: &[u64]) -> u64 {
    xs.iter().fold(0u64, |acc, &x| acc.saturating_add(x))
}

pub fn contains_zero(xs: &[u64]) -> bool {
    xs.contains(&0)
}

/// True iff the prefix has even length.
pub fn even_length(xs: &[u64]) -> bool {
    xs.len().is_multiple_of(2)
}

/// True iff the values of `xs` are exactly `{0, ..., len-1}`.
pub fn initial_segment(xs: &[u64]) -> bool {
    let mut seen = vec![false; xs.len()];
    for &x in xs {
        match usize::try_from(x).ok().and_then(|i| seen.get_mut(i)) {
            Some(slot) if !*slot => *slot = true,
            _ => return false,
        }
    }
    true
}

pub fn last_is(xs: &[u64], value: u64) -> bool {
    xs.last() == Some(&value)
}
