//! Adversaries that build a sequence on which a candidate guesser keeps
//! changing its mind.
//!
//! Every adversary runs in phases. Phase `k` has a target output and a
//! sequence to follow; it appends that sequence's next entry to the prefix,
//! one at a time, until the guesser produces the target. The index of that
//! last entry is the flip `x_k`. A phase that needs more than `step_budget`
//! entries stops the run: the candidate may well have settled (wrongly) on
//! that branch.

use std::fmt;

use thiserror::Error;

use crate::oracle::{FinitePrefix, SequenceOracle};
use crate::synth::{Guesser, SynthError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdversaryError {
    /// No extension of the prefix on the required side exists.
    #[error("no extension available for prefix {0}")]
    ExtensionUnavailable(FinitePrefix),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error(transparent)]
    Guess(#[from] SynthError),
    #[error("extension `{label}` disagrees with prefix {prefix}")]
    Mismatch { label: String, prefix: FinitePrefix },
}

/// Ways to continue a prefix inside or outside a target set.
pub trait ExtensionOracles {
    /// An extension of `p` lying in the set, if one exists.
    fn in_s(&self, p: &FinitePrefix) -> Option<SequenceOracle>;
    /// An extension of `p` lying outside the set, if one exists.
    fn out_s(&self, p: &FinitePrefix) -> Option<SequenceOracle>;
}

/// The set of sequences with infinitely many zeros: zeros tail inside,
/// ones tail outside. Every prefix has both.
#[derive(Debug, Clone, Copy, Default)]
pub struct InfinitelyManyZeros;

impl ExtensionOracles for InfinitelyManyZeros {
    fn in_s(&self, p: &FinitePrefix) -> Option<SequenceOracle> {
        Some(SequenceOracle::extend_with(p, format!("{p}+zeros"), |_| 0))
    }

    fn out_s(&self, p: &FinitePrefix) -> Option<SequenceOracle> {
        Some(SequenceOracle::extend_with(p, format!("{p}+ones"), |_| 1))
    }
}

/// The set of sequences containing a zero. A prefix that already contains a
/// zero has no extension outside it.
#[derive(Debug, Clone, Copy, Default)]
pub struct ContainsZero;

impl ExtensionOracles for ContainsZero {
    fn in_s(&self, p: &FinitePrefix) -> Option<SequenceOracle> {
        Some(SequenceOracle::extend_with(p, format!("{p}+zeros"), |_| 0))
    }

    fn out_s(&self, p: &FinitePrefix) -> Option<SequenceOracle> {
        if p.contains(0) {
            None
        } else {
            Some(SequenceOracle::extend_with(p, format!("{p}+ones"), |_| 1))
        }
    }
}

/// Permutations of `N`, for injective prefixes.
///
/// Inside: list the missing values below the prefix maximum in increasing
/// order, then continue with `max+1, max+2, ...`. Outside: skip `max+1`
/// forever and continue with `max+2, max+3, ...`, leaving a permanent gap.
#[derive(Debug, Clone, Copy, Default)]
pub struct Permutations;

fn next_values(p: &FinitePrefix) -> (Vec<u64>, u64) {
    let mut seen: Vec<u64> = p.entries().to_vec();
    seen.sort_unstable();
    let start = seen.last().map_or(0, |m| m + 1);
    let gaps = (0..start).filter(|v| seen.binary_search(v).is_err()).collect();
    (gaps, start)
}

impl ExtensionOracles for Permutations {
    fn in_s(&self, p: &FinitePrefix) -> Option<SequenceOracle> {
        let (gaps, start) = next_values(p);
        let base = p.len() as u64;
        Some(SequenceOracle::extend_with(p, format!("{p}+fill"), move |i| {
            let k = i - base;
            match gaps.get(k as usize) {
                Some(v) => *v,
                None => start + (k - gaps.len() as u64),
            }
        }))
    }

    fn out_s(&self, p: &FinitePrefix) -> Option<SequenceOracle> {
        let (_, start) = next_values(p);
        let base = p.len() as u64;
        Some(SequenceOracle::extend_with(p, format!("{p}+skip"), move |i| {
            start + 1 + (i - base)
        }))
    }
}

/// Sequences over `{0, 5}` with infinitely many fives: fives tail inside,
/// zeros tail outside.
#[derive(Debug, Clone, Copy, Default)]
pub struct CantorFives;

impl ExtensionOracles for CantorFives {
    fn in_s(&self, p: &FinitePrefix) -> Option<SequenceOracle> {
        Some(SequenceOracle::extend_with(p, format!("{p}+fives"), |_| 5))
    }

    fn out_s(&self, p: &FinitePrefix) -> Option<SequenceOracle> {
        Some(SequenceOracle::extend_with(p, format!("{p}+zeros"), |_| 0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlipStatus {
    Completed { flips: usize },
    BudgetExhausted { phase: usize, steps: u64 },
}

impl fmt::Display for FlipStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlipStatus::Completed { flips } => write!(f, "completed({flips})"),
            FlipStatus::BudgetExhausted { phase, steps } => {
                write!(f, "budget_exhausted(phase={phase}, steps={steps})")
            }
        }
    }
}

/// Record of an adversary run. `flips[k]` is the last index of the prefix
/// when phase `k + 1` reached its target `guesses[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipTrace {
    pub flips: Vec<u64>,
    pub guesses: Vec<bool>,
    /// Target of the first phase; later targets alternate.
    pub first_target: bool,
    pub status: FlipStatus,
}

impl FlipTrace {
    pub fn is_completed(&self) -> bool {
        matches!(self.status, FlipStatus::Completed { .. })
    }

    /// Flip indices strictly increase and guesses alternate from
    /// `first_target`.
    pub fn is_alternating(&self) -> bool {
        self.flips.windows(2).all(|w| w[0] < w[1])
            && self
                .guesses
                .iter()
                .enumerate()
                .all(|(k, g)| *g == (self.first_target ^ (k % 2 == 1)))
    }
}

impl fmt::Display for FlipTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flips: Vec<String> = self.flips.iter().map(u64::to_string).collect();
        let guesses: Vec<String> = self.guesses.iter().map(|g| u8::from(*g).to_string()).collect();
        write!(
            f,
            "flips=[{}] guesses=[{}] status={}",
            flips.join(","),
            guesses.join(","),
            self.status
        )
    }
}

fn check_args(target_flips: usize, step_budget: u64) -> Result<(), AdversaryError> {
    if target_flips == 0 {
        return Err(AdversaryError::InvalidArgument("target_flips must be at least 1"));
    }
    if step_budget == 0 {
        return Err(AdversaryError::InvalidArgument("step_budget must be at least 1"));
    }
    Ok(())
}

/// Shared phase loop. Phase `k` (from 1) wants `first_target` when `k` is odd
/// and its negation otherwise; `inside(k)` selects the extension side.
fn run_phases(
    g: &Guesser,
    ext: &dyn ExtensionOracles,
    first_target: bool,
    inside: impl Fn(usize) -> bool,
    target_flips: usize,
    step_budget: u64,
) -> Result<(FinitePrefix, FlipTrace), AdversaryError> {
    check_args(target_flips, step_budget)?;
    let mut prefix = FinitePrefix::empty();
    let mut trace = FlipTrace {
        flips: Vec::new(),
        guesses: Vec::new(),
        first_target,
        status: FlipStatus::Completed { flips: 0 },
    };
    for phase in 1..=target_flips {
        let target = first_target ^ (phase % 2 == 0);
        let branch = if inside(phase) { ext.in_s(&prefix) } else { ext.out_s(&prefix) };
        let branch = branch.ok_or_else(|| AdversaryError::ExtensionUnavailable(prefix.clone()))?;
        if !branch.agrees_prefix(&prefix) {
            return Err(AdversaryError::Mismatch {
                label: branch.label().to_string(),
                prefix,
            });
        }
        let mut steps = 0;
        loop {
            if steps == step_budget {
                trace.status = FlipStatus::BudgetExhausted { phase, steps };
                return Ok((prefix, trace));
            }
            prefix.push(branch.value(prefix.len() as u64));
            steps += 1;
            if g.guess(&prefix)? == target {
                break;
            }
        }
        trace.flips.push(prefix.len() as u64 - 1);
        trace.guesses.push(target);
    }
    trace.status = FlipStatus::Completed { flips: target_flips };
    Ok((prefix, trace))
}

trait AgreesPrefix {
    fn agrees_prefix(&self, p: &FinitePrefix) -> bool;
}

impl AgreesPrefix for SequenceOracle {
    fn agrees_prefix(&self, p: &FinitePrefix) -> bool {
        p.entries().iter().enumerate().all(|(i, v)| self.value(i as u64) == *v)
    }
}

/// Forces `g` to alternate: odd phases follow `ext.in_s` until `g` says 1,
/// even phases follow `ext.out_s` until `g` says 0.
pub fn diagonalize(
    g: &Guesser,
    ext: &dyn ExtensionOracles,
    target_flips: usize,
    step_budget: u64,
) -> Result<(FinitePrefix, FlipTrace), AdversaryError> {
    run_phases(g, ext, true, |phase| phase % 2 == 1, target_flips, step_budget)
}

/// Identity until `g` says 1, then skip a value until `g` says 0, then fill
/// the gap and continue, and so on. The prefix is always injective.
pub fn permutation_adversary(g: &Guesser, target_flips: usize, step_budget: u64) -> Result<(FinitePrefix, FlipTrace), AdversaryError> {
    diagonalize(g, &Permutations, target_flips, step_budget)
}

/// Zeros until `g` says 0, then fives until `g` says 1, alternating.
pub fn cantor_adversary(g: &Guesser, target_flips: usize, step_budget: u64) -> Result<(FinitePrefix, FlipTrace), AdversaryError> {
    run_phases(g, &CantorFives, false, |phase| phase % 2 == 0, target_flips, step_budget)
}

/// Re-runs `g` on the recorded flip indices of `prefix`; true iff it gives
/// the recorded guesses.
pub fn replay_matches(g: &Guesser, prefix: &FinitePrefix, trace: &FlipTrace) -> Result<bool, AdversaryError> {
    for (x, want) in trace.flips.iter().zip(&trace.guesses) {
        let upto: FinitePrefix = prefix.entries()[..=*x as usize].to_vec().into();
        if g.guess(&upto)? != *want {
            return Ok(false);
        }
    }
    Ok(true)
}
