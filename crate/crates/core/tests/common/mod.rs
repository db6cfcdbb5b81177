//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use guessability::{Formula, SequenceOracle, Term};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A pseudo-random sequence with values below `modulus`.
pub fn random_oracle(seed: u64, modulus: u64) -> SequenceOracle {
    SequenceOracle::from_fn(format!("random:{seed}"), move |i| mix(seed ^ mix(i)) % modulus)
}

/// `base` through index `keep`, then fresh pseudo-random values.
pub fn random_extension(base: &SequenceOracle, keep: Option<u64>, seed: u64, modulus: u64) -> SequenceOracle {
    let base = base.clone();
    SequenceOracle::from_fn(format!("ext:{seed}"), move |i| match keep {
        Some(k) if i <= k => base.value(i),
        _ => mix(seed ^ mix(i ^ 0x5555)) % modulus,
    })
}

const BINDERS: [&str; 3] = ["z", "w", "x"];
const SEQ_SYMBOLS: [&str; 5] = ["sum", "len", "last", "max", "Gz"];

/// Random term over the standard signature. `vars` are the variables that
/// may occur free; ellipsis binders are added while generating bodies.
/// Ellipsis bounds stay small so that tuples are short.
pub fn gen_term(rng: &mut TestRng, depth: u32, vars: &[String]) -> Term {
    if depth == 0 || rng.gen_bool(0.25) {
        return if !vars.is_empty() && rng.gen_bool(0.5) {
            Term::var(vars.choose(rng).unwrap().clone())
        } else {
            Term::num(rng.gen_range(0..6))
        };
    }
    match rng.gen_range(0..6) {
        0 | 1 => Term::seq(gen_term(rng, depth - 1, vars)),
        2 => {
            let op = ["add", "mul", "monus"].choose(rng).unwrap();
            Term::app(*op, vec![gen_term(rng, depth - 1, vars), gen_term(rng, depth - 1, vars)])
        }
        3 => Term::app(*["d1", "d2"].choose(rng).unwrap(), vec![gen_term(rng, depth - 1, vars)]),
        _ => {
            let binder = BINDERS.choose(rng).unwrap().to_string();
            let mut inner = vars.to_vec();
            if !inner.contains(&binder) {
                inner.push(binder.clone());
            }
            let body = gen_term(rng, depth - 1, &inner);
            Term::ellipsis(*SEQ_SYMBOLS.choose(rng).unwrap(), body, binder, gen_bound(rng, vars))
        }
    }
}

fn gen_bound(rng: &mut TestRng, vars: &[String]) -> Term {
    match rng.gen_range(0..3) {
        0 if !vars.is_empty() => Term::var(vars.choose(rng).unwrap().clone()),
        1 => Term::seq(Term::num(rng.gen_range(0..8))),
        _ => Term::num(rng.gen_range(0..8)),
    }
}

pub fn gen_formula(rng: &mut TestRng, depth: u32, vars: &[String]) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        let (l, r) = (gen_term(rng, 3, vars), gen_term(rng, 3, vars));
        return match rng.gen_range(0..3) {
            0 => Formula::eq(l, r),
            _ => Formula::rel(["<", ">", "<=", ">="].choose(rng).unwrap(), l, r),
        };
    }
    match rng.gen_range(0..4) {
        0 => Formula::not(gen_formula(rng, depth - 1, vars)),
        1 => Formula::and(gen_formula(rng, depth - 1, vars), gen_formula(rng, depth - 1, vars)),
        2 => Formula::or(gen_formula(rng, depth - 1, vars), gen_formula(rng, depth - 1, vars)),
        _ => Formula::implies(gen_formula(rng, depth - 1, vars), gen_formula(rng, depth - 1, vars)),
    }
}

pub fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// Whether some ellipsis in `f` binds `var`, and whether some ellipsis with
/// another binder has `var` free in its body.
pub fn ellipsis_shapes(f: &Formula, var: &str) -> (bool, bool) {
    fn term(t: &Term, var: &str, acc: &mut (bool, bool)) {
        match t {
            Term::Var(_) | Term::Num(_) => {}
            Term::Seq(u) => term(u, var, acc),
            Term::App { args, .. } => args.iter().for_each(|a| term(a, var, acc)),
            Term::Ellipsis { body, binder, bound, .. } => {
                if binder == var {
                    acc.0 = true;
                } else if body.free_vars().contains(var) {
                    acc.1 = true;
                }
                term(body, var, acc);
                term(bound, var, acc);
            }
        }
    }
    fn formula(f: &Formula, var: &str, acc: &mut (bool, bool)) {
        match f {
            Formula::Eq(l, r) => {
                term(l, var, acc);
                term(r, var, acc);
            }
            Formula::Pred { args, .. } => args.iter().for_each(|a| term(a, var, acc)),
            Formula::Not(p) | Formula::Forall(_, p) | Formula::Exists(_, p) => formula(p, var, acc),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                formula(l, var, acc);
                formula(r, var, acc);
            }
        }
    }
    let mut acc = (false, false);
    formula(f, var, &mut acc);
    acc
}
