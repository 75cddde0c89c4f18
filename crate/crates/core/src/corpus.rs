//! Seeded pseudo-random rule generation, shared by the cross-validation
//! suites and the benchmarks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::syntax::{Formula, Pi2Rule};

/// Seed for the standard 200-rule cross-validation corpus.
pub const CORPUS_SEED: u64 = 0x9d2c_5681;

/// Generate `count` rules with at most 3 free variables, 2 bound variables
/// and formula depth 3. The sequence is a pure function of the seed.
pub fn random_rules(seed: u64, count: usize) -> Vec<Pi2Rule> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_rule(&mut rng)).collect()
}

const FREE_POOL: [&str; 3] = ["a", "b", "c"];
const BOUND_POOL: [&str; 2] = ["u", "v"];
const MAX_DEPTH: usize = 3;

fn random_rule(rng: &mut ChaCha8Rng) -> Pi2Rule {
    let free_count = rng.random_range(0..=FREE_POOL.len());
    let bound_count = rng.random_range(0..=BOUND_POOL.len());
    let free: Vec<&str> = FREE_POOL[..free_count].to_vec();
    let bound: Vec<&str> = BOUND_POOL[..bound_count].to_vec();
    let premise_pool: Vec<&str> = free.iter().chain(bound.iter()).copied().collect();

    let premise_count = rng.random_range(usize::from(bound_count > 0)..=2);
    let premises: Vec<Formula> = (0..premise_count)
        .map(|_| random_formula(rng, &premise_pool, MAX_DEPTH))
        .collect();
    let conclusion = random_formula(rng, &free, MAX_DEPTH);
    Pi2Rule::new(
        premises,
        conclusion,
        bound.iter().map(|s| s.to_string()).collect(),
    )
    .expect("bound variables never reach the conclusion")
}

fn random_formula(rng: &mut ChaCha8Rng, pool: &[&str], depth: usize) -> Formula {
    let leaf = depth == 0 || rng.random_range(0..10) < 3;
    if leaf {
        match rng.random_range(0..if pool.is_empty() { 2 } else { 5 }) {
            0 => Formula::Bot,
            1 => Formula::Top,
            _ => Formula::var(pool[rng.random_range(0..pool.len())]),
        }
    } else {
        let a = random_formula(rng, pool, depth - 1);
        let b = random_formula(rng, pool, depth - 1);
        match rng.random_range(0..3) {
            0 => Formula::and(a, b),
            1 => Formula::or(a, b),
            _ => Formula::imp(a, b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_deterministic() {
        let first = random_rules(CORPUS_SEED, 10);
        let second = random_rules(CORPUS_SEED, 10);
        assert_eq!(first, second);
        assert_ne!(first, random_rules(CORPUS_SEED + 1, 10));
    }

    #[test]
    fn corpus_respects_size_limits() {
        for rule in random_rules(CORPUS_SEED, 200) {
            assert!(rule.free_variables().len() <= 3);
            assert!(rule.bound().len() <= 2);
            assert!(rule.premises().len() <= 2);
        }
    }
}
