//! Exact decision engine for rule validity on every finite chain at once,
//! and on the dense chain (the rationals with endpoints added).
//!
//! On a chain, every term evaluates to a variable value, bottom, or top, so
//! whether a rule holds at a valuation depends only on the order type of the
//! assigned values together with how many spare elements each gap between
//! them offers to the bound variables. A gap never needs to offer more than
//! `b` spares, where `b` is the number of bound variables: the inner
//! universal quantifier cannot tell richer gaps apart. A [`Profile`] records
//! exactly this data, so finitely many profiles summarise the behaviour of a
//! rule on all chains simultaneously.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{next_valuation, CompiledTerm, FiniteGodelAlgebra, Valuation};
use crate::syntax::Pi2Rule;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymbolicError {
    #[error("chain size must be at least 2, got {0}")]
    ChainTooSmall(usize),
}

/// An order type of a valuation on a chain, with capped gap capacities.
///
/// The free variables and the two endpoint markers are split into strictly
/// increasing blocks; variables in the same block share a value. Block `0`
/// holds the bottom marker and the last block holds the top marker. Entry
/// `caps[i]`, at most the number of bound variables `b`, is the number of
/// chain elements strictly between blocks `i` and `i+1`, counted off at `b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Profile {
    vars: Vec<String>,
    var_block: Vec<usize>,
    block_count: usize,
    caps: Vec<usize>,
}

impl Profile {
    pub fn new(
        vars: Vec<String>,
        var_block: Vec<usize>,
        block_count: usize,
        caps: Vec<usize>,
    ) -> Self {
        assert_eq!(vars.len(), var_block.len());
        assert!(block_count >= 2);
        assert_eq!(caps.len(), block_count - 1);
        assert!(var_block.iter().all(|&b| b < block_count));
        for middle in 1..block_count - 1 {
            assert!(
                var_block.contains(&middle),
                "middle block {middle} must hold at least one variable"
            );
        }
        Profile {
            vars,
            var_block,
            block_count,
            caps,
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn caps(&self) -> &[usize] {
        &self.caps
    }

    pub fn block_of(&self, var: &str) -> Option<usize> {
        self.vars
            .iter()
            .position(|v| v == var)
            .map(|i| self.var_block[i])
    }

    /// The chain size of the minimal realization.
    pub fn realized_size(&self) -> usize {
        self.block_count + self.caps.iter().sum::<usize>()
    }

    /// Is this profile the order type of some valuation on a chain with `n`
    /// elements, for `bound_count` bound variables?
    ///
    /// Writing `B` for the block count, the gap sizes `g_i` must satisfy
    /// `min(g_i, b) = caps[i]` and `B + sum(g_i) = n`: a cap below `b` pins
    /// its gap exactly, while a cap equal to `b` absorbs any surplus.
    pub fn feasible_in(&self, n: usize, bound_count: usize) -> bool {
        let required = self.realized_size();
        if self.caps.contains(&bound_count) {
            n >= required
        } else {
            n == required
        }
    }

    /// Feasible in every sufficiently large chain (some gap can absorb
    /// surplus elements).
    pub fn eventually_feasible(&self, bound_count: usize) -> bool {
        self.caps.contains(&bound_count)
    }

    /// The order type of a valuation on the dense chain: every gap between
    /// distinct blocks offers as many spares as bound variables can use.
    pub fn dense(&self, bound_count: usize) -> bool {
        self.caps.iter().all(|&c| c == bound_count)
    }
}

/// All profiles over `free_count` variables (named `x1..`) with caps in
/// `0..=bound_count`, in a deterministic canonical order.
pub fn enumerate_profiles(free_count: usize, bound_count: usize) -> Vec<Profile> {
    let vars: Vec<String> = (1..=free_count).map(|i| format!("x{i}")).collect();
    enumerate_profiles_named(&vars, bound_count)
}

/// As [`enumerate_profiles`], for a given list of free variables.
pub fn enumerate_profiles_named(vars: &[String], bound_count: usize) -> Vec<Profile> {
    let f = vars.len();
    let mut out = Vec::new();
    for middle in 0..=f {
        let block_count = middle + 2;
        let mut assignment = vec![0usize; f];
        loop {
            let surjective = (1..=middle).all(|block| assignment.contains(&block));
            if surjective {
                let var_block: Vec<usize> = assignment
                    .iter()
                    .map(|&a| if a == middle + 1 { block_count - 1 } else { a })
                    .collect();
                let mut caps = vec![0usize; block_count - 1];
                loop {
                    out.push(Profile::new(
                        vars.to_vec(),
                        var_block.clone(),
                        block_count,
                        caps.clone(),
                    ));
                    if !bump(&mut caps, bound_count + 1) {
                        break;
                    }
                }
            }
            if !bump(&mut assignment, block_count) {
                break;
            }
        }
    }
    out
}

// little-endian odometer over `radix` values per digit
fn bump(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

/// The minimal chain realizing a profile, together with the valuation
/// placing each free variable at its block.
///
/// The chain has `block_count + sum(caps)` elements: block `i+1` sits
/// `caps[i] + 1` positions above block `i`.
pub fn realize_profile(profile: &Profile, bound_count: usize) -> (FiniteGodelAlgebra, Valuation) {
    assert!(
        profile.caps.iter().all(|&c| c <= bound_count),
        "caps must not exceed the bound-variable count"
    );
    let size = profile.realized_size();
    let chain = FiniteGodelAlgebra::make_chain(size).expect("at least two blocks");
    let positions = block_positions(profile);
    let valuation: Valuation = profile
        .vars
        .iter()
        .cloned()
        .zip(profile.var_block.iter().map(|&b| positions[b] as u32))
        .collect();
    (chain, valuation)
}

fn block_positions(profile: &Profile) -> Vec<usize> {
    let mut positions = Vec::with_capacity(profile.block_count);
    let mut pos = 0usize;
    positions.push(0);
    for &cap in &profile.caps {
        pos += cap + 1;
        positions.push(pos);
    }
    positions
}

/// A rule with its premises and conclusion compiled over `free ++ bound`.
struct CompiledRule {
    free: Vec<String>,
    bound_count: usize,
    premises: Vec<CompiledTerm>,
    conclusion: CompiledTerm,
}

impl CompiledRule {
    fn new(rule: &Pi2Rule) -> Self {
        let free = rule.free_variables();
        let order: Vec<String> = free
            .iter()
            .cloned()
            .chain(rule.bound().iter().cloned())
            .collect();
        CompiledRule {
            bound_count: rule.bound().len(),
            premises: rule
                .premises()
                .iter()
                .map(|p| CompiledTerm::compile(p, &order).expect("premise variables indexed"))
                .collect(),
            conclusion: CompiledTerm::compile(rule.conclusion(), &order)
                .expect("conclusion variables indexed"),
            free,
        }
    }

    /// Does the rule hold at every valuation with this order type? The
    /// profile is checked on its minimal realization: if all premises stay
    /// top under every placement of the bound variables there, the
    /// conclusion must be top.
    fn satisfied_on(&self, profile: &Profile) -> bool {
        debug_assert_eq!(profile.vars, self.free);
        let (chain, _) = realize_profile(profile, self.bound_count);
        let positions = block_positions(profile);
        let mut vals = vec![0u32; self.free.len() + self.bound_count];
        for (i, &block) in profile.var_block.iter().enumerate() {
            vals[i] = positions[block] as u32;
        }
        let mut stack = Vec::with_capacity(16);
        let base = self.free.len();
        loop {
            for premise in &self.premises {
                if premise.eval(&chain, &vals, &mut stack) != chain.top() {
                    // some placement refutes a premise: nothing to conclude
                    return true;
                }
            }
            if !next_valuation(&mut vals[base..], chain.size() as u32) {
                break;
            }
        }
        self.conclusion.eval(&chain, &vals, &mut stack) == chain.top()
    }
}

/// Decide `[n] |= rule` symbolically: every profile feasible in a chain of
/// `n` elements must be satisfied.
pub fn rule_holds_on_chain_symbolic(rule: &Pi2Rule, n: usize) -> Result<bool, SymbolicError> {
    if n < 2 {
        return Err(SymbolicError::ChainTooSmall(n));
    }
    let compiled = CompiledRule::new(rule);
    let b = compiled.bound_count;
    Ok(enumerate_profiles_named(&compiled.free, b)
        .iter()
        .all(|p| !p.feasible_in(n, b) || compiled.satisfied_on(p)))
}

/// Validity of a rule on every finite chain, as explicit values up to the
/// threshold and a constant tail beyond it.
///
/// The threshold `T = (f+2) + (f+1)*b` is the largest minimal realization
/// over all profiles; past it the feasible profile set no longer changes
/// with `n`, so validity is constant. The set of chain sizes validating a
/// rule is therefore always finite or cofinite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Spectrum {
    /// Validity on the chain with `i + 2` elements, for `i` up to `T - 2`.
    pub explicit: Vec<bool>,
    /// Validity on every chain with more than `T` elements.
    pub tail: bool,
    pub threshold: usize,
}

impl Spectrum {
    fn new(explicit: Vec<bool>, tail: bool, threshold: usize) -> Self {
        assert_eq!(explicit.len(), threshold - 1);
        assert_eq!(
            *explicit.last().expect("threshold is at least 2"),
            tail,
            "validity must be constant from the threshold on"
        );
        Spectrum {
            explicit,
            tail,
            threshold,
        }
    }

    pub fn threshold_for(rule: &Pi2Rule) -> usize {
        let f = rule.free_variables().len();
        let b = rule.bound().len();
        (f + 2) + (f + 1) * b
    }

    pub fn is_valid_at(&self, n: usize) -> bool {
        assert!(n >= 2);
        if n <= self.threshold {
            self.explicit[n - 2]
        } else {
            self.tail
        }
    }

    /// True iff the rule is valid on every finite chain.
    pub fn valid_everywhere(&self) -> bool {
        self.tail && self.explicit.iter().all(|&v| v)
    }

    /// Chain sizes in the explicit range on which the rule fails.
    pub fn refuting_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.explicit
            .iter()
            .enumerate()
            .filter(|(_, &v)| !v)
            .map(|(i, _)| i + 2)
    }
}

/// Compute the full spectrum of a rule.
pub fn chain_spectrum(rule: &Pi2Rule) -> Spectrum {
    let compiled = CompiledRule::new(rule);
    let b = compiled.bound_count;
    let threshold = Spectrum::threshold_for(rule);
    let profiles = enumerate_profiles_named(&compiled.free, b);
    let satisfied: Vec<bool> = profiles
        .par_iter()
        .map(|p| compiled.satisfied_on(p))
        .collect();
    let explicit: Vec<bool> = (2..=threshold)
        .map(|n| {
            profiles
                .iter()
                .zip(&satisfied)
                .all(|(p, &sat)| !p.feasible_in(n, b) || sat)
        })
        .collect();
    let tail = profiles
        .iter()
        .zip(&satisfied)
        .all(|(p, &sat)| !p.eventually_feasible(b) || sat);
    Spectrum::new(explicit, tail, threshold)
}

/// Decide validity on the rationals with endpoints: exactly the profiles
/// whose gaps all carry full capacity can arise there.
pub fn q_valid(rule: &Pi2Rule) -> bool {
    let compiled = CompiledRule::new(rule);
    let b = compiled.bound_count;
    enumerate_profiles_named(&compiled.free, b)
        .iter()
        .all(|p| !p.dense(b) || compiled.satisfied_on(p))
}
