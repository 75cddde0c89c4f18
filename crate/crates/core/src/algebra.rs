//! Finite Goedel algebras as computable objects.
//!
//! An algebra is stored as explicit operation tables over elements
//! `0..size-1`. Chains, finite products of algebras, and algebras read from
//! a poset table all go through the same representation; construction
//! validates the lattice, distributivity, residuation and prelinearity
//! requirements and reports witnesses when one fails.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::syntax::Formula;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("a chain needs at least two elements, got {0}")]
    ChainTooSmall(usize),
    #[error("a product needs at least one factor")]
    EmptyProduct,
    #[error("product would have {0} elements, refusing to build more than {max}", max = MAX_ELEMENTS)]
    TooLarge(usize),
}

const MAX_ELEMENTS: usize = 1 << 20;

/// Construction-time validation failures for [`from_table`], with the
/// witnessing elements named.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("element index {0} out of range")]
    BadIndex(usize),
    #[error("not a poset: {a} and {b} are related in both directions")]
    NotAPoset { a: String, b: String },
    #[error("not a lattice: {a} and {b} have no {missing}")]
    NotALattice {
        a: String,
        b: String,
        missing: &'static str,
    },
    #[error("not distributive: fails on {a}, {b}, {c}")]
    NotDistributive { a: String, b: String, c: String },
    #[error("no relative pseudocomplement for {a} -> {b}")]
    NoResiduation { a: String, b: String },
    #[error("not prelinear: ({a} -> {b}) | ({b} -> {a}) is not the top element")]
    NotPrelinear { a: String, b: String },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound variable: {0}")]
    UnboundVariable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmbeddingError {
    #[error("{0} algebra is not a chain")]
    NotLinear(&'static str),
    #[error("not an embedding: {0}")]
    NotAnEmbedding(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraKind {
    Chain(usize),
    Product(Vec<usize>),
    Table,
}

/// A finite Goedel algebra: a finite prelinear Heyting algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGodelAlgebra {
    size: usize,
    leq: Vec<bool>,
    meet: Vec<u32>,
    join: Vec<u32>,
    imp: Vec<u32>,
    bottom: u32,
    top: u32,
    kind: AlgebraKind,
    names: Vec<String>,
}

impl FiniteGodelAlgebra {
    /// The linear algebra with elements `0 < 1 < ... < n-1`.
    pub fn make_chain(n: usize) -> Result<Self, AlgebraError> {
        if n < 2 {
            return Err(AlgebraError::ChainTooSmall(n));
        }
        let size = n;
        let mut leq = vec![false; size * size];
        let mut meet = vec![0u32; size * size];
        let mut join = vec![0u32; size * size];
        let mut imp = vec![0u32; size * size];
        let top = (size - 1) as u32;
        for a in 0..size {
            for b in 0..size {
                let cell = a * size + b;
                leq[cell] = a <= b;
                meet[cell] = a.min(b) as u32;
                join[cell] = a.max(b) as u32;
                imp[cell] = if a <= b { top } else { b as u32 };
            }
        }
        Ok(FiniteGodelAlgebra {
            size,
            leq,
            meet,
            join,
            imp,
            bottom: 0,
            top,
            kind: AlgebraKind::Chain(n),
            names: (0..size).map(|i| i.to_string()).collect(),
        })
    }

    /// Componentwise product of the given factors.
    pub fn make_product(factors: &[FiniteGodelAlgebra]) -> Result<Self, AlgebraError> {
        if factors.is_empty() {
            return Err(AlgebraError::EmptyProduct);
        }
        let mut size = 1usize;
        for factor in factors {
            size = size.saturating_mul(factor.size);
            if size > MAX_ELEMENTS {
                return Err(AlgebraError::TooLarge(size));
            }
        }
        let split = |index: usize| -> Vec<usize> {
            let mut comps = vec![0usize; factors.len()];
            let mut rest = index;
            for (slot, factor) in factors.iter().enumerate().rev() {
                comps[slot] = rest % factor.size;
                rest /= factor.size;
            }
            comps
        };
        let fuse = |comps: &[usize]| -> usize {
            let mut index = 0usize;
            for (slot, factor) in factors.iter().enumerate() {
                index = index * factor.size + comps[slot];
            }
            index
        };
        let mut leq = vec![false; size * size];
        let mut meet = vec![0u32; size * size];
        let mut join = vec![0u32; size * size];
        let mut imp = vec![0u32; size * size];
        for a in 0..size {
            let ac = split(a);
            for b in 0..size {
                let bc = split(b);
                let cell = a * size + b;
                leq[cell] = factors
                    .iter()
                    .zip(ac.iter().zip(&bc))
                    .all(|(f, (&x, &y))| f.leq(x as u32, y as u32));
                let each = |op: fn(&FiniteGodelAlgebra, u32, u32) -> u32| -> usize {
                    let comps: Vec<usize> = factors
                        .iter()
                        .zip(ac.iter().zip(&bc))
                        .map(|(f, (&x, &y))| op(f, x as u32, y as u32) as usize)
                        .collect();
                    fuse(&comps)
                };
                meet[cell] = each(FiniteGodelAlgebra::meet) as u32;
                join[cell] = each(FiniteGodelAlgebra::join) as u32;
                imp[cell] = each(FiniteGodelAlgebra::imp) as u32;
            }
        }
        let bottom = fuse(
            &factors
                .iter()
                .map(|f| f.bottom as usize)
                .collect::<Vec<_>>(),
        ) as u32;
        let top = fuse(&factors.iter().map(|f| f.top as usize).collect::<Vec<_>>()) as u32;
        let names = (0..size)
            .map(|i| {
                let comps = split(i);
                let parts: Vec<String> = factors
                    .iter()
                    .zip(&comps)
                    .map(|(f, &c)| f.names[c].clone())
                    .collect();
                format!("({})", parts.join(","))
            })
            .collect();
        Ok(FiniteGodelAlgebra {
            size,
            leq,
            meet,
            join,
            imp,
            bottom,
            top,
            kind: AlgebraKind::Product(factors.iter().map(|f| f.size).collect()),
            names,
        })
    }

    /// Build an algebra from a finite poset description, validating that it
    /// is a prelinear Heyting algebra. Each failure names its witnesses.
    pub fn from_table(desc: &TableDescription) -> Result<Self, TableError> {
        let size = desc.elements.len();
        let name = |i: usize| desc.elements[i].clone();
        let mut leq = vec![false; size * size];
        for i in 0..size {
            leq[i * size + i] = true;
        }
        for &(a, b) in &desc.leq {
            if a >= size {
                return Err(TableError::BadIndex(a));
            }
            if b >= size {
                return Err(TableError::BadIndex(b));
            }
            leq[a * size + b] = true;
        }
        // reflexive-transitive closure
        for k in 0..size {
            for a in 0..size {
                if leq[a * size + k] {
                    for b in 0..size {
                        if leq[k * size + b] {
                            leq[a * size + b] = true;
                        }
                    }
                }
            }
        }
        for a in 0..size {
            for b in (a + 1)..size {
                if leq[a * size + b] && leq[b * size + a] {
                    return Err(TableError::NotAPoset {
                        a: name(a),
                        b: name(b),
                    });
                }
            }
        }

        let le = |x: usize, y: usize| leq[x * size + y];
        let bound = |x: usize, y: usize, lower: bool| -> Option<usize> {
            let mut candidates: Vec<usize> = (0..size)
                .filter(|&c| {
                    if lower {
                        le(c, x) && le(c, y)
                    } else {
                        le(x, c) && le(y, c)
                    }
                })
                .collect();
            candidates.retain(|&c| {
                (0..size)
                    .filter(|&d| {
                        if lower {
                            le(d, x) && le(d, y)
                        } else {
                            le(x, d) && le(y, d)
                        }
                    })
                    .all(|d| if lower { le(d, c) } else { le(c, d) })
            });
            candidates.first().copied()
        };

        let mut meet = vec![0u32; size * size];
        let mut join = vec![0u32; size * size];
        for a in 0..size {
            for b in 0..size {
                match bound(a, b, true) {
                    Some(m) => meet[a * size + b] = m as u32,
                    None => {
                        return Err(TableError::NotALattice {
                            a: name(a),
                            b: name(b),
                            missing: "greatest lower bound",
                        })
                    }
                }
                match bound(a, b, false) {
                    Some(j) => join[a * size + b] = j as u32,
                    None => {
                        return Err(TableError::NotALattice {
                            a: name(a),
                            b: name(b),
                            missing: "least upper bound",
                        })
                    }
                }
            }
        }
        if size == 0 {
            return Err(TableError::NotALattice {
                a: "(empty)".into(),
                b: "(empty)".into(),
                missing: "any element",
            });
        }

        for a in 0..size {
            for b in 0..size {
                for c in 0..size {
                    let lhs = meet[a * size + join[b * size + c] as usize];
                    let rhs =
                        join[(meet[a * size + b] as usize) * size + meet[a * size + c] as usize];
                    if lhs != rhs {
                        return Err(TableError::NotDistributive {
                            a: name(a),
                            b: name(b),
                            c: name(c),
                        });
                    }
                }
            }
        }

        let mut imp = vec![0u32; size * size];
        for a in 0..size {
            for b in 0..size {
                let set: Vec<usize> = (0..size)
                    .filter(|&c| le(meet[a * size + c] as usize, b))
                    .collect();
                let max = set.iter().copied().find(|&c| set.iter().all(|&d| le(d, c)));
                match max {
                    Some(m) => imp[a * size + b] = m as u32,
                    None => {
                        return Err(TableError::NoResiduation {
                            a: name(a),
                            b: name(b),
                        })
                    }
                }
            }
        }

        let mut bottom = 0usize;
        let mut top = 0usize;
        for x in 1..size {
            bottom = meet[bottom * size + x] as usize;
            top = join[top * size + x] as usize;
        }

        for a in 0..size {
            for b in 0..size {
                let j = join[(imp[a * size + b] as usize) * size + imp[b * size + a] as usize];
                if j != top as u32 {
                    return Err(TableError::NotPrelinear {
                        a: name(a),
                        b: name(b),
                    });
                }
            }
        }

        Ok(FiniteGodelAlgebra {
            size,
            leq,
            meet,
            join,
            imp,
            bottom: bottom as u32,
            top: top as u32,
            kind: AlgebraKind::Table,
            names: desc.elements.clone(),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn kind(&self) -> &AlgebraKind {
        &self.kind
    }

    pub fn bottom(&self) -> u32 {
        self.bottom
    }

    pub fn top(&self) -> u32 {
        self.top
    }

    pub fn element_name(&self, a: u32) -> &str {
        &self.names[a as usize]
    }

    #[inline]
    pub fn leq(&self, a: u32, b: u32) -> bool {
        self.leq[a as usize * self.size + b as usize]
    }

    #[inline]
    pub fn meet(&self, a: u32, b: u32) -> u32 {
        self.meet[a as usize * self.size + b as usize]
    }

    #[inline]
    pub fn join(&self, a: u32, b: u32) -> u32 {
        self.join[a as usize * self.size + b as usize]
    }

    #[inline]
    pub fn imp(&self, a: u32, b: u32) -> u32 {
        self.imp[a as usize * self.size + b as usize]
    }

    pub fn is_linear(&self) -> bool {
        (0..self.size as u32)
            .all(|a| (0..self.size as u32).all(|b| self.leq(a, b) || self.leq(b, a)))
    }

    /// `a` is covered by `b`: `a < b` with nothing strictly between.
    pub fn covers(&self, a: u32, b: u32) -> bool {
        a != b
            && self.leq(a, b)
            && (0..self.size as u32)
                .all(|c| c == a || c == b || !(self.leq(a, c) && self.leq(c, b)))
    }

    /// Re-check the defining laws on an already constructed algebra.
    /// Used by the test suites as an independent probe.
    pub fn verify_godel_laws(&self) -> Result<(), TableError> {
        let desc = TableDescription {
            elements: self.names.clone(),
            leq: (0..self.size)
                .flat_map(|a| (0..self.size).map(move |b| (a, b)))
                .filter(|&(a, b)| self.leq(a as u32, b as u32))
                .collect(),
        };
        let rebuilt = FiniteGodelAlgebra::from_table(&desc)?;
        debug_assert_eq!(rebuilt.meet, self.meet);
        debug_assert_eq!(rebuilt.join, self.join);
        debug_assert_eq!(rebuilt.imp, self.imp);
        Ok(())
    }

    /// Interpret `f` under `v`; every variable of `f` must be assigned.
    pub fn eval_term(&self, f: &Formula, v: &Valuation) -> Result<u32, EvalError> {
        match f {
            Formula::Var(name) => v
                .get(name)
                .ok_or_else(|| EvalError::UnboundVariable(name.clone())),
            Formula::Bot => Ok(self.bottom),
            Formula::Top => Ok(self.top),
            Formula::And(a, b) => Ok(self.meet(self.eval_term(a, v)?, self.eval_term(b, v)?)),
            Formula::Or(a, b) => Ok(self.join(self.eval_term(a, v)?, self.eval_term(b, v)?)),
            Formula::Imp(a, b) => Ok(self.imp(self.eval_term(a, v)?, self.eval_term(b, v)?)),
        }
    }

    /// True iff `f` evaluates to top under every valuation of its variables.
    pub fn holds_identity(&self, f: &Formula) -> bool {
        let vars: Vec<String> = f.variables().into_iter().collect();
        let term = CompiledTerm::compile(f, &vars).expect("all variables indexed");
        let mut vals = vec![0u32; vars.len()];
        let mut stack = Vec::with_capacity(term.depth());
        loop {
            if term.eval(self, &vals, &mut stack) != self.top {
                return false;
            }
            if !next_valuation(&mut vals, self.size as u32) {
                return true;
            }
        }
    }

    /// The largest size of a subset that contains bottom and top, is totally
    /// ordered, and is closed under meet, join and implication.
    pub fn chain_bound(&self) -> usize {
        assert!(
            self.size <= 128,
            "chain_bound supports at most 128 elements, got {}",
            self.size
        );
        let base = self.close(bit(self.bottom) | bit(self.top));
        debug_assert!(self.is_chain_mask(base));
        let mut visited = HashSet::new();
        self.grow_chain(base, &mut visited)
    }

    fn grow_chain(&self, mask: u128, visited: &mut HashSet<u128>) -> usize {
        if !visited.insert(mask) {
            return mask.count_ones() as usize;
        }
        let mut best = mask.count_ones() as usize;
        for x in 0..self.size as u32 {
            if mask & bit(x) != 0 {
                continue;
            }
            if !(0..self.size as u32)
                .filter(|&y| mask & bit(y) != 0)
                .all(|y| self.leq(x, y) || self.leq(y, x))
            {
                continue;
            }
            let closed = self.close(mask | bit(x));
            if self.is_chain_mask(closed) {
                best = best.max(self.grow_chain(closed, visited));
            }
        }
        best
    }

    fn close(&self, mut mask: u128) -> u128 {
        loop {
            let mut next = mask;
            for a in 0..self.size as u32 {
                if mask & bit(a) == 0 {
                    continue;
                }
                for b in 0..self.size as u32 {
                    if mask & bit(b) == 0 {
                        continue;
                    }
                    next |= bit(self.meet(a, b));
                    next |= bit(self.join(a, b));
                    next |= bit(self.imp(a, b));
                }
            }
            if next == mask {
                return mask;
            }
            mask = next;
        }
    }

    fn is_chain_mask(&self, mask: u128) -> bool {
        let members: Vec<u32> = (0..self.size as u32)
            .filter(|&x| mask & bit(x) != 0)
            .collect();
        members
            .iter()
            .all(|&a| members.iter().all(|&b| self.leq(a, b) || self.leq(b, a)))
    }
}

fn bit(x: u32) -> u128 {
    1u128 << x
}

/// Advance `vals` as a little-endian counter in base `radix`; false on wrap.
pub(crate) fn next_valuation(vals: &mut [u32], radix: u32) -> bool {
    for slot in vals.iter_mut() {
        *slot += 1;
        if *slot < radix {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Poset description accepted by [`FiniteGodelAlgebra::from_table`]; also the
/// JSON schema of `table:` algebra files.
#[derive(Debug, Clone, Deserialize)]
pub struct TableDescription {
    pub elements: Vec<String>,
    pub leq: Vec<(usize, usize)>,
}

/// A finite assignment of carrier elements to variable names.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Valuation {
    map: BTreeMap<String, u32>,
}

impl Valuation {
    pub fn new() -> Self {
        Valuation::default()
    }

    pub fn bind(mut self, name: impl Into<String>, value: u32) -> Self {
        self.map.insert(name.into(), value);
        self
    }

    pub fn set(&mut self, name: impl Into<String>, value: u32) {
        self.map.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.map.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.map.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl FromIterator<(String, u32)> for Valuation {
    fn from_iter<T: IntoIterator<Item = (String, u32)>>(iter: T) -> Self {
        Valuation {
            map: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, value)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{name}={value}")?;
        }
        Ok(())
    }
}

/// A formula compiled to postfix code over a fixed variable order, for the
/// valuation-enumeration loops.
#[derive(Debug, Clone)]
pub(crate) struct CompiledTerm {
    code: Vec<Instr>,
    depth: usize,
}

#[derive(Debug, Clone, Copy)]
enum Instr {
    Var(u16),
    Bot,
    Top,
    And,
    Or,
    Imp,
}

impl CompiledTerm {
    pub(crate) fn compile(f: &Formula, var_order: &[String]) -> Result<Self, EvalError> {
        let slots: BTreeMap<&str, u16> = var_order
            .iter()
            .enumerate()
            .map(|(i, name)| (name.as_str(), i as u16))
            .collect();
        let mut code = Vec::new();
        fn emit(
            f: &Formula,
            slots: &BTreeMap<&str, u16>,
            code: &mut Vec<Instr>,
        ) -> Result<(), EvalError> {
            match f {
                Formula::Var(name) => match slots.get(name.as_str()) {
                    Some(&slot) => code.push(Instr::Var(slot)),
                    None => return Err(EvalError::UnboundVariable(name.clone())),
                },
                Formula::Bot => code.push(Instr::Bot),
                Formula::Top => code.push(Instr::Top),
                Formula::And(a, b) => {
                    emit(a, slots, code)?;
                    emit(b, slots, code)?;
                    code.push(Instr::And);
                }
                Formula::Or(a, b) => {
                    emit(a, slots, code)?;
                    emit(b, slots, code)?;
                    code.push(Instr::Or);
                }
                Formula::Imp(a, b) => {
                    emit(a, slots, code)?;
                    emit(b, slots, code)?;
                    code.push(Instr::Imp);
                }
            }
            Ok(())
        }
        emit(f, &slots, &mut code)?;
        let mut depth = 0usize;
        let mut cur = 0usize;
        for instr in &code {
            match instr {
                Instr::Var(_) | Instr::Bot | Instr::Top => cur += 1,
                Instr::And | Instr::Or | Instr::Imp => cur -= 1,
            }
            depth = depth.max(cur);
        }
        Ok(CompiledTerm { code, depth })
    }

    pub(crate) fn depth(&self) -> usize {
        self.depth
    }

    #[inline]
    pub(crate) fn eval(&self, alg: &FiniteGodelAlgebra, vals: &[u32], stack: &mut Vec<u32>) -> u32 {
        stack.clear();
        for instr in &self.code {
            match *instr {
                Instr::Var(slot) => stack.push(vals[slot as usize]),
                Instr::Bot => stack.push(alg.bottom),
                Instr::Top => stack.push(alg.top),
                Instr::And => {
                    let b = stack.pop().unwrap();
                    let a = stack.pop().unwrap();
                    stack.push(alg.meet(a, b));
                }
                Instr::Or => {
                    let b = stack.pop().unwrap();
                    let a = stack.pop().unwrap();
                    stack.push(alg.join(a, b));
                }
                Instr::Imp => {
                    let b = stack.pop().unwrap();
                    let a = stack.pop().unwrap();
                    stack.push(alg.imp(a, b));
                }
            }
        }
        stack.pop().unwrap()
    }
}

/// An element map between two algebras, candidate for an embedding.
#[derive(Debug, Clone)]
pub struct EmbeddingMap {
    pub source: FiniteGodelAlgebra,
    pub target: FiniteGodelAlgebra,
    pub map: Vec<u32>,
}

impl EmbeddingMap {
    fn validate(&self) -> Result<(), EmbeddingError> {
        let s = &self.source;
        let t = &self.target;
        if self.map.len() != s.size() {
            return Err(EmbeddingError::NotAnEmbedding(format!(
                "map has {} entries for a source of size {}",
                self.map.len(),
                s.size()
            )));
        }
        if let Some(&bad) = self.map.iter().find(|&&x| x as usize >= t.size()) {
            return Err(EmbeddingError::NotAnEmbedding(format!(
                "image {bad} is outside the target carrier"
            )));
        }
        let mut seen = BTreeSet::new();
        for (a, &fa) in self.map.iter().enumerate() {
            if !seen.insert(fa) {
                return Err(EmbeddingError::NotAnEmbedding(format!(
                    "not injective: two elements map to {}",
                    t.element_name(fa)
                )));
            }
            let _ = a;
        }
        if self.map[s.bottom() as usize] != t.bottom() {
            return Err(EmbeddingError::NotAnEmbedding(
                "bottom is not preserved".into(),
            ));
        }
        if self.map[s.top() as usize] != t.top() {
            return Err(EmbeddingError::NotAnEmbedding(
                "top is not preserved".into(),
            ));
        }
        for a in 0..s.size() as u32 {
            for b in 0..s.size() as u32 {
                let (fa, fb) = (self.map[a as usize], self.map[b as usize]);
                for (op, fop) in [
                    (s.meet(a, b), t.meet(fa, fb)),
                    (s.join(a, b), t.join(fa, fb)),
                    (s.imp(a, b), t.imp(fa, fb)),
                ] {
                    if self.map[op as usize] != fop {
                        return Err(EmbeddingError::NotAnEmbedding(format!(
                            "operation not preserved on pair ({}, {})",
                            s.element_name(a),
                            s.element_name(b)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// For an embedding between chains: does every covering pair map to a
/// covering pair?
pub fn is_cover_preserving_embedding(e: &EmbeddingMap) -> Result<bool, EmbeddingError> {
    if !e.source.is_linear() {
        return Err(EmbeddingError::NotLinear("source"));
    }
    if !e.target.is_linear() {
        return Err(EmbeddingError::NotLinear("target"));
    }
    e.validate()?;
    for a in 0..e.source.size() as u32 {
        for b in 0..e.source.size() as u32 {
            if e.source.covers(a, b) && !e.target.covers(e.map[a as usize], e.map[b as usize]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
