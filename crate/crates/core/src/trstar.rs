//! The map `tr*` from admissible permutations to products of formal trace
//! cycles, by the contracting rules and by joining blocks.

use std::fmt;

use crate::error::TraceError;
use crate::expr::{TraceExpression, TraceMonomial};
use crate::hat::HatQuiver;
use crate::paths::CyclePath;
use crate::perm::{ClassIntervals, Permutation};
use crate::quiver::PathStep;
use crate::word::{self, Letter};

/// `index` (0-based) or its barred twin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub index: usize,
    pub bar: bool,
}

impl Symbol {
    pub fn plain(index: usize) -> Self {
        Symbol { index, bar: false }
    }

    pub fn barred(index: usize) -> Self {
        Symbol { index, bar: true }
    }
}

impl Letter for Symbol {
    fn toggled(&self) -> Self {
        Symbol { index: self.index, bar: !self.bar }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bar {
            write!(f, "~{}", self.index + 1)
        } else {
            write!(f, "{}", self.index + 1)
        }
    }
}

/// Cycles over barred and unbarred symbols, in the order an algorithm produced them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolCycleWord {
    cycles: Vec<Vec<Symbol>>,
}

impl SymbolCycleWord {
    pub fn new(cycles: Vec<Vec<Symbol>>) -> Self {
        SymbolCycleWord { cycles }
    }

    /// Parses `(1 7 ~2 ~4)(~5 6)(3)`.
    pub fn parse(text: &str) -> Result<Self, TraceError> {
        let mut cycles = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(|| TraceError::Parse(text.to_string()))?;
            let close = body.find(')').ok_or_else(|| TraceError::Parse(text.to_string()))?;
            let cycle = body[..close]
                .split_whitespace()
                .map(|tok| {
                    let (bar, num) = match tok.strip_prefix('~') {
                        Some(n) => (true, n),
                        None => (false, tok),
                    };
                    match num.parse::<usize>() {
                        Ok(v) if v > 0 => Ok(Symbol { index: v - 1, bar }),
                        _ => Err(TraceError::Parse(format!("bad symbol `{tok}`"))),
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            if cycle.is_empty() {
                return Err(TraceError::Parse("empty cycle".into()));
            }
            cycles.push(cycle);
            rest = body[close + 1..].trim_start();
        }
        Ok(SymbolCycleWord { cycles })
    }

    pub fn cycles(&self) -> &[Vec<Symbol>] {
        &self.cycles
    }

    pub fn symbol_count(&self) -> usize {
        self.cycles.iter().map(Vec::len).sum()
    }

    /// Each cycle in canonical form, cycles sorted.
    pub fn canonical(&self) -> SymbolCycleWord {
        let mut cycles: Vec<Vec<Symbol>> = self.cycles.iter().map(|c| word::canonical(c)).collect();
        cycles.sort();
        SymbolCycleWord { cycles }
    }

    /// Equality up to rotation and involution of each cycle.
    pub fn equivalent(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }

    /// Whether each of `0..r` occurs exactly once, barred or not.
    pub fn uses_each_index_once(&self, r: usize) -> bool {
        let mut seen = vec![false; r];
        for s in self.cycles.iter().flatten() {
            if s.index >= r || seen[s.index] {
                return false;
            }
            seen[s.index] = true;
        }
        seen.into_iter().all(|x| x)
    }
}

impl fmt::Display for SymbolCycleWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cycles {
            let parts: Vec<String> = c.iter().map(Symbol::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

/// Right-hand symbol for a position reached through `σ^{-1}`.
fn via_inverse(x: usize, iv: ClassIntervals) -> Symbol {
    match iv.class_of(x) {
        1 => Symbol::plain(x),
        2 => Symbol::plain(x + iv.s),
        _ => Symbol::barred(x),
    }
}

/// Right-hand symbol for a position reached through `σ`.
fn via_forward(x: usize, iv: ClassIntervals) -> Symbol {
    match iv.class_of(x) {
        1 => Symbol::barred(x),
        2 => Symbol::plain(x),
        _ => Symbol::barred(x - iv.s),
    }
}

/// Right-hand neighbour of `j` under the contracting rules.
pub fn right_neighbour(j: Symbol, sigma: &Permutation, sigma_inv: &Permutation, iv: ClassIntervals) -> Symbol {
    let s = iv.s;
    match (j.bar, iv.class_of(j.index)) {
        (false, 1) => via_inverse(sigma_inv.apply(j.index), iv),
        (false, 2) => via_inverse(sigma_inv.apply(j.index + s), iv),
        (false, _) => via_forward(sigma.apply(j.index), iv),
        (true, 1) => via_forward(sigma.apply(j.index), iv),
        (true, 2) => via_inverse(sigma_inv.apply(j.index), iv),
        (true, _) => via_forward(sigma.apply(j.index - s), iv),
    }
}

/// `tr*(σ)` by the contracting rules, without the admissibility check.
pub fn contract(sigma: &Permutation, iv: ClassIntervals) -> Result<SymbolCycleWord, TraceError> {
    let r = iv.r();
    if sigma.len() != r {
        return Err(TraceError::SizeMismatch { expected: r, got: sigma.len() });
    }
    let inv = sigma.inverse();
    let mut placed = vec![false; r];
    let mut cycles = Vec::new();
    for start in 0..r {
        if placed[start] {
            continue;
        }
        let first = Symbol::plain(start);
        let mut cycle = Vec::new();
        let mut cur = first;
        loop {
            if placed[cur.index] {
                return Err(TraceError::Escape(cur.index + 1));
            }
            placed[cur.index] = true;
            cycle.push(cur);
            cur = right_neighbour(cur, sigma, &inv, iv);
            if cur == first {
                break;
            }
        }
        cycles.push(cycle);
    }
    Ok(SymbolCycleWord { cycles })
}

/// `tr*(σ)` by the contracting rules; rejects `σ` outside `L(Q)`.
pub fn trstar_contract(sigma: &Permutation, hq: &HatQuiver) -> Result<SymbolCycleWord, TraceError> {
    if !hq.admissibility_sets().in_lq(sigma)? {
        return Err(TraceError::NotAdmissible);
    }
    contract(sigma, hq.intervals())
}

/// Blocks `l' B j'` of `τ^{-1}` for the passive set `passive`, in the order they
/// are read off the cycles. Cycles lying entirely in `passive` are returned
/// as closed blocks.
pub fn blocks(
    tau: &Permutation,
    passive: &[usize],
    iv: ClassIntervals,
) -> Result<Vec<(Vec<Symbol>, bool)>, TraceError> {
    let r = iv.r();
    if tau.len() != r {
        return Err(TraceError::SizeMismatch { expected: r, got: tau.len() });
    }
    let mut in_b = vec![false; r];
    for &b in passive {
        if b >= r || iv.class_of(b) != 1 {
            return Err(TraceError::PassiveOutsideFirstClass(b + 1));
        }
        in_b[b] = true;
    }
    let left = |l: usize| match iv.class_of(l) {
        1 => Symbol::plain(l),
        2 => Symbol::barred(l),
        _ => Symbol::plain(l - iv.s),
    };
    let right = |j: usize| match iv.class_of(j) {
        1 => Symbol::plain(j),
        2 => Symbol::plain(j + iv.s),
        _ => Symbol::barred(j),
    };
    let mut out = Vec::new();
    for cycle in tau.inverse().cycles() {
        let Some(k) = cycle.iter().position(|&x| !in_b[x]) else {
            out.push((cycle.iter().map(|&x| Symbol::plain(x)).collect(), true));
            continue;
        };
        let rotated: Vec<usize> = cycle[k..].iter().chain(&cycle[..k]).copied().collect();
        let anchors: Vec<usize> = (0..rotated.len()).filter(|&i| !in_b[rotated[i]]).collect();
        for (n, &a) in anchors.iter().enumerate() {
            let end = anchors.get(n + 1).copied().unwrap_or(rotated.len());
            let next = rotated[end % rotated.len()];
            let mut block = vec![left(rotated[a])];
            block.extend(rotated[a + 1..end].iter().map(|&x| Symbol::plain(x)));
            block.push(right(next));
            out.push((block, false));
        }
    }
    Ok(out)
}

/// `tr*(τ)` by joining the blocks of `τ^{-1}` along matching ends.
pub fn trstar_blocks(tau: &Permutation, passive: &[usize], iv: ClassIntervals) -> Result<SymbolCycleWord, TraceError> {
    let bl = blocks(tau, passive, iv)?;
    let mut used = vec![false; bl.len()];
    let mut cycles = Vec::new();
    for start in 0..bl.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (first, closed) = &bl[start];
        if *closed {
            cycles.push(first.clone());
            continue;
        }
        let mut chain = first.clone();
        loop {
            let end = *chain.last().expect("blocks are nonempty");
            if chain.len() > 1 && end == chain[0] {
                chain.pop();
                break;
            }
            let mut joined = false;
            for (k, (b, closed)) in bl.iter().enumerate() {
                if used[k] || *closed {
                    continue;
                }
                if b[0] == end {
                    chain.extend_from_slice(&b[1..]);
                } else if *b.last().expect("nonempty") == end.toggled() {
                    chain.extend_from_slice(&word::involute(b)[1..]);
                } else {
                    continue;
                }
                used[k] = true;
                joined = true;
                break;
            }
            if !joined {
                return Err(TraceError::JoinDeadlock(end.index + 1));
            }
        }
        cycles.push(chain);
    }
    let w = SymbolCycleWord { cycles };
    if !w.uses_each_index_once(iv.r()) {
        return Err(TraceError::JoinDeadlock(0));
    }
    Ok(w)
}

/// Image of a symbol word under the arrow specialization: one trace factor per cycle.
pub fn word_to_expression(w: &SymbolCycleWord, hq: &HatQuiver) -> Result<TraceExpression, TraceError> {
    Ok(TraceExpression::monomial(word_to_monomial(w, hq)?, num_traits::One::one()))
}

pub fn word_to_monomial(w: &SymbolCycleWord, hq: &HatQuiver) -> Result<TraceMonomial, TraceError> {
    let f = hq.f();
    let factors = w
        .cycles()
        .iter()
        .map(|c| {
            let steps = c
                .iter()
                .map(|s| {
                    f.get(s.index)
                        .map(|&a| PathStep { arrow: a, bar: s.bar })
                        .ok_or_else(|| TraceError::NotClosed(format!("symbol {s} outside the hat quiver")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            CyclePath::new(hq.quiver(), steps)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TraceMonomial::new(factors))
}
