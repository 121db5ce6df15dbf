//! Permutations of `0..n`, printed and parsed in 1-based cycle notation.

use std::fmt;

use crate::error::TraceError;

/// A bijection of `0..n`. Composition is right to left: `(a * b)(x) = a(b(x))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, TraceError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(TraceError::BadPermutation(format!("{images:?} is not a bijection")));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// Parses 1-based cycle notation such as `(1 4 5)(2 6 7)`; fixed points may be omitted.
    pub fn parse_cycles(text: &str, n: usize) -> Result<Self, TraceError> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .ok_or_else(|| TraceError::BadPermutation(format!("expected `(` in `{text}`")))?;
            let close = body
                .find(')')
                .ok_or_else(|| TraceError::BadPermutation(format!("unclosed cycle in `{text}`")))?;
            let cycle = body[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|p| !p.is_empty())
                .map(|p| {
                    let v: usize =
                        p.parse().map_err(|_| TraceError::BadPermutation(format!("bad point `{p}`")))?;
                    if v == 0 || v > n {
                        return Err(TraceError::BadPermutation(format!("point {v} outside 1..={n}")));
                    }
                    Ok(v - 1)
                })
                .collect::<Result<Vec<_>, _>>()?;
            for (k, &x) in cycle.iter().enumerate() {
                if touched[x] {
                    return Err(TraceError::BadPermutation(format!("point {} repeated", x + 1)));
                }
                touched[x] = true;
                images[x] = cycle[(k + 1) % cycle.len()];
            }
            rest = body[close + 1..].trim_start();
        }
        Ok(Permutation { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y] = x;
        }
        Permutation { images: inv }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "composing permutations of different degree");
        Permutation { images: other.images.iter().map(|&x| self.images[x]).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x == y)
    }

    /// Disjoint cycles including fixed points, each starting at its least element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    /// `+1` or `-1`.
    pub fn sign(&self) -> i64 {
        if (self.len() - self.cycles().len()) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Whether `self` maps every point of `set` into `set`.
    pub fn preserves(&self, set: &[usize]) -> bool {
        set.iter().all(|x| set.contains(&self.images[*x]))
    }

    /// All permutations of `0..n` in lexicographic order of image arrays.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut cur: Vec<usize> = (0..n).collect();
        let mut out = vec![Permutation { images: cur.clone() }];
        while next_permutation(&mut cur) {
            out.push(Permutation { images: cur.clone() });
        }
        out
    }

    /// Elements of the Young subgroup `S_{L_1} x ... x S_{L_k}` for disjoint layers
    /// of `0..n`, points outside every layer fixed. Ordered lexicographically.
    pub fn young_subgroup(n: usize, layers: &[Vec<usize>]) -> Vec<Permutation> {
        let mut acc = vec![Permutation::identity(n)];
        for layer in layers {
            let mut sorted = layer.clone();
            sorted.sort_unstable();
            let local = Permutation::all(sorted.len());
            let mut next = Vec::with_capacity(acc.len() * local.len());
            for p in &acc {
                for l in &local {
                    let mut images = p.images.clone();
                    for (k, &x) in sorted.iter().enumerate() {
                        images[x] = sorted[l.images[k]];
                    }
                    next.push(Permutation { images });
                }
            }
            acc = next;
        }
        acc.sort();
        acc
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let pts: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "({})", pts.join(" "))?;
        }
        Ok(())
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Interval sizes `(t, s)` of the three class intervals `[0,t)`, `[t,t+s)`, `[t+s,t+2s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassIntervals {
    pub t: usize,
    pub s: usize,
}

impl ClassIntervals {
    pub fn r(&self) -> usize {
        self.t + 2 * self.s
    }

    /// Class (1, 2 or 3) of a position.
    pub fn class_of(&self, j: usize) -> u8 {
        if j < self.t {
            1
        } else if j < self.t + self.s {
            2
        } else {
            3
        }
    }

    /// Whether `pi` preserves each of the three intervals.
    pub fn in_base(&self, pi: &Permutation) -> bool {
        (0..pi.len()).all(|j| self.class_of(j) == self.class_of(pi.apply(j)))
    }
}

/// `ρ1(π) = π1·π2·(π2+s)` for `which == 1` and `ρ2(π) = π1·(π3−s)·π3` for `which == 2`.
pub fn rho_shift(pi: &Permutation, iv: ClassIntervals, which: u8) -> Result<Permutation, TraceError> {
    if pi.len() != iv.r() {
        return Err(TraceError::SizeMismatch { expected: iv.r(), got: pi.len() });
    }
    if !iv.in_base(pi) {
        return Err(TraceError::BadPermutation(format!("{pi} does not preserve the class intervals")));
    }
    let s = iv.s;
    let images = (0..iv.r())
        .map(|j| match (iv.class_of(j), which) {
            (1, _) => pi.apply(j),
            (2, 1) => pi.apply(j),
            (3, 1) => pi.apply(j - s) + s,
            (2, _) => pi.apply(j + s) - s,
            (3, _) => pi.apply(j),
            _ => unreachable!(),
        })
        .collect();
    Ok(Permutation { images })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_display() {
        let p = Permutation::parse_cycles("(1 4 5)(2 6 7)", 7).unwrap();
        assert_eq!(p.apply(0), 3);
        assert_eq!(p.apply(4), 0);
        assert_eq!(p.to_string(), "(1 4 5)(2 6 7)");
        assert_eq!(p.sign(), 1);
        assert_eq!(Permutation::identity(3).to_string(), "()");
        assert!(Permutation::parse_cycles("(1 9)", 3).is_err());
        assert!(Permutation::parse_cycles("(1 2)(2 3)", 3).is_err());
        assert!(Permutation::parse_cycles("1 2", 3).is_err());
    }

    #[test]
    fn counts_and_signs() {
        let all = Permutation::all(4);
        assert_eq!(all.len(), 24);
        assert_eq!(all.iter().map(Permutation::sign).sum::<i64>(), 0);
        assert_eq!(Permutation::all(0).len(), 1);
        let y = Permutation::young_subgroup(5, &[vec![0, 2], vec![1, 3, 4]]);
        assert_eq!(y.len(), 12);
        assert!(y.iter().all(|p| p.preserves(&[0, 2])));
    }

    #[test]
    fn rho_identity_and_small_case() {
        let iv = ClassIntervals { t: 1, s: 2 };
        let id = Permutation::identity(5);
        assert!(rho_shift(&id, iv, 1).unwrap().is_identity());
        assert!(rho_shift(&id, iv, 2).unwrap().is_identity());
        let iv = ClassIntervals { t: 0, s: 1 };
        assert!(rho_shift(&Permutation::identity(2), iv, 1).unwrap().is_identity());
        let swap = Permutation::parse_cycles("(1 2)", 3).unwrap();
        assert!(rho_shift(&swap, ClassIntervals { t: 1, s: 1 }, 1).is_err());
    }

    #[test]
    fn rho_copies_middle_block() {
        // t = 1, s = 2: π swaps 2,3 (the A2 block); ρ1 also swaps 4,5.
        let iv = ClassIntervals { t: 1, s: 2 };
        let pi = Permutation::parse_cycles("(2 3)", 5).unwrap();
        assert_eq!(rho_shift(&pi, iv, 1).unwrap().to_string(), "(2 3)(4 5)");
        assert_eq!(rho_shift(&pi, iv, 2).unwrap().to_string(), "()");
    }

    fn base_perm(t: usize, s: usize) -> impl Strategy<Value = Permutation> {
        let block = |k: usize| Just((0..k).collect::<Vec<_>>()).prop_shuffle();
        (block(t), block(s), block(s)).prop_map(move |(a, b, c)| {
            let mut images: Vec<usize> = a;
            images.extend(b.into_iter().map(|x| x + t));
            images.extend(c.into_iter().map(|x| x + t + s));
            Permutation::from_images(images).unwrap()
        })
    }

    proptest! {
        #[test]
        fn rho_is_a_homomorphism(p in base_perm(2, 3), q in base_perm(2, 3)) {
            let iv = ClassIntervals { t: 2, s: 3 };
            for which in [1, 2] {
                let lhs = rho_shift(&p.compose(&q), iv, which).unwrap();
                let rhs = rho_shift(&p, iv, which).unwrap().compose(&rho_shift(&q, iv, which).unwrap());
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn inverse_composes_to_identity(v in Just((0..7).collect::<Vec<usize>>()).prop_shuffle()) {
            let p = Permutation::from_images(v).unwrap();
            prop_assert!(p.compose(&p.inverse()).is_identity());
            prop_assert_eq!(p.sign(), p.inverse().sign());
        }

        #[test]
        fn cycle_notation_round_trips(v in Just((0..6).collect::<Vec<usize>>()).prop_shuffle()) {
            let p = Permutation::from_images(v).unwrap();
            prop_assert_eq!(Permutation::parse_cycles(&p.to_string().replace("()", ""), 6).unwrap(), p);
        }
    }
}
