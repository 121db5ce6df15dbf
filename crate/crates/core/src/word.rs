//! Cyclic words up to rotation and a reversing involution.

use crate::quiver::PathStep;

/// A letter with a formal bar. The involution of a word reverses it and
/// toggles every bar.
pub trait Letter: Ord + Clone {
    fn toggled(&self) -> Self;
}

impl Letter for PathStep {
    fn toggled(&self) -> Self {
        self.involution()
    }
}

pub fn involute<L: Letter>(w: &[L]) -> Vec<L> {
    w.iter().rev().map(Letter::toggled).collect()
}

/// Lexicographically least rotation.
pub fn min_rotation<L: Ord + Clone>(w: &[L]) -> Vec<L> {
    let n = w.len();
    (0..n)
        .map(|k| w[k..].iter().chain(&w[..k]).cloned().collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

/// Least word among all rotations of `w` and of its involution.
pub fn canonical<L: Letter>(w: &[L]) -> Vec<L> {
    let a = min_rotation(w);
    let b = min_rotation(&involute(w));
    a.min(b)
}

/// Least `p` dividing `len` with `w` invariant under rotation by `p`.
pub fn smallest_period<L: PartialEq>(w: &[L]) -> usize {
    let n = w.len();
    (1..=n).find(|&p| n % p == 0 && (0..n).all(|i| w[i] == w[(i + p) % n])).unwrap_or(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
    struct L(u8, bool);

    impl Letter for L {
        fn toggled(&self) -> Self {
            L(self.0, !self.1)
        }
    }

    #[test]
    fn rotation_and_period() {
        assert_eq!(min_rotation(&[3, 1, 2]), vec![1, 2, 3]);
        assert_eq!(smallest_period(&[1, 2, 1, 2]), 2);
        assert_eq!(smallest_period(&[1, 2, 1]), 3);
        assert_eq!(involute(&[L(1, false), L(2, true)]), vec![L(2, false), L(1, true)]);
    }

    fn word() -> impl Strategy<Value = Vec<L>> {
        prop::collection::vec((0u8..3, any::<bool>()).prop_map(|(a, b)| L(a, b)), 1..7)
    }

    proptest! {
        #[test]
        fn canonical_is_class_invariant(w in word(), k in 0usize..7) {
            let k = k % w.len();
            let rotated: Vec<L> = w[k..].iter().chain(&w[..k]).cloned().collect();
            prop_assert_eq!(canonical(&involute(&rotated)), canonical(&w));
            prop_assert_eq!(canonical(&canonical(&w)), canonical(&w));
        }
    }
}
