//! The generators `σ_{r,s}` and suitable generators built from base groups.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::error::{Error, TraceError};
use crate::expr::{TraceExpression, TraceMonomial};
use crate::field::factorial;
use crate::hat::{cell_head, AdmissibilitySets, HatQuiver, Multidegree};
use crate::perm::{rho_shift, Permutation};
use crate::quiver::{Arrow, DimensionVector, Quiver};
use crate::trstar::{contract, word_to_monomial};

pub const DEFAULT_R_CAP: usize = 8;

/// One pair `(1, 2)`, loop `X` at 1, `Y: 1 -> 2`, `Z: 2 -> 1`.
pub fn model_quiver() -> Quiver {
    let arrow = |id: &str, from, to| Arrow { id: id.into(), from, to };
    Quiver::new(2, vec![], vec![(1, 2)], vec![arrow("X", 1, 1), arrow("Y", 1, 2), arrow("Z", 2, 1)])
        .expect("model quiver is valid")
}

/// `Σ c_μ tr*(μ, f)` for integer weights, computed in parallel and merged.
pub fn weighted_trstar_sum(
    hq: &HatQuiver,
    terms: Vec<(Permutation, i64)>,
) -> Result<HashMap<TraceMonomial, i64>, TraceError> {
    let iv = hq.intervals();
    terms
        .into_par_iter()
        .try_fold(HashMap::new, |mut acc: HashMap<TraceMonomial, i64>, (mu, w)| {
            let word = contract(&mu, iv)?;
            *acc.entry(word_to_monomial(&word, hq)?).or_insert(0) += w;
            Ok(acc)
        })
        .try_reduce(HashMap::new, |mut a, b| {
            for (m, c) in b {
                *a.entry(m).or_insert(0) += c;
            }
            Ok(a)
        })
}

fn to_expression(counts: HashMap<TraceMonomial, i64>, denom: &BigInt) -> TraceExpression {
    let mut e = TraceExpression::zero();
    for (m, c) in counts {
        e.add_term(m, BigRational::new(BigInt::from(c), denom.clone()));
    }
    e
}

/// `σ_{r,s} = (1 / (t! (s!)^2)) Σ_{σ ∈ S_r} sgn(σ) tr*(σ, f)` on [`model_quiver`].
pub fn sigma_rs(r: usize, s: usize, cap: usize) -> Result<TraceExpression, TraceError> {
    if 2 * s > r {
        return Err(TraceError::BadDegrees { r, s });
    }
    if r > cap {
        return Err(TraceError::OverCap { r, cap });
    }
    let q = model_quiver();
    let hq = HatQuiver::build(&q, &Multidegree(vec![r - 2 * s, s, s]), None).expect("nonvacuous by construction");
    let terms = Permutation::all(r).into_iter().map(|p| {
        let sg = p.sign();
        (p, sg)
    });
    let counts = weighted_trstar_sum(&hq, terms.collect())?;
    let t = (r - 2 * s) as u64;
    let fs = factorial(s as u64);
    Ok(to_expression(counts, &(factorial(t) * &fs * &fs)))
}

/// Decomposition of positions into layers, each a run of consecutive members
/// of the sorted argument set of one cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YoungLayout {
    layers: Vec<Vec<usize>>,
    cells: Vec<usize>,
}

impl YoungLayout {
    /// `sizes[x]` splits the sorted argument set of cell `x` into runs of those sizes.
    pub fn from_sizes(sets: &AdmissibilitySets, sizes: &[Vec<usize>]) -> Result<Self, TraceError> {
        if sizes.len() != sets.cells.len() {
            return Err(TraceError::Layout(format!("{} size lists for {} cells", sizes.len(), sets.cells.len())));
        }
        let mut layers = Vec::new();
        let mut cells = Vec::new();
        for (x, (cell, sz)) in sets.cells.iter().zip(sizes).enumerate() {
            let args: Vec<usize> = cell.args.iter().copied().collect();
            if sz.iter().sum::<usize>() != args.len() || sz.contains(&0) {
                return Err(TraceError::Layout(format!("sizes {sz:?} do not split a set of {} positions", args.len())));
            }
            let mut at = 0;
            for &k in sz {
                layers.push(args[at..at + k].to_vec());
                cells.push(x);
                at += k;
            }
        }
        Ok(YoungLayout { layers, cells })
    }

    pub fn singletons(sets: &AdmissibilitySets) -> Self {
        let sizes: Vec<Vec<usize>> = sets.cells.iter().map(|c| vec![1; c.args.len()]).collect();
        YoungLayout::from_sizes(sets, &sizes).expect("singletons always split")
    }

    /// One layer per nonempty argument set.
    pub fn full(sets: &AdmissibilitySets) -> Self {
        let sizes: Vec<Vec<usize>> =
            sets.cells.iter().map(|c| if c.args.is_empty() { vec![] } else { vec![c.args.len()] }).collect();
        YoungLayout::from_sizes(sets, &sizes).expect("whole sets always split")
    }

    pub fn layers(&self) -> &[Vec<usize>] {
        &self.layers
    }

    /// Some layer is larger than the dimension of its cell.
    pub fn sufficiently_large(&self, sets: &AdmissibilitySets, dv: &DimensionVector) -> bool {
        self.layers
            .iter()
            .zip(&self.cells)
            .any(|(layer, &x)| layer.len() > dv.at(cell_head(sets.cells[x].cell)))
    }

    /// Whether `p` maps each layer onto itself.
    pub fn contains(&self, p: &Permutation) -> bool {
        self.layers.iter().all(|l| p.preserves(l))
    }

    pub fn group(&self, r: usize) -> Vec<Permutation> {
        Permutation::young_subgroup(r, &self.layers)
    }
}

/// Permutations fixing the arrow specialization: products of symmetric groups on segments.
pub fn specialization_group(hq: &HatQuiver) -> Vec<Permutation> {
    let segments: Vec<Vec<usize>> =
        hq.order().iter().map(|&a| hq.segment(a).collect::<Vec<_>>()).filter(|s| s.len() > 1).collect();
    Permutation::young_subgroup(hq.r(), &segments)
}

/// Left coset representatives of `sub` in `group`, each the least element of its coset.
pub fn coset_representatives(group: &[Permutation], sub: &[Permutation]) -> Vec<Permutation> {
    let mut sorted = group.to_vec();
    sorted.sort();
    let mut seen: HashSet<Permutation> = HashSet::new();
    let mut reps = Vec::new();
    for g in sorted {
        if seen.contains(&g) {
            continue;
        }
        for h in sub {
            seen.insert(g.compose(h));
        }
        reps.push(g);
    }
    reps
}

/// The suitable generator
/// `(1/|S_f|) Σ_{τ ∈ S_β} Σ_{π ∈ S_f/S'} sgn(τ) tr*(ρ1(π) σ1 τ ρ2(π)^{-1}, f)`
/// with `S' = ρ1^{-1}(σ1 S_β σ1^{-1}) ∩ ρ2^{-1}(S_β) ∩ S_f`.
pub fn suitable_generator(
    hq: &HatQuiver,
    sigma1: &Permutation,
    layout: &YoungLayout,
    cap: usize,
) -> Result<TraceExpression, Error> {
    let r = hq.r();
    if r > cap {
        return Err(TraceError::OverCap { r, cap }.into());
    }
    let sets = hq.admissibility_sets();
    if !sets.in_lq(sigma1)? {
        return Err(TraceError::NotAdmissible.into());
    }
    let covered: usize = layout.layers.iter().map(Vec::len).sum();
    if covered != r {
        return Err(TraceError::Layout(format!("layers cover {covered} of {r} positions")).into());
    }
    let iv = hq.intervals();
    let sf = specialization_group(hq);
    let s1_inv = sigma1.inverse();
    let mut sub = Vec::new();
    for pi in &sf {
        let r1 = rho_shift(pi, iv, 1)?;
        let r2 = rho_shift(pi, iv, 2)?;
        if layout.contains(&s1_inv.compose(&r1).compose(sigma1)) && layout.contains(&r2) {
            sub.push(pi.clone());
        }
    }
    let reps = coset_representatives(&sf, &sub);
    let shifted: Vec<(Permutation, Permutation)> = reps
        .iter()
        .map(|pi| Ok((rho_shift(pi, iv, 1)?, rho_shift(pi, iv, 2)?.inverse())))
        .collect::<Result<_, TraceError>>()?;
    let mut terms = Vec::new();
    for tau in layout.group(r) {
        let head = sigma1.compose(&tau);
        for (r1, r2_inv) in &shifted {
            let mu = r1.compose(&head).compose(r2_inv);
            if !sets.in_lq(&mu)? {
                return Err(TraceError::NotAdmissible.into());
            }
            terms.push((mu, tau.sign()));
        }
    }
    let counts = weighted_trstar_sum(hq, terms)?;
    Ok(to_expression(counts, &BigInt::from(sf.len())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Field, PrimeField};
    use crate::paths::CyclePath;
    use crate::rep::{act, derive_seed, random_group, random_rep};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn sigma_one_is_trace() {
        let q = model_quiver();
        let e = sigma_rs(1, 0, DEFAULT_R_CAP).unwrap();
        assert_eq!(e, TraceExpression::cycle(CyclePath::parse(&q, "(X)").unwrap()));
    }

    #[test]
    fn sigma_two_one_by_hand() {
        // σ_{2,1} = tr(Y Zᵀ) - tr(Y Z)
        let q = model_quiver();
        let e = sigma_rs(2, 1, DEFAULT_R_CAP).unwrap();
        let expected = TraceExpression::cycle(CyclePath::parse(&q, "(Y ~Z)").unwrap())
            .sub(&TraceExpression::cycle(CyclePath::parse(&q, "(Y Z)").unwrap()));
        assert_eq!(e, expected);
    }

    #[test]
    fn sigma_two_zero_by_hand() {
        let q = model_quiver();
        let x = TraceExpression::cycle(CyclePath::parse(&q, "(X)").unwrap());
        let xx = TraceExpression::cycle(CyclePath::parse(&q, "(X X)").unwrap());
        assert_eq!(sigma_rs(2, 0, DEFAULT_R_CAP).unwrap(), x.mul(&x).sub(&xx).scale(&rat(1, 2)));
    }

    #[test]
    fn guards() {
        assert_eq!(sigma_rs(3, 2, 8), Err(TraceError::BadDegrees { r: 3, s: 2 }));
        assert_eq!(sigma_rs(9, 0, 8), Err(TraceError::OverCap { r: 9, cap: 8 }));
    }

    fn loop_hat(r: usize) -> HatQuiver {
        HatQuiver::build(&Quiver::loops(1), &Multidegree(vec![r]), None).unwrap()
    }

    #[test]
    fn singleton_layers_give_product_of_traces() {
        let hq = loop_hat(2);
        let sets = hq.admissibility_sets();
        let z = suitable_generator(&hq, &Permutation::identity(2), &YoungLayout::singletons(&sets), 8).unwrap();
        let a = TraceExpression::cycle(CyclePath::parse(hq.quiver(), "(a)").unwrap());
        assert_eq!(z, a.mul(&a));
    }

    #[test]
    fn full_layer_gives_sigma() {
        for r in 1..=4 {
            let hq = loop_hat(r);
            let sets = hq.admissibility_sets();
            let z = suitable_generator(&hq, &Permutation::identity(r), &YoungLayout::full(&sets), 8).unwrap();
            let s = sigma_rs(r, 0, 8).unwrap();
            // same coefficients after renaming X to a
            let shown = s.display(&model_quiver()).replace('X', "a");
            assert_eq!(z.display(hq.quiver()), shown);
        }
        let q = model_quiver();
        let hq = HatQuiver::build(&q, &Multidegree(vec![1, 1, 1]), None).unwrap();
        let sets = hq.admissibility_sets();
        let z = suitable_generator(&hq, &Permutation::identity(3), &YoungLayout::full(&sets), 8).unwrap();
        assert_eq!(z, sigma_rs(3, 1, 8).unwrap());
    }

    #[test]
    fn layouts_validate() {
        let hq = loop_hat(3);
        let sets = hq.admissibility_sets();
        assert!(YoungLayout::from_sizes(&sets, &[vec![2, 2]]).is_err());
        assert!(YoungLayout::from_sizes(&sets, &[vec![3], vec![1]]).is_err());
        let l = YoungLayout::from_sizes(&sets, &[vec![1, 2]]).unwrap();
        assert_eq!(l.layers(), &[vec![0], vec![1, 2]]);
        let dv = DimensionVector::uniform(hq.quiver(), 1);
        assert!(l.sufficiently_large(&sets, &dv));
        assert!(!YoungLayout::singletons(&sets).sufficiently_large(&sets, &dv));
    }

    #[test]
    fn trstar_is_invariant_under_shifted_conjugation() {
        let q = model_quiver();
        let hq = HatQuiver::build(&q, &Multidegree(vec![2, 1, 1]), None).unwrap();
        let iv = hq.intervals();
        let sf = specialization_group(&hq);
        assert_eq!(sf.len(), 2);
        for mu in Permutation::all(4) {
            let base = word_to_monomial(&contract(&mu, iv).unwrap(), &hq).unwrap();
            for pi in &sf {
                let moved =
                    rho_shift(pi, iv, 1).unwrap().compose(&mu).compose(&rho_shift(pi, iv, 2).unwrap().inverse());
                assert_eq!(word_to_monomial(&contract(&moved, iv).unwrap(), &hq).unwrap(), base);
            }
        }
    }

    #[test]
    fn sigma_rs_is_invariant() {
        let f = PrimeField::mersenne61();
        let q = model_quiver();
        let dv = DimensionVector::uniform(&q, 2);
        let e = sigma_rs(4, 1, 8).unwrap();
        for k in 0..10 {
            let p = random_rep(&f, &q, &dv, derive_seed(1, k));
            let g = random_group(&f, &q, &dv, derive_seed(2, k)).unwrap();
            assert_eq!(e.eval(&f, &p).unwrap(), e.eval(&f, &act(&f, &q, &p, &g).unwrap()).unwrap());
        }
    }

    #[test]
    fn sigma_two_one_vanishes_in_dimension_one() {
        let f = PrimeField::mersenne61();
        let q = model_quiver();
        let dv = DimensionVector::uniform(&q, 1);
        let e = sigma_rs(2, 1, 8).unwrap();
        for k in 0..20 {
            assert_eq!(e.eval(&f, &random_rep(&f, &q, &dv, k)).unwrap(), f.zero());
        }
    }
}
