use super::module::FpModule;
use super::morphism::FpMorphism;
use crate::error::Result;
use crate::exactlin::{hermite_columns, preimage_lattice, BigMatrix};
use num_bigint::BigInt;
use std::collections::{BTreeMap, BTreeSet};

/// Every submodule of a finite module, as one inclusion morphism each, in a
/// deterministic order (by order, then by element content). The domain of each
/// inclusion is a freshly presented module on a small generating set.
pub fn submodule_inclusions(m: &FpModule) -> Result<Vec<FpMorphism>> {
    let els = m.elements()?;
    let index: BTreeMap<Vec<BigInt>, usize> =
        els.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    let n = els.len();
    let mut add = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in 0..n {
            let sum: Vec<BigInt> = els[i].iter().zip(&els[j]).map(|(a, b)| a + b).collect();
            add[i][j] = index[&m.canonical_rep(&sum)];
        }
    }
    let zero = index[&m.canonical_rep(&vec![BigInt::from(0); m.generators()])];
    let closure = |seed: &BTreeSet<usize>| -> BTreeSet<usize> {
        let mut set = seed.clone();
        set.insert(zero);
        loop {
            let mut grew = false;
            let current: Vec<usize> = set.iter().copied().collect();
            for &a in &current {
                for &b in &current {
                    if set.insert(add[a][b]) {
                        grew = true;
                    }
                }
            }
            if !grew {
                return set;
            }
        }
    };
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut queue: Vec<BTreeSet<usize>> = vec![closure(&BTreeSet::new())];
    found.insert(queue[0].iter().copied().collect());
    while let Some(sub) = queue.pop() {
        for x in 0..n {
            if !sub.contains(&x) {
                let mut seed = sub.clone();
                seed.insert(x);
                let bigger = closure(&seed);
                let key: Vec<usize> = bigger.iter().copied().collect();
                if found.insert(key) {
                    queue.push(bigger);
                }
            }
        }
    }
    let mut subgroups: Vec<Vec<usize>> = found.into_iter().collect();
    subgroups.sort_by_key(|s| (s.len(), s.clone()));
    let mut out = Vec::with_capacity(subgroups.len());
    for sub in subgroups {
        let members: BTreeSet<usize> = sub.iter().copied().collect();
        // greedy small generating set
        let mut gens: Vec<usize> = Vec::new();
        let mut span: BTreeSet<usize> = closure(&BTreeSet::new());
        for &x in &sub {
            if !span.contains(&x) {
                gens.push(x);
                let mut seed: BTreeSet<usize> = gens.iter().copied().collect();
                seed.extend(span.iter().copied());
                span = closure(&seed);
                if span == members {
                    break;
                }
            }
        }
        let k = gens.len();
        let g_mat = if k == 0 {
            BigMatrix::zeros(m.generators(), 0)
        } else {
            BigMatrix::from_cols(gens.iter().map(|&i| els[i].clone()).collect())
        };
        let rels = hermite_columns(k, &preimage_lattice(&g_mat, &m.relation_matrix_full(), None));
        let sub_mod = FpModule::from_relation_columns(m.ring().clone(), k, rels);
        out.push(FpMorphism::expect_new(sub_mod, m.clone(), g_mat));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpmod::ring::Ring;

    #[test]
    fn subgroup_lattice_of_cyclic_four() {
        let m = FpModule::cyclic(Ring::Z, 4);
        let subs = submodule_inclusions(&m).unwrap();
        assert_eq!(subs.len(), 3);
        let forms: Vec<String> = subs
            .iter()
            .map(|i| i.dom().canonical_form().to_string())
            .collect();
        assert_eq!(forms, vec!["0", "Z/2", "Z/4"]);
        for i in &subs {
            assert!(i.is_mono());
        }
    }

    #[test]
    fn subgroup_count_of_klein_group() {
        let m = FpModule::direct_sum(
            &FpModule::cyclic(Ring::Z, 2),
            &FpModule::cyclic(Ring::Z, 2),
        );
        let subs = submodule_inclusions(&m).unwrap();
        // zero, three lines, everything
        assert_eq!(subs.len(), 5);
    }

    #[test]
    fn subgroup_count_of_cyclic_six() {
        let m = FpModule::cyclic(Ring::zmod(6), 6);
        let subs = submodule_inclusions(&m).unwrap();
        assert_eq!(subs.len(), 4);
    }

    #[test]
    fn infinite_modules_are_rejected() {
        let m = FpModule::free_module(Ring::Z, 1);
        assert!(submodule_inclusions(&m).is_err());
    }
}
