use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Subject-disjoint partition into train, validation and test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub train: BTreeSet<String>,
    pub validation: BTreeSet<String>,
    pub test: BTreeSet<String>,
}

impl SplitAssignment {
    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.train.len(), self.validation.len(), self.test.len())
    }

    /// Fails if any subject is in more than one split.
    pub fn check_disjoint(&self) -> Result<()> {
        for s in self.train.iter().chain(&self.validation) {
            let hits = [&self.train, &self.validation, &self.test]
                .iter()
                .filter(|set| set.contains(s))
                .count();
            if hits > 1 {
                return Err(Error::OverlappingSplits(s.clone()));
            }
        }
        if let Some(s) = self.validation.intersection(&self.test).next() {
            return Err(Error::OverlappingSplits(s.clone()));
        }
        Ok(())
    }
}

/// Validation and test each get `max(1, floor(n / 5))` subjects; train gets
/// the rest. Fifteen subjects split 9/3/3.
pub fn split_sizes(n: usize) -> Result<(usize, usize, usize)> {
    if n < 3 {
        return Err(Error::TooFewSubjects { needed: 3, got: n });
    }
    let held_out = (n / 5).max(1);
    Ok((n - 2 * held_out, held_out, held_out))
}

/// Seeded assignment; the subject list is sorted first so input order does not matter.
pub fn make_split(subjects: &[String], seed: u64) -> Result<SplitAssignment> {
    let mut ids: Vec<String> = subjects.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    if ids.len() != subjects.len() {
        return Err(Error::Config("duplicate subject ids".into()));
    }
    let (n_train, n_val, _) = split_sizes(ids.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);
    let split = SplitAssignment {
        train: ids[..n_train].iter().cloned().collect(),
        validation: ids[n_train..n_train + n_val].iter().cloned().collect(),
        test: ids[n_train + n_val..].iter().cloned().collect(),
    };
    split.check_disjoint()?;
    Ok(split)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("S{i}")).collect()
    }

    #[test]
    fn fifteen_subjects() {
        for seed in 0..20 {
            let s = make_split(&ids(15), seed).unwrap();
            assert_eq!(s.sizes(), (9, 3, 3));
            let union: BTreeSet<_> = s.train.iter().chain(&s.validation).chain(&s.test).collect();
            assert_eq!(union.len(), 15);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(make_split(&ids(15), 7).unwrap(), make_split(&ids(15), 7).unwrap());
        let mut rev = ids(15);
        rev.reverse();
        assert_eq!(make_split(&ids(15), 7).unwrap(), make_split(&rev, 7).unwrap());
    }

    #[test]
    fn proportional_sizes_by_enumeration() {
        assert_eq!(make_split(&ids(6), 1).unwrap().sizes(), (4, 1, 1));
        for n in 3..40 {
            let (tr, va, te) = split_sizes(n).unwrap();
            assert_eq!(tr + va + te, n);
            assert!(va >= 1 && te >= 1 && tr >= va);
        }
        assert!(matches!(make_split(&ids(2), 0), Err(Error::TooFewSubjects { .. })));
    }
}
