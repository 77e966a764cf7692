//! Pairwise relationships between partitions: equivalence, nesting and
//! full or partial crossing.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::Partition;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("partitions cover {left} and {right} units")]
pub struct UnitMismatch {
    pub left: usize,
    pub right: usize,
}

/// How the first partition relates to the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Relationship {
    /// Same grouping, different level names.
    Equivalent,
    /// Every class of the first lies inside one class of the second, and the
    /// second is strictly coarser.
    NestedIn,
    /// Mirror of `NestedIn`.
    Nests,
    /// Every pair of classes co-occurs on some unit.
    FullyCrossed,
    PartiallyCrossed,
}

impl Relationship {
    pub fn reversed(self) -> Self {
        match self {
            Relationship::NestedIn => Relationship::Nests,
            Relationship::Nests => Relationship::NestedIn,
            other => other,
        }
    }
}

impl fmt::Display for Relationship {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relationship::Equivalent => "equivalent",
            Relationship::NestedIn => "nested in",
            Relationship::Nests => "nests",
            Relationship::FullyCrossed => "fully crossed",
            Relationship::PartiallyCrossed => "partially crossed",
        })
    }
}

fn same_units(p: &Partition, q: &Partition) -> Result<(), UnitMismatch> {
    if p.n_units() == q.n_units() {
        Ok(())
    } else {
        Err(UnitMismatch {
            left: p.n_units(),
            right: q.n_units(),
        })
    }
}

/// True iff every class of `p` lies inside a single class of `q`.
pub fn refines(p: &Partition, q: &Partition) -> Result<bool, UnitMismatch> {
    same_units(p, q)?;
    Ok(refines_unchecked(p, q))
}

pub(crate) fn refines_unchecked(p: &Partition, q: &Partition) -> bool {
    if p.n_classes() < q.n_classes() {
        return false;
    }
    let mut image = vec![u32::MAX; p.n_classes()];
    p.class_of().iter().zip(q.class_of()).all(|(&a, &b)| {
        let slot = &mut image[a as usize];
        if *slot == u32::MAX {
            *slot = b;
        }
        *slot == b
    })
}

/// Number of distinct (class of `p`, class of `q`) pairs present on units.
pub(crate) fn co_occurring_pairs(p: &Partition, q: &Partition) -> usize {
    let width = q.n_classes();
    let cells = p.n_classes().saturating_mul(width);
    if cells <= 1 << 22 {
        let mut seen = vec![false; cells];
        let mut count = 0;
        for (&a, &b) in p.class_of().iter().zip(q.class_of()) {
            let slot = &mut seen[a as usize * width + b as usize];
            if !*slot {
                *slot = true;
                count += 1;
            }
        }
        count
    } else {
        p.class_of().iter().zip(q.class_of()).collect::<HashSet<_>>().len()
    }
}

pub fn classify(p: &Partition, q: &Partition) -> Result<Relationship, UnitMismatch> {
    same_units(p, q)?;
    Ok(classify_unchecked(p, q))
}

pub(crate) fn classify_unchecked(p: &Partition, q: &Partition) -> Relationship {
    match (refines_unchecked(p, q), refines_unchecked(q, p)) {
        (true, true) => Relationship::Equivalent,
        (true, false) => Relationship::NestedIn,
        (false, true) => Relationship::Nests,
        (false, false) => {
            if co_occurring_pairs(p, q) == p.n_classes() * q.n_classes() {
                Relationship::FullyCrossed
            } else {
                Relationship::PartiallyCrossed
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(keys: &[u32]) -> Partition {
        Partition::from_keys(keys.iter().copied())
    }

    #[test]
    fn reflexive() {
        let p = part(&[0, 0, 1, 2]);
        assert!(refines(&p, &p).unwrap());
        assert_eq!(classify(&p, &p).unwrap(), Relationship::Equivalent);
    }

    #[test]
    fn nesting_both_directions() {
        let fine = part(&[0, 1, 2, 3]);
        let coarse = part(&[0, 0, 1, 1]);
        assert_eq!(classify(&fine, &coarse).unwrap(), Relationship::NestedIn);
        assert_eq!(classify(&coarse, &fine).unwrap(), Relationship::Nests);
    }

    #[test]
    fn crossing() {
        let a = part(&[0, 0, 1, 1]);
        let b = part(&[0, 1, 0, 1]);
        assert_eq!(classify(&a, &b).unwrap(), Relationship::FullyCrossed);
        let c = part(&[0, 1, 0, 2]);
        assert_eq!(classify(&a, &c).unwrap(), Relationship::PartiallyCrossed);
    }

    #[test]
    fn mean_nests_everything() {
        let mean = Partition::mean(4);
        let a = part(&[0, 0, 1, 1]);
        assert_eq!(classify(&mean, &a).unwrap(), Relationship::Nests);
        assert_eq!(classify(&mean, &mean).unwrap(), Relationship::Equivalent);
    }

    #[test]
    fn unit_mismatch() {
        let a = part(&[0, 1]);
        let b = part(&[0, 1, 2]);
        assert_eq!(refines(&a, &b), Err(UnitMismatch { left: 2, right: 3 }));
        assert!(classify(&a, &b).is_err());
    }
}
