//! Group elements used as arrow labels: free-group words, residues mod n,
//! and permutations.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::words::Word;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupElem {
    Word(Word),
    /// `k` in `Z/n`.
    Mod { k: u32, n: u32 },
    /// Permutation of `0..len` in one-line notation.
    Perm(Vec<u32>),
}

impl GroupElem {
    pub fn is_identity(&self) -> bool {
        match self {
            GroupElem::Word(w) => w.is_empty(),
            GroupElem::Mod { k, .. } => *k == 0,
            GroupElem::Perm(p) => p.iter().enumerate().all(|(i, v)| i as u32 == *v),
        }
    }

    pub fn identity_like(&self) -> GroupElem {
        match self {
            GroupElem::Word(w) => GroupElem::Word(Word::identity(w.rank())),
            GroupElem::Mod { n, .. } => GroupElem::Mod { k: 0, n: *n },
            GroupElem::Perm(p) => GroupElem::Perm((0..p.len() as u32).collect()),
        }
    }

    pub fn inverse(&self) -> GroupElem {
        match self {
            GroupElem::Word(w) => GroupElem::Word(w.inverse()),
            GroupElem::Mod { k, n } => GroupElem::Mod { k: (n - k) % n, n: *n },
            GroupElem::Perm(p) => {
                let mut inv = vec![0; p.len()];
                for (i, v) in p.iter().enumerate() {
                    inv[*v as usize] = i as u32;
                }
                GroupElem::Perm(inv)
            }
        }
    }

    /// Product `self · other`; permutations compose as functions,
    /// `(p·q)(i) = p(q(i))`.
    pub fn mul(&self, other: &GroupElem) -> Result<GroupElem> {
        match (self, other) {
            (GroupElem::Word(a), GroupElem::Word(b)) => Ok(GroupElem::Word(a.multiply(b)?)),
            (GroupElem::Mod { k, n }, GroupElem::Mod { k: l, n: m }) if n == m => {
                Ok(GroupElem::Mod { k: (k + l) % n, n: *n })
            }
            (GroupElem::Perm(p), GroupElem::Perm(q)) if p.len() == q.len() => {
                Ok(GroupElem::Perm(q.iter().map(|i| p[*i as usize]).collect()))
            }
            _ => input(format!("cannot multiply {self} and {other}")),
        }
    }

    /// Word length for the standard generating sets: letters for words,
    /// `min(k, n-k)` on `Z/n`, and transposition length `len - #cycles` on
    /// permutations.
    pub fn length(&self) -> usize {
        match self {
            GroupElem::Word(w) => w.len(),
            GroupElem::Mod { k, n } => (*k).min(n - k) as usize,
            GroupElem::Perm(p) => {
                let mut seen = vec![false; p.len()];
                let mut cycles = 0;
                for s in 0..p.len() {
                    if !seen[s] {
                        cycles += 1;
                        let mut i = s;
                        while !seen[i] {
                            seen[i] = true;
                            i = p[i] as usize;
                        }
                    }
                }
                p.len() - cycles
            }
        }
    }

    pub fn cyclic(n: u32) -> Result<Vec<GroupElem>> {
        if n == 0 {
            return input("cyclic group order must be positive");
        }
        Ok((0..n).map(|k| GroupElem::Mod { k, n }).collect())
    }

    /// All permutations of `0..n` in lexicographic order.
    pub fn symmetric(n: u32) -> Result<Vec<GroupElem>> {
        if n == 0 {
            return input("symmetric group degree must be positive");
        }
        fn rec(prefix: &mut Vec<u32>, n: u32, out: &mut Vec<GroupElem>) {
            if prefix.len() == n as usize {
                out.push(GroupElem::Perm(prefix.clone()));
                return;
            }
            for v in 0..n {
                if !prefix.contains(&v) {
                    prefix.push(v);
                    rec(prefix, n, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), n, &mut out);
        Ok(out)
    }

    /// Reduced words of length at most `radius` in `F_rank`.
    pub fn free_ball(rank: u32, radius: usize) -> Vec<GroupElem> {
        Word::ball(rank, radius).into_iter().map(GroupElem::Word).collect()
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElem::Word(w) => write!(f, "{w}"),
            GroupElem::Mod { k, n } => write!(f, "{k} mod {n}"),
            GroupElem::Perm(p) => write!(f, "{p:?}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_lengths() {
        let s3 = GroupElem::symmetric(3).unwrap();
        assert_eq!(s3.len(), 6);
        let lens: Vec<usize> = s3.iter().map(|g| g.length()).collect();
        assert_eq!(lens, vec![0, 1, 1, 2, 2, 1]);
        for g in &s3 {
            assert!(g.mul(&g.inverse()).unwrap().is_identity());
        }
    }

    #[test]
    fn cyclic_arithmetic() {
        let g = GroupElem::Mod { k: 3, n: 4 };
        assert_eq!(g.length(), 1);
        assert_eq!(g.mul(&g).unwrap(), GroupElem::Mod { k: 2, n: 4 });
        assert!(g.mul(&GroupElem::Mod { k: 1, n: 5 }).is_err());
    }
}
