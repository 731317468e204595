//! Exact eventually periodic sequences over a finite alphabet.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};

/// The sequence `pre · period · period · …`.
///
/// Canonical form: `period` is primitive and `pre` is as short as possible,
/// so two values are equal iff they represent the same sequence. Shortening
/// `pre` fixes the rotation of `period`; it is not normalized separately.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EvPeriodicPoint {
    pre: Vec<u32>,
    period: Vec<u32>,
}

fn primitive_root(p: &[u32]) -> &[u32] {
    let n = p.len();
    for d in 1..=n {
        if n % d == 0 && (d..n).all(|i| p[i] == p[i - d]) {
            return &p[..d];
        }
    }
    p
}

impl EvPeriodicPoint {
    pub fn new(pre: Vec<u32>, period: Vec<u32>) -> Result<Self> {
        if period.is_empty() {
            return input("period must be nonempty");
        }
        let mut pt = EvPeriodicPoint {
            period: primitive_root(&period).to_vec(),
            pre,
        };
        pt.absorb();
        Ok(pt)
    }

    /// The constant sequence `s s s …`.
    pub fn constant(s: u32) -> Self {
        EvPeriodicPoint {
            pre: Vec::new(),
            period: vec![s],
        }
    }

    fn absorb(&mut self) {
        while let Some(&last) = self.pre.last() {
            if last != *self.period.last().expect("nonempty period") {
                break;
            }
            self.pre.pop();
            self.period.rotate_right(1);
        }
    }

    pub fn preperiod(&self) -> &[u32] {
        &self.pre
    }

    pub fn period(&self) -> &[u32] {
        &self.period
    }

    /// Symbol at position `i` (0-based).
    pub fn symbol(&self, i: usize) -> u32 {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.period[(i - self.pre.len()) % self.period.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<u32> {
        (0..n).map(|i| self.symbol(i)).collect()
    }

    pub fn starts_with(&self, word: &[u32]) -> bool {
        word.iter().enumerate().all(|(i, s)| self.symbol(i) == *s)
    }

    /// The one-sided shift `σ(x)_i = x_{i+1}`.
    pub fn shift(&self) -> Self {
        let mut out = self.clone();
        if out.pre.is_empty() {
            out.period.rotate_left(1);
        } else {
            out.pre.remove(0);
        }
        out
    }

    pub fn shift_by(&self, n: usize) -> Self {
        let mut out = self.clone();
        let k = n.min(out.pre.len());
        out.pre.drain(..k);
        let rest = n - k;
        let p = out.period.len();
        out.period.rotate_left(rest % p);
        out
    }

    /// The sequence `s x_0 x_1 …`.
    pub fn prepend(&self, s: u32) -> Self {
        self.prepend_word(&[s])
    }

    pub fn prepend_word(&self, word: &[u32]) -> Self {
        let mut pre = word.to_vec();
        pre.extend_from_slice(&self.pre);
        let mut out = EvPeriodicPoint {
            pre,
            period: self.period.clone(),
        };
        out.absorb();
        out
    }

    /// Largest symbol that occurs.
    pub fn max_symbol(&self) -> u32 {
        self.pre.iter().chain(&self.period).copied().max().unwrap_or(0)
    }
}

impl fmt::Display for EvPeriodicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.max_symbol() >= 10 { "," } else { "" };
        let join = |v: &[u32]| {
            v.iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(sep)
        };
        if !self.pre.is_empty() {
            write!(f, "{}{}", join(&self.pre), sep)?;
        }
        write!(f, "({})^inf", join(&self.period))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_forms_coincide() {
        let a = EvPeriodicPoint::new(vec![1, 0, 1], vec![0, 1, 0, 1]).unwrap();
        let b = EvPeriodicPoint::new(vec![], vec![1, 0]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.preperiod(), &[] as &[u32]);
        assert_eq!(a.period(), &[1, 0]);
    }

    #[test]
    fn prepend_and_shift() {
        let z = EvPeriodicPoint::constant(0);
        let x = z.prepend(1);
        assert_eq!(x.to_string(), "1(0)^inf");
        assert_eq!(x.shift(), z);
        assert_eq!(z.prepend(0), z);
        assert!(x.starts_with(&[1, 0, 0]));
        assert!(!z.starts_with(&[1]));
    }

    fn point() -> impl Strategy<Value = EvPeriodicPoint> {
        (
            prop::collection::vec(0u32..3, 0..6),
            prop::collection::vec(0u32..3, 1..5),
        )
            .prop_map(|(a, b)| EvPeriodicPoint::new(a, b).unwrap())
    }

    proptest! {
        #[test]
        fn canonical_is_idempotent_and_faithful(p in point(), q in point()) {
            let again = EvPeriodicPoint::new(p.preperiod().to_vec(), p.period().to_vec()).unwrap();
            prop_assert_eq!(&again, &p);
            // two eventually periodic sequences agree iff they agree on a
            // prefix covering both preperiods plus a common period multiple
            let n = p.preperiod().len().max(q.preperiod().len())
                + p.period().len() * q.period().len();
            prop_assert_eq!(p == q, p.prefix(n) == q.prefix(n));
        }

        #[test]
        fn shift_undoes_prepend(p in point(), s in 0u32..3) {
            prop_assert_eq!(p.prepend(s).shift(), p.clone());
            prop_assert_eq!(p.shift_by(3), p.shift().shift().shift());
        }
    }
}
