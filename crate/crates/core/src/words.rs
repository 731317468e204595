//! Reduced words in the free group `F_d`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};

/// A reduced word. Letters are nonzero integers: `i` stands for the
/// generator `a_i` and `-i` for its inverse, with `1 ≤ i ≤ rank`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    rank: u32,
    letters: Vec<i32>,
}

/// Sign convention for the exponent homomorphism: `φ(a_i) = -1` for
/// [`GeneratorSign::Minus`] and `+1` for [`GeneratorSign::Plus`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorSign {
    Minus,
    Plus,
}

impl GeneratorSign {
    pub fn value(self) -> i64 {
        match self {
            GeneratorSign::Minus => -1,
            GeneratorSign::Plus => 1,
        }
    }

    pub const ALL: [GeneratorSign; 2] = [GeneratorSign::Minus, GeneratorSign::Plus];
}

impl fmt::Display for GeneratorSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorSign::Minus => "-1",
            GeneratorSign::Plus => "+1",
        })
    }
}

impl Word {
    pub fn identity(rank: u32) -> Self {
        Word {
            rank,
            letters: Vec::new(),
        }
    }

    /// Single generator `a_i` (`sign > 0`) or `a_i⁻¹`.
    pub fn generator(rank: u32, i: u32, sign: i32) -> Result<Self> {
        Word::from_letters(rank, &[if sign > 0 { i as i32 } else { -(i as i32) }])
    }

    /// Builds a word from letters, reducing as it goes.
    pub fn from_letters(rank: u32, letters: &[i32]) -> Result<Self> {
        if rank == 0 {
            return input("free group rank must be positive");
        }
        let mut out: Vec<i32> = Vec::with_capacity(letters.len());
        for &l in letters {
            if l == 0 || l.unsigned_abs() > rank {
                return input(format!("letter {l} out of range for rank {rank}"));
            }
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Ok(Word { rank, letters: out })
    }

    /// Parses the text encoding `"a1 A2"`; `"e"` or the empty string is the
    /// identity.
    pub fn parse(rank: u32, text: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "e" {
                continue;
            }
            let (head, num) = tok.split_at(1);
            let i: i32 = num
                .parse()
                .map_err(|_| crate::Error::Input(format!("bad letter {tok:?}")))?;
            match head {
                "a" => letters.push(i),
                "A" => letters.push(-i),
                _ => return input(format!("bad letter {tok:?}")),
            }
        }
        Word::from_letters(rank, &letters)
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    /// Word length `ℓ(w)`.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    pub fn multiply(&self, other: &Word) -> Result<Word> {
        if self.rank != other.rank {
            return input(format!(
                "rank mismatch: {} vs {}",
                self.rank, other.rank
            ));
        }
        let mut left = self.letters.clone();
        let mut k = 0;
        while k < other.letters.len() && left.last() == Some(&-other.letters[k]) {
            left.pop();
            k += 1;
        }
        left.extend_from_slice(&other.letters[k..]);
        Ok(Word {
            rank: self.rank,
            letters: left,
        })
    }

    /// Exponent homomorphism with `φ(a_i) = sign`.
    pub fn phi(&self, sign: GeneratorSign) -> i64 {
        let exp: i64 = self.letters.iter().map(|l| l.signum() as i64).sum();
        sign.value() * exp
    }

    /// Splits `w = u·v⁻¹` with `u`, `v` positive, when every positive letter
    /// precedes every negative letter.
    pub fn uv_normal_form(&self) -> Option<(Word, Word)> {
        let split = self.letters.iter().take_while(|l| **l > 0).count();
        if self.letters[split..].iter().any(|l| *l > 0) {
            return None;
        }
        let u = Word {
            rank: self.rank,
            letters: self.letters[..split].to_vec(),
        };
        let v = Word {
            rank: self.rank,
            letters: self.letters[split..].iter().rev().map(|l| -l).collect(),
        };
        Some((u, v))
    }

    /// All reduced words of length at most `radius`, shortlex ordered.
    pub fn ball(rank: u32, radius: usize) -> Vec<Word> {
        let mut out = vec![Word::identity(rank)];
        let mut frontier = vec![Word::identity(rank)];
        for _ in 0..radius {
            let mut next = Vec::new();
            for w in &frontier {
                for i in 1..=rank as i32 {
                    for l in [i, -i] {
                        if w.letters.last() == Some(&-l) {
                            continue;
                        }
                        let mut letters = w.letters.clone();
                        letters.push(l);
                        next.push(Word {
                            rank,
                            letters,
                        });
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("e");
        }
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            let c = if *l > 0 { 'a' } else { 'A' };
            write!(f, "{c}{}", l.unsigned_abs())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(rank: u32, s: &str) -> Word {
        Word::parse(rank, s).unwrap()
    }

    /// Reduction by repeated scanning for a cancelling adjacent pair.
    fn naive_reduce(mut letters: Vec<i32>) -> Vec<i32> {
        loop {
            let pos = letters.windows(2).position(|p| p[0] == -p[1]);
            match pos {
                Some(i) => {
                    letters.drain(i..i + 2);
                }
                None => return letters,
            }
        }
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(w(2, "a1").multiply(&w(2, "a2 A2")).unwrap(), w(2, "a1"));
        assert_eq!(
            w(2, "a1 a2").multiply(&w(2, "A2 a1")).unwrap(),
            w(2, "a1 a1")
        );
        let x = w(3, "a1 A3 a2");
        assert!(x.multiply(&x.inverse()).unwrap().is_empty());
        assert!(w(2, "a1").multiply(&w(3, "a1")).is_err());
    }

    #[test]
    fn phi_examples() {
        assert_eq!(w(2, "a1").phi(GeneratorSign::Minus), -1);
        assert_eq!(w(2, "a1 A2").phi(GeneratorSign::Minus), 0);
        assert_eq!(w(3, "a1 a2 a3").phi(GeneratorSign::Minus), -3);
    }

    #[test]
    fn normal_form_examples() {
        let (u, v) = w(3, "a1 a2 A3").uv_normal_form().unwrap();
        assert_eq!((u, v), (w(3, "a1 a2"), w(3, "a3")));
        assert!(w(2, "A1 a2").uv_normal_form().is_none());
        let (u, v) = Word::identity(2).uv_normal_form().unwrap();
        assert!(u.is_empty() && v.is_empty());
    }

    #[test]
    fn ball_sizes() {
        // |B(R)| = 1 + 2d((2d-1)^R - 1)/(2d-2)
        for r in 0..5usize {
            let expect = 1 + 4 * (3usize.pow(r as u32) - 1) / 2;
            assert_eq!(Word::ball(2, r).len(), expect);
        }
    }

    #[test]
    fn text_round_trip() {
        let x = w(2, "a1 A2 A2");
        assert_eq!(x.to_string(), "a1 A2 A2");
        assert_eq!(Word::identity(2).to_string(), "e");
    }

    fn letters(rank: i32) -> impl Strategy<Value = Vec<i32>> {
        prop::collection::vec((1..=rank, any::<bool>()), 0..12)
            .prop_map(|v| v.into_iter().map(|(i, s)| if s { i } else { -i }).collect())
    }

    proptest! {
        #[test]
        fn multiply_matches_naive(a in letters(3), b in letters(3)) {
            let x = Word::from_letters(3, &a).unwrap();
            let y = Word::from_letters(3, &b).unwrap();
            let p = x.multiply(&y).unwrap();
            let mut cat = x.letters().to_vec();
            cat.extend_from_slice(y.letters());
            prop_assert_eq!(p.letters(), &naive_reduce(cat)[..]);
            prop_assert!(p.letters().windows(2).all(|q| q[0] != -q[1]));
            prop_assert!(p.len() <= x.len() + y.len());
            prop_assert_eq!(
                p.phi(GeneratorSign::Plus),
                x.phi(GeneratorSign::Plus) + y.phi(GeneratorSign::Plus)
            );
        }

        #[test]
        fn associative(a in letters(2), b in letters(2), c in letters(2)) {
            let (x, y, z) = (
                Word::from_letters(2, &a).unwrap(),
                Word::from_letters(2, &b).unwrap(),
                Word::from_letters(2, &c).unwrap(),
            );
            prop_assert_eq!(
                x.multiply(&y).unwrap().multiply(&z).unwrap(),
                x.multiply(&y.multiply(&z).unwrap()).unwrap()
            );
        }

        #[test]
        fn normal_form_recovers(u in prop::collection::vec(1..=3i32, 0..6),
                                v in prop::collection::vec(1..=3i32, 0..6)) {
            let u = Word::from_letters(3, &u).unwrap();
            let v = Word::from_letters(3, &v).unwrap();
            let p = u.multiply(&v.inverse()).unwrap();
            if p.len() == u.len() + v.len() {
                prop_assert_eq!(p.uv_normal_form(), Some((u, v)));
            }
        }
    }
}
