use super::perm::Perm;
use crate::error::{Error, Result};

/// A finite quotient of a free group, fixed by the images of the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeQuotient {
    pub degree: usize,
    pub images: Vec<Perm>,
}

/// Free group of finite rank; elements are freely reduced words whose
/// letters are `±(i + 1)` for generator `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeGroup {
    rank: usize,
    quotients: Vec<FreeQuotient>,
}

const LETTERS: [&str; 4] = ["x", "y", "z", "w"];

impl FreeGroup {
    pub fn new(rank: usize, quotients: Vec<FreeQuotient>) -> Result<Self> {
        for (i, q) in quotients.iter().enumerate() {
            if q.images.len() != rank || q.images.iter().any(|p| p.degree() != q.degree) {
                return Err(Error::InvalidArgument(format!(
                    "quotient {i} must give {rank} permutations of degree {}",
                    q.degree
                )));
            }
        }
        Ok(FreeGroup { rank, quotients })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn quotients(&self) -> &[FreeQuotient] {
        &self.quotients
    }

    pub fn multiply(&self, a: &[i32], b: &[i32]) -> Vec<i32> {
        let mut out = a.to_vec();
        for &l in b {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        out
    }

    pub fn inverse(&self, a: &[i32]) -> Vec<i32> {
        a.iter().rev().map(|l| -l).collect()
    }

    pub fn generators(&self) -> Vec<Vec<i32>> {
        (1..=self.rank as i32).map(|l| vec![l]).collect()
    }

    /// Image of a word under quotient `q`, composing left to right.
    pub fn evaluate(&self, q: &FreeQuotient, word: &[i32]) -> Perm {
        word.iter().fold(Perm::identity(q.degree), |acc, &l| {
            let p = &q.images[l.unsigned_abs() as usize - 1];
            if l > 0 {
                acc.then(p)
            } else {
                acc.then(&p.inverse())
            }
        })
    }

    pub fn letter_name(&self, generator: usize) -> String {
        if self.rank <= LETTERS.len() {
            LETTERS[generator].to_string()
        } else {
            format!("g{}", generator + 1)
        }
    }

    pub fn label(&self, word: &[i32]) -> String {
        if word.is_empty() {
            return "1".into();
        }
        let mut s = String::new();
        for &l in word {
            s.push_str(&self.letter_name(l.unsigned_abs() as usize - 1));
            if l < 0 {
                s.push_str("^-1");
            }
        }
        s
    }

    /// Parses words like `xy^-1x` (also `X` for `x^-1`, and `1` for the empty word).
    pub fn parse(&self, s: &str) -> Result<Vec<i32>> {
        let bad = || Error::UnknownElement(s.to_string());
        let t = s.trim();
        if t == "1" || t == "e" || t.is_empty() {
            return Ok(Vec::new());
        }
        let mut word: Vec<i32> = Vec::new();
        let chars: Vec<char> = t.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let (gen, mut inverse) = if self.rank <= LETTERS.len() {
                let c = chars[i];
                let lower = c.to_ascii_lowercase().to_string();
                let g = LETTERS[..self.rank]
                    .iter()
                    .position(|&l| l == lower)
                    .ok_or_else(bad)?;
                i += 1;
                (g, c.is_ascii_uppercase())
            } else {
                if chars[i] != 'g' {
                    return Err(bad());
                }
                i += 1;
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let n: usize = chars[start..i]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| bad())?;
                if n == 0 || n > self.rank {
                    return Err(bad());
                }
                (n - 1, false)
            };
            if chars[i..].starts_with(&['^', '-', '1']) {
                inverse = !inverse;
                i += 3;
            }
            let l = gen as i32 + 1;
            word = self.multiply(&word, &[if inverse { -l } else { l }]);
        }
        Ok(word)
    }
}
