use crate::error::{Error, Result};

/// A finite group given by its Cayley table; elements are `0..order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u32>,
    identity: u32,
    inverses: Vec<u32>,
    names: Vec<String>,
}

impl FiniteGroup {
    /// Validates the group axioms exhaustively.
    pub fn from_table(table: Vec<Vec<usize>>, names: Vec<String>) -> Result<Self> {
        let n = table.len();
        if n == 0 || names.len() != n {
            return Err(Error::BadNames(format!(
                "{} names for a table of order {}",
                names.len(),
                n
            )));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::BadIndex {
                    row: i,
                    col: row.len(),
                    detail: "row length differs from order".into(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(Error::BadIndex {
                        row: i,
                        col: j,
                        detail: format!("entry {v} out of range"),
                    });
                }
                flat.push(v as u32);
            }
        }
        let at = |i: usize, j: usize| flat[i * n + j] as usize;
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or(Error::NoIdentity)?;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if at(at(i, j), k) != at(i, at(j, k)) {
                        return Err(Error::NotAssociative { i, j, k });
                    }
                }
            }
        }
        let mut inverses = Vec::with_capacity(n);
        for x in 0..n {
            let inv = (0..n)
                .find(|&y| at(x, y) == identity && at(y, x) == identity)
                .ok_or_else(|| Error::UnsupportedGroup(format!("element {x} has no inverse")))?;
            inverses.push(inv as u32);
        }
        Ok(FiniteGroup {
            order: n,
            table: flat,
            identity: identity as u32,
            inverses,
            names,
        })
    }

    /// Cyclic group `Z/n` with elements named `0..n`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0);
        let table = (0..n)
            .map(|i| (0..n).map(|j| (i + j) % n).collect())
            .collect();
        let names = (0..n).map(|i| i.to_string()).collect();
        Self::from_table(table, names).expect("cyclic table is a group")
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity as usize
    }

    pub fn multiply(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a] as usize
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.multiply(a, b) == self.multiply(b, a)))
    }

    /// Greedy generating set: each element not yet generated is added.
    pub fn generators(&self) -> Vec<usize> {
        let n = self.order;
        let mut inside = vec![false; n];
        inside[self.identity()] = true;
        let mut members = vec![self.identity()];
        let mut gens = Vec::new();
        for g in 0..n {
            if inside[g] {
                continue;
            }
            gens.push(g);
            // re-close under right multiplication by all generators
            let mut frontier: Vec<usize> = members.clone();
            while let Some(x) = frontier.pop() {
                for &s in &gens {
                    let y = self.multiply(x, s);
                    if !inside[y] {
                        inside[y] = true;
                        members.push(y);
                        frontier.push(y);
                    }
                }
            }
        }
        gens
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_group_axioms() {
        let g = FiniteGroup::cyclic(4);
        assert_eq!(g.order(), 4);
        assert_eq!(g.multiply(3, 2), 1);
        assert_eq!(g.inverse(1), 3);
        assert!(g.is_abelian());
        assert_eq!(g.generators(), vec![1]);
    }

    #[test]
    fn rejects_non_group() {
        let t = vec![vec![0, 1], vec![1, 1]];
        assert!(FiniteGroup::from_table(t, vec!["a".into(), "b".into()]).is_err());
    }
}
