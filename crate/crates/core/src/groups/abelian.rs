//! Finitely generated abelian groups presented as `Z^r / L`.

use std::fmt;

/// A sublattice of `Z^r` kept in Hermite normal form.
///
/// Rows are in echelon form with positive pivots, and every entry above a
/// pivot lies in `[0, pivot)`. Two lattices are equal iff their forms are.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lattice {
    rank: usize,
    rows: Vec<Vec<i64>>,
    pivots: Vec<usize>,
}

impl Lattice {
    pub fn zero(rank: usize) -> Self {
        Lattice {
            rank,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn generated_by(rank: usize, gens: &[Vec<i64>]) -> Self {
        let mut rows: Vec<Vec<i64>> = gens
            .iter()
            .map(|g| {
                assert_eq!(g.len(), rank, "generator of wrong length");
                g.clone()
            })
            .filter(|g| g.iter().any(|&x| x != 0))
            .collect();
        let mut pivots = Vec::new();
        let mut k = 0;
        for c in 0..rank {
            if k == rows.len() {
                break;
            }
            // Euclid on column c among rows k..
            loop {
                let mut best: Option<usize> = None;
                for i in k..rows.len() {
                    if rows[i][c] != 0 && best.is_none_or(|b| rows[i][c].abs() < rows[b][c].abs())
                    {
                        best = Some(i);
                    }
                }
                let Some(b) = best else { break };
                rows.swap(k, b);
                let mut done = true;
                for i in k + 1..rows.len() {
                    if rows[i][c] != 0 {
                        let q = rows[i][c].div_euclid(rows[k][c]);
                        for j in 0..rank {
                            rows[i][j] -= q * rows[k][j];
                        }
                        if rows[i][c] != 0 {
                            done = false;
                        }
                    }
                }
                if done {
                    break;
                }
            }
            if rows[k][c] == 0 {
                continue;
            }
            if rows[k][c] < 0 {
                for x in rows[k].iter_mut() {
                    *x = -*x;
                }
            }
            let d = rows[k][c];
            for i in 0..k {
                let q = rows[i][c].div_euclid(d);
                if q != 0 {
                    for j in 0..rank {
                        rows[i][j] -= q * rows[k][j];
                    }
                }
            }
            pivots.push(c);
            k += 1;
        }
        rows.truncate(k);
        Lattice { rank, rows, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// Canonical representative of `v + L`.
    pub fn reduce(&self, v: &[i64]) -> Vec<i64> {
        let mut v = v.to_vec();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let q = v[c].div_euclid(row[c]);
            if q != 0 {
                for j in c..self.rank {
                    v[j] -= q * row[j];
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn join(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.rank, other.rank);
        let gens: Vec<Vec<i64>> = self.rows.iter().chain(&other.rows).cloned().collect();
        Lattice::generated_by(self.rank, &gens)
    }

    pub fn is_subset_of(&self, other: &Lattice) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    pub fn is_full_rank(&self) -> bool {
        self.rows.len() == self.rank
    }

    /// Index `[Z^r : L]` when finite.
    pub fn index(&self) -> Option<u64> {
        self.is_full_rank().then(|| {
            self.rows
                .iter()
                .zip(&self.pivots)
                .map(|(r, &c)| r[c] as u64)
                .product()
        })
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", fmt_vector(r))?;
        }
        write!(f, ">")
    }
}

pub(crate) fn fmt_vector(v: &[i64]) -> String {
    if v.len() == 1 {
        v[0].to_string()
    } else {
        let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

/// The group `Z^r / L`; elements are canonical representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    relations: Lattice,
}

impl AbelianGroup {
    pub fn new(relations: Lattice) -> Self {
        AbelianGroup { relations }
    }

    pub fn free(rank: usize) -> Self {
        Self::new(Lattice::zero(rank))
    }

    /// `Z^free_rank × Z/t_1 × ... × Z/t_m`.
    pub fn with_torsion(free_rank: usize, torsion: &[u64]) -> Self {
        let rank = free_rank + torsion.len();
        let gens: Vec<Vec<i64>> = torsion
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let mut v = vec![0; rank];
                v[free_rank + i] = t as i64;
                v
            })
            .collect();
        Self::new(Lattice::generated_by(rank, &gens))
    }

    pub fn ambient_rank(&self) -> usize {
        self.relations.rank
    }

    pub fn relations(&self) -> &Lattice {
        &self.relations
    }

    pub fn reduce(&self, v: &[i64]) -> Vec<i64> {
        self.relations.reduce(v)
    }

    pub fn identity(&self) -> Vec<i64> {
        vec![0; self.ambient_rank()]
    }

    pub fn multiply(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let s: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.reduce(&s)
    }

    pub fn inverse(&self, a: &[i64]) -> Vec<i64> {
        let s: Vec<i64> = a.iter().map(|x| -x).collect();
        self.reduce(&s)
    }

    pub fn order(&self) -> Option<u64> {
        self.relations.index()
    }

    /// The quotient by the subgroup generated by `sub` (taken modulo the relations).
    pub fn quotient(&self, sub: &Lattice) -> AbelianGroup {
        AbelianGroup::new(self.relations.join(sub))
    }

    pub fn generators(&self) -> Vec<Vec<i64>> {
        let r = self.ambient_rank();
        (0..r)
            .map(|i| {
                let mut v = vec![0; r];
                v[i] = 1;
                self.reduce(&v)
            })
            .filter(|v| v.iter().any(|&x| x != 0))
            .collect()
    }

    /// All elements, when the group is finite.
    pub fn elements(&self) -> Option<Vec<Vec<i64>>> {
        self.order()?;
        let bounds: Vec<i64> = (0..self.ambient_rank())
            .map(|c| self.relations.rows[c][c])
            .collect();
        let mut out = vec![Vec::new()];
        for &b in &bounds {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<i64>| {
                    (0..b).map(move |x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        Some(out)
    }
}
