use super::perm::Perm;
use crate::error::{Error, Result};
use std::collections::HashMap;

/// A finite permutation group, enumerated eagerly from its generators.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
    index: HashMap<Perm, u32>,
}

impl PartialEq for PermGroup {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.elements == other.elements
    }
}

impl PermGroup {
    pub fn generated_by(degree: usize, generators: Vec<Perm>, cap: usize) -> Result<Self> {
        let elements = closure(Perm::identity(degree), &generators, |a, b| a.then(b), cap)?;
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i as u32))
            .collect();
        Ok(PermGroup {
            degree,
            generators,
            elements,
            index,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.index.contains_key(p)
    }
}

/// Breadth-first closure of `{start}` under right multiplication by `gens`.
/// In a finite group this is the generated subgroup.
pub(crate) fn closure<T, F>(start: T, gens: &[T], mul: F, cap: usize) -> Result<Vec<T>>
where
    T: Clone + Eq + std::hash::Hash,
    F: Fn(&T, &T) -> T,
{
    let mut seen: HashMap<T, ()> = HashMap::new();
    seen.insert(start.clone(), ());
    let mut out = vec![start];
    let mut head = 0;
    while head < out.len() {
        let x = out[head].clone();
        head += 1;
        for g in gens {
            let y = mul(&x, g);
            if !seen.contains_key(&y) {
                if out.len() >= cap {
                    return Err(Error::CapExceeded {
                        what: "group enumeration",
                        needed: format!("more than {cap} elements"),
                        cap,
                    });
                }
                seen.insert(y.clone(), ());
                out.push(y);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_group_s4() {
        let g = PermGroup::generated_by(
            4,
            vec![
                Perm::from_images(vec![1, 0, 2, 3]).unwrap(),
                Perm::from_images(vec![1, 2, 3, 0]).unwrap(),
            ],
            1000,
        )
        .unwrap();
        assert_eq!(g.order(), 24);
        assert!(g.contains(&Perm::from_images(vec![3, 2, 1, 0]).unwrap()));
    }

    #[test]
    fn cap_is_enforced() {
        let r = PermGroup::generated_by(
            4,
            vec![
                Perm::from_images(vec![1, 0, 2, 3]).unwrap(),
                Perm::from_images(vec![1, 2, 3, 0]).unwrap(),
            ],
            10,
        );
        assert!(matches!(r, Err(Error::CapExceeded { .. })));
    }
}
