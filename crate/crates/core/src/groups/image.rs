use super::permgroup::closure;
use super::{Amenability, GroupElem, GroupHandle};
use crate::error::Result;
use crate::monoid::StabiliserQuotient;
use std::collections::HashMap;
use std::sync::Arc;

/// The image of a group in the direct product of several stabiliser
/// quotients. Elements are tuples with one component per quotient.
pub struct ImageGroup {
    source: GroupHandle,
    components: Vec<Arc<dyn StabiliserQuotient>>,
    generators: Vec<GroupElem>,
    elements: Option<Vec<GroupElem>>,
    index: HashMap<GroupElem, u32>,
}

/// The componentwise morphism `g ↦ ḡ` onto an [`ImageGroup`].
#[derive(Clone)]
pub struct ImageHom {
    target: Arc<ImageGroup>,
}

impl ImageHom {
    pub fn apply(&self, g: &GroupElem) -> GroupElem {
        self.target.project(g)
    }

    pub fn target(&self) -> &Arc<ImageGroup> {
        &self.target
    }
}

/// Builds `Ḡ`, the image of `source` under the product of the quotient maps.
///
/// When every quotient is finite the image is enumerated from the images of
/// the source generators (at most `cap` elements).
pub fn joint_quotient_image(
    source: &GroupHandle,
    quotients: &[Arc<dyn StabiliserQuotient>],
    cap: usize,
) -> Result<(GroupHandle, ImageHom)> {
    let mut group = ImageGroup {
        source: source.clone(),
        components: quotients.to_vec(),
        generators: Vec::new(),
        elements: None,
        index: HashMap::new(),
    };
    group.generators = source
        .generators()
        .iter()
        .map(|g| group.project(g))
        .collect();
    if quotients.iter().all(|q| q.quotient().order().is_some()) {
        let els = closure(
            group.identity(),
            &group.generators,
            |a, b| group.multiply(a, b),
            cap,
        )?;
        group.index = els
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i as u32))
            .collect();
        group.elements = Some(els);
    }
    let group = Arc::new(group);
    Ok((
        GroupHandle::Image(group.clone()),
        ImageHom { target: group },
    ))
}

impl ImageGroup {
    pub fn source(&self) -> &GroupHandle {
        &self.source
    }

    pub fn components(&self) -> &[Arc<dyn StabiliserQuotient>] {
        &self.components
    }

    pub fn project(&self, g: &GroupElem) -> GroupElem {
        GroupElem::Tuple(self.components.iter().map(|c| c.project(g)).collect())
    }

    pub fn identity(&self) -> GroupElem {
        GroupElem::Tuple(
            self.components
                .iter()
                .map(|c| c.quotient().identity())
                .collect(),
        )
    }

    pub fn multiply(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        match (a, b) {
            (GroupElem::Tuple(x), GroupElem::Tuple(y)) => GroupElem::Tuple(
                self.components
                    .iter()
                    .zip(x.iter().zip(y))
                    .map(|(c, (p, q))| c.quotient().multiply(p, q))
                    .collect(),
            ),
            _ => panic!("image group elements are tuples"),
        }
    }

    pub fn inverse(&self, a: &GroupElem) -> GroupElem {
        match a {
            GroupElem::Tuple(x) => GroupElem::Tuple(
                self.components
                    .iter()
                    .zip(x)
                    .map(|(c, p)| c.quotient().inverse(p))
                    .collect(),
            ),
            _ => panic!("image group elements are tuples"),
        }
    }

    pub fn generators(&self) -> &[GroupElem] {
        &self.generators
    }

    pub fn elements(&self) -> Option<&[GroupElem]> {
        self.elements.as_deref()
    }

    pub fn order(&self) -> Option<u64> {
        self.elements.as_ref().map(|e| e.len() as u64)
    }

    pub fn contains(&self, a: &GroupElem) -> bool {
        match (&self.elements, a) {
            (Some(_), a) => self.index.contains_key(a),
            (None, GroupElem::Tuple(t)) => {
                t.len() == self.components.len()
                    && t.iter()
                        .zip(&self.components)
                        .all(|(x, c)| c.quotient().contains(x))
            }
            _ => false,
        }
    }

    pub fn amenability(&self) -> Amenability {
        if self.elements.is_some() {
            return Amenability::Finite;
        }
        let statuses: Vec<Amenability> = self
            .components
            .iter()
            .map(|c| c.quotient().amenability())
            .collect();
        if statuses.contains(&Amenability::DeclaredNonAmenable) {
            Amenability::DeclaredNonAmenable
        } else if matches!(self.source, GroupHandle::Abelian(_))
            && statuses.iter().all(|s| s.is_capable())
        {
            Amenability::AmenableProvider
        } else {
            Amenability::Unknown
        }
    }

    pub fn describe(&self) -> String {
        let comps: Vec<String> = self
            .components
            .iter()
            .map(|c| c.quotient().describe())
            .collect();
        match self.order() {
            Some(n) => format!("image of order {n} in product of [{}]", comps.join("; ")),
            None => format!("infinite image in product of [{}]", comps.join("; ")),
        }
    }
}
