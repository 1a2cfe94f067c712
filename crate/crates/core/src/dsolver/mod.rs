//! Graphical Deligne-Simpson problems: given a conjugacy class at every node of a
//! complete multipartite core, is there an irreducible representation in the big
//! cell whose moment components lie in those classes?
//!
//! [`ds_criterion`] evaluates the root-theoretic prediction on the associated
//! supernova graph, [`ds_search`] looks for a witness numerically and
//! [`ds_cross_validate`] compares the two.

mod criterion;
mod crossval;
mod family;
mod search;

pub use criterion::{criterion, ds_criterion, Certificate, CriterionReport, Verdict};
pub use crossval::{ds_cross_validate, Agreement, CrossRow};
pub use family::exhaustive_family;
pub use search::{ds_search, supernova_rep, verify_witness, SearchBudget, SearchOutcome, Witness, WitnessCheck};

use crate::blocklinalg::ClassSpec;
use crate::error::{Error, Result};
use crate::graph::format::{spec_of, GraphSpec};
use crate::graph::{attach_legs, ColouredQuiver, Leg, Supernova};
use crate::scalar::Scalar;
use crate::stokes::{leg_class, marking_to_leg};

#[derive(Debug, Clone, PartialEq)]
pub struct DSInstance {
    pub id: String,
    pub core: ColouredQuiver,
    /// Target class of the moment component at each core node.
    pub classes: Vec<ClassSpec>,
    pub legs: Vec<Leg>,
    pub supernova: Supernova,
}

impl DSInstance {
    /// Legs come from the markings, or from the minimal marking of each class when none are given.
    pub fn new(
        id: impl Into<String>,
        core: ColouredQuiver,
        classes: Vec<ClassSpec>,
        markings: Option<Vec<Vec<Scalar>>>,
    ) -> Result<Self> {
        if classes.len() != core.num_nodes() {
            return Err(Error::DimensionMismatch(format!(
                "{} classes for {} core nodes",
                classes.len(),
                core.num_nodes()
            )));
        }
        let markings = match markings {
            Some(m) if m.len() != classes.len() => {
                return Err(Error::DimensionMismatch("one marking per core node expected".into()))
            }
            Some(m) => m,
            None => classes
                .iter()
                .map(|c| if c.n == 0 { vec![Scalar::one()] } else { c.minimal_marking() })
                .collect(),
        };
        let legs = classes
            .iter()
            .zip(&markings)
            .map(|(c, m)| marking_to_leg(c, m))
            .collect::<Result<Vec<_>>>()?;
        let supernova = attach_legs(&core, &legs)?;
        Ok(DSInstance { id: id.into(), core, classes, legs, supernova })
    }

    /// Classes are read off the legs; a leg describing an empty class is an error.
    pub fn from_legs(id: impl Into<String>, core: ColouredQuiver, legs: Vec<Leg>) -> Result<Self> {
        let classes = legs.iter().map(leg_class).collect::<Result<Vec<_>>>()?;
        let supernova = attach_legs(&core, &legs)?;
        Ok(DSInstance { id: id.into(), core, classes, legs, supernova })
    }

    pub fn from_spec(id: impl Into<String>, spec: &GraphSpec) -> Result<Self> {
        let core = spec.core_quiver()?;
        let legs = spec.legs_for(&core)?;
        Self::from_legs(id, core, legs)
    }

    /// A document that rebuilds this instance.
    pub fn to_spec(&self) -> GraphSpec {
        let mut spec = spec_of(&self.core);
        spec.legs = (0..self.core.num_nodes())
            .map(|v| (self.core.name(v).to_string(), self.legs[v].clone()))
            .collect();
        spec
    }

    pub fn core_dims(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.n).collect()
    }

    pub fn quiver(&self) -> &ColouredQuiver {
        &self.supernova.quiver
    }

    pub fn params(&self) -> &[Scalar] {
        &self.supernova.params
    }

    pub fn dims(&self) -> &[i64] {
        &self.supernova.dims
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocklinalg::Partition;

    #[test]
    fn classes_and_legs_agree() {
        let core = ColouredQuiver::complete_multipartite(&[1, 1]).unwrap();
        let classes = vec![
            ClassSpec::new(vec![(Scalar::int(2), Partition::new(vec![2]).unwrap())]).unwrap(),
            ClassSpec::semisimple(&[Scalar::int(3), Scalar::int(5)]).unwrap(),
        ];
        let inst = DSInstance::new("a", core.clone(), classes.clone(), None).unwrap();
        assert_eq!(inst.dims(), &[2, 2, 1, 1]);
        let again = DSInstance::from_legs("a", core, inst.legs.clone()).unwrap();
        assert!(again.classes.iter().zip(&classes).all(|(x, y)| x.same_as(y, 1e-12)));
        let text = inst.to_spec().to_text();
        let parsed = DSInstance::from_spec("a", &text.parse().unwrap()).unwrap();
        assert_eq!(parsed.supernova, inst.supernova);
    }

    #[test]
    fn empty_class_node() {
        let core = ColouredQuiver::complete_multipartite(&[1, 1]).unwrap();
        let classes = vec![ClassSpec::new(vec![]).unwrap(), ClassSpec::semisimple(&[Scalar::int(1)]).unwrap()];
        let inst = DSInstance::new("b", core, classes, None).unwrap();
        assert_eq!(inst.dims(), &[0, 1]);
        assert_eq!(inst.core_dims(), vec![0, 1]);
    }
}
