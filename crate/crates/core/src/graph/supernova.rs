use super::{Colour, ColourClass, ColouredQuiver, CoreInfo};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A type-A chain attached to a core node. The first entries belong to the core node itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Leg {
    pub dims: Vec<i64>,
    pub params: Vec<Scalar>,
}

impl Leg {
    pub fn new(dims: Vec<i64>, params: Vec<Scalar>) -> Result<Self> {
        let leg = Leg { dims, params };
        leg.validate()?;
        Ok(leg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::InvalidInput("leg must contain its core node".into()));
        }
        if self.dims.len() != self.params.len() {
            return Err(Error::DimensionMismatch(format!(
                "leg has {} dimensions but {} parameters",
                self.dims.len(),
                self.params.len()
            )));
        }
        if let Some(d) = self.dims.iter().find(|&&d| d < 0) {
            return Err(Error::InvalidInput(format!("negative leg dimension {d}")));
        }
        Ok(())
    }

    /// Number of nodes including the core node.
    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }
}

/// A supernova graph together with its assembled dimension vector and parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Supernova {
    pub quiver: ColouredQuiver,
    pub dims: Vec<i64>,
    pub params: Vec<Scalar>,
}

/// Glues a leg onto every node of `core`.
///
/// The core must either be a single complete multipartite colour class or a set of
/// isolated nodes recorded with a one-part core. Core nodes keep their indices; leg
/// nodes follow, leg by leg. The node `v` at distance `k` along its leg is named
/// `v.k` (with the core node at `k = 1`). Every leg edge receives a fresh colour.
pub fn attach_legs(core: &ColouredQuiver, legs: &[Leg]) -> Result<Supernova> {
    let n_core = core.num_nodes();
    if legs.len() != n_core {
        return Err(Error::DimensionMismatch(format!(
            "{} legs for {n_core} core nodes",
            legs.len()
        )));
    }
    for leg in legs {
        leg.validate()?;
    }
    let (core_colour, core_parts) = match (core.core(), core.colours()) {
        (Some(info), _) => (info.colour, info.parts.clone()),
        (None, []) => (None, vec![(0..n_core).collect()]),
        (None, [class]) => (Some(class.colour), class.parts.clone()),
        (None, _) => {
            return Err(Error::InvalidGraph(
                "core of a supernova must carry a single colour".into(),
            ))
        }
    };
    if core.colours().len() > 1 {
        return Err(Error::InvalidGraph(
            "core of a supernova must carry a single colour".into(),
        ));
    }

    let mut names: Vec<String> = core.names().to_vec();
    let mut classes: Vec<ColourClass> = core.colours().to_vec();
    let mut next_colour: Colour = core_colour.map_or(0, |c| c + 1);
    let mut chains = Vec::with_capacity(n_core);
    let mut dims = vec![0i64; n_core];
    let mut params = vec![Scalar::one(); n_core];
    let mut leg_dims = Vec::new();
    let mut leg_params = Vec::new();

    for (v, leg) in legs.iter().enumerate() {
        dims[v] = leg.dims[0];
        params[v] = leg.params[0].clone();
        let mut chain = vec![v];
        for k in 1..leg.len() {
            let idx = names.len();
            names.push(format!("{}.{}", core.name(v), k + 1));
            let prev = *chain.last().unwrap();
            classes.push(ColourClass {
                colour: next_colour,
                parts: vec![vec![prev], vec![idx]],
            });
            next_colour += 1;
            chain.push(idx);
            leg_dims.push(leg.dims[k]);
            leg_params.push(leg.params[k].clone());
        }
        chains.push(chain);
    }
    dims.extend(leg_dims);
    params.extend(leg_params);

    // Colour order at each node: inward colour first, then outward.
    let mut orders: Vec<Vec<Colour>> = vec![Vec::new(); names.len()];
    for (i, order) in orders.iter_mut().enumerate().take(n_core) {
        if let Some(c) = core_colour {
            if core.colour_class(c).is_some_and(|k| k.contains(i)) {
                order.push(c);
            }
        }
    }
    for class in classes.iter().skip(core.colours().len()) {
        orders[class.parts[0][0]].push(class.colour);
        orders[class.parts[1][0]].push(class.colour);
    }

    let mut quiver = ColouredQuiver::new(names, classes, Some(orders))?;
    quiver.set_core(CoreInfo {
        colour: core_colour,
        parts: core_parts,
        legs: chains,
    });
    Ok(Supernova { quiver, dims, params })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leg(dims: &[i64]) -> Leg {
        Leg::new(dims.to_vec(), vec![Scalar::int(2); dims.len()]).unwrap()
    }

    #[test]
    fn interval_with_two_legs_is_a5() {
        let core = ColouredQuiver::complete_multipartite(&[1, 1]).unwrap();
        let sn = attach_legs(&core, &[leg(&[1, 1]), leg(&[1, 1, 1])]).unwrap();
        let q = &sn.quiver;
        assert_eq!(q.num_nodes(), 5);
        assert_eq!(q.edges().len(), 4);
        let degrees: Vec<usize> = (0..5).map(|i| q.neighbours(i).len()).collect();
        assert_eq!(degrees.iter().filter(|&&d| d == 1).count(), 2);
        assert_eq!(degrees.iter().filter(|&&d| d == 2).count(), 3);
        assert!(q.is_connected_on(&[0, 1, 2, 3, 4]));
        assert_eq!(q.name(4), "n2_1.3");
        assert_eq!(sn.dims, vec![1, 1, 1, 1, 1]);
    }

    #[test]
    fn legs_get_fresh_colours() {
        let core = ColouredQuiver::complete_multipartite(&[1, 2]).unwrap();
        let sn = attach_legs(&core, &[leg(&[2, 1]), leg(&[1]), leg(&[1, 1, 1])]).unwrap();
        let q = &sn.quiver;
        assert_eq!(q.colours().len(), 1 + 1 + 2);
        assert_eq!(q.node_colour_order(0), &[0, 1]);
        let info = q.core().unwrap();
        assert_eq!(info.legs[2].len(), 3);
        assert_eq!(info.parts, vec![vec![0], vec![1, 2]]);
    }

    #[test]
    fn rejects_wrong_leg_count() {
        let core = ColouredQuiver::complete_multipartite(&[1, 1]).unwrap();
        assert!(attach_legs(&core, &[leg(&[1])]).is_err());
    }
}
