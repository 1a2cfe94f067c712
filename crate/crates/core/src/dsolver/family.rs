use crate::error::Result;
use crate::graph::{ColouredQuiver, Leg};
use crate::kacmoody;
use crate::scalar::Scalar;

use super::DSInstance;

fn base_values() -> Vec<Scalar> {
    vec![Scalar::int(2), Scalar::ratio(-1, 3), Scalar::ratio(3, 2), Scalar::int(-2)]
}

fn vectors_up_to(n: usize, max_total: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for v in &out {
            let used: i64 = v.iter().sum();
            for k in 0..=max_total - used {
                let mut w = v.clone();
                w.push(k);
                next.push(w);
            }
        }
        out = next;
    }
    out.retain(|v| v.iter().any(|&x| x != 0));
    out
}

/// Parameter choices for `d`: all ones, rational values adjusted so that
/// `q^d = 1`, and the same values left unadjusted (so that `q^d != 1`).
fn param_choices(d: &[i64]) -> Result<Vec<Vec<Scalar>>> {
    let base = base_values();
    let mut generic: Vec<Scalar> = (0..d.len()).map(|i| base[i % base.len()].clone()).collect();
    let mut out = vec![vec![Scalar::one(); d.len()], generic.clone()];
    let power = kacmoody::param_power(&generic, d)?;
    if let Some(j) = d.iter().position(|&x| x == 1) {
        generic[j] = generic[j].mul(&power.recip().expect("nonzero"));
        out.push(generic);
    } else if let Some(j) = d.iter().position(|&x| x == 2) {
        if d.iter().enumerate().all(|(i, &x)| i == j || x == 0) {
            generic[j] = Scalar::int(-1);
            out.push(generic);
        }
    }
    out.dedup();
    Ok(out)
}

/// Every `d` with `sum d_i <= max_total` on `core`, each with the parameter
/// choices above, as instances with length-one legs.
pub fn exhaustive_family(name: &str, core: &ColouredQuiver, max_total: i64) -> Result<Vec<DSInstance>> {
    let mut family = Vec::new();
    for d in vectors_up_to(core.num_nodes(), max_total) {
        for (k, q) in param_choices(&d)?.into_iter().enumerate() {
            let legs = d
                .iter()
                .zip(&q)
                .map(|(&di, qi)| Leg::new(vec![di], vec![qi.clone()]))
                .collect::<Result<Vec<_>>>()?;
            let id = format!("{name}-{}-q{k}", d.iter().map(i64::to_string).collect::<Vec<_>>().join(""));
            family.push(DSInstance::from_legs(id, core.clone(), legs)?);
        }
    }
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_family_shape() {
        let core = ColouredQuiver::complete_multipartite(&[1, 1]).unwrap();
        let fam = exhaustive_family("interval", &core, 3).unwrap();
        assert_eq!(vectors_up_to(2, 3).len(), 9);
        for inst in &fam {
            assert!(inst.dims().iter().sum::<i64>() <= 3);
        }
        let adjusted = fam.iter().find(|i| i.id == "interval-11-q2").unwrap();
        assert!(kacmoody::param_power(adjusted.params(), adjusted.dims()).unwrap().is_one(0.0));
    }
}
