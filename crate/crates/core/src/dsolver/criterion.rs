use std::fmt;

use crate::error::Result;
use crate::graph::ColouredQuiver;
use crate::kacmoody::{self, RootVector};
use crate::scalar::Scalar;

use super::DSInstance;

/// Float parameters with `|q^d - 1|` above this are treated as certainly different from 1.
const FLOAT_SEPARATION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Solvable,
    Unsolvable,
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Solvable => "predicted-solvable",
            Verdict::Unsolvable => "predicted-unsolvable",
            Verdict::Undecided => "undecided",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// `d` is not a positive root.
    NotPositiveRoot,
    /// `q^d` differs from 1.
    ParamPower(Scalar),
    /// A decomposition into positive roots `b_k` with `q^{b_k} = 1` and
    /// `sum Delta(b_k) >= Delta(d)`.
    Decomposition { parts: Vec<RootVector>, total: i64 },
    /// No decomposition reaches `Delta(d)`.
    NoViolation,
    /// Parameters are floats, so `q^b = 1` cannot be decided.
    FloatParameters,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::NotPositiveRoot => f.write_str("d is not a positive root"),
            Certificate::ParamPower(p) => write!(f, "q^d={p}, not 1"),
            Certificate::Decomposition { parts, total } => {
                let ps: Vec<String> = parts.iter().map(|p| format!("{p:?}")).collect();
                write!(f, "d={} with Delta sum {total}", ps.join("+"))
            }
            Certificate::NoViolation => f.write_str("no violating decomposition"),
            Certificate::FloatParameters => f.write_str("float parameters"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub verdict: Verdict,
    pub certificate: Certificate,
    /// `Delta(d) = 2 - (d, d)`.
    pub delta: i64,
}

pub fn ds_criterion(inst: &DSInstance) -> Result<CriterionReport> {
    criterion(inst.quiver(), inst.params(), inst.dims())
}

/// Root-theoretic prediction for `(q, d)` on a graph: `d` a positive root,
/// `q^d = 1`, and `Delta(d) > sum Delta(b_k)` for every decomposition
/// `d = b_1 + b_2 + ...` into at least two positive roots with `q^{b_k} = 1`.
pub fn criterion(quiver: &ColouredQuiver, params: &[Scalar], dims: &[i64]) -> Result<CriterionReport> {
    let delta = kacmoody::expected_dimension(quiver, dims)?;
    let report = |verdict, certificate| Ok(CriterionReport { verdict, certificate, delta });
    if !kacmoody::is_positive_root(quiver, dims)? {
        return report(Verdict::Unsolvable, Certificate::NotPositiveRoot);
    }
    let power = kacmoody::param_power(params, dims)?;
    if params.iter().all(Scalar::is_exact) {
        if !power.is_one(0.0) {
            return report(Verdict::Unsolvable, Certificate::ParamPower(power));
        }
    } else {
        return if (power.to_c64() - 1.0).norm() > FLOAT_SEPARATION {
            report(Verdict::Unsolvable, Certificate::ParamPower(power))
        } else {
            report(Verdict::Undecided, Certificate::FloatParameters)
        };
    }
    match best_decomposition(quiver, params, dims)? {
        Some((total, parts)) if total >= delta => {
            report(Verdict::Unsolvable, Certificate::Decomposition { parts, total })
        }
        _ => report(Verdict::Solvable, Certificate::NoViolation),
    }
}

/// Largest `sum Delta(b_k)` over decompositions of `d` into positive roots
/// `b_k != d` with `q^{b_k} = 1`, by dynamic programming over the box `0 <= v <= d`.
fn best_decomposition(
    quiver: &ColouredQuiver,
    params: &[Scalar],
    d: &[i64],
) -> Result<Option<(i64, Vec<RootVector>)>> {
    let n = d.len();
    let radix: Vec<usize> = d.iter().map(|&x| x as usize + 1).collect();
    let size: usize = radix.iter().product();
    let encode = |v: &[i64]| v.iter().zip(&radix).rev().fold(0usize, |acc, (&x, &r)| acc * r + x as usize);
    let decode = |mut k: usize| {
        let mut v = vec![0i64; n];
        for (x, &r) in v.iter_mut().zip(&radix) {
            *x = (k % r) as i64;
            k /= r;
        }
        v
    };

    let mut candidates: Vec<(RootVector, usize, i64)> = Vec::new();
    for k in 1..size {
        let v = decode(k);
        if v.as_slice() == d {
            continue;
        }
        if kacmoody::is_positive_root(quiver, &v)? && kacmoody::param_power(params, &v)?.is_one(0.0) {
            let delta = kacmoody::expected_dimension(quiver, &v)?;
            candidates.push((v, k, delta));
        }
    }

    // best[k]: optimum for the vector with code k, with the root used last.
    let mut best: Vec<Option<(i64, usize)>> = vec![None; size];
    best[0] = Some((0, usize::MAX));
    for k in 1..size {
        let v = decode(k);
        let mut choice: Option<(i64, usize)> = None;
        for (ci, (b, code, delta)) in candidates.iter().enumerate() {
            if b.iter().zip(&v).any(|(x, y)| x > y) {
                continue;
            }
            if let Some((rest, _)) = best[k - code] {
                let total = rest + delta;
                if choice.is_none_or(|(t, _)| total > t) {
                    choice = Some((total, ci));
                }
            }
        }
        best[k] = choice;
    }
    let target = encode(d);
    let Some((total, _)) = best[target] else {
        return Ok(None);
    };
    let mut parts = Vec::new();
    let mut k = target;
    while k != 0 {
        let (_, ci) = best[k].expect("reachable");
        parts.push(candidates[ci].0.clone());
        k -= candidates[ci].1;
    }
    Ok(Some((total, parts)))
}
