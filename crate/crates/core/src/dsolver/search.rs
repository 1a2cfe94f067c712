use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blocklinalg::numeric_jordan;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::representation::{fiber_residual, is_irreducible, moment_map, GraphRep};
use crate::scalar::Scalar;
use crate::stokes::{leg_witness, CLASS_TOL};

use super::DSInstance;

/// Success threshold on the relative fiber residual.
const ACCEPT: f64 = 1e-8;
/// Iterations stop once the residual norm is below this.
const POLISH: f64 = 1e-13;
const LAMBDA_INIT: f64 = 1e-3;
const LAMBDA_UP: f64 = 10.0;
const LAMBDA_DOWN: f64 = 0.3;
const LAMBDA_MAX: f64 = 1e12;
const FD_STEP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub restarts: usize,
    pub iterations: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { restarts: 8, iterations: 200 }
    }
}

/// Independent checks of a candidate solution.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessCheck {
    /// Fiber residual of the supernova representation built from the legs.
    pub fiber_residual: f64,
    pub irreducible: bool,
    /// Whether each core moment component has the target Jordan data.
    pub classes_ok: bool,
}

impl WitnessCheck {
    pub fn passes(&self) -> bool {
        self.fiber_residual < ACCEPT && self.irreducible && self.classes_ok
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// Representation of the core.
    pub core: GraphRep,
    /// The same point on the supernova graph.
    pub rep: GraphRep,
    pub check: WitnessCheck,
    pub restart: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Found(Box<Witness>),
    /// Budget exhausted; this is not a proof that no solution exists.
    NoneFound { best_residual: f64 },
}

impl SearchOutcome {
    pub fn residual(&self) -> f64 {
        match self {
            SearchOutcome::Found(w) => w.check.fiber_residual,
            SearchOutcome::NoneFound { best_residual } => *best_residual,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SearchOutcome::Found(_) => "witness",
            SearchOutcome::NoneFound { .. } => "none-found",
        }
    }
}

/// Extends a core representation along the legs: each leg is the standard
/// flag of images of `(g - xi_1)(g - xi_2)...` for the core moment `g`.
pub fn supernova_rep(inst: &DSInstance, core: &GraphRep) -> Result<GraphRep> {
    let sn = &inst.supernova;
    let info = sn.quiver.core().expect("supernova has a core");
    let mu = moment_map(core)?.mu;
    let dims: Vec<usize> = sn.dims.iter().map(|&d| d as usize).collect();
    let mut rep = GraphRep::zero(sn.quiver.clone(), dims)?;
    for (&(h, t), m) in core.maps() {
        rep.set_map(h, t, m.clone())?;
    }
    for (v, chain) in info.legs.iter().enumerate() {
        if chain.len() < 2 {
            continue;
        }
        let w = leg_witness(&mu[v], &inst.legs[v])?;
        for (k, (a, b)) in w.maps.into_iter().enumerate() {
            rep.set_map(chain[k], chain[k + 1], a)?;
            rep.set_map(chain[k + 1], chain[k], b)?;
        }
    }
    Ok(rep)
}

/// Recomputes the fiber residual, irreducibility and class membership of a core representation.
pub fn verify_witness(inst: &DSInstance, core: &GraphRep) -> Result<WitnessCheck> {
    let mu = moment_map(core)?.mu;
    let classes_ok = inst.classes.iter().zip(&mu).all(|(c, g)| {
        if c.n == 0 {
            return true;
        }
        let markers: Vec<Scalar> = c.eigen.iter().map(|(s, _)| s.clone()).collect();
        numeric_jordan(g, &markers, CLASS_TOL).is_ok_and(|found| found.same_as(c, 1e-6))
    });
    let rep = match supernova_rep(inst, core) {
        Ok(r) => r,
        Err(_) => return Ok(WitnessCheck { fiber_residual: f64::INFINITY, irreducible: false, classes_ok }),
    };
    Ok(WitnessCheck {
        fiber_residual: fiber_residual(&rep, inst.params())?,
        irreducible: is_irreducible(&rep),
        classes_ok,
    })
}

/// The residual `g_i(rho) - k_i J_i k_i^{-1}` over the core nodes, as a function
/// of the edge coordinates followed by the entries of every `k_i`.
struct Problem {
    template: GraphRep,
    jordan: Vec<CMat>,
    n_edges: usize,
}

impl Problem {
    fn new(inst: &DSInstance) -> Result<Self> {
        let template = GraphRep::zero(inst.core.clone(), inst.core_dims())?;
        let jordan = inst.classes.iter().map(|c| c.jordan_matrix()).collect();
        Ok(Problem { n_edges: template.coordinate_count(), template, jordan })
    }

    fn n_vars(&self) -> usize {
        self.n_edges + self.jordan.iter().map(|j| j.len()).sum::<usize>()
    }

    fn n_residuals(&self) -> usize {
        self.jordan.iter().map(|j| j.len()).sum()
    }

    fn core(&self, z: &[Complex64]) -> Result<GraphRep> {
        self.template.with_coordinates(&z[..self.n_edges])
    }

    fn eval(&self, z: &[Complex64]) -> Option<Vec<Complex64>> {
        let rep = self.core(z).ok()?;
        let mu = moment_map(&rep).ok()?.mu;
        let mut out = Vec::with_capacity(self.n_residuals());
        let mut o = self.n_edges;
        for (j, g) in self.jordan.iter().zip(&mu) {
            let n = j.nrows();
            if n == 0 {
                continue;
            }
            let k = CMat::from_column_slice(n, n, &z[o..o + n * n]);
            o += n * n;
            let kinv = k.clone().try_inverse()?;
            let diff = g - k * j * kinv;
            out.extend(diff.iter().copied());
        }
        out.iter().all(|x| x.is_finite()).then_some(out)
    }

    /// Central differences along real directions; the residual is holomorphic.
    fn jacobian(&self, z: &[Complex64]) -> Option<CMat> {
        let mut jac = CMat::zeros(self.n_residuals(), z.len());
        let mut zp = z.to_vec();
        for c in 0..z.len() {
            let h = FD_STEP * z[c].norm().max(1.0);
            zp[c] = z[c] + h;
            let fp = self.eval(&zp)?;
            zp[c] = z[c] - h;
            let fm = self.eval(&zp)?;
            zp[c] = z[c];
            for r in 0..fp.len() {
                jac[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        Some(jac)
    }

    fn initial<R: Rng>(&self, rng: &mut R) -> Vec<Complex64> {
        (0..self.n_vars()).map(|_| linalg::random_complex(rng)).collect()
    }

    /// Damped Gauss-Newton from `z`; returns the final point and residual norm.
    fn minimise(&self, mut z: Vec<Complex64>, iterations: usize) -> Option<(Vec<Complex64>, f64)> {
        let mut f = self.eval(&z)?;
        let mut norm = vec_norm(&f);
        let mut lambda = LAMBDA_INIT;
        for _ in 0..iterations {
            if norm < POLISH {
                break;
            }
            let Some(jac) = self.jacobian(&z) else { break };
            let jh = jac.adjoint();
            let normal = &jh * &jac;
            let grad = &jh * nalgebra::DVector::from_vec(f.clone());
            let mut improved = false;
            while lambda < LAMBDA_MAX {
                let damped = &normal + CMat::identity(z.len(), z.len()) * Complex64::new(lambda, 0.0);
                let step = damped.cholesky().map(|ch| ch.solve(&grad));
                if let Some(step) = step {
                    let trial: Vec<Complex64> = z.iter().zip(step.iter()).map(|(a, b)| a - b).collect();
                    if let Some(ft) = self.eval(&trial) {
                        let nt = vec_norm(&ft);
                        if nt < norm {
                            z = trial;
                            f = ft;
                            norm = nt;
                            lambda = (lambda * LAMBDA_DOWN).max(1e-15);
                            improved = true;
                            break;
                        }
                    }
                }
                lambda *= LAMBDA_UP;
            }
            if !improved {
                break;
            }
        }
        Some((z, norm))
    }
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Looks for an irreducible core representation whose moment components lie in
/// the target classes. Restarts are seeded in order from `seed`, so the result is
/// reproducible; the first restart that passes [`verify_witness`] wins.
pub fn ds_search(inst: &DSInstance, budget: SearchBudget, seed: u64) -> Result<SearchOutcome> {
    let problem = Problem::new(inst)?;
    if problem.n_vars() == 0 && problem.template.total_dim() == 0 {
        return Ok(SearchOutcome::NoneFound { best_residual: 0.0 });
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for restart in 0..budget.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(master.random());
        let z0 = problem.initial(&mut rng);
        let Some((z, _)) = problem.minimise(z0, budget.iterations) else {
            continue;
        };
        let core = problem.core(&z)?;
        let check = match verify_witness(inst, &core) {
            Ok(c) => c,
            Err(Error::NotInvertible { .. } | Error::Indeterminate(_)) => continue,
            Err(e) => return Err(e),
        };
        if check.passes() {
            let rep = supernova_rep(inst, &core)?;
            return Ok(SearchOutcome::Found(Box::new(Witness { core, rep, check, restart })));
        }
        best = best.min(check.fiber_residual);
    }
    Ok(SearchOutcome::NoneFound { best_residual: best })
}
