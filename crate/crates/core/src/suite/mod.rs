//! Randomised check suites over the block linear algebra, shared by the command
//! line and the integration tests. Each suite reports one [`Check`].

mod geometry;

pub use geometry::{jordan_suite, legs_suite, tame_suite, triangle_check};

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blocklinalg::{build_phi_chain, gauss_gram, ClassSpec, Partition};
use crate::error::{Error, Result};
use crate::field::{frobenius, random_qcomplex_matrix, Field, InvertBand, QComplex};
use crate::linalg;
use crate::scalar::Scalar;
use crate::stokes::{
    check_swap, check_two_form_identity, check_two_form_identity_exact, fuse, splay, DerivativeMode,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arithmetic {
    Float,
    Rational,
}

/// Outcome of a suite: the worst residual seen and whether every instance passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub instances: usize,
    /// Instances outside the domain of the construction (for example not in the big cell).
    pub skipped: usize,
    pub residual: f64,
    pub tol: f64,
    /// Instances that failed a discrete condition (class mismatch, wrong count, ...).
    pub failures: usize,
    pub pass: bool,
}

impl Check {
    fn finish(name: &str, instances: usize, skipped: usize, residual: f64, tol: f64, failures: usize) -> Self {
        let pass = residual <= tol && failures == 0 && skipped * 2 < instances.max(1);
        Check { name: name.to_string(), instances, skipped, residual, tol, failures, pass }
    }

    /// The same outcome judged against another residual tolerance.
    pub fn with_tol(self, tol: f64) -> Self {
        Check::finish(&self.name, self.instances, self.skipped, self.residual, tol, self.failures)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CHECK {} residual={:.3e} pass={}", self.name, self.residual, self.pass)
    }
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn random_grading<R: Rng>(rng: &mut R, max_blocks: usize, max_size: usize) -> Vec<usize> {
    let s = rng.random_range(1..=max_blocks);
    (0..s).map(|_| rng.random_range(1..=max_size)).collect()
}

fn skippable(e: &Error) -> bool {
    matches!(e, Error::NotInBigCell(_) | Error::Indeterminate(_) | Error::AmbiguousSpectrum(_))
}

/// Eigenvalues used for planted conjugacy classes.
pub fn eigenvalue_palette(with_one: bool) -> Vec<Scalar> {
    let mut p = vec![
        Scalar::int(2),
        Scalar::int(-1),
        Scalar::ratio(1, 2),
        "i".parse().expect("literal"),
        Scalar::int(3),
        "-3/2+1/2i".parse().expect("literal"),
    ];
    if with_one {
        p.insert(0, Scalar::one());
    }
    p
}

/// A random class of size `n` with eigenvalues from `palette` and blocks of size at most `max_block`.
pub fn random_class<R: Rng>(rng: &mut R, n: usize, palette: &[Scalar], max_block: usize) -> ClassSpec {
    let mut parts: Vec<(Scalar, Vec<usize>)> = Vec::new();
    let mut left = n;
    while left > 0 {
        let chunk = rng.random_range(1..=left);
        left -= chunk;
        let mut blocks = Vec::new();
        let mut c = chunk;
        while c > 0 {
            let b = rng.random_range(1..=c.min(max_block));
            blocks.push(b);
            c -= b;
        }
        let unused: Vec<&Scalar> = palette.iter().filter(|s| !parts.iter().any(|(t, _)| t == *s)).collect();
        if unused.is_empty() {
            let k = rng.random_range(0..parts.len());
            parts[k].1.extend(blocks);
        } else {
            let s = unused[rng.random_range(0..unused.len())].clone();
            parts.push((s, blocks));
        }
    }
    ClassSpec::new(
        parts
            .into_iter()
            .map(|(s, b)| (s, Partition::new(b).expect("positive parts")))
            .collect(),
    )
    .expect("distinct nonzero eigenvalues")
}

/// Residuals relative to the sizes of the factors in each identity.
fn gauss_instance<T: Field>(x: &DMatrix<T>, y: &DMatrix<T>, grading: &[usize]) -> Result<f64> {
    let band = InvertBand::default();
    let chain = build_phi_chain(x, y, grading, band)?;
    let gg = gauss_gram(&chain, band)?;
    let (r1, r2) = gg.residuals(x, y);
    let w = y.nrows();
    let a = frobenius(&(DMatrix::<T>::identity(w, w) + y * x));
    let (h, up, um) = (frobenius(&gg.h), frobenius(&gg.u_plus), frobenius(&gg.u_minus));
    let (vp, vm) = (frobenius(&gg.v_plus), frobenius(&gg.v_minus));
    let gauss_scale = (um * a).max(h * up).max(a * vp).max(vm * h).max(chain.scale());
    let t_scale: f64 = chain.t.iter().map(frobenius).product();
    let m_scale: f64 = chain.m.iter().map(frobenius).product();
    let product_scale = t_scale.max(m_scale).max(chain.scale());
    Ok((r1.max(r2) / gauss_scale).max(chain.product_residual() / product_scale))
}

/// Gauss/Gram decompositions and the factorisations of `phi_i` on random `(x, y)`
/// with `s <= 4` blocks of size at most 4 and `dim V <= 4`.
///
/// Each residual is divided by the product of the norms of the factors it
/// compares, so that it measures the normwise backward error.
pub fn gauss_suite(instances: usize, seed: u64, tol: f64, arithmetic: Arithmetic) -> Result<Check> {
    let mut rng = rng(seed);
    let mut worst: f64 = 0.0;
    let mut skipped = 0;
    for _ in 0..instances {
        let grading = random_grading(&mut rng, 4, 4);
        let w: usize = grading.iter().sum();
        let n = rng.random_range(1..=4);
        let r = match arithmetic {
            Arithmetic::Float => {
                let x = linalg::random_matrix(&mut rng, n, w);
                let y = linalg::random_matrix(&mut rng, w, n);
                gauss_instance(&x, &y, &grading)
            }
            Arithmetic::Rational => {
                let x = random_qcomplex_matrix(&mut rng, n, w);
                let y = random_qcomplex_matrix(&mut rng, w, n);
                gauss_instance(&x, &y, &grading)
            }
        };
        match r {
            Ok(v) => worst = worst.max(v),
            Err(e) if skippable(&e) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let tol = if arithmetic == Arithmetic::Rational { 0.0 } else { tol };
    Ok(Check::finish("gauss", instances, skipped, worst, tol, 0))
}

/// The two-form identity at random base points with two blocks of size at most 3.
///
/// Float mode reports the largest residual relative to the size of the forms;
/// rational mode counts samples where the exact sides differ. Both also require
/// the identity to hold exactly at the zero base point.
pub fn twoform_suite(points: usize, seed: u64, mode: DerivativeMode, arithmetic: Arithmetic) -> Result<Check> {
    let mut rng = rng(seed);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    let mut skipped = 0;
    for k in 0..points {
        let grading = vec![rng.random_range(1..=3), rng.random_range(1..=3)];
        let w: usize = grading.iter().sum();
        let n = rng.random_range(1..=3);
        let sub = seed.wrapping_add(k as u64);
        match arithmetic {
            Arithmetic::Float => {
                let x = linalg::random_matrix(&mut rng, n, w) * Complex64::new(0.5, 0.0);
                let y = linalg::random_matrix(&mut rng, w, n) * Complex64::new(0.5, 0.0);
                match check_two_form_identity(&x, &y, &grading, 2, mode, sub) {
                    Ok(r) => worst = worst.max(r.max_residual / r.max_value.max(1.0)),
                    Err(e) if skippable(&e) => skipped += 1,
                    Err(e) => return Err(e),
                }
            }
            Arithmetic::Rational => {
                let x = random_qcomplex_matrix(&mut rng, n, w);
                let y = random_qcomplex_matrix(&mut rng, w, n);
                match check_two_form_identity_exact(&x, &y, &grading, 2, sub) {
                    Ok(f) => failures += f,
                    Err(e) if skippable(&e) => skipped += 1,
                    Err(e) => return Err(e),
                }
            }
        }
    }
    let zero_x = DMatrix::<QComplex>::zeros(2, 3);
    let zero_y = DMatrix::<QComplex>::zeros(3, 2);
    failures += check_two_form_identity_exact(&zero_x, &zero_y, &[1, 2], 10, seed)?;
    let (name, tol) = match (arithmetic, mode) {
        (Arithmetic::Rational, _) => ("twoform-exact", 0.0),
        (_, DerivativeMode::Analytic) => ("twoform-analytic", 1e-9),
        (_, DerivativeMode::FiniteDifference) => ("twoform-fd", 1e-5),
    };
    Ok(Check::finish(name, points, skipped, worst, tol, failures))
}

/// `splay` followed by `fuse` on random `(x, y)` with `s <= 4` blocks of size at
/// most 3 and `dim V <= 3`, plus the braid move on a random adjacent pair.
pub fn splay_suite(instances: usize, seed: u64, tol: f64) -> Result<Check> {
    let band = InvertBand::default();
    let mut rng = rng(seed);
    let mut worst: f64 = 0.0;
    let mut skipped = 0;
    for _ in 0..instances {
        let grading = random_grading(&mut rng, 4, 3);
        let w: usize = grading.iter().sum();
        let n = rng.random_range(1..=3);
        let x = linalg::random_matrix(&mut rng, n, w) * Complex64::new(0.7, 0.0);
        let y = linalg::random_matrix(&mut rng, w, n) * Complex64::new(0.7, 0.0);
        let scale = frobenius(&x).max(frobenius(&y)).max(1.0);
        let pairs = match splay(&x, &y, &grading, band) {
            Ok(p) => p,
            Err(e) if skippable(&e) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let fused = match fuse(&pairs, band) {
            Ok(f) => f,
            Err(e) if skippable(&e) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let r = (frobenius(&(&fused.x - &x)).max(frobenius(&(&fused.y - &y))) / scale)
            .max(fused.product_residual() / scale.powi(2));
        worst = worst.max(r);
        if pairs.len() >= 2 {
            let i = rng.random_range(0..pairs.len() - 1);
            match check_swap(&pairs[i..i + 2], band) {
                Ok(s) => {
                    let m = scale.powi(2);
                    worst = worst
                        .max(s.product_residual / m)
                        .max(s.involution_residual)
                        .max(s.char_poly_distance);
                }
                Err(e) if skippable(&e) => skipped += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(Check::finish("splay", instances, skipped, worst, tol, 0))
}
