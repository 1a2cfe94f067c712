//! Conjugacy classes described by Jordan data.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::scalar::Scalar;

/// Jordan block sizes at one eigenvalue, weakly decreasing and positive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidInput("partition with a zero part".into()));
        }
        parts.sort_by(|a, b| b.cmp(a));
        Ok(Partition(parts))
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn largest(&self) -> usize {
        self.0.first().copied().unwrap_or(0)
    }

    /// Number of parts of size at least `k`.
    pub fn count_at_least(&self, k: usize) -> usize {
        self.0.iter().filter(|&&p| p >= k).count()
    }

    /// Removes the first column of the Young diagram.
    pub fn drop_first_column(&self) -> Partition {
        Partition(self.0.iter().filter(|&&p| p > 1).map(|p| p - 1).collect())
    }

    /// Builds a partition from the counts `c_k` of parts of size at least `k` (`k = 1, 2, ...`).
    pub fn from_counts(counts: &[usize]) -> Result<Self> {
        let mut parts = Vec::new();
        for (k, &c) in counts.iter().enumerate() {
            let next = counts.get(k + 1).copied().unwrap_or(0);
            if next > c {
                return Err(Error::EmptyClass(format!(
                    "block counts {counts:?} are not weakly decreasing"
                )));
            }
            parts.extend(std::iter::repeat_n(k + 1, c - next));
        }
        Partition::new(parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// A conjugacy class in `GL_n`: distinct nonzero eigenvalues with their Jordan partitions.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSpec {
    pub n: usize,
    pub eigen: Vec<(Scalar, Partition)>,
}

const SAME_EIGENVALUE: f64 = 1e-12;

impl ClassSpec {
    pub fn new(eigen: Vec<(Scalar, Partition)>) -> Result<Self> {
        for (k, (s, p)) in eigen.iter().enumerate() {
            if p.is_empty() {
                return Err(Error::InvalidInput(format!("empty partition at eigenvalue {s}")));
            }
            if s.to_c64().norm() == 0.0 {
                return Err(Error::InvalidInput("zero eigenvalue in an invertible class".into()));
            }
            if eigen[k + 1..].iter().any(|(t, _)| t.approx_eq(s, SAME_EIGENVALUE)) {
                return Err(Error::InvalidInput(format!("eigenvalue {s} listed twice")));
            }
        }
        let n = eigen.iter().map(|(_, p)| p.size()).sum();
        Ok(ClassSpec { n, eigen })
    }

    /// Semisimple class with the given eigenvalues (repeats allowed).
    pub fn semisimple(eigs: &[Scalar]) -> Result<Self> {
        let mut eigen: Vec<(Scalar, Vec<usize>)> = Vec::new();
        for s in eigs {
            match eigen.iter_mut().find(|(t, _)| t.approx_eq(s, SAME_EIGENVALUE)) {
                Some((_, p)) => p.push(1),
                None => eigen.push((s.clone(), vec![1])),
            }
        }
        Self::new(
            eigen
                .into_iter()
                .map(|(s, p)| Partition::new(p).map(|p| (s, p)))
                .collect::<Result<_>>()?,
        )
    }

    pub fn partition_at(&self, s: &Scalar, tol: f64) -> Option<&Partition> {
        self.eigen.iter().find(|(t, _)| t.approx_eq(s, tol)).map(|(_, p)| p)
    }

    pub fn inverse(&self) -> ClassSpec {
        ClassSpec {
            n: self.n,
            eigen: self
                .eigen
                .iter()
                .map(|(s, p)| (s.recip().expect("nonzero eigenvalue"), p.clone()))
                .collect(),
        }
    }

    pub fn scaled(&self, gamma: &Scalar) -> ClassSpec {
        ClassSpec {
            n: self.n,
            eigen: self.eigen.iter().map(|(s, p)| (s.mul(gamma), p.clone())).collect(),
        }
    }

    /// Product of eigenvalues with multiplicity.
    pub fn determinant(&self) -> Scalar {
        self.eigen.iter().fold(Scalar::one(), |acc, (s, p)| {
            acc.mul(&s.powi(p.size() as i64).expect("nonzero eigenvalue"))
        })
    }

    /// Each eigenvalue repeated by its largest block size: the shortest annihilating marking.
    pub fn minimal_marking(&self) -> Vec<Scalar> {
        self.eigen
            .iter()
            .flat_map(|(s, p)| std::iter::repeat_n(s.clone(), p.largest()))
            .collect()
    }

    /// A Jordan normal form representative.
    pub fn jordan_matrix(&self) -> CMat {
        let mut m = CMat::zeros(self.n, self.n);
        let mut o = 0;
        for (s, p) in &self.eigen {
            let z = s.to_c64();
            for &k in p.parts() {
                for i in 0..k {
                    m[(o + i, o + i)] = z;
                    if i + 1 < k {
                        m[(o + i, o + i + 1)] = Complex64::new(1.0, 0.0);
                    }
                }
                o += k;
            }
        }
        m
    }

    /// Equality up to ordering of eigenvalues; eigenvalues compared with `tol`.
    pub fn same_as(&self, other: &ClassSpec, tol: f64) -> bool {
        self.n == other.n
            && self.eigen.len() == other.eigen.len()
            && self
                .eigen
                .iter()
                .all(|(s, p)| other.partition_at(s, tol) == Some(p))
    }
}

impl fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.eigen.iter().map(|(s, p)| format!("{s}={p}")).collect();
        write!(f, "{}", items.join(" "))
    }
}

/// Jordan data of `1 + BA` from that of `1 + AB`, for `A` injective and `B` surjective.
///
/// Away from eigenvalue 1 nothing changes; at eigenvalue 1 every block shrinks by one.
pub fn jordan_child(parent: &ClassSpec) -> ClassSpec {
    let one = Scalar::one();
    let mut eigen = Vec::new();
    for (s, p) in &parent.eigen {
        if s.approx_eq(&one, SAME_EIGENVALUE) {
            let q = p.drop_first_column();
            if !q.is_empty() {
                eigen.push((s.clone(), q));
            }
        } else {
            eigen.push((s.clone(), p.clone()));
        }
    }
    let n = eigen.iter().map(|(_, p)| p.size()).sum();
    ClassSpec { n, eigen }
}

/// Largest distance (relative to the matrix scale) between a marker and the mean of
/// the eigenvalues identified with it.
pub const MARKER_SNAP: f64 = 1e-4;

/// Relative radius within which a single eigenvalue is tentatively attached to a marker.
///
/// Defective eigenvalues of block size `k` scatter like `eps^(1/k)`, so single
/// eigenvalues can sit far from their marker while the cluster mean stays close.
const MARKER_CAPTURE: f64 = 1e-2;

/// Recovers Jordan data numerically.
///
/// Each eigenvalue is attached to the nearest marker within the capture radius, and
/// the mean of each attached group must lie within [`MARKER_SNAP`] of its marker. The
/// remaining eigenvalues are clustered with radius `tol`. Partitions come from ranks
/// of `(M - s)^k`.
pub fn numeric_jordan(m: &CMat, markers: &[Scalar], tol: f64) -> Result<ClassSpec> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::DimensionMismatch("numeric_jordan needs a square matrix".into()));
    }
    if n == 0 {
        return Ok(ClassSpec { n: 0, eigen: Vec::new() });
    }
    let scale = linalg::norm(m).max(1.0);
    let eigs = linalg::eigenvalues(m);

    let mut distinct: Vec<&Scalar> = Vec::new();
    for mk in markers {
        if !distinct.iter().any(|d| d.approx_eq(mk, SAME_EIGENVALUE)) {
            distinct.push(mk);
        }
    }
    let mut capture = MARKER_CAPTURE * scale;
    for (i, a) in distinct.iter().enumerate() {
        for b in &distinct[..i] {
            capture = capture.min((a.to_c64() - b.to_c64()).norm() / 4.0);
        }
    }

    let mut attached: Vec<Vec<Complex64>> = vec![Vec::new(); distinct.len()];
    let mut loose: Vec<Complex64> = Vec::new();
    for &l in &eigs {
        let nearest = distinct
            .iter()
            .enumerate()
            .map(|(k, mk)| (k, (mk.to_c64() - l).norm()))
            .filter(|&(_, dist)| dist <= capture)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match nearest {
            Some((k, _)) => attached[k].push(l),
            None => loose.push(l),
        }
    }
    let mut centres: Vec<(Scalar, Complex64, usize)> = Vec::new();
    for (mk, group) in distinct.iter().zip(&attached) {
        if group.is_empty() {
            continue;
        }
        let mean = group.iter().sum::<Complex64>() / group.len() as f64;
        if (mean - mk.to_c64()).norm() > MARKER_SNAP * scale {
            return Err(Error::AmbiguousSpectrum(format!(
                "eigenvalues near the marker {mk} average to {mean}"
            )));
        }
        centres.push(((*mk).clone(), mk.to_c64(), group.len()));
    }

    // Single-linkage clustering of unmarked eigenvalues.
    let radius = tol * scale;
    let mut label: Vec<usize> = (0..loose.len()).collect();
    for i in 0..loose.len() {
        for j in 0..i {
            if (loose[i] - loose[j]).norm() <= radius {
                let (a, b) = (label[i], label[j]);
                for l in label.iter_mut() {
                    if *l == a {
                        *l = b;
                    }
                }
            }
        }
    }
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for (i, &l) in label.iter().enumerate() {
        match seen.iter().position(|&s| s == l) {
            Some(k) => groups[k].push(loose[i]),
            None => {
                seen.push(l);
                groups.push(vec![loose[i]]);
            }
        }
    }
    for g in groups {
        let mean = g.iter().sum::<Complex64>() / g.len() as f64;
        centres.push((Scalar::Float(mean), mean, g.len()));
    }

    for (i, a) in centres.iter().enumerate() {
        for b in &centres[..i] {
            if (a.1 - b.1).norm() <= 100.0 * radius {
                return Err(Error::AmbiguousSpectrum(format!(
                    "eigenvalue clusters at {} and {} are too close to separate",
                    a.1, b.1
                )));
            }
        }
    }

    let mut eigen = Vec::new();
    for (s, z, mult) in centres {
        let shifted = m - CMat::identity(n, n) * z;
        let mut power = CMat::identity(n, n);
        let mut ranks = vec![n];
        for k in 1..=mult {
            power = &shifted * &power;
            let thresh = 1e-9 * scale.powi(k as i32);
            ranks.push(linalg::rank_with(&power, 1.0, thresh));
        }
        let nullity = n - ranks[mult];
        if nullity != mult {
            return Err(Error::AmbiguousSpectrum(format!(
                "eigenvalue {z}: algebraic multiplicity {mult} but generalised kernel of dimension {nullity}"
            )));
        }
        let counts: Vec<usize> = (1..=mult).map(|k| ranks[k - 1] - ranks[k]).collect();
        let p = Partition::from_counts(&counts)
            .map_err(|_| Error::AmbiguousSpectrum(format!("inconsistent kernel growth at {z}")))?;
        eigen.push((s, p));
    }
    Ok(ClassSpec { n, eigen })
}
