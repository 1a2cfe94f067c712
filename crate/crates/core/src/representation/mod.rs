//! Representations of coloured quivers and their multiplicative moment map.

mod bigcell;
mod irreducible;
mod probe;
mod triangle;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::ColouredQuiver;
use crate::linalg::{self, CMat};
use crate::scalar::Scalar;

pub use bigcell::{
    assemble_unitriangular, big_cell_factor, fiber_residual, in_fiber, invertibility_minors, moment_map, BigCell,
    ColourLayout, Moment, DEFAULT_FIBER_TOL,
};
pub use irreducible::{is_irreducible, path_algebra_dimension};
pub use probe::{quotient_dimension_probe, ProbeResult};
pub use triangle::{triangle_invariants, TriangleInvariants};

/// A linear map `V_tail -> V_head` for every oriented edge of the quiver.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphRep {
    quiver: ColouredQuiver,
    dims: Vec<usize>,
    maps: BTreeMap<(usize, usize), CMat>,
}

impl GraphRep {
    pub fn new(quiver: ColouredQuiver, dims: Vec<usize>, maps: BTreeMap<(usize, usize), CMat>) -> Result<Self> {
        if dims.len() != quiver.num_nodes() {
            return Err(Error::DimensionMismatch(format!(
                "{} dimensions for {} nodes",
                dims.len(),
                quiver.num_nodes()
            )));
        }
        let oriented = quiver.oriented_edges();
        for &(h, t) in &oriented {
            let m = maps.get(&(h, t)).ok_or_else(|| {
                Error::DimensionMismatch(format!(
                    "missing map {} <- {}",
                    quiver.name(h),
                    quiver.name(t)
                ))
            })?;
            if m.shape() != (dims[h], dims[t]) {
                return Err(Error::DimensionMismatch(format!(
                    "map {} <- {} has shape {}x{}, expected {}x{}",
                    quiver.name(h),
                    quiver.name(t),
                    m.nrows(),
                    m.ncols(),
                    dims[h],
                    dims[t]
                )));
            }
        }
        if let Some(&(h, t)) = maps.keys().find(|k| !oriented.contains(k)) {
            return Err(Error::DimensionMismatch(format!("map {h} <- {t} is not an edge")));
        }
        Ok(GraphRep { quiver, dims, maps })
    }

    pub fn zero(quiver: ColouredQuiver, dims: Vec<usize>) -> Result<Self> {
        let maps = quiver
            .oriented_edges()
            .into_iter()
            .filter(|&(h, t)| h < dims.len() && t < dims.len())
            .map(|(h, t)| ((h, t), CMat::zeros(dims[h], dims[t])))
            .collect();
        Self::new(quiver, dims, maps)
    }

    /// Entries drawn as unit complex Gaussians scaled by `scale`.
    pub fn random<R: Rng + ?Sized>(quiver: ColouredQuiver, dims: Vec<usize>, scale: f64, rng: &mut R) -> Result<Self> {
        let mut rep = Self::zero(quiver, dims)?;
        for m in rep.maps.values_mut() {
            *m = linalg::random_matrix(rng, m.nrows(), m.ncols()) * Complex64::new(scale, 0.0);
        }
        Ok(rep)
    }

    pub fn quiver(&self) -> &ColouredQuiver {
        &self.quiver
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// The map `V_tail -> V_head`.
    pub fn map(&self, head: usize, tail: usize) -> Option<&CMat> {
        self.maps.get(&(head, tail))
    }

    pub fn set_map(&mut self, head: usize, tail: usize, m: CMat) -> Result<()> {
        match self.maps.get_mut(&(head, tail)) {
            None => Err(Error::DimensionMismatch(format!("{head} <- {tail} is not an edge"))),
            Some(slot) if slot.shape() != m.shape() => Err(Error::DimensionMismatch(format!(
                "map {head} <- {tail} must be {}x{}",
                slot.nrows(),
                slot.ncols()
            ))),
            Some(slot) => {
                *slot = m;
                Ok(())
            }
        }
    }

    pub fn maps(&self) -> impl Iterator<Item = (&(usize, usize), &CMat)> {
        self.maps.iter()
    }

    /// Number of complex coordinates.
    pub fn coordinate_count(&self) -> usize {
        self.maps.values().map(|m| m.len()).sum()
    }

    /// All map entries, maps in key order, each column-major.
    pub fn to_coordinates(&self) -> Vec<Complex64> {
        self.maps.values().flat_map(|m| m.iter().copied()).collect()
    }

    pub fn with_coordinates(&self, z: &[Complex64]) -> Result<Self> {
        if z.len() != self.coordinate_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for a representation with {}",
                z.len(),
                self.coordinate_count()
            )));
        }
        let mut out = self.clone();
        let mut o = 0;
        for m in out.maps.values_mut() {
            let k = m.len();
            m.copy_from_slice(&z[o..o + k]);
            o += k;
        }
        Ok(out)
    }

    /// The transposed representation: every map `V_t -> V_h` replaced by its transpose on the reversed edge.
    pub fn transpose(&self) -> Self {
        let maps = self.maps.iter().map(|(&(h, t), m)| ((t, h), m.transpose())).collect();
        GraphRep {
            quiver: self.quiver.clone(),
            dims: self.dims.clone(),
            maps,
        }
    }

    /// Text form: `map <head> <- <tail>` followed by one line per row.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (&(h, t), m) in &self.maps {
            let _ = writeln!(s, "map {} <- {}", self.quiver.name(h), self.quiver.name(t));
            if m.ncols() == 0 {
                continue;
            }
            for i in 0..m.nrows() {
                let row: Vec<String> = (0..m.ncols()).map(|j| Scalar::Float(m[(i, j)]).to_string()).collect();
                let _ = writeln!(s, "{}", row.join(" "));
            }
        }
        s
    }

    /// Parses the text form and validates shapes against `quiver` and `dims`.
    pub fn parse_text(text: &str, quiver: ColouredQuiver, dims: Vec<usize>) -> Result<Self> {
        let mut maps = BTreeMap::new();
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        let mut k = 0;
        let err = |line: usize, column: usize, message: String| Error::Parse { line, column, message };
        while k < lines.len() {
            let (ln, l) = lines[k];
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 4 || toks[0] != "map" || toks[2] != "<-" {
                return Err(err(ln, 1, "expected 'map <head> <- <tail>'".into()));
            }
            let h = quiver
                .index_of(toks[1])
                .ok_or_else(|| err(ln, l.find(toks[1]).unwrap() + 1, format!("unknown node '{}'", toks[1])))?;
            let t = quiver
                .index_of(toks[3])
                .ok_or_else(|| err(ln, l.rfind(toks[3]).unwrap() + 1, format!("unknown node '{}'", toks[3])))?;
            if h >= dims.len() || t >= dims.len() {
                return Err(Error::DimensionMismatch("dimension vector too short".into()));
            }
            let (rows, cols) = (dims[h], dims[t]);
            let mut m = CMat::zeros(rows, cols);
            k += 1;
            // Maps out of or into a zero space have no entries and no row lines.
            let rows = if cols == 0 { 0 } else { rows };
            for i in 0..rows {
                let Some(&(rl, row)) = lines.get(k) else {
                    return Err(err(ln, 1, format!("map {} <- {} needs {rows} rows", toks[1], toks[3])));
                };
                let entries: Vec<&str> = row.split_whitespace().collect();
                if entries.len() != cols {
                    return Err(err(rl, 1, format!("expected {cols} entries, found {}", entries.len())));
                }
                for (j, e) in entries.iter().enumerate() {
                    let v: Scalar = e
                        .parse()
                        .map_err(|msg: String| err(rl, row.find(e).unwrap_or(0) + 1, msg))?;
                    m[(i, j)] = v.to_c64();
                }
                k += 1;
            }
            if maps.insert((h, t), m).is_some() {
                return Err(err(ln, 1, format!("map {} <- {} given twice", toks[1], toks[3])));
            }
        }
        Self::new(quiver, dims, maps)
    }
}
