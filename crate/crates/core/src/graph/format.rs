//! Text format for coloured quivers, supernova legs and the data living on them.
//!
//! A document is a sequence of sections. Blank lines and `#` comments are ignored.
//!
//! ```text
//! [nodes]
//! a b c
//! [colours]
//! 0: a | b c          # ordered parts separated by '|'
//! [order]
//! a: 0                # colour order at a node (defaults to increasing)
//! [irregular]
//! a=0 t=1 dim=1       # one simultaneous eigenspace per line, replaces [nodes]/[colours]
//! [legs]
//! a: dims 2 1 ; params 2 3/2
//! [classes]
//! b: 2=(2,1) -1/3=(1)
//! [markings]
//! b: 2 -1/3 2
//! [dims]
//! a=2 b=1
//! [params]
//! a=2 b=1/2
//! ```
//!
//! When legs, or classes with markings, are present the quiver is the supernova
//! graph obtained by attaching a leg to every core node.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::{attach_legs, fission_graph, Colour, ColourClass, ColouredQuiver, IrregularType, Leg};
use crate::blocklinalg::{ClassSpec, Partition};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stokes::marking_to_leg;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GraphSpec {
    pub nodes: Vec<String>,
    pub colours: Vec<(Colour, Vec<Vec<String>>)>,
    pub order: Vec<(String, Vec<Colour>)>,
    /// `(a, t, dim)` per simultaneous eigenspace.
    pub irregular: Vec<(Scalar, Scalar, usize)>,
    pub legs: Vec<(String, Leg)>,
    pub classes: Vec<(String, ClassSpec)>,
    pub markings: Vec<(String, Vec<Scalar>)>,
    pub dims: Vec<(String, i64)>,
    pub params: Vec<(String, Scalar)>,
}

/// The quiver described by a document together with its dimension vector and parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltGraph {
    pub quiver: ColouredQuiver,
    pub dims: Vec<i64>,
    pub params: Vec<Scalar>,
    pub is_supernova: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Nodes,
    Colours,
    Order,
    Irregular,
    Legs,
    Classes,
    Markings,
    Dims,
    Params,
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

/// Tokens of a line with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn scalar(tok: &str, line: usize, col: usize) -> Result<Scalar> {
    tok.parse::<Scalar>().map_err(|m| perr(line, col, m))
}

fn integer<T: std::str::FromStr>(tok: &str, line: usize, col: usize) -> Result<T> {
    tok.parse::<T>().map_err(|_| perr(line, col, format!("expected an integer, found '{tok}'")))
}

/// Splits `head: rest` returning the head and the column where `rest` starts.
fn split_head(line: &str, ln: usize) -> Result<(&str, &str, usize)> {
    let k = line.find(':').ok_or_else(|| perr(ln, 1, "expected '<name>: ...'"))?;
    Ok((line[..k].trim(), &line[k + 1..], k + 2))
}

fn shifted(toks: Vec<(usize, &str)>, by: usize) -> Vec<(usize, &str)> {
    toks.into_iter().map(|(c, t)| (c + by - 1, t)).collect()
}

fn parse_assignments(rest: &str, ln: usize, offset: usize) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (col, tok) in shifted(tokens(rest), offset) {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| perr(ln, col, format!("expected 'key=value', found '{tok}'")))?;
        out.push((col, k.to_string(), v.to_string()));
    }
    Ok(out)
}

fn parse_class(rest: &str, ln: usize, offset: usize) -> Result<ClassSpec> {
    let mut eigen = Vec::new();
    for (col, tok) in shifted(tokens(rest), offset) {
        let (s, p) = tok
            .split_once("=(")
            .ok_or_else(|| perr(ln, col, format!("expected 'eigenvalue=(parts)', found '{tok}'")))?;
        let p = p
            .strip_suffix(')')
            .ok_or_else(|| perr(ln, col, "partition must end with ')'"))?;
        let parts = p
            .split(',')
            .map(|x| integer::<usize>(x.trim(), ln, col))
            .collect::<Result<Vec<_>>>()?;
        let part = Partition::new(parts).map_err(|e| perr(ln, col, e.to_string()))?;
        eigen.push((scalar(s, ln, col)?, part));
    }
    ClassSpec::new(eigen).map_err(|e| perr(ln, offset, e.to_string()))
}

impl GraphSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = GraphSpec::default();
        let mut section: Option<Section> = None;
        for (k, raw) in text.lines().enumerate() {
            let ln = k + 1;
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let trimmed = line.trim();
            if trimmed.starts_with('[') {
                let name = trimmed
                    .strip_prefix('[')
                    .and_then(|s| s.strip_suffix(']'))
                    .ok_or_else(|| perr(ln, 1, "malformed section header"))?;
                section = Some(match name {
                    "nodes" => Section::Nodes,
                    "colours" | "colors" => Section::Colours,
                    "order" => Section::Order,
                    "irregular" => Section::Irregular,
                    "legs" => Section::Legs,
                    "classes" => Section::Classes,
                    "markings" => Section::Markings,
                    "dims" => Section::Dims,
                    "params" => Section::Params,
                    other => return Err(perr(ln, 2, format!("unknown section '{other}'"))),
                });
                continue;
            }
            let Some(sec) = section else {
                return Err(perr(ln, 1, "content before the first section header"));
            };
            match sec {
                Section::Nodes => spec.nodes.extend(tokens(line).into_iter().map(|(_, t)| t.to_string())),
                Section::Colours => {
                    let (head, rest, off) = split_head(line, ln)?;
                    let colour = integer::<Colour>(head, ln, 1)?;
                    let parts: Vec<Vec<String>> = rest
                        .split('|')
                        .map(|p| p.split_whitespace().map(str::to_string).collect())
                        .collect();
                    if parts.iter().any(|p: &Vec<String>| p.is_empty()) {
                        return Err(perr(ln, off, "empty part in colour class"));
                    }
                    spec.colours.push((colour, parts));
                }
                Section::Order => {
                    let (head, rest, off) = split_head(line, ln)?;
                    let cols = shifted(tokens(rest), off)
                        .into_iter()
                        .map(|(c, t)| integer::<Colour>(t, ln, c))
                        .collect::<Result<Vec<_>>>()?;
                    spec.order.push((head.to_string(), cols));
                }
                Section::Irregular => {
                    let mut a = None;
                    let mut t = None;
                    let mut dim = None;
                    for (col, key, val) in parse_assignments(line, ln, 1)? {
                        match key.as_str() {
                            "a" => a = Some(scalar(&val, ln, col)?),
                            "t" => t = Some(scalar(&val, ln, col)?),
                            "dim" => dim = Some(integer::<usize>(&val, ln, col)?),
                            other => return Err(perr(ln, col, format!("unknown key '{other}'"))),
                        }
                    }
                    match (a, t, dim) {
                        (Some(a), Some(t), Some(d)) => spec.irregular.push((a, t, d)),
                        _ => return Err(perr(ln, 1, "irregular line needs a=, t= and dim=")),
                    }
                }
                Section::Legs => {
                    let (head, rest, off) = split_head(line, ln)?;
                    let (d_part, p_part) = rest
                        .split_once(';')
                        .ok_or_else(|| perr(ln, off, "expected 'dims ... ; params ...'"))?;
                    let p_off = off + d_part.len() + 1;
                    let d_toks = shifted(tokens(d_part), off);
                    let p_toks = shifted(tokens(p_part), p_off);
                    if d_toks.first().map(|t| t.1) != Some("dims") {
                        return Err(perr(ln, off, "leg must start with 'dims'"));
                    }
                    if p_toks.first().map(|t| t.1) != Some("params") {
                        return Err(perr(ln, p_off, "expected 'params' after ';'"));
                    }
                    let dims = d_toks[1..]
                        .iter()
                        .map(|&(c, t)| integer::<i64>(t, ln, c))
                        .collect::<Result<Vec<_>>>()?;
                    let params = p_toks[1..]
                        .iter()
                        .map(|&(c, t)| scalar(t, ln, c))
                        .collect::<Result<Vec<_>>>()?;
                    let leg = Leg::new(dims, params).map_err(|e| perr(ln, off, e.to_string()))?;
                    spec.legs.push((head.to_string(), leg));
                }
                Section::Classes => {
                    let (head, rest, off) = split_head(line, ln)?;
                    spec.classes.push((head.to_string(), parse_class(rest, ln, off)?));
                }
                Section::Markings => {
                    let (head, rest, off) = split_head(line, ln)?;
                    let m = shifted(tokens(rest), off)
                        .into_iter()
                        .map(|(c, t)| scalar(t, ln, c))
                        .collect::<Result<Vec<_>>>()?;
                    spec.markings.push((head.to_string(), m));
                }
                Section::Dims => {
                    for (col, key, val) in parse_assignments(line, ln, 1)? {
                        spec.dims.push((key, integer::<i64>(&val, ln, col)?));
                    }
                }
                Section::Params => {
                    for (col, key, val) in parse_assignments(line, ln, 1)? {
                        spec.params.push((key, scalar(&val, ln, col)?));
                    }
                }
            }
        }
        Ok(spec)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let join = |v: &[Scalar]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        if !self.nodes.is_empty() {
            let _ = writeln!(s, "[nodes]\n{}", self.nodes.join(" "));
        }
        if !self.colours.is_empty() {
            let _ = writeln!(s, "[colours]");
            for (c, parts) in &self.colours {
                let ps: Vec<String> = parts.iter().map(|p| p.join(" ")).collect();
                let _ = writeln!(s, "{c}: {}", ps.join(" | "));
            }
        }
        if !self.order.is_empty() {
            let _ = writeln!(s, "[order]");
            for (n, cols) in &self.order {
                let cs: Vec<String> = cols.iter().map(|c| c.to_string()).collect();
                let _ = writeln!(s, "{n}: {}", cs.join(" "));
            }
        }
        if !self.irregular.is_empty() {
            let _ = writeln!(s, "[irregular]");
            for (a, t, d) in &self.irregular {
                let _ = writeln!(s, "a={a} t={t} dim={d}");
            }
        }
        if !self.legs.is_empty() {
            let _ = writeln!(s, "[legs]");
            for (n, leg) in &self.legs {
                let ds: Vec<String> = leg.dims.iter().map(|d| d.to_string()).collect();
                let _ = writeln!(s, "{n}: dims {} ; params {}", ds.join(" "), join(&leg.params));
            }
        }
        if !self.classes.is_empty() {
            let _ = writeln!(s, "[classes]");
            for (n, c) in &self.classes {
                let _ = writeln!(s, "{n}: {c}");
            }
        }
        if !self.markings.is_empty() {
            let _ = writeln!(s, "[markings]");
            for (n, m) in &self.markings {
                let _ = writeln!(s, "{n}: {}", join(m));
            }
        }
        if !self.dims.is_empty() {
            let _ = writeln!(s, "[dims]");
            let items: Vec<String> = self.dims.iter().map(|(n, d)| format!("{n}={d}")).collect();
            let _ = writeln!(s, "{}", items.join(" "));
        }
        if !self.params.is_empty() {
            let _ = writeln!(s, "[params]");
            let items: Vec<String> = self.params.iter().map(|(n, q)| format!("{n}={q}")).collect();
            let _ = writeln!(s, "{}", items.join(" "));
        }
        s
    }

    /// The quiver from `[irregular]` or from `[nodes]`/`[colours]`/`[order]`, without legs.
    pub fn core_quiver(&self) -> Result<ColouredQuiver> {
        if !self.irregular.is_empty() {
            let a: Vec<Complex64> = self.irregular.iter().map(|x| x.0.to_c64()).collect();
            let mut a_diag = Vec::new();
            let mut t_diag = Vec::new();
            for (k, (_, t, d)) in self.irregular.iter().enumerate() {
                a_diag.extend(std::iter::repeat_n(a[k], *d));
                t_diag.extend(std::iter::repeat_n(t.to_c64(), *d));
            }
            let irr = IrregularType::from_diagonals(&a_diag, &t_diag, 1e-12)?;
            return Ok(fission_graph(&irr)?.0);
        }
        let index = |name: &str| {
            self.nodes
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::InvalidGraph(format!("unknown node '{name}'")))
        };
        let classes = self
            .colours
            .iter()
            .map(|(c, parts)| {
                Ok(ColourClass {
                    colour: *c,
                    parts: parts
                        .iter()
                        .map(|p| p.iter().map(|n| index(n)).collect::<Result<Vec<_>>>())
                        .collect::<Result<Vec<_>>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let orders = if self.order.is_empty() {
            None
        } else {
            let mut orders: Vec<Option<Vec<Colour>>> = vec![None; self.nodes.len()];
            for (n, cols) in &self.order {
                orders[index(n)?] = Some(cols.clone());
            }
            let mut full = Vec::with_capacity(orders.len());
            for (i, o) in orders.into_iter().enumerate() {
                full.push(match o {
                    Some(o) => o,
                    None => classes.iter().filter(|c| c.contains(i)).map(|c| c.colour).collect(),
                });
            }
            Some(full)
        };
        ColouredQuiver::new(self.nodes.clone(), classes, orders)
    }

    /// Whether the document asks for legs to be attached.
    pub fn has_legs(&self) -> bool {
        !self.legs.is_empty() || !self.classes.is_empty() || !self.markings.is_empty()
    }

    fn lookup_dim(&self, name: &str) -> Option<i64> {
        self.dims.iter().rev().find(|(n, _)| n == name).map(|x| x.1)
    }

    fn lookup_param(&self, name: &str) -> Option<Scalar> {
        self.params.iter().rev().find(|(n, _)| n == name).map(|x| x.1.clone())
    }

    /// One leg per core node: listed explicitly, derived from a class and marking,
    /// or a single node carrying the `[dims]`/`[params]` entries.
    pub fn legs_for(&self, core: &ColouredQuiver) -> Result<Vec<Leg>> {
        let named = self.legs.iter().map(|x| &x.0);
        for n in named.chain(self.classes.iter().map(|x| &x.0)).chain(self.markings.iter().map(|x| &x.0)) {
            if core.index_of(n).is_none() {
                return Err(Error::InvalidGraph(format!("'{n}' is not a core node")));
            }
        }
        let mut legs = Vec::with_capacity(core.num_nodes());
        for v in 0..core.num_nodes() {
            let name = core.name(v);
            let explicit = self.legs.iter().find(|(n, _)| n == name).map(|x| x.1.clone());
            let class = self.classes.iter().find(|(n, _)| n == name).map(|x| &x.1);
            let marking = self.markings.iter().find(|(n, _)| n == name).map(|x| &x.1);
            let leg = match (explicit, class, marking) {
                (Some(leg), None, None) => leg,
                (Some(_), _, _) => {
                    return Err(Error::InvalidGraph(format!("node '{name}' has both a leg and a class")))
                }
                (None, Some(c), Some(m)) => marking_to_leg(c, m)?,
                (None, Some(c), None) if c.n == 0 => Leg::new(vec![0], vec![Scalar::one()])?,
                (None, Some(c), None) => marking_to_leg(c, &c.minimal_marking())?,
                (None, None, Some(_)) => {
                    return Err(Error::InvalidGraph(format!("marking at '{name}' without a class")))
                }
                (None, None, None) => Leg::new(
                    vec![self.lookup_dim(name).unwrap_or(0)],
                    vec![self.lookup_param(name).unwrap_or_else(Scalar::one)],
                )?,
            };
            legs.push(leg);
        }
        Ok(legs)
    }

    /// Resolves the document to a quiver with a dimension vector and parameters.
    ///
    /// Unlisted dimensions default to 0 and unlisted parameters to 1.
    pub fn build(&self) -> Result<BuiltGraph> {
        let core = self.core_quiver()?;
        let (quiver, mut dims, mut params, is_supernova) = if self.has_legs() {
            let sn = attach_legs(&core, &self.legs_for(&core)?)?;
            (sn.quiver, sn.dims, sn.params, true)
        } else {
            let n = core.num_nodes();
            (core, vec![0; n], vec![Scalar::one(); n], false)
        };
        for (name, d) in &self.dims {
            let v = quiver
                .index_of(name)
                .ok_or_else(|| Error::InvalidGraph(format!("unknown node '{name}' in [dims]")))?;
            dims[v] = *d;
        }
        for (name, q) in &self.params {
            let v = quiver
                .index_of(name)
                .ok_or_else(|| Error::InvalidGraph(format!("unknown node '{name}' in [params]")))?;
            params[v] = q.clone();
        }
        if let Some(d) = dims.iter().find(|&&d| d < 0) {
            return Err(Error::InvalidInput(format!("negative dimension {d}")));
        }
        Ok(BuiltGraph { quiver, dims, params, is_supernova })
    }
}

impl std::str::FromStr for GraphSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GraphSpec::parse(s)
    }
}

/// A document describing an existing quiver (nodes, colours and colour orders).
pub fn spec_of(q: &ColouredQuiver) -> GraphSpec {
    GraphSpec {
        nodes: q.names().to_vec(),
        colours: q
            .colours()
            .iter()
            .map(|c| {
                (
                    c.colour,
                    c.parts.iter().map(|p| p.iter().map(|&v| q.name(v).to_string()).collect()).collect(),
                )
            })
            .collect(),
        order: (0..q.num_nodes())
            .filter(|&i| !q.node_colour_order(i).is_empty())
            .map(|i| (q.name(i).to_string(), q.node_colour_order(i).to_vec()))
            .collect(),
        ..GraphSpec::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIANGLE: &str = "\
# triangle with one longer leg
[nodes]
a b c
[colours]
0: a | b | c
[legs]
a: dims 1 1 ; params 2 3
[dims]
b=1 c=1
[params]
b=1/2 c=-1+2i
";

    #[test]
    fn parse_and_build_triangle() {
        let spec: GraphSpec = TRIANGLE.parse().unwrap();
        let g = spec.build().unwrap();
        assert!(g.is_supernova);
        assert_eq!(g.quiver.num_nodes(), 4);
        assert_eq!(g.dims, vec![1, 1, 1, 1]);
        assert_eq!(g.params[2], "-1+2i".parse::<Scalar>().unwrap());
        assert_eq!(g.quiver.name(3), "a.2");
    }

    #[test]
    fn text_round_trip() {
        let spec: GraphSpec = TRIANGLE.parse().unwrap();
        let again: GraphSpec = spec.to_text().parse().unwrap();
        assert_eq!(spec, again);
        let plain = spec_of(&ColouredQuiver::complete_multipartite(&[2, 1]).unwrap());
        assert_eq!(plain.to_text().parse::<GraphSpec>().unwrap(), plain);
    }

    #[test]
    fn errors_carry_positions() {
        let err = "[nodes]\na b\n[legs]\na: dims 1 x ; params 1 1\n".parse::<GraphSpec>().unwrap_err();
        assert_eq!(err, perr(4, 11, "expected an integer, found 'x'"));
        let err = "a b\n".parse::<GraphSpec>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, column: 1, .. }));
        let err = "[bogus]\n".parse::<GraphSpec>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn irregular_type_section() {
        let text = "[irregular]\na=0 t=0 dim=1\na=1 t=0 dim=2\na=1 t=1 dim=1\n";
        let g: BuiltGraph = text.parse::<GraphSpec>().unwrap().build().unwrap();
        assert_eq!(g.quiver.num_nodes(), 3);
        assert_eq!(g.quiver.edges().len(), 2);
    }

    #[test]
    fn classes_become_legs() {
        let text = "[nodes]\na b\n[colours]\n0: a | b\n[classes]\na: 2=(1) 3=(1)\nb: 5=(1)\n[markings]\na: 2 3\n";
        let g = text.parse::<GraphSpec>().unwrap().build().unwrap();
        assert_eq!(g.quiver.num_nodes(), 3);
        assert_eq!(g.dims, vec![2, 1, 1]);
        assert_eq!(g.params, vec![Scalar::int(2), Scalar::int(5), Scalar::ratio(3, 2)]);
    }
}
