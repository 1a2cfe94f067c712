#![allow(dead_code)]

use multiquiver::graph::{attach_legs, ColouredQuiver, Leg};
use multiquiver::linalg::{self, CMat};
use multiquiver::representation::GraphRep;
use multiquiver::Scalar;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A supernova graph with at most `max_nodes` nodes: a complete multipartite core
/// with one to three parts and a leg of random length at each core node.
pub fn random_supernova<R: Rng>(rng: &mut R, max_nodes: usize) -> ColouredQuiver {
    loop {
        let parts: Vec<usize> = (0..rng.random_range(1..=3)).map(|_| rng.random_range(1..=2)).collect();
        let core_nodes: usize = parts.iter().sum();
        if core_nodes > max_nodes || (parts.len() == 1 && core_nodes == 1) {
            continue;
        }
        let mut spare = max_nodes - core_nodes;
        let mut legs = Vec::new();
        for _ in 0..core_nodes {
            let extra = rng.random_range(0..=spare.min(2));
            spare -= extra;
            legs.push(Leg::new(vec![0; extra + 1], vec![Scalar::one(); extra + 1]).expect("valid leg"));
        }
        let core = ColouredQuiver::complete_multipartite(&parts).expect("valid core");
        return attach_legs(&core, &legs).expect("legs attach").quiver;
    }
}

pub fn random_rational<R: Rng>(rng: &mut R) -> Scalar {
    loop {
        let num = rng.random_range(-6i64..=6);
        if num != 0 {
            return Scalar::ratio(num, rng.random_range(1i64..=4));
        }
    }
}

pub fn path(n: usize) -> ColouredQuiver {
    let names = (0..n).map(|i| format!("v{i}")).collect();
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    ColouredQuiver::from_simple_edges(names, &edges).expect("path graph")
}

pub fn interval() -> ColouredQuiver {
    ColouredQuiver::complete_multipartite(&[1, 1]).unwrap()
}

pub fn triangle() -> ColouredQuiver {
    ColouredQuiver::complete_multipartite(&[1, 1, 1]).unwrap()
}

/// Orthonormal basis of the smallest subrepresentation containing `v` at `node`.
pub fn spin(rep: &GraphRep, node: usize, v: &CMat) -> Vec<CMat> {
    let dims = rep.dims();
    let mut basis: Vec<CMat> = dims.iter().map(|&d| CMat::zeros(d, 0)).collect();
    basis[node] = linalg::column_space(v, 1e-9);
    loop {
        let before: usize = basis.iter().map(|b| b.ncols()).sum();
        for (&(h, t), m) in rep.maps() {
            let image = m * &basis[t];
            let stacked = concat_columns(&basis[h], &image);
            basis[h] = linalg::column_space(&stacked, 1e-9);
        }
        if basis.iter().map(|b| b.ncols()).sum::<usize>() == before {
            return basis;
        }
    }
}

fn concat_columns(a: &CMat, b: &CMat) -> CMat {
    let mut out = CMat::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

/// Basis of the span of all walk operators `V_node -> V_j`, for every `j`.
fn walk_span(rep: &GraphRep, node: usize) -> Vec<Vec<CMat>> {
    let dims = rep.dims();
    let flat = |m: &CMat| CMat::from_iterator(m.len(), 1, m.iter().copied());
    let mut span: Vec<CMat> = dims.iter().map(|&d| CMat::zeros(d * dims[node], 0)).collect();
    span[node] = flat(&linalg::identity(dims[node]));
    loop {
        let before: usize = span.iter().map(|s| s.ncols()).sum();
        for (&(h, t), m) in rep.maps() {
            let mut extra = CMat::zeros(dims[h] * dims[node], span[t].ncols());
            for k in 0..span[t].ncols() {
                let op = CMat::from_column_slice(dims[t], dims[node], span[t].column(k).as_slice());
                extra.set_column(k, &flat(&(m * op)).column(0));
            }
            span[h] = linalg::column_space(&concat_columns(&span[h], &extra), 1e-9);
        }
        if span.iter().map(|s| s.ncols()).sum::<usize>() == before {
            break;
        }
    }
    span.iter()
        .zip(dims)
        .map(|(s, &d)| {
            (0..s.ncols())
                .map(|k| CMat::from_column_slice(d, dims[node], s.column(k).as_slice()))
                .collect()
        })
        .collect()
}

/// Norton's irreducibility test.
///
/// With `c` a random element of `e_i A e_i` acting on `V_i` and `lambda` a simple
/// eigenvalue, `theta = e_i (c - lambda) e_i + sum_{j != i} e_j` has a one-dimensional
/// kernel. The module is simple exactly when the kernel vector spins to everything
/// and a kernel vector of the transpose spins to everything in the dual.
/// If no sampled `c` has a simple eigenvalue, `e_i A e_i` is not all of `End(V_i)`
/// and the module is reducible.
pub fn norton_irreducible<R: Rng>(rep: &GraphRep, rng: &mut R) -> bool {
    let total = rep.total_dim();
    if total == 0 {
        return false;
    }
    let node = rep.dims().iter().position(|&d| d > 0).expect("nonzero dimension");
    let d = rep.dims()[node];
    let loops = walk_span(rep, node).swap_remove(node);
    for _ in 0..10 {
        let mut c = CMat::zeros(d, d);
        for op in &loops {
            c += op * linalg::random_complex(rng);
        }
        let eig = linalg::eigenvalues(&c);
        let simple = eig
            .iter()
            .find(|l| eig.iter().filter(|m| (*m - *l).norm() < 1e-6 * (1.0 + l.norm())).count() == 1);
        let Some(&lambda) = simple else { continue };
        let shifted = &c - linalg::identity(d) * lambda;
        let v = kernel_vector(&shifted);
        let w = kernel_vector(&shifted.transpose());
        let up = spin(rep, node, &v).iter().map(|b| b.ncols()).sum::<usize>();
        let down = spin(&rep.transpose(), node, &w).iter().map(|b| b.ncols()).sum::<usize>();
        return up == total && down == total;
    }
    false
}

/// Right singular vector of the smallest singular value.
fn kernel_vector(m: &CMat) -> CMat {
    let n = m.ncols();
    let (_, _, vt) = linalg::svd(m);
    let row = vt.row(n - 1);
    CMat::from_fn(n, 1, |i, _| row[i].conj())
}

/// Dimension vectors with entries summing to between 1 and `max_total`.
pub fn random_dims<R: Rng>(rng: &mut R, nodes: usize, max_total: usize) -> Vec<usize> {
    loop {
        let dims: Vec<usize> = (0..nodes).map(|_| rng.random_range(0..=2)).collect();
        let s: usize = dims.iter().sum();
        if (1..=max_total).contains(&s) {
            return dims;
        }
    }
}

/// A representation with a planted proper subrepresentation of dimension `sub`:
/// block upper triangular maps conjugated by random changes of basis at each node.
pub fn planted_reducible<R: Rng>(rng: &mut R, quiver: ColouredQuiver, dims: &[usize], sub: &[usize]) -> GraphRep {
    let mut rep = GraphRep::random(quiver, dims.to_vec(), 1.0, rng).expect("random rep");
    let bases: Vec<CMat> = dims
        .iter()
        .map(|&d| if d == 0 { linalg::identity(0) } else { linalg::random_well_conditioned(rng, d, 1.0) })
        .collect();
    let edges: Vec<(usize, usize)> = rep.maps().map(|(&k, _)| k).collect();
    for (h, t) in edges {
        let mut m = rep.map(h, t).expect("edge").clone();
        for r in sub[h]..dims[h] {
            for c in 0..sub[t] {
                m[(r, c)] = Complex64::new(0.0, 0.0);
            }
        }
        let inv = bases[t].clone().try_inverse().expect("invertible");
        rep.set_map(h, t, &bases[h] * m * inv).expect("shape");
    }
    rep
}

/// Outcome of comparing the library irreducibility test with [`norton_irreducible`].
pub struct IrreducibilityRun {
    pub instances: usize,
    pub irreducible: usize,
    pub disagreements: Vec<String>,
}

/// Random representations with total dimension at most 4 on small graphs: one
/// third generic, one third with a planted subrepresentation, one third with some
/// maps set to zero.
pub fn irreducibility_run(instances: usize, seed: u64) -> IrreducibilityRun {
    use multiquiver::representation::is_irreducible;
    let mut rng = rng(seed);
    let graphs = [
        interval(),
        triangle(),
        path(3),
        ColouredQuiver::complete_multipartite(&[1, 3]).unwrap(),
        ColouredQuiver::complete_multipartite(&[2, 2]).unwrap(),
    ];
    let mut run = IrreducibilityRun { instances, irreducible: 0, disagreements: Vec::new() };
    for k in 0..instances {
        let quiver = graphs[rng.random_range(0..graphs.len())].clone();
        let dims = random_dims(&mut rng, quiver.num_nodes(), 4);
        let rep = match k % 3 {
            0 => GraphRep::random(quiver, dims.clone(), 1.0, &mut rng).unwrap(),
            1 => {
                let total: usize = dims.iter().sum();
                let sub = loop {
                    let sub: Vec<usize> = dims.iter().map(|&d| rng.random_range(0..=d)).collect();
                    let s: usize = sub.iter().sum();
                    if s > 0 && s < total {
                        break sub;
                    }
                    if total == 1 {
                        break dims.clone();
                    }
                };
                planted_reducible(&mut rng, quiver, &dims, &sub)
            }
            _ => {
                let mut rep = GraphRep::random(quiver, dims.clone(), 1.0, &mut rng).unwrap();
                let edges: Vec<(usize, usize)> = rep.maps().map(|(&e, _)| e).collect();
                for (h, t) in edges {
                    if rng.random_bool(0.4) {
                        rep.set_map(h, t, CMat::zeros(dims[h], dims[t])).unwrap();
                    }
                }
                rep
            }
        };
        let lib = is_irreducible(&rep);
        let oracle = norton_irreducible(&rep, &mut rng);
        run.irreducible += usize::from(oracle);
        if lib != oracle {
            run.disagreements.push(format!("dims {dims:?}: library {lib}, oracle {oracle}\n{}", rep.to_text()));
        }
    }
    run
}

/// One random draw of `(graph, beta, q, i)` on a supernova graph with at most 8
/// nodes, checked for the involution, braid, pairing and form identities.
pub fn check_weyl_draw(seed: u64) -> Result<(), String> {
    use multiquiver::kacmoody::{cartan_matrix, form, param_power, reflect_dim, reflect_params};
    let mut rng = rng(seed);
    let quiver = random_supernova(&mut rng, 8);
    let n = quiver.num_nodes();
    let beta: Vec<i64> = (0..n).map(|_| rng.random_range(-3..=3)).collect();
    let gamma: Vec<i64> = (0..n).map(|_| rng.random_range(-3..=3)).collect();
    let q: Vec<Scalar> = (0..n).map(|_| random_rational(&mut rng)).collect();
    let i = rng.random_range(0..n);
    let s = |k: usize, v: &[i64]| reflect_dim(&quiver, k, v).unwrap();
    let r = |k: usize, p: &[Scalar]| reflect_params(&quiver, k, p).unwrap();

    if s(i, &s(i, &beta)) != beta {
        return Err(format!("s_{i}^2 != id on {beta:?}"));
    }
    if r(i, &r(i, &q)) != q {
        return Err(format!("r_{i}^2 != id"));
    }
    let lhs = param_power(&q, &beta).unwrap();
    let rhs = param_power(&r(i, &q), &s(i, &beta)).unwrap();
    if lhs != rhs {
        return Err(format!("q^beta = {lhs} but r_i(q)^(s_i beta) = {rhs}"));
    }
    let before = form(&quiver, &beta, &gamma).unwrap();
    let after = form(&quiver, &s(i, &beta), &s(i, &gamma)).unwrap();
    if before != after {
        return Err(format!("form changed under s_{i}: {before} -> {after}"));
    }
    let c = cartan_matrix(&quiver);
    let j = rng.random_range(0..n);
    let order = match c[i][j] {
        _ if i == j => return Ok(()),
        0 => 2,
        -1 => 3,
        _ => return Ok(()),
    };
    let (mut v, mut p) = (beta.clone(), q.clone());
    for _ in 0..order {
        v = s(j, &s(i, &v));
        p = r(j, &r(i, &p));
    }
    if v != beta || p != q {
        return Err(format!("braid relation of order {order} fails at ({i}, {j})"));
    }
    Ok(())
}

/// Outcome of [`marking_reflection_run`].
pub struct MarkingRun {
    pub reflected: usize,
    pub at_core: usize,
    pub failures: Vec<String>,
}

/// Reflections carried out on markings for random supernova instances, compared
/// with the Weyl group action and with the explicit pattern
/// `q_i -> 1/q_i`, `q_l -> q_i q_l` for neighbours `l` and `q_l` fixed otherwise.
pub fn marking_reflection_run(instances: usize, seed: u64) -> MarkingRun {
    use multiquiver::dsolver::DSInstance;
    use multiquiver::stokes::reflect_marking;
    use multiquiver::suite::{eigenvalue_palette, random_class};
    use multiquiver::Error;

    let mut rng = rng(seed);
    let palette = eigenvalue_palette(true);
    let mut run = MarkingRun { reflected: 0, at_core: 0, failures: Vec::new() };
    while run.reflected < instances {
        let parts: Vec<usize> = (0..rng.random_range(2..=3)).map(|_| rng.random_range(1..=2)).collect();
        let core = ColouredQuiver::complete_multipartite(&parts).unwrap();
        let mut classes = Vec::new();
        let mut markings = Vec::new();
        for _ in 0..core.num_nodes() {
            let size = rng.random_range(1..=3);
            let class = random_class(&mut rng, size, &palette, 2);
            let mut marking = class.minimal_marking();
            if rng.random_bool(0.5) {
                marking.push(palette[rng.random_range(0..palette.len())].clone());
            }
            for i in (1..marking.len()).rev() {
                marking.swap(i, rng.random_range(0..=i));
            }
            classes.push(class);
            markings.push(marking);
        }
        let inst = DSInstance::new("draw", core.clone(), classes, Some(markings)).unwrap();
        let (quiver, params, dims) = (inst.quiver(), inst.params(), inst.dims());
        let node = rng.random_range(0..quiver.num_nodes());
        let r = match reflect_marking(quiver, params, dims, node, 1e-12) {
            Ok(r) => r,
            // q_i = 1, or a core node whose tame-side class would be empty.
            Err(Error::ReflectionRejected { .. } | Error::EmptyClass(_)) => continue,
            Err(e) => {
                run.failures.push(format!("node {node}: {e}"));
                run.reflected += 1;
                continue;
            }
        };
        run.reflected += 1;
        run.at_core += usize::from(node < core.num_nodes());
        let qi = &params[node];
        let pattern = (0..quiver.num_nodes()).all(|l| {
            let want = if l == node {
                qi.recip().unwrap()
            } else if quiver.edge_count_between(node, l) == 1 {
                qi.mul(&params[l])
            } else {
                params[l].clone()
            };
            r.params[l] == want
        });
        if !r.agrees || !pattern {
            run.failures.push(format!("node {node}: got {:?} expected {:?}", r.params, r.expected_params));
        }
    }
    run
}
