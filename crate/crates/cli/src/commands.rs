use std::fs;
use std::path::Path;

use multiquiver::dsolver::{
    ds_criterion, ds_cross_validate, ds_search, exhaustive_family, Agreement, DSInstance, SearchBudget,
    SearchOutcome,
};
use multiquiver::graph::format::{spec_of, BuiltGraph, GraphSpec};
use multiquiver::graph::{attach_legs, ColouredQuiver};
use multiquiver::kacmoody::{self, RootKind};
use multiquiver::stokes::{emit_readings, DerivativeMode};
use multiquiver::suite::{self, Arithmetic, Check};

use crate::{Budget, Derivative, DsCmd, Failure, Family, GraphCmd, Mode, Report, RootsCmd, RunConfig, VerifyCmd};

type Outcome = Result<(), Failure>;

fn read_spec(path: &Path) -> Result<GraphSpec, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    GraphSpec::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn vector<T: ToString>(v: &[T]) -> String {
    let items: Vec<String> = v.iter().map(T::to_string).collect();
    format!("({})", items.join(","))
}

fn instance_id(path: &Path) -> String {
    path.file_stem().map_or_else(|| "instance".to_string(), |s| s.to_string_lossy().into_owned())
}

fn describe(q: &ColouredQuiver, report: &Report) {
    report.human(&format!("nodes: {}", q.names().join(" ")));
    for c in q.colours() {
        let parts: Vec<String> =
            c.parts.iter().map(|p| p.iter().map(|&i| q.name(i)).collect::<Vec<_>>().join(" ")).collect();
        report.human(&format!("colour {}: {}", c.colour, parts.join(" | ")));
    }
}

pub fn graph(cmd: &GraphCmd, report: &mut Report) -> Outcome {
    match cmd {
        GraphCmd::Info { file } => {
            let built = read_spec(file)?.build()?;
            let q = &built.quiver;
            describe(q, report);
            let cartan = kacmoody::cartan_matrix(q);
            report.human("cartan matrix:");
            for row in &cartan {
                report.human(&format!("  {}", row.iter().map(|x| format!("{x:>3}")).collect::<String>()));
            }
            report.machine(format!(
                "GRAPH nodes={} edges={} colours={}",
                q.num_nodes(),
                q.edges().len(),
                q.colours().len()
            ));
            let rows: Vec<String> = cartan.iter().map(|r| vector(r)).collect();
            report.machine(format!("CARTAN {}", rows.join(" ")));
            report.machine(match q.core() {
                Some(info) => {
                    let parts: Vec<String> = info.parts.iter().map(|p| p.len().to_string()).collect();
                    let legs: Vec<String> = info.legs.iter().map(|l| l.len().to_string()).collect();
                    format!("SUPERNOVA yes parts={} legs={}", vector(&parts), vector(&legs))
                }
                None => "SUPERNOVA no".to_string(),
            });
        }
        GraphCmd::Build { file } => {
            let built = read_spec(file)?.build()?;
            let mut spec = spec_of(&built.quiver);
            spec.dims = built.quiver.names().iter().cloned().zip(built.dims.iter().copied()).collect();
            spec.params = built.quiver.names().iter().cloned().zip(built.params.iter().cloned()).collect();
            report.human(&spec.to_text());
            report.machine(format!("BUILD nodes={} d={} q={}", built.quiver.num_nodes(), vector(&built.dims), vector(&built.params)));
        }
        GraphCmd::Fission { file } => {
            let spec = read_spec(file)?;
            if spec.irregular.is_empty() {
                return Err(Failure::Input(format!("{}: no [irregular] section", file.display())));
            }
            let q = spec.core_quiver()?;
            describe(&q, report);
            report.human(&spec_of(&q).to_text());
            let dims: Vec<usize> = spec.irregular.iter().map(|x| x.2).collect();
            report.machine(format!("FISSION nodes={} edges={} dims={}", q.num_nodes(), q.edges().len(), vector(&dims)));
        }
    }
    Ok(())
}

fn node_index(built: &BuiltGraph, node: &str) -> Result<usize, Failure> {
    built
        .quiver
        .index_of(node)
        .or_else(|| node.parse::<usize>().ok().filter(|&i| i < built.quiver.num_nodes()))
        .ok_or_else(|| Failure::Input(format!("unknown node '{node}'")))
}

pub fn roots(cmd: &RootsCmd, report: &mut Report) -> Outcome {
    match cmd {
        RootsCmd::Classify { file, bound } => {
            let built = read_spec(file)?.build()?;
            let q = &built.quiver;
            if built.dims.iter().any(|&x| x != 0) {
                let kind = match kacmoody::root_kind(q, &built.dims)? {
                    Some(RootKind::Real) => "real",
                    Some(RootKind::Imaginary) => "imaginary",
                    None => "none",
                };
                report.machine(format!("KIND d={} kind={kind}", vector(&built.dims)));
            }
            let roots = kacmoody::classify_roots(q, *bound);
            for r in &roots.real {
                report.machine(format!("ROOT real {}", vector(r)));
            }
            for r in &roots.imaginary {
                report.machine(format!("ROOT imaginary {}", vector(r)));
            }
            report.machine(format!(
                "ROOTS bound={bound} real={} imaginary={}",
                roots.real.len(),
                roots.imaginary.len()
            ));
        }
        RootsCmd::Reflect { file, node } => {
            let built = read_spec(file)?.build()?;
            let i = node_index(&built, node)?;
            let q = kacmoody::reflect_params(&built.quiver, i, &built.params)?;
            let d = kacmoody::reflect_dim(&built.quiver, i, &built.dims)?;
            report.human(&format!("q = {} -> {}", vector(&built.params), vector(&q)));
            report.human(&format!("d = {} -> {}", vector(&built.dims), vector(&d)));
            report.machine(format!("REFLECT node={} q={} d={}", built.quiver.name(i), vector(&q), vector(&d)));
        }
        RootsCmd::Generic { file } => {
            let built = read_spec(file)?.build()?;
            let mut count = 0;
            for a in kacmoody::bounded_roots(&built.quiver, &built.dims)? {
                if kacmoody::param_power_is_one(&built.params, &a)? {
                    report.machine(format!("VIOLATING a={}", vector(&a)));
                    count += 1;
                }
            }
            report.machine(format!("GENERIC d={} generic={} violations={count}", vector(&built.dims), count == 0));
        }
        RootsCmd::Dim { file } => {
            let built = read_spec(file)?.build()?;
            let value = kacmoody::expected_dimension(&built.quiver, &built.dims)?;
            report.machine(format!("DIM d={} value={value}", vector(&built.dims)));
        }
    }
    Ok(())
}

fn arithmetic(mode: Mode) -> Arithmetic {
    match mode {
        Mode::Float => Arithmetic::Float,
        Mode::Rational => Arithmetic::Rational,
    }
}

pub fn verify(cmd: &VerifyCmd, config: &RunConfig, report: &mut Report) -> Outcome {
    let seed = config.seed;
    let exact = config.mode == Mode::Rational;
    let mut checks: Vec<Check> = Vec::new();
    match cmd {
        VerifyCmd::Gauss { samples } => checks.push(suite::gauss_suite(*samples, seed, 1e-10, arithmetic(config.mode))?),
        VerifyCmd::Twoform { samples, derivative } => {
            if exact {
                checks.push(suite::twoform_suite(*samples, seed, DerivativeMode::Analytic, Arithmetic::Rational)?);
            } else {
                if *derivative != Derivative::Fd {
                    checks.push(suite::twoform_suite(*samples, seed, DerivativeMode::Analytic, Arithmetic::Float)?);
                }
                if *derivative != Derivative::Analytic {
                    checks.push(suite::twoform_suite(
                        *samples,
                        seed,
                        DerivativeMode::FiniteDifference,
                        Arithmetic::Float,
                    )?);
                }
            }
        }
        VerifyCmd::Tame2stokes { samples } => checks.push(suite::tame_suite(*samples, seed)?),
        VerifyCmd::Legs { samples } => checks.push(suite::legs_suite(*samples, seed)?),
        VerifyCmd::Jordan { samples } => checks.push(suite::jordan_suite(*samples, seed)?),
        VerifyCmd::Splay { samples } => checks.push(suite::splay_suite(*samples, seed, 1e-10)?),
        VerifyCmd::Triangle => {
            let tri = suite::triangle_check(seed)?;
            report.human(&format!(
                "q = {}, probe = {}, expected dimension = {}",
                vector(&tri.params),
                tri.probe.map_or_else(|| "n/a".to_string(), |p| p.to_string()),
                tri.expected_dimension
            ));
            checks.push(tri.check);
        }
    }
    if let Some(tol) = config.tol {
        if !exact {
            checks = checks.into_iter().map(|c| c.with_tol(tol)).collect();
        }
    }
    report.human(&format!("{:<18}{:>10}{:>9}{:>10}{:>12}{:>10}", "check", "instances", "skipped", "failures", "residual", "tol"));
    for c in &checks {
        report.human(&format!(
            "{:<18}{:>10}{:>9}{:>10}{:>12.3e}{:>10.0e}",
            c.name, c.instances, c.skipped, c.failures, c.residual, c.tol
        ));
    }
    for c in &checks {
        report.machine(c.to_string());
    }
    if checks.iter().all(|c| c.pass) {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn load_instance(path: &Path) -> Result<DSInstance, Failure> {
    Ok(DSInstance::from_spec(instance_id(path), &read_spec(path)?)?)
}

fn budget(b: &Budget) -> SearchBudget {
    SearchBudget { restarts: b.restarts, iterations: b.iterations }
}

pub fn ds(cmd: &DsCmd, config: &RunConfig, report: &mut Report) -> Outcome {
    match cmd {
        DsCmd::Criterion { file } => {
            let inst = load_instance(file)?;
            let r = ds_criterion(&inst)?;
            report.human(&format!("d = {}, q = {}", vector(inst.dims()), vector(inst.params())));
            report.human(&format!("certificate: {}", r.certificate));
            report.machine(format!("CRITERION {} verdict={} delta={}", inst.id, r.verdict, r.delta));
        }
        DsCmd::Search { file, budget: b, witness } => {
            let inst = load_instance(file)?;
            let verdict = ds_criterion(&inst)?.verdict;
            let outcome = ds_search(&inst, budget(b), config.seed)?;
            if let (SearchOutcome::Found(w), Some(path)) = (&outcome, witness) {
                fs::write(path, w.core.to_text()).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            }
            if let SearchOutcome::Found(w) = &outcome {
                report.human(&format!(
                    "witness from restart {}: fiber residual {:.3e}, irreducible {}",
                    w.restart, w.check.fiber_residual, w.check.irreducible
                ));
            }
            report.machine(format!(
                "DS {} verdict={} search={} residual={:.3e} seed={}",
                inst.id,
                verdict,
                outcome.label(),
                outcome.residual(),
                config.seed
            ));
        }
        DsCmd::Crossval { files, family, max_total, budget: b } => {
            let mut instances = files.iter().map(|f| load_instance(f)).collect::<Result<Vec<_>, _>>()?;
            if let Some(fam) = family {
                let (name, parts): (&str, &[usize]) = match fam {
                    Family::Interval => ("interval", &[1, 1]),
                    Family::Triangle => ("triangle", &[1, 1, 1]),
                };
                let core = ColouredQuiver::complete_multipartite(parts)?;
                instances.extend(exhaustive_family(name, &core, *max_total)?);
            }
            if instances.is_empty() {
                return Err(Failure::Input("no instances: pass files or --family".into()));
            }
            let rows = ds_cross_validate(&instances, budget(b), config.seed)?;
            let agree = rows.iter().filter(|r| r.agreement == Agreement::Agree).count();
            report.human(&format!("{:<24}{:>22}{:>12}{:>12}", "instance", "verdict", "search", "residual"));
            for r in &rows {
                report.human(&format!("{:<24}{:>22}{:>12}{:>12.3e}", r.id, r.verdict.to_string(), r.search, r.residual));
            }
            for r in &rows {
                report.machine(r.to_string());
            }
            report.machine(format!("CROSSVAL instances={} agree={agree} inconclusive={}", rows.len(), rows.len() - agree));
        }
    }
    Ok(())
}

pub fn readings(file: &Path, report: &mut Report) -> Outcome {
    let spec = read_spec(file)?;
    let core = spec.core_quiver()?;
    let sn = attach_legs(&core, &spec.legs_for(&core)?)?;
    let readings = emit_readings(&sn.quiver, &sn.params, &sn.dims)?;
    for r in &readings {
        if r.empty {
            report.human(&format!("empty: {}", r.empty_reasons.join("; ")));
        }
        report.machine(r.to_string());
    }
    report.machine(format!("READINGS count={}", readings.len()));
    Ok(())
}
