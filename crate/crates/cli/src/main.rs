//! `g2rm`: field data, graph models, local endomorphism rings and pairing checks.

use clap::{Args, Parser, Subcommand};
use g2rm_core::cmorder::{frobenius_valuations, splitting_in_k, CMFixture, CMFixtureJson};
use g2rm_core::dfs::{endomorphism_ring_local, DfsConfig, EndRingReport};
use g2rm_core::graphmodel::{build_graph, export_dot, GraphError, GraphSpec, LazyGraph};
use g2rm_core::realquad::{factor_rational_prime, fundamental_unit, principal_generator, SplittingResult};
use g2rm_jacobian::curve::{CurveFixture, CURVE_SCHEMA};
use g2rm_jacobian::lab::{IdealContext, LabConfig, TorsionLab};
use g2rm_repro::{audit_graph, model_spec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

const REPORT_SCHEMA: &str = "g2rm-report/1";

#[derive(Parser, Debug)]
#[command(name = "g2rm", version, about = "Isogeny graphs of genus-2 jacobians with real multiplication")]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Write the report to a file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Repeat for more detail.
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Real quadratic and CM field data of a fixture.
    FieldInfo(FieldInfoArgs),
    /// Build a graph model, audit its degrees and optionally export DOT.
    Graph(GraphArgs),
    /// Local endomorphism ring at a vertex of a graph model.
    Endoring(EndoringArgs),
    /// Torsion, Frobenius and pairing measurements on a curve fixture.
    PairingCheck(PairingArgs),
}

#[derive(Args, Debug)]
struct FieldInfoArgs {
    #[arg(long)]
    fixture: PathBuf,
    /// Prime to factor; defaults to the fixture's.
    #[arg(long)]
    ell: Option<u64>,
}

#[derive(Args, Debug, Clone)]
struct ModelSource {
    /// Graph spec JSON.
    #[arg(long, conflicts_with = "fixture", required_unless_present = "fixture")]
    spec: Option<PathBuf>,
    /// CM or curve fixture; the model is derived from its Weil number.
    #[arg(long)]
    fixture: Option<PathBuf>,
    /// Labelling seed; overrides the spec's.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct GraphArgs {
    #[command(flatten)]
    src: ModelSource,
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EndoringArgs {
    #[command(flatten)]
    src: ModelSource,
    /// Start vertex; defaults to the rim vertex.
    #[arg(long, conflicts_with = "random")]
    vertex: Option<u64>,
    /// Start from a vertex drawn from the seed.
    #[arg(long)]
    random: bool,
    /// Compare with the position stored in the model.
    #[arg(long)]
    audit: bool,
}

#[derive(Args, Debug)]
struct PairingArgs {
    #[arg(long)]
    fixture: PathBuf,
    #[arg(long)]
    ell: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest extension degree to build.
    #[arg(long, default_value_t = 24)]
    max_degree: usize,
    /// Allow fixtures marked slow.
    #[arg(long)]
    slow: bool,
}

enum Failure {
    Input(String),
    Algorithm(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Algorithm(_) => 1,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn algo<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Algorithm(e.to_string())
}

/// A report plus a flag for checks that did not hold.
struct Report {
    body: Value,
    text: String,
    ok: bool,
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

enum Fixture {
    Cm(CMFixture),
    Curve(Box<CurveFixture>, CMFixture),
}

impl Fixture {
    fn cm(&self) -> &CMFixture {
        match self {
            Fixture::Cm(c) | Fixture::Curve(_, c) => c,
        }
    }
}

fn load_fixture(path: &Path) -> Result<Fixture, Failure> {
    let s = read(path)?;
    let v: Value = serde_json::from_str(&s).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    if v.get("schema").and_then(Value::as_str) == Some(CURVE_SCHEMA) {
        let fx = CurveFixture::parse(&s).map_err(input)?;
        let cm = fx.cm_fixture().map_err(input)?.ok_or_else(|| Failure::Input("curve fixture has no cm section".into()))?;
        return Ok(Fixture::Curve(Box::new(fx), cm));
    }
    let j: CMFixtureJson = serde_json::from_value(v).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(Fixture::Cm(CMFixture::from_json(&j).map_err(input)?))
}

fn field_info(a: &FieldInfoArgs) -> Result<Report, Failure> {
    let fx = load_fixture(&a.fixture)?;
    let cm = fx.cm();
    let field = &cm.field;
    let base = field.base();
    let ell = a.ell.unwrap_or(cm.ell);
    let unit = fundamental_unit(base).map_err(algo)?;
    let split = factor_rational_prime(base, ell).map_err(input)?;
    let mut primes = Vec::new();
    let splitting = match &split {
        SplittingResult::Split(l1, l2) => {
            for (name, l) in [("l1", l1), ("l2", l2)] {
                let g = principal_generator(l).map_err(algo)?;
                let k = splitting_in_k(l, field).map_err(algo)?;
                primes.push(json!({"name": name, "ideal": l.to_string(), "generator": g.to_string(),
                    "generator_coords": g.to_json().map_err(algo)?, "in_k": k}));
            }
            "split"
        }
        SplittingResult::Ramified(l) => {
            primes.push(json!({"name": "l", "ideal": l.to_string()}));
            "ramified"
        }
        SplittingResult::Inert => "inert",
    };
    let depth = match &split {
        SplittingResult::Split(..) => {
            let d = frobenius_valuations(&cm.weil, ell).map_err(algo)?.depth;
            Some([d.nu1, d.nu2])
        }
        _ => None,
    };
    let body = json!({
        "d": base.d(),
        "field": field.to_json().map_err(algo)?,
        "fundamental_unit": unit.unit.to_string(),
        "unit_norm": unit.norm,
        "narrow_class_trivial": unit.narrow_class_trivial,
        "ell": ell,
        "splitting": splitting,
        "primes": primes,
        "weil_polynomial": cm.weil.weil_polynomial().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "depth": depth,
    });
    let mut text = format!(
        "K0 = Q(sqrt {}), fundamental unit {} of norm {} (narrow class group {})\n",
        base.d(),
        unit.unit,
        unit.norm,
        if unit.narrow_class_trivial { "trivial" } else { "nontrivial" }
    );
    text += &format!("eta: x^2 - ({}) x + ({}), quartic {:?}\n", field.eta_trace(), field.eta_norm(), field.quartic());
    text += &format!("{ell} is {splitting} in K0\n");
    for p in &primes {
        text += &format!("  {} = {}", p["name"].as_str().unwrap_or(""), p["ideal"].as_str().unwrap_or(""));
        if let Some(g) = p["generator"].as_str() {
            text += &format!(" = ({g}), {} in K", p["in_k"].as_str().unwrap_or("?").to_lowercase());
        }
        text += "\n";
    }
    if let Some([h1, h2]) = depth {
        text += &format!("nu_(l_i, O_K)(pi - pi-bar) = ({h1}, {h2})\n");
    }
    Ok(Report { body, text, ok: true })
}

fn load_spec(src: &ModelSource) -> Result<GraphSpec, Failure> {
    let mut spec = match (&src.spec, &src.fixture) {
        (Some(p), _) => GraphSpec::from_json(&read(p)?).map_err(input)?,
        (None, Some(p)) => model_spec(load_fixture(p)?.cm()).map_err(Failure::Algorithm)?,
        (None, None) => return Err(Failure::Input("one of --spec or --fixture is required".into())),
    };
    if let Some(s) = src.seed {
        spec.seed = s;
    }
    spec.validate().map_err(input)?;
    Ok(spec)
}

fn graph(a: &GraphArgs) -> Result<Report, Failure> {
    let spec = load_spec(&a.src)?;
    let g = build_graph(&spec).map_err(|e| match e {
        GraphError::InvalidSpec(_) => input(e),
        _ => algo(e),
    })?;
    let bad = audit_graph(&g).map_err(Failure::Algorithm)?;
    let audited = spec.delta == [0, 0];
    if let Some(p) = &a.dot {
        std::fs::write(p, export_dot(&g)).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
    }
    let levels: Vec<Value> = g
        .level_counts()
        .iter()
        .map(|(pos, n)| json!({"nu1": pos.nu1, "nu2": pos.nu2, "vertices": n}))
        .collect();
    let edges = g.edges().count();
    let mismatches: Vec<Value> = bad
        .iter()
        .map(|(v, t, got, want)| json!({"vertex": v, "tag": t, "measured": got, "expected": want}))
        .collect();
    let body = json!({
        "spec": spec,
        "vertices": g.vertex_count(),
        "edges": edges,
        "levels": levels,
        "audit": if audited { json!({"mismatches": mismatches}) } else { json!("skipped: delta > 0") },
        "dot": a.dot.as_ref().map(|p| p.display().to_string()),
    });
    let mut text = format!("{} vertices, {} rational edges\n", g.vertex_count(), edges);
    for (pos, n) in g.level_counts() {
        text += &format!("  level ({}, {}): {n}\n", pos.nu1, pos.nu2);
    }
    text += &if !audited {
        "degree audit skipped: delta > 0\n".to_string()
    } else if bad.is_empty() {
        "degree audit: all vertices match\n".to_string()
    } else {
        format!("degree audit: {} mismatches, first at vertex {}\n", bad.len(), bad[0].0)
    };
    if let Some(p) = &a.dot {
        text += &format!("wrote {}\n", p.display());
    }
    Ok(Report { body, text, ok: !audited || bad.is_empty() })
}

fn endoring(a: &EndoringArgs, verbose: u8) -> Result<Report, Failure> {
    let spec = load_spec(&a.src)?;
    let cfg = DfsConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (start, truth, mut report): (u64, _, EndRingReport) = match build_graph(&spec) {
        Ok(g) => {
            let v = match (a.vertex, a.random) {
                (Some(v), _) => v,
                (None, true) => rng.gen_range(0..g.vertex_count()),
                (None, false) => g.rim_vertex(),
            };
            let truth = g.vertex(v).map_err(input)?.position;
            (v, truth, endomorphism_ring_local(&g, v, spec.depth, &cfg).map_err(algo)?)
        }
        Err(GraphError::TooLarge { .. }) => {
            let g = LazyGraph::new(&spec).map_err(input)?;
            let v = match (a.vertex, a.random) {
                (Some(_), _) => return Err(Failure::Input("--vertex needs a materialized graph; use --random".into())),
                (None, true) => g.random_vertex(&mut rng),
                (None, false) => g.rim_vertex(),
            };
            let truth = g.vertex(v).map_err(algo)?.position;
            (v, truth, endomorphism_ring_local(&g, v, spec.depth, &cfg).map_err(algo)?)
        }
        Err(e) => return Err(input(e)),
    };
    if verbose == 0 {
        report.path_trace.clear();
    }
    let agrees = report.position() == truth;
    let mut body = json!({"spec": spec, "vertex": start, "report": report});
    let mut text = format!(
        "vertex {start}: l1 distance {} + {} = nu {}, l2 distance {} + {} = nu {}\nconductor valuations ({}, {})\n",
        report.l1.distance_step1,
        report.l1.distance_step2,
        report.l1.nu,
        report.l2.distance_step1,
        report.l2.distance_step2,
        report.l2.nu,
        report.conductor_valuations[0],
        report.conductor_valuations[1]
    );
    if a.audit {
        body["audit"] = json!({"truth": [truth.nu1, truth.nu2], "agrees": agrees});
        text += &format!("audit: truth ({}, {}), {}\n", truth.nu1, truth.nu2, if agrees { "agrees" } else { "DISAGREES" });
    }
    Ok(Report { body, text, ok: !a.audit || agrees })
}

fn pairing_check(a: &PairingArgs) -> Result<Report, Failure> {
    let Fixture::Curve(fx, cm) = load_fixture(&a.fixture)? else {
        return Err(Failure::Input("pairing-check needs a curve fixture".into()));
    };
    if fx.slow && !a.slow {
        return Err(Failure::Input("fixture is marked slow; pass --slow".into()));
    }
    let ell = a.ell.unwrap_or(cm.ell);
    if ell != cm.ell {
        return Err(Failure::Input(format!("fixture labels the primes above {}, not {ell}", cm.ell)));
    }
    let ctx = IdealContext::new(&cm.weil, ell).map_err(algo)?;
    let curve = Arc::new(fx.curve().map_err(input)?);
    let cfg = LabConfig { max_degree: a.max_degree, ..LabConfig::default() };
    let mut lab = TorsionLab::new(curve, ctx, cfg, ChaCha8Rng::seed_from_u64(a.seed)).map_err(algo)?;

    let degrees = [lab.ideal_torsion_degree(0, 1).map_err(algo)?, lab.ideal_torsion_degree(1, 1).map_err(algo)?];
    let full = lab.full_torsion_degree(1).map_err(algo)?;
    let iso = lab.weil_isotropy().map_err(algo)?;
    let mut nus = Vec::new();
    let mut pairings = Vec::new();
    let mut el = Vec::new();
    let mut ok = iso.trivial == iso.pairs && iso.direct_sum;
    for i in 0..2 {
        let nu = lab.nu_from_frobenius(i).map_err(algo)?;
        let sp = lab.self_pairing(i, nu.nu).map_err(algo)?;
        let e = lab.el_theta(i, 1).map_err(algo)?;
        ok &= sp.nu_r >= 2 * sp.n || sp.predicted_k == sp.measured_k;
        ok &= sp.degenerate_measured.len() <= 2 && sp.degenerate_measured == sp.degenerate_form;
        ok &= e.member == (nu.nu >= 1);
        nus.push(nu);
        pairings.push(sp);
        el.push(e);
    }
    let mut text = format!(
        "torsion fields: J[l1] degree {}, J[l2] degree {}, J[{ell}] degree {full}\n",
        degrees[0], degrees[1]
    );
    text += &format!("Weil pairing on J[l1] x J[l2]: {}/{} trivial over degree {}\n", iso.trivial, iso.pairs, iso.degree);
    text += &format!("nu = ({}, {})\n", nus[0].nu, nus[1].nu);
    for i in 0..2 {
        let (sp, e) = (&pairings[i], &el[i]);
        text += &format!(
            "  l{}: k measured {} predicted {} (n = {}, nu_r = {}), {} degenerate subgroups, numerator test {}\n",
            i + 1,
            sp.measured_k,
            sp.predicted_k,
            sp.n,
            sp.nu_r,
            sp.degenerate_measured.len(),
            if e.member { "member" } else { "not a member" }
        );
    }
    let body = json!({
        "ell": ell,
        "actions": lab.ctx.actions,
        "depth": lab.ctx.depth,
        "torsion_degrees": degrees,
        "full_torsion_degree": full,
        "isotropy": iso,
        "nu": nus,
        "self_pairing": pairings,
        "numerator_test": el,
    });
    Ok(Report { body, text, ok })
}

fn emit(cli: &Cli, command: &str, seed: Option<u64>, fixture: Option<&Path>, r: &Report) -> Result<(), Failure> {
    let out = if cli.json {
        let v = json!({
            "schema": REPORT_SCHEMA,
            "command": command,
            "seed": seed,
            "fixture": fixture.map(|p| p.display().to_string()),
            "ok": r.ok,
            "report": r.body,
        });
        serde_json::to_string_pretty(&v).map_err(algo)? + "\n"
    } else {
        let seed = seed.map_or("none".to_string(), |s| s.to_string());
        format!("# {REPORT_SCHEMA} {command} seed={seed}\n{}", r.text)
    };
    match &cli.output {
        Some(p) => std::fs::write(p, out).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let (name, seed, fixture, report) = match &cli.cmd {
        Command::FieldInfo(a) => ("field-info", None, Some(a.fixture.as_path()), field_info(a)?),
        Command::Graph(a) => {
            let r = graph(a)?;
            let seed = r.body["spec"]["seed"].as_u64();
            ("graph", seed, a.src.fixture.as_deref(), r)
        }
        Command::Endoring(a) => {
            let r = endoring(a, cli.verbose)?;
            let seed = r.body["spec"]["seed"].as_u64();
            ("endoring", seed, a.src.fixture.as_deref(), r)
        }
        Command::PairingCheck(a) => ("pairing-check", Some(a.seed), Some(a.fixture.as_path()), pairing_check(a)?),
    };
    emit(cli, name, seed, fixture, &report)?;
    Ok(report.ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("g2rm: checks failed");
            ExitCode::from(1)
        }
        Err(f) => {
            let (Failure::Input(m) | Failure::Algorithm(m)) = &f;
            eprintln!("g2rm: {m}");
            ExitCode::from(f.code())
        }
    }
}
