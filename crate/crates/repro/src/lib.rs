//! Acceptance checks, one per numbered criterion. Every check returns an
//! [`Outcome`] carrying the measured values and, where one is pinned, a
//! wall-clock budget that is part of the pass condition.

use g2rm_core::cmorder::{frobenius_valuations, splitting_in_k, CMFixture, CMOrder, KSplitting, LatticePosition};
use g2rm_core::dfs::{endomorphism_ring_local, DfsConfig};
use g2rm_core::graphmodel::{build_graph, Direction, Graph, GraphSpec, LazyGraph, Tag};
use g2rm_core::pairingmodel::proj_points;
use g2rm_core::realquad::{factor_rational_prime, principal_generator, RealQuadField, SplittingResult};
use g2rm_jacobian::curve::CurveFixture;
use g2rm_jacobian::lab::{IdealContext, LabConfig, LabError, TorsionLab};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: &'static str,
    pub title: &'static str,
    pub ok: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Option<Duration>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.ok && self.budget.map_or(true, |b| self.elapsed <= b)
    }

    pub fn line(&self) -> String {
        let budget = match self.budget {
            Some(b) => format!("{:.2}s / {}s", self.elapsed.as_secs_f64(), b.as_secs()),
            None => format!("{:.2}s", self.elapsed.as_secs_f64()),
        };
        let verdict = if self.pass() { "PASS" } else { "FAIL" };
        format!("{verdict} {:<3} {} [{budget}]: {}", self.id, self.title, self.detail)
    }
}

fn outcome(id: &'static str, title: &'static str, budget: Option<u64>, start: Instant, r: Result<(bool, String), String>) -> Outcome {
    let (ok, detail) = r.unwrap_or_else(|e| (false, format!("error: {e}")));
    Outcome { id, title, ok, detail, elapsed: start.elapsed(), budget: budget.map(Duration::from_secs) }
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn read_fixture(name: &str) -> Result<String, String> {
    std::fs::read_to_string(fixture_path(name)).map_err(|e| format!("{name}: {e}"))
}

/// Criterion 1: the first prime above 3 in `Q(sqrt 1837)` is generated by `(43 + sqrt 1837) / 2`.
pub fn real_quadratic_splitting() -> Outcome {
    let start = Instant::now();
    let r = (|| {
        let f = RealQuadField::new(1837).map_err(|e| e.to_string())?;
        let SplittingResult::Split(l1, l2) = factor_rational_prime(&f, 3).map_err(|e| e.to_string())? else {
            return Ok((false, "3 does not split".into()));
        };
        let g1 = principal_generator(&l1).map_err(|e| e.to_string())?;
        let g2 = principal_generator(&l2).map_err(|e| e.to_string())?;
        // 21 + omega = (43 + sqrt 1837) / 2
        let want = f.int(21, 1);
        Ok((g1 == want, format!("l1 = ({g1}), l2 = ({g2}), expected l1 = ({want})")))
    })();
    outcome("1", "real-quadratic splitting", Some(1), start, r)
}

/// Criterion 2: `f_O ∩ O_K0` and `f_{eta,O} ∩ O_K0` agree on 200 random orders of
/// the `p = 85201` fixture field. One side tests `x O_K ⊂ O` on a Z-basis of `O_K`, the
/// other tests `x eta ∈ O`; both are compared against `m O_K0`.
pub fn order_lattice_law(seed: u64) -> Outcome {
    let start = Instant::now();
    let r = (|| {
        let fx = CMFixture::parse(&read_fixture("p85201.json")?).map_err(|e| e.to_string())?;
        let f = &fx.field;
        let b = *f.base();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tested = 0usize;
        let mut members = 0usize;
        for _ in 0..200 {
            let m = loop {
                let m = b.int(rng.gen_range(-30..=30), rng.gen_range(-10..=10));
                if !m.is_zero() {
                    break m;
                }
            };
            let o = CMOrder::from_conductor(f, &m).map_err(|e| e.to_string())?;
            let mut xs: Vec<_> = (-4..=4).flat_map(|x| (-4..=4).map(move |y| (x, y))).map(|(x, y)| b.int(x, y)).collect();
            for _ in 0..16 {
                let y = b.int(rng.gen_range(-5..=5), rng.gen_range(-5..=5));
                let my = &m * &y;
                xs.push(&my + &b.int(rng.gen_range(-1..=1), rng.gen_range(-1..=1)));
                xs.push(my);
            }
            for x in &xs {
                let full = o.in_conductor(x);
                let eta = o.in_eta_conductor(x);
                if full != eta || full != o.conductor().contains(x) {
                    return Ok((false, format!("conductor {m}: disagreement at {x} (f_O {full}, f_eta {eta})")));
                }
                tested += 1;
                members += full as usize;
            }
        }
        Ok((true, format!("200 orders, {tested} elements, {members} in the conductor, no disagreement")))
    })();
    outcome("2", "order-lattice law", Some(30), start, r)
}

const SPLITTINGS: [KSplitting; 3] = [KSplitting::Split, KSplitting::Ramified, KSplitting::Inert];

pub fn rim_count(s: KSplitting) -> u32 {
    match s {
        KSplitting::Split => 3,
        KSplitting::Ramified => 2,
        KSplitting::Inert => 1,
    }
}

/// The 432 materialized graphs: 9 splitting pairs, `ell` in {3, 5, 7}, `h` in `{0..3}^2`.
pub fn audit_specs() -> Vec<GraphSpec> {
    let mut out = Vec::new();
    for s1 in SPLITTINGS {
        for s2 in SPLITTINGS {
            for ell in [3u64, 5, 7] {
                for h1 in 0..=3 {
                    for h2 in 0..=3 {
                        let seed = out.len() as u64;
                        out.push(
                            GraphSpec::new(ell, LatticePosition::new(h1, h2), [s1, s2])
                                .with_rim([rim_count(s1), rim_count(s2)])
                                .with_seed(seed),
                        );
                    }
                }
            }
        }
    }
    out
}

/// `(ascending, horizontal, descending)` rational `l`-isogenies at level `j` of a volcano of depth `h`.
pub fn expected_profile(s: KSplitting, ell: u64, h: u32, j: u32) -> [usize; 3] {
    let ell = ell as usize;
    if j == 0 {
        let hz = match s {
            KSplitting::Split => 2,
            KSplitting::Ramified => 1,
            KSplitting::Inert => 0,
        };
        [0, hz, if h == 0 { 0 } else { ell + 1 - hz }]
    } else if j < h {
        [1, 0, ell]
    } else {
        [1, 0, 0]
    }
}

pub fn profile(g: &Graph, v: u64, tag: Tag) -> Result<[usize; 3], String> {
    let mut p = [0; 3];
    for e in g.out_edges(v, tag).map_err(|e| e.to_string())? {
        p[match e.direction {
            Direction::Ascending => 0,
            Direction::Horizontal => 1,
            Direction::Descending => 2,
        }] += 1;
    }
    Ok(p)
}

/// Vertices whose rational out-degree profile differs from the volcano rule,
/// as `(vertex, tag, measured, expected)`.
pub fn audit_graph(g: &Graph) -> Result<Vec<(u64, Tag, [usize; 3], [usize; 3])>, String> {
    let spec = g.spec();
    let mut bad = Vec::new();
    for v in g.vertices() {
        for tag in Tag::BOTH {
            let i = tag.index();
            let want = expected_profile(spec.splitting[i], spec.ell, spec.depth.get(i), v.position.get(i));
            let got = profile(g, v.id, tag)?;
            if got != want {
                bad.push((v.id, tag, got, want));
            }
        }
    }
    Ok(bad)
}

/// Criterion 3: out-degree profile of every vertex in every audit graph.
pub fn degree_audit() -> Outcome {
    let start = Instant::now();
    let r = (|| {
        let mut vertices = 0u64;
        for spec in audit_specs() {
            let g = build_graph(&spec).map_err(|e| e.to_string())?;
            if let Some((v, tag, got, want)) = audit_graph(&g)?.first() {
                return Ok((false, format!("{spec:?} vertex {v} {}: got {got:?}, expected {want:?}", tag.name())));
            }
            vertices += g.vertex_count();
        }
        Ok((true, format!("432 graphs, {vertices} vertices, all profiles match")))
    })();
    outcome("3", "graph degree audit", Some(60), start, r)
}

fn check_graph_parallel(g: &Graph, threads: usize) -> Result<(), String> {
    let n = g.vertex_count();
    let depth = g.spec().depth;
    let cfg = DfsConfig::default();
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads as u64)
            .map(|t| {
                s.spawn(move || -> Result<(), String> {
                    let mut v = t;
                    while v < n {
                        let gv = g.vertex(v).map_err(|e| e.to_string())?;
                        let r = endomorphism_ring_local(g, v, depth, &cfg).map_err(|e| format!("vertex {v}: {e}"))?;
                        if r.position() != gv.position {
                            return Err(format!("vertex {v}: got {:?}, truth {:?}", r.position(), gv.position));
                        }
                        v += threads as u64;
                    }
                    Ok(())
                })
            })
            .collect();
        handles.into_iter().try_for_each(|h| h.join().expect("worker panicked"))
    })
}

/// The lazy model of the large example: `h = (10, 3)`, both primes split.
pub fn lazy_spec() -> GraphSpec {
    GraphSpec::new(3, LatticePosition::new(10, 3), [KSplitting::Split, KSplitting::Split])
        .with_torsion_cap([Some(2), Some(1)])
        .with_delta([0, 0], 2)
}

/// Criterion 4: the local search recovers the true position everywhere.
pub fn dfs_soundness(seed: u64) -> Outcome {
    let start = Instant::now();
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(8);
    let r = (|| {
        let mut vertices = 0u64;
        for spec in audit_specs() {
            let g = build_graph(&spec).map_err(|e| e.to_string())?;
            check_graph_parallel(&g, threads).map_err(|e| format!("{spec:?}: {e}"))?;
            vertices += g.vertex_count();
        }
        let spec = lazy_spec();
        let g = LazyGraph::new(&spec).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let v = g.random_vertex(&mut rng);
            let truth = g.vertex(v).map_err(|e| e.to_string())?.position;
            let r = endomorphism_ring_local(&g, v, spec.depth, &DfsConfig::default()).map_err(|e| e.to_string())?;
            if r.position() != truth {
                return Ok((false, format!("lazy vertex {v}: got {:?}, truth {truth:?}", r.position())));
            }
        }
        Ok((true, format!("{vertices} materialized vertices and 50 lazy h=(10,3) vertices")))
    })();
    outcome("4", "DFS soundness", Some(300), start, r)
}

/// Graph model of a CM fixture at its prime: depths from the Weil number,
/// splitting types and rim sizes from the primes of `K0` above `ell`.
pub fn model_spec(fx: &CMFixture) -> Result<GraphSpec, String> {
    let depth = frobenius_valuations(&fx.weil, fx.ell).map_err(|e| e.to_string())?.depth;
    let SplittingResult::Split(l1, l2) = factor_rational_prime(fx.field.base(), fx.ell).map_err(|e| e.to_string())? else {
        return Err(format!("{} does not split in K0", fx.ell));
    };
    let s = [
        splitting_in_k(&l1, &fx.field).map_err(|e| e.to_string())?,
        splitting_in_k(&l2, &fx.field).map_err(|e| e.to_string())?,
    ];
    Ok(GraphSpec::new(fx.ell, depth, s).with_rim([rim_count(s[0]), rim_count(s[1])]))
}

/// Criterion 5: the inert/split model of the `p = 85201` fixture, searched from the rim.
pub fn inert_split_distances() -> Outcome {
    let start = Instant::now();
    let r = (|| {
        let fx = CMFixture::parse(&read_fixture("p85201.json")?).map_err(|e| e.to_string())?;
        let spec = model_spec(&fx)?;
        let g = build_graph(&spec).map_err(|e| e.to_string())?;
        let r = endomorphism_ring_local(&g, g.rim_vertex(), spec.depth, &DfsConfig::default()).map_err(|e| e.to_string())?;
        let h = spec.depth;
        let ok = h == LatticePosition::new(2, 1)
            && spec.splitting == [KSplitting::Inert, KSplitting::Split]
            && (r.l1.nu, r.l2.nu) == (2, 1);
        Ok((ok, format!("h = ({}, {}), splitting {:?}, distances ({}, {})", h.nu1, h.nu2, spec.splitting, r.l1.nu, r.l2.nu)))
    })();
    outcome("5", "inert/split model distances", None, start, r)
}

fn p211_lab(seed: u64) -> Result<TorsionLab<ChaCha8Rng>, String> {
    let fx = CurveFixture::parse(&read_fixture("p211_curve.json")?).map_err(|e| e.to_string())?;
    let cm = fx.cm_fixture().map_err(|e| e.to_string())?.ok_or("curve fixture has no CM data")?;
    let ctx = IdealContext::new(&cm.weil, cm.ell).map_err(|e| e.to_string())?;
    let curve = Arc::new(fx.curve().map_err(|e| e.to_string())?);
    TorsionLab::new(curve, ctx, LabConfig::default(), ChaCha8Rng::seed_from_u64(seed)).map_err(|e| e.to_string())
}

fn lab_err(e: LabError) -> String {
    e.to_string()
}

/// Criterion 6, parts (a) to (e), on the `p = 211` curve.
pub fn pairing_suite(seed: u64) -> Vec<Outcome> {
    let start = Instant::now();
    let mut lab = match p211_lab(seed) {
        Ok(l) => l,
        Err(e) => return vec![outcome("6", "pairing suite", None, start, Err(e))],
    };
    let mut out = Vec::new();

    let r = (|| {
        let d1 = lab.ideal_torsion_degree(0, 1).map_err(lab_err)?;
        let d2 = lab.ideal_torsion_degree(1, 1).map_err(lab_err)?;
        Ok((6 % d1 == 0 && 2 % d2 == 0, format!("J[alpha1] defined over degree {d1}, J[alpha2] over degree {d2}")))
    })();
    out.push(outcome("6a", "torsion fields of J[alpha1], J[alpha2]", Some(120), start, r));

    let t = Instant::now();
    let r = lab.weil_isotropy().map_err(lab_err).map(|iso| {
        let ok = iso.pairs == 16 && iso.trivial == 16 && iso.direct_sum;
        (ok, format!("{}/{} pairs trivial over degree {}, direct sum {}", iso.trivial, iso.pairs, iso.degree, iso.direct_sum))
    });
    out.push(outcome("6b", "Weil pairing on J[alpha1] x J[alpha2]", Some(120), t, r));

    let t = Instant::now();
    let mut nu = [0u32; 2];
    let r = (|| {
        let mut parts = Vec::new();
        for (i, slot) in nu.iter_mut().enumerate() {
            let rep = lab.nu_from_frobenius(i).map_err(lab_err)?;
            *slot = rep.nu;
            let lv = &rep.levels[rep.levels.len() - 1];
            parts.push(format!(
                "l{}: matrix {:?} at n={} over degree {}, {}/{} cyclic subgroups stable",
                i + 1,
                lv.matrix,
                lv.n,
                lv.degree,
                lv.stable_subgroups,
                lv.total_subgroups
            ));
        }
        Ok((nu == [1, 1], format!("measured nu = ({}, {}), expected (1, 1); {}", nu[0], nu[1], parts.join("; "))))
    })();
    out.push(outcome("6c", "Frobenius-scalar depth", Some(120), t, r));

    let t = Instant::now();
    let mut reports = Vec::new();
    let r = (|| {
        for (i, &n) in nu.iter().enumerate() {
            reports.push(lab.self_pairing(i, n).map_err(lab_err)?);
        }
        let ok = reports.iter().all(|s| s.nu_r >= 2 * s.n || s.predicted_k == s.measured_k);
        let d = reports
            .iter()
            .map(|s| format!("l{}: n={} nu_r={} k predicted {} measured {}", s.i + 1, s.n, s.nu_r, s.predicted_k, s.measured_k))
            .collect::<Vec<_>>()
            .join("; ");
        Ok((ok, d))
    })();
    out.push(outcome("6d", "self-pairing exponent k = 2n - nu", Some(1800), t, r));

    let t = Instant::now();
    let r = if reports.len() == 2 {
        let all = proj_points(lab.ell()).len();
        let ok = reports.iter().all(|s| s.degenerate_measured.len() <= 2 && s.degenerate_measured == s.degenerate_form);
        let d = reports
            .iter()
            .map(|s| format!("l{}: {} of {all} degenerate {:?}", s.i + 1, s.degenerate_measured.len(), s.degenerate_measured))
            .collect::<Vec<_>>()
            .join("; ");
        Ok((ok && all == 4, d))
    } else {
        Err("self-pairing reports unavailable".into())
    };
    out.push(outcome("6e", "at most two degenerate subgroups", Some(1800), t, r));
    out
}

/// Criterion 7: the numerator test on `(pi - pi-bar) / alpha_i` against the Frobenius-scalar depth.
pub fn cross_oracle(seed: u64) -> Outcome {
    let start = Instant::now();
    let r = (|| {
        let mut lab = p211_lab(seed)?;
        let mut ok = true;
        let mut parts = Vec::new();
        for i in 0..2 {
            let nu = lab.nu_from_frobenius(i).map_err(lab_err)?.nu;
            let el = lab.el_theta(i, 1).map_err(lab_err)?;
            ok &= el.e == 1 && el.member == (nu >= 1);
            parts.push(format!("l{}: member {} (e = {}, degree {}), nu {}", i + 1, el.member, el.e, el.degree, nu));
        }
        Ok((ok, parts.join("; ")))
    })();
    outcome("7", "numerator test vs Frobenius depth", None, start, r)
}

/// Criterion 8: field multiplications at degree `u` against `u ell^{u' - n}`.
pub fn cost_comparison(seed: u64) -> Outcome {
    let start = Instant::now();
    let r = (|| {
        let mut lab = p211_lab(seed)?;
        let c = lab.cost_report().map_err(lab_err)?;
        let ok = c.el.ops.base_mults > c.ours.ops.base_mults && c.el_degree_formula == c.el_degree_measured;
        Ok((
            ok,
            format!(
                "u={} n={} u'={}: pairing route {} base mults at degree {} ({} Miller iterations), numerator route {} at degree {}, ratio {:.1}",
                c.u, c.n, c.u_prime, c.ours.ops.base_mults, c.ours.degree, c.ours.miller_iterations, c.el.ops.base_mults, c.el.degree, c.ratio
            ),
        ))
    })();
    outcome("8", "operation-count crossover", None, start, r)
}

/// All criteria in order.
pub fn run_all(seed: u64) -> Vec<Outcome> {
    let mut out = vec![
        real_quadratic_splitting(),
        order_lattice_law(seed),
        degree_audit(),
        dfs_soundness(seed),
        inert_split_distances(),
    ];
    out.extend(pairing_suite(seed));
    out.push(cross_oracle(seed));
    out.push(cost_comparison(seed));
    out
}
