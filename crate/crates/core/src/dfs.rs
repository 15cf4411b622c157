//! Local endomorphism ring at `ell` by walking the `(ell, ell)`-isogeny graph.
//!
//! Step 1 runs several non-backtracking chains in lockstep until one reaches
//! the second stability level for `l`. Step 2 then descends by kernels with a
//! non-degenerate self-pairing until the floor of rationality. The sum of the
//! two distances is `nu_{l,J}(pi - pibar)`, and subtracting it from the depth
//! `nu_{l,O_K}(pi - pibar)` gives the conductor valuation.
//!
//! Everything here goes through [`IsogenyOracle`]; no graph internals are used.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cmorder::LatticePosition;
use crate::graphmodel::Tag;
use crate::pairingmodel::{ProjPoint, SelfPairingPoly};

pub type VertexId = u64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("unknown vertex {0}")]
    UnknownVertex(u64),
    #[error("kernel {kernel:?} is not rational at vertex {vertex}")]
    NotRational { kernel: ProjPoint, vertex: u64 },
    #[error("oracle backend: {0}")]
    Backend(String),
}

/// What the search may ask of an isogeny backend.
///
/// Kernels are points of `P^1(F_ell)`: coordinates of a generator of the cyclic
/// subgroup in a fixed basis of `J[l]`. A `None` kernel component means the
/// step does not move in that direction.
pub trait IsogenyOracle {
    fn ell(&self) -> u64;

    /// Degree `u` of the field where torsion rationality is tested.
    fn working_degree(&self) -> u32;

    /// Largest `n` with `J[l^n]` rational over the working field.
    fn torsion_depth(&self, v: VertexId, tag: Tag) -> Result<u32, OracleError>;

    /// Kernels of the rational `l`-isogenies at `v`, ascending.
    fn rational_kernels(&self, v: VertexId, tag: Tag) -> Result<Vec<ProjPoint>, OracleError>;

    /// The form `S_{l,J}` on `J[l^n]`, or `None` when `n = 0`.
    fn self_pairing(&self, v: VertexId, tag: Tag) -> Result<Option<SelfPairingPoly>, OracleError>;

    fn apply(&self, v: VertexId, k1: Option<ProjPoint>, k2: Option<ProjPoint>) -> Result<VertexId, OracleError>;

    /// `tag` component of the kernel of the dual step, read from the image of
    /// `J[ell]`. `None` when the backend cannot map torsion.
    fn dual_kernel(
        &self,
        _v: VertexId,
        _k1: Option<ProjPoint>,
        _k2: Option<ProjPoint>,
        _tag: Tag,
    ) -> Result<Option<ProjPoint>, OracleError> {
        Ok(None)
    }
}

/// Hides the image-of-torsion query so dual kernels go through enumeration.
pub struct WithoutImages<'a, O: ?Sized>(pub &'a O);

impl<O: IsogenyOracle + ?Sized> IsogenyOracle for WithoutImages<'_, O> {
    fn ell(&self) -> u64 {
        self.0.ell()
    }
    fn working_degree(&self) -> u32 {
        self.0.working_degree()
    }
    fn torsion_depth(&self, v: VertexId, tag: Tag) -> Result<u32, OracleError> {
        self.0.torsion_depth(v, tag)
    }
    fn rational_kernels(&self, v: VertexId, tag: Tag) -> Result<Vec<ProjPoint>, OracleError> {
        self.0.rational_kernels(v, tag)
    }
    fn self_pairing(&self, v: VertexId, tag: Tag) -> Result<Option<SelfPairingPoly>, OracleError> {
        self.0.self_pairing(v, tag)
    }
    fn apply(&self, v: VertexId, k1: Option<ProjPoint>, k2: Option<ProjPoint>) -> Result<VertexId, OracleError> {
        self.0.apply(v, k1, k2)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DfsError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("no chain reached the second stability level within {0} steps")]
    MaxDepth(u32),
    #[error("self-pairing form vanishes at vertex {0}; step 2 entered above the second stability level")]
    Degenerate(u64),
    #[error("no kernel with non-degenerate self-pairing at vertex {0}")]
    NoDescendingKernel(u64),
    #[error("dual of the step from vertex {0} not found among the kernels at its target")]
    DualNotFound(u64),
    #[error("only {found} rational kernels at vertex {vertex} for {chains} chains")]
    TooFewKernels { found: usize, vertex: u64, chains: usize },
    #[error("walked {walked} levels in the {tag} direction, deeper than the depth {depth}")]
    DepthMismatch { tag: &'static str, walked: u32, depth: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfsConfig {
    /// Chains in step 1. Three cover a split rim; fewer is only for experiments.
    pub chains: usize,
    pub max_depth: u32,
}

impl Default for DfsConfig {
    fn default() -> Self {
        Self { chains: 3, max_depth: 256 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub tag: Tag,
    pub stage: u8,
    pub chain: usize,
    pub from: VertexId,
    pub to: VertexId,
    pub k1: Option<ProjPoint>,
    pub k2: Option<ProjPoint>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Floor of rationality for `l`. When `gcd(u, ell) = 1` this is `J[l]` not
/// rational over the working field; otherwise some `l`-kernel is not rational.
pub fn is_floor<O: IsogenyOracle + ?Sized>(o: &O, v: VertexId, tag: Tag) -> Result<bool, OracleError> {
    if gcd(o.working_degree() as u64, o.ell()) == 1 {
        Ok(o.torsion_depth(v, tag)? == 0)
    } else {
        Ok((o.rational_kernels(v, tag)?.len() as u64) < o.ell() + 1)
    }
}

fn nonzero_pairing<O: IsogenyOracle + ?Sized>(o: &O, v: VertexId, tag: Tag) -> Result<bool, OracleError> {
    Ok(o.self_pairing(v, tag)?.is_some_and(|s| !s.is_zero()))
}

fn with_component(tag: Tag, k: Option<ProjPoint>, other: Option<ProjPoint>) -> (Option<ProjPoint>, Option<ProjPoint>) {
    match tag {
        Tag::L1 => (k, other),
        Tag::L2 => (other, k),
    }
}

/// A composite step moving by `k` in the `tag` direction and by the lowest
/// rational kernel in the other one. With no rational kernel there (an inert
/// rim of depth zero) the step is a single `l`-isogeny.
fn composite<O: IsogenyOracle + ?Sized>(
    o: &O,
    v: VertexId,
    tag: Tag,
    k: ProjPoint,
) -> Result<(Option<ProjPoint>, Option<ProjPoint>), OracleError> {
    let other = o.rational_kernels(v, tag.other())?.first().copied();
    Ok(with_component(tag, Some(k), other))
}

/// Dual kernels by enumeration: every rational `tag`-kernel at the target whose
/// `l`-isogeny lands where the `l'`-part of the step alone would land.
/// Returns all matches; more than one means the dual cannot be singled out.
pub fn identify_dual_fallback<O: IsogenyOracle + ?Sized>(
    o: &O,
    from: VertexId,
    k1: Option<ProjPoint>,
    k2: Option<ProjPoint>,
    tag: Tag,
) -> Result<Vec<ProjPoint>, DfsError> {
    let to = o.apply(from, k1, k2)?;
    let (o1, o2) = with_component(tag, None, match tag {
        Tag::L1 => k2,
        Tag::L2 => k1,
    });
    let back = o.apply(from, o1, o2)?;
    let mut out = Vec::new();
    for kappa in o.rational_kernels(to, tag)? {
        let (c1, c2) = with_component(tag, Some(kappa), None);
        if o.apply(to, c1, c2)? == back {
            out.push(kappa);
        }
    }
    if out.is_empty() {
        return Err(DfsError::DualNotFound(from));
    }
    Ok(out)
}

/// Forbidden set for the next step after moving `from` by `(k1, k2)`.
pub fn identify_dual_kernel<O: IsogenyOracle + ?Sized>(
    o: &O,
    from: VertexId,
    k1: Option<ProjPoint>,
    k2: Option<ProjPoint>,
    tag: Tag,
) -> Result<Vec<ProjPoint>, DfsError> {
    match o.dual_kernel(from, k1, k2, tag)? {
        Some(k) => Ok(vec![k]),
        None => identify_dual_fallback(o, from, k1, k2, tag),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step1Result {
    pub vertex: VertexId,
    pub distance: u32,
    pub trace: Vec<TraceStep>,
}

struct ChainState {
    vertex: VertexId,
    forbidden: Vec<ProjPoint>,
    alive: bool,
}

/// Step 1, up to the second stability level. Chains start with distinct kernels and never take the dual of
/// their previous step; the first chain to reach a vertex with `S != 0` (or the
/// floor) fixes the distance.
pub fn step1_find_stability<O: IsogenyOracle + ?Sized>(
    o: &O,
    start: VertexId,
    tag: Tag,
    cfg: &DfsConfig,
) -> Result<Step1Result, DfsError> {
    if is_floor(o, start, tag)? || nonzero_pairing(o, start, tag)? {
        return Ok(Step1Result { vertex: start, distance: 0, trace: vec![] });
    }
    let initial = o.rational_kernels(start, tag)?;
    if initial.len() < cfg.chains {
        return Err(DfsError::TooFewKernels { found: initial.len(), vertex: start, chains: cfg.chains });
    }
    let mut chains: Vec<ChainState> =
        (0..cfg.chains).map(|_| ChainState { vertex: start, forbidden: vec![], alive: true }).collect();
    let mut trace = Vec::new();
    for length in 1..=cfg.max_depth {
        for (i, chain) in chains.iter_mut().enumerate().filter(|(_, c)| c.alive) {
            let k = if length == 1 {
                initial[i]
            } else {
                match o.rational_kernels(chain.vertex, tag)?.into_iter().find(|k| !chain.forbidden.contains(k)) {
                    Some(k) => k,
                    None => {
                        chain.alive = false;
                        continue;
                    }
                }
            };
            let (k1, k2) = composite(o, chain.vertex, tag, k)?;
            let next = o.apply(chain.vertex, k1, k2)?;
            chain.forbidden = identify_dual_kernel(o, chain.vertex, k1, k2, tag)?;
            trace.push(TraceStep { tag, stage: 1, chain: i, from: chain.vertex, to: next, k1, k2 });
            chain.vertex = next;
            if nonzero_pairing(o, next, tag)? || is_floor(o, next, tag)? {
                return Ok(Step1Result { vertex: next, distance: length, trace });
            }
        }
        if chains.iter().all(|c| !c.alive) {
            break;
        }
    }
    Err(DfsError::MaxDepth(cfg.max_depth))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step2Result {
    pub distance: u32,
    pub trace: Vec<TraceStep>,
}

/// Step 2: from on or below the second stability level, take the lowest
/// kernel that is not a root of `S_{l,J}` until the floor.
pub fn step2_descend_to_floor<O: IsogenyOracle + ?Sized>(
    o: &O,
    start: VertexId,
    tag: Tag,
    cfg: &DfsConfig,
) -> Result<Step2Result, DfsError> {
    let mut v = start;
    let mut trace = Vec::new();
    for length in 0..=cfg.max_depth {
        if is_floor(o, v, tag)? {
            return Ok(Step2Result { distance: length, trace });
        }
        let s = match o.self_pairing(v, tag)? {
            Some(s) if !s.is_zero() => s,
            _ => return Err(DfsError::Degenerate(v)),
        };
        let mut pick = None;
        for k in o.rational_kernels(v, tag)? {
            if !s.is_root(k).map_err(|_| DfsError::Degenerate(v))? {
                pick = Some(k);
                break;
            }
        }
        let k = pick.ok_or(DfsError::NoDescendingKernel(v))?;
        let (k1, k2) = composite(o, v, tag, k)?;
        let next = o.apply(v, k1, k2)?;
        trace.push(TraceStep { tag, stage: 2, chain: 0, from: v, to: next, k1, k2 });
        v = next;
    }
    Err(DfsError::MaxDepth(cfg.max_depth))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionReport {
    pub distance_step1: u32,
    pub distance_step2: u32,
    /// `nu_{l,J}(pi - pibar)`.
    pub nu: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndRingReport {
    pub l1: DirectionReport,
    pub l2: DirectionReport,
    pub conductor_valuations: [u32; 2],
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub path_trace: Vec<TraceStep>,
}

impl EndRingReport {
    pub fn position(&self) -> LatticePosition {
        LatticePosition::new(self.conductor_valuations[0], self.conductor_valuations[1])
    }
}

/// Conductor valuations of `End(J)` at `l1, l2` for the vertex `start`, given
/// the depths `nu_{l_i,O_K}(pi - pibar)`. The two directions are searched
/// independently from `start`.
pub fn endomorphism_ring_local<O: IsogenyOracle + ?Sized>(
    o: &O,
    start: VertexId,
    depth: LatticePosition,
    cfg: &DfsConfig,
) -> Result<EndRingReport, DfsError> {
    let mut reports = Vec::with_capacity(2);
    let mut trace = Vec::new();
    for tag in Tag::BOTH {
        let s1 = step1_find_stability(o, start, tag, cfg)?;
        let s2 = step2_descend_to_floor(o, s1.vertex, tag, cfg)?;
        let nu = s1.distance + s2.distance;
        let h = depth.get(tag.index());
        if nu > h {
            return Err(DfsError::DepthMismatch { tag: tag.name(), walked: nu, depth: h });
        }
        trace.extend(s1.trace);
        trace.extend(s2.trace);
        reports.push(DirectionReport { distance_step1: s1.distance, distance_step2: s2.distance, nu });
    }
    let l2 = reports.pop().expect("two directions");
    let l1 = reports.pop().expect("two directions");
    let conductor_valuations = [depth.nu1 - l1.nu, depth.nu2 - l2.nu];
    Ok(EndRingReport { l1, l2, conductor_valuations, path_trace: trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmorder::KSplitting;
    use crate::graphmodel::{build_graph, Direction, Graph, GraphSpec, Labeling};

    fn graph(ell: u64, h: (u32, u32), s: [KSplitting; 2]) -> Graph {
        build_graph(&GraphSpec::new(ell, LatticePosition::new(h.0, h.1), s).with_seed(11)).unwrap()
    }

    fn edge_direction(g: &Graph, st: &TraceStep) -> Direction {
        let k = match st.tag {
            Tag::L1 => st.k1,
            Tag::L2 => st.k2,
        }
        .unwrap();
        g.out_edges(st.from, st.tag).unwrap().into_iter().find(|e| e.kernel == k).unwrap().direction
    }

    #[test]
    fn rim_of_maximal_order() {
        let g = graph(3, (0, 0), [KSplitting::Split, KSplitting::Inert]);
        let r = endomorphism_ring_local(&g, 0, LatticePosition::new(0, 0), &DfsConfig::default()).unwrap();
        assert_eq!(r.conductor_valuations, [0, 0]);
    }

    #[test]
    fn inert_split_distances() {
        let g = graph(3, (2, 1), [KSplitting::Inert, KSplitting::Split]);
        let r = endomorphism_ring_local(&g, g.rim_vertex(), LatticePosition::new(2, 1), &DfsConfig::default()).unwrap();
        assert_eq!((r.l1.nu, r.l2.nu), (2, 1));
        assert_eq!(r.conductor_valuations, [0, 0]);
    }

    #[test]
    fn every_vertex_of_small_graphs() {
        for s1 in [KSplitting::Split, KSplitting::Ramified, KSplitting::Inert] {
            for s2 in [KSplitting::Split, KSplitting::Inert] {
                let g = graph(3, (2, 1), [s1, s2]);
                let depth = g.spec().depth;
                for v in g.vertices() {
                    let r = endomorphism_ring_local(&g, v.id, depth, &DfsConfig::default()).unwrap();
                    assert_eq!(r.position(), v.position, "{s1:?} {s2:?} vertex {v:?}");
                    for st in r.path_trace.iter().filter(|s| s.stage == 2) {
                        assert_eq!(edge_direction(&g, st), Direction::Descending);
                    }
                }
            }
        }
    }

    #[test]
    fn step1_distance_to_stability_level() {
        for s in [KSplitting::Split, KSplitting::Ramified, KSplitting::Inert] {
            let spec = GraphSpec::new(3, LatticePosition::new(6, 1), [s, KSplitting::Split])
                .with_torsion_cap([Some(2), None])
                .with_seed(5);
            let g = build_graph(&spec).unwrap();
            // k >= 1 once h - j < 2E = 4, i.e. from level 3 on.
            let r = step1_find_stability(&g, 0, Tag::L1, &DfsConfig::default()).unwrap();
            assert_eq!(r.distance, 3);
            assert_eq!(g.vertex(r.vertex).unwrap().position.nu1, 3);
            let s2 = step2_descend_to_floor(&g, r.vertex, Tag::L1, &DfsConfig::default()).unwrap();
            assert_eq!(s2.distance, 3);
        }
    }

    #[test]
    fn inert_chains_all_descend() {
        let spec = GraphSpec::new(3, LatticePosition::new(5, 0), [KSplitting::Inert, KSplitting::Inert])
            .with_torsion_cap([Some(1), None]);
        let g = build_graph(&spec).unwrap();
        let r = step1_find_stability(&g, 0, Tag::L1, &DfsConfig::default()).unwrap();
        assert_eq!(r.distance, 4);
        // the first round alone has each chain take a descending step
        for st in &r.trace[..3] {
            assert_eq!(edge_direction(&g, st), Direction::Descending);
        }
    }

    #[test]
    fn two_chains_miss_the_descent_on_a_split_rim() {
        let spec = GraphSpec::new(3, LatticePosition::new(4, 0), [KSplitting::Split, KSplitting::Inert])
            .with_torsion_cap([Some(1), None])
            .with_labeling(Labeling::NonDescendingFirst);
        let g = build_graph(&spec).unwrap();
        let cfg = DfsConfig { chains: 2, max_depth: 40 };
        assert_eq!(step1_find_stability(&g, 0, Tag::L1, &cfg), Err(DfsError::MaxDepth(40)));
        let r = step1_find_stability(&g, 0, Tag::L1, &DfsConfig::default()).unwrap();
        assert_eq!(r.distance, 3);
    }

    #[test]
    fn fallback_dual_contains_fast_dual() {
        let spec = GraphSpec::new(5, LatticePosition::new(2, 2), [KSplitting::Split, KSplitting::Ramified])
            .with_rim([3, 2])
            .with_seed(2);
        let g = build_graph(&spec).unwrap();
        let mut checked = 0;
        for v in (0..g.vertex_count()).step_by(7) {
            for (e1, e2) in g.ll_edges(v).unwrap().into_iter().take(3) {
                for tag in Tag::BOTH {
                    let fast = identify_dual_kernel(&g, v, Some(e1.kernel), Some(e2.kernel), tag).unwrap();
                    let slow = identify_dual_kernel(&WithoutImages(&g), v, Some(e1.kernel), Some(e2.kernel), tag)
                        .unwrap();
                    assert_eq!(fast.len(), 1);
                    assert!(slow.contains(&fast[0]));
                    if slow.len() == 1 {
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn deterministic_traces() {
        let spec = GraphSpec::new(5, LatticePosition::new(3, 2), [KSplitting::Split, KSplitting::Split])
            .with_rim([2, 3])
            .with_torsion_cap([Some(1), Some(1)])
            .with_seed(99);
        let g = build_graph(&spec).unwrap();
        let a = endomorphism_ring_local(&g, 0, spec.depth, &DfsConfig::default()).unwrap();
        let b = endomorphism_ring_local(&build_graph(&spec).unwrap(), 0, spec.depth, &DfsConfig::default()).unwrap();
        assert_eq!(a, b);
        assert!(!a.path_trace.is_empty());
    }
}
