//! Model `{l1, l2}`-isogeny graphs. Each direction is a volcano of depth `h_i`
//! over a rim of locally maximal vertices, and the graph is their product.
//! Vertices carry ground-truth levels, kernel labels in `P^1(F_ell)` for each
//! `l_i`-isogeny and a self-pairing form whose roots are the non-descending kernels.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::cmorder::{KSplitting, LatticePosition};
use crate::dfs::{IsogenyOracle, OracleError, VertexId};
use crate::pairingmodel::{k_from_valuation, proj_points, ProjPoint, SelfPairingPoly};
use crate::realquad::is_prime_u64;

pub const GRAPH_SCHEMA: &str = "g2rm-graph/1";
pub const DEFAULT_VERTEX_BOUND: u64 = 2_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid graph spec: {0}")]
    InvalidSpec(String),
    #[error("graph has {count} vertices, above the bound {bound}")]
    TooLarge { count: u64, bound: u64 },
    #[error("unknown vertex {0}")]
    UnknownVertex(u64),
    #[error("unknown edge {0}")]
    UnknownEdge(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    L1,
    L2,
}

impl Tag {
    pub const BOTH: [Tag; 2] = [Tag::L1, Tag::L2];

    pub fn index(self) -> usize {
        match self {
            Tag::L1 => 0,
            Tag::L2 => 1,
        }
    }

    pub fn other(self) -> Tag {
        match self {
            Tag::L1 => Tag::L2,
            Tag::L2 => Tag::L1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Tag::L1 => "l1",
            Tag::L2 => "l2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Ascending,
    Horizontal,
    Descending,
}

impl Direction {
    pub fn reverse(self) -> Direction {
        match self {
            Direction::Ascending => Direction::Descending,
            Direction::Horizontal => Direction::Horizontal,
            Direction::Descending => Direction::Ascending,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Ascending => "ascending",
            Direction::Horizontal => "horizontal",
            Direction::Descending => "descending",
        }
    }
}

/// How kernel labels are attached to the `ell + 1` isogenies at a vertex.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Labeling {
    /// Seeded random permutation of `P^1(F_ell)`.
    #[default]
    Shuffled,
    /// Non-descending kernels take the smallest points. Adversarial for
    /// searches that break ties by the lowest kernel.
    NonDescendingFirst,
}

fn default_rim() -> [u32; 2] {
    [1, 1]
}

fn default_degree() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub ell: u64,
    pub depth: LatticePosition,
    pub splitting: [KSplitting; 2],
    #[serde(default = "default_rim")]
    pub rim: [u32; 2],
    /// `nu(pi^r - pibar^r) - nu(pi - pibar)` per direction.
    #[serde(default)]
    pub delta: [u32; 2],
    /// `nu_l(A - 1)` for `pi^r = A + B eta`: caps the torsion depth. `None` is unbounded.
    #[serde(default)]
    pub torsion_cap: [Option<u32>; 2],
    /// Degree `r` of the field where torsion is tested.
    #[serde(default = "default_degree")]
    pub working_degree: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub labeling: Labeling,
}

impl GraphSpec {
    pub fn new(ell: u64, depth: LatticePosition, splitting: [KSplitting; 2]) -> Self {
        Self {
            ell,
            depth,
            splitting,
            rim: default_rim(),
            delta: [0, 0],
            torsion_cap: [None, None],
            working_degree: 1,
            seed: 0,
            labeling: Labeling::Shuffled,
        }
    }

    pub fn with_rim(mut self, rim: [u32; 2]) -> Self {
        self.rim = rim;
        self
    }

    pub fn with_delta(mut self, delta: [u32; 2], working_degree: u32) -> Self {
        self.delta = delta;
        self.working_degree = working_degree;
        self
    }

    pub fn with_torsion_cap(mut self, cap: [Option<u32>; 2]) -> Self {
        self.torsion_cap = cap;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_labeling(mut self, labeling: Labeling) -> Self {
        self.labeling = labeling;
        self
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let bad = |s: String| Err(GraphError::InvalidSpec(s));
        if self.ell == 2 || !is_prime_u64(self.ell) {
            return bad(format!("ell = {} is not an odd prime", self.ell));
        }
        if self.working_degree == 0 {
            return bad("working degree must be positive".into());
        }
        for i in 0..2 {
            let h = self.depth.get(i);
            let name = Tag::BOTH[i].name();
            match (self.splitting[i], self.rim[i]) {
                (_, 0) => return bad(format!("{name}: rim count must be positive")),
                (KSplitting::Inert, r) if r != 1 => {
                    return bad(format!("{name}: an inert rim has no horizontal edges, rim count {r} would disconnect it"))
                }
                (KSplitting::Ramified, r) if r > 2 => {
                    return bad(format!("{name}: a ramified rim pairs vertices, rim count {r} > 2"))
                }
                _ => {}
            }
            if self.delta[i] > 0 && self.working_degree as u64 % self.ell != 0 {
                return bad(format!("{name}: delta > 0 needs ell | r"));
            }
            if h > 0 && self.torsion_cap[i] == Some(0) {
                return bad(format!("{name}: torsion cap 0 leaves no rational l-torsion above the floor"));
            }
            if self.ell.checked_pow(h + self.delta[i] + 1).map_or(true, |m| m > 1 << 40) {
                return bad(format!("{name}: ell^(h + delta) too large for the pairing model"));
            }
        }
        Ok(())
    }

    fn volcano(&self, i: usize) -> Volcano {
        Volcano {
            ell: self.ell,
            depth: self.depth.get(i),
            splitting: self.splitting[i],
            rim: self.rim[i],
            delta: self.delta[i],
            cap: self.torsion_cap[i],
        }
    }

    pub fn from_json(s: &str) -> Result<Self, GraphError> {
        let spec: GraphSpec = serde_json::from_str(s).map_err(|e| GraphError::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }
}

/// Address of a vertex in one volcano: a rim index and the descending choices below it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalNode {
    pub rim: u32,
    pub path: Vec<u32>,
}

impl LocalNode {
    pub fn level(&self) -> u32 {
        self.path.len() as u32
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    Fwd,
    Bwd,
    Partner,
    Up,
    Down(u32),
}

impl Move {
    pub fn direction(self) -> Direction {
        match self {
            Move::Fwd | Move::Bwd | Move::Partner => Direction::Horizontal,
            Move::Up => Direction::Ascending,
            Move::Down(_) => Direction::Descending,
        }
    }
}

/// One direction of the product graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Volcano {
    pub ell: u64,
    pub depth: u32,
    pub splitting: KSplitting,
    pub rim: u32,
    pub delta: u32,
    pub cap: Option<u32>,
}

impl Volcano {
    pub fn horizontal_degree(&self) -> u64 {
        match self.splitting {
            KSplitting::Split => 2,
            KSplitting::Ramified => 1,
            KSplitting::Inert => 0,
        }
    }

    /// Descending edges at the rim: `ell - 1`, `ell` or `ell + 1`.
    pub fn rim_descent(&self) -> u64 {
        self.ell + 1 - self.horizontal_degree()
    }

    pub fn level_size(&self, j: u32) -> u64 {
        match j {
            0 => self.rim as u64,
            _ => self.rim as u64 * self.rim_descent() * self.ell.pow(j - 1),
        }
    }

    pub fn size(&self) -> u64 {
        (0..=self.depth).map(|j| self.level_size(j)).sum()
    }

    fn offset(&self, j: u32) -> u64 {
        (0..j).map(|i| self.level_size(i)).sum()
    }

    pub fn index_of(&self, node: &LocalNode) -> u64 {
        let mut idx = node.rim as u64;
        for (t, &c) in node.path.iter().enumerate() {
            idx = idx * if t == 0 { self.rim_descent() } else { self.ell } + c as u64;
        }
        self.offset(node.level()) + idx
    }

    pub fn node_at(&self, index: u64) -> Option<LocalNode> {
        let mut j = 0;
        let mut idx = index;
        while idx >= self.level_size(j) {
            idx -= self.level_size(j);
            j += 1;
            if j > self.depth {
                return None;
            }
        }
        let mut path = vec![0u32; j as usize];
        for t in (0..j as usize).rev() {
            let base = if t == 0 { self.rim_descent() } else { self.ell };
            path[t] = (idx % base) as u32;
            idx /= base;
        }
        Some(LocalNode { rim: idx as u32, path })
    }

    /// The `ell + 1` isogeny slots at `node`, non-descending ones first.
    pub fn moves(&self, node: &LocalNode) -> Vec<Move> {
        let mut out = Vec::with_capacity(self.ell as usize + 1);
        let downs = if node.level() == 0 {
            match self.splitting {
                KSplitting::Split => out.extend([Move::Fwd, Move::Bwd]),
                KSplitting::Ramified => out.push(Move::Partner),
                KSplitting::Inert => {}
            }
            self.rim_descent()
        } else {
            out.push(Move::Up);
            self.ell
        };
        out.extend((0..downs as u32).map(Move::Down));
        out
    }

    /// Rational over the base field: everything above the floor, and on the
    /// floor only the ascending isogeny (or the horizontals when `h = 0`).
    pub fn is_rational(&self, node: &LocalNode, mv: Move) -> bool {
        node.level() < self.depth || mv.direction() != Direction::Descending
    }

    /// Target of `mv` and the move of its dual.
    pub fn step(&self, node: &LocalNode, mv: Move) -> (LocalNode, Move) {
        let r = self.rim;
        match mv {
            Move::Fwd => (LocalNode { rim: (node.rim + 1) % r, path: vec![] }, Move::Bwd),
            Move::Bwd => (LocalNode { rim: (node.rim + r - 1) % r, path: vec![] }, Move::Fwd),
            Move::Partner => (LocalNode { rim: (node.rim + 1) % r, path: vec![] }, Move::Partner),
            Move::Up => {
                let mut path = node.path.clone();
                let last = path.pop().expect("ascending from the rim");
                (LocalNode { rim: node.rim, path }, Move::Down(last))
            }
            Move::Down(c) => {
                let mut path = node.path.clone();
                path.push(c);
                (LocalNode { rim: node.rim, path }, Move::Up)
            }
        }
    }

    /// `nu_{l,J}(pi^r - pibar^r)` at `node`.
    pub fn nu_r(&self, node: &LocalNode) -> u32 {
        self.depth - node.level() + self.delta
    }

    /// Largest `n` with `J[l^n]` rational over the working field.
    pub fn torsion_depth(&self, node: &LocalNode) -> u32 {
        let n = self.nu_r(node);
        self.cap.map_or(n, |e| e.min(n))
    }

    pub fn pairing_exponent(&self, node: &LocalNode) -> u32 {
        k_from_valuation(self.torsion_depth(node), self.nu_r(node))
    }
}

fn fnv(words: impl IntoIterator<Item = u64>) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for w in words {
        for b in w.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

fn node_words(tag: Tag, node: &LocalNode) -> impl Iterator<Item = u64> + '_ {
    [tag.index() as u64, node.rim as u64, node.path.len() as u64]
        .into_iter()
        .chain(node.path.iter().map(|&c| c as u64))
}

fn smallest_nonresidue(ell: u64) -> u64 {
    (2..ell)
        .find(|&x| {
            let (mut r, mut b, mut e) = (1u64, x, (ell - 1) / 2);
            while e > 0 {
                if e & 1 == 1 {
                    r = r * b % ell;
                }
                b = b * b % ell;
                e >>= 1;
            }
            r == ell - 1
        })
        .expect("odd prime has a non-residue")
}

/// Local edge at a node: slot index, move, kernel, target and the dual's slot.
#[derive(Clone, Debug)]
struct LocalEdge {
    slot: usize,
    mv: Move,
    kernel: ProjPoint,
    target: LocalNode,
    dual_slot: usize,
}

#[derive(Clone, Debug)]
struct Model {
    spec: GraphSpec,
    vol: [Volcano; 2],
}

impl Model {
    fn new(spec: GraphSpec) -> Result<Self, GraphError> {
        spec.validate()?;
        let vol = [spec.volcano(0), spec.volcano(1)];
        Ok(Self { spec, vol })
    }

    fn rng(&self, tag: Tag, node: &LocalNode) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(fnv(std::iter::once(self.spec.seed).chain(node_words(tag, node))))
    }

    /// Kernel label of every slot, in slot order.
    fn labels(&self, tag: Tag, node: &LocalNode) -> Vec<ProjPoint> {
        let mut pts = proj_points(self.spec.ell);
        if self.spec.labeling == Labeling::Shuffled {
            pts.shuffle(&mut self.rng(tag, node));
        }
        pts
    }

    fn edges(&self, tag: Tag, node: &LocalNode, rational_only: bool) -> Vec<LocalEdge> {
        let vol = &self.vol[tag.index()];
        let labels = self.labels(tag, node);
        vol.moves(node)
            .into_iter()
            .enumerate()
            .filter(|&(_, mv)| !rational_only || vol.is_rational(node, mv))
            .map(|(slot, mv)| {
                let (target, dual) = vol.step(node, mv);
                let dual_slot = vol.moves(&target).iter().position(|&m| m == dual).expect("dual slot");
                LocalEdge { slot, mv, kernel: labels[slot], target, dual_slot }
            })
            .collect()
    }

    fn rational_kernels(&self, tag: Tag, node: &LocalNode) -> Vec<ProjPoint> {
        let mut ks: Vec<_> = self.edges(tag, node, true).into_iter().map(|e| e.kernel).collect();
        ks.sort();
        ks
    }

    fn step_by_kernel(&self, tag: Tag, node: &LocalNode, k: ProjPoint) -> Option<(LocalNode, ProjPoint)> {
        let e = self.edges(tag, node, true).into_iter().find(|e| e.kernel == k)?;
        let back = self.labels(tag, &e.target)[e.dual_slot];
        Some((e.target, back))
    }

    /// `ell^{n-k} (c Q + ell R)` modulo `ell^n`, where `Q` vanishes exactly at the
    /// kernels of the non-descending isogenies.
    fn self_pairing(&self, tag: Tag, node: &LocalNode) -> Option<SelfPairingPoly> {
        let vol = &self.vol[tag.index()];
        let n = vol.torsion_depth(node);
        if n == 0 {
            return None;
        }
        let ell = self.spec.ell;
        let k = vol.pairing_exponent(node);
        let labels = self.labels(tag, node);
        let roots: Vec<ProjPoint> = vol
            .moves(node)
            .iter()
            .zip(&labels)
            .filter(|(m, _)| m.direction() != Direction::Descending)
            .map(|(_, &p)| p)
            .collect();
        // linear form vanishing at (x1 : x2) is x2 a - x1 b
        let lin = |p: ProjPoint| [p.x2 as i128, -(p.x1 as i128)];
        let q: [i128; 3] = match roots.as_slice() {
            [] => [1, 0, -(smallest_nonresidue(ell) as i128)],
            [p] => {
                let [a, b] = lin(*p);
                [a * a, 2 * a * b, b * b]
            }
            [p, r] => {
                let ([a, b], [c, d]) = (lin(*p), lin(*r));
                [a * c, a * d + b * c, b * d]
            }
            _ => unreachable!("at most two non-descending isogenies"),
        };
        let m = ell.pow(n) as i128;
        let mut rng = self.rng(tag, node);
        rng.set_word_pos(1 << 20);
        let c = rng.gen_range(1..ell) as i128;
        let scale = ell.pow(n - k) as i128;
        let coeffs = q.map(|qi| {
            let r = rng.gen_range(0..ell.pow(n)) as i128;
            (scale * ((c * qi).rem_euclid(m) + ell as i128 * r)).rem_euclid(m) as i64
        });
        Some(SelfPairingPoly::new(ell, n, coeffs))
    }

    fn vertex(&self, id: u64, nodes: &[LocalNode; 2]) -> GraphVertex {
        GraphVertex {
            id,
            position: LatticePosition::new(nodes[0].level(), nodes[1].level()),
            n: [self.vol[0].torsion_depth(&nodes[0]), self.vol[1].torsion_depth(&nodes[1])],
            k: [self.vol[0].pairing_exponent(&nodes[0]), self.vol[1].pairing_exponent(&nodes[1])],
        }
    }

    fn apply(
        &self,
        v: VertexId,
        nodes: &[LocalNode; 2],
        ks: [Option<ProjPoint>; 2],
    ) -> Result<[LocalNode; 2], OracleError> {
        let mut out = nodes.clone();
        for tag in Tag::BOTH {
            if let Some(k) = ks[tag.index()] {
                let (t, _) = self
                    .step_by_kernel(tag, &nodes[tag.index()], k)
                    .ok_or(OracleError::NotRational { kernel: k, vertex: v })?;
                out[tag.index()] = t;
            }
        }
        Ok(out)
    }

    fn dual_kernel(&self, nodes: &[LocalNode; 2], ks: [Option<ProjPoint>; 2], tag: Tag) -> Option<ProjPoint> {
        let k = ks[tag.index()]?;
        self.step_by_kernel(tag, &nodes[tag.index()], k).map(|(_, back)| back)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphVertex {
    pub id: u64,
    pub position: LatticePosition,
    /// Torsion depth per direction.
    pub n: [u32; 2],
    /// Pairing exponent per direction.
    pub k: [u32; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsogenyEdge {
    pub id: u64,
    pub tag: Tag,
    pub direction: Direction,
    pub from: u64,
    pub to: u64,
    pub dual: u64,
    pub kernel: ProjPoint,
}

/// Fully indexed product graph. Vertices are numbered `i1 * N2 + i2` from the
/// per-direction indices, and edges are derived on demand, so the structure is
/// immutable and safe to share between threads.
#[derive(Clone, Debug)]
pub struct Graph {
    model: Model,
    sizes: [u64; 2],
}

pub fn build_graph(spec: &GraphSpec) -> Result<Graph, GraphError> {
    build_graph_with_bound(spec, DEFAULT_VERTEX_BOUND)
}

pub fn build_graph_with_bound(spec: &GraphSpec, bound: u64) -> Result<Graph, GraphError> {
    let model = Model::new(spec.clone())?;
    let sizes = [model.vol[0].size(), model.vol[1].size()];
    let count = sizes[0] * sizes[1];
    if count > bound {
        return Err(GraphError::TooLarge { count, bound });
    }
    Ok(Graph { model, sizes })
}

impl Graph {
    pub fn spec(&self) -> &GraphSpec {
        &self.model.spec
    }

    pub fn volcano(&self, tag: Tag) -> &Volcano {
        &self.model.vol[tag.index()]
    }

    pub fn vertex_count(&self) -> u64 {
        self.sizes[0] * self.sizes[1]
    }

    fn nodes(&self, v: u64) -> Result<[LocalNode; 2], GraphError> {
        if v >= self.vertex_count() {
            return Err(GraphError::UnknownVertex(v));
        }
        let a = self.model.vol[0].node_at(v / self.sizes[1]).expect("index in range");
        let b = self.model.vol[1].node_at(v % self.sizes[1]).expect("index in range");
        Ok([a, b])
    }

    fn id_of(&self, nodes: &[LocalNode; 2]) -> u64 {
        self.model.vol[0].index_of(&nodes[0]) * self.sizes[1] + self.model.vol[1].index_of(&nodes[1])
    }

    /// The vertex on both rims with rim indices `(0, 0)`.
    pub fn rim_vertex(&self) -> u64 {
        0
    }

    pub fn vertex(&self, v: u64) -> Result<GraphVertex, GraphError> {
        Ok(self.model.vertex(v, &self.nodes(v)?))
    }

    pub fn vertices(&self) -> impl Iterator<Item = GraphVertex> + '_ {
        (0..self.vertex_count()).map(|v| self.vertex(v).expect("in range"))
    }

    fn edge_id(&self, from: u64, tag: Tag, slot: usize) -> u64 {
        (from * 2 + tag.index() as u64) * (self.model.spec.ell + 1) + slot as u64
    }

    fn edges_at(&self, v: u64, tag: Tag, rational_only: bool) -> Result<Vec<IsogenyEdge>, GraphError> {
        let nodes = self.nodes(v)?;
        Ok(self
            .model
            .edges(tag, &nodes[tag.index()], rational_only)
            .into_iter()
            .map(|e| {
                let mut target = nodes.clone();
                target[tag.index()] = e.target;
                let to = self.id_of(&target);
                IsogenyEdge {
                    id: self.edge_id(v, tag, e.slot),
                    tag,
                    direction: e.mv.direction(),
                    from: v,
                    to,
                    dual: self.edge_id(to, tag, e.dual_slot),
                    kernel: e.kernel,
                }
            })
            .collect())
    }

    /// Rational `l`-isogenies leaving `v`.
    pub fn out_edges(&self, v: u64, tag: Tag) -> Result<Vec<IsogenyEdge>, GraphError> {
        self.edges_at(v, tag, true)
    }

    /// Looks up an edge by id, including isogenies that are not rational.
    pub fn edge(&self, id: u64) -> Result<IsogenyEdge, GraphError> {
        let slots = self.model.spec.ell + 1;
        let (rest, slot) = (id / slots, id % slots);
        let (v, tag) = (rest / 2, Tag::BOTH[(rest % 2) as usize]);
        self.edges_at(v, tag, false)
            .map_err(|_| GraphError::UnknownEdge(id))?
            .into_iter()
            .find(|e| e.id == id)
            .ok_or(GraphError::UnknownEdge(id))
            .map(|e| {
                debug_assert_eq!(e.id % slots, slot);
                e
            })
    }

    /// All rational edges, by source vertex then tag.
    pub fn edges(&self) -> impl Iterator<Item = IsogenyEdge> + '_ {
        (0..self.vertex_count()).flat_map(move |v| {
            Tag::BOTH.into_iter().flat_map(move |t| self.out_edges(v, t).expect("in range"))
        })
    }

    /// Composite `(ell, ell)`-steps: every rational `l1`-edge paired with every rational `l2`-edge.
    pub fn ll_edges(&self, v: u64) -> Result<Vec<(IsogenyEdge, IsogenyEdge)>, GraphError> {
        let e1 = self.out_edges(v, Tag::L1)?;
        let e2 = self.out_edges(v, Tag::L2)?;
        Ok(e1.iter().flat_map(|a| e2.iter().map(move |b| (a.clone(), b.clone()))).collect())
    }

    pub fn level_counts(&self) -> BTreeMap<LatticePosition, u64> {
        let [a, b] = &self.model.vol;
        let mut out = BTreeMap::new();
        for i in 0..=a.depth {
            for j in 0..=b.depth {
                out.insert(LatticePosition::new(i, j), a.level_size(i) * b.level_size(j));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let vertices: Vec<_> = self
            .vertices()
            .map(|v| json!({"id": v.id, "nu1": v.position.nu1, "nu2": v.position.nu2}))
            .collect();
        let edges: Vec<_> = self
            .edges()
            .map(|e| {
                json!({"id": e.id, "from": e.from, "to": e.to, "tag": e.tag, "dir": e.direction, "dual": e.dual})
            })
            .collect();
        json!({"schema": GRAPH_SCHEMA, "spec": self.model.spec, "vertices": vertices, "edges": edges})
    }
}

/// DOT rendering with one rank per level pair; `l1` edges solid, `l2` edges dashed.
pub fn export_dot(g: &Graph) -> String {
    let mut out = String::from("digraph isogenies {\n  node [shape=circle, fontsize=9];\n");
    let mut by_level: BTreeMap<LatticePosition, Vec<u64>> = BTreeMap::new();
    for v in g.vertices() {
        by_level.entry(v.position).or_default().push(v.id);
    }
    for (pos, ids) in &by_level {
        let _ = write!(out, "  {{ rank=same; // level ({}, {})\n   ", pos.nu1, pos.nu2);
        for id in ids {
            let _ = write!(out, " v{id} [label=\"{},{}\"];", pos.nu1, pos.nu2);
        }
        out.push_str("\n  }\n");
    }
    for e in g.edges() {
        let style = match e.tag {
            Tag::L1 => "color=orange",
            Tag::L2 => "color=violet, style=dashed",
        };
        let _ = writeln!(out, "  v{} -> v{} [{style}, label=\"{}\"];", e.from, e.to, &e.direction.name()[..1]);
    }
    out.push_str("}\n");
    out
}

/// Graph that materializes vertices only as they are reached. Ids are hashes
/// of the vertex address under the seed. The memo table sits in a `RefCell`,
/// so a `LazyGraph` must stay on one thread.
#[derive(Debug)]
pub struct LazyGraph {
    model: Model,
    memo: RefCell<HashMap<u64, [LocalNode; 2]>>,
}

impl LazyGraph {
    pub fn new(spec: &GraphSpec) -> Result<Self, GraphError> {
        Ok(Self { model: Model::new(spec.clone())?, memo: RefCell::new(HashMap::new()) })
    }

    pub fn spec(&self) -> &GraphSpec {
        &self.model.spec
    }

    fn intern(&self, nodes: [LocalNode; 2]) -> u64 {
        let words = [Tag::L1, Tag::L2].into_iter().zip(&nodes).flat_map(|(t, n)| node_words(t, n).collect::<Vec<_>>());
        let id = fnv(std::iter::once(self.model.spec.seed ^ 0x5eed).chain(words));
        let mut memo = self.memo.borrow_mut();
        let prev = memo.entry(id).or_insert_with(|| nodes.clone());
        assert_eq!(*prev, nodes, "vertex id collision");
        id
    }

    fn nodes(&self, v: u64) -> Result<[LocalNode; 2], GraphError> {
        self.memo.borrow().get(&v).cloned().ok_or(GraphError::UnknownVertex(v))
    }

    pub fn rim_vertex(&self) -> u64 {
        let rim = LocalNode { rim: 0, path: vec![] };
        self.intern([rim.clone(), rim])
    }

    /// A vertex with uniformly random level in each direction, then a uniform address on that level.
    pub fn random_vertex<R: Rng>(&self, rng: &mut R) -> u64 {
        let nodes = self.model.vol.clone().map(|vol| {
            let j = rng.gen_range(0..=vol.depth);
            let off: u64 = (0..j).map(|i| vol.level_size(i)).sum();
            vol.node_at(off + rng.gen_range(0..vol.level_size(j))).expect("in range")
        });
        self.intern(nodes)
    }

    pub fn vertex(&self, v: u64) -> Result<GraphVertex, GraphError> {
        Ok(self.model.vertex(v, &self.nodes(v)?))
    }

    pub fn out_edges(&self, v: u64, tag: Tag) -> Result<Vec<IsogenyEdge>, GraphError> {
        let nodes = self.nodes(v)?;
        Ok(self
            .model
            .edges(tag, &nodes[tag.index()], true)
            .into_iter()
            .map(|e| {
                let mut target = nodes.clone();
                target[tag.index()] = e.target;
                let to = self.intern(target);
                let eid = |x: u64, s: usize| fnv([x, tag.index() as u64, s as u64]);
                IsogenyEdge {
                    id: eid(v, e.slot),
                    tag,
                    direction: e.mv.direction(),
                    from: v,
                    to,
                    dual: eid(to, e.dual_slot),
                    kernel: e.kernel,
                }
            })
            .collect())
    }

    pub fn visited(&self) -> usize {
        self.memo.borrow().len()
    }
}

impl From<GraphError> for OracleError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::UnknownVertex(v) => OracleError::UnknownVertex(v),
            other => OracleError::Backend(other.to_string()),
        }
    }
}

macro_rules! model_oracle {
    ($ty:ty) => {
        impl IsogenyOracle for $ty {
            fn ell(&self) -> u64 {
                self.model.spec.ell
            }

            fn working_degree(&self) -> u32 {
                self.model.spec.working_degree
            }

            fn torsion_depth(&self, v: VertexId, tag: Tag) -> Result<u32, OracleError> {
                let nodes = self.nodes(v)?;
                Ok(self.model.vol[tag.index()].torsion_depth(&nodes[tag.index()]))
            }

            fn rational_kernels(&self, v: VertexId, tag: Tag) -> Result<Vec<ProjPoint>, OracleError> {
                let nodes = self.nodes(v)?;
                Ok(self.model.rational_kernels(tag, &nodes[tag.index()]))
            }

            fn self_pairing(&self, v: VertexId, tag: Tag) -> Result<Option<SelfPairingPoly>, OracleError> {
                let nodes = self.nodes(v)?;
                Ok(self.model.self_pairing(tag, &nodes[tag.index()]))
            }

            fn apply(&self, v: VertexId, k1: Option<ProjPoint>, k2: Option<ProjPoint>) -> Result<VertexId, OracleError> {
                let nodes = self.nodes(v)?;
                let target = self.model.apply(v, &nodes, [k1, k2])?;
                Ok(self.register(target))
            }

            fn dual_kernel(
                &self,
                v: VertexId,
                k1: Option<ProjPoint>,
                k2: Option<ProjPoint>,
                tag: Tag,
            ) -> Result<Option<ProjPoint>, OracleError> {
                let nodes = self.nodes(v)?;
                Ok(self.model.dual_kernel(&nodes, [k1, k2], tag))
            }
        }
    };
}

impl Graph {
    fn register(&self, nodes: [LocalNode; 2]) -> u64 {
        self.id_of(&nodes)
    }
}

impl LazyGraph {
    fn register(&self, nodes: [LocalNode; 2]) -> u64 {
        self.intern(nodes)
    }
}

model_oracle!(Graph);
model_oracle!(LazyGraph);
