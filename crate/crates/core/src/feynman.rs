//! Feynman graphs of cubic BF theory on the half-line: enumeration up to isomorphism,
//! graded weights evaluated in tree coordinates, the tree-level RG flow, the QME obstruction
//! wheels and the diagrams computing the differential on observables.
//!
//! Sign conventions. Every half-edge carries a homogeneous component of a field. Zero-form
//! components (A₀, B₀) are odd, one-form components are even. An interaction vertex is the
//! ordered triple (A slot 0, A slot 1, B slot) with weight (−1)^{|slot 0|} f^{ab}_c, which is
//! graded symmetric in its A slots. Edges contract the pair (B end, A end) and the leftover
//! tails are sorted into input order, both with Koszul signs. Weights are then invariant
//! under relabelling, so sums over isomorphism classes with 1/|Aut| are well defined.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::clifford::next_permutation;
use crate::extrapolate::{geometric_schedule, limit_extrapolate, ExtrapolateError, Limit};
use crate::kernels::{gaussian, propagator_noninvariant, Cutoff, KernelError, KernelScale};
use crate::lie::{LieAlgebra, LieError, PolyFrame};
use crate::probe::Probe;
use crate::quad::{integrate, QuadError, Tolerance};
use crate::scalar::{self, Scalar};
use crate::superpoly::{Exps, Op, Operator, Poly};

/// Largest graph order the enumerator accepts.
pub const ORDER_BOUND: usize = 6;
const MAXV: usize = 8;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum FeynmanError {
    #[error("order {order} exceeds the enumeration bound {bound}")]
    BoundExceeded { order: usize, bound: usize },
    #[error("malformed graph: {0}")]
    Malformed(&'static str),
    #[error("graph has {expected} tails but {got} inputs were given")]
    Arity { expected: usize, got: usize },
    #[error("input {0} does not fit the field of its tail")]
    Channel(usize),
    #[error("zero-form A input {0} must vanish at the boundary")]
    Boundary(usize),
    #[error("sign assignment has {got} entries for {expected} edges")]
    Signs { expected: usize, got: usize },
    #[error("observable must be a polynomial of degree at most {max} in the allowed generators")]
    Observable { max: usize },
    #[error("bulk insertion point must be positive, got {0}")]
    BulkPoint(f64),
    #[error("every ε must lie strictly below L")]
    Schedule,
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Extrapolate(#[from] ExtrapolateError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexKind {
    /// Cubic vertex with two A slots and one B slot.
    Interaction,
    /// Insertion of an observable; its half-edges are interchangeable.
    Observable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub genus: u8,
    pub kind: VertexKind,
}

impl Vertex {
    pub const INTERACTION: Vertex = Vertex { genus: 0, kind: VertexKind::Interaction };
    pub const OBSERVABLE: Vertex = Vertex { genus: 0, kind: VertexKind::Observable };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKernel {
    Propagator,
    HeatKernel,
}

/// Kernel of an edge and the index of the scale it is evaluated at. A heat-kernel edge
/// uses the lower end ε of its scale as heat time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeLabel {
    pub kernel: EdgeKernel,
    pub scale: u8,
}

impl EdgeLabel {
    pub const PROPAGATOR: EdgeLabel = EdgeLabel { kernel: EdgeKernel::Propagator, scale: 0 };
    pub const HEAT: EdgeLabel = EdgeLabel { kernel: EdgeKernel::HeatKernel, scale: 0 };

    pub fn propagator(scale: u8) -> Self {
        EdgeLabel { kernel: EdgeKernel::Propagator, scale }
    }
}

/// Directed edge from the B slot of `source` to an A slot of `target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub label: EdgeLabel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tail {
    pub vertex: usize,
    pub field: Field,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Half {
    Source(usize),
    Target(usize),
    Tail(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeynmanGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    tails: Vec<Tail>,
    /// Slots (A0, A1, B) of each interaction vertex.
    slots: Vec<[Option<Half>; 3]>,
    aut: u64,
}

impl FeynmanGraph {
    /// Builds the graph, filling every free interaction slot with a tail (A tails first, then
    /// the B tail, vertex by vertex) and computing |Aut|.
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self, FeynmanError> {
        let n = vertices.len();
        if n == 0 || n > MAXV {
            return Err(FeynmanError::Malformed("vertex count out of range"));
        }
        if edges.iter().any(|e| e.source >= n || e.target >= n) {
            return Err(FeynmanError::Malformed("edge endpoint out of range"));
        }
        if edges.iter().filter(|e| e.label.kernel == EdgeKernel::HeatKernel).count() > 1 {
            return Err(FeynmanError::Malformed("more than one heat-kernel edge"));
        }
        let mut tails = Vec::new();
        let mut slots = vec![[None; 3]; n];
        for (v, vx) in vertices.iter().enumerate() {
            if vx.kind != VertexKind::Interaction {
                continue;
            }
            let ins: Vec<usize> = (0..edges.len()).filter(|&e| edges[e].target == v).collect();
            let outs: Vec<usize> = (0..edges.len()).filter(|&e| edges[e].source == v).collect();
            if ins.len() > 2 || outs.len() > 1 {
                return Err(FeynmanError::Malformed("interaction vertex must be trivalent with two A slots and one B slot"));
            }
            for (k, &e) in ins.iter().enumerate() {
                slots[v][k] = Some(Half::Target(e));
            }
            for k in ins.len()..2 {
                slots[v][k] = Some(Half::Tail(tails.len()));
                tails.push(Tail { vertex: v, field: Field::A });
            }
            slots[v][2] = Some(match outs.first() {
                Some(&e) => Half::Source(e),
                None => {
                    tails.push(Tail { vertex: v, field: Field::B });
                    Half::Tail(tails.len() - 1)
                }
            });
        }
        let mut g = FeynmanGraph { vertices, edges, tails, slots, aut: 1 };
        g.aut = g.count_automorphisms();
        Ok(g)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn tails(&self) -> &[Tail] {
        &self.tails
    }

    pub fn aut(&self) -> u64 {
        self.aut
    }

    pub fn symmetry_factor(&self) -> Scalar {
        scalar::frac(1, self.aut as i64)
    }

    /// |E| − |V| + 1 + Σ genus(v).
    pub fn genus(&self) -> usize {
        let g: usize = self.vertices.iter().map(|v| v.genus as usize).sum();
        (self.edges.len() + 1 + g).saturating_sub(self.vertices.len())
    }

    pub fn heat_edge(&self) -> Option<usize> {
        self.edges.iter().position(|e| e.label.kernel == EdgeKernel::HeatKernel)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                for (a, b) in [(e.source, e.target), (e.target, e.source)] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Every interaction vertex can carry the one-form it integrates: it has a tail or
    /// touches the heat-kernel edge (propagators are functions).
    pub fn is_admissible(&self) -> bool {
        (0..self.vertices.len()).all(|v| {
            self.vertices[v].kind != VertexKind::Interaction
                || self.tails.iter().any(|t| t.vertex == v)
                || self.edges.iter().any(|e| e.label.kernel == EdgeKernel::HeatKernel && (e.source == v || e.target == v))
        })
    }

    /// A directed cycle through every vertex, each vertex keeping one A tail.
    pub fn is_wheel(&self) -> bool {
        let n = self.vertices.len();
        self.edges.len() == n
            && self.is_connected()
            && (0..n).all(|v| {
                self.edges.iter().filter(|e| e.source == v).count() == 1
                    && self.edges.iter().filter(|e| e.target == v).count() == 1
            })
    }

    fn tail_count(&self, v: usize, f: Field) -> usize {
        self.tails.iter().filter(|t| t.vertex == v && t.field == f).count()
    }

    fn count_automorphisms(&self) -> u64 {
        let n = self.vertices.len();
        let mut sorted: Vec<Edge> = self.edges.clone();
        sorted.sort();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut vertex_auts = 0u64;
        loop {
            let ok = (0..n).all(|v| {
                self.vertices[v] == self.vertices[perm[v]]
                    && self.tail_count(v, Field::A) == self.tail_count(perm[v], Field::A)
                    && self.tail_count(v, Field::B) == self.tail_count(perm[v], Field::B)
            });
            if ok {
                let mut mapped: Vec<Edge> = self
                    .edges
                    .iter()
                    .map(|e| Edge { source: perm[e.source], target: perm[e.target], label: e.label })
                    .collect();
                mapped.sort();
                if mapped == sorted {
                    vertex_auts += 1;
                }
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        // parallel edges and equal tails at one vertex can be permuted freely
        let mut local = 1u64;
        let mut i = 0;
        while i < sorted.len() {
            let mut j = i;
            while j < sorted.len() && sorted[j] == sorted[i] {
                j += 1;
            }
            local *= factorial(j - i);
            i = j;
        }
        for v in 0..n {
            local *= factorial(self.tail_count(v, Field::A)) * factorial(self.tail_count(v, Field::B));
        }
        vertex_auts * local
    }
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// Options for [`enumerate_graphs`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumOptions {
    pub min_order: usize,
    pub max_order: usize,
    pub max_genus: usize,
    /// Number of heat-kernel edges (0 or 1).
    pub heat_edges: usize,
    /// Number of propagator colours (scales).
    pub scales: u8,
    pub admissible_only: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { min_order: 1, max_order: 3, max_genus: 1, heat_edges: 0, scales: 1, admissible_only: true }
    }
}

type OutMap = Vec<Option<(usize, EdgeLabel)>>;

fn canonical_key(out: &OutMap) -> Vec<Edge> {
    let n = out.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<Edge>> = None;
    loop {
        let mut es: Vec<Edge> = out
            .iter()
            .enumerate()
            .filter_map(|(v, o)| o.map(|(w, l)| Edge { source: perm[v], target: perm[w], label: l }))
            .collect();
        es.sort();
        if best.as_ref().map_or(true, |b| es < *b) {
            best = Some(es);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.unwrap_or_default()
}

/// Connected interaction graphs up to isomorphism, in canonical order. Graphs are generated
/// labelled (each B slot goes to a tail or to a free A slot) and quotiented by relabelling.
pub fn enumerate_graphs(opts: EnumOptions) -> Result<Vec<FeynmanGraph>, FeynmanError> {
    if opts.max_order > ORDER_BOUND {
        return Err(FeynmanError::BoundExceeded { order: opts.max_order, bound: ORDER_BOUND });
    }
    let mut labels: Vec<EdgeLabel> = (0..opts.scales.max(1)).map(EdgeLabel::propagator).collect();
    if opts.heat_edges > 0 {
        labels.push(EdgeLabel::HEAT);
    }
    let mut out = Vec::new();
    for n in opts.min_order.max(1)..=opts.max_order {
        let mut classes: BTreeMap<Vec<Edge>, ()> = BTreeMap::new();
        let mut cur: OutMap = vec![None; n];
        let mut indeg = vec![0usize; n];
        fill(0, &mut cur, &mut indeg, &labels, &mut |o: &OutMap| {
            let heat = o.iter().flatten().filter(|(_, l)| l.kernel == EdgeKernel::HeatKernel).count();
            if heat != opts.heat_edges {
                return;
            }
            let edges: Vec<Edge> =
                o.iter().enumerate().filter_map(|(v, x)| x.map(|(w, l)| Edge { source: v, target: w, label: l })).collect();
            if edges.len() + 1 > n + opts.max_genus {
                return;
            }
            let g = match FeynmanGraph::new(vec![Vertex::INTERACTION; n], edges) {
                Ok(g) => g,
                Err(_) => return,
            };
            if !g.is_connected() || (opts.admissible_only && !g.is_admissible()) {
                return;
            }
            classes.insert(canonical_key(o), ());
        });
        for key in classes.into_keys() {
            out.push(FeynmanGraph::new(vec![Vertex::INTERACTION; n], key)?);
        }
    }
    Ok(out)
}

fn fill(v: usize, cur: &mut OutMap, indeg: &mut [usize], labels: &[EdgeLabel], visit: &mut dyn FnMut(&OutMap)) {
    if v == cur.len() {
        visit(cur);
        return;
    }
    cur[v] = None;
    fill(v + 1, cur, indeg, labels, visit);
    for w in 0..cur.len() {
        if indeg[w] < 2 {
            indeg[w] += 1;
            for &l in labels {
                cur[v] = Some((w, l));
                fill(v + 1, cur, indeg, labels, visit);
            }
            indeg[w] -= 1;
        }
    }
    cur[v] = None;
}

/// β: edge → ±1; +1 picks the direct channel u = t_A − t_B, −1 the image channel u = t_A + t_B.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SignAssignment(pub Vec<i8>);

impl SignAssignment {
    /// All assignments on `edges` edges, lexicographic with +1 before −1.
    pub fn all(edges: usize) -> Vec<SignAssignment> {
        (0..1usize << edges)
            .map(|m| SignAssignment((0..edges).map(|i| if m >> (edges - 1 - i) & 1 == 1 { -1 } else { 1 }).collect()))
            .collect()
    }
}

/// Exact contraction of structure constants along the graph, indexed by tail Lie indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgTensor {
    pub dim: usize,
    pub entries: BTreeMap<Vec<u8>, Scalar>,
}

impl AlgTensor {
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Σ T[i₁…i_m] v₁[i₁]⋯v_m[i_m] with one vector per tail.
    pub fn contract(&self, vectors: &[&[Scalar]]) -> Scalar {
        let mut acc = Scalar::zero();
        for (idx, c) in &self.entries {
            let mut term = c.clone();
            for (k, &i) in idx.iter().enumerate() {
                term *= &vectors[k][i as usize];
                if term.is_zero() {
                    break;
                }
            }
            acc += term;
        }
        acc
    }
}

/// Slot convention: vertex tensor f^{a b}_c for (A slot 0, A slot 1, B slot).
pub fn algebraic_factor(g: &FeynmanGraph, lie: &LieAlgebra) -> Result<AlgTensor, FeynmanError> {
    if g.vertices.iter().any(|v| v.kind != VertexKind::Interaction) {
        return Err(FeynmanError::Malformed("algebraic factor of observable graphs goes through observable_operator"));
    }
    let entries = lie.entries();
    let n = g.vertices.len();
    let mut out = AlgTensor { dim: lie.dim(), entries: BTreeMap::new() };
    let mut choice = vec![0usize; n];
    alg_rec(g, &entries, 0, &mut choice, &mut out);
    out.entries.retain(|_, c| !c.is_zero());
    Ok(out)
}

fn slot_index(entry: &(usize, usize, usize, Scalar), slot: usize) -> usize {
    [entry.0, entry.1, entry.2][slot]
}

fn alg_rec(
    g: &FeynmanGraph,
    entries: &[(usize, usize, usize, Scalar)],
    v: usize,
    choice: &mut [usize],
    out: &mut AlgTensor,
) {
    let n = g.vertices.len();
    if v == n {
        let mut coeff = Scalar::one();
        for &c in choice.iter() {
            coeff *= &entries[c].3;
        }
        let mut key = vec![0u8; g.tails.len()];
        for (w, sl) in g.slots.iter().enumerate() {
            for (s, h) in sl.iter().enumerate() {
                if let Some(Half::Tail(i)) = h {
                    key[*i] = slot_index(&entries[choice[w]], s) as u8;
                }
            }
        }
        let e = out.entries.entry(key).or_insert_with(Scalar::zero);
        *e += coeff;
        return;
    }
    'next: for c in 0..entries.len() {
        choice[v] = c;
        // edges whose endpoints are both fixed now must carry matching indices
        for (x, e) in g.edges.iter().enumerate() {
            if e.source.max(e.target) != v {
                continue;
            }
            let b = slot_index(&entries[choice[e.source]], 2);
            let s = (0..2).find(|&s| g.slots[e.target][s] == Some(Half::Target(x))).expect("edge occupies an A slot");
            if slot_index(&entries[choice[e.target]], s) != b {
                continue 'next;
            }
        }
        alg_rec(g, entries, v + 1, choice, out);
    }
}

/// Homogeneous form component carried by a tail input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Form {
    Zero,
    One,
}

/// A homogeneous field component: profile(t) ⊗ vector, of the given field and form degree.
#[derive(Clone, Debug, PartialEq)]
pub struct TailInput {
    pub field: Field,
    pub form: Form,
    pub profile: Probe,
    pub vector: Vec<Scalar>,
}

impl TailInput {
    pub fn new(field: Field, form: Form, profile: Probe, vector: Vec<Scalar>) -> Self {
        TailInput { field, form, profile, vector }
    }

    fn odd(&self) -> bool {
        self.form == Form::Zero
    }
}

/// Koszul sign of a labelled graph with homogeneous tails, or `None` when some interaction
/// vertex does not receive exactly one one-form. `heat_at_target` says which end of the
/// heat-kernel edge carries its one-form; `key[i]` is the input position of tail i.
fn graded_sign(g: &FeynmanGraph, odd: &[bool], key: &[usize], heat_at_target: Option<bool>) -> Option<i64> {
    let parity = |h: Half| -> bool {
        match h {
            Half::Tail(i) => odd[i],
            Half::Source(e) => match g.edges[e].label.kernel {
                EdgeKernel::Propagator => true,
                EdgeKernel::HeatKernel => heat_at_target == Some(true),
            },
            Half::Target(e) => match g.edges[e].label.kernel {
                EdgeKernel::Propagator => true,
                EdgeKernel::HeatKernel => heat_at_target == Some(false),
            },
        }
    };
    let mut sign = 1i64;
    let mut objs: Vec<(Half, bool)> = Vec::new();
    for sl in &g.slots {
        let hs: Vec<Half> = sl.iter().flatten().copied().collect();
        if hs.len() != 3 {
            continue;
        }
        if hs.iter().filter(|&&h| !parity(h)).count() != 1 {
            return None;
        }
        if parity(hs[0]) {
            sign = -sign;
        }
        objs.extend(hs.iter().map(|&h| (h, parity(h))));
    }
    let mut pull = |objs: &mut Vec<(Half, bool)>, h: Half| {
        let pos = objs.iter().position(|o| o.0 == h).expect("half-edge present");
        let (_, p) = objs.remove(pos);
        if p && objs[..pos].iter().filter(|o| o.1).count() % 2 == 1 {
            sign = -sign;
        }
    };
    for e in 0..g.edges.len() {
        pull(&mut objs, Half::Source(e));
        pull(&mut objs, Half::Target(e));
    }
    // sort the remaining tails into input order
    let rest: Vec<(usize, bool)> = objs
        .iter()
        .map(|o| match o.0 {
            Half::Tail(i) => (key[i], o.1),
            _ => unreachable!("edges are contracted"),
        })
        .collect();
    for i in 0..rest.len() {
        for j in i + 1..rest.len() {
            if rest[i].1 && rest[j].1 && rest[i].0 > rest[j].0 {
                sign = -sign;
            }
        }
    }
    Some(sign)
}

/// Total sign-and-channel coefficient of the integrand, summed over which end of the
/// heat-kernel edge carries its one-form.
fn channel_coefficient(g: &FeynmanGraph, beta: &[i8], inputs: &[TailInput], key: &[usize]) -> i64 {
    let odd: Vec<bool> = inputs.iter().map(TailInput::odd).collect();
    match g.heat_edge() {
        None => graded_sign(g, &odd, key, None).unwrap_or(0),
        Some(h) => {
            let mut c = graded_sign(g, &odd, key, Some(true)).unwrap_or(0);
            // B₁–A₀ component: direct minus image
            let s = graded_sign(g, &odd, key, Some(false)).unwrap_or(0);
            c += if beta[h] == 1 { s } else { -s };
            c
        }
    }
}

/// Evaluation data: one cutoff and the scales the edge labels refer to.
#[derive(Clone, Copy, Debug)]
pub struct Kernels<'a> {
    pub cutoff: &'a Cutoff,
    pub scales: &'a [KernelScale],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    /// Signed analytic factor (Koszul and channel signs included).
    pub analytic: f64,
    pub error: f64,
    pub algebraic: AlgTensor,
}

impl Weight {
    pub fn value(&self, inputs: &[TailInput]) -> f64 {
        let vs: Vec<&[Scalar]> = inputs.iter().map(|i| i.vector.as_slice()).collect();
        self.analytic * scalar::to_f64(&self.algebraic.contract(&vs))
    }
}

fn check_inputs(g: &FeynmanGraph, inputs: &[TailInput]) -> Result<(), FeynmanError> {
    if inputs.len() != g.tails.len() {
        return Err(FeynmanError::Arity { expected: g.tails.len(), got: inputs.len() });
    }
    for (i, (t, inp)) in g.tails.iter().zip(inputs).enumerate() {
        if t.field != inp.field {
            return Err(FeynmanError::Channel(i));
        }
        if inp.field == Field::A && inp.form == Form::Zero && !inp.profile.flagged && inp.profile.eval(0.0) != 0.0 {
            return Err(FeynmanError::Boundary(i));
        }
    }
    Ok(())
}

/// Weight of one graph for one channel assignment on inputs listed in tail order.
pub fn evaluate_weight(
    g: &FeynmanGraph,
    beta: &SignAssignment,
    kernels: &Kernels<'_>,
    inputs: &[TailInput],
    lie: &LieAlgebra,
    tol: Tolerance,
) -> Result<Weight, FeynmanError> {
    check_inputs(g, inputs)?;
    let key: Vec<usize> = (0..inputs.len()).collect();
    let (analytic, error) = analytic_factor(g, beta, kernels, inputs, &key, tol)?;
    Ok(Weight { analytic, error, algebraic: algebraic_factor(g, lie)? })
}

fn analytic_factor(
    g: &FeynmanGraph,
    beta: &SignAssignment,
    kernels: &Kernels<'_>,
    inputs: &[TailInput],
    key: &[usize],
    tol: Tolerance,
) -> Result<(f64, f64), FeynmanError> {
    if beta.0.len() != g.edges.len() {
        return Err(FeynmanError::Signs { expected: g.edges.len(), got: beta.0.len() });
    }
    if g.edges.iter().any(|e| e.label.scale as usize >= kernels.scales.len()) {
        return Err(FeynmanError::Malformed("edge scale index out of range"));
    }
    let c = channel_coefficient(g, &beta.0, inputs, key);
    if c == 0 {
        return Ok((0.0, 0.0));
    }
    let lay = match Layout::new(g, inputs, kernels.cutoff.support()) {
        Some(l) => l,
        None => return Ok((0.0, 0.0)),
    };
    let eng = Engine { g, lay, beta: &beta.0, kernels, inputs, tol, failure: RefCell::new(None) };
    let (v, e) = eng.run()?;
    Ok((c as f64 * v, (c as f64).abs() * e))
}

struct Step {
    edge: usize,
    parent: usize,
    child: usize,
    child_is_target: bool,
}

/// Spanning tree of the graph: the root position and one edge variable u per tree edge.
struct Layout {
    order: Vec<usize>,
    windows: Vec<(f64, f64)>,
    steps: Vec<Step>,
    closing: Vec<Vec<usize>>,
    tails_at: Vec<Vec<usize>>,
}

impl Layout {
    fn new(g: &FeynmanGraph, inputs: &[TailInput], reach: f64) -> Option<Layout> {
        let n = g.vertices.len();
        let mut tails_at = vec![Vec::new(); n];
        let mut windows: Vec<(f64, f64)> = vec![(0.0, f64::INFINITY); n];
        for (i, t) in g.tails.iter().enumerate() {
            tails_at[t.vertex].push(i);
            let (lo, hi) = inputs[i].profile.support();
            let w = &mut windows[t.vertex];
            w.0 = w.0.max(lo);
            w.1 = w.1.min(hi);
        }
        if windows.iter().any(|w| w.0 >= w.1) {
            return None;
        }
        let root = (0..n).min_by(|&a, &b| {
            let wa = windows[a].1 - windows[a].0;
            let wb = windows[b].1 - windows[b].0;
            wa.partial_cmp(&wb).expect("ordered widths")
        })?;
        if !windows[root].1.is_finite() {
            let hi = windows.iter().map(|w| w.1).fold(f64::INFINITY, f64::min);
            windows[root].1 = if hi.is_finite() { hi + n as f64 * reach } else { n as f64 * reach };
        }
        let mut level_of = vec![usize::MAX; n];
        level_of[root] = 0;
        let mut order = vec![root];
        let mut steps = Vec::new();
        let mut in_tree = vec![false; g.edges.len()];
        let mut idx = 0;
        while idx < order.len() {
            let v = order[idx];
            idx += 1;
            let mut inc: Vec<usize> = (0..g.edges.len()).filter(|&e| g.edges[e].source == v || g.edges[e].target == v).collect();
            inc.sort_by_key(|&e| (g.edges[e].label.kernel != EdgeKernel::HeatKernel, e));
            for e in inc {
                let ed = g.edges[e];
                let (other, child_is_target) = if ed.source == v { (ed.target, true) } else { (ed.source, false) };
                if level_of[other] != usize::MAX {
                    continue;
                }
                level_of[other] = order.len();
                order.push(other);
                in_tree[e] = true;
                steps.push(Step { edge: e, parent: v, child: other, child_is_target });
            }
        }
        if order.len() != n {
            return None;
        }
        let mut closing = vec![Vec::new(); n];
        for (e, ed) in g.edges.iter().enumerate() {
            if !in_tree[e] {
                closing[level_of[ed.source].max(level_of[ed.target])].push(e);
            }
        }
        Some(Layout { order, windows, steps, closing, tails_at })
    }
}

struct Engine<'a> {
    g: &'a FeynmanGraph,
    lay: Layout,
    beta: &'a [i8],
    kernels: &'a Kernels<'a>,
    inputs: &'a [TailInput],
    tol: Tolerance,
    failure: RefCell<Option<QuadError>>,
}

impl Engine<'_> {
    fn scale(&self, e: usize) -> &KernelScale {
        &self.kernels.scales[self.g.edges[e].label.scale as usize]
    }

    fn kernel(&self, e: usize, u: f64) -> f64 {
        let s = self.scale(e);
        match self.g.edges[e].label.kernel {
            EdgeKernel::Propagator => 0.5 * propagator_noninvariant(self.kernels.cutoff, s, u),
            EdgeKernel::HeatKernel => gaussian(self.kernels.cutoff, s.eps, u),
        }
    }

    fn kernel_points(&self, e: usize) -> Vec<f64> {
        let c = self.kernels.cutoff;
        let s = self.scale(e);
        let mut widths = vec![2.0 * libm::sqrt(s.eps)];
        if self.g.edges[e].label.kernel == EdgeKernel::Propagator {
            widths.push(2.0 * libm::sqrt(s.l));
        }
        let mut p = vec![0.0, c.plateau(), -c.plateau(), c.support(), -c.support()];
        for w in widths {
            for m in [1.0, 4.0] {
                p.push(m * w);
                p.push(-m * w);
            }
        }
        p
    }

    fn u(&self, e: usize, t: &[f64]) -> f64 {
        let ed = self.g.edges[e];
        t[ed.target] - self.beta[e] as f64 * t[ed.source]
    }

    fn tails_value(&self, v: usize, tv: f64) -> f64 {
        self.lay.tails_at[v].iter().map(|&i| self.inputs[i].profile.eval(tv)).product()
    }

    fn closing_value(&self, level: usize, t: &[f64]) -> f64 {
        self.lay.closing[level].iter().map(|&e| self.kernel(e, self.u(e, t))).product()
    }

    /// Breakpoints in x for edges closing at this level, with the child at s·x + d.
    fn closing_points(&self, level: usize, child: usize, s: f64, d: f64, t: &[f64], pts: &mut Vec<f64>) {
        for &e in &self.lay.closing[level] {
            let ed = self.g.edges[e];
            let b = self.beta[e] as f64;
            let (alpha, gamma) = if ed.target == child && ed.source == child {
                ((1.0 - b) * s, (1.0 - b) * d)
            } else if ed.target == child {
                (s, d - b * t[ed.source])
            } else {
                (-b * s, t[ed.target] - b * d)
            };
            if alpha != 0.0 {
                for p in self.kernel_points(e) {
                    pts.push((p - gamma) / alpha);
                }
            }
        }
    }

    fn knots(&self, v: usize) -> Vec<f64> {
        self.lay.tails_at[v].iter().flat_map(|&i| self.inputs[i].profile.knots()).collect()
    }

    fn record(&self, r: Result<crate::quad::Estimate, QuadError>) -> (f64, f64) {
        match r {
            Ok(e) => (e.value, e.error),
            Err(e) => {
                let v = (e.value, e.error);
                let mut f = self.failure.borrow_mut();
                if f.is_none() {
                    *f = Some(e);
                }
                v
            }
        }
    }

    fn run(&self) -> Result<(f64, f64), FeynmanError> {
        let r = self.lay.order[0];
        let (lo, hi) = self.lay.windows[r];
        let mut pts = self.knots(r);
        self.closing_points(0, r, 1.0, 0.0, &[0.0; MAXV], &mut pts);
        let res = integrate(
            |x| {
                let mut t = [0.0; MAXV];
                t[r] = x;
                let w = self.tails_value(r, x) * self.closing_value(0, &t);
                if w == 0.0 {
                    0.0
                } else {
                    w * self.level(1, t)
                }
            },
            lo,
            hi,
            &pts,
            self.tol,
        );
        let out = self.record(res);
        match self.failure.borrow_mut().take() {
            Some(e) => Err(e.into()),
            None => Ok(out),
        }
    }

    fn level(&self, k: usize, t: [f64; MAXV]) -> f64 {
        if k == self.lay.order.len() {
            return 1.0;
        }
        let st = &self.lay.steps[k - 1];
        let b = self.beta[st.edge] as f64;
        let d = b * t[st.parent];
        let s = if st.child_is_target { 1.0 } else { -b };
        let (wlo, whi) = self.lay.windows[st.child];
        let (mut lo, mut hi) = if s > 0.0 { (wlo - d, whi - d) } else { (d - whi, d - wlo) };
        let reach = self.kernels.cutoff.support();
        lo = lo.max(-reach);
        hi = hi.min(reach);
        if !(hi > lo) {
            return 0.0;
        }
        let mut pts = self.kernel_points(st.edge);
        for kn in self.knots(st.child) {
            pts.push(s * (kn - d));
        }
        let mut probe = t;
        probe[st.child] = 0.0;
        self.closing_points(k, st.child, s, d, &probe, &mut pts);
        let res = integrate(
            |x| {
                let mut tt = t;
                tt[st.child] = s * x + d;
                let w = self.kernel(st.edge, x) * self.tails_value(st.child, tt[st.child]) * self.closing_value(k, &tt);
                if w == 0.0 {
                    0.0
                } else {
                    w * self.level(k + 1, tt)
                }
            },
            lo,
            hi,
            &pts,
            self.tol,
        );
        self.record(res).0
    }
}

/// Tail-to-input bijections respecting the field of each tail; `a[i]` is the input at tail i.
pub fn assignments(g: &FeynmanGraph, inputs: &[TailInput]) -> Vec<Vec<usize>> {
    if g.tails.len() != inputs.len() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![usize::MAX; g.tails.len()];
    let mut used = vec![false; inputs.len()];
    assign_rec(g, inputs, 0, &mut cur, &mut used, &mut out);
    out
}

fn assign_rec(g: &FeynmanGraph, inputs: &[TailInput], i: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
    if i == cur.len() {
        out.push(cur.clone());
        return;
    }
    for j in 0..inputs.len() {
        if !used[j] && inputs[j].field == g.tails[i].field {
            used[j] = true;
            cur[i] = j;
            assign_rec(g, inputs, i + 1, cur, used, out);
            used[j] = false;
        }
    }
}

/// One independent weight evaluation of a flow.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowTask {
    pub graph: usize,
    pub assignment: Vec<usize>,
    pub beta: SignAssignment,
    /// Algebraic contraction divided by |Aut|.
    pub coefficient: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowPlan {
    pub graphs: Vec<FeynmanGraph>,
    pub tasks: Vec<FlowTask>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowValue {
    pub value: f64,
    pub error: f64,
}

/// Tasks in canonical order (graph, assignment, β); terms with zero algebraic factor are dropped.
pub fn flow_plan(lie: &LieAlgebra, graphs: Vec<FeynmanGraph>, inputs: &[TailInput]) -> Result<FlowPlan, FeynmanError> {
    let mut tasks = Vec::new();
    for (gi, g) in graphs.iter().enumerate() {
        let alg = algebraic_factor(g, lie)?;
        if alg.is_zero() {
            continue;
        }
        for a in assignments(g, inputs) {
            let vs: Vec<&[Scalar]> = a.iter().map(|&j| inputs[j].vector.as_slice()).collect();
            let c = alg.contract(&vs);
            if c.is_zero() {
                continue;
            }
            let coefficient = scalar::to_f64(&(c * g.symmetry_factor()));
            for beta in SignAssignment::all(g.edges.len()) {
                tasks.push(FlowTask { graph: gi, assignment: a.clone(), beta, coefficient });
            }
        }
    }
    Ok(FlowPlan { graphs, tasks })
}

pub fn run_task(
    plan: &FlowPlan,
    task: &FlowTask,
    kernels: &Kernels<'_>,
    inputs: &[TailInput],
    tol: Tolerance,
) -> Result<FlowValue, FeynmanError> {
    let g = &plan.graphs[task.graph];
    let tail_inputs: Vec<TailInput> = task.assignment.iter().map(|&j| inputs[j].clone()).collect();
    check_inputs(g, &tail_inputs)?;
    let (v, e) = analytic_factor(g, &task.beta, kernels, &tail_inputs, &task.assignment, tol)?;
    Ok(FlowValue { value: task.coefficient * v, error: task.coefficient.abs() * e })
}

/// Sums task results in the order given.
pub fn reduce(parts: &[FlowValue]) -> FlowValue {
    parts.iter().fold(FlowValue { value: 0.0, error: 0.0 }, |acc, p| FlowValue {
        value: acc.value + p.value,
        error: acc.error + p.error,
    })
}

/// Executes the tasks of a plan; results come back in task order.
pub trait TaskRunner {
    fn run_all(&self, plan: &FlowPlan, kernels: &Kernels<'_>, inputs: &[TailInput], tol: Tolerance) -> Result<Vec<FlowValue>, FeynmanError>;
}

/// Runs tasks one after another on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl TaskRunner for Sequential {
    fn run_all(&self, plan: &FlowPlan, kernels: &Kernels<'_>, inputs: &[TailInput], tol: Tolerance) -> Result<Vec<FlowValue>, FeynmanError> {
        plan.tasks.iter().map(|t| run_task(plan, t, kernels, inputs, tol)).collect()
    }
}

pub fn run_plan(plan: &FlowPlan, kernels: &Kernels<'_>, inputs: &[TailInput], tol: Tolerance) -> Result<FlowValue, FeynmanError> {
    run_plan_with(&Sequential, plan, kernels, inputs, tol)
}

pub fn run_plan_with(
    runner: &dyn TaskRunner,
    plan: &FlowPlan,
    kernels: &Kernels<'_>,
    inputs: &[TailInput],
    tol: Tolerance,
) -> Result<FlowValue, FeynmanError> {
    Ok(reduce(&runner.run_all(plan, kernels, inputs, tol)?))
}

/// ħ-power and the largest graph order allowed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub loops: usize,
    pub max_order: usize,
}

/// Graphs contributing to the Taylor coefficient on `arity` inputs at the given loop order.
pub fn flow_graphs(truncation: Truncation, arity: usize, scales: u8) -> Result<Vec<FeynmanGraph>, FeynmanError> {
    let n = match truncation.loops {
        0 if arity >= 3 => arity - 2,
        1 if arity >= 1 => arity,
        _ => return Ok(Vec::new()),
    };
    if n > truncation.max_order {
        return Err(FeynmanError::BoundExceeded { order: n, bound: truncation.max_order });
    }
    let gs = enumerate_graphs(EnumOptions {
        min_order: n,
        max_order: n,
        max_genus: truncation.loops,
        heat_edges: 0,
        scales,
        admissible_only: true,
    })?;
    Ok(gs.into_iter().filter(|g| g.genus() == truncation.loops).collect())
}

/// Taylor coefficient of I[L] = W(P(ε, L), I) on the ordered inputs, at one ħ-power.
pub fn rg_flow(
    lie: &LieAlgebra,
    cutoff: &Cutoff,
    scale: KernelScale,
    truncation: Truncation,
    inputs: &[TailInput],
    tol: Tolerance,
) -> Result<FlowValue, FeynmanError> {
    rg_flow_with(&Sequential, lie, cutoff, scale, truncation, inputs, tol)
}

pub fn rg_flow_with(
    runner: &dyn TaskRunner,
    lie: &LieAlgebra,
    cutoff: &Cutoff,
    scale: KernelScale,
    truncation: Truncation,
    inputs: &[TailInput],
    tol: Tolerance,
) -> Result<FlowValue, FeynmanError> {
    let plan = flow_plan(lie, flow_graphs(truncation, inputs.len(), 1)?, inputs)?;
    let scales = [scale];
    run_plan_with(runner, &plan, &Kernels { cutoff, scales: &scales }, inputs, tol)
}

/// The same coefficient computed in two stages, W(P(L, L′), W(P(ε, L), I)): trees whose edges
/// are coloured by the stage that contracted them.
pub fn rg_flow_composed(
    lie: &LieAlgebra,
    cutoff: &Cutoff,
    eps: f64,
    l: f64,
    l2: f64,
    truncation: Truncation,
    inputs: &[TailInput],
    tol: Tolerance,
) -> Result<FlowValue, FeynmanError> {
    rg_flow_composed_with(&Sequential, lie, cutoff, (eps, l, l2), truncation, inputs, tol)
}

/// [`rg_flow_composed`] with scales (ε, L, L′) and an explicit runner.
pub fn rg_flow_composed_with(
    runner: &dyn TaskRunner,
    lie: &LieAlgebra,
    cutoff: &Cutoff,
    (eps, l, l2): (f64, f64, f64),
    truncation: Truncation,
    inputs: &[TailInput],
    tol: Tolerance,
) -> Result<FlowValue, FeynmanError> {
    let scales = [KernelScale::new(eps, l)?, KernelScale::new(l, l2)?];
    let plan = flow_plan(lie, flow_graphs(truncation, inputs.len(), 2)?, inputs)?;
    run_plan_with(runner, &plan, &Kernels { cutoff, scales: &scales }, inputs, tol)
}

/// Default ε sequence 1e−2·4^{−k}, k = 0..5.
pub fn default_eps_schedule() -> Vec<f64> {
    geometric_schedule(1e-2 / 1024.0, 4.0, 6)
}

/// Classes of the two-vertex obstruction wheel by (β of the propagator, β of the heat kernel).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BetaClass {
    /// Equal signs.
    C1,
    /// Propagator direct, heat kernel image.
    C2,
    /// Propagator image, heat kernel direct.
    C3,
}

pub fn beta_class(beta_propagator: i8, beta_heat: i8) -> BetaClass {
    match (beta_propagator, beta_heat) {
        (p, h) if p == h => BetaClass::C1,
        (1, _) => BetaClass::C2,
        _ => BetaClass::C3,
    }
}

/// Wheels on k vertices with one heat-kernel edge and one A tail per vertex.
pub fn obstruction_wheels(k: usize) -> Result<Vec<FeynmanGraph>, FeynmanError> {
    let gs = enumerate_graphs(EnumOptions { min_order: k, max_order: k, max_genus: 1, heat_edges: 1, scales: 1, admissible_only: true })?;
    Ok(gs.into_iter().filter(FeynmanGraph::is_wheel).collect())
}

/// Wheels with a tree attached to one vertex (one-particle reducible obstruction graphs).
pub fn obstruction_reducible(order: usize) -> Result<Vec<FeynmanGraph>, FeynmanError> {
    let gs = enumerate_graphs(EnumOptions {
        min_order: order,
        max_order: order,
        max_genus: 1,
        heat_edges: 1,
        scales: 1,
        admissible_only: true,
    })?;
    Ok(gs.into_iter().filter(|g| g.genus() == 1 && !g.is_wheel()).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionSample {
    pub eps: f64,
    pub l: f64,
    pub total: f64,
    pub error: f64,
    /// Summed contributions per sign assignment on the wheel edges.
    pub by_beta: Vec<(SignAssignment, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct C1Check {
    pub eps: f64,
    pub l: f64,
    pub beta: SignAssignment,
    pub value: f64,
    pub bound: f64,
}

impl C1Check {
    pub fn holds(&self) -> bool {
        self.value.abs() <= self.bound
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionReport {
    pub vertices: usize,
    pub samples: Vec<ObstructionSample>,
    /// ε → 0 limit at each L.
    pub per_l: Vec<(f64, Limit)>,
    /// L → 0 limit of those.
    pub limit: Limit,
    pub c1: Vec<C1Check>,
    pub reducible: Vec<ObstructionSample>,
    pub reducible_limit: Limit,
}

/// Scale grid for two-stage extrapolation: each L with `count` values ε = L·ratio^{−j}, j ≥ 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleGrid {
    pub ls: Vec<f64>,
    pub ratio: f64,
    pub count: usize,
}

impl ScaleGrid {
    pub fn eps_for(&self, l: f64) -> Vec<f64> {
        (1..=self.count).map(|j| l * libm::pow(self.ratio, -(j as f64))).collect()
    }
}

/// Evaluates every task of the plan at one scale and groups the results by β.
pub fn obstruction_sample(
    runner: &dyn TaskRunner,
    plan: &FlowPlan,
    cutoff: &Cutoff,
    eps: f64,
    l: f64,
    inputs: &[TailInput],
    tol: Tolerance,
) -> Result<ObstructionSample, FeynmanError> {
    let scales = [KernelScale::new(eps, l)?];
    let kern = Kernels { cutoff, scales: &scales };
    let parts = runner.run_all(plan, &kern, inputs, tol)?;
    let total = reduce(&parts);
    let mut by_beta: BTreeMap<SignAssignment, f64> = BTreeMap::new();
    for (t, p) in plan.tasks.iter().zip(&parts) {
        *by_beta.entry(t.beta.clone()).or_insert(0.0) += p.value;
    }
    Ok(ObstructionSample { eps, l, total: total.value, error: total.error, by_beta: by_beta.into_iter().collect() })
}

fn two_stage(samples: &[ObstructionSample], ls: &[f64]) -> Result<(Vec<(f64, Limit)>, Limit), FeynmanError> {
    let mut per_l = Vec::new();
    for &l in ls {
        let seq: Vec<(f64, f64)> = samples.iter().filter(|s| s.l == l).map(|s| (s.eps, s.total)).collect();
        per_l.push((l, limit_extrapolate(&seq)?));
    }
    let outer: Vec<(f64, f64)> = per_l.iter().map(|(l, lim)| (*l, lim.value)).collect();
    let limit = if outer.len() >= 2 {
        limit_extrapolate(&outer)?
    } else {
        Limit { value: outer.first().map_or(0.0, |o| o.1), error: f64::INFINITY, tableau: Vec::new() }
    };
    Ok((per_l, limit))
}

/// The QME obstruction from wheels with one edge K_ε and the rest P(ε, L), evaluated on the
/// inputs (one per wheel vertex), extrapolated ε → 0 at each L and then L → 0. Wheels with
/// trees attached have the same arity; they are evaluated and reported separately.
pub fn qme_obstruction(
    lie: &LieAlgebra,
    cutoff: &Cutoff,
    k: usize,
    grid: &ScaleGrid,
    inputs: &[TailInput],
    tol: Tolerance,
) -> Result<ObstructionReport, FeynmanError> {
    qme_obstruction_with(&Sequential, lie, cutoff, k, grid, inputs, tol)
}

pub fn qme_obstruction_with(
    runner: &dyn TaskRunner,
    lie: &LieAlgebra,
    cutoff: &Cutoff,
    k: usize,
    grid: &ScaleGrid,
    inputs: &[TailInput],
    tol: Tolerance,
) -> Result<ObstructionReport, FeynmanError> {
    lie.require_unimodular()?;
    let plan = flow_plan(lie, obstruction_wheels(k)?, inputs)?;
    let extra = flow_plan(lie, obstruction_reducible(k)?, inputs)?;
    let mut samples = Vec::new();
    let mut reducible = Vec::new();
    let mut c1 = Vec::new();
    for &l in &grid.ls {
        for eps in grid.eps_for(l) {
            samples.push(obstruction_sample(runner, &plan, cutoff, eps, l, inputs, tol)?);
            reducible.push(obstruction_sample(runner, &extra, cutoff, eps, l, inputs, tol)?);
            if k == 2 {
                c1.extend(c1_checks(&plan, cutoff, eps, l, inputs, tol)?);
            }
        }
    }
    let (per_l, limit) = two_stage(&samples, &grid.ls)?;
    let (_, reducible_limit) = two_stage(&reducible, &grid.ls)?;
    Ok(ObstructionReport { vertices: k, samples, per_l, limit, c1, reducible, reducible_limit })
}

/// Per-assignment analytic values of class C1 against 2KC(√(L+ε) − √(2ε)), with
/// C = sup|∂_{t₁}(f f₀(u₁) f₀(u₂))|/4π and K the width of the range of t₁ + β t₂, where t₁
/// is the vertex whose input vanishes at the boundary.
fn c1_checks(
    plan: &FlowPlan,
    cutoff: &Cutoff,
    eps: f64,
    l: f64,
    inputs: &[TailInput],
    tol: Tolerance,
) -> Result<Vec<C1Check>, FeynmanError> {
    let scales = [KernelScale::new(eps, l)?];
    let kern = Kernels { cutoff, scales: &scales };
    let mut out = Vec::new();
    let mut seen: Vec<(usize, Vec<usize>, SignAssignment)> = Vec::new();
    for t in &plan.tasks {
        let g = &plan.graphs[t.graph];
        let h = g.heat_edge().expect("obstruction wheel has a heat edge");
        let p = 1 - h;
        if beta_class(t.beta.0[p], t.beta.0[h]) != BetaClass::C1 {
            continue;
        }
        let id = (t.graph, t.assignment.clone(), t.beta.clone());
        if seen.contains(&id) {
            continue;
        }
        seen.push(id);
        let tail_inputs: Vec<TailInput> = t.assignment.iter().map(|&j| inputs[j].clone()).collect();
        let (value, _) = analytic_factor(g, &t.beta, &kern, &tail_inputs, &t.assignment, tol)?;
        let bound = c1_bound(g, &t.beta, cutoff, eps, l, &tail_inputs);
        out.push(C1Check { eps, l, beta: t.beta.clone(), value, bound });
    }
    Ok(out)
}

fn c1_bound(g: &FeynmanGraph, beta: &SignAssignment, cutoff: &Cutoff, eps: f64, l: f64, inputs: &[TailInput]) -> f64 {
    // t₁ is the vertex carrying the boundary-vanishing input
    let v1 = g.tails.iter().zip(inputs).find(|(_, i)| i.form == Form::Zero).map_or(0, |(t, _)| t.vertex);
    let v2 = 1 - v1;
    let prof = |v: usize| inputs[g.tails.iter().position(|t| t.vertex == v).expect("one tail per vertex")].profile;
    let (p1, p2) = (prof(v1), prof(v2));
    let (lo1, hi1) = p1.support();
    let (lo2, hi2) = p2.support();
    let width = (hi1 - lo1) + (hi2 - lo2);
    let m = 400;
    let mut sup: f64 = 0.0;
    for i in 0..=m {
        let t1 = lo1 + (hi1 - lo1) * i as f64 / m as f64;
        for j in 0..=m {
            let t2 = lo2 + (hi2 - lo2) * j as f64 / m as f64;
            let mut t = [0.0; 2];
            t[v1] = t1;
            t[v2] = t2;
            let f = p1.eval(t1) * p2.eval(t2);
            let df = p1.deriv(t1) * p2.eval(t2);
            let mut prod = f;
            let mut dprod = df;
            let mut factors = Vec::new();
            for (e, ed) in g.edges.iter().enumerate() {
                let b = beta.0[e] as f64;
                let u = t[ed.target] - b * t[ed.source];
                let du = if ed.target == v1 { 1.0 } else { -b };
                factors.push((cutoff.eval(u), cutoff.deriv(u) * du));
            }
            // product rule over f and the two cutoffs
            let (a, da) = factors[0];
            let (c, dc) = factors[1];
            dprod = dprod * a * c + f * da * c + f * a * dc;
            prod *= a * c;
            let _ = prod;
            sup = sup.max(dprod.abs());
        }
    }
    let big_c = sup / (4.0 * core::f64::consts::PI);
    2.0 * width * big_c * (libm::sqrt(l + eps) - libm::sqrt(2.0 * eps))
}

fn check_eps(eps: &[f64], l: f64) -> Result<(), FeynmanError> {
    if eps.iter().any(|&e| !(e > 0.0 && e < l)) {
        return Err(FeynmanError::Schedule);
    }
    Ok(())
}

/// Heat kernel and propagator from the boundary point, both channels:
/// ∫₀^∞ f(t) P(t, 0) K_ε(t, 0) dt with P(t, 0) = f₀E(t) and K_ε(t, 0) = 2 f₀ k_ε(t).
/// `red` picks which of the two star edges carries the heat kernel; the integrand is symmetric.
pub fn boundary_quantum_factor(cutoff: &Cutoff, scale: &KernelScale, red: usize, f: &Probe, tol: Tolerance) -> Result<f64, FeynmanError> {
    let edge = |is_heat: bool, t: f64| {
        if is_heat {
            2.0 * gaussian(cutoff, scale.eps, t)
        } else {
            propagator_noninvariant(cutoff, scale, t)
        }
    };
    let mut pts = f.knots();
    for w in [2.0 * libm::sqrt(scale.eps), 2.0 * libm::sqrt(scale.l)] {
        pts.extend([w, 4.0 * w, 12.0 * w]);
    }
    pts.extend([cutoff.plateau(), cutoff.support()]);
    let hi = f.support().1.min(cutoff.support());
    let r = integrate(|t| f.eval(t) * edge(red == 0, t) * edge(red == 1, t), 0.0, hi, &pts, tol)?;
    Ok(r.value)
}

/// −2 ∫₀^∞ f₀(t) f(t, t) e^{−t²/4ε}/√(4πε) dt for the diagonal profile f(t, t).
pub fn boundary_classical_factor(cutoff: &Cutoff, eps: f64, diag: &dyn Fn(f64) -> f64, knots: &[f64], tol: Tolerance) -> Result<f64, FeynmanError> {
    let w = 2.0 * libm::sqrt(eps);
    let mut pts = knots.to_vec();
    pts.extend([w, 4.0 * w, 12.0 * w, cutoff.plateau()]);
    let r = integrate(|t| -2.0 * gaussian(cutoff, eps, t) * diag(t), 0.0, cutoff.support(), &pts, tol)?;
    Ok(r.value)
}

/// Observable diagram: a star (vertex 0) joined to one interaction vertex (vertex 1).
/// `a_edges` star → A slots, `b_edge` B slot → star; `red` marks the heat-kernel edge
/// (index into the A edges, or `a_edges` for the B edge).
pub fn star_graph(a_edges: usize, b_edge: bool, red: Option<usize>) -> Result<FeynmanGraph, FeynmanError> {
    let mut edges = Vec::new();
    for i in 0..a_edges {
        let label = if red == Some(i) { EdgeLabel::HEAT } else { EdgeLabel::PROPAGATOR };
        edges.push(Edge { source: 0, target: 1, label });
    }
    if b_edge {
        let label = if red == Some(a_edges) { EdgeLabel::HEAT } else { EdgeLabel::PROPAGATOR };
        edges.push(Edge { source: 1, target: 0, label });
    }
    FeynmanGraph::new(vec![Vertex::OBSERVABLE, Vertex::INTERACTION], edges)
}

/// Lie-algebraic factor of a star graph as an operator on Sym(g[1] ⊕ g^∨[−1]): star → A slot
/// edges differentiate in t^a, the B-slot edge differentiates in t_c, B tails multiply by t^c
/// and A tails by t_a; derivatives act in slot order.
pub fn observable_operator(g: &FeynmanGraph, lie: &LieAlgebra) -> Result<Operator, FeynmanError> {
    let v = g.vertices.iter().position(|x| x.kind == VertexKind::Interaction).ok_or(FeynmanError::Malformed("no interaction vertex"))?;
    if g.vertices.len() != 2 {
        return Err(FeynmanError::Malformed("star graph needs one observable and one interaction vertex"));
    }
    let frame = PolyFrame::new(lie.dim());
    let mut op = Operator::new();
    for (a, b, c, val) in lie.entries() {
        let idx = [a, b, c];
        let mut muls = Vec::new();
        let mut derivs = Vec::new();
        for (s, h) in g.slots[v].iter().enumerate() {
            match h {
                Some(Half::Target(_)) => derivs.push(Op::Deriv(frame.up(idx[s]))),
                Some(Half::Source(_)) => derivs.push(Op::Deriv(frame.low(idx[s]))),
                Some(Half::Tail(i)) => muls.push(match g.tails[*i].field {
                    Field::A => Op::Mul(frame.low(idx[s])),
                    Field::B => Op::Mul(frame.up(idx[s])),
                }),
                None => {}
            }
        }
        muls.extend(derivs);
        op.push(val, muls);
    }
    Ok(op)
}

/// c with a = c·b, if it exists.
pub fn proportionality(a: &Poly, b: &Poly) -> Option<Scalar> {
    if b.is_empty() {
        return if a.is_empty() { Some(Scalar::zero()) } else { None };
    }
    let (k, bv) = b.iter().next().expect("nonempty");
    let c = a.get(k).cloned().unwrap_or_else(Scalar::zero) / bv;
    let mut keys: Vec<&Vec<u32>> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    for key in keys {
        let x = a.get(key).cloned().unwrap_or_else(Scalar::zero);
        let y = b.get(key).cloned().unwrap_or_else(Scalar::zero);
        if x != &c * &y {
            return None;
        }
    }
    Some(c)
}

/// Polynomial with floating coefficients.
pub type FloatPoly = BTreeMap<Exps, f64>;

pub fn scale_poly(p: &Poly, w: f64) -> FloatPoly {
    p.iter().map(|(k, v)| (k.clone(), w * scalar::to_f64(v))).filter(|(_, v)| *v != 0.0).collect()
}

/// Largest coefficient difference between a float polynomial and c times an exact one.
pub fn poly_distance(a: &FloatPoly, b: &Poly, c: f64) -> f64 {
    let mut d: f64 = 0.0;
    for (k, v) in a {
        d = d.max((v - c * b.get(k).map_or(0.0, scalar::to_f64)).abs());
    }
    for (k, v) in b {
        if !a.contains_key(k) {
            d = d.max((c * scalar::to_f64(v)).abs());
        }
    }
    d
}

fn check_observable(p: &Poly, allowed: impl Fn(usize) -> bool, max: usize) -> Result<(), FeynmanError> {
    for e in p.keys() {
        let deg: u32 = e.iter().sum();
        if deg as usize > max || e.iter().enumerate().any(|(i, &k)| k > 0 && !allowed(i)) {
            return Err(FeynmanError::Observable { max });
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryReport {
    pub classical: Vec<(f64, f64)>,
    pub classical_limit: Limit,
    /// Samples and ε → 0 limit of each quantum diagram (heat kernel on star edge 0, then 1).
    pub quantum: [Vec<(f64, f64)>; 2],
    pub quantum_limit: [Limit; 2],
    /// Σ over colourings of the quantum diagram of (limit / |Aut|) · operator, applied to ω.
    pub extracted: FloatPoly,
    /// Chevalley–Eilenberg chain differential of ω.
    pub expected: Poly,
    /// Exact c with (raw contraction) = c·(chain differential) on ω.
    pub algebraic_ratio: Option<Scalar>,
    /// Numerical factor relating the extracted differential to the chain differential.
    pub constant: f64,
}

/// Probes for the boundary diagrams: the B zero-form and the A zero-form (boundary-flagged).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryProbes {
    pub b: Probe,
    pub a: Probe,
}

/// Differential of a boundary observable ω ∈ Sym(g[1]) (a polynomial in the t^a).
pub fn observable_differential_boundary(
    omega: &Poly,
    lie: &LieAlgebra,
    cutoff: &Cutoff,
    eps_seq: &[f64],
    l: f64,
    probes: &BoundaryProbes,
    tol: Tolerance,
) -> Result<BoundaryReport, FeynmanError> {
    lie.require_unimodular()?;
    check_eps(eps_seq, l)?;
    let dim = lie.dim();
    check_observable(omega, |i| i < dim, 3)?;
    let frame = PolyFrame::new(dim);
    let a = probes.a;
    let b = probes.b;
    let diag = move |t: f64| a.eval(t) * b.eval(t);
    let mut knots = a.knots();
    knots.extend(b.knots());
    let mut classical = Vec::new();
    let mut quantum = [Vec::new(), Vec::new()];
    for &eps in eps_seq {
        classical.push((eps, boundary_classical_factor(cutoff, eps, &diag, &knots, tol)?));
        let s = KernelScale::new(eps, l)?;
        for (red, q) in quantum.iter_mut().enumerate() {
            q.push((eps, boundary_quantum_factor(cutoff, &s, red, &b, tol)?));
        }
    }
    let classical_limit = limit_extrapolate(&classical)?;
    let quantum_limit = [limit_extrapolate(&quantum[0])?, limit_extrapolate(&quantum[1])?];
    let g = star_graph(2, false, Some(0))?;
    let raw = observable_operator(&g, lie)?.apply(frame.gens(), omega);
    let expected = frame.chain_term(lie).apply(frame.gens(), omega);
    let algebraic_ratio = proportionality(&raw, &expected);
    // the two heat-kernel placements are one isomorphism class
    let weight = quantum_limit[0].value / g.aut() as f64;
    let extracted = scale_poly(&raw, weight);
    let constant = algebraic_ratio.as_ref().map_or(f64::NAN, |r| weight * scalar::to_f64(r));
    Ok(BoundaryReport { classical, classical_limit, quantum, quantum_limit, extracted, expected, algebraic_ratio, constant })
}

/// O^{q,2}(ε, L) = ∫₀^∞ f₀ k_ε(t − s) P̃(t − s)² ds, the direct-channel analytic factor of the
/// trivector diagram at insertion point t, together with the image-channel remainder.
pub fn bulk_trivector_factor(cutoff: &Cutoff, scale: &KernelScale, t: f64, tol: Tolerance) -> Result<(f64, f64), FeynmanError> {
    if !(t > 0.0) {
        return Err(FeynmanError::BulkPoint(t));
    }
    let k = |u: f64| gaussian(cutoff, scale.eps, u);
    let p = |u: f64| propagator_noninvariant(cutoff, scale, u);
    let mut pts = Vec::new();
    for w in [0.0, 2.0 * libm::sqrt(scale.eps), 8.0 * libm::sqrt(scale.eps), 2.0 * libm::sqrt(scale.l), 8.0 * libm::sqrt(scale.l), cutoff.plateau()] {
        pts.push(t - w);
        pts.push(t + w);
    }
    let hi = t + cutoff.support();
    let direct = integrate(|s| k(t - s) * p(t - s) * p(t - s), 0.0, hi, &pts, tol)?;
    let image = integrate(
        |s| {
            let (u, v) = (t - s, t + s);
            let full = (k(u) + k(v)) * (p(u) + p(v)) * (p(u) + p(v));
            full - k(u) * p(u) * p(u)
        },
        0.0,
        hi,
        &pts,
        tol,
    )?;
    Ok((direct.value, image.value))
}

/// ∫₀^∞ f(s) f₀ k_ε(s − t) ds and the image term with s + t.
pub fn evaluation_identity(cutoff: &Cutoff, eps: f64, t: f64, f: &Probe, tol: Tolerance) -> Result<(f64, f64), FeynmanError> {
    let w = 2.0 * libm::sqrt(eps);
    let mut pts = f.knots();
    for m in [0.0, 1.0, 4.0, 12.0] {
        pts.push(t - m * w);
        pts.push(t + m * w);
    }
    let hi = f.support().1;
    let d = integrate(|s| f.eval(s) * gaussian(cutoff, eps, s - t), 0.0, hi, &pts, tol)?;
    let i = integrate(|s| f.eval(s) * gaussian(cutoff, eps, s + t), 0.0, hi, &pts, tol)?;
    Ok((d.value, i.value))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BulkReport {
    pub t: f64,
    pub trivector: Vec<(f64, f64)>,
    pub trivector_limit: Limit,
    pub image_max: f64,
    pub evaluation: Vec<(f64, f64)>,
    pub evaluation_limit: Limit,
    pub evaluation_image_max: f64,
    pub extracted: FloatPoly,
    /// Trivector term ½ f^{ab}_c ∂_a∂_b∂^c of d^q applied to α.
    pub expected: Poly,
    /// Σ over colourings of 1/|Aut|, times the limit, times the exact operator ratio.
    pub constant: f64,
}

/// Trivector part of the differential of a bulk observable α ∈ Sym(g[1] ⊕ g^∨[−1]) at t.
pub fn observable_differential_bulk(
    alpha: &Poly,
    t: f64,
    lie: &LieAlgebra,
    cutoff: &Cutoff,
    eps_seq: &[f64],
    l: f64,
    probe: &Probe,
    tol: Tolerance,
) -> Result<BulkReport, FeynmanError> {
    if !(t > 0.0) {
        return Err(FeynmanError::BulkPoint(t));
    }
    lie.require_unimodular()?;
    check_eps(eps_seq, l)?;
    check_observable(alpha, |_| true, 4)?;
    let frame = PolyFrame::new(lie.dim());
    let mut trivector = Vec::new();
    let mut image_max: f64 = 0.0;
    let mut evaluation = Vec::new();
    let mut evaluation_image_max: f64 = 0.0;
    for &eps in eps_seq {
        let (d, i) = bulk_trivector_factor(cutoff, &KernelScale::new(eps, l)?, t, tol)?;
        trivector.push((eps, d));
        image_max = image_max.max(i.abs());
        let (d, i) = evaluation_identity(cutoff, eps, t, probe, tol)?;
        evaluation.push((eps, d));
        evaluation_image_max = evaluation_image_max.max(i.abs());
    }
    let trivector_limit = limit_extrapolate(&trivector)?;
    let evaluation_limit = limit_extrapolate(&evaluation)?;
    // one class with the heat kernel on the B edge, one with it on an A edge
    let classes = [star_graph(2, true, Some(2))?, star_graph(2, true, Some(0))?];
    let raw = observable_operator(&classes[0], lie)?.apply(frame.gens(), alpha);
    let expected = frame.trivector_term(lie).apply(frame.gens(), alpha);
    let inv_aut: f64 = classes.iter().map(|g| 1.0 / g.aut() as f64).sum();
    let ratio = proportionality(&raw, &expected);
    let weight = inv_aut * trivector_limit.value;
    let extracted = scale_poly(&raw, weight);
    let constant = ratio.as_ref().map_or(f64::NAN, |r| weight * scalar::to_f64(r));
    Ok(BulkReport {
        t,
        trivector,
        trivector_limit,
        image_max,
        evaluation,
        evaluation_limit,
        evaluation_image_max,
        extracted,
        expected,
        constant,
    })
}

/// Ratio-2 schedule ending at `last`: last·2^{count−1−k}.
pub fn halving_schedule(last: f64, count: usize) -> Vec<f64> {
    geometric_schedule(last, 2.0, count)
}
