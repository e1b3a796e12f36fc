//! Structural analysis of the functional subgraph: strongly connected
//! components, reduced graph, minimum root sets, pivot candidates and
//! root-compatible assignment orderings.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::network::{Network, Var};

/// Deterministic policy for the free choices of the structural algorithms:
/// which member represents a source component, in which order root
/// variables are numbered, and which origin becomes the pivot candidate
/// when several are available.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Always pick the lowest variable index (for origins: the earliest
    /// numbered one). The default, and the one golden tests rely on.
    #[default]
    Lex,
    /// Seeded random choices; used to explore how pivot choice changes the
    /// filtered problem.
    Seeded(u64),
}

/// The directed subgraph spanned by the functional directions of the
/// declared constraints. A bijective constraint contributes two arcs.
#[derive(Clone, Debug)]
pub struct FunctionalGraph {
    n: usize,
    out: Vec<Vec<usize>>,
    arcs: BTreeSet<(usize, usize)>,
}

impl FunctionalGraph {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (Var, Var)> + '_ {
        self.arcs.iter().map(|&(a, b)| (Var(a), Var(b)))
    }

    pub fn has_arc(&self, from: Var, to: Var) -> bool {
        self.arcs.contains(&(from.index(), to.index()))
    }

    pub fn successors(&self, v: Var) -> impl Iterator<Item = Var> + '_ {
        self.out[v.index()].iter().map(|&t| Var(t))
    }
}

pub fn functional_subgraph(net: &Network) -> FunctionalGraph {
    let n = net.var_count();
    let mut out = vec![Vec::new(); n];
    let mut arcs = BTreeSet::new();
    for (i, j) in net.constraints() {
        let dirs = net
            .functional_directions(i, j)
            .expect("constraint scopes are distinct");
        if dirs.i_to_j {
            arcs.insert((i.index(), j.index()));
        }
        if dirs.j_to_i {
            arcs.insert((j.index(), i.index()));
        }
    }
    for &(a, b) in &arcs {
        out[a].push(b);
    }
    FunctionalGraph { n, out, arcs }
}

/// Variables reachable from `x` by a nonempty directed path. `x` itself
/// appears only when it lies on a cycle.
pub fn descendants(g: &FunctionalGraph, x: Var) -> BTreeSet<Var> {
    let mut reached = BTreeSet::new();
    let mut queue: VecDeque<usize> = g.out[x.index()].iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        if reached.insert(Var(v)) {
            queue.extend(&g.out[v]);
        }
    }
    reached
}

/// Partition of the nodes into strongly connected components.
#[derive(Clone, Debug)]
pub struct SccDecomposition {
    components: Vec<Vec<Var>>,
    component_of: Vec<usize>,
}

impl SccDecomposition {
    pub fn components(&self) -> &[Vec<Var>] {
        &self.components
    }

    pub fn component_of(&self, v: Var) -> usize {
        self.component_of[v.index()]
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

pub fn tarjan_scc(g: &FunctionalGraph) -> SccDecomposition {
    tarjan_scc_counted(g).0
}

/// Tarjan's algorithm with an elementary-step counter (node visits plus arc
/// relaxations), used to check the linear cost bound.
pub fn tarjan_scc_counted(g: &FunctionalGraph) -> (SccDecomposition, usize) {
    struct State<'g> {
        g: &'g FunctionalGraph,
        index: usize,
        idx: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        comps: Vec<Vec<Var>>,
        comp_of: Vec<usize>,
        steps: usize,
    }

    fn connect(v: usize, st: &mut State<'_>) {
        st.steps += 1;
        st.idx[v] = Some(st.index);
        st.low[v] = st.index;
        st.index += 1;
        st.stack.push(v);
        st.on_stack[v] = true;
        for w in st.g.out[v].clone() {
            st.steps += 1;
            if st.idx[w].is_none() {
                connect(w, st);
                st.low[v] = st.low[v].min(st.low[w]);
            } else if st.on_stack[w] {
                st.low[v] = st.low[v].min(st.idx[w].unwrap());
            }
        }
        if st.low[v] == st.idx[v].unwrap() {
            let id = st.comps.len();
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().expect("component stack");
                st.on_stack[w] = false;
                st.comp_of[w] = id;
                comp.push(Var(w));
                if w == v {
                    break;
                }
            }
            comp.sort();
            st.comps.push(comp);
        }
    }

    let n = g.node_count();
    let mut st = State {
        g,
        index: 0,
        idx: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        comps: Vec::new(),
        comp_of: vec![usize::MAX; n],
        steps: 0,
    };
    for v in 0..n {
        if st.idx[v].is_none() {
            connect(v, &mut st);
        }
    }
    (
        SccDecomposition {
            components: st.comps,
            component_of: st.comp_of,
        },
        st.steps,
    )
}

/// The acyclic graph obtained by collapsing each strongly connected
/// component to a single node.
#[derive(Clone, Debug)]
pub struct ReducedGraph {
    node_count: usize,
    arcs: BTreeSet<(usize, usize)>,
    in_degree: Vec<usize>,
}

impl ReducedGraph {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arcs.iter().copied()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Component ids with no incoming arc, ascending.
    pub fn sources(&self) -> Vec<usize> {
        (0..self.node_count)
            .filter(|&t| self.in_degree[t] == 0)
            .collect()
    }
}

pub fn reduce(g: &FunctionalGraph, scc: &SccDecomposition) -> ReducedGraph {
    let node_count = scc.len();
    let mut arcs = BTreeSet::new();
    for (from, to) in g.arcs() {
        let (a, b) = (scc.component_of(from), scc.component_of(to));
        if a != b {
            arcs.insert((a, b));
        }
    }
    let mut in_degree = vec![0; node_count];
    for &(_, b) in &arcs {
        in_degree[b] += 1;
    }
    ReducedGraph {
        node_count,
        arcs,
        in_degree,
    }
}

/// A set of variables from which every other variable is reachable in the
/// functional subgraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSet {
    members: BTreeSet<Var>,
}

impl RootSet {
    pub fn from_vars<I: IntoIterator<Item = Var>>(vars: I) -> Self {
        RootSet {
            members: vars.into_iter().collect(),
        }
    }

    pub fn members(&self) -> &BTreeSet<Var> {
        &self.members
    }

    pub fn contains(&self, v: Var) -> bool {
        self.members.contains(&v)
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// One representative per source component of the reduced graph; minimum in
/// cardinality among all root sets.
pub fn minimum_root_set(net: &Network, tie_break: TieBreak) -> RootSet {
    let g = functional_subgraph(net);
    let scc = tarjan_scc(&g);
    let red = reduce(&g, &scc);
    let mut rng = seeded_rng(tie_break);
    let members = red
        .sources()
        .into_iter()
        .map(|t| {
            let comp = &scc.components()[t];
            match &mut rng {
                None => comp[0],
                Some(rng) => comp[rng.gen_range(0..comp.len())],
            }
        })
        .collect();
    RootSet { members }
}

/// Reachability check of the root-set property: every variable outside the
/// candidate is a descendant of some member.
pub fn is_root_set(net: &Network, candidate: &BTreeSet<Var>) -> bool {
    uncovered_variables(net, candidate).is_empty()
}

/// The variables a candidate root set fails to reach, ascending.
pub fn uncovered_variables(net: &Network, candidate: &BTreeSet<Var>) -> Vec<Var> {
    unreachable_from(&functional_subgraph(net), candidate)
}

fn unreachable_from(g: &FunctionalGraph, from: &BTreeSet<Var>) -> Vec<Var> {
    let mut reached = vec![false; g.node_count()];
    let mut queue: VecDeque<usize> = from.iter().map(|v| v.index()).collect();
    for v in from {
        reached[v.index()] = true;
    }
    while let Some(v) = queue.pop_front() {
        for &w in &g.out[v] {
            if !reached[w] {
                reached[w] = true;
                queue.push_back(w);
            }
        }
    }
    (0..g.node_count())
        .filter(|&v| !reached[v])
        .map(Var)
        .collect()
}

/// A root-compatible total ordering together with one pivot-candidate arc
/// per non-root variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotPlan {
    roots: RootSet,
    ordering: Vec<Var>,
    position: Vec<usize>,
    candidates: BTreeMap<Var, Var>,
    tie_break: TieBreak,
}

impl PivotPlan {
    pub fn roots(&self) -> &RootSet {
        &self.roots
    }

    pub fn r(&self) -> usize {
        self.roots.size()
    }

    pub fn n(&self) -> usize {
        self.ordering.len()
    }

    pub fn ordering(&self) -> &[Var] {
        &self.ordering
    }

    pub fn position(&self, v: Var) -> usize {
        self.position[v.index()]
    }

    /// The origin of the candidate arc targeting `target`, when `target` is
    /// not a root.
    pub fn candidate(&self, target: Var) -> Option<Var> {
        self.candidates.get(&target).copied()
    }

    /// Candidate arcs as `(origin, target)`, ordered by target.
    pub fn candidates(&self) -> impl Iterator<Item = (Var, Var)> + '_ {
        self.candidates.iter().map(|(t, o)| (*o, *t))
    }

    pub fn tie_break(&self) -> TieBreak {
        self.tie_break
    }

    /// Validates and assembles a plan from externally supplied parts: the
    /// ordering must be a permutation prefixed by the roots, and every
    /// non-root variable needs exactly one candidate arc that is functional
    /// in the network and directed from earlier to later in the ordering.
    pub fn from_parts(
        net: &Network,
        roots: RootSet,
        ordering: Vec<Var>,
        candidates: BTreeMap<Var, Var>,
    ) -> Result<Self> {
        let n = net.var_count();
        if ordering.len() != n
            || ordering
                .iter()
                .map(|v| v.index())
                .collect::<BTreeSet<_>>()
                .len()
                != n
        {
            return Err(Error::InvalidPlan(
                "ordering is not a permutation of the variables".into(),
            ));
        }
        let r = roots.size();
        let prefix: BTreeSet<Var> = ordering[..r].iter().copied().collect();
        if prefix != *roots.members() {
            return Err(Error::InvalidPlan(
                "ordering is not prefixed by the root set".into(),
            ));
        }
        let mut position = vec![0; n];
        for (p, v) in ordering.iter().enumerate() {
            position[v.index()] = p;
        }
        for &target in &ordering[r..] {
            let Some(&origin) = candidates.get(&target) else {
                return Err(Error::InvalidPlan(format!(
                    "non-root variable `{}` has no pivot candidate",
                    net.name(target)
                )));
            };
            if position[origin.index()] >= position[target.index()] {
                return Err(Error::InvalidPlan(format!(
                    "candidate origin `{}` does not precede its target `{}`",
                    net.name(origin),
                    net.name(target)
                )));
            }
            if !net.has_constraint(origin, target)
                || !net.functional_directions(origin, target)?.i_to_j
            {
                return Err(Error::InvalidPlan(format!(
                    "candidate `{}` -> `{}` is not a functional constraint",
                    net.name(origin),
                    net.name(target)
                )));
            }
        }
        for target in candidates.keys() {
            if roots.contains(*target) {
                return Err(Error::InvalidPlan(format!(
                    "candidate targets the root variable `{}`",
                    net.name(*target)
                )));
            }
        }
        Ok(PivotPlan {
            roots,
            ordering,
            position,
            candidates,
            tie_break: TieBreak::Lex,
        })
    }
}

pub fn compute_pivot_plan(
    net: &Network,
    roots: &RootSet,
    tie_break: TieBreak,
) -> Result<PivotPlan> {
    compute_pivot_plan_counted(net, roots, tie_break).map(|(p, _)| p)
}

/// Single pass over the functional subgraph building both the pivot
/// candidate set and a root-compatible ordering, with an elementary-step
/// counter for the linear cost bound.
///
/// Bookkeeping: `next_possible` queues unmarked variables that became the
/// target of an arc leaving a marked variable; `origin[k]` collects those
/// marked origins in numbering order, so its first entry is the one with
/// the smallest ordering number.
pub fn compute_pivot_plan_counted(
    net: &Network,
    roots: &RootSet,
    tie_break: TieBreak,
) -> Result<(PivotPlan, usize)> {
    let g = functional_subgraph(net);
    let n = net.var_count();
    let mut rng = seeded_rng(tie_break);
    let mut steps = 0usize;

    let mut marked = vec![false; n];
    let mut in_next = vec![false; n];
    let mut origin: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut next_possible: VecDeque<usize> = VecDeque::new();
    let mut ordering: Vec<Var> = Vec::with_capacity(n);
    let mut candidates = BTreeMap::new();

    let scan_successors = |x: usize,
                           marked: &[bool],
                           in_next: &mut [bool],
                           origin: &mut [Vec<usize>],
                           next_possible: &mut VecDeque<usize>,
                           steps: &mut usize,
                           skip_roots: bool| {
        for &y in &g.out[x] {
            *steps += 1;
            if marked[y] || (skip_roots && roots.contains(Var(y))) {
                continue;
            }
            if !in_next[y] {
                in_next[y] = true;
                next_possible.push_back(y);
            }
            origin[y].push(x);
        }
    };

    // Step 1: number the roots.
    let mut root_list: Vec<usize> = roots.members().iter().map(|v| v.index()).collect();
    if let Some(rng) = &mut rng {
        root_list.shuffle(rng);
    }
    for x in root_list {
        steps += 1;
        marked[x] = true;
        ordering.push(Var(x));
        scan_successors(
            x,
            &marked,
            &mut in_next,
            &mut origin,
            &mut next_possible,
            &mut steps,
            true,
        );
    }

    // Step 2: number the rest, recording one candidate arc per variable.
    while ordering.len() < n {
        let Some(k) = next_possible.pop_front() else {
            let unreachable = (0..n)
                .filter(|&v| !marked[v])
                .map(|v| net.name(Var(v)).to_string())
                .collect();
            return Err(Error::NotRootSet { unreachable });
        };
        steps += 1;
        marked[k] = true;
        ordering.push(Var(k));
        let h = match &mut rng {
            None => origin[k][0],
            Some(rng) => origin[k][rng.gen_range(0..origin[k].len())],
        };
        candidates.insert(Var(k), Var(h));
        scan_successors(
            k,
            &marked,
            &mut in_next,
            &mut origin,
            &mut next_possible,
            &mut steps,
            false,
        );
    }

    let mut position = vec![0; n];
    for (p, v) in ordering.iter().enumerate() {
        position[v.index()] = p;
    }
    Ok((
        PivotPlan {
            roots: roots.clone(),
            ordering,
            position,
            candidates,
            tie_break,
        },
        steps,
    ))
}

/// Why an ordering fails to be root compatible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderingIssue {
    NotPermutation,
    /// A non-root variable sits inside the root prefix (or vice versa).
    NotPrefixed {
        variable: Var,
    },
    /// No earlier variable reaches this one through a functional arc.
    NoFunctionalAncestor {
        variable: Var,
    },
}

pub fn r_compatibility_issue(
    ordering: &[Var],
    roots: &RootSet,
    g: &FunctionalGraph,
) -> Option<OrderingIssue> {
    let n = g.node_count();
    let distinct: BTreeSet<usize> = ordering.iter().map(|v| v.index()).collect();
    if ordering.len() != n || distinct.len() != n || distinct.iter().any(|&v| v >= n) {
        return Some(OrderingIssue::NotPermutation);
    }
    let r = roots.size();
    for &v in &ordering[..r] {
        if !roots.contains(v) {
            return Some(OrderingIssue::NotPrefixed { variable: v });
        }
    }
    for (pos, &v) in ordering.iter().enumerate().skip(r) {
        let has_ancestor = ordering[..pos].iter().any(|&u| g.has_arc(u, v));
        if !has_ancestor {
            return Some(OrderingIssue::NoFunctionalAncestor { variable: v });
        }
    }
    None
}

/// Both conditions of root compatibility: the ordering starts with the root
/// set and every later variable has an earlier functional ancestor.
pub fn is_r_compatible(ordering: &[Var], roots: &RootSet, g: &FunctionalGraph) -> bool {
    r_compatibility_issue(ordering, roots, g).is_none()
}

fn seeded_rng(tie_break: TieBreak) -> Option<ChaCha8Rng> {
    match tie_break {
        TieBreak::Lex => None,
        TieBreak::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    }
}
