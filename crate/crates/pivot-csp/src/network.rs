//! Core data model for binary constraint networks.
//!
//! A network holds an ordered list of variables, a finite domain per
//! variable, and at most one binary relation per unordered variable pair.
//! Relations are stored once, in the canonical (lower index, higher index)
//! orientation, as dense bit matrices; the transposed orientation is served
//! by [`RelationView`]. A pair of variables with no stored constraint is
//! implicitly joined by a universal relation.
//!
//! Domains carry a liveness mask instead of shrinking in place: a relation
//! pair counts as present only when both endpoint values are live. This
//! keeps every derived notion (supports, functional directions, subproblem
//! comparison) consistent while filtering prunes values.

use std::collections::{BTreeMap, BTreeSet};

use crate::bits::BitMatrix;
use crate::error::{Error, Result};

/// Index of a variable inside a [`Network`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub(crate) usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Index of a value inside the declared domain of one variable.
///
/// A `Val` is only meaningful together with the variable it was drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Val(pub(crate) usize);

impl Val {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Debug)]
struct Domain {
    tokens: Vec<String>,
    token_index: BTreeMap<String, usize>,
    live: Vec<bool>,
    live_count: usize,
}

impl Domain {
    fn new(tokens: Vec<String>) -> Self {
        let token_index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        let live_count = tokens.len();
        let live = vec![true; tokens.len()];
        Domain {
            tokens,
            token_index,
            live,
            live_count,
        }
    }

    fn live_values(&self) -> impl Iterator<Item = Val> + '_ {
        self.live
            .iter()
            .enumerate()
            .filter(|(_, l)| **l)
            .map(|(i, _)| Val(i))
    }

    fn live_tokens(&self) -> BTreeSet<&str> {
        self.live_values()
            .map(|v| self.tokens[v.0].as_str())
            .collect()
    }
}

#[derive(Clone, Debug)]
enum StoredRelation {
    /// Declared constraint allowing every pair; pairs are materialized only
    /// when a filtering step has to remove one.
    Universal,
    /// Explicit pair table in canonical (i, j) orientation, i < j.
    Table(BitMatrix),
}

/// Functional direction flags of one relation, relative to the queried
/// `(i, j)` orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FunctionalDirections {
    pub i_to_j: bool,
    pub j_to_i: bool,
}

impl FunctionalDirections {
    pub fn any(self) -> bool {
        self.i_to_j || self.j_to_i
    }

    pub fn both(self) -> bool {
        self.i_to_j && self.j_to_i
    }
}

/// A partial assignment of values to a subset of the variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Instantiation {
    map: BTreeMap<Var, Val>,
}

impl Instantiation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn assign(&mut self, var: Var, value: Val) {
        self.map.insert(var, value);
    }

    pub fn get(&self, var: Var) -> Option<Val> {
        self.map.get(&var).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, Val)> + '_ {
        self.map.iter().map(|(v, a)| (*v, *a))
    }
}

/// Size summary of a network: variable count `n`, largest live domain `d`,
/// constraint count `e`, functional constraint count `e_f`, and the number
/// of constraints lying entirely inside a reference variable set (`e_r`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NetworkStats {
    pub n: usize,
    pub d: usize,
    pub e: usize,
    pub e_f: usize,
    pub e_r: usize,
}

/// A binary constraint network.
#[derive(Clone, Debug)]
pub struct Network {
    names: Vec<String>,
    name_index: BTreeMap<String, usize>,
    domains: Vec<Domain>,
    relations: BTreeMap<(usize, usize), StoredRelation>,
}

impl Network {
    pub fn builder() -> NetworkBuilder {
        NetworkBuilder::default()
    }

    pub fn var_count(&self) -> usize {
        self.names.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> {
        (0..self.var_count()).map(Var)
    }

    pub fn var(&self, name: &str) -> Option<Var> {
        self.name_index.get(name).copied().map(Var)
    }

    /// Like [`Network::var`] but failing with [`Error::UnknownVariable`].
    pub fn require_var(&self, name: &str) -> Result<Var> {
        self.var(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn name(&self, v: Var) -> &str {
        &self.names[v.0]
    }

    /// Live values of a domain, in declaration order.
    pub fn domain(&self, v: Var) -> impl Iterator<Item = Val> + '_ {
        self.domains[v.0].live_values()
    }

    pub fn domain_size(&self, v: Var) -> usize {
        self.domains[v.0].live_count
    }

    /// Number of declared values, live or not. Relation tables are sized by
    /// this, so it stays fixed for the lifetime of the network.
    pub fn declared_domain_size(&self, v: Var) -> usize {
        self.domains[v.0].tokens.len()
    }

    pub fn token(&self, v: Var, a: Val) -> &str {
        &self.domains[v.0].tokens[a.0]
    }

    /// Declared value index for a token, live or not.
    pub fn value(&self, v: Var, token: &str) -> Option<Val> {
        self.domains[v.0].token_index.get(token).copied().map(Val)
    }

    pub fn require_value(&self, v: Var, token: &str) -> Result<Val> {
        self.value(v, token).ok_or_else(|| Error::ValueNotInDomain {
            variable: self.name(v).to_string(),
            value: token.to_string(),
        })
    }

    pub fn is_live(&self, v: Var, a: Val) -> bool {
        self.domains[v.0].live[a.0]
    }

    /// Declared constraint scopes in canonical orientation.
    pub fn constraints(&self) -> impl Iterator<Item = (Var, Var)> + '_ {
        self.relations.keys().map(|(i, j)| (Var(*i), Var(*j)))
    }

    pub fn constraint_count(&self) -> usize {
        self.relations.len()
    }

    pub fn has_constraint(&self, i: Var, j: Var) -> bool {
        self.relations.contains_key(&canonical(i, j))
    }

    /// The relation between `i` and `j` seen in that orientation; universal
    /// when no constraint is declared.
    pub fn relation_view(&self, i: Var, j: Var) -> Result<RelationView<'_>> {
        if i == j {
            return Err(Error::SelfScope(self.name(i).to_string()));
        }
        Ok(RelationView { net: self, i, j })
    }

    /// Functional direction flags for the (possibly universal) relation
    /// between two distinct variables, computed by scanning live pairs.
    pub fn functional_directions(&self, i: Var, j: Var) -> Result<FunctionalDirections> {
        let forward = self.relation_view(i, j)?;
        let backward = self.relation_view(j, i)?;
        Ok(FunctionalDirections {
            i_to_j: forward.is_functional(),
            j_to_i: backward.is_functional(),
        })
    }

    /// The unique partner of `a_i` under the functional direction `i -> k`,
    /// or `None` when `a_i` has no support left in `D_k`.
    pub fn image(&self, i: Var, k: Var, a_i: Val) -> Result<Option<Val>> {
        let view = self.relation_view(i, k)?;
        if !view.is_functional() {
            return Err(Error::NotFunctional(
                self.name(i).to_string(),
                self.name(k).to_string(),
            ));
        }
        if !self.is_live(i, a_i) {
            return Ok(None);
        }
        Ok(view.partners(a_i).next())
    }

    /// Image lookup table for `i -> k`, indexed by declared value index of
    /// `D_i`. Dead or unsupported values map to `None`. One O(d^2) scan that
    /// makes each subsequent lookup O(1).
    pub(crate) fn image_table(&self, i: Var, k: Var) -> Result<Vec<Option<Val>>> {
        let view = self.relation_view(i, k)?;
        if !view.is_functional() {
            return Err(Error::NotFunctional(
                self.name(i).to_string(),
                self.name(k).to_string(),
            ));
        }
        let mut table = vec![None; self.declared_domain_size(i)];
        for a_i in self.domain(i) {
            table[a_i.0] = view.partners(a_i).next();
        }
        Ok(table)
    }

    /// All live values of `D_k` supporting `a_i` under the relation between
    /// `i` and `k`; the whole of `D_k` when the relation is universal.
    pub fn supports(&self, i: Var, a_i: Val, k: Var) -> Result<Vec<Val>> {
        if !self.is_live(i, a_i) {
            return Err(Error::ValueNotInDomain {
                variable: self.name(i).to_string(),
                value: self.token(i, a_i).to_string(),
            });
        }
        Ok(self.relation_view(i, k)?.partners(a_i).collect())
    }

    /// True iff every constraint with both endpoints assigned is satisfied.
    /// Constraints touching unassigned variables are ignored.
    pub fn is_consistent(&self, inst: &Instantiation) -> bool {
        self.relations
            .keys()
            .all(|&(i, j)| match (inst.get(Var(i)), inst.get(Var(j))) {
                (Some(a_i), Some(a_j)) => self
                    .relation_view(Var(i), Var(j))
                    .expect("distinct scope")
                    .contains(a_i, a_j),
                _ => true,
            })
    }

    /// Build an instantiation from `(variable, value)` token pairs,
    /// validating that every value is live in its current domain.
    pub fn instantiation(&self, assignments: &[(&str, &str)]) -> Result<Instantiation> {
        let mut inst = Instantiation::new();
        for (var_name, token) in assignments {
            let v = self.require_var(var_name)?;
            let a = self.require_value(v, token)?;
            if !self.is_live(v, a) {
                return Err(Error::ValueNotInDomain {
                    variable: var_name.to_string(),
                    value: token.to_string(),
                });
            }
            inst.assign(v, a);
        }
        Ok(inst)
    }

    /// The subproblem order: `self` is a subproblem of `other` iff domains
    /// shrank, the constraint set grew, and relation pairs shrank on every
    /// constraint both networks declare.
    pub fn is_subproblem(&self, other: &Network) -> Result<bool> {
        if self.names != other.names {
            return Err(Error::VariableSetMismatch);
        }
        for v in self.vars() {
            let mine = self.domains[v.0].live_tokens();
            let theirs = other.domains[v.0].live_tokens();
            if !mine.is_subset(&theirs) {
                return Ok(false);
            }
        }
        for &scope in other.relations.keys() {
            if !self.relations.contains_key(&scope) {
                return Ok(false);
            }
            let (i, j) = (Var(scope.0), Var(scope.1));
            let mine = self.live_pair_tokens(i, j);
            let theirs = other.live_pair_tokens(i, j);
            if !mine.is_subset(&theirs) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Size summary; `roots` feeds the count of constraints lying entirely
    /// inside the root set (`e_r`, zero when no root set is supplied).
    pub fn stats(&self, roots: Option<&BTreeSet<Var>>) -> NetworkStats {
        let e_f = self
            .relations
            .keys()
            .filter(|&&(i, j)| {
                self.functional_directions(Var(i), Var(j))
                    .map(|d| d.any())
                    .unwrap_or(false)
            })
            .count();
        let e_r = roots
            .map(|r| {
                self.relations
                    .keys()
                    .filter(|&&(i, j)| r.contains(&Var(i)) && r.contains(&Var(j)))
                    .count()
            })
            .unwrap_or(0);
        NetworkStats {
            n: self.var_count(),
            d: self.vars().map(|v| self.domain_size(v)).max().unwrap_or(0),
            e: self.constraint_count(),
            e_f,
            e_r,
        }
    }

    fn live_pair_tokens(&self, i: Var, j: Var) -> BTreeSet<(String, String)> {
        let view = self.relation_view(i, j).expect("distinct scope");
        view.pairs()
            .into_iter()
            .map(|(a, b)| (self.token(i, a).to_string(), self.token(j, b).to_string()))
            .collect()
    }

    /// Makes the relation between `i` and `j` an explicit table, adding the
    /// constraint when no scope existed. Returns true iff a new constraint
    /// was created (a previously universal *declared* relation materialized
    /// in place does not count as a creation).
    pub(crate) fn ensure_explicit(&mut self, i: Var, j: Var) -> bool {
        let scope = canonical(i, j);
        let rows = self.declared_domain_size(Var(scope.0));
        let cols = self.declared_domain_size(Var(scope.1));
        match self.relations.get(&scope) {
            Some(StoredRelation::Table(_)) => false,
            Some(StoredRelation::Universal) => {
                self.relations
                    .insert(scope, StoredRelation::Table(BitMatrix::full(rows, cols)));
                false
            }
            None => {
                self.relations
                    .insert(scope, StoredRelation::Table(BitMatrix::full(rows, cols)));
                true
            }
        }
    }

    /// Removes one pair, given in the `(i, j)` orientation, from an explicit
    /// relation table.
    pub(crate) fn remove_pair(&mut self, i: Var, j: Var, a_i: Val, a_j: Val) {
        let scope = canonical(i, j);
        let (r, c) = if i.0 <= j.0 { (a_i, a_j) } else { (a_j, a_i) };
        match self.relations.get_mut(&scope) {
            Some(StoredRelation::Table(m)) => m.set(r.0, c.0, false),
            _ => panic!("remove_pair on a non-explicit relation"),
        }
    }

    pub(crate) fn remove_value(&mut self, v: Var, a: Val) {
        let dom = &mut self.domains[v.0];
        if dom.live[a.0] {
            dom.live[a.0] = false;
            dom.live_count -= 1;
        }
    }
}

/// Structural equality on canonical forms: variable names, live domain
/// token sets, declared scopes, and live pair token sets must all agree.
/// Representation differences (declared-but-dead values, universal markers
/// vs fully set tables) do not matter.
impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        if self.names != other.names {
            return false;
        }
        for v in self.vars() {
            if self.domains[v.0].live_tokens() != other.domains[v.0].live_tokens() {
                return false;
            }
        }
        let scopes: BTreeSet<_> = self.relations.keys().copied().collect();
        if scopes != other.relations.keys().copied().collect() {
            return false;
        }
        scopes.iter().all(|&(i, j)| {
            self.live_pair_tokens(Var(i), Var(j)) == other.live_pair_tokens(Var(i), Var(j))
        })
    }
}

impl Eq for Network {}

fn canonical(i: Var, j: Var) -> (usize, usize) {
    if i.0 <= j.0 {
        (i.0, j.0)
    } else {
        (j.0, i.0)
    }
}

/// Domain-wise union, constraint-set intersection and relation-wise union
/// of two subproblems of a common base network.
pub fn union_networks(a: &Network, b: &Network, base: &Network) -> Result<Network> {
    if !a.is_subproblem(base)? {
        return Err(Error::NotSubproblem("the first network"));
    }
    if !b.is_subproblem(base)? {
        return Err(Error::NotSubproblem("the second network"));
    }
    let mut out = base.clone();
    // Domains: a value survives iff it is live in either input.
    for v in base.vars() {
        let a_live = a.domains[v.0].live_tokens();
        let b_live = b.domains[v.0].live_tokens();
        for val in base.domain(v).collect::<Vec<_>>() {
            let tok = base.token(v, val);
            if !a_live.contains(tok) && !b_live.contains(tok) {
                out.remove_value(v, val);
            }
        }
    }
    // Constraints: intersection of the declared scopes; pairs: union.
    let shared: Vec<(usize, usize)> = a
        .relations
        .keys()
        .filter(|s| b.relations.contains_key(s))
        .copied()
        .collect();
    out.relations.clear();
    for scope in shared {
        let (i, j) = (Var(scope.0), Var(scope.1));
        let rows = base.declared_domain_size(i);
        let cols = base.declared_domain_size(j);
        let mut m = BitMatrix::empty(rows, cols);
        for net in [a, b] {
            for (tok_i, tok_j) in net.live_pair_tokens(i, j) {
                let r = base.value(i, &tok_i).expect("pair token in base domain");
                let c = base.value(j, &tok_j).expect("pair token in base domain");
                m.set(r.0, c.0, true);
            }
        }
        out.relations.insert(scope, StoredRelation::Table(m));
    }
    Ok(out)
}

/// Read access to one relation in a chosen orientation.
#[derive(Clone, Copy)]
pub struct RelationView<'a> {
    net: &'a Network,
    i: Var,
    j: Var,
}

impl<'a> RelationView<'a> {
    fn stored(&self) -> Option<&'a StoredRelation> {
        self.net.relations.get(&canonical(self.i, self.j))
    }

    /// True iff a constraint is declared between the two variables.
    pub fn is_constraint(&self) -> bool {
        self.stored().is_some()
    }

    /// True iff every cross-product pair of the current domains is allowed,
    /// either because no constraint exists or because the stored relation is
    /// still the symbolic universal one.
    pub fn is_universal(&self) -> bool {
        matches!(self.stored(), None | Some(StoredRelation::Universal))
    }

    pub fn contains(&self, a_i: Val, a_j: Val) -> bool {
        if !self.net.is_live(self.i, a_i) || !self.net.is_live(self.j, a_j) {
            return false;
        }
        match self.stored() {
            None | Some(StoredRelation::Universal) => true,
            Some(StoredRelation::Table(m)) => {
                if self.i.0 <= self.j.0 {
                    m.get(a_i.0, a_j.0)
                } else {
                    m.get(a_j.0, a_i.0)
                }
            }
        }
    }

    /// Live partners of `a_i` in `D_j`, in declaration order.
    pub fn partners(&self, a_i: Val) -> impl Iterator<Item = Val> + 'a {
        let this = *self;
        self.net
            .domain(self.j)
            .filter(move |&a_j| this.contains(a_i, a_j))
    }

    /// All live pairs in the `(i, j)` orientation, sorted.
    pub fn pairs(&self) -> Vec<(Val, Val)> {
        let mut out = Vec::new();
        for a_i in self.net.domain(self.i) {
            for a_j in self.partners(a_i) {
                out.push((a_i, a_j));
            }
        }
        out
    }

    pub fn pair_count(&self) -> usize {
        self.net
            .domain(self.i)
            .map(|a_i| self.partners(a_i).count())
            .sum()
    }

    /// True iff every live value of `D_i` has at most one live partner.
    pub fn is_functional(&self) -> bool {
        self.net
            .domain(self.i)
            .all(|a_i| self.partners(a_i).take(2).count() <= 1)
    }

    /// Live pairs as token strings; handy for reports and tests.
    pub fn token_pairs(&self) -> Vec<(&'a str, &'a str)> {
        self.pairs()
            .into_iter()
            .map(|(a, b)| (self.net.token(self.i, a), self.net.token(self.j, b)))
            .collect()
    }
}

#[derive(Clone, Debug)]
enum RelationDecl {
    Universal,
    Pairs(Vec<(String, String)>),
}

/// Collects variable and constraint declarations, validated as a whole by
/// [`NetworkBuilder::finish`].
#[derive(Clone, Debug, Default)]
pub struct NetworkBuilder {
    variables: Vec<(String, Vec<String>)>,
    constraints: Vec<(String, String, RelationDecl)>,
}

impl NetworkBuilder {
    pub fn variable<S, I, T>(mut self, name: S, values: I) -> Self
    where
        S: Into<String>,
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        self.variables
            .push((name.into(), values.into_iter().map(Into::into).collect()));
        self
    }

    pub fn constraint<S, I, A, B>(mut self, i: S, j: S, pairs: I) -> Self
    where
        S: Into<String>,
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let pairs = pairs
            .into_iter()
            .map(|(a, b)| (a.into(), b.into()))
            .collect();
        self.constraints
            .push((i.into(), j.into(), RelationDecl::Pairs(pairs)));
        self
    }

    /// A declared constraint that allows every pair of the two domains.
    pub fn universal<S: Into<String>>(mut self, i: S, j: S) -> Self {
        self.constraints
            .push((i.into(), j.into(), RelationDecl::Universal));
        self
    }

    pub fn finish(self) -> Result<Network> {
        let mut names = Vec::new();
        let mut name_index = BTreeMap::new();
        let mut domains = Vec::new();
        for (name, tokens) in self.variables {
            if name_index.insert(name.clone(), names.len()).is_some() {
                return Err(Error::DuplicateVariable(name));
            }
            let mut seen = BTreeSet::new();
            for t in &tokens {
                if !seen.insert(t.clone()) {
                    return Err(Error::InvalidInstance(format!(
                        "duplicate value `{t}` in the domain of `{name}`"
                    )));
                }
            }
            names.push(name);
            domains.push(Domain::new(tokens));
        }
        let mut net = Network {
            names,
            name_index,
            domains,
            relations: BTreeMap::new(),
        };
        for (ni, nj, decl) in self.constraints {
            let vi = net.require_var(&ni)?;
            let vj = net.require_var(&nj)?;
            if vi == vj {
                return Err(Error::SelfScope(ni));
            }
            let scope = canonical(vi, vj);
            if net.relations.contains_key(&scope) {
                return Err(Error::DuplicateConstraint(ni, nj));
            }
            let stored = match decl {
                RelationDecl::Universal => StoredRelation::Universal,
                RelationDecl::Pairs(pairs) => {
                    let rows = net.declared_domain_size(Var(scope.0));
                    let cols = net.declared_domain_size(Var(scope.1));
                    let mut m = BitMatrix::empty(rows, cols);
                    for (ta, tb) in pairs {
                        let a = net.require_value(vi, &ta)?;
                        let b = net.require_value(vj, &tb)?;
                        let (r, c) = if vi.0 <= vj.0 { (a, b) } else { (b, a) };
                        m.set(r.0, c.0, true);
                    }
                    StoredRelation::Table(m)
                }
            };
            net.relations.insert(scope, stored);
        }
        Ok(net)
    }
}
