//! Independent ground truth for small inputs.
//!
//! [`brute_force_lbi`] is a naive bounded prover for the original calculus
//! with explicit contraction and weakening. It has its own bunch type and
//! normalizer and never calls into the calculus, check or prover modules.
//! Bunches are kept as n-ary trees with sorted children, so associativity,
//! exchange and unit laws cost nothing; semicolon duplicates are *not*
//! merged, so contraction must be applied as an explicit rule.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::bunch::{Bunch, RawSequent, Sequent, StarBunch};
use crate::formula::{Connective, Formula};
use crate::prover::{verify, Prover, SearchConfig, Verdict};
use crate::render::{Render, Style};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorpusSpec {
    pub variables: Vec<String>,
    pub max_formula_size: usize,
    pub max_antecedent_leaves: usize,
    /// Adds `top`, `bot` and `1` to the formula atoms and lets `Em`/`Ea`
    /// occur inside antecedents. Without it the units only appear as whole
    /// antecedents (`Em |- A`, `Ea |- A`).
    pub include_units: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    /// A derivation of this height or less exists.
    Provable { height: usize },
    /// No derivation of height at most `depth_exhausted`.
    Inconclusive { depth_exhausted: usize },
}

impl OracleVerdict {
    pub fn is_provable(&self) -> bool {
        matches!(self, OracleVerdict::Provable { .. })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("corpus bounds too large: more than {ceiling} sequents")]
    Overflow { ceiling: usize },
    #[error("corpus bounds must be positive and name at least one variable")]
    EmptySpec,
}

/// Hard ceiling on the number of enumerated sequents.
pub const CORPUS_CEILING: usize = 2_000_000;

// ---------------------------------------------------------------------------
// brute-force prover

/// Hash-consed n-ary bunch node. Children are sorted by id, so equal ids
/// mean equal bunches up to associativity, exchange and unit laws.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Node {
    Leaf(u32),
    Ea,
    Em,
    Semi(Box<[u32]>),
    Comma(Box<[u32]>),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Shape {
    Atom,
    Top,
    Bot,
    One,
    Bin(Connective, u32, u32),
}

const EA: u32 = 0;
const EM: u32 = 1;

struct Arena {
    nodes: Vec<Node>,
    leaves: Vec<u32>,
    bot: Vec<bool>,
    node_ids: HashMap<Node, u32>,
    shapes: Vec<Shape>,
    formulas: Vec<Formula>,
    formula_ids: HashMap<Formula, u32>,
}

impl Arena {
    fn new() -> Arena {
        let mut arena = Arena {
            nodes: Vec::new(),
            leaves: Vec::new(),
            bot: Vec::new(),
            node_ids: HashMap::new(),
            shapes: Vec::new(),
            formulas: Vec::new(),
            formula_ids: HashMap::new(),
        };
        assert_eq!(arena.node(Node::Ea), EA);
        assert_eq!(arena.node(Node::Em), EM);
        arena
    }

    fn formula(&mut self, f: &Formula) -> u32 {
        if let Some(&id) = self.formula_ids.get(f) {
            return id;
        }
        let shape = match f {
            Formula::Var(_) => Shape::Atom,
            Formula::Top => Shape::Top,
            Formula::Bot => Shape::Bot,
            Formula::One => Shape::One,
            _ => {
                let (conn, l, r) = f.as_binary().expect("compound formula");
                Shape::Bin(conn, self.formula(l), self.formula(r))
            }
        };
        let id = self.shapes.len() as u32;
        self.shapes.push(shape);
        self.formulas.push(f.clone());
        self.formula_ids.insert(f.clone(), id);
        id
    }

    fn node(&mut self, n: Node) -> u32 {
        if let Some(&id) = self.node_ids.get(&n) {
            return id;
        }
        let (leaves, bot) = match &n {
            Node::Leaf(f) => (1, self.shapes[*f as usize] == Shape::Bot),
            Node::Ea | Node::Em => (1, false),
            Node::Semi(cs) | Node::Comma(cs) => (
                cs.iter().map(|&c| self.leaves[c as usize]).sum(),
                cs.iter().any(|&c| self.bot[c as usize]),
            ),
        };
        let id = self.nodes.len() as u32;
        self.nodes.push(n.clone());
        self.leaves.push(leaves);
        self.bot.push(bot);
        self.node_ids.insert(n, id);
        id
    }

    fn leaf(&mut self, f: u32) -> u32 {
        self.node(Node::Leaf(f))
    }

    fn children(&self, id: u32) -> &[u32] {
        match &self.nodes[id as usize] {
            Node::Semi(cs) | Node::Comma(cs) => cs,
            _ => &[],
        }
    }

    fn is_comma(&self, id: u32) -> bool {
        matches!(self.nodes[id as usize], Node::Comma(_))
    }

    fn is_semi(&self, id: u32) -> bool {
        matches!(self.nodes[id as usize], Node::Semi(_))
    }

    /// Flattens, drops own units and sorts; no deduplication.
    fn join(&mut self, comma: bool, children: Vec<u32>) -> u32 {
        let unit = if comma { EM } else { EA };
        let mut out = Vec::with_capacity(children.len());
        for c in children {
            if c == unit {
                continue;
            }
            if (comma && self.is_comma(c)) || (!comma && self.is_semi(c)) {
                out.extend_from_slice(self.children(c));
            } else {
                out.push(c);
            }
        }
        out.sort_unstable();
        match out.len() {
            0 => unit,
            1 => out[0],
            _ if comma => self.node(Node::Comma(out.into())),
            _ => self.node(Node::Semi(out.into())),
        }
    }

    fn from_bunch(&mut self, b: &Bunch) -> u32 {
        match b {
            Bunch::Leaf(f) => {
                let f = self.formula(f);
                self.leaf(f)
            }
            Bunch::EmptyM => EM,
            Bunch::EmptyA => EA,
            Bunch::Comma(l, r) | Bunch::Semi(l, r) => {
                let cs = vec![self.from_bunch(l), self.from_bunch(r)];
                self.join(matches!(b, Bunch::Comma(..)), cs)
            }
        }
    }

    /// Replaces the node at `path` and re-canonicalizes along the path.
    fn replace(&mut self, root: u32, path: &[usize], repl: u32) -> u32 {
        let Some((&i, rest)) = path.split_first() else { return repl };
        let mut cs = self.children(root).to_vec();
        cs[i] = self.replace(cs[i], rest, repl);
        let comma = self.is_comma(root);
        self.join(comma, cs)
    }

    fn paths(&self, root: u32, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(prefix.clone());
        for (i, &c) in self.children(root).iter().enumerate() {
            prefix.push(i);
            self.paths(c, prefix, out);
            prefix.pop();
        }
    }

    fn at(&self, root: u32, path: &[usize]) -> u32 {
        path.iter().fold(root, |n, &i| self.children(n)[i])
    }
}

fn pick(items: &[u32], mask: u32) -> Vec<u32> {
    items.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &c)| c).collect()
}

#[derive(Default, Clone, Copy)]
struct MemoEntry {
    /// A derivation of at most this height is known.
    proved: Option<u32>,
    /// No derivation of at most this height exists.
    failed: u32,
}

/// (antecedent node, succedent formula)
type Goal = (u32, u32);

/// Bounded prover with a memo that can be reused across queries sharing
/// the same contraction cap.
pub struct Oracle {
    ctr_leaf_cap: u32,
    arena: Arena,
    memo: HashMap<Goal, MemoEntry>,
    max_memo: usize,
}

impl Oracle {
    /// `ctr_leaf_cap` bounds the number of antecedent leaves contraction may
    /// produce; the other rules are unrestricted.
    pub fn new(ctr_leaf_cap: usize) -> Oracle {
        Oracle { ctr_leaf_cap: ctr_leaf_cap as u32, arena: Arena::new(), memo: HashMap::new(), max_memo: 4_000_000 }
    }

    /// Iterative deepening up to `depth_bound`.
    pub fn prove(&mut self, s: &RawSequent, depth_bound: usize) -> OracleVerdict {
        self.prove_from(s, 1, depth_bound)
    }

    /// Iterative deepening over heights `from..=depth_bound`; heights below
    /// `from` are assumed to be already refuted.
    pub fn prove_from(&mut self, s: &RawSequent, from: usize, depth_bound: usize) -> OracleVerdict {
        if self.memo.len() >= self.max_memo || self.arena.nodes.len() >= 2 * self.max_memo {
            self.memo.clear();
            self.arena = Arena::new();
        }
        let x = self.arena.from_bunch(&s.antecedent);
        let a = self.arena.formula(&s.succedent);
        for d in from.max(1)..=depth_bound {
            if self.search(x, a, d as u32) {
                return OracleVerdict::Provable { height: d };
            }
        }
        OracleVerdict::Inconclusive { depth_exhausted: depth_bound }
    }

    fn search(&mut self, x: u32, a: u32, depth: u32) -> bool {
        if depth == 0 {
            return false;
        }
        let ar = &self.arena;
        let shape = ar.shapes[a as usize];
        if shape == Shape::Top
            || ar.bot[x as usize]
            || ar.nodes[x as usize] == Node::Leaf(a)
            || (x == EM && shape == Shape::One)
        {
            return true;
        }
        if let Some(e) = self.memo.get(&(x, a)) {
            if e.proved.is_some_and(|p| p <= depth) {
                return true;
            }
            if e.failed >= depth {
                return false;
            }
        }
        let ok = self.search_rules(x, a, depth);
        let e = self.memo.entry((x, a)).or_default();
        if ok {
            e.proved = Some(e.proved.map_or(depth, |p| p.min(depth)));
        } else {
            e.failed = e.failed.max(depth);
        }
        ok
    }

    fn all(&mut self, goals: &[Goal], depth: u32) -> bool {
        goals.iter().all(|&(x, a)| self.search(x, a, depth))
    }

    fn search_rules(&mut self, x: u32, a: u32, depth: u32) -> bool {
        let d = depth - 1;
        // invertible rules are applied eagerly, one at a time
        if let Some(goals) = self.invertible(x, a) {
            return self.all(&goals, d);
        }
        for goals in self.non_invertible(x, a) {
            if self.all(&goals, d) {
                return true;
            }
        }
        false
    }

    fn invertible(&mut self, x: u32, a: u32) -> Option<Vec<Goal>> {
        let ar = &mut self.arena;
        if let Shape::Bin(conn, c, d) = ar.shapes[a as usize] {
            match conn {
                Connective::And => return Some(vec![(x, c), (x, d)]),
                Connective::Imp => {
                    let lc = ar.leaf(c);
                    return Some(vec![(ar.join(false, vec![x, lc]), d)]);
                }
                Connective::Wand => {
                    let lc = ar.leaf(c);
                    return Some(vec![(ar.join(true, vec![x, lc]), d)]);
                }
                _ => {}
            }
        }
        let mut paths = Vec::new();
        ar.paths(x, &mut Vec::new(), &mut paths);
        for p in paths {
            let Node::Leaf(f) = ar.nodes[ar.at(x, &p) as usize] else { continue };
            match ar.shapes[f as usize] {
                Shape::One => return Some(vec![(ar.replace(x, &p, EM), a)]),
                Shape::Bin(Connective::Tensor, c, d) => {
                    let (lc, ld) = (ar.leaf(c), ar.leaf(d));
                    let pair = ar.join(true, vec![lc, ld]);
                    return Some(vec![(ar.replace(x, &p, pair), a)]);
                }
                Shape::Bin(Connective::Or, c, d) => {
                    let (lc, ld) = (ar.leaf(c), ar.leaf(d));
                    return Some(vec![(ar.replace(x, &p, lc), a), (ar.replace(x, &p, ld), a)]);
                }
                _ => {}
            }
        }
        None
    }

    fn non_invertible(&mut self, x: u32, a: u32) -> Vec<Vec<Goal>> {
        let cap = self.ctr_leaf_cap;
        let ar = &mut self.arena;
        let mut out: Vec<Vec<Goal>> = Vec::new();
        match ar.shapes[a as usize] {
            Shape::Bin(Connective::Or, c, d) => {
                out.push(vec![(x, c)]);
                out.push(vec![(x, d)]);
            }
            Shape::Bin(Connective::Tensor, c, d) => {
                let parts: Vec<u32> = if ar.is_comma(x) {
                    ar.children(x).to_vec()
                } else if x == EM {
                    vec![]
                } else {
                    vec![x]
                };
                for mask in 0..1u32 << parts.len() {
                    let p = ar.join(true, pick(&parts, mask));
                    let q = ar.join(true, pick(&parts, !mask));
                    out.push(vec![(p, c), (q, d)]);
                }
            }
            _ => {}
        }

        let total = ar.leaves[x as usize];
        let mut paths = Vec::new();
        ar.paths(x, &mut Vec::new(), &mut paths);
        for p in &paths {
            let node = ar.at(x, p);
            if let Node::Leaf(f) = ar.nodes[node as usize] {
                match ar.shapes[f as usize] {
                    Shape::Bin(Connective::And, c, d) => {
                        let (lc, ld) = (ar.leaf(c), ar.leaf(d));
                        out.push(vec![(ar.replace(x, p, lc), a)]);
                        out.push(vec![(ar.replace(x, p, ld), a)]);
                    }
                    Shape::Bin(conn @ (Connective::Imp | Connective::Wand), c, d) => {
                        let semi = conn == Connective::Imp;
                        let ld = ar.leaf(d);
                        let parent = p.split_last().map(|(&i, pp)| (i, pp, ar.at(x, pp))).filter(|&(_, _, n)| {
                            if semi {
                                ar.is_semi(n)
                            } else {
                                ar.is_comma(n)
                            }
                        });
                        match parent {
                            None => {
                                let y = if semi { EA } else { EM };
                                out.push(vec![(y, c), (ar.replace(x, p, ld), a)]);
                            }
                            Some((i, pp, n)) => {
                                let sibs: Vec<u32> = ar
                                    .children(n)
                                    .iter()
                                    .enumerate()
                                    .filter(|&(j, _)| j != i)
                                    .map(|(_, &c)| c)
                                    .collect();
                                for mask in 0..1u32 << sibs.len() {
                                    let y = ar.join(!semi, pick(&sibs, mask));
                                    let mut rest = pick(&sibs, !mask);
                                    rest.push(ld);
                                    let rest = ar.join(!semi, rest);
                                    out.push(vec![(y, c), (ar.replace(x, pp, rest), a)]);
                                }
                            }
                        }
                    }
                    _ => {}
                }
            }
            // weakening: drop a nonempty proper subset of a semicolon node
            if ar.is_semi(node) {
                let cs = ar.children(node).to_vec();
                for mask in 1..(1u32 << cs.len()) - 1 {
                    let kept = ar.join(false, pick(&cs, !mask));
                    out.push(vec![(ar.replace(x, p, kept), a)]);
                }
            }
            // contraction of a whole node, or of a sub-multiset of a comma node
            if node != EM && node != EA {
                if total + ar.leaves[node as usize] <= cap {
                    let pair = ar.join(false, vec![node, node]);
                    out.push(vec![(ar.replace(x, p, pair), a)]);
                }
                if ar.is_comma(node) {
                    let cs = ar.children(node).to_vec();
                    for mask in 1..(1u32 << cs.len()) - 1 {
                        if mask.count_ones() < 2 {
                            continue;
                        }
                        let t = ar.join(true, pick(&cs, mask));
                        if total + ar.leaves[t as usize] > cap {
                            continue;
                        }
                        let mut rest = pick(&cs, !mask);
                        rest.push(ar.join(false, vec![t, t]));
                        let rest = ar.join(true, rest);
                        out.push(vec![(ar.replace(x, p, rest), a)]);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Bounded search in the original calculus: `Provable` iff a derivation of
/// height at most `depth_bound` is found. Contraction may add at most three
/// leaves to the input antecedent.
pub fn brute_force_lbi(s: &RawSequent, depth_bound: usize) -> OracleVerdict {
    let mut oracle = Oracle::new(0);
    let x = oracle.arena.from_bunch(&s.antecedent);
    oracle.ctr_leaf_cap = oracle.arena.leaves[x as usize] + 3;
    oracle.prove(s, depth_bound)
}

// ---------------------------------------------------------------------------
// corpus enumeration

/// All formulas of size at most `max_size` over the given atoms, ordered by
/// size and then canonically.
pub fn enumerate_formulas(atoms: &[Formula], max_size: usize) -> Vec<Formula> {
    let mut by_size: Vec<Vec<Formula>> = vec![Vec::new(); max_size + 1];
    if max_size >= 1 {
        by_size[1] = atoms.to_vec();
        by_size[1].sort();
        by_size[1].dedup();
    }
    let conns = [Connective::And, Connective::Or, Connective::Imp, Connective::Tensor, Connective::Wand];
    for n in 3..=max_size {
        let mut level = Vec::new();
        for conn in conns {
            for ls in 1..n - 1 {
                let rs = n - 1 - ls;
                for l in &by_size[ls] {
                    for r in &by_size[rs] {
                        level.push(Formula::binary(conn, l.clone(), r.clone()));
                    }
                }
            }
        }
        level.sort();
        by_size[n] = level;
    }
    by_size.into_iter().flatten().collect()
}

/// Canonical antecedents with at most `max_leaves` leaves built from `atoms`
/// (formula leaves, plus units when `units` is set).
fn enumerate_antecedents(atoms: &[StarBunch], max_leaves: usize, ceiling: usize) -> Result<Vec<StarBunch>, CorpusError> {
    // by_leaves[n]: all normal bunches with exactly n leaves
    let mut by_leaves: Vec<Vec<StarBunch>> = vec![Vec::new(); max_leaves + 1];
    by_leaves[1] = atoms.to_vec();
    let mut total = atoms.len();
    for n in 2..=max_leaves {
        let mut level = Vec::new();
        for comma in [true, false] {
            // children: smaller bunches not of the node's own kind nor its unit
            let mut pool: Vec<(StarBunch, usize)> = Vec::new();
            for (k, bs) in by_leaves.iter().enumerate().take(n).skip(1) {
                for b in bs {
                    let excluded = if comma {
                        b.is_comma() || *b == StarBunch::EmptyM
                    } else {
                        b.is_semi() || *b == StarBunch::EmptyA
                    };
                    if !excluded {
                        pool.push((b.clone(), k));
                    }
                }
            }
            pool.sort();
            let mut chosen = Vec::new();
            choose(&pool, 0, n, !comma, &mut chosen, &mut |cs: &[StarBunch]| {
                if cs.len() >= 2 {
                    level.push(if comma { StarBunch::Comma(cs.to_vec()) } else { StarBunch::Semi(cs.to_vec()) });
                }
            });
        }
        level.sort();
        total += level.len();
        if total > ceiling {
            return Err(CorpusError::Overflow { ceiling });
        }
        by_leaves[n] = level;
    }
    Ok(by_leaves.into_iter().flatten().collect())
}

/// Sorted selections from `pool[start..]` whose leaf counts sum to
/// `remaining`; `strict` forbids repeating an element.
fn choose(
    pool: &[(StarBunch, usize)],
    start: usize,
    remaining: usize,
    strict: bool,
    chosen: &mut Vec<StarBunch>,
    emit: &mut dyn FnMut(&[StarBunch]),
) {
    if remaining == 0 {
        emit(chosen);
        return;
    }
    for i in start..pool.len() {
        let (b, k) = &pool[i];
        if *k > remaining {
            continue;
        }
        chosen.push(b.clone());
        choose(pool, if strict { i + 1 } else { i }, remaining - k, strict, chosen, emit);
        chosen.pop();
    }
}

pub fn enumerate_sequents(spec: &CorpusSpec) -> Result<Vec<Sequent>, CorpusError> {
    enumerate_sequents_with_ceiling(spec, CORPUS_CEILING)
}

pub fn enumerate_sequents_with_ceiling(spec: &CorpusSpec, ceiling: usize) -> Result<Vec<Sequent>, CorpusError> {
    if spec.variables.is_empty() || spec.max_formula_size == 0 || spec.max_antecedent_leaves == 0 {
        return Err(CorpusError::EmptySpec);
    }
    let mut atoms: Vec<Formula> = spec.variables.iter().map(|v| Formula::var(v)).collect();
    if spec.include_units {
        atoms.extend([Formula::Top, Formula::Bot, Formula::One]);
    }
    let formulas = enumerate_formulas(&atoms, spec.max_formula_size);
    let mut leaves: Vec<StarBunch> = formulas.iter().cloned().map(StarBunch::Leaf).collect();
    if spec.include_units {
        leaves.extend([StarBunch::EmptyA, StarBunch::EmptyM]);
    }
    leaves.sort();
    let mut antecedents = enumerate_antecedents(&leaves, spec.max_antecedent_leaves, ceiling)?;
    if !spec.include_units {
        antecedents.extend([StarBunch::EmptyA, StarBunch::EmptyM]);
    }
    if antecedents.len().saturating_mul(formulas.len()) > ceiling {
        return Err(CorpusError::Overflow { ceiling });
    }
    let mut out = Vec::with_capacity(antecedents.len() * formulas.len());
    for x in &antecedents {
        let x = crate::bunch::reduce(x);
        debug_assert!(x.as_star().is_normal());
        for a in &formulas {
            out.push(Sequent::new(x.clone(), a.clone()));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// cross-validation

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub sequent: String,
    pub problem: String,
    pub decide: String,
    pub oracle: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CrossReport {
    pub total: usize,
    pub decide_provable: usize,
    pub decide_unprovable: usize,
    pub decide_limit: usize,
    pub oracle_provable_at_bound: usize,
    pub confirmed_beyond_bound: usize,
    pub derivations_verified: usize,
    pub disagreements: Vec<Disagreement>,
}

impl CrossReport {
    fn merge(mut self, other: CrossReport) -> CrossReport {
        self.total += other.total;
        self.decide_provable += other.decide_provable;
        self.decide_unprovable += other.decide_unprovable;
        self.decide_limit += other.decide_limit;
        self.oracle_provable_at_bound += other.oracle_provable_at_bound;
        self.confirmed_beyond_bound += other.confirmed_beyond_bound;
        self.derivations_verified += other.derivations_verified;
        self.disagreements.extend(other.disagreements);
        self
    }

    pub fn is_clean(&self) -> bool {
        self.disagreements.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for d in &self.disagreements {
            out.push_str(&format!(
                "DISAGREE {}: {}\n  decide: {}\n  oracle: {}\n",
                d.sequent, d.problem, d.decide, d.oracle
            ));
        }
        out.push_str(&format!(
            "{} sequents: decide {} provable, {} unprovable, {} limit; oracle proved {} within bound, {} more beyond it; {} derivations verified; {} disagreements\n",
            self.total,
            self.decide_provable,
            self.decide_unprovable,
            self.decide_limit,
            self.oracle_provable_at_bound,
            self.confirmed_beyond_bound,
            self.derivations_verified,
            self.disagreements.len()
        ));
        out
    }

    pub fn to_json(&self) -> Value {
        json!(self)
    }
}

/// Compares the decision procedure's `verdict` on `s` with the oracle. The
/// oracle memo may be shared between calls.
pub fn cross_check(s: &Sequent, verdict: &Verdict, depth_bound: usize, oracle: &mut Oracle) -> CrossReport {
    let mut report = CrossReport { total: 1, ..Default::default() };
    let text = s.render(Style::Text);
    let raw = s.to_raw();
    let at_bound = oracle.prove(&raw, depth_bound);
    if at_bound.is_provable() {
        report.oracle_provable_at_bound = 1;
    }
    let mut disagree = |problem: &str, decide: String, oracle: String| {
        report.disagreements.push(Disagreement { sequent: text.clone(), problem: problem.into(), decide, oracle });
    };
    match verdict {
        Verdict::Provable(d) => {
            report.decide_provable = 1;
            let d = d.as_ref().expect("derivations are emitted");
            let transcript = d.render(Style::Json);
            if verify(d) {
                report.derivations_verified = 1;
            } else {
                disagree("derivation fails verification", transcript.clone(), String::new());
            }
            if !at_bound.is_provable() {
                let generous = 2 * depth_bound.max(d.height());
                match oracle.prove_from(&raw, depth_bound + 1, generous) {
                    OracleVerdict::Provable { .. } => report.confirmed_beyond_bound = 1,
                    v => disagree("oracle cannot confirm derivation", transcript, format!("{v:?}")),
                }
            }
        }
        Verdict::Unprovable => {
            report.decide_unprovable = 1;
            if at_bound.is_provable() {
                disagree(
                    "oracle proves a sequent decide rejects",
                    "unprovable".into(),
                    format!("{at_bound:?}"),
                );
            }
        }
        Verdict::ResourceLimit => report.decide_limit = 1,
    }
    report
}

/// Sequents a shared prover may hold before it is replaced.
const PROVER_RESET: usize = 200_000;

/// Runs [`cross_check`] over the whole corpus, sharded across threads.
pub fn cross_validate(spec: &CorpusSpec, depth_bound: usize) -> Result<CrossReport, CorpusError> {
    let sequents = enumerate_sequents(spec)?;
    Ok(cross_validate_sequents(&sequents, depth_bound, spec.max_antecedent_leaves + 3))
}

/// Cross-checks an explicit list of sequents. `ctr_leaf_cap` bounds the
/// oracle's contraction steps.
pub fn cross_validate_sequents(sequents: &[Sequent], depth_bound: usize, ctr_leaf_cap: usize) -> CrossReport {
    sequents
        .par_chunks(2048)
        .map(|chunk| {
            let mut oracle = Oracle::new(ctr_leaf_cap);
            let mut prover = Prover::new(SearchConfig::default());
            chunk
                .iter()
                .map(|s| {
                    if prover.len() > PROVER_RESET {
                        prover = Prover::new(SearchConfig::default());
                    }
                    let (verdict, _) = prover.decide(s);
                    cross_check(s, &verdict, depth_bound, &mut oracle)
                })
                .fold(CrossReport::default(), CrossReport::merge)
        })
        .reduce(CrossReport::default, CrossReport::merge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_sequent;

    fn raw(text: &str) -> RawSequent {
        parse_sequent(text).unwrap()
    }

    fn spec(vars: &[&str], size: usize, leaves: usize) -> CorpusSpec {
        CorpusSpec {
            variables: vars.iter().map(|v| v.to_string()).collect(),
            max_formula_size: size,
            max_antecedent_leaves: leaves,
            include_units: false,
        }
    }

    #[test]
    fn oracle_examples() {
        assert!(brute_force_lbi(&raw("p, p |- p * p"), 6).is_provable());
        assert_eq!(brute_force_lbi(&raw("bot |- q"), 1), OracleVerdict::Provable { height: 1 });
        assert_eq!(
            brute_force_lbi(&raw("p |- p * p"), 8),
            OracleVerdict::Inconclusive { depth_exhausted: 8 }
        );
        assert!(!brute_force_lbi(&raw("p, p, p |- p * p"), 8).is_provable());
        assert_eq!(brute_force_lbi(&raw("Em |- 1"), 1), OracleVerdict::Provable { height: 1 });
    }

    #[test]
    fn oracle_needs_contraction() {
        assert!(brute_force_lbi(&raw("(p -> p -> q); p |- q"), 8).is_provable());
        assert!(brute_force_lbi(&raw("p |- p & p"), 3).is_provable());
        assert!(!brute_force_lbi(&raw("p; (p -* q) |- q"), 8).is_provable());
    }

    #[test]
    fn formula_counts() {
        let p = [Formula::var("p")];
        assert_eq!(enumerate_formulas(&p, 1).len(), 1);
        assert_eq!(enumerate_formulas(&p, 3).len(), 6);
        let pq = [Formula::var("p"), Formula::var("q")];
        assert_eq!(enumerate_formulas(&pq, 3).len(), 22);
    }

    #[test]
    fn enumeration_examples() {
        let one = enumerate_sequents(&spec(&["p"], 1, 1)).unwrap();
        let pp = parse_sequent("p |- p").unwrap().normalize();
        assert!(one.contains(&pp));
        assert!(one.iter().all(|s| s.formulas().iter().all(|f| f.is_atomic())));

        let two = enumerate_sequents(&spec(&["p"], 3, 2)).unwrap();
        assert!(two.contains(&parse_sequent("p, p |- p * p").unwrap().normalize()));

        let pq = enumerate_sequents(&spec(&["p", "q"], 3, 2)).unwrap();
        assert!(pq.contains(&parse_sequent("p; q |- p & q").unwrap().normalize()));
        let mut dedup = pq.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), pq.len());
        assert!(pq.iter().all(|s| s.antecedent.as_star().is_normal()));
    }

    #[test]
    fn enumeration_overflow() {
        let err = enumerate_sequents_with_ceiling(&spec(&["p", "q"], 3, 3), 1000).unwrap_err();
        assert_eq!(err, CorpusError::Overflow { ceiling: 1000 });
        assert_eq!(enumerate_sequents(&spec(&[], 3, 3)).unwrap_err(), CorpusError::EmptySpec);
    }

    #[test]
    fn small_cross_validation_is_clean() {
        let report = cross_validate(&spec(&["p"], 3, 2), 8).unwrap();
        assert!(report.is_clean(), "{}", report.to_text());
        assert!(report.decide_provable > 0 && report.decide_unprovable > 0);
    }
}
