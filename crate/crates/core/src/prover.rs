//! Backward proof search and derivation checking.

use std::collections::{BTreeMap, HashSet};

use indexmap::IndexSet;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::bunch::Sequent;
use crate::calculus::{axioms, expand, expand_focused, Position, RuleApplication, RuleName, VariantDescriptor};
use crate::check::check_instance;
use crate::measure::weight;
use crate::parse::{parse_sequent, ParseError};
use crate::render::{Render, Style};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Derivation {
    pub sequent: Sequent,
    pub rule: RuleName,
    pub position: Option<Position>,
    pub variant: VariantDescriptor,
    pub children: Vec<Derivation>,
}

impl Derivation {
    pub fn height(&self) -> usize {
        1 + self.children.iter().map(Derivation::height).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(Derivation::node_count).sum::<usize>()
    }

    /// The rule application at the root of this derivation.
    pub fn application(&self) -> RuleApplication {
        RuleApplication {
            rule: self.rule,
            position: self.position.clone(),
            variant: self.variant.clone(),
            premises: self.children.iter().map(|c| c.sequent.clone()).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "sequent": self.sequent.render(Style::Text),
            "rule": self.rule.name(),
            "variant": {
                "position": self.position.as_ref().map(|p| p.path.clone()),
                "duplicated": self.variant.duplicated,
                "sibling_roles": self.variant.sibling_roles,
                "y_includes_principal": self.variant.y_includes_principal,
                "selection": self.variant.selection,
            },
            "children": self.children.iter().map(Derivation::to_json).collect::<Vec<_>>(),
        })
    }

    fn write_text(&self, indent: usize, out: &mut String) {
        let _ = writeln!(out, "{:indent$}{}   [{}]", "", self.sequent.render(Style::Text), self.rule);
        for c in &self.children {
            c.write_text(indent + 2, out);
        }
    }

    fn write_latex(&self, out: &mut String) {
        for c in &self.children {
            c.write_latex(out);
        }
        if self.children.is_empty() {
            out.push_str("\\AxiomC{}\n");
        }
        let inf = match self.children.len() {
            0 | 1 => "UnaryInfC",
            2 => "BinaryInfC",
            _ => "TrinaryInfC",
        };
        let _ = writeln!(out, "\\RightLabel{{\\scriptsize {}}}", self.rule);
        let _ = writeln!(out, "\\{inf}{{${}$}}", self.sequent.render(Style::Latex));
    }
}

impl Render for Derivation {
    fn render(&self, style: Style) -> String {
        let mut out = String::new();
        match style {
            Style::Text => self.write_text(0, &mut out),
            Style::Json => out = self.to_json().to_string(),
            Style::Latex => {
                out.push_str("\\begin{prooftree}\n");
                self.write_latex(&mut out);
                out.push_str("\\end{prooftree}\n");
            }
        }
        out
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    /// The derivation is `None` only when derivation output was switched off.
    Provable(Option<Derivation>),
    Unprovable,
    /// `max_visited` sequents were expanded without reaching a verdict.
    ResourceLimit,
}

impl Verdict {
    pub fn is_provable(&self) -> bool {
        matches!(self, Verdict::Provable(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Provable(_) => "provable",
            Verdict::Unprovable => "unprovable",
            Verdict::ResourceLimit => "resource-limit",
        }
    }

    pub fn derivation(&self) -> Option<&Derivation> {
        match self {
            Verdict::Provable(d) => d.as_ref(),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub max_visited: Option<usize>,
    pub collect_stats: bool,
    pub emit_derivation: bool,
    /// Share verdicts between branches. Switching it off leaves only the
    /// ancestor check, which is exponentially slower but equally complete.
    pub memoize: bool,
    /// Try every application of [`expand`] instead of the complete subset
    /// chosen by [`expand_focused`]. Only practical for tiny sequents.
    pub exhaustive: bool,
}

impl SearchConfig {
    /// Applications searched from `s`, and how many were discarded because a
    /// premise outweighs `bound`. Keeping every sequent within the root's
    /// weight confines the search to antecedents within its height bound.
    fn successors(&self, s: &Sequent, bound: usize) -> (Vec<RuleApplication>, usize) {
        let mut apps = if self.exhaustive { expand(s) } else { expand_focused(s) };
        let before = apps.len();
        apps.retain(|app| app.premises.iter().all(|p| weight(p) <= bound));
        let pruned = before - apps.len();
        (apps, pruned)
    }
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_visited: None, collect_stats: true, emit_derivation: true, memoize: true, exhaustive: false }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes_expanded: usize,
    pub memo_hits: usize,
    pub max_stack_depth: usize,
    pub distinct_sequents: usize,
    pub root_weight: usize,
    pub max_weight_seen: usize,
    pub max_height_seen: usize,
    /// Number of visited sequents checked against the height bound.
    pub height_checks: usize,
    /// Applications discarded because a premise outweighs the root.
    pub weight_pruned: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBounds {
    pub weight: usize,
    pub height_bound: usize,
    pub subformula_count: usize,
}

impl SearchBounds {
    /// The candidate-space bound, stated symbolically. `Omega(h)` is the set of
    /// canonical antecedents over the subformulae with size at most the
    /// weight and height at most `h`.
    pub fn symbolic(&self) -> String {
        format!(
            "|Omega({})| * {} (Omega(h): antecedents of size <= {} and height <= h over the subformulae; not computed)",
            self.height_bound + 1,
            self.subformula_count,
            self.weight
        )
    }
}

pub fn search_bounds(s: &Sequent) -> SearchBounds {
    let w = weight(s);
    SearchBounds { weight: w, height_bound: 2 * w + 1, subformula_count: s.subformulas().len() }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Status {
    Open,
    Proved,
    Refuted,
}

struct GraphNode {
    status: Status,
    expanded: bool,
    weight: u32,
    height: u32,
    /// Application that first proved the node (axioms have no premises).
    proof: Option<u32>,
    apps: Vec<u32>,
    /// Applications using this node as a premise, once per occurrence.
    parents: Vec<u32>,
    /// Query in which `index`, `low` and `on_stack` are meaningful.
    stamp: u64,
    index: u32,
    low: u32,
    on_stack: bool,
}

struct GraphApp {
    conclusion: u32,
    rule: RuleName,
    position: Option<Position>,
    variant: VariantDescriptor,
    premises: Vec<u32>,
    /// Premise occurrences not yet proved.
    remaining: u32,
}

struct Frame {
    node: u32,
    app: usize,
    premise: usize,
}

/// A reusable decision procedure.
///
/// Search from a root of weight `w` only visits sequents of weight at most
/// `w`, so verdicts are relative to that budget and each budget gets its own
/// graph. Within a graph, sequents are nodes of an AND-OR graph whose edges are the applications
/// chosen by [`expand_focused`] (or [`expand`]). A sequent is proved once
/// some application has all premises proved; this least fixpoint is exactly
/// the set of sequents with a finite, hence with a repetition-free,
/// derivation. The graph is explored depth first while tracking strongly
/// connected components: once a component is finished, everything in it that
/// is not proved can never be, so it is refuted on the spot and applications
/// depending on it are abandoned. Verdicts are shared between queries with
/// the same budget.
pub struct Prover {
    cfg: SearchConfig,
    graphs: BTreeMap<usize, Graph>,
}

impl Prover {
    pub fn new(cfg: SearchConfig) -> Prover {
        Prover { cfg, graphs: BTreeMap::new() }
    }

    /// Number of sequents the prover has seen.
    pub fn len(&self) -> usize {
        self.graphs.values().map(|g| g.nodes.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Decides `s`, reusing everything learned from earlier queries.
    /// Panics if a visited sequent breaks the weight budget or the height
    /// bound.
    pub fn decide(&mut self, s: &Sequent) -> (Verdict, SearchStats) {
        let bound = weight(s);
        let cfg = &self.cfg;
        self.graphs.entry(bound).or_insert_with(|| Graph::new(cfg.clone(), bound)).decide(s)
    }
}

struct Graph {
    cfg: SearchConfig,
    bound: usize,
    sequents: IndexSet<Sequent>,
    nodes: Vec<GraphNode>,
    apps: Vec<GraphApp>,
    epoch: u64,
}

impl Graph {
    fn new(cfg: SearchConfig, bound: usize) -> Graph {
        Graph { cfg, bound, sequents: IndexSet::new(), nodes: Vec::new(), apps: Vec::new(), epoch: 0 }
    }

    fn intern(&mut self, s: &Sequent, stats: &mut SearchStats) -> u32 {
        if let Some(id) = self.sequents.get_index_of(s) {
            stats.memo_hits += 1;
            return id as u32;
        }
        let (id, _) = self.sequents.insert_full(s.clone());
        self.nodes.push(GraphNode {
            status: Status::Open,
            expanded: false,
            weight: weight(s) as u32,
            height: s.antecedent.height() as u32,
            proof: None,
            apps: Vec::new(),
            parents: Vec::new(),
            stamp: 0,
            index: 0,
            low: 0,
            on_stack: false,
        });
        id as u32
    }

    fn prove_node(&mut self, id: u32, app: u32) {
        let mut queue = vec![(id, app)];
        while let Some((n, a)) = queue.pop() {
            let node = &mut self.nodes[n as usize];
            if node.status != Status::Open {
                continue;
            }
            node.status = Status::Proved;
            node.proof = Some(a);
            for &parent in &std::mem::take(&mut node.parents) {
                let pa = &mut self.apps[parent as usize];
                pa.remaining -= 1;
                if pa.remaining == 0 {
                    queue.push((pa.conclusion, parent));
                }
            }
        }
    }

    fn add_app(&mut self, conclusion: u32, app: RuleApplication, premises: Vec<u32>) {
        if premises.iter().any(|&p| self.nodes[p as usize].status == Status::Refuted) {
            return;
        }
        let id = self.apps.len() as u32;
        let remaining =
            premises.iter().filter(|&&p| self.nodes[p as usize].status != Status::Proved).count() as u32;
        for &p in &premises {
            if self.nodes[p as usize].status == Status::Open {
                self.nodes[p as usize].parents.push(id);
            }
        }
        self.apps.push(GraphApp {
            conclusion,
            rule: app.rule,
            position: app.position,
            variant: app.variant,
            premises,
            remaining,
        });
        self.nodes[conclusion as usize].apps.push(id);
        if remaining == 0 {
            self.prove_node(conclusion, id);
        }
    }

    fn expand_node(&mut self, id: u32, stats: &mut SearchStats) {
        self.nodes[id as usize].expanded = true;
        let s = self.sequents[id as usize].clone();
        if let Some(rule) = axioms(&s) {
            let app = RuleApplication { rule, position: None, variant: VariantDescriptor::default(), premises: vec![] };
            self.add_app(id, app, Vec::new());
            return;
        }
        let (apps, pruned) = self.cfg.successors(&s, self.bound);
        stats.weight_pruned += pruned;
        for app in apps {
            let premises: Vec<u32> = app.premises.iter().map(|p| self.intern(p, stats)).collect();
            self.add_app(id, RuleApplication { premises: Vec::new(), ..app }, premises);
            if self.nodes[id as usize].status == Status::Proved {
                // remaining applications cannot matter for this node
                break;
            }
        }
    }

    fn observe(&self, id: u32, stats: &mut SearchStats) {
        let node = &self.nodes[id as usize];
        let (w, h) = (node.weight as usize, node.height as usize);
        let root = stats.root_weight;
        let s = &self.sequents[id as usize];
        assert!(w <= root, "weight {w} of visited sequent {s} exceeds root weight {root}");
        assert!(h < 2 * (root + 1), "antecedent height {h} of {s} violates bound for weight {root}");
        stats.max_weight_seen = stats.max_weight_seen.max(w);
        stats.max_height_seen = stats.max_height_seen.max(h);
        stats.height_checks += 1;
    }

    fn decide(&mut self, s: &Sequent) -> (Verdict, SearchStats) {
        let mut stats = SearchStats { root_weight: self.bound, ..Default::default() };
        let root = self.intern(s, &mut stats);
        stats.memo_hits = 0;
        self.epoch += 1;
        let epoch = self.epoch;
        let mut counter = 0u32;
        let mut scc: Vec<u32> = Vec::new();
        let mut calls: Vec<Frame> = Vec::new();
        let mut limited = false;
        if self.nodes[root as usize].status == Status::Open {
            self.enter(root, epoch, &mut counter, &mut scc, &mut calls, &mut stats);
        }
        while let Some(frame) = calls.last_mut() {
            if self.nodes[root as usize].status != Status::Open {
                break;
            }
            let n = frame.node as usize;
            let done = self.nodes[n].status == Status::Proved || frame.app == self.nodes[n].apps.len();
            if done {
                calls.pop();
                self.leave(n as u32, &mut scc, calls.last());
                continue;
            }
            let app = &self.apps[self.nodes[n].apps[frame.app] as usize];
            let Some(&p) = app.premises.get(frame.premise) else {
                // every premise proved or pending inside the current component
                frame.app += 1;
                frame.premise = 0;
                continue;
            };
            let pn = &self.nodes[p as usize];
            match pn.status {
                Status::Refuted => {
                    frame.app += 1;
                    frame.premise = 0;
                }
                Status::Proved => frame.premise += 1,
                Status::Open if pn.stamp == epoch => {
                    debug_assert!(pn.on_stack, "finished component left an open node");
                    let index = pn.index;
                    let node = &mut self.nodes[n];
                    node.low = node.low.min(index);
                    frame.premise += 1;
                }
                Status::Open => {
                    if self.cfg.max_visited.is_some_and(|m| stats.nodes_expanded >= m) {
                        limited = true;
                        break;
                    }
                    self.enter(p, epoch, &mut counter, &mut scc, &mut calls, &mut stats);
                }
            }
        }
        stats.distinct_sequents = counter as usize;
        let verdict = match self.nodes[root as usize].status {
            Status::Proved => Verdict::Provable(self.cfg.emit_derivation.then(|| self.derivation(root))),
            Status::Refuted => Verdict::Unprovable,
            Status::Open => {
                debug_assert!(limited);
                Verdict::ResourceLimit
            }
        };
        (verdict, stats)
    }

    fn enter(
        &mut self,
        id: u32,
        epoch: u64,
        counter: &mut u32,
        scc: &mut Vec<u32>,
        calls: &mut Vec<Frame>,
        stats: &mut SearchStats,
    ) {
        self.observe(id, stats);
        stats.nodes_expanded += 1;
        let node = &mut self.nodes[id as usize];
        node.stamp = epoch;
        node.index = *counter;
        node.low = *counter;
        node.on_stack = true;
        *counter += 1;
        scc.push(id);
        calls.push(Frame { node: id, app: 0, premise: 0 });
        stats.max_stack_depth = stats.max_stack_depth.max(calls.len());
        if !self.nodes[id as usize].expanded {
            self.expand_node(id, stats);
        }
    }

    /// Finishes the visit of `id`; closes its component if `id` is the root
    /// of one, refuting whatever in it is still open.
    fn leave(&mut self, id: u32, scc: &mut Vec<u32>, parent: Option<&Frame>) {
        let node = &self.nodes[id as usize];
        if node.low == node.index {
            loop {
                let m = scc.pop().expect("component root is on the stack");
                let mn = &mut self.nodes[m as usize];
                mn.on_stack = false;
                if mn.status == Status::Open {
                    mn.status = Status::Refuted;
                    mn.apps = Vec::new();
                    mn.parents = Vec::new();
                }
                if m == id {
                    break;
                }
            }
        }
        let node = &self.nodes[id as usize];
        if let (Some(f), true) = (parent, node.on_stack) {
            let low = node.low;
            let pn = &mut self.nodes[f.node as usize];
            pn.low = pn.low.min(low);
        }
    }

    fn derivation(&self, id: u32) -> Derivation {
        let app = &self.apps[self.nodes[id as usize].proof.expect("proved node has a proof") as usize];
        Derivation {
            sequent: self.sequents[id as usize].clone(),
            rule: app.rule,
            position: app.position.clone(),
            variant: app.variant.clone(),
            children: app.premises.iter().map(|&p| self.derivation(p)).collect(),
        }
    }
}

/// Depth-first search with only the ancestor check and no caching at all:
/// the plain repetition-free search, exponential in general. Kept as a
/// reference for the memoizing prover.
fn decide_unmemoized(s: &Sequent, cfg: &SearchConfig) -> (Verdict, SearchStats) {
    struct Frame {
        sequent: Sequent,
        apps: Vec<RuleApplication>,
        app_idx: usize,
        prem_idx: usize,
        proved: Vec<Derivation>,
    }
    let root_weight = weight(s);
    let mut stats = SearchStats { root_weight, ..Default::default() };
    let mut on_stack: HashSet<Sequent> = HashSet::new();
    let mut stack: Vec<Frame> = Vec::new();
    // result of the last finished child
    let mut result: Option<Option<Derivation>> = None;
    let mut pending = Some(s.clone());
    loop {
        if let Some(seq) = pending.take() {
            let w = weight(&seq);
            let h = seq.antecedent.height();
            assert!(w <= root_weight && h < 2 * (root_weight + 1), "invariant violated at {seq}");
            stats.max_weight_seen = stats.max_weight_seen.max(w);
            stats.max_height_seen = stats.max_height_seen.max(h);
            stats.height_checks += 1;
            if let Some(rule) = axioms(&seq) {
                result = Some(Some(Derivation {
                    sequent: seq,
                    rule,
                    position: None,
                    variant: VariantDescriptor::default(),
                    children: vec![],
                }));
            } else if on_stack.contains(&seq) {
                result = Some(None);
            } else {
                if cfg.max_visited.is_some_and(|m| stats.nodes_expanded >= m) {
                    return (Verdict::ResourceLimit, stats);
                }
                stats.nodes_expanded += 1;
                let (apps, pruned) = cfg.successors(&seq, root_weight);
                stats.weight_pruned += pruned;
                on_stack.insert(seq.clone());
                stack.push(Frame { sequent: seq, apps, app_idx: 0, prem_idx: 0, proved: vec![] });
                stats.max_stack_depth = stats.max_stack_depth.max(stack.len());
            }
        }
        let Some(frame) = stack.last_mut() else {
            let verdict = match result.expect("root finished") {
                Some(d) => Verdict::Provable(cfg.emit_derivation.then_some(d)),
                None => Verdict::Unprovable,
            };
            stats.distinct_sequents = on_stack.len();
            return (verdict, stats);
        };
        match result.take() {
            Some(Some(d)) => {
                frame.proved.push(d);
                frame.prem_idx += 1;
            }
            Some(None) => {
                frame.proved.clear();
                frame.app_idx += 1;
                frame.prem_idx = 0;
            }
            None => {}
        }
        if frame.app_idx == frame.apps.len() {
            let f = stack.pop().unwrap();
            on_stack.remove(&f.sequent);
            result = Some(None);
            continue;
        }
        let app = &frame.apps[frame.app_idx];
        if frame.prem_idx == app.premises.len() {
            let f = stack.pop().unwrap();
            on_stack.remove(&f.sequent);
            let app = &f.apps[f.app_idx];
            result = Some(Some(Derivation {
                sequent: f.sequent.clone(),
                rule: app.rule,
                position: app.position.clone(),
                variant: app.variant.clone(),
                children: f.proved,
            }));
            continue;
        }
        pending = Some(app.premises[frame.prem_idx].clone());
    }
}

/// Decides `s` with a fresh [`Prover`] (or the unmemoized reference search
/// when `cfg.memoize` is off).
pub fn decide(s: &Sequent, cfg: &SearchConfig) -> (Verdict, SearchStats) {
    if cfg.memoize {
        Prover::new(cfg.clone()).decide(s)
    } else {
        decide_unmemoized(s, cfg)
    }
}

/// Decides a sequent given as text.
pub fn decide_text(text: &str, cfg: &SearchConfig) -> Result<(Verdict, SearchStats), ParseError> {
    let s = parse_sequent(text)?.normalize();
    Ok(decide(&s, cfg))
}

/// True iff every node of `d` is a checked rule instance. Leaves are axioms
/// because only axiom instances have no premises.
pub fn verify(d: &Derivation) -> bool {
    let mut todo = vec![d];
    while let Some(node) = todo.pop() {
        if !check_instance(&node.sequent, &node.application()) {
            return false;
        }
        todo.extend(node.children.iter());
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_sequent;

    fn sq(text: &str) -> Sequent {
        parse_sequent(text).unwrap().normalize()
    }

    fn provable(text: &str) -> bool {
        let (v, _) = decide(&sq(text), &SearchConfig::default());
        if let Some(d) = v.derivation() {
            assert!(verify(d), "derivation of {text} fails verification");
        }
        v.is_provable()
    }

    #[test]
    fn comma_multiplicity_facts() {
        assert!(provable("p, p |- p * p"));
        assert!(!provable("p |- p * p"));
        assert!(!provable("p, p, p |- p * p"));
        assert!(provable("Ea |- top"));
    }

    #[test]
    fn decide_text_examples() {
        let cfg = SearchConfig::default();
        assert!(decide_text("p, p |- p * p", &cfg).unwrap().0.is_provable());
        assert!(decide_text("Ea |- top", &cfg).unwrap().0.is_provable());
        assert_eq!(decide_text("p |- q", &cfg).unwrap().0, Verdict::Unprovable);
        assert!(decide_text("p |-", &cfg).is_err());
    }

    #[test]
    fn contraction_through_semicolons() {
        assert!(provable("p |- p & p"));
        assert!(provable("p; (p -> q) |- q"));
        assert!(provable("(p -> p -> q) ; p |- q"));
        assert!(!provable("p -> q |- q"));
        assert!(provable("p, (p -* q) |- q"));
        assert!(!provable("p; (p -* q) |- q"));
    }

    #[test]
    fn verify_rejects_bad_nodes() {
        let bad = Derivation {
            sequent: sq("p |- q"),
            rule: RuleName::Id,
            position: None,
            variant: VariantDescriptor::default(),
            children: vec![],
        };
        assert!(!verify(&bad));
        let (v, _) = decide(&sq("p & q |- q & p"), &SearchConfig::default());
        let mut d = v.derivation().unwrap().clone();
        assert!(verify(&d));
        d.children.swap(0, 1);
        assert!(!verify(&d));
    }

    #[test]
    fn bounds_examples() {
        let b = search_bounds(&sq("p, p |- p * p"));
        assert_eq!(b, SearchBounds { weight: 6, height_bound: 13, subformula_count: 2 });
        let b = search_bounds(&sq("p |- p"));
        assert_eq!(b, SearchBounds { weight: 2, height_bound: 5, subformula_count: 1 });
        let b = search_bounds(&sq("Em |- 1"));
        assert_eq!(b, SearchBounds { weight: 2, height_bound: 5, subformula_count: 1 });
    }

    #[test]
    fn resource_limit_is_distinct() {
        let cfg = SearchConfig { max_visited: Some(0), ..SearchConfig::default() };
        let (v, _) = decide(&sq("(p -> q); (q -> r); p |- r"), &cfg);
        assert_eq!(v, Verdict::ResourceLimit);
    }

    #[test]
    fn deterministic() {
        let s = sq("p * (q | r) |- (p * q) | (p * r)");
        let a = decide(&s, &SearchConfig::default());
        let b = decide(&s, &SearchConfig::default());
        assert_eq!(a, b);
    }

    #[test]
    fn json_shape() {
        let (v, _) = decide(&sq("p, p |- p * p"), &SearchConfig::default());
        let j = v.derivation().unwrap().to_json();
        assert_eq!(j["sequent"], "p, p |- p * p");
        assert_eq!(j["rule"], "TensorR");
        assert_eq!(j["children"].as_array().unwrap().len(), 2);
    }
}
