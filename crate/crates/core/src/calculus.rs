//! Backward rule enumeration for the reduced-bunch calculus.
//!
//! Associativity, exchange, unit laws and contraction are absorbed by
//! [`NormalBunch`]; what remains of contraction is realized by *preimage
//! variants*: before a left rule fires at a leaf, any subset of the nodes on
//! the path from the root to that leaf may be duplicated as `N' ; N`, where the
//! designated copy `N'` is the one that is rewritten and `N` stays pristine.
//! Weak gets the same treatment for the proper ancestors of the semicolon
//! node it prunes: without it, sequents such as
//! `(p -* ((s * p) -> r); s), p |- r` have no derivation.
//!
//! [`expand`] lists every application; [`expand_focused`] is the much smaller
//! complete subset the prover searches.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bunch::{reduce, NormalBunch, Sequent, StarBunch};
use crate::formula::Formula;
use crate::measure::weight;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum RuleName {
    Id,
    OneR,
    BotL,
    TopR,
    OneL,
    Weak,
    AndL1,
    AndL2,
    AndR,
    OrL,
    OrR1,
    OrR2,
    ImpL,
    ImpR,
    WandL,
    WandR,
    TensorL,
    TensorR,
}

impl RuleName {
    pub const ALL: [RuleName; 18] = [
        RuleName::Id,
        RuleName::OneR,
        RuleName::BotL,
        RuleName::TopR,
        RuleName::OneL,
        RuleName::Weak,
        RuleName::AndL1,
        RuleName::AndL2,
        RuleName::AndR,
        RuleName::OrL,
        RuleName::OrR1,
        RuleName::OrR2,
        RuleName::ImpL,
        RuleName::ImpR,
        RuleName::WandL,
        RuleName::WandR,
        RuleName::TensorL,
        RuleName::TensorR,
    ];

    pub fn is_axiom(self) -> bool {
        matches!(self, RuleName::Id | RuleName::OneR | RuleName::BotL | RuleName::TopR)
    }

    /// Rules acting on the succedent.
    pub fn is_right(self) -> bool {
        matches!(
            self,
            RuleName::AndR
                | RuleName::OrR1
                | RuleName::OrR2
                | RuleName::ImpR
                | RuleName::WandR
                | RuleName::TensorR
        )
    }

    /// Rules acting on an antecedent leaf through a preimage variant.
    pub fn is_left_logical(self) -> bool {
        matches!(
            self,
            RuleName::OneL
                | RuleName::AndL1
                | RuleName::AndL2
                | RuleName::OrL
                | RuleName::ImpL
                | RuleName::WandL
                | RuleName::TensorL
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            RuleName::Id => "Id",
            RuleName::OneR => "OneR",
            RuleName::BotL => "BotL",
            RuleName::TopR => "TopR",
            RuleName::OneL => "OneL",
            RuleName::Weak => "Weak",
            RuleName::AndL1 => "AndL1",
            RuleName::AndL2 => "AndL2",
            RuleName::AndR => "AndR",
            RuleName::OrL => "OrL",
            RuleName::OrR1 => "OrR1",
            RuleName::OrR2 => "OrR2",
            RuleName::ImpL => "ImpL",
            RuleName::ImpR => "ImpR",
            RuleName::WandL => "WandL",
            RuleName::WandR => "WandR",
            RuleName::TensorL => "TensorL",
            RuleName::TensorR => "TensorR",
        }
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Child indices from the antecedent root, in canonical child order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Position {
    pub path: Vec<usize>,
}

impl Position {
    pub fn root() -> Position {
        Position { path: Vec::new() }
    }

    pub fn new(path: Vec<usize>) -> Position {
        Position { path }
    }
}

/// What happens to a sibling of the principal formula in a left
/// implication rule.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// Stays in the context of the right premise.
    Context,
    /// Moves to the left premise.
    Moved,
    /// Contracted: appears in both premises. Semicolon siblings only.
    Both,
}

/// Everything needed to rebuild an application's premises from its
/// conclusion.
///
/// * `duplicated`: depths (0 = antecedent root) of the principal-path nodes
///   duplicated in the preimage variant.
/// * `sibling_roles`: one role per sibling of the principal in the variant,
///   in the variant's child order (ImpL, WandL).
/// * `y_includes_principal`: a contracted copy of the principal joins the
///   left premise (ImpL).
/// * `selection`: child indices of the conclusion sent to the left premise
///   (TensorR) or deleted (Weak).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default, Serialize, Deserialize)]
pub struct VariantDescriptor {
    pub duplicated: Vec<usize>,
    pub sibling_roles: Vec<Role>,
    pub y_includes_principal: bool,
    pub selection: Vec<usize>,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RuleApplication {
    pub rule: RuleName,
    /// Principal leaf for left rules, the affected semicolon node for Weak.
    pub position: Option<Position>,
    pub variant: VariantDescriptor,
    pub premises: Vec<Sequent>,
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum CalculusError {
    #[error("position {0:?} does not name a formula leaf")]
    NotALeaf(Vec<usize>),
}

/// The axiom closing `s`, if any, by priority TopR, BotL, Id, OneR.
pub fn axioms(s: &Sequent) -> Option<RuleName> {
    let x = s.antecedent.as_star();
    if s.succedent == Formula::Top {
        Some(RuleName::TopR)
    } else if x.formulas().iter().any(|f| **f == Formula::Bot) {
        Some(RuleName::BotL)
    } else if x.as_formula() == Some(&s.succedent) {
        Some(RuleName::Id)
    } else if *x == StarBunch::EmptyM && s.succedent == Formula::One {
        Some(RuleName::OneR)
    } else {
        None
    }
}

fn marker() -> StarBunch {
    StarBunch::Leaf(Formula::var("\u{22c4}"))
}

fn find_leaf(node: &StarBunch, target: &StarBunch, path: &mut Vec<usize>) -> bool {
    if node == target {
        return true;
    }
    for (i, c) in node.children().iter().enumerate() {
        path.push(i);
        if find_leaf(c, target, path) {
            return true;
        }
        path.pop();
    }
    false
}

/// Builds the variant for one duplication set (bit `d` of `mask` duplicates
/// the path node at depth `d`) and returns it with the designated leaf's path.
fn variant_for_mask(z: &StarBunch, path: &[usize], mask: u64) -> (StarBunch, Vec<usize>) {
    fn go(node: &StarBunch, path: &[usize], depth: usize, mask: u64) -> StarBunch {
        let inner = match path.get(depth) {
            None => marker(),
            Some(&i) => {
                let mut children = node.children().to_vec();
                children[i] = go(&children[i], path, depth + 1, mask);
                node.with_children(children)
            }
        };
        if mask & (1 << depth) != 0 {
            StarBunch::semi(vec![inner, node.clone()])
        } else {
            inner
        }
    }
    let leaf = z.at(path).unwrap().clone();
    let w = go(z, path, 0, mask);
    let mut pos = Vec::new();
    let found = find_leaf(&w, &marker(), &mut pos);
    debug_assert!(found);
    (w.replace_at(&pos, leaf), pos)
}

fn leaf_formula<'a>(z: &'a NormalBunch, pos: &Position) -> Result<&'a Formula, CalculusError> {
    z.as_star()
        .at(&pos.path)
        .and_then(StarBunch::as_formula)
        .ok_or_else(|| CalculusError::NotALeaf(pos.path.clone()))
}

/// All preimage variants of `z` at the leaf `pos`, indexed by duplication set
/// (bit `d` set iff the path node at depth `d` is duplicated). The empty set
/// comes first and yields `z` itself.
pub fn preimage_variants(
    z: &NormalBunch,
    pos: &Position,
) -> Result<Vec<(StarBunch, Position)>, CalculusError> {
    leaf_formula(z, pos)?;
    let n = pos.path.len() + 1;
    Ok((0..1u64 << n)
        .map(|mask| {
            let (w, p) = variant_for_mask(z.as_star(), &pos.path, mask);
            (w, Position::new(p))
        })
        .collect())
}

fn depths_of(mask: u64) -> Vec<usize> {
    (0..64).filter(|d| mask & (1 << d) != 0).collect()
}

fn seq(x: &StarBunch, a: &Formula) -> Sequent {
    Sequent::new(reduce(x), a.clone())
}

fn subset(items: &[StarBunch], mask: u64) -> Vec<StarBunch> {
    items.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, c)| c.clone()).collect()
}

/// Every application of a non-axiom rule with conclusion `s`, deduplicated by
/// `(rule, premises)`. Right rules come first, then left rules and Weak ordered
/// by premise count and then by number of duplicated nodes.
pub fn expand(s: &Sequent) -> Vec<RuleApplication> {
    let mut right = Vec::new();
    right_rules(s, &mut right);
    let mut left: Vec<(usize, RuleApplication)> = Vec::new();
    left_rules(s, &mut left);
    weak_rules(s, &mut left);
    left.sort_by_key(|(dups, app)| (app.premises.len(), *dups));

    let mut seen = HashSet::new();
    right
        .into_iter()
        .chain(left.into_iter().map(|(_, app)| app))
        .filter(|app| seen.insert((app.rule, app.premises.clone())))
        .collect()
}

fn app(rule: RuleName, position: Option<Position>, variant: VariantDescriptor, premises: Vec<Sequent>) -> RuleApplication {
    RuleApplication { rule, position, variant, premises }
}

/// Top-level comma children of `x` (the empty list for `EmptyM`, `[x]` for
/// any other non-comma bunch).
pub fn multiplicative_parts(x: &StarBunch) -> Vec<StarBunch> {
    match x {
        StarBunch::Comma(cs) => cs.clone(),
        StarBunch::EmptyM => Vec::new(),
        other => vec![other.clone()],
    }
}

fn right_rules(s: &Sequent, out: &mut Vec<RuleApplication>) {
    let x = s.antecedent.as_star();
    let same = |a: &Formula| Sequent::new(s.antecedent.clone(), a.clone());
    let none = VariantDescriptor::default;
    match &s.succedent {
        Formula::And(c, d) => out.push(app(RuleName::AndR, None, none(), vec![same(c), same(d)])),
        Formula::Or(c, d) => {
            out.push(app(RuleName::OrR1, None, none(), vec![same(c)]));
            out.push(app(RuleName::OrR2, None, none(), vec![same(d)]));
        }
        Formula::Imp(c, d) => {
            let x2 = StarBunch::semi(vec![x.clone(), StarBunch::Leaf((**c).clone())]);
            out.push(app(RuleName::ImpR, None, none(), vec![seq(&x2, d)]));
        }
        Formula::Wand(c, d) => {
            let x2 = StarBunch::comma(vec![x.clone(), StarBunch::Leaf((**c).clone())]);
            out.push(app(RuleName::WandR, None, none(), vec![seq(&x2, d)]));
        }
        Formula::Tensor(c, d) => {
            let parts = multiplicative_parts(x);
            let n = parts.len();
            for mask in 0..1u64 << n {
                let p = StarBunch::comma(subset(&parts, mask));
                let q = StarBunch::comma(subset(&parts, !mask));
                let variant = VariantDescriptor { selection: depths_of(mask), ..none() };
                out.push(app(RuleName::TensorR, None, variant, vec![seq(&p, c), seq(&q, d)]));
            }
        }
        _ => {}
    }
}

fn left_rules(s: &Sequent, out: &mut Vec<(usize, RuleApplication)>) {
    let z = &s.antecedent;
    let a = &s.succedent;
    for path in z.as_star().leaf_paths() {
        let f = z.as_star().at(&path).unwrap().as_formula().unwrap().clone();
        let rule_applies = matches!(
            f,
            Formula::One
                | Formula::And(..)
                | Formula::Or(..)
                | Formula::Imp(..)
                | Formula::Wand(..)
                | Formula::Tensor(..)
        );
        if !rule_applies {
            continue;
        }
        let position = Position::new(path.clone());
        for mask in 0..1u64 << (path.len() + 1) {
            let (w, wp) = variant_for_mask(z.as_star(), &path, mask);
            let dups = mask.count_ones() as usize;
            let base = VariantDescriptor { duplicated: depths_of(mask), ..Default::default() };
            let put = |repl: StarBunch| seq(&w.replace_at(&wp, repl), a);
            let mut push = |rule: RuleName, variant: VariantDescriptor, premises: Vec<Sequent>| {
                out.push((dups, app(rule, Some(position.clone()), variant, premises)));
            };
            match &f {
                Formula::One => push(RuleName::OneL, base, vec![put(StarBunch::EmptyM)]),
                Formula::And(c, d) => {
                    push(RuleName::AndL1, base.clone(), vec![put(StarBunch::Leaf((**c).clone()))]);
                    push(RuleName::AndL2, base, vec![put(StarBunch::Leaf((**d).clone()))]);
                }
                Formula::Tensor(c, d) => {
                    let pair = StarBunch::comma(vec![
                        StarBunch::Leaf((**c).clone()),
                        StarBunch::Leaf((**d).clone()),
                    ]);
                    push(RuleName::TensorL, base, vec![put(pair)]);
                }
                Formula::Or(c, d) => push(
                    RuleName::OrL,
                    base,
                    vec![put(StarBunch::Leaf((**c).clone())), put(StarBunch::Leaf((**d).clone()))],
                ),
                Formula::Imp(c, d) => {
                    for (variant, premises) in imp_left(&w, &wp, &f, c, d, a, base) {
                        push(RuleName::ImpL, variant, premises);
                    }
                }
                Formula::Wand(c, d) => {
                    for (variant, premises) in wand_left(&w, &wp, c, d, a, base) {
                        push(RuleName::WandL, variant, premises);
                    }
                }
                _ => unreachable!(),
            }
        }
    }
}

/// Siblings of the node at `pos` when its parent is a node of the given
/// kind, with the parent's path.
fn siblings(w: &StarBunch, pos: &[usize], semi: bool) -> (Vec<StarBunch>, Option<Vec<usize>>) {
    let Some((&last, parent)) = pos.split_last() else {
        return (Vec::new(), None);
    };
    let node = w.at(parent).unwrap();
    if (semi && node.is_semi()) || (!semi && node.is_comma()) {
        let sibs = node
            .children()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != last)
            .map(|(_, c)| c.clone())
            .collect();
        (sibs, Some(parent.to_vec()))
    } else {
        (Vec::new(), None)
    }
}

fn imp_left(
    w: &StarBunch,
    wp: &[usize],
    principal: &Formula,
    c: &Formula,
    d: &Formula,
    a: &Formula,
    base: VariantDescriptor,
) -> Vec<(VariantDescriptor, Vec<Sequent>)> {
    let sibs = siblings(w, wp, true).0;
    // equal siblings collapse under reduce, so only distinct ones get
    // independent roles; copies follow the first occurrence
    let first: Vec<usize> = (0..sibs.len()).map(|i| sibs.iter().position(|t| *t == sibs[i]).unwrap()).collect();
    let free: Vec<usize> = (0..sibs.len()).filter(|&i| first[i] == i).collect();
    let mut out = Vec::new();
    let mut roles = vec![Role::Context; sibs.len()];
    loop {
        for i in 0..sibs.len() {
            roles[i] = roles[first[i]];
        }
        for flag in [false, true] {
            out.push(imp_left_with(w, wp, principal, c, d, a, base.clone(), &roles, flag));
        }
        // next role assignment in base-3 counting order
        let mut k = 0;
        while k < free.len() {
            let i = free[k];
            roles[i] = match roles[i] {
                Role::Context => Role::Moved,
                Role::Moved => Role::Both,
                Role::Both => Role::Context,
            };
            if roles[i] != Role::Context {
                break;
            }
            k += 1;
        }
        if k == free.len() {
            break;
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn imp_left_with(
    w: &StarBunch,
    wp: &[usize],
    principal: &Formula,
    c: &Formula,
    d: &Formula,
    a: &Formula,
    base: VariantDescriptor,
    roles: &[Role],
    flag: bool,
) -> (VariantDescriptor, Vec<Sequent>) {
    let (sibs, parent) = siblings(w, wp, true);
    let mut y = Vec::new();
    let mut rest = Vec::new();
    for (sib, role) in sibs.iter().zip(roles) {
        match role {
            Role::Context => rest.push(sib.clone()),
            Role::Moved => y.push(sib.clone()),
            Role::Both => {
                y.push(sib.clone());
                rest.push(sib.clone());
            }
        }
    }
    if flag {
        y.push(StarBunch::Leaf(principal.clone()));
    }
    rest.push(StarBunch::Leaf(d.clone()));
    let right = match &parent {
        Some(pp) => w.replace_at(pp, StarBunch::semi(rest)),
        None => w.replace_at(wp, StarBunch::Leaf(d.clone())),
    };
    let variant = VariantDescriptor { sibling_roles: roles.to_vec(), y_includes_principal: flag, ..base };
    (variant, vec![seq(&StarBunch::semi(y), c), seq(&right, a)])
}

fn wand_left(
    w: &StarBunch,
    wp: &[usize],
    c: &Formula,
    d: &Formula,
    a: &Formula,
    base: VariantDescriptor,
) -> Vec<(VariantDescriptor, Vec<Sequent>)> {
    let m = siblings(w, wp, false).0.len();
    (0..1u64 << m).map(|mask| wand_left_with(w, wp, c, d, a, base.clone(), mask)).collect()
}

/// WandL moving the siblings selected by `mask` to the left premise.
fn wand_left_with(
    w: &StarBunch,
    wp: &[usize],
    c: &Formula,
    d: &Formula,
    a: &Formula,
    base: VariantDescriptor,
    mask: u64,
) -> (VariantDescriptor, Vec<Sequent>) {
    let (sibs, parent) = siblings(w, wp, false);
    let m = sibs.len();
    let y = subset(&sibs, mask);
    let mut rest = subset(&sibs, !mask);
    rest.push(StarBunch::Leaf(d.clone()));
    let right = match &parent {
        Some(pp) => w.replace_at(pp, StarBunch::comma(rest)),
        None => w.replace_at(wp, StarBunch::Leaf(d.clone())),
    };
    let roles = (0..m).map(|i| if mask & (1 << i) != 0 { Role::Moved } else { Role::Context }).collect();
    let variant = VariantDescriptor { sibling_roles: roles, ..base };
    (variant, vec![seq(&StarBunch::comma(y), c), seq(&right, a)])
}

/// Weak at the semicolon node `path`, deleting the children in `deleted`
/// from the designated copy of the variant for `dup_mask` (which may only
/// duplicate proper ancestors of the node).
fn weak_with(s: &Sequent, path: &[usize], dup_mask: u64, deleted: u64) -> RuleApplication {
    let (w, wp) = variant_for_mask(s.antecedent.as_star(), path, dup_mask);
    let kept = subset(w.at(&wp).unwrap().children(), !deleted);
    let premise = seq(&w.replace_at(&wp, StarBunch::semi(kept)), &s.succedent);
    let variant = VariantDescriptor {
        duplicated: depths_of(dup_mask),
        selection: depths_of(deleted),
        ..Default::default()
    };
    app(RuleName::Weak, Some(Position::new(path.to_vec())), variant, vec![premise])
}

fn weak_rules(s: &Sequent, out: &mut Vec<(usize, RuleApplication)>) {
    let x = s.antecedent.as_star();
    for path in x.semi_paths() {
        let n = x.at(&path).unwrap().children().len();
        for dup_mask in 0..1u64 << path.len() {
            for deleted in 1..(1u64 << n) - 1 {
                out.push((dup_mask.count_ones() as usize, weak_with(s, &path, dup_mask, deleted)));
            }
        }
    }
}

/// True iff Weak steps alone turn `x` into `target` (a leaf or `EmptyM`).
fn weakens_to(x: &StarBunch, target: &StarBunch) -> bool {
    match x {
        _ if x == target => true,
        StarBunch::Semi(cs) => cs.iter().any(|c| weakens_to(c, target)),
        StarBunch::Comma(cs) if *target == StarBunch::EmptyM => cs.iter().all(|c| weakens_to(c, target)),
        StarBunch::Comma(cs) => (0..cs.len()).any(|i| {
            weakens_to(&cs[i], target)
                && cs.iter().enumerate().all(|(j, c)| j == i || weakens_to(c, &StarBunch::EmptyM))
        }),
        _ => false,
    }
}

/// First Weak step (semicolon node, child kept) of a weakening from `x`
/// to `target`; `x` must weaken to `target` without being equal to it.
fn weakening_step(x: &StarBunch, target: &StarBunch, path: &mut Vec<usize>) -> (Vec<usize>, usize) {
    match x {
        StarBunch::Semi(cs) => {
            let keep = cs.iter().position(|c| weakens_to(c, target)).unwrap();
            (path.clone(), keep)
        }
        StarBunch::Comma(cs) => {
            let m = StarBunch::EmptyM;
            let i = if *target == m {
                0
            } else {
                (0..cs.len())
                    .find(|&i| {
                        weakens_to(&cs[i], target)
                            && cs.iter().enumerate().all(|(j, c)| j == i || weakens_to(c, &m))
                    })
                    .unwrap()
            };
            let (j, t) = if cs[i] != *target { (i, target) } else { ((i + 1) % cs.len(), &m) };
            path.push(j);
            weakening_step(&cs[j], t, path)
        }
        _ => unreachable!("leaves and units weaken only to themselves"),
    }
}

fn is_wand_leaf(x: &StarBunch) -> bool {
    matches!(x.as_formula(), Some(Formula::Wand(..)))
}

/// A subset of [`expand`] that the prover searches.
///
/// Provability is monotone under adding semicolon context, which yields:
/// * Weak is only needed right below Id, OneR, TensorR and WandL (to bring
///   a magic wand and its arguments under one comma); the first two uses are
///   folded into a direct weakening chain.
/// * OneL, TensorL, OrL are invertible without contraction; AndL, ImpL and
///   lifting Weak keep a pristine copy, so their premises are at least as
///   strong as the conclusion. Contracting any further path node adds only
///   a weaker copy.
/// * An application whose premise is at least as strong as the conclusion
///   is invertible, so when one makes progress it is the only one returned.
///   Conjunctions are handled first and largest first, and one whose
///   conjuncts are already its siblings is weakened away, so these
///   commitments cannot cycle.
///
/// A pristine copy also adds weight. Where that pushes a premise above the
/// weight of `s`, the variant without the copy is offered as well, since
/// the prover never searches above the root's weight.
///
/// Applications with a premise equal to `s` are dropped.
pub fn expand_focused(s: &Sequent) -> Vec<RuleApplication> {
    let x = s.antecedent.as_star();
    let a = &s.succedent;
    let one = *a == Formula::One;
    for target in [StarBunch::Leaf(a.clone()), StarBunch::EmptyM] {
        if (target == StarBunch::EmptyM && !one) || *x == target || !weakens_to(x, &target) {
            continue;
        }
        let (path, keep) = weakening_step(x, &target, &mut Vec::new());
        let n = x.at(&path).unwrap().children().len();
        return vec![weak_with(s, &path, 0, ((1u64 << n) - 1) & !(1 << keep))];
    }

    let progress = |app: &RuleApplication| app.premises.iter().all(|p| p != s);
    let weight_s = weight(s);
    let within = |app: &RuleApplication| app.premises.iter().all(|p| weight(p) <= weight_s);
    // Committing to a premise whose root is a semicolon would hide TensorR at
    // the root comma: getting it back needs a Weak leading back to `s`.
    let tensor = matches!(a, Formula::Tensor(..));
    let tensor_at_comma = tensor && !x.is_semi();
    let mut deferred = Vec::new();
    let mut commit = |app: RuleApplication| -> Option<RuleApplication> {
        if !progress(&app) {
            None
        } else if tensor_at_comma && app.premises.iter().any(|p| p.antecedent.as_star().is_semi()) {
            deferred.push(app);
            None
        } else {
            Some(app)
        }
    };
    let mut right = Vec::new();
    right_rules(s, &mut right);
    let (inv, mut rest): (Vec<_>, Vec<_>) = right
        .into_iter()
        .partition(|r| matches!(r.rule, RuleName::AndR | RuleName::ImpR | RuleName::WandR));
    if let Some(r) = inv.into_iter().next() {
        return vec![r];
    }

    // conjunctions go first, largest first: each is split and then dropped
    // before anything can consume or re-create its conjuncts, so
    // commitments never cycle
    let mut leaves = x.leaf_paths();
    leaves.sort_by_key(|p| match x.at(p).and_then(StarBunch::as_formula) {
        Some(f @ Formula::And(..)) => (false, std::cmp::Reverse(f.size())),
        _ => (true, std::cmp::Reverse(0)),
    });
    let mut non_invertible = Vec::new();
    for path in &leaves {
        let f = x.at(path).unwrap().as_formula().unwrap().clone();
        let position = Some(Position::new(path.clone()));
        let leaf_dup = 1u64 << path.len();
        let build = |mask: u64| {
            let (w, wp) = variant_for_mask(x, path, mask);
            let base = VariantDescriptor { duplicated: depths_of(mask), ..Default::default() };
            (w, wp, base)
        };
        let single = |rule: RuleName, mask: u64, repl: Vec<StarBunch>| {
            let (w, wp, base) = build(mask);
            let premises = repl.into_iter().map(|r| seq(&w.replace_at(&wp, r), a)).collect();
            app(rule, position.clone(), base, premises)
        };
        let leaf = |g: &Formula| StarBunch::Leaf(g.clone());
        let candidates = match &f {
            Formula::One => vec![single(RuleName::OneL, 0, vec![StarBunch::EmptyM])],
            Formula::Tensor(c, d) => {
                vec![single(RuleName::TensorL, 0, vec![StarBunch::comma(vec![leaf(c), leaf(d)])])]
            }
            Formula::Or(c, d) => vec![single(RuleName::OrL, 0, vec![leaf(c), leaf(d)])],
            Formula::And(c, d) => {
                // once both conjuncts are siblings the conjunction is redundant
                let parent = path.split_last().map(|(&i, pp)| (i, pp, x.at(pp).unwrap()));
                let present = |g: &Formula| {
                    parent.is_some_and(|(_, _, n)| n.is_semi() && n.children().contains(&leaf(g)))
                };
                match parent {
                    Some((i, pp, n)) if present(c) && present(d) => {
                        let all = (1u64 << n.children().len()) - 1;
                        vec![weak_with(s, pp, 0, all & (1 << i))]
                    }
                    _ if present(c) => vec![single(RuleName::AndL2, leaf_dup, vec![leaf(d)])],
                    _ => vec![single(RuleName::AndL1, leaf_dup, vec![leaf(c)])],
                }
            }
            Formula::Imp(c, d) => {
                let (w, wp, base) = build(leaf_dup);
                let m = siblings(&w, &wp, true).0.len();
                let (variant, premises) = imp_left_with(&w, &wp, &f, c, d, a, base, &vec![Role::Both; m], true);
                non_invertible.push(app(RuleName::ImpL, position.clone(), variant, premises));
                vec![]
            }
            Formula::Wand(c, d) => {
                let (w, wp, base) = build(leaf_dup);
                let (variant, premises) = wand_left_with(&w, &wp, c, d, a, base, 0);
                non_invertible.push(app(RuleName::WandL, position.clone(), variant, premises));
                if path.len() >= 1 && x.at(&path[..path.len() - 1]).unwrap().is_comma() {
                    let (w, wp, base) = build(1 << (path.len() - 1));
                    let m = siblings(&w, &wp, false).0.len();
                    for mask in 1..1u64 << m {
                        let (variant, premises) = wand_left_with(&w, &wp, c, d, a, base.clone(), mask);
                        let dup = app(RuleName::WandL, position.clone(), variant, premises);
                        if !within(&dup) {
                            // the pristine copy may exhaust the weight budget
                            let (variant, premises) =
                                wand_left_with(x, path, c, d, a, VariantDescriptor::default(), mask);
                            non_invertible.push(app(RuleName::WandL, position.clone(), variant, premises));
                        }
                        non_invertible.push(dup);
                    }
                }
                vec![]
            }
            _ => vec![],
        };
        if let Some(app) = candidates.into_iter().find_map(&mut commit) {
            return vec![app];
        }
    }
    for path in x.semi_paths().into_iter().filter(|p| !p.is_empty()) {
        let cs = x.at(&path).unwrap().children();
        let all = (1u64 << cs.len()) - 1;
        // a kept comma child merges into the parent comma, exposing its parts
        // to WandL there or to TensorR at the root
        let parent = x.at(&path[..path.len() - 1]).unwrap();
        let active = parent.children().iter().any(is_wand_leaf) || (path.len() == 1 && tensor);
        for (i, c) in cs.iter().enumerate() {
            let liftable =
                is_wand_leaf(c) || (c.is_comma() && (active || c.children().iter().any(is_wand_leaf)));
            if liftable {
                let lift = weak_with(s, &path, 1 << (path.len() - 1), all & !(1 << i));
                if !within(&lift) {
                    // the pristine copy may exhaust the weight budget, so
                    // lifting without it is a real alternative
                    non_invertible.push(weak_with(s, &path, 0, all & !(1 << i)));
                    non_invertible.push(lift);
                } else if let Some(app) = commit(lift) {
                    return vec![app];
                }
            }
        }
    }

    if matches!(a, Formula::Tensor(..)) {
        if let StarBunch::Semi(cs) = x {
            let all = (1u64 << cs.len()) - 1;
            rest.extend((0..cs.len()).map(|i| weak_with(s, &[], 0, all & !(1 << i))));
        }
    }
    rest.extend(deferred);
    rest.extend(non_invertible);
    let mut seen = HashSet::new();
    rest.into_iter().filter(|app| progress(app) && seen.insert((app.rule, app.premises.clone()))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::check_instance;
    use crate::parse::parse_sequent;

    fn sq(text: &str) -> Sequent {
        parse_sequent(text).unwrap().normalize()
    }

    fn has(apps: &[RuleApplication], rule: RuleName, premises: &[&str]) -> bool {
        let want: Vec<Sequent> = premises.iter().map(|p| sq(p)).collect();
        apps.iter().any(|a| a.rule == rule && a.premises == want)
    }

    #[test]
    fn axiom_examples() {
        assert_eq!(axioms(&sq("p -* q |- p -* q")), Some(RuleName::Id));
        assert_eq!(axioms(&sq("Em |- 1")), Some(RuleName::OneR));
        assert_eq!(axioms(&sq("p, bot |- q")), Some(RuleName::BotL));
        assert_eq!(axioms(&sq("bot |- top")), Some(RuleName::TopR));
        assert_eq!(axioms(&sq("p, p |- p")), None);
        assert_eq!(axioms(&sq("Ea |- 1")), None);
    }

    #[test]
    fn preimage_variants_of_leaf() {
        let z = NormalBunch::leaf(Formula::var("p"));
        let vs = preimage_variants(&z, &Position::root()).unwrap();
        let p = StarBunch::Leaf(Formula::var("p"));
        assert_eq!(vs[0], (p.clone(), Position::root()));
        assert_eq!(vs[1], (StarBunch::Semi(vec![p.clone(), p]), Position::new(vec![0])));
    }

    #[test]
    fn preimage_variants_of_comma() {
        let z = sq("p, q |- p").antecedent;
        let p = StarBunch::Leaf(Formula::var("p"));
        let q = StarBunch::Leaf(Formula::var("q"));
        let vs = preimage_variants(&z, &Position::new(vec![0])).unwrap();
        assert_eq!(vs.len(), 4);
        let pq = StarBunch::Comma(vec![p.clone(), q.clone()]);
        assert!(vs.contains(&(
            StarBunch::Comma(vec![StarBunch::Semi(vec![p.clone(), p.clone()]), q.clone()]),
            Position::new(vec![0, 0])
        )));
        assert!(vs.contains(&(StarBunch::Semi(vec![pq.clone(), pq]), Position::new(vec![0, 0]))));
        for (w, _) in &vs {
            assert_eq!(reduce(w), z);
        }
        assert!(preimage_variants(&z, &Position::root()).is_err());
    }

    #[test]
    fn wand_left_example() {
        let apps = expand(&sq("p, p -* q |- q"));
        assert!(has(&apps, RuleName::WandL, &["p |- p", "q |- q"]));
    }

    #[test]
    fn wand_right_from_empty() {
        let apps = expand(&sq("Em |- p -* p"));
        assert!(has(&apps, RuleName::WandR, &["p |- p"]));
    }

    #[test]
    fn imp_left_examples() {
        let apps = expand(&sq("p -> q |- q"));
        let flagged = apps.iter().find(|a| {
            a.rule == RuleName::ImpL && a.premises == vec![sq("p -> q |- p"), sq("q |- q")]
        });
        assert!(flagged.is_some());
        assert!(has(&apps, RuleName::ImpL, &["Ea |- p", "q |- q"]));
    }

    #[test]
    fn tensor_right_partitions() {
        let apps = expand(&sq("p, q |- p * q"));
        let tr: Vec<_> = apps.iter().filter(|a| a.rule == RuleName::TensorR).collect();
        assert_eq!(tr.len(), 4);
        assert!(has(&apps, RuleName::TensorR, &["p |- p", "q |- q"]));
        assert!(has(&apps, RuleName::TensorR, &["Em |- p", "p, q |- q"]));
        assert!(!has(&expand(&sq("p |- p * p")), RuleName::TensorR, &["p |- p", "p |- p"]));
    }

    #[test]
    fn weak_deletes_semicolon_children() {
        let apps = expand(&sq("p; q; r |- p"));
        let weak: Vec<_> = apps.iter().filter(|a| a.rule == RuleName::Weak).collect();
        assert_eq!(weak.len(), 6);
        assert!(has(&apps, RuleName::Weak, &["p |- p"]));
        assert!(has(&apps, RuleName::Weak, &["p; r |- p"]));
    }

    #[test]
    fn weak_duplicates_ancestors() {
        let s = sq("(p -* q; r), p |- q");
        let apps = expand(&s);
        let lifted = apps.iter().find(|a| {
            a.rule == RuleName::Weak
                && a.variant.duplicated == vec![0]
                && a.premises == vec![sq("(p -* q, p); ((p -* q; r), p) |- q")]
        });
        assert!(lifted.is_some());
        assert!(has(&apps, RuleName::Weak, &["p -* q, p |- q"]));
    }

    #[test]
    fn focused_is_a_checked_subset() {
        for text in [
            "(p -* ((s * p) -> r); s), p |- r",
            "p & (q | r) |- (p & q) | (p & r)",
            "r; (1 & 1) & r; (q * q) * bot |- q",
            "r -* bot, (q -* r; r * p) |- p * bot",
            "p -> q, (r; p) |- q * r",
            "p, p -* q, q -* r |- r",
        ] {
            let s = sq(text);
            let apps = expand_focused(&s);
            assert!(!apps.is_empty(), "{text}");
            for a in &apps {
                assert!(check_instance(&s, a), "{text}: {:?}", a);
                assert!(a.premises.iter().all(|p| *p != s));
            }
        }
    }

    #[test]
    fn focused_commits_to_invertible_steps() {
        let apps = expand_focused(&sq("p; q; p & q |- r"));
        assert_eq!(apps.len(), 1);
        assert_eq!(apps[0].rule, RuleName::Weak);
        assert_eq!(apps[0].premises, vec![sq("p; q |- r")]);

        let apps = expand_focused(&sq("p; q |- p"));
        assert_eq!(apps.len(), 1);
        assert_eq!(apps[0].premises, vec![sq("p |- p")]);

        let apps = expand_focused(&sq("p * q |- r"));
        assert_eq!(apps.len(), 1);
        assert_eq!(apps[0].rule, RuleName::TensorL);
    }

    #[test]
    fn ordering_right_then_left() {
        let apps = expand(&sq("p & q |- q & p"));
        assert_eq!(apps[0].rule, RuleName::AndR);
        let counts: Vec<usize> = apps[1..].iter().map(|a| a.premises.len()).collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]));
    }
}
