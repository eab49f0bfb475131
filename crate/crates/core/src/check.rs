//! Rule-instance checking that rebuilds premises from a variant descriptor
//! without going through [`crate::calculus::expand`].

use crate::bunch::{reduce, Sequent, StarBunch};
use crate::calculus::{axioms, RuleApplication, RuleName, Role};
use crate::formula::Formula;

/// True iff `app` is a rule instance with conclusion `conclusion`.
pub fn check_instance(conclusion: &Sequent, app: &RuleApplication) -> bool {
    expected_premises(conclusion, app).is_some_and(|ps| ps == app.premises)
}

fn is_increasing(xs: &[usize], bound: usize) -> bool {
    xs.windows(2).all(|w| w[0] < w[1]) && xs.iter().all(|&i| i < bound)
}

fn mk(x: StarBunch, a: &Formula) -> Sequent {
    Sequent { antecedent: reduce(&x), succedent: a.clone() }
}

fn expected_premises(conclusion: &Sequent, app: &RuleApplication) -> Option<Vec<Sequent>> {
    let v = &app.variant;
    let a = &conclusion.succedent;
    let x = conclusion.antecedent.as_star();
    let plain = v.duplicated.is_empty() && v.sibling_roles.is_empty() && !v.y_includes_principal;

    if app.rule.is_axiom() {
        let ok = app.position.is_none()
            && plain
            && v.selection.is_empty()
            && axioms(conclusion) == Some(app.rule);
        return ok.then(Vec::new);
    }

    if app.rule.is_right() {
        if app.position.is_some() || !plain {
            return None;
        }
        if app.rule != RuleName::TensorR && !v.selection.is_empty() {
            return None;
        }
        let same = |f: &Formula| Sequent { antecedent: conclusion.antecedent.clone(), succedent: f.clone() };
        return match (app.rule, a) {
            (RuleName::AndR, Formula::And(c, d)) => Some(vec![same(c), same(d)]),
            (RuleName::OrR1, Formula::Or(c, _)) => Some(vec![same(c)]),
            (RuleName::OrR2, Formula::Or(_, d)) => Some(vec![same(d)]),
            (RuleName::ImpR, Formula::Imp(c, d)) => {
                Some(vec![mk(StarBunch::Semi(vec![x.clone(), StarBunch::Leaf((**c).clone())]), d)])
            }
            (RuleName::WandR, Formula::Wand(c, d)) => {
                Some(vec![mk(StarBunch::Comma(vec![x.clone(), StarBunch::Leaf((**c).clone())]), d)])
            }
            (RuleName::TensorR, Formula::Tensor(c, d)) => {
                let parts: Vec<StarBunch> = match x {
                    StarBunch::EmptyM => vec![],
                    StarBunch::Comma(cs) => cs.clone(),
                    other => vec![other.clone()],
                };
                if !is_increasing(&v.selection, parts.len()) {
                    return None;
                }
                let (mut left, mut right) = (vec![StarBunch::EmptyM], vec![StarBunch::EmptyM]);
                for (i, part) in parts.into_iter().enumerate() {
                    if v.selection.contains(&i) {
                        left.push(part);
                    } else {
                        right.push(part);
                    }
                }
                Some(vec![mk(StarBunch::Comma(left), c), mk(StarBunch::Comma(right), d)])
            }
            _ => None,
        };
    }

    let path = &app.position.as_ref()?.path;

    if app.rule == RuleName::Weak {
        // duplication is allowed on proper ancestors of the semicolon node
        if !v.sibling_roles.is_empty() || v.y_includes_principal || !is_increasing(&v.duplicated, path.len()) {
            return None;
        }
        let node = x.at(path)?;
        let StarBunch::Semi(cs) = node else { return None };
        let sel = &v.selection;
        if sel.is_empty() || sel.len() >= cs.len() || !is_increasing(sel, cs.len()) {
            return None;
        }
        let (w, wp) = build_variant(x, path, &v.duplicated, node.clone());
        if reduce(&w) != conclusion.antecedent {
            return None;
        }
        let kept: Vec<StarBunch> =
            cs.iter().enumerate().filter(|(i, _)| !sel.contains(i)).map(|(_, c)| c.clone()).collect();
        let premise = splice(&w, &wp, StarBunch::Semi(kept));
        return Some(vec![mk(premise, a)]);
    }

    // left logical rules
    if !v.selection.is_empty() || !is_increasing(&v.duplicated, path.len() + 1) {
        return None;
    }
    let principal = x.at(path)?.as_formula()?.clone();
    let (w, wp) = build_variant(x, path, &v.duplicated, StarBunch::Leaf(principal.clone()));
    if reduce(&w) != conclusion.antecedent {
        return None;
    }
    let at = |repl: StarBunch| mk(splice(&w, &wp, repl), a);
    let leaf = |f: &Formula| StarBunch::Leaf(f.clone());
    let only_dup = v.sibling_roles.is_empty() && !v.y_includes_principal;

    match (app.rule, &principal) {
        (RuleName::OneL, Formula::One) if only_dup => Some(vec![at(StarBunch::EmptyM)]),
        (RuleName::AndL1, Formula::And(c, _)) if only_dup => Some(vec![at(leaf(c))]),
        (RuleName::AndL2, Formula::And(_, d)) if only_dup => Some(vec![at(leaf(d))]),
        (RuleName::TensorL, Formula::Tensor(c, d)) if only_dup => {
            Some(vec![at(StarBunch::Comma(vec![leaf(c), leaf(d)]))])
        }
        (RuleName::OrL, Formula::Or(c, d)) if only_dup => Some(vec![at(leaf(c)), at(leaf(d))]),
        (RuleName::ImpL, Formula::Imp(c, d)) => {
            let (parent, sibs) = parent_and_siblings(&w, &wp, true);
            if sibs.len() != v.sibling_roles.len() {
                return None;
            }
            let mut y = vec![StarBunch::EmptyA];
            let mut ctx = vec![leaf(d)];
            for (s, r) in sibs.iter().zip(&v.sibling_roles) {
                if matches!(r, Role::Moved | Role::Both) {
                    y.push(s.clone());
                }
                if matches!(r, Role::Context | Role::Both) {
                    ctx.push(s.clone());
                }
            }
            if v.y_includes_principal {
                y.push(leaf(&principal));
            }
            let right = match parent {
                Some(pp) => splice(&w, &pp, StarBunch::Semi(ctx)),
                None => splice(&w, &wp, leaf(d)),
            };
            Some(vec![mk(StarBunch::Semi(y), c), mk(right, a)])
        }
        (RuleName::WandL, Formula::Wand(c, d)) => {
            if v.y_includes_principal || v.sibling_roles.contains(&Role::Both) {
                return None;
            }
            let (parent, sibs) = parent_and_siblings(&w, &wp, false);
            if sibs.len() != v.sibling_roles.len() {
                return None;
            }
            let mut y = vec![StarBunch::EmptyM];
            let mut ctx = vec![leaf(d)];
            for (s, r) in sibs.iter().zip(&v.sibling_roles) {
                if *r == Role::Moved {
                    y.push(s.clone());
                } else {
                    ctx.push(s.clone());
                }
            }
            let right = match parent {
                Some(pp) => splice(&w, &pp, StarBunch::Comma(ctx)),
                None => splice(&w, &wp, leaf(d)),
            };
            Some(vec![mk(StarBunch::Comma(y), c), mk(right, a)])
        }
        _ => None,
    }
}

/// Replaces the node at `path` without any flattening; `reduce` is left to
/// tidy up.
fn splice(x: &StarBunch, path: &[usize], repl: StarBunch) -> StarBunch {
    let Some((&i, rest)) = path.split_first() else { return repl };
    match x {
        StarBunch::Comma(cs) | StarBunch::Semi(cs) => {
            let mut cs = cs.clone();
            cs[i] = splice(&cs[i], rest, repl);
            if x.is_comma() {
                StarBunch::Comma(cs)
            } else {
                StarBunch::Semi(cs)
            }
        }
        _ => unreachable!("path runs through a leaf"),
    }
}

/// Rebuilds the preimage variant bottom-up. Nested semicolons (and nested
/// commas) are spliced so the principal's siblings are visible; the
/// designated copy precedes the pristine one.
fn build_variant(
    x: &StarBunch,
    path: &[usize],
    duplicated: &[usize],
    designated: StarBunch,
) -> (StarBunch, Vec<usize>) {
    // (current subtree, designated node's path inside it)
    let mut cur = designated;
    let mut cur_path: Vec<usize> = Vec::new();
    for depth in (0..=path.len()).rev() {
        let original = x.at(&path[..depth]).unwrap();
        if depth < path.len() {
            let idx = path[depth];
            let kids = original.children();
            let mut out = Vec::new();
            let mut new_path = Vec::new();
            for (i, k) in kids.iter().enumerate() {
                if i != idx {
                    out.push(k.clone());
                    continue;
                }
                let same_kind = (original.is_comma() && cur.is_comma()) || (original.is_semi() && cur.is_semi());
                if same_kind {
                    let (first, rest) = cur_path.split_first().unwrap();
                    new_path = vec![out.len() + first];
                    new_path.extend_from_slice(rest);
                    out.extend(cur.children().iter().cloned());
                } else {
                    new_path = vec![out.len()];
                    new_path.extend_from_slice(&cur_path);
                    out.push(cur.clone());
                }
            }
            cur = if original.is_comma() { StarBunch::Comma(out) } else { StarBunch::Semi(out) };
            cur_path = new_path;
        }
        if duplicated.contains(&depth) {
            let mut kids = Vec::new();
            let mut new_path = Vec::new();
            if cur.is_semi() {
                let (first, rest) = cur_path.split_first().unwrap();
                new_path = vec![*first];
                new_path.extend_from_slice(rest);
                kids.extend(cur.children().iter().cloned());
            } else {
                new_path.push(0);
                new_path.extend_from_slice(&cur_path);
                kids.push(cur.clone());
            }
            match original {
                StarBunch::Semi(cs) => kids.extend(cs.iter().cloned()),
                other => kids.push(other.clone()),
            }
            cur = StarBunch::Semi(kids);
            cur_path = new_path;
        }
    }
    (cur, cur_path)
}

fn parent_and_siblings(w: &StarBunch, wp: &[usize], semi: bool) -> (Option<Vec<usize>>, Vec<StarBunch>) {
    let Some((&last, pp)) = wp.split_last() else { return (None, Vec::new()) };
    let node = w.at(pp).unwrap();
    let kind_ok = if semi { node.is_semi() } else { node.is_comma() };
    if !kind_ok {
        return (None, Vec::new());
    }
    let sibs = node.children().iter().enumerate().filter(|&(i, _)| i != last).map(|(_, c)| c.clone()).collect();
    (Some(pp.to_vec()), sibs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{expand, Position, VariantDescriptor};
    use crate::parse::parse_sequent;

    fn sq(text: &str) -> Sequent {
        parse_sequent(text).unwrap().normalize()
    }

    fn plain(rule: RuleName, premises: &[&str]) -> RuleApplication {
        RuleApplication {
            rule,
            position: None,
            variant: VariantDescriptor::default(),
            premises: premises.iter().map(|p| sq(p)).collect(),
        }
    }

    #[test]
    fn axiom_instances() {
        assert!(check_instance(&sq("p |- p"), &plain(RuleName::Id, &[])));
        assert!(!check_instance(&sq("p |- q"), &plain(RuleName::Id, &[])));
    }

    #[test]
    fn right_instances() {
        assert!(check_instance(&sq("Em |- p -* p"), &plain(RuleName::WandR, &["p |- p"])));
        let mut tr = plain(RuleName::TensorR, &["p |- p", "p |- p"]);
        assert!(!check_instance(&sq("p |- p * p"), &tr));
        tr.variant.selection = vec![0];
        assert!(!check_instance(&sq("p |- p * p"), &tr));
        assert!(check_instance(&sq("p, p |- p * p"), &tr));
    }

    #[test]
    fn expand_output_checks() {
        for text in [
            "p, p -* q |- q",
            "p -> q |- q",
            "(p -> q); (q -> r); p |- r",
            "(p; (q -> r)), (r -* s) |- s",
            "((p; q), (q -> p)); r |- p * q",
            "p * (q | r) |- (p * q) | (p * r)",
            "(1; p), (p & q) |- q",
        ] {
            let s = sq(text);
            for app in expand(&s) {
                assert!(check_instance(&s, &app), "{text}: {:?}", app);
            }
        }
    }

    #[test]
    fn tampered_instances_fail() {
        let s = sq("(p -> q); (q -> r); p |- r");
        for app in expand(&s).into_iter().filter(|a| a.premises.len() == 2) {
            let mut swapped = app.clone();
            swapped.premises.swap(0, 1);
            if swapped.premises != app.premises {
                assert!(!check_instance(&s, &swapped));
            }
        }
        let mut bad = expand(&s).into_iter().find(|a| a.rule == RuleName::ImpL).unwrap();
        bad.position = Some(Position::new(vec![9]));
        assert!(!check_instance(&s, &bad));
    }
}
