//! BI formulae: the additive connectives of intuitionistic logic together with
//! the multiplicatives of intuitionistic linear logic.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// A propositional BI formula.
///
/// The derived ordering is the fixed total order used for canonical bunches:
/// connective rank first (in declaration order), then the operands
/// recursively, with variables compared by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Formula {
    Var(Arc<str>),
    Top,
    Bot,
    One,
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Imp(Arc<Formula>, Arc<Formula>),
    Tensor(Arc<Formula>, Arc<Formula>),
    Wand(Arc<Formula>, Arc<Formula>),
}

/// The five binary connectives.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Connective {
    And,
    Or,
    Imp,
    Tensor,
    Wand,
}

impl Formula {
    pub fn var(name: &str) -> Formula {
        Formula::Var(Arc::from(name))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Arc::new(l), Arc::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Arc::new(l), Arc::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Formula {
        Formula::Imp(Arc::new(l), Arc::new(r))
    }

    pub fn tensor(l: Formula, r: Formula) -> Formula {
        Formula::Tensor(Arc::new(l), Arc::new(r))
    }

    pub fn wand(l: Formula, r: Formula) -> Formula {
        Formula::Wand(Arc::new(l), Arc::new(r))
    }

    pub fn binary(conn: Connective, l: Formula, r: Formula) -> Formula {
        match conn {
            Connective::And => Formula::and(l, r),
            Connective::Or => Formula::or(l, r),
            Connective::Imp => Formula::imp(l, r),
            Connective::Tensor => Formula::tensor(l, r),
            Connective::Wand => Formula::wand(l, r),
        }
    }

    /// Splits a binary formula into its connective and operands.
    pub fn as_binary(&self) -> Option<(Connective, &Formula, &Formula)> {
        match self {
            Formula::And(l, r) => Some((Connective::And, l, r)),
            Formula::Or(l, r) => Some((Connective::Or, l, r)),
            Formula::Imp(l, r) => Some((Connective::Imp, l, r)),
            Formula::Tensor(l, r) => Some((Connective::Tensor, l, r)),
            Formula::Wand(l, r) => Some((Connective::Wand, l, r)),
            _ => None,
        }
    }

    pub fn is_atomic(&self) -> bool {
        self.as_binary().is_none()
    }

    /// Node count of the formula tree: 1 for atoms and constants,
    /// `|C| + |D| + 1` for every binary connective.
    pub fn size(&self) -> usize {
        match self.as_binary() {
            Some((_, l, r)) => l.size() + r.size() + 1,
            None => 1,
        }
    }

    /// Adds this formula and all of its subformulae to `out`.
    pub fn collect_subformulas(&self, out: &mut BTreeSet<Formula>) {
        if !out.insert(self.clone()) {
            return;
        }
        if let Some((_, l, r)) = self.as_binary() {
            l.collect_subformulas(out);
            r.collect_subformulas(out);
        }
    }
}

/// Subformula closure of a collection of formula occurrences.
pub fn subformula_closure<'a, I>(formulas: I) -> BTreeSet<Formula>
where
    I: IntoIterator<Item = &'a Formula>,
{
    let mut out = BTreeSet::new();
    for f in formulas {
        f.collect_subformulas(&mut out);
    }
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::render::formula_text(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::var("p")
    }
    fn q() -> Formula {
        Formula::var("q")
    }

    #[test]
    fn sizes() {
        assert_eq!(p().size(), 1);
        assert_eq!(Formula::and(p(), q()).size(), 3);
        assert_eq!(Formula::imp(Formula::and(p(), q()), Formula::var("r")).size(), 5);
        assert_eq!(Formula::One.size(), 1);
    }

    #[test]
    fn closure_dedups_shared_subterms() {
        let f = Formula::tensor(p(), p());
        let sf = subformula_closure([&p(), &p(), &f]);
        assert_eq!(sf.len(), 2);
        assert!(sf.contains(&f) && sf.contains(&p()));
    }

    #[test]
    fn connective_rank_orders_before_names() {
        assert!(Formula::var("z") < Formula::Top);
        assert!(Formula::var("p") < Formula::var("q"));
        assert!(Formula::and(q(), q()) < Formula::or(p(), p()));
    }
}
