//! Critical pairs and sequent weight.

use std::collections::HashSet;

use crate::bunch::{reduce, NormalBunch, Sequent, StarBunch};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum PairKind {
    Root,
    Diagonal,
    Antecedent,
}

/// A pair `<left : right>` of canonical structures.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CriticalPair {
    pub left: NormalBunch,
    pub right: NormalBunch,
    pub kind: PairKind,
}

impl CriticalPair {
    pub fn size(&self) -> usize {
        self.left.size() + self.right.size()
    }
}

/// Root pair, one diagonal pair per formula occurrence, and one antecedent
/// pair per formula child of each semicolon node (paired with the join of
/// its remaining siblings). Pairs equal as `(left, right)` appear once, with
/// the first kind in that order.
pub fn critical_pairs(s: &Sequent) -> Vec<CriticalPair> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut push = |left: NormalBunch, right: NormalBunch, kind: PairKind| {
        if seen.insert((left.clone(), right.clone())) {
            out.push(CriticalPair { left, right, kind });
        }
    };

    push(s.antecedent.clone(), NormalBunch::leaf(s.succedent.clone()), PairKind::Root);
    for f in s.formulas() {
        push(NormalBunch::leaf(f.clone()), NormalBunch::leaf(f.clone()), PairKind::Diagonal);
    }
    let x = s.antecedent.as_star();
    for path in x.semi_paths() {
        let children = x.at(&path).unwrap().children();
        for (i, child) in children.iter().enumerate() {
            if let StarBunch::Leaf(b) = child {
                let rest: Vec<StarBunch> = children
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, c)| c.clone())
                    .collect();
                push(reduce(&StarBunch::semi(rest)), NormalBunch::leaf(b.clone()), PairKind::Antecedent);
            }
        }
    }
    out
}

/// Maximum critical-pair size, computed without materializing the pairs.
pub fn weight(s: &Sequent) -> usize {
    let x = s.antecedent.as_star();
    let mut w = x.size() + s.succedent.size();
    w = w.max(2 * s.succedent.size());
    fn walk(node: &StarBunch, w: &mut usize) {
        match node {
            StarBunch::Leaf(f) => *w = (*w).max(2 * f.size()),
            StarBunch::Semi(cs) => {
                // largest and second-largest child sizes give max over "others"
                let sizes: Vec<usize> = cs.iter().map(StarBunch::size).collect();
                let (mut first, mut second) = (0, 0);
                for &z in &sizes {
                    if z >= first {
                        second = first;
                        first = z;
                    } else if z > second {
                        second = z;
                    }
                }
                for (c, &z) in cs.iter().zip(&sizes) {
                    if let StarBunch::Leaf(f) = c {
                        let others = if z == first { second } else { first };
                        *w = (*w).max(others + f.size());
                    }
                    walk(c, w);
                }
            }
            StarBunch::Comma(cs) => cs.iter().for_each(|c| walk(c, w)),
            _ => {}
        }
    }
    walk(x, &mut w);
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_sequent;

    fn seq(text: &str) -> Sequent {
        parse_sequent(text).unwrap().normalize()
    }

    fn pair_strings(s: &Sequent) -> Vec<String> {
        let mut v: Vec<String> =
            critical_pairs(s).iter().map(|p| format!("<{} : {}>", p.left, p.right)).collect();
        v.sort();
        v
    }

    #[test]
    fn identity_pairs_coincide() {
        let s = seq("p |- p");
        let pairs = critical_pairs(&s);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].kind, PairKind::Root);
        assert_eq!(weight(&s), 2);
    }

    #[test]
    fn semicolon_pairs() {
        let s = seq("p; q |- r");
        assert_eq!(
            pair_strings(&s),
            vec!["<p : p>", "<p : q>", "<p; q : r>", "<q : p>", "<q : q>", "<r : r>"]
        );
        assert_eq!(weight(&s), 2);
    }

    #[test]
    fn comma_pairs() {
        let s = seq("p, p |- p * p");
        assert_eq!(pair_strings(&s), vec!["<p * p : p * p>", "<p : p>", "<p, p : p * p>"]);
        assert_eq!(weight(&s), 6);
    }

    #[test]
    fn fast_weight_matches_pairs() {
        for text in [
            "p & q, (p; (Ea, q, 1 & r); p -* q) |- r",
            "Em |- 1",
            "(p -> q); ((r * s) -> t), u; v |- v",
            "(p; q; (r, s)), ((p; q), t) |- t",
        ] {
            let s = seq(text);
            let by_pairs = critical_pairs(&s).iter().map(CriticalPair::size).max().unwrap();
            assert_eq!(weight(&s), by_pairs, "{text}");
        }
    }
}
