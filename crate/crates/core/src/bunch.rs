//! Bunches (sequent antecedents) in three representations.
//!
//! * [`Bunch`]: the ordered binary tree produced by the parser.
//! * [`StarBunch`]: n-ary trees whose comma and semicolon nodes alternate.
//! * [`NormalBunch`]: reduced star bunches with no absorbed units, no
//!   repeated semicolon children, and children in canonical order. These are
//!   the antecedents the prover works with; structural equality on them is
//!   equality modulo associativity, exchange, units and additive contraction.

use std::cmp::Ordering;
use std::fmt;

use crate::formula::Formula;

/// Ordered binary bunch.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Bunch {
    Leaf(Formula),
    EmptyM,
    EmptyA,
    Comma(Box<Bunch>, Box<Bunch>),
    Semi(Box<Bunch>, Box<Bunch>),
}

impl Bunch {
    pub fn comma(l: Bunch, r: Bunch) -> Bunch {
        Bunch::Comma(Box::new(l), Box::new(r))
    }

    pub fn semi(l: Bunch, r: Bunch) -> Bunch {
        Bunch::Semi(Box::new(l), Box::new(r))
    }

    pub fn leaf(f: Formula) -> Bunch {
        Bunch::Leaf(f)
    }

    pub fn formulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn go<'a>(b: &'a Bunch, out: &mut Vec<&'a Formula>) {
            match b {
                Bunch::Leaf(f) => out.push(f),
                Bunch::EmptyM | Bunch::EmptyA => {}
                Bunch::Comma(l, r) | Bunch::Semi(l, r) => {
                    go(l, out);
                    go(r, out);
                }
            }
        }
        go(self, &mut out);
        out
    }
}

/// An n-ary bunch. Comma nodes never have comma children and semicolon nodes
/// never have semicolon children; composite nodes have at least two children.
///
/// Variant order fixes the canonical rank:
/// `Leaf < EmptyA < EmptyM < Semi < Comma`, composite nodes compared
/// lexicographically by their child sequences.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum StarBunch {
    Leaf(Formula),
    EmptyA,
    EmptyM,
    Semi(Vec<StarBunch>),
    Comma(Vec<StarBunch>),
}

impl StarBunch {
    pub fn leaf(f: Formula) -> StarBunch {
        StarBunch::Leaf(f)
    }

    /// Comma node over `children`, splicing in the children of comma
    /// children. Zero children give `EmptyM`, a single child is returned as is.
    pub fn comma(children: Vec<StarBunch>) -> StarBunch {
        let mut flat = Vec::with_capacity(children.len());
        for c in children {
            match c {
                StarBunch::Comma(cs) => flat.extend(cs),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => StarBunch::EmptyM,
            1 => flat.pop().unwrap(),
            _ => StarBunch::Comma(flat),
        }
    }

    /// Semicolon counterpart of [`StarBunch::comma`]; zero children give `EmptyA`.
    pub fn semi(children: Vec<StarBunch>) -> StarBunch {
        let mut flat = Vec::with_capacity(children.len());
        for c in children {
            match c {
                StarBunch::Semi(cs) => flat.extend(cs),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => StarBunch::EmptyA,
            1 => flat.pop().unwrap(),
            _ => StarBunch::Semi(flat),
        }
    }

    pub fn children(&self) -> &[StarBunch] {
        match self {
            StarBunch::Comma(cs) | StarBunch::Semi(cs) => cs,
            _ => &[],
        }
    }

    pub fn is_comma(&self) -> bool {
        matches!(self, StarBunch::Comma(_))
    }

    pub fn is_semi(&self) -> bool {
        matches!(self, StarBunch::Semi(_))
    }

    pub fn as_formula(&self) -> Option<&Formula> {
        match self {
            StarBunch::Leaf(f) => Some(f),
            _ => None,
        }
    }

    /// Rebuilds a node of the same kind as `self` over new children.
    /// Leaves and units are returned unchanged.
    pub fn with_children(&self, children: Vec<StarBunch>) -> StarBunch {
        match self {
            StarBunch::Comma(_) => StarBunch::comma(children),
            StarBunch::Semi(_) => StarBunch::semi(children),
            other => other.clone(),
        }
    }

    /// Node reached by following child indices from the root.
    pub fn at(&self, path: &[usize]) -> Option<&StarBunch> {
        let mut node = self;
        for &i in path {
            node = node.children().get(i)?;
        }
        Some(node)
    }

    /// Replaces the node at `path` by `replacement`, re-flattening on the way up.
    pub fn replace_at(&self, path: &[usize], replacement: StarBunch) -> StarBunch {
        match path.split_first() {
            None => replacement,
            Some((&i, rest)) => {
                let mut children = self.children().to_vec();
                children[i] = children[i].replace_at(rest, replacement);
                self.with_children(children)
            }
        }
    }

    /// Paths to every formula leaf, in depth-first order.
    pub fn leaf_paths(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        fn go(node: &StarBunch, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            match node {
                StarBunch::Leaf(_) => out.push(path.clone()),
                StarBunch::Comma(cs) | StarBunch::Semi(cs) => {
                    for (i, c) in cs.iter().enumerate() {
                        path.push(i);
                        go(c, path, out);
                        path.pop();
                    }
                }
                _ => {}
            }
        }
        go(self, &mut path, &mut out);
        out
    }

    /// Paths to every semicolon node, in depth-first order.
    pub fn semi_paths(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        fn go(node: &StarBunch, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if node.is_semi() {
                out.push(path.clone());
            }
            for (i, c) in node.children().iter().enumerate() {
                path.push(i);
                go(c, path, out);
                path.pop();
            }
        }
        go(self, &mut path, &mut out);
        out
    }

    pub fn formulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn go<'a>(b: &'a StarBunch, out: &mut Vec<&'a Formula>) {
            match b {
                StarBunch::Leaf(f) => out.push(f),
                _ => b.children().iter().for_each(|c| go(c, out)),
            }
        }
        go(self, &mut out);
        out
    }

    /// Size measure: units weigh 0, leaves their formula size, commas the sum
    /// of their children plus one per separating comma, semicolons the
    /// maximum over their children.
    pub fn size(&self) -> usize {
        match self {
            StarBunch::Leaf(f) => f.size(),
            StarBunch::EmptyA | StarBunch::EmptyM => 0,
            StarBunch::Comma(cs) => cs.iter().map(StarBunch::size).sum::<usize>() + cs.len() - 1,
            StarBunch::Semi(cs) => cs.iter().map(StarBunch::size).max().unwrap_or(0),
        }
    }

    /// Number of nodes on the longest root-to-leaf branch, minus one.
    pub fn height(&self) -> usize {
        match self {
            StarBunch::Comma(cs) | StarBunch::Semi(cs) => {
                1 + cs.iter().map(StarBunch::height).max().unwrap_or(0)
            }
            _ => 0,
        }
    }

    /// Left-associated binary bunch with the same children in the same order.
    pub fn to_bunch(&self) -> Bunch {
        match self {
            StarBunch::Leaf(f) => Bunch::Leaf(f.clone()),
            StarBunch::EmptyM => Bunch::EmptyM,
            StarBunch::EmptyA => Bunch::EmptyA,
            StarBunch::Comma(cs) | StarBunch::Semi(cs) => {
                let join = if self.is_comma() { Bunch::comma } else { Bunch::semi };
                let mut it = cs.iter().map(StarBunch::to_bunch);
                let first = it.next().expect("composite node has children");
                it.fold(first, join)
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            StarBunch::Comma(cs) | StarBunch::Semi(cs) => cs.iter().map(StarBunch::leaf_count).sum(),
            _ => 1,
        }
    }

    /// Alternation and arity invariants of a star bunch.
    pub fn is_star(&self) -> bool {
        match self {
            StarBunch::Comma(cs) => {
                cs.len() >= 2 && cs.iter().all(|c| !c.is_comma() && c.is_star())
            }
            StarBunch::Semi(cs) => cs.len() >= 2 && cs.iter().all(|c| !c.is_semi() && c.is_star()),
            _ => true,
        }
    }

    /// All invariants of a normal bunch, including canonical child order.
    pub fn is_normal(&self) -> bool {
        match self {
            StarBunch::Comma(cs) => {
                cs.len() >= 2
                    && cs
                        .iter()
                        .all(|c| !c.is_comma() && *c != StarBunch::EmptyM && c.is_normal())
                    && cs.windows(2).all(|w| w[0] <= w[1])
            }
            StarBunch::Semi(cs) => {
                cs.len() >= 2
                    && cs
                        .iter()
                        .all(|c| !c.is_semi() && *c != StarBunch::EmptyA && c.is_normal())
                    && cs.windows(2).all(|w| w[0] < w[1])
            }
            _ => true,
        }
    }
}

/// A bunch in reduced canonical form. Construct with [`reduce`] or
/// [`NormalBunch::from_bunch`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NormalBunch(StarBunch);

impl NormalBunch {
    pub fn leaf(f: Formula) -> NormalBunch {
        NormalBunch(StarBunch::Leaf(f))
    }

    pub fn empty_m() -> NormalBunch {
        NormalBunch(StarBunch::EmptyM)
    }

    pub fn empty_a() -> NormalBunch {
        NormalBunch(StarBunch::EmptyA)
    }

    /// Normalizes a parsed bunch: `reduce(star(x))`.
    pub fn from_bunch(x: &Bunch) -> NormalBunch {
        reduce(&star(x))
    }

    pub fn as_star(&self) -> &StarBunch {
        &self.0
    }

    pub fn into_star(self) -> StarBunch {
        self.0
    }

    pub fn size(&self) -> usize {
        self.0.size()
    }

    pub fn height(&self) -> usize {
        self.0.height()
    }

    pub fn formulas(&self) -> Vec<&Formula> {
        self.0.formulas()
    }

    /// The children of a composite node viewed as normal bunches.
    pub fn children(&self) -> Vec<NormalBunch> {
        self.0.children().iter().cloned().map(NormalBunch).collect()
    }
}

/// Converts a binary bunch to its alternating n-ary form.
pub fn star(x: &Bunch) -> StarBunch {
    match x {
        Bunch::Leaf(f) => StarBunch::Leaf(f.clone()),
        Bunch::EmptyM => StarBunch::EmptyM,
        Bunch::EmptyA => StarBunch::EmptyA,
        Bunch::Comma(u, v) => {
            let mut children = Vec::new();
            for part in [star(u), star(v)] {
                match part {
                    StarBunch::Comma(cs) => children.extend(cs),
                    other => children.push(other),
                }
            }
            StarBunch::Comma(children)
        }
        Bunch::Semi(u, v) => {
            let mut children = Vec::new();
            for part in [star(u), star(v)] {
                match part {
                    StarBunch::Semi(cs) => children.extend(cs),
                    other => children.push(other),
                }
            }
            StarBunch::Semi(children)
        }
    }
}

/// Reduces a star bunch to normal form: drops `EmptyM` under commas and
/// `EmptyA` under semicolons, removes repeated semicolon children, collapses
/// unit-only and single-child nodes, re-flattens, and sorts children.
///
/// Accepts trees that violate alternation as well.
pub fn reduce(x: &StarBunch) -> NormalBunch {
    NormalBunch(reduce_node(x))
}

fn reduce_node(x: &StarBunch) -> StarBunch {
    match x {
        StarBunch::Comma(cs) => {
            let mut out = Vec::with_capacity(cs.len());
            for c in cs {
                match reduce_node(c) {
                    StarBunch::EmptyM => {}
                    StarBunch::Comma(gs) => out.extend(gs),
                    other => out.push(other),
                }
            }
            out.sort();
            match out.len() {
                0 => StarBunch::EmptyM,
                1 => out.pop().unwrap(),
                _ => StarBunch::Comma(out),
            }
        }
        StarBunch::Semi(cs) => {
            let mut out = Vec::with_capacity(cs.len());
            for c in cs {
                match reduce_node(c) {
                    StarBunch::EmptyA => {}
                    StarBunch::Semi(gs) => out.extend(gs),
                    other => out.push(other),
                }
            }
            out.sort();
            out.dedup();
            match out.len() {
                0 => StarBunch::EmptyA,
                1 => out.pop().unwrap(),
                _ => StarBunch::Semi(out),
            }
        }
        other => other.clone(),
    }
}

/// Strict total order on canonical bunches.
pub fn canonical_compare(a: &NormalBunch, b: &NormalBunch) -> Ordering {
    a.cmp(b)
}

/// Size of a normal bunch.
pub fn bunch_size(x: &NormalBunch) -> usize {
    x.size()
}

/// Height of a normal bunch.
pub fn bunch_height(x: &NormalBunch) -> usize {
    x.height()
}

/// Formula interpretation of a structure: comma as tensor, semicolon as
/// conjunction, `EmptyM` as `1`, `EmptyA` as `top`.
pub trait Interpret {
    fn interpret(&self) -> Formula;
}

impl Interpret for Bunch {
    fn interpret(&self) -> Formula {
        match self {
            Bunch::Leaf(f) => f.clone(),
            Bunch::EmptyM => Formula::One,
            Bunch::EmptyA => Formula::Top,
            Bunch::Comma(l, r) => Formula::tensor(l.interpret(), r.interpret()),
            Bunch::Semi(l, r) => Formula::and(l.interpret(), r.interpret()),
        }
    }
}

impl Interpret for StarBunch {
    fn interpret(&self) -> Formula {
        match self {
            StarBunch::Leaf(f) => f.clone(),
            StarBunch::EmptyM => Formula::One,
            StarBunch::EmptyA => Formula::Top,
            StarBunch::Comma(cs) => fold(cs, Formula::tensor),
            StarBunch::Semi(cs) => fold(cs, Formula::and),
        }
    }
}

impl Interpret for NormalBunch {
    fn interpret(&self) -> Formula {
        self.0.interpret()
    }
}

fn fold(children: &[StarBunch], op: fn(Formula, Formula) -> Formula) -> Formula {
    let mut it = children.iter().map(StarBunch::interpret);
    let first = it.next().expect("composite node has children");
    it.fold(first, op)
}

/// A parsed sequent with an ordered binary antecedent.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RawSequent {
    pub antecedent: Bunch,
    pub succedent: Formula,
}

impl RawSequent {
    pub fn subformulas(&self) -> std::collections::BTreeSet<Formula> {
        let mut fs = self.antecedent.formulas();
        fs.push(&self.succedent);
        crate::formula::subformula_closure(fs)
    }

    /// Normalizes the antecedent.
    pub fn normalize(&self) -> Sequent {
        Sequent::new(NormalBunch::from_bunch(&self.antecedent), self.succedent.clone())
    }
}

/// A sequent over a normal antecedent; hashing and equality are canonical.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Sequent {
    pub antecedent: NormalBunch,
    pub succedent: Formula,
}

impl Sequent {
    pub fn new(antecedent: NormalBunch, succedent: Formula) -> Sequent {
        Sequent { antecedent, succedent }
    }

    /// Formula occurrences: antecedent leaves followed by the succedent.
    pub fn formulas(&self) -> Vec<&Formula> {
        let mut fs = self.antecedent.formulas();
        fs.push(&self.succedent);
        fs
    }

    pub fn subformulas(&self) -> std::collections::BTreeSet<Formula> {
        crate::formula::subformula_closure(self.formulas())
    }

    /// The same sequent with a binary antecedent; normalizes back to `self`.
    pub fn to_raw(&self) -> RawSequent {
        RawSequent { antecedent: self.antecedent.as_star().to_bunch(), succedent: self.succedent.clone() }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::render::{Render, Style};
        f.write_str(&self.render(Style::Text))
    }
}

impl fmt::Display for NormalBunch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::render::{Render, Style};
        f.write_str(&self.render(Style::Text))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_formula;

    fn fm(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }
    fn lf(s: &str) -> StarBunch {
        StarBunch::Leaf(fm(s))
    }
    fn bl(s: &str) -> Bunch {
        Bunch::Leaf(fm(s))
    }

    // ((p->q, Ea); (p->q, Ea)), ((p-*1; Ea), (Em, r*s))
    fn worked_bunch() -> Bunch {
        let pq = || Bunch::comma(bl("p -> q"), Bunch::EmptyA);
        Bunch::comma(
            Bunch::semi(pq(), pq()),
            Bunch::comma(
                Bunch::semi(bl("p -* 1"), Bunch::EmptyA),
                Bunch::comma(Bunch::EmptyM, bl("r * s")),
            ),
        )
    }

    #[test]
    fn star_worked_example() {
        let pq = || StarBunch::Comma(vec![lf("p -> q"), StarBunch::EmptyA]);
        let expected = StarBunch::Comma(vec![
            StarBunch::Semi(vec![pq(), pq()]),
            StarBunch::Semi(vec![lf("p -* 1"), StarBunch::EmptyA]),
            StarBunch::EmptyM,
            lf("r * s"),
        ]);
        let got = star(&worked_bunch());
        assert_eq!(got, expected);
        assert!(got.is_star());
    }

    #[test]
    fn star_leaf_and_flattening() {
        assert_eq!(star(&bl("p")), lf("p"));
        let x = Bunch::comma(Bunch::comma(bl("p"), bl("q")), bl("r"));
        assert_eq!(star(&x), StarBunch::Comma(vec![lf("p"), lf("q"), lf("r")]));
    }

    #[test]
    fn reduce_worked_example() {
        let got = reduce(&star(&worked_bunch()));
        let mut expected = vec![lf("p -> q"), StarBunch::EmptyA, lf("p -* 1"), lf("r * s")];
        expected.sort();
        assert_eq!(got.as_star(), &StarBunch::Comma(expected));
    }

    #[test]
    fn reduce_small_cases() {
        assert_eq!(reduce(&StarBunch::Semi(vec![lf("p"), lf("p")])).as_star(), &lf("p"));
        assert_eq!(
            reduce(&StarBunch::Comma(vec![StarBunch::EmptyM, StarBunch::EmptyM])),
            NormalBunch::empty_m()
        );
        // collapse puts a comma under a comma; reduce must re-flatten
        let x = StarBunch::Comma(vec![
            lf("r"),
            StarBunch::Semi(vec![StarBunch::Comma(vec![lf("p"), lf("q")]), StarBunch::EmptyA]),
        ]);
        assert_eq!(reduce(&x).as_star(), &StarBunch::Comma(vec![lf("p"), lf("q"), lf("r")]));
    }

    #[test]
    fn compare_examples() {
        let p = NormalBunch::leaf(fm("p"));
        let q = NormalBunch::leaf(fm("q"));
        assert_eq!(canonical_compare(&p, &q), Ordering::Less);
        let pq = reduce(&StarBunch::Semi(vec![lf("p"), lf("q")]));
        assert_eq!(canonical_compare(&pq, &pq.clone()), Ordering::Equal);
        let comma = reduce(&StarBunch::Comma(vec![lf("p"), lf("q")]));
        assert_eq!(canonical_compare(&NormalBunch::empty_a(), &comma), Ordering::Less);
    }

    // p&q, (p; (Ea, q, 1&r); p-*q)
    fn size_example() -> NormalBunch {
        reduce(&StarBunch::Comma(vec![
            lf("p & q"),
            StarBunch::Semi(vec![
                lf("p"),
                StarBunch::Comma(vec![StarBunch::EmptyA, lf("q"), lf("1 & r")]),
                lf("p -* q"),
            ]),
        ]))
    }

    #[test]
    fn size_examples() {
        assert_eq!(bunch_size(&size_example()), 10);
        assert_eq!(bunch_size(&NormalBunch::empty_a()), 0);
        assert_eq!(bunch_size(&reduce(&StarBunch::Comma(vec![lf("p"), lf("q")]))), 3);
    }

    #[test]
    fn height_examples() {
        assert_eq!(bunch_height(&NormalBunch::leaf(fm("p"))), 0);
        assert_eq!(bunch_height(&size_example()), 3);
        // Em; (Ea, (Em; (Ea, Ea)))
        let boundary = StarBunch::Semi(vec![
            StarBunch::EmptyM,
            StarBunch::Comma(vec![
                StarBunch::EmptyA,
                StarBunch::Semi(vec![
                    StarBunch::EmptyM,
                    StarBunch::Comma(vec![StarBunch::EmptyA, StarBunch::EmptyA]),
                ]),
            ]),
        ]);
        let n = reduce(&boundary);
        assert_eq!(n.as_star().height(), 4);
        assert_eq!(n.size(), 2);
        assert!(n.as_star().is_normal());
    }

    #[test]
    fn interpret_examples() {
        let x = StarBunch::Comma(vec![lf("p"), StarBunch::Semi(vec![lf("q"), lf("r")])]);
        assert_eq!(x.interpret(), fm("p * (q & r)"));
        assert_eq!(StarBunch::EmptyM.interpret(), Formula::One);
        assert_eq!(Bunch::EmptyA.interpret(), Formula::Top);
    }

    #[test]
    fn replace_reflattens() {
        let x = StarBunch::Comma(vec![lf("p"), lf("q")]);
        let y = x.replace_at(&[0], StarBunch::Comma(vec![lf("r"), lf("s")]));
        assert_eq!(y, StarBunch::Comma(vec![lf("r"), lf("s"), lf("q")]));
    }
}
