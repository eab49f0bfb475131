//! Output formats.
//!
//! Text output always re-parses to the same value. Any binary subformula of a
//! binary connective is parenthesized, as is any composite child of a bunch
//! node.

use serde_json::{json, Value};

use crate::bunch::{Bunch, NormalBunch, RawSequent, Sequent, StarBunch};
use crate::formula::{Connective, Formula};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Style {
    Text,
    Latex,
    Json,
}

pub trait Render {
    fn render(&self, style: Style) -> String;
}

/// Free-function form of [`Render::render`].
pub fn render<T: Render + ?Sized>(entity: &T, style: Style) -> String {
    entity.render(style)
}

fn text_op(c: Connective) -> &'static str {
    match c {
        Connective::And => "&",
        Connective::Or => "|",
        Connective::Imp => "->",
        Connective::Tensor => "*",
        Connective::Wand => "-*",
    }
}

fn latex_op(c: Connective) -> &'static str {
    match c {
        Connective::And => "\\land",
        Connective::Or => "\\lor",
        Connective::Imp => "\\rightarrow",
        Connective::Tensor => "\\otimes",
        Connective::Wand => "\\multimap",
    }
}

fn json_op(c: Connective) -> &'static str {
    match c {
        Connective::And => "and",
        Connective::Or => "or",
        Connective::Imp => "imp",
        Connective::Tensor => "tensor",
        Connective::Wand => "wand",
    }
}

pub fn formula_text(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, &mut out, false);
    out
}

pub fn formula_latex(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, &mut out, true);
    out
}

fn write_formula(f: &Formula, out: &mut String, latex: bool) {
    match f {
        Formula::Var(name) => out.push_str(name),
        Formula::Top => out.push_str(if latex { "\\top" } else { "top" }),
        Formula::Bot => out.push_str(if latex { "\\bot" } else { "bot" }),
        Formula::One => out.push_str(if latex { "\\mathbf{1}" } else { "1" }),
        _ => {
            let (c, l, r) = f.as_binary().unwrap();
            write_operand(l, out, latex);
            out.push(' ');
            out.push_str(if latex { latex_op(c) } else { text_op(c) });
            out.push(' ');
            write_operand(r, out, latex);
        }
    }
}

fn write_operand(f: &Formula, out: &mut String, latex: bool) {
    if f.is_atomic() {
        write_formula(f, out, latex);
    } else {
        out.push('(');
        write_formula(f, out, latex);
        out.push(')');
    }
}

pub fn formula_json(f: &Formula) -> Value {
    match f {
        Formula::Var(name) => json!({ "var": name.as_ref() }),
        Formula::Top => json!({ "const": "top" }),
        Formula::Bot => json!({ "const": "bot" }),
        Formula::One => json!({ "const": "one" }),
        _ => {
            let (c, l, r) = f.as_binary().unwrap();
            json!({ "op": json_op(c), "l": formula_json(l), "r": formula_json(r) })
        }
    }
}

impl Render for Formula {
    fn render(&self, style: Style) -> String {
        match style {
            Style::Text => formula_text(self),
            Style::Latex => formula_latex(self),
            Style::Json => formula_json(self).to_string(),
        }
    }
}

// Shared writer for the binary and n-ary bunch shapes.
enum Node<'a> {
    Leaf(&'a Formula),
    EmptyM,
    EmptyA,
    Comma(Vec<Node<'a>>),
    Semi(Vec<Node<'a>>),
}

impl<'a> Node<'a> {
    fn from_bunch(b: &'a Bunch) -> Node<'a> {
        match b {
            Bunch::Leaf(f) => Node::Leaf(f),
            Bunch::EmptyM => Node::EmptyM,
            Bunch::EmptyA => Node::EmptyA,
            Bunch::Comma(l, r) => Node::Comma(vec![Node::from_bunch(l), Node::from_bunch(r)]),
            Bunch::Semi(l, r) => Node::Semi(vec![Node::from_bunch(l), Node::from_bunch(r)]),
        }
    }

    fn from_star(b: &'a StarBunch) -> Node<'a> {
        match b {
            StarBunch::Leaf(f) => Node::Leaf(f),
            StarBunch::EmptyM => Node::EmptyM,
            StarBunch::EmptyA => Node::EmptyA,
            StarBunch::Comma(cs) => Node::Comma(cs.iter().map(Node::from_star).collect()),
            StarBunch::Semi(cs) => Node::Semi(cs.iter().map(Node::from_star).collect()),
        }
    }

    fn write(&self, out: &mut String, latex: bool) {
        let (children, sep) = match self {
            Node::Leaf(f) => return write_formula(f, out, latex),
            Node::EmptyM => return out.push_str(if latex { "\\varnothing_{m}" } else { "Em" }),
            Node::EmptyA => return out.push_str(if latex { "\\varnothing_{a}" } else { "Ea" }),
            Node::Comma(cs) => (cs, ", "),
            Node::Semi(cs) => (cs, "; "),
        };
        for (i, c) in children.iter().enumerate() {
            if i > 0 {
                out.push_str(sep);
            }
            let composite = matches!(c, Node::Comma(_) | Node::Semi(_));
            if composite {
                out.push('(');
            }
            c.write(out, latex);
            if composite {
                out.push(')');
            }
        }
    }

    fn json(&self) -> Value {
        match self {
            Node::Leaf(f) => json!({ "leaf": formula_json(f) }),
            Node::EmptyM => json!({ "unit": "m" }),
            Node::EmptyA => json!({ "unit": "a" }),
            Node::Comma(cs) => json!({ "comma": cs.iter().map(Node::json).collect::<Vec<_>>() }),
            Node::Semi(cs) => json!({ "semi": cs.iter().map(Node::json).collect::<Vec<_>>() }),
        }
    }

    fn render(&self, style: Style) -> String {
        let mut out = String::new();
        match style {
            Style::Text => self.write(&mut out, false),
            Style::Latex => self.write(&mut out, true),
            Style::Json => out = self.json().to_string(),
        }
        out
    }
}

impl Render for Bunch {
    fn render(&self, style: Style) -> String {
        Node::from_bunch(self).render(style)
    }
}

impl Render for StarBunch {
    fn render(&self, style: Style) -> String {
        Node::from_star(self).render(style)
    }
}

impl Render for NormalBunch {
    fn render(&self, style: Style) -> String {
        self.as_star().render(style)
    }
}

fn sequent_json(antecedent: Value, succedent: &Formula) -> Value {
    json!({ "antecedent": antecedent, "succedent": formula_json(succedent) })
}

fn render_sequent(ante: Node<'_>, succ: &Formula, style: Style) -> String {
    match style {
        Style::Text => format!("{} |- {}", ante.render(style), formula_text(succ)),
        Style::Latex => format!("{} \\vdash {}", ante.render(style), formula_latex(succ)),
        Style::Json => sequent_json(ante.json(), succ).to_string(),
    }
}

impl Render for RawSequent {
    fn render(&self, style: Style) -> String {
        render_sequent(Node::from_bunch(&self.antecedent), &self.succedent, style)
    }
}

impl Render for Sequent {
    fn render(&self, style: Style) -> String {
        render_sequent(Node::from_star(self.antecedent.as_star()), &self.succedent, style)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_formula, parse_sequent};

    #[test]
    fn text_examples() {
        let f = Formula::tensor(Formula::var("p"), Formula::var("q"));
        assert_eq!(f.render(Style::Text), "p * q");
        assert_eq!(parse_formula("p -* q * r").unwrap().render(Style::Text), "p -* (q * r)");
        assert_eq!(parse_formula("p & q -> r").unwrap().render(Style::Text), "(p & q) -> r");
    }

    #[test]
    fn latex_examples() {
        assert_eq!(Bunch::EmptyA.render(Style::Latex), "\\varnothing_{a}");
        assert_eq!(Bunch::EmptyM.render(Style::Latex), "\\varnothing_{m}");
        let s = parse_sequent("p, 1 |- top & bot").unwrap();
        assert_eq!(s.render(Style::Latex), "p, \\mathbf{1} \\vdash \\top \\land \\bot");
        assert_eq!(parse_formula("p -* q").unwrap().render(Style::Latex), "p \\multimap q");
    }

    #[test]
    fn json_examples() {
        let f = Formula::wand(Formula::var("p"), Formula::var("p"));
        let v: Value = serde_json::from_str(&f.render(Style::Json)).unwrap();
        assert_eq!(v, json!({"op":"wand","l":{"var":"p"},"r":{"var":"p"}}));
        let v: Value = serde_json::from_str(&Formula::One.render(Style::Json)).unwrap();
        assert_eq!(v, json!({"const":"one"}));
    }

    #[test]
    fn bunch_text_reparses() {
        let s = parse_sequent("(p, q); (r; s), Em |- p").unwrap();
        let text = s.render(Style::Text);
        assert_eq!(text, "(p, q); ((r; s), Em) |- p");
        assert_eq!(parse_sequent(&text).unwrap(), s);
    }
}
