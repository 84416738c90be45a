//! Modal formulas over the core connectives `⊥`, `→` and indexed diamonds.
//!
//! Negation, conjunction, disjunction, `⊤` and boxes are built by the
//! constructors below and expand to the core immediately; the printer
//! recognises those expansions and re-sugars them, so printing and parsing
//! are mutually inverse on every AST.

mod parse;
mod schema;
mod translate;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use parse::parse;
pub use schema::{b_formula, b_m_formula, phi_axioms, pretransitivity_axiom};
pub use translate::{m_translate, reflexive_translate, relativize};

use crate::ModalityAlphabet;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Bottom,
    Var(u32),
    Implies(Arc<Formula>, Arc<Formula>),
    Diamond(Arc<str>, Arc<Formula>),
}

impl Formula {
    pub fn bottom() -> Formula {
        Formula::Bottom
    }

    pub fn top() -> Formula {
        Formula::implies(Formula::Bottom, Formula::Bottom)
    }

    pub fn var(i: u32) -> Formula {
        Formula::Var(i)
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Arc::new(a), Arc::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Formula::implies(a, Formula::Bottom)
    }

    /// `a ∨ b := ¬a → b`.
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::implies(Formula::not(a), b)
    }

    /// `a ∧ b := ¬(a → ¬b)`.
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::implies(a, Formula::not(b)))
    }

    pub fn diamond(modality: &str, a: Formula) -> Formula {
        Formula::Diamond(Arc::from(modality), Arc::new(a))
    }

    /// `□φ := ¬◊¬φ`.
    pub fn boxed(modality: &str, a: Formula) -> Formula {
        Formula::not(Formula::diamond(modality, Formula::not(a)))
    }

    /// Left-nested disjunction; `⊥` when empty.
    pub fn or_all<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::Bottom,
            Some(first) => it.fold(first, Formula::or),
        }
    }

    /// Left-nested conjunction; `⊤` when empty.
    pub fn and_all<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::top(),
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// `◊_A φ`, the disjunction of `◊φ` over the alphabet.
    pub fn diamond_any(alphabet: &ModalityAlphabet, a: Formula) -> Formula {
        Formula::or_all(alphabet.names().iter().map(|m| Formula::diamond(m, a.clone())))
    }

    /// `◊_A^i φ`, with `◊_A^0 φ = φ`.
    pub fn diamond_any_pow(alphabet: &ModalityAlphabet, i: usize, a: Formula) -> Formula {
        (0..i).fold(a, |acc, _| Formula::diamond_any(alphabet, acc))
    }

    /// `◊_A^{≤m} φ = φ ∨ ◊_A φ ∨ … ∨ ◊_A^m φ`.
    pub fn diamond_upto(alphabet: &ModalityAlphabet, m: usize, a: Formula) -> Formula {
        let mut terms = Vec::with_capacity(m + 1);
        let mut cur = a;
        terms.push(cur.clone());
        for _ in 0..m {
            cur = Formula::diamond_any(alphabet, cur);
            terms.push(cur.clone());
        }
        Formula::or_all(terms)
    }

    /// `□_A^{≤m} φ = ¬◊_A^{≤m}¬φ`.
    pub fn box_upto(alphabet: &ModalityAlphabet, m: usize, a: Formula) -> Formula {
        Formula::not(Formula::diamond_upto(alphabet, m, Formula::not(a)))
    }

    pub fn variables(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Var(i) = f {
                out.insert(*i);
            }
        });
        out
    }

    pub fn modalities(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Diamond(m, _) = f {
                out.insert(m.to_string());
            }
        });
        out
    }

    /// Modal depth.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Bottom | Formula::Var(_) => 0,
            Formula::Implies(a, b) => a.depth().max(b.depth()),
            Formula::Diamond(_, a) => 1 + a.depth(),
        }
    }

    /// Number of core nodes, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        match self {
            Formula::Bottom | Formula::Var(_) => 1,
            Formula::Implies(a, b) => 1 + a.size() + b.size(),
            Formula::Diamond(_, a) => 1 + a.size(),
        }
    }

    /// Pre-order traversal. Shared subtrees are revisited.
    fn walk(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Bottom | Formula::Var(_) => {}
            Formula::Implies(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Formula::Diamond(_, a) => a.walk(f),
        }
    }
}

/// How a core node reads once derived connectives are recognised.
enum View<'a> {
    False,
    True,
    Var(u32),
    Not(&'a Formula),
    And(&'a Formula, &'a Formula),
    Or(&'a Formula, &'a Formula),
    Implies(&'a Formula, &'a Formula),
    Diamond(&'a str, &'a Formula),
    Box(&'a str, &'a Formula),
}

impl Formula {
    fn view(&self) -> View<'_> {
        use Formula::*;
        match self {
            Bottom => View::False,
            Var(i) => View::Var(*i),
            Diamond(m, a) => View::Diamond(m, a),
            Implies(x, b) if **b == Bottom => match &**x {
                Bottom => View::True,
                Implies(a, c) => match &**c {
                    Implies(b, bot) if **bot == Bottom => View::And(a, b),
                    _ => View::Not(x),
                },
                Diamond(m, inner) => match &**inner {
                    Implies(y, bot) if **bot == Bottom => View::Box(m, y),
                    _ => View::Not(x),
                },
                _ => View::Not(x),
            },
            Implies(x, b) => match &**x {
                Implies(a, bot) if **bot == Bottom => View::Or(a, b),
                _ => View::Implies(x, b),
            },
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let view = self.view();
        let prec = match view {
            View::Implies(..) => 0,
            View::Or(..) => 1,
            View::And(..) => 2,
            View::Not(_) | View::Diamond(..) | View::Box(..) => 3,
            View::False | View::True | View::Var(_) => 4,
        };
        if prec < min {
            write!(f, "(")?;
        }
        match view {
            View::False => write!(f, "false")?,
            View::True => write!(f, "true")?,
            View::Var(i) => write!(f, "p{i}")?,
            View::Not(a) => {
                write!(f, "~")?;
                a.fmt_prec(f, 3)?;
            }
            View::Diamond(m, a) => {
                write!(f, "<{m}>")?;
                a.fmt_prec(f, 3)?;
            }
            View::Box(m, a) => {
                write!(f, "[{m}]")?;
                a.fmt_prec(f, 3)?;
            }
            View::And(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 3)?;
            }
            View::Or(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " | ")?;
                b.fmt_prec(f, 2)?;
            }
            View::Implies(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, 0)?;
            }
        }
        if prec < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

impl std::str::FromStr for Formula {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Formula> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(i: u32) -> Formula {
        Formula::var(i)
    }

    #[test]
    fn printer_resugars() {
        let f = Formula::diamond("a", Formula::and(p(0), Formula::not(p(1))));
        assert_eq!(f.to_string(), "<a>(p0 & ~p1)");
        assert_eq!(Formula::boxed("b", p(0)).to_string(), "[b]p0");
        assert_eq!(Formula::or(p(0), p(1)).to_string(), "p0 | p1");
        assert_eq!(Formula::top().to_string(), "true");
        assert_eq!(
            Formula::implies(Formula::implies(p(0), p(1)), p(2)).to_string(),
            "(p0 -> p1) -> p2"
        );
        assert_eq!(
            Formula::implies(p(0), Formula::implies(p(1), p(2))).to_string(),
            "p0 -> p1 -> p2"
        );
    }

    #[test]
    fn derived_operators_expand() {
        assert_eq!(
            Formula::diamond_upto(&ModalityAlphabet::of(&["a"]), 1, p(0)),
            Formula::or(p(0), Formula::diamond("a", p(0)))
        );
        assert_eq!(Formula::diamond_upto(&ModalityAlphabet::of(&["a"]), 0, p(0)), p(0));
        assert_eq!(
            Formula::diamond_any(&ModalityAlphabet::of(&["a", "b"]), p(0)),
            Formula::or(Formula::diamond("a", p(0)), Formula::diamond("b", p(0)))
        );
        assert_eq!(Formula::or_all([]), Formula::Bottom);
    }

    #[test]
    fn metrics() {
        let f = Formula::diamond("a", Formula::and(p(0), Formula::diamond("b", p(3))));
        assert_eq!(f.depth(), 2);
        assert_eq!(f.variables().into_iter().collect::<Vec<_>>(), vec![0, 3]);
        assert_eq!(
            f.modalities().into_iter().collect::<Vec<_>>(),
            vec!["a".to_string(), "b".to_string()]
        );
    }
}
