//! Tensor expressions over catalog entries and the report produced by
//! evaluating them.
//!
//! ```text
//! EXPR     := ATOMEXPR ("@" ATOMEXPR)*
//! ATOMEXPR := (LEAF | "(" EXPR ")") ("^oo")*
//! ```

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::abgroup::AbGroup;
use crate::classify::{classify_stable, diagnose, invariant_of, is_flip_admissible, AdmissibleShape, CatalogEntry};
use crate::error::{Error, Result};
use crate::kunneth::Violation;
use crate::semigroup::{infinite_power, tensor_catalog};
use crate::text::Cursor;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Leaf(CatalogEntry),
    Tensor(Box<Expr>, Box<Expr>),
    InfinitePower(Box<Expr>),
}

impl Expr {
    pub fn eval(&self) -> Result<CatalogEntry> {
        match self {
            Expr::Leaf(e) => Ok(e.clone()),
            Expr::Tensor(a, b) => tensor_catalog(&a.eval()?, &b.eval()?),
            Expr::InfinitePower(a) => infinite_power(&a.eval()?),
        }
    }
}

fn parse_expr(cur: &mut Cursor<'_>) -> Result<Expr> {
    let mut lhs = parse_atom_expr(cur)?;
    while cur.eat("@") {
        let rhs = parse_atom_expr(cur)?;
        lhs = Expr::Tensor(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_atom_expr(cur: &mut Cursor<'_>) -> Result<Expr> {
    let mut e = if cur.eat("(") {
        let inner = parse_expr(cur)?;
        cur.expect(")")?;
        inner
    } else {
        Expr::Leaf(CatalogEntry::parse_at(cur)?)
    };
    while cur.eat("^oo") {
        e = Expr::InfinitePower(Box::new(e));
    }
    Ok(e)
}

pub fn parse(input: &str) -> Result<Expr> {
    let mut cur = Cursor::new(input);
    let e = parse_expr(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.error("'@', '^oo' or end of input"));
    }
    Ok(e)
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Leaf(e) => write!(f, "{e}"),
            Expr::Tensor(a, b) => match **b {
                Expr::Tensor(..) => write!(f, "{a} @ ({b})"),
                _ => write!(f, "{a} @ {b}"),
            },
            Expr::InfinitePower(a) => match **a {
                Expr::Tensor(..) => write!(f, "({a})^oo"),
                _ => write!(f, "{a}^oo"),
            },
        }
    }
}

/// Everything known about the value of an expression.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub input: String,
    pub entry: CatalogEntry,
    pub k0: AbGroup,
    pub k1: AbGroup,
    pub stably_finite: bool,
    /// The admissible shape of `K₀ ⊕ K₁`, or `None` with diagnostics.
    pub admissible: Option<AdmissibleShape>,
    pub diagnostics: Vec<Violation>,
    /// Every catalog entry sharing the invariant, when there is more than one.
    pub ambiguity: Vec<CatalogEntry>,
}

impl Report {
    pub fn for_entry(input: impl Into<String>, entry: CatalogEntry) -> Result<Report> {
        let k = invariant_of(&entry)?;
        let ungraded = k.ungraded();
        let admissible = is_flip_admissible(&ungraded).ok();
        let mut ambiguity = classify_stable(&k)?;
        if ambiguity.len() < 2 {
            ambiguity.clear();
        }
        Ok(Report {
            input: input.into(),
            entry,
            diagnostics: diagnose(&ungraded),
            admissible,
            k0: k.k0,
            k1: k.k1,
            stably_finite: k.stably_finite,
            ambiguity,
        })
    }

    /// Human-readable rendering, one fact per line.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "entry: {}\nK0: {}\nK1: {}\nstably finite: {}\n",
            self.entry,
            self.k0,
            self.k1,
            if self.stably_finite { "yes" } else { "no" }
        );
        match &self.admissible {
            Some(shape) => out.push_str(&format!("admissible: {shape}\n")),
            None => out.push_str("admissible: no\n"),
        }
        for d in &self.diagnostics {
            out.push_str(&format!("  - {d}\n"));
        }
        if !self.ambiguity.is_empty() {
            let names: Vec<String> = self.ambiguity.iter().map(ToString::to_string).collect();
            out.push_str(&format!("same invariant: {}\n", names.join(", ")));
        }
        out
    }
}

pub fn eval(input: &str) -> Result<Report> {
    let e = parse(input)?;
    Report::for_entry(input, e.eval()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsing() {
        let e = parse("M(U) @ F(1,2^inf)").unwrap();
        assert_eq!(e.to_string(), "E(U,1,1) @ F(1,2^inf)");
        assert!(matches!(e, Expr::Tensor(..)));
        let e = parse("E(6^inf,2^inf,3^inf)^oo").unwrap();
        assert!(matches!(e, Expr::InfinitePower(_)));
        assert_eq!(e.to_string(), "E(2^inf*3^inf,2^inf,3^inf)^oo");
        let e = parse("Z @ (O2 @ Oinf)^oo^oo").unwrap();
        assert_eq!(parse(&e.to_string()).unwrap(), e);
        let e = parse("Z @ (O2 @ Oinf)").unwrap();
        assert_eq!(e.to_string(), "E(1,1,1) @ (F(1,1) @ EOi(1,1,1))");
        assert_eq!(parse(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn errors() {
        let err = parse("E(2^inf,3^inf,1)").unwrap_err();
        assert!(matches!(&err, Error::Constraint(m) if m.contains("does not divide")));
        assert!(matches!(parse("Z @"), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(parse("(Z"), Err(Error::Parse { .. })));
        assert!(matches!(parse("Z Z"), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(eval("Oinf^oo"), Err(Error::Unsupported(_))));
    }

    #[test]
    fn evaluation() {
        let r = eval("Z @ O2").unwrap();
        assert_eq!(r.entry.to_string(), "F(1,1)");
        assert_eq!((r.k0.to_string(), r.k1.to_string()), ("0".into(), "0".into()));
        assert_eq!(r.admissible, Some(AdmissibleShape::Zero));
        let r = eval("Osup @ Osup").unwrap();
        assert_eq!(r.entry.to_string(), "EOi(1,1,1)");
        assert_eq!((r.k0.to_string(), r.k1.to_string()), ("Z".into(), "0".into()));
        let r = eval("E(1,1,1)").unwrap();
        assert_eq!(r.ambiguity, [CatalogEntry::jiang_su(), CatalogEntry::c()]);
        assert!(r.to_text().contains("same invariant: E(1,1,1), C"));
    }
}
