//! Concrete syntax: a parenthesized prefix notation for formulas and
//! signatures, plus the canonical printer.
//!
//! ```text
//! true  false  (= x y)  (P x1 … xk)
//! (and F G) (or F G) (not F) (implies F G) (iff F G)
//! (exists x F) (forall x F) (exists-ge c x F) (exists-exactly c x F)
//! (exists2 P F) (forall2 P F)
//! (sep F G) (sep-on (P1 … Pm) F G) (wand F G)
//! (lfp P (x1 … xk) F (y1 … yk)) (letrec P (x1 … xk) F G)
//! ```
//!
//! Variables start with a lowercase letter, predicates with an uppercase one.
//! `;` starts a comment running to the end of the line.

use std::fmt;

use thiserror::Error;

use crate::formula::Formula;
use crate::vocab::{is_predicate_name, PredicateSet, PredicateSymbol, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: undeclared predicate `{name}`")]
    Undeclared { pos: Pos, name: String },
    #[error("{pos}: predicate `{name}` has arity {expected} but is used with {found} argument(s)")]
    Arity {
        pos: Pos,
        name: String,
        expected: usize,
        found: usize,
    },
}

impl ParseError {
    pub(crate) fn syntax(pos: Pos, msg: impl Into<String>) -> Self {
        ParseError::Syntax {
            pos,
            msg: msg.into(),
        }
    }
}

/// An s-expression with source positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Sexp {
    Symbol(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub(crate) fn pos(&self) -> Pos {
        match self {
            Sexp::Symbol(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub(crate) fn symbol(&self) -> Option<&str> {
        match self {
            Sexp::Symbol(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub(crate) fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Symbol(..) => None,
        }
    }

    /// The head symbol of a list, if any.
    pub(crate) fn head(&self) -> Option<&str> {
        self.list()
            .and_then(|items| items.first())
            .and_then(Sexp::symbol)
    }
}

/// Reads every top-level s-expression in `text`.
pub(crate) fn read_sexps(text: &str) -> Result<Vec<Sexp>, ParseError> {
    let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
    let mut top = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    let mut token = String::new();
    let mut token_pos = Pos { line, col };

    fn flush(token: &mut String, pos: Pos, stack: &mut [(Vec<Sexp>, Pos)], top: &mut Vec<Sexp>) {
        if !token.is_empty() {
            let s = Sexp::Symbol(std::mem::take(token), pos);
            match stack.last_mut() {
                Some((items, _)) => items.push(s),
                None => top.push(s),
            }
        }
    }

    while let Some(c) = chars.next() {
        let here = Pos { line, col };
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
        match c {
            ';' => {
                flush(&mut token, token_pos, &mut stack, &mut top);
                while let Some(&d) = chars.peek() {
                    if d == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => {
                flush(&mut token, token_pos, &mut stack, &mut top);
                stack.push((Vec::new(), here));
            }
            ')' => {
                flush(&mut token, token_pos, &mut stack, &mut top);
                let (items, pos) = stack
                    .pop()
                    .ok_or_else(|| ParseError::syntax(here, "unbalanced `)`"))?;
                let list = Sexp::List(items, pos);
                match stack.last_mut() {
                    Some((items, _)) => items.push(list),
                    None => top.push(list),
                }
            }
            c if c.is_whitespace() => flush(&mut token, token_pos, &mut stack, &mut top),
            c => {
                if token.is_empty() {
                    token_pos = here;
                }
                token.push(c);
            }
        }
    }
    flush(&mut token, token_pos, &mut stack, &mut top);
    if let Some((_, pos)) = stack.last() {
        return Err(ParseError::syntax(*pos, "unclosed `(`"));
    }
    Ok(top)
}

const KEYWORDS: &[&str] = &[
    "true",
    "false",
    "and",
    "or",
    "not",
    "implies",
    "iff",
    "exists",
    "forall",
    "exists-ge",
    "exists-exactly",
    "exists2",
    "forall2",
    "sep",
    "sep-on",
    "wand",
    "lfp",
    "letrec",
];

fn is_var_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !KEYWORDS.contains(&s)
}

struct FormulaReader<'a> {
    vocab: &'a Vocabulary,
}

impl FormulaReader<'_> {
    fn var(&self, s: &Sexp) -> Result<String, ParseError> {
        match s.symbol() {
            Some(v) if is_var_name(v) => Ok(v.to_owned()),
            _ => Err(ParseError::syntax(s.pos(), "expected a variable name")),
        }
    }

    fn vars(&self, s: &Sexp) -> Result<Vec<String>, ParseError> {
        let items = s
            .list()
            .ok_or_else(|| ParseError::syntax(s.pos(), "expected a variable list"))?;
        items.iter().map(|v| self.var(v)).collect()
    }

    fn pred(&self, s: &Sexp) -> Result<(String, usize), ParseError> {
        match s.symbol() {
            Some(p) if is_predicate_name(p) => match self.vocab.arity(p) {
                Some(k) => Ok((p.to_owned(), k)),
                None => Err(ParseError::Undeclared {
                    pos: s.pos(),
                    name: p.to_owned(),
                }),
            },
            _ => Err(ParseError::syntax(s.pos(), "expected a predicate name")),
        }
    }

    fn count(&self, s: &Sexp) -> Result<u32, ParseError> {
        s.symbol()
            .and_then(|c| c.parse::<u32>().ok())
            .filter(|&c| c >= 1)
            .ok_or_else(|| ParseError::syntax(s.pos(), "expected a positive integer"))
    }

    fn arity_check(
        &self,
        at: &Sexp,
        name: &str,
        expected: usize,
        found: usize,
    ) -> Result<(), ParseError> {
        if expected == found {
            Ok(())
        } else {
            Err(ParseError::Arity {
                pos: at.pos(),
                name: name.to_owned(),
                expected,
                found,
            })
        }
    }

    fn formula(&self, s: &Sexp) -> Result<Formula, ParseError> {
        let items = match s {
            Sexp::Symbol(sym, pos) => {
                return match sym.as_str() {
                    "true" => Ok(Formula::True),
                    "false" => Ok(Formula::False),
                    _ => Err(ParseError::syntax(
                        *pos,
                        format!("unexpected symbol `{sym}`"),
                    )),
                }
            }
            Sexp::List(items, pos) if items.is_empty() => {
                return Err(ParseError::syntax(*pos, "empty form"))
            }
            Sexp::List(items, _) => items,
        };
        let head = items[0]
            .symbol()
            .ok_or_else(|| ParseError::syntax(items[0].pos(), "expected an operator"))?;
        let args = &items[1..];
        let want = |n: usize| -> Result<(), ParseError> {
            if args.len() == n {
                Ok(())
            } else {
                Err(ParseError::syntax(
                    s.pos(),
                    format!("`{head}` expects {n} argument(s), found {}", args.len()),
                ))
            }
        };
        let f = match head {
            "=" => {
                want(2)?;
                Formula::Eq(self.var(&args[0])?, self.var(&args[1])?)
            }
            "not" => {
                want(1)?;
                Formula::not(self.formula(&args[0])?)
            }
            "and" | "or" | "implies" | "iff" | "sep" | "wand" => {
                want(2)?;
                let (a, b) = (self.formula(&args[0])?, self.formula(&args[1])?);
                match head {
                    "and" => Formula::and(a, b),
                    "or" => Formula::or(a, b),
                    "implies" => Formula::implies(a, b),
                    "iff" => Formula::iff(a, b),
                    "sep" => Formula::sep(a, b),
                    _ => Formula::wand(a, b),
                }
            }
            "exists" | "forall" => {
                want(2)?;
                let (x, body) = (self.var(&args[0])?, self.formula(&args[1])?);
                if head == "exists" {
                    Formula::exists(&x, body)
                } else {
                    Formula::forall(&x, body)
                }
            }
            "exists-ge" | "exists-exactly" => {
                want(3)?;
                let c = self.count(&args[0])?;
                let (x, body) = (self.var(&args[1])?, self.formula(&args[2])?);
                if head == "exists-ge" {
                    Formula::count_exists(c, &x, body)
                } else {
                    Formula::exists_exactly(c, &x, body)
                }
            }
            "exists2" | "forall2" => {
                want(2)?;
                let (p, k) = self.pred(&args[0])?;
                let body = self.formula(&args[1])?;
                if head == "exists2" {
                    Formula::exists_so(&p, k, body)
                } else {
                    Formula::forall_so(&p, k, body)
                }
            }
            "sep-on" => {
                want(3)?;
                let names = args[0].list().ok_or_else(|| {
                    ParseError::syntax(args[0].pos(), "expected a predicate list")
                })?;
                let mut on = PredicateSet::new();
                for n in names {
                    on.insert(self.pred(n)?.0);
                }
                Formula::sep_on(on, self.formula(&args[1])?, self.formula(&args[2])?)
            }
            "lfp" => {
                want(4)?;
                let (p, k) = self.pred(&args[0])?;
                let params = self.vars(&args[1])?;
                self.arity_check(&args[1], &p, k, params.len())?;
                let body = self.formula(&args[2])?;
                let actual = self.vars(&args[3])?;
                self.arity_check(&args[3], &p, k, actual.len())?;
                Formula::lfp(&p, &params, body, &actual)
            }
            "letrec" => {
                want(4)?;
                let (p, k) = self.pred(&args[0])?;
                let params = self.vars(&args[1])?;
                self.arity_check(&args[1], &p, k, params.len())?;
                Formula::letrec(
                    &p,
                    &params,
                    self.formula(&args[2])?,
                    self.formula(&args[3])?,
                )
            }
            p if is_predicate_name(p) => {
                let (p, k) = self.pred(&items[0])?;
                let vars = args
                    .iter()
                    .map(|a| self.var(a))
                    .collect::<Result<Vec<_>, _>>()?;
                self.arity_check(s, &p, k, vars.len())?;
                Formula::atom(&p, &vars)
            }
            other => {
                return Err(ParseError::syntax(
                    items[0].pos(),
                    format!("unknown operator `{other}`"),
                ))
            }
        };
        Ok(f)
    }
}

/// Parses a single formula; every predicate must be declared in `vocab`.
///
/// ```
/// use spatial_logic::{parse_formula, Formula, Vocabulary};
/// let vocab = Vocabulary::of(&[("P", 1), ("Q", 1)]).unwrap();
/// let f = parse_formula("(sep (P x) (Q x))  ; comment", &vocab).unwrap();
/// assert_eq!(f, Formula::sep(Formula::atom("P", &["x"]), Formula::atom("Q", &["x"])));
/// assert!(parse_formula("(P x y)", &vocab).is_err());
/// ```
pub fn parse_formula(text: &str, vocab: &Vocabulary) -> Result<Formula, ParseError> {
    let sexps = read_sexps(text)?;
    match sexps.as_slice() {
        [one] => FormulaReader { vocab }.formula(one),
        [] => Err(ParseError::syntax(Pos { line: 1, col: 1 }, "empty input")),
        [_, second, ..] => Err(ParseError::syntax(
            second.pos(),
            "trailing input after formula",
        )),
    }
}

pub(crate) fn read_signature(s: &Sexp) -> Result<Vocabulary, ParseError> {
    let items = s.list().unwrap_or(&[]);
    let mut vocab = Vocabulary::new();
    for decl in &items[1..] {
        let bad = || ParseError::syntax(decl.pos(), "expected `(Name arity)`");
        let pair = decl.list().ok_or_else(bad)?;
        let [name, arity] = pair else {
            return Err(bad());
        };
        let name = name.symbol().ok_or_else(bad)?;
        let arity: usize = arity
            .symbol()
            .and_then(|a| a.parse().ok())
            .ok_or_else(bad)?;
        vocab
            .declare(PredicateSymbol::new(name, arity))
            .map_err(|e| ParseError::syntax(decl.pos(), e.to_string()))?;
    }
    Ok(vocab)
}

/// Parses a signature `(sig (P 1) (E 2) …)`.
pub fn parse_signature(text: &str) -> Result<Vocabulary, ParseError> {
    let sexps = read_sexps(text)?;
    match sexps.as_slice() {
        [one] if one.head() == Some("sig") => read_signature(one),
        _ => Err(ParseError::syntax(
            Pos { line: 1, col: 1 },
            "expected a single `(sig …)` form",
        )),
    }
}

/// The symbols declared by the `(sig …)` forms of a formula file, without
/// the arities inferred from uses.
///
/// ```
/// use spatial_logic::declared_signature;
/// let v = declared_signature("(sig (P 1)) (sig (E 2)) (exists2 R (R x))").unwrap();
/// assert_eq!(spatial_logic::print_signature(&v), "(sig (P 1) (E 2))");
/// ```
pub fn declared_signature(text: &str) -> Result<Vocabulary, ParseError> {
    let mut vocab = Vocabulary::new();
    for s in read_sexps(text)?.iter().filter(|s| s.head() == Some("sig")) {
        vocab
            .merge(&read_signature(s)?)
            .map_err(|e| ParseError::syntax(s.pos(), e.to_string()))?;
    }
    Ok(vocab)
}

pub fn print_signature(vocab: &Vocabulary) -> String {
    let mut out = String::from("(sig");
    for s in vocab {
        out.push_str(&format!(" ({} {})", s.name, s.arity));
    }
    out.push(')');
    out
}

/// Collects arities from atom and fixpoint uses in `s`.
fn infer_uses(s: &Sexp, vocab: &mut Vocabulary) -> Result<(), ParseError> {
    let Some(items) = s.list() else { return Ok(()) };
    let conflict = |at: &Sexp, name: &str, expected: usize, found: usize| ParseError::Arity {
        pos: at.pos(),
        name: name.to_owned(),
        expected,
        found,
    };
    let mut note = |at: &Sexp, name: &str, k: usize| -> Result<(), ParseError> {
        if !is_predicate_name(name) {
            return Ok(());
        }
        match vocab.arity(name) {
            Some(j) if j != k => Err(conflict(at, name, j, k)),
            Some(_) => Ok(()),
            None => vocab
                .declare(PredicateSymbol::new(name, k))
                .map_err(|e| ParseError::syntax(at.pos(), e.to_string())),
        }
    };
    match s.head() {
        Some(h) if is_predicate_name(h) => note(s, h, items.len() - 1)?,
        Some("lfp") | Some("letrec") if items.len() >= 3 => {
            if let (Some(p), Some(params)) = (items[1].symbol(), items[2].list()) {
                note(&items[2], p, params.len())?;
            }
        }
        _ => {}
    }
    // The predicate list of `sep-on` names symbols without using them.
    let skip = usize::from(s.head() == Some("sep-on")) + 1;
    for item in items.iter().skip(skip) {
        infer_uses(item, vocab)?;
    }
    Ok(())
}

/// A formula file: optional `(sig …)` declarations followed by one formula.
///
/// Predicates not declared in the file or in `base` get the arity of their
/// uses; a name with no use that fixes its arity is an error.
pub fn parse_formula_document(
    text: &str,
    base: Option<&Vocabulary>,
) -> Result<(Vocabulary, Formula), ParseError> {
    let sexps = read_sexps(text)?;
    let mut vocab = base.cloned().unwrap_or_default();
    let mut formula = None;
    for s in &sexps {
        if s.head() == Some("sig") {
            let declared = read_signature(s)?;
            vocab
                .merge(&declared)
                .map_err(|e| ParseError::syntax(s.pos(), e.to_string()))?;
        } else if formula.is_some() {
            return Err(ParseError::syntax(s.pos(), "more than one formula in file"));
        } else {
            formula = Some(s);
        }
    }
    let Some(formula) = formula else {
        return Err(ParseError::syntax(
            Pos { line: 1, col: 1 },
            "no formula in file",
        ));
    };
    infer_uses(formula, &mut vocab)?;
    let f = FormulaReader { vocab: &vocab }.formula(formula)?;
    Ok((vocab, f))
}

/// The canonical text of a formula (one space between tokens).
pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        let list = |xs: &[String]| xs.join(" ");
        match self {
            True => write!(out, "true"),
            False => write!(out, "false"),
            Eq(a, b) => write!(out, "(= {a} {b})"),
            Atom { pred, args } if args.is_empty() => write!(out, "({pred})"),
            Atom { pred, args } => write!(out, "({pred} {})", list(args)),
            Not(a) => write!(out, "(not {a})"),
            And(a, b) => write!(out, "(and {a} {b})"),
            Or(a, b) => write!(out, "(or {a} {b})"),
            Implies(a, b) => write!(out, "(implies {a} {b})"),
            Iff(a, b) => write!(out, "(iff {a} {b})"),
            Exists { var, body } => write!(out, "(exists {var} {body})"),
            Forall { var, body } => write!(out, "(forall {var} {body})"),
            CountExists {
                at_least,
                var,
                body,
            } => write!(out, "(exists-ge {at_least} {var} {body})"),
            ExistsExactly { count, var, body } => {
                write!(out, "(exists-exactly {count} {var} {body})")
            }
            ExistsSo { pred, body, .. } => write!(out, "(exists2 {pred} {body})"),
            ForallSo { pred, body, .. } => write!(out, "(forall2 {pred} {body})"),
            Sep {
                on: None,
                left,
                right,
            } => write!(out, "(sep {left} {right})"),
            Sep {
                on: Some(on),
                left,
                right,
            } => {
                let names: Vec<&str> = on.iter().collect();
                write!(out, "(sep-on ({}) {left} {right})", names.join(" "))
            }
            Wand(a, b) => write!(out, "(wand {a} {b})"),
            Lfp {
                pred,
                params,
                body,
                args,
            } => write!(
                out,
                "(lfp {pred} ({}) {body} ({}))",
                list(params),
                list(args)
            ),
            LetRec {
                pred,
                params,
                body,
                scope,
            } => write!(out, "(letrec {pred} ({}) {body} {scope})", list(params)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab() -> Vocabulary {
        Vocabulary::of(&[("P", 1), ("Q", 1), ("E", 2), ("Z", 0)]).unwrap()
    }

    #[test]
    fn smallest_formula() {
        assert_eq!(
            parse_formula("(= x x)", &vocab()).unwrap(),
            Formula::eq("x", "x")
        );
        assert_eq!(Formula::eq("x", "x").to_string(), "(= x x)");
        assert_eq!(
            Formula::and(Formula::True, Formula::True).to_string(),
            "(and true true)"
        );
    }

    #[test]
    fn sep_maps_to_full_sigma() {
        let f = parse_formula("(sep (P x) (Q x))", &vocab()).unwrap();
        assert!(matches!(f, Formula::Sep { on: None, .. }));
    }

    #[test]
    fn arity_mismatch_reports_position() {
        let err = parse_formula("(and true\n  (P x y))", &vocab()).unwrap_err();
        assert_eq!(
            err,
            ParseError::Arity {
                pos: Pos { line: 2, col: 3 },
                name: "P".into(),
                expected: 1,
                found: 2
            }
        );
    }

    #[test]
    fn undeclared_predicate() {
        let err = parse_formula("(R x)", &vocab()).unwrap_err();
        assert!(matches!(err, ParseError::Undeclared { name, .. } if name == "R"));
    }

    #[test]
    fn syntax_errors() {
        for bad in [
            "(and true)",
            "(exists X true)",
            "(P x",
            "x",
            "(exists-ge 0 x true)",
            ")",
            "true true",
            "(foo)",
        ] {
            assert!(parse_formula(bad, &vocab()).is_err(), "{bad}");
        }
        assert!(parse_formula("(exists and true)", &vocab()).is_err());
    }

    #[test]
    fn nullary_atoms_and_comments() {
        let f = parse_formula("; leading\n(and (Z) ; inline\n true)", &vocab()).unwrap();
        assert_eq!(f.to_string(), "(and (Z) true)");
    }

    #[test]
    fn all_forms_round_trip() {
        let text = "(and (sep-on (P Q) (exists-ge 2 x (P x)) (exists-exactly 1 y (Q y))) \
                    (and (wand (forall2 P (P x)) (exists2 E (E x y))) \
                    (and (lfp E (a b) (or (E a b) (iff (Z) false)) (x y)) \
                    (letrec P (z) (implies (Q z) (not (= z z))) (forall w (P w))))))";
        let f = parse_formula(text, &vocab()).unwrap();
        assert_eq!(
            f.to_string(),
            text.split_whitespace().collect::<Vec<_>>().join(" ")
        );
        assert_eq!(parse_formula(&f.to_string(), &vocab()).unwrap(), f);
    }

    #[test]
    fn lfp_arity_is_checked() {
        assert!(parse_formula("(lfp E (a) true (x))", &vocab()).is_err());
        assert!(parse_formula("(lfp E (a b) true (x))", &vocab()).is_err());
    }

    #[test]
    fn document_with_inferred_signature() {
        let (v, f) = parse_formula_document("(exists2 R (and (R x y) (S)))", None).unwrap();
        assert_eq!(v.arity("R"), Some(2));
        assert_eq!(v.arity("S"), Some(0));
        assert_eq!(f.to_string(), "(exists2 R (and (R x y) (S)))");
        let (v, _) = parse_formula_document("(sig (P 1))\n(exists2 P true)", None).unwrap();
        assert_eq!(v.arity("P"), Some(1));
        assert!(parse_formula_document("(exists2 P true)", None).is_err());
        assert!(parse_formula_document("(and (P x) (P x y))", None).is_err());
        let (v, _) = parse_formula_document("(sep-on (P Q) (P x) (Q x y))", None).unwrap();
        assert_eq!((v.arity("P"), v.arity("Q")), (Some(1), Some(2)));
    }

    #[test]
    fn signature_round_trip() {
        let v = parse_signature("(sig (P 1) (E 2))").unwrap();
        assert_eq!(print_signature(&v), "(sig (P 1) (E 2))");
        assert!(parse_signature("(sig (P 1) (P 2))").is_err());
    }
}
