//! Randomisation-object expressions.
//!
//! ```text
//! label  := NAME '=' arrow | arrow
//! arrow  := within (ARROW within)?
//! within := indep ('[' label ']')*
//! indep  := comb (OTIMES comb)*
//! comb   := atom (WEDGE atom)*
//! atom   := NAME | '{' label '}'
//! ```
//!
//! `^` and `∧` both combine, `⊗` and `(x)` both mean independent
//! permutation, `→` and `->` both draw an arrow. A postfix `[..]` applies to
//! everything before it at its level, so `A^B[C]` is `{A∧B}[C]`.
//! Names may be abbreviated to any unique case-insensitive prefix of a
//! factor name; `Mean` is reserved.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FactorRef {
    pub index: usize,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RandExpr {
    Mean,
    Base(FactorRef),
    /// `A∧B∧…`
    Combine(Vec<RandExpr>),
    /// `A⊗B⊗…`
    Independent(Vec<RandExpr>),
    /// `inner[context]`
    Within {
        inner: Box<RandExpr>,
        context: Box<RandExpr>,
    },
    /// `name=inner`
    Alias {
        name: FactorRef,
        inner: Box<RandExpr>,
    },
    /// `source→target`
    Randomised {
        source: Box<RandExpr>,
        target: Box<RandExpr>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("unknown factor `{0}`")]
    UnknownName(String),
    #[error("`{name}` matches several factors: {candidates}")]
    AmbiguousName { name: String, candidates: String },
    #[error("unbalanced `{0}`")]
    Unbalanced(char),
    #[error("missing operand {0}")]
    EmptyOperand(String),
    #[error("unexpected `{found}` at position {position}")]
    Unexpected { found: String, position: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    Wedge,
    Otimes,
    Arrow,
    Eq,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Name(n) => n.clone(),
            Tok::Wedge => "∧".into(),
            Tok::Otimes => "⊗".into(),
            Tok::Arrow => "→".into(),
            Tok::Eq => "=".into(),
            Tok::LBracket => "[".into(),
            Tok::RBracket => "]".into(),
            Tok::LBrace => "{".into(),
            Tok::RBrace => "}".into(),
        }
    }
}

fn is_name_char(c: char) -> bool {
    !c.is_whitespace() && !"^∧⊗→[]{}=()".contains(c) && c != '-'
}

fn tokenize(s: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '^' | '∧' => Tok::Wedge,
            '⊗' => Tok::Otimes,
            '→' => Tok::Arrow,
            '=' => Tok::Eq,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' if chars.get(i + 1..i + 3) == Some(&['x', ')']) || chars.get(i + 1..i + 3) == Some(&['X', ')']) => {
                i += 2;
                Tok::Otimes
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Tok::Arrow
            }
            c if is_name_char(c) => {
                while i + 1 < chars.len() && is_name_char(chars[i + 1]) {
                    i += 1;
                }
                Tok::Name(chars[start..=i].iter().collect())
            }
            other => {
                return Err(ParseError::Unexpected {
                    found: other.to_string(),
                    position: start,
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    Ok(out)
}

/// Matches `name` against the factor names: exact, then case-insensitive,
/// then unique case-insensitive prefix.
pub fn resolve_factor_name(name: &str, factors: &[String]) -> Result<usize, ParseError> {
    if let Some(i) = factors.iter().position(|f| f == name) {
        return Ok(i);
    }
    let lower = name.to_lowercase();
    let exact: Vec<usize> = (0..factors.len())
        .filter(|&i| factors[i].to_lowercase() == lower)
        .collect();
    if exact.len() == 1 {
        return Ok(exact[0]);
    }
    let prefixed: Vec<usize> = (0..factors.len())
        .filter(|&i| factors[i].to_lowercase().starts_with(&lower))
        .collect();
    match prefixed.len() {
        1 => Ok(prefixed[0]),
        0 => Err(ParseError::UnknownName(name.to_string())),
        _ => Err(ParseError::AmbiguousName {
            name: name.to_string(),
            candidates: prefixed
                .iter()
                .map(|&i| factors[i].as_str())
                .collect::<Vec<_>>()
                .join(", "),
        }),
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    factors: &'a [String],
    len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn unexpected(&self) -> ParseError {
        match self.toks.get(self.pos) {
            Some((Tok::RBracket, _)) => ParseError::Unbalanced(']'),
            Some((Tok::RBrace, _)) => ParseError::Unbalanced('}'),
            Some((t, p)) => ParseError::Unexpected {
                found: t.text(),
                position: *p,
            },
            None => ParseError::Unexpected {
                found: "end of input".into(),
                position: self.len,
            },
        }
    }

    fn operand_error(&self, after: &str) -> ParseError {
        ParseError::EmptyOperand(after.to_string())
    }

    fn factor(&self, name: &str) -> Result<FactorRef, ParseError> {
        let index = resolve_factor_name(name, self.factors)?;
        Ok(FactorRef {
            index,
            name: self.factors[index].clone(),
        })
    }

    fn label(&mut self) -> Result<RandExpr, ParseError> {
        if let (Some((Tok::Name(n), _)), Some((Tok::Eq, _))) = (self.toks.get(self.pos), self.toks.get(self.pos + 1)) {
            let name = self.factor(&n.clone())?;
            self.pos += 2;
            if self.at_operand_end() {
                return Err(self.operand_error("after `=`"));
            }
            let inner = self.arrow()?;
            return Ok(RandExpr::Alias {
                name,
                inner: Box::new(inner),
            });
        }
        self.arrow()
    }

    fn at_operand_end(&self) -> bool {
        matches!(
            self.peek(),
            None | Some(Tok::RBracket | Tok::RBrace | Tok::Wedge | Tok::Otimes | Tok::Arrow | Tok::Eq | Tok::LBracket)
        )
    }

    fn arrow(&mut self) -> Result<RandExpr, ParseError> {
        let source = self.within()?;
        if self.eat(&Tok::Arrow) {
            if self.at_operand_end() {
                return Err(self.operand_error("after `→`"));
            }
            let target = self.within()?;
            return Ok(RandExpr::Randomised {
                source: Box::new(source),
                target: Box::new(target),
            });
        }
        Ok(source)
    }

    fn within(&mut self) -> Result<RandExpr, ParseError> {
        let mut expr = self.indep()?;
        while self.eat(&Tok::LBracket) {
            if self.peek() == Some(&Tok::RBracket) {
                return Err(self.operand_error("inside `[]`"));
            }
            if self.peek().is_none() {
                return Err(ParseError::Unbalanced('['));
            }
            let context = self.label()?;
            if !self.eat(&Tok::RBracket) {
                return Err(if self.peek().is_none() {
                    ParseError::Unbalanced('[')
                } else {
                    self.unexpected()
                });
            }
            expr = RandExpr::Within {
                inner: Box::new(expr),
                context: Box::new(context),
            };
        }
        Ok(expr)
    }

    fn indep(&mut self) -> Result<RandExpr, ParseError> {
        let mut parts = vec![self.comb()?];
        while self.eat(&Tok::Otimes) {
            if self.at_operand_end() {
                return Err(self.operand_error("after `⊗`"));
            }
            parts.push(self.comb()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            RandExpr::Independent(parts)
        })
    }

    fn comb(&mut self) -> Result<RandExpr, ParseError> {
        let mut parts = vec![self.atom()?];
        while self.eat(&Tok::Wedge) {
            if self.at_operand_end() {
                return Err(self.operand_error("after `∧`"));
            }
            parts.push(self.atom()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            RandExpr::Combine(parts)
        })
    }

    fn atom(&mut self) -> Result<RandExpr, ParseError> {
        match self.toks.get(self.pos).cloned() {
            Some((Tok::Name(n), _)) => {
                self.pos += 1;
                if n == "Mean" && !self.factors.iter().any(|f| f == "Mean") {
                    return Ok(RandExpr::Mean);
                }
                Ok(RandExpr::Base(self.factor(&n)?))
            }
            Some((Tok::LBrace, _)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::RBrace) {
                    return Err(self.operand_error("inside `{}`"));
                }
                if self.peek().is_none() {
                    return Err(ParseError::Unbalanced('{'));
                }
                let inner = self.label()?;
                if !self.eat(&Tok::RBrace) {
                    return Err(if self.peek().is_none() {
                        ParseError::Unbalanced('{')
                    } else {
                        self.unexpected()
                    });
                }
                Ok(inner)
            }
            None => Err(if self.pos == 0 {
                ParseError::Empty
            } else {
                self.operand_error("at end of input")
            }),
            _ => Err(if self.pos == 0 {
                match self.peek() {
                    Some(Tok::RBracket) => ParseError::Unbalanced(']'),
                    Some(Tok::RBrace) => ParseError::Unbalanced('}'),
                    _ => self.operand_error("at start of expression"),
                }
            } else {
                self.unexpected()
            }),
        }
    }
}

/// Parses a randomisation label, resolving names against `factors`.
pub fn parse_rand_expr(label: &str, factors: &[String]) -> Result<RandExpr, ParseError> {
    let toks = tokenize(label)?;
    if toks.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut p = Parser {
        toks,
        pos: 0,
        factors,
        len: label.chars().count(),
    };
    let expr = p.label()?;
    if p.pos < p.toks.len() {
        return Err(p.unexpected());
    }
    Ok(expr)
}

impl RandExpr {
    /// Indices of every factor named in the expression.
    pub fn factor_indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect(&self, out: &mut Vec<usize>) {
        match self {
            RandExpr::Mean => {}
            RandExpr::Base(f) => out.push(f.index),
            RandExpr::Combine(v) | RandExpr::Independent(v) => v.iter().for_each(|e| e.collect(out)),
            RandExpr::Within { inner, context } => {
                inner.collect(out);
                context.collect(out);
            }
            RandExpr::Alias { name, inner } => {
                out.push(name.index);
                inner.collect(out);
            }
            RandExpr::Randomised { source, target } => {
                source.collect(out);
                target.collect(out);
            }
        }
    }

    fn is_flat_group(&self) -> Option<&[RandExpr]> {
        match self {
            RandExpr::Combine(v) | RandExpr::Independent(v) if v.iter().all(|e| matches!(e, RandExpr::Base(_))) => {
                Some(v)
            }
            _ => None,
        }
    }

    /// Same operator as `self`, over `parts`; a single part stands alone.
    fn regroup(&self, parts: Vec<RandExpr>) -> RandExpr {
        if parts.len() == 1 {
            return parts.into_iter().next().expect("one part");
        }
        match self {
            RandExpr::Independent(_) => RandExpr::Independent(parts),
            _ => RandExpr::Combine(parts),
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, needs_braces: bool) -> fmt::Result {
        if needs_braces {
            write!(f, "{{{self}}}")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Proper nonempty sub-selections of `items`, in index order, smaller first.
fn proper_subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    let n = items.len();
    let mut masks: Vec<u32> = (1..(1u32 << n) - 1).collect();
    masks.sort_by_key(|m| (m.count_ones(), std::cmp::Reverse(m.reverse_bits())));
    masks
        .into_iter()
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| items[i].clone()).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unsupported expression `{0}`: randomisation-nesting is only defined for the standard forms")]
pub struct UnsupportedExpr(pub String);

/// Randomisation objects that randomisation-nest `expr`.
pub fn rand_nest_set(expr: &RandExpr) -> Result<Vec<RandExpr>, UnsupportedExpr> {
    let mut out = match expr {
        RandExpr::Mean => Vec::new(),
        RandExpr::Base(_) => vec![RandExpr::Mean],
        RandExpr::Combine(_) | RandExpr::Independent(_) => {
            if let Some(parts) = expr.is_flat_group() {
                let mut v = vec![RandExpr::Mean];
                v.extend(proper_subsets(parts).into_iter().map(|s| expr.regroup(s)));
                v
            } else if let RandExpr::Independent(parts) = expr {
                independent_with_within(parts).ok_or_else(|| UnsupportedExpr(expr.to_string()))?
            } else {
                return Err(UnsupportedExpr(expr.to_string()));
            }
        }
        RandExpr::Within { inner, context } => match (&**inner, &**context) {
            (RandExpr::Base(_), ctx) if matches!(ctx, RandExpr::Base(_)) || ctx.is_flat_group().is_some() => {
                let mut v = vec![RandExpr::Mean, ctx.clone()];
                v.extend(rand_nest_set(ctx)?);
                v
            }
            (group, RandExpr::Base(_)) if group.is_flat_group().is_some() => {
                let parts = group.is_flat_group().expect("checked");
                let mut v = vec![RandExpr::Mean];
                v.extend(proper_subsets(parts).into_iter().map(|s| RandExpr::Within {
                    inner: Box::new(group.regroup(s)),
                    context: context.clone(),
                }));
                v.push((**context).clone());
                v
            }
            _ => return Err(UnsupportedExpr(expr.to_string())),
        },
        RandExpr::Alias { inner, .. } => rand_nest_set(inner)?,
        RandExpr::Randomised { target, .. } => rand_nest_set(target)?,
    };
    let mut seen = Vec::new();
    out.retain(|e| {
        if seen.contains(e) {
            false
        } else {
            seen.push(e.clone());
            true
        }
    });
    Ok(out)
}

/// `A ⊗ {B[C]}` in either order.
fn independent_with_within(parts: &[RandExpr]) -> Option<Vec<RandExpr>> {
    let [x, y] = parts else { return None };
    let (a, b, c) = match (x, y) {
        (RandExpr::Base(_), RandExpr::Within { inner, context })
        | (RandExpr::Within { inner, context }, RandExpr::Base(_)) => {
            let a = if matches!(x, RandExpr::Base(_)) { x } else { y };
            (a, &**inner, &**context)
        }
        _ => return None,
    };
    if !matches!(b, RandExpr::Base(_)) || !matches!(c, RandExpr::Base(_)) {
        return None;
    }
    Some(vec![
        RandExpr::Mean,
        RandExpr::Independent(vec![a.clone(), c.clone()]),
        RandExpr::Within {
            inner: Box::new(b.clone()),
            context: Box::new(c.clone()),
        },
        a.clone(),
        c.clone(),
    ])
}

impl fmt::Display for RandExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use RandExpr::*;
        match self {
            Mean => f.write_str("Mean"),
            Base(r) => f.write_str(&r.name),
            Combine(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str("∧")?;
                    }
                    p.write_child(f, !matches!(p, Mean | Base(_)))?;
                }
                Ok(())
            }
            Independent(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ⊗ ")?;
                    }
                    p.write_child(f, !matches!(p, Mean | Base(_) | Combine(_)))?;
                }
                Ok(())
            }
            Within { inner, context } => {
                inner.write_child(f, matches!(**inner, Independent(_) | Alias { .. } | Randomised { .. }))?;
                f.write_str("[")?;
                context.write_child(f, matches!(**context, Alias { .. } | Randomised { .. }))?;
                f.write_str("]")
            }
            Alias { name, inner } => {
                write!(f, "{}=", name.name)?;
                inner.write_child(f, matches!(**inner, Alias { .. }))
            }
            Randomised { source, target } => {
                source.write_child(f, matches!(**source, Alias { .. } | Randomised { .. }))?;
                f.write_str(" → ")?;
                target.write_child(f, matches!(**target, Alias { .. } | Randomised { .. }))
            }
        }
    }
}
