//! Recursive-descent parser for expression files.
//!
//! ```text
//! file   := header? stmt (separator stmt)*
//! header := "vars:" ident+ newline
//! expr   := and ("|" and)*
//! and    := not ("&" not)*
//! not    := "!" not | atom
//! atom   := ident | "0" | "1" | "(" expr ")"
//! ```
//!
//! `#` starts a comment running to the end of the line. Statements are separated
//! by newlines or `;`; blank statements are skipped.

use super::{Expression, ExpressionSet, VariableUniverse};
use crate::error::{Error, ParseError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Const(bool),
    Not,
    And,
    Or,
    LParen,
    RParen,
    Colon,
    Newline,
    Semicolon,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line: l, column: col });
        chars.next();
        column += 1;
        match c {
            '\n' => {
                push(&mut out, Tok::Newline);
                line += 1;
                column = 1;
            }
            c if c.is_whitespace() => {}
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    column += 1;
                }
            }
            '!' => push(&mut out, Tok::Not),
            '&' => push(&mut out, Tok::And),
            '|' => push(&mut out, Tok::Or),
            '(' => push(&mut out, Tok::LParen),
            ')' => push(&mut out, Tok::RParen),
            ':' => push(&mut out, Tok::Colon),
            ';' => push(&mut out, Tok::Semicolon),
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut word = c.to_string();
                while let Some(&d) = chars.peek() {
                    if !(d.is_ascii_alphanumeric() || d == '_') {
                        break;
                    }
                    word.push(d);
                    chars.next();
                    column += 1;
                }
                let tok = match word.as_str() {
                    "0" => Tok::Const(false),
                    "1" => Tok::Const(true),
                    w if super::is_identifier(w) => Tok::Ident(word),
                    _ => {
                        return Err(ParseError {
                            line: l,
                            column: col,
                            message: format!("invalid token `{word}`"),
                        })
                    }
                };
                push(&mut out, tok);
            }
            other => {
                return Err(ParseError {
                    line: l,
                    column: col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    out.push(Token { tok: Tok::Eof, line, column });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    universe: VariableUniverse,
    declared: bool,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, t: &Token, message: impl Into<String>) -> Error {
        Error::Parse(ParseError { line: t.line, column: t.column, message: message.into() })
    }

    fn skip_separators(&mut self) {
        while matches!(self.peek().tok, Tok::Newline | Tok::Semicolon) {
            self.bump();
        }
    }

    fn header(&mut self) -> Result<()> {
        self.skip_separators();
        let is_header = matches!(&self.peek().tok, Tok::Ident(w) if w == "vars")
            && self.tokens.get(self.pos + 1).map(|t| &t.tok) == Some(&Tok::Colon);
        if !is_header {
            return Ok(());
        }
        self.pos += 2;
        self.declared = true;
        let mut count = 0;
        loop {
            let t = self.bump();
            match t.tok {
                Tok::Ident(name) => {
                    if self.universe.lookup(&name).is_some() {
                        return Err(Error::DuplicateVariable(name));
                    }
                    self.universe.push(name)?;
                    count += 1;
                }
                Tok::Newline | Tok::Eof if count > 0 => return Ok(()),
                _ => return Err(self.error(&t, "expected a variable name in `vars:` header")),
            }
        }
    }

    fn expr(&mut self) -> Result<Expression> {
        let mut children = vec![self.and()?];
        while self.peek().tok == Tok::Or {
            self.bump();
            children.push(self.and()?);
        }
        Ok(Expression::or(children))
    }

    fn and(&mut self) -> Result<Expression> {
        let mut children = vec![self.not()?];
        while self.peek().tok == Tok::And {
            self.bump();
            children.push(self.not()?);
        }
        Ok(Expression::and(children))
    }

    fn not(&mut self) -> Result<Expression> {
        if self.peek().tok == Tok::Not {
            self.bump();
            return Ok(Expression::not(self.not()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expression> {
        let t = self.bump();
        match t.tok {
            Tok::Const(b) => Ok(Expression::Const(b)),
            Tok::Ident(ref name) => {
                let v = match self.universe.lookup(name) {
                    Some(v) => v,
                    None if self.declared => {
                        return Err(self.error(&t, format!("undeclared variable `{name}`")))
                    }
                    None => self.universe.push(name.clone())?,
                };
                Ok(Expression::Var(v))
            }
            Tok::LParen => {
                let e = self.expr()?;
                let close = self.bump();
                if close.tok != Tok::RParen {
                    return Err(self.error(&close, "expected `)`"));
                }
                Ok(e)
            }
            _ => Err(self.error(&t, "expected a variable, constant, `!` or `(`")),
        }
    }
}

pub(super) fn parse_expressions(text: &str) -> Result<ExpressionSet> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0, universe: VariableUniverse::default(), declared: false };
    p.header()?;
    let mut members = Vec::new();
    loop {
        p.skip_separators();
        if p.peek().tok == Tok::Eof {
            break;
        }
        members.push(p.expr()?);
        let t = p.peek().clone();
        match t.tok {
            Tok::Newline | Tok::Semicolon | Tok::Eof => {}
            _ => return Err(p.error(&t, "expected end of statement")),
        }
    }
    if members.is_empty() {
        return Err(Error::EmptyInput);
    }
    ExpressionSet::new(p.universe, members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolexpr::{Valuation, Var};
    use proptest::prelude::*;

    #[test]
    fn header_and_members() {
        let s = parse_expressions("vars: w x y z\n(w&x)|(x&y)|(y&z)").unwrap();
        assert_eq!(s.n(), 4);
        assert_eq!(s.members().len(), 1);

        let s = parse_expressions("x&y\nx|z").unwrap();
        assert_eq!(s.universe().names().collect::<Vec<_>>(), ["x", "y", "z"]);
        assert_eq!(s.members().len(), 2);

        let s = parse_expressions("1").unwrap();
        assert_eq!(s.n(), 0);
        assert_eq!(s.members(), &[Expression::Const(true)]);
    }

    #[test]
    fn precedence_not_and_or() {
        let s = parse_expressions("!a & b | c").unwrap();
        assert_eq!(s.members()[0].display(s.universe()).to_string(), "((!a & b) | c)");
    }

    #[test]
    fn comments_and_semicolons() {
        let s = parse_expressions("# two members\nvars: a b c\na & b ; c # trailing\n\n").unwrap();
        assert_eq!(s.members().len(), 2);
        assert_eq!(s.n(), 3);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_expressions(""), Err(Error::EmptyInput)));
        assert!(matches!(parse_expressions("# nothing\n\n"), Err(Error::EmptyInput)));
        assert!(matches!(parse_expressions("vars: x x\nx"), Err(Error::DuplicateVariable(_))));
        match parse_expressions("a &\nb") {
            Err(Error::Parse(e)) => assert_eq!((e.line, e.column), (1, 4)),
            other => panic!("{other:?}"),
        }
        match parse_expressions("vars: a\na | b") {
            Err(Error::Parse(e)) => assert_eq!((e.line, e.column), (2, 5)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expressions("(a | b"), Err(Error::Parse(_))));
        assert!(matches!(parse_expressions("a $ b"), Err(Error::Parse(_))));
        assert!(matches!(parse_expressions("2"), Err(Error::Parse(_))));
    }

    fn arb_expr(vars: usize) -> impl Strategy<Value = Expression> {
        let leaf = prop_oneof![
            any::<bool>().prop_map(Expression::Const),
            (0..vars).prop_map(|i| Expression::Var(Var::new(i))),
        ];
        leaf.prop_recursive(4, 24, 4, |inner| {
            prop_oneof![
                inner.clone().prop_map(Expression::not),
                prop::collection::vec(inner.clone(), 2..4).prop_map(Expression::And),
                prop::collection::vec(inner, 2..4).prop_map(Expression::Or),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_is_identity(members in prop::collection::vec(arb_expr(5), 1..4)) {
            let universe = VariableUniverse::new(["a", "b", "c", "d", "e"]).unwrap();
            let s = ExpressionSet::new(universe, members).unwrap();
            let back = parse_expressions(&s.to_text()).unwrap();
            prop_assert_eq!(back.universe(), s.universe());
            for (a, b) in s.members().iter().zip(back.members()) {
                for bits in 0..32 {
                    let v = Valuation::from_bits(5, bits);
                    prop_assert_eq!(a.evaluate(&v), b.evaluate(&v));
                }
            }
            prop_assert_eq!(back, s);
        }
    }
}
