use super::lexer::{tokenize, Tok, Token};
use super::{BinaryOp, EmbeddingMap, Expr, ExprKind, Function, Interval, ParseError, Position, Signature, Span};
use crate::jet::MAX_VARS;

const MAX_DEPTH: usize = 256;

/// Parses and validates a complete embedding description.
pub fn parse_embedding(source: &str) -> Result<EmbeddingMap, ParseError> {
    let tokens = tokenize(source)?;
    let mut parser = Parser { source, tokens, pos: 0, vars: Vec::new(), depth: 0 };
    parser.embedding()
}

/// Byte-level entry point: invalid UTF-8 is reported as a positioned syntax error.
pub fn parse_embedding_bytes(bytes: &[u8]) -> Result<EmbeddingMap, ParseError> {
    match std::str::from_utf8(bytes) {
        Ok(source) => parse_embedding(source),
        Err(e) => {
            let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).unwrap_or("");
            Err(ParseError::Syntax {
                position: Position::locate(valid, e.valid_up_to()),
                message: "invalid UTF-8".into(),
            })
        }
    }
}

/// Parses a standalone expression over the given variable names.
pub fn parse_expression(source: &str, variables: &[&str]) -> Result<Expr, ParseError> {
    let tokens = tokenize(source)?;
    let vars = variables.iter().map(|v| v.to_string()).collect();
    let mut parser = Parser { source, tokens, pos: 0, vars, depth: 0 };
    let expr = parser.expr()?;
    parser.expect(&Tok::Eof, "end of expression")?;
    Ok(expr)
}

struct Parser<'a> {
    source: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    vars: Vec<String>,
    depth: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn position(&self, offset: usize) -> Position {
        Position::locate(self.source, offset)
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { position: self.position(self.span().start), message: message.into() })
    }

    fn unexpected<T>(&self, expected: &str) -> Result<T, ParseError> {
        self.syntax(format!("expected {expected}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: &Tok, expected: &str) -> Result<Token, ParseError> {
        if self.peek() == tok {
            Ok(self.bump())
        } else {
            self.unexpected(expected)
        }
    }

    fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == word => {
                self.bump();
                Ok(())
            }
            _ => self.unexpected(&format!("`{word}`")),
        }
    }

    fn embedding(&mut self) -> Result<EmbeddingMap, ParseError> {
        self.keyword("embedding")?;
        let name = match self.peek() {
            Tok::Str(s) => s.clone(),
            _ => return self.unexpected("embedding name string"),
        };
        self.bump();
        self.expect(&Tok::LBrace, "`{`")?;

        self.keyword("chart")?;
        let mut domain = Vec::new();
        loop {
            let var = match self.peek() {
                Tok::Ident(s) => s.clone(),
                _ => return self.unexpected("chart variable name"),
            };
            if Function::from_name(&var).is_some() || is_keyword(&var) {
                return self.syntax(format!("`{var}` is reserved and cannot name a variable"));
            }
            if self.vars.contains(&var) {
                return self.syntax(format!("duplicate chart variable `{var}`"));
            }
            self.bump();
            self.keyword("in")?;
            self.expect(&Tok::LParen, "`(`")?;
            let lo = self.signed_number()?;
            self.expect(&Tok::Comma, "`,`")?;
            let hi = self.signed_number()?;
            self.expect(&Tok::RParen, "`)`")?;
            if !lo.is_finite() || !hi.is_finite() {
                return Err(ParseError::Domain { variable: var, message: "interval must be finite".into() });
            }
            if lo >= hi {
                return Err(ParseError::Domain { variable: var, message: format!("interval ({lo}, {hi}) is empty") });
            }
            self.vars.push(var);
            domain.push(Interval { lo, hi });
            if self.peek() == &Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(&Tok::Semi, "`;` after chart declaration")?;
        if self.vars.len() > MAX_VARS {
            return Err(ParseError::Dimension(format!(
                "chart dimension {} exceeds the supported maximum {MAX_VARS}",
                self.vars.len()
            )));
        }

        self.keyword("ambient")?;
        self.keyword("signature")?;
        self.expect(&Tok::LParen, "`(`")?;
        let mut signs = Vec::new();
        loop {
            match self.peek() {
                Tok::Plus => signs.push(1),
                Tok::Minus => signs.push(-1),
                _ => return self.unexpected("`+` or `-`"),
            }
            self.bump();
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RParen => {
                    self.bump();
                    break;
                }
                _ => return self.unexpected("`,` or `)`"),
            }
        }
        self.expect(&Tok::Semi, "`;` after signature")?;

        self.keyword("map")?;
        let mut components = Vec::new();
        loop {
            components.push(self.expr()?);
            self.expect(&Tok::Semi, "`;` after map component")?;
            if self.peek() == &Tok::RBrace {
                break;
            }
        }
        self.expect(&Tok::RBrace, "`}`")?;
        self.expect(&Tok::Eof, "end of input")?;

        let signature = Signature::new(signs)?;
        let n = self.vars.len();
        if components.len() != signature.len() {
            return Err(ParseError::Dimension(format!(
                "{} map components but the signature has {} entries",
                components.len(),
                signature.len()
            )));
        }
        if components.len() <= n {
            return Err(ParseError::Dimension(format!(
                "ambient dimension {} must exceed chart dimension {n}",
                components.len()
            )));
        }
        Ok(EmbeddingMap { name, variables: std::mem::take(&mut self.vars), domain, signature, components })
    }

    fn signed_number(&mut self) -> Result<f64, ParseError> {
        let sign = match self.peek() {
            Tok::Minus => {
                self.bump();
                -1.0
            }
            Tok::Plus => {
                self.bump();
                1.0
            }
            _ => 1.0,
        };
        match *self.peek() {
            Tok::Number(x) => {
                self.bump();
                Ok(sign * x)
            }
            _ => self.unexpected("number"),
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.syntax("expression nested too deeply");
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = binary(op, lhs, rhs);
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == &Tok::Minus {
            self.enter()?;
            let start = self.bump().span.start;
            let operand = self.unary()?;
            self.depth -= 1;
            let span = Span { start, end: operand.span.end };
            return Ok(Expr::new(ExprKind::Neg(Box::new(operand)), span));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek() != &Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let (exponent, end) = self.exponent()?;
        let span = Span { start: base.span.start, end };
        Ok(Expr::new(ExprKind::Pow(Box::new(base), exponent), span))
    }

    /// A constant exponent: `[-]number`, optionally parenthesized, and
    /// right-associative chains of those (folded to one constant).
    fn exponent(&mut self) -> Result<(f64, usize), ParseError> {
        self.enter()?;
        let parenthesized = self.peek() == &Tok::LParen;
        if parenthesized {
            self.bump();
        }
        let negative = self.peek() == &Tok::Minus;
        if negative {
            self.bump();
        }
        let value = match *self.peek() {
            Tok::Number(x) if x.is_finite() => x,
            Tok::Number(_) => return self.syntax("numeric literal out of range"),
            _ => return self.syntax("exponent must be a numeric constant"),
        };
        let mut end = self.bump().span.end;
        let mut value = if negative { -value } else { value };
        if parenthesized {
            end = self.expect(&Tok::RParen, "`)` closing the exponent")?.span.end;
        }
        if self.peek() == &Tok::Caret {
            self.bump();
            let (rest, rest_end) = self.exponent()?;
            value = value.powf(rest);
            end = rest_end;
        }
        self.depth -= 1;
        Ok((value, end))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Number(x) => {
                if !x.is_finite() {
                    return self.syntax("numeric literal out of range");
                }
                self.bump();
                Ok(Expr::new(ExprKind::Const(x), span))
            }
            Tok::Ident(name) => {
                self.bump();
                if self.peek() == &Tok::LParen {
                    let Some(func) = Function::from_name(&name) else {
                        return Err(ParseError::UnknownIdentifier { name, position: self.position(span.start) });
                    };
                    self.bump();
                    let arg = self.expr()?;
                    let end = self.expect(&Tok::RParen, "`)` closing the argument")?.span.end;
                    return Ok(Expr::new(ExprKind::Call(func, Box::new(arg)), Span { start: span.start, end }));
                }
                if let Some(index) = self.vars.iter().position(|v| *v == name) {
                    return Ok(Expr::new(ExprKind::Var(index), span));
                }
                if Function::from_name(&name).is_some() {
                    return Err(ParseError::Syntax {
                        position: self.position(span.end),
                        message: format!("expected `(` after function `{name}`"),
                    });
                }
                Err(ParseError::UnknownIdentifier { name, position: self.position(span.start) })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => self.unexpected("expression"),
        }
    }
}

fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
    let span = Span { start: lhs.span.start, end: rhs.span.end };
    Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span)
}

fn is_keyword(word: &str) -> bool {
    matches!(word, "embedding" | "chart" | "in" | "ambient" | "signature" | "map")
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPHERE: &str = r#"
        embedding "sphere" {
          chart theta in (0.1, 3.0), phi in (-3, 3);   # polar chart
          ambient signature (+, +, +);
          map sin(theta)*cos(phi); sin(theta)*sin(phi); cos(theta);
        }
    "#;

    #[test]
    fn parses_sphere() {
        let map = parse_embedding(SPHERE).unwrap();
        assert_eq!(map.name, "sphere");
        assert_eq!((map.n(), map.dim()), (2, 3));
        assert_eq!(map.variables, vec!["theta", "phi"]);
        assert_eq!(map.domain[1], Interval { lo: -3.0, hi: 3.0 });
        assert_eq!(map.signature.p(), 3);
    }

    #[test]
    fn rejects_square_system() {
        let src = r#"embedding "x" { chart u in (0,1), v in (0,1); ambient signature (+,+); map u; v; }"#;
        assert!(matches!(parse_embedding(src), Err(ParseError::Dimension(_))));
    }

    #[test]
    fn rejects_count_mismatch() {
        let src = r#"embedding "x" { chart u in (0,1); ambient signature (+,+,+); map u; u; }"#;
        assert!(matches!(parse_embedding(src), Err(ParseError::Dimension(_))));
    }

    #[test]
    fn unknown_variable_is_located() {
        let src = r#"embedding "x" { chart theta in (0,1); ambient signature (+,+);
map sin(theta)*cos(fi); 1; }"#;
        match parse_embedding(src) {
            Err(ParseError::UnknownIdentifier { name, position }) => {
                assert_eq!(name, "fi");
                assert_eq!((position.line, position.column), (2, 20));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_function() {
        let src = r#"embedding "x" { chart u in (0,1); ambient signature (+,+); map tan(u); u; }"#;
        assert!(matches!(parse_embedding(src), Err(ParseError::UnknownIdentifier { name, .. }) if name == "tan"));
    }

    #[test]
    fn domain_errors() {
        let empty = r#"embedding "x" { chart u in (1, 1); ambient signature (+,+); map u; u; }"#;
        assert!(matches!(parse_embedding(empty), Err(ParseError::Domain { .. })));
        let inf = r#"embedding "x" { chart u in (0, 1e400); ambient signature (+,+); map u; u; }"#;
        assert!(matches!(parse_embedding(inf), Err(ParseError::Domain { .. })));
    }

    #[test]
    fn precedence_and_associativity() {
        let vars = ["x", "y"];
        let p = |s: &str| parse_expression(s, &vars).unwrap();
        // pow binds tighter than unary minus
        assert_eq!(p("-x^2"), p("-(x^2)"));
        // unary minus binds tighter than multiplication
        assert_eq!(p("-x*y"), p("(-x)*y"));
        assert_eq!(p("x - y - 1"), p("(x - y) - 1"));
        assert_eq!(p("x / y * 2"), p("(x / y) * 2"));
        // right-associative constant exponent chain
        assert_eq!(p("x^2^3").kind, p("x^8").kind);
        assert_eq!(p("x^-2"), p("x^(-2)"));
    }

    #[test]
    fn exponent_must_be_constant() {
        let err = parse_expression("x^y", &["x", "y"]).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { message, .. } if message.contains("constant")));
    }

    #[test]
    fn syntax_errors_are_positioned() {
        for src in ["", "embedding", "embedding \"a\" {", "embedding \"a\" { chart ; }"] {
            assert!(matches!(parse_embedding(src), Err(ParseError::Syntax { .. })), "{src}");
        }
        let deep = format!("{}x{}", "(".repeat(5000), ")".repeat(5000));
        assert!(matches!(parse_expression(&deep, &["x"]), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_embedding_bytes(b"embed\xffding"), Err(ParseError::Syntax { .. })));
    }
}
