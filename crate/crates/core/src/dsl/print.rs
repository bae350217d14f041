use std::fmt::{self, Display, Formatter};

use super::{EmbeddingMap, Expr, ExprKind};

/// Displays an expression using the given variable names.
pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    variables: &'a [String],
}

impl Expr {
    pub fn display<'a>(&'a self, variables: &'a [String]) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, variables }
    }
}

fn is_atom(e: &Expr) -> bool {
    matches!(e.kind, ExprKind::Const(_) | ExprKind::Var(_) | ExprKind::Call(..))
}

// `{:?}` on f64 prints the shortest representation that reads back exactly.
fn number(f: &mut Formatter<'_>, x: f64) -> fmt::Result {
    write!(f, "{x:?}")
}

impl Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let vars = self.variables;
        let wrapped = |f: &mut Formatter<'_>, e: &Expr| {
            if is_atom(e) {
                write!(f, "{}", e.display(vars))
            } else {
                write!(f, "({})", e.display(vars))
            }
        };
        match &self.expr.kind {
            ExprKind::Const(c) if *c < 0.0 || c.is_sign_negative() => {
                f.write_str("(")?;
                number(f, *c)?;
                f.write_str(")")
            }
            ExprKind::Const(c) => number(f, *c),
            ExprKind::Var(i) => f.write_str(&self.variables[*i]),
            ExprKind::Neg(e) => {
                f.write_str("-")?;
                wrapped(f, e)
            }
            ExprKind::Call(func, e) => write!(f, "{}({})", func.name(), e.display(vars)),
            ExprKind::Binary(op, a, b) => {
                wrapped(f, a)?;
                write!(f, " {} ", op.symbol())?;
                wrapped(f, b)
            }
            ExprKind::Pow(base, e) => {
                wrapped(f, base)?;
                f.write_str("^")?;
                number(f, *e)
            }
        }
    }
}

impl Display for EmbeddingMap {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let name = self.name.replace('\\', "\\\\").replace('"', "\\\"");
        writeln!(f, "embedding \"{name}\" {{")?;
        f.write_str("  chart ")?;
        for (i, (var, iv)) in self.variables.iter().zip(&self.domain).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{var} in ({:?}, {:?})", iv.lo, iv.hi)?;
        }
        f.write_str(";\n  ambient signature (")?;
        for (i, s) in self.signature.signs().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(if *s > 0 { "+" } else { "-" })?;
        }
        f.write_str(");\n  map\n")?;
        for c in &self.components {
            writeln!(f, "    {};", c.display(&self.variables))?;
        }
        f.write_str("}\n")
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_embedding, parse_expression};

    #[test]
    fn prints_readable_expressions() {
        let vars = vec!["x".to_string(), "y".to_string()];
        let e = parse_expression("-x^2 + sin(x*y)/(1 - y)", &["x", "y"]).unwrap();
        assert_eq!(e.display(&vars).to_string(), "(-(x^2.0)) + (sin(x * y) / (1.0 - y))");
    }

    #[test]
    fn map_round_trip() {
        let src = r#"embedding "a \"q\"" { chart u in (-1e-3, 2.5), v in (0, 1);
            ambient signature (-, +, +); map u^-2; exp(v) - -u; cosh(u*v)^0.5; }"#;
        let map = parse_embedding(src).unwrap();
        let printed = map.to_string();
        assert_eq!(parse_embedding(&printed).unwrap(), map);
    }
}
