use thiserror::Error;

use super::{BinaryOp, EmbeddingMap, Expr, ExprKind, Function, Span};
use crate::jet::{powi_f64, Jet, JetError, DIVISION_EPSILON};

#[derive(Debug, Clone, PartialEq)]
pub enum EvalErrorKind {
    /// Argument outside the domain of `log`, `sqrt` or a fractional power.
    Domain {
        function: &'static str,
        value: f64,
    },
    DivisionByZero,
    /// Evaluation point not strictly inside the chart box.
    OutsideChart {
        variable: String,
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("evaluation error at bytes {}..{}: {kind:?}", span.start, span.end)]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub span: Span,
}

impl EvalError {
    fn at(span: Span, kind: EvalErrorKind) -> EvalError {
        EvalError { kind, span }
    }

    fn from_jet(span: Span, err: JetError) -> EvalError {
        let kind = match err {
            JetError::DivisionByZero => EvalErrorKind::DivisionByZero,
            JetError::Domain { function, value } => EvalErrorKind::Domain { function, value },
        };
        EvalError { kind, span }
    }
}

/// Exponents that are small integers go through repeated multiplication,
/// which also works for negative bases.
fn integer_exponent(e: f64) -> Option<i32> {
    (e.fract() == 0.0 && e.abs() <= 64.0).then_some(e as i32)
}

/// Plain IEEE evaluation of an expression at `values`.
///
/// Uses the same operation sequence as the value coefficient of [`Expr::eval_jet`],
/// so the two agree exactly.
pub fn eval_ast(ast: &Expr, values: &[f64]) -> Result<f64, EvalError> {
    let span = ast.span;
    Ok(match &ast.kind {
        ExprKind::Const(c) => *c,
        ExprKind::Var(i) => values[*i],
        ExprKind::Neg(e) => -eval_ast(e, values)?,
        ExprKind::Call(f, e) => {
            let a = eval_ast(e, values)?;
            let positive = |function| {
                if a > 0.0 {
                    Ok(a)
                } else {
                    Err(EvalError::at(span, EvalErrorKind::Domain { function, value: a }))
                }
            };
            match f {
                Function::Sin => a.sin(),
                Function::Cos => a.cos(),
                Function::Sinh => a.sinh(),
                Function::Cosh => a.cosh(),
                Function::Exp => a.exp(),
                Function::Log => positive("log")?.ln(),
                Function::Sqrt => positive("sqrt")?.sqrt(),
            }
        }
        ExprKind::Binary(op, l, r) => {
            let a = eval_ast(l, values)?;
            let b = eval_ast(r, values)?;
            match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Mul => a * b,
                BinaryOp::Div => {
                    if b.abs() < DIVISION_EPSILON {
                        return Err(EvalError::at(span, EvalErrorKind::DivisionByZero));
                    }
                    a / b
                }
            }
        }
        ExprKind::Pow(base, e) => {
            let a = eval_ast(base, values)?;
            match integer_exponent(*e) {
                Some(k) => {
                    if k < 0 && powi_f64(a, -k).abs() < DIVISION_EPSILON {
                        return Err(EvalError::at(span, EvalErrorKind::DivisionByZero));
                    }
                    powi_f64(a, k)
                }
                None if a > 0.0 => a.powf(*e),
                None => return Err(EvalError::at(span, EvalErrorKind::Domain { function: "pow", value: a })),
            }
        }
    })
}

impl Expr {
    pub fn eval(&self, values: &[f64]) -> Result<f64, EvalError> {
        eval_ast(self, values)
    }

    /// Evaluates the expression in jet arithmetic given the jets of the chart variables.
    pub fn eval_jet(&self, vars: &[Jet]) -> Result<Jet, EvalError> {
        let span = self.span;
        let lift = |r: Result<Jet, JetError>| r.map_err(|e| EvalError::from_jet(span, e));
        Ok(match &self.kind {
            ExprKind::Const(c) => Jet::constant(vars[0].n(), *c),
            ExprKind::Var(i) => vars[*i].clone(),
            ExprKind::Neg(e) => -e.eval_jet(vars)?,
            ExprKind::Call(f, e) => {
                let a = e.eval_jet(vars)?;
                match f {
                    Function::Sin => a.sin(),
                    Function::Cos => a.cos(),
                    Function::Sinh => a.sinh(),
                    Function::Cosh => a.cosh(),
                    Function::Exp => a.exp(),
                    Function::Log => lift(a.ln())?,
                    Function::Sqrt => lift(a.sqrt())?,
                }
            }
            ExprKind::Binary(op, l, r) => {
                let a = l.eval_jet(vars)?;
                let b = r.eval_jet(vars)?;
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => lift(a.checked_div(&b))?,
                }
            }
            ExprKind::Pow(base, e) => {
                let a = base.eval_jet(vars)?;
                match integer_exponent(*e) {
                    Some(k) => lift(a.powi(k))?,
                    None => lift(a.powf(*e))?,
                }
            }
        })
    }
}

/// Third-order jets of every component `Y^μ` at a point strictly inside the chart box.
pub fn jet_eval(map: &EmbeddingMap, point: &[f64]) -> Result<Vec<Jet>, EvalError> {
    assert_eq!(point.len(), map.n(), "point has the wrong number of coordinates");
    for ((name, interval), &x) in map.variables.iter().zip(&map.domain).zip(point) {
        if !interval.contains_open(x) {
            return Err(EvalError::at(
                Span::default(),
                EvalErrorKind::OutsideChart { variable: name.clone(), value: x },
            ));
        }
    }
    let n = map.n();
    let vars: Vec<Jet> = point.iter().enumerate().map(|(i, &x)| Jet::var(i, x, n)).collect();
    map.components.iter().map(|c| c.eval_jet(&vars)).collect()
}

#[cfg(test)]
mod tests {
    use super::super::parse_expression;
    use super::*;

    fn eval(src: &str, at: &[f64]) -> Result<f64, EvalError> {
        eval_ast(&parse_expression(src, &["x", "y"]).unwrap(), at)
    }

    #[test]
    fn basic_values() {
        assert_eq!(eval("2.5", &[0.1, 0.2]).unwrap(), 2.5);
        assert_eq!(eval("x", &[0.3, 0.7]).unwrap(), 0.3);
        assert_eq!(eval("sin(x)*cos(y)", &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(eval("(-2)^3", &[0.0, 0.0]).unwrap(), -8.0);
        assert_eq!(eval("x^-1", &[4.0, 0.0]).unwrap(), 0.25);
        assert_eq!(eval("x^0.5", &[4.0, 0.0]).unwrap(), 2.0);
    }

    #[test]
    fn domain_violations_carry_spans() {
        let err = eval("1 + log(x - 1)", &[0.5, 0.0]).unwrap_err();
        assert!(matches!(err.kind, EvalErrorKind::Domain { function: "log", .. }));
        assert_eq!((err.span.start, err.span.end), (4, 14));
        assert!(matches!(eval("sqrt(-x)", &[1.0, 0.0]).unwrap_err().kind, EvalErrorKind::Domain { .. }));
        assert_eq!(eval("1/(x-y)", &[1.0, 1.0]).unwrap_err().kind, EvalErrorKind::DivisionByZero);
        assert!(eval("x^0.5", &[-1.0, 0.0]).is_err());
        assert!(eval("x^-2", &[0.0, 0.0]).is_err());
    }

    #[test]
    fn jet_value_matches_plain_eval() {
        let e = parse_expression("sqrt(x^2 + y^2) * exp(-x/y) - log(cosh(y))^1.5", &["x", "y"]).unwrap();
        let p = [0.37, 1.9];
        let vars = [Jet::var(0, p[0], 2), Jet::var(1, p[1], 2)];
        assert_eq!(e.eval_jet(&vars).unwrap().value(), eval_ast(&e, &p).unwrap());
    }
}
