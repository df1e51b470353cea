use super::Expr;
use crate::ComplexValue;

fn as_const(e: &Expr) -> Option<ComplexValue> {
    match e {
        Expr::Const(c) => Some(*c),
        _ => None,
    }
}

fn is_zero(e: &Expr) -> bool {
    as_const(e).is_some_and(|c| c.norm_sqr() == 0.0)
}

fn is_one(e: &Expr) -> bool {
    as_const(e) == Some(ComplexValue::new(1.0, 0.0))
}

fn add(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => Expr::Const(x + y),
        _ if is_zero(&a) => b,
        _ if is_zero(&b) => a,
        _ => Expr::Add(a.into(), b.into()),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => Expr::Const(x - y),
        _ if is_zero(&b) => a,
        _ if is_zero(&a) => neg(b),
        _ => Expr::Sub(a.into(), b.into()),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(other.into()),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => Expr::Const(x * y),
        _ if is_zero(&a) || is_zero(&b) => Expr::Const(ComplexValue::new(0.0, 0.0)),
        _ if is_one(&a) => b,
        _ if is_one(&b) => a,
        _ => Expr::Mul(a.into(), b.into()),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        return a;
    }
    if is_one(&b) {
        return a;
    }
    Expr::Div(a.into(), b.into())
}

fn pow(a: Expr, n: i32) -> Expr {
    match n {
        0 => Expr::constant(1.0, 0.0),
        1 => a,
        _ => Expr::Pow(a.into(), n),
    }
}

pub(super) fn derivative(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) => Expr::constant(0.0, 0.0),
        Expr::Var => Expr::constant(1.0, 0.0),
        Expr::Neg(a) => neg(derivative(a)),
        Expr::Add(a, b) => add(derivative(a), derivative(b)),
        Expr::Sub(a, b) => sub(derivative(a), derivative(b)),
        Expr::Mul(a, b) => add(
            mul(derivative(a), (**b).clone()),
            mul((**a).clone(), derivative(b)),
        ),
        Expr::Div(a, b) => {
            let da = derivative(a);
            let db = derivative(b);
            let b2 = pow((**b).clone(), 2);
            if is_zero(&da) {
                // (c/b)' = -c b' / b^2
                neg(div(mul((**a).clone(), db), b2))
            } else {
                div(sub(mul(da, (**b).clone()), mul((**a).clone(), db)), b2)
            }
        }
        Expr::Pow(a, n) => {
            if *n == 0 {
                return Expr::constant(0.0, 0.0);
            }
            let outer = mul(Expr::constant(*n as f64, 0.0), pow((**a).clone(), n - 1));
            mul(outer, derivative(a))
        }
        Expr::Exp(a) => mul(e.clone(), derivative(a)),
    }
}
