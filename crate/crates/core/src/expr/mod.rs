//! Complex-function expressions: parsing, evaluation, symbolic derivatives and pole analysis.
//!
//! The grammar admits only constructions that stay single valued (no logarithms, no
//! fractional powers), so every expression denotes a meromorphic function.

mod diff;
mod parser;
mod poles;

use std::fmt;

use crate::{ComplexValue, Error, Result};

pub use parser::parse;
pub use poles::{pole_set, PoleRecord, PoleSet};

/// Default radius below which evaluation next to a known pole is refused.
pub const DEFAULT_EXCLUSION_RADIUS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(ComplexValue),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Integer power; negative exponents give rational functions.
    Pow(Box<Expr>, i32),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn constant(re: f64, im: f64) -> Self {
        Expr::Const(ComplexValue::new(re, im))
    }

    pub fn is_rational(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var => true,
            Expr::Neg(a) | Expr::Pow(a, _) => a.is_rational(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_rational() && b.is_rational()
            }
            Expr::Exp(_) => false,
        }
    }

    /// Evaluates the expression without any pole-proximity screening; division by an
    /// exact zero or overflow is reported as [`Error::NonFinite`].
    pub fn eval(&self, z: ComplexValue) -> Result<ComplexValue> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var => z,
            Expr::Neg(a) => -a.eval(z)?,
            Expr::Add(a, b) => a.eval(z)? + b.eval(z)?,
            Expr::Sub(a, b) => a.eval(z)? - b.eval(z)?,
            Expr::Mul(a, b) => a.eval(z)? * b.eval(z)?,
            Expr::Div(a, b) => {
                let den = b.eval(z)?;
                if den.norm_sqr() == 0.0 {
                    return Err(Error::NonFinite { z });
                }
                a.eval(z)? / den
            }
            Expr::Pow(a, n) => {
                let base = a.eval(z)?;
                if *n < 0 && base.norm_sqr() == 0.0 {
                    return Err(Error::NonFinite { z });
                }
                ipow(base, *n)
            }
            Expr::Exp(a) => a.eval(z)?.exp(),
        };
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { z })
        }
    }

    /// Exact symbolic derivative with respect to `z`.
    pub fn differentiate(&self) -> Expr {
        diff::derivative(self)
    }
}

pub(crate) fn ipow(base: ComplexValue, n: i32) -> ComplexValue {
    let mut result = ComplexValue::new(1.0, 0.0);
    let mut b = base;
    let mut e = n.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            result *= b;
        }
        b *= b;
        e >>= 1;
    }
    if n < 0 {
        result.inv()
    } else {
        result
    }
}

fn write_real(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    // `{}` on f64 prints the shortest representation that parses back exactly.
    write!(f, "{x}")
}

/// Canonical, fully parenthesized form accepted by [`parse`].
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                write!(f, "(")?;
                write_real(f, c.re)?;
                if c.im.is_sign_negative() {
                    write!(f, "-")?;
                    write_real(f, -c.im)?;
                } else {
                    write!(f, "+")?;
                    write_real(f, c.im)?;
                }
                write!(f, "i)")
            }
            Expr::Var => write!(f, "z"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, n) => match **a {
                Expr::Var => write!(f, "z^{n}"),
                _ => write!(f, "({a})^{n}"),
            },
            Expr::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

/// Anything that can be evaluated as a holomorphic function along contours.
///
/// Implementors that know their poles should report them so that moment tests can
/// certify degree cutoffs and evaluations can be screened near singularities.
pub trait Holomorphic: Send + Sync {
    fn eval(&self, z: ComplexValue) -> Result<ComplexValue>;

    fn poles(&self) -> Option<&[PoleRecord]> {
        None
    }
}

/// A parsed expression together with its pole analysis.
#[derive(Debug, Clone)]
pub struct Function {
    expr: Expr,
    poles: PoleSet,
    exclusion_radius: f64,
}

impl Function {
    pub fn new(expr: Expr) -> Result<Self> {
        let poles = pole_set(&expr)?;
        Ok(Self {
            expr,
            poles,
            exclusion_radius: DEFAULT_EXCLUSION_RADIUS,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(parse(text)?)
    }

    pub fn with_exclusion_radius(mut self, radius: f64) -> Self {
        self.exclusion_radius = radius;
        self
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn pole_set(&self) -> &PoleSet {
        &self.poles
    }

    pub fn derivative(&self) -> Result<Function> {
        Ok(Function::new(self.expr.differentiate())?.with_exclusion_radius(self.exclusion_radius))
    }
}

impl fmt::Display for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

impl Holomorphic for Function {
    fn eval(&self, z: ComplexValue) -> Result<ComplexValue> {
        if let PoleSet::Known(poles) = &self.poles {
            for p in poles {
                let distance = (z - p.location).norm();
                if distance < self.exclusion_radius {
                    return Err(Error::PoleProximity {
                        z,
                        pole: p.location,
                        distance,
                    });
                }
            }
        }
        self.expr.eval(z)
    }

    fn poles(&self) -> Option<&[PoleRecord]> {
        match &self.poles {
            PoleSet::Known(p) => Some(p),
            PoleSet::Unknown => None,
        }
    }
}

/// Adapter for plain closures; no pole information.
pub struct BlackBox<F>(pub F);

impl<F> Holomorphic for BlackBox<F>
where
    F: Fn(ComplexValue) -> ComplexValue + Send + Sync,
{
    fn eval(&self, z: ComplexValue) -> Result<ComplexValue> {
        let v = (self.0)(z);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { z })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::new(re, im)
    }

    #[test]
    fn eval_basic_values() {
        let f = parse("1/z").unwrap();
        assert!((f.eval(c(0.0, 1.0)).unwrap() - c(0.0, -1.0)).norm() < 1e-15);
        let f = parse("z^2").unwrap();
        assert!((f.eval(c(1.0, 1.0)).unwrap() - c(0.0, 2.0)).norm() < 1e-15);
        let f = parse("exp(z)").unwrap();
        assert_eq!(f.eval(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn eval_refuses_pole_neighbourhood() {
        let f = Function::parse("1/(z-1)").unwrap();
        let err = f.eval(c(1.0 + 1e-10, 0.0)).unwrap_err();
        assert!(matches!(err, Error::PoleProximity { .. }));
        assert!(f.eval(c(1.0 + 1e-6, 0.0)).is_ok());
        let f = f.with_exclusion_radius(1e-3);
        assert!(f.eval(c(1.0 + 1e-6, 0.0)).is_err());
    }

    #[test]
    fn exact_zero_denominator_is_non_finite() {
        let f = parse("1/(exp(z)-1)").unwrap();
        assert!(matches!(f.eval(c(0.0, 0.0)), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn display_is_reparseable() {
        let e = parse("-(1.5-2i)*z^-3 + exp(z/(z-(2+0i)))").unwrap();
        let printed = e.to_string();
        let back = parse(&printed).unwrap();
        assert_eq!(back, e);
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            Just(Expr::Var),
            (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| Expr::constant(a, b)),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(a.into(), b.into())),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(a.into(), b.into())),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(a.into(), b.into())),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(a.into(), b.into())),
                (inner.clone(), -3i32..4).prop_map(|(a, n)| Expr::Pow(a.into(), n)),
                inner.clone().prop_map(|a| Expr::Neg(a.into())),
                inner.prop_map(|a| Expr::Exp(Box::new(Expr::Mul(
                    Box::new(Expr::constant(0.1, 0.0)),
                    a.into()
                )))),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let back = parse(&e.to_string()).unwrap();
            let z = c(re, im);
            if let (Ok(a), Ok(b)) = (e.eval(z), back.eval(z)) {
                let scale = a.norm().max(1.0);
                prop_assert!((a - b).norm() <= 1e-12 * scale);
            }
        }

        #[test]
        fn derivative_matches_central_difference(e in arb_expr(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let z = c(re, im);
            let h = 1e-5;
            let d = e.differentiate();
            let samples = (e.eval(z + h), e.eval(z - h), d.eval(z), e.eval(z));
            if let (Ok(p), Ok(m), Ok(exact), Ok(v)) = samples {
                // Skip pole neighbourhoods where finite differences are meaningless.
                let fd = (p - m) / (2.0 * h);
                let second = e.differentiate().differentiate();
                let curvature = second.eval(z).map(|s| s.norm()).unwrap_or(f64::INFINITY);
                let third = second.differentiate().eval(z).map(|s| s.norm()).unwrap_or(f64::INFINITY);
                let well_scaled = v.norm() < 1e4 && exact.norm() < 1e4 && curvature < 1e4 && third < 1e4;
                prop_assume!(well_scaled);
                prop_assert!((fd - exact).norm() <= 1e-6 * exact.norm().max(1.0),
                    "{} at {}: fd {} exact {}", e, z, fd, exact);
            }
        }
    }
}
