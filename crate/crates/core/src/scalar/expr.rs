//! Immutable expression trees for coefficient functions on a chart base.
//!
//! Constructors perform light normalization only: flattening of sums and
//! products, rational constant folding, merging of like terms and like
//! factors, and the identities `x + 0 = x`, `1 * x = x`, `x / 1 = x`.
//! Quotients are stored as negative powers so that like factors cancel.
//! There is no canonical form; equality of functions is decided by sampling
//! (see [`crate::scalar::equal_numeric`]).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::Rational64;

use super::point::Point;
use crate::error::{Error, Result};

/// Named transcendental constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Named {
    Pi,
}

impl Named {
    pub fn value(self) -> f64 {
        match self {
            Named::Pi => std::f64::consts::PI,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Named::Pi => "pi",
        }
    }
}

/// Unary elementary functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Const(Rational64),
    Named(Named),
    Var(Arc<str>),
    Add(Vec<Scalar>),
    Mul(Vec<Scalar>),
    Pow(Scalar, i32),
    Func(Func, Scalar),
}

/// A real-valued expression in named base variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar(Arc<Node>);

impl Scalar {
    pub fn node(&self) -> &Node {
        &self.0
    }

    fn from_node(n: Node) -> Self {
        Scalar(Arc::new(n))
    }

    pub fn rational(r: Rational64) -> Self {
        Scalar::from_node(Node::Const(r))
    }

    pub fn int(n: i64) -> Self {
        Scalar::rational(Rational64::from_integer(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::rational(Rational64::new(num, den))
    }

    pub fn zero() -> Self {
        Scalar::int(0)
    }

    pub fn one() -> Self {
        Scalar::int(1)
    }

    pub fn pi() -> Self {
        Scalar::from_node(Node::Named(Named::Pi))
    }

    pub fn var(name: &str) -> Self {
        Scalar::from_node(Node::Var(Arc::from(name)))
    }

    pub fn as_const(&self) -> Option<Rational64> {
        match self.node() {
            Node::Const(r) => Some(*r),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(|r| r == Rational64::from_integer(0))
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(|r| r == Rational64::from_integer(1))
    }

    /// Splits `c * rest` into its rational coefficient and remaining factor.
    fn split_coeff(&self) -> (Rational64, Scalar) {
        match self.node() {
            Node::Const(r) => (*r, Scalar::one()),
            Node::Mul(fs) => match fs.first().and_then(|f| f.as_const()) {
                Some(c) => {
                    let rest = fs[1..].to_vec();
                    let rest = if rest.len() == 1 {
                        rest.into_iter().next().unwrap()
                    } else {
                        Scalar::from_node(Node::Mul(rest))
                    };
                    (c, rest)
                }
                None => (Rational64::from_integer(1), self.clone()),
            },
            _ => (Rational64::from_integer(1), self.clone()),
        }
    }

    pub fn sum<I: IntoIterator<Item = Scalar>>(terms: I) -> Scalar {
        let mut flat = Vec::new();
        for t in terms {
            match t.node() {
                Node::Add(inner) => flat.extend(inner.iter().cloned()),
                _ => flat.push(t),
            }
        }
        let mut constant = Rational64::from_integer(0);
        let mut like: BTreeMap<Scalar, Rational64> = BTreeMap::new();
        for t in flat {
            let (c, rest) = t.split_coeff();
            if rest.is_one() {
                constant += c;
            } else {
                *like.entry(rest).or_insert_with(|| Rational64::from_integer(0)) += c;
            }
        }
        let mut out = Vec::new();
        if constant != Rational64::from_integer(0) {
            out.push(Scalar::rational(constant));
        }
        for (rest, c) in like {
            if c == Rational64::from_integer(0) {
                continue;
            }
            out.push(Scalar::product([Scalar::rational(c), rest]));
        }
        match out.len() {
            0 => Scalar::zero(),
            1 => out.pop().unwrap(),
            _ => Scalar::from_node(Node::Add(out)),
        }
    }

    pub fn product<I: IntoIterator<Item = Scalar>>(factors: I) -> Scalar {
        let mut flat = Vec::new();
        for f in factors {
            match f.node() {
                Node::Mul(inner) => flat.extend(inner.iter().cloned()),
                _ => flat.push(f),
            }
        }
        let mut constant = Rational64::from_integer(1);
        let mut powers: BTreeMap<Scalar, i32> = BTreeMap::new();
        for f in flat {
            match f.node() {
                Node::Const(r) => {
                    if *r == Rational64::from_integer(0) {
                        return Scalar::zero();
                    }
                    constant *= *r;
                }
                Node::Pow(b, n) => *powers.entry(b.clone()).or_insert(0) += *n,
                _ => *powers.entry(f).or_insert(0) += 1,
            }
        }
        let mut out = Vec::new();
        if constant != Rational64::from_integer(1) {
            out.push(Scalar::rational(constant));
        }
        for (base, n) in powers {
            if n == 0 {
                continue;
            }
            out.push(if n == 1 { base } else { Scalar::from_node(Node::Pow(base, n)) });
        }
        match out.len() {
            0 => Scalar::one(),
            1 => out.pop().unwrap(),
            _ => Scalar::from_node(Node::Mul(out)),
        }
    }

    pub fn quotient(num: Scalar, den: Scalar) -> Scalar {
        if let Some(d) = den.as_const() {
            assert!(d != Rational64::from_integer(0), "division by the constant zero");
            return Scalar::product([num, Scalar::rational(d.recip())]);
        }
        Scalar::product([num, den.powi(-1)])
    }

    pub fn powi(&self, n: i32) -> Scalar {
        if n == 0 {
            return Scalar::one();
        }
        if n == 1 {
            return self.clone();
        }
        if let Some(r) = self.as_const() {
            if r != Rational64::from_integer(0) || n > 0 {
                return Scalar::rational(r.pow(n));
            }
        }
        match self.node() {
            Node::Pow(b, m) => b.powi(m * n),
            Node::Mul(fs) => Scalar::product(fs.iter().map(|f| f.powi(n))),
            _ => Scalar::from_node(Node::Pow(self.clone(), n)),
        }
    }

    pub fn apply(f: Func, arg: Scalar) -> Scalar {
        if arg.is_zero() {
            match f {
                Func::Sin | Func::Sqrt => return Scalar::zero(),
                Func::Cos | Func::Exp => return Scalar::one(),
                Func::Log => {}
            }
        }
        if f == Func::Log && arg.is_one() {
            return Scalar::zero();
        }
        Scalar::from_node(Node::Func(f, arg))
    }

    pub fn sin(&self) -> Scalar {
        Scalar::apply(Func::Sin, self.clone())
    }
    pub fn cos(&self) -> Scalar {
        Scalar::apply(Func::Cos, self.clone())
    }
    pub fn exp(&self) -> Scalar {
        Scalar::apply(Func::Exp, self.clone())
    }
    pub fn ln(&self) -> Scalar {
        Scalar::apply(Func::Log, self.clone())
    }
    pub fn sqrt(&self) -> Scalar {
        Scalar::apply(Func::Sqrt, self.clone())
    }

    pub fn recip(&self) -> Scalar {
        Scalar::quotient(Scalar::one(), self.clone())
    }

    /// Evaluates in IEEE double precision.
    pub fn eval(&self, p: &Point) -> Result<f64> {
        let v = match self.node() {
            Node::Const(r) => *r.numer() as f64 / *r.denom() as f64,
            Node::Named(n) => n.value(),
            Node::Var(name) => p.get(name).ok_or_else(|| Error::UnboundVariable(name.to_string()))?,
            Node::Add(ts) => {
                let mut s = 0.0;
                for t in ts {
                    s += t.eval(p)?;
                }
                s
            }
            Node::Mul(fs) => {
                let mut s = 1.0;
                for f in fs {
                    s *= f.eval(p)?;
                }
                s
            }
            Node::Pow(b, n) => {
                let x = b.eval(p)?;
                if x == 0.0 && *n < 0 {
                    return Err(Error::Singular(format!("negative power of zero in {self}")));
                }
                x.powi(*n)
            }
            Node::Func(f, a) => {
                let x = a.eval(p)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(Error::Singular(format!("log of non-positive value in {self}")));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(Error::Singular(format!("sqrt of negative value in {self}")));
                        }
                        x.sqrt()
                    }
                }
            }
        };
        if !v.is_finite() {
            return Err(Error::Singular(format!("non-finite value of {self}")));
        }
        Ok(v)
    }

    /// Symbolic partial derivative.
    pub fn diff(&self, var: &str) -> Scalar {
        match self.node() {
            Node::Const(_) | Node::Named(_) => Scalar::zero(),
            Node::Var(v) => {
                if &**v == var {
                    Scalar::one()
                } else {
                    Scalar::zero()
                }
            }
            Node::Add(ts) => Scalar::sum(ts.iter().map(|t| t.diff(var))),
            Node::Mul(fs) => Scalar::sum((0..fs.len()).map(|i| {
                Scalar::product(
                    fs.iter().enumerate().map(|(j, f)| if i == j { f.diff(var) } else { f.clone() }),
                )
            })),
            Node::Pow(b, n) => Scalar::product([Scalar::int(*n as i64), b.powi(n - 1), b.diff(var)]),
            Node::Func(f, a) => {
                let da = a.diff(var);
                let outer = match f {
                    Func::Sin => a.cos(),
                    Func::Cos => -a.sin(),
                    Func::Exp => self.clone(),
                    Func::Log => a.recip(),
                    Func::Sqrt => Scalar::quotient(Scalar::ratio(1, 2), self.clone()),
                };
                &outer * &da
            }
        }
    }

    /// Names of variables occurring in the expression, sorted.
    pub fn variables(&self) -> Vec<String> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_vars(&mut out);
        out.into_iter().collect()
    }

    fn collect_vars(&self, out: &mut std::collections::BTreeSet<String>) {
        match self.node() {
            Node::Const(_) | Node::Named(_) => {}
            Node::Var(v) => {
                out.insert(v.to_string());
            }
            Node::Add(xs) | Node::Mul(xs) => xs.iter().for_each(|x| x.collect_vars(out)),
            Node::Pow(b, _) => b.collect_vars(out),
            Node::Func(_, a) => a.collect_vars(out),
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                let f: fn(&Scalar, &Scalar) -> Scalar = $body;
                f(self, rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Scalar::sum([a.clone(), b.clone()]));
binop!(Sub, sub, |a, b| Scalar::sum([a.clone(), -b]));
binop!(Mul, mul, |a, b| Scalar::product([a.clone(), b.clone()]));
binop!(Div, div, |a, b| Scalar::quotient(a.clone(), b.clone()));

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::product([Scalar::int(-1), self.clone()])
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Prefix (s-expression) serialization, parsed back by [`crate::scalar::parse_scalar`].
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(r) => {
                if *r.denom() == 1 {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Node::Named(n) => write!(f, "{}", n.name()),
            Node::Var(v) => write!(f, "{v}"),
            Node::Add(ts) => {
                write!(f, "(+")?;
                for t in ts {
                    write!(f, " {t}")?;
                }
                write!(f, ")")
            }
            Node::Mul(fs) => {
                write!(f, "(*")?;
                for x in fs {
                    write!(f, " {x}")?;
                }
                write!(f, ")")
            }
            Node::Pow(b, n) => write!(f, "(^ {b} {n})"),
            Node::Func(func, a) => write!(f, "({} {a})", func.name()),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
