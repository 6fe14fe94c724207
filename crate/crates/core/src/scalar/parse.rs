//! Reader for the prefix serialization of scalars.
//!
//! Grammar (s-expressions):
//!
//! ```text
//! expr := INT | INT/INT | DECIMAL | pi | IDENT
//!       | (+ expr*) | (* expr*) | (- expr) | (- expr expr)
//!       | (/ expr expr) | (^ expr INT)
//!       | (sin expr) | (cos expr) | (exp expr) | (log expr) | (sqrt expr)
//! ```

use num_rational::Rational64;

use super::{CScalar, Func, Scalar};
use crate::error::{Error, Result};

/// Generic s-expression tree shared by the scalar and form readers.
#[derive(Clone, Debug, PartialEq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

pub fn read_sexp(src: &str) -> Result<Sexp> {
    let tokens = tokenize(src);
    let mut pos = 0;
    let e = read_tokens(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(Error::Parse(format!("trailing input after expression in {src:?}")));
    }
    Ok(e)
}

fn tokenize(src: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in src.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn read_tokens(tokens: &[String], pos: &mut usize) -> Result<Sexp> {
    let tok = tokens.get(*pos).ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    None => return Err(Error::Parse("unbalanced '('".into())),
                    Some(")") => {
                        *pos += 1;
                        return Ok(Sexp::List(items));
                    }
                    Some(_) => items.push(read_tokens(tokens, pos)?),
                }
            }
        }
        ")" => Err(Error::Parse("unexpected ')'".into())),
        _ => Ok(Sexp::Atom(tok.clone())),
    }
}

fn parse_number(s: &str) -> Option<Rational64> {
    if let Some((n, d)) = s.split_once('/') {
        let (n, d) = (n.parse::<i64>().ok()?, d.parse::<i64>().ok()?);
        return (d != 0).then(|| Rational64::new(n, d));
    }
    if let Ok(n) = s.parse::<i64>() {
        return Some(Rational64::from_integer(n));
    }
    // Finite decimals are read exactly.
    let (sign, body) = match s.strip_prefix('-') {
        Some(b) => (-1, b),
        None => (1, s),
    };
    let (ip, fp) = body.split_once('.')?;
    if ip.is_empty() && fp.is_empty() || !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let den = 10i64.checked_pow(fp.len() as u32)?;
    let num = format!("{ip}{fp}").parse::<i64>().ok()?;
    Some(Rational64::new(sign * num, den))
}

pub fn scalar_from_sexp(e: &Sexp) -> Result<Scalar> {
    match e {
        Sexp::Atom(a) => {
            if let Some(r) = parse_number(a) {
                return Ok(Scalar::rational(r));
            }
            if a == "pi" {
                return Ok(Scalar::pi());
            }
            let valid = a.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                && a.chars().all(|c| c.is_alphanumeric() || c == '_');
            if !valid {
                return Err(Error::Parse(format!("invalid atom {a:?}")));
            }
            Ok(Scalar::var(a))
        }
        Sexp::List(items) => {
            let (head, args) = match items.split_first() {
                Some((Sexp::Atom(h), rest)) => (h.as_str(), rest),
                _ => return Err(Error::Parse("expected operator at head of list".into())),
            };
            let args: Vec<Scalar> = args.iter().map(scalar_from_sexp).collect::<Result<_>>()?;
            let arity = |n: usize| {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(Error::Parse(format!("'{head}' expects {n} argument(s), got {}", args.len())))
                }
            };
            match head {
                "+" => Ok(Scalar::sum(args)),
                "*" => Ok(Scalar::product(args)),
                "-" => match args.len() {
                    1 => Ok(-&args[0]),
                    2 => Ok(&args[0] - &args[1]),
                    n => Err(Error::Parse(format!("'-' expects 1 or 2 arguments, got {n}"))),
                },
                "/" => {
                    arity(2)?;
                    if args[1].is_zero() {
                        return Err(Error::Parse("division by literal zero".into()));
                    }
                    Ok(&args[0] / &args[1])
                }
                "^" => {
                    arity(2)?;
                    let n = args[1]
                        .as_const()
                        .filter(|r| r.is_integer())
                        .ok_or_else(|| Error::Parse("'^' needs an integer exponent".into()))?;
                    Ok(args[0].powi(*n.numer() as i32))
                }
                f => match Func::from_name(f) {
                    Some(func) => {
                        arity(1)?;
                        Ok(Scalar::apply(func, args[0].clone()))
                    }
                    None => Err(Error::Parse(format!("unknown operator {f:?}"))),
                },
            }
        }
    }
}

/// Reads a complex coefficient: a plain scalar or `(complex re im)`.
pub fn cscalar_from_sexp(e: &Sexp) -> Result<CScalar> {
    if let Sexp::List(items) = e {
        if let Some(Sexp::Atom(h)) = items.first() {
            if h == "complex" {
                if items.len() != 3 {
                    return Err(Error::Parse("'complex' expects 2 arguments".into()));
                }
                return Ok(CScalar::new(scalar_from_sexp(&items[1])?, scalar_from_sexp(&items[2])?));
            }
        }
    }
    Ok(CScalar::real(scalar_from_sexp(e)?))
}

pub fn parse_scalar(src: &str) -> Result<Scalar> {
    scalar_from_sexp(&read_sexp(src)?)
}

pub fn parse_cscalar(src: &str) -> Result<CScalar> {
    cscalar_from_sexp(&read_sexp(src)?)
}
