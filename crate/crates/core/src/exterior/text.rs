use std::sync::Arc;

use super::coframe::{sort_indices, Coframe};
use super::form::{signed, Form};
use super::vector::FrameVector;
use crate::error::{Error, Result};
use crate::scalar::{cscalar_from_sexp, read_sexp, Sexp};

fn expect_head<'a>(e: &'a Sexp, head: &str) -> Result<&'a [Sexp]> {
    match e {
        Sexp::List(items) => match items.split_first() {
            Some((Sexp::Atom(h), rest)) if h == head => Ok(rest),
            _ => Err(Error::Parse(format!("expected ({head} ...)"))),
        },
        Sexp::Atom(a) => Err(Error::Parse(format!("expected ({head} ...), found {a:?}"))),
    }
}

fn atom(e: &Sexp) -> Result<&str> {
    match e {
        Sexp::Atom(a) => Ok(a),
        Sexp::List(_) => Err(Error::Parse("expected a generator name".into())),
    }
}

/// Reads `(form (term <coeff> gen ...) ...)` over `cf`. Generators within a
/// term may appear in any order; repeated generators give zero.
pub fn parse_form(cf: &Arc<Coframe>, src: &str) -> Result<Form> {
    let e = read_sexp(src)?;
    let mut out = Form::zero(cf);
    for t in expect_head(&e, "form")? {
        let items = expect_head(t, "term")?;
        let (c, gens) = items.split_first().ok_or_else(|| Error::Parse("empty term".into()))?;
        let c = cscalar_from_sexp(c)?;
        let idx: Vec<usize> = gens
            .iter()
            .map(|g| atom(g).and_then(|n| cf.index(n).ok_or_else(|| Error::Parse(format!("unknown generator {n:?}")))))
            .collect::<Result<_>>()?;
        if let Some((sign, mask)) = sort_indices(&idx) {
            out.add_term(mask, signed(&c, sign));
        }
    }
    Ok(out)
}

/// Reads `(vector (comp <coeff> gen) ...)` over `cf`.
pub fn parse_vector(cf: &Arc<Coframe>, src: &str) -> Result<FrameVector> {
    let e = read_sexp(src)?;
    let mut out = FrameVector::zero(cf);
    for t in expect_head(&e, "vector")? {
        match expect_head(t, "comp")? {
            [c, g] => {
                let name = atom(g)?;
                let i = cf.index(name).ok_or_else(|| Error::Parse(format!("unknown generator {name:?}")))?;
                out.set(i, out.comp(i) + &cscalar_from_sexp(c)?);
            }
            _ => return Err(Error::Parse("comp takes a coefficient and a generator".into())),
        }
    }
    Ok(out)
}
