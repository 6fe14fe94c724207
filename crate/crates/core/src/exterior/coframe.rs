use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Role of a coframe generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tag {
    /// `dx` for a base coordinate `x`.
    Base,
    /// A connection form `θ_i` on the bundle.
    Fiber,
    /// A connection form `θ̃_j` on the dual bundle.
    DualFiber,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub tag: Tag,
    /// Base coordinate differentiated by this generator (base generators only).
    pub var: Option<String>,
}

impl Generator {
    pub fn base(var: &str) -> Self {
        Generator { name: format!("d{var}"), tag: Tag::Base, var: Some(var.to_string()) }
    }

    pub fn fiber(name: &str) -> Self {
        Generator { name: name.to_string(), tag: Tag::Fiber, var: None }
    }

    pub fn dual_fiber(name: &str) -> Self {
        Generator { name: name.to_string(), tag: Tag::DualFiber, var: None }
    }
}

/// Ordered list of named 1-form generators.
///
/// Monomials are stored as bitmasks over generator positions, so a coframe
/// holds at most 63 generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coframe {
    gens: Vec<Generator>,
}

impl Coframe {
    pub fn new(gens: Vec<Generator>) -> Result<Arc<Coframe>> {
        if gens.len() > 63 {
            return Err(Error::Config(format!("coframe of dimension {} is too large", gens.len())));
        }
        for (i, g) in gens.iter().enumerate() {
            if g.name.is_empty() || g.name.chars().any(|c| c.is_whitespace() || c == '(' || c == ')') {
                return Err(Error::Config(format!("invalid generator name {:?}", g.name)));
            }
            if gens[..i].iter().any(|h| h.name == g.name) {
                return Err(Error::Config(format!("duplicate generator {:?}", g.name)));
            }
            if (g.tag == Tag::Base) != g.var.is_some() {
                return Err(Error::Config(format!("generator {:?}: only base generators carry a variable", g.name)));
            }
        }
        Ok(Arc::new(Coframe { gens }))
    }

    pub fn dim(&self) -> usize {
        self.gens.len()
    }

    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }

    pub fn gen(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index(name).ok_or_else(|| Error::CoframeMismatch(format!("no generator named {name:?}")))
    }

    pub fn full_mask(&self) -> u64 {
        (1u64 << self.dim()) - 1
    }

    pub fn tag_mask(&self, tag: Tag) -> u64 {
        self.gens.iter().enumerate().filter(|(_, g)| g.tag == tag).fold(0, |m, (i, _)| m | 1 << i)
    }

    pub fn indices_with(&self, tag: Tag) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.gens[i].tag == tag).collect()
    }

    pub fn base_vars(&self) -> Vec<String> {
        self.gens.iter().filter_map(|g| g.var.clone()).collect()
    }

    /// Index of the base generator differentiating `var`.
    pub fn base_index(&self, var: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.var.as_deref() == Some(var))
    }

    pub fn names(&self, mask: u64) -> Vec<&str> {
        bits(mask).map(|i| self.gens[i].name.as_str()).collect()
    }
}

/// Iterates the set bit positions of `mask` in increasing order.
pub fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let i = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        Some(i)
    })
}

/// Sign of `e_a ∧ e_b` relative to the sorted monomial `e_{a|b}`
/// (`0` if the masks overlap).
pub fn wedge_sign(a: u64, b: u64) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let inversions: u32 = bits(b).map(|j| (a >> (j + 1)).count_ones()).sum();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign and mask of the monomial `e_{i_1} ∧ ... ∧ e_{i_k}` for an arbitrary
/// index sequence (`None` when an index repeats).
pub fn sort_indices(idx: &[usize]) -> Option<(i32, u64)> {
    let mut mask = 0u64;
    let mut sign = 1;
    for &i in idx {
        let s = wedge_sign(mask, 1 << i);
        if s == 0 {
            return None;
        }
        sign *= s;
        mask |= 1 << i;
    }
    Some((sign, mask))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signs() {
        assert_eq!(wedge_sign(0b01, 0b10), 1);
        assert_eq!(wedge_sign(0b10, 0b01), -1);
        assert_eq!(wedge_sign(0b11, 0b01), 0);
        assert_eq!(sort_indices(&[2, 0, 1]), Some((1, 0b111)));
        assert_eq!(sort_indices(&[1, 0, 2]), Some((-1, 0b111)));
        assert_eq!(sort_indices(&[1, 1]), None);
    }

    #[test]
    fn rejects_duplicates() {
        assert!(Coframe::new(vec![Generator::base("x"), Generator::base("x")]).is_err());
        let cf = Coframe::new(vec![Generator::base("x"), Generator::fiber("theta")]).unwrap();
        assert_eq!(cf.tag_mask(Tag::Fiber), 0b10);
        assert_eq!(cf.base_vars(), vec!["x".to_string()]);
    }
}
