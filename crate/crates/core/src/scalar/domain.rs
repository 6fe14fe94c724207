use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Point;
use crate::error::{Error, Result};

/// A set of points removed from the sampling box, with a safety margin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Exclusion {
    /// `sum_i coeffs[i] * x_i = offset` (variables in box order).
    Hyperplane { coeffs: Vec<f64>, offset: f64, margin: f64 },
    /// A puncture at `center`.
    Point { center: Vec<f64>, margin: f64 },
}

/// Axis-aligned sampling box over named variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub vars: Vec<String>,
    pub intervals: Vec<(f64, f64)>,
    #[serde(default)]
    pub exclusions: Vec<Exclusion>,
}

const MAX_REJECTIONS: usize = 10_000;

impl Domain {
    pub fn new<S: AsRef<str>>(vars: &[(S, f64, f64)]) -> Result<Self> {
        let d = Domain {
            vars: vars.iter().map(|(v, _, _)| v.as_ref().to_string()).collect(),
            intervals: vars.iter().map(|(_, a, b)| (*a, *b)).collect(),
            exclusions: Vec::new(),
        };
        d.validate()?;
        Ok(d)
    }

    pub fn with_exclusion(mut self, e: Exclusion) -> Self {
        self.exclusions.push(e);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.vars.len() != self.intervals.len() {
            return Err(Error::Config("domain variable and interval counts differ".into()));
        }
        for (v, (a, b)) in self.vars.iter().zip(&self.intervals) {
            if !(a < b) {
                return Err(Error::Config(format!("empty interval for {v}: [{a}, {b}]")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    fn excluded(&self, x: &[f64]) -> bool {
        self.exclusions.iter().any(|e| match e {
            Exclusion::Hyperplane { coeffs, offset, margin } => {
                let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
                let s: f64 = coeffs.iter().zip(x).map(|(c, v)| c * v).sum();
                ((s - offset) / norm).abs() <= *margin
            }
            Exclusion::Point { center, margin } => {
                center.iter().zip(x).map(|(c, v)| (c - v).powi(2)).sum::<f64>().sqrt() <= *margin
            }
        })
    }

    pub fn point(&self, x: &[f64]) -> Point {
        let mut p = Point::new();
        for (v, val) in self.vars.iter().zip(x) {
            p.set(v, *val);
        }
        p
    }

    /// Draws `n` points uniformly from the box, rejecting excluded points.
    pub fn sample<R: Rng>(&self, rng: &mut R, n: usize) -> Result<Vec<Point>> {
        let mut out = Vec::with_capacity(n);
        let mut rejected = 0;
        while out.len() < n {
            let x: Vec<f64> = self.intervals.iter().map(|(a, b)| rng.gen_range(*a..*b)).collect();
            if self.excluded(&x) {
                rejected += 1;
                if rejected > MAX_REJECTIONS {
                    return Err(Error::Sampling(format!(
                        "domain over {:?} appears fully excluded",
                        self.vars
                    )));
                }
                continue;
            }
            out.push(self.point(&x));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sampling_avoids_exclusions() {
        let d = Domain::new(&[("x", -1.0, 1.0), ("y", -1.0, 1.0)])
            .unwrap()
            .with_exclusion(Exclusion::Hyperplane { coeffs: vec![1.0, 0.0], offset: 0.0, margin: 0.1 });
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in d.sample(&mut rng, 200).unwrap() {
            assert!(p.get("x").unwrap().abs() > 0.1);
        }
    }

    #[test]
    fn fully_excluded_domain_fails() {
        let d = Domain::new(&[("x", -1.0, 1.0)])
            .unwrap()
            .with_exclusion(Exclusion::Point { center: vec![0.0], margin: 5.0 });
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(d.sample(&mut rng, 1), Err(Error::Sampling(_))));
    }

    #[test]
    fn empty_interval_rejected() {
        assert!(Domain::new(&[("x", 1.0, 1.0)]).is_err());
    }
}
