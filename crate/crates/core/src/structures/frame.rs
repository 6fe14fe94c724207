use crate::bundle::BundleChart;
use crate::error::Result;
use crate::linalg::{CMat, CVec};
use crate::pointwise::{clifford_matrix, pairing_matrix};
use crate::scalar::Point;

/// Frame data of a chart evaluated at one base point.
#[derive(Clone, Debug)]
pub struct PointFrame {
    pub n: usize,
    pub pairing: CMat,
    /// Clifford matrix of each frame section `∂_1..∂_N, e^1..e^N`.
    pub clifford: Vec<CMat>,
    pub h: CVec,
}

impl PointFrame {
    pub fn new(ch: &BundleChart, p: &Point) -> Result<Self> {
        let n = ch.coframe().dim();
        let clifford = (0..2 * n)
            .map(|i| {
                let mut v = CVec::zeros(2 * n);
                v[i] = crate::linalg::c(1.0);
                clifford_matrix(n, &v)
            })
            .collect();
        Ok(PointFrame { n, pairing: pairing_matrix(n), clifford, h: ch.flux().eval(p)? })
    }

    /// Clifford matrix of an arbitrary section vector.
    pub fn action(&self, v: &CVec) -> CMat {
        self.clifford.iter().zip(v.iter()).fold(CMat::zeros(1 << self.n, 1 << self.n), |acc, (m, &x)| acc + m * x)
    }
}
