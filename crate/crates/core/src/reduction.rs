//! Pointwise Courant reduction by lifted torus actions, T-duality as a
//! double quotient of the correspondence space, and the generalized
//! submanifold criterion for the correspondence.
//!
//! Everything here is linear algebra in `W = T ⊕ T*` at a single point, in
//! frame coordinates `(X¹..X^N, ξ₁..ξ_N)` with pairing `½(η(X) + ξ(Y))`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::courant::{pairing, Section};
use crate::duality::DualityPair;
use crate::error::{Error, Result};
use crate::exterior::{Form, FrameVector};
use crate::linalg::{hcat, intersection_dim, nullspace, orth, rank, signature, span_defect, to_complex, CMat};
use crate::scalar::Point;
use crate::structures::gcs_endomorphism;

/// Matrix of the natural pairing on `T ⊕ T*` of an `n`-dimensional frame.
pub fn pairing_matrix(n: usize) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        p[(i, n + i)] = 0.5;
        p[(n + i, i)] = 0.5;
    }
    p
}

fn re(m: &CMat) -> DMatrix<f64> {
    m.map(|z| z.re)
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        0.0
    } else {
        m.abs().max()
    }
}

/// Generators `Ψ(γ₁..γ_m)` of a lifted action at a point, as the columns of
/// `generators`, inside a pairing space `W`.
#[derive(Clone, Debug)]
pub struct LiftedActionPoint {
    pub pairing: DMatrix<f64>,
    pub generators: DMatrix<f64>,
}

impl LiftedActionPoint {
    /// Action on `T ⊕ T*` of an `n`-dimensional frame.
    pub fn new(n: usize, generators: DMatrix<f64>) -> Result<Self> {
        if generators.nrows() != 2 * n {
            return Err(Error::Config(format!("generators must have {} rows", 2 * n)));
        }
        Ok(LiftedActionPoint { pairing: pairing_matrix(n), generators })
    }

    /// Dimension of the underlying frame (half the dimension of `W`).
    pub fn frame_dim(&self) -> usize {
        self.pairing.nrows() / 2
    }

    /// True iff the generators are linearly independent.
    pub fn independent(&self) -> bool {
        rank(&to_complex(&self.generators)) == self.generators.ncols()
    }

    /// Rank of the vector parts of the generators (dimension of the orbits).
    pub fn orbit_dim(&self) -> usize {
        let n = self.frame_dim();
        rank(&to_complex(&self.generators.rows(0, n).into_owned()))
    }
}

/// `(K^⊥ / K ∩ K^⊥)` at a point, with the induced pairing.
#[derive(Clone, Debug)]
pub struct ReducedSpace {
    pub k_perp: DMatrix<f64>,
    pub radical: DMatrix<f64>,
    /// Representatives of a complement of `K ∩ K^⊥` inside `K^⊥`.
    pub quotient: DMatrix<f64>,
    pub induced_pairing: DMatrix<f64>,
    /// `K` is isotropic.
    pub exact: bool,
    pub signature: (usize, usize, usize),
}

impl ReducedSpace {
    pub fn dim(&self) -> usize {
        self.quotient.ncols()
    }
}

/// Largest entry of the pairing restricted to the span of `k`.
fn isotropy_defect(p: &DMatrix<f64>, k: &DMatrix<f64>) -> f64 {
    max_abs(&(k.transpose() * p * k))
}

pub fn reduce_pointwise(a: &LiftedActionPoint) -> Result<ReducedSpace> {
    let p = &a.pairing;
    let k = &a.generators;
    let scale = max_abs(k).max(1.0);
    let exact = isotropy_defect(p, k) <= 1e-10 * scale * scale;
    let k_perp = if k.ncols() == 0 {
        DMatrix::identity(p.nrows(), p.nrows())
    } else {
        re(&nullspace(&to_complex(&(k.transpose() * p))))
    };
    // K ∩ K^⊥ as the kernel of the pairing restricted to K.
    let kc = re(&orth(&to_complex(k)));
    let radical = if kc.ncols() == 0 {
        DMatrix::zeros(p.nrows(), 0)
    } else {
        // kc is orthonormal, so an absolute threshold on the restricted
        // pairing is meaningful even when the restriction vanishes.
        let eig = (kc.transpose() * p * &kc).symmetric_eigen();
        let cols: Vec<_> = (0..kc.ncols())
            .filter(|&i| eig.eigenvalues[i].abs() <= 1e-10)
            .map(|i| &kc * eig.eigenvectors.column(i))
            .collect();
        if cols.is_empty() {
            DMatrix::zeros(p.nrows(), 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    };
    // Euclidean complement of the radical inside K^⊥.
    let quotient = if radical.ncols() == 0 {
        k_perp.clone()
    } else {
        let q = to_complex(&radical);
        let proj = &q * q.adjoint();
        let rest = to_complex(&k_perp) - &proj * to_complex(&k_perp);
        re(&orth(&rest))
    };
    let induced = quotient.transpose() * p * &quotient;
    let signature = signature(&to_complex(&induced));
    Ok(ReducedSpace { k_perp, radical, quotient, induced_pairing: induced, exact, signature })
}

/// Exactness read off from dimensions alone: a free action with orbits of
/// dimension `r` has an exact reduction iff `dim E_red = 2(N - r)`.
pub fn exact_by_dimension(a: &LiftedActionPoint, red: &ReducedSpace) -> bool {
    red.dim() == 2 * (a.frame_dim() - a.orbit_dim())
}

/// Pairing matrix `⟨Ψ_i, Ψ_j⟩` of invariant sections at a point.
pub fn lift_pairing_at(psi: &[Section], p: &Point) -> Result<DMatrix<f64>> {
    let m = psi.len();
    let mut out = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            out[(i, j)] = pairing(&psi[i], &psi[j])?.eval(p)?.re;
        }
    }
    Ok(out)
}

/// True iff every `⟨Ψ_i, Ψ_j⟩` varies by at most `tol` over the points.
pub fn check_pairing_constant(psi: &[Section], points: &[Point], tol: f64) -> Result<bool> {
    let Some(first) = points.first() else {
        return Ok(true);
    };
    let reference = lift_pairing_at(psi, first)?;
    for p in &points[1..] {
        if max_abs(&(lift_pairing_at(psi, p)? - &reference)) > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The lift of the doubled torus action to the correspondence space:
/// `Ψ(t_i) = ∂_{θ_i} + i_{∂_{θ_i}} F` and `Ψ(t̃_j) = ∂_{θ̃_j}`.
///
/// The sign of the `F` term matches the lift `ξ(∂_θ) = F(X̂, ∂_θ)` used by φ.
pub fn duality_lift(pair: &DualityPair) -> Result<(Vec<Section>, Vec<Section>)> {
    let corr = pair.corr();
    let cf = corr.coframe();
    let (fib, dual) = corr.fiber_indices();
    let k = fib
        .iter()
        .map(|&i| {
            let e = FrameVector::unit(cf, i);
            Section::new(e.clone(), pair.f().contract(&e)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let kt = dual.iter().map(|&j| Section::vector(FrameVector::unit(cf, j))).collect();
    Ok((k, kt))
}

/// Frame bookkeeping for the correspondence space at a point.
struct Layout {
    n: usize,
    /// Correspondence index of each generator of `M`, in `M`'s order.
    to_m: Vec<usize>,
    to_mt: Vec<usize>,
    fib: Vec<usize>,
    dual: Vec<usize>,
}

fn layout(pair: &DualityPair) -> Result<Layout> {
    let cf = pair.corr().coframe();
    let find = |name: &str| cf.index(name).ok_or_else(|| Error::CoframeMismatch(format!("{name} missing on the correspondence")));
    let to_m = pair.m().coframe().gens().iter().map(|g| find(&g.name)).collect::<Result<Vec<_>>>()?;
    let to_mt = pair.mt().coframe().gens().iter().map(|g| find(&g.name)).collect::<Result<Vec<_>>>()?;
    let (fib, dual) = pair.corr().fiber_indices();
    Ok(Layout { n: cf.dim(), to_m, to_mt, fib, dual })
}

/// `F(e_a, e_b)` on the correspondence frame at `p`.
pub fn f_matrix(pair: &DualityPair, p: &Point) -> Result<DMatrix<f64>> {
    let cf = pair.corr().coframe();
    let n = cf.dim();
    let mut out = DMatrix::zeros(n, n);
    for a in 0..n {
        let ia = pair.f().contract(&FrameVector::unit(cf, a))?;
        for b in 0..n {
            out[(a, b)] = ia.contract(&FrameVector::unit(cf, b))?.coeff(0).eval(p)?.re;
        }
    }
    Ok(out)
}

/// Outcome of realizing a T-dual pair as two reductions of its correspondence.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionReport {
    /// Largest pairing between generators of `K`, and of `K̃`.
    pub k_isotropy: f64,
    pub kt_isotropy: f64,
    /// Signature of the pairing on `𝒦 = K ⊕ K̃`.
    pub signature: (usize, usize, usize),
    pub k_perp_dim: usize,
    pub m_dim: usize,
    pub mt_dim: usize,
    /// Isometry defects of `𝒦^⊥ → T⊕T*` of `M` and of `M̃` (1 if not bijective).
    pub defect_m: f64,
    pub defect_mt: f64,
}

impl ReductionReport {
    pub fn passes(&self, tol: f64) -> bool {
        let k = self.signature.0;
        self.k_isotropy <= tol
            && self.kt_isotropy <= tol
            && self.signature == (k, k, 0)
            && self.defect_m <= tol
            && self.defect_mt <= tol
    }
}

/// Maps from `W` to `T⊕T*` of `M` (drop `θ̃`) and of `M̃` (apply `e^{-F}`, drop `θ`).
fn route_maps(l: &Layout, f: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = l.n;
    let restrict = |targets: &[usize]| {
        let d = targets.len();
        let mut a = DMatrix::zeros(2 * d, 2 * n);
        for (i, &src) in targets.iter().enumerate() {
            a[(i, src)] = 1.0;
            a[(d + i, n + src)] = 1.0;
        }
        a
    };
    let a_m = restrict(&l.to_m);
    // e^{-F}(X + ξ) = X + ξ - i_X F, with (i_X F)_b = Σ_a X^a F_ab.
    let mut e_f = DMatrix::identity(2 * n, 2 * n);
    e_f.view_mut((n, 0), (n, n)).copy_from(&(-f.transpose()));
    let a_mt = restrict(&l.to_mt) * e_f;
    (a_m, a_mt)
}

fn isometry_defect(a: &DMatrix<f64>, basis: &DMatrix<f64>, p_w: &DMatrix<f64>) -> f64 {
    let img = a * basis;
    if rank(&to_complex(&img)) != img.nrows() {
        return 1.0;
    }
    let d = img.nrows() / 2;
    max_abs(&(img.transpose() * pairing_matrix(d) * &img - basis.transpose() * p_w * basis))
}

/// The two reductions of the correspondence at `p` for an arbitrary `F`
/// matrix on its frame.
fn reduce_correspondence(l: &Layout, f: &DMatrix<f64>) -> Result<(ReductionReport, DMatrix<f64>)> {
    let n = l.n;
    let p_w = pairing_matrix(n);
    let mut k = DMatrix::zeros(2 * n, l.fib.len());
    for (c, &i) in l.fib.iter().enumerate() {
        k[(i, c)] = 1.0;
        for b in 0..n {
            k[(n + b, c)] = f[(i, b)];
        }
    }
    let mut kt = DMatrix::zeros(2 * n, l.dual.len());
    for (c, &j) in l.dual.iter().enumerate() {
        kt[(j, c)] = 1.0;
    }
    let big = re(&hcat(&to_complex(&k), &to_complex(&kt)));
    let signature = signature(&to_complex(&(big.transpose() * &p_w * &big)));
    let kp = re(&nullspace(&to_complex(&(big.transpose() * &p_w))));
    let (a_m, a_mt) = route_maps(l, f);
    let report = ReductionReport {
        k_isotropy: isotropy_defect(&p_w, &k),
        kt_isotropy: isotropy_defect(&p_w, &kt),
        signature,
        k_perp_dim: kp.ncols(),
        m_dim: l.to_m.len(),
        mt_dim: l.to_mt.len(),
        defect_m: isometry_defect(&a_m, &kp, &p_w),
        defect_mt: isometry_defect(&a_mt, &kp, &p_w),
    };
    Ok((report, kp))
}

/// Realizes `(M, M̃)` as the two reductions of the correspondence space by
/// `K̃` and `K` at `p`, and checks the induced map `M → M̃` is φ.
pub fn duality_via_reduction(pair: &DualityPair, p: &Point) -> Result<(ReductionReport, f64)> {
    let l = layout(pair)?;
    if pair.corr().fiber_block_at(p)?.determinant().abs() < 1e-12 {
        return Err(Error::Singular("fiber block of F".into()));
    }
    let f = f_matrix(pair, p)?;
    let (report, kp) = reduce_correspondence(&l, &f)?;
    let (a_m, a_mt) = route_maps(&l, &f);
    let phi = re(&pair.phi_matrix(p)?);
    let phi_defect = max_abs(&(&a_mt * &kp - &phi * (&a_m * &kp)));
    Ok((report, phi_defect))
}

/// As [`duality_via_reduction`] with `F` replaced by `scale · F` pointwise.
pub fn reduction_with_scaled_f(pair: &DualityPair, p: &Point, scale: f64) -> Result<ReductionReport> {
    let l = layout(pair)?;
    Ok(reduce_correspondence(&l, &(f_matrix(pair, p)? * scale))?.0)
}

/// Frame data of the correspondence `ℳ ⊂ 𝒩 = M × M̃` at a point.
pub struct ProductFrame {
    /// `ι: Tℳ → T𝒩`, with `T𝒩` ordered as (frame of `M`, frame of `M̃`).
    pub iota: DMatrix<f64>,
    pub m_dim: usize,
}

pub fn product_frame(pair: &DualityPair) -> Result<ProductFrame> {
    let l = layout(pair)?;
    let (nm, nmt) = (l.to_m.len(), l.to_mt.len());
    let mut iota = DMatrix::zeros(nm + nmt, l.n);
    for (i, &a) in l.to_m.iter().enumerate() {
        iota[(i, a)] = 1.0;
    }
    for (i, &a) in l.to_mt.iter().enumerate() {
        iota[(nm + i, a)] = 1.0;
    }
    Ok(ProductFrame { iota, m_dim: nm })
}

/// `τ_F = {X + ξ : X ∈ Tℳ, ξ|_ℳ = F(X, ·)}` as columns in `(X_𝒩, ξ_𝒩)` coordinates.
pub fn generalized_tangent(f: &DMatrix<f64>, frame: &ProductFrame) -> DMatrix<f64> {
    let iota = &frame.iota;
    let (big, small) = iota.shape();
    // Minimal-norm ξ with ιᵀξ = F(e_a, ·), plus the conormal directions.
    let gram_inv = (iota.transpose() * iota).try_inverse().expect("ι is injective");
    let lift = iota * gram_inv;
    let conormal = re(&nullspace(&to_complex(&iota.transpose())));
    let mut cols = DMatrix::zeros(2 * big, small + conormal.ncols());
    for a in 0..small {
        cols.view_mut((0, a), (big, 1)).copy_from(&iota.column(a));
        let row = f.row(a).transpose();
        cols.view_mut((big, a), (big, 1)).copy_from(&(&lift * row));
    }
    for c in 0..conormal.ncols() {
        cols.view_mut((big, small + c), (big, 1)).copy_from(&conormal.column(c));
    }
    cols
}

/// `τ_M = TM ⊕ T*M` inside `T𝒩 ⊕ T*𝒩`.
fn tangent_of_m(frame: &ProductFrame) -> DMatrix<f64> {
    let big = frame.iota.nrows();
    let nm = frame.m_dim;
    let mut cols = DMatrix::zeros(2 * big, 2 * nm);
    for i in 0..nm {
        cols[(i, i)] = 1.0;
        cols[(big + i, nm + i)] = 1.0;
    }
    cols
}

#[derive(Clone, Debug, Serialize)]
pub struct Transversality {
    /// `τ_F ∩ τ_M = 0`.
    pub transversal: bool,
    /// The fiber block `F(∂_θ, ∂_θ̃)` is invertible.
    pub fiber_block_nondegenerate: bool,
}

/// Both sides of the transversality criterion for an arbitrary `F` matrix.
pub fn transversality_with(pair: &DualityPair, f: &DMatrix<f64>) -> Result<Transversality> {
    let frame = product_frame(pair)?;
    let l = layout(pair)?;
    let tau_f = generalized_tangent(f, &frame);
    let transversal = intersection_dim(&to_complex(&tau_f), &to_complex(&tangent_of_m(&frame))) == 0;
    let blk = DMatrix::from_fn(l.fib.len(), l.dual.len(), |i, j| f[(l.fib[i], l.dual[j])]);
    let fiber_block_nondegenerate = rank(&to_complex(&blk)) == l.fib.len();
    Ok(Transversality { transversal, fiber_block_nondegenerate })
}

pub fn check_transversal(pair: &DualityPair, p: &Point) -> Result<Transversality> {
    transversality_with(pair, &f_matrix(pair, p)?)
}

/// The two routes of the generalized submanifold criterion.
#[derive(Clone, Debug, Serialize)]
pub struct FourierMukai {
    /// Defect of `τ_F` being invariant under `(𝒥, c𝒥̃c⁻¹)`.
    pub submanifold_defect: f64,
    /// `|𝒥̃ - φ𝒥φ⁻¹|`.
    pub conjugation_defect: f64,
}

impl FourierMukai {
    pub fn by_submanifold(&self, tol: f64) -> bool {
        self.submanifold_defect <= tol
    }

    pub fn by_conjugation(&self, tol: f64) -> bool {
        self.conjugation_defect <= tol
    }
}

pub fn check_fourier_mukai(rho: &Form, rho_t: &Form, pair: &DualityPair, p: &Point) -> Result<FourierMukai> {
    let nm = pair.m().coframe().dim();
    let nmt = pair.mt().coframe().dim();
    let j = gcs_endomorphism(nm, &rho.eval(p)?)?;
    let jt = gcs_endomorphism(nmt, &rho_t.eval(p)?)?;
    // (𝒥, c𝒥̃c⁻¹) on T𝒩 ⊕ T*𝒩 ordered (X_M, X_M̃, ξ_M, ξ_M̃).
    let big = nm + nmt;
    let mut c = DMatrix::<f64>::identity(2 * nmt, 2 * nmt);
    for i in nmt..2 * nmt {
        c[(i, i)] = -1.0;
    }
    let jt_c = &c * &jt * &c;
    let slots = |side_m: bool, form: bool, i: usize| -> usize {
        let base = if form { big } else { 0 };
        if side_m {
            base + i
        } else {
            base + nm + i
        }
    };
    let mut total = DMatrix::zeros(2 * big, 2 * big);
    for r in 0..2 * nm {
        for s in 0..2 * nm {
            total[(slots(true, r >= nm, r % nm), slots(true, s >= nm, s % nm))] = j[(r, s)];
        }
    }
    for r in 0..2 * nmt {
        for s in 0..2 * nmt {
            total[(slots(false, r >= nmt, r % nmt), slots(false, s >= nmt, s % nmt))] = jt_c[(r, s)];
        }
    }
    let frame = product_frame(pair)?;
    let tau_f = to_complex(&generalized_tangent(&f_matrix(pair, p)?, &frame));
    let submanifold_defect = span_defect(&tau_f, &(to_complex(&total) * &tau_f));
    let phi = re(&pair.phi_matrix(p)?);
    let phi_inv = phi.clone().try_inverse().ok_or_else(|| Error::Singular("φ at the point".into()))?;
    let conjugation_defect = max_abs(&(&jt - &phi * &j * phi_inv));
    Ok(FourierMukai { submanifold_defect, conjugation_defect })
}
