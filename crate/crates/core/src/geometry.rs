//! The polar geometry, written once over a coefficient abstraction.
//!
//! Vectors live in `X = L_0 ⊕ K^{2l}`: an anisotropic module part `v` and
//! hyperbolic coordinates `a_1, ..., a_2l` grouped into pairs
//! `(a_1, a_2), (a_3, a_4), ...`. The same code runs on two coefficient
//! semantics:
//!
//! * the exact source space, where scalars are skew-field elements compared
//!   exactly, and
//! * the residue target space, where scalars are subring representatives
//!   compared modulo the maximal ideal and canonicalized through a finite
//!   residue table.
//!
//! Every geometric operation (forms, point normalization, echelonization,
//! perpendicular filtering) is parameterized by a [`Coeffs`] implementation
//! supplying the involution, equality, inversion, canonicalization, the base
//! subset test, and the anisotropic-module hooks.

use crate::error::{Error, Result};
use crate::pqspace::PseudoQuadraticSpace;
use crate::sample::{HeightCfg, Sampler};
use crate::scalar::{parse_scalar, FieldTag, SkewScalar};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormKind {
    /// Sigma-quadratic values modulo the base subset; collinearity through
    /// the skew-hermitian companion form.
    PseudoQuadratic,
    /// Plain quadratic values over a commutative field; collinearity through
    /// the polarization `q(x+y) - q(x) - q(y)`.
    Quadratic,
}

/// Coefficient semantics the geometry is generic over.
pub trait Coeffs {
    fn field(&self) -> FieldTag;
    fn l(&self) -> usize;
    fn dim0(&self) -> usize;
    fn form_kind(&self) -> FormKind;
    /// The involution paired with the form (possibly twisted).
    fn sigma(&self, x: &SkewScalar) -> SkewScalar;
    /// Canonical representative of the class of `x` (identity for the source).
    fn canonical(&self, x: &SkewScalar) -> SkewScalar;
    fn is_zero(&self, x: &SkewScalar) -> bool;
    /// Multiplicative inverse of the class of `x`; errors when there is none.
    fn inv(&self, x: &SkewScalar) -> Result<SkewScalar>;
    /// Membership in the subset the form is taken modulo. For quadratic
    /// coefficients this is the zero test.
    fn in_k0(&self, x: &SkewScalar) -> bool;
    fn module_q0(&self, v: &[SkewScalar]) -> SkewScalar;
    fn module_f0(&self, v: &[SkewScalar], w: &[SkewScalar]) -> SkewScalar;
    fn module_canonical(&self, v: &[SkewScalar]) -> Vec<SkewScalar>;
    fn module_is_zero(&self, v: &[SkewScalar]) -> bool;

    fn zero(&self) -> SkewScalar {
        SkewScalar::zero(self.field())
    }

    fn eq(&self, x: &SkewScalar, y: &SkewScalar) -> bool {
        self.is_zero(&x.sub(y))
    }
}

/// Exact coefficients of a source space.
#[derive(Debug, Clone, Copy)]
pub struct SourceCoeffs<'a> {
    pub space: &'a PseudoQuadraticSpace,
}

impl<'a> Coeffs for SourceCoeffs<'a> {
    fn field(&self) -> FieldTag {
        self.space.field()
    }

    fn l(&self) -> usize {
        self.space.l
    }

    fn dim0(&self) -> usize {
        self.space.dim0
    }

    fn form_kind(&self) -> FormKind {
        FormKind::PseudoQuadratic
    }

    fn sigma(&self, x: &SkewScalar) -> SkewScalar {
        self.space.skew.sigma(x)
    }

    fn canonical(&self, x: &SkewScalar) -> SkewScalar {
        x.clone()
    }

    fn is_zero(&self, x: &SkewScalar) -> bool {
        x.is_zero()
    }

    fn inv(&self, x: &SkewScalar) -> Result<SkewScalar> {
        x.inv()
    }

    fn in_k0(&self, x: &SkewScalar) -> bool {
        self.space.in_k0(x)
    }

    fn module_q0(&self, v: &[SkewScalar]) -> SkewScalar {
        self.space.module_q0(v)
    }

    fn module_f0(&self, v: &[SkewScalar], w: &[SkewScalar]) -> SkewScalar {
        self.space.module_f0(v, w)
    }

    fn module_canonical(&self, v: &[SkewScalar]) -> Vec<SkewScalar> {
        v.to_vec()
    }

    fn module_is_zero(&self, v: &[SkewScalar]) -> bool {
        v.iter().all(|c| c.is_zero())
    }
}

// ---------------------------------------------------------------------------
// Vectors
// ---------------------------------------------------------------------------

/// A vector `(v | a_1, ..., a_2l)` of `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XVector {
    pub v: Vec<SkewScalar>,
    pub a: Vec<SkewScalar>,
}

impl XVector {
    pub fn new(v: Vec<SkewScalar>, a: Vec<SkewScalar>) -> Self {
        XVector { v, a }
    }

    pub fn zero<C: Coeffs>(c: &C) -> Self {
        XVector {
            v: vec![c.zero(); c.dim0()],
            a: vec![c.zero(); 2 * c.l()],
        }
    }

    /// The hyperbolic basis vector `e_index`, `index` in `1..=2l`.
    pub fn basis<C: Coeffs>(c: &C, index: usize) -> Self {
        assert!((1..=2 * c.l()).contains(&index));
        let mut x = XVector::zero(c);
        x.a[index - 1] = SkewScalar::one(c.field());
        x
    }

    pub fn add(&self, o: &XVector) -> XVector {
        XVector {
            v: self.v.iter().zip(&o.v).map(|(a, b)| a.add(b)).collect(),
            a: self.a.iter().zip(&o.a).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &XVector) -> XVector {
        XVector {
            v: self.v.iter().zip(&o.v).map(|(a, b)| a.sub(b)).collect(),
            a: self.a.iter().zip(&o.a).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn neg(&self) -> XVector {
        XVector {
            v: self.v.iter().map(|a| a.neg()).collect(),
            a: self.a.iter().map(|a| a.neg()).collect(),
        }
    }

    /// Right scalar action, coordinatewise.
    pub fn scale(&self, s: &SkewScalar) -> XVector {
        XVector {
            v: self.v.iter().map(|a| a.mul(s)).collect(),
            a: self.a.iter().map(|a| a.mul(s)).collect(),
        }
    }

    pub fn canonicalize<C: Coeffs>(&self, c: &C) -> XVector {
        XVector {
            v: c.module_canonical(&self.v),
            a: self.a.iter().map(|x| c.canonical(x)).collect(),
        }
    }

    pub fn is_zero<C: Coeffs>(&self, c: &C) -> bool {
        c.module_is_zero(&self.v) && self.a.iter().all(|x| c.is_zero(x))
    }

    /// Parses `(v_1,...|a_1,...,a_2l)`; the module part may be empty.
    pub fn parse(field: FieldTag, dim0: usize, l: usize, input: &str) -> Result<Self> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = s
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("vector literal `{input}` is not parenthesized")))?;
        let (vpart, apart) = inner
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("vector literal `{input}` has no `|`")))?;
        let parse_list = |part: &str| -> Result<Vec<SkewScalar>> {
            if part.is_empty() {
                return Ok(Vec::new());
            }
            part.split(',').map(|t| parse_scalar(field, t)).collect()
        };
        let v = parse_list(vpart)?;
        let a = parse_list(apart)?;
        if v.len() != dim0 {
            return Err(Error::Parse(format!(
                "module part has {} coordinates, expected {dim0}",
                v.len()
            )));
        }
        if a.len() != 2 * l {
            return Err(Error::Parse(format!(
                "hyperbolic part has {} coordinates, expected {}",
                a.len(),
                2 * l
            )));
        }
        Ok(XVector { v, a })
    }
}

impl fmt::Display for XVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (idx, c) in self.v.iter().enumerate() {
            if idx > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "|")?;
        for (idx, c) in self.a.iter().enumerate() {
            if idx > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

// ---------------------------------------------------------------------------
// Forms
// ---------------------------------------------------------------------------

/// The form value `q(x) = q_0(v) + sum of sigma(a_{2m-1}) a_{2m}`.
pub fn form_q<C: Coeffs>(c: &C, x: &XVector) -> SkewScalar {
    let mut acc = c.module_q0(&x.v);
    for m in 0..c.l() {
        acc = acc.add(&c.sigma(&x.a[2 * m]).mul(&x.a[2 * m + 1]));
    }
    acc
}

/// The bilinear companion used for perpendicularity.
///
/// Pseudo-quadratic case: the skew-hermitian form
/// `f_0(v, w) + sum of (sigma(a_{2m-1}) b_{2m} - sigma(a_{2m}) b_{2m-1})`,
/// which satisfies `q(x+y) - q(x) - q(y) - f(x, y)` in the base subset.
/// Quadratic case: the polarization `q(x+y) - q(x) - q(y)`.
pub fn form_f<C: Coeffs>(c: &C, x: &XVector, y: &XVector) -> SkewScalar {
    match c.form_kind() {
        FormKind::PseudoQuadratic => {
            let mut acc = c.module_f0(&x.v, &y.v);
            for m in 0..c.l() {
                let pos = c.sigma(&x.a[2 * m]).mul(&y.a[2 * m + 1]);
                let neg = c.sigma(&x.a[2 * m + 1]).mul(&y.a[2 * m]);
                acc = acc.add(&pos).sub(&neg);
            }
            acc
        }
        FormKind::Quadratic => {
            let sum = form_q(c, &x.add(y));
            sum.sub(&form_q(c, x)).sub(&form_q(c, y))
        }
    }
}

pub fn is_singular_vector<C: Coeffs>(c: &C, x: &XVector) -> bool {
    c.in_k0(&form_q(c, x))
}

pub fn perpendicular<C: Coeffs>(c: &C, x: &XVector, y: &XVector) -> bool {
    c.is_zero(&form_f(c, x, y))
}

// ---------------------------------------------------------------------------
// Points
// ---------------------------------------------------------------------------

/// A singular projective point, stored as the canonical representative whose
/// last nonzero hyperbolic coordinate is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Point {
    pub rep: XVector,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.rep)
    }
}

fn last_unit_index<C: Coeffs>(c: &C, x: &XVector) -> Option<usize> {
    (0..x.a.len()).rev().find(|&i| !c.is_zero(&x.a[i]))
}

/// Builds the singular point spanned by `x`; rejects zero vectors and
/// non-singular ones (the witness carries the offending form value).
pub fn point<C: Coeffs>(c: &C, x: &XVector) -> Result<Point> {
    if x.is_zero(c) {
        return Err(Error::ZeroCoordinates);
    }
    let q = form_q(c, x);
    if !c.in_k0(&q) {
        return Err(Error::NonSingular(format!("q({x}) = {}", c.canonical(&q))));
    }
    let pivot = last_unit_index(c, x).ok_or_else(|| {
        // A singular vector with all hyperbolic coordinates zero contradicts
        // anisotropy of the module form.
        Error::Internal(format!("anisotropy violated by {x}"))
    })?;
    let inv = c.inv(&x.a[pivot])?;
    Ok(Point {
        rep: x.scale(&inv).canonicalize(c),
    })
}

// ---------------------------------------------------------------------------
// Totally singular subspaces
// ---------------------------------------------------------------------------

/// A totally singular subspace, stored as the unique reduced echelon basis
/// with pivots (last nonzero hyperbolic coordinates) in descending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    pub basis: Vec<XVector>,
}

impl Subspace {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{{")?;
        for (idx, b) in self.basis.iter().enumerate() {
            if idx > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "}}")
    }
}

fn pivot_of<C: Coeffs>(c: &C, x: &XVector) -> usize {
    last_unit_index(c, x).expect("echelon row without pivot")
}

/// Reduces `x` against the normalized rows of `basis` and canonicalizes.
fn reduce_against<C: Coeffs>(c: &C, basis: &[XVector], x: &XVector) -> XVector {
    let mut x = x.clone();
    for b in basis {
        let coef = x.a[pivot_of(c, b)].clone();
        if !c.is_zero(&coef) {
            x = x.sub(&b.scale(&coef));
        }
    }
    x.canonicalize(c)
}

fn insert_row<C: Coeffs>(c: &C, basis: &mut Vec<XVector>, row: &XVector) -> Result<()> {
    let x = reduce_against(c, basis, row);
    match last_unit_index(c, &x) {
        None => {
            if c.module_is_zero(&x.v) {
                Ok(()) // dependent row
            } else {
                Err(Error::NonSingular(format!(
                    "span contains {x} with zero hyperbolic part and nonzero module part"
                )))
            }
        }
        Some(p) => {
            let inv = c.inv(&x.a[p])?;
            let x = x.scale(&inv).canonicalize(c);
            for b in basis.iter_mut() {
                let coef = b.a[p].clone();
                if !c.is_zero(&coef) {
                    *b = b.sub(&x.scale(&coef)).canonicalize(c);
                }
            }
            basis.push(x);
            Ok(())
        }
    }
}

/// Echelonizes the span of `rows` and verifies it is totally singular:
/// every basis vector singular and pairwise perpendicular. The returned
/// basis is the canonical one, independent of the order of `rows`.
pub fn echelonize<C: Coeffs>(c: &C, rows: &[XVector]) -> Result<Subspace> {
    let mut basis: Vec<XVector> = Vec::new();
    for row in rows {
        insert_row(c, &mut basis, row)?;
    }
    basis.sort_by_key(|b| std::cmp::Reverse(pivot_of(c, b)));
    for b in &basis {
        let q = form_q(c, b);
        if !c.in_k0(&q) {
            return Err(Error::NonSingular(format!(
                "q({b}) = {}",
                c.canonical(&q)
            )));
        }
    }
    for (i, bi) in basis.iter().enumerate() {
        for bj in basis.iter().skip(i + 1) {
            let f = form_f(c, bi, bj);
            if !c.is_zero(&f) {
                return Err(Error::NonSingular(format!(
                    "f({bi}, {bj}) = {}",
                    c.canonical(&f)
                )));
            }
        }
    }
    Ok(Subspace { basis })
}

pub fn subspace_contains<C: Coeffs>(c: &C, s: &Subspace, x: &XVector) -> bool {
    reduce_against(c, &s.basis, x).is_zero(c)
}

/// The line through two distinct collinear points.
pub fn line_through<C: Coeffs>(c: &C, p: &Point, q: &Point) -> Result<Subspace> {
    echelonize(c, &[p.rep.clone(), q.rep.clone()])
}

/// Two distinct singular points are collinear exactly when they are
/// perpendicular; then their span is a singular line.
pub fn collinear<C: Coeffs>(c: &C, p: &Point, q: &Point) -> bool {
    p != q && perpendicular(c, &p.rep, &q.rep)
}

/// Intersects `s` with the perpendicular hyperplane of `p`. Returns all of
/// `s` when `p` is already perpendicular to it; rejects `p` inside `s`.
pub fn perp_filter<C: Coeffs>(c: &C, s: &Subspace, p: &Point) -> Result<Subspace> {
    if subspace_contains(c, s, &p.rep) {
        return Err(Error::PointInSubspace);
    }
    let beta: Vec<SkewScalar> = s.basis.iter().map(|b| form_f(c, b, &p.rep)).collect();
    let Some(i0) = beta.iter().position(|b| !c.is_zero(b)) else {
        return Ok(s.clone());
    };
    // For x = sum of b_i c_i the value f(x, p) is sum of sigma(c_i) beta_i,
    // so replacing b_j by b_j - b_{i0} * inv(sigma(beta_{i0})) * sigma(beta_j)
    // lands it in the kernel.
    let inv_s_beta0 = c.inv(&c.sigma(&beta[i0]))?;
    let mut rows = Vec::new();
    for (j, b) in s.basis.iter().enumerate() {
        if j == i0 {
            continue;
        }
        let coef = inv_s_beta0.mul(&c.sigma(&beta[j]));
        rows.push(b.sub(&s.basis[i0].scale(&coef)));
    }
    echelonize(c, &rows)
}

/// The nested chain of singular subspaces spanned by
/// `e_2l`, then `e_2l, e_2l-2`, and so on down to rank `l`.
pub fn standard_chamber<C: Coeffs>(c: &C) -> Vec<Subspace> {
    let l = c.l();
    let mut members = Vec::new();
    let mut rows: Vec<XVector> = Vec::new();
    for r in 1..=l {
        rows.push(XVector::basis(c, 2 * (l - r + 1)));
        members.push(echelonize(c, &rows).expect("chamber spans are singular"));
    }
    members
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// A random singular vector of the exact source space: all coordinates are
/// drawn freely except one hyperbolic pair, where one side is forced nonzero
/// and the other solved so that `q(x)` lands on a random rational.
pub fn sample_singular_vector(
    space: &PseudoQuadraticSpace,
    sampler: &mut Sampler,
    cfg: &HeightCfg,
) -> XVector {
    let c = SourceCoeffs { space };
    let field = space.field();
    let mut x = XVector {
        v: (0..space.dim0).map(|_| sampler.scalar(field, cfg)).collect(),
        a: (0..2 * space.l).map(|_| sampler.scalar(field, cfg)).collect(),
    };
    let m = sampler.gen_range(0, space.l as i64) as usize;
    let solve_even = sampler.gen_bool();
    // index 2m holds the pair's sigma-side coordinate, index 2m+1 the other
    let (forced, solved) = if solve_even {
        (2 * m, 2 * m + 1)
    } else {
        (2 * m + 1, 2 * m)
    };
    // sparsify: zeroed coordinates exercise the edge patterns downstream
    for slot in x.a.iter_mut() {
        if sampler.gen_range(0, 4) == 0 {
            *slot = SkewScalar::zero(field);
        }
    }
    x.a[forced] = sampler.nonzero_scalar(field, cfg);
    x.a[solved] = SkewScalar::zero(field);
    let rest = form_q(&c, &x);
    let target = SkewScalar::from_rational(field, sampler.rational(cfg));
    let gap = target.sub(&rest);
    // fill the solved slot so the pair contributes sigma(a_2m) a_2m+1 = gap
    x.a[solved] = if solve_even {
        space
            .skew
            .sigma(&x.a[forced])
            .inv()
            .expect("forced nonzero")
            .mul(&gap)
    } else {
        space
            .skew
            .sigma(&gap.mul(&x.a[forced].inv().expect("forced nonzero")))
    };
    debug_assert!(is_singular_vector(&c, &x));
    x
}
