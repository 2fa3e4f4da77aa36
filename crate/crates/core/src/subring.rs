//! Total subrings of the shipped skew fields, given by exact valuations.
//!
//! Three subrings are built in:
//!
//! * `inert-gaussian`: the local ring of the Gaussian rationals at 3, where
//!   the prime stays prime; `v(x + iy) = min(v_3(x), v_3(y))`, residue field
//!   of order 9.
//! * `ramified-quaternion`: the valuation ring of the rational quaternions
//!   at 2, where the prime ramifies; `v(a) = v_2(N(a)) / 2` takes
//!   half-integer values, residue field of order 4.
//! * `split-gaussian`: the local ring of the Gaussian rationals at the prime
//!   `2 + i` over 5. This one is **not** stable under conjugation — it ships
//!   as the negative control that the coset condition checks must reject.
//!
//! All valuations are computed exactly, so membership in the subring, its
//! maximal ideal, and its unit group are decidable, and residue classes have
//! canonical representatives from finite tables.

use crate::error::{Error, Result};
use crate::pqspace::{PseudoQuadraticSpace, TElem};
use crate::sample::{HeightCfg, Sampler};
use crate::scalar::{parse_scalar, FieldTag, SkewScalar};
use num::bigint::BigInt;
use num::integer::Integer;
use num::rational::{BigRational, Ratio};
use num::traits::Zero;
use serde::{Deserialize, Serialize};

/// Valuation values: rationals with small denominator (1 or 2 here).
pub type Val = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubringKind {
    InertGaussian,
    RamifiedQuaternion,
    SplitGaussian,
}

impl SubringKind {
    pub fn field(&self) -> FieldTag {
        match self {
            SubringKind::InertGaussian | SubringKind::SplitGaussian => FieldTag::GaussianRational,
            SubringKind::RamifiedQuaternion => FieldTag::RationalQuaternion,
        }
    }

    pub fn prime(&self) -> i64 {
        match self {
            SubringKind::InertGaussian => 3,
            SubringKind::RamifiedQuaternion => 2,
            SubringKind::SplitGaussian => 5,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SubringKind::InertGaussian => "inert-p3",
            SubringKind::RamifiedQuaternion => "ramified-p2",
            SubringKind::SplitGaussian => "split-p5",
        }
    }
}

/// `p`-adic exponent of a nonzero integer.
fn int_val(n: &BigInt, p: i64) -> i64 {
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// `p`-adic exponent of a rational; `None` for zero.
pub fn rat_val(q: &BigRational, p: i64) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    Some(int_val(q.numer(), p) - int_val(q.denom(), p))
}

/// Value in `0..p` of a `p`-integral rational, via the inverse of the
/// denominator modulo the prime `p`.
fn rat_mod_p(q: &BigRational, p: i64) -> i64 {
    let pb = BigInt::from(p);
    let n = q.numer().mod_floor(&pb);
    let d = q.denom().mod_floor(&pb);
    let n = i64::try_from(&n).expect("reduced below p");
    let d = i64::try_from(&d).expect("reduced below p");
    assert!(d != 0, "denominator not invertible modulo {p}");
    // Fermat inverse; p is a small prime here.
    let mut inv = 1i64;
    let mut base = d % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            inv = inv * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    n * inv % p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TotalSubring {
    pub kind: SubringKind,
}

impl TotalSubring {
    pub fn new(kind: SubringKind) -> Self {
        TotalSubring { kind }
    }

    pub fn field(&self) -> FieldTag {
        self.kind.field()
    }

    fn lit(&self, s: &str) -> SkewScalar {
        parse_scalar(self.field(), s).expect("builtin literal")
    }

    /// An element of smallest positive valuation.
    pub fn uniformizer(&self) -> SkewScalar {
        match self.kind {
            SubringKind::InertGaussian => self.lit("3"),
            SubringKind::RamifiedQuaternion => self.lit("1+i"),
            SubringKind::SplitGaussian => self.lit("2+i"),
        }
    }

    /// The valuation of the uniformizer: the granularity of the value group.
    pub fn granularity(&self) -> Val {
        match self.kind {
            SubringKind::InertGaussian | SubringKind::SplitGaussian => Val::from_integer(1),
            SubringKind::RamifiedQuaternion => Val::new(1, 2),
        }
    }

    /// Exact valuation; `None` encodes infinity (the zero element).
    pub fn valuation(&self, x: &SkewScalar) -> Option<Val> {
        assert_eq!(x.tag(), self.field());
        if x.is_zero() {
            return None;
        }
        match self.kind {
            SubringKind::InertGaussian => {
                let [re, im, _, _] = x.components();
                let vals = [rat_val(&re, 3), rat_val(&im, 3)];
                vals.into_iter().flatten().min().map(Val::from_integer)
            }
            SubringKind::RamifiedQuaternion => {
                Some(Val::new(rat_val(&x.norm(), 2).expect("nonzero norm"), 2))
            }
            SubringKind::SplitGaussian => {
                let [re, im, _, _] = x.components();
                let e = [rat_val(&re, 5), rat_val(&im, 5)]
                    .into_iter()
                    .flatten()
                    .min()
                    .expect("nonzero");
                // peel the power of 5, then count divisions by 2+i
                let scale = BigRational::from(BigInt::from(5)).pow(-(e as i32));
                let mut re = re * &scale;
                let mut im = im * &scale;
                let mut k = 0i64;
                loop {
                    let trace = BigRational::from(BigInt::from(2)) * &re + &im;
                    let divisible = trace.is_zero() || rat_val(&trace, 5).unwrap() >= 1;
                    if !divisible {
                        break;
                    }
                    // multiply by (2 - i) / 5
                    let five = BigRational::from(BigInt::from(5));
                    let nre = (BigRational::from(BigInt::from(2)) * &re + &im) / &five;
                    let nim = (BigRational::from(BigInt::from(2)) * &im - &re) / &five;
                    re = nre;
                    im = nim;
                    k += 1;
                }
                Some(Val::from_integer(e + k))
            }
        }
    }

    pub fn contains(&self, x: &SkewScalar) -> bool {
        self.valuation(x).map_or(true, |v| v >= Val::zero())
    }

    pub fn in_maximal_ideal(&self, x: &SkewScalar) -> bool {
        self.valuation(x).map_or(true, |v| v > Val::zero())
    }

    pub fn is_unit(&self, x: &SkewScalar) -> bool {
        self.valuation(x) == Some(Val::zero())
    }

    /// Scales `x` by the power of the uniformizer that pulls it onto the
    /// floor of the subring (valuation in `[0, granularity)`); `x` nonzero.
    pub fn pull_to_unit(&self, x: &SkewScalar) -> SkewScalar {
        let v = self.valuation(x).expect("nonzero");
        let g = self.granularity();
        let steps = (-v / g).ceil().to_integer();
        let mut y = x.clone();
        let pi = self.uniformizer();
        if steps >= 0 {
            for _ in 0..steps {
                y = y.mul(&pi);
            }
        } else {
            let pi_inv = pi.inv().expect("uniformizer nonzero");
            for _ in 0..-steps {
                y = y.mul(&pi_inv);
            }
        }
        y
    }

    // -- residues -----------------------------------------------------------

    /// Canonical representatives of the residue classes, zero first.
    pub fn residue_reps(&self) -> Vec<SkewScalar> {
        match self.kind {
            SubringKind::InertGaussian => {
                let mut reps = Vec::new();
                for y in 0..3 {
                    for x in 0..3 {
                        if y == 0 {
                            reps.push(self.lit(&format!("{x}")));
                        } else {
                            reps.push(self.lit(&format!("{x}+{y}*i")));
                        }
                    }
                }
                reps
            }
            SubringKind::RamifiedQuaternion => vec![
                self.lit("0"),
                self.lit("1"),
                // omega = (-1+i+j+k)/2, a cube root of unity that is a unit
                self.lit("-1/2+1/2*i+1/2*j+1/2*k"),
                self.lit("1/2+1/2*i+1/2*j+1/2*k"),
            ],
            SubringKind::SplitGaussian => (0..5).map(|x| self.lit(&format!("{x}"))).collect(),
        }
    }

    /// The canonical representative of the residue class of `x`, which must
    /// lie in the subring.
    pub fn residue_canonical(&self, x: &SkewScalar) -> Result<SkewScalar> {
        if !self.contains(x) {
            return Err(Error::NotInSubring {
                value: x.to_string(),
            });
        }
        match self.kind {
            SubringKind::InertGaussian => {
                let [re, im, _, _] = x.components();
                let (re, im) = (rat_mod_p(&re, 3), rat_mod_p(&im, 3));
                Ok(SkewScalar::from_components(
                    self.field(),
                    [
                        BigRational::from(BigInt::from(re)),
                        BigRational::from(BigInt::from(im)),
                        BigRational::zero(),
                        BigRational::zero(),
                    ],
                ))
            }
            _ => {
                for rep in self.residue_reps() {
                    if self.in_maximal_ideal(&x.sub(&rep)) {
                        return Ok(rep);
                    }
                }
                Err(Error::Internal(format!(
                    "residue table misses the class of {x}"
                )))
            }
        }
    }

    pub fn residue_eq(&self, x: &SkewScalar, y: &SkewScalar) -> bool {
        self.in_maximal_ideal(&x.sub(y))
    }

    /// Inverse of the residue class, from the finite unit table.
    pub fn residue_inv(&self, x: &SkewScalar) -> Result<SkewScalar> {
        if self.in_maximal_ideal(x) {
            return Err(Error::ResidueNotInvertible {
                value: x.to_string(),
            });
        }
        let one = SkewScalar::one(self.field());
        for rep in self.residue_reps() {
            if self.residue_eq(&x.mul(&rep), &one) {
                return Ok(rep);
            }
        }
        Err(Error::Internal(format!("no residue inverse for {x}")))
    }
}

// ---------------------------------------------------------------------------
// Membership tiers relative to a coset scale `s`
// ---------------------------------------------------------------------------

/// Decides `x` in `s * R` (and strictly, `x` in `s * m`) by valuation.
pub fn in_scaled_subring(sub: &TotalSubring, s: &SkewScalar, x: &SkewScalar, strict: bool) -> bool {
    let vs = sub.valuation(s).expect("s nonzero");
    match sub.valuation(x) {
        None => true,
        Some(v) if strict => v > vs,
        Some(v) => v >= vs,
    }
}

/// Tries to draw a group element `(w, t)` whose `t` lies in `s * R`
/// (strictly in `s * m` when `strict`). Returns `None` when this attempt
/// missed the tier, so callers can track admissibility.
pub fn sample_t_in_tier(
    space: &PseudoQuadraticSpace,
    sub: &TotalSubring,
    s: &SkewScalar,
    strict: bool,
    sampler: &mut Sampler,
    cfg: &HeightCfg,
) -> Option<TElem> {
    let field = space.field();
    let vs = sub.valuation(s).expect("s nonzero");
    let mut w: Vec<SkewScalar> = (0..space.dim0).map(|_| sampler.scalar(field, cfg)).collect();
    let cancelling = sampler.gen_bool();
    let pi = sub.uniformizer();
    let extra = sampler.gen_range(0, 2);
    for _ in 0..=10 {
        let q0 = space.module_q0(&w);
        let k0 = if cancelling {
            match sub.kind {
                SubringKind::RamifiedQuaternion => match sub.valuation(&q0) {
                    // the centering power of 2 that exposes the half-step
                    Some(v) => {
                        let e = v.to_integer();
                        debug_assert!(v.is_integer());
                        let num = BigRational::from(BigInt::from(2)).pow(e as i32);
                        SkewScalar::from_rational(field, num)
                    }
                    None => space.skew.zero(),
                },
                _ => space.skew.zero(),
            }
        } else {
            let mut m = vs.ceil().to_integer();
            if strict && Val::from_integer(m) == vs {
                m += 1;
            }
            m += extra;
            let unit = sampler.nonzero_rational(&HeightCfg {
                emin: 0,
                emax: 0,
                ..*cfg
            });
            let p_pow = BigRational::from(BigInt::from(sub.kind.prime())).pow(m as i32);
            SkewScalar::from_rational(field, unit * p_pow)
        };
        let t = q0.sub(&k0);
        if in_scaled_subring(sub, s, &t, strict) {
            return Some(TElem { w, t });
        }
        w = space.module_scale(&w, &pi);
    }
    None
}

// ---------------------------------------------------------------------------
// Sampled checks
// ---------------------------------------------------------------------------

/// Outcome of a sampled universal check: how many attempts were made, how
/// many satisfied the hypothesis, and the first counterexample if any.
#[derive(Debug, Clone)]
pub struct SampledCheck {
    pub attempts: usize,
    pub admissible: usize,
    pub witness: Option<String>,
}

impl SampledCheck {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }

    /// True when too few attempts satisfied the hypothesis for the check to
    /// carry weight.
    pub fn starved(&self) -> bool {
        self.admissible * 10 < self.attempts
    }
}

/// Exercises the valuation laws: multiplicativity, the ultrametric bound,
/// and stability of the subring under ring operations.
pub fn check_valuation_laws(
    sub: &TotalSubring,
    sampler: &mut Sampler,
    cfg: &HeightCfg,
    rounds: usize,
) -> SampledCheck {
    let field = sub.field();
    let mut admissible = 0;
    for _ in 0..rounds {
        let a = sampler.scalar(field, cfg);
        let b = sampler.scalar(field, cfg);
        if a.is_zero() || b.is_zero() {
            continue;
        }
        admissible += 1;
        let (va, vb) = (sub.valuation(&a).unwrap(), sub.valuation(&b).unwrap());
        let prod = sub.valuation(&a.mul(&b)).unwrap();
        if prod != va + vb {
            return SampledCheck {
                attempts: rounds,
                admissible,
                witness: Some(format!(
                    "v({a} * {b}) = {prod}, expected {va} + {vb}"
                )),
            };
        }
        let sum = a.add(&b);
        if let Some(vsum) = sub.valuation(&sum) {
            if vsum < va.min(vb) {
                return SampledCheck {
                    attempts: rounds,
                    admissible,
                    witness: Some(format!(
                        "v({a} + {b}) = {vsum} below min({va}, {vb})"
                    )),
                };
            }
        }
        // totality: an element outside the subring has its inverse inside
        if !sub.contains(&a) && !sub.in_maximal_ideal(&a.inv().unwrap()) {
            return SampledCheck {
                attempts: rounds,
                admissible,
                witness: Some(format!("{a} and its inverse both escape")),
            };
        }
    }
    SampledCheck {
        attempts: rounds,
        admissible,
        witness: None,
    }
}

/// First coset condition: `a -> inv(s) * sigma(a) * s` must stabilize the
/// subring (checked in both directions).
pub fn check_twisted_stability(
    space: &PseudoQuadraticSpace,
    sub: &TotalSubring,
    s: &SkewScalar,
    sampler: &mut Sampler,
    cfg: &HeightCfg,
    rounds: usize,
) -> SampledCheck {
    let field = space.field();
    let s_inv = s.inv().expect("s nonzero");
    let s_sig = space.skew.sigma(s);
    let s_sig_inv = s_sig.inv().expect("s nonzero");
    let mut admissible = 0;
    for _ in 0..rounds {
        let raw = sampler.scalar(field, cfg);
        if raw.is_zero() {
            continue;
        }
        let a = sub.pull_to_unit(&raw);
        admissible += 1;
        let fwd = s_inv.mul(&space.skew.sigma(&a)).mul(s);
        if !sub.contains(&fwd) {
            return SampledCheck {
                attempts: rounds,
                admissible,
                witness: Some(format!(
                    "a = {a} stays in the subring but its twisted image {fwd} does not"
                )),
            };
        }
        let bwd = s_sig_inv.mul(&space.skew.sigma(&a)).mul(&s_sig);
        if !sub.contains(&bwd) {
            return SampledCheck {
                attempts: rounds,
                admissible,
                witness: Some(format!(
                    "a = {a} stays in the subring but its inverse twisted image {bwd} does not"
                )),
            };
        }
    }
    SampledCheck {
        attempts: rounds,
        admissible,
        witness: None,
    }
}

/// Second and third coset conditions: for group elements `(u, t)` and
/// `(w, r)` with `t` in `s * R` and `r` in `s * R` (or strictly `s * m`),
/// the value `f_0(u, w)` must land in `s * R` (or `s * m`).
pub fn check_form_compat(
    space: &PseudoQuadraticSpace,
    sub: &TotalSubring,
    s: &SkewScalar,
    strict_second: bool,
    sampler: &mut Sampler,
    cfg: &HeightCfg,
    rounds: usize,
) -> SampledCheck {
    let mut admissible = 0;
    for _ in 0..rounds {
        let first = sample_t_in_tier(space, sub, s, false, sampler, cfg);
        let second = sample_t_in_tier(space, sub, s, strict_second, sampler, cfg);
        let (Some(x), Some(y)) = (first, second) else {
            continue;
        };
        admissible += 1;
        let f = space.module_f0(&x.w, &y.w);
        if !in_scaled_subring(sub, s, &f, strict_second) {
            return SampledCheck {
                attempts: rounds,
                admissible,
                witness: Some(format!(
                    "(u, t) = {x}, (w, r) = {y} admissible but f_0(u, w) = {f} escapes"
                )),
            };
        }
    }
    SampledCheck {
        attempts: rounds,
        admissible,
        witness: None,
    }
}
