//! The quotient map from an exact polar space onto its residue geometry.
//!
//! The data is a total subring `R` of the coordinatizing skew field together
//! with a nonzero scale `s`. Classification of the coset picks an effective
//! representative `r`: when the valuation of `s` is an integer, `r` is the
//! rational prime power of that valuation and the residue geometry is again
//! of pseudo-quadratic type; otherwise `r = s` (up to a unit) must satisfy
//! `inv(r) sigma(r) + 1 ∈ m`, and the residue geometry carries an honest
//! quadratic form over the residue field.
//!
//! The map twists even hyperbolic coordinates by `inv(r)`, normalizes a
//! projective representative into `R` with a unit coordinate, and reads all
//! coordinates through the finite residue tables. A section lifting residue
//! points back to exact singular points is provided, and generators of the
//! acting group descend exactly when their arguments lie in `R`
//! (respectively `rR` for the long layer).

use crate::error::{Error, Result};
use crate::geometry::{
    echelonize, form_q, point, Coeffs, FormKind, Point, SourceCoeffs, Subspace, XVector,
};
use crate::pqspace::PseudoQuadraticSpace;
use crate::sample::Sampler;
use crate::scalar::{FieldTag, SkewScalar};
use crate::subring::{in_scaled_subring, rat_val, TotalSubring, Val};
use crate::actions::Generator;
use num::traits::Pow;
use num::BigRational;

fn rational_power(p: i64, e: i64) -> BigRational {
    BigRational::from_integer(p.into()).pow(e as i32)
}

/// A classified quotient map. `rep` is the effective coset representative;
/// all twisting, residue reading, and lifting goes through it.
#[derive(Debug, Clone)]
pub struct Epimorphism {
    pub space: PseudoQuadraticSpace,
    pub subring: TotalSubring,
    /// The scale as declared.
    pub scale: SkewScalar,
    /// The effective representative of the coset.
    pub rep: SkewScalar,
    pub form_kind: FormKind,
    /// True when the two module tiers coincide and the residue module is 0.
    pub module_collapsed: bool,
    rep_inv: SkewScalar,
    rep_val: Val,
}

impl Epimorphism {
    pub fn new(
        space: PseudoQuadraticSpace,
        subring: TotalSubring,
        scale: SkewScalar,
    ) -> Result<Self> {
        if subring.field() != space.field() {
            return Err(Error::RepresentationMismatch {
                left: space.field(),
                right: subring.field(),
            });
        }
        if scale.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let v = subring.valuation(&scale).expect("nonzero scale has a valuation");
        let case_two_ok = |r: &SkewScalar| -> bool {
            match r.inv() {
                Ok(rinv) => {
                    let t = rinv
                        .mul(&space.skew.sigma(r))
                        .add(&SkewScalar::one(space.field()));
                    subring.in_maximal_ideal(&t)
                }
                Err(_) => false,
            }
        };
        let (rep, form_kind) = if v.is_integer() {
            let r = SkewScalar::from_rational(
                space.field(),
                rational_power(subring.kind.prime(), v.to_integer()),
            );
            (r, FormKind::PseudoQuadratic)
        } else if case_two_ok(&scale) {
            (scale.clone(), FormKind::Quadratic)
        } else {
            // bounded search through unit multiples of the declared scale
            let found = subring
                .residue_reps()
                .into_iter()
                .filter(|u| subring.is_unit(u))
                .map(|u| scale.mul(&u))
                .find(case_two_ok);
            match found {
                Some(r) => (r, FormKind::Quadratic),
                None => return Err(Error::UndecidedCase),
            }
        };
        let rep_val = subring.valuation(&rep).expect("nonzero representative");
        debug_assert_eq!(rep_val, v);
        let rep_inv = rep.inv()?;
        let mut epi = Epimorphism {
            space,
            subring,
            scale,
            rep,
            form_kind,
            module_collapsed: false,
            rep_inv,
            rep_val,
        };
        epi.module_collapsed = !epi.in_module_tier(&SkewScalar::one(epi.space.field()), false);
        Ok(epi)
    }

    pub fn source(&self) -> SourceCoeffs<'_> {
        SourceCoeffs { space: &self.space }
    }

    pub fn target(&self) -> TargetCoeffs<'_> {
        TargetCoeffs { epi: self }
    }

    pub fn instance_id(&self) -> String {
        let field = match self.space.field() {
            FieldTag::Rational => "rational",
            FieldTag::GaussianRational => "gaussian",
            FieldTag::RationalQuaternion => "quaternion",
        };
        format!("{field}/{}/s={}", self.subring.kind.name(), self.scale)
    }

    /// The twisted involution `x -> inv(r) sigma(x) r`.
    pub fn twisted_sigma(&self, x: &SkewScalar) -> SkewScalar {
        self.rep_inv.mul(&self.space.skew.sigma(x)).mul(&self.rep)
    }

    /// Membership in the outer (`strict = false`) or inner (`strict = true`)
    /// module tier. The tiers are cut out by a valuation inequality: twice
    /// the coordinate valuation, plus the defect of the finest rational
    /// approximation to the module form value, against the valuation of the
    /// representative (shifted one granularity step for the inner tier).
    pub fn in_module_tier(&self, x: &SkewScalar, strict: bool) -> bool {
        if x.is_zero() {
            return true;
        }
        let v = self.subring.valuation(x).expect("nonzero");
        let gran = self.subring.granularity();
        let bonus = if gran < Val::new(1, 1) { gran } else { Val::new(0, 1) };
        let lhs = v + v + bonus;
        let rhs = self.rep_val + if strict { gran } else { Val::new(0, 1) };
        lhs >= rhs
    }

    /// The rational that best cancels the module form value `q_0(x)`:
    /// zero over the commutative field (the value is purely imaginary),
    /// the power of 2 matching the norm valuation over the quaternions.
    pub fn optimal_k0(&self, x: &SkewScalar) -> SkewScalar {
        let field = self.space.field();
        match field {
            FieldTag::RationalQuaternion if !x.is_zero() => {
                let e = rat_val(&x.norm(), 2).expect("nonzero norm");
                SkewScalar::from_rational(field, rational_power(2, e))
            }
            _ => SkewScalar::zero(field),
        }
    }

    /// Divides even hyperbolic coordinates by the representative on the left.
    pub fn twist(&self, x: &XVector) -> XVector {
        let mut out = x.clone();
        for j in (1..out.a.len()).step_by(2) {
            out.a[j] = self.rep_inv.mul(&x.a[j]);
        }
        out
    }

    pub fn untwist(&self, x: &XVector) -> XVector {
        let mut out = x.clone();
        for j in (1..out.a.len()).step_by(2) {
            out.a[j] = self.rep.mul(&x.a[j]);
        }
        out
    }

    /// Right-scales a twisted representative until every hyperbolic
    /// coordinate lies in the subring and at least one is a unit: first by
    /// the inverse of a coordinate of minimal valuation if any falls outside,
    /// then by the inverse of one of minimal positive valuation if none is a
    /// unit.
    pub fn normalize_twisted(&self, x: &XVector) -> Result<XVector> {
        let mut cur = x.clone();
        for _ in 0..2 * self.space.l + 2 {
            let mut min: Option<(usize, Val)> = None;
            for (j, a) in cur.a.iter().enumerate() {
                if let Some(v) = self.subring.valuation(a) {
                    if min.map_or(true, |(_, mv)| v < mv) {
                        min = Some((j, v));
                    }
                }
            }
            let Some((j, v)) = min else {
                return Err(Error::ZeroCoordinates);
            };
            if v == Val::new(0, 1) {
                return Ok(cur);
            }
            cur = cur.scale(&cur.a[j].inv()?);
        }
        Err(Error::Internal(
            "projective normalization did not stabilize".into(),
        ))
    }

    /// The residue image of a spanning vector: twist, normalize, read every
    /// coordinate through the residue tables.
    pub fn rho_vector(&self, x: &XVector) -> Result<XVector> {
        self.reduce_twisted(&self.normalize_twisted(&self.twist(x))?)
    }

    /// Residue reduction of an already twisted and normalized vector.
    fn reduce_twisted(&self, nrm: &XVector) -> Result<XVector> {
        if !self.in_module_tier(&nrm.v[0], false) {
            return Err(Error::Internal(format!(
                "normalized module coordinate {} escapes the outer tier",
                nrm.v[0]
            )));
        }
        let a = nrm
            .a
            .iter()
            .map(|c| self.subring.residue_canonical(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(XVector {
            v: self.target().module_canonical(&nrm.v),
            a,
        })
    }

    pub fn rho_point(&self, p: &Point) -> Result<Point> {
        let image = self.rho_vector(&p.rep)?;
        point(&self.target(), &image)
    }

    pub fn rho_subspace(&self, s: &Subspace) -> Result<Subspace> {
        // Reducing the raw echelon basis can lose rank: two basis vectors may
        // reduce onto the same residue line even though the span of every
        // representative with subring coordinates reduces onto a subspace of
        // full rank. Build an adapted spanning set first — eliminate the unit
        // pivots of the rows already placed, renormalize, and only then
        // reduce. Each placed row keeps a unit at a coordinate where all
        // later rows vanish, so the reductions stay independent.
        let mut adapted: Vec<XVector> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        for b in &s.basis {
            let mut row = self.normalize_twisted(&self.twist(b))?;
            for (p, placed) in pivots.iter().zip(&adapted) {
                let coef = row.a[*p].clone();
                if !coef.is_zero() {
                    row = row.sub(&placed.scale(&coef));
                }
            }
            let row = self.normalize_twisted(&row).map_err(|_| {
                Error::Internal("independent row vanished during adaptation".into())
            })?;
            let p = (0..row.a.len())
                .find(|&j| self.subring.is_unit(&row.a[j]))
                .expect("normalized rows carry a unit coordinate");
            let row = row.scale(&row.a[p].inv()?);
            pivots.push(p);
            adapted.push(row);
        }
        let rows = adapted
            .iter()
            .map(|r| self.reduce_twisted(r))
            .collect::<Result<Vec<_>>>()?;
        echelonize(&self.target(), &rows)
    }

    /// Checks that a vector of residue representatives is well-formed target
    /// data: hyperbolic coordinates in the subring, module coordinate in the
    /// outer tier.
    pub fn validate_target_vector(&self, x: &XVector) -> Result<()> {
        for (j, a) in x.a.iter().enumerate() {
            if !self.subring.contains(a) {
                return Err(Error::MalformedTargetPoint(format!(
                    "hyperbolic coordinate {} = {a} is outside the subring",
                    j + 1
                )));
            }
        }
        if !self.in_module_tier(&x.v[0], false) {
            return Err(Error::MalformedTargetPoint(format!(
                "module coordinate {} is outside the outer tier",
                x.v[0]
            )));
        }
        Ok(())
    }

    /// Lifts a residue point to an exact singular point mapping back onto
    /// it. The pivot coordinate is lifted to exactly 1; the exact form value
    /// is absorbed into the pivot's hyperbolic partner after subtracting the
    /// best rational approximation, so no residue moves.
    pub fn lift_point(&self, p: &Point) -> Result<Point> {
        let tc = self.target();
        let sc = self.source();
        let pivot = (0..p.rep.a.len())
            .rev()
            .find(|&j| !tc.is_zero(&p.rep.a[j]))
            .ok_or_else(|| {
                Error::MalformedTargetPoint("no unit hyperbolic coordinate".into())
            })?;
        if !tc.eq(&p.rep.a[pivot], &SkewScalar::one(self.space.field())) {
            return Err(Error::MalformedTargetPoint(format!(
                "pivot coordinate {} is not 1",
                p.rep.a[pivot]
            )));
        }
        let mut twisted = p.rep.clone();
        twisted.a[pivot] = SkewScalar::one(self.space.field());
        if self.module_collapsed {
            twisted.v = vec![SkewScalar::zero(self.space.field())];
        }
        let mut x = self.untwist(&twisted);
        // exact defect of the raw lift, taken at the representative's scale
        let k0 = self.optimal_k0(&x.v[0]);
        let mut t = self.rep_inv.mul(&form_q(&sc, &x).sub(&k0));
        if self.form_kind == FormKind::PseudoQuadratic {
            // shift by the rational residue so the defect becomes small
            let c = self
                .subring
                .residue_canonical(&t)?
                .as_rational()
                .ok_or_else(|| {
                    Error::Internal(format!("form residue of a singular point is {t} + m"))
                })?;
            t = t.sub(&SkewScalar::from_rational(self.space.field(), c));
        }
        if !t.is_zero() && !self.subring.in_maximal_ideal(&t) {
            return Err(Error::Internal(format!(
                "lift defect {t} is not small"
            )));
        }
        if pivot % 2 == 0 {
            // odd position: absorb into the even partner, which carries the
            // representative in front
            x.a[pivot + 1] = x.a[pivot + 1].sub(&self.rep.mul(&t));
        } else {
            // even position: absorb into the odd partner through the
            // transported involution
            let sr = self.space.skew.sigma(&self.rep);
            let delta = sr.inv()?.mul(&self.space.skew.sigma(&t)).mul(&sr);
            x.a[pivot - 1] = x.a[pivot - 1].sub(&delta);
        }
        point(&sc, &x)
    }

    /// Whether a generator's action passes to the residue geometry.
    pub fn generator_descends(&self, gen: &Generator) -> bool {
        match gen {
            Generator::Short { k, .. } => self.subring.contains(k),
            Generator::Long { t, .. } => in_scaled_subring(&self.subring, &self.rep, t, false),
            Generator::Torus { m, .. } => self.subring.is_unit(m),
        }
    }

    /// The induced generator on the residue geometry, with arguments read
    /// through the residue tables (the long layer's scalar at the
    /// representative's scale).
    pub fn induced_generator(&self, gen: &Generator) -> Result<Generator> {
        if !self.generator_descends(gen) {
            return Err(Error::ConditionFailed {
                condition: "generator-descends",
                witness: format!("{gen} does not descend"),
            });
        }
        let tc = self.target();
        Ok(match gen {
            Generator::Short { i, k } => Generator::Short {
                i: *i,
                k: self.subring.residue_canonical(k)?,
            },
            Generator::Long { w, t } => Generator::Long {
                w: tc.module_canonical(w),
                t: self.subring.residue_canonical(&self.rep_inv.mul(t))?,
            },
            Generator::Torus { i, m } => Generator::Torus {
                i: *i,
                m: self.subring.residue_canonical(m)?,
            },
        })
    }

    /// For a non-descending generator, produces two source points with
    /// distinct residue images whose translates map to the same residue
    /// point. The pair is drawn from the slots the generator couples.
    pub fn collapse_witness(&self, gen: &Generator) -> Result<Option<(Point, Point)>> {
        let sc = self.source();
        let (x, y) = match gen {
            Generator::Short { i, .. } => {
                let m = self.space.l - i;
                (
                    XVector::basis(&sc, 2 * m - 1),
                    XVector::basis(&sc, 2 * m + 1),
                )
            }
            Generator::Long { .. } => (XVector::basis(&sc, 1), XVector::basis(&sc, 2)),
            Generator::Torus { .. } => return Ok(None),
        };
        let gx = crate::actions::apply_generator(&sc, gen, &x)?;
        let gy = crate::actions::apply_generator(&sc, gen, &y)?;
        let px = self.rho_point(&point(&sc, &x)?)?;
        let py = self.rho_point(&point(&sc, &y)?)?;
        let pgx = self.rho_point(&point(&sc, &gx)?)?;
        let pgy = self.rho_point(&point(&sc, &gy)?)?;
        if px != py && pgx == pgy {
            Ok(Some((point(&sc, &x)?, point(&sc, &y)?)))
        } else {
            Ok(None)
        }
    }

    /// A uniformly drawn vector of residue representatives.
    pub fn sample_target_vector(&self, sampler: &mut Sampler) -> XVector {
        let reps = self.subring.residue_reps();
        let pick = |s: &mut Sampler| reps[s.gen_range(0, reps.len() as i64) as usize].clone();
        let v = if self.module_collapsed {
            vec![SkewScalar::zero(self.space.field())]
        } else {
            vec![pick(sampler)]
        };
        let a = (0..2 * self.space.l).map(|_| pick(sampler)).collect();
        XVector { v, a }
    }
}

// ---------------------------------------------------------------------------
// Residue coefficients
// ---------------------------------------------------------------------------

/// Coefficient semantics of the residue geometry: scalars are subring
/// representatives, equality is modulo the maximal ideal, and the module
/// hooks read the exact module form at the representative's scale.
#[derive(Clone, Copy)]
pub struct TargetCoeffs<'a> {
    pub epi: &'a Epimorphism,
}

impl Coeffs for TargetCoeffs<'_> {
    fn field(&self) -> FieldTag {
        self.epi.space.field()
    }

    fn l(&self) -> usize {
        self.epi.space.l
    }

    fn dim0(&self) -> usize {
        self.epi.space.dim0
    }

    fn form_kind(&self) -> FormKind {
        self.epi.form_kind
    }

    fn sigma(&self, x: &SkewScalar) -> SkewScalar {
        self.epi.twisted_sigma(x)
    }

    fn canonical(&self, x: &SkewScalar) -> SkewScalar {
        self.epi
            .subring
            .residue_canonical(x)
            .unwrap_or_else(|_| x.clone())
    }

    fn is_zero(&self, x: &SkewScalar) -> bool {
        x.is_zero() || self.epi.subring.in_maximal_ideal(x)
    }

    fn inv(&self, x: &SkewScalar) -> Result<SkewScalar> {
        self.epi.subring.residue_inv(x)
    }

    fn in_k0(&self, x: &SkewScalar) -> bool {
        match self.epi.form_kind {
            FormKind::Quadratic => self.is_zero(x),
            // the base subset of the residue structure is the prime field,
            // read off the canonical table: never through an imaginary-part
            // split, which misses ideal members with unit imaginary part
            FormKind::PseudoQuadratic => self
                .epi
                .subring
                .residue_canonical(x)
                .map(|c| c.as_rational().is_some())
                .unwrap_or(false),
        }
    }

    fn module_q0(&self, v: &[SkewScalar]) -> SkewScalar {
        let v0 = &v[0];
        if v0.is_zero() {
            return self.zero();
        }
        let exact = self.epi.space.module_q0(v);
        let k0 = self.epi.optimal_k0(v0);
        self.epi.rep_inv.mul(&exact.sub(&k0))
    }

    fn module_f0(&self, v: &[SkewScalar], w: &[SkewScalar]) -> SkewScalar {
        match self.epi.form_kind {
            FormKind::PseudoQuadratic => self.epi.rep_inv.mul(&self.epi.space.module_f0(v, w)),
            // the companion form vanishes on the quadratic residue module
            FormKind::Quadratic => self.zero(),
        }
    }

    fn module_canonical(&self, v: &[SkewScalar]) -> Vec<SkewScalar> {
        if self.epi.module_collapsed {
            return vec![SkewScalar::zero(self.field())];
        }
        v.iter()
            .map(|c| {
                self.epi
                    .subring
                    .residue_canonical(c)
                    .unwrap_or_else(|_| c.clone())
            })
            .collect()
    }

    fn module_is_zero(&self, v: &[SkewScalar]) -> bool {
        v.iter().all(|c| self.epi.in_module_tier(c, true))
    }
}

// ---------------------------------------------------------------------------
// Residue structure survey
// ---------------------------------------------------------------------------

/// Exhaustive facts about the finite residue structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureSummary {
    /// Number of residue classes of the subring.
    pub residue_size: usize,
    /// Number of classes in the base subset of the residue form.
    pub base_size: usize,
    /// Number of classes of the residue module (1 when it collapses).
    pub module_size: usize,
    /// The transported involution fixes every residue class.
    pub sigma_is_identity: bool,
    /// The transported involution is `x -> x^p` on residues.
    pub sigma_is_frobenius: bool,
    pub form_kind: FormKind,
}

impl Epimorphism {
    /// Surveys the residue structure exhaustively over the representative
    /// tables, verifying on the way that the transported involution is a
    /// well-defined involutory ring automorphism of the residue ring and
    /// that residues multiply commutatively.
    pub fn structure_summary(&self) -> Result<StructureSummary> {
        let tc = self.target();
        let reps = self.subring.residue_reps();
        let fail = |condition: &'static str, witness: String| Error::ConditionFailed {
            condition,
            witness,
        };
        let mut sigma_is_identity = true;
        let mut sigma_is_frobenius = true;
        for x in &reps {
            let sx = self.twisted_sigma(x);
            if !self.subring.contains(&sx) {
                return Err(fail(
                    "residue-involution-stability",
                    format!("sigma_r({x}) = {sx} leaves the subring"),
                ));
            }
            if !self.subring.residue_eq(&self.twisted_sigma(&sx), x) {
                return Err(fail(
                    "residue-involution-involutory",
                    format!("sigma_r^2({x}) != {x}"),
                ));
            }
            if !self.subring.residue_eq(&sx, x) {
                sigma_is_identity = false;
            }
            // x^p within the residue ring
            let mut power = SkewScalar::one(self.space.field());
            for _ in 0..self.subring.kind.prime() {
                power = power.mul(x);
            }
            if !self.subring.residue_eq(&sx, &power) {
                sigma_is_frobenius = false;
            }
            for y in &reps {
                if !self.subring.residue_eq(&x.mul(y), &y.mul(x)) {
                    return Err(fail(
                        "residue-commutativity",
                        format!("{x} * {y} != {y} * {x} (mod m)"),
                    ));
                }
                if !self
                    .subring
                    .residue_eq(&self.twisted_sigma(&x.mul(y)), &self.twisted_sigma(y).mul(&self.twisted_sigma(x)))
                {
                    return Err(fail(
                        "residue-involution-antimultiplicative",
                        format!("sigma_r({x} {y}) != sigma_r({y}) sigma_r({x}) (mod m)"),
                    ));
                }
                if !self
                    .subring
                    .residue_eq(&self.twisted_sigma(&x.add(y)), &self.twisted_sigma(x).add(&self.twisted_sigma(y)))
                {
                    return Err(fail(
                        "residue-involution-additive",
                        format!("sigma_r({x} + {y}) splits wrong"),
                    ));
                }
            }
        }
        let base_size = reps.iter().filter(|x| tc.in_k0(x)).count();
        let module_size = if self.module_collapsed { 1 } else { reps.len() };
        Ok(StructureSummary {
            residue_size: reps.len(),
            base_size,
            module_size,
            sigma_is_identity,
            sigma_is_frobenius,
            form_kind: self.form_kind,
        })
    }

    /// Checks that the residue module form vanishes only at 0, exhaustively
    /// over module representatives. Returns the number of classes checked
    /// (0 when the module collapses and the check is vacuous).
    pub fn check_target_anisotropy(&self) -> Result<usize> {
        if self.module_collapsed {
            return Ok(0);
        }
        let tc = self.target();
        let mut checked = 0;
        for x in self.subring.residue_reps() {
            if tc.is_zero(&x) {
                continue;
            }
            let q = tc.module_q0(&[x.clone()]);
            if tc.is_zero(&q) {
                return Err(Error::ConditionFailed {
                    condition: "target-module-anisotropy",
                    witness: format!("q_0({x}) = 0 (mod m)"),
                });
            }
            checked += 1;
        }
        Ok(checked)
    }
}
