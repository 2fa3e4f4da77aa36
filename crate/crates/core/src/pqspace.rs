//! The anisotropic kernel of each shipped instance: a one-dimensional right
//! module carrying `q_0(v) = sigma(v) * delta * v` with `delta = i`, its
//! associated sesquilinear form `f_0`, and the group `T` of pairs `(w, t)`
//! with `q_0(w) - t` in the base subset.

use crate::error::{Error, Result};
use crate::involutory::RationalCenter;
use crate::sample::{HeightCfg, Sampler};
use crate::scalar::{FieldTag, SkewFieldCtx, SkewScalar};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoQuadraticSpace {
    pub skew: SkewFieldCtx,
    pub k0: RationalCenter,
    /// Number of hyperbolic coordinate pairs.
    pub l: usize,
    /// Coordinates of the anisotropic module (1 in the shipped instances).
    pub dim0: usize,
    delta: SkewScalar,
}

/// Element of the group `T`: the argument of the long-root generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TElem {
    pub w: Vec<SkewScalar>,
    pub t: SkewScalar,
}

impl fmt::Display for TElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "((")?;
        for (idx, c) in self.w.iter().enumerate() {
            if idx > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "),{})", self.t)
    }
}

impl PseudoQuadraticSpace {
    /// The shipped instance over the given field: `delta = i`, rank `l`.
    pub fn standard(field: FieldTag, l: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::Config("rank must be at least 1".into()));
        }
        let skew = SkewFieldCtx::standard(field);
        let delta = skew.unit_i()?;
        Ok(PseudoQuadraticSpace {
            skew,
            k0: RationalCenter::new(field),
            l,
            dim0: 1,
            delta,
        })
    }

    pub fn field(&self) -> FieldTag {
        self.skew.field
    }

    pub fn in_k0(&self, x: &SkewScalar) -> bool {
        self.k0.contains(x)
    }

    /// `q_0(v) = sum over coordinates of sigma(v_i) * delta * v_i`.
    pub fn module_q0(&self, v: &[SkewScalar]) -> SkewScalar {
        assert_eq!(v.len(), self.dim0);
        let mut acc = self.skew.zero();
        for c in v {
            acc = acc.add(&self.skew.sigma(c).mul(&self.delta).mul(c));
        }
        acc
    }

    /// The sesquilinear form with `q_0(v+w) - q_0(v) - q_0(w) - f_0(v, w)`
    /// in the base subset: `f_0(v, w) = sum of sigma(v_i) (delta - sigma(delta)) w_i`.
    pub fn module_f0(&self, v: &[SkewScalar], w: &[SkewScalar]) -> SkewScalar {
        assert_eq!(v.len(), self.dim0);
        assert_eq!(w.len(), self.dim0);
        let twist = self.delta.sub(&self.skew.sigma(&self.delta));
        let mut acc = self.skew.zero();
        for (a, b) in v.iter().zip(w) {
            acc = acc.add(&self.skew.sigma(a).mul(&twist).mul(b));
        }
        acc
    }

    pub fn module_zero(&self) -> Vec<SkewScalar> {
        vec![self.skew.zero(); self.dim0]
    }

    pub fn module_add(&self, v: &[SkewScalar], w: &[SkewScalar]) -> Vec<SkewScalar> {
        v.iter().zip(w).map(|(a, b)| a.add(b)).collect()
    }

    pub fn module_neg(&self, v: &[SkewScalar]) -> Vec<SkewScalar> {
        v.iter().map(|a| a.neg()).collect()
    }

    /// Right scalar action `v * c`, coordinatewise.
    pub fn module_scale(&self, v: &[SkewScalar], c: &SkewScalar) -> Vec<SkewScalar> {
        v.iter().map(|a| a.mul(c)).collect()
    }

    // -- the group T --------------------------------------------------------

    pub fn t_identity(&self) -> TElem {
        TElem {
            w: self.module_zero(),
            t: self.skew.zero(),
        }
    }

    /// Membership: `q_0(w) - t` must land in the base subset.
    pub fn t_check(&self, el: &TElem) -> Result<()> {
        let residual = self.module_q0(&el.w).sub(&el.t);
        if self.in_k0(&residual) {
            Ok(())
        } else {
            Err(Error::NotInT {
                residual: residual.to_string(),
            })
        }
    }

    /// Group law `(w, t) * (v, r) = (w + v, t + r + f_0(v, w))`.
    pub fn t_mul(&self, x: &TElem, y: &TElem) -> TElem {
        TElem {
            w: self.module_add(&x.w, &y.w),
            t: x.t.add(&y.t).add(&self.module_f0(&y.w, &x.w)),
        }
    }

    /// Inverse `(-w, -sigma(t))`.
    pub fn t_inv(&self, x: &TElem) -> TElem {
        TElem {
            w: self.module_neg(&x.w),
            t: self.skew.sigma(&x.t).neg(),
        }
    }

    /// Random member, built so membership holds by construction: draw `w`
    /// and a rational `k`, then set `t = q_0(w) - k`.
    pub fn sample_t(&self, sampler: &mut Sampler, cfg: &HeightCfg) -> TElem {
        let w: Vec<SkewScalar> = (0..self.dim0)
            .map(|_| sampler.scalar(self.field(), cfg))
            .collect();
        let k = SkewScalar::from_rational(self.field(), sampler.rational(cfg));
        let t = self.module_q0(&w).sub(&k);
        TElem { w, t }
    }
}
