//! The base subset `K_0` paired with each shipped field: the rational
//! multiples of `1`. It is elementwise fixed by the involution, absorbs
//! traces `a + a^σ`, and is stable under `a ↦ t^σ a t` — the properties the
//! verification harness re-checks by sampling.

use crate::sample::{HeightCfg, Sampler};
use crate::scalar::{FieldTag, SkewFieldCtx, SkewScalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RationalCenter {
    pub field: FieldTag,
}

impl RationalCenter {
    pub fn new(field: FieldTag) -> Self {
        RationalCenter { field }
    }

    pub fn contains(&self, x: &SkewScalar) -> bool {
        x.as_rational().is_some()
    }

    /// Splits `x = k + c` with `k` in the subset and `c` its imaginary
    /// complement.
    pub fn decompose(&self, x: &SkewScalar) -> (SkewScalar, SkewScalar) {
        let [a, b, c, d] = x.components();
        let zero = num::rational::BigRational::from(num::bigint::BigInt::from(0));
        (
            SkewScalar::from_components(x.tag(), [a, zero.clone(), zero.clone(), zero]),
            SkewScalar::from_components(
                x.tag(),
                [
                    num::rational::BigRational::from(num::bigint::BigInt::from(0)),
                    b,
                    c,
                    d,
                ],
            ),
        )
    }

    /// One random counterexample hunt over the defining closure properties;
    /// returns a printable witness on failure.
    pub fn axiom_witness(
        &self,
        skew: &SkewFieldCtx,
        sampler: &mut Sampler,
        cfg: &HeightCfg,
        rounds: usize,
    ) -> Option<String> {
        for _ in 0..rounds {
            let a = sampler.scalar(self.field, cfg);
            let t = sampler.scalar(self.field, cfg);
            let trace = a.add(&skew.sigma(&a));
            if !self.contains(&trace) {
                return Some(format!("a + sigma(a) escapes for a = {a}"));
            }
            let k = SkewScalar::from_rational(self.field, sampler.rational(cfg));
            let transported = skew.sigma(&t).mul(&k).mul(&t);
            if !self.contains(&transported) {
                return Some(format!("sigma(t)*k*t escapes for t = {t}, k = {k}"));
            }
            if !self.contains(&skew.sigma(&k)) || skew.sigma(&k) != k {
                return Some(format!("subset element {k} is moved by the involution"));
            }
        }
        None
    }
}
