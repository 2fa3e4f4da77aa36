//! Ordered words in the two rank-2 unipotent panels.
//!
//! Both groups are handled in fully collected normal form, so products are
//! computed by structured swap rules rather than free reduction:
//!
//! * the commutative-panel group on triples `x_1(a) x_2(b) x_3(c)` with
//!   central middle layer and `[x_1(s), x_3(t)] = x_2(z(s, t))`, where
//!   `z(s, t) = t s` is the opposite-view product; and
//! * the form-panel group on quadruples `x_1(t_1) x_2(k_2) x_3(t_3) x_4(k_4)`
//!   whose odd layers carry the group `T` of the pseudo-quadratic module and
//!   whose swap rules feed on `f_0`.
//!
//! The words only depend on the scalar context, not on a rank: the same
//! panels embed into every geometry large enough to host them.

use crate::pqspace::{PseudoQuadraticSpace, TElem};
use crate::scalar::{MulView, SkewFieldCtx, SkewScalar};
use std::fmt;

// ---------------------------------------------------------------------------
// Commutative panel
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct A2Word {
    pub a: SkewScalar,
    pub b: SkewScalar,
    pub c: SkewScalar,
}

impl fmt::Display for A2Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x1({})x2({})x3({})", self.a, self.b, self.c)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct A2Group {
    pub skew: SkewFieldCtx,
}

impl A2Group {
    pub fn new(skew: SkewFieldCtx) -> Self {
        A2Group { skew }
    }

    /// The cross term `z(s, t) = t s`, multiplication in the opposite view.
    pub fn z(&self, s: &SkewScalar, t: &SkewScalar) -> SkewScalar {
        MulView::opposite().mul(s, t)
    }

    pub fn identity(&self) -> A2Word {
        A2Word {
            a: self.skew.zero(),
            b: self.skew.zero(),
            c: self.skew.zero(),
        }
    }

    pub fn x1(&self, a: SkewScalar) -> A2Word {
        A2Word {
            a,
            b: self.skew.zero(),
            c: self.skew.zero(),
        }
    }

    pub fn x2(&self, b: SkewScalar) -> A2Word {
        A2Word {
            a: self.skew.zero(),
            b,
            c: self.skew.zero(),
        }
    }

    pub fn x3(&self, c: SkewScalar) -> A2Word {
        A2Word {
            a: self.skew.zero(),
            b: self.skew.zero(),
            c,
        }
    }

    /// Collected product: the only swap needed moves the incoming `x_1`
    /// layer past the stored `x_3` layer, emitting a central `z` term.
    pub fn mul(&self, x: &A2Word, y: &A2Word) -> A2Word {
        A2Word {
            a: x.a.add(&y.a),
            b: x.b.add(&y.b).sub(&self.z(&y.a, &x.c)),
            c: x.c.add(&y.c),
        }
    }

    pub fn inv(&self, x: &A2Word) -> A2Word {
        A2Word {
            a: x.a.neg(),
            b: x.b.neg().sub(&self.z(&x.a, &x.c)),
            c: x.c.neg(),
        }
    }

    pub fn bracket(&self, u: &A2Word, v: &A2Word) -> A2Word {
        self.mul(&self.mul(&self.inv(u), &self.inv(v)), &self.mul(u, v))
    }
}

// ---------------------------------------------------------------------------
// Form panel
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bc2Word {
    pub t1: TElem,
    pub k2: SkewScalar,
    pub t3: TElem,
    pub k4: SkewScalar,
}

impl fmt::Display for Bc2Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "x1({})x2({})x3({})x4({})",
            self.t1, self.k2, self.t3, self.k4
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Bc2Group<'a> {
    pub space: &'a PseudoQuadraticSpace,
}

impl<'a> Bc2Group<'a> {
    pub fn new(space: &'a PseudoQuadraticSpace) -> Self {
        Bc2Group { space }
    }

    pub fn identity(&self) -> Bc2Word {
        Bc2Word {
            t1: self.space.t_identity(),
            k2: self.space.skew.zero(),
            t3: self.space.t_identity(),
            k4: self.space.skew.zero(),
        }
    }

    pub fn x1(&self, t: TElem) -> Bc2Word {
        Bc2Word {
            t1: t,
            ..self.identity()
        }
    }

    pub fn x2(&self, k: SkewScalar) -> Bc2Word {
        Bc2Word {
            k2: k,
            ..self.identity()
        }
    }

    pub fn x3(&self, t: TElem) -> Bc2Word {
        Bc2Word {
            t3: t,
            ..self.identity()
        }
    }

    pub fn x4(&self, k: SkewScalar) -> Bc2Word {
        Bc2Word {
            k4: k,
            ..self.identity()
        }
    }

    /// Absorbs one `x_1(p)` arriving from the right. Moving it past `x_4(k)`
    /// emits `x_2(p.t k) x_3(p.w k, sigma(k) p.t k)`; moving it past
    /// `x_3(t_3)` emits the central `x_2(f_0(p.w, t_3.w))`.
    fn absorb_x1(&self, x: &Bc2Word, p: &TElem) -> Bc2Word {
        let sp = self.space;
        let sigma = |v: &SkewScalar| sp.skew.sigma(v);
        let x2_from_x4 = p.t.mul(&x.k4);
        let x3_from_x4 = TElem {
            w: sp.module_scale(&p.w, &x.k4),
            t: sigma(&x.k4).mul(&p.t).mul(&x.k4),
        };
        let x2_from_x3 = sp.module_f0(&p.w, &x.t3.w);
        Bc2Word {
            t1: sp.t_mul(&x.t1, p),
            k2: x.k2.add(&x2_from_x3).add(&x2_from_x4),
            t3: sp.t_mul(&x.t3, &x3_from_x4),
            k4: x.k4.clone(),
        }
    }

    /// Absorbs one `x_2(k)`: past `x_4(a)` it emits
    /// `x_3(0, sigma(k) a + sigma(a) k)` and commutes with everything else.
    fn absorb_x2(&self, x: &Bc2Word, k: &SkewScalar) -> Bc2Word {
        let sp = self.space;
        let sigma = |v: &SkewScalar| sp.skew.sigma(v);
        let x3_from_x4 = TElem {
            w: sp.module_zero(),
            t: sigma(k).mul(&x.k4).add(&sigma(&x.k4).mul(k)),
        };
        Bc2Word {
            t1: x.t1.clone(),
            k2: x.k2.add(k),
            t3: sp.t_mul(&x.t3, &x3_from_x4),
            k4: x.k4.clone(),
        }
    }

    fn absorb_x3(&self, x: &Bc2Word, p: &TElem) -> Bc2Word {
        Bc2Word {
            t3: self.space.t_mul(&x.t3, p),
            ..x.clone()
        }
    }

    fn absorb_x4(&self, x: &Bc2Word, k: &SkewScalar) -> Bc2Word {
        Bc2Word {
            k4: x.k4.add(k),
            ..x.clone()
        }
    }

    pub fn mul(&self, x: &Bc2Word, y: &Bc2Word) -> Bc2Word {
        let step1 = self.absorb_x1(x, &y.t1);
        let step2 = self.absorb_x2(&step1, &y.k2);
        let step3 = self.absorb_x3(&step2, &y.t3);
        self.absorb_x4(&step3, &y.k4)
    }

    pub fn inv(&self, x: &Bc2Word) -> Bc2Word {
        let sp = self.space;
        // reversed word of layer inverses, re-collected
        let w4 = self.x4(x.k4.neg());
        let w3 = self.x3(sp.t_inv(&x.t3));
        let w2 = self.x2(x.k2.neg());
        let w1 = self.x1(sp.t_inv(&x.t1));
        self.mul(&self.mul(&self.mul(&w4, &w3), &w2), &w1)
    }

    pub fn bracket(&self, u: &Bc2Word, v: &Bc2Word) -> Bc2Word {
        self.mul(&self.mul(&self.inv(u), &self.inv(v)), &self.mul(u, v))
    }
}
