//! Right actions of the unipotent generators and the torus scalings on `X`,
//! plus the interior panel actions that the rank-2 word groups identify with.
//!
//! All actions are written over the coefficient abstraction, so the same
//! formulas drive the exact source geometry and the residue target geometry.
//! Composition is in word order: `x^(g h) = (x^g)^h`.

use crate::error::{Error, Result};
use crate::geometry::{Coeffs, XVector};
use crate::pqspace::{PseudoQuadraticSpace, TElem};
use crate::sample::{HeightCfg, Sampler};
use crate::scalar::{parse_scalar, FieldTag, SkewScalar};
use std::fmt;

/// A generator of the acting group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    /// `y_i(k)` for `1 <= i <= l-1`.
    Short { i: usize, k: SkewScalar },
    /// `y_l((w), t)`; the pair must lie in the group `T`.
    Long { w: Vec<SkewScalar>, t: SkewScalar },
    /// `zeta_i(m)` for `1 <= i <= l`, `m` invertible.
    Torus { i: usize, m: SkewScalar },
}

impl Generator {
    /// Structural validation against a concrete space: index ranges, the
    /// group membership of long arguments, invertibility of torus arguments.
    pub fn validate(&self, space: &PseudoQuadraticSpace) -> Result<()> {
        match self {
            Generator::Short { i, .. } => {
                if *i == 0 || *i >= space.l {
                    return Err(Error::UnsupportedGeneratorIndex {
                        index: *i,
                        l: space.l,
                    });
                }
                Ok(())
            }
            Generator::Long { w, t } => {
                if w.len() != space.dim0 {
                    return Err(Error::Parse(format!(
                        "long generator has {} module coordinates, expected {}",
                        w.len(),
                        space.dim0
                    )));
                }
                space.t_check(&TElem {
                    w: w.clone(),
                    t: t.clone(),
                })
            }
            Generator::Torus { i, m } => {
                if *i == 0 || *i > space.l {
                    return Err(Error::UnsupportedGeneratorIndex {
                        index: *i,
                        l: space.l,
                    });
                }
                if m.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Short { i, k } => write!(f, "y{i}({k})"),
            Generator::Long { w, t } => {
                write!(f, "y_l((")?;
                for (idx, c) in w.iter().enumerate() {
                    if idx > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "),{t})")
            }
            Generator::Torus { i, m } => write!(f, "zeta{i}({m})"),
        }
    }
}

/// `y_i(k)` for `i < l`: with `m = l - i`, adds `k a_{2m+1}` to `a_{2m-1}`
/// and subtracts `sigma(k) a_{2m}` from `a_{2m+2}`. Preserves the form
/// exactly.
pub fn apply_short<C: Coeffs>(c: &C, i: usize, k: &SkewScalar, x: &XVector) -> XVector {
    let l = c.l();
    assert!(i >= 1 && i < l, "short index {i} out of range for rank {l}");
    let m = l - i;
    let mut out = x.clone();
    out.a[2 * m - 2] = out.a[2 * m - 2].add(&k.mul(&x.a[2 * m]));
    out.a[2 * m + 1] = out.a[2 * m + 1].sub(&c.sigma(k).mul(&x.a[2 * m - 1]));
    out
}

/// `y_l(w, t)`: feeds the first hyperbolic pair through the module,
/// `v += w a_1` and `a_2 -= t a_1 + f_0(w, v_old)`. Preserves the form
/// modulo the base subset, and the companion form exactly.
pub fn apply_long<C: Coeffs>(c: &C, w: &[SkewScalar], t: &SkewScalar, x: &XVector) -> XVector {
    let mut out = x.clone();
    let correction = t.mul(&x.a[0]).add(&c.module_f0(w, &x.v));
    for (slot, wc) in out.v.iter_mut().zip(w) {
        *slot = slot.add(&wc.mul(&x.a[0]));
    }
    out.a[1] = out.a[1].sub(&correction);
    out
}

/// `zeta_i(m)`: scales the pair `(a_{2i-1}, a_{2i})` by `m` and
/// `inv(sigma(m))` on the left. An exact isometry.
pub fn apply_torus<C: Coeffs>(c: &C, i: usize, m: &SkewScalar, x: &XVector) -> Result<XVector> {
    let l = c.l();
    assert!(i >= 1 && i <= l, "torus index {i} out of range for rank {l}");
    let minv_sigma = c.inv(&c.sigma(m))?;
    let mut out = x.clone();
    out.a[2 * i - 2] = m.mul(&x.a[2 * i - 2]);
    out.a[2 * i - 1] = minv_sigma.mul(&x.a[2 * i - 1]);
    Ok(out)
}

pub fn apply_generator<C: Coeffs>(c: &C, gen: &Generator, x: &XVector) -> Result<XVector> {
    match gen {
        Generator::Short { i, k } => Ok(apply_short(c, *i, k, x)),
        Generator::Long { w, t } => Ok(apply_long(c, w, t, x)),
        Generator::Torus { i, m } => apply_torus(c, *i, m, x),
    }
}

pub fn apply_word<C: Coeffs>(c: &C, word: &[Generator], x: &XVector) -> Result<XVector> {
    let mut out = x.clone();
    for gen in word {
        out = apply_generator(c, gen, &out)?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Interior panel actions
// ---------------------------------------------------------------------------

/// Middle layer of the form panel on the pair `(l-1, l)`:
/// `a_2 -= k a_3` and `a_4 -= sigma(k) a_1`.
pub fn apply_form_panel_mid<C: Coeffs>(c: &C, k: &SkewScalar, x: &XVector) -> XVector {
    let mut out = x.clone();
    out.a[1] = out.a[1].sub(&k.mul(&x.a[2]));
    out.a[3] = out.a[3].sub(&c.sigma(k).mul(&x.a[0]));
    out
}

/// Third layer of the form panel on the pair `(l-1, l)`: like the long
/// generator but read through `a_3`: `v += u a_3`,
/// `a_4 -= r a_3 + f_0(u, v_old)`.
pub fn apply_form_panel_third<C: Coeffs>(
    c: &C,
    u: &[SkewScalar],
    r: &SkewScalar,
    x: &XVector,
) -> XVector {
    let mut out = x.clone();
    let correction = r.mul(&x.a[2]).add(&c.module_f0(u, &x.v));
    for (slot, uc) in out.v.iter_mut().zip(u) {
        *slot = slot.add(&uc.mul(&x.a[2]));
    }
    out.a[3] = out.a[3].sub(&correction);
    out
}

/// Middle layer of the commutative panel on the pair `(i, i+1)`, `i <= l-2`:
/// with `m = l - i`, `a_{2m-3} += k a_{2m+1}` and
/// `a_{2m+2} -= sigma(k) a_{2m-2}`.
pub fn apply_comm_panel_mid<C: Coeffs>(c: &C, i: usize, k: &SkewScalar, x: &XVector) -> XVector {
    let l = c.l();
    assert!(i >= 1 && i + 2 <= l, "panel index {i} out of range for rank {l}");
    let m = l - i;
    let mut out = x.clone();
    out.a[2 * m - 4] = out.a[2 * m - 4].add(&k.mul(&x.a[2 * m]));
    out.a[2 * m + 1] = out.a[2 * m + 1].sub(&c.sigma(k).mul(&x.a[2 * m - 3]));
    out
}

// ---------------------------------------------------------------------------
// Torus conjugation
// ---------------------------------------------------------------------------

/// Conjugates a unipotent generator by `zeta_i(m)`. Only short generators
/// sit in the conjugation table; the long layer is deliberately rejected.
pub fn conjugate_by_torus(
    space: &PseudoQuadraticSpace,
    gen: &Generator,
    i: usize,
    m: &SkewScalar,
) -> Result<Generator> {
    let l = space.l;
    match gen {
        Generator::Short { i: j, k } => {
            let out = if *j == l - i {
                Generator::Short {
                    i: *j,
                    k: m.mul(k),
                }
            } else if *j + i == l + 1 {
                Generator::Short {
                    i: *j,
                    k: k.mul(&m.inv()?),
                }
            } else {
                gen.clone()
            };
            Ok(out)
        }
        Generator::Long { .. } => Err(Error::UnsupportedGeneratorIndex { index: l, l }),
        Generator::Torus { .. } => Err(Error::Config(
            "conjugation table only covers unipotent generators".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Random words
// ---------------------------------------------------------------------------

pub fn sample_generator(
    space: &PseudoQuadraticSpace,
    sampler: &mut Sampler,
    cfg: &HeightCfg,
) -> Generator {
    let field = space.field();
    match sampler.gen_range(0, 3) {
        0 if space.l >= 2 => Generator::Short {
            i: sampler.gen_range(1, space.l as i64) as usize,
            k: sampler.scalar(field, cfg),
        },
        1 => {
            let el = space.sample_t(sampler, cfg);
            Generator::Long { w: el.w, t: el.t }
        }
        _ => Generator::Torus {
            i: sampler.gen_range(1, space.l as i64 + 1) as usize,
            m: sampler.nonzero_scalar(field, cfg),
        },
    }
}

pub fn sample_word(
    space: &PseudoQuadraticSpace,
    sampler: &mut Sampler,
    cfg: &HeightCfg,
    len: usize,
) -> Vec<Generator> {
    (0..len).map(|_| sample_generator(space, sampler, cfg)).collect()
}

// ---------------------------------------------------------------------------
// Generator literals
// ---------------------------------------------------------------------------

/// Parses `y<i>(<scalar>)`, `y<l>((<w>),<t>)`, or `zeta<i>(<scalar>)`.
pub fn parse_generator(
    field: FieldTag,
    dim0: usize,
    l: usize,
    input: &str,
) -> Result<Generator> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("bad generator literal `{input}`"));
    let (head, rest) = if let Some(rest) = s.strip_prefix("zeta") {
        ("zeta", rest)
    } else if let Some(rest) = s.strip_prefix('y') {
        ("y", rest)
    } else {
        return Err(bad());
    };
    let open = rest.find('(').ok_or_else(bad)?;
    // `y_l(...)` names the long index without spelling the rank
    let i: usize = if head == "y" && &rest[..open] == "_l" {
        l
    } else {
        rest[..open].parse().map_err(|_| bad())?
    };
    let body = rest[open..]
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(bad)?;
    if head == "zeta" {
        return Ok(Generator::Torus {
            i,
            m: parse_scalar(field, body)?,
        });
    }
    if i == l {
        // y_l((w_1,...),t)
        let inner = body.strip_prefix('(').ok_or_else(|| {
            Error::Parse(format!(
                "generator index {l} takes a module argument `((w),t)`"
            ))
        })?;
        let close = inner.find(')').ok_or_else(bad)?;
        let wpart = &inner[..close];
        let tpart = inner[close + 1..].strip_prefix(',').ok_or_else(bad)?;
        let w: Vec<SkewScalar> = if wpart.is_empty() {
            Vec::new()
        } else {
            wpart
                .split(',')
                .map(|t| parse_scalar(field, t))
                .collect::<Result<_>>()?
        };
        if w.len() != dim0 {
            return Err(Error::Parse(format!(
                "module argument has {} coordinates, expected {dim0}",
                w.len()
            )));
        }
        Ok(Generator::Long {
            w,
            t: parse_scalar(field, tpart)?,
        })
    } else {
        if body.starts_with('(') {
            return Err(Error::Parse(format!(
                "generator index {i} takes a scalar argument"
            )));
        }
        Ok(Generator::Short {
            i,
            k: parse_scalar(field, body)?,
        })
    }
}
