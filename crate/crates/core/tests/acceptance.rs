//! Acceptance gate: eight executable criteria, one test each, covering the
//! exact algebra, the group laws, the relation patterns, the subring
//! conditions, the case classification, the residue epimorphism, the
//! target-space laws, and report determinism. Every test prints one summary
//! line on success; a failure panics with the witness.

use num::BigRational;
use skewpolar::actions::{
    apply_comm_panel_mid, apply_form_panel_mid, apply_form_panel_third, apply_generator,
    apply_long, apply_short, apply_torus, apply_word, conjugate_by_torus, sample_word, Generator,
};
use skewpolar::epimorphism::Epimorphism;
use skewpolar::geometry::{
    collinear, echelonize, line_through, point, sample_singular_vector, subspace_contains, Coeffs,
    FormKind, SourceCoeffs, XVector,
};
use skewpolar::pqspace::PseudoQuadraticSpace;
use skewpolar::sample::{HeightCfg, Sampler};
use skewpolar::scalar::{parse_scalar, FieldTag, SkewScalar};
use skewpolar::subring::{
    check_form_compat, check_twisted_stability, in_scaled_subring, SubringKind, TotalSubring,
};
use skewpolar::words::{A2Word, Bc2Group, Bc2Word};
use std::process::Command;
use std::time::Instant;

const BOTH_FIELDS: [FieldTag; 2] = [FieldTag::GaussianRational, FieldTag::RationalQuaternion];

const POSITIVE_INSTANCES: [(SubringKind, &str); 3] = [
    (SubringKind::InertGaussian, "1"),
    (SubringKind::RamifiedQuaternion, "1+i"),
    (SubringKind::RamifiedQuaternion, "2"),
];

fn space(field: FieldTag, l: usize) -> PseudoQuadraticSpace {
    PseudoQuadraticSpace::standard(field, l).unwrap()
}

fn shipped(l: usize) -> Vec<Epimorphism> {
    POSITIVE_INSTANCES
        .iter()
        .map(|(kind, s)| {
            let sub = TotalSubring::new(*kind);
            let field = sub.field();
            Epimorphism::new(space(field, l), sub, parse_scalar(field, s).unwrap()).unwrap()
        })
        .collect()
}

fn pass(criterion: usize, detail: String) {
    println!("acceptance criterion {criterion}: pass — {detail}");
}

#[test]
fn criterion_1_exact_algebra_axioms() {
    let start = Instant::now();
    let cfg = HeightCfg::new(3);
    let rounds = 10_000;
    for field in BOTH_FIELDS {
        let skew = space(field, 2).skew.clone();
        let one = SkewScalar::one(field);
        let mut sampler = Sampler::from_seed(101);
        for _ in 0..rounds {
            let x = sampler.scalar(field, &cfg);
            let y = sampler.scalar(field, &cfg);
            let z = sampler.scalar(field, &cfg);
            assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)), "assoc at {x}, {y}, {z}");
            assert_eq!(
                x.mul(&y.add(&z)),
                x.mul(&y).add(&x.mul(&z)),
                "left distrib at {x}, {y}, {z}"
            );
            assert_eq!(
                x.add(&y).mul(&z),
                x.mul(&z).add(&y.mul(&z)),
                "right distrib at {x}, {y}, {z}"
            );
            assert_eq!(
                skew.sigma(&x.mul(&y)),
                skew.sigma(&y).mul(&skew.sigma(&x)),
                "sigma anti-automorphism at {x}, {y}"
            );
            assert_eq!(
                skew.sigma(&x.add(&y)),
                skew.sigma(&x).add(&skew.sigma(&y)),
                "sigma additivity at {x}, {y}"
            );
            assert_eq!(skew.sigma(&skew.sigma(&x)), x, "sigma involutory at {x}");
            assert_eq!(
                x.mul(&y).norm(),
                x.norm() * y.norm(),
                "norm multiplicativity at {x}, {y}"
            );
            let u = sampler.nonzero_scalar(field, &cfg);
            let ui = u.inv().unwrap();
            assert_eq!(u.mul(&ui), one, "right inverse at {u}");
            assert_eq!(ui.mul(&u), one, "left inverse at {u}");
        }
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "algebra suite overran: {dt:?}");
    pass(1, format!("2 fields x {rounds} exact rounds in {dt:.2?}"));
}

#[test]
fn criterion_2_t_group_laws() {
    let cfg = HeightCfg::new(3);
    let rounds = 1_000;
    for field in BOTH_FIELDS {
        let sp = space(field, 2);
        let id = sp.t_identity();
        let mut sampler = Sampler::from_seed(202);
        for _ in 0..rounds {
            let a = sp.sample_t(&mut sampler, &cfg);
            let b = sp.sample_t(&mut sampler, &cfg);
            let c = sp.sample_t(&mut sampler, &cfg);
            sp.t_check(&a).unwrap();
            let ab = sp.t_mul(&a, &b);
            sp.t_check(&ab).unwrap();
            assert_eq!(
                sp.t_mul(&ab, &c),
                sp.t_mul(&a, &sp.t_mul(&b, &c)),
                "associativity broke"
            );
            assert_eq!(sp.t_mul(&a, &id), a);
            assert_eq!(sp.t_mul(&id, &a), a);
            let ai = sp.t_inv(&a);
            sp.t_check(&ai).unwrap();
            assert_eq!(sp.t_mul(&a, &ai), id, "inverse broke");
            // the diagonal of the companion form reads off the imaginary part
            assert_eq!(
                sp.module_f0(&a.w, &a.w),
                a.t.sub(&sp.skew.sigma(&a.t)),
                "f_0(w, w) != t - sigma(t) at ({}, {})",
                a.w[0],
                a.t
            );
        }
    }
    pass(2, format!("2 fields x {rounds} sampled triples, exact"));
}

#[test]
fn criterion_3_relation_suite() {
    let cfg = HeightCfg::new(3);
    let rounds = 1_000;
    for field in BOTH_FIELDS {
        let sp2 = space(field, 2);
        let skew = sp2.skew.clone();
        let a2 = skewpolar::words::A2Group::new(skew.clone());
        let bc2 = Bc2Group::new(&sp2);
        let mut sampler = Sampler::from_seed(303);

        // collected-word group axioms for both panel groups
        for _ in 0..rounds {
            let rw = |s: &mut Sampler| A2Word {
                a: s.scalar(field, &cfg),
                b: s.scalar(field, &cfg),
                c: s.scalar(field, &cfg),
            };
            let (x, y, z) = (rw(&mut sampler), rw(&mut sampler), rw(&mut sampler));
            assert_eq!(
                a2.mul(&a2.mul(&x, &y), &z),
                a2.mul(&x, &a2.mul(&y, &z)),
                "a2_mul associativity"
            );
            assert_eq!(a2.mul(&x, &a2.identity()), x);
            assert_eq!(a2.mul(&a2.identity(), &x), x);
            assert_eq!(a2.mul(&x, &a2.inv(&x)), a2.identity(), "a2 inverse");

            let rb = |s: &mut Sampler| Bc2Word {
                t1: sp2.sample_t(s, &cfg),
                k2: s.scalar(field, &cfg),
                t3: sp2.sample_t(s, &cfg),
                k4: s.scalar(field, &cfg),
            };
            let (x, y, z) = (rb(&mut sampler), rb(&mut sampler), rb(&mut sampler));
            assert_eq!(
                bc2.mul(&bc2.mul(&x, &y), &z),
                bc2.mul(&x, &bc2.mul(&y, &z)),
                "bc2_mul associativity"
            );
            assert_eq!(bc2.mul(&x, &bc2.identity()), x);
            assert_eq!(bc2.mul(&bc2.identity(), &x), x);
            assert_eq!(bc2.mul(&x, &bc2.inv(&x)), bc2.identity(), "bc2 inverse");
        }

        // adjacent commutators act as the interior layers
        let sp3 = space(field, 3);
        let c3 = SourceCoeffs { space: &sp3 };
        let rand_vec = |sp: &PseudoQuadraticSpace, s: &mut Sampler| XVector {
            v: (0..sp.dim0).map(|_| s.scalar(field, &cfg)).collect(),
            a: (0..2 * sp.l).map(|_| s.scalar(field, &cfg)).collect(),
        };
        for sp in [&sp2, &sp3] {
            let c = SourceCoeffs { space: sp };
            let l = sp.l;
            for _ in 0..rounds {
                // [y_l(p), y_{l-1}(k)] = x_2(-p.t k) x_3(-p.w k, sigma(k) p.t k)
                let p = sp.sample_t(&mut sampler, &cfg);
                let k = sampler.scalar(field, &cfg);
                let x = rand_vec(sp, &mut sampler);
                let bracket = {
                    let pinv = sp.t_inv(&p);
                    let s1 = apply_long(&c, &pinv.w, &pinv.t, &x);
                    let s2 = apply_short(&c, l - 1, &k.neg(), &s1);
                    let s3 = apply_long(&c, &p.w, &p.t, &s2);
                    apply_short(&c, l - 1, &k, &s3)
                };
                let mid = p.t.mul(&k).neg();
                let third_w: Vec<SkewScalar> =
                    sp.module_scale(&p.w, &k).iter().map(|v| v.neg()).collect();
                let third_t = skew.sigma(&k).mul(&p.t).mul(&k);
                let expected = apply_form_panel_third(
                    &c,
                    &third_w,
                    &third_t,
                    &apply_form_panel_mid(&c, &mid, &x),
                );
                assert_eq!(bracket, expected, "form-panel bracket at l = {l}");
            }
        }
        for _ in 0..rounds {
            // [y_1(s), y_2(t)] = mid(z(s, t)) inside rank 3
            let s = sampler.scalar(field, &cfg);
            let t = sampler.scalar(field, &cfg);
            let x = rand_vec(&sp3, &mut sampler);
            let bracket = {
                let s1 = apply_short(&c3, 1, &s.neg(), &x);
                let s2 = apply_short(&c3, 2, &t.neg(), &s1);
                let s3 = apply_short(&c3, 1, &s, &s2);
                apply_short(&c3, 2, &t, &s3)
            };
            assert_eq!(
                bracket,
                apply_comm_panel_mid(&c3, 1, &a2.z(&s, &t), &x),
                "short-pair bracket"
            );

            // non-adjacent: y_1 never meets y_3 in rank 3
            let k = sampler.scalar(field, &cfg);
            let tl = sp3.sample_t(&mut sampler, &cfg);
            let x = rand_vec(&sp3, &mut sampler);
            assert_eq!(
                apply_long(&c3, &tl.w, &tl.t, &apply_short(&c3, 1, &k, &x)),
                apply_short(&c3, 1, &k, &apply_long(&c3, &tl.w, &tl.t, &x)),
                "distant generators must commute"
            );
        }

        // the torus substitution table is extensional
        for _ in 0..rounds {
            let j = sampler.gen_range(1, 3) as usize;
            let i = sampler.gen_range(1, 4) as usize;
            let k = sampler.scalar(field, &cfg);
            let m = sampler.nonzero_scalar(field, &cfg);
            let gen = Generator::Short { i: j, k };
            let conj = conjugate_by_torus(&sp3, &gen, i, &m).unwrap();
            let x = rand_vec(&sp3, &mut sampler);
            let lhs = {
                let s1 = apply_torus(&c3, i, &m.inv().unwrap(), &x).unwrap();
                let s2 = apply_generator(&c3, &gen, &s1).unwrap();
                apply_torus(&c3, i, &m, &s2).unwrap()
            };
            assert_eq!(
                lhs,
                apply_generator(&c3, &conj, &x).unwrap(),
                "conjugation table at i = {i}, j = {j}"
            );
        }
    }
    pass(3, format!("group axioms, brackets, commutation, conjugation x {rounds}"));
}

#[test]
fn criterion_4_subring_conditions() {
    let cfg = HeightCfg::new(3);
    let positive_rounds = 10_000;
    for (kind, s) in POSITIVE_INSTANCES {
        let sub = TotalSubring::new(kind);
        let field = sub.field();
        let sp = space(field, 2);
        let scale = parse_scalar(field, s).unwrap();
        let mut sampler = Sampler::from_seed(404);

        let c1 = check_twisted_stability(&sp, &sub, &scale, &mut sampler, &cfg, positive_rounds);
        assert!(c1.witness.is_none(), "{}: {:?}", sub.kind.name(), c1.witness);
        assert!(!c1.starved(), "{}: C1 starved", sub.kind.name());

        let c2 = check_form_compat(&sp, &sub, &scale, false, &mut sampler, &cfg, positive_rounds);
        assert!(c2.witness.is_none(), "{}: {:?}", sub.kind.name(), c2.witness);
        assert!(!c2.starved(), "{}: C2 starved", sub.kind.name());

        let c3 = check_form_compat(&sp, &sub, &scale, true, &mut sampler, &cfg, positive_rounds);
        assert!(c3.witness.is_none(), "{}: {:?}", sub.kind.name(), c3.witness);
        assert!(!c3.starved(), "{}: C3 starved", sub.kind.name());
    }

    // the split prime is not stable under the involution: refutation expected
    let sub = TotalSubring::new(SubringKind::SplitGaussian);
    let field = sub.field();
    let sp = space(field, 2);
    let one = SkewScalar::one(field);
    let mut sampler = Sampler::from_seed(405);
    let control = check_twisted_stability(&sp, &sub, &one, &mut sampler, &cfg, 1_000);
    let witness = control
        .witness
        .expect("split control must yield a counterexample within 1000 samples");
    pass(
        4,
        format!("3 instances x 3 conditions x {positive_rounds} clean; control witness: {witness}"),
    );
}

#[test]
fn criterion_5_case_classification() {
    let es = shipped(2);

    let gauss = &es[0];
    assert_eq!(gauss.form_kind, FormKind::PseudoQuadratic, "gaussian case");
    assert_eq!(
        gauss.rep.as_rational(),
        Some(BigRational::from_integer(1.into())),
        "gaussian representative"
    );
    let s = gauss.structure_summary().unwrap();
    assert_eq!(
        (s.residue_size, s.base_size, s.module_size),
        (9, 3, 9),
        "gaussian residue structure"
    );
    assert!(s.sigma_is_frobenius && !s.sigma_is_identity);

    let quat_mixed = &es[1];
    assert_eq!(quat_mixed.form_kind, FormKind::Quadratic, "coset off the base subset");
    let f = quat_mixed.space.field();
    assert_eq!(quat_mixed.rep, parse_scalar(f, "1+i").unwrap());
    // the defining membership of the quadratic case
    let r = &quat_mixed.rep;
    let probe = r.inv().unwrap().mul(&quat_mixed.space.skew.sigma(r)).add(&SkewScalar::one(f));
    assert!(
        quat_mixed.subring.in_maximal_ideal(&probe),
        "inv(r) sigma(r) + 1 must fall in the maximal ideal"
    );
    let s = quat_mixed.structure_summary().unwrap();
    assert_eq!((s.residue_size, s.base_size, s.module_size), (4, 1, 4));
    assert!(s.sigma_is_identity && !s.sigma_is_frobenius);

    let quat_even = &es[2];
    assert_eq!(quat_even.form_kind, FormKind::PseudoQuadratic);
    assert_eq!(
        quat_even.rep.as_rational(),
        Some(BigRational::from_integer(2.into()))
    );
    assert!(quat_even.module_collapsed, "even scale folds the module away");
    let s = quat_even.structure_summary().unwrap();
    assert_eq!((s.residue_size, s.base_size, s.module_size), (4, 2, 1));

    // scaling the coset by a unit of the same class keeps the representative
    let field = FieldTag::GaussianRational;
    let scaled = Epimorphism::new(
        space(field, 2),
        TotalSubring::new(SubringKind::InertGaussian),
        parse_scalar(field, "3i").unwrap(),
    )
    .unwrap();
    assert_eq!(scaled.form_kind, FormKind::PseudoQuadratic);
    assert_eq!(
        scaled.rep.as_rational(),
        Some(BigRational::from_integer(3.into())),
        "unit factors drop out of the coset"
    );

    pass(5, "cases, representatives, and residue shapes all exact".into());
}

#[test]
fn criterion_6_epimorphism_suite() {
    let start = Instant::now();
    let cfg = HeightCfg::new(3);
    let rounds = 1_000;
    for l in [2usize, 3] {
        for e in shipped(l) {
            let sp = &e.space;
            let field = sp.field();
            let sc = e.source();
            let tc = e.target();
            let mut sampler = Sampler::from_seed(600 + l as u64);
            let id = e.instance_id();

            // (a) the image is independent of the projective representative
            for _ in 0..rounds {
                let x = sample_singular_vector(sp, &mut sampler, &cfg);
                let u = sampler.nonzero_scalar(field, &cfg);
                let p = point(&sc, &x).unwrap();
                let q = point(&sc, &x.scale(&u)).unwrap();
                assert_eq!(
                    e.rho_point(&p).unwrap(),
                    e.rho_point(&q).unwrap(),
                    "{id}: scaling by {u} moved the image"
                );
            }

            // (b) + (c) collinear pairs map to collinear pairs, lines to lines
            let x0 = XVector::basis(&sc, 1);
            let y0 = XVector::basis(&sc, 3);
            let mut distinct = 0;
            for _ in 0..rounds {
                let word = sample_word(sp, &mut sampler, &cfg, 3);
                let xa = apply_word(&sc, &word, &x0).unwrap();
                let ya = apply_word(&sc, &word, &y0).unwrap();
                let px = point(&sc, &xa).unwrap();
                let py = point(&sc, &ya).unwrap();
                assert!(collinear(&sc, &px, &py), "{id}: transport broke a line");
                let ix = e.rho_point(&px).unwrap();
                let iy = e.rho_point(&py).unwrap();
                if ix == iy {
                    continue;
                }
                distinct += 1;
                assert!(collinear(&tc, &ix, &iy), "{id}: images not collinear");
                let line = line_through(&tc, &ix, &iy).unwrap();
                let iz = e.rho_point(&point(&sc, &xa.add(&ya)).unwrap()).unwrap();
                assert!(
                    subspace_contains(&tc, &line, &iz.rep),
                    "{id}: third point left the image line"
                );
            }
            assert!(distinct >= 100, "{id}: only {distinct} distinct image pairs");

            // (d) singular planes keep their dimension
            if l == 3 {
                let z0 = XVector::basis(&sc, 5);
                for _ in 0..200 {
                    let word = sample_word(sp, &mut sampler, &cfg, 3);
                    let rows = [
                        apply_word(&sc, &word, &x0).unwrap(),
                        apply_word(&sc, &word, &y0).unwrap(),
                        apply_word(&sc, &word, &z0).unwrap(),
                    ];
                    let plane = echelonize(&sc, &rows).unwrap();
                    assert_eq!(plane.rank(), 3, "{id}: transported plane degenerated");
                    let img = e.rho_subspace(&plane).unwrap();
                    assert_eq!(img.rank(), 3, "{id}: plane image lost dimension");
                }
            }

            // (e) lifting is a section of the image map
            let mut lifted = 0;
            for _ in 0..rounds {
                let p = if sampler.gen_bool() {
                    let v = e.sample_target_vector(&mut sampler);
                    match point(&tc, &v) {
                        Ok(p) => p,
                        Err(_) => continue,
                    }
                } else {
                    let x = sample_singular_vector(sp, &mut sampler, &cfg);
                    e.rho_point(&point(&sc, &x).unwrap()).unwrap()
                };
                let up = e.lift_point(&p).unwrap();
                assert_eq!(
                    e.rho_point(&up).unwrap(),
                    p,
                    "{id}: lift landed on the wrong fiber"
                );
                lifted += 1;
            }
            assert!(lifted >= rounds / 2, "{id}: only {lifted} lift round-trips");

            // (f) descent dichotomy on the two generator families
            for _ in 0..250 {
                let k = sampler.scalar(field, &cfg);
                let gen = Generator::Short { i: l - 1, k: k.clone() };
                assert_eq!(
                    e.generator_descends(&gen),
                    e.subring.contains(&k),
                    "{id}: short descent must mean a subring argument"
                );
                if !e.subring.contains(&k) {
                    assert!(
                        e.collapse_witness(&gen).unwrap().is_some(),
                        "{id}: {gen} must merge two fibers"
                    );
                }

                let t = SkewScalar::from_rational(field, sampler.rational(&cfg));
                let gen = Generator::Long {
                    w: vec![SkewScalar::zero(field); sp.dim0],
                    t: t.clone(),
                };
                let member = in_scaled_subring(&e.subring, &e.rep, &t, false);
                assert_eq!(
                    e.generator_descends(&gen),
                    member,
                    "{id}: long descent must mean a scaled-subring argument"
                );
                if !member && !t.is_zero() {
                    assert!(
                        e.collapse_witness(&gen).unwrap().is_some(),
                        "{id}: {gen} must merge two fibers"
                    );
                }

                let el = sp.sample_t(&mut sampler, &cfg);
                let gen = Generator::Long {
                    w: el.w,
                    t: el.t.clone(),
                };
                assert_eq!(
                    e.generator_descends(&gen),
                    in_scaled_subring(&e.subring, &e.rep, &el.t, false),
                    "{id}: sampled long generator broke the dichotomy"
                );
            }

            // the explicit witness pair for each family
            let p = e.subring.kind.prime();
            let shallow = SkewScalar::from_rational(field, BigRational::new(1.into(), p.into()));
            let short = Generator::Short {
                i: l - 1,
                k: shallow.clone(),
            };
            let (a, b) = e.collapse_witness(&short).unwrap().unwrap();
            assert_eq!(a, point(&sc, &XVector::basis(&sc, 1)).unwrap(), "{id}");
            assert_eq!(b, point(&sc, &XVector::basis(&sc, 3)).unwrap(), "{id}");

            let t = if e.form_kind == FormKind::Quadratic {
                SkewScalar::one(field)
            } else {
                shallow
            };
            let long = Generator::Long {
                w: vec![SkewScalar::zero(field); sp.dim0],
                t,
            };
            let (a, b) = e.collapse_witness(&long).unwrap().unwrap();
            assert_eq!(a, point(&sc, &XVector::basis(&sc, 1)).unwrap(), "{id}");
            assert_eq!(b, point(&sc, &XVector::basis(&sc, 2)).unwrap(), "{id}");
        }
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 60.0, "epimorphism suite overran: {dt:?}");
    pass(
        6,
        format!("3 instances x ranks 2,3: images, lines, planes, lifts, descent in {dt:.2?}"),
    );
}

#[test]
fn criterion_7_target_space_laws() {
    let rounds = 1_000;
    for e in shipped(2) {
        let tc = e.target();
        let sub = &e.subring;
        let id = e.instance_id();
        let reps = sub.residue_reps();
        let zero = SkewScalar::zero(e.space.field());
        let sigma_r = |x: &SkewScalar| sub.residue_canonical(&e.twisted_sigma(x)).unwrap();

        match e.form_kind {
            FormKind::PseudoQuadratic => {
                // the base subset of the residue form is an involutory set
                let k0: Vec<SkewScalar> =
                    reps.iter().filter(|c| tc.in_k0(c)).cloned().collect();
                let one = SkewScalar::one(e.space.field());
                assert!(
                    k0.iter().any(|c| sub.residue_eq(c, &one)),
                    "{id}: 1 missing from the base subset"
                );
                for a in &k0 {
                    assert!(
                        sub.residue_eq(&sigma_r(a), a),
                        "{id}: base subset not fixed by the involution at {a}"
                    );
                    for b in &k0 {
                        assert!(tc.in_k0(&a.add(b)), "{id}: base subset not additive");
                    }
                }
                for x in &reps {
                    assert!(
                        tc.in_k0(&x.add(&sigma_r(x))),
                        "{id}: trace of {x} escaped the base subset"
                    );
                    if tc.is_zero(x) {
                        continue;
                    }
                    for c in &k0 {
                        assert!(
                            tc.in_k0(&sigma_r(x).mul(c).mul(x)),
                            "{id}: base subset not stable under sigma(t) _ t"
                        );
                    }
                }

                // residue pseudo-quadratic laws on the module
                for v in &reps {
                    for w in &reps {
                        let qv = tc.module_q0(std::slice::from_ref(v));
                        let qw = tc.module_q0(std::slice::from_ref(w));
                        let fvw = tc.module_f0(
                            std::slice::from_ref(v),
                            std::slice::from_ref(w),
                        );
                        let sum = [v.add(w)];
                        let defect = tc
                            .module_q0(&sum)
                            .sub(&qv)
                            .sub(&qw)
                            .sub(&fvw);
                        assert!(tc.in_k0(&defect), "{id}: residue polarization broke");
                        for k in &reps {
                            let scaled = [v.mul(k)];
                            let defect = tc
                                .module_q0(&scaled)
                                .sub(&sigma_r(k).mul(&qv).mul(k));
                            assert!(tc.in_k0(&defect), "{id}: residue sigma-scaling broke");
                        }
                    }
                }
            }
            FormKind::Quadratic => {
                // the residue companion form is symmetric (identically zero
                // here) and the residue form is plainly quadratic
                for v in &reps {
                    for w in &reps {
                        let fvw = tc.module_f0(
                            std::slice::from_ref(v),
                            std::slice::from_ref(w),
                        );
                        let fwv = tc.module_f0(
                            std::slice::from_ref(w),
                            std::slice::from_ref(v),
                        );
                        assert!(sub.residue_eq(&fvw, &fwv), "{id}: companion not symmetric");
                        assert!(sub.residue_eq(&fvw, &zero), "{id}: companion not zero");
                        let qv = tc.module_q0(std::slice::from_ref(v));
                        let qw = tc.module_q0(std::slice::from_ref(w));
                        let sum = [v.add(w)];
                        assert!(
                            sub.residue_eq(&tc.module_q0(&sum), &qv.add(&qw)),
                            "{id}: residue form not additive"
                        );
                        for k in &reps {
                            let scaled = [v.mul(k)];
                            assert!(
                                sub.residue_eq(
                                    &tc.module_q0(&scaled),
                                    &qv.mul(k).mul(k)
                                ),
                                "{id}: residue form not quadratic in the scalar"
                            );
                        }
                    }
                }
            }
        }

        // anisotropy of the residue module
        let nonzero: Vec<SkewScalar> = reps
            .iter()
            .filter(|r| !tc.module_is_zero(std::slice::from_ref(*r)))
            .cloned()
            .collect();
        if nonzero.is_empty() {
            println!("acceptance criterion 7: note — {id} module collapsed, anisotropy vacuous");
        } else {
            let mut sampler = Sampler::from_seed(707);
            for _ in 0..rounds {
                let v = &nonzero[sampler.gen_range(0, nonzero.len() as i64) as usize];
                let q = tc.module_q0(std::slice::from_ref(v));
                assert!(
                    !tc.in_k0(&q),
                    "{id}: nonzero residue vector {v} with isotropic value"
                );
            }
        }
    }
    pass(7, format!("involutory set, residue form laws, anisotropy x {rounds}"));
}

#[test]
fn criterion_8_report_determinism() {
    let bin = env!("CARGO_BIN_EXE_skewpolar");
    let run = || {
        Command::new(bin)
            .args(["selftest", "--seed", "7"])
            .output()
            .expect("selftest runs")
    };
    let a = run();
    let b = run();
    assert_eq!(a.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(b.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout, "selftest streams must be byte-identical");
    let lines = a.stdout.split(|&byte| byte == b'\n').filter(|l| !l.is_empty()).count();
    assert_eq!(lines, 13 * 4, "one record per check per embedded config");
    pass(
        8,
        format!("two selftest runs, {} identical bytes, {lines} records", a.stdout.len()),
    );
}
