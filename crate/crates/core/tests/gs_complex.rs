use biquant_core::bracket::{bracket, G1Element};
use biquant_core::cochain::{agree_up_to, cochain_eq, monomial_tuples};
use biquant_core::graph::enumerate;
use biquant_core::graph_ops::compile;
use biquant_core::gs::{
    bracket_identification, d_gs1, d_gs1_literal, d_gs2, d_gs2_literal, d_squared, degree_defect, fraction, fraction_codim1, hkr,
    is_zero_element, strata_bracket, GsSigns, Twist,
};
use biquant_core::poly::{q, Monomial, Poly, TensorPoly};
use biquant_core::tensor::example_bialgebra;
use biquant_core::{Cochain, StructTensor};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mono(m: &Monomial) -> Poly {
    Poly::monomial(m.clone(), q(1))
}

/// Graph-compiled cochains of arity `(m,n)` with at most one inner vertex,
/// one random tensor per graph.
fn compiled(m: usize, n: usize, dim: usize, rng: &mut ChaCha8Rng) -> Vec<Cochain> {
    let mut out = Vec::new();
    for s in 0..=1 {
        for budget in 0..=m + n {
            for g in enumerate(m, n, s, budget) {
                let gammas: Vec<StructTensor> =
                    (0..s).map(|k| StructTensor::random(dim, g.star[k].len(), g.end[k].len(), 3, rng)).collect();
                out.push(compile(&g, &gammas, dim).unwrap());
            }
        }
    }
    out
}

/// Hochschild differential with values in `A`, from polynomial products.
fn hochschild(psi: &Cochain, a: &[Poly]) -> Poly {
    let m = psi.m;
    let ev = |xs: &[Poly]| psi.eval(xs).unwrap().into_poly().unwrap();
    let mut out = a[0].mul(&ev(&a[1..])).unwrap();
    for i in 0..m {
        let mut merged = a[..i].to_vec();
        merged.push(a[i].mul(&a[i + 1]).unwrap());
        merged.extend_from_slice(&a[i + 2..]);
        let sign = if i % 2 == 0 { q(-1) } else { q(1) };
        out = out.add(&ev(&merged).scale(&sign)).unwrap();
    }
    let sign = if m.is_multiple_of(2) { q(-1) } else { q(1) };
    out.add(&ev(&a[..m]).mul(&a[m]).unwrap().scale(&sign)).unwrap()
}

/// Cobar differential of a `(1,n)` cochain, Sweedler sum from `Poly::coproduct`.
fn cobar(psi: &Cochain, a: &Poly) -> TensorPoly {
    let n = psi.n;
    let dim = a.dim();
    let mut out = TensorPoly::zero(dim, n + 1);
    for (key, c) in a.coproduct().terms() {
        let (l, r) = (mono(&key[0]), mono(&key[1]));
        let first = TensorPoly::from_poly(&l).tensor(&psi.eval(std::slice::from_ref(&r)).unwrap()).unwrap();
        out.add_scaled(&first, c).unwrap();
        let last = psi.eval(&[l]).unwrap().tensor(&TensorPoly::from_poly(&r)).unwrap();
        out.add_scaled(&last, &(c * q(if n.is_multiple_of(2) { -1 } else { 1 }))).unwrap();
    }
    let v = psi.eval(std::slice::from_ref(a)).unwrap();
    for i in 0..n {
        out.add_scaled(&v.coproduct_at(i).unwrap(), &q(if i % 2 == 0 { -1 } else { 1 })).unwrap();
    }
    out
}

#[test]
fn d_squared_vanishes_on_compiled_cochains() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut count = 0;
    for m in 1..=3 {
        for n in 1..=4 - m {
            for c in compiled(m, n, 2, &mut rng) {
                assert!(is_zero_element(&d_squared(&c, GsSigns::default()).unwrap()), "({m},{n})");
                count += 1;
            }
        }
    }
    assert!(count > 50);
}

#[test]
fn symbolic_and_literal_differentials_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let s = GsSigns::default();
    for (m, n) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
        for c in compiled(m, n, 2, &mut rng).into_iter().step_by(3) {
            let ext = c.to_extensional();
            assert!(agree_up_to(&d_gs1(&c, s), &d_gs1_literal(&ext, s), 3));
            assert!(agree_up_to(&d_gs2(&c, s), &d_gs2_literal(&ext, s), 3));
        }
    }
}

#[test]
fn d1_is_the_hochschild_differential() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in 1..=2 {
        for c in compiled(m, 1, 2, &mut rng) {
            let d = d_gs1(&c, GsSigns::default());
            for tuple in monomial_tuples(2, m + 1, 2) {
                let polys: Vec<Poly> = tuple.iter().map(mono).collect();
                let got = d.eval(&polys).unwrap().into_poly().unwrap();
                assert_eq!(got, hochschild(&c, &polys));
            }
        }
    }
}

#[test]
fn d2_is_the_cobar_differential() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 1..=2 {
        for c in compiled(1, n, 2, &mut rng) {
            let d = d_gs2(&c, GsSigns::default());
            for a in Monomial::all_up_to(2, 3) {
                let f = mono(&a);
                let got = d.eval(std::slice::from_ref(&f)).unwrap();
                assert_eq!(got, cobar(&c, &f));
            }
        }
    }
}

#[test]
fn sign_search_singles_out_the_printed_boundary_signs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (alpha, beta) = example_bialgebra();
    let mut gens = vec![Cochain::identity(2), Cochain::mul(2), Cochain::coproduct(2), hkr(&alpha), hkr(&beta)];
    for (m, n) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
        gens.extend(compiled(m, n, 2, &mut rng).into_iter().step_by(4));
    }
    let survivors: Vec<GsSigns> =
        GsSigns::all().into_iter().filter(|s| gens.iter().all(|c| is_zero_element(&d_squared(c, *s).unwrap()))).collect();
    assert!(!survivors.is_empty());
    for s in &survivors {
        assert_eq!((s.d1_first, s.d1_last, s.d2_first, s.d2_last), (1, 1, 1, 1));
        assert!(matches!(s.twist, Twist::ParityM | Twist::ParityMN));
    }
    assert!(survivors.contains(&GsSigns::default()));
}

#[test]
fn fraction_of_products_over_coproducts_is_delta_of_product() {
    let d = 2;
    let q_op = fraction(&[Cochain::mul(d), Cochain::mul(d)], &[Cochain::coproduct(d), Cochain::coproduct(d)]).unwrap();
    assert_eq!((q_op.m, q_op.n), (2, 2));
    let monos = Monomial::all_up_to(d, 4);
    for a in &monos {
        for b in &monos {
            let (f, g) = (mono(a), mono(b));
            let got = q_op.eval(&[f.clone(), g.clone()]).unwrap();
            assert_eq!(got, f.mul(&g).unwrap().coproduct());
        }
    }
}

#[test]
fn single_fraction_is_composition() {
    let (alpha, beta) = example_bialgebra();
    let (psi, theta) = (hkr(&beta), hkr(&alpha));
    // ψ on top of θ: the (2,2) composite ψ ∘ θ
    let comp = fraction(std::slice::from_ref(&psi), std::slice::from_ref(&theta)).unwrap();
    assert_eq!((comp.m, comp.n), (2, 2));
    for pair in monomial_tuples(2, 2, 3) {
        let mid = theta.eval_monomials(&pair);
        let mut want = TensorPoly::zero(2, 2);
        for (key, c) in mid.terms() {
            want.add_scaled(&psi.eval_monomials(key), c).unwrap();
        }
        assert_eq!(comp.eval_monomials(&pair), want);
    }
    assert!(fraction(std::slice::from_ref(&theta), std::slice::from_ref(&theta)).is_err());
    assert!(fraction_codim1(&theta, 0, &psi, 2).is_err());
}

#[test]
fn codim1_fraction_with_trivial_factors_is_a_plain_fraction() {
    let (alpha, _) = example_bialgebra();
    let psi = hkr(&alpha);
    // ψ on top of two coproducts, ψ in slot 0 and a product in slot 1
    let a = fraction_codim1(&psi, 0, &Cochain::coproduct(2), 1).unwrap();
    let b = fraction(&[psi.clone(), Cochain::mul(2)], &[Cochain::coproduct(2), Cochain::coproduct(2)]).unwrap();
    assert!(agree_up_to(&a, &b, 3));
}

#[test]
fn degree_defect_vanishes_exactly_at_the_two_codim1_shapes() {
    for m1 in 0..=4 {
        for n1 in 0..=4 {
            let d = degree_defect(m1, n1);
            assert_eq!(d, 2 * (m1 * n1) as i64 - m1 as i64 - n1 as i64);
            assert_eq!(d == 0, (m1, n1) == (0, 0) || (m1, n1) == (1, 1));
        }
    }
}

#[test]
fn strata_bracket_is_the_big_bracket_modulo_exact_terms() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let alpha = StructTensor::random(3, 2, 1, 2, &mut rng);
    let beta = StructTensor::random(3, 1, 2, 2, &mut rng);
    let ab = bracket(&G1Element::from_tensor(alpha.clone()), &G1Element::from_tensor(beta.clone())).component(2, 2);
    assert!(!ab.is_zero());
    let op = strata_bracket(&hkr(&alpha), &hkr(&beta)).unwrap();
    let fit = bracket_identification(&op, &hkr(&ab), GsSigns::default(), 0, 2, 3);
    assert_eq!(fit.residual_rank, 0);
    assert!(!fit.target_exact);
    assert_eq!(fit.lambda, Some(q(1)));
}

#[test]
fn product_and_coproduct_are_closed_and_identity_is_not() {
    let s = GsSigns::default();
    assert!(cochain_eq(&d_gs1(&Cochain::mul(2), s), &Cochain::zero(2, 3, 1)).unwrap());
    assert!(cochain_eq(&d_gs2(&Cochain::coproduct(2), s), &Cochain::zero(2, 1, 3)).unwrap());
    assert!(!d_gs1(&Cochain::identity(2), s).as_symbolic().unwrap().is_zero());
}
