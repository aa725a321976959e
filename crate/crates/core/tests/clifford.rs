//! Exhaustive algebra checks: the Clifford relations and their spin
//! representation for m <= 3, verified against an independent reduction,
//! plus randomized homomorphism and duality round trips.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vortexlab::clifford::{
    alt_map, build_spin_rep, clifford_product, quadratic_map, rho, semi_spinor_projectors,
    sigma_pm, volume_element, CliffordElement, Form, Half,
};

const TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mat_sup(a: &DMatrix<Complex64>) -> f64 {
    a.map(|x| x.norm()).max()
}

fn diff_sup(a: &CliffordElement, b: &CliffordElement) -> f64 {
    a.add(&b.scale(c(-1.0, 0.0))).unwrap().sup()
}

/// Reference product: peel one generator at a time off the right factor and
/// push it through by the anticommutation relations alone. Shares no code
/// with the mask arithmetic in the library.
fn slow_product(n: u32, a_mask: u32, b_mask: u32) -> (f64, u32) {
    let mut factors: Vec<u32> = (0..n).filter(|i| a_mask & (1 << i) != 0).collect();
    for i in (0..n).filter(|i| b_mask & (1 << i) != 0) {
        factors.push(i);
    }
    // Bubble the word into sorted order, cancelling adjacent duplicates.
    let mut sign = 1.0;
    let mut k = 0;
    while k + 1 < factors.len() {
        if factors[k] == factors[k + 1] {
            factors.drain(k..k + 2);
            sign = -sign; // e_i e_i = -1
            k = k.saturating_sub(1);
        } else if factors[k] > factors[k + 1] {
            factors.swap(k, k + 1);
            sign = -sign;
            k = k.saturating_sub(1);
        } else {
            k += 1;
        }
    }
    let mask = factors.iter().fold(0u32, |m, i| m | (1 << i));
    (sign, mask)
}

#[test]
fn blade_products_match_an_independent_reduction() {
    for n in [2u32, 4, 6] {
        for a_mask in 0..(1u32 << n) {
            let a = CliffordElement::basis_blade(n, a_mask).unwrap();
            for b_mask in 0..(1u32 << n) {
                let b = CliffordElement::basis_blade(n, b_mask).unwrap();
                let fast = clifford_product(&a, &b).unwrap();
                let (sign, mask) = slow_product(n, a_mask, b_mask);
                assert_eq!(fast.terms().count(), 1);
                assert_eq!(
                    fast.coeff(mask),
                    c(sign, 0.0),
                    "n = {n}, masks {a_mask:#x} * {b_mask:#x}"
                );
            }
        }
    }
}

#[test]
fn representation_and_product_commute() {
    // Gamma is an algebra homomorphism: exhaustively on blade pairs, then
    // on random dense elements.
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for m in 1..=3usize {
        let n = 2 * m as u32;
        let rep = build_spin_rep(m).unwrap();
        for a_mask in 0..(1u32 << n) {
            let a = CliffordElement::basis_blade(n, a_mask).unwrap();
            let ga = rep.gamma_element(&a).unwrap();
            for b_mask in 0..(1u32 << n) {
                let b = CliffordElement::basis_blade(n, b_mask).unwrap();
                let gb = rep.gamma_element(&b).unwrap();
                let gab = rep.gamma_element(&clifford_product(&a, &b).unwrap()).unwrap();
                assert!(
                    mat_sup(&(&ga * &gb - &gab)) < TOL,
                    "m = {m}, masks {a_mask:#x}, {b_mask:#x}"
                );
            }
        }
        let random = |rng: &mut ChaCha8Rng| {
            let mut x = CliffordElement::zero(n).unwrap();
            for mask in 0..(1u32 << n) {
                let blade = CliffordElement::basis_blade(n, mask).unwrap();
                x = x
                    .add(&blade.scale(c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
                    .unwrap();
            }
            x
        };
        for _ in 0..20 {
            let a = random(&mut rng);
            let b = random(&mut rng);
            let lhs = rep.gamma_element(&clifford_product(&a, &b).unwrap()).unwrap();
            let rhs = rep.gamma_element(&a).unwrap() * rep.gamma_element(&b).unwrap();
            assert!(mat_sup(&(lhs - rhs)) < TOL);
        }
    }
}

#[test]
fn anticommutators_reproduce_the_metric() {
    for m in 1..=3usize {
        let rep = build_spin_rep(m).unwrap();
        let id = DMatrix::<Complex64>::identity(rep.dim(), rep.dim());
        for i in 1..=2 * m {
            for j in 1..=2 * m {
                let gi = rep.gamma(i);
                let gj = rep.gamma(j);
                let anti = gi * gj + gj * gi;
                let want = if i == j {
                    id.map(|x| c(-2.0, 0.0) * x)
                } else {
                    DMatrix::zeros(rep.dim(), rep.dim())
                };
                assert!(mat_sup(&(anti - want)) < TOL, "m = {m}, ({i}, {j})");
            }
        }
    }
}

#[test]
fn volume_element_grades_the_spinors() {
    for m in 1..=3usize {
        let n = 2 * m as u32;
        let rep = build_spin_rep(m).unwrap();
        let omega = volume_element(n).unwrap();
        // omega^2 = (-1)^m in the algebra and in the representation.
        let sq = clifford_product(&omega, &omega).unwrap();
        let want = if m % 2 == 0 { 1.0 } else { -1.0 };
        assert!(diff_sup(&sq, &CliffordElement::scalar(n, c(want, 0.0)).unwrap()) < TOL);
        let gsq = rep.gamma_element(&sq).unwrap();
        let gw = rep.gamma_element(&omega).unwrap();
        assert!(mat_sup(&(&gw * &gw - gsq)) < TOL);
        // The projectors built from omega recover the exterior parity split.
        let (p, q) = semi_spinor_projectors(&rep).unwrap();
        let plus = rep.half_indices(Half::Plus);
        let minus = rep.half_indices(Half::Minus);
        assert_eq!(plus.len() + minus.len(), rep.dim());
        for &s in &plus {
            assert!((p[(s, s)] - c(1.0, 0.0)).norm() < TOL);
            assert!(q[(s, s)].norm() < TOL);
        }
        for &s in &minus {
            assert!((q[(s, s)] - c(1.0, 0.0)).norm() < TOL);
            assert!(p[(s, s)].norm() < TOL);
        }
    }
}

#[test]
fn duality_split_of_curvature_forms() {
    // A random two-form splits into selfdual and anti-selfdual halves that
    // sum back, and each half drives only its own spinor bundle.
    let mut rng = ChaCha8Rng::seed_from_u64(87);
    let rep = build_spin_rep(2).unwrap();
    for _ in 0..20 {
        let mut f = Form::zero(4, 2).unwrap();
        for i in 1..=4u32 {
            for j in i + 1..=4 {
                let coeff = c(0.0, rng.gen_range(-3.0..3.0));
                f = f.add(&Form::from_indices(4, &[i, j], coeff).unwrap()).unwrap();
            }
        }
        let sd = f.selfdual_part().unwrap();
        let asd = f.antiselfdual_part().unwrap();
        let back = sd.add(&asd).unwrap();
        assert!(back.add(&f.scale(c(-1.0, 0.0))).unwrap().sup() < TOL);
        assert!(mat_sup(&rep.restrict(&rho(&sd, &rep).unwrap(), Half::Minus)) < TOL);
        assert!(mat_sup(&rep.restrict(&rho(&asd, &rep).unwrap(), Half::Plus)) < TOL);
        // sigma reconstructs each half from its endomorphism.
        for (half, part) in [(Half::Plus, &sd), (Half::Minus, &asd)] {
            let endo = rep.restrict(&rho(part, &rep).unwrap(), half);
            let back = sigma_pm(&rep, &endo, half).unwrap();
            assert!(back.add(&part.scale(c(-1.0, 0.0))).unwrap().sup() < TOL);
        }
    }
}

#[test]
fn spinor_square_feeds_sigma_consistently() {
    // The pairing that closes the curvature equation: sigma+ of the
    // traceless square is imaginary selfdual, and scaling the spinor by t
    // scales the form by t^2.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rep = build_spin_rep(2).unwrap();
    for _ in 0..20 {
        let phi = [
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        ];
        let q = quadratic_map(&rep, &phi).unwrap();
        let eta = sigma_pm(&rep, &q, Half::Plus).unwrap();
        assert!(eta.is_imaginary(TOL));
        assert!(eta.antiselfdual_part().unwrap().sup() < TOL);
        let phi2: Vec<Complex64> = phi.iter().map(|z| z * c(2.0, 0.0)).collect();
        let q2 = quadratic_map(&rep, &phi2).unwrap();
        let eta2 = sigma_pm(&rep, &q2, Half::Plus).unwrap();
        let diff = eta2.add(&eta.scale(c(-4.0, 0.0))).unwrap();
        assert!(diff.sup() < TOL);
        // And rho(sigma(q)) restricted back to W+ is q again.
        let back = rep.restrict(&rho(&eta, &rep).unwrap(), Half::Plus);
        assert!(mat_sup(&(back - q)) < TOL);
    }
}

#[test]
fn forms_embed_in_the_algebra_compatibly() {
    // Alt followed by the algebra product reproduces the wedge on disjoint
    // supports; on overlapping supports the contraction terms appear with
    // the metric sign.
    let e12 = Form::from_indices(4, &[1, 2], c(0.0, 1.0)).unwrap();
    let e34 = Form::from_indices(4, &[3, 4], c(1.0, 0.0)).unwrap();
    let prod = clifford_product(&alt_map(&e12).unwrap(), &alt_map(&e34).unwrap()).unwrap();
    assert_eq!(prod.coeff(0b1111), c(0.0, 1.0));
    assert_eq!(prod.terms().count(), 1);
    // e12 * e12 with an i^2: (i e12)(i e12) = -(e12 e12) = +1.
    let sq = clifford_product(&alt_map(&e12).unwrap(), &alt_map(&e12).unwrap()).unwrap();
    assert_eq!(sq.coeff(0), c(1.0, 0.0));
}
