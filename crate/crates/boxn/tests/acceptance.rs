//! Acceptance suite: each test exercises one gate criterion end to end
//! and prints a PASS line. Exact verification is the ground truth
//! everywhere; tolerances appear only where a numeric oracle is
//! compared against an exact search result.

use std::sync::Arc;
use std::time::Instant;

use boxn::augmentation::{abelianization_functional, quotient_dims};
use boxn::certificates::{lemma21_certificate, theorem_main_certificate};
use boxn::family::{
    box_closed, box_element, d_map, d_preimage, laplacian, laplacian_squared_preimage, sq_preimage,
    u_n, GeneratorTuple, Sign,
};
use boxn::gram::{
    eigen_gap_oracle, finite_order_unit_oracle, spectral_gap_search, GramBaseCertifier,
    SolverConfig,
};
use boxn::groups::{standard, GroupModel, Word};
use boxn::ringalg::{scalar_int, RingElement, RingMatrix, Scalar};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pass(line: &str) {
    println!("acceptance: {line}: PASS");
}

fn random_word(group: &Arc<GroupModel>, rng: &mut ChaCha8Rng, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    let w = Word(
        (0..len)
            .map(|_| rng.gen_range(0..group.alphabet.len() as u32))
            .collect(),
    );
    group.normalize(&w).unwrap()
}

fn random_aug_element(
    group: &Arc<GroupModel>,
    rng: &mut ChaCha8Rng,
    pieces: usize,
    max_len: usize,
) -> RingElement {
    let mut x = RingElement::zero(group);
    for _ in 0..pieces {
        let w = random_word(group, rng, max_len);
        let c = scalar_int(rng.gen_range(-4..5));
        x = x
            .add(&RingElement::one_minus(group, &w).unwrap().scale(&c))
            .unwrap();
    }
    x
}

#[test]
fn criterion_1_lemma21_random_certificates() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    for group in [GroupModel::free(2), standard::symmetric3()] {
        for trial in 0..100 {
            let n = 1 + (trial % 2);
            let s = GeneratorTuple(
                (0..n)
                    .map(|_| rng.gen_range(0..group.alphabet.len() as u32))
                    .collect(),
            );
            let t = GeneratorTuple(
                (0..n)
                    .map(|_| rng.gen_range(0..group.alphabet.len() as u32))
                    .collect(),
            );
            let g = random_word(&group, &mut rng, 3);
            let sign = if rng.gen_bool(0.5) {
                Sign::Plus
            } else {
                Sign::Minus
            };
            let cert = lemma21_certificate(&group, &s, &t, &g, sign).unwrap();
            assert!(
                cert.verify().unwrap().is_verified(),
                "trial {trial} failed on {:?}",
                group.kind
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "took {elapsed:?}, budget 10 s"
    );
    pass(&format!(
        "criterion 1 (200 random one-summand certificates verify exactly in {elapsed:?})"
    ));
}

#[test]
fn criterion_2_family_consistency() {
    let start = Instant::now();
    for group in [GroupModel::free(2), standard::symmetric3()] {
        for n in 0..=3 {
            let recursive = box_element(&group, n).unwrap();
            let closed = box_closed(&group, n).unwrap();
            assert_eq!(recursive, closed, "n = {n}");
            let seeded = u_n(&RingElement::one(&group), n).unwrap();
            assert_eq!(seeded, recursive, "u_n(1, {n})");
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "took {elapsed:?}, budget 30 s"
    );
    pass(&format!(
        "criterion 2 (recursive = closed family and seeded identity, n <= 3, in {elapsed:?})"
    ));
}

#[test]
fn criterion_3_preimage_identities() {
    for group in [GroupModel::free(2), standard::symmetric3()] {
        let k = group.alphabet.len();
        let delta = laplacian(&group);
        assert_eq!(
            d_map(&group, &RingMatrix::identity(&group, k)).unwrap(),
            delta
        );
        let dd = laplacian_squared_preimage(&group);
        assert_eq!(d_map(&group, &dd).unwrap(), delta.mul(&delta).unwrap());
        let sq = sq_preimage(&group);
        let mut direct = RingElement::zero(&group);
        for i in 0..k as u32 {
            let x = RingElement::one_minus(&group, &Word::single(i)).unwrap();
            let term = x
                .star()
                .mul(&x)
                .unwrap()
                .mul(&x.star())
                .unwrap()
                .mul(&x)
                .unwrap();
            direct = direct.add(&term).unwrap();
        }
        assert_eq!(d_map(&group, &sq).unwrap(), direct);
    }
    pass("criterion 3 (codifferential preimage identities, exact)");
}

#[test]
fn criterion_4_d_surjectivity_constructive() {
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    for group in [
        standard::symmetric3(),
        standard::dihedral4(),
        standard::quaternion8(),
    ] {
        let witness = group.auto_witness().unwrap();
        group.validate_witness(&witness).unwrap();
        for trial in 0..100 {
            let pieces = rng.gen_range(1..4);
            let xi = random_aug_element(&group, &mut rng, pieces, 3);
            let preimage = d_preimage(&xi, &witness).unwrap();
            assert_eq!(
                d_map(&group, &preimage).unwrap(),
                xi,
                "trial {trial} on {:?}",
                group.kind
            );
        }
    }
    pass("criterion 4 (constructive preimages reproduce 300 random elements exactly)");
}

#[test]
fn criterion_5_theorem_chain_desk_scale() {
    let start = Instant::now();
    let group = standard::symmetric3();
    let witness = group.auto_witness().unwrap();
    let base = GramBaseCertifier {
        config: SolverConfig::default(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1005);
    for trial in 0..25 {
        let pieces = rng.gen_range(1..4);
        let raw = random_aug_element(&group, &mut rng, pieces, 3);
        let eta = raw
            .add(&raw.star())
            .unwrap()
            .scale(&boxn::ringalg::scalar_ratio(1, 2));
        let cert = theorem_main_certificate(&eta, 2, &witness, &base).unwrap();
        assert!(
            cert.verify().unwrap().is_verified(),
            "trial {trial}: certificate must verify exactly"
        );
        assert!(!cert.lambda.is_negative());
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 300.0,
        "took {elapsed:?}, budget 5 min"
    );
    pass(&format!(
        "criterion 5 (25 order-unit certificates at level 2 verify exactly in {elapsed:?})"
    ));
}

#[test]
fn criterion_6_order_unit_oracle_concordance() {
    for group in [
        standard::symmetric3(),
        standard::dihedral4(),
        standard::quaternion8(),
    ] {
        for n in 1..=3 {
            let u = box_element(&group, n).unwrap();
            assert!(
                finite_order_unit_oracle(&u).unwrap(),
                "box({n}) on {:?}",
                group.kind
            );
        }
    }
    pass("criterion 6 (family members are order units on the three finite test groups)");
}

#[test]
fn criterion_7_idempotence_falsifier() {
    let mut rng = ChaCha8Rng::seed_from_u64(1007);
    for group in [GroupModel::free(2), standard::integers()] {
        for _ in 0..1000 {
            let px = rng.gen_range(1..3);
            let x = random_aug_element(&group, &mut rng, px, 3);
            let py = rng.gen_range(1..3);
            let y = random_aug_element(&group, &mut rng, py, 3);
            let product = x.mul(&y).unwrap();
            for s in 0..group.alphabet.len() as u32 {
                assert!(
                    abelianization_functional(&product, s).unwrap().is_zero(),
                    "functional must vanish on squares"
                );
            }
        }
        // the functional separates 1 - a from the square of the ideal
        let a = Word::single(0);
        let one_minus_a = RingElement::one_minus(&group, &a).unwrap();
        assert_eq!(
            abelianization_functional(&one_minus_a, 0).unwrap(),
            scalar_int(-1)
        );
    }
    pass("criterion 7 (exponent-sum functional kills 2000 squares and separates 1 - a)");
}

#[test]
fn criterion_8_spectral_gap_reproduction() {
    let config = SolverConfig::default();
    let cases = [
        (standard::cyclic(2), 4.0),
        (standard::symmetric3_transpositions(), 6.0),
    ];
    for (group, expected) in cases {
        let oracle = eigen_gap_oracle(&group).unwrap();
        assert!(
            (oracle - expected).abs() < 1e-9,
            "oracle gap {oracle} vs expected {expected}"
        );
        let (lambda, cert) = spectral_gap_search(&group, &config).unwrap();
        let lambda_f = lambda.to_f64().unwrap();
        assert!(
            (lambda_f - oracle).abs() <= 1e-6,
            "search {lambda_f} vs oracle {oracle}"
        );
        assert!(cert.verify().unwrap().is_verified());
        // the certified target really is Delta^2 - lambda Delta
        let delta = laplacian(&group);
        let expected_target = delta
            .mul(&delta)
            .unwrap()
            .sub(&delta.scale(&lambda))
            .unwrap();
        assert_eq!(cert.target_element().unwrap(), &expected_target);
    }
    pass("criterion 8 (certified spectral gaps match the eigenvalue oracle within 1e-6)");
}

#[test]
fn criterion_9_exactness_firewall() {
    // every golden certificate flips to Falsified under any single
    // coefficient perturbation of 1e-9
    let golden_dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("golden")
        .join("certs");
    let mut certs = Vec::new();
    for entry in std::fs::read_dir(&golden_dir).expect("golden certificates directory") {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) == Some("json") {
            certs.push(boxn::jsonio::load_certificate_file(&path, None).unwrap());
        }
    }
    assert!(certs.len() >= 5, "expected a representative set of goldens");
    let delta = Scalar::new(1.into(), 1_000_000_000.into());
    let mut mutations = 0usize;
    for cert in &certs {
        assert!(cert.verify().unwrap().is_verified());
        for variant in mutate_each_coefficient(cert, &delta) {
            match variant.verify().unwrap() {
                boxn::certificates::Verification::Falsified { .. } => mutations += 1,
                boxn::certificates::Verification::Verified => {
                    panic!("a perturbed certificate still verified")
                }
            }
        }
    }
    assert!(mutations > 50, "only {mutations} mutations exercised");
    pass(&format!(
        "criterion 9 ({mutations} single-coefficient perturbations all falsify)"
    ));
}

fn mutate_each_coefficient(
    cert: &boxn::certificates::SosCertificate,
    delta: &Scalar,
) -> Vec<boxn::certificates::SosCertificate> {
    let group = cert.group().clone();
    let mut out = Vec::new();
    for i in 0..cert.weights.len() {
        let mut c = cert.clone();
        c.weights[i] = c.weights[i].clone() + delta.clone();
        out.push(c);
    }
    if cert.order_unit.is_some() {
        let mut c = cert.clone();
        c.lambda = c.lambda.clone() + delta.clone();
        out.push(c);
    }
    for (i, row) in cert.summands.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            for word in entry.terms().keys() {
                let mut c = cert.clone();
                let bump = RingElement::monomial(&group, word, delta.clone()).unwrap();
                c.summands[i][j] = c.summands[i][j].add(&bump).unwrap();
                out.push(c);
            }
        }
    }
    for i in 0..cert.target.rows() {
        for j in 0..cert.target.cols() {
            for word in cert
                .target
                .at(i, j)
                .terms()
                .keys()
                .cloned()
                .collect::<Vec<_>>()
            {
                let mut c = cert.clone();
                let bump = RingElement::monomial(&group, &word, delta.clone()).unwrap();
                *c.target.at_mut(i, j) = c.target.at(i, j).add(&bump).unwrap();
                out.push(c);
            }
        }
    }
    out
}

#[test]
fn criterion_10_stabilization() {
    for group in [standard::symmetric3(), standard::cyclic(2)] {
        let dims = quotient_dims(&group, 4).unwrap();
        assert_eq!(dims, vec![0, 0, 0, 0], "on {:?}", group.kind);
    }
    pass("criterion 10 (augmentation quotients vanish through degree 4)");
}
