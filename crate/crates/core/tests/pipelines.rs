use stabgw_core::chern::{self, StabilizerSpec};
use stabgw_core::equiv::{brute_force_prop22, Prop22Verdict, TransferVerdict};
use stabgw_core::gw::{Certificate, Verdict};
use stabgw_core::pipeline::{lemma57, smith, soundness_sweep, PipelineError};

#[test]
fn smith_family() {
    for n in 2..=6u32 {
        let r = smith(n).unwrap();
        let m = n as i64 + 3;
        assert_eq!(r.sigma, -8 * m);
        assert_eq!(r.lattice_sigma, r.sigma);
        assert_eq!(r.p1_number, -24 * m);
        let pairs = (n * (n - 1) / 2) as usize;
        assert_eq!(r.transfers.len(), 6 * pairs);
        assert!(r
            .transfers
            .iter()
            .all(|t| t.verdict == TransferVerdict::Distinct));
        for (j, c) in r.classes.iter().enumerate() {
            assert_eq!(c.fingerprint.divisibility, j as u64 + 1);
        }
    }
    assert!(matches!(smith(0), Err(PipelineError::SmithRange(0))));
}

#[test]
fn torus_stabilizer_needs_simple_connectivity() {
    // with T² factors the transfer also asks for π₁ = 0
    let e1 = chern::elliptic_e1();
    let other = e1
        .with_c1_coordinates(&{
            let mut c = e1.c1_coordinates().unwrap();
            c[0] = 1;
            c
        })
        .unwrap();
    let r = stabgw_core::equiv::stabilization_transfer(
        &e1,
        &other,
        &StabilizerSpec::Surfaces { genus: 1, count: 2 },
    )
    .unwrap();
    assert_eq!(r.verdict, TransferVerdict::Distinct);
    let mut loose = other.clone();
    loose.simply_connected = false;
    let r = stabgw_core::equiv::stabilization_transfer(
        &e1,
        &loose,
        &StabilizerSpec::Surfaces { genus: 1, count: 1 },
    )
    .unwrap();
    assert!(matches!(r.verdict, TransferVerdict::Inconclusive { .. }));
}

#[test]
fn parity_chain_and_classification() {
    let r = lemma57().unwrap();
    let Verdict::Infeasible {
        certificate: Certificate::Modular {
            modulus,
            coefficients,
            rhs,
            ..
        },
    } = &r.chain.verdict
    else {
        panic!("{:?}", r.chain.verdict)
    };
    assert_eq!(*modulus, 2);
    assert!(coefficients.iter().all(|c| c % 2 == 0));
    assert!(rhs % 2 != 0);
    assert!(r.chain.certificate_verified);

    // brute force over a box for ab = 4, and the even reduction of c₁
    let mut oracle = Vec::new();
    for a in -10i64..=10 {
        for b in -10i64..=10 {
            if 2 * a * b == 2 * 4 {
                oracle.push((a, b));
            }
        }
    }
    let got: Vec<(i64, i64)> = r.candidates.iter().map(|c| (c.a, c.b)).collect();
    assert_eq!(got, oracle);
    let spin: Vec<(i64, i64)> = oracle
        .into_iter()
        .filter(|(a, b)| a % 2 == 0 && b % 2 == 0)
        .collect();
    assert_eq!(r.survivors, spin);
}

#[test]
fn prop22_small_boxes() {
    for k in 1..=2 {
        let r = brute_force_prop22(2, 1, k);
        assert_eq!(r.verdict, Prop22Verdict::Verified);
        assert!(r.checked > 0);
    }
}

#[test]
fn soundness_is_reproducible() {
    let a = soundness_sweep(300, 2, 11).unwrap();
    let b = soundness_sweep(300, 2, 11).unwrap();
    assert_eq!((a.distinct, a.unknown), (b.distinct, b.unknown));
    assert!(a.contradicted.is_empty());
}
