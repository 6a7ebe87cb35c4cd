use std::path::PathBuf;

use num_bigint::BigInt;
use x0star::arith::SquarefreeLevel;
use x0star::frobenius::{point_count, weil_check};
use x0star::genus::genus_x0_star;
use x0star::nfdata::{format_signature, lift_to_star, splitting_signature, FixtureStore, StarBasis};

fn store() -> FixtureStore {
    FixtureStore::new(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/orbits"))
}

fn lvl(n: u64) -> SquarefreeLevel {
    SquarefreeLevel::new(n).unwrap()
}

fn count(n: u64, p: u64, k: usize) -> BigInt {
    let orbits = store().load_orbits(&lvl(n)).unwrap();
    let refs: Vec<_> = orbits.iter().collect();
    point_count(&refs, p, k).unwrap()
}

#[test]
fn splitting_645() {
    let orbits = store().load_orbits(&lvl(645)).unwrap();
    assert_eq!(format_signature(&splitting_signature(&orbits)), "1_43+1_129+1_215+2_645");
}

#[test]
fn splittings_957_1055() {
    let s = store();
    let sig = |n| splitting_signature(&s.load_orbits(&lvl(n)).unwrap());
    assert_eq!(sig(957), vec![(319, 4), (957, 7)]);
    assert_eq!(sig(1055), vec![(211, 3), (211, 3), (1055, 3), (1055, 6)]);
}

#[test]
fn point_count_examples() {
    assert_eq!(count(97, 2, 1), BigInt::from(7));
    assert_eq!(count(218, 3, 3), BigInt::from(21));
    assert_eq!(count(2262, 5, 7), BigInt::from(75993));
}

#[test]
fn genus_equals_dimension_sum_everywhere() {
    let s = store();
    let mut checked = 0;
    for entry in std::fs::read_dir(s.root()).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        let Some(n) = name.strip_prefix("N=").and_then(|r| r.strip_suffix(".jsonl")) else { continue };
        let n: u64 = n.parse().unwrap();
        let level = lvl(n);
        if !s.missing(&level).is_empty() {
            continue;
        }
        let orbits = s.load_orbits(&level).unwrap();
        let dims: usize = orbits.iter().map(|o| o.dim).sum();
        assert_eq!(dims as u64, genus_x0_star(&level).unwrap(), "level {n}");
        let refs: Vec<_> = orbits.iter().collect();
        for p in [2u64, 3, 5, 7, 11, 13] {
            if n % p != 0 {
                assert!(weil_check(&refs, p).unwrap(), "level {n}, p = {p}");
            }
        }
        checked += 1;
    }
    assert!(checked > 100);
}

#[test]
fn lifts_of_645() {
    let s = store();
    let n = lvl(645);
    let orbits = s.load_orbits(&n).unwrap();
    let f43 = &orbits[0];
    let h = lift_to_star(f43, &n, 20).unwrap();
    // f(q) + 3 f(q^3) + 5 f(q^5) + 15 f(q^15)
    let a = &f43.q_basis[0];
    let expect = |k: usize| {
        let mut v = a[k - 1].clone();
        for d in [3usize, 5, 15] {
            if k % d == 0 {
                v += BigInt::from(d) * &a[k / d - 1];
            }
        }
        v
    };
    for k in 1..=20 {
        assert_eq!(h[0][k - 1], expect(k));
    }
    let basis = StarBasis::load(&s, &n, None).unwrap();
    assert_eq!(basis.genus(), 5);
    assert_eq!(basis.precision, 52);
}

mod criteria_on_fixtures {
    use super::*;
    use x0star::criteria::{big_factor, free_involution_parity, parity_places};

    fn parity(n: u64, p: u64) -> bool {
        let orbits = store().load_orbits(&lvl(n)).unwrap();
        let refs: Vec<_> = orbits.iter().collect();
        parity_places(&lvl(n), &refs, p, x0star::criteria::DEFAULT_K_MAX).unwrap().excluded
    }

    #[test]
    fn parity_examples() {
        assert!(parity(127, 2));
        assert!(parity(382, 5));
        assert!(parity(1335, 11));
    }

    #[test]
    fn big_factor_examples() {
        let s = store();
        let bf = |n| {
            let o = s.load_orbits(&lvl(n)).unwrap();
            let r: Vec<_> = o.iter().collect();
            big_factor(&lvl(n), &r).unwrap().excluded
        };
        assert!(bf(237));
        assert!(bf(1309));
        assert!(!bf(957));
    }

    #[test]
    fn free_involution_examples() {
        let s = store();
        for (n, p, k, count) in [(109u64, 3u64, 3usize, 21i64), (555, 11, 1, 17), (699, 5, 1, 23)] {
            let o = s.load_orbits(&lvl(2 * n)).unwrap();
            let r: Vec<_> = o.iter().collect();
            let v = free_involution_parity(&lvl(n), &r, p, k).unwrap();
            assert!(v.excluded);
            assert_eq!(v.witness, x0star::criteria::Witness::OddCount { p, k, count });
        }
    }
}
