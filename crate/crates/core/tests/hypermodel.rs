use std::path::PathBuf;

use num_rational::BigRational;
use x0star::arith::SquarefreeLevel;
use x0star::hypermodel::{genus2_coordinates, genus2_quotient_model, hyp_test_modp, mod2_hyperelliptic_screen, HypOutcome};
use x0star::nfdata::{FixtureStore, StarBasis};

fn store() -> FixtureStore {
    FixtureStore::new(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/orbits"))
}

fn basis(n: u64) -> StarBasis {
    StarBasis::load(&store(), &SquarefreeLevel::new(n).unwrap(), None).unwrap()
}

fn model(n: u64, plus: &[usize]) -> String {
    let b = basis(n);
    let rows: Vec<Vec<BigRational>> = plus
        .iter()
        .flat_map(|&i| b.blocks[i].rows.iter())
        .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
        .collect();
    let orbits = b.orbits();
    let single = (plus.len() == 1).then(|| &orbits[plus[0]]);
    let (num, den) = genus2_coordinates(&rows, single).unwrap();
    genus2_quotient_model(&num, &den, b.genus()).unwrap().display()
}

#[test]
fn quotient_sextics() {
    assert_eq!(model(645, &[3]), "X^6 + 8*X^4 + 20*X^2 + 12*X + 4");
    assert_eq!(model(366, &[2]), "X^6 - 6*X^5 + 23*X^4 - 42*X^3 + 53*X^2 - 24*X + 4");
}

#[test]
fn reductions_mod_3() {
    for n in [202u64, 322, 658] {
        let out = hyp_test_modp(&basis(n).series(), 3).unwrap();
        assert!(!out.is_hyperelliptic(), "{n} mod 3: {out:?}");
    }
    for (n, p) in [(67u64, 3u64), (73, 5), (103, 3)] {
        match hyp_test_modp(&basis(n).series(), p).unwrap() {
            HypOutcome::Hyperelliptic { model } => assert_eq!(model.degree(), 6, "{n} mod {p}"),
            other => panic!("{n} mod {p}: {other:?}"),
        }
    }
}

#[test]
fn mod2_screen_survivors() {
    let (survivors, rows) = mod2_hyperelliptic_screen(&store()).unwrap();
    assert_eq!(survivors, vec![183, 185, 187, 203, 335, 345, 385]);
    assert_eq!(rows.len(), 59);
    let r97 = rows.iter().find(|r| r.level == 97).unwrap();
    assert_eq!(r97.excess, Some((1, 1)));
}
