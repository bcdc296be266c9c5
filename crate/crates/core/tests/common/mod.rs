#![allow(dead_code)]

use rand::Rng;
use woundcert::addpoly::AdditivePoly;
use woundcert::edim::UnipotentProfile;
use woundcert::field_tower::{Tower, TowerElement};

pub fn russell() -> AdditivePoly {
    let k = Tower::new(3, &["t"]).unwrap();
    AdditivePoly::new(&k, &["x", "y"], [(0, 0, k.one()), (0, 1, k.var(0)), (1, 1, k.from_int(-1))]).unwrap()
}

pub fn boundary_p2() -> AdditivePoly {
    let k = Tower::new(2, &["t"]).unwrap();
    AdditivePoly::new(&k, &["x", "y"], [(0, 0, k.one()), (0, 1, k.var(0)), (1, 1, k.one())]).unwrap()
}

/// A unit times `t^v` in a depth-1 tower.
fn with_outer_valuation<R: Rng>(k: &Tower, v: i64, rng: &mut R) -> TowerElement {
    let p = k.p() as i64;
    let unit = &k.from_int(rng.gen_range(1..p)) + &(&k.from_int(rng.gen_range(0..p)) * &k.var(0));
    &unit * &k.monomial(&[v])
}

/// Random separable p-polynomial over `F_p(t)` with disjoint leading
/// progressions, `nvars <= 3` and leading p-exponents in `1..=max_m`.
pub fn random_disjoint_poly<R: Rng>(k: &Tower, max_vars: usize, max_m: u32, rng: &mut R) -> AdditivePoly {
    let names = ["x", "y", "z"];
    loop {
        let r = rng.gen_range(1..=max_vars);
        let mut terms = vec![(0, 0, k.random_nonzero(rng, 2))];
        for var in 0..r {
            let m = rng.gen_range(1..=max_m);
            terms.push((var, m, with_outer_valuation(k, rng.gen_range(-3..=3), rng)));
            for j in 0..m {
                if (var, j) != (0, 0) && rng.gen_bool(0.5) {
                    terms.push((var, j, k.random_nonzero(rng, 2)));
                }
            }
        }
        let poly = AdditivePoly::new(k, &names[..r], terms).unwrap();
        if poly.progressions_disjoint() {
            return poly;
        }
    }
}

pub fn random_profile<R: Rng>(rng: &mut R) -> UnipotentProfile {
    let dim = rng.gen_range(0..6);
    let split_part_dim = rng.gen_range(0..=dim);
    let l = rng.gen_bool(0.5).then(|| rng.gen_range(0..=dim - split_part_dim));
    UnipotentProfile {
        dim,
        split_part_dim,
        n: rng.gen_range(0..4),
        l,
        is_split: [None, Some(false), Some(true)][rng.gen_range(0..3)],
        is_wound_witnessed: rng.gen_bool(0.5),
        char_zero: false,
        commutative_p_torsion: rng.gen_bool(0.3),
    }
}
