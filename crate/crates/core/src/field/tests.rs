use super::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_top(tower: &FieldTower, rng: &mut ChaCha8Rng) -> Top {
    (0..tower.t())
        .map(|_| rng.gen_range(0..tower.mid().order()))
        .collect()
}

#[test]
fn tower_for_small_odd_case() {
    let t = FieldTower::build(2, 1, 2, 5).unwrap();
    assert_eq!((t.q(), t.k(), t.m()), (2, 2, 10));
    assert_eq!(t.mid().element_order(t.xi()), Some(3));
    assert_eq!(t.projective_count(), Some(1023));
}

#[test]
fn tower_construction_is_deterministic() {
    let a = FieldTower::build(3, 1, 3, 5).unwrap();
    let b = FieldTower::build(3, 1, 3, 5).unwrap();
    assert_eq!(a.spec(), b.spec());
    assert_eq!(a.m(), 15);
    assert_eq!(a.mid().element_order(a.xi()), Some(26));
}

#[test]
fn composite_characteristic_is_rejected() {
    assert_eq!(
        FieldTower::build(4, 1, 2, 2).unwrap_err(),
        FieldError::NotPrime(4)
    );
}

#[test]
fn spec_round_trips_through_json() {
    let t = FieldTower::build(2, 2, 2, 3).unwrap();
    let json = serde_json::to_string(&t.spec()).unwrap();
    let spec: TowerSpec = serde_json::from_str(&json).unwrap();
    let u = FieldTower::from_spec(&spec).unwrap();
    assert_eq!(u.spec(), t.spec());
    let mut bad = spec.clone();
    bad.def_poly_top[0] = vec![vec![0, 0], vec![0, 0]];
    assert!(matches!(
        FieldTower::from_spec(&bad),
        Err(FieldError::InvalidSpec(_))
    ));
}

#[test]
fn gamma_satisfies_its_defining_polynomial() {
    for (p, a, k, t) in [(2, 1, 2, 5), (3, 1, 2, 4), (2, 2, 3, 2), (5, 1, 1, 3)] {
        let tower = FieldTower::build(p, a, k, t).unwrap();
        let top = tower.top();
        let g = tower.gamma();
        let f = tower.top().modulus();
        let mut acc = top.zero();
        let mut pw = top.one();
        for &c in f {
            acc = top.add(&acc, &top.scale(&pw, c));
            pw = top.mul(&pw, &g);
        }
        assert!(top.is_zero(&acc));
        assert_ne!(top.constant_term_of(&tower), 0);
    }
}

trait ConstantTerm {
    fn constant_term_of(&self, tower: &FieldTower) -> u32;
}

impl ConstantTerm for TopField {
    fn constant_term_of(&self, tower: &FieldTower) -> u32 {
        tower.top_constant_term()
    }
}

#[test]
fn generic_element_api() {
    let tower = FieldTower::build(3, 1, 2, 3).unwrap();
    let one = tower.one(Level::Top);
    assert_eq!(tower.inv(&one).unwrap(), one);
    assert_eq!(
        tower.inv(&tower.zero(Level::Mid)).unwrap_err(),
        FieldError::DivisionByZero
    );
    let x = tower.mid_element(tower.xi());
    assert_eq!(
        tower.add(&x, &one).unwrap_err(),
        FieldError::LevelMismatch(Level::Mid, Level::Top)
    );
    // x^(q^k) = x on the middle field
    let qk = BigUint::from(9u32);
    assert_eq!(tower.pow(&x, &qk).unwrap(), x);
    assert_eq!(tower.element_order(&x).unwrap(), 8);
    assert_eq!(tower.element_order(&tower.one(Level::Mid)).unwrap(), 1);
    let half = tower.pow(&x, &BigUint::from(4u32)).unwrap();
    assert_eq!(tower.element_order(&half).unwrap(), 2);
    assert_eq!(
        tower.element_order(&tower.zero(Level::Base)).unwrap_err(),
        FieldError::ZeroElement
    );
    let up = tower.embed(&x, Level::Top).unwrap();
    assert_eq!(tower.section(&up, Level::Mid).unwrap(), x);
    let c = tower.from_index(Level::Prime, 2);
    let c_top = tower.embed(&c, Level::Top).unwrap();
    assert_eq!(tower.section(&c_top, Level::Prime).unwrap(), c);
    let g = FieldElement::top(tower.gamma());
    assert_eq!(
        tower.section(&g, Level::Mid).unwrap_err(),
        FieldError::NotInSubfield(Level::Mid)
    );
}

#[test]
fn distributivity_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (p, a, k, t) in [(2, 1, 2, 5), (3, 1, 3, 5), (2, 2, 2, 4), (5, 1, 2, 3)] {
        let tower = FieldTower::build(p, a, k, t).unwrap();
        let top = tower.top();
        let mid = tower.mid();
        for _ in 0..1000 {
            let (x, y, z) = (
                random_top(&tower, &mut rng),
                random_top(&tower, &mut rng),
                random_top(&tower, &mut rng),
            );
            assert_eq!(
                top.mul(&top.add(&x, &y), &z),
                top.add(&top.mul(&x, &z), &top.mul(&y, &z))
            );
            let (a, b, c) = (
                rng.gen_range(0..mid.order()),
                rng.gen_range(0..mid.order()),
                rng.gen_range(0..mid.order()),
            );
            assert_eq!(
                mid.mul(mid.add(a, b), c),
                mid.add(mid.mul(a, c), mid.mul(b, c))
            );
            let base = tower.base();
            let (a, b, c) = (a % base.order(), b % base.order(), c % base.order());
            assert_eq!(
                base.mul(base.add(a, b), c),
                base.add(base.mul(a, c), base.mul(b, c))
            );
            if !top.is_zero(&x) {
                assert_eq!(top.mul(&x, &top.inv(&x).unwrap()), top.one());
            }
        }
    }
}

#[test]
fn frobenius_is_scalar_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let tower = FieldTower::build(3, 1, 2, 3).unwrap();
    for _ in 0..200 {
        let x = FieldElement::top(random_top(&tower, &mut rng));
        let y = FieldElement::top(random_top(&tower, &mut rng));
        let c = tower.from_index(Level::Base, rng.gen_range(0..3));
        let c = tower.embed(&c, Level::Top).unwrap();
        let lhs = tower
            .frobenius(&tower.add(&tower.mul(&c, &x).unwrap(), &y).unwrap())
            .unwrap();
        let rhs = tower
            .add(
                &tower.mul(&c, &tower.frobenius(&x).unwrap()).unwrap(),
                &tower.frobenius(&y).unwrap(),
            )
            .unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn flattening_is_a_bijection() {
    for (p, a, k, t) in [(2, 1, 2, 5), (3, 1, 2, 3), (2, 2, 2, 2)] {
        let tower = FieldTower::build(p, a, k, t).unwrap();
        let q = tower.q() as u64;
        let total = q.pow(tower.m() as u32);
        let mut seen = std::collections::HashSet::new();
        for n in 0..total {
            let coords: Vec<u8> = (0..tower.m())
                .map(|i| ((n / q.pow(i as u32)) % q) as u8)
                .collect();
            let x = tower.unflatten(&coords);
            assert_eq!(tower.flatten(&x), coords);
            assert!(seen.insert(x));
        }
        assert_eq!(seen.len() as u64, total);
    }
}

#[test]
fn flattening_is_additive_on_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let tower = FieldTower::build(3, 1, 3, 5).unwrap();
    let s = tower.scalars();
    for _ in 0..500 {
        let x = random_top(&tower, &mut rng);
        let y = random_top(&tower, &mut rng);
        let sum: Vec<u8> = tower
            .flatten(&x)
            .iter()
            .zip(tower.flatten(&y))
            .map(|(&a, b)| s.add(a, b))
            .collect();
        assert_eq!(tower.flatten(&tower.top().add(&x, &y)), sum);
        assert_eq!(tower.unflatten(&tower.flatten(&x)), x);
    }
}

#[test]
fn projective_reps_are_normalized_and_distinct() {
    let tower = FieldTower::build(3, 1, 2, 2).unwrap();
    let count = tower.projective_count().unwrap();
    assert_eq!(count, 40);
    let mut keys = std::collections::HashSet::new();
    for n in 0..count {
        let x = tower.projective_rep_at(n);
        let key = tower.projective_key(&x);
        assert_eq!(tower.flatten(&x), key);
        assert!(keys.insert(key));
    }
}

#[test]
fn subfield_generators_have_the_right_order() {
    let tower = FieldTower::build(2, 1, 2, 3).unwrap();
    for d in [1u32, 2, 3, 6] {
        let g = tower.subfield_generator(d).unwrap();
        assert!(tower.in_subfield(&g, d));
        let order = tower.element_order(&FieldElement::top(g)).unwrap();
        // a generator of GF(2^d) lies in no proper subfield
        for e in factor::divisors(d as u64) {
            if e < d as u64 {
                assert!(order > (1u64 << e) - 1 || d == 1);
            }
        }
    }
    assert!(tower.subfield_generator(4).is_err());
}
