use super::*;
use crate::sidon::{cross_pair_ok, Constructions};
use crate::subspace::max_cross_intersection;
use std::sync::OnceLock;

fn tower(p: u32, k: u32, t: u32) -> Arc<FieldTower> {
    Arc::new(FieldTower::build(p, 1, k, t).unwrap())
}

fn odd_code() -> &'static UnionCode {
    static C: OnceLock<UnionCode> = OnceLock::new();
    C.get_or_init(|| construction_code(tower(2, 2, 5)).unwrap())
}

fn even_code() -> &'static UnionCode {
    static C: OnceLock<UnionCode> = OnceLock::new();
    C.get_or_init(|| construction_code(tower(2, 2, 4)).unwrap())
}

fn subfield(t: &FieldTower) -> Subspace {
    let elems: Vec<_> = (0..t.k())
        .map(|e| t.top().constant(t.xi_pow(e as u64)))
        .collect();
    Subspace::span(t, &elems)
}

#[test]
fn union_sizes_match_the_formulas() {
    let c = odd_code();
    assert_eq!(c.generators.len(), 33);
    assert_eq!(c.claimed_size, BigUint::from(33759u32));
    assert_eq!(
        c.claimed_size,
        theorem_size(Theorem::OddUnion, 2, 2, 2).unwrap()
    );
    assert_eq!(c.claimed_min_distance, 2);
    let e = even_code();
    assert_eq!(e.generators.len(), 4);
    assert_eq!(e.claimed_size, BigUint::from(1020u32));
}

#[test]
fn exact_distances_of_the_small_unions() {
    for code in [odd_code(), even_code()] {
        let v = verify_min_distance(code, Mode::Exact, DEFAULT_BUDGET).unwrap();
        assert_eq!(v.min_distance, Some(2));
        assert!(v.disjoint);
        assert_eq!(v.iterations, exact_cost(code).to_u64().unwrap());
        let c = verify_min_distance(code, Mode::Criterion, DEFAULT_BUDGET).unwrap();
        assert_eq!(c.mode, Mode::Criterion);
        assert_eq!(c.min_distance, v.min_distance);
    }
}

#[test]
fn subfield_orbit_is_a_spread() {
    for (p, k, t) in [(2, 2, 5), (2, 3, 2), (3, 2, 3)] {
        let tw = tower(p, k, t);
        let u = subfield(&tw);
        let code = build_union(tw.clone(), vec![u], "subfield").unwrap();
        let q = BigUint::from(tw.q());
        let expected = (q.pow(tw.m() as u32) - 1u32) / (q.pow(k) - 1u32);
        assert_eq!(code.claimed_size, expected);
        assert_eq!(code.claimed_min_distance, 2 * k as usize);
        let v = verify_min_distance(&code, Mode::Exact, DEFAULT_BUDGET).unwrap();
        assert_eq!(v.min_distance, Some(2 * k as usize));
        // not Sidon, so the criterion falls back to the scan
        let c = verify_min_distance(&code, Mode::Criterion, DEFAULT_BUDGET).unwrap();
        assert_eq!(c.mode, Mode::Exact);
        assert_eq!(c.min_distance, v.min_distance);
        assert_eq!(
            c.criterion_failures,
            vec![CriterionFailure::NotSidon { generator: 0 }]
        );
    }
}

#[test]
fn shared_orbits_are_reported() {
    let code = odd_code();
    let t = &code.tower;
    let g0 = code.generators[0].clone();
    let shifted = g0.shift(t, &t.gamma()).unwrap();
    let bad = build_union(
        t.clone(),
        vec![g0, code.generators[1].clone(), shifted],
        "dup",
    )
    .unwrap();
    let v = verify_min_distance(&bad, Mode::Criterion, DEFAULT_BUDGET).unwrap();
    assert!(v
        .criterion_failures
        .contains(&CriterionFailure::SharedQuotient {
            first: 0,
            second: 2
        }));
    assert_eq!(v.collisions, vec![(0, 2)]);
    assert!(!v.disjoint);
    assert_eq!(v.min_distance, Some(2));
}

#[test]
fn corrupted_generator_lowers_the_distance() {
    let code = odd_code();
    let t = &code.tower;
    let mut gens = code.generators[..4].to_vec();
    gens.push(subfield(t));
    let bad = build_union(t.clone(), gens, "corrupted").unwrap();
    let exact = verify_min_distance(&bad, Mode::Exact, DEFAULT_BUDGET).unwrap();
    let crit = verify_min_distance(&bad, Mode::Criterion, DEFAULT_BUDGET).unwrap();
    assert_eq!(exact.min_distance, crit.min_distance);
    assert!(crit
        .criterion_failures
        .contains(&CriterionFailure::NotSidon { generator: 4 }));
    assert!(exact.min_distance.unwrap() <= 2);
}

#[test]
fn shared_quotients_match_pairwise_criterion() {
    let code = odd_code();
    let t = &code.tower;
    let failures = criterion_failures(code);
    assert!(failures.is_empty());
    for (i, j) in [(0, 7), (3, 31), (15, 16)] {
        let (u, v) = (&code.generators[i], &code.generators[j]);
        assert!(cross_pair_ok(t, u, v).unwrap());
        assert_eq!(max_cross_intersection(t, u, v), Some(1));
    }
}

#[test]
fn budget_is_enforced() {
    let t = tower(3, 3, 5);
    let c = construction_code(t).unwrap();
    assert_eq!(c.generators.len(), 4108);
    assert_eq!(
        c.claimed_size,
        theorem_size(Theorem::OddUnion, 3, 3, 2).unwrap()
    );
    assert!(matches!(
        verify_min_distance(&c, Mode::Exact, DEFAULT_BUDGET),
        Err(OrbitError::Infeasible { .. })
    ));
    let v = verify_min_distance(&c, Mode::Criterion, DEFAULT_BUDGET).unwrap();
    assert_eq!(v.min_distance, Some(4));
    assert!(v.criterion_failures.is_empty());
}

#[test]
fn builder_rejects_bad_inputs() {
    let t = tower(2, 2, 5);
    assert!(matches!(
        build_union(t.clone(), vec![], "x"),
        Err(OrbitError::EmptyCode)
    ));
    let a = Subspace::span(&t, &[t.gamma()]);
    let b = subfield(&t);
    assert!(matches!(
        build_union(t, vec![b, a], "x"),
        Err(OrbitError::DimensionMismatch {
            index: 1,
            expected: 2,
            found: 1
        })
    ));
}

#[test]
fn json_round_trip() {
    let code = even_code();
    let json = code.to_json();
    assert_eq!(json["claimed_size"], "1020");
    let back = UnionCode::from_json(json.clone()).unwrap();
    assert_eq!(back.generators, code.generators);
    assert_eq!(back.claimed_size, code.claimed_size);
    assert_eq!(back.tower.spec(), code.tower.spec());

    let mut bad = json;
    bad["generators"][0]["basis"][0][0] = serde_json::json!(0);
    assert!(UnionCode::from_json(bad).is_err());
}

#[test]
fn criterion_and_exact_agree_on_random_subsets() {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let t = tower(2, 2, 4);
    let c = Constructions::new(&t).unwrap();
    let mut gens: Vec<Subspace> = c
        .enumerate()
        .map(|p| c.make_subspace(&p).unwrap())
        .collect();
    // pad with a few arbitrary 2-dimensional spaces
    for e in [(1u64, 3u64), (2, 9), (5, 40)] {
        let x = t.top().pow(&t.gamma(), e.0);
        let y = t.top().pow(&t.gamma(), e.1);
        gens.push(Subspace::span(&t, &[x, y]));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..6 {
        let mut pick = gens.clone();
        pick.shuffle(&mut rng);
        pick.truncate(3);
        let code = build_union(t.clone(), pick, "sample").unwrap();
        let e = verify_min_distance(&code, Mode::Exact, DEFAULT_BUDGET).unwrap();
        let c = verify_min_distance(&code, Mode::Criterion, DEFAULT_BUDGET).unwrap();
        assert_eq!(e.min_distance, c.min_distance);
    }
}
