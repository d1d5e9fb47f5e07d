use super::*;
use crate::subspace::max_cross_intersection;
use std::sync::OnceLock;

fn odd_2_2() -> &'static FieldTower {
    static T: OnceLock<FieldTower> = OnceLock::new();
    T.get_or_init(|| FieldTower::build(2, 1, 2, 5).unwrap())
}

fn even_2_2() -> &'static FieldTower {
    static T: OnceLock<FieldTower> = OnceLock::new();
    T.get_or_init(|| FieldTower::build(2, 1, 2, 4).unwrap())
}

fn odd_3_3() -> &'static FieldTower {
    static T: OnceLock<FieldTower> = OnceLock::new();
    T.get_or_init(|| FieldTower::build(3, 1, 3, 5).unwrap())
}

#[test]
fn p0_values() {
    assert_eq!(compute_p0(2, Parity::Odd), 2);
    assert_eq!(compute_p0(8, Parity::Even), 2);
    assert_eq!(compute_p0(2, Parity::Even), 1);
    for r in 2..60 {
        // ⌊r/r⌋ = 1 > 0 = ⌊r/(r+1)⌋, and no larger i can qualify
        assert_eq!(compute_p0(r, Parity::Odd), r);
        let p0 = compute_p0(r, Parity::Even);
        assert!(!l_range(Parity::Even, r, p0).is_empty());
        if r > 2 {
            assert!(l_range(Parity::Even, r, p0 + 1).is_empty());
        }
    }
}

#[test]
fn l_ranges_follow_the_union_limits() {
    assert_eq!(l_range(Parity::Odd, 2, 2), 1..=1);
    assert_eq!(l_range(Parity::Odd, 7, 2), 3..=3);
    assert_eq!(l_range(Parity::Odd, 7, 3), 2..=2);
    assert_eq!(l_range(Parity::Even, 8, 2), 3..=3);
    assert!(l_range(Parity::Even, 4, 2).is_empty());
    // integer l in the strict interval r/(p+1) < l < r/p
    for r in 2..40u32 {
        for p in 2..=r {
            let strict: Vec<u32> = (1..r).filter(|&l| r < l * (p + 1) && l * p < r).collect();
            let got: Vec<u32> = l_range(Parity::Even, r, p).collect();
            assert_eq!(got, strict, "r={r} p={p}");
        }
    }
    assert_eq!(extra_l_count(Parity::Even, 8), 1);
    assert_eq!(extra_l_count(Parity::Odd, 2), 1);
}

#[test]
fn set_a_sizes_and_condition() {
    assert_eq!(set_a_exponents(0, 4).unwrap().len(), 1);
    let a = set_a_exponents(17, 125).unwrap();
    assert_eq!(a.len(), 61);
    for &i in &a {
        for &j in &a {
            assert_ne!((17 + i + j) % 124, 0);
        }
    }
    for order in [4u64, 8, 9, 16, 25, 27, 32, 49, 64, 81, 125] {
        for e in 0..order - 1 {
            assert_eq!(
                set_a_exponents(e, order).unwrap().len() as u64,
                (order - 2) / 2
            );
        }
    }
    let c = Constructions::new(even_2_2()).unwrap();
    assert_eq!(c.set_a().len(), 1);
}

#[test]
fn enumeration_counts() {
    assert_eq!(
        Constructions::new(odd_2_2()).unwrap().count(),
        BigUint::from(33u32)
    );
    assert_eq!(
        Constructions::new(even_2_2()).unwrap().count(),
        BigUint::from(4u32)
    );
    let c = Constructions::new(odd_3_3()).unwrap();
    assert_eq!(c.count(), BigUint::from(4108u32));
    assert_eq!(c.enumerate().count(), 4108);
    let all: HashSet<ConstructionParams> = c.enumerate().collect();
    assert_eq!(all.len(), 4108);
}

#[test]
fn bad_shapes_are_rejected() {
    let t = FieldTower::build(2, 1, 2, 3).unwrap();
    assert!(matches!(
        Constructions::new(&t),
        Err(SidonError::BadShape { .. })
    ));
    let t = FieldTower::build(2, 1, 1, 5).unwrap();
    assert!(matches!(
        Constructions::new(&t),
        Err(SidonError::BadShape { .. })
    ));
}

#[test]
fn closed_form_display_for_repetition_two() {
    // u + (θu^q + u)δ₁γ + (θu^q + u)δ₂γ² over every u in GF(27)
    let t = odd_3_3();
    let c = Constructions::new(t).unwrap();
    let p = ConstructionParams {
        family: Family::UOdd,
        r: 2,
        rep: 2,
        l: 1,
        deltas: vec![Some(5), Some(11)],
        theta: Some(1),
    };
    let u_space = c.make_subspace(&p).unwrap();
    let (top, mid) = (t.top(), t.mid());
    let g = t.gamma();
    let g2 = top.square(&g);
    let (d1, d2, th) = (t.xi_pow(5), t.xi_pow(11), t.xi_pow(1));
    let mut elems = Vec::new();
    for u in 0..27 {
        let w = mid.add(mid.mul(th, mid.pow(u, 3)), u);
        let x = top.add(
            &top.constant(u),
            &top.add(
                &top.scale(&g, mid.mul(w, d1)),
                &top.scale(&g2, mid.mul(w, d2)),
            ),
        );
        elems.push(x);
    }
    assert_eq!(Subspace::span(t, &elems), u_space);
}

#[test]
fn outputs_are_distinct_sidon_spaces() {
    for tower in [odd_2_2(), even_2_2()] {
        let c = Constructions::new(tower).unwrap();
        let spaces: Vec<Subspace> = c
            .enumerate()
            .map(|p| c.make_subspace(&p).unwrap())
            .collect();
        let distinct: HashSet<&Subspace> = spaces.iter().collect();
        assert_eq!(distinct.len(), spaces.len());
        for s in &spaces {
            assert_eq!(s.dim(), 2);
            assert!(is_sidon(tower, s));
            // orbit of full size and largest proper self-intersection 1
            assert_eq!(s.linearity_field(tower), 1);
            assert_eq!(s.max_shift_intersection(tower), Some(1));
        }
    }
}

#[test]
fn sidon_examples() {
    let t = odd_2_2();
    let one_dim = Subspace::span(t, &[t.gamma()]);
    assert!(is_sidon(t, &one_dim));
    let subfield = Subspace::span(t, &[t.top().one(), t.top().constant(t.xi())]);
    assert!(!is_sidon(t, &subfield));
    let shifted = subfield.shift(t, &t.gamma()).unwrap();
    assert!(!cross_pair_ok(t, &subfield, &shifted).unwrap());
    assert_eq!(
        cross_pair_ok(t, &subfield, &subfield).unwrap_err(),
        SidonError::EqualInputs
    );
    assert!(matches!(
        cross_pair_ok(t, &subfield, &one_dim),
        Err(SidonError::DimensionMismatch(2, 1))
    ));
}

#[test]
fn cross_criterion_agrees_with_shift_scan_on_a_sample() {
    let t = odd_2_2();
    let c = Constructions::new(t).unwrap();
    let spaces: Vec<Subspace> = c
        .enumerate()
        .map(|p| c.make_subspace(&p).unwrap())
        .collect();
    for (i, j) in [(0, 1), (0, 32), (5, 29), (27, 28), (12, 30)] {
        let crit = cross_pair_ok(t, &spaces[i], &spaces[j]).unwrap();
        let scan = max_cross_intersection(t, &spaces[i], &spaces[j]).unwrap() <= 1;
        assert_eq!(crit, scan);
        assert!(crit);
    }
}

#[test]
fn validation_names_the_violation() {
    let c = Constructions::new(odd_2_2()).unwrap();
    let good = c.enumerate().next().unwrap();
    assert!(c.validate(&good).is_ok());
    let mut p = good.clone();
    p.rep = 3;
    assert!(matches!(c.validate(&p), Err(SidonError::InvalidParams(m)) if m.contains("rep")));
    let mut p = good.clone();
    p.deltas[0] = Some(3);
    assert!(matches!(c.validate(&p), Err(SidonError::InvalidParams(m)) if m.contains("delta_1")));
    let mut p = good.clone();
    p.family = Family::UEven;
    assert!(c.validate(&p).is_err());
    let mut p = good;
    p.theta = None;
    assert!(c.validate(&p).is_err());

    let e = Constructions::new(even_2_2()).unwrap();
    let v = e.enumerate().last().unwrap();
    assert_eq!(v.family, Family::VEven);
    let mut p = v.clone();
    let outside = (0..3).find(|x| !e.set_a().contains(x)).unwrap();
    p.deltas[1] = Some(outside);
    assert!(matches!(e.validate(&p), Err(SidonError::InvalidParams(m)) if m.contains("set A")));
}

#[test]
fn params_json_shape() {
    let c = Constructions::new(odd_2_2()).unwrap();
    let v = c.enumerate().last().unwrap();
    let json = serde_json::to_value(&v).unwrap();
    assert_eq!(json["family"], "v-odd");
    assert!(json["theta"].is_null());
    let back: ConstructionParams = serde_json::from_value(json).unwrap();
    assert_eq!(back, v);
}
