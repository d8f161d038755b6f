use exactq::boolfn::*;
use proptest::prelude::*;

fn table(n: usize, bits: &[bool]) -> TruthTable {
    TruthTable::from_bits(n, &bits[..1 << n]).unwrap()
}

// coefficient of the monomial on `s` is the xor of f over all subsets of s
fn anf_naive(tt: &TruthTable) -> Vec<u32> {
    (0..tt.len() as u32)
        .filter(|&s| (0..tt.len() as u32).filter(|&t| t & s == t).fold(false, |a, t| a ^ tt.get(t as usize)))
        .collect()
}

fn walsh_naive(tt: &TruthTable, s: usize) -> i64 {
    (0..tt.len())
        .map(|x| if tt.get(x) ^ ((x & s).count_ones() % 2 == 1) { -1 } else { 1 })
        .sum()
}

// real multilinear coefficients by inclusion-exclusion over subsets
fn real_degree_naive(tt: &TruthTable) -> u32 {
    let mut best = 0;
    for s in 0..tt.len() {
        let c: i64 = (0..tt.len())
            .filter(|&t| t & s == t)
            .map(|t| {
                let sign = if (s.count_ones() - t.count_ones()) % 2 == 0 { 1 } else { -1 };
                sign * i64::from(tt.get(t))
            })
            .sum();
        if c != 0 {
            best = best.max(s.count_ones());
        }
    }
    best
}

#[test]
fn and2_is_hex_8() {
    let and2 = TruthTable::from_fn(2, |a| a == 3).unwrap();
    assert_eq!(and2.to_hex(), "8");
    assert_eq!(TruthTable::from_hex("8", 2).unwrap(), and2);
    assert_eq!(real_poly_degree(&and2), 2);
}

#[test]
fn hex_digit_order() {
    // x1 alone: entries 1 and 3 of each nibble
    let x1 = TruthTable::from_fn(3, |a| a & 1 == 1).unwrap();
    assert_eq!(x1.to_hex(), "aa");
    let x3 = TruthTable::from_fn(3, |a| a & 4 != 0).unwrap();
    assert_eq!(x3.to_hex(), "f0");
}

#[test]
fn hex_errors() {
    assert!(TruthTable::from_hex("8g", 3).is_err());
    assert!(TruthTable::from_hex("888", 3).is_err());
}

#[test]
fn input_index_convention() {
    assert_eq!(input_index(&[true, false, false]), 1);
    assert_eq!(input_index(&[false, false, true]), 4);
    assert_eq!(index_to_input(6, 3), vec![false, true, true]);
}

#[test]
fn anf_parse_and_print() {
    let a = Anf::parse("x2*x3 + 1 + x1", None).unwrap();
    assert_eq!(a.to_string(), "1 + x1 + x2*x3");
    assert_eq!(a.n(), 3);
    assert_eq!(Anf::parse("x1 + x1", Some(2)).unwrap().to_string(), "0");
    let tt = Anf::parse("x1*x2 + x3*x4", None).unwrap().to_truth_table();
    assert_eq!(tt.weight(), 6);
}

#[test]
fn anf_parse_errors() {
    match Anf::parse("x1 + x0", None) {
        Err(BoolFnError::Parse { pos, msg }) => {
            assert_eq!(pos, 5);
            assert!(msg.contains("indices are 1-based"));
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(Anf::parse("x1 +", None).is_err());
    assert!(Anf::parse("x5", Some(3)).is_err());
    assert!(Anf::parse("y1", None).is_err());
}

#[test]
fn inner_product_spectrum() {
    let tt = Anf::parse("x1*x2 + x3*x4", None).unwrap().to_truth_table();
    for s in 0..16u32 {
        assert_eq!(walsh_sum(&tt, s).abs(), 4);
        assert_eq!(granularity(walsh_coefficient(&tt, s)), 2);
    }
    assert_eq!(max_granularity(&tt), 2);
    assert_eq!(real_poly_degree(&tt), 4);
}

#[test]
fn dyadic_arithmetic() {
    let a = DyadicRational::new(3, 3);
    let b = DyadicRational::new(1, 1);
    assert_eq!((a + b).to_string(), "7/8");
    assert_eq!((a * b).to_string(), "3/16");
    assert_eq!((-a).to_string(), "-3/8");
    assert_eq!(DyadicRational::new(4, 3), DyadicRational::new(1, 1));
    assert_eq!(granularity(DyadicRational::from_integer(5)), 0);
    assert_eq!(granularity(DyadicRational::new(-3, 4)), 4);
}

#[test]
fn constant_function_edges() {
    let z = TruthTable::zero(4).unwrap();
    assert_eq!(max_granularity(&z), 0);
    assert_eq!(real_poly_degree(&z), 0);
    assert_eq!(z.to_anf().to_string(), "0");
    assert_eq!(z.complement().to_anf().to_string(), "1");
}

proptest! {
    #[test]
    fn anf_matches_subset_sums(n in 1usize..=6, bits in proptest::collection::vec(any::<bool>(), 64)) {
        let tt = table(n, &bits);
        let anf = tt.to_anf();
        let got: Vec<u32> = anf.monomials().iter().copied().collect();
        prop_assert_eq!(got, anf_naive(&tt));
        prop_assert_eq!(anf_to_truth_table(&anf), tt.clone());
        prop_assert_eq!(truth_table_to_anf(&tt), anf);
    }

    #[test]
    fn anf_text_round_trip(n in 1usize..=5, bits in proptest::collection::vec(any::<bool>(), 32)) {
        let tt = table(n, &bits);
        let text = tt.to_anf().to_string();
        prop_assert_eq!(Anf::parse(&text, Some(n)).unwrap().to_truth_table(), tt);
    }

    #[test]
    fn hex_round_trip(n in 1usize..=8, bits in proptest::collection::vec(any::<bool>(), 256)) {
        let tt = table(n, &bits);
        prop_assert_eq!(TruthTable::from_hex(&tt.to_hex(), n).unwrap(), tt);
    }

    #[test]
    fn walsh_agrees_with_definition(n in 1usize..=7, bits in proptest::collection::vec(any::<bool>(), 128)) {
        let tt = table(n, &bits);
        let fast = walsh_spectrum_fast(&tt);
        let slow: Vec<i64> = (0..tt.len()).map(|s| walsh_naive(&tt, s)).collect();
        prop_assert_eq!(&fast, &slow);
        prop_assert_eq!(walsh_spectrum_exhaustive(&tt), slow);
        let energy: i64 = fast.iter().map(|w| w * w).sum();
        prop_assert_eq!(energy, 1i64 << (2 * n));
    }

    #[test]
    fn real_degree_agrees(n in 1usize..=6, bits in proptest::collection::vec(any::<bool>(), 64)) {
        let tt = table(n, &bits);
        prop_assert_eq!(real_poly_degree(&tt), real_degree_naive(&tt));
        prop_assert!(real_poly_degree(&tt) >= tt.to_anf().degree());
    }

    #[test]
    fn eval_matches_get(n in 1usize..=6, bits in proptest::collection::vec(any::<bool>(), 64), a in 0usize..64) {
        let tt = table(n, &bits);
        let a = a % tt.len();
        prop_assert_eq!(tt.eval(&index_to_input(a, n)).unwrap(), tt.get(a));
    }

    #[test]
    fn granularity_of_scaled_odd(k in 0u32..40, m in -1000i64..1000) {
        let odd = 2 * m + 1;
        prop_assert_eq!(granularity(DyadicRational::new(odd as i128, k)), k);
    }
}
