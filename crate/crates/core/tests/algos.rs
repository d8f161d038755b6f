use exactq::algos::*;
use exactq::boolfn::index_to_input;
use exactq::classes::{GammaSpec, MainThmSpec};
use exactq::qsim::{hadamard, Layout, QState, C};
use exactq::verify::seeded_gamma;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn and(x: &[bool], vars: impl IntoIterator<Item = usize>) -> bool {
    vars.into_iter().all(|v| x[v - 1])
}

fn f1(x: &[bool]) -> bool {
    let k = x.len() / 2;
    and(x, 1..=k) ^ and(x, k + 1..=x.len())
}

fn f2(x: &[bool]) -> bool {
    let n = x.len();
    and(x, 1..=3 * n / 4) ^ and(x, n / 2 + 1..=n)
}

fn f_id(x: &[bool]) -> bool {
    let k = x.len() / 2;
    (1..=k).fold(false, |acc, i| acc ^ (x[i - 1] & x[k + i - 1]))
}

// phi1(y^).y~ xor phi2(z^).z~ xor g(x'), straight from the field lists
fn gamma_direct(s: &GammaSpec, x: &[bool]) -> bool {
    let pack = |vars: &[usize]| vars.iter().enumerate().fold(0usize, |a, (r, &v)| a | (usize::from(x[v - 1]) << r));
    let dot = |img: u32, vars: &[usize]| vars.iter().enumerate().fold(false, |a, (t, &v)| a ^ (img >> t & 1 == 1 && x[v - 1]));
    dot(s.phi1[pack(&s.y_hat)], &s.y_tilde) ^ dot(s.phi2[pack(&s.z_hat)], &s.z_tilde) ^ s.g_table.get(pack(&s.x_prime))
}

fn exhaustive(n: usize, budget: usize, f: impl Fn(&[bool]) -> bool, run: impl Fn(&[bool]) -> RunTrace) {
    for a in 0..1usize << n {
        let x = index_to_input(a, n);
        let t = run(&x);
        assert_eq!(t.output, f(&x), "input {a:0n$b}");
        assert_eq!(t.queries, budget);
        assert!(t.final_state_purity <= 1e-9);
    }
}

fn opts() -> RunOptions {
    RunOptions::default()
}

fn random_qubits(rng: &mut ChaCha8Rng, len: usize) -> Vec<C> {
    let v: Vec<C> = (0..len).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

// (|qa>|0>|qb>|W1> + |qc>|1>|qd>|W2>)/sqrt2 on layout (4, 4): w1 branch,
// w2 the untangled qubit, w3 w4 the rest
fn branch_state(qa: usize, qb: bool, qc: usize, qd: bool, w1: &[C], w2: &[C]) -> QState {
    let lay = Layout::new(4, 4).unwrap();
    let mut amps = vec![C::new(0.0, 0.0); lay.dim()];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for r in 0..4 {
        let p0 = (usize::from(qb) << 1) | (r << 2);
        let p1 = 1 | (usize::from(qd) << 1) | (r << 2);
        amps[lay.index(p0, qa)] += w1[r] * s;
        amps[lay.index(p1, qc)] += w2[r] * s;
    }
    QState::from_amplitudes(lay, amps).unwrap()
}

#[test]
fn untangle_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (a, b, c, d) = (1, 2, 3, 4);
    for bits in 0..16usize {
        let x: Vec<bool> = (0..4).map(|i| bits >> i & 1 == 1).collect();
        for _ in 0..10 {
            let w1 = random_qubits(&mut rng, 4);
            let w2 = random_qubits(&mut rng, 4);
            let mut st = branch_state(usize::from(x[0]), x[1], usize::from(x[2]), x[3], &w1, &w2);
            untangle_step(&mut st, a, b, c, d, 2, &x).unwrap();
            assert_eq!(st.queries(), 1);
            let mut want = branch_state(usize::from(x[1]), x[3], usize::from(x[1]), x[3], &w1, &w2);
            if x[1] {
                want = QState::from_amplitudes(want.layout(), want.amplitudes().iter().map(|z| -z).collect()).unwrap();
            }
            let overlap: C = want
                .amplitudes()
                .iter()
                .zip(st.amplitudes())
                .map(|(u, v)| u.conj() * v)
                .sum();
            assert!((overlap - C::new(1.0, 0.0)).norm() < 1e-12, "bits {bits:04b}: overlap {overlap}");
        }
    }
}

#[test]
fn untangle_rejects_wrong_shape() {
    let w = [C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)];
    let x = [true, false, false, false];
    // Q holds |0> in branch 0 but x_1 = 1
    let mut st = branch_state(0, false, 0, false, &w, &w);
    assert!(matches!(untangle_step(&mut st, 1, 2, 3, 4, 2, &x), Err(AlgoError::Precondition(_))));
    assert_eq!(st.queries(), 0);
}

#[test]
fn untangle_from_empty_query_register() {
    // Q = |0> in both branches stands for x_0
    let x = [true, false, true, true];
    let w = [C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)];
    let mut st = branch_state(0, x[1], 0, x[3], &w, &w);
    untangle_step(&mut st, 0, 2, 0, 4, 2, &x).unwrap();
    assert!(!st.measure_query().unwrap().bit);
    assert!(st.measure_qubit(2).unwrap().bit);
}

#[test]
fn acq_example() {
    let x = [true, false, true, false, true, true];
    let mut st = QState::new(Layout::new(6, 3).unwrap());
    st.apply(&hadamard(1)).unwrap();
    acq(&mut st, 1, 3, &x).unwrap();
    assert_eq!(st.queries(), 1);
    assert!(st.mass_outside_01() < 1e-12);
    // branch 0 has w2 = x1 = 1, branch 1 has w2 = x4 = 0, Q back to |0>
    let s = std::f64::consts::FRAC_1_SQRT_2;
    assert!((st.amp(0b010, 0).re - s).abs() < 1e-12);
    assert!((st.amp(0b001, 0).re - s).abs() < 1e-12);
    assert!(st.query_prob_one() < 1e-12);
}

#[test]
fn acq_costs_one_query_each() {
    let x = index_to_input(0b1011011101, 10);
    let mut st = QState::new(Layout::new(10, 5).unwrap());
    st.apply(&hadamard(1)).unwrap();
    for i in 1..5 {
        acq(&mut st, i, 5, &x).unwrap();
    }
    assert_eq!(st.queries(), 4);
}

fn phase_of_branches(st: &QState, p0: usize, p1: usize) -> (f64, f64) {
    (st.amp(p0, 0).re.signum(), st.amp(p1, 0).re.signum())
}

#[test]
fn final_monomial_all_ones() {
    let x = [true; 6];
    let mut st = QState::new(Layout::new(6, 3).unwrap());
    st.apply(&hadamard(1)).unwrap();
    for i in 1..3 {
        acq(&mut st, i, 3, &x).unwrap();
    }
    let m0 = StoredMonomial { controls: vec![2, 3], last: 3 };
    let m1 = StoredMonomial { controls: vec![2, 3], last: 6 };
    final_monomial_phase(&mut st, &x, Some(&m0), Some(&m1)).unwrap();
    assert_eq!(phase_of_branches(&st, 0b110, 0b111), (-1.0, -1.0));
    assert!(st.query_prob_one() < 1e-12);
}

#[test]
fn final_monomial_zero_factor() {
    for x3 in [false, true] {
        let x = [false, true, x3, true, true, true];
        let mut st = QState::new(Layout::new(6, 3).unwrap());
        st.apply(&hadamard(1)).unwrap();
        for i in 1..3 {
            acq(&mut st, i, 3, &x).unwrap();
        }
        let m0 = StoredMonomial { controls: vec![2, 3], last: 3 };
        final_monomial_phase(&mut st, &x, Some(&m0), None).unwrap();
        assert_eq!(st.amp(0b100, 0).re.signum(), 1.0);
    }
}

#[test]
fn acq1_phases() {
    let x = [true; 4];
    let mut st = QState::new(Layout::new(4, 2).unwrap());
    st.apply(&hadamard(1)).unwrap();
    acq1(&mut st, 0, 1, 2, &x).unwrap();
    assert_eq!(st.queries(), 2);
    assert_eq!(phase_of_branches(&st, 0b10, 0b11), (-1.0, -1.0));

    let x = [false, true, true, true];
    let mut st = QState::new(Layout::new(4, 2).unwrap());
    st.apply(&hadamard(1)).unwrap();
    acq1(&mut st, 0, 1, 2, &x).unwrap();
    assert!(st.amp(0b00, 0).re > 0.0);
}

#[test]
fn untangle_s_gives_product_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let x: Vec<bool> = (0..8).map(|_| rng.gen()).collect();
        let mut st = QState::new(Layout::new(8, 5).unwrap());
        st.apply(&hadamard(1)).unwrap();
        let slots: Vec<SlotVars> = (1..=4).map(|j| (j + 1, j, 4 + j)).collect();
        for &(q, v0, v1) in &slots {
            load_slot(&mut st, q, v0, v1, &x).unwrap();
        }
        let before = st.queries();
        let carried = untangle_s(&mut st, &slots, &x).unwrap();
        assert_eq!(st.queries() - before, 2);
        // every work qubit except w1 is now a basis state and w1 is |+> or |->
        for q in 2..=5 {
            assert!(st.measure_qubit(q).is_ok());
        }
        assert!(st.measure_query().is_ok());
        let vars: Vec<usize> = carried.iter().map(|c| c.1).collect();
        assert_eq!(vars, vec![2, 6, 4, 8]);
    }
}

#[test]
fn untangle_s_rejects_odd() {
    let mut st = QState::new(Layout::new(4, 2).unwrap());
    assert_eq!(untangle_s(&mut st, &[(2, 1, 3)], &[false; 4]), Err(AlgoError::OddCount(1)));
}

#[test]
fn algorithm1_exhaustive() {
    for (n, q) in [(2, 1), (6, 4), (10, 7)] {
        exhaustive(n, q, f1, |x| run_algorithm1(n, x, &opts()).unwrap());
    }
}

#[test]
fn algorithm1_examples() {
    let t = run_algorithm1(6, &[true, true, true, false, false, false], &opts()).unwrap();
    assert!(t.output);
    assert_eq!(t.queries, 4);
    for n in [4, 8, 7] {
        assert!(matches!(
            run_algorithm1(n, &vec![false; n], &opts()),
            Err(AlgoError::Residue { .. })
        ));
    }
    assert!(matches!(run_algorithm1(6, &[true; 5], &opts()), Err(AlgoError::InputLength { .. })));
}

#[test]
fn cor2_exhaustive() {
    for n in [6, 10] {
        exhaustive(n, 3 * n / 4, f2, |x| run_cor2(n, x, &opts()).unwrap());
    }
}

#[test]
fn cor2_carries_product_variables() {
    let x = index_to_input(0b1101101111, 10);
    let t = run_cor2(10, &x, &opts()).unwrap();
    let mut vars: Vec<usize> = t.carried.iter().map(|c| c.0).collect();
    vars.sort_unstable();
    assert_eq!(vars, vec![6, 7]);
    for (v, b) in t.carried {
        assert_eq!(b, x[v - 1]);
    }
    let mut x = vec![true; 6];
    x[3] = false;
    assert!(!run_cor2(6, &x, &opts()).unwrap().output);
}

#[test]
fn cor2_other_carry_plans() {
    let plan = CarryPlan { branch1: vec![9, 7, 8, 6] };
    let n = 10;
    for a in (0..1usize << n).step_by(7) {
        let x = index_to_input(a, n);
        assert_eq!(run_cor2_with_plan(n, &x, &plan, &opts()).unwrap().output, f2(&x));
    }
}

#[test]
fn main_family_exhaustive() {
    let spec = MainThmSpec::new(10, vec![vec![8, 9, 10]]).unwrap();
    let f = |x: &[bool]| (and(x, 1..=5) ^ and(x, 8..=10)) & and(x, 6..=7);
    exhaustive(10, 7, f, |x| run_main_thm(&spec, x, &opts()).unwrap());
}

#[test]
fn main_family_zero_factor() {
    let spec = MainThmSpec::new(10, vec![vec![8, 9, 10]]).unwrap();
    let mut x = vec![true; 10];
    x[5] = false;
    assert!(!run_main_thm(&spec, &x, &opts()).unwrap().output);
}

#[test]
fn f_id_exhaustive() {
    for (n, q) in [(4, 3), (6, 4), (8, 5), (10, 7)] {
        exhaustive(n, q, f_id, |x| run_f_id(n, x, &opts()).unwrap());
    }
    assert!(run_f_id(6, &[true; 6], &opts()).unwrap().output);
}

#[test]
fn f_id_qubit_count() {
    for n in [4, 6, 8, 10, 12] {
        let t = run_f_id(n, &vec![true; n], &RunOptions { trace: true, skip_step: None }).unwrap();
        let max_w = t
            .steps
            .unwrap()
            .iter()
            .flat_map(|r| r.op.match_indices('w').map(|(i, _)| r.op[i + 1..].chars().take_while(|c| c.is_ascii_digit()).collect::<String>()))
            .filter_map(|s| s.parse::<usize>().ok())
            .max()
            .unwrap();
        assert!(max_w <= n / 4 + 1, "n = {n} touches w{max_w}");
    }
}

#[test]
fn gamma_identity_equals_f_id() {
    let spec = GammaSpec::identity(8).unwrap();
    for a in 0..256 {
        let x = index_to_input(a, 8);
        assert_eq!(
            run_gamma(&spec, &x, &opts()).unwrap().output,
            run_f_id(8, &x, &opts()).unwrap().output
        );
    }
}

#[test]
fn gamma_random_exhaustive() {
    for n in [4, 6, 8, 10] {
        for seed in 0..3 {
            let spec = seeded_gamma(n, seed).unwrap();
            exhaustive(n, (5 * n).div_ceil(8), |x| gamma_direct(&spec, x), |x| run_gamma(&spec, x, &opts()).unwrap());
        }
    }
}

#[test]
fn gamma_odd_flips_with_last_bit() {
    let spec = GammaSpec::identity(8).unwrap();
    exhaustive(9, 6, |x| f_id(&x[..8]) ^ x[8], |x| run_gamma_odd(&spec, x, &opts()).unwrap());
}

#[test]
fn gamma_capacity_enforced() {
    let mut spec = GammaSpec::identity(8).unwrap();
    spec.x_prime = vec![1];
    spec.g_table = exactq::boolfn::TruthTable::zero(1).unwrap();
    assert!(run_gamma(&spec, &[false; 8], &opts()).is_ok());
    let mut spec = seeded_gamma(6, 0).unwrap();
    spec.x_prime = spec.y_hat.clone();
    spec.g_table = exactq::boolfn::TruthTable::zero(spec.x_prime.len()).unwrap();
    assert!(run_gamma(&spec, &[false; 6], &opts()).is_err());
}

#[test]
fn skipped_gate_breaks_some_input() {
    let o = RunOptions { trace: false, skip_step: Some(3) };
    let broken = (0..64).any(|a| {
        let x = index_to_input(a, 6);
        run_algorithm1(6, &x, &o).map_or(true, |t| t.output != f1(&x))
    });
    assert!(broken);
}

#[test]
fn trace_counts_queries() {
    let t = run_f_id(6, &[true; 6], &RunOptions { trace: true, skip_step: None }).unwrap();
    let rows = t.steps.unwrap();
    assert_eq!(rows.iter().filter(|r| r.op == "O_x").count(), 4);
    assert_eq!(rows.len(), t.gate_count + t.queries);
    assert!(rows.windows(2).all(|w| w[1].step == w[0].step + 1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn algorithm1_random_inputs(bits in proptest::collection::vec(any::<bool>(), 14)) {
        let t = run_algorithm1(14, &bits, &opts()).unwrap();
        prop_assert_eq!(t.output, f1(&bits));
        prop_assert_eq!(t.queries, 10);
    }

    #[test]
    fn gamma_12_random(seed in 0u64..1000, a in 0usize..4096) {
        let spec = seeded_gamma(12, seed).unwrap();
        let x = index_to_input(a, 12);
        let t = run_gamma(&spec, &x, &opts()).unwrap();
        prop_assert_eq!(t.output, gamma_direct(&spec, &x));
        prop_assert_eq!(t.queries, 8);
    }

    #[test]
    fn f_id_14_random(bits in proptest::collection::vec(any::<bool>(), 14)) {
        let t = run_f_id(14, &bits, &opts()).unwrap();
        prop_assert_eq!(t.output, f_id(&bits));
        prop_assert_eq!(t.queries, 9);
    }
}
