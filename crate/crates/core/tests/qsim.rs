use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use exactq::qsim::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-12;

fn zero() -> C {
    C::new(0.0, 0.0)
}

fn random_state(lay: Layout, rng: &mut ChaCha8Rng) -> QState {
    let v: Vec<C> = (0..lay.dim())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    QState::from_amplitudes(lay, v.into_iter().map(|a| a / norm).collect()).unwrap()
}

// query register state (|i> + sign |j>)/sqrt2 with an empty work register
fn pair_state(n: usize, i: usize, j: usize, sign: f64) -> QState {
    let lay = Layout::new(n, 1).unwrap();
    let mut amps = vec![zero(); lay.dim()];
    amps[lay.index(0, i)] += FRAC_1_SQRT_2;
    amps[lay.index(0, j)] += sign * FRAC_1_SQRT_2;
    QState::from_amplitudes(lay, amps).unwrap()
}

#[test]
fn all_query_gates_are_unitary() {
    for n in 1..=10 {
        for i in 0..=n {
            if i > 0 {
                assert!(perm_gate(n, i).unwrap().report(n).defect <= TOL);
            }
            for j in 0..=n {
                if i != j {
                    assert!(par_gate(n, i, j).unwrap().report(n).defect <= TOL, "PAR({i},{j}) n={n}");
                    assert!(sup_gate(n, i, j).unwrap().report(n).defect <= TOL);
                }
            }
        }
    }
}

#[test]
fn all_work_gates_are_unitary() {
    let n = 3;
    let mut gates = vec![query_not(), cnot_query_to_qubit(2), cnot_qubit_to_query(2), swap_query_qubit(3)];
    for q in 1..=4 {
        gates.push(hadamard(q));
        gates.push(x_gate(q));
    }
    gates.push(swap_qubits(2, 4).unwrap());
    gates.push(multi_controlled_not(&[(1, true), (2, false), (3, true)], Target::Query).unwrap());
    gates.push(multi_controlled_not(&[(1, false), (2, true)], Target::Qubit(4)).unwrap());
    gates.push(hadamard(2).c0());
    gates.push(swap_qubits(3, 4).unwrap().c1());
    gates.push(par_gate(n, 0, 3).unwrap().c1());
    let swap03 = Arc::new(QueryOp::permutation(&[3, 1, 2, 0]));
    let ops: Vec<Option<Arc<QueryOp>>> = (0..8).map(|p| (p % 3 == 0).then(|| swap03.clone())).collect();
    gates.push(patterned_gate("DOT", ops));
    for g in &gates {
        let r = g.report(n);
        assert!(r.defect <= TOL, "{} defect {}", r.name, r.defect);
    }
}

#[test]
fn index_errors() {
    assert!(matches!(perm_gate(4, 0), Err(SimError::BadQueryIndex { .. })));
    assert!(matches!(perm_gate(4, 5), Err(SimError::BadQueryIndex { .. })));
    assert!(matches!(par_gate(4, 2, 2), Err(SimError::EqualIndices(2))));
    assert!(swap_qubits(2, 2).is_err());
    assert!(cnot_query_to_qubit(2).controlled(2, true).is_err());
    assert!(Layout::with_cap(10, 10, 1 << 12).is_err());
}

#[test]
fn par_maps_pairs_to_bits() {
    for n in [2, 5, 8] {
        for i in 0..=n {
            for j in 0..=n {
                if i == j {
                    continue;
                }
                for (sign, bit) in [(1.0, 0), (-1.0, 1)] {
                    let mut st = pair_state(n, i, j, sign);
                    st.apply(&par_gate(n, i, j).unwrap()).unwrap();
                    assert!((st.amp(0, bit).norm() - 1.0).abs() < TOL, "n={n} i={i} j={j}");
                    st.apply(&sup_gate(n, i, j).unwrap()).unwrap();
                    assert!(st.fidelity(&pair_state(n, i, j, sign)) > 1.0 - TOL);
                }
            }
        }
    }
}

#[test]
fn perm_swaps_one_and_i() {
    let lay = Layout::new(5, 1).unwrap();
    let mut amps = vec![zero(); lay.dim()];
    amps[1] = C::new(1.0, 0.0);
    let mut st = QState::from_amplitudes(lay, amps).unwrap();
    st.apply(&perm_gate(5, 4).unwrap()).unwrap();
    assert!((st.amp(0, 4).re - 1.0).abs() < TOL);
}

#[test]
fn oracle_phases() {
    let n = 4;
    let x = [true, false, true, true];
    let lay = Layout::new(n, 1).unwrap();
    let amps = vec![C::new(1.0 / (2.0 * 2.5f64.sqrt()), 0.0); lay.dim()];
    let mut st = QState::from_amplitudes(lay, amps.clone()).unwrap();
    st.apply_oracle(&x).unwrap();
    for p in 0..2 {
        assert_eq!(st.amp(p, 0), amps[0]);
        for i in 1..=n {
            let want = if x[i - 1] { -amps[0] } else { amps[0] };
            assert_eq!(st.amp(p, i), want);
        }
    }
    assert_eq!(st.queries(), 1);
    assert!(st.apply_oracle(&x[..3]).is_err());
}

#[test]
fn dense_matrix_of_controlled_not() {
    let lay = Layout::new(1, 2).unwrap();
    let m = dense_matrix(&cnot_qubit_to_query(2), lay).unwrap();
    // basis index = pattern * 2 + q; pattern bit 1 is w2
    for col in 0..8 {
        let (p, q) = (col / 2, col % 2);
        let row = if p & 2 != 0 { p * 2 + (1 - q) } else { col };
        assert_eq!(m[row][col], C::new(1.0, 0.0));
    }
}

#[test]
fn measurement_deviation() {
    let mut st = QState::new(Layout::new(2, 2).unwrap());
    st.apply(&x_gate(2)).unwrap();
    let m = st.measure_qubit(2).unwrap();
    assert!(m.bit);
    assert_eq!(m.deviation, 0.0);
    st.apply(&hadamard(1)).unwrap();
    assert!(matches!(st.measure_qubit(1), Err(SimError::NotDeterministic { .. })));
}

proptest! {
    #[test]
    fn gates_preserve_norm(seed in any::<u64>(), picks in proptest::collection::vec(0usize..9, 1..30)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 4;
        let lay = Layout::new(n, 3).unwrap();
        let mut st = random_state(lay, &mut rng);
        let start = st.clone();
        let x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let mut applied = Vec::new();
        for p in picks {
            let i = rng.gen_range(0..=n);
            let j = (i + rng.gen_range(1..=n)) % (n + 1);
            let g = match p {
                0 => hadamard(rng.gen_range(1..=3)),
                1 => par_gate(n, i, j).unwrap(),
                2 => sup_gate(n, i, j).unwrap().c1(),
                3 => perm_gate(n, i.max(1)).unwrap().c0(),
                4 => x_gate(3),
                5 => swap_qubits(1, 2).unwrap(),
                6 => cnot_query_to_qubit(2),
                7 => multi_controlled_not(&[(1, true), (3, true)], Target::Qubit(2)).unwrap(),
                _ => {
                    st.apply_oracle(&x).unwrap();
                    applied.push(None);
                    continue;
                }
            };
            st.apply(&g).unwrap();
            applied.push(Some(g));
        }
        prop_assert!((st.norm() - 1.0).abs() < 1e-10);
        // undo in reverse with dense adjoints
        let mut v: Vec<C> = st.amplitudes().to_vec();
        for g in applied.iter().rev() {
            match g {
                None => {
                    for p in 0..lay.patterns() {
                        for i in 1..=n {
                            if x[i - 1] {
                                v[lay.index(p, i)] = -v[lay.index(p, i)];
                            }
                        }
                    }
                }
                Some(g) => {
                    let m = dense_matrix(g, lay).unwrap();
                    let mut out = vec![zero(); lay.dim()];
                    for (r, row) in m.iter().enumerate() {
                        for (c, &u) in row.iter().enumerate() {
                            out[c] += u.conj() * v[r];
                        }
                    }
                    v = out;
                }
            }
        }
        let back = QState::from_amplitudes(lay, v).unwrap();
        prop_assert!(back.fidelity(&start) > 1.0 - 1e-10);
    }
}
