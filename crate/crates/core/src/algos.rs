//! Exact query algorithms assembled from [`crate::qsim`] gates.
//!
//! Every runner starts with a Hadamard on `w1`, which splits the state into
//! two branches (`w1 = 0` and `w1 = 1`). Each branch gathers its own part of
//! the function into its phase, the work qubits of the two branches are then
//! made equal with [`untangle_step`], and a final Hadamard moves the phase
//! difference into `w1`.
//!
//! Work qubit `w_{j+1}` is called slot `S_j`. Variable index 0 stands for a
//! register that holds `|0>`; `x_0` is read as 0.

use serde::Serialize;
use thiserror::Error;

use crate::boolfn::TruthTable;
use crate::classes::{
    gamma_capacity, three_quarters_floor, ClassError, GammaSpec, MainThmSpec,
};
use crate::qsim::{
    cnot_query_to_qubit, cnot_qubit_to_query, hadamard, multi_controlled_not, par_gate, patterned_gate,
    perm_gate, query_not, sup_gate, swap_query_qubit, swap_qubits, x_gate, Gate, Layout, QState, QueryOp,
    SimError, Target, TraceRow, C, SPAN_TOL,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgoError {
    #[error("{algo} requires {need}, got n = {n}")]
    Residue { algo: &'static str, n: usize, need: &'static str },
    #[error("expected {expected} input bits, got {got}")]
    InputLength { expected: usize, got: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("untangle_s needs an even number of stored variables, got {0}")]
    OddCount(usize),
    #[error("carry plan: {0}")]
    CarryPlan(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Class(#[from] ClassError),
}

/// Result of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunTrace {
    pub output: bool,
    pub queries: usize,
    /// Largest `min(P(0), P(1))` over every register read at the end.
    pub final_state_purity: f64,
    pub gate_count: usize,
    /// Variables read from the work register at the end, with their values.
    pub carried: Vec<(usize, bool)>,
    #[serde(skip)]
    pub steps: Option<Vec<TraceRow>>,
}

/// Knobs shared by all runners.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Keep a per-operation trace.
    pub trace: bool,
    /// Drop the operation with this step index (fault injection).
    pub skip_step: Option<usize>,
}

/// Where a value sits at the end of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Register {
    Query,
    Qubit(usize),
}

fn xv(x: &[bool], i: usize) -> bool {
    i != 0 && x[i - 1]
}

fn check_input(x: &[bool], n: usize) -> Result<(), AlgoError> {
    if x.len() != n {
        Err(AlgoError::InputLength {
            expected: n,
            got: x.len(),
        })
    } else {
        Ok(())
    }
}

fn n_of(st: &QState) -> usize {
    st.layout().n
}

/// `floor(3n/4)`, the budget of the pdsp runners.
pub fn pdsp_budget(n: usize) -> usize {
    three_quarters_floor(n)
}

/// `ceil(5n/8)`, the budget of the MM runners on even `n`.
pub fn mm_budget(n: usize) -> usize {
    (5 * n).div_ceil(8)
}

/// Mass of the state that disagrees with "branch 0 has `Q = x_a`,
/// `w_q = x_b`; branch 1 has `Q = x_c`, `w_q = x_d`".
pub fn untangle_shape_defect(st: &QState, a: usize, b: usize, c: usize, d: usize, q: usize, x: &[bool]) -> f64 {
    let lay = st.layout();
    let bit = 1usize << (q - 1);
    let mut bad = 0.0;
    for p in 0..lay.patterns() {
        let (eq, ew) = if p & 1 == 0 {
            (xv(x, a), xv(x, b))
        } else {
            (xv(x, c), xv(x, d))
        };
        for r in 0..=lay.n {
            let amp = st.amp(p, r);
            if amp == C::new(0.0, 0.0) {
                continue;
            }
            if r != usize::from(eq) || (p & bit != 0) != ew {
                bad += amp.norm_sqr();
            }
        }
    }
    bad
}

/// One query that makes the query register hold `x_b` and `w_q` hold `x_d`
/// in both branches, starting from `Q = x_a, w_q = x_b` in branch 0 and
/// `Q = x_c, w_q = x_d` in branch 1. Both branches pick up `(-1)^{x_b}`.
pub fn untangle_step(
    st: &mut QState,
    a: usize,
    b: usize,
    c: usize,
    d: usize,
    q: usize,
    x: &[bool],
) -> Result<(), AlgoError> {
    let n = n_of(st);
    check_input(x, n)?;
    if a == d || b == c {
        return Err(AlgoError::Precondition(format!(
            "untangle needs a != d and b != c, got a={a} b={b} c={c} d={d}"
        )));
    }
    if q < 2 || q > st.layout().w {
        return Err(AlgoError::Precondition(format!("w{q} cannot hold an untangled value")));
    }
    let defect = untangle_shape_defect(st, a, b, c, d, q, x);
    if defect > SPAN_TOL {
        return Err(AlgoError::Precondition(format!(
            "state is not of the untangle input shape (defect {defect:e})"
        )));
    }
    st.apply(&cnot_qubit_to_query(q))?;
    st.apply(&sup_gate(n, d, a)?.c0())?;
    st.apply(&sup_gate(n, b, c)?.c1())?;
    st.apply_oracle(x)?;
    st.apply(&par_gate(n, a, d)?.c0())?;
    st.apply(&par_gate(n, b, c)?.c1())?;
    st.apply(&cnot_query_to_qubit(q).c0())?;
    st.apply(&cnot_qubit_to_query(q))?;
    Ok(())
}

/// A stored variable: slot qubit, variable in branch 0, variable in branch 1.
pub type SlotVars = (usize, usize, usize);

/// Untangles slots `p` and `q` with one query, leaving the query register
/// as it was. Afterwards `w_p` holds branch 0's `q` variable and `w_q`
/// holds branch 1's `q` variable, in both branches.
pub fn untangle_pair(st: &mut QState, p: SlotVars, q: SlotVars, x: &[bool]) -> Result<(), AlgoError> {
    st.apply(&swap_query_qubit(p.0))?;
    untangle_step(st, p.1, q.1, p.2, q.2, q.0, x)?;
    st.apply(&swap_query_qubit(p.0))?;
    Ok(())
}

/// Untangles an even number of slots in pairs, `s / 2` queries. Returns
/// where each surviving variable ends up.
pub fn untangle_s(st: &mut QState, slots: &[SlotVars], x: &[bool]) -> Result<Vec<(Register, usize)>, AlgoError> {
    if slots.len() % 2 != 0 {
        return Err(AlgoError::OddCount(slots.len()));
    }
    let mut carried = Vec::with_capacity(slots.len());
    for pq in slots.chunks(2) {
        untangle_pair(st, pq[0], pq[1], x)?;
        carried.push((Register::Qubit(pq[0].0), pq[1].1));
        carried.push((Register::Qubit(pq[1].0), pq[1].2));
    }
    Ok(carried)
}

// Odd counts spend one step directly against the query register, which
// holds `q_var` in both branches. Returns the final query variable too.
fn untangle_all(
    st: &mut QState,
    slots: &[SlotVars],
    q_var: usize,
    x: &[bool],
) -> Result<(Vec<(Register, usize)>, usize), AlgoError> {
    let mut carried = Vec::new();
    let mut qv = q_var;
    let mut rest = slots;
    if let Some((&(s, v0, v1), head)) = slots.split_last().filter(|_| slots.len() % 2 == 1) {
        untangle_step(st, qv, v0, qv, v1, s, x)?;
        carried.push((Register::Query, v0));
        carried.push((Register::Qubit(s), v1));
        qv = v0;
        rest = head;
    }
    carried.extend(untangle_s(st, rest, x)?);
    Ok((carried, qv))
}

/// Loads `x_{v0}` (branch 0) or `x_{v1}` (branch 1) into the query register,
/// which must be `|0>`. One query.
pub fn load_query(st: &mut QState, v0: usize, v1: usize, x: &[bool]) -> Result<(), AlgoError> {
    let n = n_of(st);
    st.apply(&sup_gate(n, 0, v0)?.c0())?;
    st.apply(&sup_gate(n, 0, v1)?.c1())?;
    st.apply_oracle(x)?;
    st.apply(&par_gate(n, 0, v0)?.c0())?;
    st.apply(&par_gate(n, 0, v1)?.c1())?;
    Ok(())
}

/// Stores `x_{v0}` / `x_{v1}` in the empty slot `w_slot` and clears the
/// query register again. One query.
pub fn load_slot(st: &mut QState, slot: usize, v0: usize, v1: usize, x: &[bool]) -> Result<(), AlgoError> {
    load_query(st, v0, v1, x)?;
    st.apply(&cnot_query_to_qubit(slot))?;
    st.apply(&cnot_qubit_to_query(slot))?;
    Ok(())
}

/// `acq(i)` for `1 <= i < k`: `w_{i+1}` receives `x_i` in branch 0 and
/// `x_{k+i}` in branch 1.
pub fn acq(st: &mut QState, i: usize, k: usize, x: &[bool]) -> Result<(), AlgoError> {
    load_slot(st, i + 1, i, k + i, x)
}

/// A monomial whose variables except `last` are held in work qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredMonomial {
    pub controls: Vec<usize>,
    pub last: usize,
}

fn branch_controls(branch: bool, qubits: &[usize]) -> Vec<(usize, bool)> {
    std::iter::once((1, branch))
        .chain(qubits.iter().map(|&q| (q, true)))
        .collect()
}

/// Multiplies each branch by `(-1)` raised to its monomial, one query.
/// The query register must be `|0>` and is `|0>` again afterwards.
pub fn final_monomial_phase(
    st: &mut QState,
    x: &[bool],
    m0: Option<&StoredMonomial>,
    m1: Option<&StoredMonomial>,
) -> Result<(), AlgoError> {
    let n = n_of(st);
    let mut flips = Vec::new();
    let mut perms = Vec::new();
    for (branch, m) in [(false, m0), (true, m1)] {
        if let Some(m) = m {
            flips.push(multi_controlled_not(&branch_controls(branch, &m.controls), Target::Query)?);
            perms.push(perm_gate(n, m.last)?.controlled(1, branch)?);
        }
    }
    st.apply_all(&flips)?;
    st.apply_all(&perms)?;
    st.apply_oracle(x)?;
    st.apply_all(&perms)?;
    st.apply_all(&flips)?;
    Ok(())
}

/// Two queries: branch `b` gains the phase `(-1)^{x_{u_b} x_{v_b}}` and
/// keeps `x_{u_b}` in `w_slot`.
pub fn phase_pair(
    st: &mut QState,
    slot: usize,
    (u0, v0): (usize, usize),
    (u1, v1): (usize, usize),
    x: &[bool],
) -> Result<(), AlgoError> {
    let n = n_of(st);
    load_query(st, u0, u1, x)?;
    let p = [perm_gate(n, v0)?.c0(), perm_gate(n, v1)?.c1()];
    st.apply_all(&p)?;
    st.apply_oracle(x)?;
    st.apply_all(&p)?;
    st.apply(&swap_query_qubit(slot))?;
    Ok(())
}

/// `acq1(i)` for the identity MM function with `l = floor(n/4)`, `k = n/2`:
/// branch 0 gains `x_{i+1} x_{k+i+1}`, branch 1 gains
/// `x_{l+i+1} x_{l+k+i+1}`, and `w_{i+2}` keeps `x_{i+1}` / `x_{l+i+1}`.
pub fn acq1(st: &mut QState, i: usize, l: usize, k: usize, x: &[bool]) -> Result<(), AlgoError> {
    phase_pair(st, i + 2, (i + 1, k + i + 1), (l + i + 1, l + k + i + 1), x)
}

struct Finish {
    output: bool,
    purity: f64,
}

fn read_out(st: &QState, registers: &[(Register, usize)]) -> Result<(Vec<(usize, bool)>, f64), AlgoError> {
    let mut vals = Vec::with_capacity(registers.len());
    let mut worst = 0f64;
    for &(r, v) in registers {
        let m = match r {
            Register::Query => st.measure_query()?,
            Register::Qubit(q) => st.measure_qubit(q)?,
        };
        worst = worst.max(m.deviation);
        vals.push((v, m.bit));
    }
    Ok((vals, worst))
}

fn new_state(n: usize, w: usize, opts: &RunOptions) -> Result<QState, AlgoError> {
    let mut st = QState::new(Layout::new(n, w)?);
    if opts.trace {
        st.enable_trace();
    }
    st.set_skip_step(opts.skip_step);
    Ok(st)
}

fn finish(mut st: QState, f: Finish, carried: Vec<(usize, bool)>) -> RunTrace {
    RunTrace {
        output: f.output,
        queries: st.queries(),
        final_state_purity: f.purity,
        gate_count: st.steps() - st.queries(),
        carried,
        steps: st.take_trace(),
    }
}

fn require_pdsp_residue(algo: &'static str, n: usize) -> Result<(), AlgoError> {
    if n % 4 != 2 {
        return Err(AlgoError::Residue {
            algo,
            n,
            need: "n ≡ 2 mod 4",
        });
    }
    Ok(())
}

/// `f1 = x1...x_{n/2} xor x_{n/2+1}...x_n` with `floor(3n/4)` queries.
pub fn run_algorithm1(n: usize, x: &[bool], opts: &RunOptions) -> Result<RunTrace, AlgoError> {
    require_pdsp_residue("algorithm1", n)?;
    check_input(x, n)?;
    let k = n / 2;
    let mut st = new_state(n, k, opts)?;
    st.apply(&hadamard(1))?;
    for i in 1..k {
        acq(&mut st, i, k, x)?;
    }
    let slots: Vec<usize> = (2..=k).collect();
    final_monomial_phase(
        &mut st,
        x,
        Some(&StoredMonomial {
            controls: slots.clone(),
            last: k,
        }),
        Some(&StoredMonomial {
            controls: slots,
            last: n,
        }),
    )?;
    let stored: Vec<SlotVars> = (1..k).map(|j| (j + 1, j, k + j)).collect();
    untangle_s(&mut st, &stored, x)?;
    st.apply(&hadamard(1))?;
    let m = st.measure_qubit(1)?;
    Ok(finish(
        st,
        Finish {
            output: m.bit,
            purity: m.deviation,
        },
        Vec::new(),
    ))
}

/// Which branch-1 variable sits in each slot once the stored values are
/// rearranged before untangling. Slot `S_{2j}` is the one whose branch-1
/// value survives pair `j`, so the product variables must land there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarryPlan {
    /// `branch1[j - 1]` is the variable in `S_j`.
    pub branch1: Vec<usize>,
}

impl CarryPlan {
    /// `S_{2j}` holds `x_{k+j}`; the remaining variables fill the odd slots
    /// in increasing order.
    pub fn standard(n: usize) -> Self {
        let k = n / 2;
        let s = k.saturating_sub(1);
        let carried = s / 2;
        let mut branch1 = vec![0; s];
        for j in 1..=carried {
            branch1[2 * j - 1] = k + j;
        }
        let mut rest = k + carried + 1..k + s + 1;
        for j in (0..s).step_by(2) {
            branch1[j] = rest.next().expect("one variable per odd slot");
        }
        CarryPlan { branch1 }
    }

    fn validate(&self, n: usize) -> Result<(), AlgoError> {
        let k = n / 2;
        let mut sorted = self.branch1.clone();
        sorted.sort_unstable();
        if sorted != (k + 1..k + k).collect::<Vec<_>>() {
            return Err(AlgoError::CarryPlan(format!(
                "must arrange exactly x{}..x{}",
                k + 1,
                2 * k - 1
            )));
        }
        let mut carried: Vec<usize> = self.branch1.iter().skip(1).step_by(2).copied().collect();
        carried.sort_unstable();
        if carried != (k + 1..=three_quarters_floor(n)).collect::<Vec<_>>() {
            return Err(AlgoError::CarryPlan(format!(
                "the even slots must hold x{}..x{}",
                k + 1,
                three_quarters_floor(n)
            )));
        }
        Ok(())
    }
}

/// Shared body of the cor2 and main-family runners.
fn run_pdsp_family(
    n: usize,
    x: &[bool],
    final1: &[usize],
    kickback: &[Vec<usize>],
    ancilla: bool,
    plan: &CarryPlan,
    opts: &RunOptions,
) -> Result<RunTrace, AlgoError> {
    check_input(x, n)?;
    plan.validate(n)?;
    let k = n / 2;
    let w = if ancilla { k + 2 } else { k };
    let mut st = new_state(n, w, opts)?;
    st.apply(&hadamard(1))?;
    if ancilla {
        st.apply(&x_gate(k + 2))?;
        st.apply(&hadamard(k + 2))?;
    }
    for i in 1..k {
        acq(&mut st, i, k, x)?;
    }
    // move the branch-1 values into the plan's order
    let mut cur: Vec<usize> = (k + 1..k + k).collect();
    for pos in 0..cur.len() {
        if cur[pos] != plan.branch1[pos] {
            let j = cur.iter().position(|&v| v == plan.branch1[pos]).expect("validated plan");
            st.apply(&swap_qubits(pos + 2, j + 2)?.c1())?;
            cur.swap(pos, j);
        }
    }
    let slot_of = |v: usize| cur.iter().position(|&c| c == v).map(|p| p + 2);
    let controls1: Vec<usize> = final1
        .iter()
        .filter(|&&v| v != n)
        .map(|&v| slot_of(v).expect("branch 1 stores x_{k+1}..x_{n-1}"))
        .collect();
    final_monomial_phase(
        &mut st,
        x,
        Some(&StoredMonomial {
            controls: (2..=k).collect(),
            last: k,
        }),
        Some(&StoredMonomial {
            controls: controls1,
            last: n,
        }),
    )?;
    for block in kickback {
        let qs: Vec<usize> = block.iter().map(|&v| slot_of(v).expect("stored")).collect();
        st.apply(&multi_controlled_not(&branch_controls(true, &qs), Target::Qubit(k + 2))?)?;
    }
    let stored: Vec<SlotVars> = (1..k).map(|j| (j + 1, j, cur[j - 1])).collect();
    let carried = untangle_s(&mut st, &stored, x)?;
    st.apply(&hadamard(1))?;
    let m = st.measure_qubit(1)?;
    let tilde: Vec<(Register, usize)> = carried
        .into_iter()
        .filter(|&(_, v)| v > k && v <= three_quarters_floor(n))
        .collect();
    let (vals, dev) = read_out(&st, &tilde)?;
    let output = m.bit && vals.iter().all(|&(_, b)| b);
    Ok(finish(
        st,
        Finish {
            output,
            purity: dev.max(m.deviation),
        },
        vals,
    ))
}

/// `x1...x_{floor(3n/4)} xor x_{n/2+1}...x_n` with `floor(3n/4)` queries.
pub fn run_cor2(n: usize, x: &[bool], opts: &RunOptions) -> Result<RunTrace, AlgoError> {
    run_cor2_with_plan(n, x, &CarryPlan::standard(n), opts)
}

pub fn run_cor2_with_plan(n: usize, x: &[bool], plan: &CarryPlan, opts: &RunOptions) -> Result<RunTrace, AlgoError> {
    require_pdsp_residue("cor2", n)?;
    let final1: Vec<usize> = (n / 2 + 1..=n).collect();
    run_pdsp_family(n, x, &final1, &[], false, plan, opts)
}

/// The main family: `(x1...x_{n/2} xor g(x')) * x_{n/2+1}...x_{floor(3n/4)}`,
/// `floor(3n/4)` queries, `n/2 + 2` work qubits.
pub fn run_main_thm(spec: &MainThmSpec, x: &[bool], opts: &RunOptions) -> Result<RunTrace, AlgoError> {
    run_main_thm_with_plan(spec, x, &CarryPlan::standard(spec.n), opts)
}

pub fn run_main_thm_with_plan(
    spec: &MainThmSpec,
    x: &[bool],
    plan: &CarryPlan,
    opts: &RunOptions,
) -> Result<RunTrace, AlgoError> {
    require_pdsp_residue("main", spec.n)?;
    spec.validate()?;
    let n = spec.n;
    let last = spec
        .g_partition
        .iter()
        .find(|b| b.contains(&n))
        .expect("x_n belongs to a block")
        .clone();
    let others: Vec<Vec<usize>> = spec.g_partition.iter().filter(|b| !b.contains(&n)).cloned().collect();
    run_pdsp_family(n, x, &last, &others, true, plan, opts)
}

/// `xor_{i<=n/2} x_i x_{n/2+i}` with `ceil(5n/8)` queries and
/// `floor(n/4) + 1` work qubits.
pub fn run_f_id(n: usize, x: &[bool], opts: &RunOptions) -> Result<RunTrace, AlgoError> {
    if n < 4 || n % 2 != 0 {
        return Err(AlgoError::Residue {
            algo: "f_id",
            n,
            need: "an even n >= 4",
        });
    }
    check_input(x, n)?;
    let l = n / 4;
    let k = n / 2;
    let mut st = new_state(n, l + 1, opts)?;
    st.apply(&hadamard(1))?;
    for i in 0..l {
        acq1(&mut st, i, l, k, x)?;
    }
    let (stored, q_var) = if n % 4 == 0 {
        let stored: Vec<SlotVars> = (1..=l).map(|j| (j + 1, j, l + j)).collect();
        (stored, 0)
    } else {
        // the last product x_k x_n, with S1 brought into agreement
        st.apply(&swap_query_qubit(2).c0())?;
        st.apply(&sup_gate(n, l + 1, 1)?.c0())?;
        st.apply(&sup_gate(n, 0, k)?.c1())?;
        st.apply_oracle(x)?;
        st.apply(&par_gate(n, 1, l + 1)?.c0())?;
        st.apply(&par_gate(n, 0, k)?.c1())?;
        st.apply(&swap_query_qubit(2).c0())?;
        let p = perm_gate(n, n)?.c1();
        st.apply(&sup_gate(n, 0, k)?.c0())?;
        st.apply(&p)?;
        st.apply_oracle(x)?;
        st.apply(&par_gate(n, 0, k)?.c0())?;
        st.apply(&p)?;
        let stored: Vec<SlotVars> = (2..=l).map(|j| (j + 1, j, l + j)).collect();
        (stored, k)
    };
    untangle_all(&mut st, &stored, q_var, x)?;
    st.apply(&hadamard(1))?;
    let m = st.measure_qubit(1)?;
    Ok(finish(
        st,
        Finish {
            output: m.bit,
            purity: m.deviation,
        },
        Vec::new(),
    ))
}

// Positions (0-based slot numbers) whose value survives untangling, for
// the pair layout used by the gamma runner: pair (2j, 2j+1) keeps 2j+1.
fn pair_survivors(count: usize) -> Vec<usize> {
    (1..count).step_by(2).collect()
}

// Orders `vars` so the ones in `keep` land on `positions` first.
fn arrange(vars: &[usize], keep: &[usize], positions: &[usize], len: usize) -> Result<Vec<usize>, AlgoError> {
    let wanted: Vec<usize> = vars.iter().copied().filter(|v| keep.contains(v)).collect();
    if wanted.len() > positions.len() {
        return Err(AlgoError::Class(ClassError::GammaConstraint {
            constraint: 4,
            detail: format!(
                "{} variables of x' fall in one permutation block, the runner carries at most {}",
                wanted.len(),
                positions.len()
            ),
        }));
    }
    let mut out = vec![0; len];
    let mut used = vec![false; len];
    for (&v, &p) in wanted.iter().zip(positions) {
        out[p] = v;
        used[p] = true;
    }
    let mut free = (0..len).filter(|&p| !used[p]);
    for &v in vars.iter().filter(|v| !keep.contains(v)) {
        let p = free.next().expect("as many positions as variables");
        out[p] = v;
    }
    Ok(out)
}

// Gate that swaps |0> and |tilde var> in the query register for every work
// pattern whose stored hat values make the permutation's output bit 1.
fn dot_gate(
    n: usize,
    w: usize,
    t: usize,
    branch0: Option<(&[u32], &[usize], usize)>,
    branch1: Option<(&[u32], &[usize], usize)>,
) -> Gate {
    let mut ops = vec![None; 1 << w];
    let mut cache = std::collections::HashMap::new();
    for (p, op) in ops.iter_mut().enumerate() {
        let side = if p & 1 == 0 { branch0 } else { branch1 };
        let Some((phi, slots, target)) = side else {
            continue;
        };
        let arg = slots
            .iter()
            .enumerate()
            .fold(0usize, |acc, (r, &q)| acc | ((p >> (q - 1) & 1) << r));
        if phi[arg] >> t & 1 == 1 {
            let entry = cache.entry(target).or_insert_with(|| {
                let mut perm: Vec<usize> = (0..=n).collect();
                perm.swap(0, target);
                std::sync::Arc::new(QueryOp::permutation(&perm))
            });
            *op = Some(entry.clone());
        }
    }
    patterned_gate(format!("DOT(t={})", t + 1), ops)
}

/// The restricted MM family, `ceil(5n/8)` queries.
pub fn run_gamma(spec: &GammaSpec, x: &[bool], opts: &RunOptions) -> Result<RunTrace, AlgoError> {
    spec.validate()?;
    check_input(x, spec.n)?;
    gamma_impl(spec, x, false, opts)
}

/// `f(x1..x_{n-1}) xor x_n` for an even-`n - 1` spec, one extra query.
pub fn run_gamma_odd(spec: &GammaSpec, x: &[bool], opts: &RunOptions) -> Result<RunTrace, AlgoError> {
    spec.validate()?;
    check_input(x, spec.n + 1)?;
    gamma_impl(spec, x, true, opts)
}

fn gamma_impl(spec: &GammaSpec, x: &[bool], odd: bool, opts: &RunOptions) -> Result<RunTrace, AlgoError> {
    let n = x.len();
    let ne = spec.n;
    let (cy, cz) = gamma_capacity(ne);
    let in_y = spec.x_prime.iter().filter(|v| spec.y_hat.contains(v)).count();
    let in_z = spec.x_prime.iter().filter(|v| spec.z_hat.contains(v)).count();
    if in_y > cy || in_z > cz {
        return Err(AlgoError::Class(ClassError::GammaConstraint {
            constraint: 4,
            detail: format!(
                "|x' & y_hat| = {in_y}, |x' & z_hat| = {in_z}; at n = {ne} the runner carries at most {cy} and {cz}"
            ),
        }));
    }
    let m = spec.y_hat.len();
    let wide = ne % 4 == 2;
    // slots S_1..S_m pair y/z values; on the wide residue S_{m+1} holds the
    // extra z variable in both branches and, for even m, T copies one more
    let copy_slot = wide && m % 2 == 0;
    let w = 1 + m + usize::from(wide) + usize::from(copy_slot);
    let mut st = new_state(n, w, opts)?;
    st.apply(&hadamard(1))?;
    if odd {
        // branch 1 picks up (-1)^{x_n}
        st.apply(&query_not().c1())?;
        st.apply(&perm_gate(n, n)?.c1())?;
        st.apply_oracle(x)?;
        st.apply(&perm_gate(n, n)?.c1())?;
        st.apply(&query_not().c1())?;
    }
    let paired = if wide && m % 2 == 1 { m - 1 } else { m };
    let survivors = pair_survivors(paired);
    // positions whose z value survives
    let mut z_keep: Vec<usize> = Vec::new();
    if wide {
        z_keep.push(m);
        if m % 2 == 1 {
            z_keep.push(m - 1);
        } else if m > 0 {
            z_keep.push(0);
        }
    } else if m % 2 == 1 {
        z_keep.push(m - 1);
    }
    z_keep.extend(&survivors);
    let mut y_keep = survivors.clone();
    if !wide && m % 2 == 1 {
        y_keep.push(m - 1);
    }
    let z_len = m + usize::from(wide);
    let y_order = arrange(&spec.y_hat, &spec.x_prime, &y_keep, m)?;
    let z_order = arrange(&spec.z_hat, &spec.x_prime, &z_keep, z_len)?;
    let y_pos: Vec<usize> = spec
        .y_hat
        .iter()
        .map(|v| y_order.iter().position(|u| u == v).expect("placed") + 2)
        .collect();
    let z_pos: Vec<usize> = spec
        .z_hat
        .iter()
        .map(|v| z_order.iter().position(|u| u == v).expect("placed") + 2)
        .collect();
    for j in 0..m {
        load_slot(&mut st, j + 2, y_order[j], z_order[j], x)?;
    }
    if wide {
        load_slot(&mut st, m + 2, z_order[m], z_order[m], x)?;
    }
    for t in 0..m {
        let g = dot_gate(
            n,
            w,
            t,
            Some((&spec.phi1, &y_pos, spec.y_tilde[t])),
            Some((&spec.phi2, &z_pos, spec.z_tilde[t])),
        );
        st.apply(&g)?;
        st.apply_oracle(x)?;
        st.apply(&g)?;
    }
    let t_slot = w;
    if wide {
        let g = dot_gate(n, w, m, None, Some((&spec.phi2, &z_pos, spec.z_tilde[m])));
        st.apply(&g)?;
        if m % 2 == 1 {
            // branch 0 swaps its y value in S_m for branch 1's z value
            let r = m + 1;
            let (a, d) = (y_order[m - 1], z_order[m - 1]);
            st.apply(&swap_query_qubit(r).c0())?;
            st.apply(&sup_gate(n, d, a)?.c0())?;
            st.apply_oracle(x)?;
            st.apply(&par_gate(n, a, d)?.c0())?;
            st.apply(&swap_query_qubit(r).c0())?;
        } else {
            // branch 0 fetches the z value of S_1 into T
            let d = z_order[0];
            st.apply(&sup_gate(n, 0, d)?.c0())?;
            st.apply_oracle(x)?;
            st.apply(&par_gate(n, 0, d)?.c0())?;
            st.apply(&cnot_query_to_qubit(t_slot).c0())?;
            st.apply(&cnot_qubit_to_query(t_slot).controlled(1, false)?)?;
        }
        st.apply(&g)?;
        if m % 2 == 0 {
            st.apply(&multi_controlled_not(&[(1, true), (2, true)], Target::Qubit(t_slot))?)?;
        }
    }
    let stored: Vec<SlotVars> = (0..paired).map(|j| (j + 2, y_order[j], z_order[j])).collect();
    let (mut carried, _) = if wide {
        (untangle_s(&mut st, &stored, x)?, 0)
    } else {
        untangle_all(&mut st, &stored, 0, x)?
    };
    if wide {
        carried.push((Register::Qubit(m + 2), z_order[m]));
        if m % 2 == 1 {
            carried.push((Register::Qubit(m + 1), z_order[m - 1]));
        } else {
            carried.push((Register::Qubit(t_slot), z_order[0]));
        }
    }
    st.apply(&hadamard(1))?;
    let out = st.measure_qubit(1)?;
    let needed: Vec<(Register, usize)> = spec
        .x_prime
        .iter()
        .map(|v| {
            carried
                .iter()
                .find(|c| c.1 == *v)
                .copied()
                .expect("x' variables were placed on surviving positions")
        })
        .collect();
    let (vals, dev) = read_out(&st, &needed)?;
    let g_arg = vals
        .iter()
        .enumerate()
        .fold(0usize, |acc, (r, &(_, b))| acc | (usize::from(b) << r));
    let output = out.bit ^ spec.g_table.get(g_arg);
    Ok(finish(
        st,
        Finish {
            output,
            purity: dev.max(out.deviation),
        },
        vals,
    ))
}

/// Budget of [`run_gamma_odd`] for an odd oracle arity `n`.
pub fn gamma_odd_budget(n: usize) -> usize {
    mm_budget(n - 1) + 1
}

/// Truth table of `f(x1..x_{n-1}) xor x_n`.
pub fn odd_extension(tt: &TruthTable) -> Result<TruthTable, crate::boolfn::BoolFnError> {
    let h = tt.len();
    TruthTable::from_fn(tt.n() + 1, |a| tt.get(a & (h - 1)) ^ (a >= h))
}
