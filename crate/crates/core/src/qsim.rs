//! State-vector simulation of the query model: an `(n+1)`-level query
//! register `Q` next to `w` work qubits `w1..ww`.
//!
//! Amplitude layout: index `pattern * (n + 1) + q`, where `q` is the query
//! basis state and bit `j - 1` of `pattern` is the value of `w_j`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

pub type C = Complex64;

/// Default cap on the total state dimension.
pub const DEFAULT_DIM_CAP: usize = 1 << 22;
/// Allowed amplitude mass outside `span{|0>,|1>}` for restricted operations.
pub const SPAN_TOL: f64 = 1e-9;
/// Allowed deviation from a computational basis state at measurement.
pub const PURITY_TOL: f64 = 1e-9;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("state dimension {dim} exceeds the cap {cap}")]
    LayoutTooLarge { dim: usize, cap: usize },
    #[error("qubit w{q} does not exist (layout has {w} work qubits)")]
    BadQubit { q: usize, w: usize },
    #[error("query index {i} is out of range 0..={n}")]
    BadQueryIndex { i: usize, n: usize },
    #[error("indices must differ, got {0} twice")]
    EqualIndices(usize),
    #[error("qubit w{0} is both control and target")]
    ControlOverlap(usize),
    #[error("query register has mass {mass:e} outside span{{|0>,|1>}}")]
    NotInSpan { mass: f64 },
    #[error("qubit w{qubit} is not deterministic: P(1) = {p1}")]
    NotDeterministic { qubit: usize, p1: f64 },
    #[error("expected {expected} input bits, got {got}")]
    InputLength { expected: usize, got: usize },
    #[error("gate was built for a different layout: {0}")]
    LayoutMismatch(String),
    #[error("amplitude vector has length {got}, layout needs {expected}")]
    AmplitudeLength { expected: usize, got: usize },
}

/// Register sizes of a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Layout {
    pub n: usize,
    pub w: usize,
}

impl Layout {
    pub fn new(n: usize, w: usize) -> Result<Self, SimError> {
        Self::with_cap(n, w, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(n: usize, w: usize, cap: usize) -> Result<Self, SimError> {
        let dim = (n + 1)
            .checked_mul(1usize.checked_shl(w as u32).unwrap_or(0))
            .unwrap_or(usize::MAX);
        if dim == 0 || dim > cap {
            return Err(SimError::LayoutTooLarge { dim, cap });
        }
        Ok(Layout { n, w })
    }

    pub fn dim(&self) -> usize {
        (self.n + 1) << self.w
    }

    pub fn patterns(&self) -> usize {
        1 << self.w
    }

    pub fn index(&self, pattern: usize, q: usize) -> usize {
        pattern * (self.n + 1) + q
    }
}

/// A unitary on the query register, stored by the columns it moves.
/// Columns not listed are fixed; unitarity makes the listed set closed.
#[derive(Clone, Debug, PartialEq)]
pub struct QueryOp {
    dim: usize,
    support: Vec<usize>,
    // entries[k] = image of |support[k]> as (row, amplitude)
    entries: Vec<Vec<(usize, C)>>,
}

impl QueryOp {
    pub fn identity(dim: usize) -> Self {
        QueryOp {
            dim,
            support: Vec::new(),
            entries: Vec::new(),
        }
    }

    /// Builds from full columns; `cols[j]` is the image of `|j>`.
    pub fn from_columns(cols: Vec<Vec<(usize, C)>>) -> Self {
        let dim = cols.len();
        let mut support = Vec::new();
        let mut entries = Vec::new();
        for (j, col) in cols.into_iter().enumerate() {
            let col: Vec<(usize, C)> = col.into_iter().filter(|(_, a)| *a != C::new(0.0, 0.0)).collect();
            let fixed = col.len() == 1 && col[0].0 == j && col[0].1 == C::new(1.0, 0.0);
            if !fixed {
                support.push(j);
                entries.push(col);
            }
        }
        QueryOp {
            dim,
            support,
            entries,
        }
    }

    /// Permutation sending `|j>` to `|perm[j]>`.
    pub fn permutation(perm: &[usize]) -> Self {
        Self::from_columns(
            perm.iter()
                .map(|&r| vec![(r, C::new(1.0, 0.0))])
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dense(&self) -> Vec<Vec<C>> {
        let mut m = vec![vec![C::new(0.0, 0.0); self.dim]; self.dim];
        for (j, row) in m.iter_mut().enumerate() {
            row[j] = C::new(1.0, 0.0);
        }
        for &j in &self.support {
            for row in m.iter_mut() {
                row[j] = C::new(0.0, 0.0);
            }
        }
        for (k, &j) in self.support.iter().enumerate() {
            for &(r, a) in &self.entries[k] {
                m[r][j] = a;
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dense();
        let cols = (0..self.dim)
            .map(|j| (0..self.dim).map(|r| (r, d[j][r].conj())).collect())
            .collect();
        Self::from_columns(cols)
    }

    fn apply_block(&self, block: &mut [C], scratch: &mut Vec<C>) {
        if self.support.is_empty() {
            return;
        }
        scratch.clear();
        scratch.extend(self.support.iter().map(|&j| block[j]));
        for &j in &self.support {
            block[j] = C::new(0.0, 0.0);
        }
        for (k, col) in self.entries.iter().enumerate() {
            let a = scratch[k];
            if a == C::new(0.0, 0.0) {
                continue;
            }
            for &(r, u) in col {
                block[r] += u * a;
            }
        }
    }
}

/// The subsystem a NOT acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// `|0> <-> |1>` of the query register.
    Query,
    Qubit(usize),
}

#[derive(Clone, Debug)]
pub enum GateKind {
    Query(Arc<QueryOp>),
    Qubit { q: usize, u: [[C; 2]; 2] },
    Not(Target),
    /// Flips `w_q` iff the query register is `|1>`.
    CnotQueryToQubit(usize),
    SwapQueryQubit(usize),
    SwapQubits(usize, usize),
    /// One query-register operation per work pattern (`None` = identity).
    Patterned(Arc<Vec<Option<Arc<QueryOp>>>>),
}

/// A gate together with the qubit values it is conditioned on.
#[derive(Clone, Debug)]
pub struct Gate {
    name: String,
    kind: GateKind,
    controls: Vec<(usize, bool)>,
}

impl Gate {
    pub fn new(name: impl Into<String>, kind: GateKind) -> Self {
        Gate {
            name: name.into(),
            kind,
            controls: Vec::new(),
        }
    }

    pub fn name(&self) -> String {
        if self.controls.is_empty() {
            return self.name.clone();
        }
        if let [(1, v)] = self.controls.as_slice() {
            return format!("C{} {}", u8::from(*v), self.name);
        }
        let cs: Vec<String> = self
            .controls
            .iter()
            .map(|(q, v)| format!("w{q}={}", u8::from(*v)))
            .collect();
        format!("C[{}] {}", cs.join(","), self.name)
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn controls(&self) -> &[(usize, bool)] {
        &self.controls
    }

    /// Qubits the gate writes to.
    pub fn target_qubits(&self) -> Vec<usize> {
        match &self.kind {
            GateKind::Qubit { q, .. }
            | GateKind::Not(Target::Qubit(q))
            | GateKind::CnotQueryToQubit(q)
            | GateKind::SwapQueryQubit(q) => vec![*q],
            GateKind::SwapQubits(a, b) => vec![*a, *b],
            _ => Vec::new(),
        }
    }

    /// Conditions the gate on `w_q == value`.
    pub fn controlled(mut self, q: usize, value: bool) -> Result<Self, SimError> {
        if q == 0 || self.target_qubits().contains(&q) || self.controls.iter().any(|c| c.0 == q) {
            return Err(SimError::ControlOverlap(q));
        }
        self.controls.push((q, value));
        Ok(self)
    }

    /// Shorthand for control on `w1 = |0>`.
    pub fn c0(self) -> Self {
        self.controlled(1, false).expect("w1 is not a target")
    }

    /// Shorthand for control on `w1 = |1>`.
    pub fn c1(self) -> Self {
        self.controlled(1, true).expect("w1 is not a target")
    }

    fn max_qubit(&self) -> usize {
        let t = self.target_qubits().into_iter().max().unwrap_or(0);
        let c = self.controls.iter().map(|c| c.0).max().unwrap_or(0);
        let p = match &self.kind {
            GateKind::Patterned(ops) => ops.len().trailing_zeros() as usize,
            _ => 0,
        };
        t.max(c).max(p)
    }

    fn query_dim(&self) -> Option<usize> {
        match &self.kind {
            GateKind::Query(op) => Some(op.dim()),
            GateKind::Patterned(ops) => ops.iter().flatten().map(|o| o.dim()).next(),
            _ => None,
        }
    }

    /// Unitarity report on the smallest layout that holds the gate.
    pub fn report(&self, n: usize) -> GateReport {
        let layout = Layout::new(n, self.max_qubit().max(1)).expect("small layout");
        let m = dense_matrix(self, layout).expect("gate fits its own layout");
        GateReport {
            name: self.name(),
            dim: m.len(),
            defect: unitarity_defect(&m),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateReport {
    pub name: String,
    pub dim: usize,
    pub defect: f64,
}

/// `max |(U^dagger U - I)_ij|`.
pub fn unitarity_defect(m: &[Vec<C>]) -> f64 {
    let d = m.len();
    let mut worst = 0f64;
    for i in 0..d {
        for j in 0..d {
            let mut s = C::new(0.0, 0.0);
            for row in m {
                s += row[i].conj() * row[j];
            }
            if i == j {
                s -= 1.0;
            }
            worst = worst.max(s.norm());
        }
    }
    worst
}

/// Full matrix of a gate on `layout`, built column by column.
pub fn dense_matrix(gate: &Gate, layout: Layout) -> Result<Vec<Vec<C>>, SimError> {
    let d = layout.dim();
    let mut m = vec![vec![C::new(0.0, 0.0); d]; d];
    for j in 0..d {
        let mut amps = vec![C::new(0.0, 0.0); d];
        amps[j] = C::new(1.0, 0.0);
        let mut st = QState::from_amplitudes(layout, amps)?;
        st.apply_inner(gate, false)?;
        for (r, row) in m.iter_mut().enumerate() {
            row[j] = st.amps[r];
        }
    }
    Ok(m)
}

fn check_query_index(n: usize, i: usize) -> Result<(), SimError> {
    if i > n {
        Err(SimError::BadQueryIndex { i, n })
    } else {
        Ok(())
    }
}

/// `P^n_i`: swaps `|1>` and `|i>`.
pub fn perm_gate(n: usize, i: usize) -> Result<Gate, SimError> {
    if i == 0 {
        return Err(SimError::BadQueryIndex { i, n });
    }
    check_query_index(n, i)?;
    let mut perm: Vec<usize> = (0..=n).collect();
    perm.swap(1, i);
    Ok(Gate::new(
        format!("P({i})"),
        GateKind::Query(Arc::new(QueryOp::permutation(&perm))),
    ))
}

fn par_op(n: usize, i: usize, j: usize) -> Result<QueryOp, SimError> {
    check_query_index(n, i)?;
    check_query_index(n, j)?;
    if i == j {
        return Err(SimError::EqualIndices(i));
    }
    let h = C::new(FRAC_1_SQRT_2, 0.0);
    let mut cols: Vec<Vec<(usize, C)>> = vec![Vec::new(); n + 1];
    cols[i] = vec![(0, h), (1, h)];
    cols[j] = vec![(0, h), (1, -h)];
    let mut targets = 2..=n;
    for (src, col) in cols.iter_mut().enumerate() {
        if src != i && src != j {
            let t = targets.next().expect("n - 1 targets for n - 1 sources");
            *col = vec![(t, C::new(1.0, 0.0))];
        }
    }
    Ok(QueryOp::from_columns(cols))
}

/// `PAR^n_{i,j}`: `(|i> + (-1)^b |j>)/sqrt2 -> |b>`. The order of `i` and
/// `j` matters only for the sign convention.
pub fn par_gate(n: usize, i: usize, j: usize) -> Result<Gate, SimError> {
    Ok(Gate::new(
        format!("PAR({i},{j})"),
        GateKind::Query(Arc::new(par_op(n, i, j)?)),
    ))
}

/// `S^n_{i,j}`, the adjoint of `PAR^n_{i,j}`: `|b> -> (|i> + (-1)^b |j>)/sqrt2`.
pub fn sup_gate(n: usize, i: usize, j: usize) -> Result<Gate, SimError> {
    Ok(Gate::new(
        format!("S({i},{j})"),
        GateKind::Query(Arc::new(par_op(n, i, j)?.adjoint())),
    ))
}

pub fn query_gate(name: impl Into<String>, op: QueryOp) -> Gate {
    Gate::new(name, GateKind::Query(Arc::new(op)))
}

pub fn qubit_gate(name: impl Into<String>, q: usize, u: [[C; 2]; 2]) -> Gate {
    Gate::new(name, GateKind::Qubit { q, u })
}

pub fn hadamard(q: usize) -> Gate {
    let h = C::new(FRAC_1_SQRT_2, 0.0);
    qubit_gate(format!("H(w{q})"), q, [[h, h], [h, -h]])
}

pub fn x_gate(q: usize) -> Gate {
    Gate::new(format!("X(w{q})"), GateKind::Not(Target::Qubit(q)))
}

/// `|0> <-> |1>` on the query register.
pub fn query_not() -> Gate {
    Gate::new("X(Q)", GateKind::Not(Target::Query))
}

/// CNOT with the query register as control (`|1>` flips `w_q`).
pub fn cnot_query_to_qubit(q: usize) -> Gate {
    Gate::new(format!("CNOT(Q->w{q})"), GateKind::CnotQueryToQubit(q))
}

/// CNOT with `w_q` as control and the query register as target.
pub fn cnot_qubit_to_query(q: usize) -> Gate {
    Gate::new(format!("CNOT(w{q}->Q)"), GateKind::Not(Target::Query))
        .controlled(q, true)
        .expect("query target never overlaps a qubit")
}

pub fn swap_query_qubit(q: usize) -> Gate {
    Gate::new(format!("SWAP(Q,w{q})"), GateKind::SwapQueryQubit(q))
}

pub fn swap_qubits(a: usize, b: usize) -> Result<Gate, SimError> {
    if a == b {
        return Err(SimError::EqualIndices(a));
    }
    Ok(Gate::new(format!("SWAP(w{a},w{b})"), GateKind::SwapQubits(a, b)))
}

/// NOT on `target` conditioned on every `(qubit, value)` in `controls`.
pub fn multi_controlled_not(controls: &[(usize, bool)], target: Target) -> Result<Gate, SimError> {
    let name = match target {
        Target::Query => format!("C^{}-NOT(Q)", controls.len()),
        Target::Qubit(q) => format!("C^{}-NOT(w{q})", controls.len()),
    };
    let mut g = Gate::new(name, GateKind::Not(target));
    for &(q, v) in controls {
        g = g.controlled(q, v)?;
    }
    Ok(g)
}

/// Block-diagonal gate applying `ops[pattern]` to the query register.
pub fn patterned_gate(name: impl Into<String>, ops: Vec<Option<Arc<QueryOp>>>) -> Gate {
    Gate::new(name, GateKind::Patterned(Arc::new(ops)))
}

/// One line of the optional gate trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRow {
    pub step: usize,
    pub op: String,
    pub queries: usize,
}

/// Outcome of measuring one qubit of a state that is expected to be a
/// computational basis state on that qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub bit: bool,
    /// `min(P(0), P(1))`.
    pub deviation: f64,
}

/// Pure state over the query register and the work qubits.
#[derive(Clone, Debug)]
pub struct QState {
    layout: Layout,
    amps: Vec<C>,
    // active[p]: block of pattern p has a nonzero amplitude
    active: Vec<bool>,
    queries: usize,
    steps: usize,
    trace: Option<Vec<TraceRow>>,
    skip_step: Option<usize>,
    scratch: Vec<C>,
}

impl QState {
    /// `|0>_Q |0...0>`.
    pub fn new(layout: Layout) -> Self {
        let mut amps = vec![C::new(0.0, 0.0); layout.dim()];
        amps[0] = C::new(1.0, 0.0);
        let mut active = vec![false; layout.patterns()];
        active[0] = true;
        QState {
            layout,
            amps,
            active,
            queries: 0,
            steps: 0,
            trace: None,
            skip_step: None,
            scratch: Vec::new(),
        }
    }

    pub fn from_amplitudes(layout: Layout, amps: Vec<C>) -> Result<Self, SimError> {
        if amps.len() != layout.dim() {
            return Err(SimError::AmplitudeLength {
                expected: layout.dim(),
                got: amps.len(),
            });
        }
        let mut st = QState::new(layout);
        st.amps = amps;
        for p in 0..layout.patterns() {
            st.refresh(p);
        }
        Ok(st)
    }

    /// Records every operation from now on.
    pub fn enable_trace(&mut self) {
        self.trace.get_or_insert_with(Vec::new);
    }

    pub fn trace(&self) -> Option<&[TraceRow]> {
        self.trace.as_deref()
    }

    pub fn take_trace(&mut self) -> Option<Vec<TraceRow>> {
        self.trace.take()
    }

    /// Fault injection: the operation with this step index is silently
    /// dropped. Used to check that verification notices broken circuits.
    pub fn set_skip_step(&mut self, step: Option<usize>) {
        self.skip_step = step;
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn amplitudes(&self) -> &[C] {
        &self.amps
    }

    pub fn amp(&self, pattern: usize, q: usize) -> C {
        self.amps[self.layout.index(pattern, q)]
    }

    pub fn queries(&self) -> usize {
        self.queries
    }

    /// Gates and oracle calls applied so far.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Mass of the query register outside `span{|0>,|1>}`.
    pub fn mass_outside_01(&self) -> f64 {
        let n1 = self.layout.n + 1;
        self.amps
            .chunks(n1)
            .map(|b| b[2..].iter().map(|a| a.norm_sqr()).sum::<f64>())
            .sum()
    }

    fn refresh(&mut self, p: usize) {
        let n1 = self.layout.n + 1;
        self.active[p] = self.amps[p * n1..(p + 1) * n1]
            .iter()
            .any(|a| *a != C::new(0.0, 0.0));
    }

    fn record(&mut self, op: String) -> bool {
        let step = self.steps;
        self.steps += 1;
        if let Some(t) = self.trace.as_mut() {
            t.push(TraceRow {
                step,
                op,
                queries: self.queries,
            });
        }
        self.skip_step == Some(step)
    }

    /// `O_x`: multiplies `|i>` by `(-1)^{x_i}` for `i >= 1`.
    pub fn apply_oracle(&mut self, x: &[bool]) -> Result<(), SimError> {
        let n = self.layout.n;
        if x.len() != n {
            return Err(SimError::InputLength {
                expected: n,
                got: x.len(),
            });
        }
        self.queries += 1;
        if self.record("O_x".into()) {
            return Ok(());
        }
        let n1 = n + 1;
        for p in 0..self.layout.patterns() {
            if !self.active[p] {
                continue;
            }
            let block = &mut self.amps[p * n1..(p + 1) * n1];
            for (i, &b) in x.iter().enumerate() {
                if b {
                    block[i + 1] = -block[i + 1];
                }
            }
        }
        Ok(())
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<(), SimError> {
        if self.record(gate.name()) {
            return Ok(());
        }
        self.apply_inner(gate, true)
    }

    pub fn apply_all<'a, I: IntoIterator<Item = &'a Gate>>(&mut self, gates: I) -> Result<(), SimError> {
        for g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    fn control_masks(&self, gate: &Gate) -> Result<(usize, usize), SimError> {
        let w = self.layout.w;
        let mut mask = 0;
        let mut val = 0;
        for &(q, v) in &gate.controls {
            if q == 0 || q > w {
                return Err(SimError::BadQubit { q, w });
            }
            mask |= 1 << (q - 1);
            if v {
                val |= 1 << (q - 1);
            }
        }
        Ok((mask, val))
    }

    fn check_qubit(&self, q: usize) -> Result<usize, SimError> {
        if q == 0 || q > self.layout.w {
            Err(SimError::BadQubit { q, w: self.layout.w })
        } else {
            Ok(1 << (q - 1))
        }
    }

    fn check_span(&self, mask: usize, val: usize) -> Result<(), SimError> {
        let n1 = self.layout.n + 1;
        let mut mass = 0.0;
        for p in 0..self.layout.patterns() {
            if self.active[p] && p & mask == val {
                mass += self.amps[p * n1 + 2..(p + 1) * n1]
                    .iter()
                    .map(|a| a.norm_sqr())
                    .sum::<f64>();
            }
        }
        if mass > SPAN_TOL {
            Err(SimError::NotInSpan { mass })
        } else {
            Ok(())
        }
    }

    fn apply_inner(&mut self, gate: &Gate, checked: bool) -> Result<(), SimError> {
        let (mask, val) = self.control_masks(gate)?;
        let n1 = self.layout.n + 1;
        if let Some(d) = gate.query_dim() {
            if d != n1 {
                return Err(SimError::LayoutMismatch(format!(
                    "{} acts on dimension {d}, query register has {n1}",
                    gate.name()
                )));
            }
        }
        let patterns = self.layout.patterns();
        match &gate.kind {
            GateKind::Query(op) => {
                let mut scratch = std::mem::take(&mut self.scratch);
                for p in 0..patterns {
                    if self.active[p] && p & mask == val {
                        op.apply_block(&mut self.amps[p * n1..(p + 1) * n1], &mut scratch);
                    }
                }
                self.scratch = scratch;
            }
            GateKind::Patterned(ops) => {
                if ops.len() != patterns {
                    return Err(SimError::LayoutMismatch(format!(
                        "{} has {} patterns, layout has {patterns}",
                        gate.name(),
                        ops.len()
                    )));
                }
                let mut scratch = std::mem::take(&mut self.scratch);
                for p in 0..patterns {
                    if self.active[p] && p & mask == val {
                        if let Some(op) = &ops[p] {
                            op.apply_block(&mut self.amps[p * n1..(p + 1) * n1], &mut scratch);
                        }
                    }
                }
                self.scratch = scratch;
            }
            GateKind::Not(Target::Query) => {
                if checked {
                    self.check_span(mask, val)?;
                }
                for p in 0..patterns {
                    if self.active[p] && p & mask == val {
                        self.amps.swap(p * n1, p * n1 + 1);
                    }
                }
            }
            GateKind::Not(Target::Qubit(q)) => {
                let bit = self.check_qubit(*q)?;
                self.pairwise(bit, mask, val, |amps, a, b, _n1| {
                    swap_blocks(amps, a, b, n1);
                });
            }
            GateKind::Qubit { q, u } => {
                let bit = self.check_qubit(*q)?;
                let u = *u;
                self.pairwise(bit, mask, val, |amps, a, b, n1| {
                    for r in 0..n1 {
                        let (x0, x1) = (amps[a * n1 + r], amps[b * n1 + r]);
                        amps[a * n1 + r] = u[0][0] * x0 + u[0][1] * x1;
                        amps[b * n1 + r] = u[1][0] * x0 + u[1][1] * x1;
                    }
                });
            }
            GateKind::CnotQueryToQubit(q) => {
                let bit = self.check_qubit(*q)?;
                self.pairwise(bit, mask, val, |amps, a, b, n1| {
                    amps.swap(a * n1 + 1, b * n1 + 1);
                });
            }
            GateKind::SwapQueryQubit(q) => {
                let bit = self.check_qubit(*q)?;
                if checked {
                    self.check_span(mask, val)?;
                }
                // CNOT(Q->q) CNOT(q->Q) CNOT(Q->q)
                self.pairwise(bit, mask, val, |amps, a, b, n1| {
                    amps.swap(a * n1 + 1, b * n1 + 1);
                });
                for p in 0..patterns {
                    if self.active[p] && p & mask == val && p & bit != 0 {
                        self.amps.swap(p * n1, p * n1 + 1);
                    }
                }
                self.pairwise(bit, mask, val, |amps, a, b, n1| {
                    amps.swap(a * n1 + 1, b * n1 + 1);
                });
            }
            GateKind::SwapQubits(qa, qb) => {
                let ba = self.check_qubit(*qa)?;
                let bb = self.check_qubit(*qb)?;
                if ba == bb {
                    return Err(SimError::EqualIndices(*qa));
                }
                for p in 0..patterns {
                    if p & ba != 0 && p & bb == 0 && p & mask == val {
                        let o = p ^ ba ^ bb;
                        if self.active[p] || self.active[o] {
                            swap_blocks(&mut self.amps, p, o, n1);
                            self.active.swap(p, o);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    // Runs `f(amps, p0, p1, n1)` on every pattern pair differing in `bit`
    // that meets the controls and carries amplitude, then refreshes both.
    fn pairwise<F: FnMut(&mut [C], usize, usize, usize)>(&mut self, bit: usize, mask: usize, val: usize, mut f: F) {
        let n1 = self.layout.n + 1;
        for p in 0..self.layout.patterns() {
            if p & bit != 0 || p & mask != val {
                continue;
            }
            let o = p | bit;
            if !(self.active[p] || self.active[o]) {
                continue;
            }
            f(&mut self.amps, p, o, n1);
            self.refresh(p);
            self.refresh(o);
        }
    }

    /// Probability that `w_q` reads 1.
    pub fn prob_one(&self, q: usize) -> Result<f64, SimError> {
        let bit = self.check_qubit(q)?;
        let n1 = self.layout.n + 1;
        Ok((0..self.layout.patterns())
            .filter(|p| p & bit != 0 && self.active[*p])
            .map(|p| {
                self.amps[p * n1..(p + 1) * n1]
                    .iter()
                    .map(|a| a.norm_sqr())
                    .sum::<f64>()
            })
            .sum())
    }

    /// Computational-basis measurement of `w_q`. The state must already be
    /// a basis state on that qubit within [`PURITY_TOL`].
    pub fn measure_qubit(&self, q: usize) -> Result<Measurement, SimError> {
        let p1 = self.prob_one(q)?;
        let deviation = p1.min(1.0 - p1).max(0.0);
        if deviation > PURITY_TOL {
            return Err(SimError::NotDeterministic { qubit: q, p1 });
        }
        Ok(Measurement {
            bit: p1 > 0.5,
            deviation,
        })
    }

    /// Probability that the query register is `|1>`.
    pub fn query_prob_one(&self) -> f64 {
        let n1 = self.layout.n + 1;
        self.amps.iter().skip(1).step_by(n1).map(|a| a.norm_sqr()).sum()
    }

    /// Measures the query register, which must be `|0>` or `|1>`.
    pub fn measure_query(&self) -> Result<Measurement, SimError> {
        let out = self.mass_outside_01();
        if out > SPAN_TOL {
            return Err(SimError::NotInSpan { mass: out });
        }
        let p1 = self.query_prob_one();
        let deviation = p1.min(1.0 - p1).max(0.0);
        if deviation > PURITY_TOL {
            return Err(SimError::NotDeterministic { qubit: 0, p1 });
        }
        Ok(Measurement {
            bit: p1 > 0.5,
            deviation,
        })
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &QState) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<C>()
            .norm_sqr()
    }
}

fn swap_blocks(amps: &mut [C], a: usize, b: usize, n1: usize) {
    for r in 0..n1 {
        amps.swap(a * n1 + r, b * n1 + r);
    }
}
