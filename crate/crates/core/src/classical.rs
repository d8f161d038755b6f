//! Classical side: explicit parity decision trees, the granularity bound on
//! parity decision tree depth, and exhaustive minimax solvers for tiny `n`.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::boolfn::{max_granularity, TruthTable};
use crate::classes::{ClassError, MMBentSpec, PdspSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassicalError {
    #[error("expected {expected} input bits, got {got}")]
    InputLength { expected: usize, got: usize },
    #[error("n = {n} exceeds the limit {max} of this solver")]
    TooLarge { n: usize, max: usize },
    #[error(transparent)]
    Class(#[from] ClassError),
}

/// One run of a parity decision tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParityTreeTrace {
    pub output: bool,
    pub queries: usize,
    /// Queried variable sets (bit `i - 1` for `x_i`) with the answers seen.
    pub parities: Vec<(u32, bool)>,
    /// Cost of the matching tree restricted to parities of at most two bits.
    pub two_bit_cost: Option<usize>,
}

impl ParityTreeTrace {
    /// Re-evaluates every recorded parity against `x`.
    pub fn replays(&self, x: &[bool]) -> bool {
        self.parities.iter().all(|&(s, v)| parity_of(x, s) == v)
    }
}

fn parity_of(x: &[bool], s: u32) -> bool {
    x.iter()
        .enumerate()
        .filter(|(i, _)| s >> i & 1 == 1)
        .fold(false, |acc, (_, &b)| acc ^ b)
}

struct Asker<'a> {
    x: &'a [bool],
    parities: Vec<(u32, bool)>,
}

impl Asker<'_> {
    // An empty set answers 0 without looking at x; it still uses a level of
    // the tree, so it is recorded like any other query.
    fn ask(&mut self, s: u32) -> bool {
        let v = parity_of(self.x, s);
        self.parities.push((s, v));
        v
    }

    fn var(&mut self, i: usize) -> bool {
        self.ask(1 << (i - 1))
    }

    fn finish(self, output: bool, two_bit_cost: Option<usize>) -> ParityTreeTrace {
        ParityTreeTrace {
            output,
            queries: self.parities.len(),
            parities: self.parities,
            two_bit_cost,
        }
    }
}

fn check_len(x: &[bool], n: usize) -> Result<(), ClassicalError> {
    if x.len() != n {
        Err(ClassicalError::InputLength {
            expected: n,
            got: x.len(),
        })
    } else {
        Ok(())
    }
}

/// Reads all but the last variable of every monomial, settles the rest of
/// the sum with one parity, then reads the product variables. Always
/// `n - q + 1` queries.
pub fn pdsp_parity_tree(spec: &PdspSpec, x: &[bool]) -> Result<ParityTreeTrace, ClassicalError> {
    spec.validate()?;
    check_len(x, spec.n)?;
    let spec = spec.canonical();
    let mut asker = Asker {
        x,
        parities: Vec::new(),
    };
    let mut linear = 0u32;
    for m in &spec.monomials {
        let (&last, rest) = m.split_last().expect("monomials are nonempty");
        let mut prod = true;
        for &v in rest {
            prod &= asker.var(v);
        }
        if prod {
            linear |= 1 << (last - 1);
        }
    }
    let f1 = asker.ask(linear);
    let mut f2 = true;
    for &v in &spec.tilde_vars {
        f2 &= asker.var(v);
    }
    Ok(asker.finish(f1 && f2, None))
}

/// `ceil(3n/4)`.
pub fn mm_two_bit_cost(n: usize) -> usize {
    (3 * n).div_ceil(4)
}

/// Reads `x^` one variable at a time, then asks for `phi(x^) . x~` as a
/// single parity. `n/2 + 1` queries.
pub fn mm_generalized_parity_tree(spec: &MMBentSpec, x: &[bool]) -> Result<ParityTreeTrace, ClassicalError> {
    spec.validate()?;
    check_len(x, spec.n)?;
    let h = spec.n / 2;
    let mut asker = Asker {
        x,
        parities: Vec::new(),
    };
    let mut lo = 0usize;
    for i in 1..=h {
        if asker.var(i) {
            lo |= 1 << (i - 1);
        }
    }
    let s = spec.phi[lo] << h;
    let dot = asker.ask(s);
    Ok(asker.finish(dot ^ spec.g_table.get(lo), Some(mm_two_bit_cost(spec.n))))
}

/// `max_granularity + 1`.
pub fn dplus_lower_bound(tt: &TruthTable) -> u32 {
    max_granularity(tt) + 1
}

pub const BRUTE_D_MAX_VARS: usize = 14;
pub const BRUTE_DPLUS_MAX_VARS: usize = 5;

/// Exact decision tree depth by dynamic programming over all `3^n`
/// restrictions (each variable fixed to 0, fixed to 1 or free).
pub fn brute_force_d(tt: &TruthTable) -> Result<u32, ClassicalError> {
    let n = tt.n();
    if n > BRUTE_D_MAX_VARS {
        return Err(ClassicalError::TooLarge {
            n,
            max: BRUTE_D_MAX_VARS,
        });
    }
    let pow3: Vec<usize> = (0..=n).map(|i| 3usize.pow(i as u32)).collect();
    let states = pow3[n];
    // value: 0, 1, or 2 for "not constant"
    let mut value = vec![0u8; states];
    let mut depth = vec![0u8; states];
    let mut digits = vec![0u8; n];
    for code in 0..states {
        let mut c = code;
        let mut first_free = None;
        let mut point = 0usize;
        for (i, d) in digits.iter_mut().enumerate() {
            *d = (c % 3) as u8;
            c /= 3;
            match *d {
                1 => point |= 1 << i,
                2 if first_free.is_none() => first_free = Some(i),
                _ => {}
            }
        }
        let Some(f) = first_free else {
            value[code] = u8::from(tt.get(point));
            continue;
        };
        // fixing a free digit to 0 or 1 lowers the code, so children are done
        let (v0, v1) = (value[code - 2 * pow3[f]], value[code - pow3[f]]);
        value[code] = if v0 == v1 { v0 } else { 2 };
        if value[code] != 2 {
            continue;
        }
        let mut best = u8::MAX;
        for (i, &d) in digits.iter().enumerate() {
            if d == 2 {
                let c0 = code - 2 * pow3[i];
                let c1 = code - pow3[i];
                best = best.min(1 + depth[c0].max(depth[c1]));
            }
        }
        depth[code] = best;
    }
    Ok(depth[states - 1] as u32)
}

/// Exact generalized parity decision tree depth. Each reachable set of
/// inputs is an affine subspace, stored as a bitmask over the `2^n` points.
pub fn brute_force_dplus(tt: &TruthTable) -> Result<u32, ClassicalError> {
    let n = tt.n();
    if n > BRUTE_DPLUS_MAX_VARS {
        return Err(ClassicalError::TooLarge {
            n,
            max: BRUTE_DPLUS_MAX_VARS,
        });
    }
    let points = 1usize << n;
    let ones: u64 = (0..points).filter(|&a| tt.get(a)).fold(0, |m, a| m | 1 << a);
    // halves[s] = points with odd parity on s
    let halves: Vec<u64> = (0..points)
        .map(|s| {
            (0..points)
                .filter(|&a| (a & s).count_ones() & 1 == 1)
                .fold(0u64, |m, a| m | 1 << a)
        })
        .collect();
    let mut memo = HashMap::new();
    let full = if points == 64 { u64::MAX } else { (1u64 << points) - 1 };
    Ok(dplus_rec(full, ones, &halves, &mut memo))
}

fn dplus_rec(set: u64, ones: u64, halves: &[u64], memo: &mut HashMap<u64, u32>) -> u32 {
    let hit = set & ones;
    if hit == 0 || hit == set {
        return 0;
    }
    if let Some(&d) = memo.get(&set) {
        return d;
    }
    let mut best = u32::MAX;
    for &h in &halves[1..] {
        let a1 = set & h;
        let a0 = set & !h;
        if a1 == 0 || a0 == 0 {
            continue;
        }
        let d0 = dplus_rec(a0, ones, halves, memo);
        if 1 + d0 >= best {
            continue;
        }
        let d = 1 + d0.max(dplus_rec(a1, ones, halves, memo));
        best = best.min(d);
    }
    memo.insert(set, best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_detects_tampering() {
        let spec = MMBentSpec::identity(4).unwrap();
        let x = [true, false, true, true];
        let mut t = mm_generalized_parity_tree(&spec, &x).unwrap();
        assert!(t.replays(&x));
        t.parities[0].1 ^= true;
        assert!(!t.replays(&x));
    }

    #[test]
    fn size_limits() {
        let tt = TruthTable::zero(6).unwrap();
        assert!(brute_force_dplus(&tt).is_err());
        assert!(brute_force_d(&TruthTable::zero(15).unwrap()).is_err());
    }

    #[test]
    fn constants_cost_nothing() {
        let tt = TruthTable::zero(3).unwrap();
        assert_eq!(brute_force_d(&tt).unwrap(), 0);
        assert_eq!(brute_force_dplus(&tt.complement()).unwrap(), 0);
    }
}
