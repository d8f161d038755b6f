//! Truth tables, algebraic normal form and exact spectral quantities.
//!
//! Input convention: the table index `a` encodes the assignment with `x1` as
//! its least significant bit, so `x_i = (a >> (i - 1)) & 1`.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg};

use thiserror::Error;

/// Largest supported variable count.
pub const MAX_VARS: usize = 24;

/// Above this arity the Walsh spectrum is computed by the fast transform.
pub const EXHAUSTIVE_WALSH_MAX: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoolFnError {
    #[error("variable count {0} is outside 1..={MAX_VARS}")]
    BadArity(usize),
    #[error("variable index {index} is out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("expected {expected} input bits, got {got}")]
    InputLength { expected: usize, got: usize },
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

fn check_arity(n: usize) -> Result<(), BoolFnError> {
    if (1..=MAX_VARS).contains(&n) {
        Ok(())
    } else {
        Err(BoolFnError::BadArity(n))
    }
}

/// A Boolean function stored as its full table of `2^n` output bits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    words: Vec<u64>,
}

impl TruthTable {
    /// The constant-zero function.
    pub fn zero(n: usize) -> Result<Self, BoolFnError> {
        check_arity(n)?;
        let len = 1usize << n;
        Ok(TruthTable {
            n,
            words: vec![0; len.div_ceil(64)],
        })
    }

    pub fn from_fn<F: FnMut(usize) -> bool>(n: usize, mut f: F) -> Result<Self, BoolFnError> {
        let mut tt = Self::zero(n)?;
        for a in 0..tt.len() {
            if f(a) {
                tt.set(a, true);
            }
        }
        Ok(tt)
    }

    /// Builds a table from bits listed by index.
    pub fn from_bits(n: usize, bits: &[bool]) -> Result<Self, BoolFnError> {
        check_arity(n)?;
        if bits.len() != 1 << n {
            return Err(BoolFnError::InputLength {
                expected: 1 << n,
                got: bits.len(),
            });
        }
        Self::from_fn(n, |a| bits[a])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of entries, `2^n`.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, a: usize) -> bool {
        (self.words[a >> 6] >> (a & 63)) & 1 == 1
    }

    pub fn set(&mut self, a: usize, v: bool) {
        let m = 1u64 << (a & 63);
        if v {
            self.words[a >> 6] |= m;
        } else {
            self.words[a >> 6] &= !m;
        }
    }

    /// Evaluates on `x`, where `x[0]` is `x1`.
    pub fn eval(&self, x: &[bool]) -> Result<bool, BoolFnError> {
        if x.len() != self.n {
            return Err(BoolFnError::InputLength {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self.get(input_index(x)))
    }

    /// Number of inputs mapped to 1.
    pub fn weight(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_constant(&self) -> bool {
        let w = self.weight();
        w == 0 || w == self.len() as u64
    }

    pub fn complement(&self) -> Self {
        Self::from_fn(self.n, |a| !self.get(a)).expect("arity already checked")
    }

    pub fn xor(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "arity mismatch");
        Self::from_fn(self.n, |a| self.get(a) ^ other.get(a)).expect("arity already checked")
    }

    pub fn to_anf(&self) -> Anf {
        truth_table_to_anf(self)
    }

    /// Hex rendering, most significant digit first. Digit `j` counted from
    /// the right holds entries `4j..4j+3`, entry `4j` in its lowest bit.
    pub fn to_hex(&self) -> String {
        let digits = (self.len() / 4).max(1);
        let mut s = String::with_capacity(digits);
        for j in (0..digits).rev() {
            let mut d = 0u32;
            for b in 0..4 {
                let a = 4 * j + b;
                if a < self.len() && self.get(a) {
                    d |= 1 << b;
                }
            }
            s.push(char::from_digit(d, 16).unwrap());
        }
        s
    }

    /// Parses the format produced by [`TruthTable::to_hex`]. Missing leading
    /// digits are treated as zero; an optional `0x` prefix is accepted.
    pub fn from_hex(s: &str, n: usize) -> Result<Self, BoolFnError> {
        let mut tt = Self::zero(n)?;
        let t = s.trim();
        let (body, offset) = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
            Some(rest) => (rest, 2),
            None => (t, 0),
        };
        if body.is_empty() {
            return Err(BoolFnError::Parse {
                pos: offset,
                msg: "empty hex string".into(),
            });
        }
        let chars: Vec<char> = body.chars().collect();
        for (j, &c) in chars.iter().rev().enumerate() {
            let pos = offset + chars.len() - 1 - j;
            let d = c.to_digit(16).ok_or_else(|| BoolFnError::Parse {
                pos,
                msg: format!("'{c}' is not a hex digit"),
            })?;
            for b in 0..4 {
                if d >> b & 1 == 1 {
                    let a = 4 * j + b;
                    if a >= tt.len() {
                        return Err(BoolFnError::Parse {
                            pos,
                            msg: format!("bit {a} is beyond the {} entries of an n = {n} table", tt.len()),
                        });
                    }
                    tt.set(a, true);
                }
            }
        }
        Ok(tt)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(|a| self.get(a))
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable(n={}, 0x{})", self.n, self.to_hex())
    }
}

/// Table index of an assignment (`x[0]` is the least significant bit).
pub fn input_index(x: &[bool]) -> usize {
    x.iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | (usize::from(b) << i))
}

/// Inverse of [`input_index`].
pub fn index_to_input(a: usize, n: usize) -> Vec<bool> {
    (0..n).map(|i| a >> i & 1 == 1).collect()
}

/// An F2 polynomial: XOR of monomials, each a bitmask of variables
/// (bit `i - 1` for `x_i`). The empty mask is the constant 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Anf {
    n: usize,
    monomials: BTreeSet<u32>,
}

impl Anf {
    pub fn new<I: IntoIterator<Item = u32>>(n: usize, monomials: I) -> Result<Self, BoolFnError> {
        check_arity(n)?;
        let mut set = BTreeSet::new();
        for m in monomials {
            if n < 32 && m >> n != 0 {
                return Err(BoolFnError::IndexOutOfRange {
                    index: 32 - m.leading_zeros() as usize,
                    n,
                });
            }
            // repeated monomials cancel over F2
            if !set.insert(m) {
                set.remove(&m);
            }
        }
        Ok(Anf { n, monomials: set })
    }

    /// Monomials given as lists of 1-based variable indices.
    pub fn from_index_lists(n: usize, lists: &[Vec<usize>]) -> Result<Self, BoolFnError> {
        let mut masks = Vec::with_capacity(lists.len());
        for l in lists {
            let mut m = 0u32;
            for &i in l {
                if i == 0 || i > n {
                    return Err(BoolFnError::IndexOutOfRange { index: i, n });
                }
                m |= 1 << (i - 1);
            }
            masks.push(m);
        }
        Self::new(n, masks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn monomials(&self) -> &BTreeSet<u32> {
        &self.monomials
    }

    /// Algebraic degree; 0 for constants.
    pub fn degree(&self) -> u32 {
        self.monomials.iter().map(|m| m.count_ones()).max().unwrap_or(0)
    }

    pub fn to_truth_table(&self) -> TruthTable {
        anf_to_truth_table(self)
    }

    /// Parses text such as `"x1*x2 + x3x4 + 1"`. When `n` is `None` the
    /// largest index that appears decides it.
    pub fn parse(text: &str, n: Option<usize>) -> Result<Self, BoolFnError> {
        let masks = parse_anf_terms(text)?;
        let used = masks.iter().fold(0u32, |a, m| a | m);
        let max_index = 32 - used.leading_zeros() as usize;
        let n = match n {
            Some(n) => {
                if max_index > n {
                    return Err(BoolFnError::IndexOutOfRange { index: max_index, n });
                }
                n
            }
            None => max_index.max(1),
        };
        Self::new(n, masks)
    }
}

impl fmt::Display for Anf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return write!(f, "0");
        }
        // by degree, then by lowest variable index
        let mut ms: Vec<u32> = self.monomials.iter().copied().collect();
        ms.sort_by_key(|m| (m.count_ones(), std::cmp::Reverse(m.reverse_bits())));
        let mut first = true;
        for m in ms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m == 0 {
                write!(f, "1")?;
                continue;
            }
            let vars: Vec<String> = (0..32)
                .filter(|i| m >> i & 1 == 1)
                .map(|i| format!("x{}", i + 1))
                .collect();
            write!(f, "{}", vars.join("*"))?;
        }
        Ok(())
    }
}

fn parse_anf_terms(text: &str) -> Result<Vec<u32>, BoolFnError> {
    let chars: Vec<char> = text.chars().collect();
    let err = |pos: usize, msg: &str| BoolFnError::Parse {
        pos,
        msg: msg.to_string(),
    };
    let mut terms = Vec::new();
    let mut pos = 0;
    let skip_ws = |pos: &mut usize| {
        while *pos < chars.len() && chars[*pos].is_whitespace() {
            *pos += 1;
        }
    };
    loop {
        skip_ws(&mut pos);
        if pos >= chars.len() {
            return Err(err(pos, "expected a term"));
        }
        let mut mask = 0u32;
        let mut factors = 0;
        let mut zero = false;
        loop {
            skip_ws(&mut pos);
            match chars.get(pos) {
                Some('x') | Some('X') => {
                    let start = pos;
                    pos += 1;
                    let dstart = pos;
                    while pos < chars.len() && chars[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    if dstart == pos {
                        return Err(err(dstart, "expected a variable index after 'x'"));
                    }
                    let digits: String = chars[dstart..pos].iter().collect();
                    let idx: usize = digits
                        .parse()
                        .map_err(|_| err(dstart, "variable index too large"))?;
                    if idx == 0 {
                        return Err(err(start, "indices are 1-based"));
                    }
                    if idx > MAX_VARS {
                        return Err(err(start, &format!("index {idx} exceeds {MAX_VARS}")));
                    }
                    mask |= 1 << (idx - 1);
                }
                Some('1') => {
                    pos += 1;
                }
                Some('0') => {
                    pos += 1;
                    zero = true;
                }
                Some(c) => return Err(err(pos, &format!("unexpected '{c}'"))),
                None => return Err(err(pos, "expected a factor")),
            }
            factors += 1;
            skip_ws(&mut pos);
            match chars.get(pos) {
                Some('*') => {
                    pos += 1;
                }
                Some('x') | Some('X') => {}
                _ => break,
            }
        }
        debug_assert!(factors > 0);
        if !zero {
            terms.push(mask);
        }
        skip_ws(&mut pos);
        match chars.get(pos) {
            None => break,
            Some('+') => pos += 1,
            Some(c) => return Err(err(pos, &format!("unexpected '{c}'"))),
        }
    }
    Ok(terms)
}

pub fn anf_to_truth_table(anf: &Anf) -> TruthTable {
    let n = anf.n;
    let mut coeffs = vec![false; 1 << n];
    for &m in &anf.monomials {
        coeffs[m as usize] = true;
    }
    mobius_f2(&mut coeffs, n);
    TruthTable::from_bits(n, &coeffs).expect("arity checked at construction")
}

pub fn truth_table_to_anf(tt: &TruthTable) -> Anf {
    let n = tt.n;
    let mut v: Vec<bool> = tt.iter().collect();
    mobius_f2(&mut v, n);
    let monomials = v
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(m, _)| m as u32)
        .collect();
    Anf { n, monomials }
}

// The binary Moebius transform is its own inverse.
fn mobius_f2(v: &mut [bool], n: usize) {
    for i in 0..n {
        let bit = 1 << i;
        for a in 0..v.len() {
            if a & bit != 0 {
                v[a] ^= v[a ^ bit];
            }
        }
    }
}

/// Exact value `num / 2^exp`, kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    num: i128,
    exp: u32,
}

impl DyadicRational {
    pub const ZERO: Self = DyadicRational { num: 0, exp: 0 };

    pub fn new(num: i128, exp: u32) -> Self {
        if num == 0 {
            return Self::ZERO;
        }
        let shift = num.trailing_zeros().min(exp);
        DyadicRational {
            num: num >> shift,
            exp: exp - shift,
        }
    }

    pub fn from_integer(v: i128) -> Self {
        Self::new(v, 0)
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn abs(&self) -> Self {
        DyadicRational {
            num: self.num.abs(),
            exp: self.exp,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / 2f64.powi(self.exp as i32)
    }
}

impl Add for DyadicRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let e = self.exp.max(rhs.exp);
        Self::new(
            (self.num << (e - self.exp)) + (rhs.num << (e - rhs.exp)),
            e,
        )
    }
}

impl Mul for DyadicRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.num * rhs.num, self.exp + rhs.exp)
    }
}

impl Neg for DyadicRational {
    type Output = Self;
    fn neg(self) -> Self {
        DyadicRational {
            num: -self.num,
            exp: self.exp,
        }
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u128 << self.exp)
        }
    }
}

/// Unnormalised sum `sum_x (-1)^(f(x) + s.x)`.
pub fn walsh_sum(tt: &TruthTable, s: u32) -> i64 {
    let mut acc = 0i64;
    for a in 0..tt.len() {
        let odd = tt.get(a) ^ ((a as u32 & s).count_ones() & 1 == 1);
        acc += if odd { -1 } else { 1 };
    }
    acc
}

/// Fourier coefficient of `f` on the character of `s`.
pub fn walsh_coefficient(tt: &TruthTable, s: u32) -> DyadicRational {
    DyadicRational::new(walsh_sum(tt, s) as i128, tt.n as u32)
}

/// All unnormalised Walsh sums by direct summation, `O(4^n)`.
pub fn walsh_spectrum_exhaustive(tt: &TruthTable) -> Vec<i64> {
    (0..tt.len() as u32).map(|s| walsh_sum(tt, s)).collect()
}

/// All unnormalised Walsh sums by the in-place butterfly, `O(n 2^n)`.
pub fn walsh_spectrum_fast(tt: &TruthTable) -> Vec<i64> {
    let mut v: Vec<i64> = tt.iter().map(|b| if b { -1 } else { 1 }).collect();
    let mut h = 1;
    while h < v.len() {
        for i in (0..v.len()).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
    v
}

pub fn walsh_spectrum(tt: &TruthTable) -> Vec<i64> {
    if tt.n <= EXHAUSTIVE_WALSH_MAX {
        walsh_spectrum_exhaustive(tt)
    } else {
        walsh_spectrum_fast(tt)
    }
}

/// Smallest `k` with `q * 2^k` integral. Zero gives 0.
pub fn granularity(q: DyadicRational) -> u32 {
    q.exponent()
}

/// Largest granularity over the whole spectrum.
pub fn max_granularity(tt: &TruthTable) -> u32 {
    let n = tt.n as u32;
    walsh_spectrum(tt)
        .into_iter()
        .map(|w| granularity(DyadicRational::new(w as i128, n)))
        .max()
        .unwrap_or(0)
}

/// Coefficients of the multilinear real polynomial, indexed by monomial mask.
pub fn real_poly_coefficients(tt: &TruthTable) -> Vec<i64> {
    let mut a: Vec<i64> = tt.iter().map(i64::from).collect();
    for i in 0..tt.n {
        let bit = 1 << i;
        for idx in 0..a.len() {
            if idx & bit != 0 {
                a[idx] -= a[idx ^ bit];
            }
        }
    }
    a
}

pub fn real_poly_degree(tt: &TruthTable) -> u32 {
    real_poly_coefficients(tt)
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(m, _)| m.count_ones())
        .max()
        .unwrap_or(0)
}

pub fn weight(tt: &TruthTable) -> u64 {
    tt.weight()
}
