//! Function families: perfect direct sums with products (pdsp), the
//! Maiorana-McFarland bent functions and the restricted family handled by
//! the gamma runner.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boolfn::{BoolFnError, TruthTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("pdsp: {0}")]
    Pdsp(String),
    #[error("main family: {0}")]
    Main(String),
    #[error("mm: {0}")]
    Mm(String),
    #[error("gamma constraint {constraint} violated: {detail}")]
    GammaConstraint { constraint: u8, detail: String },
    #[error("gamma: {0}")]
    Gamma(String),
    #[error("n too small: {0}")]
    TooSmall(usize),
    #[error("n = {n} is not supported here: {reason}")]
    Unsupported { n: usize, reason: String },
    #[error(transparent)]
    BoolFn(#[from] BoolFnError),
}

fn parity(v: u64) -> bool {
    v.count_ones() & 1 == 1
}

fn bit(a: usize, i: usize) -> bool {
    a >> (i - 1) & 1 == 1
}

/// `f = (xor of monomials over hat_vars) * (product of tilde_vars)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdspSpec {
    pub n: usize,
    pub hat_vars: Vec<usize>,
    pub monomials: Vec<Vec<usize>>,
    pub tilde_vars: Vec<usize>,
}

impl PdspSpec {
    /// Derives `hat_vars` from the monomials; the result is canonical.
    pub fn new(n: usize, monomials: Vec<Vec<usize>>, tilde_vars: Vec<usize>) -> Result<Self, ClassError> {
        let hat_vars = monomials.iter().flatten().copied().collect();
        let spec = PdspSpec {
            n,
            hat_vars,
            monomials,
            tilde_vars,
        }
        .canonical();
        spec.validate()?;
        Ok(spec)
    }

    /// Sorted variables, monomials ordered by their smallest index.
    pub fn canonical(&self) -> Self {
        let mut monomials: Vec<Vec<usize>> = self
            .monomials
            .iter()
            .map(|m| {
                let mut m = m.clone();
                m.sort_unstable();
                m
            })
            .collect();
        monomials.sort_by_key(|m| m.first().copied().unwrap_or(usize::MAX));
        let mut hat_vars = self.hat_vars.clone();
        hat_vars.sort_unstable();
        let mut tilde_vars = self.tilde_vars.clone();
        tilde_vars.sort_unstable();
        PdspSpec {
            n: self.n,
            hat_vars,
            monomials,
            tilde_vars,
        }
    }

    pub fn l(&self) -> usize {
        self.hat_vars.len()
    }

    pub fn q(&self) -> usize {
        self.monomials.len()
    }

    pub fn validate(&self) -> Result<(), ClassError> {
        let n = self.n;
        let e = |s: String| Err(ClassError::Pdsp(s));
        if n == 0 {
            return e("n must be positive".into());
        }
        let in_range = |v: &usize| (1..=n).contains(v);
        if let Some(v) = self
            .hat_vars
            .iter()
            .chain(&self.tilde_vars)
            .chain(self.monomials.iter().flatten())
            .find(|v| !in_range(v))
        {
            return e(format!("variable {v} is outside 1..={n}"));
        }
        let hat: BTreeSet<usize> = self.hat_vars.iter().copied().collect();
        let tilde: BTreeSet<usize> = self.tilde_vars.iter().copied().collect();
        if hat.len() != self.hat_vars.len() || tilde.len() != self.tilde_vars.len() {
            return e("hat_vars and tilde_vars must not repeat a variable".into());
        }
        if let Some(v) = hat.intersection(&tilde).next() {
            return e(format!("x{v} is in both hat_vars and tilde_vars"));
        }
        if hat.len() + tilde.len() != n {
            return e(format!(
                "hat_vars and tilde_vars must cover all {n} variables, they cover {}",
                hat.len() + tilde.len()
            ));
        }
        let q = self.monomials.len();
        if q == 0 {
            return e("needs at least one monomial (q >= 1)".into());
        }
        let mut seen = BTreeSet::new();
        for m in &self.monomials {
            for &v in m {
                if !seen.insert(v) {
                    return e(format!("x{v} appears in two monomials, not a perfect direct sum"));
                }
            }
        }
        if seen != hat {
            return e("the monomials must partition hat_vars exactly".into());
        }
        if let Some(m) = self.monomials.iter().find(|m| m.len() < q) {
            return e(format!(
                "monomial {m:?} has {} variables, each monomial needs at least q = {q}",
                m.len()
            ));
        }
        Ok(())
    }

    /// Evaluates on a table index without validating.
    pub fn eval_index(&self, a: usize) -> bool {
        let f2 = self.tilde_vars.iter().all(|&v| bit(a, v));
        f2 && self
            .monomials
            .iter()
            .fold(false, |acc, m| acc ^ m.iter().all(|&v| bit(a, v)))
    }
}

pub fn make_pdsp(spec: &PdspSpec) -> Result<TruthTable, ClassError> {
    spec.validate()?;
    Ok(TruthTable::from_fn(spec.n, |a| spec.eval_index(a))?)
}

/// `(x1...x_{n/2} xor g(x')) * x_{n/2+1}...x_{floor(3n/4)}` with `g` the
/// xor of the blocks of `g_partition` over `x' = {floor(3n/4)+1..n}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MainThmSpec {
    pub n: usize,
    pub t: usize,
    pub g_partition: Vec<Vec<usize>>,
}

/// `floor(3n/4)`.
pub fn three_quarters_floor(n: usize) -> usize {
    3 * n / 4
}

impl MainThmSpec {
    pub fn new(n: usize, g_partition: Vec<Vec<usize>>) -> Result<Self, ClassError> {
        let s = MainThmSpec {
            n,
            t: g_partition.len(),
            g_partition,
        }
        .canonical();
        s.validate()?;
        Ok(s)
    }

    pub fn canonical(&self) -> Self {
        let pd = PdspSpec {
            n: self.n,
            hat_vars: Vec::new(),
            monomials: self.g_partition.clone(),
            tilde_vars: Vec::new(),
        }
        .canonical();
        MainThmSpec {
            n: self.n,
            t: self.t,
            g_partition: pd.monomials,
        }
    }

    /// The variables `x'` that `g` is built on.
    pub fn x_prime(&self) -> Vec<usize> {
        (three_quarters_floor(self.n) + 1..=self.n).collect()
    }

    pub fn validate(&self) -> Result<(), ClassError> {
        let n = self.n;
        let e = |s: String| Err(ClassError::Main(s));
        if n < 2 || n % 2 != 0 {
            return e(format!("n = {n} must be even and at least 2"));
        }
        if self.t == 0 {
            return e("t must be at least 1".into());
        }
        if self.g_partition.len() != self.t {
            return e(format!(
                "t = {} but g_partition has {} blocks",
                self.t,
                self.g_partition.len()
            ));
        }
        let xp: BTreeSet<usize> = self.x_prime().into_iter().collect();
        let mut seen = BTreeSet::new();
        for b in &self.g_partition {
            for &v in b {
                if !xp.contains(&v) {
                    return e(format!("x{v} is not one of the variables {xp:?} of g"));
                }
                if !seen.insert(v) {
                    return e(format!("x{v} is in two blocks of g"));
                }
            }
            if b.len() < self.t + 1 {
                return e(format!(
                    "block {b:?} has {} variables, needs at least t + 1 = {}",
                    b.len(),
                    self.t + 1
                ));
            }
        }
        if seen != xp {
            return e(format!("g_partition must cover {xp:?}"));
        }
        Ok(())
    }

    /// The induced pdsp description.
    pub fn pdsp(&self) -> Result<PdspSpec, ClassError> {
        self.validate()?;
        let k = self.n / 2;
        let mut monomials = vec![(1..=k).collect::<Vec<_>>()];
        monomials.extend(self.g_partition.iter().cloned());
        let tilde = (k + 1..=three_quarters_floor(self.n)).collect();
        PdspSpec::new(self.n, monomials, tilde)
    }
}

pub fn make_main_thm_function(spec: &MainThmSpec) -> Result<(TruthTable, PdspSpec), ClassError> {
    let pd = spec.pdsp()?;
    Ok((make_pdsp(&pd)?, pd))
}

fn binomial(a: i64, b: i64) -> BigUint {
    if a < 0 || b < 0 || a < b {
        return BigUint::zero();
    }
    let b = b.min(a - b) as u64;
    let mut r = BigUint::one();
    for i in 0..b {
        r = r * BigUint::from(a as u64 - i) / BigUint::from(i + 1);
    }
    r
}

/// `sum_{t=1}^{floor(sqrt(ceil(n/4) - 1))} C(ceil(n/4) - t^2 - t - 1, t - 1)`.
pub fn count_main_thm_functions(n: usize) -> Result<BigUint, ClassError> {
    if n < 4 {
        return Err(ClassError::TooSmall(n));
    }
    let c = n.div_ceil(4) as i64;
    let mut total = BigUint::zero();
    let mut t = 1i64;
    while t * t <= c - 1 {
        total += binomial(c - t * t - t - 1, t - 1);
        t += 1;
    }
    Ok(total)
}

fn check_bijection(phi: &[u32], bits: usize) -> Result<(), String> {
    if phi.len() != 1 << bits {
        return Err(format!(
            "table has {} entries, expected 2^{bits} = {}",
            phi.len(),
            1usize << bits
        ));
    }
    let mut seen = vec![false; phi.len()];
    for &v in phi {
        let v = v as usize;
        if v >= phi.len() {
            return Err(format!("value {v} is out of range"));
        }
        if seen[v] {
            return Err(format!("value {v} is hit twice, not a bijection"));
        }
        seen[v] = true;
    }
    Ok(())
}

/// `f(x^, x~) = phi(x^) . x~ xor g(x^)` with `x^ = x1..x_{n/2}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MmBentJson", into = "MmBentJson")]
pub struct MMBentSpec {
    pub n: usize,
    pub phi: Vec<u32>,
    pub g_table: TruthTable,
}

#[derive(Serialize, Deserialize)]
struct MmBentJson {
    n: usize,
    phi: Vec<u32>,
    g_table: String,
}

impl TryFrom<MmBentJson> for MMBentSpec {
    type Error = ClassError;
    fn try_from(j: MmBentJson) -> Result<Self, ClassError> {
        if j.n < 2 || j.n % 2 != 0 {
            return Err(ClassError::Mm(format!("n = {} must be even and at least 2", j.n)));
        }
        Ok(MMBentSpec {
            n: j.n,
            phi: j.phi,
            g_table: TruthTable::from_hex(&j.g_table, j.n / 2)?,
        })
    }
}

impl From<MMBentSpec> for MmBentJson {
    fn from(s: MMBentSpec) -> Self {
        MmBentJson {
            n: s.n,
            phi: s.phi,
            g_table: s.g_table.to_hex(),
        }
    }
}

impl MMBentSpec {
    pub fn identity(n: usize) -> Result<Self, ClassError> {
        if n < 2 || n % 2 != 0 {
            return Err(ClassError::Mm(format!("n = {n} must be even and at least 2")));
        }
        let h = n / 2;
        Ok(MMBentSpec {
            n,
            phi: (0..1u32 << h).collect(),
            g_table: TruthTable::zero(h)?,
        })
    }

    pub fn validate(&self) -> Result<(), ClassError> {
        if self.n < 2 || self.n % 2 != 0 {
            return Err(ClassError::Mm(format!("n = {} must be even and at least 2", self.n)));
        }
        let h = self.n / 2;
        check_bijection(&self.phi, h).map_err(|s| ClassError::Mm(format!("phi: {s}")))?;
        if self.g_table.n() != h {
            return Err(ClassError::Mm(format!(
                "g_table has {} variables, expected {h}",
                self.g_table.n()
            )));
        }
        Ok(())
    }

    pub fn eval_index(&self, a: usize) -> bool {
        let h = self.n / 2;
        let lo = a & ((1 << h) - 1);
        parity(self.phi[lo] as u64 & (a >> h) as u64) ^ self.g_table.get(lo)
    }
}

pub fn make_mm_bent(spec: &MMBentSpec) -> Result<TruthTable, ClassError> {
    spec.validate()?;
    Ok(TruthTable::from_fn(spec.n, |a| spec.eval_index(a))?)
}

/// `xor_{i=1}^{n/2} x_i x_{n/2+i}`.
pub fn make_f_id(n: usize) -> Result<TruthTable, ClassError> {
    make_mm_bent(&MMBentSpec::identity(n)?)
}

/// `phi1(y^) . y~ xor phi2(z^) . z~ xor g(x')`.
///
/// Index lists are 1-based. Bit `r - 1` of a permutation argument is the
/// value of the `r`-th listed variable, and bit `t - 1` of its image is
/// paired with the `t`-th variable of the matching tilde list. Variable
/// `j` of `g_table` is `x_prime[j - 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GammaJson", into = "GammaJson")]
pub struct GammaSpec {
    pub n: usize,
    pub y_hat: Vec<usize>,
    pub z_hat: Vec<usize>,
    pub y_tilde: Vec<usize>,
    pub z_tilde: Vec<usize>,
    pub phi1: Vec<u32>,
    pub phi2: Vec<u32>,
    pub x_prime: Vec<usize>,
    pub g_table: TruthTable,
}

#[derive(Serialize, Deserialize)]
struct GammaJson {
    n: usize,
    y_hat: Vec<usize>,
    z_hat: Vec<usize>,
    y_tilde: Vec<usize>,
    z_tilde: Vec<usize>,
    phi1: Vec<u32>,
    phi2: Vec<u32>,
    x_prime: Vec<usize>,
    g_table: String,
}

impl TryFrom<GammaJson> for GammaSpec {
    type Error = ClassError;
    fn try_from(j: GammaJson) -> Result<Self, ClassError> {
        if j.x_prime.is_empty() {
            return Err(ClassError::Gamma("x_prime must list at least one variable".into()));
        }
        Ok(GammaSpec {
            g_table: TruthTable::from_hex(&j.g_table, j.x_prime.len())?,
            n: j.n,
            y_hat: j.y_hat,
            z_hat: j.z_hat,
            y_tilde: j.y_tilde,
            z_tilde: j.z_tilde,
            phi1: j.phi1,
            phi2: j.phi2,
            x_prime: j.x_prime,
        })
    }
}

impl From<GammaSpec> for GammaJson {
    fn from(s: GammaSpec) -> Self {
        GammaJson {
            n: s.n,
            g_table: s.g_table.to_hex(),
            y_hat: s.y_hat,
            z_hat: s.z_hat,
            y_tilde: s.y_tilde,
            z_tilde: s.z_tilde,
            phi1: s.phi1,
            phi2: s.phi2,
            x_prime: s.x_prime,
        }
    }
}

/// `(floor(n/4), ceil(n/4))`.
pub fn quarter_sizes(n: usize) -> (usize, usize) {
    (n / 4, n.div_ceil(4))
}

/// `ceil(n/8)`, the bound on `|x' & y^|` and `|x' & z^|`.
pub fn eighth_ceil(n: usize) -> usize {
    n.div_ceil(8)
}

fn gamma_err(constraint: u8, detail: String) -> ClassError {
    ClassError::GammaConstraint { constraint, detail }
}

impl GammaSpec {
    /// `y^ = 1..a`, `z^` the rest of the first half, and the same split on
    /// the second half.
    pub fn canonical_split(
        n: usize,
        phi1: Vec<u32>,
        phi2: Vec<u32>,
        x_prime: Vec<usize>,
        g_table: TruthTable,
    ) -> Self {
        let (a, _) = quarter_sizes(n);
        let h = n / 2;
        GammaSpec {
            n,
            y_hat: (1..=a).collect(),
            z_hat: (a + 1..=h).collect(),
            y_tilde: (h + 1..=h + a).collect(),
            z_tilde: (h + a + 1..=n).collect(),
            phi1,
            phi2,
            x_prime,
            g_table,
        }
    }

    /// Identity permutations, canonical split, `g = 0` on the first `z^`
    /// variable.
    pub fn identity(n: usize) -> Result<Self, ClassError> {
        let (a, b) = quarter_sizes(n);
        let s = Self::canonical_split(
            n,
            (0..1u32 << a).collect(),
            (0..1u32 << b).collect(),
            vec![a + 1],
            TruthTable::zero(1)?,
        );
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ClassError> {
        let n = self.n;
        if n < 4 || n % 2 != 0 {
            return Err(ClassError::Gamma(format!("n = {n} must be even and at least 4")));
        }
        let (a, b) = quarter_sizes(n);
        check_bijection(&self.phi1, self.y_hat.len()).map_err(|s| gamma_err(1, format!("phi1: {s}")))?;
        check_bijection(&self.phi2, self.z_hat.len()).map_err(|s| gamma_err(1, format!("phi2: {s}")))?;
        if self.y_tilde.len() != self.y_hat.len() || self.z_tilde.len() != self.z_hat.len() {
            return Err(gamma_err(1, "each permutation needs as many tilde as hat variables".into()));
        }
        let mut all = BTreeSet::new();
        for (name, set) in [
            ("y_hat", &self.y_hat),
            ("z_hat", &self.z_hat),
            ("y_tilde", &self.y_tilde),
            ("z_tilde", &self.z_tilde),
        ] {
            for &v in set.iter() {
                if !(1..=n).contains(&v) {
                    return Err(gamma_err(2, format!("{name} holds x{v}, outside 1..={n}")));
                }
                if !all.insert(v) {
                    return Err(gamma_err(2, format!("x{v} appears twice among the four sets")));
                }
            }
        }
        if self.y_hat.len() != a || self.z_hat.len() != b {
            return Err(gamma_err(
                2,
                format!(
                    "|y_hat| = {}, |z_hat| = {}, expected {a} and {b}",
                    self.y_hat.len(),
                    self.z_hat.len()
                ),
            ));
        }
        let h = n / 2;
        let hat: BTreeSet<usize> = self.y_hat.iter().chain(&self.z_hat).copied().collect();
        let tilde: BTreeSet<usize> = self.y_tilde.iter().chain(&self.z_tilde).copied().collect();
        if hat != (1..=h).collect() {
            return Err(gamma_err(3, format!("y_hat and z_hat must make up x1..x{h}")));
        }
        if tilde != (h + 1..=n).collect() {
            return Err(gamma_err(3, format!("y_tilde and z_tilde must make up x{}..x{n}", h + 1)));
        }
        let xp: BTreeSet<usize> = self.x_prime.iter().copied().collect();
        if xp.len() != self.x_prime.len() {
            return Err(gamma_err(4, "x_prime repeats a variable".into()));
        }
        if let Some(v) = xp.iter().find(|v| !hat.contains(v)) {
            return Err(gamma_err(4, format!("x{v} in x_prime is not in x1..x{h}")));
        }
        let bound = eighth_ceil(n);
        let in_y = self.x_prime.iter().filter(|v| self.y_hat.contains(v)).count();
        let in_z = self.x_prime.iter().filter(|v| self.z_hat.contains(v)).count();
        if in_y > bound || in_z > bound {
            return Err(gamma_err(
                4,
                format!("|x' & y_hat| = {in_y}, |x' & z_hat| = {in_z}, both must be <= {bound}"),
            ));
        }
        if self.x_prime.is_empty() {
            return Err(ClassError::Gamma("x_prime must list at least one variable".into()));
        }
        if self.g_table.n() != self.x_prime.len() {
            return Err(ClassError::Gamma(format!(
                "g_table has {} variables, x_prime has {}",
                self.g_table.n(),
                self.x_prime.len()
            )));
        }
        Ok(())
    }

    fn gather(a: usize, vars: &[usize]) -> usize {
        vars.iter()
            .enumerate()
            .fold(0, |acc, (r, &v)| acc | (usize::from(bit(a, v)) << r))
    }

    pub fn eval_index(&self, a: usize) -> bool {
        let y = Self::gather(a, &self.y_hat);
        let z = Self::gather(a, &self.z_hat);
        let yt = Self::gather(a, &self.y_tilde);
        let zt = Self::gather(a, &self.z_tilde);
        let g = self.g_table.get(Self::gather(a, &self.x_prime));
        parity(self.phi1[y] as u64 & yt as u64) ^ parity(self.phi2[z] as u64 & zt as u64) ^ g
    }

    /// The same function written as `phi(x^) . x~ xor g'(x^)`.
    pub fn to_mm(&self) -> Result<MMBentSpec, ClassError> {
        self.validate()?;
        let h = self.n / 2;
        let mut phi = vec![0u32; 1 << h];
        let mut g = TruthTable::zero(h)?;
        for (lo, slot) in phi.iter_mut().enumerate() {
            let y = Self::gather(lo, &self.y_hat);
            let z = Self::gather(lo, &self.z_hat);
            let mut img = 0u32;
            for (t, &v) in self.y_tilde.iter().enumerate() {
                if self.phi1[y] >> t & 1 == 1 {
                    img |= 1 << (v - h - 1);
                }
            }
            for (t, &v) in self.z_tilde.iter().enumerate() {
                if self.phi2[z] >> t & 1 == 1 {
                    img |= 1 << (v - h - 1);
                }
            }
            *slot = img;
            g.set(lo, self.g_table.get(Self::gather(lo, &self.x_prime)));
        }
        Ok(MMBentSpec {
            n: self.n,
            phi,
            g_table: g,
        })
    }
}

/// Builds the table and the equivalent MM description.
pub fn make_gamma(spec: &GammaSpec) -> Result<(TruthTable, MMBentSpec), ClassError> {
    spec.validate()?;
    let tt = TruthTable::from_fn(spec.n, |a| spec.eval_index(a))?;
    Ok((tt, spec.to_mm()?))
}

/// How many `x'` variables from `y^` and from `z^` the gamma runner can
/// carry to the end at this `n`.
pub fn gamma_capacity(n: usize) -> (usize, usize) {
    let bound = eighth_ceil(n);
    if n % 4 == 0 {
        (bound, bound)
    } else {
        let m = n / 4;
        let j = m.saturating_sub(1).div_ceil(2);
        (j.min(bound), (j + 2).min(bound))
    }
}

fn random_perm<R: Rng>(bits: usize, rng: &mut R) -> Vec<u32> {
    let mut p: Vec<u32> = (0..1u32 << bits).collect();
    p.shuffle(rng);
    p
}

/// A random instance the gamma runner accepts: random four-way split,
/// random permutations, `x'` within [`gamma_capacity`], random `g`.
pub fn random_gamma_spec<R: Rng>(n: usize, rng: &mut R) -> Result<GammaSpec, ClassError> {
    if n < 4 || n % 2 != 0 {
        return Err(ClassError::Gamma(format!("n = {n} must be even and at least 4")));
    }
    let (a, _) = quarter_sizes(n);
    let h = n / 2;
    let mut hat: Vec<usize> = (1..=h).collect();
    hat.shuffle(rng);
    let mut tilde: Vec<usize> = (h + 1..=n).collect();
    tilde.shuffle(rng);
    let (y_hat, z_hat) = (hat[..a].to_vec(), hat[a..].to_vec());
    let (y_tilde, z_tilde) = (tilde[..a].to_vec(), tilde[a..].to_vec());
    let (cy, cz) = gamma_capacity(n);
    let ny = rng.gen_range(0..=cy.min(y_hat.len()));
    let nz = rng.gen_range(usize::from(ny == 0)..=cz.min(z_hat.len()));
    let mut x_prime: Vec<usize> = y_hat
        .choose_multiple(rng, ny)
        .chain(z_hat.choose_multiple(rng, nz))
        .copied()
        .collect();
    x_prime.sort_unstable();
    let k = x_prime.len();
    let g_table = TruthTable::from_fn(k, |_| rng.gen())?;
    let spec = GammaSpec {
        n,
        phi1: random_perm(y_hat.len(), rng),
        phi2: random_perm(z_hat.len(), rng),
        y_hat,
        z_hat,
        y_tilde,
        z_tilde,
        x_prime,
        g_table,
    };
    spec.validate()?;
    Ok(spec)
}

/// A random valid pdsp instance on `n` variables.
pub fn random_pdsp_spec<R: Rng>(n: usize, rng: &mut R) -> Result<PdspSpec, ClassError> {
    if n == 0 {
        return Err(ClassError::TooSmall(n));
    }
    // q blocks of at least q variables each
    let mut qmax = 1;
    while (qmax + 1) * (qmax + 1) <= n {
        qmax += 1;
    }
    let q = rng.gen_range(1..=qmax);
    let l = rng.gen_range(q * q..=n);
    let mut vars: Vec<usize> = (1..=n).collect();
    vars.shuffle(rng);
    let (hat, tilde) = vars.split_at(l);
    let mut sizes = vec![q; q];
    for _ in 0..l - q * q {
        let i = rng.gen_range(0..q);
        sizes[i] += 1;
    }
    let mut monomials = Vec::with_capacity(q);
    let mut at = 0;
    for s in sizes {
        monomials.push(hat[at..at + s].to_vec());
        at += s;
    }
    PdspSpec::new(n, monomials, tilde.to_vec())
}

/// `(raw, floor(raw / (n! 2^(n+1))))` where
/// `raw = (2^floor(n/4))! (2^ceil(n/4))! 2^(2^(n/2))`.
pub fn count_gamma_raw(n: usize) -> Result<(BigUint, BigUint), ClassError> {
    if n < 4 {
        return Err(ClassError::TooSmall(n));
    }
    if n % 2 != 0 || n > 40 {
        return Err(ClassError::Unsupported {
            n,
            reason: "needs an even n <= 40".into(),
        });
    }
    let fact = |m: u64| (1..=m).fold(BigUint::one(), |acc, i| acc * BigUint::from(i));
    let (a, b) = quarter_sizes(n);
    let raw = fact(1 << a) * fact(1 << b) * (BigUint::one() << (1usize << (n / 2)));
    let orbit = fact(n as u64) * (BigUint::one() << (n + 1));
    let quotient = &raw / orbit;
    Ok((raw, quotient))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Largest `n` accepted by [`pnp_equivalent`].
pub const PNP_MAX_VARS: usize = 5;

/// Whether `g(x) = f(perm(x xor c)) xor b` for some permutation of the
/// variables, negation mask `c` and output bit `b`.
pub fn pnp_equivalent(f: &TruthTable, g: &TruthTable) -> Result<bool, ClassError> {
    let n = f.n();
    if g.n() != n {
        return Err(ClassError::Unsupported {
            n: g.n(),
            reason: format!("arity differs from {n}"),
        });
    }
    if n > PNP_MAX_VARS {
        return Err(ClassError::Unsupported {
            n,
            reason: format!("brute force is limited to n <= {PNP_MAX_VARS}"),
        });
    }
    if f.weight() != g.weight() && f.weight() != g.len() as u64 - g.weight() {
        return Ok(false);
    }
    for perm in permutations(n) {
        for c in 0..1usize << n {
            let mut same = true;
            let mut comp = true;
            for a in 0..1usize << n {
                let y = a ^ c;
                let mut b = 0;
                for (i, &p) in perm.iter().enumerate() {
                    b |= (y >> i & 1) << p;
                }
                let v = f.get(b);
                same &= v == g.get(a);
                comp &= v != g.get(a);
                if !same && !comp {
                    break;
                }
            }
            if same || comp {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
