//! Slater decomposition of Laughlin states.
//!
//! The holomorphic part of the Laughlin state with `N_e` particles at
//! filling `1/m` is `∏_{i<j} (w_j − w_i)^m`. For odd `m` it is
//! antisymmetric, so it is a combination `Σ_λ a_λ det(w_i^{λ_j})` of Slater
//! determinants with strictly increasing levels `λ`. The coefficient `a_λ`
//! equals the coefficient of the ascending monomial `w_1^{λ_1}⋯w_{N_e}^{λ_{N_e}}`
//! in the product, which is computed here by exact sparse multiplication.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of candidate monomials of the expansion.
pub const DEFAULT_MAX_TERMS: u128 = 30_000_000;

/// Exponents are packed into 8-bit lanes of a `u128`.
const LANE_BITS: u32 = 8;
const MAX_PARTICLES: u32 = 128 / LANE_BITS;

/// Strictly increasing occupied levels `λ_1 < λ_2 < … < λ_{N_e}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct SlaterIndex(Vec<u32>);

impl SlaterIndex {
    pub fn new(levels: Vec<u32>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Domain("a Slater index needs at least one level".into()));
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(format!("levels {levels:?} are not strictly increasing")));
        }
        Ok(SlaterIndex(levels))
    }

    pub fn levels(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, level: u32) -> bool {
        self.0.binary_search(&level).is_ok()
    }

    pub fn max_level(&self) -> u32 {
        *self.0.last().expect("non-empty")
    }

    /// `Σ λ_i`
    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&l| u64::from(l)).sum()
    }

    /// `Σ λ_i²`, the exponent of the GCST damping.
    pub fn square_sum(&self) -> u64 {
        self.0.iter().map(|&l| u64::from(l) * u64::from(l)).sum()
    }

    /// `(0, m, 2m, …, m(N_e − 1))`
    pub fn most_uniform(particles: u32, m: u32) -> Self {
        SlaterIndex((0..particles).map(|i| i * m).collect())
    }

    /// `(N_e − 1, N_e, …, 2N_e − 2)`
    pub fn maximally_bunched(particles: u32) -> Self {
        SlaterIndex((0..particles).map(|i| particles - 1 + i).collect())
    }
}

impl TryFrom<Vec<u32>> for SlaterIndex {
    type Error = Error;

    fn try_from(levels: Vec<u32>) -> Result<Self> {
        SlaterIndex::new(levels)
    }
}

impl From<SlaterIndex> for Vec<u32> {
    fn from(idx: SlaterIndex) -> Self {
        idx.0
    }
}

impl fmt::Display for SlaterIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// Exact Slater coefficients of one Laughlin state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaughlinExpansion {
    particles: u32,
    inverse_filling: u32,
    terms: BTreeMap<SlaterIndex, BigInt>,
}

impl LaughlinExpansion {
    /// Builds an expansion from explicit terms, e.g. a single Slater
    /// determinant. Zero coefficients are dropped.
    pub fn from_terms(
        particles: u32,
        inverse_filling: u32,
        terms: impl IntoIterator<Item = (SlaterIndex, BigInt)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (idx, c) in terms {
            if idx.len() != particles as usize {
                return Err(Error::Domain(format!(
                    "Slater index {idx} does not have {particles} levels"
                )));
            }
            if !c.is_zero() {
                map.insert(idx, c);
            }
        }
        if map.is_empty() {
            return Err(Error::Domain("expansion has no terms".into()));
        }
        Ok(LaughlinExpansion {
            particles,
            inverse_filling,
            terms: map,
        })
    }

    /// The integer quantum Hall state filling levels `0..n`.
    pub fn filled(n: u32) -> Result<Self> {
        let idx = SlaterIndex::new((0..n).collect())?;
        Self::from_terms(n, 1, [(idx, BigInt::one())])
    }

    pub fn particles(&self) -> u32 {
        self.particles
    }

    pub fn inverse_filling(&self) -> u32 {
        self.inverse_filling
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic order of `λ`.
    pub fn terms(&self) -> impl Iterator<Item = (&SlaterIndex, &BigInt)> {
        self.terms.iter()
    }

    /// `a_λ`, zero when `λ` does not occur.
    pub fn coefficient(&self, idx: &SlaterIndex) -> BigInt {
        self.terms.get(idx).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Highest occupied level over all terms.
    pub fn max_level(&self) -> u32 {
        self.terms.keys().map(SlaterIndex::max_level).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> ExpansionJson {
        ExpansionJson {
            particles: self.particles,
            inverse_filling: self.inverse_filling,
            terms: self
                .terms
                .iter()
                .map(|(idx, c)| TermJson {
                    lambda: idx.levels().to_vec(),
                    coeff: c.to_string(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &ExpansionJson) -> Result<Self> {
        let terms = json
            .terms
            .iter()
            .map(|t| {
                let c: BigInt = t
                    .coeff
                    .parse()
                    .map_err(|_| Error::Config(format!("bad coefficient `{}`", t.coeff)))?;
                Ok((SlaterIndex::new(t.lambda.clone())?, c))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(json.particles, json.inverse_filling, terms)
    }
}

/// Serialized form; coefficients are decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionJson {
    pub particles: u32,
    pub inverse_filling: u32,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub lambda: Vec<u32>,
    pub coeff: String,
}

/// Number of exponent vectors of length `n` with entries in `0..=cap`
/// summing to `total`; an upper bound on the support of the product.
pub fn estimate_terms(n: u32, cap: u32, total: u32) -> u128 {
    let mut ways = vec![0u128; total as usize + 1];
    ways[0] = 1;
    for _ in 0..n {
        let mut next = vec![0u128; total as usize + 1];
        for (d, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for k in 0..=cap.min(total - d as u32) as usize {
                next[d + k] = next[d + k].saturating_add(w);
            }
        }
        ways = next;
    }
    ways[total as usize]
}

/// `(2k − 1)!!`
pub fn double_factorial_odd(k: u32) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(2 * i - 1))
}

fn binomial_row(m: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 1..=m {
        let prev = row[k as usize - 1].clone();
        row.push(prev * BigInt::from(m - k + 1) / BigInt::from(k));
    }
    row
}

/// Expands `∏_{i<j} (w_j − w_i)^m` into Slater coefficients.
pub fn expand(particles: u32, m: u32) -> Result<LaughlinExpansion> {
    expand_with_limit(particles, m, DEFAULT_MAX_TERMS)
}

pub fn expand_with_limit(particles: u32, m: u32, max_terms: u128) -> Result<LaughlinExpansion> {
    if particles == 0 {
        return Err(Error::Domain("need at least one particle".into()));
    }
    if m == 0 || m.is_multiple_of(2) {
        return Err(Error::Domain(format!("inverse filling must be odd, got {m}")));
    }
    if particles > MAX_PARTICLES {
        return Err(Error::Size(format!("{particles} particles exceed the supported {MAX_PARTICLES}")));
    }
    let cap = m * (particles - 1);
    if cap >= 1 << LANE_BITS {
        return Err(Error::Size(format!("exponent {cap} does not fit the packed representation")));
    }
    let total = m * particles * (particles - 1) / 2;
    let estimate = estimate_terms(particles, cap, total);
    if estimate > max_terms {
        return Err(Error::Size(format!(
            "N_e = {particles}, m = {m} has up to {estimate} monomials, limit is {max_terms}"
        )));
    }

    let binom = binomial_row(m);
    let mut poly: HashMap<u128, BigInt> = HashMap::from([(0u128, BigInt::one())]);
    // (w_j − w_i)^m = Σ_k C(m,k) (−1)^k w_i^k w_j^{m−k}, pairs grouped by j
    for j in 1..particles {
        for i in 0..j {
            let lane_i = 1u128 << (LANE_BITS * i);
            let lane_j = 1u128 << (LANE_BITS * j);
            let factor: Vec<(u128, BigInt)> = (0..=m)
                .map(|k| {
                    let key = u128::from(k) * lane_i + u128::from(m - k) * lane_j;
                    let c = if k % 2 == 1 { -binom[k as usize].clone() } else { binom[k as usize].clone() };
                    (key, c)
                })
                .collect();
            let mut next: HashMap<u128, BigInt> = HashMap::with_capacity(poly.len() * 2);
            for (key, c) in &poly {
                for (fk, fc) in &factor {
                    *next.entry(key + fk).or_default() += c * fc;
                }
            }
            next.retain(|_, c| !c.is_zero());
            if next.len() as u128 > max_terms {
                return Err(Error::Size(format!("intermediate product has {} terms", next.len())));
            }
            poly = next;
        }
    }

    let mask = (1u128 << LANE_BITS) - 1;
    let mut terms = BTreeMap::new();
    for (key, c) in poly {
        let exps: Vec<u32> = (0..particles)
            .map(|i| ((key >> (LANE_BITS * i)) & mask) as u32)
            .collect();
        if exps.windows(2).all(|w| w[0] < w[1]) {
            let idx = SlaterIndex(exps);
            assert_eq!(idx.degree(), u64::from(total), "degree law violated by {idx}");
            terms.insert(idx, c);
        }
    }
    Ok(LaughlinExpansion {
        particles,
        inverse_filling: m,
        terms,
    })
}

/// `|a_λ|` as an unsigned integer.
pub fn magnitude(c: &BigInt) -> BigUint {
    c.abs().to_biguint().expect("absolute value is non-negative")
}
