//! The free abelian group on basis symbols `X_k`, `Y_k` (`k` an integer),
//! the homomorphism `g`, and word length with respect to the generating
//! set `R` of single-move changes.
//!
//! `R` consists of `X_0`, `Y_0`, `X_k + Y_k`, `X_k + Y_{k+1}`,
//! `X_k - X_{k+1}`, `Y_k - Y_{k+1}` and their negatives. `g` sends `X_k`
//! to `1 + |k|` and `Y_k` to `-1 - |k|`; since `|g| <= 1` on `R`, the
//! value `|g(v)|` bounds the `R`-length of `v` from below.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use thiserror::Error;

/// Which of the two symbol families a basis element belongs to: `X`
/// indexes positive crossings, `Y` negative ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    X,
    Y,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::X => write!(f, "X"),
            Family::Y => write!(f, "Y"),
        }
    }
}

/// A sparse integer combination of basis symbols over an ordered index
/// type. The diagram invariants use `K = i64`; zero coefficients are
/// never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FormalSum<K: Ord + Clone> {
    coeffs: BTreeMap<(Family, K), i64>,
}

/// Element of the group on `{X_k, Y_k : k in Z}`.
pub type GroupElement = FormalSum<i64>;

impl<K: Ord + Clone> FormalSum<K> {
    pub fn zero() -> Self {
        FormalSum {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn basis(family: Family, index: K) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert((family, index), 1);
        FormalSum { coeffs }
    }

    pub fn x(index: K) -> Self {
        Self::basis(Family::X, index)
    }

    pub fn y(index: K) -> Self {
        Self::basis(Family::Y, index)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, family: Family, index: K, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let key = (family, index);
        let entry = self.coeffs.entry(key.clone()).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.coeffs.remove(&key);
        }
    }

    pub fn coeff(&self, family: Family, index: &K) -> i64 {
        self.coeffs
            .get(&(family, index.clone()))
            .copied()
            .unwrap_or(0)
    }

    /// Iterate terms in canonical `(family, index)` order.
    pub fn terms(&self) -> impl Iterator<Item = (Family, &K, i64)> {
        self.coeffs.iter().map(|((f, k), &c)| (*f, k, c))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    /// Sum of absolute coefficients.
    pub fn l1_norm(&self) -> i64 {
        self.coeffs.values().map(|c| c.abs()).sum()
    }

    pub fn scaled(&self, factor: i64) -> Self {
        if factor == 0 {
            return Self::zero();
        }
        FormalSum {
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, &c)| (k.clone(), c * factor))
                .collect(),
        }
    }
}

impl<K: Ord + Clone> Add for FormalSum<K> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<K: Ord + Clone> AddAssign for FormalSum<K> {
    fn add_assign(&mut self, rhs: Self) {
        for ((f, k), c) in rhs.coeffs {
            self.add_term(f, k, c);
        }
    }
}

impl<K: Ord + Clone> Sub for FormalSum<K> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self -= rhs;
        self
    }
}

impl<K: Ord + Clone> SubAssign for FormalSum<K> {
    fn sub_assign(&mut self, rhs: Self) {
        for ((f, k), c) in rhs.coeffs {
            self.add_term(f, k, -c);
        }
    }
}

impl<K: Ord + Clone> Neg for FormalSum<K> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scaled(-1)
    }
}

impl<K: Ord + Clone + fmt::Display> fmt::Display for FormalSum<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, ((fam, k), &c)) in self.coeffs.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else if c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if mag != 1 {
                write!(f, "{mag}")?;
            }
            write!(f, "{fam}_{k}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("bad group element near `{at}`: {msg}")]
pub struct ElementParseError {
    pub at: String,
    pub msg: String,
}

impl FromStr for GroupElement {
    type Err = ElementParseError;

    /// Parse the canonical text form, e.g. `3X_1 + 2X_-1 - Y_0` or `0`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "0" {
            return Ok(GroupElement::zero());
        }
        let mut out = GroupElement::zero();
        let mut rest = s;
        let mut negative = false;
        if let Some(r) = rest.strip_prefix('-') {
            negative = true;
            rest = r.trim_start();
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r.trim_start();
        }
        loop {
            // coefficient
            let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
            rest = &rest[digits.len()..];
            let mag: i64 = if digits.is_empty() {
                1
            } else {
                digits.parse().map_err(|_| ElementParseError {
                    at: digits.clone(),
                    msg: "coefficient out of range".into(),
                })?
            };
            let family = if let Some(r) = rest.strip_prefix("X_") {
                rest = r;
                Family::X
            } else if let Some(r) = rest.strip_prefix("Y_") {
                rest = r;
                Family::Y
            } else {
                return Err(ElementParseError {
                    at: rest.chars().take(8).collect(),
                    msg: "expected X_<k> or Y_<k>".into(),
                });
            };
            let idx_len = rest
                .char_indices()
                .take_while(|&(i, c)| c.is_ascii_digit() || (i == 0 && c == '-'))
                .count();
            let (idx_str, r) = rest.split_at(idx_len);
            rest = r;
            let index: i64 = idx_str.parse().map_err(|_| ElementParseError {
                at: idx_str.to_string(),
                msg: "bad index".into(),
            })?;
            out.add_term(family, index, if negative { -mag } else { mag });

            rest = rest.trim_start();
            if rest.is_empty() {
                break;
            }
            if let Some(r) = rest.strip_prefix('+') {
                negative = false;
                rest = r.trim_start();
            } else if let Some(r) = rest.strip_prefix('-') {
                negative = true;
                rest = r.trim_start();
            } else {
                return Err(ElementParseError {
                    at: rest.chars().take(8).collect(),
                    msg: "expected + or -".into(),
                });
            }
        }
        Ok(out)
    }
}

/// Linear extension of `g(X_k) = 1 + |k|`, `g(Y_k) = -1 - |k|`.
pub fn g_hom(v: &GroupElement) -> i64 {
    v.terms()
        .map(|(f, k, c)| {
            let weight = 1 + k.abs();
            match f {
                Family::X => c * weight,
                Family::Y => -c * weight,
            }
        })
        .sum()
}

/// The six shapes a single Reidemeister move can add to the invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RForm {
    /// `X_0` (an RI move on a positive kink).
    RiX0,
    /// `Y_0` (an RI move on a negative kink).
    RiY0,
    /// `X_k + Y_k` (an RII move, antiparallel strands).
    RiiXkYk,
    /// `X_k + Y_{k+1}` (an RII move, parallel strands).
    RiiXkYk1,
    /// `X_k - X_{k+1}` (an RIII move among positive contributions).
    RiiiX,
    /// `Y_k - Y_{k+1}` (an RIII move among negative contributions).
    RiiiY,
}

/// A classified element of `R`: a form, its index parameter, and an
/// overall sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RGenerator {
    pub form: RForm,
    pub k: i64,
    /// `+1` for the listed form, `-1` for its negative.
    pub orientation: i64,
}

impl RGenerator {
    pub fn new(form: RForm, k: i64, orientation: i64) -> Self {
        debug_assert!(orientation == 1 || orientation == -1);
        RGenerator {
            form,
            k,
            orientation,
        }
    }

    /// The group element this generator denotes.
    pub fn value(&self) -> GroupElement {
        let base = match self.form {
            RForm::RiX0 => GroupElement::x(0),
            RForm::RiY0 => GroupElement::y(0),
            RForm::RiiXkYk => GroupElement::x(self.k) + GroupElement::y(self.k),
            RForm::RiiXkYk1 => GroupElement::x(self.k) + GroupElement::y(self.k + 1),
            RForm::RiiiX => GroupElement::x(self.k) - GroupElement::x(self.k + 1),
            RForm::RiiiY => GroupElement::y(self.k) - GroupElement::y(self.k + 1),
        };
        base.scaled(self.orientation)
    }

    /// All generators with index parameter in `lo..=hi` (RI forms appear
    /// once per orientation).
    pub fn enumerate(lo: i64, hi: i64) -> Vec<RGenerator> {
        let mut out = Vec::new();
        for orientation in [1i64, -1] {
            out.push(RGenerator::new(RForm::RiX0, 0, orientation));
            out.push(RGenerator::new(RForm::RiY0, 0, orientation));
            for k in lo..=hi {
                for form in [RForm::RiiXkYk, RForm::RiiXkYk1, RForm::RiiiX, RForm::RiiiY] {
                    out.push(RGenerator::new(form, k, orientation));
                }
            }
        }
        out
    }
}

impl fmt::Display for RGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Classify `v` as an element of `R`, identifying the unique matching
/// form and parameters, or report non-membership with `None`.
pub fn is_in_r(v: &GroupElement) -> Option<RGenerator> {
    let terms: Vec<(Family, i64, i64)> = v.terms().map(|(f, k, c)| (f, *k, c)).collect();
    match terms.as_slice() {
        [(Family::X, 0, c)] if c.abs() == 1 => Some(RGenerator::new(RForm::RiX0, 0, *c)),
        [(Family::Y, 0, c)] if c.abs() == 1 => Some(RGenerator::new(RForm::RiY0, 0, *c)),
        [(f1, k1, c1), (f2, k2, c2)] if c1.abs() == 1 && c2.abs() == 1 => {
            match (f1, f2) {
                (Family::X, Family::Y) => {
                    // X_{k1} and Y_{k2} with matching signs
                    if c1 != c2 {
                        return None;
                    }
                    if k1 == k2 {
                        Some(RGenerator::new(RForm::RiiXkYk, *k1, *c1))
                    } else if *k2 == k1 + 1 {
                        Some(RGenerator::new(RForm::RiiXkYk1, *k1, *c1))
                    } else {
                        None
                    }
                }
                (Family::X, Family::X) => {
                    // BTreeMap order guarantees k1 < k2
                    if *k2 == k1 + 1 && *c1 == -c2 {
                        Some(RGenerator::new(RForm::RiiiX, *k1, *c1))
                    } else {
                        None
                    }
                }
                (Family::Y, Family::Y) => {
                    if *k2 == k1 + 1 && *c1 == -c2 {
                        Some(RGenerator::new(RForm::RiiiY, *k1, *c1))
                    } else {
                        None
                    }
                }
                (Family::Y, Family::X) => unreachable!("BTreeMap orders X before Y"),
            }
        }
        _ => None,
    }
}

/// Outcome of the exact word-length search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RLength {
    Exact(usize),
    /// No expression of length `<= max_len` exists.
    ExceedsMax,
}

fn encode(v: &GroupElement) -> Vec<(i8, i16, i64)> {
    v.terms()
        .map(|(f, k, c)| (if f == Family::X { 0 } else { 1 }, *k as i16, c))
        .collect()
}

/// Exact `R`-length of `v` by breadth-first search, or [`RLength::ExceedsMax`]
/// when `v` is not a sum of at most `max_len` generators. The search only
/// visits elements supported in the window
/// `[min index of v - max_len, max index of v + max_len]`, which is safe
/// because every generator shifts indices by at most one. States that
/// cannot reach zero within the remaining budget, by the `|g|` bound or
/// by coefficient mass, are pruned.
pub fn r_length_bfs(v: &GroupElement, max_len: usize) -> RLength {
    if v.is_zero() {
        return RLength::Exact(0);
    }
    let indices: Vec<i64> = v.terms().map(|(_, k, _)| *k).collect();
    let lo = indices.iter().min().unwrap() - max_len as i64;
    let hi = indices.iter().max().unwrap() + max_len as i64;
    // Generators need k and k+1 inside the window.
    let pool: Vec<GroupElement> = RGenerator::enumerate(lo, hi - 1)
        .into_iter()
        .map(|g| g.value())
        .collect();

    let admissible = |u: &GroupElement, remaining: usize| -> bool {
        let slack = remaining as i64;
        g_hom(u).abs() <= slack && u.l1_norm() <= 2 * slack
    };

    if !admissible(v, max_len) {
        return RLength::ExceedsMax;
    }

    let mut visited: HashMap<Vec<(i8, i16, i64)>, usize> = HashMap::new();
    visited.insert(encode(v), 0);
    let mut queue: VecDeque<(GroupElement, usize)> = VecDeque::new();
    queue.push_back((v.clone(), 0));

    while let Some((u, depth)) = queue.pop_front() {
        if depth == max_len {
            continue;
        }
        for g in &pool {
            let w = u.clone() - g.clone();
            if w.is_zero() {
                return RLength::Exact(depth + 1);
            }
            if depth + 1 == max_len {
                continue;
            }
            if !admissible(&w, max_len - depth - 1) {
                continue;
            }
            if w.terms().any(|(_, k, _)| *k < lo || *k > hi) {
                continue;
            }
            let key = encode(&w);
            if visited.contains_key(&key) {
                continue;
            }
            visited.insert(key, depth + 1);
            queue.push_back((w, depth + 1));
        }
    }
    RLength::ExceedsMax
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v_n(n: i64) -> GroupElement {
        let mut v = GroupElement::zero();
        v.add_term(Family::X, n, n);
        v.add_term(Family::X, -n, n);
        v.add_term(Family::X, -1, 2 * n - 1);
        v.add_term(Family::Y, 0, 3 * n);
        v
    }

    #[test]
    fn display_canonical() {
        let mut v = GroupElement::zero();
        v.add_term(Family::X, 1, 3);
        v.add_term(Family::X, -1, 2);
        v.add_term(Family::Y, 0, 3);
        assert_eq!(v.to_string(), "2X_-1 + 3X_1 + 3Y_0");
        assert_eq!(GroupElement::zero().to_string(), "0");
        let w = GroupElement::x(2) - GroupElement::x(3).scaled(2);
        assert_eq!(w.to_string(), "X_2 - 2X_3");
        let neg = -GroupElement::y(-4);
        assert_eq!(neg.to_string(), "-Y_-4");
    }

    #[test]
    fn parse_round_trip() {
        for s in ["0", "X_0", "-Y_-4", "2X_-1 + 3X_1 + 3Y_0", "X_2 - 2X_3"] {
            let v: GroupElement = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        assert!("X_".parse::<GroupElement>().is_err());
        assert!("3Z_1".parse::<GroupElement>().is_err());
        assert!("X_1 ++ Y_0".parse::<GroupElement>().is_err());
    }

    #[test]
    fn g_values() {
        assert_eq!(g_hom(&GroupElement::x(0)), 1);
        assert_eq!(g_hom(&GroupElement::y(3)), -4);
        assert_eq!(g_hom(&GroupElement::zero()), 0);
        for n in 1..=10 {
            assert_eq!(g_hom(&v_n(n)), 2 * n * n + 3 * n - 2);
        }
    }

    #[test]
    fn g_bounded_on_generators() {
        for gen in RGenerator::enumerate(-25, 25) {
            assert!(g_hom(&gen.value()).abs() <= 1, "violated by {gen}");
        }
    }

    #[test]
    fn classify_examples() {
        let v = GroupElement::x(3) + GroupElement::y(4);
        let g = is_in_r(&v).unwrap();
        assert_eq!((g.form, g.k, g.orientation), (RForm::RiiXkYk1, 3, 1));

        let v = -(GroupElement::x(2) - GroupElement::x(3));
        let g = is_in_r(&v).unwrap();
        assert_eq!((g.form, g.k, g.orientation), (RForm::RiiiX, 2, -1));

        assert!(is_in_r(&(GroupElement::x(1) + GroupElement::y(3))).is_none());
        assert!(is_in_r(&GroupElement::zero()).is_none());
        assert!(is_in_r(&GroupElement::x(1)).is_none());
        assert!(is_in_r(&GroupElement::x(0).scaled(2)).is_none());
    }

    #[test]
    fn classify_round_trips_enumeration() {
        for gen in RGenerator::enumerate(-6, 6) {
            let back = is_in_r(&gen.value()).expect("generator must classify");
            assert_eq!(back.value(), gen.value());
        }
    }

    #[test]
    fn r_length_basics() {
        assert_eq!(r_length_bfs(&GroupElement::zero(), 3), RLength::Exact(0));
        assert_eq!(r_length_bfs(&GroupElement::x(0), 5), RLength::Exact(1));
        for gen in RGenerator::enumerate(-3, 3) {
            assert_eq!(r_length_bfs(&gen.value(), 2), RLength::Exact(1));
        }
        let two = GroupElement::x(3) + GroupElement::y(3) - GroupElement::x(-3) - GroupElement::y(-3);
        assert_eq!(r_length_bfs(&two, 4), RLength::Exact(2));
    }

    #[test]
    fn r_length_v1_bracketed() {
        let v1 = v_n(1);
        match r_length_bfs(&v1, 6) {
            RLength::Exact(len) => {
                assert!(len >= g_hom(&v1).unsigned_abs() as usize);
                assert!((3..=5).contains(&len), "length {len} outside [3, 5]");
            }
            RLength::ExceedsMax => panic!("v_1 has length at most 5"),
        }
    }

    #[test]
    fn telescoping_span_is_tight() {
        // psi(X_k) = k, psi(Y_k) = -k satisfies |psi| <= 1 on R, so
        // X_3 - X_{-3} needs at least 6 generators; the telescope
        // X_3 - X_2, ..., X_{-2} - X_{-3} achieves it.
        let psi = |v: &GroupElement| -> i64 {
            v.terms()
                .map(|(f, k, c)| match f {
                    Family::X => c * k,
                    Family::Y => -c * k,
                })
                .sum()
        };
        for gen in RGenerator::enumerate(-10, 10) {
            assert!(psi(&gen.value()).abs() <= 1);
        }
        let v = GroupElement::x(3) - GroupElement::x(-3);
        assert_eq!(psi(&v), 6);
        assert_eq!(r_length_bfs(&v, 6), RLength::Exact(6));
    }

    #[test]
    fn r_length_exceeds_max() {
        // |g| = 12 cannot be covered by 6 generators
        let v = GroupElement::x(3).scaled(3);
        assert_eq!(r_length_bfs(&v, 6), RLength::ExceedsMax);
    }

    #[test]
    fn group_laws() {
        let a = v_n(2);
        let b = GroupElement::x(5) - GroupElement::y(-2).scaled(3);
        let c = GroupElement::y(0).scaled(7);
        assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
        assert_eq!(
            (a.clone() + b.clone()) + c.clone(),
            a.clone() + (b.clone() + c.clone())
        );
        assert_eq!(a.clone() + GroupElement::zero(), a.clone());
        assert!((a.clone() - a.clone()).is_zero());
        assert_eq!(-(-a.clone()), a);
    }
}
