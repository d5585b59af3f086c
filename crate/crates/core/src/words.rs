//! Free group words and automorphisms of `F_n`.
//!
//! A letter is a nonzero `i32`: `+i` is the `i`-th basis element (1-based) and
//! `-i` its inverse. Words are kept freely reduced at all times, so equality of
//! [`Word`]s is equality in the free group.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Signed generator letter: `+i` / `-i` for the `i`-th basis element.
pub type Letter = i32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("generator index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("stored inverse does not invert the automorphism on generator {0}")]
    InvalidInverse(usize),
    #[error("expected {expected} images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error("rank must be positive")]
    ZeroRank,
    #[error("cannot parse word token `{0}`")]
    BadToken(String),
}

/// A basis element of `F_n` with a sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gen {
    pub index: u32,
    pub inverse: bool,
}

impl Gen {
    pub fn new(index: u32, inverse: bool) -> Self {
        assert!(index > 0, "generator indices are 1-based");
        Gen { index, inverse }
    }

    pub fn letter(self) -> Letter {
        if self.inverse {
            -(self.index as i32)
        } else {
            self.index as i32
        }
    }

    pub fn from_letter(l: Letter) -> Self {
        Gen::new(l.unsigned_abs(), l < 0)
    }
}

/// Position of a letter in the alphabet order `a < a⁻¹ < b < b⁻¹ < …`.
pub fn letter_rank(l: Letter) -> u32 {
    2 * (l.unsigned_abs() - 1) + u32::from(l < 0)
}

/// Shortlex comparison of letter sequences under [`letter_rank`].
pub fn shortlex_cmp(a: &[Letter], b: &[Letter]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        a.iter()
            .map(|&l| letter_rank(l))
            .cmp(b.iter().map(|&l| letter_rank(l)))
    })
}

/// A freely reduced word in a free group.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

/// Freely reduce a sequence of letters.
pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        debug_assert!(l != 0, "letter 0 is not a generator");
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    /// `x^k` for a single letter.
    pub fn letter_pow(l: Letter, k: i64) -> Self {
        let l = if k < 0 { -l } else { l };
        Word(vec![l; k.unsigned_abs() as usize])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_index(&self) -> usize {
        self.0.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&l| -l).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        // Cancel across the seam only; both halves are already reduced.
        let common = self
            .0
            .iter()
            .rev()
            .zip(other.0.iter())
            .take_while(|(&x, &y)| x == -y)
            .count();
        let mut out = Vec::with_capacity(self.len() + other.len() - 2 * common);
        out.extend_from_slice(&self.0[..self.len() - common]);
        out.extend_from_slice(&other.0[common..]);
        Word(out)
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Word::identity();
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// `self · other · self⁻¹`
    pub fn conjugate(&self, other: &Word) -> Word {
        self.mul(other).mul(&self.inverse())
    }

    pub fn commutator(&self, other: &Word) -> Word {
        self.mul(other).mul(&self.inverse()).mul(&other.inverse())
    }

    /// Parse whitespace-separated tokens `a`, `b-`, `g12`, `g12-`.
    pub fn parse(s: &str) -> Result<Word, WordError> {
        let letters = s
            .split_whitespace()
            .map(parse_token)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(reduce(letters))
    }
}

/// Parse a single generator token. `a`..`z` map to 1..26, `gN` to `N`; a
/// trailing `-` marks an inverse.
pub fn parse_token(tok: &str) -> Result<Letter, WordError> {
    let bad = || WordError::BadToken(tok.to_string());
    let (name, inverse) = match tok.strip_suffix('-') {
        Some(n) => (n, true),
        None => (tok, false),
    };
    let index = if name.len() == 1 && name.as_bytes()[0].is_ascii_lowercase() {
        i32::from(name.as_bytes()[0] - b'a') + 1
    } else if let Some(num) = name.strip_prefix('g') {
        num.parse::<i32>().ok().filter(|&i| i > 0).ok_or_else(bad)?
    } else {
        return Err(bad());
    };
    Ok(if inverse { -index } else { index })
}

pub fn generator_name(index: u32) -> String {
    if (1..=26).contains(&index) {
        char::from(b'a' + (index - 1) as u8).to_string()
    } else {
        format!("g{index}")
    }
}

pub fn format_letter(l: Letter) -> String {
    let name = generator_name(l.unsigned_abs());
    if l < 0 {
        name + "-"
    } else {
        name
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let toks: Vec<String> = self.0.iter().map(|&l| format_letter(l)).collect();
        f.write_str(&toks.join(" "))
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Word::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Image of `w` under the endomorphism sending generator `i` to `images[i-1]`.
/// Callers guarantee every index of `w` is in range.
fn substitute(images: &[Word], w: &Word) -> Word {
    let mut out: Vec<Letter> = Vec::new();
    for &l in w.letters() {
        let img = &images[l.unsigned_abs() as usize - 1];
        if l > 0 {
            for &x in img.letters() {
                push_reduced(&mut out, x);
            }
        } else {
            for &x in img.letters().iter().rev() {
                push_reduced(&mut out, -x);
            }
        }
    }
    Word(out)
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&-l) {
        out.pop();
    } else {
        out.push(l);
    }
}

/// An automorphism of `F_rank` together with its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AutJson", into = "AutJson")]
pub struct FreeAut {
    rank: usize,
    images: Vec<Word>,
    inverse_images: Vec<Word>,
}

/// On-disk form: `{"rank": 2, "images": ["a", "a b a-"], "inverse_images": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AutJson {
    pub rank: usize,
    pub images: Vec<Word>,
    pub inverse_images: Vec<Word>,
}

impl TryFrom<AutJson> for FreeAut {
    type Error = WordError;
    fn try_from(j: AutJson) -> Result<Self, WordError> {
        FreeAut::new(j.rank, j.images, j.inverse_images)
    }
}

impl From<FreeAut> for AutJson {
    fn from(a: FreeAut) -> Self {
        AutJson {
            rank: a.rank,
            images: a.images,
            inverse_images: a.inverse_images,
        }
    }
}

impl FreeAut {
    /// Build an automorphism, checking indices and that the inverse really is one.
    pub fn new(
        rank: usize,
        images: Vec<Word>,
        inverse_images: Vec<Word>,
    ) -> Result<Self, WordError> {
        if rank == 0 {
            return Err(WordError::ZeroRank);
        }
        for list in [&images, &inverse_images] {
            if list.len() != rank {
                return Err(WordError::ImageCount {
                    expected: rank,
                    got: list.len(),
                });
            }
            if let Some(index) = list.iter().map(Word::max_index).find(|&m| m > rank) {
                return Err(WordError::IndexOutOfRange { index, rank });
            }
        }
        let aut = FreeAut {
            rank,
            images,
            inverse_images,
        };
        aut.verify()?;
        Ok(aut)
    }

    pub fn identity(rank: usize) -> Self {
        let basis: Vec<Word> = (1..=rank as Letter).map(Word::letter).collect();
        FreeAut {
            rank,
            images: basis.clone(),
            inverse_images: basis,
        }
    }

    /// Inner automorphism `x ↦ g x g⁻¹`.
    pub fn conjugation(rank: usize, g: &Word) -> Result<Self, WordError> {
        check_indices(g, rank)?;
        let ginv = g.inverse();
        let images = (1..=rank as Letter)
            .map(|i| g.conjugate(&Word::letter(i)))
            .collect();
        let inverse_images = (1..=rank as Letter)
            .map(|i| ginv.conjugate(&Word::letter(i)))
            .collect();
        Ok(FreeAut {
            rank,
            images,
            inverse_images,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn inverse_images(&self) -> &[Word] {
        &self.inverse_images
    }

    /// Check both compositions are the identity on the basis.
    pub fn verify(&self) -> Result<(), WordError> {
        for i in 1..=self.rank {
            let x = Word::letter(i as Letter);
            let there = substitute(&self.inverse_images, &substitute(&self.images, &x));
            let back = substitute(&self.images, &substitute(&self.inverse_images, &x));
            if there != x || back != x {
                return Err(WordError::InvalidInverse(i));
            }
        }
        Ok(())
    }

    pub fn apply(&self, w: &Word) -> Result<Word, WordError> {
        check_indices(w, self.rank)?;
        Ok(substitute(&self.images, w))
    }

    pub fn apply_inverse(&self, w: &Word) -> Result<Word, WordError> {
        check_indices(w, self.rank)?;
        Ok(substitute(&self.inverse_images, w))
    }

    /// `Φ^k(w)` without materialising the power; `k` may be negative.
    pub fn apply_power(&self, k: i64, w: &Word) -> Result<Word, WordError> {
        check_indices(w, self.rank)?;
        let images = if k >= 0 {
            &self.images
        } else {
            &self.inverse_images
        };
        let mut out = w.clone();
        for _ in 0..k.unsigned_abs() {
            out = substitute(images, &out);
        }
        Ok(out)
    }

    pub(crate) fn image_unchecked(&self, w: &Word) -> Word {
        substitute(&self.images, w)
    }

    pub(crate) fn inverse_image_unchecked(&self, w: &Word) -> Word {
        substitute(&self.inverse_images, w)
    }

    pub fn inverse(&self) -> FreeAut {
        FreeAut {
            rank: self.rank,
            images: self.inverse_images.clone(),
            inverse_images: self.images.clone(),
        }
    }

    /// `self ∘ other`: apply `other` first.
    ///
    /// Panics if the ranks differ.
    pub fn compose(&self, other: &FreeAut) -> FreeAut {
        assert_eq!(self.rank, other.rank, "composing automorphisms of different rank");
        FreeAut {
            rank: self.rank,
            images: other
                .images
                .iter()
                .map(|w| substitute(&self.images, w))
                .collect(),
            inverse_images: self
                .inverse_images
                .iter()
                .map(|w| substitute(&other.inverse_images, w))
                .collect(),
        }
    }

    pub fn power(&self, k: i64) -> FreeAut {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = FreeAut::identity(self.rank);
        for _ in 0..k.unsigned_abs() {
            acc = base.compose(&acc);
        }
        acc
    }

    /// `ad_g ∘ self`, i.e. `x ↦ g Φ(x) g⁻¹`.
    pub fn conjugated_by(&self, g: &Word) -> Result<FreeAut, WordError> {
        Ok(FreeAut::conjugation(self.rank, g)?.compose(self))
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| w.letters() == [i as Letter + 1])
    }

    /// Iterate the automorphism and record `max_x |Φ^k(x)|` for `k = 1..=max_power`.
    pub fn growth_profile(&self, max_power: usize) -> GrowthProfile {
        GrowthProfile::measure(self, max_power)
    }
}

fn check_indices(w: &Word, rank: usize) -> Result<(), WordError> {
    match w.max_index() {
        m if m > rank => Err(WordError::IndexOutOfRange { index: m, rank }),
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrowthClass {
    Bounded,
    Linear,
    PolynomialOrUnknown,
    ExponentialHeuristic,
}

/// Threshold every one of the last three length ratios must exceed to call
/// growth exponential.
pub const EXPONENTIAL_RATIO_MIN: f64 = 1.05;

/// Iterates past this many letters are not computed; the profile is truncated.
pub const GROWTH_LENGTH_CAP: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthProfile {
    /// `lengths[k-1] = max_x |Φ^k(x)|`.
    pub lengths: Vec<usize>,
    pub classification: GrowthClass,
    /// Minimum of the last three ratios `L_k / L_{k-1}`.
    pub witness_ratio: f64,
}

impl GrowthProfile {
    fn measure(aut: &FreeAut, max_power: usize) -> Self {
        let mut current: Vec<Word> = (1..=aut.rank() as Letter).map(Word::letter).collect();
        let mut lengths = Vec::with_capacity(max_power);
        for _ in 0..max_power {
            current = current.iter().map(|w| aut.image_unchecked(w)).collect();
            let longest = current.iter().map(Word::len).max().unwrap_or(0);
            lengths.push(longest);
            if longest > GROWTH_LENGTH_CAP {
                break;
            }
        }
        Self::classify(lengths)
    }

    /// Apply the classification rule to a measured length sequence `L_1..L_K`.
    pub fn classify(lengths: Vec<usize>) -> Self {
        let k = lengths.len();
        let ratios: Vec<f64> = lengths
            .windows(2)
            .map(|w| w[1] as f64 / w[0].max(1) as f64)
            .collect();
        let witness_ratio = ratios
            .iter()
            .rev()
            .take(3)
            .copied()
            .fold(f64::INFINITY, f64::min);
        let witness_ratio = if witness_ratio.is_finite() {
            witness_ratio
        } else {
            1.0
        };

        let classification = if k == 0 {
            GrowthClass::PolynomialOrUnknown
        } else if lengths[k - 1] == lengths[0] {
            GrowthClass::Bounded
        } else if k >= 3 && {
            // second differences L_{j+1} - 2 L_j + L_{j-1} for j >= ceil(K/2)
            let from = k.div_ceil(2).max(2);
            (from..k).all(|j| {
                let (prev, mid, next) = (lengths[j - 2], lengths[j - 1], lengths[j]);
                next + prev == 2 * mid
            })
        } {
            GrowthClass::Linear
        } else if ratios.len() >= 3 && ratios[ratios.len() - 3..].iter().all(|&r| r > EXPONENTIAL_RATIO_MIN) {
            GrowthClass::ExponentialHeuristic
        } else {
            GrowthClass::PolynomialOrUnknown
        };
        GrowthProfile {
            lengths,
            classification,
            witness_ratio,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn aut(images: &[&str], inverses: &[&str]) -> FreeAut {
        FreeAut::new(
            images.len(),
            images.iter().map(|s| w(s)).collect(),
            inverses.iter().map(|s| w(s)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert!(reduce([1, -1]).is_identity());
        assert_eq!(reduce([1, 2, -2, 1]), w("a a"));
        assert_eq!(reduce([1, -2, 2, -2]), w("a b-"));
    }

    #[test]
    fn parse_and_display() {
        let x = w("a b- g30 c-");
        assert_eq!(x.letters(), &[1, -2, 30, -3]);
        assert_eq!(x.to_string(), "a b- g30 c-");
        assert!(Word::parse("A").is_err());
        assert!(Word::parse("g0").is_err());
        assert!(w("").is_identity());
    }

    #[test]
    fn apply_examples() {
        // a ↦ a, b ↦ a^3 b a^-3
        let phi = aut(&["a", "a a a b a- a- a-"], &["a", "a- a- a- b a a a"]);
        let expected = Word::letter_pow(1, 3)
            .mul(&w("b"))
            .mul(&Word::letter_pow(1, -3));
        assert_eq!(phi.apply(&w("b")).unwrap(), expected);
        assert_eq!(FreeAut::identity(2).apply(&w("a b")).unwrap(), w("a b"));

        let fib = aut(&["b", "a b"], &["b a-", "a"]);
        assert_eq!(fib.apply(&w("a b-")).unwrap(), w("a-"));
        assert!(matches!(
            fib.apply(&w("c")),
            Err(WordError::IndexOutOfRange { index: 3, rank: 2 })
        ));
    }

    #[test]
    fn invalid_inverse_rejected() {
        let err = FreeAut::new(2, vec![w("b"), w("a b")], vec![w("b"), w("a")]).unwrap_err();
        assert!(matches!(err, WordError::InvalidInverse(_)));
    }

    #[test]
    fn power_examples() {
        let phi = aut(&["a", "a b a-"], &["a", "a- b a"]);
        let cube = phi.power(3);
        assert_eq!(cube.images()[1], w("a a a b a- a- a-"));
        assert!(phi.power(0).is_identity());

        let fib = aut(&["b", "a b"], &["b a-", "a"]);
        let inv = fib.power(-1);
        assert!(fib.compose(&inv).is_identity());
        assert!(inv.compose(&fib).is_identity());
        assert_eq!(inv.images(), &[w("b a-"), w("a")]);
    }

    #[test]
    fn growth_examples() {
        let phi = aut(&["a", "a b a-"], &["a", "a- b a"]);
        let g = phi.growth_profile(8);
        assert_eq!(g.lengths, (1..=8).map(|k| 2 * k + 1).collect::<Vec<_>>());
        assert_eq!(g.classification, GrowthClass::Linear);

        let id = FreeAut::identity(3).growth_profile(8);
        assert_eq!(id.lengths, vec![1; 8]);
        assert_eq!(id.classification, GrowthClass::Bounded);

        let fib = aut(&["b", "a b"], &["b a-", "a"]).growth_profile(12);
        // Fibonacci numbers F(k+2)
        let mut f = vec![1usize, 1];
        for i in 2..14 {
            f.push(f[i - 1] + f[i - 2]);
        }
        assert_eq!(fib.lengths, f[2..14].to_vec());
        assert_eq!(fib.classification, GrowthClass::ExponentialHeuristic);
        assert!((fib.witness_ratio - 1.618).abs() < 1e-2);
        assert!(fib.witness_ratio >= EXPONENTIAL_RATIO_MIN);
    }

    #[test]
    fn quadratic_growth_is_not_linear() {
        // a ↦ a, b ↦ b a, c ↦ c b : lengths grow quadratically
        let phi = aut(&["a", "b a", "c b"], &["a", "b a-", "c a b-"]);
        let g = phi.growth_profile(12);
        let l = &g.lengths;
        assert_eq!(l[11], 1 + 12 * 13 / 2);
        assert_ne!(g.classification, GrowthClass::Linear);
        assert_ne!(g.classification, GrowthClass::Bounded);
    }

    #[test]
    fn conjugation_and_compose() {
        let g = w("a b-");
        let c = FreeAut::conjugation(2, &g).unwrap();
        assert_eq!(c.apply(&w("a")).unwrap(), w("a b- a b a-"));
        assert!(c.compose(&c.inverse()).is_identity());
    }
}
