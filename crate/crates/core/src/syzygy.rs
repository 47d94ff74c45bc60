//! Signed syzygy words.
//!
//! Every letter is an involution up to homotopy (a stutter `ii` can be pulled
//! off the equator), so reduction is free reduction in `Z/2 * Z/2 * Z/2`: one
//! stack pass for linear words plus trimming of equal ends for periodic ones.
//! Signs alternate, so a word only needs the sign of its first letter.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shape_geometry::Letter;

/// `Plus` marks a crossing from the upper (`phi > 0`) to the lower hemisphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// Sign of the letter `offset` places after one carrying `self`.
    pub fn shifted(self, offset: usize) -> Sign {
        if offset.is_multiple_of(2) {
            self
        } else {
            self.flip()
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// A finite or periodic syzygy word. `phase` is the sign of the first letter;
/// `None` leaves the word unsigned.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedWord {
    pub letters: Vec<Letter>,
    pub phase: Option<Sign>,
    pub periodic: bool,
}

/// Classification flags of a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordClass {
    pub stutter_free: bool,
    pub tied: bool,
    pub collision_forward: bool,
    pub collision_backward: bool,
}

impl SignedWord {
    pub fn unsigned(letters: Vec<Letter>, periodic: bool) -> Self {
        SignedWord { letters, phase: None, periodic }
    }

    /// A signed word; periodic words of odd length cannot alternate.
    pub fn signed(letters: Vec<Letter>, first: Sign, periodic: bool) -> Result<Self> {
        if periodic && letters.len() % 2 == 1 {
            return Err(Error::OddPeriodicLength(letters.len()));
        }
        Ok(SignedWord { letters, phase: Some(first), periodic })
    }

    /// Parses `"1+2-3+"` (signed) or `"1221"` (unsigned). Signs must alternate.
    pub fn parse(s: &str, periodic: bool) -> Result<Self> {
        let mut letters = Vec::new();
        let mut signs = Vec::new();
        for ch in s.chars().filter(|c| !c.is_whitespace()) {
            match ch {
                '1'..='3' => letters.push(Letter::from_digit(ch as u8 - b'0').unwrap()),
                '+' | '-' => {
                    if signs.len() + 1 != letters.len() {
                        return Err(Error::Invalid(format!("misplaced sign in word {s:?}")));
                    }
                    signs.push(if ch == '+' { Sign::Plus } else { Sign::Minus });
                }
                _ => return Err(Error::Invalid(format!("unexpected character {ch:?} in word {s:?}"))),
            }
        }
        if signs.is_empty() {
            return Ok(SignedWord::unsigned(letters, periodic));
        }
        if signs.len() != letters.len() {
            return Err(Error::Invalid(format!("either every letter or none carries a sign in {s:?}")));
        }
        if signs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid(format!("signs must alternate in {s:?}")));
        }
        SignedWord::signed(letters, signs[0], periodic)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Per-letter signs, if the word is signed.
    pub fn signs(&self) -> Option<Vec<Sign>> {
        self.phase.map(|s0| (0..self.len()).map(|i| s0.shifted(i)).collect())
    }

    pub fn letter_set(&self) -> BTreeSet<Letter> {
        self.letters.iter().copied().collect()
    }

    pub fn digits(&self) -> String {
        self.letters.iter().map(|l| char::from(b'0' + l.digit())).collect()
    }

    pub fn is_stutter_free(&self) -> bool {
        let n = self.len();
        let linear = self.letters.windows(2).all(|w| w[0] != w[1]);
        let join = !self.periodic || n == 0 || (n >= 2 && self.letters[0] != self.letters[n - 1]);
        linear && join
    }

    /// Cyclic rotation by `r` places to the left; the phase follows.
    pub fn rotated(&self, r: usize) -> SignedWord {
        let n = self.len();
        if n == 0 {
            return self.clone();
        }
        let r = r % n;
        let mut letters = self.letters[r..].to_vec();
        letters.extend_from_slice(&self.letters[..r]);
        SignedWord { letters, phase: self.phase.map(|s| s.shifted(r)), periodic: self.periodic }
    }

    /// Image under a permutation of the letters.
    pub fn relabeled(&self, perm: impl Fn(Letter) -> Letter) -> SignedWord {
        SignedWord { letters: self.letters.iter().map(|&l| perm(l)).collect(), ..self.clone() }
    }

    /// The word traversed backwards. For signed words every crossing changes
    /// direction, so the signs flip as well.
    pub fn reversed(&self) -> SignedWord {
        let mut letters = self.letters.clone();
        letters.reverse();
        let phase = self.phase.map(|s| s.shifted(self.len().saturating_sub(1)).flip());
        SignedWord { letters, phase, periodic: self.periodic }
    }

    /// Same periodic word up to a cyclic shift (signs included when both are signed).
    pub fn same_cycle(&self, other: &SignedWord) -> bool {
        if self.len() != other.len() {
            return false;
        }
        if self.is_empty() {
            return true;
        }
        (0..self.len()).any(|r| {
            let rot = self.rotated(r);
            rot.letters == other.letters
                && match (rot.phase, other.phase) {
                    (Some(a), Some(b)) => a == b,
                    _ => true,
                }
        })
    }

    /// Doubles a periodic word, so that an odd period can carry signs.
    pub fn doubled(&self) -> SignedWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&self.letters);
        SignedWord { letters, ..self.clone() }
    }
}

impl fmt::Display for SignedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.signs() {
            Some(signs) => {
                for (l, s) in self.letters.iter().zip(signs) {
                    write!(f, "{}{}", l, s.symbol())?;
                }
                Ok(())
            }
            None => write!(f, "{}", self.digits()),
        }
    }
}

impl FromStr for SignedWord {
    type Err = Error;

    /// Parses as a periodic word.
    fn from_str(s: &str) -> Result<Self> {
        SignedWord::parse(s, true)
    }
}

/// Normal form under deletion of adjacent equal letters (cyclically for
/// periodic words). Periodic normal forms are unique up to rotation.
pub fn reduce_stutters(w: &SignedWord) -> SignedWord {
    // Stack of (letter, original index); the index fixes the surviving phase.
    let mut stack: Vec<(Letter, usize)> = Vec::with_capacity(w.len());
    for (i, &l) in w.letters.iter().enumerate() {
        if stack.last().is_some_and(|&(top, _)| top == l) {
            stack.pop();
        } else {
            stack.push((l, i));
        }
    }
    let mut lo = 0;
    let mut hi = stack.len();
    if w.periodic {
        while hi - lo >= 2 && stack[lo].0 == stack[hi - 1].0 {
            lo += 1;
            hi -= 1;
        }
        if hi - lo == 1 {
            lo = hi;
        }
    }
    let kept = &stack[lo..hi];
    let phase = match (w.phase, kept.first()) {
        (Some(s0), Some(&(_, i))) => Some(s0.shifted(i)),
        (p, _) => p,
    };
    SignedWord { letters: kept.iter().map(|&(l, _)| l).collect(), phase, periodic: w.periodic }
}

/// The two alternating sign patterns of a stutter-free word.
pub fn sign_decorations(w: &SignedWord) -> Result<(SignedWord, SignedWord)> {
    if !w.is_stutter_free() {
        return Err(Error::Invalid(format!("word {} has stutters; reduce it first", w.digits())));
    }
    Ok((
        SignedWord::signed(w.letters.clone(), Sign::Plus, w.periodic)?,
        SignedWord::signed(w.letters.clone(), Sign::Minus, w.periodic)?,
    ))
}

/// Untied words reduce to at most two letters, i.e. they wind around a
/// single pants leg (or are trivial).
pub fn is_tied(w: &SignedWord) -> bool {
    reduce_stutters(w).letter_set().len() == 3
}

/// Stutter and tied flags of a finite or periodic word. Collision flags are
/// only meaningful for [`BiInfinite`] words and are false here.
pub fn classify(w: &SignedWord) -> WordClass {
    WordClass { stutter_free: w.is_stutter_free(), tied: is_tied(w), collision_forward: false, collision_backward: false }
}

/// A bi-infinite word `... b b b core f f f ...`. The core occupies indices
/// `1..=core.len()`; index 0 is the last letter of the backward generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiInfinite {
    pub backward: Vec<Letter>,
    pub core: Vec<Letter>,
    pub forward: Vec<Letter>,
}

impl BiInfinite {
    pub fn new(backward: Vec<Letter>, core: Vec<Letter>, forward: Vec<Letter>) -> Result<Self> {
        if backward.is_empty() || forward.is_empty() {
            return Err(Error::Invalid("tail generators must be nonempty".into()));
        }
        Ok(BiInfinite { backward, core, forward })
    }

    /// The periodic word `... g g g ...` centred so that index 1 starts a copy.
    pub fn periodic(g: Vec<Letter>) -> Result<Self> {
        BiInfinite::new(g.clone(), Vec::new(), g)
    }

    pub fn parse(backward: &str, core: &str, forward: &str) -> Result<Self> {
        let p = |s: &str| SignedWord::parse(s, false).map(|w| w.letters);
        BiInfinite::new(p(backward)?, p(core)?, p(forward)?)
    }

    pub fn at(&self, i: i64) -> Letter {
        let nc = self.core.len() as i64;
        if i <= 0 {
            let nb = self.backward.len() as i64;
            let back = (-i).rem_euclid(nb);
            self.backward[(nb - 1 - back) as usize]
        } else if i <= nc {
            self.core[(i - 1) as usize]
        } else {
            let nf = self.forward.len() as i64;
            self.forward[(i - nc - 1).rem_euclid(nf) as usize]
        }
    }

    /// Letters `s_from ..= s_to`.
    pub fn window(&self, from: i64, to: i64) -> Vec<Letter> {
        (from..=to).map(|i| self.at(i)).collect()
    }

    /// A tail is a collision tail when its reduced periodic generator is a
    /// two-letter alternation.
    fn collision_tail(g: &[Letter]) -> bool {
        reduce_stutters(&SignedWord::unsigned(g.to_vec(), true)).letter_set().len() == 2
    }

    pub fn classify(&self) -> WordClass {
        let collision_forward = Self::collision_tail(&self.forward);
        let collision_backward = Self::collision_tail(&self.backward);
        let span = 2 * (self.backward.len() + self.core.len() + self.forward.len()) as i64;
        let sample = SignedWord::unsigned(self.window(-span, span), false);
        let letters_everywhere = sample.letter_set().len() == 3;
        WordClass {
            stutter_free: sample.is_stutter_free(),
            tied: letters_everywhere && !collision_forward && !collision_backward,
            collision_forward,
            collision_backward,
        }
    }
}

/// Periodic word built from the length-`2n` window `s_{-n+1+j} .. s_{n+j}`,
/// using the smallest shift `j >= 0` whose periodic repetition has no stutter
/// at the join.
pub fn periodic_approximants(s: &BiInfinite, n: usize) -> Result<SignedWord> {
    if n == 0 {
        return Err(Error::Invalid("window half-length must be positive".into()));
    }
    let n = n as i64;
    let bound = 2 * n + (s.backward.len() + s.core.len() + s.forward.len()) as i64;
    for j in 0..=bound {
        let letters = s.window(-n + 1 + j, n + j);
        let w = SignedWord::signed(letters, Sign::Plus, true)?;
        if w.is_stutter_free() {
            return Ok(w);
        }
    }
    Err(Error::NoValidShift)
}
