use std::fmt;

use super::GroupError;

/// A basis letter `x_i` or its inverse, stored as `+i` / `-i` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(i32);

impl Letter {
    pub fn new(index: usize, positive: bool) -> Self {
        assert!(index >= 1, "letter indices are 1-based");
        let i = index as i32;
        Letter(if positive { i } else { -i })
    }

    pub fn pos(index: usize) -> Self {
        Letter::new(index, true)
    }

    pub fn neg(index: usize) -> Self {
        Letter::new(index, false)
    }

    pub fn index(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    pub fn raw(self) -> i32 {
        self.0
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "x{}", self.index())
        } else {
            write!(f, "x{}^-1", self.index())
        }
    }
}

/// A freely reduced word in the free group of a fixed rank.
///
/// Reduction is eager: every constructor and every product returns a word with
/// no adjacent `x_i x_i^-1` pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedWord {
    rank: usize,
    letters: Vec<Letter>,
}

impl ReducedWord {
    pub fn identity(rank: usize) -> Self {
        ReducedWord {
            rank,
            letters: Vec::new(),
        }
    }

    /// Basis generator `x_i`.
    pub fn generator(rank: usize, index: usize) -> Result<Self, GroupError> {
        Self::reduce(rank, [Letter::pos(index)])
    }

    /// Freely reduces a raw letter sequence.
    pub fn reduce<I>(rank: usize, letters: I) -> Result<Self, GroupError>
    where
        I: IntoIterator<Item = Letter>,
    {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if l.index() > rank {
                return Err(GroupError::LetterOutOfRange {
                    index: l.index(),
                    rank,
                });
            }
            push_reduced(&mut out, l);
        }
        Ok(ReducedWord { rank, letters: out })
    }

    /// Parses the signed-integer encoding used in tests and files, e.g. `[1, -2, 3]`.
    pub fn from_signed(rank: usize, letters: &[i32]) -> Result<Self, GroupError> {
        let mut raw = Vec::with_capacity(letters.len());
        for &l in letters {
            if l == 0 {
                return Err(GroupError::LetterOutOfRange { index: 0, rank });
            }
            raw.push(Letter::new(l.unsigned_abs() as usize, l > 0));
        }
        Self::reduce(rank, raw)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn to_signed(&self) -> Vec<i32> {
        self.letters.iter().map(|l| l.raw()).collect()
    }

    pub fn concat(&self, other: &ReducedWord) -> ReducedWord {
        debug_assert_eq!(self.rank, other.rank);
        let mut out = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut out, l);
        }
        ReducedWord {
            rank: self.rank,
            letters: out,
        }
    }

    pub fn inverse(&self) -> ReducedWord {
        ReducedWord {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Appends `other`'s letters in place, reducing at the seam.
    pub(crate) fn extend_reduced(&mut self, other: &[Letter]) {
        for &l in other {
            push_reduced(&mut self.letters, l);
        }
    }

    /// Exponent sum of each basis letter (index 0 is `x_1`).
    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut sums = vec![0i64; self.rank];
        for l in &self.letters {
            sums[l.index() - 1] += if l.is_positive() { 1 } else { -1 };
        }
        sums
    }

    /// Number of occurrences of `x_i^{±1}`.
    pub fn occurrences(&self, index: usize) -> usize {
        self.letters.iter().filter(|l| l.index() == index).count()
    }
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last().is_some_and(|&last| last == l.inverse()) {
        out.pop();
    } else {
        out.push(l);
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(rank: usize, letters: &[i32]) -> ReducedWord {
        ReducedWord::from_signed(rank, letters).unwrap()
    }

    #[test]
    fn cancellation_examples() {
        assert_eq!(w(2, &[1, 2, -2]).to_signed(), vec![1]);
        assert!(w(2, &[]).is_empty());
        assert_eq!(w(2, &[-1, 1, 1]).to_signed(), vec![1]);
        assert_eq!(w(3, &[1, 2, 3, -3, -2, -1]).len(), 0);
    }

    #[test]
    fn out_of_range_letter_rejected() {
        assert_eq!(
            ReducedWord::from_signed(2, &[1, 3]),
            Err(GroupError::LetterOutOfRange { index: 3, rank: 2 })
        );
        assert!(ReducedWord::from_signed(2, &[0]).is_err());
    }

    fn raw_letters(rank: usize) -> impl Strategy<Value = Vec<i32>> {
        prop::collection::vec(
            (1..=rank as i32, any::<bool>()).prop_map(|(i, s)| if s { i } else { -i }),
            0..24,
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn reduce_is_idempotent_and_inverse_cancels(raw in raw_letters(4)) {
            let word = w(4, &raw);
            let again = ReducedWord::reduce(4, word.letters().iter().copied()).unwrap();
            prop_assert_eq!(&again, &word);
            for pair in word.letters().windows(2) {
                prop_assert_ne!(pair[0], pair[1].inverse());
            }
            prop_assert!(word.concat(&word.inverse()).is_empty());
            prop_assert!(word.inverse().concat(&word).is_empty());
        }
    }
}
