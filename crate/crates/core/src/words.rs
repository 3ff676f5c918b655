//! Ranked alphabets, positive words, and reduced group words.
//!
//! Symbols are interned as `u32` ids so that the hot comparison loops in the
//! solution oracle work on plain integers; display names live in a side table
//! on [`Alphabet`]. The empty word is representable (reductions pass through
//! it) but every semigroup-level API rejects it.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Interned symbol identifier. Indexes into the owning [`Alphabet`].
pub type SymbolId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Coefficient,
    Variable,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("symbol name {0:?} declared twice")]
    DuplicateName(String),
    #[error("symbol name {0:?} is empty")]
    EmptyName(String),
    #[error("coefficient names must be lowercase, variable names uppercase: {0:?}")]
    BadCase(String),
}

/// A ranked alphabet: ordered coefficient letters `a_1..a_k` (the free
/// semigroup basis) and ordered variable letters `x_1..x_n`, with disjoint
/// name sets.
///
/// Display convention: lowercase names are coefficients, uppercase names are
/// variables, and a trailing `'` marks a formal inverse (`aB'a`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    kinds: Vec<SymbolKind>,
    index: HashMap<String, SymbolId>,
    coefficients: Vec<SymbolId>,
    variables: Vec<SymbolId>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(coefficients: &[S], variables: &[S]) -> Result<Self, AlphabetError> {
        let mut alpha = Alphabet {
            names: Vec::new(),
            kinds: Vec::new(),
            index: HashMap::new(),
            coefficients: Vec::new(),
            variables: Vec::new(),
        };
        for c in coefficients {
            alpha.intern(c.as_ref(), SymbolKind::Coefficient)?;
        }
        for v in variables {
            alpha.intern(v.as_ref(), SymbolKind::Variable)?;
        }
        Ok(alpha)
    }

    fn intern(&mut self, name: &str, kind: SymbolKind) -> Result<SymbolId, AlphabetError> {
        if name.is_empty() {
            return Err(AlphabetError::EmptyName(name.to_string()));
        }
        let first_upper = name.chars().next().unwrap().is_uppercase();
        match kind {
            SymbolKind::Coefficient if first_upper => {
                return Err(AlphabetError::BadCase(name.to_string()))
            }
            SymbolKind::Variable if !first_upper => {
                return Err(AlphabetError::BadCase(name.to_string()))
            }
            _ => {}
        }
        if self.index.contains_key(name) {
            return Err(AlphabetError::DuplicateName(name.to_string()));
        }
        let id = self.names.len() as SymbolId;
        self.names.push(name.to_string());
        self.kinds.push(kind);
        self.index.insert(name.to_string(), id);
        match kind {
            SymbolKind::Coefficient => self.coefficients.push(id),
            SymbolKind::Variable => self.variables.push(id),
        }
        Ok(id)
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.names[id as usize]
    }

    pub fn kind(&self, id: SymbolId) -> SymbolKind {
        self.kinds[id as usize]
    }

    pub fn is_coefficient(&self, id: SymbolId) -> bool {
        self.kind(id) == SymbolKind::Coefficient
    }

    pub fn is_variable(&self, id: SymbolId) -> bool {
        self.kind(id) == SymbolKind::Variable
    }

    pub fn coefficients(&self) -> &[SymbolId] {
        &self.coefficients
    }

    pub fn variables(&self) -> &[SymbolId] {
        &self.variables
    }

    /// Rank k of the target free semigroup.
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// A finite word over alphabet symbols, with no formal inverses.
///
/// Length 0 is allowed only as an intermediate value; semigroup-level APIs
/// (equations, substitution images, label assignments) reject it.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PositiveWord {
    letters: Vec<SymbolId>,
}

impl PositiveWord {
    pub fn new(letters: Vec<SymbolId>) -> Self {
        PositiveWord { letters }
    }

    pub fn empty() -> Self {
        PositiveWord {
            letters: Vec::new(),
        }
    }

    pub fn single(id: SymbolId) -> Self {
        PositiveWord { letters: vec![id] }
    }

    pub fn letters(&self) -> &[SymbolId] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn push(&mut self, id: SymbolId) {
        self.letters.push(id);
    }

    pub fn extend_from(&mut self, other: &PositiveWord) {
        self.letters.extend_from_slice(&other.letters);
    }

    /// `self^n` by repetition.
    pub fn pow(&self, n: usize) -> PositiveWord {
        let mut out = Vec::with_capacity(self.len() * n);
        for _ in 0..n {
            out.extend_from_slice(&self.letters);
        }
        PositiveWord::new(out)
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> DisplayWord<'a> {
        DisplayWord {
            word: &self.letters,
            signs: None,
            alphabet,
        }
    }

    /// Lift into a (trivially reduced) group word.
    pub fn to_group(&self) -> GroupWord {
        GroupWord {
            letters: self
                .letters
                .iter()
                .map(|&s| SignedSymbol {
                    id: s,
                    inverse: false,
                })
                .collect(),
        }
    }
}

/// One letter of a group word: a symbol together with an exponent sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedSymbol {
    pub id: SymbolId,
    pub inverse: bool,
}

impl SignedSymbol {
    pub fn positive(id: SymbolId) -> Self {
        SignedSymbol { id, inverse: false }
    }

    pub fn negative(id: SymbolId) -> Self {
        SignedSymbol { id, inverse: true }
    }

    pub fn inverted(self) -> Self {
        SignedSymbol {
            id: self.id,
            inverse: !self.inverse,
        }
    }
}

/// A freely reduced word over signed symbols: no adjacent `s s⁻¹` or `s⁻¹ s`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupWord {
    letters: Vec<SignedSymbol>,
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord {
            letters: Vec::new(),
        }
    }

    pub fn letters(&self) -> &[SignedSymbol] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord {
            letters: self.letters.iter().rev().map(|s| s.inverted()).collect(),
        }
    }

    /// True iff every exponent is +1 and the word is nonempty (the positive
    /// cone has no identity element).
    pub fn is_positive(&self) -> bool {
        !self.letters.is_empty() && self.letters.iter().all(|s| !s.inverse)
    }

    /// Forget signs; panics if the word is not positive or empty.
    pub fn to_positive(&self) -> PositiveWord {
        assert!(
            self.letters.iter().all(|s| !s.inverse),
            "word has inverse letters"
        );
        PositiveWord::new(self.letters.iter().map(|s| s.id).collect())
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> DisplayWord<'a> {
        DisplayWord {
            word: &[],
            signs: Some(&self.letters),
            alphabet,
        }
    }
}

/// Free reduction of a raw signed sequence. Idempotent.
pub fn reduce(raw: &[SignedSymbol]) -> GroupWord {
    let mut stack: Vec<SignedSymbol> = Vec::with_capacity(raw.len());
    for &s in raw {
        match stack.last() {
            Some(&top) if top.id == s.id && top.inverse != s.inverse => {
                stack.pop();
            }
            _ => stack.push(s),
        }
    }
    GroupWord { letters: stack }
}

/// Reduced product of two group words.
pub fn group_concat(u: &GroupWord, v: &GroupWord) -> GroupWord {
    let mut raw = Vec::with_capacity(u.len() + v.len());
    raw.extend_from_slice(&u.letters);
    raw.extend_from_slice(&v.letters);
    reduce(&raw)
}

/// Concatenation of positive words.
pub fn concat(u: &PositiveWord, v: &PositiveWord) -> PositiveWord {
    let mut out = Vec::with_capacity(u.len() + v.len());
    out.extend_from_slice(u.letters());
    out.extend_from_slice(v.letters());
    PositiveWord::new(out)
}

/// The primitive root of a nonempty positive word: the unique primitive `r`
/// with `w = r^e`. Uses the KMP failure function to find the smallest period.
pub fn primitive_root(w: &PositiveWord) -> (PositiveWord, usize) {
    let n = w.len();
    assert!(n >= 1, "primitive_root requires a nonempty word");
    let letters = w.letters();
    // failure[i] = length of the longest proper border of letters[..=i]
    let mut failure = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && letters[i] != letters[k] {
            k = failure[k - 1];
        }
        if letters[i] == letters[k] {
            k += 1;
        }
        failure[i] = k;
    }
    let period = n - failure[n - 1];
    if n.is_multiple_of(period) {
        (PositiveWord::new(letters[..period].to_vec()), n / period)
    } else {
        (w.clone(), 1)
    }
}

pub struct DisplayWord<'a> {
    word: &'a [SymbolId],
    signs: Option<&'a [SignedSymbol]>,
    alphabet: &'a Alphabet,
}

impl fmt::Display for DisplayWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.signs {
            None => {
                if self.word.is_empty() {
                    return write!(f, "ε");
                }
                for &id in self.word {
                    write!(f, "{}", self.alphabet.name(id))?;
                }
            }
            Some(signed) => {
                if signed.is_empty() {
                    return write!(f, "ε");
                }
                for s in signed {
                    write!(f, "{}", self.alphabet.name(s.id))?;
                    if s.inverse {
                        write!(f, "'")?;
                    }
                }
            }
        }
        Ok(())
    }
}
