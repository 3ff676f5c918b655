//! Equation systems, the associated pair presentations, and substitutions.
//!
//! A system Σ over coefficients `a_1..a_k` and unknowns `x_1..x_n` determines
//! a finitely presented semigroup and, reading the same presentation in the
//! category of groups, an ambient group. Substitutions assign nonempty
//! coefficient words to the unknowns; a substitution solving every equation
//! is exactly a semigroup homomorphism to `FS_k` fixing the coefficients, and
//! it extends uniquely to a group homomorphism of the associated group.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::words::{
    concat, group_concat, reduce, Alphabet, GroupWord, PositiveWord, SignedSymbol, SymbolId,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SystemError {
    #[error("equation {index}: {side} side is empty")]
    EmptySide { index: usize, side: &'static str },
    #[error("equation {index}: symbol id {id} not in alphabet")]
    UnknownSymbol { index: usize, id: SymbolId },
    #[error("alphabet must have at least one coefficient")]
    NoCoefficients,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ApplyError {
    #[error("variable {0:?} has no image under the substitution")]
    UnboundVariable(String),
    #[error("group relation {0} does not map to the identity")]
    RelationViolated(usize),
}

/// One equation `lhs = rhs`, kept both raw and with the common prefix of the
/// two sides stripped (the Levi search needs the stripped form, error
/// reporting the raw one).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub lhs: PositiveWord,
    pub rhs: PositiveWord,
    stripped: (PositiveWord, PositiveWord),
}

impl Equation {
    fn new(lhs: PositiveWord, rhs: PositiveWord) -> Self {
        let mut i = 0;
        let max = lhs.len().min(rhs.len());
        while i < max && lhs.letters()[i] == rhs.letters()[i] {
            i += 1;
        }
        let stripped = (
            PositiveWord::new(lhs.letters()[i..].to_vec()),
            PositiveWord::new(rhs.letters()[i..].to_vec()),
        );
        Equation { lhs, rhs, stripped }
    }

    /// Both sides with their common prefix removed.
    pub fn stripped(&self) -> (&PositiveWord, &PositiveWord) {
        (&self.stripped.0, &self.stripped.1)
    }
}

/// A finite system of word equations over a fixed alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSystem {
    alphabet: Alphabet,
    equations: Vec<Equation>,
}

impl EquationSystem {
    pub fn new(
        alphabet: Alphabet,
        equations: Vec<(PositiveWord, PositiveWord)>,
    ) -> Result<Self, SystemError> {
        if alphabet.rank() == 0 {
            return Err(SystemError::NoCoefficients);
        }
        let mut eqs = Vec::with_capacity(equations.len());
        for (index, (lhs, rhs)) in equations.into_iter().enumerate() {
            if lhs.is_empty() {
                return Err(SystemError::EmptySide {
                    index,
                    side: "left",
                });
            }
            if rhs.is_empty() {
                return Err(SystemError::EmptySide {
                    index,
                    side: "right",
                });
            }
            for &id in lhs.letters().iter().chain(rhs.letters()) {
                if id as usize >= alphabet.len() {
                    return Err(SystemError::UnknownSymbol { index, id });
                }
            }
            let eq = Equation::new(lhs, rhs);
            if !eqs.contains(&eq) {
                eqs.push(eq);
            }
        }
        Ok(EquationSystem {
            alphabet,
            equations: eqs,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    /// Variables that actually occur in the equations, in alphabet order.
    pub fn used_variables(&self) -> Vec<SymbolId> {
        self.alphabet
            .variables()
            .iter()
            .copied()
            .filter(|&v| {
                self.equations
                    .iter()
                    .any(|eq| eq.lhs.letters().contains(&v) || eq.rhs.letters().contains(&v))
            })
            .collect()
    }

    /// The presentation data shared by the associated semigroup and group.
    pub fn pair_presentation(&self) -> PairPresentation {
        PairPresentation {
            generators: (0..self.alphabet.len() as SymbolId).collect(),
            relations: self
                .equations
                .iter()
                .map(|eq| (eq.lhs.clone(), eq.rhs.clone()))
                .collect(),
        }
    }
}

/// Generators and relations of the associated semigroup; the identical data
/// read as a group presentation presents the associated group. Only the
/// ambient category differs, so the data is stored once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairPresentation {
    pub generators: Vec<SymbolId>,
    pub relations: Vec<(PositiveWord, PositiveWord)>,
}

impl PairPresentation {
    /// Relations in group form: `u · v⁻¹` for each semigroup relation `u = v`.
    pub fn group_relators(&self) -> Vec<GroupWord> {
        self.relations
            .iter()
            .map(|(u, v)| group_concat(&u.to_group(), &v.to_group().inverse()))
            .collect()
    }
}

/// An assignment of nonempty coefficient words to variables. Coefficients
/// are always fixed (restricted pairs); treating a coefficient as an extra
/// variable is the caller's reduction for the unrestricted case.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution {
    map: BTreeMap<SymbolId, PositiveWord>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution {
            map: BTreeMap::new(),
        }
    }

    /// Binds `var` to a nonempty positive image. Panics on an empty image;
    /// the semigroup has no identity.
    pub fn bind(&mut self, var: SymbolId, image: PositiveWord) {
        assert!(!image.is_empty(), "substitution image must be nonempty");
        self.map.insert(var, image);
    }

    pub fn image(&self, var: SymbolId) -> Option<&PositiveWord> {
        self.map.get(&var)
    }

    pub fn bindings(&self) -> impl Iterator<Item = (SymbolId, &PositiveWord)> {
        self.map.iter().map(|(&v, w)| (v, w))
    }

    pub fn domain_len(&self) -> usize {
        self.map.len()
    }
}

/// Applies a substitution to a positive word: coefficients stay fixed,
/// variables are replaced by their images.
pub fn apply_positive(
    s: &Substitution,
    alphabet: &Alphabet,
    w: &PositiveWord,
) -> Result<PositiveWord, ApplyError> {
    let mut out = PositiveWord::empty();
    for &id in w.letters() {
        if alphabet.is_coefficient(id) {
            out.push(id);
        } else {
            match s.image(id) {
                Some(img) => out.extend_from(img),
                None => return Err(ApplyError::UnboundVariable(alphabet.name(id).to_string())),
            }
        }
    }
    Ok(out)
}

/// Applies a substitution to a group word and reduces the result. On positive
/// input with positive images the output equals [`apply_positive`].
pub fn apply(
    s: &Substitution,
    alphabet: &Alphabet,
    w: &GroupWord,
) -> Result<GroupWord, ApplyError> {
    let mut raw: Vec<SignedSymbol> = Vec::new();
    for &letter in w.letters() {
        if alphabet.is_coefficient(letter.id) {
            raw.push(letter);
        } else {
            let img = s
                .image(letter.id)
                .ok_or_else(|| ApplyError::UnboundVariable(alphabet.name(letter.id).to_string()))?;
            if letter.inverse {
                raw.extend(
                    img.letters()
                        .iter()
                        .rev()
                        .map(|&c| SignedSymbol::negative(c)),
                );
            } else {
                raw.extend(img.letters().iter().map(|&c| SignedSymbol::positive(c)));
            }
        }
    }
    Ok(reduce(&raw))
}

/// True iff the substitution satisfies every equation letter-for-letter.
pub fn is_solution(s: &Substitution, sys: &EquationSystem) -> Result<bool, ApplyError> {
    for eq in sys.equations() {
        let lhs = apply_positive(s, sys.alphabet(), &eq.lhs)?;
        let rhs = apply_positive(s, sys.alphabet(), &eq.rhs)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Images of all generators under the unique group extension of a solution,
/// with each relation checked to map to the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHomReport {
    pub generator_images: Vec<(SymbolId, GroupWord)>,
    pub relations_checked: usize,
}

/// Verifies that a solution extends to a homomorphism of the associated
/// groups: every group relator must reduce to the identity.
pub fn extend_to_group(
    s: &Substitution,
    alphabet: &Alphabet,
    p: &PairPresentation,
) -> Result<GroupHomReport, ApplyError> {
    for (index, relator) in p.group_relators().iter().enumerate() {
        let image = apply(s, alphabet, relator)?;
        if !image.is_empty() {
            return Err(ApplyError::RelationViolated(index));
        }
    }
    let generator_images = p
        .generators
        .iter()
        .map(|&g| {
            let gw = PositiveWord::single(g).to_group();
            apply(s, alphabet, &gw).map(|img| (g, img))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GroupHomReport {
        generator_images,
        relations_checked: p.relations.len(),
    })
}

/// True iff the image of every listed group word lands in the positive cone.
pub fn positive_cone_check(
    s: &Substitution,
    alphabet: &Alphabet,
    elements: &[GroupWord],
) -> Result<bool, ApplyError> {
    for e in elements {
        if !apply(s, alphabet, e)?.is_positive() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Concatenation re-export used by downstream modules building images.
pub fn word_product(u: &PositiveWord, v: &PositiveWord) -> PositiveWord {
    concat(u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_equations;
    use proptest::prelude::*;

    fn sys(text: &str) -> EquationSystem {
        parse_equations(text).unwrap()
    }

    fn subst(sys: &EquationSystem, pairs: &[(&str, &str)]) -> Substitution {
        let mut s = Substitution::new();
        for (v, w) in pairs {
            let var = sys.alphabet().lookup(v).unwrap();
            let word = PositiveWord::new(
                w.chars()
                    .map(|c| sys.alphabet().lookup(&c.to_string()).unwrap())
                    .collect(),
            );
            s.bind(var, word);
        }
        s
    }

    #[test]
    fn apply_examples() {
        let sy = sys("alphabet: a b\nXa = aX");
        let s = subst(&sy, &[("X", "ab")]);
        let x = sy.alphabet().lookup("X").unwrap();
        let a = sy.alphabet().lookup("a").unwrap();
        let w = PositiveWord::new(vec![x, a]);
        let img = apply_positive(&s, sy.alphabet(), &w).unwrap();
        assert_eq!(img.display(sy.alphabet()).to_string(), "aba");

        let sy = sys("alphabet: a b\nXY = YX");
        let s = subst(&sy, &[("X", "ab"), ("Y", "abab")]);
        let x = sy.alphabet().lookup("X").unwrap();
        let y = sy.alphabet().lookup("Y").unwrap();
        let w = PositiveWord::new(vec![x, y]);
        let img = apply_positive(&s, sy.alphabet(), &w).unwrap();
        assert_eq!(img.display(sy.alphabet()).to_string(), "ababab");

        // conjugation by the variable's own letter: X'aX with X -> a reduces to a
        let sy = sys("alphabet: a\nXa = aX");
        let s = subst(&sy, &[("X", "a")]);
        let x = sy.alphabet().lookup("X").unwrap();
        let a = sy.alphabet().lookup("a").unwrap();
        let w = reduce(&[
            SignedSymbol::negative(x),
            SignedSymbol::positive(a),
            SignedSymbol::positive(x),
        ]);
        let img = apply(&s, sy.alphabet(), &w).unwrap();
        assert_eq!(img.display(sy.alphabet()).to_string(), "a");
    }

    #[test]
    fn is_solution_examples() {
        let sy = sys("XY = YX");
        assert!(is_solution(&subst(&sy, &[("X", "ab"), ("Y", "abab")]), &sy).unwrap());
        assert!(!is_solution(&subst(&sy, &[("X", "ab"), ("Y", "ba")]), &sy).unwrap());

        // independent letter-by-letter oracle for the conjugacy identity
        let sy = sys("XZ = ZY");
        let s = subst(&sy, &[("X", "ab"), ("Y", "ba"), ("Z", "aba")]);
        let lhs: String = "ab".chars().chain("aba".chars()).collect();
        let rhs: String = "aba".chars().chain("ba".chars()).collect();
        assert_eq!(lhs, rhs);
        assert!(is_solution(&s, &sy).unwrap());
    }

    #[test]
    fn unbound_variable_reported() {
        let sy = sys("XY = YX");
        let s = subst(&sy, &[("X", "ab")]);
        assert_eq!(
            is_solution(&s, &sy).unwrap_err(),
            ApplyError::UnboundVariable("Y".into())
        );
    }

    #[test]
    fn extend_to_group_examples() {
        let sy = sys("XY = YX");
        let p = sy.pair_presentation();
        let good = subst(&sy, &[("X", "ab"), ("Y", "abab")]);
        let report = extend_to_group(&good, sy.alphabet(), &p).unwrap();
        assert_eq!(report.relations_checked, 1);
        assert_eq!(report.generator_images.len(), sy.alphabet().len());

        let bad = subst(&sy, &[("X", "ab"), ("Y", "ba")]);
        assert_eq!(
            extend_to_group(&bad, sy.alphabet(), &p).unwrap_err(),
            ApplyError::RelationViolated(0)
        );

        // no equations: vacuous success
        let empty = sys("alphabet: a\n");
        let p = empty.pair_presentation();
        let s = Substitution::new();
        assert!(extend_to_group(&s, empty.alphabet(), &p).is_ok());
    }

    #[test]
    fn positive_cone_examples() {
        let sy = sys("XY = YX");
        let x = sy.alphabet().lookup("X").unwrap();
        let y = sy.alphabet().lookup("Y").unwrap();
        let s = subst(&sy, &[("X", "a"), ("Y", "a")]);
        let xs = PositiveWord::single(x).to_group();
        let ys = PositiveWord::single(y).to_group();
        assert!(positive_cone_check(&s, sy.alphabet(), &[xs, ys]).unwrap());

        let xy_inv = reduce(&[SignedSymbol::positive(x), SignedSymbol::negative(y)]);
        assert!(!positive_cone_check(&s, sy.alphabet(), std::slice::from_ref(&xy_inv)).unwrap());

        let s2 = subst(&sy, &[("X", "ab"), ("Y", "b")]);
        assert!(positive_cone_check(&s2, sy.alphabet(), &[xy_inv]).unwrap());
    }

    #[test]
    fn solution_extends_to_group_hom() {
        // every oracle solution must pass extend_to_group
        let sy = sys("XY = YX");
        let sols = crate::oracle::enumerate_exhaustive(
            &sy,
            &crate::oracle::SearchBudget::new(3, 10_000, 1_000_000).unwrap(),
        )
        .unwrap();
        let p = sy.pair_presentation();
        for s in &sols.solutions {
            assert!(extend_to_group(s, sy.alphabet(), &p).is_ok());
        }
    }

    #[test]
    fn renaming_invariance() {
        // is_solution is invariant under simultaneous renaming of variables
        let sy1 = sys("XY = YX");
        let sy2 = sys("alphabet: a b\nUW = WU");
        let s1 = subst(&sy1, &[("X", "ab"), ("Y", "abab")]);
        let s2 = subst(&sy2, &[("U", "ab"), ("W", "abab")]);
        assert_eq!(
            is_solution(&s1, &sy1).unwrap(),
            is_solution(&s2, &sy2).unwrap()
        );
    }

    proptest! {
        #[test]
        fn apply_is_a_semigroup_homomorphism(
            u in proptest::collection::vec(0u32..4, 1..6),
            v in proptest::collection::vec(0u32..4, 1..6),
        ) {
            let sy = sys("XY = YX");
            let s = subst(&sy, &[("X", "ab"), ("Y", "ba")]);
            let uw = PositiveWord::new(u);
            let vw = PositiveWord::new(v);
            let lhs = apply_positive(&s, sy.alphabet(), &concat(&uw, &vw)).unwrap();
            let rhs = concat(
                &apply_positive(&s, sy.alphabet(), &uw).unwrap(),
                &apply_positive(&s, sy.alphabet(), &vw).unwrap(),
            );
            prop_assert_eq!(lhs, rhs);
        }
    }
}
