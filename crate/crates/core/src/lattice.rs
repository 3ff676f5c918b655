//! Positive bases for spanning subsets of Z^ℓ under a generic positive
//! length functional.
//!
//! Given integer generators that span Z^ℓ as a group and exact rational
//! translation lengths making every generator positive, the iterative
//! replacement procedure produces a unimodular basis in which every
//! generator is a nonnegative integer combination. The two elementary
//! replacements are `a_p ← a_p − a_q`; which one fires is decided by exact
//! length comparisons, and an exact tie between distinct lattice points at a
//! decision the procedure needs is reported as [`LatticeError::DegenerateLengths`]
//! instead of being broken silently.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("generators do not span Z^rank as a group")]
    NotSpanning,
    #[error("generator {0} has non-positive length under the functional")]
    NonPositiveGenerator(usize),
    #[error("exact functional tie between distinct lattice points blocks a needed comparison")]
    DegenerateLengths,
    #[error("replacement step budget exhausted")]
    StepLimitExceeded,
    #[error("invalid instance: {0}")]
    Invalid(String),
}

/// Integer generators of (a spanning subset of) Z^ℓ together with the
/// translation lengths of the current coordinate directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeInstance {
    rank: usize,
    generators: Vec<Vec<BigInt>>,
    lengths: Vec<BigRational>,
}

impl LatticeInstance {
    pub fn new(
        rank: usize,
        generators: Vec<Vec<BigInt>>,
        lengths: Vec<BigRational>,
    ) -> Result<Self, LatticeError> {
        if rank == 0 {
            return Err(LatticeError::Invalid("rank must be >= 1".into()));
        }
        if lengths.len() != rank {
            return Err(LatticeError::Invalid(
                "lengths must have one entry per rank".into(),
            ));
        }
        if generators.is_empty() {
            return Err(LatticeError::Invalid(
                "at least one generator required".into(),
            ));
        }
        for g in &generators {
            if g.len() != rank {
                return Err(LatticeError::Invalid("generator arity mismatch".into()));
            }
        }
        for l in &lengths {
            if !l.is_positive() {
                return Err(LatticeError::Invalid(
                    "lengths must be strictly positive".into(),
                ));
            }
        }
        Ok(LatticeInstance {
            rank,
            generators,
            lengths,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }

    pub fn lengths(&self) -> &[BigRational] {
        &self.lengths
    }
}

/// A unimodular change of basis with nonnegative expressions of every
/// generator in the new basis (rows of `change_of_basis`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositiveBasis {
    pub change_of_basis: Vec<Vec<BigInt>>,
    pub expressions: Vec<Vec<BigInt>>,
}

fn dot(v: &[BigInt], lengths: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (a, l) in v.iter().zip(lengths) {
        acc += BigRational::from(a.clone()) * l;
    }
    acc
}

/// Determinant by fraction-free Gaussian elimination (Bareiss).
fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let swap = (k + 1..n).find(|&r| !a[r][k].is_zero());
            match swap {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Index of the integer row span in Z^rank: generators span iff the Hermite
/// reduction has unit diagonal product.
fn spans_lattice(generators: &[Vec<BigInt>], rank: usize) -> bool {
    let mut rows: Vec<Vec<BigInt>> = generators.to_vec();
    for (pivot_row, col) in (0..rank).enumerate() {
        loop {
            let mut nonzero: Vec<usize> = (pivot_row..rows.len())
                .filter(|&r| !rows[r][col].is_zero())
                .collect();
            if nonzero.is_empty() {
                return false; // rank deficient
            }
            if nonzero.len() == 1 {
                let r = nonzero[0];
                rows.swap(pivot_row, r);
                break;
            }
            // reduce the larger by the smaller (Euclid on the column)
            nonzero.sort_by_key(|&r| rows[r][col].abs());
            let small = nonzero[0];
            let small_val = rows[small][col].clone();
            for &r in &nonzero[1..] {
                let q = &rows[r][col] / &small_val;
                let deltas: Vec<BigInt> = rows[small].iter().map(|v| &q * v).collect();
                for (cell, delta) in rows[r].iter_mut().zip(deltas) {
                    *cell -= delta;
                }
            }
        }
    }
    let mut prod = BigInt::one();
    for (i, row) in rows.iter().take(rank).enumerate() {
        prod *= row[i].clone();
    }
    prod.abs().is_one()
}

const STEP_LIMIT: usize = 1_000_000;

/// Runs the iterative replacement procedure and returns a positive basis.
///
/// Preconditions: generators span Z^rank; every generator has strictly
/// positive functional value. The returned basis rows all have strictly
/// positive functional values, `|det| = 1`, and the expressions reproduce the
/// generators exactly with nonnegative coefficients.
pub fn positive_basis(inst: &LatticeInstance) -> Result<PositiveBasis, LatticeError> {
    let rank = inst.rank;
    for (j, g) in inst.generators.iter().enumerate() {
        if !dot(g, &inst.lengths).is_positive() {
            return Err(LatticeError::NonPositiveGenerator(j));
        }
    }
    if !spans_lattice(&inst.generators, rank) {
        return Err(LatticeError::NotSpanning);
    }

    // basis rows in ambient coordinates; starts at the identity, which is
    // already positive because every length is positive
    let mut basis: Vec<Vec<BigInt>> = (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut basis_len: Vec<BigRational> = inst.lengths.clone();
    // coordinates of each generator in the current basis
    let mut coords: Vec<Vec<BigInt>> = inst.generators.clone();
    let mut steps = 0usize;

    // a_p <- a_p - a_q; every generator's coordinates pick up c_q += c_p
    let replace = |basis: &mut Vec<Vec<BigInt>>,
                   basis_len: &mut Vec<BigRational>,
                   coords: &mut Vec<Vec<BigInt>>,
                   p: usize,
                   q: usize| {
        let subtrahend: Vec<BigInt> = basis[q].clone();
        for (cell, sub) in basis[p].iter_mut().zip(subtrahend) {
            *cell -= sub;
        }
        let newlen = &basis_len[p] - &basis_len[q];
        basis_len[p] = newlen;
        for cv in coords.iter_mut() {
            let add = cv[p].clone();
            cv[q] += add;
        }
    };

    for j in 0..coords.len() {
        loop {
            let negatives: Vec<usize> = (0..rank).filter(|&i| coords[j][i].is_negative()).collect();
            if negatives.is_empty() {
                break;
            }
            steps += 1;
            if steps > STEP_LIMIT {
                return Err(LatticeError::StepLimitExceeded);
            }
            // the maximal-magnitude negative coefficient, first index on ties
            let t_max = negatives.iter().map(|&i| coords[j][i].abs()).max().unwrap();
            let m1 = *negatives
                .iter()
                .find(|&&i| coords[j][i].abs() == t_max)
                .unwrap();
            let positives: Vec<usize> = (0..rank).filter(|&i| coords[j][i].is_positive()).collect();
            debug_assert!(
                !positives.is_empty(),
                "positive functional value forces a positive coefficient"
            );
            // classify each positive-coefficient direction against a_{m1};
            // a tie with a distinct lattice point only blocks the procedure
            // when no strictly longer candidate decides the case
            let mut longer: Vec<usize> = Vec::new();
            let mut tied = false;
            for &i in &positives {
                match basis_len[i].cmp(&basis_len[m1]) {
                    std::cmp::Ordering::Greater => longer.push(i),
                    std::cmp::Ordering::Less => {}
                    std::cmp::Ordering::Equal => tied = true,
                }
            }
            if !longer.is_empty() {
                // longest candidate first, ties by smallest index
                let p = *longer
                    .iter()
                    .max_by(|&&x, &&y| basis_len[x].cmp(&basis_len[y]).then(y.cmp(&x)))
                    .unwrap();
                replace(&mut basis, &mut basis_len, &mut coords, p, m1);
            } else if tied {
                // subtracting a tied direction would produce a zero-length
                // basis vector; the genericity hypothesis is violated
                return Err(LatticeError::DegenerateLengths);
            } else {
                // subtract the longest positive direction from a_{m1}
                let q = *positives
                    .iter()
                    .max_by(|&&x, &&y| basis_len[x].cmp(&basis_len[y]).then(y.cmp(&x)))
                    .unwrap();
                replace(&mut basis, &mut basis_len, &mut coords, m1, q);
            }
        }
    }

    // verify the contract exactly before returning
    debug_assert!(determinant(&basis).abs().is_one());
    for (j, g) in inst.generators.iter().enumerate() {
        let mut recon = vec![BigInt::zero(); rank];
        for i in 0..rank {
            for c in 0..rank {
                recon[c] += &coords[j][i] * &basis[i][c];
            }
        }
        if recon != *g {
            return Err(LatticeError::Invalid(format!(
                "internal error: expression for generator {j} does not reproduce it"
            )));
        }
    }
    for row in &basis {
        if !dot(row, &inst.lengths).is_positive() {
            return Err(LatticeError::Invalid(
                "internal error: non-positive basis vector produced".into(),
            ));
        }
    }
    Ok(PositiveBasis {
        change_of_basis: basis,
        expressions: coords,
    })
}

/// One basis per functional, for instances sharing a generator set;
/// deduplicated by the change-of-basis matrix, first occurrence kept.
pub fn positive_basis_family(
    instances: &[LatticeInstance],
) -> Result<Vec<PositiveBasis>, LatticeError> {
    if instances.is_empty() {
        return Ok(Vec::new());
    }
    let first = &instances[0];
    for inst in &instances[1..] {
        if inst.generators != first.generators || inst.rank != first.rank {
            return Err(LatticeError::Invalid(
                "family instances must share rank and generators".into(),
            ));
        }
    }
    let mut out: Vec<PositiveBasis> = Vec::new();
    for inst in instances {
        let b = positive_basis(inst)?;
        if !out.iter().any(|p| p.change_of_basis == b.change_of_basis) {
            out.push(b);
        }
    }
    Ok(out)
}

/// Checks the positive-basis contract for an arbitrary candidate matrix:
/// unimodular, positive rows, and exact nonnegative expressions. Used by
/// tests as the witness predicate for the exhaustive oracle.
pub fn is_positive_basis_witness(inst: &LatticeInstance, basis: &[Vec<BigInt>]) -> bool {
    let rank = inst.rank;
    if basis.len() != rank || basis.iter().any(|r| r.len() != rank) {
        return false;
    }
    if !determinant(basis).abs().is_one() {
        return false;
    }
    for row in basis {
        if !dot(row, &inst.lengths).is_positive() {
            return false;
        }
    }
    // solve s = x · basis over the rationals; entries must be nonneg integers
    for g in &inst.generators {
        match solve_expression(basis, g) {
            Some(x) => {
                if x.iter().any(|c| c.is_negative()) {
                    return false;
                }
            }
            None => return false,
        }
    }
    true
}

/// Solves `x · basis = target` over Z, returning None when no integer
/// solution exists.
pub fn solve_expression(basis: &[Vec<BigInt>], target: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = basis.len();
    // Gaussian elimination over the rationals on the transposed system
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| BigRational::from(basis[c][r].clone()))
                .collect()
        })
        .collect();
    let mut b: Vec<BigRational> = target
        .iter()
        .map(|t| BigRational::from(t.clone()))
        .collect();
    let mut pivots = Vec::with_capacity(n);
    let mut used = vec![false; n];
    for col in 0..n {
        let piv = (0..n).find(|&r| !used[r] && !a[r][col].is_zero())?;
        used[piv] = true;
        pivots.push((piv, col));
        let inv = a[piv][col].clone();
        for r in 0..n {
            if r != piv && !a[r][col].is_zero() {
                let factor = &a[r][col] / &inv;
                let deltas: Vec<BigRational> = a[piv].iter().map(|v| &factor * v).collect();
                for (cell, delta) in a[r].iter_mut().zip(deltas) {
                    *cell -= delta;
                }
                let sub = &factor * &b[piv];
                b[r] -= sub;
            }
        }
    }
    let mut x = vec![BigRational::zero(); n];
    for (piv, col) in pivots {
        x[col] = &b[piv] / &a[piv][col];
    }
    let mut out = Vec::with_capacity(n);
    for xi in x {
        if !xi.is_integer() {
            return None;
        }
        out.push(xi.to_integer());
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn br(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn inst(rank: usize, gens: &[&[i64]], lens: &[(i64, i64)]) -> LatticeInstance {
        LatticeInstance::new(
            rank,
            gens.iter()
                .map(|g| g.iter().map(|&v| bi(v)).collect())
                .collect(),
            lens.iter().map(|&(n, d)| br(n, d)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn already_positive_is_identity() {
        let i = inst(2, &[&[1, 0], &[0, 1]], &[(1, 1), (2, 3)]);
        let b = positive_basis(&i).unwrap();
        assert_eq!(
            b.change_of_basis,
            vec![vec![bi(1), bi(0)], vec![bi(0), bi(1)]]
        );
        assert_eq!(b.expressions, vec![vec![bi(1), bi(0)], vec![bi(0), bi(1)]]);
    }

    #[test]
    fn rank_one_multiples() {
        let i = inst(1, &[&[3], &[5]], &[(1, 1)]);
        let b = positive_basis(&i).unwrap();
        assert_eq!(b.change_of_basis, vec![vec![bi(1)]]);
        assert_eq!(b.expressions, vec![vec![bi(3)], vec![bi(5)]]);
    }

    #[test]
    fn rank_one_not_spanning() {
        let i = inst(1, &[&[2], &[4]], &[(1, 1)]);
        assert_eq!(positive_basis(&i).unwrap_err(), LatticeError::NotSpanning);
    }

    #[test]
    fn mixed_sign_instance_matches_witness_oracle() {
        let i = inst(2, &[&[2, -1], &[-1, 1]], &[(1, 1), (7, 5)]);
        let b = positive_basis(&i).unwrap();
        assert!(is_positive_basis_witness(&i, &b.change_of_basis));
        // independent box search confirms feasibility
        assert!(exhaustive_witness_exists(&i, 6));
    }

    #[test]
    fn tie_with_longer_candidate_still_succeeds() {
        // equal lengths between two directions do not block the procedure
        // when a strictly longer candidate decides the case
        let i = inst(
            3,
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, -1]],
            &[(3, 1), (1, 1), (1, 1)],
        );
        let b = positive_basis(&i).unwrap();
        assert!(is_positive_basis_witness(&i, &b.change_of_basis));
    }

    #[test]
    fn decisive_tie_is_degenerate() {
        let i = inst(2, &[&[1, 0], &[0, 1], &[2, -1]], &[(1, 1), (1, 1)]);
        assert_eq!(
            positive_basis(&i).unwrap_err(),
            LatticeError::DegenerateLengths
        );
    }

    #[test]
    fn non_positive_generator_rejected() {
        let i = inst(2, &[&[1, 0], &[0, -1]], &[(1, 1), (1, 2)]);
        assert_eq!(
            positive_basis(&i).unwrap_err(),
            LatticeError::NonPositiveGenerator(1)
        );
    }

    #[test]
    fn scaling_invariance() {
        let gens: &[&[i64]] = &[&[2, -1], &[-1, 1]];
        let a = inst(2, gens, &[(1, 1), (7, 5)]);
        let scaled = inst(2, gens, &[(3, 1), (21, 5)]);
        let fam = positive_basis_family(&[a, scaled]).unwrap();
        assert_eq!(fam.len(), 1);
    }

    #[test]
    fn two_functionals_give_at_most_two_bases() {
        let gens: &[&[i64]] = &[&[2, -1], &[-1, 1]];
        let a = inst(2, gens, &[(1, 1), (7, 5)]);
        let b = inst(2, gens, &[(1, 1), (8, 5)]);
        let fam = positive_basis_family(&[a.clone(), b.clone()]).unwrap();
        assert!(fam.len() <= 2);
        for (i, basis) in fam.iter().enumerate() {
            let _ = i;
            assert!(determinant(&basis.change_of_basis).abs().is_one());
        }
        // each functional's own basis passes the witness predicate
        assert!(is_positive_basis_witness(
            &a,
            &positive_basis(&a).unwrap().change_of_basis
        ));
        assert!(is_positive_basis_witness(
            &b,
            &positive_basis(&b).unwrap().change_of_basis
        ));
    }

    #[test]
    fn singleton_family() {
        let i = inst(2, &[&[1, 0], &[0, 1]], &[(1, 1), (1, 3)]);
        assert_eq!(positive_basis_family(&[i]).unwrap().len(), 1);
    }

    /// Exhaustive search over unimodular 2x2 matrices with entries in
    /// [-box, box] for a positive-basis witness. Independent of the
    /// algorithm path.
    pub fn exhaustive_witness_exists(inst: &LatticeInstance, boxr: i64) -> bool {
        assert_eq!(inst.rank(), 2);
        for a in -boxr..=boxr {
            for b in -boxr..=boxr {
                for c in -boxr..=boxr {
                    for d in -boxr..=boxr {
                        if (a * d - b * c).abs() != 1 {
                            continue;
                        }
                        let cand = vec![vec![bi(a), bi(b)], vec![bi(c), bi(d)]];
                        if is_positive_basis_witness(inst, &cand) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    #[test]
    fn random_instances_terminate_and_verify() {
        let mut rng = SplitMix64::new(0xC0FFEE);
        let mut produced = 0;
        while produced < 30 {
            let rank = 2 + (rng.below(3) as usize); // 2..=4
            let count = rank + (rng.below(3) as usize);
            let gens: Vec<Vec<BigInt>> = (0..count)
                .map(|_| (0..rank).map(|_| bi(rng.range_i64(-5, 5))).collect())
                .collect();
            let lens: Vec<BigRational> = (0..rank)
                .map(|_| br(rng.range_i64(1, 400), rng.range_i64(1, 97)))
                .collect();
            let inst = match LatticeInstance::new(rank, gens, lens) {
                Ok(i) => i,
                Err(_) => continue,
            };
            match positive_basis(&inst) {
                Ok(b) => {
                    assert!(is_positive_basis_witness(&inst, &b.change_of_basis));
                    produced += 1;
                }
                Err(LatticeError::NotSpanning)
                | Err(LatticeError::NonPositiveGenerator(_))
                | Err(LatticeError::DegenerateLengths) => continue,
                Err(e) => panic!("unexpected failure: {e}"),
            }
        }
    }
}
