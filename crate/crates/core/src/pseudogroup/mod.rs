//! Exact-rational band systems: pseudogroups of orientation-preserving
//! partial translations on a union of closed intervals.
//!
//! A band system is a list of components (disjoint closed intervals with
//! rational endpoints) carrying paired bases. Each base is a subinterval
//! together with a translation onto its partner's subinterval; the pairing
//! is a perfect matching and every identification is a positive-orientation
//! translation (orientation-reversing bands are rejected at load). All
//! arithmetic is exact; predicates like "covered exactly twice" are
//! equality-sensitive and no floating point appears anywhere in this module.

mod analysis;
mod fixtures;
mod machine;
mod moves;

pub use analysis::{
    classify_weights, detect_stationary, dual_positions, extract_generators, orbit_closure,
    orbit_partition, positive_expression, replay_expressions, total_base_length,
    DualPositionReport, GeneratorSegment, GeneratorSet, PositiveExpressionError, StationaryWitness,
    WeightClass, WeightClassification, WeightTag, DEFAULT_TRANSPORT_DEPTH,
};
pub use fixtures::{
    fixture_f1, fixture_f2, fixture_f3, fixture_f4, fixture_f4_partnered, fixture_f5, fixture_f6,
    fixture_f7, random_band_system,
};
pub use machine::{rips_step, run_machine, MoveKind, MoveRecord};
pub use moves::{
    cut_base_at, dehn_twist_positive_end, entire_transformation, move_remove_double,
    move_remove_isolated, move_split_interior, move_trim_semi_isolated,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BandError {
    #[error("invalid band system: {0}")]
    Invalid(String),
    #[error("no base with id {0}")]
    NoSuchBase(usize),
    #[error("base {0} is not isolated")]
    NotIsolated(usize),
    #[error("move precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("overlap comparison is an exact tie; refusing to choose")]
    DegenerateOverlap,
}

/// Closed interval with exact rational endpoints, `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Result<Self, BandError> {
        if lo > hi {
            return Err(BandError::Invalid(format!(
                "interval [{lo}, {hi}] has lo > hi"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn length(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains_point(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// True iff the open interiors intersect.
    pub fn interiors_overlap(&self, other: &Interval) -> bool {
        let lo = if self.lo > other.lo {
            &self.lo
        } else {
            &other.lo
        };
        let hi = if self.hi < other.hi {
            &self.hi
        } else {
            &other.hi
        };
        lo < hi
    }

    pub fn translate(&self, offset: &Rat) -> Interval {
        Interval {
            lo: &self.lo + offset,
            hi: &self.hi + offset,
        }
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// One oriented base: a subinterval identified with its partner's
/// subinterval by the translation `x -> x + offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Base {
    pub id: usize,
    pub support: Interval,
    pub partner: usize,
    pub offset: Rat,
}

/// A band system: components, matched bases, and marked points carried
/// verbatim through every move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BandSystem {
    components: Vec<Interval>,
    bases: Vec<Base>,
    marks: Vec<Rat>,
    next_id: usize,
}

impl BandSystem {
    pub fn new(
        components: Vec<Interval>,
        bases: Vec<Base>,
        marks: Vec<Rat>,
    ) -> Result<Self, BandError> {
        let next_id = bases.iter().map(|b| b.id + 1).max().unwrap_or(0);
        let bs = BandSystem {
            components,
            bases,
            marks,
            next_id,
        };
        bs.validate()?;
        Ok(bs)
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    pub fn bases(&self) -> &[Base] {
        &self.bases
    }

    pub fn marks(&self) -> &[Rat] {
        &self.marks
    }

    pub fn base(&self, id: usize) -> Result<&Base, BandError> {
        self.bases
            .iter()
            .find(|b| b.id == id)
            .ok_or(BandError::NoSuchBase(id))
    }

    pub fn pair_count(&self) -> usize {
        self.bases.len() / 2
    }

    pub(crate) fn fresh_id(&mut self) -> usize {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    pub(crate) fn bases_mut(&mut self) -> &mut Vec<Base> {
        &mut self.bases
    }

    /// Drops components no base support touches. Marks are kept verbatim.
    pub(crate) fn cleanup_components(&mut self) {
        let bases = &self.bases;
        self.components
            .retain(|comp| bases.iter().any(|b| comp.contains_interval(&b.support)));
    }

    pub fn validate(&self) -> Result<(), BandError> {
        for w in self.components.windows(2) {
            if w[0].hi >= w[1].lo {
                return Err(BandError::Invalid(
                    "components must be sorted and disjoint".into(),
                ));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for b in &self.bases {
            if !seen.insert(b.id) {
                return Err(BandError::Invalid(format!("duplicate base id {}", b.id)));
            }
            if b.support.is_degenerate() {
                return Err(BandError::Invalid(format!(
                    "base {} has degenerate support",
                    b.id
                )));
            }
            if !self
                .components
                .iter()
                .any(|c| c.contains_interval(&b.support))
            {
                return Err(BandError::Invalid(format!(
                    "base {} support {} lies outside every component",
                    b.id, b.support
                )));
            }
        }
        for b in &self.bases {
            if b.partner == b.id {
                return Err(BandError::Invalid(format!(
                    "base {} is its own partner",
                    b.id
                )));
            }
            let p = self.base(b.partner).map_err(|_| {
                BandError::Invalid(format!("base {} has missing partner {}", b.id, b.partner))
            })?;
            if p.partner != b.id {
                return Err(BandError::Invalid(format!(
                    "pairing of bases {} and {} is not symmetric",
                    b.id, b.partner
                )));
            }
            if p.support != b.support.translate(&b.offset) {
                return Err(BandError::Invalid(format!(
                    "base {}: partner support is not support + offset",
                    b.id
                )));
            }
            if p.offset != -b.offset.clone() {
                return Err(BandError::Invalid(format!(
                    "base {}: partner offset is not the negated offset",
                    b.id
                )));
            }
        }
        Ok(())
    }

    /// Canonical pair list: each pair reported once via its lower base id.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for b in &self.bases {
            if b.id < b.partner {
                out.push((b.id, b.partner));
            }
        }
        out.sort_unstable();
        out
    }
}

/// Exact cover multiplicity as a step function with rational breakpoints.
/// Pieces are maximal constant-multiplicity open runs (their closures are
/// stored); multiplicity at isolated points is not represented.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageProfile {
    pub pieces: Vec<(Interval, usize)>,
}

impl CoverageProfile {
    /// Multiplicity of the open interval `(interval.lo, interval.hi)` if it
    /// is constant over it, else None.
    pub fn multiplicity_over(&self, interval: &Interval) -> Option<usize> {
        let mut result: Option<usize> = None;
        for (piece, mult) in &self.pieces {
            if piece.interiors_overlap(interval) || piece.contains_interval(interval) {
                let cover_lo = piece.lo <= interval.lo;
                let cover_hi = interval.hi <= piece.hi;
                match result {
                    None if cover_lo && cover_hi => return Some(*mult),
                    None => result = Some(*mult),
                    Some(m) if m != *mult => return None,
                    Some(_) => {}
                }
            }
        }
        result
    }
}

pub fn coverage_profile(bs: &BandSystem) -> CoverageProfile {
    let mut pieces = Vec::new();
    for comp in bs.components() {
        let mut cuts: Vec<Rat> = vec![comp.lo.clone(), comp.hi.clone()];
        for b in bs.bases() {
            for x in [&b.support.lo, &b.support.hi] {
                if comp.contains_point(x) {
                    cuts.push(x.clone());
                }
            }
        }
        cuts.sort();
        cuts.dedup();
        let mut run: Option<(Rat, Rat, usize)> = None;
        for w in cuts.windows(2) {
            let (lo, hi) = (&w[0], &w[1]);
            let mult = bs
                .bases()
                .iter()
                .filter(|b| &b.support.lo <= lo && hi <= &b.support.hi)
                .count();
            run = match run {
                Some((rlo, rhi, rmult)) if rmult == mult && rhi == *lo => {
                    Some((rlo, hi.clone(), mult))
                }
                Some((rlo, rhi, rmult)) => {
                    pieces.push((Interval { lo: rlo, hi: rhi }, rmult));
                    Some((lo.clone(), hi.clone(), mult))
                }
                None => Some((lo.clone(), hi.clone(), mult)),
            };
        }
        if let Some((rlo, rhi, rmult)) = run {
            pieces.push((Interval { lo: rlo, hi: rhi }, rmult));
        }
    }
    CoverageProfile { pieces }
}

/// Maximal subintervals covered at least once, in component order.
pub fn covered_runs(bs: &BandSystem) -> Vec<Interval> {
    let profile = coverage_profile(bs);
    let mut runs: Vec<Interval> = Vec::new();
    for (piece, mult) in &profile.pieces {
        if *mult == 0 {
            continue;
        }
        match runs.last_mut() {
            Some(last) if last.hi == piece.lo => last.hi = piece.hi.clone(),
            _ => runs.push(piece.clone()),
        }
    }
    runs
}

/// The free arcs of one base: maximal once-covered subruns of its support.
pub(crate) fn free_arcs_of(
    _bs: &BandSystem,
    profile: &CoverageProfile,
    base: &Base,
) -> Vec<Interval> {
    let mut arcs: Vec<Interval> = Vec::new();
    for (piece, mult) in &profile.pieces {
        if *mult != 1 || !base.support.contains_interval(piece) {
            continue;
        }
        match arcs.last_mut() {
            Some(last) if last.hi == piece.lo => last.hi = piece.hi.clone(),
            _ => arcs.push(piece.clone()),
        }
    }
    arcs
}

/// The graph associated with a band system: vertices are maximal covered
/// subintervals, edges connect the supports of each base pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssociatedGraph {
    pub vertices: Vec<Interval>,
    /// (pair anchor = lower base id, vertex index of that base's support,
    /// vertex index of the partner's support)
    pub edges: Vec<(usize, usize, usize)>,
    pub euler_characteristic: i64,
}

pub fn associated_graph(bs: &BandSystem) -> AssociatedGraph {
    let vertices = covered_runs(bs);
    let vertex_of = |support: &Interval| -> usize {
        vertices
            .iter()
            .position(|v| v.contains_interval(support))
            .expect("base support must lie in a covered run")
    };
    let mut edges = Vec::new();
    for (lo_id, hi_id) in bs.pairs() {
        let b = bs.base(lo_id).unwrap();
        let p = bs.base(hi_id).unwrap();
        edges.push((lo_id, vertex_of(&b.support), vertex_of(&p.support)));
    }
    let chi = vertices.len() as i64 - edges.len() as i64;
    AssociatedGraph {
        vertices,
        edges,
        euler_characteristic: chi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: (i64, i64), hi: (i64, i64)) -> Interval {
        Interval::new(rat(lo.0, lo.1), rat(hi.0, hi.1)).unwrap()
    }

    /// One pair of bases, supports adjacent on a single component.
    fn single_loop() -> BandSystem {
        BandSystem::new(
            vec![iv((0, 1), (4, 1))],
            vec![
                Base {
                    id: 0,
                    support: iv((0, 1), (2, 1)),
                    partner: 1,
                    offset: rat(2, 1),
                },
                Base {
                    id: 1,
                    support: iv((2, 1), (4, 1)),
                    partner: 0,
                    offset: rat(-2, 1),
                },
            ],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn validation_catches_bad_pairing() {
        let err = BandSystem::new(
            vec![iv((0, 1), (4, 1))],
            vec![
                Base {
                    id: 0,
                    support: iv((0, 1), (2, 1)),
                    partner: 1,
                    offset: rat(2, 1),
                },
                Base {
                    id: 1,
                    support: iv((2, 1), (4, 1)),
                    partner: 0,
                    offset: rat(2, 1),
                },
            ],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, BandError::Invalid(_)));
    }

    #[test]
    fn single_loop_graph() {
        let bs = single_loop();
        let g = associated_graph(&bs);
        assert_eq!(g.vertices.len(), 1);
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.euler_characteristic, 0);
    }

    #[test]
    fn chi_attains_lower_bound_on_single_vertex() {
        // b pairs all supported on one maximal subinterval: chi = 1 - b
        let comp = iv((0, 1), (8, 1));
        let mut bases = Vec::new();
        for k in 0..3i64 {
            bases.push(Base {
                id: 2 * k as usize,
                support: iv((k, 1), (k + 4, 1)),
                partner: 2 * k as usize + 1,
                offset: rat(4 - k, 1),
            });
            bases.push(Base {
                id: 2 * k as usize + 1,
                support: iv((4, 1), (8, 1)),
                partner: 2 * k as usize,
                offset: rat(k - 4, 1),
            });
        }
        let bs = BandSystem::new(vec![comp], bases, vec![]).unwrap();
        let g = associated_graph(&bs);
        assert_eq!(g.vertices.len(), 1);
        assert_eq!(g.euler_characteristic, 1 - 3);
    }

    #[test]
    fn two_runs_joined_by_one_pair() {
        let bs = BandSystem::new(
            vec![iv((0, 1), (10, 1))],
            vec![
                Base {
                    id: 0,
                    support: iv((0, 1), (2, 1)),
                    partner: 1,
                    offset: rat(5, 1),
                },
                Base {
                    id: 1,
                    support: iv((5, 1), (7, 1)),
                    partner: 0,
                    offset: rat(-5, 1),
                },
            ],
            vec![],
        )
        .unwrap();
        let g = associated_graph(&bs);
        assert_eq!(g.vertices.len(), 2);
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.euler_characteristic, 1);
    }

    #[test]
    fn coverage_profile_examples() {
        // no bases: identically 0
        let empty = BandSystem::new(vec![iv((0, 1), (1, 1))], vec![], vec![]).unwrap();
        let p = coverage_profile(&empty);
        assert_eq!(p.pieces, vec![(iv((0, 1), (1, 1)), 0)]);

        // one pair with disjoint supports: multiplicity 1 on both
        let bs = single_loop();
        let p = coverage_profile(&bs);
        assert_eq!(p.pieces, vec![(iv((0, 1), (4, 1)), 1)]);

        // overlapping supports: multiplicity 2 on the overlap
        let bs = BandSystem::new(
            vec![iv((0, 1), (3, 1))],
            vec![
                Base {
                    id: 0,
                    support: iv((0, 1), (2, 1)),
                    partner: 1,
                    offset: rat(1, 1),
                },
                Base {
                    id: 1,
                    support: iv((1, 1), (3, 1)),
                    partner: 0,
                    offset: rat(-1, 1),
                },
            ],
            vec![],
        )
        .unwrap();
        let p = coverage_profile(&bs);
        assert_eq!(
            p.pieces,
            vec![
                (iv((0, 1), (1, 1)), 1),
                (iv((1, 1), (2, 1)), 2),
                (iv((2, 1), (3, 1)), 1),
            ]
        );
        // cross-check by sampling: 1000 rational points against direct count
        let comp = iv((0, 1), (3, 1));
        for i in 0..1000i64 {
            let x = &comp.lo + rat(3 * i * 2 + 3, 2000); // interior sample points
            if x >= comp.hi {
                break;
            }
            let direct = bs
                .bases()
                .iter()
                .filter(|b| b.support.lo < x && x < b.support.hi)
                .count();
            let piece = p
                .pieces
                .iter()
                .find(|(piece, _)| piece.lo < x && x < piece.hi);
            if let Some((_, m)) = piece {
                assert_eq!(*m, direct, "at {x}");
            }
        }
    }
}
