//! Diagnostics over band systems: generator extraction, weight
//! classification with separators, dual-position counts, bounded-depth
//! orbits, stationarity detection, and positive expressions of old
//! generators in new ones.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::Zero;
use thiserror::Error;

use super::{covered_runs, BandSystem, Interval, Rat};

/// Default composition depth for arc-transport searches.
pub const DEFAULT_TRANSPORT_DEPTH: usize = 8;

/// One generator: the oriented segment between two consecutive base
/// endpoints on a maximal covered subinterval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSegment {
    pub id: usize,
    pub run: usize,
    pub interval: Interval,
}

/// The ordered generator segments of a band system; they tile each maximal
/// covered subinterval in order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GeneratorSet {
    pub elements: Vec<GeneratorSegment>,
}

impl GeneratorSet {
    pub fn lengths(&self) -> Vec<Rat> {
        self.elements.iter().map(|g| g.interval.length()).collect()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Segments between consecutive base endpoints on each covered run.
pub fn extract_generators(bs: &BandSystem) -> GeneratorSet {
    let runs = covered_runs(bs);
    let mut elements = Vec::new();
    let mut id = 0;
    for (run_idx, run) in runs.iter().enumerate() {
        let mut cuts: Vec<Rat> = vec![run.lo.clone(), run.hi.clone()];
        for b in bs.bases() {
            for x in [&b.support.lo, &b.support.hi] {
                if run.contains_point(x) {
                    cuts.push(x.clone());
                }
            }
        }
        cuts.sort();
        cuts.dedup();
        for w in cuts.windows(2) {
            elements.push(GeneratorSegment {
                id,
                run: run_idx,
                interval: Interval {
                    lo: w[0].clone(),
                    hi: w[1].clone(),
                },
            });
            id += 1;
        }
    }
    GeneratorSet { elements }
}

/// Sum of the support lengths of all bases (both sides of every pair).
pub fn total_base_length(bs: &BandSystem) -> Rat {
    let mut acc = Rat::zero();
    for b in bs.bases() {
        acc += b.support.length();
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightTag {
    Long,
    Short,
    SecondaryShort,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightClass {
    pub members: Vec<usize>,
}

/// Length-ordered classes split by separators at ratio `c1 = 4 f c_p`,
/// with the longest separated set tagged long and the rest short.
/// `SecondaryShort` is reserved for fragment bookkeeping by callers that
/// refine classifications across passes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightClassification {
    /// generator ids ordered by decreasing length
    pub order: Vec<usize>,
    pub classes: Vec<WeightClass>,
    /// positions i such that a separator sits between `order[i]` and `order[i+1]`
    pub separators: Vec<usize>,
    /// the periodicity bound parameter the split ratio was built from
    pub c_p: u32,
    pub c1: Rat,
    pub tags: BTreeMap<usize, WeightTag>,
    /// diagnostics: number of generators, size of the longest separated
    /// class, the longest/shortest length ratio observed inside it, and
    /// the 4^f * f cap on how far iterated refinement could grow the set
    pub generator_count: usize,
    pub longest_class_size: usize,
    pub longest_class_ratio: Option<Rat>,
    pub element_cap: num_bigint::BigInt,
}

pub fn classify_weights(gens: &GeneratorSet, c_p: u32) -> WeightClassification {
    let f = gens.len().max(1);
    let c1 = Rat::from_integer((4 * f as u64 * c_p as u64).into());
    let mut order: Vec<usize> = gens.elements.iter().map(|g| g.id).collect();
    let length_of: BTreeMap<usize, Rat> = gens
        .elements
        .iter()
        .map(|g| (g.id, g.interval.length()))
        .collect();
    order.sort_by(|a, b| length_of[b].cmp(&length_of[a]).then(a.cmp(b)));

    let mut separators = Vec::new();
    for i in 0..order.len().saturating_sub(1) {
        let longer = &length_of[&order[i]];
        let shorter = &length_of[&order[i + 1]];
        if longer >= &(&c1 * shorter) {
            separators.push(i);
        }
    }
    let mut classes = Vec::new();
    let mut start = 0;
    for &sep in &separators {
        classes.push(WeightClass {
            members: order[start..=sep].to_vec(),
        });
        start = sep + 1;
    }
    if start < order.len() || order.is_empty() {
        classes.push(WeightClass {
            members: order[start..].to_vec(),
        });
    }
    let mut tags = BTreeMap::new();
    for (idx, class) in classes.iter().enumerate() {
        let tag = if idx == 0 {
            WeightTag::Long
        } else {
            WeightTag::Short
        };
        for &m in &class.members {
            tags.insert(m, tag);
        }
    }
    let longest_class_size = classes.first().map(|c| c.members.len()).unwrap_or(0);
    let longest_class_ratio = classes.first().and_then(|c| {
        let first = c.members.first()?;
        let last = c.members.last()?;
        let longest = &length_of[first];
        let shortest = &length_of[last];
        if shortest.is_zero() {
            None
        } else {
            Some(longest / shortest)
        }
    });
    let element_cap = num_bigint::BigInt::from(4u32).pow(f as u32) * f;
    WeightClassification {
        order,
        classes,
        separators,
        c_p,
        c1,
        tags,
        generator_count: gens.len(),
        longest_class_size,
        longest_class_ratio,
        element_cap,
    }
}

/// Dual-position and elimination report for a pair of overlapping paths.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DualPositionReport {
    /// distinct overlap offsets observed per (generator in path1, generator
    /// in path2)
    pub pair_counts: BTreeMap<(usize, usize), usize>,
    /// occurrences still multiply covered after eliminating aligned
    /// identical subwords
    pub db_count: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DualPositionError {
    #[error("paths must be nonempty generator words")]
    NoOverlap,
    #[error("unknown generator id {0}")]
    UnknownGenerator(usize),
}

/// Realizes both paths as cumulative segment runs anchored at their first
/// arcs, counts the distinct overlap offsets per generator pair, then
/// eliminates aligned identical occurrences and reports how many of the
/// remaining occurrences still overlap the other path.
pub fn dual_positions(
    _bs: &BandSystem,
    gens: &GeneratorSet,
    path1: &[usize],
    path2: &[usize],
) -> Result<DualPositionReport, DualPositionError> {
    if path1.is_empty() || path2.is_empty() {
        return Err(DualPositionError::NoOverlap);
    }
    let arc_of = |id: usize| -> Result<&Interval, DualPositionError> {
        gens.elements
            .iter()
            .find(|g| g.id == id)
            .map(|g| &g.interval)
            .ok_or(DualPositionError::UnknownGenerator(id))
    };
    let realize = |path: &[usize]| -> Result<Vec<(usize, Interval)>, DualPositionError> {
        let mut cur = arc_of(path[0])?.lo.clone();
        let mut out = Vec::with_capacity(path.len());
        for &id in path {
            let len = arc_of(id)?.length();
            let next = &cur + &len;
            out.push((
                id,
                Interval {
                    lo: cur.clone(),
                    hi: next.clone(),
                },
            ));
            cur = next;
        }
        Ok(out)
    };
    let occ1 = realize(path1)?;
    let occ2 = realize(path2)?;

    let mut offsets: BTreeMap<(usize, usize), BTreeSet<Rat>> = BTreeMap::new();
    for (g1, iv1) in &occ1 {
        for (g2, iv2) in &occ2 {
            if iv1.interiors_overlap(iv2) {
                offsets
                    .entry((*g1, *g2))
                    .or_default()
                    .insert(&iv2.lo - &iv1.lo);
            }
        }
    }
    let pair_counts = offsets.into_iter().map(|(k, v)| (k, v.len())).collect();

    // eliminate occurrences aligned exactly (same generator, same span)
    let mut keep1 = vec![true; occ1.len()];
    let mut keep2 = vec![true; occ2.len()];
    for (i, (g1, iv1)) in occ1.iter().enumerate() {
        for (j, (g2, iv2)) in occ2.iter().enumerate() {
            if keep1[i] && keep2[j] && g1 == g2 && iv1 == iv2 {
                keep1[i] = false;
                keep2[j] = false;
                break;
            }
        }
    }
    let mut db_count = 0;
    for (i, (_, iv1)) in occ1.iter().enumerate() {
        if keep1[i]
            && occ2
                .iter()
                .enumerate()
                .any(|(j, (_, iv2))| keep2[j] && iv1.interiors_overlap(iv2))
        {
            db_count += 1;
        }
    }
    for (j, (_, iv2)) in occ2.iter().enumerate() {
        if keep2[j]
            && occ1
                .iter()
                .enumerate()
                .any(|(i, (_, iv1))| keep1[i] && iv2.interiors_overlap(iv1))
        {
            db_count += 1;
        }
    }
    Ok(DualPositionReport {
        pair_counts,
        db_count,
    })
}

/// Points reachable from `start` by at most `depth` base applications.
pub fn orbit_closure(bs: &BandSystem, start: &Rat, depth: usize, cap: usize) -> BTreeSet<Rat> {
    let mut seen: BTreeSet<Rat> = BTreeSet::new();
    seen.insert(start.clone());
    let mut frontier: Vec<Rat> = vec![start.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for x in &frontier {
            for b in bs.bases() {
                if b.support.contains_point(x) {
                    let y = x + &b.offset;
                    if seen.insert(y.clone()) {
                        next.push(y);
                        if seen.len() >= cap {
                            return seen;
                        }
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    seen
}

/// Partition of the sample points by bounded-depth orbit connectivity:
/// two points share a class when one lies in the other's depth-limited
/// closure, transitively. Returned as sorted index groups.
pub fn orbit_partition(bs: &BandSystem, points: &[Rat], depth: usize) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..points.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    let index: BTreeMap<&Rat, usize> = points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    for (i, p) in points.iter().enumerate() {
        let closure = orbit_closure(bs, p, depth, 100_000);
        for q in &closure {
            if let Some(&j) = index.get(q) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj] = ri;
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..points.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

/// A nontrivial bounded-depth word acting as the identity on a subinterval
/// of positive length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StationaryWitness {
    pub word: Vec<usize>,
    pub domain: Interval,
}

/// Searches compositions up to `depth` (excluding immediate backtracks
/// through a base's own partner) for one that translates by zero on a
/// nondegenerate domain.
pub fn detect_stationary(bs: &BandSystem, depth: usize) -> Option<StationaryWitness> {
    #[derive(Clone)]
    struct State {
        domain: Interval,
        delta: Rat,
        last: usize,
        word: Vec<usize>,
    }
    let mut queue: VecDeque<State> = VecDeque::new();
    for b in bs.bases() {
        let st = State {
            domain: b.support.clone(),
            delta: b.offset.clone(),
            last: b.id,
            word: vec![b.id],
        };
        if st.delta.is_zero() && !st.domain.is_degenerate() {
            return Some(StationaryWitness {
                word: st.word,
                domain: st.domain,
            });
        }
        queue.push_back(st);
    }
    let mut expansions = 0usize;
    while let Some(st) = queue.pop_front() {
        if st.word.len() >= depth {
            continue;
        }
        let last_partner = bs.base(st.last).map(|b| b.partner).unwrap_or(usize::MAX);
        for b in bs.bases() {
            if b.id == last_partner {
                continue;
            }
            // domain in source coordinates: x with x + delta in supp(b)
            let shifted = b.support.translate(&(-st.delta.clone()));
            let lo = if st.domain.lo > shifted.lo {
                st.domain.lo.clone()
            } else {
                shifted.lo
            };
            let hi = if st.domain.hi < shifted.hi {
                st.domain.hi.clone()
            } else {
                shifted.hi
            };
            if lo >= hi {
                continue;
            }
            let mut word = st.word.clone();
            word.push(b.id);
            let delta = &st.delta + &b.offset;
            let domain = Interval { lo, hi };
            if delta.is_zero() {
                return Some(StationaryWitness { word, domain });
            }
            queue.push_back(State {
                domain,
                delta,
                last: b.id,
                word,
            });
            expansions += 1;
            if expansions > 200_000 {
                return None;
            }
        }
    }
    None
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PositiveExpressionError {
    #[error("old generator {0} admits no positive expression in the new generators")]
    NotPositivelyExpressible(usize),
}

/// True iff some composition of at most `depth` bases carries `from` onto
/// `to` (equal lengths, whole-arc transport at every step).
fn arc_transport(bases: &[&super::Base], from: &Interval, to: &Interval, depth: usize) -> bool {
    if from.length() != to.length() {
        return false;
    }
    if from == to {
        return true;
    }
    let len = from.length();
    let mut seen: BTreeSet<Rat> = BTreeSet::new();
    seen.insert(from.lo.clone());
    let mut frontier = vec![from.lo.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for lo in &frontier {
            let arc = Interval {
                lo: lo.clone(),
                hi: lo + &len,
            };
            for b in bases {
                if b.support.contains_interval(&arc) {
                    let moved = lo + &b.offset;
                    if moved == to.lo {
                        return true;
                    }
                    if seen.insert(moved.clone()) {
                        next.push(moved);
                    }
                }
            }
        }
        if next.is_empty() {
            return false;
        }
        frontier = next;
    }
    false
}

/// Expresses each old generator segment as a positive word in the new
/// generators: a tiling of the old segment by new arcs transported through
/// the identifications of either system. Fails loudly when some old
/// generator has no such expression.
pub fn positive_expression(
    old: &GeneratorSet,
    new: &GeneratorSet,
    bs_old: &BandSystem,
    bs_new: &BandSystem,
    transport_depth: usize,
) -> Result<Vec<Vec<usize>>, PositiveExpressionError> {
    let bands: Vec<&super::Base> = bs_old.bases().iter().chain(bs_new.bases().iter()).collect();
    let mut out = Vec::with_capacity(old.elements.len());
    for g in &old.elements {
        let word = tile_segment(&g.interval, new, &bands, transport_depth)
            .ok_or(PositiveExpressionError::NotPositivelyExpressible(g.id))?;
        out.push(word);
    }
    Ok(out)
}

fn tile_segment(
    target: &Interval,
    new: &GeneratorSet,
    bands: &[&super::Base],
    depth: usize,
) -> Option<Vec<usize>> {
    fn go(
        cur: Rat,
        target: &Interval,
        new: &GeneratorSet,
        bands: &[&super::Base],
        depth: usize,
        dead: &mut BTreeSet<Rat>,
        word: &mut Vec<usize>,
    ) -> bool {
        if cur == target.hi {
            return true;
        }
        if dead.contains(&cur) {
            return false;
        }
        // prefer tiles already in place, so identity derivations express
        // each generator as itself
        let mut candidates: Vec<&GeneratorSegment> = new.elements.iter().collect();
        candidates.sort_by_key(|g| g.interval.lo != cur);
        for g in candidates {
            let len = g.interval.length();
            let end = &cur + &len;
            if len.is_zero() || end > target.hi {
                continue;
            }
            let slot = Interval {
                lo: cur.clone(),
                hi: end.clone(),
            };
            if arc_transport(bands, &g.interval, &slot, depth) {
                word.push(g.id);
                if go(end, target, new, bands, depth, dead, word) {
                    return true;
                }
                word.pop();
            }
        }
        dead.insert(cur);
        false
    }
    let mut word = Vec::new();
    let mut dead = BTreeSet::new();
    go(
        target.lo.clone(),
        target,
        new,
        bands,
        depth,
        &mut dead,
        &mut word,
    )
    .then_some(word)
}

/// Replays expressions: checks that each word's segments telescope to the
/// old segment exactly, with every tile transport-valid. Exact rational
/// endpoint equality, no tolerance.
pub fn replay_expressions(
    old: &GeneratorSet,
    new: &GeneratorSet,
    bs_old: &BandSystem,
    bs_new: &BandSystem,
    expressions: &[Vec<usize>],
    transport_depth: usize,
) -> bool {
    if expressions.len() != old.elements.len() {
        return false;
    }
    let bands: Vec<&super::Base> = bs_old.bases().iter().chain(bs_new.bases().iter()).collect();
    for (g, word) in old.elements.iter().zip(expressions) {
        let mut cur = g.interval.lo.clone();
        for &id in word {
            let arc = match new.elements.iter().find(|n| n.id == id) {
                Some(n) => &n.interval,
                None => return false,
            };
            let end = &cur + &arc.length();
            let slot = Interval {
                lo: cur.clone(),
                hi: end.clone(),
            };
            if !arc_transport(&bands, arc, &slot, transport_depth) {
                return false;
            }
            cur = end;
        }
        if cur != g.interval.hi {
            return false;
        }
    }
    true
}
