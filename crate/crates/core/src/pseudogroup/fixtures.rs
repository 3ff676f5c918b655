//! Bundled band systems used by tests, the CLI examples, and the
//! acceptance suite, plus a seeded random system generator.

use super::{coverage_profile, free_arcs_of, rat, BandSystem, Base, Interval, Rat};
use crate::rng::SplitMix64;

fn iv(lo: Rat, hi: Rat) -> Interval {
    Interval::new(lo, hi).expect("fixture interval")
}

fn pair(id: usize, support: Interval, offset: Rat) -> [Base; 2] {
    let translated = support.translate(&offset);
    [
        Base {
            id,
            support,
            partner: id + 1,
            offset: offset.clone(),
        },
        Base {
            id: id + 1,
            support: translated,
            partner: id,
            offset: -offset,
        },
    ]
}

fn system(components: Vec<Interval>, pairs: Vec<[Base; 2]>) -> BandSystem {
    let bases = pairs.into_iter().flatten().collect();
    BandSystem::new(components, bases, vec![]).expect("fixture must validate")
}

/// F1: three pairs on one component; base 0 is isolated.
pub fn fixture_f1() -> BandSystem {
    system(
        vec![iv(rat(0, 1), rat(10, 1))],
        vec![
            pair(0, iv(rat(0, 1), rat(2, 1)), rat(5, 1)),
            pair(2, iv(rat(4, 1), rat(6, 1)), rat(2, 1)),
            pair(4, iv(rat(7, 1), rat(9, 1)), rat(-4, 1)),
        ],
    )
}

/// F2: the prefix `[0,2]` of base 0 is once-covered and trimmable.
pub fn fixture_f2() -> BandSystem {
    system(
        vec![iv(rat(0, 1), rat(8, 1))],
        vec![
            pair(0, iv(rat(0, 1), rat(3, 1)), rat(4, 1)),
            pair(2, iv(rat(2, 1), rat(5, 1)), rat(3, 1)),
        ],
    )
}

/// F3: `[2,4]` is once-covered and interior to base 0; the split's partner
/// side stays covered by base 4's pair.
pub fn fixture_f3() -> BandSystem {
    system(
        vec![iv(rat(0, 1), rat(13, 1))],
        vec![
            pair(0, iv(rat(0, 1), rat(6, 1)), rat(7, 1)),
            pair(2, iv(rat(0, 1), rat(2, 1)), rat(4, 1)),
            pair(4, iv(rat(9, 1), rat(13, 1)), rat(-9, 2)),
        ],
    )
}

/// F4: `[2,3]` carries exactly two unpartnered bases with that exact support.
pub fn fixture_f4() -> BandSystem {
    system(
        vec![iv(rat(0, 1), rat(10, 1))],
        vec![
            pair(0, iv(rat(2, 1), rat(3, 1)), rat(3, 1)),
            pair(2, iv(rat(2, 1), rat(3, 1)), rat(5, 1)),
        ],
    )
}

/// F4 variant: the two bases on `[2,3]` are partners (an identity band).
pub fn fixture_f4_partnered() -> BandSystem {
    system(
        vec![iv(rat(0, 1), rat(10, 1))],
        vec![
            pair(0, iv(rat(2, 1), rat(3, 1)), rat(0, 1)),
            pair(2, iv(rat(5, 1), rat(6, 1)), rat(1, 1)),
        ],
    )
}

/// F5: carrier `[0,4] -> [6,10]` with one base inside and one crossing its
/// boundary; exercises cutting and two-sided transfer.
pub fn fixture_f5() -> BandSystem {
    system(
        vec![iv(rat(0, 1), rat(10, 1))],
        vec![
            pair(0, iv(rat(0, 1), rat(4, 1)), rat(6, 1)),
            pair(2, iv(rat(1, 1), rat(3, 1)), rat(4, 1)),
            pair(4, iv(rat(2, 1), rat(6, 1)), rat(1, 1)),
        ],
    )
}

/// F6: four pairs whose machine trace runs for dozens of rounds before
/// halting, exercising trims, splits, and double removals.
pub fn fixture_f6() -> BandSystem {
    system(
        vec![iv(rat(0, 1), rat(4, 1))],
        vec![
            pair(0, iv(rat(15, 32), rat(37, 32)), rat(19, 32)),
            pair(2, iv(rat(55, 32), rat(71, 32)), rat(-7, 32)),
            pair(4, iv(rat(35, 16), rat(49, 16)), rat(1, 32)),
            pair(6, iv(rat(9, 32), rat(9, 8)), rat(-1, 32)),
        ],
    )
}

/// F7: the rotation by 144/377 on `[0,1]` as a two-band system. Positive-side
/// Dehn twists walk the Fibonacci continued fraction for ten iterations
/// before the lengths tie.
pub fn fixture_f7() -> BandSystem {
    let alpha = rat(144, 377);
    let one = rat(1, 1);
    let beta = &one - &alpha; // 233/377
    system(
        vec![iv(rat(0, 1), rat(1, 1))],
        vec![
            pair(0, iv(rat(0, 1), beta.clone()), alpha.clone()),
            pair(2, iv(beta, one), -rat(233, 377)),
        ],
    )
}

/// Seeded random valid band system: at most `max_pairs` pairs on one
/// component, endpoints with denominators dividing `denom`. Systems with a
/// floating pair (both supports entirely once-covered full runs) or with a
/// tree component in the associated graph (positive component Euler
/// characteristic) are rejected and regenerated.
pub fn random_band_system(rng: &mut SplitMix64, max_pairs: usize, denom: i64) -> BandSystem {
    loop {
        let comp_len = 4 * denom; // component [0, 4] in units of 1/denom
        let comp = iv(rat(0, 1), rat(4, 1));
        let n_pairs = 2 + rng.below(max_pairs.saturating_sub(1).max(1) as u64) as usize;
        let mut pairs = Vec::new();
        let mut ok = true;
        for k in 0..n_pairs {
            let len = 1 + rng.below((comp_len / 4) as u64) as i64;
            let lo = rng.below((comp_len - len) as u64 + 1) as i64;
            let max_off = comp_len - len - lo;
            let min_off = -lo;
            if max_off < min_off {
                ok = false;
                break;
            }
            let off = rng.range_i64(min_off, max_off);
            pairs.push(pair(
                2 * k,
                iv(rat(lo, denom), rat(lo + len, denom)),
                rat(off, denom),
            ));
        }
        if !ok {
            continue;
        }
        let bases: Vec<Base> = pairs.into_iter().flatten().collect();
        let bs = match BandSystem::new(vec![comp], bases, vec![]) {
            Ok(bs) => bs,
            Err(_) => continue,
        };
        if has_floating_pair(&bs) || has_tree_component(&bs) {
            continue;
        }
        return bs;
    }
}

/// True iff some connected component of the associated graph is a tree
/// (vertices minus edges positive within the component).
pub(crate) fn has_tree_component(bs: &BandSystem) -> bool {
    let graph = super::associated_graph(bs);
    let n = graph.vertices.len();
    if n == 0 {
        return false;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for &(_, a, b) in &graph.edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[rb] = ra;
        }
    }
    let mut vertices = vec![0i64; n];
    let mut edges = vec![0i64; n];
    for v in 0..n {
        let r = find(&mut parent, v);
        vertices[r] += 1;
    }
    for &(_, a, _) in &graph.edges {
        let r = find(&mut parent, a);
        edges[r] += 1;
    }
    (0..n).any(|r| vertices[r] > 0 && vertices[r] - edges[r] > 0)
}

/// A pair both of whose supports are whole once-covered free arcs.
pub(crate) fn has_floating_pair(bs: &BandSystem) -> bool {
    let profile = coverage_profile(bs);
    let whole_free = |id: usize| -> bool {
        let b = bs.base(id).unwrap();
        free_arcs_of(bs, &profile, b).contains(&b.support)
    };
    bs.pairs()
        .iter()
        .any(|&(a, b)| whole_free(a) && whole_free(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_validate() {
        for bs in [
            fixture_f1(),
            fixture_f2(),
            fixture_f3(),
            fixture_f4(),
            fixture_f4_partnered(),
            fixture_f5(),
            fixture_f6(),
            fixture_f7(),
        ] {
            bs.validate().unwrap();
        }
    }

    #[test]
    fn random_systems_validate_and_avoid_floaters() {
        let mut rng = SplitMix64::new(99);
        for _ in 0..20 {
            let bs = random_band_system(&mut rng, 6, 64);
            bs.validate().unwrap();
            assert!(!has_floating_pair(&bs));
            assert!(bs.pair_count() <= 6);
        }
    }
}
