//! The interval moves: isolated-base removal, semi-isolated trimming,
//! interior splitting, double-cover removal, the entire transformation, and
//! the positive-side Dehn twist. Every move takes an immutable system and
//! returns a new validated one.

use super::{coverage_profile, free_arcs_of, BandError, BandSystem, Base, Interval, Rat};

fn remove_pair(bs: &mut BandSystem, id: usize) -> Result<(), BandError> {
    let partner = bs.base(id)?.partner;
    bs.bases_mut().retain(|b| b.id != id && b.id != partner);
    Ok(())
}

/// Move (1): removes the pair of an isolated base, one whose interior cuts
/// no other base. The pair count drops by 1.
pub fn move_remove_isolated(bs: &BandSystem, base_id: usize) -> Result<BandSystem, BandError> {
    let base = bs.base(base_id)?;
    let others_overlap = bs
        .bases()
        .iter()
        .any(|c| c.id != base_id && c.support.interiors_overlap(&base.support));
    if others_overlap {
        return Err(BandError::NotIsolated(base_id));
    }
    let mut out = bs.clone();
    remove_pair(&mut out, base_id)?;
    out.cleanup_components();
    out.validate()?;
    Ok(out)
}

/// Move (2): erases a once-covered subinterval that lies inside a base and
/// contains exactly one of its endpoints; base and partner shrink
/// correspondingly. Base-pair count is unchanged.
pub fn move_trim_semi_isolated(bs: &BandSystem, sub: &Interval) -> Result<BandSystem, BandError> {
    if sub.is_degenerate() {
        return Err(BandError::PreconditionViolated(
            "subinterval is degenerate".into(),
        ));
    }
    let profile = coverage_profile(bs);
    if profile.multiplicity_over(sub) != Some(1) {
        return Err(BandError::PreconditionViolated(
            "subinterval is not covered exactly once".into(),
        ));
    }
    let covering: Vec<&Base> = bs
        .bases()
        .iter()
        .filter(|b| b.support.contains_interval(sub))
        .collect();
    let base = match covering.as_slice() {
        [b] => *b,
        _ => {
            return Err(BandError::PreconditionViolated(
                "subinterval is not inside a unique base".into(),
            ))
        }
    };
    let at_lo = sub.lo == base.support.lo;
    let at_hi = sub.hi == base.support.hi;
    if at_lo && at_hi {
        return Err(BandError::PreconditionViolated(
            "subinterval is the whole base; remove the isolated base instead".into(),
        ));
    }
    if !at_lo && !at_hi {
        return Err(BandError::PreconditionViolated(
            "subinterval is interior to the base; that is the splitting move".into(),
        ));
    }
    let base_id = base.id;
    let partner_id = base.partner;
    let offset = base.offset.clone();
    let new_support = if at_lo {
        Interval {
            lo: sub.hi.clone(),
            hi: base.support.hi.clone(),
        }
    } else {
        Interval {
            lo: base.support.lo.clone(),
            hi: sub.lo.clone(),
        }
    };
    let new_partner_support = new_support.translate(&offset);
    let mut out = bs.clone();
    for b in out.bases_mut() {
        if b.id == base_id {
            b.support = new_support.clone();
        } else if b.id == partner_id {
            b.support = new_partner_support.clone();
        }
    }
    out.cleanup_components();
    out.validate()?;
    Ok(out)
}

/// Move (3): erases a once-covered subinterval interior to a base, cutting
/// the pair into two pairs around it. Pair count increases by 1.
pub fn move_split_interior(bs: &BandSystem, sub: &Interval) -> Result<BandSystem, BandError> {
    if sub.is_degenerate() {
        return Err(BandError::PreconditionViolated(
            "subinterval is degenerate".into(),
        ));
    }
    let profile = coverage_profile(bs);
    if profile.multiplicity_over(sub) != Some(1) {
        return Err(BandError::PreconditionViolated(
            "subinterval is not covered exactly once".into(),
        ));
    }
    let base = bs
        .bases()
        .iter()
        .find(|b| b.support.lo < sub.lo && sub.hi < b.support.hi)
        .ok_or_else(|| {
            BandError::PreconditionViolated("subinterval is not interior to any base".into())
        })?
        .clone();
    let mut out = bs.clone();
    remove_pair(&mut out, base.id)?;
    let left = Interval {
        lo: base.support.lo.clone(),
        hi: sub.lo.clone(),
    };
    let right = Interval {
        lo: sub.hi.clone(),
        hi: base.support.hi.clone(),
    };
    for part in [left, right] {
        let a = out.fresh_id();
        let b = out.fresh_id();
        let translated = part.translate(&base.offset);
        out.bases_mut().push(Base {
            id: a,
            support: part,
            partner: b,
            offset: base.offset.clone(),
        });
        out.bases_mut().push(Base {
            id: b,
            support: translated,
            partner: a,
            offset: -base.offset.clone(),
        });
    }
    out.cleanup_components();
    out.validate()?;
    Ok(out)
}

/// Move (4): a subinterval supporting exactly two bases whose supports both
/// equal it. Partners get erased together; otherwise their former partners
/// are re-paired through the composed translation. Pair count drops by 1.
pub fn move_remove_double(bs: &BandSystem, sub: &Interval) -> Result<BandSystem, BandError> {
    if sub.is_degenerate() {
        return Err(BandError::PreconditionViolated(
            "subinterval is degenerate".into(),
        ));
    }
    let exact: Vec<&Base> = bs.bases().iter().filter(|b| b.support == *sub).collect();
    if exact.len() != 2 {
        return Err(BandError::PreconditionViolated(format!(
            "{} bases have the subinterval as their exact support (need 2)",
            exact.len()
        )));
    }
    let profile = coverage_profile(bs);
    if profile.multiplicity_over(sub) != Some(2) {
        return Err(BandError::PreconditionViolated(
            "subinterval is not covered exactly twice".into(),
        ));
    }
    let (b1, b2) = (exact[0].clone(), exact[1].clone());
    let mut out = bs.clone();
    if b1.partner == b2.id {
        remove_pair(&mut out, b1.id)?;
    } else {
        let q1 = b1.partner;
        let q2 = b2.partner;
        let composed = &b2.offset - &b1.offset; // q1 -> sub -> q2
                                                // only the two bases on the subinterval are erased; their former
                                                // partners survive and get re-paired
        out.bases_mut().retain(|b| b.id != b1.id && b.id != b2.id);
        for b in out.bases_mut() {
            if b.id == q1 {
                b.partner = q2;
                b.offset = composed.clone();
            } else if b.id == q2 {
                b.partner = q1;
                b.offset = -composed.clone();
            }
        }
    }
    out.cleanup_components();
    out.validate()?;
    Ok(out)
}

/// Cuts the pair of `base_id` at interior point `x` of its support,
/// producing two pairs that together carry the same identification.
pub fn cut_base_at(bs: &BandSystem, base_id: usize, x: &Rat) -> Result<BandSystem, BandError> {
    let base = bs.base(base_id)?.clone();
    if !(&base.support.lo < x && x < &base.support.hi) {
        return Err(BandError::PreconditionViolated(format!(
            "cut point {x} is not interior to base {base_id}"
        )));
    }
    let mut out = bs.clone();
    remove_pair(&mut out, base.id)?;
    let left = Interval {
        lo: base.support.lo.clone(),
        hi: x.clone(),
    };
    let right = Interval {
        lo: x.clone(),
        hi: base.support.hi.clone(),
    };
    for part in [left, right] {
        let a = out.fresh_id();
        let b = out.fresh_id();
        let translated = part.translate(&base.offset);
        out.bases_mut().push(Base {
            id: a,
            support: part,
            partner: b,
            offset: base.offset.clone(),
        });
        out.bases_mut().push(Base {
            id: b,
            support: translated,
            partner: a,
            offset: -base.offset.clone(),
        });
    }
    out.validate()?;
    Ok(out)
}

/// Makanin's entire transformation over a carrier base: every base fragment
/// supported inside the carrier is translated onto the carrier's partner
/// support and re-offset, the carrier pair is then removed (its support has
/// become free). A carrier with an empty overlap set is the identity.
pub fn entire_transformation(bs: &BandSystem, carrier_id: usize) -> Result<BandSystem, BandError> {
    let carrier = bs.base(carrier_id)?.clone();
    let partner_id = carrier.partner;
    let partner = bs.base(partner_id)?.clone();
    if carrier.support.interiors_overlap(&partner.support) {
        return Err(BandError::PreconditionViolated(
            "carrier overlaps its own partner; periodic region".into(),
        ));
    }
    let region = carrier.support.clone();
    let offset = carrier.offset.clone();

    let overlaps = bs
        .bases()
        .iter()
        .any(|c| c.id != carrier_id && c.id != partner_id && c.support.interiors_overlap(&region));
    if !overlaps {
        return Ok(bs.clone());
    }

    // cut every other base at the carrier's boundary points until no base
    // crosses them
    let mut out = bs.clone();
    loop {
        let mut cut_at: Option<(usize, Rat)> = None;
        for b in out.bases() {
            if b.id == carrier_id || b.id == partner_id {
                continue;
            }
            for x in [&region.lo, &region.hi] {
                if &b.support.lo < x && x < &b.support.hi {
                    cut_at = Some((b.id, x.clone()));
                    break;
                }
            }
            if cut_at.is_some() {
                break;
            }
        }
        match cut_at {
            Some((id, x)) => out = cut_base_at(&out, id, &x)?,
            None => break,
        }
    }

    // translate pairs into the partner region
    let inside = |support: &Interval| region.contains_interval(support);
    let pair_list = out.pairs();
    for (a_id, b_id) in pair_list {
        if a_id == carrier_id || b_id == carrier_id || a_id == partner_id || b_id == partner_id {
            continue;
        }
        let a_in = inside(&out.base(a_id)?.support);
        let b_in = inside(&out.base(b_id)?.support);
        if !a_in && !b_in {
            continue;
        }
        for base in out.bases_mut() {
            if base.id == a_id || base.id == b_id {
                let this_in = if base.id == a_id { a_in } else { b_in };
                let other_in = if base.id == a_id { b_in } else { a_in };
                if this_in {
                    base.support = base.support.translate(&offset);
                }
                match (this_in, other_in) {
                    (true, true) => {}
                    (true, false) => base.offset = &base.offset - &offset,
                    (false, true) => base.offset = &base.offset + &offset,
                    (false, false) => unreachable!(),
                }
            }
        }
    }

    remove_pair(&mut out, carrier_id)?;
    out.cleanup_components();
    out.validate()?;
    Ok(out)
}

/// The positive-side Dehn twist at the positive endpoint of the first
/// component: the shorter of the two bases ending there carries the top
/// fragment of the longer one onto its partner, and its own pair is erased.
/// The supporting interval shrinks by the shorter base's length.
pub fn dehn_twist_positive_end(bs: &BandSystem) -> Result<BandSystem, BandError> {
    let runs = super::covered_runs(bs);
    let pv = runs
        .last()
        .ok_or_else(|| BandError::PreconditionViolated("empty system".into()))?
        .hi
        .clone();
    let tops: Vec<&Base> = bs.bases().iter().filter(|b| b.support.hi == pv).collect();
    if tops.len() != 2 {
        return Err(BandError::PreconditionViolated(format!(
            "{} bases end at the positive endpoint (need exactly 2)",
            tops.len()
        )));
    }
    let (long, short) = match tops[0].support.length().cmp(&tops[1].support.length()) {
        std::cmp::Ordering::Greater => (tops[0].clone(), tops[1].clone()),
        std::cmp::Ordering::Less => (tops[1].clone(), tops[0].clone()),
        std::cmp::Ordering::Equal => return Err(BandError::DegenerateOverlap),
    };
    if long.partner == short.id {
        return Err(BandError::PreconditionViolated(
            "the two bases at the positive end are partners".into(),
        ));
    }
    let twist_region = short.support.clone();
    let profile = coverage_profile(bs);
    if profile.multiplicity_over(&twist_region) != Some(2) {
        return Err(BandError::PreconditionViolated(
            "the twist region is not covered exactly twice".into(),
        ));
    }
    let short_partner = bs.base(short.partner)?.clone();
    if short_partner.support.interiors_overlap(&twist_region) {
        return Err(BandError::PreconditionViolated(
            "short base overlaps its own partner; periodic region".into(),
        ));
    }

    // cut the long base at the twist boundary, transfer the top fragment
    // through the short band, then erase the short pair
    let cut = cut_base_at(bs, long.id, &twist_region.lo)?;
    let top = cut
        .bases()
        .iter()
        .find(|b| b.support == twist_region && b.id != short.id)
        .ok_or_else(|| BandError::PreconditionViolated("cut produced no top fragment".into()))?
        .clone();
    let mut out = cut.clone();
    let o2 = short.offset.clone();
    for base in out.bases_mut() {
        if base.id == top.id {
            base.support = base.support.translate(&o2);
            base.offset = &base.offset - &o2;
        } else if base.id == top.partner {
            base.offset = &base.offset + &o2;
        }
    }
    remove_pair(&mut out, short.id)?;
    out.cleanup_components();
    out.validate()?;
    Ok(out)
}

/// Classifier used by the machine: the kind of free arc a base carries.
pub(crate) enum FreeArcKind {
    Whole,
    EndSegment(Interval),
    Interior(Interval),
}

pub(crate) fn classify_free_arcs(bs: &BandSystem) -> Vec<(usize, FreeArcKind)> {
    let profile = coverage_profile(bs);
    let mut out = Vec::new();
    for base in bs.bases() {
        for arc in free_arcs_of(bs, &profile, base) {
            if arc == base.support {
                out.push((base.id, FreeArcKind::Whole));
            } else if arc.lo == base.support.lo || arc.hi == base.support.hi {
                out.push((base.id, FreeArcKind::EndSegment(arc)));
            } else {
                out.push((base.id, FreeArcKind::Interior(arc)));
            }
        }
    }
    out
}
