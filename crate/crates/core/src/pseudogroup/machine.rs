//! The machine scheduler: applies moves (1) and (4) as long as possible,
//! then (2) as long as possible, then a single (3); each `rips_step` fires
//! the highest-priority applicable move and records it.

use super::moves::{classify_free_arcs, FreeArcKind};
use super::{
    associated_graph, move_remove_double, move_remove_isolated, move_split_interior,
    move_trim_semi_isolated, total_base_length, BandSystem, Interval, Rat,
};

/// What a step did. `Terminal` reports a halted machine;
/// `rational_degeneration` distinguishes full collapse (every base erased,
/// which a true Levitt system never reaches — it is an artifact of rational
/// input data) from an honest halt with bases left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MoveKind {
    RemoveIsolated { base: usize },
    RemoveDouble { subinterval: Interval },
    TrimSemiIsolated { subinterval: Interval },
    SplitInterior { subinterval: Interval },
    EntireTransformation { carrier: usize },
    DehnTwistPositiveEnd,
    Terminal { rational_degeneration: bool },
}

impl MoveKind {
    pub fn is_terminal(&self) -> bool {
        matches!(self, MoveKind::Terminal { .. })
    }
}

/// Trace record for one step: the move, Euler characteristics on both
/// sides, and the total base length after the move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveRecord {
    pub kind: MoveKind,
    pub chi_before: i64,
    pub chi_after: i64,
    pub total_length: Rat,
}

/// Applies the highest-priority applicable move and reports it; an
/// unchanged system with a `Terminal` record means the machine halted.
pub fn rips_step(bs: &BandSystem) -> (BandSystem, MoveRecord) {
    let chi_before = associated_graph(bs).euler_characteristic;
    let arcs = classify_free_arcs(bs);

    // priority 1: isolated bases, smallest id. A pair both of whose sides
    // are whole once-covered runs in different runs is skipped: erasing it
    // is the one removal that lowers the graph's vertex-minus-edge count,
    // and it carries no dynamics the machine needs to unfold. A state whose
    // only candidate moves are such erasures halts as a rational
    // degeneration.
    let whole: std::collections::BTreeSet<usize> = arcs
        .iter()
        .filter_map(|(id, kind)| matches!(kind, FreeArcKind::Whole).then_some(*id))
        .collect();
    let runs = super::covered_runs(bs);
    let run_of = |id: usize| -> Option<usize> {
        let b = bs.base(id).ok()?;
        runs.iter().position(|r| r.contains_interval(&b.support))
    };
    let isolated = whole
        .iter()
        .copied()
        .filter(|&id| {
            let partner = bs.base(id).map(|b| b.partner).unwrap_or(id);
            let separated_floater = whole.contains(&partner) && run_of(id) != run_of(partner);
            !separated_floater
        })
        .min();
    if let Some(id) = isolated {
        let next = move_remove_isolated(bs, id).expect("classified isolated base must remove");
        return finish(next, MoveKind::RemoveIsolated { base: id }, chi_before);
    }

    // priority 1 continued: double-covered identical supports, leftmost
    let mut doubles: Vec<Interval> = Vec::new();
    for b in bs.bases() {
        for c in bs.bases() {
            if b.id < c.id && b.support == c.support {
                doubles.push(b.support.clone());
            }
        }
    }
    doubles.sort();
    for sub in doubles {
        if let Ok(next) = move_remove_double(bs, &sub) {
            return finish(
                next,
                MoveKind::RemoveDouble { subinterval: sub },
                chi_before,
            );
        }
    }

    // priority 2: semi-isolated trims, leftmost arc
    let mut trims: Vec<Interval> = arcs
        .iter()
        .filter_map(|(_, kind)| match kind {
            FreeArcKind::EndSegment(arc) => Some(arc.clone()),
            _ => None,
        })
        .collect();
    trims.sort();
    if let Some(sub) = trims.into_iter().next() {
        let next = move_trim_semi_isolated(bs, &sub).expect("classified trim must apply");
        return finish(
            next,
            MoveKind::TrimSemiIsolated { subinterval: sub },
            chi_before,
        );
    }

    // priority 3: one interior split, leftmost in the first component
    let mut splits: Vec<Interval> = arcs
        .iter()
        .filter_map(|(_, kind)| match kind {
            FreeArcKind::Interior(arc) => Some(arc.clone()),
            _ => None,
        })
        .collect();
    splits.sort();
    if let Some(sub) = splits.into_iter().next() {
        let next = move_split_interior(bs, &sub).expect("classified split must apply");
        return finish(
            next,
            MoveKind::SplitInterior { subinterval: sub },
            chi_before,
        );
    }

    let record = MoveRecord {
        kind: MoveKind::Terminal {
            rational_degeneration: bs.bases().is_empty(),
        },
        chi_before,
        chi_after: chi_before,
        total_length: total_base_length(bs),
    };
    (bs.clone(), record)
}

fn finish(next: BandSystem, kind: MoveKind, chi_before: i64) -> (BandSystem, MoveRecord) {
    let chi_after = associated_graph(&next).euler_characteristic;
    let total_length = total_base_length(&next);
    (
        next,
        MoveRecord {
            kind,
            chi_before,
            chi_after,
            total_length,
        },
    )
}

/// Steps the machine until terminal or the step budget runs out.
pub fn run_machine(bs: &BandSystem, max_steps: usize) -> (BandSystem, Vec<MoveRecord>) {
    let mut cur = bs.clone();
    let mut trace = Vec::new();
    for _ in 0..max_steps {
        let (next, record) = rips_step(&cur);
        let terminal = record.kind.is_terminal();
        trace.push(record);
        cur = next;
        if terminal {
            break;
        }
    }
    (cur, trace)
}
