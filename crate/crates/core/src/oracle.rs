//! Ground-truth solution enumeration at bounded length.
//!
//! Two independent strategies that must agree: a direct product enumeration
//! over all tuples of bounded nonempty coefficient words, and a Levi-style
//! case split on the first symbols of each equation. Every [`SolutionSet`]
//! is canonically ordered (variables in alphabet order, images compared
//! shortlex), so identical inputs give identical output bytes downstream.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::systems::{is_solution, EquationSystem, Substitution};
use crate::words::{concat, primitive_root, PositiveWord, SymbolId};

/// Bounds on the search: per-variable image length, solution cap, node cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_len: usize,
    pub max_solutions: usize,
    pub max_nodes: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BudgetError {
    #[error("all budget bounds must be >= 1")]
    NonPositiveBound,
}

impl SearchBudget {
    pub fn new(
        max_len: usize,
        max_solutions: usize,
        max_nodes: usize,
    ) -> Result<Self, BudgetError> {
        if max_len == 0 || max_solutions == 0 || max_nodes == 0 {
            return Err(BudgetError::NonPositiveBound);
        }
        Ok(SearchBudget {
            max_len,
            max_solutions,
            max_nodes,
        })
    }
}

/// A canonically ordered, duplicate-free set of verified solutions.
/// `complete` is false when a budget cap was hit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    pub solutions: Vec<Substitution>,
    pub complete: bool,
}

impl SolutionSet {
    fn from_set(set: BTreeSet<Substitution>, complete: bool) -> Self {
        SolutionSet {
            solutions: set.into_iter().collect(),
            complete,
        }
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }
}

/// Search aborted by a cap; carries what was found so far.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("search budget exceeded ({partial} partial solutions kept)", partial = .0.solutions.len())]
pub struct BudgetExceeded(pub SolutionSet);

/// All nonempty coefficient words of length `1..=max_len`, shortlex order.
fn words_up_to(coefficients: &[SymbolId], max_len: usize) -> Vec<PositiveWord> {
    let mut out = Vec::new();
    let mut layer: Vec<PositiveWord> = vec![PositiveWord::empty()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * coefficients.len());
        for w in &layer {
            for &c in coefficients {
                let mut extended = w.clone();
                extended.push(c);
                next.push(extended);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Direct product enumeration: tries every assignment of bounded nonempty
/// words to the system's variables and keeps those satisfying the system.
pub fn enumerate_exhaustive(
    sys: &EquationSystem,
    budget: &SearchBudget,
) -> Result<SolutionSet, BudgetExceeded> {
    let vars = sys.used_variables();
    let words = words_up_to(sys.alphabet().coefficients(), budget.max_len);
    let mut found: BTreeSet<Substitution> = BTreeSet::new();
    let mut nodes: usize = 0;

    let mut indices = vec![0usize; vars.len()];
    loop {
        nodes += 1;
        if nodes > budget.max_nodes {
            return Err(BudgetExceeded(SolutionSet::from_set(found, false)));
        }
        let mut s = Substitution::new();
        for (vi, &v) in vars.iter().enumerate() {
            s.bind(v, words[indices[vi]].clone());
        }
        if is_solution(&s, sys).unwrap_or(false) {
            found.insert(s);
            if found.len() >= budget.max_solutions {
                return Err(BudgetExceeded(SolutionSet::from_set(found, false)));
            }
        }
        // next tuple
        let mut i = 0;
        loop {
            if i == vars.len() {
                return Ok(SolutionSet::from_set(found, true));
            }
            indices[i] += 1;
            if indices[i] < words.len() {
                break;
            }
            indices[i] = 0;
            i += 1;
        }
    }
}

/// Symbols of the Levi search: coefficients from the system plus fresh
/// suffix variables created by the splitting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum LSym {
    Coeff(SymbolId),
    Var(usize),
}

#[derive(Clone, Debug)]
struct LeviState {
    equations: Vec<(Vec<LSym>, Vec<LSym>)>,
    /// image of each original variable as a word over coefficients and live variables
    images: Vec<Vec<LSym>>,
    /// remaining length capacity per live variable (by var index)
    caps: BTreeMap<usize, usize>,
}

impl LeviState {
    fn substitute_var(&mut self, var: usize, replacement: &[LSym]) {
        let subst = |word: &mut Vec<LSym>| {
            let mut out = Vec::with_capacity(word.len());
            for &s in word.iter() {
                match s {
                    LSym::Var(v) if v == var => out.extend_from_slice(replacement),
                    other => out.push(other),
                }
            }
            *word = out;
        };
        for (lhs, rhs) in &mut self.equations {
            subst(lhs);
            subst(rhs);
        }
        for img in &mut self.images {
            subst(img);
        }
        self.caps.remove(&var);
    }
}

enum Normalized {
    Dead,
    Ok,
}

/// Strips matched prefixes and applies count-based feasibility pruning.
fn normalize(state: &mut LeviState) -> Normalized {
    let mut changed = true;
    while changed {
        changed = false;
        let mut keep = Vec::new();
        for (mut lhs, mut rhs) in state.equations.drain(..) {
            let mut i = 0;
            let max = lhs.len().min(rhs.len());
            while i < max && lhs[i] == rhs[i] {
                i += 1;
            }
            if i > 0 {
                lhs.drain(..i);
                rhs.drain(..i);
                changed = true;
            }
            match (lhs.is_empty(), rhs.is_empty()) {
                (true, true) => continue,
                (true, false) | (false, true) => return Normalized::Dead,
                (false, false) => {
                    // after stripping, equal coefficient heads are impossible
                    if let (LSym::Coeff(a), LSym::Coeff(b)) = (lhs[0], rhs[0]) {
                        debug_assert_ne!(a, b);
                        return Normalized::Dead;
                    }
                    keep.push((lhs, rhs));
                }
            }
        }
        state.equations = keep;
    }
    // Length and per-letter count feasibility: for each equation the
    // difference of attainable counts must contain zero for every length
    // assignment 1 <= |v| <= cap(v).
    for (lhs, rhs) in &state.equations {
        if !counts_feasible(lhs, rhs, &state.caps) {
            return Normalized::Dead;
        }
    }
    Normalized::Ok
}

fn counts_feasible(lhs: &[LSym], rhs: &[LSym], caps: &BTreeMap<usize, usize>) -> bool {
    // total length interval
    let mut const_diff: i64 = 0;
    let mut var_diff: BTreeMap<usize, i64> = BTreeMap::new();
    let mut coeff_diff: BTreeMap<SymbolId, i64> = BTreeMap::new();
    for (&side, sign) in [(lhs, 1i64), (rhs, -1i64)].iter().map(|(s, g)| (s, *g)) {
        for &sym in side {
            match sym {
                LSym::Coeff(c) => {
                    const_diff += sign;
                    *coeff_diff.entry(c).or_insert(0) += sign;
                }
                LSym::Var(v) => *var_diff.entry(v).or_insert(0) += sign,
            }
        }
    }
    // Each |v| ranges over [1, cap]; the reachable interval of
    // const_diff + sum d_v * |v| must contain 0.
    let mut lo = const_diff;
    let mut hi = const_diff;
    for (&v, &d) in &var_diff {
        let cap = *caps.get(&v).unwrap_or(&1) as i64;
        if d > 0 {
            lo += d;
            hi += d * cap;
        } else if d < 0 {
            lo += d * cap;
            hi += d;
        }
    }
    if lo > 0 || hi < 0 {
        return false;
    }
    // Per coefficient letter: counts n_{v,c} range over [0, cap].
    for &cd in coeff_diff.values() {
        let mut lo = cd;
        let mut hi = cd;
        for (&v, &d) in &var_diff {
            let cap = *caps.get(&v).unwrap_or(&1) as i64;
            if d > 0 {
                hi += d * cap;
            } else if d < 0 {
                lo += d * cap;
            }
        }
        if lo > 0 || hi < 0 {
            return false;
        }
    }
    true
}

/// Levi-splitting enumeration. Case-splits the first symbols of the first
/// unresolved equation, substituting prefixes, and enumerates completions of
/// the free variables at the leaves. Agrees with [`enumerate_exhaustive`]
/// on every budget.
pub fn enumerate_levi(
    sys: &EquationSystem,
    budget: &SearchBudget,
) -> Result<SolutionSet, BudgetExceeded> {
    let vars = sys.used_variables();
    let var_index: BTreeMap<SymbolId, usize> =
        vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    let to_lsym = |w: &PositiveWord| -> Vec<LSym> {
        w.letters()
            .iter()
            .map(|&id| match var_index.get(&id) {
                Some(&v) => LSym::Var(v),
                None => LSym::Coeff(id),
            })
            .collect()
    };

    let mut root = LeviState {
        equations: sys
            .equations()
            .iter()
            .map(|eq| {
                let (l, r) = eq.stripped();
                (to_lsym(l), to_lsym(r))
            })
            .filter(|(l, r)| !(l.is_empty() && r.is_empty()))
            .collect(),
        images: (0..vars.len()).map(|v| vec![LSym::Var(v)]).collect(),
        caps: (0..vars.len()).map(|v| (v, budget.max_len)).collect(),
    };
    let mut found: BTreeSet<Substitution> = BTreeSet::new();
    let mut nodes: usize = 0;
    let mut next_var = vars.len();

    {
        let mut stack = Vec::new();
        match normalize(&mut root) {
            Normalized::Dead => {}
            Normalized::Ok => stack.push(root),
        }
        while let Some(state) = stack.pop() {
            nodes += 1;
            if nodes > budget.max_nodes {
                return Err(BudgetExceeded(SolutionSet::from_set(found, false)));
            }
            if state.equations.is_empty() {
                if complete_leaf(sys, &vars, &state, budget, &mut found).is_err() {
                    return Err(BudgetExceeded(SolutionSet::from_set(found, false)));
                }
                continue;
            }
            let (lhs, rhs) = &state.equations[0];
            let mut fresh = || {
                let v = next_var;
                next_var += 1;
                v
            };
            // (variable to replace, replacement, fresh suffix id and capacity)
            type Branch = (usize, Vec<LSym>, Option<(usize, usize)>);
            let branches: Vec<Branch> = match (lhs[0], rhs[0]) {
                (LSym::Coeff(_), LSym::Coeff(_)) => {
                    // normalize() strips equal heads and kills unequal ones
                    unreachable!("normalized state has no coefficient/coefficient head")
                }
                (LSym::Var(x), LSym::Coeff(a)) | (LSym::Coeff(a), LSym::Var(x)) => {
                    let cap = state.caps[&x];
                    let mut bs: Vec<Branch> = vec![(x, vec![LSym::Coeff(a)], None)];
                    if cap >= 2 {
                        let s = fresh();
                        bs.push((x, vec![LSym::Coeff(a), LSym::Var(s)], Some((s, cap - 1))));
                    }
                    bs
                }
                (LSym::Var(x), LSym::Var(y)) => {
                    debug_assert_ne!(x, y, "equal heads are stripped by normalize");
                    let cap_x = state.caps[&x];
                    let cap_y = state.caps[&y];
                    let mut bs: Vec<Branch> = vec![(x, vec![LSym::Var(y)], None)];
                    if cap_x >= 2 {
                        let s = fresh();
                        bs.push((x, vec![LSym::Var(y), LSym::Var(s)], Some((s, cap_x - 1))));
                    }
                    if cap_y >= 2 {
                        let s = fresh();
                        bs.push((y, vec![LSym::Var(x), LSym::Var(s)], Some((s, cap_y - 1))));
                    }
                    bs
                }
            };
            for (var, replacement, fresh_cap) in branches {
                let mut child = state.clone();
                if let Some((id, cap)) = fresh_cap {
                    child.caps.insert(id, cap);
                }
                // X := Y identification must tighten Y's capacity
                if replacement.len() == 1 {
                    if let LSym::Var(y) = replacement[0] {
                        let cx = child.caps[&var];
                        let cy = child.caps[&y];
                        child.caps.insert(y, cx.min(cy));
                    }
                }
                child.substitute_var(var, &replacement);
                match normalize(&mut child) {
                    Normalized::Dead => {}
                    Normalized::Ok => stack.push(child),
                }
            }
        }
    }

    Ok(SolutionSet::from_set(found, true))
}

/// Expands the free variables of a solved leaf into concrete words and
/// records the resulting substitutions that verify and respect the bound.
fn complete_leaf(
    sys: &EquationSystem,
    vars: &[SymbolId],
    state: &LeviState,
    budget: &SearchBudget,
    found: &mut BTreeSet<Substitution>,
) -> Result<(), ()> {
    let live: Vec<usize> = state.caps.keys().copied().collect();
    let coefficients = sys.alphabet().coefficients();
    let mut assig: BTreeMap<usize, PositiveWord> = BTreeMap::new();
    expand_free(
        sys,
        vars,
        state,
        budget,
        &live,
        0,
        coefficients,
        &mut assig,
        found,
    )
}

#[allow(clippy::too_many_arguments)]
fn expand_free(
    sys: &EquationSystem,
    vars: &[SymbolId],
    state: &LeviState,
    budget: &SearchBudget,
    live: &[usize],
    pos: usize,
    coefficients: &[SymbolId],
    assig: &mut BTreeMap<usize, PositiveWord>,
    found: &mut BTreeSet<Substitution>,
) -> Result<(), ()> {
    if pos == live.len() {
        let mut s = Substitution::new();
        for (i, &orig) in vars.iter().enumerate() {
            let mut image = PositiveWord::empty();
            for &sym in &state.images[i] {
                match sym {
                    LSym::Coeff(c) => image.push(c),
                    LSym::Var(v) => image.extend_from(&assig[&v]),
                }
            }
            if image.is_empty() || image.len() > budget.max_len {
                return Ok(());
            }
            s.bind(orig, image);
        }
        if is_solution(&s, sys).unwrap_or(false) {
            found.insert(s);
            if found.len() >= budget.max_solutions {
                return Err(());
            }
        }
        return Ok(());
    }
    let v = live[pos];
    let cap = state.caps[&v];
    for w in words_up_to(coefficients, cap) {
        assig.insert(v, w);
        expand_free(
            sys,
            vars,
            state,
            budget,
            live,
            pos + 1,
            coefficients,
            assig,
            found,
        )?;
    }
    assig.remove(&v);
    Ok(())
}

/// If `x` and `y` commute, returns the primitive word both are powers of.
pub fn commutation_witness(x: &PositiveWord, y: &PositiveWord) -> Option<PositiveWord> {
    assert!(!x.is_empty() && !y.is_empty());
    if concat(x, y) != concat(y, x) {
        return None;
    }
    Some(primitive_root(&concat(x, y)).0)
}
