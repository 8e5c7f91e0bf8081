//! Computations: executing histories, step-history classification,
//! controlled-history detection, and bounded acceptance search.

use crate::hardware::AdmissibleWord;
use crate::machines::Machine;
use crate::rules::{MTrans, PhaseTag, SignedRule};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};

/// A computation: start word, reduced history, and the cached trace
/// `W_0 .. W_t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Computation {
    pub start: AdmissibleWord,
    pub history: Vec<SignedRule>,
    pub trace: Vec<AdmissibleWord>,
}

impl Computation {
    pub fn len(&self) -> usize {
        self.history.len()
    }

    pub fn is_empty(&self) -> bool {
        self.history.is_empty()
    }

    pub fn end(&self) -> &AdmissibleWord {
        self.trace.last().expect("trace contains the start word")
    }
}

/// Removes adjacent mutually inverse rules.
pub fn reduce_history(history: &[SignedRule]) -> Vec<SignedRule> {
    let mut out: Vec<SignedRule> = Vec::new();
    for &s in history {
        match out.last() {
            Some(&last) if last == s.inverse() => {
                out.pop();
            }
            _ => out.push(s),
        }
    }
    out
}

pub fn is_reduced(history: &[SignedRule]) -> bool {
    history.windows(2).all(|w| w[0] != w[1].inverse())
}

/// Runs a history from a start word, validating every step.
///
/// Unreduced histories are rejected unless `reduce` is set, in which case
/// the history is reduced first (this preserves the endpoints).
pub fn run(
    machine: &Machine,
    start: AdmissibleWord,
    history: &[SignedRule],
    reduce: bool,
) -> Result<Computation> {
    let history: Vec<SignedRule> = if reduce {
        reduce_history(history)
    } else if !is_reduced(history) {
        return Err(Error::Computation("history is not reduced".into()));
    } else {
        history.to_vec()
    };
    let mut trace = vec![start.clone()];
    for (i, &s) in history.iter().enumerate() {
        let prev = trace.last().unwrap();
        if let Some(reason) = machine.rules[s.rule].inapplicability(prev, &machine.hardware, s.inv)
        {
            return Err(Error::Inapplicable {
                step: i,
                rule: machine.rule_name(s),
                reason,
            });
        }
        let next = machine.apply(prev, s)?;
        trace.push(next);
    }
    Ok(Computation {
        start,
        history,
        trace,
    })
}

/// A letter of a step history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepLetter {
    /// A maximal run of rules of one submachine: `(p)` or `(p)_i`.
    Phase { phase: u32, index: Option<u8> },
    /// A transition rule `(a,b)` or `(a,b)_i`; inverses switch the indices.
    Trans { from: u32, to: u32, index: Option<u8> },
    /// `theta(s)_i^{+-1}` of the main machine.
    MStart { index: u8, inv: bool },
    /// `theta(a)_i^{+-1}` of the main machine.
    MAccept { index: u8, inv: bool },
}

impl StepLetter {
    pub fn text(&self) -> String {
        let sub = |i: &Option<u8>| i.map(|i| format!("_{i}")).unwrap_or_default();
        match self {
            StepLetter::Phase { phase, index } => format!("({phase}){}", sub(index)),
            StepLetter::Trans { from, to, index } => format!("({from}{to}){}", sub(index)),
            StepLetter::MStart { index, inv } => {
                format!("(s)_{index}{}", if *inv { "^-1" } else { "" })
            }
            StepLetter::MAccept { index, inv } => {
                format!("(a)_{index}{}", if *inv { "^-1" } else { "" })
            }
        }
    }
}

/// The step history of a computation, from rule provenance tags.
///
/// Transitions map to their own letters; maximal runs of one submachine's
/// rules collapse to a single phase letter. The accept rule counts as a
/// phase-5 rule and may only open or close the history.
pub fn step_history(machine: &Machine, history: &[SignedRule]) -> Result<Vec<StepLetter>> {
    let mut letters: Vec<StepLetter> = Vec::new();
    for (pos, &s) in history.iter().enumerate() {
        let tags = &machine.rules[s.rule].tags;
        let letter = match (&tags.m_trans, &tags.m5) {
            (Some(MTrans::Start), _) => StepLetter::MStart {
                index: tags.machine_index.unwrap_or(0),
                inv: s.inv,
            },
            (Some(MTrans::Accept), _) => StepLetter::MAccept {
                index: tags.machine_index.unwrap_or(0),
                inv: s.inv,
            },
            (None, Some(PhaseTag::Phase(p))) => StepLetter::Phase {
                phase: *p,
                index: tags.machine_index,
            },
            (None, Some(PhaseTag::Trans(a, b))) => {
                let (from, to) = if s.inv { (*b, *a) } else { (*a, *b) };
                StepLetter::Trans {
                    from,
                    to,
                    index: tags.machine_index,
                }
            }
            (None, Some(PhaseTag::Accept)) => {
                if pos != 0 && pos + 1 != history.len() {
                    return Err(Error::Computation(
                        "accept rule occurs in the middle of a history".into(),
                    ));
                }
                StepLetter::Phase {
                    phase: 5,
                    index: tags.machine_index,
                }
            }
            (None, None) => {
                return Err(Error::Computation(format!(
                    "rule `{}` carries no phase tags",
                    machine.rules[s.rule].id
                )))
            }
        };
        match (letters.last(), &letter) {
            (
                Some(StepLetter::Phase { phase: p1, index: i1 }),
                StepLetter::Phase { phase: p2, index: i2 },
            ) if p1 == p2 && i1 == i2 => {}
            _ => letters.push(letter),
        }
    }
    Ok(letters)
}

/// Whether every letter of the step history carries the same machine index.
pub fn is_one_machine(machine: &Machine, history: &[SignedRule]) -> bool {
    let mut idx: Option<u8> = None;
    for s in history {
        match machine.rules[s.rule].tags.machine_index {
            None => return false,
            Some(i) => match idx {
                None => idx = Some(i),
                Some(j) if j != i => return false,
                _ => {}
            },
        }
    }
    true
}

/// Controlled histories: either an M4-stage run bracketed as
/// `chi(4i+2,4i+3) H' chi(4i+3,4i+4)` whose interior works in parallel as LR,
/// or an LR_k sweep bracketed as `zeta(2i,2i+1) H' zeta(2i+1,2i+2)`. For the
/// main machine the computation must additionally be one-machine.
pub fn is_controlled(machine: &Machine, history: &[SignedRule]) -> bool {
    if history.len() < 2 || !is_reduced(history) {
        return false;
    }
    let uses_index = machine.rules.iter().any(|r| r.tags.machine_index.is_some());
    if uses_index && !is_one_machine(machine, history) {
        return false;
    }
    let first = &machine.rules[history[0].rule];
    let last = &machine.rules[history[history.len() - 1].rule];
    let interior = &history[1..history.len() - 1];

    // Form (a): M3-level transitions chi(4i+2,4i+3) .. chi(4i+3,4i+4),
    // interior inside the LR phase 4i+3.
    if !history[0].inv && !history[history.len() - 1].inv {
        if let (Some(PhaseTag::Trans(a1, b1)), Some(PhaseTag::Trans(a2, b2))) =
            (first.tags.m3, last.tags.m3)
        {
            if a1 % 4 == 2 && b1 == a1 + 1 && a2 == b1 && b2 == a2 + 1 {
                let ok = interior.iter().all(|s| {
                    matches!(machine.rules[s.rule].tags.m3, Some(PhaseTag::Phase(p)) if p == b1)
                });
                if ok {
                    return true;
                }
            }
        }
        // Form (b): LR_k connecting rules zeta(2i,2i+1) .. zeta(2i+1,2i+2),
        // interior running at p^(2i+1), all inside an LR_k phase.
        if let (Some(PhaseTag::Trans(a1, b1)), Some(PhaseTag::Trans(a2, b2))) =
            (first.tags.lrk, last.tags.lrk)
        {
            if a1 % 2 == 0 && a1 > 0 && b1 == a1 + 1 && a2 == b1 && b2 == a2 + 1 {
                let ok = interior.iter().all(|s| {
                    matches!(machine.rules[s.rule].tags.lrk, Some(PhaseTag::Phase(p)) if p == b1)
                });
                if ok {
                    return true;
                }
            }
        }
    }
    false
}

/// Limits for bounded acceptance search.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SearchLimits {
    pub max_depth: usize,
    pub max_states: usize,
    /// Prune configurations whose a-length exceeds this bound.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_alen: Option<usize>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_depth: 10_000,
            max_states: 200_000,
            max_alen: None,
        }
    }
}

#[derive(Debug)]
pub enum SearchOutcome {
    /// A shortest accepting computation within the explored region.
    Accepted(Computation),
    /// The reachable component (within any a-length cap) was exhausted
    /// without reaching the accept configuration.
    ExhaustedComponent { explored: usize },
    /// A limit cut the search; absence of acceptance is bounded evidence
    /// only.
    LimitReached { explored: usize, what: String },
}

impl SearchOutcome {
    pub fn accepted(&self) -> Option<&Computation> {
        match self {
            SearchOutcome::Accepted(c) => Some(c),
            _ => None,
        }
    }
}

/// Breadth-first search over reduced computations with memoization on whole
/// configurations. Deterministic: ties break by rule declaration order.
pub fn accept_search(machine: &Machine, start: &AdmissibleWord, limits: &SearchLimits) -> SearchOutcome {
    let goal = machine.accept_config();
    if *start == goal {
        return SearchOutcome::Accepted(Computation {
            start: start.clone(),
            history: Vec::new(),
            trace: vec![start.clone()],
        });
    }
    struct Node {
        word: AdmissibleWord,
        parent: usize,
        via: SignedRule,
        depth: usize,
    }
    let mut nodes: Vec<Node> = vec![Node {
        word: start.clone(),
        parent: usize::MAX,
        via: SignedRule::pos(0),
        depth: 0,
    }];
    let mut seen: HashMap<AdmissibleWord, usize> = HashMap::new();
    seen.insert(start.clone(), 0);
    let mut queue: VecDeque<usize> = VecDeque::new();
    queue.push_back(0);
    let mut hit_limit: Option<String> = None;

    while let Some(i) = queue.pop_front() {
        let depth = nodes[i].depth;
        if depth >= limits.max_depth {
            hit_limit = Some(format!("depth {}", limits.max_depth));
            continue;
        }
        let word = nodes[i].word.clone();
        for s in machine.applicable_rules(&word) {
            let next = match machine.apply(&word, s) {
                Ok(w) => w,
                Err(_) => continue,
            };
            if let Some(cap) = limits.max_alen {
                if next.a_len(&machine.hardware) > cap {
                    hit_limit.get_or_insert_with(|| format!("a-length {cap}"));
                    continue;
                }
            }
            if seen.contains_key(&next) {
                continue;
            }
            if nodes.len() >= limits.max_states {
                return SearchOutcome::LimitReached {
                    explored: nodes.len(),
                    what: format!("states {}", limits.max_states),
                };
            }
            let idx = nodes.len();
            seen.insert(next.clone(), idx);
            let accepted = next == goal;
            nodes.push(Node {
                word: next,
                parent: i,
                via: s,
                depth: depth + 1,
            });
            if accepted {
                let mut history = Vec::new();
                let mut at = idx;
                while at != 0 {
                    history.push(nodes[at].via);
                    at = nodes[at].parent;
                }
                history.reverse();
                let c = run(machine, start.clone(), &history, false)
                    .expect("search path replays cleanly");
                return SearchOutcome::Accepted(c);
            }
            queue.push_back(idx);
        }
    }
    match hit_limit {
        None => SearchOutcome::ExhaustedComponent {
            explored: nodes.len(),
        },
        Some(what) => SearchOutcome::LimitReached {
            explored: nodes.len(),
            what,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::base::{make_base_machine, BaseKind};

    #[test]
    fn empty_history_is_identity() {
        let b = make_base_machine(BaseKind::PowerChecker, 3).unwrap();
        let w = b.input_config(&[]).unwrap();
        let c = run(&b.machine, w.clone(), &[], false).unwrap();
        assert_eq!(c.len(), 0);
        assert_eq!(c.trace, vec![w]);
    }

    #[test]
    fn unreduced_history_rejected_unless_flagged() {
        let b = make_base_machine(BaseKind::PowerChecker, 3).unwrap();
        let w = b.input_config(&[]).unwrap();
        let g = b.machine.signed("g+1", false).unwrap();
        let h = vec![g, g.inverse()];
        assert!(run(&b.machine, w.clone(), &h, false).is_err());
        let c = run(&b.machine, w.clone(), &h, true).unwrap();
        assert_eq!(c.len(), 0);
    }

    #[test]
    fn search_finds_base_acceptance() {
        let b = make_base_machine(BaseKind::PowerChecker, 3).unwrap();
        let hw = &b.machine.hardware;
        let w = hw.parse_tokens("Y1.a1 Y1.a1 Y1.a1").unwrap();
        let start = b.input_config(&w).unwrap();
        let limits = SearchLimits {
            max_depth: 12,
            max_states: 200_000,
            max_alen: Some(10),
        };
        let out = accept_search(&b.machine, &start, &limits);
        let c = out.accepted().expect("cube accepted");
        assert_eq!(c.len(), 6);
    }

    #[test]
    fn search_rejects_non_cube_within_bounds() {
        let b = make_base_machine(BaseKind::PowerChecker, 3).unwrap();
        let hw = &b.machine.hardware;
        let w = hw.parse_tokens("Y1.a1 Y1.a2").unwrap();
        let start = b.input_config(&w).unwrap();
        let limits = SearchLimits {
            max_depth: 14,
            max_states: 60_000,
            max_alen: Some(8),
        };
        let out = accept_search(&b.machine, &start, &limits);
        assert!(out.accepted().is_none());
    }

    #[test]
    fn already_accepted_is_empty_computation() {
        let b = make_base_machine(BaseKind::PowerChecker, 3).unwrap();
        let w = b.machine.accept_config();
        let out = accept_search(&b.machine, &w, &SearchLimits::default());
        assert_eq!(out.accepted().unwrap().len(), 0);
    }
}
