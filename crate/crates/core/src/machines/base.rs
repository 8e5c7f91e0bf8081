//! The pluggable base recognizer.
//!
//! `power_checker(n)` accepts exactly the n-th powers of the free group over
//! a two-letter alphabet; `free_checker` accepts everything. The power
//! checker guesses a root block and erases one copy of it per pass: the
//! guess pass writes signed copies of the block into one storage sector per
//! remaining pass while erasing the block from the input, and each erase
//! pass consumes one storage against one more block. Transitions verify the
//! storages (and finally everything) emptied exactly.

use crate::hardware::{free_reduce, AdmissibleWord, HardwareBuilder, LetterId, Token};
use crate::machines::{Machine, SectorRole};
use crate::rules::{Domain, PartRewrite, RuleTags, SRule, SignedRule};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseKind {
    PowerChecker,
    FreeChecker,
}

/// A built base machine together with the bookkeeping needed to construct
/// accepting computations and map input words onto tape letters.
#[derive(Debug, Clone)]
pub struct BaseMachine {
    pub machine: Machine,
    pub kind: BaseKind,
    pub n: u32,
    /// Input alphabet letters (identified with the abstract alphabet A).
    pub input_letters: Vec<LetterId>,
    /// Storage alphabets, one per erase pass (sectors 2..=n).
    pub storages: Vec<Vec<LetterId>>,
    /// Reported acceptance-time constant: accepting computations constructed
    /// here have length at most `c * n * max(1, |u|)`.
    pub time_constant: u32,
}

/// Number of passes (= sectors) of the checker for exponent n.
fn passes(n: u32) -> usize {
    n.max(1) as usize
}

/// Builds the base machine over a two-letter input alphabet.
pub fn make_base_machine(kind: BaseKind, n: u32) -> Result<BaseMachine> {
    if kind == BaseKind::PowerChecker && n < 1 {
        return Err(Error::Machine("power checker requires n >= 1".into()));
    }
    let n_eff = match kind {
        BaseKind::PowerChecker => n,
        BaseKind::FreeChecker => 1,
    };
    let np = passes(n_eff);
    let phases: Vec<String> = std::iter::once("g".to_string())
        .chain((2..=np).map(|j| format!("e{j}")))
        .chain(std::iter::once("fin".to_string()))
        .collect();

    let mut b = HardwareBuilder::new(match kind {
        BaseKind::PowerChecker => format!("power_checker({n_eff})"),
        BaseKind::FreeChecker => "free_checker".to_string(),
    });
    b = b.part("Q0", vec!["Q0.q".into()], 0, 0);
    for i in 1..=np {
        let letters: Vec<String> = phases.iter().map(|ph| format!("Q{i}.{ph}")).collect();
        b = b.part(format!("Q{i}"), letters, 0, phases.len() - 1);
    }
    // Sector 1 is the input; sectors 2..=np are storages.
    b = b.sector_alphabet(vec!["Y1.a1".into(), "Y1.a2".into()]);
    for j in 2..=np {
        b = b.sector_alphabet(vec![format!("Y{j}.a1"), format!("Y{j}.a2")]);
    }
    let hw = b.build()?;

    let input_letters = vec![hw.lookup("Y1.a1").unwrap(), hw.lookup("Y1.a2").unwrap()];
    let storages: Vec<Vec<LetterId>> = (2..=np)
        .map(|j| {
            vec![
                hw.lookup(&format!("Y{j}.a1")).unwrap(),
                hw.lookup(&format!("Y{j}.a2")).unwrap(),
            ]
        })
        .collect();

    let q = |i: usize, ph: &str| hw.lookup(&format!("Q{i}.{ph}")).unwrap();
    let q0 = hw.lookup("Q0.q").unwrap();
    let full = vec![Domain::Full; hw.n_sectors() + 2];
    let mut rules = Vec::new();

    let signs = [false, true];
    // Guess pass: erase a signed letter from the input's end while writing
    // its copy at the end of every storage.
    for (ai, _) in input_letters.iter().enumerate() {
        for &inv in &signs {
            let mut parts = vec![PartRewrite::fixed(q0)];
            parts.push(PartRewrite {
                left: Some(Token {
                    letter: input_letters[ai],
                    inv: !inv,
                }),
                src: q(1, "g"),
                dst: q(1, "g"),
                right: None,
            });
            for i in 2..=np {
                parts.push(PartRewrite {
                    left: Some(Token {
                        letter: storages[i - 2][ai],
                        inv,
                    }),
                    src: q(i, "g"),
                    dst: q(i, "g"),
                    right: None,
                });
            }
            rules.push(SRule::new(
                format!("g{}{}", if inv { "-" } else { "+" }, ai + 1),
                parts,
                full.clone(),
                RuleTags::label(format!("guess a{}{}", ai + 1, if inv { "^-1" } else { "" })),
                &hw,
            )?);
        }
    }
    // Erase passes: erase a signed letter from the input's end while
    // consuming its copy from the start of storage j.
    for j in 2..=np {
        let ph = format!("e{j}");
        for (ai, _) in input_letters.iter().enumerate() {
            for &inv in &signs {
                let mut parts = vec![PartRewrite::fixed(q0)];
                for i in 1..=np {
                    let mut pr = PartRewrite::fixed(q(i, &ph));
                    if i == 1 {
                        pr.left = Some(Token {
                            letter: input_letters[ai],
                            inv: !inv,
                        });
                    }
                    if i == j - 1 {
                        pr.right = Some(Token {
                            letter: storages[j - 2][ai],
                            inv: !inv,
                        });
                    }
                    parts.push(pr);
                }
                rules.push(SRule::new(
                    format!("e{j}{}{}", if inv { "-" } else { "+" }, ai + 1),
                    parts,
                    full.clone(),
                    RuleTags::label(format!(
                        "erase pass {j}: a{}{}",
                        ai + 1,
                        if inv { "^-1" } else { "" }
                    )),
                    &hw,
                )?);
            }
        }
    }
    // Transitions between passes. tau_j switches e_j -> e_{j+1} and locks
    // storage j; the final transition locks every sector.
    for j in 1..=np {
        let (from, to) = if j == 1 {
            ("g".to_string(), if np >= 2 { "e2".into() } else { "fin".to_string() })
        } else if j < np {
            (format!("e{j}"), format!("e{}", j + 1))
        } else {
            (format!("e{j}"), "fin".to_string())
        };
        let mut parts = vec![PartRewrite::fixed(q0)];
        for i in 1..=np {
            parts.push(PartRewrite::state(q(i, &from), q(i, &to)));
        }
        let mut domains = full.clone();
        if j >= 2 {
            domains[j] = Domain::Empty;
        }
        if j == np {
            for d in domains.iter_mut().take(np + 1).skip(1) {
                *d = Domain::Empty;
            }
        }
        rules.push(SRule::new(
            format!("t{j}"),
            parts,
            domains,
            RuleTags::label(format!("transition {from}->{to}")),
            &hw,
        )?);
    }

    let mut roles = vec![SectorRole::Empty; hw.n_sectors() + 2];
    roles[1] = SectorRole::Input;
    for j in 2..=np {
        roles[j] = SectorRole::Working;
    }
    let machine = Machine::new(hw, rules, vec![1], roles)?;
    Ok(BaseMachine {
        machine,
        kind,
        n: n_eff,
        input_letters,
        storages,
        time_constant: 2,
    })
}

impl BaseMachine {
    /// Encodes a signed word over the abstract alphabet (indices into A) as
    /// input-sector tokens.
    pub fn input_word(&self, word: &[(usize, bool)]) -> Vec<Token> {
        word.iter()
            .map(|&(ai, inv)| Token {
                letter: self.input_letters[ai],
                inv,
            })
            .collect()
    }

    /// The input configuration for `w` (tokens over the input alphabet).
    pub fn input_config(&self, w: &[Token]) -> Result<AdmissibleWord> {
        let mut contents = HashMap::new();
        contents.insert(1, w.to_vec());
        self.machine.start_config(&contents)
    }

    /// An accepting history for input `w`, or `None` when `w` is not in the
    /// machine's language. Works block-wise: every pass erases the n-th root
    /// of `w` from the input's end.
    pub fn accept_history(&self, w: &[Token]) -> Option<Vec<SignedRule>> {
        let root = match self.kind {
            BaseKind::FreeChecker => w.to_vec(),
            BaseKind::PowerChecker => cyclic_nth_root(w, self.n)?,
        };
        let np = passes(self.n);
        let block: Vec<SignedRule> = root
            .iter()
            .rev()
            .map(|t| {
                let ai = self
                    .input_letters
                    .iter()
                    .position(|&l| l == t.letter)
                    .expect("input letters");
                SignedRule::pos(
                    self.machine
                        .rule_index(&format!("g{}{}", if t.inv { "-" } else { "+" }, ai + 1))
                        .unwrap(),
                )
            })
            .collect();
        let mut history = Vec::new();
        for j in 1..=np {
            if j == 1 {
                history.extend(block.iter().copied());
            } else {
                for t in root.iter().rev() {
                    let ai = self
                        .input_letters
                        .iter()
                        .position(|&l| l == t.letter)
                        .unwrap();
                    history.push(SignedRule::pos(
                        self.machine
                            .rule_index(&format!(
                                "e{j}{}{}",
                                if t.inv { "-" } else { "+" },
                                ai + 1
                            ))
                            .unwrap(),
                    ));
                }
            }
            history.push(SignedRule::pos(
                self.machine.rule_index(&format!("t{j}")).unwrap(),
            ));
        }
        Some(history)
    }
}

/// The n-th root of a reduced word in the free group, if one exists: with
/// `w = v c v^{-1}` for `c` cyclically reduced, `w` is an n-th power exactly
/// when `c` is a visual n-th power `d^n`, and the root is `v d v^{-1}`.
pub fn cyclic_nth_root(w: &[Token], n: u32) -> Option<Vec<Token>> {
    assert!(n >= 1);
    let w = free_reduce(w.iter().copied());
    if n == 1 {
        return Some(w);
    }
    if w.is_empty() {
        return Some(Vec::new());
    }
    // Peel the conjugating wrapper.
    let mut lo = 0usize;
    let mut hi = w.len();
    while hi - lo >= 2 && w[lo] == w[hi - 1].inverse() {
        lo += 1;
        hi -= 1;
    }
    let core = &w[lo..hi];
    if core.len() % n as usize != 0 {
        return None;
    }
    let d = core.len() / n as usize;
    let block = &core[..d];
    if !core.chunks(d).all(|c| c == block) {
        return None;
    }
    let mut root: Vec<Token> = w[..lo].to_vec();
    root.extend_from_slice(block);
    root.extend(w[..lo].iter().rev().map(|t| t.inverse()));
    Some(free_reduce(root))
}

/// Brute-force membership in the language of n-th powers; used as the
/// independent oracle in tests.
pub fn is_nth_power(w: &[Token], n: u32) -> bool {
    cyclic_nth_root(w, n).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::computation::run;

    fn tok(b: &BaseMachine, s: &str) -> Vec<Token> {
        b.machine.hardware.parse_tokens(s).unwrap()
    }

    #[test]
    fn cube_root_extraction() {
        let b = make_base_machine(BaseKind::PowerChecker, 3).unwrap();
        let w = tok(&b, "Y1.a1 Y1.a1 Y1.a1");
        assert_eq!(cyclic_nth_root(&w, 3).unwrap(), tok(&b, "Y1.a1"));
        let w = tok(&b, "Y1.a1 Y1.a2 Y1.a2 Y1.a2 Y1.a1^-1");
        assert_eq!(
            cyclic_nth_root(&w, 3).unwrap(),
            tok(&b, "Y1.a1 Y1.a2 Y1.a1^-1")
        );
        let w = tok(&b, "Y1.a1 Y1.a2");
        assert!(cyclic_nth_root(&w, 3).is_none());
    }

    #[test]
    fn accepts_cube_of_generator() {
        let b = make_base_machine(BaseKind::PowerChecker, 3).unwrap();
        let w = tok(&b, "Y1.a1 Y1.a1 Y1.a1");
        let start = b.input_config(&w).unwrap();
        let h = b.accept_history(&w).unwrap();
        assert_eq!(h.len(), 6);
        let c = run(&b.machine, start, &h, false).unwrap();
        assert_eq!(c.end(), &b.machine.accept_config());
    }

    #[test]
    fn accepts_conjugated_cube() {
        let b = make_base_machine(BaseKind::PowerChecker, 3).unwrap();
        let w = tok(&b, "Y1.a1 Y1.a2 Y1.a2 Y1.a2 Y1.a1^-1");
        let start = b.input_config(&w).unwrap();
        let h = b.accept_history(&w).unwrap();
        let c = run(&b.machine, start, &h, false).unwrap();
        assert_eq!(c.end(), &b.machine.accept_config());
    }

    #[test]
    fn free_checker_accepts_empty_and_any() {
        let b = make_base_machine(BaseKind::FreeChecker, 1).unwrap();
        for text in ["", "Y1.a1 Y1.a2^-1"] {
            let w = tok(&b, text);
            let start = b.input_config(&w).unwrap();
            let h = b.accept_history(&w).unwrap();
            let c = run(&b.machine, start, &h, false).unwrap();
            assert_eq!(c.end(), &b.machine.accept_config());
        }
    }

    #[test]
    fn time_bound_reported() {
        let b = make_base_machine(BaseKind::PowerChecker, 3).unwrap();
        for text in ["Y1.a1", "Y1.a1 Y1.a2", "Y1.a1 Y1.a2 Y1.a1"] {
            let u = tok(&b, text);
            let mut w = Vec::new();
            for _ in 0..3 {
                w.extend(u.iter().copied());
            }
            let w = crate::hardware::free_reduce(w);
            let h = b.accept_history(&w).unwrap();
            assert!(h.len() as u32 <= b.time_constant * 3 * (u.len() as u32).max(1));
        }
    }
}
