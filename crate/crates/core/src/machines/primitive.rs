//! Primitive machines LR(Y) and RL(Y) and their k-fold compositions.
//!
//! A running state letter sweeps across a sector, converting letters between
//! the two tape-alphabet copies, then sweeps back. `LR_k`/`RL_k` repeat the
//! round trip k times with 2k running letters.

use crate::hardware::{AdmissibleWord, HardwareBuilder, LetterId, Token};
use crate::machines::{Machine, SectorRole};
use crate::rules::{Domain, PartRewrite, PhaseTag, RuleTags, SRule, SignedRule};
use crate::Result;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimitiveKind {
    /// Runner starts left: sweeps the left sector into the right, then back.
    Lr,
    /// Runner starts right: sweeps the right sector into the left, then back.
    Rl,
}

#[derive(Debug, Clone)]
pub struct Primitive {
    pub machine: Machine,
    pub kind: PrimitiveKind,
    pub k: u32,
    /// Copies of the base alphabet in sector 1 / sector 2, aligned by index.
    pub y1: Vec<LetterId>,
    pub y2: Vec<LetterId>,
    pub runners: Vec<LetterId>,
}

/// One step of a sweep, abstract over the concrete rule family: the tower's
/// parallel phases reuse the same patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepStep {
    /// Apply the run rule of `runner` (1-based) for base letter `y`,
    /// inverted when `inv` is set.
    Run { runner: usize, y: usize, inv: bool },
    /// Apply the connecting rule switching `runner` to `runner + 1`.
    Conn { runner: usize },
}

/// The standard full sweep of `LR_k` over sector-1 content: each odd runner
/// consumes the content from its right end (mirror order), each even runner
/// restores it front-to-back.
pub fn lr_sweep_pattern(content: &[(usize, bool)], k: u32) -> Vec<SweepStep> {
    let mut steps = Vec::new();
    for j in 1..=k as usize {
        for &(y, inv) in content.iter().rev() {
            steps.push(SweepStep::Run {
                runner: 2 * j - 1,
                y,
                inv,
            });
        }
        steps.push(SweepStep::Conn { runner: 2 * j - 1 });
        for &(y, inv) in content {
            steps.push(SweepStep::Run { runner: 2 * j, y, inv });
        }
        if j < k as usize {
            steps.push(SweepStep::Conn { runner: 2 * j });
        }
    }
    steps
}

/// The standard full sweep of `RL_k` over sector-2 content: odd runners
/// consume it front-to-back, even runners restore it from the far end.
pub fn rl_sweep_pattern(content: &[(usize, bool)], k: u32) -> Vec<SweepStep> {
    let mut steps = Vec::new();
    for j in 1..=k as usize {
        for &(y, inv) in content {
            steps.push(SweepStep::Run {
                runner: 2 * j - 1,
                y,
                inv,
            });
        }
        steps.push(SweepStep::Conn { runner: 2 * j - 1 });
        for &(y, inv) in content.iter().rev() {
            steps.push(SweepStep::Run { runner: 2 * j, y, inv });
        }
        if j < k as usize {
            steps.push(SweepStep::Conn { runner: 2 * j });
        }
    }
    steps
}

/// Builds `LR_k(Y)` or `RL_k(Y)` over the base alphabet `y_names`.
pub fn make_primitive(kind: PrimitiveKind, y_names: &[String], k: u32) -> Result<Primitive> {
    assert!(k >= 1, "k must be at least 1");
    let runner_name = match kind {
        PrimitiveKind::Lr => "p",
        PrimitiveKind::Rl => "r",
    };
    let mut b = HardwareBuilder::new(match kind {
        PrimitiveKind::Lr => format!("LR_{k}"),
        PrimitiveKind::Rl => format!("RL_{k}"),
    });
    b = b.part("Q1", vec!["Q1.q".into()], 0, 0);
    let runner_names: Vec<String> = (1..=2 * k).map(|i| format!("P.{runner_name}{i}")).collect();
    b = b.part("P", runner_names, 0, (2 * k - 1) as usize);
    b = b.part("Q2", vec!["Q2.q".into()], 0, 0);
    b = b.sector_alphabet(y_names.iter().map(|y| format!("Y1.{y}")).collect());
    b = b.sector_alphabet(y_names.iter().map(|y| format!("Y2.{y}")).collect());
    let hw = b.build()?;

    let y1: Vec<LetterId> = y_names
        .iter()
        .map(|y| hw.lookup(&format!("Y1.{y}")).unwrap())
        .collect();
    let y2: Vec<LetterId> = y_names
        .iter()
        .map(|y| hw.lookup(&format!("Y2.{y}")).unwrap())
        .collect();
    let runners: Vec<LetterId> = (1..=2 * k)
        .map(|i| hw.lookup(&format!("P.{runner_name}{i}")).unwrap())
        .collect();
    let q1 = hw.lookup("Q1.q").unwrap();
    let q2 = hw.lookup("Q2.q").unwrap();

    let full = vec![Domain::Full; hw.n_sectors() + 2];
    let mut rules = Vec::new();
    let prefix = match kind {
        PrimitiveKind::Lr => "z",
        PrimitiveKind::Rl => "x",
    };
    for j in 1..=k as usize {
        let odd = 2 * j - 1;
        let even = 2 * j;
        for (yi, yname) in y_names.iter().enumerate() {
            // Odd runner: LR moves left (consume sector 1 end), RL moves
            // right (consume sector 2 start).
            let (left, right) = match kind {
                PrimitiveKind::Lr => (Token::neg(y1[yi]), Token::pos(y2[yi])),
                PrimitiveKind::Rl => (Token::pos(y1[yi]), Token::neg(y2[yi])),
            };
            rules.push(SRule::new(
                format!("{prefix}{odd}.{yname}"),
                vec![
                    PartRewrite::fixed(q1),
                    PartRewrite {
                        left: Some(left),
                        src: runners[odd - 1],
                        dst: runners[odd - 1],
                        right: Some(right),
                    },
                    PartRewrite::fixed(q2),
                ],
                full.clone(),
                RuleTags {
                    label: format!("run {runner_name}{odd} over {yname}"),
                    lrk: Some(PhaseTag::Phase(odd as u32)),
                    ..Default::default()
                },
                &hw,
            )?);
        }
        // Connecting rule odd -> even locks the sector the runner emptied.
        let mut domains = full.clone();
        domains[match kind {
            PrimitiveKind::Lr => 1,
            PrimitiveKind::Rl => 2,
        }] = Domain::Empty;
        rules.push(SRule::new(
            format!("{prefix}{odd}_{even}"),
            vec![
                PartRewrite::fixed(q1),
                PartRewrite::state(runners[odd - 1], runners[even - 1]),
                PartRewrite::fixed(q2),
            ],
            domains,
            RuleTags {
                label: format!("connect {runner_name}{odd}->{runner_name}{even}"),
                lrk: Some(PhaseTag::Trans(odd as u32, even as u32)),
                ..Default::default()
            },
            &hw,
        )?);
        for (yi, yname) in y_names.iter().enumerate() {
            // Even runner: the reverse move.
            let (left, right) = match kind {
                PrimitiveKind::Lr => (Token::pos(y1[yi]), Token::neg(y2[yi])),
                PrimitiveKind::Rl => (Token::neg(y1[yi]), Token::pos(y2[yi])),
            };
            rules.push(SRule::new(
                format!("{prefix}{even}.{yname}"),
                vec![
                    PartRewrite::fixed(q1),
                    PartRewrite {
                        left: Some(left),
                        src: runners[even - 1],
                        dst: runners[even - 1],
                        right: Some(right),
                    },
                    PartRewrite::fixed(q2),
                ],
                full.clone(),
                RuleTags {
                    label: format!("run {runner_name}{even} over {yname}"),
                    lrk: Some(PhaseTag::Phase(even as u32)),
                    ..Default::default()
                },
                &hw,
            )?);
        }
        if j < k as usize {
            let mut domains = full.clone();
            domains[match kind {
                PrimitiveKind::Lr => 2,
                PrimitiveKind::Rl => 1,
            }] = Domain::Empty;
            rules.push(SRule::new(
                format!("{prefix}{even}_{}", even + 1),
                vec![
                    PartRewrite::fixed(q1),
                    PartRewrite::state(runners[even - 1], runners[even]),
                    PartRewrite::fixed(q2),
                ],
                domains,
                RuleTags {
                    label: format!("connect {runner_name}{even}->{runner_name}{}", even + 1),
                    lrk: Some(PhaseTag::Trans(even as u32, even as u32 + 1)),
                    ..Default::default()
                },
                &hw,
            )?);
        }
    }

    let mut roles = vec![SectorRole::Empty; hw.n_sectors() + 2];
    roles[1] = SectorRole::Working;
    roles[2] = SectorRole::Working;
    let machine = Machine::new(hw, rules, vec![1], roles)?;
    Ok(Primitive {
        machine,
        kind,
        k,
        y1,
        y2,
        runners,
    })
}

impl Primitive {
    /// The standard start word `q1 u p1 q2` (LR, content over Y1) or
    /// `q1 r1 u q2` (RL, content over Y2); `content` is (index, inv) pairs.
    pub fn standard_word(&self, content: &[(usize, bool)], runner: usize) -> Result<AdmissibleWord> {
        let hw = &self.machine.hardware;
        let mut tokens = vec![Token::pos(hw.lookup("Q1.q").unwrap())];
        let fill = |tokens: &mut Vec<Token>, alphabet: &[LetterId]| {
            for &(y, inv) in content {
                tokens.push(Token {
                    letter: alphabet[y],
                    inv,
                });
            }
        };
        match self.kind {
            PrimitiveKind::Lr => {
                fill(&mut tokens, &self.y1);
                tokens.push(Token::pos(self.runners[runner - 1]));
            }
            PrimitiveKind::Rl => {
                tokens.push(Token::pos(self.runners[runner - 1]));
                fill(&mut tokens, &self.y2);
            }
        }
        tokens.push(Token::pos(hw.lookup("Q2.q").unwrap()));
        AdmissibleWord::parse(tokens, hw)
    }

    /// Maps a sweep pattern onto this machine's rules.
    pub fn history_for(&self, steps: &[SweepStep]) -> Vec<SignedRule> {
        let prefix = match self.kind {
            PrimitiveKind::Lr => "z",
            PrimitiveKind::Rl => "x",
        };
        let names = self.y_names();
        steps
            .iter()
            .map(|s| match *s {
                SweepStep::Run { runner, y, inv } => SignedRule {
                    rule: self
                        .machine
                        .rule_index(&format!("{prefix}{runner}.{}", names[y]))
                        .unwrap(),
                    inv,
                },
                SweepStep::Conn { runner } => SignedRule::pos(
                    self.machine
                        .rule_index(&format!("{prefix}{runner}_{}", runner + 1))
                        .unwrap(),
                ),
            })
            .collect()
    }

    /// The full standard sweep history over `content`.
    pub fn sweep_history(&self, content: &[(usize, bool)]) -> Vec<SignedRule> {
        let pattern = match self.kind {
            PrimitiveKind::Lr => lr_sweep_pattern(content, self.k),
            PrimitiveKind::Rl => rl_sweep_pattern(content, self.k),
        };
        self.history_for(&pattern)
    }

    fn y_names(&self) -> Vec<String> {
        self.y1
            .iter()
            .map(|&l| {
                self.machine
                    .hardware
                    .letter_name(l)
                    .strip_prefix("Y1.")
                    .unwrap()
                    .to_string()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::computation::run;

    fn y2() -> Vec<String> {
        vec!["a".into(), "b".into()]
    }

    #[test]
    fn lr_rule_count_matches() {
        let p = make_primitive(PrimitiveKind::Lr, &y2(), 1).unwrap();
        // zeta1(a), zeta1(b), zeta12, zeta2(a), zeta2(b)
        assert_eq!(p.machine.n_rules(), 5);
    }

    #[test]
    fn lr_k_connecting_rules_present() {
        let p = make_primitive(PrimitiveKind::Lr, &y2(), 2).unwrap();
        for id in ["z1_2", "z2_3", "z3_4"] {
            assert!(p.machine.rule(id).is_some(), "missing {id}");
        }
        assert_eq!(p.machine.n_rules(), 4 * 2 + 3);
    }

    #[test]
    fn lr_1_equals_lr() {
        let p1 = make_primitive(PrimitiveKind::Lr, &y2(), 1).unwrap();
        // Same base shape and rule ids as the plain machine by construction.
        assert_eq!(p1.machine.hardware.parts[1].letters.len(), 2);
    }

    #[test]
    fn lr_sweep_preserves_content_and_advances_runner() {
        let p = make_primitive(PrimitiveKind::Lr, &y2(), 1).unwrap();
        let u = vec![(0, false), (1, false)];
        let w0 = p.standard_word(&u, 1).unwrap();
        let h = p.sweep_history(&u);
        assert_eq!(h.len(), 2 * u.len() + 1);
        let c = run(&p.machine, w0, &h, false).unwrap();
        let expect = p.standard_word(&u, 2).unwrap();
        assert_eq!(c.end(), &expect);
    }

    #[test]
    fn lr_k_sweep_length_formula() {
        for k in 1..=3u32 {
            let p = make_primitive(PrimitiveKind::Lr, &y2(), k).unwrap();
            for l in 0..=3usize {
                let u: Vec<(usize, bool)> = (0..l).map(|i| (i % 2, false)).collect();
                let w0 = p.standard_word(&u, 1).unwrap();
                let h = p.sweep_history(&u);
                assert_eq!(h.len(), 2 * l * k as usize + 2 * k as usize - 1);
                let c = run(&p.machine, w0, &h, false).unwrap();
                let expect = p.standard_word(&u, 2 * k as usize).unwrap();
                assert_eq!(c.end(), &expect);
            }
        }
    }

    #[test]
    fn rl_sweep_roundtrip() {
        let p = make_primitive(PrimitiveKind::Rl, &y2(), 2).unwrap();
        let u = vec![(1, true), (0, false), (0, false)];
        let w0 = p.standard_word(&u, 1).unwrap();
        let h = p.sweep_history(&u);
        let c = run(&p.machine, w0, &h, false).unwrap();
        let expect = p.standard_word(&u, 4).unwrap();
        assert_eq!(c.end(), &expect);
    }

    #[test]
    fn projection_is_preserved() {
        // Sending state letters to 1 and copies to the base alphabet is
        // invariant under every rule.
        let p = make_primitive(PrimitiveKind::Lr, &y2(), 1).unwrap();
        let hw = &p.machine.hardware;
        let project = |w: &AdmissibleWord| -> Vec<(usize, bool)> {
            crate::hardware::free_reduce(w.tokens.iter().copied().filter_map(|t| {
                let name = hw.letter_name(t.letter);
                name.strip_prefix("Y1.")
                    .or_else(|| name.strip_prefix("Y2."))
                    .map(|y| Token {
                        letter: if y == "a" { 0 } else { 1 },
                        inv: t.inv,
                    })
            }))
            .iter()
            .map(|t| (t.letter as usize, t.inv))
            .collect()
        };
        let u = vec![(0, false), (1, false), (0, true)];
        let w0 = p.standard_word(&u, 1).unwrap();
        let h = p.sweep_history(&u);
        let c = run(&p.machine, w0, &h, false).unwrap();
        let base = project(&c.trace[0]);
        for w in &c.trace {
            assert_eq!(project(w), base);
        }
    }
}
