//! S-rules in normalized form: per-part rewrites `q -> a q' b` with
//! single-letter multipliers, per-sector domains, applicability checking,
//! application with free reduction, and inversion.

use crate::hardware::{free_reduce, AdmissibleWord, Hardware, LetterId, Token};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Domain of a rule in one sector. `Full` means the whole sector alphabet,
/// `Empty` locks the sector. Transition rules of the tower restrict some
/// historical sectors to the left or right half of their alphabet, hence
/// `Sub`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    Full,
    Empty,
    Sub(Vec<LetterId>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseTag {
    Phase(u32),
    Trans(u32, u32),
    Accept,
}

/// Transition rules of the main machine: theta(s)_i and theta(a)_i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MTrans {
    Start,
    Accept,
}

/// Provenance tags used by step-history computation and controlled-history
/// detection. Tags survive the copy maps of the tower combinators.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleTags {
    pub label: String,
    /// Position inside the LR_k submachine, when applicable.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lrk: Option<PhaseTag>,
    /// Position inside the M3 concatenation, when applicable.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m3: Option<PhaseTag>,
    /// Position inside the M5 partition, when applicable.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m5: Option<PhaseTag>,
    /// 1 or 2 for rules of the main machine's Theta_1 / Theta_2.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub machine_index: Option<u8>,
    /// Set on theta(s)_i / theta(a)_i of the main machine.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m_trans: Option<MTrans>,
}

impl RuleTags {
    pub fn label(s: impl Into<String>) -> Self {
        RuleTags {
            label: s.into(),
            ..Default::default()
        }
    }
}

/// One part of a rule: `src -> left src' right` with `left` appended at the
/// end of the part's left sector and `right` prepended at the start of its
/// right sector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartRewrite {
    pub left: Option<Token>,
    pub src: LetterId,
    pub dst: LetterId,
    pub right: Option<Token>,
}

impl PartRewrite {
    pub fn fixed(q: LetterId) -> Self {
        PartRewrite {
            left: None,
            src: q,
            dst: q,
            right: None,
        }
    }

    pub fn state(src: LetterId, dst: LetterId) -> Self {
        PartRewrite {
            left: None,
            src,
            dst,
            right: None,
        }
    }

    pub fn inverse(&self) -> Self {
        PartRewrite {
            left: self.left.map(Token::inverse),
            src: self.dst,
            dst: self.src,
            right: self.right.map(Token::inverse),
        }
    }
}

/// A positive S-rule in normalized form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SRule {
    pub id: String,
    /// One rewrite per part, in part order.
    pub parts: Vec<PartRewrite>,
    /// One domain per sector slot `0..=n_sectors+1`.
    pub domains: Vec<Domain>,
    pub tags: RuleTags,
}

/// A signed reference to a positive rule of a machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedRule {
    pub rule: usize,
    pub inv: bool,
}

impl SignedRule {
    pub fn pos(rule: usize) -> Self {
        SignedRule { rule, inv: false }
    }

    pub fn neg(rule: usize) -> Self {
        SignedRule { rule, inv: true }
    }

    pub fn inverse(self) -> Self {
        SignedRule {
            rule: self.rule,
            inv: !self.inv,
        }
    }
}

impl SRule {
    /// Validates a rule against hardware.
    pub fn new(
        id: impl Into<String>,
        parts: Vec<PartRewrite>,
        domains: Vec<Domain>,
        tags: RuleTags,
        hw: &Hardware,
    ) -> Result<Self> {
        let rule = SRule {
            id: id.into(),
            parts,
            domains,
            tags,
        };
        rule.validate(hw)?;
        Ok(rule)
    }

    pub fn validate(&self, hw: &Hardware) -> Result<()> {
        if self.parts.len() != hw.n_parts() {
            return Err(Error::Rule(format!(
                "rule `{}` covers {} parts, hardware has {}",
                self.id,
                self.parts.len(),
                hw.n_parts()
            )));
        }
        if self.domains.len() != hw.n_sectors() + 2 {
            return Err(Error::Rule(format!(
                "rule `{}` has {} domain slots, expected {}",
                self.id,
                self.domains.len(),
                hw.n_sectors() + 2
            )));
        }
        for (i, pr) in self.parts.iter().enumerate() {
            for q in [pr.src, pr.dst] {
                if hw.part_of(q) != Some(i) {
                    return Err(Error::Rule(format!(
                        "rule `{}` part {} uses state letter `{}` outside its part",
                        self.id,
                        i,
                        hw.letter_name(q)
                    )));
                }
            }
            if let Some(t) = pr.left {
                let sector = left_sector_of_part(hw, i);
                if !self.effective_domain_contains(hw, sector, t.letter) {
                    return Err(Error::Rule(format!(
                        "rule `{}` part {}: left multiplier `{}` outside its sector domain",
                        self.id,
                        i,
                        hw.letter_name(t.letter)
                    )));
                }
            }
            if let Some(t) = pr.right {
                let sector = right_sector_of_part(hw, i);
                if !self.effective_domain_contains(hw, sector, t.letter) {
                    return Err(Error::Rule(format!(
                        "rule `{}` part {}: right multiplier `{}` outside its sector domain",
                        self.id,
                        i,
                        hw.letter_name(t.letter)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Whether `letter` belongs to the rule's effective domain in `sector`.
    pub fn effective_domain_contains(&self, hw: &Hardware, sector: usize, letter: LetterId) -> bool {
        if hw.sector_of(letter) != Some(sector) {
            return false;
        }
        match &self.domains[sector] {
            Domain::Full => true,
            Domain::Empty => false,
            Domain::Sub(set) => set.contains(&letter),
        }
    }

    /// Whether the rule locks `sector` (empty effective domain).
    pub fn locks(&self, hw: &Hardware, sector: usize) -> bool {
        match &self.domains[sector] {
            Domain::Empty => true,
            Domain::Full => hw.tape_alphabets[sector].is_empty(),
            Domain::Sub(set) => set.is_empty(),
        }
    }

    /// The natural inverse: part rewrites reversed, domains preserved.
    pub fn invert(&self) -> SRule {
        SRule {
            id: format!("{}^-1", self.id),
            parts: self.parts.iter().map(PartRewrite::inverse).collect(),
            domains: self.domains.clone(),
            tags: self.tags.clone(),
        }
    }

    fn rewrite(&self, part: usize, inv: bool) -> PartRewrite {
        if inv {
            self.parts[part].inverse()
        } else {
            self.parts[part].clone()
        }
    }

    /// Why the rule is not applicable to `w`, or `None` if it is.
    pub fn inapplicability(&self, w: &AdmissibleWord, hw: &Hardware, inv: bool) -> Option<String> {
        let mut prev: Option<(usize, bool)> = None;
        let mut run_start = 0usize;
        for (i, t) in w.tokens.iter().enumerate() {
            if let Some(part) = hw.part_of(t.letter) {
                let rw = self.rewrite(part, inv);
                if rw.src != t.letter {
                    return Some(format!(
                        "state letter `{}` is not the rule's source in part {}",
                        hw.letter_name(t.letter),
                        part
                    ));
                }
                let here = (part, t.inv);
                if let Some(p) = prev {
                    let sector = hw
                        .sector_for_pair(p, here)
                        .expect("admissible word has legal base pairs");
                    for u in &w.tokens[run_start..i] {
                        if !self.effective_domain_contains(hw, sector, u.letter) {
                            return Some(format!(
                                "tape letter `{}` outside the rule's domain in sector {}",
                                hw.letter_name(u.letter),
                                sector
                            ));
                        }
                    }
                }
                prev = Some(here);
                run_start = i + 1;
            }
        }
        None
    }

    pub fn applicable(&self, w: &AdmissibleWord, hw: &Hardware, inv: bool) -> bool {
        self.inapplicability(w, hw, inv).is_none()
    }

    /// Applies the (signed) rule: every state letter occurrence `q^e` is
    /// replaced by `(a q' b)^e` simultaneously and the result is freely
    /// reduced. The base's part sequence is unchanged.
    pub fn apply(&self, w: &AdmissibleWord, hw: &Hardware, inv: bool) -> Result<AdmissibleWord> {
        if let Some(reason) = self.inapplicability(w, hw, inv) {
            return Err(Error::Rule(format!(
                "rule `{}`{} not applicable: {reason}",
                self.id,
                if inv { "^-1" } else { "" }
            )));
        }
        let mut out: Vec<Token> = Vec::with_capacity(w.tokens.len() + 2 * w.q_len(hw));
        for t in &w.tokens {
            match hw.part_of(t.letter) {
                Some(part) => {
                    let rw = self.rewrite(part, inv);
                    if !t.inv {
                        if let Some(a) = rw.left {
                            out.push(a);
                        }
                        out.push(Token::pos(rw.dst));
                        if let Some(b) = rw.right {
                            out.push(b);
                        }
                    } else {
                        if let Some(b) = rw.right {
                            out.push(b.inverse());
                        }
                        out.push(Token::neg(rw.dst));
                        if let Some(a) = rw.left {
                            out.push(a.inverse());
                        }
                    }
                }
                None => out.push(*t),
            }
        }
        let reduced = free_reduce(out);
        AdmissibleWord::parse(reduced, hw).map_err(|e| {
            Error::Rule(format!(
                "rule `{}` produced an inadmissible word: {e}",
                self.id
            ))
        })
    }
}

/// Sector index to the left of part `i`.
pub fn left_sector_of_part(hw: &Hardware, i: usize) -> usize {
    if i == 0 {
        if hw.cyclic {
            hw.wrap_sector()
        } else {
            0
        }
    } else {
        i
    }
}

/// Sector index to the right of part `i`.
pub fn right_sector_of_part(hw: &Hardware, i: usize) -> usize {
    if i == hw.n_parts() - 1 {
        hw.wrap_sector()
    } else {
        i + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardware::HardwareBuilder;

    fn two_sector() -> Hardware {
        HardwareBuilder::new("t")
            .part("Q0", vec!["q0".into()], 0, 0)
            .part("Q1", vec!["q1".into(), "q1'".into()], 0, 1)
            .part("Q2", vec!["q2".into()], 0, 0)
            .sector_alphabet(vec!["a".into(), "b".into()])
            .sector_alphabet(vec!["a'".into(), "b'".into()])
            .build()
            .unwrap()
    }

    fn full_domains(hw: &Hardware) -> Vec<Domain> {
        vec![Domain::Full; hw.n_sectors() + 2]
    }

    fn mover(hw: &Hardware) -> SRule {
        // q1 -> a^-1 q1 a' : moves a letter from sector 1 into sector 2.
        let a = hw.lookup("a").unwrap();
        let a2 = hw.lookup("a'").unwrap();
        SRule::new(
            "z",
            vec![
                PartRewrite::fixed(hw.lookup("q0").unwrap()),
                PartRewrite {
                    left: Some(Token::neg(a)),
                    src: hw.lookup("q1").unwrap(),
                    dst: hw.lookup("q1").unwrap(),
                    right: Some(Token::pos(a2)),
                },
                PartRewrite::fixed(hw.lookup("q2").unwrap()),
            ],
            full_domains(hw),
            RuleTags::label("z"),
            hw,
        )
        .unwrap()
    }

    #[test]
    fn apply_moves_letter_across_state() {
        let hw = two_sector();
        let r = mover(&hw);
        let w = AdmissibleWord::parse_text("q0 a q1 q2", &hw).unwrap();
        let v = r.apply(&w, &hw, false).unwrap();
        assert_eq!(v.text(&hw), "q0 q1 a' q2");
    }

    #[test]
    fn apply_then_inverse_roundtrips() {
        let hw = two_sector();
        let r = mover(&hw);
        let w = AdmissibleWord::parse_text("q0 a b q1 a' q2", &hw).unwrap();
        let v = r.apply(&w, &hw, false).unwrap();
        let back = r.apply(&v, &hw, true).unwrap();
        assert_eq!(w, back);
    }

    #[test]
    fn invert_is_involution_and_preserves_domains() {
        let hw = two_sector();
        let r = mover(&hw);
        let double = r.invert().invert();
        assert_eq!(r.parts, double.parts);
        assert_eq!(r.domains, r.invert().domains);
    }

    #[test]
    fn locked_sector_write_rejected() {
        let hw = two_sector();
        let a = hw.lookup("a").unwrap();
        let mut domains = full_domains(&hw);
        domains[1] = Domain::Empty;
        let r = SRule::new(
            "bad",
            vec![
                PartRewrite::fixed(hw.lookup("q0").unwrap()),
                PartRewrite {
                    left: Some(Token::pos(a)),
                    src: hw.lookup("q1").unwrap(),
                    dst: hw.lookup("q1'").unwrap(),
                    right: None,
                },
                PartRewrite::fixed(hw.lookup("q2").unwrap()),
            ],
            domains,
            RuleTags::label("bad"),
            &hw,
        );
        assert!(r.is_err());
    }

    #[test]
    fn locking_rule_requires_empty_sector() {
        let hw = two_sector();
        let mut domains = full_domains(&hw);
        domains[1] = Domain::Empty;
        let r = SRule::new(
            "lock",
            vec![
                PartRewrite::fixed(hw.lookup("q0").unwrap()),
                PartRewrite::state(hw.lookup("q1").unwrap(), hw.lookup("q1'").unwrap()),
                PartRewrite::fixed(hw.lookup("q2").unwrap()),
            ],
            domains,
            RuleTags::label("lock"),
            &hw,
        )
        .unwrap();
        let full = AdmissibleWord::parse_text("q0 a q1 q2", &hw).unwrap();
        let empty = AdmissibleWord::parse_text("q0 q1 q2", &hw).unwrap();
        assert!(!r.applicable(&full, &hw, false));
        assert!(r.applicable(&empty, &hw, false));
        assert!(r.locks(&hw, 1));
    }

    #[test]
    fn source_mismatch_not_applicable() {
        let hw = two_sector();
        let r = mover(&hw);
        let w = AdmissibleWord::parse_text("q0 q1' q2", &hw).unwrap();
        assert!(!r.applicable(&w, &hw, false));
    }

    #[test]
    fn free_reduction_absorbs_left_multiplier() {
        let hw = two_sector();
        // q1 -> b q1 : left-multiplies sector 1 by b on the right end.
        let b = hw.lookup("b").unwrap();
        let r = SRule::new(
            "tb",
            vec![
                PartRewrite::fixed(hw.lookup("q0").unwrap()),
                PartRewrite {
                    left: Some(Token::pos(b)),
                    src: hw.lookup("q1").unwrap(),
                    dst: hw.lookup("q1").unwrap(),
                    right: None,
                },
                PartRewrite::fixed(hw.lookup("q2").unwrap()),
            ],
            vec![Domain::Full; hw.n_sectors() + 2],
            RuleTags::label("tb"),
            &hw,
        )
        .unwrap();
        let w = AdmissibleWord::parse_text("q0 a b^-1 q1 q2", &hw).unwrap();
        let v = r.apply(&w, &hw, false).unwrap();
        assert_eq!(v.text(&hw), "q0 a q1 q2");
    }

    #[test]
    fn double_occurrence_rewrites_both() {
        let hw = two_sector();
        // q1 -> q1 b' : right-multiplies into sector 2.
        let b2 = hw.lookup("b'").unwrap();
        let r = SRule::new(
            "tb",
            vec![
                PartRewrite::fixed(hw.lookup("q0").unwrap()),
                PartRewrite {
                    left: None,
                    src: hw.lookup("q1").unwrap(),
                    dst: hw.lookup("q1").unwrap(),
                    right: Some(Token::pos(b2)),
                },
                PartRewrite::fixed(hw.lookup("q2").unwrap()),
            ],
            vec![Domain::Full; hw.n_sectors() + 2],
            RuleTags::label("tb"),
            &hw,
        )
        .unwrap();
        // base Q1 Q1^-1: the enclosed sector carries the alphabet after Q1,
        // and both occurrences are rewritten simultaneously.
        let w = AdmissibleWord::parse_text("q1 a' q1^-1", &hw).unwrap();
        let v = r.apply(&w, &hw, false).unwrap();
        assert_eq!(v.text(&hw), "q1 b' a' b'^-1 q1^-1");
    }
}
