//! Machine hardware: parts, tape alphabets, sector structure, and the
//! language of admissible words.
//!
//! A hardware value interns every letter once. State letters belong to a
//! part, tape letters to a sector alphabet. Sector alphabets are indexed
//! `1..=n_sectors` (sector `j` lies between parts `j-1` and `j`); index 0 is
//! the always-empty left margin and index `n_sectors + 1` the wrap sector of
//! a cyclic machine.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

pub type LetterId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LetterKind {
    /// State letter of the given part.
    State { part: usize },
    /// Tape letter of the given sector alphabet.
    Tape { sector: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LetterInfo {
    pub name: String,
    pub kind: LetterKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Part {
    pub name: String,
    pub letters: Vec<LetterId>,
    pub start: LetterId,
    pub end: LetterId,
}

/// A signed occurrence of a letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Token {
    pub letter: LetterId,
    pub inv: bool,
}

impl Token {
    pub fn pos(letter: LetterId) -> Self {
        Token { letter, inv: false }
    }

    pub fn neg(letter: LetterId) -> Self {
        Token { letter, inv: true }
    }

    pub fn inverse(self) -> Self {
        Token {
            letter: self.letter,
            inv: !self.inv,
        }
    }
}

/// Free reduction of a token word; cancels adjacent mutually inverse tokens.
pub fn free_reduce(tokens: impl IntoIterator<Item = Token>) -> Vec<Token> {
    let mut out: Vec<Token> = Vec::new();
    for t in tokens {
        match out.last() {
            Some(&last) if last.letter == t.letter && last.inv != t.inv => {
                out.pop();
            }
            _ => out.push(t),
        }
    }
    out
}

/// Inverse of a token word.
pub fn invert_word(tokens: &[Token]) -> Vec<Token> {
    tokens.iter().rev().map(|t| t.inverse()).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Hardware {
    pub name: String,
    pub parts: Vec<Part>,
    /// Sector alphabets indexed `0..=n_sectors+1`; `[0]` is empty.
    pub tape_alphabets: Vec<Vec<LetterId>>,
    pub cyclic: bool,
    letters: Vec<LetterInfo>,
    #[serde(skip)]
    by_name: HashMap<String, LetterId>,
}

impl Hardware {
    pub fn n_parts(&self) -> usize {
        self.parts.len()
    }

    /// Number of interior sectors of the standard base.
    pub fn n_sectors(&self) -> usize {
        self.parts.len() - 1
    }

    /// Index of the wrap sector (meaningful only for cyclic machines).
    pub fn wrap_sector(&self) -> usize {
        self.parts.len()
    }

    pub fn letter(&self, id: LetterId) -> &LetterInfo {
        &self.letters[id as usize]
    }

    pub fn letter_name(&self, id: LetterId) -> &str {
        &self.letters[id as usize].name
    }

    pub fn lookup(&self, name: &str) -> Option<LetterId> {
        self.by_name.get(name).copied()
    }

    pub fn n_letters(&self) -> usize {
        self.letters.len()
    }

    pub fn is_state(&self, id: LetterId) -> bool {
        matches!(self.letter(id).kind, LetterKind::State { .. })
    }

    pub fn part_of(&self, id: LetterId) -> Option<usize> {
        match self.letter(id).kind {
            LetterKind::State { part } => Some(part),
            _ => None,
        }
    }

    pub fn sector_of(&self, id: LetterId) -> Option<usize> {
        match self.letter(id).kind {
            LetterKind::Tape { sector } => Some(sector),
            _ => None,
        }
    }

    /// Rebuilds the name index after deserialization.
    pub fn reindex(&mut self) {
        self.by_name = self
            .letters
            .iter()
            .enumerate()
            .map(|(i, l)| (l.name.clone(), i as LetterId))
            .collect();
    }

    /// The sector alphabet index assigned to an ordered signed part pair, per
    /// the three admissibility conditions, or `None` for an illegal pair.
    pub fn sector_for_pair(&self, left: (usize, bool), right: (usize, bool)) -> Option<usize> {
        let n = self.n_parts();
        let (lp, linv) = left;
        let (rp, rinv) = right;
        match (linv, rinv) {
            // Q_{j-1} u Q_j
            (false, false) => {
                if rp == lp + 1 {
                    Some(rp)
                } else if self.cyclic && lp == n - 1 && rp == 0 {
                    Some(self.wrap_sector())
                } else {
                    None
                }
            }
            // (Q_{j-1} u Q_j)^{-1} read as Q_j^{-1} u^{-1} Q_{j-1}^{-1}
            (true, true) => {
                if lp == rp + 1 {
                    Some(lp)
                } else if self.cyclic && lp == 0 && rp == n - 1 {
                    Some(self.wrap_sector())
                } else {
                    None
                }
            }
            // q u q^{-1}, q in Q_j, u in F(Y_{j+1})
            (false, true) => {
                if lp == rp {
                    if self.cyclic && lp == n - 1 {
                        Some(self.wrap_sector())
                    } else {
                        Some(lp + 1)
                    }
                } else {
                    None
                }
            }
            // q^{-1} u q, q in Q_j, u in F(Y_j)
            (true, false) => {
                if lp == rp {
                    if self.cyclic && lp == 0 {
                        Some(self.wrap_sector())
                    } else {
                        Some(lp)
                    }
                } else {
                    None
                }
            }
        }
    }

    pub fn token_name(&self, t: Token) -> String {
        if t.inv {
            format!("{}^-1", self.letter_name(t.letter))
        } else {
            self.letter_name(t.letter).to_string()
        }
    }

    pub fn word_text(&self, tokens: &[Token]) -> String {
        tokens
            .iter()
            .map(|&t| self.token_name(t))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse_token(&self, text: &str) -> Result<Token> {
        let (name, inv) = match text.strip_suffix("^-1") {
            Some(base) => (base, true),
            None => (text, false),
        };
        let letter = self
            .lookup(name)
            .ok_or_else(|| Error::Word(format!("unknown letter `{name}`")))?;
        Ok(Token { letter, inv })
    }

    pub fn parse_tokens(&self, text: &str) -> Result<Vec<Token>> {
        text.split_whitespace().map(|t| self.parse_token(t)).collect()
    }
}

/// Builder for hardware values; interns letters and validates the result.
#[derive(Debug, Default)]
pub struct HardwareBuilder {
    name: String,
    parts: Vec<(String, Vec<String>, usize, usize)>,
    alphabets: Vec<Vec<String>>,
    wrap_alphabet: Vec<String>,
    cyclic: bool,
}

impl HardwareBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        HardwareBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    /// Adds a part; `start`/`end` are indices into `letters`.
    pub fn part(
        mut self,
        name: impl Into<String>,
        letters: Vec<String>,
        start: usize,
        end: usize,
    ) -> Self {
        self.parts.push((name.into(), letters, start, end));
        self
    }

    /// Declares the alphabet of the sector left of part `j` (so call order
    /// matters: the `j`-th call names sector `j`).
    pub fn sector_alphabet(mut self, letters: Vec<String>) -> Self {
        self.alphabets.push(letters);
        self
    }

    pub fn cyclic(mut self, wrap_alphabet: Vec<String>) -> Self {
        self.cyclic = true;
        self.wrap_alphabet = wrap_alphabet;
        self
    }

    pub fn build(self) -> Result<Hardware> {
        if self.parts.is_empty() {
            return Err(Error::Hardware("no parts declared".into()));
        }
        let n_sectors = self.parts.len() - 1;
        if self.alphabets.len() != n_sectors {
            return Err(Error::Hardware(format!(
                "{} sector alphabets declared for {} sectors",
                self.alphabets.len(),
                n_sectors
            )));
        }
        let mut letters = Vec::new();
        let mut by_name: HashMap<String, LetterId> = HashMap::new();
        let mut intern = |name: &str, kind: LetterKind, letters: &mut Vec<LetterInfo>| {
            if by_name.contains_key(name) {
                return Err(Error::Hardware(format!("duplicate letter name `{name}`")));
            }
            let id = letters.len() as LetterId;
            letters.push(LetterInfo {
                name: name.to_string(),
                kind,
            });
            by_name.insert(name.to_string(), id);
            Ok(id)
        };

        let mut parts = Vec::new();
        for (pi, (pname, pletters, start, end)) in self.parts.iter().enumerate() {
            if pletters.is_empty() {
                return Err(Error::Hardware(format!("part `{pname}` has no letters")));
            }
            if *start >= pletters.len() || *end >= pletters.len() {
                return Err(Error::Hardware(format!(
                    "start/end letter out of range in part `{pname}`"
                )));
            }
            let mut ids = Vec::new();
            for l in pletters {
                ids.push(intern(l, LetterKind::State { part: pi }, &mut letters)?);
            }
            parts.push(Part {
                name: pname.clone(),
                letters: ids.clone(),
                start: ids[*start],
                end: ids[*end],
            });
        }

        // tape_alphabets[0] is the empty left margin; wrap occupies the last slot.
        let mut tape_alphabets = vec![Vec::new()];
        for (si, alpha) in self.alphabets.iter().enumerate() {
            let mut ids = Vec::new();
            for l in alpha {
                ids.push(intern(l, LetterKind::Tape { sector: si + 1 }, &mut letters)?);
            }
            tape_alphabets.push(ids);
        }
        let mut wrap = Vec::new();
        for l in &self.wrap_alphabet {
            wrap.push(intern(
                l,
                LetterKind::Tape {
                    sector: self.parts.len(),
                },
                &mut letters,
            )?);
        }
        tape_alphabets.push(wrap);

        let mut hw = Hardware {
            name: self.name,
            parts,
            tape_alphabets,
            cyclic: self.cyclic,
            letters,
            by_name: HashMap::new(),
        };
        hw.reindex();
        Ok(hw)
    }
}

/// A validated admissible word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdmissibleWord {
    pub tokens: Vec<Token>,
}

/// Aggregate measures of an admissible word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measures {
    pub a_len: usize,
    pub q_len: usize,
    pub base: Vec<(usize, bool)>,
    pub is_tame: Option<bool>,
}

/// Shape annotations for tameness checks on M3/M4-style machines: the
/// always-locked sectors flanking state letters and the historical sectors
/// with their left/right alphabet split.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TameShape {
    pub flank_sectors: Vec<usize>,
    pub historical: Vec<HistoricalSector>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HistoricalSector {
    pub sector: usize,
    pub left: Vec<LetterId>,
    pub right: Vec<LetterId>,
}

impl AdmissibleWord {
    /// Validates a token stream as an admissible word.
    ///
    /// Rejects unreduced words, broken alternation, illegal base pairs, and
    /// tape letters outside the sector alphabet dictated by the pair.
    pub fn parse(tokens: Vec<Token>, hw: &Hardware) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::Word("empty word is not admissible".into()));
        }
        let reduced = free_reduce(tokens.iter().copied());
        if reduced != tokens {
            return Err(Error::Word("word is not freely reduced".into()));
        }
        if !hw.is_state(tokens[0].letter) || !hw.is_state(tokens[tokens.len() - 1].letter) {
            return Err(Error::Word(
                "admissible word must start and end with state letters".into(),
            ));
        }
        let mut prev_q: Option<(usize, bool)> = None;
        let mut run_start = 0usize;
        for (i, t) in tokens.iter().enumerate() {
            if let Some(part) = hw.part_of(t.letter) {
                let here = (part, t.inv);
                if let Some(prev) = prev_q {
                    let sector = hw.sector_for_pair(prev, here).ok_or_else(|| {
                        Error::Word(format!(
                            "illegal base pair {}{} {}{}",
                            hw.parts[prev.0].name,
                            if prev.1 { "^-1" } else { "" },
                            hw.parts[here.0].name,
                            if here.1 { "^-1" } else { "" },
                        ))
                    })?;
                    for u in &tokens[run_start..i] {
                        if hw.sector_of(u.letter) != Some(sector) {
                            return Err(Error::Word(format!(
                                "tape letter `{}` outside sector {} alphabet",
                                hw.letter_name(u.letter),
                                sector
                            )));
                        }
                    }
                }
                prev_q = Some(here);
                run_start = i + 1;
            } else if prev_q.is_none() {
                return Err(Error::Word(
                    "tape letters before the first state letter".into(),
                ));
            }
        }
        Ok(AdmissibleWord { tokens })
    }

    pub fn parse_text(text: &str, hw: &Hardware) -> Result<Self> {
        Self::parse(hw.parse_tokens(text)?, hw)
    }

    pub fn text(&self, hw: &Hardware) -> String {
        hw.word_text(&self.tokens)
    }

    /// The base: signed part symbols of the state letters, in order.
    pub fn base(&self, hw: &Hardware) -> Vec<(usize, bool)> {
        self.tokens
            .iter()
            .filter_map(|t| hw.part_of(t.letter).map(|p| (p, t.inv)))
            .collect()
    }

    pub fn a_len(&self, hw: &Hardware) -> usize {
        self.tokens
            .iter()
            .filter(|t| !hw.is_state(t.letter))
            .count()
    }

    pub fn q_len(&self, hw: &Hardware) -> usize {
        self.tokens.iter().filter(|t| hw.is_state(t.letter)).count()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Positions of the state letters.
    pub fn q_positions(&self, hw: &Hardware) -> Vec<usize> {
        self.tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| hw.is_state(t.letter))
            .map(|(i, _)| i)
            .collect()
    }

    /// The sector words (between consecutive state letters), in order.
    pub fn sector_words(&self, hw: &Hardware) -> Vec<Vec<Token>> {
        let qs = self.q_positions(hw);
        qs.windows(2)
            .map(|w| self.tokens[w[0] + 1..w[1]].to_vec())
            .collect()
    }

    /// Whether the word is a configuration: standard base, all positive.
    pub fn is_configuration(&self, hw: &Hardware) -> bool {
        let base = self.base(hw);
        base.len() == hw.n_parts()
            && base
                .iter()
                .enumerate()
                .all(|(i, &(p, inv))| p == i && !inv)
    }

    pub fn measures(&self, hw: &Hardware, tame: Option<&TameShape>) -> Result<Measures> {
        let is_tame = match tame {
            None => None,
            Some(shape) => {
                if !self.is_configuration(hw) {
                    return Err(Error::Word(
                        "tameness is defined only for configurations".into(),
                    ));
                }
                Some(self.is_tame(hw, shape))
            }
        };
        Ok(Measures {
            a_len: self.a_len(hw),
            q_len: self.q_len(hw),
            base: self.base(hw),
            is_tame,
        })
    }

    /// Tameness for a configuration of an M3/M4-shaped machine: running
    /// letters hug their Q-letters and no historical sector mixes left and
    /// right alphabets.
    pub fn is_tame(&self, hw: &Hardware, shape: &TameShape) -> bool {
        let sectors = self.sector_words(hw);
        for &s in &shape.flank_sectors {
            if s >= 1 && s <= sectors.len() && !sectors[s - 1].is_empty() {
                return false;
            }
        }
        for h in &shape.historical {
            if h.sector < 1 || h.sector > sectors.len() {
                continue;
            }
            let w = &sectors[h.sector - 1];
            let has_left = w.iter().any(|t| h.left.contains(&t.letter));
            let has_right = w.iter().any(|t| h.right.contains(&t.letter));
            if has_left && has_right {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for AdmissibleWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<word of {} tokens>", self.tokens.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lr_like() -> Hardware {
        HardwareBuilder::new("lr")
            .part("Q1", vec!["q1".into()], 0, 0)
            .part("P", vec!["p1".into(), "p2".into()], 0, 1)
            .part("Q2", vec!["q2".into()], 0, 0)
            .sector_alphabet(vec!["Y1.a".into(), "Y1.b".into()])
            .sector_alphabet(vec!["Y2.a".into(), "Y2.b".into()])
            .build()
            .unwrap()
    }

    #[test]
    fn builds_three_part_hardware() {
        let hw = lr_like();
        assert_eq!(hw.n_parts(), 3);
        assert_eq!(hw.n_sectors(), 2);
        assert_eq!(hw.tape_alphabets[1].len(), 2);
    }

    #[test]
    fn empty_alphabets_allowed() {
        let hw = HardwareBuilder::new("bare")
            .part("Q0", vec!["q0".into()], 0, 0)
            .part("Q1", vec!["q1".into()], 0, 0)
            .sector_alphabet(vec![])
            .build()
            .unwrap();
        let w = AdmissibleWord::parse_text("q0 q1", &hw).unwrap();
        assert_eq!(w.a_len(&hw), 0);
    }

    #[test]
    fn duplicate_letter_rejected() {
        let r = HardwareBuilder::new("dup")
            .part("Q0", vec!["p".into()], 0, 0)
            .part("Q1", vec!["p".into()], 0, 0)
            .sector_alphabet(vec![])
            .build();
        assert!(r.is_err());
    }

    #[test]
    fn parses_admissible_word() {
        let hw = lr_like();
        let w = AdmissibleWord::parse_text("q1 Y1.a p1 q2", &hw).unwrap();
        assert_eq!(w.base(&hw), vec![(0, false), (1, false), (2, false)]);
        assert_eq!(w.a_len(&hw), 1);
        assert_eq!(w.q_len(&hw), 3);
    }

    #[test]
    fn unreduced_rejected() {
        let hw = lr_like();
        let r = AdmissibleWord::parse_text("q1 Y1.a Y1.a^-1 p1 q2", &hw);
        assert!(r.is_err());
    }

    #[test]
    fn q_u_qinv_uses_following_sector() {
        let hw = lr_like();
        // q1 u q1^-1 with u in the sector after Q1 (sector 1? no: condition 2
        // puts u in F(Y_{j+1}) = the PQ2 alphabet for j = P).
        let w = AdmissibleWord::parse_text("p1 Y2.a p1^-1", &hw).unwrap();
        assert_eq!(w.base(&hw), vec![(1, false), (1, true)]);
        // and the same content in the left alphabet is rejected
        assert!(AdmissibleWord::parse_text("p1 Y1.a p1^-1", &hw).is_err());
        // condition 3: q^-1 u q with u in F(Y_j)
        assert!(AdmissibleWord::parse_text("p1^-1 Y1.a p1", &hw).is_ok());
    }

    #[test]
    fn illegal_pair_rejected() {
        let hw = lr_like();
        assert!(AdmissibleWord::parse_text("q1 q2", &hw).is_err());
        assert!(AdmissibleWord::parse_text("p1^-1 q2", &hw).is_err());
    }

    #[test]
    fn roundtrip_text() {
        let hw = lr_like();
        let w = AdmissibleWord::parse_text("q1 Y1.a^-1 Y1.b p1 Y2.a q2", &hw).unwrap();
        let again = AdmissibleWord::parse_text(&w.text(&hw), &hw).unwrap();
        assert_eq!(w, again);
    }
}
