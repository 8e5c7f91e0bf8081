//! Machines and the combinators that build the tower.

pub mod base;
pub mod primitive;
pub mod tower;

pub use base::{cyclic_nth_root, BaseKind, BaseMachine};
pub use primitive::{Primitive, PrimitiveKind};
pub use tower::Tower;

use crate::hardware::{AdmissibleWord, Hardware, TameShape, Token};
use crate::rules::{SRule, SignedRule};
use crate::{Error, Result};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Role of a sector in the standard base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SectorRole {
    /// Empty-alphabet padding (margins, wrap, the seam of a mirror double).
    Empty,
    Input,
    /// The first input sector of the main machine.
    SpecialInput,
    Working,
    Historical,
    /// Non-historical scratch zones swept by primitive submachines.
    Scratch,
}

/// A machine: hardware plus a symmetric rule set, stored as positive rules
/// with negatives derived by inversion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Machine {
    pub hardware: Hardware,
    pub rules: Vec<SRule>,
    pub input_sectors: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub special_input: Option<usize>,
    pub sector_roles: Vec<SectorRole>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tame: Option<TameShape>,
    #[serde(skip)]
    rule_by_id: HashMap<String, usize>,
    /// Candidate filter for rule search, keyed by the source (positive) or
    /// destination (negative) letter at the pivot part.
    #[serde(skip)]
    pivot: Option<PivotIndex>,
}

#[derive(Debug, Clone, Default)]
struct PivotIndex {
    part: usize,
    by_src: HashMap<u32, Vec<usize>>,
    by_dst: HashMap<u32, Vec<usize>>,
}

impl Machine {
    pub fn new(
        hardware: Hardware,
        rules: Vec<SRule>,
        input_sectors: Vec<usize>,
        sector_roles: Vec<SectorRole>,
    ) -> Result<Self> {
        let mut m = Machine {
            hardware,
            rules,
            input_sectors,
            special_input: None,
            sector_roles,
            tame: None,
            rule_by_id: HashMap::new(),
            pivot: None,
        };
        m.reindex();
        m.validate()?;
        Ok(m)
    }

    pub fn reindex(&mut self) {
        self.hardware.reindex();
        self.rule_by_id = self
            .rules
            .iter()
            .enumerate()
            .map(|(i, r)| (r.id.clone(), i))
            .collect();
        // Pivot on the part with the most letters: its source letter almost
        // always identifies the submachine a rule belongs to.
        let part = (0..self.hardware.n_parts())
            .max_by_key(|&p| self.hardware.parts[p].letters.len())
            .unwrap_or(0);
        let mut idx = PivotIndex {
            part,
            ..Default::default()
        };
        for (i, r) in self.rules.iter().enumerate() {
            idx.by_src.entry(r.parts[part].src).or_default().push(i);
            idx.by_dst.entry(r.parts[part].dst).or_default().push(i);
        }
        self.pivot = Some(idx);
    }

    pub fn validate(&self) -> Result<()> {
        for r in &self.rules {
            r.validate(&self.hardware)?;
        }
        for &s in &self.input_sectors {
            if s == 0 || s > self.hardware.wrap_sector() {
                return Err(Error::Machine(format!("input sector {s} out of range")));
            }
        }
        if self.sector_roles.len() != self.hardware.n_sectors() + 2 {
            return Err(Error::Machine("sector role table has wrong length".into()));
        }
        if self.rule_by_id.len() != self.rules.len() {
            return Err(Error::Machine("duplicate rule ids".into()));
        }
        Ok(())
    }

    pub fn n_rules(&self) -> usize {
        self.rules.len()
    }

    pub fn rule(&self, id: &str) -> Option<&SRule> {
        self.rule_by_id.get(id).map(|&i| &self.rules[i])
    }

    pub fn rule_index(&self, id: &str) -> Option<usize> {
        self.rule_by_id.get(id).copied()
    }

    pub fn signed(&self, id: &str, inv: bool) -> Result<SignedRule> {
        let rule = self
            .rule_index(id)
            .ok_or_else(|| Error::Machine(format!("unknown rule `{id}`")))?;
        Ok(SignedRule { rule, inv })
    }

    pub fn rule_name(&self, s: SignedRule) -> String {
        let base = &self.rules[s.rule].id;
        if s.inv {
            format!("{base}^-1")
        } else {
            base.clone()
        }
    }

    pub fn apply(&self, w: &AdmissibleWord, s: SignedRule) -> Result<AdmissibleWord> {
        self.rules[s.rule].apply(w, &self.hardware, s.inv)
    }

    pub fn applicable(&self, w: &AdmissibleWord, s: SignedRule) -> bool {
        self.rules[s.rule].applicable(w, &self.hardware, s.inv)
    }

    /// All signed rules applicable to `w`, in deterministic order (positive
    /// rules in declaration order, then negatives).
    pub fn applicable_rules(&self, w: &AdmissibleWord) -> Vec<SignedRule> {
        let mut out = Vec::new();
        let pivot_letter = self.pivot.as_ref().and_then(|p| {
            w.tokens
                .iter()
                .find(|t| self.hardware.part_of(t.letter) == Some(p.part))
                .map(|t| t.letter)
        });
        match (self.pivot.as_ref(), pivot_letter) {
            (Some(p), Some(l)) => {
                static EMPTY: Vec<usize> = Vec::new();
                for &i in p.by_src.get(&l).unwrap_or(&EMPTY) {
                    if self.applicable(w, SignedRule::pos(i)) {
                        out.push(SignedRule::pos(i));
                    }
                }
                for &i in p.by_dst.get(&l).unwrap_or(&EMPTY) {
                    if self.applicable(w, SignedRule::neg(i)) {
                        out.push(SignedRule::neg(i));
                    }
                }
            }
            _ => {
                for i in 0..self.rules.len() {
                    if self.applicable(w, SignedRule::pos(i)) {
                        out.push(SignedRule::pos(i));
                    }
                    if self.applicable(w, SignedRule::neg(i)) {
                        out.push(SignedRule::neg(i));
                    }
                }
            }
        }
        out
    }

    /// The accept configuration: end letters of every part, all sectors empty.
    pub fn accept_config(&self) -> AdmissibleWord {
        AdmissibleWord {
            tokens: self
                .hardware
                .parts
                .iter()
                .map(|p| Token::pos(p.end))
                .collect(),
        }
    }

    /// Start configuration with the given sector contents (sector -> word).
    pub fn start_config(&self, contents: &HashMap<usize, Vec<Token>>) -> Result<AdmissibleWord> {
        self.config_with(|p| p.start, contents)
    }

    pub fn config_with(
        &self,
        letter: impl Fn(&crate::hardware::Part) -> u32,
        contents: &HashMap<usize, Vec<Token>>,
    ) -> Result<AdmissibleWord> {
        let mut tokens = Vec::new();
        for (i, p) in self.hardware.parts.iter().enumerate() {
            tokens.push(Token::pos(letter(p)));
            if i + 1 < self.hardware.n_parts() {
                if let Some(w) = contents.get(&(i + 1)) {
                    tokens.extend(w.iter().copied());
                }
            }
        }
        AdmissibleWord::parse(tokens, &self.hardware)
    }

    /// Rule counts keyed by the human-readable phase of their tags.
    pub fn rule_counts_by_phase(&self) -> Vec<(String, usize)> {
        let mut counts: Vec<(String, usize)> = Vec::new();
        for r in &self.rules {
            let key = phase_key(r);
            match counts.iter_mut().find(|(k, _)| *k == key) {
                Some((_, c)) => *c += 1,
                None => counts.push((key, 1)),
            }
        }
        counts
    }

    /// Human-readable summary: parts, sector roles, rule counts.
    pub fn describe(&self) -> String {
        let hw = &self.hardware;
        let mut s = String::new();
        s.push_str(&format!(
            "machine {}: {} parts, {} sectors{}, {} positive rules\n",
            hw.name,
            hw.n_parts(),
            hw.n_sectors(),
            if hw.cyclic { " (cyclic)" } else { "" },
            self.rules.len()
        ));
        for (i, p) in hw.parts.iter().enumerate() {
            s.push_str(&format!(
                "  part {:3} {:24} {} letters (start {}, end {})\n",
                i,
                p.name,
                p.letters.len(),
                hw.letter_name(p.start),
                hw.letter_name(p.end)
            ));
        }
        for sec in 1..=hw.n_sectors() + if hw.cyclic { 1 } else { 0 } {
            s.push_str(&format!(
                "  sector {:3} [{}..{}] {:?}, {} letters\n",
                sec,
                hw.parts[sec - 1].name,
                hw.parts[sec % hw.n_parts()].name,
                self.sector_roles[sec],
                hw.tape_alphabets[sec].len()
            ));
        }
        for (phase, count) in self.rule_counts_by_phase() {
            s.push_str(&format!("  rules {phase}: {count}\n"));
        }
        s
    }
}

fn phase_key(r: &SRule) -> String {
    use crate::rules::{MTrans, PhaseTag};
    let mut key = String::new();
    if let Some(i) = r.tags.machine_index {
        key.push_str(&format!("machine{i}."));
    }
    match (&r.tags.m_trans, &r.tags.m5, &r.tags.m3) {
        (Some(MTrans::Start), _, _) => key.push_str("theta(s)"),
        (Some(MTrans::Accept), _, _) => key.push_str("theta(a)"),
        (None, Some(PhaseTag::Phase(p)), _) => key.push_str(&format!("m5({p})")),
        (None, Some(PhaseTag::Trans(a, b)), _) => key.push_str(&format!("theta({a}{b})")),
        (None, Some(PhaseTag::Accept), _) => key.push_str("theta0"),
        (None, None, Some(PhaseTag::Phase(p))) => key.push_str(&format!("m3({p})")),
        (None, None, Some(PhaseTag::Trans(a, b))) => key.push_str(&format!("chi({a},{b})")),
        _ => key.push_str("base"),
    }
    key
}

/// Build parameters for the tower.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Odd Burnside exponent.
    pub n: u32,
    /// Primitive-machine repetition count.
    pub k: u32,
    /// Cyclic multiplicity of the main machine.
    pub l: u32,
    /// Modified-length weight of an a-letter, in (0,1).
    pub delta: Ratio<i64>,
    /// Weight coefficient for disks and a-cells.
    pub c7: Ratio<i64>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            n: 3,
            k: 2,
            l: 4,
            delta: Ratio::new(1, 100),
            c7: Ratio::new(1, 1),
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n % 2 == 0 {
            return Err(Error::Machine(format!("n must be odd and >= 1, got {}", self.n)));
        }
        if self.k == 0 {
            return Err(Error::Machine("k must be >= 1".into()));
        }
        if self.l < 2 {
            return Err(Error::Machine("L must be >= 2".into()));
        }
        if self.delta <= Ratio::new(0, 1) || self.delta >= Ratio::new(1, 1) {
            return Err(Error::Machine("delta must lie in (0,1)".into()));
        }
        if self.c7 <= Ratio::new(0, 1) {
            return Err(Error::Machine("c7 must be positive".into()));
        }
        Ok(())
    }
}
