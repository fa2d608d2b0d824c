//! Monotone access-structure formulas: parsing, printing and evaluation.
//!
//! Grammar (keywords case-insensitive, whitespace ignored, AND binds tighter
//! than OR):
//!
//! ```text
//! expr   := term ('OR' term)*
//! term   := factor ('AND' factor)*
//! factor := 'P'<int> | 'THRESH(' <int> ';' expr (',' expr)+ ')' | '(' expr ')'
//! ```

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A set of parties drawn from `1..=63`, stored as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartySet(u64);

impl PartySet {
    pub const MAX_PARTIES: usize = 63;

    pub fn empty() -> Self {
        PartySet(0)
    }

    /// `{1, …, p}`.
    pub fn full(parties: usize) -> Self {
        assert!(parties <= Self::MAX_PARTIES);
        PartySet(((1u128 << parties) - 1) as u64 * 2)
    }

    pub fn from_bits(bits: u64) -> Self {
        PartySet(bits & !1)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, party: usize) -> bool {
        (1..=Self::MAX_PARTIES).contains(&party) && self.0 >> party & 1 == 1
    }

    pub fn insert(&mut self, party: usize) {
        assert!((1..=Self::MAX_PARTIES).contains(&party), "party {party} out of range");
        self.0 |= 1 << party;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: PartySet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: PartySet) -> PartySet {
        PartySet(self.0 | other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (1..=Self::MAX_PARTIES).filter(move |&i| self.contains(i))
    }

    /// Every subset of `{1, …, p}`, in increasing bitmask order.
    pub fn all_subsets(parties: usize) -> impl Iterator<Item = PartySet> {
        assert!(parties < Self::MAX_PARTIES);
        (0u64..1 << parties).map(|m| PartySet(m << 1))
    }
}

impl FromIterator<usize> for PartySet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = PartySet::empty();
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl fmt::Display for PartySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl FromStr for PartySet {
    type Err = String;

    /// Accepts `1,2,3`, `{1,2,3}` or the empty string.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
        let mut set = PartySet::empty();
        for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let i: usize = part
                .trim_start_matches(['P', 'p'])
                .parse()
                .map_err(|_| format!("invalid party index {part:?}"))?;
            if !(1..=Self::MAX_PARTIES).contains(&i) {
                return Err(format!("party index {i} out of range"));
            }
            set.insert(i);
        }
        Ok(set)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Party(usize),
    Threshold { threshold: usize, children: Vec<Formula> },
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at column {}: {message}", position + 1)]
    Syntax { position: usize, message: String },
    #[error("party P{index} at column {} is outside 1..={parties}", position + 1)]
    PartyOutOfRange { position: usize, index: usize, parties: usize },
    #[error("threshold {threshold} at column {} is outside 1..={fan_in}", position + 1)]
    ThresholdOutOfRange { position: usize, threshold: usize, fan_in: usize },
    #[error("party P{0} never appears in the formula")]
    UnmentionedParty(usize),
    #[error("party count {0} is unsupported (must be 1..=63)")]
    PartyCount(usize),
}

impl Formula {
    /// `THRESH(n; P1, …, Pp)`, or the single leaf when `p = 1`.
    pub fn threshold_of(n: usize, parties: usize) -> Formula {
        if parties == 1 {
            return Formula::Party(1);
        }
        Formula::Threshold {
            threshold: n,
            children: (1..=parties).map(Formula::Party).collect(),
        }
    }

    /// The gate as `(t, children)`; `None` for a leaf.
    pub fn gate(&self) -> Option<(usize, &[Formula])> {
        match self {
            Formula::Party(_) => None,
            Formula::Threshold { threshold, children } => Some((*threshold, children)),
            Formula::And(ch) => Some((ch.len(), ch)),
            Formula::Or(ch) => Some((1, ch)),
        }
    }

    pub fn max_fan_in(&self) -> usize {
        match self.gate() {
            None => 1,
            Some((_, ch)) => ch.iter().map(Formula::max_fan_in).max().unwrap_or(0).max(ch.len()),
        }
    }

    /// Largest fan-in among gates that need more than one child (`t >= 2`).
    pub fn max_gate_fan_in(&self) -> usize {
        match self.gate() {
            None => 0,
            Some((t, ch)) => {
                let own = if t >= 2 { ch.len() } else { 0 };
                ch.iter().map(Formula::max_gate_fan_in).max().unwrap_or(0).max(own)
            }
        }
    }

    pub fn mentioned(&self) -> PartySet {
        match self {
            Formula::Party(i) => [*i].into_iter().collect(),
            _ => self
                .gate()
                .map(|(_, ch)| ch.iter().fold(PartySet::empty(), |s, c| s.union(c.mentioned())))
                .unwrap_or_default(),
        }
    }

    /// Monotone evaluation on the set `s`.
    pub fn qualifies(&self, s: PartySet) -> bool {
        match self.gate() {
            None => match self {
                Formula::Party(i) => s.contains(*i),
                _ => unreachable!(),
            },
            Some((t, ch)) => ch.iter().filter(|c| c.qualifies(s)).count() >= t,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Or(_) => 0,
            Formula::And(_) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // AND/OR operands that are themselves AND/OR are always parenthesized,
        // so the printed text parses back to the same tree.
        fn child(f: &mut fmt::Formatter<'_>, c: &Formula) -> fmt::Result {
            if c.precedence() < 2 {
                write!(f, "({c})")
            } else {
                write!(f, "{c}")
            }
        }
        match self {
            Formula::Party(i) => write!(f, "P{i}"),
            Formula::Threshold { threshold, children } => {
                write!(f, "THRESH({threshold}; ")?;
                for (k, c) in children.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
            Formula::And(ch) | Formula::Or(ch) => {
                let op = if matches!(self, Formula::And(_)) { "AND" } else { "OR" };
                for (k, c) in ch.iter().enumerate() {
                    if k > 0 {
                        write!(f, " {op} ")?;
                    }
                    child(f, c)?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Party(usize),
    Int(usize),
    And,
    Or,
    Thresh,
    LParen,
    RParen,
    Semi,
    Comma,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let syntax = |position: usize, message: String| ParseError::Syntax { position, message };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b';' => out.push((Tok::Semi, start)),
            b',' => out.push((Tok::Comma, start)),
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = text[start..i]
                    .parse()
                    .map_err(|_| syntax(start, "integer too large".into()))?;
                out.push((Tok::Int(n), start));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let word = text[start..i].to_ascii_uppercase();
                let tok = match word.as_str() {
                    "AND" => Tok::And,
                    "OR" => Tok::Or,
                    "THRESH" => Tok::Thresh,
                    w if w.len() > 1 && w.starts_with('P') && w[1..].bytes().all(|b| b.is_ascii_digit()) => {
                        Tok::Party(w[1..].parse().map_err(|_| syntax(start, "party index too large".into()))?)
                    }
                    _ => return Err(syntax(start, format!("unexpected word {:?}", &text[start..i]))),
                };
                out.push((tok, start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character {ch:?}")));
            }
        }
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    parties: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if t.0 != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(ParseError::Syntax {
                position: self.offset(),
                message: format!("expected {what}"),
            })
        }
    }

    fn expr(&mut self) -> Result<Formula, ParseError> {
        let mut terms = vec![self.term()?];
        while *self.peek() == Tok::Or {
            self.bump();
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Formula::Or(terms) })
    }

    fn term(&mut self) -> Result<Formula, ParseError> {
        let mut factors = vec![self.factor()?];
        while *self.peek() == Tok::And {
            self.bump();
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Formula::And(factors) })
    }

    fn factor(&mut self) -> Result<Formula, ParseError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Party(index) => {
                if !(1..=self.parties).contains(&index) {
                    return Err(ParseError::PartyOutOfRange {
                        position: at,
                        index,
                        parties: self.parties,
                    });
                }
                Ok(Formula::Party(index))
            }
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Thresh => {
                self.expect(Tok::LParen, "'(' after THRESH")?;
                let t_at = self.offset();
                let threshold = match self.bump().0 {
                    Tok::Int(n) => n,
                    _ => {
                        return Err(ParseError::Syntax {
                            position: t_at,
                            message: "expected threshold integer".into(),
                        })
                    }
                };
                self.expect(Tok::Semi, "';' after threshold")?;
                let mut children = vec![self.expr()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    children.push(self.expr()?);
                }
                if children.len() < 2 {
                    return Err(ParseError::Syntax {
                        position: self.offset(),
                        message: "THRESH needs at least two arguments".into(),
                    });
                }
                self.expect(Tok::RParen, "')' closing THRESH")?;
                if !(1..=children.len()).contains(&threshold) {
                    return Err(ParseError::ThresholdOutOfRange {
                        position: t_at,
                        threshold,
                        fan_in: children.len(),
                    });
                }
                Ok(Formula::Threshold { threshold, children })
            }
            Tok::End => Err(ParseError::Syntax {
                position: at,
                message: "unexpected end of input".into(),
            }),
            _ => Err(ParseError::Syntax {
                position: at,
                message: "expected a party, THRESH or '('".into(),
            }),
        }
    }
}

/// Parses `text` as a formula over parties `1..=parties`.
pub fn parse(text: &str, parties: usize) -> Result<Formula, ParseError> {
    if !(1..=PartySet::MAX_PARTIES).contains(&parties) {
        return Err(ParseError::PartyCount(parties));
    }
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        parties,
    };
    let formula = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(ParseError::Syntax {
            position: p.offset(),
            message: "trailing input".into(),
        });
    }
    let mentioned = formula.mentioned();
    if let Some(missing) = (1..=parties).find(|&i| !mentioned.contains(i)) {
        return Err(ParseError::UnmentionedParty(missing));
    }
    Ok(formula)
}
