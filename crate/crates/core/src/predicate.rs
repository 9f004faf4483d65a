//! Conjunctive predicates over attribute values.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::encoding::Encode;
use crate::field::FieldElement;
use crate::hash::hash_to_field;
use crate::vc::{Commitment, MerkleTree};
use crate::Dims;

/// Default bit width for ordering comparisons.
pub const DEFAULT_BITS: u8 = 64;
/// Widest supported ordering comparison.
pub const MAX_BITS: u8 = 128;
/// Largest membership set accepted.
pub const MAX_SET: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PredicateError {
    #[error("predicate has no clauses")]
    Empty,
    #[error("attribute index 0 is reserved")]
    ReservedIndex,
    #[error("bit width {0} outside 1..=128")]
    BadWidth(u32),
    #[error("constant {0} does not fit in {1} bits")]
    ConstantTooWide(FieldElement, u8),
    #[error("membership set must have 1..=256 elements")]
    BadSetSize,
    #[error("list entry {0} too large")]
    ListEntryTooLarge(FieldElement),
    #[error("attribute {0} missing from assignment")]
    MissingAttribute(u32),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
    Ne,
}

impl CmpOp {
    pub fn is_ordering(self) -> bool {
        !matches!(self, CmpOp::Eq | CmpOp::Ne)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
            CmpOp::Ne => "!=",
        }
    }

    fn code(self) -> u8 {
        self as u8
    }
}

/// A committed sorted list for non-membership clauses.
///
/// Entries are stored shifted by one inside the tree so that the value 0 can
/// be proven absent: the layout is `[0, e_1 + 1, ..., e_m + 1, p-1, ..., p-1]`.
#[derive(Clone)]
pub struct SortedList {
    values: Vec<FieldElement>,
    tree: Arc<MerkleTree>,
}

impl SortedList {
    /// Sorts and de-duplicates `values`. Capacity is the smallest power of
    /// two holding the entries plus both bounds.
    pub fn new(mut values: Vec<FieldElement>) -> Result<Self, PredicateError> {
        values.sort();
        values.dedup();
        let limit = FieldElement::max_value() - FieldElement::from_u64(2);
        if let Some(v) = values.iter().find(|v| **v > limit) {
            return Err(PredicateError::ListEntryTooLarge(*v));
        }
        let cap = (values.len() + 2).next_power_of_two();
        let mut layout = Vec::with_capacity(cap);
        layout.push(FieldElement::ZERO);
        layout.extend(values.iter().map(|v| *v + FieldElement::ONE));
        layout.resize(cap, FieldElement::max_value());
        Ok(SortedList { values, tree: Arc::new(MerkleTree::from_leaves(layout)) })
    }

    pub fn values(&self) -> &[FieldElement] {
        &self.values
    }

    pub fn capacity(&self) -> usize {
        self.tree.leaves().len()
    }

    pub fn root(&self) -> Commitment {
        self.tree.root()
    }

    pub fn tree(&self) -> &MerkleTree {
        &self.tree
    }

    pub fn contains(&self, v: &FieldElement) -> bool {
        self.values.binary_search(v).is_ok()
    }
}

impl PartialEq for SortedList {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
    }
}

impl Eq for SortedList {}

impl fmt::Debug for SortedList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SortedList(len={}, cap={})", self.values.len(), self.capacity())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Clause {
    Compare { idx: u32, op: CmpOp, constant: FieldElement, bits: u8 },
    MemberOf { idx: u32, set: Vec<FieldElement> },
    NotInSortedList { idx: u32, list: SortedList },
}

impl Clause {
    pub fn idx(&self) -> u32 {
        match self {
            Clause::Compare { idx, .. } | Clause::MemberOf { idx, .. } | Clause::NotInSortedList { idx, .. } => *idx,
        }
    }

    fn validate(&self) -> Result<(), PredicateError> {
        if self.idx() == 0 {
            return Err(PredicateError::ReservedIndex);
        }
        match self {
            Clause::Compare { op, constant, bits, .. } => {
                if !(1..=MAX_BITS).contains(bits) {
                    return Err(PredicateError::BadWidth(*bits as u32));
                }
                if op.is_ordering() && constant.bit_len() > *bits as u32 {
                    return Err(PredicateError::ConstantTooWide(*constant, *bits));
                }
            }
            Clause::MemberOf { set, .. } => {
                if set.is_empty() || set.len() > MAX_SET {
                    return Err(PredicateError::BadSetSize);
                }
            }
            Clause::NotInSortedList { .. } => {}
        }
        Ok(())
    }

    /// Evaluates the clause on a single value.
    pub fn holds(&self, v: FieldElement) -> bool {
        match self {
            Clause::Compare { op, constant, bits, .. } => {
                if !op.is_ordering() {
                    return (v == *constant) == (*op == CmpOp::Eq);
                }
                if v.bit_len() > *bits as u32 {
                    return false;
                }
                let (a, b) = (v.to_biguint(), constant.to_biguint());
                match op {
                    CmpOp::Lt => a < b,
                    CmpOp::Le => a <= b,
                    CmpOp::Ge => a >= b,
                    CmpOp::Gt => a > b,
                    _ => unreachable!(),
                }
            }
            Clause::MemberOf { set, .. } => set.contains(&v),
            Clause::NotInSortedList { list, .. } => {
                v <= FieldElement::max_value() - FieldElement::from_u64(2) && !list.contains(&v)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicate {
    clauses: Vec<Clause>,
}

impl Predicate {
    pub fn new(clauses: Vec<Clause>) -> Result<Self, PredicateError> {
        if clauses.is_empty() {
            return Err(PredicateError::Empty);
        }
        for c in &clauses {
            c.validate()?;
        }
        let clauses = clauses
            .into_iter()
            .map(|c| match c {
                Clause::MemberOf { idx, mut set } => {
                    set.sort();
                    set.dedup();
                    Clause::MemberOf { idx, set }
                }
                other => other,
            })
            .collect();
        Ok(Predicate { clauses })
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Distinct attribute indices in order of first use. Position in this
    /// list is the attribute's slot in the relation.
    pub fn slots(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for c in &self.clauses {
            if !out.contains(&c.idx()) {
                out.push(c.idx());
            }
        }
        out
    }

    pub fn slot_of(&self, idx: u32) -> usize {
        self.slots().iter().position(|&i| i == idx).expect("idx referenced")
    }
}

pub fn pred_required_attrs(phi: &Predicate) -> BTreeSet<u32> {
    phi.clauses.iter().map(Clause::idx).collect()
}

pub fn pred_eval(phi: &Predicate, assignment: &BTreeMap<u32, FieldElement>) -> Result<bool, PredicateError> {
    let mut ok = true;
    for c in &phi.clauses {
        let v = assignment.get(&c.idx()).ok_or(PredicateError::MissingAttribute(c.idx()))?;
        ok &= c.holds(*v);
    }
    Ok(ok)
}

/// Circuit-shape identifier: everything that changes the constraint layout,
/// nothing that is a public input.
pub fn pred_shape_id(phi: &Predicate, dims: &Dims) -> Vec<u8> {
    let mut out = b"irac-shape/1".to_vec();
    (dims.n_a as u64).encode_to(&mut out);
    (dims.n_r as u64).encode_to(&mut out);
    (dims.n_i as u64).encode_to(&mut out);
    let slots = phi.slots();
    (slots.len() as u32).encode_to(&mut out);
    (phi.clauses.len() as u32).encode_to(&mut out);
    for c in &phi.clauses {
        let slot = slots.iter().position(|&i| i == c.idx()).unwrap() as u32;
        match c {
            Clause::Compare { op, bits, .. } => {
                out.push(0);
                out.push(op.code());
                // width only shapes ordering comparisons
                out.push(if op.is_ordering() { *bits } else { 0 });
                slot.encode_to(&mut out);
            }
            Clause::MemberOf { set, .. } => {
                out.push(1);
                slot.encode_to(&mut out);
                (set.len() as u32).encode_to(&mut out);
            }
            Clause::NotInSortedList { list, .. } => {
                out.push(2);
                slot.encode_to(&mut out);
                (list.capacity() as u64).encode_to(&mut out);
            }
        }
    }
    out
}

/// Resolves attribute names while parsing.
pub trait AttrResolver {
    /// Returns the index and whether the attribute is categorical.
    fn resolve(&self, name: &str) -> Option<(u32, bool)>;
    fn name_of(&self, _idx: u32) -> Option<String> {
        None
    }
}

/// Resolver that knows no names; only `#n` references parse.
pub struct NoNames;

impl AttrResolver for NoNames {
    fn resolve(&self, _name: &str) -> Option<(u32, bool)> {
        None
    }
}

/// Value literal for a categorical label.
pub fn label_value(label: &str) -> FieldElement {
    hash_to_field(label.as_bytes())
}

mod parse {
    use super::*;

    #[derive(Debug, Clone, PartialEq)]
    enum Tok {
        Ident(String),
        Hash(u32),
        Num(FieldElement),
        Str(String),
        Op(CmpOp),
        LBrace,
        RBrace,
        LBrack,
        RBrack,
        Comma,
        Colon,
        At,
        In,
        Not,
        And,
    }

    pub(super) struct Parser<'a, R: AttrResolver, L: Fn(&str) -> Result<Vec<FieldElement>, String>> {
        toks: Vec<(usize, Tok)>,
        pos: usize,
        end: usize,
        resolver: &'a R,
        loader: L,
    }

    fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, PredicateError> {
        Err(PredicateError::Parse { pos, msg: msg.into() })
    }

    fn number(s: &str, pos: usize) -> Result<FieldElement, PredicateError> {
        let v = if let Some(h) = s.strip_prefix("0x") {
            BigUint::parse_bytes(h.as_bytes(), 16)
        } else {
            BigUint::parse_bytes(s.as_bytes(), 10)
        };
        match v.and_then(|v| FieldElement::from_biguint_exact(&v)) {
            Some(f) => Ok(f),
            None => err(pos, format!("bad number {s:?}")),
        }
    }

    fn lex(src: &str) -> Result<Vec<(usize, Tok)>, PredicateError> {
        let b = src.as_bytes();
        let mut i = 0;
        let mut out = Vec::new();
        while i < b.len() {
            let c = b[i] as char;
            let start = i;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if src[i..].starts_with("//") {
                while i < b.len() && b[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            let two = src.get(i..i + 2).unwrap_or("");
            let tok = match two {
                "<=" => Some(Tok::Op(CmpOp::Le)),
                ">=" => Some(Tok::Op(CmpOp::Ge)),
                "!=" => Some(Tok::Op(CmpOp::Ne)),
                "==" => Some(Tok::Op(CmpOp::Eq)),
                "&&" => Some(Tok::And),
                _ => None,
            };
            if let Some(t) = tok {
                out.push((start, t));
                i += 2;
                continue;
            }
            let tok = match c {
                '<' => Tok::Op(CmpOp::Lt),
                '>' => Tok::Op(CmpOp::Gt),
                '=' => Tok::Op(CmpOp::Eq),
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                ',' => Tok::Comma,
                ':' => Tok::Colon,
                '@' => Tok::At,
                '"' => {
                    let close = src[i + 1..].find('"').map(|j| i + 1 + j);
                    let Some(close) = close else { return err(i, "unterminated string") };
                    let s = src[i + 1..close].to_string();
                    i = close + 1;
                    out.push((start, Tok::Str(s)));
                    continue;
                }
                '#' => {
                    i += 1;
                    let s = i;
                    while i < b.len() && b[i].is_ascii_digit() {
                        i += 1;
                    }
                    match src[s..i].parse::<u32>() {
                        Ok(n) => out.push((start, Tok::Hash(n))),
                        Err(_) => return err(start, "expected attribute index after '#'"),
                    }
                    continue;
                }
                c if c.is_ascii_digit() => {
                    while i < b.len() && (b[i] as char).is_ascii_alphanumeric() {
                        i += 1;
                    }
                    out.push((start, Tok::Num(number(&src[start..i], start)?)));
                    continue;
                }
                c if c.is_alphabetic() || c == '_' => {
                    while i < src.len() {
                        let ch = src[i..].chars().next().unwrap();
                        if ch.is_alphanumeric() || ch == '_' || ch == '.' || ch == '-' {
                            i += ch.len_utf8();
                        } else {
                            break;
                        }
                    }
                    let w = &src[start..i];
                    let t = match w {
                        "in" => Tok::In,
                        "not" => Tok::Not,
                        "and" | "AND" => Tok::And,
                        _ => Tok::Ident(w.to_string()),
                    };
                    out.push((start, t));
                    continue;
                }
                other => return err(i, format!("unexpected character {other:?}")),
            };
            out.push((start, tok));
            i += 1;
        }
        Ok(out)
    }

    impl<'a, R: AttrResolver, L: Fn(&str) -> Result<Vec<FieldElement>, String>> Parser<'a, R, L> {
        pub(super) fn new(src: &str, resolver: &'a R, loader: L) -> Result<Self, PredicateError> {
            Ok(Parser { toks: lex(src)?, pos: 0, end: src.len(), resolver, loader })
        }

        fn peek(&self) -> Option<&Tok> {
            self.toks.get(self.pos).map(|(_, t)| t)
        }

        fn at(&self) -> usize {
            self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
        }

        fn next(&mut self) -> Option<Tok> {
            let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
            self.pos += 1;
            t
        }

        fn expect(&mut self, want: Tok, what: &str) -> Result<(), PredicateError> {
            let at = self.at();
            match self.next() {
                Some(t) if t == want => Ok(()),
                _ => err(at, format!("expected {what}")),
            }
        }

        pub(super) fn predicate(&mut self) -> Result<Predicate, PredicateError> {
            let mut clauses = vec![self.clause()?];
            while self.peek() == Some(&Tok::And) {
                self.next();
                clauses.push(self.clause()?);
            }
            if self.peek().is_some() {
                return err(self.at(), "expected 'and' or end of input");
            }
            Predicate::new(clauses)
        }

        fn value(&mut self) -> Result<FieldElement, PredicateError> {
            let at = self.at();
            match self.next() {
                Some(Tok::Num(v)) => Ok(v),
                Some(Tok::Str(s)) => Ok(label_value(&s)),
                _ => err(at, "expected a number or a quoted label"),
            }
        }

        fn values_until(&mut self, close: Tok) -> Result<Vec<FieldElement>, PredicateError> {
            let mut out = Vec::new();
            if self.peek() == Some(&close) {
                self.next();
                return Ok(out);
            }
            loop {
                out.push(self.value()?);
                let at = self.at();
                match self.next() {
                    Some(Tok::Comma) => continue,
                    Some(t) if t == close => return Ok(out),
                    _ => return err(at, "expected ',' or closing bracket"),
                }
            }
        }

        fn clause(&mut self) -> Result<Clause, PredicateError> {
            let at = self.at();
            let (idx, categorical) = match self.next() {
                Some(Tok::Hash(n)) => (n, false),
                Some(Tok::Ident(name)) => match self.resolver.resolve(&name) {
                    Some(r) => r,
                    None => return err(at, format!("unknown attribute {name:?}")),
                },
                _ => return err(at, "expected an attribute"),
            };
            let mut bits = DEFAULT_BITS;
            if self.peek() == Some(&Tok::Colon) {
                self.next();
                let at = self.at();
                bits = match self.next() {
                    Some(Tok::Num(v)) => match v.to_u64() {
                        Some(b) if (1..=MAX_BITS as u64).contains(&b) => b as u8,
                        _ => return err(at, "bit width must be 1..=128"),
                    },
                    _ => return err(at, "expected a bit width"),
                };
            }
            let at = self.at();
            match self.next() {
                Some(Tok::Op(op)) => {
                    if categorical && op.is_ordering() {
                        return err(at, "ordering comparison on a categorical attribute");
                    }
                    let constant = self.value()?;
                    Ok(Clause::Compare { idx, op, constant, bits })
                }
                Some(Tok::In) => {
                    self.expect(Tok::LBrace, "'{'")?;
                    let set = self.values_until(Tok::RBrace)?;
                    Ok(Clause::MemberOf { idx, set })
                }
                Some(Tok::Not) => {
                    self.expect(Tok::In, "'in'")?;
                    let at = self.at();
                    let values = match self.next() {
                        Some(Tok::LBrack) => self.values_until(Tok::RBrack)?,
                        Some(Tok::At) => {
                            let at = self.at();
                            match self.next() {
                                Some(Tok::Str(path)) => match (self.loader)(&path) {
                                    Ok(v) => v,
                                    Err(e) => return err(at, e),
                                },
                                _ => return err(at, "expected a quoted path after '@'"),
                            }
                        }
                        _ => return err(at, "expected '[' or '@'"),
                    };
                    Ok(Clause::NotInSortedList { idx, list: SortedList::new(values)? })
                }
                _ => err(at, "expected a comparison, 'in' or 'not in'"),
            }
        }
    }
}

/// Parses the predicate text format:
///
/// ```text
/// predicate := clause { ("and" | "&&") clause }
/// clause    := attr [":" width] op value
///            | attr "in" "{" value { "," value } "}"
///            | attr "not" "in" ( "[" [ value { "," value } ] "]" | "@" "\"path\"" )
/// attr      := name | "#" index
/// op        := "<" | "<=" | "=" | "==" | ">=" | ">" | "!="
/// value     := decimal | "0x" hex | "\"label\""
/// ```
///
/// Quoted labels denote `hash_to_field(label)`. `//` starts a comment.
/// `@"path"` lists are fetched through `loader`.
pub fn parse_predicate<R: AttrResolver>(
    src: &str,
    resolver: &R,
    loader: impl Fn(&str) -> Result<Vec<FieldElement>, String>,
) -> Result<Predicate, PredicateError> {
    parse::Parser::new(src, resolver, loader)?.predicate()
}

/// Parses a predicate without list files or attribute names.
pub fn parse_simple(src: &str) -> Result<Predicate, PredicateError> {
    parse_predicate(src, &NoNames, |p| Err(format!("no loader for {p}")))
}

/// Prints a predicate in the text format using `#idx` references. Lists
/// are printed inline.
pub fn to_text(phi: &Predicate) -> String {
    let vals = |v: &[FieldElement]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    phi.clauses
        .iter()
        .map(|c| match c {
            Clause::Compare { idx, op, constant, bits } => {
                let w = if *bits == DEFAULT_BITS { String::new() } else { format!(":{bits}") };
                format!("#{idx}{w} {} {constant}", op.symbol())
            }
            Clause::MemberOf { idx, set } => format!("#{idx} in {{{}}}", vals(set)),
            Clause::NotInSortedList { idx, list } => format!("#{idx} not in [{}]", vals(list.values())),
        })
        .collect::<Vec<_>>()
        .join(" and ")
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_text(self))
    }
}
