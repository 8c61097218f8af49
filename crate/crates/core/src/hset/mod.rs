//! Concrete hereditarily finite sets: the standard model `H_k` at desk
//! scale.

mod eval;
mod realize;

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::{Arc, LazyLock, Mutex};

use thiserror::Error;

pub use eval::{eval_bounded, EvalError};
pub use realize::{realize, RealizeError};

use crate::formula::Var;
use crate::structure::{isomorphic, Dag, TclStructure};

struct Inner {
    id: u64,
    text: Box<str>,
    children: Box<[HSet]>,
}

/// A hereditarily finite set. Values are interned, so equality and hashing
/// are by identity.
#[derive(Clone)]
pub struct HSet(Arc<Inner>);

#[derive(Default)]
struct Table {
    by_text: HashMap<Box<str>, HSet>,
}

static TABLE: LazyLock<Mutex<Table>> = LazyLock::new(Default::default);

impl HSet {
    pub fn empty() -> HSet {
        HSet::from_children(Vec::new())
    }

    /// `{x}`.
    pub fn singleton(x: &HSet) -> HSet {
        HSet::from_children(vec![x.clone()])
    }

    /// The set of the given elements; duplicates collapse.
    pub fn from_children(mut children: Vec<HSet>) -> HSet {
        children.sort();
        children.dedup();
        let mut text =
            String::with_capacity(2 + children.iter().map(|c| c.0.text.len() + 1).sum::<usize>());
        text.push('{');
        for (i, c) in children.iter().enumerate() {
            if i > 0 {
                text.push(',');
            }
            text.push_str(&c.0.text);
        }
        text.push('}');
        let mut table = TABLE.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(s) = table.by_text.get(text.as_str()) {
            return s.clone();
        }
        let id = table.by_text.len() as u64;
        let set = HSet(Arc::new(Inner {
            id,
            text: text.clone().into_boxed_str(),
            children: children.into_boxed_slice(),
        }));
        table.by_text.insert(text.into_boxed_str(), set.clone());
        set
    }

    /// `{{…{∅}…}}` with `h` pairs of braces around `∅`.
    pub fn tower(h: usize) -> HSet {
        (0..h).fold(HSet::empty(), |s, _| HSet::singleton(&s))
    }

    pub fn children(&self) -> &[HSet] {
        &self.0.children
    }

    pub fn len(&self) -> usize {
        self.0.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.children.is_empty()
    }

    pub fn contains(&self, x: &HSet) -> bool {
        self.0.children.iter().any(|c| c == x)
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn render(&self) -> &str {
        &self.0.text
    }
}

impl PartialEq for HSet {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}

impl Eq for HSet {}

impl Hash for HSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.id.hash(state)
    }
}

// Shortlex on the rendering, so `∅` precedes everything else.
impl Ord for HSet {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        let (a, b) = (&self.0.text, &other.0.text);
        a.len().cmp(&b.len()).then_with(|| a.cmp(b))
    }
}

impl PartialOrd for HSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for HSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.text)
    }
}

impl fmt::Debug for HSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("set syntax error at byte {position}: {message}")]
pub struct SetParseError {
    pub position: usize,
    pub message: String,
}

struct SetParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl SetParser<'_> {
    fn err(&self, message: &str) -> SetParseError {
        SetParseError {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), SetParseError> {
        self.skip_ws();
        if self.bytes.get(self.pos) == Some(&b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", b as char)))
        }
    }

    fn set(&mut self) -> Result<HSet, SetParseError> {
        self.expect(b'{')?;
        let mut children = Vec::new();
        self.skip_ws();
        if self.bytes.get(self.pos) == Some(&b'}') {
            self.pos += 1;
            return Ok(HSet::empty());
        }
        loop {
            children.push(self.set()?);
            self.skip_ws();
            match self.bytes.get(self.pos) {
                Some(b',') => self.pos += 1,
                Some(b'}') => {
                    self.pos += 1;
                    return Ok(HSet::from_children(children));
                }
                _ => return Err(self.err("expected `,` or `}`")),
            }
        }
    }
}

/// Parses brace notation, e.g. `{{},{{}}}`.
pub fn parse_set(text: &str) -> Result<HSet, SetParseError> {
    let mut p = SetParser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let s = p.set()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("trailing input"));
    }
    Ok(s)
}

pub fn render_set(s: &HSet) -> String {
    s.render().to_string()
}

impl FromStr for HSet {
    type Err = SetParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_set(s)
    }
}

/// Parses `x={{}};y={}` into an assignment.
pub fn parse_assignment(text: &str) -> Result<Vec<(Var, HSet)>, SetParseError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in text.split(';') {
        let here = offset;
        offset += part.len() + 1;
        if part.trim().is_empty() {
            continue;
        }
        let (name, value) = part.split_once('=').ok_or_else(|| SetParseError {
            position: here,
            message: "expected `name=set`".into(),
        })?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(SetParseError {
                position: here,
                message: format!("bad variable name `{name}`"),
            });
        }
        let set = parse_set(value).map_err(|e| SetParseError {
            position: here + name.len() + 1 + e.position,
            message: e.message,
        })?;
        out.push((Var::new(name), set));
    }
    Ok(out)
}

/// Whether every set in the hereditary closure has at most `k` elements.
pub fn check_k(s: &HSet, k: usize) -> bool {
    let mut seen = HashSet::new();
    let mut stack = vec![s.clone()];
    while let Some(x) = stack.pop() {
        if !seen.insert(x.id()) {
            continue;
        }
        if x.len() > k {
            return false;
        }
        stack.extend(x.children().iter().cloned());
    }
    true
}

/// The induced structure on `tcl_n(ā)`: nodes `n0, n1, …` in breadth-first
/// order from the tuple.
pub fn tcl_structure(tuple: &[HSet], n: u64) -> TclStructure {
    let mut index: HashMap<u64, u32> = HashMap::new();
    let mut values: Vec<HSet> = Vec::new();
    let mut dist: Vec<u64> = Vec::new();
    let mut queue = VecDeque::new();
    let mut positions = Vec::with_capacity(tuple.len());
    for a in tuple {
        let i = *index.entry(a.id()).or_insert_with(|| {
            values.push(a.clone());
            dist.push(0);
            queue.push_back(values.len() as u32 - 1);
            values.len() as u32 - 1
        });
        positions.push(i);
    }
    while let Some(u) = queue.pop_front() {
        if dist[u as usize] >= n {
            continue;
        }
        let d = dist[u as usize] + 1;
        for c in values[u as usize].clone().children() {
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(c.id()) {
                e.insert(values.len() as u32);
                values.push(c.clone());
                dist.push(d);
                queue.push_back(values.len() as u32 - 1);
            }
        }
    }
    let children = values
        .iter()
        .map(|v| {
            v.children()
                .iter()
                .filter_map(|c| index.get(&c.id()).copied())
                .collect()
        })
        .collect();
    TclStructure::from_dag(Dag::new(children, positions))
}

/// `ā ∼_n b̄`: the level-`n` closures are isomorphic.
pub fn sim_n(a: &[HSet], b: &[HSet], n: u64) -> bool {
    assert_eq!(a.len(), b.len(), "tuples of different lengths");
    isomorphic(&tcl_structure(a, n), &tcl_structure(b, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> HSet {
        parse_set(text).unwrap()
    }

    #[test]
    fn parse_and_render() {
        assert_eq!(s("{}"), HSet::empty());
        assert_eq!(s("{{},{}}"), HSet::singleton(&HSet::empty()));
        assert_eq!(render_set(&s("{{{}}, {}}")), "{{},{{}}}");
        assert!(parse_set("{").is_err());
        assert!(parse_set("{}}").is_err());
        assert!(parse_set("{{},}").is_err());
    }

    #[test]
    fn size_bounds() {
        assert!(check_k(&s("{}"), 0));
        assert!(!check_k(&s("{{},{{}}}"), 1));
        assert!(check_k(&s("{{},{{}}}"), 2));
        assert!(!check_k(&s("{{{},{{}}}}"), 1));
    }

    #[test]
    fn closures() {
        let one = s("{{}}");
        let t = tcl_structure(std::slice::from_ref(&one), 1);
        assert_eq!(t.len(), 2);
        assert_eq!(t.edges(), vec![("n0", "n1")]);
        assert_eq!(tcl_structure(std::slice::from_ref(&one), 0).len(), 1);
        // induced edge between two elements at the boundary
        let t = tcl_structure(&[s("{{},{{}}}")], 1);
        assert_eq!(t.dag().edge_count(), 3);
    }

    #[test]
    fn similarity() {
        let a = [s("{{}}")];
        let b = [s("{{{}}}")];
        assert!(sim_n(&a, &b, 1));
        assert!(!sim_n(&a, &b, 2));
        assert!(sim_n(&a, &a, 5));
    }

    #[test]
    fn assignments() {
        let a = parse_assignment("x={{}};y={}").unwrap();
        assert_eq!(
            a,
            vec![(Var::new("x"), s("{{}}")), (Var::new("y"), HSet::empty())]
        );
        assert!(parse_assignment("x{}").is_err());
    }
}
