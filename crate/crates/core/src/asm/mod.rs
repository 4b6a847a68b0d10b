//! States, terms, rules and the update-set semantics, including partial
//! assignments and their collapse into ordinary updates.

mod eval;
mod ops;
mod rule;
mod term;
mod update;

pub use eval::{active_domain, apply_background, eval_rule, eval_term, Env, EvalError, Evaluator};
pub use ops::{OpClass, OpRegistry, SharedOp};
pub use rule::Rule;
pub use term::{BackgroundOp, Term};
pub use update::{apply_update_set, collapse, depends_on, permutations, subsumes, UpdateItem, UpdateMultiset, UpdateSet};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::tree::NodePath;
use crate::value::{Name, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum SymbolKind {
    #[default]
    Dynamic,
    Static,
    Relational,
}

impl SymbolKind {
    pub fn keyword(self) -> Option<&'static str> {
        match self {
            SymbolKind::Dynamic => None,
            SymbolKind::Static => Some("static"),
            SymbolKind::Relational => Some("relational"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FunctionSymbol {
    pub name: Name,
    pub arity: usize,
    pub kind: SymbolKind,
}

impl FunctionSymbol {
    pub fn new(name: impl AsRef<str>, arity: usize) -> Self {
        FunctionSymbol { name: Name::new(name), arity, kind: SymbolKind::Dynamic }
    }

    pub fn with_kind(mut self, kind: SymbolKind) -> Self {
        self.kind = kind;
        self
    }
}

impl fmt::Display for FunctionSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// The name of the distinguished program location.
pub const PGM: &str = "pgm";

/// A finite set of function symbols with unique names.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature(BTreeMap<Name, FunctionSymbol>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("symbol {name} declared with arities {first} and {second}")]
    ArityConflict { name: Name, first: usize, second: usize },
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn insert(&mut self, sym: FunctionSymbol) -> Result<(), SignatureError> {
        match self.0.get(&sym.name) {
            Some(old) if old.arity != sym.arity => Err(SignatureError::ArityConflict {
                name: sym.name.clone(),
                first: old.arity,
                second: sym.arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.0.insert(sym.name.clone(), sym);
                Ok(())
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<&FunctionSymbol> {
        self.0.get(name)
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &FunctionSymbol> {
        self.0.values()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Containment by name and arity; kinds are not compared.
    pub fn is_subset_of(&self, other: &Signature) -> bool {
        self.0.values().all(|s| other.get(s.name.as_str()).is_some_and(|o| o.arity == s.arity))
    }

    /// Symbols of `self` that are missing from `other` (by name and arity).
    pub fn missing_from(&self, other: &Signature) -> Vec<FunctionSymbol> {
        self.0
            .values()
            .filter(|s| other.get(s.name.as_str()).is_none_or(|o| o.arity != s.arity))
            .cloned()
            .collect()
    }

    /// Union keeping the kinds already recorded in `self`.
    pub fn union(&self, other: &Signature) -> Result<Signature, SignatureError> {
        let mut out = self.clone();
        for s in other.iter() {
            out.insert(s.clone())?;
        }
        Ok(out)
    }
}

impl FromIterator<FunctionSymbol> for Signature {
    fn from_iter<I: IntoIterator<Item = FunctionSymbol>>(iter: I) -> Self {
        let mut s = Signature::new();
        for sym in iter {
            s.0.insert(sym.name.clone(), sym);
        }
        s
    }
}

/// `(f, (a1, …, an))`, optionally narrowed to a tree node of the value stored
/// there. An empty path denotes the location itself.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Location {
    pub symbol: Name,
    pub args: Vec<Value>,
    pub path: NodePath,
}

impl Location {
    pub fn new(symbol: impl AsRef<str>, args: Vec<Value>) -> Self {
        Location { symbol: Name::new(symbol), args, path: NodePath::root() }
    }

    pub fn nullary(symbol: impl AsRef<str>) -> Self {
        Location::new(symbol, Vec::new())
    }

    pub fn at(mut self, path: NodePath) -> Self {
        self.path = path;
        self
    }

    pub fn base(&self) -> Location {
        Location { symbol: self.symbol.clone(), args: self.args.clone(), path: NodePath::root() }
    }

    pub fn is_sublocation(&self) -> bool {
        !self.path.is_root()
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol.as_str())?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        if self.is_sublocation() {
            write!(f, "@{}", self.path)?;
        }
        Ok(())
    }
}

/// Deterministic source of fresh reserve atoms: `$<namespace><n>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Reserve {
    pub namespace: String,
    pub next: u64,
}

impl Default for Reserve {
    fn default() -> Self {
        Reserve { namespace: "r".into(), next: 0 }
    }
}

impl Reserve {
    pub fn for_seed(seed: u64) -> Self {
        if seed == 0 {
            Reserve::default()
        } else {
            Reserve { namespace: format!("r{seed}_"), next: 0 }
        }
    }

    pub fn atom_name(&self, n: u64) -> Name {
        Name::new(format!("${}{}", self.namespace, n))
    }

    /// Whether `name` could have been produced by this reserve.
    pub fn owns(&self, name: &str) -> bool {
        name.strip_prefix('$')
            .and_then(|s| s.strip_prefix(self.namespace.as_str()))
            .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
    }

    /// Draws the next atom not contained in `used`.
    pub fn draw(&mut self, used: &BTreeSet<Name>) -> Name {
        loop {
            let name = self.atom_name(self.next);
            self.next += 1;
            if !used.contains(&name) {
                return name;
            }
        }
    }
}

/// A signature, an interpretation, declared universe values and the reserve.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State {
    pub signature: Signature,
    interp: BTreeMap<Location, Value>,
    pub universe: BTreeSet<Value>,
    pub reserve: Reserve,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("unknown symbol {0}")]
    UnknownSymbol(Name),
    #[error("symbol {name} has arity {expected} but {found} arguments were given")]
    ArityMismatch { name: Name, expected: usize, found: usize },
    #[error("cannot bind a node sublocation directly: {0}")]
    Sublocation(Location),
    #[error("atom renaming is not a bijection on the state's atoms: {0} and {1} collide")]
    PartialBijection(Name, Name),
}

impl State {
    pub fn new(signature: Signature) -> Self {
        State {
            signature,
            interp: BTreeMap::new(),
            universe: BTreeSet::new(),
            reserve: Reserve::default(),
        }
    }

    /// Binds a location; `undef` removes the binding.
    pub fn set(&mut self, loc: Location, value: Value) -> Result<(), StateError> {
        let sym = self
            .signature
            .get(loc.symbol.as_str())
            .ok_or_else(|| StateError::UnknownSymbol(loc.symbol.clone()))?;
        if sym.arity != loc.args.len() {
            return Err(StateError::ArityMismatch {
                name: loc.symbol.clone(),
                expected: sym.arity,
                found: loc.args.len(),
            });
        }
        if loc.is_sublocation() {
            return Err(StateError::Sublocation(loc));
        }
        self.set_unchecked(loc, value);
        Ok(())
    }

    pub(crate) fn set_unchecked(&mut self, loc: Location, value: Value) {
        if value.is_undef() {
            self.interp.remove(&loc);
        } else {
            self.interp.insert(loc, value);
        }
    }

    /// The value at a location, `undef` if unbound. Sublocations select the
    /// subtree at their path.
    pub fn get(&self, loc: &Location) -> Value {
        if loc.is_sublocation() {
            let base = self.interp.get(&loc.base());
            return match base {
                Some(Value::Tree(t)) => t
                    .index_at_path(&loc.path)
                    .map(|i| Value::Tree(t.subtree_at_index(i)))
                    .unwrap_or(Value::Undef),
                _ => Value::Undef,
            };
        }
        self.interp.get(loc).cloned().unwrap_or(Value::Undef)
    }

    pub fn pgm(&self) -> Value {
        self.get(&Location::nullary(PGM))
    }

    pub fn bindings(&self) -> impl Iterator<Item = (&Location, &Value)> {
        self.interp.iter()
    }

    /// Equality of signature, interpretation and universe, ignoring the
    /// reserve cursor.
    pub fn same_content(&self, other: &State) -> bool {
        self.signature == other.signature
            && self.interp == other.interp
            && self.universe == other.universe
    }

    /// Every atom occurring in a location argument, a value or the universe.
    pub fn atoms(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for (loc, v) in &self.interp {
            loc.args.iter().for_each(|a| a.atoms(&mut out));
            v.atoms(&mut out);
        }
        self.universe.iter().for_each(|v| v.atoms(&mut out));
        out
    }

    /// Applies an atom renaming to every location and value. Atoms outside
    /// the map are fixed; the overall map must stay injective.
    pub fn rename(&self, pi: &BTreeMap<Name, Name>) -> Result<State, StateError> {
        let atoms = self.atoms();
        let mut image: BTreeMap<Name, Name> = BTreeMap::new();
        for a in &atoms {
            let b = pi.get(a).cloned().unwrap_or_else(|| a.clone());
            if let Some(prev) = image.insert(b.clone(), a.clone()) {
                return Err(StateError::PartialBijection(prev, a.clone()));
            }
        }
        let f = |n: &Name| pi.get(n).cloned().unwrap_or_else(|| n.clone());
        let interp = self
            .interp
            .iter()
            .map(|(loc, v)| {
                let loc = Location {
                    symbol: loc.symbol.clone(),
                    args: loc.args.iter().map(|a| a.rename_atoms(&f)).collect(),
                    path: loc.path.clone(),
                };
                (loc, v.rename_atoms(&f))
            })
            .collect();
        Ok(State {
            signature: self.signature.clone(),
            interp,
            universe: self.universe.iter().map(|v| v.rename_atoms(&f)).collect(),
            reserve: self.reserve.clone(),
        })
    }
}
