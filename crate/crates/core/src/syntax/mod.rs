//! Abstract syntax for the PDL-style language over derivative spaces and for
//! PLTL with past, together with their concrete ASCII grammars, printers and
//! the formula translations (`*`, `+` and the temporal embedding).
//!
//! Concrete syntax, loosest to tightest:
//!
//! ```text
//! f -> g      right associative
//! f | g
//! f & g
//! ~f  <prog>f  [prog]f  C{a,b}f  true  false  p  (f)
//!
//! prog u prog
//! prog ; prog
//! prog*
//! ```

mod lexer;
mod parser;
mod print;
mod translate;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

pub use parser::{parse_formula, parse_formula_inferring, parse_pltl, ParseError};
pub use translate::{
    modal_depth, plus_translation, star_free, star_translation, top_translation,
    TranslateError,
};

/// Words that can never be used as agent or atom names.
pub const RESERVED: [&str; 3] = ["u", "true", "false"];

/// Returns true if `name` matches `[a-z][a-zA-Z0-9_]*` and is not reserved.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !RESERVED.contains(&name)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{0}` is not a valid identifier")]
pub struct InvalidName(pub String);

/// An agent, i.e. an atomic program.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Agent(String);

impl Agent {
    pub fn new(name: &str) -> Result<Self, InvalidName> {
        if is_identifier(name) {
            Ok(Agent(name.to_string()))
        } else {
            Err(InvalidName(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl FromStr for Agent {
    type Err = InvalidName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Agent::new(s)
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Programs built from agents by composition, union and iteration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Program {
    Atom(Agent),
    Seq(Box<Program>, Box<Program>),
    Union(Box<Program>, Box<Program>),
    Star(Box<Program>),
}

impl Program {
    pub fn seq(left: Program, right: Program) -> Self {
        Program::Seq(Box::new(left), Box::new(right))
    }

    pub fn union(left: Program, right: Program) -> Self {
        Program::Union(Box::new(left), Box::new(right))
    }

    pub fn star(body: Program) -> Self {
        Program::Star(Box::new(body))
    }

    /// Left-nested union `a1 u a2 u ... u an`; `None` for an empty list.
    pub fn union_of<I: IntoIterator<Item = Agent>>(agents: I) -> Option<Self> {
        agents
            .into_iter()
            .map(Program::Atom)
            .reduce(Program::union)
    }

    pub fn agents(&self) -> BTreeSet<Agent> {
        let mut out = BTreeSet::new();
        self.collect_agents(&mut out);
        out
    }

    fn collect_agents(&self, out: &mut BTreeSet<Agent>) {
        match self {
            Program::Atom(a) => {
                out.insert(a.clone());
            }
            Program::Seq(l, r) | Program::Union(l, r) => {
                l.collect_agents(out);
                r.collect_agents(out);
            }
            Program::Star(b) => b.collect_agents(out),
        }
    }

    /// Rebuilds the program with every leaf replaced by `leaf(agent)`.
    pub fn map_atoms<F: Fn(&Agent) -> Program + Copy>(&self, leaf: F) -> Program {
        match self {
            Program::Atom(a) => leaf(a),
            Program::Seq(l, r) => Program::seq(l.map_atoms(leaf), r.map_atoms(leaf)),
            Program::Union(l, r) => Program::union(l.map_atoms(leaf), r.map_atoms(leaf)),
            Program::Star(b) => Program::star(b.map_atoms(leaf)),
        }
    }

    pub fn has_star(&self) -> bool {
        match self {
            Program::Atom(_) => false,
            Program::Seq(l, r) | Program::Union(l, r) => l.has_star() || r.has_star(),
            Program::Star(_) => true,
        }
    }
}

/// Formulas of the PDL-style language.
///
/// `Or`, `Implies` and `Box` are definable from the others but are kept as
/// nodes so that printing reproduces the shape the user wrote.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Prop(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Diamond(Program, Box<Formula>),
    Box(Program, Box<Formula>),
}

impl Formula {
    pub fn prop(name: &str) -> Self {
        Formula::Prop(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn diamond(p: Program, f: Formula) -> Self {
        Formula::Diamond(p, Box::new(f))
    }

    pub fn boxed(p: Program, f: Formula) -> Self {
        Formula::Box(p, Box::new(f))
    }

    /// `C{agents} f`, i.e. `[(a1 u ... u an)*] f`.
    pub fn common_knowledge<I: IntoIterator<Item = Agent>>(agents: I, f: Formula) -> Option<Self> {
        Program::union_of(agents).map(|u| Formula::boxed(Program::star(u), f))
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Prop(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    pub fn agents(&self) -> BTreeSet<Agent> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Diamond(p, _) | Formula::Box(p, _) = f {
                p.collect_agents(&mut out);
            }
        });
        out
    }

    /// Number of formula nodes (programs are not counted).
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Pre-order traversal over formula nodes.
    pub fn visit<F: FnMut(&Formula)>(&self, visitor: &mut F) {
        visitor(self);
        match self {
            Formula::True | Formula::False | Formula::Prop(_) => {}
            Formula::Not(f) | Formula::Diamond(_, f) | Formula::Box(_, f) => f.visit(visitor),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.visit(visitor);
                r.visit(visitor);
            }
        }
    }

    /// Applies `map` to every program occurring in the formula.
    pub fn map_programs<F: Fn(&Program) -> Program + Copy>(&self, map: F) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Prop(p) => Formula::Prop(p.clone()),
            Formula::Not(f) => Formula::not(f.map_programs(map)),
            Formula::And(l, r) => Formula::and(l.map_programs(map), r.map_programs(map)),
            Formula::Or(l, r) => Formula::or(l.map_programs(map), r.map_programs(map)),
            Formula::Implies(l, r) => Formula::implies(l.map_programs(map), r.map_programs(map)),
            Formula::Diamond(p, f) => Formula::diamond(map(p), f.map_programs(map)),
            Formula::Box(p, f) => Formula::boxed(map(p), f.map_programs(map)),
        }
    }

    /// Top-level conjuncts, flattening nested `And`.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::And(l, r) => {
                let mut v = l.conjuncts();
                v.extend(r.conjuncts());
                v
            }
            f => vec![f],
        }
    }
}

/// Formulas of PLTL with past: next, yesterday, future and past.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PltlFormula {
    True,
    False,
    Prop(String),
    Not(Box<PltlFormula>),
    And(Box<PltlFormula>, Box<PltlFormula>),
    Or(Box<PltlFormula>, Box<PltlFormula>),
    Implies(Box<PltlFormula>, Box<PltlFormula>),
    Next(Box<PltlFormula>),
    Yesterday(Box<PltlFormula>),
    Future(Box<PltlFormula>),
    Past(Box<PltlFormula>),
}

impl PltlFormula {
    pub fn prop(name: &str) -> Self {
        PltlFormula::Prop(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: PltlFormula) -> Self {
        PltlFormula::Not(Box::new(f))
    }

    pub fn and(l: PltlFormula, r: PltlFormula) -> Self {
        PltlFormula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: PltlFormula, r: PltlFormula) -> Self {
        PltlFormula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: PltlFormula, r: PltlFormula) -> Self {
        PltlFormula::Implies(Box::new(l), Box::new(r))
    }

    pub fn next(f: PltlFormula) -> Self {
        PltlFormula::Next(Box::new(f))
    }

    pub fn yesterday(f: PltlFormula) -> Self {
        PltlFormula::Yesterday(Box::new(f))
    }

    pub fn future(f: PltlFormula) -> Self {
        PltlFormula::Future(Box::new(f))
    }

    pub fn past(f: PltlFormula) -> Self {
        PltlFormula::Past(Box::new(f))
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            PltlFormula::True | PltlFormula::False => {}
            PltlFormula::Prop(p) => {
                out.insert(p.clone());
            }
            PltlFormula::Not(f)
            | PltlFormula::Next(f)
            | PltlFormula::Yesterday(f)
            | PltlFormula::Future(f)
            | PltlFormula::Past(f) => f.collect_atoms(out),
            PltlFormula::And(l, r) | PltlFormula::Or(l, r) | PltlFormula::Implies(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            PltlFormula::True | PltlFormula::False | PltlFormula::Prop(_) => 1,
            PltlFormula::Not(f)
            | PltlFormula::Next(f)
            | PltlFormula::Yesterday(f)
            | PltlFormula::Future(f)
            | PltlFormula::Past(f) => 1 + f.size(),
            PltlFormula::And(l, r) | PltlFormula::Or(l, r) | PltlFormula::Implies(l, r) => {
                1 + l.size() + r.size()
            }
        }
    }

    /// True if the formula uses only Booleans, `X` and `Y`.
    pub fn is_shift_only(&self) -> bool {
        match self {
            PltlFormula::True | PltlFormula::False | PltlFormula::Prop(_) => true,
            PltlFormula::Not(f) | PltlFormula::Next(f) | PltlFormula::Yesterday(f) => {
                f.is_shift_only()
            }
            PltlFormula::Future(_) | PltlFormula::Past(_) => false,
            PltlFormula::And(l, r) | PltlFormula::Or(l, r) | PltlFormula::Implies(l, r) => {
                l.is_shift_only() && r.is_shift_only()
            }
        }
    }

    /// The witness `F q & ~P q`, satisfiable on the integers but on no
    /// finite bijective model.
    pub fn future_not_past(q: &str) -> Self {
        PltlFormula::and(
            PltlFormula::future(PltlFormula::prop(q)),
            PltlFormula::not(PltlFormula::past(PltlFormula::prop(q))),
        )
    }
}
