//! Recursive-descent parsers for both concrete grammars.

use std::collections::{BTreeSet, HashMap};

use super::lexer::{tokenize, Spanned, Tok};
use super::{Agent, Formula, PltlFormula, Program};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("unexpected character {ch:?} at offset {pos}")]
    Lexical { ch: char, pos: usize },
    #[error("unexpected {found} at offset {pos}, expected {expected}")]
    Unexpected {
        found: String,
        expected: &'static str,
        pos: usize,
    },
    #[error("unbalanced `{delim}` at offset {pos}")]
    Unbalanced { delim: char, pos: usize },
    #[error("identifier `{name}` at offset {pos} is used both as agent and as atom")]
    AgentAtomClash { name: String, pos: usize },
    #[error("identifier `{name}` at offset {pos} is not a declared agent")]
    UndeclaredAgent { name: String, pos: usize },
}

/// Parses an ℒ* formula. Identifiers in program position must belong to
/// `agents`; every other identifier is an atom and must not be an agent.
pub fn parse_formula(text: &str, agents: &BTreeSet<Agent>) -> Result<Formula, ParseError> {
    Parser::new(text, Scope::Declared(agents))?.run::<Formula>()
}

/// Parses an ℒ* formula, taking every identifier in program position to be
/// an agent. An identifier used in both positions is still an error.
pub fn parse_formula_inferring(text: &str) -> Result<Formula, ParseError> {
    Parser::new(text, Scope::Infer)?.run::<Formula>()
}

pub fn parse_pltl(text: &str) -> Result<PltlFormula, ParseError> {
    Parser::new(text, Scope::Infer)?.run::<PltlFormula>()
}

enum Scope<'s> {
    Declared(&'s BTreeSet<Agent>),
    Infer,
}

struct Parser<'s> {
    toks: Vec<Spanned>,
    idx: usize,
    scope: Scope<'s>,
    agent_uses: HashMap<String, usize>,
    atom_uses: HashMap<String, usize>,
}

trait Lang: Sized {
    fn tt() -> Self;
    fn ff() -> Self;
    fn prop(name: String) -> Self;
    fn not(f: Self) -> Self;
    fn and(l: Self, r: Self) -> Self;
    fn or(l: Self, r: Self) -> Self;
    fn implies(l: Self, r: Self) -> Self;
    /// Language-specific prefix operators; `None` if the current token does
    /// not start one.
    fn prefix(p: &mut Parser<'_>) -> Result<Option<Self>, ParseError>;
}

impl Lang for Formula {
    fn tt() -> Self {
        Formula::True
    }
    fn ff() -> Self {
        Formula::False
    }
    fn prop(name: String) -> Self {
        Formula::Prop(name)
    }
    fn not(f: Self) -> Self {
        Formula::not(f)
    }
    fn and(l: Self, r: Self) -> Self {
        Formula::and(l, r)
    }
    fn or(l: Self, r: Self) -> Self {
        Formula::or(l, r)
    }
    fn implies(l: Self, r: Self) -> Self {
        Formula::implies(l, r)
    }

    fn prefix(p: &mut Parser<'_>) -> Result<Option<Self>, ParseError> {
        let pos = p.pos();
        match p.peek().clone() {
            Tok::Lt => {
                p.bump();
                let prog = p.program()?;
                p.close(Tok::Gt, '<', pos)?;
                let body = p.unary::<Formula>()?;
                Ok(Some(Formula::diamond(prog, body)))
            }
            Tok::LBrack => {
                p.bump();
                let prog = p.program()?;
                p.close(Tok::RBrack, '[', pos)?;
                let body = p.unary::<Formula>()?;
                Ok(Some(Formula::boxed(prog, body)))
            }
            Tok::Upper('C') => {
                p.bump();
                let brace = p.pos();
                p.expect(Tok::LBrace, "`{`")?;
                let mut agents = vec![p.agent()?];
                while *p.peek() == Tok::Comma {
                    p.bump();
                    agents.push(p.agent()?);
                }
                p.close(Tok::RBrace, '{', brace)?;
                let body = p.unary::<Formula>()?;
                Ok(Formula::common_knowledge(agents, body))
            }
            _ => Ok(None),
        }
    }
}

impl Lang for PltlFormula {
    fn tt() -> Self {
        PltlFormula::True
    }
    fn ff() -> Self {
        PltlFormula::False
    }
    fn prop(name: String) -> Self {
        PltlFormula::Prop(name)
    }
    fn not(f: Self) -> Self {
        PltlFormula::not(f)
    }
    fn and(l: Self, r: Self) -> Self {
        PltlFormula::and(l, r)
    }
    fn or(l: Self, r: Self) -> Self {
        PltlFormula::or(l, r)
    }
    fn implies(l: Self, r: Self) -> Self {
        PltlFormula::implies(l, r)
    }

    fn prefix(p: &mut Parser<'_>) -> Result<Option<Self>, ParseError> {
        let op: fn(PltlFormula) -> PltlFormula = match p.peek() {
            Tok::Upper('X') => PltlFormula::next,
            Tok::Upper('Y') => PltlFormula::yesterday,
            Tok::Upper('F') => PltlFormula::future,
            Tok::Upper('P') => PltlFormula::past,
            _ => return Ok(None),
        };
        p.bump();
        Ok(Some(op(p.unary::<PltlFormula>()?)))
    }
}

impl<'s> Parser<'s> {
    fn new(text: &str, scope: Scope<'s>) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: tokenize(text)?,
            idx: 0,
            scope,
            agent_uses: HashMap::new(),
            atom_uses: HashMap::new(),
        })
    }

    fn run<L: Lang>(mut self) -> Result<L, ParseError> {
        let f = self.implication::<L>()?;
        let pos = self.pos();
        match self.peek() {
            Tok::Eof => Ok(f),
            Tok::RParen => Err(ParseError::Unbalanced { delim: ')', pos }),
            Tok::RBrack => Err(ParseError::Unbalanced { delim: ']', pos }),
            Tok::RBrace => Err(ParseError::Unbalanced { delim: '}', pos }),
            Tok::Gt => Err(ParseError::Unbalanced { delim: '>', pos }),
            _ => Err(self.unexpected("end of input")),
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.idx].tok
    }

    fn pos(&self) -> usize {
        self.toks[self.idx].pos
    }

    fn bump(&mut self) {
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        ParseError::Unexpected {
            found: self.peek().describe(),
            expected,
            pos: self.pos(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    /// Consumes the closing delimiter of a group opened at `open_pos`.
    fn close(&mut self, closer: Tok, open: char, open_pos: usize) -> Result<(), ParseError> {
        if *self.peek() == closer {
            self.bump();
            Ok(())
        } else if *self.peek() == Tok::Eof {
            Err(ParseError::Unbalanced {
                delim: open,
                pos: open_pos,
            })
        } else {
            Err(self.unexpected(match closer {
                Tok::RParen => "`)`",
                Tok::RBrack => "`]`",
                Tok::RBrace => "`}`",
                _ => "`>`",
            }))
        }
    }

    fn implication<L: Lang>(&mut self) -> Result<L, ParseError> {
        let lhs = self.disjunction::<L>()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication::<L>()?;
            Ok(L::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction<L: Lang>(&mut self) -> Result<L, ParseError> {
        let mut acc = self.conjunction::<L>()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            acc = L::or(acc, self.conjunction::<L>()?);
        }
        Ok(acc)
    }

    fn conjunction<L: Lang>(&mut self) -> Result<L, ParseError> {
        let mut acc = self.unary::<L>()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            acc = L::and(acc, self.unary::<L>()?);
        }
        Ok(acc)
    }

    fn unary<L: Lang>(&mut self) -> Result<L, ParseError> {
        if let Some(f) = L::prefix(self)? {
            return Ok(f);
        }
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(L::not(self.unary::<L>()?))
            }
            Tok::True => {
                self.bump();
                Ok(L::tt())
            }
            Tok::False => {
                self.bump();
                Ok(L::ff())
            }
            Tok::Ident(name) => {
                self.use_as_atom(&name, pos)?;
                self.bump();
                Ok(L::prop(name))
            }
            Tok::LParen => {
                self.bump();
                let f = self.implication::<L>()?;
                self.close(Tok::RParen, '(', pos)?;
                Ok(f)
            }
            Tok::Eof => Err(self.unexpected("a formula")),
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut acc = self.sequence()?;
        while matches!(self.peek(), Tok::Ident(w) if w == "u") {
            self.bump();
            acc = Program::union(acc, self.sequence()?);
        }
        Ok(acc)
    }

    fn sequence(&mut self) -> Result<Program, ParseError> {
        let mut acc = self.iteration()?;
        while *self.peek() == Tok::Semi {
            self.bump();
            acc = Program::seq(acc, self.iteration()?);
        }
        Ok(acc)
    }

    fn iteration(&mut self) -> Result<Program, ParseError> {
        let mut acc = self.base_program()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = Program::star(acc);
        }
        Ok(acc)
    }

    fn base_program(&mut self) -> Result<Program, ParseError> {
        let pos = self.pos();
        match self.peek() {
            Tok::LParen => {
                self.bump();
                let p = self.program()?;
                self.close(Tok::RParen, '(', pos)?;
                Ok(p)
            }
            Tok::Ident(w) if w != "u" => Ok(Program::Atom(self.agent()?)),
            _ => Err(self.unexpected("a program")),
        }
    }

    fn agent(&mut self) -> Result<Agent, ParseError> {
        let pos = self.pos();
        let name = match self.peek() {
            Tok::Ident(w) if w != "u" => w.clone(),
            _ => return Err(self.unexpected("an agent")),
        };
        if let Scope::Declared(agents) = self.scope {
            if !agents.iter().any(|a| a.as_str() == name) {
                return Err(ParseError::UndeclaredAgent { name, pos });
            }
        }
        if self.atom_uses.contains_key(&name) {
            return Err(ParseError::AgentAtomClash { name, pos });
        }
        self.agent_uses.entry(name.clone()).or_insert(pos);
        self.bump();
        // the lexer only produces lowercase-initial words and `u` is excluded above
        Ok(Agent(name))
    }

    fn use_as_atom(&mut self, name: &str, pos: usize) -> Result<(), ParseError> {
        let clash = match self.scope {
            Scope::Declared(agents) => agents.iter().any(|a| a.as_str() == name),
            Scope::Infer => false,
        } || self.agent_uses.contains_key(name);
        if clash {
            return Err(ParseError::AgentAtomClash {
                name: name.to_string(),
                pos,
            });
        }
        self.atom_uses.entry(name.to_string()).or_insert(pos);
        Ok(())
    }
}
