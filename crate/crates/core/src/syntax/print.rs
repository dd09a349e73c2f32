//! Canonical printing with the fewest parentheses the grammar allows.
//! Parsing the output yields the printed tree exactly.

use std::fmt::{self, Display, Formatter, Write};

use super::{Formula, PltlFormula, Program};

// Binding strength of formula positions, loosest first.
const IMPLIES: u8 = 0;
const OR: u8 = 1;
const AND: u8 = 2;
const UNARY: u8 = 3;

// Binding strength of program positions.
const UNION: u8 = 0;
const SEQ: u8 = 1;
const STAR: u8 = 2;

fn program_level(p: &Program) -> u8 {
    match p {
        Program::Union(..) => UNION,
        Program::Seq(..) => SEQ,
        Program::Atom(_) | Program::Star(_) => STAR,
    }
}

fn write_program(f: &mut Formatter<'_>, p: &Program, min: u8) -> fmt::Result {
    if program_level(p) < min {
        f.write_char('(')?;
        write_program(f, p, UNION)?;
        return f.write_char(')');
    }
    match p {
        Program::Atom(a) => write!(f, "{a}"),
        Program::Union(l, r) => {
            write_program(f, l, UNION)?;
            f.write_str(" u ")?;
            write_program(f, r, SEQ)
        }
        Program::Seq(l, r) => {
            write_program(f, l, SEQ)?;
            f.write_char(';')?;
            write_program(f, r, STAR)
        }
        Program::Star(b) => {
            write_program(f, b, STAR)?;
            f.write_char('*')
        }
    }
}

impl Display for Program {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_program(f, self, UNION)
    }
}

fn formula_level(g: &Formula) -> u8 {
    match g {
        Formula::Implies(..) => IMPLIES,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => UNARY,
    }
}

fn write_formula(f: &mut Formatter<'_>, g: &Formula, min: u8) -> fmt::Result {
    if formula_level(g) < min {
        f.write_char('(')?;
        write_formula(f, g, IMPLIES)?;
        return f.write_char(')');
    }
    match g {
        Formula::True => f.write_str("true"),
        Formula::False => f.write_str("false"),
        Formula::Prop(p) => f.write_str(p),
        Formula::Not(b) => {
            f.write_char('~')?;
            write_formula(f, b, UNARY)
        }
        Formula::And(l, r) => {
            write_formula(f, l, AND)?;
            f.write_str(" & ")?;
            write_formula(f, r, UNARY)
        }
        Formula::Or(l, r) => {
            write_formula(f, l, OR)?;
            f.write_str(" | ")?;
            write_formula(f, r, AND)
        }
        Formula::Implies(l, r) => {
            write_formula(f, l, OR)?;
            f.write_str(" -> ")?;
            write_formula(f, r, IMPLIES)
        }
        Formula::Diamond(p, b) => {
            write!(f, "<{p}>")?;
            write_formula(f, b, UNARY)
        }
        Formula::Box(p, b) => {
            write!(f, "[{p}]")?;
            write_formula(f, b, UNARY)
        }
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_formula(f, self, IMPLIES)
    }
}

fn pltl_level(g: &PltlFormula) -> u8 {
    match g {
        PltlFormula::Implies(..) => IMPLIES,
        PltlFormula::Or(..) => OR,
        PltlFormula::And(..) => AND,
        _ => UNARY,
    }
}

fn write_pltl(f: &mut Formatter<'_>, g: &PltlFormula, min: u8) -> fmt::Result {
    if pltl_level(g) < min {
        f.write_char('(')?;
        write_pltl(f, g, IMPLIES)?;
        return f.write_char(')');
    }
    let temporal = |f: &mut Formatter<'_>, op: &str, b: &PltlFormula| {
        f.write_str(op)?;
        f.write_char(' ')?;
        write_pltl(f, b, UNARY)
    };
    match g {
        PltlFormula::True => f.write_str("true"),
        PltlFormula::False => f.write_str("false"),
        PltlFormula::Prop(p) => f.write_str(p),
        PltlFormula::Not(b) => {
            f.write_char('~')?;
            write_pltl(f, b, UNARY)
        }
        PltlFormula::And(l, r) => {
            write_pltl(f, l, AND)?;
            f.write_str(" & ")?;
            write_pltl(f, r, UNARY)
        }
        PltlFormula::Or(l, r) => {
            write_pltl(f, l, OR)?;
            f.write_str(" | ")?;
            write_pltl(f, r, AND)
        }
        PltlFormula::Implies(l, r) => {
            write_pltl(f, l, OR)?;
            f.write_str(" -> ")?;
            write_pltl(f, r, IMPLIES)
        }
        PltlFormula::Next(b) => temporal(f, "X", b),
        PltlFormula::Yesterday(b) => temporal(f, "Y", b),
        PltlFormula::Future(b) => temporal(f, "F", b),
        PltlFormula::Past(b) => temporal(f, "P", b),
    }
}

impl Display for PltlFormula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_pltl(f, self, IMPLIES)
    }
}
