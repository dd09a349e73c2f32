use super::{Agent, Formula, PltlFormula, Program};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TranslateError {
    #[error("the temporal embedding needs two distinct agents, got `{0}` twice")]
    SameAgent(Agent),
}

/// Replaces every atomic program `a` by `a*`.
pub fn star_translation(f: &Formula) -> Formula {
    f.map_programs(|p| p.map_atoms(|a| Program::star(Program::Atom(a.clone()))))
}

/// Replaces every atomic program `a` by its transitive closure, written
/// `a;a*` since `a+` is not a primitive of the language.
pub fn plus_translation(f: &Formula) -> Formula {
    f.map_programs(|p| {
        p.map_atoms(|a| {
            Program::seq(
                Program::Atom(a.clone()),
                Program::star(Program::Atom(a.clone())),
            )
        })
    })
}

/// Embeds PLTL into ℒ* with `X = <a;b>`, `Y = <b;a>`, `F = <(a;b)*>` and
/// `P = <(b;a)*>`.
pub fn top_translation(f: &PltlFormula, a: &Agent, b: &Agent) -> Result<Formula, TranslateError> {
    if a == b {
        return Err(TranslateError::SameAgent(a.clone()));
    }
    let forward = Program::seq(Program::Atom(a.clone()), Program::Atom(b.clone()));
    let backward = Program::seq(Program::Atom(b.clone()), Program::Atom(a.clone()));
    Ok(top(f, &forward, &backward))
}

fn top(f: &PltlFormula, fwd: &Program, bwd: &Program) -> Formula {
    let rec = |g: &PltlFormula| top(g, fwd, bwd);
    match f {
        PltlFormula::True => Formula::True,
        PltlFormula::False => Formula::False,
        PltlFormula::Prop(p) => Formula::Prop(p.clone()),
        PltlFormula::Not(g) => Formula::not(rec(g)),
        PltlFormula::And(l, r) => Formula::and(rec(l), rec(r)),
        PltlFormula::Or(l, r) => Formula::or(rec(l), rec(r)),
        PltlFormula::Implies(l, r) => Formula::implies(rec(l), rec(r)),
        PltlFormula::Next(g) => Formula::diamond(fwd.clone(), rec(g)),
        PltlFormula::Yesterday(g) => Formula::diamond(bwd.clone(), rec(g)),
        PltlFormula::Future(g) => Formula::diamond(Program::star(fwd.clone()), rec(g)),
        PltlFormula::Past(g) => Formula::diamond(Program::star(bwd.clone()), rec(g)),
    }
}

/// Maximum nesting of `<..>` / `[..]`.
pub fn modal_depth(f: &Formula) -> usize {
    match f {
        Formula::True | Formula::False | Formula::Prop(_) => 0,
        Formula::Not(g) => modal_depth(g),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
            modal_depth(l).max(modal_depth(r))
        }
        Formula::Diamond(_, g) | Formula::Box(_, g) => 1 + modal_depth(g),
    }
}

/// True iff no program in `f` contains a `*`.
pub fn star_free(f: &Formula) -> bool {
    let mut free = true;
    f.visit(&mut |g| {
        if let Formula::Diamond(p, _) | Formula::Box(p, _) = g {
            free &= !p.has_star();
        }
    });
    free
}
