//! CNF-to-game reduction showing that pricing a target *set* is NP-hard.
//!
//! A CNF formula maps to a two-player game in which both agents share one
//! strategy per clause plus one strategy per literal polarity. The desired
//! set excludes agent 1's clause strategies and the mismatched literal
//! pairs; the formula is satisfiable exactly when a 2-priced scheme exists,
//! and each truth assignment induces a canonical candidate scheme.

use thiserror::Error;

use crate::game::{Game, PaymentScheme, Profile};
use crate::rat::{rat, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SatError {
    #[error("formula must have at least one variable")]
    NoVariables,
    #[error("clause {clause} has fewer than two literals")]
    ShortClause { clause: usize },
    #[error("clause {clause} contains literal 0 or a variable above {max}")]
    InvalidLiteral { clause: usize, max: usize },
    #[error("clause {clause} contains a variable in both polarities")]
    TautologicalClause { clause: usize },
    #[error("variable {variable} must appear both positively and negatively")]
    MissingPolarity { variable: usize },
    #[error("assignment has {got} entries, formula has {expected} variables")]
    WrongAssignmentLength { expected: usize, got: usize },
}

/// A CNF formula in DIMACS-signed form: literal `+v` is variable `v`,
/// literal `-v` its negation. Construction enforces the reduction's
/// preconditions: clauses of at least two literals, no clause mentioning a
/// variable in both polarities, and every variable appearing in both
/// polarities somewhere in the formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    variable_count: usize,
    clauses: Vec<Vec<i64>>,
}

impl CnfFormula {
    pub fn new(variable_count: usize, clauses: Vec<Vec<i64>>) -> Result<Self, SatError> {
        if variable_count == 0 {
            return Err(SatError::NoVariables);
        }
        let mut cleaned = Vec::with_capacity(clauses.len());
        for (index, raw) in clauses.into_iter().enumerate() {
            let mut clause = raw;
            clause.sort_unstable();
            clause.dedup();
            if clause
                .iter()
                .any(|&l| l == 0 || l.unsigned_abs() as usize > variable_count)
            {
                return Err(SatError::InvalidLiteral {
                    clause: index,
                    max: variable_count,
                });
            }
            if clause.len() < 2 {
                return Err(SatError::ShortClause { clause: index });
            }
            if clause.iter().any(|&l| clause.contains(&-l)) {
                return Err(SatError::TautologicalClause { clause: index });
            }
            cleaned.push(clause);
        }
        for variable in 1..=variable_count {
            let pos = cleaned.iter().any(|c| c.contains(&(variable as i64)));
            let neg = cleaned.iter().any(|c| c.contains(&-(variable as i64)));
            if !pos || !neg {
                return Err(SatError::MissingPolarity { variable });
            }
        }
        Ok(CnfFormula {
            variable_count,
            clauses: cleaned,
        })
    }

    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    pub fn clauses(&self) -> &[Vec<i64>] {
        &self.clauses
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    fn clause_has(&self, clause: usize, literal: i64) -> bool {
        self.clauses[clause].contains(&literal)
    }

    fn clause_mentions(&self, clause: usize, variable: usize) -> bool {
        self.clause_has(clause, variable as i64) || self.clause_has(clause, -(variable as i64))
    }

    pub fn satisfies(&self, assignment: &[bool]) -> Result<bool, SatError> {
        if assignment.len() != self.variable_count {
            return Err(SatError::WrongAssignmentLength {
                expected: self.variable_count,
                got: assignment.len(),
            });
        }
        Ok(self.clauses.iter().all(|clause| {
            clause.iter().any(|&l| {
                let value = assignment[l.unsigned_abs() as usize - 1];
                if l > 0 {
                    value
                } else {
                    !value
                }
            })
        }))
    }
}

/// Strategy layout shared by both agents: clause strategies first, then the
/// positive-literal strategies, then the negative ones.
fn strategy_labels(formula: &CnfFormula) -> Vec<String> {
    let mut labels = Vec::with_capacity(formula.clause_count() + 2 * formula.variable_count());
    for i in 1..=formula.clause_count() {
        labels.push(format!("c{i}"));
    }
    for i in 1..=formula.variable_count() {
        labels.push(format!("y{i}"));
    }
    for i in 1..=formula.variable_count() {
        labels.push(format!("z{i}"));
    }
    labels
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    Clause(usize),
    Pos(usize),
    Neg(usize),
}

fn role(formula: &CnfFormula, strategy: usize) -> Role {
    let m = formula.clause_count();
    let n = formula.variable_count();
    if strategy < m {
        Role::Clause(strategy)
    } else if strategy < m + n {
        Role::Pos(strategy - m)
    } else {
        Role::Neg(strategy - m - n)
    }
}

fn agent1_payoff(formula: &CnfFormula, row: Role, col: Role) -> Rat {
    use Role::*;
    let v = |x: i64| rat(x);
    match (row, col) {
        (Clause(i), Pos(j)) => v(if formula.clause_has(i, (j + 1) as i64) { 3 } else { 0 }),
        (Clause(i), Neg(j)) => v(if formula.clause_has(i, -((j + 1) as i64)) { 3 } else { 0 }),
        (Clause(i), Clause(j)) => v(if i == j { 50 } else { 0 }),
        (Pos(i), Pos(j)) | (Neg(i), Neg(j)) => v(if i == j { 2 } else { 3 }),
        (Pos(i), Neg(j)) | (Neg(i), Pos(j)) => v(if i == j { 1 } else { 3 }),
        (Pos(i), Clause(j)) | (Neg(i), Clause(j)) => {
            v(if formula.clause_mentions(j, i + 1) { 51 } else { 0 })
        }
    }
}

fn agent2_payoff(row: Role, col: Role) -> Rat {
    use Role::*;
    let v = |x: i64| rat(x);
    match (row, col) {
        (Pos(i), Pos(j)) | (Neg(i), Neg(j)) => v(if i == j { 101 } else { 0 }),
        (Pos(i), Neg(j)) | (Neg(i), Pos(j)) => v(if i == j { 100 } else { 0 }),
        (Clause(i), Clause(j)) => v(if i == j { 50 } else { 0 }),
        (Pos(i), Clause(j)) | (Neg(i), Clause(j)) => v(if i == j { 50 } else { 0 }),
        (Clause(_), Pos(_)) | (Clause(_), Neg(_)) => v(0),
    }
}

/// Builds the reduction game and its desired set. The desired set is every
/// profile except those where agent 1 plays a clause strategy and the
/// mismatched literal pairs `(y_i, z_i)` and `(z_i, y_i)`.
pub fn sat_gadget(formula: &CnfFormula) -> (Game, Vec<Profile>) {
    let labels = strategy_labels(formula);
    let count = labels.len();
    let mut payoffs = Vec::with_capacity(count * count);
    for row in 0..count {
        for col in 0..count {
            let r = role(formula, row);
            let c = role(formula, col);
            payoffs.push(vec![agent1_payoff(formula, r, c), agent2_payoff(r, c)]);
        }
    }
    let game = Game::new(vec![labels.clone(), labels], payoffs).expect("gadget tensor is total");

    let mut target = Vec::new();
    for row in 0..count {
        for col in 0..count {
            let excluded = match (role(formula, row), role(formula, col)) {
                (Role::Clause(_), _) => true,
                (Role::Pos(i), Role::Neg(j)) | (Role::Neg(i), Role::Pos(j)) => i == j,
                _ => false,
            };
            if !excluded {
                target.push(Profile::new(vec![row, col]));
            }
        }
    }
    (game, target)
}

/// The candidate scheme induced by a truth assignment: one unit to agent 1
/// across the whole row of each chosen literal strategy, and one unit to
/// agent 2 on the mismatched pair that the assignment rules out.
pub fn assignment_scheme(
    formula: &CnfFormula,
    assignment: &[bool],
) -> Result<PaymentScheme, SatError> {
    if assignment.len() != formula.variable_count() {
        return Err(SatError::WrongAssignmentLength {
            expected: formula.variable_count(),
            got: assignment.len(),
        });
    }
    let (game, _) = sat_gadget(formula);
    let m = formula.clause_count();
    let n = formula.variable_count();
    let count = m + 2 * n;
    let mut scheme = PaymentScheme::zero(&game);
    for (var, &value) in assignment.iter().enumerate() {
        let chosen_row = if value { m + var } else { m + n + var };
        for col in 0..count {
            scheme
                .set(&game, 0, &Profile::new(vec![chosen_row, col]), rat(1))
                .expect("gadget profile");
        }
        let (row2, col2) = if value {
            (m + n + var, m + var) // (z_i, y_i)
        } else {
            (m + var, m + n + var) // (y_i, z_i)
        };
        scheme
            .set(&game, 1, &Profile::new(vec![row2, col2]), rat(1))
            .expect("gadget profile");
    }
    Ok(scheme)
}
