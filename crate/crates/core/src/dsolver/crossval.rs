use std::fmt;

use crate::error::{Error, Result};

use super::{ds_criterion, ds_search, DSInstance, SearchBudget, SearchOutcome, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agreement {
    Agree,
    /// Predicted solvable with no witness found, or an undecided verdict.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossRow {
    pub id: String,
    pub verdict: Verdict,
    pub search: &'static str,
    pub residual: f64,
    pub seed: u64,
    pub agreement: Agreement,
}

impl fmt::Display for CrossRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "DS {} verdict={} search={} residual={:.3e} seed={}",
            self.id, self.verdict, self.search, self.residual, self.seed
        )
    }
}

/// Runs the criterion and the search on every instance.
///
/// A witness for an instance predicted unsolvable contradicts the criterion; the
/// run stops with [`Error::Counterexample`] carrying the instance and the witness.
pub fn ds_cross_validate(family: &[DSInstance], budget: SearchBudget, seed: u64) -> Result<Vec<CrossRow>> {
    let mut rows = Vec::with_capacity(family.len());
    for inst in family {
        let verdict = ds_criterion(inst)?.verdict;
        let outcome = ds_search(inst, budget, seed)?;
        let agreement = match (verdict, &outcome) {
            (Verdict::Unsolvable, SearchOutcome::Found(w)) => {
                return Err(Error::Counterexample(format!(
                    "instance {} seed {seed}\n{}witness:\n{}",
                    inst.id,
                    inst.to_spec().to_text(),
                    w.core.to_text()
                )));
            }
            (Verdict::Solvable, SearchOutcome::Found(_)) | (Verdict::Unsolvable, SearchOutcome::NoneFound { .. }) => {
                Agreement::Agree
            }
            _ => Agreement::Inconclusive,
        };
        rows.push(CrossRow {
            id: inst.id.clone(),
            verdict,
            search: outcome.label(),
            residual: outcome.residual(),
            seed,
            agreement,
        });
    }
    Ok(rows)
}
