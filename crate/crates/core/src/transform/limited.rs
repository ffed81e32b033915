//! Normal form for production-limited random-context grammars: every
//! right-hand side is a single terminal, one nonterminal, or two
//! nonterminals, and every condition set is empty or a single
//! nonterminal. Runs the forbid split, the cooperating-system
//! construction, and the walker encoding back to back, then reads the
//! result as a random-context grammar again.

use crate::digest::grammar_digest;
use crate::grammar::{Grammar, GrammarKind, Mode};
use crate::production::Condition;
use crate::validate::validate_grammar;

use super::{
    pcd_to_sc, rc_normalize_forbid, rc_to_permitting_cd, sc_def2_to_def1, ClauseEntry,
    TransformError, TransformOp, TransformOptions, TransformReport,
};

pub fn rc_limited_normal_form(
    g: &Grammar,
    opts: &TransformOptions,
) -> Result<(Grammar, TransformReport), TransformError> {
    let (split, r1) = rc_normalize_forbid(g, opts)?;
    if !validate_grammar(g).classification.production_limited {
        return Err(TransformError::NotProductionLimited);
    }
    let (sys, r2) = rc_to_permitting_cd(&split, opts)?;
    let (packed, r3) = pcd_to_sc(&sys, opts)?;
    let (narrowed, r4) = sc_def2_to_def1(&packed, opts)?;

    let mut out = narrowed;
    out.kind = GrammarKind::Rc;
    out.mode = Mode::Def1;

    let check = validate_grammar(&out);
    if !check.ok() {
        return Err(TransformError::Internal(format!(
            "normal form failed validation\n{}",
            check.canonical_text()
        )));
    }
    if !check.classification.limited {
        return Err(TransformError::Internal(
            "normal form output is not limited".into(),
        ));
    }

    // The last stage keeps productions in order, so surviving outputs
    // inherit the walker-encoding clause tags positionally.
    let mut clauses = Vec::with_capacity(out.productions.len());
    for (idx, p) in packed.productions.iter().enumerate() {
        if p.forb.contains(&Condition::sym(p.lhs.clone())) {
            continue;
        }
        clauses.push(ClauseEntry {
            component: None,
            label: clauses.len() as u32 + 1,
            clause: r3.clauses[idx].clause,
        });
    }
    if clauses.len() != out.productions.len() {
        return Err(TransformError::Internal(
            "clause attribution out of step with output".into(),
        ));
    }

    let stages = [&r1, &r2, &r3, &r4];
    let report = TransformReport {
        op: TransformOp::LimitedNf,
        input_digest: grammar_digest(g),
        output_digest: grammar_digest(&out),
        input_symbols: g.nonterminals.len() + g.terminals.len(),
        output_symbols: out.nonterminals.len() + out.terminals.len(),
        input_productions: g.productions.len(),
        output_productions: out.productions.len(),
        component_names: Vec::new(),
        clauses,
        pruned_productions: stages.iter().map(|r| r.pruned_productions).sum(),
        warnings: stages
            .iter()
            .flat_map(|r| r.warnings.iter().map(move |w| format!("{}: {w}", r.op)))
            .collect(),
    };
    Ok((out, report))
}
