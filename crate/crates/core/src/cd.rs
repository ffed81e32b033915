//! t-mode semantics for grammar systems with shared alphabets.
//!
//! A component rewrites under def1 until none of its productions is
//! applicable; only such exhausted forms are handed to the next
//! component. Each t-step must make at least one derivation step, so a
//! form that is already exhausted for component k has no k-successors.
//!
//! Components deliberately contain self-loops (productions that rewrite
//! a symbol to itself). The inner reachability graph over forms of
//! length <= bound is finite, so closure with a visited set terminates;
//! forms trapped in a loop with no other exit simply contribute no
//! exhausted successors.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc;

use crate::digest;
use crate::engine::compile::{successor_forms, CompiledSystem};
use crate::engine::{EngineError, EnumConfig, LanguageSample, SententialForm};
use crate::grammar::{CDSystem, Mode};

/// One component-local derivation to exhaustion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TModeStep {
    /// 1-based component index.
    pub component: usize,
    pub source: SententialForm,
    /// Number of inner derivation steps taken, always >= 1.
    pub inner_steps: usize,
    pub result: SententialForm,
}

/// Exhausted forms paired with their inner step distance, in discovery
/// order, plus a truncation flag: set when the visited-form cap was
/// hit, making the list incomplete (every listed form is still
/// genuinely reachable).
type ClosureOutcome = (Vec<(Vec<u32>, usize)>, bool);

/// Exhausted forms reachable from `start` inside component `k`.
fn t_closure(
    cs: &CompiledSystem,
    k: usize,
    start: &[u32],
    bound: usize,
    cap: usize,
) -> ClosureOutcome {
    let set = &cs.components[k];
    let mut results = Vec::new();
    let mut truncated = false;
    let mut visited: HashSet<Vec<u32>> = HashSet::new();
    visited.insert(start.to_vec());
    let mut queue: VecDeque<(Vec<u32>, usize)> = VecDeque::new();
    queue.push_back((start.to_vec(), 0));
    while let Some((form, dist)) = queue.pop_front() {
        let (any_applicable, succs) = successor_forms(set, Mode::Def1, &form, bound);
        if !any_applicable && dist >= 1 {
            results.push((form, dist));
            continue;
        }
        for s in succs {
            if visited.contains(&s) {
                continue;
            }
            if visited.len() >= cap {
                truncated = true;
                return (results, truncated);
            }
            visited.insert(s.clone());
            queue.push_back((s, dist + 1));
        }
    }
    (results, truncated)
}

pub fn t_step_successors(
    sys: &CDSystem,
    component: usize,
    form: &SententialForm,
    bound: usize,
) -> Result<BTreeSet<SententialForm>, EngineError> {
    t_step_successors_with(sys, component, form, bound, &EnumConfig::default())
}

/// All forms reachable from `form` by one t-step of the given 1-based
/// component, restricted to length <= `bound`.
pub fn t_step_successors_with(
    sys: &CDSystem,
    component: usize,
    form: &SententialForm,
    bound: usize,
    cfg: &EnumConfig,
) -> Result<BTreeSet<SententialForm>, EngineError> {
    if component == 0 || component > sys.components.len() {
        return Err(EngineError::BadComponent { component, count: sys.components.len() });
    }
    let mut cs = CompiledSystem::new(sys);
    let encoded = cs.encode_interning(form.symbols());
    let (results, truncated) = t_closure(&cs, component - 1, &encoded, bound, cfg.max_forms);
    if truncated {
        return Err(EngineError::ResourceCap { cap: cfg.max_forms });
    }
    Ok(results
        .into_iter()
        .map(|(f, _)| SententialForm::new(cs.table.decode(&f)).expect("forms stay nonempty"))
        .collect())
}

fn expand_components(
    cs: &CompiledSystem,
    form: &[u32],
    bound: usize,
    cap: usize,
) -> Vec<ClosureOutcome> {
    (0..cs.components.len()).map(|k| t_closure(cs, k, form, bound, cap)).collect()
}

fn cd_closure(
    sys: &CDSystem,
    bound: usize,
    cfg: &EnumConfig,
    mut trace: Option<&mut Vec<TModeStep>>,
) -> LanguageSample {
    assert!(bound >= 1, "bound must be positive");
    let cs = CompiledSystem::new(sys);
    let mut sample = LanguageSample {
        source_digest: digest::system_digest(sys),
        bound,
        max_forms: cfg.max_forms,
        words: BTreeSet::new(),
        truncated: false,
        states_explored: 0,
    };

    let start: Arc<[u32]> = Arc::from(vec![cs.start]);
    let mut visited: HashSet<Arc<[u32]>> = HashSet::new();
    visited.insert(start.clone());
    // The start form itself is never a word: the language requires at
    // least one full t-step.
    let mut frontier = vec![start];

    'search: while !frontier.is_empty() {
        let expanded = expand_frontier_cd(&cs, &frontier, bound, cfg);
        let mut next = Vec::new();
        for (source, by_component) in frontier.iter().zip(expanded) {
            for (k, (results, inner_truncated)) in by_component.into_iter().enumerate() {
                if inner_truncated {
                    sample.truncated = true;
                }
                for (form, dist) in results {
                    if visited.contains(&form[..]) {
                        continue;
                    }
                    if visited.len() >= cfg.max_forms {
                        sample.truncated = true;
                        break 'search;
                    }
                    let form: Arc<[u32]> = Arc::from(form);
                    visited.insert(form.clone());
                    if let Some(out) = trace.as_mut() {
                        out.push(TModeStep {
                            component: k + 1,
                            source: SententialForm::new(cs.table.decode(source)).expect("nonempty"),
                            inner_steps: dist,
                            result: SententialForm::new(cs.table.decode(&form)).expect("nonempty"),
                        });
                    }
                    if cs.table.is_all_terminal(&form) {
                        sample.words.insert(cs.table.decode(&form));
                    }
                    next.push(form);
                }
            }
        }
        frontier = next;
    }

    sample.states_explored = visited.len();
    sample
}

fn expand_frontier_cd(
    cs: &CompiledSystem,
    frontier: &[Arc<[u32]>],
    bound: usize,
    cfg: &EnumConfig,
) -> Vec<Vec<ClosureOutcome>> {
    #[cfg(feature = "parallel")]
    if cfg.parallel && frontier.len() > 1 {
        use rayon::prelude::*;
        return frontier
            .par_iter()
            .map(|f| expand_components(cs, f, bound, cfg.max_forms))
            .collect();
    }
    frontier.iter().map(|f| expand_components(cs, f, bound, cfg.max_forms)).collect()
}

pub fn enumerate_bounded_cd(sys: &CDSystem, bound: usize) -> LanguageSample {
    cd_closure(sys, bound, &EnumConfig::default(), None)
}

pub fn enumerate_bounded_cd_with(sys: &CDSystem, bound: usize, cfg: &EnumConfig) -> LanguageSample {
    cd_closure(sys, bound, cfg, None)
}

/// Like [`enumerate_bounded_cd_with`], additionally returning the
/// t-steps that first discovered each visited form (the search tree,
/// not every edge), in discovery order.
pub fn enumerate_bounded_cd_traced(
    sys: &CDSystem,
    bound: usize,
    cfg: &EnumConfig,
) -> (LanguageSample, Vec<TModeStep>) {
    let mut steps = Vec::new();
    let sample = cd_closure(sys, bound, cfg, Some(&mut steps));
    (sample, steps)
}

/// Canonical structured-text export of a t-step log.
pub fn trace_text(steps: &[TModeStep]) -> String {
    let mut out = String::new();
    out.push_str("t-trace\n");
    out.push_str(&format!("steps {}\n", steps.len()));
    for s in steps {
        out.push_str(&format!(
            "step component {} inner {} source {} result {}\n",
            s.component,
            s.inner_steps,
            s.source.digest(),
            s.result.digest()
        ));
    }
    out
}
