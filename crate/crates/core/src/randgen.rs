//! Seeded random grammars for the fuzz harness.
//!
//! Every generated grammar passes validation by construction, always
//! has a terminal production for the start symbol (so the language is
//! nonempty and derivations go somewhere), and is fully determined by
//! the seed (ChaCha8, stable across dependency upgrades). Right-hand
//! sides carry at most `max_rhs_nonterminals` nonterminals: the bounded
//! searches downstream blow up with the number of nonterminals per
//! form, so fuzzing mostly-linear shapes buys far more cases per second
//! at equal coverage of the construction clauses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grammar::{Grammar, GrammarKind, Mode};
use crate::production::Production;
use crate::symbol::Symbol;
use crate::validate::validate_grammar;

#[derive(Debug, Clone)]
pub struct ShapeConfig {
    /// Nonterminal count, capped at the name pool (8).
    pub nonterminals: usize,
    /// Terminal count, capped at the name pool (6).
    pub terminals: usize,
    pub productions: usize,
    pub max_rhs_len: usize,
    /// At most this many nonterminals per right-hand side.
    pub max_rhs_nonterminals: usize,
    /// Chance that a production gets a permitting (and, independently,
    /// a forbidding) condition.
    pub condition_prob: f64,
    /// Keep each left-hand side out of its own forbidding set. The
    /// permitting cooperating construction rejects such productions;
    /// the mode conversions merely drop them.
    pub clear_own_forbid: bool,
}

impl Default for ShapeConfig {
    fn default() -> Self {
        ShapeConfig {
            nonterminals: 3,
            terminals: 2,
            productions: 4,
            max_rhs_len: 3,
            max_rhs_nonterminals: 1,
            condition_prob: 0.4,
            clear_own_forbid: false,
        }
    }
}

const NT_POOL: [&str; 8] = ["S", "A", "B", "C", "D", "E", "F", "G"];
const T_POOL: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

pub fn random_grammar(kind: GrammarKind, mode: Mode, shape: &ShapeConfig, seed: u64) -> Grammar {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nts: Vec<Symbol> = NT_POOL[..shape.nonterminals.clamp(1, NT_POOL.len())]
        .iter()
        .map(|n| Symbol::nonterminal(n).unwrap())
        .collect();
    let ts: Vec<Symbol> = T_POOL[..shape.terminals.clamp(1, T_POOL.len())]
        .iter()
        .map(|n| Symbol::terminal(n).unwrap())
        .collect();
    let start = nts[0].clone();
    let rc = kind == GrammarKind::Rc;
    // Random context conditions are nonterminal sets; the
    // semi-conditional degree (1,1) allows one symbol of either class
    // per side.
    let cond_pool: Vec<Symbol> = if rc {
        nts.clone()
    } else {
        nts.iter().chain(ts.iter()).cloned().collect()
    };

    let pick = |rng: &mut ChaCha8Rng, pool: &[Symbol]| pool[rng.gen_range(0..pool.len())].clone();
    let draw = |rng: &mut ChaCha8Rng, avoid: Option<&Symbol>| -> Vec<Symbol> {
        if !rng.gen_bool(shape.condition_prob) {
            return Vec::new();
        }
        let pool: Vec<&Symbol> = cond_pool.iter().filter(|s| Some(*s) != avoid).collect();
        let size = if rc && rng.gen_bool(0.25) { 2 } else { 1 };
        (0..size.min(pool.len())).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect()
    };

    let mut productions = Vec::new();
    // Anchor: the start symbol can always finish.
    let anchor_len = rng.gen_range(1..=shape.max_rhs_len.clamp(1, 2));
    let anchor_rhs: Vec<Symbol> = (0..anchor_len).map(|_| pick(&mut rng, &ts)).collect();
    productions.push(Production::cf(1, start.clone(), anchor_rhs));

    while productions.len() < shape.productions.max(1) {
        let label = productions.len() as u32 + 1;
        let lhs = pick(&mut rng, &nts);
        let len = rng.gen_range(1..=shape.max_rhs_len.max(1));
        let nt_count = rng.gen_range(0..=shape.max_rhs_nonterminals.min(len));
        let nt_slots = rand::seq::index::sample(&mut rng, len, nt_count);
        let mut rhs: Vec<Symbol> = (0..len).map(|_| pick(&mut rng, &ts)).collect();
        for slot in nt_slots {
            rhs[slot] = pick(&mut rng, &nts);
        }
        let per = draw(&mut rng, None);
        let avoid = shape.clear_own_forbid.then_some(lhs.clone());
        let forb = draw(&mut rng, avoid.as_ref());
        productions.push(Production::ctx(label, lhs, rhs, per, forb));
    }

    let g = Grammar {
        kind,
        mode,
        nonterminals: nts.into_iter().collect(),
        terminals: ts.into_iter().collect(),
        start,
        productions,
    };
    debug_assert!(validate_grammar(&g).ok(), "generator produced an invalid grammar");
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digest::grammar_digest;

    #[test]
    fn same_seed_same_grammar() {
        let shape = ShapeConfig::default();
        let a = random_grammar(GrammarKind::Rc, Mode::Def1, &shape, 7);
        let b = random_grammar(GrammarKind::Rc, Mode::Def1, &shape, 7);
        assert_eq!(grammar_digest(&a), grammar_digest(&b));
        let c = random_grammar(GrammarKind::Rc, Mode::Def1, &shape, 8);
        assert_ne!(grammar_digest(&a), grammar_digest(&c));
    }

    #[test]
    fn generated_grammars_are_valid_and_shaped() {
        let shape = ShapeConfig { max_rhs_nonterminals: 1, ..ShapeConfig::default() };
        for kind in [GrammarKind::Rc, GrammarKind::Sc { per_degree: 1, forb_degree: 1 }] {
            for seed in 0..50 {
                let g = random_grammar(kind, Mode::Def2, &shape, seed);
                assert!(validate_grammar(&g).ok(), "seed {seed}");
                assert_eq!(g.productions[0].lhs, g.start);
                assert!(g.productions[0].rhs.iter().all(|s| s.is_terminal()));
                for p in &g.productions {
                    let nts = p.rhs.iter().filter(|s| s.is_nonterminal()).count();
                    assert!(nts <= 1, "seed {seed} rhs {:?}", p.rhs);
                }
            }
        }
    }

    #[test]
    fn own_forbid_can_be_suppressed() {
        let shape = ShapeConfig {
            condition_prob: 1.0,
            clear_own_forbid: true,
            ..ShapeConfig::default()
        };
        for seed in 0..50 {
            let g = random_grammar(GrammarKind::Rc, Mode::Def1, &shape, seed);
            assert!(crate::validate::lhs_clear_of_forbidding(&g), "seed {seed}");
        }
    }
}
