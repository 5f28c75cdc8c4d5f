//! Grammar-constrained walks with decaying energy.
//!
//! A parcel starts at each seed with `initial_energy` and follows the
//! grammar's steps. In diffusion mode it splits evenly over the qualifying
//! edges; in Monte Carlo mode each walker picks one edge at random. Energy
//! is multiplied by the per-edge factor on traversal (the step's time decay,
//! else `cfg.decay` for loop-free grammars, else 1) and by the loop decay
//! whenever the walk enters the loop target step. Emitting steps add
//! `sign · energy` to the target after the edge factor is applied.

mod engine;
mod grammar;
pub mod matrix;
mod ranked;

pub use engine::{Mode, Transition, WalkOutcome, Walker, WalkerConfig, WalkerError};
pub use grammar::{
    AnyPredicate, Emit, Filter, Grammar, GrammarError, GrammarStep, Loop, PredicateSel, Sign,
    StepDirection, TimeDecay,
};
pub use matrix::{adjacency_matrix, coauthorship_oracle, coauthorship_transition, SparseMatrix};
pub use ranked::{RankedEntry, RankedList};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ns;
    use crate::quadstore::{Quad, QuadStore, Term};
    use crate::schema::load_vocabulary;

    fn x(name: &str) -> Term {
        Term::iri(format!("http://x.org/{name}"))
    }

    fn add(store: &mut QuadStore, s: &str, p: &str, o: &str) {
        store
            .insert(Quad::new(x(s), Term::iri(ns::expand(p)), x(o), x("g")))
            .unwrap();
    }

    fn coauthorship() -> Grammar {
        Grammar::new(
            "coauthors",
            vec![
                GrammarStep::new("core:created", StepDirection::Out),
                GrammarStep::new("core:created", StepDirection::In)
                    .filter(Filter::ExcludePrevious)
                    .emit(Sign::Plus, None),
            ],
        )
    }

    #[test]
    fn two_authors_one_article() {
        let mut s = QuadStore::new();
        add(&mut s, "a", "core:created", "p");
        add(&mut s, "b", "core:created", "p");
        let vocab = load_vocabulary();
        let cfg = WalkerConfig::default();
        let list = Walker::new(&s, &vocab).execute(&coauthorship(), &[x("a")], &cfg).unwrap();
        assert_eq!(list.resources(), ["http://x.org/b"]);
        let expected = cfg.initial_energy * cfg.decay * cfg.decay;
        assert!((list.score("http://x.org/b").unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn dead_end_seed_gives_empty_list() {
        let mut s = QuadStore::new();
        add(&mut s, "p", "core:cites", "q");
        let vocab = load_vocabulary();
        let list = Walker::new(&s, &vocab)
            .execute(&coauthorship(), &[x("p")], &WalkerConfig::default())
            .unwrap();
        assert!(list.is_empty());
    }

    #[test]
    fn zero_decay_leaves_nothing_past_the_first_edge() {
        let mut s = QuadStore::new();
        add(&mut s, "a", "core:created", "p");
        add(&mut s, "b", "core:created", "p");
        let vocab = load_vocabulary();
        let cfg = WalkerConfig {
            decay: 0.0,
            ..Default::default()
        };
        let mut energies = Vec::new();
        let out = Walker::new(&s, &vocab)
            .execute_detailed(&coauthorship(), &[x("a")], &cfg, |t| energies.push(t.energy_after))
            .unwrap();
        assert!(out.ranked.is_empty());
        assert!(energies.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn errors() {
        let mut s = QuadStore::new();
        add(&mut s, "a", "core:created", "p");
        let vocab = load_vocabulary();
        let w = Walker::new(&s, &vocab);
        let cfg = WalkerConfig::default();
        assert_eq!(w.execute(&coauthorship(), &[], &cfg), Err(WalkerError::EmptySeeds));
        assert!(matches!(
            w.execute(&coauthorship(), &[x("nobody")], &cfg),
            Err(WalkerError::UnknownSeed(_))
        ));
        let bogus = Grammar::new("", vec![GrammarStep::new("http://x.org/nope", StepDirection::Out)]);
        assert!(matches!(
            w.execute(&bogus, &[x("a")], &cfg),
            Err(WalkerError::UnknownPredicate(_))
        ));
        let short = WalkerConfig {
            max_steps: 1,
            ..Default::default()
        };
        assert!(matches!(w.execute(&coauthorship(), &[x("a")], &short), Err(WalkerError::Config(_))));
    }

    #[test]
    fn loop_decay_applies_on_entering_the_loop_target() {
        // a -cites-> b -cites-> c -cites-> d, loop on the single step.
        let mut s = QuadStore::new();
        add(&mut s, "a", "core:cites", "b");
        add(&mut s, "b", "core:cites", "c");
        add(&mut s, "c", "core:cites", "d");
        let vocab = load_vocabulary();
        let g = Grammar::new(
            "chain",
            vec![GrammarStep::new("core:cites", StepDirection::Out).emit(Sign::Plus, None)],
        )
        .looping(0, 0.5);
        let list = Walker::new(&s, &vocab)
            .execute(&g, &[x("a")], &WalkerConfig::default())
            .unwrap();
        assert_eq!(list.score("http://x.org/b"), Some(1.0));
        assert_eq!(list.score("http://x.org/c"), Some(0.5));
        assert_eq!(list.score("http://x.org/d"), Some(0.25));
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let mut s = QuadStore::new();
        for (a, p) in [("a", "p1"), ("b", "p1"), ("a", "p2"), ("c", "p2"), ("d", "p2")] {
            add(&mut s, a, "core:created", p);
        }
        let vocab = load_vocabulary();
        let cfg = WalkerConfig {
            mode: Mode::MonteCarlo,
            walkers_per_seed: 200,
            rng_seed: 7,
            ..Default::default()
        };
        let w = Walker::new(&s, &vocab);
        let one = w.execute_detailed(&coauthorship(), &[x("a")], &cfg, |_| {}).unwrap();
        let two = w.execute_detailed(&coauthorship(), &[x("a")], &cfg, |_| {}).unwrap();
        assert_eq!(one, two);
        assert_eq!(one.ranked.len(), 3);
        assert!(one.standard_errors.values().all(|e| *e > 0.0));
    }
}
