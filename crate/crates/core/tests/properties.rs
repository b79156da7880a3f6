mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::*;
use monogenic::certs::{validate_cayley_table, CayleyTable};
use monogenic::classify::{landing_outcomes, phase1_eliminate, phase2_eliminate, Bracketing};
use monogenic::rewrite::{congruence_ball, is_consequence, one_step_rewrites, ProbeLimits};
use monogenic::typespace::{apply_symmetry, canonical_rep, group, orbits, TypeTuple};
use monogenic::words::product_presentation;
use monogenic::{parse_presentation, Family, Letter, Presentation, Word};

fn word_strategy(alphabet: &'static str, max: usize) -> impl Strategy<Value = Word> {
    proptest::collection::vec(proptest::sample::select(alphabet.as_bytes().to_vec()), 1..=max)
        .prop_map(|b| Word::from_bytes(&b))
}

fn presentation_strategy() -> impl Strategy<Value = Presentation> {
    proptest::collection::vec((word_strategy("abc", 3), word_strategy("abc", 3)), 1..=4).prop_filter_map(
        "valid presentation",
        |rels| {
            let text = rels
                .iter()
                .map(|(l, r)| format!("{l}={r}"))
                .collect::<Vec<_>>()
                .join("; ");
            parse_presentation(&format!("letters a b c; {text}")).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rewriting_is_symmetric(p in presentation_strategy(), w in word_strategy("abc", 7)) {
        for v in one_step_rewrites(&w, &p) {
            prop_assert!(one_step_rewrites(&v, &p).contains(&w));
        }
    }

    #[test]
    fn ball_agrees_with_string_oracle(p in presentation_strategy()) {
        prop_assert!(ball_matches_oracle(&p, 5));
    }

    #[test]
    fn consequence_paths_stay_in_the_ball(p in presentation_strategy(), u in word_strategy("abc", 4), v in word_strategy("abc", 4)) {
        let (ball, _) = congruence_ball(&p, 5).unwrap();
        let verdict = is_consequence(&u, &v, &p, 5, 100_000).unwrap();
        prop_assert_eq!(verdict.is_derivable(), ball.same_class(&u, &v).unwrap());
    }

    #[test]
    fn canonical_rep_is_idempotent_and_least(entries in proptest::collection::vec(0u8..3, 6)) {
        let t = TypeTuple::new(3, &entries).unwrap();
        let c = canonical_rep(&t);
        prop_assert_eq!(canonical_rep(&c), c);
        prop_assert_eq!(Some(c), oracle_orbit(&t).into_iter().next());
    }

    #[test]
    fn table_folds_agree(w in word_strategy("abc", 12), which in 0usize..6) {
        let f = [Family::ThreeII, Family::ThreeIII, Family::ThreeIV, Family::ThreeV, Family::ThreeVI, Family::ThreeIX][which];
        let t = CayleyTable::fixture(f).unwrap();
        prop_assert_eq!(t.evaluate(&w), t.evaluate_right(&w));
        let split = w.len() / 2;
        if split > 0 {
            let (l, r) = (Word::from_bytes(&w.as_bytes()[..split]), Word::from_bytes(&w.as_bytes()[split..]));
            let both = t.product(t.evaluate(&l).unwrap(), t.evaluate(&r).unwrap());
            prop_assert_eq!(Some(both), t.evaluate(&w));
        }
    }
}

#[test]
fn fixture_tables_validate() {
    for f in Family::ALL {
        if let Some(t) = CayleyTable::fixture(f) {
            assert!(validate_cayley_table(&t).is_ok());
        }
    }
}

#[test]
fn rewriting_symmetry_on_families() {
    check_rewriting_symmetry(&family_instances(2), 6).unwrap();
}

#[test]
fn ball_monotonicity() {
    for (_, _, p) in family_instances(2) {
        check_ball_monotonicity(&p, 6).unwrap();
    }
    let p = product_presentation(3, &[Letter::nth(0); 6], &[2, 2, 2, 2, 3, 3]);
    check_ball_monotonicity(&p, 7).unwrap();
}

#[test]
fn family_balls_agree_with_oracle() {
    for (f, params, p) in family_instances(2) {
        assert!(ball_matches_oracle(&p, 6), "{f} {params}");
    }
}

#[test]
fn group_action_laws() {
    check_group_action_laws(2).unwrap();
    check_group_action_laws(3).unwrap();
}

#[test]
fn reversal_is_an_involution() {
    let r = group(3).into_iter().find(|g| g.is_reversal()).unwrap();
    for t in TypeTuple::all(3) {
        assert_eq!(apply_symmetry(&r, &apply_symmetry(&r, &t)), t);
    }
}

#[test]
fn orbit_equivariance() {
    check_orbit_equivariance(2).unwrap();
    check_orbit_equivariance(3).unwrap();
}

#[test]
fn orbit_sizes_partition_the_types() {
    let os = orbits(3);
    assert_eq!(os.iter().map(|o| o.size).sum::<usize>(), 729);
    assert!(os.iter().all(|o| 12 % o.size == 0));
    assert_eq!(os.len(), oracle_orbit_count(3));
}

#[test]
fn witness_soundness() {
    check_witness_soundness(&family_instances(3), 7).unwrap();
}

#[test]
fn affix_soundness() {
    check_affix_soundness(&family_instances(3), 8).unwrap();
}

#[test]
fn irreducibility_soundness() {
    check_irreducibility_soundness(&family_instances(3), 7).unwrap();
}

#[test]
fn phase1_is_orbit_invariant() {
    for o in orbits(3) {
        let verdict = phase1_eliminate(&o.representative, 8).is_eliminated();
        for t in &o.members {
            assert_eq!(phase1_eliminate(t, 8).is_eliminated(), verdict, "{t} vs {}", o.representative);
        }
    }
}

#[test]
fn phase1_eliminations_leave_nothing_for_phase2() {
    let limits = ProbeLimits::default();
    for o in orbits(3) {
        if phase1_eliminate(&o.representative, 8).is_eliminated() {
            let survivors = phase2_eliminate(&o.representative, 2, &limits).unwrap();
            assert!(survivors.is_empty(), "{}: {survivors:?}", o.representative);
        }
    }
}

/// Whenever the probe's class in a concrete instance contains powers of a
/// single generator (so its landing letter is defined), that letter is among
/// the outcomes of every complete strategy. Collapsing instances, where one
/// class holds powers of two generators, have no landing letter to check.
#[test]
fn landing_analysis_is_sound() {
    let mut checked = 0;
    for t in TypeTuple::all(3) {
        let c = canonical_rep(&t);
        if c != t {
            continue;
        }
        for e in exponent_grid(6, 2) {
            let p = product_presentation(3, &t.landing_letters(), &e);
            let (ball, _) = congruence_ball(&p, 6).unwrap();
            for probe in probes() {
                let reachable: BTreeSet<Letter> = ball
                    .class_members(ball.class_of(&probe).unwrap())
                    .iter()
                    .filter_map(|w| w.as_power().map(|(l, _)| l))
                    .collect();
                if reachable.len() != 1 {
                    continue;
                }
                for s in Bracketing::all(probe.len()) {
                    let o = landing_outcomes(&t, &probe, &s, 8);
                    if o.is_decisive() {
                        assert!(
                            reachable.is_subset(&o.outcomes),
                            "{t} {e:?} {}: {reachable:?} vs {:?}",
                            s.render(&probe),
                            o.outcomes
                        );
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 0);
}

fn exponent_grid(n: usize, bound: u32) -> Vec<Vec<u32>> {
    monogenic::classify::exponent_vectors(n, bound)
}

fn probes() -> Vec<Word> {
    monogenic::rewrite::default_probes(&[Letter::nth(0), Letter::nth(1), Letter::nth(2)])
}
