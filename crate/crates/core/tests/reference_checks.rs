//! Frozen verdicts from the reference solver, and engine-vs-reference
//! agreement on a small grid in every mode.

mod common;

use common::{ref_solve, RefPos, RefSolver};
use dg_core::game::{solve, GameParams, Mode, SolveOptions, Winner};
use dg_core::ordinal::Ordinal;
use dg_core::structure::{cycle, full_tree, linear_order, pure_set, Structure};

fn params(beta: u64, theta: u32, alpha: u64) -> GameParams {
    GameParams::new(Ordinal::from_nat(beta), theta, Ordinal::from_nat(alpha))
}

fn engine_eve_wins(m0: &Structure, m1: &Structure, beta: u64, theta: u32, alpha: u64, mode: Mode) -> bool {
    let options = SolveOptions {
        mode,
        extract_strategy: false,
        ..SolveOptions::default()
    };
    let result = solve(m0, m1, &params(beta, theta, alpha), &options).expect("solvable instance");
    result.winner == Winner::Eve
}

/// Hand-derived verdicts, frozen against the reference solver. Each line
/// was worked out by hand from the move rules alone.
#[test]
fn frozen_reference_verdicts() {
    let p1 = pure_set(1).unwrap();
    let p2 = pure_set(2).unwrap();
    let p3 = pure_set(3).unwrap();
    let l2 = linear_order(2).unwrap();
    let l3 = linear_order(3).unwrap();
    let l4 = linear_order(4).unwrap();
    let c3 = cycle(3).unwrap();
    let c4 = cycle(4).unwrap();
    let t21 = full_tree(2, 1).unwrap();
    let t12 = full_tree(1, 2).unwrap();

    // One point versus two: with room for both challenge elements the
    // challenger wins immediately at clock bound 1; with one extra clock
    // tick the defender survives one round but not two; with θ = 1 the
    // challenger can never exhibit the second element.
    assert!(!ref_solve(&p1, &p2, 1, 2, 1));
    assert!(!ref_solve(&p1, &p2, 2, 2, 1));
    assert!(ref_solve(&p1, &p2, 1, 2, 2));
    assert!(!ref_solve(&p1, &p2, 2, 2, 2));
    assert!(ref_solve(&p1, &p2, 1, 1, 1));
    assert!(ref_solve(&p1, &p2, 2, 1, 1));

    // Equal pure sets are indistinguishable at any parameters.
    assert!(ref_solve(&p3, &p3, 2, 2, 1));

    // Distinct linear orders: the defender holds exactly while θ stays
    // within the smaller order — any θ-sized subset of either order is a
    // chain, the increasing bijection matches any two chains, and a full
    // A-set blocks all future challenges. One more θ lets the challenger
    // exhibit a chain longer than the smaller order and win at once.
    assert!(ref_solve(&l3, &l4, 2, 2, 1));
    assert!(ref_solve(&l3, &l4, 2, 3, 1));
    assert!(!ref_solve(&l3, &l4, 1, 4, 1));
    assert!(ref_solve(&l2, &l3, 2, 2, 1));
    assert!(!ref_solve(&l2, &l3, 1, 3, 1));
    assert!(!ref_solve(&l2, &l3, 2, 3, 1));

    // A 3-cycle has no edgeless pair of vertices, a 4-cycle does.
    assert!(!ref_solve(&c3, &c4, 1, 2, 1));

    // A branching tree has an incomparable pair, a path does not.
    assert!(!ref_solve(&t21, &t12, 1, 2, 1));
}

/// The level sequence on one point versus two at θ = 2, α = 1: level 0
/// holds the three matched cores, level 1 is already empty (every core
/// faces the challenge of both right-hand points at once), so the sequence
/// stabilizes at rank 1.
#[test]
fn frozen_reference_levels() {
    let p1 = pure_set(1).unwrap();
    let p2 = pure_set(2).unwrap();
    let mut solver = RefSolver::new(&p1, &p2, 2, 1);
    let levels = solver.level_sequence();
    assert_eq!(levels.len(), 2);
    assert_eq!(levels[0].len(), 3);
    assert_eq!(levels[1].len(), 0);
}

/// At clock bound 1 every picked element is matched at once, so valid
/// cores are exactly the partial isomorphisms.
#[test]
fn reference_core_space_at_clock_bound_one() {
    let p1 = pure_set(1).unwrap();
    let p2 = pure_set(2).unwrap();
    let solver = RefSolver::new(&p1, &p2, 2, 1);
    let cores: Vec<RefPos> = solver.all_cores();
    // ∅, e0→e0, e0→e1.
    assert_eq!(cores.len(), 3);
    assert!(cores.iter().all(|c| c.a0.len() == c.g.len()));
}

/// Engine agreement with the reference solver across every mode, all
/// ordered pairs within each small family, β ≤ 2, θ ≤ 2, α ≤ 2.
#[test]
fn engine_matches_reference_on_small_grid() {
    let mut boards: Vec<Structure> = Vec::new();
    for n in 1..=3 {
        boards.push(pure_set(n).unwrap());
        boards.push(linear_order(n).unwrap());
        boards.push(cycle(n).unwrap());
    }
    for (k, d) in [(1, 0), (1, 1), (1, 2), (2, 1)] {
        boards.push(full_tree(k, d).unwrap());
    }

    let mut checked = 0usize;
    for m0 in &boards {
        for m1 in &boards {
            if m0.vocabulary() != m1.vocabulary() {
                continue;
            }
            for beta in 1..=2u64 {
                for theta in 1..=2u32 {
                    for alpha in 1..=2u64 {
                        let expected = ref_solve(m0, m1, beta, theta as usize, alpha);
                        for mode in [Mode::Lazy, Mode::Normalized, Mode::Full] {
                            let got = engine_eve_wins(m0, m1, beta, theta, alpha, mode);
                            assert_eq!(
                                got, expected,
                                "verdict mismatch in {mode:?} mode: {:?} vs {:?} at beta={beta} theta={theta} alpha={alpha}",
                                m0.universe(),
                                m1.universe()
                            );
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 100, "grid unexpectedly small: {checked}");
}

/// The small grid above stops at cap 2. Cap 3 is where defender padding
/// first has real room on three- and four-element boards — shrinking the
/// cap is not always good for the defender, because it also starves her
/// padding — so pin engine-versus-reference agreement there separately,
/// including the cycle pair whose verdict flips between caps 2 and 3.
#[test]
fn engine_matches_reference_at_cap_three() {
    let families: Vec<Vec<Structure>> = vec![
        (2..=3).map(|n| pure_set(n).unwrap()).collect(),
        (2..=3).map(|n| linear_order(n).unwrap()).collect(),
        (2..=3).map(|n| cycle(n).unwrap()).collect(),
        vec![full_tree(1, 1).unwrap(), full_tree(2, 1).unwrap(), full_tree(1, 2).unwrap()],
    ];
    let mut checked = 0usize;
    for family in &families {
        for m0 in family {
            for m1 in family {
                for beta in 1..=2u64 {
                    for alpha in 1..=2u64 {
                        let expected = ref_solve(m0, m1, beta, 3, alpha);
                        for mode in [Mode::Lazy, Mode::Normalized, Mode::Full] {
                            let got = engine_eve_wins(m0, m1, beta, 3, alpha, mode);
                            assert_eq!(
                                got, expected,
                                "verdict mismatch in {mode:?} mode: {:?} vs {:?} at beta={beta} theta=3 alpha={alpha}",
                                m0.universe(),
                                m1.universe()
                            );
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked >= 48, "cap-three grid unexpectedly small: {checked}");

    // Four-element spot cells, full reference tree each.
    let c4 = cycle(4).unwrap();
    let t31 = full_tree(3, 1).unwrap();
    let l4 = linear_order(4).unwrap();
    let p4 = pure_set(4).unwrap();
    let p3 = pure_set(3).unwrap();
    let spots: Vec<(&Structure, &Structure)> =
        vec![(&c4, &c4), (&t31, &t31), (&l4, &l4), (&p3, &p4)];
    for (m0, m1) in spots {
        for (beta, alpha) in [(1u64, 1u64), (2, 2)] {
            let expected = ref_solve(m0, m1, beta, 3, alpha);
            for mode in [Mode::Lazy, Mode::Normalized, Mode::Full] {
                let got = engine_eve_wins(m0, m1, beta, 3, alpha, mode);
                assert_eq!(
                    got, expected,
                    "spot mismatch in {mode:?} mode: {:?} vs {:?} at beta={beta} theta=3 alpha={alpha}",
                    m0.universe(),
                    m1.universe()
                );
            }
        }
    }

    // The flip itself, frozen: with cap 2 the challenger splits the cycle
    // with an antipodal pair against an adjacent pair; with cap 3 the
    // defender pads to a three-element arc and matches it isomorphically.
    assert!(!ref_solve(&c4, &c4, 1, 2, 1));
    assert!(ref_solve(&c4, &c4, 1, 3, 1));
}
