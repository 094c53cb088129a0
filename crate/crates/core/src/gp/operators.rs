//! Ramped half-and-half initialisation, tournament selection, subtree
//! crossover and subtree mutation.

use rand::Rng;

use super::FitnessRecord;
use crate::selector::{Expr, Selector, TreeMethod};

/// `size` trees; depths cycle over `2..=max_depth` and methods alternate
/// GROW / FULL so every depth bucket is split in half.
pub fn init_population<R: Rng + ?Sized>(
    size: usize,
    max_depth: usize,
    rng: &mut R,
) -> Vec<Selector> {
    let min_depth = 2.min(max_depth);
    let buckets = max_depth - min_depth + 1;
    (0..size)
        .map(|i| {
            let method = if i % 2 == 0 {
                TreeMethod::Grow
            } else {
                TreeMethod::Full
            };
            let depth = min_depth + (i / 2) % buckets;
            Selector::new(Expr::random(depth, method, rng))
        })
        .collect()
}

/// Index of the tournament winner: `size` uniform draws with replacement,
/// best sampled fitness, ties to the lowest population index.
pub fn tournament_select<R: Rng + ?Sized>(
    population: &[FitnessRecord],
    size: usize,
    rng: &mut R,
) -> usize {
    assert!(
        !population.is_empty(),
        "tournament over an empty population"
    );
    let mut best: Option<usize> = None;
    for _ in 0..size.max(1) {
        let i = rng.gen_range(0..population.len());
        best = match best {
            None => Some(i),
            Some(b) => {
                let (fi, fb) = (
                    &population[i].sampled_fitness,
                    &population[b].sampled_fitness,
                );
                if fi < fb || (fi == fb && i < b) {
                    Some(i)
                } else {
                    Some(b)
                }
            }
        };
    }
    best.expect("at least one draw")
}

/// Swaps uniformly chosen subtrees. A child deeper than `max_depth` is
/// replaced by the parent it was built from.
pub fn crossover<R: Rng + ?Sized>(
    a: &Expr,
    b: &Expr,
    max_depth: usize,
    rng: &mut R,
) -> (Expr, Expr) {
    let ia = rng.gen_range(0..a.size());
    let ib = rng.gen_range(0..b.size());
    let (sa, _) = a.subtree(ia).expect("index within size");
    let (sb, _) = b.subtree(ib).expect("index within size");
    let child_a = a.replace(ia, sb);
    let child_b = b.replace(ib, sa);
    let child_a = if child_a.depth() > max_depth {
        a.clone()
    } else {
        child_a
    };
    let child_b = if child_b.depth() > max_depth {
        b.clone()
    } else {
        child_b
    };
    (child_a, child_b)
}

/// Replaces a uniformly chosen node with a GROW tree whose depth fits under
/// `max_depth` at that position.
pub fn mutate<R: Rng + ?Sized>(parent: &Expr, max_depth: usize, rng: &mut R) -> Expr {
    let i = rng.gen_range(0..parent.size());
    let (_, depth) = parent.subtree(i).expect("index within size");
    let fresh = Expr::random(max_depth.saturating_sub(depth), TreeMethod::Grow, rng);
    parent.replace(i, &fresh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selector::{parse_expr, Terminal};
    use num_rational::Ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn record(f: i64) -> FitnessRecord {
        let mut r = FitnessRecord::new(Selector::constant());
        r.sampled_fitness = Some(Ratio::from_integer(f));
        r
    }

    #[test]
    fn population_of_two_is_one_grow_one_full() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pop = init_population(2, 7, &mut rng);
        assert_eq!(pop.len(), 2);
        // FULL at depth 2 is a complete binary tree of 7 nodes
        assert_eq!(pop[1].root.size(), 7);
        assert!(pop[0].root.depth() <= 2);
    }

    #[test]
    fn ramped_population_is_deterministic_and_bounded() {
        let a = init_population(200, 7, &mut ChaCha8Rng::seed_from_u64(1));
        let b = init_population(200, 7, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(a, b);
        assert!(a.iter().all(|s| s.root.depth() <= 7));
        let full_depths: Vec<usize> = a
            .iter()
            .skip(1)
            .step_by(2)
            .map(|s| s.root.depth())
            .collect();
        for d in 2..=7 {
            assert!(full_depths.contains(&d));
        }
    }

    #[test]
    fn tournament_ties_and_coverage() {
        let pop: Vec<_> = [1, 2, 3].into_iter().map(record).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        // enough draws to cover every index
        assert_eq!(tournament_select(&pop, 64, &mut rng), 0);
        let flat: Vec<_> = [4, 4, 4].into_iter().map(record).collect();
        for _ in 0..50 {
            let mut probe = rng.clone();
            let drawn: Vec<usize> = (0..3).map(|_| probe.gen_range(0..3)).collect();
            assert_eq!(
                tournament_select(&flat, 3, &mut rng),
                *drawn.iter().min().unwrap()
            );
        }
    }

    #[test]
    fn tournament_size_one_is_uniform() {
        let pop: Vec<_> = [5, 1, 9, 3].into_iter().map(record).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut counts = [0usize; 4];
        for _ in 0..4000 {
            counts[tournament_select(&pop, 1, &mut rng)] += 1;
        }
        assert!(
            counts.iter().all(|&c| (850..1150).contains(&c)),
            "{counts:?}"
        );
    }

    #[test]
    fn crossover_of_terminals_swaps_them() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (a, b) = (Expr::Terminal(Terminal::Pt), Expr::Terminal(Terminal::W));
        assert_eq!(crossover(&a, &b, 7, &mut rng), (b.clone(), a.clone()));
    }

    #[test]
    fn crossover_depth_repair_returns_parent() {
        let deep = parse_expr("(+ (+ (+ PT PT) PT) PT)").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let (x, y) = crossover(&deep, &deep, 3, &mut rng);
            assert!(x.depth() <= 3 && y.depth() <= 3);
        }
    }

    #[test]
    fn mutation_at_a_max_depth_leaf_yields_terminal() {
        // the only leaf at depth 1 in a max-depth-1 tree gets a terminal
        let t = parse_expr("(+ PT W)").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            assert!(mutate(&t, 1, &mut rng).depth() <= 1);
        }
    }
}
