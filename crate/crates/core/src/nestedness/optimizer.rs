//! Search over row/column orderings minimizing temperature.
//!
//! Matrices whose shorter axis has few enough orderings are solved exactly:
//! every order of that axis is enumerated and the other axis is filled by an
//! optimal assignment. Otherwise three constructive seeds, each polished by
//! alternating row/column reassignment, feed a genetic algorithm over
//! (row, column) permutation pairs; every new leader and the final winner
//! are polished the same way.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::assignment::min_cost_assignment;
use super::temperature::Scorer;
use super::{OptimizerBudget, Ordering};

const TOURNAMENT: usize = 3;
const IMPROVEMENT_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub(crate) struct Search {
    pub ordering: Ordering,
    pub score: f64,
    pub generations: usize,
    pub exhaustive: bool,
    /// Best-so-far temperature after initialization and after each generation.
    pub history: Vec<f64>,
}

impl Search {
    fn fixed(ordering: Ordering, score: f64, exhaustive: bool) -> Self {
        Self {
            ordering,
            score,
            generations: 0,
            exhaustive,
            history: vec![score],
        }
    }
}

/// Searches orderings of `scorer`'s matrix. Ties anywhere resolve towards
/// lower indices, so callers control tie-breaking through the input order.
pub(crate) fn search(scorer: &Scorer<'_>, budget: &OptimizerBudget, seed: u64) -> Search {
    let q = scorer.matrix();
    let (rows, cols) = (q.rows(), q.cols());

    if scorer.grid().is_none() {
        return Search::fixed(Ordering::identity(rows, cols), 0.0, false);
    }

    if rows == 1 || cols == 1 {
        let ordering = single_line(scorer);
        let score = scorer.score(&ordering.row_perm, &ordering.col_perm);
        return Search::fixed(ordering, score, false);
    }

    if factorial(rows.min(cols)) <= budget.evaluations() {
        let (ordering, score) = exact(scorer);
        return Search::fixed(ordering, score, true);
    }

    genetic(scorer, budget, seed)
}

fn factorial(n: usize) -> usize {
    (1..=n)
        .try_fold(1usize, |acc, k| acc.checked_mul(k))
        .unwrap_or(usize::MAX)
}

/// One-line matrices: presences first along the long axis.
fn single_line(scorer: &Scorer<'_>) -> Ordering {
    let q = scorer.matrix();
    let mut ordering = Ordering::identity(q.rows(), q.cols());
    if q.rows() == 1 {
        ordering.col_perm.sort_by_key(|&c| !q.get(0, c));
    } else {
        ordering.row_perm.sort_by_key(|&r| !q.get(r, 0));
    }
    ordering
}

/// Global optimum: every order of the shorter axis, each completed by the
/// optimal assignment of the longer axis. First strict minimum wins.
fn exact(scorer: &Scorer<'_>) -> (Ordering, f64) {
    let q = scorer.matrix();
    let (nr, nc) = (q.rows(), q.cols());
    let mut best = (Ordering::identity(nr, nc), f64::INFINITY);
    if nr <= nc {
        for rows in (0..nr).permutations(nr) {
            let cols = best_cols(scorer, &rows);
            let score = scorer.score(&rows, &cols);
            if score < best.1 {
                best = (
                    Ordering {
                        row_perm: rows,
                        col_perm: cols,
                    },
                    score,
                );
            }
        }
    } else {
        for cols in (0..nc).permutations(nc) {
            let rows = best_rows(scorer, &cols);
            let score = scorer.score(&rows, &cols);
            if score < best.1 {
                best = (
                    Ordering {
                        row_perm: rows,
                        col_perm: cols,
                    },
                    score,
                );
            }
        }
    }
    best
}

/// Constructive starting points: plain degree sort, degree sort refined by
/// mean position of the partners, and greedy slot filling.
pub(crate) fn heuristic_seeds(scorer: &Scorer<'_>) -> Vec<Ordering> {
    let q = scorer.matrix();
    let row_deg = q.row_degrees();
    let col_deg = q.col_degrees();

    let mut rows: Vec<usize> = (0..q.rows()).collect();
    rows.sort_by_key(|&r| std::cmp::Reverse(row_deg[r]));
    let mut cols: Vec<usize> = (0..q.cols()).collect();
    cols.sort_by_key(|&c| std::cmp::Reverse(col_deg[c]));
    let by_degree = Ordering {
        row_perm: rows.clone(),
        col_perm: cols.clone(),
    };

    // Mean packed position of each line's presences under the degree order.
    let col_pos = positions(&cols);
    let row_pos = positions(&rows);
    let row_mean: Vec<f64> = (0..q.rows())
        .map(|r| mean((0..q.cols()).filter(|&c| q.get(r, c)).map(|c| col_pos[c])))
        .collect();
    let col_mean: Vec<f64> = (0..q.cols())
        .map(|c| mean((0..q.rows()).filter(|&r| q.get(r, c)).map(|r| row_pos[r])))
        .collect();
    let mut rows2: Vec<usize> = (0..q.rows()).collect();
    rows2.sort_by(|&a, &b| {
        row_deg[b]
            .cmp(&row_deg[a])
            .then(row_mean[a].total_cmp(&row_mean[b]))
    });
    let mut cols2: Vec<usize> = (0..q.cols()).collect();
    cols2.sort_by(|&a, &b| {
        col_deg[b]
            .cmp(&col_deg[a])
            .then(col_mean[a].total_cmp(&col_mean[b]))
    });
    let weighted = Ordering {
        row_perm: rows2,
        col_perm: cols2,
    };

    let greedy = greedy_fill(scorer, &by_degree);
    vec![by_degree, weighted, greedy]
}

fn positions(perm: &[usize]) -> Vec<f64> {
    let mut pos = vec![0.0; perm.len()];
    for (i, &x) in perm.iter().enumerate() {
        pos[x] = i as f64;
    }
    pos
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::INFINITY
    } else {
        sum / n as f64
    }
}

/// Fills row slots top to bottom with the remaining row of least
/// unexpectedness against the start's column order, then does the same for
/// column slots against the new row order.
fn greedy_fill(scorer: &Scorer<'_>, start: &Ordering) -> Ordering {
    let q = scorer.matrix();
    let grid = scorer.grid().expect("greedy fill needs an isocline");

    let mut remaining = start.row_perm.clone();
    let mut rows = Vec::with_capacity(remaining.len());
    for slot in 0..q.rows() {
        let cost = |r: usize| -> f64 {
            start
                .col_perm
                .iter()
                .enumerate()
                .map(|(j, &c)| grid.get(slot, j, q.get(r, c)))
                .sum()
        };
        let pick = argmin(remaining.iter().map(|&r| cost(r)));
        rows.push(remaining.remove(pick));
    }

    let mut remaining = start.col_perm.clone();
    let mut cols = Vec::with_capacity(remaining.len());
    for slot in 0..q.cols() {
        let cost = |c: usize| -> f64 {
            rows.iter()
                .enumerate()
                .map(|(i, &r)| grid.get(i, slot, q.get(r, c)))
                .sum()
        };
        let pick = argmin(remaining.iter().map(|&c| cost(c)));
        cols.push(remaining.remove(pick));
    }

    Ordering {
        row_perm: rows,
        col_perm: cols,
    }
}

/// Index of the first minimum.
fn argmin(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, v) in values.enumerate() {
        if v < best.1 {
            best = (i, v);
        }
    }
    best.0
}

#[derive(Debug, Clone)]
struct Individual {
    rows: Vec<usize>,
    cols: Vec<usize>,
    score: f64,
}

fn genetic(scorer: &Scorer<'_>, budget: &OptimizerBudget, seed: u64) -> Search {
    let q = scorer.matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let population = budget.population.max(2);
    let elitism = budget.elitism.clamp(1, population - 1);

    let mut genomes: Vec<(Vec<usize>, Vec<usize>)> = heuristic_seeds(scorer)
        .into_iter()
        .take(population)
        .map(|o| {
            let (mut rows, mut cols) = (o.row_perm, o.col_perm);
            polish(scorer, &mut rows, &mut cols);
            (rows, cols)
        })
        .collect();
    while genomes.len() < population {
        let mut rows: Vec<usize> = (0..q.rows()).collect();
        let mut cols: Vec<usize> = (0..q.cols()).collect();
        rows.shuffle(&mut rng);
        cols.shuffle(&mut rng);
        genomes.push((rows, cols));
    }
    let mut pop = evaluate(scorer, genomes);
    sort_population(&mut pop);

    let mut best = pop[0].score;
    let mut history = vec![best];
    let mut stagnant = 0;
    let mut generations = 0;

    while generations < budget.generations && stagnant < budget.stagnation {
        generations += 1;
        // All randomness is drawn here, before the parallel evaluation.
        let mut children = Vec::with_capacity(population - elitism);
        while children.len() < population - elitism {
            let a = tournament(&pop, &mut rng);
            let b = tournament(&pop, &mut rng);
            let mut rows = order_crossover(&pop[a].rows, &pop[b].rows, &mut rng);
            let mut cols = order_crossover(&pop[a].cols, &pop[b].cols, &mut rng);
            swap_mutation(&mut rows, &mut rng);
            swap_mutation(&mut cols, &mut rng);
            children.push((rows, cols));
        }
        pop.truncate(elitism);
        pop.extend(evaluate(scorer, children));
        sort_population(&mut pop);

        if pop[0].score < best {
            let leader = &mut pop[0];
            polish(scorer, &mut leader.rows, &mut leader.cols);
            leader.score = scorer.score(&leader.rows, &leader.cols);
            best = leader.score;
            stagnant = 0;
        } else {
            stagnant += 1;
        }
        history.push(best);
    }

    let mut winner = pop.swap_remove(0);
    polish(scorer, &mut winner.rows, &mut winner.cols);
    let polished = scorer.score(&winner.rows, &winner.cols);
    if polished < winner.score {
        winner.score = polished;
        history.push(polished);
    }

    Search {
        ordering: Ordering {
            row_perm: winner.rows,
            col_perm: winner.cols,
        },
        score: winner.score,
        generations,
        exhaustive: false,
        history,
    }
}

fn evaluate(scorer: &Scorer<'_>, genomes: Vec<(Vec<usize>, Vec<usize>)>) -> Vec<Individual> {
    genomes
        .into_par_iter()
        .map(|(rows, cols)| {
            let score = scorer.score(&rows, &cols);
            Individual { rows, cols, score }
        })
        .collect()
}

/// Stable sort, so equal scores keep their earlier (elite or seed) position.
fn sort_population(pop: &mut [Individual]) {
    pop.sort_by(|a, b| a.score.total_cmp(&b.score));
}

fn tournament(pop: &[Individual], rng: &mut impl Rng) -> usize {
    (0..TOURNAMENT)
        .map(|_| rng.random_range(0..pop.len()))
        .min()
        .expect("tournament size is nonzero")
}

/// Order crossover: copies a random slice of `first` and fills the rest with
/// `second`'s genes in their order, starting after the slice.
pub(crate) fn order_crossover(first: &[usize], second: &[usize], rng: &mut impl Rng) -> Vec<usize> {
    let n = first.len();
    if n < 2 {
        return first.to_vec();
    }
    let mut a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n);
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let mut child = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for i in a..=b {
        child[i] = first[i];
        used[first[i]] = true;
    }
    let mut slot = (b + 1) % n;
    for k in 0..n {
        let gene = second[(b + 1 + k) % n];
        if !used[gene] {
            child[slot] = gene;
            used[gene] = true;
            slot = (slot + 1) % n;
        }
    }
    child
}

/// Each position swaps with a random partner with probability `2 / n`.
pub(crate) fn swap_mutation(perm: &mut [usize], rng: &mut impl Rng) {
    let n = perm.len();
    if n < 2 {
        return;
    }
    let rate = (2.0 / n as f64).min(1.0);
    for i in 0..n {
        if rng.random::<f64>() < rate {
            let j = rng.random_range(0..n);
            perm.swap(i, j);
        }
    }
}

/// Row order minimizing the temperature for a fixed column order: each row
/// is assigned a slot at minimum total unexpectedness.
fn best_rows(scorer: &Scorer<'_>, cols: &[usize]) -> Vec<usize> {
    let q = scorer.matrix();
    let grid = scorer.grid().expect("assignment needs an isocline");
    let n = q.rows();
    let mut cost = vec![0.0; n * n];
    for r in 0..n {
        for slot in 0..n {
            cost[r * n + slot] = cols
                .iter()
                .enumerate()
                .map(|(j, &c)| grid.get(slot, j, q.get(r, c)))
                .sum();
        }
    }
    invert(&min_cost_assignment(&cost, n))
}

/// Column counterpart of [`best_rows`].
fn best_cols(scorer: &Scorer<'_>, rows: &[usize]) -> Vec<usize> {
    let q = scorer.matrix();
    let grid = scorer.grid().expect("assignment needs an isocline");
    let n = q.cols();
    let mut cost = vec![0.0; n * n];
    for c in 0..n {
        for slot in 0..n {
            cost[c * n + slot] = rows
                .iter()
                .enumerate()
                .map(|(i, &r)| grid.get(i, slot, q.get(r, c)))
                .sum();
        }
    }
    invert(&min_cost_assignment(&cost, n))
}

/// Alternating exact reassignment of rows and columns until neither axis
/// lowers the temperature.
fn polish(scorer: &Scorer<'_>, rows: &mut Vec<usize>, cols: &mut Vec<usize>) {
    let mut current = scorer.score(rows, cols);
    loop {
        let new_rows = best_rows(scorer, cols);
        let new_cols = best_cols(scorer, &new_rows);
        let score = scorer.score(&new_rows, &new_cols);
        if score < current - IMPROVEMENT_EPS {
            *rows = new_rows;
            *cols = new_cols;
            current = score;
        } else {
            break;
        }
    }
}

/// Turns `slot_of[item]` into `item_at[slot]`.
fn invert(slot_of: &[usize]) -> Vec<usize> {
    let mut item_at = vec![0; slot_of.len()];
    for (item, &slot) in slot_of.iter().enumerate() {
        item_at[slot] = item;
    }
    item_at
}
