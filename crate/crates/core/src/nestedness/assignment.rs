//! Minimum-cost perfect assignment on a square cost matrix
//! (Hungarian method with potentials, O(n^3)).

/// `cost[i * n + j]` is the cost of giving item `i` slot `j`. Returns
/// `slot_of[i]`.
pub(crate) fn min_cost_assignment(cost: &[f64], n: usize) -> Vec<usize> {
    assert_eq!(cost.len(), n * n);
    if n == 0 {
        return Vec::new();
    }
    // 1-based potentials over items (u) and slots (v); slot 0 is a sentinel.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for item in 1..=n {
        owner[0] = item;
        let mut slot0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[slot0] = true;
            let i0 = owner[slot0];
            let mut delta = f64::INFINITY;
            let mut slot1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = slot0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    slot1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            slot0 = slot1;
            if owner[slot0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[slot0];
            owner[slot0] = owner[prev];
            slot0 = prev;
            if slot0 == 0 {
                break;
            }
        }
    }

    let mut slot_of = vec![0; n];
    for j in 1..=n {
        slot_of[owner[j] - 1] = j - 1;
    }
    slot_of
}
