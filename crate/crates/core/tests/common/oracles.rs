//! Brute-force optima computed straight from the problem data, sharing no
//! code with the generators or the engine.

use itertools::Itertools;
use serde_json::Value;

fn ints(v: &Value) -> Vec<i64> {
    v.as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect()
}

/// Best total value within the capacity.
pub fn knapsack(data: &Value) -> i64 {
    let cap = data["capacity"].as_i64().unwrap();
    let items: Vec<(i64, i64)> = data["items"]
        .as_array()
        .unwrap()
        .iter()
        .map(|it| (it["weight"].as_i64().unwrap(), it["value"].as_i64().unwrap()))
        .collect();
    (0..1u32 << items.len())
        .filter_map(|mask| {
            let chosen = items.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1);
            let (w, v) = chosen.fold((0, 0), |(w, v), (_, it)| (w + it.0, v + it.1));
            (w <= cap).then_some(v)
        })
        .max()
        .unwrap()
}

/// Shortest closed tour through every city.
pub fn tsp(data: &Value) -> i64 {
    let d: Vec<Vec<i64>> = data["distances"].as_array().unwrap().iter().map(ints).collect();
    let n = d.len();
    (1..n)
        .permutations(n - 1)
        .map(|p| {
            let tour: Vec<usize> = std::iter::once(0).chain(p).collect();
            (0..n).map(|i| d[tour[i]][tour[(i + 1) % n]]).sum::<i64>()
        })
        .min()
        .unwrap()
}

/// Best value of a set of bids with pairwise disjoint items.
pub fn auction(data: &Value) -> i64 {
    let bids: Vec<(i64, Vec<i64>)> = data["bids"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| (b["value"].as_i64().unwrap(), ints(&b["items"])))
        .collect();
    (0..1u32 << bids.len())
        .filter_map(|mask| {
            let chosen: Vec<&(i64, Vec<i64>)> =
                bids.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, b)| b).collect();
            let items: Vec<i64> = chosen.iter().flat_map(|b| b.1.iter().copied()).collect();
            items.iter().all_unique().then(|| chosen.iter().map(|b| b.0).sum())
        })
        .max()
        .unwrap()
}

/// Length of the shortest ruler with `n` marks.
pub fn golomb(n: usize) -> i64 {
    if n == 1 {
        return 0;
    }
    for len in 1i64.. {
        let found = (1..len).combinations(n - 2).any(|inner| {
            let marks: Vec<i64> = std::iter::once(0).chain(inner).chain([len]).collect();
            marks
                .iter()
                .tuple_combinations()
                .map(|(a, b)| b - a)
                .all_unique()
        });
        if found {
            return len;
        }
    }
    unreachable!()
}

/// Least autocorrelation energy of a length-`n` sequence of ±1.
pub fn low_autocorrelation(n: usize) -> i64 {
    (0..1u32 << n)
        .map(|mask| {
            let s: Vec<i64> = (0..n).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect();
            (1..n)
                .map(|k| {
                    let c: i64 = (0..n - k).map(|i| s[i] * s[i + k]).sum();
                    c * c
                })
                .sum()
        })
        .min()
        .unwrap()
}

/// Most live cells of an `n`×`n` still life with everything outside dead.
pub fn still_life(n: usize) -> i64 {
    let m = n as i64;
    (0..1u32 << (n * n))
        .filter(|&mask| {
            let alive = |r: i64, c: i64| {
                (0..m).contains(&r) && (0..m).contains(&c) && mask >> (r * m + c) & 1 == 1
            };
            (-1..=m).all(|r| {
                (-1..=m).all(|c| {
                    let k = (-1..=1)
                        .cartesian_product(-1..=1)
                        .filter(|&(dr, dc)| (dr, dc) != (0, 0) && alive(r + dr, c + dc))
                        .count();
                    if alive(r, c) {
                        k == 2 || k == 3
                    } else {
                        k != 3
                    }
                })
            })
        })
        .map(|mask| mask.count_ones() as i64)
        .max()
        .unwrap()
}

