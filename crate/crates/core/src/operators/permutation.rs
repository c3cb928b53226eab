use rand::Rng;

use super::{check_pair, select_alleles};
use crate::error::{Error, Result};
use crate::genome::is_permutation;
use crate::pascal::WeightVector;
use crate::problems::DistanceMatrix;

/// Outcome of repairing a provisional permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Repair {
    pub tour: Vec<usize>,
    /// Positions whose provisional allele was a later duplicate.
    pub holes: Vec<usize>,
}

/// Two-stage permutation PWR: weighted allele selection, then cheapest-insertion repair.
pub fn pwr_permutation<R: Rng + ?Sized>(
    parents: &[&[usize]],
    weights: &WeightVector,
    distance: &DistanceMatrix,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let provisional = provisional_selection(parents, weights, rng)?;
    if distance.n() != provisional.len() {
        return Err(Error::arity(format!(
            "distance matrix is {}x{} for tours of length {}",
            distance.n(),
            distance.n(),
            provisional.len()
        )));
    }
    Ok(repair_permutation(&provisional, distance)?.tour)
}

/// Stage 1: position-wise allele copy from a parent drawn by the weights.
pub fn provisional_selection<R: Rng + ?Sized>(
    parents: &[&[usize]],
    weights: &WeightVector,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if let Some(bad) = parents.iter().position(|p| !is_permutation(p)) {
        return Err(Error::arity(format!("parent {bad} is not a permutation")));
    }
    select_alleles(parents, weights, rng)
}

/// Stage 2: keep the first occurrence of every element, turn later duplicates
/// into holes, and fill the holes with the missing elements.
///
/// Missing elements are placed in ascending order. Each goes to the open hole
/// with the smallest insertion cost `d(prev, e) + d(e, next) − d(prev, next)`,
/// where `prev` and `next` are the nearest filled positions around the hole on
/// the cyclic tour. Ties go to the lowest position.
pub fn repair_permutation(provisional: &[usize], distance: &DistanceMatrix) -> Result<Repair> {
    let n = provisional.len();
    if distance.n() != n {
        return Err(Error::arity(format!(
            "distance matrix size {} does not match tour length {n}",
            distance.n()
        )));
    }
    if let Some(&bad) = provisional.iter().find(|&&c| c >= n) {
        return Err(Error::domain(format!("element {bad} outside 0..{n}")));
    }

    let mut seen = vec![false; n];
    let mut slots: Vec<Option<usize>> = Vec::with_capacity(n);
    let mut holes = Vec::new();
    for (k, &c) in provisional.iter().enumerate() {
        if seen[c] {
            slots.push(None);
            holes.push(k);
        } else {
            seen[c] = true;
            slots.push(Some(c));
        }
    }

    let missing = (0..n).filter(|&e| !seen[e]);
    let mut open = holes.clone();
    for e in missing {
        let mut best: Option<(f64, usize)> = None;
        for (idx, &h) in open.iter().enumerate() {
            let (prev, next) = neighbours(&slots, h);
            let cost = distance.get(prev, e) + distance.get(e, next) - distance.get(prev, next);
            if best.is_none_or(|(c, _)| cost < c) {
                best = Some((cost, idx));
            }
        }
        let (_, idx) = best.expect("one hole per missing element");
        slots[open.remove(idx)] = Some(e);
    }

    Ok(Repair {
        tour: slots.into_iter().map(|s| s.expect("all holes filled")).collect(),
        holes,
    })
}

/// Nearest filled elements before and after position `h`, wrapping around.
fn neighbours(slots: &[Option<usize>], h: usize) -> (usize, usize) {
    let n = slots.len();
    let prev = (1..n)
        .find_map(|s| slots[(h + n - s) % n])
        .expect("at least one filled slot");
    let next = (1..n)
        .find_map(|s| slots[(h + s) % n])
        .expect("at least one filled slot");
    (prev, next)
}

/// Partially-mapped crossover with two uniformly drawn cut points.
pub fn crossover_pmx<R: Rng + ?Sized>(p1: &[usize], p2: &[usize], rng: &mut R) -> Result<Vec<usize>> {
    let n = p1.len();
    let a = rng.gen_range(0..=n);
    let b = rng.gen_range(0..=n);
    pmx_with_cuts(p1, p2, a.min(b), a.max(b))
}

/// PMX copying `p1[start..end]` and filling the rest from `p2` through the mapping chain.
pub fn pmx_with_cuts(p1: &[usize], p2: &[usize], start: usize, end: usize) -> Result<Vec<usize>> {
    check_pair(p1, p2)?;
    if !is_permutation(p1) || !is_permutation(p2) {
        return Err(Error::arity("PMX parents must be permutations of the same ground set"));
    }
    let n = p1.len();
    if start > end || end > n {
        return Err(Error::domain(format!("invalid cut points [{start}, {end}) for length {n}")));
    }
    let mut pos_in_p1 = vec![0; n];
    for (i, &c) in p1.iter().enumerate() {
        pos_in_p1[c] = i;
    }
    let in_segment = |c: usize| (start..end).contains(&pos_in_p1[c]);

    let mut child = vec![0; n];
    child[start..end].copy_from_slice(&p1[start..end]);
    for i in (0..start).chain(end..n) {
        let mut c = p2[i];
        while in_segment(c) {
            c = p2[pos_in_p1[c]];
        }
        child[i] = c;
    }
    Ok(child)
}
