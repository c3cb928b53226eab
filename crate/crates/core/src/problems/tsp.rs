use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{wrong_genome, Direction, Encoding, Problem};
use crate::error::{Error, Result};
use crate::genome::{check_permutation, Genome};

/// Dense symmetric distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Euclidean distances between planar points.
    pub fn from_points(points: &[[f64; 2]]) -> Self {
        let n = points.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (points[i][0] - points[j][0]).hypot(points[i][1] - points[j][1]);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        DistanceMatrix { n, data }
    }

    /// Validated square, symmetric, nonnegative matrix with a zero diagonal.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::domain("distance matrix must be square"));
        }
        for i in 0..n {
            if rows[i][i] != 0.0 {
                return Err(Error::domain(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let d = rows[i][j];
                if !(d.is_finite() && d >= 0.0) || d != rows[j][i] {
                    return Err(Error::domain(format!(
                        "distance ({i}, {j}) must be finite, nonnegative and symmetric"
                    )));
                }
            }
        }
        Ok(DistanceMatrix {
            n,
            data: rows.concat(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Length of the closed tour visiting `perm` in order.
    pub fn cyclic_length(&self, perm: &[usize]) -> f64 {
        let n = perm.len();
        (0..n).map(|k| self.get(perm[k], perm[(k + 1) % n])).sum()
    }
}

/// Cities in the plane with their precomputed distance matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TspJson", into = "TspJson")]
pub struct TspInstance {
    coords: Vec<[f64; 2]>,
    distance: DistanceMatrix,
}

#[derive(Serialize, Deserialize)]
struct TspJson {
    coords: Vec<[f64; 2]>,
}

impl TryFrom<TspJson> for TspInstance {
    type Error = Error;

    fn try_from(j: TspJson) -> Result<Self> {
        TspInstance::from_coords(j.coords)
    }
}

impl From<TspInstance> for TspJson {
    fn from(t: TspInstance) -> Self {
        TspJson { coords: t.coords }
    }
}

impl TspInstance {
    pub fn from_coords(coords: Vec<[f64; 2]>) -> Result<Self> {
        if coords.len() < 3 {
            return Err(Error::domain(format!("TSP needs at least 3 cities, got {}", coords.len())));
        }
        if coords.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::domain("TSP coordinates must be finite"));
        }
        let distance = DistanceMatrix::from_points(&coords);
        Ok(TspInstance { coords, distance })
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn distance(&self) -> &DistanceMatrix {
        &self.distance
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }
}

/// `n` i.i.d. uniform cities in the unit square.
pub fn generate_tsp(n: usize, seed: u64) -> Result<TspInstance> {
    if n < 3 {
        return Err(Error::domain(format!("TSP needs at least 3 cities, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..n).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    TspInstance::from_coords(coords)
}

/// Closed-tour length with wrap-around.
pub fn tour_length(perm: &[usize], instance: &TspInstance) -> Result<f64> {
    if perm.len() != instance.n() {
        return Err(Error::domain(format!(
            "tour visits {} cities, instance has {}",
            perm.len(),
            instance.n()
        )));
    }
    check_permutation(perm)?;
    Ok(instance.distance.cyclic_length(perm))
}

impl Problem for TspInstance {
    fn name(&self) -> &str {
        "tsp"
    }

    fn direction(&self) -> Direction {
        Direction::Minimize
    }

    fn encoding(&self) -> Encoding<'_> {
        Encoding::Permutation {
            distance: &self.distance,
        }
    }

    fn evaluate(&self, genome: &Genome) -> Result<f64> {
        match genome {
            Genome::Permutation(p) => tour_length(p, self),
            other => Err(wrong_genome("tsp", "permutation", other)),
        }
    }
}
