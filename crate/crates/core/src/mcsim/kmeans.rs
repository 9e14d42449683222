use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use super::scenario::Point;
use crate::{Error, Result};

/// Lloyd iterations stop after this many rounds even without a fixpoint.
pub const MAX_LLOYD_ITERATIONS: usize = 100;

fn nearest(p: &Point, centroids: &[Point]) -> (usize, f64) {
    centroids.iter().enumerate().map(|(i, c)| (i, p.dist2(c))).fold((0, f64::INFINITY), |best, cur| {
        if cur.1 < best.1 {
            cur
        } else {
            best
        }
    })
}

/// k-means++ seeding: each new center is drawn with probability
/// proportional to its squared distance from the centers chosen so far.
fn seed_centroids<R: Rng + ?Sized>(points: &[Point], k: usize, rng: &mut R) -> Vec<Point> {
    let mut chosen = vec![false; points.len()];
    let first = rng.random_range(0..points.len());
    chosen[first] = true;
    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[first]);
    let mut d2: Vec<f64> = points.iter().map(|p| p.dist2(&points[first])).collect();

    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut idx = points.len() - 1;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 && target < w {
                    idx = i;
                    break;
                }
                target -= w;
            }
            // guard against rounding landing on an already chosen point
            if chosen[idx] {
                d2.iter().position(|&w| w > 0.0).unwrap_or(idx)
            } else {
                idx
            }
        } else {
            // all remaining points coincide with centers
            chosen.iter().position(|&c| !c).unwrap_or(0)
        };
        chosen[pick] = true;
        let c = points[pick];
        centroids.push(c);
        for (w, p) in d2.iter_mut().zip(points) {
            *w = w.min(p.dist2(&c));
        }
    }
    centroids
}

/// Partitions `points` into `k` clusters with Lloyd's algorithm from a
/// k-means++ start and returns the cluster centroids.
///
/// Iterates until the assignment stops changing or
/// [`MAX_LLOYD_ITERATIONS`] is reached. A cluster that empties out is
/// re-seeded at the point farthest from its current centroid.
pub fn kmeans_centroids<R: Rng + ?Sized>(points: &[Point], k: usize, rng: &mut R) -> Result<Vec<Point>> {
    if k == 0 || points.is_empty() {
        return Err(Error::InvalidArgument("k-means needs k >= 1 and at least one point"));
    }
    if k > points.len() {
        return Err(Error::InvalidArgument("k-means needs k <= number of points"));
    }
    let mut centroids = seed_centroids(points, k, rng);
    let mut assignment = vec![usize::MAX; points.len()];

    for _ in 0..MAX_LLOYD_ITERATIONS {
        let mut changed = false;
        for (a, p) in assignment.iter_mut().zip(points) {
            let (best, _) = nearest(p, &centroids);
            if *a != best {
                *a = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![(0.0, 0.0, 0usize); k];
        for (&a, p) in assignment.iter().zip(points) {
            sums[a].0 += p.x;
            sums[a].1 += p.y;
            sums[a].2 += 1;
        }
        for (i, &(sx, sy, n)) in sums.iter().enumerate() {
            if n > 0 {
                centroids[i] = Point::new(sx / n as f64, sy / n as f64);
            }
        }
        for i in 0..k {
            if sums[i].2 == 0 {
                let far = points
                    .iter()
                    .enumerate()
                    .map(|(j, p)| (j, p.dist2(&centroids[assignment[j]])))
                    .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best })
                    .0;
                centroids[i] = points[far];
                assignment[far] = i;
            }
        }
    }
    Ok(centroids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_cluster_is_the_mean() {
        let pts = [Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(1.0, 3.0)];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = kmeans_centroids(&pts, 1, &mut rng).unwrap();
        assert_relative_eq!(c[0].x, 1.0);
        assert_relative_eq!(c[0].y, 1.0);
    }

    #[test]
    fn one_cluster_per_point() {
        let pts = [Point::new(0.0, 0.0), Point::new(5.0, 1.0), Point::new(-3.0, 7.0), Point::new(2.0, 2.0)];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut c = kmeans_centroids(&pts, pts.len(), &mut rng).unwrap();
        let mut expect = pts.to_vec();
        let key = |p: &Point| (p.x, p.y);
        c.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        expect.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        assert_eq!(c, expect);
    }

    #[test]
    fn duplicate_points_still_yield_k_centroids() {
        let pts = [Point::new(1.0, 1.0); 5];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(kmeans_centroids(&pts, 3, &mut rng).unwrap().len(), 3);
    }

    #[test]
    fn rejects_too_many_clusters() {
        let pts = [Point::new(0.0, 0.0)];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(kmeans_centroids(&pts, 2, &mut rng), Err(Error::InvalidArgument(_))));
        assert!(kmeans_centroids(&pts, 0, &mut rng).is_err());
        assert!(kmeans_centroids(&[], 1, &mut rng).is_err());
    }
}
