// SPDX-License-Identifier: MIT OR Apache-2.0

//! Majority-vote aggregation of detections across an odd ladder of window
//! sizes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::segmenter::ChangePointSet;

/// Strictly increasing window sizes with an odd count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowLadder {
    sizes: Vec<usize>,
}

impl WindowLadder {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidLadder("no window sizes".into()));
        }
        if sizes.len() % 2 == 0 {
            return Err(Error::InvalidLadder(format!(
                "need an odd number of window sizes, got {}",
                sizes.len()
            )));
        }
        if sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidLadder("window sizes must be strictly increasing".into()));
        }
        if sizes[0] < 2 {
            return Err(Error::InvalidLadder("window sizes must be >= 2".into()));
        }
        Ok(Self { sizes })
    }

    pub fn single(n_w: usize) -> Result<Self> {
        Self::new(vec![n_w])
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn largest(&self) -> usize {
        *self.sizes.last().expect("ladder is never empty")
    }

    /// Minimum group size, `(R + 1) / 2`.
    pub fn majority(&self) -> usize {
        self.sizes.len().div_ceil(2)
    }

    /// Errors unless every rung satisfies `2 n_w <= n`.
    pub fn check_feasible(&self, n: usize) -> Result<()> {
        match self.sizes.iter().find(|&&w| 2 * w > n) {
            Some(&n_w) => Err(Error::InfeasibleWindow { n_w, n }),
            None => Ok(()),
        }
    }

    /// The rungs usable on a series of length `n`, cut to the largest
    /// odd-sized prefix. `None` if no rung fits.
    pub fn feasible_prefix(&self, n: usize) -> Option<Self> {
        let fit = self.sizes.iter().take_while(|&&w| 2 * w <= n).count();
        if fit == 0 {
            return None;
        }
        let keep = if fit % 2 == 1 { fit } else { fit - 1 };
        Some(Self {
            sizes: self.sizes[..keep].to_vec(),
        })
    }
}

/// One detection taking part in the vote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub window: usize,
    pub location: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Group {
    /// Rounded mean of the member locations.
    pub location: usize,
    pub members: Vec<Member>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MultiscaleResult {
    pub points: Vec<usize>,
    pub groups: Vec<Group>,
}

struct Candidate {
    lo: usize,
    hi: usize,
    members: Vec<usize>,
    variance: f64,
}

fn sample_variance(locations: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = locations.clone().count();
    if n < 2 {
        return 0.0;
    }
    let mean = locations.clone().sum::<f64>() / n as f64;
    locations.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// Groups detections from every rung by staged majority vote.
///
/// Stage `r` uses the ungrouped detections of rung `r` as anchors in
/// ascending order; the interval `[a - n_w + 1, a + n_w - 1]` around an
/// anchor qualifies when it holds at least `(R + 1) / 2` ungrouped
/// detections (from any rung, the anchor included). The first qualifying
/// interval is consumed, unless a later qualifying interval overlaps it with
/// the same count and smaller sample variance of its members. Counting then
/// restarts; the stage ends when nothing qualifies.
pub fn aggregate_majority(detections: &[ChangePointSet], ladder: &WindowLadder) -> Result<MultiscaleResult> {
    let points: Vec<Vec<usize>> = detections.iter().map(|d| d.points.clone()).collect();
    aggregate_points(&points, ladder)
}

/// [`aggregate_majority`] on bare location lists, one per rung.
pub fn aggregate_points(detections: &[Vec<usize>], ladder: &WindowLadder) -> Result<MultiscaleResult> {
    if detections.len() != ladder.len() {
        return Err(Error::LadderMismatch {
            ladder: ladder.len(),
            detections: detections.len(),
        });
    }
    let majority = ladder.majority();

    // (rung, location), sorted by location then rung for determinism.
    let mut pool: Vec<(usize, usize)> = detections
        .iter()
        .enumerate()
        .flat_map(|(r, pts)| pts.iter().map(move |&loc| (r, loc)))
        .collect();
    pool.sort_by_key(|&(r, loc)| (loc, r));
    let mut grouped = vec![false; pool.len()];
    let mut groups = Vec::new();

    for (rung, &n_w) in ladder.sizes().iter().enumerate() {
        loop {
            let mut candidates: Vec<Candidate> = Vec::new();
            for (k, &(r, anchor)) in pool.iter().enumerate() {
                if r != rung || grouped[k] {
                    continue;
                }
                let lo = (anchor + 1).saturating_sub(n_w);
                let hi = anchor + n_w - 1;
                let members: Vec<usize> = (0..pool.len())
                    .filter(|&m| !grouped[m] && (lo..=hi).contains(&pool[m].1))
                    .collect();
                if members.len() >= majority {
                    let variance = sample_variance(members.iter().map(|&m| pool[m].1 as f64));
                    candidates.push(Candidate {
                        lo,
                        hi,
                        members,
                        variance,
                    });
                }
            }
            let Some(first) = candidates.first() else {
                break;
            };
            let mut best = first;
            for c in &candidates[1..] {
                let overlaps = c.lo <= best.hi && best.lo <= c.hi;
                if overlaps && c.members.len() == best.members.len() && c.variance < best.variance {
                    best = c;
                }
            }
            let members: Vec<Member> = best
                .members
                .iter()
                .map(|&m| Member {
                    window: ladder.sizes()[pool[m].0],
                    location: pool[m].1,
                })
                .collect();
            for &m in &best.members {
                grouped[m] = true;
            }
            let mean = members.iter().map(|m| m.location as f64).sum::<f64>() / members.len() as f64;
            groups.push(Group {
                location: round_half_up(mean),
                members,
            });
        }
    }

    groups.sort_by_key(|g| g.location);
    let mut points: Vec<usize> = groups.iter().map(|g| g.location).collect();
    points.dedup();
    Ok(MultiscaleResult { points, groups })
}
