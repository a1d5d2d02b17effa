use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::grover::{run_search, GroverEngine, GroverRunReport, MarkedSet, Schedule};
use super::{QknnError, SimilarityTable};

/// The `k` selected indices and the rest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborSet {
    /// Selected indices, best first.
    pub members: Vec<usize>,
    /// Unselected indices in ascending order.
    pub complement: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct KmaxReport {
    /// One entry per Grover search, the last one being the search that
    /// found nothing.
    pub searches: Vec<GroverRunReport>,
    pub oracle_calls: u64,
    /// Number of indices outside the starting set that beat its worst member.
    pub initial_t: usize,
    pub replacements: usize,
}

/// Indices outside `K` that beat the worst member of `K`. With `rank[j]`
/// the position of `j` in the total order, these are exactly the
/// non-members of rank below `rank[j*]`.
struct Improving<'a> {
    rank: &'a [usize],
    by_rank: &'a [usize],
    member: &'a [bool],
    worst_rank: usize,
    t: usize,
}

impl<'a> Improving<'a> {
    fn new(rank: &'a [usize], by_rank: &'a [usize], member: &'a [bool], k: usize) -> Self {
        let worst_rank = (0..rank.len())
            .filter(|&j| member[j])
            .map(|j| rank[j])
            .max()
            .unwrap_or(0);
        Self {
            rank,
            by_rank,
            member,
            worst_rank,
            t: worst_rank + 1 - k,
        }
    }

    fn worst(&self) -> usize {
        self.by_rank[self.worst_rank]
    }
}

impl MarkedSet for Improving<'_> {
    fn domain(&self) -> usize {
        self.rank.len()
    }
    fn count(&self) -> usize {
        self.t
    }
    fn is_marked(&self, j: usize) -> bool {
        !self.member[j] && self.rank[j] < self.worst_rank
    }
    fn sample_marked<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        loop {
            let j = self.by_rank[rng.random_range(0..self.worst_rank)];
            if !self.member[j] {
                return j;
            }
        }
    }
    fn sample_unmarked<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        loop {
            let j = rng.random_range(0..self.rank.len());
            if !self.is_marked(j) {
                return j;
            }
        }
    }
}

/// Grover-based search for the `k` indices with the largest similarity.
///
/// Starts from a random `k`-subset `K`, then repeatedly searches the
/// complement for an index beating the worst member `j*` of `K` and swaps
/// it in. Stops when a search returns nothing.
pub fn k_maximal_find<R: Rng + ?Sized>(
    table: &SimilarityTable,
    k: usize,
    engine: GroverEngine,
    schedule: Schedule,
    rng: &mut R,
) -> Result<(NeighborSet, KmaxReport), QknnError> {
    let m = table.len();
    if k == 0 {
        return Err(QknnError::ZeroK);
    }
    if k > m {
        return Err(QknnError::KTooLarge { k, m });
    }
    let by_rank = table.ranking();
    let mut rank = vec![0; m];
    for (r, &j) in by_rank.iter().enumerate() {
        rank[j] = r;
    }
    let mut member = vec![false; m];
    let mut report = KmaxReport::default();
    if k == m {
        member.iter_mut().for_each(|b| *b = true);
    } else {
        for j in sample(rng, m, k) {
            member[j] = true;
        }
        report.initial_t = Improving::new(&rank, &by_rank, &member, k).t;
        loop {
            let marked = Improving::new(&rank, &by_rank, &member, k);
            let worst = marked.worst();
            let run = run_search(&marked, engine, schedule, rng)?;
            report.oracle_calls += run.oracle_calls;
            let found = run.found;
            report.searches.push(run);
            match found {
                Some(j) => {
                    member[worst] = false;
                    member[j] = true;
                    report.replacements += 1;
                }
                None => break,
            }
        }
    }
    let mut members: Vec<usize> = (0..m).filter(|&j| member[j]).collect();
    members.sort_by_key(|&j| rank[j]);
    let complement = (0..m).filter(|&j| !member[j]).collect();
    Ok((
        NeighborSet {
            members,
            complement,
        },
        report,
    ))
}
