use super::Alphabet;
use crate::runtime::ScheduleElem;

/// Number of schedules of length `0..=depth` over `n` elements, or `None` on overflow.
pub fn schedule_count(n: u64, depth: u32) -> Option<u128> {
    let mut total: u128 = 0;
    let mut layer: u128 = 1;
    for k in 0..=depth {
        if k > 0 {
            layer = layer.checked_mul(n as u128)?;
        }
        total = total.checked_add(layer)?;
    }
    Some(total)
}

/// Every schedule of length `0..=depth`, shortest first and
/// lexicographically (by element index) within a length.
pub fn enumerate_schedules(a: &Alphabet, depth: usize) -> Schedules {
    Schedules { elems: a.elements(), depth, cur: Some(Vec::new()) }
}

pub struct Schedules {
    elems: Vec<ScheduleElem>,
    depth: usize,
    /// Index vector of the next schedule to yield.
    cur: Option<Vec<usize>>,
}

impl Schedules {
    fn advance(&mut self, mut idx: Vec<usize>) -> Option<Vec<usize>> {
        let n = self.elems.len();
        // odometer increment, least significant position last
        for pos in (0..idx.len()).rev() {
            if idx[pos] + 1 < n {
                idx[pos] += 1;
                return Some(idx);
            }
            idx[pos] = 0;
        }
        let next_len = idx.len() + 1;
        (n > 0 && next_len <= self.depth).then(|| vec![0; next_len])
    }
}

impl Iterator for Schedules {
    type Item = Vec<ScheduleElem>;

    fn next(&mut self) -> Option<Self::Item> {
        let idx = self.cur.take()?;
        let out = idx.iter().map(|&i| self.elems[i].clone()).collect();
        self.cur = self.advance(idx);
        Some(out)
    }
}
