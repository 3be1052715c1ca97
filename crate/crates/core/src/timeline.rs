//! Interval-union algebra, host busy time and capacity checks over time.
//!
//! All intervals are half-open `[start, end)`: two VMs meeting end-to-end do
//! not contend for resources at the meeting instant, and their spans coalesce
//! without double counting.

use crate::model::{HostSpec, Load, Seconds, VmRequest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub start: Seconds,
    pub end: Seconds,
}

impl Interval {
    /// `None` for empty or inverted intervals.
    pub fn new(start: Seconds, end: Seconds) -> Option<Self> {
        (start < end).then_some(Self { start, end })
    }

    pub fn len(&self) -> Seconds {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    #[cfg(test)]
    fn touches(&self, other: &Interval) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

/// Measure of the union of `intervals`.
pub fn span_union(intervals: &[Interval]) -> Seconds {
    BusyProfile::from_intervals(intervals.iter().copied()).span()
}

/// Sorted, pairwise disjoint, non-adjacent busy intervals of one host.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BusyProfile {
    merged: Vec<Interval>,
}

impl BusyProfile {
    pub fn from_intervals(intervals: impl IntoIterator<Item = Interval>) -> Self {
        let mut all: Vec<Interval> = intervals.into_iter().filter(|i| !i.is_empty()).collect();
        all.sort_unstable();
        let mut merged: Vec<Interval> = Vec::with_capacity(all.len());
        for iv in all {
            match merged.last_mut() {
                Some(last) if iv.start <= last.end => last.end = last.end.max(iv.end),
                _ => merged.push(iv),
            }
        }
        Self { merged }
    }

    pub fn merged(&self) -> &[Interval] {
        &self.merged
    }

    pub fn span(&self) -> Seconds {
        self.merged.iter().map(Interval::len).sum()
    }

    pub fn insert(&mut self, iv: Interval) {
        if iv.is_empty() {
            return;
        }
        // First entry that ends at or after iv.start may touch it.
        let lo = self.merged.partition_point(|m| m.end < iv.start);
        let hi = lo + self.merged[lo..].partition_point(|m| m.start <= iv.end);
        let mut joined = iv;
        for m in &self.merged[lo..hi] {
            joined.start = joined.start.min(m.start);
            joined.end = joined.end.max(m.end);
        }
        self.merged.splice(lo..hi, std::iter::once(joined));
    }

    /// Span after a hypothetical insertion of `iv`.
    pub fn span_with(&self, iv: Interval) -> Seconds {
        if iv.is_empty() {
            return self.span();
        }
        let lo = self.merged.partition_point(|m| m.end <= iv.start);
        let covered: Seconds = self.merged[lo..]
            .iter()
            .take_while(|m| m.start < iv.end)
            .map(|m| m.end.min(iv.end) - m.start.max(iv.start))
            .sum();
        self.span() + iv.len() - covered
    }

    pub fn is_busy_at(&self, t: Seconds) -> bool {
        let i = self.merged.partition_point(|m| m.end <= t);
        self.merged.get(i).is_some_and(|m| m.start <= t)
    }

    #[cfg(test)]
    fn is_normalized(&self) -> bool {
        self.merged.iter().all(|m| !m.is_empty())
            && self.merged.windows(2).all(|w| !w[0].touches(&w[1]))
    }
}

/// Busy time of a host running `host_vms`.
pub fn host_busy_time<'a>(host_vms: impl IntoIterator<Item = &'a VmRequest>) -> Seconds {
    BusyProfile::from_intervals(host_vms.into_iter().map(VmRequest::interval)).span()
}

/// Busy time the host would have after also taking `candidate`.
pub fn estimate_busy_time_with<'a>(
    host_vms: impl IntoIterator<Item = &'a VmRequest>,
    candidate: &VmRequest,
) -> Seconds {
    BusyProfile::from_intervals(host_vms.into_iter().map(VmRequest::interval))
        .span_with(candidate.interval())
}

/// Whether `candidate` can join `host_vms` on `host` without exceeding any
/// capacity axis at any instant of the candidate's interval.
///
/// Cores and total MIPS are both checked, as are RAM, network, storage and
/// (when bounded) io.
pub fn feasible_with<'a>(
    host: &HostSpec,
    host_vms: impl IntoIterator<Item = &'a VmRequest>,
    candidate: &VmRequest,
) -> bool {
    let window = candidate.interval();
    let overlapping = host_vms
        .into_iter()
        .filter(|v| v.start_time < window.end && window.start < v.finish_time())
        .map(|v| {
            let iv = v.interval();
            (
                iv.start.max(window.start),
                iv.end.min(window.end),
                v.demand.load(),
            )
        });
    peak_fits(
        candidate.demand.load(),
        overlapping,
        &host.capacity.capacity_load(),
    )
}

/// Whether `vms` all fit `host` simultaneously at every instant.
pub fn within_capacity<'a>(host: &HostSpec, vms: impl IntoIterator<Item = &'a VmRequest>) -> bool {
    let items = vms
        .into_iter()
        .map(|v| (v.start_time, v.finish_time(), v.demand.load()));
    peak_fits(Load::default(), items, &host.capacity.capacity_load())
}

/// Event sweep: `base` is active over the whole window; each item is active
/// over `[start, end)`. Ends sort before starts at equal times.
fn peak_fits(
    base: Load,
    items: impl Iterator<Item = (Seconds, Seconds, Load)>,
    capacity: &Load,
) -> bool {
    let mut events: Vec<(Seconds, bool, Load)> = Vec::new();
    for (start, end, load) in items {
        events.push((start, true, load));
        events.push((end, false, load));
    }
    events.sort_unstable_by_key(|e| (e.0, e.1));
    let mut running = base;
    if !running.fits(capacity) {
        return false;
    }
    for (_, is_start, load) in &events {
        if *is_start {
            running.add(load);
            if !running.fits(capacity) {
                return false;
            }
        } else {
            running.sub(load);
        }
    }
    true
}

/// Strict staggered overlap: `a` starts first, `b` starts inside `a`, and `b`
/// finishes strictly after `a`.
pub fn overlaps(a: &VmRequest, b: &VmRequest) -> bool {
    a.start_time < b.start_time
        && b.start_time < a.finish_time()
        && a.finish_time() < b.finish_time()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{ml110_g5_linear, six_vm_example, HOUR};
    use crate::model::{VmId, VmType};
    use proptest::prelude::*;

    fn iv(a: u64, b: u64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    /// Counts covered unit seconds one by one.
    fn grid_count(intervals: &[Interval]) -> u64 {
        let horizon = intervals.iter().map(|i| i.end).max().unwrap_or(0);
        (0..horizon)
            .filter(|t| intervals.iter().any(|i| i.start <= *t && *t < i.end))
            .count() as u64
    }

    fn example_vm(id: u64) -> VmRequest {
        six_vm_example(1, ml110_g5_linear())
            .vm(VmId(id))
            .unwrap()
            .clone()
    }

    #[test]
    fn span_examples() {
        assert_eq!(span_union(&[iv(0, 10), iv(0, 2)]), 10);
        assert_eq!(span_union(&[iv(0, 2), iv(4, 6)]), 4);
        let overlap = [iv(0, 2), iv(1, 10)];
        assert_eq!(grid_count(&overlap), 10);
        assert_eq!(span_union(&overlap), 10);
        assert_eq!(span_union(&[]), 0);
        assert!(Interval::new(3, 3).is_none());
    }

    #[test]
    fn adjacent_intervals_coalesce() {
        let p = BusyProfile::from_intervals([iv(0, 2), iv(2, 5)]);
        assert_eq!(p.merged(), &[iv(0, 5)]);
        assert!(p.is_busy_at(2));
        assert!(!p.is_busy_at(5));
    }

    #[test]
    fn busy_time_examples() {
        let h1: Vec<_> = [1, 3, 4, 5].into_iter().map(example_vm).collect();
        assert_eq!(host_busy_time(&h1), 10 * HOUR);
        assert_eq!(host_busy_time(&[]), 0);
        assert_eq!(host_busy_time(&[example_vm(2)]), 2 * HOUR);
    }

    #[test]
    fn estimate_examples() {
        assert_eq!(
            estimate_busy_time_with(&[example_vm(1)], &example_vm(6)),
            10 * HOUR
        );
        assert_eq!(estimate_busy_time_with(&[], &example_vm(2)), 2 * HOUR);
        // [0,2] ∪ [1,10]
        assert_eq!(
            span_union(&[iv(0, 2 * HOUR), iv(HOUR, 10 * HOUR)]),
            10 * HOUR
        );
        assert_eq!(
            estimate_busy_time_with(&[example_vm(2)], &example_vm(6)),
            10 * HOUR
        );
    }

    #[test]
    fn feasibility_examples() {
        let s = six_vm_example(1, ml110_g5_linear());
        let host = &s.hosts()[0];
        let (vm1, vm2, vm3) = (example_vm(1), example_vm(2), example_vm(3));
        assert!(feasible_with(host, [&vm1], &vm2));
        // 0.5 + 0.5 + 0.2 of CPU at t = 0
        assert!(!feasible_with(host, [&vm1, &vm2], &vm3));
        let mut late = vm3.clone();
        late.start_time = 20 * HOUR;
        assert!(feasible_with(host, [&vm1, &vm2], &late));
    }

    #[test]
    fn back_to_back_vms_do_not_contend() {
        let s = six_vm_example(1, ml110_g5_linear());
        let host = &s.hosts()[0];
        let mut a = example_vm(2);
        a.demand.cores = 10;
        let mut b = a.clone();
        b.id = VmId(99);
        b.start_time = a.finish_time();
        assert!(feasible_with(host, [&a], &b));
        b.start_time -= 1;
        assert!(!feasible_with(host, [&a], &b));
    }

    #[test]
    fn overlap_examples() {
        let (vm1, vm2, vm6) = (example_vm(1), example_vm(2), example_vm(6));
        assert!(overlaps(&vm2, &vm6));
        assert!(!overlaps(&vm1, &vm6));
        let a = VmRequest {
            id: VmId(10),
            vm_type: VmType::Custom,
            demand: vm2.demand,
            start_time: 0,
            duration: 2,
        };
        let b = VmRequest {
            id: VmId(11),
            start_time: 5,
            ..a.clone()
        };
        assert!(!overlaps(&a, &b));
    }

    fn intervals() -> impl Strategy<Value = Vec<Interval>> {
        prop::collection::vec((0u64..2000, 1u64..400), 0..25).prop_map(|v| {
            v.into_iter()
                .map(|(s, d)| Interval {
                    start: s,
                    end: s + d,
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn span_matches_grid_count(ivs in intervals()) {
            prop_assert_eq!(span_union(&ivs), grid_count(&ivs));
            prop_assert!(BusyProfile::from_intervals(ivs.iter().copied()).is_normalized());
        }

        #[test]
        fn span_is_monotone(ivs in intervals(), s in 0u64..2000, d in 1u64..400) {
            let extra = Interval { start: s, end: s + d };
            let mut more = ivs.clone();
            more.push(extra);
            let before = span_union(&ivs);
            let after = span_union(&more);
            prop_assert!(after >= before && after <= before + d);
            prop_assert_eq!(BusyProfile::from_intervals(ivs.iter().copied()).span_with(extra), after);
        }

        #[test]
        fn incremental_insert_matches_rebuild(ivs in intervals()) {
            let mut p = BusyProfile::default();
            for i in &ivs {
                p.insert(*i);
            }
            prop_assert!(p.is_normalized());
            prop_assert_eq!(p, BusyProfile::from_intervals(ivs.iter().copied()));
        }
    }
}
