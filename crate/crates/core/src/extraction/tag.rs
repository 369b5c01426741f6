use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;

/// Largest hub set a [`HubBits`] can hold.
pub const MAX_HUBS: usize = 256;

const WORDS: usize = MAX_HUBS / 64;

/// A set of hub positions stored as a fixed-width bitset.
///
/// Ordering is lexicographic over the ascending position lists, so
/// `<0,1,2> < <0,2> < <1>`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct HubBits([u64; WORDS]);

impl HubBits {
    pub const EMPTY: HubBits = HubBits([0; WORDS]);

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut b = Self::EMPTY;
        for i in indices {
            b.insert(i);
        }
        b
    }

    /// Panics if `i >= MAX_HUBS`.
    pub fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < MAX_HUBS && self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn and(&self, other: &Self) -> Self {
        let mut out = *self;
        for (o, b) in out.0.iter_mut().zip(other.0) {
            *o &= b;
        }
        out
    }

    pub fn and_not(&self, other: &Self) -> Self {
        let mut out = *self;
        for (o, b) in out.0.iter_mut().zip(other.0) {
            *o &= !b;
        }
        out
    }

    pub fn or_assign(&mut self, other: &Self) {
        for (o, b) in self.0.iter_mut().zip(other.0) {
            *o |= b;
        }
    }

    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    /// Set positions in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(wi * 64 + bit)
            })
        })
    }
}

impl HubBits {
    fn any_above(&self, i: usize) -> bool {
        let (w, b) = (i / 64, i % 64);
        (b < 63 && self.0[w] >> (b + 1) != 0) || self.0[w + 1..].iter().any(|&x| x != 0)
    }
}

impl Ord for HubBits {
    fn cmp(&self, other: &Self) -> Ordering {
        // the lists agree below the lowest differing position `d`; the side
        // holding `d` is smaller unless the other side has nothing after it
        let Some(wi) = (0..WORDS).find(|&i| self.0[i] != other.0[i]) else {
            return Ordering::Equal;
        };
        let d = wi * 64 + (self.0[wi] ^ other.0[wi]).trailing_zeros() as usize;
        let (rest, holder_first) = if self.contains(d) {
            (other, Ordering::Less)
        } else {
            (self, Ordering::Greater)
        };
        if rest.any_above(d) {
            holder_first
        } else {
            holder_first.reverse()
        }
    }
}

impl PartialOrd for HubBits {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for HubBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (n, i) in self.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, ">")
    }
}

/// Membership certificate of a vertex or edge: `s` holds the hubs that reach
/// it and `r` the hubs it reaches. It belongs to the induced subgraph of every
/// ordered pair `(x, y)` in `s × r` with `x != y`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Tag {
    pub s: HubBits,
    pub r: HubBits,
}

impl Tag {
    pub const EMPTY: Tag = Tag {
        s: HubBits::EMPTY,
        r: HubBits::EMPTY,
    };

    pub fn new(s: HubBits, r: HubBits) -> Self {
        Self { s, r }
    }

    pub fn from_lists(s: &[usize], r: &[usize]) -> Self {
        Self::new(
            HubBits::from_indices(s.iter().copied()),
            HubBits::from_indices(r.iter().copied()),
        )
    }

    /// Number of ordered pairs `(x, y) ∈ s × r` with `x != y`.
    pub fn cardinality(&self) -> usize {
        self.s.count() * self.r.count() - self.s.and(&self.r).count()
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x != y && self.s.contains(x) && self.r.contains(y)
    }

    /// Subgraphs common to both tags: `(s₁ ∧ s₂, r₁ ∧ r₂)`.
    pub fn shared_component(&self, other: &Tag) -> Tag {
        Tag::new(self.s.and(&other.s), self.r.and(&other.r))
    }

    /// Splits `self − other` into at most two disjoint rectangles:
    /// `(s − s')×r` and `(s ∧ s')×(r − r')`.
    pub fn difference(&self, other: &Tag) -> [Tag; 2] {
        [
            Tag::new(self.s.and_not(&other.s), self.r),
            Tag::new(self.s.and(&other.s), self.r.and_not(&other.r)),
        ]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.s
            .iter()
            .flat_map(move |x| self.r.iter().filter(move |&y| y != x).map(move |y| (x, y)))
    }
}

impl fmt::Debug for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{:?}", self.s, self.r)
    }
}

/// An arbitrary set of ordered hub pairs over `k` hubs, stored as a `k × k`
/// bitmap with the diagonal always clear. Used where membership is not a
/// product of independent source and target sets.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairSet {
    k: u32,
    bits: Vec<u64>,
}

impl PairSet {
    pub fn empty(k: usize) -> Self {
        Self {
            k: k as u32,
            bits: vec![0; (k * k).div_ceil(64)],
        }
    }

    pub fn from_tag(tag: &Tag, k: usize) -> Self {
        let mut p = Self::empty(k);
        for (x, y) in tag.pairs() {
            if x < k && y < k {
                p.insert(x, y);
            }
        }
        p
    }

    pub fn hub_count(&self) -> usize {
        self.k as usize
    }

    /// Ignores `x == y`.
    pub fn insert(&mut self, x: usize, y: usize) {
        if x != y {
            let i = x * self.k as usize + y;
            self.bits[i / 64] |= 1 << (i % 64);
        }
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        let k = self.k as usize;
        if x >= k || y >= k {
            return false;
        }
        let i = x * k + y;
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    pub fn subtract(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & !b)
    }

    fn zip(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.k, other.k, "pair sets over different hub counts");
        Self {
            k: self.k,
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.k as usize;
        self.bits.iter().enumerate().flat_map(move |(wi, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                let i = wi * 64 + bit;
                Some((i / k, i % k))
            })
        })
    }
}

impl fmt::Debug for PairSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

/// A set of induced subgraphs (ordered hub pairs) that elements are routed
/// to. Both the rectangular [`Tag`] and the explicit [`PairSet`] qualify, so
/// the aggregation algorithms run unchanged for either grouping.
pub trait SubgraphSet: Clone + Eq + Hash + Ord + Send + Sync + fmt::Debug {
    fn cardinality(&self) -> usize;

    fn meet(&self, other: &Self) -> Self;

    /// `self.meet(other).cardinality()` without building the meet.
    fn meet_cardinality(&self, other: &Self) -> usize {
        self.meet(other).cardinality()
    }

    /// Disjoint pieces whose pairs are exactly those of `self` not in `other`.
    fn minus(&self, other: &Self) -> Vec<Self>;

    fn contains_pair(&self, x: usize, y: usize) -> bool;

    fn for_each_pair(&self, f: impl FnMut(usize, usize));
}

impl SubgraphSet for Tag {
    fn cardinality(&self) -> usize {
        Tag::cardinality(self)
    }

    fn meet(&self, other: &Self) -> Self {
        self.shared_component(other)
    }

    fn meet_cardinality(&self, other: &Self) -> usize {
        let (s, r) = (self.s.and(&other.s), self.r.and(&other.r));
        s.count() * r.count() - s.and(&r).count()
    }

    fn minus(&self, other: &Self) -> Vec<Self> {
        self.difference(other)
            .into_iter()
            .filter(|t| t.cardinality() > 0)
            .collect()
    }

    fn contains_pair(&self, x: usize, y: usize) -> bool {
        self.contains(x, y)
    }

    fn for_each_pair(&self, mut f: impl FnMut(usize, usize)) {
        for x in self.s.iter() {
            for y in self.r.iter() {
                if x != y {
                    f(x, y);
                }
            }
        }
    }
}

impl SubgraphSet for PairSet {
    fn cardinality(&self) -> usize {
        self.len()
    }

    fn meet(&self, other: &Self) -> Self {
        self.intersect(other)
    }

    fn meet_cardinality(&self, other: &Self) -> usize {
        assert_eq!(self.k, other.k, "pair sets over different hub counts");
        self.bits.iter().zip(&other.bits).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    fn minus(&self, other: &Self) -> Vec<Self> {
        let d = self.subtract(other);
        if d.is_empty() {
            vec![]
        } else {
            vec![d]
        }
    }

    fn contains_pair(&self, x: usize, y: usize) -> bool {
        self.contains(x, y)
    }

    fn for_each_pair(&self, mut f: impl FnMut(usize, usize)) {
        for (x, y) in self.pairs() {
            f(x, y);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cardinality_excludes_self_pairs() {
        // A1 in the worked example: <1><2,3,4,5>
        assert_eq!(Tag::from_lists(&[1], &[2, 3, 4, 5]).cardinality(), 4);
        assert_eq!(Tag::from_lists(&[1, 2, 3], &[4, 5]).cardinality(), 6);
        assert_eq!(Tag::from_lists(&[1, 2], &[2, 3, 4, 5]).cardinality(), 7);
        assert_eq!(Tag::from_lists(&[], &[1, 2]).cardinality(), 0);
    }

    #[test]
    fn shared_component_examples() {
        let t = Tag::from_lists(&[1, 2, 3], &[4, 5]);
        assert_eq!(t.shared_component(&t), t);
        let u = Tag::from_lists(&[2, 3], &[4, 6]);
        assert_eq!(t.shared_component(&u), Tag::from_lists(&[2, 3], &[4]));
        let v = Tag::from_lists(&[7], &[4, 5]);
        assert_eq!(t.shared_component(&v).cardinality(), 0);
    }

    #[test]
    fn ordering_is_lexicographic_on_index_lists() {
        let a = HubBits::from_indices([0, 1, 2]);
        let b = HubBits::from_indices([0, 2]);
        let c = HubBits::from_indices([1]);
        assert!(a < b && b < c);
        assert!(HubBits::EMPTY < a);
    }

    #[test]
    fn bits_span_all_words() {
        let b = HubBits::from_indices([0, 63, 64, 200, 255]);
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![0, 63, 64, 200, 255]);
        assert!(b.contains(200));
        assert!(!b.contains(256));
    }

    #[test]
    fn debug_format_matches_angle_lists() {
        assert_eq!(format!("{:?}", Tag::from_lists(&[2, 3], &[4])), "<2,3><4>");
    }

    fn pair_set(t: &Tag) -> std::collections::BTreeSet<(usize, usize)> {
        t.pairs().collect()
    }

    fn arb_tag() -> impl Strategy<Value = Tag> {
        (0u64..1 << 10, 0u64..1 << 10).prop_map(|(s, r)| {
            Tag::new(
                HubBits::from_indices((0..10).filter(|i| s >> i & 1 == 1)),
                HubBits::from_indices((0..10).filter(|i| r >> i & 1 == 1)),
            )
        })
    }

    proptest! {
        #[test]
        fn difference_partitions_pairs(a in arb_tag(), b in arb_tag()) {
            let pieces = a.difference(&b);
            let p0 = pair_set(&pieces[0]);
            let p1 = pair_set(&pieces[1]);
            prop_assert!(p0.is_disjoint(&p1));
            let union: std::collections::BTreeSet<_> = p0.union(&p1).copied().collect();
            let expected: std::collections::BTreeSet<_> =
                pair_set(&a).difference(&pair_set(&b)).copied().collect();
            prop_assert_eq!(union, expected);
        }

        #[test]
        fn bit_order_is_list_order(a in proptest::collection::btree_set(0usize..200, 0..6), b in proptest::collection::btree_set(0usize..200, 0..6)) {
            let (ba, bb) = (HubBits::from_indices(a.iter().copied()), HubBits::from_indices(b.iter().copied()));
            let (la, lb): (Vec<_>, Vec<_>) = (a.into_iter().collect(), b.into_iter().collect());
            prop_assert_eq!(ba.cmp(&bb), la.cmp(&lb));
        }

        #[test]
        fn cardinality_counts_pairs(a in arb_tag()) {
            prop_assert_eq!(a.cardinality(), a.pairs().count());
        }

        #[test]
        fn pair_set_mirrors_tag_algebra(a in arb_tag(), b in arb_tag()) {
            let pa = PairSet::from_tag(&a, 10);
            let pb = PairSet::from_tag(&b, 10);
            prop_assert_eq!(pa.len(), a.cardinality());
            prop_assert_eq!(pa.intersect(&pb), PairSet::from_tag(&a.shared_component(&b), 10));
            let diff: std::collections::BTreeSet<_> = pa.subtract(&pb).pairs().collect();
            let expected: std::collections::BTreeSet<_> =
                pair_set(&a).difference(&pair_set(&b)).copied().collect();
            prop_assert_eq!(diff, expected);
        }

        #[test]
        fn meet_cardinality_shortcut(a in arb_tag(), b in arb_tag()) {
            prop_assert_eq!(a.meet_cardinality(&b), a.meet(&b).cardinality());
            let (pa, pb) = (PairSet::from_tag(&a, 10), PairSet::from_tag(&b, 10));
            prop_assert_eq!(pa.meet_cardinality(&pb), pa.meet(&pb).cardinality());
        }
    }
}
