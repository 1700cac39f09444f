//! Fixed-width bitset rows backing all adjacency structures.

/// Words needed for `n` bits.
pub fn words(n: usize) -> usize {
    n.div_ceil(64)
}

pub fn get(row: &[u64], i: usize) -> bool {
    row[i / 64] >> (i % 64) & 1 == 1
}

pub fn set(row: &mut [u64], i: usize) {
    row[i / 64] |= 1 << (i % 64);
}

pub fn clear(row: &mut [u64], i: usize) {
    row[i / 64] &= !(1 << (i % 64));
}

pub fn count(row: &[u64]) -> usize {
    row.iter().map(|w| w.count_ones() as usize).sum()
}

pub fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

pub fn is_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

pub fn intersects(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

pub fn union_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d |= s;
    }
}

pub fn subtract_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d &= !s;
    }
}

pub fn from_indices(n: usize, idx: &[usize]) -> Vec<u64> {
    let mut row = vec![0u64; words(n)];
    for &i in idx {
        debug_assert!(i < n);
        set(&mut row, i);
    }
    row
}

/// Indices of set bits, ascending.
pub fn to_indices(row: &[u64]) -> Vec<usize> {
    let mut out = Vec::with_capacity(count(row));
    for (wi, &w) in row.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            out.push(wi * 64 + w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
    out
}

/// Lowest set bit, if any.
pub fn first(row: &[u64]) -> Option<usize> {
    for (wi, &w) in row.iter().enumerate() {
        if w != 0 {
            return Some(wi * 64 + w.trailing_zeros() as usize);
        }
    }
    None
}

pub fn iter_ones(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(wi, &w)| {
        std::iter::successors(Some(w), |&w| Some(w & w.wrapping_sub(1)))
            .take_while(|&w| w != 0)
            .map(move |w| wi * 64 + w.trailing_zeros() as usize)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let idx = [0usize, 3, 63, 64, 100];
        let row = from_indices(128, &idx);
        assert_eq!(to_indices(&row), idx.to_vec());
        assert_eq!(count(&row), 5);
        assert_eq!(first(&row), Some(0));
        assert_eq!(iter_ones(&row).collect::<Vec<_>>(), idx.to_vec());
    }

    #[test]
    fn subset_and_subtract() {
        let a = from_indices(70, &[1, 65]);
        let b = from_indices(70, &[1, 2, 65]);
        assert!(is_subset(&a, &b));
        assert!(!is_subset(&b, &a));
        let mut c = b.clone();
        subtract_into(&mut c, &a);
        assert_eq!(to_indices(&c), vec![2]);
    }
}
