/// Exact binomial coefficient. Saturates at `u128::MAX`.
pub fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Calls `f` on every `r`-subset of `items`, in lexicographic order of positions.
/// Stops early when `f` returns `false`; the return value reports whether the
/// enumeration ran to completion.
pub fn for_each_subset<T: Copy>(items: &[T], r: usize, mut f: impl FnMut(&[T]) -> bool) -> bool {
    if r > items.len() {
        return true;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    let mut buf: Vec<T> = idx.iter().map(|&i| items[i]).collect();
    loop {
        if !f(&buf) {
            return false;
        }
        // advance the rightmost index that can still move
        let mut j = r;
        while j > 0 && idx[j - 1] == items.len() - r + j - 1 {
            j -= 1;
        }
        if j == 0 {
            return true;
        }
        j -= 1;
        idx[j] += 1;
        buf[j] = items[idx[j]];
        for i in j + 1..r {
            idx[i] = idx[i - 1] + 1;
            buf[i] = items[idx[i]];
        }
    }
}

/// All `r`-subsets of `items`, collected.
pub fn subsets<T: Copy>(items: &[T], r: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    for_each_subset(items, r, |s| {
        out.push(s.to_vec());
        true
    });
    out
}
