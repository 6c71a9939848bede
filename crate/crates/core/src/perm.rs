//! Small permutation utilities.

/// Sign of the permutation `i ↦ p[i]` of `0..p.len()` (any sequence of
/// distinct integers is accepted; its sign is that of the sorting permutation).
pub fn permutation_sign(p: &[usize]) -> i32 {
    let mut seen = vec![false; p.len()];
    let mut rank: Vec<usize> = p.to_vec();
    let mut sorted = p.to_vec();
    sorted.sort_unstable();
    for r in rank.iter_mut() {
        *r = sorted.binary_search(r).expect("entries are distinct");
    }
    let mut sign = 1;
    for start in 0..rank.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = rank[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// The `(r, s)`-shuffles as position lists: entry `k` is the old index placed
/// at position `k`, with `0..r` and `r..r+s` each kept in order.
pub fn shuffles(r: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r + s);
    fn rec(i: usize, j: usize, r: usize, s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == r && j == s {
            out.push(cur.clone());
            return;
        }
        if i < r {
            cur.push(i);
            rec(i + 1, j, r, s, cur, out);
            cur.pop();
        }
        if j < s {
            cur.push(r + j);
            rec(i, j + 1, r, s, cur, out);
            cur.pop();
        }
    }
    rec(0, 0, r, s, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signs_and_counts() {
        assert_eq!(permutation_sign(&[0, 1, 2]), 1);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
        assert_eq!(permutation_sign(&[1, 2, 0]), 1);
        assert_eq!(permutation_sign(&[5, 3]), -1);
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
        let total: i32 = permutations(4).iter().map(|p| permutation_sign(p)).sum();
        assert_eq!(total, 0);
        assert_eq!(shuffles(2, 3).len(), 10);
        assert_eq!(shuffles(1, 1), vec![vec![0, 1], vec![1, 0]]);
    }
}
