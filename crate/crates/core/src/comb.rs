//! Integer binomials, including the polynomial extension to negative tops.

/// `C(n, k)` for `k >= 0`, read as the polynomial `n(n-1)...(n-k+1)/k!`.
/// Returns 0 for negative `k`.
pub fn binom(n: i64, k: i64) -> i128 {
    if k < 0 {
        return 0;
    }
    if n >= 0 && k > n {
        return 0;
    }
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

/// Plain count of `k`-subsets of an `n`-set.
pub fn choose(n: usize, k: usize) -> usize {
    if k > n {
        0
    } else {
        binom(n as i64, k as i64) as usize
    }
}
