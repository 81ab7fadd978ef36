//! Permutation combinatorics and graded sign conventions.
//!
//! Everything degree-sensitive in the engine funnels through this module:
//! unshuffle enumeration, Koszul signs for graded symmetric and antisymmetric
//! interchange, and the degree-shift sign relating symmetric and antisymmetric
//! bracket conventions.
//!
//! # Design notes
//! - Permutations act on positions: `perm[i]` is the original index placed at
//!   slot `i` (so applying a permutation to arguments reads
//!   `args[perm[0]], args[perm[1]], ...`).
//! - Unshuffle streams are produced lazily in lexicographic order so that
//!   large-arity checks can consume them without materializing `n!` vectors.

/// A permutation of `0..n`, stored as the sequence of source indices.
pub type Permutation = Vec<usize>;

/// Degrees of a tuple of graded arguments (already in whatever shift the
/// caller works in); only parity matters for signs.
pub type DegreeVector = Vec<i64>;

/// Binomial coefficient as an exact `u128` (sizes here are tiny).
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Koszul sign of the permutation `perm` acting on arguments of the given
/// degrees, in the *symmetric* convention: transposing adjacent arguments of
/// degrees `a`, `b` contributes `(-1)^{ab}`.
pub fn koszul_sign(perm: &[usize], degrees: &[i64]) -> i64 {
    koszul_with(perm, degrees, false)
}

/// Koszul sign in the *antisymmetric* convention: adjacent transposition
/// contributes `-(-1)^{ab}`, i.e. the plain sign of the permutation times the
/// symmetric Koszul sign.
pub fn antisymmetric_koszul_sign(perm: &[usize], degrees: &[i64]) -> i64 {
    koszul_with(perm, degrees, true)
}

fn koszul_with(perm: &[usize], degrees: &[i64], antisym: bool) -> i64 {
    debug_assert_eq!(perm.len(), degrees.len());
    // Count, over each inverted pair, the parity contribution of moving the
    // later argument past the earlier one.
    let mut sign = 1i64;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                let d = degrees[perm[i]] * degrees[perm[j]];
                if d % 2 != 0 {
                    sign = -sign;
                }
                if antisym {
                    sign = -sign;
                }
            }
        }
    }
    sign
}

/// Plain sign of a permutation.
pub fn permutation_sign(perm: &[usize]) -> i64 {
    let mut sign = 1i64;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Sign converting a `k`-ary antisymmetric bracket on unshifted degrees into
/// the corresponding symmetric bracket on shifted degrees:
/// `(-1)^{(k-1)|v_1| + (k-2)|v_2| + ... + |v_{k-1}|}` with `|v_i|` the
/// *unshifted* degrees.
pub fn decalage_sign(unshifted_degrees: &[i64]) -> i64 {
    let k = unshifted_degrees.len();
    let mut e = 0i64;
    for (i, d) in unshifted_degrees.iter().enumerate() {
        e += (k - 1 - i) as i64 * d;
    }
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Lazily enumerate `(i, j)`-unshuffles of `0..i+j` in lexicographic order:
/// permutations increasing on the first `i` slots and on the last `j` slots.
pub fn unshuffles(i: usize, j: usize) -> impl Iterator<Item = Permutation> {
    block_permutations(vec![i, j], 2)
}

/// Unshuffles into consecutive blocks of the given sizes (increasing within
/// each block). `strict_from` imposes the "strict" tie-breaking rule starting
/// at that block index: whenever two adjacent blocks at positions `b`,`b+1`
/// (with `b >= strict_from`) have equal sizes, the leading element of block
/// `b` must be smaller than the leading element of block `b+1`.
///
/// With `strict_from == 0` applied to equal-size blocks only, this enumerates
/// the unordered multi-unshuffles used by composition and morphism-defect
/// sums; with `strict_from` past the end it enumerates all block unshuffles.
pub fn block_permutations(
    sizes: Vec<usize>,
    strict_from: usize,
) -> impl Iterator<Item = Permutation> {
    let total: usize = sizes.iter().sum();
    BlockUnshuffles {
        sizes,
        strict_from,
        state: Some(vec![0; total]),
        total,
        started: false,
    }
}

/// Unshuffles with the strictness rule applied to every pair of adjacent
/// equal-size blocks, which enumerates each unordered grouping exactly once.
/// Used by composition and morphism-defect sums; for sums where a leading
/// block plays a separate role, call [`block_permutations`] with
/// `strict_from = 1` instead.
pub fn strict_unshuffles(sizes: Vec<usize>) -> impl Iterator<Item = Permutation> {
    block_permutations(sizes, 0)
}

/// Iterator state: assigns each element of `0..total` a block id, in
/// lexicographic order over assignment vectors, and yields the induced
/// permutation (elements of block 0 in increasing order, then block 1, ...).
struct BlockUnshuffles {
    sizes: Vec<usize>,
    strict_from: usize,
    state: Option<Vec<usize>>,
    total: usize,
    started: bool,
}

impl BlockUnshuffles {
    fn valid(&self, assign: &[usize]) -> bool {
        // check block sizes
        let mut counts = vec![0usize; self.sizes.len()];
        for &b in assign {
            if b >= self.sizes.len() {
                return false;
            }
            counts[b] += 1;
        }
        if counts != self.sizes {
            return false;
        }
        // strictness on equal adjacent blocks: compare leading (smallest)
        // element of each block
        for b in self.strict_from..self.sizes.len().saturating_sub(1) {
            if self.sizes[b] == self.sizes[b + 1] {
                let lead = |blk: usize| assign.iter().position(|&a| a == blk);
                match (lead(b), lead(b + 1)) {
                    (Some(x), Some(y)) if x > y => return false,
                    _ => {}
                }
            }
        }
        true
    }

    fn advance(assign: &mut Vec<usize>, base: usize) -> bool {
        // lexicographic increment of the assignment vector in radix `base`
        for slot in (0..assign.len()).rev() {
            if assign[slot] + 1 < base {
                assign[slot] += 1;
                for a in assign.iter_mut().skip(slot + 1) {
                    *a = 0;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for BlockUnshuffles {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let base = self.sizes.len().max(1);
        loop {
            let assign = self.state.as_mut()?;
            if self.started {
                if !Self::advance(assign, base) {
                    self.state = None;
                    return None;
                }
            } else {
                self.started = true;
                if self.total == 0 {
                    // single empty permutation
                    self.state = None;
                    return Some(Vec::new());
                }
            }
            let assign = self.state.as_ref()?;
            if !self.valid(assign) {
                continue;
            }
            let mut perm = Vec::with_capacity(self.total);
            for block in 0..self.sizes.len() {
                for (idx, &b) in assign.iter().enumerate() {
                    if b == block {
                        perm.push(idx);
                    }
                }
            }
            return Some(perm);
        }
    }
}

/// All permutations of `0..n`, lexicographic (used for small symmetrization
/// sums, e.g. in the presymplectic bracket formula).
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next_permutation
        if n < 2 {
            break;
        }
        let mut i = n - 1;
        while i > 0 && cur[i - 1] >= cur[i] {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        let mut j = n - 1;
        while cur[j] <= cur[i - 1] {
            j -= 1;
        }
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// Partitions of `n` into `m` positive parts in weakly increasing order.
pub fn sorted_compositions(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(n: usize, m: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if m == 0 {
            if n == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for part in min..=n {
            // remaining m-1 parts each >= part
            if n - part < part * (m - 1) {
                continue;
            }
            cur.push(part);
            go(n - part, m - 1, part, cur, out);
            cur.pop();
        }
    }
    go(n, m, 1, &mut cur, &mut out);
    out
}

/// Compositions of `n` into `m` nonnegative parts (ordered), lexicographic.
pub fn compositions(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if m == 0 {
            if n == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for part in 0..=n {
            cur.push(part);
            go(n - part, m - 1, cur, out);
            cur.pop();
        }
    }
    go(n, m, &mut cur, &mut out);
    out
}
