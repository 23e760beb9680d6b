use super::{Signature, Term};

/// All pure terms of nesting depth at most `depth`.
///
/// Order: parameters (declaration order), then constants (declaration
/// order), then level by level; within a level by function declaration
/// order and lexicographically on the argument positions in the list built
/// so far. `enumerate_pure_terms(s, d)` is a prefix of
/// `enumerate_pure_terms(s, d + 1)`.
pub fn enumerate_pure_terms(sig: &Signature, depth: usize) -> Vec<Term> {
    let mut out: Vec<Term> = sig.params().iter().map(|a| Term::Param(a.clone())).collect();
    out.extend(sig.constants().into_iter().map(|c| Term::App(c, Vec::new())));
    let functions: Vec<(String, usize)> = sig.functions().into_iter().filter(|(_, n)| *n > 0).collect();
    // [start of previous level, end of pool)
    let mut prev_start = 0;
    for _ in 0..depth {
        let pool_len = out.len();
        let mut level = Vec::new();
        for (f, arity) in &functions {
            for_each_tuple(pool_len, *arity, |idx| {
                if idx.iter().any(|&i| i >= prev_start) {
                    level.push(Term::App(f.clone(), idx.iter().map(|&i| out[i].clone()).collect()));
                }
            });
        }
        if level.is_empty() {
            break;
        }
        prev_start = pool_len;
        out.extend(level);
    }
    out
}

/// True when there are only finitely many pure terms (no function of
/// positive arity).
pub fn universe_is_finite(sig: &Signature) -> bool {
    sig.functions().iter().all(|(_, n)| *n == 0)
}

/// The first `n` pure terms of the infinite enumeration (fewer if the
/// universe is finite).
pub fn pure_terms_prefix(sig: &Signature, n: usize) -> Vec<Term> {
    let mut depth = 0;
    loop {
        let terms = enumerate_pure_terms(sig, depth);
        if terms.len() >= n || universe_is_finite(sig) {
            return terms.into_iter().take(n).collect();
        }
        depth += 1;
    }
}

/// Calls `f` on every `arity`-tuple of indices below `n`, in lexicographic
/// order.
pub(crate) fn for_each_tuple(n: usize, arity: usize, mut f: impl FnMut(&[usize])) {
    if arity == 0 {
        f(&[]);
        return;
    }
    if n == 0 {
        return;
    }
    let mut idx = vec![0usize; arity];
    loop {
        f(&idx);
        let mut k = arity;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Every `arity`-tuple over `items`, lexicographic.
pub(crate) fn tuples<T: Clone>(items: &[T], arity: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    for_each_tuple(items.len(), arity, |idx| out.push(idx.iter().map(|&i| items[i].clone()).collect()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unary_tower() {
        let sig = Signature::build(&[("f", 1)], &[], &["a"]).unwrap();
        let a = Term::param("a");
        let fa = Term::app("f", vec![a.clone()]);
        assert_eq!(enumerate_pure_terms(&sig, 0), vec![a.clone()]);
        assert_eq!(enumerate_pure_terms(&sig, 2), vec![a, fa.clone(), Term::app("f", vec![fa])]);
    }

    #[test]
    fn no_functions_is_finite() {
        let sig = Signature::build(&[], &[("p", 1)], &["a", "b"]).unwrap();
        assert_eq!(enumerate_pure_terms(&sig, 5), vec![Term::param("a"), Term::param("b")]);
        assert!(universe_is_finite(&sig));
        assert_eq!(pure_terms_prefix(&sig, 10).len(), 2);
    }

    #[test]
    fn prefix_closed_and_pure_without_duplicates() {
        let sig = Signature::build(&[("c", 0), ("f", 1), ("g", 2)], &[], &["a", "b"]).unwrap();
        let mut prev = Vec::new();
        for d in 0..3 {
            let cur = enumerate_pure_terms(&sig, d);
            assert_eq!(&cur[..prev.len()], &prev[..]);
            assert!(cur.iter().all(|t| t.is_pure() && t.depth() <= d));
            let mut dedup = cur.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), cur.len());
            prev = cur;
        }
        // 3 at depth 0; 3 + 9 new at depth 1
        assert_eq!(enumerate_pure_terms(&sig, 1).len(), 15);
    }

    #[test]
    fn tuple_order() {
        assert_eq!(tuples(&[1, 2], 2), vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
        assert_eq!(tuples::<u8>(&[], 0), vec![Vec::<u8>::new()]);
        assert!(tuples::<u8>(&[], 1).is_empty());
    }
}
