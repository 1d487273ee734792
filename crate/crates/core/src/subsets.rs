//! Column-subset enumeration and the sequential/parallel drivers used by the
//! verifiers. Subsets are emitted in lexicographic order so that "first
//! failure" reports are deterministic regardless of scheduling.

/// All k-element subsets of `0..n` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    k_subsets_of(&(0..n).collect::<Vec<_>>(), k)
}

/// All k-element subsets of `items` (in the given order), lexicographic by position.
pub fn k_subsets_of<T: Copy>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let n = items.len();
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Apply `check` to every item, returning the first (lowest-index) `Some`.
/// The parallel version uses `find_map_first`, which preserves this order.
#[cfg(feature = "parallel")]
pub(crate) fn find_first_map<T, R, F>(items: &[T], check: F) -> Option<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Option<R> + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().find_map_first(check)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn find_first_map<T, R, F>(items: &[T], check: F) -> Option<R>
where
    F: Fn(&T) -> Option<R>,
{
    items.iter().find_map(check)
}

pub(crate) fn find_first_map_seq<T, R, F>(items: &[T], check: F) -> Option<R>
where
    F: Fn(&T) -> Option<R>,
{
    items.iter().find_map(check)
}

/// Keep the items passing `pred`, preserving order (rayon's indexed collect
/// keeps input order, so parallel and sequential results coincide).
#[cfg(feature = "parallel")]
pub(crate) fn filter_ordered<T, F>(items: &[T], pred: F) -> Vec<T>
where
    T: Clone + Sync + Send,
    F: Fn(&T) -> bool + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().filter(|t| pred(t)).cloned().collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn filter_ordered<T, F>(items: &[T], pred: F) -> Vec<T>
where
    T: Clone,
    F: Fn(&T) -> bool,
{
    items.iter().filter(|t| pred(t)).cloned().collect()
}

/// Fold every item through `eval` and combine with `merge` (associative and
/// commutative with deterministic tie-breaks), so parallel and sequential
/// drivers produce identical results.
#[cfg(feature = "parallel")]
pub(crate) fn map_reduce<T, R, E, M>(items: &[T], eval: E, merge: M) -> Option<R>
where
    T: Sync,
    R: Send,
    E: Fn(usize, &T) -> R + Sync + Send,
    M: Fn(R, R) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items
        .par_iter()
        .enumerate()
        .map(|(i, t)| eval(i, t))
        .reduce_with(merge)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_reduce<T, R, E, M>(items: &[T], eval: E, merge: M) -> Option<R>
where
    E: Fn(usize, &T) -> R,
    M: Fn(R, R) -> R,
{
    items
        .iter()
        .enumerate()
        .map(|(i, t)| eval(i, t))
        .reduce(merge)
}

pub(crate) fn map_reduce_seq<T, R, E, M>(items: &[T], eval: E, merge: M) -> Option<R>
where
    E: Fn(usize, &T) -> R,
    M: Fn(R, R) -> R,
{
    items
        .iter()
        .enumerate()
        .map(|(i, t)| eval(i, t))
        .reduce(merge)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_lex_order() {
        let s = k_subsets(4, 2);
        assert_eq!(
            s,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(k_subsets(5, 0), vec![Vec::<usize>::new()]);
        assert_eq!(k_subsets(3, 4), Vec::<Vec<usize>>::new());
        assert_eq!(k_subsets(14, 2).len(), 91);
    }

    #[test]
    fn drivers_agree() {
        let items: Vec<usize> = (0..100).collect();
        let seq = find_first_map_seq(&items, |&x| if x > 40 { Some(x) } else { None });
        let drv = find_first_map(&items, |&x| if x > 40 { Some(x) } else { None });
        assert_eq!(seq, drv);
        assert_eq!(seq, Some(41));
    }
}
