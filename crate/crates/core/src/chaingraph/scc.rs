//! Iterative Tarjan, safe for graphs far deeper than the call stack.

/// Strongly connected classes of `succ`, each sorted, ordered by smallest
/// member, plus the class id of every node.
pub(crate) fn strongly_connected(succ: &[Vec<usize>]) -> (Vec<Vec<usize>>, Vec<usize>) {
    const UNSEEN: usize = usize::MAX;
    let n = succ.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut next = 0usize;
    // (node, position in its successor list)
    let mut frames: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        frames.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(frame) = frames.last_mut() {
            let v = frame.0;
            if let Some(&w) = succ[v].get(frame.1) {
                frame.1 += 1;
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            frames.pop();
            if let Some(&(parent, _)) = frames.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut class = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    class.push(w);
                    if w == v {
                        break;
                    }
                }
                class.sort_unstable();
                classes.push(class);
            }
        }
    }

    classes.sort_unstable_by_key(|c| c[0]);
    let mut class_of = vec![0usize; n];
    for (k, c) in classes.iter().enumerate() {
        for &v in c {
            class_of[v] = k;
        }
    }
    (classes, class_of)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycles_and_a_tail() {
        let succ = vec![vec![1], vec![0, 2], vec![3], vec![2], vec![]];
        let (classes, of) = strongly_connected(&succ);
        assert_eq!(classes, vec![vec![0, 1], vec![2, 3], vec![4]]);
        assert_eq!(of, vec![0, 0, 1, 1, 2]);
    }

    #[test]
    fn long_path_does_not_overflow() {
        let n = 200_000;
        let succ: Vec<Vec<usize>> = (0..n).map(|i| vec![(i + 1) % n]).collect();
        let (classes, _) = strongly_connected(&succ);
        assert_eq!(classes.len(), 1);
    }
}
