//! Depth-first cycle handling over dense parent lists.

const WHITE: u8 = 0;
const GRAY: u8 = 1;
const BLACK: u8 = 2;

/// Walks every node in index order and reports each edge that closes a
/// cycle, together with the stack path that witnesses it.
fn walk_back_edges(parents: &[Vec<u32>], mut on_back_edge: impl FnMut(u32, u32, &[u32]) -> bool) {
    let n = parents.len();
    let mut color = vec![WHITE; n];
    let mut stack: Vec<(u32, usize)> = Vec::new();
    let mut path: Vec<u32> = Vec::new();

    for start in 0..n as u32 {
        if color[start as usize] != WHITE {
            continue;
        }
        color[start as usize] = GRAY;
        stack.push((start, 0));
        path.push(start);
        while let Some(top) = stack.last_mut() {
            let (node, next) = *top;
            let ps = &parents[node as usize];
            if next < ps.len() {
                top.1 += 1;
                let parent = ps[next];
                match color[parent as usize] {
                    WHITE => {
                        color[parent as usize] = GRAY;
                        stack.push((parent, 0));
                        path.push(parent);
                    }
                    GRAY if !on_back_edge(node, parent, &path) => return,
                    _ => {}
                }
            } else {
                color[node as usize] = BLACK;
                stack.pop();
                path.pop();
            }
        }
    }
}

/// Returns a cycle as a node sequence `[x, .., x]` if one exists.
pub(crate) fn find_cycle(parents: &[Vec<u32>]) -> Option<Vec<u32>> {
    let mut witness = None;
    walk_back_edges(parents, |child, parent, path| {
        let from = path.iter().rposition(|&p| p == parent).unwrap_or(0);
        let mut cycle: Vec<u32> = path[from..].to_vec();
        debug_assert_eq!(*cycle.last().unwrap(), child);
        cycle.push(parent);
        witness = Some(cycle);
        false
    });
    witness
}

/// Removes every back edge found by a depth-first walk in index order,
/// leaving an acyclic graph. Returns the removed `(child, parent)` edges.
pub(crate) fn break_back_edges(parents: &mut [Vec<u32>]) -> Vec<(u32, u32)> {
    let mut removed = Vec::new();
    walk_back_edges(parents, |child, parent, _| {
        removed.push((child, parent));
        true
    });
    for &(child, parent) in &removed {
        parents[child as usize].retain(|&p| p != parent);
    }
    removed
}
