use super::Rect;

/// Two rects are similar when each of their four edges differs by at most
/// `0.2 ×` the mean side length of the pair.
fn similar(a: &Rect, b: &Rect) -> bool {
    let delta = 0.2 * (a.width + a.height + b.width + b.height) as f64 / 4.0;
    let d = |p: usize, q: usize| (p as f64 - q as f64).abs() <= delta;
    d(a.x, b.x) && d(a.y, b.y) && d(a.right(), b.right()) && d(a.bottom(), b.bottom())
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Clusters rects under the transitive closure of the similarity predicate
/// and keeps clusters with at least `min_neighbors` members, each reduced
/// to its member-wise mean. Returns `(rect, cluster size)` in order of each
/// cluster's first member. `min_neighbors == 0` disables grouping and every
/// input rect is returned with size 1.
pub fn group_rectangles_counted(rects: &[Rect], min_neighbors: usize) -> Vec<(Rect, usize)> {
    if min_neighbors == 0 {
        return rects.iter().map(|r| (*r, 1)).collect();
    }
    let n = rects.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if similar(&rects[i], &rects[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    // keep the earlier index as root so labels follow input order
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut order: Vec<usize> = Vec::new();
    let mut acc: std::collections::HashMap<usize, (usize, [usize; 4])> = Default::default();
    for (i, r) in rects.iter().enumerate() {
        let root = find(&mut parent, i);
        let e = acc.entry(root).or_insert_with(|| {
            order.push(root);
            (0, [0; 4])
        });
        e.0 += 1;
        e.1[0] += r.x;
        e.1[1] += r.y;
        e.1[2] += r.width;
        e.1[3] += r.height;
    }
    order
        .into_iter()
        .filter_map(|root| {
            let (count, s) = acc[&root];
            if count < min_neighbors {
                return None;
            }
            let mean = |v: usize| (v as f64 / count as f64).round() as usize;
            Some((Rect::new(mean(s[0]), mean(s[1]), mean(s[2]), mean(s[3])), count))
        })
        .collect()
}

/// [`group_rectangles_counted`] sorted by descending cluster size, then
/// position, without the counts.
pub fn group_rectangles(rects: &[Rect], min_neighbors: usize) -> Vec<Rect> {
    let mut g = group_rectangles_counted(rects, min_neighbors);
    g.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| (a.0.y, a.0.x, a.0.width, a.0.height).cmp(&(b.0.y, b.0.x, b.0.width, b.0.height))));
    g.into_iter().map(|(r, _)| r).collect()
}
