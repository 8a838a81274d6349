use std::collections::HashMap;

type Key = (i64, i64, i64);

/// Uniform-cell hash of points in the ambient space, for chordal range
/// queries.
pub(crate) struct SpatialIndex {
    cell: f64,
    cells: HashMap<Key, Vec<u32>>,
    keys: Vec<Key>,
    coords: Vec<[f64; 3]>,
}

impl SpatialIndex {
    pub fn new(coords: Vec<[f64; 3]>, cell: f64) -> Self {
        let cell = cell.max(1e-9);
        let mut cells: HashMap<Key, Vec<u32>> = HashMap::new();
        for (i, c) in coords.iter().enumerate() {
            cells.entry(key(c, cell)).or_default().push(i as u32);
        }
        let keys: Vec<Key> = cells.keys().copied().collect();
        Self { cell, cells, keys, coords }
    }

    pub fn insert(&mut self, c: [f64; 3]) -> usize {
        let i = self.coords.len();
        let k = key(&c, self.cell);
        let ids = self.cells.entry(k).or_insert_with(|| {
            self.keys.push(k);
            Vec::new()
        });
        ids.push(i as u32);
        self.coords.push(c);
        i
    }

    /// Calls `f(i)` for every indexed point within chordal distance `radius`
    /// of `c`.
    pub fn for_each_within<F: FnMut(usize)>(&self, c: &[f64; 3], radius: f64, mut f: F) {
        let r2 = radius * radius * (1.0 + 1e-12) + 1e-300;
        let lo = key(&[c[0] - radius, c[1] - radius, c[2] - radius], self.cell);
        let hi = key(&[c[0] + radius, c[1] + radius, c[2] + radius], self.cell);
        let span = |a: i64, b: i64| (b - a + 1) as f64;
        let boxed = span(lo.0, hi.0) * span(lo.1, hi.1) * span(lo.2, hi.2);
        let mut visit = |ids: &Vec<u32>| {
            for &i in ids {
                let p = &self.coords[i as usize];
                let d2 = (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) + (p[2] - c[2]).powi(2);
                if d2 <= r2 {
                    f(i as usize);
                }
            }
        };
        if boxed > self.keys.len() as f64 {
            for k in &self.keys {
                if k.0 >= lo.0 && k.0 <= hi.0 && k.1 >= lo.1 && k.1 <= hi.1 && k.2 >= lo.2 && k.2 <= hi.2 {
                    visit(&self.cells[k]);
                }
            }
        } else {
            for x in lo.0..=hi.0 {
                for y in lo.1..=hi.1 {
                    for z in lo.2..=hi.2 {
                        if let Some(ids) = self.cells.get(&(x, y, z)) {
                            visit(ids);
                        }
                    }
                }
            }
        }
    }
}

fn key(c: &[f64; 3], cell: f64) -> Key {
    ((c[0] / cell).floor() as i64, (c[1] / cell).floor() as i64, (c[2] / cell).floor() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_query_matches_brute_force() {
        let pts: Vec<[f64; 3]> = (0..500)
            .map(|i| {
                let t = i as f64 * 0.7;
                let z = (i as f64 / 500.0) * 2.0 - 1.0;
                let r = (1.0 - z * z).sqrt();
                [r * t.cos(), r * t.sin(), z]
            })
            .collect();
        for cell in [0.05, 0.3, 3.0] {
            let idx = SpatialIndex::new(pts.clone(), cell);
            for q in [0usize, 100, 333] {
                for radius in [0.01, 0.2, 1.0, 2.5] {
                    let mut got = Vec::new();
                    idx.for_each_within(&pts[q], radius, |i| got.push(i));
                    got.sort_unstable();
                    let want: Vec<usize> = (0..pts.len())
                        .filter(|&i| {
                            let d2: f64 = (0..3).map(|k| (pts[i][k] - pts[q][k]).powi(2)).sum();
                            d2 <= radius * radius * (1.0 + 1e-12)
                        })
                        .collect();
                    assert_eq!(got, want);
                }
            }
        }
    }

    #[test]
    fn inserted_points_are_found() {
        let mut idx = SpatialIndex::new(Vec::new(), 0.1);
        idx.insert([1.0, 0.0, 0.0]);
        idx.insert([0.0, 1.0, 0.0]);
        let mut got = Vec::new();
        idx.for_each_within(&[0.99, 0.0, 0.0], 0.05, |i| got.push(i));
        assert_eq!(got, vec![0]);
    }
}
