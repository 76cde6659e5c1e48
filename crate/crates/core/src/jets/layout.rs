//! Dense graded-lexicographic enumeration of multi-indices, shared between
//! all jets with the same `(num_vars, order)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Debug)]
pub(crate) struct Layout {
    pub nvars: usize,
    pub order: usize,
    pub exps: Vec<Vec<u16>>,
    /// `deg_start[d]..deg_start[d + 1]` are the monomials of degree `d`.
    pub deg_start: Vec<usize>,
    index: HashMap<Vec<u16>, usize>,
    /// `(i, j, k)` with `exps[i] + exps[j] = exps[k]`.
    pub mul_table: Vec<(u32, u32, u32)>,
    /// Per variable: `(src, dst, factor)` for the formal partial derivative.
    pub partial: Vec<Vec<(u32, u32, f64)>>,
    /// Per variable: `(src, dst, factor)` for the antiderivative vanishing on `t_i = 0`.
    pub integral: Vec<Vec<(u32, u32, f64)>>,
}

impl Layout {
    fn build(nvars: usize, order: usize) -> Layout {
        let mut exps = Vec::new();
        let mut degree = Vec::new();
        let mut deg_start = Vec::with_capacity(order + 2);
        for d in 0..=order {
            deg_start.push(exps.len());
            let mut cur = vec![0u16; nvars];
            push_compositions(d, 0, &mut cur, &mut exps);
            degree.resize(exps.len(), d);
        }
        deg_start.push(exps.len());

        let index: HashMap<Vec<u16>, usize> = exps
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();

        let mut mul_table = Vec::new();
        let mut sum = vec![0u16; nvars];
        for i in 0..exps.len() {
            for j in 0..deg_start[order - degree[i] + 1] {
                for v in 0..nvars {
                    sum[v] = exps[i][v] + exps[j][v];
                }
                mul_table.push((i as u32, j as u32, index[&sum] as u32));
            }
        }

        let mut partial = vec![Vec::new(); nvars];
        let mut integral = vec![Vec::new(); nvars];
        for (src, e) in exps.iter().enumerate() {
            for v in 0..nvars {
                if e[v] > 0 {
                    let mut lower = e.clone();
                    lower[v] -= 1;
                    partial[v].push((src as u32, index[&lower] as u32, e[v] as f64));
                }
                if degree[src] < order {
                    let mut upper = e.clone();
                    upper[v] += 1;
                    integral[v].push((src as u32, index[&upper] as u32, 1.0 / (e[v] as f64 + 1.0)));
                }
            }
        }

        Layout {
            nvars,
            order,
            exps,
            deg_start,
            index,
            mul_table,
            partial,
            integral,
        }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn index_of(&self, exp: &[u16]) -> Option<usize> {
        self.index.get(exp).copied()
    }
}

// Lexicographically descending compositions of `remaining` into the slots `pos..`.
fn push_compositions(remaining: usize, pos: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
    let n = cur.len();
    if n == 0 {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if pos == n - 1 {
        cur[pos] = remaining as u16;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    for k in (0..=remaining).rev() {
        cur[pos] = k as u16;
        push_compositions(remaining - k, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

type Cache = Mutex<HashMap<(usize, usize), Arc<Layout>>>;

pub(crate) fn layout(nvars: usize, order: usize) -> Arc<Layout> {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("layout cache poisoned");
    map.entry((nvars, order))
        .or_insert_with(|| Arc::new(Layout::build(nvars, order)))
        .clone()
}
