//! Sparse vectors and a union-find, shared by the resolution and Tor engines.

/// `(position, value)` pairs with strictly increasing positions and nonzero values.
pub type SparseVec = Vec<(u32, u32)>;

pub(crate) fn to_sparse(v: &[u32]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(i, &x)| (i as u32, x))
        .collect()
}

pub(crate) fn to_dense(v: &[(u32, u32)], len: usize) -> Vec<u32> {
    let mut out = vec![0u32; len];
    for &(i, x) in v {
        out[i as usize] = x;
    }
    out
}

/// A dense accumulator that remembers which slots were touched.
pub(crate) struct Scratch {
    acc: Vec<u64>,
    touched: Vec<u32>,
}

impl Scratch {
    pub(crate) fn new() -> Self {
        Scratch {
            acc: Vec::new(),
            touched: Vec::new(),
        }
    }

    pub(crate) fn ensure(&mut self, len: usize) {
        if self.acc.len() < len {
            self.acc.resize(len, 0);
        }
    }

    #[inline]
    pub(crate) fn add(&mut self, pos: usize, v: u64, p: u64) {
        let slot = &mut self.acc[pos];
        if *slot == 0 {
            self.touched.push(pos as u32);
        }
        // keep slots nonzero while touched: store value + p·[value == 0]
        *slot = (*slot % p + v % p) % p + p;
    }

    /// Drains into a sorted sparse vector, resetting the accumulator.
    pub(crate) fn drain(&mut self, p: u64) -> SparseVec {
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &i in &self.touched {
            let v = self.acc[i as usize] % p;
            self.acc[i as usize] = 0;
            if v != 0 {
                out.push((i, v as u32));
            }
        }
        self.touched.clear();
        out
    }
}

pub(crate) struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let gp = self.parent[self.parent[x] as usize];
            self.parent[x] = gp;
            x = gp as usize;
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins so that labels are deterministic
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo as u32;
        }
    }

    /// Groups of elements, ordered by their smallest member; members ascend.
    pub(crate) fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut slot = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            let r = self.find(x);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(x);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scratch_accumulates_mod_p() {
        let mut s = Scratch::new();
        s.ensure(5);
        s.add(3, 4, 5);
        s.add(1, 2, 5);
        s.add(3, 1, 5);
        s.add(1, 1, 5);
        assert_eq!(s.drain(5), vec![(1, 3)]);
        assert_eq!(s.drain(5), vec![]);
    }

    #[test]
    fn union_find_groups() {
        let mut uf = UnionFind::new(6);
        uf.union(4, 1);
        uf.union(5, 3);
        uf.union(3, 0);
        assert_eq!(uf.groups(), vec![vec![0, 3, 5], vec![1, 4], vec![2]]);
    }

    #[test]
    fn dense_round_trip() {
        let v = vec![0, 3, 0, 1];
        assert_eq!(to_dense(&to_sparse(&v), 4), v);
    }
}
