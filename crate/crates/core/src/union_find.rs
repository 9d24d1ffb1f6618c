//! Disjoint sets with path halving, union by size, per-set minimum element and
//! circular member lists (O(1) splice on union, O(size) enumeration).

#[derive(Clone, Debug, Default)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
    min: Vec<u32>,
    next: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        let ids: Vec<u32> = (0..n as u32).collect();
        UnionFind { parent: ids.clone(), size: vec![1; n], min: ids.clone(), next: ids }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Append a fresh singleton and return its id.
    pub fn push(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.push_keyed(id)
    }

    /// Append a singleton whose minimum is tracked through `key` instead of its
    /// id (e.g. the site of an incarnation node).
    pub fn push_keyed(&mut self, key: u32) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        self.size.push(1);
        self.min.push(key);
        self.next.push(id);
        id
    }

    #[inline]
    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let gp = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    /// Merge the sets of `a` and `b`; returns the new root.
    pub fn union(&mut self, a: u32, b: u32) -> u32 {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return ra;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        self.min[ra as usize] = self.min[ra as usize].min(self.min[rb as usize]);
        self.next.swap(ra as usize, rb as usize);
        ra
    }

    /// Size of the set whose root is `root`.
    #[inline]
    pub fn size_of_root(&self, root: u32) -> u32 {
        self.size[root as usize]
    }

    /// Smallest key in the set whose root is `root`.
    #[inline]
    pub fn min_of_root(&self, root: u32) -> u32 {
        self.min[root as usize]
    }

    /// Members of the set containing `x`, in list order.
    pub fn members(&self, x: u32) -> Vec<u32> {
        let mut out = vec![x];
        let mut cur = self.next[x as usize];
        while cur != x {
            out.push(cur);
            cur = self.next[cur as usize];
        }
        out
    }
}
