use crate::error::{Error, Result};
use crate::linalg::{c, identity, kron, CMat};

/// Product space of two truncated transmons, control index major:
/// `|n1 n2⟩ ↦ n1 * levels + n2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertSpace {
    levels: usize,
}

impl HilbertSpace {
    pub fn new(levels: usize) -> Result<Self> {
        if levels < 2 {
            return Err(Error::config("levels", "at least two levels per transmon"));
        }
        Ok(HilbertSpace { levels })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn dimension(&self) -> usize {
        self.levels * self.levels
    }

    pub fn index(&self, n1: usize, n2: usize) -> usize {
        n1 * self.levels + n2
    }

    pub fn labels(&self, k: usize) -> (usize, usize) {
        (k / self.levels, k % self.levels)
    }

    /// Indices of `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub fn computational(&self) -> [usize; 4] {
        [self.index(0, 0), self.index(0, 1), self.index(1, 0), self.index(1, 1)]
    }

    /// Single-transmon lowering operator.
    pub fn lowering(&self) -> CMat {
        let l = self.levels;
        let mut a = CMat::zeros(l, l);
        for n in 1..l {
            a[(n - 1, n)] = c((n as f64).sqrt(), 0.0);
        }
        a
    }

    /// Lowering operator of transmon `q` (1 = control, 2 = target) on the full space.
    pub fn a(&self, q: usize) -> CMat {
        let id = identity(self.levels);
        match q {
            1 => kron(&self.lowering(), &id),
            2 => kron(&id, &self.lowering()),
            _ => panic!("transmon index must be 1 or 2"),
        }
    }

    pub fn number(&self, q: usize) -> CMat {
        let a = self.a(q);
        a.adjoint() * a
    }

    /// Embed a 4×4 computational-subspace operator, acting as identity on the
    /// leakage states.
    pub fn embed_unitary(&self, u4: &CMat) -> CMat {
        let d = self.dimension();
        let comp = self.computational();
        let mut u = identity(d);
        for &k in &comp {
            u[(k, k)] = c(0.0, 0.0);
        }
        for (i, &ki) in comp.iter().enumerate() {
            for (j, &kj) in comp.iter().enumerate() {
                u[(ki, kj)] = u4[(i, j)];
            }
        }
        u
    }

    /// Embed a 4×4 operator with zeros outside the computational block.
    pub fn embed_block(&self, m4: &CMat) -> CMat {
        let d = self.dimension();
        let comp = self.computational();
        let mut m = CMat::zeros(d, d);
        for (i, &ki) in comp.iter().enumerate() {
            for (j, &kj) in comp.iter().enumerate() {
                m[(ki, kj)] = m4[(i, j)];
            }
        }
        m
    }

    /// Computational 4×4 block of a full-space operator.
    pub fn project(&self, m: &CMat) -> CMat {
        let comp = self.computational();
        CMat::from_fn(4, 4, |i, j| m[(comp[i], comp[j])])
    }
}
