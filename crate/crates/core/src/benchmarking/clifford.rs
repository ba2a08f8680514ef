//! Two-qubit Clifford group, enumerated once and indexed by signed tableau.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::OnceLock;

use rand::Rng;

use crate::linalg::{c, identity, kron, pauli, pauli2, trace, CMat};

/// Order of the two-qubit Clifford group modulo global phase.
pub const GROUP_ORDER: usize = 11_520;
/// Order of Sp(4, 2), the sign-free quotient.
pub const SYMPLECTIC_ORDER: usize = 720;

/// Pauli operator `i^phase · ⊗_q X^{x_q} Z^{z_q}`; bit 1 is the control, bit 0 the target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pauli {
    pub x: u8,
    pub z: u8,
    pub phase: u8,
}

impl Pauli {
    pub const IDENTITY: Pauli = Pauli { x: 0, z: 0, phase: 0 };

    /// Hermitian Pauli with sign `±1` from the `pauli2` index (control-first).
    pub fn from_index(k: usize, negative: bool) -> Self {
        let (mut x, mut z) = (0u8, 0u8);
        for (bit, p) in [(1u8, k / 4), (0u8, k % 4)] {
            let (px, pz) = match p {
                0 => (0, 0),
                1 => (1, 0),
                2 => (1, 1),
                _ => (0, 1),
            };
            x |= px << bit;
            z |= pz << bit;
        }
        let ys = (x & z).count_ones() as u8;
        Pauli {
            x,
            z,
            phase: (ys + if negative { 2 } else { 0 }) % 4,
        }
    }

    /// `pauli2` index and sign; `None` if the operator is not Hermitian.
    pub fn to_index(self) -> Option<(usize, bool)> {
        let rel = (self.phase + 4 - (self.x & self.z).count_ones() as u8) % 4;
        if rel % 2 == 1 {
            return None;
        }
        let single = |bit: u8| match ((self.x >> bit) & 1, (self.z >> bit) & 1) {
            (0, 0) => 0,
            (1, 0) => 1,
            (1, 1) => 2,
            _ => 3,
        };
        Some((4 * single(1) + single(0), rel == 2))
    }

    pub fn times(self, rhs: Pauli) -> Pauli {
        // (X^a Z^b)(X^c Z^d) = (-1)^{b·c} X^{a+c} Z^{b+d}
        let swaps = (self.z & rhs.x).count_ones() as u8;
        Pauli {
            x: self.x ^ rhs.x,
            z: self.z ^ rhs.z,
            phase: (self.phase + rhs.phase + 2 * swaps) % 4,
        }
    }

    pub fn matrix(self) -> CMat {
        let (k, neg) = self.to_index().expect("Hermitian Pauli");
        let m = pauli2(k);
        if neg {
            -m
        } else {
            m
        }
    }
}

/// Images of `X⊗I, Z⊗I, I⊗X, I⊗Z` under conjugation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Tableau {
    pub images: [Pauli; 4],
}

const GENERATORS: [(u8, u8); 4] = [(2, 0), (0, 2), (1, 0), (0, 1)];

impl Tableau {
    pub fn identity() -> Self {
        Tableau {
            images: GENERATORS.map(|(x, z)| Pauli { x, z, phase: 0 }),
        }
    }

    /// Tableau of `U·U†` conjugation. `None` if `u` is not Clifford.
    pub fn from_unitary(u: &CMat) -> Option<Self> {
        let mut images = [Pauli::IDENTITY; 4];
        for (slot, (x, z)) in images.iter_mut().zip(GENERATORS) {
            let g = Pauli { x, z, phase: 0 }.matrix();
            let m = u * g * u.adjoint();
            let (k, neg) = (1..16).find_map(|k| {
                let t = trace(&(pauli2(k) * &m)) / 4.0;
                ((t.norm() - 1.0).abs() < 1e-6).then_some((k, t.re < 0.0))
            })?;
            *slot = Pauli::from_index(k, neg);
        }
        Some(Tableau { images })
    }

    pub fn apply(&self, p: Pauli) -> Pauli {
        let mut out = Pauli {
            x: 0,
            z: 0,
            phase: p.phase,
        };
        // P = i^e X1^{x1} Z1^{z1} X2^{x2} Z2^{z2}
        for (img, (gx, gz)) in self.images.iter().zip(GENERATORS) {
            if (gx != 0 && p.x & gx != 0) || (gz != 0 && p.z & gz != 0) {
                out = out.times(*img);
            }
        }
        out
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Tableau) -> Tableau {
        Tableau {
            images: other.images.map(|p| self.apply(p)),
        }
    }

    /// 20-bit key including signs.
    pub fn key(&self) -> u32 {
        self.images.iter().fold(0u32, |acc, p| {
            let (k, neg) = p.to_index().expect("Hermitian image");
            (acc << 5) | ((k as u32) << 1) | neg as u32
        })
    }

    /// 16-bit key of the symplectic part only.
    pub fn symplectic_key(&self) -> u32 {
        self.images
            .iter()
            .fold(0u32, |acc, p| (acc << 4) | p.to_index().expect("Hermitian image").0 as u32)
    }
}

#[derive(Clone, Debug)]
pub struct Clifford {
    pub unitary: CMat,
    pub tableau: Tableau,
}

pub struct CliffordGroup {
    elements: Vec<Clifford>,
    index: HashMap<u32, usize>,
    inverse: Vec<usize>,
    class: Vec<usize>,
}

fn generators() -> Vec<CMat> {
    let h = pauli(1) + pauli(3);
    let h = h * c(FRAC_1_SQRT_2, 0.0);
    let mut s = identity(2);
    s[(1, 1)] = c(0.0, 1.0);
    let i2 = identity(2);
    let mut cnot = CMat::zeros(4, 4);
    for (r, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        cnot[(r, col)] = c(1.0, 0.0);
    }
    vec![kron(&h, &i2), kron(&i2, &h), kron(&s, &i2), kron(&i2, &s), cnot]
}

impl CliffordGroup {
    fn build() -> Self {
        let gens = generators();
        let mut elements = vec![Clifford {
            unitary: identity(4),
            tableau: Tableau::identity(),
        }];
        let mut index = HashMap::from([(Tableau::identity().key(), 0usize)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in &gens {
                let u = g * &elements[i].unitary;
                let t = Tableau::from_unitary(&u).expect("generators are Clifford");
                let key = t.key();
                if let std::collections::hash_map::Entry::Vacant(slot) = index.entry(key) {
                    slot.insert(elements.len());
                    queue.push_back(elements.len());
                    elements.push(Clifford { unitary: u, tableau: t });
                }
            }
        }
        let inverse = elements
            .iter()
            .map(|e| {
                let t = Tableau::from_unitary(&e.unitary.adjoint()).expect("Clifford inverse");
                index[&t.key()]
            })
            .collect();
        let mut classes = HashMap::new();
        let class = elements
            .iter()
            .map(|e| {
                let n = classes.len();
                *classes.entry(e.tableau.symplectic_key()).or_insert(n)
            })
            .collect();
        CliffordGroup {
            elements,
            index,
            inverse,
            class,
        }
    }

    /// Shared, lazily enumerated group.
    pub fn get() -> &'static CliffordGroup {
        static GROUP: OnceLock<CliffordGroup> = OnceLock::new();
        GROUP.get_or_init(CliffordGroup::build)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, i: usize) -> &Clifford {
        &self.elements[i]
    }

    pub fn lookup(&self, t: &Tableau) -> Option<usize> {
        self.index.get(&t.key()).copied()
    }

    /// Index of `a ∘ b` (apply `b` first).
    pub fn compose(&self, a: usize, b: usize) -> usize {
        let t = self.elements[a].tableau.compose(&self.elements[b].tableau);
        self.index[&t.key()]
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i]
    }

    /// Symplectic class label in `0..720`.
    pub fn class(&self, i: usize) -> usize {
        self.class[i]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.gen_range(0..self.elements.len())
    }

    /// Element returning the net action of `sequence` (applied in order) to identity.
    pub fn recovery(&self, sequence: &[usize]) -> usize {
        let net = sequence.iter().fold(0usize, |acc, &g| self.compose(g, acc));
        self.inverse(net)
    }
}

/// Uniformly random two-qubit Clifford.
pub fn sample_clifford<R: Rng + ?Sized>(rng: &mut R) -> &'static Clifford {
    let g = CliffordGroup::get();
    g.element(g.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    #[test]
    fn pauli_round_trip_and_products() {
        for k in 0..16 {
            for neg in [false, true] {
                let p = Pauli::from_index(k, neg);
                assert_eq!(p.to_index(), Some((k, neg)));
                let m = if neg { -pauli2(k) } else { pauli2(k) };
                assert!(max_abs_diff(&p.matrix(), &m) < 1e-15);
            }
        }
        // XY = iZ on the target
        let x = Pauli::from_index(1, false);
        let y = Pauli::from_index(2, false);
        let xy = x.times(y);
        assert_eq!(xy.x, 0);
        assert_eq!(xy.z, 1);
        assert_eq!(xy.to_index(), None);
        let zz = Pauli::from_index(15, false);
        assert_eq!(zz.times(zz), Pauli::IDENTITY);
    }

    #[test]
    fn group_has_expected_order() {
        let g = CliffordGroup::get();
        assert_eq!(g.len(), GROUP_ORDER);
        let classes: std::collections::HashSet<_> = (0..g.len()).map(|i| g.class(i)).collect();
        assert_eq!(classes.len(), SYMPLECTIC_ORDER);
    }

    #[test]
    fn tableau_matches_unitary_conjugation() {
        let g = CliffordGroup::get();
        for i in (0..g.len()).step_by(97) {
            let e = g.element(i);
            for k in 1..16 {
                let p = Pauli::from_index(k, false);
                let img = e.tableau.apply(p).matrix();
                let direct = &e.unitary * pauli2(k) * e.unitary.adjoint();
                assert!(max_abs_diff(&img, &direct) < 1e-9, "element {i}, pauli {k}");
            }
        }
    }

    #[test]
    fn inverse_composes_to_identity() {
        let g = CliffordGroup::get();
        for i in (0..g.len()).step_by(131) {
            assert_eq!(g.compose(g.inverse(i), i), 0);
            assert_eq!(g.compose(i, g.inverse(i)), 0);
        }
    }
}
