//! Finite-type root data, their Weyl groups and Langlands duality.
//!
//! Both lattices are presented as `ℤⁿ` with the standard dot product as the
//! pairing `⟨X*, X_*⟩`. The Cartan matrix convention is
//! `cartan[i][j] = ⟨α_j, α_i∨⟩`.
//!
//! * adjoint type: simple roots are the standard basis of `X*`, simple
//!   coroot `i` is row `i` of the Cartan matrix;
//! * simply connected type: simple coroots are the standard basis of `X_*`,
//!   simple root `j` is column `j` of the Cartan matrix.
//!
//! With this presentation [`RootDatum::langlands_dual`] is a pure swap of the
//! two sides.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatumError {
    #[error("unknown Cartan type {0:?}")]
    UnknownLabel(String),
    #[error("simple root index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("braid order needs two distinct indices, got {0} twice")]
    SameIndex(usize),
    #[error("word {0:?} is not reduced")]
    NotReduced(Vec<usize>),
}

/// Which of the two extreme lattices the datum is presented on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Isogeny {
    Adjoint,
    SimplyConnected,
}

impl Isogeny {
    pub fn dual(self) -> Self {
        match self {
            Isogeny::Adjoint => Isogeny::SimplyConnected,
            Isogeny::SimplyConnected => Isogeny::Adjoint,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Isogeny::Adjoint => "adjoint",
            Isogeny::SimplyConnected => "simply_connected",
        }
    }
}

impl std::str::FromStr for Isogeny {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "adjoint" | "ad" => Ok(Isogeny::Adjoint),
            "simply_connected" | "sc" => Ok(Isogeny::SimplyConnected),
            other => Err(format!("unknown isogeny tag {other:?}")),
        }
    }
}

/// Labels accepted by [`RootDatum::build`].
pub const SUPPORTED_LABELS: [&str; 9] = ["A1", "A1xA1", "A2", "A3", "B2", "C2", "G2", "B3", "C3"];

/// Small dense square integer matrix acting on column vectors.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        Self { n, data }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix must be square");
            data.extend_from_slice(row);
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.data[row * self.n + col]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        Self { n, data }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        IntMatrix { n, data }
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.data[i * self.n + j] * v[j]).sum()).collect()
    }

    /// `Mᵀ v` on real vectors, the action of the inverse element on points
    /// of the opposite lattice tensored with `ℂ`.
    pub(crate) fn apply_transpose<T>(&self, v: &[T]) -> Vec<T>
    where
        T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        (0..self.n)
            .map(|i| (0..self.n).fold(T::default(), |acc, j| acc + v[j] * self.data[j * self.n + i] as f64))
            .collect()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.n)).finish()
    }
}

pub fn pairing(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A vector with half-integer entries, stored doubled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfIntVector {
    doubled: Vec<i64>,
}

impl HalfIntVector {
    pub fn doubled(&self) -> &[i64] {
        &self.doubled
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.doubled.iter().map(|&d| d as f64 / 2.0).collect()
    }

    /// Pairing with an integer vector of the opposite lattice, as `(numerator, 2)`.
    pub fn pair_doubled(&self, other: &[i64]) -> i64 {
        pairing(&self.doubled, other)
    }

    pub fn pair(&self, other: &[i64]) -> f64 {
        self.pair_doubled(other) as f64 / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootDatum {
    label: String,
    isogeny: Isogeny,
    cartan: IntMatrix,
    simple_roots: Vec<Vec<i64>>,
    simple_coroots: Vec<Vec<i64>>,
    positive_roots: Vec<Vec<i64>>,
    positive_coroots: Vec<Vec<i64>>,
}

fn cartan_for(label: &str) -> Option<Vec<Vec<i64>>> {
    let m = match label {
        "A1" => vec![vec![2]],
        "A1xA1" => vec![vec![2, 0], vec![0, 2]],
        "A2" => vec![vec![2, -1], vec![-1, 2]],
        "A3" => vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]],
        // B_n: last simple root short; C_n is the transpose
        "B2" => vec![vec![2, -1], vec![-2, 2]],
        "C2" => vec![vec![2, -2], vec![-1, 2]],
        "B3" => vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -2, 2]],
        "C3" => vec![vec![2, -1, 0], vec![-1, 2, -2], vec![0, -1, 2]],
        // first simple root short
        "G2" => vec![vec![2, -3], vec![-1, 2]],
        _ => return None,
    };
    Some(m)
}

fn normalize_label(label: &str) -> String {
    label.trim().to_ascii_uppercase().replace(['×', '*', 'X'], "x").replace(' ', "")
}

fn dual_label(label: &str) -> String {
    match label {
        "B2" => "C2".into(),
        "C2" => "B2".into(),
        "B3" => "C3".into(),
        "C3" => "B3".into(),
        other => other.into(),
    }
}

impl RootDatum {
    /// Build one of the [`SUPPORTED_LABELS`] on the requested lattice.
    pub fn build(label: &str, isogeny: Isogeny) -> Result<Self, DatumError> {
        let label = normalize_label(label);
        let rows = cartan_for(&label).ok_or_else(|| DatumError::UnknownLabel(label.clone()))?;
        let cartan = IntMatrix::from_rows(&rows);
        let n = cartan.dim();
        let basis = |i: usize| -> Vec<i64> { (0..n).map(|k| i64::from(k == i)).collect() };
        let (simple_roots, simple_coroots) = match isogeny {
            Isogeny::Adjoint => ((0..n).map(basis).collect(), cartan.rows()),
            Isogeny::SimplyConnected => {
                ((0..n).map(|j| (0..n).map(|i| cartan.get(i, j)).collect()).collect(), (0..n).map(basis).collect())
            }
        };
        Ok(Self::from_simple(label, isogeny, cartan, simple_roots, simple_coroots))
    }

    fn from_simple(
        label: String,
        isogeny: Isogeny,
        cartan: IntMatrix,
        simple_roots: Vec<Vec<i64>>,
        simple_coroots: Vec<Vec<i64>>,
    ) -> Self {
        let (positive_roots, positive_coroots) = positive_system(&simple_roots, &simple_coroots);
        Self { label, isogeny, cartan, simple_roots, simple_coroots, positive_roots, positive_coroots }
    }

    /// Swap `X*` and `X_*`, roots and coroots. The Cartan matrix transposes.
    pub fn langlands_dual(&self) -> Self {
        Self::from_simple(
            dual_label(&self.label),
            self.isogeny.dual(),
            self.cartan.transpose(),
            self.simple_coroots.clone(),
            self.simple_roots.clone(),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn isogeny(&self) -> Isogeny {
        self.isogeny
    }

    pub fn rank(&self) -> usize {
        self.cartan.dim()
    }

    pub fn cartan(&self) -> &IntMatrix {
        &self.cartan
    }

    pub fn simple_root(&self, i: usize) -> &[i64] {
        &self.simple_roots[i]
    }

    pub fn simple_coroot(&self, i: usize) -> &[i64] {
        &self.simple_coroots[i]
    }

    pub fn simple_roots(&self) -> &[Vec<i64>] {
        &self.simple_roots
    }

    pub fn simple_coroots(&self) -> &[Vec<i64>] {
        &self.simple_coroots
    }

    /// Positive roots, ordered by height. Entry `k` of
    /// [`positive_coroots`](Self::positive_coroots) is the matching coroot.
    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.positive_roots
    }

    pub fn positive_coroots(&self) -> &[Vec<i64>] {
        &self.positive_coroots
    }

    pub fn pairing(&self, root: &[i64], coroot: &[i64]) -> i64 {
        pairing(root, coroot)
    }

    pub fn check_index(&self, i: usize) -> Result<(), DatumError> {
        if i < self.rank() {
            Ok(())
        } else {
            Err(DatumError::IndexOutOfRange { index: i, rank: self.rank() })
        }
    }

    /// Matrix of `s_i` on `X*`: `μ ↦ μ − ⟨μ, α_i∨⟩ α_i`.
    pub fn reflection_on_star(&self, i: usize) -> IntMatrix {
        reflection(&self.simple_roots[i], &self.simple_coroots[i])
    }

    /// Matrix of `s_i` on `X_*`: `c ↦ c − ⟨α_i, c⟩ α_i∨`.
    pub fn reflection_on_costar(&self, i: usize) -> IntMatrix {
        reflection(&self.simple_coroots[i], &self.simple_roots[i])
    }

    /// `ρ` and `ρ∨`, half the sums of the positive roots and coroots.
    pub fn rho_vectors(&self) -> (HalfIntVector, HalfIntVector) {
        let n = self.rank();
        let sum = |vs: &[Vec<i64>]| {
            let mut acc = vec![0; n];
            for v in vs {
                for (a, x) in acc.iter_mut().zip(v) {
                    *a += x;
                }
            }
            HalfIntVector { doubled: acc }
        };
        (sum(&self.positive_roots), sum(&self.positive_coroots))
    }

    /// Order `m_ij` of `s_i s_j`.
    pub fn braid_order(&self, i: usize, j: usize) -> Result<usize, DatumError> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(DatumError::SameIndex(i));
        }
        Ok(match self.cartan.get(i, j) * self.cartan.get(j, i) {
            0 => 2,
            1 => 3,
            2 => 4,
            3 => 6,
            p => unreachable!("finite type has a_ij a_ji <= 3, got {p}"),
        })
    }

    /// Cartan type of the rank-2 subsystem spanned by `α_i`, `α_j`.
    pub fn rank_two_label(&self, i: usize, j: usize) -> Result<&'static str, DatumError> {
        Ok(match self.braid_order(i, j)? {
            2 => "A1xA1",
            3 => "A2",
            4 => "B2",
            _ => "G2",
        })
    }
}

fn reflection(root: &[i64], coroot: &[i64]) -> IntMatrix {
    // acts on the lattice containing `root`
    let n = root.len();
    let mut data = vec![0; n * n];
    for c in 0..n {
        let coeff = coroot[c];
        for r in 0..n {
            data[r * n + c] = i64::from(r == c) - coeff * root[r];
        }
    }
    IntMatrix { n, data }
}

fn positive_system(roots: &[Vec<i64>], coroots: &[Vec<i64>]) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let n = roots.len();
    // (root, coroot, coefficients in the simple-root basis)
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut queue: VecDeque<(Vec<i64>, Vec<i64>, Vec<i64>)> = VecDeque::new();
    let mut all = Vec::new();
    for i in 0..n {
        let coeffs = (0..n).map(|k| i64::from(k == i)).collect();
        seen.insert(roots[i].clone());
        queue.push_back((roots[i].clone(), coroots[i].clone(), coeffs));
    }
    while let Some((beta, beta_v, coeffs)) = queue.pop_front() {
        for j in 0..n {
            let a = pairing(&beta, &coroots[j]);
            let b = pairing(&roots[j], &beta_v);
            let r: Vec<i64> = beta.iter().zip(&roots[j]).map(|(x, y)| x - a * y).collect();
            if seen.insert(r.clone()) {
                let rv = beta_v.iter().zip(&coroots[j]).map(|(x, y)| x - b * y).collect();
                let mut c = coeffs.clone();
                c[j] -= a;
                queue.push_back((r, rv, c));
            }
        }
        all.push((beta, beta_v, coeffs));
    }
    let mut positive: Vec<_> = all.into_iter().filter(|(_, _, c)| c.iter().all(|&x| x >= 0)).collect();
    positive.sort_by(|a, b| {
        let ha: i64 = a.2.iter().sum();
        let hb: i64 = b.2.iter().sum();
        ha.cmp(&hb).then_with(|| b.2.cmp(&a.2))
    });
    positive.into_iter().map(|(r, rv, _)| (r, rv)).unzip()
}

/// An element of `W` with one fixed reduced word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylElement {
    word: Vec<usize>,
    mat_on_star: IntMatrix,
    mat_on_costar: IntMatrix,
}

impl WeylElement {
    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn mat_on_star(&self) -> &IntMatrix {
        &self.mat_on_star
    }

    pub fn mat_on_costar(&self) -> &IntMatrix {
        &self.mat_on_costar
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    /// Word with 1-based indices, e.g. `s1s2` or `e`.
    pub fn name(&self) -> String {
        if self.word.is_empty() {
            "e".into()
        } else {
            self.word.iter().map(|i| format!("s{}", i + 1)).collect()
        }
    }
}

/// The finite Weyl group of a root datum, with its multiplication table.
///
/// Elements are addressed by index; index 0 is the identity and indices
/// are in breadth-first order, so shorter elements come first.
#[derive(Debug, Clone)]
pub struct WeylGroup {
    datum: RootDatum,
    elements: Vec<WeylElement>,
    lookup: HashMap<IntMatrix, usize>,
    mult: Vec<usize>,
    inverse: Vec<usize>,
    generators: Vec<usize>,
}

impl WeylGroup {
    /// Enumerate `W` by breadth-first closure under right multiplication by
    /// simple reflections.
    pub fn new(datum: RootDatum) -> Self {
        let n = datum.rank();
        let star: Vec<IntMatrix> = (0..n).map(|i| datum.reflection_on_star(i)).collect();
        let costar: Vec<IntMatrix> = (0..n).map(|i| datum.reflection_on_costar(i)).collect();

        let mut elements = vec![WeylElement {
            word: Vec::new(),
            mat_on_star: IntMatrix::identity(n),
            mat_on_costar: IntMatrix::identity(n),
        }];
        let mut lookup = HashMap::from([(IntMatrix::identity(n), 0usize)]);
        let mut head = 0;
        while head < elements.len() {
            for i in 0..n {
                let m = elements[head].mat_on_star.mul(&star[i]);
                if lookup.contains_key(&m) {
                    continue;
                }
                let mut word = elements[head].word.clone();
                word.push(i);
                let mc = elements[head].mat_on_costar.mul(&costar[i]);
                lookup.insert(m.clone(), elements.len());
                elements.push(WeylElement { word, mat_on_star: m, mat_on_costar: mc });
            }
            head += 1;
        }

        let size = elements.len();
        let mut mult = vec![0; size * size];
        let mut inverse = vec![0; size];
        for a in 0..size {
            for b in 0..size {
                let m = elements[a].mat_on_star.mul(&elements[b].mat_on_star);
                let c = lookup[&m];
                mult[a * size + b] = c;
                if c == 0 {
                    inverse[a] = b;
                }
            }
        }
        let generators = (0..n).map(|i| lookup[&star[i]]).collect();
        Self { datum, elements, lookup, mult, inverse, generators }
    }

    pub fn datum(&self) -> &RootDatum {
        &self.datum
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[WeylElement] {
        &self.elements
    }

    pub fn element(&self, w: usize) -> &WeylElement {
        &self.elements[w]
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn generator(&self, i: usize) -> usize {
        self.generators[i]
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.elements.len() + b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn index_of(&self, mat_on_star: &IntMatrix) -> Option<usize> {
        self.lookup.get(mat_on_star).copied()
    }

    /// Product of the simple reflections in `word`, left to right.
    pub fn from_word(&self, word: &[usize]) -> Result<usize, DatumError> {
        let mut w = self.identity();
        for &i in word {
            self.datum.check_index(i)?;
            w = self.mul(w, self.generators[i]);
        }
        Ok(w)
    }

    /// The element of `word`, or [`DatumError::NotReduced`] if some prefix
    /// fails to increase the length.
    pub fn from_reduced_word(&self, word: &[usize]) -> Result<usize, DatumError> {
        let w = self.from_word(word)?;
        if self.elements[w].length() != word.len() {
            return Err(DatumError::NotReduced(word.to_vec()));
        }
        Ok(w)
    }

    pub fn longest(&self) -> usize {
        self.elements.len() - 1
    }

    /// All reduced words of `w`, lexicographically sorted.
    pub fn reduced_words(&self, w: usize) -> Vec<Vec<usize>> {
        if w == self.identity() {
            return vec![Vec::new()];
        }
        let len = self.elements[w].length();
        let mut out = Vec::new();
        for i in 0..self.rank() {
            // right descents: l(w s_i) < l(w)
            let shorter = self.mul(w, self.generators[i]);
            if self.elements[shorter].length() + 1 == len {
                for mut word in self.reduced_words(shorter) {
                    word.push(i);
                    out.push(word);
                }
            }
        }
        out.sort();
        out
    }

    /// `Φ(w) = wΦ⁻ ∩ Φ⁺`, the positive roots sent to negative roots by `w⁻¹`.
    pub fn inversion_set(&self, w: usize) -> Vec<Vec<i64>> {
        self.inversion_indices(w).into_iter().map(|k| self.datum.positive_roots[k].clone()).collect()
    }

    /// Indices into [`RootDatum::positive_roots`] of `Φ(w)`.
    pub fn inversion_indices(&self, w: usize) -> Vec<usize> {
        let w_inv = &self.elements[self.inverse(w)].mat_on_star;
        let positive: HashSet<&Vec<i64>> = self.datum.positive_roots.iter().collect();
        self.datum
            .positive_roots
            .iter()
            .enumerate()
            .filter(|(_, beta)| !positive.contains(&w_inv.apply(beta)))
            .map(|(k, _)| k)
            .collect()
    }
}

/// Every element of `W`, each with a fixed reduced word.
pub fn enumerate_weyl(datum: &RootDatum) -> Vec<WeylElement> {
    WeylGroup::new(datum.clone()).elements
}
