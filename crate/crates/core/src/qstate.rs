//! Dense state-vector engine: preparation, unitary application on qubit
//! subsets, measurement (branch enumeration and seeded sampling) and fidelity.
//!
//! Ordering convention, fixed project-wide: qubit 0 is the leftmost symbol in
//! ket notation, so the basis index of |ε0 ε1 … ε(n−1)⟩ is Σ ε_i · 2^(n−1−i).
//! A two-qubit ket |ε1 ε2⟩ therefore sits at index 2·ε1 + ε2.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Hard cap on register width; dense vectors are cheap at 2^8 = 256 amplitudes.
pub const MAX_QUBITS: usize = 8;
/// Normalization / unitarity tolerance.
pub const NORM_TOL: f64 = 1e-10;
/// Fidelity threshold for `equal_up_to_phase`.
pub const PHASE_EQ_TOL: f64 = 1e-9;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn ket_zero() -> [Complex64; 2] {
    [c(1.0, 0.0), c(0.0, 0.0)]
}

pub fn ket_one() -> [Complex64; 2] {
    [c(0.0, 0.0), c(1.0, 0.0)]
}

pub fn ket_plus() -> [Complex64; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [c(h, 0.0), c(h, 0.0)]
}

pub fn ket_minus() -> [Complex64; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [c(h, 0.0), c(-h, 0.0)]
}

/// Normalized register of `n` qubits. Operations return new values; a `QReg`
/// never mutates once constructed.
#[derive(Clone, Debug, PartialEq)]
pub struct QReg {
    n: usize,
    amps: Vec<Complex64>,
}

impl QReg {
    /// Builds a register from raw amplitudes, enforcing the invariants
    /// (length 2^n, unit norm within `NORM_TOL`).
    pub fn new(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        let dim = 1usize << n;
        if amps.len() != dim {
            return Err(Error::BadAmplitudeCount {
                got: amps.len(),
                expected: dim,
            });
        }
        let reg = QReg { n, amps };
        let dev = (reg.norm_sq() - 1.0).abs();
        if dev > NORM_TOL {
            return Err(Error::NotNormalized(dev));
        }
        Ok(reg)
    }

    /// Computational basis state |index⟩.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::QubitOutOfRange { index, n });
        }
        let mut amps = vec![c(0.0, 0.0); dim];
        amps[index] = c(1.0, 0.0);
        Ok(QReg { n, amps })
    }

    /// Tensor product of single-qubit states, qubit 0 first.
    pub fn prepare(qubits: &[[Complex64; 2]]) -> Result<Self> {
        if qubits.is_empty() || qubits.len() > MAX_QUBITS {
            return Err(Error::TooManyQubits(qubits.len()));
        }
        for q in qubits {
            let norm = q[0].norm_sqr() + q[1].norm_sqr();
            let dev = (norm - 1.0).abs();
            if dev > NORM_TOL {
                return Err(Error::NotNormalized(dev));
            }
        }
        let n = qubits.len();
        let mut amps = vec![c(1.0, 0.0)];
        for q in qubits {
            let mut next = Vec::with_capacity(amps.len() * 2);
            for a in &amps {
                next.push(a * q[0]);
                next.push(a * q[1]);
            }
            amps = next;
        }
        Ok(QReg { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n: self.n,
            });
        }
        Ok(())
    }

    /// Applies a 2^t-dimensional unitary to the ordered qubit subset
    /// `targets`; `targets[0]` is the most significant local bit, matching
    /// the global ordering convention.
    pub fn apply(&self, u: &Unitary, targets: &[usize]) -> Result<QReg> {
        let t = targets.len();
        if u.d() != 1usize << t {
            return Err(Error::DimensionMismatch(format!(
                "{}×{} unitary on {} target qubit(s)",
                u.d(),
                u.d(),
                t
            )));
        }
        for (i, &q) in targets.iter().enumerate() {
            self.check_qubit(q)?;
            if targets[..i].contains(&q) {
                return Err(Error::RepeatedTarget(q));
            }
        }
        let shifts: Vec<usize> = targets.iter().map(|&q| self.n - 1 - q).collect();
        let tmask: usize = shifts.iter().map(|s| 1usize << s).sum();
        let d = 1usize << t;
        let mut out = self.amps.clone();
        let mut local_idx = vec![0usize; d];
        for base in 0..self.dim() {
            if base & tmask != 0 {
                continue;
            }
            for (l, slot) in local_idx.iter_mut().enumerate() {
                let mut idx = base;
                for (j, &s) in shifts.iter().enumerate() {
                    idx |= ((l >> (t - 1 - j)) & 1) << s;
                }
                *slot = idx;
            }
            for (k, &row_idx) in local_idx.iter().enumerate() {
                let mut acc = c(0.0, 0.0);
                for (l, &col_idx) in local_idx.iter().enumerate() {
                    acc += u.get(k, l) * self.amps[col_idx];
                }
                out[row_idx] = acc;
            }
        }
        Ok(QReg {
            n: self.n,
            amps: out,
        })
    }

    /// Deterministic measurement of one qubit: both branches with their
    /// probabilities and renormalized post-states. A zero-probability branch
    /// carries no post-state.
    pub fn measure(&self, qubit: usize) -> Result<(MeasBranch, MeasBranch)> {
        self.check_qubit(qubit)?;
        let shift = self.n - 1 - qubit;
        let mut p = [0.0f64; 2];
        for (i, a) in self.amps.iter().enumerate() {
            p[(i >> shift) & 1] += a.norm_sqr();
        }
        let branch = |bit: usize| -> MeasBranch {
            let prob = p[bit];
            let post_state = if prob > 0.0 {
                let scale = 1.0 / prob.sqrt();
                let amps = self
                    .amps
                    .iter()
                    .enumerate()
                    .map(|(i, a)| {
                        if (i >> shift) & 1 == bit {
                            a * scale
                        } else {
                            c(0.0, 0.0)
                        }
                    })
                    .collect();
                Some(QReg { n: self.n, amps })
            } else {
                None
            };
            MeasBranch {
                qubit,
                bit: bit as u8,
                probability: prob,
                post_state,
            }
        };
        Ok((branch(0), branch(1)))
    }

    /// Samples one measurement branch with the stated probability from an
    /// explicit generator; every protocol run seeds its own.
    pub fn sample<R: Rng>(&self, qubit: usize, rng: &mut R) -> Result<MeasBranch> {
        let (b0, b1) = self.measure(qubit)?;
        let r: f64 = rng.gen();
        Ok(if r < b0.probability { b0 } else { b1 })
    }

    pub fn inner(&self, other: &QReg) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {} qubits",
                self.n, other.n
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &QReg) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// True iff the states agree up to a global phase
    /// (fidelity > 1 − 1e-9).
    pub fn equal_up_to_phase(&self, other: &QReg) -> Result<bool> {
        Ok(self.fidelity(other)? > 1.0 - PHASE_EQ_TOL)
    }

    /// ‖(⟨φ|_qubit ⊗ I)|self⟩‖², i.e. the overlap of the reduced state of
    /// `qubit` with a single-qubit target. Equals |⟨φ|ψ_q⟩|² whenever `qubit`
    /// is product-separable from the rest.
    pub fn single_qubit_overlap(&self, qubit: usize, target: &[Complex64; 2]) -> Result<f64> {
        self.check_qubit(qubit)?;
        let shift = self.n - 1 - qubit;
        let bit = 1usize << shift;
        let mut total = 0.0;
        for rest in 0..self.dim() {
            if rest & bit != 0 {
                continue;
            }
            let proj = target[0].conj() * self.amps[rest] + target[1].conj() * self.amps[rest | bit];
            total += proj.norm_sqr();
        }
        Ok(total)
    }

    /// Largest Schmidt coefficient of the bipartition {qubit} | rest;
    /// equals 1 exactly when the qubit is product-separable.
    pub fn largest_schmidt_coefficient(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let shift = self.n - 1 - qubit;
        let bit = 1usize << shift;
        // 2×2 Gram matrix of the two amplitude rows.
        let mut g00 = 0.0f64;
        let mut g11 = 0.0f64;
        let mut g01 = c(0.0, 0.0);
        for rest in 0..self.dim() {
            if rest & bit != 0 {
                continue;
            }
            let a0 = self.amps[rest];
            let a1 = self.amps[rest | bit];
            g00 += a0.norm_sqr();
            g11 += a1.norm_sqr();
            g01 += a0 * a1.conj();
        }
        let mean = 0.5 * (g00 + g11);
        let disc = (0.25 * (g00 - g11).powi(2) + g01.norm_sqr()).sqrt();
        Ok((mean + disc).max(0.0).sqrt())
    }

    /// Tensor product self ⊗ other.
    pub fn tensor(&self, other: &QReg) -> Result<QReg> {
        if self.n + other.n > MAX_QUBITS {
            return Err(Error::TooManyQubits(self.n + other.n));
        }
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(QReg {
            n: self.n + other.n,
            amps,
        })
    }
}

/// One outcome of a single-qubit measurement. `post_state` is `None` for a
/// probability-zero branch; callers must not consume it.
#[derive(Clone, Debug)]
pub struct MeasBranch {
    pub qubit: usize,
    pub bit: u8,
    pub probability: f64,
    pub post_state: Option<QReg>,
}

impl MeasBranch {
    pub fn is_valid(&self) -> bool {
        self.post_state.is_some()
    }
}

/// Dense d×d unitary, row-major. Construction checks U†U = I within
/// `NORM_TOL` in Frobenius norm.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    d: usize,
    entries: Vec<Complex64>,
}

impl Unitary {
    pub fn new(d: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {d}×{d} matrix",
                entries.len()
            )));
        }
        let u = Unitary { d, entries };
        let dev = u.unitarity_deviation();
        if dev > NORM_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(u)
    }

    pub fn identity(d: usize) -> Self {
        let mut entries = vec![c(0.0, 0.0); d * d];
        for i in 0..d {
            entries[i * d + i] = c(1.0, 0.0);
        }
        Unitary { d, entries }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.d + col]
    }

    /// Frobenius norm of U†U − I.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.d;
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                let mut e = c(0.0, 0.0);
                for k in 0..d {
                    e += self.get(k, i).conj() * self.get(k, j);
                }
                if i == j {
                    e -= 1.0;
                }
                acc += e.norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn mul(&self, rhs: &Unitary) -> Unitary {
        assert_eq!(self.d, rhs.d, "matrix product dimension mismatch");
        let d = self.d;
        let mut entries = vec![c(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                let mut acc = c(0.0, 0.0);
                for k in 0..d {
                    acc += self.get(i, k) * rhs.get(k, j);
                }
                entries[i * d + j] = acc;
            }
        }
        Unitary { d, entries }
    }

    pub fn dagger(&self) -> Unitary {
        let d = self.d;
        let mut entries = vec![c(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                entries[i * d + j] = self.get(j, i).conj();
            }
        }
        Unitary { d, entries }
    }

    pub fn kron(&self, rhs: &Unitary) -> Unitary {
        let d = self.d * rhs.d;
        let mut entries = vec![c(0.0, 0.0); d * d];
        for i1 in 0..self.d {
            for j1 in 0..self.d {
                for i2 in 0..rhs.d {
                    for j2 in 0..rhs.d {
                        let row = i1 * rhs.d + i2;
                        let col = j1 * rhs.d + j2;
                        entries[row * d + col] = self.get(i1, j1) * rhs.get(i2, j2);
                    }
                }
            }
        }
        Unitary { d, entries }
    }

    /// Elementwise maximum deviation from another matrix.
    pub fn max_abs_diff(&self, rhs: &Unitary) -> f64 {
        assert_eq!(self.d, rhs.d);
        self.entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, rhs: &Unitary, tol: f64) -> bool {
        self.d == rhs.d && self.max_abs_diff(rhs) <= tol
    }

    /// Deviation from `rhs` after aligning a single global phase, chosen from
    /// the Frobenius inner product.
    pub fn dist_up_to_global_phase(&self, rhs: &Unitary) -> f64 {
        assert_eq!(self.d, rhs.d);
        let overlap: Complex64 = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a.conj() * b)
            .sum();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            c(1.0, 0.0)
        };
        self.entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq_up_to_phase(&self, rhs: &Unitary, tol: f64) -> bool {
        self.d == rhs.d && self.dist_up_to_global_phase(rhs) <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Hand-evaluated index oracle: Σ ε_i · 2^(n−1−i).
    fn index_of(bits: &[usize]) -> usize {
        let n = bits.len();
        bits.iter()
            .enumerate()
            .map(|(i, &b)| b << (n - 1 - i))
            .sum()
    }

    /// Independent embedding oracle: builds the full 2^n×2^n matrix for `u`
    /// on `targets` straight from the definition, entry by entry.
    fn embed_oracle(n: usize, u: &Unitary, targets: &[usize]) -> Vec<Vec<Complex64>> {
        let dim = 1usize << n;
        let t = targets.len();
        let mut m = vec![vec![c(0.0, 0.0); dim]; dim];
        for (row, m_row) in m.iter_mut().enumerate() {
            for (col, entry) in m_row.iter_mut().enumerate() {
                // Rows/cols must agree on every non-target qubit.
                let mut agree = true;
                for q in 0..n {
                    if targets.contains(&q) {
                        continue;
                    }
                    let s = n - 1 - q;
                    if (row >> s) & 1 != (col >> s) & 1 {
                        agree = false;
                        break;
                    }
                }
                if !agree {
                    continue;
                }
                let mut lr = 0usize;
                let mut lc = 0usize;
                for (j, &q) in targets.iter().enumerate() {
                    let s = n - 1 - q;
                    lr |= ((row >> s) & 1) << (t - 1 - j);
                    lc |= ((col >> s) & 1) << (t - 1 - j);
                }
                *entry = u.get(lr, lc);
            }
        }
        m
    }

    fn matvec(m: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
        m.iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn gate_x() -> Unitary {
        Unitary::new(2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap()
    }

    fn gate_h() -> Unitary {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Unitary::new(2, vec![c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)]).unwrap()
    }

    #[test]
    fn prepare_basis_products() {
        let r = QReg::prepare(&[ket_zero(), ket_zero()]).unwrap();
        assert_eq!(r.amps()[0], c(1., 0.));
        assert!(r.amps()[1..].iter().all(|a| a.norm() == 0.0));

        let r = QReg::prepare(&[ket_plus(), ket_zero()]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.amps()[0] - c(h, 0.)).norm() < 1e-15);
        assert!((r.amps()[2] - c(h, 0.)).norm() < 1e-15);
        assert_eq!(r.amps()[1].norm(), 0.0);
        assert_eq!(r.amps()[3].norm(), 0.0);
    }

    #[test]
    fn prepare_index_convention() {
        // |1 1 0⟩ lands at the hand-computed index.
        let r = QReg::prepare(&[ket_one(), ket_one(), ket_zero()]).unwrap();
        let idx = index_of(&[1, 1, 0]);
        assert_eq!(idx, 6);
        for (i, a) in r.amps().iter().enumerate() {
            if i == idx {
                assert!((a - c(1., 0.)).norm() < 1e-15);
            } else {
                assert_eq!(a.norm(), 0.0);
            }
        }
    }

    #[test]
    fn prepare_rejects_bad_input() {
        let bad = [c(1.0, 0.0), c(0.5, 0.0)];
        assert!(matches!(
            QReg::prepare(&[bad]),
            Err(Error::NotNormalized(_))
        ));
        let nine = vec![ket_zero(); 9];
        assert!(matches!(
            QReg::prepare(&nine),
            Err(Error::TooManyQubits(9))
        ));
    }

    #[test]
    fn apply_bit_flip_and_identity() {
        let r = QReg::basis(2, 0).unwrap();
        let flipped = r.apply(&gate_x(), &[1]).unwrap();
        assert_eq!(flipped, QReg::basis(2, 1).unwrap());

        // Identity must leave the amplitudes bit-exact.
        let s = QReg::prepare(&[ket_plus(), ket_minus()]).unwrap();
        let same = s.apply(&Unitary::identity(2), &[0]).unwrap();
        assert_eq!(s.amps(), same.amps());
    }

    #[test]
    fn apply_hadamard_matches_kron_oracle() {
        let r = QReg::basis(2, 2).unwrap(); // |10⟩
        let got = r.apply(&gate_h(), &[0]).unwrap();
        let oracle = matvec(&embed_oracle(2, &gate_h(), &[0]), r.amps());
        for (a, b) in got.amps().iter().zip(&oracle) {
            assert!((a - b).norm() < 1e-12);
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((got.amps()[0] - c(h, 0.)).norm() < 1e-12);
        assert!((got.amps()[2] - c(-h, 0.)).norm() < 1e-12);
    }

    #[test]
    fn apply_errors() {
        let r = QReg::basis(2, 0).unwrap();
        assert!(matches!(
            r.apply(&gate_x(), &[0, 1]),
            Err(Error::DimensionMismatch(_))
        ));
        let cnot = crate::gatelib::cnot(0, 1).unwrap();
        assert!(matches!(
            r.apply(&cnot, &[1, 1]),
            Err(Error::RepeatedTarget(1))
        ));
        assert!(matches!(
            r.apply(&gate_x(), &[5]),
            Err(Error::QubitOutOfRange { .. })
        ));
    }

    #[test]
    fn kronecker_oracle_equivalence_up_to_four_qubits() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
        for n in 1..=4usize {
            for _ in 0..25 {
                let state = random::random_state(n, &mut rng).unwrap();
                // Random distinct target subset, random size 1..=min(2,n).
                let t = 1 + (rng.gen::<usize>() % n.min(2));
                let mut targets: Vec<usize> = (0..n).collect();
                for i in (1..targets.len()).rev() {
                    let j = rng.gen::<usize>() % (i + 1);
                    targets.swap(i, j);
                }
                targets.truncate(t);
                let u = random::random_unitary(1 << t, &mut rng).unwrap();
                let got = state.apply(&u, &targets).unwrap();
                let want = matvec(&embed_oracle(n, &u, &targets), state.amps());
                for (a, b) in got.amps().iter().zip(&want) {
                    assert!((a - b).norm() < 1e-12, "n={n} targets={targets:?}");
                }
            }
        }
    }

    #[test]
    fn norm_preserved_over_random_applications() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
        for _ in 0..1000 {
            let n = 1 + (rng.gen::<usize>() % 4);
            let state = random::random_state(n, &mut rng).unwrap();
            let q = rng.gen::<usize>() % n;
            let u = random::random_unitary(2, &mut rng).unwrap();
            let out = state.apply(&u, &[q]).unwrap();
            assert!((out.norm_sq().sqrt() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn measure_eigenstate_and_bell() {
        let psi = QReg::prepare(&[ket_zero(), ket_plus()]).unwrap();
        let (b0, b1) = psi.measure(0).unwrap();
        assert!((b0.probability - 1.0).abs() < 1e-15);
        assert_eq!(b1.probability, 0.0);
        assert!(!b1.is_valid());

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = QReg::new(2, vec![c(h, 0.), c(0., 0.), c(0., 0.), c(h, 0.)]).unwrap();
        let (b0, b1) = bell.measure(0).unwrap();
        assert!((b0.probability - 0.5).abs() < 1e-12);
        assert!((b1.probability - 0.5).abs() < 1e-12);
        assert_eq!(b0.post_state.unwrap(), QReg::basis(2, 0).unwrap());
        assert_eq!(b1.post_state.unwrap(), QReg::basis(2, 3).unwrap());
    }

    #[test]
    fn measure_uniform_superposition_projection_oracle() {
        let amps = vec![c(0.5, 0.); 4];
        let psi = QReg::new(2, amps).unwrap();
        let (b0, _) = psi.measure(1).unwrap();
        assert!((b0.probability - 0.5).abs() < 1e-12);
        // Direct projection oracle: zero the qubit-1=1 entries, renormalize.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = [c(h, 0.), c(0., 0.), c(h, 0.), c(0., 0.)];
        let post = b0.post_state.unwrap();
        for (a, b) in post.amps().iter().zip(&want) {
            assert!((a - b).norm() < 1e-12);
        }
        // Opposite-outcome amplitudes are exactly zero.
        assert_eq!(post.amps()[1].norm(), 0.0);
        assert_eq!(post.amps()[3].norm(), 0.0);
    }

    #[test]
    fn branch_probabilities_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
        for _ in 0..200 {
            let n = 1 + (rng.gen::<usize>() % 4);
            let psi = random::random_state(n, &mut rng).unwrap();
            let q = rng.gen::<usize>() % n;
            let (b0, b1) = psi.measure(q).unwrap();
            assert!((b0.probability + b1.probability - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn sampling_frequency_matches_probability() {
        // p(0) = 0.3 state; 10^5 seeded samples within 4σ.
        let a = 0.3f64.sqrt();
        let b = 0.7f64.sqrt();
        let psi = QReg::new(1, vec![c(a, 0.), c(b, 0.)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
        let trials = 100_000;
        let mut zeros = 0u32;
        for _ in 0..trials {
            if psi.sample(0, &mut rng).unwrap().bit == 0 {
                zeros += 1;
            }
        }
        let freq = f64::from(zeros) / trials as f64;
        let sigma = (0.3 * 0.7 / trials as f64).sqrt();
        assert!((freq - 0.3).abs() < 4.0 * sigma, "freq={freq}");
    }

    #[test]
    fn fidelity_cases() {
        let zero = QReg::basis(1, 0).unwrap();
        let one = QReg::basis(1, 1).unwrap();
        let plus = QReg::prepare(&[ket_plus()]).unwrap();
        assert!((zero.fidelity(&zero).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(zero.fidelity(&one).unwrap(), 0.0);
        assert!((zero.fidelity(&plus).unwrap() - 0.5).abs() < 1e-12);
        // Symmetry.
        assert_eq!(
            zero.fidelity(&plus).unwrap(),
            plus.fidelity(&zero).unwrap()
        );
        let two = QReg::basis(2, 0).unwrap();
        assert!(zero.fidelity(&two).is_err());
    }

    #[test]
    fn phase_equality_iff_high_fidelity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
        for _ in 0..100 {
            let psi = random::random_state(2, &mut rng).unwrap();
            let phase = c(0.0, rng.gen::<f64>() * std::f64::consts::TAU).exp();
            let rotated =
                QReg::new(2, psi.amps().iter().map(|a| a * phase).collect()).unwrap();
            assert!(psi.equal_up_to_phase(&rotated).unwrap());
            assert!(psi.fidelity(&rotated).unwrap() > 1.0 - 1e-9);

            let other = random::random_state(2, &mut rng).unwrap();
            let f = psi.fidelity(&other).unwrap();
            assert_eq!(psi.equal_up_to_phase(&other).unwrap(), f > 1.0 - 1e-9);
        }
    }

    #[test]
    fn schmidt_and_overlap_helpers() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let product = QReg::prepare(&[ket_plus(), ket_one()]).unwrap();
        assert!((product.largest_schmidt_coefficient(0).unwrap() - 1.0).abs() < 1e-12);
        assert!((product.single_qubit_overlap(0, &ket_plus()).unwrap() - 1.0).abs() < 1e-12);
        assert!((product.single_qubit_overlap(1, &ket_zero()).unwrap()).abs() < 1e-12);

        let bell = QReg::new(2, vec![c(h, 0.), c(0., 0.), c(0., 0.), c(h, 0.)]).unwrap();
        assert!((bell.largest_schmidt_coefficient(0).unwrap() - h).abs() < 1e-12);
        assert!((bell.single_qubit_overlap(0, &ket_zero()).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unitary_constructor_rejects_non_unitary() {
        let m = Unitary::new(2, vec![c(1., 0.), c(0., 0.), c(0., 0.), c(0.5, 0.)]);
        assert!(matches!(m, Err(Error::NotUnitary(_))));
    }
}
