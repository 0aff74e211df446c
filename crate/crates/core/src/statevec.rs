//! Dense pure states and density operators over an ordered qubit register.
//!
//! Qubit 0 is the most significant bit of a basis-state label: in a 3-qubit
//! register the amplitude of `|q0 q1 q2>` lives at index `4*q0 + 2*q1 + q2`.
//! Every routine in this crate follows that convention.
//!
//! States are not required to be normalized. A post-measurement branch state
//! carries its branch probability as its squared norm, so summing expectation
//! values over branches needs no separate weight bookkeeping.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::UnitaryMatrix;
use crate::matrix::SquareMatrix;
use crate::scalar::Real;

/// Default cap on the number of qubits in a pure-state register.
pub const DEFAULT_MAX_QUBITS: usize = 24;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PureState<T> {
    num_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityOperator<T> {
    num_qubits: usize,
    matrix: SquareMatrix<T>,
}

fn check_capacity(requested: usize, limit: usize) -> Result<()> {
    if requested > limit {
        return Err(Error::Capacity { requested, limit });
    }
    Ok(())
}

fn check_indices(indices: &[usize], num_qubits: usize) -> Result<()> {
    for (i, &q) in indices.iter().enumerate() {
        if q >= num_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                num_qubits,
            });
        }
        if indices[..i].contains(&q) {
            return Err(Error::DuplicateQubit(q));
        }
    }
    Ok(())
}

#[inline]
fn bit_mask(num_qubits: usize, qubit: usize) -> usize {
    1usize << (num_qubits - 1 - qubit)
}

/// Offsets of every assignment of `qubits` (first listed = most significant
/// local bit) inside an `num_qubits`-qubit label.
fn subspace_offsets(num_qubits: usize, qubits: &[usize]) -> Vec<usize> {
    let k = qubits.len();
    (0..1usize << k)
        .map(|local| {
            qubits
                .iter()
                .enumerate()
                .filter(|(r, _)| (local >> (k - 1 - r)) & 1 == 1)
                .map(|(_, &q)| bit_mask(num_qubits, q))
                .sum()
        })
        .collect()
}

/// In-place action of `u` on `targets`, identity elsewhere.
fn apply_kernel<T: Real>(
    amps: &mut [Complex<T>],
    num_qubits: usize,
    u: &SquareMatrix<T>,
    targets: &[usize],
) {
    let offsets = subspace_offsets(num_qubits, targets);
    let target_mask: usize = targets.iter().map(|&q| bit_mask(num_qubits, q)).sum();
    let local = offsets.len();
    let zero = Complex::new(T::zero(), T::zero());
    let mut buf = vec![zero; local];
    for base in 0..amps.len() {
        if base & target_mask != 0 {
            continue;
        }
        for (j, &off) in offsets.iter().enumerate() {
            buf[j] = amps[base + off];
        }
        for (i, &off) in offsets.iter().enumerate() {
            let mut acc = zero;
            for (j, b) in buf.iter().enumerate() {
                acc = acc + u[(i, j)] * b;
            }
            amps[base + off] = acc;
        }
    }
}

impl<T: Real> PureState<T> {
    pub fn new(num_qubits: usize, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        check_capacity(num_qubits, DEFAULT_MAX_QUBITS)?;
        let expected = 1usize << num_qubits;
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: amplitudes.len(),
            });
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Real amplitudes given as `f64`; convenient for fixtures.
    pub fn from_reals(num_qubits: usize, amplitudes: &[f64]) -> Result<Self> {
        Self::new(
            num_qubits,
            amplitudes
                .iter()
                .map(|&x| Complex::new(T::lit(x), T::zero()))
                .collect(),
        )
    }

    /// The computational basis state `|label>`.
    pub fn basis(num_qubits: usize, label: usize) -> Result<Self> {
        check_capacity(num_qubits, DEFAULT_MAX_QUBITS)?;
        let dim = 1usize << num_qubits;
        if label >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: label,
            });
        }
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); dim];
        amplitudes[label] = Complex::new(T::one(), T::zero());
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    /// The zero-qubit register: a single unit amplitude.
    pub fn empty() -> Self {
        Self {
            num_qubits: 0,
            amplitudes: vec![Complex::new(T::one(), T::zero())],
        }
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Branch probability carried by a sub-normalized state.
    #[inline]
    pub fn probability(&self) -> T {
        self.norm_sqr()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - T::one()).abs() <= T::TOLERANCE
    }

    pub(crate) fn check_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.norm_sqr().to_f64_lossy()))
        }
    }

    /// Rescaled to unit norm; `None` when the norm is numerically zero.
    pub fn normalized(&self) -> Option<Self> {
        let p = self.norm_sqr();
        if p <= T::probability_floor() {
            return None;
        }
        Some(self.scaled(T::one() / p.sqrt()))
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            num_qubits: self.num_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            }))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        if self.dim() != other.dim() {
            return T::infinity();
        }
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    /// `self ⊗ other`, with `self` on the high-order qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.tensor_with_limit(other, DEFAULT_MAX_QUBITS)
    }

    pub fn tensor_with_limit(&self, other: &Self, limit: usize) -> Result<Self> {
        let n = self.num_qubits + other.num_qubits;
        check_capacity(n, limit)?;
        let mut amplitudes = Vec::with_capacity(1 << n);
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(Self {
            num_qubits: n,
            amplitudes,
        })
    }

    pub fn apply_unitary(&self, u: &UnitaryMatrix<T>, targets: &[usize]) -> Result<Self> {
        check_indices(targets, self.num_qubits)?;
        let expected = 1usize << targets.len();
        if u.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: u.dim(),
            });
        }
        let mut amplitudes = self.amplitudes.clone();
        apply_kernel(&mut amplitudes, self.num_qubits, u.matrix(), targets);
        Ok(Self {
            num_qubits: self.num_qubits,
            amplitudes,
        })
    }

    /// Reorders the register so that new qubit `i` is old qubit `order[i]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: order.len(),
            });
        }
        check_indices(order, self.num_qubits)?;
        let n = self.num_qubits;
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); self.dim()];
        for (old_label, amp) in self.amplitudes.iter().enumerate() {
            let new_label = order.iter().enumerate().fold(0usize, |acc, (i, &q)| {
                let bit = (old_label >> (n - 1 - q)) & 1;
                acc | (bit << (n - 1 - i))
            });
            amplitudes[new_label] = *amp;
        }
        Ok(Self {
            num_qubits: n,
            amplitudes,
        })
    }

    /// Unnormalized projection onto `qubit = bit`, with that qubit removed
    /// from the register. The squared norm of the result is the outcome
    /// probability times the squared norm of `self`.
    pub fn project_out(&self, qubit: usize, bit: u8) -> Result<Self> {
        check_indices(&[qubit], self.num_qubits)?;
        let n = self.num_qubits;
        let shift = n - 1 - qubit;
        let want = usize::from(bit & 1);
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(label, _)| (label >> shift) & 1 == want)
            .map(|(_, a)| *a)
            .collect();
        Ok(Self {
            num_qubits: n - 1,
            amplitudes,
        })
    }

    /// Probability mass on `qubit = 0`, relative to the squared norm.
    pub fn zero_weight(&self, qubit: usize) -> Result<T> {
        check_indices(&[qubit], self.num_qubits)?;
        let mask = bit_mask(self.num_qubits, qubit);
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(label, _)| label & mask == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    pub fn to_density(&self) -> DensityOperator<T> {
        let d = self.dim();
        let mut matrix = SquareMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                matrix.set(i, j, self.amplitudes[i] * self.amplitudes[j].conj());
            }
        }
        DensityOperator {
            num_qubits: self.num_qubits,
            matrix,
        }
    }

    /// Reduced density operator after tracing out `discard`, computed
    /// directly from the amplitudes without forming the full projector.
    pub fn reduced_density(&self, discard: &[usize]) -> Result<DensityOperator<T>> {
        check_indices(discard, self.num_qubits)?;
        let keep: Vec<usize> = (0..self.num_qubits)
            .filter(|q| !discard.contains(q))
            .collect();
        let keep_off = subspace_offsets(self.num_qubits, &keep);
        let disc_off = subspace_offsets(self.num_qubits, discard);
        let d = keep_off.len();
        let mut matrix = SquareMatrix::zeros(d);
        for (r, &ro) in keep_off.iter().enumerate() {
            for (c, &co) in keep_off.iter().enumerate() {
                let mut acc = Complex::new(T::zero(), T::zero());
                for &o in &disc_off {
                    acc = acc + self.amplitudes[ro + o] * self.amplitudes[co + o].conj();
                }
                matrix.set(r, c, acc);
            }
        }
        Ok(DensityOperator {
            num_qubits: keep.len(),
            matrix,
        })
    }
}

impl<T: Real> DensityOperator<T> {
    /// Validates hermiticity, positivity and the trace bound before accepting
    /// `matrix`.
    pub fn from_matrix(num_qubits: usize, matrix: SquareMatrix<T>) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(num_qubits, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Shape check only.
    pub fn from_matrix_unchecked(num_qubits: usize, matrix: SquareMatrix<T>) -> Result<Self> {
        let expected = 1usize << num_qubits;
        if matrix.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: matrix.dim(),
            });
        }
        Ok(Self { num_qubits, matrix })
    }

    /// `1/2^n` times the identity.
    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let d = 1usize << num_qubits;
        Self {
            num_qubits,
            matrix: SquareMatrix::identity(d).scale(T::one() / T::lit(d as f64)),
        }
    }

    /// The all-zero operator; the sub-normalized state of an impossible branch.
    pub fn zero(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            matrix: SquareMatrix::zeros(1 << num_qubits),
        }
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn matrix(&self) -> &SquareMatrix<T> {
        &self.matrix
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Real part of the trace. For a sub-normalized branch operator this is
    /// the branch probability.
    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    pub fn hermiticity_error(&self) -> T {
        self.matrix.hermiticity_error()
    }

    /// Smallest eigenvalue, computed in `f64` regardless of `T`.
    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim();
        let m = nalgebra::DMatrix::from_fn(d, d, |i, j| {
            let z = self.matrix[(i, j)];
            nalgebra::Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())
        });
        // Symmetrize so rounding noise in the upper/lower halves does not
        // bias the solver.
        let h = (&m + m.adjoint()) * nalgebra::Complex::new(0.5, 0.0);
        h.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > T::TOLERANCE {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (max |M - M†| = {herm:e})"
            )));
        }
        let tr = self.matrix.trace();
        if tr.im.abs() > T::TOLERANCE || tr.re < -T::TOLERANCE || tr.re > T::one() + T::TOLERANCE {
            return Err(Error::InvalidDensity(format!("trace {tr} outside [0, 1]")));
        }
        let min = self.min_eigenvalue();
        if min < -T::PSD_TOLERANCE.to_f64_lossy() {
            return Err(Error::InvalidDensity(format!(
                "not positive semidefinite (min eigenvalue {min:e})"
            )));
        }
        Ok(())
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            num_qubits: self.num_qubits,
            matrix: self.matrix.scale(factor),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: other.num_qubits,
            });
        }
        Ok(Self {
            num_qubits: self.num_qubits,
            matrix: self.matrix.add(&other.matrix)?,
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.matrix.max_abs_diff(&other.matrix)
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.num_qubits + other.num_qubits;
        check_capacity(n, DEFAULT_MAX_QUBITS)?;
        Ok(Self {
            num_qubits: n,
            matrix: self.matrix.kron(&other.matrix),
        })
    }

    /// `U ρ U†` with `U` acting on `targets`.
    ///
    /// The row-major matrix is treated as a `2n`-qubit vector (row qubits
    /// first), on which the map is `U ⊗ conj(U)`.
    pub fn conjugate(&self, u: &UnitaryMatrix<T>, targets: &[usize]) -> Result<Self> {
        check_indices(targets, self.num_qubits)?;
        let expected = 1usize << targets.len();
        if u.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: u.dim(),
            });
        }
        let n = self.num_qubits;
        let conj = {
            let m = u.matrix();
            SquareMatrix::from_rows(m.dim(), m.data().iter().map(|z| z.conj()).collect())?
        };
        let col_targets: Vec<usize> = targets.iter().map(|q| q + n).collect();
        let mut matrix = self.matrix.clone();
        apply_kernel(matrix.data_mut(), 2 * n, u.matrix(), targets);
        apply_kernel(matrix.data_mut(), 2 * n, &conj, &col_targets);
        Ok(Self {
            num_qubits: n,
            matrix,
        })
    }

    pub fn partial_trace(&self, discard: &[usize]) -> Result<Self> {
        check_indices(discard, self.num_qubits)?;
        let keep: Vec<usize> = (0..self.num_qubits)
            .filter(|q| !discard.contains(q))
            .collect();
        let keep_off = subspace_offsets(self.num_qubits, &keep);
        let disc_off = subspace_offsets(self.num_qubits, discard);
        let d = keep_off.len();
        let mut matrix = SquareMatrix::zeros(d);
        for (r, &ro) in keep_off.iter().enumerate() {
            for (c, &co) in keep_off.iter().enumerate() {
                let acc = disc_off
                    .iter()
                    .fold(Complex::new(T::zero(), T::zero()), |acc, &o| {
                        acc + self.matrix[(ro + o, co + o)]
                    });
                matrix.set(r, c, acc);
            }
        }
        Ok(Self {
            num_qubits: keep.len(),
            matrix,
        })
    }

    /// Inserts a qubit prepared in `|0>` so that it becomes qubit `at`.
    pub fn insert_zero_qubit(&self, at: usize) -> Result<Self> {
        let n = self.num_qubits;
        if at > n {
            return Err(Error::QubitOutOfRange {
                index: at,
                num_qubits: n + 1,
            });
        }
        check_capacity(n + 1, DEFAULT_MAX_QUBITS)?;
        let old_dim = self.dim();
        let mut matrix = SquareMatrix::zeros(old_dim * 2);
        // Low bits below the inserted position keep their place; higher bits
        // shift up by one. The inserted bit is 0.
        let low_bits = n - at;
        let spread = |label: usize| {
            let low = label & ((1usize << low_bits) - 1);
            let high = label >> low_bits;
            (high << (low_bits + 1)) | low
        };
        for r in 0..old_dim {
            for c in 0..old_dim {
                matrix.set(spread(r), spread(c), self.matrix[(r, c)]);
            }
        }
        Ok(Self {
            num_qubits: n + 1,
            matrix,
        })
    }

    /// `<ψ|ρ|ψ>` for a normalized `ψ`.
    pub fn expectation(&self, psi: &PureState<T>) -> Result<T> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.dim(),
            });
        }
        psi.check_normalized()?;
        let rho_psi = self.matrix.mul_vec(psi.amplitudes())?;
        let value = psi
            .amplitudes()
            .iter()
            .zip(&rho_psi)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            });
        if value.im.abs() > T::TOLERANCE {
            return Err(Error::InvalidDensity(format!(
                "expectation has imaginary residue {:e}",
                value.im
            )));
        }
        Ok(value.re)
    }
}

/// `a ⊗ b`.
pub fn tensor<T: Real>(a: &PureState<T>, b: &PureState<T>) -> Result<PureState<T>> {
    a.tensor(b)
}

pub fn apply_unitary<T: Real>(
    state: &PureState<T>,
    u: &UnitaryMatrix<T>,
    targets: &[usize],
) -> Result<PureState<T>> {
    state.apply_unitary(u, targets)
}

pub fn partial_trace<T: Real>(
    rho: &DensityOperator<T>,
    discard: &[usize],
) -> Result<DensityOperator<T>> {
    rho.partial_trace(discard)
}

pub fn expectation<T: Real>(rho: &DensityOperator<T>, psi: &PureState<T>) -> Result<T> {
    rho.expectation(psi)
}

pub fn to_density<T: Real>(psi: &PureState<T>) -> DensityOperator<T> {
    psi.to_density()
}
