//! The unitary vocabulary used by the teleportation circuits.
//!
//! Every constructor verifies `U†U = 1` to [`Real::TOLERANCE`] before
//! returning. Gates are stored as written, with no re-phasing into SU(2):
//! the Hadamard keeps its determinant of −1.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::scalar::Real;

/// Largest register a dense gate matrix may span. A 10-qubit gate is already
/// a million complex entries.
pub const MAX_GATE_QUBITS: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct UnitaryMatrix<T>(SquareMatrix<T>);

impl<T: Real> UnitaryMatrix<T> {
    pub fn new(matrix: SquareMatrix<T>) -> Result<Self> {
        let dim = matrix.dim();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: dim.next_power_of_two().max(1),
                found: dim,
            });
        }
        let deviation = matrix.unitarity_error();
        if deviation > T::TOLERANCE {
            return Err(Error::NotUnitary {
                deviation: deviation.to_f64_lossy(),
            });
        }
        Ok(Self(matrix))
    }

    /// For matrices that are unitary by construction; verifies anyway.
    fn known(matrix: SquareMatrix<T>) -> Self {
        Self::new(matrix).expect("gate constructor produced a non-unitary matrix")
    }

    #[inline]
    pub fn matrix(&self) -> &SquareMatrix<T> {
        &self.0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn num_qubits(&self) -> usize {
        self.0.dim().trailing_zeros() as usize
    }

    /// `self · rhs`: `rhs` acts first.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        Ok(Self::known(self.0.mul(&rhs.0)?))
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn kron(&self, rhs: &Self) -> Result<Self> {
        let n = self.num_qubits() + rhs.num_qubits();
        if n > MAX_GATE_QUBITS {
            return Err(Error::Capacity {
                requested: n,
                limit: MAX_GATE_QUBITS,
            });
        }
        Ok(Self::known(self.0.kron(&rhs.0)))
    }

    pub fn unitarity_error(&self) -> T {
        self.0.unitarity_error()
    }
}

fn real2<T: Real>(rows: [f64; 4]) -> SquareMatrix<T> {
    SquareMatrix::from_real_rows(2, &rows).expect("2x2 literal")
}

pub fn identity<T: Real>(num_qubits: usize) -> Result<UnitaryMatrix<T>> {
    if num_qubits > MAX_GATE_QUBITS {
        return Err(Error::Capacity {
            requested: num_qubits,
            limit: MAX_GATE_QUBITS,
        });
    }
    Ok(UnitaryMatrix::known(SquareMatrix::identity(1 << num_qubits)))
}

/// `H|e> = (|0> + (-1)^e |1>)/√2`.
pub fn hadamard<T: Real>() -> UnitaryMatrix<T> {
    let s = T::FRAC_1_SQRT_2();
    let m = SquareMatrix::from_rows(
        2,
        vec![
            Complex::new(s, T::zero()),
            Complex::new(s, T::zero()),
            Complex::new(s, T::zero()),
            Complex::new(-s, T::zero()),
        ],
    )
    .expect("2x2");
    UnitaryMatrix::known(m)
}

pub fn pauli_x<T: Real>() -> UnitaryMatrix<T> {
    UnitaryMatrix::known(real2([0., 1., 1., 0.]))
}

pub fn pauli_y<T: Real>() -> UnitaryMatrix<T> {
    let i = Complex::new(T::zero(), T::one());
    let z = Complex::new(T::zero(), T::zero());
    UnitaryMatrix::known(SquareMatrix::from_rows(2, vec![z, -i, i, z]).expect("2x2"))
}

pub fn pauli_z<T: Real>() -> UnitaryMatrix<T> {
    UnitaryMatrix::known(real2([1., 0., 0., -1.]))
}

/// Controlled-NOT with the higher-order qubit as control.
pub fn cnot<T: Real>() -> UnitaryMatrix<T> {
    #[rustfmt::skip]
    let rows = [
        1., 0., 0., 0.,
        0., 1., 0., 0.,
        0., 0., 0., 1.,
        0., 0., 1., 0.,
    ];
    UnitaryMatrix::known(SquareMatrix::from_real_rows(4, &rows).expect("4x4"))
}

/// Single-qubit rotation with `R|0> = cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>`.
///
/// Only the first column is fixed by that action; the second column is the
/// completion that gives determinant 1.
pub fn bloch_rotation<T: Real>(theta: T, phi: T) -> UnitaryMatrix<T> {
    let half = theta / T::lit(2.0);
    let (c, s) = (half.cos(), half.sin());
    let phase = Complex::new(phi.cos(), phi.sin());
    let m = SquareMatrix::from_rows(
        2,
        vec![
            Complex::new(c, T::zero()),
            -(phase.conj() * s),
            phase * s,
            Complex::new(c, T::zero()),
        ],
    )
    .expect("2x2");
    UnitaryMatrix::known(m)
}

/// `cos(θ/2)·1 + sin(θ/2)·X^{⊗m}·Z_0`, which prepares
/// `cos(θ/2)|0…0> + sin(θ/2)|1…1>` from `|0…0>`.
///
/// `Z_0` acts on the leading qubit. `K = X^{⊗m}Z_0` is real with `K² = -1`,
/// so the sum is a rotation by θ/2 in every `{|x>, |¬x>}` plane. For `m = 1`
/// this equals `bloch_rotation(θ, 0)`.
pub fn ghz_rotation<T: Real>(m: usize, theta: T) -> Result<UnitaryMatrix<T>> {
    if m == 0 {
        return Err(Error::InvalidParams(
            "GHZ rotation needs at least one qubit".into(),
        ));
    }
    if m > MAX_GATE_QUBITS {
        return Err(Error::Capacity {
            requested: m,
            limit: MAX_GATE_QUBITS,
        });
    }
    let dim = 1usize << m;
    let half = theta / T::lit(2.0);
    let (c, s) = (half.cos(), half.sin());
    let mut matrix = SquareMatrix::zeros(dim);
    let high = dim >> 1;
    for i in 0..high {
        let flipped = i ^ (dim - 1);
        matrix.set(i, i, Complex::new(c, T::zero()));
        matrix.set(flipped, flipped, Complex::new(c, T::zero()));
        matrix.set(flipped, i, Complex::new(s, T::zero()));
        matrix.set(i, flipped, Complex::new(-s, T::zero()));
    }
    UnitaryMatrix::new(matrix)
}

/// `CNOT·(H⊗1)`: maps `|e0 e1>` to the ebit `(|0 e1> + (-1)^{e0}|1 ¬e1>)/√2`.
pub fn entanglement_gadget<T: Real>() -> UnitaryMatrix<T> {
    let h1 = hadamard::<T>()
        .kron(&pauli_identity())
        .expect("two-qubit gate");
    cnot::<T>().compose(&h1).expect("4x4")
}

/// `(H⊗1)·CNOT`, the Bell-measurement basis change.
pub fn entanglement_gadget_inverse<T: Real>() -> UnitaryMatrix<T> {
    let h1 = hadamard::<T>()
        .kron(&pauli_identity())
        .expect("two-qubit gate");
    h1.compose(&cnot()).expect("4x4")
}

fn pauli_identity<T: Real>() -> UnitaryMatrix<T> {
    UnitaryMatrix::known(SquareMatrix::identity(2))
}

/// `Z^a X^b`: X applied first when both are set.
pub fn z_pow_x_pow<T: Real>(a: u8, b: u8) -> UnitaryMatrix<T> {
    let x = if b & 1 == 1 { pauli_x() } else { pauli_identity() };
    let z = if a & 1 == 1 { pauli_z() } else { pauli_identity() };
    z.compose(&x).expect("2x2")
}
