//! Builtin unitary gate library.
//!
//! Matrices use qubit-major bit order: the qubit listed first in an
//! instruction owns the most-significant index bit of both the row and
//! column index.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::dense::{c, cr, CMat, ONE, ZERO};
use crate::error::{Error, Result};

pub const UNITARY_TOL: f64 = 1e-12;

/// Names accepted by the parser and the gate constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateName {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Rx,
    Ry,
    Rz,
    Cx,
    Cz,
    Cs,
    Cp,
    Swap,
}

impl GateName {
    pub fn parse(s: &str) -> Result<GateName> {
        use GateName::*;
        Ok(match s {
            "i" | "id" => I,
            "x" => X,
            "y" => Y,
            "z" => Z,
            "h" => H,
            "s" => S,
            "sdg" => Sdg,
            "t" => T,
            "tdg" => Tdg,
            "rx" => Rx,
            "ry" => Ry,
            "rz" => Rz,
            "cx" => Cx,
            "cz" => Cz,
            "cs" => Cs,
            "cp" => Cp,
            "swap" => Swap,
            _ => return Err(Error::UnknownGate(s.to_string())),
        })
    }

    pub fn as_str(&self) -> &'static str {
        use GateName::*;
        match self {
            I => "i",
            X => "x",
            Y => "y",
            Z => "z",
            H => "h",
            S => "s",
            Sdg => "sdg",
            T => "t",
            Tdg => "tdg",
            Rx => "rx",
            Ry => "ry",
            Rz => "rz",
            Cx => "cx",
            Cz => "cz",
            Cs => "cs",
            Cp => "cp",
            Swap => "swap",
        }
    }

    pub fn arity(&self) -> usize {
        use GateName::*;
        match self {
            I | X | Y | Z | H | S | Sdg | T | Tdg | Rx | Ry | Rz => 1,
            Cx | Cz | Cs | Cp | Swap => 2,
        }
    }

    pub fn param_count(&self) -> usize {
        use GateName::*;
        match self {
            Rx | Ry | Rz | Cp => 1,
            _ => 0,
        }
    }
}

/// A unitary matrix over `arity` qubits, validated at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    arity: usize,
    mat: CMat,
}

impl GateMatrix {
    pub fn new(arity: usize, mat: CMat) -> Result<GateMatrix> {
        if mat.dim != 1 << arity {
            return Err(Error::Internal(format!(
                "gate matrix dim {} does not match arity {}",
                mat.dim, arity
            )));
        }
        if !mat.is_unitary(UNITARY_TOL) {
            return Err(Error::NotUnitary(format!("{}x{} matrix", mat.dim, mat.dim)));
        }
        Ok(GateMatrix { arity, mat })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    /// Hermitian conjugate; entry (i,j) becomes conj(entry (j,i)).
    pub fn adjoint(&self) -> GateMatrix {
        GateMatrix {
            arity: self.arity,
            mat: self.mat.dagger(),
        }
    }

    /// Entry-wise complex conjugate.
    pub fn conjugate(&self) -> GateMatrix {
        GateMatrix {
            arity: self.arity,
            mat: self.mat.conjugate(),
        }
    }
}

/// Standard matrix for a builtin gate.
pub fn builtin(name: GateName, params: &[f64]) -> Result<GateMatrix> {
    if params.len() != name.param_count() {
        return Err(Error::GateParams {
            name: name.as_str().to_string(),
            expected: name.param_count(),
            got: params.len(),
        });
    }
    let mat = base_matrix(name, params);
    debug_assert!(mat.is_unitary(UNITARY_TOL));
    Ok(GateMatrix {
        arity: name.arity(),
        mat,
    })
}

/// Same as [`builtin`] but takes the textual gate name.
pub fn builtin_named(name: &str, params: &[f64]) -> Result<GateMatrix> {
    builtin(GateName::parse(name)?, params)
}

fn base_matrix(name: GateName, params: &[f64]) -> CMat {
    use GateName::*;
    let h = FRAC_1_SQRT_2;
    match name {
        I => CMat::identity(2),
        X => CMat::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]),
        Y => CMat::from_rows(&[vec![ZERO, c(0.0, -1.0)], vec![c(0.0, 1.0), ZERO]]),
        Z => diag(&[ONE, cr(-1.0)]),
        H => CMat::from_rows(&[vec![cr(h), cr(h)], vec![cr(h), cr(-h)]]),
        S => diag(&[ONE, c(0.0, 1.0)]),
        Sdg => diag(&[ONE, c(0.0, -1.0)]),
        T => diag(&[ONE, phase(PI / 4.0)]),
        Tdg => diag(&[ONE, phase(-PI / 4.0)]),
        Rx => {
            let t = params[0] / 2.0;
            CMat::from_rows(&[
                vec![cr(t.cos()), c(0.0, -t.sin())],
                vec![c(0.0, -t.sin()), cr(t.cos())],
            ])
        }
        Ry => {
            let t = params[0] / 2.0;
            CMat::from_rows(&[vec![cr(t.cos()), cr(-t.sin())], vec![cr(t.sin()), cr(t.cos())]])
        }
        Rz => {
            let t = params[0] / 2.0;
            diag(&[phase(-t), phase(t)])
        }
        // control is the first listed qubit, i.e. the high bit
        Cx => CMat::from_rows(&[
            vec![ONE, ZERO, ZERO, ZERO],
            vec![ZERO, ONE, ZERO, ZERO],
            vec![ZERO, ZERO, ZERO, ONE],
            vec![ZERO, ZERO, ONE, ZERO],
        ]),
        Cz => diag(&[ONE, ONE, ONE, cr(-1.0)]),
        Cs => diag(&[ONE, ONE, ONE, c(0.0, 1.0)]),
        Cp => diag(&[ONE, ONE, ONE, phase(params[0])]),
        Swap => CMat::from_rows(&[
            vec![ONE, ZERO, ZERO, ZERO],
            vec![ZERO, ZERO, ONE, ZERO],
            vec![ZERO, ONE, ZERO, ZERO],
            vec![ZERO, ZERO, ZERO, ONE],
        ]),
    }
}

fn diag(entries: &[Complex64]) -> CMat {
    let mut m = CMat::zeros(entries.len());
    for (i, &e) in entries.iter().enumerate() {
        m.set(i, i, e);
    }
    m
}

fn phase(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// A named gate instance as it appears in a circuit. The `adjoint` and
/// `conjugate` flags are applied to the base matrix in that order, so the
/// four combinations cover id/dagger/conjugate/transpose without leaving
/// the named representation.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub name: GateName,
    pub params: Vec<f64>,
    pub adjoint: bool,
    pub conjugate: bool,
}

impl Gate {
    pub fn new(name: GateName, params: Vec<f64>) -> Result<Gate> {
        if params.len() != name.param_count() {
            return Err(Error::GateParams {
                name: name.as_str().to_string(),
                expected: name.param_count(),
                got: params.len(),
            });
        }
        Ok(Gate {
            name,
            params,
            adjoint: false,
            conjugate: false,
        })
    }

    pub fn arity(&self) -> usize {
        self.name.arity()
    }

    pub fn is_plain(&self) -> bool {
        !self.adjoint && !self.conjugate
    }

    pub fn matrix(&self) -> GateMatrix {
        let base = builtin(self.name, &self.params).expect("validated at construction");
        let m = match (self.adjoint, self.conjugate) {
            (false, false) => return base,
            (true, false) => base.matrix().dagger(),
            (false, true) => base.matrix().conjugate(),
            (true, true) => base.matrix().transpose(),
        };
        GateMatrix {
            arity: self.name.arity(),
            mat: m,
        }
    }

    /// Gate denoting the Hermitian conjugate of this one.
    pub fn to_adjoint(&self) -> Gate {
        Gate {
            adjoint: !self.adjoint,
            ..self.clone()
        }
    }

    /// Gate denoting the entry-wise conjugate of this one.
    pub fn to_conjugate(&self) -> Gate {
        Gate {
            conjugate: !self.conjugate,
            ..self.clone()
        }
    }

    pub fn label(&self) -> String {
        let mut s = self.name.as_str().to_string();
        if self.adjoint {
            s.push('†');
        }
        if self.conjugate {
            s.push('*');
        }
        s
    }
}
