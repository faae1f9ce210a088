//! Independent dense-matrix reference implementations, used for
//! differential testing and the CLI's `--oracle` cross-check. These paths
//! never touch the decision-diagram engine.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::circuit::{Circuit, Instruction};
use crate::dense::{CMat, ZERO};
use crate::error::{Error, Result};

pub type DenseOperator = CMat;

const MAX_UNITARY_QUBITS: usize = 10;
const MAX_KRAUS_QUBITS: usize = 8;
const MAX_KRAUS_TERMS: usize = 1 << 16;
const MAX_HAAR_QUBITS: usize = 6;
const ROUTE_AGREEMENT_TOL: f64 = 1e-10;

/// Apply a k-qubit matrix to a state vector in place. Qubits are listed
/// most-significant first; qubit q owns state-index bit (n-1-q).
#[allow(clippy::needless_range_loop)]
fn apply_to_state(mat: &CMat, qubits: &[usize], state: &mut [Complex64], n: usize) {
    let k = qubits.len();
    debug_assert_eq!(mat.dim, 1 << k);
    let bitpos: Vec<usize> = qubits.iter().map(|&q| n - 1 - q).collect();
    let mask: usize = bitpos.iter().map(|&b| 1usize << b).sum();
    let dim = 1usize << n;
    let mut scratch = vec![ZERO; 1 << k];
    for base in 0..dim {
        if base & mask != 0 {
            continue;
        }
        for a in 0..1usize << k {
            let mut idx = base;
            for (j, &b) in bitpos.iter().enumerate() {
                if a >> (k - 1 - j) & 1 == 1 {
                    idx |= 1 << b;
                }
            }
            scratch[a] = state[idx];
        }
        for b in 0..1usize << k {
            let mut acc = ZERO;
            for a in 0..1usize << k {
                acc += mat.get(b, a) * scratch[a];
            }
            let mut idx = base;
            for (j, &bp) in bitpos.iter().enumerate() {
                if b >> (k - 1 - j) & 1 == 1 {
                    idx |= 1 << bp;
                }
            }
            state[idx] = acc;
        }
    }
}

fn apply_to_matrix(mat: &CMat, qubits: &[usize], m: &mut CMat, n: usize) {
    let dim = m.dim;
    for col in 0..dim {
        let mut column: Vec<Complex64> = (0..dim).map(|r| m.get(r, col)).collect();
        apply_to_state(mat, qubits, &mut column, n);
        for (r, v) in column.into_iter().enumerate() {
            m.set(r, col, v);
        }
    }
}

/// Dense unitary of an ideal circuit: the ordered product of its
/// instruction matrices lifted to n qubits.
pub fn circuit_unitary(c: &Circuit) -> Result<DenseOperator> {
    if !c.is_ideal() {
        return Err(Error::NoisyCircuit);
    }
    let n = c.num_qubits();
    if n > MAX_UNITARY_QUBITS {
        return Err(Error::OracleBound {
            what: "qubit count",
            got: n,
            limit: MAX_UNITARY_QUBITS,
        });
    }
    let mut m = CMat::identity(1 << n);
    for instr in c.instructions() {
        let Instruction::Unitary { gate, qubits } = instr else {
            unreachable!()
        };
        apply_to_matrix(gate.matrix().matrix(), qubits, &mut m, n);
    }
    Ok(m)
}

/// All Kraus operators of a noisy circuit as dense matrices, enumerated in
/// mixed-radix order over the per-placeholder choices.
pub fn enumerate_kraus(c: &Circuit) -> Result<Vec<DenseOperator>> {
    let n = c.num_qubits();
    if n > MAX_KRAUS_QUBITS {
        return Err(Error::OracleBound {
            what: "qubit count",
            got: n,
            limit: MAX_KRAUS_QUBITS,
        });
    }
    let channels = c.noise_channels();
    let total: usize = channels.iter().map(|ch| ch.num_kraus()).product();
    if total > MAX_KRAUS_TERMS {
        return Err(Error::OracleBound {
            what: "Kraus term count",
            got: total,
            limit: MAX_KRAUS_TERMS,
        });
    }
    let radices: Vec<usize> = channels.iter().map(|ch| ch.num_kraus()).collect();
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        // decompose idx into per-channel choices, first channel slowest
        let mut rem = idx;
        let mut choice = vec![0usize; radices.len()];
        for i in (0..radices.len()).rev() {
            choice[i] = rem % radices[i];
            rem /= radices[i];
        }
        let mut m = CMat::identity(1 << n);
        let mut k = 0;
        for instr in c.instructions() {
            match instr {
                Instruction::Unitary { gate, qubits } => {
                    apply_to_matrix(gate.matrix().matrix(), qubits, &mut m, n);
                }
                Instruction::Noise { channel_id, qubit } => {
                    let ch = c.channel(channel_id);
                    apply_to_matrix(&ch.kraus()[choice[k]], &[*qubit], &mut m, n);
                    k += 1;
                }
            }
        }
        out.push(m);
    }
    // completeness: Σ E†E = I
    let mut sum = CMat::zeros(1 << n);
    for e in &out {
        sum = sum.add(&e.dagger().mul(e));
    }
    if !sum.is_identity(1e-9) {
        return Err(Error::Internal(
            "Kraus enumeration violates the completeness identity".into(),
        ));
    }
    Ok(out)
}

/// Jamiolkowski fidelity by two independent dense routes:
/// (a) the trace formula (1/d²) Σᵢ |tr(U†Eᵢ)|², and
/// (b) the Choi-state overlap ⟨Ψ_U| ρ_𝓔 |Ψ_U⟩ with row-major
/// vectorisation |i⟩⟨j| ↦ i·d + j.
/// Both must agree to 1e-10; route (a) is returned.
pub fn jamiolkowski_fidelity_dense(ideal: &Circuit, noisy: &Circuit) -> Result<f64> {
    if ideal.num_qubits() != noisy.num_qubits() {
        return Err(Error::QubitCountMismatch(
            ideal.num_qubits(),
            noisy.num_qubits(),
        ));
    }
    let u = circuit_unitary(ideal)?;
    let kraus = enumerate_kraus(noisy)?;
    let d = u.dim as f64;

    let trace_route: f64 = kraus
        .iter()
        .map(|e| u.overlap_trace(e).norm_sqr())
        .sum::<f64>()
        / (d * d);

    // |Ψ_U⟩ = (I ⊗ U)|Ψ⟩ has component U[k,i]/√d at index i·d + k
    let dim = u.dim;
    let mut psi_u = vec![ZERO; dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            psi_u[i * dim + k] = u.get(k, i) / d.sqrt();
        }
    }
    // ⟨Ψ_U| ρ_𝓔 |Ψ_U⟩ = Σ_E |⟨Ψ_U| (I⊗E) |Ψ⟩|²
    let mut choi_route = 0.0;
    for e in &kraus {
        let mut overlap = ZERO;
        for i in 0..dim {
            for k in 0..dim {
                overlap += psi_u[i * dim + k].conj() * e.get(k, i) / d.sqrt();
            }
        }
        choi_route += overlap.norm_sqr();
    }

    if (trace_route - choi_route).abs() > ROUTE_AGREEMENT_TOL {
        return Err(Error::OracleDisagreement {
            trace_route,
            choi_route,
        });
    }
    Ok(trace_route)
}

/// Monte-Carlo estimate of the average output fidelity over Haar-random
/// pure input states. Returns (mean, standard error); deterministic for a
/// fixed seed.
#[allow(clippy::needless_range_loop)]
pub fn haar_average_fidelity(
    ideal: &Circuit,
    noisy: &Circuit,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(Error::OracleBound {
            what: "sample count",
            got: 0,
            limit: usize::MAX,
        });
    }
    let n = ideal.num_qubits();
    if n > MAX_HAAR_QUBITS {
        return Err(Error::OracleBound {
            what: "qubit count",
            got: n,
            limit: MAX_HAAR_QUBITS,
        });
    }
    if n != noisy.num_qubits() {
        return Err(Error::QubitCountMismatch(n, noisy.num_qubits()));
    }
    let u = circuit_unitary(ideal)?;
    let kraus = enumerate_kraus(noisy)?;
    let dim = 1usize << n;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        // Haar-random pure state: normalized i.i.d. complex Gaussian
        let mut psi: Vec<Complex64> = (0..dim)
            .map(|_| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            })
            .collect();
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        psi.iter_mut().for_each(|z| *z /= norm);

        // F = Σ_E |⟨Uψ| E |ψ⟩|²
        let mut u_psi = vec![ZERO; dim];
        for r in 0..dim {
            let mut acc = ZERO;
            for c_ in 0..dim {
                acc += u.get(r, c_) * psi[c_];
            }
            u_psi[r] = acc;
        }
        let mut f = 0.0;
        for e in &kraus {
            let mut overlap = ZERO;
            for r in 0..dim {
                let mut acc = ZERO;
                for c_ in 0..dim {
                    acc += e.get(r, c_) * psi[c_];
                }
                overlap += u_psi[r].conj() * acc;
            }
            f += overlap.norm_sqr();
        }
        sum += f;
        sum_sq += f * f;
    }
    let mean = sum / samples as f64;
    let var = (sum_sq / samples as f64 - mean * mean).max(0.0);
    let stderr = (var / samples as f64).sqrt();
    Ok((mean, stderr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{gen_qft, noisy_qft2, random_circuit, Circuit};
    use crate::dense::{c, cr};
    use rand::rngs::StdRng;

    #[test]
    fn qft2_unitary_has_the_fourier_entries() {
        let u = circuit_unitary(&gen_qft(2).unwrap()).unwrap();
        let i = c(0.0, 1.0);
        for row in 0..4 {
            for col in 0..4 {
                let want = i.powu((row * col) as u32) / 2.0;
                assert!(
                    (u.get(row, col) - want).norm() < 1e-12,
                    "entry ({row},{col}): {} vs {want}",
                    u.get(row, col)
                );
            }
        }
    }

    #[test]
    fn empty_circuit_is_identity() {
        let u = circuit_unitary(&Circuit::new(2).unwrap()).unwrap();
        assert!(u.is_identity(0.0));
    }

    #[test]
    fn hadamard_mixes_amplitudes() {
        let mut circ = Circuit::new(1).unwrap();
        circ.push_named("h", vec![0], vec![]).unwrap();
        let u = circuit_unitary(&circ).unwrap();
        let (a0, a1) = (c(0.3, 0.1), c(-0.2, 0.9));
        let out0 = u.get(0, 0) * a0 + u.get(0, 1) * a1;
        let out1 = u.get(1, 0) * a0 + u.get(1, 1) * a1;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out0 - (a0 + a1) * s).norm() < 1e-12);
        assert!((out1 - (a0 - a1) * s).norm() < 1e-12);
    }

    #[test]
    fn gate_lifting_respects_qubit_order() {
        // cx 1 0 on 2 qubits: control = qubit 1 (LSB), target = qubit 0
        let mut circ = Circuit::new(2).unwrap();
        circ.push_named("cx", vec![1, 0], vec![]).unwrap();
        let u = circuit_unitary(&circ).unwrap();
        // |01⟩ (index 1) → |11⟩ (index 3)
        assert_eq!(u.get(3, 1), cr(1.0));
        assert_eq!(u.get(1, 1), ZERO);
        // |00⟩ fixed
        assert_eq!(u.get(0, 0), cr(1.0));
    }

    #[test]
    fn unitary_rejects_noisy_circuits_and_big_n() {
        let (_, noisy) = noisy_qft2(0.9).unwrap();
        assert!(circuit_unitary(&noisy).is_err());
        let big = Circuit::new(11).unwrap();
        assert!(circuit_unitary(&big).is_err());
    }

    #[test]
    fn kraus_enumeration_of_the_noisy_qft2() {
        let (_, noisy) = noisy_qft2(0.95).unwrap();
        let kraus = enumerate_kraus(&noisy).unwrap();
        assert_eq!(kraus.len(), 4);
    }

    #[test]
    fn kraus_enumeration_of_ideal_circuit_is_the_unitary() {
        let circ = gen_qft(2).unwrap();
        let kraus = enumerate_kraus(&circ).unwrap();
        assert_eq!(kraus.len(), 1);
        let u = circuit_unitary(&circ).unwrap();
        assert!(kraus[0].max_abs_diff(&u) < 1e-12);
    }

    #[test]
    fn kraus_completeness_on_random_circuits() {
        let mut rng = StdRng::seed_from_u64(4);
        for _ in 0..5 {
            let circ = random_circuit(&mut rng, 3, 8);
            let spec =
                crate::circuit::random_noise_spec(&mut rng, &circ, 2, "depolarizing", 0.7);
            let noisy = crate::circuit::insert_noise(&circ, &spec).unwrap();
            // enumerate_kraus errors if completeness fails
            let kraus = enumerate_kraus(&noisy).unwrap();
            assert_eq!(kraus.len(), 16);
        }
    }

    #[test]
    fn fidelity_of_noisy_qft2_is_p_squared() {
        for p in [0.5, 0.95, 0.999] {
            let (ideal, noisy) = noisy_qft2(p).unwrap();
            let fj = jamiolkowski_fidelity_dense(&ideal, &noisy).unwrap();
            assert!((fj - p * p).abs() < 1e-12, "p={p}: {fj}");
        }
    }

    #[test]
    fn self_fidelity_is_one() {
        let circ = gen_qft(3).unwrap();
        let fj = jamiolkowski_fidelity_dense(&circ, &circ).unwrap();
        assert!((fj - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_mean_is_exactly_one_for_noiseless() {
        let circ = gen_qft(2).unwrap();
        let (mean, stderr) = haar_average_fidelity(&circ, &circ, 200, 1).unwrap();
        assert!((mean - 1.0).abs() < 1e-10);
        assert!(stderr < 1e-10);
    }

    #[test]
    fn haar_mean_matches_the_average_fidelity_identity() {
        let p: f64 = 0.9;
        let (ideal, noisy) = noisy_qft2(p).unwrap();
        let fj = p * p;
        let d = 4.0;
        let expect = (d * fj + 1.0) / (d + 1.0);
        let (mean, stderr) = haar_average_fidelity(&ideal, &noisy, 10_000, 42).unwrap();
        assert!(
            (mean - expect).abs() < 3.0 * stderr.max(1e-6),
            "mean {mean} vs {expect} (stderr {stderr})"
        );
    }

    #[test]
    fn haar_sampling_is_seed_reproducible() {
        let (ideal, noisy) = noisy_qft2(0.8).unwrap();
        let a = haar_average_fidelity(&ideal, &noisy, 500, 7).unwrap();
        let b = haar_average_fidelity(&ideal, &noisy, 500, 7).unwrap();
        assert_eq!(a, b);
        let c_ = haar_average_fidelity(&ideal, &noisy, 500, 8).unwrap();
        assert_ne!(a.0, c_.0);
    }

    #[test]
    fn haar_estimate_tightens_with_more_samples() {
        let (ideal, noisy) = noisy_qft2(0.9).unwrap();
        let expect = (4.0 * 0.81 + 1.0) / 5.0;
        let (_, se_small) = haar_average_fidelity(&ideal, &noisy, 100, 3).unwrap();
        let (mean_big, se_big) = haar_average_fidelity(&ideal, &noisy, 20_000, 3).unwrap();
        assert!(se_big < se_small);
        assert!((mean_big - expect).abs() < 4.0 * se_big.max(1e-6));
    }
}
