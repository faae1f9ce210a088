//! Circuit intermediate representation, text parser, adjoint/conjugate
//! transforms and benchmark generators.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::gates::{Gate, GateName};
use crate::noise::{channel_named, NoiseChannel};

/// One step of a circuit: either a unitary gate application or a noise
/// placeholder referencing a channel in the circuit's channel table.
#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    Unitary { gate: Gate, qubits: Vec<usize> },
    Noise { channel_id: String, qubit: usize },
}

impl Instruction {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Instruction::Unitary { qubits, .. } => qubits.clone(),
            Instruction::Noise { qubit, .. } => vec![*qubit],
        }
    }

    pub fn is_noise(&self) -> bool {
        matches!(self, Instruction::Noise { .. })
    }
}

/// An n-qubit circuit. A circuit without noise placeholders is "ideal" and
/// denotes a unitary; with placeholders it denotes a super-operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    instructions: Vec<Instruction>,
    channels: BTreeMap<String, NoiseChannel>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Result<Circuit> {
        if num_qubits == 0 {
            return Err(Error::NoQubits);
        }
        Ok(Circuit {
            num_qubits,
            instructions: Vec::new(),
            channels: BTreeMap::new(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn channels(&self) -> &BTreeMap<String, NoiseChannel> {
        &self.channels
    }

    pub fn channel(&self, id: &str) -> &NoiseChannel {
        &self.channels[id]
    }

    pub fn is_ideal(&self) -> bool {
        !self.instructions.iter().any(Instruction::is_noise)
    }

    pub fn num_noise(&self) -> usize {
        self.instructions.iter().filter(|i| i.is_noise()).count()
    }

    pub fn num_gates(&self) -> usize {
        self.instructions.len() - self.num_noise()
    }

    /// Channels of the noise placeholders, in instruction order.
    pub fn noise_channels(&self) -> Vec<&NoiseChannel> {
        self.instructions
            .iter()
            .filter_map(|i| match i {
                Instruction::Noise { channel_id, .. } => Some(&self.channels[channel_id]),
                _ => None,
            })
            .collect()
    }

    fn check_qubits(&self, qubits: &[usize]) -> Result<()> {
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.num_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    num_qubits: self.num_qubits,
                });
            }
            if qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    pub fn push_gate(&mut self, gate: Gate, qubits: Vec<usize>) -> Result<()> {
        if qubits.len() != gate.arity() {
            return Err(Error::GateArity {
                name: gate.label(),
                expected: gate.arity(),
                got: qubits.len(),
            });
        }
        self.check_qubits(&qubits)?;
        self.instructions.push(Instruction::Unitary { gate, qubits });
        Ok(())
    }

    pub fn push_named(&mut self, name: &str, qubits: Vec<usize>, params: Vec<f64>) -> Result<()> {
        self.push_gate(Gate::new(GateName::parse(name)?, params)?, qubits)
    }

    pub fn push_noise(&mut self, ch: NoiseChannel, qubit: usize) -> Result<()> {
        self.check_qubits(&[qubit])?;
        let id = format!("{}:{}", ch.label(), ch.p());
        self.channels.entry(id.clone()).or_insert(ch);
        self.instructions.push(Instruction::Noise {
            channel_id: id,
            qubit,
        });
        Ok(())
    }

    /// Gate list reversed, each gate replaced by its adjoint; denotes U†.
    pub fn adjoint(&self) -> Result<Circuit> {
        if !self.is_ideal() {
            return Err(Error::NoisyCircuit);
        }
        let mut out = Circuit::new(self.num_qubits)?;
        for instr in self.instructions.iter().rev() {
            if let Instruction::Unitary { gate, qubits } = instr {
                out.instructions.push(Instruction::Unitary {
                    gate: gate.to_adjoint(),
                    qubits: qubits.clone(),
                });
            }
        }
        Ok(out)
    }

    /// Each gate replaced by its entry-wise conjugate, order preserved;
    /// denotes U*.
    pub fn conjugate(&self) -> Result<Circuit> {
        if !self.is_ideal() {
            return Err(Error::NoisyCircuit);
        }
        let mut out = Circuit::new(self.num_qubits)?;
        for instr in &self.instructions {
            if let Instruction::Unitary { gate, qubits } = instr {
                out.instructions.push(Instruction::Unitary {
                    gate: gate.to_conjugate(),
                    qubits: qubits.clone(),
                });
            }
        }
        Ok(out)
    }

    /// Same circuit on `extra` additional (untouched) qubits.
    pub fn extend_qubits(&self, extra: usize) -> Circuit {
        let mut out = self.clone();
        out.num_qubits += extra;
        out
    }

    /// Concatenation: `self` runs first, then `other`.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::QubitCountMismatch(self.num_qubits, other.num_qubits));
        }
        let mut out = self.clone();
        for instr in &other.instructions {
            match instr {
                Instruction::Unitary { gate, qubits } => {
                    out.push_gate(gate.clone(), qubits.clone())?
                }
                Instruction::Noise { channel_id, qubit } => {
                    out.push_noise(other.channels[channel_id].clone(), *qubit)?
                }
            }
        }
        Ok(out)
    }

    /// Serialize to the line-based text format. Only plain named gates are
    /// representable; transformed (adjoint/conjugate) circuits are not.
    pub fn to_text(&self) -> Result<String> {
        let mut s = String::new();
        writeln!(s, "qubits {}", self.num_qubits).unwrap();
        for instr in &self.instructions {
            match instr {
                Instruction::Unitary { gate, qubits } => {
                    if !gate.is_plain() {
                        return Err(Error::Internal(
                            "transformed gates have no text representation".into(),
                        ));
                    }
                    write!(s, "{}", gate.name.as_str()).unwrap();
                    for q in qubits {
                        write!(s, " {}", q).unwrap();
                    }
                    for p in &gate.params {
                        write!(s, " {}", p).unwrap();
                    }
                    writeln!(s).unwrap();
                }
                Instruction::Noise { channel_id, qubit } => {
                    let ch = &self.channels[channel_id];
                    writeln!(s, "noise {} {} {}", ch.label(), qubit, ch.p()).unwrap();
                }
            }
        }
        Ok(s)
    }
}

/// Parse the line-based circuit format:
///
/// ```text
/// qubits <n>
/// <gate> <q...> [<angle>]
/// noise <channel> <q> <p>
/// ```
///
/// Blank lines and `#` comments are ignored.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let err = |msg: String| Error::Parse { line, msg };

        if circuit.is_none() {
            if tokens[0] != "qubits" || tokens.len() != 2 {
                return Err(err("expected header `qubits <n>`".into()));
            }
            let n: usize = tokens[1]
                .parse()
                .map_err(|_| err(format!("bad qubit count `{}`", tokens[1])))?;
            circuit = Some(Circuit::new(n).map_err(|e| err(e.to_string()))?);
            continue;
        }
        let c = circuit.as_mut().unwrap();

        if tokens[0] == "noise" {
            if tokens.len() != 4 {
                return Err(err("expected `noise <channel> <qubit> <p>`".into()));
            }
            let qubit: usize = tokens[2]
                .parse()
                .map_err(|_| err(format!("bad qubit index `{}`", tokens[2])))?;
            let p: f64 = tokens[3]
                .parse()
                .map_err(|_| err(format!("bad probability `{}`", tokens[3])))?;
            let ch = channel_named(tokens[1], p).map_err(|e| err(e.to_string()))?;
            c.push_noise(ch, qubit).map_err(|e| err(e.to_string()))?;
            continue;
        }

        let name = GateName::parse(tokens[0]).map_err(|e| err(e.to_string()))?;
        let arity = name.arity();
        let nparams = name.param_count();
        if tokens.len() != 1 + arity + nparams {
            return Err(err(format!(
                "gate `{}` takes {} qubit(s) and {} parameter(s)",
                tokens[0], arity, nparams
            )));
        }
        let mut qubits = Vec::with_capacity(arity);
        for t in &tokens[1..1 + arity] {
            qubits.push(
                t.parse::<usize>()
                    .map_err(|_| err(format!("bad qubit index `{}`", t)))?,
            );
        }
        let mut params = Vec::with_capacity(nparams);
        for t in &tokens[1 + arity..] {
            params.push(
                t.parse::<f64>()
                    .map_err(|_| err(format!("bad angle `{}`", t)))?,
            );
        }
        c.push_named(tokens[0], qubits, params)
            .map_err(|e| err(e.to_string()))?;
    }
    circuit.ok_or(Error::Parse {
        line: 0,
        msg: "missing `qubits <n>` header".into(),
    })
}

/// One entry of a noise-insertion spec. `after` indexes an instruction of
/// the ideal circuit; the channel is placed immediately after it
/// (`after == len` appends at the end).
#[derive(Debug, Clone, Deserialize, PartialEq)]
pub struct NoisePlacement {
    pub after: usize,
    pub qubit: usize,
    pub channel: String,
    pub p: f64,
}

/// Parse the JSON noise-spec format: an array of
/// `{"after": int, "qubit": int, "channel": string, "p": float}` objects.
pub fn parse_noise_spec(json: &str) -> Result<Vec<NoisePlacement>> {
    serde_json::from_str(json).map_err(|e| Error::NoiseSpec(e.to_string()))
}

/// Insert noise placeholders into an ideal circuit. Positions refer to the
/// original instruction indices.
#[allow(clippy::needless_range_loop)]
pub fn insert_noise(c: &Circuit, spec: &[NoisePlacement]) -> Result<Circuit> {
    if !c.is_ideal() {
        return Err(Error::NoisyCircuit);
    }
    let len = c.instructions.len();
    let mut by_slot: Vec<Vec<&NoisePlacement>> = vec![Vec::new(); len + 1];
    for pl in spec {
        if pl.after > len {
            return Err(Error::PositionOutOfRange {
                position: pl.after,
                len,
            });
        }
        if pl.qubit >= c.num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: pl.qubit,
                num_qubits: c.num_qubits,
            });
        }
        // validate name and probability eagerly for a precise error
        channel_named(&pl.channel, pl.p)?;
        let slot = (pl.after + 1).min(len);
        by_slot[slot].push(pl);
    }
    let mut out = Circuit::new(c.num_qubits)?;
    for slot in 0..=len {
        if slot > 0 {
            let Instruction::Unitary { gate, qubits } = &c.instructions[slot - 1] else {
                unreachable!("ideal circuit");
            };
            out.push_gate(gate.clone(), qubits.clone())?;
        }
        for pl in &by_slot[slot] {
            out.push_noise(channel_named(&pl.channel, pl.p)?, pl.qubit)?;
        }
    }
    Ok(out)
}

/// Quantum Fourier transform circuit. For n = 2 this is exactly
/// `h 0; cs 1 0; h 1; swap 0 1`.
pub fn gen_qft(n: usize) -> Result<Circuit> {
    let mut c = Circuit::new(n)?;
    for j in 0..n {
        c.push_named("h", vec![j], vec![])?;
        for k in j + 1..n {
            let dist = (k - j) as u32;
            if dist == 1 {
                c.push_named("cs", vec![k, j], vec![])?;
            } else {
                c.push_named("cp", vec![k, j], vec![PI / f64::from(1u32 << dist)])?;
            }
        }
    }
    for j in 0..n / 2 {
        c.push_named("swap", vec![j, n - 1 - j], vec![])?;
    }
    Ok(c)
}

/// Bernstein-Vazirani circuit: H on all qubits, CX from each secret-bit
/// qubit to the ancilla (the last qubit), H on all qubits.
pub fn gen_bv(n: usize, secret: &str) -> Result<Circuit> {
    let mut c = Circuit::new(n)?;
    if secret.len() != n - 1 || !secret.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::Internal(format!(
            "secret must be a bitstring of length {}",
            n - 1
        )));
    }
    for q in 0..n {
        c.push_named("h", vec![q], vec![])?;
    }
    for (i, b) in secret.bytes().enumerate() {
        if b == b'1' {
            c.push_named("cx", vec![i, n - 1], vec![])?;
        }
    }
    for q in 0..n {
        c.push_named("h", vec![q], vec![])?;
    }
    Ok(c)
}

const ONE_QUBIT_POOL: [GateName; 11] = [
    GateName::X,
    GateName::Y,
    GateName::Z,
    GateName::H,
    GateName::S,
    GateName::Sdg,
    GateName::T,
    GateName::Tdg,
    GateName::Rx,
    GateName::Ry,
    GateName::Rz,
];

const TWO_QUBIT_POOL: [GateName; 5] = [
    GateName::Cx,
    GateName::Cz,
    GateName::Cs,
    GateName::Cp,
    GateName::Swap,
];

/// Random ideal circuit over the builtin gate set; used by the cross-check
/// suites and `bench` fuzzing.
pub fn random_circuit<R: Rng>(rng: &mut R, num_qubits: usize, num_gates: usize) -> Circuit {
    let mut c = Circuit::new(num_qubits).expect("num_qubits >= 1");
    for _ in 0..num_gates {
        let two = num_qubits > 1 && rng.gen_bool(0.4);
        let name = if two {
            TWO_QUBIT_POOL[rng.gen_range(0..TWO_QUBIT_POOL.len())]
        } else {
            ONE_QUBIT_POOL[rng.gen_range(0..ONE_QUBIT_POOL.len())]
        };
        let mut qubits = vec![rng.gen_range(0..num_qubits)];
        if two {
            loop {
                let q = rng.gen_range(0..num_qubits);
                if q != qubits[0] {
                    qubits.push(q);
                    break;
                }
            }
        }
        let params = if name.param_count() == 1 {
            vec![rng.gen_range(-PI..PI)]
        } else {
            vec![]
        };
        c.push_gate(Gate::new(name, params).unwrap(), qubits).unwrap();
    }
    c
}

/// Insert `count` noises of the given kind at random positions/qubits.
pub fn random_noise_spec<R: Rng>(
    rng: &mut R,
    c: &Circuit,
    count: usize,
    channel: &str,
    p: f64,
) -> Vec<NoisePlacement> {
    let len = c.instructions().len();
    (0..count)
        .map(|_| NoisePlacement {
            after: rng.gen_range(0..=len.saturating_sub(1)),
            qubit: rng.gen_range(0..c.num_qubits()),
            channel: channel.to_string(),
            p,
        })
        .collect()
}

/// The noisy 2-qubit QFT used throughout the examples: a bit flip on q1
/// after the first gate and a phase flip on q0 after the second.
pub fn noisy_qft2(p: f64) -> Result<(Circuit, Circuit)> {
    let ideal = gen_qft(2)?;
    let noisy = insert_noise(
        &ideal,
        &[
            NoisePlacement {
                after: 0,
                qubit: 1,
                channel: "bit_flip".into(),
                p,
            },
            NoisePlacement {
                after: 1,
                qubit: 0,
                channel: "phase_flip".into(),
                p,
            },
        ],
    )?;
    Ok((ideal, noisy))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_qft2_example() {
        let c = parse_circuit("qubits 2\nh 0\ncs 1 0\nh 1\nswap 0 1").unwrap();
        assert_eq!(c.num_qubits(), 2);
        assert_eq!(c.instructions().len(), 4);
        assert_eq!(c, gen_qft(2).unwrap());
    }

    #[test]
    fn parse_empty_circuit() {
        let c = parse_circuit("qubits 1").unwrap();
        assert_eq!(c.num_qubits(), 1);
        assert!(c.instructions().is_empty());
        assert!(c.is_ideal());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = parse_circuit("qubits 2\nh 5").unwrap_err();
        match e {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
        assert!(parse_circuit("qubits 2\ncx 1 1").is_err());
        assert!(parse_circuit("qubits 2\nfoo 0").is_err());
        assert!(parse_circuit("qubits 2\nrx 0").is_err());
        assert!(parse_circuit("qubits 0").is_err());
        assert!(parse_circuit("h 0").is_err());
        assert!(parse_circuit("qubits 2\nnoise bit_flip 0 1.5").is_err());
    }

    #[test]
    fn parse_noise_line_and_comments() {
        let c = parse_circuit("# a noisy circuit\nqubits 2\nh 0 # hadamard\n\nnoise bit_flip 1 0.9\n").unwrap();
        assert_eq!(c.num_noise(), 1);
        assert_eq!(c.noise_channels()[0].label(), "bit_flip");
    }

    #[test]
    fn text_round_trip() {
        let (_, noisy) = noisy_qft2(0.95).unwrap();
        let text = noisy.to_text().unwrap();
        let reparsed = parse_circuit(&text).unwrap();
        assert_eq!(noisy, reparsed);
    }

    #[test]
    fn adjoint_of_qft2_reverses_and_daggers() {
        let c = gen_qft(2).unwrap();
        let adj = c.adjoint().unwrap();
        assert_eq!(adj.instructions().len(), 4);
        let labels: Vec<String> = adj
            .instructions()
            .iter()
            .map(|i| match i {
                Instruction::Unitary { gate, .. } => gate.label(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(labels, ["swap†", "h†", "cs†", "h†"]);
        assert_eq!(c.adjoint().unwrap().adjoint().unwrap().num_gates(), 4);
    }

    #[test]
    fn adjoint_of_empty_is_empty() {
        let c = Circuit::new(3).unwrap();
        assert!(c.adjoint().unwrap().instructions().is_empty());
    }

    #[test]
    fn transforms_reject_noisy_circuits() {
        let (_, noisy) = noisy_qft2(0.9).unwrap();
        assert!(noisy.adjoint().is_err());
        assert!(noisy.conjugate().is_err());
    }

    #[test]
    fn conjugate_preserves_order_and_counts() {
        let c = gen_qft(2).unwrap();
        let conj = c.conjugate().unwrap();
        assert_eq!(conj.instructions().len(), c.instructions().len());
        // CS is the only complex-valued gate here; its conjugate has -i
        let Instruction::Unitary { gate, .. } = &conj.instructions()[1] else {
            panic!()
        };
        let m = gate.matrix();
        assert_eq!(m.matrix().get(3, 3), crate::dense::c(0.0, -1.0));
    }

    #[test]
    fn conjugate_of_real_circuit_is_identical_matrixwise() {
        let mut c = Circuit::new(2).unwrap();
        c.push_named("h", vec![0], vec![]).unwrap();
        c.push_named("x", vec![1], vec![]).unwrap();
        c.push_named("cx", vec![0, 1], vec![]).unwrap();
        let conj = c.conjugate().unwrap();
        for (a, b) in c.instructions().iter().zip(conj.instructions()) {
            let (Instruction::Unitary { gate: ga, .. }, Instruction::Unitary { gate: gb, .. }) =
                (a, b)
            else {
                panic!()
            };
            assert_eq!(ga.matrix().matrix(), gb.matrix().matrix());
        }
    }

    #[test]
    fn qft_generator_shapes() {
        let q1 = gen_qft(1).unwrap();
        assert_eq!(q1.instructions().len(), 1);
        assert!(gen_qft(0).is_err());

        let q2 = gen_qft(2).unwrap();
        assert_eq!(q2.to_text().unwrap(), "qubits 2\nh 0\ncs 1 0\nh 1\nswap 0 1\n");

        let q4 = gen_qft(4).unwrap();
        assert_eq!(q4.num_gates(), 4 + 6 + 2);
    }

    #[test]
    fn bv_generator_shapes() {
        let c = gen_bv(2, "1").unwrap();
        assert_eq!(c.num_gates(), 5);
        assert!(gen_bv(3, "1").is_err());
        assert!(gen_bv(3, "12").is_err());
        // all-ones secret matches the |G| = 2n + (n-1) family
        let c5 = gen_bv(5, "1111").unwrap();
        assert_eq!(c5.num_gates(), 14);
    }

    #[test]
    fn insert_noise_builds_the_noisy_qft2() {
        let (_, noisy) = noisy_qft2(0.5).unwrap();
        let kinds: Vec<_> = noisy
            .instructions()
            .iter()
            .map(|i| match i {
                Instruction::Unitary { gate, .. } => gate.label(),
                Instruction::Noise { channel_id, .. } => channel_id.clone(),
            })
            .collect();
        assert_eq!(
            kinds,
            ["h", "bit_flip:0.5", "cs", "phase_flip:0.5", "h", "swap"]
        );
    }

    #[test]
    fn insert_noise_edge_cases() {
        let c = gen_qft(2).unwrap();
        assert_eq!(insert_noise(&c, &[]).unwrap(), c);
        let bad_pos = NoisePlacement {
            after: 9,
            qubit: 0,
            channel: "bit_flip".into(),
            p: 0.5,
        };
        assert!(insert_noise(&c, &[bad_pos]).is_err());
        let bad_qubit = NoisePlacement {
            after: 0,
            qubit: 7,
            channel: "bit_flip".into(),
            p: 0.5,
        };
        assert!(insert_noise(&c, &[bad_qubit]).is_err());
        let bad_p = NoisePlacement {
            after: 0,
            qubit: 0,
            channel: "bit_flip".into(),
            p: 1.5,
        };
        assert!(insert_noise(&c, &[bad_p]).is_err());
        let bad_name = NoisePlacement {
            after: 0,
            qubit: 0,
            channel: "thermal".into(),
            p: 0.5,
        };
        assert!(insert_noise(&c, &[bad_name]).is_err());
        // position == len appends at the end
        let at_end = NoisePlacement {
            after: 4,
            qubit: 0,
            channel: "bit_flip".into(),
            p: 0.5,
        };
        let out = insert_noise(&c, &[at_end]).unwrap();
        assert!(out.instructions().last().unwrap().is_noise());
    }

    #[test]
    fn noise_spec_json_parses() {
        let spec = parse_noise_spec(
            r#"[{"after": 0, "qubit": 1, "channel": "bit_flip", "p": 0.95}]"#,
        )
        .unwrap();
        assert_eq!(spec.len(), 1);
        assert_eq!(spec[0].qubit, 1);
        assert!(parse_noise_spec("not json").is_err());
    }
}
