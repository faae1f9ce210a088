//! Kraus noise channels and their linear-map matrix representation.

use crate::dense::{cr, CMat};
use crate::error::{Error, Result};
use crate::gates::{builtin, GateName};

pub const NORMALISATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    BitFlip,
    PhaseFlip,
    BitPhaseFlip,
    Depolarizing,
}

impl ChannelKind {
    pub fn parse(s: &str) -> Result<ChannelKind> {
        Ok(match s {
            "bit_flip" => ChannelKind::BitFlip,
            "phase_flip" => ChannelKind::PhaseFlip,
            "bit_phase_flip" => ChannelKind::BitPhaseFlip,
            "depolarizing" => ChannelKind::Depolarizing,
            _ => return Err(Error::UnknownChannel(s.to_string())),
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ChannelKind::BitFlip => "bit_flip",
            ChannelKind::PhaseFlip => "phase_flip",
            ChannelKind::BitPhaseFlip => "bit_phase_flip",
            ChannelKind::Depolarizing => "depolarizing",
        }
    }
}

/// A noise channel in Kraus operator-sum form. `p` is the no-error
/// probability: with probability `1 - p` the channel applies its error
/// operator(s).
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseChannel {
    arity: usize,
    kraus: Vec<CMat>,
    label: String,
    p: f64,
}

impl NoiseChannel {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn num_kraus(&self) -> usize {
        self.kraus.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    /// Σₖ Nₖ†Nₖ must equal the identity.
    pub fn validate(&self) -> Result<()> {
        let mut sum = CMat::zeros(self.dim());
        for k in &self.kraus {
            sum = sum.add(&k.dagger().mul(k));
        }
        if sum.is_identity(NORMALISATION_TOL) {
            Ok(())
        } else {
            Err(Error::Internal(format!(
                "channel `{}` violates the Kraus normalisation condition",
                self.label
            )))
        }
    }

    /// Matrix representation Σₖ Nₖ ⊗ Nₖ*. The first tensor factor acts on
    /// the original qubit, the second on its primed auxiliary copy.
    pub fn matrix_rep(&self) -> CMat {
        let d = self.dim();
        let mut sum = CMat::zeros(d * d);
        for k in &self.kraus {
            sum = sum.add(&k.kron(&k.conjugate()));
        }
        sum
    }
}

fn pauli(name: GateName) -> CMat {
    builtin(name, &[]).expect("builtin pauli").into_matrix()
}

/// Build one of the four canonical 1-qubit channels. Kraus operators whose
/// coefficient is exactly zero (the p = 0 and p = 1 boundaries) are dropped.
pub fn channel(kind: ChannelKind, p: f64) -> Result<NoiseChannel> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidProbability(p));
    }
    let id = pauli(GateName::I);
    let mut kraus = Vec::new();
    let mut push = |weight: f64, m: &CMat| {
        if weight > 0.0 {
            kraus.push(m.scale(cr(weight.sqrt())));
        }
    };
    match kind {
        ChannelKind::BitFlip => {
            push(p, &id);
            push(1.0 - p, &pauli(GateName::X));
        }
        ChannelKind::PhaseFlip => {
            push(p, &id);
            push(1.0 - p, &pauli(GateName::Z));
        }
        ChannelKind::BitPhaseFlip => {
            push(p, &id);
            push(1.0 - p, &pauli(GateName::Y));
        }
        ChannelKind::Depolarizing => {
            push(p, &id);
            push((1.0 - p) / 3.0, &pauli(GateName::X));
            push((1.0 - p) / 3.0, &pauli(GateName::Y));
            push((1.0 - p) / 3.0, &pauli(GateName::Z));
        }
    }
    let ch = NoiseChannel {
        arity: 1,
        kraus,
        label: kind.as_str().to_string(),
        p,
    };
    ch.validate()?;
    Ok(ch)
}

pub fn channel_named(name: &str, p: f64) -> Result<NoiseChannel> {
    channel(ChannelKind::parse(name)?, p)
}
