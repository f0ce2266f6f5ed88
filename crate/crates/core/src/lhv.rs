//! Classical oracle: exhaustive enumeration of strategies that are realistic
//! (outcomes predetermined) and local in time (an outcome does not depend on
//! which setting is chosen at another time).
//!
//! Shared randomness is a convex mixture of deterministic strategies, and both
//! the CHSH value and the game success probability are affine in the mixture
//! weights, so the deterministic maximum is the classical maximum.

use serde::{Deserialize, Serialize};

pub const CHSH_STRATEGY_COUNT: usize = 16;
pub const GAME_STRATEGY_COUNT: usize = 1024;

/// Sign of index bit `bit` of `index`: 0 → +1, 1 → −1.
fn sign_bit(index: usize, bit: usize) -> i8 {
    if (index >> bit) & 1 == 0 {
        1
    } else {
        -1
    }
}

#[inline]
fn slot(s: i8) -> usize {
    usize::from(s < 0)
}

/// Predetermined ±1 outcomes for both settings at both times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicAssignment {
    pub a1: i8,
    pub a2: i8,
    pub b1: i8,
    pub b2: i8,
}

impl DeterministicAssignment {
    /// All 16 assignments, lexicographic in (a1, a2, b1, b2) with +1 before −1.
    pub fn all() -> impl Iterator<Item = Self> {
        (0..CHSH_STRATEGY_COUNT).map(|i| Self {
            a1: sign_bit(i, 3),
            a2: sign_bit(i, 2),
            b1: sign_bit(i, 1),
            b2: sign_bit(i, 0),
        })
    }

    /// A1(B1 + B2) + A2(B1 − B2), always ±2.
    pub fn signed_chsh(&self) -> i32 {
        let (a1, a2, b1, b2) = (
            i32::from(self.a1),
            i32::from(self.a2),
            i32::from(self.b1),
            i32::from(self.b2),
        );
        a1 * (b1 + b2) + a2 * (b1 - b2)
    }

    pub fn chsh_value(&self) -> f64 {
        f64::from(self.signed_chsh().abs())
    }
}

/// Maximum CHSH value over all deterministic assignments, with the first
/// maximizing assignment.
pub fn classical_bell_max() -> (f64, DeterministicAssignment) {
    DeterministicAssignment::all()
        .map(|a| (a.chsh_value(), a))
        .fold(
            None::<(f64, DeterministicAssignment)>,
            |best, cur| match best {
                Some(b) if b.0 >= cur.0 => Some(b),
                _ => Some(cur),
            },
        )
        .expect("non-empty")
}

/// CHSH value of a convex mixture; `weights[i]` belongs to the i-th assignment
/// of [`DeterministicAssignment::all`].
pub fn mixture_chsh_value(weights: &[f64; CHSH_STRATEGY_COUNT]) -> f64 {
    let mut e = [0.0; 4];
    for (w, a) in weights.iter().zip(DeterministicAssignment::all()) {
        e[0] += w * f64::from(a.a1 * a.b1);
        e[1] += w * f64::from(a.a1 * a.b2);
        e[2] += w * f64::from(a.a2 * a.b1);
        e[3] += w * f64::from(a.a2 * a.b2);
    }
    (e[0] + e[1] + e[2] - e[3]).abs()
}

/// The target f(y, x₁, x₂) = y·(−1)^{x₁x₂}.
#[inline]
pub fn target(y: i8, x1: u8, x2: u8) -> i8 {
    if x1 & x2 == 1 {
        -y
    } else {
        y
    }
}

/// A deterministic, local-in-time protocol with some writable memory, read
/// at input times t₀ (y ∈ ±1), t₁ (x₁ ∈ {0,1}) and t₂ (x₂ ∈ {0,1}).
pub trait RamProtocol {
    type Memory: Copy;

    fn load(&self, y: i8) -> Self::Memory;
    fn update(&self, m: Self::Memory, x1: u8) -> Self::Memory;
    fn output(&self, m: Self::Memory, x2: u8) -> i8;

    fn run(&self, y: i8, x1: u8, x2: u8) -> i8 {
        self.output(self.update(self.load(y), x1), x2)
    }
}

/// All eight inputs (y, x₁, x₂).
pub fn all_inputs() -> impl Iterator<Item = (i8, u8, u8)> {
    [1i8, -1]
        .into_iter()
        .flat_map(|y| (0..2u8).flat_map(move |x1| (0..2u8).map(move |x2| (y, x1, x2))))
}

/// Exact success probability over the eight equiprobable inputs.
pub fn evaluate_protocol<P: RamProtocol + ?Sized>(p: &P) -> f64 {
    let wins = all_inputs()
        .filter(|&(y, x1, x2)| p.run(y, x1, x2) == target(y, x1, x2))
        .count();
    wins as f64 / 8.0
}

/// 1-bit memory strategy with the bit held as ±1.
///
/// Each table stores a multiplier applied to the value it reads, in the
/// manner of a multiplication gate: m₀ = y·load[y], m₁ = m₀·update[m₀][x₁],
/// output = m₁·emit[m₁][x₂]. Since ±1 multipliers are a bijection onto ±1
/// values this covers every deterministic table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MemoryStrategy {
    /// Indexed by y: [+1, −1].
    pub load: [i8; 2],
    /// Indexed by [m: +1, −1][x₁].
    pub update: [[i8; 2]; 2],
    /// Indexed by [m: +1, −1][x₂].
    pub emit: [[i8; 2]; 2],
}

impl MemoryStrategy {
    /// Stores y and never changes it: always outputs y.
    pub const OUTPUT_Y: Self = Self {
        load: [1, 1],
        update: [[1, 1], [1, 1]],
        emit: [[1, 1], [1, 1]],
    };

    pub fn from_index(index: usize) -> Self {
        assert!(index < GAME_STRATEGY_COUNT);
        // most significant bits first: load, update, emit
        let b = |k: usize| sign_bit(index, 9 - k);
        Self {
            load: [b(0), b(1)],
            update: [[b(2), b(3)], [b(4), b(5)]],
            emit: [[b(6), b(7)], [b(8), b(9)]],
        }
    }

    /// All 1024 strategies in lexicographic order of their multiplier tables
    /// (+1 before −1).
    pub fn all() -> impl Iterator<Item = Self> {
        (0..GAME_STRATEGY_COUNT).map(Self::from_index)
    }

    /// Always outputs −y.
    pub fn output_minus_y() -> Self {
        Self {
            load: [-1, -1],
            ..Self::OUTPUT_Y
        }
    }

    /// Always outputs +1.
    pub fn output_plus() -> Self {
        Self {
            emit: [[1, 1], [-1, -1]],
            ..Self::OUTPUT_Y
        }
    }

    /// Rendered as value tables (m₀ per y, m₁ per (m₀, x₁), output per (m₁, x₂)).
    pub fn value_tables(&self) -> StrategyTables {
        let ys = [1i8, -1];
        StrategyTables {
            init: ys.map(|y| self.load(y)),
            step1: ys.map(|m| [0u8, 1].map(|x| self.update(m, x))),
            step2: ys.map(|m| [0u8, 1].map(|x| self.output(m, x))),
        }
    }
}

/// Plain value tables of a [`MemoryStrategy`], rows indexed by +1 then −1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyTables {
    pub init: [i8; 2],
    pub step1: [[i8; 2]; 2],
    pub step2: [[i8; 2]; 2],
}

impl RamProtocol for MemoryStrategy {
    type Memory = i8;

    fn load(&self, y: i8) -> i8 {
        y * self.load[slot(y)]
    }

    fn update(&self, m: i8, x1: u8) -> i8 {
        m * self.update[slot(m)][usize::from(x1)]
    }

    fn output(&self, m: i8, x2: u8) -> i8 {
        m * self.emit[slot(m)][usize::from(x2)]
    }
}

pub fn evaluate_strategy(s: &MemoryStrategy) -> f64 {
    evaluate_protocol(s)
}

/// Best success probability over all 1024 one-bit strategies, with the first
/// maximizing strategy.
pub fn classical_game_max() -> (f64, MemoryStrategy) {
    MemoryStrategy::all()
        .map(|s| (evaluate_strategy(&s), s))
        .fold(None::<(f64, MemoryStrategy)>, |best, cur| match best {
            Some(b) if b.0 >= cur.0 => Some(b),
            _ => Some(cur),
        })
        .expect("non-empty")
}

/// Deterministic strategy with two bits of memory (four states, 0..4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoBitStrategy {
    /// Indexed by y: [+1, −1].
    pub init: [u8; 2],
    /// Indexed by [state][x₁].
    pub step1: [[u8; 2]; 4],
    /// Indexed by [state][x₂].
    pub step2: [[i8; 2]; 4],
}

impl TwoBitStrategy {
    /// Bit 0 holds y (0 ↔ +1), bit 1 holds x₁; the output is y·(−1)^{x₁x₂}.
    pub fn store_y_and_x1() -> Self {
        let y_of = |state: usize| if state & 1 == 0 { 1i8 } else { -1 };
        let x1_of = |state: usize| (state >> 1) as u8;
        Self {
            init: [0, 1],
            step1: std::array::from_fn(|s| [(s & 1) as u8, (s & 1) as u8 | 2]),
            step2: std::array::from_fn(|s| [0u8, 1].map(|x2| target(y_of(s), x1_of(s), x2))),
        }
    }
}

impl RamProtocol for TwoBitStrategy {
    type Memory = u8;

    fn load(&self, y: i8) -> u8 {
        self.init[slot(y)]
    }

    fn update(&self, m: u8, x1: u8) -> u8 {
        self.step1[usize::from(m)][usize::from(x1)]
    }

    fn output(&self, m: u8, x2: u8) -> i8 {
        self.step2[usize::from(m)][usize::from(x2)]
    }
}
