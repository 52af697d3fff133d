//! Fixed-point phase arithmetic and the bit-inspection kernels evaluated by
//! each processing element.
//!
//! A phase is an unsigned binary fraction `0.b1b2...b8`, so `raw / 256` lies
//! in `[0, 1)` and every add or subtract wraps modulo one turn for free.
//! The coupling function reads `b1`, the two-state synchronization function
//! reads `b2`, and the three-state synchronization function looks up the top
//! three bits.

use std::fmt;
use std::ops::Neg;

/// Number of distinct phase codes.
pub const PHASE_STEPS: u16 = 256;

/// An oscillator phase as an 8-bit wrapping binary fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Phase8(pub u8);

impl Phase8 {
    pub const ZERO: Phase8 = Phase8(0);
    pub const HALF: Phase8 = Phase8(0x80);

    #[inline]
    pub const fn raw(self) -> u8 {
        self.0
    }

    /// Interpreted phase in turns, always in `[0, 1)`.
    #[inline]
    pub fn turns(self) -> f64 {
        f64::from(self.0) / f64::from(PHASE_STEPS)
    }

    #[inline]
    pub const fn wrapping_add(self, other: Phase8) -> Phase8 {
        Phase8(self.0.wrapping_add(other.0))
    }

    #[inline]
    pub const fn msb(self) -> bool {
        self.0 & 0x80 != 0
    }

    /// Octant index `raw >> 5`, i.e. the top three bits.
    #[inline]
    pub const fn octant(self) -> usize {
        (self.0 >> 5) as usize
    }
}

impl fmt::Display for Phase8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#04x}", self.0)
    }
}

/// Output of the coupling and synchronization functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    pub const fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i32) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Signed 8-bit coupling weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Weight8(pub i8);

impl Weight8 {
    /// Full-scale magnitude used by all problem mappings.
    pub const FULL_SCALE: i8 = 64;

    #[inline]
    pub const fn raw(self) -> i8 {
        self.0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Gradient accumulator. Wide enough to hold eight `±128` coupling terms
/// plus one sync term exactly.
pub type GradientAcc = i32;

/// Wrapping phase difference `(a - b) mod 1`.
#[inline]
pub const fn phase_diff(a: Phase8, b: Phase8) -> Phase8 {
    Phase8(a.0.wrapping_sub(b.0))
}

/// Coupling function: `+1` below half a turn, `-1` from half a turn on.
/// Reads only the MSB.
#[inline]
pub const fn f_c(psi: Phase8) -> Sign {
    if psi.msb() {
        Sign::Minus
    } else {
        Sign::Plus
    }
}

/// Two-state synchronization function. Reads only bit `b2`.
#[inline]
pub const fn f_s2(phi: Phase8) -> Sign {
    if phi.0 & 0x40 != 0 {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// Sign per octant for the three-state synchronization function. Each entry
/// is the sign covering the larger part of that octant under the real-valued
/// sixth-turn intervals (see [`f_s3_exact`]).
pub const F_S3_OCTANT_TABLE: [Sign; 8] = [
    Sign::Minus,
    Sign::Plus,
    Sign::Plus,
    Sign::Minus,
    Sign::Plus,
    Sign::Minus,
    Sign::Minus,
    Sign::Plus,
];

/// Three-state synchronization function as an octant lookup.
#[inline]
pub const fn f_s3(phi: Phase8) -> Sign {
    F_S3_OCTANT_TABLE[phi.octant()]
}

/// Real-valued three-state synchronization function with boundaries at
/// multiples of 1/6. Intervals are lower-inclusive.
///
/// # Panics
///
/// Panics if `phi` is outside `[0, 1)`.
pub fn f_s3_exact(phi: f64) -> Sign {
    assert!(
        (0.0..1.0).contains(&phi),
        "f_s3_exact: phase {phi} outside [0, 1)"
    );
    // Sextant k covers [k/6, (k+1)/6); even sextants are -1.
    // Compare against exact boundaries rather than floor(6 * phi) to keep
    // values like 1/3 on the correct side.
    const BOUNDS: [f64; 5] = [1.0 / 6.0, 1.0 / 3.0, 0.5, 2.0 / 3.0, 5.0 / 6.0];
    let sextant = BOUNDS.iter().filter(|&&b| phi >= b).count();
    if sextant % 2 == 0 {
        Sign::Minus
    } else {
        Sign::Plus
    }
}

/// `J * F_c` as a 2:1 mux: select `w` or `-w`. Widens before negating so
/// `-(-128)` is exact.
#[inline]
pub const fn signed_weight(w: Weight8, s: Sign) -> GradientAcc {
    let wide = w.0 as GradientAcc;
    match s {
        Sign::Plus => wide,
        Sign::Minus => -wide,
    }
}

/// Multiply by `h = 2^-m` with an arithmetic right shift (rounds toward
/// negative infinity). Positive sums below `2^m` vanish; negative sums never
/// do.
#[inline]
pub const fn scale_by_h(sum: GradientAcc, m: u32) -> i32 {
    debug_assert!(m <= 8);
    sum >> m
}

/// Forward Euler update `phi <- phi - delta` on the wrapping phase register.
#[inline]
pub const fn apply_update(phi: Phase8, delta: i32) -> Phase8 {
    // Truncating to u8 is the modulo-256 reduction.
    Phase8(phi.0.wrapping_sub(delta as u8))
}
