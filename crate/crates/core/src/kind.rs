use std::fmt;
use std::str::FromStr;

use crate::error::{log2_exact, DstError, Result};

/// Which of the four sine transforms a plan or graph computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TransformKind {
    Dst1,
    Dst2,
    Dst3,
    Dst4,
}

impl TransformKind {
    pub const ALL: [TransformKind; 4] = [Self::Dst1, Self::Dst2, Self::Dst3, Self::Dst4];

    /// The kind whose unitary matrix is the inverse of this one.
    pub fn inverse(self) -> Self {
        match self {
            Self::Dst1 => Self::Dst1,
            Self::Dst2 => Self::Dst3,
            Self::Dst3 => Self::Dst2,
            Self::Dst4 => Self::Dst4,
        }
    }

    /// Signal length handled for the radix size `n` (`n - 1` for DST-I).
    pub fn signal_len(self, n: usize) -> usize {
        match self {
            Self::Dst1 => n - 1,
            _ => n,
        }
    }

    /// Recovers the radix size `n = 2^t` from a signal length.
    pub fn size_for_len(self, len: usize) -> Result<usize> {
        match self {
            Self::Dst1 => {
                let n = len.checked_add(1).unwrap_or(0);
                if len >= 1 && log2_exact(n).is_some() {
                    Ok(n)
                } else {
                    Err(DstError::Size {
                        len,
                        constraint: "length+1 must be a power of two",
                    })
                }
            }
            _ => {
                if log2_exact(len).is_some() {
                    Ok(len)
                } else {
                    Err(DstError::Size {
                        len,
                        constraint: "length must be a power of two >= 2",
                    })
                }
            }
        }
    }

    /// Numeric tag used on the command line and in tables (1..=4).
    pub fn number(self) -> u8 {
        match self {
            Self::Dst1 => 1,
            Self::Dst2 => 2,
            Self::Dst3 => 3,
            Self::Dst4 => 4,
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DST{}", self.number())
    }
}

impl FromStr for TransformKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let t = s.trim();
        let t = t
            .strip_prefix("DST")
            .or_else(|| t.strip_prefix("dst"))
            .unwrap_or(t);
        let t = t.trim_start_matches(['-', '_']);
        match t {
            "1" | "I" | "i" => Ok(Self::Dst1),
            "2" | "II" | "ii" => Ok(Self::Dst2),
            "3" | "III" | "iii" => Ok(Self::Dst3),
            "4" | "IV" | "iv" => Ok(Self::Dst4),
            _ => Err(format!(
                "unknown transform kind '{s}' (expected 1, 2, 3 or 4)"
            )),
        }
    }
}

/// Output normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScaleMode {
    /// `sqrt(n) * S`, what the recursions produce natively.
    Scaled,
    /// `S` itself, orthogonal.
    Unitary,
}

impl FromStr for ScaleMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "scaled" => Ok(Self::Scaled),
            "unitary" => Ok(Self::Unitary),
            _ => Err(format!("unknown scale '{s}' (expected scaled or unitary)")),
        }
    }
}
