use serde::Serialize;

/// Resource caps that mark the edge of desk scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Caps {
    /// Maximum number of entries in any counting table, sumset or tuple graph
    /// row index.
    pub table_entries: u64,
    /// Maximum number of enumerated tuples or pair sums.
    pub iterations: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            table_entries: 100_000_000,
            iterations: 1_000_000_000,
        }
    }
}

impl Caps {
    /// Both caps set to `cap`.
    pub fn uniform(cap: u64) -> Self {
        Caps {
            table_entries: cap,
            iterations: cap,
        }
    }
}
