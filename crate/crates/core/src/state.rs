//! Lattice configurations and the three index conventions.
//!
//! A configuration assigns every site a level in `{0, …, m-1}`; level 0 is
//! an empty site and level `k ≥ 1` a particle of species `k`. Three integer
//! labels are attached to a configuration `x = (x_1, …, x_N)`:
//!
//! * `dec(x) = Σ x_i · m^(N-i)` — the base-`m` value, site 1 most significant;
//! * `ord(x) = dec(x) + 1` — 1-based lexicographic rank;
//! * `delta_index(x) = m^N − dec(x)` — the row/column a configuration
//!   occupies in every structure matrix (descending decimal value).

use crate::error::{Error, Result};

/// Lattice geometry: `sites` positions, each holding a level below `levels`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeSpec {
    sites: usize,
    levels: usize,
    states: usize,
}

impl LatticeSpec {
    /// Requires at least one site, at least two levels, and `levels^sites`
    /// representable in `usize`.
    pub fn new(sites: usize, levels: usize) -> Result<Self> {
        if sites == 0 {
            return Err(Error::InvalidLattice("lattice needs at least one site".into()));
        }
        if levels < 2 {
            return Err(Error::InvalidLattice(format!(
                "need at least two levels, got {levels}"
            )));
        }
        let mut states: usize = 1;
        for _ in 0..sites {
            states = states
                .checked_mul(levels)
                .ok_or(Error::StateSpaceOverflow { sites, levels })?;
        }
        Ok(Self { sites, levels, states })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Number of particle species, `levels − 1`.
    pub fn species(&self) -> usize {
        self.levels - 1
    }

    /// Total number of configurations, `levels ^ sites`.
    pub fn state_count(&self) -> usize {
        self.states
    }

    /// Validates digit count and range.
    pub fn state(&self, digits: Vec<usize>) -> Result<State> {
        if digits.len() != self.sites {
            return Err(Error::InvalidState(format!(
                "expected {} digits, got {}",
                self.sites,
                digits.len()
            )));
        }
        if let Some(&bad) = digits.iter().find(|&&d| d >= self.levels) {
            return Err(Error::InvalidState(format!(
                "digit {bad} out of range for {} levels",
                self.levels
            )));
        }
        Ok(State { digits })
    }

    /// The all-empty configuration.
    pub fn empty_state(&self) -> State {
        State { digits: vec![0; self.sites] }
    }

    /// Base-`m` value of the configuration, site 1 most significant.
    pub fn dec(&self, s: &State) -> usize {
        dec_of(&s.digits, self.levels)
    }

    /// 1-based lexicographic rank, `dec + 1`.
    pub fn ord(&self, s: &State) -> usize {
        self.dec(s) + 1
    }

    /// 1-based position of the configuration in delta ordering,
    /// `state_count − dec`.
    pub fn delta_index(&self, s: &State) -> usize {
        self.states - self.dec(s)
    }

    /// Inverse of [`dec`](Self::dec): the configuration whose base-`m`
    /// value is `n`.
    pub fn state_from_dec(&self, n: usize) -> Result<State> {
        if n >= self.states {
            return Err(Error::IndexOutOfRange {
                what: "decimal state value",
                index: n,
                limit: self.states,
            });
        }
        let mut digits = vec![0usize; self.sites];
        let mut rest = n;
        for d in digits.iter_mut().rev() {
            *d = rest % self.levels;
            rest /= self.levels;
        }
        Ok(State { digits })
    }

    /// Configuration at 1-based delta index `j`, i.e. with `dec = m^N − j`.
    pub fn state_from_delta_index(&self, j: usize) -> Result<State> {
        if j == 0 || j > self.states {
            return Err(Error::IndexOutOfRange {
                what: "delta index",
                index: j,
                limit: self.states,
            });
        }
        self.state_from_dec(self.states - j)
    }

    /// Visits every configuration in delta order (descending decimal value).
    /// The callback receives the 0-based position (`delta_index − 1`) and the
    /// digit slice; the slice is reused between calls.
    pub fn for_each_state_delta_order<F: FnMut(usize, &[usize])>(&self, mut f: F) {
        let mut digits = vec![self.levels - 1; self.sites];
        for pos in 0..self.states {
            f(pos, &digits);
            // decrement the base-m odometer
            for d in digits.iter_mut().rev() {
                if *d > 0 {
                    *d -= 1;
                    break;
                }
                *d = self.levels - 1;
            }
        }
    }
}

/// A lattice configuration; digits are levels per site, left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct State {
    digits: Vec<usize>,
}

impl State {
    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    pub fn into_digits(self) -> Vec<usize> {
        self.digits
    }

    /// Digit string such as `01102`, site 1 first. Sites with levels ≥ 10
    /// are separated by `.` instead.
    pub fn label(&self, lattice: &LatticeSpec) -> String {
        if lattice.levels() <= 10 {
            self.digits.iter().map(|d| d.to_string()).collect()
        } else {
            self.digits
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    pub(crate) fn from_digits_unchecked(digits: Vec<usize>) -> Self {
        State { digits }
    }
}

pub(crate) fn dec_of(digits: &[usize], levels: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * levels + d)
}

/// Maps a multi-valued configuration to its species-indicator form: one
/// Boolean row per species, rows stacked site-major, so the result has
/// `(m−1)·N` Boolean sites. Bit `(n−1)·N + i` is set iff site `i+1` holds
/// species `n`.
pub fn booleanize(lattice: &LatticeSpec, s: &State) -> Result<(LatticeSpec, State)> {
    let n = lattice.sites();
    let rows = lattice.species();
    let bool_lattice = LatticeSpec::new(rows * n, 2)?;
    let mut digits = vec![0usize; rows * n];
    for (i, &x) in s.digits().iter().enumerate() {
        if x > 0 {
            digits[(x - 1) * n + i] = 1;
        }
    }
    Ok((bool_lattice, State { digits }))
}

/// Inverse of [`booleanize`]. Rejects indicator states that mark the same
/// site with more than one species.
pub fn debooleanize(original: &LatticeSpec, indicator: &State) -> Result<State> {
    let n = original.sites();
    let rows = original.species();
    if indicator.digits().len() != rows * n {
        return Err(Error::InvalidState(format!(
            "indicator state has {} digits, expected {}",
            indicator.digits().len(),
            rows * n
        )));
    }
    let mut digits = vec![0usize; n];
    for (i, slot) in digits.iter_mut().enumerate() {
        for species in 1..=rows {
            let bit = indicator.digits()[(species - 1) * n + i];
            if bit > 1 {
                return Err(Error::InvalidState("indicator digits must be Boolean".into()));
            }
            if bit == 1 {
                if *slot != 0 {
                    return Err(Error::InvalidState(format!(
                        "site {} is occupied by more than one species",
                        i + 1
                    )));
                }
                *slot = species;
            }
        }
    }
    original.state(digits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(n: usize, m: usize) -> LatticeSpec {
        LatticeSpec::new(n, m).unwrap()
    }

    #[test]
    fn dec_matches_base_m_value() {
        let l = lat(5, 2);
        let s = l.state(vec![1, 0, 0, 0, 0]).unwrap();
        assert_eq!(l.dec(&s), 16);
        assert_eq!(l.ord(&s), 17);

        let l2 = lat(2, 2);
        assert_eq!(l2.dec(&l2.empty_state()), 0);

        let l3 = lat(4, 3);
        let s3 = l3.state(vec![0, 1, 0, 2]).unwrap();
        assert_eq!(l3.dec(&s3), 11);
    }

    #[test]
    fn state_from_dec_inverts_dec() {
        let l = lat(3, 2);
        assert_eq!(l.state_from_dec(4).unwrap().digits(), &[1, 0, 0]);
        assert_eq!(l.state_from_dec(0).unwrap(), l.empty_state());

        let l3 = lat(4, 3);
        assert_eq!(l3.state_from_dec(11).unwrap().digits(), &[0, 1, 0, 2]);
        for n in 0..l3.state_count() {
            let s = l3.state_from_dec(n).unwrap();
            assert_eq!(l3.dec(&s), n);
        }
    }

    #[test]
    fn state_from_dec_rejects_out_of_range() {
        let l = lat(3, 2);
        assert!(matches!(
            l.state_from_dec(8),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn delta_index_convention() {
        let l = lat(3, 2);
        let s = l.state(vec![0, 1, 1]).unwrap();
        assert_eq!(l.delta_index(&s), 5);

        // the maximal state sits first
        let top = l.state(vec![1, 1, 1]).unwrap();
        assert_eq!(l.delta_index(&top), 1);

        let l3 = lat(4, 3);
        let s3 = l3.state(vec![0, 1, 0, 2]).unwrap();
        assert_eq!(l3.delta_index(&s3), 70);
    }

    #[test]
    fn lattice_rejects_degenerate_shapes() {
        assert!(LatticeSpec::new(0, 2).is_err());
        assert!(LatticeSpec::new(3, 1).is_err());
        assert!(matches!(
            LatticeSpec::new(200, 2),
            Err(Error::StateSpaceOverflow { .. })
        ));
    }

    #[test]
    fn state_validation() {
        let l = lat(2, 3);
        assert!(l.state(vec![0, 3]).is_err());
        assert!(l.state(vec![0]).is_err());
        assert!(l.state(vec![2, 1]).is_ok());
    }

    #[test]
    fn delta_order_walk_descends() {
        let l = lat(2, 3);
        let mut seen = Vec::new();
        l.for_each_state_delta_order(|pos, digits| {
            assert_eq!(l.state_count() - 1 - dec_of(digits, 3), pos);
            seen.push(digits.to_vec());
        });
        assert_eq!(seen.len(), 9);
        assert_eq!(seen[0], vec![2, 2]);
        assert_eq!(seen[8], vec![0, 0]);
    }

    #[test]
    fn booleanize_species_rows() {
        let l = lat(5, 5);
        let s = l.state(vec![2, 3, 0, 4, 0]).unwrap();
        let (bl, b) = booleanize(&l, &s).unwrap();
        assert_eq!(bl.sites(), 20);
        assert_eq!(bl.levels(), 2);
        #[rustfmt::skip]
        let expected = vec![
            0, 0, 0, 0, 0,
            1, 0, 0, 0, 0,
            0, 1, 0, 0, 0,
            0, 0, 0, 1, 0,
        ];
        assert_eq!(b.digits(), expected.as_slice());
        assert_eq!(debooleanize(&l, &b).unwrap(), s);
    }

    #[test]
    fn booleanize_empty_is_empty() {
        let l = lat(4, 3);
        let (bl, b) = booleanize(&l, &l.empty_state()).unwrap();
        assert_eq!(b, bl.empty_state());
    }

    #[test]
    fn debooleanize_rejects_double_occupation() {
        let l = lat(2, 3);
        let bl = LatticeSpec::new(4, 2).unwrap();
        // site 1 marked as both species 1 and species 2
        let bad = bl.state(vec![1, 0, 1, 0]).unwrap();
        assert!(matches!(debooleanize(&l, &bad), Err(Error::InvalidState(_))));
    }
}
