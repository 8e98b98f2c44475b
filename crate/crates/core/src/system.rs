// SPDX-License-Identifier: Apache-2.0

//! Qubit configurations and wire geometry.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Computational basis state `|α₁α₂⟩` of the two static qubits.
///
/// A center couples to the flying particle only while its qubit is in `|0⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpinConfig {
    alpha1: u8,
    alpha2: u8,
}

impl SpinConfig {
    /// Basis order `|00⟩, |01⟩, |10⟩, |11⟩`; qubit 1 is the most significant bit.
    pub const ALL: [SpinConfig; 4] = [
        SpinConfig::new_unchecked(0, 0),
        SpinConfig::new_unchecked(0, 1),
        SpinConfig::new_unchecked(1, 0),
        SpinConfig::new_unchecked(1, 1),
    ];

    const fn new_unchecked(alpha1: u8, alpha2: u8) -> Self {
        SpinConfig { alpha1, alpha2 }
    }

    pub fn new(alpha1: u8, alpha2: u8) -> Result<Self> {
        if alpha1 > 1 || alpha2 > 1 {
            return Err(Error::invalid(
                "spin configuration",
                format!("bits must be 0 or 1, got ({alpha1}, {alpha2})"),
            ));
        }
        Ok(SpinConfig { alpha1, alpha2 })
    }

    pub fn from_index(index: usize) -> Result<Self> {
        SpinConfig::ALL
            .get(index)
            .copied()
            .ok_or_else(|| Error::invalid("spin configuration", format!("index {index} > 3")))
    }

    pub fn alpha1(self) -> u8 {
        self.alpha1
    }

    pub fn alpha2(self) -> u8 {
        self.alpha2
    }

    /// Position in the computational basis.
    pub fn index(self) -> usize {
        2 * self.alpha1 as usize + self.alpha2 as usize
    }

    /// `δ_{α₁0}`: center 1 is active.
    pub fn center1_active(self) -> bool {
        self.alpha1 == 0
    }

    /// `δ_{α₂0}`: center 2 is active.
    pub fn center2_active(self) -> bool {
        self.alpha2 == 0
    }

    pub(crate) fn activity(self) -> (f64, f64) {
        (
            if self.center1_active() { 1.0 } else { 0.0 },
            if self.center2_active() { 1.0 } else { 0.0 },
        )
    }
}

impl fmt::Display for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}{}⟩", self.alpha1, self.alpha2)
    }
}

/// Center positions on the wire. Center 1 sits at the origin, center 2 at
/// `x2` and the mirror at `x3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGeometry", into = "RawGeometry")]
pub struct Geometry {
    x2: f64,
    x3: f64,
}

#[derive(Serialize, Deserialize)]
struct RawGeometry {
    x2: f64,
    x3: f64,
}

impl TryFrom<RawGeometry> for Geometry {
    type Error = Error;

    fn try_from(raw: RawGeometry) -> Result<Self> {
        Geometry::new(raw.x2, raw.x3)
    }
}

impl From<Geometry> for RawGeometry {
    fn from(g: Geometry) -> Self {
        RawGeometry { x2: g.x2, x3: g.x3 }
    }
}

impl Geometry {
    pub fn new(x2: f64, x3: f64) -> Result<Self> {
        if !x2.is_finite() || x2 <= 0.0 {
            return Err(Error::invalid(
                "geometry",
                format!("x2 must be > 0 (x1 = 0 is fixed), got {x2}"),
            ));
        }
        if !x3.is_finite() || x3 <= x2 {
            return Err(Error::invalid(
                "geometry",
                format!("mirror must lie beyond center 2: need x3 > x2, got x2 = {x2}, x3 = {x3}"),
            ));
        }
        Ok(Geometry { x2, x3 })
    }

    pub fn x1(&self) -> f64 {
        0.0
    }

    pub fn x2(&self) -> f64 {
        self.x2
    }

    pub fn x3(&self) -> f64 {
        self.x3
    }

    pub fn x21(&self) -> f64 {
        self.x2
    }

    pub fn x32(&self) -> f64 {
        self.x3 - self.x2
    }

    pub fn x31(&self) -> f64 {
        self.x3
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_configs_in_basis_order() {
        let bits: Vec<_> = SpinConfig::ALL
            .iter()
            .map(|c| (c.alpha1(), c.alpha2()))
            .collect();
        assert_eq!(bits, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        for (i, c) in SpinConfig::ALL.iter().enumerate() {
            assert_eq!(c.index(), i);
            assert_eq!(SpinConfig::from_index(i).unwrap(), *c);
        }
        assert!(SpinConfig::new(2, 0).is_err());
        assert!(SpinConfig::from_index(4).is_err());
    }

    #[test]
    fn geometry_rejects_degenerate_layouts() {
        assert!(Geometry::new(0.0, 1.0).is_err());
        assert!(Geometry::new(-1.0, 1.0).is_err());
        assert!(Geometry::new(2.0, 2.0).is_err());
        assert!(Geometry::new(2.0, 1.0).is_err());
        assert!(Geometry::new(f64::NAN, 1.0).is_err());
        let g = Geometry::new(2.0, 5.0).unwrap();
        assert_eq!((g.x21(), g.x32(), g.x31()), (2.0, 3.0, 5.0));
    }

    #[test]
    fn geometry_deserialization_validates() {
        let bad: std::result::Result<Geometry, _> = serde_json::from_str(r#"{"x2": 3, "x3": 1}"#);
        assert!(bad.is_err());
        let ok: Geometry = serde_json::from_str(r#"{"x2": 1, "x3": 3}"#).unwrap();
        assert_eq!(ok.x3(), 3.0);
    }
}
