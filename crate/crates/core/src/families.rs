//! Parametrized groupoid families for the growth/decay dichotomy
//! experiments: path graphs and binary trees as principal pair
//! groupoids with their graph metrics, plus cyclic groups as a
//! non-principal contrast family under the word length.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groupoid::Groupoid;
use crate::length::LengthFunction;
use crate::metric::FiniteMetricSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DichotomyFamily {
    /// Pair groupoid of the path graph `P_n`; size parameter is `n`.
    Paths,
    /// Pair groupoid of the full binary tree; size parameter is the
    /// depth `d`, giving `2^{d+1} − 1` points.
    BinaryTrees,
    /// Cyclic group `Z_n` with word length from the generator 1;
    /// non-principal, included as contrast.
    Cycles,
}

/// One family member: the groupoid, its length, and scan geometry.
pub struct FamilyInstance {
    pub groupoid: Groupoid,
    pub length: LengthFunction,
    /// Radius at which the witness ball saturates the member.
    pub witness_radius: f64,
    /// Largest unit-to-unit distance, for growth radius grids.
    pub diameter: f64,
    pub principal: bool,
}

impl DichotomyFamily {
    pub fn name(&self) -> &'static str {
        match self {
            DichotomyFamily::Paths => "paths",
            DichotomyFamily::BinaryTrees => "trees",
            DichotomyFamily::Cycles => "cycles",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "paths" => Ok(DichotomyFamily::Paths),
            "trees" => Ok(DichotomyFamily::BinaryTrees),
            "cycles" => Ok(DichotomyFamily::Cycles),
            other => Err(Error::Schema(format!(
                "unknown family {other:?}; expected paths, trees, or cycles"
            ))),
        }
    }

    pub fn instance(&self, size: u32) -> Result<FamilyInstance> {
        match self {
            DichotomyFamily::Paths => {
                if size == 0 {
                    return Err(Error::Schema("path family needs n ≥ 1".into()));
                }
                let space = Arc::new(FiniteMetricSpace::path(size)?);
                let diameter = space.diameter();
                Ok(FamilyInstance {
                    groupoid: Groupoid::pair(size)?,
                    length: LengthFunction::pair_metric(space),
                    witness_radius: (size - 1) as f64,
                    diameter,
                    principal: true,
                })
            }
            DichotomyFamily::BinaryTrees => {
                let space = Arc::new(FiniteMetricSpace::binary_tree(size)?);
                let points = space.len() as u32;
                let diameter = space.diameter();
                Ok(FamilyInstance {
                    groupoid: Groupoid::pair(points)?,
                    length: LengthFunction::pair_metric(space),
                    witness_radius: size as f64,
                    diameter,
                    principal: true,
                })
            }
            DichotomyFamily::Cycles => {
                if size == 0 {
                    return Err(Error::Schema("cycle family needs n ≥ 1".into()));
                }
                let g = Groupoid::cyclic(size)?;
                let gens = if size == 1 { vec![] } else { vec![1] };
                let length = crate::length::word_length(&g, &gens)?;
                let diameter = (0..size)
                    .map(|a| length.value(a))
                    .fold(0.0f64, f64::max);
                Ok(FamilyInstance {
                    groupoid: g,
                    length,
                    witness_radius: (size / 2) as f64,
                    diameter,
                    principal: size <= 1,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_have_the_advertised_shape() {
        let p = DichotomyFamily::Paths.instance(5).unwrap();
        assert_eq!(p.groupoid.num_units(), 5);
        assert_eq!(p.diameter, 4.0);
        assert!(p.principal);

        let t = DichotomyFamily::BinaryTrees.instance(3).unwrap();
        assert_eq!(t.groupoid.num_units(), 15);
        assert_eq!(t.witness_radius, 3.0);
        assert_eq!(t.diameter, 6.0);

        let c = DichotomyFamily::Cycles.instance(6).unwrap();
        assert_eq!(c.groupoid.num_units(), 1);
        assert!(!c.principal);
        assert_eq!(c.diameter, 3.0);
    }

    #[test]
    fn names_round_trip() {
        for f in [
            DichotomyFamily::Paths,
            DichotomyFamily::BinaryTrees,
            DichotomyFamily::Cycles,
        ] {
            assert_eq!(DichotomyFamily::parse(f.name()).unwrap(), f);
        }
        assert!(DichotomyFamily::parse("grids").is_err());
    }
}
