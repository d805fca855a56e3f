//! Cellular chain complexes and their integral homology.

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::snf::{smith_normal_form, IntMatrix, SmithForm};

/// Cell counts per degree with boundary matrices `d_k : C_k -> C_{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplex {
    cells: Vec<usize>,
    /// `boundaries[k]` has `cells[k-1]` rows and `cells[k]` columns; index 0 is unused.
    boundaries: Vec<IntMatrix>,
}

impl ChainComplex {
    /// Builds a complex and checks that consecutive boundaries compose to zero.
    pub fn new(cells: Vec<usize>, boundaries: Vec<IntMatrix>) -> Result<Self> {
        if boundaries.len() + 1 != cells.len().max(1) {
            return Err(Error::Structural(format!(
                "{} boundary matrices for {} degrees",
                boundaries.len(),
                cells.len()
            )));
        }
        let mut all = vec![IntMatrix::zeros(0, cells.first().copied().unwrap_or(0))];
        all.extend(boundaries);
        for k in 1..cells.len() {
            let b = &all[k];
            if b.rows() != cells[k - 1] || b.cols() != cells[k] {
                return Err(Error::Structural(format!(
                    "boundary of degree {k} is {}x{}, expected {}x{}",
                    b.rows(),
                    b.cols(),
                    cells[k - 1],
                    cells[k]
                )));
            }
        }
        let c = ChainComplex { cells, boundaries: all };
        c.check_square_zero()?;
        Ok(c)
    }

    pub fn top_degree(&self) -> usize {
        self.cells.len().saturating_sub(1)
    }

    pub fn cell_counts(&self) -> &[usize] {
        &self.cells
    }

    pub fn boundary(&self, k: usize) -> Option<&IntMatrix> {
        (k >= 1 && k < self.cells.len()).then(|| &self.boundaries[k])
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    pub fn check_square_zero(&self) -> Result<()> {
        for k in 2..self.cells.len() {
            let prod = self.boundaries[k - 1].mul(&self.boundaries[k]);
            if !prod.is_zero() {
                return Err(Error::Structural(format!("boundary squared is nonzero in degree {k}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyGroup {
    pub degree: usize,
    pub rank: usize,
    #[serde(serialize_with = "crate::report::serialize_bigints")]
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyProfile {
    pub groups: Vec<HomologyGroup>,
}

impl HomologyProfile {
    pub fn rank(&self, degree: usize) -> usize {
        self.groups.get(degree).map_or(0, |g| g.rank)
    }

    pub fn torsion(&self, degree: usize) -> &[BigInt] {
        self.groups.get(degree).map_or(&[], |g| &g.torsion)
    }

    pub fn is_torsion_free(&self) -> bool {
        self.groups.iter().all(|g| g.torsion.is_empty())
    }

    pub fn betti(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.rank).collect()
    }
}

pub fn homology(c: &ChainComplex) -> Result<HomologyProfile> {
    c.check_square_zero()?;
    let top = c.cells.len();
    let forms: Vec<Option<SmithForm>> = (0..=top)
        .map(|k| (k >= 1 && k < top).then(|| smith_normal_form(&c.boundaries[k])))
        .collect();
    let rank_of = |k: usize| forms.get(k).and_then(Option::as_ref).map_or(0, |f| f.rank);
    let groups = (0..top)
        .map(|k| {
            let nullity = c.cells[k] - rank_of(k);
            HomologyGroup {
                degree: k,
                rank: nullity - rank_of(k + 1),
                torsion: forms.get(k + 1).and_then(Option::as_ref).map_or_else(Vec::new, SmithForm::torsion),
            }
        })
        .collect();
    Ok(HomologyProfile { groups })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(n: usize) -> ChainComplex {
        let mut cells = vec![0; n + 1];
        cells[0] = 1;
        cells[n] += 1;
        let boundaries = (1..=n).map(|k| IntMatrix::zeros(cells[k - 1], cells[k])).collect();
        ChainComplex::new(cells, boundaries).unwrap()
    }

    #[test]
    fn sphere_homology() {
        for n in 1..5 {
            let h = homology(&sphere(n)).unwrap();
            let mut expected = vec![0; n + 1];
            expected[0] = 1;
            expected[n] = 1;
            assert_eq!(h.betti(), expected);
        }
    }

    #[test]
    fn wedge_of_spheres() {
        let k = 4;
        let c = ChainComplex::new(vec![1, 0, k], vec![IntMatrix::zeros(1, 0), IntMatrix::zeros(0, k)]).unwrap();
        assert_eq!(homology(&c).unwrap().rank(2), k);
    }

    #[test]
    fn projective_plane_has_torsion() {
        // one cell in each degree, d_2 = 2
        let c = ChainComplex::new(
            vec![1, 1, 1],
            vec![IntMatrix::from_rows(&[vec![0]]), IntMatrix::from_rows(&[vec![2]])],
        )
        .unwrap();
        let h = homology(&c).unwrap();
        assert_eq!(h.betti(), vec![1, 0, 0]);
        assert_eq!(h.torsion(1), &[BigInt::from(2)]);
    }

    #[test]
    fn nonzero_square_is_rejected() {
        let d1 = IntMatrix::from_rows(&[vec![1]]);
        let d2 = IntMatrix::from_rows(&[vec![1]]);
        assert!(ChainComplex::new(vec![1, 1, 1], vec![d1, d2]).is_err());
    }
}
