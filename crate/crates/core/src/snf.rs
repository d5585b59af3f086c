//! Smith normal form of small integer matrices, used to read off the
//! abelianization `Z^r ⊕ Z/d_1 ⊕ … ⊕ Z/d_k` of a finite presentation.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Abelianization {
    pub free_rank: usize,
    /// Invariant factors `d_i > 1` with `d_1 | d_2 | …`.
    pub torsion: Vec<u64>,
}

/// Nonzero diagonal entries of the Smith normal form, in divisibility order.
pub fn invariant_factors(rows: &[Vec<i64>], ncols: usize) -> Vec<u64> {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.len(), ncols, "ragged relation matrix");
            r.iter().map(|&x| i128::from(x)).collect()
        })
        .collect();
    let nrows = m.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nrows.min(ncols) {
        // smallest nonzero entry of the remaining block as pivot
        let Some((pi, pj)) = (t..nrows)
            .flat_map(|i| (t..ncols).map(move |j| (i, j)))
            .filter(|&(i, j)| m[i][j] != 0)
            .min_by_key(|&(i, j)| m[i][j].abs())
        else {
            break;
        };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }

        let mut dirty = false;
        for i in t + 1..nrows {
            let q = m[i][t] / m[t][t];
            if q != 0 {
                for j in t..ncols {
                    m[i][j] -= q * m[t][j];
                }
            }
            dirty |= m[i][t] != 0;
        }
        for j in t + 1..ncols {
            let q = m[t][j] / m[t][t];
            if q != 0 {
                for row in m.iter_mut().skip(t) {
                    row[j] -= q * row[t];
                }
            }
            dirty |= m[t][j] != 0;
        }
        if dirty {
            // a smaller remainder appeared in the pivot row/column; repivot
            continue;
        }
        let p = m[t][t];
        if let Some(i) = (t + 1..nrows).find(|&i| (t + 1..ncols).any(|j| m[i][j] % p != 0)) {
            // fold the offending row into the pivot row and retry
            for j in t..ncols {
                m[t][j] += m[i][j];
            }
            continue;
        }
        diag.push(p.unsigned_abs() as u64);
        t += 1;
    }
    diag
}

/// Abelianization of a group with `ngens` generators whose relators have the
/// given exponent-sum vectors.
pub fn abelianize(rows: &[Vec<i64>], ngens: usize) -> Abelianization {
    let factors = invariant_factors(rows, ngens);
    Abelianization {
        free_rank: ngens - factors.len(),
        torsion: factors.into_iter().filter(|&d| d > 1).collect(),
    }
}
