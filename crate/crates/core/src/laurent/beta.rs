/// `Q x L` bit matrix selecting the `LT` shifts of each Laurent filter.
///
/// Row `k` holds `beta_{k,0} = 0` followed by the radix-2 digits of `k`,
/// least significant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaMatrix {
    rows: Vec<Vec<u8>>,
}

impl BetaMatrix {
    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn row(&self, k: usize) -> &[u8] {
        &self.rows[k]
    }

    pub fn component_count(&self) -> usize {
        self.rows.len()
    }

    pub fn pulse_len(&self) -> usize {
        self.rows[0].len()
    }

    /// `sum_{i>=1} 2^(i-1) beta_{k,i}`; equals `k` for every row.
    pub fn decode(&self, k: usize) -> usize {
        self.rows[k]
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &b)| usize::from(b) << (i - 1))
            .sum()
    }
}

pub fn build_beta(pulse_len: usize) -> BetaMatrix {
    assert!(pulse_len >= 1, "L must be at least 1");
    let q = 1usize << (pulse_len - 1);
    let rows = (0..q)
        .map(|k| {
            std::iter::once(0)
                .chain((1..pulse_len).map(|i| ((k >> (i - 1)) & 1) as u8))
                .collect()
        })
        .collect();
    BetaMatrix { rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l2_matches_known_matrix() {
        let b = build_beta(2);
        assert_eq!(b.rows(), &[vec![0, 0], vec![0, 1]]);
    }

    #[test]
    fn l1_single_row() {
        assert_eq!(build_beta(1).rows(), &[vec![0]]);
    }

    #[test]
    fn l3_row_two() {
        let b = build_beta(3);
        assert_eq!(b.component_count(), 4);
        assert_eq!(b.row(2), &[0, 0, 1]);
        assert_eq!(b.row(3), &[0, 1, 1]);
    }

    #[test]
    fn rows_decode_to_index() {
        for l in 1..=6 {
            let b = build_beta(l);
            for k in 0..b.component_count() {
                assert_eq!(b.row(k)[0], 0);
                assert_eq!(b.decode(k), k);
            }
        }
    }
}
