use super::{Matrix, Scalar};

/// Row-style Hermite normal form `u * m = h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermiteForm<T> {
    pub h: Matrix<T>,
    pub u: Matrix<T>,
    pub rank: usize,
    /// Pivot column of each of the first `rank` rows.
    pub pivots: Vec<usize>,
}

impl<T: Scalar> HermiteForm<T> {
    /// The nonzero rows of `h`, a canonical basis of the row lattice.
    pub fn basis(&self) -> Vec<Vec<T>> {
        (0..self.rank).map(|i| self.h.row(i).to_vec()).collect()
    }
}

/// `u * m * v = s` with `s` diagonal, nonnegative, each entry dividing the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm<T> {
    pub s: Matrix<T>,
    pub u: Matrix<T>,
    pub v: Matrix<T>,
}

impl<T: Scalar> SmithForm<T> {
    pub fn invariant_factors(&self) -> Vec<T> {
        (0..self.s.rows().min(self.s.cols())).map(|i| self.s[(i, i)].clone()).collect()
    }
}

/// Returns `(g, x, y)` with `x*a + y*b = g = gcd(a, b) >= 0`.
pub(crate) fn ext_gcd<T: Scalar>(a: &T, b: &T) -> (T, T, T) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (T::one(), T::zero());
    let (mut old_t, mut t) = (T::zero(), T::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let nr = old_r - q.clone() * r.clone();
        old_r = std::mem::replace(&mut r, nr);
        let ns = old_s - q.clone() * s.clone();
        old_s = std::mem::replace(&mut s, ns);
        let nt = old_t - q * t.clone();
        old_t = std::mem::replace(&mut t, nt);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn hermite_normal_form<T: Scalar>(m: &Matrix<T>) -> HermiteForm<T> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut h = m.clone();
    let mut u = Matrix::identity(rows);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        for i in r + 1..rows {
            if h[(i, col)].is_zero() {
                continue;
            }
            let a = h[(r, col)].clone();
            let b = h[(i, col)].clone();
            let (g, x, y) = ext_gcd(&a, &b);
            let c = -(b / g.clone());
            let d = a / g;
            h.combine_rows(r, i, [&x, &y, &c, &d]);
            u.combine_rows(r, i, [&x, &y, &c, &d]);
        }
        if h[(r, col)].is_zero() {
            continue;
        }
        if h[(r, col)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        let p = h[(r, col)].clone();
        for i in 0..r {
            let q = h[(i, col)].div_floor(&p);
            if !q.is_zero() {
                h.add_row_multiple(i, r, &-q.clone());
                u.add_row_multiple(i, r, &-q);
            }
        }
        pivots.push(col);
        r += 1;
    }
    debug_assert!(unimodular(&u), "hermite transform is not unimodular");
    HermiteForm { h, u, rank: r, pivots }
}

fn unimodular<T: Scalar>(m: &Matrix<T>) -> bool {
    super::determinant(m).is_ok_and(|d| d.abs().is_one())
}

pub fn smith_normal_form<T: Scalar>(m: &Matrix<T>) -> SmithForm<T> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut s = m.clone();
    let mut u = Matrix::identity(rows);
    let mut v = Matrix::identity(cols);
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !s[(i, j)].is_zero() && best.is_none_or(|(bi, bj)| s[(i, j)].abs() < s[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                debug_assert!(unimodular(&u) && unimodular(&v), "smith transforms are not unimodular");
                return SmithForm { s, u, v };
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let p = s[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..rows {
                let q = s[(i, t)].div_floor(&p);
                if !q.is_zero() {
                    s.add_row_multiple(i, t, &-q.clone());
                    u.add_row_multiple(i, t, &-q);
                }
                clean &= s[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                let q = s[(t, j)].div_floor(&p);
                if !q.is_zero() {
                    s.add_col_multiple(j, t, &-q.clone());
                    v.add_col_multiple(j, t, &-q);
                }
                clean &= s[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !s[(i, j)].is_multiple_of(&p)));
            match offender {
                Some(i) => {
                    s.add_row_multiple(t, i, &T::one());
                    u.add_row_multiple(t, i, &T::one());
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    debug_assert!(unimodular(&u) && unimodular(&v), "smith transforms are not unimodular");
    SmithForm { s, u, v }
}

/// Basis of the integer kernel `{x in Z^n : rows * x = 0}`, in Hermite normal form.
///
/// An empty row list has the whole lattice as kernel.
pub fn kernel_basis<T: Scalar>(rows: &[Vec<T>], n: usize) -> Vec<Vec<T>> {
    if rows.is_empty() {
        return Matrix::<T>::identity(n).to_rows();
    }
    let m = Matrix::from_rows(rows).expect("consistent row lengths");
    let hf = hermite_normal_form(&m.transpose());
    let kernel: Vec<Vec<T>> = (hf.rank..n).map(|i| hf.u.row(i).to_vec()).collect();
    if kernel.is_empty() {
        return kernel;
    }
    hermite_normal_form(&Matrix::from_rows(&kernel).unwrap()).basis()
}

#[cfg(test)]
mod tests {
    use super::super::{determinant, vec_mul};
    use super::*;
    use num_bigint::BigInt;
    use num_integer::Integer;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Matrix<BigInt> {
        let rows: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Matrix::from_rows(&rows).unwrap()
    }

    fn is_unimodular(u: &Matrix<BigInt>) -> bool {
        let d = determinant(u).unwrap();
        d == BigInt::from(1) || d == BigInt::from(-1)
    }

    #[test]
    fn hnf_examples() {
        let id = Matrix::<BigInt>::identity(3);
        let hf = hermite_normal_form(&id);
        assert_eq!(hf.h, id);
        assert_eq!(hf.u, id);

        let hf = hermite_normal_form(&m(&[&[2], &[3]]));
        assert_eq!(hf.h, m(&[&[1], &[0]]));
        assert_eq!(hf.rank, 1);
        assert!(is_unimodular(&hf.u));

        let hf = hermite_normal_form(&m(&[&[2, 0], &[0, 2]]));
        assert_eq!(hf.h, m(&[&[2, 0], &[0, 2]]));
    }

    #[test]
    fn snf_examples() {
        let sf = smith_normal_form(&Matrix::<BigInt>::identity(2));
        assert_eq!(sf.s, Matrix::identity(2));
        let sf = smith_normal_form(&m(&[&[2, 0], &[0, 3]]));
        assert_eq!(sf.s, m(&[&[1, 0], &[0, 6]]));
        let sf = smith_normal_form(&m(&[&[4]]));
        assert_eq!(sf.s, m(&[&[4]]));
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_basis(&[vec![BigInt::from(1), BigInt::from(1)]], 2);
        assert_eq!(k, vec![vec![BigInt::from(1), BigInt::from(-1)]]);
        let k = kernel_basis::<BigInt>(&[], 2);
        assert_eq!(k.len(), 2);
        let k = kernel_basis(&[vec![BigInt::from(2), BigInt::from(4), BigInt::from(6)]], 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(&v[0] * 2 + &v[1] * 4 + &v[2] * 6, BigInt::from(0));
        }
    }

    fn small_matrix() -> impl Strategy<Value = Matrix<BigInt>> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            prop::collection::vec(-6i64..=6, r * c)
                .prop_map(move |d| Matrix::from_fn(r, c, |i, j| BigInt::from(d[i * c + j])))
        })
    }

    fn is_hnf(hf: &HermiteForm<BigInt>) -> bool {
        let h = &hf.h;
        for (r, &p) in hf.pivots.iter().enumerate() {
            if h[(r, p)] <= BigInt::from(0) {
                return false;
            }
            if (0..p).any(|j| h[(r, j)] != BigInt::from(0)) {
                return false;
            }
            if (r + 1..h.rows()).any(|i| h[(i, p)] != BigInt::from(0)) {
                return false;
            }
            if (0..r).any(|i| h[(i, p)] < BigInt::from(0) || h[(i, p)] >= h[(r, p)]) {
                return false;
            }
        }
        (hf.rank..h.rows()).all(|i| h.row(i).iter().all(|x| *x == BigInt::from(0)))
    }

    proptest! {
        #[test]
        fn hnf_contract(a in small_matrix()) {
            let hf = hermite_normal_form(&a);
            prop_assert!(is_unimodular(&hf.u));
            prop_assert_eq!(&hf.u * &a, hf.h.clone());
            prop_assert!(is_hnf(&hf));
            let again = hermite_normal_form(&hf.h);
            prop_assert_eq!(again.h, hf.h);
        }

        #[test]
        fn snf_contract(a in small_matrix()) {
            let sf = smith_normal_form(&a);
            prop_assert!(is_unimodular(&sf.u));
            prop_assert!(is_unimodular(&sf.v));
            prop_assert_eq!(&(&sf.u * &a) * &sf.v, sf.s.clone());
            for i in 0..sf.s.rows() {
                for j in 0..sf.s.cols() {
                    if i != j {
                        prop_assert_eq!(&sf.s[(i, j)], &BigInt::from(0));
                    }
                }
            }
            let d = sf.invariant_factors();
            for w in d.windows(2) {
                prop_assert!(w[0] >= BigInt::from(0));
                if w[0] == BigInt::from(0) {
                    prop_assert_eq!(&w[1], &BigInt::from(0));
                } else {
                    prop_assert!(w[1].is_multiple_of(&w[0]));
                }
            }
        }

        #[test]
        fn kernel_vectors_are_annihilated(a in small_matrix()) {
            let rows = a.to_rows();
            let k = kernel_basis(&rows, a.cols());
            prop_assert_eq!(k.len() + hermite_normal_form(&a).rank, a.cols());
            for v in &k {
                let image = vec_mul(v, &a.transpose());
                prop_assert!(image.iter().all(|x| *x == BigInt::from(0)));
            }
        }
    }
}
