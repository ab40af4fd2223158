//! Borrowed strided views over column-major buffers.
//!
//! `MatRef` carries independent row and column strides so a transpose is a
//! free re-labelling; `MatMut` is always column-major (unit row stride) so the
//! kernels can hand out contiguous column slices.

#[derive(Clone, Copy, Debug)]
pub struct MatRef<'a> {
    data: &'a [f64],
    nrows: usize,
    ncols: usize,
    rs: usize,
    cs: usize,
}

fn span(nrows: usize, ncols: usize, rs: usize, cs: usize) -> usize {
    if nrows == 0 || ncols == 0 {
        0
    } else {
        (nrows - 1) * rs + (ncols - 1) * cs + 1
    }
}

impl<'a> MatRef<'a> {
    /// Column-major view with leading dimension `ld`.
    pub fn new(data: &'a [f64], nrows: usize, ncols: usize, ld: usize) -> Self {
        Self::strided(data, nrows, ncols, 1, ld)
    }

    pub fn strided(data: &'a [f64], nrows: usize, ncols: usize, rs: usize, cs: usize) -> Self {
        assert!(data.len() >= span(nrows, ncols, rs, cs), "view exceeds buffer");
        MatRef { data, nrows, ncols, rs, cs }
    }

    pub fn from_col(v: &'a [f64]) -> Self {
        MatRef::new(v, v.len(), 1, v.len().max(1))
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }
    pub fn ncols(&self) -> usize {
        self.ncols
    }
    pub fn row_stride(&self) -> usize {
        self.rs
    }
    pub fn col_stride(&self) -> usize {
        self.cs
    }

    #[inline(always)]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.nrows && j < self.ncols);
        self.data[i * self.rs + j * self.cs]
    }

    pub fn t(self) -> MatRef<'a> {
        MatRef { data: self.data, nrows: self.ncols, ncols: self.nrows, rs: self.cs, cs: self.rs }
    }

    pub fn sub(self, r0: usize, c0: usize, nr: usize, nc: usize) -> MatRef<'a> {
        assert!(r0 + nr <= self.nrows && c0 + nc <= self.ncols, "sub-view out of range");
        if nr == 0 || nc == 0 {
            return MatRef { data: &[], nrows: nr, ncols: nc, rs: self.rs, cs: self.cs };
        }
        let off = r0 * self.rs + c0 * self.cs;
        MatRef { data: &self.data[off..], nrows: nr, ncols: nc, rs: self.rs, cs: self.cs }
    }

    /// Contiguous column `j`; only valid for unit row stride.
    #[inline]
    pub fn col(&self, j: usize) -> &'a [f64] {
        assert_eq!(self.rs, 1, "column slice requires unit row stride");
        if self.nrows == 0 {
            return &[];
        }
        let off = j * self.cs;
        &self.data[off..off + self.nrows]
    }

    pub fn is_col_major(&self) -> bool {
        self.rs == 1
    }
}

#[derive(Debug)]
pub struct MatMut<'a> {
    data: &'a mut [f64],
    nrows: usize,
    ncols: usize,
    ld: usize,
}

impl<'a> MatMut<'a> {
    pub fn new(data: &'a mut [f64], nrows: usize, ncols: usize, ld: usize) -> Self {
        assert!(ld >= nrows.max(1) || ncols <= 1, "leading dimension too small");
        assert!(data.len() >= span(nrows, ncols, 1, ld), "view exceeds buffer");
        MatMut { data, nrows, ncols, ld }
    }

    pub fn from_col(v: &'a mut [f64]) -> Self {
        let n = v.len();
        MatMut::new(v, n, 1, n.max(1))
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }
    pub fn ncols(&self) -> usize {
        self.ncols
    }
    pub fn ld(&self) -> usize {
        self.ld
    }

    pub fn rb(&self) -> MatRef<'_> {
        MatRef { data: self.data, nrows: self.nrows, ncols: self.ncols, rs: 1, cs: self.ld }
    }

    pub fn rb_mut(&mut self) -> MatMut<'_> {
        MatMut { data: self.data, nrows: self.nrows, ncols: self.ncols, ld: self.ld }
    }

    pub fn into_ref(self) -> MatRef<'a> {
        MatRef { data: self.data, nrows: self.nrows, ncols: self.ncols, rs: 1, cs: self.ld }
    }

    #[inline(always)]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.nrows && j < self.ncols);
        self.data[i + j * self.ld]
    }

    #[inline(always)]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.nrows && j < self.ncols);
        self.data[i + j * self.ld] = v;
    }

    #[inline(always)]
    pub fn at(&mut self, i: usize, j: usize) -> &mut f64 {
        debug_assert!(i < self.nrows && j < self.ncols);
        &mut self.data[i + j * self.ld]
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        if self.nrows == 0 {
            return &[];
        }
        let off = j * self.ld;
        &self.data[off..off + self.nrows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        if self.nrows == 0 {
            return &mut [];
        }
        let off = j * self.ld;
        &mut self.data[off..off + self.nrows]
    }

    pub fn sub_mut(self, r0: usize, c0: usize, nr: usize, nc: usize) -> MatMut<'a> {
        assert!(r0 + nr <= self.nrows && c0 + nc <= self.ncols, "sub-view out of range");
        if nr == 0 || nc == 0 {
            return MatMut { data: &mut [], nrows: nr, ncols: nc, ld: self.ld };
        }
        let off = r0 + c0 * self.ld;
        let len = (nc - 1) * self.ld + nr;
        MatMut { data: &mut self.data[off..off + len], nrows: nr, ncols: nc, ld: self.ld }
    }

    /// Splits into columns `0..j` and `j..`.
    pub fn split_cols(self, j: usize) -> (MatMut<'a>, MatMut<'a>) {
        assert!(j <= self.ncols);
        let (nrows, ncols, ld) = (self.nrows, self.ncols, self.ld);
        let cut = (j * ld).min(self.data.len());
        let (l, r) = self.data.split_at_mut(cut);
        (MatMut { data: l, nrows, ncols: j, ld }, MatMut { data: r, nrows, ncols: ncols - j, ld })
    }

    /// Splits into consecutive column chunks at the given (increasing) boundaries.
    pub fn split_col_chunks(self, bounds: &[usize]) -> Vec<(usize, MatMut<'a>)> {
        let mut out = Vec::with_capacity(bounds.len() + 1);
        let mut rest = self;
        let mut start = 0;
        for &b in bounds {
            let (l, r) = rest.split_cols(b - start);
            out.push((start, l));
            rest = r;
            start = b;
        }
        out.push((start, rest));
        out
    }
}

/// Small owned column-major matrix used for workspaces (W) and test oracles.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    pub nrows: usize,
    pub ncols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Mat { nrows, ncols, data: vec![0.0; nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(nrows, ncols);
        for j in 0..ncols {
            for i in 0..nrows {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn as_ref(&self) -> MatRef<'_> {
        MatRef::new(&self.data, self.nrows, self.ncols, self.nrows.max(1))
    }

    pub fn as_mut(&mut self) -> MatMut<'_> {
        let ld = self.nrows.max(1);
        MatMut::new(&mut self.data, self.nrows, self.ncols, ld)
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.ncols, rhs.nrows);
        let mut out = Mat::zeros(self.nrows, rhs.ncols);
        for j in 0..rhs.ncols {
            for p in 0..self.ncols {
                let b = rhs[(p, j)];
                if b == 0.0 {
                    continue;
                }
                for i in 0..self.nrows {
                    out.data[i + j * self.nrows] += self.data[i + p * self.nrows] * b;
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, &v| a.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i + j * self.nrows]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i + j * self.nrows]
    }
}
