//! Minimal safe wrappers over the two LAPACK eigensolvers this crate needs.
//!
//! Matrices are column-major `Vec` slices of length `n*n`. Divide-and-conquer
//! (`dsyevd`/`zheevd`) is used throughout; it is the fastest LAPACK path for
//! full symmetric spectra and behaves deterministically for fixed input and
//! thread configuration.

use num_complex::Complex64;

use crate::error::{Error, Result};

// Fortran LAPACK, provided by the system OpenBLAS (see build.rs).
extern "C" {
    fn dsyevd_(
        jobz: *const u8,
        uplo: *const u8,
        n: *const i32,
        a: *mut f64,
        lda: *const i32,
        w: *mut f64,
        work: *mut f64,
        lwork: *const i32,
        iwork: *mut i32,
        liwork: *const i32,
        info: *mut i32,
    );
    fn zheevd_(
        jobz: *const u8,
        uplo: *const u8,
        n: *const i32,
        a: *mut Complex64,
        lda: *const i32,
        w: *mut f64,
        work: *mut Complex64,
        lwork: *const i32,
        rwork: *mut f64,
        lrwork: *const i32,
        iwork: *mut i32,
        liwork: *const i32,
        info: *mut i32,
    );
}

fn check_dims(n: usize, len: usize) -> Result<i32> {
    if len != n * n {
        return Err(Error::Numerics(format!("matrix buffer {len} != {n}x{n}")));
    }
    i32::try_from(n).map_err(|_| Error::Numerics(format!("dimension {n} exceeds LAPACK range")))
}

/// Eigenvalues (ascending) of a real symmetric matrix. With `vectors`, the
/// columns of `a` are overwritten by orthonormal eigenvectors; without, `a`
/// is clobbered and only the values are meaningful.
pub fn eigh_real(n: usize, a: &mut [f64], vectors: bool) -> Result<Vec<f64>> {
    let nn = check_dims(n, a.len())?;
    let jobz = if vectors { b'V' } else { b'N' };
    let uplo = b'L';
    let mut w = vec![0.0f64; n];
    let mut info = 0i32;
    // workspace query
    let (mut wq, mut iwq) = (0.0f64, 0i32);
    unsafe {
        dsyevd_(&jobz, &uplo, &nn, a.as_mut_ptr(), &nn, w.as_mut_ptr(), &mut wq, &-1, &mut iwq, &-1, &mut info);
    }
    if info != 0 {
        return Err(Error::Numerics(format!("dsyevd workspace query failed: info={info}")));
    }
    let lwork = wq as i32;
    let liwork = iwq;
    let mut work = vec![0.0f64; lwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork.max(1) as usize];
    unsafe {
        dsyevd_(
            &jobz,
            &uplo,
            &nn,
            a.as_mut_ptr(),
            &nn,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Numerics(format!("dsyevd failed: info={info}")));
    }
    Ok(w)
}

/// Eigenvalues (ascending) of a complex Hermitian matrix; eigenvectors land
/// in the columns of `a` when requested.
pub fn eigh_complex(n: usize, a: &mut [Complex64], vectors: bool) -> Result<Vec<f64>> {
    let nn = check_dims(n, a.len())?;
    let jobz = if vectors { b'V' } else { b'N' };
    let uplo = b'L';
    let mut w = vec![0.0f64; n];
    let mut info = 0i32;
    let (mut wq, mut rwq, mut iwq) = (Complex64::new(0.0, 0.0), 0.0f64, 0i32);
    unsafe {
        zheevd_(
            &jobz,
            &uplo,
            &nn,
            a.as_mut_ptr(),
            &nn,
            w.as_mut_ptr(),
            &mut wq,
            &-1,
            &mut rwq,
            &-1,
            &mut iwq,
            &-1,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Numerics(format!("zheevd workspace query failed: info={info}")));
    }
    let lwork = wq.re as i32;
    let lrwork = rwq as i32;
    let liwork = iwq;
    let mut work = vec![Complex64::new(0.0, 0.0); lwork.max(1) as usize];
    let mut rwork = vec![0.0f64; lrwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork.max(1) as usize];
    unsafe {
        zheevd_(
            &jobz,
            &uplo,
            &nn,
            a.as_mut_ptr(),
            &nn,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &lrwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Numerics(format!("zheevd failed: info={info}")));
    }
    Ok(w)
}
