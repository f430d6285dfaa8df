//! Haar-random unitaries and uniform vectors on the complex unit sphere.

use std::io::{Read, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::SeedSpec;
use crate::error::{out_of_range, Error, Result};
use crate::spectral::EigenspaceSpec;

const DUMP_MAGIC: &[u8; 8] = b"EQDRBS01";

/// Which stream produced a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedProvenance {
    pub master: u64,
    pub stream: (u32, u32),
}

/// A Haar-random orthonormal basis of one eigenspace: column i holds the
/// coefficients of the i-th random basis function in the canonical basis.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomBasisSample {
    pub unitary: DMatrix<Complex64>,
    /// Sphere degree or torus energy, when tied to an eigenspace.
    pub spec_index: Option<u64>,
    pub provenance: SeedProvenance,
}

impl RandomBasisSample {
    pub fn dim(&self) -> usize {
        self.unitary.nrows()
    }

    pub fn column(&self, i: usize) -> Vec<Complex64> {
        self.unitary.column(i).iter().copied().collect()
    }

    /// max |U*U − I| entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.unitary)
    }

    /// Binary layout: magic, then little-endian u64 m, i64 index (−1 when
    /// absent), u64 master, u32 a, u32 b, then m² (re, im) f64 pairs in
    /// row-major order.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let m = self.dim();
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&(m as u64).to_le_bytes())?;
        w.write_all(&self.spec_index.map_or(-1i64, |k| k as i64).to_le_bytes())?;
        w.write_all(&self.provenance.master.to_le_bytes())?;
        w.write_all(&self.provenance.stream.0.to_le_bytes())?;
        w.write_all(&self.provenance.stream.1.to_le_bytes())?;
        for i in 0..m {
            for j in 0..m {
                let z = self.unitary[(i, j)];
                w.write_all(&z.re.to_le_bytes())?;
                w.write_all(&z.im.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != DUMP_MAGIC {
            return Err(Error::Parse("not a random-basis dump".into()));
        }
        let mut b8 = [0u8; 8];
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b8)?;
        let m = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8)?;
        let idx = i64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let master = u64::from_le_bytes(b8);
        r.read_exact(&mut b4)?;
        let a = u32::from_le_bytes(b4);
        r.read_exact(&mut b4)?;
        let b = u32::from_le_bytes(b4);
        let mut data = Vec::with_capacity(m * m);
        for _ in 0..m * m {
            r.read_exact(&mut b8)?;
            let re = f64::from_le_bytes(b8);
            r.read_exact(&mut b8)?;
            data.push(Complex64::new(re, f64::from_le_bytes(b8)));
        }
        Ok(Self {
            unitary: DMatrix::from_row_slice(m, m, &data),
            spec_index: (idx >= 0).then_some(idx as u64),
            provenance: SeedProvenance { master, stream: (a, b) },
        })
    }
}

pub fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let n = u.ncols();
    let g = u.adjoint() * u;
    (g - DMatrix::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Ginibre QR with the phases of diag(R) folded back into Q.
pub fn haar_unitary_from_rng<R: Rng + ?Sized>(m: usize, rng: &mut R) -> DMatrix<Complex64> {
    loop {
        let z = DMatrix::from_fn(m, m, |_, _| complex_gaussian(rng));
        let qr = z.qr();
        let r = qr.r();
        if (0..m).any(|i| r[(i, i)].norm() < 1e-300) {
            continue;
        }
        let mut q = qr.q();
        for j in 0..m {
            let d = r[(j, j)];
            let phase = d / d.norm();
            for i in 0..m {
                q[(i, j)] *= phase;
            }
        }
        return q;
    }
}

/// Haar unitary of size m from the stream `stream` of `seed`.
pub fn haar_unitary(m: usize, seed: &SeedSpec, stream: (u32, u32)) -> Result<RandomBasisSample> {
    if m == 0 {
        return Err(out_of_range("unitary size", 0.0, "m >= 1"));
    }
    let mut rng = seed.rng(stream.0, stream.1);
    Ok(RandomBasisSample {
        unitary: haar_unitary_from_rng(m, &mut rng),
        spec_index: None,
        provenance: SeedProvenance {
            master: seed.master(),
            stream,
        },
    })
}

/// Random eigenbasis of `spec`; the stream is (spec index, sample index).
pub fn random_basis(spec: &EigenspaceSpec, seed: &SeedSpec, sample: u32) -> RandomBasisSample {
    let stream = (spec.index() as u32, sample);
    let mut s = haar_unitary(spec.multiplicity(), seed, stream).expect("eigenspaces are nonempty");
    s.spec_index = Some(spec.index());
    s
}

/// Normalized complex Gaussian vector: uniform on the unit sphere of ℂ^m.
pub fn random_unit_coeffs<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<Complex64> {
    assert!(m >= 1, "random_unit_coeffs needs m >= 1");
    loop {
        let mut v: Vec<Complex64> = (0..m).map(|_| complex_gaussian(rng)).collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-150 {
            v.iter_mut().for_each(|z| *z /= n);
            return v;
        }
    }
}
