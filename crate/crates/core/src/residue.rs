//! Exact arithmetic over Z_p and the symplectic geometry of planes in Z_p^4.
//!
//! Every scalar carries its modulus. Binary operators assert that the moduli
//! agree; the fallible entry points (`Vec4::from_scalars`, [`symplectic_form`],
//! [`intersect_trivially`]) report a mismatch as [`Error::ModulusMismatch`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_MODULUS: u64 = 1 << 16;

/// A prime below 2^16, checked by trial division.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if !(2..MAX_MODULUS).contains(&p) {
            return Err(Error::NotPrime(p));
        }
        let mut d = 2;
        while d * d <= p {
            if p.is_multiple_of(d) {
                return Err(Error::NotPrime(p));
            }
            d += 1;
        }
        Ok(Prime(p as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    pub fn is_odd(self) -> bool {
        self.0 != 2
    }

    /// `p mod 4`, which decides the shape of the A/B family.
    pub fn mod4(self) -> u32 {
        self.0 % 4
    }

    pub fn zero(self) -> ResidueScalar {
        ResidueScalar::new(0, self)
    }

    pub fn one(self) -> ResidueScalar {
        ResidueScalar::new(1, self)
    }

    /// All residues `0..p` in increasing order.
    pub fn elements(self) -> impl Iterator<Item = ResidueScalar> {
        (0..self.0).map(move |v| ResidueScalar { value: v, modulus: self })
    }

    /// The nonzero residues `1..p`.
    pub fn units(self) -> impl Iterator<Item = ResidueScalar> {
        self.elements().skip(1)
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;

    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0 as u64
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An element of Z_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ResidueScalar {
    value: u32,
    modulus: Prime,
}

impl ResidueScalar {
    /// Reduces `value` into `[0, p)`.
    pub fn new(value: i64, modulus: Prime) -> Self {
        let value = value.rem_euclid(modulus.0 as i64) as u32;
        ResidueScalar { value, modulus }
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> Prime {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let p = self.modulus.0 as u64;
        let mut base = self.value as u64;
        let mut acc = 1 % p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        ResidueScalar { value: acc as u32, modulus: self.modulus }
    }

    pub fn inv(self) -> Result<Self> {
        mod_inv(self)
    }

    #[inline]
    fn same_modulus(self, other: Self) -> u64 {
        assert_eq!(
            self.modulus, other.modulus,
            "residue arithmetic across different moduli"
        );
        self.modulus.0 as u64
    }
}

impl fmt::Display for ResidueScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for ResidueScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let p = self.same_modulus(rhs);
        let value = ((self.value as u64 + rhs.value as u64) % p) as u32;
        ResidueScalar { value, modulus: self.modulus }
    }
}

impl Sub for ResidueScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let p = self.same_modulus(rhs);
        let value = ((self.value as u64 + p - rhs.value as u64) % p) as u32;
        ResidueScalar { value, modulus: self.modulus }
    }
}

impl Mul for ResidueScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let p = self.same_modulus(rhs);
        let value = ((self.value as u64 * rhs.value as u64) % p) as u32;
        ResidueScalar { value, modulus: self.modulus }
    }
}

impl Neg for ResidueScalar {
    type Output = Self;
    fn neg(self) -> Self {
        let p = self.modulus.0;
        ResidueScalar { value: (p - self.value) % p, modulus: self.modulus }
    }
}

/// Multiplicative inverse via Fermat's little theorem.
pub fn mod_inv(a: ResidueScalar) -> Result<ResidueScalar> {
    if a.is_zero() {
        return Err(Error::ZeroInverse);
    }
    Ok(a.pow(a.modulus.0 as u64 - 2))
}

/// Euler's criterion; zero counts as a square.
pub fn is_square(a: ResidueScalar) -> bool {
    let p = a.modulus.0;
    if a.is_zero() || p == 2 {
        return true;
    }
    a.pow(((p - 1) / 2) as u64).value == 1
}

/// Least `D >= 2` that is not a square mod `p`.
pub fn smallest_nonresidue(p: Prime) -> Result<ResidueScalar> {
    if !p.is_odd() {
        return Err(Error::NoNonresidue);
    }
    p.elements()
        .skip(2)
        .find(|&d| !is_square(d))
        .ok_or(Error::NoNonresidue)
}

/// Both square roots of `a` as `(q, p - q)` with `q <= p - q`, or `None` if
/// `a` is a non-residue. Exhaustive search; `p < 2^16` keeps it instant.
pub fn sqrt_mod(a: ResidueScalar) -> Option<(ResidueScalar, ResidueScalar)> {
    let q = a.modulus.elements().find(|&x| x * x == a)?;
    let other = -q;
    if q.value <= other.value {
        Some((q, other))
    } else {
        Some((other, q))
    }
}

/// A vector of Z_p^4. All coordinates share one modulus by construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vec4 {
    coords: [u32; 4],
    modulus: Prime,
}

impl Vec4 {
    pub fn new(coords: [i64; 4], modulus: Prime) -> Self {
        let m = modulus.0 as i64;
        Vec4 {
            coords: coords.map(|c| c.rem_euclid(m) as u32),
            modulus,
        }
    }

    pub fn from_scalars(coords: [ResidueScalar; 4]) -> Result<Self> {
        let modulus = coords[0].modulus;
        for c in &coords[1..] {
            if c.modulus != modulus {
                return Err(Error::ModulusMismatch(modulus.0, c.modulus.0));
            }
        }
        Ok(Vec4 { coords: coords.map(|c| c.value), modulus })
    }

    pub fn zero(modulus: Prime) -> Self {
        Vec4 { coords: [0; 4], modulus }
    }

    pub fn get(&self, i: usize) -> ResidueScalar {
        ResidueScalar { value: self.coords[i], modulus: self.modulus }
    }

    /// Raw coordinates in `[0, p)`.
    pub fn coords(&self) -> [u32; 4] {
        self.coords
    }

    pub fn modulus(&self) -> Prime {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.coords == [0; 4]
    }

    pub fn scale(&self, k: ResidueScalar) -> Self {
        let p = self.modulus.0 as u64;
        assert_eq!(k.modulus, self.modulus);
        Vec4 {
            coords: self.coords.map(|c| (c as u64 * k.value as u64 % p) as u32),
            modulus: self.modulus,
        }
    }

    pub fn add(&self, other: &Vec4) -> Self {
        assert_eq!(self.modulus, other.modulus);
        let p = self.modulus.0;
        let mut coords = [0; 4];
        for (i, c) in coords.iter_mut().enumerate() {
            *c = (self.coords[i] + other.coords[i]) % p;
        }
        Vec4 { coords, modulus: self.modulus }
    }
}

impl fmt::Display for Vec4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.coords;
        write!(f, "({a},{b},{c},{d})")
    }
}

/// `c(u,v) = u1 v2 - u2 v1 + u3 v4 - u4 v3`.
pub fn symplectic_form(u: &Vec4, v: &Vec4) -> Result<ResidueScalar> {
    if u.modulus != v.modulus {
        return Err(Error::ModulusMismatch(u.modulus.0, v.modulus.0));
    }
    let p = u.modulus.0 as i64;
    let [u1, u2, u3, u4] = u.coords.map(|c| c as i64);
    let [v1, v2, v3, v4] = v.coords.map(|c| c as i64);
    let c = u1 * v2 - u2 * v1 + u3 * v4 - u4 * v3;
    Ok(ResidueScalar::new(c.rem_euclid(p), u.modulus))
}

/// Brings `rows` to reduced row-echelon form in place and returns the rank.
/// Nonzero rows come first, each with leading entry 1.
fn row_reduce(rows: &mut [[u32; 4]], p: Prime) -> usize {
    let m = p.0 as u64;
    let mut rank = 0;
    for col in 0..4 {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = ResidueScalar { value: rows[rank][col], modulus: p }
            .pow(m - 2)
            .value as u64;
        for c in 0..4 {
            rows[rank][c] = (rows[rank][c] as u64 * inv % m) as u32;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let factor = rows[r][col] as u64;
                for c in 0..4 {
                    let sub = factor * rows[rank][c] as u64 % m;
                    rows[r][c] = ((rows[r][c] as u64 + m - sub) % m) as u32;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// A 2-dimensional subspace of Z_p^4, stored as its reduced row-echelon
/// basis. Equal subspaces have identical representations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace2 {
    rows: [[u32; 4]; 2],
    modulus: Prime,
}

impl Subspace2 {
    pub fn from_basis(v1: &Vec4, v2: &Vec4) -> Result<Self> {
        if v1.modulus != v2.modulus {
            return Err(Error::ModulusMismatch(v1.modulus.0, v2.modulus.0));
        }
        let mut rows = [v1.coords, v2.coords];
        if row_reduce(&mut rows, v1.modulus) < 2 {
            return Err(Error::DependentVectors);
        }
        Ok(Subspace2 { rows, modulus: v1.modulus })
    }

    /// Builds from raw integer rows (any basis, reduced mod p).
    pub fn from_rows(rows: [[i64; 4]; 2], modulus: Prime) -> Result<Self> {
        Self::from_basis(&Vec4::new(rows[0], modulus), &Vec4::new(rows[1], modulus))
    }

    /// `F0 = Sp{(1,0,0,0),(0,1,0,0)}`, the labels of `M_p (x) I`.
    pub fn f0(p: Prime) -> Self {
        Subspace2 { rows: [[1, 0, 0, 0], [0, 1, 0, 0]], modulus: p }
    }

    /// `F1 = Sp{(0,0,1,0),(0,0,0,1)}`, the labels of `I (x) M_p`.
    pub fn f1(p: Prime) -> Self {
        Subspace2 { rows: [[0, 0, 1, 0], [0, 0, 0, 1]], modulus: p }
    }

    pub fn modulus(&self) -> Prime {
        self.modulus
    }

    pub fn rows(&self) -> [[u32; 4]; 2] {
        self.rows
    }

    pub fn basis(&self) -> [Vec4; 2] {
        self.rows.map(|coords| Vec4 { coords, modulus: self.modulus })
    }

    pub fn contains(&self, v: &Vec4) -> bool {
        if v.modulus != self.modulus {
            return false;
        }
        let mut rows = [self.rows[0], self.rows[1], v.coords];
        row_reduce(&mut rows, self.modulus) == 2
    }

    /// All `p^2` points `a*r0 + b*r1`, starting with zero.
    pub fn points(&self) -> Vec<Vec4> {
        let p = self.modulus;
        let [r0, r1] = self.basis();
        let mut out = Vec::with_capacity((p.0 * p.0) as usize);
        for a in p.elements() {
            for b in p.elements() {
                out.push(r0.scale(a).add(&r1.scale(b)));
            }
        }
        out
    }

    /// True when `c` vanishes on the plane. Checking the basis pair suffices
    /// because `c` is bilinear and alternating.
    pub fn is_isotropic(&self) -> bool {
        let [u, v] = self.basis();
        symplectic_form(&u, &v).map(|c| c.is_zero()).unwrap_or(false)
    }
}

impl fmt::Display for Subspace2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [u, v] = self.basis();
        write!(f, "Sp{{{u},{v}}}")
    }
}

pub fn subspace_from_basis(v1: &Vec4, v2: &Vec4) -> Result<Subspace2> {
    Subspace2::from_basis(v1, v2)
}

/// True iff `S ∩ T = {0}`, i.e. the stacked 4x4 matrix has full rank.
pub fn intersect_trivially(s: &Subspace2, t: &Subspace2) -> Result<bool> {
    if s.modulus != t.modulus {
        return Err(Error::ModulusMismatch(s.modulus.0, t.modulus.0));
    }
    let mut rows = [s.rows[0], s.rows[1], t.rows[0], t.rows[1]];
    Ok(row_reduce(&mut rows, s.modulus) == 4)
}

/// An invertible 2x2 matrix over Z_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gl2Matrix {
    entries: [[u32; 2]; 2],
    modulus: Prime,
}

impl Gl2Matrix {
    pub fn new(entries: [[i64; 2]; 2], modulus: Prime) -> Result<Self> {
        let m = modulus.0 as i64;
        let entries = entries.map(|row| row.map(|e| e.rem_euclid(m) as u32));
        Self::from_raw(entries, modulus)
    }

    pub fn from_scalars(entries: [[ResidueScalar; 2]; 2]) -> Result<Self> {
        let modulus = entries[0][0].modulus;
        for e in entries.iter().flatten() {
            if e.modulus != modulus {
                return Err(Error::ModulusMismatch(modulus.0, e.modulus.0));
            }
        }
        Self::from_raw(entries.map(|row| row.map(|e| e.value)), modulus)
    }

    fn from_raw(entries: [[u32; 2]; 2], modulus: Prime) -> Result<Self> {
        let m = Gl2Matrix { entries, modulus };
        if m.det().is_zero() {
            return Err(Error::Singular(modulus.0));
        }
        Ok(m)
    }

    pub fn identity(modulus: Prime) -> Self {
        Gl2Matrix { entries: [[1, 0], [0, 1]], modulus }
    }

    pub fn modulus(&self) -> Prime {
        self.modulus
    }

    pub fn entry(&self, row: usize, col: usize) -> ResidueScalar {
        ResidueScalar { value: self.entries[row][col], modulus: self.modulus }
    }

    pub fn entries(&self) -> [[u32; 2]; 2] {
        self.entries
    }

    pub fn det(&self) -> ResidueScalar {
        let [[a, b], [c, d]] = self.entries.map(|r| r.map(|e| e as i64));
        ResidueScalar::new(a * d - b * c, self.modulus)
    }

    pub fn trace(&self) -> ResidueScalar {
        ResidueScalar::new(self.entries[0][0] as i64 + self.entries[1][1] as i64, self.modulus)
    }

    pub fn is_identity(&self) -> bool {
        self.entries == [[1, 0], [0, 1]]
    }

    pub fn is_sl2(&self) -> bool {
        self.det().value == 1
    }

    pub fn inv(&self) -> Self {
        let det_inv = mod_inv(self.det()).expect("Gl2Matrix is invertible");
        let [[a, b], [c, d]] = self.entries.map(|r| r.map(|e| e as i64));
        let adj = [[d, -b], [-c, a]];
        self.map_raw(adj).scale_unchecked(det_inv)
    }

    /// `k * M` for a nonzero scalar `k`.
    pub fn scale(&self, k: ResidueScalar) -> Result<Self> {
        if k.modulus != self.modulus {
            return Err(Error::ModulusMismatch(self.modulus.0, k.modulus.0));
        }
        if k.is_zero() {
            return Err(Error::Singular(self.modulus.0));
        }
        Ok(self.scale_unchecked(k))
    }

    fn scale_unchecked(&self, k: ResidueScalar) -> Self {
        let m = self.modulus.0 as u64;
        let k = k.value as u64;
        Gl2Matrix {
            entries: self.entries.map(|r| r.map(|e| (e as u64 * k % m) as u32)),
            modulus: self.modulus,
        }
    }

    fn map_raw(&self, raw: [[i64; 2]; 2]) -> Self {
        let m = self.modulus.0 as i64;
        Gl2Matrix {
            entries: raw.map(|r| r.map(|e| e.rem_euclid(m) as u32)),
            modulus: self.modulus,
        }
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = *self;
        let mut acc = Gl2Matrix::identity(self.modulus);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative order, by repeated multiplication.
    pub fn order(&self) -> u64 {
        let mut acc = *self;
        let mut k = 1;
        while !acc.is_identity() {
            acc = acc * *self;
            k += 1;
        }
        k
    }

    /// Compact key for hashing in group closures.
    pub(crate) fn key(&self) -> u64 {
        let [[a, b], [c, d]] = self.entries;
        (a as u64) << 48 | (b as u64) << 32 | (c as u64) << 16 | d as u64
    }
}

impl Mul for Gl2Matrix {
    type Output = Gl2Matrix;
    fn mul(self, rhs: Gl2Matrix) -> Gl2Matrix {
        assert_eq!(self.modulus, rhs.modulus, "GL2 product across moduli");
        let m = self.modulus.0 as u64;
        let a = self.entries.map(|r| r.map(|e| e as u64));
        let b = rhs.entries.map(|r| r.map(|e| e as u64));
        let mut entries = [[0u32; 2]; 2];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = ((a[i][0] * b[0][j] + a[i][1] * b[1][j]) % m) as u32;
            }
        }
        Gl2Matrix { entries, modulus: self.modulus }
    }
}

impl fmt::Display for Gl2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.entries;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

pub fn gl2_det(m: &Gl2Matrix) -> ResidueScalar {
    m.det()
}

pub fn gl2_mul(a: &Gl2Matrix, b: &Gl2Matrix) -> Gl2Matrix {
    *a * *b
}

pub fn gl2_inv(m: &Gl2Matrix) -> Gl2Matrix {
    m.inv()
}

/// `det(A - B)`; the difference itself need not be invertible.
pub fn det_of_difference(a: &Gl2Matrix, b: &Gl2Matrix) -> ResidueScalar {
    assert_eq!(a.modulus, b.modulus);
    let d = |r: usize, c: usize| a.entries[r][c] as i64 - b.entries[r][c] as i64;
    ResidueScalar::new(d(0, 0) * d(1, 1) - d(0, 1) * d(1, 0), a.modulus)
}

/// Every element of GL2(p), in lexicographic entry order.
pub fn enumerate_gl2(p: Prime) -> Vec<Gl2Matrix> {
    let n = p.0;
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    if let Ok(m) = Gl2Matrix::from_raw([[a, b], [c, d]], p) {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// Every element of SL2(p).
pub fn enumerate_sl2(p: Prime) -> Vec<Gl2Matrix> {
    enumerate_gl2(p).into_iter().filter(Gl2Matrix::is_sl2).collect()
}

/// Every 2-dimensional subspace of Z_p^4, each listed once.
pub fn enumerate_planes(p: Prime) -> Vec<Subspace2> {
    let n = p.0 as i64;
    let mut vectors = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    vectors.push(Vec4::new([a, b, c, d], p));
                }
            }
        }
    }
    let mut planes: Vec<Subspace2> = Vec::new();
    for (i, u) in vectors.iter().enumerate() {
        for v in &vectors[i + 1..] {
            if let Ok(s) = Subspace2::from_basis(u, v) {
                planes.push(s);
            }
        }
    }
    planes.sort();
    planes.dedup();
    planes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn r(v: i64, n: u64) -> ResidueScalar {
        ResidueScalar::new(v, p(n))
    }

    #[test]
    fn prime_validation() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(65521).is_ok());
        assert_eq!(Prime::new(1), Err(Error::NotPrime(1)));
        assert_eq!(Prime::new(9), Err(Error::NotPrime(9)));
        assert_eq!(Prime::new(65537), Err(Error::NotPrime(65537)));
    }

    #[test]
    fn mod_inv_examples() {
        assert_eq!(mod_inv(r(1, 13)).unwrap().value(), 1);
        assert_eq!(mod_inv(r(2, 5)).unwrap().value(), 3);
        // 3 * k mod 7 over k = 0..6
        let brute = (0..7).find(|k| 3 * k % 7 == 1).unwrap();
        assert_eq!(brute, 5);
        assert_eq!(mod_inv(r(3, 7)).unwrap().value(), 5);
        assert_eq!(mod_inv(r(0, 7)), Err(Error::ZeroInverse));
    }

    #[test]
    fn nonresidues() {
        assert_eq!(smallest_nonresidue(p(3)).unwrap().value(), 2);
        assert_eq!(smallest_nonresidue(p(5)).unwrap().value(), 2);
        assert_eq!(smallest_nonresidue(p(7)).unwrap().value(), 3);
        assert_eq!(smallest_nonresidue(p(2)), Err(Error::NoNonresidue));
        // squares mod 7 are {0,1,2,4}
        let squares: Vec<u32> = (0..7u32).map(|x| x * x % 7).collect();
        assert!(!squares.contains(&3) && squares.contains(&2));
    }

    #[test]
    fn square_roots() {
        for n in [3, 5, 7, 11, 13] {
            let (q, q2) = sqrt_mod(r(1, n)).unwrap();
            assert_eq!((q.value(), q2.value()), (1, n as u32 - 1));
        }
        let a = -mod_inv(r(2, 3)).unwrap();
        assert_eq!(a.value(), 1);
        let (q, q2) = sqrt_mod(a).unwrap();
        assert_eq!((q.value(), q2.value()), (1, 2));
        let a = -mod_inv(r(3, 7)).unwrap();
        assert_eq!(a.value(), 2);
        let (q, q2) = sqrt_mod(a).unwrap();
        assert_eq!((q.value(), q2.value()), (3, 4));
        assert!(sqrt_mod(r(3, 7)).is_none());
    }

    #[test]
    fn symplectic_examples() {
        let q = p(5);
        let e1 = Vec4::new([1, 0, 0, 0], q);
        let e2 = Vec4::new([0, 1, 0, 0], q);
        assert_eq!(symplectic_form(&e1, &e2).unwrap().value(), 1);
        let u = Vec4::new([0, 1, 1, 0], p(3));
        let v = Vec4::new([1, 0, 0, 1], p(3));
        assert_eq!(symplectic_form(&u, &v).unwrap().value(), 0);
        assert_eq!(
            symplectic_form(&e1, &Vec4::new([1, 0, 0, 0], p(3))),
            Err(Error::ModulusMismatch(5, 3))
        );
    }

    #[test]
    fn symplectic_antisymmetric_exhaustive() {
        for n in [2, 3] {
            let q = p(n);
            let all: Vec<Vec4> = enumerate_planes(q)
                .iter()
                .flat_map(|s| s.points())
                .collect();
            for u in &all {
                assert!(symplectic_form(u, u).unwrap().is_zero());
                for v in all.iter().step_by(7) {
                    let a = symplectic_form(u, v).unwrap();
                    let b = symplectic_form(v, u).unwrap();
                    assert_eq!(a, -b);
                }
            }
        }
    }

    #[test]
    fn canonical_subspaces() {
        let s = Subspace2::from_rows([[1, 0, 0, 0], [0, 1, 0, 0]], p(5)).unwrap();
        assert_eq!(s.rows(), [[1, 0, 0, 0], [0, 1, 0, 0]]);
        let s = Subspace2::from_rows([[2, 0, 0, 0], [0, 1, 0, 0]], p(5)).unwrap();
        assert_eq!(s.rows(), [[1, 0, 0, 0], [0, 1, 0, 0]]);
        let s = Subspace2::from_rows([[1, 1, 0, 0], [1, 0, 0, 0]], p(3)).unwrap();
        assert_eq!(s.rows(), [[1, 0, 0, 0], [0, 1, 0, 0]]);
        assert_eq!(
            Subspace2::from_rows([[1, 2, 0, 0], [2, 4, 0, 0]], p(5)),
            Err(Error::DependentVectors)
        );
    }

    #[test]
    fn trivial_intersections() {
        let q = p(7);
        let f0 = Subspace2::f0(q);
        let f1 = Subspace2::f1(q);
        assert!(intersect_trivially(&f0, &f1).unwrap());
        assert!(!intersect_trivially(&f0, &f0).unwrap());
        let t = Subspace2::from_rows([[1, 0, 0, 0], [0, 0, 1, 0]], q).unwrap();
        assert!(!intersect_trivially(&f0, &t).unwrap());
        assert!(intersect_trivially(&f0, &Subspace2::f1(p(5))).is_err());
    }

    #[test]
    fn plane_counts() {
        // Gaussian binomial [4 choose 2]_p = (p^2+1)(p^2+p+1)
        assert_eq!(enumerate_planes(p(2)).len(), 5 * 7);
        assert_eq!(enumerate_planes(p(3)).len(), 10 * 13);
    }

    #[test]
    fn gl2_examples() {
        assert_eq!(Gl2Matrix::identity(p(3)).det().value(), 1);
        let m = Gl2Matrix::new([[0, 2], [1, 0]], p(3)).unwrap();
        assert_eq!(m.det().value(), 1);
        let a = Gl2Matrix::new([[1, 1], [0, 1]], p(2)).unwrap();
        let b = Gl2Matrix::new([[1, 0], [1, 1]], p(2)).unwrap();
        assert_eq!(gl2_mul(&a, &b).entries(), [[0, 1], [1, 1]]);
        assert_eq!(Gl2Matrix::new([[1, 2], [2, 4]], p(5)), Err(Error::Singular(5)));
        assert_eq!(enumerate_gl2(p(2)).len(), 6);
        assert_eq!(enumerate_gl2(p(3)).len(), 48);
        assert_eq!(enumerate_sl2(p(3)).len(), 24);
    }

    fn cayley_hamilton_holds(m: &Gl2Matrix) -> bool {
        let q = m.modulus().get() as i64;
        let e = m.entries().map(|r| r.map(|x| x as i64));
        let (t, d) = (m.trace().value() as i64, m.det().value() as i64);
        (0..2).all(|i| {
            (0..2).all(|j| {
                let sq = e[i][0] * e[0][j] + e[i][1] * e[1][j];
                let id = if i == j { d } else { 0 };
                (sq - t * e[i][j] + id).rem_euclid(q) == 0
            })
        })
    }

    #[test]
    fn gl2_inverse_and_cayley_hamilton_exhaustive() {
        for n in [2, 3] {
            for m in enumerate_gl2(p(n)) {
                assert!((m * gl2_inv(&m)).is_identity());
                assert_eq!(gl2_det(&gl2_inv(&m)), mod_inv(gl2_det(&m)).unwrap());
                assert!(cayley_hamilton_holds(&m));
            }
        }
    }

    #[test]
    fn order_matches_pow() {
        let m = Gl2Matrix::new([[1, 1], [0, 1]], p(3)).unwrap();
        assert_eq!(m.order(), 3);
        assert!(m.pow(3).is_identity());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn gl2_at(q: Prime) -> impl Strategy<Value = Gl2Matrix> {
            let n = q.get() as i64;
            prop::array::uniform4(0..n).prop_filter_map("singular", move |[a, b, c, d]| {
                Gl2Matrix::new([[a, b], [c, d]], q).ok()
            })
        }

        proptest! {
            #[test]
            fn cayley_hamilton_random_p11(m in gl2_at(Prime::new(11).unwrap())) {
                prop_assert!(cayley_hamilton_holds(&m));
                prop_assert_eq!(gl2_det(&gl2_inv(&m)), mod_inv(gl2_det(&m)).unwrap());
            }

            #[test]
            fn canonical_form_ignores_basis_change(
                n in prop::sample::select(vec![2u64, 3, 5, 7, 11]),
                rows in prop::array::uniform2(prop::array::uniform4(0i64..11)),
                mix in prop::array::uniform4(0i64..11),
            ) {
                let q = Prime::new(n).unwrap();
                let Ok(s) = Subspace2::from_rows(rows, q) else { return Ok(()) };
                let Ok(g) = Gl2Matrix::new([[mix[0], mix[1]], [mix[2], mix[3]]], q) else { return Ok(()) };
                let [u, v] = [Vec4::new(rows[0], q), Vec4::new(rows[1], q)];
                let u2 = u.scale(g.entry(0, 0)).add(&v.scale(g.entry(0, 1)));
                let v2 = u.scale(g.entry(1, 0)).add(&v.scale(g.entry(1, 1)));
                let t = Subspace2::from_basis(&u2, &v2).unwrap();
                prop_assert_eq!(s, t);
                let [a, b] = s.basis();
                prop_assert_eq!(Subspace2::from_basis(&a, &b).unwrap(), s);
            }

            #[test]
            fn intersection_is_symmetric(
                rows in prop::array::uniform4(prop::array::uniform4(0i64..5)),
            ) {
                let q = Prime::new(5).unwrap();
                let (Ok(s), Ok(t)) = (
                    Subspace2::from_rows([rows[0], rows[1]], q),
                    Subspace2::from_rows([rows[2], rows[3]], q),
                ) else { return Ok(()) };
                prop_assert_eq!(intersect_trivially(&s, &t).unwrap(), intersect_trivially(&t, &s).unwrap());
            }
        }
    }
}
