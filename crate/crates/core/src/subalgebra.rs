//! The dictionary between GL2(p), planes of Z_p^4 and subalgebras of
//! `M_p (x) M_p`.
//!
//! A plane `U` labels the algebra spanned by the tensor Weyl operators
//! `X^{u1} Z^{u2} (x) X^{u3} Z^{u4}`, `u ∈ U`. The map [`phi`] sends
//! `[[x1, y1], [x2, y2]]` to `Sp{(0,1,x1,x2), (1,0,y1,y2)}`; its image is
//! exactly the planes meeting `F0` and `F1` trivially.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::residue::{det_of_difference, mod_inv, Gl2Matrix, Subspace2, Vec4};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubalgebraKind {
    Masa,
    Factor,
    /// `M_p (x) I`, labelled by `F0`.
    ProductFactor0,
    /// `I (x) M_p`, labelled by `F1`.
    ProductFactor1,
}

impl SubalgebraKind {
    pub fn is_factor(self) -> bool {
        !matches!(self, SubalgebraKind::Masa)
    }
}

/// A subalgebra given by its label plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SubalgebraDesc {
    pub kind: SubalgebraKind,
    pub subspace: Subspace2,
    pub gl2_rep: Option<Gl2Matrix>,
}

impl SubalgebraDesc {
    pub fn from_gl2(m: Gl2Matrix) -> Self {
        let subspace = phi(&m);
        SubalgebraDesc { kind: classify(&subspace), subspace, gl2_rep: Some(m) }
    }

    /// Classifies `s` and attaches its GL2 representative when it has one.
    pub fn from_subspace(subspace: Subspace2) -> Self {
        SubalgebraDesc {
            kind: classify(&subspace),
            subspace,
            gl2_rep: phi_inverse(&subspace).ok(),
        }
    }

    pub fn product_factor0(p: crate::Prime) -> Self {
        Self::from_subspace(Subspace2::f0(p))
    }

    pub fn product_factor1(p: crate::Prime) -> Self {
        Self::from_subspace(Subspace2::f1(p))
    }
}

pub fn phi(m: &Gl2Matrix) -> Subspace2 {
    let p = m.modulus();
    let [[x1, y1], [x2, y2]] = m.entries().map(|r| r.map(i64::from));
    let u = Vec4::new([0, 1, x1, x2], p);
    let v = Vec4::new([1, 0, y1, y2], p);
    Subspace2::from_basis(&u, &v).expect("phi basis vectors are independent")
}

/// Reads `M_S` off the echelon basis `(1,0,y1,y2), (0,1,x1,x2)`.
pub fn phi_inverse(s: &Subspace2) -> Result<Gl2Matrix> {
    let p = s.modulus();
    let [r0, r1] = s.rows();
    if r0[..2] != [1, 0] || r1[..2] != [0, 1] {
        // leading block is not the identity, so S meets F1
        return Err(Error::NotInS);
    }
    let m = [[r1[2], r0[2]], [r1[3], r0[3]]].map(|r| r.map(i64::from));
    Gl2Matrix::new(m, p).map_err(|_| Error::NotInS)
}

pub fn classify(s: &Subspace2) -> SubalgebraKind {
    let p = s.modulus();
    if *s == Subspace2::f0(p) {
        SubalgebraKind::ProductFactor0
    } else if *s == Subspace2::f1(p) {
        SubalgebraKind::ProductFactor1
    } else if s.is_isotropic() {
        SubalgebraKind::Masa
    } else {
        SubalgebraKind::Factor
    }
}

/// `π(M)' = π((det M)^-1 M)`.
pub fn commutant(m: &Gl2Matrix) -> Gl2Matrix {
    let det_inv = mod_inv(m.det()).expect("Gl2Matrix is invertible");
    m.scale(det_inv).expect("nonzero scalar")
}

/// Commutant on the plane level: `F0 <-> F1`, otherwise through [`commutant`].
pub fn commutant_subspace(s: &Subspace2) -> Result<Subspace2> {
    let p = s.modulus();
    match classify(s) {
        SubalgebraKind::ProductFactor0 => Ok(Subspace2::f1(p)),
        SubalgebraKind::ProductFactor1 => Ok(Subspace2::f0(p)),
        _ => Ok(phi(&commutant(&phi_inverse(s)?))),
    }
}

fn require_sl2(m: &Gl2Matrix) -> Result<()> {
    if m.is_sl2() {
        Ok(())
    } else {
        Err(Error::NotSL2)
    }
}

/// For `A, B ∈ SL2(p)`: `π(A)` and `π(B)` are complementary iff
/// `det(A - B) != 0`.
pub fn sl2_pair_complementary(a: &Gl2Matrix, b: &Gl2Matrix) -> Result<bool> {
    require_sl2(a)?;
    require_sl2(b)?;
    Ok(!det_of_difference(a, b).is_zero())
}

/// For `M ∈ SL2(p)`: `M != I` and `det(M - I) = 0`.
pub fn has_order_p(m: &Gl2Matrix) -> Result<bool> {
    require_sl2(m)?;
    let id = Gl2Matrix::identity(m.modulus());
    Ok(!m.is_identity() && det_of_difference(m, &id).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::{
        enumerate_gl2, enumerate_planes, enumerate_sl2, intersect_trivially, symplectic_form,
        Prime,
    };

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn m(e: [[i64; 2]; 2], n: u64) -> Gl2Matrix {
        Gl2Matrix::new(e, p(n)).unwrap()
    }

    #[test]
    fn phi_examples() {
        let s = phi(&Gl2Matrix::identity(p(3)));
        assert_eq!(s, Subspace2::from_rows([[0, 1, 1, 0], [1, 0, 0, 1]], p(3)).unwrap());
        let s = phi(&m([[0, 2], [1, 0]], 3));
        assert_eq!(s, Subspace2::from_rows([[0, 1, 0, 1], [1, 0, 2, 0]], p(3)).unwrap());
        assert_eq!(phi_inverse(&s).unwrap(), m([[0, 2], [1, 0]], 3));
        assert_eq!(phi_inverse(&Subspace2::f0(p(3))), Err(Error::NotInS));
        assert_eq!(phi_inverse(&Subspace2::f1(p(3))), Err(Error::NotInS));
    }

    #[test]
    fn phi_is_a_bijection_onto_s() {
        for (n, gl2_order) in [(2, 6), (3, 48)] {
            let q = p(n);
            let (f0, f1) = (Subspace2::f0(q), Subspace2::f1(q));
            let in_s: Vec<Subspace2> = enumerate_planes(q)
                .into_iter()
                .filter(|s| {
                    intersect_trivially(s, &f0).unwrap() && intersect_trivially(s, &f1).unwrap()
                })
                .collect();
            assert_eq!(in_s.len(), gl2_order);
            let mut images: Vec<Subspace2> = enumerate_gl2(q).iter().map(phi).collect();
            images.sort();
            images.dedup();
            assert_eq!(images.len(), gl2_order);
            for s in &in_s {
                let mm = phi_inverse(s).unwrap();
                assert_eq!(phi(&mm), *s);
            }
            for mm in enumerate_gl2(q) {
                assert_eq!(phi_inverse(&phi(&mm)).unwrap(), mm);
            }
        }
    }

    #[test]
    fn classification() {
        let q = p(3);
        assert_eq!(classify(&Subspace2::f0(q)), SubalgebraKind::ProductFactor0);
        assert_eq!(classify(&Subspace2::f1(q)), SubalgebraKind::ProductFactor1);
        let [a, b] = Subspace2::f0(q).basis();
        assert_eq!(symplectic_form(&a, &b).unwrap().value(), 1);
        assert_eq!(classify(&phi(&m([[2, 0], [0, 1]], 3))), SubalgebraKind::Factor);
        for n in [2, 3] {
            for mm in enumerate_gl2(p(n)) {
                let masa = classify(&phi(&mm)) == SubalgebraKind::Masa;
                assert_eq!(masa, mm.is_sl2(), "{mm}");
            }
        }
    }

    #[test]
    fn commutant_examples() {
        let a = m([[0, 2], [1, 0]], 3);
        assert_eq!(commutant(&a), a);
        assert_eq!(commutant(&m([[2, 0], [0, 1]], 3)), m([[1, 0], [0, 2]], 3));
        assert_eq!(commutant_subspace(&Subspace2::f0(p(5))).unwrap(), Subspace2::f1(p(5)));
    }

    #[test]
    fn commutant_is_involutive_and_symplectically_orthogonal() {
        for n in [2, 3, 5] {
            for mm in enumerate_gl2(p(n)) {
                let c = commutant(&mm);
                assert_eq!(commutant(&c), mm);
                assert_eq!(c.det(), mod_inv(mm.det()).unwrap());
                let [u, v] = phi(&mm).basis();
                let [u2, v2] = phi(&c).basis();
                for (x, y) in [(u, u2), (u, v2), (v, u2), (v, v2)] {
                    assert!(symplectic_form(&x, &y).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn sl2_examples() {
        let c = m([[0, 1], [1, 1]], 2);
        let c2 = c * c;
        assert_eq!(c2, m([[1, 1], [1, 0]], 2));
        assert!(sl2_pair_complementary(&c, &c2).unwrap());
        assert!(!sl2_pair_complementary(&c, &c).unwrap());
        let id = Gl2Matrix::identity(p(2));
        assert!(!sl2_pair_complementary(&id, &m([[1, 1], [0, 1]], 2)).unwrap());
        assert_eq!(
            sl2_pair_complementary(&Gl2Matrix::identity(p(3)), &m([[2, 0], [0, 1]], 3)),
            Err(Error::NotSL2)
        );
    }

    #[test]
    fn order_p_examples() {
        assert!(!has_order_p(&Gl2Matrix::identity(p(3))).unwrap());
        let t = m([[1, 1], [0, 1]], 3);
        assert!(has_order_p(&t).unwrap());
        assert!((t * t * t).is_identity());
        assert!(!has_order_p(&m([[0, 1], [2, 0]], 3)).unwrap());
        assert_eq!(has_order_p(&m([[2, 0], [0, 1]], 3)), Err(Error::NotSL2));
    }

    #[test]
    fn sl2_equivalences_exhaustive() {
        for n in [2u64, 3] {
            let sl2 = enumerate_sl2(p(n));
            for a in &sl2 {
                for b in &sl2 {
                    let det_test = sl2_pair_complementary(a, b).unwrap();
                    let planes = intersect_trivially(&phi(a), &phi(b)).unwrap();
                    assert_eq!(det_test, planes);
                    let q = a.inv() * *b;
                    let order_test = q.is_identity() || has_order_p(&q).unwrap();
                    assert_eq!(order_test, !det_test);
                    if has_order_p(&q).unwrap() {
                        assert_eq!(q.order(), n);
                    }
                }
            }
        }
    }
}
