//! Finite commutative algebras over a prime field, as a desk-scale model of
//! affine schemes.
//!
//! The tangent functor is `A |-> A[eps]` with `eps^2 = 0`. Pullbacks of
//! affine schemes are pushouts of algebras, computed as `N (x)_M E`: the
//! tensor product over the field modulo the span of
//! `f(m) n (x) e - n (x) g(m) e`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("{0} is not a prime below 65536")]
    NotPrime(u32),
    #[error("malformed table: {0}")]
    Table(String),
    #[error("ring axiom fails: {0}")]
    Axiom(String),
    #[error("not an algebra homomorphism: {0}")]
    NotHom(String),
    #[error("too many candidates to enumerate ({0})")]
    TooLarge(u64),
}

/// Coordinates with respect to a basis, reduced mod `p`.
pub type Vector = Vec<u32>;

fn is_prime(p: u32) -> bool {
    (2..65536).contains(&p) && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn inv(a: u32, p: u32) -> u32 {
    // a^(p-2) mod p
    let (mut base, mut exp, mut acc) = (a as u64 % p as u64, p - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    acc as u32
}

/// Row reduction mod `p`; returns reduced nonzero rows and their pivots.
pub fn row_reduce(mut rows: Vec<Vector>, p: u32) -> (Vec<Vector>, Vec<usize>) {
    let width = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        let Some(k) = (r..rows.len()).find(|&k| rows[k][col] != 0) else {
            continue;
        };
        rows.swap(r, k);
        let s = inv(rows[r][col], p) as u64;
        for x in rows[r].iter_mut() {
            *x = (*x as u64 * s % p as u64) as u32;
        }
        for k in 0..rows.len() {
            if k != r && rows[k][col] != 0 {
                let c = rows[k][col] as u64;
                for j in 0..width {
                    let sub = c * rows[r][j] as u64 % p as u64;
                    rows[k][j] = ((rows[k][j] as u64 + p as u64 - sub) % p as u64) as u32;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank(rows: &[Vector], p: u32) -> usize {
    row_reduce(rows.to_vec(), p).0.len()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    pub p: u32,
    pub labels: Vec<String>,
    /// `mult[i][j]` is the product of basis elements `i` and `j`.
    pub mult: Vec<Vec<Vector>>,
    pub unit: Vector,
}

impl FiniteAlgebra {
    /// From structure constants `(i, j, k, c)`, meaning `e_i e_j` has
    /// coefficient `c` at `e_k`. Missing entries are zero.
    pub fn from_constants(
        p: u32,
        labels: Vec<String>,
        constants: &[(usize, usize, usize, u32)],
        unit: Vector,
    ) -> Result<Self, RingError> {
        if !is_prime(p) {
            return Err(RingError::NotPrime(p));
        }
        let d = labels.len();
        let mut mult = vec![vec![vec![0u32; d]; d]; d];
        for &(i, j, k, c) in constants {
            if i >= d || j >= d || k >= d {
                return Err(RingError::Table(format!("index out of range in ({i}, {j}, {k})")));
            }
            mult[i][j][k] = (mult[i][j][k] + c % p) % p;
        }
        if unit.len() != d {
            return Err(RingError::Table("unit has the wrong length".into()));
        }
        let a = Self {
            p,
            labels,
            mult,
            unit: unit.into_iter().map(|x| x % p).collect(),
        };
        a.validate()?;
        Ok(a)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// `p^dim`, or `None` on overflow.
    pub fn element_count(&self) -> Option<u64> {
        (self.p as u64).checked_pow(self.dim() as u32)
    }

    pub fn basis(&self, i: usize) -> Vector {
        let mut v = vec![0; self.dim()];
        v[i] = 1;
        v
    }

    pub fn add(&self, a: &[u32], b: &[u32]) -> Vector {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn mul(&self, a: &[u32], b: &[u32]) -> Vector {
        let p = self.p as u64;
        let d = self.dim();
        let mut out = vec![0u64; d];
        for i in 0..d {
            if a[i] == 0 {
                continue;
            }
            for j in 0..d {
                if b[j] == 0 {
                    continue;
                }
                let c = a[i] as u64 * b[j] as u64 % p;
                for (k, &m) in self.mult[i][j].iter().enumerate() {
                    out[k] = (out[k] + c * m as u64) % p;
                }
            }
        }
        out.into_iter().map(|x| x as u32).collect()
    }

    /// Commutativity, associativity and unit laws on basis elements.
    pub fn validate(&self) -> Result<(), RingError> {
        let d = self.dim();
        for i in 0..d {
            let ei = self.basis(i);
            if self.mul(&self.unit, &ei) != ei {
                return Err(RingError::Axiom(format!("1 * {} differs", self.labels[i])));
            }
            for j in 0..d {
                if self.mult[i][j] != self.mult[j][i] {
                    return Err(RingError::Axiom(format!(
                        "{} * {} is not commutative",
                        self.labels[i], self.labels[j]
                    )));
                }
                for k in 0..d {
                    let ek = self.basis(k);
                    let l = self.mul(&self.mult[i][j], &ek);
                    let r = self.mul(&ei, &self.mult[j][k]);
                    if l != r {
                        return Err(RingError::Axiom(format!(
                            "associativity at ({}, {}, {})",
                            self.labels[i], self.labels[j], self.labels[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A linear map given by the images of the source basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraHom {
    /// `images[i]` is the image of source basis element `i`.
    pub images: Vec<Vector>,
}

impl AlgebraHom {
    pub fn apply(&self, target: &FiniteAlgebra, v: &[u32]) -> Vector {
        let p = target.p as u64;
        let mut out = vec![0u64; target.dim()];
        for (i, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (k, &x) in self.images[i].iter().enumerate() {
                out[k] = (out[k] + c as u64 * x as u64) % p;
            }
        }
        out.into_iter().map(|x| x as u32).collect()
    }

    pub fn identity(a: &FiniteAlgebra) -> Self {
        Self {
            images: (0..a.dim()).map(|i| a.basis(i)).collect(),
        }
    }

    /// `self` then `next`, where `next` lands in `tgt`.
    pub fn then(&self, next: &AlgebraHom, tgt: &FiniteAlgebra) -> Self {
        Self {
            images: self.images.iter().map(|v| next.apply(tgt, v)).collect(),
        }
    }

    pub fn check(&self, src: &FiniteAlgebra, tgt: &FiniteAlgebra) -> Result<(), RingError> {
        if self.images.len() != src.dim() || self.images.iter().any(|v| v.len() != tgt.dim()) {
            return Err(RingError::NotHom("shape".into()));
        }
        if self.apply(tgt, &src.unit) != tgt.unit {
            return Err(RingError::NotHom("unit is not preserved".into()));
        }
        for i in 0..src.dim() {
            for j in 0..src.dim() {
                let l = self.apply(tgt, &src.mult[i][j]);
                let r = tgt.mul(&self.images[i], &self.images[j]);
                if l != r {
                    return Err(RingError::NotHom(format!(
                        "product {} * {} is not preserved",
                        src.labels[i], src.labels[j]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_bijective(&self, src: &FiniteAlgebra, tgt: &FiniteAlgebra) -> bool {
        src.dim() == tgt.dim() && rank(&self.images, tgt.p) == tgt.dim()
    }
}

/// Every algebra homomorphism between two algebras, by exhausting matrices.
pub fn enumerate_homs(
    src: &FiniteAlgebra,
    tgt: &FiniteAlgebra,
    limit: u64,
) -> Result<Vec<AlgebraHom>, RingError> {
    let cells = (src.dim() * tgt.dim()) as u32;
    let total = (tgt.p as u64)
        .checked_pow(cells)
        .filter(|&t| t <= limit)
        .ok_or(RingError::TooLarge(limit))?;
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let images = (0..src.dim())
            .map(|_| {
                (0..tgt.dim())
                    .map(|_| {
                        let x = (c % tgt.p as u64) as u32;
                        c /= tgt.p as u64;
                        x
                    })
                    .collect()
            })
            .collect();
        let h = AlgebraHom { images };
        if h.check(src, tgt).is_ok() {
            out.push(h);
        }
    }
    Ok(out)
}

/// `A[eps]` with basis `a_i` then `a_i eps`.
pub fn dual_numbers(a: &FiniteAlgebra) -> FiniteAlgebra {
    let d = a.dim();
    let mut labels = a.labels.clone();
    labels.extend(a.labels.iter().map(|l| format!("{l}.eps")));
    let zero = vec![0u32; 2 * d];
    let mut mult = vec![vec![zero.clone(); 2 * d]; 2 * d];
    for i in 0..d {
        for j in 0..d {
            let m = &a.mult[i][j];
            let mut plain = zero.clone();
            let mut eps = zero.clone();
            plain[..d].copy_from_slice(m);
            eps[d..].copy_from_slice(m);
            mult[i][j] = plain;
            mult[i][d + j] = eps.clone();
            mult[d + i][j] = eps;
        }
    }
    let mut unit = a.unit.clone();
    unit.extend(vec![0; d]);
    FiniteAlgebra {
        p: a.p,
        labels,
        mult,
        unit,
    }
}

/// `f + f eps`: `f` on both blocks.
pub fn dual_numbers_hom(f: &AlgebraHom, tgt_dim: usize) -> AlgebraHom {
    let mut images = Vec::new();
    for v in &f.images {
        let mut w = v.clone();
        w.extend(vec![0; tgt_dim]);
        images.push(w);
    }
    for v in &f.images {
        let mut w = vec![0; tgt_dim];
        w.extend(v.iter().copied());
        images.push(w);
    }
    AlgebraHom { images }
}

/// `(A, f)` pushed through `T` `k` times.
pub fn iterate_dual(a: &FiniteAlgebra, k: usize) -> FiniteAlgebra {
    (0..k).fold(a.clone(), |acc, _| dual_numbers(&acc))
}

pub fn iterate_dual_hom(f: &AlgebraHom, tgt: &FiniteAlgebra, k: usize) -> AlgebraHom {
    let mut h = f.clone();
    let mut t = tgt.clone();
    for _ in 0..k {
        h = dual_numbers_hom(&h, t.dim());
        t = dual_numbers(&t);
    }
    h
}

/// The pushout `N (x)_M E` with its cocone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    pub algebra: FiniteAlgebra,
    pub into_n: AlgebraHom,
    pub into_e: AlgebraHom,
    /// Reduced relation rows and pivots on `N (x) E` coordinates.
    relations: (Vec<Vector>, Vec<usize>),
    /// `N (x) E` coordinate behind each quotient basis element.
    free: Vec<usize>,
    e_dim: usize,
}

impl Tensor {
    /// Quotient coordinates of an `N (x) E` vector.
    fn reduce(&self, mut v: Vector, p: u32) -> Vector {
        let (rows, pivots) = &self.relations;
        for (row, &col) in rows.iter().zip(pivots) {
            let c = v[col] as u64;
            if c == 0 {
                continue;
            }
            for (x, &r) in v.iter_mut().zip(row) {
                *x = ((*x as u64 + p as u64 - c * r as u64 % p as u64) % p as u64) as u32;
            }
        }
        self.free.iter().map(|&i| v[i]).collect()
    }

    /// The unique map to `C` with `into_n;u = h` and `into_e;u = k`.
    pub fn mediate(
        &self,
        c: &FiniteAlgebra,
        h: &AlgebraHom,
        k: &AlgebraHom,
    ) -> Result<AlgebraHom, RingError> {
        let value = |s: usize| c.mul(&h.images[s / self.e_dim], &k.images[s % self.e_dim]);
        // the relation span must vanish
        for row in &self.relations.0 {
            let mut acc = vec![0u32; c.dim()];
            for (s, &coef) in row.iter().enumerate() {
                if coef != 0 {
                    let v: Vector = value(s).iter().map(|x| x * coef % c.p).collect();
                    acc = c.add(&acc, &v);
                }
            }
            if acc.iter().any(|&x| x != 0) {
                return Err(RingError::NotHom("cocone does not commute".into()));
            }
        }
        let u = AlgebraHom {
            images: self.free.iter().map(|&s| value(s)).collect(),
        };
        u.check(&self.algebra, c)?;
        Ok(u)
    }
}

/// `N (x)_M E` for `f: M -> N` and `g: M -> E`, by row reduction mod `p`.
pub fn tensor_over(
    m: &FiniteAlgebra,
    n: &FiniteAlgebra,
    e: &FiniteAlgebra,
    f: &AlgebraHom,
    g: &AlgebraHom,
) -> Tensor {
    let p = n.p;
    let (dn, de) = (n.dim(), e.dim());
    let width = dn * de;
    let outer = |a: &[u32], b: &[u32]| -> Vector {
        let mut v = vec![0u32; width];
        for i in 0..dn {
            for j in 0..de {
                v[i * de + j] = (a[i] as u64 * b[j] as u64 % p as u64) as u32;
            }
        }
        v
    };
    let mut rows = Vec::new();
    for a in 0..m.dim() {
        for i in 0..dn {
            for j in 0..de {
                let left = outer(&n.mul(&f.images[a], &n.basis(i)), &e.basis(j));
                let right = outer(&n.basis(i), &e.mul(&g.images[a], &e.basis(j)));
                let row: Vector = left
                    .iter()
                    .zip(&right)
                    .map(|(x, y)| (x + p - y) % p)
                    .collect();
                if row.iter().any(|&x| x != 0) {
                    rows.push(row);
                }
            }
        }
    }
    let relations = if rows.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        row_reduce(rows, p)
    };
    let free: Vec<usize> = (0..width).filter(|c| !relations.1.contains(c)).collect();
    let mut t = Tensor {
        algebra: FiniteAlgebra {
            p,
            labels: Vec::new(),
            mult: Vec::new(),
            unit: Vec::new(),
        },
        into_n: AlgebraHom { images: Vec::new() },
        into_e: AlgebraHom { images: Vec::new() },
        relations,
        free,
        e_dim: de,
    };
    let labels = t
        .free
        .iter()
        .map(|&s| format!("{}(x){}", n.labels[s / de], e.labels[s % de]))
        .collect();
    let mut mult = Vec::new();
    for &s in &t.free {
        let mut row = Vec::new();
        for &r in &t.free {
            let a = n.mul(&n.basis(s / de), &n.basis(r / de));
            let b = e.mul(&e.basis(s % de), &e.basis(r % de));
            row.push(t.reduce(outer(&a, &b), p));
        }
        mult.push(row);
    }
    let unit = t.reduce(outer(&n.unit, &e.unit), p);
    let into_n = AlgebraHom {
        images: (0..dn).map(|i| t.reduce(outer(&n.basis(i), &e.unit), p)).collect(),
    };
    let into_e = AlgebraHom {
        images: (0..de).map(|j| t.reduce(outer(&n.unit, &e.basis(j)), p)).collect(),
    };
    t.algebra = FiniteAlgebra {
        p,
        labels,
        mult,
        unit,
    };
    t.into_n = into_n;
    t.into_e = into_e;
    t
}

/// Mediators for a family of cocones `(h: N -> C, k: E -> C)`.
pub fn certify_pushout(
    t: &Tensor,
    cocones: &[(FiniteAlgebra, AlgebraHom, AlgebraHom)],
) -> Result<Vec<AlgebraHom>, RingError> {
    let mut out = Vec::new();
    for (c, h, k) in cocones {
        let u = t.mediate(c, h, k)?;
        if t.into_n.then(&u, c) != *h || t.into_e.then(&u, c) != *k {
            return Err(RingError::NotHom("mediator does not factor the cocone".into()));
        }
        out.push(u);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthCheck {
    pub k: usize,
    /// Dimension of `T^k(N (x)_M E)`.
    pub image_dim: usize,
    /// Dimension of `T^k N (x)_{T^k M} T^k E`.
    pub pushout_dim: usize,
    pub comparison_is_iso: bool,
}

/// For `k = 1..=depth`, the comparison
/// `T^k N (x)_{T^k M} T^k E -> T^k(N (x)_M E)` induced by the cocone
/// `(T^k into_n, T^k into_e)` must be an isomorphism.
pub fn check_t_preserves_pushout(
    m: &FiniteAlgebra,
    n: &FiniteAlgebra,
    e: &FiniteAlgebra,
    f: &AlgebraHom,
    g: &AlgebraHom,
    depth: usize,
) -> Result<Vec<DepthCheck>, RingError> {
    let base = tensor_over(m, n, e, f, g);
    let mut out = Vec::new();
    for k in 1..=depth {
        let (mk, nk, ek) = (iterate_dual(m, k), iterate_dual(n, k), iterate_dual(e, k));
        let fk = iterate_dual_hom(f, n, k);
        let gk = iterate_dual_hom(g, e, k);
        let rhs = tensor_over(&mk, &nk, &ek, &fk, &gk);
        let lhs = iterate_dual(&base.algebra, k);
        let h = iterate_dual_hom(&base.into_n, &base.algebra, k);
        let kk = iterate_dual_hom(&base.into_e, &base.algebra, k);
        let xi = rhs.mediate(&lhs, &h, &kk)?;
        out.push(DepthCheck {
            k,
            image_dim: lhs.dim(),
            pushout_dim: rhs.algebra.dim(),
            comparison_is_iso: xi.is_bijective(&rhs.algebra, &lhs),
        });
    }
    Ok(out)
}

/// Small algebras over the two-element field.
pub mod samples {
    use super::*;
    use alloc::string::ToString;

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    pub fn f2() -> FiniteAlgebra {
        FiniteAlgebra::from_constants(2, labels(&["1"]), &[(0, 0, 0, 1)], vec![1]).unwrap()
    }

    /// `F2[x]/(x^2)`.
    pub fn f2_dual() -> FiniteAlgebra {
        FiniteAlgebra::from_constants(
            2,
            labels(&["1", "x"]),
            &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1)],
            vec![1, 0],
        )
        .unwrap()
    }

    /// `F2 x F2` on its two idempotents.
    pub fn f2_split() -> FiniteAlgebra {
        FiniteAlgebra::from_constants(
            2,
            labels(&["u", "v"]),
            &[(0, 0, 0, 1), (1, 1, 1, 1)],
            vec![1, 1],
        )
        .unwrap()
    }

    /// `F4 = F2[x]/(x^2 + x + 1)`.
    pub fn f4() -> FiniteAlgebra {
        FiniteAlgebra::from_constants(
            2,
            labels(&["1", "x"]),
            &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 0, 1), (1, 1, 1, 1)],
            vec![1, 0],
        )
        .unwrap()
    }

    pub fn all() -> Vec<(&'static str, FiniteAlgebra)> {
        vec![
            ("F2", f2()),
            ("F2[x]/(x^2)", f2_dual()),
            ("F2xF2", f2_split()),
            ("F4", f4()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::samples::*;
    use super::*;

    #[test]
    fn samples_are_algebras() {
        for (_, a) in all() {
            a.validate().unwrap();
        }
        let bad = FiniteAlgebra::from_constants(
            2,
            vec!["1".into(), "x".into()],
            &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 0, 1)],
            vec![1, 0],
        );
        assert!(matches!(bad, Err(RingError::Axiom(_))));
        assert_eq!(
            FiniteAlgebra::from_constants(4, vec![], &[], vec![]),
            Err(RingError::NotPrime(4))
        );
    }

    #[test]
    fn dual_numbers_of_f2() {
        let t = dual_numbers(&f2());
        assert_eq!(t.dim(), 2);
        assert_eq!(t.element_count(), Some(4));
        t.validate().unwrap();
        // eps^2 = 0
        assert_eq!(t.mul(&t.basis(1), &t.basis(1)), vec![0, 0]);
        assert_eq!(iterate_dual(&f2_dual(), 2).dim(), 8);
    }

    #[test]
    fn dual_numbers_preserve_identity() {
        let a = f2_dual();
        let id = AlgebraHom::identity(&a);
        assert_eq!(dual_numbers_hom(&id, a.dim()), AlgebraHom::identity(&dual_numbers(&a)));
    }

    #[test]
    fn homs_of_small_algebras() {
        // F2[x]/(x^2) -> F2[x]/(x^2): x |-> 0 or x
        assert_eq!(enumerate_homs(&f2_dual(), &f2_dual(), 1 << 10).unwrap().len(), 2);
        // F4 has the identity and Frobenius
        assert_eq!(enumerate_homs(&f4(), &f4(), 1 << 10).unwrap().len(), 2);
        assert!(enumerate_homs(&f4(), &f2(), 1 << 10).unwrap().is_empty());
    }

    #[test]
    fn tensor_of_dual_numbers() {
        let (m, n) = (f2(), f2_dual());
        let f = enumerate_homs(&m, &n, 16).unwrap().remove(0);
        let t = tensor_over(&m, &n, &n, &f, &f);
        assert_eq!(t.algebra.dim(), 4);
        assert_eq!(t.algebra.element_count(), Some(16));
        t.algebra.validate().unwrap();
        t.into_n.check(&n, &t.algebra).unwrap();
        let checks = check_t_preserves_pushout(&m, &n, &n, &f, &f, 2).unwrap();
        assert_eq!(checks[0].image_dim, 8);
        assert_eq!(checks[0].pushout_dim, 8);
        assert!(checks.iter().all(|c| c.comparison_is_iso));
    }

    #[test]
    fn tensor_over_itself_is_unit() {
        let e = f2_dual();
        let m = f4();
        let id = AlgebraHom::identity(&m);
        let t = tensor_over(&m, &m, &m, &id, &id);
        assert_eq!(t.algebra.dim(), 2);
        let t = tensor_over(&e, &e, &e, &AlgebraHom::identity(&e), &AlgebraHom::identity(&e));
        assert_eq!(t.algebra.dim(), e.dim());
    }

    #[test]
    fn mediators_exist_and_factor() {
        let (m, n) = (f2(), f2_dual());
        let f = enumerate_homs(&m, &n, 16).unwrap().remove(0);
        let t = tensor_over(&m, &n, &n, &f, &f);
        let mut family = Vec::new();
        for (_, c) in all() {
            for h in enumerate_homs(&n, &c, 1 << 12).unwrap() {
                for k in enumerate_homs(&n, &c, 1 << 12).unwrap() {
                    family.push((c.clone(), h.clone(), k));
                }
            }
        }
        assert!(!family.is_empty());
        assert_eq!(certify_pushout(&t, &family).unwrap().len(), family.len());
    }
}
