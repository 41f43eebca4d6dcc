use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::unipoly::UniPoly;

/// Sparse polynomial in `N` variables; monomials keyed by exponent vectors.
/// Exact zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparsePoly<const N: usize> {
    terms: BTreeMap<[u32; N], f64>,
}

/// Polynomial in `(u, v)`.
pub type BiPoly = SparsePoly<2>;
/// Polynomial in `(l, m, n)`.
pub type TriPoly = SparsePoly<3>;

/// Variable selector for [`BiPoly`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    U,
    V,
}

impl Var {
    pub fn index(self) -> usize {
        match self {
            Var::U => 0,
            Var::V => 1,
        }
    }

    pub fn other(self) -> Var {
        match self {
            Var::U => Var::V,
            Var::V => Var::U,
        }
    }
}

impl<const N: usize> SparsePoly<N> {
    pub fn zero() -> Self {
        SparsePoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial([0; N], c)
    }

    pub fn monomial(exp: [u32; N], c: f64) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, c);
        p
    }

    /// The `k`-th coordinate variable.
    pub fn var(k: usize) -> Self {
        let mut e = [0; N];
        e[k] = 1;
        Self::monomial(e, 1.0)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ([u32; N], f64)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exp: [u32; N], c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(exp).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&exp);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; N], &f64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: [u32; N]) -> f64 {
        self.terms.get(&exp).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, k: usize) -> u32 {
        self.terms.keys().map(|e| e[k]).max().unwrap_or(0)
    }

    pub fn norm1(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (*e, c * s)))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(1.0), |acc, _| &acc * self)
    }

    pub fn eval(&self, x: &[f64; N]) -> f64 {
        self.terms.iter().map(|(e, c)| c * e.iter().zip(x).map(|(k, xi)| xi.powi(*k as i32)).product::<f64>()).sum()
    }

    pub fn partial(&self, k: usize) -> Self {
        Self::from_terms(self.terms.iter().filter(|(e, _)| e[k] > 0).map(|(e, c)| {
            let mut e2 = *e;
            e2[k] -= 1;
            (e2, c * e[k] as f64)
        }))
    }

    /// Terms of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        Self::from_terms(self.terms.iter().filter(|(e, _)| e.iter().sum::<u32>() == d).map(|(e, c)| (*e, *c)))
    }

    /// `p(-x)`.
    pub fn reflected(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| {
            let odd = e.iter().sum::<u32>() % 2 == 1;
            (*e, if odd { -c } else { *c })
        }))
    }

    /// Drops coefficients below `rel * max|c|`.
    pub fn pruned(&self, rel: f64) -> Self {
        let cut = rel * self.max_abs_coeff();
        Self::from_terms(self.terms.iter().filter(|(_, c)| c.abs() > cut).map(|(e, c)| (*e, *c)))
    }
}

impl BiPoly {
    pub fn u() -> Self {
        Self::var(0)
    }

    pub fn v() -> Self {
        Self::var(1)
    }

    pub fn deg(&self, var: Var) -> u32 {
        self.degree_in(var.index())
    }

    pub fn eval2(&self, u: f64, v: f64) -> f64 {
        self.eval(&[u, v])
    }

    /// Views the polynomial as univariate in `var`: entry `k` is the
    /// coefficient of `var^k`, a polynomial in the other variable.
    pub fn coeffs_in(&self, var: Var) -> Vec<UniPoly> {
        let (a, b) = (var.index(), var.other().index());
        let d = self.deg(var) as usize;
        let mut dense = vec![Vec::<f64>::new(); d + 1];
        for (e, c) in &self.terms {
            let row = &mut dense[e[a] as usize];
            let j = e[b] as usize;
            if row.len() <= j {
                row.resize(j + 1, 0.0);
            }
            row[j] += c;
        }
        dense.into_iter().map(UniPoly::new).collect()
    }

    /// Substitutes a value for `var`, leaving a polynomial in the other one.
    pub fn partial_eval(&self, var: Var, x: f64) -> UniPoly {
        let mut out = UniPoly::zero();
        for (k, c) in self.coeffs_in(var).iter().enumerate() {
            out = out.add(&c.scale(x.powi(k as i32)));
        }
        out
    }
}

impl TriPoly {
    pub fn l() -> Self {
        Self::var(0)
    }

    pub fn m() -> Self {
        Self::var(1)
    }

    pub fn n() -> Self {
        Self::var(2)
    }

    /// Sets `n = 1`, giving a polynomial in `(u, v) = (l, m)`.
    pub fn at_n1(&self) -> BiPoly {
        BiPoly::from_terms(self.terms.iter().map(|(e, c)| ([e[0], e[1]], *c)))
    }

    /// Sets `n = 0`, giving a polynomial in `(u, v) = (l, m)`.
    pub fn at_n0(&self) -> BiPoly {
        BiPoly::from_terms(self.terms.iter().filter(|(e, _)| e[2] == 0).map(|(e, c)| ([e[0], e[1]], *c)))
    }

    pub fn eval3(&self, l: f64, m: f64, n: f64) -> f64 {
        self.eval(&[l, m, n])
    }
}

impl<const N: usize> Add for &SparsePoly<N> {
    type Output = SparsePoly<N>;
    fn add(self, rhs: Self) -> SparsePoly<N> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, *c);
        }
        out
    }
}

impl<const N: usize> Sub for &SparsePoly<N> {
    type Output = SparsePoly<N>;
    fn sub(self, rhs: Self) -> SparsePoly<N> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl<const N: usize> Mul for &SparsePoly<N> {
    type Output = SparsePoly<N>;
    fn mul(self, rhs: Self) -> SparsePoly<N> {
        let mut out = SparsePoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let mut e = *ea;
                for k in 0..N {
                    e[k] += eb[k];
                }
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl<const N: usize> Neg for &SparsePoly<N> {
    type Output = SparsePoly<N>;
    fn neg(self) -> SparsePoly<N> {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<const N: usize> $tr for SparsePoly<N> {
            type Output = SparsePoly<N>;
            fn $m(self, rhs: Self) -> SparsePoly<N> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<const N: usize> Mul<f64> for &SparsePoly<N> {
    type Output = SparsePoly<N>;
    fn mul(self, rhs: f64) -> SparsePoly<N> {
        self.scale(rhs)
    }
}

impl<const N: usize> Mul<f64> for SparsePoly<N> {
    type Output = SparsePoly<N>;
    fn mul(self, rhs: f64) -> SparsePoly<N> {
        self.scale(rhs)
    }
}

impl<const N: usize> Add<f64> for SparsePoly<N> {
    type Output = SparsePoly<N>;
    fn add(mut self, rhs: f64) -> SparsePoly<N> {
        self.add_term([0; N], rhs);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_eval() {
        let u = BiPoly::u();
        let v = BiPoly::v();
        let f = &(&u * &u) - &(&v * &v);
        let g = &u + &v;
        let h = &u - &v;
        assert_eq!(f, &g * &h);
        assert_eq!(f.total_degree(), 2);
        assert_eq!(f.eval2(3.0, 1.0), 8.0);
        assert!((&f - &f).is_zero());
    }

    #[test]
    fn coefficient_view() {
        // 2 + 3uv + u^2 v^2 as a polynomial in v.
        let p = BiPoly::from_terms([([0, 0], 2.0), ([1, 1], 3.0), ([2, 2], 1.0)]);
        let c = p.coeffs_in(Var::V);
        assert_eq!(c.len(), 3);
        assert_eq!(c[0].coeffs, vec![2.0]);
        assert_eq!(c[1].coeffs, vec![0.0, 3.0]);
        assert_eq!(c[2].coeffs, vec![0.0, 0.0, 1.0]);
        assert_eq!(p.partial_eval(Var::U, 2.0).coeffs, vec![2.0, 6.0, 4.0]);
    }

    #[test]
    fn reflection_and_parts() {
        let t = &(&TriPoly::l() * &TriPoly::m()) + &TriPoly::n();
        assert_eq!(t.reflected(), &(&TriPoly::l() * &TriPoly::m()) - &TriPoly::n());
        assert_eq!(t.homogeneous_part(1), TriPoly::n());
        assert_eq!(t.at_n1(), &(&BiPoly::u() * &BiPoly::v()) + &BiPoly::constant(1.0));
        assert_eq!(t.partial(0), TriPoly::m());
    }
}
