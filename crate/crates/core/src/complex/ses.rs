use super::{cone_unchecked, ChainMap, Complex, HomComplex};
use crate::error::{Error, Result};
use crate::linalg::{sign, Matrix};
use crate::linsys::{term, LinearProblem};

/// `0 -> M --μ--> M' --μ'--> M'' -> 0`, split as graded modules by `ν': M' -> M`
/// and `ν'': M'' -> M'`.
#[derive(Clone, Debug)]
pub struct SplitSES {
    pub m: Complex,
    pub m1: Complex,
    pub m2: Complex,
    pub mu: ChainMap,
    pub mu1: ChainMap,
    pub nu1: ChainMap,
    pub nu2: ChainMap,
}

impl SplitSES {
    pub fn new(mu: ChainMap, mu1: ChainMap, nu1: ChainMap, nu2: ChainMap) -> Result<SplitSES> {
        let ses = SplitSES { m: mu.src.clone(), m1: mu.tgt.clone(), m2: mu1.tgt.clone(), mu, mu1, nu1, nu2 };
        ses.validate()?;
        Ok(ses)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_morphism() || !self.mu1.is_morphism() {
            return Err(Error::NotAMorphism("sequence maps must be morphisms".into()));
        }
        let m1 = &self.m1;
        let (lo, hi) = (m1.lo.min(self.m.lo).min(self.m2.lo), m1.hi().max(self.m.hi()).max(self.m2.hi()));
        for i in lo..=hi {
            let p = m1.p();
            let checks = [
                ("μ'ν'' = id", self.mu1.comp(i).mul(&self.nu2.comp(i)), Matrix::identity(p, self.m2.dim(i))),
                ("ν'μ = id", self.nu1.comp(i).mul(&self.mu.comp(i)), Matrix::identity(p, self.m.dim(i))),
                ("ν'ν'' = 0", self.nu1.comp(i).mul(&self.nu2.comp(i)), Matrix::zeros(p, self.m.dim(i), self.m2.dim(i))),
                (
                    "ν''μ' + μν' = id",
                    self.nu2.comp(i).mul(&self.mu1.comp(i)).add(&self.mu.comp(i).mul(&self.nu1.comp(i))),
                    Matrix::identity(p, m1.dim(i)),
                ),
            ];
            for (name, got, want) in checks {
                if got != want {
                    return Err(Error::SplittingInvalid(format!("{name} fails in degree {i}")));
                }
            }
        }
        Ok(())
    }

    /// Find module-level splittings for an exact sequence of morphisms.
    ///
    /// Errors with `InputNotExact` when the sequence is not degreewise exact and
    /// with `SplittingInvalid` when some degree does not split.
    pub fn from_exact(mu: ChainMap, mu1: ChainMap) -> Result<SplitSES> {
        let (m, m1, m2) = (mu.src.clone(), mu.tgt.clone(), mu1.tgt.clone());
        let p = m1.p();
        let (lo, hi) = (m1.lo.min(m.lo).min(m2.lo), m1.hi().max(m.hi()).max(m2.hi()));
        let mut nu2s = Vec::new();
        let mut nu1s = Vec::new();
        for i in lo..=hi {
            let (a, b) = (mu.comp(i), mu1.comp(i));
            if !b.mul(&a).is_zero() || a.rank() != m.dim(i) || b.rank() != m2.dim(i) || a.rank() + b.rank() != m1.dim(i) {
                return Err(Error::InputNotExact(format!("degree {i}")));
            }
            let nu2 = if m2.dim(i) == 0 {
                Matrix::zeros(p, m1.dim(i), 0)
            } else if m1.algebra().dim() == 1 {
                b.solve(&Matrix::identity(p, m2.dim(i))).ok_or_else(|| Error::InputNotExact(format!("degree {i}")))?
            } else {
                let mut lp = LinearProblem::new(p);
                let u = lp.unknown(&m2.module(i), &m1.module(i))?;
                lp.equation(vec![term(u).left(b.clone())], Matrix::identity(p, m2.dim(i)));
                lp.solve().ok_or_else(|| Error::SplittingInvalid(format!("degree {i} does not split")))?.remove(0)
            };
            let e = Matrix::identity(p, m1.dim(i)).sub(&nu2.mul(&b));
            let nu1 = a.solve(&e).expect("image of the complement lies in the image of μ");
            nu2s.push(nu2);
            nu1s.push(nu1);
        }
        let nu2 = ChainMap::from_fn(&m2, &m1, 0, |i| nu2s[(i - lo) as usize].clone());
        let nu1 = ChainMap::from_fn(&m1, &m, 0, |i| nu1s[(i - lo) as usize].clone());
        SplitSES::new(mu, mu1, nu1, nu2)
    }

    /// `0 -> Σ^{-1}N -> Σ^{-1}Cone(λ) -> M -> 0` with the canonical splittings.
    pub fn of_cone(lambda: &ChainMap) -> Result<SplitSES> {
        if !lambda.is_morphism() {
            return Err(Error::NotAMorphism("cone needs a morphism".into()));
        }
        let (m, n) = (&lambda.src, &lambda.tgt);
        let p = m.p();
        let c = cone_unchecked(lambda).cx.shift(-1);
        let sn = n.shift(-1);
        let block = |rows: usize, cols: usize, r0: usize| {
            let mut e = Matrix::zeros(p, rows, cols);
            e.paste(r0, 0, &Matrix::identity(p, cols));
            e
        };
        let mu = ChainMap::from_fn(&sn, &c, 0, |i| block(c.dim(i), n.dim(i + 1), m.dim(i)));
        let nu1 = ChainMap::from_fn(&c, &sn, 0, |i| block(c.dim(i), n.dim(i + 1), m.dim(i)).transpose());
        let nu2 = ChainMap::from_fn(m, &c, 0, |i| block(c.dim(i), m.dim(i), 0));
        let mu1 = ChainMap::from_fn(&c, m, 0, |i| block(c.dim(i), m.dim(i), 0).transpose());
        SplitSES::new(mu, mu1, nu1, nu2)
    }
}

/// `θ = ν' d ν'': M'' -> ΣM`.
pub fn theta(ses: &SplitSES) -> Result<ChainMap> {
    ses.validate()?;
    Ok(theta_unchecked(ses))
}

pub(crate) fn theta_unchecked(ses: &SplitSES) -> ChainMap {
    let sm = ses.m.shift(1);
    ChainMap::from_fn(&ses.m2, &sm, 0, |n| ses.nu1.comp(n - 1).mul(&ses.m1.d(n)).mul(&ses.nu2.comp(n)))
}

/// The connecting map `H^{n-1}(Hom(M, N)) -> H^n(Hom(M'', N))` of the sequence
/// obtained by applying `Hom(-, N)`, computed as `(-1)^n H^n(Hom(θ, N))`.
pub fn connecting_hom(ses: &SplitSES, n_cx: &Complex, n: i64) -> Result<Matrix> {
    let th = theta(ses)?;
    let hm = super::hom_complex(&ses.m, n_cx);
    let hm2 = super::hom_complex(&ses.m2, n_cx);
    Ok(connecting_with(&th, &hm, &hm2, n))
}

/// As [`connecting_hom`] with the Hom complexes supplied by the caller.
pub fn connecting_with(th: &ChainMap, hm: &HomComplex, hm2: &HomComplex, n: i64) -> Matrix {
    let p = hm.src.p();
    let comps: Vec<ChainMap> = hm
        .cocycles(n - 1)
        .into_iter()
        .map(|psi| ChainMap::from_fn(&hm2.src, &hm2.tgt, -n, |j| psi.comp(j - 1).mul(&th.comp(j))))
        .collect();
    hm2.classes(n, &comps).scale(sign(p, n))
}

/// `φ = φ' μ` with `M' = M ⊕ Cone(id_{Σ^{-1}N})`, `φ'` degreewise surjective and
/// `μ` a homotopy equivalence with inverse `ρ`.
#[derive(Clone, Debug)]
pub struct ConeFactorization {
    pub mprime: Complex,
    pub mu: ChainMap,
    pub phi1: ChainMap,
    pub rho: ChainMap,
    /// Degree-one map with `d(κ) = μρ - id`.
    pub homotopy: ChainMap,
}

/// Factor a morphism through a degreewise surjection.
///
/// The cone is taken on `Σ^{-1}N` so that in degree `n` it reads `N_n ⊕ N_{n+1}`
/// and the projection to `N_n` is a morphism.
pub fn factor_through_cone(phi: &ChainMap) -> Result<ConeFactorization> {
    if !phi.is_morphism() {
        return Err(Error::NotAMorphism("factorisation needs a morphism".into()));
    }
    let (m, n) = (&phi.src, &phi.tgt);
    let p = m.p();
    let sn = n.shift(-1);
    let c = cone_unchecked(&ChainMap::identity(&sn)).cx;
    let (mp, inj, proj) = Complex::direct_sum(&[m.clone(), c.clone()]);
    let mu = inj[0].clone();
    let rho = proj[0].clone();
    let phi1 = ChainMap::from_fn(&mp, n, 0, |i| {
        let mut f = Matrix::zeros(p, n.dim(i), mp.dim(i));
        f.paste(0, 0, &phi.comp(i));
        f.paste(0, m.dim(i), &Matrix::identity(p, n.dim(i)));
        f
    });
    let homotopy = ChainMap::from_fn(&mp, &mp, 1, |i| {
        let mut h = Matrix::zeros(p, mp.dim(i + 1), mp.dim(i));
        h.paste(m.dim(i + 1), m.dim(i) + n.dim(i), &Matrix::identity(p, n.dim(i + 1)));
        h
    });
    Ok(ConeFactorization { mprime: mp, mu, phi1, rho, homotopy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::module::Module;

    fn periodic(alg: &Algebra, len: usize) -> Complex {
        let a = Module::regular(alg);
        Complex::new(alg, 0, vec![a; len], vec![alg.left(1).clone(); len - 1]).unwrap()
    }

    #[test]
    fn theta_of_cone_is_lambda() {
        let alg = Algebra::truncated_poly(3, 2);
        let c = periodic(&alg, 3);
        let lambda = ChainMap::from_fn(&c, &c, 0, |_| alg.left(1).clone().scale(2));
        let ses = SplitSES::of_cone(&lambda).unwrap();
        let th = theta(&ses).unwrap();
        assert!(th.is_morphism());
        for i in 0..3 {
            assert_eq!(th.comp(i), lambda.comp(i));
        }
    }

    #[test]
    fn factorisation_witnesses() {
        let alg = Algebra::truncated_poly(3, 2);
        let c = periodic(&alg, 3);
        let phi = ChainMap::from_fn(&c, &c, 0, |_| alg.left(1).clone());
        let f = factor_through_cone(&phi).unwrap();
        assert!(f.phi1.is_morphism() && f.mu.is_morphism() && f.rho.is_morphism());
        assert!(f.phi1.is_degreewise_surjective());
        assert_eq!(f.phi1.compose(&f.mu), phi);
        assert_eq!(f.rho.compose(&f.mu), ChainMap::identity(&c));
        assert_eq!(f.homotopy.boundary(), f.mu.compose(&f.rho).sub(&ChainMap::identity(&f.mprime)));
    }

    #[test]
    fn from_exact_recovers_splitting() {
        let alg = Algebra::truncated_poly(2, 2);
        let a = Module::regular(&alg);
        let c = periodic(&alg, 2);
        let k2 = Complex::concentrated(&a, 0);
        let (_, inj, proj) = Complex::direct_sum(&[c.clone(), k2.clone()]);
        let ses = SplitSES::from_exact(inj[0].clone(), proj[1].clone()).unwrap();
        assert!(theta(&ses).unwrap().is_morphism());
    }
}
