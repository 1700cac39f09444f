//! Exact-rational implementation of the closed-form bounds calculus: the
//! s-parameter, the phi_k lower bound, the lambda_i bound, alpha', the
//! typicality threshold, the availability inequality, the extremal cascade,
//! and the leftover constants.
//!
//! Nothing in this module may introduce floating point; the cascade's
//! irrational thresholds C^j eps are handled by k-th-power cross
//! multiplication and stored as exact k-th-root expressions.

use crate::chromatic::{gamma_param, BottleSpec};
use crate::error::{Error, Result};
use crate::ratio::{ceil_int, pow_u, rat_usize, KthRootExpr, Rational};
use num::bigint::BigInt;
use num::traits::{One, Signed, Zero};

/// Normalized clique-cover family sizes, indexed by clique order.
#[derive(Clone, Debug, PartialEq)]
pub struct Phi {
    k: usize,
    /// values[i-1] = phi_i
    values: Vec<Rational>,
}

impl Phi {
    /// From phi_1, ..., phi_k (ascending order index).
    pub fn from_ascending(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Precondition("empty phi vector".into()));
        }
        if values.iter().any(|p| p.is_negative()) {
            return Err(Error::Precondition("phi entries must be nonnegative".into()));
        }
        Ok(Phi { k: values.len(), values })
    }

    /// From the clique-cover convention (phi_k first).
    pub fn from_descending(values: &[Rational]) -> Result<Self> {
        let mut v = values.to_vec();
        v.reverse();
        Phi::from_ascending(v)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.values[i - 1]
    }

    /// sum of i * phi_i, which is 1 for spanning covers.
    pub fn mass(&self) -> Rational {
        self.values.iter().enumerate().map(|(idx, p)| rat_usize(idx + 1) * p).sum()
    }

    pub fn is_spanning(&self) -> bool {
        self.mass().is_one()
    }

    /// sigma_i = sum_{j <= i} (k - j) phi_j for i < k.
    pub fn sigma_partial(&self, i: usize) -> Rational {
        (1..=i).map(|j| rat_usize(self.k - j) * self.get(j)).sum()
    }
}

/// s = phi_k - sum_{i=2}^{k-1} (i-1) phi_{k-i} - (k-1) gamma, exact.
pub fn s_param(phi: &Phi, gamma: &Rational) -> Rational {
    let k = phi.k();
    let mut s = phi.get(k).clone();
    for i in 2..k {
        s -= rat_usize(i - 1) * phi.get(k - i);
    }
    s - rat_usize(k - 1) * gamma
}

/// phi_k >= sum (i-1) phi_{k-i} + (k-1) gamma - (k-1)(d + 2 eps), returned
/// with its exact slack. Algebraically the slack is s + (k-1)(d + 2 eps).
pub fn phi_k_lower_check(
    phi: &Phi,
    gamma: &Rational,
    d: &Rational,
    eps: &Rational,
) -> (bool, Rational) {
    let k = phi.k();
    let slack = s_param(phi, gamma) + rat_usize(k - 1) * (d + rat_usize(2) * eps);
    (!slack.is_negative(), slack)
}

/// The lambda_i lower bound
/// `(k-1)gamma + (i-1)/(k-1) s + sum_{2<=j<=i}(j-1)phi_{k-j}
///  + (i-1) sum_{j>i} phi_{k-j} - (k-i)(d+2eps)`, exact.
pub fn lambda_lower(
    i: usize,
    phi: &Phi,
    gamma: &Rational,
    s: &Rational,
    d: &Rational,
    eps: &Rational,
) -> Result<Rational> {
    let k = phi.k();
    if i < 1 || i >= k {
        return Err(Error::Precondition(format!("lambda index {i} outside [1, {}]", k - 1)));
    }
    let mut v = rat_usize(k - 1) * gamma + rat_usize(i - 1) / rat_usize(k - 1) * s;
    for j in 2..=i {
        v += rat_usize(j - 1) * phi.get(k - j);
    }
    for j in i + 1..k {
        v += rat_usize(i - 1) * phi.get(k - j);
    }
    v -= rat_usize(k - i) * (d + rat_usize(2) * eps);
    Ok(v)
}

/// alpha' = alpha + alpha(1 - alpha) mu / k^2 with mu a unit fraction;
/// returns (alpha', p, q) with gcd(p, q) = 1 and certifies
/// p < q <= omega^2 k^2 / mu for the reduced (sigma, omega) generating alpha.
pub fn alpha_prime(alpha: &Rational, k: usize, mu: &Rational) -> Result<(Rational, BigInt, BigInt)> {
    if alpha <= &Rational::zero() || alpha >= &Rational::one() {
        return Err(Error::Precondition("alpha must lie strictly in (0, 1)".into()));
    }
    if !mu.numer().is_one() || mu.denom() < &BigInt::one() {
        return Err(Error::Precondition(format!(
            "mu must be a unit fraction 1/N, got {}",
            crate::ratio::format_rational(mu)
        )));
    }
    let a_prime = alpha + alpha * (Rational::one() - alpha) / rat_usize(k * k) * mu;
    let (p, q) = (a_prime.numer().clone(), a_prime.denom().clone());
    let omega = alpha.denom().clone(); // minimal generator sigma/omega = alpha reduced
    let n = mu.denom().clone();
    let cap = &omega * &omega * BigInt::from(k * k) * &n;
    if p >= q || q > cap {
        return Err(Error::Lemma(format!("alpha' = {p}/{q} violates p < q <= w^2 k^2 N = {cap}")));
    }
    Ok((a_prime, p, q))
}

/// c_t = ceil((k - 1 + alpha') / (1 - alpha')), exact.
pub fn typicality_threshold(alpha_prime: &Rational, k: usize) -> Result<u64> {
    if alpha_prime >= &Rational::one() {
        return Err(Error::Precondition("typicality threshold needs alpha' < 1".into()));
    }
    let v = (rat_usize(k - 1) + alpha_prime) / (Rational::one() - alpha_prime);
    let c = ceil_int(&v);
    Ok((&c).try_into().expect("desk-scale threshold fits u64"))
}

/// Both sides of the availability check for converting order-(k-i) cliques.
#[derive(Clone, Debug)]
pub struct FeasibilityReport {
    /// lambda_i - sum_{l<=i} (l-1+alpha')/(1-alpha') phi_{k-l}.
    pub slack: Rational,
    /// The availability inequality: slack > 0.
    pub holds: bool,
    /// I_i = lambda_i - sum_{l<=i} (l-1+alpha)/(1-alpha) phi_{k-l}.
    pub i_value: Rational,
    /// mu_1 = k alpha mu / ((1 - alpha)(k - 1)).
    pub mu1: Rational,
    /// The chain I_i > mu_1.
    pub chain_holds: bool,
}

/// Evaluates the availability inequality and the I_i > mu_1 chain exactly.
/// mu is recovered from alpha' via the defining relation.
pub fn feasibility_ii(
    i: usize,
    lambda_i: &Rational,
    phi: &Phi,
    alpha: &Rational,
    alpha_prime: &Rational,
) -> Result<FeasibilityReport> {
    let k = phi.k();
    if alpha_prime >= &Rational::one() {
        return Err(Error::Precondition("feasibility needs alpha' < 1".into()));
    }
    if i < 1 || i >= k {
        return Err(Error::Precondition(format!("index {i} outside [1, {}]", k - 1)));
    }
    let one = Rational::one();
    let mut sum_prime = Rational::zero();
    let mut sum_plain = Rational::zero();
    for l in 1..=i {
        let coeff_prime = (rat_usize(l - 1) + alpha_prime) / (&one - alpha_prime);
        let coeff_plain = (rat_usize(l - 1) + alpha) / (&one - alpha);
        sum_prime += coeff_prime * phi.get(k - l);
        sum_plain += coeff_plain * phi.get(k - l);
    }
    let slack = lambda_i - sum_prime;
    let i_value = lambda_i - sum_plain;
    // mu from alpha' = alpha + alpha(1-alpha) mu / k^2
    let mu = (alpha_prime - alpha) * rat_usize(k * k) / (alpha * (&one - alpha));
    let mu1 = rat_usize(k) * alpha * &mu / ((&one - alpha) * rat_usize(k - 1));
    Ok(FeasibilityReport {
        holds: slack.is_positive(),
        chain_holds: i_value > mu1,
        slack,
        i_value,
        mu1,
    })
}

/// The extremal-case parameter cascade: partial sums sigma_i, the floor
/// alpha_0, and the sandwich (t, j0) with its derived eps' and mu'.
///
/// C = (alpha_0/eps)^(1/k) is never materialized; sigma_i vs C^j eps is
/// decided by comparing sigma_i^k with alpha_0^j eps^(k-j).
#[derive(Clone, Debug)]
pub struct ExtremalCascade {
    /// sigma_1, ..., sigma_{k-1}.
    pub sigma_partials: Vec<Rational>,
    pub alpha0: Rational,
    pub t: usize,
    pub j0: usize,
    /// eps' = k (C^{j0-1} eps + 2 mu), exact.
    pub eps_prime: KthRootExpr,
    /// mu' = C^{j0} eps, exact.
    pub mu_prime: KthRootExpr,
}

/// Exact comparison sigma_i vs C^j eps via k-th powers:
/// sigma vs (a0/eps)^(j/k) eps  <=>  sigma^k vs a0^j eps^(k-j).
fn sigma_cmp(
    sigma: &Rational,
    alpha0: &Rational,
    eps: &Rational,
    j: usize,
    k: usize,
) -> std::cmp::Ordering {
    pow_u(sigma, k as u32).cmp(&(pow_u(alpha0, j as u32) * pow_u(eps, (k - j) as u32)))
}

pub fn extremal_cascade(
    phi: &Phi,
    alpha: &Rational,
    mu: &Rational,
    eps: &Rational,
) -> Result<ExtremalCascade> {
    let k = phi.k();
    if k < 3 {
        return Err(Error::Precondition("cascade needs k >= 3".into()));
    }
    if !phi.is_spanning() {
        return Err(Error::Precondition("phi must have mass 1".into()));
    }
    let gamma = gamma_param(k, alpha);
    let s = s_param(phi, &gamma);
    if &s >= mu {
        return Err(Error::Precondition("extremal regime requires s < mu".into()));
    }
    let one = Rational::one();
    let alpha0 = (&one - alpha) / (rat_usize(k - 1) + alpha) - rat_usize(k) * mu / rat_usize(k - 1);
    if !alpha0.is_positive() {
        return Err(Error::Precondition("alpha_0 <= 0: parameter regime violated".into()));
    }
    let sigma_partials: Vec<Rational> = (1..k).map(|i| phi.sigma_partial(i)).collect();
    // identity sigma_{k-1} = 1/(k-1) - k gamma - k s/(k-1), a consequence of
    // mass 1 and the definition of s
    let expect = rat_usize(k - 1).recip()
        - rat_usize(k) * &gamma
        - rat_usize(k) * &s / rat_usize(k - 1);
    if sigma_partials[k - 2] != expect {
        return Err(Error::Lemma("sigma_{k-1} identity failed".into()));
    }
    // the ladder: least t, then the largest j0 <= k with
    // sigma_t >= C^{j0} eps and sigma_{t-1} <= C^{j0-1} eps
    for t in 1..k {
        let sig_t = &sigma_partials[t - 1];
        let sig_prev = if t == 1 { Rational::zero() } else { sigma_partials[t - 2].clone() };
        for j0 in (1..=k).rev() {
            if sigma_cmp(sig_t, &alpha0, eps, j0, k).is_lt()
                || sigma_cmp(&sig_prev, &alpha0, eps, j0 - 1, k).is_gt()
            {
                continue;
            }
            let radicand_mu = pow_u(&alpha0, j0 as u32) * pow_u(eps, (k - j0) as u32);
            let radicand_eps = pow_u(&alpha0, (j0 - 1) as u32) * pow_u(eps, (k - j0 + 1) as u32);
            return Ok(ExtremalCascade {
                sigma_partials,
                alpha0,
                t,
                j0,
                eps_prime: KthRootExpr::new(
                    rat_usize(k),
                    radicand_eps,
                    k as u32,
                    rat_usize(2 * k) * mu,
                ),
                mu_prime: KthRootExpr::new(one, radicand_mu, k as u32, Rational::zero()),
            });
        }
    }
    Err(Error::Lemma(
        "no sandwich (t, j0) found; requires alpha_0 > eps in the valid regime".into(),
    ))
}

/// Which leftover constant applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeftoverCase {
    /// ceil(5 k^2 omega / ((k-1)^2 gamma)) + h.
    General,
    /// 3 k^2 omega + h.
    Balanced,
    /// k(k-1)s + (k-1)^2.
    Padding(usize),
}

/// The leftover constant for the applicable case, as an integer ceiling.
pub fn leftover_constant(spec: &BottleSpec, case: LeftoverCase) -> Result<u64> {
    let k = spec.k;
    let h = spec.order();
    match case {
        LeftoverCase::General => {
            let gamma = spec.gamma();
            if gamma.is_zero() {
                return Err(Error::Precondition("general leftover needs gamma > 0".into()));
            }
            let term = rat_usize(5 * k * k) * rat_usize(spec.omega)
                / (rat_usize((k - 1) * (k - 1)) * gamma);
            let c: u64 = (&ceil_int(&term)).try_into().expect("desk-scale constant");
            Ok(c + h as u64)
        }
        LeftoverCase::Balanced => Ok((3 * k * k * spec.omega + h) as u64),
        LeftoverCase::Padding(s) => Ok((k * (k - 1) * s + (k - 1) * (k - 1)) as u64),
    }
}

/// Validated parameter set for a pipeline/decomposition run. The paper's
/// "much smaller than" chain is pinned as eps <= d/10, d <= mu/100,
/// mu <= min(alpha, 1-alpha)/10 (balanced case: mu <= 1/10).
#[derive(Clone, Debug)]
pub struct ParamSet {
    pub k: usize,
    pub alpha: Rational,
    pub gamma: Rational,
    pub d: Rational,
    pub eps: Rational,
    pub mu: Rational,
    pub s: Rational,
    pub phi: Phi,
}

impl ParamSet {
    pub fn new(
        k: usize,
        alpha: Rational,
        d: Rational,
        eps: Rational,
        mu: Rational,
        phi: Phi,
    ) -> Result<Self> {
        if k < 2 || phi.k() != k {
            return Err(Error::Precondition("phi length must equal k >= 2".into()));
        }
        if !phi.is_spanning() {
            return Err(Error::Precondition("sum of i phi_i must be 1".into()));
        }
        if alpha <= Rational::zero() || alpha > Rational::one() {
            return Err(Error::Precondition("alpha must lie in (0, 1]".into()));
        }
        if eps > &d / rat_usize(10) {
            return Err(Error::Precondition("separation eps <= d/10 violated".into()));
        }
        if d > &mu / rat_usize(100) {
            return Err(Error::Precondition("separation d <= mu/100 violated".into()));
        }
        let mu_cap = if alpha.is_one() {
            crate::ratio::rat(1, 10)
        } else {
            let one_minus = Rational::one() - &alpha;
            let m = if alpha < one_minus { alpha.clone() } else { one_minus };
            m / rat_usize(10)
        };
        if mu > mu_cap {
            return Err(Error::Precondition("separation mu <= min(alpha,1-alpha)/10 violated".into()));
        }
        let gamma = gamma_param(k, &alpha);
        let s = s_param(&phi, &gamma);
        Ok(ParamSet { k, alpha, gamma, d, eps, mu, s, phi })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{rat, rat_int};

    fn phi3(p1: Rational, p2: Rational, p3: Rational) -> Phi {
        Phi::from_ascending(vec![p1, p2, p3]).unwrap()
    }

    #[test]
    fn s_param_worked_example() {
        // k=3, gamma=1/10, phi = (0, 1/10, 4/15): s = 4/15 - 0 - 2/10 = 1/15
        let phi = phi3(rat_int(0), rat(1, 10), rat(4, 15));
        assert!(phi.is_spanning());
        assert_eq!(s_param(&phi, &rat(1, 10)), rat(1, 15));
    }

    #[test]
    fn s_param_zero_at_definition_point() {
        // k=3: phi_3 = (k-1)gamma forces s = 0 when phi_1 = 0;
        // phi_2 balances the mass: 2 phi_2 + 3 phi_3 = 1
        let gamma = rat(1, 10);
        let phi_k = rat_int(2) * &gamma;
        let phi_2 = (rat_int(1) - rat_int(3) * &phi_k) / rat_int(2);
        let phi = phi3(rat_int(0), phi_2, phi_k);
        assert_eq!(s_param(&phi, &gamma), rat_int(0));
    }

    #[test]
    fn phi_k_check_mirrors_s() {
        let phi = phi3(rat_int(0), rat(1, 10), rat(4, 15));
        let (ok, slack) = phi_k_lower_check(&phi, &rat(1, 10), &rat_int(0), &rat_int(0));
        assert!(ok);
        assert_eq!(slack, rat(1, 15));
        // phi_k = 0 with gamma > 0 fails
        let phi = phi3(rat_int(1), rat_int(0), rat_int(0));
        let (ok, slack) = phi_k_lower_check(&phi, &rat(1, 10), &rat_int(0), &rat_int(0));
        assert!(!ok);
        assert!(slack.is_negative());
    }

    #[test]
    fn lambda_lower_cases() {
        let phi = phi3(rat_int(0), rat(1, 10), rat(4, 15));
        let gamma = rat(1, 10);
        let s = s_param(&phi, &gamma);
        // i = 1: (k-1)(gamma - d - 2 eps)
        let l1 = lambda_lower(1, &phi, &gamma, &s, &rat_int(0), &rat_int(0)).unwrap();
        assert_eq!(l1, rat(2, 10));
        // i = 2, d = eps = 0: term-by-term
        // (k-1)gamma + s/2 + (j=2)(2-1)phi_1 + 0 = 2/10 + 1/30 + 0
        let l2 = lambda_lower(2, &phi, &gamma, &s, &rat_int(0), &rat_int(0)).unwrap();
        assert_eq!(l2, rat(2, 10) + rat(1, 30));
        assert!(lambda_lower(3, &phi, &gamma, &s, &rat_int(0), &rat_int(0)).is_err());
    }

    #[test]
    fn alpha_prime_examples() {
        let (a, p, q) = alpha_prime(&rat(1, 2), 3, &rat(1, 10)).unwrap();
        assert_eq!(a, rat(181, 360));
        assert_eq!(p, BigInt::from(181));
        assert_eq!(q, BigInt::from(360));
        let (a, _, _) = alpha_prime(&rat(1, 2), 3, &rat(1, 1)).unwrap();
        assert_eq!(a, rat(19, 36));
        assert!(alpha_prime(&rat(1, 2), 3, &rat(2, 5)).is_err()); // not unit fraction
        assert!(alpha_prime(&rat_int(1), 3, &rat(1, 10)).is_err());
    }

    #[test]
    fn alpha_prime_strictly_between() {
        for (a, k, mu) in [
            (rat(1, 3), 3usize, rat(1, 7)),
            (rat(2, 5), 4, rat(1, 100)),
            (rat(9, 10), 2, rat(1, 13)),
        ] {
            let (ap, _, _) = alpha_prime(&a, k, &mu).unwrap();
            assert!(ap > a);
            assert!(ap < rat_int(1));
        }
    }

    #[test]
    fn typicality_values() {
        assert_eq!(typicality_threshold(&rat(1, 2), 3).unwrap(), 5);
        assert_eq!(typicality_threshold(&rat(19, 36), 3).unwrap(), 6);
        // monotone nondecreasing in alpha'
        let mut last = 0;
        for num in 1..10 {
            let c = typicality_threshold(&rat(num, 10), 3).unwrap();
            assert!(c >= last);
            last = c;
        }
        assert!(typicality_threshold(&rat_int(1), 3).is_err());
    }

    #[test]
    fn correction_term_identity() {
        // (l-1+a')/(1-a') - (l-1+a)/(1-a) = l(a'-a)/((1-a')(1-a))
        let a = rat(1, 2);
        let ap = rat(181, 360);
        for l in 1..6u32 {
            let lr = rat_int(l as i64);
            let lhs = (&lr - rat_int(1) + &ap) / (rat_int(1) - &ap)
                - (&lr - rat_int(1) + &a) / (rat_int(1) - &a);
            let rhs = &lr * (&ap - &a) / ((rat_int(1) - &ap) * (rat_int(1) - &a));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn feasibility_with_zero_phis_is_slack() {
        // phi_{k-l} = 0 for all l <= i: slack = lambda_i
        let phi = phi3(rat_int(0), rat_int(0), rat(1, 3));
        let rep = feasibility_ii(2, &rat(1, 4), &phi, &rat(1, 2), &rat(181, 360)).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.slack, rat(1, 4));
        assert_eq!(rep.i_value, rat(1, 4));
        // mu recovered: 1/10 -> mu1 = 3*(1/2)*(1/10)/((1/2)*2) = 3/20
        assert_eq!(rep.mu1, rat(3, 20));
        assert!(rep.chain_holds);
    }

    #[test]
    fn cascade_worked_example() {
        // k=3, alpha=1/2, mu=1/100, eps=1e-6, phi with s < mu
        let gamma = rat(1, 10);
        let phi_k = rat_int(2) * &gamma; // s = 0
        let phi_2 = (rat_int(1) - rat_int(3) * &phi_k) / rat_int(2);
        let phi = phi3(rat_int(0), phi_2, phi_k);
        let c = extremal_cascade(&phi, &rat(1, 2), &rat(1, 100), &rat(1, 1_000_000)).unwrap();
        assert_eq!(c.alpha0, rat(37, 200));
        assert!(c.t == 1 || c.t == 2, "t = {}", c.t);
        assert!(c.j0 >= 1 && c.j0 <= 3);
        // mu' and eps' compare sanely: 0 < mu' <= alpha0 (equality at j0 = k)
        assert_eq!(c.mu_prime.cmp_rational(&rat_int(0)), std::cmp::Ordering::Greater);
        assert_ne!(c.mu_prime.cmp_rational(&c.alpha0), std::cmp::Ordering::Greater);
    }

    #[test]
    fn cascade_t_is_last_when_lower_families_empty() {
        // phi_j = 0 for all j < k-1 forces t = k-1
        // k = 4, alpha = 1/2: gamma = 1/21, phi_4 = 1/7 gives s = 0 < mu
        let phi = Phi::from_ascending(vec![rat_int(0), rat_int(0), rat(1, 7), rat(1, 7)]).unwrap();
        assert!(phi.is_spanning());
        let alpha = rat(1, 2);
        let c = extremal_cascade(&phi, &alpha, &rat(1, 30), &rat(1, 1_000_000)).unwrap();
        assert_eq!(c.t, 3);
    }

    #[test]
    fn cascade_rejects_general_regime() {
        let phi = phi3(rat_int(0), rat(1, 10), rat(4, 15)); // s = 1/15
        let err = extremal_cascade(&phi, &rat(1, 2), &rat(1, 100), &rat(1, 1_000_000));
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn leftover_constants() {
        let b = BottleSpec::new(3, 2, 2).unwrap();
        assert_eq!(leftover_constant(&b, LeftoverCase::Balanced).unwrap(), 60);
        let b = BottleSpec::new(2, 1, 1).unwrap();
        assert_eq!(leftover_constant(&b, LeftoverCase::Padding(0)).unwrap(), 1);
        let b = BottleSpec::new(3, 1, 2).unwrap();
        assert_eq!(leftover_constant(&b, LeftoverCase::General).unwrap(), 230);
    }

    #[test]
    fn param_set_validation() {
        let phi = phi3(rat_int(0), rat(1, 10), rat(4, 15));
        assert!(ParamSet::new(
            3,
            rat(1, 2),
            rat(1, 4000),
            rat(1, 40000),
            rat(1, 40),
            phi.clone()
        )
        .is_ok());
        // eps too large relative to d
        assert!(ParamSet::new(3, rat(1, 2), rat(1, 4000), rat(1, 4000), rat(1, 40), phi.clone())
            .is_err());
        // mu too large
        assert!(ParamSet::new(3, rat(1, 2), rat(1, 4000), rat(1, 40000), rat(1, 2), phi).is_err());
    }

    #[test]
    fn eq51_identity_on_random_rational_phis() {
        // sum phi_i = 1/(k-1) - gamma - s/(k-1) under the mass-1 constraint
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for k in [3usize, 4, 5] {
            let alpha = rat(1, 3);
            let gamma = gamma_param(k, &alpha);
            for _ in 0..20 {
                // random nonnegative numerators, then scale to mass 1
                let raw: Vec<Rational> =
                    (0..k).map(|_| rat(rng.gen_range(0..20), 1)).collect();
                let mass: Rational = raw
                    .iter()
                    .enumerate()
                    .map(|(i, p)| rat_usize(i + 1) * p)
                    .sum();
                if mass.is_zero() {
                    continue;
                }
                let phi =
                    Phi::from_ascending(raw.into_iter().map(|p| p / &mass).collect()).unwrap();
                let s = s_param(&phi, &gamma);
                let total: Rational = (1..=k).map(|i| phi.get(i).clone()).sum();
                let expect = rat_usize(k - 1).recip() - &gamma - &s / rat_usize(k - 1);
                assert_eq!(total, expect);
            }
        }
    }
}
