//! The open zonotope `Z_B = {sum nu_i b_i : 0 < nu_i < 1}` and its scaled
//! variants, with exact membership tests and lattice-translate enumeration.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::lp::{LpProblem, LpResult};
use crate::ratlin::{IntMatrix, Rational, SystemData};

/// Open zonotope spanned by the columns of `B`, scaled by `scale`
/// (1 for `Z_B`, 1/2 for the Mellin-Barnes domain).
#[derive(Clone, Debug)]
pub struct Zonotope {
    generators: IntMatrix,
    scale: Rational,
    /// Facet support data: primitive normals of the hyperplanes spanned by
    /// `d - 1` generators, with the zonotope's support value in each
    /// direction. Interior membership is equivalent to all strict.
    facets: Vec<(Vec<BigInt>, Rational)>,
}

impl Zonotope {
    pub fn new(sys: &SystemData, scale: Rational) -> Self {
        assert!(scale.is_positive());
        let generators = sys.b().clone();
        let facets = facet_supports(&generators, &scale);
        Zonotope { generators, scale, facets }
    }

    pub fn full(sys: &SystemData) -> Self {
        Zonotope::new(sys, Rational::one())
    }

    pub fn half(sys: &SystemData) -> Self {
        Zonotope::new(sys, Rational::new(1.into(), 2.into()))
    }

    pub fn dim(&self) -> usize {
        self.generators.rows()
    }

    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    /// Exact facet-inequality test: strict interior membership holds exactly
    /// when `|n . tau| < support(n)` for every facet normal `n`.
    pub fn contains_by_support(&self, tau: &[Rational]) -> bool {
        assert_eq!(tau.len(), self.dim(), "tau has wrong dimension");
        self.facets.iter().all(|(normal, support)| {
            let v = crate::ratlin::dot_rat_int(tau, normal);
            &v < support && -v < *support
        })
    }

    /// Exact strict membership: is `tau = scale * sum nu_i b_i` solvable with
    /// `0 < nu_i < 1`? Decided by maximizing the minimum slack with an exact
    /// rational LP and testing the optimum against zero.
    pub fn contains(&self, tau: &[Rational]) -> bool {
        let d = self.dim();
        let n = self.generators.cols();
        assert_eq!(tau.len(), d, "tau has wrong dimension");
        // Variables nu_1..nu_n, t; maximize t.
        let nv = n + 1;
        let mut lp = LpProblem::new(nv);
        let mut obj = vec![Rational::zero(); nv];
        obj[n] = Rational::one();
        lp.set_objective(obj);
        for row in 0..d {
            let mut a = vec![Rational::zero(); nv];
            for j in 0..n {
                a[j] = Rational::from_integer(self.generators.get(row, j).clone()) * &self.scale;
            }
            lp.eq(a, tau[row].clone());
        }
        for j in 0..n {
            // t <= nu_j and t <= 1 - nu_j
            let mut a = vec![Rational::zero(); nv];
            a[j] = -Rational::one();
            a[n] = Rational::one();
            lp.leq(a, Rational::zero());
            let mut a = vec![Rational::zero(); nv];
            a[j] = Rational::one();
            a[n] = Rational::one();
            lp.leq(a, Rational::one());
        }
        match lp.solve() {
            LpResult::Optimal { value, .. } => value.is_positive(),
            _ => false,
        }
    }

    /// Component-wise open bounding interval of the zonotope.
    fn bounds(&self) -> Vec<(Rational, Rational)> {
        (0..self.dim())
            .map(|row| {
                let mut lo = Rational::zero();
                let mut hi = Rational::zero();
                for j in 0..self.generators.cols() {
                    let g = Rational::from_integer(self.generators.get(row, j).clone()) * &self.scale;
                    if g.is_positive() {
                        hi += g;
                    } else {
                        lo += g;
                    }
                }
                (lo, hi)
            })
            .collect()
    }

    /// All points `offset + k`, `k` integral, strictly inside the zonotope,
    /// sorted lexicographically.
    pub fn lattice_translates(&self, offset: &[Rational]) -> Vec<Vec<Rational>> {
        let d = self.dim();
        assert_eq!(offset.len(), d);
        let bounds = self.bounds();
        let ranges: Vec<(BigInt, BigInt)> = (0..d)
            .map(|i| {
                let lo = (&bounds[i].0 - &offset[i]).ceil().to_integer();
                let hi = (&bounds[i].1 - &offset[i]).floor().to_integer();
                (lo, hi)
            })
            .collect();
        let mut out = Vec::new();
        let mut k: Vec<BigInt> = ranges.iter().map(|(lo, _)| lo.clone()).collect();
        'outer: loop {
            let tau: Vec<Rational> = (0..d)
                .map(|i| &offset[i] + Rational::from_integer(k[i].clone()))
                .collect();
            // Cheap exact facet filter; survivors get the LP witness check.
            if self.contains_by_support(&tau) {
                let confirmed = self.contains(&tau);
                debug_assert!(confirmed, "support test and LP disagree at {tau:?}");
                if confirmed {
                    out.push(tau);
                }
            }
            // Odometer increment over the integer box.
            for i in (0..d).rev() {
                if k[i] < ranges[i].1 {
                    k[i] += 1;
                    for j in i + 1..d {
                        k[j].clone_from(&ranges[j].0);
                    }
                    continue 'outer;
                }
            }
            break;
        }
        out.sort();
        out
    }

    /// Integer points strictly inside the zonotope (offset zero), sorted.
    pub fn interior_integer_points(&self) -> Vec<Vec<Rational>> {
        self.lattice_translates(&vec![Rational::zero(); self.dim()])
    }
}

/// Primitive facet normals with the zonotope's support value in each
/// direction: `support(n) = scale * sum_i max(0, n . b_i)`, and by the zero
/// column sums the support is symmetric in `n` and `-n`.
fn facet_supports(generators: &IntMatrix, scale: &Rational) -> Vec<(Vec<BigInt>, Rational)> {
    use itertools::Itertools;
    use num_traits::One;

    let d = generators.rows();
    let n = generators.cols();
    let mut normals: Vec<Vec<BigInt>> = Vec::new();
    if d == 1 {
        normals.push(vec![BigInt::one()]);
    } else {
        for subset in (0..n).combinations(d - 1) {
            let sub = generators.select_columns(&subset).transpose();
            if crate::ratlin::int_rank(&sub) != d - 1 {
                continue;
            }
            let Ok(kernel) = crate::ratlin::saturated_integer_kernel(&sub) else {
                continue;
            };
            let mut normal = kernel.row(0).to_vec();
            // Canonical sign: first nonzero coordinate positive.
            if normal.iter().find(|e| !e.is_zero()).is_some_and(Signed::is_negative) {
                normal = normal.iter().map(|e| -e).collect();
            }
            if !normals.contains(&normal) {
                normals.push(normal);
            }
        }
    }
    normals
        .into_iter()
        .map(|normal| {
            let mut support = Rational::zero();
            for j in 0..n {
                let pairing: BigInt = normal
                    .iter()
                    .zip(generators.col(j))
                    .map(|(a, b)| a * b)
                    .sum();
                if pairing.is_positive() {
                    support += Rational::from_integer(pairing) * scale;
                }
            }
            (normal, support)
        })
        .collect()
}

/// Offsets are compared modulo 1; reduce to the canonical representative.
pub fn reduce_offset(offset: &[Rational]) -> Vec<Rational> {
    offset
        .iter()
        .map(|q| {
            let f = q.floor();
            q - f
        })
        .collect()
}

/// Difference of two points of a half-zonotope translate lies in the full
/// zonotope; exposed for the closure property checks.
pub fn tau_difference(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// True when every coordinate of `v` is an integer.
pub fn is_integral(v: &[Rational]) -> bool {
    v.iter().all(|q| q.denom().is_one())
}

/// True when `a - b` is integral.
pub fn differ_by_integers(a: &[Rational], b: &[Rational]) -> bool {
    is_integral(&tau_difference(a, b))
}
