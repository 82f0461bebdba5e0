//! Polyhedral geometry of the Gale dual: cotriangles, cotriangulations,
//! chambers and walls of the secondary fan, and the adjacency graph.

pub mod lp;
pub mod zonotope;

use std::collections::BTreeMap;
use std::collections::VecDeque;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ratlin::{dot_rat_int, primitive_direction, Rational, SystemData};
use lp::{LpProblem, LpResult};

pub use zonotope::Zonotope;

/// A `d`-subset of column indices (0-based) with linearly independent
/// `b`-columns; `delta = |det B_I|`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cotriangle {
    indices: Vec<usize>,
    delta: BigInt,
}

impl Cotriangle {
    /// Build from explicit column indices; errors when the columns are
    /// dependent.
    pub fn new(sys: &SystemData, indices: &[usize]) -> Result<Cotriangle> {
        let mut indices = indices.to_vec();
        indices.sort_unstable();
        indices.dedup();
        if indices.len() != sys.d() {
            return Err(Error::Dimension(format!(
                "cotriangle needs {} distinct indices, got {indices:?}",
                sys.d()
            )));
        }
        let det = sys.b_sub(&indices).det();
        if det.is_zero() {
            return Err(Error::RankDeficient { expected: sys.d(), found: 0 });
        }
        Ok(Cotriangle { delta: det.abs(), indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn delta(&self) -> &BigInt {
        &self.delta
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// Complement `I^c`, which spans the corresponding simplex of the dual
    /// triangulation of `A`.
    pub fn complement(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|i| !self.contains(*i)).collect()
    }
}

/// The set of cotriangles whose positive cones contain a fixed generic
/// direction, together with that witness direction.
#[derive(Clone, Debug)]
pub struct Cotriangulation {
    cotriangles: Vec<Cotriangle>,
    witness: Vec<Rational>,
}

impl Cotriangulation {
    pub fn cotriangles(&self) -> &[Cotriangle] {
        &self.cotriangles
    }

    pub fn witness(&self) -> &[Rational] {
        &self.witness
    }

    /// Sum of `Delta_I` over the members; equals the holonomic rank `D`.
    pub fn delta_sum(&self) -> BigInt {
        self.cotriangles.iter().map(|c| c.delta.clone()).sum()
    }

    /// Canonical identity of the cotriangulation: the sorted index sets.
    pub fn signature(&self) -> Vec<Vec<usize>> {
        self.cotriangles.iter().map(|c| c.indices.clone()).collect()
    }
}

/// One closed half-space `normal . x >= 0` (or `> 0` when `strict`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct HalfSpace {
    pub normal: Vec<BigInt>,
    pub strict: bool,
}

/// A full-dimensional cone of convergence directions sharing one
/// cotriangulation: the intersection of the member cones `C_I`.
#[derive(Clone, Debug)]
pub struct Chamber {
    cotriangulation: Cotriangulation,
    half_spaces: Vec<HalfSpace>,
}

impl Chamber {
    fn build(sys: &SystemData, cotriangulation: Cotriangulation) -> Result<Chamber> {
        let mut normals = std::collections::BTreeSet::new();
        for cot in &cotriangulation.cotriangles {
            let inv = sys
                .b_sub(&cot.indices)
                .to_rational()
                .inverse()
                .ok_or_else(|| Error::Internal("singular cotriangle submatrix".into()))?;
            for r in 0..inv.rows() {
                normals.insert(primitive_direction(inv.row(r)));
            }
        }
        let half_spaces = normals
            .into_iter()
            .map(|normal| HalfSpace { normal, strict: false })
            .collect();
        Ok(Chamber { cotriangulation, half_spaces })
    }

    pub fn cotriangulation(&self) -> &Cotriangulation {
        &self.cotriangulation
    }

    pub fn half_spaces(&self) -> &[HalfSpace] {
        &self.half_spaces
    }

    pub fn witness(&self) -> &[Rational] {
        self.cotriangulation.witness()
    }

    /// Exact interior membership (every defining inequality strict).
    pub fn interior_contains(&self, x: &[Rational]) -> bool {
        self.half_spaces.iter().all(|hs| dot_rat_int(x, &hs.normal).is_positive())
    }
}

/// A codimension-1 face shared by exactly two chambers. The normal points
/// into the first chamber of `chambers`; `interior_point` lies in the
/// relative interior of the wall.
#[derive(Clone, Debug)]
pub struct Wall {
    pub normal: Vec<BigInt>,
    pub interior_point: Vec<Rational>,
    pub chambers: (usize, usize),
}

/// All cotriangles with nonzero determinant, in lexicographic order.
pub fn enumerate_cotriangles(sys: &SystemData) -> Vec<Cotriangle> {
    let d = sys.d();
    (0..sys.n())
        .combinations(d)
        .filter_map(|indices| {
            let det = sys.b_sub(&indices).det();
            (!det.is_zero()).then(|| Cotriangle { delta: det.abs(), indices })
        })
        .collect()
}

/// The cotriangulation `I_rho` of all cotriangles whose open cones contain
/// `rho`. Errors when `rho` lies on a hyperplane spanned by `d - 1` columns.
pub fn cotriangulation_for_direction(sys: &SystemData, rho: &[Rational]) -> Result<Cotriangulation> {
    assert_eq!(rho.len(), sys.d(), "direction has wrong dimension");
    let mut members = Vec::new();
    for cot in enumerate_cotriangles(sys) {
        let inv = sys
            .b_sub(&cot.indices)
            .to_rational()
            .inverse()
            .expect("cotriangle submatrix is invertible");
        let coords = inv.mul_vec(rho);
        if let Some(z) = coords.iter().position(|c| c.is_zero()) {
            let indices = cot
                .indices
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != z)
                .map(|(_, &i)| i)
                .collect();
            return Err(Error::NonGenericDirection { indices });
        }
        if coords.iter().all(Signed::is_positive) {
            members.push(cot);
        }
    }
    Ok(Cotriangulation { cotriangles: members, witness: rho.to_vec() })
}

fn rat_int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

/// Sort key for exact angular order of nonzero integer plane vectors.
fn angular_cmp(a: &[BigInt], b: &[BigInt]) -> std::cmp::Ordering {
    let half = |v: &[BigInt]| -> u8 {
        if v[1].is_positive() || (v[1].is_zero() && v[0].is_positive()) {
            0
        } else {
            1
        }
    };
    half(a).cmp(&half(b)).then_with(|| {
        let cross = &a[0] * &b[1] - &a[1] * &b[0];
        // cross > 0 means a comes strictly before b within the half-plane
        BigInt::zero().cmp(&cross)
    })
}

/// All chambers of the secondary fan, sorted by cotriangulation signature.
///
/// Exact construction for `d <= 2`; for `d >= 3` seeded direction sampling
/// deduplicated by cotriangulation and closed under reflecting witnesses
/// across bounding hyperplanes.
pub fn enumerate_chambers(sys: &SystemData, seed: u64) -> Result<Vec<Chamber>> {
    if sys.d() == 0 {
        return Err(Error::DegenerateFan);
    }
    let cotriangulations = match sys.d() {
        1 => {
            let plus = cotriangulation_for_direction(sys, &[rat_int(1)])?;
            let minus = cotriangulation_for_direction(sys, &[rat_int(-1)])?;
            vec![plus, minus]
        }
        2 => chambers_planar(sys)?,
        _ => chambers_sampled(sys, seed)?,
    };

    let mut by_sig: BTreeMap<Vec<Vec<usize>>, Cotriangulation> = BTreeMap::new();
    for ct in cotriangulations {
        by_sig.entry(ct.signature()).or_insert(ct);
    }
    let chambers: Vec<Chamber> = by_sig
        .into_values()
        .map(|ct| Chamber::build(sys, ct))
        .collect::<Result<_>>()?;

    // Rank consistency across chambers is a theorem; a violation means the
    // enumeration (or the arithmetic under it) is broken.
    let sums: Vec<BigInt> = chambers.iter().map(|c| c.cotriangulation.delta_sum()).collect();
    if sums.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::Internal(format!("chambers disagree on sum of Delta_I: {sums:?}")));
    }
    Ok(chambers)
}

/// Exact planar enumeration: angular sort of the column rays, one sector per
/// consecutive pair, then merge sectors sharing a cotriangulation.
fn chambers_planar(sys: &SystemData) -> Result<Vec<Cotriangulation>> {
    let mut rays: Vec<Vec<BigInt>> = Vec::new();
    for j in 0..sys.n() {
        let col = sys.b_col(j);
        let prim = primitive_int(&col);
        let neg = prim.iter().map(|v| -v).collect();
        rays.push(prim);
        rays.push(neg);
    }
    rays.sort_by(|a, b| angular_cmp(a, b));
    rays.dedup();
    let m = rays.len();
    debug_assert!(m >= 4, "rank-2 Gale dual must span at least two lines");

    let mut sectors = Vec::with_capacity(m);
    for k in 0..m {
        let a = &rays[k];
        let b = &rays[(k + 1) % m];
        let mid: Vec<Rational> = (0..2)
            .map(|i| Rational::from_integer(&a[i] + &b[i]))
            .collect();
        sectors.push(cotriangulation_for_direction(sys, &mid)?);
    }
    // Merge cyclically adjacent sectors with equal cotriangulations.
    let mut merged: Vec<Cotriangulation> = Vec::new();
    for sec in sectors {
        if merged.last().map(|p: &Cotriangulation| p.signature()) == Some(sec.signature()) {
            continue;
        }
        merged.push(sec);
    }
    if merged.len() > 1 && merged.first().map(|c| c.signature()) == merged.last().map(|c| c.signature()) {
        merged.pop();
    }
    Ok(merged)
}

/// Sampling plus wall-crossing closure for `d >= 3`.
fn chambers_sampled(sys: &SystemData, seed: u64) -> Result<Vec<Cotriangulation>> {
    let d = sys.d();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: BTreeMap<Vec<Vec<usize>>, Cotriangulation> = BTreeMap::new();

    let try_direction = |rho: &[Rational], found: &mut BTreeMap<Vec<Vec<usize>>, Cotriangulation>| {
        if rho.iter().all(Zero::is_zero) {
            return;
        }
        if let Ok(ct) = cotriangulation_for_direction(sys, rho) {
            found.entry(ct.signature()).or_insert(ct);
        }
    };

    let samples = 64 * d;
    for _ in 0..samples {
        let rho: Vec<Rational> = (0..d).map(|_| rat_int(rng.random_range(-9..=9))).collect();
        try_direction(&rho, &mut found);
    }

    // Closure: reflect each chamber witness across each bounding hyperplane
    // until no new cotriangulation appears.
    loop {
        let snapshot: Vec<Cotriangulation> = found.values().cloned().collect();
        let before = found.len();
        for ct in &snapshot {
            let chamber = Chamber::build(sys, ct.clone())?;
            for hs in chamber.half_spaces() {
                let n = &hs.normal;
                let nn: Rational = n
                    .iter()
                    .map(|v| Rational::from_integer(v * v))
                    .sum();
                let proj = dot_rat_int(ct.witness(), n);
                let factor = rat_int(2) * proj / nn;
                let reflected: Vec<Rational> = ct
                    .witness()
                    .iter()
                    .zip(n)
                    .map(|(w, ni)| w - &factor * Rational::from_integer(ni.clone()))
                    .collect();
                try_direction(&reflected, &mut found);
                // Deterministic nudges in case the reflection is non-generic.
                for k in 1..=3u32 {
                    let eps = Rational::new(1.into(), BigInt::from(97u32.pow(k)));
                    let nudged: Vec<Rational> = reflected
                        .iter()
                        .enumerate()
                        .map(|(i, w)| w + &eps * ct.witness()[i].clone())
                        .collect();
                    try_direction(&nudged, &mut found);
                }
            }
        }
        if found.len() == before {
            break;
        }
    }
    Ok(found.into_values().collect())
}

fn primitive_int(v: &[BigInt]) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for e in v {
        g = g.gcd(e);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|e| e / &g).collect()
}

/// The chamber adjacency graph with wall labels.
#[derive(Clone, Debug)]
pub struct SecondaryFan {
    chambers: Vec<Chamber>,
    walls: Vec<Wall>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl SecondaryFan {
    pub fn chambers(&self) -> &[Chamber] {
        &self.chambers
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn neighbors(&self, chamber: usize) -> &[(usize, usize)] {
        &self.adjacency[chamber]
    }

    /// Shortest chamber path (inclusive of endpoints); `[i]` when `i == j`.
    pub fn path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut prev: Vec<Option<usize>> = vec![None; self.chambers.len()];
        let mut seen = vec![false; self.chambers.len()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(c) = queue.pop_front() {
            if c == to {
                break;
            }
            for &(nbr, _) in &self.adjacency[c] {
                if !seen[nbr] {
                    seen[nbr] = true;
                    prev[nbr] = Some(c);
                    queue.push_back(nbr);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while let Some(p) = prev[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        debug_assert_eq!(path.first(), Some(&from));
        path
    }

    /// Cotriangles of chamber `c` whose cones have the wall as a (sub)-face.
    pub fn wall_cotriangles(&self, sys: &SystemData, chamber: usize, wall: usize) -> Vec<Cotriangle> {
        let w = &self.walls[wall].interior_point;
        self.chambers[chamber]
            .cotriangulation
            .cotriangles()
            .iter()
            .filter(|cot| {
                let inv = sys
                    .b_sub(cot.indices())
                    .to_rational()
                    .inverse()
                    .expect("cotriangle submatrix is invertible");
                inv.mul_vec(w).iter().any(Zero::is_zero)
            })
            .cloned()
            .collect()
    }

    /// The wall joining two chambers, if they are adjacent.
    pub fn wall_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency[a].iter().find(|&&(nbr, _)| nbr == b).map(|&(_, w)| w)
    }
}

/// Build the adjacency graph; errors when the graph is disconnected, which
/// signals an incomplete chamber enumeration.
pub fn adjacency_graph(sys: &SystemData, chambers: Vec<Chamber>) -> Result<SecondaryFan> {
    let d = sys.d();
    let m = chambers.len();
    let mut walls = Vec::new();
    let mut adjacency = vec![Vec::new(); m];
    for i in 0..m {
        for j in i + 1..m {
            if let Some(wall) = common_wall(d, &chambers[i], &chambers[j], (i, j)) {
                let widx = walls.len();
                adjacency[i].push((j, widx));
                adjacency[j].push((i, widx));
                walls.push(wall);
            }
        }
    }
    // Connectivity check (the true chamber graph is connected).
    if m > 0 {
        let mut seen = vec![false; m];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(c) = queue.pop_front() {
            for &(nbr, _) in &adjacency[c] {
                if !seen[nbr] {
                    seen[nbr] = true;
                    count += 1;
                    queue.push_back(nbr);
                }
            }
        }
        if count != m {
            return Err(Error::IncompleteChambers);
        }
    }
    Ok(SecondaryFan { chambers, walls, adjacency })
}

/// Exact test for a shared codimension-1 face, with wall data.
fn common_wall(d: usize, a: &Chamber, b: &Chamber, pair: (usize, usize)) -> Option<Wall> {
    let mut combined: Vec<Vec<Rational>> = Vec::new();
    for hs in a.half_spaces().iter().chain(b.half_spaces()) {
        let v: Vec<Rational> = hs.normal.iter().map(|e| Rational::from_integer(e.clone())).collect();
        if !combined.contains(&v) {
            combined.push(v);
        }
    }
    // Implicit equalities of the intersection cone.
    let mut implicit = Vec::new();
    let mut open = Vec::new();
    for g in &combined {
        if lp::strict_cone_point(std::slice::from_ref(g), &combined, d).is_some() {
            open.push(g.clone());
        } else {
            implicit.push(g.clone());
        }
    }
    if implicit.is_empty() {
        return None;
    }
    let rank = {
        let rows = implicit.len();
        let m = crate::ratlin::RatMatrix::new(rows, d, implicit.concat());
        m.rank()
    };
    if rank != 1 {
        return None;
    }
    // Relative interior point of the wall.
    let interior_point = relative_interior(&open, &implicit, d)?;
    let e = primitive_direction(&implicit[0]);
    let orient = dot_rat_int(a.witness(), &e);
    debug_assert!(!orient.is_zero());
    let normal = if orient.is_positive() { e } else { e.iter().map(|v| -v).collect() };
    Some(Wall { normal, interior_point, chambers: pair })
}

/// A point with `g . x > 0` for the open constraints and `e . x = 0` for the
/// implicit ones.
fn relative_interior(open: &[Vec<Rational>], implicit: &[Vec<Rational>], d: usize) -> Option<Vec<Rational>> {
    let nv = d + 1;
    let mut lp = LpProblem::new(nv);
    let mut obj = vec![Rational::zero(); nv];
    obj[d] = Rational::one();
    lp.set_objective(obj);
    for g in open {
        let mut row: Vec<Rational> = g.iter().map(|v| -v).collect();
        row.push(Rational::one());
        lp.leq(row, Rational::zero());
    }
    for e in implicit {
        let mut row: Vec<Rational> = e.to_vec();
        row.push(Rational::zero());
        lp.eq(row, Rational::zero());
    }
    let mut cap = vec![Rational::zero(); nv];
    cap[d] = Rational::one();
    lp.leq(cap, Rational::one());
    match lp.solve() {
        LpResult::Optimal { value, x } if value.is_positive() => Some(x[..d].to_vec()),
        _ => None,
    }
}

/// Membership of `w` in the closed cone spanned by the given `B`-columns.
pub fn cone_contains(sys: &SystemData, cols: &[usize], w: &[Rational]) -> bool {
    let d = sys.d();
    let k = cols.len();
    let mut lp = LpProblem::new(k);
    for row in 0..d {
        let a: Vec<Rational> = cols
            .iter()
            .map(|&j| Rational::from_integer(sys.b().get(row, j).clone()))
            .collect();
        lp.eq(a, w[row].clone());
    }
    for j in 0..k {
        let mut a = vec![Rational::zero(); k];
        a[j] = -Rational::one();
        lp.leq(a, Rational::zero());
    }
    matches!(lp.solve(), LpResult::Optimal { .. })
}

/// Chambers plus adjacency in one call.
pub fn secondary_fan(sys: &SystemData, seed: u64) -> Result<SecondaryFan> {
    // For d >= 3 the sampled enumeration may be incomplete; retry with fresh
    // seeds before giving up.
    let mut last_err = None;
    for attempt in 0..4 {
        let chambers = enumerate_chambers(sys, seed.wrapping_add(attempt))?;
        match adjacency_graph(sys, chambers) {
            Ok(fan) => return Ok(fan),
            Err(e @ Error::IncompleteChambers) => last_err = Some(e),
            Err(e) => return Err(e),
        }
        if sys.d() <= 2 {
            break;
        }
    }
    Err(last_err.unwrap_or(Error::IncompleteChambers))
}
