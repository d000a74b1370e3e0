//! Node geometry of a quartic section B of the quadric threefold: the
//! singular scheme by the Jacobian route, point counting and reducedness
//! certificates through Hilbert series and generic projection to a line,
//! the Groebner route to the defect, and brute-force point enumeration with
//! a Hessian ordinary-double-point test for small primes.

use crate::gfp::{Fe, MatrixGF};
use crate::groebner::{
    eliminate, graded_piece_dim, hilbert, saturate_irrelevant, GroebnerBasis, GroebnerError,
};
use crate::polyring::{derive_seed, random_invertible, seeded_rng, Poly, RingContext};
use crate::quadric::QuadricContext;

/// Saturated ideal of Sing(B): the locus on Q where the gradient of f is
/// proportional to the gradient of q, i.e. all 2x2 minors of the Jacobian
/// of (q, f) vanish.
pub fn singular_scheme(qc: &QuadricContext, f: &Poly, seed: u64) -> GroebnerBasis {
    let ctx = &qc.ctx;
    let gq: Vec<Poly> = (0..5).map(|i| qc.q.derivative(i, ctx)).collect();
    let gf: Vec<Poly> = (0..5).map(|i| f.derivative(i, ctx)).collect();
    let mut gens = vec![qc.q.clone(), f.clone()];
    for i in 0..5 {
        for j in (i + 1)..5 {
            let m = gq[i]
                .mul(&gf[j], ctx)
                .sub(&gq[j].mul(&gf[i], ctx), ctx);
            if !m.is_zero() {
                gens.push(m);
            }
        }
    }
    saturate_irrelevant(&gens, ctx, derive_seed(seed, 31))
}

/// Projective dimension and degree of a scheme given by a saturated ideal.
pub fn count_points(gb: &GroebnerBasis, ctx: &RingContext) -> (i64, i64) {
    let h = hilbert(gb, ctx);
    (h.dimension, h.degree)
}

/// Groebner route to the defect of a node set w: the failure of quartics
/// through w to impose independent conditions,
///   d(w) = h^0(I_w(3)) - (30 - |w|),
/// with h^0(I_w(3)) read off a graded piece of the saturated cone ideal
/// (the ambient piece minus the 5-dimensional multiples of q).
pub fn defect_from_points(
    gb: &GroebnerBasis,
    nodes: i64,
    ctx: &RingContext,
) -> Result<i64, GroebnerError> {
    let piece = graded_piece_dim(&gb.elems, 3, ctx)? as i64;
    Ok(piece - 5 - 30 + nodes)
}

// ---------------------------------------------------------------------------
// reducedness by generic projection
// ---------------------------------------------------------------------------

/// Binary form in the last two variables, as coefficients indexed by the
/// exponent of z3.
fn binary_coeffs(f: &Poly) -> Option<Vec<Fe>> {
    let d = f.degree();
    if d < 0 {
        return None;
    }
    let mut coeffs = vec![0 as Fe; d as usize + 1];
    for (c, m) in &f.terms {
        if m.e[0] != 0 || m.e[1] != 0 || m.e[2] != 0 {
            return None;
        }
        coeffs[m.e[3] as usize] = *c;
    }
    Some(coeffs)
}

fn uni_trim(a: &mut Vec<Fe>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn uni_rem(a: &[Fe], b: &[Fe], f: &crate::gfp::PrimeField) -> Vec<Fe> {
    let mut r = a.to_vec();
    uni_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = f.inv(b[db]).expect("trimmed leading coefficient");
    while r.len() > db {
        let k = r.len() - 1 - db;
        let c = f.mul(*r.last().unwrap(), lead_inv);
        for (i, &bi) in b.iter().enumerate() {
            r[k + i] = f.sub(r[k + i], f.mul(c, bi));
        }
        uni_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn uni_gcd(a: &[Fe], b: &[Fe], f: &crate::gfp::PrimeField) -> Vec<Fe> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    uni_trim(&mut x);
    uni_trim(&mut y);
    while !y.is_empty() {
        let r = uni_rem(&x, &y, f);
        x = y;
        y = r;
    }
    // monic normalization
    if let Some(&lead) = x.last() {
        let inv = f.inv(lead).expect("trimmed leading coefficient");
        for c in &mut x {
            *c = f.mul(*c, inv);
        }
    }
    x
}

fn uni_derivative(a: &[Fe], f: &crate::gfp::PrimeField) -> Vec<Fe> {
    let mut d: Vec<Fe> = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| f.mul(f.reduce_i64(i as i64), c))
        .collect();
    uni_trim(&mut d);
    d
}

/// Multiplicities of z3 and z4 in a binary form plus its stripped
/// univariate core in t = z3/z4.
fn binary_split(coeffs: &[Fe]) -> (usize, usize, Vec<Fe>) {
    let lo = coeffs.iter().position(|&c| c != 0).unwrap();
    let hi = coeffs.iter().rposition(|&c| c != 0).unwrap();
    let m3 = lo;
    let m4 = coeffs.len() - 1 - hi;
    (m3, m4, coeffs[lo..=hi].to_vec())
}

fn binary_gcd(a: &[Fe], b: &[Fe], f: &crate::gfp::PrimeField) -> (usize, usize, Vec<Fe>) {
    let (a3, a4, ac) = binary_split(a);
    let (b3, b4, bc) = binary_split(b);
    (a3.min(b3), a4.min(b4), uni_gcd(&ac, &bc, f))
}

fn binary_is_squarefree(m3: usize, m4: usize, core: &[Fe], f: &crate::gfp::PrimeField) -> bool {
    if m3 > 1 || m4 > 1 {
        return false;
    }
    if core.len() <= 1 {
        return true;
    }
    let d = uni_derivative(core, f);
    if d.is_empty() {
        // p divides every exponent: a p-th power, certainly not squarefree
        return false;
    }
    uni_gcd(core, &d, f).len() == 1
}

/// Certify that a zero-dimensional scheme of the given degree is reduced:
/// project to the (z3, z4) line through a random coordinate change and look
/// for a squarefree image form of full degree. A hit proves reducedness;
/// a non-reduced scheme can never produce one, and for a reduced scheme a
/// generic projection works, so a handful of attempts decides.
pub fn is_reduced_points(
    gens: &[Poly],
    expected: i64,
    ctx: &RingContext,
    seed: u64,
) -> bool {
    let f = &ctx.field;
    let mut rng = seeded_rng(derive_seed(seed, 47));
    for _ in 0..4 {
        let t = random_invertible(ctx, &mut rng);
        let moved: Vec<Poly> = gens.iter().map(|g| g.apply_linear(&t, ctx)).collect();
        let elim = eliminate(&moved, 3, ctx);
        let mut best: Option<(usize, usize, Vec<Fe>)> = None;
        for g in &elim {
            let coeffs = match binary_coeffs(g) {
                Some(c) => c,
                None => continue,
            };
            best = Some(match best {
                None => binary_split(&coeffs),
                Some((m3, m4, core)) => {
                    let mut full = vec![0 as Fe; m3 + m4 + core.len()];
                    full[m3..m3 + core.len()].copy_from_slice(&core);
                    binary_gcd(&full, &coeffs, f)
                }
            });
        }
        if let Some((m3, m4, core)) = best {
            let deg = (m3 + m4 + core.len() - 1) as i64;
            if deg == expected && binary_is_squarefree(m3, m4, &core, f) {
                return true;
            }
        }
    }
    false
}

// ---------------------------------------------------------------------------
// brute-force oracle for small primes
// ---------------------------------------------------------------------------

/// All F_p-rational points of the quadric, as normalized projective
/// representatives. Only sensible for small p.
pub fn quadric_points(qc: &QuadricContext) -> Vec<[Fe; 5]> {
    let ctx = &qc.ctx;
    let p = ctx.field.p;
    assert!(p <= 101, "point enumeration is a small-prime oracle");
    let mut pts = Vec::new();
    let mut point = [0 as Fe; 5];
    for first in 0..5 {
        point = [0; 5];
        point[first] = 1;
        let free = 4 - first;
        let total = (p as u64).pow(free as u32);
        for code in 0..total {
            let mut c = code;
            for slot in 0..free {
                point[first + 1 + slot] = (c % p as u64) as Fe;
                c /= p as u64;
            }
            if qc.q.eval(&point, ctx) == 0 {
                pts.push(point);
            }
        }
    }
    let _ = point;
    pts
}

/// Rational points of Q where f vanishes and the Jacobian of (q, f) drops
/// rank: the visible singular points of B.
pub fn rational_singular_points(qc: &QuadricContext, f: &Poly) -> Vec<[Fe; 5]> {
    let ctx = &qc.ctx;
    let fld = &ctx.field;
    let gq: Vec<Poly> = (0..5).map(|i| qc.q.derivative(i, ctx)).collect();
    let gf: Vec<Poly> = (0..5).map(|i| f.derivative(i, ctx)).collect();
    quadric_points(qc)
        .into_iter()
        .filter(|pt| {
            if f.eval(pt, ctx) != 0 {
                return false;
            }
            let a: Vec<Fe> = gq.iter().map(|g| g.eval(pt, ctx)).collect();
            let b: Vec<Fe> = gf.iter().map(|g| g.eval(pt, ctx)).collect();
            for i in 0..5 {
                for j in (i + 1)..5 {
                    if fld.sub(fld.mul(a[i], b[j]), fld.mul(a[j], b[i])) != 0 {
                        return false;
                    }
                }
            }
            true
        })
        .collect()
}

/// Hessian test for an ordinary double point of B = {q = f = 0} at a
/// rational singular point: in an affine chart, f - lambda q has a critical
/// point there, and the singularity is a node exactly when the Hessian
/// restricted to the tangent space of the affine quadric has full rank 3.
pub fn is_odp_at(qc: &QuadricContext, f: &Poly, point: &[Fe; 5]) -> bool {
    let ctx = &qc.ctx;
    let fld = &ctx.field;
    let chart = match (0..5).find(|&i| point[i] != 0) {
        Some(i) => i,
        None => return false,
    };
    let scale = fld.inv(point[chart]).expect("chart coordinate is nonzero");
    let pt: Vec<Fe> = point.iter().map(|&c| fld.mul(c, scale)).collect();

    let gq: Vec<Fe> = (0..5)
        .map(|j| qc.q.derivative(j, ctx).eval(&pt, ctx))
        .collect();
    let gf: Vec<Fe> = (0..5).map(|j| f.derivative(j, ctx).eval(&pt, ctx)).collect();
    let pivot = match (0..5).find(|&j| gq[j] != 0) {
        Some(j) => j,
        None => return false, // impossible on a smooth quadric
    };
    let lam = fld.div(gf[pivot], gq[pivot]).expect("pivot gradient entry is nonzero");
    if (0..5).any(|j| gf[j] != fld.mul(lam, gq[j])) {
        return false; // not even a singular point of B
    }

    let js: Vec<usize> = (0..5).filter(|&j| j != chart).collect();
    let mut grad_row = MatrixGF::zeros(1, 4);
    for (a, &j) in js.iter().enumerate() {
        grad_row.set(0, a, gq[j]);
    }
    let tangent = grad_row.kernel_basis(fld);
    if tangent.len() != 3 {
        return false;
    }

    let mut hess = MatrixGF::zeros(4, 4);
    for (a, &ja) in js.iter().enumerate() {
        for (b, &jb) in js.iter().enumerate() {
            let hf = f.derivative(ja, ctx).derivative(jb, ctx).eval(&pt, ctx);
            let hq = qc.q.derivative(ja, ctx).derivative(jb, ctx).eval(&pt, ctx);
            hess.set(a, b, fld.sub(hf, fld.mul(lam, hq)));
        }
    }
    let mut m = MatrixGF::zeros(3, 3);
    for (r, tr) in tangent.iter().enumerate() {
        for (c, tc) in tangent.iter().enumerate() {
            let mut acc = 0 as Fe;
            for a in 0..4 {
                for b in 0..4 {
                    acc = fld.add(acc, fld.mul(tr[a], fld.mul(hess.get(a, b), tc[b])));
                }
            }
            m.set(r, c, acc);
        }
    }
    m.rank(fld) == 3
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barth::{even_set_ideal, Family, SectionSampler};
    use crate::groebner::buchberger;
    use crate::gfp::PrimeField;
    use crate::quadric::QuadricContext;

    fn qcp(p: u32) -> QuadricContext {
        QuadricContext::new(PrimeField::new(p as u64).unwrap())
    }

    #[test]
    fn quadric_point_counts() {
        for p in [7u32, 11, 13] {
            let qc = qcp(p);
            let n = quadric_points(&qc).len() as u64;
            let q = p as u64;
            assert_eq!(n, q * q * q + q * q + q + 1, "p = {p}");
        }
    }

    #[test]
    fn singular_scheme_agrees_with_even_set_o1() {
        let qc = qcp(101);
        let sampler = SectionSampler::new(&qc, Family::O1).unwrap();
        let section = sampler.generate(&qc, 7).unwrap();
        let even = even_set_ideal(&qc, &sampler.spec, &sampler.tgt, &section.map.u, 7).unwrap();
        let sing = singular_scheme(&qc, &section.f, 7);
        assert_eq!(even.gb.elems, sing.elems);
        let (dim, deg) = count_points(&sing, &qc.ctx);
        assert_eq!((dim, deg), (0, 12));
        assert!(is_reduced_points(&sing.elems, 12, &qc.ctx, 7));
        let d = defect_from_points(&sing, 12, &qc.ctx).unwrap();
        assert_eq!(d, 1);
    }

    #[test]
    fn line_family_defects_by_groebner_route() {
        let qc = qcp(101);
        for (family, nodes, defect) in [(Family::E1, 16, 1), (Family::O2, 20, 0)] {
            let sampler = SectionSampler::new(&qc, family).unwrap();
            let section = sampler.generate(&qc, 11).unwrap();
            let sing = singular_scheme(&qc, &section.f, 11);
            let (dim, deg) = count_points(&sing, &qc.ctx);
            assert_eq!((dim, deg), (0, nodes), "{family}");
            assert!(is_reduced_points(&sing.elems, nodes, &qc.ctx, 11), "{family}");
            let d = defect_from_points(&sing, nodes, &qc.ctx).unwrap();
            assert_eq!(d, defect, "{family}");
        }
    }

    #[test]
    fn reduced_detector_examples() {
        let qc = qcp(101);
        let ctx = &qc.ctx;
        // double point: z4-axis with a square on z3
        let fat = buchberger(
            &[
                Poly::var(0),
                Poly::var(1),
                Poly::var(2),
                Poly::var(3).mul(&Poly::var(3), ctx),
            ],
            ctx,
        );
        let (dim, deg) = count_points(&fat, ctx);
        assert_eq!((dim, deg), (0, 2));
        assert!(!is_reduced_points(&fat.elems, 2, ctx, 3));

        // two honest points
        let z3 = Poly::var(3);
        let z4 = Poly::var(4);
        let pair = buchberger(
            &[
                Poly::var(0),
                Poly::var(1),
                Poly::var(2),
                z3.mul(&z3.sub(&z4, ctx), ctx),
            ],
            ctx,
        );
        let (dim, deg) = count_points(&pair, ctx);
        assert_eq!((dim, deg), (0, 2));
        assert!(is_reduced_points(&pair.elems, 2, ctx, 3));
    }

    #[test]
    fn small_prime_node_census_o1() {
        let qc = qcp(13);
        let sampler = SectionSampler::new(&qc, Family::O1).unwrap();
        let mut section = None;
        for seed in 0..8 {
            if let Ok(s) = sampler.generate(&qc, seed) {
                let sing = singular_scheme(&qc, &s.f, seed);
                let (dim, deg) = count_points(&sing, &qc.ctx);
                if dim == 0 && deg == 12 && is_reduced_points(&sing.elems, 12, &qc.ctx, seed) {
                    section = Some((s, sing));
                    break;
                }
            }
        }
        let (section, sing) = section.expect("a good O1 sample exists over F_13");
        let nodes = rational_singular_points(&qc, &section.f);
        assert!(nodes.len() <= 12);
        for pt in &nodes {
            assert!(is_odp_at(&qc, &section.f, pt), "node at {pt:?} is not an ODP");
            for g in &sing.elems {
                assert_eq!(g.eval(pt, &qc.ctx), 0);
            }
        }
    }
}
