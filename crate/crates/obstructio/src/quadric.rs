//! The smooth quadric threefold Q = {z0 z1 + z2 z3 + z4^2 = 0} in P^4 and
//! the module theory over its coordinate ring needed downstream: the rank-4
//! Clifford matrix factorization Gamma with Gamma^2 = q I (whose cokernel is
//! the twisted spinor bundle), finite presentations of direct sums of line
//! and spinor twists, spaces of module homomorphisms computed by linear
//! algebra modulo null-homotopies, and the duality that turns transposition
//! of presentations into honest adjoints. The adjoint involution is what
//! lets us sample symmetric sections later.

use crate::gfp::{Fe, MatrixGF, PrimeField};
use crate::groebner::{buchberger, GroebnerBasis};
use crate::polyring::{Monomial, Poly, RingContext, BASE_VARS};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuadricError {
    #[error("symmetric subspace has dimension {found}, expected {expected} (complement {complement})")]
    SymmetricDimension {
        found: usize,
        complement: usize,
        expected: usize,
    },
    #[error("map does not lie in the hom space")]
    NotInHomSpace,
}

/// q = z0 z1 + z2 z3 + z4^2, full rank 5 in odd characteristic.
pub fn quadric_poly(ctx: &RingContext) -> Poly {
    Poly::from_terms(
        vec![
            (1, Monomial::var(0).mul(&Monomial::var(1))),
            (1, Monomial::var(2).mul(&Monomial::var(3))),
            (1, Monomial::var(4).mul(&Monomial::var(4))),
        ],
        ctx,
    )
}

/// Gram matrix of q (so 2 q = z^T G z with G symmetric).
pub fn gram_matrix(field: &PrimeField) -> MatrixGF {
    let mut g = MatrixGF::zeros(5, 5);
    g.set(0, 1, 1);
    g.set(1, 0, 1);
    g.set(2, 3, 1);
    g.set(3, 2, 1);
    g.set(4, 4, field.reduce_i64(2));
    g
}

/// Base ring plus the quadric and its (one element) Groebner basis.
#[derive(Debug, Clone)]
pub struct QuadricContext {
    pub ctx: RingContext,
    pub q: Poly,
    pub q_gb: GroebnerBasis,
}

impl QuadricContext {
    pub fn new(field: PrimeField) -> Self {
        let ctx = RingContext::base(field);
        let q = quadric_poly(&ctx);
        assert_eq!(gram_matrix(&field).rank(&field), 5);
        let q_gb = buchberger(&[q.clone()], &ctx);
        QuadricContext { ctx, q, q_gb }
    }

    /// Monomials of degree d not divisible by the leading term z0 z1 of q:
    /// a basis of the degree-d part of the coordinate ring of Q.
    pub fn nf_monomials(&self, d: u16) -> Vec<Monomial> {
        let lt = self.q.lt_monomial().unwrap();
        self.ctx
            .monomials_of_degree(d)
            .into_iter()
            .filter(|m| !lt.divides(m))
            .collect()
    }

    /// Random form of degree d in normal-form basis modulo q.
    pub fn random_form_on_q(&self, d: u16, rng: &mut ChaCha8Rng) -> Poly {
        use rand::Rng;
        let terms = self
            .nf_monomials(d)
            .into_iter()
            .map(|m| (rng.gen_range(0..self.ctx.field.p), m))
            .collect();
        Poly::from_terms(terms, &self.ctx)
    }
}

/// The Clifford matrix factorization of q: a 4 x 4 matrix of linear forms
/// with Gamma(z)^2 = q(z) I, Gamma(z)^T = Gamma(z1, z0, z3, z2, z4) and
/// det Gamma = q^2. Its cokernel is the spinor module.
pub fn clifford_gamma(ctx: &RingContext) -> Vec<Vec<Poly>> {
    let f = &ctx.field;
    let z = |i: usize| Poly::var(i);
    let neg = |p: Poly| p.scale(f.neg(1), ctx);
    vec![
        vec![z(4), z(2), z(0), Poly::zero()],
        vec![z(3), neg(z(4)), Poly::zero(), z(0)],
        vec![z(1), Poly::zero(), neg(z(4)), neg(z(2))],
        vec![Poly::zero(), z(1), neg(z(3)), z(4)],
    ]
}

// ---------------------------------------------------------------------------
// polynomial matrix helpers
// ---------------------------------------------------------------------------

pub fn poly_mat_mul(a: &[Vec<Poly>], b: &[Vec<Poly>], ctx: &RingContext) -> Vec<Vec<Poly>> {
    let n = a.len();
    let k = if n == 0 { 0 } else { a[0].len() };
    let m = if b.is_empty() { 0 } else { b[0].len() };
    assert_eq!(k, b.len());
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = Poly::zero();
                    for l in 0..k {
                        if !a[i][l].is_zero() && !b[l][j].is_zero() {
                            acc = acc.add(&a[i][l].mul(&b[l][j], ctx), ctx);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn poly_mat_transpose(a: &[Vec<Poly>]) -> Vec<Vec<Poly>> {
    let n = a.len();
    let m = if n == 0 { 0 } else { a[0].len() };
    (0..m)
        .map(|j| (0..n).map(|i| a[i][j].clone()).collect())
        .collect()
}

pub fn poly_mat_add(a: &[Vec<Poly>], b: &[Vec<Poly>], ctx: &RingContext) -> Vec<Vec<Poly>> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.add(y, ctx)).collect())
        .collect()
}

pub fn poly_mat_scale(a: &[Vec<Poly>], c: Fe, ctx: &RingContext) -> Vec<Vec<Poly>> {
    a.iter()
        .map(|r| r.iter().map(|x| x.scale(c, ctx)).collect())
        .collect()
}

fn scalar_to_poly_mat(m: &MatrixGF) -> Vec<Vec<Poly>> {
    (0..m.rows)
        .map(|i| (0..m.cols).map(|j| Poly::constant(m.get(i, j))).collect())
        .collect()
}

pub fn poly_mat_is_zero(a: &[Vec<Poly>]) -> bool {
    a.iter().all(|r| r.iter().all(|p| p.is_zero()))
}

// ---------------------------------------------------------------------------
// presentations
// ---------------------------------------------------------------------------

/// Building blocks of the bundles we use: line twists O(k) and spinor
/// twists S(k), normalized so that the degree-n graded piece of the module
/// of sections has dimension h^0 of the (k+n)-th twist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Atom {
    Line { k: i64 },
    Spinor { k: i64 },
}

impl Atom {
    pub fn gen_count(&self) -> usize {
        match self {
            Atom::Line { .. } => 1,
            Atom::Spinor { .. } => 4,
        }
    }

    /// Degree in which the generators sit: O(k) is generated by one element
    /// of degree -k, S(k) by four of degree 1-k.
    pub fn gen_deg(&self) -> i64 {
        match self {
            Atom::Line { k } => -k,
            Atom::Spinor { k } => 1 - k,
        }
    }

    /// Relations: the q column for a line twist, the Gamma block for a
    /// spinor twist.
    pub fn rel_deg(&self) -> i64 {
        match self {
            Atom::Line { .. } => self.gen_deg() + 2,
            Atom::Spinor { .. } => self.gen_deg() + 1,
        }
    }

    pub fn rank(&self) -> i64 {
        match self {
            Atom::Line { .. } => 1,
            Atom::Spinor { .. } => 2,
        }
    }

    /// The atom presenting the dual twisted by O(t): O(k)* = O(-k) and
    /// S(k)* = S(1-k).
    pub fn dual_twist(&self, t: i64) -> Atom {
        match self {
            Atom::Line { k } => Atom::Line { k: -k + t },
            Atom::Spinor { k } => Atom::Spinor { k: 1 - k + t },
        }
    }
}

/// Finite presentation of a direct sum of atoms: the module of sections is
/// the cokernel of `rels` (rows = generators, columns = relations). For
/// spinor atoms the relation block is Gamma, so q annihilates automatically;
/// line atoms carry an explicit q column.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub atoms: Vec<Atom>,
    pub gen_degs: Vec<i64>,
    pub rel_degs: Vec<i64>,
    /// rels[i][j] = coefficient of generator i in relation j
    pub rels: Vec<Vec<Poly>>,
}

impl Presentation {
    pub fn from_atoms(atoms: &[Atom], ctx: &RingContext) -> Self {
        let gamma = clifford_gamma(ctx);
        let q = quadric_poly(ctx);
        let total_gens: usize = atoms.iter().map(|a| a.gen_count()).sum();
        let total_rels = total_gens; // 1 q-column or 4 Gamma columns per atom
        let mut gen_degs = Vec::with_capacity(total_gens);
        let mut rel_degs = Vec::with_capacity(total_rels);
        let mut rels = vec![vec![Poly::zero(); total_rels]; total_gens];
        let mut off = 0usize;
        for a in atoms {
            match a {
                Atom::Line { .. } => {
                    gen_degs.push(a.gen_deg());
                    rel_degs.push(a.rel_deg());
                    rels[off][off] = q.clone();
                    off += 1;
                }
                Atom::Spinor { .. } => {
                    for _ in 0..4 {
                        gen_degs.push(a.gen_deg());
                        rel_degs.push(a.rel_deg());
                    }
                    for r in 0..4 {
                        for c in 0..4 {
                            rels[off + r][off + c] = gamma[r][c].clone();
                        }
                    }
                    off += 4;
                }
            }
        }
        Presentation {
            atoms: atoms.to_vec(),
            gen_degs,
            rel_degs,
            rels,
        }
    }

    pub fn gens(&self) -> usize {
        self.gen_degs.len()
    }

    pub fn rels_count(&self) -> usize {
        self.rel_degs.len()
    }

    /// Dimension of the degree-n graded piece of the cokernel, by the rank
    /// of the relation multiples inside the free graded piece.
    pub fn section_dim(&self, n: i64, ctx: &RingContext) -> usize {
        let free_blocks: Vec<Vec<Monomial>> = self
            .gen_degs
            .iter()
            .map(|&d| {
                if n - d < 0 {
                    Vec::new()
                } else {
                    ctx.monomials_of_degree((n - d) as u16)
                }
            })
            .collect();
        let offsets: Vec<usize> = free_blocks
            .iter()
            .scan(0usize, |acc, b| {
                let o = *acc;
                *acc += b.len();
                Some(o)
            })
            .collect();
        let total: usize = free_blocks.iter().map(|b| b.len()).sum();
        if total == 0 {
            return 0;
        }
        let col_index: Vec<std::collections::HashMap<Monomial, usize>> = free_blocks
            .iter()
            .map(|b| b.iter().enumerate().map(|(i, &m)| (m, i)).collect())
            .collect();
        let mut rows: Vec<Vec<Fe>> = Vec::new();
        for j in 0..self.rels_count() {
            let rd = self.rel_degs[j];
            if n - rd < 0 {
                continue;
            }
            for m in ctx.monomials_of_degree((n - rd) as u16) {
                let mut row = vec![0 as Fe; total];
                for i in 0..self.gens() {
                    let entry = &self.rels[i][j];
                    if entry.is_zero() {
                        continue;
                    }
                    let prod = entry.mul_term(1, &m, ctx);
                    for (c, mm) in &prod.terms {
                        row[offsets[i] + col_index[i][mm]] = *c;
                    }
                }
                rows.push(row);
            }
        }
        if rows.is_empty() {
            return total;
        }
        total - MatrixGF::from_rows(rows).rank(&ctx.field)
    }
}

// ---------------------------------------------------------------------------
// hom spaces
// ---------------------------------------------------------------------------

/// Morphism between presented modules: u acts on generators, v on
/// relations, with u . R_src = R_tgt . v exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MfMap {
    pub u: Vec<Vec<Poly>>,
    pub v: Vec<Vec<Poly>>,
}

struct EntryLayout {
    row: usize,
    col: usize,
    monos: Vec<Monomial>,
    offset: usize,
}

/// Space of degree-0 module homomorphisms src -> tgt, as a quotient of the
/// solution space of u . R_src = R_tgt . v by the null-homotopies
/// (R_tgt . w, w . R_src). Basis representatives are canonical (reduced row
/// echelon over the coefficient coordinates).
pub struct HomSpace {
    pub src: Presentation,
    pub tgt: Presentation,
    pub dim: usize,
    pub basis: Vec<MfMap>,
    layout_u: Vec<EntryLayout>,
    layout_v: Vec<EntryLayout>,
    coeff_len: usize,
    homotopy_rows: MatrixGF,
    homotopy_pivots: Vec<usize>,
    basis_rows: MatrixGF,
    basis_pivots: Vec<usize>,
}

fn build_layout(
    row_degs: &[i64],
    col_degs: &[i64],
    ctx: &RingContext,
    start: usize,
) -> (Vec<EntryLayout>, usize) {
    let mut out = Vec::new();
    let mut off = start;
    for (i, &rd) in row_degs.iter().enumerate() {
        for (j, &cd) in col_degs.iter().enumerate() {
            let d = cd - rd;
            if d < 0 {
                continue;
            }
            let monos = ctx.monomials_of_degree(d as u16);
            let len = monos.len();
            out.push(EntryLayout {
                row: i,
                col: j,
                monos,
                offset: off,
            });
            off += len;
        }
    }
    (out, off)
}

fn flatten_mat(
    mat: &[Vec<Poly>],
    layout: &[EntryLayout],
    vec: &mut [Fe],
) -> Result<(), QuadricError> {
    // every nonzero entry must be covered by the layout with exact monomial
    // support
    let mut covered = vec![vec![false; mat[0].len()]; mat.len()];
    for e in layout {
        covered[e.row][e.col] = true;
        let p = &mat[e.row][e.col];
        for (c, m) in &p.terms {
            match e.monos.iter().position(|mm| mm == m) {
                Some(k) => vec[e.offset + k] = *c,
                None => return Err(QuadricError::NotInHomSpace),
            }
        }
    }
    for (i, row) in mat.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            if !p.is_zero() && !covered[i][j] {
                return Err(QuadricError::NotInHomSpace);
            }
        }
    }
    Ok(())
}

fn unflatten(
    vec: &[Fe],
    layout: &[EntryLayout],
    rows: usize,
    cols: usize,
    ctx: &RingContext,
) -> Vec<Vec<Poly>> {
    let mut out = vec![vec![Poly::zero(); cols]; rows];
    for e in layout {
        let terms: Vec<(Fe, Monomial)> = e
            .monos
            .iter()
            .enumerate()
            .map(|(k, &m)| (vec[e.offset + k], m))
            .filter(|(c, _)| *c != 0)
            .collect();
        out[e.row][e.col] = Poly::from_terms(terms, ctx);
    }
    out
}

/// Reduce `v` in place against rref rows with the given pivot columns;
/// returns the elimination coefficients.
fn reduce_against(v: &mut [Fe], rows: &MatrixGF, pivots: &[usize], f: &PrimeField) -> Vec<Fe> {
    let mut coeffs = Vec::with_capacity(pivots.len());
    for (r, &p) in pivots.iter().enumerate() {
        let c = v[p];
        coeffs.push(c);
        if c != 0 {
            for j in 0..rows.cols {
                let x = rows.get(r, j);
                if x != 0 {
                    v[j] = f.sub(v[j], f.mul(c, x));
                }
            }
        }
    }
    coeffs
}

pub fn hom_space(src: &Presentation, tgt: &Presentation, ctx: &RingContext) -> HomSpace {
    let f = &ctx.field;
    let (layout_u, after_u) = build_layout(&tgt.gen_degs, &src.gen_degs, ctx, 0);
    let (layout_v, coeff_len) = build_layout(&tgt.rel_degs, &src.rel_degs, ctx, after_u);

    // linear system: coefficients of u . R_src - R_tgt . v per (tgt gen i,
    // src rel j), expanded in monomials of degree rel_src[j] - gen_tgt[i]
    let mut eq_rows: Vec<Vec<Fe>> = Vec::new();
    let mut eq_index: std::collections::HashMap<(usize, usize, Monomial), usize> =
        std::collections::HashMap::new();
    let mut ensure_row = |i: usize,
                          j: usize,
                          m: Monomial,
                          eq_rows: &mut Vec<Vec<Fe>>,
                          coeff_len: usize|
     -> usize {
        *eq_index.entry((i, j, m)).or_insert_with(|| {
            eq_rows.push(vec![0 as Fe; coeff_len]);
            eq_rows.len() - 1
        })
    };
    // u part: u[i][k] contributes u[i][k] * R_src[k][j]
    for e in &layout_u {
        let (i, k) = (e.row, e.col);
        for (slot, &mono) in e.monos.iter().enumerate() {
            for j in 0..src.rels_count() {
                let r = &src.rels[k][j];
                if r.is_zero() {
                    continue;
                }
                let prod = r.mul_term(1, &mono, ctx);
                for (c, mm) in &prod.terms {
                    let row = ensure_row(i, j, *mm, &mut eq_rows, coeff_len);
                    eq_rows[row][e.offset + slot] = f.add(eq_rows[row][e.offset + slot], *c);
                }
            }
        }
    }
    // v part: -R_tgt[i][l] * v[l][j]
    for e in &layout_v {
        let (l, j) = (e.row, e.col);
        for (slot, &mono) in e.monos.iter().enumerate() {
            for i in 0..tgt.gens() {
                let r = &tgt.rels[i][l];
                if r.is_zero() {
                    continue;
                }
                let prod = r.mul_term(1, &mono, ctx);
                for (c, mm) in &prod.terms {
                    let row = ensure_row(i, j, *mm, &mut eq_rows, coeff_len);
                    eq_rows[row][e.offset + slot] = f.sub(eq_rows[row][e.offset + slot], *c);
                }
            }
        }
    }
    let kernel = if eq_rows.is_empty() {
        MatrixGF::identity(coeff_len)
    } else {
        let rows = MatrixGF::from_rows(eq_rows);
        let kb = rows.kernel_basis(f);
        if kb.is_empty() {
            MatrixGF::zeros(0, coeff_len)
        } else {
            MatrixGF::from_rows(kb)
        }
    };

    // homotopy subspace: (R_tgt . w, w . R_src) for w an arbitrary matrix
    // over generators-of-src x relations-of-tgt
    let mut hom_rows: Vec<Vec<Fe>> = Vec::new();
    for l in 0..tgt.rels_count() {
        for jg in 0..src.gens() {
            let d = src.gen_degs[jg] - tgt.rel_degs[l];
            if d < 0 {
                continue;
            }
            for mono in ctx.monomials_of_degree(d as u16) {
                // u' = R_tgt . (mono E_{l,jg}), v' = (mono E_{l,jg}) . R_src
                let mut vec = vec![0 as Fe; coeff_len];
                let mut ok = true;
                let mut u_mat = vec![vec![Poly::zero(); src.gens()]; tgt.gens()];
                for i in 0..tgt.gens() {
                    if !tgt.rels[i][l].is_zero() {
                        u_mat[i][jg] = tgt.rels[i][l].mul_term(1, &mono, ctx);
                    }
                }
                let mut v_mat = vec![vec![Poly::zero(); src.rels_count()]; tgt.rels_count()];
                for j in 0..src.rels_count() {
                    if !src.rels[jg][j].is_zero() {
                        v_mat[l][j] = src.rels[jg][j].mul_term(1, &mono, ctx);
                    }
                }
                if flatten_mat(&u_mat, &layout_u, &mut vec).is_err() {
                    ok = false;
                }
                if ok && flatten_mat(&v_mat, &layout_v, &mut vec).is_err() {
                    ok = false;
                }
                assert!(ok, "homotopy outside layout degrees");
                hom_rows.push(vec);
            }
        }
    }
    let (homotopy_rows, homotopy_pivots) = if hom_rows.is_empty() {
        (MatrixGF::zeros(0, coeff_len), Vec::new())
    } else {
        let (ech, piv) = MatrixGF::from_rows(hom_rows).rref(f);
        let nonzero: Vec<Vec<Fe>> = (0..piv.len()).map(|r| ech.row(r).to_vec()).collect();
        (
            if nonzero.is_empty() {
                MatrixGF::zeros(0, coeff_len)
            } else {
                MatrixGF::from_rows(nonzero)
            },
            piv,
        )
    };

    // reduce kernel vectors modulo homotopies, keep an rref basis
    let mut reduced: Vec<Vec<Fe>> = Vec::new();
    for r in 0..kernel.rows {
        let mut v = kernel.row(r).to_vec();
        reduce_against(&mut v, &homotopy_rows, &homotopy_pivots, f);
        if v.iter().any(|&c| c != 0) {
            reduced.push(v);
        }
    }
    let (basis_rows, basis_pivots) = if reduced.is_empty() {
        (MatrixGF::zeros(0, coeff_len), Vec::new())
    } else {
        let (ech, piv) = MatrixGF::from_rows(reduced).rref(f);
        let nonzero: Vec<Vec<Fe>> = (0..piv.len()).map(|r| ech.row(r).to_vec()).collect();
        (
            if nonzero.is_empty() {
                MatrixGF::zeros(0, coeff_len)
            } else {
                MatrixGF::from_rows(nonzero)
            },
            piv,
        )
    };

    let dim = basis_pivots.len();
    let basis: Vec<MfMap> = (0..dim)
        .map(|r| {
            let vec = basis_rows.row(r);
            MfMap {
                u: unflatten(vec, &layout_u, tgt.gens(), src.gens(), ctx),
                v: unflatten(vec, &layout_v, tgt.rels_count(), src.rels_count(), ctx),
            }
        })
        .collect();

    HomSpace {
        src: src.clone(),
        tgt: tgt.clone(),
        dim,
        basis,
        layout_u,
        layout_v,
        coeff_len,
        homotopy_rows,
        homotopy_pivots,
        basis_rows,
        basis_pivots,
    }
}

impl HomSpace {
    /// Linear combination of the basis.
    pub fn element(&self, coeffs: &[Fe], ctx: &RingContext) -> MfMap {
        assert_eq!(coeffs.len(), self.dim);
        let f = &ctx.field;
        let mut vec = vec![0 as Fe; self.coeff_len];
        for (k, &c) in coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let row = self.basis_rows.row(k);
            for j in 0..self.coeff_len {
                vec[j] = f.add(vec[j], f.mul(c, row[j]));
            }
        }
        MfMap {
            u: unflatten(&vec, &self.layout_u, self.tgt.gens(), self.src.gens(), ctx),
            v: unflatten(
                &vec,
                &self.layout_v,
                self.tgt.rels_count(),
                self.src.rels_count(),
                ctx,
            ),
        }
    }

    /// Coordinates of a morphism in the quotient basis (reduces modulo
    /// homotopies first). Errors when the map is not in the span.
    pub fn coords(&self, map: &MfMap, ctx: &RingContext) -> Result<Vec<Fe>, QuadricError> {
        let f = &ctx.field;
        let mut vec = vec![0 as Fe; self.coeff_len];
        flatten_mat(&map.u, &self.layout_u, &mut vec)?;
        flatten_mat(&map.v, &self.layout_v, &mut vec)?;
        reduce_against(&mut vec, &self.homotopy_rows, &self.homotopy_pivots, f);
        let coords = reduce_against(&mut vec, &self.basis_rows, &self.basis_pivots, f);
        if vec.iter().any(|&c| c != 0) {
            return Err(QuadricError::NotInHomSpace);
        }
        Ok(coords)
    }

    pub fn random_element(&self, rng: &mut ChaCha8Rng, ctx: &RingContext) -> MfMap {
        use rand::Rng;
        let coeffs: Vec<Fe> = (0..self.dim).map(|_| rng.gen_range(0..ctx.field.p)).collect();
        self.element(&coeffs, ctx)
    }

    /// Exactness check for a candidate morphism.
    pub fn is_morphism(&self, map: &MfMap, ctx: &RingContext) -> bool {
        let lhs = poly_mat_mul(&map.u, &self.src.rels, ctx);
        let rhs = poly_mat_mul(&self.tgt.rels, &map.v, ctx);
        lhs.iter()
            .zip(&rhs)
            .all(|(a, b)| a.iter().zip(b).all(|(x, y)| x == y))
    }
}

// ---------------------------------------------------------------------------
// duality
// ---------------------------------------------------------------------------

/// The matrix D with D Gamma(z) = Gamma(z)^T D for all z. It is
/// antisymmetric with D^2 = -I, unique up to scalar, normalized so the
/// first nonzero entry (row major) is 1. Conjugation by D identifies the
/// cokernel of Gamma^T with the cokernel of Gamma, which is how adjoints of
/// presentations become module maps again.
#[derive(Debug, Clone)]
pub struct DualityData {
    pub d: MatrixGF,
    pub d_inv: MatrixGF,
}

pub fn duality_data(ctx: &RingContext) -> DualityData {
    let f = &ctx.field;
    let gamma = clifford_gamma(ctx);
    // coefficient matrices of Gamma per variable
    let mut coeff = vec![MatrixGF::zeros(4, 4); BASE_VARS];
    for r in 0..4 {
        for c in 0..4 {
            for (cf, m) in &gamma[r][c].terms {
                let var = (0..BASE_VARS).find(|&v| m.e[v] == 1).unwrap();
                coeff[var].set(r, c, *cf);
            }
        }
    }
    // D . G_v - G_v^T . D = 0 for each variable: 5 * 16 equations in the 16
    // entries of D (row-major unknowns)
    let mut rows: Vec<Vec<Fe>> = Vec::new();
    for g in &coeff {
        let gt = g.transpose();
        for i in 0..4 {
            for j in 0..4 {
                let mut row = vec![0 as Fe; 16];
                // (D g)_{ij} = sum_k D_{ik} g_{kj}
                for k in 0..4 {
                    row[i * 4 + k] = f.add(row[i * 4 + k], g.get(k, j));
                }
                // -(g^T D)_{ij} = -sum_k g^T_{ik} D_{kj}
                for k in 0..4 {
                    row[k * 4 + j] = f.sub(row[k * 4 + j], gt.get(i, k));
                }
                rows.push(row);
            }
        }
    }
    let kernel = MatrixGF::from_rows(rows).kernel_basis(f);
    assert_eq!(kernel.len(), 1, "duality solution space must be a line");
    let mut vec = kernel[0].clone();
    let lead = vec.iter().copied().find(|&c| c != 0).unwrap();
    let inv = f.inv(lead).unwrap();
    for c in vec.iter_mut() {
        *c = f.mul(*c, inv);
    }
    let mut d = MatrixGF::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            d.set(i, j, vec[i * 4 + j]);
        }
    }
    // antisymmetry and D^2 = -I are forced; assert them as invariants
    let dt = d.transpose();
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(dt.get(i, j), f.neg(d.get(i, j)));
        }
    }
    let d2 = d.mul(&d, f);
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j { f.neg(1) } else { 0 };
            assert_eq!(d2.get(i, j), want);
        }
    }
    let d_inv = d.inverse(f).unwrap();
    DualityData { d, d_inv }
}

/// Block diagonal duality matrix over the atoms of a presentation: [1] per
/// line atom, D per spinor atom.
fn block_duality(atoms: &[Atom], dd: &DualityData, f: &PrimeField, invert_transpose: bool) -> MatrixGF {
    let n: usize = atoms.iter().map(|a| a.gen_count()).sum();
    let mut m = MatrixGF::zeros(n, n);
    let src = if invert_transpose {
        // (D^T)^{-1} = -D^{-1} for the antisymmetric D; computed honestly
        dd.d.transpose().inverse(f).unwrap()
    } else {
        dd.d.clone()
    };
    let mut off = 0usize;
    for a in atoms {
        match a {
            Atom::Line { .. } => {
                m.set(off, off, 1);
                off += 1;
            }
            Atom::Spinor { .. } => {
                for i in 0..4 {
                    for j in 0..4 {
                        m.set(off + i, off + j, src.get(i, j));
                    }
                }
                off += 4;
            }
        }
    }
    m
}

/// Adjoint of a morphism src -> tgt: a morphism dual(tgt) -> dual(src)
/// (duals presented by the standard atom presentations; the common twist is
/// implicit in the grading). Generator and relation roles swap:
/// u* = D_src v^T (D_tgt^T)^{-1} and v* = D_src u^T (D_tgt^T)^{-1}.
/// The transposed-inverse on the right is what makes the adjoint square to
/// the identity on every mixed block.
pub fn adjoint(map: &MfMap, src: &Presentation, tgt: &Presentation, dd: &DualityData, ctx: &RingContext) -> MfMap {
    let f = &ctx.field;
    let d_src = scalar_to_poly_mat(&block_duality(&src.atoms, dd, f, false));
    let d_tgt_ti = scalar_to_poly_mat(&block_duality(&tgt.atoms, dd, f, true));
    let u = poly_mat_mul(
        &poly_mat_mul(&d_src, &poly_mat_transpose(&map.v), ctx),
        &d_tgt_ti,
        ctx,
    );
    let v = poly_mat_mul(
        &poly_mat_mul(&d_src, &poly_mat_transpose(&map.u), ctx),
        &d_tgt_ti,
        ctx,
    );
    MfMap { u, v }
}

/// Matrix of the adjoint involution on a hom space whose source and target
/// are swapped duals of each other (so the adjoint lands back in the same
/// space).
pub fn involution_matrix(hs: &HomSpace, dd: &DualityData, ctx: &RingContext) -> MatrixGF {
    let mut cols: Vec<Vec<Fe>> = Vec::new();
    for b in &hs.basis {
        let adj = adjoint(b, &hs.src, &hs.tgt, dd, ctx);
        debug_assert!(hs.is_morphism(&adj, ctx));
        let coords = hs
            .coords(&adj, ctx)
            .expect("adjoint must stay inside the hom space");
        cols.push(coords);
    }
    let mut m = MatrixGF::zeros(hs.dim, hs.dim);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..hs.dim {
            m.set(i, j, col[i]);
        }
    }
    m
}

/// Coordinate basis of the self-adjoint subspace. The adjoint involution
/// splits the hom space into eigenspaces for +1 and -1; which of the two is
/// the symmetric square is decided by its dimension, which the caller
/// supplies from an independent cohomology count.
pub fn symmetric_subspace(
    hs: &HomSpace,
    dd: &DualityData,
    expected_dim: usize,
    ctx: &RingContext,
) -> Result<Vec<Vec<Fe>>, QuadricError> {
    let f = &ctx.field;
    let iota = involution_matrix(hs, dd, ctx);
    let eigen = |sign_plus: bool| -> Vec<Vec<Fe>> {
        let mut m = iota.clone();
        for i in 0..hs.dim {
            let d = m.get(i, i);
            let adj = if sign_plus { f.sub(d, 1) } else { f.add(d, 1) };
            m.set(i, i, adj);
        }
        m.kernel_basis(f)
    };
    let plus = eigen(true);
    if plus.len() == expected_dim {
        return Ok(plus);
    }
    let minus = eigen(false);
    if minus.len() == expected_dim {
        return Ok(minus);
    }
    Err(QuadricError::SymmetricDimension {
        found: plus.len(),
        complement: minus.len(),
        expected: expected_dim,
    })
}

/// Recompute the relation-level matrix v from the generator-level matrix u
/// via exact division: v = (B_tgt . u . R_src) / q, where B is the
/// complementary factor of the matrix factorization (Gamma for spinor
/// blocks, the identity for line blocks whose relation is q itself).
pub fn reconstruct_v(
    u: &[Vec<Poly>],
    src: &Presentation,
    tgt: &Presentation,
    ctx: &RingContext,
) -> Option<Vec<Vec<Poly>>> {
    let gamma = clifford_gamma(ctx);
    let mut b_tgt = vec![vec![Poly::zero(); tgt.gens()]; tgt.rels_count()];
    let mut off = 0usize;
    for a in &tgt.atoms {
        match a {
            Atom::Line { .. } => {
                b_tgt[off][off] = Poly::constant(1);
                off += 1;
            }
            Atom::Spinor { .. } => {
                for i in 0..4 {
                    for j in 0..4 {
                        b_tgt[off + i][off + j] = gamma[i][j].clone();
                    }
                }
                off += 4;
            }
        }
    }
    let q = quadric_poly(ctx);
    let prod = poly_mat_mul(&poly_mat_mul(&b_tgt, u, ctx), &src.rels, ctx);
    let mut v = vec![vec![Poly::zero(); src.rels_count()]; tgt.rels_count()];
    for i in 0..v.len() {
        for j in 0..v[0].len() {
            if prod[i][j].is_zero() {
                continue;
            }
            v[i][j] = prod[i][j].div_exact(&q, ctx)?;
        }
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::{minor_det, normal_form};
    use crate::polyring::{parse_poly, seeded_rng};

    fn field() -> PrimeField {
        PrimeField::new(31991).unwrap()
    }

    fn qctx() -> QuadricContext {
        QuadricContext::new(field())
    }

    fn p(s: &str, ctx: &RingContext) -> Poly {
        parse_poly(s, ctx).unwrap()
    }

    #[test]
    fn gamma_squares_to_q() {
        let qc = qctx();
        let g = clifford_gamma(&qc.ctx);
        let g2 = poly_mat_mul(&g, &g, &qc.ctx);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { qc.q.clone() } else { Poly::zero() };
                assert_eq!(g2[i][j], want, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn gamma_frozen_entries() {
        let qc = qctx();
        let c = &qc.ctx;
        let g = clifford_gamma(c);
        let rows = [
            ["z4", "z2", "z0", "0"],
            ["z3", "-z4", "0", "z0"],
            ["z1", "0", "-z4", "-z2"],
            ["0", "z1", "-z3", "z4"],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(g[i][j], p(rows[i][j], c));
            }
        }
    }

    #[test]
    fn gamma_transpose_is_variable_swap() {
        let qc = qctx();
        let c = &qc.ctx;
        let g = clifford_gamma(c);
        let gt = poly_mat_transpose(&g);
        // swap z0<->z1 and z2<->z3
        let swap = |f: &Poly| -> Poly {
            let terms = f
                .terms
                .iter()
                .map(|(cf, m)| {
                    let mut e = m.e;
                    e.swap(0, 1);
                    e.swap(2, 3);
                    (*cf, Monomial { e, deg: m.deg })
                })
                .collect();
            Poly::from_terms(terms, c)
        };
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(gt[i][j], swap(&g[i][j]), "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn gamma_determinant_is_q_squared() {
        let qc = qctx();
        let g = clifford_gamma(&qc.ctx);
        let det = minor_det(&g, &[0, 1, 2, 3], &[0, 1, 2, 3], &qc.ctx);
        assert_eq!(det, qc.q.mul(&qc.q, &qc.ctx));
    }

    #[test]
    fn gamma_has_rank_two_on_the_quadric() {
        let qc = qctx();
        let f = &qc.ctx.field;
        let g = clifford_gamma(&qc.ctx);
        // (1:0:0:0:0) lies on q
        let point = [1, 0, 0, 0, 0];
        assert_eq!(qc.q.eval(&point, &qc.ctx), 0);
        let mut m = MatrixGF::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                m.set(i, j, g[i][j].eval(&point, &qc.ctx));
            }
        }
        assert_eq!(m.rank(f), 2);
    }

    #[test]
    fn nf_monomial_counts_match_quadric_hilbert() {
        let qc = qctx();
        for d in 0..6u16 {
            let n = d as i64;
            let expect = crate::polyring::binom(n + 4, 4) - crate::polyring::binom(n + 2, 4);
            assert_eq!(qc.nf_monomials(d).len() as i64, expect, "degree {d}");
        }
        // and these really are normal forms modulo q
        for m in qc.nf_monomials(3) {
            let f = Poly::term(1, m);
            assert_eq!(normal_form(&f, &qc.q_gb.elems, &qc.ctx), f);
        }
    }

    #[test]
    fn section_dims_of_atoms() {
        let qc = qctx();
        let c = &qc.ctx;
        // h^0(O(n)) on Q
        let line = Presentation::from_atoms(&[Atom::Line { k: -1 }], c);
        let h0_o = |n: i64| {
            if n < 0 {
                0
            } else {
                crate::polyring::binom(n + 4, 4) - crate::polyring::binom(n + 2, 4)
            }
        };
        for n in 0..6i64 {
            assert_eq!(line.section_dim(n, c) as i64, h0_o(n - 1), "O(-1) at {n}");
        }
        // h^0(S(n)) = 2n(n+1)(n+2)/3 for n >= 0
        let h0_s = |n: i64| if n < 0 { 0 } else { 2 * n * (n + 1) * (n + 2) / 3 };
        let spin = Presentation::from_atoms(&[Atom::Spinor { k: -1 }], c);
        for n in 0..6i64 {
            assert_eq!(spin.section_dim(n, c) as i64, h0_s(n - 1), "S(-1) at {n}");
        }
        let spin3 = Presentation::from_atoms(&[Atom::Spinor { k: -3 }], c);
        for n in 0..8i64 {
            assert_eq!(spin3.section_dim(n, c) as i64, h0_s(n - 3), "S(-3) at {n}");
        }
        // direct sums add up
        let sum = Presentation::from_atoms(&[Atom::Line { k: -1 }, Atom::Spinor { k: -1 }], c);
        for n in 0..6i64 {
            assert_eq!(
                sum.section_dim(n, c),
                line.section_dim(n, c) + spin.section_dim(n, c)
            );
        }
    }

    #[test]
    fn hom_space_dimensions() {
        let qc = qctx();
        let c = &qc.ctx;
        let s_m1 = Presentation::from_atoms(&[Atom::Spinor { k: -1 }], c);
        let s_m2 = Presentation::from_atoms(&[Atom::Spinor { k: -2 }], c);
        let s_m3 = Presentation::from_atoms(&[Atom::Spinor { k: -3 }], c);
        let o_m1 = Presentation::from_atoms(&[Atom::Line { k: -1 }], c);
        let o_m3 = Presentation::from_atoms(&[Atom::Line { k: -3 }], c);
        assert_eq!(hom_space(&s_m2, &s_m1, c).dim, 15);
        assert_eq!(hom_space(&o_m3, &s_m1, c).dim, 16);
        assert_eq!(hom_space(&s_m3, &s_m1, c).dim, 49);
        assert_eq!(hom_space(&s_m2, &o_m1, c).dim, 16);
        assert_eq!(hom_space(&o_m3, &o_m1, c).dim, 14);
    }

    #[test]
    fn hom_basis_elements_are_morphisms() {
        let qc = qctx();
        let c = &qc.ctx;
        let s_m1 = Presentation::from_atoms(&[Atom::Spinor { k: -1 }], c);
        let s_m2 = Presentation::from_atoms(&[Atom::Spinor { k: -2 }], c);
        let hs = hom_space(&s_m2, &s_m1, c);
        for b in &hs.basis {
            assert!(hs.is_morphism(b, c));
        }
        // coordinates round trip
        let mut rng = seeded_rng(7);
        use rand::Rng;
        let coeffs: Vec<Fe> = (0..hs.dim).map(|_| rng.gen_range(0..c.field.p)).collect();
        let el = hs.element(&coeffs, c);
        assert!(hs.is_morphism(&el, c));
        assert_eq!(hs.coords(&el, c).unwrap(), coeffs);
    }

    #[test]
    fn duality_matrix_frozen() {
        let qc = qctx();
        let f = &qc.ctx.field;
        let dd = duality_data(&qc.ctx);
        let minus1 = f.neg(1);
        let want = [
            [0, 0, 0, 1],
            [0, 0, minus1, 0],
            [0, 1, 0, 0],
            [minus1, 0, 0, 0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(dd.d.get(i, j), want[i][j], "D[{i}][{j}]");
            }
        }
        // D Gamma = Gamma^T D as polynomial matrices
        let c = &qc.ctx;
        let g = clifford_gamma(c);
        let dp = scalar_to_poly_mat(&dd.d);
        let lhs = poly_mat_mul(&dp, &g, c);
        let rhs = poly_mat_mul(&poly_mat_transpose(&g), &dp, c);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn adjoint_is_an_involution() {
        let qc = qctx();
        let c = &qc.ctx;
        let dd = duality_data(c);
        // pure spinor case, self-paired space
        let s_m1 = Presentation::from_atoms(&[Atom::Spinor { k: -1 }], c);
        let s_m3 = Presentation::from_atoms(&[Atom::Spinor { k: -3 }], c);
        let hs = hom_space(&s_m3, &s_m1, c);
        assert_eq!(hs.dim, 49);
        let iota = involution_matrix(&hs, &dd, c);
        let sq = iota.mul(&iota, &c.field);
        assert_eq!(sq, MatrixGF::identity(hs.dim));
        // eigenspace dimensions 35 + 14
        let plus = symmetric_subspace(&hs, &dd, 35, c).unwrap();
        assert_eq!(plus.len(), 35);
        assert!(symmetric_subspace(&hs, &dd, 14, c).is_ok());
        assert!(symmetric_subspace(&hs, &dd, 20, c).is_err());
    }

    #[test]
    fn symmetric_dimensions_across_spaces() {
        let qc = qctx();
        let c = &qc.ctx;
        let dd = duality_data(c);
        // Hom(S(-2), S(-1)): 15 = 10 + 5
        let s_m1 = Presentation::from_atoms(&[Atom::Spinor { k: -1 }], c);
        let s_m2 = Presentation::from_atoms(&[Atom::Spinor { k: -2 }], c);
        let hs = hom_space(&s_m2, &s_m1, c);
        assert_eq!(hs.dim, 15);
        assert_eq!(symmetric_subspace(&hs, &dd, 10, c).unwrap().len(), 10);

        // mixed atoms: E = O(-1) + S(-1), t = -4; full hom 61 = 40 + 21
        let e = Presentation::from_atoms(&[Atom::Line { k: -1 }, Atom::Spinor { k: -1 }], c);
        let e_dual: Vec<Atom> = e.atoms.iter().map(|a| a.dual_twist(-4)).collect();
        assert_eq!(e_dual, vec![Atom::Line { k: -3 }, Atom::Spinor { k: -2 }]);
        let src = Presentation::from_atoms(&e_dual, c);
        let hs2 = hom_space(&src, &e, c);
        assert_eq!(hs2.dim, 61);
        let iota = involution_matrix(&hs2, &dd, c);
        assert_eq!(iota.mul(&iota, &c.field), MatrixGF::identity(hs2.dim));
        assert_eq!(symmetric_subspace(&hs2, &dd, 40, c).unwrap().len(), 40);

        // line atoms only: O1 shape, E = O(-1) + O(-2), t = -5; 63 = 49 + 14
        let e1 = Presentation::from_atoms(&[Atom::Line { k: -1 }, Atom::Line { k: -2 }], c);
        let e1_dual: Vec<Atom> = e1.atoms.iter().map(|a| a.dual_twist(-5)).collect();
        let src1 = Presentation::from_atoms(&e1_dual, c);
        let hs3 = hom_space(&src1, &e1, c);
        assert_eq!(hs3.dim, 63);
        assert_eq!(symmetric_subspace(&hs3, &dd, 49, c).unwrap().len(), 49);
    }

    #[test]
    fn v_reconstruction_from_u() {
        let qc = qctx();
        let c = &qc.ctx;
        let s_m1 = Presentation::from_atoms(&[Atom::Spinor { k: -1 }], c);
        let s_m3 = Presentation::from_atoms(&[Atom::Spinor { k: -3 }], c);
        let hs = hom_space(&s_m3, &s_m1, c);
        let mut rng = seeded_rng(23);
        let el = hs.random_element(&mut rng, c);
        let v = reconstruct_v(&el.u, &s_m3, &s_m1, c).unwrap();
        // reconstructed v must satisfy the same intertwining relation
        let cand = MfMap { u: el.u.clone(), v };
        assert!(hs.is_morphism(&cand, c));
        // mixed-atom version
        let e = Presentation::from_atoms(&[Atom::Line { k: -1 }, Atom::Spinor { k: -1 }], c);
        let src = Presentation::from_atoms(
            &e.atoms.iter().map(|a| a.dual_twist(-4)).collect::<Vec<_>>(),
            c,
        );
        let hs2 = hom_space(&src, &e, c);
        let el2 = hs2.random_element(&mut rng, c);
        let v2 = reconstruct_v(&el2.u, &src, &e, c).unwrap();
        let cand2 = MfMap { u: el2.u.clone(), v: v2 };
        assert!(hs2.is_morphism(&cand2, c));
    }

    #[test]
    fn symmetric_elements_are_fixed_by_adjoint() {
        let qc = qctx();
        let c = &qc.ctx;
        let dd = duality_data(c);
        let s_m1 = Presentation::from_atoms(&[Atom::Spinor { k: -1 }], c);
        let s_m3 = Presentation::from_atoms(&[Atom::Spinor { k: -3 }], c);
        let hs = hom_space(&s_m3, &s_m1, c);
        let sym = symmetric_subspace(&hs, &dd, 35, c).unwrap();
        let mut rng = seeded_rng(99);
        use rand::Rng;
        let f = &c.field;
        // random combination of the symmetric basis
        let mut coords = vec![0 as Fe; hs.dim];
        for b in &sym {
            let cf: Fe = rng.gen_range(0..f.p);
            for (i, &x) in b.iter().enumerate() {
                coords[i] = f.add(coords[i], f.mul(cf, x));
            }
        }
        let el = hs.element(&coords, c);
        let adj = adjoint(&el, &hs.src, &hs.tgt, &dd, c);
        assert_eq!(hs.coords(&adj, c).unwrap(), coords);
    }
}
