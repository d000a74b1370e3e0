//! The determinantal construction. A symmetric map Phi from E^dual(-4-delta)
//! to E over the quadric threefold cuts out the quartic surface
//! B = {det Phi = 0}, and the locus where Phi drops rank by two is an even
//! set of nodes w on B. Six bundles E produce the six families; everything
//! here is sampled, assembled and extracted in exact F_p arithmetic.
//!
//! The quartic itself and the even set both come out of the presentation
//! matrix [R | U] of coker Phi: the quartic from the degree-4 piece of the
//! annihilator of the cokernel, the even set from the annihilator of its
//! exterior square. Line-bundle-only families shortcut the quartic to det U.

use crate::cohomology::{self, ChiSpec, DefectInterval, SheafSym};
use crate::gfp::{Fe, MatrixGF, PrimeField};
use crate::groebner::{
    minor_det, normal_form, saturate_irrelevant, GroebnerBasis, GroebnerError,
};
use crate::polyring::{
    derive_seed, dim_forms, format_poly, parse_poly, seeded_rng, Monomial, MonomialOrder, Poly,
    RingContext,
};
use crate::quadric::{
    duality_data, hom_space, reconstruct_v, symmetric_subspace, Atom, DualityData, HomSpace,
    MfMap, Presentation, QuadricContext, QuadricError,
};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BarthError {
    #[error("degenerate section: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Hom(#[from] QuadricError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error("bad section document: {0}")]
    Document(String),
}

// ---------------------------------------------------------------------------
// the six families
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    E1,
    E2,
    E3,
    O1,
    O2,
    O3,
}

impl Family {
    pub fn all() -> [Family; 6] {
        [
            Family::E1,
            Family::E2,
            Family::E3,
            Family::O1,
            Family::O2,
            Family::O3,
        ]
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Family::E1 => "E1",
            Family::E2 => "E2",
            Family::E3 => "E3",
            Family::O1 => "O1",
            Family::O2 => "O2",
            Family::O3 => "O3",
        }
    }

    pub fn index(&self) -> u64 {
        match self {
            Family::E1 => 0,
            Family::E2 => 1,
            Family::E3 => 2,
            Family::O1 => 3,
            Family::O2 => 4,
            Family::O3 => 5,
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "E1" => Ok(Family::E1),
            "E2" => Ok(Family::E2),
            "E3" => Ok(Family::E3),
            "O1" => Ok(Family::O1),
            "O2" => Ok(Family::O2),
            "O3" => Ok(Family::O3),
            other => Err(format!("unknown family tag {other:?}")),
        }
    }
}

/// Static data of one family: the bundle E, the parity delta of the even
/// set, and the generic node count and defect the construction must hit.
#[derive(Debug, Clone)]
pub struct FamilySpec {
    pub family: Family,
    pub delta: i64,
    pub bundle: Vec<Atom>,
    pub expected_nodes: i64,
    pub expected_defect: i64,
}

impl FamilySpec {
    pub fn of(family: Family) -> FamilySpec {
        let (delta, bundle, nodes, defect) = match family {
            Family::E1 => (
                0,
                vec![
                    Atom::Line { k: -1 },
                    Atom::Line { k: -1 },
                    Atom::Line { k: -2 },
                ],
                16,
                1,
            ),
            Family::E2 => (0, vec![Atom::Line { k: -1 }, Atom::Spinor { k: -1 }], 20, 0),
            Family::E3 => (
                0,
                vec![Atom::Spinor { k: -1 }, Atom::Spinor { k: -1 }],
                24,
                0,
            ),
            Family::O1 => (1, vec![Atom::Line { k: -1 }, Atom::Line { k: -2 }], 12, 1),
            Family::O2 => (1, vec![Atom::Line { k: -2 }; 4], 20, 0),
            Family::O3 => (1, vec![Atom::Spinor { k: -1 }], 20, 1),
        };
        FamilySpec {
            family,
            delta,
            bundle,
            expected_nodes: nodes,
            expected_defect: defect,
        }
    }

    pub fn all() -> Vec<FamilySpec> {
        Family::all().iter().map(|f| FamilySpec::of(*f)).collect()
    }

    pub fn chi_spec(&self) -> ChiSpec {
        ChiSpec::new(self.delta, self.expected_nodes)
            .expect("family node counts satisfy the parity constraints")
    }

    /// Atoms presenting the source E^dual(-4-delta) of the symmetric map.
    pub fn source_atoms(&self) -> Vec<Atom> {
        self.bundle
            .iter()
            .map(|a| a.dual_twist(-4 - self.delta))
            .collect()
    }

    pub fn has_spinor(&self) -> bool {
        self.bundle.iter().any(|a| matches!(a, Atom::Spinor { .. }))
    }

    /// Dimension of the symmetric section space H^0(S^2 E(4 + delta)).
    pub fn symmetric_dim(&self) -> i64 {
        cohomology::bundle_sym2(&self.bundle)
            .twist(4 + self.delta)
            .h(0)
    }

    /// Dimension of the full space Hom(E^dual(-4-delta), E).
    pub fn hom_dim(&self) -> i64 {
        let e = SheafSym::from_bundle(&self.bundle);
        e.tensor(&e).twist(4 + self.delta).h(0)
    }

    /// Defect forced by the resolution route.
    pub fn predicted_defect(&self) -> DefectInterval {
        cohomology::predicted_defect(&self.bundle, self.chi_spec())
    }
}

// ---------------------------------------------------------------------------
// sampling symmetric sections
// ---------------------------------------------------------------------------

/// Per-family sampling machinery: the hom space between the two presented
/// bundles and a basis of its symmetric (adjoint-fixed) part. Building this
/// is the expensive step, so it is kept and reused across seeds.
pub struct SectionSampler {
    pub spec: FamilySpec,
    pub src: Presentation,
    pub tgt: Presentation,
    pub hom: HomSpace,
    pub dd: DualityData,
    sym_basis: Vec<Vec<Fe>>,
}

impl SectionSampler {
    pub fn new(qc: &QuadricContext, family: Family) -> Result<SectionSampler, BarthError> {
        let ctx = &qc.ctx;
        let spec = FamilySpec::of(family);
        let src = Presentation::from_atoms(&spec.source_atoms(), ctx);
        let tgt = Presentation::from_atoms(&spec.bundle, ctx);
        let hom = hom_space(&src, &tgt, ctx);
        if hom.dim as i64 != spec.hom_dim() {
            return Err(BarthError::Degenerate(format!(
                "hom space dimension {} does not match the cohomology count {}",
                hom.dim,
                spec.hom_dim()
            )));
        }
        let dd = duality_data(ctx);
        let sym_basis = symmetric_subspace(&hom, &dd, spec.symmetric_dim() as usize, ctx)?;
        Ok(SectionSampler {
            spec,
            src,
            tgt,
            hom,
            dd,
            sym_basis,
        })
    }

    pub fn symmetric_dim(&self) -> usize {
        self.sym_basis.len()
    }

    /// Random symmetric section, deterministic in (family, seed).
    pub fn sample(&self, qc: &QuadricContext, seed: u64) -> MfMap {
        let ctx = &qc.ctx;
        let f = &ctx.field;
        let mut rng = seeded_rng(derive_seed(
            derive_seed(seed, self.spec.family.index()),
            LABEL_SAMPLE,
        ));
        let mut coords = vec![0 as Fe; self.hom.dim];
        for b in &self.sym_basis {
            let lam = rng.gen_range(0..f.p);
            for (c, &bi) in coords.iter_mut().zip(b.iter()) {
                *c = f.add(*c, f.mul(lam, bi));
            }
        }
        let map = self.hom.element(&coords, ctx);
        debug_assert!(self.hom.is_morphism(&map, ctx));
        map
    }

    /// Full pipeline for one seed: sample, then extract the quartic. Fails
    /// with Degenerate when the sampled section is too special.
    pub fn generate(&self, qc: &QuadricContext, seed: u64) -> Result<BarthSection, BarthError> {
        let map = self.sample(qc, seed);
        let f = extract_quartic(qc, &self.spec, &self.tgt, &map.u)?;
        Ok(BarthSection {
            family: self.spec.family,
            prime: qc.ctx.field.p,
            seed,
            map,
            f,
        })
    }
}

const LABEL_SAMPLE: u64 = 11;
const LABEL_SATURATE: u64 = 14;

// ---------------------------------------------------------------------------
// presentation of coker Phi and the extraction of B and w
// ---------------------------------------------------------------------------

/// Presentation matrix [R | U] of coker Phi as a graded module: relation
/// columns of the target bundle followed by the columns of U.
pub fn presentation_matrix(tgt: &Presentation, u: &[Vec<Poly>]) -> Vec<Vec<Poly>> {
    tgt.rels
        .iter()
        .zip(u.iter())
        .map(|(r, urow)| r.iter().chain(urow.iter()).cloned().collect())
        .collect()
}

/// Column degrees of [R | U]: entry (i, j) is homogeneous of degree
/// col_deg(j) - gen_deg(i).
pub fn presentation_col_degs(src: &Presentation, tgt: &Presentation) -> Vec<i64> {
    tgt.rel_degs
        .iter()
        .chain(src.gen_degs.iter())
        .copied()
        .collect()
}

/// Hilbert function of the presented module coker [R | U] in degree n,
/// computed as generators minus the rank of the relation block on graded
/// pieces. For n past the regularity this equals chi of the even-set sheaf.
pub fn coker_graded_dim(
    pres: &[Vec<Poly>],
    row_degs: &[i64],
    col_degs: &[i64],
    n: i64,
    ctx: &RingContext,
) -> i64 {
    let nv = ctx.nvars;
    let mut row_offsets = Vec::with_capacity(row_degs.len());
    let mut total = 0i64;
    let mut row_monos = Vec::with_capacity(row_degs.len());
    for &rd in row_degs {
        row_offsets.push(total);
        let d = n - rd;
        let monos = if d >= 0 {
            ctx.monomials_of_degree(d as u16)
        } else {
            Vec::new()
        };
        total += monos.len() as i64;
        row_monos.push(monos);
    }
    debug_assert_eq!(
        total,
        row_degs.iter().map(|&rd| dim_forms(nv, n - rd)).sum::<i64>()
    );

    let mut columns: Vec<Vec<Fe>> = Vec::new();
    for (j, &cd) in col_degs.iter().enumerate() {
        let d = n - cd;
        if d < 0 {
            continue;
        }
        for m in ctx.monomials_of_degree(d as u16) {
            let mut vec = vec![0 as Fe; total as usize];
            for (i, row) in pres.iter().enumerate() {
                let entry = row[j].mul_term(1, &m, ctx);
                if entry.is_zero() {
                    continue;
                }
                let base = row_offsets[i] as usize;
                let monos = &row_monos[i];
                for (c, mono) in &entry.terms {
                    let pos = monos
                        .iter()
                        .position(|x| x == mono)
                        .expect("graded entry lands in the row basis");
                    vec[base + pos] = *c;
                }
            }
            columns.push(vec);
        }
    }
    if columns.is_empty() {
        return total;
    }
    let rows = columns.len();
    let cols = total as usize;
    let mut m = crate::gfp::MatrixGF::zeros(rows, cols);
    for (i, col) in columns.iter().enumerate() {
        for (j, &x) in col.iter().enumerate() {
            if x != 0 {
                m.set(i, j, x);
            }
        }
    }
    total - m.rank(&ctx.field) as i64
}

// ---------------------------------------------------------------------------
// annihilator pieces of the cokernel and its exterior square
// ---------------------------------------------------------------------------
//
// Spinor families have far too many minors, of far too high degree, to push
// through Buchberger and saturation directly, and the low-degree graded
// pieces of the minor ideals themselves fall short of their saturation. The
// module side has neither problem: both loci are annihilator supports,
//
//   B = supp(coker [R | U])          so f spans ann_4 mod q * (quadrics),
//   w = supp(Lambda^2 coker [R | U])  with the ODP-reduced scheme structure,
//
// and an annihilator piece { g : g * e_i in im [R | U] for all generators }
// is one kernel computation on graded pieces. These are honest annihilator
// pieces (the e_i generate), so every element vanishes on the support; the
// downstream dimension and cross-route checks reject any shortfall.

/// Row space of value vectors under incremental forward elimination. Every
/// stored row is zero on the pivots of earlier rows, so reduction against a
/// frozen span is a linear map and a zero residual certifies membership.
struct ValueSpan {
    field: PrimeField,
    width: usize,
    rows: Vec<Vec<Fe>>,
    pivots: Vec<usize>,
}

impl ValueSpan {
    fn new(field: PrimeField, width: usize) -> ValueSpan {
        ValueSpan {
            field,
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn eliminate(&self, row: &mut [Fe]) {
        for (r, &pv) in self.rows.iter().zip(&self.pivots) {
            let c = row[pv];
            if c == 0 {
                continue;
            }
            for (x, &y) in row.iter_mut().zip(r.iter()) {
                *x = self.field.sub(*x, self.field.mul(c, y));
            }
        }
    }

    fn insert(&mut self, mut row: Vec<Fe>) -> bool {
        self.eliminate(&mut row);
        let Some(pv) = row.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = self
            .field
            .inv(row[pv])
            .expect("leading entry of a nonzero row");
        for x in row.iter_mut() {
            *x = self.field.mul(*x, inv);
        }
        self.rows.push(row);
        self.pivots.push(pv);
        true
    }

    /// Residual of `row` on the given coordinates after elimination. The
    /// eliminated row vanishes on all pivot positions, so the residual on
    /// the non-pivots is zero exactly when `row` lies in the span.
    fn residual(&self, mut row: Vec<Fe>, keep: &[usize]) -> Vec<Fe> {
        self.eliminate(&mut row);
        keep.iter().map(|&i| row[i]).collect()
    }

    fn non_pivots(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.width];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.width).filter(|&i| !is_pivot[i]).collect()
    }
}

/// Keep only the candidates independent from the degree-`deg` span of the
/// already-kept generators, in coefficient space.
fn prune_generators(candidates: Vec<Poly>, lower: &[Poly], deg: i64, ctx: &RingContext) -> Vec<Poly> {
    let monos = ctx.monomials_of_degree(deg as u16);
    let index: std::collections::HashMap<&Monomial, usize> =
        monos.iter().zip(0..).collect();
    let coeff_row = |f: &Poly| {
        let mut row = vec![0 as Fe; monos.len()];
        for (c, m) in &f.terms {
            row[index[m]] = *c;
        }
        row
    };
    let mut span = ValueSpan::new(ctx.field, monos.len());
    for l in lower {
        let e = l.degree() as i64;
        if e > deg {
            continue;
        }
        for m in ctx.monomials_of_degree((deg - e) as u16) {
            span.insert(coeff_row(&l.mul_term(1, &m, ctx)));
        }
    }
    candidates
        .into_iter()
        .filter(|c| span.insert(coeff_row(c)))
        .collect()
}

/// Presentation of the exterior square of coker M from a presentation M:
/// generators e_a ^ e_b for a < b, one relation per (column c, generator j)
/// expressing c ^ e_j in that basis.
fn lambda2_presentation(
    pres: &[Vec<Poly>],
    row_degs: &[i64],
    col_degs: &[i64],
    ctx: &RingContext,
) -> (Vec<Vec<Poly>>, Vec<i64>, Vec<i64>) {
    let g = pres.len();
    let pairs: Vec<(usize, usize)> = (0..g)
        .flat_map(|a| (a + 1..g).map(move |b| (a, b)))
        .collect();
    let mut rows2 = vec![Vec::new(); pairs.len()];
    let mut col_degs2 = Vec::new();
    for (c, &cd) in col_degs.iter().enumerate() {
        for j in 0..g {
            col_degs2.push(cd + row_degs[j]);
            for (idx, row) in rows2.iter_mut().enumerate() {
                let (a, b) = pairs[idx];
                // coefficient of e_a ^ e_b in sum_i M[i][c] e_i ^ e_j
                let entry = if b == j && a != j {
                    pres[a][c].clone()
                } else if a == j && b != j {
                    pres[b][c].neg(ctx)
                } else {
                    Poly::zero()
                };
                row.push(entry);
            }
        }
    }
    let row_degs2: Vec<i64> = pairs.iter().map(|&(a, b)| row_degs[a] + row_degs[b]).collect();
    (rows2, row_degs2, col_degs2)
}

/// Graded piece in degree `k` of the annihilator of the module presented by
/// `pres`: forms g with g * e_i in the image of the presentation map for
/// every generator e_i. The module is generated by the e_i, so this is the
/// honest annihilator piece, and every such g vanishes on the support.
fn annihilator_piece(
    pres: &[Vec<Poly>],
    row_degs: &[i64],
    col_degs: &[i64],
    k: i64,
    ctx: &RingContext,
) -> Vec<Poly> {
    let field = &ctx.field;
    let g_monos = ctx.monomials_of_degree(k as u16);
    let mut blocks: Vec<MatrixGF> = Vec::new();

    let needed: std::collections::BTreeSet<i64> =
        row_degs.iter().map(|&rd| rd + k).collect();
    for n in needed {
        // layout of the degree-n piece of the free module over the rows
        let mut row_offsets = Vec::with_capacity(row_degs.len());
        let mut row_monos = Vec::with_capacity(row_degs.len());
        let mut width = 0usize;
        for &rd in row_degs {
            row_offsets.push(width);
            let monos = if n - rd >= 0 {
                ctx.monomials_of_degree((n - rd) as u16)
            } else {
                Vec::new()
            };
            width += monos.len();
            row_monos.push(monos);
        }
        let index_of = |i: usize, m: &Monomial| -> usize {
            row_offsets[i]
                + row_monos[i]
                    .iter()
                    .position(|x| x == m)
                    .expect("graded entry lands in the row basis")
        };

        // image of the presentation map in degree n
        let mut span = ValueSpan::new(*field, width);
        for (j, &cd) in col_degs.iter().enumerate() {
            if n - cd < 0 {
                continue;
            }
            for m in ctx.monomials_of_degree((n - cd) as u16) {
                let mut row = vec![0 as Fe; width];
                for (i, prow) in pres.iter().enumerate() {
                    let entry = prow[j].mul_term(1, &m, ctx);
                    for (c, mono) in &entry.terms {
                        row[index_of(i, mono)] = *c;
                    }
                }
                span.insert(row);
            }
        }
        let keep = span.non_pivots();

        // membership conditions g * e_i in the image, for the generators
        // whose piece this is; columns are the coefficients of g
        for (i, &rd) in row_degs.iter().enumerate() {
            if rd + k != n {
                continue;
            }
            let mut mat = MatrixGF::zeros(keep.len(), g_monos.len());
            for (a, gm) in g_monos.iter().enumerate() {
                let mut row = vec![0 as Fe; width];
                row[index_of(i, gm)] = 1;
                for (t, &x) in span.residual(row, &keep).iter().enumerate() {
                    if x != 0 {
                        mat.set(t, a, x);
                    }
                }
            }
            blocks.push(mat);
        }
    }

    let total_rows: usize = blocks.iter().map(|b| b.rows).sum();
    let mut stacked = MatrixGF::zeros(total_rows, g_monos.len());
    let mut at = 0usize;
    for b in &blocks {
        for r in 0..b.rows {
            for c in 0..g_monos.len() {
                let x = b.get(r, c);
                if x != 0 {
                    stacked.set(at + r, c, x);
                }
            }
        }
        at += b.rows;
    }
    stacked
        .kernel_basis(field)
        .into_iter()
        .map(|coeffs| {
            Poly::from_terms(
                coeffs
                    .into_iter()
                    .zip(g_monos.iter())
                    .filter(|(c, _)| *c != 0)
                    .map(|(c, m)| (c, m.clone()))
                    .collect(),
                ctx,
            )
        })
        .collect()
}

/// The quartic equation of B, reduced mod q and monic. Line-bundle-only
/// families take det U directly; spinor families take the degree-4 piece of
/// the annihilator of coker [R | U], which is f plus q * (quadrics) and so
/// one-dimensional mod q exactly when the sample is non-degenerate.
pub fn extract_quartic(
    qc: &QuadricContext,
    spec: &FamilySpec,
    tgt: &Presentation,
    u: &[Vec<Poly>],
) -> Result<Poly, BarthError> {
    let ctx = &qc.ctx;
    if !spec.has_spinor() {
        let all: Vec<usize> = (0..u.len()).collect();
        let det = minor_det(u, &all, &all, ctx);
        let nf = normal_form(&det, &qc.q_gb.elems, ctx);
        if nf.is_zero() {
            return Err(BarthError::Degenerate(
                "det U vanishes on the quadric".into(),
            ));
        }
        if nf.degree() != 4 {
            return Err(BarthError::Degenerate(format!(
                "det U has degree {} mod q",
                nf.degree()
            )));
        }
        return Ok(nf.make_monic(ctx));
    }

    let src = Presentation::from_atoms(&spec.source_atoms(), ctx);
    let pres = presentation_matrix(tgt, u);
    debug_assert_eq!(pres[0].len(), tgt.rels_count() + src.gen_degs.len());
    let col_degs = presentation_col_degs(&src, tgt);

    // f kills the cokernel module: it vanishes on the support B, and the
    // module carries no finite-length part that could hide that in low
    // degrees. So the degree-4 annihilator piece is exactly f plus
    // q * (quadrics) whenever the sample is non-degenerate.
    let expected = 1 + dim_forms(5, 2) as usize;
    let ann = annihilator_piece(&pres, &tgt.gen_degs, &col_degs, 4, ctx);
    if ann.len() != expected {
        return Err(BarthError::Degenerate(format!(
            "degree-4 annihilator piece has dimension {}, expected {expected}",
            ann.len()
        )));
    }
    let mut elems = ann;
    elems.push(qc.q.clone());
    let pseudo = GroebnerBasis {
        elems,
        order: MonomialOrder::Grevlex,
    };
    quartic_from_ideal(qc, &pseudo)
}

/// Degree-4 graded piece of a saturated ideal, reduced mod q: must be one
/// dimensional, spanned by the quartic.
fn quartic_from_ideal(qc: &QuadricContext, sat: &GroebnerBasis) -> Result<Poly, BarthError> {
    let ctx = &qc.ctx;
    let monos = ctx.monomials_of_degree(4);
    let index: std::collections::HashMap<_, _> =
        monos.iter().cloned().zip(0..monos.len()).collect();
    let mut rows: Vec<Vec<Fe>> = Vec::new();
    for gpoly in &sat.elems {
        let d = gpoly.degree();
        if !(0..=4).contains(&d) {
            continue;
        }
        for m in ctx.monomials_of_degree((4 - d) as u16) {
            let prod = gpoly.mul_term(1, &m, ctx);
            let mut row = vec![0 as Fe; monos.len()];
            for (c, mono) in &prod.terms {
                row[index[mono]] = *c;
            }
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return Err(BarthError::Degenerate(
            "saturated minor ideal has no quartic part".into(),
        ));
    }
    let mut mat = crate::gfp::MatrixGF::zeros(rows.len(), monos.len());
    for (i, row) in rows.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if x != 0 {
                mat.set(i, j, x);
            }
        }
    }
    let (ech, pivots) = mat.rref(&ctx.field);
    let mut found: Option<Poly> = None;
    for r in 0..pivots.len() {
        let poly = Poly::from_terms(
            (0..monos.len())
                .filter_map(|j| {
                    let c = ech.get(r, j);
                    (c != 0).then(|| (c, monos[j].clone()))
                })
                .collect(),
            ctx,
        );
        let nf = normal_form(&poly, &qc.q_gb.elems, ctx);
        if nf.is_zero() {
            continue;
        }
        let candidate = nf.make_monic(ctx);
        match &found {
            None => found = Some(candidate),
            Some(f) if *f == candidate => {}
            Some(_) => {
                return Err(BarthError::Degenerate(
                    "quartic graded piece is not one dimensional".into(),
                ))
            }
        }
    }
    found.ok_or_else(|| BarthError::Degenerate("no quartic in the saturated ideal".into()))
}

/// The even-set ideal from the module route.
pub struct EvenSetData {
    pub gb: GroebnerBasis,
}

/// Saturated ideal of the even set w, from the module side of the
/// construction: w is the locus where coker [R | U] needs two generators,
/// i.e. the support of its exterior square, and at an ordinary double point
/// the annihilator of that square is reduced. The degree-3 and degree-4
/// annihilator pieces together with q cut out w, and saturating at the
/// irrelevant ideal yields the canonical reduced basis. This route never
/// looks at derivatives of f, so its agreement with the Jacobian singular
/// scheme of B is a genuine cross-check; any shortfall in the generators
/// here shows up as a disagreement there and rejects the sample.
pub fn even_set_ideal(
    qc: &QuadricContext,
    spec: &FamilySpec,
    tgt: &Presentation,
    u: &[Vec<Poly>],
    seed: u64,
) -> Result<EvenSetData, BarthError> {
    let ctx = &qc.ctx;
    let fseed = derive_seed(seed, spec.family.index());
    let src = Presentation::from_atoms(&spec.source_atoms(), ctx);
    let pres = presentation_matrix(tgt, u);
    let col_degs = presentation_col_degs(&src, tgt);
    let (pres2, row_degs2, col_degs2) = lambda2_presentation(&pres, &tgt.gen_degs, &col_degs, ctx);

    let mut gens = vec![qc.q.clone()];
    for k in 3..=4 {
        let piece = annihilator_piece(&pres2, &row_degs2, &col_degs2, k, ctx);
        gens.extend(prune_generators(piece, &gens, k, ctx));
    }
    let sat = saturate_irrelevant(&gens, ctx, derive_seed(fseed, LABEL_SATURATE + 100));
    Ok(EvenSetData { gb: sat })
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

/// A sampled section with its quartic.
#[derive(Debug, Clone)]
pub struct BarthSection {
    pub family: Family,
    pub prime: u32,
    pub seed: u64,
    pub map: MfMap,
    pub f: Poly,
}

pub const SECTION_SCHEMA: &str = "obstructio-section/1";

/// On-disk form of a section: polynomials as text in the z0..z4 variables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SectionDoc {
    pub schema: String,
    pub family: Family,
    pub prime: u32,
    pub seed: u64,
    pub u: Vec<Vec<String>>,
    pub f: String,
}

impl BarthSection {
    pub fn to_doc(&self, ctx: &RingContext) -> SectionDoc {
        SectionDoc {
            schema: SECTION_SCHEMA.to_string(),
            family: self.family,
            prime: self.prime,
            seed: self.seed,
            u: self
                .map
                .u
                .iter()
                .map(|row| row.iter().map(|p| format_poly(p, ctx)).collect())
                .collect(),
            f: format_poly(&self.f, ctx),
        }
    }

    /// Rebuild a section from its document, reconstructing the relation
    /// level matrix v and checking that u is a genuine morphism.
    pub fn from_doc(doc: &SectionDoc, qc: &QuadricContext) -> Result<BarthSection, BarthError> {
        if doc.schema != SECTION_SCHEMA {
            return Err(BarthError::Document(format!(
                "unknown schema {:?}",
                doc.schema
            )));
        }
        let ctx = &qc.ctx;
        if doc.prime != ctx.field.p {
            return Err(BarthError::Document(format!(
                "section is over F_{} but the context is F_{}",
                doc.prime, ctx.field.p
            )));
        }
        let spec = FamilySpec::of(doc.family);
        let src = Presentation::from_atoms(&spec.source_atoms(), ctx);
        let tgt = Presentation::from_atoms(&spec.bundle, ctx);
        let parse_err = |e| BarthError::Document(format!("bad polynomial: {e}"));
        let mut u = Vec::with_capacity(doc.u.len());
        for row in &doc.u {
            let mut prow = Vec::with_capacity(row.len());
            for s in row {
                prow.push(parse_poly(s, ctx).map_err(parse_err)?);
            }
            u.push(prow);
        }
        if u.len() != tgt.gens() || u.iter().any(|r| r.len() != src.gen_degs.len()) {
            return Err(BarthError::Document("u block has the wrong shape".into()));
        }
        let f = parse_poly(&doc.f, ctx).map_err(parse_err)?;
        let v = reconstruct_v(&u, &src, &tgt, ctx)
            .ok_or_else(|| BarthError::Document("u does not lift to a matrix factorization".into()))?;
        Ok(BarthSection {
            family: doc.family,
            prime: doc.prime,
            seed: doc.seed,
            map: MfMap { u, v },
            f,
        })
    }
}
