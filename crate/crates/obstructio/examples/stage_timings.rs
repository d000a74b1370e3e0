//! Wall-clock breakdown of one pipeline run, stage by stage.
//!
//!     cargo run --release --example stage_timings -- [prime] [seed] [family]

use std::time::Instant;

use obstructio::barth::{even_set_ideal, extract_quartic, Family, SectionSampler};
use obstructio::gfp::PrimeField;
use obstructio::nodal::{count_points, defect_from_points, is_reduced_points, singular_scheme};
use obstructio::quadric::QuadricContext;

fn main() {
    let prime: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(31991);
    let seed: u64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let family: Family = std::env::args()
        .nth(3)
        .and_then(|s| s.parse().ok())
        .unwrap_or(Family::E3);
    let field = PrimeField::new(prime).unwrap();
    let qc = QuadricContext::new(field);

    let t0 = Instant::now();
    let sampler = SectionSampler::new(&qc, family).unwrap();
    eprintln!("hom space + symmetric basis: {:.2?}", t0.elapsed());

    let t = Instant::now();
    let map = sampler.sample(&qc, seed);
    eprintln!("sample: {:.2?}", t.elapsed());

    let t = Instant::now();
    let f = extract_quartic(&qc, &sampler.spec, &sampler.tgt, &map.u).unwrap();
    eprintln!("quartic: {:.2?} (degree {})", t.elapsed(), f.degree());

    let t = Instant::now();
    let ev = even_set_ideal(&qc, &sampler.spec, &sampler.tgt, &map.u, seed).unwrap();
    eprintln!("even set ideal: {:.2?} (gb len={})", t.elapsed(), ev.gb.elems.len());

    let t = Instant::now();
    let sing = singular_scheme(&qc, &f, seed);
    let (sdim, scount) = count_points(&sing, &qc.ctx);
    eprintln!(
        "singular scheme: {:.2?} (gb len={}, equal={}, dim={sdim}, count={scount})",
        t.elapsed(),
        sing.elems.len(),
        sing.elems == ev.gb.elems
    );

    let t = Instant::now();
    let (dim, count) = count_points(&ev.gb, &qc.ctx);
    eprintln!("count: {:.2?} (dim={dim}, count={count})", t.elapsed());

    let t = Instant::now();
    let reduced = is_reduced_points(&ev.gb.elems, count, &qc.ctx, seed);
    eprintln!("reduced: {:.2?} ({reduced})", t.elapsed());

    let t = Instant::now();
    let defect = defect_from_points(&ev.gb, count, &qc.ctx).unwrap();
    eprintln!("defect: {:.2?} ({defect})", t.elapsed());

    eprintln!("total: {:.2?}", t0.elapsed());
}
