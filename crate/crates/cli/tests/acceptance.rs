//! End-to-end acceptance checks, one line per criterion.
//!
//! Every criterion runs even if an earlier one fails; the test fails at the
//! end if any did.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::{check_fixture, golden_frame, small_report_json};
use hyplane::image::Raster;
use hyplane::layout::{area_biased_layout_22, area_biased_layout_31, even_layout, RegionLayout, UnifiedMap};
use hyplane::metrics::{density_cov, mirror_entanglement, noise_sphere, seam_gap, utilization};
use hyplane::plane::{read_hypl, write_hypl};
use hyplane::render::{render, trace_ray, Camera, ToyDecoder};
use hyplane::repr::HyPlane22;
use hyplane::warp::{disc_to_square, laea_area_scale, sphere_to_uv, square_to_disc, uv_to_sphere};
use hyplane::{
    blend_dual_sphere, dir_to_cartesian, Error, FeatureGrid, ReprOptions, Representation, SphereFrame,
    SplitMix64, Uv, Variant, Vec3, WarpKind,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn random_point(rng: &mut SplitMix64) -> Vec3 {
    Vec3::new(rng.next_signed(), rng.next_signed(), rng.next_signed())
}

fn c1_equal_area() -> Outcome {
    let start = Instant::now();
    let mut rng = SplitMix64::new(101);
    let (mut worst, mut n) = (0.0f64, 0);
    while n < 10_000 {
        let d = rng.sphere_dir();
        if d.theta() <= 0.01 || d.theta() >= PI - 0.01 {
            continue;
        }
        let s = laea_area_scale(d, 1e-5).map_err(|e| e.to_string())?;
        worst = worst.max((s - 1.0).abs());
        n += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst < 1e-4, || format!("max |det J - 1| = {worst:.2e}"))?;
    ensure(secs < 1.0, || format!("took {secs:.2} s"))?;
    Ok(format!("max |det J - 1| = {worst:.2e} over {n} directions in {secs:.3} s"))
}

fn c2_bijectivity() -> Outcome {
    let mut rng = SplitMix64::new(102);
    let frame = SphereFrame::head_top();
    let mut worst_sphere = 0.0f64;
    for kind in [WarpKind::LaeaElliptical, WarpKind::LaeaDiscOnly] {
        let mut n = 0;
        while n < 10_000 {
            let d = rng.sphere_dir();
            if d.theta() >= PI - 1e-3 {
                continue;
            }
            let back = uv_to_sphere(sphere_to_uv(d, kind), kind);
            let err = dir_to_cartesian(d, &frame).angle_to(dir_to_cartesian(back, &frame));
            worst_sphere = worst_sphere.max(err);
            n += 1;
        }
    }
    let mut worst_square = 0.0f64;
    for _ in 0..10_000 {
        let q = Uv::new(rng.next_signed(), rng.next_signed());
        if q.u.abs() >= 1.0 || q.v.abs() >= 1.0 {
            continue;
        }
        let (x, y) = square_to_disc(q, 1.0);
        let back = disc_to_square(x, y, 1.0).map_err(|e| e.to_string())?;
        worst_square = worst_square.max(back.dist(q));
        let r = rng.next_f64().sqrt() * (1.0 - 1e-12);
        let a = PI * rng.next_signed();
        let (x, y) = (r * a.cos(), r * a.sin());
        let (x2, y2) = square_to_disc(disc_to_square(x, y, 1.0).map_err(|e| e.to_string())?, 1.0);
        worst_square = worst_square.max((x2 - x).hypot(y2 - y));
    }
    ensure(worst_sphere < 1e-9, || format!("sphere round trip {worst_sphere:.2e} rad"))?;
    ensure(worst_square < 1e-9, || format!("disc/square round trip {worst_square:.2e}"))?;
    Ok(format!(
        "sphere->square->sphere {worst_sphere:.1e} rad, disc<->square {worst_square:.1e}"
    ))
}

fn c3_algebraic_fixtures() -> Outcome {
    let a = disc_to_square(1.0, 0.0, 1.0).map_err(|e| e.to_string())?;
    let h = SQRT_2 / 2.0;
    let b = disc_to_square(h, h, 1.0).map_err(|e| e.to_string())?;
    let ea = a.dist(Uv::new(1.0, 0.0));
    let eb = b.dist(Uv::new(1.0, 1.0));
    ensure(ea <= 1e-12 && eb <= 1e-12, || format!("errors {ea:.2e}, {eb:.2e}"))?;
    Ok(format!("(1,0) -> {:?} err {ea:.1e}; (r2/2,r2/2) -> {:?} err {eb:.1e}", (a.u, a.v), (b.u, b.v)))
}

fn c4_density_uniformity() -> Outcome {
    let start = Instant::now();
    let naive = density_cov(WarpKind::NaiveThetaPhi, 64, 1_000_000, 104).map_err(|e| e.to_string())?;
    let ell = density_cov(WarpKind::LaeaElliptical, 64, 1_000_000, 104).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let (cn, ce) = (naive.get("cov").unwrap(), ell.get("cov").unwrap());
    let row_law = naive.get("row_law_max_rel_error").unwrap();
    let summary = format!(
        "CoV naive {cn:.4}, elliptical {ce:.4}, ratio {:.3} (need >= 3); naive row law max error {:.1}% (need <= 10%); {secs:.2} s",
        cn / ce,
        100.0 * row_law
    );
    ensure(ce <= cn / 3.0 && row_law <= 0.10 && secs < 10.0, || summary.clone())?;
    Ok(summary)
}

fn c5_utilization() -> Outcome {
    let e = utilization(WarpKind::LaeaElliptical, 256, 10_000_000, 105).map_err(|e| e.to_string())?;
    let d = utilization(WarpKind::LaeaDiscOnly, 256, 10_000_000, 105).map_err(|e| e.to_string())?;
    let summary = format!("elliptical {e:.4} (need >= 0.99), disc {d:.4} (need pi/4 +- 0.01 = {FRAC_PI_4:.4})");
    ensure(e >= 0.99 && (d - FRAC_PI_4).abs() <= 0.01, || summary.clone())?;
    Ok(summary)
}

fn c6_seam_continuity() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for size in [32, 64, 128] {
        let e = noise_sphere(WarpKind::LaeaElliptical, size, 8, 106).map_err(|e| e.to_string())?;
        let n = noise_sphere(WarpKind::NaiveThetaPhi, size, 8, 106).map_err(|e| e.to_string())?;
        let re = seam_gap(&e, 10_000, 1e-3, 206).map_err(|e| e.to_string())?;
        let rn = seam_gap(&n, 10_000, 1e-3, 206).map_err(|e| e.to_string())?;
        let median_ratio = re.get("median_ratio").unwrap();
        let naive_jump = rn.get("seam_max_over_interior_median").unwrap();
        ok &= (0.5..=2.0).contains(&median_ratio) && naive_jump >= 10.0;
        lines.push(format!("{size}^2: elliptical median ratio {median_ratio:.3}, naive max/median {naive_jump:.1}"));
    }
    let summary = lines.join("; ");
    ensure(ok, || summary.clone())?;
    Ok(summary)
}

fn c7_mirroring() -> Outcome {
    let opts = ReprOptions::default();
    let tp = Representation::random(Variant::TriPlane, &opts, 32, 8, 107).map_err(|e| e.to_string())?;
    let hp = Representation::random(Variant::HyPlane31, &opts, 32, 8, 107).map_err(|e| e.to_string())?;
    let mut rng = SplitMix64::new(207);
    let n = 1000;
    let (mut xy_same, mut agg_differs) = (0, 0);
    for _ in 0..n {
        let p = random_point(&mut rng);
        let m = p.z_reflect();
        let xy = |rep: &Representation, q| {
            rep.components(q)
                .unwrap()
                .into_iter()
                .find(|c| c.name == "xy")
                .unwrap()
                .feature
        };
        let (a, b) = (xy(&tp, p), xy(&tp, m));
        if a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()) {
            xy_same += 1;
        }
        if hp.query(p).unwrap() != hp.query(m).unwrap() {
            agg_differs += 1;
        }
    }
    let tri = mirror_entanglement(&tp, n, 307).map_err(|e| e.to_string())?;
    let hyb = mirror_entanglement(&hp, n, 307).map_err(|e| e.to_string())?;
    let summary = format!(
        "tri-plane xy identical {xy_same}/{n} (metric {}), hy-plane-31 aggregate differs {agg_differs}/{n} (metric {})",
        tri.get("xy.identical_fraction").unwrap(),
        1.0 - hyb.get("identical_fraction").unwrap()
    );
    ensure(
        xy_same == n
            && tri.get("xy.identical_fraction") == Some(1.0)
            && agg_differs as f64 >= 0.99 * n as f64
            && hyb.get("identical_fraction").unwrap() <= 0.01,
        || summary.clone(),
    )?;
    Ok(summary)
}

fn hyplane22(rep: &Representation) -> &HyPlane22 {
    match rep {
        Representation::HyPlane22(h) => h,
        _ => unreachable!("built as hy-plane-22"),
    }
}

fn c8_blend() -> Outcome {
    let fa = [0.25, -1.5, 3.0, 0.1];
    let fb = [-2.0, 0.75, 1.0, 7.0];
    let pole = blend_dual_sphere(&fa, &fb, 0.0, 2.0).map_err(|e| e.to_string())?;
    ensure(pole.iter().zip(&fa).all(|(x, y)| x.to_bits() == y.to_bits()), || format!("pole {pole:?}"))?;
    let eq = blend_dual_sphere(&fa, &fb, SQRT_2, SQRT_2).map_err(|e| e.to_string())?;
    let eq_err = eq
        .iter()
        .zip(fa.iter().zip(&fb))
        .map(|(x, (a, b))| (x - 0.5 * (a + b)).abs())
        .fold(0.0, f64::max);
    ensure(eq_err <= 1e-15, || format!("equator off the mean by {eq_err:.1e}"))?;
    let mid = blend_dual_sphere(&fa, &fb, 1.0, 3f64.sqrt()).map_err(|e| e.to_string())?;
    let mid_err = mid
        .iter()
        .zip(fa.iter().zip(&fb))
        .map(|(x, (a, b))| (x - (a + 0.07180 * b) / 1.07180).abs())
        .fold(0.0, f64::max);
    ensure(mid_err <= 1e-4, || format!("R_a = 1 off by {mid_err:.1e}"))?;

    let full = Representation::random(Variant::HyPlane22, &ReprOptions::default(), 16, 2, 108)
        .map_err(|e| e.to_string())?;
    let capped = UnifiedMap::random(area_biased_layout_22(64, 0.25).map_err(|e| e.to_string())?, 2, 108)
        .and_then(|u| u.build(Variant::HyPlane22, &ReprOptions::default()))
        .map_err(|e| e.to_string())?;
    let frame = SphereFrame::head_top();
    let mut rng = SplitMix64::new(208);
    let mut min_total = f64::INFINITY;
    for _ in 0..100_000 {
        let p = dir_to_cartesian(rng.sphere_dir(), &frame);
        for rep in [&full, &capped] {
            let w = hyplane22(rep).blend_weights(p).map_err(|e| e.to_string())?;
            min_total = min_total.min(w.w_a + w.w_b);
        }
    }
    ensure(min_total > 0.0, || format!("min w_a + w_b = {min_total}"))?;
    Ok(format!(
        "pole exact, equator mean err {eq_err:.0e}, R_a=1 err {mid_err:.1e}, min w_a+w_b {min_total:.4} over 1e5 directions"
    ))
}

fn scan(layout: &RegionLayout) -> Result<(), String> {
    for row in 0..layout.height() {
        for col in 0..layout.width() {
            let n = layout.regions().iter().filter(|r| r.rect.contains(col, row)).count();
            ensure(n == 1, || format!("texel ({row}, {col}) covered {n} times"))?;
        }
    }
    Ok(())
}

fn c9_layouts() -> Outcome {
    let mut scanned = 0;
    for v in [Variant::TriPlane, Variant::SphericalTriPlane, Variant::HyPlane31, Variant::HyPlane22] {
        scan(&even_layout(512, v).map_err(|e| e.to_string())?).map_err(|e| format!("even {v}: {e}"))?;
        scanned += 1;
    }
    let a31 = area_biased_layout_31(512).map_err(|e| e.to_string())?;
    let a22 = area_biased_layout_22(512, 0.25).map_err(|e| e.to_string())?;
    for l in [&a31, &a22] {
        scan(l).map_err(|e| format!("area-biased: {e}"))?;
        scanned += 1;
        let mut dims: Vec<(usize, usize)> = l.regions().iter().map(|r| (r.rect.w, r.rect.h)).collect();
        dims.sort_unstable();
        ensure(dims == [(128, 128), (128, 384), (384, 128), (384, 384)], || format!("partition {dims:?}"))?;
    }
    let sphere = a31.rect("sphere").unwrap();
    ensure((sphere.w, sphere.h) == (384, 384), || format!("sphere region {sphere:?}"))?;
    Ok(format!(
        "{scanned} layouts of 512^2 tiled exactly; area-biased parts 384^2, 384x128, 128x384, 128^2"
    ))
}

fn c10_aliasing() -> Outcome {
    let layout = area_biased_layout_31(64).map_err(|e| e.to_string())?;
    let mut um = UnifiedMap::zeros(layout, 4).map_err(|e| e.to_string())?;
    let xy = um.layout().rect("xy").unwrap();
    let (row, col) = (xy.y0 + 5, xy.x0 + 3);
    um.texel_mut(row, col)
        .map_err(|e| e.to_string())?
        .copy_from_slice(&[1.0, -2.0, 3.5, 8.0]);
    let views = um.split().map_err(|e| e.to_string())?;
    let view = &views["xy"];
    ensure(view.texel(5, 3) == [1.0, -2.0, 3.5, 8.0], || format!("view sees {:?}", view.texel(5, 3)))?;
    ensure(view.texel(5, 3).as_ptr() == um.grid().texel(row, col).as_ptr(), || "view texel is a copy".into())?;
    ensure(views.values().all(|g| g.shares_storage_with(um.grid())), || "a view does not alias".into())?;
    ensure(matches!(um.texel_mut(row, col), Err(Error::StorageShared)), || {
        "write allowed while views are alive".into()
    })?;
    drop(views);
    um.texel_mut(row, col).map_err(|e| e.to_string())?[0] = 42.0;
    let again = um.split().map_err(|e| e.to_string())?;
    ensure(again["xy"].texel(5, 3)[0] == 42.0, || "second write not visible".into())?;
    Ok("write at the unified texel visible through the xy view at the same address".into())
}

/// Independent slab test for the `[-1, 1]^3` cube.
fn chord_oracle(o: Vec3, d: Vec3) -> f64 {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (oi, di) in [(o.x, d.x), (o.y, d.y), (o.z, d.z)] {
        if di.abs() < 1e-300 {
            if oi.abs() > 1.0 {
                return 0.0;
            }
            continue;
        }
        let (a, b) = ((-1.0 - oi) / di, (1.0 - oi) / di);
        lo = lo.max(a.min(b));
        hi = hi.min(a.max(b));
    }
    (hi - lo.max(0.0)).max(0.0)
}

fn c11_renderer() -> Outcome {
    let rep = Representation::random(Variant::HyPlane22, &ReprOptions::default(), 16, 6, 111).map_err(|e| e.to_string())?;
    let dec = ToyDecoder::from_seed(211, 6);
    let mut rng = SplitMix64::new(311);
    let mut worst_sum = 0.0f64;
    for _ in 0..500 {
        let origin = random_point(&mut rng) * 3.0;
        let dir = match (random_point(&mut rng) * -0.3 - origin).normalized() {
            Ok(d) => d,
            Err(_) => continue,
        };
        let r = trace_ray(&rep, &dec, origin, dir, 64).map_err(|e| e.to_string())?;
        worst_sum = worst_sum.max((r.weights.iter().sum::<f64>() - r.alpha).abs());
    }
    ensure(worst_sum <= 1e-6, || format!("weights vs alpha {worst_sum:.1e}"))?;

    let zero = UnifiedMap::zeros(area_biased_layout_31(32).map_err(|e| e.to_string())?, 6)
        .and_then(|u| u.build(Variant::HyPlane31, &ReprOptions::default()))
        .map_err(|e| e.to_string())?;
    let bias = dec.weights()[6];
    let sigma = (1.0 + bias.exp()).ln();
    let cam = Camera::orbit(0.7, 3.0, 0.9, 24, 18).map_err(|e| e.to_string())?;
    let img = render(&zero, &cam, &dec, 64).map_err(|e| e.to_string())?;
    let mut worst_alpha = 0.0f64;
    for row in 0..18 {
        for col in 0..24 {
            let oracle = 1.0 - (-sigma * chord_oracle(cam.position(), cam.ray_dir(col, row))).exp();
            worst_alpha = worst_alpha.max((img.alpha[row * 24 + col] - oracle).abs());
        }
    }
    ensure(worst_alpha <= 1e-4, || format!("zero scene alpha off by {worst_alpha:.1e}"))?;

    let cam = Camera::orbit(2.1, 3.0, 0.8, 20, 20).map_err(|e| e.to_string())?;
    let bytes = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let img = render(&rep, &cam, &dec, 48).unwrap();
                (img.to_ppm().encode(), img.to_pgm().encode())
            })
    };
    let first = bytes(4);
    ensure(first == bytes(4), || "two runs differ".into())?;
    for t in [1, 2, 7] {
        ensure(first == bytes(t), || format!("{t} threads differ"))?;
    }
    Ok(format!(
        "weights-alpha {worst_sum:.1e}, zero scene vs chord oracle {worst_alpha:.1e}, renders identical over 1/2/4/7 threads"
    ))
}

fn c12_file_formats() -> Outcome {
    let mut grids = vec![FeatureGrid::random(7, 5, 3, 112).map_err(|e| e.to_string())?];
    let specials = [0.0f32, -0.0, f32::MAX, -f32::MAX, f32::from_bits(1), -f32::MIN_POSITIVE / 8.0];
    grids.push(FeatureGrid::from_fn(2, 3, 1, |r, c, _| specials[r * 3 + c]).map_err(|e| e.to_string())?);
    for g in &grids {
        let mut buf = Vec::new();
        write_hypl(g, &mut buf).map_err(|e| e.to_string())?;
        let back = read_hypl(buf.as_slice()).map_err(|e| e.to_string())?;
        ensure(&back == g, || "HYPL round trip changed bits".into())?;
    }
    let mut rng = SplitMix64::new(212);
    for channels in [1, 3] {
        let data = (0..9 * 4 * channels).map(|_| (rng.next_u64() & 0xff) as u8).collect();
        let r = Raster::new(9, 4, channels, data).map_err(|e| e.to_string())?;
        ensure(Raster::decode(&r.encode()).map_err(|e| e.to_string())? == r, || "PNM round trip".into())?;
    }
    let (ppm, pgm) = golden_frame();
    check_fixture("golden_frame_0000.ppm", &ppm)?;
    check_fixture("golden_frame_0000.pgm", &pgm)?;
    check_fixture("report_small.json", &small_report_json())?;
    Ok("HYPL and PPM/PGM round trips bit-exact; golden frame and report match fixtures".into())
}

fn c13_reductions() -> Outcome {
    let tp = Representation::random(Variant::TriPlane, &ReprOptions::default(), 16, 5, 113).map_err(|e| e.to_string())?;
    let mut grids = BTreeMap::new();
    for e in tp.planes() {
        grids.insert(format!("{}_0", e.name), e.grid.clone());
    }
    let opts = ReprOptions {
        depth: 1,
        ..ReprOptions::default()
    };
    ensure(
        Variant::TriGrid.plane_names(1).iter().all(|n| grids.contains_key(n)),
        || format!("tri-grid names {:?}", Variant::TriGrid.plane_names(1)),
    )?;
    let tg = Representation::from_grids(Variant::TriGrid, &opts, grids).map_err(|e| e.to_string())?;
    let mut rng = SplitMix64::new(213);
    let mut worst = 0.0f64;
    for _ in 0..5000 {
        let p = random_point(&mut rng) * 1.2;
        worst = worst.max(
            tp.query(p)
                .unwrap()
                .iter()
                .zip(tg.query(p).unwrap())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        );
    }
    ensure(worst <= 1e-12, || format!("tri-grid D=1 off by {worst:.1e}"))?;

    let mut slopes = Vec::new();
    let full = Representation::random(Variant::HyPlane22, &ReprOptions::default(), 32, 4, 114).map_err(|e| e.to_string())?;
    let capped = UnifiedMap::random(area_biased_layout_22(64, 0.25).map_err(|e| e.to_string())?, 4, 114)
        .and_then(|u| u.build(Variant::HyPlane22, &ReprOptions::default()))
        .map_err(|e| e.to_string())?;
    for rep in [&full, &capped] {
        let h = hyplane22(rep);
        let f = |p: Vec3| h.spherical_feature(p).unwrap();
        let mut interior = 0.0f64;
        let mut rng = SplitMix64::new(214);
        for _ in 0..4000 {
            let d = dir_to_cartesian(rng.sphere_dir(), &SphereFrame::head_top());
            if d.z.abs() > 0.2f64.cos() {
                continue;
            }
            let t = match d.cross(random_point(&mut rng)).normalized() {
                Ok(t) => t,
                Err(_) => continue,
            };
            let a = (d + t * 5e-5).normalized().unwrap();
            let b = (d - t * 5e-5).normalized().unwrap();
            interior = interior.max(dist(&f(a), &f(b)) / (a - b).norm());
        }
        let mut pole_worst = 0.0f64;
        for pole in [Vec3::Z, -Vec3::Z] {
            for delta in [1e-3f64, 1e-4, 1e-5] {
                for k in 0..64 {
                    let psi = PI * k as f64 / 64.0;
                    let t = Vec3::X * psi.cos() + Vec3::Y * psi.sin();
                    let (c, s) = ((0.5 * delta).cos(), (0.5 * delta).sin());
                    let a = pole * c + t * s;
                    let b = pole * c - t * s;
                    pole_worst = pole_worst.max(dist(&f(a), &f(b)) / (a - b).norm());
                }
            }
        }
        ensure(pole_worst <= interior, || {
            format!("pole slope {pole_worst:.3} exceeds interior bound {interior:.3}")
        })?;
        slopes.push(format!("{pole_worst:.2} <= {interior:.2}"));
    }
    Ok(format!(
        "tri-grid D=1 vs tri-plane {worst:.1e}; hy-plane-22 pole slopes {} (full, capped)",
        slopes.join(", ")
    ))
}

fn run(id: u32, title: &str, f: fn() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    });
    let (tag, detail) = match &outcome {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("criterion {id:>2} {tag}  {title}: {detail}");
    outcome.is_ok()
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 13] = [
        ("equal-area LAEA", c1_equal_area),
        ("warp bijectivity", c2_bijectivity),
        ("exact algebraic fixtures", c3_algebraic_fixtures),
        ("density uniformity", c4_density_uniformity),
        ("utilization", c5_utilization),
        ("seam continuity", c6_seam_continuity),
        ("mirroring entanglement", c7_mirroring),
        ("dual-sphere blend", c8_blend),
        ("layout exactness", c9_layouts),
        ("unify-split aliasing", c10_aliasing),
        ("renderer", c11_renderer),
        ("file formats", c12_file_formats),
        ("reduction checks", c13_reductions),
    ];
    let failed: Vec<u32> = criteria
        .iter()
        .zip(1..)
        .filter(|((title, f), id)| !run(*id, title, *f))
        .map(|(_, id)| id)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
