use hyplane::bundle::{load_bundle, save_bundle};
use hyplane::layout::layout_for;
use hyplane::warp::{sphere_to_uv, uv_to_sphere};
use hyplane::{LayoutKind, ReprOptions, Representation, SplitMix64, UnifiedMap, Variant, Vec3, WarpKind};
use proptest::prelude::*;

fn points(seed: u64, n: usize) -> Vec<Vec3> {
    let mut rng = SplitMix64::new(seed);
    (0..n)
        .map(|_| Vec3::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)))
        .collect()
}

fn assert_same_queries(a: &Representation, b: &Representation) {
    for p in points(5, 200) {
        assert_eq!(a.query(p).unwrap(), b.query(p).unwrap(), "{p:?}");
    }
}

#[test]
fn separate_planes_survive_disk() {
    let opts = ReprOptions::default();
    for v in Variant::ALL {
        let dir = tempfile::tempdir().unwrap();
        let rep = Representation::random(v, &opts, 12, 3, 17).unwrap();
        save_bundle(dir.path(), &rep, None).unwrap();
        let (back, map) = load_bundle(dir.path()).unwrap();
        assert!(map.is_none());
        assert_eq!(back.variant(), v);
        assert_same_queries(&rep, &back);
    }
}

#[test]
fn unified_maps_survive_disk() {
    let opts = ReprOptions::default();
    for (v, kind) in [
        (Variant::TriPlane, LayoutKind::Even),
        (Variant::SphericalTriPlane, LayoutKind::Even),
        (Variant::HyPlane31, LayoutKind::AreaBiased),
        (Variant::HyPlane22, LayoutKind::AreaBiased),
    ] {
        let dir = tempfile::tempdir().unwrap();
        let map = UnifiedMap::random(layout_for(v, kind, 32).unwrap(), 4, 9).unwrap();
        let rep = map.build(v, &opts).unwrap();
        save_bundle(dir.path(), &rep, Some(&map)).unwrap();
        let (back, back_map) = load_bundle(dir.path()).unwrap();
        let back_map = back_map.expect("unified bundle");
        assert_eq!(back_map.layout(), map.layout());
        assert_same_queries(&rep, &back);
    }
}

#[test]
fn naive_and_elliptical_reps_differ_only_in_sphere() {
    let layout = layout_for(Variant::HyPlane31, LayoutKind::AreaBiased, 32).unwrap();
    let map = UnifiedMap::random(layout, 2, 3).unwrap();
    let naive = map
        .build(Variant::HyPlane31, &ReprOptions { warp: WarpKind::NaiveThetaPhi, ..ReprOptions::default() })
        .unwrap();
    let elliptical = map.build(Variant::HyPlane31, &ReprOptions::default()).unwrap();
    let (mut same_planar, mut differ) = (true, 0);
    for p in points(8, 300) {
        let a = naive.components(p).unwrap();
        let b = elliptical.components(p).unwrap();
        same_planar &= a[..3] == b[..3];
        differ += (a[3] != b[3]) as usize;
    }
    assert!(same_planar);
    assert!(differ > 290, "{differ}");
}

proptest! {
    #[test]
    fn warps_invert_away_from_south_pole(u in -1.0f64..1.0, v in -1.0f64..1.0) {
        for kind in [WarpKind::LaeaElliptical, WarpKind::NaiveThetaPhi] {
            let d = uv_to_sphere(hyplane::Uv::new(u, v), kind);
            prop_assume!(d.theta() < std::f64::consts::PI - 1e-3 && d.theta() > 1e-6);
            let q = sphere_to_uv(d, kind);
            prop_assert!((q.u - u).abs() < 1e-9 && (q.v - v).abs() < 1e-9, "{kind:?} {q:?}");
        }
    }
}
