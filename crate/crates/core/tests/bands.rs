use jnr_core::bands::{band_surface, locate_band_degeneracies, DEFAULT_BAND_RES};
use jnr_core::fixtures;
use jnr_core::flat::{classify, FlatKind};

/// Minimum of `E_1 - E_0` for the class 1 triple on the default grid,
/// recorded from the first run. The gap of this triple is identically 1.
const CLASS1_MIN_GAP: f64 = 1.0;

#[test]
fn closings_match_flat_census_for_every_class() {
    let (tr, pr) = DEFAULT_BAND_RES;
    for k in 1..=8 {
        let t = fixtures::class(k);
        let grid = band_surface(&t, tr, pr).unwrap();
        let report = locate_band_degeneracies(&grid, &t).unwrap();
        let census = classify(&t).unwrap();
        let c = census.classification().unwrap();
        let (s, e) = fixtures::class_feature(k);
        assert_eq!(report.count(FlatKind::Segment), s, "class {k}");
        assert_eq!(report.count(FlatKind::Ellipse), e, "class {k}");
        assert_eq!(report.closings.len(), c.flats.len() + c.points.len());
        for closing in &report.closings {
            assert!(closing.refined_gap < 1e-9 * t.scale());
        }
    }
}

#[test]
fn class1_is_gapped_with_recorded_minimum() {
    let t = fixtures::class(1);
    let grid = band_surface(&t, 181, 360).unwrap();
    let report = locate_band_degeneracies(&grid, &t).unwrap();
    assert!(report.closings.is_empty());
    assert!(report.min_gap > 0.0);
    assert!(
        (report.min_gap - CLASS1_MIN_GAP).abs() < 1e-12,
        "{}",
        report.min_gap
    );
}

#[test]
fn class7_has_a_cone_and_a_wedge() {
    let t = fixtures::class(7);
    let report = locate_band_degeneracies(&band_surface(&t, 181, 360).unwrap(), &t).unwrap();
    let mut kinds: Vec<FlatKind> = report.closings.iter().map(|c| c.kind).collect();
    kinds.sort();
    assert_eq!(kinds, vec![FlatKind::Segment, FlatKind::Ellipse]);
}

#[test]
fn class5_has_four_elliptic_closings() {
    let t = fixtures::class(5);
    let report = locate_band_degeneracies(&band_surface(&t, 181, 360).unwrap(), &t).unwrap();
    assert_eq!(report.closings.len(), 4);
    assert!(report.closings.iter().all(|c| c.kind == FlatKind::Ellipse));
}

#[test]
fn set_b_closing_is_point_kind() {
    let t = fixtures::set_b();
    let report = locate_band_degeneracies(&band_surface(&t, 64, 128).unwrap(), &t).unwrap();
    assert_eq!(report.closings.len(), 1);
    assert_eq!(report.closings[0].kind, FlatKind::Point);
}
