//! Exercises the C ABI through the same entry points a C caller would use.

use std::ffi::CStr;

use concap_ffi::*;

#[test]
fn version_is_a_nul_terminated_string() {
    let v = unsafe { CStr::from_ptr(concap_version()) };
    assert!(!v.to_str().unwrap().is_empty());
}

#[test]
fn capacity_of_single_disk_matches_closed_form() {
    let c = concap_constellation_new();
    assert_eq!(concap_constellation_add_disk(c, 0.4, 0.2, 0.5), ConcapStatus::Ok);
    assert_eq!(concap_constellation_len(c), 1);

    let mut cap = 0.0;
    assert_eq!(concap_capacity(c, 256, &mut cap), ConcapStatus::Ok);
    let mut exact = 0.0;
    assert_eq!(concap_hyp_disk_capacity(0.5, &mut exact), ConcapStatus::Ok);
    assert!((cap - exact).abs() < 1e-8, "{cap} vs {exact}");

    let mut b = [0.0f64];
    assert_eq!(concap_capacity_contributions(c, 256, b.as_mut_ptr()), ConcapStatus::Ok);
    assert!((b[0] - cap).abs() < 1e-12);

    concap_constellation_free(c);
}

#[test]
fn overlapping_disks_report_overlap_status() {
    let c = concap_constellation_new();
    concap_constellation_add_disk(c, 0.0, 0.0, 0.5);
    concap_constellation_add_disk(c, 0.01, 0.0, 0.5);
    let mut cap = 0.0;
    assert_eq!(concap_capacity(c, 64, &mut cap), ConcapStatus::OverlapError);

    let mut buf = [0i8; 256];
    let len = concap_last_error_message(buf.as_mut_ptr(), buf.len());
    assert!(len > 0);
    let msg = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap();
    assert!(msg.contains("overlap"), "message: {msg}");
    concap_constellation_free(c);
}

#[test]
fn invalid_inputs_are_rejected_not_crashing() {
    let mut out = 0.0;
    assert_eq!(concap_mu(1.5, &mut out), ConcapStatus::DomainError);
    assert_eq!(concap_ellip_k(-0.1, &mut out), ConcapStatus::DomainError);
    assert_eq!(concap_hyp_distance(2.0, 0.0, 0.0, 0.0, &mut out), ConcapStatus::DomainError);
    assert_eq!(concap_capacity(std::ptr::null(), 64, &mut out), ConcapStatus::NullPointer);
    assert_eq!(
        concap_constellation_add_disk(std::ptr::null_mut(), 0.0, 0.0, 0.1),
        ConcapStatus::NullPointer
    );
    concap_constellation_free(std::ptr::null_mut()); // must be a no-op
}

#[test]
fn special_functions_round_trip() {
    let mut mu_val = 0.0;
    assert_eq!(concap_mu(std::f64::consts::FRAC_1_SQRT_2, &mut mu_val), ConcapStatus::Ok);
    assert!((mu_val - std::f64::consts::PI / 2.0).abs() < 1e-13);

    let mut cap = 0.0;
    let mut radius = 0.0;
    concap_hyp_disk_capacity(0.8, &mut cap);
    concap_condense_radius(cap, &mut radius);
    assert!((radius - 0.8).abs() < 1e-12);

    let mut seg = 0.0;
    let mut star = 0.0;
    assert_eq!(concap_segment_capacity(1.0, &mut seg), ConcapStatus::Ok);
    assert_eq!(concap_star_capacity_5(1.0, &mut star), ConcapStatus::Ok);
    assert!(star > seg);
}

#[test]
fn maximize_two_disks_lands_on_constraint_circle() {
    let radii = [0.2f64, 0.2];
    let mut cap = 0.0;
    let mut centers = [0.0f64; 4];
    let status = concap_maximize(
        radii.as_ptr(),
        2,
        ConcapConstraintKind::Disk,
        0.5,
        42,
        1,
        &mut cap,
        centers.as_mut_ptr(),
    );
    assert_eq!(status, ConcapStatus::Ok);
    assert!(cap > 0.0);
    for pair in centers.chunks(2) {
        let r = (pair[0] * pair[0] + pair[1] * pair[1]).sqrt();
        assert!((r - 0.5).abs() < 1e-3, "|z| = {r}");
    }
}
