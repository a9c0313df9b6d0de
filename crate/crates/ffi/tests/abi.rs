use std::ffi::{CStr, CString};
use std::ptr;

use gnnbench_ffi::*;

fn last_error() -> String {
    let p = gb_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn planted(seed: u64) -> *mut GbDataset {
    let name = CString::new("planted").unwrap();
    let mut d = ptr::null_mut();
    let s = unsafe { gb_dataset_generate_preset(name.as_ptr(), seed, 200, 400, 20, 3, &mut d) };
    assert_eq!(s, GbStatus::Ok);
    assert!(!d.is_null());
    d
}

#[test]
fn generate_accessors_and_free() {
    let d = planted(1);
    unsafe {
        assert_eq!(gb_dataset_node_count(d), 200);
        assert_eq!(gb_dataset_attr_count(d), 20);
        assert_eq!(gb_dataset_class_count(d), 3);
        let m = gb_dataset_edge_count(d);
        assert!(m > 350 && m <= 400, "{m}");

        let mut labels = vec![usize::MAX; 200];
        assert_eq!(gb_dataset_labels(d, labels.as_mut_ptr(), labels.len()), GbStatus::Ok);
        assert!(labels.iter().all(|&l| l < 3));

        let (mut src, mut dst) = (vec![0usize; m], vec![0usize; m]);
        assert_eq!(gb_dataset_edges(d, src.as_mut_ptr(), dst.as_mut_ptr(), m), GbStatus::Ok);
        assert!(src.iter().zip(&dst).all(|(u, v)| u < v && *v < 200));

        let mut short = vec![0usize; 10];
        assert_eq!(gb_dataset_labels(d, short.as_mut_ptr(), short.len()), GbStatus::InvalidArgument);
        assert!(last_error().contains("needed"));
        gb_dataset_free(d);
        gb_dataset_free(ptr::null_mut());
    }
}

#[test]
fn same_seed_same_edges() {
    let (a, b) = (planted(5), planted(5));
    unsafe {
        let m = gb_dataset_edge_count(a);
        assert_eq!(m, gb_dataset_edge_count(b));
        let mut ea = (vec![0usize; m], vec![0usize; m]);
        let mut eb = (vec![0usize; m], vec![0usize; m]);
        gb_dataset_edges(a, ea.0.as_mut_ptr(), ea.1.as_mut_ptr(), m);
        gb_dataset_edges(b, eb.0.as_mut_ptr(), eb.1.as_mut_ptr(), m);
        assert_eq!(ea, eb);
        gb_dataset_free(a);
        gb_dataset_free(b);
    }
}

#[test]
fn extract_transform_roundtrip() {
    let d = planted(2);
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("features.json").to_str().unwrap()).unwrap();
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(gb_features_extract(d, &mut f), GbStatus::Ok);
        assert_eq!(gb_features_class_count(f), 3);
        assert_eq!(gb_features_attr_count(f), 20);

        let mut m = vec![0.0; 9];
        assert_eq!(gb_features_preference_mean(f, m.as_mut_ptr(), 9), GbStatus::Ok);
        for row in m.chunks(3) {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }

        let mut same = ptr::null_mut();
        assert_eq!(gb_features_transform(f, f64::NAN, 0.0, f64::NAN, &mut same), GbStatus::Ok);
        let mut m0 = vec![0.0; 9];
        gb_features_preference_mean(same, m0.as_mut_ptr(), 9);
        assert_eq!(m, m0);

        let mut bad = ptr::null_mut();
        assert_eq!(gb_features_transform(f, 1.5, f64::NAN, f64::NAN, &mut bad), GbStatus::InvalidArgument);
        assert!(bad.is_null());

        assert_eq!(gb_features_save(f, path.as_ptr()), GbStatus::Ok);
        let mut loaded = ptr::null_mut();
        assert_eq!(gb_features_load(path.as_ptr(), &mut loaded), GbStatus::Ok);
        let mut m1 = vec![0.0; 9];
        gb_features_preference_mean(loaded, m1.as_mut_ptr(), 9);
        assert_eq!(m, m1);

        let mut g = ptr::null_mut();
        assert_eq!(gb_dataset_generate_from_features(loaded, 3, &mut g), GbStatus::Ok);
        assert_eq!(gb_dataset_node_count(g), 200);

        for h in [f, same, loaded] {
            gb_features_free(h);
        }
        gb_dataset_free(g);
        gb_dataset_free(d);
    }
}

#[test]
fn dataset_save_load() {
    let d = planted(3);
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().to_str().unwrap()).unwrap();
    unsafe {
        assert_eq!(gb_dataset_save(d, path.as_ptr()), GbStatus::Ok);
        let mut e = ptr::null_mut();
        assert_eq!(gb_dataset_load(path.as_ptr(), &mut e), GbStatus::Ok);
        assert_eq!(gb_dataset_edge_count(d), gb_dataset_edge_count(e));
        gb_dataset_free(d);
        gb_dataset_free(e);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut d = ptr::null_mut();
        assert_eq!(gb_dataset_generate_preset(ptr::null(), 0, 0, 0, 0, 0, &mut d), GbStatus::NullPointer);
        let bogus = CString::new("citeseer").unwrap();
        assert_eq!(gb_dataset_generate_preset(bogus.as_ptr(), 0, 0, 0, 0, 0, &mut d), GbStatus::InvalidArgument);
        let cora = CString::new("cora-like").unwrap();
        assert_eq!(gb_dataset_generate_preset(cora.as_ptr(), 0, 0, 0, 10, 0, &mut d), GbStatus::InvalidArgument);
        let missing = CString::new("/nonexistent/gnnbench").unwrap();
        assert_eq!(gb_dataset_load(missing.as_ptr(), &mut d), GbStatus::Io);
        assert!(!last_error().is_empty());
        assert!(d.is_null());
        assert_eq!(gb_features_extract(ptr::null(), &mut ptr::null_mut()), GbStatus::NullPointer);
    }
}

#[test]
fn metrics() {
    let p = [0usize, 1, 1, 2];
    let t = [0usize, 1, 2, 2];
    let (mut f1, mut acc) = (0.0, 0.0);
    unsafe {
        assert_eq!(gb_f1_macro(p.as_ptr(), t.as_ptr(), 4, 3, &mut f1), GbStatus::Ok);
        assert_eq!(gb_accuracy(p.as_ptr(), t.as_ptr(), 4, &mut acc), GbStatus::Ok);
        assert_eq!(gb_f1_macro(p.as_ptr(), t.as_ptr(), 4, 2, &mut f1), GbStatus::InvalidArgument);
    }
    assert!((f1 - 7.0 / 9.0).abs() < 1e-12, "{f1}");
    assert_eq!(acc, 0.75);
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(gb_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
