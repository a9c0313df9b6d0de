//! C ABI over the gnnbench generator, feature extraction, transforms and
//! metrics.
//!
//! Datasets and feature sets are opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call returns
//! a [`GbStatus`]; on failure a message for the current thread is available
//! from [`gb_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use gnnbench::config::{apply_transform, TransformConfig};
use gnnbench::features::{extract, FeatureSet};
use gnnbench::generator::{generate, GenParams};
use gnnbench::io::{load_dataset, save_dataset};
use gnnbench::metrics::{accuracy, f1_macro};
use gnnbench::preset::{planted_features, Preset};
use gnnbench::{Dataset, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GbStatus {
    Ok = 0,
    InvalidArgument = 1,
    Io = 2,
    Runtime = 3,
    NullPointer = 4,
    Panic = 5,
}

/// Opaque generated or loaded dataset.
pub struct GbDataset {
    inner: Dataset,
}

/// Opaque class and graph feature set.
pub struct GbFeatures {
    inner: FeatureSet,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> GbStatus {
    match e {
        Error::Io { .. } => GbStatus::Io,
        e if e.is_validation() => GbStatus::InvalidArgument,
        _ => GbStatus::Runtime,
    }
}

enum Failure {
    Lib(Error),
    Status(GbStatus, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(GbStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GbStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            GbStatus::Panic
        }
    }
}

unsafe fn path_arg(p: *const c_char, what: &str) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Status(GbStatus::InvalidArgument, format!("{what} is not UTF-8")))?;
    Ok(PathBuf::from(s))
}

unsafe fn out_slice<'a, T>(p: *mut T, len: usize, needed: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    if len < needed {
        return Err(Failure::Status(
            GbStatus::InvalidArgument,
            format!("{what} holds {len} elements, {needed} needed"),
        ));
    }
    Ok(std::slice::from_raw_parts_mut(p, needed))
}

fn boxed<T>(out: *mut *mut T, value: T) {
    // SAFETY: callers check `out` for null before computing `value`.
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

/// Message describing the last failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Generates a dataset from a named preset (`cora-like` or `planted`).
/// Zero for `nodes`, `edges`, `attrs` or `classes` keeps the preset value;
/// `attrs` and `classes` apply to the planted preset only.
///
/// # Safety
/// `preset` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gb_dataset_generate_preset(
    preset: *const c_char,
    seed: u64,
    nodes: usize,
    edges: usize,
    attrs: usize,
    classes: usize,
    out: *mut *mut GbDataset,
) -> GbStatus {
    guard(|| {
        let name = path_arg(preset, "preset")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let preset: Preset = name.to_string_lossy().parse()?;
        let or = |v: usize, d: usize| if v == 0 { d } else { v };
        let mut params = match preset {
            Preset::CoraLike => {
                if attrs != 0 || classes != 0 {
                    return Err(Error::Invalid("the cora-like preset has fixed attrs and classes".into()).into());
                }
                GenParams::cora_like(seed)
            }
            Preset::Planted => GenParams::from_features(
                &planted_features(or(nodes, 3000), or(edges, 5000), or(attrs, 500), or(classes, 5))?,
                seed,
            ),
        };
        params.node_count = or(nodes, params.node_count);
        params.target_edge_count = or(edges, params.target_edge_count);
        boxed(out, GbDataset { inner: generate(&params)? });
        Ok(())
    })
}

/// Generates a dataset whose class features follow `features`.
///
/// # Safety
/// `features` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gb_dataset_generate_from_features(
    features: *const GbFeatures,
    seed: u64,
    out: *mut *mut GbDataset,
) -> GbStatus {
    guard(|| {
        let f = features.as_ref().ok_or_else(|| null("features"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let params = GenParams::from_features(&f.inner, seed);
        boxed(out, GbDataset { inner: generate(&params)? });
        Ok(())
    })
}

/// Loads a dataset directory.
///
/// # Safety
/// `dir` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gb_dataset_load(dir: *const c_char, out: *mut *mut GbDataset) -> GbStatus {
    guard(|| {
        let dir = path_arg(dir, "dir")?;
        if out.is_null() {
            return Err(null("out"));
        }
        boxed(out, GbDataset { inner: load_dataset(&dir)? });
        Ok(())
    })
}

/// Writes a dataset directory.
///
/// # Safety
/// `dataset` must be a live handle and `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gb_dataset_save(dataset: *const GbDataset, dir: *const c_char) -> GbStatus {
    guard(|| {
        let d = dataset.as_ref().ok_or_else(|| null("dataset"))?;
        let dir = path_arg(dir, "dir")?;
        save_dataset(&d.inner, &dir)?;
        Ok(())
    })
}

/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gb_dataset_node_count(dataset: *const GbDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.node_count())
}

/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gb_dataset_edge_count(dataset: *const GbDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.graph.edge_count())
}

/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gb_dataset_attr_count(dataset: *const GbDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.attributes.attr_count())
}

/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gb_dataset_class_count(dataset: *const GbDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.labels.class_count())
}

/// Copies the node labels into `labels`, which must hold at least
/// `gb_dataset_node_count` elements.
///
/// # Safety
/// `dataset` must be a live handle and `labels` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn gb_dataset_labels(dataset: *const GbDataset, labels: *mut usize, len: usize) -> GbStatus {
    guard(|| {
        let d = dataset.as_ref().ok_or_else(|| null("dataset"))?;
        let src = d.inner.labels.as_slice();
        out_slice(labels, len, src.len(), "labels")?.copy_from_slice(src);
        Ok(())
    })
}

/// Copies the undirected edges `(src[i], dst[i])`, with `src[i] < dst[i]`,
/// in lexicographic order. Both buffers must hold `gb_dataset_edge_count`
/// elements.
///
/// # Safety
/// `dataset` must be a live handle; `src` and `dst` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn gb_dataset_edges(
    dataset: *const GbDataset,
    src: *mut usize,
    dst: *mut usize,
    len: usize,
) -> GbStatus {
    guard(|| {
        let d = dataset.as_ref().ok_or_else(|| null("dataset"))?;
        let m = d.inner.graph.edge_count();
        let src = out_slice(src, len, m, "src")?;
        let dst = out_slice(dst, len, m, "dst")?;
        for (i, (u, v)) in d.inner.graph.edges().enumerate() {
            src[i] = u;
            dst[i] = v;
        }
        Ok(())
    })
}

/// # Safety
/// `dataset` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gb_dataset_free(dataset: *mut GbDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Extracts class and graph features from a dataset.
///
/// # Safety
/// `dataset` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gb_features_extract(dataset: *const GbDataset, out: *mut *mut GbFeatures) -> GbStatus {
    guard(|| {
        let d = dataset.as_ref().ok_or_else(|| null("dataset"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        boxed(out, GbFeatures { inner: extract(&d.inner)? });
        Ok(())
    })
}

/// Loads a `features.json`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gb_features_load(path: *const c_char, out: *mut *mut GbFeatures) -> GbStatus {
    guard(|| {
        let path = path_arg(path, "path")?;
        if out.is_null() {
            return Err(null("out"));
        }
        boxed(out, GbFeatures { inner: FeatureSet::load(&path)? });
        Ok(())
    })
}

/// Writes a `features.json`.
///
/// # Safety
/// `features` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gb_features_save(features: *const GbFeatures, path: *const c_char) -> GbStatus {
    guard(|| {
        let f = features.as_ref().ok_or_else(|| null("features"))?;
        let path = path_arg(path, "path")?;
        f.inner.save(&path)?;
        Ok(())
    })
}

/// # Safety
/// `features` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gb_features_class_count(features: *const GbFeatures) -> usize {
    features.as_ref().map_or(0, |f| f.inner.graph.class_count)
}

/// # Safety
/// `features` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gb_features_attr_count(features: *const GbFeatures) -> usize {
    features.as_ref().map_or(0, |f| f.inner.graph.attr_count)
}

/// Copies the k×k class preference mean, row-major, into `out`.
///
/// # Safety
/// `features` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn gb_features_preference_mean(
    features: *const GbFeatures,
    out: *mut f64,
    len: usize,
) -> GbStatus {
    guard(|| {
        let f = features.as_ref().ok_or_else(|| null("features"))?;
        let flat: Vec<f64> = f.inner.class.preference_mean.concat();
        out_slice(out, len, flat.len(), "out")?.copy_from_slice(&flat);
        Ok(())
    })
}

/// Copies the d×k attribute-class correlation, row-major, into `out`.
///
/// # Safety
/// `features` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn gb_features_attr_correlation(
    features: *const GbFeatures,
    out: *mut f64,
    len: usize,
) -> GbStatus {
    guard(|| {
        let f = features.as_ref().ok_or_else(|| null("features"))?;
        let flat: Vec<f64> = f.inner.class.attr_correlation.concat();
        out_slice(out, len, flat.len(), "out")?.copy_from_slice(&flat);
        Ok(())
    })
}

/// Applies the class-size (`alpha`), preference (`beta`) and attribute
/// mixing (`gamma`) transforms. Pass NaN to skip a transform.
///
/// # Safety
/// `features` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gb_features_transform(
    features: *const GbFeatures,
    alpha: f64,
    beta: f64,
    gamma: f64,
    out: *mut *mut GbFeatures,
) -> GbStatus {
    guard(|| {
        let f = features.as_ref().ok_or_else(|| null("features"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let given = |x: f64| (!x.is_nan()).then_some(x);
        let t = TransformConfig {
            alpha: given(alpha),
            beta: given(beta),
            gamma: given(gamma),
            uniform_attributes: false,
        };
        boxed(out, GbFeatures { inner: apply_transform(&f.inner, &t)? });
        Ok(())
    })
}

/// # Safety
/// `features` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gb_features_free(features: *mut GbFeatures) {
    if !features.is_null() {
        drop(Box::from_raw(features));
    }
}

unsafe fn label_slices<'a>(
    predicted: *const usize,
    truth: *const usize,
    n: usize,
) -> Result<(&'a [usize], &'a [usize]), Failure> {
    if n == 0 {
        return Ok((&[], &[]));
    }
    if predicted.is_null() {
        return Err(null("predicted"));
    }
    if truth.is_null() {
        return Err(null("truth"));
    }
    Ok((std::slice::from_raw_parts(predicted, n), std::slice::from_raw_parts(truth, n)))
}

/// Macro-averaged F1 over `k` classes.
///
/// # Safety
/// `predicted` and `truth` must be valid for `n` reads, `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn gb_f1_macro(
    predicted: *const usize,
    truth: *const usize,
    n: usize,
    k: usize,
    out: *mut f64,
) -> GbStatus {
    guard(|| {
        let (p, t) = label_slices(predicted, truth, n)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = f1_macro(p, t, k)?;
        Ok(())
    })
}

/// Fraction of positions where `predicted` equals `truth`.
///
/// # Safety
/// `predicted` and `truth` must be valid for `n` reads, `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn gb_accuracy(
    predicted: *const usize,
    truth: *const usize,
    n: usize,
    out: *mut f64,
) -> GbStatus {
    guard(|| {
        let (p, t) = label_slices(predicted, truth, n)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = accuracy(p, t);
        Ok(())
    })
}
