//! C ABI over the ecga pipeline. Sequences travel as opaque handles; every
//! entry point returns a status code and writes results through out
//! pointers. All functions are panic-safe: a panic inside the library maps
//! to `ECGA_STATUS_INTERNAL` instead of unwinding across the boundary.

use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ecga::idprng::{generate_initial, GenerationConfig};
use ecga::moga::{optimize, OptimizerConfig, StopReason};
use ecga::{stats, Error, Sequence};

/// Result of an FFI call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EcgaStatus {
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// An argument failed validation (unknown curve, bad lengths, ...).
    InvalidArgument = 2,
    /// The pipeline itself reported an error (domain or I/O).
    DomainError = 3,
    /// The destination buffer is too small.
    BufferTooSmall = 4,
    /// An internal invariant was violated.
    Internal = 5,
}

/// How an optimization run terminated.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EcgaStopReason {
    Optimal = 0,
    CapReached = 1,
}

/// Opaque sequence handle; create via `ecga_generate` or
/// `ecga_sequence_from_bytes`, destroy via `ecga_sequence_free`.
pub struct EcgaSequence {
    inner: Sequence,
}

fn classify(e: &Error) -> EcgaStatus {
    match e {
        Error::UnknownCurve(_)
        | Error::InvalidArgument(_)
        | Error::InvalidTriplet
        | Error::SeedTooShort(_)
        | Error::InvalidSymbolWidth(_)
        | Error::EmptyImage
        | Error::SequenceTooShort { .. }
        | Error::LengthMismatch { .. } => EcgaStatus::InvalidArgument,
        _ => EcgaStatus::DomainError,
    }
}

fn guard(f: impl FnOnce() -> EcgaStatus) -> EcgaStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(EcgaStatus::Internal)
}

/// Generates the initial (unoptimized) sequence.
///
/// `curve` is a NUL-terminated built-in curve name ("p256" or "p521");
/// `image`/`image_len` are the row-major 8-bit pixels; `bz_seed` must hold
/// at least 32 bytes. On success `*out` owns a new handle.
///
/// # Safety
/// All pointers must be valid for the stated lengths; `curve` must point to
/// a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ecga_generate(
    image: *const u8,
    image_len: usize,
    curve: *const c_char,
    phi: u16,
    psi: u16,
    varphi: u16,
    bz_seed: *const u8,
    bz_seed_len: usize,
    length: usize,
    out: *mut *mut EcgaSequence,
) -> EcgaStatus {
    if image.is_null() || curve.is_null() || bz_seed.is_null() || out.is_null() {
        return EcgaStatus::NullPointer;
    }
    let image = std::slice::from_raw_parts(image, image_len).to_vec();
    let bz_seed = std::slice::from_raw_parts(bz_seed, bz_seed_len).to_vec();
    let curve_name = match std::ffi::CStr::from_ptr(curve).to_str() {
        Ok(s) => s.to_string(),
        Err(_) => return EcgaStatus::InvalidArgument,
    };
    guard(|| {
        let curve = match ecga::field_ec::by_name(&curve_name) {
            Ok(c) => c,
            Err(e) => return classify(&e),
        };
        let cfg = GenerationConfig {
            image,
            curve,
            phi,
            psi,
            varphi,
            bz_seed,
            m: 8,
            target_length: length,
        };
        match generate_initial(&cfg) {
            Ok(seq) => {
                *out = Box::into_raw(Box::new(EcgaSequence { inner: seq }));
                EcgaStatus::Ok
            }
            Err(e) => classify(&e),
        }
    })
}

/// Wraps raw bytes (one 8-bit symbol per byte) in a sequence handle.
///
/// # Safety
/// `bytes` must be valid for `len` bytes; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecga_sequence_from_bytes(
    bytes: *const u8,
    len: usize,
    out: *mut *mut EcgaSequence,
) -> EcgaStatus {
    if bytes.is_null() || out.is_null() {
        return EcgaStatus::NullPointer;
    }
    let data = std::slice::from_raw_parts(bytes, len);
    guard(|| {
        *out = Box::into_raw(Box::new(EcgaSequence {
            inner: Sequence::from_bytes(data),
        }));
        EcgaStatus::Ok
    })
}

/// Hill-climbs `seq` and replaces `*out` with the optimized sequence;
/// `seq` itself is untouched. `reason` (optional) receives how the run
/// stopped.
///
/// # Safety
/// `seq` must be a live handle; `out` must be valid; `reason` may be null.
#[no_mangle]
pub unsafe extern "C" fn ecga_optimize(
    seq: *const EcgaSequence,
    rng_seed: u64,
    max_generations: u64,
    out: *mut *mut EcgaSequence,
    reason: *mut EcgaStopReason,
) -> EcgaStatus {
    if seq.is_null() || out.is_null() {
        return EcgaStatus::NullPointer;
    }
    let seq = &(*seq).inner;
    guard(|| {
        let cfg = OptimizerConfig {
            max_generations,
            rng_seed,
            ..OptimizerConfig::default()
        };
        match optimize(seq, &cfg) {
            Ok(outcome) => {
                if !reason.is_null() {
                    *reason = match outcome.reason {
                        StopReason::Optimal => EcgaStopReason::Optimal,
                        StopReason::CapReached => EcgaStopReason::CapReached,
                    };
                }
                *out = Box::into_raw(Box::new(EcgaSequence {
                    inner: outcome.sequence,
                }));
                EcgaStatus::Ok
            }
            Err(e) => classify(&e),
        }
    })
}

/// Length of the sequence in symbols; 0 for a null handle.
///
/// # Safety
/// `seq` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ecga_sequence_len(seq: *const EcgaSequence) -> usize {
    if seq.is_null() {
        return 0;
    }
    (*seq).inner.len()
}

/// Copies the sequence into `buf` (one byte per symbol). `buf_len` must be
/// at least `ecga_sequence_len(seq)`.
///
/// # Safety
/// `seq` must be a live handle; `buf` must be valid for `buf_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ecga_sequence_copy_bytes(
    seq: *const EcgaSequence,
    buf: *mut u8,
    buf_len: usize,
) -> EcgaStatus {
    if seq.is_null() || buf.is_null() {
        return EcgaStatus::NullPointer;
    }
    let seq = &(*seq).inner;
    guard(|| {
        if buf_len < seq.len() {
            return EcgaStatus::BufferTooSmall;
        }
        match seq.to_bytes() {
            Ok(bytes) => {
                ptr::copy_nonoverlapping(bytes.as_ptr(), buf, bytes.len());
                EcgaStatus::Ok
            }
            Err(e) => classify(&e),
        }
    })
}

/// Shannon entropy of the symbol distribution, in bits.
///
/// # Safety
/// `seq` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecga_sequence_entropy(
    seq: *const EcgaSequence,
    out: *mut f64,
) -> EcgaStatus {
    if seq.is_null() || out.is_null() {
        return EcgaStatus::NullPointer;
    }
    let seq = &(*seq).inner;
    guard(|| {
        *out = stats::entropy(seq);
        EcgaStatus::Ok
    })
}

/// Least period of the sequence.
///
/// # Safety
/// `seq` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecga_sequence_period(
    seq: *const EcgaSequence,
    out: *mut usize,
) -> EcgaStatus {
    if seq.is_null() || out.is_null() {
        return EcgaStatus::NullPointer;
    }
    let seq = &(*seq).inner;
    guard(|| {
        *out = stats::period(seq);
        EcgaStatus::Ok
    })
}

/// Hurst exponent (rescaled-range estimate); needs at least 64 symbols.
///
/// # Safety
/// `seq` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecga_sequence_hurst(
    seq: *const EcgaSequence,
    out: *mut f64,
) -> EcgaStatus {
    if seq.is_null() || out.is_null() {
        return EcgaStatus::NullPointer;
    }
    let seq = &(*seq).inner;
    guard(|| match stats::hurst_rs(seq) {
        Ok(h) => {
            *out = h;
            EcgaStatus::Ok
        }
        Err(e) => classify(&e),
    })
}

/// Bit-change rate between two equal-length sequences, in percent.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecga_nbcr(
    a: *const EcgaSequence,
    b: *const EcgaSequence,
    out: *mut f64,
) -> EcgaStatus {
    if a.is_null() || b.is_null() || out.is_null() {
        return EcgaStatus::NullPointer;
    }
    let (a, b) = (&(*a).inner, &(*b).inner);
    guard(|| match stats::nbcr(a, b) {
        Ok(v) => {
            *out = v;
            EcgaStatus::Ok
        }
        Err(e) => classify(&e),
    })
}

/// Pearson correlation between two equal-length sequences.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecga_pearson(
    a: *const EcgaSequence,
    b: *const EcgaSequence,
    out: *mut f64,
) -> EcgaStatus {
    if a.is_null() || b.is_null() || out.is_null() {
        return EcgaStatus::NullPointer;
    }
    let (a, b) = (&(*a).inner, &(*b).inner);
    guard(|| match stats::pearson(a, b) {
        Ok(v) => {
            *out = v;
            EcgaStatus::Ok
        }
        Err(e) => classify(&e),
    })
}

/// Releases a handle. Null is a no-op; a handle must not be used after
/// being freed.
///
/// # Safety
/// `seq` must be null or a handle returned by this library that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn ecga_sequence_free(seq: *mut EcgaSequence) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}
