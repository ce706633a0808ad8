//! C ABI over `polar_bp`.
//!
//! Codes and decoders are opaque heap handles created by `*_new`/`*_construct`
//! and released by the matching `*_free`. Every fallible call returns a
//! [`PbStatus`]; on failure [`pb_last_error`] describes the problem for the
//! calling thread. No call unwinds across the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use polar_bp::decoders::rng_for;
use polar_bp::{BoxplusMode, CodeSpec, CrcConfig, Decoder, DecoderParams, Error, Variant};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    LengthMismatch = 3,
    DecodeFailed = 4,
    Panic = 5,
}

/// Decoder variant selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbVariant {
    Bp = 0,
    Fpbp = 1,
    Ppbp = 2,
    Nabp = 3,
}

/// Decoder parameters; fill with [`pb_decoder_params_default`] and adjust.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PbDecoderParams {
    pub variant: PbVariant,
    pub max_iters: usize,
    pub reset_iters: usize,
    pub q_max: usize,
    pub p_range: usize,
    pub p_level: usize,
    pub d: usize,
    pub n_min: usize,
    pub sigma2_noise: f64,
    pub noise_interval: usize,
    pub warmup: usize,
    /// Nonzero selects the exact boxplus instead of min-sum.
    pub exact_boxplus: u8,
    pub llr_max: f64,
}

/// Per-decode summary.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PbDecodeResult {
    pub iterations_used: usize,
    pub permutations_used: usize,
    pub stopped_early: u8,
    pub crc_pass: u8,
}

/// A constructed polar code with its CRC.
pub struct PbCode {
    spec: CodeSpec,
    crc: CrcConfig,
}

/// A decoder bound to one code. Each call to [`pb_decoder_decode`] draws
/// from the next stream of the seed given at creation.
pub struct PbDecoder {
    decoder: Decoder,
    seed: u64,
    next_stream: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(e: &Error) -> PbStatus {
    match e {
        Error::LengthMismatch { .. } => PbStatus::LengthMismatch,
        _ => PbStatus::InvalidArgument,
    }
}

/// Runs `f`, recording errors and turning panics into [`PbStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), (PbStatus, String)>) -> PbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PbStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PbStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (PbStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (PbStatus, String) {
    (PbStatus::NullPointer, format!("{what} is null"))
}

fn variant_of(v: PbVariant) -> Variant {
    match v {
        PbVariant::Bp => Variant::Bp,
        PbVariant::Fpbp => Variant::Fpbp,
        PbVariant::Ppbp => Variant::Ppbp,
        PbVariant::Nabp => Variant::Nabp,
    }
}

fn pb_variant(v: Variant) -> PbVariant {
    match v {
        Variant::Bp => PbVariant::Bp,
        Variant::Fpbp => PbVariant::Fpbp,
        Variant::Ppbp => PbVariant::Ppbp,
        Variant::Nabp => PbVariant::Nabp,
    }
}

/// Message for the last failed call on this thread; empty after a
/// successful one. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn pb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a code of length `n` with `k` non-frozen positions (CRC included)
/// designed at `design_ebn0_db`. `crc_len` is 0 or 24.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn pb_code_construct(
    n: usize,
    k: usize,
    crc_len: usize,
    design_ebn0_db: f64,
    out: *mut *mut PbCode,
) -> PbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let crc = CrcConfig::for_length(crc_len).map_err(lib_err)?;
        let spec = CodeSpec::construct(n, k, crc_len, design_ebn0_db).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(PbCode { spec, crc }));
        Ok(())
    })
}

/// Releases a code. Null is ignored.
///
/// # Safety
/// `code` must come from [`pb_code_construct`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pb_code_free(code: *mut PbCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Block length N, or 0 for a null handle.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pb_code_block_len(code: *const PbCode) -> usize {
    code.as_ref().map_or(0, |c| c.spec.block_len)
}

/// Payload bits per frame, K minus the CRC length; 0 for a null handle.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pb_code_payload_len(code: *const PbCode) -> usize {
    code.as_ref().map_or(0, |c| c.spec.payload_len())
}

/// Writes the frozen mask (1 = frozen) into `mask[0..n]`.
///
/// # Safety
/// `code` must be a live handle and `mask` valid for `mask_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn pb_code_frozen_mask(code: *const PbCode, mask: *mut u8, mask_len: usize) -> PbStatus {
    guard(|| {
        let code = code.as_ref().ok_or_else(|| null("code"))?;
        if mask.is_null() {
            return Err(null("mask"));
        }
        let n = code.spec.block_len;
        if mask_len != n {
            return Err(lib_err(Error::LengthMismatch { expected: n, got: mask_len }));
        }
        let out = std::slice::from_raw_parts_mut(mask, n);
        for (o, &f) in out.iter_mut().zip(code.spec.frozen()) {
            *o = u8::from(f);
        }
        Ok(())
    })
}

/// Attaches the CRC to `payload`, places it on the non-frozen positions and
/// writes the codeword to `codeword[0..n]`. Bits are bytes holding 0 or 1.
///
/// # Safety
/// `code` must be a live handle; `payload` valid for `payload_len` bytes and
/// `codeword` for `codeword_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn pb_code_encode(
    code: *const PbCode,
    payload: *const u8,
    payload_len: usize,
    codeword: *mut u8,
    codeword_len: usize,
) -> PbStatus {
    guard(|| {
        let code = code.as_ref().ok_or_else(|| null("code"))?;
        if payload.is_null() {
            return Err(null("payload"));
        }
        if codeword.is_null() {
            return Err(null("codeword"));
        }
        let info = std::slice::from_raw_parts(payload, payload_len);
        if info.iter().any(|&b| b > 1) {
            return Err((PbStatus::InvalidArgument, "payload bits must be 0 or 1".into()));
        }
        if codeword_len != code.spec.block_len {
            return Err(lib_err(Error::LengthMismatch { expected: code.spec.block_len, got: codeword_len }));
        }
        let u = code.spec.assemble_u(info, &code.crc).map_err(lib_err)?;
        let x = code.spec.encode(&u).map_err(lib_err)?;
        std::slice::from_raw_parts_mut(codeword, codeword_len).copy_from_slice(&x);
        Ok(())
    })
}

/// Default parameters of `variant` for a code with `stages = log2 N`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn pb_decoder_params_default(
    variant: PbVariant,
    stages: usize,
    out: *mut PbDecoderParams,
) -> PbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = match variant_of(variant) {
            Variant::Fpbp => DecoderParams::fpbp(stages, 100, 200),
            v => DecoderParams::new(v, stages),
        };
        *out = PbDecoderParams {
            variant: pb_variant(p.variant),
            max_iters: p.max_iters,
            reset_iters: p.reset_iters,
            q_max: p.q_max,
            p_range: p.p_range,
            p_level: p.p_level,
            d: p.d,
            n_min: p.n_min,
            sigma2_noise: p.sigma2_noise,
            noise_interval: p.noise_interval,
            warmup: p.warmup,
            exact_boxplus: u8::from(p.mode == BoxplusMode::Exact),
            llr_max: p.llr_max,
        };
        Ok(())
    })
}

/// Creates a decoder for `code`. The code handle is copied and may be freed
/// afterwards.
///
/// # Safety
/// `code` must be a live handle, `params` valid for one read and `out` for
/// one write.
#[no_mangle]
pub unsafe extern "C" fn pb_decoder_new(
    code: *const PbCode,
    params: *const PbDecoderParams,
    seed: u64,
    out: *mut *mut PbDecoder,
) -> PbStatus {
    guard(|| {
        let code = code.as_ref().ok_or_else(|| null("code"))?;
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let mut params = DecoderParams::new(variant_of(p.variant), code.spec.stages);
        params.max_iters = p.max_iters;
        params.reset_iters = p.reset_iters;
        params.q_max = p.q_max;
        params.p_range = p.p_range;
        params.p_level = p.p_level;
        params.d = p.d;
        params.n_min = p.n_min;
        params.sigma2_noise = p.sigma2_noise;
        params.noise_interval = p.noise_interval;
        params.warmup = p.warmup;
        params.mode = if p.exact_boxplus != 0 { BoxplusMode::Exact } else { BoxplusMode::MinSum };
        params.llr_max = p.llr_max;
        let decoder = Decoder::new(code.spec.clone(), code.crc, params).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(PbDecoder { decoder, seed, next_stream: 0 }));
        Ok(())
    })
}

/// Releases a decoder. Null is ignored.
///
/// # Safety
/// `decoder` must come from [`pb_decoder_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pb_decoder_free(decoder: *mut PbDecoder) {
    if !decoder.is_null() {
        drop(Box::from_raw(decoder));
    }
}

/// Decodes one frame of channel LLRs (positive favours 0). Writes the
/// payload estimate to `payload_out` and, if `result` is non-null, the
/// decode summary. A frame that fails its CRC is still `PB_STATUS_OK`;
/// check `crc_pass`.
///
/// # Safety
/// `decoder` must be a live handle not used concurrently; `llr` valid for
/// `llr_len` reads, `payload_out` for `payload_len` writes, `result` null or
/// valid for one write.
#[no_mangle]
pub unsafe extern "C" fn pb_decoder_decode(
    decoder: *mut PbDecoder,
    llr: *const f64,
    llr_len: usize,
    payload_out: *mut u8,
    payload_len: usize,
    result: *mut PbDecodeResult,
) -> PbStatus {
    guard(|| {
        let dec = decoder.as_mut().ok_or_else(|| null("decoder"))?;
        if llr.is_null() {
            return Err(null("llr"));
        }
        if payload_out.is_null() {
            return Err(null("payload_out"));
        }
        let spec = dec.decoder.spec();
        if llr_len != spec.block_len {
            return Err(lib_err(Error::LengthMismatch { expected: spec.block_len, got: llr_len }));
        }
        if payload_len != spec.payload_len() {
            return Err(lib_err(Error::LengthMismatch { expected: spec.payload_len(), got: payload_len }));
        }
        let llr = std::slice::from_raw_parts(llr, llr_len);
        if llr.iter().any(|v| v.is_nan()) {
            return Err((PbStatus::InvalidArgument, "LLR input contains NaN".into()));
        }
        let mut rng = rng_for(dec.seed, dec.next_stream);
        dec.next_stream += 1;
        let outcome = dec.decoder.decode(llr, &mut rng).map_err(|e| (PbStatus::DecodeFailed, e.to_string()))?;
        std::slice::from_raw_parts_mut(payload_out, payload_len).copy_from_slice(&outcome.info_hat);
        if let Some(r) = result.as_mut() {
            *r = PbDecodeResult {
                iterations_used: outcome.iterations_used,
                permutations_used: outcome.permutations_used,
                stopped_early: u8::from(outcome.stopped_early),
                crc_pass: u8::from(outcome.crc_pass),
            };
        }
        Ok(())
    })
}
