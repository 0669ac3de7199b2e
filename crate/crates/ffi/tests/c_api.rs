use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use semcom_ffi::*;

fn last_error() -> String {
    let p = semcom_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn scalar_measures() {
    let mut h = 0.0;
    let probs = [0.9, 0.1];
    assert_eq!(
        unsafe { semcom_entropy(probs.as_ptr(), 2, &mut h) },
        SemcomStatus::Ok
    );
    assert!((h - 0.468_995_593_589_281_2).abs() < 1e-12);

    let joint = [0.4, 0.1, 0.1, 0.4];
    let mut mi = 0.0;
    assert_eq!(
        unsafe { semcom_mutual_information(joint.as_ptr(), 2, 2, &mut mi) },
        SemcomStatus::Ok
    );
    assert!((mi - 0.278_071_905_112_637_7).abs() < 1e-12);

    let (p, q) = ([0.5, 0.5], [0.5, 0.5]);
    let mut kl = 1.0;
    assert_eq!(
        unsafe { semcom_kl_divergence(p.as_ptr(), q.as_ptr(), 2, &mut kl) },
        SemcomStatus::Ok
    );
    assert_eq!(kl, 0.0);

    assert!((semcom_capacity_lower(20.0) - 3.329_105_741_375_897_3).abs() < 1e-12);
}

#[test]
fn errors_carry_codes_and_messages() {
    let bad = [0.5, 0.6];
    let mut h = 0.0;
    assert_eq!(
        unsafe { semcom_entropy(bad.as_ptr(), 2, &mut h) },
        SemcomStatus::InvalidArgument
    );
    assert!(last_error().contains("sum"), "{}", last_error());

    assert_eq!(
        unsafe { semcom_entropy(ptr::null(), 2, &mut h) },
        SemcomStatus::NullPointer
    );
    let ok = [1.0];
    assert_eq!(
        unsafe { semcom_entropy(ok.as_ptr(), 1, ptr::null_mut()) },
        SemcomStatus::NullPointer
    );

    let mut gap = 0.0;
    assert_eq!(
        unsafe { semcom_kl_gap(1.0, -1.0, 0.01, &mut gap) },
        SemcomStatus::InvalidArgument
    );
}

#[test]
fn rdp_binary_point() {
    let alphabet = [0.0, 1.0];
    let probs = [0.5, 0.5];
    let mut point = SemcomRdpPoint::default();
    let status = unsafe {
        semcom_rdp_solve(
            alphabet.as_ptr(),
            probs.as_ptr(),
            2,
            ptr::null(),
            0,
            9f64.ln(),
            0.0,
            0.0,
            0,
            &mut point,
        )
    };
    assert_eq!(status, SemcomStatus::Ok);
    assert!(point.converged);
    assert!((point.distortion - 0.1).abs() < 1e-9);
    assert!((point.rate_bits - 0.531_004_406_410_718_8).abs() < 1e-9);
}

#[test]
fn kl_gap_matches_reference() {
    let mut gap = 0.0;
    assert_eq!(
        unsafe { semcom_kl_gap(-1.0, 1.0, 0.01, &mut gap) },
        SemcomStatus::Ok
    );
    assert!((gap - 0.145_632_679_040_886_8).abs() < 1e-7, "{gap}");
}

#[test]
fn channel_handle_roundtrip() {
    let json = CString::new(
        r#"{"noise": {"a": -0.5, "b": 0.5, "sigma_p2": 0.01}, "snr_db": 10, "seed": 4}"#,
    )
    .unwrap();
    let mut ch = ptr::null_mut();
    assert_eq!(
        unsafe { semcom_channel_from_json(json.as_ptr(), &mut ch) },
        SemcomStatus::Ok
    );
    let x = [1.0, -1.0, 1.0, -1.0];
    let (mut y1, mut y2, mut g) = ([0.0; 4], [0.0; 4], [0.0; 4]);
    unsafe {
        assert_eq!(
            semcom_channel_transmit(ch, x.as_ptr(), 4, 9, y1.as_mut_ptr(), g.as_mut_ptr()),
            SemcomStatus::Ok
        );
        assert_eq!(
            semcom_channel_transmit(ch, x.as_ptr(), 4, 9, y2.as_mut_ptr(), ptr::null_mut()),
            SemcomStatus::Ok
        );
        assert_eq!(
            semcom_channel_set_rayleigh(ch, -1.0),
            SemcomStatus::InvalidArgument
        );
        assert_eq!(semcom_channel_set_rayleigh(ch, 1.0), SemcomStatus::Ok);
        semcom_channel_free(ch);
    }
    assert_eq!(y1, y2);
    assert_eq!(g, [1.0; 4]);
    assert_ne!(y1, x);

    let broken = CString::new("{not json").unwrap();
    let mut ch = ptr::null_mut();
    assert_eq!(
        unsafe { semcom_channel_from_json(broken.as_ptr(), &mut ch) },
        SemcomStatus::Parse
    );
    assert!(ch.is_null());
}

#[test]
fn frame_encode_decode() {
    let features: Vec<f32> = (0..32).map(|i| i as f32 * 0.5).collect();
    let mask: Vec<u8> = (0..32).map(|i| (i < 8) as u8).collect();
    let mut frame = ptr::null_mut();
    unsafe {
        assert_eq!(
            semcom_frame_new(77, features.as_ptr(), 32, mask.as_ptr(), &mut frame),
            SemcomStatus::Ok
        );
        let mut buf = SemcomBuffer {
            data: ptr::null_mut(),
            len: 0,
        };
        assert_eq!(semcom_frame_encode(frame, &mut buf), SemcomStatus::Ok);
        assert_eq!(buf.len, 52);

        let mut decoded = ptr::null_mut();
        let mut used = 0;
        assert_eq!(
            semcom_frame_decode(buf.data, buf.len, &mut decoded, &mut used),
            SemcomStatus::Ok
        );
        assert_eq!(used, 52);
        assert_eq!(semcom_frame_len(decoded), 32);
        assert_eq!(semcom_frame_id(decoded), 77);
        assert!(semcom_frame_is_selected(decoded, 7));
        assert!(!semcom_frame_is_selected(decoded, 8));
        let mut out = [1.0f32; 32];
        assert_eq!(
            semcom_frame_features(decoded, out.as_mut_ptr(), 32),
            SemcomStatus::Ok
        );
        assert_eq!(&out[..8], &features[..8]);
        assert!(out[8..].iter().all(|&v| v == 0.0));
        assert_eq!(
            semcom_frame_features(decoded, out.as_mut_ptr(), 31),
            SemcomStatus::InvalidArgument
        );

        let mut again = ptr::null_mut();
        assert_eq!(
            semcom_frame_decode(buf.data, 10, &mut again, ptr::null_mut()),
            SemcomStatus::Wire
        );
        assert!(last_error().contains("truncated"));

        semcom_frame_free(decoded);
        semcom_frame_free(frame);
        semcom_buffer_free(buf);
        semcom_frame_free(ptr::null_mut());
    }
}

#[test]
fn pipeline_over_stream() {
    let features: Vec<f32> = (0..16).map(|i| (i as f32).cos()).collect();
    let mut stream = Vec::new();
    unsafe {
        for id in 0..3u64 {
            let mut frame = ptr::null_mut();
            assert_eq!(
                semcom_frame_new(id, features.as_ptr(), 16, ptr::null(), &mut frame),
                SemcomStatus::Ok
            );
            let mut buf = SemcomBuffer {
                data: ptr::null_mut(),
                len: 0,
            };
            semcom_frame_encode(frame, &mut buf);
            stream.extend_from_slice(std::slice::from_raw_parts(buf.data, buf.len));
            semcom_buffer_free(buf);
            semcom_frame_free(frame);
        }
        let mut ch = ptr::null_mut();
        assert_eq!(
            semcom_channel_new(-0.5, 0.5, 0.01, f64::INFINITY, 0, &mut ch),
            SemcomStatus::Ok
        );
        let mut out = SemcomBuffer {
            data: ptr::null_mut(),
            len: 0,
        };
        let mut report = SemcomRunReport::default();
        let status = semcom_pipeline_run(
            ch,
            stream.as_ptr(),
            stream.len(),
            SemcomCompletion::PriorMean,
            0,
            &mut out,
            &mut report,
        );
        assert_eq!(status, SemcomStatus::Ok);
        assert_eq!(report.frames_sent, 3);
        assert_eq!(report.frames_failed, 0);
        assert_eq!(report.payload_bytes, stream.len() as u64);
        assert_eq!(report.psnr_db, 100.0);
        assert!(report.measured_snr_db.is_nan());
        assert_eq!(std::slice::from_raw_parts(out.data, out.len), &stream[..]);
        semcom_buffer_free(out);
        semcom_channel_free(ch);
    }
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/semcom.h");
    let text = std::fs::read_to_string(&header).expect("header generated by build script");
    for name in [
        "semcom_last_error_message",
        "semcom_channel_new",
        "semcom_frame_decode",
        "semcom_pipeline_run",
        "typedef struct SemcomChannel SemcomChannel;",
        "SEMCOM_STATUS_OK = 0",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }

    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found, skipping syntax check");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("check.c");
    std::fs::write(&src, "#include \"semcom.h\"\nint main(void) { return semcom_capacity_lower(0.0) > 0.0 ? 0 : 1; }\n").unwrap();
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| {
            Command::new(c)
                .arg("--version")
                .output()
                .is_ok_and(|o| o.status.success())
        })
        .ok_or(())
}
