use std::ffi::CStr;
use std::ptr;

use genbound_ffi::*;

// The state cap is process-wide, so this runs in its own test binary.
#[test]
fn guard_maps_to_status() {
    gb_set_max_states(10);
    let mut h = ptr::null_mut();
    let st = unsafe { gb_setting_counterexample(3, 2, &mut h) };
    let mut out = ptr::null_mut();
    let cmi = if st == GbStatus::Ok { unsafe { gb_cmi_report_json(h, &mut out) } } else { st };
    gb_set_max_states(0);
    assert_eq!(cmi, GbStatus::GuardExceeded);
    let msg = unsafe { CStr::from_ptr(gb_last_error()) }.to_str().unwrap();
    assert!(msg.contains("size guard"));
    unsafe { gb_setting_free(h) };
}
