use replisure_web::{assess_json, curves_json, power_profile_json, study_labels};
use serde_json::Value;

#[test]
fn labels_cover_bundled_data() {
    let v: Vec<String> = serde_json::from_str(&study_labels()).unwrap();
    assert_eq!(v.len(), 29);
    assert!(v.iter().any(|l| l == "TRITON-TIMI"));
}

#[test]
fn curves_rows() {
    let v: Value = serde_json::from_str(&curves_json(0.01, 1.0, 0.05, 50.0, 20).unwrap()).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 20);
    assert_eq!(rows[19]["p_ttr"], 0.01);
    assert!(curves_json(0.7, 1.0, 0.05, 50.0, 20).is_err());
}

#[test]
fn power_profile_summary() {
    let v: Value = serde_json::from_str(&power_profile_json("TRITON-TIMI", 0.0, 0.025, 11).unwrap()).unwrap();
    let cp = v["summary"]["conditional_power"].as_f64().unwrap();
    assert!((cp - 0.981).abs() < 0.005);
    assert!(power_profile_json("nope", 0.0, 0.025, 11).is_err());
}

#[test]
fn custom_pair_matches_bundled_row() {
    // PLATO entered by hand.
    let v: Value =
        serde_json::from_str(&assess_json(1.0, [0.84, 0.77, 0.92], [0.92, 0.83, 1.02], 0.025).unwrap()).unwrap();
    let p_s = v["assessment"]["p_s_controlled"].as_f64().unwrap();
    assert!((p_s - 0.031).abs() < 0.005, "{p_s}");
    assert_eq!(v["assessment"]["success_sceptical"], false);
    assert!((v["interval"]["sceptical_upper_hr"].as_f64().unwrap() - 0.96).abs() < 0.02);
    assert!(v["power"]["cp_ttr"].as_f64().unwrap() > 0.9);
    assert!(assess_json(1.0, [0.84, 0.92, 0.77], [0.92, 0.83, 1.02], 0.025).is_err());
    assert!(assess_json(0.8, [0.84, 0.77, 0.92], [0.92, 0.83, 1.02], 0.025).is_err());
}
