use ppg2ecg_demo::{detect_peaks, detect_peaks_data, filter_response, filter_response_data, spectral_loss, spectral_loss_data, WINDOW};
use serde_json::Value;

fn gain_at(r: &ppg2ecg_demo::FilterResponse, hz: f64) -> f64 {
    let i = r.freq_hz.iter().position(|&f| f >= hz).unwrap();
    r.gain_db[i]
}

#[test]
fn filter_responses_pass_the_band_and_reject_outside() {
    let ppg = filter_response_data("ppg", 1025).unwrap();
    assert_eq!(ppg.freq_hz.len(), 1025);
    assert_eq!(ppg.freq_hz[1024], 64.0);
    assert!(gain_at(&ppg, 2.0).abs() < 3.0);
    assert!(gain_at(&ppg, 16.0) < -20.0);
    assert!(gain_at(&ppg, 0.2) < -20.0);

    let ecg = filter_response_data("ecg", 1025).unwrap();
    assert!(gain_at(&ecg, 12.0).abs() < 3.0);
    assert!(gain_at(&ecg, 1.0) < -20.0);
    assert!(ecg.gain_db.iter().all(|g| g.is_finite()));
}

#[test]
fn bad_requests_return_json_errors() {
    let v: Value = serde_json::from_str(&filter_response("eeg", 10)).unwrap();
    assert!(v["error"].as_str().unwrap().contains("eeg"));
    let v: Value = serde_json::from_str(&detect_peaks(900.0, 20.0, 1)).unwrap();
    assert!(v["error"].is_string());
    let v: Value = serde_json::from_str(&spectral_loss(72.0, 40, 0.0, 1)).unwrap();
    assert!(v["error"].is_null());
    assert_eq!(v["ecg"].as_array().unwrap().len(), WINDOW);
}

#[test]
fn spectral_loss_ignores_circular_shifts() {
    for shift in [0, 1, 37, 255, 511] {
        let d = spectral_loss_data(75.0, shift, 0.0, 0).unwrap();
        assert!(d.loss_shifted <= 1e-5 * d.loss_silent, "shift {shift}: {} vs {}", d.loss_shifted, d.loss_silent);
        assert_eq!(d.spectrum.len(), WINDOW / 2);
    }
    let quiet = spectral_loss_data(75.0, 37, 0.02, 3).unwrap();
    let loud = spectral_loss_data(75.0, 37, 0.2, 3).unwrap();
    assert!(quiet.loss_noisy > quiet.loss_shifted, "{} vs {}", quiet.loss_noisy, quiet.loss_shifted);
    assert!(quiet.loss_noisy < loud.loss_noisy, "{} vs {}", quiet.loss_noisy, loud.loss_noisy);
    assert_eq!(loud.loss_noisy, spectral_loss_data(75.0, 37, 0.2, 3).unwrap().loss_noisy);
}

#[test]
fn detectors_recover_the_toy_heart_rate() {
    for bpm in [55.0, 80.0, 110.0] {
        let d = detect_peaks_data(bpm, 20.0, 7).unwrap();
        assert_eq!(d.ecg.len(), WINDOW);
        let ecg = d.hr_ecg.unwrap();
        let ppg = d.hr_ppg.unwrap();
        assert!((ecg - bpm).abs() <= 2.0, "{bpm}: ecg {ecg}");
        assert!((ppg - bpm).abs() <= 5.0, "{bpm}: ppg {ppg}");
    }
}
