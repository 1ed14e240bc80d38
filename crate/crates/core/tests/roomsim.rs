use dereverb_core::roomsim::{
    binaural_rir_pair, calibrate_reflection, image_source_rir, schroeder_rt60, ArrayGeometry, HeadModel, RoomSpec,
};
use dereverb_core::{Real, Rir};
type Complex64 = dereverb_core::Complex<f64>;

const FS: u32 = 16_000;
const C: f64 = 343.0;

fn energy(r: &Rir) -> f64 {
    r.taps().iter().map(|v| v * v).sum()
}

/// DTFT magnitude at one frequency, evaluated directly.
fn response(taps: &[f64], freq_hz: f64) -> f64 {
    let w = -2.0 * std::f64::consts::PI * freq_hz / f64::from(FS);
    taps.iter()
        .enumerate()
        .map(|(n, &v)| Complex64::from_polar(v, w * n as f64))
        .sum::<Complex64>()
        .norm()
}

#[test]
fn order_zero_is_a_single_scaled_impulse() {
    // 70 samples of travel: integer delay puts the whole kernel on one tap.
    let r = C * 70.0 / f64::from(FS);
    let room = RoomSpec::<f64>::new([6.0, 5.0, 3.0], 0.5, FS).unwrap().with_max_order(0).unwrap();
    let rir = image_source_rir(&room, [1.0, 2.0, 1.5], [1.0 + r, 2.0, 1.5]).unwrap();
    let (peak, &value) = rir.taps().iter().enumerate().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).unwrap();
    assert_eq!(peak, 70);
    assert!((value - 1.0 / r).abs() < 1e-12);
    for (n, v) in rir.taps().iter().enumerate() {
        if n != 70 {
            assert!(v.abs() < 1e-12, "tap {n} = {v}");
        }
    }
}

#[test]
fn zero_reflection_equals_anechoic() {
    let base = RoomSpec::<f64>::new([6.0, 5.0, 3.0], 0.5, FS).unwrap();
    let dead = base.clone().with_wall_reflection(0.0).unwrap().with_max_order(10).unwrap();
    let anechoic = base.with_max_order(0).unwrap();
    let (s, m) = ([1.3, 2.1, 1.4], [3.2, 2.9, 1.6]);
    let a = image_source_rir(&dead, s, m).unwrap();
    let b = image_source_rir(&anechoic, s, m).unwrap();
    let len = a.len().max(b.len());
    for (x, y) in a.padded(len).taps().iter().zip(b.padded(len).taps()) {
        assert!((x - y).abs() < 1e-15);
    }
}

#[test]
fn cubic_room_mirror_symmetry() {
    // Swapping x and y of both source and mic leaves a cubic room's response unchanged.
    let room = RoomSpec::<f64>::new([5.0, 5.0, 5.0], 0.4, FS).unwrap().with_max_order(8).unwrap();
    let a = image_source_rir(&room, [1.1, 2.3, 1.7], [3.4, 2.8, 2.2]).unwrap();
    let b = image_source_rir(&room, [2.3, 1.1, 1.7], [2.8, 3.4, 2.2]).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.taps().iter().zip(b.taps()) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn broadside_source_gives_identical_channels() {
    let room = RoomSpec::<f64>::new([6.6, 5.7, 2.3], 0.47, FS).unwrap();
    let geom = ArrayGeometry::new([3.0, 2.85, 1.15], 0.0, 1.5).unwrap();
    let (l, r) = binaural_rir_pair(&room, &geom, HeadModel::None).unwrap();
    for (x, y) in l.taps().iter().zip(r.taps()) {
        assert!((x - y).abs() < 1e-9);
    }
}

#[test]
fn endfire_source_delays_far_mic_by_spacing() {
    let room = RoomSpec::<f64>::new([6.6, 5.7, 2.3], 0.47, FS).unwrap().with_max_order(0).unwrap();
    let geom = ArrayGeometry::new([3.0, 2.85, 1.15], 90.0, 1.5).unwrap();
    let (l, r) = binaural_rir_pair(&room, &geom, HeadModel::None).unwrap();
    let lag = l.direct_tap_index() as f64 - r.direct_tap_index() as f64;
    let expected = 0.145 / C * f64::from(FS);
    assert!((lag - expected).abs() <= 1.0, "lag {lag} vs {expected}");
}

#[test]
fn head_shadow_is_stronger_at_high_frequencies() {
    let room = RoomSpec::<f64>::new([6.6, 5.7, 2.3], 0.47, FS).unwrap().with_max_order(0).unwrap();
    let geom = ArrayGeometry::new([3.0, 2.85, 1.15], 90.0, 1.5).unwrap();
    let (l, r) = binaural_rir_pair(&room, &geom, HeadModel::Spherical).unwrap();
    let ild = |f: f64| 20.0 * (response(r.taps(), f) / response(l.taps(), f)).log10();
    let low: f64 = [300.0, 700.0, 1200.0].iter().map(|&f| ild(f)).sum::<f64>() / 3.0;
    let high: f64 = [4500.0, 6000.0, 7500.0].iter().map(|&f| ild(f)).sum::<f64>() / 3.0;
    assert!(high > low + 3.0, "high {high:.2} dB, low {low:.2} dB");
}

#[test]
fn energy_never_decreases_with_order() {
    let base = RoomSpec::<f64>::new([5.0, 4.0, 3.0], 0.5, FS).unwrap();
    let (s, m) = ([1.2, 1.7, 1.3], [3.1, 2.4, 1.6]);
    let mut last = 0.0;
    for order in [0, 1, 2, 4, 8, 16] {
        let e = energy(&image_source_rir(&base.clone().with_max_order(order).unwrap(), s, m).unwrap());
        assert!(e >= last * (1.0 - 1e-9), "order {order}: {e} < {last}");
        last = e;
    }
}

#[test]
fn calibrated_room_hits_target_rt60() {
    let room = calibrate_reflection(&RoomSpec::<f64>::new([6.6, 5.7, 2.3], 0.47, FS).unwrap()).unwrap();
    let geom = ArrayGeometry::centered_in(&room, 30.0, 1.5).unwrap();
    let (l, r) = binaural_rir_pair(&room, &geom, HeadModel::None).unwrap();
    for rir in [l, r] {
        let est = schroeder_rt60(&rir).unwrap();
        assert!((est / 0.47 - 1.0).abs() <= 0.2, "estimated {est}");
    }
}

#[test]
fn generic_over_single_precision() {
    let room = RoomSpec::<f32>::new([6.6, 5.7, 2.3], 0.3, FS).unwrap().with_max_order(3).unwrap();
    let a = image_source_rir(&room, [1.0, 2.0, 1.0], [3.0, 3.0, 1.2]).unwrap();
    let room64 = RoomSpec::<f64>::new([6.6, 5.7, 2.3], 0.3, FS).unwrap().with_max_order(3).unwrap();
    let b = image_source_rir(&room64, [1.0, 2.0, 1.0], [3.0, 3.0, 1.2]).unwrap();
    let len = a.len().min(b.len());
    for (x, y) in a.taps()[..len].iter().zip(&b.taps()[..len]) {
        assert!((x.to_f64_lossy() - y).abs() < 1e-5);
    }
}
