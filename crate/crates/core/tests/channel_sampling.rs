use netentropy::channel::{
    connection_probability, snr_connection_indicator, ChannelParams, DEFAULT_SYMBOL_RATE,
};
use netentropy::rng::substream;

const SAMPLES: usize = 1_000_000;

fn on_fraction(r: f64, params: &ChannelParams, seed: u64) -> f64 {
    let mut rng = substream(seed, 0, r.to_bits(), 0);
    let on = (0..SAMPLES)
        .filter(|_| {
            snr_connection_indicator(r, params, &mut rng)
                .unwrap()
                .is_on()
        })
        .count();
    on as f64 / SAMPLES as f64
}

fn within_three_sigma(freq: f64, p: f64) -> bool {
    let sigma = (p * (1.0 - p) / SAMPLES as f64).sqrt();
    (freq - p).abs() <= 3.0 * sigma
}

#[test]
fn indicator_at_typical_range() {
    let params = ChannelParams::new(0.7, 2.0, 500.0, DEFAULT_SYMBOL_RATE).unwrap();
    let f = on_fraction(0.7, &params, 1);
    assert!(within_three_sigma(f, (-1f64).exp()), "{f}");
    let f = on_fraction(1.0, &params, 2);
    assert!(within_three_sigma(f, 0.129_922_6), "{f}");
}

#[test]
fn indicator_matches_connection_function_on_grid() {
    for (k, eta) in [2.0, 3.0, 4.0].into_iter().enumerate() {
        let params = ChannelParams::new(0.7, eta, 500.0, DEFAULT_SYMBOL_RATE).unwrap();
        for i in 1..=10 {
            let r = 0.14 * i as f64;
            let p = connection_probability(r, &params).unwrap();
            let f = on_fraction(r, &params, 10 + k as u64);
            assert!(within_three_sigma(f, p), "eta={eta} r={r}: {f} vs {p}");
        }
    }
}
