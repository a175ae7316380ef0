//! Scratch harness for eyeballing training behavior on Mackey-Glass.

use mdcgan::data::{mackey_glass, window_split, with_noisy_tail, window_pairs, MackeyGlassParams};
use mdcgan::models::{train_mdcgan, train_mdn, train_snn, train_cgan, TrainConfig};
use mdcgan::numeric::Rng;

fn main() {
    let series = mackey_glass(2405, &MackeyGlassParams::default())
        .unwrap()
        .normalized()
        .unwrap();
    let split = window_split(&series, 5, 2000, 400).unwrap();

    let args: Vec<String> = std::env::args().collect();
    let model_name = args.get(1).map(|s| s.as_str()).unwrap_or("mdcgan");
    let iterations: usize = args
        .get(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20_000);
    let seed: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1);

    let stop_window: usize = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(200);
    let dropout_gen: f64 = args.get(5).and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let lr: f64 = args.get(6).and_then(|s| s.parse().ok()).unwrap_or(0.001);
    let gen_loss = match args.get(7).map(|s| s.as_str()) {
        Some("log") => mdcgan::models::GenLoss::LogLikelihood,
        _ => mdcgan::models::GenLoss::RawLikelihood,
    };
    let cfg = TrainConfig {
        iterations,
        seed,
        stop_window,
        dropout_gen,
        lr,
        gen_loss,
        ..Default::default()
    };

    let t0 = std::time::Instant::now();
    let (model, curve) = match model_name {
        "mdcgan" => train_mdcgan(&split.train, &cfg).unwrap(),
        "mdn" => train_mdn(&split.train, &cfg).unwrap(),
        "snn" => train_snn(&split.train, &cfg).unwrap(),
        "cgan" => train_cgan(&split.train, &cfg).unwrap(),
        other => panic!("unknown model {other}"),
    };
    let train_time = t0.elapsed();

    let t1 = std::time::Instant::now();
    for pct_i in [0, 30] {
        let pct = pct_i as f64 / 100.0;
        let mut noise_rng = Rng::with_stream(seed, 777 + pct_i as u64);
        let noisy = with_noisy_tail(&series, split.first_test_target, pct, &mut noise_rng).unwrap();
        // Noisy input windows, clean targets.
        let noisy_windows = {
            let all = window_pairs(&noisy, 5).unwrap();
            all.inputs[2000..2400].to_vec()
        };
        let clean_targets = &split.test.targets;
        let mut rng = Rng::with_stream(seed, 12345);
        let mut se = 0.0;
        for (x, y) in noisy_windows.iter().zip(clean_targets) {
            let p = model.predict(x, 100, &mut rng).unwrap();
            se += (p.point - y) * (p.point - y);
        }
        let mse = se / clean_targets.len() as f64;
        println!("{model_name} seed {seed} noise {pct_i}%: test MSE = {mse:.6}");
    }
    let pred_time = t1.elapsed();

    println!(
        "{model_name}: iterations_run = {}, saturated = {}, train {train_time:?}, predict {pred_time:?}",
        curve.len(),
        model.meta.stopped_on_saturation,
    );
    if let Some(last) = curve.last() {
        println!(
            "final: loss {:.6}, disc {:?}, sample_mse {:.6}",
            last.loss, last.disc_loss, last.sample_mse
        );
    }
    // trailing-200 means of the monitored error every 500 iterations
    let window = 200.min(curve.len());
    for chunk_end in (window..=curve.len()).step_by(500) {
        let mean: f64 = curve[chunk_end - window..chunk_end]
            .iter()
            .map(|r| r.sample_mse)
            .sum::<f64>()
            / window as f64;
        println!("iter {chunk_end}: trailing mean sample_mse = {mean:.6}");
    }
}
