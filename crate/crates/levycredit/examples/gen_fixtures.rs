//! Regenerates the synthetic fixtures under `fixtures/`.
//!
//! Each series is a seeded simulation of asset dynamics priced into equity,
//! so the files are reproducible bit for bit: `cargo run --example
//! gen_fixtures`. Seeds were picked so every path stays in the invertible
//! region (positive distance to default) over the whole window.

use chrono::NaiveDate;
use levycredit::mc::simulate_increments;
use levycredit::pricing::{distance_input, equity_value, DebtSpec, SeriesControl};
use levycredit::ModelParams;

struct Fixture {
    file: &'static str,
    ticker: &'static str,
    params: ModelParams,
    v0: f64,
    face: f64,
    drift: f64,
    seed: u64,
    models: &'static str,
}

fn main() {
    let fixtures = [
        Fixture {
            file: "sap_gy_synthetic.csv",
            ticker: "SAP GY",
            params: ModelParams::neg_gamma(3.280, 0.888).unwrap(),
            v0: 180913.0,
            face: 16196.0,
            drift: 0.04,
            seed: 19,
            models: "[\"neg-gamma\", \"neg-ig\", \"merton\"]",
        },
        Fixture {
            file: "lha_gy_synthetic.csv",
            ticker: "LHA GY",
            params: ModelParams::neg_gamma(4.074, 0.784).unwrap(),
            v0: 30318.0,
            face: 10106.0,
            drift: 0.05,
            seed: 13,
            models: "[\"neg-gamma\", \"neg-ig\", \"merton\"]",
        },
        Fixture {
            file: "get_fp_synthetic.csv",
            ticker: "GET FP",
            params: ModelParams::sym_vg(0.10, 1.8).unwrap(),
            v0: 14994.0,
            face: 4998.0,
            drift: 0.02,
            seed: 17,
            models: "[\"sym-vg\", \"merton\"]",
        },
    ];

    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir).unwrap();
    let ctrl = SeriesControl::default();
    let start = NaiveDate::from_ymd_opt(2019, 10, 28).unwrap();

    for f in &fixtures {
        let n = 252;
        let omega = f.params.martingale_adjustment();
        let r_bar = f.drift - omega - f.params.expected_increment(1.0);
        let increments = simulate_increments(&f.params, 1.0, n - 1, f.seed);
        let debt = DebtSpec::new(f.face, 1.0, 0.0).unwrap();

        let mut assets = vec![f.v0];
        for x in &increments {
            let prev = *assets.last().unwrap();
            assets.push(prev * ((r_bar + omega) + x).exp());
        }
        // keep every date comfortably away from the default boundary at all
        // sweep maturities: one-sided prices vanish there, and near-the-money
        // windows make the moment fixed point poorly conditioned
        for t in [1.0, 5.0, 10.0, 15.0] {
            let d = DebtSpec::new(f.face, t, 0.0).unwrap();
            let min_k = assets
                .iter()
                .map(|&v| distance_input(&f.params, v, &d, 0.0))
                .fold(f64::INFINITY, f64::min);
            assert!(min_k > 0.25, "{}: min distance {min_k} at T={t}, pick another seed", f.file);
        }

        let mut csv = String::from("date,value\n");
        for (i, v) in assets.iter().enumerate() {
            let date = start + chrono::Days::new(i as u64);
            let ve = equity_value(&f.params, *v, &debt, &ctrl).unwrap();
            csv.push_str(&format!("{date},{ve:.6}\n"));
        }
        std::fs::write(dir.join(f.file), csv).unwrap();

        // the CSV is referenced by bare name; loaders resolve it against the
        // config's own directory
        let toml = format!(
            "ticker = \"{}\"\ndebt_face_value = {:.1}\nmaturities = [1.0, 5.0]\nrisk_free_rate = 0.0\nmodels = {}\nequity_csv = \"{}\"\nmeasure = \"both\"\nwindow = \"1y\"\n",
            f.ticker, f.face, f.models, f.file,
        );
        let stem = f.file.trim_end_matches("_synthetic.csv");
        std::fs::write(dir.join(format!("{stem}.toml")), toml).unwrap();
        println!("wrote {} (+ {stem}.toml), drift {}", f.file, f.drift);
    }
}
