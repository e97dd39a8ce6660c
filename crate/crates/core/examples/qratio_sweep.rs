use herd_audit::auditor::AuditorParams;
use herd_audit::equilibrium::{max_abs_step, sweep_qratio};

fn main() -> herd_audit::Result<()> {
    let ratios: Vec<f64> = (1..=19).map(|k| 0.05 * k as f64).collect();
    let mut tables = Vec::new();
    for lambda in [0.5, 1.0, 2.0] {
        let params = AuditorParams::dp_game(0.5, -1.0, -1.0, lambda)?;
        tables.push((lambda, sweep_qratio(&params, &ratios)?));
    }

    print!("ratio");
    for (lambda, _) in &tables {
        print!(",r_g(lambda={lambda})");
    }
    println!();
    for (k, ratio) in ratios.iter().enumerate() {
        print!("{ratio:.2}");
        for (_, rows) in &tables {
            print!(",{:.6}", rows[k].r_good);
        }
        println!();
    }
    for (lambda, rows) in &tables {
        eprintln!("lambda = {lambda}: max |step| = {:.6}", max_abs_step(rows));
    }
    Ok(())
}
