//! Exploratory probe of simulation dynamics (not part of the test suite).

use flashsim_core::agents::TraderKind;
use flashsim_core::scenarios::crash_metrics;
use flashsim_core::sim::{presets, run};
use flashsim_core::stylized::{acf, moment_vector, resample_returns};

fn main() {
    let mode = std::env::args().nth(1).unwrap_or_else(|| "calib".into());
    let seed: u64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1);
    let mut config = match mode.as_str() {
        "flash" => presets::flash2010(seed),
        "mini" => presets::minicrash(seed),
        _ => presets::calibration(seed),
    };
    if std::env::var("STAGGER_FT").is_ok() {
        config.fundamental_traders.staggered = true;
    }
    if std::env::var("MM_SINGLE").is_ok() {
        config.market_makers.single_pair = true;
    }
    if std::env::var("DIST_TICKS").is_ok() {
        // Interpret quote distances in ticks instead of price units.
        config.common.limit_dist_mu += config.tick_size.ln();
        config.market_makers.edge_max *= config.tick_size;
    }
    let t0 = std::time::Instant::now();
    let record = run(&config).expect("run");
    let elapsed = t0.elapsed();
    println!("runtime: {elapsed:?} for {} steps", record.total_steps);
    println!("trades: {}", record.trades.len());
    let filled = record.forward_filled_mid();
    let n = filled.len();
    println!(
        "mid: open {:.2} 10:00 {:.2} 12:00 {:.2} 14:00 {:.2} 14:45 {:.2} 15:30 {:.2} close {:.2}",
        filled[3000],
        filled[(72_000usize).min(n - 1)],
        filled[(144_000usize).min(n - 1)],
        filled[(216_000usize).min(n - 1)],
        filled[(243_000usize).min(n - 1)],
        filled[(270_000usize).min(n - 1)],
        filled[n - 1]
    );
    let lo = filled.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = filled.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    println!("mid range: [{lo:.2}, {hi:.2}]");

    let w = record.warmup_steps as usize;
    let morning_end = (record.step_of_time(12 * 3600 + 30 * 60) as usize).min(n);
    let mean = |xs: &[u32]| xs.iter().map(|&v| v as f64).sum::<f64>() / xs.len().max(1) as f64;
    println!(
        "bid depth: morning mean {:.0}, min whole day {}",
        mean(&record.bid_depth[w..morning_end]),
        record.bid_depth[w..].iter().min().unwrap()
    );
    let two_sided = record.mid[w..].iter().filter(|m| m.is_some()).count() as f64
        / (record.mid.len() - w) as f64;
    println!("two-sided fraction post warmup: {:.4}", two_sided);
    println!(
        "minute volume: at 10:00 {}, max {}",
        record.minute_volume[(72_000usize).min(n - 1)],
        record.minute_volume.iter().max().unwrap()
    );

    for kind in TraderKind::ALL {
        let series = record.inventories.of(kind);
        if series.is_empty() {
            continue;
        }
        let maxabs = series.iter().map(|v| v.abs()).max().unwrap();
        println!(
            "inventory {:>14}: end {:>9}, max|.| {:>9}",
            kind.label(),
            series[series.len() - 1],
            maxabs
        );
    }

    match resample_returns(&record.mid, record.warmup_steps, record.steps_per_second()) {
        Ok(returns) => {
            let r = returns.as_slice();
            let mean = r.iter().sum::<f64>() / r.len() as f64;
            let m2 = r.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / r.len() as f64;
            let m4 = r.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / r.len() as f64;
            let kurt = m4 / (m2 * m2) - 3.0;
            let acf13 = (1..=3)
                .map(|l| acf(r, l).unwrap())
                .sum::<f64>()
                / 3.0;
            println!("returns: n {} std {:.3e} excess kurtosis {:.2} mean acf(1..3) {:.4}", r.len(), m2.sqrt(), kurt, acf13);
            match moment_vector(&returns) {
                Ok(mv) => println!(
                    "hill {:.4} vol {:.3e} acf_r2(1..3 avg) {:.4} acf_r2(30..32 avg) {:.4}",
                    mv.hill,
                    mv.volatility,
                    (mv.acf_squared[0] + mv.acf_squared[1] + mv.acf_squared[2]) / 3.0,
                    (mv.acf_squared[3] + mv.acf_squared[4] + mv.acf_squared[5]) / 3.0
                ),
                Err(e) => println!("moment vector failed: {e}"),
            }
        }
        Err(e) => println!("returns failed: {e}"),
    }

    if config.institutional.is_some() {
        let metrics = crash_metrics(&record);
        println!(
            "crash: twap {:.2} p_min {:.2} amplitude {:.3}% duration {:?} min",
            metrics.twap_ref,
            metrics.p_min,
            metrics.amplitude * 100.0,
            metrics.sell_algo_duration_secs.map(|s| s / 60.0)
        );
    }

    if std::env::args().nth(3).as_deref() == Some("detail") {
        println!("time        mid      fund   minvol   mm_inv    ft_inv  bid_dep  ask_dep");
        let mm = record.inventories.of(TraderKind::MarketMaker);
        let ft = record.inventories.of(TraderKind::Fundamental);
        let mut step = 0usize;
        while step < n {
            let t = record.step_time_ms(step as u32) / 1000;
            println!(
                "{:02}:{:02}:{:02} {:8.2} {:8.2} {:8} {:8} {:9} {:8} {:8}",
                t / 3600,
                (t / 60) % 60,
                t % 60,
                filled[step],
                config.fundamental[step],
                record.minute_volume[step],
                mm[step],
                ft[step],
                record.bid_depth[step],
                record.ask_depth[step]
            );
            let in_crash = (216_000..260_000).contains(&step);
            step += if in_crash { 6_000 } else { 18_000 };
        }
    }
}
