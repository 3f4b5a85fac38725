#![no_main]

//! Bytes become `(alpha, T)`: the first byte picks `m` in 1..=4, then `m`
//! weights and `m * m` signed generator entries follow.

use libfuzzer_sys::fuzz_target;
use twolayer_core::{LevyModel, PhaseType, Process};

fuzz_target!(|data: &[u8]| {
    let Some((&head, rest)) = data.split_first() else { return };
    let m = 1 + (head % 4) as usize;
    if rest.len() < m + m * m {
        return;
    }
    let (w, g) = rest.split_at(m);
    let total: f64 = w.iter().map(|&b| b as f64).sum();
    let alpha: Vec<f64> = if total > 0.0 { w.iter().map(|&b| b as f64 / total).collect() } else { vec![1.0 / m as f64; m] };
    let generator: Vec<Vec<f64>> =
        g[..m * m].chunks(m).map(|row| row.iter().map(|&b| (b as i8) as f64 / 16.0).collect()).collect();
    let Ok(pt) = PhaseType::new(alpha, generator) else { return };
    let sigma = if head & 0x80 != 0 { 0.3 } else { 0.0 };
    let Ok(model) = LevyModel::new(1.0, sigma, 2.0, pt, 0.5) else { return };
    for which in [Process::Y, Process::X] {
        let _ = model.psi(which, 1.0);
        let _ = model.negative_roots(which, 0.1);
    }
});
