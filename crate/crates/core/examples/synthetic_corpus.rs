//! Writes a seeded synthetic corpus with `gt.json` and prints a summary.
//!
//! ```bash
//! cargo run --release -p textloc --example synthetic_corpus -- out_dir [n] [seed]
//! ```

use std::path::PathBuf;

use textloc::io::ImageFormat;
use textloc::synthetic::{generate_corpus, write_corpus, SynthConfig};

fn main() -> textloc::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "synthetic-corpus".into()));
    let n: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(20);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(0);

    let corpus = generate_corpus(n, seed, &SynthConfig::default());
    let gt = write_corpus(&corpus, &out, ImageFormat::Png)?;

    let boxes: Vec<_> = gt.images.iter().flat_map(|i| &i.boxes).collect();
    let empty = gt.images.iter().filter(|i| i.boxes.is_empty()).count();
    println!("{n} images ({empty} without text), {} text blocks", boxes.len());
    if !boxes.is_empty() {
        let mean_h = boxes.iter().map(|b| b.h as f64).sum::<f64>() / boxes.len() as f64;
        let mean_w = boxes.iter().map(|b| b.w as f64).sum::<f64>() / boxes.len() as f64;
        println!("mean block size {mean_w:.0}x{mean_h:.0} px");
    }
    println!("written to {}", out.display());
    Ok(())
}
