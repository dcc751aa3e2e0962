//! Compares the nine wavelet-moment features of a text crop, a flat crop
//! and a noise crop.
//!
//! ```bash
//! cargo run -p textloc --example wavelet_features
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use textloc::features::{features_of_crop, haar_dwt_level1};
use textloc::synthetic::draw_text_block;
use textloc::GrayImage;

fn main() -> textloc::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    let mut text = GrayImage::filled(90, 20, 190)?;
    draw_text_block(&mut text, &mut rng, 0, 0, 20, 60, 40);
    let flat = GrayImage::filled(90, 20, 190)?;
    let noise = GrayImage::from_fn(90, 20, |_, _| rng.gen_range(150..230))?;

    println!("{:<8}{:>10}{:>10}{:>10}", "crop", "E(LH)", "E(HL)", "E(HH)");
    for (name, crop) in [("text", &text), ("flat", &flat), ("noise", &noise)] {
        let d = haar_dwt_level1(crop)?;
        println!(
            "{name:<8}{:>10.3e}{:>10.3e}{:>10.3e}",
            d.lh.energy(),
            d.hl.energy(),
            d.hh.energy()
        );
    }

    println!();
    let names = ["m(LH)", "mu2(LH)", "mu3(LH)", "m(HL)", "mu2(HL)", "mu3(HL)", "m(HH)", "mu2(HH)", "mu3(HH)"];
    let rows = [
        ("text", features_of_crop(&text)?),
        ("flat", features_of_crop(&flat)?),
        ("noise", features_of_crop(&noise)?),
    ];
    print!("{:<10}", "");
    for (name, _) in &rows {
        print!("{name:>14}");
    }
    println!();
    for (k, feature) in names.iter().enumerate() {
        print!("{feature:<10}");
        for (_, fv) in &rows {
            print!("{:>14.4}", fv.0[k]);
        }
        println!();
    }
    Ok(())
}
