//! Grayscale dilation, erosion, opening and closing on a tiny image, plus
//! the open-close difference the candidate stage is built on.
//!
//! ```bash
//! cargo run -p textloc --example morphology_basics
//! ```

use textloc::morphology::{absdiff, close, dilate, erode, open};
use textloc::{GrayImage, StructuringElement};

fn show(name: &str, img: &GrayImage) {
    println!("{name}:");
    for y in 0..img.height() {
        let row: Vec<String> = img.row(y).iter().map(|v| format!("{v:>4}")).collect();
        println!("  {}", row.join(""));
    }
}

fn main() -> textloc::Result<()> {
    // bright background, a 2 px dark stroke and a single bright speck
    let mut img = GrayImage::from_fn(12, 5, |x, _| if x == 4 || x == 5 { 20 } else { 200 })?;
    img.set(9, 2, 255);
    let se = StructuringElement::rect(3, 1)?;

    show("input", &img);
    show("dilate 3x1", &dilate(&img, &se));
    show("erode 3x1", &erode(&img, &se));
    let (o, c) = (open(&img, &se), close(&img, &se));
    show("open 3x1", &o);
    show("close 3x1", &c);
    show("|open - close|", &absdiff(&o, &c)?);

    // a non-flat element adds its heights before taking the max
    let bump = StructuringElement::new(3, 1, vec![Some(0), Some(30), Some(0)], (1, 0))?;
    show("dilate with a 30 level bump", &dilate(&img, &bump));
    Ok(())
}
