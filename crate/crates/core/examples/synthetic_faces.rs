//! Render a labelled toy-face corpus and round-trip it through PGM files.

use dp_image::data::{generate_corpus, read_pgm, write_pgm, Split};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = generate_corpus(5, 4, 1, 32, 3)?;
    println!(
        "{} images, {} train / {} eval",
        corpus.images.len(),
        corpus.manifest.split(Split::Train).count(),
        corpus.manifest.split(Split::Eval).count()
    );
    let p = &corpus.params[0];
    println!("identity 0: {:?}", p.identity);
    println!("sample 0 nuisance: {:?}", p.nuisance);

    let dir = tempfile::tempdir()?;
    let path = dir.path().join("face.pgm");
    write_pgm(&corpus.images[0], &path)?;
    let back = read_pgm(&path)?;
    let worst = corpus.images[0]
        .pixels()
        .iter()
        .zip(back.pixels())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1.0 / 510.0 + 1e-12);
    println!("PGM round trip max error {worst:.5}");

    for y in (0..32).step_by(2) {
        let row: String = (0..32)
            .map(|x| match corpus.images[0].get(x, y) {
                v if v < 0.2 => ' ',
                v if v < 0.5 => '-',
                _ => '#',
            })
            .collect();
        println!("{row}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
