//! Generalizing postcodes to sectors, then measuring uniqueness and
//! frequencies, through the same entry point as the binary.

use std::path::PathBuf;

use opcmlink::cli::run;

fn main() {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let path = |f: &str| data.join(f).to_string_lossy().into_owned();
    let hierarchy = path("postcode_hierarchy.json");
    let original = path("fig1a.csv");

    let dir = std::env::temp_dir().join("opcmlink-anonymize");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let sanitised = dir.join("sanitised.csv").to_string_lossy().into_owned();

    let steps: [Vec<&str>; 5] = [
        vec!["audit", &original, "--quasi", "postcode"],
        vec![
            "generalize",
            &original,
            &sanitised,
            "--attr",
            "postcode",
            "--level",
            "sector",
            "--hierarchy",
            &hierarchy,
            "--drop",
            "user",
        ],
        vec!["audit", &sanitised, "--quasi", "postcode"],
        vec![
            "freq",
            &sanitised,
            "--attr",
            "postcode",
            "--at-least",
            "SA2",
            "--hierarchy",
            &hierarchy,
        ],
        vec![
            "freq",
            &original,
            "--attr",
            "postcode",
            "--at-least",
            "SA2 8PP",
            "--hierarchy",
            &hierarchy,
        ],
    ];
    for args in steps {
        println!("$ opcmlink {}", args.join(" "));
        let out = run(std::iter::once("opcmlink").chain(args));
        print!("{}{}", out.stdout, out.stderr);
    }
    print!(
        "{}",
        std::fs::read_to_string(&sanitised).expect("written above")
    );
}
