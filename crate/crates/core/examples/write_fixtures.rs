fn main() {
    let dir = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    for p in mlat::oracle::write_fixtures(&dir).expect("fixtures") {
        println!("{}", p.display());
    }
}
