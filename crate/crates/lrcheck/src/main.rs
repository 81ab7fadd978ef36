fn main() {
    eprintln!("lrcheck: not yet implemented");
    std::process::exit(2);
}
