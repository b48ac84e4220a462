fn main() {
    eprintln!("fedsim CLI: not wired up yet");
    std::process::exit(4);
}
