fn main() {
    std::process::exit(loynes_cli::dispatch(std::env::args()));
}
