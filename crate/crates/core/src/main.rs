fn main() {
    std::process::exit(oam_ring::cli::main_with_args(std::env::args_os()));
}
