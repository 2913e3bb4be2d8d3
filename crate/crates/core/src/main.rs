fn main() {
    std::process::exit(squeezelab::cli::main(std::env::args_os()));
}
