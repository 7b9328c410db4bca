fn main() {
    std::process::exit(skc_core::cli::run(std::env::args_os()));
}
