fn main() {
    std::process::exit(sddq::cli::run(std::env::args_os()));
}
