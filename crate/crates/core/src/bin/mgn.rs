fn main() {
    std::process::exit(mgn::cli::run(std::env::args_os()));
}
