fn main() {
    std::process::exit(tpdl::cli::run(std::env::args_os()));
}
