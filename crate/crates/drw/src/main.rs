fn main() {
    std::process::exit(drw::cli::main_with_args(std::env::args_os()));
}
