fn main() {
    std::process::exit(henselium::cli::main_with_args(std::env::args_os()));
}
