fn main() {
    std::process::exit(ris_fading::cli::main_with_args(std::env::args_os()));
}
