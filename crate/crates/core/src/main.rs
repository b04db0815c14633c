fn main() {
    std::process::exit(genbound::cli::main_with_args(std::env::args_os()));
}
