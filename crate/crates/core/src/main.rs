fn main() {
    std::process::exit(holonomy_bias::cli::main_with_args(std::env::args_os()));
}
