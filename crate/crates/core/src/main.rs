fn main() {
    std::process::exit(ab_kernels::cli::main_with_args(std::env::args_os()));
}
