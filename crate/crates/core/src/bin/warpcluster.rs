fn main() {
    std::process::exit(warpcluster::cli::main_with_args(std::env::args_os()));
}
